use std::sync::OnceLock;

use regex::{Captures, Regex};

const ONES: [&str; 20] = [
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "ten",
    "eleven",
    "twelve",
    "thirteen",
    "fourteen",
    "fifteen",
    "sixteen",
    "seventeen",
    "eighteen",
    "nineteen",
];
const TENS: [&str; 10] = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// English cardinal words for `0..=9999`, without "and" or hyphens.
pub fn cardinal(n: u32) -> String {
    assert!(n <= 9999, "cardinal() supports 0..=9999, got {n}");
    fn below_hundred(n: u32) -> String {
        if n < 20 {
            ONES[n as usize].to_string()
        } else if n.is_multiple_of(10) {
            TENS[(n / 10) as usize].to_string()
        } else {
            format!("{} {}", TENS[(n / 10) as usize], ONES[(n % 10) as usize])
        }
    }
    if n < 100 {
        return below_hundred(n);
    }
    let mut parts = Vec::new();
    if n >= 1000 {
        parts.push(format!("{} thousand", ONES[(n / 1000) as usize]));
    }
    let hundreds = (n / 100) % 10;
    if hundreds > 0 {
        parts.push(format!("{} hundred", ONES[hundreds as usize]));
    }
    if !n.is_multiple_of(100) {
        parts.push(below_hundred(n % 100));
    }
    parts.join(" ")
}

fn digits_spoken(d: &str) -> String {
    d.chars().map(|c| ONES[c.to_digit(10).unwrap() as usize]).collect::<Vec<_>>().join(" ")
}

fn spoken_integer(d: &str) -> Option<String> {
    if d.len() > 1 && d.starts_with('0') {
        return Some(digits_spoken(d));
    }
    match d.parse::<u32>() {
        Ok(n) if n <= 9999 => Some(cardinal(n)),
        _ => None,
    }
}

fn spoken_time(hour: &str, minute: &str) -> Option<String> {
    let h: u32 = hour.parse().ok()?;
    let m: u32 = minute.parse().ok()?;
    if h > 23 || m > 59 {
        return None;
    }
    let hour_words = cardinal(h);
    Some(match m {
        0 => format!("{hour_words} o'clock"),
        1..=9 => format!("{hour_words} oh {}", ONES[m as usize]),
        _ => format!("{hour_words} {}", cardinal(m)),
    })
}

fn currency_name(symbol: &str, amount: &str) -> (&'static str, &'static str) {
    let one = amount == "1";
    match symbol {
        "£" => (if one { "pound" } else { "pounds" }, "pence"),
        "$" => (if one { "dollar" } else { "dollars" }, "cents"),
        _ => (if one { "euro" } else { "euros" }, "cents"),
    }
}

fn number_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?P<cur>[£$€])?(?P<num>\d+(?:[.:,]\d+)*)").expect("valid number regex"))
}

/// Rewrites digits into their spoken form.
///
/// Clock times `h:mm`/`hh:mm` become `<hour> o'clock`, `<hour> oh <digit>` or
/// `<hour> <minutes>`; integers up to 9999 become cardinal words; currency
/// amounts read as `<n> pounds [<cents>]`. Digits glued to letters (booking
/// references, ordinals) and longer numbers stay unchanged.
pub fn number_to_spoken(text: &str) -> String {
    let re = number_regex();
    re.replace_all(text, |caps: &Captures| {
        let whole = caps.get(0).unwrap();
        let before = text[..whole.start()].chars().next_back();
        let after = text[whole.end()..].chars().next();
        let glued = |c: Option<char>| c.is_some_and(char::is_alphanumeric);
        let keep = whole.as_str().to_string();
        if glued(before) || glued(after) {
            return keep;
        }
        let num = &caps["num"];
        if let Some(cur) = caps.name("cur") {
            let (int, frac) = match num.split_once('.') {
                Some((i, f)) if f.len() == 2 && !i.contains([',', ':']) => (i, Some(f)),
                None if !num.contains([',', ':']) => (num, None),
                _ => return keep,
            };
            let Some(int_words) = spoken_integer(int) else { return keep };
            let (unit, sub) = currency_name(cur.as_str(), int);
            return match frac.map(|f| f.parse::<u32>().unwrap_or(0)) {
                Some(0) | None => format!("{int_words} {unit}"),
                Some(c) if int == "0" => format!("{} {sub}", cardinal(c)),
                Some(c) => format!("{int_words} {unit} {}", cardinal(c)),
            };
        }
        if let Some((h, m)) = num.split_once(':') {
            if h.len() <= 2 && m.len() == 2 && h.chars().all(|c| c.is_ascii_digit()) {
                return spoken_time(h, m).unwrap_or(keep);
            }
            return keep;
        }
        if num.chars().all(|c| c.is_ascii_digit()) {
            return spoken_integer(num).unwrap_or(keep);
        }
        keep
    })
    .into_owned()
}
