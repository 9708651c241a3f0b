/// Length of the longest common subsequence of two character sequences.
pub fn lcs_len(a: &[char], b: &[char]) -> usize {
    lcs_by(a, b, |x, y| x == y)
}

/// Single-row LCS; the row lives on the stack for short `b`.
fn lcs_by<T>(a: &[T], b: &[T], eq: impl Fn(&T, &T) -> bool) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut stack = [0usize; 65];
    let mut heap = Vec::new();
    let row: &mut [usize] = if b.len() < stack.len() {
        &mut stack[..=b.len()]
    } else {
        heap.resize(b.len() + 1, 0);
        &mut heap
    };
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if eq(x, y) { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Similarity `2 * LCS(a, b) / (|a| + |b|)` over lowercased characters.
///
/// Symmetric, 1.0 iff the lowercased strings are equal, and 1.0 for two
/// empty strings.
pub fn fuzzy_ratio(a: &str, b: &str) -> f64 {
    if a.is_ascii() && b.is_ascii() {
        let total = a.len() + b.len();
        if total == 0 {
            return 1.0;
        }
        let lcs = lcs_by(a.as_bytes(), b.as_bytes(), u8::eq_ignore_ascii_case);
        return 2.0 * lcs as f64 / total as f64;
    }
    let a: Vec<char> = a.chars().flat_map(char::to_lowercase).collect();
    let b: Vec<char> = b.chars().flat_map(char::to_lowercase).collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * lcs_len(&a, &b) as f64 / total as f64
}
