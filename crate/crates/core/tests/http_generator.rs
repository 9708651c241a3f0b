use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use laug::aug_tp::{tp_augment, GenerationRequest, HttpGenerator, ParaphraseGenerator};
use laug::{Dialog, Error, Ontology, Split, Utterance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Serves one request with `reply` and hands back the request body.
fn serve_once(reply: &'static str) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/generate", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line.trim().is_empty() {
                break;
            }
            if let Some((k, v)) = line.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    length = v.trim().parse().unwrap();
                }
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
            reply.len()
        )
        .unwrap();
        String::from_utf8(body).unwrap()
    });
    (url, handle)
}

fn dialog() -> Dialog {
    let u = Utterance::user("I want to go to Cambridge.").with_value("attraction", "inform", "dest", "Cambridge");
    Dialog::new("h", Split::Test, vec![u])
}

#[test]
fn speaks_the_json_contract() {
    let (url, server) = serve_once(r#"{"candidates": ["", "Take me to cambridgee please."]}"#);
    let gen = HttpGenerator::new(&url, Duration::from_secs(5));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rec = tp_augment(&dialog(), 0, &gen, 3, &Ontology::new(), &mut rng).unwrap().unwrap();
    assert_eq!(rec.text, "Take me to Cambridge please.");
    let sent: GenerationRequest = serde_json::from_str(&server.join().unwrap()).unwrap();
    assert_eq!(sent.da, "attraction * { inform ( dest = Cambridge ) }");
    assert_eq!(sent.k, 3);
    assert!(sent.context.is_empty());
}

#[test]
fn unreachable_endpoint_is_reported() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", listener.local_addr().unwrap());
    drop(listener);
    let gen = HttpGenerator::new(&url, Duration::from_secs(2));
    let req = GenerationRequest { da: "x { inform ( a = b ) }".into(), context: Vec::new(), k: 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(matches!(gen.generate(&req, &mut rng), Err(Error::GeneratorUnavailable(_))));
}
