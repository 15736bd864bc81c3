//! The HTTP transport against a throwaway server on the loopback interface.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use reqverify_formalizer::{formalize_remote, FormalizerConfig, HttpTransport};

const SECRET: &str = "sk-test-9f8e7d6c5b4a";

/// Serves `replies.len()` requests, sending each raw request back on the channel.
fn serve(replies: Vec<(u16, String)>) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for (status, body) in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                head.push_str(&line);
                if line == "\r\n" {
                    break;
                }
            }
            let mut payload = vec![0; len];
            reader.read_exact(&mut payload).unwrap();
            tx.send(head + &String::from_utf8(payload).unwrap()).unwrap();
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, rx)
}

fn completion(content: &str) -> String {
    serde_json::json!({
        "id": "x",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}]
    })
    .to_string()
}

fn config(url: String, key_env: Option<&str>) -> FormalizerConfig {
    FormalizerConfig {
        endpoint: url,
        model: "prover-test".into(),
        api_key_env: key_env.map(str::to_string),
        timeout_secs: 5,
        ..FormalizerConfig::default()
    }
}

#[test]
fn live_round_trip_sends_key_but_never_records_it() {
    std::env::set_var("HTTP_TEST_FORMALIZER_KEY", SECRET);
    let lean = "```lean4\nvariable (door_open : Bool)\nvariable (lamp : Bool)\ndef initiate_lamp : Prop := door_open = true → lamp = true\n```";
    let (url, rx) = serve(vec![(200, completion(lean))]);
    let cfg = config(url, Some("HTTP_TEST_FORMALIZER_KEY"));
    let t = HttpTransport::new(&cfg).unwrap();
    let f = formalize_remote("If the door is open then initiate lamp", &cfg, &t).unwrap();
    assert_eq!(f.formula.to_string(), "(implies door_open lamp)");

    let raw = rx.recv().unwrap();
    assert!(raw.starts_with("POST /v1/chat/completions"));
    assert!(raw.to_ascii_lowercase().contains(&format!("authorization: bearer {SECRET}").to_ascii_lowercase()));
    let body: serde_json::Value = serde_json::from_str(raw.split("\r\n\r\n").nth(1).unwrap()).unwrap();
    assert_eq!(body["model"], "prover-test");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["role"], "user");

    let transcript = serde_json::to_string(&f.transcript).unwrap();
    assert!(!transcript.contains(SECRET));
    assert!(!format!("{:?}", f.transcript).contains(SECRET));
    assert!(!format!("{t:?}").contains(SECRET));
}

#[test]
fn http_error_status_is_unreachable_after_retries() {
    let (url, rx) = serve(vec![
        (503, "{}".into()),
        (503, "{}".into()),
        (503, "{}".into()),
    ]);
    let cfg = config(url, None);
    let t = HttpTransport::new(&cfg).unwrap();
    let e = formalize_remote("If a then initiate b", &cfg, &t).unwrap_err();
    assert_eq!(e.code(), "SERVICE_UNREACHABLE");
    assert_eq!(e.transcript().unwrap().requests, 3);
    assert_eq!(rx.iter().take(3).count(), 3);
}

#[test]
fn closed_port_is_unreachable() {
    let port = {
        let l = TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let cfg = FormalizerConfig {
        max_retries: 1,
        ..config(format!("http://127.0.0.1:{port}/v1/chat/completions"), None)
    };
    let t = HttpTransport::new(&cfg).unwrap();
    let e = formalize_remote("If a then initiate b", &cfg, &t).unwrap_err();
    assert_eq!(e.code(), "SERVICE_UNREACHABLE");
    assert_eq!(e.transcript().unwrap().requests, 2);
}

#[test]
fn silent_server_times_out() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    thread::spawn(move || {
        let held: Vec<_> = listener.incoming().take(1).collect();
        thread::sleep(Duration::from_secs(5));
        drop(held);
    });
    let cfg = FormalizerConfig { timeout_secs: 1, max_retries: 0, ..config(url, None) };
    let t = HttpTransport::new(&cfg).unwrap();
    let e = formalize_remote("If a then initiate b", &cfg, &t).unwrap_err();
    assert_eq!(e.code(), "TIMEOUT");
}

#[test]
fn missing_key_variable_is_a_config_error() {
    let cfg = config("http://127.0.0.1:9/".into(), Some("HTTP_TEST_UNSET_KEY_VARIABLE"));
    assert_eq!(HttpTransport::new(&cfg).unwrap_err().code(), "FORMALIZER_CONFIG");
}
