use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::sync::mpsc;
use std::thread;

use serde_json::{json, Value};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rolecsp"));
    c.env_remove("ROLECSP_ENDPOINT").env_remove("ROLECSP_API_KEY").env_remove("ROLECSP_MODEL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const GAME: &str = r#"{"kind":"AVALON","players":["a","b","c","d","e","f"],"roles":[
 {"name":"merlin","count":1,"alignment":"GOOD"},{"name":"percival","count":1,"alignment":"GOOD"},
 {"name":"servant","count":2,"alignment":"GOOD"},{"name":"morgana","count":1,"alignment":"EVIL"},
 {"name":"assassin","count":1,"alignment":"EVIL"}]}"#;

fn doc(evidence: Value) -> String {
    json!({"evidence": evidence, "phenomenon": [], "assertions": [], "hypotheses": []}).to_string()
}

fn role_is(p: &str, r: &str) -> Value {
    json!({"type": "role_is", "args": {"player": p, "role": r}})
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn table_rows(out: &str) -> Vec<Vec<f64>> {
    out.lines()
        .skip(1)
        .take_while(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().skip(1).map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn infer_empty_constraints_is_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let empty = write(dir.path(), "c.json", &doc(json!([])));
    let o = run(&["infer", "--game", &game, "--constraints", &empty]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = table_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(r, vec![0.1667, 0.1667, 0.3333, 0.1667, 0.1667]);
    }
    assert!(stdout(&o).contains("feasible worlds: 360"));
}

#[test]
fn infer_full_reveal_is_one_hot_and_writes_result() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let roles = ["merlin", "percival", "servant", "servant", "morgana", "assassin"];
    let ev: Vec<Value> = ["a", "b", "c", "d", "e", "f"].iter().zip(roles).map(|(p, r)| role_is(p, r)).collect();
    let c = write(dir.path(), "c.json", &doc(json!(ev)));
    let out = dir.path().join("result.json");
    let o = run(&["infer", "--game", &game, "--constraints", &c, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in table_rows(&stdout(&o)) {
        assert_eq!(r.iter().filter(|x| **x == 1.0).count(), 1);
        assert_eq!(r.iter().filter(|x| **x == 0.0).count(), 4);
    }
    let result: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(result["map"], json!(roles));
    assert_eq!(result["feasible_count"], 1);
    assert_eq!(result["entropy_bits"], 0.0);
}

#[test]
fn infer_contradiction_exits_3_with_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let c = write(dir.path(), "c.json", &doc(json!([role_is("a", "merlin"), role_is("a", "morgana")])));
    let o = run(&["infer", "--game", &game, "--constraints", &c]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("INFEASIBLE"));
    assert!(stderr(&o).contains(r#""role":"morgana""#), "{}", stderr(&o));
}

#[test]
fn infer_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let c = write(dir.path(), "c.json", &doc(json!([role_is("zed", "merlin")])));
    let o = run(&["infer", "--game", &game, "--constraints", &c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("UNKNOWN_NAME"));
    let junk = write(dir.path(), "junk.json", "{");
    assert_eq!(run(&["infer", "--game", &game, "--constraints", &junk]).status.code(), Some(2));
    assert_eq!(run(&["infer", "--game", &game, "--preset", "NOPE"]).status.code(), Some(2));
}

#[test]
fn infer_seat_view_uses_knowledge() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let evils = ["morgana", "assassin"];
    let k = write(
        dir.path(),
        "k.json",
        &doc(json!([
            {"type": "role_in", "args": {"player": "e", "roles": evils}},
            {"type": "role_in", "args": {"player": "f", "roles": evils}}
        ])),
    );
    let o = run(&["infer", "--game", &game, "--view", "merlin:a", "--knowledge", &k]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("feasible worlds: 6"));
}

#[test]
fn infer_reads_round_directories() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let rounds = dir.path().join("rounds");
    fs::create_dir(&rounds).unwrap();
    write(&rounds, "round-1.json", &doc(json!([role_is("a", "merlin")])));
    write(&rounds, "round-2.json", &doc(json!([role_is("b", "percival")])));
    let o = run(&["infer", "--game", &game, "--constraints", rounds.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("feasible worlds: 12"));
}

fn synth(dir: &Path, count: &str, seed: &str) -> Output {
    run(&["synth", "--count", count, "--seed", seed, "--out", dir.to_str().unwrap()])
}

fn files(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn synth_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(synth(a.path(), "3", "7").status.success());
    assert!(synth(b.path(), "3", "7").status.success());
    let fa = files(a.path());
    assert_eq!(fa.len(), 3);
    assert_eq!(fa, files(b.path()));
    let c = tempfile::tempdir().unwrap();
    synth(c.path(), "3", "8");
    assert_ne!(fa, files(c.path()));
}

#[test]
fn synth_mafia_and_lie() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "synth",
        "--count",
        "2",
        "--kind",
        "mafia",
        "--players",
        "7",
        "--mafia",
        "2",
        "--condition",
        "LIE",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for (_, text) in files(dir.path()) {
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["config"]["kind"], "MAFIA");
        assert_eq!(v["condition"], "LIE");
    }
}

fn csv_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(String::from).collect()
}

fn rounds_in(dir: &Path) -> usize {
    files(dir).iter().map(|(_, t)| serde_json::from_str::<Value>(t).unwrap()["rounds"].as_array().unwrap().len()).sum()
}

#[test]
fn replay_cross_product_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("recs");
    synth(&recs, "2", "3");
    let out = dir.path().join("m.csv");
    let o = run(&[
        "replay",
        "--records",
        recs.to_str().unwrap(),
        "--presets",
        "STRICT,ASSERT",
        "--views",
        "objective",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), rounds_in(&recs) * 2);
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| {
        let f: Vec<&str> = r.split(',').collect();
        (f[0].to_string(), f[1].parse::<usize>().unwrap(), f[2].to_string(), f[3].to_string())
    });
    assert_eq!(rows, sorted);
}

#[test]
fn replay_sample_one_round_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("recs");
    synth(&recs, "5", "11");
    let go = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "replay",
            "--records",
            recs.to_str().unwrap(),
            "--presets",
            "STRICT,HYP_M",
            "--sample-one-round",
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let a = go("a.csv", "4");
    assert_eq!(a, go("b.csv", "4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count() - 1, 5 * 2);
}

#[test]
fn replay_empty_dir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["replay", "--records", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_skips_bad_records_but_fails_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("recs");
    synth(&recs, "2", "5");
    write(&recs, "zz-broken.json", "{\"config\": 1}");
    let out = dir.path().join("m.csv");
    let o = run(&["replay", "--records", recs.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("skipped"));
    assert!(!csv_rows(&out).is_empty());
}

const HEADER: &str = "game_id,round,preset,view,condition,ma,map,entropy_bits,feasible_count";

fn metrics_csv(dir: &Path, name: &str, preset: &str, ma: &[f64]) -> String {
    let mut s = String::from(HEADER) + "\n";
    for (i, v) in ma.iter().enumerate() {
        s += &format!("g{i},1,{preset},objective,TRUTH,{v},{v},0,1\n");
    }
    write(dir, name, &s)
}

/// Two-sided exact Wilcoxon p by enumerating all sign patterns of the ranks.
fn exact_p(ranks: &[f64], observed_w_plus: f64) -> f64 {
    let n = ranks.len();
    let total: f64 = ranks.iter().sum();
    let lo = observed_w_plus.min(total - observed_w_plus);
    let mut extreme = 0usize;
    for mask in 0..(1u32 << n) {
        let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if w <= lo + 1e-9 || w >= total - lo - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

fn report_row<'a>(out: &'a str, metric: &str) -> Vec<&'a str> {
    out.lines()
        .find(|l| l.starts_with("objective") && l.split_whitespace().nth(1) == Some(metric))
        .unwrap()
        .split_whitespace()
        .collect()
}

#[test]
fn eval_identical_csvs_report_degenerate_tests() {
    let dir = tempfile::tempdir().unwrap();
    let a = metrics_csv(dir.path(), "a.csv", "STRICT", &[0.1, 0.2, 0.3]);
    let o = run(&["eval", &a, &a]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = report_row(&text, "MA");
    assert!(row.contains(&"ALL_ZERO_DIFFERENCES"));
    assert!(row.contains(&"ZERO_VARIANCE"));
    assert_ne!(*row.last().unwrap(), "*");
}

#[test]
fn eval_exact_p_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let base = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    let diffs = [0.05, -0.11, 0.17, 0.23, 0.29, 0.31];
    let b: Vec<f64> = base.iter().zip(diffs).map(|(x, d)| x + d).collect();
    let a = metrics_csv(dir.path(), "a.csv", "STRICT", &base);
    let bp = metrics_csv(dir.path(), "b.csv", "STRICT", &b);
    let o = run(&["eval", &a, &bp]);
    assert!(o.status.success(), "{}", stderr(&o));
    // |d| ranks 1..6 in order; only rank 2 is negative.
    let expect = exact_p(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 19.0);
    let text = stdout(&o);
    let row = report_row(&text, "MA");
    let p: f64 = row[5].parse().unwrap();
    assert!((p - expect).abs() < 5e-5, "{p} vs {expect}");
}

#[test]
fn eval_key_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = metrics_csv(dir.path(), "a.csv", "STRICT", &[0.1, 0.2, 0.3]);
    let b = metrics_csv(dir.path(), "b.csv", "ASSERT", &[0.1, 0.2]);
    let o = run(&["eval", &a, &b]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("KEY_MISMATCH"));
}

/// Answers each of `replies` in turn with the given status and body,
/// sending every received request body back over the channel.
fn mock_endpoint(replies: Vec<(u16, String)>) -> (String, mpsc::Receiver<(String, String)>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for (status, body) in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut headers = String::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                headers.push_str(&line);
            }
            let mut req = vec![0; len];
            reader.read_exact(&mut req).unwrap();
            tx.send((headers, String::from_utf8(req).unwrap())).unwrap();
            let resp = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(resp.as_bytes()).unwrap();
        }
    });
    (url, rx)
}

fn chat_reply(content: &str) -> String {
    json!({"choices": [{"message": {"role": "assistant", "content": content}}]}).to_string()
}

#[test]
fn extract_with_mock_endpoint_writes_a_document() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let transcript = write(dir.path(), "t.txt", "a: I am Merlin, trust me.\n");
    let claim = json!({"type": "assert_role_is", "args": {"speaker": "a", "role": "merlin"}});
    let body = json!({"evidence": [], "phenomenon": [], "assertions": [claim], "hypotheses": []});
    let reply = format!("```json\n{body}\n```");
    let (url, rx) = mock_endpoint(vec![(200, chat_reply("not json")), (200, chat_reply(&reply))]);
    let out = dir.path().join("doc.json");
    let o = bin()
        .args(["extract", "--game", &game, "--transcript", &transcript, "--out", out.to_str().unwrap()])
        .env("ROLECSP_ENDPOINT", &url)
        .env("ROLECSP_API_KEY", "sk-test")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let written: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(written["assertions"][0]["args"]["speaker"], "a");

    let (headers, body) = rx.recv().unwrap();
    assert!(headers.to_ascii_lowercase().contains("authorization: bearer sk-test"));
    let body: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(body["temperature"], 0);
    assert_eq!(body["messages"][1]["content"], "a: I am Merlin, trust me.\n");
    assert!(body["messages"][0]["content"].as_str().unwrap().contains("morgana"));
    assert!(rx.recv().is_ok());
}

#[test]
fn extract_endpoint_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let transcript = write(dir.path(), "t.txt", "hello");
    let (url, _rx) = mock_endpoint(vec![(500, "{}".into())]);
    let o = run(&["extract", "--game", &game, "--transcript", &transcript, "--endpoint", &url]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("ENDPOINT_ERROR"));
}

#[test]
fn extract_never_valid_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let game = write(dir.path(), "game.json", GAME);
    let transcript = write(dir.path(), "t.txt", "hello");
    let (url, _rx) = mock_endpoint(vec![(200, chat_reply("nope")), (200, chat_reply("still nope"))]);
    let o = run(&["extract", "--game", &game, "--transcript", &transcript, "--endpoint", &url, "--retries", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("EXTRACTION_INVALID"));
}

#[test]
fn serve_port_zero_prints_the_bound_port() {
    let mut child = bin().args(["serve", "--port", "0"]).stdout(Stdio::piped()).spawn().unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let first = lines.next().unwrap().unwrap();
    let port: u16 = lines.next().unwrap().unwrap().strip_prefix("port ").unwrap().parse().unwrap();
    assert!(first.ends_with(&format!(":{port}")));
    assert_ne!(port, 0);

    let body = json!({"config": serde_json::from_str::<Value>(GAME).unwrap()}).to_string();
    let resp = ureq::post(&format!("http://127.0.0.1:{port}/sessions"))
        .header("content-type", "application/json")
        .send(body)
        .map(|mut r| r.body_mut().read_to_string().unwrap());
    child.kill().unwrap();
    child.wait().unwrap();
    let v: Value = serde_json::from_str(&resp.unwrap()).unwrap();
    assert_eq!(v["revision"], 0);
}
