use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use oncol_core::transcript::Transcript;
use oncol_core::{build, ColoredState, Formula, Graph, Status};

const TRUE_X2: &str = "forall 1 exists 2 : (2 2 2)";
const FALSE_X1: &str = "forall 1 exists 2 : (1 1 1)";

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn oncol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oncol")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn chromatic_of_p4() {
    let g = scratch("p4.graph", &Graph::path(4).to_text());
    let o = oncol(&["chromatic", p(&g)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
    let o = oncol(&["chromatic", p(&g), "--stats"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nodes "));
}

#[test]
fn solve_p4() {
    let g = scratch("p4-solve.graph", &Graph::path(4).to_text());
    assert!(stdout(&oncol(&["solve", p(&g), "-k", "2"])).contains("winner drawer"));
    assert!(stdout(&oncol(&["solve", p(&g), "-k", "3"])).contains("winner painter"));
    // two isolated vertices with equal colors: the painter still wins with 3
    let s = scratch("p4.state", "p 2 0\nc 0 1\nc 1 1\n");
    let o = stdout(&oncol(&["solve", p(&g), "-k", "3", "--from", p(&s)]));
    assert!(o.contains("winner painter"), "{o}");
}

#[test]
fn qbf_eval() {
    let t = scratch("true1.qbf", TRUE_X2);
    let f = scratch("false1.qbf", FALSE_X1);
    assert_eq!(stdout(&oncol(&["qbf-eval", p(&t)])).trim(), "true");
    assert_eq!(stdout(&oncol(&["qbf-eval", p(&f)])).trim(), "false");
}

#[test]
fn reduce_writes_parseable_files() {
    let f = scratch("reduce.qbf", TRUE_X2);
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli/reduced");
    let o = oncol(&["reduce", p(&f), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let host = Graph::parse(&std::fs::read_to_string(out.join("host.graph")).unwrap()).unwrap();
    let state = ColoredState::parse(&std::fs::read_to_string(out.join("precolored.state")).unwrap()).unwrap();
    let roles = std::fs::read_to_string(out.join("roles.txt")).unwrap();
    assert_eq!(host.vertex_count(), 37);
    assert_eq!(state.vertex_count(), 28);
    assert_eq!(roles.lines().filter(|l| l.starts_with("role ")).count(), 37);
    let inst = build(&Formula::parse(TRUE_X2).unwrap()).unwrap();
    assert_eq!(&host, inst.host());
}

#[test]
fn verify_drawer_exit_codes() {
    let f = scratch("vd-false.qbf", FALSE_X1);
    let t = scratch("vd-true.qbf", TRUE_X2);
    let o = oncol(&["verify-drawer", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict dominated"));

    let tr = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli/vd-refutation.txt");
    let o = oncol(&["verify-drawer", p(&f), "--skip-swap", "--transcript", tr.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let transcript = Transcript::parse(&std::fs::read_to_string(&tr).unwrap()).unwrap();
    let inst = build(&Formula::parse(FALSE_X1).unwrap()).unwrap();
    assert_eq!(transcript.final_status(&inst.initial).unwrap(), Status::PainterWon);

    assert_eq!(oncol(&["verify-drawer", p(&t)]).status.code(), Some(2));
}

#[test]
fn verify_painter_rungs() {
    let t = scratch("vp-true.qbf", TRUE_X2);
    let o = oncol(&["verify-painter", p(&t)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rung full-exhaustion"));

    let o = oncol(&["verify-painter", p(&t), "--budget", "2000", "--ladder-depth", "3", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict budget-exhausted") && text.contains("rung fallback-ladder passed"), "{text}");

    let o = oncol(&["verify-painter", p(&t), "--never-phase-three"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict refuted"));
}

#[test]
fn cross_check_small() {
    let o = oncol(&["cross-check", "--max-n", "4", "--max-k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("graphs 18\n"));
    assert!(stdout(&o).contains("failures 0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(oncol(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(oncol(&["chromatic"]).status.code(), Some(2));
    assert_eq!(oncol(&["chromatic", "/nonexistent/graph"]).status.code(), Some(2));
    let bad = scratch("bad.graph", "p 2 1\ne 0 7\n");
    assert_eq!(oncol(&["chromatic", p(&bad)]).status.code(), Some(2));
}

#[test]
fn play_from_stdin() {
    let g = scratch("p4-play.graph", &Graph::path(4).to_text());
    let tr = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli/play.txt");
    let mut child = Command::new(env!("CARGO_BIN_EXE_oncol"))
        .args(["play", p(&g), "--as", "painter", "--vs", "solver", "-k", "3", "--transcript", tr.to_str().unwrap()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"hint\n1\n2\n1\n3\n2\n3\n1\n2\n3\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("hint Color("), "{text}");
    assert!(text.contains("status painter-won") || text.contains("status drawer-won"), "{text}");
    let transcript = Transcript::parse(&std::fs::read_to_string(&tr).unwrap()).unwrap();
    assert!(transcript.moves() >= 7);
}

#[test]
fn serve_honors_port_variable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_oncol"))
        .args(["serve", "--port", "1"])
        .env("ONCOL_PORT", port.to_string())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let body = format!(r#"{{"graph":"{}","k":3,"human":"painter","opponent":"solver"}}"#, "p 4 3\\ne 0 1\\ne 1 2\\ne 2 3\\n");
    let request = format!(
        "POST /sessions HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let deadline = Instant::now() + Duration::from_secs(10);
    let response = loop {
        if let Ok(mut s) = TcpStream::connect(("127.0.0.1", port)) {
            s.write_all(request.as_bytes()).unwrap();
            let mut out = String::new();
            s.read_to_string(&mut out).unwrap();
            break out;
        }
        assert!(Instant::now() < deadline, "server did not come up");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 201"), "{response}");
    assert!(response.contains(r#""to_move":"painter""#));
}
