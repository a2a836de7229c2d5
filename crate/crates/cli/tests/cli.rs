use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;

use submatrix_cli::report::{parse_records, parse_reports, SUMMARY_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_submatrix"));
    c.env_remove("SM_SUITESPARSE_URL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_mtx(path: &Path, n: usize, entries: &[(usize, usize, f64)]) {
    let mut s = format!("%%MatrixMarket matrix coordinate real general\n{n} {n} {}\n", entries.len());
    for &(i, j, v) in entries {
        s.push_str(&format!("{} {} {v:e}\n", i + 1, j + 1));
    }
    fs::write(path, s).unwrap();
}

/// Two dense SPD blocks of sizes 3 and 4.
fn block_entries() -> (usize, Vec<(usize, usize, f64)>) {
    let mut e = Vec::new();
    let mut off = 0;
    for m in [3usize, 4] {
        for j in 0..m {
            for i in 0..m {
                let v = if i == j { m as f64 + 1.0 } else { 0.1 * (1 + i + j) as f64 / m as f64 };
                e.push((off + i, off + j, v));
            }
        }
        off += m;
    }
    (off, e)
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mtx");
    let b = dir.path().join("b.mtx");
    for p in [&a, &b] {
        let o = run(&["gen", "--n", "64", "--density", "0.1", "--seed", "7", "--out", path_str(p)]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("kappa_est="));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn gen_rejects_infeasible_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.mtx");
    let o = run(&["gen", "--n", "16", "--density", "0", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unknown_flag_exits_2() {
    let o = run(&["invroot", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invroot_block_diagonal_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("blocks.mtx");
    let (n, e) = block_entries();
    write_mtx(&input, n, &e);
    for p in ["1", "2", "3"] {
        let o = run(&["invroot", "--in", path_str(&input), "--p", p, "--residual"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let reports = parse_reports(&stdout(&o)).unwrap();
        assert_eq!(reports.len(), 1);
        let r = reports[0].residual_norm.unwrap();
        assert!(r < 1e-10, "p={p}: residual {r}");
    }
}

#[test]
fn invroot_output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.mtx");
    let o = run(&["gen", "--n", "120", "--density", "0.08", "--kind", "unbalanced", "--out", path_str(&input)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let mut outputs = Vec::new();
    for (w, strat) in [("1", "static"), ("8", "static"), ("3", "dynamic"), ("5", "shuffled")] {
        let out = dir.path().join(format!("x-{w}-{strat}.mtx"));
        let o = run(&[
            "invroot", "--in", path_str(&input), "--p", "2", "--workers", w, "--strategy", strat,
            "--out", path_str(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn invroot_names_zero_diagonal_columns() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("z.mtx");
    write_mtx(&input, 3, &[(0, 0, 2.0), (1, 2, 1.0), (2, 1, 1.0)]);
    let o = run(&["invroot", "--in", path_str(&input)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains('1') && err.contains('2'), "{err}");
}

#[test]
fn invroot_lu_requires_p1() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("i.mtx");
    write_mtx(&input, 2, &[(0, 0, 1.0), (1, 1, 1.0)]);
    let o = run(&["invroot", "--in", path_str(&input), "--p", "2", "--kernel", "lu"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precond_identity_takes_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("eye.mtx");
    let e: Vec<_> = (0..10).map(|i| (i, i, 1.0)).collect();
    write_mtx(&input, 10, &e);
    for pc in ["none", "sm", "ilu0"] {
        let o = run(&["precond", "--in", path_str(&input), "--preconditioner", pc]);
        assert!(o.status.success(), "{}", stderr(&o));
        let line = stdout(&o);
        assert!(line.contains("iterations=1 "), "{pc}: {line}");
        assert!(line.contains("status=converged"), "{line}");
    }
}

#[test]
fn precond_reports_dnc() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.mtx");
    let o = run(&["gen", "--n", "100", "--density", "0.1", "--kappa", "50", "--out", path_str(&input)]);
    assert!(o.status.success());
    let o = run(&["precond", "--in", path_str(&input), "--maxiter", "2", "--tol", "1e-12"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("iterations=DNC"));
}

fn tar_gz(name: &str, body: &[u8]) -> Vec<u8> {
    let enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    let mut builder = tar::Builder::new(enc);
    let mut header = tar::Header::new_gnu();
    header.set_size(body.len() as u64);
    header.set_mode(0o644);
    header.set_cksum();
    builder.append_data(&mut header, format!("{name}/{name}.mtx"), body).unwrap();
    builder.into_inner().unwrap().finish().unwrap()
}

/// Serves `responses` in order, one per connection, and returns the base URL.
fn serve(responses: Vec<(u16, Vec<u8>)>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 0 && line != "\r\n" {
                line.clear();
            }
            let head = format!(
                "HTTP/1.1 {status} X\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
                body.len()
            );
            stream.write_all(head.as_bytes()).unwrap();
            stream.write_all(&body).unwrap();
        }
    });
    format!("http://{addr}")
}

#[test]
fn fetch_404_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let base = serve(vec![(404, b"missing".to_vec())]);
    let o = run(&[
        "fetch", "--group", "G", "--name", "nope", "--cache-dir", path_str(dir.path()), "--base-url", &base,
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn fetch_extracts_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = b"%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 4\n2 1 1\n2 2 3\n";
    let base = serve(vec![(200, tar_gz("tiny", mtx))]);
    let args = |base: &str| {
        vec![
            "fetch".to_string(), "--group".into(), "G".into(), "--name".into(), "tiny".into(),
            "--cache-dir".into(), dir.path().display().to_string(), "--base-url".into(), base.to_string(),
        ]
    };
    let o = bin().args(args(&base)).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let cached = dir.path().join("tiny.mtx");
    assert_eq!(stdout(&o).trim(), cached.display().to_string());
    let mut got = Vec::new();
    fs::File::open(&cached).unwrap().read_to_end(&mut got).unwrap();
    assert_eq!(got, mtx);

    // Port 9 refuses connections, so success proves the cache was used.
    let o = bin().args(args("http://127.0.0.1:9")).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn fetch_rejects_corrupt_payload() {
    let dir = tempfile::tempdir().unwrap();
    let base = serve(vec![(200, tar_gz("bad", b"not a matrix"))]);
    let o = run(&[
        "fetch", "--group", "G", "--name", "bad", "--cache-dir", path_str(dir.path()), "--base-url", &base,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("bad.mtx").exists());
}

#[test]
fn bench_repeats_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.txt");
    let o = run(&[
        "bench", "--mode", "cores", "--n", "128", "--density", "0.05", "--workers-list", "1,2",
        "--repeats", "3", "--residual", "--report", path_str(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    let reports = parse_reports(&text).unwrap();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert_eq!(r.repeats, 3);
        assert!(r.wall_time_ms_min <= r.wall_time_ms && r.wall_time_ms <= r.wall_time_ms_max);
        assert!(r.speedup.is_some());
        assert!(r.residual_norm.unwrap() < 1.0);
    }
    assert_eq!(reports[0].per_worker_busy_ms.len(), 1);
    assert_eq!(reports[1].per_worker_busy_ms.len(), 2);
    let records = parse_records(&text).unwrap();
    let summary = records.iter().find(|r| r.header == SUMMARY_HEADER).unwrap();
    assert_eq!(summary.get("mode"), Some("cores"));
    assert!(summary.get("monotone_nonincreasing").is_some());
}

#[test]
fn bench_sizes_reports_slope() {
    let o = run(&["bench", "--mode", "sizes-fixed-d", "--sizes-list", "64,128", "--density", "0.1", "--repeats", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let records = parse_records(&stdout(&o)).unwrap();
    let summary = records.last().unwrap();
    assert!(summary.get("loglog_slope").unwrap().parse::<f64>().is_ok());
}
