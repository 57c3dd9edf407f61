use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oamds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oamds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_random(path: &Path, len: usize, seed: u64) -> Vec<u8> {
    let mut data = vec![0u8; len];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut data);
    fs::write(path, &data).unwrap();
    data
}

#[test]
fn params_prints_dimensions() {
    let o = oamds(&[
        "params",
        "--construction",
        "2",
        "--r",
        "3",
        "--m",
        "1",
        "--rprime",
        "2",
        "--field",
        "gf7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("n=5\n"));
    assert!(text.contains("k=2\n"));
    assert!(text.contains("l=9\n"));
    assert!(text.contains("lambda=0,1,2,3,4,5\n"));
}

#[test]
fn verify_mds_exit_codes() {
    let o = oamds(&[
        "verify-mds",
        "--construction",
        "1",
        "--s",
        "3",
        "--r",
        "3",
        "--m",
        "2",
        "--field",
        "gf7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().skip(1).all(|l| l.ends_with("invertible=true")));

    let o = oamds(&[
        "verify-mds",
        "--s",
        "3",
        "--r",
        "3",
        "--m",
        "2",
        "--field",
        "gf7",
        "--budget",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(oamds(&["nonsense"]).status.code(), Some(1));
    assert_eq!(oamds(&["params", "--r", "3"]).status.code(), Some(1));
    // r > s*m
    assert_eq!(
        oamds(&["params", "--s", "1", "--r", "3", "--m", "2", "--field", "gf7"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(oamds(&["--help"]).status.code(), Some(0));
}

#[test]
fn encode_repair_decode() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let chunks = dir.path().join("chunks");
    let data = write_random(&input, 10_000, 5);
    let chunks_s = chunks.to_str().unwrap();
    let o = oamds(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--out-dir",
        chunks_s,
        "--s",
        "3",
        "--r",
        "3",
        "--m",
        "2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let node1 = chunks.join("node_1.oamc");
    let original = fs::read(&node1).unwrap();
    fs::remove_file(&node1).unwrap();
    let o = oamds(&[
        "repair",
        "--in-dir",
        chunks_s,
        "--node",
        "1",
        "--batch-stripes",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&node1).unwrap(), original);
    let first: serde_json::Value =
        serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(first["symbols_accessed"], 15);
    assert_eq!(first["bound"], 15);
    assert_eq!(first["optimal"], true);
    assert_eq!(first["mode"], "full");
    assert_eq!(first["helpers"], serde_json::json!([2, 3, 4, 5, 6]));

    let out = dir.path().join("out.bin");
    for i in [2, 4, 6] {
        fs::remove_file(chunks.join(format!("node_{i}.oamc"))).unwrap();
    }
    let o = oamds(&[
        "decode",
        "--in-dir",
        chunks_s,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&out).unwrap(), data);

    fs::remove_file(chunks.join("node_3.oamc")).unwrap();
    let o = oamds(&[
        "decode",
        "--in-dir",
        chunks_s,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn group_repair_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let chunks = dir.path().join("c");
    write_random(&input, 3000, 6);
    let chunks_s = chunks.to_str().unwrap();
    let o = oamds(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--out-dir",
        chunks_s,
        "--s",
        "2",
        "--r",
        "3",
        "--m",
        "3",
        "--field",
        "gf2_16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let target = chunks.join("node_2.oamc");
    let original = fs::read(&target).unwrap();
    fs::remove_file(&target).unwrap();
    fs::remove_file(chunks.join("node_6.oamc")).unwrap();
    let o = oamds(&[
        "repair",
        "--in-dir",
        chunks_s,
        "--node",
        "2",
        "--group",
        "--helpers",
        "3,4,5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(fs::read(&target).unwrap(), original);
    let line: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(line["mode"], "group");
    assert_eq!(line["helpers"], serde_json::json!([1, 3, 4, 5]));
    assert_eq!(line["optimal"], true);

    // group mate in --helpers is accepted and folded in
    let o = oamds(&[
        "repair",
        "--in-dir",
        chunks_s,
        "--node",
        "2",
        "--group",
        "--helpers",
        "1,3,4,5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // a helper inside the group replacing an outside one leaves too few
    let o = oamds(&[
        "repair",
        "--in-dir",
        chunks_s,
        "--node",
        "2",
        "--group",
        "--helpers",
        "1,3,4",
    ]);
    assert_eq!(o.status.code(), Some(1));

    // corrupt header of a needed helper
    let mut bytes = fs::read(chunks.join("node_3.oamc")).unwrap();
    bytes[10] ^= 0xff;
    fs::write(chunks.join("node_3.oamc"), &bytes).unwrap();
    let o = oamds(&[
        "repair",
        "--in-dir",
        chunks_s,
        "--node",
        "2",
        "--group",
        "--helpers",
        "3,4,5",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn bench_is_deterministic() {
    let args = [
        "bench",
        "--s",
        "2",
        "--r",
        "2",
        "--m",
        "2",
        "--field",
        "gf7",
        "--stripes",
        "20",
        "--seed",
        "9",
    ];
    let a = oamds(&args);
    let b = oamds(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("repair_verified=true"));
}
