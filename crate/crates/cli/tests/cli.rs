use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use squid_core::field::{write_brick, write_dataset, Brick, Dtype, EnsembleField};

fn squid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squid"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, seed: &str) {
    let o = squid(&[
        "gen-synthetic",
        "--nx",
        "10",
        "--ny",
        "10",
        "--nt",
        "5",
        "--members",
        "20",
        "--noise",
        "0.1",
        "--seed",
        seed,
        "--out",
        s(dir),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generation_is_byte_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    gen(&a, "7");
    gen(&b, "7");
    gen(&c, "8");
    let read = |d: &Path| fs::read(d.join("data.bin")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(read(&a).len(), 10 * 10 * 5 * 20 * 3 * 4);
}

#[test]
fn obj_scene_has_one_group_per_location() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d");
    gen(&d, "7");
    let out = tmp.path().join("s.obj");
    let o = squid(&[
        "glyphs",
        "--dataset",
        s(&d),
        "--type",
        "squid",
        "--t",
        "0",
        "--format",
        "obj",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("g ")).count(), 100);
    let nv = text.lines().filter(|l| l.starts_with("v ")).count();
    for l in text.lines().filter(|l| l.starts_with("f ")) {
        for c in l.split_whitespace().skip(1) {
            let v: usize = c.split("//").next().unwrap().parse().unwrap();
            assert!((1..=nv).contains(&v));
        }
    }
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d");
    gen(&d, "3");
    let mut outs = Vec::new();
    for jobs in ["1", "4"] {
        let p = tmp.path().join(format!("sum{jobs}.json"));
        let q = tmp.path().join(format!("g{jobs}.json"));
        assert_eq!(
            code(&squid(&[
                "--jobs",
                jobs,
                "summarize",
                "--dataset",
                s(&d),
                "--t",
                "2",
                "--out",
                s(&p)
            ])),
            0
        );
        assert_eq!(
            code(&squid(&[
                "glyphs",
                "--jobs",
                jobs,
                "--dataset",
                s(&d),
                "--format",
                "json",
                "--out",
                s(&q)
            ])),
            0
        );
        outs.push((fs::read(p).unwrap(), fs::read(q).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "gen-synthetic",
        "ingest-brick",
        "depth",
        "summarize",
        "glyphs",
        "magvar",
        "point",
        "serve",
    ] {
        let o = squid(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}

#[test]
fn table_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d");
    gen(&d, "1");
    let p = |n: &str| tmp.path().join(n);
    assert_eq!(
        code(&squid(&[
            "depth",
            "--dataset",
            s(&d),
            "--t",
            "1",
            "--region",
            "0:1,0:2,0:0",
            "--format",
            "heatmap",
            "--out",
            s(&p("h.csv"))
        ])),
        0
    );
    let h = fs::read_to_string(p("h.csv")).unwrap();
    assert_eq!(h.lines().count(), 1 + 6);
    assert_eq!(h.lines().next().unwrap().split(',').count(), 21);

    assert_eq!(
        code(&squid(&[
            "depth",
            "--dataset",
            s(&d),
            "--ijk",
            "2,3,0",
            "--out",
            s(&p("l.csv"))
        ])),
        0
    );
    assert_eq!(
        fs::read_to_string(p("l.csv")).unwrap().lines().count(),
        1 + 20
    );

    assert_eq!(
        code(&squid(&[
            "magvar",
            "--dataset",
            s(&d),
            "--t",
            "4",
            "--out",
            s(&p("m.csv")),
            "--slice-out",
            s(&p("ms.csv"))
        ])),
        0
    );
    assert_eq!(
        fs::read_to_string(p("m.csv")).unwrap().lines().count(),
        1 + 5
    );
    assert_eq!(
        fs::read_to_string(p("ms.csv")).unwrap().lines().count(),
        1 + 100
    );

    assert_eq!(
        code(&squid(&[
            "point",
            "--dataset",
            s(&d),
            "--ijk",
            "4,4,0",
            "--outliers",
            "2",
            "--out",
            s(&p("pt.json"))
        ])),
        0
    );
    let v: serde_json::Value = serde_json::from_slice(&fs::read(p("pt.json")).unwrap()).unwrap();
    assert_eq!(v["details"].as_array().unwrap().len(), 20);
    assert_eq!(v["retained"].as_array().unwrap().len(), 18);

    assert_eq!(
        code(&squid(&[
            "summarize",
            "--dataset",
            s(&d),
            "--format",
            "csv",
            "--out",
            s(&p("nested/sum.csv"))
        ])),
        0
    );
    assert_eq!(
        fs::read_to_string(p("nested/sum.csv"))
            .unwrap()
            .lines()
            .count(),
        101
    );
}

#[test]
fn brick_ingest_by_stride_and_dims() {
    let tmp = tempfile::tempdir().unwrap();
    let data: Vec<[f64; 3]> = (0..12 * 9 * 2 * 2)
        .map(|n| [n as f64, 1.0, -(n as f64) * 0.5])
        .collect();
    let brick = Brick::new("b", [12, 9, 2], 2, [1.0; 3], [0.0; 3], data).unwrap();
    let manifest = write_brick(&brick, tmp.path().join("brick")).unwrap();
    let out = tmp.path().join("e");
    let o = squid(&[
        "ingest-brick",
        "--manifest",
        s(&manifest),
        "--stride",
        "3,3,1",
        "--patch",
        "3,3,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["dims"], serde_json::json!([4, 3, 2]));
    assert_eq!(m["n_members"], 9);

    let o = squid(&[
        "ingest-brick",
        "--manifest",
        s(&manifest),
        "--dims",
        "6,3,1",
        "--patch",
        "1,1,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let o = squid(&[
        "ingest-brick",
        "--manifest",
        s(&manifest),
        "--patch",
        "1,1,1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 1);
}

fn expect(args: &[&str], want: i32, needle: &str) {
    let o = squid(args);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(code(&o), want, "{args:?}: {err}");
    assert!(err.contains(needle), "{args:?}: {err}");
}

#[test]
fn exit_code_table() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("d");
    gen(&d, "2");
    let ds = s(&d);
    let out = tmp.path().join("o.csv");
    let o = s(&out);

    // usage and argument errors
    expect(&["depth"], 1, "--dataset");
    expect(&["frobnicate"], 1, "");
    expect(&["gen-synthetic", "--out", o], 1, "--seed");
    expect(
        &["depth", "--dataset", ds, "--region", "0:3,0", "--out", o],
        1,
        "region",
    );
    expect(
        &[
            "depth",
            "--dataset",
            ds,
            "--region",
            "0:10,0:0,0:0",
            "--out",
            o,
        ],
        1,
        "out of range",
    );
    expect(
        &["depth", "--dataset", ds, "--t", "5", "--out", o],
        1,
        "out of range",
    );
    expect(
        &["glyphs", "--dataset", ds, "--exponent", "0.5", "--out", o],
        1,
        "exponent",
    );
    expect(
        &["glyphs", "--dataset", ds, "--type", "arrow", "--out", o],
        1,
        "arrow",
    );
    expect(
        &[
            "point",
            "--dataset",
            ds,
            "--ijk",
            "0,0,0",
            "--outliers",
            "16",
            "--out",
            o,
        ],
        1,
        "",
    );
    expect(
        &["--jobs", "0", "magvar", "--dataset", ds, "--out", o],
        1,
        "jobs",
    );

    // malformed data
    let bad = tmp.path().join("bad");
    fs::create_dir(&bad).unwrap();
    fs::copy(d.join("manifest.json"), bad.join("manifest.json")).unwrap();
    let bytes = fs::read(d.join("data.bin")).unwrap();
    fs::write(bad.join("data.bin"), &bytes[..bytes.len() - 4]).unwrap();
    expect(&["depth", "--dataset", s(&bad), "--out", o], 2, "data.bin");
    fs::write(bad.join("manifest.json"), "{\"dims\": [1]}").unwrap();
    expect(
        &["summarize", "--dataset", s(&bad), "--out", o],
        2,
        "manifest.json",
    );

    // I/O
    let missing = tmp.path().join("missing");
    expect(
        &["depth", "--dataset", s(&missing), "--out", o],
        3,
        s(&missing),
    );
    expect(&["magvar", "--dataset", ds, "--out", s(&d)], 3, "");

    // degenerate
    let zero = EnsembleField::new(
        "zero",
        [2, 2, 1],
        1,
        6,
        [1.0; 3],
        [0.0; 3],
        Dtype::F32,
        vec![[0.0; 3]; 24],
    )
    .unwrap();
    let z = tmp.path().join("zero");
    write_dataset(&zero, &z).unwrap();
    expect(&["glyphs", "--dataset", s(&z), "--out", o], 4, "degenerate");
}
