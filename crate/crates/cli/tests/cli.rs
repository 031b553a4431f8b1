use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subregion_cli::pgm::write_pgm;
use subregion_cli::records::parse_results;
use subregion_cli::synthetic::{patch_corpus, PatchCorpusSpec};
use subregion_cli::IndexFile;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subregion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Ten 64x64 images, so 2x2 tiles each.
fn image_dir(tmp: &TempDir) -> PathBuf {
    let dir = tmp.path().join("images");
    std::fs::create_dir(&dir).unwrap();
    let spec = PatchCorpusSpec {
        seed: 11,
        images: 10,
        rows: 2,
        cols: 2,
        tile_size: 32,
        palettes: 4,
        max_patches: 3,
    };
    for (name, img) in patch_corpus(&spec).unwrap() {
        write_pgm(&dir.join(name), &img).unwrap();
    }
    dir
}

fn build(tmp: &TempDir, images: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = tmp.path().join(name);
    let mut args = vec!["build-index", s(images), "--out", s(&out)];
    args.extend_from_slice(extra);
    let res = run(&args);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    out
}

#[test]
fn build_writes_expected_header() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let index = IndexFile::load(&build(&tmp, &images, "a.idx", &[])).unwrap();
    assert_eq!(index.header.image_count, 10);
    assert_eq!(index.header.tile_count, 40);
    assert_eq!(index.header.reduced_dim, 6);
    assert_eq!(index.index.len(), 40);
}

#[test]
fn rebuild_is_byte_identical_and_round_trips() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let a = std::fs::read(build(&tmp, &images, "a.idx", &[])).unwrap();
    let b = std::fs::read(build(&tmp, &images, "b.idx", &[])).unwrap();
    assert_eq!(a, b);
    let loaded = IndexFile::from_bytes(&a).unwrap();
    assert_eq!(loaded.to_bytes(), a);
}

#[test]
fn self_query_ranks_source_first_for_every_algorithm() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let index = build(&tmp, &images, "a.idx", &[]);
    let query = images.join("img_004.pgm");
    for algo in ["linear", "tars", "spars"] {
        let res = run(&[
            "query", "--index", s(&index), "--query", s(&query), "--algo", algo, "--k", "1", "--no-timing",
        ]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        let records = parse_results(&String::from_utf8(res.stdout).unwrap()).unwrap();
        assert_eq!(records.len(), 1, "{algo}");
        let top = &records[0];
        assert_eq!((top.rank, top.image_id, top.drow, top.dcol), (1, 4, 0, 0), "{algo}");
    }
}

#[test]
fn untimed_output_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let index = build(&tmp, &images, "a.idx", &[]);
    let args = ["query", "--index", s(&index), "--query", s(&images), "--k", "3", "--no-timing"];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, run(&args).stdout);
    assert!(!String::from_utf8_lossy(&first.stdout).contains("timing"));
}

#[test]
fn loaded_index_answers_like_the_original() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let a = build(&tmp, &images, "a.idx", &[]);
    let copy = tmp.path().join("copy.idx");
    IndexFile::load(&a).unwrap().save(&copy).unwrap();
    let query = images.join("img_007.pgm");
    let answer = |idx: &Path| {
        let res = run(&["query", "--index", s(idx), "--query", s(&query), "--no-timing", "--algo", "tars"]);
        parse_results(&String::from_utf8(res.stdout).unwrap()).unwrap()
    };
    let (x, y) = (answer(&a), answer(&copy));
    assert!(!x.is_empty());
    assert_eq!(
        x.iter().map(|r| (r.image_id, r.drow, r.dcol, r.score.to_bits())).collect::<Vec<_>>(),
        y.iter().map(|r| (r.image_id, r.drow, r.dcol, r.score.to_bits())).collect::<Vec<_>>()
    );
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let index = build(&tmp, &images, "a.idx", &[]);
    let query = images.join("img_000.pgm");

    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["query", "--index", s(&index), "--query", s(&query), "--algo", "bogus"])), 1);
    // The index was built with l2.
    assert_eq!(code(&run(&["query", "--index", s(&index), "--query", s(&query), "--metric", "l1"])), 1);

    let missing = tmp.path().join("missing.idx");
    assert_eq!(code(&run(&["query", "--index", s(&missing), "--query", s(&query)])), 2);
    let junk = tmp.path().join("junk.idx");
    std::fs::write(&junk, b"not an index").unwrap();
    assert_eq!(code(&run(&["query", "--index", s(&junk), "--query", s(&query)])), 2);
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    assert_eq!(code(&run(&["build-index", s(&empty), "--out", s(&junk)])), 2);
}

#[test]
fn oracle_check_passes_small_run() {
    let res = run(&["oracle-check", "--sizes", "2x2,3x3", "--trials", "50"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stdout));
}

#[test]
fn synthetic_corpus_evaluates_end_to_end() {
    let tmp = TempDir::new().unwrap();
    let corpus = tmp.path().join("corpus");
    assert_eq!(code(&run(&["gen-synthetic", "--out", s(&corpus), "--seed", "5"])), 0);
    let index = build(&tmp, &corpus.join("images"), "desk.idx", &[]);
    let results = tmp.path().join("results.jsonl");
    let res = run(&[
        "query", "--index", s(&index), "--query", s(&corpus.join("queries")), "--algo", "spars", "--k", "5",
        "--out", s(&results),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let eval = run(&["eval-precision", s(&results), s(&corpus.join("ground_truth.json")), "--k", "5"]);
    assert_eq!(code(&eval), 0, "{}", String::from_utf8_lossy(&eval.stderr));
    let text = String::from_utf8(eval.stdout).unwrap();
    let mean: f64 = text
        .lines()
        .last()
        .and_then(|l| l.strip_prefix("precision@5 "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(mean >= 0.8, "{text}");
}

#[test]
fn bench_emits_one_row_per_query_and_algorithm() {
    let tmp = TempDir::new().unwrap();
    let images = image_dir(&tmp);
    let index = build(&tmp, &images, "a.idx", &[]);
    let res = run(&["bench", "--index", s(&index), "--query", s(&images), "--algo", "linear,spars"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(String::from_utf8(res.stdout).unwrap().lines().count(), 1 + 2 * 10);
}
