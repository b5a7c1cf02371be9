#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

/// Three-language corpus spec: 12 monolingual, 3 alternating every 50 words,
/// 3 unstructured-multilingual documents, all 6400 words.
pub const SPEC: &str = r#"{
  "languages": [
    { "name": "alpha", "alphabet": "abcdefgh", "word_len_min": 3, "word_len_max": 8 },
    { "name": "beta", "alphabet": "αβγδεζηθ", "word_len_min": 3, "word_len_max": 8 },
    { "name": "gamma", "alphabet": "бвгдежзи", "word_len_min": 3, "word_len_max": 8 }
  ],
  "documents": [
    { "pattern": "monolingual", "length_words": 6400, "languages": ["alpha"], "count": 4 },
    { "pattern": "monolingual", "length_words": 6400, "languages": ["beta"], "count": 4 },
    { "pattern": "monolingual", "length_words": 6400, "languages": ["gamma"], "count": 4 },
    { "pattern": "alternating-words", "period_words": 50, "length_words": 6400,
      "languages": ["alpha", "beta"], "count": 3 },
    { "pattern": "multilingual-other", "length_words": 6400,
      "languages": ["alpha", "beta", "gamma"], "count": 3 }
  ],
  "noise_rate": 0.0
}"#;

pub fn altscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altscan"))
        .args(args)
        .output()
        .expect("spawn altscan")
}

pub fn ok(args: &[&str]) -> Output {
    let out = altscan(args);
    assert!(
        out.status.success(),
        "altscan {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn code(args: &[&str]) -> i32 {
    altscan(args).status.code().expect("exit code")
}

pub fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf-8 path").to_string()
}

/// synth + prepare + train into `dir`, returning (manifest, model, segments).
pub fn corpus_and_model(dir: &Path) -> (String, String, String) {
    corpus_and_model_from(dir, SPEC, 11)
}

pub fn corpus_and_model_from(dir: &Path, spec_json: &str, seed: u64) -> (String, String, String) {
    let spec = path_str(dir, "spec.json");
    fs::write(&spec, spec_json).unwrap();
    let corpus = path_str(dir, "corpus");
    let seed_arg = seed.to_string();
    ok(&["synth", "--spec", &spec, "--out-dir", &corpus, "--seed", &seed_arg]);
    let manifest = format!("{corpus}/manifest.jsonl");
    let segments = path_str(dir, "segments.jsonl");
    ok(&["prepare", "--manifest", &manifest, "--segments", &segments]);
    let models = path_str(dir, "models");
    ok(&[
        "train", "--segments", &segments, "--out-dir", &models, "--model", "nb", "--seed",
        &seed_arg,
    ]);
    (manifest, format!("{models}/model.nb.bin"), segments)
}

pub fn analyze_into(manifest: &str, model: &str, out_dir: &str, extra: &[&str]) {
    let mut args = vec![
        "analyze",
        "--manifest",
        manifest,
        "--model-file",
        model,
        "--out-dir",
        out_dir,
        "--k-min",
        "1",
        "--k-max",
        "8",
        "--seed",
        "7",
    ];
    args.extend_from_slice(extra);
    ok(&args);
}
