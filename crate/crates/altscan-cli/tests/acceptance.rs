//! End-to-end acceptance checks. Each test covers one numbered criterion and
//! prints a `criterion N PASS` line; run with `-- --nocapture` to see them.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use altscan::clustering::{inertia, kmeans_fit, KMeansParams};
use altscan::corpus::{
    generate_synthetic_corpus, reconstruct, segment_by_script, Document, LabeledSegment,
    SynthConfig,
};
use altscan::langid::{
    evaluate, stratified_split, train_char_ngram, train_hashed_linear, train_naive_bayes,
    HashedLinearParams, LabelSet, Predictor,
};
use altscan::spectral::{dft_naive, fft, magnitude_half_spectrum, spectrum_rows, SpectrumFeature};
use altscan::windowing::{window_document, window_document_by_script};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::tempdir;

use common::{corpus_and_model, corpus_and_model_from, ok, path_str};

/// Per-bin agreement between the fast transform and the quadratic oracle,
/// relative to the spectrum's largest magnitude (floored at 1 so all-small
/// spectra are judged absolutely).
const SPECTRAL_TOLERANCE: f64 = 1e-9;
/// Fixture inertia must match the brute-force optimum to this relative error.
const KMEANS_TOLERANCE: f64 = 1e-9;
/// Held-out macro F1 floor for every model family on the noisy corpus.
const MACRO_F1_FLOOR: f64 = 0.95;
/// Cluster purity floor against ground-truth pattern tags.
const PURITY_FLOOR: f64 = 0.9;
const FFT_BUDGET: Duration = Duration::from_secs(30);
const PIPELINE_BUDGET: Duration = Duration::from_secs(300);

fn check_against_oracle(signal: &[f64]) {
    let fast = fft(signal).unwrap();
    let mut padded = signal.to_vec();
    padded.resize(signal.len().next_power_of_two(), 0.0);
    let oracle = dft_naive(&padded).unwrap();
    assert_eq!(fast.len(), oracle.len());
    let scale = oracle.iter().map(|c| c.norm()).fold(1.0f64, f64::max);

    for (k, (a, b)) in fast.iter().zip(&oracle).enumerate() {
        assert!(
            (a - b).norm() <= SPECTRAL_TOLERANCE * scale,
            "bin {k} of length {}: fft {a}, oracle {b}",
            signal.len()
        );
    }

    let n = fast.len();
    let time_energy: f64 = padded.iter().map(|x| x * x).sum();
    let freq_energy: f64 = fast.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
    assert!(
        (time_energy - freq_energy).abs() <= SPECTRAL_TOLERANCE * time_energy.max(1.0),
        "energy mismatch at length {}: {time_energy} vs {freq_energy}",
        signal.len()
    );

    for k in 1..n {
        let diff = (fast[n - k] - fast[k].conj()).norm();
        assert!(
            diff <= SPECTRAL_TOLERANCE * scale,
            "conjugate symmetry broken at bin {k} of {n}"
        );
    }
}

#[test]
fn criterion_1_fft_matches_the_quadratic_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut signals = 0usize;
    for len in 1..=128usize {
        for _ in 0..200 {
            let signal: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            check_against_oracle(&signal);
            signals += 1;
        }
    }
    for _ in 0..200 {
        let len = rng.gen_range(129..=1024usize);
        let signal: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        check_against_oracle(&signal);
        signals += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed < FFT_BUDGET, "oracle sweep took {elapsed:?}");
    println!(
        "criterion 1 PASS: fft matched the quadratic transform, energy conservation, and \
         conjugate symmetry on {signals} signals within {SPECTRAL_TOLERANCE:e} in {elapsed:?}"
    );
}

#[test]
fn criterion_2_alternating_signal_concentrates_at_one_bin() {
    let signal: Vec<f64> = (0..128).map(|i| (i % 2) as f64).collect();
    let mags = magnitude_half_spectrum(&fft(&signal).unwrap());
    assert_eq!(mags.len(), 65);
    for (k, &m) in mags.iter().enumerate() {
        if k == 0 || k == 64 {
            assert!(m > 1.0, "expected a spike at bin {k}, got {m}");
        } else {
            assert!(m <= SPECTRAL_TOLERANCE, "bin {k} should be empty, got {m}");
        }
    }
    assert!(
        (mags[0] - mags[64]).abs() <= SPECTRAL_TOLERANCE,
        "DC {} and alternation {} magnitudes should match",
        mags[0],
        mags[64]
    );
    let rows = spectrum_rows(&signal).unwrap();
    assert_eq!(rows[64].0, 0.5, "spike must sit at normalized frequency 0.5");
    println!(
        "criterion 2 PASS: the 0/1 signal's only non-empty bins are DC and 0.5, \
         both at magnitude {}",
        mags[0]
    );
}

/// 59 monolingual, 10 alternating (period 50), 13 unstructured-multilingual
/// documents of 6400 words each.
fn proportions_spec() -> &'static str {
    r#"{
      "languages": [
        { "name": "alpha", "alphabet": "abcdefgh", "word_len_min": 3, "word_len_max": 8 },
        { "name": "beta", "alphabet": "αβγδεζηθ", "word_len_min": 3, "word_len_max": 8 },
        { "name": "gamma", "alphabet": "бвгдежзи", "word_len_min": 3, "word_len_max": 8 }
      ],
      "documents": [
        { "pattern": "monolingual", "length_words": 6400, "languages": ["alpha"], "count": 20 },
        { "pattern": "monolingual", "length_words": 6400, "languages": ["beta"], "count": 20 },
        { "pattern": "monolingual", "length_words": 6400, "languages": ["gamma"], "count": 19 },
        { "pattern": "alternating-words", "period_words": 50, "length_words": 6400,
          "languages": ["alpha", "beta"], "count": 10 },
        { "pattern": "multilingual-other", "length_words": 6400,
          "languages": ["alpha", "beta", "gamma"], "count": 13 }
      ],
      "noise_rate": 0.0
    }"#
}

fn purity(clusters_jsonl: &str, pattern_of: &BTreeMap<String, String>) -> f64 {
    let mut tallies: BTreeMap<u64, BTreeMap<&str, usize>> = BTreeMap::new();
    let mut total = 0usize;
    for line in clusters_jsonl.lines().filter(|l| !l.is_empty()) {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        let doc_id = row["doc_id"].as_str().unwrap();
        let pattern = pattern_of[doc_id].as_str();
        *tallies
            .entry(row["cluster"].as_u64().unwrap())
            .or_default()
            .entry(pattern)
            .or_insert(0) += 1;
        total += 1;
    }
    let majority_sum: usize = tallies
        .values()
        .map(|counts| counts.values().copied().max().unwrap_or(0))
        .sum();
    majority_sum as f64 / total as f64
}

#[test]
fn criterion_3_the_pipeline_recovers_three_groups_in_paper_proportions() {
    let started = Instant::now();
    for seed in 0..5u64 {
        let dir = tempdir().unwrap();
        let (manifest, model, _) =
            corpus_and_model_from(dir.path(), proportions_spec(), seed);
        let run = path_str(dir.path(), "run");
        let seed_arg = seed.to_string();
        ok(&[
            "analyze", "--manifest", &manifest, "--model-file", &model, "--out-dir", &run,
            "--k-min", "1", "--k-max", "8", "--restarts", "10", "--seed", &seed_arg,
        ]);

        let elbow: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(Path::new(&run).join("elbow.json")).unwrap())
                .unwrap();
        assert_eq!(elbow["selected_k"], 3, "seed {seed} selected the wrong k");

        let manifest_dir = Path::new(&manifest).parent().unwrap();
        let mut pattern_of = BTreeMap::new();
        for line in fs::read_to_string(manifest_dir.join("truth.jsonl"))
            .unwrap()
            .lines()
        {
            let row: serde_json::Value = serde_json::from_str(line).unwrap();
            pattern_of.insert(
                row["doc_id"].as_str().unwrap().to_string(),
                row["pattern"].as_str().unwrap().to_string(),
            );
        }
        let score = purity(
            &fs::read_to_string(Path::new(&run).join("clusters.jsonl")).unwrap(),
            &pattern_of,
        );
        assert!(score >= PURITY_FLOOR, "seed {seed} purity {score}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < PIPELINE_BUDGET, "five pipeline runs took {elapsed:?}");
    println!(
        "criterion 3 PASS: 82-document corpora (59/10/13) clustered into k = 3 with \
         purity >= {PURITY_FLOOR} for seeds 0..5 in {elapsed:?}"
    );
}

/// Predicts whatever label the text spells out; turns hand-written
/// confusion-matrix fixtures into a [`Predictor`].
struct Parrot(LabelSet);

impl Predictor for Parrot {
    fn label_set(&self) -> &LabelSet {
        &self.0
    }

    fn predict(&self, text: &str) -> Vec<f64> {
        let mut probs = vec![0.0; self.0.len()];
        probs[self.0.index(text).unwrap_or(0)] = 1.0;
        probs
    }
}

fn noisy_five_language_spec() -> SynthConfig {
    SynthConfig::from_json(
        r#"{
          "languages": [
            { "name": "lang-a", "alphabet": "abcdefgh", "word_len_min": 3, "word_len_max": 8 },
            { "name": "lang-b", "alphabet": "αβγδεζηθ", "word_len_min": 3, "word_len_max": 8 },
            { "name": "lang-c", "alphabet": "бвгдежзи", "word_len_min": 3, "word_len_max": 8 },
            { "name": "lang-d", "alphabet": "աբգդեզէը", "word_len_min": 3, "word_len_max": 8 },
            { "name": "lang-e", "alphabet": "אבגדהוזח", "word_len_min": 3, "word_len_max": 8 }
          ],
          "documents": [
            { "pattern": "monolingual", "length_words": 100, "languages": ["lang-a"], "count": 40 },
            { "pattern": "monolingual", "length_words": 100, "languages": ["lang-b"], "count": 40 },
            { "pattern": "monolingual", "length_words": 100, "languages": ["lang-c"], "count": 40 },
            { "pattern": "monolingual", "length_words": 100, "languages": ["lang-d"], "count": 40 },
            { "pattern": "monolingual", "length_words": 100, "languages": ["lang-e"], "count": 40 }
          ],
          "noise_rate": 0.02
        }"#,
    )
    .unwrap()
}

#[test]
fn criterion_4_all_model_families_handle_a_noisy_corpus() {
    let corpus = generate_synthetic_corpus(&noisy_five_language_spec(), 9).unwrap();
    let segments: Vec<LabeledSegment> = corpus
        .iter()
        .map(|(doc, _)| LabeledSegment {
            label: doc.language_label.clone().expect("monolingual docs are labeled"),
            text: doc.text.clone(),
            doc_id: doc.id.clone(),
        })
        .collect();
    let (train, test) = stratified_split(&segments, 0.2, 9).unwrap();
    for segment in &test {
        assert!(
            segment.text.chars().count() >= 250,
            "held-out segment {} is shorter than 250 chars",
            segment.doc_id
        );
    }

    let hashed_params = HashedLinearParams { seed: 9, ..HashedLinearParams::default() };
    let scores = [
        ("naive-bayes", {
            let model = train_naive_bayes(&train, (1, 3), 0.1).unwrap();
            evaluate(&model, &test).unwrap().macro_f1
        }),
        ("char-ngram", {
            let model = train_char_ngram(&train, 3, 0.1).unwrap();
            evaluate(&model, &test).unwrap().macro_f1
        }),
        ("hashed-linear", {
            let (model, _) = train_hashed_linear(&train, &hashed_params).unwrap();
            evaluate(&model, &test).unwrap().macro_f1
        }),
    ];
    for (family, macro_f1) in scores {
        assert!(
            macro_f1 >= MACRO_F1_FLOOR,
            "{family} macro F1 {macro_f1} under 2% noise"
        );
    }

    let labels = ["left".to_string(), "right".to_string()];
    let fixture: Vec<LabeledSegment> = [
        ("left", "left", 8),
        ("left", "right", 2),
        ("right", "left", 3),
        ("right", "right", 7),
    ]
    .iter()
    .flat_map(|&(truth, predicted, count)| {
        (0..count).map(move |i| LabeledSegment {
            label: truth.to_string(),
            text: predicted.to_string(),
            doc_id: format!("{truth}-{predicted}-{i}"),
        })
    })
    .collect();
    let report = evaluate(&Parrot(LabelSet::new(labels.iter().cloned())), &fixture).unwrap();
    assert_eq!(report.confusion, vec![vec![8, 2], vec![3, 7]]);
    let p_left = 8.0 / 11.0;
    let r_left = 8.0 / 10.0;
    let f1_left = 2.0 * p_left * r_left / (p_left + r_left);
    let p_right = 7.0 / 9.0;
    let r_right = 7.0 / 10.0;
    let f1_right = 2.0 * p_right * r_right / (p_right + r_right);
    assert_eq!(
        report.macro_f1,
        (f1_left + f1_right) / 2.0,
        "macro F1 must equal the hand-computed value exactly"
    );

    println!(
        "criterion 4 PASS: macro F1 {} on 2%-noise held-out segments; \
         the 2x2 fixture matches its hand oracle bit for bit",
        scores
            .iter()
            .map(|(f, s)| format!("{f} {s:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

fn random_unicode_doc(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(0..=240usize);
    (0..len)
        .map(|_| match rng.gen_range(0..10u32) {
            0 | 1 => ' ',
            2 => '\n',
            3 => '\t',
            _ => loop {
                if let Some(c) = char::from_u32(rng.gen_range(0..0x110000u32)) {
                    break c;
                }
            },
        })
        .collect()
}

#[test]
fn criterion_5_reconstruction_is_byte_exact_for_random_unicode() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC5);
    for i in 0..1000 {
        let text = random_unicode_doc(&mut rng);
        let doc = Document {
            id: format!("doc-{i}"),
            text: text.clone(),
            language_label: None,
            year: None,
            source: "synthetic".into(),
        };

        let spans = segment_by_script(&text);
        let parts: Vec<(usize, usize, &str)> = spans
            .iter()
            .map(|s| (s.start, s.end, &text[s.start..s.end]))
            .collect();
        assert_eq!(reconstruct(&parts).unwrap(), text, "script spans, doc {i}");

        let window_size = rng.gen_range(1..=60usize);
        for windows in [
            window_document(&doc, window_size),
            window_document_by_script(&doc, window_size),
        ] {
            let parts: Vec<(usize, usize, &str)> = windows
                .iter()
                .map(|w| (w.start, w.end, &text[w.start..w.end]))
                .collect();
            assert_eq!(reconstruct(&parts).unwrap(), text, "windows, doc {i}");
        }
    }
    println!(
        "criterion 5 PASS: 1000 random Unicode documents reconstructed byte-exactly \
         from script spans and from both window kinds"
    );
}

/// Smallest sum of squared distances over every partition into at most `k`
/// groups, enumerated as restricted growth strings.
fn brute_force_sse(points: &[Vec<f64>], k: usize) -> f64 {
    fn sse(points: &[Vec<f64>], assign: &[usize], k: usize) -> f64 {
        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (point, &c) in points.iter().zip(assign) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(point) {
                *s += x;
            }
        }
        let mut total = 0.0;
        for (point, &c) in points.iter().zip(assign) {
            total += point
                .iter()
                .zip(&sums[c])
                .map(|(x, s)| {
                    let d = x - s / counts[c] as f64;
                    d * d
                })
                .sum::<f64>();
        }
        total
    }

    fn recurse(
        points: &[Vec<f64>],
        k: usize,
        i: usize,
        used: usize,
        assign: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if i == points.len() {
            *best = best.min(sse(points, assign, used));
            return;
        }
        for c in 0..=used.min(k - 1) {
            assign[i] = c;
            recurse(points, k, i + 1, used.max(c + 1), assign, best);
        }
    }

    let mut best = f64::INFINITY;
    recurse(points, k, 0, 0, &mut vec![0; points.len()], &mut best);
    best
}

fn as_features(points: &[Vec<f64>]) -> Vec<SpectrumFeature> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| SpectrumFeature {
            doc_id: format!("p{i}"),
            bins: p.clone(),
        })
        .collect()
}

fn kmeans_fixtures() -> Vec<(&'static str, Vec<Vec<f64>>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6B6D);
    let mut random_points = |n: usize, dim: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect()
    };
    let blob = |cx: f64, cy: f64| {
        vec![
            vec![cx - 0.4, cy],
            vec![cx + 0.4, cy],
            vec![cx, cy - 0.4],
            vec![cx, cy + 0.4],
        ]
    };
    let three_blobs: Vec<Vec<f64>> = [blob(0.0, 0.0), blob(10.0, 0.0), blob(5.0, 8.0)]
        .into_iter()
        .flatten()
        .collect();
    let worked_example = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![10.0, 0.0],
        vec![11.0, 0.0],
    ];
    let duplicates: Vec<Vec<f64>> = std::iter::repeat_n(vec![1.0, 1.0], 6)
        .chain(std::iter::repeat_n(vec![5.0, 5.0], 6))
        .collect();
    let collinear: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 0.0]).collect();
    let uniform8 = random_points(8, 2);
    let random12 = random_points(12, 3);

    vec![
        ("worked-example", worked_example, 2),
        ("three-blobs-k3", three_blobs.clone(), 3),
        ("three-blobs-k2", three_blobs, 2),
        ("uniform8-k2", uniform8.clone(), 2),
        ("uniform8-k3", uniform8, 3),
        ("duplicates-k2", duplicates.clone(), 2),
        ("duplicates-k3", duplicates, 3),
        ("collinear-k2", collinear.clone(), 2),
        ("collinear-k3", collinear, 3),
        ("random12-k3", random12, 3),
    ]
}

#[test]
fn criterion_6_kmeans_reaches_the_brute_force_optimum_on_small_fixtures() {
    const {
        assert!(
            cfg!(debug_assertions),
            "the per-iteration inertia check inside the solver runs only with debug assertions on"
        )
    };
    let params = KMeansParams { restarts: 20, ..KMeansParams::default() };
    for (name, points, k) in kmeans_fixtures() {
        assert!(points.len() <= 12 && k <= 3, "fixture {name} out of contract");
        let features = as_features(&points);
        let (model, _) = kmeans_fit(&features, k, 0, &params).unwrap();
        let reached = inertia(&model, &features);
        let optimum = brute_force_sse(&points, k);
        assert!(
            (reached - optimum).abs() <= KMEANS_TOLERANCE * optimum.max(1.0),
            "{name}: reached {reached}, optimum {optimum}"
        );
        if name == "worked-example" {
            assert_eq!(reached, 1.0, "the worked example's inertia is exactly 1");
        }
    }
    println!(
        "criterion 6 PASS: best-of-20 restarts equals the enumerated optimum on all \
         fixtures; the worked example lands on inertia 1.0 exactly"
    );
}

fn snapshot_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_str().unwrap().to_string();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[test]
fn criterion_7_analyze_runs_are_byte_identical() {
    let dir = tempdir().unwrap();
    let (manifest, model, _) = corpus_and_model(dir.path());
    let run = path_str(dir.path(), "run");
    let args = [
        "analyze", "--manifest", &manifest, "--model-file", &model, "--out-dir", &run,
        "--k-min", "1", "--k-max", "8", "--seed", "7", "--jobs", "4",
    ];
    ok(&args);
    let first = snapshot_tree(Path::new(&run));
    ok(&args);
    let second = snapshot_tree(Path::new(&run));

    assert!(first.len() >= 8, "expected a full artifact tree, got {:?}", first.keys());
    assert_eq!(
        first.keys().collect::<Vec<_>>(),
        second.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &first {
        assert_eq!(bytes, &second[name], "{name} differs between identical runs");
    }
    println!(
        "criterion 7 PASS: two analyze runs with the same config wrote {} byte-identical \
         files", first.len()
    );
}
