//! Cross-module checks: the three model families on a shared corpus, label
//! renaming, and the windowing → spectrum → clustering chain end to end.

use altscan::clustering::{elbow_scan, kmeans_fit, KMeansParams};
use altscan::corpus::{generate_synthetic_corpus, LabeledSegment, SynthConfig};
use altscan::langid::{
    evaluate, stratified_split, train_char_ngram, train_hashed_linear, train_naive_bayes,
    HashedLinearParams, Predictor,
};
use altscan::spectral::{feature_vector, SpectrumFeature};
use altscan::windowing::{extract_signal, infer_grid, window_document};

const ALPHABETS: [(&str, &str); 3] = [
    ("alpha", "abcdefgh"),
    ("beta", "αβγδεζηθ"),
    ("gamma", "бвгдежзи"),
];

fn languages_json() -> String {
    let entries: Vec<String> = ALPHABETS
        .iter()
        .map(|(name, alphabet)| {
            format!(
                r#"{{"name": "{name}", "alphabet": "{alphabet}", "word_len_min": 3, "word_len_max": 7}}"#
            )
        })
        .collect();
    format!("[{}]", entries.join(", "))
}

fn monolingual_corpus(count: usize, length: usize, seed: u64) -> Vec<LabeledSegment> {
    let docs: Vec<String> = ALPHABETS
        .iter()
        .map(|(name, _)| {
            format!(
                r#"{{"pattern": "monolingual", "length_words": {length}, "languages": ["{name}"], "count": {count}}}"#
            )
        })
        .collect();
    let json = format!(
        r#"{{"languages": {}, "documents": [{}]}}"#,
        languages_json(),
        docs.join(", ")
    );
    let config = SynthConfig::from_json(&json).unwrap();
    generate_synthetic_corpus(&config, seed)
        .unwrap()
        .into_iter()
        .map(|(doc, _)| LabeledSegment {
            label: doc.language_label.clone().unwrap(),
            text: doc.text,
            doc_id: doc.id,
        })
        .collect()
}

#[test]
fn every_family_is_perfect_on_a_noise_free_disjoint_corpus() {
    let segments = monolingual_corpus(25, 60, 3);
    let (train, test) = stratified_split(&segments, 0.2, 5).unwrap();
    assert_eq!(test.len(), 15);
    assert!(test.iter().all(|s| s.text.chars().count() >= 50));

    let hashed_params = HashedLinearParams {
        bucket_count: 1 << 14,
        ..HashedLinearParams::default()
    };
    let models: Vec<Box<dyn Predictor>> = vec![
        Box::new(train_naive_bayes(&train, (1, 3), 0.1).unwrap()),
        Box::new(train_char_ngram(&train, 3, 0.1).unwrap()),
        Box::new(train_hashed_linear(&train, &hashed_params).unwrap().0),
    ];
    for model in &models {
        let report = evaluate(model.as_ref(), &test).unwrap();
        assert_eq!(report.macro_f1, 1.0);
    }
}

#[test]
fn renaming_labels_permutes_predictions_exactly() {
    let texts = [
        ("north", "fada gebe hacf dage bech"),
        ("north", "cafe bead gach defa"),
        ("south", "μζλν ξοπν ληξμ νοζπ"),
        ("south", "ζηλμ νμξο πζην λξμο"),
    ];
    let forward: Vec<LabeledSegment> = texts
        .iter()
        .map(|(label, text)| LabeledSegment {
            label: label.to_string(),
            text: text.to_string(),
            doc_id: String::new(),
        })
        .collect();
    let swapped: Vec<LabeledSegment> = forward
        .iter()
        .map(|s| LabeledSegment {
            label: if s.label == "north" { "south" } else { "north" }.to_string(),
            ..s.clone()
        })
        .collect();

    let params = HashedLinearParams {
        bucket_count: 1 << 10,
        dim: 4,
        epochs: 3,
        ..HashedLinearParams::default()
    };
    let pairs: Vec<(Box<dyn Predictor>, Box<dyn Predictor>)> = vec![
        (
            Box::new(train_naive_bayes(&forward, (1, 2), 0.1).unwrap()),
            Box::new(train_naive_bayes(&swapped, (1, 2), 0.1).unwrap()),
        ),
        (
            Box::new(train_char_ngram(&forward, 2, 0.1).unwrap()),
            Box::new(train_char_ngram(&swapped, 2, 0.1).unwrap()),
        ),
        (
            Box::new(train_hashed_linear(&forward, &params).unwrap().0),
            Box::new(train_hashed_linear(&swapped, &params).unwrap().0),
        ),
    ];
    for (original, renamed) in &pairs {
        for probe in ["gebe hacf", "μζλν ξο", "fada μζ", ""] {
            let a = original.predict(probe);
            let b = renamed.predict(probe);
            assert_eq!(a[0], b[1], "{probe:?}");
            assert_eq!(a[1], b[0], "{probe:?}");
        }
    }
}

#[test]
fn pipeline_recovers_the_three_pattern_groups() {
    // 20 / 3 / 4 documents, echoing the proportions of the monolingual,
    // alternating, and other-multilingual groups. 6400 words is exactly 128
    // windows of 50, so no signal needs zero padding.
    let json = format!(
        r#"{{
            "languages": {},
            "documents": [
                {{"pattern": "monolingual", "length_words": 6400, "languages": ["alpha"], "count": 10}},
                {{"pattern": "monolingual", "length_words": 6400, "languages": ["beta"], "count": 5}},
                {{"pattern": "monolingual", "length_words": 6400, "languages": ["gamma"], "count": 5}},
                {{"pattern": "alternating-words", "period_words": 50, "length_words": 6400,
                  "languages": ["alpha", "beta"], "count": 3}},
                {{"pattern": "multilingual-other", "length_words": 6400,
                  "languages": ["alpha", "beta", "gamma"], "count": 4}}
            ]
        }}"#,
        languages_json()
    );
    let config = SynthConfig::from_json(&json).unwrap();
    let corpus = generate_synthetic_corpus(&config, 17).unwrap();

    let model = train_naive_bayes(&monolingual_corpus(10, 200, 4), (1, 3), 0.1).unwrap();
    let features: Vec<SpectrumFeature> = corpus
        .iter()
        .map(|(doc, _)| {
            let windows = window_document(doc, 50);
            assert_eq!(windows.len(), 128);
            let grid = infer_grid(&model, &windows, &doc.text, 50);
            let signal = extract_signal(&grid).unwrap();
            SpectrumFeature {
                doc_id: doc.id.clone(),
                bins: feature_vector(&signal.values, 64).unwrap(),
            }
        })
        .collect();

    let report = elbow_scan(&features, 1, 8, 0, 10).unwrap();
    assert_eq!(report.selected_k, 3, "inertias {:?}", report.inertias);

    let (_, assignments) = kmeans_fit(&features, 3, 0, &KMeansParams::default()).unwrap();
    let group = |doc_id: &str| doc_id.split('-').next().unwrap().to_string();
    let mut overlap = std::collections::BTreeMap::new();
    for a in &assignments {
        *overlap.entry((a.cluster, group(&a.doc_id))).or_insert(0usize) += 1;
    }
    let mut purity = 0;
    for cluster in 0..3 {
        purity += overlap
            .iter()
            .filter(|((c, _), _)| *c == cluster)
            .map(|(_, n)| *n)
            .max()
            .unwrap_or(0);
    }
    assert!(
        purity as f64 / assignments.len() as f64 >= 0.9,
        "overlap {overlap:?}"
    );
}
