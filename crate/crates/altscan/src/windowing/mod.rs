//! Fixed-size word windows with byte offsets, per-window language
//! probability grids, and the majority-language probability signal.
//!
//! Windows tile the document: each slice runs from its first word's byte
//! to the byte before the next window's first word, so concatenating the
//! slices reproduces the text exactly.

use serde::{Deserialize, Serialize};

use crate::corpus::{segment_by_script, Document};
use crate::error::{Error, Result};
use crate::langid::Predictor;

/// One window of a document: a consecutive group of words plus the byte
/// range its slice occupies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub doc_id: String,
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub word_count: usize,
}

/// One grid row: the byte range of a window and the model's probability
/// distribution over labels for its text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub start: usize,
    pub end: usize,
    pub probs: Vec<f64>,
}

/// Per-window label probabilities for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowGrid {
    pub doc_id: String,
    pub window_size: usize,
    pub labels: Vec<String>,
    pub windows: Vec<GridRow>,
}

impl WindowGrid {
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.windows.iter().map(|r| r.probs.as_slice())
    }
}

/// The majority language's probability in every window of one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageSignal {
    pub doc_id: String,
    pub majority_label: String,
    pub values: Vec<f64>,
}

/// Byte offsets of the first characters of words; words are maximal runs
/// of non-whitespace characters.
fn word_starts(text: &str) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut in_word = false;
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            in_word = false;
        } else if !in_word {
            in_word = true;
            starts.push(offset);
        }
    }
    starts
}

/// Windows `text[base..base + text.len()]`, numbering windows from
/// `*next_index`. Leading whitespace attaches to the first window so the
/// slices tile the region; a whitespace-only region becomes one empty
/// window for the same reason.
fn windows_over(
    doc_id: &str,
    text: &str,
    base: usize,
    window_size: usize,
    next_index: &mut usize,
) -> Vec<Window> {
    let starts = word_starts(text);
    if starts.is_empty() {
        if text.is_empty() {
            return Vec::new();
        }
        let window = Window {
            doc_id: doc_id.to_string(),
            index: *next_index,
            start: base,
            end: base + text.len(),
            word_count: 0,
        };
        *next_index += 1;
        return vec![window];
    }
    let chunks: Vec<&[usize]> = starts.chunks(window_size).collect();
    let mut windows = Vec::with_capacity(chunks.len());
    for (i, chunk) in chunks.iter().enumerate() {
        let start = if i == 0 { 0 } else { chunk[0] };
        let end = chunks.get(i + 1).map_or(text.len(), |next| next[0]);
        windows.push(Window {
            doc_id: doc_id.to_string(),
            index: *next_index,
            start: base + start,
            end: base + end,
            word_count: chunk.len(),
        });
        *next_index += 1;
    }
    windows
}

/// Splits a document into consecutive groups of `window_size` words; the
/// final window keeps the remainder. Empty documents yield no windows.
pub fn window_document(doc: &Document, window_size: usize) -> Vec<Window> {
    assert!(window_size >= 1, "window_size must be at least 1");
    windows_over(&doc.id, &doc.text, 0, window_size, &mut 0)
}

/// Like [`window_document`], but windows never straddle a script-span
/// boundary: each script span is windowed separately.
pub fn window_document_by_script(doc: &Document, window_size: usize) -> Vec<Window> {
    assert!(window_size >= 1, "window_size must be at least 1");
    let mut next_index = 0;
    let mut windows = Vec::new();
    for span in segment_by_script(&doc.text) {
        windows.extend(windows_over(
            &doc.id,
            &doc.text[span.start..span.end],
            span.start,
            window_size,
            &mut next_index,
        ));
    }
    windows
}

/// Runs the model over every window slice, producing one probability row
/// per window.
pub fn infer_grid<P: Predictor + ?Sized>(
    model: &P,
    windows: &[Window],
    doc_text: &str,
    window_size: usize,
) -> WindowGrid {
    let doc_id = windows.first().map_or_else(String::new, |w| w.doc_id.clone());
    let rows = windows
        .iter()
        .map(|w| GridRow {
            start: w.start,
            end: w.end,
            probs: model.predict(&doc_text[w.start..w.end]),
        })
        .collect();
    WindowGrid {
        doc_id,
        window_size,
        labels: model.label_set().labels().to_vec(),
        windows: rows,
    }
}

/// Highest-probability column; ties go to the lexicographically smaller
/// label.
fn row_argmax(labels: &[String], probs: &[f64]) -> usize {
    (0..probs.len())
        .max_by(|&a, &b| {
            probs[a]
                .total_cmp(&probs[b])
                .then_with(|| labels[b].cmp(&labels[a]))
        })
        .expect("non-empty row")
}

/// The label that is the per-window argmax most often; ties broken by
/// lexicographic label order.
pub fn majority_label(grid: &WindowGrid) -> Result<&str> {
    if grid.windows.is_empty() || grid.labels.is_empty() {
        return Err(Error::EmptyGrid(grid.doc_id.clone()));
    }
    let mut counts = vec![0usize; grid.labels.len()];
    for row in &grid.windows {
        counts[row_argmax(&grid.labels, &row.probs)] += 1;
    }
    let best = (0..counts.len())
        .max_by(|&a, &b| {
            counts[a]
                .cmp(&counts[b])
                .then_with(|| grid.labels[b].cmp(&grid.labels[a]))
        })
        .expect("non-empty label set");
    Ok(&grid.labels[best])
}

/// Collapses the grid to the majority language's probability per window.
pub fn extract_signal(grid: &WindowGrid) -> Result<LanguageSignal> {
    let label = majority_label(grid)?.to_string();
    let column = grid
        .labels
        .iter()
        .position(|l| *l == label)
        .expect("majority label comes from the grid");
    let values = grid.windows.iter().map(|r| r.probs[column]).collect();
    Ok(LanguageSignal {
        doc_id: grid.doc_id.clone(),
        majority_label: label,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::reconstruct;
    use crate::langid::{segment, train_naive_bayes};
    use proptest::prelude::*;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.to_string(),
            text: text.to_string(),
            language_label: None,
            year: None,
            source: String::new(),
        }
    }

    fn repeat_words(word: &str, count: usize) -> String {
        vec![word; count].join(" ")
    }

    #[test]
    fn word_counts_follow_window_size() {
        let d = doc("d", &repeat_words("alpha", 120));
        let windows = window_document(&d, 50);
        let counts: Vec<usize> = windows.iter().map(|w| w.word_count).collect();
        assert_eq!(counts, [50, 50, 20]);
        assert_eq!(windows[0].index, 0);
        assert_eq!(windows[2].index, 2);

        assert_eq!(window_document(&doc("d", &repeat_words("a", 50)), 50).len(), 1);
    }

    #[test]
    fn offsets_tile_the_text() {
        let d = doc("d", "  a b c d e");
        let windows = window_document(&d, 2);
        let ranges: Vec<(usize, usize)> = windows.iter().map(|w| (w.start, w.end)).collect();
        assert_eq!(ranges, [(0, 6), (6, 10), (10, 11)]);
        let parts: Vec<(usize, usize, &str)> = windows
            .iter()
            .map(|w| (w.start, w.end, &d.text[w.start..w.end]))
            .collect();
        assert_eq!(reconstruct(&parts).unwrap(), d.text);
    }

    #[test]
    fn empty_and_whitespace_documents() {
        assert!(window_document(&doc("d", ""), 5).is_empty());
        let windows = window_document(&doc("d", "   "), 5);
        assert_eq!(windows.len(), 1);
        assert_eq!((windows[0].start, windows[0].end, windows[0].word_count), (0, 3, 0));
    }

    #[test]
    fn script_aware_windows_break_at_script_spans() {
        let d = doc("d", "one two three αλφα βητα");
        let windows = window_document_by_script(&d, 2);
        let counts: Vec<usize> = windows.iter().map(|w| w.word_count).collect();
        // Latin span "one two three " then Greek span; the trailing space
        // after "three" belongs to the Latin span.
        assert_eq!(counts, [2, 1, 2]);
        let parts: Vec<(usize, usize, &str)> = windows
            .iter()
            .map(|w| (w.start, w.end, &d.text[w.start..w.end]))
            .collect();
        assert_eq!(reconstruct(&parts).unwrap(), d.text);
        assert_eq!(windows.last().unwrap().index, 2);
    }

    fn two_language_model() -> impl Predictor {
        let segments = [
            segment("greek", &repeat_words("βββ", 30)),
            segment("latin", &repeat_words("aaa", 30)),
        ];
        train_naive_bayes(&segments, (1, 2), 0.1).unwrap()
    }

    #[test]
    fn grid_rows_are_distributions_and_monolingual_argmax_is_true() {
        let model = two_language_model();
        let d = doc("d", &repeat_words("aaa", 120));
        let windows = window_document(&d, 50);
        let grid = infer_grid(&model, &windows, &d.text, 50);
        assert_eq!(grid.windows.len(), 3);
        assert_eq!(grid.labels, ["greek", "latin"]);
        for row in grid.rows() {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(row[1] > row[0]);
        }
    }

    #[test]
    fn aligned_alternating_document_alternates_argmaxes() {
        let model = two_language_model();
        let blocks = [
            repeat_words("aaa", 50),
            repeat_words("βββ", 50),
            repeat_words("aaa", 50),
            repeat_words("βββ", 50),
        ];
        let d = doc("d", &blocks.join(" "));
        let windows = window_document(&d, 50);
        let grid = infer_grid(&model, &windows, &d.text, 50);
        let argmaxes: Vec<usize> = grid
            .windows
            .iter()
            .map(|r| row_argmax(&grid.labels, &r.probs))
            .collect();
        assert_eq!(argmaxes, [1, 0, 1, 0]);

        // Two windows each: the tie goes to the lexicographically smaller
        // label, and the signal tracks that column.
        assert_eq!(majority_label(&grid).unwrap(), "greek");
        let signal = extract_signal(&grid).unwrap();
        assert_eq!(signal.values.len(), 4);
        for (i, v) in signal.values.iter().enumerate() {
            let want = if i % 2 == 0 { 0.0 } else { 1.0 };
            assert!((v - want).abs() < 1e-9, "window {i}: {v}");
        }
    }

    fn grid_from_rows(labels: &[&str], rows: &[Vec<f64>]) -> WindowGrid {
        WindowGrid {
            doc_id: "d".into(),
            window_size: 50,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            windows: rows
                .iter()
                .enumerate()
                .map(|(i, probs)| GridRow {
                    start: i,
                    end: i + 1,
                    probs: probs.clone(),
                })
                .collect(),
        }
    }

    #[test]
    fn majority_counts_argmaxes_and_breaks_ties_lexicographically() {
        let grid = grid_from_rows(
            &["A", "B"],
            &[vec![0.9, 0.1], vec![0.8, 0.2], vec![0.3, 0.7]],
        );
        assert_eq!(majority_label(&grid).unwrap(), "A");

        let tie = grid_from_rows(&["B", "A"], &[vec![0.9, 0.1], vec![0.1, 0.9]]);
        assert_eq!(majority_label(&tie).unwrap(), "A");
    }

    #[test]
    fn majority_ignores_monotone_rescaling() {
        let rows = vec![vec![0.6, 0.4], vec![0.2, 0.8], vec![0.7, 0.3]];
        let grid = grid_from_rows(&["A", "B"], &rows);
        let squared = grid_from_rows(
            &["A", "B"],
            &rows
                .iter()
                .map(|r| r.iter().map(|p| p * p).collect())
                .collect::<Vec<_>>(),
        );
        assert_eq!(
            majority_label(&grid).unwrap(),
            majority_label(&squared).unwrap()
        );
    }

    #[test]
    fn empty_grid_is_an_error() {
        let grid = grid_from_rows(&["A", "B"], &[]);
        assert!(matches!(
            majority_label(&grid),
            Err(Error::EmptyGrid(id)) if id == "d"
        ));
        assert!(extract_signal(&grid).is_err());
    }

    #[test]
    fn signal_values_are_the_majority_column() {
        let grid = grid_from_rows(
            &["A", "B"],
            &[vec![0.9, 0.1], vec![0.4, 0.6], vec![0.8, 0.2]],
        );
        let signal = extract_signal(&grid).unwrap();
        assert_eq!(signal.majority_label, "A");
        let column: Vec<f64> = grid.windows.iter().map(|r| r.probs[0]).collect();
        assert_eq!(signal.values, column);
        assert!(signal.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn grid_and_signal_serialize_to_the_documented_shape() {
        let grid = grid_from_rows(&["A", "B"], &[vec![0.9, 0.1]]);
        let value: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        assert_eq!(
            value,
            serde_json::json!({
                "doc_id": "d",
                "window_size": 50,
                "labels": ["A", "B"],
                "windows": [{"start": 0, "end": 1, "probs": [0.9, 0.1]}],
            })
        );

        let signal = extract_signal(&grid).unwrap();
        let line = serde_json::to_string(&signal).unwrap();
        let back: LanguageSignal = serde_json::from_str(&line).unwrap();
        assert_eq!(back, signal);
    }

    proptest! {
        #[test]
        fn window_slices_always_reconstruct_the_text(
            text in ".{0,200}",
            window_size in 1usize..6,
        ) {
            let d = doc("d", &text);
            for windows in [
                window_document(&d, window_size),
                window_document_by_script(&d, window_size),
            ] {
                let parts: Vec<(usize, usize, &str)> = windows
                    .iter()
                    .map(|w| (w.start, w.end, &d.text[w.start..w.end]))
                    .collect();
                prop_assert_eq!(reconstruct(&parts).unwrap(), d.text.clone());
                for w in &windows {
                    prop_assert!(w.word_count <= window_size);
                }
            }
        }

        #[test]
        fn window_count_is_the_ceiling_of_words_over_size(
            words in 0usize..200,
            window_size in 1usize..9,
        ) {
            let d = doc("d", &repeat_words("w", words));
            let windows = window_document(&d, window_size);
            prop_assert_eq!(windows.len(), words.div_ceil(window_size));
            let total: usize = windows.iter().map(|w| w.word_count).sum();
            prop_assert_eq!(total, words);
        }
    }
}
