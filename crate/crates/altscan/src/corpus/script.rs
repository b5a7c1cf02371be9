use unicode_script::{Script, UnicodeScript};

use super::ScriptSpan;

/// Splits `text` into maximal runs of a single Unicode script.
///
/// Code points whose script property is Common or Inherited (spaces,
/// punctuation, digits, combining marks) carry no signal of their own: they
/// attach to the run in progress, or to the first concrete run when they open
/// the text. Text containing no concrete script at all becomes one span
/// labeled `Common`.
///
/// The returned spans tile `[0, text.len())` exactly, so concatenating the
/// span slices in order reproduces the input byte for byte.
pub fn segment_by_script(text: &str) -> Vec<ScriptSpan> {
    let mut spans: Vec<ScriptSpan> = Vec::new();
    let mut current: Option<(Script, usize)> = None;
    for (offset, ch) in text.char_indices() {
        let script = ch.script();
        if script == Script::Common || script == Script::Inherited {
            continue;
        }
        match current {
            None => {
                // A leading neutral stretch joins this first concrete run.
                current = Some((script, 0));
            }
            Some((active, start)) if active != script => {
                spans.push(ScriptSpan {
                    script: active.full_name().to_string(),
                    start,
                    end: offset,
                });
                current = Some((script, offset));
            }
            Some(_) => {}
        }
    }
    match current {
        Some((active, start)) => spans.push(ScriptSpan {
            script: active.full_name().to_string(),
            start,
            end: text.len(),
        }),
        None if !text.is_empty() => spans.push(ScriptSpan {
            script: Script::Common.full_name().to_string(),
            start: 0,
            end: text.len(),
        }),
        None => {}
    }
    spans
}
