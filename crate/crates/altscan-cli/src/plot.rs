use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use altscan::spectral::spectrum_rows;
use altscan::windowing::LanguageSignal;

use crate::config::PipelineConfig;
use crate::error::{at_path, CliError, CliResult};
use crate::io::{create_dir, read_jsonl, write_text, Csv};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// A fixed-size line chart as a standalone SVG document.
fn line_chart(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let (x_lo, x_hi) = axis_range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = axis_range(points.iter().map(|p| p.1));
    let map_x = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    let map_y = |y: f64| HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut path = String::new();
    for (x, y) in points {
        let _ = write!(path, "{:.2},{:.2} ", map_x(*x), map_y(*y));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{b:.2}" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{m}" y="{:.2}" text-anchor="start" font-family="sans-serif" font-size="10">{x_lo:.3} .. {x_hi:.3}</text>"#,
        HEIGHT - MARGIN + 16.0,
        m = MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">{y_lo:.3} .. {y_hi:.3}</text>"#,
        MARGIN - 6.0,
        MARGIN + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        path.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

fn save_chart(
    dir: &Path,
    stem: &str,
    title: &str,
    x_label: &str,
    y_label: &str,
    header: &str,
    points: &[(f64, f64)],
) -> CliResult<()> {
    let mut csv = Csv::new(header);
    for (x, y) in points {
        csv.row(&[x.to_string(), y.to_string()]);
    }
    csv.save(&dir.join(format!("{stem}.csv")))?;
    write_text(
        &dir.join(format!("{stem}.svg")),
        &line_chart(title, x_label, y_label, points),
    )?;
    Ok(())
}

fn plot_doc(artifacts: &Path, plots: &Path, doc_id: &str) -> CliResult<()> {
    let signals: Vec<LanguageSignal> = read_jsonl(&artifacts.join("signals.jsonl"))?;
    let Some(signal) = signals.iter().find(|s| s.doc_id == doc_id) else {
        let mut ids: Vec<&str> = signals.iter().map(|s| s.doc_id.as_str()).collect();
        ids.sort_unstable();
        ids.truncate(20);
        return Err(CliError::Data(format!(
            "no signal for doc {doc_id:?}; known ids start with: {}",
            ids.join(", ")
        )));
    };

    let time: Vec<(f64, f64)> = signal
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64, v))
        .collect();
    save_chart(
        plots,
        &format!("{doc_id}.time"),
        &format!("{doc_id}: share of windows voting {}", signal.majority_label),
        "window",
        "probability",
        "window,probability",
        &time,
    )?;

    let freq = spectrum_rows(&signal.values)?;
    save_chart(
        plots,
        &format!("{doc_id}.freq"),
        &format!("{doc_id}: magnitude spectrum"),
        "normalized_frequency",
        "magnitude",
        "normalized_frequency,magnitude",
        &freq,
    )?;
    println!("wrote {doc_id}.time and {doc_id}.freq under {}", plots.display());
    Ok(())
}

fn plot_elbow(artifacts: &Path, plots: &Path) -> CliResult<()> {
    let path = artifacts.join("elbow.csv");
    let text = at_path(fs::read_to_string(&path), &path)?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |field: Option<&str>| {
            field
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| CliError::Data(format!("{}:{}: bad row", path.display(), i + 1)))
        };
        let k = parse(fields.next())?;
        let inertia = parse(fields.next())?;
        points.push((k, inertia));
    }
    write_text(
        &plots.join("elbow.svg"),
        &line_chart("inertia by cluster count", "k", "inertia", &points),
    )?;
    println!("wrote elbow.svg under {}", plots.display());
    Ok(())
}

pub fn cmd_plot(
    config: &PipelineConfig,
    artifacts: Option<&Path>,
    doc_id: Option<&str>,
    elbow: bool,
) -> CliResult<()> {
    let artifacts: PathBuf = match artifacts {
        Some(dir) => dir.to_path_buf(),
        None => config.require(&config.out_dir, "artifacts")?,
    };
    let plots = artifacts.join("plots");
    create_dir(&plots)?;
    match (doc_id, elbow) {
        (Some(id), false) => plot_doc(&artifacts, &plots, id),
        (None, true) => plot_elbow(&artifacts, &plots),
        (Some(_), true) => Err(CliError::Usage(
            "pass either --doc-id or --elbow, not both".into(),
        )),
        (None, false) => Err(CliError::Usage("pass --doc-id ID or --elbow".into())),
    }
}
