//! SVG sweep plots: worst-observable error rate and detection rate against
//! depth, one curve per (encoding, mitigation). Excluded points are left out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::report::ResultRow;

/// Rows sharing everything but encoding, mitigation and depth.
pub type Group<'a> = BTreeMap<String, Vec<&'a ResultRow>>;

pub fn group_key(r: &ResultRow) -> String {
    format!("{}_L{}_{}_{}", r.model, r.l, r.circuit, r.readout)
}

/// Groups rows per figure, then per curve.
pub fn groups(rows: &[ResultRow]) -> BTreeMap<String, Group<'_>> {
    let mut out: BTreeMap<String, Group<'_>> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.excluded) {
        out.entry(group_key(r)).or_default().entry(format!("{} {}", r.encoding, r.mitigation)).or_default().push(r);
    }
    for g in out.values_mut() {
        for curve in g.values_mut() {
            curve.sort_by(|a, b| a.depth.total_cmp(&b.depth));
        }
    }
    out
}

fn file_name(key: &str) -> String {
    key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-3);
    (lo - pad, hi + pad)
}

type PlotResult<T> = Result<T, Box<dyn std::error::Error>>;

fn panel(
    area: &DrawingArea<SVGBackend<'_>, plotters::coord::Shift>,
    title: &str,
    x_label: &str,
    y_label: &str,
    g: &Group<'_>,
    y: fn(&ResultRow) -> Option<(f64, f64, f64)>,
) -> PlotResult<()> {
    let xs = range(g.values().flatten().map(|r| r.depth));
    let ys = range(g.values().flatten().filter_map(|r| y(r)).flat_map(|(v, lo, hi)| [v, lo, hi]));
    let mut chart = ChartBuilder::on(area)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(56)
        .build_cartesian_2d(xs.0..xs.1, ys.0.max(0.0)..ys.1)?;
    chart.configure_mesh().x_desc(x_label).y_desc(y_label).draw()?;
    for (i, (name, curve)) in g.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let pts: Vec<(f64, (f64, f64, f64))> = curve.iter().filter_map(|r| y(r).map(|v| (r.depth, v))).collect();
        chart
            .draw_series(LineSeries::new(pts.iter().map(|(x, v)| (*x, v.0)), color.stroke_width(2)))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
        chart.draw_series(pts.iter().map(|(x, v)| ErrorBar::new_vertical(*x, v.1, v.0, v.2, color.filled(), 6)))?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    Ok(())
}

fn worst(r: &ResultRow) -> Option<(f64, f64, f64)> {
    let v = r.r_obs_worst?;
    Some((v, r.ci_low.unwrap_or(v), r.ci_high.unwrap_or(v)))
}

fn detection(r: &ResultRow) -> Option<(f64, f64, f64)> {
    Some((r.r_det, r.r_det, r.r_det))
}

/// Writes one SVG per figure group into `dir` and returns the paths.
pub fn plot_rows(rows: &[ResultRow], dir: &Path) -> PlotResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (key, g) in groups(rows) {
        let path = dir.join(format!("{}.svg", file_name(&key)));
        let x_label = if key.contains("_random_") { "fraction of Hamiltonian terms" } else { "Trotter steps" };
        {
            let root = SVGBackend::new(&path, (1200, 480)).into_drawing_area();
            root.fill(&WHITE)?;
            let (left, right) = root.split_horizontally(600);
            panel(&left, &format!("{key}: worst observable"), x_label, "R_obs,worst", &g, worst)?;
            panel(&right, &format!("{key}: detection"), x_label, "R_det", &g, detection)?;
            root.present()?;
        }
        written.push(path);
    }
    Ok(written)
}
