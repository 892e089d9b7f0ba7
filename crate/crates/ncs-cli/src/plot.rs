//! Trajectory plots for 2-D problems: objective contour lines with one
//! polyline per search process, a star at its first position and a square
//! at its last.

use std::path::Path;

use ncs_core::objectives::ObjectiveSpec;
use ncs_core::RunRecord;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("trajectory plots require a 2-D problem, got dimension {0}")]
    NotTwoDimensional(usize),
    #[error("the run record carries no trajectory (enable trajectory logging)")]
    MissingTrajectory,
    #[error("cannot write plot: {0}")]
    Io(#[from] std::io::Error),
}

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;
const LATTICE: usize = 121;
const CONTOUR_LEVELS: usize = 12;
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let span = CANVAS - 2.0 * MARGIN;
        let px = MARGIN + (x - self.x_lo) / (self.x_hi - self.x_lo) * span;
        // SVG y grows downward.
        let py = CANVAS - MARGIN - (y - self.y_lo) / (self.y_hi - self.y_lo) * span;
        (px, py)
    }
}

/// Line segments of one iso-level across the sampled lattice (marching
/// squares, linear interpolation along cell edges).
fn contour_segments(
    values: &[Vec<f64>],
    xs: &[f64],
    ys: &[f64],
    level: f64,
) -> Vec<((f64, f64), (f64, f64))> {
    let mut segments = Vec::new();
    for i in 0..xs.len() - 1 {
        for j in 0..ys.len() - 1 {
            // Cell corners: (i,j) bottom-left, walking counter-clockwise.
            let corners = [
                (xs[i], ys[j], values[i][j]),
                (xs[i + 1], ys[j], values[i + 1][j]),
                (xs[i + 1], ys[j + 1], values[i + 1][j + 1]),
                (xs[i], ys[j + 1], values[i][j + 1]),
            ];
            let mut crossings: Vec<(f64, f64)> = Vec::new();
            for e in 0..4 {
                let (x0, y0, v0) = corners[e];
                let (x1, y1, v1) = corners[(e + 1) % 4];
                if (v0 < level) != (v1 < level) {
                    let t = (level - v0) / (v1 - v0);
                    crossings.push((x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
                }
            }
            // 0, 2, or 4 crossings per cell; pair them up in order. The
            // ambiguous 4-crossing saddle is rare and cosmetic here.
            let mut it = crossings.chunks_exact(2);
            for pair in &mut it {
                segments.push((pair[0], pair[1]));
            }
        }
    }
    segments
}

/// Render the trajectory plot as an SVG document string.
pub fn trajectory_svg(record: &RunRecord, problem: &ObjectiveSpec) -> Result<String, PlotError> {
    if problem.dim() != 2 {
        return Err(PlotError::NotTwoDimensional(problem.dim()));
    }
    let log = record
        .trajectory
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or(PlotError::MissingTrajectory)?;

    let frame = Frame {
        x_lo: problem.lower()[0],
        x_hi: problem.upper()[0],
        y_lo: problem.lower()[1],
        y_hi: problem.upper()[1],
    };

    // Sample the landscape on a lattice.
    let xs: Vec<f64> = (0..LATTICE)
        .map(|i| frame.x_lo + (frame.x_hi - frame.x_lo) * i as f64 / (LATTICE - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..LATTICE)
        .map(|j| frame.y_lo + (frame.y_hi - frame.y_lo) * j as f64 / (LATTICE - 1) as f64)
        .collect();
    let values: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| ys.iter().map(|&y| problem.evaluate(&[x, y])).collect())
        .collect();
    let v_min = values
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let v_max = values
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut svg = String::new();
    svg.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    svg.push('\n');
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<rect x="0" y="0" width="{c}" height="{c}" fill="white"/>"#,
        c = CANVAS
    ));
    svg.push('\n');

    // Contour lines.
    for l in 0..CONTOUR_LEVELS {
        let level = v_min + (v_max - v_min) * (l + 1) as f64 / (CONTOUR_LEVELS + 1) as f64;
        let segments = contour_segments(&values, &xs, &ys, level);
        if segments.is_empty() {
            continue;
        }
        let mut d = String::new();
        for ((x0, y0), (x1, y1)) in segments {
            let (px0, py0) = frame.map(x0, y0);
            let (px1, py1) = frame.map(x1, y1);
            d.push_str(&format!("M {px0:.2} {py0:.2} L {px1:.2} {py1:.2} "));
        }
        svg.push_str(&format!(
            r##"<path class="contour" d="{}" stroke="#b0c4d8" stroke-width="0.8" fill="none"/>"##,
            d.trim_end()
        ));
        svg.push('\n');
    }

    // Frame.
    svg.push_str(&format!(
        r#"<rect x="{m}" y="{m}" width="{w}" height="{w}" fill="none" stroke="black" stroke-width="1"/>"#,
        m = MARGIN,
        w = CANVAS - 2.0 * MARGIN
    ));
    svg.push('\n');

    // One polyline per search process, with start/end markers.
    let max_rls = log.iter().map(|p| p.rls).max().unwrap_or(0);
    for rls in 0..=max_rls {
        let points: Vec<&ncs_core::engine::TrajectoryPoint> =
            log.iter().filter(|p| p.rls == rls).collect();
        if points.is_empty() {
            continue;
        }
        let color = PALETTE[rls % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|p| {
                let (px, py) = frame.map(p.position[0], p.position[1]);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        svg.push_str(&format!(
            r#"<polyline class="rls-path" points="{}" fill="none" stroke="{}" stroke-width="1.2" opacity="0.85"/>"#,
            path.join(" "),
            color
        ));
        svg.push('\n');

        let (sx, sy) = frame.map(points[0].position[0], points[0].position[1]);
        svg.push_str(&format!(
            r#"<path class="start-marker" d="{}" fill="{}" stroke="black" stroke-width="0.6"/>"#,
            star_path(sx, sy, 8.0),
            color
        ));
        svg.push('\n');

        let last = points.last().unwrap();
        let (ex, ey) = frame.map(last.position[0], last.position[1]);
        svg.push_str(&format!(
            r#"<rect class="end-marker" x="{:.2}" y="{:.2}" width="10" height="10" fill="{}" stroke="black" stroke-width="0.6"/>"#,
            ex - 5.0,
            ey - 5.0,
            color
        ));
        svg.push('\n');
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Five-pointed star centered at `(cx, cy)`.
fn star_path(cx: f64, cy: f64, radius: f64) -> String {
    let inner = radius * 0.4;
    let mut d = String::new();
    for k in 0..10 {
        let r = if k % 2 == 0 { radius } else { inner };
        let angle = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 5.0;
        let x = cx + r * angle.cos();
        let y = cy + r * angle.sin();
        d.push_str(if k == 0 { "M" } else { "L" });
        d.push_str(&format!(" {x:.2} {y:.2} "));
    }
    d.push('Z');
    d
}

/// Write the trajectory plot to `path`.
pub fn emit_trajectory_svg(
    record: &RunRecord,
    problem: &ObjectiveSpec,
    path: impl AsRef<Path>,
) -> Result<(), PlotError> {
    let svg = trajectory_svg(record, problem)?;
    std::fs::write(path, svg)?;
    Ok(())
}

/// Parse a trajectory CSV (`iteration,rls,f,x1,...,xD`) back into points.
pub fn read_trajectory_csv(
    path: impl AsRef<Path>,
) -> anyhow::Result<Vec<ncs_core::engine::TrajectoryPoint>> {
    use anyhow::Context;
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("trajectory file is empty")?;
    anyhow::ensure!(
        header.starts_with("iteration,rls,f"),
        "unexpected header `{header}`"
    );
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(fields.len() >= 4, "row {}: too few fields", i + 2);
        let parse_err = || format!("row {}: bad number", i + 2);
        points.push(ncs_core::engine::TrajectoryPoint {
            iteration: fields[0].parse().with_context(parse_err)?,
            rls: fields[1].parse().with_context(parse_err)?,
            value: fields[2].parse().with_context(parse_err)?,
            position: fields[3..]
                .iter()
                .map(|f| f.parse())
                .collect::<Result<_, _>>()
                .with_context(parse_err)?,
        });
    }
    Ok(points)
}
