//! Minimal SVG plots of sweep records.
//!
//! Bands become rectangles (energy across, sweep row down). Everything else is
//! a polyline. Infinite values are drawn on the frame edge with a marker and
//! break the polyline.

use std::fmt::Write;

use serde_json::Value;

use crate::records::{decode, Record};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;

enum Plot {
    Rects(Vec<[f64; 4]>),
    Curves(Vec<Vec<(f64, f64)>>),
}

fn pair(v: &Value) -> Option<(f64, f64)> {
    let a = v.as_array()?;
    match a.as_slice() {
        [x, y] => Some((decode(x)?, decode(y)?)),
        _ => None,
    }
}

fn series(records: &[Record], x: &str, y: &str) -> Vec<(f64, f64)> {
    records.iter().filter_map(|r| Some((r.number(x)?, r.number(y)?))).collect()
}

fn extract(records: &[Record]) -> Result<Plot, String> {
    let command = records
        .iter()
        .find_map(|r| r.get("command").and_then(Value::as_str))
        .ok_or("records carry no command")?;
    let rows: Vec<Record> = records
        .iter()
        .filter(|r| r.get("status").and_then(Value::as_str) == Some("ok") && r.get("kind").is_none())
        .cloned()
        .collect();
    let plot = match command {
        "bands" | "cantor-trend" => {
            let mut rects = Vec::new();
            for (k, r) in rows.iter().enumerate() {
                for b in r.get("bands").and_then(Value::as_array).into_iter().flatten() {
                    if let Some((lo, hi)) = pair(b) {
                        rects.push([lo, hi, k as f64, k as f64 + 0.8]);
                    }
                }
            }
            Plot::Rects(rects)
        }
        "gapflow" => Plot::Curves(
            rows.iter()
                .map(|r| {
                    let mut curve = Vec::new();
                    let mut turns = 0.0;
                    let mut prev = f64::NEG_INFINITY;
                    for s in r.get("samples").and_then(Value::as_array).into_iter().flatten() {
                        let Some(a) = s.as_array() else { continue };
                        let (Some(t), Some(l)) = (a.first().and_then(decode), a.get(1).and_then(decode)) else { continue };
                        // coupling angle, unwrapped along the sample order
                        let mut x = 2.0 * t.atan() + turns;
                        if x < prev {
                            turns += std::f64::consts::TAU;
                            x += std::f64::consts::TAU;
                        }
                        prev = x;
                        curve.push((x, l));
                    }
                    curve
                })
                .collect(),
        ),
        "lyapunov" => Plot::Curves(vec![series(&rows, "energy", "mean")]),
        "winding" => Plot::Curves(vec![series(&rows, "q", "winding")]),
        "hull" => Plot::Curves(vec![series(&rows, "n", "width")]),
        "gap-filling" => Plot::Curves(vec![series(&rows, "q", "covered_fraction")]),
        other => return Err(format!("{other} records have nothing to plot")),
    };
    let empty = match &plot {
        Plot::Rects(r) => r.is_empty(),
        Plot::Curves(c) => c.iter().all(Vec::is_empty),
    };
    if empty {
        return Err("no plottable values".into());
    }
    Ok(plot)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for (a, b) in points {
            if a.is_finite() {
                x = (x.0.min(a), x.1.max(a));
            }
            if b.is_finite() {
                y = (y.0.min(b), y.1.max(b));
            }
        }
        let widen = |r: (f64, f64)| {
            if !r.0.is_finite() {
                (0.0, 1.0)
            } else if r.1 - r.0 < 1e-12 {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                r
            }
        };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        let x = x.clamp(self.x.0, self.x.1);
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y.0, self.y.1);
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Renders the records of one sweep as an SVG document.
///
/// # Errors
/// Records without a plottable command or without finite values.
pub fn emit_svg(records: &[Record]) -> Result<String, String> {
    let plot = extract(records)?;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    match plot {
        Plot::Rects(rects) => {
            let frame = Frame::fit(rects.iter().flat_map(|r| [(r[0], r[2]), (r[1], r[3])]));
            for [lo, hi, y0, y1] in rects {
                let (x0, x1) = (frame.px(lo), frame.px(hi));
                let (top, bottom) = (frame.py(y1), frame.py(y0));
                let _ = writeln!(
                    s,
                    r#"<rect x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
                    (x1 - x0).max(0.5),
                    bottom - top
                );
            }
        }
        Plot::Curves(curves) => {
            let frame = Frame::fit(curves.iter().flatten().copied());
            for curve in &curves {
                let mut segment: Vec<String> = Vec::new();
                let flush = |seg: &mut Vec<String>, s: &mut String| {
                    if seg.len() > 1 {
                        let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" points="{}"/>"#, seg.join(" "));
                    }
                    seg.clear();
                };
                for &(x, y) in curve {
                    if y.is_nan() {
                        flush(&mut segment, &mut s);
                    } else if y.is_infinite() {
                        flush(&mut segment, &mut s);
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="crimson"/>"#, frame.px(x), frame.py(y));
                    } else {
                        segment.push(format!("{:.2},{:.2}", frame.px(x), frame.py(y)));
                    }
                }
                flush(&mut segment, &mut s);
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
