//! Trajectory serialisation: CSV with shortest round-trip decimals and a
//! small self-contained SVG line chart.

use std::fmt::Write as _;

use crate::integrator::Trajectory;
use crate::model::State;

pub const CSV_HEADER: &str = "t,x,y1,y2";

/// One row per sample. `{:?}` on `f64` prints the shortest decimal that parses
/// back to the same bits.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * t.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (time, s) in t.times.iter().zip(&t.states) {
        let _ = writeln!(out, "{time:?},{:?},{:?},{:?}", s.x, s.y1, s.y2);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvError(pub String);

/// Parses text produced by [`trajectory_csv`] back into `(times, states)`.
pub fn parse_trajectory_csv(text: &str) -> Result<(Vec<f64>, Vec<State>), CsvError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(CsvError(format!("expected header `{CSV_HEADER}`")));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (i, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| CsvError(format!("row {}: {e}", i + 2)))?;
        let [t, x, y1, y2] = v[..] else {
            return Err(CsvError(format!("row {}: expected 4 columns", i + 2)));
        };
        times.push(t);
        states.push(State { x, y1, y2 });
    }
    Ok((times, states))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 48.0;
const MAX_POINTS: usize = 2000;
const SERIES: [(&str, &str); 3] = [("x", "#1f77b4"), ("y1", "#d62728"), ("y2", "#2ca02c")];

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Densities against time as three polylines with axes, ticks and a legend.
pub fn trajectory_svg(t: &Trajectory) -> String {
    let n = t.len();
    let step = n.div_ceil(MAX_POINTS).max(1);
    let idx: Vec<usize> = (0..n)
        .step_by(step)
        .chain((n > 0 && !(n - 1).is_multiple_of(step)).then(|| n - 1))
        .collect();

    let t0 = t.times.first().copied().unwrap_or(0.0);
    let t1 = t.times.last().copied().unwrap_or(1.0);
    let y_max = t
        .states
        .iter()
        .map(|s| s.norm_inf())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
    let sx = |v: f64| {
        MARGIN_L
            + if t1 > t0 {
                (v - t0) / (t1 - t0) * pw
            } else {
                0.0
            }
    };
    let sy = |v: f64| MARGIN_T + ph - v / y_max * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, yb, yt) = (MARGIN_L, MARGIN_L + pw, MARGIN_T + ph, MARGIN_T);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{yt} L{x0},{yb} L{x1},{yb}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let (tv, yv) = (t0 + f * (t1 - t0), f * y_max);
        let (px, py) = (sx(tv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{yb}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            yb + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            yb + 18.0,
            tick_label(tv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        x0 + pw / 2.0,
        HEIGHT - 8.0
    );
    for (k, (name, colour)) in SERIES.iter().enumerate() {
        let pts: Vec<String> = idx
            .iter()
            .map(|&i| format!("{:.2},{:.2}", sx(t.times[i]), sy(t.states[i].to_array()[k])))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN_T + 16.0 + 20.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            x1 + 16.0,
            x1 + 40.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{name}</text>"#,
            x1 + 46.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
