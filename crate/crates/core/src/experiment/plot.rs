//! Grouped series for plotting steps against a transformed parameter, plus a
//! minimal SVG scatter plot.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::ResultRow;

/// X axis: a function of one sweep parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisTransform {
    /// `1/eps`
    InvEps,
    /// `ln(1/eps)`
    LogInvEps,
    /// `lg lg(1/eps)`
    LogLogInvEps,
    /// `(1/eps)^(1/5)`
    InvEpsPowFifth,
    /// `ln(1/eps)^5`
    LogInvEpsPow5,
    /// `n ln n`
    NLogN,
    N2,
    N3,
    /// `lg lg(1/gamma)`
    LogLogInvGamma,
}

impl AxisTransform {
    pub const ALL: [AxisTransform; 9] = [
        Self::InvEps,
        Self::LogInvEps,
        Self::LogLogInvEps,
        Self::InvEpsPowFifth,
        Self::LogInvEpsPow5,
        Self::NLogN,
        Self::N2,
        Self::N3,
        Self::LogLogInvGamma,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::InvEps => "inv_eps",
            Self::LogInvEps => "log_inv_eps",
            Self::LogLogInvEps => "loglog_inv_eps",
            Self::InvEpsPowFifth => "inv_eps_pow_1_5",
            Self::LogInvEpsPow5 => "log_inv_eps_pow5",
            Self::NLogN => "nlogn",
            Self::N2 => "n2",
            Self::N3 => "n3",
            Self::LogLogInvGamma => "loglog_inv_gamma",
        }
    }

    pub fn apply(self, row: &ResultRow) -> f64 {
        let inv_eps = 1.0 / row.eps;
        let n = row.n as f64;
        match self {
            Self::InvEps => inv_eps,
            Self::LogInvEps => inv_eps.ln(),
            Self::LogLogInvEps => inv_eps.log2().log2(),
            Self::InvEpsPowFifth => inv_eps.powf(0.2),
            Self::LogInvEpsPow5 => inv_eps.ln().powi(5),
            Self::NLogN => n * n.ln(),
            Self::N2 => n * n,
            Self::N3 => n * n * n,
            Self::LogLogInvGamma => (1.0 / row.gamma).log2().log2(),
        }
    }
}

impl FromStr for AxisTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown axis transform {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub x: f64,
    pub mean_steps: f64,
    /// Standard error of the mean; 0 for a single replicate.
    pub std_err: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub policy: String,
    /// Sorted by `x`.
    pub points: Vec<PlotPoint>,
}

impl Series {
    /// Least-squares fit of mean steps on x.
    pub fn fit(&self) -> Option<(f64, f64)> {
        let (xs, ys) = self.xy();
        least_squares(&xs, &ys)
    }

    pub fn correlation(&self) -> Option<f64> {
        let (xs, ys) = self.xy();
        pearson(&xs, &ys)
    }

    fn xy(&self) -> (Vec<f64>, Vec<f64>) {
        self.points.iter().map(|p| (p.x, p.mean_steps)).unzip()
    }
}

/// `(slope, intercept)`; a single distinct x gives a flat line through the
/// mean. `None` for empty input.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len().min(ys.len());
    if n == 0 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs[..n]
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    if sxx == 0.0 {
        return Some((0.0, my));
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Pearson correlation; `None` with fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Per-policy mean steps (with standard error) of converged rows, grouped
/// by the transformed x value. Policies appear in order of first occurrence.
pub fn emit_plot_data(rows: &[ResultRow], transform: AxisTransform) -> Vec<Series> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, u64), Vec<f64>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.outcome == "converged") {
        let slot = match order.iter().position(|p| *p == row.policy) {
            Some(k) => k,
            None => {
                order.push(&row.policy);
                order.len() - 1
            }
        };
        let x = transform.apply(row);
        // Key on the bit pattern so equal x values share a group; positive
        // floats order the same way as their bits.
        groups
            .entry((slot, x.to_bits()))
            .or_default()
            .push(row.steps as f64);
    }
    let mut series: Vec<Series> = order
        .iter()
        .map(|p| Series {
            policy: p.to_string(),
            points: Vec::new(),
        })
        .collect();
    for ((slot, bits), steps) in groups {
        let count = steps.len();
        let mean = steps.iter().sum::<f64>() / count as f64;
        let std_err = if count > 1 {
            let var = steps.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        series[slot].points.push(PlotPoint {
            x: f64::from_bits(bits),
            mean_steps: mean,
            std_err,
            count,
        });
    }
    series
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Static SVG 1.1 scatter plot with one least-squares line per series.
pub fn emit_svg(series: &[Series], transform: AxisTransform) -> String {
    let (w, h, margin) = (640.0, 420.0, 60.0);
    let points = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.mean_steps);
        y1 = y1.max(p.mean_steps);
    }
    if !x0.is_finite() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = margin,
        b = h - margin,
        r = w - margin
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        w / 2.0,
        h - 20.0,
        transform.tag()
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" font-size="13" transform="rotate(-90 16 {})" text-anchor="middle">mean steps</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (v, anchor, x, y) in [
        (x0, "start", margin, h - margin + 16.0),
        (x1, "end", w - margin, h - margin + 16.0),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-size="11" text-anchor="{anchor}">{v:.4}</text>"#
        );
    }
    for (v, y) in [(y0, h - margin), (y1, margin)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            margin - 4.0
        );
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for p in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(p.x),
                sy(p.mean_steps)
            );
        }
        if let Some((slope, intercept)) = s.fit() {
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                sx(x0),
                sy(slope * x0 + intercept),
                sx(x1),
                sy(slope * x1 + intercept)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            margin + 10.0,
            margin + 16.0 * (k as f64 + 1.0),
            s.policy
        );
    }
    svg.push_str("</svg>\n");
    svg
}
