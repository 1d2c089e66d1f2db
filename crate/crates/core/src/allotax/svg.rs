//! Deterministic SVG rendering of an [`AllotaxSpec`].
//!
//! Layout, left to right: the rank-rank histogram rotated 45° into a diamond
//! (rank 1 in both systems at the top; types leaning toward system B to the
//! left of the center line, toward system A to the right), the three balance
//! bars, and the divergence shift list. All coordinates are printed with two
//! decimals, so output bytes depend only on `(spec, style)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::histogram::bin_lower_rank;
use super::AllotaxSpec;
use crate::rtd::Direction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub font_family: String,
    pub font_size: f64,
    pub background: String,
    pub text_color: String,
    pub line_color: String,
    /// Color stops for the log-density ramp, lowest density first.
    pub ramp: Vec<String>,
    pub color_a: String,
    pub color_b: String,
    /// Overrides the label-selection seed when set.
    pub seed: Option<u64>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            width: 1400.0,
            height: 820.0,
            font_family: "Helvetica, Arial, sans-serif".into(),
            font_size: 11.0,
            background: "#ffffff".into(),
            text_color: "#222222".into(),
            line_color: "#888888".into(),
            // viridis
            ramp: [
                "#440154", "#472d7b", "#3b528b", "#2c728e", "#21918c", "#28ae80", "#5ec962",
                "#addc30", "#fde725",
            ]
            .map(String::from)
            .to_vec(),
            color_a: "#d95f02".into(),
            color_b: "#7570b3".into(),
            seed: None,
        }
    }
}

fn parse_hex(c: &str) -> (f64, f64, f64) {
    let h = c.trim_start_matches('#');
    let ch = |k: usize| {
        h.get(k..k + 2)
            .and_then(|s| u8::from_str_radix(s, 16).ok())
            .unwrap_or(0) as f64
    };
    if h.len() == 6 {
        (ch(0), ch(2), ch(4))
    } else {
        (0.0, 0.0, 0.0)
    }
}

/// Color at `t` ∈ [0, 1] along the ramp, linearly interpolated in RGB.
pub fn ramp_color(ramp: &[String], t: f64) -> String {
    match ramp.len() {
        0 => return "#000000".into(),
        1 => return ramp[0].clone(),
        _ => {}
    }
    let t = t.clamp(0.0, 1.0) * (ramp.len() - 1) as f64;
    let k = (t.floor() as usize).min(ramp.len() - 2);
    let f = t - k as f64;
    let (r0, g0, b0) = parse_hex(&ramp[k]);
    let (r1, g1, b1) = parse_hex(&ramp[k + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(r0, r1), mix(g0, g1), mix(b0, b1))
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn fmt_rank(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{}", r as u64)
    } else {
        format!("{r:.1}")
    }
}

struct Diamond {
    cx: f64,
    top: f64,
    half: f64,
}

impl Diamond {
    /// Screen position of bin-space point `(u, v)`: u along system A, v along B.
    fn at(&self, u: f64, v: f64) -> (f64, f64) {
        (
            self.cx + (v - u) * self.half,
            self.top + (u + v) * self.half,
        )
    }
}

/// Renders the allotaxonograph. `metadata` lines go into a leading XML
/// comment.
pub fn render_svg(spec: &AllotaxSpec, style: &Style, metadata: &[String]) -> String {
    let mut s = String::new();
    let (w, h) = (style.width, style.height);
    let fs = style.font_size;
    if !metadata.is_empty() {
        s.push_str("<!--\n");
        for m in metadata {
            let _ = writeln!(s, "  {}", m.replace("--", "- -"));
        }
        s.push_str("-->\n");
    }
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.2}" height="{h:.2}" viewBox="0 0 {w:.2} {h:.2}" font-family="{}" font-size="{fs:.2}" fill="{}">"#,
        escape_xml(&style.font_family),
        style.text_color
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="{}"/>"#,
        style.background
    );
    let la = escape_xml(&spec.label_a);
    let lb = escape_xml(&spec.label_b);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.2}" y="{:.2}" font-size="{:.2}">{la} vs {lb}: rank-turbulence divergence, α = {:.4}, D (unnormalized) = {:.4}, {} types</text>"#,
        20.0,
        fs * 2.0,
        fs * 1.4,
        spec.alpha,
        spec.total_divergence,
        spec.lexicon_size
    );

    let panel_top = fs * 4.5;
    let diamond_w = w * 0.56;
    let diamond_h = h - panel_top - fs * 3.0;
    histogram(&mut s, spec, style, diamond_w, panel_top, diamond_h);
    balance(&mut s, spec, style, w * 0.56, w * 0.67, panel_top);
    shift(
        &mut s,
        spec,
        style,
        w * 0.68,
        w - 20.0,
        panel_top,
        h - fs * 2.0,
    );
    s.push_str("</svg>\n");
    s
}

fn histogram(s: &mut String, spec: &AllotaxSpec, style: &Style, width: f64, top: f64, height: f64) {
    let grid = &spec.grid;
    let m = grid.side() as f64;
    let fs = style.font_size;
    let half = ((width - fs * 10.0) / 2.0).min((height - fs * 3.0) / 2.0) / m.max(1.0);
    let d = Diamond {
        cx: width / 2.0,
        top,
        half,
    };
    let _ = writeln!(s, r#"<g class="histogram">"#);
    let corners = [d.at(0.0, 0.0), d.at(0.0, m), d.at(m, m), d.at(m, 0.0)];
    let _ = writeln!(
        s,
        r#"<path class="frame" d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="none" stroke="{}" stroke-width="0.8"/>"#,
        corners[0].0,
        corners[0].1,
        corners[1].0,
        corners[1].1,
        corners[2].0,
        corners[2].1,
        corners[3].0,
        corners[3].1,
        style.line_color
    );
    let max = grid.max_count().max(1) as f64;
    for ((i, j), c) in grid.nonempty() {
        let t = if max > 1.0 {
            (c as f64).ln() / max.ln()
        } else {
            1.0
        };
        let (u, v) = (i as f64, j as f64);
        let p = [
            d.at(u, v),
            d.at(u, v + 1.0),
            d.at(u + 1.0, v + 1.0),
            d.at(u + 1.0, v),
        ];
        let _ = writeln!(
            s,
            r#"<path class="cell" data-i="{i}" data-j="{j}" data-count="{c}" d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="{}"/>"#,
            p[0].0,
            p[0].1,
            p[1].0,
            p[1].1,
            p[2].0,
            p[2].1,
            p[3].0,
            p[3].1,
            ramp_color(&style.ramp, t)
        );
    }
    let (bx, by) = d.at(m, m);
    let _ = writeln!(
        s,
        r#"<line class="center" x1="{:.2}" y1="{:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="{}" stroke-dasharray="4,3" stroke-width="0.8"/>"#,
        d.cx, d.top, style.line_color
    );
    // decade ticks along both upper edges
    let bpd = grid.bins_per_decade() as usize;
    let _ = writeln!(
        s,
        r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle" data-rank="1">10^0</text>"#,
        d.cx,
        d.top - fs * 0.4
    );
    let mut k = bpd.max(1);
    while k as f64 <= m {
        let rank = bin_lower_rank(k, grid.bins_per_decade());
        let label = format!("10^{}", k / bpd.max(1));
        let (xa, ya) = d.at(k as f64, 0.0);
        let (xb, yb) = d.at(0.0, k as f64);
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{ya:.2}" text-anchor="end" data-rank="{rank:.0}">{label}</text>"#,
            xa - fs * 0.5
        );
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{yb:.2}" text-anchor="start" data-rank="{rank:.0}">{label}</text>"#,
            xb + fs * 0.5
        );
        k += bpd.max(1);
    }
    let (lx, ly) = d.at(m / 2.0, 0.0);
    let (rx, ry) = d.at(0.0, m / 2.0);
    let _ = writeln!(
        s,
        r#"<text class="axis" x="{:.2}" y="{:.2}" text-anchor="end" fill="{}">rank in {} →</text>"#,
        lx - fs * 3.0,
        ly - fs,
        style.color_a,
        escape_xml(&spec.label_a)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis" x="{:.2}" y="{:.2}" text-anchor="start" fill="{}">← rank in {}</text>"#,
        rx + fs * 3.0,
        ry - fs,
        style.color_b,
        escape_xml(&spec.label_b)
    );
    let _ = writeln!(
        s,
        r#"<text class="side" x="{:.2}" y="{:.2}" text-anchor="end" fill="{}">← more in {}</text>"#,
        bx - fs,
        by + fs * 1.5,
        style.color_b,
        escape_xml(&spec.label_b)
    );
    let _ = writeln!(
        s,
        r#"<text class="side" x="{:.2}" y="{:.2}" text-anchor="start" fill="{}">more in {} →</text>"#,
        bx + fs,
        by + fs * 1.5,
        style.color_a,
        escape_xml(&spec.label_a)
    );
    for label in &spec.labels {
        let (i, j) = label.cell;
        let (x, y) = d.at(i as f64 + 0.5, j as f64 + 0.5);
        let (anchor, dx) = match label.side {
            Direction::B => ("end", -fs * 0.6),
            _ => ("start", fs * 0.6),
        };
        let _ = writeln!(
            s,
            r#"<text class="bin-label" x="{:.2}" y="{:.2}" text-anchor="{anchor}" font-size="{:.2}">{}</text>"#,
            x + dx,
            y + fs * 0.3,
            fs * 0.85,
            escape_xml(&label.ty)
        );
    }
    // density legend
    let lx0 = fs;
    let ly0 = top + height - fs * 1.5;
    let steps = 20;
    let seg = fs * 0.6;
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{:.2}" y="{ly0:.2}" width="{seg:.2}" height="{:.2}" fill="{}"/>"#,
            lx0 + k as f64 * seg,
            fs,
            ramp_color(&style.ramp, t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{lx0:.2}" y="{:.2}">types per bin: 1 … {}</text>"#,
        ly0 - fs * 0.4,
        grid.max_count()
    );
    s.push_str("</g>\n");
}

fn balance(s: &mut String, spec: &AllotaxSpec, style: &Style, x0: f64, x1: f64, top: f64) {
    let fs = style.font_size;
    let center = (x0 + x1) / 2.0;
    let half = (x1 - x0) / 2.0;
    let _ = writeln!(s, r#"<g class="balance">"#);
    let _ = writeln!(
        s,
        r#"<text x="{center:.2}" y="{top:.2}" text-anchor="middle" font-weight="bold">Balances</text>"#
    );
    let names = ["total count", "all types", "exclusive types"];
    for (k, ((_, (pa, pb)), name)) in spec.balance.rows().iter().zip(names).enumerate() {
        let y = top + fs * (2.0 + 4.2 * k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{center:.2}" y="{y:.2}" text-anchor="middle">{name}</text>"#
        );
        let by = y + fs * 0.5;
        let wb = half * pb / 100.0;
        let wa = half * pa / 100.0;
        let _ = writeln!(
            s,
            r#"<rect class="bar-b" x="{:.2}" y="{by:.2}" width="{wb:.2}" height="{:.2}" fill="{}"/>"#,
            center - wb,
            fs,
            style.color_b
        );
        let _ = writeln!(
            s,
            r#"<rect class="bar-a" x="{center:.2}" y="{by:.2}" width="{wa:.2}" height="{:.2}" fill="{}"/>"#,
            fs, style.color_a
        );
        let ty = by + fs * 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ty:.2}" text-anchor="end" font-size="{:.2}">{pb:.1}%</text>"#,
            center - fs * 0.3,
            fs * 0.85
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ty:.2}" text-anchor="start" font-size="{:.2}">{pa:.1}%</text>"#,
            center + fs * 0.3,
            fs * 0.85
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{center:.2}" y1="{:.2}" x2="{center:.2}" y2="{:.2}" stroke="{}" stroke-width="0.8"/>"#,
        top + fs * 2.2,
        top + fs * 13.6,
        style.line_color
    );
    s.push_str("</g>\n");
}

#[allow(clippy::too_many_arguments)]
fn shift(
    s: &mut String,
    spec: &AllotaxSpec,
    style: &Style,
    x0: f64,
    x1: f64,
    top: f64,
    bottom: f64,
) {
    let fs = style.font_size;
    let center = (x0 + x1) / 2.0;
    let half = (x1 - x0) / 2.0 - fs * 9.0;
    let _ = writeln!(s, r#"<g class="shift">"#);
    let _ = writeln!(
        s,
        r#"<text x="{center:.2}" y="{top:.2}" text-anchor="middle" font-weight="bold">Top {} types by divergence contribution</text>"#,
        spec.shift.len()
    );
    let n = spec.shift.len().max(1) as f64;
    let row = ((bottom - top - fs * 2.0) / n).min(fs * 1.6);
    let max = spec
        .shift
        .iter()
        .map(|e| e.contribution)
        .fold(0.0, f64::max);
    for (k, e) in spec.shift.iter().enumerate() {
        let y = top + fs * 1.5 + row * k as f64;
        let len = if max > 0.0 {
            half * e.contribution / max
        } else {
            0.0
        };
        let (x, color, anchor, tx) = match e.direction {
            Direction::B => (center - len, &style.color_b, "end", center - len - fs * 0.3),
            _ => (center, &style.color_a, "start", center + len + fs * 0.3),
        };
        let _ = writeln!(
            s,
            r#"<rect class="shift-bar" x="{x:.2}" y="{y:.2}" width="{len:.2}" height="{:.2}" fill="{color}"/>"#,
            row * 0.75
        );
        let _ = writeln!(
            s,
            r#"<text class="shift-label" x="{tx:.2}" y="{:.2}" text-anchor="{anchor}" font-size="{:.2}">{} ({} ↔ {})</text>"#,
            y + row * 0.6,
            (row * 0.7).min(fs),
            escape_xml(&e.ty),
            fmt_rank(e.rank_a),
            fmt_rank(e.rank_b)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{center:.2}" y1="{:.2}" x2="{center:.2}" y2="{:.2}" stroke="{}" stroke-width="0.8"/>"#,
        top + fs,
        top + fs * 1.5 + row * n,
        style.line_color
    );
    s.push_str("</g>\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_endpoints() {
        let ramp: Vec<String> = vec!["#000000".into(), "#ffffff".into()];
        assert_eq!(ramp_color(&ramp, 0.0), "#000000");
        assert_eq!(ramp_color(&ramp, 1.0), "#ffffff");
        assert_eq!(ramp_color(&ramp, 0.5), "#808080");
        assert_eq!(ramp_color(&ramp, 7.0), "#ffffff");
    }

    #[test]
    fn escapes() {
        assert_eq!(escape_xml("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
