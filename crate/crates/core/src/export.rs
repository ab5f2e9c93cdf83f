//! Portrait files: a CSV table with one row per root and a static SVG
//! scatter with one glyph per CSV row.

use std::fmt::Write as _;

use crate::cut::{Doublet, RootPortrait};
use crate::kernel::{fmt_real, BigComplex};

pub const CSV_HEADER: &str = "kind,re,im,plane,degree";
pub const CSV_DIGITS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Pole,
    Zero,
    DoubletPole,
    DoubletZero,
}

impl RootKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RootKind::Pole => "pole",
            RootKind::Zero => "zero",
            RootKind::DoubletPole => "doublet_pole",
            RootKind::DoubletZero => "doublet_zero",
        }
    }

    fn is_pole(self) -> bool {
        matches!(self, RootKind::Pole | RootKind::DoubletPole)
    }
}

/// Rows in output order: clean poles, clean zeros, then doublets pole-first.
pub fn rows<'a>(clean: &'a RootPortrait, doublets: &'a [Doublet]) -> Vec<(RootKind, &'a BigComplex)> {
    let mut out: Vec<(RootKind, &BigComplex)> = Vec::with_capacity(clean.len() + 2 * doublets.len());
    out.extend(clean.poles.iter().map(|r| (RootKind::Pole, r)));
    out.extend(clean.zeros.iter().map(|r| (RootKind::Zero, r)));
    for d in doublets {
        out.push((RootKind::DoubletPole, &d.pole));
        out.push((RootKind::DoubletZero, &d.zero));
    }
    out
}

pub fn portrait_csv(clean: &RootPortrait, doublets: &[Doublet]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (kind, r) in rows(clean, doublets) {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            kind.as_str(),
            fmt_real(r.re(), CSV_DIGITS),
            fmt_real(r.im(), CSV_DIGITS),
            clean.plane,
            clean.degree
        );
    }
    s
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const GLYPH: f64 = 3.5;

/// Poles drawn as crosses, zeros as circles; doublet members are drawn in
/// grey. Every glyph carries `class="root ..."`.
pub fn portrait_svg(clean: &RootPortrait, doublets: &[Doublet], title: &str) -> String {
    let rows = rows(clean, doublets);
    let pts: Vec<(RootKind, f64, f64)> = rows
        .iter()
        .map(|(k, r)| (*k, r.re().to_f64(), r.im().to_f64()))
        .collect();
    let finite = || pts.iter().filter(|p| p.1.is_finite() && p.2.is_finite());
    let mut half = finite().map(|p| p.1.abs().max(p.2.abs())).fold(0.0, f64::max);
    if half == 0.0 {
        half = 1.0;
    }
    half *= 1.05;
    let scale = (SIZE - 2.0 * MARGIN) / (2.0 * half);
    let sx = |x: f64| MARGIN + (x + half) * scale;
    let sy = |y: f64| MARGIN + (half - y) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{:.1}" font-family="sans-serif" font-size="14">{}</text>"#,
        MARGIN * 0.6,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<g stroke="#999" stroke-width="1"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"##,
        sx(-half),
        sy(0.0),
        sx(half),
        sy(0.0),
        sx(0.0),
        sy(-half),
        sx(0.0),
        sy(half)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
        SIZE - MARGIN,
        SIZE - MARGIN * 0.3,
        format_args!("Re in [{:.3}, {:.3}], plane {}, degree {}", -half, half, clean.plane, clean.degree)
    );
    for (kind, x, y) in pts {
        let colour = match kind {
            RootKind::Pole => "#c0392b",
            RootKind::Zero => "#2471a3",
            _ => "#888",
        };
        let (cx, cy) = if x.is_finite() && y.is_finite() {
            (sx(x), sy(y))
        } else {
            (-10.0, -10.0)
        };
        if kind.is_pole() {
            let _ = writeln!(
                s,
                r#"<path class="root {}" d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="{colour}" stroke-width="1.2"/>"#,
                kind.as_str(),
                cx - GLYPH,
                cy - GLYPH,
                cx + GLYPH,
                cy + GLYPH,
                cx - GLYPH,
                cy + GLYPH,
                cx + GLYPH,
                cy - GLYPH
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle class="root {}" cx="{cx:.2}" cy="{cy:.2}" r="{GLYPH}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
                kind.as_str()
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
