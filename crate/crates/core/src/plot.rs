//! SVG pictures of a single planar factor.

use std::fmt::Write as _;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const BRANCH_SAMPLES: usize = 256;
const REGION_SAMPLES: usize = 256;

/// Visible region `[x_min, x_max] x [y_min, y_max]` in factor coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) && x_min < x_max && y_min < y_max;
        if !ok {
            return Err(Error::InvalidParameter("window needs finite bounds with min < max".into()));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    fn contains_y(&self, y: f64) -> bool {
        self.y_min <= y && y <= self.y_max
    }
}

/// Formats with at most six significant digits and no trailing zeros.
pub fn fmt6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Window extending one sequence span beyond `[t_1, t_l]` on either side and
/// covering the corners and slice ends over `[t_1, t_l]`.
pub fn default_window(d: &DomainSpec<f64>, factor: usize) -> Result<Window> {
    let f = d
        .factors()
        .get(factor)
        .ok_or_else(|| Error::InvalidParameter(format!("factor index {factor} out of range")))?;
    let span = d.span();
    let (t1, tl) = (d.t_first(), d.t_last());
    let mut reach = span;
    for c in &f.corners {
        reach = reach.max(c.height.abs());
    }
    for i in 0..=64 {
        let x1 = t1 + span * i as f64 / 64.0;
        if let Some(iv) = f.interval_at(x1) {
            for v in [iv.lo, iv.hi] {
                if v.is_finite() {
                    reach = reach.max(v.abs());
                }
            }
        }
    }
    let y = (1.25 * reach).min(4.0 * span);
    Window::new(t1 - span, tl + span, -y, y)
}

struct Frame {
    w: Window,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.w.x_min) / (self.w.x_max - self.w.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.w.y_min) / (self.w.y_max - self.w.y_min) * (HEIGHT - 2.0 * MARGIN)
    }

    fn pt(&self, x: f64, y: f64) -> String {
        format!("{},{}", fmt6(self.px(x)), fmt6(self.py(y)))
    }
}

/// Renders factor `factor`: branches, shaded slices over `[t_1, t_l]`,
/// dashed asymptotes, corner markers and ticks at each `t_j`.
pub fn render_factor_svg(d: &DomainSpec<f64>, factor: usize, window: Option<Window>) -> Result<String> {
    let f = d
        .factors()
        .get(factor)
        .ok_or_else(|| Error::InvalidParameter(format!("factor index {factor} out of range")))?;
    let w = match window {
        Some(w) => w,
        None => default_window(d, factor)?,
    };
    let fr = Frame { w };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        WIDTH, HEIGHT, WIDTH, HEIGHT
    );
    out.push_str(
        "<style>.region{fill:#9ecae1;fill-opacity:0.5;stroke:none}.branch{fill:none;stroke:#08519c;stroke-width:2}\
.asymptote{stroke:#969696;stroke-width:1;stroke-dasharray:6 4}.corner{fill:#cb181d}.axis{stroke:#000;stroke-width:1}\
.tick{stroke:#000;stroke-width:1}text{font-family:sans-serif;font-size:12px}</style>\n",
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20">{} factor in (x1, x{})</text>"#,
        fmt6(MARGIN),
        f.kind.as_str(),
        f.axis + 1
    );

    // slices of the factor over the projection [t_1, t_l] of the domain
    let (t1, tl) = (d.t_first().max(w.x_min), d.t_last().min(w.x_max));
    if t1 < tl {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for i in 0..=REGION_SAMPLES {
            let x1 = t1 + (tl - t1) * i as f64 / REGION_SAMPLES as f64;
            if let Some(iv) = f.interval_at(x1) {
                let hi = iv.hi.min(w.y_max).max(w.y_min);
                let lo = iv.lo.max(w.y_min).min(w.y_max);
                upper.push(fr.pt(x1, hi));
                lower.push(fr.pt(x1, lo));
            }
        }
        if !upper.is_empty() {
            lower.reverse();
            let _ = writeln!(
                out,
                r#"<path class="region" d="M{} L{} Z"/>"#,
                upper.join(" L"),
                lower.join(" L")
            );
        }
    }

    let mut asymptotes: Vec<(bool, f64)> = Vec::new();
    for h in &f.hypersurfaces {
        for a in [(true, h.branch.a), (false, h.branch.b)] {
            if !asymptotes.contains(&a) {
                asymptotes.push(a);
            }
        }
    }
    for (vertical, v) in asymptotes {
        if vertical && w.x_min < v && v < w.x_max {
            let _ = writeln!(
                out,
                r#"<line class="asymptote" x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
                fmt6(fr.px(v)),
                fmt6(fr.py(w.y_max)),
                fmt6(fr.py(w.y_min))
            );
        } else if !vertical && w.contains_y(v) {
            let _ = writeln!(
                out,
                r#"<line class="asymptote" x1="{0}" y1="{1}" x2="{2}" y2="{1}"/>"#,
                fmt6(fr.px(w.x_min)),
                fmt6(fr.py(v)),
                fmt6(fr.px(w.x_max))
            );
        }
    }

    for h in &f.hypersurfaces {
        let s = h.branch.support();
        let lo = s.lo.max(w.x_min);
        let hi = s.hi.min(w.x_max);
        let mut d_attr = String::new();
        let mut pen_down = false;
        if lo < hi {
            for i in 0..BRANCH_SAMPLES {
                let u = lo + (hi - lo) * (i as f64 + 0.5) / BRANCH_SAMPLES as f64;
                match h.branch.height(u) {
                    Some(v) if w.contains_y(v) => {
                        d_attr.push(if pen_down { 'L' } else { 'M' });
                        d_attr.push_str(&fr.pt(u, v));
                        d_attr.push(' ');
                        pen_down = true;
                    }
                    _ => pen_down = false,
                }
            }
        }
        let _ = writeln!(
            out,
            r#"<path class="branch" d="{}" data-side="{}"/>"#,
            d_attr.trim_end(),
            match h.branch.side {
                crate::algebra::Side::Plus => "plus",
                crate::algebra::Side::Minus => "minus",
            }
        );
    }

    let y0 = 0.0f64.max(w.y_min).min(w.y_max);
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{0}" y1="{1}" x2="{2}" y2="{1}"/>"#,
        fmt6(fr.px(w.x_min)),
        fmt6(fr.py(y0)),
        fmt6(fr.px(w.x_max))
    );
    let base = HEIGHT - MARGIN;
    for &t in d.t() {
        if w.x_min <= t && t <= w.x_max {
            let x = fmt6(fr.px(t));
            let _ = writeln!(
                out,
                r#"<line class="tick" x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#,
                fmt6(base),
                fmt6(base + 6.0)
            );
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#,
                fmt6(base + 20.0),
                fmt6(t)
            );
        }
    }

    for c in &f.corners {
        if w.x_min <= c.x1 && c.x1 <= w.x_max && w.contains_y(c.height) {
            let _ = writeln!(
                out,
                r#"<circle class="corner" cx="{}" cy="{}" r="4"/>"#,
                fmt6(fr.px(c.x1)),
                fmt6(fr.py(c.height))
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
