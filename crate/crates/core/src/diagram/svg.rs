use std::fmt::Write;

use super::{FaceColor, KnotDiagram};
use crate::geom::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Width and height of the drawing in pixels.
    pub size: f64,
    pub stroke_width: f64,
    /// Fill every face with its chessboard color.
    pub faces: bool,
    /// Points (in diagram coordinates) marked with a circle.
    pub marks: Vec<Vec2>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self { size: 480.0, stroke_width: 2.0, faces: false, marks: Vec::new() }
    }
}

struct Canvas {
    lo: Vec2,
    hi: Vec2,
    scale: f64,
    margin: f64,
}

impl Canvas {
    fn map(&self, p: &Vec2) -> (f64, f64) {
        (self.margin + (p.x - self.lo.x) * self.scale, self.margin + (self.hi.y - p.y) * self.scale)
    }

    fn path(&self, pts: &[Vec2], close: bool) -> String {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(p);
            let _ = write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" });
        }
        if close {
            d.push('Z');
        }
        d.trim_end().to_string()
    }
}

/// Arclength parametrization of the projected closed curve.
struct Param<'a> {
    pts: &'a [Vec2],
    cum: Vec<f64>,
    total: f64,
}

impl<'a> Param<'a> {
    fn new(pts: &'a [Vec2]) -> Self {
        let n = pts.len();
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..n {
            acc += (pts[(i + 1) % n] - pts[i]).norm();
            cum.push(acc);
        }
        Self { pts, cum, total: acc }
    }

    fn at_position(&self, pos: f64) -> f64 {
        let e = (pos.floor() as usize).min(self.pts.len() - 1);
        self.cum[e] + (pos - e as f64) * (self.cum[e + 1] - self.cum[e])
    }

    fn point(&self, s: f64) -> Vec2 {
        let s = s.rem_euclid(self.total);
        let e = (self.cum.partition_point(|&c| c <= s) - 1).min(self.pts.len() - 1);
        let n = self.pts.len();
        let len = self.cum[e + 1] - self.cum[e];
        let t = if len > 0.0 { (s - self.cum[e]) / len } else { 0.0 };
        self.pts[e] + (self.pts[(e + 1) % n] - self.pts[e]) * t
    }

    /// Points of the curve from arclength `a` to `b > a`, including the
    /// vertices strictly between them.
    fn piece(&self, a: f64, b: f64) -> Vec<Vec2> {
        let n = self.pts.len();
        let mut out = vec![self.point(a)];
        for lap in 0..2 {
            for i in 0..n {
                let s = self.cum[i] + lap as f64 * self.total;
                if s > a && s < b {
                    out.push(self.pts[i]);
                }
            }
        }
        out.push(self.point(b));
        out
    }
}

/// SVG 1.1 drawing of the diagram. The strand is split at every crossing
/// passage, with a gap on both sides of each undercrossing.
pub fn render_svg(d: &KnotDiagram, style: &SvgStyle) -> String {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in &d.points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let extent = (hi - lo).max().max(1e-300);
    let margin = 0.05 * style.size;
    let canvas = Canvas { lo, hi, scale: (style.size - 2.0 * margin) / extent, margin };
    let width = 2.0 * margin + (hi.x - lo.x) * canvas.scale;
    let height = 2.0 * margin + (hi.y - lo.y) * canvas.scale;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" data-crossings="{}" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#,
        d.crossing_count()
    );

    if style.faces {
        for (f, face) in d.faces.iter().enumerate() {
            let fill = match face.color {
                FaceColor::White => "#f7f7f2",
                FaceColor::Black => "#8c9bb0",
            };
            let path = if face.bounded {
                canvas.path(&face.polygon, true)
            } else {
                let frame = format!("M0 0 L{width:.3} 0 L{width:.3} {height:.3} L0 {height:.3} Z ");
                frame + &canvas.path(&face.polygon, true)
            };
            let _ = writeln!(
                out,
                r#"  <path class="face" data-face="{f}" fill="{fill}" fill-rule="evenodd" stroke="none" d="{path}"/>"#
            );
        }
    }

    let param = Param::new(&d.points);
    let mut passages: Vec<(f64, bool)> = d
        .crossings
        .iter()
        .flat_map(|c| {
            let (over, under) = c.positions();
            [(param.at_position(over), false), (param.at_position(under), true)]
        })
        .collect();
    passages.sort_by(|a, b| a.0.total_cmp(&b.0));
    let stroke = format!(
        r##"fill="none" stroke="#1b1f24" stroke-width="{:.3}" stroke-linecap="round" stroke-linejoin="round""##,
        style.stroke_width
    );
    if passages.is_empty() {
        let _ = writeln!(out, r#"  <path class="strand" {stroke} d="{}"/>"#, canvas.path(&d.points, true));
    } else {
        let m = passages.len();
        let min_gap = (0..m)
            .map(|k| {
                let next = if k + 1 == m { passages[0].0 + param.total } else { passages[k + 1].0 };
                next - passages[k].0
            })
            .fold(f64::INFINITY, f64::min);
        let gap = (0.012 * extent).min(0.3 * min_gap);
        for k in 0..m {
            let (s0, under0) = passages[k];
            let (mut s1, under1) = passages[(k + 1) % m];
            if k + 1 == m {
                s1 += param.total;
            }
            let a = if under0 { s0 + gap } else { s0 };
            let b = if under1 { s1 - gap } else { s1 };
            let _ = writeln!(out, r#"  <path class="strand" {stroke} d="{}"/>"#, canvas.path(&param.piece(a, b), false));
        }
    }

    for p in &style.marks {
        let (x, y) = canvas.map(p);
        let _ = writeln!(
            out,
            r##"  <circle class="mark" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="#c0392b"/>"##,
            2.0 * style.stroke_width
        );
    }
    out.push_str("</svg>\n");
    out
}
