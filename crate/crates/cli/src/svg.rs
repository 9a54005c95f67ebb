//! Minimal deterministic SVG writer. Coordinates are mapped to a fixed
//! canvas and printed with three decimals, so identical inputs give
//! identical bytes.

use std::fmt::Write;

use planefix::geometry::{BBox, Point, Raster};

const WIDTH: f64 = 800.0;
const PAD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Curve,
    Image,
    Region,
    Link,
    RayPlus,
    RayI,
    RayMinus,
    External,
    Chord,
    Gap,
    Edge,
    Exit,
}

impl Style {
    fn attrs(self) -> &'static str {
        match self {
            Style::Curve => r##"fill="none" stroke="#000000" stroke-width="1.5""##,
            Style::Image => r##"fill="none" stroke="#1f77b4" stroke-width="1" stroke-dasharray="6 3""##,
            Style::Region => r##"fill="#d9d9d9" stroke="#7f7f7f" stroke-width="1""##,
            Style::Link => r##"fill="none" stroke="#2ca02c" stroke-width="2""##,
            Style::RayPlus => r##"fill="none" stroke="#d62728" stroke-width="1.5""##,
            Style::RayI => r##"fill="none" stroke="#9467bd" stroke-width="1.5" stroke-dasharray="8 4""##,
            Style::RayMinus => r##"fill="none" stroke="#8c564b" stroke-width="1.5" stroke-dasharray="2 3""##,
            Style::External => r##"fill="none" stroke="#ff7f0e" stroke-width="1.2""##,
            Style::Chord => r##"fill="none" stroke="#1f77b4" stroke-width="1.2""##,
            Style::Gap => r##"fill="#c6dbef" stroke="#1f77b4" stroke-width="1""##,
            Style::Edge => r##"fill="none" stroke="#333333" stroke-width="2""##,
            Style::Exit => r##"fill="#fdd0a2" stroke="#e6550d" stroke-width="1""##,
        }
    }
}

enum Item {
    Path { pts: Vec<Point>, closed: bool, style: Style },
    Marker { p: Point, color: &'static str, label: Option<String> },
    Cells { raster: Raster, color: &'static str },
}

pub struct Figure {
    title: String,
    bbox: Option<BBox>,
    items: Vec<Item>,
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn new(title: impl Into<String>) -> Self {
        Figure { title: title.into(), bbox: None, items: Vec::new() }
    }

    /// Fix the visible window instead of fitting all items.
    pub fn with_window(mut self, b: BBox) -> Self {
        self.bbox = Some(b);
        self
    }

    pub fn path(&mut self, pts: &[Point], closed: bool, style: Style) {
        let pts: Vec<Point> = pts.iter().copied().filter(|p| p.is_finite()).collect();
        if !pts.is_empty() {
            self.items.push(Item::Path { pts, closed, style });
        }
    }

    pub fn marker(&mut self, p: Point, color: &'static str, label: Option<String>) {
        if p.is_finite() {
            self.items.push(Item::Marker { p, color, label });
        }
    }

    pub fn cells(&mut self, raster: Raster, color: &'static str) {
        self.items.push(Item::Cells { raster, color });
    }

    fn extent(&self) -> BBox {
        if let Some(b) = self.bbox {
            return b;
        }
        let mut pts: Vec<Point> = Vec::new();
        for it in &self.items {
            match it {
                Item::Path { pts: p, .. } => pts.extend_from_slice(p),
                Item::Marker { p, .. } => pts.push(*p),
                Item::Cells { raster, .. } => {
                    if let Some(b) = raster.occupied_bbox() {
                        pts.extend_from_slice(&b.corners());
                    }
                }
            }
        }
        let b = BBox::of_points(&pts).unwrap_or_else(|| BBox::square(Point::ORIGIN, 1.0));
        b.expand(0.05 * b.diameter().max(1e-6))
    }

    pub fn render(&self) -> String {
        let b = self.extent();
        let span = b.width().max(b.height()).max(1e-12);
        let scale = (WIDTH - 2.0 * PAD) / span;
        let w = b.width() * scale + 2.0 * PAD;
        let h = b.height() * scale + 2.0 * PAD;
        let map = |p: Point| (PAD + (p.x - b.min.x) * scale, PAD + (b.max.y - p.y) * scale);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            num(w),
            num(h),
            num(w),
            num(h)
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, num(w), num(h));
        for it in &self.items {
            match it {
                Item::Path { pts, closed, style } => {
                    let mut d = String::new();
                    for (k, p) in pts.iter().enumerate() {
                        let (x, y) = map(*p);
                        let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { " L" }, num(x), num(y));
                    }
                    if *closed {
                        d.push_str(" Z");
                    }
                    let _ = writeln!(out, r#"<path d="{d}" {}/>"#, style.attrs());
                }
                Item::Marker { p, color, label } => {
                    let (x, y) = map(*p);
                    let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="4" fill="{color}"/>"#, num(x), num(y));
                    if let Some(l) = label {
                        let _ = writeln!(
                            out,
                            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}">{}</text>"#,
                            num(x + 6.0),
                            num(y - 6.0),
                            escape(l)
                        );
                    }
                }
                Item::Cells { raster, color } => {
                    // one rectangle per horizontal run of occupied cells
                    let s = raster.spec;
                    let mut d = String::new();
                    for j in 0..s.ny {
                        let mut i = 0;
                        while i < s.nx {
                            if !raster.get(i, j) {
                                i += 1;
                                continue;
                            }
                            let i0 = i;
                            while i < s.nx && raster.get(i, j) {
                                i += 1;
                            }
                            let lo = Point::new(s.origin.x + i0 as f64 * s.h, s.origin.y + (j + 1) as f64 * s.h);
                            let (x, y) = map(lo);
                            let rw = (i - i0) as f64 * s.h * scale;
                            let _ = write!(d, "M{} {}h{}v{}h{}Z", num(x), num(y), num(rw), num(s.h * scale), num(-rw));
                        }
                    }
                    if !d.is_empty() {
                        let _ = writeln!(out, r#"<path d="{d}" fill="{color}" stroke="none"/>"#);
                    }
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_stable() {
        let mut f = Figure::new("t");
        f.path(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)], false, Style::Curve);
        f.marker(Point::new(0.5, 0.5), "#000000", Some("+1".into()));
        let a = f.render();
        assert_eq!(a, f.render());
        assert!(a.starts_with("<svg"));
        assert!(a.contains("+1"));
        assert!(!a.contains("-0.000"));
    }
}
