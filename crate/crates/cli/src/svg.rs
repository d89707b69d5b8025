//! Minimal SVG writer with a fixed 800×600 viewBox. Coordinates are
//! rounded to two decimals so output is byte-stable.

use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
pub const MARGIN: f64 = 48.0;

/// Maps data coordinates into the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && y >= self.y.0 && y <= self.y.1
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub struct Svg {
    buf: String,
}

impl Default for Svg {
    fn default() -> Self {
        Self::new()
    }
}

impl Svg {
    pub fn new() -> Self {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        Svg { buf }
    }

    pub fn open_group(&mut self, class: &str) {
        let _ = writeln!(self.buf, "<g class=\"{}\">", escape(class));
    }

    pub fn close_group(&mut self) {
        self.buf.push_str("</g>\n");
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, class: &str, style: &str) {
        let _ = writeln!(
            self.buf,
            "<rect class=\"{}\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" {style}/>",
            escape(class)
        );
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), class: &str, style: &str) {
        let _ = writeln!(
            self.buf,
            "<line class=\"{}\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {style}/>",
            escape(class),
            a.0,
            a.1,
            b.0,
            b.1
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], class: &str, style: &str) {
        let mut s = String::with_capacity(pts.len() * 14);
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", p.0, p.1);
        }
        let _ = writeln!(self.buf, "<polyline class=\"{}\" points=\"{s}\" fill=\"none\" {style}/>", escape(class));
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], class: &str, style: &str) {
        let s: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", p.0, p.1)).collect();
        let _ = writeln!(self.buf, "<polygon class=\"{}\" points=\"{}\" {style}/>", escape(class), s.join(" "));
    }

    pub fn circle(&mut self, c: (f64, f64), r: f64, class: &str, style: &str) {
        let _ = writeln!(
            self.buf,
            "<circle class=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r:.2}\" {style}/>",
            escape(class),
            c.0,
            c.1
        );
    }

    pub fn text(&mut self, at: (f64, f64), anchor: &str, s: &str) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\">{}</text>",
            at.0,
            at.1,
            escape(s)
        );
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}
