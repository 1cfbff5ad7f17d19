//! Minimal SVG drawing: panels with linear axes, polylines, cells, markers.

use std::fmt::Write;

pub const PALETTE: [&str; 8] = [
    "#d62728", "#2ca02c", "#ff7f0e", "#1f77b4", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
pub const NEUTRAL: &str = "#9e9e9e";

/// Color for the `k`-th region (or series); `None` gives the neutral gray.
pub fn color(k: Option<usize>) -> &'static str {
    k.map(|k| PALETTE[k % PALETTE.len()]).unwrap_or(NEUTRAL)
}

fn f(x: f64) -> String {
    format!("{:.2}", x)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut s = Self {
            width,
            height,
            body: String::new(),
        };
        s.rect(0.0, 0.0, width, height, "#ffffff", None, 1.0);
        s
    }

    #[allow(clippy::too_many_arguments)]
    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>, opacity: f64) {
        let stroke = stroke
            .map(|c| format!(r#" stroke="{c}" stroke-width="1""#))
            .unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" fill-opacity="{}"{stroke}/>"#,
            f(x),
            f(y),
            f(w),
            f(h),
            f(opacity)
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, dash: Option<&str>, opacity: f64) {
        if pts.is_empty() {
            return;
        }
        let points: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", f(*x), f(*y))).collect();
        let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}" stroke-opacity="{}"{dash}/>"#,
            points.join(" "),
            f(width),
            f(opacity)
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>"#,
            f(x),
            f(y),
            f(r)
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{anchor}">{}</text>"#,
            f(x),
            f(y),
            f(size),
            escape(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{}</svg>\n",
            self.body,
            w = f(self.width),
            h = f(self.height)
        )
    }
}

/// A plotting area mapping data coordinates to pixels.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub xlim: (f64, f64),
    pub ylim: (f64, f64),
}

impl Panel {
    pub fn new(x: f64, y: f64, w: f64, h: f64, xlim: (f64, f64), ylim: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self {
            x,
            y,
            w,
            h,
            xlim: widen(xlim),
            ylim: widen(ylim),
        }
    }

    pub fn px(&self, v: f64) -> f64 {
        self.x + (v - self.xlim.0) / (self.xlim.1 - self.xlim.0) * self.w
    }

    pub fn py(&self, v: f64) -> f64 {
        self.y + self.h - (v - self.ylim.0) / (self.ylim.1 - self.ylim.0) * self.h
    }

    pub fn map(&self, pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
        pts.iter().map(|(a, b)| (self.px(*a), self.py(*b))).collect()
    }

    /// Frame, four ticks per axis, labels and title.
    pub fn axes(&self, svg: &mut Svg, xlabel: &str, ylabel: &str, title: &str) {
        svg.rect(self.x, self.y, self.w, self.h, "none", Some("#000000"), 0.0);
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = self.xlim.0 + t * (self.xlim.1 - self.xlim.0);
            let yv = self.ylim.0 + t * (self.ylim.1 - self.ylim.0);
            let (xp, yp) = (self.px(xv), self.py(yv));
            svg.polyline(
                &[(xp, self.y + self.h), (xp, self.y + self.h + 4.0)],
                "#000000",
                1.0,
                None,
                1.0,
            );
            svg.text(xp, self.y + self.h + 15.0, 10.0, "middle", &tick(xv));
            svg.polyline(&[(self.x - 4.0, yp), (self.x, yp)], "#000000", 1.0, None, 1.0);
            svg.text(self.x - 6.0, yp + 3.0, 10.0, "end", &tick(yv));
        }
        svg.text(self.x + self.w / 2.0, self.y + self.h + 30.0, 11.0, "middle", xlabel);
        let (lx, ly) = (self.x - 38.0, self.y + self.h / 2.0);
        let _ = writeln!(
            svg.body,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
            f(lx),
            f(ly),
            f(lx),
            f(ly),
            escape(ylabel)
        );
        svg.text(self.x + self.w / 2.0, self.y - 8.0, 12.0, "middle", title);
    }

    pub fn hline(&self, svg: &mut Svg, y: f64, stroke: &str, dash: Option<&str>) {
        if y >= self.ylim.0 && y <= self.ylim.1 {
            svg.polyline(
                &[(self.x, self.py(y)), (self.x + self.w, self.py(y))],
                stroke,
                1.0,
                dash,
                1.0,
            );
        }
    }

    pub fn vline(&self, svg: &mut Svg, x: f64, stroke: &str, dash: Option<&str>) {
        if x >= self.xlim.0 && x <= self.xlim.1 {
            svg.polyline(
                &[(self.px(x), self.y), (self.px(x), self.y + self.h)],
                stroke,
                1.0,
                dash,
                1.0,
            );
        }
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Small legend of colored swatches starting at `(x, y)`.
pub fn legend(svg: &mut Svg, x: f64, y: f64, items: &[(String, &str)]) {
    for (k, (label, c)) in items.iter().enumerate() {
        let yy = y + 14.0 * k as f64;
        svg.rect(x, yy - 8.0, 10.0, 10.0, c, None, 0.9);
        svg.text(x + 14.0, yy + 1.0, 10.0, "start", label);
    }
}
