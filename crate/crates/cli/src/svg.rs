//! Static SVG rendering of a 2D solution.

use std::fmt::Write as _;
use sumradii::combine::Residual;
use sumradii::metric::{Ball, Instance};
use sumradii::rat::to_f64;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)], pad: f64) -> Frame {
        let min_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - pad;
        let max_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) + pad;
        let min_y = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - pad;
        let max_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + pad;
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Frame { min_x, min_y, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.min_x) * self.scale
    }

    // SVG y grows downward.
    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - (v - self.min_y) * self.scale
    }
}

/// Andrew's monotone chain.
fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn render(inst: &Instance, coords: &[Vec<f64>], solution: &Residual, guess: &[Ball]) -> String {
    let at = |i: usize| {
        let c = &coords[inst.origin(i)[0]];
        (c[0], c[1])
    };
    let pts: Vec<(f64, f64)> = (0..inst.n()).map(at).collect();
    let pad = match solution {
        Residual::Balls(b) => b.iter().chain(guess).map(|b| to_f64(&b.radius)).fold(0.0, f64::max),
        Residual::Clusters(_) => guess.iter().map(|b| to_f64(&b.radius)).fold(0.0, f64::max),
    };
    let f = Frame::fit(&pts, pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let circle = |out: &mut String, b: &Ball, color: &str, dash: &str| {
        let (x, y) = at(b.center);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            f.x(x),
            f.y(y),
            (to_f64(&b.radius) * f.scale).max(3.0)
        );
    };
    match solution {
        Residual::Balls(balls) => {
            for (t, b) in balls.iter().enumerate() {
                circle(&mut out, b, PALETTE[t % PALETTE.len()], "");
            }
        }
        Residual::Clusters(clusters) => {
            for (t, c) in clusters.iter().enumerate() {
                let color = PALETTE[t % PALETTE.len()];
                let h = hull(c.iter().map(|&i| at(i)).collect());
                let path: Vec<String> = h.iter().map(|p| format!("{:.2},{:.2}", f.x(p.0), f.y(p.1))).collect();
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="6" stroke-linejoin="round"/>"#,
                    path.join(" ")
                );
            }
        }
    }
    for b in guess {
        circle(&mut out, b, "black", r#" stroke-dasharray="6 4""#);
    }
    for (i, p) in pts.iter().enumerate() {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, f.x(p.0), f.y(p.1));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="monospace">{i}</text>"#,
            f.x(p.0) + 5.0,
            f.y(p.1) - 5.0
        );
    }
    out.push_str("</svg>\n");
    out
}
