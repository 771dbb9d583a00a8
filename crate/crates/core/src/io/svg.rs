//! Deterministic SVG 1.1 plots of profiles and phase portraits.
//!
//! The view box comes from the data bounds only and coordinates are printed
//! with a fixed number of decimals, so equal inputs give equal files.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write;

use crate::integrator::Trajectory;
use crate::phase::{CriticalPoint, PhasePortrait, SingularityKind};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale_x: f64,
    scale_y: f64,
    height: f64,
}

impl Frame {
    /// Maps `[xmin, xmax] x [ymin, ymax]` to a canvas of fixed width, with
    /// equal axis scales when `equal` is set.
    fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, equal: bool) -> Self {
        let dx = (xmax - xmin).max(1e-12);
        let dy = (ymax - ymin).max(1e-12);
        let scale_x = (WIDTH - 2.0 * MARGIN) / dx;
        let (scale_y, height) = if equal {
            (scale_x, dy * scale_x + 2.0 * MARGIN)
        } else {
            let h = 0.6 * WIDTH;
            ((h - 2.0 * MARGIN) / dy, h)
        };
        Self { x0: xmin, y0: ymax, scale_x, scale_y, height }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (MARGIN + (x - self.x0) * self.scale_x, MARGIN + (self.y0 - y) * self.scale_y)
    }
}

fn header(out: &mut String, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.2}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let _ = write!(out, r#"<polyline fill="none" {style} points=""#);
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    let _ = writeln!(out, r#""/>"#);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The profile curve in the `(x, z)` plane together with its mirror image,
/// i.e. the meridian section of the surface.
pub fn profile_svg(traj: &Trajectory, title: &str) -> String {
    let (mut xmax, mut zmin, mut zmax) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for st in &traj.samples {
        xmax = xmax.max(st.x);
        zmin = zmin.min(st.z);
        zmax = zmax.max(st.z);
    }
    let pad = 0.05 * (2.0 * xmax).max(zmax - zmin).max(1e-9);
    let frame = Frame::new(-xmax - pad, xmax + pad, zmin - pad, zmax + pad, true);
    let mut out = String::new();
    header(&mut out, frame.height);
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let (ax, top) = frame.map(0.0, zmax + pad);
    let (_, bottom) = frame.map(0.0, zmin - pad);
    let _ = writeln!(
        out,
        r##"<line x1="{ax:.2}" y1="{top:.2}" x2="{ax:.2}" y2="{bottom:.2}" stroke="#888888" stroke-dasharray="4 4"/>"##
    );
    let right: Vec<(f64, f64)> = traj.samples.iter().map(|s| frame.map(s.x, s.z)).collect();
    let left: Vec<(f64, f64)> = traj.samples.iter().map(|s| frame.map(-s.x, s.z)).collect();
    polyline(&mut out, &right, r##"stroke="#1f4e9c" stroke-width="1.5""##);
    polyline(&mut out, &left, r##"stroke="#1f4e9c" stroke-width="1" stroke-opacity="0.5""##);
    let _ = writeln!(out, "<text x=\"{MARGIN:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>", MARGIN * 0.6, escape(title));
    out.push_str("</svg>\n");
    out
}

fn kind_name(k: SingularityKind) -> &'static str {
    match k {
        SingularityKind::UnstableNode => "unstable node",
        SingularityKind::ImproperNode => "improper node",
        SingularityKind::StableNode => "stable node",
        SingularityKind::Saddle => "saddle",
        SingularityKind::ImproperSaddle => "improper saddle",
        SingularityKind::Center => "center",
    }
}

/// Vector field arrows, orbits, equilibria (marked by kind) and an optional
/// separatrix value on the `(theta, x)` plane.
pub fn phase_svg(
    portrait: &PhasePortrait,
    points: &[CriticalPoint],
    x_max: f64,
    separatrix: Option<(f64, f64)>,
    title: &str,
) -> String {
    let frame = Frame::new(0.0, TAU, 0.0, x_max, false);
    let mut out = String::new();
    header(&mut out, frame.height);
    let _ = writeln!(out, "<title>{}</title>", escape(title));

    // Axes with ticks at multiples of pi/2.
    let (x_left, y_bottom) = frame.map(0.0, 0.0);
    let (x_right, y_top) = frame.map(TAU, x_max);
    let _ = writeln!(
        out,
        r##"<rect x="{x_left:.2}" y="{y_top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444"/>"##,
        x_right - x_left,
        y_bottom - y_top
    );
    for (k, label) in ["0", "π/2", "π", "3π/2", "2π"].iter().enumerate() {
        let (tx, ty) = frame.map(k as f64 * FRAC_PI_2, 0.0);
        let _ = writeln!(
            out,
            r#"<text x="{tx:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            ty + 14.0
        );
    }

    // Field directions, normalized to a fixed arrow length.
    let len = 0.35 * (frame.scale_x * TAU / 25.0);
    for g in &portrait.grid {
        let (cx, cy) = frame.map(g.theta, g.x);
        let (vx, vy) = (g.dtheta * frame.scale_x, -g.dx * frame.scale_y);
        let n = (vx * vx + vy * vy).sqrt();
        if n == 0.0 {
            continue;
        }
        let (ex, ey) = (cx + len * vx / n, cy + len * vy / n);
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.2}" y1="{cy:.2}" x2="{ex:.2}" y2="{ey:.2}" stroke="#999999" stroke-width="0.8"/>"##
        );
        let _ = writeln!(out, r##"<circle cx="{ex:.2}" cy="{ey:.2}" r="1.2" fill="#999999"/>"##);
    }

    // Orbits, folded into [0, 2 pi) and split where they wrap.
    for orbit in &portrait.orbits {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut prev: Option<f64> = None;
        for &(theta, x) in orbit {
            if x > x_max * 1.05 {
                polyline(&mut out, &run, r##"stroke="#1f4e9c" stroke-width="1""##);
                run.clear();
                prev = None;
                continue;
            }
            let t = theta.rem_euclid(TAU);
            if let Some(p) = prev {
                if (t - p).abs() > PI {
                    polyline(&mut out, &run, r##"stroke="#1f4e9c" stroke-width="1""##);
                    run.clear();
                }
            }
            run.push(frame.map(t, x));
            prev = Some(t);
        }
        polyline(&mut out, &run, r##"stroke="#1f4e9c" stroke-width="1""##);
    }

    for c in points {
        let (cx, cy) = frame.map(c.theta, c.x);
        let name = kind_name(c.kind);
        let marker = match c.kind {
            SingularityKind::Saddle | SingularityKind::ImproperSaddle => format!(
                r##"<path d="M{:.2},{:.2}L{:.2},{:.2}M{:.2},{:.2}L{:.2},{:.2}" stroke="#c0392b" stroke-width="2"/>"##,
                cx - 5.0, cy - 5.0, cx + 5.0, cy + 5.0, cx - 5.0, cy + 5.0, cx + 5.0, cy - 5.0
            ),
            SingularityKind::Center => {
                format!(r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="none" stroke="#27ae60" stroke-width="2"/>"##)
            }
            _ => format!(r##"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="#8e44ad"/>"##, cx - 4.0, cy - 4.0),
        };
        let _ = writeln!(
            out,
            r#"<g class="critical-point" data-kind="{name}" data-theta="{:.6}" data-x="{:.6}"><title>{:?}: {name}</title>{marker}</g>"#,
            c.theta, c.x, c.label
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{:?} {name}</text>"#,
            cx + 7.0,
            cy - 7.0,
            c.label
        );
    }

    if let Some((theta0, x_bar)) = separatrix {
        let (cx, cy) = frame.map(theta0.rem_euclid(TAU), x_bar);
        let _ = writeln!(out, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="#e67e22"/>"##);
        let _ = writeln!(
            out,
            r#"<text class="separatrix" x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">x̄ = {x_bar:.3}</text>"#,
            cx + 7.0,
            cy + 4.0
        );
    }
    let _ = writeln!(out, "<text x=\"{MARGIN:.0}\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>", MARGIN * 0.6, escape(title));
    out.push_str("</svg>\n");
    out
}
