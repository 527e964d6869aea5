//! SVG rendering of the phase portrait on a bounded disc.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{finite_equilibria, CoarseKind, EquilibriumKind};
use crate::infinity::{infinite_equilibria, ChartId, InfiniteKind, Stability};
use crate::integrator::{integrate, IntegrationOptions, Termination};
use crate::model::{Parameters, PlaneState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "seeds")]
pub enum Seeds {
    Auto,
    List(Vec<PlaneState>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub disc_radius_px: u32,
    pub orbit_seeds: Seeds,
    pub draw_infinite_circle: bool,
    /// Arrow heads per unit of arc length on the unit disc; 0 disables them.
    pub arrow_density: f64,
    /// Integration time in each direction from every seed.
    pub orbit_time: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            disc_radius_px: 240,
            orbit_seeds: Seeds::Auto,
            draw_infinite_circle: true,
            arrow_density: 1.5,
            orbit_time: 30.0,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.disc_radius_px == 0 {
            return Err(Error::InvalidParameters(
                "disc radius must be positive".into(),
            ));
        }
        if !(self.arrow_density >= 0.0 && self.arrow_density.is_finite()) {
            return Err(Error::InvalidParameters(
                "arrow density must be finite and nonnegative".into(),
            ));
        }
        if !(self.orbit_time > 0.0 && self.orbit_time.is_finite()) {
            return Err(Error::InvalidParameters(
                "orbit time must be positive".into(),
            ));
        }
        if let Seeds::List(seeds) = &self.orbit_seeds {
            if seeds.iter().any(|s| !s.is_finite()) {
                return Err(Error::InvalidParameters("seeds must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Radial map `r -> r / (1 + r)` onto the open unit disc.
pub fn disc_project(s: PlaneState) -> (f64, f64) {
    let k = 1.0 / (1.0 + s.norm());
    (s.x * k, s.y * k)
}

/// Seeds around every finite equilibrium, along saddle separatrices, and on
/// a few rings.
pub fn auto_seeds(p: &Parameters) -> Vec<PlaneState> {
    let eqs = finite_equilibria(p);
    let gap = eqs
        .windows(2)
        .map(|w| w[1].location.x - w[0].location.x)
        .fold(f64::INFINITY, f64::min);
    let local = if gap.is_finite() { 0.3 * gap } else { 0.5 };
    let mut seeds = Vec::new();
    for e in &eqs {
        let c = e.location;
        match e.kind {
            EquilibriumKind::SaddlePoint => {
                for lambda in e.eigenvalues.iter().map(|z| z.re) {
                    let n = (1.0 + lambda * lambda).sqrt();
                    let d = 1e-3 / n;
                    seeds.push(PlaneState::new(c.x + d, c.y + d * lambda));
                    seeds.push(PlaneState::new(c.x - d, c.y - d * lambda));
                }
            }
            EquilibriumKind::Center => {
                for k in 1..=3 {
                    seeds.push(PlaneState::new(c.x + local * f64::from(k) / 3.0, 0.0));
                }
            }
            _ => {
                seeds.push(PlaneState::new(c.x + local, 0.0));
                seeds.push(PlaneState::new(c.x - local, 0.0));
                seeds.push(PlaneState::new(c.x, local));
                seeds.push(PlaneState::new(c.x, -local));
            }
        }
    }
    for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
        seeds.push(PlaneState::new(r, 0.0));
        seeds.push(PlaneState::new(-r, 0.0));
    }
    for r in [1.0, 4.0] {
        seeds.push(PlaneState::new(0.0, r));
        seeds.push(PlaneState::new(0.0, -r));
    }
    seeds
}

struct Orbit {
    points: Vec<(f64, f64)>,
    backward: bool,
    warning: Option<String>,
}

fn trace(p: &Parameters, seed: PlaneState, time: f64, backward: bool) -> Orbit {
    let chunk: f64 = 1.0;
    let mut opts = IntegrationOptions {
        max_step: 0.05,
        escape_radius: 1e4,
        ..IntegrationOptions::default().with_tolerance(1e-8)
    };
    if backward {
        opts = opts.reversed();
    }
    let mut points = vec![disc_project(seed)];
    let mut state = seed;
    let mut elapsed = 0.0;
    let mut warning = None;
    while elapsed < time {
        let span = chunk.min(time - elapsed);
        match integrate(p, state, &opts.with_max_time(span)) {
            Ok(traj) => {
                points.extend(traj.samples.iter().skip(1).map(|s| disc_project(s.state)));
                state = traj.last().expect("nonempty").state;
                elapsed += span;
                if matches!(traj.termination, Termination::Escaped { .. }) {
                    break;
                }
            }
            Err(e) => {
                warning = Some(format!(
                    "orbit from ({}, {}) stopped early: {e}",
                    seed.x, seed.y
                ));
                break;
            }
        }
    }
    Orbit {
        points,
        backward,
        warning,
    }
}

fn kind_color(k: CoarseKind) -> &'static str {
    match k {
        CoarseKind::Stable => "#1f4e9e",
        CoarseKind::Unstable => "#c0392b",
        CoarseKind::Saddle => "#2e8b57",
        CoarseKind::Center => "#000000",
        CoarseKind::Degenerate => "#888888",
    }
}

fn infinite_color(kind: InfiniteKind, stability: Option<Stability>) -> &'static str {
    match (kind, stability) {
        (InfiniteKind::Saddle, _) => kind_color(CoarseKind::Saddle),
        (_, Some(Stability::Stable)) => kind_color(CoarseKind::Stable),
        (_, Some(Stability::Unstable)) => kind_color(CoarseKind::Unstable),
        _ => kind_color(CoarseKind::Degenerate),
    }
}

fn flip(s: Option<Stability>) -> Option<Stability> {
    s.map(|s| match s {
        Stability::Stable => Stability::Unstable,
        Stability::Unstable => Stability::Stable,
    })
}

fn swap_nodes(k: InfiniteKind) -> InfiniteKind {
    match k {
        InfiniteKind::StableNode => InfiniteKind::UnstableNode,
        InfiniteKind::UnstableNode => InfiniteKind::StableNode,
        k => k,
    }
}

pub fn render_disc(p: &Parameters, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    let r = f64::from(spec.disc_radius_px);
    let margin = 12.0;
    let size = 2.0 * (r + margin);
    let c = r + margin;
    let px = |(u, v): (f64, f64)| (c + r * u, c - r * v);

    let seeds = match &spec.orbit_seeds {
        Seeds::Auto => auto_seeds(p),
        Seeds::List(list) => list.clone(),
    };
    let mut orbits = Vec::new();
    for &s in &seeds {
        orbits.push(trace(p, s, spec.orbit_time, false));
        orbits.push(trace(p, s, spec.orbit_time, true));
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}">"#
    );
    let _ = writeln!(
        svg,
        "<title>alpha={} epsilon={} sigma={} m={}</title>",
        p.alpha(),
        p.epsilon(),
        p.sigma(),
        p.m()
    );

    if spec.draw_infinite_circle {
        let _ = writeln!(
            svg,
            r##"<circle id="infinity" cx="{c:.2}" cy="{c:.2}" r="{r:.2}" fill="none" stroke="#000" stroke-width="1.2"/>"##
        );
    }

    if !orbits.is_empty() {
        let _ = writeln!(
            svg,
            r##"<g id="orbits" fill="none" stroke="#555" stroke-width="0.7">"##
        );
        for o in orbits.iter().filter(|o| o.points.len() > 1) {
            let pts: Vec<String> = o
                .points
                .iter()
                .map(|&q| {
                    let (x, y) = px(q);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(svg, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(svg, "</g>");
        if spec.arrow_density > 0.0 {
            let _ = writeln!(svg, r##"<g id="arrows" fill="#555">"##);
            let spacing = 1.0 / spec.arrow_density;
            for o in &orbits {
                let mut acc = 0.5 * spacing;
                for w in o.points.windows(2) {
                    let (a, b) = if o.backward {
                        (w[1], w[0])
                    } else {
                        (w[0], w[1])
                    };
                    let len = (b.0 - a.0).hypot(b.1 - a.1);
                    acc += len;
                    if acc < spacing || len == 0.0 {
                        continue;
                    }
                    acc = 0.0;
                    let (dx, dy) = ((b.0 - a.0) / len, (b.1 - a.1) / len);
                    let (tx, ty) = px(b);
                    // screen direction has y flipped
                    let (sx, sy) = (dx, -dy);
                    let s = 4.0;
                    let back = (tx - s * sx, ty - s * sy);
                    let l = (back.0 - 0.6 * s * sy, back.1 + 0.6 * s * sx);
                    let rr = (back.0 + 0.6 * s * sy, back.1 - 0.6 * s * sx);
                    let _ = writeln!(
                        svg,
                        r#"<polygon points="{tx:.2},{ty:.2} {:.2},{:.2} {:.2},{:.2}"/>"#,
                        l.0, l.1, rr.0, rr.1
                    );
                }
            }
            let _ = writeln!(svg, "</g>");
        }
    }

    let _ = writeln!(svg, r#"<g id="finite-equilibria">"#);
    for e in finite_equilibria(p) {
        let (x, y) = px(disc_project(e.location));
        let _ = writeln!(
            svg,
            r#"<circle class="{:?}" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{}"/>"#,
            e.kind,
            kind_color(e.kind.coarse())
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g id="infinite-equilibria" stroke-width="2.5">"#);
    // the antipodal copy carries the flow multiplied by (-1)^(n-1)
    let antipode_reversed = p.m() > 1 && p.m() % 2 == 0;
    for e in infinite_equilibria(p) {
        let dir = match e.chart {
            ChartId::U1 => (1.0, e.u),
            _ => (e.u, 1.0),
        };
        let n = dir.0.hypot(dir.1);
        for (sgn, kind, stab) in [
            (1.0, e.kind, e.stability),
            (
                -1.0,
                if antipode_reversed {
                    swap_nodes(e.kind)
                } else {
                    e.kind
                },
                if antipode_reversed {
                    flip(e.stability)
                } else {
                    e.stability
                },
            ),
        ] {
            let (ux, uy) = (sgn * dir.0 / n, sgn * dir.1 / n);
            let (x0, y0) = px((0.95 * ux, 0.95 * uy));
            let (x1, y1) = px((1.05 * ux, 1.05 * uy));
            let _ = writeln!(
                svg,
                r#"<line class="{kind:?}" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="{}"/>"#,
                infinite_color(kind, stab)
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    let warnings: Vec<&String> = orbits.iter().filter_map(|o| o.warning.as_ref()).collect();
    if !warnings.is_empty() {
        let _ = writeln!(svg, r##"<g id="warnings" font-size="9" fill="#c0392b">"##);
        for (i, w) in warnings.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="4" y="{}">{}</text>"#,
                10 + 10 * i,
                escape(w)
            );
        }
        let _ = writeln!(svg, "</g>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
        Parameters::new(alpha, epsilon, sigma, m).unwrap()
    }

    #[test]
    fn projection_stays_inside_the_disc() {
        for s in [
            PlaneState::new(1e9, -3e9),
            PlaneState::new(-0.5, 0.2),
            PlaneState::ORIGIN,
        ] {
            let (u, v) = disc_project(s);
            assert!(u.hypot(v) < 1.0);
        }
        assert_eq!(disc_project(PlaneState::new(3.0, 4.0)), (0.5, 4.0 / 6.0));
    }

    #[test]
    fn empty_seed_list_draws_only_glyphs() {
        let spec = RenderSpec {
            orbit_seeds: Seeds::List(vec![]),
            draw_infinite_circle: false,
            ..RenderSpec::default()
        };
        let svg = render_disc(&params(0.0, -1.0, 1.0, 3), &spec).unwrap();
        assert!(!svg.contains("polyline"));
        assert!(!svg.contains(r#"id="infinity""#));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn render_is_deterministic() {
        let p = params(0.0, 1.0, 1.0, 3);
        let spec = RenderSpec {
            orbit_time: 5.0,
            ..RenderSpec::default()
        };
        let a = render_disc(&p, &spec).unwrap();
        assert_eq!(a, render_disc(&p, &spec).unwrap());
        assert!(a.starts_with("<?xml"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let p = params(0.0, 1.0, 1.0, 3);
        for spec in [
            RenderSpec {
                disc_radius_px: 0,
                ..RenderSpec::default()
            },
            RenderSpec {
                arrow_density: -1.0,
                ..RenderSpec::default()
            },
            RenderSpec {
                orbit_time: 0.0,
                ..RenderSpec::default()
            },
            RenderSpec {
                orbit_seeds: Seeds::List(vec![PlaneState::new(f64::NAN, 0.0)]),
                ..RenderSpec::default()
            },
        ] {
            assert!(render_disc(&p, &spec).is_err());
        }
    }

    #[test]
    fn saddle_seeds_sit_on_eigenvectors() {
        let seeds = auto_seeds(&params(0.0, 1.0, -1.0, 3));
        // origin is a saddle with eigenvalues +-1: four seeds hug it
        let near: Vec<_> = seeds.iter().filter(|s| s.norm() < 2e-3).collect();
        assert_eq!(near.len(), 4);
        assert!(near.iter().all(|s| (s.y.abs() - s.x.abs()).abs() < 1e-12));
    }
}
