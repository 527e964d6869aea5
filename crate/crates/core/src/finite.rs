//! Finite equilibria: location, closed-form eigenvalues, classification and
//! the center / global-center predicates.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ipow, potential_curvature, Parameters, PlaneState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquilibriumLabel {
    Origin,
    EPlus,
    EMinus,
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquilibriumLabel::Origin => "Origin",
            EquilibriumLabel::EPlus => "E+",
            EquilibriumLabel::EMinus => "E-",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquilibriumKind {
    SaddlePoint,
    StableNode,
    UnstableNode,
    StableFocus,
    UnstableFocus,
    Center,
    Degenerate,
}

/// Stable / unstable / saddle view used by the stability tables; nodes and
/// foci of the same stability are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarseKind {
    Stable,
    Unstable,
    Saddle,
    Center,
    Degenerate,
}

impl EquilibriumKind {
    pub fn coarse(self) -> CoarseKind {
        match self {
            EquilibriumKind::SaddlePoint => CoarseKind::Saddle,
            EquilibriumKind::StableNode | EquilibriumKind::StableFocus => CoarseKind::Stable,
            EquilibriumKind::UnstableNode | EquilibriumKind::UnstableFocus => CoarseKind::Unstable,
            EquilibriumKind::Center => CoarseKind::Center,
            EquilibriumKind::Degenerate => CoarseKind::Degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub location: PlaneState,
    pub eigenvalues: [Complex64; 2],
    pub kind: EquilibriumKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterVerdict {
    /// Unique finite equilibrium of linear center type at the origin.
    pub is_local_center: bool,
    pub is_global_center: bool,
    /// The origin is a center, without requiring it to be the only equilibrium.
    pub origin_is_center: bool,
    pub witness: String,
}

/// Abscissa `r0` solving `x^(m-1) = -sigma/epsilon`, when a real nonzero root
/// exists. For even `m` it is the unique real root and may be negative.
fn extra_root(p: &Parameters) -> Option<f64> {
    if p.m() < 2 || p.sigma() == 0.0 {
        return None;
    }
    let q = -p.sigma() / p.epsilon();
    let k = f64::from(p.m() - 1);
    if p.m_is_odd() {
        (q > 0.0).then(|| q.powf(1.0 / k))
    } else {
        Some(q.signum() * q.abs().powf(1.0 / k))
    }
}

fn location_of(p: &Parameters, label: EquilibriumLabel) -> Option<f64> {
    match label {
        EquilibriumLabel::Origin => Some(0.0),
        EquilibriumLabel::EPlus => extra_root(p),
        EquilibriumLabel::EMinus => p.m_is_odd().then(|| extra_root(p)).flatten().map(|r| -r),
    }
}

/// Roots `-alpha/2 ± sqrt(disc)/2`, the `+` root first.
fn quadratic_pair(alpha: f64, disc: f64) -> [Complex64; 2] {
    let half = -0.5 * alpha;
    if disc >= 0.0 {
        let s = 0.5 * disc.sqrt();
        [Complex64::new(half + s, 0.0), Complex64::new(half - s, 0.0)]
    } else {
        let s = 0.5 * (-disc).sqrt();
        [Complex64::new(half, s), Complex64::new(half, -s)]
    }
}

fn discriminant(p: &Parameters, label: EquilibriumLabel) -> f64 {
    let alpha2 = p.alpha() * p.alpha();
    match (p.m(), label) {
        (1, _) => alpha2 - 4.0 * (p.epsilon() + p.sigma()),
        (_, EquilibriumLabel::Origin) => alpha2 - 4.0 * p.sigma(),
        (m, _) => alpha2 + 4.0 * p.sigma() * f64::from(m - 1),
    }
}

pub fn eigenvalues_at(p: &Parameters, label: EquilibriumLabel) -> Result<[Complex64; 2]> {
    if location_of(p, label).is_none() {
        return Err(Error::MissingEquilibrium(label.to_string()));
    }
    Ok(quadratic_pair(p.alpha(), discriminant(p, label)))
}

/// Kind of the equilibrium at `(x, 0)` from the trace `-alpha` and determinant
/// `U''(x)` of the Jacobian.
fn kind_at(p: &Parameters, label: EquilibriumLabel, x: f64) -> EquilibriumKind {
    let stiffness = match (p.m(), label) {
        (1, _) => p.epsilon() + p.sigma(),
        (_, EquilibriumLabel::Origin) => p.sigma(),
        (m, _) => p.sigma() * (1.0 - f64::from(m)),
    };
    debug_assert!((stiffness - potential_curvature(p, x)).abs() <= 1e-9 * (1.0 + stiffness.abs()));
    if p.is_negligible(stiffness) {
        return EquilibriumKind::Degenerate;
    }
    if stiffness < 0.0 {
        return EquilibriumKind::SaddlePoint;
    }
    if p.alpha() == 0.0 {
        // Strict local minimum of the potential of a conservative system.
        return EquilibriumKind::Center;
    }
    let disc = discriminant(p, label);
    if p.is_negligible(disc) {
        return EquilibriumKind::Degenerate;
    }
    match (p.alpha() > 0.0, disc < 0.0) {
        (true, true) => EquilibriumKind::StableFocus,
        (true, false) => EquilibriumKind::StableNode,
        (false, true) => EquilibriumKind::UnstableFocus,
        (false, false) => EquilibriumKind::UnstableNode,
    }
}

pub fn classify_finite(p: &Parameters, e: &Equilibrium) -> EquilibriumKind {
    kind_at(p, e.label, e.location.x)
}

fn build(p: &Parameters, label: EquilibriumLabel) -> Option<Equilibrium> {
    let x = location_of(p, label)?;
    Some(Equilibrium {
        label,
        location: PlaneState::new(x, 0.0),
        eigenvalues: quadratic_pair(p.alpha(), discriminant(p, label)),
        kind: kind_at(p, label, x),
    })
}

/// All finite equilibria, sorted by abscissa.
pub fn finite_equilibria(p: &Parameters) -> Vec<Equilibrium> {
    let mut out: Vec<Equilibrium> = [
        EquilibriumLabel::Origin,
        EquilibriumLabel::EPlus,
        EquilibriumLabel::EMinus,
    ]
    .into_iter()
    .filter_map(|label| build(p, label))
    .collect();
    out.sort_by(|a, b| a.location.x.total_cmp(&b.location.x));
    out
}

pub fn equilibrium(p: &Parameters, label: EquilibriumLabel) -> Result<Equilibrium> {
    build(p, label).ok_or_else(|| Error::MissingEquilibrium(label.to_string()))
}

/// Whether the labelled equilibrium has a pair of purely imaginary eigenvalues
/// (`m > 1` only).
pub fn purely_imaginary_at(p: &Parameters, label: EquilibriumLabel) -> Result<bool> {
    if p.m() == 1 {
        return Err(Error::InvalidParameters(
            "purely imaginary test is stated for m > 1".into(),
        ));
    }
    if location_of(p, label).is_none() {
        return Err(Error::MissingEquilibrium(label.to_string()));
    }
    let undamped = p.alpha() == 0.0;
    Ok(match label {
        EquilibriumLabel::Origin => undamped && p.sigma() > 0.0,
        EquilibriumLabel::EPlus => undamped && p.sigma() < 0.0,
        EquilibriumLabel::EMinus if p.m_is_odd() => undamped && p.sigma() < 0.0,
        EquilibriumLabel::EMinus => undamped && p.sigma() > 0.0,
    })
}

pub fn has_unique_finite_equilibrium(p: &Parameters) -> bool {
    p.m() == 1 || (p.m_is_odd() && p.sigma() * p.epsilon() > 0.0)
}

pub fn center_at_origin(p: &Parameters) -> CenterVerdict {
    let undamped = p.alpha() == 0.0;
    if p.m() == 1 {
        let c = undamped && p.epsilon() + p.sigma() > 0.0;
        let witness = if c {
            "m = 1, epsilon + sigma > 0 and alpha = 0: unique equilibrium, linear center, global center"
        } else {
            "m = 1 requires epsilon + sigma > 0 and alpha = 0 for a center"
        };
        return CenterVerdict {
            is_local_center: c,
            is_global_center: c,
            origin_is_center: c,
            witness: witness.into(),
        };
    }
    let origin_is_center = undamped && p.sigma() > 0.0;
    let unique_linear = p.m_is_odd() && origin_is_center && p.epsilon() > 0.0;
    let mut witness = if unique_linear {
        String::from(
            "m > 1 odd, sigma > 0, epsilon > 0, alpha = 0: unique linear-type center; \
             both infinite sectors hyperbolic, so the center is global",
        )
    } else if !p.m_is_odd() {
        String::from("even degree: no global center; the origin is never the only equilibrium")
    } else {
        String::from("m > 1 odd requires sigma > 0, epsilon > 0 and alpha = 0 for a unique center")
    };
    witness.push_str(if origin_is_center {
        "; origin is a (not necessarily unique) center since alpha = 0 and sigma > 0"
    } else {
        "; origin is not a center (needs alpha = 0 and sigma > 0)"
    });
    CenterVerdict {
        is_local_center: unique_linear,
        is_global_center: unique_linear,
        origin_is_center,
        witness,
    }
}

/// Residual of the field at an equilibrium location, for invariant checks.
pub fn residual(p: &Parameters, e: &Equilibrium) -> f64 {
    let x = e.location.x;
    (p.epsilon() * ipow(x, p.m()) + p.sigma() * x).abs()
}
