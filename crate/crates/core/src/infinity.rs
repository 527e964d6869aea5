//! Poincaré compactification: chart maps and chart fields, equilibria on the
//! circle at infinity, their sector structure, and the two quasi-homogeneous
//! blow-ups of the origin of chart U2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eval_field, ipow, Parameters, PlaneState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    U1,
    U2,
    V1,
    V2,
    PlaneU3,
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl ChartId {
    /// Charts whose `v = 0` line is part of the circle at infinity.
    pub fn is_at_infinity_chart(self) -> bool {
        !matches!(self, ChartId::PlaneU3)
    }

    /// Sign of the planar coordinate `(x, y)` that is positive/negative
    /// throughout the chart domain, together with the sign of the other
    /// coordinate expressed through `u`.
    ///
    /// Returns `(sign_x, sign_y)` of the direction represented by `(u, v)`;
    /// a zero means that coordinate vanishes on the direction.
    pub fn direction_signs(self, u: f64) -> (f64, f64) {
        let su = if u == 0.0 { 0.0 } else { u.signum() };
        match self {
            ChartId::U1 => (1.0, su),
            ChartId::V1 => (-1.0, -su),
            ChartId::U2 => (su, 1.0),
            ChartId::V2 => (-su, -1.0),
            ChartId::PlaneU3 => (0.0, 0.0),
        }
    }
}

fn out_of_chart(c: ChartId, s: PlaneState) -> Error {
    Error::OutOfChart {
        chart: c.to_string(),
        x: s.x,
        y: s.y,
    }
}

/// Planar point to chart coordinates. U1/V1 need `x > 0` / `x < 0` and give
/// `(y/x, 1/x)`; U2/V2 need `y > 0` / `y < 0` and give `(x/y, 1/y)`.
pub fn to_chart(s: PlaneState, c: ChartId) -> Result<(f64, f64)> {
    match c {
        ChartId::PlaneU3 => Ok((s.x, s.y)),
        ChartId::U1 | ChartId::V1 => {
            let ok = if c == ChartId::U1 {
                s.x > 0.0
            } else {
                s.x < 0.0
            };
            if !ok {
                return Err(out_of_chart(c, s));
            }
            Ok((s.y / s.x, 1.0 / s.x))
        }
        ChartId::U2 | ChartId::V2 => {
            let ok = if c == ChartId::U2 {
                s.y > 0.0
            } else {
                s.y < 0.0
            };
            if !ok {
                return Err(out_of_chart(c, s));
            }
            Ok((s.x / s.y, 1.0 / s.y))
        }
    }
}

/// Inverse of [`to_chart`]; fails on `v = 0` (a point at infinity) or on a
/// `v` of the wrong sign for the chart.
pub fn from_chart(c: ChartId, u: f64, v: f64) -> Result<PlaneState> {
    let bad = || Error::OutOfChart {
        chart: c.to_string(),
        x: u,
        y: v,
    };
    match c {
        ChartId::PlaneU3 => Ok(PlaneState::new(u, v)),
        ChartId::U1 | ChartId::U2 if v <= 0.0 => Err(bad()),
        ChartId::V1 | ChartId::V2 if v >= 0.0 => Err(bad()),
        ChartId::U1 | ChartId::V1 => Ok(PlaneState::new(1.0 / v, u / v)),
        ChartId::U2 | ChartId::V2 => Ok(PlaneState::new(u / v, 1.0 / v)),
    }
}

/// Moves a point of an axis chart (U1, V1, U2, V2) to the complementary axis
/// chart. Valid on the circle at infinity as well; requires `u != 0`.
pub fn swap_axis_chart(c: ChartId, u: f64, v: f64) -> Result<(ChartId, f64, f64)> {
    if u == 0.0 || c == ChartId::PlaneU3 {
        return Err(Error::Precondition(format!(
            "cannot leave chart {c} at u = {u}"
        )));
    }
    let (sx, sy) = c.direction_signs(u);
    let target = match c {
        ChartId::U1 | ChartId::V1 => {
            if sy > 0.0 {
                ChartId::U2
            } else {
                ChartId::V2
            }
        }
        _ => {
            if sx > 0.0 {
                ChartId::U1
            } else {
                ChartId::V1
            }
        }
    };
    // (y/x, 1/x) <-> (x/y, 1/y) is (u, v) -> (1/u, v/u) in both directions.
    Ok((target, 1.0 / u, v / u))
}

/// `(-1)^(n-1)` factor relating V-chart fields to U-chart fields.
fn v_chart_sign(p: &Parameters) -> f64 {
    if p.degree() % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Compactified field in the given chart, polynomial after clearing the
/// denominators with `v^n`, `n = max(m, 1)`.
pub fn chart_field(p: &Parameters, c: ChartId, u: f64, v: f64) -> (f64, f64) {
    let m = p.m();
    let (alpha, eps, sigma) = (p.alpha(), p.epsilon(), p.sigma());
    let u1 = || {
        (
            -eps - ipow(v, m - 1) * (sigma + alpha * u + u * u),
            -u * ipow(v, m),
        )
    };
    let u2 = || {
        (
            eps * ipow(u, m + 1) + ipow(v, m - 1) * (1.0 + alpha * u + sigma * u * u),
            eps * ipow(u, m) * v + ipow(v, m) * (alpha + sigma * u),
        )
    };
    let scale = |(a, b): (f64, f64), k: f64| (k * a, k * b);
    match c {
        ChartId::PlaneU3 => eval_field(p, PlaneState::new(u, v)),
        ChartId::U1 => u1(),
        ChartId::U2 => u2(),
        ChartId::V1 => scale(u1(), v_chart_sign(p)),
        ChartId::V2 => scale(u2(), v_chart_sign(p)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InfiniteKind {
    Saddle,
    StableNode,
    UnstableNode,
    SaddleNode,
    LinearlyZero,
    Nilpotent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct SectorStructure {
    pub hyperbolic: u32,
    pub parabolic: u32,
    pub elliptic: u32,
}

impl SectorStructure {
    pub const fn new(hyperbolic: u32, parabolic: u32, elliptic: u32) -> Self {
        SectorStructure {
            hyperbolic,
            parabolic,
            elliptic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteEquilibrium {
    pub chart: ChartId,
    /// Abscissa on `v = 0`.
    pub u: f64,
    pub kind: InfiniteKind,
    /// Diagonal Jacobian entries `(du/du, dv/dv)` for points of the linear
    /// case; `None` when the linear part does not decide the kind.
    pub eigenvalues: Option<[f64; 2]>,
    /// Attracting or repelling character, where the local portrait has one.
    pub stability: Option<Stability>,
    pub sectors: Option<SectorStructure>,
}

fn hyperbolic_kind(a: f64, b: f64) -> InfiniteKind {
    if a == 0.0 || b == 0.0 {
        InfiniteKind::SaddleNode
    } else if a < 0.0 && b < 0.0 {
        InfiniteKind::StableNode
    } else if a > 0.0 && b > 0.0 {
        InfiniteKind::UnstableNode
    } else {
        InfiniteKind::Saddle
    }
}

/// Equilibria on the circle at infinity, one representative per antipodal
/// pair (the U-chart copy).
pub fn infinite_equilibria(p: &Parameters) -> Vec<InfiniteEquilibrium> {
    if p.m() == 1 {
        let alpha = p.alpha();
        let disc = alpha * alpha - 4.0 * (p.epsilon() + p.sigma());
        let point = |u: f64| {
            // Jacobian of the U1 field on v = 0 is diag(-alpha - 2u, -u).
            let eig = [-alpha - 2.0 * u, -u];
            let kind = hyperbolic_kind(eig[0], eig[1]);
            let stability = match kind {
                InfiniteKind::StableNode => Some(Stability::Stable),
                InfiniteKind::UnstableNode => Some(Stability::Unstable),
                _ => None,
            };
            InfiniteEquilibrium {
                chart: ChartId::U1,
                u,
                kind,
                eigenvalues: Some(eig),
                stability,
                sectors: None,
            }
        };
        if p.is_negligible(disc) {
            let mut e = point(-0.5 * alpha);
            e.kind = InfiniteKind::SaddleNode;
            e.stability = None;
            return vec![e];
        }
        if disc < 0.0 {
            return Vec::new();
        }
        let root = disc.sqrt();
        return vec![point(0.5 * (-alpha + root)), point(0.5 * (-alpha - root))];
    }

    // m > 1: only the origin of U2. Its linear part has the single entry
    // d(u')/dv = 1 when m = 2 and vanishes for every larger m.
    let kind = if p.m() == 2 {
        InfiniteKind::Nilpotent
    } else {
        InfiniteKind::LinearlyZero
    };
    let stability = if p.m_is_odd() {
        None
    } else if p.epsilon() > 0.0 {
        Some(Stability::Unstable)
    } else {
        Some(Stability::Stable)
    };
    vec![InfiniteEquilibrium {
        chart: ChartId::U2,
        u: 0.0,
        kind,
        eigenvalues: None,
        stability,
        sectors: sector_structure_at_infinity(p).ok(),
    }]
}

/// Local sector decomposition of the origin of U2 (`m > 1`).
pub fn sector_structure_at_infinity(p: &Parameters) -> Result<SectorStructure> {
    if p.m() == 1 {
        return Err(Error::InvalidParameters(
            "sector structure at the origin of U2 is defined for m > 1".into(),
        ));
    }
    if p.is_negligible(p.sigma()) {
        return Err(Error::InvalidParameters(
            "sigma = 0 is a degenerate point".into(),
        ));
    }
    Ok(if !p.m_is_odd() {
        SectorStructure::new(0, 3, 0)
    } else if p.epsilon() > 0.0 {
        SectorStructure::new(2, 0, 0)
    } else if p.sigma() < 0.0 {
        SectorStructure::new(0, 2, 2)
    } else {
        SectorStructure::new(0, 4, 2)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    EvenM,
    OddM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlowupDirection {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
}

impl BlowupDirection {
    pub const ALL: [BlowupDirection; 4] = [
        BlowupDirection::XPlus,
        BlowupDirection::XMinus,
        BlowupDirection::YPlus,
        BlowupDirection::YMinus,
    ];

    fn sign(self) -> f64 {
        match self {
            BlowupDirection::XPlus | BlowupDirection::YPlus => 1.0,
            BlowupDirection::XMinus | BlowupDirection::YMinus => -1.0,
        }
    }

    fn is_x(self) -> bool {
        matches!(self, BlowupDirection::XPlus | BlowupDirection::XMinus)
    }
}

/// One directional chart of the quasi-homogeneous blow-up of the origin of U2.
///
/// Even `m = 2n` uses weights `(2n, 2n - 1)`, odd `m = 2n + 1` uses
/// `(n + 1, n)`. X-branches fix `u_bar = ±1` and evolve `(rho, v_bar)`;
/// Y-branches fix `v_bar = ±1` and evolve `(rho, u_bar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupBranch {
    pub parity: Parity,
    pub direction: BlowupDirection,
    pub n: u32,
}

impl BlowupBranch {
    /// The branch matching the degree of `p` (`m > 1`).
    pub fn for_params(p: &Parameters, direction: BlowupDirection) -> Result<Self> {
        if p.m() < 2 {
            return Err(Error::InvalidParameters("blow-up is used for m > 1".into()));
        }
        let (parity, n) = if p.m_is_odd() {
            (Parity::OddM, (p.m() - 1) / 2)
        } else {
            (Parity::EvenM, p.m() / 2)
        };
        Ok(BlowupBranch {
            parity,
            direction,
            n,
        })
    }

    /// Weights `(a, b)` of the substitution `(u, v) = (u_bar rho^a, v_bar rho^b)`.
    pub fn weights(&self) -> (u32, u32) {
        match self.parity {
            Parity::EvenM => (2 * self.n, 2 * self.n - 1),
            Parity::OddM => (self.n + 1, self.n),
        }
    }

    /// Exponent `k` of the time change `d eta = rho^k d tau`.
    pub fn rescaling_exponent(&self) -> i64 {
        let n = i64::from(self.n);
        match self.parity {
            Parity::EvenM => 4 * n * n - 6 * n + 1,
            Parity::OddM => 2 * n * n - n - 1,
        }
    }

    fn check(&self, p: &Parameters) -> Result<()> {
        let expected = BlowupBranch::for_params(p, self.direction)?;
        if expected.parity != self.parity || expected.n != self.n || self.n == 0 {
            return Err(Error::ParityMismatch { m: p.m() });
        }
        Ok(())
    }

    /// Chart-U2 coordinates of the blow-up point `(rho, w)`.
    pub fn to_chart(&self, rho: f64, w: f64) -> (f64, f64) {
        let (a, b) = self.weights();
        let s = self.direction.sign();
        if self.direction.is_x() {
            (s * ipow(rho, a), w * ipow(rho, b))
        } else {
            (w * ipow(rho, a), s * ipow(rho, b))
        }
    }
}

/// The divided blow-up field `(d rho/d eta, d w/d eta)` of the chosen branch.
pub fn blowup_field(p: &Parameters, b: &BlowupBranch, rho: f64, w: f64) -> Result<(f64, f64)> {
    b.check(p)?;
    let (alpha, eps, sigma) = (p.alpha(), p.epsilon(), p.sigma());
    let n = b.n;
    let nf = f64::from(n);
    let r = |k: u32| ipow(rho, k);
    let wp = |k: u32| ipow(w, k);
    let out = match (b.parity, b.direction) {
        (Parity::OddM, BlowupDirection::XPlus) => (
            (eps * r(4 * n + 3)
                + rho * wp(2 * n)
                + alpha * r(n + 2) * wp(2 * n)
                + sigma * r(2 * n + 3) * wp(2 * n))
                / (nf + 1.0),
            (eps * r(4 * n + 2) * w
                + alpha * r(n + 1) * wp(2 * n + 1)
                + sigma * r(2 * n + 2) * wp(2 * n + 1)
                - nf * wp(2 * n + 1))
                / (nf + 1.0),
        ),
        (Parity::OddM, BlowupDirection::XMinus) => (
            -(eps * r(4 * n + 3) + rho * wp(2 * n) - alpha * r(n + 2) * wp(2 * n)
                + sigma * r(2 * n + 3) * wp(2 * n))
                / (nf + 1.0),
            (-eps * r(4 * n + 2) * w + alpha * r(n + 1) * wp(2 * n + 1)
                - sigma * r(2 * n + 2) * wp(2 * n + 1)
                + nf * wp(2 * n + 1))
                / (nf + 1.0),
        ),
        // Both Y-branches coincide for odd m: v enters only through even powers
        // in du/dtau and both v-equation terms flip sign together.
        (Parity::OddM, _) => (
            (eps * wp(2 * n + 1) * r(4 * n + 3) + alpha * r(n + 2) + sigma * w * r(2 * n + 3)) / nf,
            1.0 - (eps * wp(2 * n + 2) * r(4 * n + 2)
                + alpha * w * r(n + 1)
                + sigma * w * w * r(2 * n + 2))
                / nf,
        ),
        (Parity::EvenM, BlowupDirection::XPlus) => (
            (eps * r(6 * n)
                + rho * wp(2 * n - 1)
                + alpha * r(2 * n + 1) * wp(2 * n - 1)
                + sigma * r(4 * n + 1) * wp(2 * n - 1))
                / (2.0 * nf),
            (eps * r(6 * n - 1) * w + alpha * r(2 * n) * wp(2 * n) + sigma * r(4 * n) * wp(2 * n)
                - (2.0 * nf - 1.0) * wp(2 * n))
                / (2.0 * nf),
        ),
        (Parity::EvenM, BlowupDirection::XMinus) => (
            (eps * r(6 * n) - rho * wp(2 * n - 1) + alpha * r(2 * n + 1) * wp(2 * n - 1)
                - sigma * r(4 * n + 1) * wp(2 * n - 1))
                / (2.0 * nf),
            (eps * r(6 * n - 1) * w + alpha * r(2 * n) * wp(2 * n) - sigma * r(4 * n) * wp(2 * n)
                + (2.0 * nf - 1.0) * wp(2 * n))
                / (2.0 * nf),
        ),
        (Parity::EvenM, BlowupDirection::YPlus) => (
            (eps * wp(2 * n) * r(6 * n) + alpha * r(2 * n + 1) + sigma * w * r(4 * n + 1))
                / (2.0 * nf - 1.0),
            1.0 - (eps * wp(2 * n + 1) * r(6 * n - 1)
                + alpha * w * r(2 * n)
                + sigma * w * w * r(4 * n))
                / (2.0 * nf - 1.0),
        ),
        (Parity::EvenM, BlowupDirection::YMinus) => (
            (eps * wp(2 * n) * r(6 * n) - alpha * r(2 * n + 1) - sigma * w * r(4 * n + 1))
                / (2.0 * nf - 1.0),
            -1.0 + (-eps * wp(2 * n + 1) * r(6 * n - 1)
                + alpha * w * r(2 * n)
                + sigma * w * w * r(4 * n))
                / (2.0 * nf - 1.0),
        ),
    };
    Ok(out)
}

/// Pulls the U2 chart field back through the blow-up map and divides by
/// `rho^k` with `k` the given exponent. Needs `rho > 0`.
pub fn pulled_back_field(
    p: &Parameters,
    b: &BlowupBranch,
    rho: f64,
    w: f64,
    exponent: i64,
) -> Result<(f64, f64)> {
    b.check(p)?;
    if !(rho > 0.0) {
        return Err(Error::Precondition(format!(
            "blow-up samples need rho > 0, got {rho}"
        )));
    }
    let (a, bw) = b.weights();
    let (af, bf) = (f64::from(a), f64::from(bw));
    let s = b.direction.sign();
    let (u, v) = b.to_chart(rho, w);
    let (du, dv) = chart_field(p, ChartId::U2, u, v);
    let (drho, dw) = if b.direction.is_x() {
        // u = s rho^a, v = w rho^b
        let drho = du / (s * af * ipow(rho, a - 1));
        let dw = (dv - bf * w * ipow(rho, bw - 1) * drho) / ipow(rho, bw);
        (drho, dw)
    } else {
        // u = w rho^a, v = s rho^b
        let drho = dv / (s * bf * ipow(rho, bw - 1));
        let dw = (du - af * w * ipow(rho, a - 1) * drho) / ipow(rho, a);
        (drho, dw)
    };
    let factor = rho.powi(-(exponent as i32));
    Ok((drho * factor, dw * factor))
}

/// Largest relative discrepancy between the pulled-back chart field and
/// [`blowup_field`] over the sample points `(rho, w)`.
pub fn chart_to_blowup_consistency(
    p: &Parameters,
    b: &BlowupBranch,
    samples: &[(f64, f64)],
) -> Result<f64> {
    let k = b.rescaling_exponent();
    let mut worst: f64 = 0.0;
    for &(rho, w) in samples {
        let (pr, pw) = pulled_back_field(p, b, rho, w, k)?;
        let (er, ew) = blowup_field(p, b, rho, w)?;
        let scale = er.hypot(ew);
        let diff = (pr - er).hypot(pw - ew);
        let rel = if scale > 0.0 { diff / scale } else { diff };
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Time-rescaling exponent recovered from the ratio of the undivided pulled
/// back field to [`blowup_field`] at `rho` and `rho / 2`.
pub fn fitted_rescaling_exponent(
    p: &Parameters,
    b: &BlowupBranch,
    rho: f64,
    w: f64,
) -> Result<f64> {
    let ratio = |r: f64| -> Result<f64> {
        let (pr, pw) = pulled_back_field(p, b, r, w, 0)?;
        let (er, ew) = blowup_field(p, b, r, w)?;
        Ok(pr.hypot(pw) / er.hypot(ew))
    };
    let hi = ratio(rho)?;
    let lo = ratio(0.5 * rho)?;
    Ok((hi / lo).ln() / 2f64.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
        Parameters::new(alpha, epsilon, sigma, m).unwrap()
    }

    #[test]
    fn chart_examples() {
        assert_eq!(
            to_chart(PlaneState::new(1.0, 0.0), ChartId::U1).unwrap(),
            (0.0, 1.0)
        );
        assert_eq!(
            to_chart(PlaneState::new(0.0, 2.0), ChartId::U2).unwrap(),
            (0.0, 0.5)
        );
        assert_eq!(
            to_chart(PlaneState::new(2.0, 4.0), ChartId::U1).unwrap(),
            (2.0, 0.5)
        );
        let back = from_chart(ChartId::U1, 2.0, 0.5).unwrap();
        assert_eq!(back, PlaneState::new(2.0, 4.0));
    }

    #[test]
    fn out_of_chart_points_rejected() {
        assert!(to_chart(PlaneState::new(-1.0, 0.0), ChartId::U1).is_err());
        assert!(to_chart(PlaneState::new(0.0, 1.0), ChartId::U1).is_err());
        assert!(to_chart(PlaneState::new(1.0, 0.0), ChartId::V2).is_err());
        assert!(from_chart(ChartId::U2, 0.3, 0.0).is_err());
        assert!(from_chart(ChartId::V1, 0.3, 0.2).is_err());
    }

    #[test]
    fn chart_field_examples() {
        let p = params(3.0, 1.5, 0.5, 1);
        assert_eq!(chart_field(&p, ChartId::U2, 0.0, 0.0), (1.0, 0.0));
        assert_eq!(chart_field(&p, ChartId::U1, -1.0, 0.0), (0.0, 0.0));
        for m in [3, 5, 7] {
            let p = params(0.7, -1.3, 0.4, m);
            assert_eq!(chart_field(&p, ChartId::U2, 0.0, 0.0), (0.0, 0.0));
        }
    }

    #[test]
    fn chart_field_matches_raw_compactification_off_infinity() {
        // v^n (-u P + Q, -v P) evaluated through the planar field at (1/v, u/v).
        for m in 1..=6 {
            let p = params(0.3, -0.7, 1.1, m);
            let n = p.degree();
            for &(u, v) in &[(0.4, 0.3), (-1.2, 0.7), (2.0, 0.9)] {
                let (pp, qq) = eval_field(&p, PlaneState::new(1.0 / v, u / v));
                let raw = (ipow(v, n) * (-u * pp + qq), -ipow(v, n + 1) * pp);
                let got = chart_field(&p, ChartId::U1, u, v);
                assert!(
                    (raw.0 - got.0).abs() < 1e-9 * (1.0 + raw.0.abs()),
                    "U1 m={m}"
                );
                assert!(
                    (raw.1 - got.1).abs() < 1e-9 * (1.0 + raw.1.abs()),
                    "U1 m={m}"
                );

                let (pp, qq) = eval_field(&p, PlaneState::new(u / v, 1.0 / v));
                let raw = (ipow(v, n) * (-u * qq + pp), -ipow(v, n + 1) * qq);
                let got = chart_field(&p, ChartId::U2, u, v);
                assert!(
                    (raw.0 - got.0).abs() < 1e-9 * (1.0 + raw.0.abs()),
                    "U2 m={m}"
                );
                assert!(
                    (raw.1 - got.1).abs() < 1e-9 * (1.0 + raw.1.abs()),
                    "U2 m={m}"
                );
            }
        }
    }

    #[test]
    fn infinite_equilibria_linear_case() {
        assert!(infinite_equilibria(&params(0.0, 1.0, 1.0, 1)).is_empty());

        let pts = infinite_equilibria(&params(3.0, 1.5, 0.5, 1));
        assert_eq!(pts.len(), 2);
        assert_eq!((pts[0].u, pts[0].kind), (-1.0, InfiniteKind::Saddle));
        assert_eq!((pts[1].u, pts[1].kind), (-2.0, InfiniteKind::UnstableNode));
        assert_eq!(pts[0].eigenvalues, Some([-1.0, 1.0]));
        assert_eq!(pts[1].eigenvalues, Some([1.0, 2.0]));

        // alpha < 0: P+ stable node, P- saddle
        let pts = infinite_equilibria(&params(-3.0, 1.5, 0.5, 1));
        assert_eq!(pts[0].kind, InfiniteKind::StableNode);
        assert_eq!(pts[1].kind, InfiniteKind::Saddle);

        // epsilon + sigma < 0: stable and unstable node
        let pts = infinite_equilibria(&params(0.5, -1.0, -1.0, 1));
        assert_eq!(pts[0].kind, InfiniteKind::StableNode);
        assert_eq!(pts[1].kind, InfiniteKind::UnstableNode);

        let pts = infinite_equilibria(&params(2.0, 0.5, 0.5, 1));
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].u, pts[0].kind), (-1.0, InfiniteKind::SaddleNode));
    }

    #[test]
    fn infinite_equilibria_nonlinear_case() {
        let pts = infinite_equilibria(&params(0.3, 1.0, -2.0, 2));
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].chart, ChartId::U2);
        assert_eq!(pts[0].kind, InfiniteKind::Nilpotent);
        assert_eq!(pts[0].stability, Some(Stability::Unstable));
        assert_eq!(pts[0].sectors, Some(SectorStructure::new(0, 3, 0)));

        let pts = infinite_equilibria(&params(0.3, -1.0, -2.0, 4));
        assert_eq!(pts[0].kind, InfiniteKind::LinearlyZero);
        assert_eq!(pts[0].stability, Some(Stability::Stable));

        let pts = infinite_equilibria(&params(0.0, 1.0, 1.0, 3));
        assert_eq!(pts[0].kind, InfiniteKind::LinearlyZero);
        assert_eq!(pts[0].sectors, Some(SectorStructure::new(2, 0, 0)));
    }

    #[test]
    fn sector_examples() {
        assert_eq!(
            sector_structure_at_infinity(&params(0.0, 1.0, 1.0, 3)).unwrap(),
            SectorStructure::new(2, 0, 0)
        );
        assert_eq!(
            sector_structure_at_infinity(&params(0.0, -1.0, -1.0, 5)).unwrap(),
            SectorStructure::new(0, 2, 2)
        );
        assert_eq!(
            sector_structure_at_infinity(&params(0.0, -1.0, 1.0, 3)).unwrap(),
            SectorStructure::new(0, 4, 2)
        );
        assert_eq!(
            sector_structure_at_infinity(&params(1.0, -1.0, 1.0, 4)).unwrap(),
            SectorStructure::new(0, 3, 0)
        );
        assert!(sector_structure_at_infinity(&params(0.0, 1.0, 1.0, 1)).is_err());
        assert!(sector_structure_at_infinity(&params(0.0, 1.0, 0.0, 3)).is_err());
    }

    #[test]
    fn blowup_examples() {
        for m in [3, 5, 7] {
            let p = params(0.4, 1.0, -0.5, m);
            let b = BlowupBranch::for_params(&p, BlowupDirection::XPlus).unwrap();
            let n = f64::from(b.n);
            let (dr, dv) = blowup_field(&p, &b, 0.0, 1.0).unwrap();
            assert_eq!(dr, 0.0);
            assert!((dv + n / (n + 1.0)).abs() < 1e-15);
            for eps in [1.0, -1.0] {
                let p = params(0.4, eps, -0.5, m);
                let (dr, _) = blowup_field(&p, &b, 1e-2, 0.0).unwrap();
                assert_eq!(dr.signum(), eps);
            }
        }
        for m in [2, 4, 6] {
            let p = params(0.4, 1.0, -0.5, m);
            let b = BlowupBranch::for_params(&p, BlowupDirection::YPlus).unwrap();
            assert_eq!(blowup_field(&p, &b, 0.0, 0.0).unwrap(), (0.0, 1.0));
            let b = BlowupBranch::for_params(&p, BlowupDirection::YMinus).unwrap();
            assert_eq!(blowup_field(&p, &b, 0.0, 0.0).unwrap(), (0.0, -1.0));
        }
    }

    #[test]
    fn parity_mismatch_rejected() {
        let odd = params(0.0, 1.0, 1.0, 3);
        let even = params(0.0, 1.0, 1.0, 2);
        let b = BlowupBranch::for_params(&even, BlowupDirection::XPlus).unwrap();
        assert!(matches!(
            blowup_field(&odd, &b, 0.1, 0.1),
            Err(Error::ParityMismatch { .. })
        ));
        let b =
            BlowupBranch::for_params(&params(0.0, 1.0, 1.0, 5), BlowupDirection::XPlus).unwrap();
        assert!(matches!(
            blowup_field(&odd, &b, 0.1, 0.1),
            Err(Error::ParityMismatch { .. })
        ));
    }

    #[test]
    fn consistency_rejects_rho_zero() {
        let p = params(0.0, 1.0, 1.0, 3);
        let b = BlowupBranch::for_params(&p, BlowupDirection::XPlus).unwrap();
        assert!(matches!(
            chart_to_blowup_consistency(&p, &b, &[(0.2, 0.1), (0.0, 0.3)]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn printed_rescaling_exponents_are_recovered() {
        for m in 2..=7 {
            let p = params(0.3, -0.8, 0.6, m);
            for d in BlowupDirection::ALL {
                let b = BlowupBranch::for_params(&p, d).unwrap();
                let k = fitted_rescaling_exponent(&p, &b, 0.3, 0.4).unwrap();
                assert!(
                    (k - b.rescaling_exponent() as f64).abs() < 1e-6,
                    "m={m} {d:?} k={k}"
                );
            }
        }
    }

    #[test]
    fn axis_chart_swap() {
        // (x, y) = (1, 3): U1 (3, 1) -> U2 (1/3, 1/3)
        let (c, u, v) = swap_axis_chart(ChartId::U1, 3.0, 1.0).unwrap();
        assert_eq!(c, ChartId::U2);
        assert!((u - 1.0 / 3.0).abs() < 1e-15 && (v - 1.0 / 3.0).abs() < 1e-15);
        // (x, y) = (-1, 3): V1 (-3, -1) -> U2 (-1/3, 1/3)
        let (c, u, v) = swap_axis_chart(ChartId::V1, -3.0, -1.0).unwrap();
        assert_eq!(c, ChartId::U2);
        let s = from_chart(c, u, v).unwrap();
        assert!((s.x + 1.0).abs() < 1e-12 && (s.y - 3.0).abs() < 1e-12);
        // at infinity
        let (c, u, v) = swap_axis_chart(ChartId::U2, -4.0, 0.0).unwrap();
        assert_eq!((c, u, v), (ChartId::V1, -0.25, 0.0));
    }
}
