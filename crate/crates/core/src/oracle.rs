//! Numerical oracles that check the closed-form center, cycle and
//! limit-cycle statements by integrating orbits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{finite_equilibria, has_unique_finite_equilibrium};
use crate::infinity::{infinite_equilibria, sector_structure_at_infinity, SectorStructure};
use crate::integrator::{
    integrate, AxisSide, CrossingDirection, IntegrationOptions, Section, SectionStop, Termination,
};
use crate::model::{
    divergence, eval_field, potential_curvature, potential_energy, Parameters, PlaneState,
};

/// Relative closure tolerance of the return map.
pub const CLOSE_TOL: f64 = 1e-6;
/// Integration tolerance used by the oracles.
pub const ORACLE_RTOL: f64 = 1e-10;
pub const GLOBAL_CENTER_RADII: [f64; 5] = [0.1, 1.0, 5.0, 20.0, 100.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ReturnOutcome {
    Closed {
        period: f64,
    },
    SpiralIn {
        next_radius: f64,
    },
    SpiralOut {
        next_radius: f64,
    },
    Escape,
    /// No return to the section within the time budget (the orbit settles
    /// on an equilibrium or wanders off slowly).
    NoReturn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnMapResult {
    pub radius: f64,
    pub outcome: ReturnOutcome,
    /// Return point on the section, or the last state reached.
    pub section_point: PlaneState,
    /// The orbit crossed the negative x-axis before returning.
    pub encircles_origin: bool,
    /// Time of the first crossing of the negative x-axis.
    pub half_period: Option<f64>,
}

impl ReturnMapResult {
    pub fn is_closed(&self) -> bool {
        matches!(self.outcome, ReturnOutcome::Closed { .. })
    }

    /// Closed orbit around the origin.
    pub fn is_closed_around_origin(&self) -> bool {
        self.is_closed() && self.encircles_origin
    }

    pub fn next_radius(&self) -> Option<f64> {
        match self.outcome {
            ReturnOutcome::Closed { .. } => Some(self.section_point.x),
            ReturnOutcome::SpiralIn { next_radius } | ReturnOutcome::SpiralOut { next_radius } => {
                Some(next_radius)
            }
            _ => None,
        }
    }
}

/// Orbits leaving `ORACLE_ESCAPE_FACTOR` times the starting scale count as
/// escaped.
pub const ORACLE_ESCAPE_FACTOR: f64 = 1e4;

fn oracle_options(p: &Parameters, r: f64) -> IntegrationOptions {
    let h0 = potential_energy(p, r).abs();
    IntegrationOptions {
        escape_radius: ORACLE_ESCAPE_FACTOR * r.max((2.0 * h0).sqrt()).max(1.0),
        ..IntegrationOptions::default().with_tolerance(ORACLE_RTOL)
    }
}

/// First return to `{y = 0, x > 0}` of the orbit through `(r, 0)`, crossing
/// in the direction the orbit leaves the section.
pub fn poincare_return(p: &Parameters, r: f64) -> Result<ReturnMapResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition("return radius must be positive".into()));
    }
    let s0 = PlaneState::new(r, 0.0);
    let (_, ydot) = eval_field(p, s0);
    let scale = 1f64
        .max((p.epsilon() * r.powi(p.m() as i32)).abs())
        .max((p.sigma() * r).abs());
    if ydot.abs() <= 1e-12 * scale {
        return Err(Error::EquilibriumStart(s0));
    }
    let direction = if ydot > 0.0 {
        CrossingDirection::Upward
    } else {
        CrossingDirection::Downward
    };
    let opts = IntegrationOptions {
        stop: Some(SectionStop {
            section: Section {
                side: AxisSide::PositiveX,
                direction,
            },
            count: 1,
        }),
        ..oracle_options(p, r)
    };
    let traj = integrate(p, s0, &opts)?;
    let last = traj.last().expect("trajectory holds its start").state;
    let negative = traj.crossings.iter().find(|c| c.state.x < 0.0);
    let mut result = ReturnMapResult {
        radius: r,
        outcome: ReturnOutcome::NoReturn,
        section_point: last,
        encircles_origin: negative.is_some(),
        half_period: negative.map(|c| c.t),
    };
    match traj.termination {
        Termination::Escaped { .. } => result.outcome = ReturnOutcome::Escape,
        Termination::TimeExhausted => {}
        Termination::SectionEvent { .. } => {
            let ret = traj.crossings.last().expect("section event is a crossing");
            let next = ret.state.x;
            result.section_point = ret.state;
            result.outcome = if (next - r).abs() <= CLOSE_TOL * r.max(1.0) {
                ReturnOutcome::Closed { period: ret.t }
            } else if next < r {
                ReturnOutcome::SpiralIn { next_radius: next }
            } else {
                ReturnOutcome::SpiralOut { next_radius: next }
            };
        }
    }
    Ok(result)
}

/// Iterates the return map up to `n` times, stopping at the first outcome
/// that is not a return.
pub fn return_sequence(p: &Parameters, r: f64, n: usize) -> Result<Vec<ReturnMapResult>> {
    let mut out = Vec::with_capacity(n);
    let mut radius = r;
    for _ in 0..n {
        let res = poincare_return(p, radius)?;
        out.push(res);
        match res.outcome {
            ReturnOutcome::SpiralIn { next_radius } | ReturnOutcome::SpiralOut { next_radius } => {
                radius = next_radius
            }
            _ => break,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterTestEvidence {
    pub passed: bool,
    pub returns: Vec<ReturnMapResult>,
}

/// True iff the orbit through `(r, 0)` is closed around the origin for
/// every radius.
pub fn numeric_center_test(p: &Parameters, radii: &[f64]) -> Result<CenterTestEvidence> {
    if radii.is_empty() {
        return Err(Error::Precondition(
            "at least one radius is required".into(),
        ));
    }
    let returns = radii
        .iter()
        .map(|&r| poincare_return(p, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CenterTestEvidence {
        passed: returns.iter().all(ReturnMapResult::is_closed_around_origin),
        returns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalCenterEvidence {
    pub passed: bool,
    pub unique_equilibrium: bool,
    /// Skipped when the equilibrium is not unique.
    pub center: Option<CenterTestEvidence>,
    /// Sector structure at infinity (`m > 1`).
    pub sectors: Option<SectorStructure>,
    /// Number of infinite equilibria (`m = 1`).
    pub infinite_points: Option<usize>,
}

pub fn numeric_global_center_test(p: &Parameters) -> Result<GlobalCenterEvidence> {
    let unique = has_unique_finite_equilibrium(p);
    let mut ev = GlobalCenterEvidence {
        passed: false,
        unique_equilibrium: unique,
        center: None,
        sectors: None,
        infinite_points: None,
    };
    if !unique {
        return Ok(ev);
    }
    let infinity_ok = if p.m() > 1 {
        let s = sector_structure_at_infinity(p)?;
        ev.sectors = Some(s);
        s == SectorStructure::new(2, 0, 0)
    } else {
        let n = infinite_equilibria(p).len();
        ev.infinite_points = Some(n);
        n == 0
    };
    let center = numeric_center_test(p, &GLOBAL_CENTER_RADII)?;
    ev.passed = infinity_ok && center.passed;
    ev.center = Some(center);
    Ok(ev)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CycleKind {
    NoCycle,
    Homoclinic,
    Heteroclinic,
    DoubleHomoclinic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub kind: CycleKind,
    pub saddles: Vec<PlaneState>,
    /// Energy of the connection; `None` without a cycle.
    pub level: Option<f64>,
}

/// Connection cycles of the conservative system, read off the strict local
/// maxima of the potential.
pub fn detect_connection_cycles(p: &Parameters) -> Result<CycleReport> {
    if p.alpha() != 0.0 {
        return Err(Error::InvalidParameters(
            "connection cycles only exist for alpha = 0".into(),
        ));
    }
    let none = CycleReport {
        kind: CycleKind::NoCycle,
        saddles: vec![],
        level: None,
    };
    if p.m() == 1 {
        return Ok(none);
    }
    let (mut maxima, mut wells) = (Vec::new(), 0);
    for e in finite_equilibria(p) {
        let c = potential_curvature(p, e.location.x);
        if p.is_negligible(c) {
            continue;
        }
        if c < 0.0 {
            maxima.push(e.location);
        } else {
            wells += 1;
        }
    }
    // a separatrix loop needs a well for every loop it encloses
    let kind = match (maxima.len(), wells, p.m_is_odd()) {
        (1, 1, false) => CycleKind::Homoclinic,
        (1, 2, true) => CycleKind::DoubleHomoclinic,
        (2, 1, true) => CycleKind::Heteroclinic,
        _ => return Ok(none),
    };
    let level = potential_energy(p, maxima[0].x);
    Ok(CycleReport {
        kind,
        saddles: maxima,
        level: Some(level),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub radius: f64,
    pub result: Option<ReturnMapResult>,
    /// Why the probe has no result.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleVerdict {
    pub divergence: f64,
    /// Divergence has a fixed nonzero sign on the whole plane.
    pub bendixson_holds: bool,
    pub probes: Vec<Probe>,
    pub no_closed_orbit_found: bool,
}

impl LimitCycleVerdict {
    pub fn holds(&self) -> bool {
        self.bendixson_holds && self.no_closed_orbit_found
    }
}

pub fn limit_cycle_absence_check(p: &Parameters, radii: &[f64]) -> Result<LimitCycleVerdict> {
    if p.alpha() == 0.0 {
        return Err(Error::InvalidParameters(
            "limit-cycle absence needs alpha != 0".into(),
        ));
    }
    let div = divergence(p);
    let probes: Vec<Probe> = radii
        .iter()
        .map(|&r| match poincare_return(p, r) {
            Ok(res) => Probe {
                radius: r,
                result: Some(res),
                note: None,
            },
            Err(e) => Probe {
                radius: r,
                result: None,
                note: Some(e.to_string()),
            },
        })
        .collect();
    let no_closed = probes
        .iter()
        .all(|pr| pr.result.is_none_or(|r| !r.is_closed()));
    Ok(LimitCycleVerdict {
        divergence: div,
        bendixson_holds: div != 0.0,
        probes,
        no_closed_orbit_found: no_closed,
    })
}

/// Distance from the origin to the nearest other finite equilibrium.
pub fn nearest_equilibrium_gap(p: &Parameters) -> Option<f64> {
    finite_equilibria(p)
        .iter()
        .map(|e| e.location.x.abs())
        .filter(|&d| d > 0.0)
        .reduce(f64::min)
}

/// Radii well inside the period annulus of the origin, when it has one.
pub fn small_radii(p: &Parameters) -> Vec<f64> {
    let reach = nearest_equilibrium_gap(p).map_or(1.0, |d| d.min(1.0));
    vec![0.05 * reach, 0.2 * reach]
}
