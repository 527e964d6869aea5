//! Acceptance grid: reproduces each qualitative claim numerically or against
//! transcribed tables and reports one verdict per criterion.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{center_at_origin, equilibrium, CoarseKind, EquilibriumLabel};
use crate::infinity::{
    blowup_field, chart_field, chart_to_blowup_consistency, infinite_equilibria,
    sector_structure_at_infinity, BlowupBranch, BlowupDirection, ChartId, InfiniteKind,
    SectorStructure,
};
use crate::integrator::{energy_drift, integrate, IntegrationOptions, Termination};
use crate::model::{dissipation_rate, divergence, total_energy, Parameters, PlaneState};
use crate::oracle::{
    detect_connection_cycles, limit_cycle_absence_check, numeric_center_test, poincare_return,
    small_radii, CycleKind, ReturnOutcome, CLOSE_TOL,
};
use crate::portrait::{census, classify_portrait, CensusSignature, Figure};

pub const GRID_SIGNS: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tables,
    Centers,
    Infinity,
    Cycles,
    LimitCycles,
    Energy,
    Portraits,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "tables",
        "centers",
        "infinity",
        "cycles",
        "limitcycles",
        "energy",
        "portraits",
        "all",
    ];

    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Tables => vec![1],
            Suite::Centers => vec![2, 9],
            Suite::Infinity => vec![3, 7],
            Suite::Cycles => vec![6],
            Suite::LimitCycles => vec![4],
            Suite::Energy => vec![5],
            Suite::Portraits => vec![8],
            Suite::All => (1..=9).collect(),
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tables" => Suite::Tables,
            "centers" => Suite::Centers,
            "infinity" => Suite::Infinity,
            "cycles" => Suite::Cycles,
            "limitcycles" => Suite::LimitCycles,
            "energy" => Suite::Energy,
            "portraits" => Suite::Portraits,
            "all" => Suite::All,
            other => return Err(Error::InvalidParameters(format!("unknown suite {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {:<28} {}  {} ({:.2} s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed_secs
        )
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "equilibrium tables",
        2 => "global center return map",
        3 => "even-degree escape",
        4 => "no limit cycles",
        5 => "energy conservation",
        6 => "cycle taxonomy",
        7 => "infinite equilibria",
        8 => "portrait totality",
        9 => "center-focus agreement",
        _ => "unknown",
    }
}

/// Wall-clock budget per criterion, where one is set.
pub fn runtime_limit(id: u8) -> Option<f64> {
    match id {
        1 => Some(5.0),
        2 => Some(30.0),
        _ => None,
    }
}

fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
    Parameters::new(alpha, epsilon, sigma, m).expect("grid parameters are valid")
}

type Check = std::result::Result<String, String>;

/// Runs one criterion on the current rayon pool.
pub fn run_criterion(id: u8) -> CriterionResult {
    let start = Instant::now();
    let outcome: Check = match id {
        1 => check_tables(),
        2 => check_global_center(),
        3 => check_even_escape(),
        4 => check_limit_cycles(),
        5 => check_energy(),
        6 => check_cycles(),
        7 => check_infinity(),
        8 => check_portraits(),
        9 => check_center_agreement(),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = runtime_limit(id) {
        if elapsed >= limit {
            passed = false;
            detail = format!("{detail}; runtime {elapsed:.2} s exceeds {limit} s");
        }
    }
    CriterionResult {
        id,
        name: criterion_name(id).into(),
        passed,
        detail,
        elapsed_secs: elapsed,
    }
}

/// Runs the criteria of a suite in order, with grid work spread over
/// `workers` threads (rayon's default when `None`).
pub fn run_suite(suite: Suite, workers: Option<usize>) -> Result<Vec<CriterionResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Error::InvalidParameters(
                "worker count must be positive".into(),
            ));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))?;
    Ok(pool.install(|| suite.criteria().into_iter().map(run_criterion).collect()))
}

// Stability of (origin, E+, E-) per sign triple (sigma, epsilon, alpha), as
// tabulated for m > 1; `None` marks an empty cell.
type Row = ((i8, i8, i8), [Option<CoarseKind>; 3]);

fn table_rows(odd: bool) -> Vec<Row> {
    use CoarseKind::{Saddle as Sa, Stable as St, Unstable as Un};
    let pair = |k: CoarseKind| {
        if odd {
            [Some(k), Some(k)]
        } else {
            [Some(k), None]
        }
    };
    let row = |s, e, a, o: CoarseKind, extra: Option<CoarseKind>| -> Row {
        let [ep, em] = extra.map_or([None, None], pair);
        ((s, e, a), [Some(o), ep, em])
    };
    vec![
        row(1, 1, 1, St, None),
        row(1, 1, -1, Un, None),
        row(-1, -1, 1, Sa, None),
        row(-1, -1, -1, Sa, None),
        row(1, -1, 1, St, Some(Sa)),
        row(1, -1, -1, Un, Some(Sa)),
        row(-1, 1, 1, Sa, Some(St)),
        row(-1, 1, -1, Sa, Some(Un)),
    ]
}

fn sgn(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else {
        -1
    }
}

fn check_tables() -> Check {
    let mut points = Vec::new();
    for m in 2..=5u32 {
        for &s in &GRID_SIGNS {
            for &e in &GRID_SIGNS {
                for &a in &GRID_SIGNS {
                    points.push(params(a, e, s, m));
                }
            }
        }
    }
    let results: Vec<(usize, Vec<String>)> = points
        .par_iter()
        .map(|p| {
            let rows = table_rows(p.m_is_odd());
            let key = (sgn(p.sigma()), sgn(p.epsilon()), sgn(p.alpha()));
            let cells = rows
                .iter()
                .find(|r| r.0 == key)
                .expect("every sign triple has a row")
                .1;
            let labels = [
                EquilibriumLabel::Origin,
                EquilibriumLabel::EPlus,
                EquilibriumLabel::EMinus,
            ];
            let mut checked = 0;
            let mut bad = Vec::new();
            for (cell, label) in cells.iter().zip(labels) {
                let Some(expected) = cell else { continue };
                checked += 1;
                match equilibrium(p, label) {
                    Ok(eq) if eq.kind.coarse() == *expected => {}
                    Ok(eq) => bad.push(format!("{p:?} {label}: {:?} vs {expected:?}", eq.kind)),
                    Err(_) => bad.push(format!("{p:?} {label}: missing")),
                }
            }
            (checked, bad)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    if bad.is_empty() {
        Ok(format!(
            "{checked} table cells over {} points agree",
            points.len()
        ))
    } else {
        Err(format!(
            "{} of {checked} cells disagree, first: {}",
            bad.len(),
            bad[0]
        ))
    }
}

fn check_global_center() -> Check {
    let cases: Vec<(u32, f64)> = [3u32, 5]
        .iter()
        .flat_map(|&m| [0.1, 1.0, 5.0, 20.0].map(|r| (m, r)))
        .collect();
    let results: Vec<std::result::Result<f64, String>> = cases
        .par_iter()
        .map(|&(m, r)| {
            let p = params(0.0, 1.0, 1.0, m);
            let res = poincare_return(&p, r).map_err(|e| format!("m = {m}, r = {r}: {e}"))?;
            match res.outcome {
                ReturnOutcome::Closed { .. } => {
                    let rel = (res.section_point.x - r).abs() / r.max(1.0);
                    if rel < CLOSE_TOL {
                        Ok(rel)
                    } else {
                        Err(format!("m = {m}, r = {r}: closure error {rel:e}"))
                    }
                }
                o => Err(format!("m = {m}, r = {r}: {o:?}")),
            }
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(format!(
        "{} closed orbits, worst closure {worst:.1e}",
        cases.len()
    ))
}

fn check_even_escape() -> Check {
    let mut times = Vec::new();
    for m in [2u32, 4] {
        let p = params(0.0, 1.0, 1.0, m);
        let traj = integrate(
            &p,
            PlaneState::new(-10.0, 0.0),
            &IntegrationOptions::default(),
        )
        .map_err(|e| format!("m = {m}: {e}"))?;
        match traj.termination {
            Termination::Escaped { t } if t.is_finite() => {
                times.push(format!("m = {m} at t = {t:.4}"))
            }
            other => return Err(format!("m = {m}: {other:?}")),
        }
    }
    Ok(format!("escaped beyond 1e6: {}", times.join(", ")))
}

pub const LIMIT_CYCLE_RADII: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const LIMIT_CYCLE_SEED: u64 = 0x5eed_d0ff;

/// Seeded parameter draws with `|alpha|` in `[0.1, 2]`.
pub fn random_damped_draws(n: usize, seed: u64) -> Vec<Parameters> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signed = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        let v: f64 = rng.gen_range(lo..=hi);
        if rng.gen_bool(0.5) {
            v
        } else {
            -v
        }
    };
    (0..n)
        .map(|_| {
            let alpha = signed(&mut rng, 0.1, 2.0);
            let epsilon = signed(&mut rng, 0.25, 2.0);
            let sigma = signed(&mut rng, 0.25, 2.0);
            let m = rng.gen_range(1..=5u32);
            params(alpha, epsilon, sigma, m)
        })
        .collect()
}

fn check_limit_cycles() -> Check {
    let draws = random_damped_draws(20, LIMIT_CYCLE_SEED);
    let verdicts: Vec<std::result::Result<usize, String>> = draws
        .par_iter()
        .map(|p| {
            if divergence(p) != -p.alpha() {
                return Err(format!("{p:?}: divergence {} is not -alpha", divergence(p)));
            }
            let v = limit_cycle_absence_check(p, &LIMIT_CYCLE_RADII).map_err(|e| e.to_string())?;
            if !v.holds() {
                return Err(format!("{p:?}: closed orbit found"));
            }
            Ok(v.probes.iter().filter(|pr| pr.result.is_some()).count())
        })
        .collect();
    let mut probes = 0;
    for v in verdicts {
        probes += v?;
    }
    Ok(format!("20 draws, {probes} return-map probes, none closed"))
}

/// Central-difference estimate of dH/dt at `s`, integrating `h` forward
/// and backward.
fn energy_rate(p: &Parameters, s: PlaneState, h: f64) -> Result<f64> {
    let opts = IntegrationOptions::default()
        .with_tolerance(1e-13)
        .with_max_time(h);
    let fwd = integrate(p, s, &opts)?.last().expect("nonempty").state;
    let bwd = integrate(p, s, &opts.reversed())?
        .last()
        .expect("nonempty")
        .state;
    Ok((total_energy(p, fwd) - total_energy(p, bwd)) / (2.0 * h))
}

fn check_energy() -> Check {
    let p = params(0.0, 1.0, 1.0, 3);
    let opts = IntegrationOptions::default()
        .with_tolerance(1e-10)
        .with_max_time(100.0);
    let traj = integrate(&p, PlaneState::new(1.0, 0.0), &opts).map_err(|e| e.to_string())?;
    if traj.termination != Termination::TimeExhausted {
        return Err(format!("benchmark orbit ended with {:?}", traj.termination));
    }
    let drift = energy_drift(&p, &traj).map_err(|e| e.to_string())?;
    if !(drift < 1e-8) {
        return Err(format!("energy drift {drift:e} over T = 100"));
    }

    let damped = params(0.5, 1.0, 1.0, 3);
    let traj = integrate(
        &damped,
        PlaneState::new(1.0, 0.0),
        &IntegrationOptions::default().with_max_time(10.0),
    )
    .map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for s in traj.samples.iter().filter(|s| s.state.y.abs() > 0.1) {
        let rate = energy_rate(&damped, s.state, 1e-4).map_err(|e| e.to_string())?;
        let exact = dissipation_rate(&damped, s.state);
        worst = worst.max(((rate - exact) / exact).abs());
        used += 1;
    }
    if used == 0 {
        return Err("no samples with |y| > 0.1 on the damped run".into());
    }
    if worst < 1e-5 {
        Ok(format!(
            "drift {drift:.1e}; dH/dt vs -alpha y^2 worst relative {worst:.1e} over {used} samples"
        ))
    } else {
        Err(format!("dissipation identity off by {worst:e}"))
    }
}

fn check_cycles() -> Check {
    let cases = [
        (params(0.0, -1.0, 1.0, 3), CycleKind::Heteroclinic, 0.25),
        (params(0.0, 1.0, -1.0, 2), CycleKind::Homoclinic, 0.0),
        (params(0.0, 1.0, -1.0, 3), CycleKind::DoubleHomoclinic, 0.0),
    ];
    for (p, kind, level) in cases {
        let c = detect_connection_cycles(&p).map_err(|e| e.to_string())?;
        let got = c.level.unwrap_or(f64::NAN);
        if c.kind != kind || !((got - level).abs() < 1e-10) {
            return Err(format!("{p:?}: {:?} at level {got}", c.kind));
        }
        for s in &c.saddles {
            if (total_energy(&p, *s) - got).abs() > 1e-10 {
                return Err(format!("{p:?}: saddle {s:?} off the connection level"));
            }
        }
    }
    Ok("heteroclinic 0.25, homoclinic 0, double-homoclinic 0".into())
}

/// Expected infinite equilibria for `m = 1`, from the stated case split.
fn m1_expected(p: &Parameters) -> Vec<InfiniteKind> {
    let (alpha, k) = (p.alpha(), p.epsilon() + p.sigma());
    let d = alpha * alpha - 4.0 * k;
    if p.degeneracy().discriminant_zero {
        vec![InfiniteKind::SaddleNode]
    } else if d < 0.0 {
        vec![]
    } else if k < 0.0 {
        vec![InfiniteKind::StableNode, InfiniteKind::UnstableNode]
    } else if alpha > 0.0 {
        vec![InfiniteKind::Saddle, InfiniteKind::UnstableNode]
    } else {
        vec![InfiniteKind::StableNode, InfiniteKind::Saddle]
    }
}

/// Zeros of the U1 field on `v = 0`, located by scanning and bisection,
/// with kinds read from a finite-difference Jacobian.
fn m1_numeric(p: &Parameters) -> Vec<(f64, InfiniteKind)> {
    let f = |u: f64| chart_field(p, ChartId::U1, u, 0.0).0;
    let mut out = Vec::new();
    let (lo, hi, n) = (-10.0, 10.0, 20_000);
    let step = (hi - lo) / n as f64;
    let classify = |u: f64| {
        let h = 1e-6;
        let a = (f(u + h) - f(u - h)) / (2.0 * h);
        // transversal direction: dv'/dv at v = 0
        let b = (chart_field(p, ChartId::U1, u, h).1 - chart_field(p, ChartId::U1, u, -h).1)
            / (2.0 * h);
        let kind = if a.abs() < 1e-6 || b.abs() < 1e-6 {
            InfiniteKind::SaddleNode
        } else if a < 0.0 && b < 0.0 {
            InfiniteKind::StableNode
        } else if a > 0.0 && b > 0.0 {
            InfiniteKind::UnstableNode
        } else {
            InfiniteKind::Saddle
        };
        (u, kind)
    };
    let mut prev = f(lo);
    for i in 1..=n {
        let u = lo + step * i as f64;
        let cur = f(u);
        if cur == 0.0 {
            out.push(classify(u));
        } else if prev != 0.0 && (prev > 0.0) != (cur > 0.0) {
            let (mut a, mut b) = (u - step, u);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if (f(mid) > 0.0) == (prev > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(classify(0.5 * (a + b)));
        }
        prev = cur;
    }
    // a double root touches zero without a sign change
    if out.is_empty() {
        let u = -0.5 * p.alpha();
        if f(u).abs() < 1e-9 {
            out.push(classify(u));
        }
    }
    // larger root first
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

fn expected_sectors(p: &Parameters) -> SectorStructure {
    match (p.m_is_odd(), p.epsilon() > 0.0, p.sigma() > 0.0) {
        (false, _, _) => SectorStructure::new(0, 3, 0),
        (true, true, _) => SectorStructure::new(2, 0, 0),
        (true, false, false) => SectorStructure::new(0, 2, 2),
        (true, false, true) => SectorStructure::new(0, 4, 2),
    }
}

fn check_infinity() -> Check {
    // m = 1 split, including zero discriminants
    let mut m1 = Vec::new();
    for &alpha in &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        for &k in &[-1.0, 0.25, 1.0, 2.0] {
            m1.push(params(alpha, k - 0.3, 0.3, 1));
        }
        if alpha != 0.0 {
            m1.push(params(alpha, alpha * alpha / 4.0 - 0.3, 0.3, 1));
        }
    }
    let mut saddle_nodes = 0;
    for p in &m1 {
        let got: Vec<InfiniteKind> = infinite_equilibria(p).iter().map(|e| e.kind).collect();
        let expected = m1_expected(p);
        if got != expected {
            return Err(format!("{p:?}: {got:?}, expected {expected:?}"));
        }
        let numeric = m1_numeric(p);
        let nk: Vec<InfiniteKind> = numeric.iter().map(|n| n.1).collect();
        if nk != expected {
            return Err(format!(
                "{p:?}: numeric zeros give {nk:?}, expected {expected:?}"
            ));
        }
        for (e, n) in infinite_equilibria(p).iter().zip(&numeric) {
            if (e.u - n.0).abs() > 1e-6 {
                return Err(format!(
                    "{p:?}: infinite point at u = {} vs numeric {}",
                    e.u, n.0
                ));
            }
        }
        saddle_nodes += usize::from(expected == [InfiniteKind::SaddleNode]);
    }

    // m > 1 sector counts
    let mut sector_cases = 0;
    for m in 2..=7u32 {
        for &s in &GRID_SIGNS {
            for &e in &GRID_SIGNS {
                let p = params(0.5, e, s, m);
                let got = sector_structure_at_infinity(&p).map_err(|err| err.to_string())?;
                if got != expected_sectors(&p) {
                    return Err(format!("{p:?}: sectors {got:?}"));
                }
                sector_cases += 1;
            }
        }
    }

    // blow-up consistency, 100 samples per branch
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut branches = 0;
    for m in 2..=7u32 {
        let p = params(
            rng.gen_range(-2.0..2.0),
            if rng.gen_bool(0.5) { 1.3 } else { -0.7 },
            if rng.gen_bool(0.5) { 0.9 } else { -1.4 },
            m,
        );
        for dir in BlowupDirection::ALL {
            let b = BlowupBranch::for_params(&p, dir).map_err(|e| e.to_string())?;
            let samples: Vec<(f64, f64)> = (0..100)
                .map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let err = chart_to_blowup_consistency(&p, &b, &samples).map_err(|e| e.to_string())?;
            if blowup_field(&p, &b, 0.5, 0.5).is_err() {
                return Err(format!("branch {dir:?} rejected m = {m}"));
            }
            worst = worst.max(err);
            branches += 1;
        }
    }
    if !(worst < 1e-9) {
        return Err(format!(
            "blow-up consistency {worst:e} over {branches} branches"
        ));
    }
    Ok(format!(
        "{} m = 1 cases ({saddle_nodes} saddle-nodes), {sector_cases} sector cases, \
         blow-up worst {worst:.1e} over {branches} branches",
        m1.len()
    ))
}

/// Grid for the portrait checks.
pub fn portrait_grid() -> Vec<Parameters> {
    let mut out = Vec::new();
    for m in 1..=6u32 {
        for &a in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
            for &s in &GRID_SIGNS {
                for &e in &GRID_SIGNS {
                    out.push(params(a, e, s, m));
                }
            }
        }
    }
    out
}

fn check_portraits() -> Check {
    let grid = portrait_grid();
    let rows: Vec<std::result::Result<Option<(String, CensusSignature)>, String>> = grid
        .par_iter()
        .map(|p| {
            let class = classify_portrait(p);
            if class.panel.is_some() == class.boundary.is_some() {
                return Err(format!("{p:?}: needs exactly one of panel / boundary"));
            }
            let c = census(p).map_err(|e| e.to_string())?;
            if !c.is_consistent() {
                return Err(format!("{p:?}: {:?}", c.diagnostics));
            }
            if class.panel.is_none() {
                return Ok(None);
            }
            if p.m() >= 2 && p.alpha() != 0.0 {
                let even_fig = class.figure == Figure::MEven;
                if even_fig != (p.m() % 2 == 0) {
                    return Err(format!("{p:?}: figure {}", class.figure));
                }
            }
            Ok(Some((class.label(), c.signature())))
        })
        .collect();
    let mut panels: BTreeMap<String, CensusSignature> = BTreeMap::new();
    let (mut assigned, mut flagged) = (0, 0);
    for row in rows {
        match row? {
            None => flagged += 1,
            Some((label, sig)) => {
                assigned += 1;
                if let Some(prev) = panels.get(&label) {
                    if *prev != sig {
                        return Err(format!(
                            "panel {label}: signatures differ {prev:?} vs {sig:?}"
                        ));
                    }
                } else {
                    panels.insert(label, sig);
                }
            }
        }
    }
    Ok(format!(
        "{assigned} points on {} panels, {flagged} flagged boundary/uncovered",
        panels.len()
    ))
}

/// Parameter points of the center-focus agreement grid.
pub fn center_grid() -> Vec<Parameters> {
    let mut out = Vec::new();
    for m in 1..=5u32 {
        for &a in &[-0.5, 0.0, 0.5] {
            for &s in &GRID_SIGNS {
                for &e in &GRID_SIGNS {
                    let p = params(a, e, s, m);
                    if !p.degeneracy().any() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn check_center_agreement() -> Check {
    let grid = center_grid();
    let rows: Vec<std::result::Result<bool, String>> = grid
        .par_iter()
        .map(|p| {
            let numeric = numeric_center_test(p, &small_radii(p))
                .map_err(|e| format!("{p:?}: {e}"))?
                .passed;
            let closed_form = center_at_origin(p).origin_is_center;
            if numeric == closed_form {
                Ok(numeric)
            } else {
                Err(format!(
                    "{p:?}: numeric {numeric}, closed form {closed_form}"
                ))
            }
        })
        .collect();
    let mut centers = 0;
    let mut disagreements = Vec::new();
    for r in rows {
        match r {
            Ok(c) => centers += usize::from(c),
            Err(e) => disagreements.push(e),
        }
    }
    if disagreements.is_empty() {
        Ok(format!("{} points agree ({centers} centers)", grid.len()))
    } else {
        Err(format!(
            "{} disagreements, first: {}",
            disagreements.len(),
            disagreements[0]
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_partition_the_criteria() {
        let mut ids: Vec<u8> = Suite::NAMES[..7]
            .iter()
            .flat_map(|n| n.parse::<Suite>().unwrap().criteria())
            .collect();
        ids.sort();
        assert_eq!(ids, Suite::All.criteria());
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn tables_have_one_row_per_sign_triple() {
        for odd in [false, true] {
            let rows = table_rows(odd);
            assert_eq!(rows.len(), 8);
            let mut keys: Vec<_> = rows.iter().map(|r| r.0).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), 8);
        }
    }

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let a = random_damped_draws(20, 1);
        assert_eq!(a, random_damped_draws(20, 1));
        assert!(a.iter().all(|p| (0.1..=2.0).contains(&p.alpha().abs())));
    }

    #[test]
    fn m1_numeric_zeros_match_closed_form() {
        let p = Parameters::new(3.0, 1.7, 0.3, 1).unwrap();
        let z = m1_numeric(&p);
        assert_eq!(z.len(), 2);
        assert!((z[0].0 + 1.0).abs() < 1e-9 && (z[1].0 + 2.0).abs() < 1e-9);
        assert_eq!(z[0].1, InfiniteKind::Saddle);
        assert_eq!(z[1].1, InfiniteKind::UnstableNode);
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(42).passed);
        assert!(run_suite(Suite::Cycles, Some(0)).is_err());
    }
}
