//! Numerical integration of the oscillator in the plane and on the Poincaré
//! disc (through the chart atlas), with x-axis section events and escape
//! detection.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infinity::{chart_field, from_chart, swap_axis_chart, to_chart, ChartId};
use crate::model::{eval_field, total_energy, Parameters, PlaneState};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const DEFAULT_MAX_TIME: f64 = 1e4;
/// Event times are bisected on the dense output to this width.
pub const EVENT_TIME_TOL: f64 = 1e-12;

/// Axis-chart to plane hysteresis: leave the plane above 2, come back below 1.5.
const PLANE_EXIT: f64 = 2.0;
const PLANE_ENTRY: f64 = 1.5;
/// Axis charts hand over to the complementary axis chart when `|u| > 2`.
const AXIS_SWAP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    AdaptiveRK,
    SymplecticLeapfrog,
}

/// Half of the x-axis used as a Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisSide {
    PositiveX,
    NegativeX,
}

/// Sign change of `y` that counts as a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingDirection {
    /// `y` goes from positive to negative.
    Downward,
    /// `y` goes from negative to positive.
    Upward,
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub side: AxisSide,
    pub direction: CrossingDirection,
}

impl Section {
    fn accepts(&self, x: f64, y_before: f64, y_after: f64) -> bool {
        let side = match self.side {
            AxisSide::PositiveX => x > 0.0,
            AxisSide::NegativeX => x < 0.0,
        };
        let dir = match self.direction {
            CrossingDirection::Downward => y_before > 0.0 && y_after <= 0.0,
            CrossingDirection::Upward => y_before < 0.0 && y_after >= 0.0,
            CrossingDirection::Either => (y_before > 0.0) != (y_after > 0.0),
        };
        side && dir
    }
}

/// Stop after `count` crossings of `section`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionStop {
    pub section: Section,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step; the fixed step of the leapfrog method.
    pub max_step: f64,
    pub escape_radius: f64,
    pub max_time: f64,
    /// Integrate the time-reversed flow. Sample times are then elapsed
    /// backward time (physical time is `-t`).
    pub reverse_time: bool,
    pub stop: Option<SectionStop>,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            method: Method::AdaptiveRK,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            max_time: DEFAULT_MAX_TIME,
            reverse_time: false,
            stop: None,
        }
    }
}

impl IntegrationOptions {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self.abs_tol = tol * 1e-2;
        self
    }

    pub fn with_max_time(mut self, t: f64) -> Self {
        self.max_time = t;
        self
    }

    pub fn reversed(mut self) -> Self {
        self.reverse_time = !self.reverse_time;
        self
    }

    pub fn validate(&self, p: &Parameters) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameters(msg.into()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.escape_radius > 0.0) {
            return bad("escape radius must be positive");
        }
        if !(self.max_step > 0.0) || !(self.max_time >= 0.0) {
            return bad("max_step must be positive and max_time nonnegative");
        }
        if self.method == Method::SymplecticLeapfrog && p.alpha() != 0.0 {
            return bad("the leapfrog method is only valid for alpha = 0");
        }
        if matches!(self.stop, Some(SectionStop { count: 0, .. })) {
            return bad("section stop count must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: PlaneState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Termination {
    TimeExhausted,
    Escaped { t: f64 },
    SectionEvent { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Every crossing of the x-axis, located when a section stop is requested.
    pub crossings: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn initial(&self) -> Option<PlaneState> {
        self.samples.first().map(|s| s.state)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV with header `t,x,y`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.state.x, s.state.y);
        }
        out
    }
}

/// One accepted step with a cubic Hermite interpolant.
#[derive(Debug, Clone, Copy)]
struct DenseStep {
    t0: f64,
    t1: f64,
    y0: [f64; 2],
    y1: [f64; 2],
    f0: [f64; 2],
    f1: [f64; 2],
}

impl DenseStep {
    fn eval(&self, t: f64) -> [f64; 2] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] =
                h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }

    /// Bisection for the sign change of the `y` component inside the step.
    fn locate_y_zero(&self) -> (f64, [f64; 2]) {
        let (mut lo, mut hi) = (self.t0, self.t1);
        let positive_at_lo = self.y0[1] > 0.0;
        while hi - lo > EVENT_TIME_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.eval(mid)[1] > 0.0) == positive_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let mut y = self.eval(t);
        y[1] = 0.0;
        (t, y)
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type Field<'a> = dyn Fn([f64; 2]) -> [f64; 2] + 'a;

enum Control {
    Continue,
    Stop,
}

/// Steps a planar autonomous field, calling `on_step` after every accepted
/// step. Returns the final time.
struct Stepper<'a> {
    field: &'a Field<'a>,
    opts: IntegrationOptions,
}

impl<'a> Stepper<'a> {
    fn err_norm(&self, y: &[f64; 2], y_new: &[f64; 2], err: &[f64; 2]) -> f64 {
        let mut acc: f64 = 0.0;
        for i in 0..2 {
            let sc = self.opts.abs_tol + self.opts.rel_tol * y[i].abs().max(y_new[i].abs());
            acc = acc.max((err[i] / sc).abs());
        }
        acc
    }

    fn initial_step(&self, y: &[f64; 2], f: &[f64; 2]) -> f64 {
        let scale = |v: &[f64; 2]| {
            let mut a: f64 = 0.0;
            for i in 0..2 {
                let sc = self.opts.abs_tol + self.opts.rel_tol * y[i].abs();
                a = a.max((v[i] / sc).abs());
            }
            a
        };
        let d0 = scale(y);
        let d1 = scale(f);
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h.min(self.opts.max_step)
            .min(self.opts.max_time.max(f64::MIN_POSITIVE))
    }

    fn rk_step(&self, y: &[f64; 2], f0: &[f64; 2], h: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let mut k = [[0.0; 2]; 7];
        k[0] = *f0;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..2 {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = (self.field)(ys);
        }
        let mut y5 = *y;
        let mut err = [0.0; 2];
        for (s, ks) in k.iter().enumerate() {
            for i in 0..2 {
                y5[i] += h * B5[s] * ks[i];
                err[i] += h * (B5[s] - B4[s]) * ks[i];
            }
        }
        // FSAL: the last stage is the derivative at y5.
        (y5, err, k[6])
    }

    fn run(&self, y0: [f64; 2], mut on_step: impl FnMut(&DenseStep) -> Control) -> Result<()> {
        let mut t = 0.0;
        let mut y = y0;
        let mut f = (self.field)(y);
        let t_end = self.opts.max_time;
        if self.opts.method == Method::SymplecticLeapfrog {
            let h_full = self.opts.max_step;
            while t < t_end {
                let h = h_full.min(t_end - t);
                // velocity Verlet: the field is (y, a(x)) with a independent of y
                let a0 = f[1];
                let vh = y[1] + 0.5 * h * a0;
                let x1 = y[0] + h * vh;
                let a1 = (self.field)([x1, vh])[1];
                let y1 = [x1, vh + 0.5 * h * a1];
                let f1 = (self.field)(y1);
                if !(y1[0].is_finite() && y1[1].is_finite()) {
                    return Err(self.failure("non-finite state", t, y));
                }
                let step = DenseStep {
                    t0: t,
                    t1: t + h,
                    y0: y,
                    y1,
                    f0: f,
                    f1,
                };
                t += h;
                y = y1;
                f = f1;
                if let Control::Stop = on_step(&step) {
                    return Ok(());
                }
            }
            return Ok(());
        }

        let mut h = self.initial_step(&y, &f);
        while t < t_end {
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            let (y_new, err, f_new) = self.rk_step(&y, &f, h);
            let e = self.err_norm(&y, &y_new, &err);
            let finite = y_new[0].is_finite() && y_new[1].is_finite() && e.is_finite();
            if finite && e <= 1.0 {
                let t_new = if last { t_end } else { t + h };
                let step = DenseStep {
                    t0: t,
                    t1: t_new,
                    y0: y,
                    y1: y_new,
                    f0: f,
                    f1: f_new,
                };
                t = t_new;
                y = y_new;
                f = f_new;
                if let Control::Stop = on_step(&step) {
                    return Ok(());
                }
                let fac = if e == 0.0 {
                    5.0
                } else {
                    (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h * fac).min(self.opts.max_step);
            } else {
                let fac = if finite {
                    (0.9 * e.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.25
                };
                h *= fac;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(self.failure("step size underflow", t, y));
            }
        }
        Ok(())
    }

    fn failure(&self, reason: &str, t: f64, y: [f64; 2]) -> Error {
        Error::IntegrationFailure {
            reason: reason.into(),
            t,
            last: PlaneState::new(y[0], y[1]),
        }
    }
}

fn plane_field(p: &Parameters, reverse: bool) -> impl Fn([f64; 2]) -> [f64; 2] + '_ {
    let sign = if reverse { -1.0 } else { 1.0 };
    move |s: [f64; 2]| {
        let (a, b) = eval_field(p, PlaneState::new(s[0], s[1]));
        [sign * a, sign * b]
    }
}

/// Integrates the oscillator from `s0` until `max_time`, escape beyond
/// `escape_radius`, or the requested number of section crossings.
pub fn integrate(p: &Parameters, s0: PlaneState, opts: &IntegrationOptions) -> Result<Trajectory> {
    opts.validate(p)?;
    if !s0.is_finite() {
        return Err(Error::InvalidParameters(
            "initial state must be finite".into(),
        ));
    }
    let field = plane_field(p, opts.reverse_time);
    let stepper = Stepper {
        field: &field,
        opts: *opts,
    };
    let mut samples = vec![Sample { t: 0.0, state: s0 }];
    let mut crossings = Vec::new();
    let mut section_hits = 0;
    let mut termination = Termination::TimeExhausted;

    let result = stepper.run([s0.x, s0.y], |step| {
        if let Some(stop) = opts.stop {
            if step.y0[1] != 0.0 && (step.y0[1] > 0.0) != (step.y1[1] > 0.0) {
                let (t, y) = step.locate_y_zero();
                let ev = Sample {
                    t,
                    state: PlaneState::new(y[0], y[1]),
                };
                crossings.push(ev);
                if stop.section.accepts(y[0], step.y0[1], step.y1[1]) {
                    section_hits += 1;
                    if section_hits >= stop.count {
                        samples.push(ev);
                        termination = Termination::SectionEvent {
                            count: section_hits,
                        };
                        return Control::Stop;
                    }
                }
            }
        }
        let state = PlaneState::new(step.y1[0], step.y1[1]);
        samples.push(Sample { t: step.t1, state });
        if state.norm() > opts.escape_radius {
            termination = Termination::Escaped { t: step.t1 };
            return Control::Stop;
        }
        Control::Continue
    });
    result?;
    Ok(Trajectory {
        samples,
        crossings,
        termination,
    })
}

/// `max |H(sample) - H(s0)|` along a conservative trajectory.
pub fn energy_drift(p: &Parameters, traj: &Trajectory) -> Result<f64> {
    if p.alpha() != 0.0 {
        return Err(Error::InvalidParameters(
            "energy drift is only meaningful for alpha = 0".into(),
        ));
    }
    let Some(first) = traj.initial() else {
        return Ok(0.0);
    };
    let h0 = total_energy(p, first);
    Ok(traj
        .samples
        .iter()
        .map(|s| (total_energy(p, s.state) - h0).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscSample {
    pub t: f64,
    pub chart: ChartId,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartSwitch {
    pub t: f64,
    pub from: ChartId,
    pub to: ChartId,
    pub before: (f64, f64),
    pub after: (f64, f64),
}

/// Orbit on the Poincaré disc. Times are accumulated chart times: planar
/// time in `PlaneU3`, the rescaled time of the compactified field elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscTrajectory {
    pub samples: Vec<DiscSample>,
    pub switch_events: Vec<ChartSwitch>,
}

impl DiscTrajectory {
    /// Finite planar point of every sample off the circle at infinity.
    pub fn plane_points(&self) -> Vec<PlaneState> {
        self.samples
            .iter()
            .filter_map(|s| from_chart(s.chart, s.u, s.v).ok())
            .collect()
    }

    /// Smallest `|v|` over the samples lying in axis charts, or `None` if the
    /// orbit never left the plane chart.
    pub fn min_abs_v(&self) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.chart.is_at_infinity_chart())
            .map(|s| s.v.abs())
            .reduce(f64::min)
    }
}

/// Chart that should hold the planar point `s`.
pub fn preferred_chart(s: PlaneState) -> ChartId {
    if s.x.abs().max(s.y.abs()) <= PLANE_EXIT {
        ChartId::PlaneU3
    } else if s.x.abs() >= s.y.abs() {
        if s.x > 0.0 {
            ChartId::U1
        } else {
            ChartId::V1
        }
    } else if s.y > 0.0 {
        ChartId::U2
    } else {
        ChartId::V2
    }
}

/// Decides whether a point of chart `c` should move to another chart.
fn next_chart(c: ChartId, u: f64, v: f64) -> Result<Option<(ChartId, f64, f64)>> {
    match c {
        ChartId::PlaneU3 => {
            if u.abs().max(v.abs()) > PLANE_EXIT {
                let s = PlaneState::new(u, v);
                let target = preferred_chart(s);
                let (nu, nv) = to_chart(s, target)?;
                Ok(Some((target, nu, nv)))
            } else {
                Ok(None)
            }
        }
        _ => {
            if u.abs() > AXIS_SWAP {
                return swap_axis_chart(c, u, v).map(Some);
            }
            if v != 0.0 && u.abs().max(1.0) / v.abs() < PLANE_ENTRY {
                let s = from_chart(c, u, v)?;
                return Ok(Some((ChartId::PlaneU3, s.x, s.y)));
            }
            Ok(None)
        }
    }
}

/// Integrates on the Poincaré disc starting from the planar point `s0`.
pub fn integrate_on_disc(
    p: &Parameters,
    s0: PlaneState,
    opts: &IntegrationOptions,
) -> Result<DiscTrajectory> {
    let chart = preferred_chart(s0);
    let (u, v) = to_chart(s0, chart)?;
    integrate_on_disc_from(p, chart, u, v, opts)
}

/// Integrates on the Poincaré disc from chart coordinates; `v = 0` in an
/// axis chart starts on the invariant circle at infinity.
pub fn integrate_on_disc_from(
    p: &Parameters,
    chart: ChartId,
    u: f64,
    v: f64,
    opts: &IntegrationOptions,
) -> Result<DiscTrajectory> {
    opts.validate(p)?;
    if opts.method != Method::AdaptiveRK {
        return Err(Error::InvalidParameters(
            "disc integration uses the adaptive method".into(),
        ));
    }
    let sign = if opts.reverse_time { -1.0 } else { 1.0 };
    let mut samples = vec![DiscSample {
        t: 0.0,
        chart,
        u,
        v,
    }];
    let mut switch_events = Vec::new();
    let (mut chart, mut uv, mut t0) = (chart, [u, v], 0.0);

    while t0 < opts.max_time {
        let field = |s: [f64; 2]| {
            let (a, b) = chart_field(p, chart, s[0], s[1]);
            [sign * a, sign * b]
        };
        let seg_opts = IntegrationOptions {
            max_time: opts.max_time - t0,
            ..*opts
        };
        let stepper = Stepper {
            field: &field,
            opts: seg_opts,
        };
        let mut handover = None;
        let mut failure = None;
        let mut t_seg = 0.0;
        stepper
            .run(uv, |step| {
                t_seg = step.t1;
                let (nu, nv) = (step.y1[0], step.y1[1]);
                samples.push(DiscSample {
                    t: t0 + step.t1,
                    chart,
                    u: nu,
                    v: nv,
                });
                match next_chart(chart, nu, nv) {
                    Ok(Some(next)) => {
                        handover = Some(next);
                        Control::Stop
                    }
                    Ok(None) => Control::Continue,
                    Err(e) => {
                        failure = Some(e);
                        Control::Stop
                    }
                }
            })
            .map_err(|e| match e {
                Error::IntegrationFailure { reason, t, last } => Error::IntegrationFailure {
                    reason: format!("{reason} in chart {chart}"),
                    t: t0 + t,
                    last,
                },
                other => other,
            })?;
        if let Some(e) = failure {
            return Err(e);
        }
        t0 += t_seg;
        let Some((next, nu, nv)) = handover else {
            break;
        };
        let last = *samples.last().unwrap();
        switch_events.push(ChartSwitch {
            t: t0,
            from: chart,
            to: next,
            before: (last.u, last.v),
            after: (nu, nv),
        });
        samples.push(DiscSample {
            t: t0,
            chart: next,
            u: nu,
            v: nv,
        });
        chart = next;
        uv = [nu, nv];
    }
    Ok(DiscTrajectory {
        samples,
        switch_events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
        Parameters::new(alpha, epsilon, sigma, m).unwrap()
    }

    #[test]
    fn conservative_benchmark_keeps_energy() {
        let p = params(0.0, 1.0, 1.0, 3);
        let opts = IntegrationOptions::default()
            .with_tolerance(1e-10)
            .with_max_time(100.0);
        let traj = integrate(&p, PlaneState::new(1.0, 0.0), &opts).unwrap();
        assert_eq!(traj.termination, Termination::TimeExhausted);
        assert!(energy_drift(&p, &traj).unwrap() < 1e-8);
        assert_eq!(traj.last().unwrap().t, 100.0);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn even_degree_orbit_escapes() {
        let p = params(0.0, 1.0, 1.0, 2);
        let traj = integrate(
            &p,
            PlaneState::new(-10.0, 0.0),
            &IntegrationOptions::default(),
        )
        .unwrap();
        assert!(matches!(traj.termination, Termination::Escaped { .. }));
        let n = traj.samples.len();
        assert!(traj.samples[..n - 1]
            .iter()
            .all(|s| s.state.norm() <= DEFAULT_ESCAPE_RADIUS));
        assert!(traj.samples[n - 1].state.norm() > DEFAULT_ESCAPE_RADIUS);
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let p = params(0.0, -1.0, 1.0, 3);
        let s0 = PlaneState::new(1.0, 0.0);
        let traj = integrate(&p, s0, &IntegrationOptions::default().with_max_time(50.0)).unwrap();
        assert!(traj.samples.iter().all(|s| s.state.distance(&s0) < 1e-9));
    }

    #[test]
    fn energy_drift_edge_cases() {
        let p = params(0.0, 1.0, 1.0, 3);
        let empty = Trajectory {
            samples: vec![],
            crossings: vec![],
            termination: Termination::TimeExhausted,
        };
        assert_eq!(energy_drift(&p, &empty).unwrap(), 0.0);
        let traj = integrate(
            &p,
            PlaneState::ORIGIN,
            &IntegrationOptions::default().with_max_time(10.0),
        )
        .unwrap();
        assert!(energy_drift(&p, &traj).unwrap() < 1e-12);
        assert!(energy_drift(&params(0.1, 1.0, 1.0, 3), &traj).is_err());
    }

    #[test]
    fn leapfrog_requires_conservative_flow() {
        let opts = IntegrationOptions {
            method: Method::SymplecticLeapfrog,
            max_step: 1e-2,
            ..IntegrationOptions::default()
        };
        assert!(integrate(&params(0.2, 1.0, 1.0, 3), PlaneState::new(1.0, 0.0), &opts).is_err());
        let p = params(0.0, 1.0, 1.0, 3);
        let traj = integrate(
            &p,
            PlaneState::new(1.0, 0.0),
            &IntegrationOptions {
                max_time: 100.0,
                ..opts
            },
        )
        .unwrap();
        // bounded energy error, no secular drift at this step size
        assert!(energy_drift(&p, &traj).unwrap() < 1e-3);
    }

    #[test]
    fn section_stop_on_positive_axis() {
        let p = params(0.0, 1.0, 1.0, 1);
        // harmonic oscillator with omega^2 = 2: period 2 pi / sqrt 2
        let opts = IntegrationOptions {
            stop: Some(SectionStop {
                section: Section {
                    side: AxisSide::PositiveX,
                    direction: CrossingDirection::Downward,
                },
                count: 1,
            }),
            ..IntegrationOptions::default()
        };
        let traj = integrate(&p, PlaneState::new(1.0, 0.0), &opts).unwrap();
        assert_eq!(traj.termination, Termination::SectionEvent { count: 1 });
        assert_eq!(traj.crossings.len(), 2);
        assert!((traj.crossings[0].state.x + 1.0).abs() < 1e-8);
        let ev = traj.crossings[1];
        let period = 2.0 * std::f64::consts::PI / 2f64.sqrt();
        assert!((ev.t - period).abs() < 1e-8, "{}", ev.t);
        assert!((ev.state.x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn csv_header_and_precision() {
        let p = params(0.0, 1.0, 1.0, 3);
        let traj = integrate(
            &p,
            PlaneState::new(0.1, 0.0),
            &IntegrationOptions::default().with_max_time(0.5),
        )
        .unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,y"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.0, 0.1, 0.0]);
        assert_eq!(csv.lines().count(), traj.samples.len() + 1);
    }

    #[test]
    fn circle_at_infinity_is_invariant() {
        for m in 1..=5 {
            let p = params(0.5, -1.0, 0.7, m);
            let opts = IntegrationOptions::default().with_max_time(20.0);
            let d = integrate_on_disc_from(&p, ChartId::U1, 0.5, 0.0, &opts).unwrap();
            assert!(d.samples.iter().all(|s| s.v.abs() <= 1e-12), "m = {m}");
        }
    }

    #[test]
    fn preferred_chart_choices() {
        assert_eq!(
            preferred_chart(PlaneState::new(1.0, -2.0)),
            ChartId::PlaneU3
        );
        assert_eq!(preferred_chart(PlaneState::new(10.0, -2.0)), ChartId::U1);
        assert_eq!(preferred_chart(PlaneState::new(-10.0, 9.0)), ChartId::V1);
        assert_eq!(preferred_chart(PlaneState::new(1.0, 3.0)), ChartId::U2);
        assert_eq!(preferred_chart(PlaneState::new(1.0, -3.0)), ChartId::V2);
    }
}
