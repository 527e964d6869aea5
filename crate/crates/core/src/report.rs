//! Versioned JSON documents and parameter sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::model::{DegeneracyFlags, Parameters};
use crate::portrait::{census, classify_portrait, Boundary, Figure, PortraitCensus};

pub const SCHEMA: &str = "duffing-atlas/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitReport {
    pub schema: String,
    pub parameters: Parameters,
    pub figure: Figure,
    pub panel: Option<char>,
    pub conditions: String,
    pub boundary: Option<Boundary>,
    pub note: Option<String>,
    pub global_center: bool,
    pub census: PortraitCensus,
    pub degenerate_flags: DegeneracyFlags,
}

pub fn portrait_report(p: &Parameters) -> Result<PortraitReport> {
    let class = classify_portrait(p);
    let census = census(p)?;
    Ok(PortraitReport {
        schema: SCHEMA.into(),
        parameters: *p,
        figure: class.figure,
        panel: class.panel,
        conditions: class.conditions,
        boundary: class.boundary,
        note: class.note,
        global_center: census.center.is_global_center,
        census,
        degenerate_flags: p.degeneracy(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub schema: String,
    pub parameters: Parameters,
    pub trajectory: Trajectory,
}

impl TrajectoryReport {
    pub fn new(p: &Parameters, trajectory: Trajectory) -> Self {
        TrajectoryReport {
            schema: SCHEMA.into(),
            parameters: *p,
            trajectory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Alpha,
    Epsilon,
    Sigma,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(SweepParam::Alpha),
            "epsilon" => Ok(SweepParam::Epsilon),
            "sigma" => Ok(SweepParam::Sigma),
            other => Err(Error::InvalidParameters(format!(
                "unknown sweep parameter {other:?} (alpha, epsilon or sigma)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Panel label such as `Fig_MOdd(e)`, or the reason no parameters exist.
    pub label: String,
    pub panel: Option<char>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelChange {
    /// Values on either side of the change.
    pub between: (f64, f64),
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema: String,
    pub base: Parameters,
    pub parameter: SweepParam,
    pub points: Vec<SweepPoint>,
    pub boundaries: Vec<PanelChange>,
}

/// Classifies `steps` evenly spaced values of one coefficient and lists the
/// places where the panel label changes.
pub fn sweep(
    base: &Parameters,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepReport> {
    if steps < 2 || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidParameters(
            "a sweep needs finite end points and at least 2 steps".into(),
        ));
    }
    let points: Vec<SweepPoint> = (0..steps)
        .map(|i| {
            let value = from + (to - from) * i as f64 / (steps - 1) as f64;
            let (a, e, s) = match param {
                SweepParam::Alpha => (value, base.epsilon(), base.sigma()),
                SweepParam::Epsilon => (base.alpha(), value, base.sigma()),
                SweepParam::Sigma => (base.alpha(), base.epsilon(), value),
            };
            match Parameters::new(a, e, s, base.m()) {
                Ok(p) => {
                    let class = classify_portrait(&p);
                    SweepPoint {
                        value,
                        label: class.label(),
                        panel: class.panel,
                        degenerate: class.is_degenerate(),
                    }
                }
                Err(err) => SweepPoint {
                    value,
                    label: format!("invalid: {err}"),
                    panel: None,
                    degenerate: true,
                },
            }
        })
        .collect();
    let boundaries = points
        .windows(2)
        .filter(|w| w[0].label != w[1].label)
        .map(|w| PanelChange {
            between: (w[0].value, w[1].value),
            from: w[0].label.clone(),
            to: w[1].label.clone(),
        })
        .collect();
    Ok(SweepReport {
        schema: SCHEMA.into(),
        base: *base,
        parameter: param,
        points,
        boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn portrait_report_round_trips() {
        for p in [
            Parameters::new(0.0, 1.0, 1.0, 3).unwrap(),
            Parameters::new(3.0, 1.7, 0.3, 1).unwrap(),
            Parameters::new(-0.3, 1.0, -2.0, 4).unwrap(),
        ] {
            let r = portrait_report(&p).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: PortraitReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn global_center_report_fields() {
        let r = portrait_report(&Parameters::new(0.0, 1.0, 1.0, 3).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["schema"], "duffing-atlas/1");
        assert_eq!(v["figure"], "Fig_AlphaZero");
        assert_eq!(v["global_center"], true);
    }

    #[test]
    fn sweep_finds_the_alpha_sign_change() {
        let base = Parameters::new(0.0, 1.0, -1.0, 2).unwrap();
        let r = sweep(&base, SweepParam::Alpha, -1.0, 1.0, 5).unwrap();
        let labels: Vec<&str> = r.points.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "Fig_MEven(h)",
                "Fig_MEven(h)",
                "Fig_AlphaZero(c)",
                "Fig_MEven(g)",
                "Fig_MEven(g)"
            ]
        );
        assert_eq!(r.boundaries.len(), 2);
        assert_eq!(r.boundaries[0].between, (-0.5, 0.0));
    }

    #[test]
    fn sweep_through_zero_epsilon_marks_invalid_point() {
        let base = Parameters::new(1.0, 1.0, 1.0, 3).unwrap();
        let r = sweep(&base, SweepParam::Epsilon, -1.0, 1.0, 3).unwrap();
        assert!(r.points[1].label.starts_with("invalid"));
        assert!(sweep(&base, SweepParam::Epsilon, -1.0, 1.0, 1).is_err());
        assert!("beta".parse::<SweepParam>().is_err());
    }
}
