//! Routes a parameter point to its global phase-portrait panel and gathers
//! the equilibrium and cycle census behind the assignment.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::finite::{
    center_at_origin, finite_equilibria, has_unique_finite_equilibrium, CenterVerdict, CoarseKind,
    Equilibrium, EquilibriumKind,
};
use crate::infinity::{
    infinite_equilibria, InfiniteEquilibrium, InfiniteKind, SectorStructure, Stability,
};
use crate::oracle::{detect_connection_cycles, CycleKind, CycleReport};
use crate::Parameters;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Figure {
    #[serde(rename = "Fig_AlphaZero")]
    AlphaZero,
    #[serde(rename = "Fig_M1")]
    M1,
    #[serde(rename = "Fig_MEven")]
    MEven,
    #[serde(rename = "Fig_MOdd")]
    MOdd,
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::AlphaZero => "Fig_AlphaZero",
            Figure::M1 => "Fig_M1",
            Figure::MEven => "Fig_MEven",
            Figure::MOdd => "Fig_MOdd",
        })
    }
}

/// Why a point carries no panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// `m > 1` with `sigma = 0`.
    SigmaZero,
    /// `m = 1` with `epsilon + sigma = 0`.
    StiffnessZero,
    /// A sign case no panel caption covers (the global-center corners at
    /// `alpha = 0`).
    Uncovered,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitClass {
    pub figure: Figure,
    pub panel: Option<char>,
    pub conditions: String,
    pub boundary: Option<Boundary>,
    /// Set when a caption stated for particular degrees is applied to the
    /// whole parity class.
    pub note: Option<String>,
}

impl PortraitClass {
    pub fn is_degenerate(&self) -> bool {
        self.boundary.is_some()
    }

    /// `Fig_MEven(g)` style label.
    pub fn label(&self) -> String {
        match (self.panel, self.boundary) {
            (Some(c), _) => format!("{}({c})", self.figure),
            (None, Some(b)) => format!("{}[{b:?}]", self.figure),
            (None, None) => self.figure.to_string(),
        }
    }
}

fn sign(v: f64) -> char {
    if v > 0.0 {
        '+'
    } else {
        '-'
    }
}

fn panel(figure: Figure, letter: char, conditions: impl Into<String>) -> PortraitClass {
    PortraitClass {
        figure,
        panel: Some(letter),
        conditions: conditions.into(),
        boundary: None,
        note: None,
    }
}

fn boundary(figure: Figure, b: Boundary, conditions: impl Into<String>) -> PortraitClass {
    PortraitClass {
        figure,
        panel: None,
        conditions: conditions.into(),
        boundary: Some(b),
        note: None,
    }
}

pub fn classify_portrait(p: &Parameters) -> PortraitClass {
    let (alpha, eps, sigma, m) = (p.alpha(), p.epsilon(), p.sigma(), p.m());
    let stiffness = eps + sigma;

    if m == 1 && p.is_negligible(stiffness) {
        let fig = if alpha == 0.0 {
            Figure::AlphaZero
        } else {
            Figure::M1
        };
        return boundary(
            fig,
            Boundary::StiffnessZero,
            "m = 1, epsilon + sigma = 0: line of equilibria",
        );
    }
    if m > 1 && p.is_negligible(sigma) {
        let fig = if alpha == 0.0 {
            Figure::AlphaZero
        } else if m % 2 == 0 {
            Figure::MEven
        } else {
            Figure::MOdd
        };
        return boundary(
            fig,
            Boundary::SigmaZero,
            "m > 1, sigma = 0: no panel is drawn",
        );
    }

    if alpha == 0.0 {
        return alpha_zero_panel(p);
    }

    if m == 1 {
        let disc = alpha * alpha - 4.0 * stiffness;
        let fig = Figure::M1;
        return if p.is_negligible(disc) {
            if alpha > 0.0 {
                panel(fig, 'f', "m = 1, alpha^2 = 4(epsilon + sigma), alpha > 0")
            } else {
                panel(fig, 'g', "m = 1, alpha^2 = 4(epsilon + sigma), alpha < 0")
            }
        } else if disc < 0.0 {
            if alpha > 0.0 {
                panel(fig, 'a', "m = 1, alpha^2 < 4(epsilon + sigma), alpha > 0")
            } else {
                panel(fig, 'b', "m = 1, alpha^2 < 4(epsilon + sigma), alpha < 0")
            }
        } else if stiffness < 0.0 {
            panel(
                fig,
                'd',
                "m = 1, alpha^2 > 4(epsilon + sigma), epsilon + sigma < 0",
            )
        } else if alpha > 0.0 {
            panel(
                fig,
                'c',
                "m = 1, alpha^2 > 4(epsilon + sigma), alpha > 0, epsilon + sigma > 0",
            )
        } else {
            panel(
                fig,
                'e',
                "m = 1, alpha^2 > 4(epsilon + sigma), alpha < 0, epsilon + sigma > 0",
            )
        };
    }

    let fig = if m % 2 == 0 {
        Figure::MEven
    } else {
        Figure::MOdd
    };
    let letter = match (sign(sigma), sign(eps), sign(alpha)) {
        ('+', '+', '+') => 'a',
        ('+', '+', '-') => 'b',
        ('-', '-', '+') => 'c',
        ('-', '-', '-') => 'd',
        ('+', '-', '+') => 'e',
        ('+', '-', '-') => 'f',
        ('-', '+', '+') => 'g',
        _ => 'h',
    };
    let parity = if m % 2 == 0 { "even" } else { "odd" };
    let rel = |v: f64| if v > 0.0 { "> 0" } else { "< 0" };
    panel(
        fig,
        letter,
        format!(
            "m {parity}, sigma {}, epsilon {}, alpha {}",
            rel(sigma),
            rel(eps),
            rel(alpha)
        ),
    )
}

fn alpha_zero_panel(p: &Parameters) -> PortraitClass {
    let (eps, sigma, m) = (p.epsilon(), p.sigma(), p.m());
    let fig = Figure::AlphaZero;
    if m == 1 {
        return if eps + sigma < 0.0 {
            panel(fig, 'a', "m = 1, alpha = 0, epsilon + sigma < 0")
        } else {
            boundary(
                fig,
                Boundary::Uncovered,
                "m = 1, alpha = 0, epsilon + sigma > 0: linear global center, no panel",
            )
        };
    }
    let mut class = if m % 2 == 0 {
        match (sign(eps), sign(sigma)) {
            ('-', '-') => panel(fig, 'b', "m even, alpha = 0, epsilon < 0, sigma < 0"),
            ('+', '-') => panel(fig, 'c', "m even, alpha = 0, epsilon > 0, sigma < 0"),
            ('-', '+') => panel(fig, 'd', "m even, alpha = 0, epsilon < 0, sigma > 0"),
            _ => panel(fig, 'e', "m even, alpha = 0, epsilon > 0, sigma > 0"),
        }
    } else {
        match (sign(eps), sign(sigma)) {
            ('-', '-') => panel(fig, 'f', "m odd, alpha = 0, epsilon < 0, sigma < 0"),
            ('-', '+') => panel(fig, 'g', "m odd, alpha = 0, epsilon < 0, sigma > 0"),
            ('+', '-') => panel(fig, 'h', "m odd, alpha = 0, sigma < 0, epsilon > 0"),
            _ => {
                return boundary(
                    fig,
                    Boundary::Uncovered,
                    "m odd, alpha = 0, sigma > 0, epsilon > 0: global center, no panel",
                )
            }
        }
    };
    if m % 2 == 0 && m != 2 {
        class.note = Some(format!("caption drawn for m = 2, applied to m = {m}"));
    } else if m % 2 == 1 && m != 3 && m != 5 {
        class.note = Some(format!("caption drawn for m = 3, 5, applied to m = {m}"));
    }
    class
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitCensus {
    pub finite: Vec<Equilibrium>,
    pub infinite: Vec<InfiniteEquilibrium>,
    /// Present only for `alpha = 0`.
    pub cycles: Option<CycleReport>,
    pub center: CenterVerdict,
    /// Cross-module inconsistencies; empty when the modules agree.
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InfiniteSignature {
    Hyperbolic(InfiniteKind),
    Sectors {
        sectors: Option<SectorStructure>,
        stability: Option<Stability>,
    },
}

/// Topological fingerprint of a census: coarse finite kinds in abscissa
/// order, infinite local portraits, and the cycle kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CensusSignature {
    pub finite: Vec<CoarseKind>,
    pub infinite: Vec<InfiniteSignature>,
    pub cycle: Option<CycleKind>,
}

impl PortraitCensus {
    pub fn signature(&self) -> CensusSignature {
        CensusSignature {
            finite: self.finite.iter().map(|e| e.kind.coarse()).collect(),
            infinite: self
                .infinite
                .iter()
                .map(|e| match e.kind {
                    InfiniteKind::Nilpotent | InfiniteKind::LinearlyZero => {
                        InfiniteSignature::Sectors {
                            sectors: e.sectors,
                            stability: e.stability,
                        }
                    }
                    k => InfiniteSignature::Hyperbolic(k),
                })
                .collect(),
            cycle: self.cycles.as_ref().map(|c| c.kind),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn census(p: &Parameters) -> Result<PortraitCensus> {
    let finite = finite_equilibria(p);
    let infinite = infinite_equilibria(p);
    let cycles = if p.alpha() == 0.0 {
        Some(detect_connection_cycles(p)?)
    } else {
        None
    };
    let center = center_at_origin(p);
    let mut diagnostics = Vec::new();

    if center.is_global_center {
        if finite.len() != 1 || finite[0].kind != EquilibriumKind::Center {
            diagnostics.push("global center without a single finite center".into());
        }
        if cycles
            .as_ref()
            .is_some_and(|c| c.kind != CycleKind::NoCycle)
        {
            diagnostics.push("global center coexists with a connection cycle".into());
        }
    }
    if has_unique_finite_equilibrium(p) != (finite.len() == 1) {
        diagnostics.push(format!(
            "uniqueness predicate disagrees with {} enumerated equilibria",
            finite.len()
        ));
    }
    let origin = finite.iter().find(|e| e.location.x == 0.0);
    match origin {
        None => diagnostics.push("origin missing from the finite equilibria".into()),
        Some(o) => {
            if center.origin_is_center != (o.kind == EquilibriumKind::Center) {
                diagnostics.push(format!(
                    "origin verdict disagrees with its kind {:?}",
                    o.kind
                ));
            }
        }
    }
    if let Some(c) = &cycles {
        for s in &c.saddles {
            let listed = finite
                .iter()
                .any(|e| e.location.distance(s) < 1e-12 && e.kind == EquilibriumKind::SaddlePoint);
            if !listed {
                diagnostics.push(format!(
                    "cycle saddle at x = {} is not a saddle equilibrium",
                    s.x
                ));
            }
        }
    }
    Ok(PortraitCensus {
        finite,
        infinite,
        cycles,
        center,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::EquilibriumKind as K;

    fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
        Parameters::new(alpha, epsilon, sigma, m).unwrap()
    }

    fn label(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> String {
        classify_portrait(&params(alpha, epsilon, sigma, m)).label()
    }

    #[test]
    fn router_examples() {
        assert_eq!(label(1.0, 0.5, 0.5, 1), "Fig_M1(a)");
        assert_eq!(label(0.0, -1.0, 1.0, 3), "Fig_AlphaZero(g)");
        assert_eq!(label(1.0, 1.0, -1.0, 2), "Fig_MEven(g)");
    }

    #[test]
    fn linear_panels() {
        assert_eq!(label(-1.0, 0.5, 0.5, 1), "Fig_M1(b)");
        assert_eq!(label(3.0, 1.0, 1.0, 1), "Fig_M1(c)");
        assert_eq!(label(0.5, -1.0, 0.5, 1), "Fig_M1(d)");
        assert_eq!(label(-3.0, 1.0, 1.0, 1), "Fig_M1(e)");
        assert_eq!(label(2.0, 0.5, 0.5, 1), "Fig_M1(f)");
        assert_eq!(label(-2.0, 0.5, 0.5, 1), "Fig_M1(g)");
        assert_eq!(label(0.0, -1.0, 0.5, 1), "Fig_AlphaZero(a)");
    }

    #[test]
    fn boundaries_and_uncovered_corners() {
        let c = classify_portrait(&params(1.0, 1.0, -1.0, 1));
        assert_eq!(c.boundary, Some(Boundary::StiffnessZero));
        let c = classify_portrait(&params(1.0, 1.0, 0.0, 4));
        assert_eq!(c.boundary, Some(Boundary::SigmaZero));
        assert_eq!(c.figure, Figure::MEven);
        let c = classify_portrait(&params(0.0, 1.0, 1.0, 3));
        assert_eq!(
            (c.figure, c.boundary),
            (Figure::AlphaZero, Some(Boundary::Uncovered))
        );
        let c = classify_portrait(&params(0.0, 1.0, 1.0, 1));
        assert_eq!(c.boundary, Some(Boundary::Uncovered));
        assert!(c.panel.is_none());
    }

    #[test]
    fn parity_extension_is_noted() {
        assert!(classify_portrait(&params(0.0, 1.0, 1.0, 2)).note.is_none());
        assert!(classify_portrait(&params(0.0, 1.0, 1.0, 4)).note.is_some());
        assert!(classify_portrait(&params(0.0, -1.0, 1.0, 5)).note.is_none());
        assert!(classify_portrait(&params(0.0, -1.0, 1.0, 7)).note.is_some());
    }

    #[test]
    fn census_examples() {
        let c = census(&params(0.0, 1.0, 1.0, 3)).unwrap();
        assert!(c.is_consistent(), "{:?}", c.diagnostics);
        assert_eq!(c.finite.len(), 1);
        assert_eq!(c.finite[0].kind, K::Center);
        assert_eq!(c.infinite.len(), 1);
        assert_eq!(c.infinite[0].kind, InfiniteKind::LinearlyZero);
        assert_eq!(c.infinite[0].sectors, Some(SectorStructure::new(2, 0, 0)));
        assert_eq!(c.cycles.as_ref().unwrap().kind, CycleKind::NoCycle);
        assert!(c.center.is_global_center);

        let c = census(&params(3.0, 1.0, 1.0, 1)).unwrap();
        assert_eq!(
            c.finite.iter().map(|e| e.kind).collect::<Vec<_>>(),
            vec![K::StableNode]
        );
        let kinds: Vec<_> = c.infinite.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![InfiniteKind::Saddle, InfiniteKind::UnstableNode]
        );
        assert!(c.cycles.is_none());

        let c = census(&params(0.0, -1.0, 1.0, 3)).unwrap();
        let kinds: Vec<_> = c.finite.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec![K::SaddlePoint, K::Center, K::SaddlePoint]);
        assert_eq!(c.cycles.unwrap().kind, CycleKind::Heteroclinic);
    }

    #[test]
    fn signature_ignores_linearization_detail() {
        let a = census(&params(0.0, 1.0, 1.0, 2)).unwrap().signature();
        let b = census(&params(0.0, 1.0, 1.0, 4)).unwrap().signature();
        assert_eq!(a, b);
    }
}
