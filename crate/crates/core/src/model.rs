//! The oscillator family `x' = y, y' = -alpha*y - epsilon*x^m - sigma*x` and its
//! closed-form scalar quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to flag parameter points lying on a boundary of the
/// strict-inequality regions.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `x^k` by repeated squaring on the integer exponent, so the sign of a
/// negative base is exact for odd `k`.
pub fn ipow(x: f64, k: u32) -> f64 {
    let mut base = x;
    let mut exp = k;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// One instance `(alpha, epsilon, sigma, m)` of the oscillator.
///
/// Construction rejects `epsilon == 0`, `m == 0` and non-finite coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters", into = "RawParameters")]
pub struct Parameters {
    alpha: f64,
    epsilon: f64,
    sigma: f64,
    m: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParameters {
    alpha: f64,
    epsilon: f64,
    sigma: f64,
    m: u32,
}

impl TryFrom<RawParameters> for Parameters {
    type Error = Error;

    fn try_from(raw: RawParameters) -> Result<Self> {
        Parameters::new(raw.alpha, raw.epsilon, raw.sigma, raw.m)
    }
}

impl From<Parameters> for RawParameters {
    fn from(p: Parameters) -> Self {
        RawParameters {
            alpha: p.alpha,
            epsilon: p.epsilon,
            sigma: p.sigma,
            m: p.m,
        }
    }
}

impl Parameters {
    pub fn new(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Result<Self> {
        if !(alpha.is_finite() && epsilon.is_finite() && sigma.is_finite()) {
            return Err(Error::InvalidParameters(
                "coefficients must be finite".into(),
            ));
        }
        if epsilon == 0.0 {
            return Err(Error::InvalidParameters("epsilon must be nonzero".into()));
        }
        if m == 0 {
            return Err(Error::InvalidParameters(
                "degree m must be at least 1".into(),
            ));
        }
        Ok(Parameters {
            alpha,
            epsilon,
            sigma,
            m,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn m_is_odd(&self) -> bool {
        self.m % 2 == 1
    }

    /// Degree of the polynomial field, used as the compactification degree.
    pub fn degree(&self) -> u32 {
        self.m.max(1)
    }

    /// Same oscillator with a different damping coefficient.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Parameters::new(alpha, self.epsilon, self.sigma, self.m)
    }

    /// Scale against which boundary equalities are tested.
    fn degeneracy_scale(&self) -> f64 {
        1f64.max(self.alpha * self.alpha)
            .max((self.epsilon + self.sigma).abs())
    }

    pub(crate) fn is_negligible(&self, value: f64) -> bool {
        value.abs() <= DEGENERACY_TOL * self.degeneracy_scale()
    }

    pub fn degeneracy(&self) -> DegeneracyFlags {
        let alpha2 = self.alpha * self.alpha;
        if self.m == 1 {
            let stiffness = self.epsilon + self.sigma;
            return DegeneracyFlags {
                sigma_zero: false,
                discriminant_zero: self.is_negligible(alpha2 - 4.0 * stiffness),
                on_table_boundary: self.is_negligible(stiffness),
            };
        }
        let sigma_zero = self.is_negligible(self.sigma);
        let origin_disc = self.is_negligible(alpha2 - 4.0 * self.sigma);
        let extra_exist = !sigma_zero && (!self.m_is_odd() || self.sigma * self.epsilon < 0.0);
        let extra_disc =
            extra_exist && self.is_negligible(alpha2 + 4.0 * self.sigma * f64::from(self.m - 1));
        DegeneracyFlags {
            sigma_zero,
            discriminant_zero: origin_disc || extra_disc,
            on_table_boundary: false,
        }
    }
}

/// A point of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlaneState {
    pub x: f64,
    pub y: f64,
}

impl PlaneState {
    pub const ORIGIN: PlaneState = PlaneState { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        PlaneState { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &PlaneState) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Marks parameter points on the boundary of the strict-inequality regions
/// used by the classification tables and figure captions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegeneracyFlags {
    /// `sigma == 0` with `m > 1`: the origin loses its linear restoring term.
    pub sigma_zero: bool,
    /// A linearization discriminant vanishes: `alpha^2 = 4(epsilon + sigma)` for
    /// `m = 1`; `alpha^2 = 4 sigma` at the origin or
    /// `alpha^2 + 4 sigma (m - 1) = 0` at an existing `E±` for `m > 1`.
    pub discriminant_zero: bool,
    /// `m = 1` with `epsilon + sigma == 0`: the x-axis is a line of equilibria.
    pub on_table_boundary: bool,
}

impl DegeneracyFlags {
    pub fn any(&self) -> bool {
        self.sigma_zero || self.discriminant_zero || self.on_table_boundary
    }
}

pub fn eval_field(p: &Parameters, s: PlaneState) -> (f64, f64) {
    (
        s.y,
        -p.alpha * s.y - p.epsilon * ipow(s.x, p.m) - p.sigma * s.x,
    )
}

/// Divergence of the field; constant in the state.
pub fn divergence(p: &Parameters) -> f64 {
    -p.alpha
}

/// `U(x) = epsilon/(m+1) x^(m+1) + sigma/2 x^2`.
pub fn potential_energy(p: &Parameters, x: f64) -> f64 {
    p.epsilon / f64::from(p.m + 1) * ipow(x, p.m + 1) + 0.5 * p.sigma * x * x
}

/// `U'(x) = epsilon x^m + sigma x`.
pub fn potential_slope(p: &Parameters, x: f64) -> f64 {
    p.epsilon * ipow(x, p.m) + p.sigma * x
}

/// `U''(x) = m epsilon x^(m-1) + sigma`.
pub fn potential_curvature(p: &Parameters, x: f64) -> f64 {
    f64::from(p.m) * p.epsilon * ipow(x, p.m - 1) + p.sigma
}

/// Kinetic plus potential energy.
pub fn total_energy(p: &Parameters, s: PlaneState) -> f64 {
    0.5 * s.y * s.y + potential_energy(p, s.x)
}

/// Exact time derivative of [`total_energy`] along the flow.
pub fn dissipation_rate(p: &Parameters, s: PlaneState) -> f64 {
    -p.alpha * s.y * s.y
}

/// First integral `u^2 + v^2 + 2 epsilon / (sigma (m+1)) u^(m+1)` of the
/// rescaled conservative system in Jordan coordinates. Requires `sigma > 0`.
pub fn canonical_first_integral(p: &Parameters, u: f64, v: f64) -> Result<f64> {
    if p.sigma <= 0.0 {
        return Err(Error::InvalidParameters(
            "canonical first integral requires sigma > 0".into(),
        ));
    }
    Ok(u * u + v * v + 2.0 * p.epsilon / (p.sigma * f64::from(p.m + 1)) * ipow(u, p.m + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, epsilon: f64, sigma: f64, m: u32) -> Parameters {
        Parameters::new(alpha, epsilon, sigma, m).unwrap()
    }

    #[test]
    fn rejects_zero_epsilon_and_degree() {
        assert!(matches!(
            Parameters::new(0.0, 0.0, 1.0, 3),
            Err(Error::InvalidParameters(_))
        ));
        assert!(Parameters::new(0.0, 1.0, 1.0, 0).is_err());
        assert!(Parameters::new(f64::NAN, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn ipow_keeps_sign_of_odd_powers() {
        assert_eq!(ipow(-2.0, 3), -8.0);
        assert_eq!(ipow(-2.0, 4), 16.0);
        assert_eq!(ipow(3.0, 0), 1.0);
        assert_eq!(ipow(-1.5, 1), -1.5);
    }

    #[test]
    fn field_examples() {
        assert_eq!(
            eval_field(&params(0.0, 1.0, 1.0, 3), PlaneState::ORIGIN),
            (0.0, 0.0)
        );
        assert_eq!(
            eval_field(&params(0.0, -1.0, 1.0, 3), PlaneState::new(1.0, 0.0)),
            (0.0, 0.0)
        );
        // -2*1 - 1*1 - 0 = -3
        assert_eq!(
            eval_field(&params(2.0, 1.0, 0.0, 2), PlaneState::new(1.0, 1.0)),
            (1.0, -3.0)
        );
    }

    #[test]
    fn divergence_examples() {
        assert_eq!(divergence(&params(0.0, 1.0, 1.0, 3)), 0.0);
        assert_eq!(divergence(&params(0.5, 1.0, 1.0, 3)), -0.5);
        assert_eq!(divergence(&params(-2.0, 1.0, 1.0, 3)), 2.0);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(potential_energy(&params(0.3, 2.0, -1.0, 4), 0.0), 0.0);
        assert!((potential_energy(&params(0.0, -1.0, 1.0, 3), 1.0) - 0.25).abs() < 1e-15);
        assert!((potential_energy(&params(0.0, 1.0, -1.0, 2), 1.0) + 1.0 / 6.0).abs() < 1e-15);

        let p = params(0.0, 1.0, 1.0, 3);
        assert_eq!(total_energy(&p, PlaneState::ORIGIN), 0.0);
        assert!((total_energy(&p, PlaneState::new(1.0, 0.0)) - 0.75).abs() < 1e-15);
        assert_eq!(total_energy(&p, PlaneState::new(0.0, 2.0)), 2.0);
    }

    #[test]
    fn dissipation_examples() {
        assert_eq!(
            dissipation_rate(&params(0.0, 1.0, 1.0, 3), PlaneState::new(3.0, -7.0)),
            0.0
        );
        assert_eq!(
            dissipation_rate(&params(1.0, 1.0, 1.0, 3), PlaneState::new(5.0, 2.0)),
            -4.0
        );
        assert_eq!(
            dissipation_rate(&params(-1.0, 1.0, 1.0, 3), PlaneState::new(0.0, 3.0)),
            9.0
        );
    }

    #[test]
    fn first_integral_examples() {
        let p = params(0.0, 1.0, 1.0, 3);
        assert_eq!(canonical_first_integral(&p, 0.0, 0.0).unwrap(), 0.0);
        assert!((canonical_first_integral(&p, 1.0, 0.0).unwrap() - 1.5).abs() < 1e-15);
        let p2 = params(0.0, 2.0, 1.0, 3);
        assert!((canonical_first_integral(&p2, 1.0, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(canonical_first_integral(&params(0.0, 1.0, 0.0, 3), 1.0, 1.0).is_err());
        assert!(canonical_first_integral(&params(0.0, 1.0, -1.0, 3), 1.0, 1.0).is_err());
    }

    #[test]
    fn degeneracy_flags() {
        assert!(!params(1.0, 1.0, 1.0, 3).degeneracy().any());
        assert!(params(1.0, 1.0, 0.0, 3).degeneracy().sigma_zero);
        assert!(!params(1.0, 1.0, 0.0, 1).degeneracy().sigma_zero);
        // alpha^2 = 4(eps + sigma)
        assert!(params(2.0, 0.5, 0.5, 1).degeneracy().discriminant_zero);
        assert!(params(1.0, -0.5, 0.5, 1).degeneracy().on_table_boundary);
        // origin: alpha^2 = 4 sigma
        assert!(params(1.0, 1.0, 0.25, 3).degeneracy().discriminant_zero);
        // E+: alpha^2 + 4 sigma (m-1) = 0 with m = 2
        assert!(params(1.0, 1.0, -0.25, 2).degeneracy().discriminant_zero);
        // same discriminant for m = 3 but E± absent when sigma*eps > 0
        assert!(!params(1.0, -1.0, -0.125, 3).degeneracy().discriminant_zero);
    }

    #[test]
    fn parameters_round_trip_through_json_and_validate() {
        let p = params(0.5, -1.0, 2.0, 5);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Parameters>(&text).unwrap(), p);
        let bad = r#"{"alpha":0.0,"epsilon":0.0,"sigma":1.0,"m":3}"#;
        assert!(serde_json::from_str::<Parameters>(bad).is_err());
    }
}
