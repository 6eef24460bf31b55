//! Mixed Lebesgue, Sobolev, Lorentz and Bessel-kernel computations on grid data.

mod kernel;
mod lebesgue;
mod lorentz;
mod sobolev;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_core::Field;
use crate::symbols::conjugate;

pub use kernel::{bessel_kernel, bessel_kernel_mass, exponential_bound_constant};
pub use lebesgue::{joint_lp, mixed_norm};
pub use lorentz::lorentz_norm;
pub use sobolev::{average_h_half, local_embedding_ratio, sobolev_norm, sobolev_norm_spatial};

/// Which variable carries the inner norm of a mixed Lebesgue norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nesting {
    /// `‖‖f‖_{L^q_v}‖_{L^p_x}`.
    XOuter,
    /// `‖‖f‖_{L^p_x}‖_{L^q_v}`.
    VOuter,
}

/// Variables a Sobolev weight acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    X,
    V,
    Joint,
}

/// A norm together with its exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormSpec {
    MixedLebesgue { p: f64, q: f64, nesting: Nesting },
    Sobolev { s: f64, r: f64, homogeneous: bool, variable: Variable },
    Lorentz { q: f64, c: f64 },
}

fn lebesgue_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Exponent(format!("{name} = {p} must lie in [1, ∞]")));
    }
    Ok(())
}

fn open_exponent(name: &str, p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("{name} = {p} must lie in (1, ∞)")));
    }
    Ok(())
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::MixedLebesgue { p, q, .. } => {
                lebesgue_exponent("p", p)?;
                lebesgue_exponent("q", q)
            }
            NormSpec::Sobolev { s, r, .. } => {
                if !s.is_finite() {
                    return Err(Error::Parameter(format!("Sobolev order {s} is not finite")));
                }
                open_exponent("r", r)
            }
            NormSpec::Lorentz { q, c } => {
                if !(q > 0.0 && q.is_finite() && c > 0.0 && c.is_finite()) {
                    return Err(Error::Exponent(format!("Lorentz exponents ({q}, {c}) must lie in (0, ∞)")));
                }
                Ok(())
            }
        }
    }

    /// Dual norm: exponents conjugated, Sobolev order negated.
    pub fn dual(&self) -> Result<NormSpec> {
        self.validate()?;
        Ok(match *self {
            NormSpec::MixedLebesgue { p, q, nesting } => {
                NormSpec::MixedLebesgue { p: conjugate(p), q: conjugate(q), nesting }
            }
            NormSpec::Sobolev { s, r, homogeneous, variable } => {
                NormSpec::Sobolev { s: -s, r: conjugate(r), homogeneous, variable }
            }
            NormSpec::Lorentz { q, c } => {
                if q <= 1.0 || c < 1.0 {
                    return Err(Error::Exponent(format!("L^({q},{c}) has no Lorentz dual")));
                }
                NormSpec::Lorentz { q: conjugate(q), c: conjugate(c) }
            }
        })
    }

    /// Evaluates the norm of a phase-space field.
    ///
    /// Lorentz norms use `|f|` with cell volumes as measure.
    pub fn evaluate(&self, field: &Field) -> Result<f64> {
        self.validate()?;
        match *self {
            NormSpec::MixedLebesgue { p, q, nesting } => mixed_norm(field, p, q, nesting),
            NormSpec::Sobolev { s, r, homogeneous, variable } => sobolev_norm(field, s, r, homogeneous, variable),
            NormSpec::Lorentz { q, c } => {
                let g = field.grid();
                let cell = g.dx() * g.dv();
                let values: Vec<f64> = field.samples().iter().map(|z| z.norm()).collect();
                lorentz_norm(&values, &vec![cell; values.len()], q, c)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_an_involution() {
        let specs = [
            NormSpec::MixedLebesgue { p: 4.0, q: 4.0 / 3.0, nesting: Nesting::XOuter },
            NormSpec::MixedLebesgue { p: 1.0, q: f64::INFINITY, nesting: Nesting::VOuter },
            NormSpec::Sobolev { s: 0.5, r: 3.0, homogeneous: true, variable: Variable::X },
            NormSpec::Lorentz { q: 3.0, c: 2.0 },
        ];
        for s in specs {
            let back = s.dual().unwrap().dual().unwrap();
            match (s, back) {
                (NormSpec::MixedLebesgue { p, q, .. }, NormSpec::MixedLebesgue { p: p2, q: q2, .. }) => {
                    assert!((p - p2).abs() < 1e-12 || p == p2);
                    assert!((q - q2).abs() < 1e-12 || q == q2);
                }
                (a, b) => {
                    let (a, b) = (serde_json::to_value(a).unwrap(), serde_json::to_value(b).unwrap());
                    for key in ["s", "r", "q", "c"] {
                        if let (Some(x), Some(y)) = (a.get(key), b.get(key)) {
                            assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn endpoint_sobolev_exponent_rejected() {
        let s = NormSpec::Sobolev { s: 0.0, r: 1.0, homogeneous: false, variable: Variable::X };
        assert!(s.validate().is_err());
        assert!(NormSpec::Lorentz { q: 0.5, c: 1.0 }.dual().is_err());
    }
}
