use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::Rule;

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// `∫_{-1}^{1} e^{-1/(1-u²)} du`.
fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| Rule::gauss_legendre(256, -1.0, 1.0).integrate(bump))
}

/// Smooth bump on `[lo, hi]` with unit integral.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpProfile {
    lo: f64,
    hi: f64,
    scale: f64,
}

impl BumpProfile {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Parameter(format!("bump support [{lo}, {hi}] is empty")));
        }
        Ok(BumpProfile { lo, hi, scale: 2.0 / ((hi - lo) * bump_mass()) })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - self.lo - self.hi) / (self.hi - self.lo)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * bump(self.to_unit(t))
    }

    /// `∫_{-∞}^t χ`.
    pub fn primitive(&self, t: f64) -> f64 {
        let u = self.to_unit(t);
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let m = bump_mass();
        if u <= 0.0 {
            Rule::gauss_legendre(128, -1.0, u).integrate(bump) / m
        } else {
            1.0 - Rule::gauss_legendre(128, u, 1.0).integrate(bump) / m
        }
    }

    /// `t ↦ χ(-t)`.
    pub fn reversed(&self) -> BumpProfile {
        BumpProfile { lo: -self.hi, hi: -self.lo, scale: self.scale }
    }

    /// Gauss–Legendre rule on the support.
    pub fn rule(&self, points: usize) -> Result<Rule> {
        if points < 2 {
            return Err(Error::Quadrature(format!("{points} nodes are too few")));
        }
        Ok(Rule::gauss_legendre(points, self.lo, self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_and_primitive() {
        let b = BumpProfile::new(1.0, 2.0).unwrap();
        let m = b.rule(64).unwrap().integrate(|t| b.eval(t));
        assert!((m - 1.0).abs() < 1e-10);
        assert!((b.primitive(1.5) - 0.5).abs() < 1e-14);
        assert_eq!(b.primitive(0.0), 0.0);
        assert_eq!(b.primitive(3.0), 1.0);
        let r = b.reversed();
        assert!((r.eval(-1.3) - b.eval(1.3)).abs() < 1e-15);
    }
}
