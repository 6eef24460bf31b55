//! Regularity index `σ` and scaling exponent `s`, evaluated in exact rational
//! arithmetic on the binary values of the inputs and rounded once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Regularity parameters `(a, b, c, α, β, γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct RegularityParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn exact(x: f64, name: &str) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parameter(format!("{name} = {x} is not finite")))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

struct Exact {
    s: BigRational,
    sigma: BigRational,
}

fn evaluate(p: &RegularityParams) -> Result<Exact> {
    let a = exact(p.a, "a")?;
    let b = exact(p.b, "b")?;
    let c = exact(p.c, "c")?;
    let al = exact(p.alpha, "α")?;
    let be = exact(p.beta, "β")?;
    let ga = exact(p.gamma, "γ")?;
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let num = &one + &a + &b - &two * &c;
    if num < BigRational::zero() {
        return Err(Error::Constraint(format!("1+a+b-2c = {} < 0", to_f64(&num))));
    }
    let ab = &al + &be;
    if ab > BigRational::zero() {
        return Err(Error::Constraint(format!("α+β = {} > 0", to_f64(&ab))));
    }
    if ga <= -&half {
        return Err(Error::Constraint(format!("γ = {} ≤ -1/2", p.gamma)));
    }
    let den = &one - &ab + &two * &ga;
    let s = num / den;
    let sigma = &s * (&half + &ga) + &c;
    // s = 2(σ - c)/(1 + 2γ) holds identically; checked in exact arithmetic.
    debug_assert!(&two * (&sigma - &c) / (&one + &two * &ga) == s);
    Ok(Exact { s, sigma })
}

/// `σ = ((1+a+b-2c)/(1-α-β+2γ))(1/2+γ) + c`, correctly rounded.
pub fn regularity_index(p: &RegularityParams) -> Result<f64> {
    Ok(to_f64(&evaluate(p)?.sigma))
}

/// `s = (1+a+b-2c)/(1-α-β+2γ)`, correctly rounded.
pub fn scaling_exponent(p: &RegularityParams) -> Result<f64> {
    Ok(to_f64(&evaluate(p)?.s))
}

/// The specialisation `c = a`, `γ = α`: `σ = ((1+b-a)/(1+α-β))(1/2+α) + a`.
pub fn corollary_regularity(a: f64, b: f64, alpha: f64, beta: f64) -> Result<f64> {
    regularity_index(&RegularityParams { a, b, c: a, alpha, beta, gamma: alpha })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters() {
        let p = RegularityParams::default();
        assert_eq!(regularity_index(&p).unwrap(), 0.5);
        assert_eq!(scaling_exponent(&p).unwrap(), 1.0);
    }

    #[test]
    fn gamma_boundary_rejected() {
        let p = RegularityParams { gamma: -0.5, ..Default::default() };
        assert!(matches!(regularity_index(&p), Err(Error::Constraint(_))));
        let p = RegularityParams { alpha: 0.2, beta: 0.1, ..Default::default() };
        assert!(matches!(regularity_index(&p), Err(Error::Constraint(_))));
        let p = RegularityParams { c: 1.0, ..Default::default() };
        assert!(matches!(regularity_index(&p), Err(Error::Constraint(_))));
    }

    #[test]
    fn dual_specialisation_is_one_half() {
        for &(a, al) in &[(0.1, 0.3), (-0.37, 0.11), (0.25, -0.2)] {
            assert_eq!(corollary_regularity(a, -a, al, -al).unwrap(), 0.5);
        }
    }
}
