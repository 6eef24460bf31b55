use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::adaptive;
use crate::tolerances;

/// Logarithm of the integrand of `G_s` after `t = e^u`.
fn phase(u: f64, r2: f64, e: f64) -> f64 {
    -u.exp() - 0.25 * r2 * (-u).exp() + e * u
}

/// Maximiser of the concave [`phase`], by Newton on its derivative.
fn peak(r2: f64, e: f64) -> f64 {
    // Start from the larger root region; the derivative is strictly decreasing.
    let mut u = if r2 > 0.0 { (0.5 * r2.sqrt()).max(1e-300).ln() } else { e.max(1e-3).ln() };
    for _ in 0..200 {
        let d = -u.exp() + 0.25 * r2 * (-u).exp() + e;
        let dd = -u.exp() - 0.25 * r2 * (-u).exp();
        let step = (d / dd).clamp(-2.0, 2.0);
        u -= step;
        if step.abs() < 1e-14 * (1.0 + u.abs()) {
            break;
        }
    }
    u
}

fn kernel_at(n: usize, s: f64, r: f64) -> Result<f64> {
    let r2 = r * r;
    let e = 0.5 * (s - n as f64);
    let u0 = peak(r2, e);
    let top = phase(u0, r2, e);
    // The phase is concave, so stepping out until it drops by 60 brackets the mass.
    let drop = 60.0;
    let mut lo = u0 - 1.0;
    while top - phase(lo, r2, e) < drop {
        lo -= (u0 - lo).max(1.0);
    }
    let mut hi = u0 + 1.0;
    while top - phase(hi, r2, e) < drop {
        hi += (hi - u0).max(1.0);
    }
    let scaled = adaptive(|u| (phase(u, r2, e) - top).exp(), lo, hi, tolerances::BESSEL_QUADRATURE, 0.0)?;
    let log_norm = 0.5 * n as f64 * (4.0 * PI).ln() + ln_gamma(0.5 * s);
    Ok((scaled.ln() + top - log_norm).exp())
}

/// Bessel kernel `G_s` of `(1-Δ)^{-s/2}` on `ℝⁿ` at the given radii.
pub fn bessel_kernel(n: usize, s: f64, radii: &[f64]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("order s = {s} must be positive")));
    }
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Parameter(format!("radius {r} must be positive")));
            }
            kernel_at(n, s, r)
        })
        .collect()
}

/// `∫ G_s dx` by radial quadrature in `log r`.
pub fn bessel_kernel_mass(n: usize, s: f64) -> Result<f64> {
    bessel_kernel(n, s, &[1.0])?;
    let nf = n as f64;
    let sphere = 2.0 * PI.powf(0.5 * nf) / statrs::function::gamma::gamma(0.5 * nf);
    let failed = std::cell::Cell::new(None);
    let integrand = |w: f64| {
        let r = w.exp();
        match kernel_at(n, s, r) {
            Ok(g) => g * r.powf(nf),
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    // G_s r^n ~ r^s near 0 and ~ e^{-r} at infinity.
    let lo = (1e-13f64.ln() / s).min(-5.0);
    let hi = 80f64.ln();
    let v = adaptive(integrand, lo, hi, 1e-9, 0.0)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok(sphere * v)
}

/// Smallest `C` with `G_s(r) ≤ C e^{-r/2}` at the sampled radii.
pub fn exponential_bound_constant(n: usize, s: f64, radii: &[f64]) -> Result<f64> {
    let g = bessel_kernel(n, s, radii)?;
    Ok(g.iter().zip(radii).map(|(g, r)| g * (0.5 * r).exp()).fold(0.0, f64::max))
}
