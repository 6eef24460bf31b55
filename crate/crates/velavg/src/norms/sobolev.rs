use std::f64::consts::PI;

use num_complex::Complex64;

use super::{lebesgue_exponent, open_exponent, Variable};
use crate::error::{Error, Result};
use crate::spectral_core::{
    average_spectrum_trace, for_each_mode, forward_transform, inverse_transform, Field, SpatialField,
};
use crate::tolerances;

/// `|k|^s` (zero mode dropped unless `s = 0`) or `⟨k⟩^s`.
fn weight(k2: f64, s: f64, homogeneous: bool) -> f64 {
    if homogeneous {
        if s == 0.0 {
            1.0
        } else if k2 == 0.0 {
            0.0
        } else {
            k2.powf(0.5 * s)
        }
    } else {
        (1.0 + k2).powf(0.5 * s)
    }
}

fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|t| t * t).sum()
}

/// `‖w(D) f‖_{L^r}` over phase space, with `w` a Bessel or Riesz weight in the chosen variables.
pub fn sobolev_norm(field: &Field, s: f64, r: f64, homogeneous: bool, variable: Variable) -> Result<f64> {
    open_exponent("r", r)?;
    if s == 0.0 {
        return super::joint_lp(field, r);
    }
    let spec = forward_transform(field).map_modes(|xi, eta| {
        let k2 = match variable {
            Variable::X => norm_sq(xi),
            Variable::V => norm_sq(eta),
            Variable::Joint => norm_sq(xi) + norm_sq(eta),
        };
        Complex64::new(weight(k2, s, homogeneous), 0.0)
    })?;
    super::joint_lp(&inverse_transform(&spec), r)
}

/// `‖w(D) g‖_{L^r}` for a function of `x` alone.
pub fn sobolev_norm_spatial(g: &SpatialField, s: f64, r: f64, homogeneous: bool) -> Result<f64> {
    lebesgue_exponent("r", r)?;
    if r == 1.0 || r.is_infinite() {
        return Err(Error::Exponent(format!("r = {r} must lie in (1, ∞)")));
    }
    if s == 0.0 {
        return Ok(g.lp_norm(r));
    }
    Ok(g.apply_weight(|xi| weight(norm_sq(xi), s, homogeneous)).lp_norm(r))
}

/// `‖f̃‖_{Ḣ^{1/2}}` from the `η = 0` trace: `((2π)^{-n} Σ |ξ| |f̂(ξ,0)|² dξ)^{1/2}`.
pub fn average_h_half(field: &Field) -> f64 {
    let g = field.grid();
    let trace = average_spectrum_trace(&forward_transform(field));
    let mut sum = 0.0;
    for_each_mode(&g.spatial_axes(), |flat, xi, _| {
        sum += norm_sq(xi).sqrt() * trace[flat].norm_sqr();
    });
    let dxi = g.dxi();
    (sum * dxi / (2.0 * PI).powi(g.n as i32)).sqrt()
}

/// `‖⟨D⟩^r h‖_{L^{p₀}} / ‖⟨D⟩^r h‖_{L^{p₁}}` for `h` supported in the ball of radius `support_radius`.
pub fn local_embedding_ratio(h: &SpatialField, support_radius: f64, r: f64, p0: f64, p1: f64) -> Result<f64> {
    lebesgue_exponent("p0", p0)?;
    lebesgue_exponent("p1", p1)?;
    if p0 > p1 {
        return Err(Error::Exponent(format!("need p0 ≤ p1, got {p0} > {p1}")));
    }
    let max = h.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Parameter("field vanishes".into()));
    }
    let mut x = vec![0.0; h.n];
    for (i, z) in h.values.iter().enumerate() {
        h.point(i, &mut x);
        if norm_sq(&x).sqrt() > support_radius && z.norm() > tolerances::SUPPORT_THRESHOLD * max {
            return Err(Error::Constraint(format!(
                "field is not supported in the ball of radius {support_radius}: |h| = {:.3e} at {x:?}",
                z.norm()
            )));
        }
    }
    let w = if r == 0.0 { h.clone() } else { h.apply_weight(|xi| weight(norm_sq(xi), r, false)) };
    let den = w.lp_norm(p1);
    if den == 0.0 {
        return Err(Error::Singular("weighted field vanishes".into()));
    }
    Ok(w.lp_norm(p0) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;

    fn h_half_gap(half_width: f64, points: usize) -> f64 {
        let axis = make_grid(1, points, 8, half_width, 1.0).unwrap().x_axis();
        let g = SpatialField::from_fn(1, axis, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0));
        (sobolev_norm_spatial(&g, 0.5, 2.0, true).unwrap() - 1.0).abs()
    }

    #[test]
    fn h_half_of_gaussian_is_one() {
        // The kink of |ξ| at the origin costs O(Δξ²) on the lattice.
        let coarse = h_half_gap(32.0, 1024);
        let fine = h_half_gap(64.0, 2048);
        assert!(fine < 1e-3, "{fine}");
        assert!(coarse / fine > 3.5, "{coarse} {fine}");
    }

    #[test]
    fn odd_in_velocity_has_zero_average() {
        let grid = make_grid(1, 64, 64, 8.0, 8.0).unwrap();
        let f = Field::from_real_fn(grid, |x, v| v[0] * (-x[0] * x[0] - v[0] * v[0]).exp()).unwrap();
        assert!(average_h_half(&f) < 1e-12);
    }
}
