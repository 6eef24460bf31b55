//! Free streaming `f(x - tv, v)`, time averages along the flow, the parametrix
//! and decay measurements.

mod decay;
mod parametrix;
mod profile;
mod separable;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral_core::{Field, PhaseGrid};
use crate::tolerances;

pub use decay::{
    dispersion_decay_fit, dispersive_lemma_ratio, flow_adjoint_gap, strichartz_ratio, strichartz_tuple, DecayFit,
    StrichartzReport, Streamable,
};
pub use parametrix::{build_parametrix_cutoffs, parametrix_reconstruct, ParametrixCutoffs};
pub use profile::BumpProfile;
pub use separable::SeparableField;

/// Whether every `x` row equals the first one.
fn is_x_independent(field: &Field) -> bool {
    let vl = field.grid().v_len();
    let s = field.samples();
    let tol = 1e-14 * field.max_abs();
    let first = &s[..vl];
    s.chunks(vl).all(|row| row.iter().zip(first).all(|(a, b)| (a - b).norm() <= tol))
}

/// Rejects flows whose streamed support would wrap around the periodic box.
pub(crate) fn check_in_box(field: &Field, max_time: f64) -> Result<()> {
    if max_time == 0.0 || is_x_independent(field) {
        return Ok(());
    }
    let (rx, rv) = field.support_extent(tolerances::SUPPORT_THRESHOLD);
    let need = rx + max_time.abs() * rv;
    if need >= field.grid().half_width_x {
        return Err(Error::BoxOverflow { min_half_width: need });
    }
    Ok(())
}

/// Multiplies the `x`-spectrum by `m(v·ξ)`, averaging over Nyquist aliases in `ξ`.
pub(crate) fn flow_multiplier(field: &Field, m: impl Fn(f64) -> Complex64 + Sync) -> Result<Field> {
    let g: PhaseGrid = *field.grid();
    let n = g.n;
    let vl = g.v_len();
    let xa = g.x_axis();
    let mut spec = field.x_spectrum();
    let mut vpts = vec![0.0; vl * n];
    for iv in 0..vl {
        g.v_point(iv, &mut vpts[iv * n..(iv + 1) * n]);
    }
    spec.par_chunks_mut(vl).enumerate().for_each(|(ix, row)| {
        let mut xi = vec![0.0; n];
        let mut nyq = Vec::new();
        let mut rem = ix;
        for d in (0..n).rev() {
            let k = rem % g.points_x;
            rem /= g.points_x;
            xi[d] = xa.frequency(k);
            if xa.is_nyquist(k) {
                nyq.push(d);
            }
        }
        let combos = 1usize << nyq.len();
        for (iv, z) in row.iter_mut().enumerate() {
            let v = &vpts[iv * n..(iv + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for mask in 0..combos {
                let mut a = 0.0;
                for d in 0..n {
                    let flip = nyq.iter().position(|&e| e == d).is_some_and(|b| mask >> b & 1 == 1);
                    a += v[d] * if flip { -xi[d] } else { xi[d] };
                }
                acc += m(a);
            }
            *z *= acc / combos as f64;
        }
    });
    Field::from_x_spectrum(g, spec)
}

/// `f(x - tv, v)` by the spectral phase `e^{-it v·ξ}`.
pub fn free_stream(field: &Field, t: f64) -> Result<Field> {
    if !t.is_finite() {
        return Err(Error::Parameter(format!("time {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    check_in_box(field, t)?;
    shear(field, t)
}

/// Free-streaming phase as a product of per-axis tables; Nyquist rows take the alias average.
fn shear(field: &Field, t: f64) -> Result<Field> {
    let g: PhaseGrid = *field.grid();
    let n = g.n;
    let pv = g.points_v;
    let vl = g.v_len();
    let xa = g.x_axis();
    let va = g.v_axis();
    let vs = va.coordinates();
    let h = va.spacing();
    let mut spec = field.x_spectrum();
    spec.par_chunks_mut(vl).enumerate().for_each(|(ix, row)| {
        let mut table = vec![Complex64::new(0.0, 0.0); n * pv];
        let mut rem = ix;
        for d in (0..n).rev() {
            let k = rem % g.points_x;
            rem /= g.points_x;
            let xi = xa.frequency(k);
            let out = &mut table[d * pv..(d + 1) * pv];
            if xa.is_nyquist(k) {
                for (z, &v) in out.iter_mut().zip(&vs) {
                    *z = Complex64::new((t * v * xi).cos(), 0.0);
                }
            } else {
                // Geometric recurrence along the uniform v axis, re-anchored to bound drift.
                let step = Complex64::from_polar(1.0, -t * h * xi);
                let mut cur = Complex64::new(1.0, 0.0);
                for (j, z) in out.iter_mut().enumerate() {
                    if j % 64 == 0 {
                        cur = Complex64::from_polar(1.0, -t * vs[j] * xi);
                    }
                    *z = cur;
                    cur *= step;
                }
            }
        }
        for (iv, z) in row.iter_mut().enumerate() {
            let mut phase = Complex64::new(1.0, 0.0);
            let mut r = iv;
            for d in (0..n).rev() {
                phase *= table[d * pv + r % pv];
                r /= pv;
            }
            *z *= phase;
        }
    });
    Field::from_x_spectrum(g, spec)
}

/// `∫ f(x - tv, v) χ(t) dt` with a Gauss–Legendre rule on the support of `χ`.
pub fn flow_average(field: &Field, profile: &BumpProfile, points: usize) -> Result<Field> {
    let rule = profile.rule(points)?;
    let tmax = rule.nodes.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    check_in_box(field, tmax)?;
    let w: Vec<(f64, f64)> = rule.nodes.iter().zip(&rule.weights).map(|(&t, &w)| (t, w * profile.eval(t))).collect();
    flow_multiplier(field, |a| w.iter().map(|&(t, c)| Complex64::from_polar(c, -t * a)).sum())
}
