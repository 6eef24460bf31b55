use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::BumpProfile;
use super::{flow_average, free_stream, SeparableField};
use crate::error::{Error, Result};
use crate::norms::{mixed_norm, Nesting};
use crate::spectral_core::Field;
use crate::symbols::{check_constraints, Constraint};

/// Fields whose free streaming can be measured in `L^p_x L^r_v`.
pub trait Streamable: Sync {
    fn dims(&self) -> usize;

    /// `‖f(x - tv, v)‖_{L^p_x L^r_v}`.
    fn streamed_norm(&self, t: f64, p: f64, r: f64) -> Result<f64>;
}

impl Streamable for Field {
    fn dims(&self) -> usize {
        self.grid().n
    }

    fn streamed_norm(&self, t: f64, p: f64, r: f64) -> Result<f64> {
        mixed_norm(&free_stream(self, t)?, p, r, Nesting::XOuter)
    }
}

impl Streamable for SeparableField {
    fn dims(&self) -> usize {
        SeparableField::dims(self)
    }

    fn streamed_norm(&self, t: f64, p: f64, r: f64) -> Result<f64> {
        self.free_stream(t)?.mixed_norm(p, r, Nesting::XOuter)
    }
}

/// Least-squares slope of `log ‖f(t)‖` against `log t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    pub t_min: f64,
    pub t_max: f64,
    /// `-n(1/r - 1/p)`.
    pub theoretical: f64,
    /// `(t, norm)` pairs in input order.
    pub samples: Vec<(f64, f64)>,
}

impl DecayFit {
    /// Relative deviation from the theoretical exponent, absolute when that is zero.
    pub fn deviation(&self) -> f64 {
        let d = (self.exponent - self.theoretical).abs();
        if self.theoretical == 0.0 {
            d
        } else {
            d / self.theoretical.abs()
        }
    }
}

fn inv(p: f64) -> f64 {
    1.0 / p
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Singular("sample times are not distinct".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    Ok((slope, (ssr / (m - 2.0) / sxx).sqrt()))
}

/// Fits the decay of `‖f(x - tv, v)‖_{L^p_x L^r_v}` over the sample times.
pub fn dispersion_decay_fit<S: Streamable>(field: &S, p: f64, r: f64, times: &[f64]) -> Result<DecayFit> {
    if !(r >= 1.0 && r <= p) {
        return Err(Error::Exponent(format!("need 1 ≤ r ≤ p, got r = {r}, p = {p}")));
    }
    if times.len() < 5 {
        return Err(Error::Parameter(format!("a decay fit needs at least 5 times, got {}", times.len())));
    }
    if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Parameter("sample times must be positive".into()));
    }
    let norms: Vec<f64> = times.par_iter().map(|&t| field.streamed_norm(t, p, r)).collect::<Result<_>>()?;
    if norms.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Singular("streamed norm vanished".into()));
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (exponent, stderr) = least_squares(&xs, &ys)?;
    Ok(DecayFit {
        exponent,
        stderr,
        t_min: times.iter().cloned().fold(f64::INFINITY, f64::min),
        t_max: times.iter().cloned().fold(0.0, f64::max),
        theoretical: -(field.dims() as f64) * (inv(r) - inv(p)),
        samples: times.iter().cloned().zip(norms).collect(),
    })
}

/// `(q, a)` from `2/q = n(1/r - 1/p)` and `2/a = 1/p + 1/r`, checked for admissibility.
pub fn strichartz_tuple(n: usize, p: f64, r: f64) -> Result<(f64, f64)> {
    let gap = n as f64 * (inv(r) - inv(p));
    if gap <= 0.0 {
        return Err(Error::Exponent(format!("need r < p, got r = {r}, p = {p}")));
    }
    let q = 2.0 / gap;
    let a = 2.0 / (inv(p) + inv(r));
    let check = check_constraints(&Constraint::Strichartz { n, q, p, r, a })?;
    if !check.holds {
        return Err(Error::Constraint(check.diagnostic));
    }
    Ok((q, a))
}

/// Finite-window Strichartz measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    /// `‖f(t)‖_{L^q_t([-T,T]) L^p_x L^r_v} / ‖f‖_{L^a_{x,v}}`.
    pub ratio: f64,
    pub window: f64,
    /// Bound on the discarded `∫_{|t|>T} ‖f(t)‖^q` relative to the window integral.
    pub relative_tail: f64,
}

fn window_rule(window: f64, points: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut e = 1.0f64.min(window);
    while e < window {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(window);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let r = crate::quadrature::Rule::gauss_legendre(points, w[0], w[1]);
        for (&t, &wt) in r.nodes.iter().zip(&r.weights) {
            out.push((t, wt));
            out.push((-t, wt));
        }
    }
    out
}

/// `‖f(x - tv, v)‖_{L^q_t L^p_x L^r_v} / ‖f‖_{L^a_{x,v}}` on `t ∈ [-T, T]`.
pub fn strichartz_ratio(
    field: &Field,
    exponents: (f64, f64, f64, f64),
    window: f64,
    points: usize,
) -> Result<StrichartzReport> {
    let (q, p, r, a) = exponents;
    let n = field.grid().n;
    let check = check_constraints(&Constraint::Strichartz { n, q, p, r, a })?;
    if !check.holds {
        return Err(Error::Constraint(check.diagnostic));
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::Parameter(format!("window {window} must be positive")));
    }
    super::check_in_box(field, window)?;
    let rule = window_rule(window, points);
    let terms: Vec<f64> = rule
        .par_iter()
        .map(|&(t, w)| Ok(w * field.streamed_norm(t, p, r)?.powf(q)))
        .collect::<Result<_>>()?;
    let integral: f64 = terms.iter().sum();
    let data = mixed_norm(field, a, a, Nesting::XOuter)?;
    if data == 0.0 {
        return Err(Error::Singular("field vanishes".into()));
    }
    // Dispersion gives ‖f(t)‖ ≤ |t|^{-2/q} ‖f‖_{L^r_x L^p_v}, so each tail is at most ‖f‖^q / T.
    let swapped = mixed_norm(field, r, p, Nesting::XOuter)?;
    let tail = 2.0 * swapped.powf(q) / window;
    Ok(StrichartzReport { ratio: integral.powf(1.0 / q) / data, window, relative_tail: tail / integral })
}

/// `‖∫ f(x - tv, v) χ(t) dt‖_{L^{p₀}_x L^{r₀}_v} / ‖f‖_{L^{r₁}_x L^{p₁}_v}`.
pub fn dispersive_lemma_ratio(
    field: &Field,
    exponents: (f64, f64, f64, f64),
    profile: &BumpProfile,
    points: usize,
) -> Result<f64> {
    let (p0, r0, p1, r1) = exponents;
    let n = field.grid().n;
    let (lo, hi) = profile.support();
    let constraint = if lo <= 0.0 && hi >= 0.0 {
        Constraint::DispersiveOrigin { n, p0, r0, p1, r1 }
    } else {
        Constraint::DispersiveAway { n, p0, r0, p1, r1 }
    };
    let check = check_constraints(&constraint)?;
    if !check.holds {
        return Err(Error::Constraint(check.diagnostic));
    }
    let avg = flow_average(field, profile, points)?;
    let den = mixed_norm(field, r1, p1, Nesting::XOuter)?;
    if den == 0.0 {
        return Err(Error::Singular("field vanishes".into()));
    }
    Ok(mixed_norm(&avg, p0, r0, Nesting::XOuter)? / den)
}

/// `|⟨A_χ f, g⟩ - ⟨f, A_{χ(-·)} g⟩| / (‖A_χ f‖ ‖g‖)` for the flow average `A_χ`.
pub fn flow_adjoint_gap(f: &Field, g: &Field, profile: &BumpProfile, points: usize) -> Result<f64> {
    let af = flow_average(f, profile, points)?;
    let ag = flow_average(g, &profile.reversed(), points)?;
    let lhs = af.inner(g)?;
    let rhs = f.inner(&ag)?;
    let scale = af.l2_norm() * g.l2_norm();
    if scale == 0.0 {
        return Err(Error::Singular("zero field".into()));
    }
    Ok((lhs - rhs).norm() / scale)
}
