//! Finite-sample estimates of the Marcinkiewicz and Hörmander–Mihlin sums.
//!
//! True suprema are not computable; both sums are taken over a dyadic scan
//! grid that avoids the coordinate axes, and divergence shows up as growth
//! when the grid's outer radius is doubled.

use super::MultiplierSymbol;
use crate::error::{Error, Result};

/// Tensor grid with per-coordinate values `±r_min·2^{j/per_octave} ≤ r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    /// Number of frequency coordinates, `2n`.
    pub dims: usize,
    pub min_magnitude: f64,
    pub max_magnitude: f64,
    pub per_octave: usize,
    /// Coordinates whose sign pattern is mirrored.
    pub reflected: Vec<bool>,
}

impl ScanGrid {
    pub fn new(dims: usize, min_magnitude: f64, max_magnitude: f64, per_octave: usize) -> Result<Self> {
        if dims == 0 || per_octave == 0 || !(min_magnitude > 0.0) || !(max_magnitude >= min_magnitude) {
            return Err(Error::Parameter("scan grid needs dims, per_octave ≥ 1 and 0 < r_min ≤ r_max".into()));
        }
        Ok(ScanGrid { dims, min_magnitude, max_magnitude, per_octave, reflected: vec![false; dims] })
    }

    /// Same grid with the outer radius doubled.
    pub fn doubled(&self) -> ScanGrid {
        ScanGrid { max_magnitude: 2.0 * self.max_magnitude, ..self.clone() }
    }

    /// Mirror image across the hyperplane `k_axis = 0`.
    pub fn reflect(&self, axis: usize) -> ScanGrid {
        let mut g = self.clone();
        g.reflected[axis] = !g.reflected[axis];
        g
    }

    fn values(&self, axis: usize) -> Vec<f64> {
        let mut mags = Vec::new();
        let mut j = 0;
        loop {
            let r = self.min_magnitude * 2f64.powf(j as f64 / self.per_octave as f64);
            if r > self.max_magnitude * (1.0 + 1e-12) {
                break;
            }
            mags.push(r);
            j += 1;
        }
        let s = if self.reflected[axis] { -1.0 } else { 1.0 };
        let mut out: Vec<f64> = mags.iter().map(|r| -s * r).rev().collect();
        out.extend(mags.iter().map(|r| s * r));
        out
    }

    fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dims).map(|a| self.values(a)).collect();
        let mut pts = vec![Vec::new()];
        for vals in &axes {
            let mut next = Vec::with_capacity(pts.len() * vals.len());
            for p in &pts {
                for &v in vals {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }
}

fn stencil(order: u32) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        _ => panic!("derivative order {order} not supported"),
    }
}

/// `∂^λψ(k)` by tensor central differences with steps `rel·|k_i|`.
fn derivative(psi: &impl Fn(&[f64]) -> f64, k: &[f64], lambda: &[u32], rel: f64) -> f64 {
    let active: Vec<usize> = (0..k.len()).filter(|&i| lambda[i] > 0).collect();
    if active.is_empty() {
        return psi(k);
    }
    let steps: Vec<f64> = k.iter().map(|x| rel * x.abs()).collect();
    let mut total = 0.0;
    let mut counters = vec![0usize; active.len()];
    let mut q = k.to_vec();
    loop {
        let mut w = 1.0;
        for (c, &i) in counters.iter().zip(&active) {
            let (off, coef) = stencil(lambda[i])[*c];
            q[i] = k[i] + off * steps[i];
            w *= coef / steps[i].powi(lambda[i] as i32);
        }
        total += w * psi(&q);
        let mut a = 0;
        loop {
            if a == active.len() {
                return total;
            }
            counters[a] += 1;
            if counters[a] < stencil(lambda[active[a]]).len() {
                break;
            }
            counters[a] = 0;
            a += 1;
        }
    }
}

/// Richardson-refined derivative: steps `rel` and `rel/2`.
fn refined_derivative(psi: &impl Fn(&[f64]) -> f64, k: &[f64], lambda: &[u32]) -> f64 {
    if lambda.iter().all(|&l| l == 0) {
        return psi(k);
    }
    const REL: f64 = 1e-2;
    let coarse = derivative(psi, k, lambda, REL);
    let fine = derivative(psi, k, lambda, REL / 2.0);
    (4.0 * fine - coarse) / 3.0
}

fn as_fn(symbol: &MultiplierSymbol, n: usize) -> impl Fn(&[f64]) -> f64 + '_ {
    move |k: &[f64]| symbol.eval(&k[..n], &k[n..])
}

fn multi_indices(dims: usize, max_each: u32, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dims {
        let mut next = Vec::new();
        for l in &out {
            let used: u32 = l.iter().sum();
            for o in 0..=max_each {
                if used + o <= max_total {
                    let mut m = l.clone();
                    m.push(o);
                    next.push(m);
                }
            }
        }
        out = next;
    }
    out
}

fn criterion_sum(
    symbol: &MultiplierSymbol,
    grid: &ScanGrid,
    indices: &[Vec<u32>],
    weight: impl Fn(&[f64], &[u32]) -> f64,
) -> Result<f64> {
    if !grid.dims.is_multiple_of(2) {
        return Err(Error::Parameter("scan grid must have 2n coordinates".into()));
    }
    let psi = as_fn(symbol, grid.dims / 2);
    let points = grid.points();
    let mut sups = vec![0.0f64; indices.len()];
    for k in &points {
        for (s, lambda) in sups.iter_mut().zip(indices) {
            let d = refined_derivative(&psi, k, lambda);
            let t = (weight(k, lambda) * d).abs();
            if !t.is_finite() {
                return Err(Error::NonFinite(format!("criterion term λ={lambda:?} at {k:?}")));
            }
            *s = s.max(t);
        }
    }
    Ok(sups.iter().sum())
}

/// `Σ_{λ∈{0,1}^{2n}} sup |k^λ ∂^λψ|` over the scan grid.
pub fn marcinkiewicz_bound(symbol: &MultiplierSymbol, grid: &ScanGrid) -> Result<f64> {
    let idx = multi_indices(grid.dims, 1, grid.dims as u32);
    criterion_sum(symbol, grid, &idx, |k, l| {
        k.iter().zip(l).filter(|(_, &o)| o == 1).map(|(x, _)| *x).product()
    })
}

/// `Σ_{|λ|≤[N/2]+1} sup |k|^{|λ|} |∂^λψ|` over the scan grid, `N = 2n`.
pub fn hormander_bound(symbol: &MultiplierSymbol, grid: &ScanGrid) -> Result<f64> {
    let top = (grid.dims / 2 + 1) as u32;
    if top > 3 {
        return Err(Error::Parameter("Hörmander sum implemented for n ≤ 2".into()));
    }
    let idx = multi_indices(grid.dims, top, top);
    criterion_sum(symbol, grid, &idx, |k, l| {
        let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
        r.powi(l.iter().sum::<u32>() as i32)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{bessel_weight, sign_tensor_symbol, SmoothCustom};

    #[test]
    fn constant_symbol_gives_one() {
        let g = ScanGrid::new(2, 0.125, 64.0, 2).unwrap();
        let one = MultiplierSymbol::SmoothCustom(SmoothCustom::constant(1.0));
        assert!((marcinkiewicz_bound(&one, &g).unwrap() - 1.0).abs() < 1e-12);
        assert!((hormander_bound(&one, &g).unwrap() - 1.0).abs() < 1e-12);
        assert!((hormander_bound(&bessel_weight(0.0, 0.0), &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_tensor_gives_n() {
        let g = ScanGrid::new(2, 0.25, 16.0, 1).unwrap();
        assert!((marcinkiewicz_bound(&sign_tensor_symbol(1).unwrap(), &g).unwrap() - 1.0).abs() < 1e-12);
        let g4 = ScanGrid::new(4, 0.5, 4.0, 1).unwrap();
        assert!((marcinkiewicz_bound(&sign_tensor_symbol(2).unwrap(), &g4).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_monomial() {
        let psi = |k: &[f64]| k[0] * k[0] * k[1];
        let d = refined_derivative(&psi, &[1.5, -2.0], &[1, 1]);
        assert!((d - 3.0).abs() < 1e-9);
        let d2 = refined_derivative(&psi, &[1.5, -2.0], &[2, 0]);
        assert!((d2 + 4.0).abs() < 1e-8);
    }
}
