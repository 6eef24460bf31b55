//! Cutoff functions for the hypoelliptic symbols.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Plateau or Schwartz-class cutoff evaluated on `ℝ^d`.
#[derive(Clone, Debug, PartialEq)]
pub enum CutoffFn {
    /// `𝟙_{|r|≤1/2} ≤ χ ≤ 𝟙_{|r|≤1}`, quintic smoothstep in `|r|`.
    Plateau1D,
    /// `χ = χ₀ p` with `χ̂₀` compactly supported and `p` flattening `χ` at 0.
    SchwartzND(Arc<SchwartzCutoff>),
}

/// Data of the [`CutoffFn::SchwartzND`] construction.
///
/// The base is `χ₀(r) = Π_d φ(r_d)` with `φ(u) = sinc(κu)^M`, `κ = (3/M)^{1/2}`.
/// `φ` is the transform of an order-`M` B-spline supported in `[-Mκ, Mκ]`, so
/// `χ̂₀` is compactly supported and `φ(u) ≈ e^{-u²/2}` near the origin.
/// `p` is the degree-`N` truncation of `1/χ₀`, so `χ = 1 + O(|r|^{N+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwartzCutoff {
    pub dim: usize,
    pub gamma: f64,
    pub degree: usize,
    pub order: u32,
    kappa: f64,
    /// Monomials `(exponents, coefficient)` of the correction polynomial.
    terms: Vec<(Vec<u32>, f64)>,
}

fn smoothstep5(t: f64) -> f64 {
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

fn smoothstep5_prime(t: f64) -> f64 {
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

/// Smooth plateau cutoff on the line.
pub fn build_cutoff_1d() -> CutoffFn {
    CutoffFn::Plateau1D
}

/// Schwartz-class cutoff on `ℝ^dim` whose derivatives vanish at 0 up to order `degree`.
pub fn build_cutoff_nd(dim: usize, gamma: f64, degree: usize) -> Result<CutoffFn> {
    Ok(CutoffFn::SchwartzND(Arc::new(SchwartzCutoff::new(dim, gamma, degree)?)))
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

fn sinc_prime(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        let y2 = y * y;
        -y / 3.0 + y * y2 / 30.0
    } else {
        (y * y.cos() - y.sin()) / (y * y)
    }
}

impl SchwartzCutoff {
    pub fn new(dim: usize, gamma: f64, degree: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("cutoff dimension must be positive".into()));
        }
        if !gamma.is_finite() {
            return Err(Error::Parameter("γ must be finite".into()));
        }
        if gamma > 0.0 && (degree as f64) < (2.0 * gamma).ceil() + 1.0 {
            return Err(Error::Parameter(format!(
                "degree {degree} too small for γ = {gamma}: need at least ceil(2γ)+1"
            )));
        }
        let extra = (2.0 * gamma.max(0.0)).ceil() as usize;
        let mut order = (degree + extra + 4).max(12) as u32;
        if order % 2 == 1 {
            order += 1;
        }
        let kappa = (3.0 / order as f64).sqrt();

        // Taylor coefficients of φ up to `degree`.
        let mut sinc_series = vec![0.0; degree + 1];
        for k in 0..=degree {
            if k % 2 == 0 {
                let mut f = 1.0;
                for j in 1..=(k + 1) {
                    f *= j as f64;
                }
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                sinc_series[k] = sign / f * kappa.powi(k as i32);
            }
        }
        let mut phi = vec![0.0; degree + 1];
        phi[0] = 1.0;
        for _ in 0..order {
            let mut next = vec![0.0; degree + 1];
            for (i, &a) in phi.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (j, &b) in sinc_series.iter().enumerate().take(degree + 1 - i) {
                    next[i + j] += a * b;
                }
            }
            phi = next;
        }
        // Series reciprocal q = 1/φ: triangular solve Σ_j φ_j q_{d-j} = δ_{d0}.
        if phi[0].abs() < 1e-300 {
            return Err(Error::Singular("χ₀(0) = 0".into()));
        }
        let mut q = vec![0.0; degree + 1];
        q[0] = 1.0 / phi[0];
        for d in 1..=degree {
            let s: f64 = (1..=d).map(|j| phi[j] * q[d - j]).sum();
            q[d] = -s / phi[0];
        }
        // Degree-truncated product Π_d q(r_d).
        let mut terms: Vec<(Vec<u32>, f64)> = vec![(vec![0; dim], 1.0)];
        for axis in 0..dim {
            let mut next = Vec::new();
            for (exps, c) in &terms {
                let used: u32 = exps.iter().sum();
                for (k, &qk) in q.iter().enumerate() {
                    if qk == 0.0 || used as usize + k > degree {
                        continue;
                    }
                    let mut e = exps.clone();
                    e[axis] = k as u32;
                    next.push((e, c * qk));
                }
            }
            terms = next;
        }
        Ok(SchwartzCutoff { dim, gamma, degree, order, kappa, terms })
    }

    fn phi(&self, u: f64) -> f64 {
        sinc(self.kappa * u).powi(self.order as i32)
    }

    fn phi_prime(&self, u: f64) -> f64 {
        let y = self.kappa * u;
        self.order as f64 * sinc(y).powi(self.order as i32 - 1) * sinc_prime(y) * self.kappa
    }

    fn poly(&self, r: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(r).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    fn poly_grad(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for (e, c) in &self.terms {
            for d in 0..self.dim {
                if e[d] == 0 {
                    continue;
                }
                let mut t = c * e[d] as f64;
                for (a, (&k, &x)) in e.iter().zip(r).enumerate() {
                    let k = if a == d { k - 1 } else { k };
                    t *= x.powi(k as i32);
                }
                out[d] += t;
            }
        }
    }

    pub fn base(&self, r: &[f64]) -> f64 {
        r.iter().map(|&u| self.phi(u)).product()
    }

    pub fn eval(&self, r: &[f64]) -> f64 {
        self.base(r) * self.poly(r)
    }

    pub fn gradient(&self, r: &[f64], out: &mut [f64]) {
        let phis: Vec<f64> = r.iter().map(|&u| self.phi(u)).collect();
        let base: f64 = phis.iter().product();
        let p = self.poly(r);
        self.poly_grad(r, out);
        for d in 0..self.dim {
            let others: f64 = phis.iter().enumerate().filter(|(a, _)| *a != d).map(|(_, v)| v).product();
            out[d] = self.phi_prime(r[d]) * others * p + base * out[d];
        }
    }

    /// Half-width of the compact support of `χ̂₀` along each axis.
    pub fn transform_support(&self) -> f64 {
        self.order as f64 * self.kappa
    }
}

impl CutoffFn {
    pub fn eval(&self, r: &[f64]) -> f64 {
        match self {
            CutoffFn::Plateau1D => {
                let rho = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                if rho <= 0.5 {
                    1.0
                } else if rho >= 1.0 {
                    0.0
                } else {
                    smoothstep5(2.0 * (1.0 - rho))
                }
            }
            CutoffFn::SchwartzND(c) => c.eval(r),
        }
    }

    /// Gradient of `χ` at `r`.
    pub fn gradient(&self, r: &[f64], out: &mut [f64]) {
        match self {
            CutoffFn::Plateau1D => {
                let rho = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                let d = if rho > 0.5 && rho < 1.0 { -2.0 * smoothstep5_prime(2.0 * (1.0 - rho)) } else { 0.0 };
                for (o, x) in out.iter_mut().zip(r) {
                    *o = if rho > 0.0 { d * x / rho } else { 0.0 };
                }
            }
            CutoffFn::SchwartzND(c) => c.gradient(r, out),
        }
    }

    /// Dimension the cutoff is defined on; the plateau accepts any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            CutoffFn::Plateau1D => None,
            CutoffFn::SchwartzND(c) => Some(c.dim),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_sandwich() {
        let c = build_cutoff_1d();
        assert_eq!(c.eval(&[0.3]), 1.0);
        assert_eq!(c.eval(&[1.5]), 0.0);
        let mut worst = 0.0f64;
        let mut g = [0.0];
        for i in 0..=20000 {
            let r = -1.5 + 3.0 * i as f64 / 20000.0;
            let v = c.eval(&[r]);
            let lower = if r.abs() <= 0.5 { 1.0 } else { 0.0 };
            let upper = if r.abs() <= 1.0 { 1.0 } else { 0.0 };
            assert!(lower <= v && v <= upper);
            c.gradient(&[r], &mut g);
            worst = worst.max(g[0].abs());
        }
        assert!(worst <= 5.0, "max |χ'| = {worst}");
    }

    #[test]
    fn schwartz_cutoff_is_flat_at_origin() {
        let c = SchwartzCutoff::new(2, 0.5, 4).unwrap();
        assert!((c.eval(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
        for &h in &[1e-2, 2e-2] {
            let dev = (c.eval(&[h, 0.5 * h]) - 1.0).abs();
            assert!(dev < 50.0 * h.powi(5), "h={h} dev={dev:e}");
        }
    }

    #[test]
    fn schwartz_gradient_matches_finite_differences() {
        let c = SchwartzCutoff::new(2, 0.25, 3).unwrap();
        let r = [0.7, -1.3];
        let mut g = [0.0; 2];
        c.gradient(&r, &mut g);
        let h = 1e-6;
        for d in 0..2 {
            let mut a = r;
            let mut b = r;
            a[d] += h;
            b[d] -= h;
            let fd = (c.eval(&a) - c.eval(&b)) / (2.0 * h);
            assert!((fd - g[d]).abs() < 1e-7, "{fd} vs {}", g[d]);
        }
    }

    #[test]
    fn degree_must_cover_positive_gamma() {
        assert!(SchwartzCutoff::new(1, 1.0, 2).is_err());
        assert!(SchwartzCutoff::new(1, 1.0, 3).is_ok());
    }
}
