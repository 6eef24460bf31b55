//! Multiplier families, cutoffs, symbol criteria and the regularity formulas.

mod constraints;
mod criteria;
mod cutoff;
mod regularity;

use std::fmt;
use std::sync::Arc;

pub use constraints::{check_constraints, conjugate, Constraint, ConstraintCheck, CorollaryKind};
pub use criteria::{hormander_bound, marcinkiewicz_bound, ScanGrid};
pub use cutoff::{build_cutoff_1d, build_cutoff_nd, CutoffFn, SchwartzCutoff};
pub use regularity::{corollary_regularity, regularity_index, scaling_exponent, RegularityParams};

use crate::error::{Error, Result};
use crate::spectral_core::Symbol;

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `⟨r⟩ = (1 + |r|²)^{1/2}`.
pub fn bracket(r: &[f64]) -> f64 {
    (1.0 + r.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Which variables a Hilbert-type symbol acts in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HilbertPart {
    /// `sign ξ_j`
    X,
    /// `sign η_j`
    V,
    /// `sign ξ_j · sign η_j`
    Both,
}

/// Treatment of the zero mode for negative-order homogeneous weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMode {
    /// The zero mode is multiplied by 0.
    Drop,
    /// A non-finite value at the zero mode is reported as an error.
    Reject,
}

type SymbolFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync;

/// Smooth symbol given in closed form, optionally with its analytic `∇_η`.
#[derive(Clone)]
pub struct SmoothCustom {
    pub name: String,
    value: Arc<SymbolFn>,
    grad_eta: Option<Arc<GradFn>>,
}

impl fmt::Debug for SmoothCustom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothCustom")
            .field("name", &self.name)
            .field("grad_eta", &self.grad_eta.is_some())
            .finish()
    }
}

impl PartialEq for SmoothCustom {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.value, &other.value)
    }
}

impl SmoothCustom {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        grad_eta: Option<Arc<GradFn>>,
    ) -> Self {
        SmoothCustom { name: name.into(), value: Arc::new(value), grad_eta }
    }

    /// `e^{-c(|ξ|² + |η|²)}` with `∇_η m = -2cη m`.
    pub fn gaussian(c: f64) -> Self {
        let m = move |xi: &[f64], eta: &[f64]| {
            (-c * (xi.iter().map(|x| x * x).sum::<f64>() + eta.iter().map(|x| x * x).sum::<f64>())).exp()
        };
        let grad = Arc::new(move |xi: &[f64], eta: &[f64], out: &mut [f64]| {
            let v = m(xi, eta);
            for (o, e) in out.iter_mut().zip(eta) {
                *o = -2.0 * c * e * v;
            }
        });
        SmoothCustom::new(format!("gaussian({c})"), m, Some(grad))
    }

    /// `e^{-c|ξ|²}`, independent of `η`.
    pub fn gaussian_xi(c: f64) -> Self {
        let grad = Arc::new(|_: &[f64], _: &[f64], out: &mut [f64]| out.iter_mut().for_each(|o| *o = 0.0));
        SmoothCustom::new(
            format!("gaussian_xi({c})"),
            move |xi: &[f64], _: &[f64]| (-c * xi.iter().map(|x| x * x).sum::<f64>()).exp(),
            Some(grad),
        )
    }

    pub fn constant(value: f64) -> Self {
        let grad = Arc::new(|_: &[f64], _: &[f64], out: &mut [f64]| out.iter_mut().for_each(|o| *o = 0.0));
        SmoothCustom::new(format!("constant({value})"), move |_: &[f64], _: &[f64]| value, Some(grad))
    }

    pub fn eval(&self, xi: &[f64], eta: &[f64]) -> f64 {
        (self.value)(xi, eta)
    }

    pub fn has_grad_eta(&self) -> bool {
        self.grad_eta.is_some()
    }

    /// `μ = ξ·∇_η m`, the symbol of the commutator with the transport operator.
    pub fn commutator_symbol(&self) -> Result<impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + '_> {
        let grad = self
            .grad_eta
            .as_ref()
            .ok_or_else(|| Error::Parameter(format!("symbol {} has no analytic η-gradient", self.name)))?;
        Ok(move |xi: &[f64], eta: &[f64]| {
            let mut g = vec![0.0; eta.len()];
            grad(xi, eta, &mut g);
            xi.iter().zip(&g).map(|(a, b)| a * b).sum()
        })
    }
}

/// The multiplier families used by the energy method.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSymbol {
    /// `M(ξ, η) = Σ_j sign ξ_j · sign η_j`.
    SignTensor { n: usize },
    /// Hilbert transforms in `x_j`, `v_j`, or both.
    Hilbert { axis: usize, part: HilbertPart },
    /// `⟨ξ⟩^a ⟨η⟩^α`.
    BesselWeight { a: f64, alpha: f64 },
    /// `|ξ|^{s_x} |η|^{s_v}`.
    RieszWeight { s_x: f64, s_v: f64, zero_mode: ZeroMode },
    /// `m₀ = sign ξ · sign η · ⟨ξ⟩^{2σ-1} χ(η/⟨ξ⟩^s)` on the line.
    Hypo1D { sigma: f64, s: f64, cutoff: CutoffFn },
    /// `m₁ = sign ξ_j · sign η_j · ⟨ξ⟩^{2σ-1} χ(η/⟨ξ⟩^s)²`.
    HypoND { sigma: f64, s: f64, cutoff: CutoffFn, axis: usize },
    /// `m* = (⟨η⟩/⟨ξ⟩^s)^{-(α+β)} χ(η/⟨ξ⟩^s)`.
    Truncation { alpha_plus_beta: f64, s: f64, cutoff: CutoffFn },
    SmoothCustom(SmoothCustom),
}

pub fn sign_tensor_symbol(n: usize) -> Result<MultiplierSymbol> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    Ok(MultiplierSymbol::SignTensor { n })
}

pub fn hilbert_pair(axis: usize) -> MultiplierSymbol {
    MultiplierSymbol::Hilbert { axis, part: HilbertPart::Both }
}

pub fn bessel_weight(a: f64, alpha: f64) -> MultiplierSymbol {
    MultiplierSymbol::BesselWeight { a, alpha }
}

/// Which hypoelliptic symbol to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionCase {
    /// `m₀`, one dimension, plateau cutoff.
    OneD,
    /// `m₁` in dimension `n`, Schwartz cutoff squared.
    ND { n: usize },
}

pub fn hypoelliptic_symbol(
    case: DimensionCase,
    sigma: f64,
    s: f64,
    cutoff: CutoffFn,
    axis: usize,
) -> Result<MultiplierSymbol> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("s = {s} must be non-negative")));
    }
    match case {
        DimensionCase::OneD => {
            if axis != 0 {
                return Err(Error::Parameter(format!("axis {axis} out of range for n = 1")));
            }
            if !matches!(cutoff, CutoffFn::Plateau1D) {
                return Err(Error::Parameter("m₀ needs the plateau cutoff".into()));
            }
            Ok(MultiplierSymbol::Hypo1D { sigma, s, cutoff })
        }
        DimensionCase::ND { n } => {
            if axis >= n {
                return Err(Error::Parameter(format!("axis {axis} out of range for n = {n}")));
            }
            if cutoff.dim() != Some(n) {
                return Err(Error::Parameter(format!("m₁ needs a Schwartz cutoff on ℝ^{n}")));
            }
            Ok(MultiplierSymbol::HypoND { sigma, s, cutoff, axis })
        }
    }
}

pub fn truncation_symbol(alpha_plus_beta: f64, s: f64, cutoff: CutoffFn) -> Result<MultiplierSymbol> {
    if alpha_plus_beta > 0.0 {
        return Err(Error::Constraint(format!("α+β = {alpha_plus_beta} > 0")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("s = {s} must be non-negative")));
    }
    Ok(MultiplierSymbol::Truncation { alpha_plus_beta, s, cutoff })
}

/// Operator norm of the Hilbert transform on `L^p`.
pub fn hilbert_norm_constant(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} outside (1, ∞)")));
    }
    let t = std::f64::consts::PI / (2.0 * p);
    Ok(if p <= 2.0 { t.tan() } else { 1.0 / t.tan() })
}

fn scaled(eta: &[f64], scale: f64, buf: &mut [f64]) {
    for (b, e) in buf.iter_mut().zip(eta) {
        *b = e / scale;
    }
}

impl MultiplierSymbol {
    pub fn eval(&self, xi: &[f64], eta: &[f64]) -> f64 {
        match self {
            MultiplierSymbol::SignTensor { n } => (0..*n).map(|j| sign(xi[j]) * sign(eta[j])).sum(),
            MultiplierSymbol::Hilbert { axis, part } => match part {
                HilbertPart::X => sign(xi[*axis]),
                HilbertPart::V => sign(eta[*axis]),
                HilbertPart::Both => sign(xi[*axis]) * sign(eta[*axis]),
            },
            MultiplierSymbol::BesselWeight { a, alpha } => bracket(xi).powf(*a) * bracket(eta).powf(*alpha),
            MultiplierSymbol::RieszWeight { s_x, s_v, zero_mode } => {
                let part = |r: f64, s: f64| {
                    if s == 0.0 {
                        1.0
                    } else if r == 0.0 {
                        match (s < 0.0, zero_mode) {
                            (false, _) => 0.0,
                            (true, ZeroMode::Drop) => 0.0,
                            (true, ZeroMode::Reject) => f64::INFINITY,
                        }
                    } else {
                        r.powf(s)
                    }
                };
                part(norm(xi), *s_x) * part(norm(eta), *s_v)
            }
            MultiplierSymbol::Hypo1D { sigma, s, cutoff } => {
                let b = bracket(xi);
                let lead = sign(xi[0]) * sign(eta[0]);
                if lead == 0.0 {
                    return 0.0;
                }
                lead * b.powf(2.0 * sigma - 1.0) * cutoff.eval(&[eta[0] / b.powf(*s)])
            }
            MultiplierSymbol::HypoND { sigma, s, cutoff, axis } => {
                let lead = sign(xi[*axis]) * sign(eta[*axis]);
                if lead == 0.0 {
                    return 0.0;
                }
                let b = bracket(xi);
                let mut r = vec![0.0; eta.len()];
                scaled(eta, b.powf(*s), &mut r);
                let c = cutoff.eval(&r);
                lead * b.powf(2.0 * sigma - 1.0) * c * c
            }
            MultiplierSymbol::Truncation { alpha_plus_beta, s, cutoff } => {
                let bs = bracket(xi).powf(*s);
                let mut r = vec![0.0; eta.len()];
                scaled(eta, bs, &mut r);
                let c = cutoff.eval(&r);
                if c == 0.0 {
                    return 0.0;
                }
                (bracket(eta) / bs).powf(-alpha_plus_beta) * c
            }
            MultiplierSymbol::SmoothCustom(c) => c.eval(xi, eta),
        }
    }

    /// Short family name used in reports and configuration files.
    pub fn family(&self) -> &'static str {
        match self {
            MultiplierSymbol::SignTensor { .. } => "sign-tensor",
            MultiplierSymbol::Hilbert { part: HilbertPart::Both, .. } => "hilbert-pair",
            MultiplierSymbol::Hilbert { part: HilbertPart::X, .. } => "hilbert-x",
            MultiplierSymbol::Hilbert { part: HilbertPart::V, .. } => "hilbert-v",
            MultiplierSymbol::BesselWeight { .. } => "bessel-weight",
            MultiplierSymbol::RieszWeight { .. } => "riesz-weight",
            MultiplierSymbol::Hypo1D { .. } => "hypo-1d",
            MultiplierSymbol::HypoND { .. } => "hypo-nd",
            MultiplierSymbol::Truncation { .. } => "truncation",
            MultiplierSymbol::SmoothCustom(_) => "smooth-custom",
        }
    }
}

impl Symbol for MultiplierSymbol {
    fn eval(&self, xi: &[f64], eta: &[f64]) -> f64 {
        MultiplierSymbol::eval(self, xi, eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_tensor_values() {
        let m = sign_tensor_symbol(1).unwrap();
        assert_eq!(m.eval(&[2.0], &[-3.0]), -1.0);
        let m2 = sign_tensor_symbol(2).unwrap();
        assert_eq!(m2.eval(&[1.0, -1.0], &[1.0, 1.0]), 0.0);
        assert_eq!(m.eval(&[4.0], &[0.0]), 0.0);
    }

    #[test]
    fn bessel_weight_values() {
        assert_eq!(bessel_weight(0.0, 0.0).eval(&[3.0], &[-2.0]), 1.0);
        assert!((bessel_weight(2.0, 0.0).eval(&[1.0], &[5.0]) - 2.0).abs() < 1e-15);
        let r3 = 3f64.sqrt();
        assert!((bessel_weight(-1.0, -1.0).eval(&[r3], &[r3]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hilbert_constants() {
        assert!((hilbert_norm_constant(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((hilbert_norm_constant(4.0 / 3.0).unwrap() - (3.0 * std::f64::consts::PI / 8.0).tan()).abs() < 1e-12);
        assert!((hilbert_norm_constant(4.0 / 3.0).unwrap() - 2.414_213_562_373_095).abs() < 1e-9);
        let a = hilbert_norm_constant(3.0).unwrap();
        let b = hilbert_norm_constant(1.5).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(hilbert_norm_constant(1.0).is_err());
    }

    #[test]
    fn hypoelliptic_m0() {
        let m = hypoelliptic_symbol(DimensionCase::OneD, 0.5, 0.0, build_cutoff_1d(), 0).unwrap();
        assert_eq!(m.eval(&[3.0], &[-0.4]), -1.0);
        assert_eq!(m.eval(&[0.0], &[0.2]), 0.0);
        let m = hypoelliptic_symbol(DimensionCase::OneD, 0.3, 1.0, build_cutoff_1d(), 0).unwrap();
        for &(x, e) in &[(1.0f64, 1.5f64), (5.0, 5.2), (-10.0, 10.2)] {
            assert!(e.abs() > bracket(&[x]));
            assert_eq!(m.eval(&[x], &[e]), 0.0);
        }
        assert!(hypoelliptic_symbol(DimensionCase::OneD, 0.5, 0.0, build_cutoff_1d(), 1).is_err());
    }

    #[test]
    fn truncation_symbol_values() {
        let m = truncation_symbol(0.0, 1.0, build_cutoff_1d()).unwrap();
        assert_eq!(m.eval(&[3.0], &[1.0]), build_cutoff_1d().eval(&[1.0 / bracket(&[3.0])]));
        let m = truncation_symbol(-0.7, 2.0, build_cutoff_1d()).unwrap();
        assert_eq!(m.eval(&[0.0], &[0.0]), 1.0);
        assert!(truncation_symbol(0.1, 1.0, build_cutoff_1d()).is_err());
    }

    #[test]
    fn truncation_sup_bound() {
        let m = truncation_symbol(-1.0, 1.0, build_cutoff_1d()).unwrap();
        let mut sup = 0.0f64;
        for i in 0..=400 {
            for j in 0..=400 {
                let x = -100.0 + 0.5 * i as f64;
                let e = -100.0 + 0.5 * j as f64;
                sup = sup.max(m.eval(&[x], &[e]).abs());
            }
        }
        assert!(sup <= 4f64.powf(0.5) + 1e-12, "{sup}");
    }

    #[test]
    fn commutator_symbol_of_gaussian() {
        let g = SmoothCustom::gaussian(1.0);
        let mu = g.commutator_symbol().unwrap();
        let (x, e): (f64, f64) = (0.7, -0.3);
        let exact = -2.0 * x * e * (-(x * x) - e * e).exp();
        assert!((mu(&[x], &[e]) - exact).abs() < 1e-15);
        let bare = SmoothCustom::new("bare", |_: &[f64], _: &[f64]| 1.0, None);
        assert!(bare.commutator_symbol().is_err());
    }
}
