use num_complex::Complex64;

use super::profile::BumpProfile;
use super::{check_in_box, flow_multiplier};
use crate::error::{Error, Result};
use crate::quadrature::Rule;
use crate::spectral_core::Field;

/// The pair `χ₀`, `χ₁ = 𝟙_{t≥0} - ∫_{-∞}^t χ₀` with time rules for both.
#[derive(Clone, Debug)]
pub struct ParametrixCutoffs {
    pub chi0: BumpProfile,
    pub away_from_zero: bool,
    /// Rule on the support of `χ₀`.
    pub rule0: Rule,
    /// Rule on the hull of `{0} ∪ supp χ₀`, split at `0`, `t_lo`, `t_hi`.
    pub rule1: Rule,
    pub chi1_values: Vec<f64>,
}

impl ParametrixCutoffs {
    pub fn chi1(&self, t: f64) -> f64 {
        let step = if t >= 0.0 { 1.0 } else { 0.0 };
        step - self.chi0.primitive(t)
    }

    /// Radius of the smallest origin-centred interval holding both supports.
    pub fn support_radius(&self) -> f64 {
        let (lo, hi) = self.chi0.support();
        lo.abs().max(hi.abs())
    }

    pub fn quadrature_points(&self) -> usize {
        self.rule0.len()
    }
}

/// Builds `χ₀` on `[t_lo, t_hi]` and its companion `χ₁`.
pub fn build_parametrix_cutoffs(support: (f64, f64), away_from_zero: bool, points: usize) -> Result<ParametrixCutoffs> {
    let (lo, hi) = support;
    if away_from_zero && lo <= 0.0 && hi >= 0.0 {
        return Err(Error::Parameter(format!("support [{lo}, {hi}] contains the origin")));
    }
    let chi0 = BumpProfile::new(lo, hi)?;
    let rule0 = chi0.rule(points)?;
    let mut cuts = vec![0.0, lo, hi];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces: Vec<Rule> = cuts.windows(2).map(|w| Rule::gauss_legendre(points, w[0], w[1])).collect();
    let rule1 = Rule::concat(&pieces);
    let mut c = ParametrixCutoffs { chi0, away_from_zero, rule0, rule1, chi1_values: Vec::new() };
    c.chi1_values = c.rule1.nodes.iter().map(|&t| c.chi1(t)).collect();
    Ok(c)
}

/// `∫ f(x-tv, v) χ₀ dt + ∫ (v·∇_x f)(x-tv, v) χ₁ dt`, evaluated in the `x`-spectral domain.
pub fn parametrix_reconstruct(field: &Field, cutoffs: &ParametrixCutoffs) -> Result<Field> {
    let r = cutoffs.support_radius();
    check_in_box(field, r)?;
    let w0: Vec<(f64, f64)> = cutoffs
        .rule0
        .nodes
        .iter()
        .zip(&cutoffs.rule0.weights)
        .map(|(&t, &w)| (t, w * cutoffs.chi0.eval(t)))
        .collect();
    let w1: Vec<(f64, f64)> = cutoffs
        .rule1
        .nodes
        .iter()
        .zip(&cutoffs.rule1.weights)
        .zip(&cutoffs.chi1_values)
        .map(|((&t, &w), &c)| (t, w * c))
        .collect();
    flow_multiplier(field, |a| {
        let s0: Complex64 = w0.iter().map(|&(t, c)| Complex64::from_polar(c, -t * a)).sum();
        let s1: Complex64 = w1.iter().map(|&(t, c)| Complex64::from_polar(c, -t * a)).sum();
        s0 + Complex64::new(0.0, a) * s1
    })
}
