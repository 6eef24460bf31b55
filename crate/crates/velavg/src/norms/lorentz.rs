use crate::error::{Error, Result};

/// `‖g‖_{L^{q,c}}` of the step function taking `|values[i]|` on a set of measure `weights[i]`.
///
/// The decreasing rearrangement is a step function, so the defining integral
/// `∫ (t^{1/q} g*(t))^c dt/t` is summed in closed form.
pub fn lorentz_norm(values: &[f64], weights: &[f64], q: f64, c: f64) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::Parameter("values and weights differ in length".into()));
    }
    if !(q > 0.0 && q.is_finite() && c > 0.0 && c.is_finite()) {
        return Err(Error::Exponent(format!("Lorentz exponents ({q}, {c}) must lie in (0, ∞)")));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::Parameter("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Parameter("zero total measure".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0 && values[i] != 0.0).collect();
    order.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    let e = c / q;
    let mut t = 0.0f64;
    let mut sum = 0.0;
    for i in order {
        let w = weights[i];
        // T_k^e − T_{k−1}^e without cancellation.
        let step = if t == 0.0 { w.powf(e) } else { t.powf(e) * (e * (w / t).ln_1p()).exp_m1() };
        sum += values[i].abs().powf(c) * step;
        t += w;
    }
    Ok((q / c * sum).powf(1.0 / c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator() {
        let (q, c, m): (f64, f64, f64) = (3.0, 2.0, 2.5);
        let v = lorentz_norm(&[1.0, 1.0, 0.0], &[1.0, 1.5, 4.0], q, c).unwrap();
        assert!((v - (q / c).powf(1.0 / c) * m.powf(1.0 / q)).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_lebesgue() {
        let vals: [f64; 4] = [0.3, -2.0, 1.1, 0.7];
        let w = [0.5, 0.25, 1.0, 2.0];
        let lq: f64 = vals.iter().zip(&w).map(|(a, b)| a.abs().powf(2.5) * b).sum::<f64>().powf(1.0 / 2.5);
        assert!((lorentz_norm(&vals, &w, 2.5, 2.5).unwrap() - lq).abs() < 1e-12);
    }

    #[test]
    fn zero_measure_rejected() {
        assert!(lorentz_norm(&[1.0], &[0.0], 2.0, 2.0).is_err());
        assert!(lorentz_norm(&[], &[], 2.0, 2.0).is_err());
    }
}
