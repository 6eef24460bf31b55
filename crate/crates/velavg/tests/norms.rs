use num_complex::Complex64;
use proptest::prelude::*;
use velavg::norms::*;
use velavg::spectral_core::{make_grid, velocity_average, Field, SpatialField};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn bump(grid: velavg::spectral_core::PhaseGrid, cx: f64, cv: f64, w: f64) -> Field {
    Field::from_real_fn(grid, |x, v| {
        let r2: f64 = x.iter().map(|t| (t - cx).powi(2)).sum::<f64>() + v.iter().map(|t| (t - cv).powi(2)).sum::<f64>();
        (-r2 / (w * w)).exp()
    })
    .unwrap()
}

#[test]
fn mixed_norm_of_constant_is_volume_power() {
    // x-volume 4, v-volume 6
    let g = make_grid(1, 16, 16, 2.0, 3.0).unwrap();
    let f = Field::from_real_fn(g, |_, _| 2.0).unwrap();
    let (p, q) = (3.0, 1.5);
    let want = 2.0 * 4f64.powf(1.0 / p) * 6f64.powf(1.0 / q);
    assert!(close(mixed_norm(&f, p, q, Nesting::XOuter).unwrap(), want, 1e-13));
    assert!(close(mixed_norm(&f, p, q, Nesting::VOuter).unwrap(), want, 1e-13));
    assert!(close(mixed_norm(&f, f64::INFINITY, 1.0, Nesting::XOuter).unwrap(), 12.0, 1e-13));
}

#[test]
fn mixed_norm_of_separable_field_factorises() {
    let g = make_grid(1, 64, 64, 6.0, 6.0).unwrap();
    let f = Field::from_real_fn(g, |x, v| (-x[0] * x[0]).exp() * (1.0 + v[0] * v[0]).recip()).unwrap();
    let (p, q) = (2.5, 1.25);
    let axis = g.x_axis();
    let a = SpatialField::from_fn(1, axis, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
    let b = SpatialField::from_fn(1, g.v_axis(), |v| Complex64::new((1.0 + v[0] * v[0]).recip(), 0.0));
    let want = a.lp_norm(p) * b.lp_norm(q);
    assert!(close(mixed_norm(&f, p, q, Nesting::XOuter).unwrap(), want, 1e-12));
    assert!(close(mixed_norm(&f, p, q, Nesting::VOuter).unwrap(), want, 1e-12));
}

#[test]
fn equal_exponents_give_joint_norm() {
    let g = make_grid(1, 32, 32, 4.0, 4.0).unwrap();
    let f = bump(g, 0.5, -1.0, 1.3);
    for p in [1.0, 2.0, 3.5, f64::INFINITY] {
        let j = joint_lp(&f, p).unwrap();
        assert!(close(mixed_norm(&f, p, p, Nesting::XOuter).unwrap(), j, 1e-12));
        assert!(close(mixed_norm(&f, p, p, Nesting::VOuter).unwrap(), j, 1e-12));
    }
    assert!(joint_lp(&f, 0.5).is_err());
    assert!(mixed_norm(&f, f64::NAN, 2.0, Nesting::XOuter).is_err());
}

fn h_half_of_gaussian(half_width: f64) -> f64 {
    let axis = make_grid(1, 2048, 8, half_width, 1.0).unwrap().x_axis();
    let g = SpatialField::from_fn(1, axis, |x| Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0));
    sobolev_norm_spatial(&g, 0.5, 2.0, true).unwrap()
}

#[test]
fn gaussian_h_half_seminorm_is_one() {
    // the |ξ| kink at the origin costs O(Δξ²) with Δξ = π/L
    let coarse = (h_half_of_gaussian(20.0) - 1.0).abs();
    let fine = (h_half_of_gaussian(40.0) - 1.0).abs();
    assert!(fine < 6e-4, "{fine}");
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.1, "order {order}");
    let axis = make_grid(1, 64, 8, 5.0, 1.0).unwrap().x_axis();
    let g = SpatialField::from_fn(1, axis, |x| Complex64::new(x[0], 0.0));
    assert!(sobolev_norm_spatial(&g, 0.5, 1.0, true).is_err());
}

#[test]
fn average_h_half_matches_sobolev_norm_of_average() {
    let g = make_grid(1, 128, 64, 10.0, 6.0).unwrap();
    let f = Field::from_real_fn(g, |x, v| (-(x[0] - v[0]).powi(2) - 0.5 * v[0] * v[0]).exp() * (1.0 + 0.3 * v[0])).unwrap();
    let direct = sobolev_norm_spatial(&velocity_average(&f), 0.5, 2.0, true).unwrap();
    assert!(close(average_h_half(&f), direct, 1e-10), "{} vs {direct}", average_h_half(&f));
}

#[test]
fn sobolev_order_zero_is_lebesgue() {
    let g = make_grid(1, 32, 32, 5.0, 5.0).unwrap();
    let f = bump(g, 0.0, 0.0, 1.0);
    for var in [Variable::X, Variable::V, Variable::Joint] {
        assert!(close(sobolev_norm(&f, 0.0, 3.0, false, var).unwrap(), joint_lp(&f, 3.0).unwrap(), 1e-14));
    }
}

#[test]
fn sobolev_x_weight_of_gaussian() {
    // ‖⟨D_x⟩ e^{-x²-v²}‖²_{L²} = ∫(1+ξ²)|ĝ|² dξ/2π · ∫e^{-2v²} dv, |ĝ|² = π e^{-ξ²/2}
    let g = make_grid(1, 128, 64, 10.0, 6.0).unwrap();
    let f = bump(g, 0.0, 0.0, 1.0);
    let pi = std::f64::consts::PI;
    let x_part = (2.0 * pi).sqrt();
    let v_part = (pi / 2.0).sqrt();
    let want = (x_part * v_part).sqrt();
    let v = sobolev_norm(&f, 1.0, 2.0, false, Variable::X).unwrap();
    assert!(close(v, want, 1e-9), "{v} vs {want}");
}

#[test]
fn lorentz_indicator_closed_form() {
    for &(q, c) in &[(2.0f64, 1.0f64), (3.0, 2.0), (1.5, 4.0)] {
        let measure = 3.25f64;
        let v = lorentz_norm(&[1.0, 1.0, 0.0, 1.0], &[1.0, 2.0, 7.0, 0.25], q, c).unwrap();
        let want = (q / c).powf(1.0 / c) * measure.powf(1.0 / q);
        assert!(close(v, want, 1e-13), "({q},{c}): {v} vs {want}");
    }
}

#[test]
fn lorentz_diagonal_is_lebesgue() {
    let vals = [0.2, -1.5, 3.0, 0.75, -0.1];
    let w = [1.0, 0.5, 0.25, 2.0, 3.0];
    for q in [1.0, 2.0, 3.7] {
        let lq = vals.iter().zip(&w).map(|(a, b): (&f64, &f64)| a.abs().powf(q) * b).sum::<f64>().powf(1.0 / q);
        assert!(close(lorentz_norm(&vals, &w, q, q).unwrap(), lq, 1e-13));
    }
}

#[test]
fn lorentz_rejects_bad_input() {
    assert!(lorentz_norm(&[1.0], &[1.0, 2.0], 2.0, 2.0).is_err());
    assert!(lorentz_norm(&[1.0], &[1.0], 0.0, 2.0).is_err());
    assert!(lorentz_norm(&[1.0], &[-1.0], 2.0, 2.0).is_err());
}

#[test]
fn norm_spec_lorentz_matches_lebesgue_on_diagonal() {
    let g = make_grid(1, 32, 16, 4.0, 3.0).unwrap();
    let f = bump(g, 0.3, 0.2, 1.1);
    let spec = NormSpec::Lorentz { q: 2.0, c: 2.0 };
    assert!(close(spec.evaluate(&f).unwrap(), f.l2_norm(), 1e-12));
    assert!(NormSpec::Lorentz { q: 1.0, c: 2.0 }.dual().is_err());
}

#[test]
fn bessel_kernel_closed_forms() {
    let radii = [0.05, 0.4, 1.0, 2.5, 8.0];
    let g = bessel_kernel(1, 2.0, &radii).unwrap();
    for (g, r) in g.iter().zip(radii) {
        let want = 0.5 * (-r).exp();
        assert!(close(*g, want, 1e-10), "r={r}");
    }
    let pi = std::f64::consts::PI;
    let g3 = bessel_kernel(3, 2.0, &radii).unwrap();
    for (g, r) in g3.iter().zip(radii) {
        let want = (-r).exp() / (4.0 * pi * r);
        assert!(close(*g, want, 1e-10), "r={r}");
    }
}

#[test]
fn bessel_kernel_has_unit_mass() {
    for &(n, s) in &[(1, 0.5), (1, 2.0), (2, 1.0), (3, 3.0)] {
        let m = bessel_kernel_mass(n, s).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "n={n} s={s}: {m}");
    }
}

#[test]
fn bessel_kernel_exponential_envelope() {
    let radii: Vec<f64> = (1..=60).map(|i| 0.5 * i as f64).collect();
    let c = exponential_bound_constant(2, 1.5, &radii).unwrap();
    assert!(c.is_finite() && c > 0.0);
    let g = bessel_kernel(2, 1.5, &radii).unwrap();
    for (g, r) in g.iter().zip(&radii) {
        assert!(*g <= c * (-0.5 * r).exp() * (1.0 + 1e-12));
    }
}

#[test]
fn local_embedding_ratio_obeys_holder_on_the_support() {
    let axis = make_grid(1, 256, 8, 8.0, 1.0).unwrap().x_axis();
    let h = SpatialField::from_fn(1, axis, |x| {
        let t = 1.0 - x[0] * x[0];
        Complex64::new(if t > 0.0 { t * t } else { 0.0 }, 0.0)
    });
    let r = local_embedding_ratio(&h, 1.0, 0.0, 1.5, 3.0).unwrap();
    assert!(r <= 2f64.powf(1.0 / 1.5 - 1.0 / 3.0) * (1.0 + 1e-12), "{r}");
    assert!(close(local_embedding_ratio(&h, 1.0, 0.5, 2.0, 2.0).unwrap(), 1.0, 1e-14));
    assert!(local_embedding_ratio(&h, 0.5, 0.0, 1.5, 3.0).is_err());
    assert!(local_embedding_ratio(&h, 1.0, 0.0, 3.0, 1.5).is_err());
}

fn phase_field() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0..1.0f64, 16 * 8), prop::collection::vec(-1.0..1.0f64, 16 * 8))
}

fn from_values(re: &[f64]) -> Field {
    let g = make_grid(1, 16, 8, 2.0, 1.5).unwrap();
    Field::new(g, re.iter().map(|&r| Complex64::new(r, 0.0)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_exponents_satisfy_holder((a, b) in phase_field(), p in 1.0..6.0f64, q in 1.0..6.0f64) {
        let (f, g) = (from_values(&a), from_values(&b));
        let spec = NormSpec::MixedLebesgue { p, q, nesting: Nesting::XOuter };
        let dual = spec.dual().unwrap();
        let pairing = f.inner(&g).unwrap().norm();
        let bound = spec.evaluate(&f).unwrap() * dual.evaluate(&g).unwrap();
        prop_assert!(pairing <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn minkowski_orders_the_nestings((a, _) in phase_field(), q in 1.0..3.0f64, extra in 0.0..4.0f64) {
        let f = from_values(&a);
        let p = q + extra;
        let x_outer = mixed_norm(&f, p, q, Nesting::XOuter).unwrap();
        let v_outer = mixed_norm(&f, p, q, Nesting::VOuter).unwrap();
        prop_assert!(x_outer <= v_outer * (1.0 + 1e-12));
    }

    #[test]
    fn lorentz_is_homogeneous_and_scales_with_measure(
        vals in prop::collection::vec(-3.0..3.0f64, 1..12),
        lambda in -4.0..4.0f64,
        mu in 0.1..10.0f64,
        q in 0.5..5.0f64,
        c in 0.5..5.0f64,
    ) {
        prop_assume!(vals.iter().any(|v| *v != 0.0));
        let w = vec![0.5; vals.len()];
        let base = lorentz_norm(&vals, &w, q, c).unwrap();
        let scaled: Vec<f64> = vals.iter().map(|v| lambda * v).collect();
        let s = lorentz_norm(&scaled, &w, q, c).unwrap();
        prop_assert!(close(s, lambda.abs() * base, 1e-12));
        let wm: Vec<f64> = w.iter().map(|x| x * mu).collect();
        let d = lorentz_norm(&vals, &wm, q, c).unwrap();
        prop_assert!(close(d, mu.powf(1.0 / q) * base, 1e-12));
    }

    #[test]
    fn lorentz_second_exponent_inclusion(
        vals in prop::collection::vec(-3.0..3.0f64, 1..12),
        weights in prop::collection::vec(0.01..2.0f64, 12),
        q in 0.5..5.0f64,
        c1 in 0.5..5.0f64,
        dc in 0.0..5.0f64,
    ) {
        prop_assume!(vals.iter().any(|v| *v != 0.0));
        let w = &weights[..vals.len()];
        let c2 = c1 + dc;
        let a = lorentz_norm(&vals, w, q, c1).unwrap();
        let b = lorentz_norm(&vals, w, q, c2).unwrap();
        let constant = (c1 / q).powf(1.0 / c1 - 1.0 / c2);
        prop_assert!(b <= constant * a * (1.0 + 1e-12), "{} > {} * {}", b, constant, a);
    }

    #[test]
    fn lorentz_monotone_in_pointwise_order(
        vals in prop::collection::vec(-3.0..3.0f64, 1..12),
        bumps in prop::collection::vec(0.0..1.0f64, 12),
        q in 0.5..5.0f64,
        c in 0.5..5.0f64,
    ) {
        prop_assume!(vals.iter().any(|v| *v != 0.0));
        let w = vec![0.3; vals.len()];
        let bigger: Vec<f64> = vals.iter().zip(&bumps).map(|(v, b)| v.signum() * (v.abs() + b)).collect();
        let a = lorentz_norm(&vals, &w, q, c).unwrap();
        let b = lorentz_norm(&bigger, &w, q, c).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12));
    }
}
