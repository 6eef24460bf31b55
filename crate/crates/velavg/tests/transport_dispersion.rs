use proptest::prelude::*;
use velavg::error::Error;
use velavg::norms::{joint_lp, mixed_norm, Nesting};
use velavg::spectral_core::{make_grid, Field, PhaseGrid};
use velavg::transport_dispersion::*;

fn gaussian(g: PhaseGrid, a: f64, b: f64) -> Field {
    Field::from_real_fn(g, |x, v| (-a * x[0] * x[0] - b * v[0] * v[0]).exp()).unwrap()
}

fn rel(a: &Field, b: &Field) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn free_stream_matches_the_shear() {
    let g = make_grid(1, 256, 64, 30.0, 5.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    for t in [-2.5, 0.75, 3.0] {
        let want = Field::from_real_fn(g, |x, v| (-(x[0] - t * v[0]).powi(2) - v[0] * v[0]).exp()).unwrap();
        assert!(free_stream(&f, t).unwrap().sub(&want).unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn free_stream_group_law() {
    let g = make_grid(1, 256, 64, 30.0, 5.0).unwrap();
    let f = Field::from_real_fn(g, |x, v| (-(x[0] - 1.0).powi(2) - v[0] * v[0]).exp() * (1.0 + x[0] * v[0])).unwrap();
    let (s, t) = (1.25, -2.0);
    let two = free_stream(&free_stream(&f, s).unwrap(), t).unwrap();
    let one = free_stream(&f, s + t).unwrap();
    assert!(rel(&two, &one) < 1e-12);
    assert_eq!(free_stream(&f, 0.0).unwrap(), f);
    assert!(free_stream(&f, f64::NAN).is_err());
}

#[test]
fn free_stream_preserves_joint_norms() {
    let g = make_grid(1, 512, 64, 40.0, 5.0).unwrap();
    let f = gaussian(g, 0.5, 1.0);
    let s = free_stream(&f, 4.0).unwrap();
    for a in [1.0, 2.0, 4.0] {
        let (before, after) = (joint_lp(&f, a).unwrap(), joint_lp(&s, a).unwrap());
        assert!(((after - before) / before).abs() < 1e-8, "a={a}: {before} -> {after}");
    }
    // the inner-x nesting is preserved row by row
    let b = mixed_norm(&f, 3.0, 2.0, Nesting::VOuter).unwrap();
    let c = mixed_norm(&s, 3.0, 2.0, Nesting::VOuter).unwrap();
    assert!(((c - b) / b).abs() < 1e-8);
}

#[test]
fn streaming_out_of_the_box_is_rejected() {
    let g = make_grid(1, 64, 32, 8.0, 5.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    assert!(matches!(free_stream(&f, 10.0), Err(Error::BoxOverflow { .. })));
    // x-independent data never leaves the box
    let h = Field::from_real_fn(g, |_, v| (-v[0] * v[0]).exp()).unwrap();
    assert_eq!(free_stream(&h, 100.0).unwrap().sub(&h).unwrap().max_abs(), 0.0);
}

#[test]
fn separable_streaming_matches_full_grid() {
    let g = make_grid(1, 64, 32, 16.0, 4.0).unwrap();
    let s = SeparableField::new(vec![gaussian(g, 1.0, 1.0), gaussian(g, 0.5, 2.0)]).unwrap();
    let t = 1.5;
    let full = free_stream(&s.to_field().unwrap(), t).unwrap();
    let fac = s.free_stream(t).unwrap().to_field().unwrap();
    assert!(rel(&fac, &full) < 1e-12);
    assert!(SeparableField::new(vec![]).is_err());
    let two_d = make_grid(2, 8, 8, 4.0, 4.0).unwrap();
    assert!(SeparableField::new(vec![gaussian(g, 1.0, 1.0), Field::zeros(two_d)]).is_err());
}

#[test]
fn bump_profile_mass_and_primitive() {
    let b = BumpProfile::new(-0.5, 2.0).unwrap();
    assert!((b.rule(96).unwrap().integrate(|t| b.eval(t)) - 1.0).abs() < 1e-10);
    assert!((b.primitive(0.75) - 0.5).abs() < 1e-13);
    assert_eq!(b.primitive(-1.0), 0.0);
    assert_eq!(b.primitive(2.0), 1.0);
    let r = b.reversed();
    assert_eq!(r.support(), (-2.0, 0.5));
    assert!((r.eval(-1.3) - b.eval(1.3)).abs() < 1e-15);
    assert!(BumpProfile::new(1.0, 1.0).is_err());
    assert!(b.rule(1).is_err());
}

#[test]
fn parametrix_cutoff_moments() {
    for &(support, away) in &[((0.5, 1.0), true), ((-1.0, 2.0), false), ((-3.0, -1.0), true)] {
        let c = build_parametrix_cutoffs(support, away, 64).unwrap();
        let m0 = c.rule0.integrate(|t| c.chi0.eval(t));
        assert!((m0 - 1.0).abs() < 1e-10);
        let m1: f64 = c.rule1.weights.iter().zip(&c.chi1_values).map(|(w, v)| w * v).sum();
        let first = c.rule0.integrate(|t| t * c.chi0.eval(t));
        assert!((m1 - first).abs() < 1e-8, "{support:?}: {m1} vs {first}");
    }
    assert!(build_parametrix_cutoffs((-1.0, 1.0), true, 16).is_err());
    assert!(build_parametrix_cutoffs((0.0, 1.0), true, 16).is_err());
}

#[test]
fn parametrix_is_exact_for_x_independent_data() {
    let g = make_grid(1, 32, 64, 8.0, 6.0).unwrap();
    let f = Field::from_real_fn(g, |_, v| (-v[0] * v[0]).exp() * (2.0 + v[0])).unwrap();
    let cut = build_parametrix_cutoffs((0.5, 1.0), true, 24).unwrap();
    let rec = parametrix_reconstruct(&f, &cut).unwrap();
    // v·∇f = 0, so only the discrete mass of χ₀ survives
    let mass = cut.rule0.integrate(|t| cut.chi0.eval(t));
    assert!(rel(&rec, &f.scaled(mass)) < 1e-13);
    assert!((mass - 1.0).abs() < 1e-5);
}

#[test]
fn parametrix_reconstructs_a_gaussian() {
    let g = make_grid(1, 256, 128, 12.0, 6.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    let mut errs = Vec::new();
    for nodes in [8, 16, 32] {
        let cut = build_parametrix_cutoffs((0.5, 1.0), true, nodes).unwrap();
        errs.push(rel(&parametrix_reconstruct(&f, &cut).unwrap(), &f));
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[2] < 1e-6, "{errs:?}");
    // the origin-containing variant also reconstructs
    let cut = build_parametrix_cutoffs((-0.5, 0.5), false, 32).unwrap();
    assert!(rel(&parametrix_reconstruct(&f, &cut).unwrap(), &f) < 1e-6);
}

#[test]
fn flow_average_is_linear_and_fixes_x_independent_data() {
    let g = make_grid(1, 256, 64, 20.0, 4.0).unwrap();
    let b = BumpProfile::new(0.5, 1.5).unwrap();
    let h = Field::from_real_fn(g, |_, v| (-v[0] * v[0]).exp()).unwrap();
    let mass = b.rule(48).unwrap().integrate(|t| b.eval(t));
    assert!(rel(&flow_average(&h, &b, 48).unwrap(), &h.scaled(mass)) < 1e-13);
    let f = gaussian(g, 1.0, 1.0);
    let avg = flow_average(&f, &b, 48).unwrap();
    let k = Field::from_real_fn(g, |x, v| (-(x[0] - 2.0).powi(2) - 2.0 * v[0] * v[0]).exp()).unwrap();
    let avg_k = flow_average(&k, &b, 48).unwrap();
    let sum = flow_average(&f.add(&k.scaled(-3.0)).unwrap(), &b, 48).unwrap();
    assert!(rel(&sum, &avg.add(&avg_k.scaled(-3.0)).unwrap()) < 1e-13);
}

#[test]
fn decay_slopes_match_dimension_counting() {
    let g = make_grid(1, 512, 256, 90.0, 6.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    let times: Vec<f64> = (0..6).map(|i| 4.0 * 4f64.powf(i as f64 / 5.0)).collect();
    for (p, r) in [(f64::INFINITY, 1.0), (2.0, 1.0)] {
        let fit = dispersion_decay_fit(&f, p, r, &times).unwrap();
        assert!(fit.deviation() < 0.03, "p={p} r={r}: {} vs {}", fit.exponent, fit.theoretical);
    }
    let pair = SeparableField::new(vec![f.clone(), f]).unwrap();
    let fit = dispersion_decay_fit(&pair, 2.0, 1.0, &times).unwrap();
    assert_eq!(fit.theoretical, -1.0);
    assert!(fit.deviation() < 0.03, "{}", fit.exponent);
}

#[test]
fn decay_fit_rejects_bad_input() {
    let g = make_grid(1, 64, 32, 30.0, 4.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    let times = [1.0, 1.5, 2.0, 2.5, 3.0];
    assert!(dispersion_decay_fit(&f, 1.0, 2.0, &times).is_err());
    assert!(dispersion_decay_fit(&f, 2.0, 1.0, &times[..4]).is_err());
    assert!(dispersion_decay_fit(&f, 2.0, 1.0, &[1.0, 2.0, -3.0, 4.0, 5.0]).is_err());
}

#[test]
fn strichartz_tuples() {
    let (q, a) = strichartz_tuple(1, 2.0, 1.0).unwrap();
    assert!((q - 4.0).abs() < 1e-14 && (a - 4.0 / 3.0).abs() < 1e-14);
    let (q, a) = strichartz_tuple(2, 4.0, 2.0).unwrap();
    assert!((q - 4.0).abs() < 1e-14 && (a - 8.0 / 3.0).abs() < 1e-14);
    assert!(strichartz_tuple(1, 2.0, 2.0).is_err());
    // the endpoint p = (n+1)r/(n-1) gives a = q
    assert!(strichartz_tuple(3, 4.0, 2.0).is_err());
}

fn strichartz_of(lx: f64, width: f64, window: f64) -> StrichartzReport {
    let g = make_grid(1, 512, 128, lx, 6.0).unwrap();
    let f = Field::from_real_fn(g, |x, v| (-(x[0] / width).powi(2) - v[0] * v[0]).exp()).unwrap();
    let (q, a) = strichartz_tuple(1, 2.0, 1.0).unwrap();
    strichartz_ratio(&f, (q, 2.0, 1.0, a), window, 16).unwrap()
}

#[test]
fn strichartz_ratio_is_scale_invariant_and_window_stable() {
    let base = strichartz_of(120.0, 1.0, 16.0);
    let wide = strichartz_of(240.0, 2.0, 32.0);
    assert!(((wide.ratio - base.ratio) / base.ratio).abs() < 1e-6, "{} vs {}", wide.ratio, base.ratio);
    let short = strichartz_of(120.0, 1.0, 8.0);
    assert!(short.ratio < base.ratio);
    assert!((base.ratio - short.ratio) / base.ratio <= short.relative_tail);
    assert!(base.relative_tail < short.relative_tail);
}

#[test]
fn dispersive_lemma_ratio_is_finite_and_checks_constraints() {
    let g = make_grid(1, 256, 64, 20.0, 4.0).unwrap();
    let f = gaussian(g, 1.0, 1.0);
    let away = BumpProfile::new(0.5, 1.5).unwrap();
    let r = dispersive_lemma_ratio(&f, (f64::INFINITY, 1.0, f64::INFINITY, 1.0), &away, 48).unwrap();
    assert!(r.is_finite() && r > 0.0);
    let origin = BumpProfile::new(-1.0, 1.0).unwrap();
    assert!(dispersive_lemma_ratio(&f, (f64::INFINITY, 1.0, f64::INFINITY, 1.0), &origin, 48).is_err());
    let r = dispersive_lemma_ratio(&f, (2.0, 2.0, 2.0, 2.0), &origin, 48).unwrap();
    // L² to L² averaging is a contraction in the mean
    assert!(r <= 1.0 + 1e-12, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flow_average_adjoint_is_reversed_profile(
        cx in -3.0..3.0f64,
        cv in -1.0..1.0f64,
        lo in -1.5..1.0f64,
        len in 0.2..1.5f64,
    ) {
        let g = make_grid(1, 128, 32, 16.0, 4.0).unwrap();
        let f = gaussian(g, 1.0, 1.0);
        let h = Field::from_real_fn(g, |x, v| (-(x[0] - cx).powi(2) - 2.0 * (v[0] - cv).powi(2)).exp() * x[0]).unwrap();
        let b = BumpProfile::new(lo, lo + len).unwrap();
        prop_assert!(flow_adjoint_gap(&f, &h, &b, 32).unwrap() < 1e-12);
    }
}
