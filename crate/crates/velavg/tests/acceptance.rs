//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p velavg --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use velavg::harness::{
    convergence_study, mollifier_commutator_defect, sweep, theorem_ratio, verify_commutator, verify_energy_identity,
    verify_hilbert_eigenfunction, verify_renormalization_convergence, EnergyOptions, FamilyKind, Mollifier,
    MultiplierChoice, RenormConfig, StudyCheck, SweepOptions, TestFamily, TheoremId, TheoremParams, TheoremSpec,
};
use velavg::norms::{bessel_kernel, bessel_kernel_mass, exponential_bound_constant, Nesting};
use velavg::spectral_core::{make_grid, Field, PhaseGrid};
use velavg::symbols::{
    build_cutoff_1d, corollary_regularity, hormander_bound, marcinkiewicz_bound, regularity_index,
    truncation_symbol, RegularityParams, ScanGrid, SmoothCustom,
};
use velavg::tolerances as tol;
use velavg::transport_dispersion::{
    build_parametrix_cutoffs, dispersion_decay_fit, parametrix_reconstruct, SeparableField,
};
use velavg::Result;

struct Criterion {
    id: u32,
    name: &'static str,
    budget_s: Option<f64>,
    run: fn() -> Result<(bool, String)>,
}

fn gaussian(g: PhaseGrid) -> Result<Field> {
    Field::from_real_fn(g, |x, v| {
        (-x.iter().map(|t| t * t).sum::<f64>() - v.iter().map(|t| t * t).sum::<f64>()).exp()
    })
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn energy_identity() -> Result<(bool, String)> {
    let g = make_grid(1, 256, 256, 12.0, 12.0)?;
    let r = verify_energy_identity(&gaussian(g)?, MultiplierChoice::HilbertPair(0), EnergyOptions::default())?;
    let gap = r.get("relative_gap").unwrap_or(f64::NAN);
    let study = convergence_study(StudyCheck::EnergyIdentity, &[128, 256, 512])?;
    let e = |i: usize| study.rows[i].values.get("error").copied().unwrap_or(f64::NAN);
    let decrease = e(0) / e(2);
    let ok = r.passed && gap <= tol::ENERGY_IDENTITY && decrease >= tol::ENERGY_DECREASE;
    Ok((ok, format!("gap(N=256) = {gap:.3e} ≤ 1e-3; gap(128)/gap(512) = {decrease:.2} ≥ 4")))
}

fn commutator() -> Result<(bool, String)> {
    let g = make_grid(1, 256, 256, 12.0, 12.0)?;
    let r = verify_commutator(&gaussian(g)?, &SmoothCustom::gaussian(0.5))?;
    let gap = r.get("relative_gap").unwrap_or(f64::NAN);
    Ok((r.passed && gap <= tol::COMMUTATOR, format!("relative L² gap = {gap:.3e} ≤ 1e-6")))
}

fn hilbert() -> Result<(bool, String)> {
    let r = verify_hilbert_eigenfunction(make_grid(1, 128, 64, 4.0 * std::f64::consts::PI, 8.0)?)?;
    let err = r.get("max_error").unwrap_or(f64::NAN);
    Ok((r.passed, format!("max |H cos − i sin| = {err:.3e} ≤ 1e-10")))
}

fn parametrix() -> Result<(bool, String)> {
    let g = make_grid(1, 256, 256, 12.0, 12.0)?;
    let f = Field::from_real_fn(g, |x, v| bump(x[0] / 3.0) * bump(v[0] / 3.0))?;
    let mut errs = Vec::new();
    for nodes in [16, 32, 64] {
        let cut = build_parametrix_cutoffs((0.5, 1.0), true, nodes)?;
        let rec = parametrix_reconstruct(&f, &cut)?;
        errs.push(rec.sub(&f)?.l2_norm() / f.l2_norm());
    }
    let ok = errs[2] <= tol::PARAMETRIX && errs.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("errors at 16/32/64 nodes = {:.2e} / {:.2e} / {:.2e}; final ≤ 1e-6", errs[0], errs[1], errs[2])))
}

fn dispersion() -> Result<(bool, String)> {
    let g = make_grid(1, 1024, 512, 180.0, 6.0)?;
    let f = gaussian(g)?;
    let pair = SeparableField::new(vec![f.clone(), f.clone()])?;
    let times: Vec<f64> = (0..8).map(|i| 4.0 * 8f64.powf(i as f64 / 7.0)).collect();
    let (mut worst1, mut worst2) = (0.0f64, 0.0f64);
    for (p, r) in [(f64::INFINITY, 1.0), (2.0, 1.0), (4.0, 4.0 / 3.0)] {
        worst1 = worst1.max(dispersion_decay_fit(&f, p, r, &times)?.deviation());
        worst2 = worst2.max(dispersion_decay_fit(&pair, p, r, &times)?.deviation());
    }
    let ok = worst1 <= tol::DECAY_REL_1D && worst2 <= tol::DECAY_REL_2D;
    Ok((ok, format!("worst exponent deviation n=1: {:.2}% ≤ 2%, n=2: {:.2}% ≤ 5%", 100.0 * worst1, 100.0 * worst2)))
}

fn regularity() -> Result<(bool, String)> {
    let base = regularity_index(&RegularityParams::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut exact = 0;
    for _ in 0..10 {
        let a = rng.random_range(-0.45..0.45);
        let al = rng.random_range(-0.45..0.45);
        if corollary_regularity(a, -a, al, -al)? == 0.5 {
            exact += 1;
        }
    }
    Ok((base == 0.5 && exact == 10, format!("σ(0) = {base}; dual specialization exact for {exact}/10 draws")))
}

fn bessel() -> Result<(bool, String)> {
    let mut worst_mass = 0.0f64;
    for (n, s) in [(1, 2.0), (2, 1.5), (3, 2.5)] {
        worst_mass = worst_mass.max((bessel_kernel_mass(n, s)? - 1.0).abs());
    }
    let radii = [0.1, 0.5, 1.0, 2.0, 5.0, 9.0];
    let g2 = bessel_kernel(1, 2.0, &radii)?;
    let closed = g2
        .iter()
        .zip(radii)
        .map(|(g, r)| ((g - 0.5 * (-r).exp()) / (0.5 * (-r).exp())).abs())
        .fold(0.0, f64::max);
    let far: Vec<f64> = (0..=32).map(|i| 2.0 + 8.0 * i as f64 / 32.0).collect();
    let c = exponential_bound_constant(1, 1.5, &far)?;
    let held = bessel_kernel(1, 1.5, &far)?.iter().zip(&far).all(|(g, r)| *g <= c * (-0.5 * r).exp() * (1.0 + 1e-12));
    let ok = worst_mass <= tol::BESSEL_MASS && closed <= tol::BESSEL_CLOSED_FORM && held && c.is_finite();
    Ok((ok, format!("|∫G_s − 1| ≤ {worst_mass:.1e}; G_2 closed form {closed:.1e}; e^(-r/2) bound C = {c:.4}")))
}

fn criteria() -> Result<(bool, String)> {
    let m = truncation_symbol(-0.5, 1.0, build_cutoff_1d())?;
    let g = ScanGrid::new(2, 0.125, 64.0, 2)?;
    let (a, b) = (marcinkiewicz_bound(&m, &g)?, marcinkiewicz_bound(&m, &g.doubled())?);
    let change = (b - a).abs() / a;
    let (h0, h1) = (hormander_bound(&m, &g)?, hormander_bound(&m, &g.doubled())?);
    let growth = h1 / h0;
    let ok = change <= tol::MARCINKIEWICZ_STABILITY && growth >= tol::HORMANDER_GROWTH;
    Ok((ok, format!("Marcinkiewicz change {:.3}% ≤ 10%; Hörmander growth {growth:.2}× ≥ 1.5×", 100.0 * change)))
}

fn result1_sweep() -> Result<(bool, String)> {
    let fam = TestFamily::new(FamilyKind::Gaussian, 20, 2024)?;
    let specs = [4.0 / 3.0, 2.0, 4.0].map(|p| TheoremSpec::result1(1, p)).into_iter().collect::<Result<Vec<_>>>()?;
    let levels = vec![make_grid(1, 128, 128, 10.0, 10.0)?, make_grid(1, 256, 256, 10.0, 10.0)?];
    let r = sweep(&specs, &fam, &SweepOptions { levels, dump_dir: None })?;
    let stability = r.get("worst_stability").unwrap_or(f64::NAN);
    let mut worst_degen = 0.0f64;
    let fields = fam.sample(make_grid(1, 128, 128, 10.0, 10.0)?)?;
    for p in [4.0 / 3.0, 2.0, 4.0] {
        let r1 = TheoremSpec::result1(1, p)?;
        let r2 = TheoremSpec::new(
            TheoremId::Result2,
            TheoremParams { n: 1, p, q: p, nesting: Nesting::XOuter, ..Default::default() },
        )?;
        for f in &fields {
            let (a, b) = (theorem_ratio(f, &r1)?.ratio, theorem_ratio(f, &r2)?.ratio);
            worst_degen = worst_degen.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
        }
    }
    let ok = r.passed && r.is_finite() && worst_degen <= tol::DEGENERATION;
    Ok((ok, format!("60 ratios finite, worst refinement change {:.3}% ≤ 10%; result2(q=p) vs result1 {worst_degen:.1e}", 100.0 * stability)))
}

fn renormalization() -> Result<(bool, String)> {
    let g = make_grid(1, 256, 256, 8.0, 8.0)?;
    let r = verify_renormalization_convergence(&gaussian(g)?, &RenormConfig::default())?;
    let gap = r.get("final_relative_gap").unwrap_or(f64::NAN);
    let g = make_grid(1, 128, 128, 16.0, 16.0)?;
    let d = mollifier_commutator_defect(&gaussian(g)?, &[1.0, 0.5, 0.25, 0.125], &Mollifier::gaussian(), (4.0 / 3.0, 4.0 / 3.0))?;
    let ratio = d.get("final_over_initial").unwrap_or(f64::NAN);
    let ok = r.passed && d.passed && gap <= tol::RENORMALIZATION && ratio <= tol::FRIEDRICHS_DECAY;
    Ok((ok, format!("‖h_λ‖ gap at λ=1/8 {:.3}% ≤ 2%; defect final/initial {:.2}% ≤ 5%", 100.0 * gap, 100.0 * ratio)))
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "energy identity, n=1", budget_s: Some(5.0), run: energy_identity },
    Criterion { id: 2, name: "commutator identity", budget_s: Some(5.0), run: commutator },
    Criterion { id: 3, name: "Hilbert eigenfunction", budget_s: None, run: hilbert },
    Criterion { id: 4, name: "parametrix identity", budget_s: Some(10.0), run: parametrix },
    Criterion { id: 5, name: "dispersion decay", budget_s: Some(30.0), run: dispersion },
    Criterion { id: 6, name: "regularity index", budget_s: None, run: regularity },
    Criterion { id: 7, name: "Bessel kernel", budget_s: None, run: bessel },
    Criterion { id: 8, name: "symbol criteria for m*", budget_s: None, run: criteria },
    Criterion { id: 9, name: "result1 sweep", budget_s: None, run: result1_sweep },
    Criterion { id: 10, name: "renormalization and mollifier", budget_s: None, run: renormalization },
];

fn main() -> ExitCode {
    let total = Instant::now();
    let mut failed = 0;
    for c in &CRITERIA {
        let t = Instant::now();
        let outcome = (c.run)();
        let secs = t.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = c.budget_s.is_none_or(|b| secs <= b);
        let budget = c.budget_s.map(|b| format!(" / {b:.0} s")).unwrap_or_default();
        let pass = ok && in_budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<30} {detail} [{secs:.2} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name
        );
    }
    println!("{}/{} criteria passed in {:.1} s", CRITERIA.len() - failed, CRITERIA.len(), total.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
