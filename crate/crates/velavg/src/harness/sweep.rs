//! Ratio sweeps over parameter sets, test families and refinement levels.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::{FamilyKind, TestFamily};
use super::theorems::{theorem_ratio, Lhs, RatioOutcome, TheoremSpec};
use super::{ClaimStrength, ReportRow, VerificationReport};
use crate::error::{Error, Result};
use crate::spectral_core::{io, Field, PhaseGrid};
use crate::tolerances;

/// Refinement levels and where to dump anomalous fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Grids from coarse to fine.
    pub levels: Vec<PhaseGrid>,
    pub dump_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct FixtureSidecar<'a> {
    key: &'a str,
    spec: &'a TheoremSpec,
    member: usize,
    coarse: &'a RatioOutcome,
    fine: &'a RatioOutcome,
    reason: &'a str,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn file_stem(key: &str, member: usize) -> String {
    let s: String = key
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{s}__m{member}")
}

fn dump_fixture(dir: &Path, field: &Field, side: &FixtureSidecar<'_>) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let stem = file_stem(side.key, side.member);
    let path = dir.join(format!("{stem}.vfld"));
    let mut w = BufWriter::new(fs::File::create(&path)?);
    io::write_field(field, &mut w)?;
    let json = serde_json::to_string_pretty(side).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(dir.join(format!("{stem}.json")), json)?;
    Ok(path)
}

/// Computes `LHS/RHS` for every spec, family member and level.
///
/// A row per spec (sorted by [`TheoremSpec::key`]) carries the maximum and
/// median ratio at each level and the relative change of the maximum between
/// the two finest levels. The report fails on a non-finite ratio, on a member
/// whose ratio grows by more than the anomaly factor between consecutive
/// levels, and on a maximum that moves by more than the stability tolerance.
pub fn sweep(specs: &[TheoremSpec], family: &TestFamily, opts: &SweepOptions) -> Result<VerificationReport> {
    if opts.levels.is_empty() {
        return Err(Error::Parameter("sweep needs at least one grid level".into()));
    }
    if specs.is_empty() {
        return Err(Error::Parameter("sweep needs at least one parameter set".into()));
    }
    let mut specs: Vec<&TheoremSpec> = specs.iter().collect();
    specs.sort_by_key(|s| s.key());

    let mut report = VerificationReport::new("ratio-sweep", ClaimStrength::FiniteRatio);
    report.tolerance = Some(tolerances::RATIO_STABILITY);
    report.grids = opts.levels.clone();

    // ratios[level][spec][member]
    let mut fields_by_level = Vec::with_capacity(opts.levels.len());
    let mut ratios: Vec<Vec<Vec<RatioOutcome>>> = Vec::with_capacity(opts.levels.len());
    for grid in &opts.levels {
        let fields = family.sample(*grid)?;
        let per_spec: Vec<Vec<RatioOutcome>> = specs
            .par_iter()
            .map(|spec| fields.iter().map(|f| theorem_ratio(f, spec)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ratios.push(per_spec);
        fields_by_level.push(fields);
    }

    let levels = opts.levels.len();
    if levels < 2 {
        report.warn("single level: refinement stability not assessed");
    }
    let mut worst_change: f64 = 0.0;
    let mut anomalies = 0usize;
    for (si, spec) in specs.iter().enumerate() {
        let key = spec.key();
        let mut row = ReportRow::new(key.clone()).label("diagnostic", spec.diagnostic.clone());
        let mut maxima = Vec::with_capacity(levels);
        for (li, per_spec) in ratios.iter().enumerate() {
            let outs = &per_spec[si];
            let mut rs: Vec<f64> = outs.iter().map(|o| o.ratio).collect();
            let max = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            row = row.value(&format!("max_l{li}"), max).value(&format!("median_l{li}"), median(&mut rs));
            maxima.push(max);
            for (mi, o) in outs.iter().enumerate() {
                if !o.ratio.is_finite() || o.anomaly {
                    anomalies += 1;
                    report.require(false, format!("{key}: member {mi} at level {li} has ratio {}", o.ratio));
                }
            }
        }
        for li in 1..levels {
            for (mi, (c, f)) in ratios[li - 1][si].iter().zip(&ratios[li][si]).enumerate() {
                if f.ratio > tolerances::ANOMALY_GROWTH * c.ratio {
                    anomalies += 1;
                    let reason = format!("ratio grew from {:.6e} to {:.6e}", c.ratio, f.ratio);
                    report.require(false, format!("{key}: member {mi} {reason}"));
                    if let Some(dir) = &opts.dump_dir {
                        let side = FixtureSidecar { key: &key, spec, member: mi, coarse: c, fine: f, reason: &reason };
                        let path = dump_fixture(dir, &fields_by_level[li][mi], &side)?;
                        report.note(format!("fixture written to {}", path.display()));
                    }
                }
            }
        }
        if levels >= 2 {
            let (a, b) = (maxima[levels - 2], maxima[levels - 1]);
            let change = if a > 0.0 { (b - a).abs() / a } else { (b - a).abs() };
            worst_change = worst_change.max(change);
            row = row.value("stability", change);
            report.require(
                change <= tolerances::RATIO_STABILITY,
                format!("{key}: maximum ratio moved by {:.2}% under refinement", 100.0 * change),
            );
        }
        report.rows.push(row);
    }
    report.set("members", family.count as f64);
    report.set("parameter_sets", specs.len() as f64);
    // non-finite, vanishing-side and jumping ratios; stability is reported separately
    report.set("anomalies", anomalies as f64);
    if levels >= 2 {
        report.set("worst_stability", worst_change);
    }
    Ok(report)
}

/// Evaluates an over-claimed estimate on oscillatory data `e^{ikx_1} e^{-|x|²-|v|²}`.
///
/// Passes when the ratio grows by at least a factor 2 per doubling of `k`;
/// the probe only supports the claim that the estimate cannot be improved.
pub fn sharpness_probe(spec: &TheoremSpec, ks: &[f64], grid: PhaseGrid) -> Result<VerificationReport> {
    if ks.len() < 2 {
        return Err(Error::Parameter("sharpness probe needs at least two frequencies".into()));
    }
    let mut report = VerificationReport::new("sharpness-probe", ClaimStrength::Heuristic);
    report.grids.push(grid);
    if let Lhs::HSigma { sigma } = spec.lhs {
        report.set("sigma", sigma);
    }
    let mut ratios = Vec::with_capacity(ks.len());
    for &k in ks {
        let fam = TestFamily::new(FamilyKind::Oscillatory { k }, 1, 0)?;
        let f = fam.sample(grid)?.remove(0);
        let out = theorem_ratio(&f, spec)?;
        report.rows.push(ReportRow::new(format!("k={k}")).value("lhs", out.lhs).value("rhs", out.rhs).value("ratio", out.ratio));
        ratios.push(out.ratio);
    }
    for i in 1..ks.len() {
        let growth = ratios[i] / ratios[i - 1];
        let doublings = (ks[i] / ks[i - 1]).log2();
        let per_doubling = growth.powf(1.0 / doublings);
        report.set(&format!("growth_{i}"), per_doubling);
        report.require(per_doubling >= 2.0, format!("ratio grew by {per_doubling:.3} per doubling of k, need ≥ 2"));
    }
    Ok(report)
}
