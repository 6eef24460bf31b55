//! Refinement studies: error per level and the empirical order between levels.

use serde::{Deserialize, Serialize};

use super::energy::{verify_commutator, verify_energy_identity, EnergyOptions, MultiplierChoice};
use super::{ClaimStrength, ReportRow, VerificationReport};
use crate::error::{Error, Result};
use crate::spectral_core::{forward_transform, inverse_transform, make_grid, Field, PhaseGrid};
use crate::symbols::SmoothCustom;
use crate::tolerances;
use crate::transport_dispersion::{build_parametrix_cutoffs, parametrix_reconstruct};

/// Quantity refined in a study. Levels are points per axis, except for
/// [`StudyCheck::Parametrix`] where they are quadrature nodes per piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyCheck {
    EnergyIdentity,
    RoundTrip,
    Parametrix,
    Commutator,
}

impl StudyCheck {
    pub fn parse(s: &str) -> Result<StudyCheck> {
        match s {
            "energy-identity" | "energy" => Ok(StudyCheck::EnergyIdentity),
            "round-trip" => Ok(StudyCheck::RoundTrip),
            "parametrix" => Ok(StudyCheck::Parametrix),
            "commutator" => Ok(StudyCheck::Commutator),
            other => Err(Error::Parameter(format!("unknown study check '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StudyCheck::EnergyIdentity => "energy-identity",
            StudyCheck::RoundTrip => "round-trip",
            StudyCheck::Parametrix => "parametrix",
            StudyCheck::Commutator => "commutator",
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            StudyCheck::EnergyIdentity => tolerances::ENERGY_IDENTITY,
            StudyCheck::RoundTrip => tolerances::ROUND_TRIP,
            StudyCheck::Parametrix => tolerances::PARAMETRIX,
            StudyCheck::Commutator => tolerances::COMMUTATOR,
        }
    }
}

const HALF_WIDTH: f64 = 12.0;
const PARAMETRIX_POINTS: usize = 256;

fn gaussian(grid: PhaseGrid) -> Result<Field> {
    Field::from_real_fn(grid, |x, v| (-x[0] * x[0] - v[0] * v[0]).exp())
}

fn level_error(check: StudyCheck, level: usize) -> Result<(f64, PhaseGrid)> {
    let square = |n| make_grid(1, n, n, HALF_WIDTH, HALF_WIDTH);
    match check {
        StudyCheck::EnergyIdentity => {
            let g = square(level)?;
            let r = verify_energy_identity(&gaussian(g)?, MultiplierChoice::HilbertPair(0), EnergyOptions::default())?;
            let gap = r.get("relative_gap").ok_or_else(|| Error::Singular("energy identity degenerate".into()))?;
            Ok((gap, g))
        }
        StudyCheck::RoundTrip => {
            let g = square(level)?;
            let f = gaussian(g)?;
            let back = inverse_transform(&forward_transform(&f));
            Ok((back.sub(&f)?.max_abs() / f.max_abs(), g))
        }
        StudyCheck::Parametrix => {
            let g = square(PARAMETRIX_POINTS)?;
            let f = gaussian(g)?;
            let cut = build_parametrix_cutoffs((0.5, 1.0), true, level)?;
            let rec = parametrix_reconstruct(&f, &cut)?;
            Ok((rec.sub(&f)?.l2_norm() / f.l2_norm(), g))
        }
        StudyCheck::Commutator => {
            let g = square(level)?;
            let r = verify_commutator(&gaussian(g)?, &SmoothCustom::gaussian(0.5))?;
            let gap = r.get("relative_gap").ok_or_else(|| Error::Singular("commutator gap missing".into()))?;
            Ok((gap, g))
        }
    }
}

/// Runs `check` at each level (at least three, increasing) and reports the
/// per-level error and the empirical order `log(e_i/e_{i+1}) / log(N_{i+1}/N_i)`.
///
/// Passes when the finest error is within the check's tolerance. A
/// non-monotone error sequence is a warning, not a failure.
pub fn convergence_study(check: StudyCheck, levels: &[usize]) -> Result<VerificationReport> {
    if levels.len() < 3 {
        return Err(Error::Parameter(format!("a study needs at least three levels, got {}", levels.len())));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("study levels must increase".into()));
    }
    let mut report = VerificationReport::new(format!("convergence-{}", check.name()), ClaimStrength::Identity);
    report.tolerance = Some(check.tolerance());
    let mut errors = Vec::with_capacity(levels.len());
    for &level in levels {
        let (e, g) = level_error(check, level)?;
        if !report.grids.contains(&g) {
            report.grids.push(g);
        }
        errors.push(e);
    }
    for (i, (&level, &e)) in levels.iter().zip(&errors).enumerate() {
        let mut row = ReportRow::new(format!("level={level}")).value("error", e);
        if i > 0 {
            let order = (errors[i - 1] / e).ln() / (level as f64 / levels[i - 1] as f64).ln();
            row = row.value("order", order);
            if e > errors[i - 1] {
                report.warn(format!("error increased from level {} to {level}", levels[i - 1]));
            }
        }
        report.rows.push(row);
    }
    let finest = *errors.last().unwrap_or(&f64::NAN);
    report.set("finest_error", finest);
    report.require(finest <= check.tolerance(), format!("finest error {finest:.3e} ≤ {:.0e}", check.tolerance()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_three_increasing_levels() {
        assert!(convergence_study(StudyCheck::RoundTrip, &[16, 32]).is_err());
        assert!(convergence_study(StudyCheck::RoundTrip, &[32, 16, 64]).is_err());
    }

    #[test]
    fn round_trip_study_passes() {
        let r = convergence_study(StudyCheck::RoundTrip, &[16, 32, 64]).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.rows.len(), 3);
    }

    #[test]
    fn check_names_parse_back() {
        for c in [StudyCheck::EnergyIdentity, StudyCheck::RoundTrip, StudyCheck::Parametrix, StudyCheck::Commutator] {
            assert_eq!(StudyCheck::parse(c.name()).unwrap(), c);
        }
    }
}
