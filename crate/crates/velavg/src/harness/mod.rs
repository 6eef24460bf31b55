//! Test-function families, identity verifiers, ratio sweeps, renormalization
//! convergence checks and refinement studies.
//!
//! Inequalities are never proved here: a passing sweep means the measured
//! ratios were finite and stable under refinement on the declared families.
//! [`ClaimStrength`] records which kind of statement a report supports.

mod renorm;
mod energy;
mod families;
mod study;
mod sweep;
mod theorems;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::spectral_core::PhaseGrid;

pub use renorm::{
    localized_renormalization, mollifier_commutator_defect, renormalization_factor, renormalize, rho, rho_prime,
    verify_renormalization_convergence, Mollifier, RenormConfig,
};
pub use energy::{
    energy_path_ratio, verify_commutator, verify_energy_identity, verify_hilbert_eigenfunction, EnergyOptions,
    MultiplierChoice,
};
pub use families::{FamilyKind, FamilyRanges, FieldFn, Member, TestFamily};
pub use study::{convergence_study, StudyCheck};
pub use sweep::{sharpness_probe, sweep, SweepOptions};
pub use theorems::{
    average_h_sigma_sq, theorem_ratio, x_shell_fraction, Lhs, NormTerm, Operand, RatioOutcome, RhsExpr,
    TheoremId, TheoremParams, TheoremSpec,
};

/// What a passing report establishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStrength {
    /// An identity holds to the stated tolerance.
    Identity,
    /// Ratios are finite and refinement-stable on the tested families; not a proof.
    FiniteRatio,
    /// A trend consistent with a claim, from a constructed probe.
    Heuristic,
    /// Measurements without pass/fail semantics.
    Experiment,
}

/// One row of a convergence or sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ReportRow {
    pub key: String,
    pub values: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
}

impl ReportRow {
    pub fn new(key: impl Into<String>) -> Self {
        ReportRow { key: key.into(), ..Default::default() }
    }

    /// Adds a value; non-finite values become a `"non-finite"` label instead.
    pub fn value(mut self, name: &str, v: f64) -> Self {
        if v.is_finite() {
            self.values.insert(name.to_string(), v);
        } else {
            self.labels.insert(name.to_string(), format!("non-finite ({v})"));
        }
        self
    }

    pub fn label(mut self, name: &str, text: impl Into<String>) -> Self {
        self.labels.insert(name.to_string(), text.into());
        self
    }
}

/// Structured outcome of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub claim: ClaimStrength,
    pub passed: bool,
    pub tolerance: Option<f64>,
    pub quantities: BTreeMap<String, f64>,
    pub rows: Vec<ReportRow>,
    pub grids: Vec<PhaseGrid>,
    /// Set when a reported constant depends on choices of the construction
    /// (cutoff shape, `ρ`, mollifier) rather than on the estimate alone.
    pub construction_dependent: bool,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, claim: ClaimStrength) -> Self {
        VerificationReport {
            check: check.into(),
            claim,
            passed: true,
            tolerance: None,
            quantities: BTreeMap::new(),
            rows: Vec::new(),
            grids: Vec::new(),
            construction_dependent: false,
            warnings: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records a quantity. A non-finite value is not stored; it fails the report.
    pub fn set(&mut self, name: &str, v: f64) {
        if v.is_finite() {
            self.quantities.insert(name.to_string(), v);
        } else {
            self.passed = false;
            self.notes.push(format!("{name} is non-finite ({v})"));
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }

    /// Fails the report when `ok` is false, recording `what`.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.passed = false;
            self.notes.push(format!("failed: {what}"));
        }
    }

    pub fn warn(&mut self, what: impl Into<String>) {
        self.warnings.push(what.into());
    }

    pub fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    /// Whether every stored number is finite (always true for reports built through [`Self::set`]).
    pub fn is_finite(&self) -> bool {
        self.quantities.values().all(|v| v.is_finite())
            && self.rows.iter().all(|r| r.values.values().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_quantities_fail_the_report() {
        let mut r = VerificationReport::new("x", ClaimStrength::Identity);
        r.set("a", 1.0);
        assert!(r.passed);
        r.set("b", f64::NAN);
        assert!(!r.passed);
        assert!(r.get("b").is_none());
        assert!(r.is_finite());
        let row = ReportRow::new("k").value("inf", f64::INFINITY);
        assert!(row.values.is_empty() && row.labels.contains_key("inf"));
    }

    #[test]
    fn report_serializes() {
        let mut r = VerificationReport::new("energy", ClaimStrength::Identity);
        r.set("gap", 1e-4);
        let s = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
