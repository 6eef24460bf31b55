//! Run configuration: TOML schema, named-spec grammar and flag overrides.
//!
//! Every section is optional. Keys a section does not know are rejected, and
//! so is a section the selected command does not read.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use velavg::harness::{FamilyRanges, StudyCheck, TestFamily, TheoremId, TheoremParams, TheoremSpec, Lhs};
use velavg::norms::{Nesting, NormSpec, Variable};
use velavg::spectral_core::{PhaseGrid, Radix};
use velavg::symbols::{
    bessel_weight, build_cutoff_1d, build_cutoff_nd, hilbert_pair, hypoelliptic_symbol, sign_tensor_symbol,
    truncation_symbol, DimensionCase, MultiplierSymbol, SmoothCustom, ZeroMode,
};

use crate::error::CliError;

/// The subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyEnergy,
    VerifyCommutator,
    Sweep,
    DispersionDecay,
    Strichartz,
    ParametrixCheck,
    RenormConvergence,
    CriteriaScan,
    KernelCheck,
    ConvergenceStudy,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::VerifyEnergy,
        Command::VerifyCommutator,
        Command::Sweep,
        Command::DispersionDecay,
        Command::Strichartz,
        Command::ParametrixCheck,
        Command::RenormConvergence,
        Command::CriteriaScan,
        Command::KernelCheck,
        Command::ConvergenceStudy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyEnergy => "verify-energy",
            Command::VerifyCommutator => "verify-commutator",
            Command::Sweep => "sweep",
            Command::DispersionDecay => "dispersion-decay",
            Command::Strichartz => "strichartz",
            Command::ParametrixCheck => "parametrix-check",
            Command::RenormConvergence => "renorm-convergence",
            Command::CriteriaScan => "criteria-scan",
            Command::KernelCheck => "kernel-check",
            Command::ConvergenceStudy => "convergence-study",
        }
    }

    /// Sections read by the command besides `output` and `tolerances`.
    fn sections(&self) -> &'static [&'static str] {
        match self {
            Command::VerifyEnergy => &["grid", "family", "energy"],
            Command::VerifyCommutator => &["grid", "family", "symbol"],
            Command::Sweep => &["grid", "family", "theorem", "sweep"],
            Command::DispersionDecay => &["grid", "decay"],
            Command::Strichartz => &["grid", "strichartz"],
            Command::ParametrixCheck => &["grid", "parametrix"],
            Command::RenormConvergence => &["grid", "renorm"],
            Command::CriteriaScan => &["grid", "symbol", "criteria"],
            Command::KernelCheck => &["kernel"],
            Command::ConvergenceStudy => &["study"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub json: bool,
    pub csv: bool,
    /// SVG plots for commands that produce curves or fits.
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("velavg-out"), json: true, csv: true, plots: false }
    }
}

/// Grid overrides; unset fields take the command's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_x: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_v: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixed_radix: Option<bool>,
}

impl GridConfig {
    fn has_points(&self) -> bool {
        self.points_x.is_some() || self.points_v.is_some()
    }

    fn has_geometry(&self) -> bool {
        self.has_points() || self.half_width_x.is_some() || self.half_width_v.is_some() || self.mixed_radix.is_some()
    }

    pub fn dims(&self) -> usize {
        self.n.unwrap_or(1)
    }

    fn resolve(&self, (nx, nv, lx, lv): (usize, usize, f64, f64)) -> Result<PhaseGrid, CliError> {
        let radix = if self.mixed_radix.unwrap_or(false) { Radix::Mixed } else { Radix::PowerOfTwo };
        Ok(PhaseGrid::new(
            self.dims(),
            self.points_x.unwrap_or(nx),
            self.points_v.unwrap_or(nv),
            self.half_width_x.unwrap_or(lx),
            self.half_width_v.unwrap_or(lv),
            radix,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    /// `name[:params][:count]`, e.g. `gaussian:20` or `oscillatory:4:2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranges: Option<FamilyRanges>,
}

pub const DEFAULT_SEED: u64 = 2024;

impl FamilyConfig {
    pub fn build(&self, default_spec: &str) -> Result<TestFamily, CliError> {
        let spec = self.spec.as_deref().unwrap_or(default_spec);
        let fam = TestFamily::parse(spec, self.seed.unwrap_or(DEFAULT_SEED))?;
        Ok(match self.ranges {
            Some(r) => fam.with_ranges(r)?,
            None => fam,
        })
    }
}

/// Theorem selection. `p_values` lists several `p` for one sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    /// Replaces the left side by `‖f̃‖²_{H^σ}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<TheoremParams>,
}

impl TheoremConfig {
    pub fn build(&self, n: usize) -> Result<Vec<TheoremSpec>, CliError> {
        let id = TheoremId::parse(self.id.as_deref().unwrap_or("result1"))?;
        let mut base = self.params.unwrap_or_default();
        if self.params.is_none() {
            base.n = n;
        } else if base.n != n {
            return Err(CliError::config(format!("theorem.params.n = {} but grid.n = {n}", base.n)));
        }
        let ps = match &self.p_values {
            Some(ps) if ps.is_empty() => return Err(CliError::config("theorem.p_values is empty")),
            Some(ps) => ps.clone(),
            None => vec![base.p],
        };
        ps.into_iter()
            .map(|p| {
                let spec = TheoremSpec::new(id, TheoremParams { p, ..base })?;
                Ok(match self.lhs_sigma {
                    Some(sigma) => spec.with_lhs(Lhs::HSigma { sigma }),
                    None => spec,
                })
            })
            .collect()
    }
}

/// Splits `name:key=value,key=value` into the name and its pairs.
pub fn parse_named(spec: &str) -> Result<(String, Vec<(String, String)>), CliError> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    if name.is_empty() {
        return Err(CliError::config(format!("'{spec}' has no name")));
    }
    let mut pairs = Vec::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("'{item}' in '{spec}' is not key=value")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    Ok((name.to_string(), pairs))
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.parse().map_err(|_| CliError::config(format!("{key} = '{v}' is not a number")))?;
    if x.is_nan() {
        return Err(CliError::config(format!("{key} is NaN")));
    }
    Ok(x)
}

/// A symbol named by family plus parameter map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl SymbolSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (family, pairs) = parse_named(spec)?;
        let mut params = BTreeMap::new();
        for (k, v) in pairs {
            let x = number(&k, &v)?;
            if params.insert(k.clone(), x).is_some() {
                return Err(CliError::config(format!("symbol parameter '{k}' given twice")));
            }
        }
        Ok(SymbolSpec { family, params })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), CliError> {
        for k in self.params.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(CliError::config(format!(
                    "symbol '{}' has no parameter '{k}' (known: {})",
                    self.family,
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        let v = self
            .params
            .get(key)
            .copied()
            .or(default)
            .ok_or_else(|| CliError::config(format!("symbol '{}' needs parameter '{key}'", self.family)))?;
        if v.is_nan() {
            return Err(CliError::config(format!("symbol parameter '{key}' is NaN")));
        }
        Ok(v)
    }

    fn index(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = self.get(key, Some(default as f64))?;
        if v < 0.0 || v.fract() != 0.0 || v > 64.0 {
            return Err(CliError::config(format!("symbol parameter '{key}' = {v} must be a small non-negative integer")));
        }
        Ok(v as usize)
    }

    /// Smooth closed-form symbols, as needed by the commutator check.
    pub fn smooth(&self) -> Result<SmoothCustom, CliError> {
        match self.family.as_str() {
            "gaussian" => {
                self.allow(&["c"])?;
                Ok(SmoothCustom::gaussian(self.get("c", Some(0.5))?))
            }
            "gaussian-xi" => {
                self.allow(&["c"])?;
                Ok(SmoothCustom::gaussian_xi(self.get("c", Some(0.5))?))
            }
            "constant" => {
                self.allow(&["value"])?;
                Ok(SmoothCustom::constant(self.get("value", Some(1.0))?))
            }
            other => Err(CliError::config(format!(
                "symbol '{other}' has no closed-form η-gradient; use gaussian, gaussian-xi or constant"
            ))),
        }
    }

    /// Any symbol family, in dimension `n`.
    pub fn multiplier(&self, n: usize) -> Result<MultiplierSymbol, CliError> {
        Ok(match self.family.as_str() {
            "sign-tensor" => {
                self.allow(&[])?;
                sign_tensor_symbol(n)?
            }
            "hilbert" => {
                self.allow(&["axis"])?;
                let axis = self.index("axis", 0)?;
                if axis >= n {
                    return Err(CliError::config(format!("hilbert axis {axis} out of range for n = {n}")));
                }
                hilbert_pair(axis)
            }
            "bessel" => {
                self.allow(&["a", "alpha"])?;
                bessel_weight(self.get("a", Some(0.0))?, self.get("alpha", Some(0.0))?)
            }
            "riesz" => {
                self.allow(&["s_x", "s_v"])?;
                MultiplierSymbol::RieszWeight {
                    s_x: self.get("s_x", Some(0.0))?,
                    s_v: self.get("s_v", Some(0.0))?,
                    zero_mode: ZeroMode::Drop,
                }
            }
            "hypo1d" => {
                self.allow(&["sigma", "s"])?;
                hypoelliptic_symbol(DimensionCase::OneD, self.get("sigma", None)?, self.get("s", None)?, build_cutoff_1d(), 0)?
            }
            "hypond" => {
                self.allow(&["sigma", "s", "axis", "gamma", "degree"])?;
                let cutoff = build_cutoff_nd(n, self.get("gamma", Some(0.0))?, self.index("degree", 2)?)?;
                hypoelliptic_symbol(
                    DimensionCase::ND { n },
                    self.get("sigma", None)?,
                    self.get("s", None)?,
                    cutoff,
                    self.index("axis", 0)?,
                )?
            }
            "truncation" => {
                self.allow(&["alpha_plus_beta", "s"])?;
                truncation_symbol(self.get("alpha_plus_beta", None)?, self.get("s", Some(1.0))?, build_cutoff_1d())?
            }
            "gaussian" | "gaussian-xi" | "constant" => MultiplierSymbol::SmoothCustom(self.smooth()?),
            other => return Err(CliError::config(format!("unknown symbol family '{other}'"))),
        })
    }
}

/// Parses `mixed-lebesgue:p=inf,q=1[,nesting=v-outer]`, `sobolev:s=..,r=..[,homogeneous=1][,variable=x|v|joint]`
/// or `lorentz:q=..,c=..`.
pub fn parse_norm(spec: &str) -> Result<NormSpec, CliError> {
    let (name, pairs) = parse_named(spec)?;
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in pairs {
        if map.insert(k.clone(), v).is_some() {
            return Err(CliError::config(format!("norm parameter '{k}' given twice")));
        }
    }
    let allow = |keys: &[&str]| -> Result<(), CliError> {
        match map.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(CliError::config(format!("norm '{name}' has no parameter '{k}'"))),
            None => Ok(()),
        }
    };
    let num = |k: &str| -> Result<f64, CliError> {
        number(k, map.get(k).ok_or_else(|| CliError::config(format!("norm '{name}' needs '{k}'")))?)
    };
    let norm = match name.as_str() {
        "mixed-lebesgue" | "lebesgue" => {
            allow(&["p", "q", "nesting"])?;
            let nesting = match map.get("nesting").map(String::as_str) {
                None | Some("x-outer") => Nesting::XOuter,
                Some("v-outer") => Nesting::VOuter,
                Some(o) => return Err(CliError::config(format!("unknown nesting '{o}'"))),
            };
            NormSpec::MixedLebesgue { p: num("p")?, q: num("q")?, nesting }
        }
        "sobolev" => {
            allow(&["s", "r", "homogeneous", "variable"])?;
            let homogeneous = match map.get("homogeneous").map(String::as_str) {
                None | Some("0") | Some("false") => false,
                Some("1") | Some("true") => true,
                Some(o) => return Err(CliError::config(format!("homogeneous = '{o}' is not a boolean"))),
            };
            let variable = match map.get("variable").map(String::as_str) {
                None | Some("x") => Variable::X,
                Some("v") => Variable::V,
                Some("joint") => Variable::Joint,
                Some(o) => return Err(CliError::config(format!("unknown variable '{o}'"))),
            };
            NormSpec::Sobolev { s: num("s")?, r: num("r")?, homogeneous, variable }
        }
        "lorentz" => {
            allow(&["q", "c"])?;
            NormSpec::Lorentz { q: num("q")?, c: num("c")? }
        }
        other => return Err(CliError::config(format!("unknown norm '{other}'"))),
    };
    norm.validate()?;
    Ok(norm)
}

/// Multiplier of the energy identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMultiplier {
    /// Hilbert pair on axis 0 for `n = 1`, sign tensor otherwise.
    #[default]
    Auto,
    Hilbert,
    SignTensor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    pub multiplier: EnergyMultiplier,
    pub axis: usize,
    /// Velocity zero-padding factor; default `max(1, N_v/64)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padding: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Points per axis at each refinement level; default `[128, 256]`, or `[N/2, N]` with a grid size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    /// Writes anomalous members under `<output.dir>/anomalies`.
    pub dump_anomalies: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    /// `L^p_x L^r_v` norms as mixed Lebesgue specs with x-outer nesting.
    pub norms: Vec<NormSpec>,
    /// Separable product dimensions fitted on the line grid.
    pub dims: Vec<usize>,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for DecaySection {
    fn default() -> Self {
        let pair = |p, q| NormSpec::MixedLebesgue { p, q, nesting: Nesting::XOuter };
        DecaySection {
            norms: vec![pair(f64::INFINITY, 1.0), pair(2.0, 1.0), pair(4.0, 4.0 / 3.0)],
            dims: vec![1, 2],
            t_min: 4.0,
            t_max: 32.0,
            samples: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzSection {
    pub p: f64,
    pub r: f64,
    /// Increasing time windows `T`; the last two are compared.
    pub windows: Vec<f64>,
    /// Gauss–Legendre nodes per dyadic time piece.
    pub points: usize,
    /// Spatial width of the Gaussian datum.
    pub width: f64,
}

impl Default for StrichartzSection {
    fn default() -> Self {
        StrichartzSection { p: 2.0, r: 1.0, windows: vec![4.0, 8.0, 16.0], points: 16, width: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParametrixSection {
    /// Quadrature nodes per piece, increasing.
    pub nodes: Vec<usize>,
    pub support: (f64, f64),
    pub away_from_zero: bool,
    /// The datum is `B(x/R) B(v/R)` with `B(t) = e^{-1/(1-t²)}`.
    pub bump_radius: f64,
}

impl Default for ParametrixSection {
    fn default() -> Self {
        ParametrixSection { nodes: vec![16, 32, 64], support: (0.5, 1.0), away_from_zero: true, bump_radius: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenormSection {
    /// Mollification scales; `λ = 1/|ln ε|`.
    pub epsilons: Vec<f64>,
    pub k_radius: f64,
    pub density_exponents: (f64, f64),
    pub transport_exponents: (f64, f64),
    pub defect_epsilons: Vec<f64>,
    pub defect_exponents: (f64, f64),
    pub mollifier_width: f64,
    pub defect_points: usize,
    pub defect_half_width: f64,
}

impl Default for RenormSection {
    fn default() -> Self {
        RenormSection {
            epsilons: [1.0f64, 2.0, 4.0, 8.0].iter().map(|k| (-k).exp()).collect(),
            k_radius: 2.0,
            density_exponents: (4.0, 4.0),
            transport_exponents: (4.0 / 3.0, 4.0 / 3.0),
            defect_epsilons: vec![1.0, 0.5, 0.25, 0.125],
            defect_exponents: (4.0 / 3.0, 4.0 / 3.0),
            mollifier_width: 0.5,
            defect_points: 128,
            defect_half_width: 16.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaSection {
    pub r_min: f64,
    pub r_max: f64,
    pub per_octave: usize,
    /// Number of outer-radius doublings scanned.
    pub doublings: usize,
    /// `true` requires Hörmander growth, `false` requires Hörmander stability, unset reports only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect_hormander_growth: Option<bool>,
}

impl Default for CriteriaSection {
    fn default() -> Self {
        CriteriaSection { r_min: 0.125, r_max: 64.0, per_octave: 2, doublings: 1, expect_hormander_growth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    /// `(n, s)` pairs.
    pub cases: Vec<(usize, f64)>,
    /// Radii range of the `e^{-r/2}` envelope check.
    pub bound_range: (f64, f64),
    pub bound_samples: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { cases: vec![(1, 2.0), (2, 1.5), (3, 2.5)], bound_range: (2.0, 10.0), bound_samples: 33 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudySection {
    pub check: StudyCheck,
    pub levels: Vec<usize>,
}

impl Default for StudySection {
    fn default() -> Self {
        StudySection { check: StudyCheck::EnergyIdentity, levels: vec![128, 256, 512] }
    }
}

/// Replacements for the default pass thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_identity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commutator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parametrix: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_rel_1d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_rel_2d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_stability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strichartz_window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renormalization: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub friedrichs_decay: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marcinkiewicz_stability: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hormander_growth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bessel_mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bessel_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<f64>,
}

impl ToleranceOverrides {
    /// Sets one override from `name=value`.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("tolerance '{assignment}' is not name=value")))?;
        let x = number(k, v.trim())?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(CliError::config(format!("tolerance {k} = {x} must be positive and finite")));
        }
        let slot = match k.trim().replace('-', "_").as_str() {
            "energy_identity" => &mut self.energy_identity,
            "commutator" => &mut self.commutator,
            "parametrix" => &mut self.parametrix,
            "decay_rel_1d" => &mut self.decay_rel_1d,
            "decay_rel_2d" => &mut self.decay_rel_2d,
            "ratio_stability" => &mut self.ratio_stability,
            "strichartz_window" => &mut self.strichartz_window,
            "renormalization" => &mut self.renormalization,
            "friedrichs_decay" => &mut self.friedrichs_decay,
            "marcinkiewicz_stability" => &mut self.marcinkiewicz_stability,
            "hormander_growth" => &mut self.hormander_growth,
            "bessel_mass" => &mut self.bessel_mass,
            "bessel_closed_form" => &mut self.bessel_closed_form,
            "study" => &mut self.study,
            other => return Err(CliError::config(format!("unknown tolerance '{other}'"))),
        };
        *slot = Some(x);
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let all = [
            self.energy_identity,
            self.commutator,
            self.parametrix,
            self.decay_rel_1d,
            self.decay_rel_2d,
            self.ratio_stability,
            self.strichartz_window,
            self.renormalization,
            self.friedrichs_decay,
            self.marcinkiewicz_stability,
            self.hormander_growth,
            self.bessel_mass,
            self.bessel_closed_form,
            self.study,
        ];
        if all.iter().flatten().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(CliError::config("tolerances must be positive and finite"));
        }
        Ok(())
    }
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

/// A complete run description. `parse(emit(c)) == c` for every valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "is_default")]
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub grid: GridConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub family: FamilyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    #[serde(skip_serializing_if = "is_default")]
    pub theorem: TheoremConfig,
    #[serde(skip_serializing_if = "is_default")]
    pub energy: EnergySection,
    #[serde(skip_serializing_if = "is_default")]
    pub sweep: SweepSection,
    #[serde(skip_serializing_if = "is_default")]
    pub decay: DecaySection,
    #[serde(skip_serializing_if = "is_default")]
    pub strichartz: StrichartzSection,
    #[serde(skip_serializing_if = "is_default")]
    pub parametrix: ParametrixSection,
    #[serde(skip_serializing_if = "is_default")]
    pub renorm: RenormSection,
    #[serde(skip_serializing_if = "is_default")]
    pub criteria: CriteriaSection,
    #[serde(skip_serializing_if = "is_default")]
    pub kernel: KernelSection,
    #[serde(skip_serializing_if = "is_default")]
    pub study: StudySection,
    #[serde(skip_serializing_if = "is_default")]
    pub tolerances: ToleranceOverrides,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::config(format!("config cannot be written: {e}")))
    }

    pub fn command(&self) -> Result<Command, CliError> {
        self.command.ok_or_else(|| CliError::config("no command given"))
    }

    /// Grid of a command with its defaults filled in.
    pub fn grid_for(&self, cmd: Command) -> Result<PhaseGrid, CliError> {
        let n = self.grid.dims();
        let defaults = match cmd {
            Command::VerifyEnergy | Command::VerifyCommutator if n == 1 => (256, 256, 12.0, 12.0),
            Command::VerifyEnergy | Command::VerifyCommutator => (32, 32, 6.0, 6.0),
            Command::Sweep => (256, 256, 10.0, 10.0),
            Command::DispersionDecay => (1024, 512, 180.0, 6.0),
            Command::Strichartz => (512, 128, 120.0, 6.0),
            Command::ParametrixCheck => (256, 256, 12.0, 12.0),
            Command::RenormConvergence => (256, 256, 8.0, 8.0),
            Command::CriteriaScan | Command::KernelCheck | Command::ConvergenceStudy => {
                return Err(CliError::config(format!("{} does not use a phase-space grid", cmd.name())))
            }
        };
        self.grid.resolve(defaults)
    }

    /// Sweep refinement levels as grids.
    pub fn sweep_levels(&self) -> Result<Vec<PhaseGrid>, CliError> {
        let levels = match (&self.sweep.levels, self.grid.has_points()) {
            (Some(_), true) => {
                return Err(CliError::config("give either sweep.levels or grid points, not both"));
            }
            (Some(l), false) => l.clone(),
            (None, true) => {
                let g = self.grid_for(Command::Sweep)?;
                if g.points_x != g.points_v {
                    return Err(CliError::config("sweep levels need points_x = points_v"));
                }
                vec![g.points_x / 2, g.points_x]
            }
            (None, false) => vec![128, 256],
        };
        if levels.is_empty() {
            return Err(CliError::config("sweep.levels is empty"));
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("sweep.levels must increase"));
        }
        let base = self.grid_for(Command::Sweep)?;
        levels
            .into_iter()
            .map(|m| {
                Ok(PhaseGrid::new(base.n, m, m, base.half_width_x, base.half_width_v, base.radix)?)
            })
            .collect()
    }

    /// Rejects sections the command does not read and checks cross-field constraints.
    pub fn validate_sections(&self) -> Result<Command, CliError> {
        let cmd = self.command()?;
        let used = cmd.sections();
        let defaults = RunConfig::default();
        let set = [
            ("grid", self.grid != defaults.grid),
            ("family", self.family != defaults.family),
            ("symbol", self.symbol.is_some()),
            ("theorem", self.theorem != defaults.theorem),
            ("energy", self.energy != defaults.energy),
            ("sweep", self.sweep != defaults.sweep),
            ("decay", self.decay != defaults.decay),
            ("strichartz", self.strichartz != defaults.strichartz),
            ("parametrix", self.parametrix != defaults.parametrix),
            ("renorm", self.renorm != defaults.renorm),
            ("criteria", self.criteria != defaults.criteria),
            ("kernel", self.kernel != defaults.kernel),
            ("study", self.study != defaults.study),
        ];
        for (name, present) in set {
            if present && !used.contains(&name) {
                return Err(CliError::config(format!("section [{name}] is not used by {}", cmd.name())));
            }
        }
        if cmd == Command::CriteriaScan && self.grid.has_geometry() {
            return Err(CliError::config("criteria-scan reads only grid.n"));
        }
        self.tolerances.validate()?;
        Ok(cmd)
    }
}
