//! Seeded families of analytic phase-space test functions.
//!
//! Members are closures drawn once from the seed, so sampling the same family
//! on successively finer grids refines the same functions.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::renorm::renormalize;
use crate::error::{Error, Result};
use crate::spectral_core::{Field, PhaseGrid};
use crate::symbols::build_cutoff_1d;

/// `f(x, v)` as a shareable closure.
pub type FieldFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

/// Which construction a family uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Sums of one to three anisotropic Gaussians.
    Gaussian,
    /// Products of `exp(-1/(1-t²))` bumps on random boxes.
    CompactBump,
    /// `e^{-|x-c|²} e^{ik x_1} e^{-|v|²}`.
    Oscillatory { k: f64 },
    /// `h_λ` of a Gaussian-mixture base with `K = {|v| ≤ k_radius}`.
    Renormalized { lambda: f64, k_radius: f64 },
    /// `χ(εx) h_λ`.
    LocalizedRenorm { epsilon: f64, lambda: f64, k_radius: f64 },
    /// `Π_d g_d(x_d) h_d(v_d)` with Gaussian factors.
    SeparableProduct,
}

/// Ranges the random parameters are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRanges {
    /// Centres in `x` are drawn from `[-center_x, center_x]^n`.
    pub center_x: f64,
    pub center_v: f64,
    /// Gaussian widths (or bump radii) in `[lo, hi]`.
    pub width: (f64, f64),
    /// Amplitude magnitudes in `[lo, hi]`; the sign is random.
    pub amplitude: (f64, f64),
    pub max_components: usize,
}

impl Default for FamilyRanges {
    fn default() -> Self {
        FamilyRanges { center_x: 1.5, center_v: 1.0, width: (0.6, 1.2), amplitude: (0.5, 1.5), max_components: 3 }
    }
}

/// A drawn member with a human-readable description.
#[derive(Clone)]
pub struct Member {
    pub label: String,
    pub func: FieldFn,
}

impl std::fmt::Debug for Member {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Member").field("label", &self.label).finish()
    }
}

/// A seeded family of test functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub kind: FamilyKind,
    pub count: usize,
    pub seed: u64,
    pub ranges: FamilyRanges,
}

fn sq(a: &[f64]) -> f64 {
    a.iter().map(|t| t * t).sum()
}

fn dist_sq(a: &[f64], c: &[f64]) -> f64 {
    a.iter().zip(c).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

struct Gaussian {
    amp: f64,
    cx: Vec<f64>,
    cv: Vec<f64>,
    sx: f64,
    sv: f64,
}

impl Gaussian {
    fn eval(&self, x: &[f64], v: &[f64]) -> f64 {
        self.amp * (-dist_sq(x, &self.cx) / (self.sx * self.sx) - dist_sq(v, &self.cv) / (self.sv * self.sv)).exp()
    }
}

impl TestFamily {
    pub fn new(kind: FamilyKind, count: usize, seed: u64) -> Result<Self> {
        let f = TestFamily { kind, count, seed, ranges: FamilyRanges::default() };
        f.validate()?;
        Ok(f)
    }

    pub fn with_ranges(mut self, ranges: FamilyRanges) -> Result<Self> {
        self.ranges = ranges;
        self.validate()?;
        Ok(self)
    }

    /// Parses `name[:count]` (`gaussian:20`, `bump`, `separable:4`) or
    /// `oscillatory:k[:count]`, `renormalized:λ[:count]`, `localized:ε:λ[:count]`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |i: usize, what: &str| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parameter(format!("family '{spec}' is missing {what}")))?
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("family '{spec}': {what} is not a number")))
        };
        let count = |i: usize| -> Result<usize> {
            match parts.get(i) {
                None => Ok(1),
                Some(s) => s.parse::<usize>().map_err(|_| Error::Parameter(format!("family '{spec}': bad count '{s}'"))),
            }
        };
        let (kind, rest) = match parts[0] {
            "gaussian" => (FamilyKind::Gaussian, 1),
            "bump" | "compact-bump" => (FamilyKind::CompactBump, 1),
            "separable" => (FamilyKind::SeparableProduct, 1),
            "oscillatory" => (FamilyKind::Oscillatory { k: num(1, "k")? }, 2),
            "renormalized" => (FamilyKind::Renormalized { lambda: num(1, "λ")?, k_radius: 2.0 }, 2),
            "localized" => {
                (FamilyKind::LocalizedRenorm { epsilon: num(1, "ε")?, lambda: num(2, "λ")?, k_radius: 2.0 }, 3)
            }
            other => return Err(Error::Parameter(format!("unknown family '{other}'"))),
        };
        if parts.len() > rest + 1 {
            return Err(Error::Parameter(format!("family '{spec}' has trailing fields")));
        }
        TestFamily::new(kind, count(rest)?, seed)
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Parameter("family must have at least one member".into()));
        }
        let r = &self.ranges;
        let ok = r.center_x >= 0.0
            && r.center_v >= 0.0
            && 0.0 < r.width.0
            && r.width.0 <= r.width.1
            && 0.0 < r.amplitude.0
            && r.amplitude.0 <= r.amplitude.1
            && r.max_components >= 1;
        if !ok {
            return Err(Error::Parameter(format!("invalid family ranges {r:?}")));
        }
        match self.kind {
            FamilyKind::Oscillatory { k } if !k.is_finite() => Err(Error::Parameter(format!("k = {k}"))),
            FamilyKind::Renormalized { lambda, k_radius } if !(lambda > 0.0 && k_radius > 0.0) => {
                Err(Error::Parameter(format!("need λ > 0 and K radius > 0, got {lambda}, {k_radius}")))
            }
            FamilyKind::LocalizedRenorm { epsilon, lambda, k_radius }
                if !(epsilon > 0.0 && lambda > 0.0 && k_radius > 0.0) =>
            {
                Err(Error::Parameter(format!("need ε, λ, K radius > 0, got {epsilon}, {lambda}, {k_radius}")))
            }
            _ => Ok(()),
        }
    }

    fn draw_gaussian(&self, rng: &mut ChaCha8Rng, n: usize) -> Gaussian {
        let r = &self.ranges;
        let amp = rng.random_range(r.amplitude.0..=r.amplitude.1) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let cx = (0..n).map(|_| rng.random_range(-r.center_x..=r.center_x)).collect();
        let cv = (0..n).map(|_| rng.random_range(-r.center_v..=r.center_v)).collect();
        let sx = rng.random_range(r.width.0..=r.width.1);
        let sv = rng.random_range(r.width.0..=r.width.1);
        Gaussian { amp, cx, cv, sx, sv }
    }

    fn draw_mixture(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Gaussian> {
        let m = rng.random_range(1..=self.ranges.max_components);
        (0..m).map(|_| self.draw_gaussian(rng, n)).collect()
    }

    /// Draws the members for dimension `n`; identical for identical seeds.
    pub fn members(&self, n: usize) -> Result<Vec<Member>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let m = match self.kind {
                FamilyKind::Gaussian => {
                    let mix = self.draw_mixture(&mut rng, n);
                    let label = format!("gaussian#{i} ({} components)", mix.len());
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        Complex64::new(mix.iter().map(|g| g.eval(x, v)).sum(), 0.0)
                    });
                    Member { label, func }
                }
                FamilyKind::CompactBump => {
                    let r = self.ranges;
                    let amp = rng.random_range(r.amplitude.0..=r.amplitude.1);
                    let cx: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let cv: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let rx: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
                    let rv: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=2.0)).collect();
                    let label = format!("bump#{i}");
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        let mut p = amp;
                        for d in 0..x.len() {
                            p *= bump((x[d] - cx[d]) / rx[d]) * bump((v[d] - cv[d]) / rv[d]);
                        }
                        Complex64::new(p, 0.0)
                    });
                    Member { label, func }
                }
                FamilyKind::Oscillatory { k } => {
                    let c: Vec<f64> = if i == 0 {
                        vec![0.0; n]
                    } else {
                        (0..n).map(|_| rng.random_range(-0.5..=0.5)).collect()
                    };
                    let label = format!("oscillatory#{i} (k = {k})");
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        let env = (-dist_sq(x, &c) - sq(v)).exp();
                        Complex64::from_polar(env, k * x[0])
                    });
                    Member { label, func }
                }
                FamilyKind::Renormalized { lambda, k_radius } => {
                    let mix = self.draw_mixture(&mut rng, n);
                    let label = format!("renormalized#{i} (λ = {lambda})");
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        if sq(v).sqrt() > k_radius {
                            return Complex64::new(0.0, 0.0);
                        }
                        let f: f64 = mix.iter().map(|g| g.eval(x, v)).sum();
                        Complex64::new(renormalize(f, lambda), 0.0)
                    });
                    Member { label, func }
                }
                FamilyKind::LocalizedRenorm { epsilon, lambda, k_radius } => {
                    let mix = self.draw_mixture(&mut rng, n);
                    let chi = build_cutoff_1d();
                    let label = format!("localized#{i} (ε = {epsilon}, λ = {lambda})");
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        if sq(v).sqrt() > k_radius {
                            return Complex64::new(0.0, 0.0);
                        }
                        let f: f64 = mix.iter().map(|g| g.eval(x, v)).sum();
                        let ex: Vec<f64> = x.iter().map(|t| 0.5 * epsilon * t).collect();
                        Complex64::new(chi.eval(&ex) * renormalize(f, lambda), 0.0)
                    });
                    Member { label, func }
                }
                FamilyKind::SeparableProduct => {
                    let factors: Vec<Gaussian> = (0..n).map(|_| self.draw_gaussian(&mut rng, 1)).collect();
                    let label = format!("separable#{i}");
                    let func: FieldFn = Arc::new(move |x: &[f64], v: &[f64]| {
                        let p: f64 = factors.iter().enumerate().map(|(d, g)| g.eval(&x[d..=d], &v[d..=d])).product();
                        Complex64::new(p, 0.0)
                    });
                    Member { label, func }
                }
            };
            out.push(m);
        }
        Ok(out)
    }

    /// Samples every member on `grid`, rejecting members that reach the velocity boundary.
    pub fn sample(&self, grid: PhaseGrid) -> Result<Vec<Field>> {
        self.members(grid.n)?
            .iter()
            .map(|m| {
                let f = Field::from_fn(grid, |x, v| (m.func)(x, v))?;
                f.check_boundary_mass()?;
                Ok(f)
            })
            .collect()
    }

    /// Uniform bound on `|f|` implied by the construction, if any (`1/λ` for renormalized members).
    pub fn sup_bound(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Renormalized { lambda, .. } | FamilyKind::LocalizedRenorm { lambda, .. } => Some(1.0 / lambda),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;

    #[test]
    fn members_are_reproducible() {
        let fam = TestFamily::new(FamilyKind::Gaussian, 5, 7).unwrap();
        let g = make_grid(1, 32, 32, 8.0, 8.0).unwrap();
        assert_eq!(fam.sample(g).unwrap(), fam.sample(g).unwrap());
        let other = TestFamily::new(FamilyKind::Gaussian, 5, 8).unwrap();
        assert_ne!(fam.sample(g).unwrap(), other.sample(g).unwrap());
    }

    #[test]
    fn parse_specs() {
        assert_eq!(TestFamily::parse("gaussian:20", 1).unwrap().count, 20);
        assert_eq!(TestFamily::parse("gaussian", 1).unwrap().count, 1);
        assert_eq!(TestFamily::parse("oscillatory:8", 1).unwrap().kind, FamilyKind::Oscillatory { k: 8.0 });
        assert!(TestFamily::parse("gaussian:0", 1).is_err());
        assert!(TestFamily::parse("nope", 1).is_err());
        assert!(TestFamily::parse("gaussian:2:3", 1).is_err());
    }

    #[test]
    fn renormalized_members_are_bounded() {
        let fam = TestFamily::new(FamilyKind::Renormalized { lambda: 0.5, k_radius: 2.0 }, 4, 3)
            .unwrap()
            .with_ranges(FamilyRanges { amplitude: (2.0, 5.0), ..Default::default() })
            .unwrap();
        let g = make_grid(1, 64, 64, 8.0, 8.0).unwrap();
        for f in fam.sample(g).unwrap() {
            assert!(f.max_abs() <= 2.0 + 1e-12);
        }
    }
}
