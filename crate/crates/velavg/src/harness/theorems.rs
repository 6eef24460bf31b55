//! Theorem specifications and the measured ratio `LHS / RHS` for a field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{average_h_half, Nesting, NormSpec};
use crate::spectral_core::{
    apply_transport, average_spectrum_trace, for_each_mode, forward_transform, multiply, Field,
};
use crate::symbols::{
    bessel_weight, check_constraints, conjugate, corollary_regularity, regularity_index, Constraint, CorollaryKind,
    RegularityParams,
};
use crate::tolerances;

/// The estimates a ratio can be measured for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Result1,
    Result2,
    Duality,
    Result3,
    Result5,
    Result4,
    Result6,
    Result7,
    Result8,
    Result9,
    Result10,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Result1,
        TheoremId::Result2,
        TheoremId::Duality,
        TheoremId::Result3,
        TheoremId::Result5,
        TheoremId::Result4,
        TheoremId::Result6,
        TheoremId::Result7,
        TheoremId::Result8,
        TheoremId::Result9,
        TheoremId::Result10,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::Result1 => "result1",
            TheoremId::Result2 => "result2",
            TheoremId::Duality => "duality",
            TheoremId::Result3 => "result3",
            TheoremId::Result5 => "result5",
            TheoremId::Result4 => "result4",
            TheoremId::Result6 => "result6",
            TheoremId::Result7 => "result7",
            TheoremId::Result8 => "result8",
            TheoremId::Result9 => "result9",
            TheoremId::Result10 => "result10",
        }
    }

    pub fn parse(s: &str) -> Result<TheoremId> {
        let t = s.trim();
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name() == t)
            .ok_or_else(|| Error::Parameter(format!("unknown theorem '{s}'")))
    }
}

/// Integrability and regularity parameters; each theorem reads the ones it needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub nesting: Nesting,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r0: f64,
    pub p0: f64,
    pub r1: f64,
    pub p1: f64,
    pub r2: Option<f64>,
}

impl Default for TheoremParams {
    fn default() -> Self {
        TheoremParams {
            n: 1,
            p: 2.0,
            q: 2.0,
            nesting: Nesting::XOuter,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            r0: 2.0,
            p0: 2.0,
            r1: 2.0,
            p1: 2.0,
            r2: None,
        }
    }
}

/// Left-hand side: `‖f̃‖²` in `Ḣ^{1/2}` or `H^σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Lhs {
    HHalf,
    HSigma { sigma: f64 },
}

/// Which function a norm is taken of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operand {
    F,
    Transport,
}

/// `‖⟨D_x⟩^a ⟨D_v⟩^α g‖` with `g = f` or `v·∇_x f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTerm {
    pub operand: Operand,
    pub a: f64,
    pub alpha: f64,
    pub norm: NormSpec,
}

/// Right-hand side as a sum/product tree of norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsExpr {
    Term(NormTerm),
    Product(Vec<RhsExpr>),
    Sum(Vec<RhsExpr>),
    Square(Box<RhsExpr>),
}

impl RhsExpr {
    fn eval(&self, f: &Field, tf: &Field) -> Result<f64> {
        match self {
            RhsExpr::Term(t) => {
                let g = match t.operand {
                    Operand::F => f,
                    Operand::Transport => tf,
                };
                if t.a == 0.0 && t.alpha == 0.0 {
                    t.norm.evaluate(g)
                } else {
                    t.norm.evaluate(&multiply(g, &bessel_weight(t.a, t.alpha))?)
                }
            }
            RhsExpr::Product(xs) => xs.iter().try_fold(1.0, |acc, x| Ok(acc * x.eval(f, tf)?)),
            RhsExpr::Sum(xs) => xs.iter().try_fold(0.0, |acc, x| Ok(acc + x.eval(f, tf)?)),
            RhsExpr::Square(x) => Ok(x.eval(f, tf)?.powi(2)),
        }
    }
}

fn mixed(p: f64, q: f64, nesting: Nesting) -> NormSpec {
    NormSpec::MixedLebesgue { p, q, nesting }
}

fn term(operand: Operand, a: f64, alpha: f64, norm: NormSpec) -> RhsExpr {
    RhsExpr::Term(NormTerm { operand, a, alpha, norm })
}

fn product_plus_square(first: RhsExpr, second: RhsExpr, extra: RhsExpr) -> RhsExpr {
    RhsExpr::Sum(vec![RhsExpr::Product(vec![first, second]), RhsExpr::Square(Box::new(extra))])
}

/// A theorem together with validated parameters and its two sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremSpec {
    pub id: TheoremId,
    pub params: TheoremParams,
    pub lhs: Lhs,
    pub rhs: RhsExpr,
    /// Whether the estimate needs `f` compactly supported in `x` for these parameters.
    pub requires_x_compact: bool,
    /// Instantiated constraint inequalities.
    pub diagnostic: String,
}

impl TheoremSpec {
    /// Validates the parameters for `id` and builds both sides.
    pub fn new(id: TheoremId, params: TheoremParams) -> Result<TheoremSpec> {
        let pr = params;
        if pr.n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        let nf = pr.n as f64;
        let reg = RegularityParams { a: pr.a, b: pr.b, c: pr.c, alpha: pr.alpha, beta: pr.beta, gamma: pr.gamma };
        let corollary = |kind| Constraint::Corollary { kind, p: pr.p, q: pr.q, a: pr.a, b: pr.b, alpha: pr.alpha, beta: pr.beta };
        let p1_10 = 1.0 / (2.0 - 1.0 / pr.r0 - 1.0 / pr.p0 - 1.0 / pr.r1);
        let constraint = match id {
            TheoremId::Result1 => Constraint::Hilbertian { p: pr.p },
            TheoremId::Result2 | TheoremId::Duality => Constraint::MixedHilbertian { p: pr.p, q: pr.q },
            TheoremId::Result3 => Constraint::Regularity {
                p: pr.p,
                q: pr.q,
                a: pr.a,
                b: pr.b,
                c: pr.c,
                alpha: pr.alpha,
                beta: pr.beta,
                gamma: pr.gamma,
            },
            TheoremId::Result5 => corollary(CorollaryKind::Weighted),
            TheoremId::Result4 => corollary(CorollaryKind::ShiftedBoth),
            TheoremId::Result6 => corollary(CorollaryKind::ShiftedX),
            TheoremId::Result7 => corollary(CorollaryKind::ShiftedV),
            TheoremId::Result8 => {
                Constraint::FourExponent { n: pr.n, r0: pr.r0, p0: pr.p0, r1: pr.r1, p1: pr.p1, r2: pr.r2 }
            }
            TheoremId::Result9 => {
                Constraint::FourExponentSymmetric { n: pr.n, r0: pr.r0, p0: pr.p0, r1: pr.r1, p1: pr.p1 }
            }
            TheoremId::Result10 => Constraint::ThreeExponent { n: pr.n, r0: pr.r0, p0: pr.p0, r1: pr.r1 },
        };
        let check = check_constraints(&constraint)?;
        if !check.holds {
            return Err(Error::Constraint(format!("{}: {}", id.name(), check.diagnostic)));
        }
        if id == TheoremId::Result10 && !(p1_10 >= 1.0) {
            return Err(Error::Constraint(format!("result10: derived p1 = {p1_10} is not an exponent")));
        }

        let (p, q) = (pr.p, pr.q);
        let (pc, qc) = (conjugate(p), conjugate(q));
        let sp = nf * (1.0 / p - 0.5);
        let sq = nf * (1.0 / q - 0.5);
        let x_out = Nesting::XOuter;
        let (lhs, rhs, x_compact) = match id {
            TheoremId::Result1 => (
                Lhs::HHalf,
                RhsExpr::Product(vec![
                    term(Operand::F, 0.0, 0.0, mixed(p, p, x_out)),
                    term(Operand::Transport, 0.0, 0.0, mixed(pc, pc, x_out)),
                ]),
                false,
            ),
            TheoremId::Result2 | TheoremId::Duality => {
                let (a, al) = if id == TheoremId::Duality { (pr.a, pr.alpha) } else { (0.0, 0.0) };
                (
                    Lhs::HHalf,
                    RhsExpr::Product(vec![
                        term(Operand::F, a, al, mixed(p, q, pr.nesting)),
                        term(Operand::Transport, -a, -al, mixed(pc, qc, pr.nesting)),
                    ]),
                    !(q / p > (nf - 1.0) / nf),
                )
            }
            TheoremId::Result3 => (
                Lhs::HSigma { sigma: regularity_index(&reg)? },
                product_plus_square(
                    term(Operand::F, pr.a, pr.alpha, mixed(p, q, x_out)),
                    term(Operand::Transport, pr.b, pr.beta, mixed(pc, qc, x_out)),
                    term(Operand::F, pr.c, pr.gamma, mixed(2.0, 2.0, x_out)),
                ),
                false,
            ),
            TheoremId::Result5 => (
                Lhs::HSigma { sigma: corollary_regularity(pr.a, pr.b, pr.alpha, pr.beta)? },
                product_plus_square(
                    term(Operand::F, pr.a, pr.alpha, mixed(p, q, x_out)),
                    term(Operand::Transport, pr.b, pr.beta, mixed(pc, qc, x_out)),
                    term(Operand::F, pr.a, pr.alpha, mixed(2.0, 2.0, x_out)),
                ),
                false,
            ),
            TheoremId::Result4 | TheoremId::Result6 | TheoremId::Result7 => {
                let (dx, dv) = match id {
                    TheoremId::Result4 => (sp, sq),
                    TheoremId::Result6 => (sp, 0.0),
                    _ => (0.0, sq),
                };
                let first = term(Operand::F, pr.a + dx, pr.alpha + dv, mixed(p, q, x_out));
                (
                    Lhs::HSigma { sigma: corollary_regularity(pr.a, pr.b, pr.alpha, pr.beta)? },
                    product_plus_square(
                        first.clone(),
                        term(Operand::Transport, pr.b - dx, pr.beta - dv, mixed(pc, qc, x_out)),
                        first,
                    ),
                    id == TheoremId::Result7,
                )
            }
            TheoremId::Result8 | TheoremId::Result9 | TheoremId::Result10 => {
                let p1 = if id == TheoremId::Result10 { p1_10 } else { pr.p1 };
                let r2 = match id {
                    TheoremId::Result8 => pr.r2,
                    _ => Some(pr.r1),
                };
                let product = RhsExpr::Product(vec![
                    term(Operand::F, 0.0, 0.0, mixed(pr.r0, pr.p0, x_out)),
                    term(Operand::Transport, 0.0, 0.0, mixed(pr.r1, p1, x_out)),
                ]);
                let rhs = match r2 {
                    None => product,
                    Some(r2) => RhsExpr::Sum(vec![
                        product,
                        RhsExpr::Square(Box::new(term(Operand::Transport, 0.0, 0.0, mixed(r2, conjugate(r2), x_out)))),
                    ]),
                };
                let free = p1 / pr.r1 < pr.p0 / pr.r0 + p1 / nf;
                (Lhs::HHalf, rhs, id != TheoremId::Result10 && !free)
            }
        };
        Ok(TheoremSpec { id, params, lhs, rhs, requires_x_compact: x_compact, diagnostic: check.diagnostic })
    }

    pub fn result1(n: usize, p: f64) -> Result<TheoremSpec> {
        TheoremSpec::new(TheoremId::Result1, TheoremParams { n, p, q: p, ..Default::default() })
    }

    /// Replaces the left-hand side, e.g. with an over-claimed `H^{σ'}` for a sharpness probe.
    pub fn with_lhs(mut self, lhs: Lhs) -> TheoremSpec {
        self.lhs = lhs;
        self
    }

    /// Stable key of the parameters the theorem reads, used to order sweep rows.
    pub fn key(&self) -> String {
        let pr = &self.params;
        let f = |name: &str, v: f64| format!("{name}={v:.12}");
        let mut parts = vec![self.id.name().to_string(), format!("n={}", pr.n)];
        match self.id {
            TheoremId::Result1 => parts.push(f("p", pr.p)),
            TheoremId::Result2 => parts.extend([f("p", pr.p), f("q", pr.q)]),
            TheoremId::Duality => parts.extend([f("p", pr.p), f("q", pr.q), f("a", pr.a), f("alpha", pr.alpha)]),
            TheoremId::Result3 => parts.extend([
                f("p", pr.p),
                f("q", pr.q),
                f("a", pr.a),
                f("b", pr.b),
                f("c", pr.c),
                f("alpha", pr.alpha),
                f("beta", pr.beta),
                f("gamma", pr.gamma),
            ]),
            TheoremId::Result5 | TheoremId::Result4 | TheoremId::Result6 | TheoremId::Result7 => parts.extend([
                f("p", pr.p),
                f("q", pr.q),
                f("a", pr.a),
                f("b", pr.b),
                f("alpha", pr.alpha),
                f("beta", pr.beta),
            ]),
            TheoremId::Result8 | TheoremId::Result9 => {
                parts.extend([f("r0", pr.r0), f("p0", pr.p0), f("r1", pr.r1), f("p1", pr.p1)]);
                if let (TheoremId::Result8, Some(r2)) = (self.id, pr.r2) {
                    parts.push(f("r2", r2));
                }
            }
            TheoremId::Result10 => parts.extend([f("r0", pr.r0), f("p0", pr.p0), f("r1", pr.r1)]),
        }
        if let Lhs::HSigma { sigma } = self.lhs {
            parts.push(f("sigma", sigma));
        }
        parts.join(" ")
    }
}

/// Measured sides of an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioOutcome {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; infinite when the right side vanishes and the left does not.
    pub ratio: f64,
    /// Right side vanishes while the left does not.
    pub anomaly: bool,
}

/// `(2π)^{-n} Σ ⟨ξ⟩^{2σ} |f̂(ξ, 0)|² dξ`.
pub fn average_h_sigma_sq(field: &Field, sigma: f64) -> f64 {
    let g = field.grid();
    let trace = average_spectrum_trace(&forward_transform(field));
    let mut sum = 0.0;
    for_each_mode(&g.spatial_axes(), |flat, xi, _| {
        let k2: f64 = xi.iter().map(|t| t * t).sum();
        sum += (1.0 + k2).powf(sigma) * trace[flat].norm_sqr();
    });
    sum * g.dxi() / (2.0 * PI).powi(g.n as i32)
}

/// Fraction of `Σ|f|²` in the outer `max(1, N_x/16)` cells of any spatial axis.
pub fn x_shell_fraction(field: &Field) -> f64 {
    let g = field.grid();
    let w = (g.points_x / 16).max(1);
    let vl = g.v_len();
    let mut total = 0.0;
    let mut shell = 0.0;
    for ix in 0..g.x_len() {
        let mut rest = ix;
        let mut edge = false;
        for _ in 0..g.n {
            let j = rest % g.points_x;
            rest /= g.points_x;
            edge |= j < w || j >= g.points_x - w;
        }
        let m: f64 = field.samples()[ix * vl..(ix + 1) * vl].iter().map(|z| z.norm_sqr()).sum();
        total += m;
        if edge {
            shell += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        shell / total
    }
}

/// `LHS / RHS` of the estimate for one field.
pub fn theorem_ratio(field: &Field, spec: &TheoremSpec) -> Result<RatioOutcome> {
    if field.grid().n != spec.params.n {
        return Err(Error::Parameter(format!(
            "field dimension {} does not match the theorem's n = {}",
            field.grid().n,
            spec.params.n
        )));
    }
    field.check_boundary_mass()?;
    if spec.requires_x_compact {
        let frac = x_shell_fraction(field);
        if frac >= tolerances::BOUNDARY_MASS {
            return Err(Error::Constraint(format!(
                "{} needs compact support in x for these exponents; spatial shell carries {frac:.3e}",
                spec.id.name()
            )));
        }
    }
    let tf = apply_transport(field)?;
    let lhs = match spec.lhs {
        Lhs::HHalf => average_h_half(field).powi(2),
        Lhs::HSigma { sigma } => average_h_sigma_sq(field, sigma),
    };
    let rhs = spec.rhs.eval(field, &tf)?;
    let (ratio, anomaly) = if rhs > 0.0 {
        (lhs / rhs, false)
    } else if lhs > 0.0 {
        (f64::INFINITY, true)
    } else {
        (0.0, false)
    };
    Ok(RatioOutcome { lhs, rhs, ratio, anomaly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;

    fn gaussian(n: usize) -> Field {
        let g = make_grid(n, 64, 64, 8.0, 8.0).unwrap();
        Field::from_real_fn(g, |x, v| (-x.iter().map(|t| t * t).sum::<f64>() - v.iter().map(|t| t * t).sum::<f64>()).exp())
            .unwrap()
    }

    #[test]
    fn ids_round_trip_through_names() {
        for id in TheoremId::ALL {
            assert_eq!(TheoremId::parse(id.name()).unwrap(), id);
        }
        assert_eq!(TheoremId::parse(" result8 ").unwrap(), TheoremId::Result8);
        assert!(TheoremId::parse("result11").is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(TheoremSpec::result1(1, 1.0).is_err());
        let bad = TheoremParams { r0: 2.0, p0: 2.0, r1: 2.0, p1: 3.0, ..Default::default() };
        assert!(matches!(TheoremSpec::new(TheoremId::Result8, bad), Err(Error::Constraint(_))));
    }

    #[test]
    fn scaling_invariance() {
        let f = gaussian(1);
        let spec = TheoremSpec::result1(1, 2.0).unwrap();
        let base = theorem_ratio(&f, &spec).unwrap().ratio;
        for s in [0.1, 10.0] {
            let r = theorem_ratio(&f.scaled(s), &spec).unwrap().ratio;
            assert!((r - base).abs() <= 1e-12 * base);
        }
    }

    #[test]
    fn result2_with_equal_exponents_is_result1() {
        let f = gaussian(1);
        for p in [4.0 / 3.0, 3.0] {
            let r1 = theorem_ratio(&f, &TheoremSpec::result1(1, p).unwrap()).unwrap().ratio;
            let spec2 = TheoremSpec::new(TheoremId::Result2, TheoremParams { p, q: p, ..Default::default() }).unwrap();
            let r2 = theorem_ratio(&f, &spec2).unwrap().ratio;
            assert!((r1 - r2).abs() <= 1e-12 * r1, "{r1} {r2}");
        }
    }

    #[test]
    fn h_sigma_at_zero_is_l2_of_average() {
        let f = gaussian(1);
        let avg = crate::spectral_core::velocity_average(&f);
        let l2 = avg.lp_norm(2.0);
        assert!((average_h_sigma_sq(&f, 0.0) - l2 * l2).abs() < 1e-12 * l2 * l2);
    }

    #[test]
    fn x_compactness_is_enforced() {
        let g = make_grid(1, 64, 64, 4.0, 8.0).unwrap();
        let wide = Field::from_real_fn(g, |x, v| (-0.2 * x[0] * x[0] - v[0] * v[0]).exp()).unwrap();
        let spec = TheoremSpec::new(TheoremId::Result7, TheoremParams { p: 2.0, q: 2.0, ..Default::default() }).unwrap();
        assert!(spec.requires_x_compact);
        assert!(matches!(theorem_ratio(&wide, &spec), Err(Error::Constraint(_))));
    }
}
