//! Exponent windows and admissibility predicates of the estimates.

use crate::error::{Error, Result};

const EQ_TOL: f64 = 1e-12;

/// Hölder conjugate, with `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn inv(p: f64) -> f64 {
    1.0 / p
}

/// Which corollary of the regularity theorem a parameter set targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CorollaryKind {
    /// Bessel weights on both sides plus an `L²` term; `1 < p, q < ∞`.
    Weighted,
    /// Sobolev shifts in `x` and `v`; `1 < p, q ≤ 2`.
    ShiftedBoth,
    /// Sobolev shift in `x`; `1 < p ≤ 2 ≤ q < ∞`.
    ShiftedX,
    /// Sobolev shift in `v`; `1 < q ≤ 2 ≤ p < ∞`.
    ShiftedV,
}

/// Parameter sets whose admissibility can be checked.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    /// `q₁/p₁ < q₀/p₀ + q₁/n`.
    Approximation3 { n: usize, p0: f64, q0: f64, p1: f64, q1: f64 },
    /// `q₁/p₁ < (n-1)/n + q₁/n`.
    Approximation4 { n: usize, p1: f64, q1: f64 },
    /// `1/r₀ + 1/p₀ + 1/r₁ + 1/p₁ = 2`.
    HarmonicMean { r0: f64, p0: f64, r1: f64, p1: f64 },
    /// `(n-1)/p₀ < n/r₁' < n/p₀ + 1/p₁`.
    Window { n: usize, p0: f64, r1: f64, p1: f64 },
    /// Full hypotheses of the four-exponent estimate, with optional `r₂`.
    FourExponent { n: usize, r0: f64, p0: f64, r1: f64, p1: f64, r2: Option<f64> },
    /// The specialisation `r₂ = r₁` with `r₁ ≤ 2 ≤ r₁' ≤ p₁`.
    FourExponentSymmetric { n: usize, r0: f64, p0: f64, r1: f64, p1: f64 },
    /// `v·∇f ∈ L^{r₁}L^{r₁'}` variant.
    ThreeExponent { n: usize, r0: f64, p0: f64, r1: f64 },
    /// Averaged streaming bound when the time cutoff may contain the origin.
    DispersiveOrigin { n: usize, p0: f64, r0: f64, p1: f64, r1: f64 },
    /// Averaged streaming bound with the origin outside the time cutoff.
    DispersiveAway { n: usize, p0: f64, r0: f64, p1: f64, r1: f64 },
    /// `2/q = n(1/r - 1/p)`, `2/a = 1/p + 1/r`, `a < q`.
    Strichartz { n: usize, q: f64, p: f64, r: f64, a: f64 },
    /// `1 < p < ∞`.
    Hilbertian { p: f64 },
    /// `1 < p, q < ∞`.
    MixedHilbertian { p: f64, q: f64 },
    /// Regularity theorem hypotheses.
    Regularity { p: f64, q: f64, a: f64, b: f64, c: f64, alpha: f64, beta: f64, gamma: f64 },
    /// Corollary hypotheses.
    Corollary { kind: CorollaryKind, p: f64, q: f64, a: f64, b: f64, alpha: f64, beta: f64 },
}

/// Outcome of a constraint check with the instantiated inequalities.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub holds: bool,
    pub diagnostic: String,
}

struct Checker {
    holds: bool,
    lines: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { holds: true, lines: Vec::new() }
    }

    fn lt(&mut self, name: &str, lhs: f64, rhs: f64) {
        let ok = lhs < rhs - EQ_TOL;
        self.holds &= ok;
        self.lines.push(format!("{name}: {lhs:.12} < {rhs:.12} [{}]", if ok { "ok" } else { "fails" }));
    }

    fn le(&mut self, name: &str, lhs: f64, rhs: f64) {
        let ok = lhs <= rhs + EQ_TOL;
        self.holds &= ok;
        self.lines.push(format!("{name}: {lhs:.12} ≤ {rhs:.12} [{}]", if ok { "ok" } else { "fails" }));
    }

    fn eq(&mut self, name: &str, lhs: f64, rhs: f64) {
        let ok = (lhs - rhs).abs() <= EQ_TOL;
        self.holds &= ok;
        self.lines.push(format!("{name}: {lhs:.12} = {rhs:.12} [{}]", if ok { "ok" } else { "fails" }));
    }

    fn any(&mut self, name: &str, branches: Vec<Checker>) {
        let ok = branches.iter().any(|b| b.holds);
        self.holds &= ok;
        let parts: Vec<String> = branches.iter().map(|b| b.lines.join("; ")).collect();
        self.lines.push(format!("{name}: one of {{{}}} [{}]", parts.join(" | "), if ok { "ok" } else { "fails" }));
    }

    fn finish(self) -> ConstraintCheck {
        ConstraintCheck { holds: self.holds, diagnostic: self.lines.join("\n") }
    }
}

fn exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Exponent(format!("{name} = {p} must lie in [1, ∞]")));
    }
    Ok(())
}

fn open(name: &str, p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("{name} = {p} must lie in (1, ∞)")));
    }
    Ok(())
}

fn range(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Exponent(format!("range violated: {what}")))
    }
}

fn dims(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    Ok(n as f64)
}

fn window(c: &mut Checker, n: f64, p0: f64, r1: f64, p1: f64) {
    let mid = n * inv(conjugate(r1));
    c.lt("(n-1)/p0 < n/r1'", (n - 1.0) * inv(p0), mid);
    c.lt("n/r1' < n/p0 + 1/p1", mid, n * inv(p0) + inv(p1));
}

fn dispersive_ranges(p0: f64, r0: f64, p1: f64, r1: f64) -> Result<()> {
    for (name, v) in [("p0", p0), ("r0", r0), ("p1", p1), ("r1", r1)] {
        exponent(name, v)?;
    }
    range(r0 <= p0, "r0 ≤ p0")?;
    range(r1 <= p1, "r1 ≤ p1")
}

fn assumption_p(n: f64, p0: f64, p1: f64) -> Checker {
    let mut c = Checker::new();
    c.lt("(n-1)/p1 < n/p0", (n - 1.0) * inv(p1), n * inv(p0));
    c.le("n/p0 ≤ n/p1", n * inv(p0), n * inv(p1));
    c
}

fn assumption_r(n: f64, r0: f64, r1: f64) -> Checker {
    let mut c = Checker::new();
    let (r0c, r1c) = (conjugate(r0), conjugate(r1));
    c.lt("(n-1)/r0' < n/r1'", (n - 1.0) * inv(r0c), n * inv(r1c));
    c.le("n/r1' ≤ n/r0'", n * inv(r1c), n * inv(r0c));
    c
}

/// Checks a parameter set; range violations are errors, failed inequalities are reported.
pub fn check_constraints(constraint: &Constraint) -> Result<ConstraintCheck> {
    let mut c = Checker::new();
    match *constraint {
        Constraint::Approximation3 { n, p0, q0, p1, q1 } => {
            let nf = dims(n)?;
            for (name, v) in [("p0", p0), ("q0", q0), ("p1", p1), ("q1", q1)] {
                open(name, v)?;
            }
            c.lt("q1/p1 < q0/p0 + q1/n", q1 / p1, q0 / p0 + q1 / nf);
        }
        Constraint::Approximation4 { n, p1, q1 } => {
            let nf = dims(n)?;
            open("p1", p1)?;
            open("q1", q1)?;
            c.lt("q1/p1 < (n-1)/n + q1/n", q1 / p1, (nf - 1.0) / nf + q1 / nf);
        }
        Constraint::HarmonicMean { r0, p0, r1, p1 } => {
            for (name, v) in [("r0", r0), ("p0", p0), ("r1", r1), ("p1", p1)] {
                exponent(name, v)?;
            }
            c.eq("1/r0 + 1/p0 + 1/r1 + 1/p1 = 2", inv(r0) + inv(p0) + inv(r1) + inv(p1), 2.0);
        }
        Constraint::Window { n, p0, r1, p1 } => {
            let nf = dims(n)?;
            for (name, v) in [("p0", p0), ("r1", r1), ("p1", p1)] {
                exponent(name, v)?;
            }
            window(&mut c, nf, p0, r1, p1);
        }
        Constraint::FourExponent { n, r0, p0, r1, p1, r2 } => {
            let nf = dims(n)?;
            for (name, v) in [("r0", r0), ("p0", p0), ("r1", r1), ("p1", p1)] {
                exponent(name, v)?;
            }
            range(r0 > 1.0 && r0 <= p0, "1 < r0 ≤ p0 ≤ ∞")?;
            range(r1 > 1.0 && r1 <= p1 && p1.is_finite(), "1 < r1 ≤ p1 < ∞")?;
            if let Some(r2) = r2 {
                range(r2 > 2.0 * nf / (nf + 1.0) && r2 <= 2.0, "2n/(n+1) < r2 ≤ 2")?;
            }
            c.eq("1/r0 + 1/p0 + 1/r1 + 1/p1 = 2", inv(r0) + inv(p0) + inv(r1) + inv(p1), 2.0);
            window(&mut c, nf, p0, r1, p1);
        }
        Constraint::FourExponentSymmetric { n, r0, p0, r1, p1 } => {
            let nf = dims(n)?;
            for (name, v) in [("r0", r0), ("p0", p0), ("r1", r1), ("p1", p1)] {
                exponent(name, v)?;
            }
            range(r0 > 1.0 && r0 <= p0, "1 < r0 ≤ p0 ≤ ∞")?;
            range(
                r1 > 2.0 * nf / (nf + 1.0) && r1 <= 2.0 && conjugate(r1) <= p1 && p1.is_finite(),
                "2n/(n+1) < r1 ≤ 2 ≤ r1' ≤ p1 < ∞",
            )?;
            c.eq("1/r0 + 1/p0 + 1/r1 + 1/p1 = 2", inv(r0) + inv(p0) + inv(r1) + inv(p1), 2.0);
            window(&mut c, nf, p0, r1, p1);
        }
        Constraint::ThreeExponent { n, r0, p0, r1 } => {
            let nf = dims(n)?;
            for (name, v) in [("r0", r0), ("p0", p0), ("r1", r1)] {
                exponent(name, v)?;
            }
            range(r0 > 1.0 && r0 <= p0, "1 < r0 ≤ p0 ≤ ∞")?;
            range(r1 > 2.0 * nf / (nf + 1.0) && r1 <= 2.0, "2n/(n+1) < r1 ≤ 2")?;
            let s = inv(r0) + inv(p0);
            c.le("2/r1' ≤ 1/r0 + 1/p0", 2.0 * inv(conjugate(r1)), s);
            c.le("1/r0 + 1/p0 ≤ 1", s, 1.0);
            c.lt(
                "(n-1)/r1' < (n-1)/p0 + 1/r0'",
                (nf - 1.0) * inv(conjugate(r1)),
                (nf - 1.0) * inv(p0) + inv(conjugate(r0)),
            );
        }
        Constraint::DispersiveOrigin { n, p0, r0, p1, r1 } => {
            let nf = dims(n)?;
            dispersive_ranges(p0, r0, p1, r1)?;
            c.eq("1/p0 + 1/r0 = 1/p1 + 1/r1", inv(p0) + inv(r0), inv(p1) + inv(r1));
            c.lt("n/r1 < 1 + n/p0", nf * inv(r1), 1.0 + nf * inv(p0));
            c.any("window", vec![assumption_p(nf, p0, p1), assumption_r(nf, r0, r1)]);
        }
        Constraint::DispersiveAway { n, p0, r0, p1, r1 } => {
            let nf = dims(n)?;
            dispersive_ranges(p0, r0, p1, r1)?;
            c.eq("1/p0 + 1/r0 = 1/p1 + 1/r1", inv(p0) + inv(r0), inv(p1) + inv(r1));
            let mut corner = Checker::new();
            let is_corner = p0.is_infinite() && p1.is_infinite() && r0 == 1.0 && r1 == 1.0;
            corner.holds = is_corner;
            corner.lines.push(format!("(p0,r0) = (p1,r1) = (∞,1) [{}]", if is_corner { "ok" } else { "fails" }));
            c.any("window", vec![corner, assumption_p(nf, p0, p1), assumption_r(nf, r0, r1)]);
        }
        Constraint::Strichartz { n, q, p, r, a } => {
            let nf = dims(n)?;
            for (name, v) in [("q", q), ("p", p), ("r", r), ("a", a)] {
                exponent(name, v)?;
            }
            range(r <= p, "r ≤ p")?;
            c.eq("2/q = n(1/r - 1/p)", 2.0 * inv(q), nf * (inv(r) - inv(p)));
            c.eq("2/a = 1/p + 1/r", 2.0 * inv(a), inv(p) + inv(r));
            if a.is_infinite() && q.is_infinite() {
                c.lines.push("a = q = ∞ [ok]".into());
            } else {
                c.lt("1/q < 1/a (a < q)", inv(q), inv(a));
            }
        }
        Constraint::Hilbertian { p } => {
            open("p", p)?;
            c.lines.push(format!("1 < p = {p} < ∞ [ok]"));
        }
        Constraint::MixedHilbertian { p, q } => {
            open("p", p)?;
            open("q", q)?;
            c.lines.push(format!("1 < p = {p}, q = {q} < ∞ [ok]"));
        }
        Constraint::Regularity { p, q, a, b, c: cc, alpha, beta, gamma } => {
            open("p", p)?;
            open("q", q)?;
            c.le("0 ≤ 1+a+b-2c", 0.0, 1.0 + a + b - 2.0 * cc);
            c.le("α+β ≤ 0", alpha + beta, 0.0);
            c.lt("-1/2 < γ", -0.5, gamma);
        }
        Constraint::Corollary { kind, p, q, a, b, alpha, beta } => {
            open("p", p)?;
            open("q", q)?;
            match kind {
                CorollaryKind::Weighted => {}
                CorollaryKind::ShiftedBoth => range(p <= 2.0 && q <= 2.0, "1 < p, q ≤ 2")?,
                CorollaryKind::ShiftedX => range(p <= 2.0 && q >= 2.0, "1 < p ≤ 2 ≤ q < ∞")?,
                CorollaryKind::ShiftedV => range(q <= 2.0 && p >= 2.0, "1 < q ≤ 2 ≤ p < ∞")?,
            }
            c.le("0 ≤ 1+b-a", 0.0, 1.0 + b - a);
            c.le("α+β ≤ 0", alpha + beta, 0.0);
            c.lt("-1/2 < α", -0.5, alpha);
        }
    }
    Ok(c.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approximation_constraint_at_two() {
        let r = check_constraints(&Constraint::Approximation3 { n: 2, p0: 2.0, q0: 2.0, p1: 2.0, q1: 2.0 }).unwrap();
        assert!(r.holds, "{}", r.diagnostic);
    }

    #[test]
    fn window_at_two() {
        let r = check_constraints(&Constraint::Window { n: 2, p0: 2.0, r1: 2.0, p1: 2.0 }).unwrap();
        assert!(r.holds, "{}", r.diagnostic);
        assert!(r.diagnostic.contains("0.5") && r.diagnostic.contains("1.5"));
    }

    #[test]
    fn harmonic_mean_example() {
        let r = check_constraints(&Constraint::HarmonicMean { r0: 4.0 / 3.0, p0: 4.0, r1: 4.0 / 3.0, p1: 4.0 }).unwrap();
        assert!(r.holds);
        let r = check_constraints(&Constraint::HarmonicMean { r0: 2.0, p0: 4.0, r1: 4.0 / 3.0, p1: 4.0 }).unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn strichartz_endpoint_fails() {
        let ok = check_constraints(&Constraint::Strichartz { n: 1, q: 4.0, p: 2.0, r: 1.0, a: 4.0 / 3.0 }).unwrap();
        assert!(ok.holds, "{}", ok.diagnostic);
        // n = 3, p = 2r is the equality p = (n+1)r/(n-1): a = q.
        let end = check_constraints(&Constraint::Strichartz { n: 3, q: 4.0, p: 4.0, r: 2.0, a: 8.0 / 3.0 }).unwrap();
        assert!(!end.holds);
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(check_constraints(&Constraint::Hilbertian { p: 1.0 }).is_err());
        assert!(check_constraints(&Constraint::DispersiveAway { n: 1, p0: 1.0, r0: 2.0, p1: 2.0, r1: 2.0 }).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(4.0) - 4.0 / 3.0).abs() < 1e-15);
    }
}
