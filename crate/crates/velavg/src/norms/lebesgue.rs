use super::{lebesgue_exponent, Nesting};
use crate::error::Result;
use crate::spectral_core::Field;

fn power_sum(values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, f64::max);
    }
    let s: f64 = values.map(|a| a.powf(p)).sum();
    (s * cell).powf(1.0 / p)
}

/// Mixed norm `L^p_x L^q_v` (or `L^q_v L^p_x`) as nested Riemann sums.
pub fn mixed_norm(field: &Field, p: f64, q: f64, nesting: Nesting) -> Result<f64> {
    lebesgue_exponent("p", p)?;
    lebesgue_exponent("q", q)?;
    let g = field.grid();
    let (xl, vl) = (g.x_len(), g.v_len());
    let (dx, dv) = (g.dx(), g.dv());
    let s = field.samples();
    Ok(match nesting {
        Nesting::XOuter => {
            let inner = s.chunks(vl).map(|row| power_sum(row.iter().map(|z| z.norm()), q, dv));
            power_sum(inner, p, dx)
        }
        Nesting::VOuter => {
            let inner = (0..vl).map(|iv| power_sum((0..xl).map(|ix| s[ix * vl + iv].norm()), p, dx));
            power_sum(inner, q, dv)
        }
    })
}

/// Joint `L^p` norm over phase space.
pub fn joint_lp(field: &Field, p: f64) -> Result<f64> {
    lebesgue_exponent("p", p)?;
    let g = field.grid();
    Ok(power_sum(field.samples().iter().map(|z| z.norm()), p, g.dx() * g.dv()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;

    #[test]
    fn constant_field() {
        // x-volume 2, v-volume 3.
        let g = make_grid(1, 16, 16, 1.0, 1.5).unwrap();
        let f = Field::from_real_fn(g, |_, _| 1.0).unwrap();
        let (p, q) = (3.0, 1.5);
        let want = 3f64.powf(1.0 / q) * 2f64.powf(1.0 / p);
        assert!((mixed_norm(&f, p, q, Nesting::XOuter).unwrap() - want).abs() < 1e-13);
        assert!((mixed_norm(&f, f64::INFINITY, 1.0, Nesting::XOuter).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_sub_unit_exponent() {
        let g = make_grid(1, 8, 8, 1.0, 1.0).unwrap();
        let f = Field::zeros(g);
        assert!(mixed_norm(&f, 0.5, 2.0, Nesting::XOuter).is_err());
    }
}
