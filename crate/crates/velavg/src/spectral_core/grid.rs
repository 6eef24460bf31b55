use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One periodic axis sampled at `points` cell centres of `[-half_width, half_width)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub points: usize,
    pub half_width: f64,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Cell-centre coordinate of sample `j`.
    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coordinate(j)).collect()
    }

    /// Signed mode number of DFT index `k`; the Nyquist index maps to `-N/2`.
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Frequency of DFT index `k` on the lattice `(π/L)ℤ`.
    pub fn frequency(&self, k: usize) -> f64 {
        self.mode(k) as f64 * self.frequency_spacing()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.frequency(k)).collect()
    }

    pub fn is_nyquist(&self, k: usize) -> bool {
        k == self.points / 2
    }

    pub fn nyquist_frequency(&self) -> f64 {
        self.points as f64 / 2.0 * self.frequency_spacing()
    }
}

/// Transform sizes accepted by a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Radix {
    /// Powers of two only.
    #[default]
    PowerOfTwo,
    /// Any even size (mixed-radix transforms).
    Mixed,
}

/// Periodic phase-space box `[-L_x, L_x)^n × [-L_v, L_v)^n`.
///
/// Samples are stored row-major over the axes `(x_1, …, x_n, v_1, …, v_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub n: usize,
    pub points_x: usize,
    pub points_v: usize,
    pub half_width_x: f64,
    pub half_width_v: f64,
    pub radix: Radix,
}

/// Grid with power-of-two transform sizes.
pub fn make_grid(
    n: usize,
    points_x: usize,
    points_v: usize,
    half_width_x: f64,
    half_width_v: f64,
) -> Result<PhaseGrid> {
    PhaseGrid::new(n, points_x, points_v, half_width_x, half_width_v, Radix::PowerOfTwo)
}

fn check_points(points: usize, radix: Radix, name: &str) -> Result<()> {
    if points < 4 || !points.is_multiple_of(2) {
        return Err(Error::Grid(format!("{name} = {points} must be even and at least 4")));
    }
    if radix == Radix::PowerOfTwo && !points.is_power_of_two() {
        return Err(Error::Grid(format!(
            "{name} = {points} is not a power of two (mixed radix not enabled)"
        )));
    }
    Ok(())
}

impl PhaseGrid {
    pub fn new(
        n: usize,
        points_x: usize,
        points_v: usize,
        half_width_x: f64,
        half_width_v: f64,
        radix: Radix,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("dimension must be at least 1".into()));
        }
        check_points(points_x, radix, "points_x")?;
        check_points(points_v, radix, "points_v")?;
        for (w, name) in [(half_width_x, "half_width_x"), (half_width_v, "half_width_v")] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Grid(format!("{name} = {w} must be positive")));
            }
        }
        let total = points_x
            .checked_pow(n as u32)
            .and_then(|a| points_v.checked_pow(n as u32).and_then(|b| a.checked_mul(b)));
        if total.is_none() {
            return Err(Error::Grid("grid size overflows".into()));
        }
        Ok(PhaseGrid { n, points_x, points_v, half_width_x, half_width_v, radix })
    }

    pub fn x_axis(&self) -> Axis {
        Axis { points: self.points_x, half_width: self.half_width_x }
    }

    pub fn v_axis(&self) -> Axis {
        Axis { points: self.points_v, half_width: self.half_width_v }
    }

    /// The `2n` axes in storage order.
    pub fn axes(&self) -> Vec<Axis> {
        let mut a = vec![self.x_axis(); self.n];
        a.extend(std::iter::repeat_n(self.v_axis(), self.n));
        a
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes().iter().map(|a| a.points).collect()
    }

    /// Number of spatial cells, `N_x^n`.
    pub fn x_len(&self) -> usize {
        self.points_x.pow(self.n as u32)
    }

    /// Number of velocity cells, `N_v^n`.
    pub fn v_len(&self) -> usize {
        self.points_v.pow(self.n as u32)
    }

    pub fn len(&self) -> usize {
        self.x_len() * self.v_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial cell volume `(2L_x/N_x)^n`.
    pub fn dx(&self) -> f64 {
        self.x_axis().spacing().powi(self.n as i32)
    }

    /// Velocity cell volume `(2L_v/N_v)^n`.
    pub fn dv(&self) -> f64 {
        self.v_axis().spacing().powi(self.n as i32)
    }

    /// Spatial frequency cell volume `(π/L_x)^n`.
    pub fn dxi(&self) -> f64 {
        self.x_axis().frequency_spacing().powi(self.n as i32)
    }

    pub fn deta(&self) -> f64 {
        self.v_axis().frequency_spacing().powi(self.n as i32)
    }

    /// Spatial coordinates of flat spatial index `ix`.
    pub fn x_point(&self, ix: usize, out: &mut [f64]) {
        let ax = self.x_axis();
        decode(ix, self.points_x, out.len(), |d, j| out[d] = ax.coordinate(j));
    }

    pub fn v_point(&self, iv: usize, out: &mut [f64]) {
        let ax = self.v_axis();
        decode(iv, self.points_v, out.len(), |d, j| out[d] = ax.coordinate(j));
    }

    /// Same cells, velocity box enlarged `factor` times with zero padding room.
    pub fn with_velocity_padding(&self, factor: usize) -> Result<PhaseGrid> {
        if factor == 0 {
            return Err(Error::Grid("padding factor must be positive".into()));
        }
        PhaseGrid::new(
            self.n,
            self.points_x,
            self.points_v * factor,
            self.half_width_x,
            self.half_width_v * factor as f64,
            self.radix,
        )
    }

    /// Spatial part as a list of `n` axes.
    pub fn spatial_axes(&self) -> Vec<Axis> {
        vec![self.x_axis(); self.n]
    }
}

/// Calls `put(d, j)` with the base-`base` digits of `idx`, most significant first.
pub(crate) fn decode(mut idx: usize, base: usize, digits: usize, mut put: impl FnMut(usize, usize)) {
    for d in (0..digits).rev() {
        put(d, idx % base);
        idx /= base;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lattice_arithmetic() {
        let g = make_grid(1, 8, 8, PI, PI).unwrap();
        assert!((g.dx() - PI / 4.0).abs() < 1e-15);
        assert!((g.dv() - PI / 4.0).abs() < 1e-15);
        let mut modes: Vec<i64> = (0..8).map(|k| g.x_axis().mode(k)).collect();
        modes.sort();
        assert_eq!(modes, (-4..=3).collect::<Vec<_>>());
    }

    #[test]
    fn two_dimensional_cell_volume() {
        let g = make_grid(2, 64, 64, 12.0, 6.0).unwrap();
        assert!((g.dx() - (24.0f64 / 64.0).powi(2)).abs() < 1e-15);
        assert!((g.dx() * g.x_len() as f64 - 24f64.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn strict_mode_rejects_non_power_of_two() {
        assert!(make_grid(1, 6, 8, 1.0, 1.0).is_err());
        assert!(PhaseGrid::new(1, 6, 8, 1.0, 1.0, Radix::Mixed).is_ok());
        assert!(PhaseGrid::new(1, 5, 8, 1.0, 1.0, Radix::Mixed).is_err());
        assert!(make_grid(1, 2, 8, 1.0, 1.0).is_err());
        assert!(make_grid(1, 8, 8, 0.0, 1.0).is_err());
    }

    #[test]
    fn lattice_symmetric_up_to_nyquist() {
        let a = Axis { points: 16, half_width: 3.0 };
        let f = a.frequencies();
        for k in 1..16 {
            if a.is_nyquist(k) {
                continue;
            }
            assert!(f.iter().any(|&g| (g + f[k]).abs() < 1e-12));
        }
        assert_eq!(a.mode(8), -8);
    }

    #[test]
    fn padding_keeps_cells() {
        let g = make_grid(1, 16, 16, 2.0, 3.0).unwrap();
        let p = g.with_velocity_padding(4).unwrap();
        assert!((p.v_axis().spacing() - g.v_axis().spacing()).abs() < 1e-15);
        assert_eq!(p.points_v, 64);
    }
}
