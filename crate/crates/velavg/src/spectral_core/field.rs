use num_complex::Complex64;

use super::fft::{for_each_mode, forward_axes, inverse_axes, nyquist_average};
use super::grid::{decode, Axis, PhaseGrid};
use crate::error::{Error, Result};
use crate::tolerances;

/// Real multiplier `m(ξ, η)` evaluated pointwise on frequency lattices.
pub trait Symbol: Send + Sync {
    fn eval(&self, xi: &[f64], eta: &[f64]) -> f64;

    /// Whether evaluated values are real; all families shipped here are.
    fn is_real(&self) -> bool {
        true
    }
}

impl<F> Symbol for F
where
    F: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, xi: &[f64], eta: &[f64]) -> f64 {
        self(xi, eta)
    }
}

/// Samples of `f(x, v)` at the cell centres of a [`PhaseGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: PhaseGrid,
    samples: Vec<Complex64>,
}

/// Continuum-scaled transform coefficients `f̂(ξ, η)` in DFT index order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: PhaseGrid,
    coeffs: Vec<Complex64>,
}

/// Samples of a function of `x` alone, e.g. a velocity average.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialField {
    pub n: usize,
    pub axis: Axis,
    pub values: Vec<Complex64>,
}

fn check_finite(values: &[Complex64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite(format!("{what} sample {i}")));
    }
    Ok(())
}

impl Field {
    pub fn new(grid: PhaseGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Grid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        check_finite(&samples, "field")?;
        Ok(Field { grid, samples })
    }

    pub fn zeros(grid: PhaseGrid) -> Self {
        Field { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f(x, v)` at every cell centre.
    pub fn from_fn(grid: PhaseGrid, f: impl Fn(&[f64], &[f64]) -> Complex64) -> Result<Self> {
        let n = grid.n;
        let mut x = vec![0.0; n];
        let mut v = vec![0.0; n];
        let vl = grid.v_len();
        let mut samples = Vec::with_capacity(grid.len());
        for ix in 0..grid.x_len() {
            grid.x_point(ix, &mut x);
            for iv in 0..vl {
                grid.v_point(iv, &mut v);
                samples.push(f(&x, &v));
            }
        }
        Field::new(grid, samples)
    }

    pub fn from_real_fn(grid: PhaseGrid, f: impl Fn(&[f64], &[f64]) -> f64) -> Result<Self> {
        Field::from_fn(grid, |x, v| Complex64::new(f(x, v), 0.0))
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Sample at spatial index `ix` and velocity index `iv`.
    pub fn at(&self, ix: usize, iv: usize) -> Complex64 {
        self.samples[ix * self.grid.v_len() + iv]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field { grid: self.grid, samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    /// Pointwise map with access to the coordinates.
    pub fn map_with_coords(&self, f: impl Fn(&[f64], &[f64], Complex64) -> Complex64) -> Field {
        let g = self.grid;
        let mut x = vec![0.0; g.n];
        let mut v = vec![0.0; g.n];
        let vl = g.v_len();
        let mut out = Vec::with_capacity(g.len());
        for ix in 0..g.x_len() {
            g.x_point(ix, &mut x);
            for iv in 0..vl {
                g.v_point(iv, &mut v);
                out.push(f(&x, &v, self.samples[ix * vl + iv]));
            }
        }
        Field { grid: g, samples: out }
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|z| z * s)
    }

    pub fn conj(&self) -> Field {
        self.map(|z| z.conj())
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, samples })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `⟨f, g⟩ = ∬ f ḡ dx dv` as a Riemann sum.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.dx() * self.grid.dv())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.dx() * self.grid.dv()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fraction of `Σ|f|²` carried by the outer `max(1, N_v/16)` cells of any velocity axis.
    pub fn velocity_shell_fraction(&self) -> f64 {
        let g = &self.grid;
        let w = (g.points_v / 16).max(1);
        let vl = g.v_len();
        let mut shell_flags = vec![false; vl];
        for (iv, flag) in shell_flags.iter_mut().enumerate() {
            decode(iv, g.points_v, g.n, |_, j| {
                if j < w || j >= g.points_v - w {
                    *flag = true;
                }
            });
        }
        let mut total = 0.0;
        let mut shell = 0.0;
        for (i, z) in self.samples.iter().enumerate() {
            let m = z.norm_sqr();
            total += m;
            if shell_flags[i % vl] {
                shell += m;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            shell / total
        }
    }

    /// Rejects fields whose velocity boundary shell carries mass above the limit.
    pub fn check_boundary_mass(&self) -> Result<()> {
        let ratio = self.velocity_shell_fraction();
        if ratio >= tolerances::BOUNDARY_MASS {
            return Err(Error::BoundaryMass { ratio, limit: tolerances::BOUNDARY_MASS });
        }
        Ok(())
    }

    /// Largest `|x_d|` and `|v_d|` over samples with `|f| > threshold · max|f|`.
    pub fn support_extent(&self, threshold: f64) -> (f64, f64) {
        let g = self.grid;
        let cut = threshold * self.max_abs();
        let vl = g.v_len();
        let xa = g.x_axis();
        let va = g.v_axis();
        let mut rx = 0.0f64;
        let mut rv = 0.0f64;
        for ix in 0..g.x_len() {
            let mut xmax = 0.0f64;
            decode(ix, g.points_x, g.n, |_, j| xmax = xmax.max(xa.coordinate(j).abs()));
            for iv in 0..vl {
                if self.samples[ix * vl + iv].norm() > cut {
                    rx = rx.max(xmax);
                    let mut vmax = 0.0f64;
                    decode(iv, g.points_v, g.n, |_, j| vmax = vmax.max(va.coordinate(j).abs()));
                    rv = rv.max(vmax);
                }
            }
        }
        (rx, rv)
    }

    /// Zero-extends the velocity box by `factor` (same cell size).
    pub fn pad_velocity(&self, factor: usize) -> Result<Field> {
        let g = self.grid;
        let pg = g.with_velocity_padding(factor)?;
        let offset = (factor - 1) * g.points_v / 2;
        let vl = g.v_len();
        let pvl = pg.v_len();
        let map: Vec<usize> = (0..vl)
            .map(|iv| {
                let mut digits = vec![0usize; g.n];
                decode(iv, g.points_v, g.n, |d, j| digits[d] = j + offset);
                digits.iter().fold(0usize, |acc, &j| acc * pg.points_v + j)
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); pg.len()];
        for ix in 0..g.x_len() {
            for iv in 0..vl {
                out[ix * pvl + map[iv]] = self.samples[ix * vl + iv];
            }
        }
        Ok(Field { grid: pg, samples: out })
    }

    /// Transform in `x` only; velocity stays physical. Layout is unchanged.
    pub fn x_spectrum(&self) -> Vec<Complex64> {
        let axes = self.grid.axes();
        let sel: Vec<bool> = (0..axes.len()).map(|d| d < self.grid.n).collect();
        let mut data = self.samples.clone();
        forward_axes(&mut data, &axes, &sel);
        data
    }

    /// Inverse of [`Field::x_spectrum`].
    pub fn from_x_spectrum(grid: PhaseGrid, mut data: Vec<Complex64>) -> Result<Field> {
        let axes = grid.axes();
        let sel: Vec<bool> = (0..axes.len()).map(|d| d < grid.n).collect();
        inverse_axes(&mut data, &axes, &sel);
        Field::new(grid, data)
    }
}

impl SpectralField {
    pub fn new(grid: PhaseGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Grid(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        check_finite(&coeffs, "spectrum")?;
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Multiplies by a complex symbol, averaging over Nyquist aliases.
    pub fn map_modes(&self, mut m: impl FnMut(&[f64], &[f64]) -> Complex64) -> Result<SpectralField> {
        let n = self.grid.n;
        let mut out = self.coeffs.clone();
        let mut scratch = Vec::with_capacity(2 * n);
        let mut bad = None;
        for_each_mode(&self.grid.axes(), |flat, k, nyq| {
            let val = nyquist_average(k, nyq, &mut scratch, |kk| m(&kk[..n], &kk[n..]));
            if !(val.re.is_finite() && val.im.is_finite()) && bad.is_none() {
                bad = Some(k.to_vec());
            }
            out[flat] *= val;
        });
        if let Some(k) = bad {
            return Err(Error::NonFinite(format!("symbol at lattice point {k:?}")));
        }
        Ok(SpectralField { grid: self.grid, coeffs: out })
    }

    /// `(2π)^{-2n} Σ |f̂|² dξ dη`.
    pub fn l2_norm(&self) -> f64 {
        let g = &self.grid;
        let s: f64 = self.coeffs.iter().map(|z| z.norm_sqr()).sum();
        let w = g.dxi() * g.deta() / (2.0 * std::f64::consts::PI).powi(2 * g.n as i32);
        (s * w).sqrt()
    }
}

pub fn forward_transform(field: &Field) -> SpectralField {
    let axes = field.grid.axes();
    let mut data = field.samples.clone();
    forward_axes(&mut data, &axes, &vec![true; axes.len()]);
    SpectralField { grid: field.grid, coeffs: data }
}

pub fn inverse_transform(spec: &SpectralField) -> Field {
    let axes = spec.grid.axes();
    let mut data = spec.coeffs.clone();
    inverse_axes(&mut data, &axes, &vec![true; axes.len()]);
    Field { grid: spec.grid, samples: data }
}

/// Coefficientwise product `m(ξ, η) f̂(ξ, η)`.
pub fn apply_multiplier(spec: &SpectralField, symbol: &dyn Symbol) -> Result<SpectralField> {
    spec.map_modes(|xi, eta| Complex64::new(symbol.eval(xi, eta), 0.0))
}

/// `m(D) f` in physical space.
pub fn multiply(field: &Field, symbol: &dyn Symbol) -> Result<Field> {
    Ok(inverse_transform(&apply_multiplier(&forward_transform(field), symbol)?))
}

/// `∂_{x_j} f` via the spectral derivative in `x`.
pub fn x_derivative(field: &Field, j: usize) -> Result<Field> {
    let g = *field.grid();
    if j >= g.n {
        return Err(Error::Parameter(format!("axis {j} out of range for n = {}", g.n)));
    }
    let mut data = field.x_spectrum();
    let xa = g.x_axis();
    let vl = g.v_len();
    for ix in 0..g.x_len() {
        let mut kj = 0.0;
        decode(ix, g.points_x, g.n, |d, k| {
            if d == j {
                kj = if xa.is_nyquist(k) { 0.0 } else { xa.frequency(k) };
            }
        });
        let c = Complex64::new(0.0, kj);
        for z in &mut data[ix * vl..(ix + 1) * vl] {
            *z *= c;
        }
    }
    Field::from_x_spectrum(g, data)
}

/// Transport operator `v·∇_x f`: spectral derivative in `x`, pointwise product in `v`.
pub fn apply_transport(field: &Field) -> Result<Field> {
    field.check_boundary_mass()?;
    transport_unchecked(field)
}

pub(crate) fn transport_unchecked(field: &Field) -> Result<Field> {
    let g = *field.grid();
    let n = g.n;
    let spec = field.x_spectrum();
    let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
    let xa = g.x_axis();
    let vl = g.v_len();
    let mut xi = vec![0.0; n];
    let mut v = vec![0.0; n];
    let vpts: Vec<Vec<f64>> = (0..vl)
        .map(|iv| {
            g.v_point(iv, &mut v);
            v.clone()
        })
        .collect();
    for ix in 0..g.x_len() {
        decode(ix, g.points_x, n, |d, k| xi[d] = if xa.is_nyquist(k) { 0.0 } else { xa.frequency(k) });
        for iv in 0..vl {
            let vxi: f64 = vpts[iv].iter().zip(&xi).map(|(a, b)| a * b).sum();
            out[ix * vl + iv] = spec[ix * vl + iv] * Complex64::new(0.0, vxi);
        }
    }
    Field::from_x_spectrum(g, out)
}

/// `f̃(x) = Σ_v f(x, v) dv`.
pub fn velocity_average(field: &Field) -> SpatialField {
    let g = field.grid();
    let vl = g.v_len();
    let dv = g.dv();
    let values = field.samples.chunks(vl).map(|row| row.iter().sum::<Complex64>() * dv).collect();
    SpatialField { n: g.n, axis: g.x_axis(), values }
}

/// The `η = 0` slice of `f̂`, indexed like the spatial DFT.
pub fn average_spectrum_trace(spec: &SpectralField) -> Vec<Complex64> {
    let vl = spec.grid.v_len();
    spec.coeffs.chunks(vl).map(|row| row[0]).collect()
}

impl SpatialField {
    pub fn from_fn(n: usize, axis: Axis, f: impl Fn(&[f64]) -> Complex64) -> SpatialField {
        let len = axis.points.pow(n as u32);
        let mut x = vec![0.0; n];
        let values = (0..len)
            .map(|i| {
                decode(i, axis.points, n, |d, j| x[d] = axis.coordinate(j));
                f(&x)
            })
            .collect();
        SpatialField { n, axis, values }
    }

    pub fn axes(&self) -> Vec<Axis> {
        vec![self.axis; self.n]
    }

    pub fn cell_volume(&self) -> f64 {
        self.axis.spacing().powi(self.n as i32)
    }

    pub fn frequency_cell(&self) -> f64 {
        self.axis.frequency_spacing().powi(self.n as i32)
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        let axes = self.axes();
        let mut data = self.values.clone();
        forward_axes(&mut data, &axes, &vec![true; self.n]);
        data
    }

    pub fn from_spectrum(n: usize, axis: Axis, mut data: Vec<Complex64>) -> SpatialField {
        let axes = vec![axis; n];
        inverse_axes(&mut data, &axes, &vec![true; n]);
        SpatialField { n, axis, values: data }
    }

    /// Applies a radial-in-`ξ` weight `w(ξ)` with Nyquist averaging.
    pub fn apply_weight(&self, w: impl Fn(&[f64]) -> f64) -> SpatialField {
        let mut spec = self.spectrum();
        let mut scratch = Vec::new();
        for_each_mode(&self.axes(), |flat, k, nyq| {
            spec[flat] *= nyquist_average(k, nyq, &mut scratch, &w);
        });
        SpatialField::from_spectrum(self.n, self.axis, spec)
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let dx = self.cell_volume();
        if p.is_infinite() {
            return self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let s: f64 = self.values.iter().map(|z| z.norm().powf(p)).sum();
        (s * dx).powf(1.0 / p)
    }

    /// Coordinates of flat index `i`.
    pub fn point(&self, i: usize, out: &mut [f64]) {
        decode(i, self.axis.points, self.n, |d, j| out[d] = self.axis.coordinate(j));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::make_grid;
    use std::f64::consts::PI;

    fn gaussian(grid: PhaseGrid) -> Field {
        Field::from_real_fn(grid, |x, v| (-x[0] * x[0] - v[0] * v[0]).exp()).unwrap()
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = make_grid(1, 256, 256, 12.0, 12.0).unwrap();
        let s = forward_transform(&gaussian(g));
        let mut worst = 0.0f64;
        for_each_mode(&g.axes(), |flat, k, _| {
            let exact = PI * (-(k[0] * k[0] + k[1] * k[1]) / 4.0).exp();
            let err = (s.coeffs()[flat] - exact).norm() / PI;
            worst = worst.max(err);
        });
        assert!(worst <= 1e-8, "max relative error {worst:e}");
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = make_grid(1, 16, 16, 3.0, 3.0).unwrap();
        let s = forward_transform(&Field::zeros(g));
        assert!(s.coeffs().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn transport_of_gaussian() {
        let g = make_grid(1, 256, 256, 12.0, 12.0).unwrap();
        let t = apply_transport(&gaussian(g)).unwrap();
        let exact = Field::from_real_fn(g, |x, v| -2.0 * x[0] * v[0] * (-x[0] * x[0] - v[0] * v[0]).exp()).unwrap();
        let err = t.sub(&exact).unwrap().max_abs();
        assert!(err <= 1e-8, "{err:e}");
    }

    #[test]
    fn transport_rejects_mass_on_velocity_boundary() {
        let g = make_grid(1, 32, 32, 4.0, 2.0).unwrap();
        let f = Field::from_real_fn(g, |x, _| (-x[0] * x[0]).exp()).unwrap();
        assert!(matches!(apply_transport(&f), Err(Error::BoundaryMass { .. })));
    }

    #[test]
    fn trace_of_gaussian() {
        let g = make_grid(1, 128, 128, 10.0, 10.0).unwrap();
        let tr = average_spectrum_trace(&forward_transform(&gaussian(g)));
        let xa = g.x_axis();
        for (k, z) in tr.iter().enumerate() {
            let xi = xa.frequency(k);
            let exact = PI.sqrt() * (-xi * xi / 4.0).exp() * PI.sqrt();
            assert!((z - exact).norm() <= 1e-8 * PI, "k={k}");
        }
    }

    #[test]
    fn separable_average() {
        let g = make_grid(1, 32, 64, 4.0, 6.0).unwrap();
        let f = Field::from_real_fn(g, |x, v| (x[0]).cos() * (-v[0] * v[0]).exp()).unwrap();
        let avg = velocity_average(&f);
        let hsum: f64 = g.v_axis().coordinates().iter().map(|v| (-v * v).exp()).sum::<f64>() * g.dv();
        for (i, z) in avg.values.iter().enumerate() {
            let x = g.x_axis().coordinate(i);
            assert!((z.re - x.cos() * hsum).abs() < 1e-12);
        }
    }

    #[test]
    fn padding_preserves_values() {
        let g = make_grid(2, 8, 8, 3.0, 3.0).unwrap();
        let f = Field::from_real_fn(g, |x, v| x[0] + 2.0 * x[1] + 3.0 * v[0] - v[1]).unwrap();
        let p = f.pad_velocity(2).unwrap();
        let back = Field::from_fn(*p.grid(), |x, v| {
            let inside = v.iter().all(|c| c.abs() < 3.0);
            if inside {
                Complex64::new(x[0] + 2.0 * x[1] + 3.0 * v[0] - v[1], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap();
        assert!(p.sub(&back).unwrap().max_abs() < 1e-12);
    }
}
