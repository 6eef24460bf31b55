//! Axis-wise DFTs with the continuum scaling of the library's convention.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Axis;

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("plan cache poisoned").get(&(len, forward)) {
        return Arc::clone(p);
    }
    let mut planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new())).lock().expect("planner poisoned");
    let p = if forward { planner.plan_fft_forward(len) } else { planner.plan_fft_inverse(len) };
    cache.lock().expect("plan cache poisoned").insert((len, forward), Arc::clone(&p));
    p
}

/// Unnormalised DFT along `axis` of a row-major array of the given shape.
pub(crate) fn dft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, forward: bool) {
    let m = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let fft = plan(m, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    if inner == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    // Gather a batch of columns at a time so reads stay contiguous.
    const BATCH: usize = 32;
    let slab = m * inner;
    let mut buf = vec![Complex64::new(0.0, 0.0); BATCH.min(inner) * m];
    for block in data.chunks_mut(slab) {
        let mut i0 = 0;
        while i0 < inner {
            let b = BATCH.min(inner - i0);
            for j in 0..m {
                let src = &block[j * inner + i0..j * inner + i0 + b];
                for (i, z) in src.iter().enumerate() {
                    buf[i * m + j] = *z;
                }
            }
            fft.process_with_scratch(&mut buf[..b * m], &mut scratch);
            for j in 0..m {
                let dst = &mut block[j * inner + i0..j * inner + i0 + b];
                for (i, z) in dst.iter_mut().enumerate() {
                    *z = buf[i * m + j];
                }
            }
            i0 += b;
        }
    }
}

/// Multiplies entries along `axis` by `factors[k]`.
pub(crate) fn scale_axis(data: &mut [Complex64], shape: &[usize], axis: usize, factors: &[Complex64]) {
    let m = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    for block in data.chunks_mut(m * inner) {
        for (j, row) in block.chunks_mut(inner).enumerate() {
            let c = factors[j];
            for z in row {
                *z *= c;
            }
        }
    }
}

/// `h e^{iξ_k(L - h/2)}`: turns DFT output into the Riemann sum of `∫ f e^{-iξx} dx`.
pub(crate) fn forward_factors(axis: &Axis) -> Vec<Complex64> {
    let h = axis.spacing();
    let n = axis.points as f64;
    (0..axis.points)
        .map(|k| {
            let m = axis.mode(k);
            let parity = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(h * parity, -(m as f64) * PI / n)
        })
        .collect()
}

/// Inverse of [`forward_factors`] combined with the `1/N` of the inverse DFT.
pub(crate) fn inverse_factors(axis: &Axis) -> Vec<Complex64> {
    let h = axis.spacing();
    let n = axis.points as f64;
    forward_factors(axis).into_iter().map(|c| c.conj() / (h * h * n)).collect()
}

/// Continuum-scaled forward transform along the selected axes.
pub(crate) fn forward_axes(data: &mut [Complex64], axes: &[Axis], selected: &[bool]) {
    let shape: Vec<usize> = axes.iter().map(|a| a.points).collect();
    for (d, axis) in axes.iter().enumerate() {
        if selected[d] {
            dft_axis(data, &shape, d, true);
            scale_axis(data, &shape, d, &forward_factors(axis));
        }
    }
}

/// Continuum-scaled inverse transform along the selected axes.
pub(crate) fn inverse_axes(data: &mut [Complex64], axes: &[Axis], selected: &[bool]) {
    let shape: Vec<usize> = axes.iter().map(|a| a.points).collect();
    for (d, axis) in axes.iter().enumerate() {
        if selected[d] {
            scale_axis(data, &shape, d, &inverse_factors(axis));
            dft_axis(data, &shape, d, false);
        }
    }
}

/// Visits every lattice point of `axes` in storage order with its frequency
/// vector and per-axis Nyquist flags.
pub(crate) fn for_each_mode(axes: &[Axis], mut visit: impl FnMut(usize, &[f64], &[bool])) {
    let d = axes.len();
    let freqs: Vec<Vec<f64>> = axes.iter().map(|a| a.frequencies()).collect();
    let total: usize = axes.iter().map(|a| a.points).product();
    let mut idx = vec![0usize; d];
    let mut k = vec![0.0; d];
    let mut nyq = vec![false; d];
    for (a, ax) in axes.iter().enumerate() {
        k[a] = freqs[a][0];
        nyq[a] = ax.is_nyquist(0);
    }
    for flat in 0..total {
        visit(flat, &k, &nyq);
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < axes[a].points {
                k[a] = freqs[a][idx[a]];
                nyq[a] = axes[a].is_nyquist(idx[a]);
                break;
            }
            idx[a] = 0;
            k[a] = freqs[a][0];
            nyq[a] = axes[a].is_nyquist(0);
        }
    }
}

/// Evaluates `eval` at a lattice point, averaging over the two aliases `±ξ_N`
/// of every Nyquist coordinate. For sign-type symbols this realises `sign = 0`
/// at the unpaired mode; for even real symbols it keeps real fields real.
pub(crate) fn nyquist_average<T>(
    k: &[f64],
    nyquist: &[bool],
    scratch: &mut Vec<f64>,
    mut eval: impl FnMut(&[f64]) -> T,
) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let flagged: Vec<usize> = (0..k.len()).filter(|&a| nyquist[a]).collect();
    if flagged.is_empty() {
        return eval(k);
    }
    scratch.clear();
    scratch.extend_from_slice(k);
    let combos = 1usize << flagged.len();
    let mut acc: Option<T> = None;
    for mask in 0..combos {
        for (b, &a) in flagged.iter().enumerate() {
            scratch[a] = if mask >> b & 1 == 1 { -k[a] } else { k[a] };
        }
        let v = eval(scratch);
        acc = Some(match acc {
            None => v,
            Some(s) => s + v,
        });
    }
    acc.expect("at least one alias") * (1.0 / combos as f64)
}
