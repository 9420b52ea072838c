//! Two-dimensional complex FFT on row-major `ny x nx` buffers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use super::TorusGrid;
use crate::exec;

type Plan = Arc<dyn Fft<f64>>;

static PLANS: Lazy<Mutex<HashMap<(usize, bool), Plan>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, inverse: bool) -> Plan {
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    exec::collect_indexed(rows * cols, |k| {
        let (r, c) = (k % rows, k / rows);
        data[r * cols + c]
    })
}

fn transform(grid: &TorusGrid, data: &mut Vec<Complex64>, inverse: bool) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let row_plan = plan(nx, inverse);
    exec::for_each_row(data, nx, |_, row| row_plan.process(row));
    let mut cols = transpose(data, ny, nx);
    let col_plan = plan(ny, inverse);
    exec::for_each_row(&mut cols, ny, |_, col| col_plan.process(col));
    *data = transpose(&cols, nx, ny);
}

/// Forward transform (unnormalized).
pub(crate) fn forward(grid: &TorusGrid, mut data: Vec<Complex64>) -> Vec<Complex64> {
    transform(grid, &mut data, false);
    data
}

/// Inverse transform including the `1 / (nx ny)` factor.
pub(crate) fn inverse(grid: &TorusGrid, mut data: Vec<Complex64>) -> Vec<Complex64> {
    transform(grid, &mut data, true);
    let norm = 1.0 / grid.len() as f64;
    exec::for_each_row(&mut data, grid.nx(), |_, row| row.iter_mut().for_each(|v| *v *= norm));
    data
}

/// Signed integer frequency of FFT bin `i` out of `n`; the Nyquist bin maps to `-n/2`.
#[inline]
pub(crate) fn frequency(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Multiplies every Fourier coefficient by `symbol(fx, fy)` where `fx, fy`
/// are the signed integer frequencies.
pub(crate) fn apply_symbol<S>(grid: &TorusGrid, data: Vec<Complex64>, symbol: S) -> Vec<Complex64>
where
    S: Fn(i64, i64) -> Complex64 + Send + Sync,
{
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut coef = forward(grid, data);
    exec::for_each_row(&mut coef, nx, |iy, row| {
        let fy = frequency(iy, ny);
        for (ix, v) in row.iter_mut().enumerate() {
            *v *= symbol(frequency(ix, nx), fy);
        }
    });
    inverse(grid, coef)
}
