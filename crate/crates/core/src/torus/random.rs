use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{RealField, TorusGrid};

/// Band-limited random field `Σ a_{km} cos(2π(kx/lx + my/ly) + θ_{km})` over
/// `|k|, |m| ≤ max_mode`, with amplitudes decaying like `1/(1 + k² + m²)` and
/// scaled so that the sup norm is at most `amplitude`. The constant mode is
/// excluded, so the field has zero mean.
pub fn random_smooth(grid: TorusGrid, max_mode: i32, amplitude: f64, seed: u64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for k in 0..=max_mode {
        for m in -max_mode..=max_mode {
            if k == 0 && m <= 0 {
                continue;
            }
            let a: f64 = rng.gen_range(-1.0..1.0) / (1.0 + (k * k + m * m) as f64);
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            modes.push((k as f64, m as f64, a, phase));
        }
    }
    let total: f64 = modes.iter().map(|m| m.2.abs()).sum();
    let scale = if total > 0.0 { amplitude / total } else { 0.0 };
    let (lx, ly) = (grid.lx(), grid.ly());
    RealField::from_fn(grid, move |x, y| {
        modes
            .iter()
            .map(|&(k, m, a, ph)| a * (2.0 * PI * (k * x / lx + m * y / ly) + ph).cos())
            .sum::<f64>()
            * scale
    })
}
