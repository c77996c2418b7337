//! Reference initial data.
//!
//! Deterministic initial fields used by the experiments and the test suite:
//! a seven-circle phase arrangement with smooth interior bump profiles, a
//! sharp disk indicator, seeded random band-limited fields, and seeded
//! random ternary states on the simplex.

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::propagators::TernaryState;
use crate::rng::SplitMix64;
use crate::spectral::{Coeffs, Spectrum};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A circle given by its center and radius.
#[derive(Clone, Copy, Debug)]
pub struct CircleSpec {
    /// Center x coordinate.
    pub cx: f64,
    /// Center y coordinate.
    pub cy: f64,
    /// Radius.
    pub r: f64,
}

/// The seven-circle arrangement used as the standard curvature-flow
/// initial condition.
pub const SEVEN_CIRCLES: [CircleSpec; 7] = [
    CircleSpec { cx: PI / 2.0, cy: PI / 2.0, r: PI / 5.0 },
    CircleSpec { cx: PI / 4.0, cy: 3.0 * PI / 4.0, r: 2.0 * PI / 15.0 },
    CircleSpec { cx: PI / 2.0, cy: 5.0 * PI / 4.0, r: 2.0 * PI / 15.0 },
    CircleSpec { cx: PI, cy: PI / 4.0, r: PI / 10.0 },
    CircleSpec { cx: 3.0 * PI / 2.0, cy: PI / 4.0, r: PI / 10.0 },
    CircleSpec { cx: PI, cy: PI, r: PI / 4.0 },
    CircleSpec { cx: 3.0 * PI / 2.0, cy: 3.0 * PI / 2.0, r: PI / 4.0 },
];

/// Pointwise value of the seven-circle field: `−1` outside every circle,
/// and inside a circle each overlap adds `2·exp(−ε²/s²)` where
/// `s = dist − r < 0` is the signed distance to that circle's rim, giving a
/// smooth bump that equals `+1`-ish plateaus deep inside.
pub fn seven_circles_value(x: f64, y: f64, eps: f64) -> f64 {
    let mut u = -1.0;
    for c in &SEVEN_CIRCLES {
        let dx = x - c.cx;
        let dy = y - c.cy;
        let s = (dx * dx + dy * dy).sqrt() - c.r;
        if s < 0.0 {
            u += 2.0 * (-(eps * eps) / (s * s)).exp();
        }
    }
    u
}

/// The seven-circle field sampled on `grid`. Its max-norm never exceeds 1
/// (each bump contributes at most 2 on disjoint interiors, on top of −1).
pub fn seven_circles(grid: Grid, eps: f64) -> Field {
    assert!(eps > 0.0, "seven_circles needs eps > 0");
    Field::from_fn(grid, |x, y| seven_circles_value(x, y, eps))
}

/// Indicator-like disk: `0.25` inside the closed disk of squared radius
/// `1.2` centered at `(π, π)`, `−0.25` outside. The range is exactly
/// `{−0.25, 0.25}`.
pub fn disk_indicator(grid: Grid) -> Field {
    Field::from_fn(grid, |x, y| {
        let dx = x - PI;
        let dy = y - PI;
        if dx * dx + dy * dy <= 1.2 {
            0.25
        } else {
            -0.25
        }
    })
}

/// Seeded random ternary state: at every node three uniforms are drawn
/// (node-major, component-minor order) and normalized by their sum, so the
/// state lies exactly on the simplex. A zero sum (probability zero) is
/// guarded by resampling that node.
pub fn random_ternary(grid: Grid, seed: u64) -> TernaryState {
    let mut rng = SplitMix64::new(seed);
    let n = grid.len();
    let mut data = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for _ in 0..n {
        loop {
            let p = [rng.next_f64(), rng.next_f64(), rng.next_f64()];
            let s = p[0] + p[1] + p[2];
            if s > 0.0 {
                for l in 0..3 {
                    data[l].push(p[l] / s);
                }
                break;
            }
        }
    }
    let mut it = data.into_iter();
    TernaryState::new(
        Field::from_data(grid, it.next().unwrap()).expect("sized to grid"),
        Field::from_data(grid, it.next().unwrap()).expect("sized to grid"),
        Field::from_data(grid, it.next().unwrap()).expect("sized to grid"),
    )
    .expect("components share the grid")
}

/// Seeded random band-limited field: coefficients of the lowest
/// `max_mode × max_mode` modes are drawn uniformly from `[−1, 1)` (row-major
/// over `(l, k)`), synthesized, and rescaled so the max-norm equals
/// `amplitude` (a zero synthesis, e.g. `amplitude = 0`, yields the zero
/// field). Requires `max_mode < min(nx, ny)/2` so the band sits strictly
/// inside the resolved spectrum.
pub fn random_bandlimited(grid: Grid, seed: u64, max_mode: usize, amplitude: f64) -> Result<Field> {
    if max_mode >= grid.nx().min(grid.ny()) / 2 {
        return Err(Error::Precondition(format!(
            "random_bandlimited requires max_mode < min(nx, ny)/2 = {}, got {max_mode}",
            grid.nx().min(grid.ny()) / 2
        )));
    }
    if !(amplitude >= 0.0) {
        return Err(Error::Precondition(format!(
            "random_bandlimited requires amplitude >= 0, got {amplitude}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut s = Spectrum::zeros(grid);
    match s.coeffs_mut() {
        Coeffs::Cosine(a) => {
            let nx = grid.nx();
            for l in 0..max_mode {
                for k in 0..max_mode {
                    a[l * nx + k] = 2.0 * rng.next_f64() - 1.0;
                }
            }
        }
        Coeffs::HalfComplex(c) => {
            let nxh = grid.nx() / 2 + 1;
            for l in 0..max_mode {
                for k in 0..max_mode {
                    c[l * nxh + k] = Complex64::new(2.0 * rng.next_f64() - 1.0, 0.0);
                }
            }
        }
    }
    let mut v = crate::spectral::inverse(&s);
    let m = v.max_norm();
    if m > 0.0 {
        v.scale(amplitude / m);
    }
    Ok(v)
}
