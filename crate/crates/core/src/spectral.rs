//! Fast transforms and spectral mode algebra.
//!
//! On Neumann grids a field is expanded in the half-integer cosine basis
//! `cos(k·x/2)·cos(l·y/2)`, `k, l ≥ 0`, which satisfies the no-flux boundary
//! condition exactly; the coefficients are computed by a fast cosine
//! transform realized through a same-length complex FFT (the classic
//! even-odd reindexing with quarter-wave twiddles). On periodic grids the
//! basis is `exp(i(k·x + l·y))` and the transform is a real-input FFT stored
//! in half-spectrum form: only `k = 0..=nx/2` columns are kept, the missing
//! half being determined by conjugate symmetry.
//!
//! Coefficient layout:
//!
//! - Cosine: `a[l*nx + k]` is the coefficient of `cos(k·x/2)·cos(l·y/2)`,
//!   normalized so `a[0]` is the field mean and interior coefficients carry
//!   the factor-2 convention per axis (`v_i = a_0 + Σ a_k cos(...)`).
//! - Half-complex: `c[l*(nx/2+1) + k]` is the coefficient of
//!   `exp(i(k·x + ŝ(l)·y))` where `ŝ(l)` is the signed row frequency (`l`
//!   for `l ≤ ny/2`, else `l − ny`), normalized by `1/(nx·ny)` so that a
//!   plain synthesis sum reproduces the field.
//!
//! Each mode carries a Laplacian symbol `μ = −(wx² + wy²)` with `wx = k/2`
//! (Neumann) or `wx = k` (periodic); diagonal operators are applied by
//! multiplying coefficients with a function of `μ` or with separable
//! per-axis factors. FFT plans are cached per length in thread-local
//! storage, so repeated transforms of the same size reuse their twiddles.

use crate::grid::{pairwise_sum, Boundary, Field, Grid};
pub use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;
use std::sync::Arc;

/// Spectral coefficients in the layout matching the grid's boundary.
#[derive(Clone, Debug)]
pub enum Coeffs {
    /// Cosine coefficients, `a[l*nx + k]`, all real.
    Cosine(Vec<f64>),
    /// Half-spectrum Fourier coefficients, `c[l*(nx/2+1) + k]`.
    HalfComplex(Vec<Complex64>),
}

/// A field in spectral representation.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Coeffs,
}

impl Spectrum {
    /// The all-zero spectrum for `grid`.
    pub fn zeros(grid: Grid) -> Self {
        let coeffs = match grid.boundary() {
            Boundary::Neumann => Coeffs::Cosine(vec![0.0; grid.nx() * grid.ny()]),
            Boundary::Periodic => {
                Coeffs::HalfComplex(vec![Complex64::default(); (grid.nx() / 2 + 1) * grid.ny()])
            }
        };
        Self { grid, coeffs }
    }

    /// The grid this spectrum belongs to.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Coefficient storage.
    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    /// Mutable coefficient storage.
    pub fn coeffs_mut(&mut self) -> &mut Coeffs {
        &mut self.coeffs
    }

    /// Multiplies every coefficient by `f(μ)`, where `μ` is the Laplacian
    /// symbol of its mode. This applies the diagonal operator `f(Δ)`.
    pub fn apply_symbol(&mut self, f: impl Fn(f64) -> f64) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        match &mut self.coeffs {
            Coeffs::Cosine(a) => {
                for l in 0..ny {
                    let wy = l as f64 / 2.0;
                    for k in 0..nx {
                        let wx = k as f64 / 2.0;
                        a[l * nx + k] *= f(-(wx * wx + wy * wy));
                    }
                }
            }
            Coeffs::HalfComplex(c) => {
                let nxh = nx / 2 + 1;
                for l in 0..ny {
                    let wy = signed_frequency(l, ny);
                    for k in 0..nxh {
                        let wx = k as f64;
                        c[l * nxh + k] *= f(-(wx * wx + wy * wy));
                    }
                }
            }
        }
    }

    /// Multiplies every coefficient by `fx(wx)·fy(wy)`. Equivalent to
    /// [`apply_symbol`](Self::apply_symbol) for separable symbols, but
    /// evaluates `fx`/`fy` only once per axis index.
    pub fn apply_separable(&mut self, fx: impl Fn(f64) -> f64, fy: impl Fn(f64) -> f64) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        match &mut self.coeffs {
            Coeffs::Cosine(a) => {
                let ex: Vec<f64> = (0..nx).map(|k| fx(k as f64 / 2.0)).collect();
                let ey: Vec<f64> = (0..ny).map(|l| fy(l as f64 / 2.0)).collect();
                for l in 0..ny {
                    let e = ey[l];
                    for k in 0..nx {
                        a[l * nx + k] *= ex[k] * e;
                    }
                }
            }
            Coeffs::HalfComplex(c) => {
                let nxh = nx / 2 + 1;
                let ex: Vec<f64> = (0..nxh).map(|k| fx(k as f64)).collect();
                let ey: Vec<f64> = (0..ny).map(|l| fy(signed_frequency(l, ny))).collect();
                for l in 0..ny {
                    let e = ey[l];
                    for k in 0..nxh {
                        c[l * nxh + k] *= ex[k] * e;
                    }
                }
            }
        }
    }

    /// Returns `Σ mass(k,l) · f(|wx|, |wy|) · |coeff|²` over all stored
    /// modes, where `mass` is the basis-function L² mass including the
    /// half-spectrum duplicity. With `f ≡ 1` this is the squared L² norm by
    /// Parseval. Summation is deterministic pairwise.
    pub fn mode_sum(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        match &self.coeffs {
            Coeffs::Cosine(a) => {
                let mut terms = Vec::with_capacity(nx * ny);
                for l in 0..ny {
                    let wy = l as f64 / 2.0;
                    let my = if l == 0 { 2.0 * PI } else { PI };
                    for k in 0..nx {
                        let wx = k as f64 / 2.0;
                        let mx = if k == 0 { 2.0 * PI } else { PI };
                        let v = a[l * nx + k];
                        terms.push(mx * my * f(wx, wy) * v * v);
                    }
                }
                pairwise_sum(&terms)
            }
            Coeffs::HalfComplex(c) => {
                let nxh = nx / 2 + 1;
                let mut terms = Vec::with_capacity(nxh * ny);
                for l in 0..ny {
                    let wy = signed_frequency(l, ny).abs();
                    for k in 0..nxh {
                        let dup = if k == 0 || k == nx / 2 { 1.0 } else { 2.0 };
                        let wx = k as f64;
                        terms.push(4.0 * PI * PI * dup * f(wx, wy) * c[l * nxh + k].norm_sqr());
                    }
                }
                pairwise_sum(&terms)
            }
        }
    }
}

/// Signed frequency of periodic row index `l`: `l` for `l ≤ ny/2`, else
/// `l − ny`.
pub fn signed_frequency(l: usize, ny: usize) -> f64 {
    if l <= ny / 2 {
        l as f64
    } else {
        l as f64 - ny as f64
    }
}

/// Per-axis frequencies `(|wx|, |wy|)` of the stored mode `(k, l)`.
pub fn mode_frequencies(grid: Grid, k: usize, l: usize) -> (f64, f64) {
    match grid.boundary() {
        Boundary::Neumann => (k as f64 / 2.0, l as f64 / 2.0),
        Boundary::Periodic => (k as f64, signed_frequency(l, grid.ny()).abs()),
    }
}

/// Laplacian symbol `μ = −(wx² + wy²)` of the stored mode `(k, l)`.
pub fn laplacian_symbol(grid: Grid, k: usize, l: usize) -> f64 {
    let (wx, wy) = mode_frequencies(grid, k, l);
    -(wx * wx + wy * wy)
}

/// L² mass of the stored mode `(k, l)`: the squared L² norm of its basis
/// function, times 2 for periodic modes stored once but present twice in
/// the full spectrum.
pub fn mode_mass(grid: Grid, k: usize, l: usize) -> f64 {
    match grid.boundary() {
        Boundary::Neumann => {
            let mx = if k == 0 { 2.0 * PI } else { PI };
            let my = if l == 0 { 2.0 * PI } else { PI };
            mx * my
        }
        Boundary::Periodic => {
            let dup = if k == 0 || k == grid.nx() / 2 { 1.0 } else { 2.0 };
            4.0 * PI * PI * dup
        }
    }
}

/// Weight `wx^(2·i1) · wy^(2·i2)` of the stored mode, the symbol of
/// `∂x^(2·i1) ∂y^(2·i2)` up to sign. `0^0 = 1`, so the `(0,0)` mode carries
/// weight 1 for `i1 = i2 = 0`.
pub fn derivative_weight(grid: Grid, k: usize, l: usize, i1: u32, i2: u32) -> f64 {
    let (wx, wy) = mode_frequencies(grid, k, l);
    (wx * wx).powi(i1 as i32) * (wy * wy).powi(i2 as i32)
}

// ---------------------------------------------------------------------------
// FFT plan cache
// ---------------------------------------------------------------------------

struct PlanSet {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Quarter-wave twiddles `exp(−iπk/(2n))`, `k = 0..n`.
    tw: Vec<Complex64>,
    scratch_len: usize,
}

struct PlanCache {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, Rc<PlanSet>>,
}

thread_local! {
    static PLAN_CACHE: RefCell<PlanCache> = RefCell::new(PlanCache {
        planner: FftPlanner::new(),
        plans: HashMap::new(),
    });
}

fn plan_for(n: usize) -> Rc<PlanSet> {
    PLAN_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(p) = cache.plans.get(&n) {
            return p.clone();
        }
        let fwd = cache.planner.plan_fft_forward(n);
        let inv = cache.planner.plan_fft_inverse(n);
        let tw = (0..n)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2.0 * n as f64)))
            .collect();
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let p = Rc::new(PlanSet { n, fwd, inv, tw, scratch_len });
        cache.plans.insert(n, p.clone());
        p
    })
}

// ---------------------------------------------------------------------------
// 1D cosine transforms via same-length complex FFT
// ---------------------------------------------------------------------------

/// Forward cosine analysis of one line of `n` midpoint samples. Writes the
/// normalized coefficients: `out[0]` is the line mean, `out[k]` carries the
/// factor-2 convention.
fn dct2_1d(plan: &PlanSet, x: &[f64], out: &mut [f64], cbuf: &mut [Complex64], scratch: &mut [Complex64]) {
    let n = plan.n;
    let nf = n as f64;
    let half = n / 2;
    for j in 0..half {
        cbuf[j] = Complex64::new(x[2 * j], 0.0);
        cbuf[n - 1 - j] = Complex64::new(x[2 * j + 1], 0.0);
    }
    plan.fwd.process_with_scratch(&mut cbuf[..n], &mut scratch[..plan.scratch_len]);
    out[0] = cbuf[0].re / nf;
    for k in 1..n {
        let t = plan.tw[k] * cbuf[k];
        out[k] = 2.0 * t.re / nf;
    }
}

/// Inverse of [`dct2_1d`]: synthesizes `n` midpoint samples from normalized
/// cosine coefficients.
fn dct3_1d(plan: &PlanSet, a: &[f64], out: &mut [f64], cbuf: &mut [Complex64], scratch: &mut [Complex64]) {
    let n = plan.n;
    let nf = n as f64;
    let half = n / 2;
    cbuf[0] = Complex64::new(nf * a[0], 0.0);
    for k in 1..n {
        let z = Complex64::new(0.5 * nf * a[k], -0.5 * nf * a[n - k]);
        cbuf[k] = plan.tw[k].conj() * z;
    }
    plan.inv.process_with_scratch(&mut cbuf[..n], &mut scratch[..plan.scratch_len]);
    for j in 0..half {
        out[2 * j] = cbuf[j].re / nf;
        out[2 * j + 1] = cbuf[n - 1 - j].re / nf;
    }
}

// ---------------------------------------------------------------------------
// 2D transforms
// ---------------------------------------------------------------------------

/// Analyzes a field into its spectral coefficients.
pub fn forward(v: &Field) -> Spectrum {
    let grid = v.grid();
    let coeffs = match grid.boundary() {
        Boundary::Neumann => Coeffs::Cosine(forward_neumann(v)),
        Boundary::Periodic => Coeffs::HalfComplex(forward_periodic(v)),
    };
    Spectrum { grid, coeffs }
}

/// Synthesizes nodal values from spectral coefficients.
pub fn inverse(s: &Spectrum) -> Field {
    match &s.coeffs {
        Coeffs::Cosine(a) => inverse_neumann(s.grid, a),
        Coeffs::HalfComplex(c) => inverse_periodic(s.grid, c),
    }
}

fn forward_neumann(v: &Field) -> Vec<f64> {
    let g = v.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let px = plan_for(nx);
    let py = plan_for(ny);
    let mut a = vec![0.0; nx * ny];
    let mut cbuf = vec![Complex64::default(); nx.max(ny)];
    let mut scratch = vec![Complex64::default(); px.scratch_len.max(py.scratch_len)];
    for j in 0..ny {
        let row = &v.data()[j * nx..(j + 1) * nx];
        dct2_1d(&px, row, &mut a[j * nx..(j + 1) * nx], &mut cbuf, &mut scratch);
    }
    let mut tin = vec![0.0; ny];
    let mut tout = vec![0.0; ny];
    for k in 0..nx {
        for l in 0..ny {
            tin[l] = a[l * nx + k];
        }
        dct2_1d(&py, &tin, &mut tout, &mut cbuf, &mut scratch);
        for l in 0..ny {
            a[l * nx + k] = tout[l];
        }
    }
    a
}

fn inverse_neumann(grid: Grid, coeffs: &[f64]) -> Field {
    let (nx, ny) = (grid.nx(), grid.ny());
    let px = plan_for(nx);
    let py = plan_for(ny);
    let mut a = coeffs.to_vec();
    let mut cbuf = vec![Complex64::default(); nx.max(ny)];
    let mut scratch = vec![Complex64::default(); px.scratch_len.max(py.scratch_len)];
    let mut tin = vec![0.0; ny];
    let mut tout = vec![0.0; ny];
    for k in 0..nx {
        for l in 0..ny {
            tin[l] = a[l * nx + k];
        }
        dct3_1d(&py, &tin, &mut tout, &mut cbuf, &mut scratch);
        for l in 0..ny {
            a[l * nx + k] = tout[l];
        }
    }
    let mut out = Field::zeros(grid);
    let data = out.data_mut();
    let mut rout = vec![0.0; nx];
    for j in 0..ny {
        dct3_1d(&px, &a[j * nx..(j + 1) * nx], &mut rout, &mut cbuf, &mut scratch);
        data[j * nx..(j + 1) * nx].copy_from_slice(&rout);
    }
    out
}

fn forward_periodic(v: &Field) -> Vec<Complex64> {
    let g = v.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let nxh = nx / 2 + 1;
    let px = plan_for(nx);
    let py = plan_for(ny);
    let scale = 1.0 / (nx as f64 * ny as f64);
    let mut c = vec![Complex64::default(); nxh * ny];
    let mut cbuf = vec![Complex64::default(); nx.max(ny)];
    let mut scratch = vec![Complex64::default(); px.scratch_len.max(py.scratch_len)];
    for j in 0..ny {
        let row = &v.data()[j * nx..(j + 1) * nx];
        for i in 0..nx {
            cbuf[i] = Complex64::new(row[i], 0.0);
        }
        px.fwd.process_with_scratch(&mut cbuf[..nx], &mut scratch[..]);
        for k in 0..nxh {
            c[j * nxh + k] = cbuf[k] * scale;
        }
    }
    for k in 0..nxh {
        for l in 0..ny {
            cbuf[l] = c[l * nxh + k];
        }
        py.fwd.process_with_scratch(&mut cbuf[..ny], &mut scratch[..]);
        for l in 0..ny {
            c[l * nxh + k] = cbuf[l];
        }
    }
    c
}

fn inverse_periodic(grid: Grid, coeffs: &[Complex64]) -> Field {
    let (nx, ny) = (grid.nx(), grid.ny());
    let nxh = nx / 2 + 1;
    let px = plan_for(nx);
    let py = plan_for(ny);
    let mut c = coeffs.to_vec();
    let mut cbuf = vec![Complex64::default(); nx.max(ny)];
    let mut scratch = vec![Complex64::default(); px.scratch_len.max(py.scratch_len)];
    for k in 0..nxh {
        for l in 0..ny {
            cbuf[l] = c[l * nxh + k];
        }
        py.inv.process_with_scratch(&mut cbuf[..ny], &mut scratch[..]);
        for l in 0..ny {
            c[l * nxh + k] = cbuf[l];
        }
    }
    let mut out = Field::zeros(grid);
    let data = out.data_mut();
    for j in 0..ny {
        let g_row = &c[j * nxh..(j + 1) * nxh];
        cbuf[0] = g_row[0];
        for k in 1..=nx / 2 {
            cbuf[k] = g_row[k];
        }
        for k in 1..nx / 2 {
            cbuf[nx - k] = g_row[k].conj();
        }
        px.inv.process_with_scratch(&mut cbuf[..nx], &mut scratch[..]);
        for i in 0..nx {
            data[j * nx + i] = cbuf[i].re;
        }
    }
    out
}

/// Convenience: applies the diagonal operator `f(Δ)` to a field by a
/// forward transform, symbol multiplication, and inverse transform.
pub fn apply_operator(v: &Field, f: impl Fn(f64) -> f64) -> Field {
    let mut s = forward(v);
    s.apply_symbol(f);
    inverse(&s)
}
