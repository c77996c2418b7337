//! Independent reference solvers used to cross-check the splitting.
//!
//! These deliberately share no discretization machinery with the production
//! path: [`mol_reference`] advances a five-point finite-difference
//! method-of-lines system with classical RK4; [`mol_reference_spectral`]
//! does the same with the spectral Laplacian so spatial discretizations
//! match when measuring pure time accuracy; [`dense_expm_check`] compares
//! the diffusion propagator column by column against a dense matrix
//! exponential built by scaling-and-squaring; [`ode_rk4`] integrates the
//! spatially constant reaction ODE.

use crate::error::{Error, Result};
use crate::grid::{Boundary, Field, Grid};
use crate::propagators::{g_log, linear_propagate, PotentialSpec};
use crate::spectral;

/// Time integrator for the method-of-lines references.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleScheme {
    /// Classical fourth-order Runge–Kutta.
    Rk4,
}

/// Configuration of a method-of-lines reference run.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Grid; at most 64×64 (the oracle is a desk-scale checker).
    pub grid: Grid,
    /// Target substep; the run takes `n = round(T/dt)` (or the next integer
    /// up) uniform substeps of exactly `T/n`.
    pub dt: f64,
    /// Time scheme.
    pub scheme: OracleScheme,
    /// When true, only the diffusion term is integrated.
    pub linear_only: bool,
}

impl OracleConfig {
    /// RK4 reference with the reaction term included.
    pub fn new(grid: Grid, dt: f64) -> Self {
        Self { grid, dt, scheme: OracleScheme::Rk4, linear_only: false }
    }
}

fn check_grid_small(grid: Grid, cap: usize, what: &str) -> Result<()> {
    if grid.nx() > cap || grid.ny() > cap {
        return Err(Error::Precondition(format!(
            "{what} is restricted to grids at most {cap}x{cap}, got {}x{}",
            grid.nx(),
            grid.ny()
        )));
    }
    Ok(())
}

/// Number of uniform substeps for target `dt` over horizon `t`: `round(t/dt)`
/// when `t/dt` is within `1e−8` of an integer, else `ceil(t/dt)`.
fn substep_count(t_final: f64, dt: f64) -> usize {
    let ratio = t_final / dt;
    let rounded = ratio.round();
    let n = if (ratio - rounded).abs() <= 1e-8 * rounded.max(1.0) { rounded } else { ratio.ceil() };
    (n as usize).max(1)
}

/// Five-point finite-difference Laplacian. Neumann uses edge duplication
/// (the midpoint-grid mirror `u_{−1} = u_0`), periodic wraps around.
pub fn fd_laplacian(v: &Field) -> Field {
    let g = v.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (ihx2, ihy2) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
    let d = v.data();
    let mut out = Field::zeros(g);
    let o = out.data_mut();
    let wrap = g.boundary() == Boundary::Periodic;
    for j in 0..ny {
        let (jm, jp) = if wrap {
            ((j + ny - 1) % ny, (j + 1) % ny)
        } else {
            (j.saturating_sub(1), (j + 1).min(ny - 1))
        };
        for i in 0..nx {
            let (im, ip) = if wrap {
                ((i + nx - 1) % nx, (i + 1) % nx)
            } else {
                (i.saturating_sub(1), (i + 1).min(nx - 1))
            };
            let c = d[j * nx + i];
            o[j * nx + i] = ihx2 * (d[j * nx + im] + d[j * nx + ip] - 2.0 * c)
                + ihy2 * (d[jm * nx + i] + d[jp * nx + i] - 2.0 * c);
        }
    }
    out
}

/// Scalar reaction rate `−F'(u)` for the supported scalar potentials.
fn reaction_rate(potential: &PotentialSpec, u: f64) -> Result<f64> {
    match *potential {
        PotentialSpec::Polynomial => Ok(u - u * u * u),
        PotentialSpec::Logarithmic { theta, theta_c } => {
            if !(u.abs() < 1.0) {
                return Err(Error::Precondition(format!(
                    "logarithmic reaction left the open interval: |u| = {:e} >= 1",
                    u.abs()
                )));
            }
            Ok(g_log(u, theta, theta_c))
        }
        PotentialSpec::TernaryConservative => Err(Error::Config(
            "the ternary system has no scalar method-of-lines oracle; its conservation laws are checked directly".into(),
        )),
    }
}

fn rk4_field<R>(u0: &Field, t_final: f64, dt_target: f64, mut rhs: R) -> Result<Field>
where
    R: FnMut(&Field) -> Result<Field>,
{
    let n = substep_count(t_final, dt_target);
    let dt = t_final / n as f64;
    let mut u = u0.clone();
    for _ in 0..n {
        let k1 = rhs(&u)?;
        let mut s = u.clone();
        s.axpy(0.5 * dt, &k1);
        let k2 = rhs(&s)?;
        let mut s = u.clone();
        s.axpy(0.5 * dt, &k2);
        let k3 = rhs(&s)?;
        let mut s = u.clone();
        s.axpy(dt, &k3);
        let k4 = rhs(&s)?;
        u.axpy(dt / 6.0, &k1);
        u.axpy(dt / 3.0, &k2);
        u.axpy(dt / 3.0, &k3);
        u.axpy(dt / 6.0, &k4);
    }
    Ok(u)
}

fn validate_mol(u0: &Field, cfg: &OracleConfig, t_final: f64, lambda_max: f64) -> Result<usize> {
    check_grid_small(cfg.grid, 64, "the method-of-lines oracle")?;
    if u0.grid() != cfg.grid {
        return Err(Error::GridMismatch("initial field does not live on the oracle grid".into()));
    }
    if cfg.scheme != OracleScheme::Rk4 {
        return Err(Error::Config("unsupported oracle scheme".into()));
    }
    if !(t_final >= 0.0) {
        return Err(Error::Precondition(format!("oracle horizon must be >= 0, got {t_final}")));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::Precondition(format!("oracle dt must be positive, got {}", cfg.dt)));
    }
    if t_final == 0.0 {
        return Ok(0);
    }
    let n = substep_count(t_final, cfg.dt);
    let dt = t_final / n as f64;
    let bound = 0.5 * (2.0 / lambda_max);
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "oracle dt {dt:e} violates the diffusion stability bound {bound:e}"
        )));
    }
    Ok(n)
}

/// Finite-difference method-of-lines reference: five-point Laplacian plus
/// the pointwise reaction, advanced by RK4 with uniform substeps.
///
/// The substep must satisfy `dt ≤ 1/λ_max` with
/// `λ_max = 4ε²(1/hx² + 1/hy²)` (half the explicit-Euler diffusion limit);
/// violations are rejected with the computed bound.
pub fn mol_reference(
    u0: &Field,
    potential: &PotentialSpec,
    eps: f64,
    t_final: f64,
    cfg: &OracleConfig,
) -> Result<Field> {
    let g = cfg.grid;
    let lambda = 4.0 * eps * eps * (1.0 / (g.hx() * g.hx()) + 1.0 / (g.hy() * g.hy()));
    let n = validate_mol(u0, cfg, t_final, lambda)?;
    if n == 0 {
        return Ok(u0.clone());
    }
    if !cfg.linear_only {
        reaction_rate(potential, 0.0)?; // reject unsupported potentials up front
    }
    let eps2 = eps * eps;
    let linear_only = cfg.linear_only;
    let potential = *potential;
    rk4_field(u0, t_final, cfg.dt, move |u| {
        let mut lap = fd_laplacian(u);
        lap.scale(eps2);
        if linear_only {
            return Ok(lap);
        }
        let mut out = lap;
        for (o, &x) in out.data_mut().iter_mut().zip(u.data().iter()) {
            *o += reaction_rate(&potential, x)?;
        }
        Ok(out)
    })
}

/// Spectral method-of-lines reference: the exact spectral Laplacian plus
/// the pointwise reaction, advanced by RK4. Spatially identical to the
/// splitting's discretization, so differences measure time accuracy only.
///
/// The substep must satisfy `dt ≤ 1/λ_max` with `λ_max = ε²·|μ|_max` over
/// the resolved modes.
pub fn mol_reference_spectral(
    u0: &Field,
    potential: &PotentialSpec,
    eps: f64,
    t_final: f64,
    cfg: &OracleConfig,
) -> Result<Field> {
    let g = cfg.grid;
    let (nx, ny) = (g.nx() as f64, g.ny() as f64);
    let mu_max = match g.boundary() {
        Boundary::Neumann => {
            let wx = (nx - 1.0) / 2.0;
            let wy = (ny - 1.0) / 2.0;
            wx * wx + wy * wy
        }
        Boundary::Periodic => (nx / 2.0) * (nx / 2.0) + (ny / 2.0) * (ny / 2.0),
    };
    let lambda = eps * eps * mu_max;
    let n = validate_mol(u0, cfg, t_final, lambda)?;
    if n == 0 {
        return Ok(u0.clone());
    }
    if !cfg.linear_only {
        reaction_rate(potential, 0.0)?;
    }
    let eps2 = eps * eps;
    let linear_only = cfg.linear_only;
    let potential = *potential;
    rk4_field(u0, t_final, cfg.dt, move |u| {
        let mut out = spectral::apply_operator(u, |mu| mu);
        out.scale(eps2);
        if linear_only {
            return Ok(out);
        }
        for (o, &x) in out.data_mut().iter_mut().zip(u.data().iter()) {
            *o += reaction_rate(&potential, x)?;
        }
        Ok(out)
    })
}

// ---------------------------------------------------------------------------
// Dense matrix exponential check
// ---------------------------------------------------------------------------

fn mat_inf_norm(a: &[f64], n: usize) -> f64 {
    let mut worst = 0.0_f64;
    for row in a.chunks(n) {
        let s: f64 = row.iter().map(|x| x.abs()).sum();
        worst = worst.max(s);
    }
    worst
}

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let crow = &mut c[i * n..(i + 1) * n];
            for (cj, bj) in crow.iter_mut().zip(brow.iter()) {
                *cj += aik * bj;
            }
        }
    }
    c
}

/// Dense `exp(B)` by scaling-and-squaring with a Taylor series on the
/// scaled matrix.
fn expm(b: &[f64], n: usize) -> Vec<f64> {
    let norm = mat_inf_norm(b, n);
    let s = if norm <= 0.5 { 0u32 } else { norm.log2().ceil() as u32 + 1 };
    let scale = 0.5f64.powi(s as i32);
    let bs: Vec<f64> = b.iter().map(|x| x * scale).collect();
    let mut sum = vec![0.0; n * n];
    let mut term = vec![0.0; n * n];
    for i in 0..n {
        sum[i * n + i] = 1.0;
        term[i * n + i] = 1.0;
    }
    for k in 1..=60 {
        term = mat_mul(&term, &bs, n);
        let inv_k = 1.0 / k as f64;
        for x in &mut term {
            *x *= inv_k;
        }
        for (acc, t) in sum.iter_mut().zip(term.iter()) {
            *acc += t;
        }
        if mat_inf_norm(&term, n) < 1e-18 {
            break;
        }
    }
    let mut m = sum;
    for _ in 0..s {
        m = mat_mul(&m, &m, n);
    }
    m
}

/// Dense finite-difference Laplacian matrix of the grid, row-major `n × n`
/// with `n = nx·ny`, matching [`fd_laplacian`].
fn fd_matrix(g: Grid) -> Vec<f64> {
    let (nx, ny) = (g.nx(), g.ny());
    let n = nx * ny;
    let (ihx2, ihy2) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
    let wrap = g.boundary() == Boundary::Periodic;
    let mut a = vec![0.0; n * n];
    for j in 0..ny {
        let (jm, jp) = if wrap {
            ((j + ny - 1) % ny, (j + 1) % ny)
        } else {
            (j.saturating_sub(1), (j + 1).min(ny - 1))
        };
        for i in 0..nx {
            let (im, ip) = if wrap {
                ((i + nx - 1) % nx, (i + 1) % nx)
            } else {
                (i.saturating_sub(1), (i + 1).min(nx - 1))
            };
            let p = j * nx + i;
            a[p * n + (j * nx + im)] += ihx2;
            a[p * n + (j * nx + ip)] += ihx2;
            a[p * n + (jm * nx + i)] += ihy2;
            a[p * n + (jp * nx + i)] += ihy2;
            a[p * n + p] += -2.0 * ihx2 - 2.0 * ihy2;
        }
    }
    a
}

/// Compares the spectral diffusion propagator against a dense matrix
/// exponential of the finite-difference Laplacian, column by column on the
/// point-field basis, and returns the largest entrywise deviation.
///
/// At `t = 0` both sides are the identity and the deviation is at rounding
/// level; for `t > 0` the deviation measures the (second-order in `h`)
/// spatial difference between the two Laplacians, so it is small but not
/// tiny. Restricted to grids of at most 8×8.
pub fn dense_expm_check(grid: Grid, eps: f64, t: f64) -> Result<f64> {
    check_grid_small(grid, 8, "dense_expm_check")?;
    if !(t >= 0.0) {
        return Err(Error::Precondition(format!("dense_expm_check requires t >= 0, got {t}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("dense_expm_check requires eps > 0, got {eps}")));
    }
    let n = grid.len();
    let c = t * eps * eps;
    let b: Vec<f64> = fd_matrix(grid).into_iter().map(|x| x * c).collect();
    let m = expm(&b, n);
    let mut worst = 0.0_f64;
    for q in 0..n {
        let mut e = Field::zeros(grid);
        e.data_mut()[q] = 1.0;
        let w = linear_propagate(&e, t, eps * eps)?;
        for p in 0..n {
            worst = worst.max((m[p * n + q] - w.data()[p]).abs());
        }
    }
    Ok(worst)
}

/// RK4 integration of the spatially constant reaction ODE `u' = −F'(u)`
/// (`u' = u − u³` for the polynomial well, `u' = g(u)` for the logarithmic
/// well). The logarithmic rate requires `|u| < 1` throughout.
pub fn ode_rk4(v0: f64, potential: &PotentialSpec, t_final: f64, dt: f64) -> Result<f64> {
    if !(t_final >= 0.0) {
        return Err(Error::Precondition(format!("ode_rk4 requires t >= 0, got {t_final}")));
    }
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("ode_rk4 requires dt > 0, got {dt}")));
    }
    if t_final == 0.0 {
        return Ok(v0);
    }
    reaction_rate(potential, 0.0)?;
    let n = substep_count(t_final, dt);
    let h = t_final / n as f64;
    let mut u = v0;
    for _ in 0..n {
        let k1 = reaction_rate(potential, u)?;
        let k2 = reaction_rate(potential, u + 0.5 * h * k1)?;
        let k3 = reaction_rate(potential, u + 0.5 * h * k2)?;
        let k4 = reaction_rate(potential, u + h * k3)?;
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(u)
}
