//! The split propagators.
//!
//! A reaction–diffusion step is composed from two exactly solvable or
//! high-order pieces:
//!
//! - the diffusion semigroup `S_L(t) = exp(t·ε²Δ)`, applied exactly as a
//!   per-mode multiplier ([`linear_propagate`]);
//! - a reaction substep, which depends on the potential: the cubic
//!   double-well flow has a closed form ([`nonlinear_exact`]), the
//!   logarithmic potential is integrated by a two-stage, second-order,
//!   L-stable SDIRK scheme with pointwise Newton stage solves
//!   ([`nonlinear_log_rk`]), and the conservative three-phase reaction uses
//!   the same SDIRK scheme with a mean-constraint multiplier so that each
//!   phase mean and the hyperplane `u₁+u₂+u₃ = 1` are preserved
//!   ([`nonlinear_ternary_rk`]).
//!
//! [`q_defect`] evaluates the second-order defect of the half-step
//! diffusion propagator, the quantity controlling the splitting's local
//! error budget.

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Field, Grid};
use crate::spectral;

/// Reaction potential selecting the nonlinear substep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialSpec {
    /// Double well `F(u) = (u² − 1)²/4`; the reaction flow is exact.
    Polynomial,
    /// Logarithmic double well
    /// `F(u) = (θ/2)[(1+u)ln(1+u) + (1−u)ln(1−u)] + (θ_c/2)(1−u²)`,
    /// defined on `|u| < 1`.
    Logarithmic {
        /// Temperature-like parameter weighting the logarithmic terms.
        theta: f64,
        /// Critical parameter weighting the concave quadratic term.
        theta_c: f64,
    },
    /// Conservative three-phase dynamics with per-phase well
    /// `F(u) = u²(1−u)²/2`, constrained to the hyperplane `u₁+u₂+u₃ = 1`
    /// with every phase mean conserved.
    TernaryConservative,
}

impl PotentialSpec {
    /// Lower-case name used in output headers.
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Polynomial => "polynomial",
            PotentialSpec::Logarithmic { .. } => "logarithmic",
            PotentialSpec::TernaryConservative => "ternary-conservative",
        }
    }
}

/// Butcher tableau of the two-stage, second-order, L-stable SDIRK scheme
/// used for the implicit reaction substeps.
#[derive(Clone, Copy, Debug)]
pub struct SdirkTableau {
    /// Diagonal coefficient.
    pub a: f64,
    /// Stage matrix `[[a, 0], [1 − 2a, a]]`.
    pub stage_matrix: [[f64; 2]; 2],
    /// Quadrature weights `[1/2, 1/2]`.
    pub weights: [f64; 2],
    /// Abscissae `[a, 1 − a]`.
    pub abscissae: [f64; 2],
}

impl SdirkTableau {
    /// Builds the tableau for diagonal coefficient `a`.
    pub fn new(a: f64) -> Self {
        Self {
            a,
            stage_matrix: [[a, 0.0], [1.0 - 2.0 * a, a]],
            weights: [0.5, 0.5],
            abscissae: [a, 1.0 - a],
        }
    }
}

impl Default for SdirkTableau {
    /// The L-stable member: `a = 1 + √2/2`.
    fn default() -> Self {
        Self::new(1.0 + std::f64::consts::SQRT_2 / 2.0)
    }
}

/// Three phase fields on a common grid, nominally on the hyperplane
/// `u₁ + u₂ + u₃ = 1`.
#[derive(Clone, Debug)]
pub struct TernaryState {
    /// The phase fields, indexed 0..3.
    pub u: [Field; 3],
}

impl TernaryState {
    /// Bundles three fields; all must share one grid.
    pub fn new(u1: Field, u2: Field, u3: Field) -> Result<Self> {
        if u1.grid() != u2.grid() || u1.grid() != u3.grid() {
            return Err(Error::GridMismatch(
                "ternary state components live on different grids".into(),
            ));
        }
        Ok(Self { u: [u1, u2, u3] })
    }

    /// The shared grid.
    pub fn grid(&self) -> Grid {
        self.u[0].grid()
    }

    /// Largest nodal deviation `max |u₁ + u₂ + u₃ − 1|`.
    pub fn hyperplane_deviation(&self) -> f64 {
        let (a, b, c) = (self.u[0].data(), self.u[1].data(), self.u[2].data());
        let mut worst = 0.0_f64;
        for i in 0..a.len() {
            worst = worst.max((a[i] + b[i] + c[i] - 1.0).abs());
        }
        worst
    }

    /// Largest absolute nodal value over all components.
    pub fn max_norm(&self) -> f64 {
        self.u.iter().map(Field::max_norm).fold(0.0, f64::max)
    }
}

/// Applies the diffusion semigroup `exp(t·ε²Δ)` exactly per mode.
///
/// Each coefficient is multiplied by `exp(−t·ε²·wx²)·exp(−t·ε²·wy²)`; both
/// factors are at most 1, so no mode is ever amplified. `t = 0` returns the
/// input unchanged. Note that the l∞ norm of a band-limited field is
/// controlled by its coefficient sums, while general nodal data may
/// overshoot by interpolation; the propagator is non-expansive mode by
/// mode, not pointwise for arbitrary rough data.
pub fn linear_propagate(v: &Field, t: f64, eps2: f64) -> Result<Field> {
    if !(t >= 0.0) {
        return Err(Error::Precondition(format!(
            "linear_propagate requires t >= 0, got {t}"
        )));
    }
    if !(eps2 >= 0.0) {
        return Err(Error::Precondition(format!(
            "linear_propagate requires eps2 >= 0, got {eps2}"
        )));
    }
    if t == 0.0 {
        return Ok(v.clone());
    }
    let c = t * eps2;
    let mut s = spectral::forward(v);
    s.apply_separable(|wx| (-c * wx * wx).exp(), |wy| (-c * wy * wy).exp());
    Ok(spectral::inverse(&s))
}

/// Second-order remainder of the exponential, `φ(z) = e^z − 1 − z`,
/// evaluated by its Taylor series near zero to avoid cancellation.
pub fn phi_remainder(z: f64) -> f64 {
    if z.abs() <= 0.5 {
        let mut term = 0.5_f64;
        let mut sum = term;
        let mut m = 0u32;
        while term.abs() > 1e-20 && m < 60 {
            m += 1;
            term *= z / (m as f64 + 2.0);
            sum += term;
        }
        z * z * sum
    } else {
        z.exp_m1() - z
    }
}

/// Defect of the half-step diffusion propagator against its linearization:
/// `Q(v) = S_L(τ/2)v − v − (τ/2)ε²Δv`, evaluated spectrally as `φ(z)` per
/// mode with `z = (τ/2)·ε²·μ`. Since `0 ≤ φ(−x) ≤ x²/2` for `x ≥ 0`, its
/// L² norm obeys `‖Q(v)‖ ≤ (τ²/8)·‖(ε²Δ)²v‖`.
pub fn q_defect(v: &Field, tau: f64, eps2: f64) -> Result<Field> {
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!(
            "q_defect requires tau > 0, got {tau}"
        )));
    }
    if !(eps2 >= 0.0) {
        return Err(Error::Precondition(format!(
            "q_defect requires eps2 >= 0, got {eps2}"
        )));
    }
    let c = 0.5 * tau * eps2;
    let mut s = spectral::forward(v);
    s.apply_symbol(|mu| phi_remainder(c * mu));
    Ok(spectral::inverse(&s))
}

/// Index of the nodal value of largest magnitude, as `(i, j, value)`.
fn worst_node(v: &Field) -> (usize, usize, f64) {
    let nx = v.grid().nx();
    let mut best = (0usize, 0usize, 0.0f64);
    for (idx, &x) in v.data().iter().enumerate() {
        if x.abs() > best.2.abs() {
            best = (idx % nx, idx / nx, x);
        }
    }
    best
}

/// Exact flow of the cubic reaction `u' = u − u³` over time `tau`:
/// `u ↦ e^τ u / sqrt(1 + (e^{2τ} − 1) u²)`.
///
/// The closed form is defined for every real value: `[−1, 1]` is invariant
/// and values beyond it contract toward `±1`, so small interpolation
/// overshoots from the diffusion half-steps are absorbed rather than
/// amplified. Input must still satisfy `max|v| ≤ 2`: the continuous problem
/// confines states to `[−1, 1]` and discrete transients sit many orders
/// below the band edge, so anything past 2 marks a diverged run and is
/// rejected with the offending node.
pub fn nonlinear_exact(v: &Field, tau: f64) -> Result<Field> {
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!(
            "nonlinear_exact requires tau > 0, got {tau}"
        )));
    }
    let (i, j, val) = worst_node(v);
    if !(val.abs() <= 2.0) {
        return Err(Error::Precondition(format!(
            "nonlinear_exact requires max|v| <= 2; node ({i}, {j}) holds {val:e}"
        )));
    }
    if tau > 300.0 {
        // Very long times: 1 − e^{−2τ} rounds to exactly 1, so the flow is
        // w/√(1 + w²) with w = e^τ·u, evaluated in log scale so that neither
        // e^τ nor w² can overflow or underflow.
        return Ok(v.map(|u| {
            if u == 0.0 {
                return 0.0;
            }
            let t_ln = tau + u.abs().ln();
            if t_ln > 350.0 {
                return u.signum();
            }
            let w = t_ln.exp();
            u.signum() * w / (1.0 + w * w).sqrt()
        }));
    }
    let et = tau.exp();
    let em = (2.0 * tau).exp_m1();
    Ok(v.map(|u| et * u / (1.0 + em * u * u).sqrt()))
}

/// Reaction rate of the logarithmic potential:
/// `g(u) = θ_c·u − (θ/2)(ln(1+u) − ln(1−u))`, defined on `|u| < 1`.
pub fn g_log(u: f64, theta: f64, theta_c: f64) -> f64 {
    theta_c * u - 0.5 * theta * (u.ln_1p() - (-u).ln_1p())
}

fn gp_log(u: f64, theta: f64, theta_c: f64) -> f64 {
    theta_c - theta / (1.0 - u * u)
}

/// Solves the stage equation `y = c + aτ·g(y)` for its unique root in
/// `(−1, 1)`. Newton iteration with a maintained bisection bracket; the
/// stage map `ψ(y) = y − c − aτ·g(y)` is strictly increasing whenever
/// `aτ·(θ_c − θ) < 1`, which the caller checks.
fn sdirk_stage_log(c: f64, atau: f64, theta: f64, theta_c: f64) -> Result<f64> {
    const EDGE: f64 = 1e-14;
    let mut lo = -1.0 + EDGE;
    let mut hi = 1.0 - EDGE;
    let psi = |y: f64| y - c - atau * g_log(y, theta, theta_c);
    let mut y = c.clamp(-1.0 + 1e-9, 1.0 - 1e-9);
    for _ in 0..50 {
        let r = psi(y);
        if r == 0.0 {
            return Ok(y);
        }
        if r > 0.0 {
            hi = hi.min(y);
        } else {
            lo = lo.max(y);
        }
        let dr = 1.0 - atau * gp_log(y, theta, theta_c);
        let mut ynew = y - r / dr;
        if !(ynew > lo && ynew < hi) {
            ynew = 0.5 * (lo + hi);
        }
        if (ynew - y).abs() <= 1e-13 {
            return Ok(ynew);
        }
        y = ynew;
    }
    // Newton stalled; fall back to bisection on the maintained bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    let r = psi(y);
    let slope = (1.0 - atau * gp_log(y, theta, theta_c)).max(1.0);
    if r.abs() <= 1e-12 * slope {
        Ok(y)
    } else {
        Err(Error::SolverFailure(format!(
            "implicit stage solve stalled at residual {r:e}"
        )))
    }
}

/// One step of the two-stage SDIRK scheme for the logarithmic reaction
/// `u' = g(u)`, applied pointwise.
///
/// Requires `max|v| < 1` strictly and a monotone stage map,
/// `τ·a·(θ_c − θ) < 1`. The output stays strictly inside `(−1, 1)` for the
/// step sizes those preconditions admit.
pub fn nonlinear_log_rk(v: &Field, tau: f64, theta: f64, theta_c: f64) -> Result<Field> {
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!(
            "nonlinear_log_rk requires tau > 0, got {tau}"
        )));
    }
    if !(theta > 0.0 && theta_c > 0.0) {
        return Err(Error::Precondition(format!(
            "logarithmic potential requires theta > 0 and theta_c > 0, got {theta} and {theta_c}"
        )));
    }
    let (i, j, val) = worst_node(v);
    if !(val.abs() < 1.0) {
        return Err(Error::Precondition(format!(
            "nonlinear_log_rk requires max|v| < 1; node ({i}, {j}) holds {val:e}"
        )));
    }
    let tab = SdirkTableau::default();
    let a = tab.a;
    let slope = theta_c - theta;
    if slope > 0.0 && tau * a * slope >= 1.0 {
        return Err(Error::Precondition(format!(
            "stage map not monotone: tau*a*(theta_c - theta) = {:e} >= 1; reduce tau below {:e}",
            tau * a * slope,
            1.0 / (a * slope)
        )));
    }
    let nx = v.grid().nx();
    let mut out = Field::zeros(v.grid());
    let c_mid = tau * (1.0 - 2.0 * a);
    let at_node = |idx: usize, e: Error| match e {
        Error::SolverFailure(msg) => {
            Error::SolverFailure(format!("node ({}, {}): {msg}", idx % nx, idx / nx))
        }
        other => other,
    };
    for (idx, (&u, o)) in v.data().iter().zip(out.data_mut().iter_mut()).enumerate() {
        let y1 = sdirk_stage_log(u, a * tau, theta, theta_c).map_err(|e| at_node(idx, e))?;
        let k1 = g_log(y1, theta, theta_c);
        let y2 = sdirk_stage_log(u + c_mid * k1, a * tau, theta, theta_c)
            .map_err(|e| at_node(idx, e))?;
        let k2 = g_log(y2, theta, theta_c);
        *o = u + 0.5 * tau * (k1 + k2);
    }
    Ok(out)
}

/// Per-phase reaction rate of the ternary well: `f(u) = u(1−u)(1−2u)`.
pub fn f_ternary(u: f64) -> f64 {
    u * (1.0 - u) * (1.0 - 2.0 * u)
}

fn fp_ternary(u: f64) -> f64 {
    6.0 * u * u - 6.0 * u + 1.0
}

fn mean_of(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Solves `y + aτ·f(y) = rhs` for the strictly monotone map
/// `q(y) = y + aτ·f(y)` (monotone because `f' ≥ −1/2` and `aτ < 2`).
fn solve_pointwise_ternary(y0: f64, rhs: f64, atau: f64) -> f64 {
    let mut y = y0;
    for _ in 0..50 {
        let r = y + atau * f_ternary(y) - rhs;
        let d = r / (1.0 + atau * fp_ternary(y));
        y -= d;
        if d.abs() <= 1e-14 {
            return y;
        }
    }
    // Bisection fallback on an expanded bracket; q is strictly increasing.
    let q = |y: f64| y + atau * f_ternary(y) - rhs;
    let mut lo = y - 1.0;
    let mut hi = y + 1.0;
    let mut width = 1.0;
    for _ in 0..100 {
        if q(lo) <= 0.0 {
            break;
        }
        width *= 2.0;
        lo -= width;
    }
    let mut width = 1.0;
    for _ in 0..100 {
        if q(hi) >= 0.0 {
            break;
        }
        width *= 2.0;
        hi += width;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One SDIRK stage of the conservative ternary reaction. Given stage data
/// `c`, solves the coupled system
/// `Y_l = c_l − aτ·(f(Y_l) − β_l + Λ)` with `β_l = mean(f(Y_l))` scalar per
/// phase and `Λ = −(1/3)·Σ_l (f(Y_l) − β_l)` a field, by alternating
/// pointwise Newton solves with multiplier refreshes. Returns the stage
/// values and the stage slopes `K_l = −(f(Y_l) − β_l + Λ)` evaluated at the
/// converged multipliers, which makes every phase mean conserved to
/// rounding and keeps the hyperplane sum exact up to rounding.
fn ternary_stage(c: [&[f64]; 3], atau: f64) -> Result<([Vec<f64>; 3], [Vec<f64>; 3])> {
    let n = c[0].len();
    let mut y = [c[0].to_vec(), c[1].to_vec(), c[2].to_vec()];
    let mut fv = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for l in 0..3 {
        for i in 0..n {
            fv[l][i] = f_ternary(y[l][i]);
        }
    }
    let mut beta = [mean_of(&fv[0]), mean_of(&fv[1]), mean_of(&fv[2])];
    let mut lam = vec![0.0; n];
    for i in 0..n {
        lam[i] = -((fv[0][i] - beta[0]) + (fv[1][i] - beta[1]) + (fv[2][i] - beta[2])) / 3.0;
    }
    let mut converged = false;
    for _ in 0..25 {
        for l in 0..3 {
            for i in 0..n {
                let rhs = c[l][i] + atau * (beta[l] - lam[i]);
                y[l][i] = solve_pointwise_ternary(y[l][i], rhs, atau);
            }
        }
        for l in 0..3 {
            for i in 0..n {
                fv[l][i] = f_ternary(y[l][i]);
            }
        }
        let new_beta = [mean_of(&fv[0]), mean_of(&fv[1]), mean_of(&fv[2])];
        let mut dbeta = 0.0_f64;
        for l in 0..3 {
            dbeta = dbeta.max((new_beta[l] - beta[l]).abs());
        }
        let mut dlam = 0.0_f64;
        for i in 0..n {
            let nl =
                -((fv[0][i] - new_beta[0]) + (fv[1][i] - new_beta[1]) + (fv[2][i] - new_beta[2]))
                    / 3.0;
            dlam = dlam.max((nl - lam[i]).abs());
            lam[i] = nl;
        }
        beta = new_beta;
        if dbeta < 1e-13 && dlam < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SolverFailure(
            "ternary stage multipliers did not settle within 25 sweeps".into(),
        ));
    }
    let mut k = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for l in 0..3 {
        for i in 0..n {
            k[l][i] = -(fv[l][i] - beta[l] + lam[i]);
        }
    }
    Ok((y, k))
}

/// One step of the two-stage SDIRK scheme for the conservative ternary
/// reaction system. Conserves each phase mean to rounding and preserves
/// the hyperplane `u₁+u₂+u₃ = 1` up to rounding; requires `τ·a/2 < 1` so
/// the pointwise stage maps stay monotone.
pub fn nonlinear_ternary_rk(state: &TernaryState, tau: f64) -> Result<TernaryState> {
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!(
            "nonlinear_ternary_rk requires tau > 0, got {tau}"
        )));
    }
    let tab = SdirkTableau::default();
    let a = tab.a;
    if tau * a * 0.5 >= 1.0 {
        return Err(Error::Precondition(format!(
            "pointwise stage map not monotone: tau*a/2 = {:e} >= 1; reduce tau below {:e}",
            tau * a * 0.5,
            2.0 / a
        )));
    }
    let grid = state.grid();
    let n = grid.len();
    let u = [state.u[0].data(), state.u[1].data(), state.u[2].data()];
    let (_, k1) = ternary_stage(u, a * tau)?;
    let cm = tau * (1.0 - 2.0 * a);
    let mut c2 = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for l in 0..3 {
        for i in 0..n {
            c2[l][i] = u[l][i] + cm * k1[l][i];
        }
    }
    let (_, k2) = ternary_stage([&c2[0], &c2[1], &c2[2]], a * tau)?;
    let mut out = Vec::with_capacity(3);
    for l in 0..3 {
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            data.push(u[l][i] + 0.5 * tau * (k1[l][i] + k2[l][i]));
        }
        out.push(Field::from_data(grid, data).expect("component sized to grid"));
    }
    let mut it = out.into_iter();
    TernaryState::new(it.next().unwrap(), it.next().unwrap(), it.next().unwrap())
}
