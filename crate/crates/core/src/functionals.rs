//! Norms, energies, masses, and convergence-rate helpers.
//!
//! The L² norm uses the trapezoidal/midpoint quadrature of the grid, which
//! is exact for the trigonometric polynomials the solver produces; Sobolev
//! norms are evaluated spectrally from the mode algebra. The free energy is
//! the gradient part `(ε²/2)∫|∇u|²` (spectral) plus the potential well
//! integrated by the same quadrature.

use crate::error::{Error, Result};
use crate::grid::{pairwise_sum, Field, DOMAIN_AREA};
use crate::propagators::{PotentialSpec, TernaryState};
use crate::spectral;

/// Which norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// Continuum L² norm via exact grid quadrature.
    L2,
    /// Largest absolute nodal value.
    Linf,
    /// Full Sobolev norm `H^k`, `sqrt(Σ_{i1+i2 ≤ k} ‖∂x^i1 ∂y^i2 u‖²)`,
    /// supported for `k ≤ 6`. `Hk(0)` evaluates through the same code path
    /// as `L2`, so the two agree exactly.
    Hk(u32),
}

fn l2_quadrature(v: &Field) -> f64 {
    let sq: Vec<f64> = v.data().iter().map(|&x| x * x).collect();
    (pairwise_sum(&sq) / sq.len() as f64 * DOMAIN_AREA).sqrt()
}

fn hk_weight(wx: f64, wy: f64, k: u32) -> f64 {
    let mut s = 0.0;
    for i1 in 0..=k {
        for i2 in 0..=(k - i1) {
            s += (wx * wx).powi(i1 as i32) * (wy * wy).powi(i2 as i32);
        }
    }
    s
}

/// Evaluates the requested norm of `v`. `Hk(k)` is supported for `k ≤ 6`.
pub fn norm(v: &Field, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Linf => Ok(v.max_norm()),
        NormKind::L2 | NormKind::Hk(0) => Ok(l2_quadrature(v)),
        NormKind::Hk(k) if k <= 6 => {
            let s = spectral::forward(v);
            Ok(s.mode_sum(|wx, wy| hk_weight(wx, wy, k)).max(0.0).sqrt())
        }
        NormKind::Hk(k) => Err(Error::Config(format!(
            "H^k norms are provided for k <= 6, got k = {k}"
        ))),
    }
}

/// Potential well density `F(u)` for scalar potentials; the ternary variant
/// returns the per-phase well used by [`energy_ternary`].
fn well_density(potential: &PotentialSpec, u: f64) -> f64 {
    match *potential {
        PotentialSpec::Polynomial => {
            let w = u * u - 1.0;
            0.25 * w * w
        }
        PotentialSpec::Logarithmic { theta, theta_c } => {
            let entropy = (1.0 + u) * u.ln_1p() + (1.0 - u) * (-u).ln_1p();
            0.5 * theta * entropy + 0.5 * theta_c * (1.0 - u * u)
        }
        PotentialSpec::TernaryConservative => {
            let w = u * (1.0 - u);
            0.5 * w * w
        }
    }
}

/// Free energy `E(u) = (ε²/2)∫|∇u|² + ∫F(u)`.
///
/// The gradient term is computed spectrally, the well term by grid
/// quadrature. For the logarithmic potential every nodal value must satisfy
/// `|u| < 1`; for `TernaryConservative` the result is the single-phase
/// contribution of one component.
pub fn energy(v: &Field, potential: &PotentialSpec, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("energy requires eps > 0, got {eps}")));
    }
    if let PotentialSpec::Logarithmic { .. } = potential {
        let mut worst = 0.0_f64;
        let mut at = 0usize;
        for (idx, &x) in v.data().iter().enumerate() {
            if x.abs() > worst.abs() {
                worst = x;
                at = idx;
            }
        }
        if !(worst.abs() < 1.0) {
            let nx = v.grid().nx();
            return Err(Error::Precondition(format!(
                "logarithmic potential needs |u| < 1 everywhere; node ({}, {}) holds {worst:e}",
                at % nx,
                at / nx
            )));
        }
    }
    let s = spectral::forward(v);
    let grad_sq = s.mode_sum(|wx, wy| wx * wx + wy * wy);
    let well: Vec<f64> = v.data().iter().map(|&u| well_density(potential, u)).collect();
    let well_mean = pairwise_sum(&well) / well.len() as f64;
    Ok(0.5 * eps * eps * grad_sq + well_mean * DOMAIN_AREA)
}

/// Total free energy of a ternary state: the sum of the per-phase energies.
pub fn energy_ternary(state: &TernaryState, eps: f64) -> Result<f64> {
    let mut total = 0.0;
    for comp in &state.u {
        total += energy(comp, &PotentialSpec::TernaryConservative, eps)?;
    }
    Ok(total)
}

/// Quadrature mass `∫u`, i.e. the nodal mean times the domain area.
pub fn mass(v: &Field) -> f64 {
    v.mean() * DOMAIN_AREA
}

/// H¹ error between a reference field and a numerical field on one grid.
pub fn error_h1(reference: &Field, numerical: &Field) -> Result<f64> {
    if reference.grid() != numerical.grid() {
        return Err(Error::GridMismatch(
            "error_h1 needs both fields on the same grid".into(),
        ));
    }
    norm(&reference.minus(numerical), NormKind::Hk(1))
}

/// Relative H¹ error, `‖ref − num‖_{H¹} / ‖ref‖_{H¹}`.
pub fn error_h1_relative(reference: &Field, numerical: &Field) -> Result<f64> {
    let e = error_h1(reference, numerical)?;
    let denom = norm(reference, NormKind::Hk(1))?;
    if denom == 0.0 {
        return Err(Error::Precondition(
            "relative error undefined: reference field has zero H1 norm".into(),
        ));
    }
    Ok(e / denom)
}

/// Observed order between two (error, max-step) pairs:
/// `ln(e1/e2) / ln(tau1_max/tau2_max)`.
///
/// Errors must be strictly positive (a zero or negative error leaves the
/// rate undefined) and the two step sizes must differ. Equal errors give 0.
pub fn convergence_rate(e1: f64, e2: f64, tau1_max: f64, tau2_max: f64) -> Result<f64> {
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(Error::Precondition(format!(
            "rate undefined: errors must be positive, got {e1:e} and {e2:e}"
        )));
    }
    if !(tau1_max > 0.0 && tau2_max > 0.0) {
        return Err(Error::Precondition(format!(
            "rate undefined: step sizes must be positive, got {tau1_max:e} and {tau2_max:e}"
        )));
    }
    if tau1_max == tau2_max {
        return Err(Error::Precondition(
            "rate undefined: the two step sizes are equal".into(),
        ));
    }
    Ok((e1 / e2).ln() / (tau1_max / tau2_max).ln())
}

/// Least-squares slope of `ln(error)` against `ln(tau)` over a sweep.
pub fn loglog_slope(taus: &[f64], errors: &[f64]) -> Result<f64> {
    if taus.len() != errors.len() || taus.len() < 2 {
        return Err(Error::Precondition(
            "log-log slope needs two equal-length samples at least".into(),
        ));
    }
    if taus.iter().chain(errors.iter()).any(|&x| !(x > 0.0)) {
        return Err(Error::Precondition(
            "log-log slope needs strictly positive taus and errors".into(),
        ));
    }
    let n = taus.len() as f64;
    let xs: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let xbar = pairwise_sum(&xs) / n;
    let ybar = pairwise_sum(&ys) / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    if den == 0.0 {
        return Err(Error::Precondition(
            "log-log slope undefined: all step sizes coincide".into(),
        ));
    }
    Ok(num / den)
}
