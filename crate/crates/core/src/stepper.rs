//! Strang-splitting time stepper with uniform, seeded-random, and
//! energy-adaptive step plans.
//!
//! One step of size `τ` is the symmetric composition
//! `S(τ) = S_L(τ/2) ∘ S_N(τ) ∘ S_L(τ/2)`: half a diffusion step, a full
//! reaction substep, half a diffusion step. The composition is second-order
//! accurate for smooth solutions under *variable* step sequences — the
//! symmetry makes each step's leading error local, so no step-ratio
//! restriction is needed — and it inherits the stability of its pieces:
//! the diffusion semigroup never amplifies a mode and the reaction flows
//! respect their invariant regions.
//!
//! [`run`] advances scalar dynamics and records a [`Trace`];
//! [`run_ternary`] advances three-phase states and additionally tracks
//! per-phase masses and the hyperplane constraint step by step.

use crate::error::{Error, Result};
use crate::functionals::{energy, energy_ternary, mass};
use crate::grid::{pairwise_sum, Field, Grid};
use crate::propagators::{
    linear_propagate, nonlinear_exact, nonlinear_log_rk, nonlinear_ternary_rk, PotentialSpec,
    TernaryState,
};
use crate::rng::SplitMix64;
use std::time::Instant;

/// Parameters of the energy-adaptive step controller.
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveParams {
    /// Smallest admissible step.
    pub tau_min: f64,
    /// Largest admissible step.
    pub tau_max: f64,
    /// Sensitivity to the energy dissipation rate.
    pub alpha: f64,
}

/// How step sizes are chosen.
#[derive(Clone, Debug)]
pub enum StepPlan {
    /// Every step has size `tau` (the final one truncated to land on T).
    Uniform {
        /// The uniform step size.
        tau: f64,
    },
    /// `n_steps` random sizes drawn from the seeded stream and normalized
    /// to sum exactly to `horizon`, which must equal the run's final time.
    RandomNormalized {
        /// PRNG seed for the draw stream.
        seed: u64,
        /// Number of steps.
        n_steps: usize,
        /// Total time the normalized steps sum to.
        horizon: f64,
    },
    /// Steps respond to the measured energy dissipation rate:
    /// `τ = clamp(tau_max / sqrt(1 + α·(ΔE/τ)²), tau_min, tau_max)`.
    Adaptive(AdaptiveParams),
}

impl StepPlan {
    /// Deterministic description used in output headers.
    pub fn describe(&self) -> String {
        match self {
            StepPlan::Uniform { tau } => format!("uniform(tau={})", fmt_float(*tau)),
            StepPlan::RandomNormalized { seed, n_steps, horizon } => format!(
                "random-normalized(seed={seed},n_steps={n_steps},horizon={})",
                fmt_float(*horizon)
            ),
            StepPlan::Adaptive(p) => format!(
                "adaptive(tau_min={},tau_max={},alpha={})",
                fmt_float(p.tau_min),
                fmt_float(p.tau_max),
                fmt_float(p.alpha)
            ),
        }
    }
}

/// Fixed-width float formatting (17 significant digits) shared by headers
/// and CSV bodies.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Full description of a simulation run.
#[derive(Clone, Debug)]
pub struct SimConfig {
    /// Spatial grid.
    pub grid: Grid,
    /// Reaction potential.
    pub potential: PotentialSpec,
    /// Interface parameter ε (the PDE carries ε²).
    pub eps: f64,
    /// Step-size plan.
    pub plan: StepPlan,
    /// Final time `T ≥ 0`.
    pub t_final: f64,
    /// Record every n-th step (the first and last step always record).
    pub record_every: usize,
    /// Times at which to store field snapshots; the stepper lands on each
    /// exactly. Must lie in `[0, T]`.
    pub snapshot_times: Vec<f64>,
    /// Optional hard cap on the number of steps (for open-ended runs).
    pub max_steps: Option<usize>,
    /// When true, trace rows carry wall-clock seconds; when false the
    /// column is 0.0 so output files are bit-reproducible.
    pub timing: bool,
}

impl SimConfig {
    /// New config with per-step recording, no snapshots, no step cap, and
    /// timing off.
    pub fn new(grid: Grid, potential: PotentialSpec, eps: f64, plan: StepPlan, t_final: f64) -> Self {
        Self {
            grid,
            potential,
            eps,
            plan,
            t_final,
            record_every: 1,
            snapshot_times: Vec::new(),
            max_steps: None,
            timing: false,
        }
    }
}

/// One recorded step of a scalar run.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    /// Time after the step (row 0 is the initial state at t = 0).
    pub t: f64,
    /// Step size that produced this state (0 for the initial row).
    pub tau: f64,
    /// Free energy.
    pub energy: f64,
    /// Max-norm of the state.
    pub max_norm: f64,
    /// Wall-clock seconds since the run started (0.0 with timing off).
    pub wall_seconds: f64,
}

/// Recorded history of a scalar run.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    /// Recorded rows in time order, starting with the initial state.
    pub rows: Vec<TraceRow>,
    /// Snapshots `(t, field)` in time order.
    pub snapshots: Vec<(f64, Field)>,
    /// Total number of steps taken (independent of `record_every`).
    pub steps: usize,
}

/// One recorded step of a ternary run.
#[derive(Clone, Copy, Debug)]
pub struct TernaryTraceRow {
    /// Time after the step.
    pub t: f64,
    /// Step size (0 for the initial row).
    pub tau: f64,
    /// Total free energy of the three phases.
    pub energy: f64,
    /// Max-norm over all components.
    pub max_norm: f64,
    /// Per-phase quadrature masses.
    pub mass: [f64; 3],
    /// Largest nodal deviation of `u₁+u₂+u₃` from 1.
    pub hyperplane_max: f64,
    /// Wall-clock seconds since the run started (0.0 with timing off).
    pub wall_seconds: f64,
}

/// Recorded history of a ternary run.
#[derive(Clone, Debug, Default)]
pub struct TernaryTrace {
    /// Recorded rows in time order, starting with the initial state.
    pub rows: Vec<TernaryTraceRow>,
    /// Snapshots `(t, ½u₁ − u₂)` in time order.
    pub snapshots: Vec<(f64, Field)>,
    /// Total number of steps taken.
    pub steps: usize,
    /// Largest per-phase mass deviation from the initial masses, tracked
    /// at every step regardless of `record_every`.
    pub max_mass_drift: f64,
    /// Largest hyperplane deviation seen at any step.
    pub max_hyperplane: f64,
}

/// One Strang step for a scalar potential.
pub fn strang_step(u: &Field, tau: f64, cfg: &SimConfig) -> Result<Field> {
    if u.grid() != cfg.grid {
        return Err(Error::GridMismatch("field does not live on the config grid".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!("strang_step requires tau > 0, got {tau}")));
    }
    let eps2 = cfg.eps * cfg.eps;
    let half = linear_propagate(u, 0.5 * tau, eps2)?;
    let mid = match cfg.potential {
        PotentialSpec::Polynomial => nonlinear_exact(&half, tau)?,
        PotentialSpec::Logarithmic { theta, theta_c } => {
            nonlinear_log_rk(&half, tau, theta, theta_c)?
        }
        PotentialSpec::TernaryConservative => {
            return Err(Error::Config(
                "ternary dynamics advance three coupled fields; use strang_step_ternary".into(),
            ))
        }
    };
    linear_propagate(&mid, 0.5 * tau, eps2)
}

/// One Strang step for the conservative ternary system: half diffusion on
/// every phase, the coupled reaction substep, half diffusion again.
pub fn strang_step_ternary(state: &TernaryState, tau: f64, cfg: &SimConfig) -> Result<TernaryState> {
    if state.grid() != cfg.grid {
        return Err(Error::GridMismatch("state does not live on the config grid".into()));
    }
    if cfg.potential != PotentialSpec::TernaryConservative {
        return Err(Error::Config("strang_step_ternary needs the ternary potential".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::Precondition(format!("strang_step_ternary requires tau > 0, got {tau}")));
    }
    let eps2 = cfg.eps * cfg.eps;
    let h = 0.5 * tau;
    let half = TernaryState::new(
        linear_propagate(&state.u[0], h, eps2)?,
        linear_propagate(&state.u[1], h, eps2)?,
        linear_propagate(&state.u[2], h, eps2)?,
    )?;
    let mid = nonlinear_ternary_rk(&half, tau)?;
    TernaryState::new(
        linear_propagate(&mid.u[0], h, eps2)?,
        linear_propagate(&mid.u[1], h, eps2)?,
        linear_propagate(&mid.u[2], h, eps2)?,
    )
}

/// Draws `n_steps` positive random step sizes from the seeded stream and
/// normalizes them to sum exactly to `t_final`. Uniform draws below `1e−8`
/// are resampled; a stream that yields 1000 such draws in a row for one
/// slot is reported as a degenerate-draw error.
pub fn generate_random_steps(seed: u64, n_steps: usize, t_final: f64) -> Result<Vec<f64>> {
    if n_steps == 0 {
        return Err(Error::Config("random step plan needs at least one step".into()));
    }
    if !(t_final > 0.0) {
        return Err(Error::Config(format!(
            "random step plan needs a positive horizon, got {t_final}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut sig = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let mut draw = rng.next_f64();
        let mut tries = 0;
        while draw < 1e-8 {
            draw = rng.next_f64();
            tries += 1;
            if tries > 1000 {
                return Err(Error::Precondition(format!(
                    "degenerate draw stream: 1000 consecutive uniforms below 1e-8 from seed {seed}"
                )));
            }
        }
        sig.push(draw);
    }
    let total = pairwise_sum(&sig);
    let scale = t_final / total;
    for s in &mut sig {
        *s *= scale;
    }
    Ok(sig)
}

/// Next adaptive step size from the last energy drop:
/// `τ = clamp(tau_max / sqrt(1 + α·(ΔE/τ_prev)²), tau_min, tau_max)`.
/// Non-finite inputs fall back to `tau_min`.
pub fn adaptive_next_tau(prev_energy: f64, curr_energy: f64, prev_tau: f64, p: &AdaptiveParams) -> f64 {
    let de = (curr_energy - prev_energy) / prev_tau;
    let tau = p.tau_max / (1.0 + p.alpha * de * de).sqrt();
    tau.max(p.tau_min).min(p.tau_max)
}

fn validate_common(cfg: &SimConfig) -> Result<()> {
    if !(cfg.eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {}", cfg.eps)));
    }
    if !(cfg.t_final >= 0.0) {
        return Err(Error::Config(format!("t_final must be >= 0, got {}", cfg.t_final)));
    }
    if cfg.record_every == 0 {
        return Err(Error::Config("record_every must be at least 1".into()));
    }
    if let PotentialSpec::Logarithmic { theta, theta_c } = cfg.potential {
        if !(theta > 0.0 && theta_c > 0.0) {
            return Err(Error::Config(format!(
                "logarithmic potential needs positive parameters, got theta={theta}, theta_c={theta_c}"
            )));
        }
    }
    match &cfg.plan {
        StepPlan::Uniform { tau } => {
            if !(*tau > 0.0) {
                return Err(Error::Config(format!("uniform plan needs tau > 0, got {tau}")));
            }
        }
        StepPlan::RandomNormalized { n_steps, horizon, .. } => {
            if *n_steps == 0 {
                return Err(Error::Config("random plan needs at least one step".into()));
            }
            if (horizon - cfg.t_final).abs() > 1e-12 * cfg.t_final.max(1.0) {
                return Err(Error::Config(format!(
                    "random plan horizon {horizon} does not match t_final {}",
                    cfg.t_final
                )));
            }
        }
        StepPlan::Adaptive(p) => {
            if !(p.tau_min > 0.0 && p.tau_min <= p.tau_max) {
                return Err(Error::Config(format!(
                    "adaptive plan needs 0 < tau_min <= tau_max, got {} and {}",
                    p.tau_min, p.tau_max
                )));
            }
            if !(p.alpha >= 0.0) {
                return Err(Error::Config(format!(
                    "adaptive plan needs alpha >= 0, got {}",
                    p.alpha
                )));
            }
        }
    }
    for &ts in &cfg.snapshot_times {
        if !(ts >= 0.0 && ts <= cfg.t_final) {
            return Err(Error::Config(format!(
                "snapshot time {ts} outside [0, {}]",
                cfg.t_final
            )));
        }
    }
    Ok(())
}

/// Shared stepping skeleton: chooses each step size from the plan, lands
/// exactly on snapshot times and on the horizon, and invokes the callbacks.
struct Clock {
    t: f64,
    steps: usize,
    snap_times: Vec<f64>,
    next_snap: usize,
    prev_tau: f64,
}

impl Clock {
    fn new(cfg: &SimConfig) -> Self {
        let mut snap_times = cfg.snapshot_times.clone();
        snap_times.sort_by(f64::total_cmp);
        snap_times.dedup();
        Clock { t: 0.0, steps: 0, snap_times, next_snap: 0, prev_tau: 0.0 }
    }

    /// Snapshot times due at the current instant (handles t = 0 and any
    /// time reached exactly by a step).
    fn snapshot_due(&mut self) -> bool {
        if self.next_snap < self.snap_times.len() && self.snap_times[self.next_snap] <= self.t {
            self.next_snap += 1;
            return true;
        }
        false
    }

    /// Clamps the planned `tau` so the step lands exactly on the next
    /// snapshot time or the horizon. Returns `(tau, landing)`.
    fn clamp(&self, planned: f64, t_final: f64) -> (f64, Option<f64>) {
        let mut target = t_final;
        if self.next_snap < self.snap_times.len() && self.snap_times[self.next_snap] < target {
            target = self.snap_times[self.next_snap];
        }
        if self.t + planned >= target - 1e-12 * target.max(1.0) {
            (target - self.t, Some(target))
        } else {
            (planned, None)
        }
    }

    fn advance(&mut self, tau: f64, landing: Option<f64>) {
        self.steps += 1;
        self.prev_tau = tau;
        self.t = match landing {
            Some(target) => target,
            None => self.t + tau,
        };
    }
}

fn elapsed(cfg: &SimConfig, start: &Instant) -> f64 {
    if cfg.timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    }
}

/// Runs scalar dynamics from `u0` to `t_final`, returning the final field
/// and the recorded trace. Times are exact: every snapshot time and the
/// horizon are landed on by truncating the planned step, so the last row's
/// `t` equals `t_final` (unless `max_steps` cut the run short) and rows
/// have strictly increasing times.
pub fn run(cfg: &SimConfig, u0: &Field) -> Result<(Field, Trace)> {
    validate_common(cfg)?;
    if matches!(cfg.potential, PotentialSpec::TernaryConservative) {
        return Err(Error::Config(
            "scalar run cannot advance the ternary system; use run_ternary".into(),
        ));
    }
    if u0.grid() != cfg.grid {
        return Err(Error::GridMismatch("initial field does not live on the config grid".into()));
    }
    let start = Instant::now();
    let mut u = u0.clone();
    let mut clock = Clock::new(cfg);
    let mut trace = Trace::default();

    let adaptive = matches!(cfg.plan, StepPlan::Adaptive(_));
    let mut e_prev: Option<f64> = None;
    let mut e_curr = energy(&u, &cfg.potential, cfg.eps)?;
    trace.rows.push(TraceRow {
        t: 0.0,
        tau: 0.0,
        energy: e_curr,
        max_norm: u.max_norm(),
        wall_seconds: elapsed(cfg, &start),
    });
    if clock.snapshot_due() {
        trace.snapshots.push((0.0, u.clone()));
    }

    let pregen = match &cfg.plan {
        StepPlan::RandomNormalized { seed, n_steps, horizon } => {
            Some(generate_random_steps(*seed, *n_steps, *horizon)?)
        }
        _ => None,
    };

    while clock.t < cfg.t_final {
        if let Some(m) = cfg.max_steps {
            if clock.steps >= m {
                break;
            }
        }
        let planned = match &cfg.plan {
            StepPlan::Uniform { tau } => *tau,
            StepPlan::RandomNormalized { .. } => {
                let list = pregen.as_ref().expect("pregenerated steps");
                if clock.steps < list.len() {
                    list[clock.steps]
                } else {
                    cfg.t_final - clock.t
                }
            }
            StepPlan::Adaptive(p) => match e_prev {
                Some(ep) => adaptive_next_tau(ep, e_curr, clock.prev_tau, p),
                None => p.tau_min,
            },
        };
        let (tau, landing) = clock.clamp(planned, cfg.t_final);
        if !(tau > 0.0) {
            // A zero-length leg can only arise from a snapshot time
            // coinciding with the current time; take it without stepping.
            if clock.snapshot_due() {
                trace.snapshots.push((clock.t, u.clone()));
                continue;
            }
            break;
        }
        u = strang_step(&u, tau, cfg)?;
        clock.advance(tau, landing);

        let done = clock.t >= cfg.t_final;
        let mut energy_now: Option<f64> = None;
        if adaptive {
            let e = energy(&u, &cfg.potential, cfg.eps)?;
            e_prev = Some(e_curr);
            e_curr = e;
            energy_now = Some(e);
        }
        if clock.steps % cfg.record_every == 0 || clock.steps == 1 || done {
            let e = match energy_now {
                Some(e) => e,
                None => energy(&u, &cfg.potential, cfg.eps)?,
            };
            trace.rows.push(TraceRow {
                t: clock.t,
                tau,
                energy: e,
                max_norm: u.max_norm(),
                wall_seconds: elapsed(cfg, &start),
            });
        }
        if clock.snapshot_due() {
            trace.snapshots.push((clock.t, u.clone()));
        }
    }
    trace.steps = clock.steps;
    Ok((u, trace))
}

/// Runs the conservative ternary dynamics from `state0`, tracking masses
/// and the hyperplane constraint at every step.
pub fn run_ternary(cfg: &SimConfig, state0: &TernaryState) -> Result<(TernaryState, TernaryTrace)> {
    validate_common(cfg)?;
    if cfg.potential != PotentialSpec::TernaryConservative {
        return Err(Error::Config("run_ternary needs the ternary potential".into()));
    }
    if state0.grid() != cfg.grid {
        return Err(Error::GridMismatch("initial state does not live on the config grid".into()));
    }
    let start = Instant::now();
    let mut state = state0.clone();
    let mut clock = Clock::new(cfg);
    let mut trace = TernaryTrace::default();

    let adaptive = matches!(cfg.plan, StepPlan::Adaptive(_));
    let mut e_prev: Option<f64> = None;
    let mut e_curr = energy_ternary(&state, cfg.eps)?;
    let mass0 = [mass(&state.u[0]), mass(&state.u[1]), mass(&state.u[2])];
    let note_constraints = |trace: &mut TernaryTrace, st: &TernaryState| -> ([f64; 3], f64) {
        let m = [mass(&st.u[0]), mass(&st.u[1]), mass(&st.u[2])];
        for l in 0..3 {
            trace.max_mass_drift = trace.max_mass_drift.max((m[l] - mass0[l]).abs());
        }
        let h = st.hyperplane_deviation();
        trace.max_hyperplane = trace.max_hyperplane.max(h);
        (m, h)
    };
    let (m_init, h_init) = note_constraints(&mut trace, &state);
    trace.rows.push(TernaryTraceRow {
        t: 0.0,
        tau: 0.0,
        energy: e_curr,
        max_norm: state.max_norm(),
        mass: m_init,
        hyperplane_max: h_init,
        wall_seconds: elapsed(cfg, &start),
    });
    if clock.snapshot_due() {
        trace.snapshots.push((0.0, contrast_field(&state)));
    }

    let pregen = match &cfg.plan {
        StepPlan::RandomNormalized { seed, n_steps, horizon } => {
            Some(generate_random_steps(*seed, *n_steps, *horizon)?)
        }
        _ => None,
    };

    while clock.t < cfg.t_final {
        if let Some(m) = cfg.max_steps {
            if clock.steps >= m {
                break;
            }
        }
        let planned = match &cfg.plan {
            StepPlan::Uniform { tau } => *tau,
            StepPlan::RandomNormalized { .. } => {
                let list = pregen.as_ref().expect("pregenerated steps");
                if clock.steps < list.len() {
                    list[clock.steps]
                } else {
                    cfg.t_final - clock.t
                }
            }
            StepPlan::Adaptive(p) => match e_prev {
                Some(ep) => adaptive_next_tau(ep, e_curr, clock.prev_tau, p),
                None => p.tau_min,
            },
        };
        let (tau, landing) = clock.clamp(planned, cfg.t_final);
        if !(tau > 0.0) {
            if clock.snapshot_due() {
                trace.snapshots.push((clock.t, contrast_field(&state)));
                continue;
            }
            break;
        }
        state = strang_step_ternary(&state, tau, cfg)?;
        clock.advance(tau, landing);

        let done = clock.t >= cfg.t_final;
        let e = energy_ternary(&state, cfg.eps)?;
        if adaptive {
            e_prev = Some(e_curr);
            e_curr = e;
        }
        let (m, h) = note_constraints(&mut trace, &state);
        if clock.steps % cfg.record_every == 0 || clock.steps == 1 || done {
            trace.rows.push(TernaryTraceRow {
                t: clock.t,
                tau,
                energy: e,
                max_norm: state.max_norm(),
                mass: m,
                hyperplane_max: h,
                wall_seconds: elapsed(cfg, &start),
            });
        }
        if clock.snapshot_due() {
            trace.snapshots.push((clock.t, contrast_field(&state)));
        }
    }
    trace.steps = clock.steps;
    Ok((state, trace))
}

/// The phase-contrast field `½u₁ − u₂` stored in ternary snapshots.
pub fn contrast_field(state: &TernaryState) -> Field {
    let mut f = state.u[0].clone();
    f.scale(0.5);
    f.axpy(-1.0, &state.u[1]);
    f
}
