//! Split-flow building blocks: the spectral diffusion semigroup, its
//! half-step defect, the closed-form cubic flow, the implicit logarithmic
//! flow, and the conservative ternary flow.

use acsplit::functionals::{norm, NormKind};
use acsplit::oracle::ode_rk4;
use acsplit::problems::random_bandlimited;
use acsplit::propagators::{
    linear_propagate, nonlinear_exact, nonlinear_log_rk, nonlinear_ternary_rk, phi_remainder,
    q_defect, PotentialSpec, SdirkTableau, TernaryState,
};
use acsplit::spectral::apply_operator;
use acsplit::{Boundary, Field, Grid};

const THETA: f64 = 0.25;
const THETA_C: f64 = 1.0;

#[test]
fn diffusion_scalar_decay() {
    let grid = Grid::new(64, 64, Boundary::Neumann).unwrap();
    let u = Field::from_fn(grid, |x, _| x.cos());
    let v = linear_propagate(&u, 1.0, 0.01).unwrap();
    let factor = (-0.01_f64).exp();
    let worst = u
        .data()
        .iter()
        .zip(v.data().iter())
        .map(|(a, b)| (factor * a - b).abs())
        .fold(0.0_f64, f64::max);
    println!("cos(x) decay deviation after t=1: {worst:.3e}");
    assert!(worst < 1e-14);
}

#[test]
fn diffusion_time_zero_is_identity() {
    let grid = Grid::new(16, 16, Boundary::Periodic).unwrap();
    let u = random_bandlimited(grid, 11, 5, 0.8).unwrap();
    let v = linear_propagate(&u, 0.0, 0.01).unwrap();
    assert_eq!(u.data(), v.data(), "t = 0 must return the input bit for bit");
}

#[test]
fn diffusion_rejects_bad_arguments() {
    let grid = Grid::new(8, 8, Boundary::Neumann).unwrap();
    let u = Field::zeros(grid);
    assert!(linear_propagate(&u, -0.1, 0.01).is_err(), "negative time");
    assert!(linear_propagate(&u, 0.1, -1.0).is_err(), "negative diffusivity");
    assert!(linear_propagate(&u, f64::NAN, 0.01).is_err(), "NaN time");
}

#[test]
fn defect_of_constant_vanishes() {
    let grid = Grid::new(32, 32, Boundary::Neumann).unwrap();
    let u = Field::constant(grid, 0.7);
    let q = q_defect(&u, 0.1, 0.01).unwrap();
    println!("defect of constant: {:.3e}", q.max_norm());
    assert!(q.max_norm() < 1e-16);
}

#[test]
fn defect_frozen_amplitude() {
    // φ(−5e−4) from the series branch, checked against the direct formula
    // at a magnitude where the direct formula is still accurate enough.
    let phi = phi_remainder(-5e-4);
    println!("phi(-5e-4) = {phi:.10e}");
    assert!((phi - 1.2497916927e-7).abs() < 1e-17);

    // Large-argument branch hits the direct formula: φ(−1) = e⁻¹.
    assert!((phi_remainder(-1.0) - (-1.0_f64).exp()).abs() < 1e-16);

    // cos(x) on the Neumann grid has μ = −1, so the defect field is
    // φ(−τ/2·ε²)·cos(x) whose nodal max sits one half-spacing off the axis.
    let grid = Grid::new(64, 64, Boundary::Neumann).unwrap();
    let u = Field::from_fn(grid, |x, _| x.cos());
    let q = q_defect(&u, 0.1, 0.01).unwrap();
    let got = q.max_norm();
    println!("defect nodal max for cos(x): {got:.10e}");
    assert!((got - 1.2482862639e-7).abs() < 1e-15);
}

#[test]
fn defect_obeys_quadratic_bound() {
    let eps2 = 0.01;
    for (boundary, seed) in [(Boundary::Neumann, 61_u64), (Boundary::Periodic, 62)] {
        let grid = Grid::new(32, 32, boundary).unwrap();
        let v = random_bandlimited(grid, seed, 6, 0.9).unwrap();
        let biharmonic = apply_operator(&v, |mu| (eps2 * mu) * (eps2 * mu));
        let rhs_base = norm(&biharmonic, NormKind::L2).unwrap();
        for tau in [1.0, 0.1, 0.01] {
            let q = norm(&q_defect(&v, tau, eps2).unwrap(), NormKind::L2).unwrap();
            let bound = tau * tau / 8.0 * rhs_base;
            println!(
                "{} tau={tau}: |Q| = {q:.6e}, bound = {bound:.6e}",
                boundary.name()
            );
            assert!(q <= bound * (1.0 + 1e-12), "defect bound violated");
        }
    }
}

#[test]
fn cubic_flow_fixed_points() {
    let grid = Grid::new(8, 8, Boundary::Neumann).unwrap();
    for tau in [0.7, 400.0] {
        let zero = nonlinear_exact(&Field::zeros(grid), tau).unwrap();
        assert_eq!(zero.max_norm(), 0.0, "0 is a fixed point (tau={tau})");
        for sign in [1.0, -1.0] {
            let one = nonlinear_exact(&Field::constant(grid, sign), tau).unwrap();
            let worst = one
                .data()
                .iter()
                .map(|v| (v - sign).abs())
                .fold(0.0_f64, f64::max);
            assert!(worst < 1e-15, "{sign} is a fixed point (tau={tau}): {worst:e}");
        }
    }
}

#[test]
fn cubic_flow_matches_closed_form() {
    // At v = 1/2, τ = ln 2: e^τ v / sqrt(1 + (e^{2τ}−1)v²) = 1/sqrt(1.75).
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let v = nonlinear_exact(&Field::constant(grid, 0.5), 2.0_f64.ln()).unwrap();
    let got = v.at(0, 0);
    println!("cubic flow of 1/2 over ln 2: {got:.16}");
    assert!((got - 0.7559289460184544).abs() < 1e-15);
}

#[test]
fn cubic_flow_matches_scalar_integrator() {
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let tau = 0.8;
    for v0 in [-0.95, -0.25, 0.1, 0.62, 0.99, 1.4] {
        let flow = nonlinear_exact(&Field::constant(grid, v0), tau).unwrap();
        let reference = ode_rk4(v0, &PotentialSpec::Polynomial, tau, 1e-5).unwrap();
        let diff = (flow.at(1, 1) - reference).abs();
        println!("cubic flow vs RK4 at v0={v0}: diff {diff:.3e}");
        assert!(diff < 1e-12);
    }
}

#[test]
fn cubic_flow_contracts_overshoots_and_rejects_divergence() {
    let grid = Grid::new(8, 8, Boundary::Neumann).unwrap();

    // Values past 1 (diffusion interpolation transients) flow back toward 1.
    let over = nonlinear_exact(&Field::constant(grid, 1.5), 0.1).unwrap();
    let v = over.at(0, 0);
    println!("flow of 1.5 over tau=0.1: {v}");
    assert!(v > 1.0 && v < 1.5, "overshoot must contract toward 1: {v}");

    // Anything past 2 marks a diverged run and names the node.
    let mut u = Field::zeros(grid);
    u.data_mut()[8 + 2] = 2.5;
    let err = nonlinear_exact(&u, 0.1).unwrap_err();
    let msg = err.to_string();
    println!("rejection message: {msg}");
    assert!(msg.contains("(2, 1)") && msg.contains("2.5"), "message must name the node: {msg}");
}

#[test]
fn cubic_flow_requires_positive_tau() {
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let u = Field::zeros(grid);
    assert!(nonlinear_exact(&u, 0.0).is_err());
    assert!(nonlinear_exact(&u, -0.5).is_err());
}

#[test]
fn cubic_flow_long_time_is_finite_and_saturating() {
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let tau = 400.0;

    let big = nonlinear_exact(&Field::constant(grid, 0.3), tau).unwrap();
    assert_eq!(big.at(0, 0), 1.0, "0.3 saturates to exactly 1 after tau=400");

    // A denormal-adjacent seed still follows u(τ) ≈ e^τ·u0 while far from 1.
    for sign in [1.0, -1.0] {
        let tiny = nonlinear_exact(&Field::constant(grid, sign * 1e-200), tau).unwrap();
        let got = tiny.at(0, 0);
        let want = sign * (400.0_f64).exp() * 1e-200;
        let rel = ((got - want) / want).abs();
        println!("tiny seed flow: got {got:.6e}, want {want:.6e}, rel {rel:.3e}");
        assert!(got.is_finite(), "long-time flow must stay finite");
        assert!(rel < 1e-12);
    }

    // Intermediate log-scale magnitude exercises the w/sqrt(1+w²) path.
    let mid = nonlinear_exact(&Field::constant(grid, 1e-170), 374.0).unwrap();
    let w = (374.0_f64).exp() * 1e-170;
    let want = w / (1.0 + w * w).sqrt();
    assert!(((mid.at(0, 0) - want) / want).abs() < 1e-12);
}

#[test]
fn sdirk_tableau_values() {
    let t = SdirkTableau::default();
    let a = 1.0 + std::f64::consts::SQRT_2 / 2.0;
    assert_eq!(t.a, a);
    assert_eq!(t.stage_matrix, [[a, 0.0], [1.0 - 2.0 * a, a]]);
    assert_eq!(t.weights, [0.5, 0.5]);
    assert_eq!(t.abscissae, [a, 1.0 - a]);
}

#[test]
fn log_flow_fixed_points() {
    let grid = Grid::new(8, 8, Boundary::Neumann).unwrap();
    let zero = nonlinear_log_rk(&Field::zeros(grid), 0.05, THETA, THETA_C).unwrap();
    assert!(zero.max_norm() < 1e-15, "0 is a fixed point: {:e}", zero.max_norm());

    // Nontrivial equilibrium of θ_c·u = (θ/2)·ln((1+u)/(1−u)) at θ = 1/4,
    // θ_c = 1, found by bisection to 12 digits.
    let u_star = 0.999325673015;
    let fixed = nonlinear_log_rk(&Field::constant(grid, u_star), 0.05, THETA, THETA_C).unwrap();
    let drift = (fixed.at(0, 0) - u_star).abs();
    println!("equilibrium drift over one step: {drift:.3e}");
    assert!(drift < 1e-10);
}

#[test]
fn log_flow_matches_scalar_integrator() {
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let tau = 0.002;
    let potential = PotentialSpec::Logarithmic { theta: THETA, theta_c: THETA_C };
    for v0 in [-0.8, -0.3, 0.2, 0.9] {
        let flow = nonlinear_log_rk(&Field::constant(grid, v0), tau, THETA, THETA_C).unwrap();
        let reference = ode_rk4(v0, &potential, tau, 1e-6).unwrap();
        let diff = (flow.at(0, 0) - reference).abs();
        println!("log flow vs RK4 at v0={v0}: diff {diff:.3e}");
        assert!(diff < 1e-7, "one implicit step vs integrated ODE: {diff:e}");
    }
}

#[test]
fn log_flow_rejects_out_of_domain() {
    let grid = Grid::new(8, 8, Boundary::Neumann).unwrap();
    assert!(
        nonlinear_log_rk(&Field::constant(grid, 1.0), 0.01, THETA, THETA_C).is_err(),
        "|v| = 1 sits outside the open domain"
    );
    let mut u = Field::zeros(grid);
    u.data_mut()[3] = -1.2;
    let msg = nonlinear_log_rk(&u, 0.01, THETA, THETA_C).unwrap_err().to_string();
    println!("rejection message: {msg}");
    assert!(msg.contains("(3, 0)"), "message must name the node: {msg}");
}

#[test]
fn log_flow_rejects_non_monotone_tau() {
    // The stage equation stays uniquely solvable while τ·a·(θ_c − θ) < 1;
    // θ = 1/4, θ_c = 1 caps τ just below 0.79.
    let grid = Grid::new(4, 4, Boundary::Neumann).unwrap();
    let u = Field::zeros(grid);
    assert!(nonlinear_log_rk(&u, 1.0, THETA, THETA_C).is_err());
    assert!(nonlinear_log_rk(&u, 0.5, THETA, THETA_C).is_ok());
}

#[test]
fn ternary_pure_phase_is_fixed() {
    let grid = Grid::new(8, 8, Boundary::Periodic).unwrap();
    let state = TernaryState::new(
        Field::constant(grid, 1.0),
        Field::zeros(grid),
        Field::zeros(grid),
    )
    .unwrap();
    assert_eq!(state.hyperplane_deviation(), 0.0);
    let next = nonlinear_ternary_rk(&state, 0.2).unwrap();
    let worst = (next.u[0].max_norm() - 1.0)
        .abs()
        .max(next.u[1].max_norm())
        .max(next.u[2].max_norm());
    println!("pure-phase drift: {worst:.3e}");
    assert!(worst < 1e-15);
}

#[test]
fn ternary_flow_preserves_means_and_hyperplane() {
    use acsplit::problems::random_ternary;
    let grid = Grid::new(16, 16, Boundary::Periodic).unwrap();
    let state = random_ternary(grid, 9);
    let before: Vec<f64> = state.u.iter().map(Field::mean).collect();
    let next = nonlinear_ternary_rk(&state, 0.1).unwrap();
    for (l, (b, field)) in before.iter().zip(next.u.iter()).enumerate() {
        let drift = (field.mean() - b).abs();
        println!("phase {l} mean drift: {drift:.3e}");
        assert!(drift < 1e-14, "phase {l} mean must be conserved: {drift:e}");
    }
    let hyper = next.hyperplane_deviation();
    println!("hyperplane deviation after one flow: {hyper:.3e}");
    assert!(hyper <= state.hyperplane_deviation() + 1e-13);
}

#[test]
fn ternary_flow_rejects_large_tau() {
    let grid = Grid::new(8, 8, Boundary::Periodic).unwrap();
    let state = TernaryState::new(
        Field::constant(grid, 1.0),
        Field::zeros(grid),
        Field::zeros(grid),
    )
    .unwrap();
    assert!(nonlinear_ternary_rk(&state, 1.2).is_err());
}
