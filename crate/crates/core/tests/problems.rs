//! Initial-condition generators: the seven-circle configuration, the disk
//! indicator, and the seeded random fields.

use acsplit::problems::{
    disk_indicator, random_bandlimited, random_ternary, seven_circles, seven_circles_value,
    SEVEN_CIRCLES,
};
use acsplit::spectral::{forward, signed_frequency, Coeffs};
use acsplit::{Boundary, Grid};
use std::f64::consts::PI;

#[test]
fn seven_circles_is_minus_one_off_the_circles() {
    // The corner node of the 64² Neumann grid is far from every circle, so
    // no tail term fires and the value is the exact background −1.
    let grid = Grid::new(64, 64, Boundary::Neumann).unwrap();
    let u = seven_circles(grid, 0.5);
    assert_eq!(u.at(0, 0), -1.0);
    assert_eq!(u.at(63, 63), -1.0);
}

#[test]
fn seven_circles_center_value() {
    // Node (32, 32) of the periodic grid lies exactly at (π, π), the center
    // of the sixth circle (radius π/4): u = −1 + 2·exp(−ε²·16/π²).
    let eps = 0.5;
    let want = -1.0 + 2.0 * (-eps * eps * 16.0 / (PI * PI)).exp();
    let grid = Grid::new(64, 64, Boundary::Periodic).unwrap();
    let u = seven_circles(grid, eps);
    println!("value at the (π, π) circle center: {}", u.at(32, 32));
    assert!((u.at(32, 32) - want).abs() < 1e-15);
    assert!((seven_circles_value(PI, PI, eps) - want).abs() < 1e-15);
}

#[test]
fn seven_circles_stays_in_the_invariant_band() {
    // The circles are disjoint, so each node carries at most one positive
    // tail: values stay in [−1, 1).
    for boundary in [Boundary::Neumann, Boundary::Periodic] {
        let grid = Grid::new(128, 128, boundary).unwrap();
        let u = seven_circles(grid, 0.5);
        println!("{} max |u| = {}", boundary.name(), u.max_norm());
        assert!(u.max_norm() <= 1.0);
    }
    assert_eq!(SEVEN_CIRCLES.len(), 7);
}

#[test]
fn disk_indicator_is_a_two_level_set() {
    let grid = Grid::new(64, 64, Boundary::Neumann).unwrap();
    let u = disk_indicator(grid);
    for &v in u.data() {
        assert!(v == 0.25 || v == -0.25, "unexpected level {v}");
    }
    // Center inside, corner outside.
    assert_eq!(u.at(32, 32), 0.25);
    assert_eq!(u.at(0, 0), -0.25);
    let inside = u.data().iter().filter(|&&v| v > 0.0).count();
    let frac = inside as f64 / u.data().len() as f64;
    // Disk area / domain area = 1.2π/4π² ≈ 0.0955.
    println!("inside fraction: {frac:.4}");
    assert!((frac - 1.2 / (4.0 * PI)).abs() < 0.01);
}

#[test]
fn random_ternary_sits_on_the_simplex() {
    let grid = Grid::new(32, 32, Boundary::Periodic).unwrap();
    let state = random_ternary(grid, 42);
    let dev = state.hyperplane_deviation();
    println!("simplex deviation: {dev:.3e}");
    assert!(dev < 1e-15);
    for field in &state.u {
        assert!(field.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
    // Same seed, same state, bit for bit.
    let again = random_ternary(grid, 42);
    for l in 0..3 {
        assert_eq!(state.u[l].data(), again.u[l].data());
    }
    let other = random_ternary(grid, 43);
    assert!(state.u[0].data() != other.u[0].data(), "different seeds must differ");
}

#[test]
fn random_bandlimited_hits_its_amplitude_and_band() {
    for (boundary, seed) in [(Boundary::Neumann, 7777_u64), (Boundary::Periodic, 7788)] {
        let grid = Grid::new(32, 32, boundary).unwrap();
        let amp = 0.9;
        let u = random_bandlimited(grid, seed, 6, amp).unwrap();
        assert!((u.max_norm() - amp).abs() < 1e-15, "rescaled max-norm");

        // All energy sits strictly below mode 6 in each direction.
        let s = forward(&u);
        let stray = match s.coeffs() {
            Coeffs::Cosine(a) => {
                let nx = grid.nx();
                (0..grid.ny() * nx)
                    .filter(|idx| idx % nx >= 6 || idx / nx >= 6)
                    .map(|idx| a[idx].abs())
                    .fold(0.0_f64, f64::max)
            }
            Coeffs::HalfComplex(c) => {
                // Real-part synthesis mirrors row modes into their conjugate
                // rows, so the band is measured in signed row frequency.
                let nxh = grid.nx() / 2 + 1;
                (0..grid.ny() * nxh)
                    .filter(|idx| {
                        idx % nxh >= 6 || signed_frequency(idx / nxh, grid.ny()).abs() >= 6.0
                    })
                    .map(|idx| c[idx].norm())
                    .fold(0.0_f64, f64::max)
            }
        };
        println!("{} stray coefficient mass: {stray:.3e}", boundary.name());
        assert!(stray < 1e-14, "{} leaks outside the band: {stray:e}", boundary.name());

        // Determinism.
        let again = random_bandlimited(grid, seed, 6, amp).unwrap();
        assert_eq!(u.data(), again.data());
    }
}

#[test]
fn random_bandlimited_guards() {
    let grid = Grid::new(16, 16, Boundary::Neumann).unwrap();
    assert!(random_bandlimited(grid, 1, 8, 1.0).is_err(), "band must fit the grid");
    assert!(random_bandlimited(grid, 1, 4, -1.0).is_err(), "negative amplitude");
    let zero = random_bandlimited(grid, 1, 4, 0.0).unwrap();
    assert_eq!(zero.max_norm(), 0.0, "zero amplitude gives the zero field");
}
