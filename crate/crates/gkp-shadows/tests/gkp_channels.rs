use approx::assert_abs_diff_eq;
use gkp_shadows::gkp_channels::*;
use gkp_shadows::{GkpCode, GkpError};
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn heterodyne_shells_hexagonal() {
    let code = GkpCode::hexagonal_qubit();
    let s = heterodyne_shell_probs(&code, 1_000_000, 17).unwrap();
    assert_eq!(s.p0 + s.p1, 1.0);
    assert!(s.p0 <= 0.455 + 3.0 * s.stderr, "p0 = {}", s.p0);
    assert!((2.0 * s.p0 - 1.0).abs() >= 0.09 - 3.0 * s.alpha_shell_stderr);
    assert_abs_diff_eq!(s.shell_frequencies.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(s.coset_probabilities.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    assert_eq!(s.samples, 1_000_000);
}

#[test]
fn heterodyne_shells_reproducible() {
    let code = GkpCode::hexagonal_qubit();
    let a = heterodyne_shell_probs(&code, 200_000, 1).unwrap();
    let b = heterodyne_shell_probs(&code, 200_000, 2).unwrap();
    let combined = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.p0 - b.p0).abs() < 3.0 * combined);
    let again = heterodyne_shell_probs(&code, 200_000, 1).unwrap();
    assert_eq!(a, again);
}

#[test]
fn heterodyne_needs_a_qubit_code() {
    let code = GkpCode::scaled(&DMatrix::identity(2, 2), 3).unwrap();
    assert!(matches!(heterodyne_shell_probs(&code, 100, 0), Err(GkpError::Unsupported(_))));
    assert!(heterodyne_coefficients(&code).is_err());
}

#[test]
fn p0_series_bound() {
    let code = GkpCode::hexagonal_qubit();
    let bound = heterodyne_p0_bound(&code).unwrap();
    assert_abs_diff_eq!(bound, 0.455, epsilon = 1e-3);
    let sums = heterodyne_p0_series(&code, 40).unwrap();
    assert!(sums.windows(2).all(|w| w[1] >= w[0]));
    assert!((sums[20] - sums[40]).abs() < 1e-10);
    assert!(heterodyne_p0_bound(&GkpCode::square_qubit()).is_err());
}

/// Closed-form decoded heterodyne factor for the square code, where the
/// Voronoi window factorises into sinc functions:
/// `alpha_X = sum_m (-1)^m exp(-2 pi (m + 1/2)^2) / (pi (m + 1/2))`.
fn square_alpha_x() -> f64 {
    (-20i64..20)
        .map(|m| {
            let t = m as f64 + 0.5;
            (-1f64).powi(m as i32) * (-2.0 * PI * t * t).exp() / (PI * t)
        })
        .sum()
}

#[test]
fn heterodyne_coefficients_match_closed_forms() {
    let sq = heterodyne_coefficients(&GkpCode::square_qubit()).unwrap();
    let ax = square_alpha_x();
    assert_abs_diff_eq!(sq.alpha, 2.0 * ax / 3.0, epsilon = 1e-10);
    assert_abs_diff_eq!(sq.alpha + sq.beta, 1.0, epsilon = 1e-15);
    let hex = heterodyne_coefficients(&GkpCode::hexagonal_qubit()).unwrap();
    assert_abs_diff_eq!(hex.alpha, 0.19705563, epsilon = 1e-7);
    assert_eq!(hex.method, ChannelMethod::Heterodyne);
    assert!(hex.is_invertible());
}

#[test]
fn click_coefficients_hexagonal() {
    let c = click_coefficients(&GkpCode::hexagonal_qubit(), ClickQuadrature::default()).unwrap();
    assert_abs_diff_eq!(c.theta, 1.1596, epsilon = 5e-4);
    assert_abs_diff_eq!(c.theta, 1.1595952669639278, epsilon = 1e-9);
    assert_abs_diff_eq!(c.i1, 1.4787181951, epsilon = 1e-6);
    assert_abs_diff_eq!(c.i2, 1.6399153534, epsilon = 1e-6);
    assert_abs_diff_eq!(c.i1, 1.493, epsilon = 0.015);
    assert_abs_diff_eq!(c.i2, 1.64, epsilon = 0.015);
    assert!(c.i1_error < 1e-5 && c.i2_error < 1e-5);
    assert_abs_diff_eq!(c.alpha, 1.0 - 2.0 * c.theta + c.i1, epsilon = 1e-15);
    assert_abs_diff_eq!(c.alpha_plus_beta - c.alpha, c.i2 - c.i1, epsilon = 1e-12);
    assert_abs_diff_eq!(c.coeffs.alpha + c.coeffs.beta, c.alpha_plus_beta, epsilon = 1e-12);
    assert!(click_coefficients(&GkpCode::square_qubit(), ClickQuadrature::default()).is_err());
}

#[test]
fn parity_bound_square_code() {
    let b = parity_fidelity_bound(&GkpCode::square_qubit(), 0.3).unwrap();
    assert_abs_diff_eq!(b.fidelity_lower, 0.5625, epsilon = 1e-12);
    assert_abs_diff_eq!(b.k, 1.0, epsilon = 1e-12);
    assert!(b.p_upper < 0.5);
    assert_abs_diff_eq!(b.p_upper, b.p_upper_reparameterized, epsilon = 1e-12);
    assert!(parity_fidelity_bound(&GkpCode::square_qubit(), 0.0).is_err());
}

#[test]
fn parity_bound_two_modes() {
    let code = GkpCode::scaled(&DMatrix::identity(4, 4), 2).unwrap();
    let b = parity_fidelity_bound(&code, 0.5).unwrap();
    assert_abs_diff_eq!(b.k, 2.0, epsilon = 1e-9);
    assert_abs_diff_eq!(b.p_upper_reparameterized, 0.5 * (1.0 - 2f64.powf(-2.0 * 3.0)), epsilon = 1e-12);
    assert!(b.p_upper < 0.5);
}

#[test]
fn depolarizing_algebra() {
    let id = DepolarizingCoefficients::new(1.0, 0.0, ChannelMethod::Parity, 0.0).unwrap();
    let x = [1.0, 0.3, -0.2, 0.5];
    assert_eq!(invert_depolarizing(&id, &x).unwrap(), x.to_vec());
    let c = DepolarizingCoefficients::new(0.32, 0.15, ChannelMethod::Click, 0.0).unwrap();
    let y = invert_depolarizing(&c, &[1.0, 0.5, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(y[0], (1.0 - 0.15) / 0.32, epsilon = 1e-15);
    assert_abs_diff_eq!(y[1], 0.5 / 0.32, epsilon = 1e-15);
    assert_eq!(&y[2..], &[0.0, 0.0]);
    let zero = DepolarizingCoefficients::new(1e-9, 0.5, ChannelMethod::Click, 0.0).unwrap();
    assert!(matches!(invert_depolarizing(&zero, &x), Err(GkpError::NonInvertible(_))));
    assert!(DepolarizingCoefficients::new(1.5, 0.0, ChannelMethod::Click, 0.0).is_err());
}

proptest! {
    #[test]
    fn invert_after_forward_is_identity(
        alpha in prop_oneof![-1.0f64..-0.01, 0.01f64..1.0],
        beta in -1.0f64..1.0,
        x in proptest::collection::vec(-1.0f64..1.0, 4),
    ) {
        let c = DepolarizingCoefficients::new(alpha, beta, ChannelMethod::Heterodyne, 0.0).unwrap();
        let back = invert_depolarizing(&c, &depolarize_forward(&c, &x)).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-12 / alpha.abs().min(1.0));
        }
    }
}
