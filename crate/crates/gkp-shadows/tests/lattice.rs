use approx::assert_abs_diff_eq;
use gkp_shadows::lattice::*;
use gkp_shadows::{Complex, GkpCode, GkpError, LatticeBasis};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn basis(rows: [[f64; 2]; 2]) -> LatticeBasis {
    LatticeBasis::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn brute_cvp(x: &[f64], m: &LatticeBasis, box_r: i64) -> Vec<f64> {
    let mut best = (f64::INFINITY, vec![0.0; 2]);
    for a in -box_r..=box_r {
        for b in -box_r..=box_r {
            let v = m.point(&[a, b]);
            let d = (x[0] - v[0]).powi(2) + (x[1] - v[1]).powi(2);
            if d < best.0 - 1e-12 {
                best = (d, v);
            }
        }
    }
    best.1
}

#[test]
fn dual_pairing_is_identity() {
    for code in [GkpCode::square_qubit(), GkpCode::hexagonal_qubit()] {
        let m = code.basis.matrix();
        let pairing = code.dual_basis.matrix() * symplectic_form(1) * m.transpose();
        assert_abs_diff_eq!(pairing, DMatrix::identity(2, 2), epsilon = 1e-12);
    }
}

#[test]
fn square_code_dual_is_half_lattice() {
    let code = GkpCode::square_qubit();
    let half = code.basis.scaled(0.5).unwrap();
    for i in 0..2 {
        assert!(half.contains(&code.dual_basis.row(i), 1e-10));
        assert!(code.dual_basis.contains(&half.row(i), 1e-10));
    }
}

#[test]
fn hexagonal_dual_determinant() {
    let code = GkpCode::hexagonal_qubit();
    assert_abs_diff_eq!(code.dual_basis.covolume(), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(code.basis.covolume(), 2.0, epsilon = 1e-12);
}

#[test]
fn unit_lattice_is_self_dual() {
    let z2 = basis([[1.0, 0.0], [0.0, 1.0]]);
    let d = dual_basis(&z2).unwrap();
    for i in 0..2 {
        assert!(z2.contains(&d.row(i), 1e-12));
        assert!(d.contains(&z2.row(i), 1e-12));
    }
}

#[test]
fn double_dual_generates_original() {
    let m = basis([[1.3, 0.2], [-0.4, 0.9]]);
    let dd = dual_basis(&dual_basis(&m).unwrap()).unwrap();
    for i in 0..2 {
        assert!(m.contains(&dd.row(i), 1e-10));
        assert!(dd.contains(&m.row(i), 1e-10));
    }
}

#[test]
fn gram_matrices() {
    let two_j = DMatrix::from_row_slice(2, 2, &[0i64, 2, -2, 0]);
    assert_eq!(GkpCode::square_qubit().gram, two_j);
    assert_eq!(GkpCode::hexagonal_qubit().gram, two_j);
    let bad = basis([[1.3, 0.0], [0.0, 1.3]]);
    assert!(matches!(symplectic_gram(&bad), Err(GkpError::InvalidLattice(_))));
    let unimodular = basis([[1.0, 0.5], [0.0, 1.0]]);
    let g = symplectic_gram(&unimodular).unwrap();
    assert_eq!(g, g.transpose().map(|v| -v));
    assert_eq!(g[(0, 0)], 0);
}

#[test]
fn code_generator_is_gram_times_dual() {
    for code in [GkpCode::square_qubit(), GkpCode::hexagonal_qubit()] {
        let a = code.gram.map(|v| v as f64);
        assert_abs_diff_eq!(a * code.dual_basis.matrix(), code.basis.matrix().clone(), epsilon = 1e-10);
    }
}

#[test]
fn singular_basis_is_rejected() {
    let err = LatticeBasis::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
    assert!(matches!(err, Err(GkpError::Rank(_))));
}

#[test]
fn basis_json_round_trip() {
    let code = GkpCode::hexagonal_qubit();
    let back = GkpCode::from_json(&code.to_json()).unwrap();
    assert_abs_diff_eq!(back.basis.matrix(), code.basis.matrix(), epsilon = 1e-15);
    assert_eq!(back.d, 2);
    assert_eq!(GkpCode::from_json(&serde_json::json!("square")).unwrap(), GkpCode::square_qubit());
}

#[test]
fn cvp_examples() {
    let code = GkpCode::square_qubit();
    assert_eq!(cvp(&[0.0, 0.0], &code.basis), vec![0.0, 0.0]);
    assert_abs_diff_eq!(norm(&cvp(&[0.6, 0.0], &code.basis)), 0.0, epsilon = 1e-15);
    let v = cvp(&[0.9, 0.0], &code.basis);
    assert_abs_diff_eq!(v[0], 2f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn cvp_tie_break_is_lexicographic() {
    let z2 = basis([[1.0, 0.0], [0.0, 1.0]]);
    let (c, _) = cvp_with_coefficients(&[0.5, 0.5], &z2);
    assert_eq!(c, vec![0, 0]);
    let (c, _) = cvp_with_coefficients(&[-0.5, 0.0], &z2);
    assert_eq!(c, vec![-1, 0]);
}

proptest! {
    #[test]
    fn cvp_matches_brute_force(x in -3.0f64..3.0, y in -3.0f64..3.0, hex in any::<bool>()) {
        let code = if hex { GkpCode::hexagonal_qubit() } else { GkpCode::square_qubit() };
        for m in [&code.basis, &code.dual_basis] {
            let v = cvp(&[x, y], m);
            let b = brute_cvp(&[x, y], m, 12);
            let dv = (x - v[0]).hypot(y - v[1]);
            let db = (x - b[0]).hypot(y - b[1]);
            prop_assert!((dv - db).abs() < 1e-12);
        }
    }

    #[test]
    fn inner_ball_is_shell_zero(r in 0.0f64..0.999, t in 0.0f64..6.3) {
        let code = GkpCode::hexagonal_qubit();
        let rho = lattice_constants(&code.dual_basis).unwrap().packing_radius;
        prop_assert_eq!(shell_index(&[r * rho * t.cos(), r * rho * t.sin()], &code), 0);
    }

    #[test]
    fn shell_index_matches_scaled_brute_force(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let code = GkpCode::hexagonal_qubit();
        let k = shell_index(&[x, y], &code);
        for j in 0..=k {
            let scaled = code.dual_basis.scaled((2 * j + 1) as f64).unwrap();
            let v = brute_cvp(&[x, y], &scaled, 8);
            prop_assert_eq!(norm(&v) < 1e-12, j == k);
        }
    }
}

#[test]
fn shell_index_near_shortest_dual_vector() {
    let code = GkpCode::hexagonal_qubit();
    let v = code.dual_basis.row(0);
    let x = [0.99 * v[0], 0.99 * v[1]];
    assert_eq!(shell_index(&x, &code), 1);
    assert_eq!(shell_index(&[0.0, 0.0], &code), 0);
}

#[test]
fn code_distances() {
    assert_abs_diff_eq!(GkpCode::square_qubit().distance(), 2f64.powf(-0.5), epsilon = 1e-12);
    assert_abs_diff_eq!(GkpCode::hexagonal_qubit().distance(), 3f64.powf(-0.25), epsilon = 1e-12);
}

#[test]
fn lattice_constants_of_unit_and_a2() {
    let c = lattice_constants(&basis([[1.0, 0.0], [0.0, 1.0]])).unwrap();
    assert_abs_diff_eq!(c.lambda1, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.covering_radius, 0.5f64.sqrt(), epsilon = 1e-12);
    let a2 = LatticeBasis::new(a2_basis()).unwrap();
    let c = lattice_constants(&a2).unwrap();
    let l1 = (2.0 / 3f64.sqrt()).sqrt();
    assert_abs_diff_eq!(c.lambda1, l1, epsilon = 1e-12);
    assert_abs_diff_eq!(c.covering_radius, l1 / 3f64.sqrt(), epsilon = 1e-12);
    assert!(c.packing_radius <= c.covering_radius);
}

#[test]
fn four_mode_covering_radius_is_unsupported() {
    let m = LatticeBasis::new(DMatrix::identity(6, 6)).unwrap();
    assert!(matches!(lattice_constants(&m), Err(GkpError::Unsupported(_))));
}

#[test]
fn two_mode_covering_radius_of_unit_lattice() {
    let m = LatticeBasis::new(DMatrix::identity(4, 4)).unwrap();
    assert_abs_diff_eq!(lattice_constants(&m).unwrap().covering_radius, 1.0, epsilon = 1e-9);
}

fn series(q: f64) -> f64 {
    (-40i64..=40).map(|k| q.powi((k * k) as i32)).sum()
}

#[test]
fn riemann_theta_a2_constant() {
    let g = a2_basis() * a2_basis().transpose();
    let omega = g.map(|v| Complex::new(0.0, v));
    let z = [Complex::new(0.0, 0.0); 2];
    let th = riemann_theta(&z, &omega, 6).unwrap();
    assert!((th.re - 1.1596).abs() < 5e-4);
    assert_abs_diff_eq!(th.im, 0.0, epsilon = 1e-12);
    let auto = riemann_theta_auto(&z, &omega).unwrap();
    assert_abs_diff_eq!(auto.re, 1.1595952669639282, epsilon = 1e-12);
}

#[test]
fn riemann_theta_diagonal_factorises() {
    let omega = DMatrix::from_diagonal_element(2, 2, Complex::new(0.0, 1.0));
    let z = [Complex::new(0.0, 0.0); 2];
    let th = riemann_theta(&z, &omega, 8).unwrap();
    assert_abs_diff_eq!(th.re, series((-std::f64::consts::PI).exp()).powi(2), epsilon = 1e-13);
    let big = DMatrix::from_diagonal_element(2, 2, Complex::new(0.0, 50.0));
    assert_abs_diff_eq!(riemann_theta(&z, &big, 3).unwrap().re, 1.0, epsilon = 1e-12);
}

#[test]
fn riemann_theta_rejects_indefinite_imaginary_part() {
    let omega = DMatrix::from_row_slice(2, 2, &[Complex::new(0.0, 1.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, -1.0)]);
    let z = [Complex::new(0.0, 0.0); 2];
    assert!(matches!(riemann_theta(&z, &omega, 4), Err(GkpError::Divergence(_))));
}

#[test]
fn riemann_theta_converges_at_auto_truncation() {
    let g = a2_basis() * a2_basis().transpose();
    let omega = g.map(|v| Complex::new(0.3 * v, 0.7 * v));
    let z = [Complex::new(0.2, 0.1), Complex::new(-0.3, 0.05)];
    let lmin = (g * 0.7).symmetric_eigenvalues().min();
    let t = theta_auto_truncation(lmin);
    let a = riemann_theta(&z, &omega, t).unwrap();
    let b = riemann_theta(&z, &omega, t + 1).unwrap();
    assert!((a - b).norm() < 1e-12);
}

#[test]
fn lattice_theta_examples() {
    let z2 = basis([[1.0, 0.0], [0.0, 1.0]]);
    let th = lattice_theta(&z2, Complex::new(0.0, 1.0), 8).unwrap();
    assert_abs_diff_eq!(th.re, series((-2.0 * std::f64::consts::PI).exp()).powi(2), epsilon = 1e-13);
    assert_abs_diff_eq!(lattice_theta_imag(&z2, 40.0).unwrap(), 1.0, epsilon = 1e-12);
    assert!(matches!(lattice_theta(&z2, Complex::new(1.0, 0.0), 4), Err(GkpError::Divergence(_))));
}

#[test]
fn lattice_theta_two_routes_agree() {
    let code = GkpCode::hexagonal_qubit();
    let sigma: f64 = 0.2;
    let y = sigma * sigma / (4.0 * std::f64::consts::PI);
    let direct = lattice_theta_imag(&code.dual_basis, y).unwrap();
    let m = code.dual_basis.matrix();
    let omega = (m * m.transpose()).map(|v| Complex::new(0.0, 2.0 * y * v));
    let zero = [Complex::new(0.0, 0.0); 2];
    let via = riemann_theta_auto(&zero, &omega).unwrap();
    assert!((direct - via.re).abs() < 1e-10 * direct);
    let boxed = lattice_theta(&code.dual_basis, Complex::new(0.0, y), 120).unwrap();
    assert!((direct - boxed.re).abs() < 1e-10 * direct);
}

#[test]
fn logical_pauli_reps_are_shortest() {
    let code = GkpCode::hexagonal_qubit();
    let reps = code.logical_pauli_reps().unwrap();
    assert_eq!(reps[0], vec![0.0, 0.0]);
    for r in &reps[1..] {
        assert_abs_diff_eq!(norm(r), code.distance(), epsilon = 1e-12);
        assert!(code.dual_basis.contains(r, 1e-10));
        assert!(!code.basis.contains(r, 1e-6));
    }
}

#[test]
fn voronoi_cell_area_is_covolume() {
    for code in [GkpCode::square_qubit(), GkpCode::hexagonal_qubit()] {
        let cell = voronoi_cell_2d(&code.dual_basis).unwrap();
        assert_abs_diff_eq!(polygon_area(&cell).abs(), code.dual_basis.covolume(), epsilon = 1e-12);
    }
}
