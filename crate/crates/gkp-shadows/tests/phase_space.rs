use approx::assert_abs_diff_eq;
use gkp_shadows::phase_space::*;
use gkp_shadows::stats::{chi_square, mean_stderr};
use gkp_shadows::{Complex, GkpCode, GkpError, SymplecticMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Midpoint rule over `[-r, r]^2` with `n` points per axis.
fn integrate(f: impl Fn(&[f64]) -> f64, r: f64, n: usize) -> f64 {
    let h = 2.0 * r / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = [-r + (i as f64 + 0.5) * h, -r + (j as f64 + 0.5) * h];
            acc += f(&x);
        }
    }
    acc * h * h
}

fn grid(delta: f64) -> StateModel {
    StateModel::from_name(&format!("grid:hexagonal,delta={delta}")).unwrap()
}

#[test]
fn vacuum_conventions() {
    let vac = make_vacuum(1);
    assert_abs_diff_eq!(vac.wigner(&[0.0, 0.0]), 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(integrate(|x| vac.wigner(x), 3.0, 300), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(integrate(|x| vac.wigner(x).powi(2), 3.0, 300), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(vac.overlap(&vac), 1.0, epsilon = 1e-12);
    let vac2 = make_vacuum(2);
    assert_abs_diff_eq!(vac2.wigner(&[0.0; 4]), 4.0, epsilon = 1e-13);
}

#[test]
fn coherent_state_peaks_at_its_centre() {
    let a = [0.3, -0.2];
    let c = make_coherent(&a);
    assert_abs_diff_eq!(c.wigner(&a), 2.0, epsilon = 1e-14);
    let off = [0.1, 0.07];
    let plus = c.wigner(&[a[0] + off[0], a[1] + off[1]]);
    let minus = c.wigner(&[a[0] - off[0], a[1] - off[1]]);
    assert_abs_diff_eq!(plus, minus, epsilon = 1e-14);
    assert!(plus < 2.0);
}

#[test]
fn coherent_overlaps_follow_closed_form() {
    let a: [f64; 2] = [0.3, 0.1];
    let b: [f64; 2] = [-0.2, 0.45];
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let ov = make_coherent(&a).overlap(&make_coherent(&b));
    assert_abs_diff_eq!(ov, (-PI * d2).exp(), epsilon = 1e-12);
}

#[test]
fn husimi_of_vacuum_and_normalisation() {
    let vac = make_vacuum(1);
    for a in [[0.0, 0.0], [0.3, -0.4], [1.0, 0.2]] {
        let want = (-PI * (a[0] * a[0] + a[1] * a[1])).exp();
        assert_abs_diff_eq!(vac.husimi(&a), want, epsilon = 1e-13);
    }
    let g = grid(0.3);
    assert_abs_diff_eq!(integrate(|x| g.husimi(x), 6.0, 240), 1.0, epsilon = 1e-6);
}

#[test]
fn husimi_is_vacuum_smoothing_of_wigner() {
    let g = grid(0.4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a = [rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)];
        let conv = integrate(
            |x| {
                let d2 = (x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2);
                g.wigner(x) * 2.0 * (-2.0 * PI * d2).exp()
            },
            5.0,
            500,
        );
        assert!((conv - g.husimi(&a)).abs() < 1e-6);
        assert!(g.husimi(&a) > -1e-9);
    }
}

#[test]
fn characteristic_at_origin_is_one() {
    for s in [make_vacuum(1), make_coherent(&[0.4, 0.1]), grid(0.3), make_thermal(1, 0.3).unwrap()] {
        let chi = s.characteristic(&[0.0, 0.0]);
        assert_abs_diff_eq!(chi.re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(chi.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total_weight().re, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn vacuum_characteristic_function() {
    let vac = make_vacuum(1);
    let eta = [0.3, -0.5];
    let want = (-PI * (eta[0] * eta[0] + eta[1] * eta[1]) / 2.0).exp();
    assert_abs_diff_eq!(vac.characteristic(&eta).re, want, epsilon = 1e-14);
}

#[test]
fn characteristic_matches_quadrature() {
    let g = grid(0.5);
    let eta = [0.4, 0.25];
    let re = integrate(
        |x| g.wigner(x) * (2.0 * PI * (x[0] * eta[1] - x[1] * eta[0])).cos(),
        5.0,
        400,
    );
    assert_abs_diff_eq!(g.characteristic(&eta).re, re, epsilon = 1e-7);
}

#[test]
fn grid_state_invariants() {
    let code = GkpCode::hexagonal_qubit();
    let g = grid(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let x = [rand::Rng::random_range(&mut rng, -3.0..3.0), rand::Rng::random_range(&mut rng, -3.0..3.0)];
        assert!(g.wigner(&x).abs() <= 2.0 + 1e-9);
        assert!(g.wigner_imag(&x).abs() < 1e-9);
    }
    let stab = code.basis.row(0);
    let spike_blur = (-PI * 0.04 * (stab[0] * stab[0] + stab[1] * stab[1]) / 2.0).exp();
    let chi = g.characteristic(&stab);
    assert!((chi.norm() - spike_blur).abs() < 0.05, "{chi} vs {spike_blur}");
    assert!(g.overlap(&g) <= 1.0 + 1e-9);
}

#[test]
fn grid_purity_approaches_one() {
    let p_wide = grid(0.5).overlap(&grid(0.5));
    let p_narrow = grid(0.25).overlap(&grid(0.25));
    assert!(p_narrow <= 1.0 + 1e-9);
    assert!(p_narrow > 0.99, "purity {p_narrow}");
    assert!(p_wide <= 1.0 + 1e-9);
}

#[test]
fn grid_truncation_errors() {
    let code = GkpCode::hexagonal_qubit();
    assert!(make_grid_state(&code, 0.3, 0.1).is_err());
    assert!(make_grid_state(&code, 1.5, 5.0).is_err());
}

#[test]
fn displacements_compose() {
    let g = grid(0.4);
    let a = [0.2, -0.1];
    let b = [-0.05, 0.3];
    let ab = g.displaced(&a).displaced(&b);
    let sum = g.displaced(&[a[0] + b[0], a[1] + b[1]]);
    for x in [[0.0, 0.0], [0.4, 0.1], [-0.3, 0.7]] {
        assert_abs_diff_eq!(ab.wigner(&x), sum.wigner(&x), epsilon = 1e-12);
        assert_abs_diff_eq!(g.displaced(&a).wigner(&x), g.wigner(&[x[0] - a[0], x[1] - a[1]]), epsilon = 1e-12);
    }
    let c = make_vacuum(1).displaced(&a);
    assert_eq!(c, make_coherent(&a));
}

#[test]
fn identity_symplectic_leaves_state_unchanged() {
    let g = grid(0.4);
    let t = g.transformed(&SymplecticMatrix::identity(1)).unwrap();
    for x in [[0.1, 0.2], [-0.5, 0.3]] {
        assert_abs_diff_eq!(t.wigner(&x), g.wigner(&x), epsilon = 1e-13);
    }
}

#[test]
fn squeezed_vacuum_covariance() {
    let r = 0.4;
    let s = SymplecticMatrix::squeezer(r);
    let sq = make_vacuum(1).transformed(&s).unwrap();
    let si = s.inverse();
    let want = si.matrix() * DMatrix::identity(2, 2) * VACUUM_VARIANCE * si.matrix().transpose();
    assert_abs_diff_eq!(sq.components()[0].cov, want, epsilon = 1e-14);
    for x in [[0.0, 0.0], [0.1, 0.1], [-0.2, 0.05], [0.3, -0.3], [0.05, 0.4]] {
        let sx = [r.exp() * x[0], (-r).exp() * x[1]];
        assert_abs_diff_eq!(sq.wigner(&x), make_vacuum(1).wigner(&sx), epsilon = 1e-12);
    }
}

proptest! {
    #[test]
    fn symplectic_covariance_of_wigner(t in -3.0f64..3.0, r in -0.8f64..0.8, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let s = SymplecticMatrix::rotation(t).compose(&SymplecticMatrix::squeezer(r));
        let g = grid(0.45);
        let moved = g.transformed(&s).unwrap();
        let m = s.matrix();
        let sx = [m[(0, 0)] * x + m[(0, 1)] * y, m[(1, 0)] * x + m[(1, 1)] * y];
        prop_assert!((moved.wigner(&[x, y]) - g.wigner(&sx)).abs() < 1e-10);
    }

    #[test]
    fn overlap_is_symmetric_and_bounded(ax in -1.0f64..1.0, ay in -1.0f64..1.0, v in 0.08f64..0.5) {
        let a = make_coherent(&[ax, ay]);
        let t = make_thermal(1, v).unwrap();
        prop_assert!((a.overlap(&t) - t.overlap(&a)).abs() < 1e-12);
        prop_assert!(t.overlap(&t) <= 1.0 + 1e-9);
        prop_assert!(a.overlap(&t) >= 0.0);
    }

    #[test]
    fn product_is_pointwise(ax in -1.0f64..1.0, bx in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let a = make_coherent(&[ax, 0.2]);
        let b = grid(0.5).displaced(&[bx, 0.0]);
        let p = a.product(&b).unwrap();
        prop_assert!((p.wigner(&[x, y]) - a.wigner(&[x, y]) * b.wigner(&[x, y])).abs() < 1e-10);
        prop_assert!((p.total_weight().re - a.overlap(&b)).abs() < 1e-12);
    }
}

#[test]
fn thermal_below_vacuum_is_rejected() {
    assert!(matches!(make_thermal(1, 0.01), Err(GkpError::Validation(_))));
}

#[test]
fn state_json_round_trip() {
    let g = grid(0.4);
    let back = StateModel::from_json(&g.to_json()).unwrap();
    assert_eq!(back.components().len(), g.components().len());
    assert_abs_diff_eq!(back.wigner(&[0.1, 0.2]), g.wigner(&[0.1, 0.2]), epsilon = 1e-12);
    let first = &g.to_json()["components"][0];
    assert!(first.get("w_re").is_some() && first.get("cov").is_some());
}

#[test]
fn unnormalised_state_is_rejected() {
    let comp = GaussianComponent::new(Complex::new(0.5, 0.0), vec![0.0, 0.0], DMatrix::identity(2, 2)).unwrap();
    assert!(StateModel::new(1, vec![comp.clone()]).is_err());
    assert!(StateModel::observable(1, vec![comp]).is_ok());
}

#[test]
fn named_states() {
    assert_eq!(StateModel::from_name("vacuum").unwrap(), make_vacuum(1));
    assert_eq!(StateModel::from_name("coherent:0.3,0.1").unwrap(), make_coherent(&[0.3, 0.1]));
    assert!(StateModel::from_name("grid:square,delta=0.3,logical=+").is_ok());
    assert!(StateModel::from_name("grid:square").is_err());
    assert!(StateModel::from_name("cat:1").is_err());
}

#[test]
fn vacuum_heterodyne_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 100_000;
    let s = HeterodyneSampler::new(&make_vacuum(1)).unwrap();
    let xs: Vec<Vec<f64>> = (0..n).map(|_| s.sample(&mut rng).unwrap()).collect();
    for i in 0..2 {
        let v: Vec<f64> = xs.iter().map(|x| x[i]).collect();
        let var = v.iter().map(|a| a * a).sum::<f64>() / n as f64;
        assert!((var * 2.0 * PI - 1.0).abs() < 0.02, "variance {var}");
    }
}

#[test]
fn coherent_heterodyne_mean() {
    let beta = [0.7, -0.3];
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let xs: Vec<Vec<f64>> = (0..20_000).map(|_| sample_heterodyne(&make_coherent(&beta), &mut rng).unwrap()).collect();
    for i in 0..2 {
        let v: Vec<f64> = xs.iter().map(|x| x[i]).collect();
        let (m, se) = mean_stderr(&v);
        assert!((m - beta[i]).abs() < 3.0 * se + 1e-12);
    }
}

#[test]
fn grid_heterodyne_matches_husimi() {
    let g = grid(0.3);
    let sampler = HeterodyneSampler::new(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 100_000;
    let (bins, r) = (30usize, 3.0);
    let h = 2.0 * r / bins as f64;
    let mut observed = vec![0.0; bins * bins + 1];
    for _ in 0..n {
        let a = sampler.sample(&mut rng).unwrap();
        let (i, j) = (((a[0] + r) / h).floor(), ((a[1] + r) / h).floor());
        if i >= 0.0 && j >= 0.0 && (i as usize) < bins && (j as usize) < bins {
            observed[i as usize * bins + j as usize] += 1.0;
        } else {
            observed[bins * bins] += 1.0;
        }
    }
    let sub = 4;
    let mut expected = vec![0.0; bins * bins + 1];
    for i in 0..bins {
        for j in 0..bins {
            let mut p = 0.0;
            for a in 0..sub {
                for b in 0..sub {
                    let x = [-r + (i as f64 + (a as f64 + 0.5) / sub as f64) * h, -r + (j as f64 + (b as f64 + 0.5) / sub as f64) * h];
                    p += g.husimi(&x);
                }
            }
            expected[i * bins + j] = p * h * h / (sub * sub) as f64 * n as f64;
        }
    }
    let inside: f64 = expected[..bins * bins].iter().sum();
    expected[bins * bins] = (n as f64 - inside).max(0.0);
    let (_, p, _) = chi_square(&observed, &expected);
    assert!(p > 0.01, "chi-square p-value {p}");
}

#[test]
fn parity_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let vac = make_vacuum(1);
    assert!((0..1000).all(|_| sample_parity(&vac, &[0.0, 0.0], &mut rng) == 1));
    let far: Vec<f64> = (0..10_000).map(|_| sample_parity(&vac, &[3.0, 0.0], &mut rng) as f64).collect();
    let (m, se) = mean_stderr(&far);
    assert!(m.abs() < 3.0 * se.max(1e-3));
    let code = GkpCode::hexagonal_qubit();
    let g = grid(0.3);
    let x = code.dual_basis.row(0);
    let v: Vec<f64> = (0..40_000).map(|_| sample_parity(&g, &x, &mut rng) as f64).collect();
    let (m, se) = mean_stderr(&v);
    assert!((m - g.wigner(&x) / 2.0).abs() < 3.0 * se);
}
