use mlaf::field::SpectralVectorField;
use mlaf::grid::TorusGrid;
use mlaf::norms::sobolev_moments;
use mlaf::oracle::{naive_eval, naive_sup_norms, quadrature_moment};
use mlaf::spectral::{project_solenoidal, Faults, Spectral};
use mlaf::verify::{self, VerifyParams, ORACLE_SIZES};

#[test]
fn every_shared_operation_matches_the_dense_oracle() {
    for seed in [0, 7] {
        let p = VerifyParams { seed, ..VerifyParams::default() };
        let worst = verify::oracle_sweep(Faults::default(), &ORACLE_SIZES, &p);
        assert!(worst <= verify::ORACLE_TOL, "seed {seed}: {worst:e}");
    }
}

#[test]
fn oracle_catches_missing_dealiasing() {
    let p = VerifyParams::default();
    let faulty = Faults {
        skip_dealias: true,
        ..Faults::default()
    };
    assert!(verify::oracle_equivalence(faulty, 8, 3, &p) > 1e-6);
}

#[test]
fn oracle_catches_missing_projection() {
    let p = VerifyParams::default();
    let faulty = Faults {
        skip_projection: true,
        ..Faults::default()
    };
    assert!(verify::oracle_equivalence(faulty, 8, 3, &p) > 1e-6);
}

#[test]
fn trajectory_matches_rk4_reference() {
    let gap = verify::trajectory_vs_oracle(Faults::default(), &VerifyParams::default()).unwrap();
    assert!(gap <= verify::TRAJECTORY_TOL, "{gap:e}");
}

#[test]
fn physical_samples_match_direct_sums() {
    let grid = TorusGrid::new(8, 3.0).unwrap();
    let u = project_solenoidal(&SpectralVectorField::random_smooth(grid, 3, 5, 1));
    let sp = Spectral::new(grid);
    let phys = sp.to_physical(&u).unwrap();
    for idx in [0, 17, 200, grid.len() - 1] {
        let direct = naive_eval(&u, grid.point(idx));
        for (c, d) in direct.iter().enumerate() {
            assert!((phys.component(c)[idx] - d).abs() <= 1e-12 * u.max_abs() * 100.0);
        }
    }
}

#[test]
fn sup_norms_match_direct_sums_on_the_grid() {
    let grid = TorusGrid::new(10, 2.0 * std::f64::consts::PI).unwrap();
    let u = project_solenoidal(&SpectralVectorField::random_smooth(grid, 3, 9, 2));
    let s = Spectral::new(grid).sup_norms(&u).unwrap();
    let (value, gradient) = naive_sup_norms(&u, grid.n());
    assert!((s.value - value).abs() <= 1e-12 * value);
    assert!((s.gradient - gradient).abs() <= 1e-12 * gradient);
}

#[test]
fn moments_match_quadrature_of_derivatives() {
    let grid = TorusGrid::new(8, 5.0).unwrap();
    let u = SpectralVectorField::random_smooth(grid, 2, 3, 4);
    let h = sobolev_moments(&u, 3).unwrap();
    for order in 0..=3u32 {
        let q = quadrature_moment(&u, order, 6);
        assert!((h[order as usize] - q).abs() <= 1e-11 * q, "order {order}: {} vs {q}", h[order as usize]);
    }
}
