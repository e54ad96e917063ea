use super::*;
use crate::conformal::rescale;
use crate::jet::{EvalError, Solution};
use crate::models::ClosedFormSolution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_disc() -> PlanarDomain {
    PlanarDomain::disc(Point::ORIGIN, 1.0).unwrap()
}

fn annulus_12() -> PlanarDomain {
    PlanarDomain::annulus(Point::ORIGIN, 1.0, 2.0).unwrap()
}

/// The closed-form solution on `B₂ \ B̄₁`.
fn annulus_12_exact() -> impl Solution {
    rescale(
        ClosedFormSolution::annulus(0.5f64.sqrt()).unwrap(),
        2.0f64.sqrt(),
    )
    .unwrap()
}

#[test]
fn disc_matches_closed_form() {
    let sol = solve(&unit_disc(), &SolverConfig::new(1.0 / 64.0)).unwrap();
    assert!(sol.converged());
    assert!(*sol.log().last().unwrap() <= 1e-10);
    let err = sol
        .max_error(&ClosedFormSolution::disc(1.0).unwrap())
        .unwrap();
    assert!(err <= 5e-4, "{err}");
    assert!(sol.unknown_values().iter().all(|&v| v > 0.0));
}

#[test]
fn annulus_matches_rescaled_closed_form() {
    let sol = solve(&annulus_12(), &SolverConfig::new(1.0 / 128.0)).unwrap();
    let err = sol.max_error(&annulus_12_exact()).unwrap();
    assert!(err <= 1e-3, "{err}");
}

#[test]
fn exact_initial_guess_is_a_fixed_point() {
    let exact = ClosedFormSolution::disc(1.0).unwrap();
    let config = SolverConfig::new(1.0 / 32.0)
        .with_initial(InitialGuess::custom(move |p| exact.value(p).unwrap()));
    let sol = solve(&unit_disc(), &config).unwrap();
    assert!(sol.iterations() <= 2, "{:?}", sol.log());
}

#[test]
fn residual_norm_examples() {
    let h = 1.0 / 64.0;
    let sol = solve(&annulus_12(), &SolverConfig::new(h)).unwrap();
    let norm = residual_norm(&sol);
    assert!((norm - sol.log().last().unwrap()).abs() <= 1e-14);
    assert!(norm <= 1e-10);

    // the closed form sampled onto the grid carries the truncation error
    let exact = annulus_12_exact();
    let grid = sol.grid();
    let op = Operator::new(grid);
    let sampled: Vec<f64> = grid
        .unknown_nodes()
        .iter()
        .map(|&n| exact.value(grid.node_position(n)).unwrap())
        .collect();
    let truncation = max_norm(&op.residual(&sampled));
    assert!(truncation > 1e-7 && truncation < 1e-2, "{truncation}");

    let mut bumped = sol.unknown_values();
    let mid = bumped.len() / 2;
    bumped[mid] += 1e-3;
    assert!(max_norm(&op.residual(&bumped)) > norm);
}

#[test]
fn jacobian_matches_finite_differences() {
    let grid = build_grid(&unit_disc(), 0.125).unwrap();
    let op = Operator::new(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let v: Vec<f64> = grid
        .unknown_nodes()
        .iter()
        .map(|&n| {
            let p = grid.node_position(n);
            0.5 * (1.0 - p.norm_sqr()) + 0.01 * rng.gen::<f64>()
        })
        .collect();
    let w: Vec<f64> = (0..v.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let step = 1e-6;
    let plus: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + step * b).collect();
    let minus: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - step * b).collect();
    let (fp, fm) = (op.residual(&plus), op.residual(&minus));
    let fd: Vec<f64> = fp
        .iter()
        .zip(&fm)
        .map(|(a, b)| (a - b) / (2.0 * step))
        .collect();
    let jw = op.jacobian_apply(&v, &w);
    let diff = max_norm(&fd.iter().zip(&jw).map(|(a, b)| a - b).collect::<Vec<_>>());
    assert!(diff <= 1e-6 * max_norm(&jw), "{diff}");
}

#[test]
fn comparison_principle_on_shared_nodes() {
    let h = 1.0 / 32.0;
    let ann = solve(&annulus_12(), &SolverConfig::new(h)).unwrap();
    let disc = solve(
        &PlanarDomain::disc(Point::ORIGIN, 2.0).unwrap(),
        &SolverConfig::new(h),
    )
    .unwrap();
    assert_eq!(ann.grid().origin(), disc.grid().origin());
    let mut shared = 0;
    for &node in ann.grid().unknown_nodes() {
        let (a, d) = (ann.values()[node], disc.values()[node]);
        if d.is_finite() {
            assert!(a <= d + 1e-8, "node {node}: {a} > {d}");
            shared += 1;
        }
    }
    assert!(shared > 1000);
}

#[test]
fn annulus_field_has_quarter_turn_symmetry() {
    let sol = solve(&annulus_12(), &SolverConfig::new(1.0 / 32.0)).unwrap();
    let g = sol.grid();
    assert_eq!(g.nx(), g.ny());
    let n = g.nx();
    let mut checked = 0;
    for &node in g.unknown_nodes() {
        let (i, j) = g.coords(node);
        // (x, y) -> (-y, x) on a lattice symmetric about the origin
        let rotated = g.index(n - 1 - j, i);
        let (a, b) = (sol.values()[node], sol.values()[rotated]);
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn annulus_error_decreases_under_refinement() {
    let exact = annulus_12_exact();
    let errs: Vec<f64> = [32.0, 64.0, 128.0]
        .iter()
        .map(|&n| {
            solve(&annulus_12(), &SolverConfig::new(1.0 / n))
                .unwrap()
                .max_error(&exact)
                .unwrap()
        })
        .collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    assert!(errs[0] / errs[2] >= 3.0, "{errs:?}");
}

#[test]
fn disc_solution_is_exact_on_the_lattice() {
    // the scheme reproduces quadratics, so only rounding remains
    let sol = solve(&unit_disc(), &SolverConfig::new(1.0 / 32.0)).unwrap();
    let err = sol
        .max_error(&ClosedFormSolution::disc(1.0).unwrap())
        .unwrap();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn interpolation_reproduces_the_disc() {
    let sol = solve(&unit_disc(), &SolverConfig::new(1.0 / 32.0)).unwrap();
    let exact = ClosedFormSolution::disc(1.0).unwrap();
    let p = Point::new(0.31, -0.42);
    let (a, b) = (sol.jet(p).unwrap(), exact.jet(p).unwrap());
    assert!((a.value - b.value).abs() < 1e-12);
    assert!((a.hess[0][0] - b.hess[0][0]).abs() < 1e-9);
    assert!((a.hess[0][1] - b.hess[0][1]).abs() < 1e-9);
    assert!((sol.laplacian(p).unwrap() + 2.0).abs() < 1e-9);
    assert_eq!(sol.grid_spacing(), Some(1.0 / 32.0));
    assert!(matches!(
        sol.jet(Point::new(0.999, 0.0)),
        Err(EvalError::OutsideGrid { .. })
    ));
}

#[test]
fn field_dump_round_trips() {
    let sol = solve(&unit_disc(), &SolverConfig::new(0.125)).unwrap();
    let mut bytes = Vec::new();
    write_field(&mut bytes, &sol).unwrap();
    assert_eq!(&bytes[..4], FIELD_MAGIC);
    let dump = read_field(bytes.as_slice()).unwrap();
    assert_eq!((dump.nx, dump.ny), (sol.grid().nx(), sol.grid().ny()));
    assert_eq!(dump.origin, sol.grid().origin());
    for (a, b) in dump.values.iter().zip(sol.values()) {
        assert!(a.to_bits() == b.to_bits());
    }
    assert!(read_field(&bytes[..30]).is_err());
    let mut csv = Vec::new();
    write_field_csv(&mut csv, &sol).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), sol.grid().unknown_count() + 1);

    let loaded = load_field(&unit_disc(), &dump).unwrap();
    assert_eq!(loaded.values().len(), sol.values().len());
    let p = Point::new(0.1, -0.2);
    assert_eq!(loaded.laplacian(p).unwrap(), sol.laplacian(p).unwrap());
    assert!(load_field(&annulus_12(), &dump).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(matches!(
        solve(&unit_disc(), &SolverConfig::new(-1.0)),
        Err(SolverError::InvalidConfig(_))
    ));
    assert!(matches!(
        solve(&unit_disc(), &SolverConfig::new(0.1).with_tol(0.0)),
        Err(SolverError::InvalidConfig(_))
    ));
    let mut cfg = SolverConfig::new(1.0 / 16.0);
    cfg.max_iter = 1;
    assert!(matches!(
        solve(&annulus_12(), &cfg),
        Err(SolverError::Divergence { .. })
    ));
}
