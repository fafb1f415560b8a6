mod common;

use common::{check_gradient, random_instance};
use nnstne::objective::{Objective, ObjectiveParams};

fn params(lambda: f64, beta: f64) -> ObjectiveParams {
    ObjectiveParams {
        alpha: 1.0,
        lambda,
        beta,
        sigma_shapelet_sq: 2.0,
    }
}

#[test]
fn matches_central_differences() {
    for seed in 0..25u64 {
        let n = 3 + (seed % 4) as usize;
        let q = 10 + (seed % 7) as usize;
        let m = 3 + (seed % 4) as usize;
        let k = 1 + (seed % 3) as usize;
        let inst = random_instance(seed, n, q, m, k, false);
        let r = check_gradient(&inst, params(0.5, 0.05), 1e-5);
        println!(
            "seed {seed}: checked {} skipped {} max rel {:.2e}",
            r.checked, r.skipped, r.max_rel_error
        );
        assert!(r.checked > 0);
        assert!(r.max_rel_error <= 1e-4, "seed {seed}: {}", r.max_rel_error);
    }
}

#[test]
fn identical_samples_have_flat_spectral_term() {
    let inst = random_instance(3, 4, 12, 4, 2, true);
    let obj = Objective::new(&inst.prepared, &inst.graph, params(0.0, 0.0)).unwrap();
    let g = obj.gradient(&inst.bank).unwrap();
    assert!(g.iter().flatten().all(|v| v.abs() <= 1e-8), "{g:?}");
    assert!(obj.loss(&inst.bank).unwrap().spectral.abs() < 1e-12);

    let beta = 0.3;
    let obj = Objective::new(&inst.prepared, &inst.graph, params(0.0, beta)).unwrap();
    let g = obj.gradient(&inst.bank).unwrap();
    for (row, s) in g.iter().zip(inst.bank.shapelets()) {
        for (gv, sv) in row.iter().zip(s) {
            assert!((gv - beta * sv.signum()).abs() <= 1e-8);
        }
    }
    let r = check_gradient(&inst, params(0.0, beta), 1e-5);
    assert!(r.max_rel_error <= 1e-4);
}
