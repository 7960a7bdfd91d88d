//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use cyclic_sections::gcohom::{
    bar_h1, bar_h2, cup_wedge, h1, h2, h2_kernel_order_of_projection, GModule,
};
use cyclic_sections::nilq::binom2;
use cyclic_sections::orbifold::{quadraticity_check, BranchData, CurveContext};
use cyclic_sections::report::{
    emit_json_line, enumerate_branch_data, run_property_suite, run_single, run_sweep, SweepBounds,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

const SEED: u64 = 0x5ec5eed;

fn acceptance_bounds() -> SweepBounds {
    SweepBounds {
        max_p: 5,
        max_h: 1,
        max_n: 6,
    }
}

fn sweep_data() -> Vec<BranchData> {
    enumerate_branch_data(&acceptance_bounds()).expect("bounds within guard")
}

#[test]
fn criterion_1_divisor_map_surjective_with_full_support_kernel() {
    let mut checked = 0;
    for datum in sweep_data() {
        if datum.n() < 2 {
            continue;
        }
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let report = ctx.verify_divisor_map().expect("applicable");
        assert!(
            report.pass,
            "divisor-map check failed on {datum:?}: {report:?}"
        );
        assert_eq!(report.map_rank, report.h1_dimension);
        let kernel = report.kernel_generator.expect("kernel computed");
        assert!(kernel.full_support());
        checked += 1;
    }
    println!("[PASS] criterion 1: divisor map surjective with one-dimensional full-support kernel on {checked} data");
}

#[test]
fn criterion_2_fixed_point_classes_distinct_iff_more_than_two() {
    let mut checked = 0;
    for datum in sweep_data() {
        if datum.n() < 2 {
            continue;
        }
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let report = ctx.verify_fixed_point_injectivity().expect("applicable");
        assert!(report.pass, "injectivity check failed on {datum:?}: {report:?}");
        assert_eq!(report.injective, datum.n() != 2);
        checked += 1;
    }
    println!("[PASS] criterion 2: pairwise distinctness of fixed-point classes matches n != 2 on {checked} data");
}

#[test]
fn criterion_3_liftable_set_three_ways() {
    let mut checked = 0;
    let mut six_point_cases = 0;
    for datum in sweep_data() {
        if datum.p != 2 || datum.n() < 2 {
            continue;
        }
        assert!(matches!(datum.n(), 2 | 4 | 6));
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        // the verifier asserts internally that the boundary obstruction and
        // the witness search agree on every class
        let report = ctx.verify_liftable_classes().expect("applicable");
        assert!(report.pass, "lifting check failed on {datum:?}: {report:?}");
        assert_eq!(report.liftable, report.image);
        assert_eq!(report.liftable, report.predicted);
        if datum.n() == 6 {
            assert_eq!(report.class_count, 16);
            assert_eq!(report.liftable.len(), 6, "exactly 6 of 16 classes lift");
            six_point_cases += 1;
        }
        checked += 1;
    }
    assert!(six_point_cases >= 1);
    println!("[PASS] criterion 3: liftable classes agree between obstruction, witness search, image and classification on {checked} data");
}

#[test]
fn criterion_4_quadraticity_of_the_boundary_obstruction() {
    let mut pairs = 0;
    for datum in sweep_data() {
        if datum.n() < 2 {
            continue;
        }
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let report = quadraticity_check(&ctx, 500, SEED).expect("applicable");
        assert!(report.pass, "quadraticity failed on {datum:?}: {report:?}");
        assert!(report.exhaustive, "sweep class groups have at most 256 elements");
        pairs += report.pairs_checked;
    }
    // one larger configuration exercises the seeded sampling branch
    let datum = BranchData::new(3, 0, vec![1, 1, 1, 1, 1, 1, 1, 2], vec![]).expect("valid datum");
    let ctx = CurveContext::build(&datum).expect("pipeline builds");
    let report = quadraticity_check(&ctx, 500, SEED).expect("applicable");
    assert!(!report.exhaustive);
    assert_eq!(report.pairs_checked, 500);
    assert!(report.pass, "sampled quadraticity failed: {report:?}");
    pairs += report.pairs_checked;
    println!("[PASS] criterion 4: delta2(y+z) = delta2(y) + delta2(z) + y cup z on {pairs} pairs");
}

#[test]
fn criterion_5_wedge_injectivity_and_kernel_bound() {
    let mut wedge_checked = 0;
    let mut kernel_checked = 0;
    for datum in sweep_data() {
        if datum.p != 2 || datum.n() < 2 {
            continue;
        }
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let h_module = GModule::lattice(2, ctx.sigma.clone()).expect("order-2 action");
        let wedge_module = h_module.wedge_square();
        let h2_wedge = h2(&wedge_module);
        let basis = ctx.ext1.h1_group.reps().to_vec();
        let dim = basis.len();
        // exhaustive injectivity of the wedge map on H^1 /\ H^1 over F_2
        let pair_count = binom2(dim);
        for mask in 1u32..(1u32 << pair_count) {
            let mut rep = vec![BigInt::zero(); binom2(h_module.ncoords)];
            let mut bit = 0;
            for i in 0..dim {
                for j in i + 1..dim {
                    if mask & (1 << bit) != 0 {
                        let term = cup_wedge(&h_module, &basis[i], &basis[j]);
                        for (r, t) in rep.iter_mut().zip(term.iter()) {
                            *r += t;
                        }
                    }
                    bit += 1;
                }
            }
            assert!(
                !h2_wedge.is_zero(&rep),
                "wedge map killed a nonzero element on {datum:?} (mask {mask:#b})"
            );
            wedge_checked += 1;
        }
        // cup of a class with itself dies in the wedge target, so the map
        // is defined on the exterior square at all
        for b in &basis {
            let rep = cup_wedge(&h_module, b, b);
            assert!(h2_wedge.is_zero(&rep), "a cup a must vanish for p = 2");
        }
        // kernel of the induced map to the layer has order at most 2
        let (ext2, _) = ctx.level2().expect("level-2 data");
        let order = h2_kernel_order_of_projection(
            &wedge_module,
            &ext2.layer_module,
            &ext2.quotient.proj_l,
        );
        assert!(
            order <= BigInt::from(2),
            "kernel order {order} exceeds 2 on {datum:?}"
        );
        kernel_checked += 1;
    }
    println!("[PASS] criterion 5: wedge map injective ({wedge_checked} elements) and layer-projection kernel of order <= 2 ({kernel_checked} data)");
}

#[test]
fn criterion_6_free_actions_have_no_sections() {
    for p in [2u64, 3] {
        let datum = BranchData::new(p, 2, vec![], vec![1, 0, 0, 0]).expect("valid free datum");
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let report = ctx.verify_free_action().expect("applicable");
        assert!(report.obstruction_nonzero, "p = {p}");
        assert!(!report.search_found_section, "p = {p}");
        assert!(report.pass);
    }
    println!("[PASS] criterion 6: free actions have nonzero splitting obstruction, confirmed by exhaustive search");
}

#[test]
fn criterion_7_cross_module_consistency() {
    let mut bar_h1_checked = 0;
    let mut bar_h2_checked = 0;
    for datum in sweep_data() {
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let n = datum.n();
        let p = datum.p;
        // Lefschetz: trace of every nontrivial power is 2 - n
        for k in 1..p as usize {
            assert_eq!(ctx.sigma.pow(k).trace(), BigInt::from(2i64 - n as i64));
        }
        if n >= 2 {
            assert_eq!(ctx.h1_dimension(), n - 2, "H^1 dimension on {datum:?}");
            let jac = ctx.jacobian_crosscheck().expect("applicable");
            assert!(jac.pass, "component group check failed on {datum:?}: {jac:?}");
            let mut expected = BigInt::one();
            for _ in 0..n - 2 {
                expected *= BigInt::from(p);
            }
            assert_eq!(jac.order, expected.to_string());
        }
        // bar oracle against the periodic engine on the reduced module
        let q = (p * p * p) as i64;
        let h_module = GModule::lattice(p, ctx.sigma.clone()).expect("order-p action");
        let reduced = h_module.reduce(q);
        let bar1 = bar_h1(&h_module).expect("within guard");
        assert_eq!(
            bar1.structure(),
            h1(&reduced).structure(),
            "bar H^1 disagrees on {datum:?}"
        );
        bar_h1_checked += 1;
        // the degree-2 bar complex is an order of magnitude bigger; run it
        // where the cochain spaces stay small
        if (p * p * p) as usize * h_module.ncoords <= 350 {
            let bar2 = bar_h2(&h_module).expect("within guard");
            assert_eq!(
                bar2.structure(),
                h2(&reduced).structure(),
                "bar H^2 disagrees on {datum:?}"
            );
            bar_h2_checked += 1;
        }
    }
    println!("[PASS] criterion 7: dimension count, Lefschetz trace, component group order, and bar oracle agreement ({bar_h1_checked} H^1, {bar_h2_checked} H^2 modules)");
}

#[test]
fn criterion_8_infrastructure() {
    // seeded property suite: includes 200 Smith reconstructions on random
    // matrices up to 20x20 with entries in [-50, 50]
    let results = run_property_suite(SEED);
    for r in &results {
        assert!(r.pass, "property check {} failed", r.name);
    }
    let smith = results
        .iter()
        .find(|r| r.name == "smith_reconstruction")
        .expect("smith check present");
    assert_eq!(smith.cases, 200);

    // report determinism: byte-identical output across two runs
    let datum = BranchData::new(2, 0, vec![1; 6], vec![]).expect("valid datum");
    let a = emit_json_line(&run_single(&datum).expect("runs"));
    let b = emit_json_line(&run_single(&datum).expect("runs"));
    assert_eq!(a, b);
    let bounds = SweepBounds {
        max_p: 3,
        max_h: 1,
        max_n: 4,
    };
    let first: Vec<String> = run_sweep(&bounds, false)
        .expect("runs")
        .reports
        .iter()
        .map(emit_json_line)
        .collect();
    let second: Vec<String> = run_sweep(&bounds, false)
        .expect("runs")
        .reports
        .iter()
        .map(emit_json_line)
        .collect();
    assert_eq!(first, second);
    println!("[PASS] criterion 8: Smith reconstruction on 200 seeded matrices and byte-identical reports");
}

#[test]
fn sweep_summary_all_pass() {
    let outcome = run_sweep(&acceptance_bounds(), false).expect("sweep runs");
    assert!(outcome.all_pass);
    println!(
        "[PASS] sweep: all {} configurations pass every applicable check",
        outcome.reports.len()
    );
}
