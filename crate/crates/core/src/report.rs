//! Run configuration, verification reports, sweep enumeration, and the
//! seeded property-check suite.
//!
//! Reports are fully deterministic: integers are serialized as decimal
//! strings, flags are tri-state (absent when the corresponding verifier is
//! not applicable to the datum), and all sets are emitted sorted.

use crate::fpgroup::{free_reduce, Word};
use crate::linalg::{cokernel, smith_normal_form, solve_mod, IntMatrix};
use crate::nilq::build_class2;
use crate::orbifold::{quadraticity_check, BranchData, BranchDataError, CurveContext, PipelineError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard limits on sweep bounds; every datum the generator emits has cover
/// genus at most `GENUS_CAP`.
pub const GENUS_CAP: usize = 6;
const MAX_SWEEP_P: u64 = 7;
const MAX_SWEEP_H: usize = 2;
const MAX_SWEEP_N: usize = 8;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("sweep bounds exceed the guard: {0}")]
    GuardExceeded(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Branch(#[from] BranchDataError),
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Single,
    Sweep,
    Proptest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Clone, Debug)]
pub struct SweepBounds {
    pub max_p: u64,
    pub max_h: usize,
    pub max_n: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub datum: Option<BranchData>,
    pub sweep_bounds: Option<SweepBounds>,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub fail_fast: bool,
}

/// Verification record for one branch datum. All integers are decimal
/// strings; a `None` flag means the verifier does not apply to the datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub p: String,
    pub quotient_genus: String,
    pub monodromies: Vec<String>,
    pub handle_images: Vec<String>,
    pub genus: String,
    pub h1_dimension: String,
    pub section_class_count: Option<String>,
    pub injective: Option<bool>,
    pub kernel_r_generator: Option<Vec<String>>,
    pub liftable_set: Option<Vec<String>>,
    pub divisor_map_pass: Option<bool>,
    pub injectivity_pass: Option<bool>,
    pub lifting_pass: Option<bool>,
    pub free_action_pass: Option<bool>,
    pub jacobian_pass: Option<bool>,
}

impl Report {
    /// True when every executed verifier passed.
    pub fn all_pass(&self) -> bool {
        [
            self.divisor_map_pass,
            self.injectivity_pass,
            self.lifting_pass,
            self.free_action_pass,
            self.jacobian_pass,
        ]
        .iter()
        .all(|f| f.unwrap_or(true))
    }
}

/// Runs every applicable verifier on one datum.
pub fn run_single(datum: &BranchData) -> Result<Report, RunError> {
    let ctx = CurveContext::build(datum)?;
    let n = ctx.n();
    let mut report = Report {
        p: datum.p.to_string(),
        quotient_genus: datum.quotient_genus.to_string(),
        monodromies: datum.monodromies.iter().map(|m| m.to_string()).collect(),
        handle_images: datum.handle_images.iter().map(|m| m.to_string()).collect(),
        genus: ctx.genus.to_string(),
        h1_dimension: ctx.h1_dimension().to_string(),
        section_class_count: None,
        injective: None,
        kernel_r_generator: None,
        liftable_set: None,
        divisor_map_pass: None,
        injectivity_pass: None,
        lifting_pass: None,
        free_action_pass: None,
        jacobian_pass: None,
    };
    if n >= 2 {
        report.section_class_count = Some(ctx.section_class_count()?.to_string());
        let divisor_report = ctx.verify_divisor_map()?;
        report.kernel_r_generator = divisor_report
            .kernel_generator
            .as_ref()
            .map(|g| g.coefficients.iter().map(|c| c.to_string()).collect());
        report.divisor_map_pass = Some(divisor_report.pass);
        let injectivity_report = ctx.verify_fixed_point_injectivity()?;
        report.injective = Some(injectivity_report.injective);
        report.injectivity_pass = Some(injectivity_report.pass);
        let jac = ctx.jacobian_crosscheck()?;
        report.jacobian_pass = Some(jac.pass);
        if datum.p == 2 {
            let lift_report = ctx.verify_liftable_classes()?;
            report.liftable_set = Some(lift_report.liftable.clone());
            report.lifting_pass = Some(lift_report.pass);
        }
    } else {
        let free_action_report = ctx.verify_free_action()?;
        report.free_action_pass = Some(free_action_report.pass);
    }
    Ok(report)
}

fn primes_up_to(max: u64) -> Vec<u64> {
    (2..=max)
        .filter(|&p| (2..p).all(|d| d * d > p || p % d != 0))
        .collect()
}

fn monodromy_multisets(p: u64, n: usize) -> Vec<Vec<u64>> {
    // nondecreasing sequences over 1..p with sum divisible by p
    fn rec(p: u64, n: usize, min: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if acc.len() == n {
            if acc.iter().sum::<u64>() % p == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for v in min..p {
            acc.push(v);
            rec(p, n, v, acc, out);
            acc.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    rec(p, n, 1, &mut Vec::new(), &mut out);
    out
}

fn handle_variants(p: u64, h: usize) -> Vec<Vec<u64>> {
    if h == 0 {
        return vec![vec![]];
    }
    // up to a base change of the handles, the image vector is zero or a
    // standard unit vector
    let zero = vec![0u64; 2 * h];
    let mut unit = vec![0u64; 2 * h];
    unit[0] = 1 % p;
    vec![zero, unit]
}

/// All valid branch data within the bounds, monodromies sorted and handle
/// images canonicalized, restricted to covers of genus at most `GENUS_CAP`.
pub fn enumerate_branch_data(bounds: &SweepBounds) -> Result<Vec<BranchData>, RunError> {
    if bounds.max_p > MAX_SWEEP_P || bounds.max_h > MAX_SWEEP_H || bounds.max_n > MAX_SWEEP_N {
        return Err(RunError::GuardExceeded(format!(
            "bounds p <= {}, h <= {}, n <= {} exceed the caps ({}, {}, {})",
            bounds.max_p, bounds.max_h, bounds.max_n, MAX_SWEEP_P, MAX_SWEEP_H, MAX_SWEEP_N
        )));
    }
    let mut out = Vec::new();
    for p in primes_up_to(bounds.max_p) {
        for h in 0..=bounds.max_h {
            for n in 0..=bounds.max_n {
                for mon in monodromy_multisets(p, n) {
                    for handles in handle_variants(p, h) {
                        let Ok(datum) = BranchData::new(p, h, mon.clone(), handles) else {
                            continue;
                        };
                        let genus = datum.validate_and_genus().expect("validated");
                        if genus <= GENUS_CAP {
                            out.push(datum);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub reports: Vec<Report>,
    pub all_pass: bool,
}

/// Result of `run`: what came out of the configured mode.
#[derive(Clone, Debug)]
pub enum RunOutcome {
    Single(Box<Report>),
    Sweep(SweepOutcome),
    Properties(Vec<CheckResult>),
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        match self {
            RunOutcome::Single(r) => r.all_pass(),
            RunOutcome::Sweep(s) => s.all_pass,
            RunOutcome::Properties(checks) => checks.iter().all(|c| c.pass),
        }
    }
}

/// Entry point behind the command line: dispatches on the mode and
/// validates the configuration shape.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    match config.mode {
        Mode::Single => {
            let datum = config
                .datum
                .as_ref()
                .ok_or_else(|| RunError::BadConfig("single mode requires a branch datum".into()))?;
            Ok(RunOutcome::Single(Box::new(run_single(datum)?)))
        }
        Mode::Sweep => {
            let bounds = config.sweep_bounds.as_ref().ok_or_else(|| {
                RunError::BadConfig("sweep mode requires sweep bounds".into())
            })?;
            Ok(RunOutcome::Sweep(run_sweep(bounds, config.fail_fast)?))
        }
        Mode::Proptest => Ok(RunOutcome::Properties(run_property_suite(config.seed))),
    }
}

pub fn run_sweep(bounds: &SweepBounds, fail_fast: bool) -> Result<SweepOutcome, RunError> {
    let data = enumerate_branch_data(bounds)?;
    let mut reports = Vec::with_capacity(data.len());
    let mut all_pass = true;
    for datum in &data {
        let report = run_single(datum)?;
        let ok = report.all_pass();
        reports.push(report);
        if !ok {
            all_pass = false;
            if fail_fast {
                break;
            }
        }
    }
    Ok(SweepOutcome { reports, all_pass })
}

/// One line per record, parseable back into `Report`.
pub fn emit_json_line(report: &Report) -> String {
    serde_json::to_string(report).expect("report serializes")
}

pub fn parse_json_line(line: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(line)
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let flag = |f: Option<bool>| match f {
        None => "n/a".to_string(),
        Some(true) => "pass".to_string(),
        Some(false) => "FAIL".to_string(),
    };
    out.push_str(&format!(
        "datum: p={} h={} monodromies=[{}] handles=[{}]\n",
        report.p,
        report.quotient_genus,
        report.monodromies.join(","),
        report.handle_images.join(","),
    ));
    out.push_str(&format!(
        "  genus={} dim H1={} section classes={}\n",
        report.genus,
        report.h1_dimension,
        report.section_class_count.as_deref().unwrap_or("-"),
    ));
    if let Some(inj) = report.injective {
        out.push_str(&format!("  fixed-point map injective: {inj}\n"));
    }
    if let Some(k) = &report.kernel_r_generator {
        out.push_str(&format!("  divisor-map kernel generator: [{}]\n", k.join(",")));
    }
    if let Some(l) = &report.liftable_set {
        out.push_str(&format!("  liftable classes: {{{}}}\n", l.join(", ")));
    }
    out.push_str(&format!(
        "  checks: surjectivity/kernel={} injectivity={} lifting={} free-action={} jacobian={}\n",
        flag(report.divisor_map_pass),
        flag(report.injectivity_pass),
        flag(report.lifting_pass),
        flag(report.free_action_pass),
        flag(report.jacobian_pass),
    ));
    out
}

/// Outcome of one named seeded property check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub cases: usize,
}

fn random_matrix(rng: &mut ChaCha8Rng, max_dim: usize, bound: i64) -> IntMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

fn check_smith(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 200;
    let mut pass = true;
    for _ in 0..cases {
        let a = random_matrix(&mut rng, 20, 50);
        let f = smith_normal_form(&a);
        if f.u.mul(&a).mul(&f.v) != f.s {
            pass = false;
            break;
        }
        if !f.u.mul(&f.u_inv).is_identity() || !f.v.mul(&f.v_inv).is_identity() {
            pass = false;
            break;
        }
        if f.u.determinant().abs() != BigInt::one() || f.v.determinant().abs() != BigInt::one() {
            pass = false;
            break;
        }
        let d = f.diagonal();
        for i in 0..d.len() {
            if d[i].is_negative() {
                pass = false;
            }
            if i + 1 < d.len() && !d[i].is_zero() && !d[i + 1].is_zero()
                && !(&d[i + 1] % &d[i]).is_zero()
            {
                pass = false;
            }
        }
        if !pass {
            break;
        }
    }
    CheckResult {
        name: "smith_reconstruction".into(),
        pass,
        cases,
    }
}

fn check_cokernel_invariance(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 50;
    let mut pass = true;
    for _ in 0..cases {
        let a = random_matrix(&mut rng, 8, 10);
        let mut rows: Vec<usize> = (0..a.rows()).collect();
        let mut cols: Vec<usize> = (0..a.cols()).collect();
        for i in (1..rows.len()).rev() {
            rows.swap(i, rng.gen_range(0..=i));
        }
        for i in (1..cols.len()).rev() {
            cols.swap(i, rng.gen_range(0..=i));
        }
        let b = a.submatrix(&rows, &cols);
        if cokernel(&a) != cokernel(&b) {
            pass = false;
            break;
        }
    }
    CheckResult {
        name: "cokernel_permutation_invariance".into(),
        pass,
        cases,
    }
}

fn check_solve_mod(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 100;
    let mut pass = true;
    for _ in 0..cases {
        let a = random_matrix(&mut rng, 6, 8);
        let x: Vec<BigInt> = (0..a.cols())
            .map(|_| BigInt::from(rng.gen_range(-10i64..=10)))
            .collect();
        let b = a.mul_vec(&x);
        let m = BigInt::from([0i64, 0, 2, 3, 5, 8, 12][rng.gen_range(0..7)]);
        match solve_mod(&a, &b, &m) {
            Ok(Some(sol)) => {
                let got = a.mul_vec(&sol);
                let ok = got.iter().zip(b.iter()).all(|(g, want)| {
                    if m.is_zero() {
                        g == want
                    } else {
                        ((g - want) % &m).is_zero()
                    }
                });
                if !ok {
                    pass = false;
                    break;
                }
            }
            _ => {
                // a constructed right-hand side is always solvable
                pass = false;
                break;
            }
        }
    }
    CheckResult {
        name: "solve_mod_verification".into(),
        pass,
        cases,
    }
}

fn random_word(rng: &mut ChaCha8Rng, generators: usize, len: usize) -> Word {
    let letters: Vec<i32> = (0..len)
        .map(|_| {
            let idx = rng.gen_range(1..=generators as i32);
            if rng.gen_bool(0.5) {
                idx
            } else {
                -idx
            }
        })
        .collect();
    Word::from_letters(letters)
}

fn check_free_reduction(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases = 200;
    let mut pass = true;
    for _ in 0..cases {
        let len = rng.gen_range(0..30);
        let w = random_word(&mut rng, 5, len);
        let r = free_reduce(&w);
        let adjacent_cancel = r
            .letters()
            .windows(2)
            .any(|pair| pair[0] == -pair[1]);
        if adjacent_cancel || free_reduce(&r) != r {
            pass = false;
            break;
        }
        if !free_reduce(&w.concat(&w.inverse())).is_empty() {
            pass = false;
            break;
        }
    }
    CheckResult {
        name: "free_reduction".into(),
        pass,
        cases,
    }
}

fn hyperelliptic_ctx() -> CurveContext {
    let datum = BranchData::new(2, 0, vec![1; 6], vec![]).expect("valid datum");
    CurveContext::build(&datum).expect("pipeline builds")
}

fn check_rewrite_homomorphism(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = hyperelliptic_ctx();
    let t = Word::generator(ctx.sub.designated);
    let cases = 50;
    let mut pass = true;
    let kernel_word = |rng: &mut ChaCha8Rng| {
        let len = rng.gen_range(0..12);
        let w = random_word(rng, ctx.presentation.generator_count, len);
        let k = ctx.sub.coset_power_of_value(ctx.theta.apply(&w));
        w.concat(&t.pow(k as i64).inverse())
    };
    for _ in 0..cases {
        let u = kernel_word(&mut rng);
        let v = kernel_word(&mut rng);
        let ru = ctx.sub.rewrite_kernel_word(&u).expect("kernel word");
        let rv = ctx.sub.rewrite_kernel_word(&v).expect("kernel word");
        let ruv = ctx
            .sub
            .rewrite_kernel_word(&u.concat(&v))
            .expect("kernel word");
        let lhs = ctx.ab.class_of(&ruv);
        let rhs: Vec<BigInt> = ctx
            .ab
            .class_of(&ru)
            .iter()
            .zip(ctx.ab.class_of(&rv).iter())
            .map(|(a, b)| a + b)
            .collect();
        if lhs != rhs {
            pass = false;
            break;
        }
    }
    CheckResult {
        name: "rewrite_homomorphism_on_homology".into(),
        pass,
        cases,
    }
}

fn check_class2_laws(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = hyperelliptic_ctx();
    let quotient = build_class2(&ctx.sub, &ctx.sigma).expect("class-2 quotient");
    let cases = 50;
    let mut pass = true;
    let random_elt = |rng: &mut ChaCha8Rng| {
        let h: Vec<BigInt> = (0..quotient.h_rank)
            .map(|_| BigInt::from(rng.gen_range(-5i64..=5)))
            .collect();
        let l: Vec<BigInt> = (0..quotient.layer_rank)
            .map(|_| BigInt::from(rng.gen_range(-5i64..=5)))
            .collect();
        quotient.element(h, l)
    };
    for _ in 0..cases {
        let x = random_elt(&mut rng);
        let y = random_elt(&mut rng);
        let z = random_elt(&mut rng);
        let a = quotient.multiply(&quotient.multiply(&x, &y), &z);
        let b = quotient.multiply(&x, &quotient.multiply(&y, &z));
        if a != b {
            pass = false;
            break;
        }
        if quotient.multiply(&x, &quotient.inverse(&x)) != quotient.identity() {
            pass = false;
            break;
        }
    }
    CheckResult {
        name: "class2_group_laws".into(),
        pass,
        cases,
    }
}

fn check_extension_laws(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctx = hyperelliptic_ctx();
    let (ext2, _) = ctx.level2().expect("level-2 extension");
    let cases = 25;
    let mut pass = true;
    let random_elt = |rng: &mut ChaCha8Rng| crate::sections::Elt2 {
        kernel: ext2.quotient.element(
            (0..ext2.quotient.h_rank)
                .map(|_| BigInt::from(rng.gen_range(-4i64..=4)))
                .collect(),
            (0..ext2.quotient.layer_rank)
                .map(|_| BigInt::from(rng.gen_range(-4i64..=4)))
                .collect(),
        ),
        grade: rng.gen_range(0..2),
    };
    for _ in 0..cases {
        let x = random_elt(&mut rng);
        let y = random_elt(&mut rng);
        let z = random_elt(&mut rng);
        let a = ext2.multiply(&ext2.multiply(&x, &y), &z);
        let b = ext2.multiply(&x, &ext2.multiply(&y, &z));
        if a != b {
            pass = false;
            break;
        }
        if ext2.multiply(&x, &ext2.inverse(&x)) != ext2.identity() {
            pass = false;
            break;
        }
    }
    CheckResult {
        name: "level2_extension_group_laws".into(),
        pass,
        cases,
    }
}

fn check_reduced_engine(seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = true;
    let mut cases = 0;
    // h-parts live mod q_h, layer parts mod q
    for datum in [
        BranchData::new(2, 0, vec![1; 6], vec![]).unwrap(),
        BranchData::new(2, 1, vec![1; 6], vec![1, 0]).unwrap(),
        BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap(),
    ] {
        let ctx = CurveContext::build(&datum).expect("pipeline builds");
        let (ext2, reduced) = ctx.level2().expect("level-2 extension");
        let q = BigInt::from(reduced.q);
        let qh = BigInt::from(reduced.q_h);
        for _ in 0..20 {
            cases += 1;
            let h: Vec<BigInt> = (0..ext2.quotient.h_rank)
                .map(|_| BigInt::from(rng.gen_range(-6i64..=6)))
                .collect();
            let l: Vec<BigInt> = (0..ext2.quotient.layer_rank)
                .map(|_| BigInt::from(rng.gen_range(-6i64..=6)))
                .collect();
            let exact = ext2.conj_t(&ext2.quotient.element(h.clone(), l.clone()));
            let hm: Vec<i64> = h
                .iter()
                .map(|x| {
                    let r: i64 = (&x.mod_floor(&qh)).try_into().unwrap();
                    r
                })
                .collect();
            let lm: Vec<i64> = l
                .iter()
                .map(|x| {
                    let r: i64 = (&x.mod_floor(&q)).try_into().unwrap();
                    r
                })
                .collect();
            let (rh, rl) = reduced.alpha(&hm, &lm);
            let agree_h = exact
                .h_part
                .iter()
                .zip(rh.iter())
                .all(|(e, r)| e.mod_floor(&qh) == BigInt::from(*r));
            let agree_l = exact
                .l_part
                .iter()
                .zip(rl.iter())
                .all(|(e, r)| e.mod_floor(&q) == BigInt::from(*r));
            if !agree_h || !agree_l {
                pass = false;
                break;
            }
        }
    }
    CheckResult {
        name: "reduced_engine_matches_exact_conjugation".into(),
        pass,
        cases,
    }
}

fn check_difference_transitivity(_seed: u64) -> CheckResult {
    let datum = BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).expect("valid datum");
    let ctx = CurveContext::build(&datum).expect("pipeline builds");
    let classes = ctx.ext1.enumerate_section_classes().expect("splits");
    let base = &classes[0].section;
    let mut keys = std::collections::BTreeSet::new();
    for c in &classes {
        let d = ctx.ext1.difference_class(&c.section, base).expect("same level");
        keys.insert(format!("{:?}", ctx.ext1.class_coords(&d)));
    }
    CheckResult {
        name: "difference_class_simple_transitivity".into(),
        pass: keys.len() == classes.len(),
        cases: classes.len(),
    }
}

/// The seeded property suite run by the command-line `proptest` mode.
pub fn run_property_suite(seed: u64) -> Vec<CheckResult> {
    vec![
        check_smith(seed),
        check_cokernel_invariance(seed.wrapping_add(1)),
        check_solve_mod(seed.wrapping_add(2)),
        check_free_reduction(seed.wrapping_add(3)),
        check_rewrite_homomorphism(seed.wrapping_add(4)),
        check_class2_laws(seed.wrapping_add(5)),
        check_extension_laws(seed.wrapping_add(6)),
        check_reduced_engine(seed.wrapping_add(7)),
        check_difference_transitivity(seed.wrapping_add(8)),
    ]
}

/// Seeded quadraticity sweep used by the acceptance suite; 500 sampled
/// pairs when the class group is larger than 256.
pub fn quadraticity_for(datum: &BranchData, seed: u64) -> Result<crate::orbifold::QuadraticityReport, RunError> {
    let ctx = CurveContext::build(datum)?;
    Ok(quadraticity_check(&ctx, 500, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_run_hyperelliptic() {
        let datum = BranchData::new(2, 0, vec![1; 6], vec![]).unwrap();
        let report = run_single(&datum).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.genus, "2");
        assert_eq!(report.h1_dimension, "4");
        assert_eq!(report.section_class_count.as_deref(), Some("16"));
        assert_eq!(report.injective, Some(true));
        assert_eq!(report.liftable_set.as_ref().map(|l| l.len()), Some(6));
        assert_eq!(report.free_action_pass, None);
    }

    #[test]
    fn single_run_two_point_datum() {
        let datum = BranchData::new(2, 1, vec![1, 1], vec![0, 0]).unwrap();
        let report = run_single(&datum).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.h1_dimension, "0");
        assert_eq!(report.injective, Some(false));
        assert_eq!(report.injectivity_pass, Some(true));
    }

    #[test]
    fn json_round_trip() {
        let datum = BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap();
        let report = run_single(&datum).unwrap();
        let line = emit_json_line(&report);
        let parsed = parse_json_line(&line).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn determinism() {
        let datum = BranchData::new(2, 0, vec![1; 6], vec![]).unwrap();
        let a = emit_json_line(&run_single(&datum).unwrap());
        let b = emit_json_line(&run_single(&datum).unwrap());
        assert_eq!(a, b, "byte-identical reports");
    }

    #[test]
    fn enumeration_respects_guard_and_genus() {
        let bounds = SweepBounds {
            max_p: 3,
            max_h: 1,
            max_n: 4,
        };
        let data = enumerate_branch_data(&bounds).unwrap();
        assert!(!data.is_empty());
        for d in &data {
            assert!(d.validate_and_genus().unwrap() <= GENUS_CAP);
        }
        // the hyperbolic bound is enforced
        let too_big = SweepBounds {
            max_p: 11,
            max_h: 1,
            max_n: 4,
        };
        assert!(matches!(
            enumerate_branch_data(&too_big),
            Err(RunError::GuardExceeded(_))
        ));
    }

    #[test]
    fn empty_bounds_sweep_is_empty_success() {
        let bounds = SweepBounds {
            max_p: 2,
            max_h: 0,
            max_n: 0,
        };
        let outcome = run_sweep(&bounds, false).unwrap();
        assert!(outcome.all_pass);
        assert!(outcome.reports.is_empty());
    }

    #[test]
    fn free_action_only_bounds() {
        // n = 0 data only: the free-action check is the only one that runs
        let bounds = SweepBounds {
            max_p: 2,
            max_h: 2,
            max_n: 0,
        };
        let outcome = run_sweep(&bounds, false).unwrap();
        assert!(outcome.all_pass);
        assert!(!outcome.reports.is_empty());
        for r in &outcome.reports {
            assert!(r.free_action_pass.is_some());
            assert!(r.divisor_map_pass.is_none());
        }
    }

    #[test]
    fn property_suite_passes() {
        for check in run_property_suite(42) {
            assert!(check.pass, "{} failed", check.name);
        }
    }
}
