//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use dualortho::classical::{
    hahn_data, hahn_value, krawtchouk_data, krawtchouk_value, limit_transition_check, verify_identity_2,
    verify_identity_3, HahnParams, KrawtchoukParams,
};
use dualortho::duality::{dual_system, verify_theorem1};
use dualortho::ensembles::{
    complement_kernel, kernel, verify_correlations, verify_kernel_laws, verify_prop2, verify_theorem5,
    DEFAULT_BUDGET,
};
use dualortho::grid::{Grid, WeightTable};
use dualortho::hypernum::{Float, FloatContext, Scalar};
use dualortho::matrix::Matrix;
use dualortho::orthopoly::{orthogonalize, KernelForm, Normalization, OrthoSystem};
use dualortho::report::{Tolerance, VerificationReport};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

const FLOAT_TOL: f64 = 1e-30;
const FLOAT_BITS: u32 = 256;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn int(n: i64) -> Q {
    Q::from_i64(n)
}

/// Random grid of `M+1` distinct rationals with positive rational weights.
fn instance(rng: &mut ChaCha8Rng, big_m: usize) -> WeightTable<Q> {
    let mut points: Vec<Q> = Vec::new();
    while points.len() <= big_m {
        let x = q(rng.gen_range(-30..=30), rng.gen_range(1..=4));
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let weights = (0..=big_m)
        .map(|_| q(rng.gen_range(1..=20), rng.gen_range(1..=9)))
        .collect();
    WeightTable::new(Arc::new(Grid::new(points).unwrap()), weights).unwrap()
}

fn to_float(w: &WeightTable<Q>, ctx: &FloatContext) -> WeightTable<Float> {
    let points = w.grid().points().iter().map(|x| Float::from_rational(x, ctx)).collect();
    let values = w.values().iter().map(|x| Float::from_rational(x, ctx)).collect();
    WeightTable::new(Arc::new(Grid::new(points).unwrap()), values).unwrap()
}

fn monic(w: &WeightTable<Q>) -> OrthoSystem<Q> {
    orthogonalize(w, &Normalization::Monic).unwrap()
}

/// Tally of checks inside one criterion.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn report(&mut self, r: &VerificationReport, label: impl FnOnce() -> String) {
        let failed: Vec<&str> = r.clauses.iter().filter(|c| !c.pass).map(|c| c.clause.as_str()).collect();
        self.check(r.pass, || format!("{}: {}", label(), failed.join(", ")));
    }
}

fn criterion(number: usize, title: &str, body: impl FnOnce(&mut Tally) -> String) -> bool {
    let start = Instant::now();
    let mut tally = Tally::default();
    let summary = body(&mut tally);
    let pass = tally.failures.is_empty() && tally.checks > 0;
    println!(
        "{} criterion {number:>2}: {title} [{} checks, {summary}, {:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        tally.checks,
        start.elapsed().as_secs_f64()
    );
    for f in tally.failures.iter().take(5) {
        println!("        {f}");
    }
    pass
}

fn c1_duality(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut max_m = 0;
    for case in 0..120 {
        let big_m = if case < 10 { case } else { rng.gen_range(1..=10) };
        max_m = max_m.max(big_m);
        let s = monic(&instance(&mut rng, big_m));
        let pair = dual_system(&s).unwrap();
        let r = verify_theorem1(&pair, Tolerance::Exact);
        for clause in ["nodal_identity", "norm_duality", "coefficient_identity", "coefficient_norm_identity"] {
            t.check(r.clause(clause).is_some_and(|c| c.pass), || format!("case {case}: {clause}"));
        }
        t.report(&r, || format!("case {case} (M={big_m})"));
    }
    format!("120 instances, M up to {max_m}")
}

fn c2_prop2(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..60 {
        let big_m = if case < 8 { case + 1 } else { rng.gen_range(1..=8) };
        let u = instance(&mut rng, big_m);
        for m in 1..=big_m {
            let r = verify_prop2(&u, m, Tolerance::Exact, DEFAULT_BUDGET).unwrap();
            t.report(&r, || format!("case {case} M={big_m} m={m}"));
        }
    }
    "60 instances, M up to 8, every m".into()
}

fn c3_correlations(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..24 {
        let big_m = if case < 8 { case + 1 } else { rng.gen_range(1..=8) };
        let s = monic(&instance(&mut rng, big_m));
        for m in 1..=big_m {
            let r = verify_correlations(&s, m, 4, Tolerance::Exact, DEFAULT_BUDGET).unwrap();
            t.check(
                r.clause("vanishing_above_m").is_some_and(|c| c.pass),
                || format!("case {case} m={m}: vanishing"),
            );
            t.report(&r, || format!("case {case} M={big_m} m={m}"));
        }
    }
    "24 instances, |A| <= 4, M up to 8, every m".into()
}

fn c4_theorem5(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ctx = FloatContext::new(FLOAT_BITS).unwrap();
    for case in 0..12 {
        let big_m = if case < 8 { case + 1 } else { rng.gen_range(1..=8) };
        let u = instance(&mut rng, big_m);
        let pair = dual_system(&monic(&u)).unwrap();
        let fpair = dual_system(&orthogonalize(&to_float(&u, &ctx), &Normalization::Monic).unwrap()).unwrap();
        for m in 0..=big_m {
            let r = verify_theorem5(&pair, m, Tolerance::Exact, DEFAULT_BUDGET).unwrap();
            t.check(
                r.details.iter().any(|(k, v)| k == "minor_orders_checked" && *v == (big_m + 1).to_string()),
                || format!("case {case} m={m}: not every minor order enumerated"),
            );
            t.report(&r, || format!("rational case {case} M={big_m} m={m}"));
            let r = verify_theorem5(&fpair, m, Tolerance::Relative(FLOAT_TOL), DEFAULT_BUDGET).unwrap();
            t.report(&r, || format!("float case {case} M={big_m} m={m}"));
        }
    }
    format!("12 instances, M up to 8, every m, all principal minors; float {FLOAT_BITS} bits at {FLOAT_TOL:e}")
}

fn c5_kernel_laws(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ctx = FloatContext::new(FLOAT_BITS).unwrap();
    let mut kernels = 0;
    for case in 0..20 {
        let big_m = rng.gen_range(0..=8);
        let u = instance(&mut rng, big_m);
        // squared weights make √(w_j w_k) rational, so the symmetric form is exact
        let squares: Vec<Q> = u.values().iter().map(|w| w.clone() * w.clone()).collect();
        let sq = WeightTable::new(Arc::clone(u.grid()), squares).unwrap();
        let systems = [(monic(&u), KernelForm::Conjugated), (monic(&sq), KernelForm::Symmetric)];
        let fs = orthogonalize(&to_float(&u, &ctx), &Normalization::Monic).unwrap();
        for m in 0..=big_m + 1 {
            for (s, form) in &systems {
                let k = kernel(s, m, *form).unwrap();
                for kk in [&k, &complement_kernel(&k)] {
                    kernels += 1;
                    t.report(&verify_kernel_laws(kk, Tolerance::Exact), || format!("case {case} m={m} {form:?}"));
                    if *form == KernelForm::Symmetric {
                        t.check(kk.entries().transpose() == *kk.entries(), || format!("case {case} m={m}: K^T != K"));
                    }
                }
                if m == big_m + 1 {
                    t.check(*k.entries() == Matrix::identity(big_m + 1), || format!("case {case}: K^(M+1) != I"));
                }
            }
            let fk = kernel(&fs, m, KernelForm::Symmetric).unwrap();
            kernels += 1;
            t.report(&verify_kernel_laws(&fk, Tolerance::Relative(FLOAT_TOL)), || format!("float case {case} m={m}"));
        }
    }
    format!("{kernels} kernels, m = 0..M+1")
}

fn c6_christoffel_darboux(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = 0;
    for case in 0..40 {
        let big_m = if case < 10 { case + 1 } else { rng.gen_range(1..=10) };
        let s = monic(&instance(&mut rng, big_m));
        for m in 1..=big_m {
            for j in 0..=big_m {
                for k in 0..=big_m {
                    if j != k {
                        pairs += 1;
                        t.check(s.cd_sum(m, j, k).unwrap() == s.kernel_sum(m, j, k), || {
                            format!("case {case} m={m} ({j},{k})")
                        });
                    }
                }
            }
        }
    }
    format!("{pairs} node pairs over 40 instances, M up to 10")
}

fn random_unit(rng: &mut ChaCha8Rng) -> Q {
    let d = rng.gen_range(2..=60);
    q(rng.gen_range(1..d), d)
}

fn c7_krawtchouk(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut constant_seen = false;
    for case in 0..24 {
        let n = if case < 4 { 20 - case } else { rng.gen_range(1..=20) };
        let p = random_unit(&mut rng);
        let params = KrawtchoukParams::new(p.clone(), n).unwrap();
        let r = verify_identity_2(&params, Tolerance::Exact).unwrap();
        for clause in ["eq2", "pfaff_route", "normalization_constant"] {
            t.check(r.clause(clause).is_some_and(|c| c.pass), || format!("p={p} N={n}: {clause}"));
        }
        t.report(&r, || format!("p={p} N={n}"));
        constant_seen |= r.clause("normalization_constant").is_some();
    }
    t.check(constant_seen, || "constant not checked".into());
    "24 random p, N up to 20, constant (-1)^N (1-p)^N N! confirmed".into()
}

fn random_above_minus_one(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(1..=80), rng.gen_range(1..=9)) - int(1)
}

fn c8_hahn(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut readings = std::collections::BTreeMap::<String, usize>::new();
    for case in 0..24 {
        let n = if case < 3 { 12 - case } else { rng.gen_range(1..=12) };
        let (a, b) = (random_above_minus_one(&mut rng), random_above_minus_one(&mut rng));
        let params = HahnParams::new(a.clone(), b.clone(), n).unwrap();
        let r = verify_identity_3(&params, Tolerance::Exact).unwrap();
        for clause in ["eq3", "dual_weight_closed_form", "normalization_constant"] {
            t.check(r.clause(clause).is_some_and(|c| c.pass), || format!("a={a} b={b} N={n}: {clause}"));
        }
        t.report(&r, || format!("a={a} b={b} N={n}"));
        let reading = r
            .details
            .iter()
            .find(|(k, _)| k == "normalization_constant_reading")
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        if n >= 2 {
            t.check(reading == "pochhammer", || format!("a={a} b={b} N={n}: constant reading {reading}"));
        }
        *readings.entry(reading).or_default() += 1;
    }
    let summary: Vec<String> = readings.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    format!("24 random (alpha, beta), N up to 12, constant reading {}", summary.join(" "))
}

fn c9_limit(t: &mut Tally) -> String {
    let ts: Vec<Q> = [100, 1_000, 10_000, 100_000].iter().map(|&x| int(x)).collect();
    let r = limit_transition_check(&q(1, 2), 5, &ts).unwrap();
    t.check(r.pass, || format!("slope {}", r.slope));
    t.check((r.slope + 1.0).abs() <= 0.1, || format!("slope {} outside -1 +- 0.1", r.slope));
    format!("N=5, p=1/2, slope {:.4}", r.slope)
}

fn c10_classical_generic(t: &mut Tally) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=12 {
        let p = random_unit(&mut rng);
        let kp = KrawtchoukParams::new(p, n).unwrap();
        let s = monic(&kp.weight());
        for i in 0..=n {
            let (a, norm) = krawtchouk_data(i, &kp).unwrap();
            t.check(s.norms()[i].clone() * a.clone() * a.clone() == norm, || format!("Krawtchouk N={n} p_{i}"));
            for x in 0..=n {
                t.check(s.value(i, x).clone() * a.clone() == krawtchouk_value(i, x, &kp).unwrap(), || {
                    format!("Krawtchouk N={n} K_{i}({x})")
                });
            }
        }
        let hp = HahnParams::new(random_above_minus_one(&mut rng), random_above_minus_one(&mut rng), n).unwrap();
        let s = monic(&hp.weight().unwrap());
        for i in 0..=n {
            let (a, norm) = hahn_data(i, &hp).unwrap();
            t.check(s.norms()[i].clone() * a.clone() * a.clone() == norm, || format!("Hahn N={n} p_{i}"));
            for x in 0..=n {
                t.check(s.value(i, x).clone() * a.clone() == hahn_value(i, x, &hp).unwrap(), || {
                    format!("Hahn N={n} H_{i}({x})")
                });
            }
        }
    }
    "N = 1..12, monic generic system rescaled by closed-form a_n".into()
}

fn main() -> ExitCode {
    println!("acceptance suite");
    let results = [
        criterion(1, "duality relations, exact", c1_duality),
        criterion(2, "ensemble equals complemented dual ensemble", c2_prop2),
        criterion(3, "determinantal correlations and complements", c3_correlations),
        criterion(4, "kernel duality K_u = D(I - K_v)D", c4_theorem5),
        criterion(5, "kernel projection laws", c5_kernel_laws),
        criterion(6, "Christoffel-Darboux form", c6_christoffel_darboux),
        criterion(7, "Krawtchouk reflection identity", c7_krawtchouk),
        criterion(8, "Hahn reflection identity", c8_hahn),
        criterion(9, "Hahn to Krawtchouk limit", c9_limit),
        criterion(10, "classical closed forms against generic systems", c10_classical_generic),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
