//! Acceptance criteria 1-10. Runs as a plain binary so each criterion prints
//! exactly one PASS/FAIL line; the process fails if any criterion does.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qverify_core::catalog::b5::{lemma_lhs, lemma_rhs};
use qverify_core::catalog::s3::S3;
use qverify_core::catalog::series::{m20_expr, product_side};
use qverify_core::catalog::{self, Level};
use qverify_core::positivity::{self, check_nonneg, membership, InstanceBounds, Membership, ScanBounds, Source, Verdict};
use qverify_core::qbinom::{qbin, qbinom_theorem_rhs, Monomial, PochLength};
use qverify_core::qexpr::{self, Expr};
use qverify_core::qpoly::{LaurentSum, QLaurent};
use qverify_core::record::VerificationRecord;
use qverify_core::runner::{self, Format, RunConfig};
use qverify_core::transforms::{kernel, kernel_k_max, KernelKind};

/// Wall-clock budgets. Identities themselves are compared exactly.
const BUDGET_FQ: Duration = Duration::from_secs(60);
const BUDGET_M20: Duration = Duration::from_secs(30);
const BUDGET_SCAN: Duration = Duration::from_secs(300);
const BUDGET_OTHER: Duration = Duration::from_secs(300);

const SERIES_T: usize = 40;
const M20_T: usize = 60;
const LIMIT_T: usize = 30;
const ROUND_TRIPS: usize = 500;
const AST_SEED: u64 = 0xa57;

struct Check {
    cases: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { cases: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn records(&mut self, recs: &[VerificationRecord]) {
        for r in recs {
            self.expect(r.passed(), || {
                format!("{} {} {} at {:?} {:?}", r.family, r.params, r.status, r.first_mismatch, r.detail)
            });
        }
    }

    /// Every listed family over its full grid, optionally at a fixed truncation.
    fn families(&mut self, ids: &[&str], trunc: Option<usize>) {
        let cfg = RunConfig { level: Level::Full, ..RunConfig::default() };
        let mut tasks = Vec::new();
        for id in ids {
            let f = catalog::lookup(id).expect("registered");
            tasks.extend(runner::plan_family(f, &[], Level::Full, trunc).expect("grid"));
        }
        let recs = runner::run(&tasks, &cfg).expect("config");
        self.records(&recs);
    }
}

fn criterion(n: usize, title: &str, budget: Duration, body: impl FnOnce(&mut Check)) -> bool {
    let start = Instant::now();
    let mut c = Check::new();
    body(&mut c);
    let took = start.elapsed();
    let in_time = took <= budget;
    let ok = c.failures.is_empty() && in_time;
    let mut line = format!(
        "{} criterion {n:>2}: {title}: {} checks, {} failed, {:.1}s (budget {}s)",
        if ok { "PASS" } else { "FAIL" },
        c.cases,
        c.failures.len(),
        took.as_secs_f64(),
        budget.as_secs()
    );
    for note in &c.notes {
        line += &format!("; {note}");
    }
    println!("{line}");
    for f in c.failures.iter().take(10) {
        println!("    {f}");
    }
    ok
}

fn poly_eq(c: &mut Check, a: &QLaurent, b: &QLaurent, what: impl FnOnce() -> String) {
    c.expect(a == b, what);
}

fn random_mono(rng: &mut ChaCha8Rng) -> Monomial {
    if rng.gen_bool(0.3) {
        Monomial::new(rng.gen_range(-5..=5), 0)
    } else {
        let e = loop {
            let e = rng.gen_range(-6..=20);
            if e != 0 {
                break e;
            }
        };
        Monomial::new(if rng.gen_bool(0.5) { -1 } else { 1 }, e)
    }
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => Expr::Int(rng.gen_range(0..1000)),
            1 => Expr::QPower(rng.gen_range(-5..=30)),
            2 => Expr::Poch {
                args: (0..rng.gen_range(1..4)).map(|_| random_mono(rng)).collect(),
                base: random_mono(rng),
                length: if rng.gen_bool(0.5) { PochLength::Infinite } else { PochLength::Finite(rng.gen_range(0..9)) },
            },
            _ => Expr::QBin { top: rng.gen_range(-3..12), bottom: rng.gen_range(-3..12), base: random_mono(rng) },
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Expr::neg(random_expr(rng, d)),
        1 => Expr::add(random_expr(rng, d), random_expr(rng, d)),
        2 => Expr::sub(random_expr(rng, d), random_expr(rng, d)),
        3 => Expr::mul(random_expr(rng, d), random_expr(rng, d)),
        4 => Expr::div(random_expr(rng, d), random_expr(rng, d)),
        _ => Expr::pow(random_expr(rng, d), rng.gen_range(-4..=6)),
    }
}

/// JSON of a verify-all run with timings removed.
fn stable_json(jobs: usize) -> String {
    let cfg = RunConfig { jobs, ..RunConfig::default() };
    let tasks = runner::plan_all(catalog::registry(), Level::Smoke, None);
    let mut recs = runner::run(&tasks, &cfg).expect("config");
    for r in &mut recs {
        r.elapsed_ms = 0.0;
    }
    runner::render(&recs, Format::Json).expect("json")
}

fn main() {
    let mut all = Vec::new();

    all.push(criterion(1, "FQ, v<=4, L<=12", BUDGET_FQ, |c| c.families(&["FQ"], None)));

    all.push(criterion(2, "T11 and N17, v<=3, L<=8, with W/O route", BUDGET_OTHER, |c| {
        c.families(&["T11", "N17", "T11-ROUTE", "N17-ROUTE"], None)
    }));

    all.push(criterion(3, "N16, L<=10, and its M-bounded parent, L,M<=6", BUDGET_OTHER, |c| {
        c.families(&["N16", "B5-T44"], None)
    }));

    all.push(criterion(4, "single-sum closed forms, L<=30", BUDGET_OTHER, |c| {
        c.families(
            &["S3-Ft", "S3-I2", "S3-27", "S3-A", "S3-B", "S3-X", "S3-Y", "S3-Z", "S3-C", "S3-Prodinger"],
            None,
        );
        c.expect(S3::C.sum(0).is_zero() && S3::C.closed(0).unwrap().is_zero(), || "C(0) is not 0".into());
        for l in 0..=30 {
            let (a, b) = (S3::A.sum(l), S3::B.sum(l));
            let i = S3::I2.closed(l).unwrap();
            poly_eq(c, &(&a + &b.shift(l)), &i, || format!("A + q^L B at L={l}"));
            poly_eq(c, &(&b - &a.shift(l - 1)), &i.shift(l), || format!("B - q^(L-1) A at L={l}"));
        }
    }));

    all.push(criterion(5, "kernel identities, L<=12; kernel positivity, L<=20", BUDGET_OTHER, |c| {
        c.families(&["TR-C", "TR-W", "TR-O"], None);
        for kind in KernelKind::ALL {
            for l in 0..=20 {
                for k in 0..=kernel_k_max(kind, l) {
                    let p = kernel(kind, l, k);
                    c.expect(p.first_negative().is_none(), || format!("kernel {kind} L={l} k={k} negative"));
                }
            }
        }
    }));

    all.push(criterion(6, "summation lemma and doubly bounded identities", BUDGET_OTHER, |c| {
        c.families(
            &[
                "B5-L51", "B5-T41", "B5-T42", "B5-T43a", "B5-T43b", "B5-47x", "B5-48y", "B5-L41", "B5-410", "B5-414c",
                "B5-421",
            ],
            None,
        );
        let tuples = catalog::lemma_tuples(200);
        let printed_misses = tuples
            .iter()
            .filter(|p| {
                let g = |n: &str| p.get(n).unwrap();
                let t = (g("alpha"), g("beta"), g("j"), g("m1"), g("m2"), g("M"));
                lemma_lhs(t.0, t.1, t.2, t.3, t.4, t.5, true) != lemma_rhs(t.0, t.1, t.2, t.3, t.4, t.5, false)
            })
            .count();
        c.notes.push(format!("lemma as printed (i from 0, no q^(-alpha beta)) misses {printed_misses}/200"));
    }));

    all.push(criterion(7, "mod-20 identities at T=60, nonnegative integer sides", BUDGET_M20, |c| {
        let ids: Vec<String> = (1..=10).map(|r| format!("M20-{r}")).collect();
        let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
        c.families(&ids, Some(M20_T));
        for r in 1..=10 {
            let via_expr = qexpr::eval_str(&m20_expr(r), M20_T).unwrap();
            let direct = product_side(20, r, M20_T).unwrap();
            c.expect(via_expr == direct, || format!("expression form of M20-{r} differs"));
        }
    }));

    all.push(criterion(8, "series identities at T=40", BUDGET_OTHER, |c| {
        let ids = ["SER-11", "SER-AG", "SER-15", "SER-19", "SER-422", "SER-JTP"];
        c.families(&ids, Some(SERIES_T));
        // a shorter truncation must not change any verdict
        c.families(&ids, Some(SERIES_T / 2));
    }));

    all.push(criterion(9, "positivity scan K<=6, N,M<=12 and theorem instances", BUDGET_SCAN, |c| {
        let cfg = RunConfig::default();
        let rep = runner::scan(ScanBounds::up_to(6, 12, 12), &cfg).expect("scan");
        c.cases += rep.cells;
        for v in &rep.violations {
            c.failures.push(format!("negative coefficient in {} at q^{:?}", v.params(), v.exponent));
        }
        let neg_edge = rep.boundary.iter().filter(|b| b.is_negative()).count();
        c.notes.push(format!(
            "{} domain cells; {} K=2 boundary cells reported separately, {} of them with a negative coefficient",
            rep.cells,
            rep.boundary.len(),
            neg_edge
        ));
        let bounds = InstanceBounds { v: (2, 3), n: (1, 3), l: (0, 10) };
        let mut instances = 0;
        for s in &Source::ALL[1..] {
            for inst in positivity::instance_generators(s.tag(), bounds).expect("tag") {
                instances += 1;
                if let Some(cell) = &inst.cell {
                    c.expect(membership(cell) == Membership::Inside, || format!("{s} {} outside the domain", inst.params));
                }
                match inst.eval() {
                    Ok(p) => c.expect(check_nonneg(&p) == Verdict::NonNegative, || format!("{s} {} negative", inst.params)),
                    Err(e) => c.expect(false, || format!("{s} {}: {e}", inst.params)),
                }
            }
        }
        c.notes.push(format!("{instances} theorem instances"));
    }));

    all.push(criterion(10, "binomials, q-binomial theorem, limits, parser, stable JSON", BUDGET_OTHER, |c| {
        for n in 0..=30 {
            for k in 0..=n {
                let b = qbin(n, k, 1);
                poly_eq(c, &b, &qbin(n, n - k, 1), || format!("symmetry [{n},{k}]"));
                c.expect(b.first_negative().is_none(), || format!("[{n},{k}] negative"));
                if n > 0 {
                    let rec = qbin(n - 1, k - 1, 1).as_ref() + &qbin(n - 1, k, 1).shift(k);
                    poly_eq(c, &b, &rec, || format!("recurrence [{n},{k}]"));
                }
            }
        }
        for z in [Monomial::new(1, 0), Monomial::q(1), Monomial::q(2), Monomial::new(-1, 1), Monomial::new(-1, 2)] {
            for l in 0..=20 {
                let mut acc = LaurentSum::new();
                for k in 0..=l {
                    let t = qbin(l, k, 1).scale_int(z.coeff.pow(k as u32));
                    acc.add_shifted(&t, k * (k - 1) / 2 + z.exp * k, false);
                }
                poly_eq(c, &acc.finish(), &qbinom_theorem_rhs(l, z), || format!("q-binomial theorem L={l} z={z}"));
            }
        }
        c.families(&["LIM-15", "LIM-19", "LIM-422"], Some(LIMIT_T));
        let mut rng = ChaCha8Rng::seed_from_u64(AST_SEED);
        for _ in 0..ROUND_TRIPS {
            let e = random_expr(&mut rng, 5);
            let text = e.to_string();
            c.expect(qexpr::parse(&text).as_ref() == Ok(&e), || format!("round trip of {text}"));
        }
        let jobs = RunConfig::default().jobs;
        let (a, b) = (stable_json(1), stable_json(jobs.max(2)));
        c.expect(a == b, || "JSON differs between runs".into());
        c.expect(serde_json::from_str::<serde_json::Value>(&a).is_ok(), || "JSON does not parse".into());
    }));

    let passed = all.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", all.len());
    if passed != all.len() {
        std::process::exit(1);
    }
}
