//! Acceptance suite. Each criterion runs to completion and prints one
//! `PASS`/`FAIL` line; the process exits non-zero if any criterion fails.
//!
//! Runs without the libtest harness so the summary lines always reach the
//! terminal.

use mulab_cli::commands::CachedResources;
use mulab_cli::corpus::{bundled_curves, bundled_triples, scan, Triple, CORPUS_DISCS, CORPUS_PRIMES};
use mulab_cli::{commands::run_with_cache, Cache};
use mulab_core::arith::{is_prime, is_squarefree, prime_divisors, primes_up_to};
use mulab_core::brandt::{eichler_mass, ideal_class_module};
use mulab_core::invariants::{split_level, EllipticCurve, QuadraticField};
use mulab_core::linalg::{joint_integer_eigenspaces, kernel_saturated, smith_normal_form};
use mulab_core::modsym::{build_space, sturm_bound};
use mulab_core::verify::{
    verify_level_lowering_all_orders, verify_mu_main_conjecture, verify_norm_relation, verify_theta_mu,
    verify_unit_pairing, verify_xi_eta, ReportVerdict, VerificationReport,
};
use mulab_core::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Outcome of one criterion: pass/fail plus a one-line summary.
struct Outcome {
    ok: bool,
    summary: String,
}

fn outcome(ok: bool, summary: impl Into<String>) -> Outcome {
    Outcome { ok, summary: summary.into() }
}

fn curve_arg(t: &Triple) -> String {
    let c = t.curve;
    format!("{}:{} {} {} {} {}", t.conductor, c[0], c[1], c[2], c[3], c[4])
}

fn fail_lines(reports: &[(String, VerificationReport)], want: ReportVerdict) -> Vec<String> {
    reports
        .iter()
        .filter(|(_, r)| r.verdict != want)
        .map(|(name, r)| format!("{name}: {:?} lhs={} rhs={}", r.verdict, r.lhs, r.rhs))
        .collect()
}

// ------------------------------------------------------------ 1. SNF oracle

/// Determinant by fraction-free elimination; exact for the small entries used.
fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i][k] != 0) else { return 0 };
        if piv != k {
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

/// gcd of all k×k minors, k = 1..=min(r, c).
fn determinantal_divisors(a: &[Vec<i64>]) -> Vec<i128> {
    let (r, c) = (a.len(), a[0].len());
    let mut out = vec![0i128; r.min(c)];
    for rows in 1u32..(1 << r) {
        let k = rows.count_ones() as usize;
        if k > c {
            continue;
        }
        let ri: Vec<usize> = (0..r).filter(|i| rows >> i & 1 == 1).collect();
        for cols in 1u32..(1 << c) {
            if cols.count_ones() as usize != k {
                continue;
            }
            let ci: Vec<usize> = (0..c).filter(|j| cols >> j & 1 == 1).collect();
            let m = ri.iter().map(|&i| ci.iter().map(|&j| a[i][j] as i128).collect()).collect();
            out[k - 1] = gcd_i128(out[k - 1], det_i128(m));
        }
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let r = rng.random_range(1..=8usize);
    let c = rng.random_range(1..=8usize);
    let mut a: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.random_range(-6..=6)).collect()).collect();
    // structured cases: scaled rows and dependent rows give non-trivial divisors
    match rng.random_range(0..4) {
        0 => {
            let s = rng.random_range(2..=6);
            for row in a.iter_mut().take(r.div_ceil(2)) {
                row.iter_mut().for_each(|x| *x *= s);
            }
        }
        1 if r > 1 => {
            let (i, j) = (rng.random_range(0..r), rng.random_range(0..r));
            let t = rng.random_range(-3..=3);
            let src = a[j].clone();
            a[i].iter_mut().zip(&src).for_each(|(x, y)| *x = t * y);
        }
        2 => {
            let s = rng.random_range(2..=4);
            a.iter_mut().flatten().for_each(|x| *x *= s);
        }
        _ => {}
    }
    a
}

fn check_snf(a: &[Vec<i64>]) -> Result<(), String> {
    let m = IntMatrix::from_i64_rows(a);
    let snf = smith_normal_form(&m);
    if &(&snf.u * &m) * &snf.v != snf.d {
        return Err("U·A·V != D".into());
    }
    if snf.u.det().abs() != BigInt::one() || snf.v.det().abs() != BigInt::one() {
        return Err("transforms not unimodular".into());
    }
    let d = &snf.divisors;
    if d.iter().any(|x| !x.is_positive()) || d.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
        return Err(format!("divisor chain {d:?}"));
    }
    let delta = determinantal_divisors(a);
    let mut prod = BigInt::one();
    for (k, dk) in delta.iter().enumerate() {
        let expect = if k < d.len() {
            prod *= &d[k];
            prod.clone()
        } else {
            BigInt::zero()
        };
        if BigInt::from(*dk) != expect {
            return Err(format!("Δ_{} = {dk}, divisors give {expect}", k + 1));
        }
    }
    let ker = kernel_saturated(&m);
    if ker.cols() != m.cols() - snf.rank() || !(&m * &ker).is_zero() {
        return Err("kernel has the wrong rank or is not annihilated".into());
    }
    if ker.cols() > 0 {
        let ks = smith_normal_form(&ker);
        if ks.rank() != ker.cols() || ks.divisors.iter().any(|x| !x.is_one()) {
            return Err(format!("kernel not saturated: {:?}", ks.divisors));
        }
    }
    Ok(())
}

fn snf_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let count = 600;
    let mut nontrivial = 0;
    let mut failures = Vec::new();
    for i in 0..count {
        let a = random_matrix(&mut rng);
        match check_snf(&a) {
            Ok(()) => {}
            Err(msg) => failures.push(format!("#{i} {a:?}: {msg}")),
        }
        let d = smith_normal_form(&IntMatrix::from_i64_rows(&a)).divisors;
        if d.iter().any(|x| !x.is_one()) {
            nontrivial += 1;
        }
    }
    outcome(
        failures.is_empty(),
        format!("{count} random matrices up to 8x8 ({nontrivial} with a divisor > 1); failures: {failures:?}"),
    )
}

// ------------------------------------------------------ 2. Eichler mass formula

fn mass_levels() -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for n_minus in 2..=210u64 {
        if !is_squarefree(n_minus) || prime_divisors(n_minus).len().is_multiple_of(2) {
            continue;
        }
        for n_plus in 1..=210 / n_minus {
            if is_squarefree(n_plus * n_minus) {
                out.push((n_plus, n_minus));
            }
        }
    }
    out
}

fn mass_formula() -> Outcome {
    let levels = mass_levels();
    let mut failures = Vec::new();
    for &(np, nm) in &levels {
        let m = match ideal_class_module(np, nm) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("({np},{nm}): {e}"));
                continue;
            }
        };
        let h = m.class_number();
        // distinct classes and a neighbour-closed class set certify the enumeration
        let ell = (2..).find(|&l| is_prime(l) && (np * nm) % l != 0).unwrap();
        let b = m.brandt_matrix(ell);
        let closed = (0..h).all(|j| (0..h).map(|i| b.get(i, j).clone()).sum::<BigInt>() == BigInt::from(ell + 1));
        let distinct = m.brandt_matrix(1) == IntMatrix::identity(h);
        let mass: BigRational = m.weights.iter().map(|&w| BigRational::new(BigInt::one(), BigInt::from(w))).sum();
        let formula = {
            let mut x = BigRational::new(BigInt::one(), BigInt::from(12));
            for q in prime_divisors(nm) {
                x *= BigRational::from_integer(BigInt::from(q - 1));
            }
            for q in prime_divisors(np) {
                x *= BigRational::from_integer(BigInt::from(q + 1));
            }
            x
        };
        if !(closed && distinct && mass == formula && formula == eichler_mass(np, nm)) {
            failures.push(format!("({np},{nm}): closed={closed} distinct={distinct} mass={mass} formula={formula}"));
        }
    }
    outcome(failures.is_empty(), format!("{} levels (N+, N-) with N+N- <= 210; failures: {failures:?}", levels.len()))
}

// ------------------------------------------------- 3. Jacquet–Langlands check

type Systems = BTreeMap<Vec<(u64, i64)>, usize>;

fn systems(spaces: &[mulab_core::linalg::JointEigenspace]) -> Systems {
    let mut out = Systems::new();
    for s in spaces {
        *out.entry(s.eigenvalues.iter().map(|(&k, &v)| (k, v)).collect()).or_default() += s.basis.cols();
    }
    out
}

fn jl_case(n: u64, n_minus: u64) -> Result<usize, String> {
    let n_plus = n / n_minus;
    let bound = sturm_bound(n).bound;
    let m = ideal_class_module(n_plus, n_minus).map_err(|e| e.to_string())?;
    let (brandt_sys, brandt_irr) = m.rational_eigensystems(bound);
    let space = build_space(n).map_err(|e| e.to_string())?;
    let new = space.new_subspace(n_minus).map_err(|e| e.to_string())?;
    let ops: Vec<_> = primes_up_to(bound)
        .into_iter()
        .filter(|l| !n.is_multiple_of(*l))
        .map(|l| (l, space.hecke_operator(l).to_rational(), (2.0 * (l as f64).sqrt()).floor() as i64))
        .collect();
    let (ms_sys, ms_irr) = joint_integer_eigenspaces(&new.to_rational(), &ops);
    let (b, s) = (systems(&brandt_sys), systems(&ms_sys));
    if b != s || brandt_irr != ms_irr || m.class_number() - 1 != new.cols() {
        return Err(format!(
            "N={n} N-={n_minus}: brandt {b:?} (+{brandt_irr} irrational), modular symbols {s:?} (+{ms_irr} irrational)"
        ));
    }
    Ok(b.len())
}

fn jacquet_langlands() -> Outcome {
    let mut cases = BTreeMap::new();
    for n in 2..=100u64 {
        if !is_squarefree(n) {
            continue;
        }
        for d in [-3i64, -7, -8, -11] {
            let k = QuadraticField::new(d).unwrap();
            if let Ok(s) = split_level(n, &k) {
                if s.odd {
                    cases.insert((n, s.n_minus), ());
                }
            }
        }
    }
    let mut failures = Vec::new();
    let mut systems_total = 0;
    for &(n, nm) in cases.keys() {
        match jl_case(n, nm) {
            Ok(c) => systems_total += c,
            Err(e) => failures.push(e),
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} pairs (N, N-), {systems_total} rational eigensystems matched with multiplicity; failures: {failures:?}", cases.len()),
    )
}

// -------------------------------------------------------- corpus-based checks

fn corpus_reports<F>(cache: &Cache, f: F) -> Vec<(String, VerificationReport)>
where
    F: Fn(&EllipticCurve, &QuadraticField, u64, &CachedResources) -> mulab_core::Result<VerificationReport>,
{
    let res = CachedResources { cache };
    bundled_triples()
        .iter()
        .map(|t| {
            let name = format!("{} D={} p={}", t.conductor, t.disc, t.p);
            let r = f(&t.curve(), &t.field(), t.p, &res).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, r)
        })
        .collect()
}

fn main_identity(cache: &Cache) -> Outcome {
    let triples = bundled_triples();
    let full = scan(&bundled_curves(), &CORPUS_DISCS, &CORPUS_PRIMES, 200);
    let uncertified: Vec<_> = triples.iter().filter(|t| !full.contains(t)).collect();
    let reports = corpus_reports(cache, |e, k, p, r| verify_mu_main_conjecture(e, k, p, r));
    let positive = triples.iter().filter(|t| t.tamagawa_sum > 0).count();
    let failures = fail_lines(&reports, ReportVerdict::Pass);
    let ok = failures.is_empty() && uncertified.is_empty() && triples.len() >= 10 && positive >= 2;
    outcome(
        ok,
        format!(
            "{} CR-certified triples, {positive} with positive Tamagawa sum; failures: {failures:?}; uncertified: {uncertified:?}",
            triples.len()
        ),
    )
}

/// Multi-prime conductors with a non-trivial or trivial chain, each at a prime
/// where the hypotheses hold.
const CHAINS: &[(&str, u64)] = &[
    ("77:0 1 1 -89 295", 5),
    ("78:1 1 0 -19 685", 5),
    ("110:1 0 1 -89 316", 7),
    ("129:1 0 1 -25 -49", 5),
    ("161:1 -1 1 -4 -2", 5),
    ("26:1 0 1 0 0", 5),
];

fn level_lowering(cache: &Cache) -> Outcome {
    let res = CachedResources { cache };
    let mut failures = Vec::new();
    let mut orderings = 0;
    let mut nontrivial = 0;
    for &(curve, p) in CHAINS {
        let e = EllipticCurve::parse(curve).unwrap();
        let primes = prime_divisors(e.conductor);
        let reports = verify_level_lowering_all_orders(&e, &primes, p, &res).unwrap();
        orderings += reports.len();
        if reports.iter().any(|r| r.lhs["eta_N_1"] != 0) {
            nontrivial += 1;
        }
        for r in reports.iter().filter(|r| r.verdict != ReportVerdict::Pass) {
            failures.push(format!("{curve} p={p} chain={}: {:?} {} vs {}", r.inputs["chain"], r.verdict, r.lhs, r.rhs));
        }
    }
    outcome(
        failures.is_empty() && CHAINS.len() >= 5,
        format!("{} curves, {orderings} orderings, {nontrivial} with ord_p eta_f(N) > 0; failures: {failures:?}", CHAINS.len()),
    )
}

const SUPERSINGULAR: &[(&str, i64, u64)] =
    &[("14:1 0 1 -1 0", -19, 11), ("141:1 1 1 -8 -16", -19, 5), ("142:1 0 0 -8 8", -11, 5), ("155:0 -1 1 -1 1", -3, 7)];
const ORDINARY: &[(&str, i64, u64)] =
    &[("11:0 -1 1 -10 -20", -3, 7), ("17:1 -1 1 -1 0", -7, 5), ("19:0 1 1 1 0", -11, 7), ("46:1 -1 0 -170 -812", -11, 5)];

fn norm_relations(cache: &Cache) -> Outcome {
    let res = CachedResources { cache };
    let mut failures = Vec::new();
    for (set, supersingular) in [(SUPERSINGULAR, true), (ORDINARY, false)] {
        for &(curve, d, p) in set {
            let e = EllipticCurve::parse(curve).unwrap();
            let k = QuadraticField::new(d).unwrap();
            let r = verify_norm_relation(&e, &k, p, 2, &res).unwrap();
            let mode_ok = (e.ap(p) == 0) == supersingular && (!supersingular || k.splitting(p) == 1);
            if r.verdict != ReportVerdict::Pass || !mode_ok {
                failures.push(format!("{curve} D={d} p={p}: {:?} hypotheses {:?}", r.verdict, r.hypotheses));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} supersingular split triples exact at layer 2, {} ordinary triples mod p^2; failures: {failures:?}",
            SUPERSINGULAR.len(),
            ORDINARY.len()
        ),
    )
}

fn theta_mu(cache: &Cache) -> Outcome {
    let reports = corpus_reports(cache, |e, k, p, r| verify_theta_mu(e, k, p, 2, r));
    let failures = fail_lines(&reports, ReportVerdict::Pass);
    let signed = reports.iter().filter(|(_, r)| r.details.as_ref().is_some_and(|d| d["supersingular"] == true)).count();
    outcome(
        failures.is_empty(),
        format!("mu(theta_1) = mu(theta_2) = 0 on {} triples ({signed} in signed mode); findings: {failures:?}", reports.len()),
    )
}

fn unit_pairing(cache: &Cache) -> Outcome {
    let reports = corpus_reports(cache, |e, k, p, r| verify_unit_pairing(e, k, p, r));
    let failures = fail_lines(&reports, ReportVerdict::Pass);
    outcome(failures.is_empty(), format!("{} triples; failures: {failures:?}", reports.len()))
}

fn xi_eta(cache: &Cache) -> Outcome {
    let reports = corpus_reports(cache, |e, k, p, r| verify_xi_eta(e, k, p, r));
    let decided = reports.iter().filter(|(_, r)| r.verdict == ReportVerdict::Pass).count();
    let skipped: Vec<_> = reports.iter().filter(|(_, r)| r.verdict == ReportVerdict::Skipped).map(|(n, _)| n.clone()).collect();
    let failures = fail_lines(&reports, ReportVerdict::Pass)
        .into_iter()
        .filter(|l| !l.contains("Skipped"))
        .collect::<Vec<_>>();
    outcome(
        failures.is_empty() && decided > 0,
        format!("{decided} triples with ord_p xi = ord_p eta(N+,N-), skipped (not free): {skipped:?}; failures: {failures:?}"),
    )
}

// ----------------------------------------------------------- 10. determinism

fn args(words: &[&str]) -> Vec<String> {
    std::iter::once("mulab").chain(words.iter().copied()).map(String::from).collect()
}

fn command_lines() -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for t in bundled_triples() {
        let c = curve_arg(&t);
        let (n, d, p) = (t.conductor.to_string(), t.disc.to_string(), t.p.to_string());
        let (np, nm) = (t.n_plus.to_string(), t.n_minus.to_string());
        let triple = ["--curve", &c, "--disc", &d, "--p", &p];
        out.push(args(&["split-level", "--N", &n, "--disc", &d]));
        out.push(args(&["eta", "--N", &n, "--N2", &nm, "--p", &p, "--curve", &c]));
        for q in prime_divisors(t.n_minus) {
            out.push(args(&["tamagawa", "--curve", &c, "--ell", &q.to_string(), "--p", &p]));
        }
        out.push(args(&["brandt", "--Nplus", &np, "--Nminus", &nm, "--ell", "2,3"]));
        for cmd in ["xi", "check-cr", "theta", "admissible", "verify-mu"] {
            out.push(args(&[&[cmd][..], &triple[..]].concat()));
        }
    }
    out.push(args(&["verify-levellower", "--curve", "78:1 1 0 -19 685", "--chain", "2,3,13", "--p", "5", "--all-orders"]));
    out.push(args(&["mu-lambda", "--coeffs", "5,5,0,1", "--p", "5"]));
    out.push(args(&["corpus-scan", "--max-conductor", "60"]));
    out
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path());
    let disabled = Cache::disabled();
    let lines = command_lines();
    let mut failures = Vec::new();
    for args in &lines {
        let line = args[1..].join(" ");
        let cold = run_with_cache(args, &cache);
        let warm = run_with_cache(args, &cache);
        let mut bypass_args = args.clone();
        bypass_args.insert(1, "--no-cache".into());
        let bypass = run_with_cache(&bypass_args, &disabled);
        if cold.code != 0 {
            failures.push(format!("{line}: exit {} {}", cold.code, cold.stdout));
        }
        if cold != warm || cold != bypass {
            failures.push(format!("{line}: outputs differ"));
        }
    }
    outcome(
        failures.is_empty() && cache.hits() > 0,
        format!("{} invocations, cached/warm/--no-cache identical ({} cache hits); failures: {failures:?}", lines.len(), cache.hits()),
    )
}

// ----------------------------------------------------------------- driver

type Criterion<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::at(dir.path());
    let criteria: Vec<Criterion> = vec![
        ("1 smith normal form oracle", Some(Duration::from_secs(30)), Box::new(snf_oracle)),
        ("2 eichler mass formula", Some(Duration::from_secs(300)), Box::new(mass_formula)),
        ("3 jacquet-langlands cross-check", Some(Duration::from_secs(600)), Box::new(jacquet_langlands)),
        ("4 eta/xi tamagawa identity", None, Box::new(|| main_identity(&cache))),
        ("5 level lowering chains", None, Box::new(|| level_lowering(&cache))),
        ("6 theta norm relations", None, Box::new(|| norm_relations(&cache))),
        ("7 mu-vanishing of theta elements", None, Box::new(|| theta_mu(&cache))),
        ("8 unit pairing", None, Box::new(|| unit_pairing(&cache))),
        ("9 xi = eta under freeness", None, Box::new(|| xi_eta(&cache))),
        ("10 cache determinism", None, Box::new(determinism)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, run) in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (ok, summary) = match result {
            Ok(o) => {
                let in_time = budget.is_none_or(|b| elapsed <= b);
                let note = if in_time { String::new() } else { format!(" [over the {}s budget]", budget.unwrap().as_secs()) };
                (o.ok && in_time, format!("{}{note}", o.summary))
            }
            Err(_) => (false, "panicked".to_string()),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {name}: {} ({:.1}s) {summary}", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
