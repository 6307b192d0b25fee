use crate::args::{Format, Suite, VerifyArgs};
use crate::commands::Outcome;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{sorted_json, table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use wrlat_core::density::center_density;
use wrlat_core::modules::{self, ModuleBasis};
use wrlat_core::svp::{circulant_det_check, enumerate_minimum, orbit_sublattice, span_rank};
use wrlat_core::{intmat, Element, NumberField, Precision};

pub const RAMIFIED: [(u64, u64); 5] = [(3, 9), (3, 63), (5, 25), (5, 275), (7, 49)];
pub const UNRAMIFIED: [(u64, u64); 4] = [(3, 7), (3, 13), (3, 31), (5, 11)];
const UNRAMIFIED_EXTRA: [(u64, u64); 2] = [(3, 91), (7, 29)];

const CATALOG: [(&str, &str); 23] = [
    ("ramified trace closed forms", "Tr(1)=p, Tr(θ^i t)=0, Tr(θ^i t θ^j t) = n(p-1)/p or -n/p"),
    ("exact vs numeric Gram", "|G_exact - G_periods| < 1e-6 for every character choice"),
    ("discriminant", "det Gram(O_K) = n^(p-1)"),
    ("unramified pair traces", "Tr(θ^i t)=(-1)^s, d-o = n, d+(p-1)o = 1"),
    ("M_m minimum, p | m", "min = min(m^2/p, u p (p-1))"),
    ("M_m minimum, p ∤ m", "min = min(p m^2, u p (p-1))"),
    ("orbit module minimum", "min = p(u(p-1) + m^2)"),
    ("orbit basis attains minimum", "every basis vector has norm p(u(p-1) + m^2)"),
    ("orbit module well rounded", "p independent minimal vectors"),
    ("unramified WR window", "WR iff n/(p+1) <= m^2 <= n(p+1), m ≡ 1 mod p"),
    ("density identity", "δ^2 · 4^p · det G = t^p exactly"),
    ("specialized density agreement", "δ from the divisor-m formula equals δ when the index is m"),
    ("orthogonal anchor", "(3,9) orbit module m=1 has Gram 9I and δ = 1/8"),
    ("orbit rank vs trace", "rank of the Galois orbit is p iff Tr(α) ≠ 0"),
    ("circulant determinant vs trace", "Π_i f(ζ^i) ≠ 0 iff Tr(α) ≠ 0"),
    ("circulant factors nonvanishing", "|f(ζ^i)| > tolerance for i ≥ 1"),
    ("circulant determinant consistent", "Π_i f(ζ^i) matches ± det(orbit) · det(embedding)"),
    ("orbit Gram circulant", "orbit Gram is circulant with equal diagonal"),
    ("orbit module inside M_m", "OrbitM ⊂ M_m with [M_m : OrbitM] = p"),
    ("M_m ideal iff m | n", "M_m is an O_K-ideal exactly when m divides n"),
    ("M_m index, unramified or p ∤ m", "[O_K : M_m] = m"),
    ("ramified M_m index, p | m", "[O_K : M_m] = m/p, the stated m is flagged"),
    ("orbit module index", "[O_K : OrbitM] = pm, the stated m is flagged"),
];

fn anchor(check: &str) -> &'static str {
    CATALOG
        .iter()
        .find(|(c, _)| *c == check)
        .map(|(_, a)| *a)
        .unwrap_or("construction of the objects under test")
}

#[derive(Debug, Clone)]
struct Case {
    check: &'static str,
    ok: bool,
    inputs: String,
    flag: Option<String>,
}

fn case(check: &'static str, ok: bool, inputs: String) -> Case {
    Case {
        check,
        ok,
        inputs,
        flag: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub suite: String,
    pub check: String,
    pub anchor: String,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    pub first_failure: Option<String>,
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Ctx {
    seed: u64,
    samples: usize,
    precision: Precision,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::TraceIdentities => "trace-identities",
        Suite::Minima => "minima",
        Suite::WrWindow => "wr-window",
        Suite::Density => "density",
        Suite::Circulant => "circulant",
        Suite::Orbit => "orbit",
        Suite::IdealIndex => "ideal-index",
        Suite::All => "all",
    }
}

fn fields(s: Suite) -> Vec<(u64, u64)> {
    let all: Vec<_> = RAMIFIED.iter().chain(UNRAMIFIED.iter()).copied().collect();
    match s {
        Suite::TraceIdentities => all.into_iter().chain(UNRAMIFIED_EXTRA).collect(),
        Suite::Minima | Suite::Orbit => RAMIFIED.to_vec(),
        Suite::WrWindow => UNRAMIFIED.to_vec(),
        Suite::Density | Suite::Circulant | Suite::IdealIndex => all,
        Suite::All => Vec::new(),
    }
}

fn tasks(s: Suite) -> Vec<(Suite, u64, u64)> {
    if s == Suite::All {
        return [
            Suite::TraceIdentities,
            Suite::Minima,
            Suite::WrWindow,
            Suite::Density,
            Suite::Circulant,
            Suite::Orbit,
            Suite::IdealIndex,
        ]
        .into_iter()
        .flat_map(tasks)
        .collect();
    }
    fields(s).into_iter().map(|(p, n)| (s, p, n)).collect()
}

fn run_task(s: Suite, p: u64, n: u64, ctx: Ctx) -> Vec<Case> {
    let body = || -> Result<Vec<Case>> {
        let nf = NumberField::with_options(p, n, 0, ctx.precision)?;
        match s {
            Suite::TraceIdentities => trace_identities(&nf, ctx),
            Suite::Minima => minima(&nf),
            Suite::WrWindow => wr_window(&nf),
            Suite::Density => density(&nf),
            Suite::Circulant => circulant(&nf, ctx),
            Suite::Orbit => orbit(&nf, ctx),
            Suite::IdealIndex => ideal_index(&nf),
            Suite::All => Ok(Vec::new()),
        }
    };
    body().unwrap_or_else(|e| vec![case("construction", false, format!("({p},{n}): {e}"))])
}

fn mm(nf: &NumberField, m: u64) -> wrlat_core::Result<ModuleBasis> {
    if nf.spec.ramified {
        modules::build_mm_ramified(&nf.spec, m)
    } else {
        modules::build_mm_unramified(&nf.spec, m)
    }
}

fn trace_identities(nf: &NumberField, ctx: Ctx) -> Result<Vec<Case>> {
    let (p, n) = (nf.p() as i64, nf.n() as i64);
    let tag = format!("({p},{n})");
    let t = &nf.traces;
    let g = nf.basis_gram();
    let mut out = Vec::new();
    if nf.spec.ramified {
        let (d, o) = (n * (p - 1) / p, -n / p);
        let expect = |i: usize, j: usize| -> i64 {
            match (i, j) {
                (0, 0) => p,
                (0, _) | (_, 0) => 0,
                _ if i == j => d,
                _ => o,
            }
        };
        let entries = (0..p as usize).all(|i| (0..p as usize).all(|j| g[i][j] == expect(i, j)));
        let ok = t.tr_one.value == p && t.tr_theta.value == 0 && t.tr_pair_diag.value == d && t.tr_pair_off.value == o;
        out.push(case("ramified trace closed forms", ok && entries, format!("{tag}: gram {g:?}")));
    } else {
        let (d, o) = (t.tr_pair_diag.value, t.tr_pair_off.value);
        let ok = d - o == n && d + (p - 1) * o == 1 && t.tr_theta.value == nf.spec.sign();
        out.push(case("unramified pair traces", ok, format!("{tag}: d={d} o={o}")));
    }
    for k in 0..nf.choices.len() {
        let other = NumberField::with_options(nf.p(), nf.n(), k, ctx.precision)?;
        let gap = other.numeric_gram_gap();
        out.push(case(
            "exact vs numeric Gram",
            gap < 1e-6 && other.basis_gram() == g,
            format!("{tag} choice {k}: gap {gap:e}"),
        ));
    }
    out.push(case(
        "discriminant",
        intmat::det_i64(&g) == nf.spec.discriminant(),
        format!("{tag}: det {}", intmat::det_i64(&g)),
    ));
    Ok(out)
}

fn minima(nf: &NumberField) -> Result<Vec<Case>> {
    let (p, n, u) = (nf.p(), nf.n(), nf.spec.u_value());
    let cap = (u * p * (p - 1)) as i128;
    let mut out = Vec::new();
    for m in (1..=10).map(|k| k * p).chain((2..=20).filter(|m| m % p != 0)) {
        let r = enumerate_minimum(&modules::gram(&nf.traces, &mm(nf, m)?)?)?;
        let (check, expected) = if m % p == 0 {
            ("M_m minimum, p | m", ((m * m / p) as i128).min(cap))
        } else {
            ("M_m minimum, p ∤ m", ((p * m * m) as i128).min(cap))
        };
        out.push(case(
            check,
            r.minimum == expected,
            format!("({p},{n}) m={m}: enumerated {} expected {expected}", r.minimum),
        ));
    }
    for m in (1..=10).filter(|m| m % p != 0) {
        let g = modules::gram(&nf.traces, &modules::build_orbit_m(&nf.spec, m)?)?;
        let r = enumerate_minimum(&g)?;
        let expected = (p * (u * (p - 1) + m * m)) as i128;
        let tag = format!("({p},{n}) m={m}");
        out.push(case(
            "orbit module minimum",
            r.minimum == expected,
            format!("{tag}: enumerated {} expected {expected}", r.minimum),
        ));
        let diag: Vec<i64> = (0..p as usize).map(|i| g.entries[i][i]).collect();
        out.push(case(
            "orbit basis attains minimum",
            diag.iter().all(|&d| d as i128 == r.minimum),
            format!("{tag}: diagonal {diag:?} minimum {}", r.minimum),
        ));
        let independent = span_rank(&r.witness) == p as usize;
        out.push(case(
            "orbit module well rounded",
            r.well_rounded && independent,
            format!("{tag}: span rank {} of {} minimal pairs", r.span_rank, r.count_pairs),
        ));
    }
    Ok(out)
}

fn wr_window(nf: &NumberField) -> Result<Vec<Case>> {
    let (p, n) = (nf.p(), nf.n());
    let mut out = Vec::new();
    for m in (1..=12).filter(|m| m % p == 1) {
        let r = enumerate_minimum(&modules::gram(&nf.traces, &mm(nf, m)?)?)?;
        let (n2, m2, q) = (n as u128, (m * m) as u128, (p + 1) as u128);
        let window = n2 <= m2 * q && m2 <= n2 * q;
        out.push(case(
            "unramified WR window",
            r.well_rounded == window,
            format!("({p},{n}) m={m}: enumerated WR {} window {window}", r.well_rounded),
        ));
    }
    Ok(out)
}

fn density_lattices(nf: &NumberField) -> wrlat_core::Result<Vec<ModuleBasis>> {
    let p = nf.p();
    let mut v = Vec::new();
    if nf.spec.ramified {
        for m in (1..=10).map(|k| k * p).chain((2..=20).filter(|m| m % p != 0)) {
            v.push(modules::build_mm_ramified(&nf.spec, m)?);
        }
        for m in (1..=10).filter(|m| m % p != 0) {
            v.push(modules::build_orbit_m(&nf.spec, m)?);
        }
    } else {
        for m in (1..=12).filter(|m| m % p == 1) {
            v.push(modules::build_mm_unramified(&nf.spec, m)?);
        }
    }
    Ok(v)
}

fn density(nf: &NumberField) -> Result<Vec<Case>> {
    let (p, n) = (nf.p(), nf.n());
    let mut out = Vec::new();
    for b in density_lattices(nf)? {
        let g = modules::gram(&nf.traces, &b)?;
        let r = enumerate_minimum(&g)?;
        let d = center_density(&b, &g, r.minimum);
        let tag = format!("({p},{n}) {} m={}", b.family, b.params.m.unwrap_or(0));
        out.push(case(
            "density identity",
            d.identity_holds(p as usize),
            format!("{tag}: δ^2 = {}", d.delta_sq),
        ));
        if let Some(div) = d.specialized_divisor {
            let matches = d.index == div.into();
            let mut c = case(
                "specialized density agreement",
                !matches || !d.discrepancy_flag,
                format!("{tag}: δ {} specialized {:?} index {}", d.delta_computed, d.delta_specialized, d.index),
            );
            if !matches {
                c.flag = Some(format!(
                    "{tag}: index {} differs from divisor {div}, δ {:.12e} vs {:.12e}",
                    d.index,
                    d.delta_computed,
                    d.delta_specialized.unwrap_or(f64::NAN)
                ));
            }
            out.push(c);
        }
        if (p, n) == (3, 9) && b.family == modules::Family::OrbitM && b.params.m == Some(1) {
            out.push(case(
                "orthogonal anchor",
                is_scaled_identity(&g.entries, 9) && d.delta_sq.to_string() == "1/64" && d.delta_computed == 0.125,
                format!("{tag}: gram {:?} δ^2 {}", g.entries, d.delta_sq),
            ));
        }
    }
    Ok(out)
}

fn rng_for(ctx: Ctx, p: u64, n: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed ^ (p << 40) ^ n)
}

/// Random irrational integral element; a third of the draws have trace zero.
fn random_alpha(nf: &NumberField, rng: &mut ChaCha8Rng) -> Element {
    let p = nf.degree();
    loop {
        let mut coords: Vec<i64> = (0..p).map(|_| rng.gen_range(-9..=9)).collect();
        if rng.gen_bool(1.0 / 3.0) {
            if nf.spec.ramified {
                coords[0] = 0;
            } else {
                coords[0] = -coords[1..].iter().sum::<i64>();
            }
        }
        let e = Element::new(&nf.spec, coords).expect("length p");
        if !e.is_rational(&nf.spec) {
            return e;
        }
    }
}

fn circulant(nf: &NumberField, ctx: Ctx) -> Result<Vec<Case>> {
    let (p, n) = (nf.p(), nf.n());
    let mut rng = rng_for(ctx, p, n);
    let mut out = Vec::new();
    for _ in 0..ctx.samples {
        let alpha = random_alpha(nf, &mut rng);
        let tag = format!("({p},{n}) α={:?}", alpha.coords);
        let o = orbit_sublattice(nf, &alpha)?;
        let c = circulant_det_check(nf, &alpha)?;
        let full = o.rank == p as usize;
        out.push(case("orbit rank vs trace", full == (o.trace != 0), format!("{tag}: rank {} Tr {}", o.rank, o.trace)));
        out.push(case(
            "circulant determinant vs trace",
            c.nonzero == (o.trace != 0),
            format!("{tag}: det {:e} tol {:e} bits {} Tr {}", c.det_numeric, c.tolerance, c.bits_used, o.trace),
        ));
        out.push(case(
            "circulant factors nonvanishing",
            c.factors_nonvanishing,
            format!("{tag}: moduli {:?} tol {:e}", c.factor_moduli, c.tolerance),
        ));
        out.push(case(
            "circulant determinant consistent",
            c.consistent,
            format!("{tag}: numeric {:e} expected {:e}", c.det_numeric, c.det_expected),
        ));
    }
    Ok(out)
}

fn orbit(nf: &NumberField, ctx: Ctx) -> Result<Vec<Case>> {
    let (p, n) = (nf.p(), nf.n());
    let mut rng = rng_for(ctx, p, n);
    let mut out = Vec::new();
    for _ in 0..ctx.samples.min(100) {
        let alpha = random_alpha(nf, &mut rng);
        let o = orbit_sublattice(nf, &alpha)?;
        out.push(case(
            "orbit Gram circulant",
            o.circulant && o.equal_norms,
            format!("({p},{n}) α={:?}: gram {:?}", alpha.coords, o.gram.entries),
        ));
    }
    for m in (1..=10).filter(|m| m % p != 0) {
        let big = modules::build_mm_ramified(&nf.spec, m)?;
        let small = modules::build_orbit_m(&nf.spec, m)?;
        let inside = small
            .rows()
            .iter()
            .map(|r| modules::membership(r, &big))
            .collect::<wrlat_core::Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        let ratio_ok = small.index() == big.index() * p;
        out.push(case(
            "orbit module inside M_m",
            inside && ratio_ok,
            format!("({p},{n}) m={m}: inside {inside}, indices {} and {}", small.index(), big.index()),
        ));
    }
    Ok(out)
}

fn ideal_index(nf: &NumberField) -> Result<Vec<Case>> {
    let (p, n) = (nf.p(), nf.n());
    let mut out = Vec::new();
    for m in 1..=30 {
        let b = mm(nf, m)?;
        let ideal = modules::ideal_test(nf, &b)?;
        let tag = format!("({p},{n}) m={m}");
        out.push(case(
            "M_m ideal iff m | n",
            ideal == (n % m == 0),
            format!("{tag}: ideal {ideal}, m | n {}", n % m == 0),
        ));
        if !nf.spec.ramified || m % p != 0 {
            out.push(case(
                "M_m index, unramified or p ∤ m",
                b.index() == m.into(),
                format!("{tag}: index {}", b.index()),
            ));
        } else {
            let mut c = case(
                "ramified M_m index, p | m",
                b.index() == (m / p).into(),
                format!("{tag}: index {}", b.index()),
            );
            c.flag = Some(format!("{tag}: computed index {}, stated {m}", b.index()));
            out.push(c);
        }
        if nf.spec.ramified && m % p != 0 && m <= 10 {
            let o = modules::build_orbit_m(&nf.spec, m)?;
            let mut c = case("orbit module index", o.index() == (p * m).into(), format!("{tag}: index {}", o.index()));
            c.flag = Some(format!("{tag}: computed orbit index {}, stated {m}", o.index()));
            out.push(c);
        }
    }
    Ok(out)
}

/// Groups cases by check in first-appearance order.
fn summarize(suite: &str, cases: Vec<Case>) -> Vec<CheckSummary> {
    let mut out: Vec<CheckSummary> = Vec::new();
    for c in cases {
        let idx = match out.iter().position(|s| s.check == c.check) {
            Some(i) => i,
            None => {
                out.push(CheckSummary {
                    suite: suite.to_string(),
                    check: c.check.to_string(),
                    anchor: anchor(c.check).to_string(),
                    cases: 0,
                    failures: 0,
                    passed: true,
                    first_failure: None,
                    flagged: Vec::new(),
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.cases += 1;
        if !c.ok {
            s.failures += 1;
            s.passed = false;
            s.first_failure.get_or_insert(c.inputs);
        }
        if let Some(f) = c.flag {
            s.flagged.push(f);
        }
    }
    out
}

pub fn run_suite(suite: Suite, seed: u64, samples: usize, precision: Precision, jobs: usize) -> Result<Vec<CheckSummary>> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let ctx = Ctx {
        seed,
        samples,
        precision,
    };
    let list = tasks(suite);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let results: Vec<(Suite, Vec<Case>)> = pool.install(|| {
        list.par_iter()
            .map(|&(s, p, n)| (s, run_task(s, p, n, ctx)))
            .collect()
    });
    let mut out = Vec::new();
    let mut i = 0;
    while i < results.len() {
        let s = results[i].0;
        let mut cases = Vec::new();
        while i < results.len() && results[i].0 == s {
            cases.extend(results[i].1.iter().cloned());
            i += 1;
        }
        out.extend(summarize(suite_name(s), cases));
    }
    Ok(out)
}

pub fn verify(args: &VerifyArgs, argv: &[String]) -> Result<Outcome> {
    let precision = args.precision.resolve();
    let checks = run_suite(args.suite, args.seed, args.samples, precision, args.jobs)?;
    let passed = checks.iter().all(|c| c.passed);
    let text = match args.output.format {
        Format::Json => sorted_json(&json!({
            "manifest": RunManifest::new(argv, None, None, precision),
            "suite": suite_name(args.suite),
            "seed": args.seed,
            "samples": args.samples,
            "passed": passed,
            "checks": checks,
        }))?,
        Format::Table | Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        if c.passed { "PASS" } else { "FAIL" }.to_string(),
                        c.suite.clone(),
                        c.check.clone(),
                        format!("{}/{}", c.cases - c.failures, c.cases),
                        c.flagged.len().to_string(),
                        c.anchor.clone(),
                    ]
                })
                .collect();
            let headers = ["status", "suite", "check", "passed", "flagged", "anchor"];
            if args.output.format == Format::Csv {
                crate::output::csv(&headers, &rows)
            } else {
                table(&headers, &rows)
            }
        }
    };
    let diagnostics = checks.iter().find(|c| !c.passed).map(|c| {
        format!(
            "first failure in {}/{}: {}",
            c.suite,
            c.check,
            c.first_failure.as_deref().unwrap_or("")
        )
    });
    Ok(Outcome {
        text,
        code: if passed { 0 } else { 1 },
        diagnostics,
    })
}

fn is_scaled_identity(g: &[Vec<i64>], k: i64) -> bool {
    g.iter()
        .enumerate()
        .all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == if i == j { k } else { 0 }))
}
