use crate::args::{FamilyArg, FieldArgs, FieldInfoArgs, Format, LatticeArgs, ScanArgs};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{csv, key_values, opt, sorted_json, table};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use wrlat_core::density::{center_density, DensityReport};
use wrlat_core::modules::{self, Family, GramMatrix, ModuleBasis};
use wrlat_core::periods::gaussian_periods;
use wrlat_core::svp::{enumerate_minimum, ShortVectorReport};
use wrlat_core::NumberField;

/// Rendered output plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
    pub diagnostics: Option<String>,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Outcome {
            text,
            code: 0,
            diagnostics: None,
        }
    }
}

pub fn open_field(f: &FieldArgs) -> Result<NumberField> {
    Ok(NumberField::with_options(f.p, f.n, f.choice, f.precision.resolve())?)
}

fn manifest(argv: &[String], nf: &NumberField) -> RunManifest {
    RunManifest::new(argv, Some(nf.spec.key()), Some(nf.choice_index), nf.precision)
}

pub fn field_info(args: &FieldInfoArgs, argv: &[String]) -> Result<Outcome> {
    let nf = open_field(&args.field)?;
    let periods = gaussian_periods(nf.choice(), nf.precision)?;
    let choices: Vec<_> = nf
        .choices
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "index": i,
                "moduli": c.moduli,
                "generators": c.generators,
                "exponent_vector": c.exponent_vector,
                "coset_rep": c.coset_rep,
                "kernel_size": c.kernel.len(),
                "kernel": c.kernel,
            })
        })
        .collect();
    let text = match args.output.format {
        Format::Json => sorted_json(&json!({
            "manifest": manifest(argv, &nf),
            "field": nf.spec,
            "degree": nf.degree(),
            "discriminant": nf.spec.discriminant().to_string(),
            "trace_table": nf.traces,
            "basis_gram": nf.basis_gram(),
            "character_choices": { "count": nf.choices.len(), "selected": nf.choice_index, "choices": choices },
            "periods": periods,
            "embedding": nf.embedding.entries,
        }))?,
        Format::Csv => nf.embedding.to_csv(),
        Format::Table => {
            let t = &nf.traces;
            let prov = |e: &wrlat_core::field::TraceEntry| format!("{} ({:?})", e.value, e.provenance);
            key_values(&[
                ("p", nf.p().to_string()),
                ("n", nf.n().to_string()),
                ("ramified", nf.spec.ramified.to_string()),
                ("primes", format!("{:?}", nf.spec.primes)),
                ("u", opt(&nf.spec.u)),
                ("discriminant", nf.spec.discriminant().to_string()),
                ("Tr(1)", prov(&t.tr_one)),
                ("Tr(theta^i(t))", prov(&t.tr_theta)),
                ("Tr(theta^i(t)^2)", prov(&t.tr_pair_diag)),
                ("Tr(theta^i(t) theta^j(t))", prov(&t.tr_pair_off)),
                ("character choices", nf.choices.len().to_string()),
                ("selected choice", nf.choice_index.to_string()),
                ("coset representative", nf.choice().coset_rep.to_string()),
            ])
        }
    };
    Ok(Outcome::ok(text))
}

fn need(v: Option<u64>, flag: &str, family: FamilyArg) -> Result<u64> {
    v.ok_or_else(|| CliError::Usage(format!("family {family:?} needs {flag}")))
}

/// Maps a family flag onto the builder for the field's case.
pub fn build_basis(nf: &NumberField, family: FamilyArg, m: Option<u64>, c: Option<u64>, j: Option<usize>) -> Result<ModuleBasis> {
    let spec = &nf.spec;
    let b = match family {
        FamilyArg::Ok => modules::build_ok(spec),
        FamilyArg::Mm if spec.ramified => modules::build_mm_ramified(spec, need(m, "-m", family)?)?,
        FamilyArg::Mm => modules::build_mm_unramified(spec, need(m, "-m", family)?)?,
        FamilyArg::Mmc => modules::build_mmc(spec, need(m, "-m", family)?, c.unwrap_or(0))?,
        FamilyArg::Orbit => modules::build_orbit_m(spec, need(m, "-m", family)?)?,
        FamilyArg::Bj => modules::build_bj_unramified(spec, j.unwrap_or(1))?,
        FamilyArg::Bram => modules::build_b_ramified(nf)?,
    };
    Ok(b)
}

/// Everything computed for one module.
pub struct Analysis {
    pub basis: ModuleBasis,
    pub gram: GramMatrix,
    pub report: ShortVectorReport,
    pub closed_form: Option<i128>,
    pub density: DensityReport,
    pub window: Option<bool>,
}

impl Analysis {
    pub fn index_discrepancy(&self) -> Option<bool> {
        let claimed = self.basis.claimed_index()?;
        Some(self.basis.index() != claimed.into())
    }
}

pub fn analyze(nf: &NumberField, basis: ModuleBasis) -> Result<Analysis> {
    let gram = modules::gram(&nf.traces, &basis)?;
    let report = enumerate_minimum(&gram)?;
    let closed_form = modules::closed_form_minimum(&basis).ok();
    let density = center_density(&basis, &gram, report.minimum);
    let window = match (basis.family, basis.m()) {
        (Family::MmUnram, Some(m)) => modules::wr_window_unramified(&nf.spec, m).ok(),
        _ => None,
    };
    Ok(Analysis {
        basis,
        gram,
        report,
        closed_form,
        density,
        window,
    })
}

pub fn lattice(args: &LatticeArgs, argv: &[String]) -> Result<Outcome> {
    let nf = open_field(&args.field)?;
    let basis = build_basis(&nf, args.family, args.m, args.c, args.j)?;
    let a = analyze(&nf, basis)?;
    let ideal = modules::ideal_test(&nf, &a.basis).ok();
    let ideal_expected = match a.basis.family {
        Family::MmUnram | Family::MmRam => a.basis.m().map(|m| nf.n() % m == 0),
        _ => None,
    };
    let text = match args.output.format {
        Format::Json => {
            let strings = |rows: &[Vec<i64>]| -> Vec<Vec<String>> {
                rows.iter().map(|r| r.iter().map(i64::to_string).collect()).collect()
            };
            sorted_json(&json!({
                "manifest": manifest(argv, &nf),
                "family": a.basis.family,
                "params": a.basis.params,
                "basis": strings(&a.basis.coords),
                "gram": strings(&a.gram.entries),
                "gram_det": a.gram.det().to_string(),
                "minimum": {
                    "enumerated": a.report.minimum.to_string(),
                    "closed_form": a.closed_form.map(|v| v.to_string()),
                    "agree": a.closed_form.map(|v| v == a.report.minimum),
                },
                "short_vectors": a.report,
                "well_rounded": a.report.well_rounded,
                "index": {
                    "computed": a.basis.index().to_string(),
                    "claimed": a.basis.claimed_index(),
                    "discrepancy": a.index_discrepancy(),
                },
                "quotient_invariants": a.basis.quotient_structure().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "ideal": { "computed": ideal, "expected_m_divides_n": ideal_expected },
                "density": a.density,
                "wr_window": a.window,
            }))?
        }
        Format::Csv => a.gram.to_csv(),
        Format::Table => {
            let rows = |m: &[Vec<i64>]| {
                m.iter()
                    .map(|r| r.iter().map(|v| format!("{v:>6}")).collect::<String>())
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            let mut s = key_values(&[
                ("family", a.basis.family.to_string()),
                ("m", opt(&a.basis.params.m)),
                ("c", opt(&a.basis.params.c)),
                ("index", a.basis.index().to_string()),
                ("claimed index", opt(&a.basis.claimed_index())),
                ("enumerated minimum", a.report.minimum.to_string()),
                ("closed-form minimum", opt(&a.closed_form)),
                ("minimal pairs", a.report.count_pairs.to_string()),
                ("well rounded", a.report.well_rounded.to_string()),
                ("ideal", opt(&ideal)),
                ("delta", format!("{:.12e}", a.density.delta_computed)),
                ("delta (specialized)", opt(&a.density.delta_specialized.map(|d| format!("{d:.12e}")))),
                ("density flag", a.density.discrepancy_flag.to_string()),
                ("window", opt(&a.window)),
            ]);
            s += "\nbasis\n";
            s += &rows(&a.basis.coords);
            s += "\n\ngram\n";
            s += &rows(&a.gram.entries);
            s.push('\n');
            s
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub m: u64,
    pub c: Option<u64>,
    pub index: Option<String>,
    pub claimed_index: Option<u64>,
    pub index_discrepancy: Option<bool>,
    pub closed_form_min: Option<String>,
    pub enum_min: Option<String>,
    pub agree: Option<bool>,
    pub well_rounded: Option<bool>,
    pub delta_computed: Option<f64>,
    pub delta_specialized: Option<f64>,
    pub density_flag: Option<bool>,
    pub window: Option<bool>,
    pub error: Option<String>,
}

const SCAN_HEADERS: [&str; 14] = [
    "m",
    "c",
    "index",
    "claimed_index",
    "index_discrepancy",
    "closed_form_min",
    "enum_min",
    "agree",
    "well_rounded",
    "delta_computed",
    "delta_specialized",
    "density_flag",
    "window",
    "error",
];

impl ScanRow {
    fn failed(m: u64, c: Option<u64>, e: CliError) -> Self {
        ScanRow {
            m,
            c,
            index: None,
            claimed_index: None,
            index_discrepancy: None,
            closed_form_min: None,
            enum_min: None,
            agree: None,
            well_rounded: None,
            delta_computed: None,
            delta_specialized: None,
            density_flag: None,
            window: None,
            error: Some(e.to_string()),
        }
    }

    fn cells(&self) -> Vec<String> {
        let f = |v: &Option<f64>| v.map(|d| format!("{d:.12e}")).unwrap_or_else(|| "-".into());
        vec![
            self.m.to_string(),
            opt(&self.c),
            opt(&self.index),
            opt(&self.claimed_index),
            opt(&self.index_discrepancy),
            opt(&self.closed_form_min),
            opt(&self.enum_min),
            opt(&self.agree),
            opt(&self.well_rounded),
            f(&self.delta_computed),
            f(&self.delta_specialized),
            opt(&self.density_flag),
            opt(&self.window),
            opt(&self.error),
        ]
    }
}

pub fn scan_row(nf: &NumberField, family: FamilyArg, m: u64, c: Option<u64>) -> ScanRow {
    let run = || -> Result<ScanRow> {
        let a = analyze(nf, build_basis(nf, family, Some(m), c, None)?)?;
        Ok(ScanRow {
            m,
            c,
            index: Some(a.basis.index().to_string()),
            claimed_index: a.basis.claimed_index(),
            index_discrepancy: a.index_discrepancy(),
            closed_form_min: a.closed_form.map(|v| v.to_string()),
            enum_min: Some(a.report.minimum.to_string()),
            agree: a.closed_form.map(|v| v == a.report.minimum),
            well_rounded: Some(a.report.well_rounded),
            delta_computed: Some(a.density.delta_computed),
            delta_specialized: a.density.delta_specialized,
            density_flag: Some(a.density.discrepancy_flag),
            window: a.window,
            error: None,
        })
    };
    run().unwrap_or_else(|e| ScanRow::failed(m, c, e))
}

/// Parameter tuples in output order. The orbit module is only defined for
/// `p ∤ m`, so multiples of `p` are not part of its sweep.
pub fn scan_params(nf: &NumberField, args: &ScanArgs) -> Result<Vec<(u64, Option<u64>)>> {
    let p = nf.p();
    let ms = args.range.values();
    Ok(match args.family {
        FamilyArg::Mm => ms.map(|m| (m, None)).collect(),
        FamilyArg::Mmc => ms.flat_map(|m| (0..m).map(move |c| (m, Some(c)))).collect(),
        FamilyArg::Orbit => ms.filter(|m| m % p != 0).map(|m| (m, None)).collect(),
        other => {
            return Err(CliError::Usage(format!(
                "scan needs a family indexed by m (mm, mmc, orbit), got {other:?}"
            )))
        }
    })
}

pub fn scan(args: &ScanArgs, argv: &[String]) -> Result<Outcome> {
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let nf = open_field(&args.field)?;
    let params = scan_params(&nf, args)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    let rows: Vec<ScanRow> = pool.install(|| {
        params
            .par_iter()
            .map(|&(m, c)| scan_row(&nf, args.family, m, c))
            .collect()
    });
    let any_error = rows.iter().any(|r| r.error.is_some());
    let rows: Vec<ScanRow> = rows
        .into_iter()
        .filter(|r| !args.only_wr || r.well_rounded == Some(true))
        .collect();
    let text = match args.output.format {
        Format::Json => sorted_json(&json!({
            "manifest": manifest(argv, &nf),
            "family": format!("{:?}", args.family).to_lowercase(),
            "range": [args.range.start, args.range.end],
            "only_wr": args.only_wr,
            "rows": rows,
        }))?,
        Format::Table => table(&SCAN_HEADERS, &rows.iter().map(ScanRow::cells).collect::<Vec<_>>()),
        Format::Csv => csv(&SCAN_HEADERS, &rows.iter().map(ScanRow::cells).collect::<Vec<_>>()),
    };
    Ok(Outcome {
        text,
        code: if any_error { 2 } else { 0 },
        diagnostics: any_error.then(|| "some rows failed; see the error column".to_string()),
    })
}
