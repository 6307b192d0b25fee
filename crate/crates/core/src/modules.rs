//! The module families: explicit bases over the integral basis, exact Gram
//! matrices, membership and ideal tests, literal trace-square expansions and
//! the closed-form minima they lead to.

use crate::error::{Error, Result};
use crate::field::{Element, FieldSpec, TraceTable};
use crate::intmat;
use crate::number_field::NumberField;
use crate::periods::{self, det_f64};
use crate::real::{BigReal, Precision};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    #[serde(rename = "OK")]
    Ok,
    #[serde(rename = "Mm_unram")]
    MmUnram,
    #[serde(rename = "Mm_ram")]
    MmRam,
    #[serde(rename = "Mmc")]
    Mmc,
    #[serde(rename = "OrbitM")]
    OrbitM,
    #[serde(rename = "Bj")]
    Bj,
    #[serde(rename = "Bramified")]
    Bramified,
    #[serde(rename = "Custom")]
    Custom,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Ok => "OK",
            Family::MmUnram => "Mm_unram",
            Family::MmRam => "Mm_ram",
            Family::Mmc => "Mmc",
            Family::OrbitM => "OrbitM",
            Family::Bj => "Bj",
            Family::Bramified => "Bramified",
            Family::Custom => "Custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ModuleParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    /// Ramified `M_m` only: whether `p | m` (the basis then starts with `(m/p)·1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_divides_m: Option<bool>,
}

pub(crate) fn serialize_matrix<S: Serializer>(rows: &[Vec<i64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect();
    strings.serialize(s)
}

/// A rank-`p` submodule of `O_K`, as integer rows over the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleBasis {
    pub field: FieldSpec,
    pub family: Family,
    pub params: ModuleParams,
    #[serde(serialize_with = "serialize_matrix")]
    pub coords: Vec<Vec<i64>>,
}

impl ModuleBasis {
    fn new(field: &FieldSpec, family: Family, params: ModuleParams, coords: Vec<Vec<i64>>) -> Result<Self> {
        let basis = ModuleBasis {
            field: field.clone(),
            family,
            params,
            coords,
        };
        if basis.index().is_zero() {
            return Err(Error::BadParams(format!("{family} basis is singular")));
        }
        Ok(basis)
    }

    /// A user-supplied basis; must be square of size `p` and nonsingular.
    pub fn custom(field: &FieldSpec, coords: Vec<Vec<i64>>) -> Result<Self> {
        let p = field.degree();
        if coords.len() != p || coords.iter().any(|r| r.len() != p) {
            return Err(Error::BadParams(format!("custom basis must be {p}x{p}")));
        }
        ModuleBasis::new(field, Family::Custom, ModuleParams::default(), coords)
    }

    pub fn m(&self) -> Option<u64> {
        self.params.m
    }

    pub fn row(&self, i: usize) -> Element {
        Element::new(&self.field, self.coords[i].clone()).expect("rows have length p")
    }

    pub fn rows(&self) -> Vec<Element> {
        (0..self.coords.len()).map(|i| self.row(i)).collect()
    }

    /// `[O_K : M] = |det(coords)|`.
    pub fn index(&self) -> BigInt {
        intmat::det_i64(&self.coords).abs()
    }

    /// Canonical form of the row span.
    pub fn hnf(&self) -> Vec<Vec<BigInt>> {
        intmat::hnf(&self.coords)
    }

    pub fn same_span(&self, other: &ModuleBasis) -> bool {
        self.field == other.field && self.hnf() == other.hnf()
    }

    /// Nontrivial invariant factors of `O_K / M`.
    pub fn quotient_structure(&self) -> Vec<BigInt> {
        intmat::smith_invariants(&self.coords)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }

    /// The index claimed for this family by the general index statements:
    /// `m` for every `M_m`-type family and for the orbit module.
    pub fn claimed_index(&self) -> Option<u64> {
        match self.family {
            Family::Ok => Some(1),
            Family::MmUnram | Family::MmRam | Family::Mmc | Family::OrbitM | Family::Bj => self.params.m,
            Family::Bramified => Some(self.field.p),
            Family::Custom => None,
        }
    }

    /// Row-major CSV of the coordinates.
    pub fn to_csv(&self) -> String {
        matrix_csv(&self.coords)
    }
}

pub(crate) fn matrix_csv(rows: &[Vec<i64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn unit(p: usize, k: usize, scale: i64) -> Vec<i64> {
    let mut v = vec![0; p];
    v[k] = scale;
    v
}

fn check_m(m: u64, min: u64) -> Result<i64> {
    if m < min {
        return Err(Error::BadParams(format!("m must be at least {min}, got {m}")));
    }
    i64::try_from(m).map_err(|_| Error::Overflow("m"))
}

pub fn build_ok(field: &FieldSpec) -> ModuleBasis {
    let p = field.degree();
    let coords = (0..p).map(|k| unit(p, k, 1)).collect();
    ModuleBasis::new(field, Family::Ok, ModuleParams::default(), coords).expect("identity")
}

/// `M_m = {α : Tr(α) ≡ 0 mod m}` in the unramified case, with basis
/// `m·t, θ^i(t) - t`.
pub fn build_mm_unramified(field: &FieldSpec, m: u64) -> Result<ModuleBasis> {
    field.require_unramified()?;
    let mi = check_m(m, 1)?;
    let p = field.degree();
    let mut coords = vec![unit(p, 0, mi)];
    for i in 1..p {
        let mut r = unit(p, i, 1);
        r[0] = -1;
        coords.push(r);
    }
    let params = ModuleParams {
        m: Some(m),
        ..Default::default()
    };
    ModuleBasis::new(field, Family::MmUnram, params, coords)
}

/// `M_{m,c} = {a_0 + Σ a_i θ^i(t) : a_0 + c Σ a_i ≡ 0 mod m}`, basis
/// `m, c - θ^i(t)`.
pub fn build_mmc(field: &FieldSpec, m: u64, c: u64) -> Result<ModuleBasis> {
    field.require_ramified()?;
    let mi = check_m(m, 1)?;
    if c >= m {
        return Err(Error::BadParams(format!("c = {c} must be below m = {m}")));
    }
    let p = field.degree();
    let mut coords = vec![unit(p, 0, mi)];
    for i in 1..p {
        let mut r = unit(p, i, -1);
        r[0] = c as i64;
        coords.push(r);
    }
    let params = ModuleParams {
        m: Some(m),
        c: Some(c),
        ..Default::default()
    };
    ModuleBasis::new(field, Family::Mmc, params, coords)
}

/// Ramified `M_m = {α : Tr(α) ≡ 0 mod m}`.
pub fn build_mm_ramified(field: &FieldSpec, m: u64) -> Result<ModuleBasis> {
    field.require_ramified()?;
    let mi = check_m(m, 1)?;
    let p = field.degree();
    let pdiv = m.is_multiple_of(field.p);
    let first = if pdiv { mi / field.p as i64 } else { mi };
    let mut coords = vec![unit(p, 0, first)];
    for i in 1..p {
        let mut r = unit(p, i, -1);
        r[0] = mi;
        coords.push(r);
    }
    let params = ModuleParams {
        m: Some(m),
        p_divides_m: Some(pdiv),
        ..Default::default()
    };
    ModuleBasis::new(field, Family::MmRam, params, coords)
}

/// The orbit module spanned by `m - θ^i(t)`, `i = 0..p-1`, with
/// `t = -Σ_{i≥1} θ^i(t)`.
pub fn build_orbit_m(field: &FieldSpec, m: u64) -> Result<ModuleBasis> {
    field.require_ramified()?;
    let mi = check_m(m, 1)?;
    if m.is_multiple_of(field.p) {
        return Err(Error::BadParams(format!("orbit module needs p ∤ m, got m = {m}")));
    }
    let p = field.degree();
    let mut first = vec![1; p];
    first[0] = mi;
    let mut coords = vec![first];
    for i in 1..p {
        let mut r = unit(p, i, -1);
        r[0] = mi;
        coords.push(r);
    }
    let params = ModuleParams {
        m: Some(m),
        ..Default::default()
    };
    ModuleBasis::new(field, Family::OrbitM, params, coords)
}

/// `B_j = p_j Z t + Σ Z (θ^i(t) - t)`, the prime above `p_j`.
pub fn build_bj_unramified(field: &FieldSpec, j: usize) -> Result<ModuleBasis> {
    field.require_unramified()?;
    if j == 0 || j > field.s {
        return Err(Error::BadIndex { j, s: field.s });
    }
    let pj = field.primes[j - 1];
    let mut b = build_mm_unramified(field, pj)?;
    b.family = Family::Bj;
    b.params.j = Some(j);
    Ok(b)
}

/// The prime above `p` in the ramified case, as `M_{p,ℓ}`.
pub fn build_b_ramified(nf: &NumberField) -> Result<ModuleBasis> {
    let ell = find_ell(nf)?;
    let mut b = build_mmc(&nf.spec, nf.p(), ell)?;
    b.family = Family::Bramified;
    Ok(b)
}

/// Exact membership: is `x` an integer combination of the rows?
pub fn membership(x: &Element, basis: &ModuleBasis) -> Result<bool> {
    if x.field != basis.field.key() {
        return Err(Error::FieldMismatch(
            x.field.p,
            x.field.n,
            basis.field.p,
            basis.field.n,
        ));
    }
    Ok(intmat::in_hnf_span(&basis.hnf(), &x.coords))
}

/// The defining congruence of a family, where it has one.
pub fn family_predicate(traces: &TraceTable, basis: &ModuleBasis, x: &Element) -> Result<Option<bool>> {
    let m = basis.params.m.map(|m| m as i128);
    Ok(match basis.family {
        Family::Ok => Some(true),
        Family::MmUnram | Family::Bj | Family::MmRam => {
            let m = m.expect("M_m carries m");
            Some(traces.trace_linear(x)?.rem_euclid(m) == 0)
        }
        Family::Mmc | Family::Bramified => {
            let (m, c) = match basis.family {
                Family::Mmc => (m.expect("m"), basis.params.c.expect("c") as i128),
                _ => (basis.field.p as i128, basis.params.c.expect("ℓ") as i128),
            };
            let s: i128 = x.coords[1..].iter().map(|&v| v as i128).sum();
            Some((x.coords[0] as i128 + c * s).rem_euclid(m) == 0)
        }
        Family::OrbitM | Family::Custom => None,
    })
}

/// Is the module closed under multiplication by `O_K`?
///
/// For the trace-defined `M_m` families, `b·e ∈ M_m` iff `Tr(b e) ≡ 0 mod m`,
/// which the trace form gives exactly. The congruence families and the orbit
/// module need the coordinates of `b·e`, obtained from the product engine.
pub fn ideal_test(nf: &NumberField, basis: &ModuleBasis) -> Result<bool> {
    let p = nf.degree();
    let basis_elems: Vec<Element> = (0..p).map(|k| Element::basis(&nf.spec, k)).collect();
    match basis.family {
        Family::Custom => Err(Error::UnsupportedFamily(basis.family.to_string())),
        Family::Ok => Ok(true),
        Family::MmUnram | Family::Bj | Family::MmRam => {
            let m = basis.params.m.expect("m") as i128;
            for b in basis.rows() {
                for e in &basis_elems {
                    if nf.trace_form(&b, e)?.rem_euclid(m) != 0 {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Family::Mmc | Family::Bramified | Family::OrbitM => {
            let hnf = basis.hnf();
            for b in basis.rows() {
                for e in &basis_elems {
                    let prod = nf.multiply(&b, e)?;
                    let inside = match family_predicate(&nf.traces, basis, &prod)? {
                        Some(v) => v,
                        None => intmat::in_hnf_span(&hnf, &prod.coords),
                    };
                    if !inside {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// The unique `ℓ ∈ [0, p)` for which `M_{p,ℓ}` is an ideal.
pub fn find_ell(nf: &NumberField) -> Result<u64> {
    nf.spec.require_ramified()?;
    let mut hits = Vec::new();
    for c in 0..nf.p() {
        if ideal_test(nf, &build_mmc(&nf.spec, nf.p(), c)?)? {
            hits.push(c);
        }
    }
    match hits.as_slice() {
        [ell] => Ok(*ell),
        [] => Err(Error::NotFound(format!(
            "no M_(p,c) is an ideal for ({}, {})",
            nf.p(),
            nf.n()
        ))),
        _ => Err(Error::VerificationFailed(format!(
            "several M_(p,c) are ideals: {hits:?}"
        ))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaGenerator {
    pub element: Element,
    pub conjugates: Vec<f64>,
    pub rounding_residual: f64,
    pub norm: f64,
    pub ell: u64,
}

/// `λ = Π_{h ∈ H} (1 - ζ_n^h)` for `n = p²`, located in the integral basis
/// and checked against `M_{p,ℓ}` and `|N(λ)| = p`.
pub fn lambda_generator(nf: &NumberField) -> Result<LambdaGenerator> {
    nf.spec.require_ramified()?;
    if nf.spec.s != 0 {
        return Err(Error::NotApplicable("λ is only built for n = p^2".into()));
    }
    let conj = if nf.precision.is_double() {
        periods::norm_one_minus_zeta::<f64>(nf.choice(), Precision::DOUBLE)?
    } else {
        periods::norm_one_minus_zeta::<BigReal>(nf.choice(), nf.precision)?
    };
    // conj_j = Σ_k x_k E[k][j]: solve E^T x = conj
    let p = nf.degree();
    let et: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|k| nf.embedding.entries[k][j]).collect())
        .collect();
    let x = solve_f64(et, conj.clone())
        .ok_or_else(|| Error::PrecisionLoss("embedding matrix is numerically singular".into()))?;
    let residual = x.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max);
    if residual >= periods::TRACE_ROUNDING_TOL {
        return Err(Error::PrecisionLoss(format!(
            "λ coordinates are {residual:e} away from integers"
        )));
    }
    let element = nf.element(x.iter().map(|v| v.round() as i64).collect())?;
    let ell = find_ell(nf)?;
    let b = build_mmc(&nf.spec, nf.p(), ell)?;
    if !membership(&element, &b)? {
        return Err(Error::VerificationFailed(format!("λ is not in M_(p,{ell})")));
    }
    let norm: f64 = conj.iter().product();
    if (norm.abs() - nf.p() as f64).abs() >= periods::TRACE_ROUNDING_TOL * nf.p() as f64 {
        return Err(Error::VerificationFailed(format!("|N(λ)| = {norm}, expected p")));
    }
    Ok(LambdaGenerator {
        element,
        conjugates: conj,
        rounding_residual: residual,
        norm,
        ell,
    })
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-300 {
            return None;
        }
        a.swap(piv, k);
        b.swap(piv, k);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Exact Gram matrix of a basis under the trace form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramMatrix {
    #[serde(serialize_with = "serialize_matrix")]
    pub entries: Vec<Vec<i64>>,
    pub family: Family,
    pub params: ModuleParams,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn det(&self) -> BigInt {
        intmat::det_i64(&self.entries)
    }

    /// `vᵀ G v`.
    pub fn norm(&self, v: &[i64]) -> i128 {
        quadratic_form(&self.entries, v)
    }

    pub fn to_csv(&self) -> String {
        matrix_csv(&self.entries)
    }

    /// Wraps a bare symmetric matrix, e.g. for enumeration tests.
    pub fn from_entries(entries: Vec<Vec<i64>>) -> Self {
        GramMatrix {
            entries,
            family: Family::Custom,
            params: ModuleParams::default(),
        }
    }
}

pub fn quadratic_form(g: &[Vec<i64>], v: &[i64]) -> i128 {
    let mut total = 0i128;
    for (i, row) in g.iter().enumerate() {
        let mut acc = 0i128;
        for (j, &gij) in row.iter().enumerate() {
            acc += gij as i128 * v[j] as i128;
        }
        total += v[i] as i128 * acc;
    }
    total
}

/// Pairwise traces of a set of elements.
pub fn trace_gram(traces: &TraceTable, rows: &[Element]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    traces
                        .trace_bilinear(a, b)?
                        .to_i64()
                        .ok_or(Error::Overflow("Gram entry"))
                })
                .collect()
        })
        .collect()
}

/// Gram matrix of a module basis; checks `det G = det(coords)^2 · n^(p-1)`.
pub fn gram(traces: &TraceTable, basis: &ModuleBasis) -> Result<GramMatrix> {
    let entries = trace_gram(traces, &basis.rows())?;
    let g = GramMatrix {
        entries,
        family: basis.family,
        params: basis.params.clone(),
    };
    let idx = basis.index();
    let want = &idx * &idx * basis.field.discriminant();
    let got = g.det();
    if got != want {
        return Err(Error::VerificationFailed(format!(
            "det Gram = {got}, expected {want}"
        )));
    }
    Ok(g)
}

fn sums(a: &[i64]) -> (i128, i128, i128) {
    let a0 = a[0] as i128;
    let s: i128 = a[1..].iter().map(|&v| v as i128).sum();
    let sq: i128 = a[1..].iter().map(|&v| (v as i128) * (v as i128)).sum();
    (a0, s, sq)
}

fn check_len(field: &FieldSpec, a: &[i64]) -> Result<()> {
    if a.len() != field.degree() {
        return Err(Error::BadParams(format!(
            "coefficient vector has length {}, expected {}",
            a.len(),
            field.p
        )));
    }
    Ok(())
}

/// `Q_1(a) = p Σ a_i^2 - (Σ a_i)^2` over `i ≥ 1`; nonnegative, zero only on
/// constant vectors.
pub fn q_spread(a_tail: &[i64], p: u64) -> i128 {
    let s: i128 = a_tail.iter().map(|&v| v as i128).sum();
    let sq: i128 = a_tail.iter().map(|&v| (v as i128) * (v as i128)).sum();
    p as i128 * sq - s * s
}

/// `Tr(α²)` for `α = a_0 m + Σ a_i (c - θ^i(t))` in `M_{m,c}`:
/// `p[(a_0 m + c Σ a_i)^2 + u(p Σ a_i^2 - (Σ a_i)^2)]`.
pub fn trace_sq_mmc(field: &FieldSpec, m: u64, c: u64, a: &[i64]) -> Result<i128> {
    field.require_ramified()?;
    check_len(field, a)?;
    let (p, u) = (field.p as i128, field.u_value() as i128);
    let (a0, s, sq) = sums(a);
    let lead = a0 * m as i128 + c as i128 * s;
    Ok(p * (lead * lead + u * (p * sq - s * s)))
}

/// `p | m`: `Tr(α²) = p[(a_0 m/p + m Σ a_i)^2 + u(p Σ a_i^2 - (Σ a_i)^2)]`
/// for `α = a_0 (m/p) + Σ a_i (m - θ^i(t))`.
pub fn trace_sq_mm_pdiv(field: &FieldSpec, m: u64, a: &[i64]) -> Result<i128> {
    field.require_ramified()?;
    check_len(field, a)?;
    if !m.is_multiple_of(field.p) {
        return Err(Error::NotApplicable(format!("p ∤ m = {m}")));
    }
    let (p, u) = (field.p as i128, field.u_value() as i128);
    let (a0, s, sq) = sums(a);
    let m = m as i128;
    let lead = a0 * (m / p) + m * s;
    Ok(p * (lead * lead + u * (p * sq - s * s)))
}

/// `p ∤ m`: `Tr(α²) = p[m^2 (a_0 + Σ a_i)^2 + u(p Σ a_i^2 - (Σ a_i)^2)]`.
pub fn trace_sq_mm_pcoprime(field: &FieldSpec, m: u64, a: &[i64]) -> Result<i128> {
    field.require_ramified()?;
    check_len(field, a)?;
    if m.is_multiple_of(field.p) {
        return Err(Error::NotApplicable(format!("p | m = {m}")));
    }
    let (p, u) = (field.p as i128, field.u_value() as i128);
    let (a0, s, sq) = sums(a);
    let m = m as i128;
    let lead = a0 + s;
    Ok(p * (m * m * lead * lead + u * (p * sq - s * s)))
}

/// Orbit module: `Tr(α²) = p(u p Σ a_i^2 + (m^2 - u)(Σ a_i)^2)`, sums over all
/// `i = 0..p-1`; equivalently `p(u Q_1 + m^2 Q_2)` with `Q_2 = (Σ a_i)^2`.
pub fn trace_sq_orbit(field: &FieldSpec, m: u64, a: &[i64]) -> Result<i128> {
    field.require_ramified()?;
    check_len(field, a)?;
    let (p, u) = (field.p as i128, field.u_value() as i128);
    let s: i128 = a.iter().map(|&v| v as i128).sum();
    let sq: i128 = a.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let m = m as i128;
    Ok(p * (u * p * sq + (m * m - u) * s * s))
}

/// The closed-form minimum stated for the family.
pub fn closed_form_minimum(basis: &ModuleBasis) -> Result<i128> {
    let f = &basis.field;
    let unsupported = || Error::UnsupportedFamily(basis.family.to_string());
    match basis.family {
        Family::MmRam => {
            let (p, u) = (f.p as i128, f.u_value() as i128);
            let m = basis.params.m.ok_or_else(unsupported)? as i128;
            let cap = u * p * (p - 1);
            if m % p == 0 {
                Ok((m * m / p).min(cap))
            } else {
                Ok((p * m * m).min(cap))
            }
        }
        Family::OrbitM => {
            let (p, u) = (f.p as i128, f.u_value() as i128);
            let m = basis.params.m.ok_or_else(unsupported)? as i128;
            Ok(p * (u * (p - 1) + m * m))
        }
        _ => Err(unsupported()),
    }
}

/// `n/(p+1) ≤ m^2 ≤ n(p+1)`, for `m ≡ 1 mod p`.
pub fn wr_window_unramified(field: &FieldSpec, m: u64) -> Result<bool> {
    field.require_unramified()?;
    if m % field.p != 1 {
        return Err(Error::NotApplicable(format!(
            "window is stated for m ≡ 1 mod {}, got m = {m}",
            field.p
        )));
    }
    let (n, p, m2) = (field.n as u128, field.p as u128, (m as u128) * (m as u128));
    Ok(n <= m2 * (p + 1) && m2 <= n * (p + 1))
}

/// `|det|` of the numeric embedding of a basis, for cross-checks.
pub fn embedded_volume(nf: &NumberField, basis: &ModuleBasis) -> f64 {
    let rows: Vec<Vec<f64>> = basis.rows().iter().map(|e| nf.conjugates(e)).collect();
    det_f64(rows).abs()
}
