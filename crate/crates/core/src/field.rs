//! Cyclic fields of odd prime degree, elements over the integral basis, and
//! exact trace data.
//!
//! Coordinates are always read over the integral basis of the field:
//!
//! * unramified (`n = p_1 ... p_s`): `{t, θ(t), ..., θ^{p-1}(t)}`;
//! * ramified (`n = p^2 p_1 ... p_s`): `{1, θ(t), ..., θ^{p-1}(t)}`.
//!
//! Here `t` is the Gaussian period `Tr_{Q(ζ_n)/K}(ζ_n)` and `θ` a generator of
//! the Galois group. Products of elements are never formed symbolically; the
//! trace form is expanded by bilinearity over a [`TraceTable`].

use crate::arith;
use crate::error::{ConductorRule, Error, Result};
use crate::intmat;
use crate::periods;
use crate::real::Precision;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

/// `(p, n)` pair used to tag elements and bases with their field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldKey {
    pub p: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u64,
    pub ramified: bool,
    /// The primes `p_i != p` dividing `n`, increasing.
    pub primes: Vec<u64>,
    /// `n / p^2`; only present in the ramified case.
    pub u: Option<u64>,
    pub s: usize,
}

impl FieldSpec {
    pub fn key(&self) -> FieldKey {
        FieldKey { p: self.p, n: self.n }
    }

    pub fn degree(&self) -> usize {
        self.p as usize
    }

    /// `(-1)^s`, the trace of every conjugate of `t` in the unramified case.
    pub fn sign(&self) -> i64 {
        if self.s.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `|D(K)| = n^(p-1)`.
    pub fn discriminant(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.n), (self.p - 1) as usize)
    }

    /// `u = n / p^2`; panics in the unramified case.
    pub fn u_value(&self) -> u64 {
        self.u.expect("u is only defined for ramified fields")
    }

    pub(crate) fn require_ramified(&self) -> Result<()> {
        if self.ramified {
            Ok(())
        } else {
            Err(Error::WrongCase {
                expected: "ramified",
            })
        }
    }

    pub(crate) fn require_unramified(&self) -> Result<()> {
        if self.ramified {
            Err(Error::WrongCase {
                expected: "unramified",
            })
        } else {
            Ok(())
        }
    }
}

/// Checks that `(p, n)` is the degree and conductor of a cyclic field of odd
/// prime degree and classifies it.
pub fn validate_field(p: u64, n: u64) -> Result<FieldSpec> {
    if p.is_multiple_of(2) {
        return Err(Error::EvenOrTwo(p));
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let bad = |rule| Error::BadConductor { p, n, rule };
    if n < 2 {
        return Err(bad(ConductorRule::Empty));
    }
    let factors = arith::factorize(n);
    let mut valuation = 0;
    let mut primes = Vec::new();
    for &(q, e) in &factors {
        if q == p {
            valuation = e;
            continue;
        }
        if q % p != 1 {
            return Err(bad(ConductorRule::FactorNotOneModP(q)));
        }
        if e > 1 {
            return Err(bad(ConductorRule::RepeatedFactor(q)));
        }
        primes.push(q);
    }
    let ramified = match valuation {
        0 => false,
        2 => true,
        v => return Err(bad(ConductorRule::PAdicValuation(v))),
    };
    if !ramified && primes.is_empty() {
        return Err(bad(ConductorRule::Empty));
    }
    Ok(FieldSpec {
        p,
        n,
        ramified,
        s: primes.len(),
        u: ramified.then(|| n / (p * p)),
        primes,
    })
}

/// An integral element written over the integral basis of its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Element {
    pub field: FieldKey,
    pub coords: Vec<i64>,
}

impl Element {
    pub fn new(field: &FieldSpec, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != field.degree() {
            return Err(Error::BadParams(format!(
                "expected {} coordinates, got {}",
                field.degree(),
                coords.len()
            )));
        }
        Ok(Element {
            field: field.key(),
            coords,
        })
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Element {
            field: field.key(),
            coords: vec![0; field.degree()],
        }
    }

    /// The `k`-th integral basis element.
    pub fn basis(field: &FieldSpec, k: usize) -> Self {
        let mut e = Self::zero(field);
        e.coords[k] = 1;
        e
    }

    /// The rational integer `k`. In the unramified case `1 = (-1)^s Σ θ^i(t)`.
    pub fn integer(field: &FieldSpec, k: i64) -> Self {
        let mut e = Self::zero(field);
        if field.ramified {
            e.coords[0] = k;
        } else {
            e.coords.iter_mut().for_each(|c| *c = field.sign() * k);
        }
        e
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::integer(field, 1)
    }

    /// `θ^i(t)`, reduced into the basis (for ramified fields `t = -Σ_{i≥1} θ^i(t)`).
    pub fn theta_t(field: &FieldSpec, i: usize) -> Self {
        let p = field.degree();
        let i = i % p;
        if field.ramified && i == 0 {
            let mut e = Self::zero(field);
            e.coords[1..].iter_mut().for_each(|c| *c = -1);
            e
        } else {
            Self::basis(field, i)
        }
    }

    pub fn t(field: &FieldSpec) -> Self {
        Self::theta_t(field, 0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.p,
                self.field.n,
                other.field.p,
                other.field.n,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Element, f: impl Fn(i64, i64) -> i64) -> Element {
        Element {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Element {
        Element {
            field: self.field,
            coords: self.coords.iter().map(|&c| c * k).collect(),
        }
    }

    /// Integer combination `Σ a_i · elems_i`.
    pub fn combination(field: &FieldSpec, coeffs: &[i64], elems: &[Element]) -> Element {
        let mut acc = vec![0i64; field.degree()];
        for (&a, e) in coeffs.iter().zip(elems) {
            for (slot, &c) in acc.iter_mut().zip(&e.coords) {
                *slot += a * c;
            }
        }
        Element {
            field: field.key(),
            coords: acc,
        }
    }

    /// The Galois generator θ acting on coordinates.
    ///
    /// θ sends `θ^i(t)` to `θ^{i+1}(t)`. In the ramified case the image of
    /// `θ^{p-1}(t)` is `t = -Σ_{i≥1} θ^i(t)`, which is folded back into the basis.
    pub fn theta(&self, ramified: bool) -> Element {
        let p = self.coords.len();
        let mut out = vec![0i64; p];
        if ramified {
            let wrap = self.coords[p - 1];
            out[0] = self.coords[0];
            for i in 1..p {
                let from_shift = if i >= 2 { self.coords[i - 1] } else { 0 };
                out[i] = from_shift - wrap;
            }
        } else {
            for i in 0..p {
                out[(i + 1) % p] = self.coords[i];
            }
        }
        Element {
            field: self.field,
            coords: out,
        }
    }

    /// `θ^k` applied `k` times.
    pub fn theta_pow(&self, ramified: bool, k: usize) -> Element {
        (0..k).fold(self.clone(), |acc, _| acc.theta(ramified))
    }

    /// True when the element is a rational integer.
    pub fn is_rational(&self, field: &FieldSpec) -> bool {
        if field.ramified {
            self.coords[1..].iter().all(|&c| c == 0)
        } else {
            self.coords.windows(2).all(|w| w[0] == w[1])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    DerivedNumeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub value: i64,
    pub provenance: Provenance,
}

impl TraceEntry {
    fn closed(value: i64) -> Self {
        TraceEntry {
            value,
            provenance: Provenance::ClosedForm,
        }
    }
}

/// Exact traces `Tr(1)`, `Tr(θ^i(t))` and `Tr(θ^i(t) θ^j(t))`; the pair
/// traces depend only on `i - j mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTable {
    pub field: FieldKey,
    pub ramified: bool,
    pub tr_one: TraceEntry,
    pub tr_theta: TraceEntry,
    pub tr_pair_diag: TraceEntry,
    pub tr_pair_off: TraceEntry,
}

impl TraceTable {
    /// Closed forms for the ramified case: `Tr(θ^i(t)) = 0`,
    /// `Tr(θ^i(t)^2) = n(p-1)/p`, `Tr(θ^i(t) θ^j(t)) = -n/p`.
    pub fn closed_form(field: &FieldSpec) -> Result<Self> {
        if !field.ramified {
            return Err(Error::MissingDerivedData {
                p: field.p,
                n: field.n,
            });
        }
        let (p, n) = (field.p as i64, field.n as i64);
        Ok(TraceTable {
            field: field.key(),
            ramified: true,
            tr_one: TraceEntry::closed(p),
            tr_theta: TraceEntry::closed(0),
            tr_pair_diag: TraceEntry::closed(n * (p - 1) / p),
            tr_pair_off: TraceEntry::closed(-n / p),
        })
    }

    /// Builds an unramified table from numerically derived pair traces and
    /// re-validates it: the integral-basis Gram must be positive definite with
    /// determinant `n^(p-1)`.
    pub fn from_derived(field: &FieldSpec, diag: i64, off: i64) -> Result<Self> {
        field.require_unramified()?;
        let table = TraceTable {
            field: field.key(),
            ramified: false,
            tr_one: TraceEntry::closed(field.p as i64),
            tr_theta: TraceEntry::closed(field.sign()),
            tr_pair_diag: TraceEntry {
                value: diag,
                provenance: Provenance::DerivedNumeric,
            },
            tr_pair_off: TraceEntry {
                value: off,
                provenance: Provenance::DerivedNumeric,
            },
        };
        let gram = table.basis_gram(field);
        if !intmat::is_positive_definite(&gram) {
            return Err(Error::VerificationFailed(format!(
                "derived pair traces ({diag}, {off}) for ({}, {}) are not positive definite",
                field.p, field.n
            )));
        }
        let det = intmat::det_i64(&gram);
        if det.abs() != field.discriminant() {
            return Err(Error::VerificationFailed(format!(
                "derived Gram determinant {det} differs from n^(p-1) for ({}, {})",
                field.p, field.n
            )));
        }
        Ok(table)
    }

    /// `Tr(θ^i(t) θ^j(t))`.
    pub fn pair(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.tr_pair_diag.value
        } else {
            self.tr_pair_off.value
        }
    }

    /// Trace of the `k`-th basis element.
    fn basis_trace(&self, k: usize) -> i64 {
        if self.ramified && k == 0 {
            self.tr_one.value
        } else {
            self.tr_theta.value
        }
    }

    /// `Tr(b_i b_j)` for integral basis elements `b_i`, `b_j`.
    pub fn basis_product_trace(&self, i: usize, j: usize) -> i64 {
        if self.ramified && (i == 0 || j == 0) {
            // 1 * b_j = b_j
            self.basis_trace(if i == 0 { j } else { i })
        } else {
            self.pair(i, j)
        }
    }

    /// Gram matrix of the integral basis under the trace form.
    pub fn basis_gram(&self, field: &FieldSpec) -> Vec<Vec<i64>> {
        let p = field.degree();
        (0..p)
            .map(|i| (0..p).map(|j| self.basis_product_trace(i, j)).collect())
            .collect()
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.field != self.field {
            return Err(Error::FieldMismatch(
                x.field.p,
                x.field.n,
                self.field.p,
                self.field.n,
            ));
        }
        Ok(())
    }

    /// `Tr(x)`.
    pub fn trace_linear(&self, x: &Element) -> Result<i128> {
        self.check(x)?;
        Ok(x
            .coords
            .iter()
            .enumerate()
            .map(|(k, &c)| c as i128 * self.basis_trace(k) as i128)
            .sum())
    }

    /// `Tr(xy)`, expanded by bilinearity; the product `xy` is never formed.
    pub fn trace_bilinear(&self, x: &Element, y: &Element) -> Result<i128> {
        self.check(x)?;
        self.check(y)?;
        let start = usize::from(self.ramified);
        let mut total: i128 = 0;
        if self.ramified {
            let (x0, y0) = (x.coords[0] as i128, y.coords[0] as i128);
            let sx: i128 = x.coords[1..].iter().map(|&c| c as i128).sum();
            let sy: i128 = y.coords[1..].iter().map(|&c| c as i128).sum();
            total += self.tr_one.value as i128 * x0 * y0;
            total += self.tr_theta.value as i128 * (x0 * sy + y0 * sx);
        }
        // Σ_{i,j} x_i y_j pair(i,j) = off·(Σx)(Σy) + (diag - off)·Σ x_i y_i
        let off = self.tr_pair_off.value as i128;
        let diag = self.tr_pair_diag.value as i128;
        let sx: i128 = x.coords[start..].iter().map(|&c| c as i128).sum();
        let sy: i128 = y.coords[start..].iter().map(|&c| c as i128).sum();
        let dot: i128 = x.coords[start..]
            .iter()
            .zip(&y.coords[start..])
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        total += off * sx * sy + (diag - off) * dot;
        Ok(total)
    }
}

/// Exact trace data for any admissible field. Unramified pair traces are
/// derived from Gaussian periods over every character choice of the
/// conductor and required to agree.
pub fn trace_table(field: &FieldSpec, precision: Precision) -> Result<TraceTable> {
    if field.ramified {
        return TraceTable::closed_form(field);
    }
    let choices = periods::enumerate_characters(field);
    let mut derived: Option<(i64, i64)> = None;
    for choice in &choices {
        let pair = periods::derive_unramified_pair_traces(choice, precision)?;
        match derived {
            None => derived = Some(pair),
            Some(prev) if prev != pair => {
                return Err(Error::InconsistentTraces(format!(
                    "character choices disagree: {prev:?} vs {pair:?}"
                )))
            }
            Some(_) => {}
        }
    }
    let (diag, off) = derived.ok_or(Error::MissingDerivedData {
        p: field.p,
        n: field.n,
    })?;
    TraceTable::from_derived(field, diag, off)
}
