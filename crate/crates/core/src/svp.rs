//! Shortest vectors of integer Gram matrices, well-roundedness, Galois orbit
//! sublattices and the circulant determinant check.

use crate::error::{Error, Result};
use crate::field::Element;
use crate::intmat;
use crate::modules::{self, quadratic_form, GramMatrix, ModuleBasis};
use crate::number_field::NumberField;
use crate::periods::{self, Complex};
use crate::real::{kahan_sum, BigReal, Precision, Real};
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

pub const MAX_DIMENSION: usize = 13;

/// Relative slack added to the pruning radius so that Cholesky rounding can
/// only cost work, never a lattice point.
const PRUNE_MARGIN: f64 = 1e-6;

fn as_string<S: Serializer>(v: &i128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShortVectorReport {
    #[serde(serialize_with = "as_string")]
    pub minimum: i128,
    pub count_pairs: usize,
    /// One vector per `±` pair, first nonzero entry positive, sorted.
    pub minimal_vectors: Vec<Vec<i64>>,
    pub span_rank: usize,
    pub well_rounded: bool,
    /// A maximal independent subset of the minimal vectors, chosen greedily
    /// in sorted order.
    pub witness: Vec<Vec<i64>>,
}

fn canonical(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// `G = L D Lᵀ` in the Fincke-Pohst form `Q(x) = Σ_i q_i (x_i + Σ_{j>i} μ_ij x_j)^2`.
fn cholesky(g: &[Vec<i64>]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = g.len();
    let mut a: Vec<Vec<f64>> = g
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let mut q = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        q[i] = a[i][i];
        if q[i] <= 0.0 {
            return None;
        }
        for j in i + 1..n {
            mu[i][j] = a[i][j] / q[i];
        }
        for k in i + 1..n {
            for l in k..n {
                a[k][l] -= mu[i][k] * mu[i][l] * q[i];
                a[l][k] = a[k][l];
            }
        }
    }
    Some((q, mu))
}

struct Search<'a> {
    g: &'a [Vec<i64>],
    q: Vec<f64>,
    mu: Vec<Vec<f64>>,
    x: Vec<i64>,
    best: i128,
    found: BTreeSet<Vec<i64>>,
}

impl Search<'_> {
    fn radius(&self) -> f64 {
        let b = self.best as f64;
        b + PRUNE_MARGIN * b.max(1.0)
    }

    fn visit(&mut self, k: usize, partial: f64) {
        let n = self.x.len();
        let c: f64 = -(k + 1..n).map(|j| self.mu[k][j] * self.x[j] as f64).sum::<f64>();
        let centre = c.round() as i64;
        // Schnorr-Euchner zig-zag: candidates in order of distance from c
        let (mut up, mut down) = (centre, centre - 1);
        let (mut up_open, mut down_open) = (true, true);
        while up_open || down_open {
            let pick_up = match (up_open, down_open) {
                (true, true) => (up as f64 - c).abs() <= (c - down as f64).abs(),
                (u, _) => u,
            };
            let xi = if pick_up { up } else { down };
            let d = xi as f64 - c;
            let cost = partial + self.q[k] * d * d;
            if cost > self.radius() {
                if pick_up {
                    up_open = false;
                } else {
                    down_open = false;
                }
                continue;
            }
            if pick_up {
                up += 1;
            } else {
                down -= 1;
            }
            self.x[k] = xi;
            if k == 0 {
                self.accept();
            } else {
                self.visit(k - 1, cost);
            }
        }
        self.x[k] = 0;
    }

    fn accept(&mut self) {
        if self.x.iter().all(|&v| v == 0) {
            return;
        }
        let norm = quadratic_form(self.g, &self.x);
        if norm < self.best {
            self.best = norm;
            self.found.clear();
        }
        if norm == self.best {
            self.found.insert(canonical(self.x.clone()));
        }
    }
}

fn check_gram(g: &[Vec<i64>]) -> Result<()> {
    let n = g.len();
    if n > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge(n));
    }
    if n == 0 || !intmat::is_positive_definite(g) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// Exact minimum and all minimal vectors, starting from the smallest diagonal
/// entry as the search radius.
pub fn enumerate_minimum(gram: &GramMatrix) -> Result<ShortVectorReport> {
    let bound = gram
        .entries
        .iter()
        .enumerate()
        .map(|(i, r)| r[i] as i128)
        .min()
        .unwrap_or(0);
    enumerate_with_bound(gram, bound)
}

/// As [`enumerate_minimum`] with an explicit initial radius; the radius must
/// be at least the true minimum (any diagonal entry qualifies).
pub fn enumerate_with_bound(gram: &GramMatrix, bound: i128) -> Result<ShortVectorReport> {
    let g = &gram.entries;
    check_gram(g)?;
    let n = g.len();
    let (q, mu) = cholesky(g).ok_or(Error::NotPositiveDefinite)?;
    let mut s = Search {
        g,
        q,
        mu,
        x: vec![0; n],
        best: bound,
        found: BTreeSet::new(),
    };
    s.visit(n - 1, 0.0);
    if s.found.is_empty() {
        return Err(Error::BadParams(format!(
            "initial bound {bound} is below the lattice minimum"
        )));
    }
    let minimal_vectors: Vec<Vec<i64>> = s.found.into_iter().collect();
    Ok(report_from(s.best, minimal_vectors, n))
}

fn report_from(minimum: i128, minimal_vectors: Vec<Vec<i64>>, n: usize) -> ShortVectorReport {
    let mut witness: Vec<Vec<i64>> = Vec::new();
    for v in &minimal_vectors {
        witness.push(v.clone());
        if intmat::rank(&witness) < witness.len() {
            witness.pop();
        }
        if witness.len() == n {
            break;
        }
    }
    let span_rank = witness.len();
    ShortVectorReport {
        minimum,
        count_pairs: minimal_vectors.len(),
        minimal_vectors,
        span_rank,
        well_rounded: span_rank == n,
        witness,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormCheck {
    #[serde(serialize_with = "as_string")]
    pub stated_min: i128,
    #[serde(serialize_with = "as_string")]
    pub enum_min: i128,
    pub agree: bool,
    pub minimizers: Vec<Vec<i64>>,
    pub report: ShortVectorReport,
}

/// Closed-form minimum against enumeration.
pub fn verify_closed_form(nf: &NumberField, basis: &ModuleBasis) -> Result<ClosedFormCheck> {
    let stated_min = modules::closed_form_minimum(basis)?;
    let g = modules::gram(&nf.traces, basis)?;
    let report = enumerate_minimum(&g)?;
    Ok(ClosedFormCheck {
        stated_min,
        enum_min: report.minimum,
        agree: stated_min == report.minimum,
        minimizers: report.minimal_vectors.clone(),
        report,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub alpha: Element,
    /// Rows `θ^i(α)` over the integral basis.
    pub orbit: Vec<Vec<i64>>,
    pub gram: GramMatrix,
    pub rank: usize,
    #[serde(serialize_with = "as_string")]
    pub trace: i128,
    pub circulant: bool,
    pub equal_norms: bool,
    /// Present when the orbit has full rank.
    pub short_vectors: Option<ShortVectorReport>,
}

fn orbit_rows(nf: &NumberField, alpha: &Element) -> Vec<Element> {
    (0..nf.degree())
        .map(|i| alpha.theta_pow(nf.spec.ramified, i))
        .collect()
}

fn require_irrational(nf: &NumberField, alpha: &Element) -> Result<()> {
    if alpha.field != nf.spec.key() {
        return Err(Error::FieldMismatch(alpha.field.p, alpha.field.n, nf.p(), nf.n()));
    }
    if alpha.is_rational(&nf.spec) {
        return Err(Error::AlphaRational);
    }
    Ok(())
}

/// The Galois orbit `{α, θ(α), …, θ^{p-1}(α)}` and its lattice.
pub fn orbit_sublattice(nf: &NumberField, alpha: &Element) -> Result<OrbitReport> {
    require_irrational(nf, alpha)?;
    let p = nf.degree();
    let rows = orbit_rows(nf, alpha);
    let entries = modules::trace_gram(&nf.traces, &rows)?;
    let circulant = (0..p).all(|i| (0..p).all(|j| entries[i][j] == entries[(i + 1) % p][(j + 1) % p]));
    let equal_norms = (0..p).all(|i| entries[i][i] == entries[0][0]);
    let coords: Vec<Vec<i64>> = rows.iter().map(|r| r.coords.clone()).collect();
    let rank = intmat::rank(&coords);
    let gram = GramMatrix::from_entries(entries);
    let short_vectors = if rank == p {
        Some(enumerate_minimum(&gram)?)
    } else {
        None
    };
    Ok(OrbitReport {
        alpha: alpha.clone(),
        orbit: coords,
        gram,
        rank,
        trace: nf.trace(alpha)?,
        circulant,
        equal_norms,
        short_vectors,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CirculantCheck {
    /// `Π_i f(ζ_p^i)` with `f(x) = Σ_j σ_j(α) x^j`.
    pub det_numeric: f64,
    pub nonzero: bool,
    /// `|f(ζ_p^i)|` for `i = 0..p-1`; `f(1) = Tr(α)`.
    pub factor_moduli: Vec<f64>,
    pub tolerance: f64,
    pub bits_used: u32,
    /// `(-1)^((p-1)/2) · det(orbit coordinates) · det(embedding)`.
    pub det_expected: f64,
    pub consistent: bool,
    /// Whether every factor with `i ≥ 1` is above the tolerance.
    pub factors_nonvanishing: bool,
}

struct CirculantRaw {
    det: f64,
    factors: Vec<f64>,
    scale: f64,
}

fn circulant_at<R: Real>(nf: &NumberField, alpha: &Element, prec: Precision) -> Result<CirculantRaw> {
    let p = nf.degree();
    let rows = periods::basis_rows::<R>(nf.choice(), prec)?;
    let conj: Vec<R> = (0..p)
        .map(|j| {
            kahan_sum(
                alpha
                    .coords
                    .iter()
                    .zip(&rows)
                    .map(|(&c, row)| R::from_i64(c, prec) * row[j].clone()),
                prec,
            )
        })
        .collect();
    let scale = conj.iter().map(|v| v.to_f64().powi(2)).sum::<f64>().sqrt();
    let mut det = Complex::new(R::from_i64(1, prec), R::from_i64(0, prec));
    let mut factors = Vec::with_capacity(p);
    for i in 0..p {
        let mut re = Vec::with_capacity(p);
        let mut im = Vec::with_capacity(p);
        for (j, a) in conj.iter().enumerate() {
            let (c, s) = R::cos_sin_turns((i * j % p) as u64, p as u64, prec);
            re.push(a.clone() * c);
            im.push(a.clone() * s);
        }
        let f = Complex::new(kahan_sum(re, prec), kahan_sum(im, prec));
        factors.push(f.modulus());
        det = det.mul(&f);
    }
    Ok(CirculantRaw {
        det: det.re.to_f64(),
        factors,
        scale,
    })
}

/// Evaluates the circulant determinant of the orbit of `α` from its
/// conjugates, escalating precision (up to four times the working width)
/// whenever a zero reading contradicts `Tr(α) ≠ 0`.
pub fn circulant_det_check(nf: &NumberField, alpha: &Element) -> Result<CirculantCheck> {
    require_irrational(nf, alpha)?;
    let p = nf.degree();
    let trace = nf.trace(alpha)?;
    let base = nf.precision;
    let orbit: Vec<Vec<i64>> = orbit_rows(nf, alpha).into_iter().map(|r| r.coords).collect();
    let det_orbit = intmat::det_i64(&orbit).to_f64().unwrap_or(f64::INFINITY);
    let sign = if ((p - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let det_expected = sign * det_orbit * nf.embedding.determinant();
    let mut factor = 1;
    loop {
        let prec = base.scaled(factor);
        let raw = if prec.is_double() {
            circulant_at::<f64>(nf, alpha, prec)?
        } else {
            circulant_at::<BigReal>(nf, alpha, prec)?
        };
        let thr = prec.zero_threshold();
        let tolerance = thr * raw.scale.max(1.0).powi(p as i32);
        let nonzero = raw.det.abs() > tolerance;
        if !nonzero && trace != 0 {
            if factor < 4 {
                factor *= 2;
                continue;
            }
            return Err(Error::PrecisionLoss(format!(
                "circulant determinant {:e} below tolerance {tolerance:e} although Tr(α) = {trace}",
                raw.det
            )));
        }
        let factor_tol = thr * raw.scale.max(1.0);
        let factors_nonvanishing = raw.factors[1..].iter().all(|&m| m > factor_tol);
        let consistent = (raw.det - det_expected).abs()
            <= PRUNE_MARGIN * raw.det.abs().max(det_expected.abs()).max(tolerance);
        return Ok(CirculantCheck {
            det_numeric: raw.det,
            nonzero,
            factor_moduli: raw.factors,
            tolerance,
            bits_used: prec.bits,
            det_expected,
            consistent,
            factors_nonvanishing,
        });
    }
}

/// Exact rank of a set of coefficient vectors.
pub fn span_rank(vectors: &[Vec<i64>]) -> usize {
    intmat::rank(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_mm_ramified, build_ok, gram};

    fn g(rows: Vec<Vec<i64>>) -> GramMatrix {
        GramMatrix::from_entries(rows)
    }

    #[test]
    fn orthogonal() {
        let r = enumerate_minimum(&g(vec![vec![9, 0, 0], vec![0, 9, 0], vec![0, 0, 9]])).unwrap();
        assert_eq!(r.minimum, 9);
        assert_eq!(r.minimal_vectors, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert!(r.well_rounded);
    }

    #[test]
    fn ok_ramified_39() {
        let r = enumerate_minimum(&g(vec![vec![3, 0, 0], vec![0, 6, -3], vec![0, -3, 6]])).unwrap();
        assert_eq!(r.minimum, 3);
        assert_eq!(r.minimal_vectors, vec![vec![1, 0, 0]]);
        assert!(!r.well_rounded);
    }

    #[test]
    fn mm2_on_39() {
        let nf = NumberField::new(3, 9).unwrap();
        let b = build_mm_ramified(&nf.spec, 2).unwrap();
        let r = enumerate_minimum(&gram(&nf.traces, &b).unwrap()).unwrap();
        assert_eq!(r.minimum, 6);
        assert_eq!(r.span_rank, 2);
        assert!(!r.well_rounded);
    }

    #[test]
    fn hexagonal() {
        let r = enumerate_minimum(&g(vec![vec![2, 1], vec![1, 2]])).unwrap();
        assert_eq!(r.count_pairs, 3);
        assert!(r.well_rounded);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            enumerate_minimum(&g(vec![vec![1, 2], vec![2, 1]])),
            Err(Error::NotPositiveDefinite)
        ));
        let big: Vec<Vec<i64>> = (0..14).map(|i| (0..14).map(|j| i64::from(i == j)).collect()).collect();
        assert!(matches!(enumerate_minimum(&g(big)), Err(Error::DimensionTooLarge(14))));
    }

    #[test]
    fn orbit_examples() {
        let nf = NumberField::new(3, 9).unwrap();
        let a = nf.element(vec![1, -1, 0]).unwrap();
        let o = orbit_sublattice(&nf, &a).unwrap();
        assert_eq!(o.rank, 3);
        assert!(o.circulant && o.equal_norms);
        assert_eq!(o.gram.entries[0][0], 9);
        let b = nf.element(vec![0, 1, -1]).unwrap();
        assert!(orbit_sublattice(&nf, &b).unwrap().rank < 3);
        assert!(matches!(
            orbit_sublattice(&nf, &Element::integer(&nf.spec, 4)),
            Err(Error::AlphaRational)
        ));
        let nf7 = NumberField::new(3, 7).unwrap();
        let o = orbit_sublattice(&nf7, &Element::t(&nf7.spec)).unwrap();
        assert_eq!(o.rank, 3);
        assert_eq!(o.gram, GramMatrix::from_entries(gram(&nf7.traces, &build_ok(&nf7.spec)).unwrap().entries));
    }

    #[test]
    fn circulant_examples() {
        let nf = NumberField::new(3, 9).unwrap();
        let th = Element::theta_t(&nf.spec, 1);
        let c = circulant_det_check(&nf, &th).unwrap();
        assert!(!c.nonzero);
        let a = nf.element(vec![1, -1, 0]).unwrap();
        let c = circulant_det_check(&nf, &a).unwrap();
        assert!(c.nonzero && c.consistent && c.factors_nonvanishing);
        let nf7 = NumberField::new(3, 7).unwrap();
        let c = circulant_det_check(&nf7, &Element::t(&nf7.spec)).unwrap();
        assert!(c.nonzero && c.consistent);
        assert!((c.factor_moduli[0] - 1.0).abs() < 1e-9);
    }
}
