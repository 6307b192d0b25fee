//! Gaussian periods, the canonical embedding, and the numeric derivations
//! that fill in trace data not available in closed form.
//!
//! A degree-`p` field of conductor `n` is the fixed field of an index-`p`
//! subgroup `H` of `(Z/nZ)^*`. With `g` the smallest residue outside `H`,
//! the conjugates of `t` are the periods
//!
//! ```text
//! η_i = Σ_{h ∈ g^i H} cos(2π h / n)
//! ```
//!
//! and `σ_j(θ^i(t)) = η_{i+j}`, so every row of the embedding matrix is a
//! cyclic shift of the period vector.

use crate::arith;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::real::{kahan_sum, BigReal, Precision, Real};
use serde::Serialize;
use std::collections::BTreeSet;

/// Absolute tolerance for rounding a numeric trace to an integer.
pub const TRACE_ROUNDING_TOL: f64 = 1e-6;
/// Bound on the imaginary part of a period sum.
pub const IMAGINARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterChoice {
    pub field: FieldSpec,
    /// Prime-power moduli `q^e` of the cyclic components of `(Z/nZ)^*`.
    pub moduli: Vec<u64>,
    /// CRT lifts of a generator of each component (1 on the other components).
    pub generators: Vec<u64>,
    /// Character value `χ(generator) ∈ Z/p` per component; first nonzero entry is 1.
    pub exponent_vector: Vec<u64>,
    /// Sorted residues `h` with `χ(h) = 1`.
    pub kernel: Vec<u64>,
    /// Smallest positive residue outside the kernel; generates the quotient.
    pub coset_rep: u64,
}

impl CharacterChoice {
    /// Residues of the coset `g^i H`, in increasing order.
    pub fn coset(&self, i: usize) -> Vec<u64> {
        let n = self.field.n;
        let shift = arith::mod_pow(self.coset_rep, i as u64, n);
        let mut c: Vec<u64> = self
            .kernel
            .iter()
            .map(|&h| arith::mod_mul(shift, h, n))
            .collect();
        c.sort_unstable();
        c
    }

    pub fn contains(&self, x: u64) -> bool {
        self.kernel.binary_search(&(x % self.field.n)).is_ok()
    }
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|&x| arith::gcd(x, n) == 1).collect()
}

/// All index-`p` subgroups of `(Z/nZ)^*` whose fixed field has conductor
/// exactly `n`, ordered lexicographically by their sorted kernels.
pub fn enumerate_characters(field: &FieldSpec) -> Vec<CharacterChoice> {
    let (p, n) = (field.p, field.n);
    let comps: Vec<(u64, u64)> = arith::factorize(n)
        .into_iter()
        .map(|(q, e)| (q.pow(e), arith::primitive_root_prime_power(q, e)))
        .collect();
    let moduli: Vec<u64> = comps.iter().map(|c| c.0).collect();
    let generators: Vec<u64> = comps
        .iter()
        .map(|&(qe, g)| {
            let residues: Vec<(u64, u64)> = moduli
                .iter()
                .map(|&m| if m == qe { (g, m) } else { (1, m) })
                .collect();
            arith::crt(&residues)
        })
        .collect();
    // discrete logarithms mod p on each component
    let dlogs: Vec<Vec<u64>> = comps
        .iter()
        .map(|&(qe, g)| {
            let mut table = vec![0u64; qe as usize];
            let mut x = 1u64;
            let phi = arith::multiplicative_order(g, qe);
            for k in 0..phi {
                table[x as usize] = k % p;
                x = arith::mod_mul(x, g, qe);
            }
            table
        })
        .collect();
    let unit_list = units(n);
    let r = comps.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let total = (p as usize).pow(r as u32);
    for code in 1..total {
        let mut ev = Vec::with_capacity(r);
        let mut c = code;
        for _ in 0..r {
            ev.push((c % p as usize) as u64);
            c /= p as usize;
        }
        // one representative per line: first nonzero coordinate equal to 1
        if ev.iter().find(|&&e| e != 0) != Some(&1) {
            continue;
        }
        let chi = |x: u64| -> u64 {
            comps
                .iter()
                .zip(&dlogs)
                .zip(&ev)
                .map(|((&(qe, _), table), &e)| table[(x % qe) as usize] * e)
                .sum::<u64>()
                % p
        };
        let kernel: Vec<u64> = unit_list.iter().copied().filter(|&x| chi(x) == 0).collect();
        if !seen.insert(kernel.clone()) {
            continue;
        }
        let exact = arith::factorize(n).iter().all(|&(q, _)| {
            let d = n / q;
            !unit_list
                .iter()
                .filter(|&&x| x % d == 1 % d)
                .all(|x| kernel.binary_search(x).is_ok())
        });
        if !exact {
            continue;
        }
        let coset_rep = *unit_list
            .iter()
            .find(|x| kernel.binary_search(x).is_err())
            .expect("proper subgroup");
        out.push(CharacterChoice {
            field: field.clone(),
            moduli: moduli.clone(),
            generators: generators.clone(),
            exponent_vector: ev,
            kernel,
            coset_rep,
        });
    }
    out.sort_by(|a, b| a.kernel.cmp(&b.kernel));
    out
}

/// Real and imaginary parts of the period sums at working type `R`.
pub(crate) fn period_sums<R: Real>(choice: &CharacterChoice, prec: Precision) -> (Vec<R>, Vec<R>) {
    let p = choice.field.degree();
    let n = choice.field.n;
    let mut re = Vec::with_capacity(p);
    let mut im = Vec::with_capacity(p);
    for i in 0..p {
        let terms: Vec<(R, R)> = choice
            .coset(i)
            .into_iter()
            .map(|h| R::cos_sin_turns(h, n, prec))
            .collect();
        re.push(kahan_sum(terms.iter().map(|t| t.0.clone()), prec));
        im.push(kahan_sum(terms.into_iter().map(|t| t.1), prec));
    }
    (re, im)
}

fn checked_periods<R: Real>(choice: &CharacterChoice, prec: Precision) -> Result<Vec<R>> {
    let (re, im) = period_sums::<R>(choice, prec);
    let tol = IMAGINARY_TOL.min(prec.zero_threshold());
    if let Some(worst) = im.iter().map(|x| x.to_f64().abs()).reduce(f64::max) {
        if worst >= tol {
            return Err(Error::PrecisionLoss(format!(
                "imaginary residual {worst:e} in Gaussian periods of conductor {}",
                choice.field.n
            )));
        }
    }
    Ok(re)
}

/// The `p` Gaussian periods `η_0 = t, η_1 = θ(t), ...` as reals.
pub fn gaussian_periods(choice: &CharacterChoice, prec: Precision) -> Result<Vec<f64>> {
    if prec.is_double() {
        checked_periods::<f64>(choice, prec)
    } else {
        Ok(checked_periods::<BigReal>(choice, prec)?
            .iter()
            .map(Real::to_f64)
            .collect())
    }
}

/// Conjugate vectors of the integral basis, as rows, at working type `R`.
pub(crate) fn basis_rows<R: Real>(choice: &CharacterChoice, prec: Precision) -> Result<Vec<Vec<R>>> {
    let periods = checked_periods::<R>(choice, prec)?;
    let p = periods.len();
    Ok((0..p)
        .map(|i| {
            if choice.field.ramified && i == 0 {
                vec![R::from_i64(1, prec); p]
            } else {
                (0..p).map(|j| periods[(i + j) % p].clone()).collect()
            }
        })
        .collect())
}

/// The canonical embedding of the integral basis: row `k` holds the `p`
/// real conjugates of the `k`-th basis element.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingMatrix {
    pub field: FieldSpec,
    pub choice: CharacterChoice,
    pub entries: Vec<Vec<f64>>,
    pub precision: Precision,
}

pub fn embedding_matrix(choice: &CharacterChoice, prec: Precision) -> Result<EmbeddingMatrix> {
    let entries = if prec.is_double() {
        basis_rows::<f64>(choice, prec)?
    } else {
        basis_rows::<BigReal>(choice, prec)?
            .into_iter()
            .map(|r| r.iter().map(Real::to_f64).collect())
            .collect()
    };
    Ok(EmbeddingMatrix {
        field: choice.field.clone(),
        choice: choice.clone(),
        entries,
        precision: prec,
    })
}

impl EmbeddingMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `E E^T`, the numeric Gram of the integral basis.
    pub fn numeric_gram(&self) -> Vec<Vec<f64>> {
        let p = self.dim();
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| dot(&self.entries[i], &self.entries[j]))
                    .collect()
            })
            .collect()
    }

    pub fn determinant(&self) -> f64 {
        det_f64(self.entries.clone())
    }

    /// Conjugates `(σ_0(x), ..., σ_{p-1}(x))` of an element given by coordinates.
    pub fn conjugates(&self, coords: &[i64]) -> Vec<f64> {
        let p = self.dim();
        (0..p)
            .map(|j| {
                kahan_sum(
                    coords
                        .iter()
                        .zip(&self.entries)
                        .map(|(&c, row)| c as f64 * row[j]),
                    Precision::DOUBLE,
                )
            })
            .collect()
    }

    /// Row-major CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    kahan_sum(a.iter().zip(b).map(|(x, y)| x * y), Precision::DOUBLE)
}

/// Determinant by partial-pivoting LU.
pub(crate) fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[piv][k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Rounds a numeric trace, failing if it is not within the rounding tolerance.
pub(crate) fn round_trace(value: f64, tol: f64, what: &str) -> Result<i64> {
    let r = value.round();
    if (value - r).abs() >= tol {
        return Err(Error::PrecisionLoss(format!(
            "{what}: {value} is not within {tol:e} of an integer"
        )));
    }
    Ok(r as i64)
}

fn pair_traces_at<R: Real>(choice: &CharacterChoice, prec: Precision) -> Result<(i64, i64)> {
    let rows = basis_rows::<R>(choice, prec)?;
    let p = rows.len();
    let tol = TRACE_ROUNDING_TOL.min(prec.zero_threshold().max(1e-30));
    let inner = |k: usize| -> f64 {
        kahan_sum(
            rows[0].iter().zip(&rows[k]).map(|(a, b)| a.clone() * b.clone()),
            prec,
        )
        .to_f64()
    };
    let diag = round_trace(inner(0), tol, "Tr(t^2)")?;
    let mut off: Option<i64> = None;
    for k in 1..p {
        let v = round_trace(inner(k), tol, "Tr(t θ^k(t))")?;
        match off {
            None => off = Some(v),
            Some(prev) if prev != v => {
                return Err(Error::InconsistentTraces(format!(
                    "Tr(t θ^k(t)) takes values {prev} and {v} for conductor {}",
                    choice.field.n
                )))
            }
            Some(_) => {}
        }
    }
    Ok((diag, off.expect("p >= 3")))
}

/// `(Tr(t^2), Tr(t θ^k(t)))` for an unramified field, from the periods.
pub fn derive_unramified_pair_traces(choice: &CharacterChoice, prec: Precision) -> Result<(i64, i64)> {
    choice.field.require_unramified()?;
    if prec.is_double() {
        pair_traces_at::<f64>(choice, prec)
    } else {
        pair_traces_at::<BigReal>(choice, prec)
    }
}

/// Minimal complex arithmetic over a [`Real`].
#[derive(Debug, Clone)]
pub(crate) struct Complex<R> {
    pub re: R,
    pub im: R,
}

impl<R: Real> Complex<R> {
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Complex {
            re: self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone(),
            im: self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone(),
        }
    }

    pub fn modulus(&self) -> f64 {
        let (a, b) = (self.re.to_f64(), self.im.to_f64());
        a.hypot(b)
    }
}

/// Conjugates `σ_j(λ)` of `λ = Π_{h ∈ H} (1 - ζ_n^h)` (the relative norm of
/// `1 - ζ_n`), computed as complex products; the imaginary parts must vanish.
pub(crate) fn norm_one_minus_zeta<R: Real>(choice: &CharacterChoice, prec: Precision) -> Result<Vec<f64>> {
    let p = choice.field.degree();
    let n = choice.field.n;
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let mut acc = Complex::new(R::from_i64(1, prec), R::from_i64(0, prec));
        for h in choice.coset(j) {
            let (c, s) = R::cos_sin_turns(h, n, prec);
            let factor = Complex::new(R::from_i64(1, prec) - c, -s);
            acc = acc.mul(&factor);
        }
        let im = acc.im.to_f64();
        let scale = acc.re.to_f64().abs().max(1.0);
        if im.abs() >= TRACE_ROUNDING_TOL * scale {
            return Err(Error::PrecisionLoss(format!(
                "conjugate {j} of the relative norm has imaginary part {im:e}"
            )));
        }
        out.push(acc.re.to_f64());
    }
    Ok(out)
}
