//! A field together with everything needed to compute in it: exact traces,
//! the chosen character, the embedding, and a numeric product engine.

use crate::error::{Error, Result};
use crate::field::{trace_table, validate_field, Element, FieldSpec, TraceTable};
use crate::intmat;
use crate::periods::{self, CharacterChoice, EmbeddingMatrix};
use crate::real::{kahan_sum, BigReal, Precision, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Tolerance on `max |numeric Gram - exact Gram| / max(1, n)`.
pub const GRAM_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct NumberField {
    pub spec: FieldSpec,
    pub traces: TraceTable,
    pub choices: Vec<CharacterChoice>,
    pub choice_index: usize,
    pub embedding: EmbeddingMatrix,
    pub precision: Precision,
    gram_inverse: Vec<Vec<BigRational>>,
    big_rows: Option<Vec<Vec<BigReal>>>,
}

impl NumberField {
    /// Double precision, first character choice.
    pub fn new(p: u64, n: u64) -> Result<Self> {
        Self::with_options(p, n, 0, Precision::DOUBLE)
    }

    pub fn with_options(p: u64, n: u64, choice: usize, precision: Precision) -> Result<Self> {
        Self::from_spec(validate_field(p, n)?, choice, precision)
    }

    pub fn from_spec(spec: FieldSpec, choice: usize, precision: Precision) -> Result<Self> {
        let traces = trace_table(&spec, precision)?;
        let choices = periods::enumerate_characters(&spec);
        let selected = choices.get(choice).ok_or(Error::InvalidChoice {
            index: choice,
            count: choices.len(),
        })?;
        let embedding = periods::embedding_matrix(selected, precision)?;
        let gram = traces.basis_gram(&spec);
        let gram_inverse = intmat::inverse_rational(&gram)
            .ok_or_else(|| Error::VerificationFailed("integral-basis Gram is singular".into()))?;
        let big_rows = if precision.is_double() {
            None
        } else {
            Some(periods::basis_rows::<BigReal>(selected, precision)?)
        };
        let nf = NumberField {
            spec,
            traces,
            choice_index: choice,
            choices,
            embedding,
            precision,
            gram_inverse,
            big_rows,
        };
        let gap = nf.numeric_gram_gap();
        if gap >= GRAM_TOL {
            return Err(Error::PrecisionLoss(format!(
                "numeric Gram deviates from the exact Gram by {gap:e} (scaled)"
            )));
        }
        Ok(nf)
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn n(&self) -> u64 {
        self.spec.n
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    pub fn choice(&self) -> &CharacterChoice {
        &self.choices[self.choice_index]
    }

    pub fn element(&self, coords: Vec<i64>) -> Result<Element> {
        Element::new(&self.spec, coords)
    }

    pub fn trace(&self, x: &Element) -> Result<i128> {
        self.traces.trace_linear(x)
    }

    pub fn trace_form(&self, x: &Element, y: &Element) -> Result<i128> {
        self.traces.trace_bilinear(x, y)
    }

    /// Exact Gram of the integral basis.
    pub fn basis_gram(&self) -> Vec<Vec<i64>> {
        self.traces.basis_gram(&self.spec)
    }

    /// `max_ij |(E E^T)_ij - G_ij| / max(1, n)`.
    pub fn numeric_gram_gap(&self) -> f64 {
        let exact = self.basis_gram();
        let numeric = self.embedding.numeric_gram();
        let scale = (self.n() as f64).max(1.0);
        exact
            .iter()
            .zip(&numeric)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x as f64 - y).abs()))
            .fold(0.0, f64::max)
            / scale
    }

    pub fn conjugates(&self, x: &Element) -> Vec<f64> {
        self.embedding.conjugates(&x.coords)
    }

    /// Coordinates of `xy`. The traces `Tr(b_l x y) = Σ_j σ_j(b_l) σ_j(x) σ_j(y)`
    /// are evaluated numerically and rounded, then `G z = (Tr(b_l x y))_l` is
    /// solved exactly; `z` must be integral.
    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        self.traces.trace_bilinear(x, y)?;
        let traces = match &self.big_rows {
            None => product_traces::<f64>(&self.embedding.entries, x, y, self.precision)?,
            Some(rows) => product_traces::<BigReal>(rows, x, y, self.precision)?,
        };
        let p = self.degree();
        let mut coords = Vec::with_capacity(p);
        for row in &self.gram_inverse {
            let z: BigRational = row
                .iter()
                .zip(&traces)
                .map(|(g, &t)| g * BigRational::from_integer(BigInt::from(t)))
                .fold(BigRational::zero(), |a, b| a + b);
            if !z.is_integer() {
                return Err(Error::VerificationFailed(format!(
                    "product coordinates are not integral ({z})"
                )));
            }
            coords.push(z.to_integer().to_i64().ok_or(Error::Overflow("product coordinates"))?);
        }
        Element::new(&self.spec, coords)
    }
}

fn product_traces<R: Real>(
    rows: &[Vec<R>],
    x: &Element,
    y: &Element,
    prec: Precision,
) -> Result<Vec<i64>> {
    let p = rows.len();
    let conj = |e: &Element| -> Vec<R> {
        (0..p)
            .map(|j| {
                kahan_sum(
                    e.coords
                        .iter()
                        .zip(rows)
                        .map(|(&c, row)| R::from_i64(c, prec) * row[j].clone()),
                    prec,
                )
            })
            .collect()
    };
    let (cx, cy) = (conj(x), conj(y));
    let prod: Vec<R> = cx.into_iter().zip(cy).map(|(a, b)| a * b).collect();
    let tol = periods::TRACE_ROUNDING_TOL.min(prec.zero_threshold().max(1e-30));
    rows.iter()
        .map(|row| {
            let v = kahan_sum(
                row.iter().zip(&prod).map(|(a, b)| a.clone() * b.clone()),
                prec,
            );
            periods::round_trace(v.to_f64(), tol, "Tr(b x y)")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks_gram() {
        for (p, n) in [(3, 9), (3, 7), (5, 25), (3, 63), (5, 11)] {
            let nf = NumberField::new(p, n).unwrap();
            assert!(nf.numeric_gram_gap() < 1e-9, "({p},{n})");
        }
        assert!(matches!(
            NumberField::with_options(3, 9, 1, Precision::DOUBLE),
            Err(Error::InvalidChoice { index: 1, count: 1 })
        ));
    }

    #[test]
    fn products_of_basis_elements() {
        let nf = NumberField::new(3, 9).unwrap();
        let one = Element::one(&nf.spec);
        let th = Element::theta_t(&nf.spec, 1);
        assert_eq!(nf.multiply(&one, &th).unwrap(), th);
        // sum of the conjugates of t vanishes, so t θ(t) + θ(t) θ²(t) + θ²(t) t is rational
        let t = Element::t(&nf.spec);
        let th2 = Element::theta_t(&nf.spec, 2);
        let s = nf
            .multiply(&t, &th)
            .unwrap()
            .add(&nf.multiply(&th, &th2).unwrap())
            .unwrap()
            .add(&nf.multiply(&th2, &t).unwrap())
            .unwrap();
        assert!(s.is_rational(&nf.spec));
        assert_eq!(nf.trace(&s).unwrap(), 3 * s.coords[0] as i128);
    }

    #[test]
    fn product_trace_matches_bilinear() {
        let nf = NumberField::new(3, 7).unwrap();
        let x = nf.element(vec![2, -1, 3]).unwrap();
        let y = nf.element(vec![0, 4, -2]).unwrap();
        let xy = nf.multiply(&x, &y).unwrap();
        assert_eq!(nf.trace(&xy).unwrap(), nf.trace_form(&x, &y).unwrap());
        let hi = NumberField::with_options(3, 7, 0, Precision::new(128)).unwrap();
        assert_eq!(hi.multiply(&x, &y).unwrap(), xy);
    }
}
