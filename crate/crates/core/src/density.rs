//! Center density from the exact Gram determinant, and the specialized
//! closed-form densities for comparison.

use crate::modules::{Family, GramMatrix, ModuleBasis};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

/// Relative disagreement above which the closed-form density is flagged.
pub const DENSITY_REL_TOL: f64 = 1e-12;

fn as_string<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "as_string")]
    pub minimum: i128,
    /// `det Gram`, the squared covolume.
    #[serde(serialize_with = "as_string")]
    pub volume_sq: BigInt,
    #[serde(serialize_with = "as_string")]
    pub index: BigInt,
    /// `δ^2 = t^p / (4^p det Gram)`, exact.
    #[serde(serialize_with = "as_string")]
    pub delta_sq: BigRational,
    pub delta_computed: f64,
    /// The specialized formula with divisor `m`, where one applies.
    pub delta_specialized: Option<f64>,
    /// The divisor the specialized formula uses for the index.
    pub specialized_divisor: Option<u64>,
    pub discrepancy_flag: bool,
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn sqrt_rational(q: &BigRational) -> f64 {
    match q.to_f64() {
        Some(x) if x.is_normal() => x.sqrt(),
        _ => (0.5 * (ln_big(q.numer()) - ln_big(q.denom()))).exp(),
    }
}

/// Center density of the lattice with Gram `gram` and minimum `minimum`.
pub fn center_density(basis: &ModuleBasis, gram: &GramMatrix, minimum: i128) -> DensityReport {
    let p = basis.field.degree();
    let det = gram.det();
    let t = BigInt::from(minimum);
    let num = num_traits::pow(t, p);
    let den = num_traits::pow(BigInt::from(4), p) * &det;
    let delta_sq = BigRational::new(num, den);
    let delta_computed = sqrt_rational(&delta_sq);
    let divisor = match basis.family {
        Family::MmRam | Family::OrbitM => basis.params.m,
        _ => None,
    };
    let delta_specialized = divisor.map(|m| {
        let (pf, n) = (p as f64, basis.field.n as f64);
        ((pf / 2.0) * (minimum as f64).ln()
            - pf * std::f64::consts::LN_2
            - ((pf - 1.0) / 2.0) * n.ln()
            - (m as f64).ln())
        .exp()
    });
    let discrepancy_flag = delta_specialized
        .map(|d| (d - delta_computed).abs() > DENSITY_REL_TOL * delta_computed.abs().max(d.abs()))
        .unwrap_or(false);
    DensityReport {
        minimum,
        volume_sq: det,
        index: basis.index(),
        delta_sq,
        delta_computed,
        delta_specialized,
        specialized_divisor: divisor,
        discrepancy_flag,
    }
}

impl DensityReport {
    /// `δ² · 4^p · det Gram == t^p`.
    pub fn identity_holds(&self, p: usize) -> bool {
        let lhs = &self.delta_sq
            * BigRational::from_integer(num_traits::pow(BigInt::from(4), p) * &self.volume_sq);
        let rhs = BigRational::from_integer(num_traits::pow(BigInt::from(self.minimum), p));
        lhs == rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{build_mm_ramified, build_orbit_m, gram};
    use crate::number_field::NumberField;

    #[test]
    fn orthogonal_anchor() {
        let nf = NumberField::new(3, 9).unwrap();
        let b = build_orbit_m(&nf.spec, 1).unwrap();
        let g = gram(&nf.traces, &b).unwrap();
        let d = center_density(&b, &g, 9);
        assert_eq!(d.delta_sq, BigRational::new(1.into(), 64.into()));
        assert!((d.delta_computed - 0.125).abs() < 1e-15);
        assert!((d.delta_specialized.unwrap() - 0.375).abs() < 1e-12);
        assert!(d.discrepancy_flag);
        assert!(d.identity_holds(3));
    }

    #[test]
    fn coprime_case_agrees() {
        let nf = NumberField::new(3, 9).unwrap();
        let b = build_mm_ramified(&nf.spec, 2).unwrap();
        let g = gram(&nf.traces, &b).unwrap();
        let d = center_density(&b, &g, 6);
        assert_eq!(d.volume_sq, BigInt::from(324));
        assert!((d.delta_computed - 6f64.powf(1.5) / 144.0).abs() < 1e-14);
        assert!(!d.discrepancy_flag);
    }
}
