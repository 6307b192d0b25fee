//! Working-precision real arithmetic for the numeric side of the toolkit.
//!
//! Period sums, embedding products and circulant determinants are written once
//! against [`Real`] and instantiated either with `f64` (53 bits) or with
//! [`BigReal`], a thin wrapper over `astro_float::BigFloat` at a configurable
//! bit width.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use serde::Serialize;
use std::cell::RefCell;
use std::ops::{Add, Mul, Neg, Sub};

/// Environment variable consulted for the default working precision.
pub const PRECISION_ENV: &str = "WRLAT_PRECISION_BITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Precision {
    pub bits: u32,
}

impl Precision {
    pub const DOUBLE: Precision = Precision { bits: 53 };

    pub fn new(bits: u32) -> Self {
        Precision { bits: bits.max(53) }
    }

    /// Reads [`PRECISION_ENV`], falling back to double precision.
    pub fn from_env() -> Self {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(Precision::new)
            .unwrap_or(Precision::DOUBLE)
    }

    pub fn is_double(self) -> bool {
        self.bits <= 53
    }

    pub fn scaled(self, factor: u32) -> Self {
        Precision::new(self.bits.saturating_mul(factor))
    }

    /// Absolute rounding threshold that leaves roughly 33 bits of headroom:
    /// about 1e-6 at double precision, shrinking as the width grows.
    pub fn zero_threshold(self) -> f64 {
        2f64.powi(-(self.bits as i32 - 33))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DOUBLE
    }
}

pub trait Real:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_i64(v: i64, prec: Precision) -> Self;
    fn from_f64(v: f64, prec: Precision) -> Self;
    /// `(cos, sin)` of `2*pi*num/den`.
    fn cos_sin_turns(num: u64, den: u64, prec: Precision) -> (Self, Self);
    fn to_f64(&self) -> f64;
}

impl Real for f64 {
    fn from_i64(v: i64, _: Precision) -> Self {
        v as f64
    }

    fn from_f64(v: f64, _: Precision) -> Self {
        v
    }

    fn cos_sin_turns(num: u64, den: u64, _: Precision) -> (Self, Self) {
        // reduce to [-den/2, den/2] before scaling so the argument stays small
        let r = (num % den) as i64;
        let den_i = den as i64;
        let r = if 2 * r > den_i { r - den_i } else { r };
        let x = std::f64::consts::TAU * (r as f64) / (den as f64);
        let (s, c) = x.sin_cos();
        (c, s)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Arbitrary-precision real with a fixed working width.
#[derive(Debug, Clone)]
pub struct BigReal {
    value: BigFloat,
    bits: usize,
}

impl BigReal {
    fn wrap(value: BigFloat, bits: usize) -> Self {
        BigReal { value, bits }
    }

    fn width(&self, other: &Self) -> usize {
        self.bits.max(other.bits)
    }

    fn padded(prec: Precision) -> usize {
        // astro-float works in 64-bit words
        (prec.bits as usize).div_ceil(64) * 64
    }
}

impl Add for BigReal {
    type Output = BigReal;
    fn add(self, rhs: BigReal) -> BigReal {
        let p = self.width(&rhs);
        BigReal::wrap(self.value.add(&rhs.value, p, RM), p)
    }
}

impl Sub for BigReal {
    type Output = BigReal;
    fn sub(self, rhs: BigReal) -> BigReal {
        let p = self.width(&rhs);
        BigReal::wrap(self.value.sub(&rhs.value, p, RM), p)
    }
}

impl Mul for BigReal {
    type Output = BigReal;
    fn mul(self, rhs: BigReal) -> BigReal {
        let p = self.width(&rhs);
        BigReal::wrap(self.value.mul(&rhs.value, p, RM), p)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.neg(), self.bits)
    }
}

impl Real for BigReal {
    fn from_i64(v: i64, prec: Precision) -> Self {
        let p = Self::padded(prec);
        BigReal::wrap(BigFloat::from_i64(v, p), p)
    }

    fn from_f64(v: f64, prec: Precision) -> Self {
        let p = Self::padded(prec);
        BigReal::wrap(BigFloat::from_f64(v, p), p)
    }

    fn cos_sin_turns(num: u64, den: u64, prec: Precision) -> (Self, Self) {
        let p = Self::padded(prec);
        let r = num % den;
        let (r, flip) = if 2 * r > den { (den - r, true) } else { (r, false) };
        CONSTS.with(|cc| {
            let mut cc = cc.borrow_mut();
            // a few guard words for the argument reduction inside cos/sin
            let wp = p + 128;
            let two_pi = cc.pi(wp, RM).mul(&BigFloat::from_u64(2, wp), wp, RM);
            let x = two_pi
                .mul(&BigFloat::from_u64(r, wp), wp, RM)
                .div(&BigFloat::from_u64(den, wp), wp, RM);
            let mut c = x.cos(wp, RM, &mut cc);
            let mut s = x.sin(wp, RM, &mut cc);
            if flip {
                s = s.neg();
            }
            c.set_precision(p, RM).expect("valid precision");
            s.set_precision(p, RM).expect("valid precision");
            (BigReal::wrap(c, p), BigReal::wrap(s, p))
        })
    }

    fn to_f64(&self) -> f64 {
        let Some((words, _, sign, exp, _)) = self.value.as_raw_parts() else {
            return f64::NAN;
        };
        if self.value.is_zero() || words.is_empty() {
            return 0.0;
        }
        let top = *words.last().unwrap() as f64;
        let next = if words.len() > 1 {
            words[words.len() - 2] as f64
        } else {
            0.0
        };
        let e = exp;
        let magnitude = top * 2f64.powi(e - 64) + next * 2f64.powi(e - 128);
        match sign {
            Sign::Neg => -magnitude,
            Sign::Pos => magnitude,
        }
    }
}

/// Compensated (Kahan) sum in a fixed left-to-right order.
pub fn kahan_sum<R: Real>(terms: impl IntoIterator<Item = R>, prec: Precision) -> R {
    let mut sum = R::from_i64(0, prec);
    let mut comp = R::from_i64(0, prec);
    for term in terms {
        let y = term - comp.clone();
        let t = sum.clone() + y.clone();
        comp = (t.clone() - sum) - y;
        sum = t;
    }
    sum
}
