//! Exact real numbers of the form `m^(1/ℓ)` and `c · m^(e/ℓ)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `radicand^(1/index)`, stored so that the radicand is not a perfect `k`-th
/// power for any divisor `k > 1` of the index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootValue {
    radicand: BigUint,
    index: u32,
}

/// Exact `k`-th root of `m` when it exists.
fn exact_root(m: &BigUint, k: u32) -> Option<BigUint> {
    let r = m.nth_root(k);
    (r.pow(k) == *m).then_some(r)
}

impl RootValue {
    pub fn new(radicand: impl Into<BigUint>, index: u32) -> Result<Self> {
        let mut m: BigUint = radicand.into();
        if m.is_zero() || index == 0 {
            return Err(Error::Invalid("root needs positive radicand and index".into()));
        }
        let mut l = index;
        'outer: loop {
            for k in (2..=l).rev() {
                if l % k == 0 {
                    if let Some(r) = exact_root(&m, k) {
                        m = r;
                        l /= k;
                        continue 'outer;
                    }
                }
            }
            break;
        }
        if m.is_one() {
            l = 1;
        }
        Ok(RootValue { radicand: m, index: l })
    }

    pub fn integer(n: u64) -> Self {
        RootValue::new(n.max(1), 1).expect("positive")
    }

    pub fn one() -> Self {
        RootValue::integer(1)
    }

    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_one(&self) -> bool {
        self.radicand.is_one()
    }

    /// Whether the value is the integer `n`.
    pub fn is_integer(&self, n: u64) -> bool {
        self.index == 1 && self.radicand == BigUint::from(n)
    }

    pub fn pow(&self, n: u32) -> RootValue {
        RootValue::new(self.radicand.pow(n), self.index).expect("positive")
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    pub fn ln(&self) -> f64 {
        big_ln(&self.radicand) / self.index as f64
    }
}

pub(crate) fn big_ln(m: &BigUint) -> f64 {
    let bits = m.bits();
    if bits < 1000 {
        return m.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (m >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Ord for RootValue {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_roots(self, other)
    }
}

impl PartialOrd for RootValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^(1/{})", self.radicand, self.index)
    }
}

/// Compares `m1^(1/l1)` with `m2^(1/l2)` via `m1^l2` against `m2^l1`.
pub fn compare_roots(x: &RootValue, y: &RootValue) -> Ordering {
    x.radicand.pow(y.index).cmp(&y.radicand.pow(x.index))
}

/// `coeff · root^exponent` for a rational coefficient and integer exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub coeff: BigRational,
    pub root: RootValue,
    pub exponent: i64,
}

impl BoundValue {
    pub fn new(coeff: BigRational, root: RootValue, exponent: i64) -> Self {
        BoundValue {
            coeff,
            root,
            exponent,
        }
    }

    pub fn integer(n: u64) -> Self {
        BoundValue::new(BigRational::from_integer(n.into()), RootValue::one(), 0)
    }

    /// `root^(exponent/index)` with the fraction in lowest terms.
    fn reduced_power(&self) -> (i64, u32) {
        if self.root.is_one() || self.exponent == 0 {
            return (0, 1);
        }
        let l = self.root.index as i64;
        let g = self.exponent.gcd(&l);
        (self.exponent / g, (l / g) as u32)
    }

    /// The exact value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        let (e, q) = self.reduced_power();
        if q != 1 {
            return None;
        }
        let m = BigRational::from_integer(self.root.radicand.clone().into());
        let p = num_traits::pow::pow(m, e.unsigned_abs() as usize);
        Some(if e >= 0 {
            &self.coeff * p
        } else {
            &self.coeff / p
        })
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.numer().to_f64().unwrap_or(f64::NAN)
            / self.coeff.denom().to_f64().unwrap_or(f64::NAN);
        c * (self.root.ln() * self.exponent as f64).exp()
    }

    /// `self^n · A` and `other^n · B` as integers for a common exponent, so
    /// the comparison is exact.
    fn cross(&self, other: &BoundValue) -> (BigUint, BigUint) {
        let l1 = self.root.index;
        let l2 = other.root.index;
        let n = l1 * l2;
        let (mut left, mut right) = (
            self.coeff.numer().magnitude().pow(n) * other.coeff.denom().magnitude().pow(n),
            other.coeff.numer().magnitude().pow(n) * self.coeff.denom().magnitude().pow(n),
        );
        // root exponents scaled by n: self gives m1^(e1*l2), other m2^(e2*l1)
        let mut put = |m: &BigUint, e: i64, on_left: bool| {
            let p = m.pow(e.unsigned_abs() as u32);
            if (e >= 0) == on_left {
                left *= p;
            } else {
                right *= p;
            }
        };
        put(&self.root.radicand, self.exponent * l2 as i64, true);
        put(&other.root.radicand, other.exponent * l1 as i64, false);
        (left, right)
    }
}

impl PartialOrd for BoundValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoundValue {
    /// Exact comparison; coefficients are non-negative throughout.
    fn cmp(&self, other: &Self) -> Ordering {
        let (l, r) = self.cross(other);
        l.cmp(&r)
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let (e, q) = self.reduced_power();
        if !self.coeff.is_one() {
            write!(f, "{}*", self.coeff)?;
        }
        write!(f, "{}^({}/{})", self.root.radicand, e, q)
    }
}
