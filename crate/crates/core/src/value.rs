//! The exact value ring Q(ζ_M)[S] with S² = q.
//!
//! Local Whittaker values, Gauss sums and ε-factors live in a cyclotomic field
//! extended by the square root of the residue field size q (half-integral
//! powers q^{k/2} appear throughout). Values are kept as pairs a + b·S with
//! a, b ∈ Q(ζ_M); S is treated as the positive square root under the complex
//! embedding, and is fixed by conjugation.
//!
//! When √q happens to lie in Q(ζ_M) already (e.g. q = 2 alongside ζ_8) the pair
//! ring has zero divisors; every identity verified here is symmetric under
//! S ↦ −S, so computing in the pair ring is sound, and division reports failure
//! (`None`) exactly on zero divisors instead of silently picking a branch.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;


use crate::cyclo::Cyclo;

/// An exact value a + b·√q with a, b cyclotomic.
#[derive(Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SqrtExt {
    q: u64,
    a: Cyclo,
    b: Cyclo,
}

impl SqrtExt {
    /// Zero in the ring attached to q.
    pub fn zero(q: u64) -> Self {
        SqrtExt {
            q,
            a: Cyclo::zero(),
            b: Cyclo::zero(),
        }
    }

    /// One in the ring attached to q.
    pub fn one(q: u64) -> Self {
        SqrtExt {
            q,
            a: Cyclo::one(),
            b: Cyclo::zero(),
        }
    }

    /// Embeds a cyclotomic value.
    pub fn from_cyclo(q: u64, a: Cyclo) -> Self {
        SqrtExt {
            q,
            a,
            b: Cyclo::zero(),
        }
    }

    /// Embeds an exact rational.
    pub fn from_rational(q: u64, r: BigRational) -> Self {
        Self::from_cyclo(q, Cyclo::from_rational(r))
    }

    /// Embeds an integer.
    pub fn from_integer(q: u64, n: i64) -> Self {
        Self::from_cyclo(q, Cyclo::from_integer(n))
    }

    /// The generator S = √q.
    pub fn sqrt_q(q: u64) -> Self {
        SqrtExt {
            q,
            a: Cyclo::zero(),
            b: Cyclo::one(),
        }
    }

    /// The exact half-integral power q^{k/2} (k may be negative).
    pub fn q_pow_half(q: u64, k: i64) -> Self {
        assert!(q >= 2, "residue field size must be at least 2");
        let rat_pow = |j: i64| -> BigRational {
            let base = BigInt::from(q);
            if j >= 0 {
                BigRational::from_integer(base.pow(j as u32))
            } else {
                BigRational::new(BigInt::from(1), base.pow((-j) as u32))
            }
        };
        if k % 2 == 0 {
            Self::from_rational(q, rat_pow(k / 2))
        } else {
            // S^k = q^{(k−1)/2}·S, valid for negative odd k as well
            let j = (k - 1) / 2;
            SqrtExt {
                q,
                a: Cyclo::zero(),
                b: Cyclo::from_rational(rat_pow(j)),
            }
        }
    }

    /// The residue field size the ring is attached to.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The component pair (a, b) with value a + b√q.
    pub fn components(&self) -> (&Cyclo, &Cyclo) {
        (&self.a, &self.b)
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Complex conjugation (conjugates both components; S is real positive).
    pub fn conj(&self) -> Self {
        SqrtExt {
            q: self.q,
            a: self.a.conj(),
            b: self.b.conj(),
        }
    }

    /// The exact squared modulus x·x̄.
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Multiplies by a cyclotomic scalar.
    pub fn mul_cyclo(&self, c: &Cyclo) -> Self {
        SqrtExt {
            q: self.q,
            a: &self.a * c,
            b: &self.b * c,
        }
    }

    /// Multiplies by an exact rational scalar.
    pub fn scale(&self, r: &BigRational) -> Self {
        SqrtExt {
            q: self.q,
            a: self.a.scale(r),
            b: self.b.scale(r),
        }
    }

    /// Multiplicative inverse; `None` for zero and for zero divisors.
    pub fn try_invert(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (a + bS)(a − bS) = a² − q·b²
        let qc = Cyclo::from_integer(self.q as i64);
        let disc = &(&self.a * &self.a) - &(&qc * &(&self.b * &self.b));
        let dinv = disc.try_invert()?;
        Some(SqrtExt {
            q: self.q,
            a: &self.a * &dinv,
            b: &(-&self.b) * &dinv,
        })
    }

    /// Integer power (negative powers require invertibility).
    pub fn powi(&self, n: i64) -> Self {
        let mut base = if n < 0 {
            self.try_invert()
                .expect("negative power of a non-invertible value")
        } else {
            self.clone()
        };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one(self.q);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Numerical embedding with S ↦ +√q.
    pub fn to_complex(&self) -> Complex64 {
        self.a.to_complex() + (self.q as f64).sqrt() * self.b.to_complex()
    }

    /// |x| under the complex embedding (numerical).
    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Returns the value as a rational if both components allow it (b = 0).
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.b.is_zero() {
            return None;
        }
        self.a.as_rational()
    }

    /// Sums an iterator of values attached to the same q.
    pub fn sum<I: IntoIterator<Item = SqrtExt>>(q: u64, iter: I) -> SqrtExt {
        iter.into_iter().fold(SqrtExt::zero(q), |acc, x| &acc + &x)
    }
}

impl std::ops::Add for &SqrtExt {
    type Output = SqrtExt;
    fn add(self, rhs: &SqrtExt) -> SqrtExt {
        assert_eq!(self.q, rhs.q, "mixed residue field sizes");
        SqrtExt {
            q: self.q,
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl std::ops::Sub for &SqrtExt {
    type Output = SqrtExt;
    fn sub(self, rhs: &SqrtExt) -> SqrtExt {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &SqrtExt {
    type Output = SqrtExt;
    fn neg(self) -> SqrtExt {
        SqrtExt {
            q: self.q,
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl std::ops::Mul for &SqrtExt {
    type Output = SqrtExt;
    fn mul(self, rhs: &SqrtExt) -> SqrtExt {
        assert_eq!(self.q, rhs.q, "mixed residue field sizes");
        let qc = Cyclo::from_integer(self.q as i64);
        SqrtExt {
            q: self.q,
            a: &(&self.a * &rhs.a) + &(&qc * &(&self.b * &rhs.b)),
            b: &(&self.a * &rhs.b) + &(&self.b * &rhs.a),
        }
    }
}

macro_rules! forward_value_ops {
    ($($tr:ident, $method:ident);*) => {$(
        impl std::ops::$tr for SqrtExt {
            type Output = SqrtExt;
            fn $method(self, rhs: SqrtExt) -> SqrtExt {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_value_ops!(Add, add; Sub, sub; Mul, mul);

impl std::ops::Neg for SqrtExt {
    type Output = SqrtExt;
    fn neg(self) -> SqrtExt {
        -&self
    }
}

impl fmt::Debug for SqrtExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SqrtExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})·√{}", self.b, self.q)
        } else {
            write!(f, "{} + ({})·√{}", self.a, self.b, self.q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_to_q() {
        for q in [2u64, 3, 5, 7] {
            let s = SqrtExt::sqrt_q(q);
            assert_eq!(&s * &s, SqrtExt::from_integer(q, q as i64));
        }
    }

    #[test]
    fn half_powers_multiply() {
        let q = 3;
        for j in -4i64..=4 {
            for k in -4i64..=4 {
                let lhs = &SqrtExt::q_pow_half(q, j) * &SqrtExt::q_pow_half(q, k);
                assert_eq!(lhs, SqrtExt::q_pow_half(q, j + k), "j={j} k={k}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let q = 5;
        let x = &SqrtExt::from_cyclo(q, Cyclo::root_of_unity(8, 3).unwrap())
            + &SqrtExt::q_pow_half(q, -1);
        let inv = x.try_invert().expect("invertible");
        assert_eq!(&x * &inv, SqrtExt::one(q));
    }

    #[test]
    fn degenerate_sqrt_in_field_is_zero_divisor() {
        // √5 ∈ Q(ζ5): the quadratic Gauss sum g satisfies g² = 5, so S − g is a
        // zero divisor and must not be invertible.
        let g = Cyclo::sum((0..5).map(|t| Cyclo::root_of_unity(5, (t * t) as i64).unwrap()));
        let x = &SqrtExt::sqrt_q(5) - &SqrtExt::from_cyclo(5, g);
        assert!(!x.is_zero());
        assert!(x.try_invert().is_none());
    }

    #[test]
    fn conjugation_fixes_s() {
        let x = &SqrtExt::from_cyclo(3, Cyclo::root_of_unity(9, 2).unwrap())
            * &SqrtExt::sqrt_q(3);
        let y = x.conj();
        let (a, b) = y.components();
        assert!(a.is_zero());
        assert_eq!(*b, Cyclo::root_of_unity(9, 2).unwrap().conj());
    }

    #[test]
    fn numeric_embedding_matches() {
        let q = 2;
        let x = &SqrtExt::one(q) + &SqrtExt::q_pow_half(q, 1);
        assert!((x.to_complex().re - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }
}
