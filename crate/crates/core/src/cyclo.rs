//! Exact arithmetic in cyclotomic fields Q(ζ_M).
//!
//! Values are sparse rational combinations of roots of unity ζ_M^e, kept in a
//! canonical basis so that equality and zero-testing are exact. The canonical
//! basis is the tensor basis over the prime-power factors of M: writing
//! M = ∏ pᵢ^{kᵢ}, a monomial ζ_M^e corresponds via CRT to ∏ ζ_{pᵢ^{kᵢ}}^{cᵢ},
//! and the basis consists of those monomials with every coordinate
//! cᵢ < φ(pᵢ^{kᵢ}). Out-of-range coordinates are rewritten with the relation
//! ζ^{(p−1)p^{k−1}} = −(1 + ζ^{p^{k−1}} + ⋯ + ζ^{(p−2)p^{k−1}}), which lands in
//! range after a single step.
//!
//! Moduli are promoted lazily (lcm) when values of different conductors meet,
//! and capped at [`Cyclo::MAX_MODULUS`] with an explicit error instead of a
//! silent wrap: the intended users are additive characters of bounded depth and
//! finite-order multiplicative characters, for which the lcm stays small.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Errors from cyclotomic constructors and modulus management.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycloError {
    /// A requested root-of-unity order (or an lcm of orders) exceeded the cap.
    #[error("cyclotomic modulus {requested} exceeds the supported maximum {max}")]
    ModulusOverflow {
        /// The modulus that was asked for.
        requested: u128,
        /// The configured cap.
        max: u64,
    },
    /// Zero is not a valid root-of-unity order.
    #[error("cyclotomic modulus must be positive")]
    ModulusZero,
    /// A Galois automorphism index must be invertible mod the modulus.
    #[error("galois index {a} is not coprime to the modulus {modulus}")]
    NotCoprime {
        /// The requested automorphism index.
        a: u64,
        /// The modulus of the value.
        modulus: u64,
    },
}

/// Per-prime-power data for a modulus M, used for CRT coordinates.
#[derive(Debug, Clone)]
struct PrimePower {
    /// The prime p.
    p: u64,
    /// p^k, the full power dividing M.
    pk: u64,
    /// φ(p^k) = p^{k−1}(p−1).
    phi: u64,
    /// M / p^k.
    cofactor: u64,
    /// (M / p^k)^{−1} mod p^k.
    inv_cofactor: u64,
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; m ≥ 1, gcd(a, m) = 1 assumed
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "mod_inverse called with non-coprime arguments");
    t0.rem_euclid(m as i128) as u64
}

fn prime_power_data(m: u64) -> Vec<PrimePower> {
    let mut factors = Vec::new();
    let mut rem = m;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            let mut pk = 1u64;
            while rem % p == 0 {
                rem /= p;
                pk *= p;
            }
            factors.push((p, pk));
        }
        p += 1;
    }
    if rem > 1 {
        factors.push((rem, rem));
    }
    factors
        .into_iter()
        .map(|(p, pk)| {
            let cofactor = m / pk;
            PrimePower {
                p,
                pk,
                phi: pk / p * (p - 1),
                cofactor,
                inv_cofactor: mod_inverse(cofactor, pk),
            }
        })
        .collect()
}

/// Greatest common divisor.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An exact element of Q(ζ_M) for some modulus M.
///
/// The representation is canonical: two values are equal iff, after promoting
/// to a common modulus, their coefficient maps agree. In particular
/// [`Cyclo::is_zero`] is an exact test.
#[derive(Clone)]
pub struct Cyclo {
    modulus: u64,
    /// exponent → coefficient; exponents canonical, coefficients nonzero
    coeffs: BTreeMap<u64, BigRational>,
}

impl Cyclo {
    /// Largest supported root-of-unity order. Exceeding it is an error, never a wrap.
    pub const MAX_MODULUS: u64 = 10_000_000;

    /// The zero element (carried at modulus 1).
    pub fn zero() -> Self {
        Cyclo {
            modulus: 1,
            coeffs: BTreeMap::new(),
        }
    }

    /// The unit element.
    pub fn one() -> Self {
        Cyclo::from_integer(1)
    }

    /// Embeds an exact rational.
    pub fn from_rational(r: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !r.is_zero() {
            coeffs.insert(0u64, r);
        }
        Cyclo { modulus: 1, coeffs }
    }

    /// Embeds an integer.
    pub fn from_integer(n: i64) -> Self {
        Cyclo::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// The root of unity ζ_m^e (e may be negative; it is reduced mod m).
    pub fn root_of_unity(m: u64, e: i64) -> Result<Self, CycloError> {
        if m == 0 {
            return Err(CycloError::ModulusZero);
        }
        if m > Self::MAX_MODULUS {
            return Err(CycloError::ModulusOverflow {
                requested: m as u128,
                max: Self::MAX_MODULUS,
            });
        }
        let e = (e.rem_euclid(m as i64)) as u64;
        let data = prime_power_data(m);
        let mut coeffs = BTreeMap::new();
        push_reduced(&mut coeffs, m, &data, e, BigRational::one());
        prune(&mut coeffs);
        Ok(Cyclo { modulus: m, coeffs })
    }

    /// The modulus M the value is currently carried at (always a legal order).
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Exact zero test.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Returns the value as a rational if it lies in Q.
    ///
    /// Because the representation is canonical, a value is rational iff its
    /// only monomial is ζ^0.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.is_empty() {
            return Some(BigRational::zero());
        }
        if self.coeffs.len() == 1 {
            if let Some(c) = self.coeffs.get(&0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// True if the value is an exact rational integer or ratio (element of Q).
    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Applies the Galois automorphism ζ ↦ ζ^a, for a coprime to the modulus.
    pub fn galois(&self, a: u64) -> Result<Self, CycloError> {
        let m = self.modulus;
        if gcd_u64(a % m, m) != 1 && m > 1 {
            return Err(CycloError::NotCoprime { a, modulus: m });
        }
        let data = prime_power_data(m);
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let enew = ((*e as u128 * a as u128) % m as u128) as u64;
            push_reduced(&mut coeffs, m, &data, enew, c.clone());
        }
        prune(&mut coeffs);
        Ok(Cyclo {
            modulus: m,
            coeffs,
        })
    }

    /// Complex conjugation (ζ ↦ ζ^{−1}).
    pub fn conj(&self) -> Self {
        if self.modulus == 1 {
            return self.clone();
        }
        self.galois(self.modulus - 1)
            .expect("m−1 is always coprime to m")
    }

    /// Multiplies by an exact rational scalar.
    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Cyclo::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c * r))
            .collect();
        Cyclo {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Numerical embedding with ζ_M = exp(2πi/M).
    pub fn to_complex(&self) -> Complex64 {
        let m = self.modulus as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.coeffs {
            let theta = 2.0 * std::f64::consts::PI * (*e as f64) / m;
            let cf = c.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::from_polar(cf, theta);
        }
        acc
    }

    /// Multiplicative inverse, if the value is invertible.
    ///
    /// Computed by the norm trick: 1/x = (∏_{σ≠1} σ(x)) / N(x) with the norm
    /// N(x) = ∏_σ σ(x) a rational number. Returns `None` exactly when x = 0.
    pub fn try_invert(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Cyclo::from_rational(r.recip()));
        }
        let m = self.modulus;
        let mut partial = Cyclo::one();
        for a in 2..m {
            if gcd_u64(a, m) == 1 {
                partial = &partial * &self.galois(a).expect("coprime by construction");
            }
        }
        let norm = (self * &partial)
            .as_rational()
            .expect("field norm of a cyclotomic number is rational");
        debug_assert!(!norm.is_zero(), "nonzero element has nonzero norm");
        Some(partial.scale(&norm.recip()))
    }

    /// Promotes the value to a larger modulus `l` (which must be a multiple).
    fn promote(&self, l: u64) -> Self {
        if l == self.modulus {
            return self.clone();
        }
        debug_assert_eq!(l % self.modulus, 0, "promotion target must be a multiple");
        let k = l / self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(e, c)| (e * k, c.clone()))
            .collect();
        // promotion multiplies every CRT coordinate by the p-part of k, which
        // preserves the canonical range — no re-reduction needed
        Cyclo { modulus: l, coeffs }
    }

    /// Checked lcm of two moduli against the cap.
    pub fn lcm_modulus(a: u64, b: u64) -> Result<u64, CycloError> {
        let g = gcd_u64(a, b);
        let l = (a as u128 / g as u128) * b as u128;
        if l > Self::MAX_MODULUS as u128 {
            Err(CycloError::ModulusOverflow {
                requested: l,
                max: Self::MAX_MODULUS,
            })
        } else {
            Ok(l as u64)
        }
    }

    fn common(&self, other: &Cyclo) -> (Cyclo, Cyclo) {
        let l = Self::lcm_modulus(self.modulus, other.modulus)
            .expect("modulus overflow in ring operation (cap exceeded)");
        (self.promote(l), other.promote(l))
    }

    /// Sums an iterator of values.
    pub fn sum<I: IntoIterator<Item = Cyclo>>(iter: I) -> Cyclo {
        iter.into_iter().fold(Cyclo::zero(), |acc, x| &acc + &x)
    }

    /// The squared absolute value x·x̄ (an exact, totally real value).
    pub fn norm_sq(&self) -> Cyclo {
        self * &self.conj()
    }

    /// Iterates over (exponent, coefficient) pairs of the canonical form.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// The multiplicative order of this value, when it is a root of unity of
    /// order at most `cap`; `None` otherwise.
    pub fn root_order(&self, cap: u64) -> Option<u64> {
        let one = Cyclo::one();
        let mut acc = self.clone();
        for ord in 1..=cap {
            if acc == one {
                return Some(ord);
            }
            acc = &acc * self;
        }
        None
    }

    /// The exponent e with self = ζ_l^e, for a value known to lie in ⟨ζ_l⟩.
    pub fn root_exponent(&self, l: u64) -> Option<u64> {
        let zeta = Cyclo::root_of_unity(l.max(1), 1).ok()?;
        let mut acc = Cyclo::one();
        for e in 0..l.max(1) {
            if acc == *self {
                return Some(e);
            }
            acc = &acc * &zeta;
        }
        None
    }

    /// A square root of a root of unity: for self = ζ_l^e (l its order), the
    /// canonical choice ζ_{2l}^e.
    pub fn sqrt_root_of_unity(&self) -> Option<Cyclo> {
        let l = self.root_order(1 << 20)?;
        let e = self.root_exponent(l)?;
        Cyclo::root_of_unity(2 * l, e as i64).ok()
    }
}

fn prune(coeffs: &mut BTreeMap<u64, BigRational>) {
    coeffs.retain(|_, c| !c.is_zero());
}

/// Adds coeff·ζ_m^e to `out` after rewriting into the canonical basis.
fn push_reduced(
    out: &mut BTreeMap<u64, BigRational>,
    m: u64,
    data: &[PrimePower],
    e: u64,
    coeff: BigRational,
) {
    let mut terms: Vec<(u64, BigRational)> = vec![(e, coeff)];
    for pp in data {
        let mut next = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            let ci = ((e % pp.pk) as u128 * pp.inv_cofactor as u128 % pp.pk as u128) as u64;
            if ci < pp.phi {
                next.push((e, c));
            } else {
                // ζ^{φ+d} = −Σ_{t=0}^{p−2} ζ^{d + t·p^{k−1}} within this coordinate
                let d = ci - pp.phi;
                let step = pp.pk / pp.p;
                for t in 0..(pp.p - 1) {
                    let cnew = d + t * step;
                    let delta = (cnew + pp.pk - ci) % pp.pk;
                    let enew =
                        ((e as u128 + delta as u128 * pp.cofactor as u128) % m as u128) as u64;
                    next.push((enew, -c.clone()));
                }
            }
        }
        terms = next;
    }
    for (e, c) in terms {
        let entry = out.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.modulus == other.modulus {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclo {}

impl std::ops::Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let (mut a, b) = self.common(rhs);
        for (e, c) in b.coeffs {
            let entry = a.coeffs.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
        }
        prune(&mut a.coeffs);
        a
    }
}

impl std::ops::Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        let coeffs = self.coeffs.iter().map(|(e, c)| (*e, -c)).collect();
        Cyclo {
            modulus: self.modulus,
            coeffs,
        }
    }
}

impl std::ops::Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        if self.is_zero() || rhs.is_zero() {
            return Cyclo::zero();
        }
        let (a, b) = self.common(rhs);
        let m = a.modulus;
        let data = prime_power_data(m);
        let mut coeffs = BTreeMap::new();
        for (e1, c1) in &a.coeffs {
            for (e2, c2) in &b.coeffs {
                let e = ((*e1 as u128 + *e2 as u128) % m as u128) as u64;
                push_reduced(&mut coeffs, m, &data, e, c1 * c2);
            }
        }
        prune(&mut coeffs);
        Cyclo { modulus: m, coeffs }
    }
}

macro_rules! forward_value_ops {
    ($($tr:ident, $method:ident);*) => {$(
        impl std::ops::$tr for Cyclo {
            type Output = Cyclo;
            fn $method(self, rhs: Cyclo) -> Cyclo {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_value_ops!(Add, add; Sub, sub; Mul, mul);

impl std::ops::Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "ζ{}^{}", self.modulus, e)?;
            } else {
                write!(f, "({c})·ζ{}^{}", self.modulus, e)?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<(u64, String, String)> = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c.numer().to_string(), c.denom().to_string()))
            .collect();
        let mut st = s.serialize_struct("Cyclo", 2)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for Cyclo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            modulus: u64,
            terms: Vec<(u64, String, String)>,
        }
        let raw = Raw::deserialize(d)?;
        let mut acc = Cyclo::zero();
        for (e, num, den) in raw.terms {
            let n: BigInt = num.parse().map_err(serde::de::Error::custom)?;
            let dn: BigInt = den.parse().map_err(serde::de::Error::custom)?;
            if dn.is_zero() {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            let root = Cyclo::root_of_unity(raw.modulus, e as i64)
                .map_err(serde::de::Error::custom)?;
            acc = &acc + &root.scale(&BigRational::new(n, dn));
        }
        Ok(acc)
    }
}
