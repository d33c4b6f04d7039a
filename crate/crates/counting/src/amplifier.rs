//! The unramified Hecke convolution algebra and the amplifier coefficients.
//!
//! The symbols κ_ℓ (ℓ coprime to the level) multiply by
//! κ_m ∗ κ_n^* = Σ_{t | gcd(m,n)} ω(t)·ω(n)^{−1}·κ_{mn/t²},
//! with ω the central character extended completely multiplicatively.  The
//! amplifier is κ'_ur = Σ_r c_r κ_r with c_r = |λ(r)|/λ(r) supported on
//! r ∈ {ℓ, ℓ²: ℓ ∈ S}, S = {ℓ prime: (ℓ, N) = 1, Λ ≤ ℓ ≤ 2Λ}.  Its square
//! expands as Σ_l y_l κ_l with support confined to the four product shapes
//! {ℓ₁, ℓ₁ℓ₂, ℓ₁ℓ₂², ℓ₁²ℓ₂²} (ℓ₁ = ℓ₂ allowed) together with l = 1, all
//! l ≤ 16Λ⁴.
//!
//! The detection floor rests on the exact identity
//! λ(ℓ)² − λ(ℓ²) = ω(ℓ), |ω(ℓ)| = 1: writing λ(ℓ) = e^{iα}·2c with
//! ω(ℓ) = e^{2iα}, one gets |λ(ℓ)| + |λ(ℓ²)| = 2|c| + |4c² − 1| ≥ 1, so
//! λ'_ur = Σ_{ℓ∈S}(|λ(ℓ)| + |λ(ℓ²)|) ≥ |S|.
//!
//! All coefficient arithmetic is exact: values live in one cyclotomic ring
//! and the moduli |λ(r)| are exact rational square roots.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use supnorm_core::cyclo::{gcd_u64, Cyclo};
use supnorm_core::exponents::factorize;

/// Errors from amplifier construction.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplifierError {
    /// The prime set S needs λ-data at this prime.
    MissingLambda(u64),
    /// λ(ℓ)² − λ(ℓ²) is not of unit modulus.
    ConstraintViolated(u64),
    /// |λ(r)| is not an exact rational (input outside the supported shape).
    UnsupportedModulus(u64),
    /// A precondition on the inputs failed.
    BadParameter(String),
}

impl std::fmt::Display for AmplifierError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmplifierError::MissingLambda(l) => write!(f, "missing λ-input at prime {l}"),
            AmplifierError::ConstraintViolated(l) => {
                write!(f, "λ(ℓ)² − λ(ℓ²) not of unit modulus at ℓ = {l}")
            }
            AmplifierError::UnsupportedModulus(r) => {
                write!(f, "|λ({r})| is not an exact rational")
            }
            AmplifierError::BadParameter(s) => write!(f, "bad amplifier parameter: {s}"),
        }
    }
}

impl std::error::Error for AmplifierError {}

/// ω extended completely multiplicatively from values at primes.
fn omega_at(omega: &BTreeMap<u64, Cyclo>, k: u64) -> Cyclo {
    let mut out = Cyclo::one();
    for (p, e) in factorize(k) {
        let v = omega
            .get(&p)
            .unwrap_or_else(|| panic!("central character value at prime {p} required"));
        for _ in 0..e {
            out = &out * v;
        }
    }
    out
}

/// Exact expansion of κ_m ∗ κ_n^* as a coefficient map l ↦ coefficient.
///
/// ω holds unit-modulus central-character values at the needed primes; its
/// inverse is taken by complex conjugation.
pub fn hecke_convolution_expand(
    m: u64,
    n: u64,
    omega: &BTreeMap<u64, Cyclo>,
) -> BTreeMap<u64, Cyclo> {
    assert!(m >= 1 && n >= 1, "Hecke indices must be positive");
    let omega_n_inv = omega_at(omega, n).conj();
    let g = gcd_u64(m, n);
    let mut out: BTreeMap<u64, Cyclo> = BTreeMap::new();
    let mut t = 1u64;
    while t <= g {
        if g % t == 0 {
            let idx = (m / t) * (n / t);
            let coeff = &omega_at(omega, t) * &omega_n_inv;
            let entry = out.entry(idx).or_insert_with(Cyclo::zero);
            *entry = &*entry + &coeff;
        }
        t += 1;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// λ-data at a prime ℓ: the eigenvalues λ(ℓ) and λ(ℓ²) as exact cyclotomic
/// numbers (root-of-unity phase times a rational modulus).
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaInput {
    /// λ(ℓ).
    pub lambda: Cyclo,
    /// λ(ℓ²).
    pub lambda_sq: Cyclo,
}

/// Exact square root of a non-negative rational, when it exists.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// |v| as an exact rational, when v has rational norm-square with rational
/// square root.
fn exact_modulus(v: &Cyclo) -> Option<BigRational> {
    let nsq = v.norm_sq().as_rational()?;
    rational_sqrt(&nsq)
}

/// The amplifier data: prime set, linear coefficients, squared coefficients.
#[derive(Debug, Clone)]
pub struct AmplifierCoefficients {
    /// The amplifier length parameter Λ ≥ 1.
    pub lambda_big: f64,
    /// S = primes in [Λ, 2Λ] coprime to the level.
    pub s_primes: Vec<u64>,
    /// c_r = |λ(r)|/λ(r) on r ∈ {ℓ, ℓ²}, omitted where λ(r) = 0.
    pub c: BTreeMap<u64, Cyclo>,
    /// y_l: coefficients of the squared amplifier Σ_l y_l κ_l.
    pub y: BTreeMap<u64, Cyclo>,
    /// The certified detection value λ'_ur = Σ_ℓ(|λ(ℓ)| + |λ(ℓ²)|) ≥ |S|.
    pub lambda_ur: BigRational,
}

/// Whether l is of one of the admitted support shapes over the prime set s:
/// 1, ℓ₁, ℓ₁ℓ₂, ℓ₁ℓ₂², or ℓ₁²ℓ₂² with ℓᵢ ∈ s (equal primes allowed, which
/// folds in ℓ², ℓ³, ℓ⁴).
pub fn admitted_support_shape(l: u64, s: &[u64]) -> bool {
    let fac = factorize(l);
    if fac.iter().any(|(p, _)| !s.contains(p)) {
        return false;
    }
    let exps: Vec<u32> = fac.iter().map(|&(_, e)| e).collect();
    match exps.as_slice() {
        [] => true,
        [e] => *e <= 4,
        [e1, e2] => *e1 <= 2 && *e2 <= 2,
        _ => false,
    }
}

/// Builds the amplifier from Λ, the level N, and λ-data at the primes of S.
pub fn build_amplifier(
    lambda_big: f64,
    n_level: u64,
    inputs: &BTreeMap<u64, LambdaInput>,
) -> Result<AmplifierCoefficients, AmplifierError> {
    if !(lambda_big >= 1.0) || !lambda_big.is_finite() {
        return Err(AmplifierError::BadParameter(format!(
            "Λ = {lambda_big} must be ≥ 1"
        )));
    }
    if n_level == 0 {
        return Err(AmplifierError::BadParameter("N must be positive".into()));
    }
    let lo = lambda_big.ceil() as u64;
    let hi = (2.0 * lambda_big).floor() as u64;
    let s_primes: Vec<u64> = (lo.max(2)..=hi)
        .filter(|&p| factorize(p).len() == 1 && factorize(p)[0].1 == 1)
        .filter(|&p| gcd_u64(p, n_level) == 1)
        .collect();

    let mut omega: BTreeMap<u64, Cyclo> = BTreeMap::new();
    let mut c: BTreeMap<u64, Cyclo> = BTreeMap::new();
    let mut lambda_ur = BigRational::zero();
    for &ell in &s_primes {
        let data = inputs
            .get(&ell)
            .ok_or(AmplifierError::MissingLambda(ell))?;
        let w = &(&data.lambda * &data.lambda) - &data.lambda_sq;
        let unit = w
            .norm_sq()
            .as_rational()
            .map(|r| r == BigRational::one())
            .unwrap_or(false);
        if !unit {
            return Err(AmplifierError::ConstraintViolated(ell));
        }
        omega.insert(ell, w);
        for (r, lam) in [(ell, &data.lambda), (ell * ell, &data.lambda_sq)] {
            let modulus = exact_modulus(lam).ok_or(AmplifierError::UnsupportedModulus(r))?;
            lambda_ur += &modulus;
            if !lam.is_zero() {
                let inv_mod = BigRational::one() / modulus;
                c.insert(r, lam.conj().scale(&inv_mod));
            }
        }
    }

    // squared amplifier: Σ_{r,r'} c_r·conj(c_{r'})·(κ_r ∗ κ_{r'}^*)
    let mut y: BTreeMap<u64, Cyclo> = BTreeMap::new();
    for (&r, cr) in &c {
        for (&rp, crp) in &c {
            let weight = cr * &crp.conj();
            for (l, coeff) in hecke_convolution_expand(r, rp, &omega) {
                let entry = y.entry(l).or_insert_with(Cyclo::zero);
                *entry = &*entry + &(&weight * &coeff);
            }
        }
    }
    y.retain(|_, v| !v.is_zero());

    Ok(AmplifierCoefficients {
        lambda_big,
        s_primes,
        c,
        y,
        lambda_ur,
    })
}

impl AmplifierCoefficients {
    /// Support bound for the squared coefficients: every l ≤ 16Λ⁴ and of an
    /// admitted shape.
    pub fn support_in_bounds(&self) -> bool {
        let cap = 16.0 * self.lambda_big.powi(4);
        self.y
            .keys()
            .all(|&l| (l as f64) <= cap && admitted_support_shape(l, &self.s_primes))
    }

    /// The certified floor: λ'_ur ≥ |S| exactly.
    pub fn detection_floor_certified(&self) -> bool {
        self.lambda_ur >= BigRational::from_integer(BigInt::from(self.s_primes.len() as i64))
    }
}

/// Synthetic eigenvalue data satisfying the exact constraint
/// λ(ℓ)² − λ(ℓ²) = ω(ℓ): draws λ(ℓ) = ζ·2c with ζ a 24th root of unity and
/// c = k/10⁶ rational in [−1, 1], then sets λ(ℓ²) = λ(ℓ)² − ζ².
pub fn sample_sato_tate(
    rng: &mut impl Rng,
    primes: &[u64],
) -> BTreeMap<u64, LambdaInput> {
    let mut out = BTreeMap::new();
    for &ell in primes {
        let j = rng.gen_range(0..24u64) as i64;
        let k: i64 = rng.gen_range(-1_000_000i64..=1_000_000);
        let zeta = Cyclo::root_of_unity(24, j).expect("24th root of unity");
        let two_c = BigRational::new(BigInt::from(2 * k), BigInt::from(1_000_000));
        let lambda = zeta.scale(&two_c);
        let omega = &zeta * &zeta;
        let lambda_sq = &(&lambda * &lambda) - &omega;
        out.insert(
            ell,
            LambdaInput {
                lambda,
                lambda_sq,
            },
        );
    }
    out
}
