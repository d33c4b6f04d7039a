//! Additive and multiplicative characters of Q_p, Gauss sums, and GL(1)
//! ε-factors at the central point.
//!
//! The additive character ψ has conductor o (trivial on o, nontrivial on
//! p^{−1}o): ψ(x) = e^{2πi·{x}_p} with {x}_p the p-power fractional part.
//!
//! Unit-group characters are carried with exact root-of-unity value tables and
//! canonical data (minimal modulus = conductor, minimal order), so structural
//! equality is meaningful. Extended to F^× they are normalized by χ(ϖ) = 1;
//! a separate ϖ-value is threaded where a genuinely ramified-at-∞ extension is
//! needed (ε-factors of twists).
//!
//! Gauss sums are unit-averages against the probability measure on o^×:
//! G(x, χ) = ∫_{o^×} ψ(xu)χ(u) d^×u, evaluated exactly at the appropriate
//! finite level.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cyclo::{Cyclo, CycloError};
use crate::padic::{pi_pow, residue_mod, val, Val};
use crate::value::SqrtExt;

/// The standard additive character of conductor o.
///
/// Errors only if the required root-of-unity order p^k exceeds the cyclotomic
/// modulus cap (depth beyond any use in this crate).
pub fn psi(x: &BigRational, p: u64) -> Result<Cyclo, CycloError> {
    match val(x, p) {
        Val::Inf => Ok(Cyclo::one()),
        Val::Fin(v) if v >= 0 => Ok(Cyclo::one()),
        Val::Fin(v) => {
            let k = (-v) as u32;
            let pk_big = BigInt::from(p).pow(k);
            let pk = u64::try_from(&pk_big).map_err(|_| CycloError::ModulusOverflow {
                requested: 1 + Cyclo::MAX_MODULUS as u128,
                max: Cyclo::MAX_MODULUS,
            })?;
            // x = m/p^k + (integer part); the residue m determines ψ(x)
            let y = x * BigRational::from_integer(pk_big);
            let m = residue_mod(&y, p, k);
            Cyclo::root_of_unity(pk, m as i64)
        }
    }
}

/// A finite-order character of o^× (equivalently of some (Z/p^a)^×), stored
/// canonically: the table lives at the conductor modulus and the order is the
/// exact order, so derived equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitChar {
    p: u64,
    /// Conductor exponent a(χ): χ is trivial on U_{a(χ)} and on no larger U_m
    /// with smaller m; 0 means the trivial character.
    cond: u32,
    /// Exact order of the character.
    order: u64,
    /// χ(r) = ζ_order^{table[r]} for unit residues r ∈ [0, p^cond); `None` at
    /// non-unit indices. For the trivial character the table is `[Some(0)]`.
    table: Vec<Option<u64>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl UnitChar {
    /// The trivial character.
    pub fn trivial(p: u64) -> Self {
        UnitChar {
            p,
            cond: 0,
            order: 1,
            table: vec![Some(0)],
        }
    }

    /// Builds a character from a raw exponent table mod p^a with nominal order
    /// `raw_order`, then canonicalizes (true order, conductor-minimal table).
    ///
    /// `raw_table[r]` must be `Some(e)` exactly at unit residues r.
    pub fn from_raw(p: u64, a: u32, raw_order: u64, raw_table: Vec<Option<u64>>) -> Self {
        assert_eq!(raw_table.len() as u64, p.pow(a).max(1));
        // true order: divide out the common factor of all exponents
        let mut g = raw_order;
        for e in raw_table.iter().flatten() {
            g = gcd(g, *e);
            if g == 1 {
                break;
            }
        }
        let order = if g == 0 { 1 } else { raw_order / g };
        let reduce = |e: u64| if g == 0 { 0 } else { (e / g) % order.max(1) };
        // conductor: smallest c with χ trivial on U_c (all r ≡ 1 mod p^c ⇒ e = 0)
        let mut cond = a;
        'outer: while cond > 0 {
            let pc = p.pow(cond - 1);
            let pa = p.pow(a);
            let mut r = 1u64;
            while r < pa {
                if let Some(e) = raw_table[r as usize] {
                    if (r - 1) % pc == 0 && reduce(e) != 0 {
                        break 'outer;
                    }
                }
                r += 1;
            }
            cond -= 1;
        }
        // shrink the table to the conductor modulus
        let pc = p.pow(cond).max(1);
        let mut table = vec![None; pc as usize];
        let pa = p.pow(a).max(1);
        for r in 0..pa {
            if let Some(e) = raw_table[r as usize] {
                let idx = (r % pc) as usize;
                let v = reduce(e);
                match table[idx] {
                    None => table[idx] = Some(v),
                    Some(old) => assert_eq!(
                        old, v,
                        "table not constant on classes mod the claimed conductor"
                    ),
                }
            }
        }
        if cond == 0 {
            table = vec![Some(0)];
        }
        UnitChar {
            p,
            cond,
            order: order.max(1),
            table,
        }
    }

    /// The residue prime.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Conductor exponent a(χ).
    pub fn conductor(&self) -> u32 {
        self.cond
    }

    /// Exact order.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// True for the trivial character.
    pub fn is_trivial(&self) -> bool {
        self.cond == 0
    }

    /// χ at a unit residue (any integer representative coprime to p).
    pub fn eval_residue(&self, r: u64) -> Cyclo {
        let pc = self.p.pow(self.cond).max(1);
        let idx = (r % pc) as usize;
        let e = self.table[idx].expect("eval_residue at a non-unit residue");
        Cyclo::root_of_unity(self.order.max(1), e as i64)
            .expect("character order is within the modulus cap")
    }

    /// The exponent e with χ(r) = ζ_order^e at a unit residue.
    pub fn exponent_at(&self, r: u64) -> u64 {
        let pc = self.p.pow(self.cond).max(1);
        self.table[(r % pc) as usize]
            .expect("exponent_at at a non-unit residue")
    }

    /// χ̃(x) for x ∈ F^× under the χ(ϖ) = 1 normalization: evaluates χ at the
    /// unit part of x.
    pub fn eval(&self, x: &BigRational) -> Cyclo {
        let v = val(x, self.p).finite();
        let u = x * pi_pow(self.p, -v);
        let r = residue_mod(&u, self.p, self.cond.max(1));
        self.eval_residue(r)
    }

    /// χ(−1) ∈ {±1}.
    pub fn at_minus_one(&self) -> Cyclo {
        let pc = self.p.pow(self.cond).max(1);
        self.eval_residue(pc - 1)
    }

    /// Pointwise product of characters.
    pub fn mul(&self, other: &UnitChar) -> UnitChar {
        assert_eq!(self.p, other.p);
        let p = self.p;
        let a = self.cond.max(other.cond);
        let pa = p.pow(a).max(1);
        let l = lcm(self.order, other.order);
        let mut raw = vec![None; pa as usize];
        for r in 0..pa {
            if a > 0 && r % p == 0 {
                continue;
            }
            let e1 = self.exponent_at(r);
            let e2 = other.exponent_at(r);
            let e = (e1 * (l / self.order) + e2 * (l / other.order)) % l;
            raw[r as usize] = Some(e);
        }
        UnitChar::from_raw(p, a, l, raw)
    }

    /// The inverse (complex conjugate) character.
    pub fn inverse(&self) -> UnitChar {
        let raw = self
            .table
            .iter()
            .map(|e| e.map(|e| (self.order - e) % self.order))
            .collect();
        UnitChar::from_raw(self.p, self.cond, self.order, raw)
    }

    /// The square χ².
    pub fn square(&self) -> UnitChar {
        self.mul(self)
    }
}

/// All characters of o^× of conductor ≤ a_max, i.e. the dual of (Z/p^{a_max})^×.
///
/// For odd p the unit group is cyclic and a generator is found by search; for
/// p = 2 the {−1} × ⟨5⟩ presentation is used.
pub fn enumerate_unit_chars(p: u64, a_max: u32) -> Vec<UnitChar> {
    if a_max == 0 || (p == 2 && a_max == 1) {
        return vec![UnitChar::trivial(p)];
    }
    let pa = p.pow(a_max);
    let phi = pa / p * (p - 1);
    let mut out = Vec::new();
    if p != 2 {
        // cyclic of order φ(p^a): find a generator
        let g = (2..pa)
            .find(|&g| {
                g % p != 0 && {
                    let mut x = 1u64;
                    let mut ord = 0u64;
                    loop {
                        x = x * g % pa;
                        ord += 1;
                        if x == 1 {
                            break;
                        }
                    }
                    ord == phi
                }
            })
            .expect("(Z/p^a)^× is cyclic for odd p");
        // dlog table via powers of g
        let mut dlog = vec![None; pa as usize];
        let mut x = 1u64;
        for k in 0..phi {
            dlog[x as usize] = Some(k);
            x = x * g % pa;
        }
        for j in 0..phi {
            let raw = dlog
                .iter()
                .map(|d| d.map(|k| (j as u128 * k as u128 % phi as u128) as u64))
                .collect();
            out.push(UnitChar::from_raw(p, a_max, phi, raw));
        }
    } else {
        // (Z/2^a)^× = {±1} × ⟨5⟩ with |⟨5⟩| = 2^{a−2}
        let half = pa / 4; // order of 5
        let l = lcm(2, half.max(1));
        let mut dlog = vec![None; pa as usize]; // (s, t): r = (−1)^s·5^t
        for s in 0..2u64 {
            let mut x = if s == 0 { 1u64 } else { pa - 1 };
            for t in 0..half.max(1) {
                dlog[x as usize] = Some((s, t));
                x = x * 5 % pa;
            }
        }
        for eps in 0..2u64 {
            for j in 0..half.max(1) {
                let raw = dlog
                    .iter()
                    .map(|d| {
                        d.map(|(s, t)| {
                            (eps * s * (l / 2) + j * t * (l / half.max(1))) % l
                        })
                    })
                    .collect();
                out.push(UnitChar::from_raw(p, a_max, l, raw));
            }
        }
    }
    assert_eq!(out.len() as u64, phi, "character count must equal φ(p^a)");
    out
}

/// The normalized Gauss sum G(x, χ) = ∫_{o^×} ψ(xu)χ(u) d^×u (probability
/// measure on o^×), evaluated exactly.
pub fn gauss_sum(p: u64, x: &BigRational, chi: &UnitChar) -> Result<Cyclo, CycloError> {
    let depth = match val(x, p) {
        Val::Inf => 0,
        Val::Fin(v) => (-v).max(0) as u32,
    };
    let r = chi.conductor().max(depth).max(1);
    let pr = p.pow(r);
    let mut total = Cyclo::zero();
    let mut count = 0u64;
    for u in 0..pr {
        if u % p == 0 {
            continue;
        }
        count += 1;
        let term = &psi(&(x * BigRational::from_integer(BigInt::from(u))), p)?
            * &chi.eval_residue(u);
        total = &total + &term;
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(count));
    Ok(total.scale(&inv))
}

/// The GL(1) ε-factor at s = 1/2 for η = (unit part `chi`)·(unramified twist of
/// value `pi_val` at ϖ), against the conductor-o additive character:
///
/// ε(1/2, η, ψ) = η(ϖ)^{a} q^{a/2} (1 − q^{−1}) G(ϖ^{−a}, η^{−1}),  a = a(η) ≥ 1,
/// and ε = 1 for unramified η.
///
/// The convention is pinned by the Whittaker normalization W(1) = 1 and the
/// Atkin–Lehner identity downstream; the sanity law ε(η)·ε(η^{−1}) = η(−1)
/// holds exactly.
pub fn gl1_epsilon(
    p: u64,
    chi: &UnitChar,
    pi_val: &Cyclo,
) -> Result<SqrtExt, CycloError> {
    let a = chi.conductor();
    if a == 0 {
        return Ok(SqrtExt::one(p));
    }
    let g = gauss_sum(p, &pi_pow(p, -(a as i64)), &chi.inverse())?;
    let mut pi_pow_val = Cyclo::one();
    for _ in 0..a {
        pi_pow_val = &pi_pow_val * pi_val;
    }
    let one_minus = &Cyclo::one() - &Cyclo::from_rational(BigRational::new(
        BigInt::one(),
        BigInt::from(p),
    ));
    let scalar = &(&pi_pow_val * &one_minus) * &g;
    Ok(&SqrtExt::q_pow_half(p, a as i64) * &SqrtExt::from_cyclo(p, scalar))
}
