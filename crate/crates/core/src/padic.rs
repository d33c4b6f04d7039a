//! Exact p-adic linear algebra over Q ⊂ Q_p.
//!
//! Group elements are 2×2 matrices with exact rational entries; all the
//! decompositions used downstream (Iwasawa, and the ZN·a(ϖ^t)wn(ϖ^{−l}v)·K₁
//! coset position for the congruence subgroup K₁(p^n)) are certified by exact
//! re-multiplication of the produced witness factors.
//!
//! Conventions: w = [0,1;−1,0], n(x) = [1,x;0,1], a(y) = diag(y,1),
//! z(u) = u·Id, K₁(p^n) = {g ∈ GL₂(o) : a−1 ∈ p^n, c ∈ p^n} (b and d free in o).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A p-adic valuation: finite or +∞ (the valuation of 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    /// v_p(x) for x ≠ 0.
    Fin(i64),
    /// v_p(0) = +∞.
    Inf,
}

impl Val {
    /// True if the valuation is ≥ k.
    pub fn at_least(self, k: i64) -> bool {
        match self {
            Val::Fin(v) => v >= k,
            Val::Inf => true,
        }
    }

    /// The finite value, panicking on ∞.
    pub fn finite(self) -> i64 {
        match self {
            Val::Fin(v) => v,
            Val::Inf => panic!("expected a finite valuation"),
        }
    }

    /// Minimum of two valuations.
    pub fn min(self, other: Val) -> Val {
        match (self, other) {
            (Val::Inf, v) | (v, Val::Inf) => v,
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a.min(b)),
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Val) -> Option<std::cmp::Ordering> {
        let key = |v: &Val| match v {
            Val::Fin(x) => (*x, 0i8),
            Val::Inf => (i64::MAX, 1),
        };
        Some(key(self).cmp(&key(other)))
    }
}

fn int_val(n: &BigInt, p: u64) -> Val {
    if n.is_zero() {
        return Val::Inf;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = n.div_rem(&p);
        if r.is_zero() {
            v += 1;
            n = q;
        } else {
            return Val::Fin(v);
        }
    }
}

/// The p-adic valuation of an exact rational.
pub fn val(x: &BigRational, p: u64) -> Val {
    if x.is_zero() {
        return Val::Inf;
    }
    match (int_val(x.numer(), p), int_val(x.denom(), p)) {
        (Val::Fin(a), Val::Fin(b)) => Val::Fin(a - b),
        _ => unreachable!("nonzero rational has finite valuations"),
    }
}

/// Is x a p-adic integer (element of o)?
pub fn is_integral(x: &BigRational, p: u64) -> bool {
    val(x, p).at_least(0)
}

/// Is x a p-adic unit (element of o^×)?
pub fn is_unit(x: &BigRational, p: u64) -> bool {
    val(x, p) == Val::Fin(0)
}

/// ϖ^k = p^k as an exact rational (k may be negative).
pub fn pi_pow(p: u64, k: i64) -> BigRational {
    let base = BigInt::from(p);
    if k >= 0 {
        BigRational::from_integer(base.pow(k as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-k) as u32))
    }
}

/// Convenience rational constructor.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An exact 2×2 rational matrix [a, b; c, d].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    /// Top-left entry.
    pub a: BigRational,
    /// Top-right entry.
    pub b: BigRational,
    /// Bottom-left entry.
    pub c: BigRational,
    /// Bottom-right entry.
    pub d: BigRational,
}

impl Mat2 {
    /// Builds a matrix from rational entries.
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Builds a matrix from integer entries.
    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(rat(a), rat(b), rat(c), rat(d))
    }

    /// The identity.
    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    /// The Weyl element w = [0, 1; −1, 0].
    pub fn w() -> Self {
        Mat2::from_i64(0, 1, -1, 0)
    }

    /// Upper unipotent n(x) = [1, x; 0, 1].
    pub fn n(x: BigRational) -> Self {
        Mat2::new(rat(1), x, rat(0), rat(1))
    }

    /// Lower unipotent [1, 0; x, 1].
    pub fn n_lower(x: BigRational) -> Self {
        Mat2::new(rat(1), rat(0), x, rat(1))
    }

    /// Torus element a(y) = diag(y, 1).
    pub fn a_diag(y: BigRational) -> Self {
        Mat2::new(y, rat(0), rat(0), rat(1))
    }

    /// Central z(u) = u·Id.
    pub fn z(u: BigRational) -> Self {
        Mat2::new(u.clone(), rat(0), rat(0), u)
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    /// Determinant.
    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Exact inverse (panics on singular input).
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        assert!(!det.is_zero(), "singular matrix");
        let inv = det.recip();
        Mat2::new(
            &self.d * &inv,
            -(&self.b * &inv),
            -(&self.c * &inv),
            &self.a * &inv,
        )
    }

    /// Scales all entries.
    pub fn scale(&self, s: &BigRational) -> Mat2 {
        Mat2::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    /// Membership in K = GL₂(o): integral entries with unit determinant.
    pub fn in_k(&self, p: u64) -> bool {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .all(|x| is_integral(x, p))
            && is_unit(&self.det(), p)
    }

    /// Membership in K₁(p^n) = {a − 1 ∈ p^n, c ∈ p^n} ∩ K (b, d free in o).
    pub fn in_k1(&self, p: u64, n: u32) -> bool {
        self.in_k(p)
            && val(&(&self.a - rat(1)), p).at_least(n as i64)
            && val(&self.c, p).at_least(n as i64)
    }

    /// Membership in K₀(p^n) = {c ∈ p^n} ∩ K.
    pub fn in_k0(&self, p: u64, n: u32) -> bool {
        self.in_k(p) && val(&self.c, p).at_least(n as i64)
    }

    /// Membership in the opposite group K⁰(p^n) = {b ∈ p^n} ∩ K.
    pub fn in_k_upper0(&self, p: u64, n: u32) -> bool {
        self.in_k(p) && val(&self.b, p).at_least(n as i64)
    }

    /// Membership in the principal congruence subgroup K(p^n) = {g ≡ 1 mod p^n}.
    pub fn in_k_principal(&self, p: u64, n: u32) -> bool {
        self.in_k(p)
            && val(&(&self.a - rat(1)), p).at_least(n as i64)
            && val(&self.b, p).at_least(n as i64)
            && val(&self.c, p).at_least(n as i64)
            && val(&(&self.d - rat(1)), p).at_least(n as i64)
    }
}

/// g = z(u)·n(x)·a(y)·k with k ∈ K, exact.
#[derive(Debug, Clone)]
pub struct Iwasawa {
    /// Central coordinate u.
    pub u: BigRational,
    /// Unipotent coordinate x.
    pub x: BigRational,
    /// Torus coordinate y.
    pub y: BigRational,
    /// The maximal-compact part.
    pub k: Mat2,
}

/// Exact Iwasawa decomposition g = z(u)n(x)a(y)k, k ∈ GL₂(o).
///
/// Panics on singular input. The decomposition is certified in debug builds by
/// re-multiplication; `coset_position` re-certifies unconditionally.
pub fn iwasawa(g: &Mat2, p: u64) -> Iwasawa {
    let det = g.det();
    assert!(!det.is_zero(), "group element must be invertible");
    // Peel a K-element from the right to reach the Borel.
    let (bmat, k) = if val(&g.c, p) >= val(&g.d, p) {
        // c/d integral: clear c with a lower unipotent
        let k = Mat2::n_lower(&g.c / &g.d);
        (g.mul(&k.inverse()), k)
    } else {
        // d/c strictly deeper: use a Weyl-rotated K-element
        let k = Mat2::new(rat(0), rat(-1), rat(1), &g.d / &g.c);
        (g.mul(&k.inverse()), k)
    };
    debug_assert!(bmat.c.is_zero());
    let u = bmat.d.clone();
    let x = &bmat.b / &bmat.d;
    let y = &bmat.a / &bmat.d;
    let out = Iwasawa { u, x, y, k };
    debug_assert_eq!(
        Mat2::z(out.u.clone())
            .mul(&Mat2::n(out.x.clone()))
            .mul(&Mat2::a_diag(out.y.clone()))
            .mul(&out.k),
        *g
    );
    debug_assert!(out.k.in_k(p));
    out
}

/// The exact coset position of g in G = ⊔ Z N a(ϖ^t) w n(ϖ^{−l} v) K₁(p^n).
///
/// The invariants are `t` ∈ Z, `l` ∈ [0, n], and the unit class `v` mod
/// U_{min(l, n−l)} (stored as the smallest positive integer representative).
/// The struct carries a full witness: g = z(z)·n(x)·a(ϖ^t)·w·n(ϖ^{−l}v)·k1
/// with k1 ∈ K₁(p^n), all exact.
#[derive(Debug, Clone)]
pub struct CosetPosition {
    /// Residue field size.
    pub p: u64,
    /// Level exponent n of K₁(p^n).
    pub n: u32,
    /// Torus exponent t.
    pub t: i64,
    /// Depth invariant l ∈ [0, n].
    pub l: u32,
    /// Canonical unit representative of the class v mod U_{min(l, n−l)}.
    pub v: BigRational,
    /// Central witness coordinate.
    pub z: BigRational,
    /// Unipotent witness coordinate.
    pub x: BigRational,
    /// The K₁(p^n) witness factor.
    pub k1: Mat2,
}

impl CosetPosition {
    /// The cell element g_{t,l,v} = a(ϖ^t)·w·n(ϖ^{−l}v).
    pub fn cell(&self) -> Mat2 {
        cell_matrix(self.p, self.t, self.l, &self.v)
    }

    /// min(l, n−l), the depth of the unit-class invariance.
    pub fn n0_of_g(&self) -> u32 {
        self.l.min(self.n - self.l)
    }
}

/// The cell element a(ϖ^t)·w·n(ϖ^{−l}v).
pub fn cell_matrix(p: u64, t: i64, l: u32, v: &BigRational) -> Mat2 {
    Mat2::a_diag(pi_pow(p, t))
        .mul(&Mat2::w())
        .mul(&Mat2::n(pi_pow(p, -(l as i64)) * v))
}

/// The residue of a p-integral rational x mod p^m, as an integer in [0, p^m).
///
/// The denominator must be a p-unit (true for any x ∈ o written in lowest
/// terms); the residue is numer·denom^{−1} mod p^m.
pub fn residue_mod(x: &BigRational, p: u64, m: u32) -> u64 {
    if m == 0 {
        return 0;
    }
    let modulus = BigInt::from(p).pow(m);
    let a = x.numer().mod_floor(&modulus);
    let b = x.denom().mod_floor(&modulus);
    let binv = mod_inverse_big(&b, &modulus);
    let rep = (a * binv).mod_floor(&modulus);
    u64::try_from(rep).expect("residue fits in u64 for supported moduli")
}

/// Smallest positive integer representative of the unit u mod p^m (coprime to p).
fn canonical_unit_rep(u: &BigRational, p: u64, m: u32) -> BigRational {
    if m == 0 {
        return rat(1);
    }
    let rep = residue_mod(u, p, m);
    debug_assert!(rep != 0);
    rat(rep as i64)
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "non-unit residue");
    e.x.mod_floor(m)
}

/// Computes the coset position of g for K₁(p^n), with an exact witness.
///
/// Panics if the witness fails to certify (which would indicate a bug, not bad
/// input): the final assertion re-multiplies all factors and checks
/// k1 ∈ K₁(p^n).
pub fn coset_position(g: &Mat2, p: u64, n: u32) -> CosetPosition {
    let iw = iwasawa(g, p);
    let k = &iw.k;
    let nn = n as i64;

    // Cell data for the K-part: k = z(z1)·n(x1)·a(y1)·w·n(ϖ^{−l}·v_raw)·k1
    let (z1, x1, y1, l, v_raw, mut k1);
    let ck_deep = val(&k.c, p).at_least(nn.max(1));
    if ck_deep && val(&k.d, p) == Val::Fin(0) {
        // l = n cell: solve z,x,y from the d, a, b entries of
        // z·n(x)·a(y)·w·n(ϖ^{−n}) = z·[−x, y − xϖ^{−n}; −1, −ϖ^{−n}]
        l = n;
        let pin = pi_pow(p, -nn);
        z1 = -(&k.d * pi_pow(p, nn));
        x1 = -(&k.a / &z1);
        y1 = &k.b / &z1 + &x1 * &pin;
        v_raw = rat(1);
        let head = Mat2::z(z1.clone())
            .mul(&Mat2::n(x1.clone()))
            .mul(&Mat2::a_diag(y1.clone()))
            .mul(&Mat2::w())
            .mul(&Mat2::n(pin));
        k1 = head.inverse().mul(k);
    } else {
        // universal identity k = z(−c)·n(a/c)·a(det/c²)·w·n(d/c), c ≠ 0
        assert!(!k.c.is_zero(), "w-branch requires a nonzero c entry");
        z1 = -k.c.clone();
        x1 = &k.a / &k.c;
        y1 = k.det() / (&k.c * &k.c);
        let slot = &k.d / &k.c; // the w·n(slot) coordinate
        let slot_val = val(&slot, p);
        let l_raw = match slot_val {
            Val::Inf => i64::MIN, // slot = 0 behaves like depth-0
            Val::Fin(s) => -s,
        };
        if l_raw <= 0 {
            // slot ∈ o: cell l = 0 with v = 1, witness n(slot − 1) ∈ K₁
            l = 0;
            v_raw = rat(1);
            k1 = Mat2::n(&slot - rat(1));
        } else {
            l = l_raw.min(nn) as u32;
            debug_assert!((l as i64) < nn.max(1) || l == n);
            v_raw = &slot * pi_pow(p, l as i64);
            debug_assert!(is_unit(&v_raw, p));
            k1 = Mat2::identity();
        }
    }

    // Merge with the Borel part of g: g = z(u)n(x)a(y)·k.
    let mut z_tot = &iw.u * &z1;
    let mut x_tot = &iw.x + &iw.y * &x1;
    let y_tot = &iw.y * &y1;
    let t = val(&y_tot, p).finite();
    let unit = &y_tot * pi_pow(p, -t);

    // Absorb the unit of the torus coordinate:
    // a(ϖ^t·u)·w·n(s) = a(ϖ^t)·w·n(s·u^{−1})·diag(1, u), diag(1, u) ∈ K₁(p^n).
    let mut v = &v_raw * unit.clone().recip();
    k1 = Mat2::new(rat(1), rat(0), rat(0), unit).mul(&k1);

    // Canonicalize v mod U_{min(l, n−l)}.
    let m = l.min(n - l);
    let v_canon = canonical_unit_rep(&v, p, m);
    if v != v_canon {
        if l <= n - l {
            // right mechanism: w·n(ϖ^{−l}v) = w·n(ϖ^{−l}v_canon)·n(ϖ^{−l}(v − v_canon))
            let delta = pi_pow(p, -(l as i64)) * (&v - &v_canon);
            debug_assert!(is_integral(&delta, p));
            k1 = Mat2::n(delta).mul(&k1);
        } else {
            // left mechanism: a(ϖ^t)·w·n(ȳ) = z(w̄^{−1})·n(−ϖ^t x')·a(ϖ^t)·w·n(x̄)·h
            // with x̄ = ϖ^{−l}v_canon, ȳ = ϖ^{−l}v, w̄ = v/v_canon ∈ U_{n−l},
            // x' = (x̄ − ȳ)/(x̄ȳ) and h = C(x̄)^{−1}·z(w̄)·n(x')·C(ȳ) ∈ K₁(p^n).
            let xbar = pi_pow(p, -(l as i64)) * &v_canon;
            let ybar = pi_pow(p, -(l as i64)) * &v;
            let wbar = &v / &v_canon;
            let xp = (&xbar - &ybar) / (&xbar * &ybar);
            let c_of = |s: &BigRational| Mat2::w().mul(&Mat2::n(s.clone()));
            let h = c_of(&xbar)
                .inverse()
                .mul(&Mat2::z(wbar.clone()))
                .mul(&Mat2::n(xp.clone()))
                .mul(&c_of(&ybar));
            z_tot = &z_tot * wbar.recip();
            x_tot = &x_tot - pi_pow(p, t) * &xp;
            k1 = h.mul(&k1);
        }
        v = v_canon;
    }

    let pos = CosetPosition {
        p,
        n,
        t,
        l,
        v,
        z: z_tot,
        x: x_tot,
        k1,
    };
    // Unconditional witness certification.
    let recomposed = Mat2::z(pos.z.clone())
        .mul(&Mat2::n(pos.x.clone()))
        .mul(&pos.cell())
        .mul(&pos.k1);
    assert_eq!(recomposed, *g, "coset witness failed to recompose");
    assert!(pos.k1.in_k1(p, n), "coset witness factor is not in K1(p^n)");
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_position(g: &Mat2, p: u64, n: u32) -> CosetPosition {
        // coset_position self-certifies; also sanity check ranges here
        let pos = coset_position(g, p, n);
        assert!(pos.l <= n);
        assert!(is_unit(&pos.v, p));
        pos
    }

    #[test]
    fn iwasawa_round_trip_small_grid() {
        let p = 3;
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=4 {
                    for d in -4i64..=4 {
                        if a * d - b * c == 0 {
                            continue;
                        }
                        let g = Mat2::from_i64(a, b, c, d);
                        let iw = iwasawa(&g, p);
                        let back = Mat2::z(iw.u.clone())
                            .mul(&Mat2::n(iw.x.clone()))
                            .mul(&Mat2::a_diag(iw.y.clone()))
                            .mul(&iw.k);
                        assert_eq!(back, g);
                        assert!(iw.k.in_k(p));
                    }
                }
            }
        }
    }

    #[test]
    fn coset_position_witness_on_k_grid() {
        // every k ∈ GL2(Z/p²)-lift exercised at levels n = 0..3
        let p = 2u64;
        let m = (p * p) as i64;
        for n in 0..=3u32 {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let det = a * d - b * c;
                            if det.rem_euclid(p as i64) == 0 {
                                continue;
                            }
                            let g = Mat2::from_i64(a, b, c, d);
                            check_position(&g, p, n);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn coset_position_witness_on_scaled_elements() {
        // cells with nontrivial t and central/unipotent parts
        let p = 3u64;
        let n = 2u32;
        let mut samples = Vec::new();
        for t in -3i64..=2 {
            for l in 0..=n {
                for vv in 1..p.pow(n) {
                    if vv % p == 0 {
                        continue;
                    }
                    let cell = cell_matrix(p, t, l, &rat(vv as i64));
                    samples.push(cell.clone());
                    // dress with z, n(x), and a K1 element
                    let dressed = Mat2::z(BigRational::new(BigInt::from(2), BigInt::from(9)))
                        .mul(&Mat2::n(BigRational::new(BigInt::from(5), BigInt::from(3))))
                        .mul(&cell)
                        .mul(&Mat2::new(rat(1 + 9), rat(4), rat(18), rat(5)));
                    samples.push(dressed);
                }
            }
        }
        for g in &samples {
            check_position(g, p, n);
        }
    }

    #[test]
    fn recovered_invariants_match_construction() {
        // the (t, l, v)-cell of a constructed g_{t,l,v} must round-trip,
        // with v compared mod U_{min(l, n−l)}
        let p = 5u64;
        let n = 2u32;
        for t in -3i64..=2 {
            for l in 0..=n {
                for vv in [1i64, 2, 3, 4, 6, 7] {
                    let g = cell_matrix(p, t, l, &rat(vv));
                    let pos = check_position(&g, p, n);
                    assert_eq!(pos.t, t);
                    assert_eq!(pos.l, l);
                    let m = l.min(n - l);
                    let md = BigInt::from(p).pow(m);
                    let diff = (rat(vv) - &pos.v).numer().mod_floor(&md);
                    assert!(diff.is_zero(), "v class mismatch at t={t} l={l} v={vv}");
                }
            }
        }
    }

    #[test]
    fn torus_depth_lemma_for_k_translates() {
        // for g = k·a(ϖ^{n1}): t(g) = min(n1 − 2l(g), −n1)
        let p = 2u64;
        for n in 1..=4u32 {
            let n1 = (n + 1) / 2;
            let m = (p.pow(n.min(3)) as i64).max(4);
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            if (a * d - b * c).rem_euclid(p as i64) == 0 {
                                continue;
                            }
                            let k = Mat2::from_i64(a, b, c, d);
                            let g = k.mul(&Mat2::a_diag(pi_pow(p, n1 as i64)));
                            let pos = check_position(&g, p, n);
                            let expected = (n1 as i64 - 2 * pos.l as i64).min(-(n1 as i64));
                            assert_eq!(pos.t, expected, "k={k:?} n={n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn depth_n_criterion_for_odd_level() {
        // n odd, g = k·a(ϖ^{n1}): l(g) ≥ n1 ⟺ k ∈ N(o)·K⁰(p); l(g) ≤ n0 ⟺ k ∈ w·K⁰(p)
        let p = 3u64;
        let n = 3u32;
        let n1 = (n + 1) / 2;
        let n0 = n / 2;
        let m = 9i64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        if (a * d - b * c).rem_euclid(p as i64) == 0 {
                            continue;
                        }
                        let k = Mat2::from_i64(a, b, c, d);
                        let g = k.mul(&Mat2::a_diag(pi_pow(p, n1 as i64)));
                        let pos = check_position(&g, p, n);
                        // k = n(b/d)·k₀ with k₀ ∈ K⁰(p) is solvable iff d is a
                        // unit; otherwise w^{−1}k ∈ K⁰(p). The two cases are
                        // complementary, and pin l(g) to the two ranges.
                        if d.rem_euclid(p as i64) != 0 {
                            assert!(pos.l >= n1, "k ∈ N(o)K⁰(p) forces l ≥ n1");
                        } else {
                            assert!(pos.l <= n0, "k ∈ wK⁰(p) forces l ≤ n0");
                        }
                    }
                }
            }
        }
    }
}
