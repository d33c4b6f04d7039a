//! Residue enumeration of GL₂(Z/p^R) and of the subgroup with c ≡ 0 (mod p),
//! used for exact averages over the compact groups K and K⁰(p).

use num_rational::BigRational;

use crate::padic::{rat, residue_mod, Mat2};

/// |GL₂(Z/p^R)| = p^{4(R−1)}·(p²−1)·(p²−p), R ≥ 1.
pub fn gl2_order(p: u64, r: u32) -> u64 {
    assert!(r >= 1);
    p.pow(4 * (r - 1)) * (p * p - 1) * (p * p - p)
}

/// Lifts (entries in [0, p^R)) of the residue classes of K mod K(p^R) —
/// equivalently GL₂(Z/p^R) — or, with `upper_b`, of the subgroup K⁰(p) mod
/// K(p^R) whose upper-right entry is divisible by p.
pub fn enumerate_k_mod(p: u64, r: u32, upper_b: bool) -> Vec<Mat2> {
    assert!(r >= 1);
    let m = p.pow(r);
    let mut out = Vec::new();
    for a in 0..m {
        for d in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if upper_b && b % p != 0 {
                        continue;
                    }
                    // unit determinant mod p ⟺ invertible over Z/p^R
                    let det = (a as i128 * d as i128 - b as i128 * c as i128)
                        .rem_euclid(p as i128) as u64;
                    if det % p == 0 {
                        continue;
                    }
                    out.push(Mat2::from_i64(a as i64, b as i64, c as i64, d as i64));
                }
            }
        }
    }
    out
}

/// The residue key (a, b, c, d) mod p^R of an integral-at-p matrix.
pub fn residue_key(g: &Mat2, p: u64, r: u32) -> [u64; 4] {
    [
        residue_mod(&g.a, p, r),
        residue_mod(&g.b, p, r),
        residue_mod(&g.c, p, r),
        residue_mod(&g.d, p, r),
    ]
}

/// A deterministic pseudo-random element of K(p^R) reduced mod p^{R+1}: the
/// identity plus p^R·E with E drawn from the seed by splitmix steps.
pub fn principal_congruence_sample(p: u64, r: u32, seed: u64) -> Mat2 {
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) % p
    };
    let pr = rat(p.pow(r) as i64);
    let e = Mat2::new(
        rat(next() as i64),
        rat(next() as i64),
        rat(next() as i64),
        rat(next() as i64),
    );
    Mat2::new(
        rat(1) + &pr * &e.a,
        &pr * &e.b,
        &pr * &e.c,
        rat(1) + &pr * &e.d,
    )
}

/// Picks a deterministic element of the enumerated list from a seed.
pub fn pick<'a>(list: &'a [Mat2], seed: u64) -> &'a Mat2 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    &list[(z as usize) % list.len()]
}

/// Exact rational 1/n.
pub fn recip_u64(n: u64) -> BigRational {
    BigRational::new(1.into(), (n as i64).into())
}
