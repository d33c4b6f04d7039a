//! Structure and duals of small finite abelian groups.
//!
//! Unit groups of residue rings (in particular of quadratic extensions, where
//! no closed-form generator is hard-coded) are handed to this module as an
//! explicit element list with a multiplication law. It produces a basis
//! realizing the cyclic decomposition, discrete logarithms for every element,
//! and the full character group. Everything is certified: the product map from
//! the claimed cyclic factors onto the group is checked to be a bijection.
//!
//! Sizes here are small (at most a few thousand elements), so the algorithms
//! favor transparent brute force over cleverness.

use std::collections::HashMap;

use crate::cyclo::{Cyclo, CycloError};

/// A finite abelian group with elements labelled by opaque `u64` keys.
pub struct AbelianGroup {
    keys: Vec<u64>,
    index: HashMap<u64, usize>,
    mul: Vec<Vec<u32>>,
    identity: usize,
}

/// A cyclic decomposition G ≅ ∏ ⟨basis_i⟩ with discrete logarithms.
pub struct Decomposition {
    /// Indices of the basis elements.
    pub basis: Vec<usize>,
    /// Orders d_i of the basis elements (∏ d_i = |G|).
    pub orders: Vec<u64>,
    /// For each element index, its exponent tuple (t_i mod d_i).
    pub dlog: Vec<Vec<u64>>,
}

impl AbelianGroup {
    /// Builds the group from its element keys and multiplication law.
    ///
    /// Panics if the keys do not form a group under `mul_fn` (non-closure,
    /// missing identity or inverses), or if the law is not commutative.
    pub fn new(keys: Vec<u64>, mul_fn: impl Fn(u64, u64) -> u64) -> Self {
        let n = keys.len();
        assert!(n > 0, "empty group");
        let index: HashMap<u64, usize> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (*k, i))
            .collect();
        assert_eq!(index.len(), n, "duplicate element keys");
        let mut mul = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                let k = mul_fn(keys[i], keys[j]);
                let idx = *index
                    .get(&k)
                    .unwrap_or_else(|| panic!("product {k} escapes the element set"));
                mul[i][j] = idx as u32;
                if j < i {
                    assert_eq!(mul[i][j], mul[j][i], "non-commutative law");
                }
            }
        }
        // identity: the unique e with e·x = x for all x
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x as u32))
            .expect("no identity element");
        for i in 0..n {
            assert!(
                (0..n).any(|j| mul[i][j] == identity as u32),
                "element without inverse"
            );
        }
        AbelianGroup {
            keys,
            index,
            mul,
            identity,
        }
    }

    /// Number of elements.
    pub fn order(&self) -> usize {
        self.keys.len()
    }

    /// The key of element `i`.
    pub fn key(&self, i: usize) -> u64 {
        self.keys[i]
    }

    /// The index of the element with the given key.
    pub fn index_of(&self, key: u64) -> Option<usize> {
        self.index.get(&key).copied()
    }

    /// Index of the identity.
    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Product of two elements by index.
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.mul[i][j] as usize
    }

    /// x^k by index (k ≥ 0).
    pub fn power(&self, i: usize, k: u64) -> usize {
        let mut acc = self.identity;
        let mut base = i;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.compose(acc, base);
            }
            base = self.compose(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order of an element.
    pub fn element_order(&self, i: usize) -> u64 {
        let mut acc = i;
        let mut k = 1u64;
        while acc != self.identity {
            acc = self.compose(acc, i);
            k += 1;
        }
        k
    }

    /// Cyclic decomposition with certified discrete logarithms.
    pub fn decompose(&self) -> Decomposition {
        let n = self.order() as u64;
        // primary decomposition: handle each Sylow subgroup separately
        let mut basis: Vec<usize> = Vec::new();
        let mut orders: Vec<u64> = Vec::new();
        let mut rem = n;
        let mut p = 2u64;
        let mut primes = Vec::new();
        while p * p <= rem {
            if rem % p == 0 {
                primes.push(p);
                while rem % p == 0 {
                    rem /= p;
                }
            }
            p += 1;
        }
        if rem > 1 {
            primes.push(rem);
        }
        for p in primes {
            let mut pe = 1u64;
            let mut nn = n;
            while nn % p == 0 {
                nn /= p;
                pe *= p;
            }
            let cof = n / pe;
            // Sylow_p = image of x ↦ x^{cofactor}
            let mut sylow: Vec<usize> = (0..self.order())
                .map(|i| self.power(i, cof))
                .collect();
            sylow.sort_unstable();
            sylow.dedup();
            // greedy basis of the p-group
            let mut span: Vec<usize> = vec![self.identity];
            loop {
                let mut best: Option<(usize, u64)> = None;
                for &g in &sylow {
                    let k = self.order_in_quotient(g, &span);
                    if best.map_or(true, |(_, bk)| k > bk) {
                        best = Some((g, k));
                    }
                }
                let (g, k) = best.unwrap();
                if k == 1 {
                    break;
                }
                // adjust the lift so that its order in G equals its order in G/span
                let h = span
                    .iter()
                    .map(|&s| self.compose(g, s))
                    .find(|&h| self.element_order(h) == k)
                    .expect("a lift of matching order always exists");
                basis.push(h);
                orders.push(k);
                let mut new_span = Vec::with_capacity(span.len() * k as usize);
                let mut hp = self.identity;
                for _ in 0..k {
                    for &s in &span {
                        new_span.push(self.compose(s, hp));
                    }
                    hp = self.compose(hp, h);
                }
                new_span.sort_unstable();
                new_span.dedup();
                span = new_span;
            }
        }
        // discrete logs: enumerate all products of basis powers and assert bijectivity
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; self.order()];
        let mut tuple = vec![0u64; basis.len()];
        loop {
            let mut x = self.identity;
            for (i, &b) in basis.iter().enumerate() {
                x = self.compose(x, self.power(b, tuple[i]));
            }
            assert!(
                dlog[x].is_none(),
                "cyclic factors overlap (decomposition bug)"
            );
            dlog[x] = Some(tuple.clone());
            // odometer increment
            let mut i = 0;
            loop {
                if i == basis.len() {
                    let filled = dlog.iter().filter(|d| d.is_some()).count();
                    assert_eq!(filled, self.order(), "decomposition does not span");
                    return Decomposition {
                        basis,
                        orders,
                        dlog: dlog.into_iter().map(|d| d.unwrap()).collect(),
                    };
                }
                tuple[i] += 1;
                if tuple[i] < orders[i] {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
        }
    }

    /// Order of g in the quotient by the subgroup `span` (given as a sorted set).
    fn order_in_quotient(&self, g: usize, span: &[usize]) -> u64 {
        let mut acc = g;
        let mut k = 1u64;
        while span.binary_search(&acc).is_err() {
            acc = self.compose(acc, g);
            k += 1;
        }
        k
    }
}

impl Decomposition {
    /// Exponent of |G| (lcm of the cyclic orders).
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |l, &d| l / gcd(l, d) * d)
    }

    /// Enumerates all characters as exponent tuples (a_i mod d_i).
    pub fn character_tuples(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut tuple = vec![0u64; self.orders.len()];
        loop {
            out.push(tuple.clone());
            let mut i = 0;
            loop {
                if i == self.orders.len() {
                    return out;
                }
                tuple[i] += 1;
                if tuple[i] < self.orders[i] {
                    break;
                }
                tuple[i] = 0;
                i += 1;
            }
        }
    }

    /// Value χ_a(x) for the character tuple `a` at element index `x`, as an
    /// exact root of unity.
    pub fn character_value(&self, a: &[u64], x: usize) -> Result<Cyclo, CycloError> {
        let l = self.exponent();
        let mut e: u64 = 0;
        for (i, (&ai, &di)) in a.iter().zip(self.orders.iter()).enumerate() {
            let ti = self.dlog[x][i];
            e = (e + (ai as u128 * ti as u128 % di as u128) as u64 * (l / di)) % l;
        }
        Cyclo::root_of_unity(l.max(1), e as i64)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
