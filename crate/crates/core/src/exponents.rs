//! Level invariants (N₀, N₁, N₂, M₁), the symbolic exponent algebra for the
//! final case analysis, the depth-aspect exponent table, and the
//! Whittaker-expansion bound evaluator.
//!
//! Every inequality between power-product bounds is verified as exact rational
//! arithmetic on exponent vectors over the symbols (N₀, N₂, M₁, T, y, Λ),
//! with N₁ handled through the relation N₁ = N₀N₂.  A monomial X dominates a
//! monomial X′ (meaning X′ ≪ X uniformly over the regime where every symbol is
//! ≥ 1) exactly when every exponent of X′ is ≤ the corresponding exponent of
//! X; occurrences of y are first eliminated against the active one-sided
//! y-constraint of the case under consideration.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::report::Check;

/// Basis symbols of the exponent algebra.  `N1` is not a basis symbol: it is
/// expanded as N₀·N₂ on construction so that equalities like
/// N₁^{1/2}N₂^{-1/6} = N₀^{1/6}N₁^{1/3} become literal vector equalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sym {
    /// N₀ — the largest integer whose square divides the level.
    N0,
    /// N₂ = N₁/N₀ — the squarefree part of the level.
    N2,
    /// M₁ — the highly-ramified central-character excess.
    M1,
    /// T = 1 + |t| — the archimedean spectral parameter.
    T,
    /// y — the height coordinate of the test point.
    Y,
    /// Λ — the amplifier length (eliminated by substitution before comparisons).
    Lam,
}

const SYMS: [Sym; 6] = [Sym::N0, Sym::N2, Sym::M1, Sym::T, Sym::Y, Sym::Lam];

fn sym_index(s: Sym) -> usize {
    match s {
        Sym::N0 => 0,
        Sym::N2 => 1,
        Sym::M1 => 2,
        Sym::T => 3,
        Sym::Y => 4,
        Sym::Lam => 5,
    }
}

fn sym_name(s: Sym) -> &'static str {
    match s {
        Sym::N0 => "N0",
        Sym::N2 => "N2",
        Sym::M1 => "M1",
        Sym::T => "T",
        Sym::Y => "y",
        Sym::Lam => "Lam",
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A power-product monomial with rational exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expo {
    e: [BigRational; 6],
}

impl Expo {
    /// The constant monomial 1.
    pub fn one() -> Self {
        Expo {
            e: std::array::from_fn(|_| BigRational::zero()),
        }
    }

    /// A single symbol raised to n/d.
    pub fn sym(s: Sym, n: i64, d: i64) -> Self {
        let mut x = Expo::one();
        x.e[sym_index(s)] = q(n, d);
        x
    }

    /// N₁^{n/d}, expanded immediately as (N₀N₂)^{n/d}.
    pub fn n1(n: i64, d: i64) -> Self {
        &Expo::sym(Sym::N0, n, d) * &Expo::sym(Sym::N2, n, d)
    }

    /// The exponent of a symbol.
    pub fn exponent(&self, s: Sym) -> &BigRational {
        &self.e[sym_index(s)]
    }

    /// Raise to the rational power n/d.
    pub fn pow(&self, n: i64, d: i64) -> Self {
        let r = q(n, d);
        let mut x = self.clone();
        for c in x.e.iter_mut() {
            *c *= &r;
        }
        x
    }

    /// Substitute Λ ← `value` (a Λ-free monomial).
    pub fn subst_lam(&self, value: &Expo) -> Self {
        assert!(value.exponent(Sym::Lam).is_zero());
        let f = self.exponent(Sym::Lam).clone();
        let mut x = self.clone();
        x.e[sym_index(Sym::Lam)] = BigRational::zero();
        &x * &value.pow_rational(&f)
    }

    fn pow_rational(&self, r: &BigRational) -> Self {
        let mut x = self.clone();
        for c in x.e.iter_mut() {
            *c *= r;
        }
        x
    }

    /// Eliminate y against a one-sided constraint.  With `upper = true` the
    /// constraint is y ≤ `bound` and the result is the supremum of the
    /// monomial over the constraint (so a positive y-power is replaced by the
    /// bound); with `upper = false` the constraint is y ≥ `bound`.  Panics if
    /// the y-power has the sign that the constraint cannot control, since the
    /// monomial would then be unbounded over the regime.
    pub fn eliminate_y(&self, bound: &Expo, upper: bool) -> Self {
        assert!(bound.exponent(Sym::Y).is_zero());
        let f = self.exponent(Sym::Y).clone();
        if f.is_zero() {
            return self.clone();
        }
        assert!(
            if upper { f.is_positive() } else { f.is_negative() },
            "y-power {f} is uncontrolled by the active constraint"
        );
        let mut x = self.clone();
        x.e[sym_index(Sym::Y)] = BigRational::zero();
        &x * &bound.pow_rational(&f)
    }

    /// Exact domination over the regime "every symbol ≥ 1": true iff every
    /// exponent of `self` is ≤ the corresponding exponent of `other`.
    /// Both monomials must be y- and Λ-free (eliminate those first).
    pub fn dominated_by(&self, other: &Expo) -> bool {
        assert!(self.exponent(Sym::Y).is_zero() && other.exponent(Sym::Y).is_zero());
        assert!(self.exponent(Sym::Lam).is_zero() && other.exponent(Sym::Lam).is_zero());
        self.e.iter().zip(other.e.iter()).all(|(a, b)| a <= b)
    }

    /// Domination that is strict in the T-exponent (the "much stronger" claim).
    pub fn strictly_dominated_in_t(&self, other: &Expo) -> bool {
        self.dominated_by(other) && self.exponent(Sym::T) < other.exponent(Sym::T)
    }

    /// Set the N₂ exponent to zero (the perfect-square-level degeneration).
    pub fn forget_n2(&self) -> Self {
        let mut x = self.clone();
        x.e[sym_index(Sym::N2)] = BigRational::zero();
        x
    }

    /// Numeric evaluation at concrete positive symbol values
    /// (n0, n2, m1, t, y, lam).
    pub fn eval(&self, v: [f64; 6]) -> f64 {
        self.e
            .iter()
            .zip(v.iter())
            .map(|(e, x)| x.powf(e.to_f64().unwrap()))
            .product()
    }
}

impl fmt::Display for Expo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for s in SYMS {
            let e = self.exponent(s);
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(sym_name(s).to_string());
            } else {
                parts.push(format!("{}^({})", sym_name(s), e));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

impl std::ops::Mul for &Expo {
    type Output = Expo;
    fn mul(self, rhs: &Expo) -> Expo {
        let mut x = self.clone();
        for (a, b) in x.e.iter_mut().zip(rhs.e.iter()) {
            *a += b;
        }
        x
    }
}

impl std::ops::Div for &Expo {
    type Output = Expo;
    fn div(self, rhs: &Expo) -> Expo {
        let mut x = self.clone();
        for (a, b) in x.e.iter_mut().zip(rhs.e.iter()) {
            *a -= b;
        }
        x
    }
}

/// A bound of the form "sum (≍ max) of monomials".
#[derive(Debug, Clone)]
pub struct BoundExpr {
    /// The monomial terms; the bound is their maximum up to a constant.
    pub terms: Vec<Expo>,
}

impl BoundExpr {
    /// Every term of `self` dominated by some term of `other`, after
    /// eliminating y via the given one-sided constraint.
    pub fn dominated_by(&self, other: &BoundExpr, y_bound: &Expo, upper: bool) -> bool {
        self.terms.iter().all(|t| {
            let t = t.eliminate_y(y_bound, upper);
            other
                .terms
                .iter()
                .any(|o| t.dominated_by(&o.eliminate_y(y_bound, upper)))
        })
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Level invariants of a conductor pair (N, M) with M | N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelInvariants {
    /// The level N.
    pub n: u64,
    /// The central-character conductor M.
    pub m: u64,
    /// N₀ — largest integer with N₀² | N.
    pub n0: u64,
    /// N₁ = N/N₀ (equivalently the smallest integer with N | N₁²).
    pub n1: u64,
    /// N₂ = N₁/N₀, always squarefree.
    pub n2: u64,
    /// M₁ = M/gcd(M, N₁); always divides N₀.
    pub m1: u64,
}

/// Prime factorization of n ≥ 1 as (prime, exponent) pairs in increasing
/// prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Compute (N₀, N₁, N₂, M₁) from (N, M).  Errors when M ∤ N.
pub fn level_invariants(n: u64, m: u64) -> Result<LevelInvariants, String> {
    if n == 0 || m == 0 {
        return Err("level and conductor must be positive".into());
    }
    if n % m != 0 {
        return Err(format!("conductor {m} does not divide level {n}"));
    }
    let mut n0 = 1u64;
    for (p, e) in factorize(n) {
        n0 *= p.pow(e / 2);
    }
    let n1 = n / n0;
    let n2 = n1 / n0;
    let m1 = m / gcd(m, n1);
    // structural invariants of the decomposition
    assert_eq!(n1 % n0, 0);
    assert!(factorize(n2).iter().all(|&(_, e)| e == 1), "N2 squarefree");
    assert_eq!(n0 % m1, 0, "M1 divides N0");
    Ok(LevelInvariants {
        n,
        m,
        n0,
        n1,
        n2,
        m1,
    })
}

impl LevelInvariants {
    /// The sup-norm upper bound exponent string (without the ε's).
    pub fn theorem_exponent(&self) -> String {
        "N0^(1/6)·N1^(1/3)·M1^(1/2)·T^(5/12)".to_string()
    }

    /// Numeric value of the theorem bound N₀^{1/6+ε}N₁^{1/3+ε}M₁^{1/2}T^{5/12+ε}.
    pub fn bound_value(&self, t: f64, eps: f64) -> f64 {
        (self.n0 as f64).powf(1.0 / 6.0 + eps)
            * (self.n1 as f64).powf(1.0 / 3.0 + eps)
            * (self.m1 as f64).powf(0.5)
            * t.powf(5.0 / 12.0 + eps)
    }

    /// The exponent ρ with the theorem bound N^ρ·T^{5/12} in the depth aspect,
    /// i.e. ρ = (v(N₀)/6 + v(N₁)/3 + v(M₁)/2)/v(N) for a prime-power level.
    pub fn depth_exponent(&self) -> Option<BigRational> {
        let f = factorize(self.n);
        if f.len() != 1 {
            return None;
        }
        let p = f[0].0;
        let vn = f[0].1 as i64;
        let v = |x: u64| -> i64 {
            let mut x = x;
            let mut c = 0;
            while x % p == 0 {
                x /= p;
                c += 1;
            }
            c
        };
        Some((q(v(self.n0), 6) + q(v(self.n1), 3) + q(v(self.m1), 2)) / q(vn, 1))
    }
}

/// One row of the depth-aspect exponent table for level p^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    /// Exponent n of the level p^n.
    pub n: u32,
    /// The conductor exponents m covered by this row (inclusive range).
    pub m_range: (u32, u32),
    /// Exponent of p in N₀.
    pub v_n0: u32,
    /// Exponent of p in N₁.
    pub v_n1: u32,
    /// Exponent of p in M₁.
    pub v_m1: u32,
    /// The N-exponent ρ of the upper bound N^ρ.
    pub rho: BigRational,
}

/// The depth-aspect table for levels p^n, 1 ≤ n ≤ 5, with the conductor
/// ranges grouped exactly as rows collapse (rows with the same invariants are
/// merged).  Computed from `level_invariants` applied symbolically.
pub fn intro_table() -> Vec<TableRow> {
    let mut rows = Vec::new();
    for n in 1u32..=5 {
        let n1 = n.div_ceil(2);
        let n0 = n / 2;
        let mut m = 0u32;
        while m <= n {
            let m1 = m.saturating_sub(n1);
            // group the maximal run of m with the same M1
            let mut m_hi = m;
            while m_hi + 1 <= n && (m_hi + 1).saturating_sub(n1) == m1 {
                m_hi += 1;
            }
            let rho = (q(n0 as i64, 6) + q(n1 as i64, 3) + q(m1 as i64, 2)) / q(n as i64, 1);
            rows.push(TableRow {
                n,
                m_range: (m, m_hi),
                v_n0: n0,
                v_n1: n1,
                v_m1: m1,
                rho,
            });
            m = m_hi + 1;
        }
    }
    rows
}

/// The eleven-row regression lock for the depth-aspect table.
pub fn intro_table_check() -> Check {
    let expected: [(u32, u32, u32, &str); 11] = [
        (1, 0, 1, "1/3"),
        (2, 0, 1, "1/4"),
        (2, 2, 2, "1/2"),
        (3, 0, 2, "5/18"),
        (3, 3, 3, "4/9"),
        (4, 0, 2, "1/4"),
        (4, 3, 3, "3/8"),
        (4, 4, 4, "1/2"),
        (5, 0, 3, "4/15"),
        (5, 4, 4, "11/30"),
        (5, 5, 5, "7/15"),
    ];
    let rows = intro_table();
    if rows.len() != expected.len() {
        return Check::fail(
            "intro-table-rows",
            "levels p^n, n ≤ 5",
            format!("expected 11 rows, computed {}", rows.len()),
        );
    }
    for (row, (n, m_lo, m_hi, rho)) in rows.iter().zip(expected.iter()) {
        if row.n != *n || row.m_range != (*m_lo, *m_hi) || row.rho.to_string() != *rho {
            return Check::fail(
                "intro-table-rows",
                "levels p^n, n ≤ 5",
                format!(
                    "row (n={}, m={}..{}) has rho = {}, expected (n={n}, m={m_lo}..{m_hi}, rho={rho})",
                    row.n, row.m_range.0, row.m_range.1, row.rho
                ),
            );
        }
        // cross-check against the integer-level computation at p ∈ {2, 3}
        for p in [2u64, 3] {
            let inv = level_invariants(p.pow(row.n), p.pow(row.m_range.1)).unwrap();
            if inv.depth_exponent().as_ref() != Some(&row.rho) {
                return Check::fail(
                    "intro-table-rows",
                    "levels p^n, n ≤ 5",
                    format!("depth exponent mismatch at p={p}, n={}", row.n),
                );
            }
        }
    }
    Check::pass("intro-table-rows", "levels p^n, n ≤ 5, all conductors")
        .with_measured("11 rows")
        .with_locked("11 rows: 1/3, 1/4, 1/2, 5/18, 4/9, 1/4, 3/8, 1/2, 4/15, 11/30, 7/15")
}

/// The target bound for |φ| on the generating domain:
/// N₁^{1/2}M₁^{1/2}N₂^{-1/6}T^{5/12} (one ε-power suppressed).
pub fn target_bound() -> Expo {
    let t = &Expo::n1(1, 2) * &Expo::sym(Sym::M1, 1, 2);
    &(&t * &Expo::sym(Sym::N2, -1, 6)) * &Expo::sym(Sym::T, 5, 12)
}

/// The amplification bound for |φ|²/(N₁M₁) before choosing Λ:
/// T/Λ + N₂^{1/2}T^{1/2}y/Λ + Λ^{1/2}T^{1/2}N₂^{-1/2} + Λ^{1/2}T^{1/2}y + Λ²T^{1/2}N₂^{-1}.
pub fn amplification_bound() -> BoundExpr {
    let lam = |n, d| Expo::sym(Sym::Lam, n, d);
    let t = |n, d| Expo::sym(Sym::T, n, d);
    let n2 = |n, d| Expo::sym(Sym::N2, n, d);
    let y = Expo::sym(Sym::Y, 1, 1);
    BoundExpr {
        terms: vec![
            &t(1, 1) * &lam(-1, 1),
            &(&(&n2(1, 2) * &t(1, 2)) * &y) * &lam(-1, 1),
            &(&lam(1, 2) * &t(1, 2)) * &n2(-1, 2),
            &(&lam(1, 2) * &t(1, 2)) * &y,
            &(&lam(2, 1) * &t(1, 2)) * &n2(-1, 1),
        ],
    }
}

/// The Whittaker-expansion bound for |φ|: (N₁M₁T/(N₂y))^{1/2} + (N₁T^{1/3}/N₂)^{1/2}.
pub fn fourier_bound() -> BoundExpr {
    let f1 = &(&Expo::n1(1, 1) * &Expo::sym(Sym::M1, 1, 1))
        * &(&Expo::sym(Sym::T, 1, 1) * &(&Expo::sym(Sym::N2, -1, 1) * &Expo::sym(Sym::Y, -1, 1)));
    let f2 = &(&Expo::n1(1, 1) * &Expo::sym(Sym::T, 1, 3)) * &Expo::sym(Sym::N2, -1, 1);
    BoundExpr {
        terms: vec![f1.pow(1, 2), f2.pow(1, 2)],
    }
}

/// Exact symbolic verification of the concluding case analysis: the
/// Λ = T^{1/6}N₂^{1/3} substitution, the two y-regimes, and the reproduction
/// of the displayed exponents.  One documented correction: mechanically
/// substituting Λ into the amplification bound yields the y-term
/// T^{7/12}N₂^{+1/6}y, while the source displays T^{7/12}N₂^{-1/6}y; the case
/// split is therefore taken at y = T^{1/4}N₂^{-1/2} (instead of the displayed
/// T^{1/4}N₂^{-1/6}), which closes both cases — the Whittaker-expansion case
/// in fact covers every y down to the corrected threshold with strict room.
pub fn exponent_casecheck() -> Vec<Check> {
    let mut checks = Vec::new();

    // 1. the target equals the theorem bound N₀^{1/6}N₁^{1/3}M₁^{1/2}T^{5/12}
    let theorem = &(&(&Expo::sym(Sym::N0, 1, 6) * &Expo::n1(1, 3)) * &Expo::sym(Sym::M1, 1, 2))
        * &Expo::sym(Sym::T, 5, 12);
    checks.push(if target_bound() == theorem {
        Check::pass(
            "target-equals-theorem-form",
            "N1^(1/2)·M1^(1/2)·N2^(-1/6)·T^(5/12) == N0^(1/6)·N1^(1/3)·M1^(1/2)·T^(5/12)",
        )
    } else {
        Check::fail(
            "target-equals-theorem-form",
            "exponent identity",
            format!("{} != {}", target_bound(), theorem),
        )
    });

    // 2. the two displayed forms of the Whittaker-expansion bound agree:
    // (N₀M₁T/y)^{1/2} + (N₀T^{1/3})^{1/2} == (N₁M₁T/(N₂y))^{1/2} + (N₁T^{1/3}/N₂)^{1/2}
    let g1 = (&(&Expo::sym(Sym::N0, 1, 1) * &Expo::sym(Sym::M1, 1, 1))
        * &(&Expo::sym(Sym::T, 1, 1) * &Expo::sym(Sym::Y, -1, 1)))
        .pow(1, 2);
    let g2 = (&Expo::sym(Sym::N0, 1, 1) * &Expo::sym(Sym::T, 1, 3)).pow(1, 2);
    let fb = fourier_bound();
    checks.push(if fb.terms == vec![g1, g2] {
        Check::pass(
            "fourier-bound-two-forms-agree",
            "(N0·M1·T/y)^(1/2) + (N0·T^(1/3))^(1/2) under N1 = N0·N2",
        )
    } else {
        Check::fail(
            "fourier-bound-two-forms-agree",
            "exponent identity",
            format!("{fb}"),
        )
    });

    // 3. the Λ-substitution, term by term
    let lam_choice = &Expo::sym(Sym::T, 1, 6) * &Expo::sym(Sym::N2, 1, 3);
    let substituted: Vec<Expo> = amplification_bound()
        .terms
        .iter()
        .map(|t| t.subst_lam(&lam_choice))
        .collect();
    let t = |n, d| Expo::sym(Sym::T, n, d);
    let n2 = |n, d| Expo::sym(Sym::N2, n, d);
    let y = Expo::sym(Sym::Y, 1, 1);
    let expected = vec![
        &t(5, 6) * &n2(-1, 3),
        &(&t(1, 3) * &n2(1, 6)) * &y,
        &t(7, 12) * &n2(-1, 3),
        &(&t(7, 12) * &n2(1, 6)) * &y,
        &t(5, 6) * &n2(-1, 3),
    ];
    checks.push(if substituted == expected {
        Check::pass(
            "amplifier-lambda-substitution",
            "Lam = T^(1/6)·N2^(1/3) into all five amplification terms",
        )
        .with_locked("T^(5/6)N2^(-1/3), T^(1/3)N2^(1/6)y, T^(7/12)N2^(-1/3), T^(7/12)N2^(1/6)y, T^(5/6)N2^(-1/3)")
    } else {
        let got: Vec<String> = substituted.iter().map(|x| x.to_string()).collect();
        Check::fail(
            "amplifier-lambda-substitution",
            "Lam = T^(1/6)·N2^(1/3)",
            got.join(", "),
        )
    });

    // 4. reduction to the two maximal terms (T ≥ 1 merges the rest)
    let lead = &t(5, 6) * &n2(-1, 3);
    let lead_y = &(&t(7, 12) * &n2(1, 6)) * &y;
    let reduced_ok = substituted.iter().all(|s| {
        if s.exponent(Sym::Y).is_zero() {
            s.dominated_by(&lead)
        } else {
            s.exponent(Sym::Y).is_one() && (s / &y).dominated_by(&(&lead_y / &y))
        }
    });
    checks.push(if reduced_ok {
        Check::pass(
            "amplifier-substituted-reduction",
            "all five terms ≤ max(T^(5/6)·N2^(-1/3), T^(7/12)·N2^(1/6)·y)",
        )
    } else {
        Check::fail(
            "amplifier-substituted-reduction",
            "term comparison",
            "a substituted term escapes the two leading terms",
        )
    });

    // 5. the displayed y-term carries N₂^{-1/6}; the derived one is exactly
    // N₂^{1/3} larger.  Locked as the documented discrepancy factor.
    let displayed_y = &(&t(7, 12) * &n2(-1, 6)) * &y;
    let ratio = &lead_y / &displayed_y;
    checks.push(if ratio == n2(1, 3) {
        Check::pass(
            "displayed-y-term-discrepancy-factor",
            "derived T^(7/12)·N2^(1/6)·y vs displayed T^(7/12)·N2^(-1/6)·y",
        )
        .with_measured("N2^(1/3)")
        .with_locked("N2^(1/3)")
    } else {
        Check::fail(
            "displayed-y-term-discrepancy-factor",
            "ratio of derived to displayed y-term",
            format!("{ratio}"),
        )
    });

    // 6. case y ≤ T^{1/4}N₂^{-1/2}: amplification closes.  The squared
    // target, divided by the prefactor N₁M₁, is N₂^{-1/3}T^{5/6}.
    let threshold = &Expo::sym(Sym::T, 1, 4) * &Expo::sym(Sym::N2, -1, 2);
    let target_sq_over_pref =
        &(&target_bound().pow(2, 1) / &Expo::n1(1, 1)) / &Expo::sym(Sym::M1, 1, 1);
    let case1_ok = substituted
        .iter()
        .all(|s| s.eliminate_y(&threshold, true).dominated_by(&target_sq_over_pref));
    checks.push(if case1_ok {
        Check::pass(
            "case1-amplification-closes",
            "y ≤ T^(1/4)·N2^(-1/2): every substituted term ≤ N2^(-1/3)·T^(5/6)",
        )
    } else {
        Check::fail(
            "case1-amplification-closes",
            "y ≤ T^(1/4)·N2^(-1/2)",
            "a term exceeds the squared target",
        )
    });

    // 7. case y ≥ T^{1/4}N₂^{-1/2}: the Whittaker-expansion bound closes,
    // strictly in T.
    let case2_ok = fb.terms.iter().all(|s| {
        s.eliminate_y(&threshold, false)
            .strictly_dominated_in_t(&target_bound())
    });
    checks.push(if case2_ok {
        Check::pass(
            "case2-fourier-closes-strictly",
            "y ≥ T^(1/4)·N2^(-1/2): both Whittaker-expansion terms < target, strict in T",
        )
    } else {
        Check::fail(
            "case2-fourier-closes-strictly",
            "y ≥ T^(1/4)·N2^(-1/2)",
            "a Whittaker-expansion term is not strictly dominated",
        )
    });

    // 8. at the displayed threshold y ≥ T^{1/4}N₂^{-1/6}, the first
    // Whittaker-expansion term reproduces the displayed exponents
    // M₁^{1/2}N₁^{1/2}N₂^{-5/12}T^{3/8} exactly, which is again strictly
    // dominated by the target.
    let displayed_threshold = &Expo::sym(Sym::T, 1, 4) * &Expo::sym(Sym::N2, -1, 6);
    let f1_at = fb.terms[0].eliminate_y(&displayed_threshold, false);
    let displayed_case2 = &(&(&Expo::sym(Sym::M1, 1, 2) * &Expo::n1(1, 2))
        * &Expo::sym(Sym::N2, -5, 12))
        * &Expo::sym(Sym::T, 3, 8);
    checks.push(
        if f1_at == displayed_case2 && f1_at.strictly_dominated_in_t(&target_bound()) {
            Check::pass(
                "case2-displayed-threshold-reproduces-display",
                "y ≥ T^(1/4)·N2^(-1/6) gives exactly M1^(1/2)·N1^(1/2)·N2^(-5/12)·T^(3/8)",
            )
        } else {
            Check::fail(
                "case2-displayed-threshold-reproduces-display",
                "y ≥ T^(1/4)·N2^(-1/6)",
                format!("{f1_at}"),
            )
        },
    );

    // 9. coverage: the corrected threshold sits below the displayed one
    // (N₂ ≥ 1), so the two cases cover every y with the Whittaker-expansion
    // case absorbing the strip between the thresholds.
    checks.push(if threshold.dominated_by(&displayed_threshold) {
        Check::pass(
            "case-split-coverage",
            "T^(1/4)·N2^(-1/2) ≤ T^(1/4)·N2^(-1/6); cases y ≤ and y ≥ the corrected threshold cover all y",
        )
    } else {
        Check::fail(
            "case-split-coverage",
            "threshold comparison",
            "corrected threshold above displayed threshold",
        )
    });

    // 10. degenerate perfect-square level: with the N₂-exponents set to zero
    // the derived and displayed displays coincide and case 1 closes at the
    // displayed threshold as well.
    let degen_ok = lead_y.forget_n2() == displayed_y.forget_n2()
        && substituted.iter().all(|s| {
            s.forget_n2()
                .eliminate_y(&displayed_threshold.forget_n2(), true)
                .dominated_by(&target_sq_over_pref.forget_n2())
        });
    checks.push(if degen_ok {
        Check::pass(
            "degenerate-square-level",
            "N2 = 1: displays coincide and the case analysis closes",
        )
    } else {
        Check::fail(
            "degenerate-square-level",
            "N2 = 1",
            "degenerate case analysis failed",
        )
    });

    checks
}

/// Numeric and symbolic form of the Whittaker-expansion output bound
/// (QᵍT/y + N₀ᵍT^{1/3})^{1/2}, together with the exact crossover height.
#[derive(Debug, Clone)]
pub struct FourierBoundEval {
    /// The numeric value of the bound (with ε = 0, constants suppressed).
    pub value: f64,
    /// The symbolic form.
    pub symbolic: String,
    /// The height where the two summands under the root are exactly equal:
    /// y* = Qᵍ·T^{2/3}/N₀ᵍ.
    pub crossover: f64,
}

/// Evaluate (QᵍT/y + N₀ᵍT^{1/3})^{1/2}.  Errors when y ≤ 0.
pub fn fourier_bound_eval(qg: u64, n0g: u64, t: f64, y: f64) -> Result<FourierBoundEval, String> {
    if y <= 0.0 {
        return Err("y must be positive".into());
    }
    if t < 1.0 {
        return Err("T must be ≥ 1".into());
    }
    let first = qg as f64 * t / y;
    let second = n0g as f64 * t.powf(1.0 / 3.0);
    Ok(FourierBoundEval {
        value: (first + second).sqrt(),
        symbolic: format!("sqrt({qg}·T/y + {n0g}·T^(1/3))"),
        crossover: qg as f64 * t.powf(2.0 / 3.0) / n0g as f64,
    })
}
