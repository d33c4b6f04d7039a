//! Assembly of local Whittaker data into the global expansion coefficients.
//!
//! A global point is a collection of sites, one per ramified prime, each
//! carrying a calibrated local representation and a K-component k_p; the
//! local test element is g_p = k_p·a(p^{n₁,p}).  The module computes the
//! per-site coset invariants n₀(g_p) and q(g_p), the global Whittaker length
//! (Qᵍ, N₀ᵍ), and the product coefficients
//! λ(n; g) = ∏_p W_p(a(n·p^{−q_p})·g_p), and verifies their support,
//! unit-periodicity, and the factorization of block averages.

use num_rational::BigRational;

use crate::padic::{coset_position, pi_pow, rat, CosetPosition, Mat2};
use crate::report::Check;
use crate::reps::LocalRep;
use crate::value::SqrtExt;
use crate::whittaker::{calibrate, Engine};

/// One ramified prime of a global point.
pub struct LocalSite {
    rep: LocalRep,
    engine: Engine,
    k: Mat2,
    g: Mat2,
    pos: CosetPosition,
    n0_g: u32,
    q_g: u32,
}

impl LocalSite {
    /// The residue characteristic.
    pub fn p(&self) -> u64 {
        self.rep.p()
    }

    /// The calibrated local representation.
    pub fn rep(&self) -> &LocalRep {
        &self.rep
    }

    /// The chosen K-component k_p.
    pub fn k(&self) -> &Mat2 {
        &self.k
    }

    /// The local test element g_p = k_p·a(p^{n₁,p}).
    pub fn g(&self) -> &Mat2 {
        &self.g
    }

    /// The coset position of g_p.
    pub fn position(&self) -> &CosetPosition {
        &self.pos
    }

    /// The depth invariant n₀(g_p) = min(l, n−l).
    pub fn n0_g(&self) -> u32 {
        self.n0_g
    }

    /// The local Whittaker length exponent q(g_p) = max(n₀, n₀(g)−n₁+m).
    pub fn q_g(&self) -> u32 {
        self.q_g
    }

    /// The local coefficient W_p(a(y)·g_p).
    pub fn eval_at(&self, y: &BigRational) -> SqrtExt {
        self.engine.eval(&Mat2::a_diag(y.clone()).mul(&self.g))
    }

    /// The local coefficient at y = n·p^{−q(g_p)}.
    pub fn coefficient(&self, n: &BigRational) -> SqrtExt {
        let y = n * pi_pow(self.p(), -(self.q_g as i64));
        self.eval_at(&y)
    }
}

/// A K-component with lower-triangular unipotent part n̄(u·p^j); the
/// associated test element k·a(p^{n₁}) sits in the cell with l = n₁ + j.
pub fn k_lower(p: u64, j: u32, u: i64) -> Mat2 {
    let mut m = Mat2::identity();
    m.c = rat(u) * pi_pow(p, j as i64);
    m
}

/// A K-component w·n(u·p^j); the associated test element k·a(p^{n₁}) sits in
/// the cell with l = max(n₁ − j, 0) (for j ≤ n₁).
pub fn k_upper(p: u64, j: u32, u: i64) -> Mat2 {
    Mat2::w().mul(&Mat2::n(rat(u) * pi_pow(p, j as i64)))
}

/// The global Whittaker length data of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhittakerLength {
    /// Qᵍ = ∏_p p^{q(g_p)} — the denominator of the expansion support.
    pub q_g: u64,
    /// N₀ᵍ = ∏_p p^{n₀(g_p)} — the period of the coefficient modulus.
    pub n0_g: u64,
}

/// A global point: distinct ramified primes with local representations and
/// K-components.  Local Whittaker tables are built once per site and cached.
pub struct GlobalPoint {
    sites: Vec<LocalSite>,
}

impl GlobalPoint {
    /// Build a global point.  Errors when primes repeat, a component is not
    /// in K, or a site with odd level exponent violates the generating-domain
    /// condition l(g_p) ≤ n₀,p.
    pub fn new(data: Vec<(LocalRep, Mat2)>) -> Result<GlobalPoint, String> {
        let mut sites = Vec::new();
        for (rep, k) in data {
            let p = rep.p();
            if sites.iter().any(|s: &LocalSite| s.p() == p) {
                return Err(format!("duplicate prime {p}"));
            }
            if !k.in_k(p) {
                return Err(format!("component at p = {p} is not in K"));
            }
            let rep = calibrate(&rep);
            let n = rep.n();
            let g = k.mul(&Mat2::a_diag(pi_pow(p, rep.n1() as i64)));
            let pos = coset_position(&g, p, n);
            if n % 2 == 1 && pos.l > rep.n0() {
                return Err(format!(
                    "generating-domain violation at p = {p}: odd level exponent {n} requires l ≤ {}, got l = {}",
                    rep.n0(),
                    pos.l
                ));
            }
            let n0_g = pos.l.min(n - pos.l);
            // q(g) = max(n₀, n₀(g) − n₁ + m), always within [n₀, n₀ + m₁]
            let shifted = n0_g as i64 - rep.n1() as i64 + rep.m() as i64;
            let q_g = (rep.n0() as i64).max(shifted) as u32;
            assert!(q_g >= rep.n0() && q_g <= rep.n0() + rep.m1());
            let engine = Engine::new(rep.clone());
            sites.push(LocalSite {
                rep,
                engine,
                k,
                g,
                pos,
                n0_g,
                q_g,
            });
        }
        if sites.is_empty() {
            return Err("a global point needs at least one ramified prime".into());
        }
        Ok(GlobalPoint { sites })
    }

    /// The sites, in construction order.
    pub fn sites(&self) -> &[LocalSite] {
        &self.sites
    }

    /// The level N = ∏_p p^{n_p}.
    pub fn level(&self) -> u64 {
        self.sites
            .iter()
            .map(|s| s.p().pow(s.rep.n()))
            .product()
    }

    /// The central-character conductor M = ∏_p p^{m_p}.
    pub fn conductor(&self) -> u64 {
        self.sites
            .iter()
            .map(|s| s.p().pow(s.rep.m()))
            .product()
    }

    /// (Qᵍ, N₀ᵍ), checking the divisibility constraints Qᵍ | N₀M₁ and
    /// N₀ᵍ | N₀.
    pub fn whittaker_length(&self) -> WhittakerLength {
        let q_g: u64 = self.sites.iter().map(|s| s.p().pow(s.q_g)).product();
        let n0_g: u64 = self.sites.iter().map(|s| s.p().pow(s.n0_g)).product();
        let n0: u64 = self.sites.iter().map(|s| s.p().pow(s.rep.n0())).product();
        let m1: u64 = self.sites.iter().map(|s| s.p().pow(s.rep.m1())).product();
        assert_eq!((n0 * m1) % q_g, 0, "Qᵍ must divide N₀M₁");
        assert_eq!(n0 % n0_g, 0, "N₀ᵍ must divide N₀");
        WhittakerLength { q_g, n0_g }
    }

    /// The per-site factors of λ(n; g) = ∏_p W_p(a(n·p^{−q_p})·g_p).
    pub fn coefficient(&self, n: &BigRational) -> Vec<SqrtExt> {
        self.sites.iter().map(|s| s.coefficient(n)).collect()
    }

    /// |λ(n; g)| as a floating-point number.
    pub fn coefficient_modulus(&self, n: &BigRational) -> f64 {
        self.coefficient(n).iter().map(SqrtExt::abs).product()
    }

    /// The Whittaker-expansion bound at this point, fed by (Qᵍ, N₀ᵍ).
    pub fn fourier_bound(
        &self,
        t: f64,
        y: f64,
    ) -> Result<crate::exponents::FourierBoundEval, String> {
        let wl = self.whittaker_length();
        crate::exponents::fourier_bound_eval(wl.q_g, wl.n0_g, t, y)
    }
}

fn units_mod(m: u64) -> Vec<u64> {
    (1..m.max(2))
        .filter(|u| gcd_u64(*u, m) == 1)
        .collect()
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Support check: every site vanishes identically at valuations below −q(g_p).
/// Scans v_p(y) = −q − d for d ∈ [1, depth] over all unit classes.
pub fn support_check(point: &GlobalPoint, depth: u32) -> Vec<Check> {
    let mut checks = Vec::new();
    for site in point.sites() {
        let p = site.p();
        let n = site.rep.n();
        let mut bad = None;
        let mut attained = false;
        for d in 0..=depth {
            let j = -(site.q_g as i64) - d as i64;
            for u in units_mod(p.pow(n.min(3))) {
                let y = rat(u as i64) * pi_pow(p, j);
                let w = site.eval_at(&y);
                if d > 0 && !w.is_zero() {
                    bad = Some(format!("W ≠ 0 at v(y) = {j}, u = {u}"));
                }
                if d == 0 && !w.is_zero() {
                    attained = true;
                }
            }
        }
        let params = format!(
            "{} with l = {}, q(g) = {}, depth {}",
            site.rep.label(),
            site.pos.l,
            site.q_g,
            depth
        );
        checks.push(match bad {
            None => Check::pass("expansion-support", params)
                .with_measured(if attained { "length attained" } else { "length not attained" }),
            Some(c) => Check::fail("expansion-support", params, c),
        });
    }
    checks
}

/// Unit-periodicity: |λ(un; g)| = |λ(n; g)| exactly, for units u ≡ 1 mod N₀ᵍ
/// (factorwise, comparing each site's |W|² as an exact algebraic number).
pub fn periodicity_check(point: &GlobalPoint, n_values: &[u64]) -> Vec<Check> {
    let mut checks = Vec::new();
    for site in point.sites() {
        let p = site.p();
        let period = p.pow(site.n0_g);
        let probe = p.pow(site.n0_g + 1);
        let mut bad = None;
        for &n in n_values {
            let base = rat(n as i64);
            let w0 = site.coefficient(&base).norm_sq();
            // units congruent to 1 mod p^{n₀(g)} but not mod p^{n₀(g)+1}
            for shift in 1..=2u64 {
                let u = 1 + shift * period;
                if gcd_u64(u % probe.max(1), p) != 1 {
                    continue;
                }
                let w1 = site.coefficient(&(rat(u as i64) * &base)).norm_sq();
                if w0 != w1 {
                    bad = Some(format!("|λ|² changes under u = 1 + {shift}·{period} at n = {n}"));
                }
            }
        }
        let params = format!("{} with period p^{}", site.rep.label(), site.n0_g);
        checks.push(match bad {
            None => Check::pass("coefficient-unit-periodicity", params),
            Some(c) => Check::fail("coefficient-unit-periodicity", params, c),
        });
    }
    checks
}

/// Block-average factorization and decay.  The average of |λ(n₀n₁; g)|² over
/// unit residues n₀ mod N₀ᵍ equals the product over sites of local unit
/// averages (exactly, by CRT once each site's factor only depends on
/// n₀ mod p^{n₀(g_p)} — which `periodicity_check` establishes); the local
/// averages decay like n₁^{−1/2}.  Returns the factorization check (numeric
/// cross-check at 1e−9 relative) and the measured decay constant
/// sup √n₁ · average.
pub fn block_average_check(point: &GlobalPoint, n1_values: &[u64], locked: f64) -> Vec<Check> {
    let wl = point.whittaker_length();
    let mut checks = Vec::new();
    let mut sup_ratio: f64 = 0.0;
    let n_level = point.level();
    for &n1 in n1_values {
        // global side: average over residues n₀ mod N₀ᵍ coprime to N,
        // lifting each unit class to a representative coprime to the level
        let units = if wl.n0_g == 1 {
            vec![1u64]
        } else {
            units_mod(wl.n0_g)
        };
        let mut global = 0.0;
        for &u in &units {
            let mut lift = u;
            while gcd_u64(lift, n_level) != 1 {
                lift += wl.n0_g;
            }
            let n = rat((lift * n1) as i64);
            global += point
                .coefficient(&n)
                .iter()
                .map(|w| w.norm_sq().abs())
                .product::<f64>();
        }
        global /= units.len() as f64;
        // local side: product of per-site unit averages
        let mut local = 1.0;
        for site in point.sites() {
            let p = site.p();
            let period = p.pow(site.n0_g);
            let mut site_avg = 0.0;
            let site_units = if period == 1 {
                vec![1u64]
            } else {
                units_mod(period)
            };
            for &u in &site_units {
                site_avg += site
                    .coefficient(&rat((u * n1) as i64))
                    .norm_sq()
                    .abs();
            }
            site_avg /= site_units.len() as f64;
            local *= site_avg;
        }
        let scale = global.max(local).max(1e-30);
        if ((global - local) / scale).abs() > 1e-9 {
            checks.push(Check::fail(
                "block-average-factorization",
                format!("n₁ = {n1}"),
                format!("global {global:.3e} vs product of local {local:.3e}"),
            ));
        } else {
            checks.push(Check::pass(
                "block-average-factorization",
                format!("n₁ = {n1}, N₀ᵍ = {}", wl.n0_g),
            ));
        }
        // decay: n₁ must be supported on the ramified primes for the bound
        let n1_norm = (n1 as f64).sqrt();
        sup_ratio = sup_ratio.max(global * n1_norm);
    }
    checks.push(if sup_ratio <= locked {
        Check::pass(
            "block-average-decay",
            format!("sup over n₁ of √n₁ · average, n₁ ∈ {n1_values:?}"),
        )
        .with_measured(format!("{sup_ratio:.6}"))
        .with_locked(format!("{locked}"))
    } else {
        Check::fail(
            "block-average-decay",
            format!("n₁ ∈ {n1_values:?}"),
            format!("measured {sup_ratio:.6} exceeds locked {locked}"),
        )
        .with_measured(format!("{sup_ratio:.6}"))
        .with_locked(format!("{locked}"))
    });
    checks
}

/// Exhaustive q-range check for one representation: over the constructible
/// cells of K·a(ϖ^{n₁}) (all l ∈ [0, n] via upper/lower unipotent
/// components), q(g) stays within [n₀, n₀+m₁] and attains both endpoints.
pub fn q_range_check(rep: &LocalRep) -> Check {
    let p = rep.p();
    let n = rep.n();
    let n1 = rep.n1();
    let mut seen_l = vec![false; n as usize + 1];
    let mut q_min = u32::MAX;
    let mut q_max = 0u32;
    let mut bad = None;
    let mut visit = |k: Mat2| {
        if !k.in_k(p) {
            return;
        }
        let g = k.mul(&Mat2::a_diag(pi_pow(p, n1 as i64)));
        let pos = coset_position(&g, p, n);
        let n0_g = pos.l.min(n - pos.l);
        let shifted = n0_g as i64 - n1 as i64 + rep.m() as i64;
        let q = (rep.n0() as i64).max(shifted) as u32;
        seen_l[pos.l as usize] = true;
        q_min = q_min.min(q);
        q_max = q_max.max(q);
        if q < rep.n0() || q > rep.n0() + rep.m1() {
            bad = Some(format!("q = {q} outside [n₀, n₀+m₁] at l = {}", pos.l));
        }
    };
    for j in 0..=n {
        for u in 1..p.min(4) {
            visit(k_lower(p, j, u as i64));
            visit(k_upper(p, j, u as i64));
        }
    }
    let all_l = seen_l.iter().all(|&s| s);
    let endpoints = q_min == rep.n0() && q_max == rep.n0() + rep.m1();
    let params = format!("{}: l-range 0..={n}", rep.label());
    if let Some(c) = bad {
        Check::fail("whittaker-length-range", params, c)
    } else if !all_l {
        Check::fail(
            "whittaker-length-range",
            params,
            format!("cells missing: seen {seen_l:?}"),
        )
    } else if !endpoints {
        Check::fail(
            "whittaker-length-range",
            params,
            format!("q-range [{q_min}, {q_max}] misses [n₀, n₀+m₁] = [{}, {}]", rep.n0(), rep.n0() + rep.m1()),
        )
    } else {
        Check::pass("whittaker-length-range", params)
            .with_measured(format!("q ∈ [{q_min}, {q_max}]"))
    }
}

/// The generating-domain support property at one site: for every
/// constructible cell of K·a(ϖ^{n₁}) allowed by the generating-domain
/// condition, the expansion vanishes below −q(g) (scanned to the given
/// depth over unit classes).
pub fn domain_support_check(rep: &LocalRep, depth: u32) -> Check {
    let p = rep.p();
    let n = rep.n();
    let cal = calibrate(rep);
    let engine = Engine::new(cal.clone());
    let mut bad = None;
    let mut cells = 0usize;
    let mut visit = |k: Mat2, engine: &Engine| {
        let g = k.mul(&Mat2::a_diag(pi_pow(p, cal.n1() as i64)));
        let pos = coset_position(&g, p, n);
        if n % 2 == 1 && pos.l > cal.n0() {
            return false;
        }
        let n0_g = pos.l.min(n - pos.l);
        let shifted = n0_g as i64 - cal.n1() as i64 + cal.m() as i64;
        let q = (cal.n0() as i64).max(shifted) as u32;
        for d in 1..=depth {
            let j = -(q as i64) - d as i64;
            for u in 1..=2u64.min(p - 1) {
                let y = rat(u as i64) * pi_pow(p, j);
                let w = engine.eval(&Mat2::a_diag(y).mul(&g));
                if !w.is_zero() {
                    bad = Some(format!("W ≠ 0 at l = {}, v(y) = {j}", pos.l));
                }
            }
        }
        true
    };
    for j in 0..=n {
        for u in 1..p.min(3) {
            if visit(k_lower(p, j, u as i64), &engine) {
                cells += 1;
            }
            if visit(k_upper(p, j, u as i64), &engine) {
                cells += 1;
            }
        }
    }
    let params = format!("{}: {} admissible cells, depth {}", rep.label(), cells, depth);
    match bad {
        None => Check::pass("generating-domain-support", params),
        Some(c) => Check::fail("generating-domain-support", params, c),
    }
}
