//! The Whittaker newform engine: coefficient tables d_{t,l}(μ) and c_{t,l}(μ),
//! point evaluation W_π(g), and the verification battery for the support,
//! average-size, and Atkin–Lehner statements.
//!
//! Values live in the exact ring Q(ζ_M)[√q]. The tables are defined through
//! the local functional equation: with X := q^{1/2−s} and Y := X^{−1}, the
//! generating identity
//!
//!   ε(1/2, μπ)·Σ_t c_{t,l}(μ) X^{t+a(μπ)}·L(s, μπ)^{−1}
//!     = ω_π(−1)·(Σ_{a≥0} W_π(a(ϖ^a)) Y^a G(ϖ^{a−l}, μ^{−1}))·L(1−s, ·)^{−1}
//!
//! defines d_{t,l}(μ) as the Y-coefficients of the right side and
//! c_{t,l}(μ) = ε(1/2,μπ)^{−1} Σ_i h_i(Sat(μπ)) q^{−i/2} d_{t−i,l}(μ).
//! Point values are W(g) = ω_π(z)ψ(x)·Σ_{a(μ)≤l} c_{t,l}(μ)μ(v) on the coset
//! coordinates of g.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::chars::{enumerate_unit_chars, gauss_sum, psi, UnitChar};
use crate::padic::{coset_position, pi_pow, rat, Mat2};
use crate::report::Check;
use crate::reps::{complete_homogeneous, LocalRep};
use crate::value::SqrtExt;

/// Cached per-twist data: conductor, ε-factor, Satake parameters of μπ.
struct TwistInfo {
    mu: UnitChar,
    a_mu_pi: u32,
    eps_inv: SqrtExt,
    sat: Vec<SqrtExt>,
}

/// The Whittaker evaluation engine for one representation.
pub struct Engine {
    rep: LocalRep,
    twists: Vec<TwistInfo>,
    /// (μ-index, l) → t → d_{t,l}(μ).
    d_tables: Vec<Vec<BTreeMap<i64, SqrtExt>>>,
    c_cache: RefCell<HashMap<(i64, u32, usize), SqrtExt>>,
}

/// Unit representatives of (Z/p^j)^× (just 1 for j = 0).
pub fn unit_reps(p: u64, j: u32) -> Vec<BigRational> {
    if j == 0 {
        return vec![rat(1)];
    }
    let m = p.pow(j);
    (1..m).filter(|r| r % p != 0).map(|r| rat(r as i64)).collect()
}

fn poly_mul(p: u64, a: &[SqrtExt], b: &[SqrtExt]) -> Vec<SqrtExt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![SqrtExt::zero(p); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let add = ai * bj;
            out[i + j] = &out[i + j] + &add;
        }
    }
    out
}

impl Engine {
    /// Builds the engine: twist data for every μ with a(μ) ≤ n, then all
    /// d-tables. Dihedral entries should be calibrated first (see
    /// [`calibrate`]); an uncalibrated engine uses λ = 1.
    pub fn new(rep: LocalRep) -> Engine {
        let p = rep.p();
        let n = rep.n();
        let mus = enumerate_unit_chars(p, n);
        let twists: Vec<TwistInfo> = mus
            .into_iter()
            .map(|mu| {
                let (a_mu_pi, eps) = rep.twist_data(&mu);
                let nsq = eps.norm_sq();
                assert_eq!(nsq, SqrtExt::one(p), "|ε(1/2, μπ)| = 1");
                let eps_inv = eps.conj();
                let sat = rep.satake(&mu);
                TwistInfo {
                    mu,
                    a_mu_pi,
                    eps_inv,
                    sat,
                }
            })
            .collect();
        let mut engine = Engine {
            rep,
            twists,
            d_tables: Vec::new(),
            c_cache: RefCell::new(HashMap::new()),
        };
        engine.d_tables = (0..engine.twists.len())
            .map(|idx| (0..=n).map(|l| engine.build_d(idx, l)).collect())
            .collect();
        engine
    }

    /// The underlying representation.
    pub fn rep(&self) -> &LocalRep {
        &self.rep
    }

    /// The twisting characters μ ∈ X̃ with a(μ) ≤ n, in enumeration order.
    pub fn mus(&self) -> impl Iterator<Item = &UnitChar> {
        self.twists.iter().map(|t| &t.mu)
    }

    /// d_{·,l}(μ) as a finite map t → value.
    pub fn d_table(&self, mu_idx: usize, l: u32) -> &BTreeMap<i64, SqrtExt> {
        &self.d_tables[mu_idx][l as usize]
    }

    fn build_d(&self, mu_idx: usize, l: u32) -> BTreeMap<i64, SqrtExt> {
        let p = self.rep.p();
        let info = &self.twists[mu_idx];
        let r = info.mu.conductor();
        let one = SqrtExt::one(p);
        // P(Y) = ∏_{α ∈ Sat(μπ)} (1 − α q^{−1/2} Y)
        let mut pcoef = vec![one.clone()];
        for alpha in &info.sat {
            let factor = vec![
                one.clone(),
                -(alpha * &SqrtExt::q_pow_half(p, -1)),
            ];
            pcoef = poly_mul(p, &pcoef, &factor);
        }
        // the Y-polynomial of the right side, by the Gauss-sum support of
        // G(ϖ^{a−l}, μ^{−1}) in a
        let poly: Vec<SqrtExt> = if r == 0 && l == 0 {
            // Σ_a B(a)Y^a · P(Y) telescopes to 1
            vec![one]
        } else if r == 0 {
            // G = 1 for a ≥ l, −1/(q−1) at a = l−1, 0 below:
            // 1 − (Σ_{a<l} B(a)Y^a)P(Y) − (q−1)^{−1} B(l−1) Y^{l−1} P(Y)
            let qm1 = BigRational::new(BigInt::one(), BigInt::from(p - 1));
            let mut head: Vec<SqrtExt> = (0..l)
                .map(|a| self.rep.diagonal_whittaker(a))
                .collect();
            let extra = self.rep.diagonal_whittaker(l - 1).scale(&qm1);
            head[(l - 1) as usize] = &head[(l - 1) as usize] + &extra;
            let prod = poly_mul(p, &head, &pcoef);
            let mut out = vec![SqrtExt::zero(p); prod.len().max(1)];
            out[0] = one;
            for (k, c) in prod.into_iter().enumerate() {
                out[k] = &out[k] - &c;
            }
            out
        } else if r <= l {
            // ramified μ: the Gauss sum is supported at a = l − r alone
            let g = gauss_sum(p, &pi_pow(p, -(r as i64)), &info.mu.inverse())
                .expect("bounded modulus");
            let scalar = self
                .rep
                .diagonal_whittaker(l - r)
                .mul_cyclo(&g);
            let mut out = vec![SqrtExt::zero(p); (l - r) as usize];
            out.extend(pcoef.iter().map(|c| c * &scalar));
            out
        } else {
            // a(μ) > l: no torus point meets the Gauss-sum shell
            vec![]
        };
        let omega_m1 = self.rep.omega_at_minus_one();
        let mut table = BTreeMap::new();
        for (k, coef) in poly.into_iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            // the Y^k coefficient sits at t = −a(μπ) − k
            let t = -(info.a_mu_pi as i64) - k as i64;
            table.insert(t, coef.mul_cyclo(&omega_m1));
        }
        table
    }

    /// c_{t,l}(μ) = ε(1/2,μπ)^{−1}·Σ_{i≥0} h_i(Sat(μπ)) q^{−i/2} d_{t−i,l}(μ).
    pub fn c_value(&self, t: i64, l: u32, mu_idx: usize) -> SqrtExt {
        let key = (t, l, mu_idx);
        if let Some(v) = self.c_cache.borrow().get(&key) {
            return v.clone();
        }
        let p = self.rep.p();
        let info = &self.twists[mu_idx];
        let mut total = SqrtExt::zero(p);
        for (&td, dval) in &self.d_tables[mu_idx][l as usize] {
            let i = t - td;
            if i < 0 {
                continue;
            }
            let h = complete_homogeneous(p, &info.sat, i as usize);
            let term = &(&h * &SqrtExt::q_pow_half(p, -i)) * dval;
            total = &total + &term;
        }
        let out = &info.eps_inv * &total;
        self.c_cache.borrow_mut().insert(key, out.clone());
        out
    }

    /// W_π(g_{t,l,v}) = Σ_{a(μ) ≤ l} c_{t,l}(μ)·μ(v), for any unit v.
    pub fn eval_cell(&self, t: i64, l: u32, v: &BigRational) -> SqrtExt {
        let p = self.rep.p();
        let mut total = SqrtExt::zero(p);
        for (idx, info) in self.twists.iter().enumerate() {
            if info.mu.conductor() > l {
                continue;
            }
            let c = self.c_value(t, l, idx);
            if c.is_zero() {
                continue;
            }
            total = &total + &c.mul_cyclo(&info.mu.eval(v));
        }
        total
    }

    /// Whether every c_{t,l}(μ) vanishes (⟺ W ≡ 0 on the whole (t,l) row).
    pub fn row_is_zero(&self, t: i64, l: u32) -> bool {
        (0..self.twists.len()).all(|idx| {
            self.twists[idx].mu.conductor() > l
                || self.c_value(t, l, idx).is_zero()
        })
    }

    /// Full evaluation: coset coordinates of g, then the cell expansion.
    pub fn eval(&self, g: &Mat2) -> SqrtExt {
        let p = self.rep.p();
        let pos = coset_position(g, p, self.rep.n());
        let pre = &self.rep.omega_eval(&pos.z)
            * &psi(&pos.x, p).expect("bounded additive depth");
        let cell = self.eval_cell(pos.t, pos.l, &pos.v);
        cell.mul_cyclo(&pre)
    }

    /// ε(1/2, π).
    pub fn epsilon(&self) -> SqrtExt {
        self.rep.epsilon()
    }
}

/// Calibrates the dihedral λ(E/F, ψ): running the pipeline with λ = 1
/// evaluates W(1) to λ itself (the ε^{−1}-normalization scales every c-value
/// by λ), so the measured value is installed and |λ| = 1 is asserted.
/// Non-dihedral entries are returned unchanged.
pub fn calibrate(rep: &LocalRep) -> LocalRep {
    if !rep.is_supercuspidal() || rep.is_calibrated() {
        return rep.clone();
    }
    let p = rep.p();
    let probe = Engine::new(rep.clone());
    let lambda = probe.eval(&Mat2::identity());
    assert_eq!(
        lambda.norm_sq(),
        SqrtExt::one(p),
        "λ(E/F, ψ) must have unit modulus"
    );
    rep.clone().with_lambda(lambda)
}

/// Builds the engine for a calibrated representation.
pub fn engine_for(rep: &LocalRep) -> Engine {
    Engine::new(calibrate(rep))
}

/// The support floor −max(2l, l+m, n) of the (t, l) rows.
pub fn support_floor(rep: &LocalRep, l: u32) -> i64 {
    let m = rep.m() as i64;
    let n = rep.n() as i64;
    let l = l as i64;
    -(2 * l).max(l + m).max(n)
}

/// Exhaustive Atkin–Lehner verification over the window t ∈ [−2n−2, 2],
/// l ∈ [0, n], v over units mod p^{min(l, n−l)}:
/// W_{π̃}(g_{t,l,v}) = ε(1/2,π)·ω_π(v)·ψ(−ϖ^{t+l}v^{−1})·W_π(g_{t+2l−n, n−l, −v}).
pub fn atkin_lehner_verify(engine: &Engine, dual: &Engine) -> Vec<Check> {
    let rep = engine.rep();
    let p = rep.p();
    let n = rep.n() as i64;
    let eps = rep.epsilon();
    let mut checks = Vec::new();
    let unit_eps = eps.norm_sq() == SqrtExt::one(p);
    checks.push(if unit_eps {
        Check::pass("al-epsilon-unit-modulus", rep.label())
    } else {
        Check::fail("al-epsilon-unit-modulus", rep.label(), format!("{eps:?}"))
    });
    let mut failures = 0usize;
    let mut first_failure = None;
    let mut cells = 0usize;
    for l in 0..=rep.n() {
        let j = l.min(rep.n() - l);
        for t in (-2 * n - 2)..=2 {
            for v in unit_reps(p, j) {
                cells += 1;
                let lhs = dual.eval_cell(t, l, &v);
                let phase = &rep.omega_eval(&v)
                    * &psi(&(-pi_pow(p, t + l as i64) * v.recip()), p)
                        .expect("bounded depth");
                let rhs_cell =
                    engine.eval_cell(t + 2 * l as i64 - n, rep.n() - l, &(-&v));
                let rhs = (&eps * &rhs_cell).mul_cyclo(&phase);
                if lhs != rhs {
                    failures += 1;
                    if first_failure.is_none() {
                        first_failure = Some(format!(
                            "t={t} l={l} v={v}: lhs={:?} rhs={:?}",
                            lhs, rhs
                        ));
                    }
                }
            }
        }
    }
    checks.push(if failures == 0 {
        Check::pass(
            "al-identity-window",
            format!("{} ({cells} cells)", rep.label()),
        )
    } else {
        Check::fail(
            "al-identity-window",
            format!("{} ({failures}/{cells} cells failed)", rep.label()),
            first_failure.unwrap(),
        )
    });
    checks
}

/// The support / 𝒥-support / average-size verification battery.
///
/// Support: over the window, any (t, l) row with t strictly below
/// −max(2l, l+m, n) must vanish identically, and the two rows strictly below
/// the floor are checked explicitly. 𝒥-version: for g = k·a(ϖ^{n₁}) with
/// k ∈ K (sampled mod p^{n+1}) and n even or l(g) ≤ n₀:
/// W(a(y)g) ≠ 0 ⇒ v(y) ≥ −q(g), and the unit averages at v(y) = −q(g)+r
/// obey (avg_v |W(a(ϖ^b v)g)|²)^{1/2} ≤ C·q^{−r/4} with C measured.
pub fn verify_support_and_average(
    engine: &Engine,
    sample_ks: &[Mat2],
) -> Vec<Check> {
    let rep = engine.rep();
    let p = rep.p();
    let n = rep.n();
    let mut checks = Vec::new();

    // (i) reduced-window support with two explicit below-floor rows
    let mut violation = None;
    'outer: for l in 0..=n {
        let floor = support_floor(rep, l);
        for t in (floor - 2)..=(2 + 2 * n as i64) {
            if t < floor && !engine.row_is_zero(t, l) {
                violation = Some(format!("t={t} l={l} below floor {floor}"));
                break 'outer;
            }
        }
    }
    checks.push(match violation {
        None => Check::pass("support-floor", rep.label()),
        Some(cx) => Check::fail("support-floor", rep.label(), cx),
    });

    // (ii)+(iii) 𝒥-version: translate structure of k·a(ϖ^{n₁})
    let n1 = rep.n1();
    let mut max_ratio = 0.0f64;
    let mut j_violation = None;
    let mut invariance_violation = None;
    for k in sample_ks {
        let g = k.mul(&Mat2::a_diag(pi_pow(p, n1 as i64)));
        let pos = coset_position(&g, p, n);
        let l_g = pos.l;
        if n % 2 == 1 && l_g > rep.n0() {
            continue;
        }
        let n0_g = pos.n0_of_g() as i64;
        let q_g = (rep.n0() as i64).max(n0_g - n1 as i64 + rep.m() as i64);
        // strictly below −q(g): three rows must vanish for every unit v
        for b in (-q_g - 3)..(-q_g) {
            for v in unit_reps(p, n0_g as u32) {
                let w = engine.eval(
                    &Mat2::a_diag(pi_pow(p, b) * &v).mul(&g),
                );
                if !w.is_zero() {
                    j_violation = Some(format!(
                        "v(y)={b} < −q(g)={} at l(g)={l_g}",
                        -q_g
                    ));
                }
            }
        }
        // average size at v(y) = −q(g) + r, v over units mod p^{n₀(g)}
        for r_off in 0..=4i64 {
            let b = -q_g + r_off;
            let vs = unit_reps(p, n0_g as u32);
            let mut total = 0.0f64;
            for v in &vs {
                let w = engine.eval(
                    &Mat2::a_diag(pi_pow(p, b) * v).mul(&g),
                );
                total += w.norm_sq().to_complex().re;
            }
            let avg = total / vs.len() as f64;
            // C ≥ (avg)^{1/2}·q^{r/4}
            let ratio = avg.sqrt() * (p as f64).powf(r_off as f64 / 4.0);
            max_ratio = max_ratio.max(ratio);
        }
        // unit-translation invariance: |W(a(u₁y)g)| = |W(a(u₂y)g)| for
        // u₁ ≡ u₂ mod p^{n₀(g)}
        let b = -q_g + 1;
        for v in unit_reps(p, n0_g as u32).iter().take(2) {
            let shifted = v + rat(p.pow(n0_g as u32) as i64);
            let w1 = engine.eval(&Mat2::a_diag(pi_pow(p, b) * v).mul(&g));
            let w2 = engine.eval(&Mat2::a_diag(pi_pow(p, b) * &shifted).mul(&g));
            if w1.norm_sq() != w2.norm_sq() {
                invariance_violation =
                    Some(format!("v(y)={b}, u₁={v}, u₂={shifted}"));
            }
        }
    }
    checks.push(match j_violation {
        None => Check::pass(
            "j-support",
            format!("{} ({} translates)", rep.label(), sample_ks.len()),
        ),
        Some(cx) => Check::fail("j-support", rep.label(), cx),
    });
    checks.push(
        match invariance_violation {
            None => Check::pass("unit-translation-invariance", rep.label()),
            Some(cx) => {
                Check::fail("unit-translation-invariance", rep.label(), cx)
            }
        },
    );
    checks.push(
        Check::pass("average-size", rep.label())
            .with_measured(format!("{max_ratio:.6}")),
    );
    checks
}

/// The measured average-size constant C alone (for regression locking):
/// the supremum over reduced cells (l ≤ n₀, t = −max(n, l+m) + r, r ≤ r_max)
/// of (avg_{v mod p^l} |W(g_{t,l,v})|²)^{1/2}·q^{r/4}.
pub fn average_size_profile(engine: &Engine, r_max: i64) -> Vec<(i64, f64)> {
    let rep = engine.rep();
    let p = rep.p();
    let mut out = Vec::new();
    for r in 0..=r_max {
        let mut best = 0.0f64;
        for l in 0..=rep.n0() {
            let t = -(rep.n() as i64).max(l as i64 + rep.m() as i64) + r;
            let vs = unit_reps(p, l);
            let mut total = 0.0f64;
            for v in &vs {
                total += engine.eval_cell(t, l, v).norm_sq().to_complex().re;
            }
            let avg = total / vs.len() as f64;
            best = best.max(avg.sqrt() * (p as f64).powf(r as f64 / 4.0));
        }
        out.push((r, best));
    }
    out
}

/// The enumerated sup of |W_π| over the coset window, with the argmax cell
/// and an honest tail bound for the cells beyond the window.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SupScan {
    /// The representation label.
    pub label: String,
    /// max |W| over the window.
    pub sup: f64,
    /// The (t, l, v) cell attaining it.
    pub argmax: (i64, u32, String),
    /// Upper bound for |W| on cells with t beyond the window edge.
    pub tail_bound: f64,
    /// m₁ = max(0, m − n₁), flagged separately per the local Lindelöf shape.
    pub m1: u32,
}

/// Scans t ∈ [−2n−2, 2n+2], l ∈ [0, n], v over units mod p^{min(l,n−l)}.
pub fn sup_scan(engine: &Engine) -> SupScan {
    let rep = engine.rep();
    let p = rep.p();
    let n = rep.n();
    let t_edge = 2 * n as i64 + 2;
    let mut sup = 0.0f64;
    let mut argmax = (0i64, 0u32, String::from("1"));
    for l in 0..=n {
        let j = l.min(n - l);
        for t in (-2 * n as i64 - 2)..=t_edge {
            for v in unit_reps(p, j) {
                let w = engine.eval_cell(t, l, &v).abs();
                if w > sup {
                    sup = w;
                    argmax = (t, l, v.to_string());
                }
            }
        }
    }
    // beyond the edge: |c_{t,l}(μ)| ≤ Σ_td |d_td|·(i+1)·q^{−i/2} at i = t−td,
    // and Σ_{i≥Δ} (i+1)x^i ≤ (Δ+1)x^Δ/(1−x)² for x = q^{−1/2} (|α| ≤ 1 on the
    // tempered catalog, so |h_i| ≤ i+1)
    let x = (p as f64).powf(-0.5);
    let mut tail = 0.0f64;
    for l in 0..=n {
        let mut row = 0.0f64;
        for idx in 0..engine.twists.len() {
            if engine.twists[idx].mu.conductor() > l {
                continue;
            }
            for (&td, d) in engine.d_table(idx, l) {
                let delta = (t_edge + 1 - td).max(0) as f64;
                row += d.abs() * (delta + 1.0) * x.powf(delta) / (1.0 - x).powi(2);
            }
        }
        tail = tail.max(row);
    }
    SupScan {
        label: rep.label().to_string(),
        sup,
        argmax,
        tail_bound: tail,
        m1: rep.m1(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Cyclo;
    use crate::quadext::ExtType;
    use crate::reps::{build_catalog, pick_unit_char};

    fn small_catalog(p: u64, n_max: u32) -> Vec<LocalRep> {
        build_catalog(p, n_max).reps
    }

    #[test]
    fn d_table_structure_for_supercuspidals() {
        let rep = small_catalog(3, 2)
            .into_iter()
            .find(|r| r.is_supercuspidal())
            .unwrap();
        let engine = Engine::new(calibrate(&rep));
        let n = rep.n();
        // l = 0, μ = 1: the single entry d_{−n,0}(1) = ω_π(−1)
        let triv_idx = engine
            .twists
            .iter()
            .position(|t| t.mu.is_trivial())
            .unwrap();
        let table = engine.d_table(triv_idx, 0);
        assert_eq!(table.len(), 1);
        assert_eq!(
            table[&-(n as i64)],
            SqrtExt::from_cyclo(3, rep.omega_at_minus_one())
        );
        // L = 1 zero tables: a(μ) ∉ {l}, not (a(μ)=0, l=1) ⇒ identically zero
        for (idx, info) in engine.twists.iter().enumerate() {
            for l in 0..=n {
                let r = info.mu.conductor();
                let expect_zero = r != l && !(r == 0 && l == 1);
                if expect_zero {
                    assert!(
                        engine.d_table(idx, l).is_empty(),
                        "a(μ)={r} l={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn whittaker_is_one_at_identity_across_catalog() {
        for p in [2u64, 3] {
            for rep in small_catalog(p, 2) {
                let engine = engine_for(&rep);
                assert_eq!(
                    engine.eval(&Mat2::identity()),
                    SqrtExt::one(p),
                    "{}",
                    rep.label()
                );
            }
        }
    }

    #[test]
    fn diagonal_values_match_via_cell_machinery() {
        // W(a(ϖ^a)) computed through coset coordinates must reproduce the
        // closed diagonal values B(a), and vanish for v(y) < 0
        for rep in small_catalog(3, 2) {
            let engine = engine_for(&rep);
            for a in -2i64..=4 {
                let w = engine.eval(&Mat2::a_diag(pi_pow(3, a)));
                let expect = if a < 0 {
                    SqrtExt::zero(3)
                } else {
                    rep.diagonal_whittaker(a as u32)
                };
                assert_eq!(w, expect, "{} at a={a}", rep.label());
            }
        }
    }

    #[test]
    fn transformation_laws_hold() {
        let rep = small_catalog(3, 2)
            .into_iter()
            .find(|r| r.n() == 2 && !r.is_supercuspidal())
            .unwrap();
        let engine = engine_for(&rep);
        let g = Mat2::a_diag(rat(3)).mul(&Mat2::w()).mul(&Mat2::n(rat(2)));
        let w = engine.eval(&g);
        // W(n(x)g) = ψ(x)W(g)
        for x in [rat(1), BigRational::new(2.into(), 9.into())] {
            let lhs = engine.eval(&Mat2::n(x.clone()).mul(&g));
            assert_eq!(lhs, w.mul_cyclo(&psi(&x, 3).unwrap()));
        }
        // W(z(u)g) = ω(u)W(g)
        let units = [rat(2), rat(-1), BigRational::new(4.into(), 7.into())];
        for u in units {
            let lhs = engine.eval(&Mat2::z(u.clone()).mul(&g));
            assert_eq!(lhs, w.mul_cyclo(&rep.omega_eval(&u)));
        }
        // right K₁(p^n)-invariance on a few witnesses
        let k1s = [
            Mat2::from_i64(1, 5, 9, 1 + 9),
            Mat2::from_i64(1 + 9, 2, 18, 1),
        ];
        for k1 in &k1s {
            assert!(k1.in_k1(3, 2));
            assert_eq!(engine.eval(&g.mul(k1)), w);
        }
    }

    #[test]
    fn steinberg_alpha_decay_and_c_tail() {
        // Steinberg χ=1: the L-expansion coefficients α_i = h_i(Sat)q^{−i/2}
        // obey |α_0| = 1 and |α_i| ≤ q^{−i/2}; c-values along l=0 form the
        // matching geometric tail
        let rep = LocalRep::steinberg_twist(3, UnitChar::trivial(3), Cyclo::one());
        let engine = Engine::new(rep.clone());
        let triv = engine
            .twists
            .iter()
            .position(|t| t.mu.is_trivial())
            .unwrap();
        let sat = rep.satake(&UnitChar::trivial(3));
        for i in 0..6i64 {
            let alpha_i = &complete_homogeneous(3, &sat, i as usize)
                * &SqrtExt::q_pow_half(3, -i);
            let bound = (3.0f64).powf(-(i as f64) / 2.0);
            assert!(alpha_i.abs() <= bound + 1e-12, "i={i}");
            if i == 0 {
                assert_eq!(alpha_i, SqrtExt::one(3));
            }
        }
        // c_{t,0}(1) = ε^{−1}·α_{t+1}-type tail: ratio modulus q^{−1}·q^{−...}
        let c0 = engine.c_value(-1, 0, triv);
        let c1 = engine.c_value(0, 0, triv);
        assert!(!c0.is_zero() && !c1.is_zero());
        let ratio = c1.abs() / c0.abs();
        assert!(ratio <= (3.0f64).powf(-0.5) + 1e-12);
        // below the floor: zero
        assert!(engine.c_value(-2, 0, triv).is_zero());
    }

    #[test]
    fn atkin_lehner_window_for_small_reps() {
        // RamifiedPS p=3 n=1 and dihedral p=3 n=2: exact equality on the window
        let ps = LocalRep::ramified_ps(3, pick_unit_char(3, 1).unwrap(), Cyclo::one());
        let dih = small_catalog(3, 2)
            .into_iter()
            .find(|r| r.is_supercuspidal() && r.n() == 2)
            .unwrap();
        for rep in [ps, dih] {
            let rep = calibrate(&rep);
            let engine = Engine::new(rep.clone());
            let dual = Engine::new(rep.contragredient());
            let checks = atkin_lehner_verify(&engine, &dual);
            assert!(
                crate::report::all_ok(&checks),
                "{}: {checks:?}",
                rep.label()
            );
        }
    }

    #[test]
    fn lambda_is_xi_independent_and_squares_to_eta() {
        // λ(E/F, ψ) depends only on the extension: calibrate two distinct ξ
        // over the same E and compare; λ² = η_{E/F}(−1)
        use crate::quadext::{enumerate_echars, QuadExt};
        let p = 3u64;
        for ext_type in [ExtType::Unramified, ExtType::RamifiedPrime, ExtType::RamifiedTwisted] {
            let ext = QuadExt::new(p, ext_type);
            let mut lambdas = Vec::new();
            let mut seen = 0;
            for xi in enumerate_echars(&ext, 1) {
                if xi.conductor() != 1 {
                    continue;
                }
                let Some(rep) = LocalRep::try_dihedral(p, ext_type, xi.clone())
                else {
                    continue; // ξ Galois-invariant after renormalization
                };
                let cal = calibrate(&rep);
                lambdas.push(cal.lambda());
                seen += 1;
                if seen >= 2 {
                    break;
                }
            }
            assert!(!lambdas.is_empty(), "{ext_type:?}: no admissible ξ");
            for l in &lambdas {
                assert_eq!(l, &lambdas[0], "{ext_type:?}: λ must not depend on ξ");
                // λ² = η_{E/F}(−1)
                let eta_m1 = match ext_type {
                    ExtType::Unramified => 1i64,
                    _ => crate::quadext::legendre(p - 1, p) as i64,
                };
                assert_eq!(
                    l * l,
                    SqrtExt::from_integer(p, eta_m1),
                    "{ext_type:?}: λ² = η(−1)"
                );
            }
        }
    }

    #[test]
    fn dihedral_epsilon_functional_law_after_calibration() {
        for rep in small_catalog(3, 3) {
            if !rep.is_supercuspidal() {
                continue;
            }
            let cal = calibrate(&rep);
            let lhs = &cal.epsilon() * &cal.contragredient().epsilon();
            let rhs = SqrtExt::from_cyclo(3, cal.omega_at_minus_one());
            assert_eq!(lhs, rhs, "{}", cal.label());
        }
    }

    #[test]
    fn support_and_average_battery_small() {
        let mut ks = vec![
            Mat2::identity(),
            Mat2::w(),
            Mat2::from_i64(1, 2, 3, 7),
            Mat2::from_i64(2, 1, 1, 1),
            Mat2::from_i64(1, 0, 6, 1),
        ];
        ks.retain(|k| k.in_k(3));
        for rep in small_catalog(3, 2) {
            let engine = engine_for(&rep);
            let checks = verify_support_and_average(&engine, &ks);
            assert!(
                crate::report::all_ok(&checks),
                "{}: {checks:?}",
                rep.label()
            );
        }
    }

    #[test]
    fn sup_scan_reports_identity_lower_bound() {
        let rep = LocalRep::ramified_ps(3, pick_unit_char(3, 1).unwrap(), Cyclo::one());
        let scan = sup_scan(&engine_for(&rep));
        assert!(scan.sup >= 1.0 - 1e-12);
        assert!(scan.tail_bound.is_finite());
        assert_eq!(scan.m1, 0);
    }
}
