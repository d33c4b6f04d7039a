//! Catalog of generic irreducible admissible unitary representations of
//! GL₂(Q_p), with their conductors, central characters, twist conductors,
//! twist ε-factors at the central point, Satake data, and diagonal Whittaker
//! values.
//!
//! Four families are covered: unramified principal series, ramified principal
//! series π(χ₁, χ₂) with χ₂ unramified, twists of Steinberg, and dihedral
//! supercuspidals attached to characters of quadratic extensions (odd p).
//! Every catalog entry is normalized by an unramified twist so that
//! ω_π(ϖ) = 1; twisting characters μ below always denote characters of o^×
//! extended by μ(ϖ) = 1.

use num_rational::BigRational;

use crate::chars::{gl1_epsilon, UnitChar};
use crate::cyclo::Cyclo;
use crate::padic::rat;
use crate::quadext::{
    gl1_epsilon_e, legendre, norm_character, EChar, EElt, ExtType, QuadExt,
};
use crate::value::SqrtExt;

/// The defining data of a representation in the catalog.
#[derive(Debug, Clone)]
pub enum RepVariant {
    /// π(χ, χ^{−1}) with χ unramified, χ(ϖ) = α a root of unity (tempered).
    UnramifiedPS {
        /// The Satake parameter α.
        alpha: Cyclo,
    },
    /// π(χ₁, χ₂) with a(χ₁) = n ≥ 1 and χ₂ unramified. Normalization
    /// ω_π(ϖ) = 1 forces χ₁(ϖ) = β^{−1} where β = χ₂(ϖ).
    RamifiedPS {
        /// The unit-part character of χ₁ (conductor = n).
        chi1: UnitChar,
        /// β = χ₂(ϖ), a root of unity.
        beta: Cyclo,
    },
    /// χSt. For unramified χ this is the Steinberg line n = 1 with
    /// χ(ϖ) = ±1; for ramified χ, n = 2a(χ) and χ(ϖ) = ±1 keeps ω_π(ϖ) = 1.
    SteinbergTwist {
        /// The unit-part character of χ.
        chi: UnitChar,
        /// χ(ϖ) ∈ {1, −1}.
        chi_pi: Cyclo,
    },
    /// The supercuspidal attached to a character ξ of E^× not fixed by
    /// Gal(E/F), with ξ(ϖ_E) normalized so that ω_π(ϖ) = 1.
    DihedralSupercuspidal {
        /// The quadratic extension.
        ext: QuadExt,
        /// The inducing character.
        xi: EChar,
    },
}

/// A catalog representation with verified invariants.
#[derive(Debug, Clone)]
pub struct LocalRep {
    p: u64,
    variant: RepVariant,
    n: u32,
    omega: UnitChar,
    label: String,
    /// λ(E/F, ψ) for dihedral entries, fixed by the W(1) = 1 calibration.
    lambda: Option<SqrtExt>,
}

/// The complete homogeneous symmetric polynomial h_a of the given values
/// (h_0 = 1; the empty list gives the a = 0 indicator).
pub fn complete_homogeneous(p: u64, elems: &[SqrtExt], a: usize) -> SqrtExt {
    let mut h = vec![SqrtExt::zero(p); a + 1];
    h[0] = SqrtExt::one(p);
    for x in elems {
        for k in 1..=a {
            let add = x * &h[k - 1];
            h[k] = &h[k] + &add;
        }
    }
    h.pop().expect("nonempty by construction")
}

/// The quadratic-residue character of o^× (conductor 1), odd p.
pub fn quadratic_residue_char(p: u64) -> UnitChar {
    assert!(p % 2 == 1);
    let table = (0..p)
        .map(|r| {
            if r == 0 {
                None
            } else {
                Some(if legendre(r, p) == 1 { 0 } else { 1 })
            }
        })
        .collect();
    UnitChar::from_raw(p, 1, 2, table)
}

/// η_{E/F}(ϖ) as an exact ±1 (for the η_{E/F}·Ξ|_{F^×} central character).
fn eta_at_pi(ext: &QuadExt) -> Cyclo {
    match ext.ext_type() {
        // unramified quadratic character: −1 at the uniformizer
        ExtType::Unramified => -Cyclo::one(),
        _ => {
            // η kills norms and Nm(ϖ_E) = −D, so η(ϖ) = η_unit(−d_u)
            let p = ext.p();
            let d_u = match ext.ext_type() {
                ExtType::RamifiedPrime => 1,
                ExtType::RamifiedTwisted => ext.nu(),
                ExtType::Unramified => unreachable!(),
            };
            Cyclo::from_integer(legendre(p - d_u % p, p) as i64)
        }
    }
}

/// Sets ξ(ϖ_E) so that ω_π(ϖ) = η_{E/F}(ϖ)·Ξ(ϖ) = 1.
fn normalize_dihedral_pi_value(ext: &QuadExt, xi: EChar) -> EChar {
    match ext.ext_type() {
        ExtType::Unramified => xi.with_pi_value(-Cyclo::one()),
        _ => {
            let d_u = match ext.ext_type() {
                ExtType::RamifiedPrime => 1i64,
                ExtType::RamifiedTwisted => ext.nu() as i64,
                ExtType::Unramified => unreachable!(),
            };
            // ω(ϖ) = η(p)·ξ(ϖ_E)²·ξ(d_u)^{−1} = 1 solves ξ(ϖ_E)² = η(p)·ξ(d_u)
            let target = &xi.eval_unit(ext, &EElt::from_f(rat(d_u))) * &eta_at_pi(ext);
            let root = target
                .sqrt_root_of_unity()
                .expect("target is a root of unity");
            xi.with_pi_value(root)
        }
    }
}

impl LocalRep {
    /// The unramified principal series with Satake parameter α (root of unity).
    pub fn unramified_ps(p: u64, alpha: Cyclo) -> LocalRep {
        assert!(
            alpha.root_order(1 << 20).is_some(),
            "tempered catalog: α must be a root of unity"
        );
        let label = format!("p{p}-n0-ps-unram[alpha={alpha}]");
        LocalRep {
            p,
            variant: RepVariant::UnramifiedPS { alpha },
            n: 0,
            omega: UnitChar::trivial(p),
            label,
            lambda: None,
        }
    }

    /// The ramified principal series π(χ₁, χ₂), χ₂ unramified with value β.
    pub fn ramified_ps(p: u64, chi1: UnitChar, beta: Cyclo) -> LocalRep {
        let n = chi1.conductor();
        assert!(n >= 1, "χ₁ must be ramified");
        assert!(beta.root_order(1 << 20).is_some(), "unitary: |β| = 1");
        let label = format!("p{p}-n{n}-ps-ram[a={n},beta={beta}]");
        LocalRep {
            p,
            variant: RepVariant::RamifiedPS {
                chi1: chi1.clone(),
                beta,
            },
            n,
            omega: chi1,
            label,
            lambda: None,
        }
    }

    /// The Steinberg twist χSt with χ(ϖ) = ±1.
    pub fn steinberg_twist(p: u64, chi: UnitChar, chi_pi: Cyclo) -> LocalRep {
        assert!(
            chi_pi == Cyclo::one() || chi_pi == -Cyclo::one(),
            "ω_π(ϖ) = 1 forces χ(ϖ) = ±1"
        );
        let a = chi.conductor();
        let n = (2 * a).max(1);
        let omega = chi.square();
        let label = if a == 0 {
            format!("p{p}-n1-st[chi_pi={chi_pi}]")
        } else {
            format!("p{p}-n{n}-st-ram[a={a},chi_pi={chi_pi}]")
        };
        LocalRep {
            p,
            variant: RepVariant::SteinbergTwist { chi, chi_pi },
            n,
            omega,
            label,
            lambda: None,
        }
    }

    /// The dihedral supercuspidal attached to (E, ξ); ξ(ϖ_E) is renormalized
    /// so that ω_π(ϖ) = 1.
    pub fn dihedral(p: u64, ext_type: ExtType, xi: EChar) -> LocalRep {
        let ext = QuadExt::new(p, ext_type);
        let xi = normalize_dihedral_pi_value(&ext, xi);
        Self::dihedral_from_normalized(ext, xi)
    }

    /// Like [`LocalRep::dihedral`], but returns None for regular-enough data:
    /// ξ that become σ-invariant after the ϖ_E renormalization induce
    /// principal-series, not supercuspidals.
    pub fn try_dihedral(p: u64, ext_type: ExtType, xi: EChar) -> Option<LocalRep> {
        let ext = QuadExt::new(p, ext_type);
        if xi.conductor() == 0 {
            return None;
        }
        let xi = normalize_dihedral_pi_value(&ext, xi);
        if xi.is_galois_invariant(&ext) {
            return None;
        }
        Some(Self::dihedral_from_normalized(ext, xi))
    }

    /// Builds a dihedral entry from an already ω-normalized ξ (used by
    /// the contragredient, which must not re-solve the ϖ_E-value).
    fn dihedral_from_normalized(ext: QuadExt, xi: EChar) -> LocalRep {
        let p = ext.p();
        let a_e = xi.conductor();
        assert!(a_e >= 1, "dihedral data must be ramified over E");
        assert!(
            !xi.is_galois_invariant(&ext),
            "ξ = ξ^σ is not supercuspidal"
        );
        let n = ext.different_exponent() + ext.f() * a_e;
        // ω_π = η_{E/F}·ξ|_{F^×}
        let eta_unit = match ext.ext_type() {
            ExtType::Unramified => UnitChar::trivial(p),
            _ => quadratic_residue_char(p),
        };
        let (xi_f, _) = xi.restrict_to_f(&ext);
        let omega = eta_unit.mul(&xi_f);
        let omega_pi =
            &eta_at_pi(&ext) * &xi.eval(&ext, &EElt::from_f(rat(p as i64)));
        assert_eq!(omega_pi, Cyclo::one(), "ω_π(ϖ) = 1 normalization");
        let m = omega.conductor();
        assert!(m <= n / 2, "supercuspidal central conductor m ≤ n₀");
        let tag = match ext.ext_type() {
            ExtType::Unramified => "unram",
            ExtType::RamifiedPrime => "ram-p",
            ExtType::RamifiedTwisted => "ram-nup",
        };
        let label = format!("p{p}-n{n}-dih-{tag}[aE={a_e},order={}]", xi.value_order());
        LocalRep {
            p,
            variant: RepVariant::DihedralSupercuspidal { ext, xi },
            n,
            omega,
            label,
            lambda: None,
        }
    }

    /// The residue characteristic.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The conductor exponent n = a(π).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// n₀ = ⌊n/2⌋.
    pub fn n0(&self) -> u32 {
        self.n / 2
    }

    /// n₁ = ⌈n/2⌉.
    pub fn n1(&self) -> u32 {
        self.n.div_ceil(2)
    }

    /// The central character's unit part (ω_π(ϖ) = 1 by normalization).
    pub fn omega(&self) -> &UnitChar {
        &self.omega
    }

    /// m = a(ω_π).
    pub fn m(&self) -> u32 {
        self.omega.conductor()
    }

    /// m₁ = max(0, m − n₁).
    pub fn m1(&self) -> u32 {
        self.m().saturating_sub(self.n1())
    }

    /// The variant data.
    pub fn variant(&self) -> &RepVariant {
        &self.variant
    }

    /// A short human-readable identifier.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether π is supercuspidal.
    pub fn is_supercuspidal(&self) -> bool {
        matches!(self.variant, RepVariant::DihedralSupercuspidal { .. })
    }

    /// λ(E/F, ψ) for dihedral entries (1 until calibrated; 1 exactly for the
    /// other variants).
    pub fn lambda(&self) -> SqrtExt {
        self.lambda.clone().unwrap_or_else(|| SqrtExt::one(self.p))
    }

    /// Whether the dihedral λ has been fixed by calibration.
    pub fn is_calibrated(&self) -> bool {
        self.lambda.is_some() || !self.is_supercuspidal()
    }

    /// Returns the entry with λ(E/F, ψ) installed.
    pub fn with_lambda(mut self, lambda: SqrtExt) -> LocalRep {
        assert!(self.is_supercuspidal(), "λ applies to dihedral entries only");
        self.lambda = Some(lambda);
        self
    }

    /// ω_π(x) for any nonzero x (ω_π(ϖ) = 1, so only the unit part acts).
    pub fn omega_eval(&self, x: &BigRational) -> Cyclo {
        self.omega.eval(x)
    }

    /// ω_π(−1).
    pub fn omega_at_minus_one(&self) -> Cyclo {
        self.omega.at_minus_one()
    }

    /// The conductor exponent a(μπ) for μ ∈ X̃ with unit part `mu`.
    pub fn twist_conductor(&self, mu: &UnitChar) -> u32 {
        match &self.variant {
            RepVariant::UnramifiedPS { .. } => {
                if mu.is_trivial() {
                    0
                } else {
                    2 * mu.conductor()
                }
            }
            RepVariant::RamifiedPS { chi1, .. } => {
                chi1.mul(mu).conductor() + mu.conductor()
            }
            RepVariant::SteinbergTwist { chi, .. } => {
                (2 * chi.mul(mu).conductor()).max(1)
            }
            RepVariant::DihedralSupercuspidal { ext, xi } => {
                let xip = self.twisted_echar(ext, xi, mu);
                ext.different_exponent() + ext.f() * xip.conductor()
            }
        }
    }

    /// ξ·(μ∘Nm) at a level where both factors are faithful.
    fn twisted_echar(&self, ext: &QuadExt, xi: &EChar, mu: &UnitChar) -> EChar {
        if mu.is_trivial() {
            return xi.clone();
        }
        let r = (ext.e() * mu.conductor()).max(1);
        let mu_e = norm_character(ext, mu, r);
        xi.mul(ext, &mu_e)
    }

    /// ε(1/2, μπ, ψ) for μ ∈ X̃.
    pub fn twist_epsilon(&self, mu: &UnitChar) -> SqrtExt {
        let p = self.p;
        match &self.variant {
            RepVariant::UnramifiedPS { alpha } => {
                let alpha_inv = alpha
                    .try_invert()
                    .expect("root-of-unity Satake parameter");
                let e1 = gl1_epsilon(p, mu, alpha).expect("small modulus");
                let e2 = gl1_epsilon(p, mu, &alpha_inv).expect("small modulus");
                &e1 * &e2
            }
            RepVariant::RamifiedPS { chi1, beta } => {
                let beta_inv =
                    beta.try_invert().expect("root-of-unity χ₂(ϖ)");
                let e1 = gl1_epsilon(p, &chi1.mul(mu), &beta_inv)
                    .expect("small modulus");
                let e2 = gl1_epsilon(p, mu, beta).expect("small modulus");
                &e1 * &e2
            }
            RepVariant::SteinbergTwist { chi, chi_pi } => {
                let eta = chi.mul(mu);
                if eta.is_trivial() {
                    // ε(1/2, ηSt) = −η(ϖ) for unramified η; η(ϖ) = χ(ϖ)
                    -SqrtExt::from_cyclo(p, chi_pi.clone())
                } else {
                    let e = gl1_epsilon(p, &eta, chi_pi).expect("small modulus");
                    &e * &e
                }
            }
            RepVariant::DihedralSupercuspidal { ext, xi } => {
                let xip = self.twisted_echar(ext, xi, mu);
                let eps_e = gl1_epsilon_e(ext, &xip).expect("small modulus");
                &self.lambda() * &eps_e
            }
        }
    }

    /// ε(1/2, π, ψ).
    pub fn epsilon(&self) -> SqrtExt {
        self.twist_epsilon(&UnitChar::trivial(self.p))
    }

    /// (a(μπ), ε(1/2, μπ)) together — for dihedral entries this shares one
    /// ξ·(μ∘Nm) construction instead of two.
    pub fn twist_data(&self, mu: &UnitChar) -> (u32, SqrtExt) {
        match &self.variant {
            RepVariant::DihedralSupercuspidal { ext, xi } => {
                let xip = self.twisted_echar(ext, xi, mu);
                let a = ext.different_exponent() + ext.f() * xip.conductor();
                let eps_e = gl1_epsilon_e(ext, &xip).expect("small modulus");
                (a, &self.lambda() * &eps_e)
            }
            _ => (self.twist_conductor(mu), self.twist_epsilon(mu)),
        }
    }

    /// The Satake parameters of μπ: the values α with
    /// L(s, μπ) = ∏_α (1 − α q^{−s})^{−1} (empty when L(s, μπ) = 1).
    pub fn satake(&self, mu: &UnitChar) -> Vec<SqrtExt> {
        let p = self.p;
        match &self.variant {
            RepVariant::UnramifiedPS { alpha } => {
                if mu.is_trivial() {
                    let inv = alpha
                        .try_invert()
                        .expect("root-of-unity Satake parameter");
                    vec![
                        SqrtExt::from_cyclo(p, alpha.clone()),
                        SqrtExt::from_cyclo(p, inv),
                    ]
                } else {
                    vec![]
                }
            }
            RepVariant::RamifiedPS { chi1, beta } => {
                let mut out = Vec::new();
                if mu.is_trivial() {
                    out.push(SqrtExt::from_cyclo(p, beta.clone()));
                }
                if chi1.mul(mu).is_trivial() {
                    let inv = beta.try_invert().expect("root-of-unity χ₂(ϖ)");
                    out.push(SqrtExt::from_cyclo(p, inv));
                }
                out
            }
            RepVariant::SteinbergTwist { chi, chi_pi } => {
                if chi.mul(mu).is_trivial() {
                    // L(s, μχSt) = (1 − χ(ϖ)q^{−1/2}q^{−s})^{−1}
                    vec![
                        &SqrtExt::from_cyclo(p, chi_pi.clone())
                            * &SqrtExt::q_pow_half(p, -1),
                    ]
                } else {
                    vec![]
                }
            }
            RepVariant::DihedralSupercuspidal { .. } => vec![],
        }
    }

    /// The diagonal Whittaker value W_π(a(ϖ^a)) = q^{−a/2}·h_a(Sat(π)).
    pub fn diagonal_whittaker(&self, a: u32) -> SqrtExt {
        let sat = self.satake(&UnitChar::trivial(self.p));
        let h = complete_homogeneous(self.p, &sat, a as usize);
        &SqrtExt::q_pow_half(self.p, -(a as i64)) * &h
    }

    /// The contragredient π̃ ≅ π ⊗ ω_π^{−1}.
    pub fn contragredient(&self) -> LocalRep {
        let mut out = match &self.variant {
            RepVariant::UnramifiedPS { .. } => self.clone(),
            RepVariant::RamifiedPS { chi1, beta } => {
                let beta_inv = beta.try_invert().expect("root of unity");
                LocalRep::ramified_ps(self.p, chi1.inverse(), beta_inv)
            }
            RepVariant::SteinbergTwist { chi, chi_pi } => {
                LocalRep::steinberg_twist(self.p, chi.inverse(), chi_pi.clone())
            }
            RepVariant::DihedralSupercuspidal { ext, xi } => {
                LocalRep::dihedral_from_normalized(ext.clone(), xi.inverse(ext))
            }
        };
        out.label = format!("{}~", self.label);
        // λ(E/F, ψ) depends only on the extension, not on ξ
        out.lambda = self.lambda.clone();
        out
    }
}

/// A built catalog: entries plus coverage notes for absent combinations.
#[derive(Debug, Clone)]
pub struct Catalog {
    /// The representations.
    pub reps: Vec<LocalRep>,
    /// Human-readable notes on unrealizable (variant, n) combinations.
    pub notes: Vec<String>,
}

/// The character of o^× of exact conductor `cond` with the smallest order,
/// if one exists.
pub fn pick_unit_char(p: u64, cond: u32) -> Option<UnitChar> {
    crate::chars::enumerate_unit_chars(p, cond)
        .into_iter()
        .filter(|c| c.conductor() == cond)
        .min_by_key(|c| c.order())
}

fn pick_dihedral(p: u64, ext_type: ExtType, a_e: u32) -> Option<LocalRep> {
    let ext = QuadExt::new(p, ext_type);
    let mut candidates: Vec<EChar> = crate::quadext::enumerate_echars(&ext, a_e)
        .into_iter()
        .filter(|x| x.conductor() == a_e)
        .map(|x| normalize_dihedral_pi_value(&ext, x))
        .filter(|x| !x.is_galois_invariant(&ext))
        .collect();
    candidates.sort_by_key(|x| x.value_order());
    candidates
        .into_iter()
        .next()
        .map(|xi| LocalRep::dihedral_from_normalized(ext, xi))
}

/// Builds the test catalog at p: at least one entry for every variant and
/// conductor n ≤ n_max realizable at p, with notes for the absent combos.
pub fn build_catalog(p: u64, n_max: u32) -> Catalog {
    let mut reps = Vec::new();
    let mut notes = Vec::new();
    // n = 0: unramified principal series (tempered)
    reps.push(LocalRep::unramified_ps(p, Cyclo::one()));
    if let Ok(zeta3) = Cyclo::root_of_unity(3, 1) {
        reps.push(LocalRep::unramified_ps(p, zeta3));
    }
    if n_max >= 1 {
        // n = 1: Steinberg and its unramified quadratic twist
        reps.push(LocalRep::steinberg_twist(p, UnitChar::trivial(p), Cyclo::one()));
        reps.push(LocalRep::steinberg_twist(
            p,
            UnitChar::trivial(p),
            -Cyclo::one(),
        ));
    }
    for n in 1..=n_max {
        // ramified principal series of conductor n
        match pick_unit_char(p, n) {
            Some(chi1) => reps.push(LocalRep::ramified_ps(p, chi1, Cyclo::one())),
            None => notes.push(format!(
                "p={p}, n={n}: no ramified principal series (no character of o^× has conductor {n})"
            )),
        }
        // ramified Steinberg twists at even n = 2a ≥ 2
        if n >= 2 {
            if n % 2 == 0 {
                match pick_unit_char(p, n / 2) {
                    Some(chi) => {
                        reps.push(LocalRep::steinberg_twist(p, chi, Cyclo::one()))
                    }
                    None => notes.push(format!(
                        "p={p}, n={n}: no ramified Steinberg twist (no character of conductor {})",
                        n / 2
                    )),
                }
            } else {
                notes.push(format!(
                    "p={p}, n={n}: Steinberg twists have even conductor 2a(χ) ≥ 2 or conductor 1"
                ));
            }
        }
        // dihedral supercuspidals
        if n >= 2 {
            if p == 2 {
                notes.push(format!(
                    "p=2, n={n}: dihedral supercuspidals unsupported at p=2 (exceptional cases excluded)"
                ));
            } else {
                if n % 2 == 0 {
                    match pick_dihedral(p, ExtType::Unramified, n / 2) {
                        Some(rep) => reps.push(rep),
                        None => notes.push(format!(
                            "p={p}, n={n}: no admissible ξ over the unramified extension at a_E={}",
                            n / 2
                        )),
                    }
                } else {
                    notes.push(format!(
                        "p={p}, n={n}: unramified-extension dihedrals have even conductor 2a_E(ξ)"
                    ));
                }
                for ext_type in [ExtType::RamifiedPrime, ExtType::RamifiedTwisted] {
                    // keep the catalog lean: one ramified-extension entry per n,
                    // alternating the extension so both appear across conductors
                    let use_this = match ext_type {
                        ExtType::RamifiedPrime => n % 2 == 0,
                        _ => n % 2 == 1,
                    };
                    if !use_this {
                        continue;
                    }
                    match pick_dihedral(p, ext_type, n - 1) {
                        Some(rep) => reps.push(rep),
                        None => notes.push(format!(
                            "p={p}, n={n}: no admissible ξ over {ext_type:?} at a_E={}",
                            n - 1
                        )),
                    }
                }
            }
        } else if n == 1 && p != 2 {
            notes.push(format!(
                "p={p}, n=1: supercuspidals have conductor ≥ 2"
            ));
        }
    }
    Catalog { reps, notes }
}

/// The exact twist-count report for a cell 0 ≤ l ≤ n₀: the number of μ with
/// a(μ) = l and a(μπ) = max(n, l+m) − r, for each r, against the bound
/// q^{l − r/2}, together with the conductor bound a(μπ) ≤ max(n, l+m).
#[derive(Debug, Clone, serde::Serialize)]
pub struct TwistCountReport {
    /// The prime.
    pub p: u64,
    /// The representation label.
    pub label: String,
    /// The twist conductor a(μ) = l.
    pub l: u32,
    /// max(n, l + m), the top of the twisted-conductor range.
    pub max_cond: u32,
    /// (r, count) pairs for every nonzero count.
    pub counts_by_r: Vec<(u32, u64)>,
    /// Whether every count satisfies count ≤ q^{l − r/2}.
    pub count_bound_ok: bool,
    /// Whether a(μπ) ≤ max(n, l + m) for every μ of conductor l.
    pub conductor_bound_ok: bool,
}

/// Enumerates all μ of conductor exactly l and checks the twisted-conductor
/// count bound and range bound.
pub fn twist_count_bound_check(rep: &LocalRep, l: u32) -> TwistCountReport {
    let p = rep.p();
    let max_cond = rep.n().max(l + rep.m());
    let mut counts: std::collections::BTreeMap<u32, u64> = Default::default();
    let mut conductor_bound_ok = true;
    for mu in crate::chars::enumerate_unit_chars(p, l) {
        if mu.conductor() != l {
            continue;
        }
        let a = rep.twist_conductor(&mu);
        if a > max_cond {
            conductor_bound_ok = false;
            continue;
        }
        *counts.entry(max_cond - a).or_insert(0) += 1;
    }
    // count ≤ q^{l−r/2} ⟺ count² ≤ q^{2l−r} (and r > 2l forces count = 0)
    let count_bound_ok = counts.iter().all(|(&r, &c)| {
        if r > 2 * l {
            false
        } else {
            (c as u128).pow(2) <= (p as u128).pow(2 * l - r)
        }
    });
    TwistCountReport {
        p,
        label: rep.label().to_string(),
        l,
        max_cond,
        counts_by_r: counts.into_iter().collect(),
        count_bound_ok,
        conductor_bound_ok,
    }
}

/// A JSON-exportable summary of a catalog entry.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CatalogSummary {
    /// The entry label.
    pub label: String,
    /// The prime.
    pub p: u64,
    /// Variant name.
    pub variant: String,
    /// Conductor exponent n = a(π).
    pub n: u32,
    /// n₀ = ⌊n/2⌋.
    pub n0: u32,
    /// n₁ = ⌈n/2⌉.
    pub n1: u32,
    /// m = a(ω_π).
    pub m: u32,
    /// m₁ = max(0, m − n₁).
    pub m1: u32,
    /// Order of ω_π on units.
    pub omega_order: u64,
    /// ε(1/2, π) as a complex approximation "re+im i".
    pub epsilon: String,
    /// Whether the dihedral λ has been calibrated in.
    pub calibrated: bool,
}

impl LocalRep {
    /// The JSON-exportable summary.
    pub fn summary(&self) -> CatalogSummary {
        let eps = self.epsilon().to_complex();
        CatalogSummary {
            label: self.label.clone(),
            p: self.p,
            variant: match &self.variant {
                RepVariant::UnramifiedPS { .. } => "unramified-principal-series",
                RepVariant::RamifiedPS { .. } => "ramified-principal-series",
                RepVariant::SteinbergTwist { .. } => "steinberg-twist",
                RepVariant::DihedralSupercuspidal { .. } => "dihedral-supercuspidal",
            }
            .to_string(),
            n: self.n,
            n0: self.n0(),
            n1: self.n1(),
            m: self.m(),
            m1: self.m1(),
            omega_order: self.omega.order(),
            epsilon: format!("{:+.12}{:+.12}i", eps.re, eps.im),
            calibrated: self.is_calibrated(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::enumerate_unit_chars;

    #[test]
    fn catalog_invariants_hold() {
        for p in [2u64, 3, 5] {
            let cat = build_catalog(p, 3);
            for rep in &cat.reps {
                assert!(rep.m() <= rep.n(), "{}: m ≤ n", rep.label());
                if rep.is_supercuspidal() {
                    assert!(rep.m() <= rep.n0(), "{}: m ≤ n₀", rep.label());
                }
                assert_eq!(rep.n0() + rep.n1(), rep.n());
                // identity twist recovers the conductor
                assert_eq!(
                    rep.twist_conductor(&UnitChar::trivial(p)),
                    rep.n(),
                    "{}",
                    rep.label()
                );
            }
            // coverage: at p=2 there are no dihedral entries, with a note
            if p == 2 {
                assert!(cat.reps.iter().all(|r| !r.is_supercuspidal()));
                assert!(cat.notes.iter().any(|s| s.contains("dihedral")));
            } else {
                assert!(cat.reps.iter().any(|r| r.is_supercuspidal()));
            }
        }
    }

    #[test]
    fn catalog_has_expected_small_entries() {
        let cat = build_catalog(3, 2);
        let has = |pred: &dyn Fn(&LocalRep) -> bool| cat.reps.iter().any(pred);
        assert!(has(&|r| matches!(r.variant(), RepVariant::UnramifiedPS { .. })));
        assert!(has(&|r| r.n() == 1
            && matches!(r.variant(), RepVariant::SteinbergTwist { .. })));
        assert!(has(&|r| r.n() == 1
            && matches!(r.variant(), RepVariant::RamifiedPS { .. })));
        // dihedral from the unramified extension with a_E(ξ) = 1 at n = 2
        assert!(has(&|r| r.n() == 2 && r.is_supercuspidal()));
    }

    #[test]
    fn twist_conductor_examples() {
        // Steinberg, a(μ) = 1 ⇒ a(μSt) = 2
        let st = LocalRep::steinberg_twist(3, UnitChar::trivial(3), Cyclo::one());
        let mu = pick_unit_char(3, 1).unwrap();
        assert_eq!(st.twist_conductor(&mu), 2);
        // RamifiedPS with a(χ₁) = 2: a(μπ) = a(μχ₁) + a(μ) = 2 + 1 = 3 = max(n, l+m)
        let chi1 = pick_unit_char(3, 2).unwrap();
        let ps = LocalRep::ramified_ps(3, chi1, Cyclo::one());
        assert_eq!(ps.m(), 2);
        assert_eq!(ps.twist_conductor(&mu), 3);
        assert_eq!(ps.n().max(1 + ps.m()), 3);
    }

    #[test]
    fn twist_count_bounds_on_catalog() {
        // l = 0: the single character μ = 1 sits at r = 0
        let st = LocalRep::steinberg_twist(3, UnitChar::trivial(3), Cyclo::one());
        let rep0 = twist_count_bound_check(&st, 0);
        assert_eq!(rep0.counts_by_r, vec![(0, 1)]);
        assert!(rep0.count_bound_ok && rep0.conductor_bound_ok);
        // p=3 RamifiedPS n=2 and p=5 dihedral n=2, at l = 1
        let ps = LocalRep::ramified_ps(3, pick_unit_char(3, 2).unwrap(), Cyclo::one());
        let r1 = twist_count_bound_check(&ps, 1);
        assert!(r1.count_bound_ok && r1.conductor_bound_ok, "{r1:?}");
        let cat5 = build_catalog(5, 2);
        let dih = cat5
            .reps
            .iter()
            .find(|r| r.is_supercuspidal() && r.n() == 2)
            .unwrap();
        let r2 = twist_count_bound_check(dih, 1);
        assert!(r2.count_bound_ok && r2.conductor_bound_ok, "{r2:?}");
    }

    #[test]
    fn diagonal_whittaker_values() {
        // any π at a = 0 gives 1
        for p in [2u64, 3] {
            for rep in build_catalog(p, 2).reps {
                assert_eq!(rep.diagonal_whittaker(0), SqrtExt::one(p), "{}", rep.label());
            }
        }
        // supercuspidal at a = 1 gives 0
        let dih = build_catalog(3, 2)
            .reps
            .into_iter()
            .find(|r| r.is_supercuspidal())
            .unwrap();
        assert!(dih.diagonal_whittaker(1).is_zero());
        // Steinberg (χ = 1) at a = 1 gives q^{−1}
        let st = LocalRep::steinberg_twist(3, UnitChar::trivial(3), Cyclo::one());
        assert_eq!(
            st.diagonal_whittaker(1),
            SqrtExt::from_rational(3, BigRational::new(1.into(), 3.into()))
        );
        // RamifiedPS: β^a q^{−a/2}
        let ps = LocalRep::ramified_ps(3, pick_unit_char(3, 1).unwrap(), -Cyclo::one());
        let expect = &SqrtExt::from_cyclo(3, -Cyclo::one()) * &SqrtExt::q_pow_half(3, -1);
        assert_eq!(ps.diagonal_whittaker(1), expect);
        // UnramifiedPS: q^{−1/2}(α + α^{−1})
        let alpha = Cyclo::root_of_unity(3, 1).unwrap();
        let ups = LocalRep::unramified_ps(3, alpha.clone());
        let sum = &alpha + &alpha.try_invert().unwrap();
        let expect =
            &SqrtExt::from_cyclo(3, sum) * &SqrtExt::q_pow_half(3, -1);
        assert_eq!(ups.diagonal_whittaker(1), expect);
    }

    #[test]
    fn contragredient_involution_and_invariants() {
        for p in [3u64, 5] {
            for rep in build_catalog(p, 2).reps {
                let dual = rep.contragredient();
                assert_eq!(dual.n(), rep.n(), "{}", rep.label());
                assert_eq!(dual.m(), rep.m());
                assert_eq!(*dual.omega(), rep.omega().inverse());
                // double dual recovers π (same invariants and diagonal values)
                let dd = dual.contragredient();
                for a in 0..=3u32 {
                    assert_eq!(
                        dd.diagonal_whittaker(a),
                        rep.diagonal_whittaker(a),
                        "{}",
                        rep.label()
                    );
                }
                assert_eq!(dd.epsilon(), rep.epsilon());
            }
        }
    }

    #[test]
    fn epsilon_functional_law_for_non_dihedral() {
        // ε(1/2, π)·ε(1/2, π̃) = ω_π(−1), exactly (dihedral entries need the
        // calibrated λ and are covered downstream)
        for p in [2u64, 3, 5] {
            for rep in build_catalog(p, 3).reps {
                if rep.is_supercuspidal() {
                    continue;
                }
                let lhs = &rep.epsilon() * &rep.contragredient().epsilon();
                let rhs = SqrtExt::from_cyclo(p, rep.omega_at_minus_one());
                assert_eq!(lhs, rhs, "{}", rep.label());
            }
        }
    }

    #[test]
    fn twist_epsilon_has_unit_modulus() {
        let mus: Vec<UnitChar> = enumerate_unit_chars(3, 1);
        for rep in build_catalog(3, 2).reps {
            for mu in &mus {
                let eps = rep.twist_epsilon(mu);
                assert_eq!(
                    eps.norm_sq(),
                    SqrtExt::one(3),
                    "{} twisted by conductor-{} char",
                    rep.label(),
                    mu.conductor()
                );
            }
        }
    }

    #[test]
    fn satake_matches_l_factor_structure() {
        let p = 3u64;
        let triv = UnitChar::trivial(p);
        // unramified PS: two parameters; Steinberg: one of size q^{−1/2};
        // supercuspidal: none
        for rep in build_catalog(p, 2).reps {
            let sat = rep.satake(&triv);
            match rep.variant() {
                RepVariant::UnramifiedPS { .. } => assert_eq!(sat.len(), 2),
                RepVariant::RamifiedPS { .. } => assert_eq!(sat.len(), 1),
                RepVariant::SteinbergTwist { chi, .. } => {
                    // L(s, χSt) ≠ 1 only for unramified χ
                    if chi.is_trivial() {
                        assert_eq!(sat.len(), 1);
                        let expect = Cyclo::from_rational(BigRational::new(
                            1.into(),
                            3.into(),
                        ));
                        assert_eq!(sat[0].norm_sq(), SqrtExt::from_cyclo(p, expect));
                    } else {
                        assert!(sat.is_empty());
                    }
                }
                RepVariant::DihedralSupercuspidal { .. } => {
                    assert!(sat.is_empty())
                }
            }
            // a ramified twist kills every L-factor in the catalog range
            let mu = pick_unit_char(p, 2).unwrap();
            assert!(rep.satake(&mu).is_empty() || rep.n() >= 2);
        }
    }

    #[test]
    fn catalog_summary_serializes() {
        let cat = build_catalog(3, 2);
        let summaries: Vec<_> = cat.reps.iter().map(|r| r.summary()).collect();
        let js = serde_json::to_string_pretty(&summaries).unwrap();
        assert!(js.contains("dihedral-supercuspidal"));
        assert!(js.contains("\"n\": 2"));
    }
}
