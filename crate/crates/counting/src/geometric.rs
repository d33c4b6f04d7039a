//! The geometric side of the amplified pretrace inequality: kernel-weighted
//! lattice sums compared against the counting bound.
//!
//! For z in the level-adapted region F_{N₂} the quantity assembled here is
//! A(z) = Σ_{l ≤ 16Λ⁴} (|y_l|/√l) · Σ_{γ ∈ M(l, N₂)} |κ∞(u(z, γz))|,
//! where y_l are the squared amplifier coefficients and κ∞ is supported in
//! u ≤ 1.  The comparison target is the counting bound
//! Λ^ε N₂^ε [Λ + ΛN₂^{1/2}δ^{1/2}y + Λ^{5/2}δ^{1/2}N₂^{-1/2}
//!          + Λ^{5/2}δ^{1/2}y + Λ⁴δN₂^{-1}]
//! aggregated over a dyadic decomposition δ_j = 2^{−j} of the kernel's
//! radial profile, weighted by the kernel's maximum on each dyadic shell.
//! The implied constant is measured and regression-locked, not asserted.

use std::collections::BTreeMap;

use supnorm_arch::kernel::ArchKernel;

use crate::amplifier::{build_amplifier, AmplifierError, LambdaInput};
use crate::fundamental::fundamental_membership;
use crate::lattice::{
    enumerate_close_lattice, ratio, u_f64, CountError, Point,
};

/// Errors from the geometric-side assembly.
#[derive(Debug)]
pub enum GeometricError {
    /// z must lie in F_{N₂} for the comparison bound to apply.
    OutsideFundamentalDomain,
    /// Amplifier construction failed.
    Amplifier(AmplifierError),
    /// Lattice enumeration failed.
    Count(CountError),
}

impl std::fmt::Display for GeometricError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometricError::OutsideFundamentalDomain => {
                write!(f, "z outside the level-adapted fundamental region")
            }
            GeometricError::Amplifier(e) => write!(f, "amplifier error: {e}"),
            GeometricError::Count(e) => write!(f, "count error: {e}"),
        }
    }
}

impl std::error::Error for GeometricError {}

impl From<AmplifierError> for GeometricError {
    fn from(e: AmplifierError) -> Self {
        GeometricError::Amplifier(e)
    }
}

impl From<CountError> for GeometricError {
    fn from(e: CountError) -> Self {
        GeometricError::Count(e)
    }
}

/// The assembled geometric side and its comparison data.
#[derive(Debug, Clone)]
pub struct GeometricReport {
    /// A(z): the kernel-weighted amplified lattice sum.
    pub value: f64,
    /// The dyadically aggregated counting bound (unit implied constant).
    pub bound: f64,
    /// value / bound; the regression-locked implied constant.
    pub ratio: f64,
    /// Contribution |y₁|·κ∞(0) of the identity matrix inside the l = 1 term.
    pub identity_term: f64,
    /// The largest single (l, γ) contribution of the whole sum; equality
    /// with `identity_term` certifies identity dominance term-by-term.
    pub peak_term: f64,
    /// Number of (l, γ) terms with a nonzero kernel value.
    pub terms: usize,
}

/// The aggregated comparison bound: dyadic shells of the kernel profile
/// against the counting bracket at ε = 0.01.
fn aggregated_bound(kernel: &ArchKernel, lambda_big: f64, n2: u64, y: f64) -> f64 {
    let eps = 0.01;
    let prefactor = lambda_big.powf(eps) * (n2 as f64).powf(eps);
    let bracket = |delta: f64| -> f64 {
        let lam = lambda_big;
        let n2f = n2 as f64;
        lam + lam * n2f.sqrt() * delta.sqrt() * y
            + lam.powf(2.5) * delta.sqrt() / n2f.sqrt()
            + lam.powf(2.5) * delta.sqrt() * y
            + lam.powi(4) * delta / n2f
    };
    let shell_max = |lo: f64, hi: f64| -> f64 {
        (0..=8)
            .map(|i| kernel.eval(lo + (hi - lo) * i as f64 / 8.0).abs())
            .fold(0.0, f64::max)
    };
    let floor = kernel.t_big.powi(-2).min(0.5);
    let mut bound = 0.0;
    let mut hi = 1.0f64;
    while hi > floor {
        let lo = (hi / 2.0).max(floor);
        bound += shell_max(lo, hi) * prefactor * bracket(hi);
        hi = lo;
    }
    // innermost shell [0, floor]: the kernel peak
    bound += kernel.t_big * prefactor * bracket(floor);
    bound
}

/// Assembles the geometric side at z ∈ F_{N₂} with amplifier length Λ.
///
/// The amplifier prime window is taken coprime to N₂ (the level data in
/// scope here); λ-data must cover that window.  The kernel support lies in
/// u ≤ 1, so the enumeration radius δ = 99/100 is exhaustive.
pub fn geometric_side(
    z: &Point,
    lambda_big: f64,
    n2: u64,
    kernel: &ArchKernel,
    lambda_inputs: &BTreeMap<u64, LambdaInput>,
) -> Result<GeometricReport, GeometricError> {
    if !fundamental_membership(z, n2.max(1)) {
        return Err(GeometricError::OutsideFundamentalDomain);
    }
    let amp = build_amplifier(lambda_big, n2, lambda_inputs)?;
    let delta = ratio(99, 100);
    let mut value = 0.0;
    let mut identity_term = 0.0f64;
    let mut peak_term = 0.0f64;
    let mut terms = 0usize;
    for (&l, coeff) in &amp.y {
        let weight = coeff.to_complex().norm() / (l as f64).sqrt();
        if weight == 0.0 {
            continue;
        }
        for gamma in enumerate_close_lattice(z, l, &delta, n2)? {
            let contribution = weight * kernel.eval(u_f64(z, &gamma, l)).abs();
            if contribution == 0.0 {
                continue;
            }
            value += contribution;
            terms += 1;
            peak_term = peak_term.max(contribution);
            if l == 1 && gamma.a == 1 && gamma.b == 0 && gamma.c == 0 && gamma.d == 1 {
                identity_term = contribution;
            }
        }
    }
    let bound = aggregated_bound(kernel, lambda_big, n2, z.y_f64());
    Ok(GeometricReport {
        value,
        bound,
        ratio: if bound > 0.0 { value / bound } else { f64::INFINITY },
        identity_term,
        peak_term,
        terms,
    })
}
