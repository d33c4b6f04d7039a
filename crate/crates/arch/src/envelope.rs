//! The transition-region size envelope for K_{it} and its verified bound.
//!
//! With T = max(|t|, 1), the envelope is
//! f(y; T) = min(T^{1/3}, |y/T − 1|^{−1/2}),
//! and the verified statement is t·e^{πt}|K_{it}(y)|² ≤ C·f(y; T) with a
//! uniform measured constant C over the sweep grid.  The left side is
//! computed as t·(e^{πt/2}K_{it}(y))², i.e. through the scaled evaluator, so
//! no exponentially large factor is ever formed.

use crate::bessel::scaled_bessel_k;
use crate::scalar::Real;

/// The envelope f(y; T) = min(T^{1/3}, |y/T − 1|^{−1/2}) with T = max(|t|, 1).
pub fn envelope<R: Real>(t: R, y: R) -> R {
    let big_t = t.abs().max(R::one());
    let cube = big_t.powf(R::of_f64(1.0 / 3.0));
    let dist = (y / big_t - R::one()).abs();
    if dist == R::zero() {
        return cube;
    }
    cube.min(dist.powf(R::of_f64(-0.5)))
}

/// t·e^{πt}|K_{it}(y)|² / f(y; T).
pub fn bessel_bound_ratio<R: Real>(t: R, y: R) -> R {
    let s = scaled_bessel_k(t, y);
    t * s * s / envelope(t, y)
}

/// One row of the envelope sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    /// The order parameter.
    pub t: f64,
    /// The argument.
    pub y: f64,
    /// t·e^{πt}|K_{it}(y)|².
    pub weighted: f64,
    /// The envelope f(y; T).
    pub envelope: f64,
    /// Their ratio.
    pub ratio: f64,
}

/// Sweep the grid t ∈ [1, 50] (geometric), y/T ∈ [0.01, 3] and return the
/// rows; the maximum ratio is the measured envelope constant.
pub fn envelope_sweep() -> Vec<SweepRow> {
    let mut rows = Vec::new();
    let t_grid: [f64; 11] = [1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0, 40.0, 50.0];
    let ratio_grid: [f64; 19] = [
        0.01, 0.03, 0.1, 0.2, 0.4, 0.6, 0.8, 0.9, 0.96, 0.99, 1.0, 1.01, 1.04, 1.1, 1.25, 1.5,
        2.0, 2.5, 3.0,
    ];
    for &t in &t_grid {
        for &r in &ratio_grid {
            let big_t = t.max(1.0f64);
            let y = r * big_t;
            let s = scaled_bessel_k(t, y);
            let weighted = t * s * s;
            let env = envelope(t, y);
            rows.push(SweepRow {
                t,
                y,
                weighted,
                envelope: env,
                ratio: weighted / env,
            });
        }
    }
    rows
}

/// The measured constant of the sweep (max ratio).
pub fn envelope_constant() -> f64 {
    envelope_sweep()
        .iter()
        .map(|r| r.ratio)
        .fold(0.0, f64::max)
}

/// Relative tail mass dropped by truncating the expansion at arguments
/// T + T^{1/3 + 0.01}.
///
/// The expansion at height y has Bessel arguments xₙ = n·Δ for the spacing
/// Δ = 2πy/Qᵍ; the truncation keeps n with xₙ ≤ T + T^{1/3+0.01}.  This
/// computes Σ over dropped n of t·e^{πt}K² against the kept mass for the
/// next `extension` terms.  The 10⁻¹² criterion applies in the exponential
/// regime — spacing Δ comparable to T (Δ > cutoff/2), where the first dropped
/// argument already sits a multiple of T past the transition.  Near the
/// transition the dropped terms decay only like the Airy tail at gap
/// T^{1/3+0.01}, which is e^{−cT^{0.015}}: superpolynomially small in T
/// asymptotically but not 10⁻¹² at finite T; that region is controlled by the
/// envelope bound instead of the tail estimate, mirroring how the analysis
/// splits the expansion.
pub fn truncation_tail_ratio(t: f64, spacing: f64, extension: usize) -> (f64, f64) {
    let big_t = t.max(1.0);
    let cutoff = big_t + big_t.powf(1.0 / 3.0 + 0.01);
    let mut kept = 0.0;
    let mut dropped = 0.0;
    let mut n = 1usize;
    let mut dropped_count = 0usize;
    while dropped_count < extension {
        let x = n as f64 * spacing;
        if x > 500.0 {
            break;
        }
        let s = scaled_bessel_k(t, x);
        let mass = t * s * s;
        if x <= cutoff {
            kept += mass;
        } else {
            dropped += mass;
            dropped_count += 1;
        }
        n += 1;
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Regression lock for the envelope constant over the sweep grid.
    const ENVELOPE_CONSTANT_LOCK: f64 = 6.5;

    #[test]
    fn envelope_shape() {
        // plateau T^{1/3} near y = T, |y/T − 1|^{−1/2} away from it
        let f = envelope(27.0f64, 27.0);
        assert!((f - 3.0).abs() < 1e-12);
        let f = envelope(27.0f64, 54.0);
        assert!((f - 1.0).abs() < 1e-12);
        let f = envelope(0.5f64, 1.0);
        assert!((f - 1.0).abs() < 1e-12); // T = max(|t|, 1)
    }

    #[test]
    fn sweep_constant_locked() {
        let c = envelope_constant();
        assert!(
            c <= ENVELOPE_CONSTANT_LOCK,
            "measured envelope constant {c} exceeds lock {ENVELOPE_CONSTANT_LOCK}"
        );
        assert!(c > 0.1, "suspiciously small measured constant {c}");
    }

    #[test]
    fn regime_spot_checks() {
        // transition: finite and below lock
        let r = bessel_bound_ratio(30.0f64, 30.0);
        assert!(r.is_finite() && r <= ENVELOPE_CONSTANT_LOCK);
        // exponential regime: far below 1
        let r = bessel_bound_ratio(30.0f64, 90.0);
        assert!(r < 1e-6, "exponential regime ratio {r}");
        // oscillatory regime: bounded
        let r = bessel_bound_ratio(30.0f64, 0.3);
        assert!(r.is_finite() && r <= ENVELOPE_CONSTANT_LOCK);
    }

    #[test]
    fn truncation_tail_negligible_in_exponential_regime() {
        // spacing comparable to T: the first dropped argument is ≥ 2·spacing,
        // a full multiple of T past the transition, so its Bessel mass has
        // collapsed like e^{−c·T}
        for &(t, spacing) in &[(50.0f64, 45.0f64), (40.0, 40.0), (60.0, 55.0), (80.0, 75.0)] {
            let (kept, dropped) = truncation_tail_ratio(t, spacing, 40);
            assert!(kept > 0.0, "no kept mass at t={t}");
            assert!(
                dropped <= 1e-12 * kept,
                "tail mass {dropped:.3e} vs kept {kept:.3e} at t={t}, spacing={spacing}"
            );
        }
        // near the transition the same cutoff is *not* 10⁻¹²-negligible at
        // finite T — that regime is covered by the envelope bound, and this
        // guard documents the boundary of the tail criterion
        let (kept, dropped) = truncation_tail_ratio(50.0, 8.0, 40);
        assert!(dropped > 1e-6 * kept);
    }
}
