//! Exact membership in the level-adapted fundamental region F_L.
//!
//! F_L = {z = x + iy: y ≥ √3/(2L) and |cz+d|² ≥ 1/L for every nonzero
//! integer pair (c, d)}.
//!
//! ## Finiteness of the (c, d) check
//!
//! |cz+d|² = (cx+d)² + c²y² ≥ c²y², so any violating pair has
//! c² < 1/(L·y²); with y² ≥ 3/(4L²) this leaves |c| ≤ √(4L/3) candidates.
//! For fixed c the quadratic (cx+d)² is minimized at the one or two integers
//! d adjacent to −cx, so checking d ∈ {⌊−cx⌋, ⌈−cx⌉} suffices (for c = 0 the
//! minimum over d ≠ 0 is 1 ≥ 1/L always).  Every comparison is exact over ℚ
//! in the coordinates (x, y²).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::lattice::Point;

/// Whether z lies in F_L.  Preconditions: L ≥ 1.
pub fn fundamental_membership(z: &Point, l_level: u64) -> bool {
    assert!(l_level >= 1, "L must be ≥ 1");
    let l = BigRational::from_integer(BigInt::from(l_level));
    // y² ≥ 3/(4L²)
    let floor_bound = BigRational::new(BigInt::from(3), BigInt::from(4)) / (&l * &l);
    if z.y_sq() < &floor_bound {
        return false;
    }
    let inv_l = BigRational::from_integer(BigInt::from(1)) / &l;
    // candidate c range: c² < 1/(L·y²)
    let c_sq_max = &inv_l / z.y_sq();
    let c_max = c_sq_max.to_f64().unwrap_or(0.0).sqrt().ceil() as i64 + 1;
    for c in -c_max..=c_max {
        if c == 0 {
            continue;
        }
        let cq = BigRational::from_integer(BigInt::from(c));
        let center = -(&cq * z.x());
        let d_floor = center.floor().to_integer();
        for d in [d_floor.clone(), d_floor + 1] {
            if c == 0 && d.is_zero() {
                continue;
            }
            let lin = &cq * z.x() + BigRational::from_integer(d);
            let norm = &lin * &lin + &cq * &cq * z.y_sq();
            if norm < inv_l {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ratio;

    #[test]
    fn classical_domain_examples() {
        // z = 2i: min over nonzero (c,d) of 4c² + d² is 1 ≥ 1
        let z = Point::new(ratio(0, 1), ratio(2, 1)).unwrap();
        assert!(fundamental_membership(&z, 1));
        // z = i/10: fails the height floor √3/2
        let low = Point::new(ratio(0, 1), ratio(1, 10)).unwrap();
        assert!(!fundamental_membership(&low, 1));
        // z = 0.3 + 0.9i: |z|² = 0.9 < 1 fails at (c,d) = (1,0)
        let inside_disc = Point::new(ratio(3, 10), ratio(9, 10)).unwrap();
        assert!(!fundamental_membership(&inside_disc, 1));
        // nudging the same x above the unit circle: 0.3 + i·√0.92
        let above = Point::from_y_sq(ratio(3, 10), ratio(92, 100)).unwrap();
        assert!(fundamental_membership(&above, 1));
    }

    #[test]
    fn boundary_heights_decided_exactly() {
        // z = 1/2 + i√3/(2L) sits exactly on the height floor: y² = 3/(4L²)
        for l in [1u64, 2, 3, 6] {
            let z = Point::from_y_sq(ratio(1, 2), ratio(3, (4 * l * l) as i64)).unwrap();
            let just_below =
                Point::from_y_sq(ratio(1, 2), ratio(3, (4 * l * l) as i64 + 1)).unwrap();
            assert!(!fundamental_membership(&just_below, l));
            // at the exact floor the height test passes; the norm test decides.
            // (c,d) = (1,0): 1/4 + 3/(4L²) ≥ 1/L ⇔ (L−1)(L−3) ≥ 0 fails at
            // L = 2; (c,d) = (2,−1): 4y² = 3/L² ... (2x−1)² = 0 gives
            // 3/L² ≥ 1/L ⇔ L ≤ 3, failing at L = 6
            let on_floor = fundamental_membership(&z, l);
            assert_eq!(on_floor, l == 1 || l == 3, "L = {l}");
        }
    }

    #[test]
    fn larger_level_relaxes_the_norm_condition() {
        // |z|² = 0.9 < 1: excluded at L = 1, allowed at L = 2 (0.9 ≥ 1/2)
        let z = Point::new(ratio(3, 10), ratio(9, 10)).unwrap();
        assert!(!fundamental_membership(&z, 1));
        assert!(fundamental_membership(&z, 2));
    }
}
