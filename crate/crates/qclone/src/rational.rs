//! Exact fractions for closed-form scores and pretty-printing helpers.

use num_rational::Ratio;

/// Exact rational score values. Denominators stay far below i64 range for
/// every supported n (the largest is 127 · 2^{2n−1} at n = 14).
pub type Frac = Ratio<i64>;

/// Largest denominator considered when recovering a fraction from a float.
pub const MAX_DEN: i64 = 10_000;

/// A float must sit this close to a candidate fraction to be reported as
/// exact.
pub const RECOVER_TOL: f64 = 1e-6;

/// [`recover_fraction`] with the default cap and tolerance.
pub fn recover(x: f64) -> Option<Frac> {
    recover_fraction(x, MAX_DEN, RECOVER_TOL)
}

/// A candidate p/q must also beat the generic approximation quality:
/// |x − p/q| ≤ UNUSUAL/q². Convergents of a typical real only get within
/// ~0.5/q², so this rejects floats that merely happen to have a nearby
/// fraction while keeping true rationals perturbed by optimizer noise
/// (~1e−9, against 1e−3/127² ≈ 6e−8 for the efficiency denominators).
const UNUSUAL: f64 = 1e-3;

/// Best rational approximation to `x` with denominator at most `max_den`,
/// by walking the continued-fraction convergents; None if the closest
/// candidate is further than `tol` away (or not unusually good for its
/// denominator), or `x` is not finite.
pub fn recover_fraction(x: f64, max_den: i64, tol: f64) -> Option<Frac> {
    if !x.is_finite() || max_den < 1 {
        return None;
    }
    // Convergent recurrence: p_k = a_k p_{k-1} + p_{k-2}, same for q.
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > i64::MAX as f64 / 2.0 {
            break;
        }
        let a = a as i64;
        let p = a.checked_mul(p0).and_then(|v| v.checked_add(p1));
        let q = a.checked_mul(q0).and_then(|v| v.checked_add(q1));
        let (p, q) = match (p, q) {
            (Some(p), Some(q)) => (p, q),
            _ => break,
        };
        if q > max_den {
            break;
        }
        (p1, q1, p0, q0) = (p0, q0, p, q);
        let frac = rest - a as f64;
        if frac.abs() < f64::EPSILON {
            break;
        }
        rest = frac.recip();
    }
    if q0 == 0 {
        return None;
    }
    let best = Frac::new(p0, q0);
    let q = *best.denom() as f64;
    let err = (x - (*best.numer() as f64) / q).abs();
    (err <= tol && err * q * q <= UNUSUAL).then_some(best)
}

/// "7/127" for proper fractions, plain "3" for integers.
pub fn frac_string(f: &Frac) -> String {
    if *f.denom() == 1 {
        f.numer().to_string()
    } else {
        format!("{}/{}", f.numer(), f.denom())
    }
}

/// The fraction as a float.
pub fn frac_f64(f: &Frac) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_clean_fractions() {
        assert_eq!(recover_fraction(7.0 / 127.0, MAX_DEN, RECOVER_TOL), Some(Frac::new(7, 127)));
        assert_eq!(
            recover_fraction(112.0 / 127.0, MAX_DEN, RECOVER_TOL),
            Some(Frac::new(112, 127))
        );
        assert_eq!(recover_fraction(0.75, MAX_DEN, RECOVER_TOL), Some(Frac::new(3, 4)));
        assert_eq!(recover_fraction(1.0, MAX_DEN, RECOVER_TOL), Some(Frac::new(1, 1)));
        assert_eq!(recover_fraction(0.0, MAX_DEN, RECOVER_TOL), Some(Frac::new(0, 1)));
    }

    #[test]
    fn tolerates_optimizer_noise() {
        let noisy = 112.0 / 127.0 + 3e-9;
        assert_eq!(recover_fraction(noisy, MAX_DEN, RECOVER_TOL), Some(Frac::new(112, 127)));
    }

    #[test]
    fn rejects_irrationals_and_junk() {
        assert_eq!(recover_fraction(std::f64::consts::SQRT_2, 10, 1e-9), None);
        // Golden ratio conjugate: the worst-approximable number; every
        // convergent sits ~0.45/q² away, outside the unusually-good band.
        let phi_inv = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(recover(phi_inv), None);
        assert_eq!(recover_fraction(f64::NAN, MAX_DEN, RECOVER_TOL), None);
        assert_eq!(recover_fraction(f64::INFINITY, MAX_DEN, RECOVER_TOL), None);
    }

    #[test]
    fn denominator_cap_respected() {
        assert_eq!(
            recover_fraction(1.0 / 9999.0, MAX_DEN, RECOVER_TOL),
            Some(Frac::new(1, 9999))
        );
        // The exact value needs a denominator past the cap and no in-cap
        // convergent is close enough.
        assert_eq!(recover_fraction(1.0 / 10001.0, MAX_DEN, RECOVER_TOL), None);
    }

    #[test]
    fn formatting() {
        assert_eq!(frac_string(&Frac::new(7, 127)), "7/127");
        assert_eq!(frac_string(&Frac::new(4, 2)), "2");
        assert_eq!(frac_f64(&Frac::new(1, 4)), 0.25);
    }
}
