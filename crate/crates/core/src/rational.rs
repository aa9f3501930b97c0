//! Rational reconstruction by continued fractions.

/// Finds `p/q` with `q <= qmax` and `|x - p/q| <= tol`, returning the first
/// convergent of `x` that qualifies. Convergents with `q <= qmax` are the
/// best approximations in that range, so `None` means no fraction with a
/// small enough denominator exists within `tol` of a convergent.
pub fn reconstruct(x: f64, qmax: u32, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let qmax = qmax as u64;
    // h/k are the convergents, seeded with 1/0 and 0/1.
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 as u64 > qmax || k2 > u64::MAX as i128 {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2 as i64, k2 as u64));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Rational reconstruction with a tolerance relative to `|x|`.
pub fn reconstruct_relative(x: f64, qmax: u32, rel: f64) -> Option<(i64, u64)> {
    reconstruct(x, qmax, rel * x.abs().max(f64::MIN_POSITIVE))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_fractions() {
        assert_eq!(reconstruct(0.5, 1000, 1e-12), Some((1, 2)));
        assert_eq!(reconstruct(-2.0 / 3.0, 1000, 1e-12), Some((-2, 3)));
        assert_eq!(reconstruct(3.0, 1000, 1e-12), Some((3, 1)));
        assert_eq!(reconstruct(355.0 / 113.0, 1000, 1e-12), Some((355, 113)));
    }

    #[test]
    fn irrationals_fail() {
        assert_eq!(reconstruct(2f64.sqrt(), 1000, 1e-9), None);
        assert_eq!(reconstruct(2f64.ln() / 3f64.ln(), 1000, 1e-9), None);
    }

    #[test]
    fn relative_tolerance() {
        let x = -1.5 * (1.0 + 1e-12);
        assert_eq!(reconstruct_relative(x, 1000, 1e-9), Some((-3, 2)));
    }

    #[test]
    fn lcm_of_orders() {
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(gcd(12, 18), 6);
    }
}
