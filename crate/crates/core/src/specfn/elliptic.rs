//! Complete elliptic integrals in the modulus convention, K(sigma) and
//! E(sigma) with sigma the modulus (not the parameter m = sigma^2).
//!
//! Both are evaluated by arithmetic-geometric mean iteration, which
//! converges quadratically and is uniformly accurate over the domain.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

const AGM_MAX_ITER: usize = 40;

fn check_modulus(sigma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&sigma) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "elliptic modulus must lie in [0, 1], got {sigma}"
        )));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind,
/// K(sigma) = int_0^{pi/2} dphi / sqrt(1 - sigma^2 sin^2 phi).
///
/// Requires 0 <= sigma < 1; K diverges logarithmically at sigma = 1.
pub fn elliptic_k(sigma: f64) -> Result<f64> {
    check_modulus(sigma)?;
    if sigma == 1.0 {
        return Err(Error::Domain(
            "K(sigma) diverges at sigma = 1".to_string(),
        ));
    }
    if sigma == 0.0 {
        return Ok(FRAC_PI_2);
    }

    let mut a = 1.0;
    let mut b = (1.0 - sigma * sigma).sqrt();
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= f64::EPSILON * an {
            return Ok(PI / (2.0 * an));
        }
        a = an;
        b = bn;
    }
    Ok(PI / (a + b))
}

/// Complete elliptic integral of the second kind,
/// E(sigma) = int_0^{pi/2} sqrt(1 - sigma^2 sin^2 phi) dphi.
///
/// Defined on the closed interval [0, 1]; E(1) = 1.
pub fn elliptic_e(sigma: f64) -> Result<f64> {
    check_modulus(sigma)?;
    if sigma == 0.0 {
        return Ok(FRAC_PI_2);
    }
    if sigma == 1.0 {
        return Ok(1.0);
    }

    // E = K * (1 - sum_n 2^{n-1} c_n^2) with c_n = (a_n - b_n)/2,
    // seeded by c_0 = sigma.
    let mut a = 1.0;
    let mut b = (1.0 - sigma * sigma).sqrt();
    let mut c = sigma;
    let mut sum = 0.5 * c * c;
    let mut pow2 = 0.5;
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        pow2 *= 2.0;
        sum += pow2 * c * c;
        a = an;
        b = bn;
        if c.abs() <= f64::EPSILON * an {
            break;
        }
    }
    let k = PI / (2.0 * a);
    Ok(k * (1.0 - sum))
}

/// Complementary integral K'(sigma) = K(sqrt(1 - sigma^2)).
///
/// Requires 0 < sigma <= 1; diverges at sigma = 0.
pub fn elliptic_k_prime(sigma: f64) -> Result<f64> {
    check_modulus(sigma)?;
    if sigma == 0.0 {
        return Err(Error::Domain(
            "K'(sigma) diverges at sigma = 0".to_string(),
        ));
    }
    // Form the complementary modulus from sigma^2 to avoid cancellation.
    elliptic_k(((1.0 - sigma) * (1.0 + sigma)).sqrt())
}
