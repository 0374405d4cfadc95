//! Third Jacobi theta function theta(z; tau) = sum_m exp(2 pi i m z + pi i tau m^2)
//! for purely imaginary tau = i*T with T > 0, plus its first two z-derivatives.
//!
//! Terms decay like exp(-pi T m^2), so truncating once the next term falls
//! below machine-precision relative to the accumulated magnitude leaves a
//! tail bounded by a geometric series with the same leading size.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const SERIES_CUTOFF: f64 = 1e-17;
const MAX_TERMS: usize = 20_000;

/// Theta-function evaluator for a fixed lattice parameter tau = i*tau_im.
#[derive(Debug, Clone, Copy)]
pub struct Theta {
    tau_im: f64,
}

impl Theta {
    /// Requires Im(tau) = tau_im > 0 for series convergence.
    pub fn new(tau_im: f64) -> Result<Self> {
        if !(tau_im > 0.0) || !tau_im.is_finite() {
            return Err(Error::Domain(format!(
                "theta requires Im(tau) > 0, got {tau_im}"
            )));
        }
        Ok(Self { tau_im })
    }

    pub fn tau_im(&self) -> f64 {
        self.tau_im
    }

    /// theta(z; tau) for real z: 1 + 2 sum_{m>=1} e^{-pi T m^2} cos(2 pi m z).
    /// Real and strictly positive.
    pub fn value(&self, z: f64) -> f64 {
        let mut acc = 1.0;
        let mut abs_acc = 1.0;
        for m in 1..=MAX_TERMS {
            let mf = m as f64;
            let w = (-PI * self.tau_im * mf * mf).exp();
            let term = 2.0 * w * (2.0 * PI * mf * z).cos();
            acc += term;
            abs_acc += 2.0 * w;
            if 2.0 * w < SERIES_CUTOFF * abs_acc {
                break;
            }
        }
        acc
    }

    /// d^order/dz^order theta(z; tau) for real z, order <= 2.
    pub fn deriv(&self, z: f64, order: u32) -> Result<f64> {
        match order {
            0 => Ok(self.value(z)),
            1 => Ok(self.sum_real(z, |w, mf, ph| -4.0 * PI * mf * w * ph.sin(), 1)),
            2 => Ok(self.sum_real(
                z,
                |w, mf, ph| -8.0 * PI * PI * mf * mf * w * ph.cos(),
                2,
            )),
            _ => Err(Error::Domain(format!(
                "theta derivatives implemented up to order 2, got {order}"
            ))),
        }
    }

    fn sum_real<F: Fn(f64, f64, f64) -> f64>(&self, z: f64, term_fn: F, order: u32) -> f64 {
        let mut acc = 0.0;
        let mut abs_acc = 0.0;
        for m in 1..=MAX_TERMS {
            let mf = m as f64;
            let w = (-PI * self.tau_im * mf * mf).exp();
            let phase = 2.0 * PI * mf * z;
            acc += term_fn(w, mf, phase);
            let bound = 2.0 * w * (2.0 * PI * mf).powi(order as i32);
            abs_acc += bound;
            if bound < SERIES_CUTOFF * (abs_acc + 1.0) {
                break;
            }
        }
        acc
    }

    /// (log theta)''(z) = theta''/theta - (theta'/theta)^2.
    pub fn log_deriv2(&self, z: f64) -> f64 {
        let th = self.value(z);
        let d1 = self.deriv(z, 1).expect("order 1 in range");
        let d2 = self.deriv(z, 2).expect("order 2 in range");
        d2 / th - (d1 / th) * (d1 / th)
    }

    /// theta(z; tau) for complex z (needed for quasi-periodicity checks and
    /// for arguments shifted by tau/2).
    pub fn value_complex(&self, z: Complex64) -> Complex64 {
        self.sum_complex(z, 0)
            .expect("order 0 always valid")
    }

    /// Termwise derivative of the series for complex z, order <= 2.
    pub fn deriv_complex(&self, z: Complex64, order: u32) -> Result<Complex64> {
        if order > 2 {
            return Err(Error::Domain(format!(
                "theta derivatives implemented up to order 2, got {order}"
            )));
        }
        self.sum_complex(z, order)
    }

    fn sum_complex(&self, z: Complex64, order: u32) -> Result<Complex64> {
        let mut acc = if order == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let mut abs_acc = if order == 0 { 1.0 } else { 0.0 };
        // Terms grow until m exceeds |Im z| / T, then decay super-exponentially.
        let peak = (z.im.abs() / self.tau_im).ceil() as usize + 1;
        for m in 1..=MAX_TERMS {
            let mf = m as f64;
            let w = (-PI * self.tau_im * mf * mf).exp();
            let rot = Complex64::new(0.0, 2.0 * PI * mf);
            let plus = (rot * z).exp() * w;
            let minus = (-rot * z).exp() * w;
            let (tp, tm) = match order {
                0 => (plus, minus),
                1 => (rot * plus, -rot * minus),
                _ => (rot * rot * plus, rot * rot * minus),
            };
            acc += tp + tm;
            let bound = tp.norm() + tm.norm();
            abs_acc += bound;
            if m > peak && bound < SERIES_CUTOFF * (abs_acc + 1.0) {
                return Ok(acc);
            }
        }
        Err(Error::Domain(format!(
            "theta series did not truncate within {MAX_TERMS} terms (tau_im={}, z={z})",
            self.tau_im
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_tau() {
        assert!(Theta::new(0.0).is_err());
        assert!(Theta::new(-1.0).is_err());
    }

    #[test]
    fn value_at_zero_matches_direct_series() {
        // z = 0, tau = 5i: 1 + 2 e^{-5 pi} + 2 e^{-20 pi} + ...; the dropped
        // tail is below 2 e^{-45 pi}, far under the comparison tolerance.
        let th = Theta::new(5.0).unwrap();
        let direct = 1.0 + 2.0 * (-5.0 * PI).exp() + 2.0 * (-20.0 * PI).exp();
        let tail_bound = 4.0 * (-45.0 * PI).exp();
        assert!((th.value(0.0) - direct).abs() <= tail_bound + 1e-16);
    }

    #[test]
    fn periodicity_in_z() {
        let th = Theta::new(2.0).unwrap();
        for &z in &[0.0, 0.17, 0.5, 0.93] {
            assert!((th.value(z + 1.0) - th.value(z)).abs() < 1e-15);
        }
    }

    #[test]
    fn half_period_value_is_alternating_series() {
        let th = Theta::new(1.0).unwrap();
        let mut direct = 1.0;
        for m in 1..30 {
            let mf = m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            direct += 2.0 * sign * (-PI * mf * mf).exp();
        }
        assert!((th.value(0.5) - direct).abs() < 1e-15);
    }

    #[test]
    fn first_derivative_vanishes_at_origin() {
        for &t in &[0.3, 1.0, 2.0, 5.0] {
            let th = Theta::new(t).unwrap();
            assert_eq!(th.deriv(0.0, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn second_derivative_matches_finite_difference() {
        // The central-difference oracle carries ~4 eps / h^2 of rounding
        // noise (about 1e-8 here), so the comparison scale includes the
        // function magnitude for lattice parameters where theta'' is tiny.
        let h = 1e-4;
        for &t in &[1.0, 3.0] {
            let th = Theta::new(t).unwrap();
            for &z in &[0.0, 0.2, 0.45] {
                let fd = (th.value(z + h) - 2.0 * th.value(z) + th.value(z - h)) / (h * h);
                let d2 = th.deriv(z, 2).unwrap();
                let scale = d2.abs().max(th.value(z));
                assert!(
                    (fd - d2).abs() < 1e-6 * scale,
                    "tau={t}i, z={z}: fd={fd}, series={d2}"
                );
            }
        }
        // where theta'' is O(1) the agreement is genuinely relative
        let th = Theta::new(1.0).unwrap();
        let d2 = th.deriv(0.0, 2).unwrap();
        let fd = (th.value(h) - 2.0 * th.value(0.0) + th.value(-h)) / (h * h);
        assert!(((fd - d2) / d2).abs() < 1e-6);
    }

    #[test]
    fn log_deriv2_is_periodic() {
        let th = Theta::new(1.5).unwrap();
        for &z in &[0.1, 0.35, 0.8] {
            assert!((th.log_deriv2(z + 1.0) - th.log_deriv2(z)).abs() < 1e-11);
        }
    }

    #[test]
    fn quasi_periodicity_complex() {
        // theta(z + tau; tau) * exp(pi i tau + 2 pi i z) = theta(z; tau)
        for &t in &[1.0, 2.0] {
            let th = Theta::new(t).unwrap();
            let tau = Complex64::new(0.0, t);
            for &zr in &[0.0, 0.3, 0.7] {
                let z = Complex64::new(zr, 0.0);
                let lhs = th.value_complex(z + tau)
                    * (Complex64::i() * PI * tau + Complex64::i() * 2.0 * PI * z).exp();
                let rhs = th.value_complex(z);
                assert!(
                    (lhs - rhs).norm() <= 1e-12 * rhs.norm(),
                    "tau_im={t}, z={zr}: lhs={lhs}, rhs={rhs}"
                );
            }
        }
    }

    #[test]
    fn complex_agrees_with_real_on_axis() {
        let th = Theta::new(0.7).unwrap();
        for &z in &[0.05, 0.33, 0.71] {
            let c = th.value_complex(Complex64::new(z, 0.0));
            assert!((c.re - th.value(z)).abs() < 1e-14);
            assert!(c.im.abs() < 1e-14);
            let d1 = th.deriv_complex(Complex64::new(z, 0.0), 1).unwrap();
            assert!((d1.re - th.deriv(z, 1).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn order_cap() {
        let th = Theta::new(1.0).unwrap();
        assert!(th.deriv(0.1, 3).is_err());
    }
}
