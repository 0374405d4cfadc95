//! Elliptic-regime machinery: derived elliptic data (sigma, tau, C, Omega),
//! the genus-one g-function with its band jump identities, the normalized
//! Abel map u, the theta-quotient functions h and h-hat with their expansion
//! coefficients h1, h2, and the elliptic evaluation of y computed in two
//! algebraically independent forms that must agree.
//!
//! Branch convention: every radical is a product of principal square roots
//! of (z - beta_j), analytic off (-inf, beta1] and positive for z > beta1.
//! Boundary values on the cut are taken with IEEE signed-zero imaginary
//! parts, which hand the principal square root exactly the upper or lower
//! limit; contours along the cut are split at the branch points with
//! declared half-power endpoints instead of detouring around them.

use crate::error::{Error, Result};
use crate::modulation::{solve_modulation, ModulationPoint};
use crate::specfn::elliptic::{elliptic_e, elliptic_k, elliptic_k_prime};
use crate::specfn::quad::{integrate, integrate_complex, QuadratureSpec};
use crate::specfn::theta::Theta;
use crate::types::{CutSide, ErrorOrder, ExpansionResult, RegimeLabel, ScalePoint, S_LEFT, S_RIGHT};
use num_complex::Complex64;

/// Relative gap (against beta1 - beta3) below which two branch points are
/// treated as merged and the critical-edge formulas own the evaluation.
pub const CONFLUENCE_GUARD: f64 = 1e-6;

/// Derived elliptic quantities for one modulation point.
#[derive(Debug, Clone, Copy)]
pub struct EllipticData {
    pub m: ModulationPoint,
    /// Elliptic modulus sigma = sqrt((beta2-beta3)/(beta1-beta3)).
    pub sigma: f64,
    /// Imaginary part of the lattice parameter tau = i K'(sigma)/K(sigma).
    pub tau_im: f64,
    /// C = 2 K(sigma) / sqrt(beta1 - beta3).
    pub c_period: f64,
    /// Omega = (1/15) int_{beta2}^{beta1} sqrt(xi-beta3)(xi-alpha)
    /// sqrt(xi-beta2) sqrt(beta1-xi) dxi.
    pub omega: f64,
    pub k: f64,
    pub e: f64,
    pub k_prime: f64,
}

fn omega_quad() -> QuadratureSpec {
    QuadratureSpec::default()
        .with_tols(1e-13, 1e-14)
        .with_exponents(0.5, 0.5)
}

/// Omega by quadrature of its defining band integral.
pub fn omega_integral(m: &ModulationPoint, tighten: f64) -> Result<f64> {
    let (b3, b2, b1) = (m.beta3, m.beta2, m.beta1);
    let alpha = m.alpha();
    let v = integrate(
        |xi| {
            ((xi - b3).max(0.0)).sqrt()
                * (xi - alpha)
                * ((xi - b2).max(0.0)).sqrt()
                * ((b1 - xi).max(0.0)).sqrt()
        },
        b2,
        b1,
        &omega_quad().tightened(tighten),
    )?;
    Ok(v.value / 15.0)
}

/// Builds the derived elliptic data for an interior modulation point and
/// cross-checks C against its own defining period integral.
pub fn derive_elliptic(m: &ModulationPoint) -> Result<EllipticData> {
    let (b3, b2, b1) = (m.beta3, m.beta2, m.beta1);
    let spread = b1 - b3;
    if !(b3 <= b2 && b2 <= b1 && spread > 0.0) {
        return Err(Error::Domain(format!(
            "derive_elliptic requires ordering beta3 <= beta2 <= beta1: {m:?}"
        )));
    }
    if b2 - b3 < CONFLUENCE_GUARD * spread || b1 - b2 < CONFLUENCE_GUARD * spread {
        return Err(Error::Degenerate(format!(
            "branch points within the confluence guard (gaps {:.3e}, {:.3e} of spread {:.3e}); \
             use the critical-edge evaluators",
            b2 - b3,
            b1 - b2,
            spread
        )));
    }

    let sigma = ((b2 - b3) / spread).sqrt();
    let k = elliptic_k(sigma)?;
    let e = elliptic_e(sigma)?;
    let k_prime = elliptic_k_prime(sigma)?;
    let c_period = 2.0 * k / spread.sqrt();
    let tau_im = k_prime / k;
    let omega = omega_integral(m, 1.0)?;
    if omega <= 0.0 {
        return Err(Error::Inconsistency(format!(
            "Omega must be positive on interior points, got {omega:e}"
        )));
    }

    // C equals int_{beta3}^{beta2} dz / sqrt((z-beta3)(beta2-z)(beta1-z))
    let c_check = integrate(
        |z| 1.0 / (((z - b3).max(0.0)) * ((b2 - z).max(0.0)) * (b1 - z)).sqrt(),
        b3,
        b2,
        &QuadratureSpec::default()
            .with_tols(1e-12, 1e-13)
            .with_exponents(-0.5, -0.5),
    )?
    .value;
    if (c_check - c_period).abs() > 1e-9 * c_period {
        return Err(Error::Inconsistency(format!(
            "period normalization mismatch: 2K/sqrt(b1-b3) = {c_period}, integral = {c_check}"
        )));
    }

    Ok(EllipticData {
        m: *m,
        sigma,
        tau_im,
        c_period,
        omega,
        k,
        e,
        k_prime,
    })
}

/// The two large-zeta expansion coefficients of the elliptic g-function:
/// c1 = -((sum beta)^2 + 2 sum beta^2)/360, c2 = ((sum beta)^3 - 4 sum beta^3)/360.
/// On a modulation solution these reduce to -1/3 and s.
pub fn g_elliptic_coeffs(m: &ModulationPoint) -> (f64, f64) {
    let (b3, b2, b1) = (m.beta3, m.beta2, m.beta1);
    let sum = b3 + b2 + b1;
    let c1 = -(sum * sum + 2.0 * (b3 * b3 + b2 * b2 + b1 * b1)) / 360.0;
    let c2 = (sum * sum * sum - 4.0 * (b3 * b3 * b3 + b2 * b2 * b2 + b1 * b1 * b1)) / 360.0;
    (c1, c2)
}

/// Attaches a signed-zero imaginary part selecting the requested side of
/// the real axis.
fn with_side(x: f64, side: CutSide) -> Complex64 {
    match side {
        CutSide::Plus => Complex64::new(x, 0.0),
        CutSide::Minus => Complex64::new(x, -0.0),
    }
}

/// Integrand of the elliptic g-function, principal branches per factor.
fn g_integrand(z: Complex64, m: &ModulationPoint) -> Complex64 {
    let alpha = m.alpha();
    let r3 = (z - m.beta3).sqrt();
    let r2 = (z - m.beta2).sqrt();
    let r1 = (z - m.beta1).sqrt();
    r3 * (z - alpha) * r2 * r1 / 30.0
}

/// Splits the real path from beta1 down to `zeta` at every crossed branch
/// point; returns (from, to, exp_at_from, exp_at_to) per segment.
fn cut_segments(zeta: f64, m: &ModulationPoint) -> Vec<(f64, f64, f64, f64)> {
    let mut segs = Vec::new();
    let mut from = m.beta1;
    for &bp in &[m.beta2, m.beta3] {
        if zeta < bp {
            segs.push((from, bp, 0.5, 0.5));
            from = bp;
        }
    }
    if zeta < from {
        let end_exp = if zeta == m.beta2 || zeta == m.beta3 { 0.5 } else { 0.0 };
        segs.push((from, zeta, 0.5, end_exp));
    }
    segs
}

/// The elliptic g-function g(zeta) = (1/30) int_{beta1}^zeta
/// (z-beta3)^{1/2} (z-alpha) (z-beta2)^{1/2} (z-beta1)^{1/2} dz,
/// analytic off (-inf, beta1] and positive for zeta > beta1. Real `zeta`
/// on the cut needs a `side` flag.
pub fn g_elliptic(zeta: Complex64, m: &ModulationPoint, side: Option<CutSide>) -> Result<Complex64> {
    let quad = QuadratureSpec::default().with_tols(1e-12, 1e-13);

    if zeta.im != 0.0 {
        // straight segment from beta1, strictly off the cut except at the
        // integrable start point
        let seg_quad = QuadratureSpec {
            endpoint_exponents: (0.5, 0.0),
            ..quad
        };
        let d = zeta - m.beta1;
        let v = integrate_complex(
            |u| g_integrand(Complex64::new(m.beta1, 0.0) + d * u, m) * d,
            0.0,
            1.0,
            &seg_quad,
        )?;
        return Ok(v.value);
    }

    let x = zeta.re;
    if x == m.beta1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if x > m.beta1 {
        let seg_quad = QuadratureSpec {
            endpoint_exponents: (0.5, 0.0),
            ..quad
        };
        let alpha = m.alpha();
        let v = integrate(
            |z| ((z - m.beta3) * (z - m.beta2) * (z - m.beta1)).sqrt() * (z - alpha) / 30.0,
            m.beta1,
            x,
            &seg_quad,
        )?;
        return Ok(Complex64::new(v.value, 0.0));
    }

    let Some(side) = side else {
        return Err(Error::CutAmbiguity(format!(
            "g_elliptic at zeta = {x} on the cut requires a side flag"
        )));
    };

    let mut total = Complex64::new(0.0, 0.0);
    for (a, b, ea, eb) in cut_segments(x, m) {
        let seg_quad = QuadratureSpec {
            endpoint_exponents: (ea, eb),
            ..quad
        };
        let v = integrate_complex(|z| g_integrand(with_side(z, side), m), a, b, &seg_quad)?;
        total += v.value;
    }
    Ok(total)
}

/// Integrand 1/sqrt((z-beta3)(z-beta2)(z-beta1)) of the Abel map.
fn u_integrand(z: Complex64, m: &ModulationPoint) -> Complex64 {
    let r3 = (z - m.beta3).sqrt();
    let r2 = (z - m.beta2).sqrt();
    let r1 = (z - m.beta1).sqrt();
    (r3 * r2 * r1).finv()
}

/// The normalized Abel-type map
/// u(zeta) = (1/(2C)) int_inf^zeta dz / sqrt((z-beta3)(z-beta2)(z-beta1)).
///
/// The improper tail is compactified with z = beta1 + 1/w^2; the finite
/// part runs from an anchor right of beta1 down to `zeta`, split at branch
/// points with inverse-half-power endpoint declarations when `zeta` lies
/// on the cut.
pub fn abel_u(
    zeta: Complex64,
    m: &ModulationPoint,
    d: &EllipticData,
    side: Option<CutSide>,
) -> Result<Complex64> {
    let quad = QuadratureSpec::default().with_tols(1e-12, 1e-14);
    let spread = m.beta1 - m.beta3;
    let anchor = m.beta1 + spread.max(1.0);

    // int_{anchor}^{inf} dz/sqrt(...) under z = beta1 + 1/w^2
    let a_c = m.beta1 - m.beta3;
    let b_c = m.beta1 - m.beta2;
    let w0 = 1.0 / (anchor - m.beta1).sqrt();
    let tail = integrate(
        |w| 2.0 / ((1.0 + a_c * w * w).sqrt() * (1.0 + b_c * w * w).sqrt()),
        0.0,
        w0,
        &quad,
    )?
    .value;

    let mut total = Complex64::new(-tail, 0.0); // int_inf^anchor

    if zeta.im != 0.0 {
        let d_seg = zeta - anchor;
        let v = integrate_complex(
            |u| u_integrand(Complex64::new(anchor, 0.0) + d_seg * u, m) * d_seg,
            0.0,
            1.0,
            &quad,
        )?;
        total += v.value;
    } else {
        let x = zeta.re;
        if x > m.beta1 {
            let v = integrate(
                |z| 1.0 / ((z - m.beta3) * (z - m.beta2) * (z - m.beta1)).sqrt(),
                anchor,
                x,
                &quad,
            )?;
            total += Complex64::new(v.value, 0.0);
        } else {
            let Some(side) = side else {
                return Err(Error::CutAmbiguity(format!(
                    "abel_u at zeta = {x} on the cut requires a side flag"
                )));
            };
            // anchor -> beta1, regular except at beta1 itself
            let v = integrate_complex(
                |z| u_integrand(with_side(z, side), m),
                anchor,
                m.beta1,
                &QuadratureSpec {
                    endpoint_exponents: (0.0, -0.5),
                    ..quad
                },
            )?;
            total += v.value;
            if x < m.beta1 {
                let mut from = m.beta1;
                for &bp in &[m.beta2, m.beta3] {
                    if x < bp {
                        let v = integrate_complex(
                            |z| u_integrand(with_side(z, side), m),
                            from,
                            bp,
                            &QuadratureSpec {
                                endpoint_exponents: (-0.5, -0.5),
                                ..quad
                            },
                        )?;
                        total += v.value;
                        from = bp;
                    }
                }
                if x < from {
                    let end_exp = if x == m.beta2 || x == m.beta3 { -0.5 } else { 0.0 };
                    let v = integrate_complex(
                        |z| u_integrand(with_side(z, side), m),
                        from,
                        x,
                        &QuadratureSpec {
                            endpoint_exponents: (-0.5, end_exp),
                            ..quad
                        },
                    )?;
                    total += v.value;
                }
            }
        }
    }
    Ok(total / (2.0 * d.c_period))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Fractional part of t^{7/4} Omega / (2 pi), reduced with compensated
/// (double-double) arithmetic: at large t the product far exceeds 2 pi and
/// a plain f64 reduction would lose the phase entirely.
pub fn phase_fraction(t: f64, omega: f64) -> f64 {
    const TWO_PI_HI: f64 = std::f64::consts::TAU;
    // residual of 2 pi beyond the f64 mantissa of TAU
    const TWO_PI_LO: f64 = 2.449293598294706e-16;
    let r = t.powf(1.75);
    let (p, p_err) = two_prod(r, omega);
    let q0 = p / (TWO_PI_HI + TWO_PI_LO);
    let (qh, q_err) = two_prod(q0, TWO_PI_HI);
    let resid = ((p - qh) - q_err) + (p_err - q0 * TWO_PI_LO);
    let q1 = resid / TWO_PI_HI;
    let mut frac = (q0 - q0.floor()) + q1;
    frac -= frac.floor();
    if frac < 0.0 {
        frac += 1.0;
    }
    frac
}

/// The scalar theta-quotient pair
/// h = theta(0) theta(u+c) / (theta(c) theta(u)),
/// h-hat = theta(0) theta(c-u) / (theta(c) theta(u)),
/// with c = t^{7/4} Omega / (2 pi) reduced mod 1. Evaluation within
/// 1e-6 (beta1-beta3) of beta2 is refused: theta(u) vanishes there.
pub fn h_functions(
    zeta: Complex64,
    d: &EllipticData,
    t: f64,
    side: Option<CutSide>,
) -> Result<(Complex64, Complex64)> {
    h_functions_at_c(zeta, d, phase_fraction(t, d.omega), side)
}

/// As [`h_functions`] with the reduced phase `c` supplied directly.
pub fn h_functions_at_c(
    zeta: Complex64,
    d: &EllipticData,
    c: f64,
    side: Option<CutSide>,
) -> Result<(Complex64, Complex64)> {
    let spread = d.m.beta1 - d.m.beta3;
    if (zeta - Complex64::new(d.m.beta2, 0.0)).norm() < 1e-6 * spread {
        return Err(Error::Degenerate(format!(
            "h has a pole at beta2 = {}; refusing evaluation at {zeta}",
            d.m.beta2
        )));
    }
    let theta = Theta::new(d.tau_im)?;
    let u = abel_u(zeta, &d.m, d, side)?;
    let th0 = theta.value(0.0);
    let thc = theta.value(c);
    let thu = theta.value_complex(u);
    let cc = Complex64::new(c, 0.0);
    let h = theta.value_complex(u + cc) / thu * (th0 / thc);
    let hhat = theta.value_complex(cc - u) / thu * (th0 / thc);
    Ok((h, hhat))
}

/// The expansion coefficients of h at large zeta,
/// h1 = -(1/C) theta'(c)/theta(c) (the theta derivative vanishes at 0) and
/// h2 = (1/(2 C^2)) (theta''(c)/theta(c) - theta''(0)/theta(0)),
/// with c reduced mod 1.
pub fn h1_h2(d: &EllipticData, t: f64) -> Result<(f64, f64)> {
    h1_h2_at_c(d, phase_fraction(t, d.omega))
}

/// As [`h1_h2`] with the reduced phase supplied directly.
pub fn h1_h2_at_c(d: &EllipticData, c: f64) -> Result<(f64, f64)> {
    let theta = Theta::new(d.tau_im)?;
    let thc = theta.value(c);
    let h1 = -theta.deriv(c, 1)? / (d.c_period * thc);
    let h2 = (theta.deriv(c, 2)? / thc - theta.deriv(0.0, 2)? / theta.value(0.0))
        / (2.0 * d.c_period * d.c_period);
    Ok((h1, h2))
}

/// Both forms of the elliptic evaluation at an explicit reduced phase `c`
/// (no reduction applied), per sqrt(t):
///
///   form A: (beta3+beta2-beta1)/2 + (beta1-beta3) E/K + (log theta)''(c)/C^2
///   form B: (beta3-beta2+beta1)/2 + 2 h2 - h1^2
pub fn y_forms_at_c(d: &EllipticData, c: f64) -> Result<(f64, f64)> {
    let theta = Theta::new(d.tau_im)?;
    let (b3, b2, b1) = (d.m.beta3, d.m.beta2, d.m.beta1);
    let c2 = d.c_period * d.c_period;
    let form_a = 0.5 * (b3 + b2 - b1) + (b1 - b3) * d.e / d.k + theta.log_deriv2(c) / c2;
    let (h1, h2) = h1_h2_at_c(d, c)?;
    let form_b = 0.5 * (b3 - b2 + b1) + 2.0 * h2 - h1 * h1;
    Ok((form_a, form_b))
}

/// Elliptic-regime evaluation of y at a scale point with t > 0 and s
/// strictly inside the oscillatory interval. The value is computed in the
/// two forms of [`y_forms_at_c`], which must agree to 1e-8 relative;
/// disagreement is an internal-consistency error, never silently resolved.
pub fn y_elliptic(p: &ScalePoint) -> Result<ExpansionResult> {
    if p.t <= 0.0 {
        return Err(Error::Regime(format!(
            "elliptic asymptotics require t > 0, got t = {}",
            p.t
        )));
    }
    if !(p.s > S_LEFT && p.s < S_RIGHT) {
        return Err(Error::Regime(format!(
            "elliptic asymptotics require s in ({S_LEFT}, {S_RIGHT}), got s = {}",
            p.s
        )));
    }
    let m = solve_modulation(p.s, None)?;
    let d = derive_elliptic(&m)?; // degeneracy guard defers to the edges
    let c = phase_fraction(p.t, d.omega);
    let (form_a, form_b) = y_forms_at_c(&d, c)?;

    let tol = 1e-8 * form_a.abs().max(form_b.abs()).max(1e-6);
    if (form_a - form_b).abs() > tol {
        return Err(Error::Inconsistency(format!(
            "elliptic dual forms disagree at (s, t) = ({}, {}): A = {form_a}, B = {form_b}",
            p.s, p.t
        )));
    }

    let sqrt_t = p.t.sqrt();
    let theta = Theta::new(d.tau_im)?;
    let leading = sqrt_t
        * (0.5 * (d.m.beta3 + d.m.beta2 - d.m.beta1) + (d.m.beta1 - d.m.beta3) * d.e / d.k);
    let correction = sqrt_t * theta.log_deriv2(c) / (d.c_period * d.c_period);
    Ok(ExpansionResult::new(
        leading,
        correction,
        ErrorOrder::InverseSqrtT,
        RegimeLabel::Elliptic,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::continuation_sweep;
    use std::f64::consts::PI;

    // reference values at s = 0 from a high-precision offline solve of the
    // same system (40-digit arithmetic)
    const B3_S0: f64 = -5.010736342637784;
    const B2_S0: f64 = 3.049739350972218;
    const B1_S0: f64 = 4.679397464465076;
    const SIGMA_S0: f64 = 0.9120432832068983;
    const TAU_S0: f64 = 0.7036281680481984;
    const CPER_S0: f64 = 1.5010806064417147;
    const OMEGA_S0: f64 = 1.0836773402045072;

    fn data_at(s: f64) -> EllipticData {
        let m = solve_modulation(s, None).unwrap();
        derive_elliptic(&m).unwrap()
    }

    #[test]
    fn derived_data_matches_reference_at_origin() {
        let d = data_at(0.0);
        assert!((d.m.beta3 - B3_S0).abs() < 1e-9);
        assert!((d.m.beta2 - B2_S0).abs() < 1e-9);
        assert!((d.m.beta1 - B1_S0).abs() < 1e-9);
        assert!((d.sigma - SIGMA_S0).abs() < 1e-9);
        assert!((d.tau_im - TAU_S0).abs() < 1e-9);
        assert!((d.c_period - CPER_S0).abs() < 1e-9);
        assert!((d.omega - OMEGA_S0).abs() < 1e-9);
    }

    #[test]
    fn omega_refinement_oracle() {
        let m = solve_modulation(0.0, None).unwrap();
        let o1 = omega_integral(&m, 1.0).unwrap();
        let o2 = omega_integral(&m, 100.0).unwrap();
        assert!((o1 - o2).abs() <= 1e-9 * o2.abs());
    }

    #[test]
    fn tau_matches_its_defining_integral() {
        // tau = i int_{-inf}^{beta3} dz / (C sqrt((beta3-z)(beta2-z)(beta1-z)))
        let d = data_at(0.0);
        let (b3, b2, b1) = (d.m.beta3, d.m.beta2, d.m.beta1);
        let quad = QuadratureSpec::default().with_tols(1e-12, 1e-14);
        let cut = 1.0;
        let finite = integrate(
            |z| 1.0 / (((b3 - z).max(0.0)) * (b2 - z) * (b1 - z)).sqrt(),
            b3 - cut,
            b3,
            &QuadratureSpec {
                endpoint_exponents: (0.0, -0.5),
                ..quad
            },
        )
        .unwrap()
        .value;
        // z = b3 - 1/w^2 for the tail below b3 - cut
        let w0 = 1.0 / cut.sqrt();
        let tail = integrate(
            |w| 2.0 / ((1.0 + (b2 - b3) * w * w).sqrt() * (1.0 + (b1 - b3) * w * w).sqrt()),
            0.0,
            w0,
            &quad,
        )
        .unwrap()
        .value;
        let tau_int = (finite + tail) / d.c_period;
        assert!(
            (tau_int - d.tau_im).abs() < 1e-9,
            "tau integral {tau_int} vs K'/K {}",
            d.tau_im
        );
    }

    #[test]
    fn confluent_input_is_rejected() {
        let near_left = ModulationPoint::new(S_LEFT + 1e-9, -1.7320508, -1.73205075, 6.928203);
        assert!(matches!(
            derive_elliptic(&near_left),
            Err(Error::Degenerate(_)) | Err(Error::Domain(_))
        ));
    }

    #[test]
    fn left_limit_of_leading_part() {
        // beta3, beta2 -> -sqrt(3), beta1 -> 4 sqrt(3), E/K -> 1:
        // (beta3+beta2-beta1)/2 + (beta1-beta3) -> 2 sqrt(3)
        let d = data_at(S_LEFT + 1e-4);
        let lead = 0.5 * (d.m.beta3 + d.m.beta2 - d.m.beta1) + (d.m.beta1 - d.m.beta3) * d.e / d.k;
        assert!(
            (lead - 2.0 * 3.0_f64.sqrt()).abs() < 1e-3,
            "leading part {lead}"
        );
    }

    #[test]
    fn g_vanishes_at_beta1_and_positive_beyond() {
        let d = data_at(0.0);
        let g0 = g_elliptic(Complex64::new(d.m.beta1, 0.0), &d.m, None).unwrap();
        assert!(g0.norm() < 1e-14);
        for dz in [0.3, 1.0, 5.0] {
            let g = g_elliptic(Complex64::new(d.m.beta1 + dz, 0.0), &d.m, None).unwrap();
            assert!(g.re > 0.0 && g.im.abs() < 1e-10 * g.re);
        }
    }

    #[test]
    fn g_jump_identities_on_the_bands() {
        for s in [-2.0, 0.0] {
            let d = data_at(s);
            let m = &d.m;
            // g+ + g- = 0 on (beta2, beta1)
            for f in [0.25, 0.5, 0.75] {
                let x = m.beta2 + f * (m.beta1 - m.beta2);
                let gp = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Plus)).unwrap();
                let gm = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Minus)).unwrap();
                assert!((gp + gm).norm() < 1e-9, "g+ + g- = {:?} at s={s}", gp + gm);
            }
            // g+ + g- = 0 on (-inf, beta3)
            for off in [0.5, 2.0] {
                let x = m.beta3 - off;
                let gp = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Plus)).unwrap();
                let gm = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Minus)).unwrap();
                assert!((gp + gm).norm() < 1e-9);
            }
            // g+ - g- = -i Omega on (beta3, beta2)
            for f in [0.3, 0.6, 0.9] {
                let x = m.beta3 + f * (m.beta2 - m.beta3);
                let gp = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Plus)).unwrap();
                let gm = g_elliptic(Complex64::new(x, 0.0), m, Some(CutSide::Minus)).unwrap();
                let jump = gp - gm;
                let expect = Complex64::new(0.0, -d.omega);
                assert!(
                    (jump - expect).norm() < 1e-9,
                    "jump {jump:?} vs -i Omega = {expect:?} at s={s}"
                );
            }
        }
    }

    #[test]
    fn omega_equals_2i_g_plus_at_beta3() {
        // 2 g_+(beta3) = 2 g_+(beta2) = -i Omega, so Omega = 2i g_+(beta3)
        let d = data_at(0.0);
        let gp3 = g_elliptic(Complex64::new(d.m.beta3, 0.0), &d.m, Some(CutSide::Plus)).unwrap();
        let recovered = (2.0 * Complex64::i() * gp3).re;
        assert!(
            (recovered - d.omega).abs() < 1e-8,
            "2i g+(beta3) = {recovered} vs Omega = {}",
            d.omega
        );
        let gp2 = g_elliptic(Complex64::new(d.m.beta2, 0.0), &d.m, Some(CutSide::Plus)).unwrap();
        assert!((gp2 - gp3).norm() < 1e-9, "g+(beta2) != g+(beta3)");
    }

    #[test]
    fn expansion_coefficients_on_solutions() {
        let third = 1.0 / 3.0;
        let left = ModulationPoint::confluent_left();
        let (c1, c2) = g_elliptic_coeffs(&left);
        assert!((c1 + third).abs() < 1e-14 && (c2 - S_LEFT).abs() < 1e-13);

        let right = ModulationPoint::confluent_right();
        let (c1, c2) = g_elliptic_coeffs(&right);
        assert!((c1 + third).abs() < 1e-14 && (c2 - S_RIGHT).abs() < 1e-14);

        let mid = solve_modulation(-1.3, None).unwrap();
        let (c1, c2) = g_elliptic_coeffs(&mid);
        assert!((c1 + third).abs() < 1e-11 && (c2 - (-1.3)).abs() < 1e-11);

        let zero = ModulationPoint::new(0.0, 0.0, 0.0, 0.0);
        assert_eq!(g_elliptic_coeffs(&zero), (0.0, 0.0));
    }

    #[test]
    fn abel_map_jumps() {
        let d = data_at(0.0);
        let m = &d.m;
        // u+ - u- = tau on (beta3, beta2)
        let x = 0.5 * (m.beta3 + m.beta2);
        let up = abel_u(Complex64::new(x, 0.0), m, &d, Some(CutSide::Plus)).unwrap();
        let um = abel_u(Complex64::new(x, 0.0), m, &d, Some(CutSide::Minus)).unwrap();
        let diff = up - um;
        assert!(
            (diff - Complex64::new(0.0, d.tau_im)).norm() < 1e-8,
            "u+ - u- = {diff:?} vs tau = i{}",
            d.tau_im
        );
        // u+ + u- = 0 mod 1 on (beta2, beta1)
        let x2 = 0.5 * (m.beta2 + m.beta1);
        let up2 = abel_u(Complex64::new(x2, 0.0), m, &d, Some(CutSide::Plus)).unwrap();
        let um2 = abel_u(Complex64::new(x2, 0.0), m, &d, Some(CutSide::Minus)).unwrap();
        let s2 = up2 + um2;
        assert!(
            (s2.re - s2.re.round()).abs() < 1e-8 && s2.im.abs() < 1e-8,
            "u+ + u- = {s2:?} not an integer"
        );
    }

    #[test]
    fn abel_map_decays_like_inverse_sqrt() {
        let d = data_at(0.0);
        // u(zeta) ~ -zeta^{-1/2}/C: fit the decay exponent on the real axis
        let mut pts = Vec::new();
        for i in 0..10 {
            let z = 1e3 * 10f64.powf(i as f64 * 0.3);
            let u = abel_u(Complex64::new(z, 0.0), &d.m, &d, None).unwrap();
            pts.push((z.ln(), u.norm().ln()));
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope + 0.5).abs() < 0.01, "decay exponent {slope}");

        let u = abel_u(Complex64::new(1e6, 0.0), &d.m, &d, None).unwrap();
        assert!((u.re * d.c_period * 1e3 + 1.0).abs() < 1e-3);
    }

    #[test]
    fn theta_of_u_vanishes_only_at_beta2() {
        // u(beta2) = (1 + tau)/2 mod 1, the unique zero of theta
        let d = data_at(0.0);
        let u2 = abel_u(
            Complex64::new(d.m.beta2, 0.0),
            &d.m,
            &d,
            Some(CutSide::Plus),
        )
        .unwrap();
        let theta = Theta::new(d.tau_im).unwrap();
        let v = theta.value_complex(u2);
        assert!(v.norm() < 1e-7, "theta(u(beta2)) = {v:?}, u = {u2:?}");
        let off_half = (u2.re.rem_euclid(1.0) - 0.5).abs();
        assert!(off_half < 1e-8 && (u2.im - d.tau_im / 2.0).abs() < 1e-8);
    }

    #[test]
    fn h_is_identity_when_phase_vanishes() {
        let d = data_at(0.0);
        let z = Complex64::new(d.m.beta1 + 2.0, 0.0);
        let (h, hhat) = h_functions_at_c(z, &d, 0.0, None).unwrap();
        assert!((h - 1.0).norm() < 1e-12 && (hhat - 1.0).norm() < 1e-12);
    }

    #[test]
    fn h_jump_on_central_band() {
        // h+ = h- e^{-i t^{7/4} Omega} on (beta3, beta2)
        let t = 2.0;
        let d = data_at(0.0);
        let x = Complex64::new(0.5 * (d.m.beta3 + d.m.beta2), 0.0);
        let (hp, _) = h_functions(x, &d, t, Some(CutSide::Plus)).unwrap();
        let (hm, _) = h_functions(x, &d, t, Some(CutSide::Minus)).unwrap();
        let c = phase_fraction(t, d.omega);
        let factor = (-Complex64::i() * 2.0 * PI * c).exp();
        assert!(
            (hp - hm * factor).norm() <= 1e-8 * hp.norm(),
            "h jump violated: {hp:?} vs {:?}",
            hm * factor
        );
    }

    #[test]
    fn h_pair_jump_on_outer_bands() {
        // h_+ = hhat_- on (beta2, beta1) and on (-inf, beta3)
        let t = 2.0;
        let d = data_at(0.0);
        for x in [0.5 * (d.m.beta2 + d.m.beta1), d.m.beta3 - 1.0] {
            let z = Complex64::new(x, 0.0);
            let (hp, _) = h_functions(z, &d, t, Some(CutSide::Plus)).unwrap();
            let (_, hhat_m) = h_functions(z, &d, t, Some(CutSide::Minus)).unwrap();
            assert!(
                (hp - hhat_m).norm() <= 1e-8 * hp.norm().max(1.0),
                "h+/hhat- mismatch at x = {x}: {hp:?} vs {hhat_m:?}"
            );
        }
    }

    #[test]
    fn h_product_tends_to_one() {
        // h hhat = 1 + (2 h2 - h1^2)/zeta + O(zeta^{-3/2})
        let t = 2.0;
        let d = data_at(0.0);
        let (h1, h2) = h1_h2(&d, t).unwrap();
        let zeta = 1e6;
        let (h, hhat) = h_functions(Complex64::new(zeta, 0.0), &d, t, None).unwrap();
        let expect = 1.0 + (2.0 * h2 - h1 * h1) / zeta;
        assert!(
            ((h * hhat).re - expect).abs() < 1e-8,
            "h hhat = {:?} vs {expect}",
            h * hhat
        );
    }

    #[test]
    fn h_refuses_pole_at_beta2() {
        let d = data_at(0.0);
        let z = Complex64::new(d.m.beta2 + 1e-9, 0.0);
        assert!(matches!(
            h_functions(z, &d, 2.0, Some(CutSide::Plus)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn h1_h2_special_phases() {
        let d = data_at(0.0);
        let (h1, h2) = h1_h2_at_c(&d, 0.0).unwrap();
        assert_eq!(h1, 0.0);
        assert_eq!(h2, 0.0);

        // c = 1/2 with tau = i: theta' vanishes at the half period, h2 does not
        let synthetic = EllipticData {
            tau_im: 1.0,
            omega: PI, // t = 1 gives c = 1/2 exactly
            ..d
        };
        assert_eq!(phase_fraction(1.0, PI), 0.5);
        let (h1, h2) = h1_h2(&synthetic, 1.0).unwrap();
        assert!(h1.abs() < 1e-15, "h1 = {h1}");
        assert!(h2.abs() > 1e-3, "h2 = {h2}");
    }

    #[test]
    fn h1_h2_match_asymptotic_fit() {
        // fit h(zeta) = 1 + h1 zeta^{-1/2} + h2 zeta^{-1} + c3 zeta^{-3/2}
        // through three large-zeta samples and compare against the direct
        // theta-derivative formulas
        let t = 2.0;
        let d = data_at(0.0);
        let (h1, h2) = h1_h2(&d, t).unwrap();
        let zs = [1e6, 4e6, 1.6e7];
        let mut rows = Vec::new();
        for &z in &zs {
            let (h, _) = h_functions(Complex64::new(z, 0.0), &d, t, None).unwrap();
            rows.push((z.powf(-0.5), h.re - 1.0));
        }
        let (x0, x1, x2) = (rows[0].0, rows[1].0, rows[2].0);
        let (y0, y1, y2) = (rows[0].1, rows[1].1, rows[2].1);
        let det = |a: [[f64; 3]; 3]| -> f64 {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        };
        let base = [
            [x0, x0 * x0, x0 * x0 * x0],
            [x1, x1 * x1, x1 * x1 * x1],
            [x2, x2 * x2, x2 * x2 * x2],
        ];
        let d0 = det(base);
        let mut m1 = base;
        m1[0][0] = y0;
        m1[1][0] = y1;
        m1[2][0] = y2;
        let mut m2 = base;
        m2[0][1] = y0;
        m2[1][1] = y1;
        m2[2][1] = y2;
        let h1_fit = det(m1) / d0;
        let h2_fit = det(m2) / d0;
        assert!((h1_fit - h1).abs() < 1e-5, "h1 fit {h1_fit} vs {h1}");
        assert!((h2_fit - h2).abs() < 1e-5, "h2 fit {h2_fit} vs {h2}");
    }

    #[test]
    fn dual_forms_agree_at_reference_point() {
        // frozen offline reference: y(s=0, t=4) = -3.2391059613902073
        let d = data_at(0.0);
        let c = phase_fraction(4.0, d.omega);
        let (a, b) = y_forms_at_c(&d, c).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs());
        let reference = -3.2391059613902073 / 2.0;
        assert!(
            (a - reference).abs() < 1e-7,
            "form A = {a} vs reference {reference}"
        );
    }

    #[test]
    fn dual_forms_agree_on_grid() {
        for s in [-3.0, -1.5, 0.2] {
            let d = data_at(s);
            for t in [1.0, 7.0, 16.0] {
                let c = phase_fraction(t, d.omega);
                let (a, b) = y_forms_at_c(&d, c).unwrap();
                assert!(
                    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()),
                    "forms disagree at s={s}, t={t}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn value_is_periodic_in_the_phase() {
        let d = data_at(-1.0);
        for c in [0.13, 0.49, 0.77] {
            let (a0, b0) = y_forms_at_c(&d, c).unwrap();
            let (a1, b1) = y_forms_at_c(&d, c + 1.0).unwrap();
            assert!((a0 - a1).abs() < 1e-10 * a0.abs().max(1.0));
            assert!((b0 - b1).abs() < 1e-10 * b0.abs().max(1.0));
        }
    }

    #[test]
    fn theta_term_averages_to_zero_over_a_period() {
        // (log theta)'' integrates to zero over one period, so the mean of
        // y recovers the non-oscillatory part
        let d = data_at(0.0);
        let theta = Theta::new(d.tau_im).unwrap();
        let avg = integrate(
            |c| theta.log_deriv2(c),
            0.0,
            1.0,
            &QuadratureSpec::default().with_tols(1e-12, 1e-12),
        )
        .unwrap()
        .value;
        assert!(avg.abs() < 1e-10, "mean of (log theta)'' = {avg:e}");
    }

    #[test]
    fn y_elliptic_end_to_end() {
        let p = ScalePoint::from_st(0.0, 4.0).unwrap();
        let r = y_elliptic(&p).unwrap();
        assert_eq!(r.regime, RegimeLabel::Elliptic);
        assert_eq!(r.error_order, ErrorOrder::InverseSqrtT);
        assert!(
            (r.value - (-3.2391059613902073)).abs() < 1e-6,
            "value {}",
            r.value
        );

        // regime rejections
        assert!(y_elliptic(&ScalePoint::from_st(0.0, -4.0).unwrap()).is_err());
        assert!(y_elliptic(&ScalePoint::from_st(1.0, 4.0).unwrap()).is_err());

        // within the endpoint guard the modulation point degenerates and
        // the evaluation defers to the critical module
        let near = ScalePoint::from_st(S_RIGHT - 1e-8, 4.0).unwrap();
        assert!(matches!(y_elliptic(&near), Err(Error::Degenerate(_))));
    }

    #[test]
    fn jump_identities_across_interior_sweep() {
        let trace = continuation_sweep(S_LEFT + 0.4, S_RIGHT - 0.04, 5).unwrap();
        for p in &trace.points {
            let d = derive_elliptic(p).unwrap();
            for i in 1..=5 {
                let f = i as f64 / 6.0;
                let x = p.beta2 + f * (p.beta1 - p.beta2);
                let gp = g_elliptic(Complex64::new(x, 0.0), p, Some(CutSide::Plus)).unwrap();
                let gm = g_elliptic(Complex64::new(x, 0.0), p, Some(CutSide::Minus)).unwrap();
                assert!((gp + gm).norm() < 1e-9);

                let x2 = p.beta3 + f * (p.beta2 - p.beta3);
                let gp2 = g_elliptic(Complex64::new(x2, 0.0), p, Some(CutSide::Plus)).unwrap();
                let gm2 = g_elliptic(Complex64::new(x2, 0.0), p, Some(CutSide::Minus)).unwrap();
                assert!(((gp2 - gm2) - Complex64::new(0.0, -d.omega)).norm() < 1e-9);
            }
        }
    }
}
