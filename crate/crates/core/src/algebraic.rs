//! Algebraic-regime machinery: the cubic root z0(s), the half-power
//! g-function with its sign conditions, regime classification, and the
//! leading-order evaluation of y outside the oscillatory zone.

use crate::error::{Error, Result};
use crate::types::{
    CutSide, ErrorOrder, ExpansionResult, RegimeLabel, ScalePoint, S_LEFT, S_RIGHT,
};
use num_complex::Complex64;

/// z0 at the left admissible boundary s = -2 sqrt(3) (t > 0): 4 sqrt(3).
pub const Z0_AT_S_LEFT: f64 = 6.928203230275509174;

/// z0 at the right admissible boundary s = 2 sqrt(15)/27: -4 sqrt(15)/3.
pub const Z0_AT_S_RIGHT: f64 = -5.163977794943222514;

fn check_sign(sign_t: i32) -> Result<f64> {
    match sign_t {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        _ => Err(Error::Domain(format!("sign_t must be +1 or -1, got {sign_t}"))),
    }
}

/// Residual of the defining cubic, z0^3 - 24 sgn(t) z0 + 48 s.
pub fn z0_residual(z0: f64, s: f64, sign_t: i32) -> f64 {
    let sgn = if sign_t >= 0 { 1.0 } else { -1.0 };
    z0 * z0 * z0 - 24.0 * sgn * z0 + 48.0 * s
}

/// Solves z0^3 = 24 sgn(t) z0 - 48 s for the branch relevant to the
/// algebraic regime.
///
/// For sign_t = -1 the cubic is strictly monotone and the real root is
/// unique. For sign_t = +1 the admissible branch continues from |s| large:
/// z0 >= 4 sqrt(3) when s <= -2 sqrt(3), z0 <= -4 sqrt(15)/3 when
/// s >= 2 sqrt(15)/27. (For s slightly beyond the right boundary the cubic
/// has two more real roots; they sit inside the interval where the sign
/// conditions of the g-function fail and are never the relevant branch.)
pub fn solve_z0(s: f64, sign_t: i32) -> Result<f64> {
    let sgn = check_sign(sign_t)?;
    if !s.is_finite() {
        return Err(Error::Domain(format!("s must be finite, got {s}")));
    }

    let (mut lo, mut hi) = if sgn < 0.0 {
        // f(z) = z^3 + 24 z + 48 s, increasing everywhere
        let b = (48.0 * s.abs()).cbrt() + 5.0;
        (-b, b)
    } else if s <= S_LEFT {
        // branch with z0 >= 4 sqrt(3); f is increasing there
        let b = Z0_AT_S_LEFT.max((48.0 * s.abs()).cbrt() + 24.0_f64.sqrt()) + 5.0;
        (Z0_AT_S_LEFT, b)
    } else if s >= S_RIGHT {
        // branch with z0 <= -4 sqrt(15)/3; f is increasing there
        let b = Z0_AT_S_RIGHT.min(-((48.0 * s.abs()).cbrt() + 24.0_f64.sqrt())) - 5.0;
        (b, Z0_AT_S_RIGHT)
    } else {
        return Err(Error::Regime(format!(
            "for t > 0 the algebraic branch requires s outside ({S_LEFT}, {S_RIGHT}), got s = {s}"
        )));
    };

    let f = |z: f64| z * z * z - 24.0 * sgn * z + 48.0 * s;
    let fp = |z: f64| 3.0 * z * z - 24.0 * sgn;

    debug_assert!(f(lo) <= 0.0 && f(hi) >= 0.0);

    // safeguarded Newton: bisection step whenever Newton leaves the bracket
    let mut z = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fz = f(z);
        if fz == 0.0 {
            break;
        }
        if fz > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let dz = fp(z);
        let mut z_next = if dz != 0.0 { z - fz / dz } else { 0.5 * (lo + hi) };
        if !(z_next >= lo && z_next <= hi) {
            z_next = 0.5 * (lo + hi);
        }
        if (z_next - z).abs() <= 1e-16 * z.abs().max(1.0) {
            z = z_next;
            break;
        }
        z = z_next;
    }

    let tol = 1e-11 * z.abs().powi(3).max(1.0);
    if f(z).abs() > tol {
        return Err(Error::SolverConvergence(format!(
            "cubic residual {:e} exceeds {:e} at z0={z}",
            f(z).abs(),
            tol
        )));
    }
    Ok(z)
}

/// Classifies a scale point into its asymptotic regime. Edge bands of
/// half-width `edge_width` (closed comparisons) take precedence over the
/// bulk labels so the classification is deterministic on band boundaries.
pub fn classify(p: &ScalePoint, edge_width: f64) -> Result<RegimeLabel> {
    if p.t == 0.0 || !p.t.is_finite() {
        return Err(Error::Domain(format!("classification requires t != 0, got t = {}", p.t)));
    }
    if !(edge_width >= 0.0) {
        return Err(Error::Domain(format!(
            "edge_width must be non-negative, got {edge_width}"
        )));
    }
    if p.t < 0.0 {
        return Ok(RegimeLabel::AlgebraicNegT);
    }
    if (p.s - S_LEFT).abs() <= edge_width {
        return Ok(RegimeLabel::EdgePII);
    }
    if (p.s - S_RIGHT).abs() <= edge_width {
        return Ok(RegimeLabel::EdgeSoliton);
    }
    if p.s > S_LEFT && p.s < S_RIGHT {
        return Ok(RegimeLabel::Elliptic);
    }
    Ok(RegimeLabel::AlgebraicPosT)
}

/// The algebraic g-function data: g(zeta) = c1 (zeta-z0)^{7/2}
/// + c2 (zeta-z0)^{5/2} + c3 (zeta-z0)^{3/2}, branch cut on (-inf, z0].
#[derive(Debug, Clone, Copy)]
pub struct AlgebraicG {
    pub z0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    sign_t: i32,
}

impl AlgebraicG {
    /// Solves the cubic and assembles the coefficients
    /// c1 = 1/105, c2 = z0/30, c3 = z0^2/24 - sgn(t)/3.
    pub fn new(s: f64, sign_t: i32) -> Result<Self> {
        let sgn = check_sign(sign_t)?;
        let z0 = solve_z0(s, sign_t)?;
        Ok(Self {
            z0,
            c1: 1.0 / 105.0,
            c2: z0 / 30.0,
            c3: z0 * z0 / 24.0 - sgn / 3.0,
            sign_t,
        })
    }

    pub fn sign_t(&self) -> i32 {
        self.sign_t
    }
}

/// Principal square root taking a cut-side flag for real non-positive
/// radicands: sqrt(w)_+ = i sqrt(|w|), sqrt(w)_- = -i sqrt(|w|).
fn branch_sqrt(w: Complex64, side: Option<CutSide>) -> Result<Complex64> {
    if w.im == 0.0 && w.re <= 0.0 {
        let Some(side) = side else {
            return Err(Error::CutAmbiguity(
                "evaluation on the branch cut requires a side flag".to_string(),
            ));
        };
        let r = (-w.re).sqrt();
        return Ok(match side {
            CutSide::Plus => Complex64::new(0.0, r),
            CutSide::Minus => Complex64::new(0.0, -r),
        });
    }
    Ok(w.sqrt())
}

/// Evaluates the algebraic g-function at `zeta`. Points on the cut
/// (-inf, z0] need a `side` flag selecting the boundary value.
pub fn g_algebraic(zeta: Complex64, g: &AlgebraicG, side: Option<CutSide>) -> Result<Complex64> {
    let w = zeta - Complex64::new(g.z0, 0.0);
    let root = branch_sqrt(w, side)?;
    // (zeta-z0)^{k/2} = w^{(k-1)/2} * sqrt(w) keeps a single branch choice.
    let w3 = w * root; // w^{3/2}
    let w5 = w * w3; // w^{5/2}
    let w7 = w * w5; // w^{7/2}
    Ok(w7 * g.c1 + w5 * g.c2 + w3 * g.c3)
}

/// The phase theta(zeta; x, t) = zeta^{7/2}/105 - t zeta^{3/2}/3
/// + x zeta^{1/2}, principal cut on (-inf, 0].
pub fn phase_theta(zeta: Complex64, x: f64, t: f64, side: Option<CutSide>) -> Result<Complex64> {
    let root = branch_sqrt(zeta, side)?;
    let z3 = zeta * root;
    let z7 = zeta * zeta * z3;
    Ok(z7 / 105.0 - z3 * (t / 3.0) + root * x)
}

/// Remainder of g after subtracting the three-term large-zeta head
/// zeta^{7/2}/105 - sgn(t) zeta^{3/2}/3 + s zeta^{1/2}, evaluated through
/// the convergent binomial tail series (valid for zeta > |z0|). Direct
/// subtraction of the head loses all significance at large zeta; the tail
/// form is exact term-by-term.
pub fn g_algebraic_remainder(zeta: f64, g: &AlgebraicG) -> Result<f64> {
    if zeta <= g.z0.abs() {
        return Err(Error::Domain(format!(
            "tail series requires zeta > |z0| = {}, got {zeta}",
            g.z0.abs()
        )));
    }
    let u = g.z0 / zeta;
    // tail_k(a, n) = sum_{j > n} C(a, j) (-u)^j, with C the generalized
    // binomial coefficient of (1 - u)^a
    let tail = |a: f64, n_keep: usize| -> f64 {
        let mut coeff = 1.0;
        let mut power = 1.0;
        let mut sum = 0.0;
        for j in 1..300 {
            coeff *= (a - (j as f64 - 1.0)) / j as f64;
            power *= -u;
            if j > n_keep {
                let term = coeff * power;
                sum += term;
                if term.abs() < 1e-20 * (sum.abs() + 1e-300) {
                    break;
                }
            }
        }
        sum
    };
    Ok(g.c1 * zeta.powf(3.5) * tail(3.5, 3)
        + g.c2 * zeta.powf(2.5) * tail(2.5, 2)
        + g.c3 * zeta.powf(1.5) * tail(1.5, 1))
}

/// One sign violation found by the proposition scan.
#[derive(Debug, Clone, Copy)]
pub struct SignViolation {
    pub zeta: f64,
    pub value: f64,
}

/// Report of the inequality scan for the algebraic g-function: g > 0 to the
/// right of z0 and Im g'_+ > 0 to the left, plus the two discriminant
/// conditions from the proof at the parameter ranges where they are
/// asserted to hold.
#[derive(Debug, Clone)]
pub struct PropositionReport {
    pub g_positive_violations: Vec<SignViolation>,
    pub im_gprime_violations: Vec<SignViolation>,
    pub disc1_value: f64,
    pub disc1_asserted: bool,
    pub disc2_value: f64,
    pub disc2_asserted: bool,
    pub points_scanned: usize,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.g_positive_violations.is_empty()
            && self.im_gprime_violations.is_empty()
            && (!self.disc1_asserted || self.disc1_value < 0.0)
            && (!self.disc2_asserted || self.disc2_value < 0.0)
    }
}

/// Scans g on (z0, z0+radius] and Im g'_+ on [z0-radius, z0) over
/// log-spaced grids of `n_points` each. Offsets run from 1e-6 up to
/// `radius`.
pub fn check_proposition_g(g: &AlgebraicG, radius: f64, n_points: usize) -> PropositionReport {
    let n = n_points.max(2);
    let lo = -6.0; // 10^-6 smallest offset
    let hi = radius.log10();
    let offset = |i: usize| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64);

    let mut g_positive_violations = Vec::new();
    let mut im_gprime_violations = Vec::new();

    for i in 0..n {
        let w = offset(i);
        // g(z0 + w) for w > 0, real form
        let val = w.powf(1.5) * (g.c3 + w * (g.c2 + w * g.c1));
        if val <= 0.0 {
            g_positive_violations.push(SignViolation {
                zeta: g.z0 + w,
                value: val,
            });
        }
        // Im g'_+(z0 - w): (7/2) c1 w^{5/2} - (5/2) c2 w^{3/2} + (3/2) c3 w^{1/2}
        let im = w.sqrt() * (1.5 * g.c3 + w * (-2.5 * g.c2 + w * 3.5 * g.c1));
        if im <= 0.0 {
            im_gprime_violations.push(SignViolation {
                zeta: g.z0 - w,
                value: im,
            });
        }
    }

    // c2^2 - 4 c1 c3 = -(1/315)(3 z0^2/20 - 4 sgn(t)): no real zeros of the
    // quadratic cofactor; asserted for t < 0 and for |z0| > 4 sqrt(5/3).
    let disc1_value = g.c2 * g.c2 - 4.0 * g.c1 * g.c3;
    let disc1_asserted = g.sign_t < 0 || g.z0.abs() > 4.0 * (5.0_f64 / 3.0).sqrt();
    // (25/4) c2^2 - 21 c1 c3: zeros of Im g'_+; asserted for t < 0 and
    // |z0| > 4 sqrt(3).
    let disc2_value = 6.25 * g.c2 * g.c2 - 21.0 * g.c1 * g.c3;
    let disc2_asserted = g.sign_t < 0 || g.z0.abs() > 4.0 * 3.0_f64.sqrt();

    PropositionReport {
        g_positive_violations,
        im_gprime_violations,
        disc1_value,
        disc1_asserted,
        disc2_value,
        disc2_asserted,
        points_scanned: 2 * n,
    }
}

/// Algebraic-regime evaluation: y = (z0(s)/2) |t|^{1/2} + O(|t|^{-1}).
/// Valid for t < 0 (any s) and for t > 0 with s outside the open
/// oscillatory interval (the endpoints themselves are admitted so the
/// boundary values can be cross-checked against the edge formulas).
pub fn y_algebraic(p: &ScalePoint) -> Result<ExpansionResult> {
    let sign_t = if p.t < 0.0 { -1 } else { 1 };
    if p.t == 0.0 {
        return Err(Error::Domain("y_algebraic requires t != 0".to_string()));
    }
    let z0 = solve_z0(p.s, sign_t)?; // regime error inside the interval
    let regime = if sign_t < 0 {
        RegimeLabel::AlgebraicNegT
    } else {
        RegimeLabel::AlgebraicPosT
    };
    Ok(ExpansionResult::new(
        0.5 * z0 * p.t.abs().sqrt(),
        0.0,
        ErrorOrder::InverseT,
        regime,
    ))
}
