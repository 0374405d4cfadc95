//! Airy function Ai(x) on the real line to ~1e-10 absolute accuracy.
//!
//! Maclaurin series on the middle range, DLMF-style asymptotic expansions
//! outside it. The switch points are placed where both routes deliver
//! comfortably below the accuracy target (series cancellation grows to the
//! left, asymptotic truncation error grows toward the origin).

/// Ai(0) = 3^(-2/3) / Gamma(2/3).
pub const AIRY_AI_0: f64 = 0.355028053887817239_f64;

/// Ai'(0) = -3^(-1/3) / Gamma(1/3).
pub const AIRY_AI_PRIME_0: f64 = -0.258819403792806798_f64;

const SWITCH_POS: f64 = 5.5;
const SWITCH_NEG: f64 = -7.03;

/// Airy function of the first kind.
pub fn airy_ai(x: f64) -> f64 {
    if x > SWITCH_POS {
        ai_asymptotic_pos(x)
    } else if x < SWITCH_NEG {
        ai_asymptotic_neg(x)
    } else {
        ai_series(x)
    }
}

/// Ai = Ai(0) f(x) + Ai'(0) g(x) with
/// f = sum x^{3k} prod 1/((3j-1)3j), g = sum x^{3k+1} prod 1/(3j(3j+1)).
fn ai_series(x: f64) -> f64 {
    let x3 = x * x * x;
    let mut f_term = 1.0;
    let mut f_sum = 1.0;
    let mut g_term = x;
    let mut g_sum = x;
    for k in 0..200 {
        let kf = k as f64;
        f_term *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        g_term *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        f_sum += f_term;
        g_sum += g_term;
        if f_term.abs() < 1e-18 * f_sum.abs() && g_term.abs() < 1e-18 * g_sum.abs().max(1.0) {
            break;
        }
    }
    AIRY_AI_0 * f_sum + AIRY_AI_PRIME_0 * g_sum
}

/// u_k coefficients of the Airy asymptotic series, generated on the fly:
/// u_0 = 1, u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k).
fn next_u(u_prev: f64, k: usize) -> f64 {
    let kf = k as f64;
    u_prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
        / ((2.0 * kf - 1.0) * 216.0 * kf)
}

fn ai_asymptotic_pos(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let mut sum = 1.0_f64;
    let mut u = 1.0;
    let mut term_prev = 1.0;
    for k in 1..60 {
        u = next_u(u, k);
        let term = u / zeta.powi(k as i32);
        if term >= term_prev || term < 1e-18 * sum.abs() {
            break; // divergent tail reached or converged
        }
        sum += if k % 2 == 0 { term } else { -term };
        term_prev = term;
    }
    (-zeta).exp() * sum / (2.0 * std::f64::consts::PI.sqrt() * x.powf(0.25))
}

fn ai_asymptotic_neg(x: f64) -> f64 {
    let y = -x;
    let zeta = 2.0 / 3.0 * y.powf(1.5);
    // even-index u's pair with cos, odd-index with sin
    let mut even_sum = 1.0;
    let mut odd_sum = 0.0;
    let mut u = 1.0;
    let mut term_prev = f64::INFINITY;
    for j in 1..60 {
        u = next_u(u, j);
        let term = u / zeta.powi(j as i32);
        if term >= term_prev {
            break;
        }
        let signed = if (j / 2) % 2 == 0 { term } else { -term };
        if j % 2 == 0 {
            even_sum += signed;
        } else {
            odd_sum += signed;
        }
        if term < 1e-18 {
            break;
        }
        term_prev = term;
    }
    let phase = zeta - std::f64::consts::FRAC_PI_4;
    (phase.cos() * even_sum + phase.sin() * odd_sum)
        / (std::f64::consts::PI.sqrt() * y.powf(0.25))
}
