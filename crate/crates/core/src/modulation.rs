//! The three modulation equations for the branch points (beta3, beta2, beta1)
//! on s in [-2 sqrt(3), 2 sqrt(15)/27]:
//!
//!   r1: (sum beta)^2 + 2 sum beta^2 = 120
//!   r2: (sum beta)^3 - 4 sum beta^3 = 360 s
//!   r3: int_{beta3}^{beta2} sqrt(xi-beta3) (xi-alpha) sqrt(beta2-xi) sqrt(beta1-xi) dxi = 0
//!
//! with alpha = -(beta3+beta2+beta1)/2. Solved by damped Newton iteration;
//! seeds come from a gap-parameterized continuation that walks away from the
//! confluent endpoint solutions, where the Jacobian of the plain system
//! degenerates (two branch points collide and s departs quadratically in
//! the gap).

use crate::error::{Error, Result};
use crate::specfn::elliptic::{elliptic_e, elliptic_k};
use crate::specfn::quad::{integrate, QuadratureSpec};
use crate::types::{S_LEFT, S_RIGHT};

/// Distance from an endpoint (in s) below which the exact confluent
/// solution is returned instead of iterating on a near-singular Jacobian.
pub const ENDPOINT_GUARD: f64 = 1e-7;

const NEWTON_RESIDUAL_TOL: f64 = 1e-10;
const NEWTON_STEP_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 80;

const SQRT3: f64 = 1.732050807568877293527446;
const SQRT15: f64 = 3.872983346207416885179265;

/// Ordered branch points solving the modulation system at a given s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationPoint {
    pub s: f64,
    pub beta3: f64,
    pub beta2: f64,
    pub beta1: f64,
}

impl ModulationPoint {
    pub fn new(s: f64, beta3: f64, beta2: f64, beta1: f64) -> Self {
        Self { s, beta3, beta2, beta1 }
    }

    /// alpha = -(beta3 + beta2 + beta1)/2.
    pub fn alpha(&self) -> f64 {
        -0.5 * (self.beta3 + self.beta2 + self.beta1)
    }

    /// Confluent solution at the left endpoint s = -2 sqrt(3):
    /// beta3 = beta2 = alpha = -sqrt(3), beta1 = 4 sqrt(3).
    pub fn confluent_left() -> Self {
        Self::new(S_LEFT, -SQRT3, -SQRT3, 4.0 * SQRT3)
    }

    /// Confluent solution at the right endpoint s = 2 sqrt(15)/27:
    /// beta3 = -4 sqrt(15)/3, beta2 = beta1 = sqrt(15).
    pub fn confluent_right() -> Self {
        Self::new(S_RIGHT, -4.0 * SQRT15 / 3.0, SQRT15, SQRT15)
    }

    /// Weak ordering invariant beta3 <= alpha <= beta2 <= beta1.
    pub fn ordering_ok(&self) -> bool {
        let a = self.alpha();
        let slack = 1e-12 * (1.0 + self.beta1.abs().max(self.beta3.abs()));
        self.beta3 <= a + slack && a <= self.beta2 + slack && self.beta2 <= self.beta1 + slack
    }

    /// Gaps between the merging pairs, relative to the full spread.
    pub fn left_gap(&self) -> f64 {
        self.beta2 - self.beta3
    }
    pub fn right_gap(&self) -> f64 {
        self.beta1 - self.beta2
    }
}

pub fn r1_of(b3: f64, b2: f64, b1: f64) -> f64 {
    let sum = b3 + b2 + b1;
    sum * sum + 2.0 * (b3 * b3 + b2 * b2 + b1 * b1) - 120.0
}

pub fn r2_of(b3: f64, b2: f64, b1: f64) -> f64 {
    let sum = b3 + b2 + b1;
    sum * sum * sum - 4.0 * (b3 * b3 * b3 + b2 * b2 * b2 + b1 * b1 * b1)
}

/// The band integral of r3; vanishing endpoint factors are declared as
/// half-power singularities so the substituted integrand is smooth.
pub fn r3_of(b3: f64, b2: f64, b1: f64, quad: &QuadratureSpec) -> Result<f64> {
    if b2 <= b3 {
        return Ok(0.0);
    }
    let alpha = -0.5 * (b3 + b2 + b1);
    let spec = QuadratureSpec {
        endpoint_exponents: (0.5, 0.5),
        ..*quad
    };
    let v = integrate(
        |xi| {
            ((xi - b3).max(0.0)).sqrt()
                * (xi - alpha)
                * ((b2 - xi).max(0.0)).sqrt()
                * ((b1 - xi).max(0.0)).sqrt()
        },
        b3,
        b2,
        &spec,
    )?;
    Ok(v.value)
}

fn default_r3_quad() -> QuadratureSpec {
    QuadratureSpec::default().with_tols(1e-12, 1e-13)
}

/// Residuals (r1, r2 - 360 s, r3) of the modulation system at `m`.
pub fn residuals(m: &ModulationPoint) -> Result<(f64, f64, f64)> {
    residuals_refined(m, 1.0)
}

/// Residuals with the r3 quadrature tolerance tightened by `tighten`
/// (refinement oracle for the residual suite).
pub fn residuals_refined(m: &ModulationPoint, tighten: f64) -> Result<(f64, f64, f64)> {
    if !m.ordering_ok() {
        return Err(Error::Domain(format!(
            "modulation point violates ordering beta3 <= alpha <= beta2 <= beta1: {m:?}"
        )));
    }
    let quad = default_r3_quad().tightened(tighten);
    Ok((
        r1_of(m.beta3, m.beta2, m.beta1),
        r2_of(m.beta3, m.beta2, m.beta1) - 360.0 * m.s,
        r3_of(m.beta3, m.beta2, m.beta1, &quad)?,
    ))
}

/// Checks that s lies in the closed admissible interval.
fn check_s(s: f64) -> Result<()> {
    if !(S_LEFT - 1e-12..=S_RIGHT + 1e-12).contains(&s) {
        return Err(Error::Domain(format!(
            "modulation system is solvable for s in [{S_LEFT}, {S_RIGHT}], got {s}"
        )));
    }
    Ok(())
}

fn residual_vec(v: &[f64; 3], s: f64, quad: &QuadratureSpec) -> Result<[f64; 3]> {
    Ok([
        r1_of(v[0], v[1], v[2]),
        r2_of(v[0], v[1], v[2]) - 360.0 * s,
        r3_of(v[0], v[1], v[2], quad)?,
    ])
}

fn max_abs3(v: &[f64; 3]) -> f64 {
    v[0].abs().max(v[1].abs()).max(v[2].abs())
}

/// Solves the 3x3 linear system `a x = b` in place by Gaussian elimination
/// with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3(a: &mut [[f64; 3]; 3], b: &mut [f64; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::SolverConvergence("singular Jacobian".to_string()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Damped Newton iteration on (r1, r2 - 360 s, r3) with a central
/// finite-difference Jacobian (step 1e-6 times the component scale).
/// Converges when the max residual is <= 1e-10 and the last step <= 1e-12.
fn newton3(s: f64, init: [f64; 3], quad: &QuadratureSpec) -> Result<(ModulationPoint, usize)> {
    let mut v = init;
    let mut f = residual_vec(&v, s, quad)?;
    let mut last_step = f64::INFINITY;

    for iter in 0..NEWTON_MAX_ITER {
        if max_abs3(&f) <= NEWTON_RESIDUAL_TOL && last_step <= NEWTON_STEP_TOL {
            let p = ModulationPoint::new(s, v[0], v[1], v[2]);
            return Ok((p, iter));
        }

        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let h = 1e-6 * v[j].abs().max(1.0);
            let mut vp = v;
            vp[j] += h;
            let mut vm = v;
            vm[j] -= h;
            let fp = residual_vec(&vp, s, quad)?;
            let fm = residual_vec(&vm, s, quad)?;
            for i in 0..3 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }

        let mut a = jac;
        let mut rhs = f;
        let step = solve3(&mut a, &mut rhs)?;

        let f_norm = max_abs3(&f);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = [
                v[0] - lambda * step[0],
                v[1] - lambda * step[1],
                v[2] - lambda * step[2],
            ];
            if trial[0] < trial[1] && trial[1] < trial[2] {
                let ft = residual_vec(&trial, s, quad)?;
                if max_abs3(&ft) < f_norm || f_norm <= NEWTON_RESIDUAL_TOL {
                    v = trial;
                    f = ft;
                    last_step = lambda * max_abs3(&step);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverConvergence(format!(
                "Newton stalled at iteration {iter}: residual {:e}, s = {s}",
                f_norm
            )));
        }
    }
    Err(Error::SolverConvergence(format!(
        "Newton did not converge in {NEWTON_MAX_ITER} iterations at s = {s}: residual {:e}, last step {:e}",
        max_abs3(&f),
        last_step
    )))
}

/// Which confluent endpoint a gap-parameterized branch walk starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
enum MarchSide {
    Left,
    Right,
}

/// At a fixed gap between the merging pair, solve (r1, r3) = 0 for the two
/// remaining degrees of freedom. This 2x2 system stays well-conditioned all
/// the way into the confluence, unlike the full system at fixed s.
///
/// Left side: unknowns (mid, b1) with beta3 = mid - gap/2, beta2 = mid + gap/2.
/// Right side: unknowns (b3, mid) with beta2 = mid - gap/2, beta1 = mid + gap/2.
fn solve_at_gap(
    side: MarchSide,
    gap: f64,
    init: [f64; 2],
    quad: &QuadratureSpec,
) -> Result<[f64; 2]> {
    let assemble = |u: &[f64; 2]| -> (f64, f64, f64) {
        match side {
            MarchSide::Left => (u[0] - 0.5 * gap, u[0] + 0.5 * gap, u[1]),
            MarchSide::Right => (u[0], u[1] - 0.5 * gap, u[1] + 0.5 * gap),
        }
    };
    let eval = |u: &[f64; 2]| -> Result<[f64; 2]> {
        let (b3, b2, b1) = assemble(u);
        Ok([r1_of(b3, b2, b1), r3_of(b3, b2, b1, quad)?])
    };

    let mut u = init;
    let mut f = eval(&u)?;
    for _ in 0..NEWTON_MAX_ITER {
        let fn0 = f[0].abs().max(f[1].abs());
        if fn0 <= 1e-12 {
            return Ok(u);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * u[j].abs().max(1.0);
            let mut up = u;
            up[j] += h;
            let mut um = u;
            um[j] -= h;
            let fp = eval(&up)?;
            let fm = eval(&um)?;
            jac[0][j] = (fp[0] - fm[0]) / (2.0 * h);
            jac[1][j] = (fp[1] - fm[1]) / (2.0 * h);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::SolverConvergence(
                "singular gap-system Jacobian".to_string(),
            ));
        }
        let step = [
            (f[0] * jac[1][1] - f[1] * jac[0][1]) / det,
            (jac[0][0] * f[1] - jac[1][0] * f[0]) / det,
        ];
        let mut lambda = 1.0;
        let mut ok = false;
        for _ in 0..10 {
            let trial = [u[0] - lambda * step[0], u[1] - lambda * step[1]];
            let (b3, b2, b1) = assemble(&trial);
            if b3 < b2 && b2 < b1 {
                let ft = eval(&trial)?;
                if ft[0].abs().max(ft[1].abs()) < fn0 || fn0 <= 1e-12 {
                    u = trial;
                    f = ft;
                    ok = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !ok {
            return Err(Error::SolverConvergence(format!(
                "gap system stalled at gap = {gap}"
            )));
        }
    }
    Err(Error::SolverConvergence(format!(
        "gap system did not converge at gap = {gap}"
    )))
}

/// Walks the branch in the gap parameter from the nearer confluent endpoint
/// until the target s is bracketed, then refines the gap by bisection.
/// Returns a seed for the full Newton solve at fixed s.
fn march_seed(s: f64, quad: &QuadratureSpec) -> Result<[f64; 3]> {
    let side = if s - S_LEFT <= S_RIGHT - s {
        MarchSide::Left
    } else {
        MarchSide::Right
    };
    let assemble = |u: &[f64; 2], gap: f64| -> [f64; 3] {
        match side {
            MarchSide::Left => [u[0] - 0.5 * gap, u[0] + 0.5 * gap, u[1]],
            MarchSide::Right => [u[0], u[1] - 0.5 * gap, u[1] + 0.5 * gap],
        }
    };
    let s_of = |b: &[f64; 3]| r2_of(b[0], b[1], b[2]) / 360.0;
    // s grows with the gap on the left branch and shrinks on the right one
    let toward = |s_gap: f64| match side {
        MarchSide::Left => s_gap < s,
        MarchSide::Right => s_gap > s,
    };

    let mut gap = 1e-3;
    let mut u = match side {
        MarchSide::Left => [-SQRT3, 4.0 * SQRT3],
        MarchSide::Right => [-4.0 * SQRT15 / 3.0, SQRT15],
    };
    u = solve_at_gap(side, gap, u, quad)?;
    let mut s_cur = s_of(&assemble(&u, gap));

    if !toward(s_cur) {
        // target sits between the confluence and the first rung: shrink
        let mut hi = (gap, u, s_cur);
        loop {
            gap *= 0.25;
            if gap < 1e-9 {
                // the guard in solve_modulation catches true endpoint hits;
                // reaching here means s is effectively at the endpoint
                return Ok(assemble(&hi.1, hi.0));
            }
            u = solve_at_gap(side, gap, u, quad)?;
            s_cur = s_of(&assemble(&u, gap));
            if toward(s_cur) {
                break;
            }
            hi = (gap, u, s_cur);
        }
        return bisect_gap(side, (gap, u, s_cur), (hi.0, hi.1, hi.2), s, quad).map(|(u, g)| assemble(&u, g));
    }

    // march outward until the target is passed
    let mut lo = (gap, u, s_cur);
    let gap_cap = match side {
        MarchSide::Left => 9.02,
        MarchSide::Right => 7.9,
    };
    for _ in 0..400 {
        let gap_next = (lo.0 * 1.35).min(gap_cap);
        let u_next = solve_at_gap(side, gap_next, lo.1, quad)?;
        let s_next = s_of(&assemble(&u_next, gap_next));
        if !toward(s_next) {
            return bisect_gap(side, (gap_next, u_next, s_next), lo, s, quad)
                .map(|(u, g)| assemble(&u, g));
        }
        lo = (gap_next, u_next, s_next);
        if gap_next >= gap_cap {
            break;
        }
    }
    Err(Error::SolverConvergence(format!(
        "gap march failed to bracket s = {s}"
    )))
}

type GapState = (f64, [f64; 2], f64);

/// Bisection on the gap between two states straddling the target s.
fn bisect_gap(
    side: MarchSide,
    mut far: GapState,
    mut near: GapState,
    s_target: f64,
    quad: &QuadratureSpec,
) -> Result<([f64; 2], f64)> {
    for _ in 0..80 {
        let gap_mid = 0.5 * (far.0 + near.0);
        let u_mid = solve_at_gap(side, gap_mid, near.1, quad)?;
        let b = match side {
            MarchSide::Left => [u_mid[0] - 0.5 * gap_mid, u_mid[0] + 0.5 * gap_mid, u_mid[1]],
            MarchSide::Right => [u_mid[0], u_mid[1] - 0.5 * gap_mid, u_mid[1] + 0.5 * gap_mid],
        };
        let s_mid = r2_of(b[0], b[1], b[2]) / 360.0;
        if (s_mid - s_target).abs() <= 1e-11 || (far.0 - near.0).abs() <= 1e-13 * far.0.max(1e-3)
        {
            return Ok((u_mid, gap_mid));
        }
        let mid_toward = match side {
            MarchSide::Left => s_mid < s_target,
            MarchSide::Right => s_mid > s_target,
        };
        if mid_toward {
            near = (gap_mid, u_mid, s_mid);
        } else {
            far = (gap_mid, u_mid, s_mid);
        }
    }
    Ok((near.1, near.0))
}

/// Solves the modulation system at `s` in [-2 sqrt(3), 2 sqrt(15)/27].
///
/// Within 1e-7 of an endpoint the exact confluent solution is returned.
/// With a `seed` the Newton iteration starts there directly; otherwise a
/// gap continuation from the nearer confluent endpoint supplies the seed.
pub fn solve_modulation(s: f64, seed: Option<&ModulationPoint>) -> Result<ModulationPoint> {
    check_s(s)?;
    if (s - S_LEFT).abs() <= ENDPOINT_GUARD {
        return Ok(ModulationPoint::confluent_left());
    }
    if (s - S_RIGHT).abs() <= ENDPOINT_GUARD {
        return Ok(ModulationPoint::confluent_right());
    }

    let quad = default_r3_quad();
    let init = match seed {
        Some(p) => [p.beta3, p.beta2, p.beta1],
        None => march_seed(s, &quad)?,
    };
    let (point, _) = newton3(s, init, &quad)?;
    if !point.ordering_ok() {
        return Err(Error::SolverConvergence(format!(
            "converged point violates ordering at s = {s}: {point:?}"
        )));
    }
    Ok(point)
}

/// An accepted continuation path through the admissible interval.
#[derive(Debug, Clone)]
pub struct ContinuationTrace {
    pub points: Vec<ModulationPoint>,
    pub step_sizes: Vec<f64>,
    pub newton_iters: Vec<usize>,
}

impl ContinuationTrace {
    /// CSV export. Columns: s, beta3, alpha, beta2, beta1, r1, r2, r3
    /// (r2 is the defect against 360 s).
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("s,beta3,alpha,beta2,beta1,r1,r2,r3\n");
        for p in &self.points {
            let (r1, r2, r3) = residuals(p)?;
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.s,
                p.beta3,
                p.alpha(),
                p.beta2,
                p.beta1,
                r1,
                r2,
                r3
            ));
        }
        Ok(out)
    }
}

/// Adaptive continuation from `s_from` to `s_to` producing at least `n_min`
/// accepted points (more when steps get halved), strictly monotone in s.
pub fn continuation_sweep(s_from: f64, s_to: f64, n_min: usize) -> Result<ContinuationTrace> {
    check_s(s_from)?;
    check_s(s_to)?;
    if n_min == 0 {
        return Err(Error::Domain("n_min must be at least 1".to_string()));
    }

    let mut trace = ContinuationTrace {
        points: vec![solve_modulation(s_from, None)?],
        step_sizes: vec![0.0],
        newton_iters: vec![0],
    };
    if s_from == s_to || n_min == 1 {
        return Ok(trace);
    }

    let quad = default_r3_quad();
    let n = n_min.max(2);
    let targets: Vec<f64> = (1..n)
        .map(|k| s_from + (s_to - s_from) * k as f64 / (n - 1) as f64)
        .collect();

    for &target in &targets {
        advance_to(&mut trace, target, &quad, 0)?;
    }
    Ok(trace)
}

/// Steps the trace to `target`, halving the step on Newton failure.
fn advance_to(
    trace: &mut ContinuationTrace,
    target: f64,
    quad: &QuadratureSpec,
    depth: usize,
) -> Result<()> {
    let last = *trace.points.last().expect("non-empty trace");

    if (target - S_LEFT).abs() <= ENDPOINT_GUARD {
        trace.points.push(ModulationPoint::confluent_left());
        trace.step_sizes.push(target - last.s);
        trace.newton_iters.push(0);
        return Ok(());
    }
    if (target - S_RIGHT).abs() <= ENDPOINT_GUARD {
        trace.points.push(ModulationPoint::confluent_right());
        trace.step_sizes.push(target - last.s);
        trace.newton_iters.push(0);
        return Ok(());
    }

    // secant predictor over the two most recent accepted points
    let init = if trace.points.len() >= 2 {
        let prev = trace.points[trace.points.len() - 2];
        let ds = last.s - prev.s;
        if ds.abs() > 1e-14 && prev.left_gap() > 1e-6 && last.left_gap() > 1e-6 {
            let w = (target - last.s) / ds;
            [
                last.beta3 + w * (last.beta3 - prev.beta3),
                last.beta2 + w * (last.beta2 - prev.beta2),
                last.beta1 + w * (last.beta1 - prev.beta1),
            ]
        } else {
            [last.beta3, last.beta2, last.beta1]
        }
    } else {
        [last.beta3, last.beta2, last.beta1]
    };

    // stepping off a confluent endpoint needs a fresh march seed: the
    // confluent point itself is a singular Newton start
    let from_confluence = last.left_gap() < 1e-6 || last.right_gap() < 1e-6;
    let attempt = if from_confluence {
        solve_modulation(target, None)
    } else {
        newton3(target, init, quad).map(|(p, _)| p)
    };

    match attempt {
        Ok(p) if p.ordering_ok() => {
            trace.points.push(p);
            trace.step_sizes.push(target - last.s);
            trace.newton_iters.push(1);
            Ok(())
        }
        _ if depth < 14 => {
            let mid = 0.5 * (last.s + target);
            advance_to(trace, mid, quad, depth + 1)?;
            advance_to(trace, target, quad, depth + 1)
        }
        Ok(p) => Err(Error::SolverConvergence(format!(
            "ordering violated at s = {target}: {p:?}"
        ))),
        Err(e) => Err(e),
    }
}

/// Characteristic advection speeds of the scaled branch points
/// bt = (bt3, bt2, bt1) (ascending), with
///
///   a = -bt1 + (bt1 - bt3) E(sigma)/K(sigma),
///   sigma^2 = (bt2 - bt3)/(bt1 - bt3),
///   v_i = (1/3) prod_{k != i} (bt_i - bt_k) / (bt_i + a) + (1/6) sum bt.
///
/// Degenerate configurations (coinciding branch points or a vanishing
/// denominator) yield a degeneracy error for the caller to flag.
pub fn characteristic_speeds(bt: &[f64; 3]) -> Result<[f64; 3]> {
    let (b3, b2, b1) = (bt[0], bt[1], bt[2]);
    let spread = b1 - b3;
    let scale = b1.abs().max(b3.abs()).max(1e-30);
    if spread <= 1e-12 * scale || b2 - b3 <= 1e-12 * scale || b1 - b2 <= 1e-12 * scale {
        return Err(Error::Degenerate(format!(
            "coinciding branch points in speed evaluation: {bt:?}"
        )));
    }
    let sigma = ((b2 - b3) / spread).sqrt();
    let a = -b1 + spread * elliptic_e(sigma)? / elliptic_k(sigma)?;
    let sum = b3 + b2 + b1;
    let mut v = [0.0; 3];
    for (i, vi) in v.iter_mut().enumerate() {
        let bi = bt[i];
        let denom = bi + a;
        if denom.abs() <= 1e-12 * scale {
            return Err(Error::Degenerate(format!(
                "vanishing denominator bt_i + a at i = {i}: {bt:?}"
            )));
        }
        let prod: f64 = (0..3).filter(|&k| k != i).map(|k| bi - bt[k]).product();
        *vi = prod / (3.0 * denom) + sum / 6.0;
    }
    Ok(v)
}

/// Residual report of the hyperbolic modulation PDE system satisfied by
/// the scaled branch points bt_i(x, t) = t^{1/2} beta_i(x t^{-3/2}).
#[derive(Debug, Clone)]
pub struct WhithamReport {
    /// max over samples of max_i |residual_i| / max_i |d bt_i / dt|, at the
    /// base step.
    pub residual_coarse: f64,
    /// Same at half the step.
    pub residual_fine: f64,
    /// log2(residual_coarse / residual_fine).
    pub convergence_order: f64,
    pub samples_used: usize,
    pub flagged_singular: usize,
    /// Base step in s for the x-differences.
    pub step_s: f64,
    /// Base relative step in t.
    pub step_t: f64,
}

fn beta_near(s: f64, trace: &ContinuationTrace, quad: &QuadratureSpec) -> Result<[f64; 3]> {
    let nearest = trace
        .points
        .iter()
        .min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs()))
        .ok_or_else(|| Error::Domain("empty trace".to_string()))?;
    let (p, _) = newton3(s, [nearest.beta3, nearest.beta2, nearest.beta1], quad)?;
    Ok([p.beta3, p.beta2, p.beta1])
}

/// Evaluates the PDE residual d/dt bt_i + v_i d/dx bt_i by central
/// differences at sample points drawn from the trace interior, at a base
/// step and at half that step. Too-coarse differencing (residual growing
/// under refinement) is reported as a resolution error.
pub fn whitham_residual(trace: &ContinuationTrace, t_grid: &[f64]) -> Result<WhithamReport> {
    whitham_residual_with_steps(trace, t_grid, 8e-3, 8e-3)
}

/// As [`whitham_residual`] with explicit base steps: `hs` is the step in s
/// used for the x-differences, `ht` the relative step in t.
pub fn whitham_residual_with_steps(
    trace: &ContinuationTrace,
    t_grid: &[f64],
    hs: f64,
    ht: f64,
) -> Result<WhithamReport> {
    if trace.points.len() < 3 {
        return Err(Error::Domain(
            "whitham residual needs a trace with at least 3 points".to_string(),
        ));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("t grid must be positive".to_string()));
    }
    let quad = default_r3_quad();
    let s_min = trace.points.first().unwrap().s.min(trace.points.last().unwrap().s);
    let s_max = trace.points.first().unwrap().s.max(trace.points.last().unwrap().s);

    // keep every finite-difference evaluation inside the trace range:
    // the t-shift moves s by roughly 1.5 * ht * |s|
    let t_shift_margin = 2.0 * ht * s_min.abs().max(s_max.abs()).max(1.0);
    let margin = (2.0 * hs + t_shift_margin).max(0.02);
    let lo = s_min + margin;
    let hi = s_max - margin;
    if lo >= hi {
        return Err(Error::Resolution(
            "trace range too narrow for the requested differencing steps".to_string(),
        ));
    }

    let n_samples = 5usize;
    let mut flagged = 0usize;
    let mut used = 0usize;
    let mut res = [0.0f64; 2];

    for (level, scale) in [(0usize, 1.0f64), (1, 0.5)] {
        let hs_l = hs * scale;
        let ht_l = ht * scale;
        let mut worst = 0.0f64;
        for i in 0..n_samples {
            let s = lo + (hi - lo) * i as f64 / (n_samples - 1) as f64;
            for &t in t_grid {
                let x = s * t.powf(1.5);
                let bt = |xx: f64, tt: f64| -> Result<[f64; 3]> {
                    let sv = xx * tt.powf(-1.5);
                    let b = beta_near(sv, trace, &quad)?;
                    Ok([b[0] * tt.sqrt(), b[1] * tt.sqrt(), b[2] * tt.sqrt()])
                };
                let center = bt(x, t)?;
                let speeds = match characteristic_speeds(&center) {
                    Ok(v) => v,
                    Err(Error::Degenerate(_)) => {
                        flagged += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let dx = hs_l * t.powf(1.5);
                let dt = ht_l * t;
                let bxp = bt(x + dx, t)?;
                let bxm = bt(x - dx, t)?;
                let btp = bt(x, t + dt)?;
                let btm = bt(x, t - dt)?;
                let mut max_res = 0.0f64;
                let mut max_dt = 0.0f64;
                for k in 0..3 {
                    let ddt = (btp[k] - btm[k]) / (2.0 * dt);
                    let ddx = (bxp[k] - bxm[k]) / (2.0 * dx);
                    max_res = max_res.max((ddt + speeds[k] * ddx).abs());
                    max_dt = max_dt.max(ddt.abs());
                }
                if max_dt > 0.0 {
                    worst = worst.max(max_res / max_dt);
                    if level == 0 {
                        used += 1;
                    }
                }
            }
        }
        res[level] = worst;
    }

    let order = (res[0] / res[1]).log2();
    if res[0] > 1e-8 && order < 0.0 {
        return Err(Error::Resolution(format!(
            "residual grew under step halving ({:e} -> {:e}); differencing unreliable",
            res[0], res[1]
        )));
    }
    Ok(WhithamReport {
        residual_coarse: res[0],
        residual_fine: res[1],
        convergence_order: order,
        samples_used: used,
        flagged_singular: flagged,
        step_s: hs,
        step_t: ht,
    })
}
