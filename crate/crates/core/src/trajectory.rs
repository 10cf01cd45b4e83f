//! Deterministic scaling limit of the process.
//!
//! In scaled time t = i / n^{3/2}, the normalized counts concentrate around
//! closed-form curves built from E(t) = exp(-4t^2) and the function r(t)
//! solving 8t + 4r = 3 sqrt(2) artanh(2 sqrt(2) r), which is the scaled
//! count of triangle-free edges. The same curves solve an autonomous
//! differential system; both descriptions live here so they can be checked
//! against each other and against simulation.
//!
//! Deviation envelopes theta (and their n-scaled widths delta) bound how far
//! a run of size n may stray from the curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supremum of r(t): 1 / (2 sqrt(2)).
pub const R_LIMIT: f64 = 0.353_553_390_593_273_76;

/// Largest horizon accepted by the envelope inequality check.
pub const INEQUALITY_HORIZON: f64 = 6.0;

// ============================================================================
// r(t)
// ============================================================================

/// Scaled triangle-free edge count at time t: the unique root in
/// [0, R_LIMIT) of 8t + 4r - 3 sqrt(2) artanh(2 sqrt(2) r).
pub fn solve_r(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "solve_r needs t >= 0, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |r: f64| -> f64 {
        let arg = 2.0 * std::f64::consts::SQRT_2 * r;
        if arg >= 1.0 {
            return f64::NEG_INFINITY;
        }
        8.0 * t + 4.0 * r - 3.0 * std::f64::consts::SQRT_2 * arg.atanh()
    };
    let mut lo = 0.0_f64;
    let mut hi = R_LIMIT - 1e-16;
    if f(hi) >= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Defect of a candidate root in the equivalent arrangement
/// r = tanh((8t + 4r) / (3 sqrt(2))) / (2 sqrt(2)), which stays well
/// conditioned for large t.
pub fn solve_r_residual(t: f64, r: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    r - ((8.0 * t + 4.0 * r) / (3.0 * s)).tanh() / (2.0 * s)
}

/// Right-hand side of dr/dt = (1 - 8 r^2) / (1 + 4 r^2).
pub fn r_rate(r: f64) -> f64 {
    (1.0 - 8.0 * r * r) / (1.0 + 4.0 * r * r)
}

// ============================================================================
// Closed-form curves and the differential system
// ============================================================================

/// Scaled state of the limit at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub r: f64,
    pub q0: f64,
    pub q1: f64,
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub y00: f64,
    pub y01: f64,
    pub y10: f64,
    pub y11: f64,
}

impl TrajectoryPoint {
    pub fn q(&self) -> f64 {
        self.q0 + self.q1
    }

    pub fn y(&self) -> f64 {
        self.y00 + self.y01 + self.y10 + self.y11
    }
}

/// Time derivatives of a [`TrajectoryPoint`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivatives {
    pub dr: f64,
    pub dq0: f64,
    pub dq1: f64,
    pub dx0: f64,
    pub dx1: f64,
    pub dx2: f64,
    pub dy00: f64,
    pub dy01: f64,
    pub dy10: f64,
    pub dy11: f64,
}

/// Evaluates every curve at time t.
pub fn closed_form(t: f64) -> Result<TrajectoryPoint> {
    let r = solve_r(t)?;
    let e = (-4.0 * t * t).exp();
    let r2 = r * r;
    Ok(TrajectoryPoint {
        t,
        r,
        q0: 0.5 * e,
        q1: 2.0 * r2 * e,
        x0: e * e,
        x1: 8.0 * r2 * e * e,
        x2: 16.0 * r2 * r2 * e * e,
        y00: 4.0 * r * e,
        y01: 16.0 * r2 * r * e,
        y10: 4.0 * (t - r) * e,
        y11: 16.0 * r2 * (t - r) * e,
    })
}

/// The governing autonomous system, evaluated at one state.
pub fn ode_rhs(p: &TrajectoryPoint) -> Result<Derivatives> {
    let q = p.q();
    if !(q > 0.0) {
        return Err(Error::Singularity { t: p.t, q });
    }
    let y = p.y();
    Ok(Derivatives {
        dr: r_rate(p.r),
        dq0: -p.y00 - p.y10,
        dq1: -p.y01 - p.y11 + (p.q0 - 2.0 * p.q1) * p.y00 / q,
        dx0: -2.0 * p.x0 * y / q,
        dx1: (2.0 * p.x0 * p.y00 - 2.0 * p.x1 * (y + p.y00)) / q,
        dx2: (p.x1 * p.y00 - 2.0 * p.x2 * (y + 2.0 * p.y00)) / q,
        dy00: (2.0 * p.x0 - p.y00 * (p.y00 + y)) / q,
        dy01: (p.x1 + p.y00 * p.y00 - p.y01 * (y + 3.0 * p.y00)) / q,
        dy10: (p.x1 + p.y00 * p.y00 - p.y10 * y) / q,
        dy11: (2.0 * p.x2 + p.y01 * p.y00 + p.y10 * p.y00 - p.y11 * (y + 2.0 * p.y00)) / q,
    })
}

const DIM: usize = 10;

fn to_vec(p: &TrajectoryPoint) -> [f64; DIM] {
    [
        p.r, p.q0, p.q1, p.x0, p.x1, p.x2, p.y00, p.y01, p.y10, p.y11,
    ]
}

fn to_point(t: f64, v: &[f64; DIM]) -> TrajectoryPoint {
    TrajectoryPoint {
        t,
        r: v[0],
        q0: v[1],
        q1: v[2],
        x0: v[3],
        x1: v[4],
        x2: v[5],
        y00: v[6],
        y01: v[7],
        y10: v[8],
        y11: v[9],
    }
}

fn rhs_vec(t: f64, v: &[f64; DIM]) -> Result<[f64; DIM]> {
    let d = ode_rhs(&to_point(t, v))?;
    Ok([
        d.dr, d.dq0, d.dq1, d.dx0, d.dx1, d.dx2, d.dy00, d.dy01, d.dy10, d.dy11,
    ])
}

/// Integrates the system from the exact initial state with classic
/// fourth-order Runge-Kutta, returning every grid point including t = 0.
/// The last step is shortened so the final point lands exactly on t_max.
pub fn integrate_ode(t_max: f64, dt: f64) -> Result<Vec<TrajectoryPoint>> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "integrate_ode needs t_max > 0, got {t_max}"
        )));
    }
    if !(dt > 0.0 && dt <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "integrate_ode needs 0 < dt <= 0.01, got {dt}"
        )));
    }
    let full_steps = (t_max / dt + 1e-9).floor() as u64;
    if full_steps > 50_000_000 {
        return Err(Error::InvalidParameter(format!(
            "integration would take {full_steps} steps; shrink the range or raise dt"
        )));
    }
    let mut v = to_vec(&TrajectoryPoint {
        t: 0.0,
        r: 0.0,
        q0: 0.5,
        q1: 0.0,
        x0: 1.0,
        x1: 0.0,
        x2: 0.0,
        y00: 0.0,
        y01: 0.0,
        y10: 0.0,
        y11: 0.0,
    });
    let mut out = Vec::with_capacity(full_steps as usize + 2);
    out.push(to_point(0.0, &v));
    for i in 0..full_steps {
        let t = i as f64 * dt;
        v = rk4_step(t, &v, dt)?;
        out.push(to_point((i + 1) as f64 * dt, &v));
    }
    let t_last = full_steps as f64 * dt;
    let rem = t_max - t_last;
    if rem > 1e-12 * t_max.max(1.0) {
        v = rk4_step(t_last, &v, rem)?;
        out.push(to_point(t_max, &v));
    } else if let Some(last) = out.last_mut() {
        last.t = t_max;
    }
    Ok(out)
}

fn rk4_step(t: f64, v: &[f64; DIM], h: f64) -> Result<[f64; DIM]> {
    let k1 = rhs_vec(t, v)?;
    let k2 = rhs_vec(t + 0.5 * h, &axpy(v, &k1, 0.5 * h))?;
    let k3 = rhs_vec(t + 0.5 * h, &axpy(v, &k2, 0.5 * h))?;
    let k4 = rhs_vec(t + h, &axpy(v, &k3, h))?;
    let mut out = *v;
    for i in 0..DIM {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

fn axpy(v: &[f64; DIM], k: &[f64; DIM], h: f64) -> [f64; DIM] {
    let mut out = *v;
    for i in 0..DIM {
        out[i] += h * k[i];
    }
    out
}

// ============================================================================
// Envelopes
// ============================================================================

/// Parameters of the deviation envelopes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub k: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub n: u32,
}

pub const DEFAULT_K: f64 = 10.0;
pub const DEFAULT_EPSILON: f64 = 1.0 / 41.0;

impl EnvelopeConfig {
    pub fn new(k: f64, epsilon: f64, mu: f64, n: u32) -> Result<EnvelopeConfig> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter(format!("need K > 0, got {k}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0 / 40.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < epsilon < 1/40, got {epsilon}"
            )));
        }
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!("need mu > 0, got {mu}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 vertices, got {n}"
            )));
        }
        let cfg = EnvelopeConfig { k, epsilon, mu, n };
        let horizon = mu * (n as f64).ln().sqrt();
        if !(cfg.theta_y(horizon) < (n as f64).powf(epsilon)) {
            return Err(Error::InvalidParameter(format!(
                "mu = {mu} is too large: theta_y(mu sqrt(ln n)) reaches n^epsilon"
            )));
        }
        Ok(cfg)
    }

    /// K = 10, epsilon = 1/41, mu = epsilon / (2K).
    pub fn defaults(n: u32) -> Result<EnvelopeConfig> {
        EnvelopeConfig::new(
            DEFAULT_K,
            DEFAULT_EPSILON,
            DEFAULT_EPSILON / (2.0 * DEFAULT_K),
            n,
        )
    }

    fn theta_y(&self, t: f64) -> f64 {
        (self.k * (t * t + t)).exp()
    }
}

/// Envelope values at one time: the raw thetas and their n-scaled widths
/// delta = theta * n^(-1/6).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelopes {
    pub theta_q: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_r: f64,
    pub delta_q: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta_r: f64,
}

/// Evaluates every envelope at time t. theta_q accumulates
/// 1 + integral of K theta_y, computed by adaptive quadrature to a relative
/// tolerance of 1e-9.
pub fn envelopes(t: f64, cfg: &EnvelopeConfig) -> Envelopes {
    assert!(t >= 0.0, "envelopes need t >= 0, got {t}");
    let ty = cfg.theta_y(t);
    let tq = if ty.is_finite() {
        1.0 + integrate_theta_q(t, cfg.k)
    } else {
        f64::INFINITY
    };
    let e = (-4.0 * t * t).exp();
    let scale = (cfg.n as f64).powf(-1.0 / 6.0);
    Envelopes {
        theta_q: tq,
        theta_x: e * ty,
        theta_y: ty,
        theta_r: ty / e,
        delta_q: tq * scale,
        delta_x: e * ty * scale,
        delta_y: ty * scale,
        delta_r: ty / e * scale,
    }
}

const QUAD_REL_TOL: f64 = 1e-9;

fn integrate_theta_q(t: f64, k: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let f = |tau: f64| k * (k * (tau * tau + tau)).exp();
    adaptive_simpson(&f, 0.0, t, QUAD_REL_TOL)
}

/// Adaptive Simpson quadrature with a relative tolerance, sized against the
/// running whole-interval estimate.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let budget = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    simpson_recurse(f, a, b, fa, fm, fb, whole, budget, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    budget: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * budget || !err.is_finite() {
        return left + right + err / 15.0;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * budget, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * budget, depth - 1)
}

// ============================================================================
// Internal consistency of curves and envelopes
// ============================================================================

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub pass: bool,
    pub points_checked: usize,
    pub first_violation: Option<Violation>,
}

/// Verifies, on a 2001-point grid over [0, t_max], the ordering and identity
/// relations the curves and envelopes are supposed to satisfy.
pub fn check_envelope_inequalities(t_max: f64, cfg: &EnvelopeConfig) -> Result<InequalityReport> {
    if !(t_max > 0.0 && t_max <= INEQUALITY_HORIZON) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < t_max <= {INEQUALITY_HORIZON}, got {t_max}"
        )));
    }
    const POINTS: usize = 2001;
    let slack = 1e-12;
    let mut checked = 0;
    for j in 0..POINTS {
        let t = t_max * j as f64 / (POINTS - 1) as f64;
        let p = closed_form(t)?;
        let env = envelopes(t, cfg);
        let y = p.y();
        let le = |lhs: f64, rhs: f64| lhs <= rhs + slack * rhs.abs().max(1.0);
        let close = |lhs: f64, rhs: f64, tol: f64| {
            (lhs - rhs).abs() <= tol * lhs.abs().max(rhs.abs()).max(1.0)
        };
        let checks: [(&str, f64, f64, bool); 9] = [
            ("q1 <= q0", p.q1, p.q0, le(p.q1, p.q0)),
            ("x1 <= x0", p.x1, p.x0, le(p.x1, p.x0)),
            ("x2 <= x0", p.x2, p.x0, le(p.x2, p.x0)),
            (
                "x0 == 4 q0^2",
                p.x0,
                4.0 * p.q0 * p.q0,
                close(p.x0, 4.0 * p.q0 * p.q0, 1e-12),
            ),
            (
                "y00 <= 2 sqrt(2) q0",
                p.y00,
                2.0 * std::f64::consts::SQRT_2 * p.q0,
                le(p.y00, 2.0 * std::f64::consts::SQRT_2 * p.q0),
            ),
            ("y <= 12 t q0", y, 12.0 * t * p.q0, le(y, 12.0 * t * p.q0)),
            ("y <= 3/2", y, 1.5, le(y, 1.5)),
            (
                "t delta_q <= delta_y",
                t * env.delta_q,
                env.delta_y,
                le(t * env.delta_q, env.delta_y),
            ),
            (
                "delta_x == 2 q0 delta_y",
                env.delta_x,
                2.0 * p.q0 * env.delta_y,
                close(env.delta_x, 2.0 * p.q0 * env.delta_y, 1e-9),
            ),
        ];
        for (name, lhs, rhs, ok) in checks {
            if !ok {
                return Ok(InequalityReport {
                    pass: false,
                    points_checked: checked,
                    first_violation: Some(Violation {
                        t,
                        inequality: name.to_string(),
                        lhs,
                        rhs,
                    }),
                });
            }
        }
        checked += 1;
    }
    Ok(InequalityReport {
        pass: true,
        points_checked: checked,
        first_violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    // ---- r(t) ----

    #[test]
    fn r_starts_at_zero_and_saturates() {
        assert_eq!(solve_r(0.0).unwrap(), 0.0);
        let r20 = solve_r(20.0).unwrap();
        assert!((r20 - 0.35355339).abs() < 1e-6);
        assert!(r20 < R_LIMIT);
    }

    #[test]
    fn r_known_values() {
        assert!((solve_r(0.25).unwrap() - 0.2055).abs() < 5e-4);
        assert!((solve_r(1.0).unwrap() - 0.3453).abs() < 5e-4);
    }

    #[test]
    fn r_is_increasing() {
        let mut prev = -1.0;
        for j in 0..200 {
            let r = solve_r(j as f64 * 0.02).unwrap();
            assert!(r > prev || (j > 0 && r >= prev));
            prev = r;
        }
    }

    #[test]
    fn r_residual_is_tiny_across_the_range() {
        for j in 0..=400 {
            let t = j as f64 * 0.05;
            let r = solve_r(t).unwrap();
            assert!(
                solve_r_residual(t, r).abs() < 1e-12,
                "t = {t}, residual = {}",
                solve_r_residual(t, r)
            );
        }
    }

    #[test]
    fn r_rejects_negative_time() {
        assert!(solve_r(-0.5).is_err());
    }

    // ---- closed form ----

    #[test]
    fn initial_point_is_exact() {
        let p = closed_form(0.0).unwrap();
        assert_eq!(p.r, 0.0);
        assert_eq!(p.q0, 0.5);
        assert_eq!(p.q1, 0.0);
        assert_eq!(p.x0, 1.0);
        assert_eq!(
            (p.x1, p.x2, p.y00, p.y01, p.y10, p.y11),
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn x0_matches_its_exponential_form() {
        for t in [0.25, 1.0, 2.0] {
            let p = closed_form(t).unwrap();
            assert!(rel(p.x0, (-8.0 * t * t).exp()) < 1e-12);
        }
    }

    #[test]
    fn y_equals_8tq_identity() {
        for j in 0..=1000 {
            let t = 3.0 * j as f64 / 1000.0;
            let p = closed_form(t).unwrap();
            let lhs = p.y();
            let rhs = 8.0 * t * p.q();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                "t = {t}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn cell_identities_hold() {
        for t in [0.1, 0.4, 0.9, 1.7, 2.6] {
            let p = closed_form(t).unwrap();
            assert!(rel(p.x0, 4.0 * p.q0 * p.q0) < 1e-12);
            assert!(rel(p.x1, 8.0 * p.q0 * p.q1) < 1e-12);
            assert!(rel(p.x2, 4.0 * p.q1 * p.q1) < 1e-12);
            assert!(rel(p.y00, 8.0 * p.r * p.q0) < 1e-12);
            assert!(rel(p.y01, 8.0 * p.r * p.q1) < 1e-12);
            assert!(rel(p.y10, 8.0 * (t - p.r) * p.q0) < 1e-12);
            assert!(rel(p.y11, 8.0 * (t - p.r) * p.q1) < 1e-12);
        }
    }

    // ---- differential system ----

    #[test]
    fn rhs_at_zero() {
        let p = closed_form(0.0).unwrap();
        let d = ode_rhs(&p).unwrap();
        assert_eq!(d.dq0, 0.0);
        assert_eq!(d.dq1, 0.0);
        assert_eq!(d.dx0, 0.0);
        assert!((d.dy00 - 4.0).abs() < 1e-15);
        assert_eq!(d.dr, 1.0);
    }

    #[test]
    fn rhs_matches_finite_differences_of_the_closed_form() {
        let h = 1e-5;
        for j in 1..=50 {
            let t = j as f64 * 0.03;
            let p = closed_form(t).unwrap();
            let d = ode_rhs(&p).unwrap();
            let plus = closed_form(t + h).unwrap();
            let minus = closed_form(t - h).unwrap();
            let fd = |a: f64, b: f64| (a - b) / (2.0 * h);
            for (num, exact) in [
                (fd(plus.q0, minus.q0), d.dq0),
                (fd(plus.q1, minus.q1), d.dq1),
                (fd(plus.x0, minus.x0), d.dx0),
                (fd(plus.x1, minus.x1), d.dx1),
                (fd(plus.x2, minus.x2), d.dx2),
                (fd(plus.y00, minus.y00), d.dy00),
                (fd(plus.y01, minus.y01), d.dy01),
                (fd(plus.y10, minus.y10), d.dy10),
                (fd(plus.y11, minus.y11), d.dy11),
                (fd(plus.r, minus.r), d.dr),
            ] {
                assert!(
                    (num - exact).abs() < 1e-6,
                    "t = {t}: fd {num} vs rhs {exact}"
                );
            }
        }
    }

    #[test]
    fn singular_state_is_reported() {
        let mut p = closed_form(1.0).unwrap();
        p.q0 = 0.0;
        p.q1 = 0.0;
        assert!(matches!(ode_rhs(&p), Err(Error::Singularity { .. })));
    }

    // ---- integration ----

    #[test]
    fn integration_tracks_the_closed_form() {
        let points = integrate_ode(0.5, 1e-3).unwrap();
        assert_eq!(points.len(), 501);
        for p in &points {
            let exact = closed_form(p.t).unwrap();
            for (a, b) in [
                (p.q0, exact.q0),
                (p.q1, exact.q1),
                (p.x0, exact.x0),
                (p.y00, exact.y00),
                (p.y11, exact.y11),
                (p.r, exact.r),
            ] {
                assert!((a - b).abs() < 1e-8, "t = {}: {a} vs {b}", p.t);
            }
        }
    }

    #[test]
    fn integration_lands_exactly_on_fractional_horizons() {
        let points = integrate_ode(0.1234, 1e-3).unwrap();
        assert_eq!(points.last().unwrap().t, 0.1234);
        assert_eq!(points.len(), 125);
    }

    #[test]
    fn integration_validates_parameters() {
        assert!(integrate_ode(0.0, 1e-3).is_err());
        assert!(integrate_ode(-1.0, 1e-3).is_err());
        assert!(integrate_ode(1.0, 0.02).is_err());
        assert!(integrate_ode(1.0, 0.0).is_err());
    }

    // ---- envelopes ----

    #[test]
    fn envelopes_at_zero_reduce_to_the_n_scale() {
        let cfg = EnvelopeConfig::defaults(2000).unwrap();
        let env = envelopes(0.0, &cfg);
        assert_eq!(env.theta_y, 1.0);
        assert_eq!(env.theta_q, 1.0);
        assert_eq!(env.theta_x, 1.0);
        assert_eq!(env.theta_r, 1.0);
        let scale = 2000f64.powf(-1.0 / 6.0);
        assert!(rel(env.delta_q, scale) < 1e-15);
    }

    #[test]
    fn theta_q_matches_a_dense_fixed_grid_quadrature() {
        let cfg = EnvelopeConfig::defaults(2000).unwrap();
        for t in [0.3, 0.8, 1.5, 2.0] {
            // Composite Simpson on 200k panels as an independent reference.
            let k = cfg.k;
            let f = |tau: f64| k * (k * (tau * tau + tau)).exp();
            let panels = 200_000;
            let h = t / panels as f64;
            let mut acc = f(0.0) + f(t);
            for j in 1..panels {
                let w = if j % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(j as f64 * h);
            }
            let reference = 1.0 + acc * h / 3.0;
            let env = envelopes(t, &cfg);
            assert!(
                rel(env.theta_q, reference) < 1e-7,
                "t = {t}: {} vs {reference}",
                env.theta_q
            );
        }
    }

    #[test]
    fn theta_product_identity() {
        let cfg = EnvelopeConfig::defaults(500).unwrap();
        for t in [0.2, 0.7, 1.3, 2.0, 3.0] {
            let env = envelopes(t, &cfg);
            assert!(rel(env.theta_x * env.theta_r, env.theta_y * env.theta_y) < 1e-12);
        }
    }

    #[test]
    fn envelopes_grow_with_time() {
        let cfg = EnvelopeConfig::defaults(1000).unwrap();
        let mut prev = envelopes(0.0, &cfg);
        for j in 1..=60 {
            let env = envelopes(j as f64 * 0.05, &cfg);
            assert!(env.theta_y > prev.theta_y);
            assert!(env.theta_q > prev.theta_q);
            assert!(env.theta_x > prev.theta_x);
            prev = env;
        }
    }

    #[test]
    fn config_validation() {
        assert!(EnvelopeConfig::new(0.0, 0.02, 0.001, 100).is_err());
        assert!(EnvelopeConfig::new(10.0, 0.03, 0.001, 100).is_err());
        assert!(EnvelopeConfig::new(10.0, 0.02, 0.0, 100).is_err());
        assert!(EnvelopeConfig::new(10.0, 0.02, 5.0, 100).is_err());
        assert!(EnvelopeConfig::defaults(1).is_err());
        assert!(EnvelopeConfig::defaults(2).is_ok());
        assert!(EnvelopeConfig::defaults(100_000).is_ok());
    }

    #[test]
    fn inequality_check_passes_with_defaults() {
        let cfg = EnvelopeConfig::defaults(2000).unwrap();
        let report = check_envelope_inequalities(2.0, &cfg).unwrap();
        assert!(report.pass, "violation: {:?}", report.first_violation);
        assert_eq!(report.points_checked, 2001);
        let wide = check_envelope_inequalities(INEQUALITY_HORIZON, &cfg).unwrap();
        assert!(wide.pass, "violation: {:?}", wide.first_violation);
    }

    #[test]
    fn inequality_check_validates_horizon() {
        let cfg = EnvelopeConfig::defaults(2000).unwrap();
        assert!(check_envelope_inequalities(0.0, &cfg).is_err());
        assert!(check_envelope_inequalities(7.0, &cfg).is_err());
    }
}
