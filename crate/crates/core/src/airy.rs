//! Airy functions Ai, Bi and their derivatives for real arguments, plus zeros of Ai.
//!
//! Evaluation regions:
//! - |x| <= 3: Maclaurin series.
//! - 3 < |x| < 8: Taylor-series continuation of y'' = x y. For x > 0, Ai is continued
//!   backward from x = 8 so the recessive solution is never integrated in its unstable
//!   direction; Bi is continued forward from x = 3.
//! - x <= -8: modulus/phase asymptotics, Ai = M cos(theta), Bi = M sin(theta).
//! - x >= 8: exponential asymptotics.
//!
//! Relative accuracy is about 1e-12 measured against the local envelope.

use std::f64::consts::PI;
use std::sync::OnceLock;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;
const SQRT3: f64 = 1.732_050_807_568_877_2;

const SERIES_LIMIT: f64 = 3.0;
const ASYMPTOTIC_LIMIT: f64 = 8.0;
const STEP: f64 = 0.25;

/// Values of Ai, Ai', Bi, Bi' at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Airy {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

pub fn airy(x: f64) -> Airy {
    if x.is_nan() {
        return Airy { ai: f64::NAN, aip: f64::NAN, bi: f64::NAN, bip: f64::NAN };
    }
    if x >= ASYMPTOTIC_LIMIT {
        let (s, zeta) = positive_asymptotic(x);
        let (up, down) = (zeta.exp(), (-zeta).exp());
        return Airy { ai: s.ai * down, aip: s.aip * down, bi: s.bi * up, bip: s.bip * up };
    }
    if x <= -ASYMPTOTIC_LIMIT {
        return negative_asymptotic(-x);
    }
    if x.abs() <= SERIES_LIMIT {
        return maclaurin(x);
    }
    if x < 0.0 {
        let s = maclaurin(-SERIES_LIMIT);
        let (ai, aip) = continue_solution(-SERIES_LIMIT, s.ai, s.aip, x);
        let (bi, bip) = continue_solution(-SERIES_LIMIT, s.bi, s.bip, x);
        Airy { ai, aip, bi, bip }
    } else {
        let s = maclaurin(SERIES_LIMIT);
        let (bi, bip) = continue_solution(SERIES_LIMIT, s.bi, s.bip, x);
        let (far, zeta) = positive_asymptotic(ASYMPTOTIC_LIMIT);
        let down = (-zeta).exp();
        let (ai, aip) = continue_solution(ASYMPTOTIC_LIMIT, far.ai * down, far.aip * down, x);
        Airy { ai, aip, bi, bip }
    }
}

pub fn ai(x: f64) -> f64 {
    airy(x).ai
}

pub fn bi(x: f64) -> f64 {
    airy(x).bi
}

/// Exponent zeta = (2/3) x^(3/2) for x > 0, zero otherwise.
pub fn zeta(x: f64) -> f64 {
    if x > 0.0 {
        2.0 / 3.0 * x * x.sqrt()
    } else {
        0.0
    }
}

/// Scaled values: Ai, Ai' multiplied by exp(zeta) and Bi, Bi' by exp(-zeta).
/// Identical to [`airy`] for x <= 0. Never overflows.
pub fn airy_scaled(x: f64) -> Airy {
    if x >= ASYMPTOTIC_LIMIT {
        return positive_asymptotic(x).0;
    }
    let a = airy(x);
    let z = zeta(x);
    if z == 0.0 {
        return a;
    }
    let (up, down) = (z.exp(), (-z).exp());
    Airy { ai: a.ai * up, aip: a.aip * up, bi: a.bi * down, bip: a.bip * down }
}

fn maclaurin(x: f64) -> Airy {
    let x3 = x * x * x;
    // f = sum t_k, g = sum u_k, with f' = sum p_k and g' = sum q_k
    let (mut t, mut u, mut p, mut q) = (1.0, x, x * x / 2.0, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (t, u, p, q);
    for k in 1..200 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        u *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        q *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += t;
        g += u;
        gp += q;
        if k >= 2 {
            p *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf - 3.0));
            fp += p;
        }
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs() + 1.0;
        if (t.abs() + u.abs() + p.abs() + q.abs()) < 1e-18 * scale {
            break;
        }
    }
    let c1 = AI0;
    let c2 = -AIP0;
    Airy {
        ai: c1 * f - c2 * g,
        aip: c1 * fp - c2 * gp,
        bi: SQRT3 * (c1 * f + c2 * g),
        bip: SQRT3 * (c1 * fp + c2 * gp),
    }
}

/// Continues a solution of y'' = x y from (x0, y, y') to x1 by local Taylor series.
fn continue_solution(x0: f64, y0: f64, yp0: f64, x1: f64) -> (f64, f64) {
    let n_steps = ((x1 - x0).abs() / STEP).ceil().max(1.0) as usize;
    let h = (x1 - x0) / n_steps as f64;
    let (mut x, mut y, mut yp) = (x0, y0, yp0);
    for _ in 0..n_steps {
        // a_{n+2} = (x a_n + a_{n-1}) / ((n+2)(n+1))
        let mut a = [y, yp, x * y / 2.0];
        let mut sum = y + yp * h + a[2] * h * h;
        let mut dsum = yp + 2.0 * a[2] * h;
        let mut hp = h * h;
        for n in 1..80 {
            let next = (x * a[1] + a[0]) / ((n as f64 + 2.0) * (n as f64 + 1.0));
            a = [a[1], a[2], next];
            let deriv_term = (n as f64 + 2.0) * next * hp;
            hp *= h;
            let term = next * hp;
            sum += term;
            dsum += deriv_term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) && deriv_term.abs() < 1e-18 * dsum.abs().max(1e-300) {
                break;
            }
        }
        x += h;
        y = sum;
        yp = dsum;
    }
    (y, yp)
}

/// Coefficients u_k of the exponential expansions and m_k of the modulus expansion.
struct Coefficients {
    u: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
    phase: Vec<f64>,
}

fn coefficients() -> &'static Coefficients {
    static C: OnceLock<Coefficients> = OnceLock::new();
    C.get_or_init(|| {
        let n = 30;
        let mut u = vec![1.0];
        let mut v = vec![1.0];
        for k in 1..n {
            let kf = k as f64;
            let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            u.push(uk);
            v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
        }
        // M^2(-t) = S(t) / (pi sqrt t), S = sum m_k t^{-3k}, m_k = (-1)^k (6k-1)!! / (k! 96^k)
        let nm = 9;
        let mut m = vec![1.0];
        for k in 1..nm {
            let kf = k as f64;
            let mk = -m[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (96.0 * kf);
            m.push(mk);
        }
        // theta(-t) = pi/4 - (2/3) t^{3/2} sum c_k t^{-3k}; the Wronskian gives
        // 1 + sum c_k (1 - 2k) s^k = 1 / S(s).
        let mut inv = vec![1.0; nm];
        for k in 1..nm {
            inv[k] = -(1..=k).map(|j| m[j] * inv[k - j]).sum::<f64>();
        }
        let phase = (0..nm).map(|k| if k == 0 { 1.0 } else { inv[k] / (1.0 - 2.0 * k as f64) }).collect();
        Coefficients { u, v, m, phase }
    })
}

/// Scaled asymptotic values for x >= 8 and zeta(x).
fn positive_asymptotic(x: f64) -> (Airy, f64) {
    let c = coefficients();
    let z = zeta(x);
    let (mut s_ai, mut s_aip, mut s_bi, mut s_bip) = (0.0, 0.0, 0.0, 0.0);
    let mut zp = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..c.u.len() {
        let tu = c.u[k] * zp;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        let tv = c.v[k] * zp;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s_ai += sign * tu;
        s_aip += sign * tv;
        s_bi += tu;
        s_bip += tv;
        if tu.abs() < 1e-17 {
            break;
        }
        zp /= z;
    }
    let q = x.powf(0.25);
    let rsp = 1.0 / PI.sqrt();
    let a = Airy {
        ai: 0.5 * rsp / q * s_ai,
        aip: -0.5 * rsp * q * s_aip,
        bi: rsp / q * s_bi,
        bip: rsp * q * s_bip,
    };
    (a, z)
}

/// Modulus M(-t) and phase theta(-t) for t >= 8, with Ai(-t) = M cos theta, Bi(-t) = M sin theta.
pub(crate) fn modulus_phase(t: f64) -> (f64, f64) {
    let c = coefficients();
    let s = t.powi(-3);
    let mut sum_m = 0.0;
    let mut sum_p = 0.0;
    let mut sp = 1.0;
    for k in 0..c.m.len() {
        sum_m += c.m[k] * sp;
        sum_p += c.phase[k] * sp;
        sp *= s;
    }
    let m = (sum_m / (PI * t.sqrt())).sqrt();
    (m, PI / 4.0 - 2.0 / 3.0 * t * t.sqrt() * sum_p)
}

/// Phase difference theta(-t1) - theta(-t2) without cancellation between large phases.
pub(crate) fn phase_difference(t1: f64, t2: f64) -> f64 {
    let c = coefficients();
    // (2/3) [t2^{3/2} P(t2) - t1^{3/2} P(t1)], P = sum c_k t^{-3k}; leading term done exactly.
    let (r1, r2) = (t1.sqrt(), t2.sqrt());
    let lead = (t2 - t1) * (t2 + r1 * r2 + t1) / (r1 + r2);
    let mut rest = 0.0;
    for k in 1..c.phase.len() {
        let e = 1.5 - 3.0 * k as f64;
        rest += c.phase[k] * (t2.powf(e) - t1.powf(e));
    }
    2.0 / 3.0 * (lead + rest)
}

fn negative_asymptotic(t: f64) -> Airy {
    let c = coefficients();
    let s = t.powi(-3);
    let (mut big_s, mut ds) = (0.0, 0.0);
    let mut sp = 1.0;
    for (k, mk) in c.m.iter().enumerate() {
        big_s += mk * sp;
        ds += -3.0 * k as f64 * mk * sp / t;
        sp *= s;
    }
    let (m, theta) = modulus_phase(t);
    let rt = t.sqrt();
    let dm2 = (ds / rt - 0.5 * big_s / (t * rt)) / PI;
    let dm = dm2 / (2.0 * m);
    let dtheta = -1.0 / (PI * m * m);
    let (sn, cs) = theta.sin_cos();
    // d/dx = -d/dt
    Airy {
        ai: m * cs,
        aip: -(dm * cs - m * dtheta * sn),
        bi: m * sn,
        bip: -(dm * sn + m * dtheta * cs),
    }
}

/// n-th zero (n >= 1) of Ai(-lambda), returned as the positive lambda_n.
pub fn ai_zero(n: usize) -> f64 {
    assert!(n >= 1, "zeros are numbered from 1");
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let t2 = t.powi(-2);
    let mut lam = t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 * t2 - 5.0 / 36.0 * t2 * t2);
    let guess = lam;
    for _ in 0..50 {
        let a = airy(-lam);
        let step = a.ai / a.aip;
        lam += step;
        if step.abs() < 1e-15 * lam {
            break;
        }
    }
    debug_assert!((lam - guess).abs() < 0.2, "Newton drifted from zero {n}");
    lam
}

/// First n zeros lambda_1 < ... < lambda_n of Ai(-lambda).
pub fn ai_zeros(n: usize) -> Vec<f64> {
    (1..=n).map(ai_zero).collect()
}
