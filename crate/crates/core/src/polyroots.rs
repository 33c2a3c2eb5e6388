//! Closed-form roots of depressed cubics (Cardano) and monic quartics
//! (Ferrari via the resolvent cubic).
//!
//! Quartics use the alternating-sign convention
//! `g(f) = f⁴ − Θ₁f³ + Θ₂f² − Θ₃f + Θ₄`, so that `Θₖ` is the k-th elementary
//! symmetric function of the roots.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{DsgeError, Result, C64};

/// Below this relative size the cubic discriminant is treated as zero and the
/// trigonometric form is used.
const DISCRIMINANT_EPS: f64 = 1e-14;

/// Newton refinement passes applied to closed-form roots.
const POLISH_STEPS: usize = 6;

/// Monic quartic `f⁴ − Θ₁f³ + Θ₂f² − Θ₃f + Θ₄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticPoly {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
}

impl QuarticPoly {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, theta4: f64) -> Result<Self> {
        let q = Self {
            theta1,
            theta2,
            theta3,
            theta4,
        };
        if q.coefficients().iter().all(|c| c.is_finite()) {
            Ok(q)
        } else {
            Err(DsgeError::InvalidParams(format!(
                "non-finite quartic coefficient in {q:?}"
            )))
        }
    }

    /// Normalizes `a4 f⁴ + a3 f³ + a2 f² + a1 f + a0`. A leading coefficient
    /// below `tol` (relative to the largest coefficient) is a degree collapse.
    pub fn from_coefficients(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64, tol: f64) -> Result<Self> {
        let scale = [a4, a3, a2, a1, a0]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        if a4.abs() <= tol * scale.max(f64::MIN_POSITIVE) {
            return Err(DsgeError::DegreeCollapse(a4));
        }
        Self::new(-a3 / a4, a2 / a4, -a1 / a4, a0 / a4)
    }

    /// The quartic with the given roots (imaginary parts of the symmetric
    /// functions are discarded, so pass conjugate-closed sets).
    pub fn from_roots(roots: [C64; 4]) -> Result<Self> {
        let e = elementary_symmetric(&roots);
        Self::new(e[0].re, e[1].re, e[2].re, e[3].re)
    }

    /// Ascending coefficients `[c0, c1, c2, c3, c4]` of `g`.
    pub fn coefficients(&self) -> [f64; 5] {
        [self.theta4, -self.theta3, self.theta2, -self.theta1, 1.0]
    }

    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.coefficients(), z)
    }

    pub fn eval_derivative(&self, z: C64) -> C64 {
        let c = self.coefficients();
        horner(&[c[1], 2.0 * c[2], 3.0 * c[3], 4.0 * c[4]], z)
    }

    /// `|g(z)| / Σ|cₖ||z|ᵏ`, the backward-error residual of a root.
    pub fn relative_residual(&self, z: C64) -> f64 {
        let c = self.coefficients();
        let m = z.norm();
        let scale: f64 = c.iter().rev().fold(0.0, |acc, ck| acc * m + ck.abs());
        self.eval(z).norm() / scale.max(f64::MIN_POSITIVE)
    }
}

/// `h(x) = x³ + c2·x² + c1·x + c0`, whose roots are the pairwise products
/// `α₁α₂+α₃α₄`, `α₁α₃+α₂α₄`, `α₁α₄+α₂α₃` of a quartic's roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventCubic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl ResolventCubic {
    pub fn eval(&self, x: C64) -> C64 {
        horner(&[self.c0, self.c1, self.c2, 1.0], x)
    }

    fn eval_derivative(&self, x: C64) -> C64 {
        horner(&[self.c1, 2.0 * self.c2, 3.0], x)
    }

    /// Returns `(p, q, shift)` with `h(y + shift) = y³ + p·y − q`.
    pub fn depressed(&self) -> (f64, f64, f64) {
        let shift = -self.c2 / 3.0;
        let p = self.c1 - self.c2 * self.c2 / 3.0;
        let q = -(2.0 * self.c2.powi(3) / 27.0 - self.c2 * self.c1 / 3.0 + self.c0);
        (p, q, shift)
    }
}

/// Resolvent data carried alongside quartic roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventData {
    /// Linear coefficient of the depressed resolvent `x³ + Φ₂x − Φ₃`.
    pub phi2: f64,
    /// Negated constant of the depressed resolvent.
    pub phi3: f64,
    /// `Φ₃²/4 + Φ₂³/27`.
    pub delta: f64,
    pub betas: [C64; 3],
    pub gammas: [C64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticRoots {
    pub alphas: [C64; 4],
    pub resolvent: ResolventData,
}

impl QuarticRoots {
    /// Real parts of roots whose imaginary part is below `tol·max(1, |α|)`.
    pub fn real_roots(&self, tol: f64) -> Vec<f64> {
        self.alphas
            .iter()
            .filter(|a| a.im.abs() <= tol * a.norm().max(1.0))
            .map(|a| a.re)
            .collect()
    }
}

/// Cardano discriminant `q²/4 + p³/27` of `x³ + p·x − q`.
pub fn discriminant(p: f64, q: f64) -> f64 {
    q * q / 4.0 + p * p * p / 27.0
}

/// Resolvent cubic of a monic quartic.
pub fn resolvent_cubic(q: &QuarticPoly) -> ResolventCubic {
    let QuarticPoly {
        theta1: t1,
        theta2: t2,
        theta3: t3,
        theta4: t4,
    } = *q;
    ResolventCubic {
        c2: -t2,
        c1: t1 * t3 - 4.0 * t4,
        c0: -(t4 * (t1 * t1 - 4.0 * t2) + t3 * t3),
    }
}

/// Roots of `x³ + p·x − q = 0`.
///
/// For a positive discriminant the real radicals are paired so that their
/// product is `−p/3`; otherwise the trigonometric form yields three real
/// roots with zero imaginary parts.
pub fn solve_depressed_cubic(p: f64, q: f64) -> [C64; 3] {
    let delta = discriminant(p, q);
    let scale = (q * q / 4.0).max((p.abs() / 3.0).powi(3));
    let mut roots = if scale == 0.0 {
        [C64::new(0.0, 0.0); 3]
    } else if delta > DISCRIMINANT_EPS * scale || p >= 0.0 {
        // One real root. Take the radicand of larger magnitude to avoid
        // cancellation, then pair the second radical through uv = −p/3.
        let sd = delta.max(0.0).sqrt();
        let w = q / 2.0 + if q >= 0.0 { sd } else { -sd };
        let u = w.cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let re = -(u + v) / 2.0;
        let im = 3.0_f64.sqrt() / 2.0 * (u - v);
        [C64::new(u + v, 0.0), C64::new(re, im), C64::new(re, -im)]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (q / 2.0) / (-p / 3.0).powf(1.5);
        let t = arg.clamp(-1.0, 1.0).acos() / 3.0;
        [0.0, 1.0, 2.0].map(|k| C64::new(m * (t - 2.0 * PI * k / 3.0).cos(), 0.0))
    };
    let h = ResolventCubic { c2: 0.0, c1: p, c0: -q };
    for r in roots.iter_mut() {
        let was_real = r.im == 0.0;
        *r = polish(*r, |z| h.eval(z), |z| h.eval_derivative(z));
        if was_real {
            r.im = 0.0;
        }
    }
    roots
}

/// Roots of a real cubic `a3 x³ + a2 x² + a1 x + a0`.
pub fn solve_cubic(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<[C64; 3]> {
    let scale = a2.abs().max(a1.abs()).max(a0.abs());
    if a3.abs() <= 1e-14 * scale || a3 == 0.0 {
        return Err(DsgeError::DegreeCollapse(a3));
    }
    let h = ResolventCubic {
        c2: a2 / a3,
        c1: a1 / a3,
        c0: a0 / a3,
    };
    let (p, q, shift) = h.depressed();
    let mut roots = solve_depressed_cubic(p, q).map(|y| y + shift);
    for r in roots.iter_mut() {
        *r = polish(*r, |z| h.eval(z), |z| h.eval_derivative(z));
    }
    Ok(roots)
}

/// Roots of the real quadratic `z² − t·z + p`.
pub fn solve_monic_quadratic(t: f64, p: f64) -> [C64; 2] {
    let disc = t * t / 4.0 - p;
    if disc >= 0.0 {
        let big = t / 2.0 + t.signum() * disc.sqrt();
        if big == 0.0 {
            return [C64::new(0.0, 0.0); 2];
        }
        [C64::new(big, 0.0), C64::new(p / big, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [C64::new(t / 2.0, im), C64::new(t / 2.0, -im)]
    }
}

/// Ferrari's method: resolvent roots `βᵢ`, `γᵢ² = Θ₁² − 4Θ₂ + 4βᵢ` with signs
/// fixed by `γ₁γ₂γ₃ = 8Θ₃ − 4Θ₁Θ₂ + Θ₁³`, then
/// `α = (Θ₁ ± γ₁ ± γ₂ ± γ₃)/4`.
pub fn solve_quartic(q: &QuarticPoly) -> QuarticRoots {
    let h = resolvent_cubic(q);
    let (p, qq, shift) = h.depressed();
    let betas = solve_depressed_cubic(p, qq).map(|y| {
        let b = y + shift;
        polish(b, |z| h.eval(z), |z| h.eval_derivative(z))
    });

    let t1 = q.theta1;
    let base = t1 * t1 - 4.0 * q.theta2;
    let g = betas.map(|b| (base + 4.0 * b).sqrt());
    let target = 8.0 * q.theta3 - 4.0 * t1 * q.theta2 + t1 * t1 * t1;

    // Four sign patterns for (γ₂, γ₃) relative to γ₁, ranked by how well
    // they meet the product constraint; ties keep lexicographic order.
    let mut patterns: Vec<([C64; 3], f64)> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(s2, s3)| {
            let gs = [g[0], g[1] * s2, g[2] * s3];
            let err = (gs[0] * gs[1] * gs[2] - target).norm();
            (gs, err)
        })
        .collect();
    patterns.sort_by(|a, b| a.1.total_cmp(&b.1));

    let assemble = |gs: &[C64; 3]| -> [C64; 4] {
        let [g1, g2, g3] = *gs;
        let polished = [
            (t1 + g1 + g2 + g3) / 4.0,
            (t1 + g1 - g2 - g3) / 4.0,
            (t1 - g1 + g2 - g3) / 4.0,
            (t1 - g1 - g2 + g3) / 4.0,
        ]
        .map(|a| polish(a, |z| q.eval(z), |z| q.eval_derivative(z)));
        pair_conjugates(polished)
    };

    let mut best = (patterns[0].0, assemble(&patterns[0].0));
    let mut best_score = fit_score(q, &best.1);
    // The product constraint only separates ±γ₁γ₂γ₃. When rounding in β
    // makes that call marginal, fall back to the pattern that reproduces the
    // coefficients.
    if best_score > 1e-10 {
        for (gs, _) in patterns.iter().skip(1) {
            let alphas = assemble(gs);
            let score = fit_score(q, &alphas);
            if score < best_score {
                best = (*gs, alphas);
                best_score = score;
            }
        }
    }

    let (phi2, phi3) = (p, qq);
    QuarticRoots {
        alphas: best.1,
        resolvent: ResolventData {
            phi2,
            phi3,
            delta: discriminant(phi2, phi3),
            betas,
            gammas: best.0,
        },
    }
}

/// Elementary symmetric functions `[e₁, e₂, e₃, e₄]` of four values.
pub fn elementary_symmetric(r: &[C64; 4]) -> [C64; 4] {
    let e1 = r[0] + r[1] + r[2] + r[3];
    let e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] + r[2] * r[3];
    let e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] + r[1] * r[2] * r[3];
    let e4 = r[0] * r[1] * r[2] * r[3];
    [e1, e2, e3, e4]
}

/// Worst of the per-root backward residual and the per-coefficient Vieta
/// mismatch relative to `max(1, |Θₖ|)`.
pub fn fit_score(q: &QuarticPoly, alphas: &[C64; 4]) -> f64 {
    let e = elementary_symmetric(alphas);
    let theta = [q.theta1, q.theta2, q.theta3, q.theta4];
    let vieta = e
        .iter()
        .zip(theta)
        .map(|(ek, tk)| (ek - tk).norm() / tk.abs().max(1.0))
        .fold(0.0, f64::max);
    let residual = alphas
        .iter()
        .map(|a| q.relative_residual(*a))
        .fold(0.0, f64::max);
    vieta.max(residual)
}

fn horner(ascending: &[f64], z: C64) -> C64 {
    ascending
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Newton steps that are kept only while they shrink the residual.
fn polish(z0: C64, f: impl Fn(C64) -> C64, df: impl Fn(C64) -> C64) -> C64 {
    let mut z = z0;
    let mut fz = f(z).norm();
    for _ in 0..POLISH_STEPS {
        if fz == 0.0 {
            break;
        }
        let d = df(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - f(z) / d;
        let fn_ = f(next).norm();
        if fn_.is_nan() || fn_ >= fz {
            break;
        }
        z = next;
        fz = fn_;
    }
    z
}

/// Enforces conjugate symmetry on the roots of a real quartic: genuinely
/// complex pairs are averaged into exact conjugates, near-real strays get
/// their imaginary part dropped.
fn pair_conjugates(mut r: [C64; 4]) -> [C64; 4] {
    let mut done = [false; 4];
    for _ in 0..2 {
        let Some(i) = (0..4)
            .filter(|&k| !done[k])
            .max_by(|&a, &b| r[a].im.abs().total_cmp(&r[b].im.abs()))
        else {
            break;
        };
        done[i] = true;
        let Some(j) = (0..4)
            .filter(|&k| !done[k])
            .min_by(|&a, &b| (r[a] - r[i].conj()).norm().total_cmp(&(r[b] - r[i].conj()).norm()))
        else {
            break;
        };
        done[j] = true;
        let gap = (r[j] - r[i].conj()).norm();
        let scale = r[i].norm().max(1.0);
        if gap <= 1e-6 * scale && r[i].im.abs() > gap {
            let m = (r[i] + r[j].conj()) / 2.0;
            r[i] = m;
            r[j] = m.conj();
        } else if r[i].im.abs() <= 1e-6 * scale {
            r[i].im = 0.0;
            r[j].im = 0.0;
        }
    }
    r
}
