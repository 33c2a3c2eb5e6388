//! Self-check suite run by `dsge verify`.
//!
//! Every check is deterministic (fixed seeds) and independent, so the suite
//! fans out through [`exec`]. The checks compare the pipeline against
//! quantities computed a second way: direct substitution, Vieta relations,
//! known closed forms, symmetry images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::classical::{self, ClassicalSolution, Phase, Sign, SolutionKind};
use crate::energy::{self, compare_energy};
use crate::exec::{self, Strategy};
use crate::mobius::{self, Carrier};
use crate::polyroots::{elementary_symmetric, solve_quartic, QuarticPoly};
use crate::potential::eval_potential;
use crate::system57::{self, Convention, ObstructionVerdict, SystemCandidate};
use crate::{Branch, DsgeParams, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Evaluate the coefficient system with the printed `cos φ` signs, so
    /// the regeneration check must fail.
    pub inject_sign_flip: bool,
    pub strategy: Strategy,
}

type CheckFn = fn(&VerifyOptions) -> Check;

const CHECKS: &[CheckFn] = &[
    substitution_identity,
    vieta_fuzz,
    csch_fixture,
    bubble_fixture,
    regeneration_oracle,
    symmetry_checks,
    obstruction,
    energies,
    cross_method,
];

pub fn run_all(opts: &VerifyOptions) -> Vec<Check> {
    exec::map(opts.strategy, CHECKS, |check| check(opts))
}

fn params(eta: f64, phi: f64) -> DsgeParams {
    DsgeParams::new(eta, phi).expect("finite parameters")
}

fn substitution_identity(_: &VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let eta = rng.random_range(-1.5..1.5);
        let phi = rng.random_range(-PI..PI);
        let s = rng.random_range(-3.0..3.0);
        let p = params(eta, phi);
        let q = mobius::first_integral_quartic(&p, s);
        for _ in 0..20 {
            let f: f64 = rng.random_range(-4.0..4.0);
            let theta = 2.0 * f.atan();
            let w = 1.0 + f * f;
            let direct = 0.5 * w * w * (s + eval_potential(theta, &p));
            worst = worst.max((q.eval(f) - direct).abs() / (w * w * (s.abs() + 1.0 + eta.abs())));
        }
    }
    Check {
        name: "substitution identity",
        passed: worst < 1e-12,
        detail: format!("max relative deviation {worst:.1e} over 1000 points"),
    }
}

fn vieta_fuzz(_: &VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let mut roots = [C64::default(); 4];
        for r in roots.iter_mut() {
            *r = C64::new(rng.random_range(-4.0..4.0), 0.0);
        }
        if rng.random_bool(0.5) {
            let im = rng.random_range(0.05..3.0);
            roots[1] = C64::new(roots[0].re, -im);
            roots[0].im = im;
        }
        let q = QuarticPoly::from_roots(roots).expect("finite roots");
        let sol = solve_quartic(&q);
        let e = elementary_symmetric(&sol.alphas);
        let th = [q.theta1, q.theta2, q.theta3, q.theta4];
        for k in 0..4 {
            worst = worst.max((e[k] - th[k]).norm() / th[k].abs().max(1.0));
        }
    }
    Check {
        name: "quartic Vieta fuzz",
        passed: worst < 1e-9,
        detail: format!("max Vieta deviation {worst:.1e} over 500 quartics"),
    }
}

fn csch_fixture(_: &VerifyOptions) -> Check {
    let eta = 0.1;
    let k = (1.0_f64 + 4.0 * eta).sqrt();
    let grid = mobius::symmetric_grid(10.0, 2001);
    match mobius::construct(&params(eta, 0.0), Branch::AbsoluteMin) {
        Ok(sol) => {
            let gap = grid
                .iter()
                .map(|&s| {
                    let want = 2.0 * (-k / (k * s).sinh()).atan();
                    let d = (mobius::eval_theta(&sol, s) - want).rem_euclid(std::f64::consts::TAU);
                    d.min(std::f64::consts::TAU - d)
                })
                .fold(0.0, f64::max);
            let res = mobius::residual(&sol, &grid);
            Check {
                name: "csch kink fixture",
                passed: gap < 1e-9 && res < 1e-12 && (sol.r - k).abs() < 1e-12,
                detail: format!("profile gap {gap:.1e}, residual {res:.1e}, r = {}", sol.r),
            }
        }
        Err(e) => Check {
            name: "csch kink fixture",
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn bubble_fixture(_: &VerifyOptions) -> Check {
    let b = ClassicalSolution::new(SolutionKind::BubbleCase3, 0.5, Phase::Zero, Sign::Plus)
        .expect("admissible");
    let grid = mobius::symmetric_grid(10.0, 2001);
    match mobius::construct(&params(0.5, 0.0), Branch::RelativeMin) {
        Ok(sol) => {
            let gap = grid
                .iter()
                .map(|&s| (mobius::eval_theta(&sol, s) - classical::eval_classical(&b, s)).abs())
                .fold(0.0, f64::max);
            Check {
                name: "bubble fixture",
                passed: gap < 1e-9,
                detail: format!("profile gap {gap:.1e} ({:?} carrier, {:?} chart)", sol.carrier, sol.chart),
            }
        }
        Err(e) => Check {
            name: "bubble fixture",
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn regeneration_oracle(opts: &VerifyOptions) -> Check {
    let convention = if opts.inject_sign_flip {
        Convention::Printed
    } else {
        Convention::Regenerated
    };
    let grid = mobius::symmetric_grid(8.0, 801);
    let mut worst = 0.0_f64;
    let mut n = 0;
    for eta in [-0.4, -0.1, 0.1, 0.5] {
        for phi in [0.0, 0.1, 0.5, FRAC_PI_4, 1.2] {
            for branch in [Branch::AbsoluteMin, Branch::RelativeMin] {
                let Ok(sol) = mobius::construct(&params(eta, phi), branch) else {
                    continue;
                };
                if mobius::residual(&sol, &grid) >= 1e-10 {
                    continue;
                }
                n += 1;
                let res = system57::residuals_in(&SystemCandidate::from(&sol), sol.carrier, convention);
                worst = worst.max(res.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
            }
        }
    }
    Check {
        name: "regeneration oracle (coefficient system)",
        passed: n > 0 && worst < 1e-10,
        detail: format!("max residual {worst:.1e} on {n} verified solutions ({convention:?} signs)"),
    }
}

fn symmetry_checks(_: &VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst_v = 0.0_f64;
    for _ in 0..10_000 {
        let theta = rng.random_range(-2.0 * PI..2.0 * PI);
        let eta = rng.random_range(-2.0..2.0);
        let lhs = eval_potential(theta, &params(eta, FRAC_PI_2));
        let rhs = eval_potential(theta + FRAC_PI_2, &params(-eta, 0.0));
        worst_v = worst_v.max((lhs - rhs).abs());
    }
    let mut worst_img = 0.0_f64;
    let mut n = 0;
    for (eta, phi) in [(0.1, 0.3), (-0.4, 0.5), (0.5, 1.2)] {
        let Ok(sol) = mobius::construct(&params(eta, phi), Branch::AbsoluteMin) else {
            continue;
        };
        if sol.carrier != Carrier::Sinh {
            continue;
        }
        let rep = system57::solve57(&sol.params, SystemCandidate::from(&sol));
        if !rep.converged {
            continue;
        }
        n += 1;
        let img = system57::symmetry_map58(&rep.candidate);
        worst_img = worst_img.max(system57::residual_norm(&system57::residuals57(&img)));
    }
    Check {
        name: "symmetries",
        passed: worst_v < 1e-12 && n > 0 && worst_img < 1e-10,
        detail: format!("half-pi potential identity {worst_v:.1e}; φ → π−φ image residual {worst_img:.1e} on {n} roots"),
    }
}

fn obstruction(_: &VerifyOptions) -> Check {
    let contradictions = [0.26, 0.5, 1.0]
        .iter()
        .all(|&e| matches!(system57::obstruction_check(e), ObstructionVerdict::Contradiction { .. }));
    let consistent = [0.0, 0.1, 0.2].iter().all(|&e| match system57::obstruction_check(e) {
        ObstructionVerdict::Consistent { r, .. } => (r - (1.0 - 4.0 * e).sqrt()).abs() < 1e-12,
        ObstructionVerdict::Contradiction { .. } => false,
    });
    Check {
        name: "half-pi obstruction",
        passed: contradictions && consistent,
        detail: format!("contradiction for η > 1/4: {contradictions}; r = √(1−4η) below: {consistent}"),
    }
}

fn energies(_: &VerifyOptions) -> Check {
    let run = || -> crate::Result<Check> {
        let sg = compare_energy(SolutionKind::KinkCase23, 1e-6)?;
        let small = compare_energy(SolutionKind::SmallKinkCase1, -0.5)?;
        let bubble = compare_energy(SolutionKind::BubbleCase3, 0.5)?;
        let kink = ClassicalSolution::new(SolutionKind::KinkCase23, 0.2, Phase::Zero, Sign::Plus)?;
        let profile = energy::energy_from_derivative(|s| classical::eval_classical_derivative(&kink, s), 40.0);
        let kink_q = compare_energy(SolutionKind::KinkCase23, 0.2)?;
        let passed = (sg.quadrature - 8.0).abs() < 1e-3
            && !small.flagged
            && bubble.flagged
            && (profile.value - kink_q.quadrature).abs() < 1e-6;
        Ok(Check {
            name: "energies",
            passed,
            detail: format!(
                "H(η→0) = {:.6}; small kink Δ = {:.1e}; bubble printed {:.4} vs {:.4} (flagged {}); profile vs θ-quadrature Δ = {:.1e}",
                sg.quadrature,
                small.difference.unwrap_or(f64::NAN),
                bubble.closed_form.unwrap_or(f64::NAN),
                bubble.quadrature,
                bubble.flagged,
                profile.value - kink_q.quadrature
            ),
        })
    };
    run().unwrap_or_else(|e| Check {
        name: "energies",
        passed: false,
        detail: e.to_string(),
    })
}

fn cross_method(_: &VerifyOptions) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut worst = 0.0_f64;
    let mut n = 0;
    while n < 30 {
        let eta: f64 = rng.random_range(-1.0..1.0);
        let phi = rng.random_range(0.05..PI - 0.05);
        if (eta.abs() - 0.25).abs() < 0.01 {
            continue;
        }
        let p = params(eta, phi);
        let Ok((f3, s)) = mobius::solve_f3_s(&p, Branch::AbsoluteMin) else {
            continue;
        };
        n += 1;
        let gap = match mobius::euclidean_eliminate(&p) {
            Ok(cands) => cands
                .iter()
                .map(|c| ((c.f3 - f3).abs() / f3.abs().max(1.0)).max((c.s - s).abs()))
                .fold(f64::INFINITY, f64::min),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(gap);
    }
    Check {
        name: "elimination vs extremum quartic",
        passed: worst < 1e-8,
        detail: format!("max (f3, S) disagreement {worst:.1e} over {n} random (η, φ)"),
    }
}
