mod common;

use dsge_core::classical::{self, ClassicalSolution, Phase, Sign, SolutionKind};
use dsge_core::energy;
use dsge_core::mobius::{self, Carrier, MobiusSolution};
use dsge_core::polyroots::{self, QuarticPoly};
use dsge_core::potential::{self, ExtremumKind};
use dsge_core::quad;
use dsge_core::system57::{self, Convention, SystemCandidate};
use dsge_core::{Branch, DsgeParams, C64};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::AbsoluteMin), Just(Branch::RelativeMin)]
}

/// A solution that the construction accepts and the first integral confirms.
fn verified(eta: f64, phi: f64, branch: Branch) -> Option<MobiusSolution> {
    let sol = mobius::construct(&DsgeParams::new(eta, phi).ok()?, branch).ok()?;
    let grid = mobius::symmetric_grid(8.0, 801);
    (mobius::residual(&sol, &grid) < 1e-10).then_some(sol)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn gradient_matches_finite_difference(theta in -PI..PI, eta in -1.0..1.0f64, phi in -PI..PI) {
        let p = DsgeParams::new(eta, phi).unwrap();
        let h = 1e-5;
        let fd = (potential::eval_potential(theta + h, &p) - potential::eval_potential(theta - h, &p)) / (2.0 * h);
        prop_assert!((potential::eval_potential_gradient(theta, &p) - fd).abs() < 1e-6);
    }

    #[test]
    fn quarter_turn_trades_phase_for_sign_of_eta(theta in -PI..PI, eta in -1.0..1.0f64) {
        let half = DsgeParams::new(eta, FRAC_PI_2).unwrap();
        let zero = DsgeParams::new(-eta, 0.0).unwrap();
        let lhs = potential::eval_potential(theta, &half);
        let rhs = potential::eval_potential(theta + FRAC_PI_2, &zero);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn substitution_identity(eta in -1.0..1.0f64, phi in 0.01..3.13f64, s in -2.0..3.0f64, f in -5.0..5.0f64) {
        let p = DsgeParams::new(eta, phi).unwrap();
        let q = mobius::first_integral_quartic(&p, s);
        let expected = common::substituted_rhs(eta, phi, s, f);
        let scale = expected.abs().max((1.0 + f * f).powi(2));
        prop_assert!((q.eval(f) - expected).abs() < 1e-12 * scale);
    }

    #[test]
    fn quartic_roots_satisfy_vieta(c in prop::array::uniform4(-10.0..10.0f64)) {
        let q = QuarticPoly::new(c[0], c[1], c[2], c[3]).unwrap();
        let roots = polyroots::solve_quartic(&q);
        for a in roots.alphas {
            prop_assert!(q.relative_residual(a) < 1e-8, "residual at {a}");
        }
        let e = polyroots::elementary_symmetric(&roots.alphas);
        for (k, want) in c.iter().enumerate() {
            prop_assert!((e[k] - want).norm() < 1e-9 * want.abs().max(1.0) * 10f64.powi(k as i32));
        }
    }

    #[test]
    fn real_quartics_have_conjugate_roots(c in prop::array::uniform4(-10.0..10.0f64)) {
        let q = QuarticPoly::new(c[0], c[1], c[2], c[3]).unwrap();
        let roots = polyroots::solve_quartic(&q).alphas;
        for a in roots {
            let partner = roots.iter().map(|b| (b - a.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner < 1e-10 * a.norm().max(1.0) + 1e-7 * a.im.abs().min(1.0));
        }
    }

    #[test]
    fn exact_double_root_is_resolved(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64) {
        prop_assume!((x - y).abs() > 0.1 && (x - z).abs() > 0.1);
        let q = QuarticPoly::from_roots([x, x, y, z].map(|v| C64::new(v, 0.0))).unwrap();
        let near: Vec<_> = polyroots::solve_quartic(&q)
            .alphas
            .into_iter()
            .filter(|a| (a - x).norm() < 1e-6)
            .collect();
        prop_assert_eq!(near.len(), 2);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn extrema_mirror_under_phase_reflection(eta in -0.9..0.9f64, phi in 0.05..3.09f64) {
        let a = potential::find_extrema(&DsgeParams::new(eta, phi).unwrap());
        let b = potential::find_extrema(&DsgeParams::new(eta, PI - phi).unwrap());
        prop_assume!(!a.degenerate && !b.degenerate);
        prop_assert_eq!(a.items.len(), b.items.len());
        for e in &a.items {
            let image = common::wrap(PI - e.theta);
            let m = b.items.iter().find(|f| common::wrap(f.theta - image).abs() < 1e-6);
            prop_assert!(m.is_some(), "no image of {:?}", e);
            prop_assert_eq!(m.unwrap().kind, e.kind);
        }
    }

    #[test]
    fn absolute_minimum_agrees_with_scan(eta in -0.9..0.9f64, phi in 0.05..3.09f64) {
        let p = DsgeParams::new(eta, phi).unwrap();
        let set = potential::find_extrema(&p);
        let best = set.of_kind(ExtremumKind::AbsMin).next();
        prop_assume!(best.is_some());
        let n = 100_000;
        let (scan, _) = (0..n)
            .map(|k| -PI + 2.0 * PI * k as f64 / n as f64)
            .map(|t| (t, common::potential(t, eta, phi)))
            .fold((0.0, f64::INFINITY), |m, x| if x.1 < m.1 { x } else { m });
        // The grid spacing bounds how close a scan can get.
        prop_assert!(common::wrap(best.unwrap().theta - scan).abs() < 1e-4);
    }

    #[test]
    fn constructed_profiles_solve_the_first_integral(eta in -0.6..1.2f64, phi in 0.05..3.09f64, b in branch()) {
        if let Ok(sol) = mobius::construct(&DsgeParams::new(eta, phi).unwrap(), b) {
            prop_assert!(mobius::residual(&sol, &mobius::symmetric_grid(8.0, 401)) < 1e-8);
        }
    }

    #[test]
    fn asymptote_sits_at_minus_s(eta in -0.6..1.2f64, phi in 0.05..3.09f64, b in branch()) {
        if let Ok(sol) = mobius::construct(&DsgeParams::new(eta, phi).unwrap(), b) {
            let theta_inf = 2.0 * sol.asymptote_tan_half().atan();
            prop_assert!((potential::eval_potential(theta_inf, &sol.params) + sol.s).abs() < 1e-10);
        }
    }

    #[test]
    fn lift_is_continuous(eta in -0.6..1.2f64, phi in 0.05..3.09f64, b in branch()) {
        if let Ok(sol) = mobius::construct(&DsgeParams::new(eta, phi).unwrap(), b) {
            let grid = mobius::symmetric_grid(12.0 / sol.r, 4001);
            let h = grid[1] - grid[0];
            let bound = mobius::residual(&sol, &grid).max(0.0) + sol.s + 1.0 + eta.abs();
            let max_slope = (2.0 * bound).sqrt();
            for w in grid.windows(2) {
                let jump = (mobius::eval_theta(&sol, w[1]) - mobius::eval_theta(&sol, w[0])).abs();
                prop_assert!(jump <= 1.01 * max_slope * h, "jump {jump} at s = {}", w[0]);
            }
        }
    }

    #[test]
    fn coefficient_system_vanishes_on_verified_solutions(eta in -0.6..1.2f64, phi in 0.0..3.1f64, b in branch()) {
        if let Some(sol) = verified(eta, phi, b) {
            let res = system57::residuals_in(&SystemCandidate::from(&sol), sol.carrier, Convention::Regenerated);
            prop_assert!(system57::residual_norm(&res) < 1e-10, "{res:?}");
        }
    }

    #[test]
    fn reflection_is_an_involution(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64, phi in 0.0..PI) {
        let cand = SystemCandidate { a, b, c, d, r: 1.0, s: 0.5, params: DsgeParams::new(0.2, phi).unwrap() };
        let once = system57::symmetry_map58(&cand);
        let twice = system57::symmetry_map58(&once);
        prop_assert!((once.a * once.d - once.b * once.c - (a * d - b * c)).abs() < 1e-12);
        prop_assert!((twice.a - a).abs() + (twice.b - b).abs() + (twice.c - c).abs() + (twice.d - d).abs() < 1e-15);
        prop_assert!((twice.params.phi - phi).abs() < 1e-12);
    }

    #[test]
    fn reflected_solution_is_already_converged(eta in -0.2..0.24f64, phi in 0.1..1.4f64) {
        let Some(sol) = verified(eta, phi, Branch::AbsoluteMin) else { return Ok(()) };
        prop_assume!(sol.carrier == Carrier::Sinh);
        let image = system57::symmetry_map58(&SystemCandidate::from(&sol));
        let report = system57::solve57(&image.params, image);
        prop_assert!(report.converged);
        prop_assert!(report.iterations <= 2);
    }

    #[test]
    fn newton_converges_quadratically(eta in -0.2..0.24f64, phi in 0.1..1.4f64, kick in prop::array::uniform4(-1.0..1.0f64)) {
        let Some(sol) = verified(eta, phi, Branch::AbsoluteMin) else { return Ok(()) };
        prop_assume!(sol.carrier == Carrier::Sinh);
        let exact = SystemCandidate::from(&sol);
        prop_assume!(exact.coefficient_size() < 20.0);
        let eps = 1e-3;
        let guess = SystemCandidate {
            a: exact.a + eps * kick[0],
            b: exact.b + eps * kick[1],
            c: exact.c + eps * kick[2],
            d: exact.d + eps * kick[3],
            ..exact
        };
        let report = system57::solve57(&exact.params, guess);
        prop_assert!(report.converged, "{:?}", report.history);
        let h = &report.history;
        // Near machine precision the finite-difference Jacobian stops mattering.
        let tail: Vec<f64> = h.iter().copied().filter(|r| *r > 1e-13).collect();
        for w in tail.windows(2).rev().take(2) {
            prop_assert!(w[1] <= 1e6 * w[0] * w[0], "history {h:?}");
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn classical_profiles_solve_the_first_integral(u in 0.0..1.0f64, kind_ix in 0usize..4, plus in any::<bool>()) {
        let kind = SolutionKind::ALL[kind_ix];
        let eta = match kind {
            SolutionKind::LargeKinkCase1 | SolutionKind::SmallKinkCase1 => -2.0 + 1.7 * u,
            SolutionKind::KinkCase23 => -0.2 + 1.2 * u,
            SolutionKind::BubbleCase3 => 0.3 + 1.0 * u,
        };
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let sol = ClassicalSolution::new(kind, eta, Phase::Zero, sign).unwrap();
        let s_action = sol.action().unwrap();
        let p = sol.params();
        for s in common::grid(10.0, 401) {
            if s.abs() < 1e-6 {
                continue;
            }
            let theta = classical::eval_classical(&sol, s);
            let fd = energy::central_difference(&|x| classical::eval_classical(&sol, x), s);
            prop_assert!(mobius::first_integral_residual(theta, fd, &p, s_action) < 1e-8, "s = {s}");
        }
    }

    #[test]
    fn bubble_is_even(eta in 0.26..2.0f64, s in 0.0..10.0f64, plus in any::<bool>()) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let sol = ClassicalSolution::new(SolutionKind::BubbleCase3, eta, Phase::Zero, sign).unwrap();
        prop_assert_eq!(classical::eval_classical(&sol, s), classical::eval_classical(&sol, -s));
    }

    #[test]
    fn quadrature_energies_are_positive(u in 0.0..1.0f64, kind_ix in 0usize..4) {
        let kind = SolutionKind::ALL[kind_ix];
        let eta = match kind {
            SolutionKind::LargeKinkCase1 | SolutionKind::SmallKinkCase1 => -2.0 + 1.7 * u,
            SolutionKind::KinkCase23 => -0.2 + 1.2 * u,
            SolutionKind::BubbleCase3 => 0.3 + 1.0 * u,
        };
        let report = energy::compare_energy(kind, eta).unwrap();
        prop_assert!(report.quadrature > 0.0);
        if report.closed_form.is_some_and(|c| c <= 0.0) {
            prop_assert!(report.flagged);
        }
    }

    #[test]
    fn halving_the_tolerance_barely_moves_quadrature(k in 0.5..4.0f64, tol_exp in 6..11i32) {
        let tol = 10f64.powi(-tol_exp);
        let f = |x: f64| (x.sin().abs() + 0.1).sqrt() * (-x * x / k).exp();
        let a = quad::integrate(f, -6.0, 6.0, tol).value;
        let b = quad::integrate(f, -6.0, 6.0, tol / 2.0).value;
        prop_assert!((a - b).abs() < 10.0 * tol);
    }

    #[test]
    fn profile_energy_matches_theta_space_energy(eta in -0.6..1.2f64, phi in 0.05..3.09f64, b in branch()) {
        let Some(sol) = verified(eta, phi, b) else { return Ok(()) };
        let l = 40.0 / sol.r;
        let lo = mobius::eval_theta(&sol, -l);
        let mid = mobius::eval_theta(&sol, 0.0);
        let hi = mobius::eval_theta(&sol, l);
        let q = |x: f64, y: f64| energy::quadrature_vs(&sol.params, sol.s, x.min(y), x.max(y)).map(|v| 2.0 * v);
        let (Ok(left), Ok(right)) = (q(lo, mid), q(mid, hi)) else { return Ok(()) };
        let profile = energy::energy_from_derivative(|s| mobius::eval_dtheta(&sol, s), l);
        prop_assert!((profile.value - (left + right)).abs() < 1e-6 + profile.tail_estimate,
            "profile {} vs theta-space {}", profile.value, left + right);
    }

    #[test]
    fn kink_energy_is_window_stable(eta in -0.2..1.0f64, phi in 0.05..3.09f64) {
        let Some(sol) = verified(eta, phi, Branch::AbsoluteMin) else { return Ok(()) };
        prop_assume!(sol.carrier == Carrier::Sinh && sol.r > 0.5);
        let e = |w: f64| energy::energy_from_derivative(|s| mobius::eval_dtheta(&sol, s), w).value;
        prop_assert!((e(20.0) - e(40.0)).abs() < 1e-8);
    }
}

fn classical_gap(eta: f64, phi: f64) -> f64 {
    let grid = common::grid(10.0, 2001);
    let sol = mobius::construct(&DsgeParams::new(eta, phi).unwrap(), Branch::AbsoluteMin).unwrap();
    [1.0, -1.0]
        .map(|sign| common::aligned_gap(|s| mobius::eval_theta(&sol, s), |s| common::csch_kink(eta, sign, s), &grid))
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn small_phase_approaches_the_classical_kink() {
    for eta in [-0.1, 0.1, 0.5] {
        let gap = classical_gap(eta, 1e-4);
        assert!(gap < 1e-3, "eta = {eta}: gap {gap}");
    }
}

#[test]
fn departure_from_the_classical_kink_is_linear_in_phase() {
    // Near η = −1/4 the slope grows like 1/(1 + 4η)², but it stays finite.
    for eta in [-0.2, -0.1, 0.1, 0.5] {
        let ratio = classical_gap(eta, 1e-4) / classical_gap(eta, 1e-5);
        assert!((ratio - 10.0).abs() < 0.1, "eta = {eta}: ratio {ratio}");
    }
}

#[test]
fn potential_balance_decays_with_the_window() {
    let sol = mobius::construct(&DsgeParams::new(0.3, 0.7).unwrap(), Branch::AbsoluteMin).unwrap();
    let balance = |l: f64| {
        energy::potential_balance(|s| mobius::eval_theta(&sol, s), |s| mobius::eval_dtheta(&sol, s), &sol.params, sol.s, l)
            .abs()
    };
    let (b10, b20, b40) = (balance(10.0), balance(20.0), balance(40.0));
    assert!(b20 <= b10 && b40 <= b20.max(1e-10), "{b10:e} {b20:e} {b40:e}");
    assert!(b40 < 1e-8, "{b40:e}");
}

#[test]
fn extrema_have_vanishing_gradient_and_no_missed_turns() {
    let mut rng = common::rng(17);
    for _ in 0..20 {
        use rand::Rng;
        let eta = rng.random_range(-0.9..0.9);
        let phi = rng.random_range(0.05..3.09);
        let p = DsgeParams::new(eta, phi).unwrap();
        let set = potential::find_extrema(&p);
        for e in &set.items {
            assert!(potential::eval_potential_gradient(e.theta, &p).abs() < p.tol.max(1e-9));
        }
        let n = 100_000;
        let mut prev = potential::eval_potential_gradient(-PI, &p);
        for k in 1..=n {
            let t = -PI + 2.0 * PI * k as f64 / n as f64;
            let g = potential::eval_potential_gradient(t, &p);
            if prev.signum() != g.signum() && prev != 0.0 {
                let near = set.items.iter().any(|e| common::wrap(e.theta - t).abs() < 2.0 * PI / n as f64 + 1e-6);
                assert!(near, "sign change near {t} at eta = {eta}, phi = {phi}");
            }
            prev = g;
        }
    }
}

#[test]
fn bubble_profile_energy_matches_theta_space() {
    let eta = 0.5;
    let sol = ClassicalSolution::new(SolutionKind::BubbleCase3, eta, Phase::Zero, Sign::Plus).unwrap();
    let profile = energy::energy_of_profile(|s| classical::eval_classical(&sol, s), 40.0);
    let (lo, hi, factor) = classical::quadrature_bounds(SolutionKind::BubbleCase3, eta).unwrap();
    let p = DsgeParams::new(eta, 0.0).unwrap();
    let theta_space = factor * energy::quadrature_vs(&p, sol.action().unwrap(), lo, hi).unwrap();
    assert!((profile.value - theta_space).abs() < 1e-6, "{} vs {theta_space}", profile.value);
}
