use mildsol::phase_space::{
    check_fading, fading_rtol, seminorm, seminorm_tail, AnalyticForm, FadingWeight, History,
};
use mildsol::StateSpace;
use proptest::prelude::*;

const TAU: f64 = 1.0;
const H: f64 = 0.05;

fn history(space: &StateSpace, amp: f64, rate: f64) -> History {
    let amp = space.constant(amp);
    History::from_analytic(space.clone(), TAU, H, AnalyticForm::exponential(amp, rate)).unwrap()
}

/// `(1/tau) ∫_{-tau}^0 |a| e^{r s} ds + ∫_{-inf}^{-tau} e^{mu s} |a| e^{r s} ds`
fn exact_seminorm(a: f64, r: f64, mu: f64) -> f64 {
    let window = if r == 0.0 { TAU } else { (1.0 - (-r * TAU).exp()) / r };
    a.abs() * (window / TAU + (-(mu + r) * TAU).exp() / (mu + r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seminorm_is_absolutely_homogeneous(amp in -3.0..3.0f64, rate in 0.0..2.0f64, alpha in -4.0..4.0f64) {
        let w = FadingWeight::exponential(TAU, 1.0).unwrap();
        let phi = history(&StateSpace::scalar(), amp, rate);
        let lhs = seminorm(&phi.scaled(alpha), &w).unwrap();
        let rhs = alpha.abs() * seminorm(&phi, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn seminorm_satisfies_the_triangle_inequality(
        a in -3.0..3.0f64, ra in 0.0..2.0f64, b in -3.0..3.0f64, rb in 0.0..2.0f64,
    ) {
        let space = StateSpace::unit_interval(5);
        let w = FadingWeight::exponential(TAU, 1.0).unwrap();
        let (pa, pb) = (history(&space, a, ra), history(&space, b, rb));
        let sum = History::combine(1.0, &pa, 1.0, &pb).unwrap();
        let lhs = seminorm(&sum, &w).unwrap();
        let rhs = seminorm(&pa, &w).unwrap() + seminorm(&pb, &w).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn exponential_weight_satisfies_the_fading_bound(mu in 0.1..3.0f64, xi in -5.0..0.0f64, theta in -20.0..-1.0f64) {
        let w = FadingWeight::exponential(TAU, mu).unwrap();
        let theta = theta - 1e-9;
        let r = check_fading(&w, &[(xi, theta)]);
        prop_assert!(r.passed);
        let row = &r.rows[0];
        prop_assert!((row.lhs - row.rhs).abs() <= fading_rtol(mu * (row.xi + row.theta)) * row.rhs);
    }
}

#[test]
fn seminorm_matches_closed_form() {
    let w = FadingWeight::exponential(TAU, 1.0).unwrap();
    for (a, r) in [(1.0, 0.0), (2.0, 1.0), (-0.5, 0.3)] {
        let got = seminorm(&history(&StateSpace::scalar(), a, r), &w).unwrap();
        let exact = exact_seminorm(a, r, 1.0);
        // trapezoid error on the window, step H
        assert!((got - exact).abs() <= H * H * (1.0 + r * r) * a.abs(), "{a} {r}: {got} vs {exact}");
    }
}

#[test]
fn tail_truncation_error_is_within_the_certified_bound() {
    let space = StateSpace::scalar();
    let w = FadingWeight::exponential(TAU, 1.0).unwrap();
    let phi = history(&space, 1.0, 0.5);
    let exact = seminorm_tail(phi.tail(), &w, &space).unwrap().value;
    let mut errors = Vec::new();
    for cutoff in [2.0 * TAU, 4.0 * TAU, 8.0 * TAU] {
        let cut = phi.truncated(cutoff, 1e-3).unwrap();
        let t = seminorm_tail(cut.tail(), &w, &space).unwrap();
        let err = (exact - t.value).abs();
        assert!(err <= t.error_bound() * (1.0 + 1e-9) + 1e-15, "cutoff {cutoff}: {err} > {}", t.error_bound());
        errors.push(err);
    }
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}

#[test]
fn doubled_shift_rate_violates_the_fading_bound() {
    let w = FadingWeight::with_p_rate(TAU, 1.0, 2.0).unwrap();
    let samples: Vec<(f64, f64)> = (1..=20).map(|i| (-0.25 * i as f64, -1.5 - 0.1 * i as f64)).collect();
    let r = check_fading(&w, &samples);
    assert!(!r.passed);
    assert!(r.rows.iter().all(|row| !row.ok));
}
