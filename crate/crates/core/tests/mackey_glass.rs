use klmat::signals::{mackey_glass, MgParams};

#[test]
fn fixed_points_hold() {
    for h in [0.0, 1.0] {
        let s = mackey_glass(&MgParams { history_value: h, ..Default::default() }, 500, None).unwrap();
        assert!(s.values.iter().all(|x| (x - h).abs() < 1e-9), "history {h}");
    }
}

#[test]
fn fourth_order_convergence_over_short_horizon() {
    // Before chaotic amplification sets in, differences between successive
    // halvings of dt should shrink about 16x.
    let base = MgParams { warmup: 0, ..Default::default() };
    let run = |dt: f64| mackey_glass(&MgParams { dt, ..base }, 30, None).unwrap().values;
    let (a, b, c) = (run(0.2), run(0.1), run(0.05));
    let err = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let ratio = err(&a, &b) / err(&b, &c);
    assert!(ratio > 12.0 && ratio < 20.0, "convergence ratio {ratio}");
}

#[test]
fn chaotic_series_stays_on_attractor() {
    let s = mackey_glass(&MgParams::default(), 2000, None).unwrap();
    let (lo, hi) = s.values.iter().fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(lo > 0.1 && hi < 1.6, "range {lo}..{hi}");
    // not periodic with a short period
    assert!(s.values.windows(2).any(|w| (w[0] - w[1]).abs() > 0.1));
}
