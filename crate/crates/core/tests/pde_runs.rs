use fraccaputo::experiments::run_manufactured;
use fraccaputo::schemes::SchemeKind;
use fraccaputo::soe::SoEParams;

fn related(alpha: f64, dt: f64, scheme: SchemeKind, n: usize) -> f64 {
    run_manufactured(alpha, 1e-3, 1.0, dt, scheme, SoEParams::preset(n)).unwrap().related_error.unwrap()
}

#[test]
fn fidr_at_least_first_order_on_coarse_steps() {
    let ratio = related(0.5, 0.1, SchemeKind::Fidr, 25) / related(0.5, 0.05, SchemeKind::Fidr, 25);
    assert!((2.0..=4.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn gl_decreases_with_step_and_tracks_l1() {
    let dts = [0.1, 0.05, 0.025, 0.0125];
    let gl: Vec<f64> = dts.iter().map(|&dt| related(0.5, dt, SchemeKind::Gl, 25)).collect();
    assert!(gl.windows(2).all(|w| w[1] < w[0]), "{gl:?}");
    for (&dt, &g) in dts.iter().zip(&gl) {
        let l1 = related(0.5, dt, SchemeKind::L1, 25);
        // first-order GL is never more accurate than L1 here
        assert!(g >= l1 && g / l1 < 100.0, "dt {dt}: GL {g}, L1 {l1}");
    }
}

#[test]
fn fir_with_few_modes_degrades_at_small_steps() {
    let coarse = related(0.1, 0.01, SchemeKind::Fir, 25);
    let fine = related(0.1, 0.002, SchemeKind::Fir, 25);
    assert!(fine > coarse);
    assert!(related(0.1, 0.002, SchemeKind::Fidr, 25) < fine);
}
