use std::f64::consts::PI;

use qcavity_web::{collapse_view, hologram_view, spectrum_view, CAT_PHASES};

#[test]
fn spectrum_doublet_sits_at_collective_coupling() {
    let v = spectrum_view(1.0, 1.0, 0.02, 16, 0.01, 0).unwrap();
    assert_eq!(v.omegas().len(), v.imchi().len());
    let peaks = v.peaks();
    assert_eq!(peaks.len(), 2);
    let step = v.omegas()[1] - v.omegas()[0];
    assert!((peaks[0] - 0.92).abs() <= step);
    assert!((peaks[1] - 1.08).abs() <= step);
    assert_eq!(v.predicted().len(), 2);
    assert!(!v.unresolved());
}

#[test]
fn spectrum_respects_requested_samples() {
    assert_eq!(
        spectrum_view(1.0, 1.0, 0.02, 1, 0.01, 3000).unwrap().omegas().len(),
        3000
    );
    // too coarse to resolve the linewidth
    assert!(spectrum_view(1.0, 1.0, 0.02, 1, 0.01, 300).is_err());
    assert!(spectrum_view(1.0, 1.0, 0.02, 1, -0.01, 0).is_err());
}

#[test]
fn hologram_without_scatterers_is_flat() {
    let v = hologram_view(100.0, &[], 100.0, 20.0, 31, 5).unwrap();
    assert_eq!(v.values().len(), 31 * 5);
    assert!(v.contrast() < 1e-10);
    assert!(v.period().is_nan());
}

#[test]
fn hologram_fringe_period_matches_two_source_formula() {
    let k = 2.0 * PI * 50.0;
    let v = hologram_view(k, &[1.0, 0.0, 0.0, 0.05, 0.0], 100.0, 20.0, 801, 3).unwrap();
    let expected = 2.0 * PI * 100.0 / k;
    assert!((v.period() - expected).abs() / expected < 0.02);
    assert!(v.contrast() > 0.0);
}

#[test]
fn hologram_rejects_malformed_records() {
    assert!(hologram_view(1.0, &[1.0, 0.0, 0.0, 0.5], 100.0, 1.0, 3, 3).is_err());
}

#[test]
fn collapse_window_follows_damping_time() {
    let v = collapse_view(1e-4, 1.0, 10.0, 5e-7, 10.0).unwrap();
    let n = v.n_sys();
    assert!((v.lower() - 1e-4 / (2.0 * 10.0 * n)).abs() < 1e-12 * v.lower());
    assert!((v.upper() - 1e-4 / n).abs() < 1e-12 * v.upper());
    assert!(v.verdict());
    assert_eq!(v.feasible_n_max(), 2);

    let short = collapse_view(1e-6, 1.0, 10.0, 5e-7, 10.0).unwrap();
    assert!(!short.verdict());
    assert_eq!(short.feasible_n_max(), 0);
}

#[test]
fn cat_times_follow_inverse_square_distance() {
    let v = collapse_view(1e-4, 1.0, 10.0, 5e-7, 4.0).unwrap();
    let t = v.cat_times();
    assert_eq!(t.len(), CAT_PHASES);
    assert!(t[0].is_infinite());
    // D = 2√n at φ = π/2
    assert!((t[CAT_PHASES - 1] - 2.0 * 1e-4 / 16.0).abs() < 1e-18);
}
