//! Frozen reference values computed independently (high-precision
//! quadrature and closed forms evaluated outside this crate).

use chaoslab::fields::{analytic_covariance, harmonic_number, increment_covariance, make_kernel, CircleField, KernelSpec};
use chaoslab::rng::{StreamKey, Tag};
use chaoslab::stats::{meander_exact, recentring, tail_target, GUMBEL_MEDIAN_TARGET, SH_TARGET};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

#[test]
fn wendland_covariance_values() {
    let k = make_kernel(KernelSpec::wendland(1)).unwrap();
    close(analytic_covariance(&k, 0.1, 8.0), 1.062_952_092_994_045_7, 1e-10);
    close(analytic_covariance(&k, 0.01, 8.0), 3.322_330_223_408_091_4, 1e-10);
    close(analytic_covariance(&k, 0.02, 3.0), 2.537_969_962_880_676_5, 1e-10);
}

#[test]
fn triangular_covariance_value() {
    let k = make_kernel(KernelSpec::triangular()).unwrap();
    close(analytic_covariance(&k, 0.1, 8.0), 1.402_585_092_994_045_7, 1e-10);
}

#[test]
fn increments_add_up() {
    let k = make_kernel(KernelSpec::wendland(1)).unwrap();
    let sum: f64 = (0..16).map(|j| increment_covariance(&k, 0.02, j as f64 * 0.25, 0.25)).sum();
    close(sum, analytic_covariance(&k, 0.02, 4.0), 1e-10);
}

#[test]
fn circle_series_values() {
    close(CircleField::covariance(64, false, 0.3), 2.460_376_649_935_740_7, 1e-12);
    close(CircleField::covariance(64, true, 0.3), 1.230_188_324_967_870_3, 1e-12);
    close(harmonic_number(100), 5.187_377_517_639_620_3, 1e-13);
}

#[test]
fn closed_form_targets() {
    close(meander_exact(1.0), 4.477_051_811_703_694_5, 1e-12);
    close(meander_exact(2.0), 37.200_495_422_252_305, 1e-10);
    close(recentring(2, 6.0), 10.656_180_398_078_959, 1e-12);
    close(recentring(1, 9.0), 10.397_413_463_721_576, 1e-12);
    close(GUMBEL_MEDIAN_TARGET, 1.442_695_040_888_963_4, 1e-15);
    close(SH_TARGET, 0.797_884_560_802_865_4, 1e-15);
    close(tail_target(1.0, 1), 0.564_189_583_547_756_3, 1e-15);
    close(chaoslab::fields::bridge_factor(1.0, 2.0, 0.5), 0.999_664_537_372_097_5, 1e-15);
}

#[test]
fn stream_key_layout_is_frozen() {
    let b = StreamKey::new(0x0102, Tag::Brw, 7).with_level(3).bytes();
    let mut want = [0u8; 32];
    want[0] = 2;
    want[1] = 1;
    want[8] = Tag::Brw as u8;
    want[16] = 7;
    want[24] = 3;
    assert_eq!(b, want);
}
