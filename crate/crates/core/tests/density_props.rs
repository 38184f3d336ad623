mod common;

use common::{log_concave, nested_step};
use lcentropy::applications::{log_ratio, relative_entropy_to_gaussian, max_gaussian_distance};
use lcentropy::{mixture_variance, Density, DensityStats, GridDensity, PiecewiseExpAffineDensity};
use proptest::prelude::*;

fn lc_density() -> impl Strategy<Value = PiecewiseExpAffineDensity> {
    (1usize..5)
        .prop_flat_map(|k| {
            (
                -3.0f64..3.0,
                prop::collection::vec(0.1f64..3.0, k),
                prop::collection::vec(-4.0f64..4.0, k),
            )
        })
        .prop_map(|(start, lengths, slopes)| log_concave(start, &lengths, &slopes))
}

fn step_density() -> impl Strategy<Value = lcentropy::StepDensity> {
    (1usize..6)
        .prop_flat_map(|k| {
            (
                -2.0f64..2.0,
                0.3f64..5.0,
                prop::collection::vec((0.01f64..0.45, 0.01f64..0.45), k - 1),
                prop::collection::vec(0.05f64..1.0, k),
            )
        })
        .prop_map(|(lo, len, cuts, weights)| nested_step(lo, len, &cuts, &weights))
}

fn sampled(d: &PiecewiseExpAffineDensity, points: usize) -> GridDensity {
    let s = d.support();
    GridDensity::sample(s.lo(), s.hi(), points, |t| d.value(t)).unwrap()
}

proptest! {
    #[test]
    fn gap_is_nonnegative_for_log_concave(d in lc_density()) {
        prop_assert!(d.entropy_variance_gap().unwrap() >= -1e-9);
        let dist = relative_entropy_to_gaussian(&d).unwrap();
        prop_assert!(dist <= max_gaussian_distance() + 1e-9);
        prop_assert!(dist >= -1e-9);
    }

    #[test]
    fn closed_forms_agree_with_quadrature(d in lc_density()) {
        let g = sampled(&d, 20_001);
        prop_assert!((g.mass() - 1.0).abs() < 1e-6);
        let exact = d.stats().unwrap();
        let approx = g.normalize().unwrap().stats().unwrap();
        prop_assert!((approx.mean - exact.mean).abs() < 1e-5);
        prop_assert!((approx.variance - exact.variance).abs() < 1e-5 * exact.variance.max(1.0));
        prop_assert!((approx.shannon_entropy - exact.shannon_entropy).abs() < 1e-5);
    }

    #[test]
    fn renyi_is_non_increasing_and_obeys_bounds(d in lc_density(), q in 0.2f64..4.0, extra in 0.0f64..4.0) {
        let p = q + extra;
        let hq = d.renyi_entropy(q).unwrap();
        let hp = d.renyi_entropy(p).unwrap();
        prop_assert!(hp <= hq + 1e-10);
        prop_assert!(hq - hp <= log_ratio(q) - log_ratio(p) + 1e-9);
        let floor = 0.5 * d.variance().unwrap().ln();
        if p > 1.0 {
            prop_assert!(hp >= floor + log_ratio(p) - 1e-9);
        }
        let h_inf = d.renyi_entropy(f64::INFINITY).unwrap();
        prop_assert!((h_inf + d.sup().ln()).abs() < 1e-12);
        prop_assert!(h_inf <= hp + 1e-10);
    }

    #[test]
    fn renyi_tends_to_shannon(d in lc_density()) {
        let h = d.shannon_entropy().unwrap();
        for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
            prop_assert!((d.renyi_entropy(alpha).unwrap() - h).abs() < 1e-4);
        }
        prop_assert_eq!(d.renyi_entropy(1.0).unwrap(), h);
    }

    #[test]
    fn affine_maps_shift_entropy_and_scale_variance(d in lc_density(), scale in -3.0f64..3.0, shift in -5.0f64..5.0) {
        prop_assume!(scale.abs() > 0.1);
        let t = d.affine_transform(scale, shift).unwrap();
        let h = d.shannon_entropy().unwrap();
        prop_assert!((t.shannon_entropy().unwrap() - h - scale.abs().ln()).abs() < 1e-9);
        let v = d.variance().unwrap();
        prop_assert!((t.variance().unwrap() - scale * scale * v).abs() < 1e-9 * (1.0 + scale * scale * v));
        prop_assert!((t.entropy_variance_gap().unwrap() - d.entropy_variance_gap().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn step_variance_is_mixture_variance(s in step_density()) {
        let direct = s.variance().unwrap();
        let mixed = mixture_variance(&s.components()).unwrap();
        prop_assert!((direct - mixed).abs() < 1e-10 * direct.max(1.0));
        prop_assert!((s.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_enum_dispatches(d in lc_density()) {
        let e: Density = d.clone().into();
        prop_assert_eq!(e.stats().unwrap(), d.stats().unwrap());
        prop_assert!(e.is_log_concave());
    }
}
