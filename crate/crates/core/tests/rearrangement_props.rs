mod common;

use common::{log_concave, nested_step};
use lcentropy::rearrangement::Rearrange;
use lcentropy::{DensityStats, PiecewiseExpAffineDensity, StepDensity};
use proptest::prelude::*;

fn lc_density() -> impl Strategy<Value = PiecewiseExpAffineDensity> {
    (1usize..6)
        .prop_flat_map(|k| {
            (
                -3.0f64..3.0,
                prop::collection::vec(0.1f64..3.0, k),
                prop::collection::vec(-4.0f64..4.0, k),
            )
        })
        .prop_map(|(start, lengths, slopes)| log_concave(start, &lengths, &slopes))
}

fn step_density() -> impl Strategy<Value = StepDensity> {
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

fn assert_equimeasurable<D: DensityStats>(d: &D, r: &D) -> Result<(), TestCaseError> {
    prop_assert!((r.mass() - 1.0).abs() < 1e-10);
    prop_assert!((r.shannon_entropy().unwrap() - d.shannon_entropy().unwrap()).abs() < 1e-10);
    for alpha in [0.0, 0.5, 2.0, f64::INFINITY] {
        let (a, b) = (d.renyi_entropy(alpha).unwrap(), r.renyi_entropy(alpha).unwrap());
        prop_assert!((a - b).abs() < 1e-10, "alpha={}: {} vs {}", alpha, a, b);
    }
    prop_assert!(r.variance().unwrap() >= d.variance().unwrap() - 1e-10);
    Ok(())
}

proptest! {
    #[test]
    fn log_concave_rearrangement_is_equimeasurable(d in lc_density()) {
        let r = d.decreasing_rearrangement().unwrap();
        assert_equimeasurable(&d, &r)?;
        prop_assert_eq!(r.support().lo(), 0.0);
        prop_assert!((r.support().len() - d.support().len()).abs() < 1e-10);
        prop_assert!(r.log_concavity().holds());
        let knots: Vec<f64> = r.segments().iter().flat_map(|s| [s.value_lo(), s.value_hi()]).collect();
        prop_assert!(knots.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn superlevel_sets_keep_their_measure(d in lc_density(), u in 0.01f64..0.99) {
        let r = d.decreasing_rearrangement().unwrap();
        let level = u * d.sup();
        let (a, b) = (d.superlevel_measure(level).unwrap(), r.superlevel_measure(level).unwrap());
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a));
    }

    #[test]
    fn moments_shrink_on_the_half_line(d in lc_density()) {
        let d = d.affine_transform(1.0, -d.support().lo()).unwrap();
        let r = d.decreasing_rearrangement().unwrap();
        prop_assert!(r.moment(1).unwrap() <= d.moment(1).unwrap() + 1e-10);
        prop_assert!(r.moment(2).unwrap() <= d.moment(2).unwrap() + 1e-10);
    }

    #[test]
    fn step_rearrangement_is_equimeasurable(s in step_density()) {
        let r = s.decreasing_rearrangement().unwrap();
        assert_equimeasurable(&s, &r)?;
        prop_assert!(r.pieces().iter().all(|p| p.interval.lo() == 0.0));
        let shifted = s.affine_transform(1.0, -s.support().lo()).unwrap();
        prop_assert!(r.moment(1).unwrap() <= shifted.moment(1).unwrap() + 1e-10);
        prop_assert!(r.moment(2).unwrap() <= shifted.moment(2).unwrap() + 1e-10);
    }

    #[test]
    fn rearranging_twice_changes_nothing(d in lc_density()) {
        let once = d.decreasing_rearrangement().unwrap();
        let twice = once.decreasing_rearrangement().unwrap();
        prop_assert_eq!(once.segments().len(), twice.segments().len());
        for (a, b) in once.segments().iter().zip(twice.segments()) {
            prop_assert!((a.slope() - b.slope()).abs() < 1e-9 * (1.0 + a.slope().abs()));
            prop_assert!((a.interval().hi() - b.interval().hi()).abs() < 1e-9);
        }
    }
}
