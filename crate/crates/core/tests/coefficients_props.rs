use ife1d::{rhs_for, ManufacturedSolution, PiecewiseConstantCoefficient, Side};
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = PiecewiseConstantCoefficient> {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec(0.05f64..0.95, k),
                proptest::collection::vec(-2.0f64..3.0, k + 1),
            )
        })
        .prop_filter_map("interfaces too close", |(mut breaks, logs)| {
            breaks.sort_by(f64::total_cmp);
            if breaks.windows(2).any(|w| w[1] - w[0] < 0.01) {
                return None;
            }
            let values = logs.iter().map(|l| 10f64.powf(*l)).collect();
            PiecewiseConstantCoefficient::new((0.0, 1.0), breaks, values).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manufactured_solution_satisfies_jump_conditions(beta in coefficient()) {
        let u = ManufacturedSolution::cosine(beta.clone());
        for &alpha in beta.breakpoints() {
            let (l, r) = (u.value_side(alpha, Side::Left), u.value_side(alpha, Side::Right));
            prop_assert!((l - r).abs() < 1e-14 * (1.0 + l.abs()), "value jump {}", r - l);
            let (fl, fr) = (u.flux_side(alpha, Side::Left), u.flux_side(alpha, Side::Right));
            prop_assert!((fl - fr).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_matches_finite_differences(beta in coefficient(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let u = ManufacturedSolution::cosine(beta.clone());
        let f = rhs_for(&u, 0.0, 0.0);
        let h = 1e-3;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut checked = 0;
        while checked < 20 {
            let x: f64 = rng.gen_range(2.0 * h..1.0 - 2.0 * h);
            if beta.breakpoints().iter().any(|a| (a - x).abs() < 2.0 * h) {
                continue;
            }
            let b = beta.value(x);
            let second = (u.value(x + h) - 2.0 * u.value(x) + u.value(x - h)) / (h * h);
            let approx = -b * second;
            prop_assert!((approx - f(x)).abs() < 1e-4 * (1.0 + f(x).abs()), "x={} fd={} f={}", x, approx, f(x));
            checked += 1;
        }
    }
}
