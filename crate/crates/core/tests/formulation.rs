mod common;

use common::{formulation_residuals, reduced_stack_singular_values, relative_nullity, Fixture};

#[test]
fn stacked_systems_vanish_at_ground_truth() {
    for seed in 0..5 {
        let fx = Fixture::new(seed, 10);
        for (name, r) in formulation_residuals(&fx) {
            assert!(r < 1e-10, "seed {seed}: {name} residual {r:e}");
        }
    }
}

#[test]
fn reduced_axyb_stack_has_nullity_two() {
    for seed in 0..5 {
        let s = reduced_stack_singular_values(&Fixture::new(seed, 10));
        assert_eq!(s.len(), 12);
        assert_eq!(relative_nullity(&s, 1e-8), 2, "seed {seed}: {s:?}");
    }
}
