use frame_shadows::frame::{
    brute_force_min_variance_oracle, frame_superop, min_variance_dual, random_valid_dual, ConstraintGeometry,
};
use frame_shadows::operator_space::{random_density_matrix, random_traceless_observable};
use frame_shadows::povm::Povm;
use frame_shadows::variance::variance_exact;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn conditioned(d: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Povm<f64> {
    loop {
        let p = Povm::random_rank1(d, outcomes, rng).unwrap();
        let spec = frame_superop(&p).unwrap().spectrum().to_vec();
        if spec[spec.len() - 1] > 1e-4 * spec[0] {
            return p;
        }
    }
}

const CONFIGS: [(usize, usize); 5] = [(2, 4), (2, 6), (2, 10), (3, 9), (3, 12)];

#[test]
fn oracle_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for trial in 0..20 {
        let (d, l) = CONFIGS[trial % CONFIGS.len()];
        let p = conditioned(d, l, &mut rng);
        let prior = random_density_matrix::<f64, _>(d, &mut rng);
        let closed = min_variance_dual(&p, &prior, None).unwrap();
        let oracle = brute_force_min_variance_oracle(&p, &prior, None).unwrap();
        for (a, b) in closed.elements().iter().zip(oracle.elements()) {
            assert!(a.max_abs_diff(b) < 1e-6, "trial {trial}: {}", a.max_abs_diff(b));
        }

        let o = random_traceless_observable::<f64, _>(d, &mut rng);
        let by_obs = brute_force_min_variance_oracle(&p, &prior, Some(&o)).unwrap();
        let want = closed.estimator_values(&o).unwrap();
        let got = by_obs.estimator_values(&o).unwrap();
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-6, "trial {trial}");
        }
        assert!(by_obs.reconstruction_defect(&p).unwrap() < 1e-8);

        let probs = p.outcome_probabilities(&prior).unwrap();
        let best = closed.delta_sq(&probs).unwrap();
        let best_var = variance_exact(&p, &closed, &prior, &o).unwrap();
        for _ in 0..10 {
            let other = random_valid_dual(&p, &closed, 0.5, &mut rng).unwrap();
            assert!(other.delta_sq(&probs).unwrap() >= best - 1e-9);
            assert!(variance_exact(&p, &other, &prior, &o).unwrap() >= best_var - 1e-9);
        }
    }
}

#[test]
fn geometry_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (d, l) in CONFIGS {
        let p = conditioned(d, l, &mut rng);
        let g = ConstraintGeometry::new(&p).unwrap();
        assert_eq!(g.rank(), d * d);
        assert_eq!(g.nullity(), l - d * d);
    }
}
