use proptest::prelude::*;

use ptlab::face_census::{enumerate_faces, FaceRestriction};
use ptlab::l1lab::{basis_pursuit, face_survives, gaussian_instance, sample_simple_signal, BpOptions};
use ptlab::models::{
    block_subspace_count, catalan, enumerate_block_supports, enumerate_tree_supports, log_binomial,
    tree_subspace_bound, ProblemSize,
};
use ptlab::thresholds::{delta_of_rho, rho_of_delta, ThresholdParams};
use ptlab::{Error, SparsityModel, TreeRegime};

fn any_model() -> impl Strategy<Value = SparsityModel> {
    prop_oneof![
        Just(SparsityModel::Simple),
        (0.05f64..=1.0).prop_map(|z| SparsityModel::block_fraction(z).unwrap()),
        Just(SparsityModel::Tree(TreeRegime::SmallK)),
        Just(SparsityModel::Tree(TreeRegime::LargeK)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_count_matches_enumeration((n, k, c) in (1usize..=14).prop_flat_map(|n| (Just(n), 1..=n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), 1..=k)))
    {
        let formula = block_subspace_count(n, k, c).unwrap().exact().unwrap();
        prop_assert_eq!(formula, enumerate_block_supports(n, k, c).unwrap().len() as u128);
    }

    #[test]
    fn catalan_within_tree_bound(k in 1usize..=9, extra in 0u32..=2) {
        let depth = k as u32 + extra;
        let listed = enumerate_tree_supports(depth, k).unwrap().len() as u128;
        prop_assert_eq!(Some(listed), catalan(k as u64));
        let (ln_bound, _) = tree_subspace_bound(1u64 << depth, k as u64).unwrap();
        prop_assert!((listed as f64).ln() <= ln_bound + 1e-12);
    }

    #[test]
    fn threshold_round_trip(model in any_model(), rho in 1e-3f64..0.45) {
        let p = ThresholdParams::default();
        let delta = delta_of_rho(&model, rho, &p).unwrap();
        let back = rho_of_delta(&model, delta, &p).unwrap();
        prop_assert!((back - rho).abs() <= 1e-8, "{} -> {} -> {}", rho, delta, back);
    }

    #[test]
    fn fewer_clusters_raise_the_threshold(z1 in 0.05f64..1.0, gap in 0.01f64..0.5, delta in 1e-3f64..0.2) {
        let z2 = (z1 + gap).min(1.0);
        prop_assume!(z2 > z1);
        let p = ThresholdParams::default();
        let r1 = rho_of_delta(&SparsityModel::block_fraction(z1).unwrap(), delta, &p);
        let r2 = rho_of_delta(&SparsityModel::block_fraction(z2).unwrap(), delta, &p).unwrap();
        match r1 {
            Ok(r1) => prop_assert!(r1 > r2),
            // no root below 1/2 means the threshold sits above it
            Err(Error::NoTransition { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn log_binomial_is_symmetric(n in 0i64..5000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).round() as i64;
        let a = log_binomial(n, k).unwrap();
        let b = log_binomial(n, n - k).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn basis_pursuit_is_positively_homogeneous(seed in 0u64..1000, scale in 0.01f64..100.0) {
        let inst = gaussian_instance(ProblemSize::new(30, 15, 3).unwrap(), seed);
        let s = sample_simple_signal(30, 3, seed + 7).unwrap();
        let y = inst.measure(&s.coefficients);
        let opts = BpOptions::default();
        let base = basis_pursuit(&inst, &y, &opts).unwrap();
        let scaled_y: Vec<f64> = y.iter().map(|v| v * scale).collect();
        let scaled = basis_pursuit(&inst, &scaled_y, &opts).unwrap();
        let norm = base.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = base.x.iter().zip(&scaled.x).map(|(a, b)| (a * scale - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-6 * scale * norm.max(1e-12), "diff {}", diff);
    }
}

#[test]
fn survival_is_sign_symmetric() {
    for n_amb in 2..=6 {
        for n in 1..=n_amb {
            let inst = gaussian_instance(ProblemSize::new(n_amb, n, 0).unwrap(), (n_amb * 10 + n) as u64);
            for k in 0..n_amb {
                for face in enumerate_faces(n_amb, k, FaceRestriction::All).unwrap() {
                    let a = face_survives(&inst, &face).unwrap();
                    let b = face_survives(&inst, &face.negated()).unwrap();
                    assert_eq!(a.survives, b.survives, "N={n_amb} n={n} face {face:?}");
                }
            }
        }
    }
}

#[test]
fn objective_never_exceeds_truth() {
    for seed in 0..30u64 {
        let inst = gaussian_instance(ProblemSize::new(50, 20, 8).unwrap(), seed);
        let s = sample_simple_signal(50, 8, 100 + seed).unwrap();
        let sol = basis_pursuit(&inst, &inst.measure(&s.coefficients), &BpOptions::default()).unwrap();
        assert!(sol.l1_norm() <= s.l1_norm() + 1e-8, "seed {seed}");
    }
}
