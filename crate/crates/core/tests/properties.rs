mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use privgame::harness;
use privgame::prob::{entropy, mutual_information, Axis};
use privgame::{solver, FiniteSpace, Pmf2, ReceiverPolicy, SenderPolicy, SolverSettings};

use common::*;

fn pmf2(rows: usize, cols: usize, w: &[f64]) -> Pmf2 {
    let s: f64 = w.iter().sum();
    let p = w.iter().map(|v| v / s).collect();
    Pmf2::new(FiniteSpace::new(rows).unwrap(), FiniteSpace::new(cols).unwrap(), p).unwrap()
}

fn weights(max: usize) -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        // Zeros appear often enough to exercise the 0·ln 0 convention.
        let cell = prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0];
        (Just(r), Just(c), prop::collection::vec(cell, r * c))
    })
    .prop_filter("some mass", |(_, _, w)| w.iter().sum::<f64>() > 0.0)
}

fn mix(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| t * x + (1.0 - t) * y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn information_is_symmetric_nonnegative_and_bounded((r, c, w) in weights(5)) {
        let p = pmf2(r, c, &w);
        let i = mutual_information(&p).unwrap();
        let it = mutual_information(&p.transpose()).unwrap();
        prop_assert!(i >= 0.0);
        prop_assert!((i - it).abs() <= 1e-12);
        let bound = entropy(&p.row_marginal()).min(entropy(&p.col_marginal()));
        prop_assert!(i <= bound + 1e-12);
        prop_assert!((i - mi(p.as_slice(), r, c)).abs() <= 1e-12);
    }

    #[test]
    fn product_pmfs_carry_no_information(
        a in prop::collection::vec(0.01f64..1.0, 1..6),
        b in prop::collection::vec(0.01f64..1.0, 1..6),
    ) {
        let w: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let i = mutual_information(&pmf2(a.len(), b.len(), &w)).unwrap();
        prop_assert!(i.abs() <= 1e-12);
    }

    #[test]
    fn marginals_are_linear_and_normalized(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nx = rng.gen_range(2..=4);
        let nw = rng.gen_range(2..=4);
        let p = random_joint(&mut rng, nx, nw);
        let q = random_joint(&mut rng, nx, nw);
        let m = privgame::JointPXZW::new(
            FiniteSpace::new(nx).unwrap(),
            FiniteSpace::new(nw).unwrap(),
            mix(p.as_slice(), q.as_slice(), t),
        ).unwrap();
        for axes in [vec![Axis::X], vec![Axis::Z, Axis::W], vec![Axis::X, Axis::W]] {
            let mp = p.marginal(&axes).unwrap().p;
            let mq = q.marginal(&axes).unwrap().p;
            let mm = m.marginal(&axes).unwrap().p;
            prop_assert!((mm.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for (x, y) in mm.iter().zip(mix(&mp, &mq, t)) {
                prop_assert!((x - y).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn costs_match_loop_evaluation_and_bounds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let a = random_sender(&mut rng, g.sender_dims());
        let b = random_receiver(&mut rng, g.receiver_dims());
        let e = g.expected_distortion(&a, &b).unwrap();
        let z = g.leakage(&a).unwrap();
        prop_assert!((e - xi(&g, a.as_slice(), &b)).abs() <= 1e-12);
        prop_assert!((z - zeta(&g, a.as_slice())).abs() <= 1e-12);
        prop_assert!(e >= 0.0 && e <= g.distortion().max_entry() + 1e-12);
        prop_assert!(z >= 0.0 && z <= (g.ny().min(g.nw()) as f64).ln() + 1e-12);
        prop_assert!((g.potential(&a, &b).unwrap() - g.sender_cost(&a, &b).unwrap()).abs() <= 1e-15);
        prop_assert!((g.receiver_cost(&a, &b).unwrap() - e).abs() <= 1e-15);
    }

    #[test]
    fn distortion_is_bilinear_and_leakage_convex(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let (sd, rd) = (g.sender_dims(), g.receiver_dims());
        let (a1, a2) = (random_sender(&mut rng, sd), random_sender(&mut rng, sd));
        let (b1, b2) = (random_receiver(&mut rng, rd), random_receiver(&mut rng, rd));
        let am = SenderPolicy::new(sd, mix(a1.as_slice(), a2.as_slice(), t)).unwrap();
        let bm = ReceiverPolicy::new(rd, mix(b1.as_slice(), b2.as_slice(), t)).unwrap();
        let e = |a: &SenderPolicy, b: &ReceiverPolicy| g.expected_distortion(a, b).unwrap();
        prop_assert!((e(&am, &b1) - (t * e(&a1, &b1) + (1.0 - t) * e(&a2, &b1))).abs() <= 1e-12);
        prop_assert!((e(&a1, &bm) - (t * e(&a1, &b1) + (1.0 - t) * e(&a1, &b2))).abs() <= 1e-12);
        let z = |a: &SenderPolicy| g.leakage(a).unwrap();
        prop_assert!(z(&am) <= t * z(&a1) + (1.0 - t) * z(&a2) + 1e-12);
    }

    #[test]
    fn potential_tracks_unilateral_deviations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let (sd, rd) = (g.sender_dims(), g.receiver_dims());
        let (a1, a2) = (random_sender(&mut rng, sd), random_sender(&mut rng, sd));
        let (b1, b2) = (random_receiver(&mut rng, rd), random_receiver(&mut rng, rd));
        let psi = |a, b| g.potential(a, b).unwrap();
        let du = g.sender_cost(&a1, &b1).unwrap() - g.sender_cost(&a2, &b1).unwrap();
        let dv = g.receiver_cost(&a1, &b1).unwrap() - g.receiver_cost(&a1, &b2).unwrap();
        prop_assert!((du - (psi(&a1, &b1) - psi(&a2, &b1))).abs() <= 1e-10);
        prop_assert!((dv - (psi(&a1, &b1) - psi(&a1, &b2))).abs() <= 1e-10);
    }

    #[test]
    fn estimates_leak_no_more_than_messages(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let a = random_sender(&mut rng, g.sender_dims());
        let b = random_receiver(&mut rng, g.receiver_dims());
        let i_wx = mutual_information(&g.estimate_private_joint(&a, &b).unwrap()).unwrap();
        prop_assert!(i_wx <= g.leakage(&a).unwrap() + 1e-12);
    }

    #[test]
    fn best_responses_beat_random_policies(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let settings = SolverSettings::default();
        let a = random_sender(&mut rng, g.sender_dims());
        let b = random_receiver(&mut rng, g.receiver_dims());
        let br = solver::receiver_best_response(&g, &a).unwrap();
        prop_assert!(br.choices().is_some());
        prop_assert!(g.receiver_cost(&a, &br).unwrap() <= g.receiver_cost(&a, &b).unwrap() + 1e-15);
        let sr = solver::sender_best_response(&g, &b, &settings).unwrap();
        // Slow instances may stop at the iteration cap; the flag must then
        // be honest about the remaining gap.
        prop_assert_eq!(sr.converged, sr.stationarity_gap <= settings.grad_tol);
        prop_assert!(sr.cost <= g.sender_cost(&a, &b).unwrap() + 1e-9);
        if let Some(bound) = solver::sender_suboptimality_bound(&g, &a, &b).unwrap() {
            let gap = g.sender_cost(&a, &b).unwrap() - sr.cost;
            prop_assert!(gap <= bound + 1e-9);
        }
    }

    #[test]
    fn policy_files_round_trip_bit_exactly(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = any_game(&mut rng);
        let a = random_sender(&mut rng, g.sender_dims());
        let b = random_receiver(&mut rng, g.receiver_dims());
        let a2 = harness::sender_policy_from_json(&harness::sender_policy_to_json(&a).unwrap()).unwrap();
        let b2 = harness::receiver_policy_from_json(&harness::receiver_policy_to_json(&b).unwrap()).unwrap();
        prop_assert!(a.as_slice().iter().zip(a2.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        prop_assert!(b.as_slice().iter().zip(b2.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));

        let (mg, _) = random_two_sender(&mut rng);
        let alphas: Vec<_> = (0..2).map(|i| random_sender(&mut rng, mg.sender_dims(i))).collect();
        let mb = random_multi_receiver(&mut rng, mg.nx(), mg.y_dims());
        let alphas2 = harness::sender_policies_from_json(&harness::sender_policies_to_json(&alphas).unwrap()).unwrap();
        let mb2 = harness::multi_receiver_policy_from_json(&harness::multi_receiver_policy_to_json(&mb).unwrap()).unwrap();
        prop_assert_eq!(alphas, alphas2);
        prop_assert!(mb.as_slice().iter().zip(mb2.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn configs_round_trip_bit_exactly(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, nw) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let p = simplex(&mut rng, nx * nx * nw);
        let nested: Vec<Vec<Vec<f64>>> = p.chunks(nx * nw).map(|b| b.chunks(nw).map(<[f64]>::to_vec).collect()).collect();
        let text = serde_json::json!({
            "schema_version": 1,
            "mode": "single",
            "x_size": nx,
            "w_size": nw,
            "joint": nested,
            "rho": {"start": rng.gen_range(0.0..0.5), "stop": rng.gen_range(0.5..2.0), "steps": 7},
            "solver": {"grad_tol": rng.gen_range(1e-10..1e-8)},
            "seed": rng.gen::<u64>(),
        }).to_string();
        let cfg = harness::load_config(&text).unwrap();
        let again = harness::load_config(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(&cfg, &again);
        let g = again.single_game(0.0).unwrap();
        prop_assert!(g.joint().as_slice().iter().zip(&p).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
