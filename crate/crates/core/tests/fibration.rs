mod common;

use hypernet::admissible::random_probe_library;
use hypernet::fibration::{check_semiconjugacy, check_semiconjugacy_exact, r_phi, FibrationError};
use hypernet::partition::{enumerate_balanced, refining_partitions};
use hypernet::poly::int;
use hypernet::{check_fibration, is_balanced, quotient, AdmissibleSystem, FibrationMap, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_map_is_a_surjective_fibration(seed in any::<u64>()) {
        let net = common::small_net(seed);
        for p in refining_partitions(&net, 12).unwrap() {
            match quotient(&net, &p) {
                Ok(q) => {
                    let report = check_fibration(&net, &q.quotient, &q.phi);
                    prop_assert!(report.is_fibration(), "{}", report);
                    prop_assert!(q.phi.is_surjective(&q.quotient));
                    prop_assert_eq!(q.quotient.vertex_count(), p.num_colours());
                }
                Err(FibrationError::NotBalanced(_)) => prop_assert!(!is_balanced(&net, &p).is_balanced()),
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }

    #[test]
    fn quotient_dynamics_are_semiconjugate(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in enumerate_balanced(&net, 12).unwrap() {
            let q = quotient(&net, &p).unwrap();
            let lib = random_probe_library(&net, 3, &mut rng);
            let big = AdmissibleSystem::new(net.clone(), lib.clone()).unwrap();
            let small = AdmissibleSystem::new(q.quotient.clone(), lib).unwrap();
            let dim = q.quotient.total_dim();
            let exact: Vec<Vec<Rational>> = (0..5).map(|_| (0..dim).map(|_| int(rng.gen_range(-9..=9))).collect()).collect();
            prop_assert!(check_semiconjugacy_exact(&big, &small, &q.phi, &exact, &int(1)).unwrap());

            // Restriction to Syn_P, in floating point.
            let r = r_phi(&net, &q.quotient, &q.phi).unwrap();
            let floats: Vec<Vec<f64>> = (0..5).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let report = check_semiconjugacy(&big, &small, &q.phi, &floats, 0.5, 1e-12).unwrap();
            prop_assert!(report.holds, "{:?}", report);
            for y in &floats {
                let x = r.apply(y);
                for v in 0..net.vertex_count() {
                    let u = p.classes()[p.colour(v) - 1][0];
                    prop_assert_eq!(x[net.offset(v)], x[net.offset(u)]);
                }
            }
        }
    }

    #[test]
    fn sub_hypernetwork_inclusion_is_a_fibration(seed in any::<u64>(), pick in any::<usize>()) {
        let net = common::small_net(seed);
        let v = pick % net.vertex_count();
        // Smallest input-closed set containing v.
        let mut keep = vec![v];
        let mut i = 0;
        while i < keep.len() {
            for &e in net.in_edges(keep[i]) {
                for &s in net.sources(e) {
                    if !keep.contains(&s) {
                        keep.push(s);
                    }
                }
            }
            i += 1;
        }
        let ids: Vec<&str> = keep.iter().map(|&u| net.vertex(u).id.as_str()).collect();
        let sub = net.sub_hypernetwork(&ids).unwrap();
        let report = check_fibration(&sub, &net, &FibrationMap::inclusion(&sub));
        prop_assert!(report.is_fibration(), "{}", report);
    }
}
