mod common;

use std::collections::BTreeMap;

use hypernet::admissible::{
    embed_colours, eval_at_slots, eval_symbolic_on_syn, example58_library, permute_blocks, random_probe_library,
    random_probe_response, Colour, ResponseFunction,
};
use hypernet::partition::enumerate_balanced;
use hypernet::poly::int;
use hypernet::{gallery, AdmissibleSystem, Hyperedge, Hypernetwork, InputSchema, Rational, ResponseLibrary};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ints(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(-9..=9))).collect()
}

/// The same hypernetwork with hyperedge ids reversed, so every vertex is
/// fed its in-edges in a different order.
fn reversed_ids(net: &Hypernetwork) -> Hypernetwork {
    let n = net.edge_count();
    let edges: Vec<Hyperedge> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(i, h)| Hyperedge { id: format!("z{:03}", n - i), ..h.clone() })
        .collect();
    Hypernetwork::new(net.name(), net.vertices().to_vec(), edges).unwrap()
}

fn add_libraries(a: &ResponseLibrary, b: &ResponseLibrary) -> ResponseLibrary {
    a.iter()
        .map(|(t, r)| {
            let (p, q) = (r.as_polynomial().unwrap(), b[t].as_polynomial().unwrap());
            (t.clone(), ResponseFunction::Polynomial(p.iter().zip(q).map(|(x, y)| x + y).collect()))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probe_responses_are_block_invariant(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for schema in InputSchema::all(&net).values() {
            let f = random_probe_response(schema, 3, &mut rng);
            for _ in 0..50 {
                let values: BTreeMap<_, _> = schema.slots().into_iter().map(|s| (s, int(rng.gen_range(-9..=9)))).collect();
                for g in &schema.groups {
                    let mut perm: Vec<usize> = (0..g.count).collect();
                    perm.rotate_left(1);
                    let moved = permute_blocks(&values, &g.etype, &perm);
                    for p in &f {
                        prop_assert_eq!(eval_at_slots(p, &values), eval_at_slots(p, &moved));
                    }
                }
            }
        }
    }

    #[test]
    fn polynomial_eval_ignores_feeding_order(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let lib = random_probe_library(&net, 3, &mut rng);
        let a = AdmissibleSystem::new(net.clone(), lib.clone()).unwrap();
        let b = AdmissibleSystem::new(reversed_ids(&net), lib).unwrap();
        for _ in 0..10 {
            let x = random_ints(&mut rng, net.total_dim());
            prop_assert_eq!(a.eval_exact(&x, &int(2)).unwrap(), b.eval_exact(&x, &int(2)).unwrap());
        }
    }

    #[test]
    fn eval_is_linear_in_the_library(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let (l1, l2) = (random_probe_library(&net, 3, &mut rng), random_probe_library(&net, 3, &mut rng));
        let s1 = AdmissibleSystem::new(net.clone(), l1.clone()).unwrap();
        let s2 = AdmissibleSystem::new(net.clone(), l2.clone()).unwrap();
        let sum = AdmissibleSystem::new(net.clone(), add_libraries(&l1, &l2)).unwrap();
        for _ in 0..10 {
            let x = random_ints(&mut rng, net.total_dim());
            let lambda = int(rng.gen_range(-3..=3));
            let (a, b) = (s1.eval_exact(&x, &lambda).unwrap(), s2.eval_exact(&x, &lambda).unwrap());
            let c = sum.eval_exact(&x, &lambda).unwrap();
            prop_assert_eq!(c, a.iter().zip(&b).map(|(p, q)| p + q).collect::<Vec<_>>());
        }
    }

    #[test]
    fn symbolic_restriction_matches_eval(seed in any::<u64>()) {
        let net = common::small_net(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let lib: ResponseLibrary = random_probe_library(&net, 3, &mut rng)
            .into_iter()
            .map(|(t, r)| {
                // Drop lambda so the restriction is parameter free.
                let p = r.as_polynomial().unwrap()[0].substitute(|s| match s {
                    hypernet::Slot::Lambda => hypernet::Polynomial::zero(),
                    other => hypernet::Polynomial::var(other.clone()),
                });
                (t, ResponseFunction::scalar(p))
            })
            .collect();
        let sys = AdmissibleSystem::new(net.clone(), lib).unwrap();
        for p in enumerate_balanced(&net, 12).unwrap().iter().chain(hypernet::partition::refining_partitions(&net, 12).unwrap().iter()) {
            let restricted = eval_symbolic_on_syn(&sys, p).unwrap();
            for _ in 0..5 {
                let z = random_ints(&mut rng, p.num_colours());
                let x = embed_colours(p, &z);
                let f = sys.eval_exact(&x, &int(0)).unwrap();
                for v in 0..net.vertex_count() {
                    prop_assert_eq!(&restricted[v].eval(|c: &Colour| z[c.0 - 1].clone()), &f[v]);
                }
            }
        }
    }
}

#[test]
fn example_responses_ignore_feeding_order() {
    let net = gallery::running_example();
    let a = AdmissibleSystem::new(net.clone(), example58_library()).unwrap();
    let b = AdmissibleSystem::new(reversed_ids(&net), example58_library()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(58);
    for _ in 0..50 {
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda = rng.gen_range(-0.03..0.03);
        let (fa, fb) = (a.eval(&x, lambda).unwrap(), b.eval(&x, lambda).unwrap());
        for (p, q) in fa.iter().zip(&fb) {
            assert!((p - q).abs() <= 1e-12, "{p} vs {q}");
        }
    }
}

#[test]
fn example_responses_ignore_hyperedge_permutations() {
    // Permuting which source tuple each h-edge carries, within one target,
    // is a block permutation of the square cells' inputs.
    let net = gallery::running_example();
    let base = AdmissibleSystem::new(net.clone(), example58_library()).unwrap();
    let hs: Vec<usize> = (0..net.edge_count()).filter(|&e| net.edge(e).etype == "h").collect();
    let mut rng = ChaCha8Rng::seed_from_u64(85);
    let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f0 = base.eval(&x, 0.01).unwrap();
    for perm in hs.iter().permutations(hs.len()).take(120) {
        let mut edges = net.edges().to_vec();
        let ok = hs.iter().zip(&perm).all(|(&e, &&g)| net.edge(e).target == net.edge(g).target);
        if !ok {
            continue;
        }
        for (&e, &&g) in hs.iter().zip(&perm) {
            edges[e].sources = net.edge(g).sources.clone();
        }
        let moved = Hypernetwork::new("p", net.vertices().to_vec(), edges).unwrap();
        let f = AdmissibleSystem::new(moved, example58_library()).unwrap().eval(&x, 0.01).unwrap();
        for (p, q) in f0.iter().zip(&f) {
            assert!((p - q).abs() <= 1e-12);
        }
    }
}
