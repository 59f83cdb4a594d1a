mod common;

use std::collections::BTreeMap;

use hypernet::admissible::{eval_symbolic_on_syn, Colour};
use hypernet::partition::{census, refining_partitions};
use hypernet::poly::int;
use hypernet::synchrony::{attune, is_attuned, monomial, seq_compare, witness_response, SeqOrder};
use hypernet::{find_breaking_witness, is_balanced, robust_verdict, Monomial, Perm, Polynomial, Rational, Signature};
use itertools::Itertools;
use proptest::prelude::*;

fn signatures(m: usize, colours: usize) -> impl Iterator<Item = Signature> {
    (0..m).map(move |_| 1..=colours).multi_cartesian_product().map(Signature)
}

/// Sort key putting `b` before `a` whenever `b ≻ a`: colour counts from the
/// top colour down.
fn dominance_key(a: &Signature, colours: usize) -> Vec<usize> {
    (2..=colours).rev().map(|c| a.colours().iter().filter(|&&x| x == c).count()).collect()
}

/// Recovers the signature counts of one edge type at one vertex from the
/// restricted witness polynomials `Σ_a n_a M^σ_a`, one per `σ`.
fn reconstruct(phi: &BTreeMap<Perm, Polynomial<Colour>>, m: usize, colours: usize) -> BTreeMap<Signature, usize> {
    let mut order: Vec<Signature> = signatures(m, colours).collect();
    order.sort_by_key(|a| std::cmp::Reverse(dominance_key(a, colours)));
    let mut found: BTreeMap<Signature, usize> = BTreeMap::new();
    for a in order {
        let tau = attune(&a);
        let target: Monomial<Colour> = monomial(&a, &tau);
        let mut n = phi[&tau].coefficient(&target);
        for (b, &k) in &found {
            if *b != a && monomial(b, &tau) == target {
                n -= int(k as i64);
            }
        }
        assert!(n.is_integer() && n >= int(0), "negative count for {a}");
        let n = n.to_integer().try_into().unwrap();
        if n > 0 {
            found.insert(a, n);
        }
    }
    found
}

#[test]
fn attune_is_attuned_by_direct_check() {
    for m in 1..=5 {
        for colours in 1..=4 {
            for a in signatures(m, colours) {
                let tau = attune(&a);
                let c = a.colours();
                for i in 0..m {
                    for j in 0..m {
                        if c[i] > c[j] {
                            assert!(tau.apply(i) > tau.apply(j), "{a}: {tau}");
                        }
                    }
                }
                assert!(is_attuned(&a, &tau));
            }
        }
    }
}

#[test]
fn attuned_collisions_come_from_dominating_signatures() {
    for m in 1..=4 {
        for colours in 1..=3 {
            for a in signatures(m, colours) {
                let tau = attune(&a);
                for b in signatures(m, colours).filter(|b| *b != a) {
                    if monomial(&b, &tau) == monomial(&a, &tau) {
                        assert_eq!(seq_compare(&b, &a).unwrap(), SeqOrder::Greater, "a={a} b={b}");
                        assert_eq!(seq_compare(&a, &b).unwrap(), SeqOrder::Less);
                    }
                }
            }
        }
    }
}

#[test]
fn parity_matches_inversion_count() {
    for n in 0..=6 {
        for p in Perm::all(n) {
            let im = p.images();
            let inversions = (0..n).tuple_combinations().filter(|&(i, j)| im[i] > im[j]).count();
            assert_eq!(p.parity() as usize, inversions % 2, "{p}");
            assert_eq!(p.compose(&p.inverse()), Perm::identity(n));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_restrictions_determine_the_census(seed in any::<u64>()) {
        let net = common::small_net(seed);
        for p in refining_partitions(&net, 12).unwrap() {
            let c = census(&net, &p).unwrap();
            for etype in net.edge_types() {
                let m = net.edges().iter().find(|h| h.etype == etype).unwrap().order();
                let mut phi: Vec<BTreeMap<Perm, Polynomial<Colour>>> = vec![BTreeMap::new(); net.vertex_count()];
                for sigma in Perm::all(m) {
                    let sys = witness_response(&net, etype, &sigma).unwrap();
                    for (v, poly) in eval_symbolic_on_syn(&sys, &p).unwrap().into_iter().enumerate() {
                        phi[v].insert(sigma.clone(), poly);
                    }
                }
                for v in 0..net.vertex_count() {
                    let want: BTreeMap<Signature, usize> = c
                        .at(v)
                        .iter()
                        .filter(|((t, _), _)| t == etype)
                        .map(|((_, s), &n)| (s.clone(), n))
                        .collect();
                    prop_assert_eq!(reconstruct(&phi[v], m, p.num_colours()), want);
                }
            }
        }
    }

    #[test]
    fn witnesses_separate_exactly_the_unbalanced_partitions(seed in any::<u64>()) {
        let net = common::small_net(seed);
        for p in refining_partitions(&net, 12).unwrap() {
            let balanced = is_balanced(&net, &p).is_balanced();
            match find_breaking_witness(&net, &p) {
                None => prop_assert!(balanced),
                Some(w) => {
                    prop_assert!(!balanced);
                    prop_assert!(p.same_class(w.first, w.second));
                    prop_assert_ne!(&w.first_value, &w.second_value);
                    let sys = witness_response(&net, &w.etype, &w.sigma).unwrap();
                    let x: Vec<_> = w.state(&net, &p).into_iter().map(int).collect();
                    let f = sys.eval_exact(&x, &int(0)).unwrap();
                    let (a, b) = (&f[net.offset(w.first)], &f[net.offset(w.second)]);
                    prop_assert_eq!(a, &Rational::from_integer(w.first_value.clone()));
                    prop_assert_eq!(b, &Rational::from_integer(w.second_value.clone()));
                }
            }
        }
    }

    #[test]
    fn verdicts_are_consistent(seed in any::<u64>()) {
        let net = common::small_net(seed);
        for p in refining_partitions(&net, 12).unwrap() {
            let v = robust_verdict(&net, &p, seed, None, 10).unwrap();
            prop_assert!(v.is_consistent(net.order()), "{:?}", v);
        }
    }
}
