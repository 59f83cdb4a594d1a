mod common;

use hypernet::augment::hyperedge_id;
use hypernet::partition::enumerate_balanced;
use hypernet::{augment, is_balanced, AugmentationSpec, Partition, Perm};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn augmenting_random_cores(seed in any::<u64>()) {
        let core = common::wider_net(seed);
        let Some(vtype) = core.vertex_types().into_iter().find(|t| core.vertices().iter().filter(|v| v.vtype == *t).count() >= 3) else {
            return Ok(());
        };
        let nodes: Vec<String> = core.vertices().iter().filter(|v| v.vtype == vtype).map(|v| v.id.clone()).collect();
        let spec = AugmentationSpec::new(nodes.clone());
        let aug = augment(&core, &spec).unwrap();
        prop_assert!(aug.validate().is_empty());
        let (w0, w1) = (aug.vertex_index("w0").unwrap(), aug.vertex_index("w1").unwrap());
        prop_assert_eq!(aug.in_type_multiset(w0), aug.in_type_multiset(w1));
        for sigma in Perm::all(nodes.len()) {
            let e = aug.edge_index(&hyperedge_id("h", &sigma)).unwrap();
            let srcs: Vec<&str> = aug.sources(e).iter().map(|&s| aug.vertex(s).id.as_str()).collect();
            prop_assert!(!srcs.contains(&nodes[sigma.apply(0)].as_str()));
            prop_assert_eq!(aug.target(e), if sigma.parity() == 0 { w0 } else { w1 });
        }
        // The core is untouched: no hyperedge from w0 or w1 reaches it.
        for v in 0..core.vertex_count() {
            let u = aug.vertex_index(&core.vertex(v).id).unwrap();
            prop_assert_eq!(aug.in_edges(u).len(), core.in_edges(v).len());
        }
        // Balanced partitions of the core extend by keeping w0, w1 apart.
        for p in enumerate_balanced(&core, 12).unwrap() {
            let mut labels: Vec<usize> = (0..aug.vertex_count()).map(|u| {
                let id = &aug.vertex(u).id;
                core.vertex_index(id).map_or(0, |v| p.colour(v))
            }).collect();
            labels[w0] = p.num_colours() + 1;
            labels[w1] = p.num_colours() + 2;
            prop_assert!(is_balanced(&aug, &Partition::from_labels(&labels)).is_balanced());
        }
    }
}
