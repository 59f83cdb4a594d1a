//! Random well-formed hypernetworks.
//!
//! Each vertex type draws one multiset of in-edge types, and every vertex of
//! that type receives exactly that multiset with random sources of the
//! right types. Both type-consistency conditions therefore hold by
//! construction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Hyperedge, Hypernetwork, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_order: usize,
    pub max_vertex_types: usize,
    pub max_edge_types: usize,
    /// Largest number of in-edges of one type at one vertex.
    pub max_multiplicity: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_vertices: 5,
            max_edges: 7,
            max_order: 2,
            max_vertex_types: 2,
            max_edge_types: 3,
            max_multiplicity: 2,
        }
    }
}

struct EdgeType {
    sources: Vec<usize>,
    target: usize,
}

pub fn random_hypernetwork(cfg: &GeneratorConfig, rng: &mut impl Rng) -> Hypernetwork {
    loop {
        let n = rng.gen_range(1..=cfg.max_vertices);
        let tcount = rng.gen_range(1..=cfg.max_vertex_types.min(n));
        let mut vtypes: Vec<usize> = (0..n).map(|i| if i < tcount { i } else { rng.gen_range(0..tcount) }).collect();
        vtypes.shuffle(rng);
        let of_type = |t: usize| -> Vec<usize> { (0..n).filter(|&v| vtypes[v] == t).collect() };

        let etypes: Vec<EdgeType> = (0..rng.gen_range(1..=cfg.max_edge_types))
            .map(|_| EdgeType {
                sources: (0..rng.gen_range(1..=cfg.max_order)).map(|_| rng.gen_range(0..tcount)).collect(),
                target: rng.gen_range(0..tcount),
            })
            .collect();
        let multiplicity: Vec<usize> = (0..etypes.len()).map(|_| rng.gen_range(0..=cfg.max_multiplicity)).collect();
        let total: usize = etypes
            .iter()
            .zip(&multiplicity)
            .map(|(et, m)| m * of_type(et.target).len())
            .sum();
        if total > cfg.max_edges {
            continue;
        }

        let vertices: Vec<Vertex> = (0..n).map(|v| Vertex::new(format!("v{v}"), format!("T{}", vtypes[v]))).collect();
        let mut edges = Vec::with_capacity(total);
        for (t, (et, &m)) in etypes.iter().zip(&multiplicity).enumerate() {
            for target in of_type(et.target) {
                for _ in 0..m {
                    let sources: Vec<String> = et
                        .sources
                        .iter()
                        .map(|&st| format!("v{}", of_type(st).choose(rng).unwrap()))
                        .collect();
                    edges.push(Hyperedge::new(format!("e{}", edges.len()), format!("t{t}"), sources, format!("v{target}")));
                }
            }
        }
        return Hypernetwork::new("random", vertices, edges).expect("generator keeps both conditions");
    }
}
