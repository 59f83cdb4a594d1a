#![allow(dead_code)]

use hypernet::generate::{random_hypernetwork, GeneratorConfig};
use hypernet::Hypernetwork;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn small_net(seed: u64) -> Hypernetwork {
    random_hypernetwork(&GeneratorConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Up to 6 vertices, 8 hyperedges, order 3.
pub fn wider_net(seed: u64) -> Hypernetwork {
    let cfg = GeneratorConfig { max_vertices: 6, max_edges: 8, max_order: 3, max_vertex_types: 3, ..Default::default() };
    random_hypernetwork(&cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}
