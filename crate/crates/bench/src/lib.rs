//! Benchmarks live in `benches/`. This crate only provides inputs.

use sparsedom::verify::{corpus_generate, CorpusSpec, Instance};

/// One deterministic instance with a cascade weight and a random density.
pub fn instance(dim: usize, depth: u32) -> Instance {
    let spec: CorpusSpec = format!("grids={dim}x{depth};weights=cascade:4;functions=random;count=1").parse().unwrap();
    corpus_generate(1, &spec).unwrap().instances.remove(0)
}
