//! Shared fixtures for the benchmarks.

use fhj_core::{FractionalOrder, HamiltonianSpec, InitialProfile, ProblemSpec, TimeGrid, TorusGrid, VelocityField};

pub fn order(alpha: f64) -> FractionalOrder {
    FractionalOrder::new(alpha).expect("benchmark orders lie in (0, 1]")
}

/// Unit transport of `sin 2πx` on `[0, 0.5]`, `α = 0.5`.
pub fn transport_problem(nodes: usize, steps: usize) -> ProblemSpec {
    ProblemSpec::new(
        order(0.5),
        TimeGrid::new(0.5, steps).expect("positive horizon"),
        TorusGrid::new(1, nodes).expect("1-D grid"),
        HamiltonianSpec::transport(VelocityField::Constant(vec![1.0])).expect("1-D velocity"),
        InitialProfile::sine(),
    )
    .expect("consistent problem")
}

/// `b(x) = 1 + 0.5 sin 2πx` on the 2-torus, both components.
pub fn variable_transport_2d(nodes: usize, steps: usize) -> ProblemSpec {
    ProblemSpec::new(
        order(0.5),
        TimeGrid::new(0.5, steps).expect("positive horizon"),
        TorusGrid::new(2, nodes).expect("2-D grid"),
        HamiltonianSpec::transport(VelocityField::Sinusoidal {
            mean: vec![1.0, 1.0],
            amplitude: vec![0.5, 0.5],
        })
        .expect("2-D velocity"),
        InitialProfile::sine(),
    )
    .expect("consistent problem")
}
