//! Instance generators, soundness fuzzing and label-size benchmarks around
//! the `lanecert` engine.

pub mod bench;
pub mod fuzz;
pub mod generate;
