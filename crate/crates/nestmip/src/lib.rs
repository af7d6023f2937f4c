//! File formats, external MIP solving, the benchmark harness and the CLI
//! for the `nestmip-core` strip-packing models.

pub mod bench;
mod error;
pub mod io;
pub mod profile;
pub mod solve;

pub use error::{Error, Result};
pub use io::{load_instance, InstanceFormat};
pub use solve::{solve_external, solve_instance, Backend, SolveLimits, Solver};
