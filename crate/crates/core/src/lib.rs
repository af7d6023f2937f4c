//! Continuous MIP models for irregular strip packing built on convex no-fit
//! polygons and a vertical-slice decomposition of the feasible space.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. File formats, external solvers and the CLI live in the `nestmip`
//! companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod builder;
pub mod cuts;
pub mod enumerate;
mod error;
pub mod geometry;
pub mod instance;
pub mod lp;
pub mod mip;
pub mod profile;
pub mod slices;
pub mod solution;
pub mod verify;

pub use builder::{build_model, BuildOptions, BuiltModel, CutToggles, ModelVariant, Registry};
pub use error::{Error, Result};
pub use geometry::{
    convex_decompose, convex_minkowski_sum, convex_nfp, polygons_overlap, signed_area, ConvexPart,
    Interval, Point, Polygon, EPS_GEOM,
};
pub use instance::{compute_bounds, PieceSpec, PieceType, ProblemInstance};
pub use mip::{export_model, model_stats, ExportFormat, ExportOptions, MipModel, ModelStats};
pub use slices::{build_subregions, classify_boundary_edges, EdgeClass, FeasibleSubRegion, NfpPart};
pub use solution::{Placement, SolveResult, SolveStatus};
pub use enumerate::{enumerate_exact, enumerate_model, solve_with_fixed_binaries, EnumLimits};
pub use profile::{performance_profile, ProfilePoint};
pub use verify::{verify_placement, VerificationReport};
