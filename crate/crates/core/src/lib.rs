//! Shortest obstacle-free flight paths on unit-grid fields.
//!
//! A [`Field`] is turned into a line-of-sight [`WeightMatrix`], Floyd-Warshall
//! produces all-pairs distances plus an intermediate-vertex matrix, and
//! [`dispatch`] picks the closest of several UAVs for a destination. The
//! [`bench`] and [`fit`] modules measure and model how the run time scales.

pub mod apsp;
pub mod bench;
pub mod dispatch;
mod error;
pub mod field;
pub mod fit;
pub mod io;
pub mod render;
pub mod visibility;

pub use apsp::{dijkstra_oracle, floyd, floyd_with, reconstruct_path, ApspResult, Kernel, Path};
pub use dispatch::{dispatch, dispatch_with, DispatchResult, Planner, SourceOutcome};
pub use error::{Error, Result};
pub use field::{parse_field, random_field, CellId, Field, Point};
pub use fit::{fit_polynomial, loglog_slope, FitResult};
pub use render::{render_svg, RenderSpec};
pub use visibility::{build_weight_matrix, visible, WeightMatrix};
