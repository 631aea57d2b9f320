//! Quasi-Monte Carlo integration with respect to general measures.
//!
//! The crate covers star-discrepancy of point sets against uniform, product,
//! discrete and closed-form measures; Hardy–Krause variation of grid
//! functions and their Jordan decomposition; the correspondence between
//! right-continuous functions and signed measures; Koksma–Hlawka error
//! certificates; and inverse-CDF point-set transforms.

pub mod error;
mod grid;
pub mod measures;
pub mod variation;
pub mod discrepancy;
pub mod transforms;
pub mod integrate;
pub mod sequences;
pub mod schema;

pub use error::{Error, Result};
pub use measures::{AnalyticCdf, Atom, AxisCdf, DiscreteSignedMeasure, Limit, MeasureSpec, SideClosure, TOLERANCE};
pub use variation::{Anchor, AxisBox, FaceSelector, GridFunction, Interpolation, JordanPair};
pub use discrepancy::{
    local_discrepancy, random_search_lower_bound, star_discrepancy, star_discrepancy_with, uniform_star_discrepancy,
    DiscrepancyResult, ExactOptions, Method, PointSet,
};
