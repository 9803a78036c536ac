//! Curve-complex machinery on the once-punctured torus: the Farey graph,
//! annular projections, markings and hierarchy paths, the threshold distance
//! formula, Thurston's pseudo-Anosov family and closed-orbit counting.

pub mod cli;
pub mod constants;
pub mod error;
pub mod farey;
pub mod hierarchy;
pub mod machinery;
pub mod marking;
pub mod orbits;
pub mod projection;
pub mod quadratic;
pub mod sample;
pub mod thurston;

pub use error::{Error, Result};
pub use farey::{adjacent, cf_expand, farey_distance, farey_geodesic, intersection_number, ContinuedFraction, Mat2, Slope};
pub use marking::{marking_distance, Marking};
pub use quadratic::QuadraticIrrational;
