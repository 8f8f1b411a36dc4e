//! Ambient manifolds, differential forms, vector fields and diffeomorphisms.

pub mod catalog;
pub mod diffeo;
pub mod field;
pub mod forms;
pub mod map;
pub mod space;

pub use diffeo::{pushforward_field, ClosedFormDiffeo};
pub use field::{flow_point, lie_bracket, AnalyticVectorField};
pub use forms::DifferentialForm;
pub use map::{SharedMap, VectorMap};
pub use space::{det3, AmbientSpace, Mat3, SphereChart, Vec3};
