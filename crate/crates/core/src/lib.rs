//! Shift planes of odd order built from planar functions, the unitals they
//! contain, and exhaustive certification of their combinatorial structure.
pub mod analysis;
pub mod certificate;
pub mod cli;
pub mod error;
pub mod gf;
pub mod mode;
pub mod planar;
pub mod plane;
pub mod suite;
pub mod unital;

pub use error::{Error, Result};
pub use gf::{ExtensionSplit, FieldCtx, FieldElem};
pub use mode::Mode;
pub use planar::{Family, PlanarFunction, PlanarFunctionSpec};
pub use plane::{Collineation, Line, Plane, Point};
pub use unital::{Involution, Provenance, Unital};
