//! Exact computation of the coefficient rings of HZ/p for G = (Z/p)^n: the
//! geometric fixed points ring, its Poincaré series, the RO(G)⁺-graded ring
//! and its localizations, all cross-checked against the localized Borel
//! cohomology ring.

pub mod charspace;
pub mod cli;
pub mod error;
pub mod field;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod phi;
pub mod rograde;
pub mod series;
pub mod ssq;
pub mod superalg;

pub use charspace::{Character, GroupContext, Line};
pub use error::{Error, Result};
pub use series::{HilbertSeries, Source};
pub use superalg::{Presentation, SuperElement, SuperMonomial};
