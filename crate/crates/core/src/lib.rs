//! Sup-metric cone over the curve complex modulo the mapping class group,
//! as a coarse model of moduli space.
//!
//! * [`topology`] and [`canonical`]: multicurve types as decorated cut graphs.
//! * [`complex`]: the finite orbicomplex of multicurve types.
//! * [`cone`], [`geodesic`], [`oracle`]: points, exact distances, grid oracle.
//! * [`teich`]: Fenchel-Nielsen image and product-of-half-planes distances.
//! * [`verify`] and [`cli`]: property suites and the command-line driver.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod cli;
pub mod complex;
pub mod cone;
pub mod error;
pub mod geodesic;
pub mod lp;
pub mod oracle;
pub mod teich;
pub mod topology;
pub mod verify;

pub use complex::{build_complex, enumerate_orbits, OrbitId, QuotientComplex, SimplexOrbit};
pub use cone::{orthant_distance, scale, symmetric_orthant_distance, ConePoint};
pub use error::{Error, Result};
pub use geodesic::{ConeSpace, DistanceOptions, GeodesicResult};
pub use topology::{is_stable, MulticurveGraph, Surface, VertexDecoration};
