//! Genus-zero orbifold disk potentials of framed Aganagic-Vafa branes in
//! toric Calabi-Yau 3-orbifolds, computed exactly on two sides and compared.
//!
//! The A-side sums closed-form disk amplitudes over the extended effective
//! cone and assembles the twisted sectors with their character weights. The
//! B-side solves the normalized mirror curve for `log y` as a Puiseux series
//! (closed form or formal Newton iteration) and integrates it against
//! `dq0/q0`. [`bmodel::verify_identity`] compares the two monomial by monomial
//! in the cyclotomic field `Q(zeta_M)`.
//!
//! ```
//! use orbidisk::{catalog, amodel::Geometry, bmodel};
//! use orbidisk::exactring::int;
//!
//! let ex = catalog::example("x111").unwrap();
//! let geo = Geometry::new(ex.fan, ex.order, &[0], 720).unwrap();
//! let report = bmodel::verify_identity(&geo, &int(2), &Default::default()).unwrap();
//! assert!(report.equal);
//! ```

pub mod amodel;
pub mod bmodel;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod exactring;
pub mod lattice;
pub mod series;

pub use error::{Error, Result};
