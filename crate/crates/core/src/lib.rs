//! Near-best adaptive tree approximation on conforming meshes.
//!
//! The crate is organised around a lazily materialised *master tree* of
//! cells ([`tree`]), a geometry backend that knows how cells split and which
//! cells have to be split together to keep a mesh conforming ([`nvb`] for
//! newest-vertex bisection of triangles, [`bisect1d`] for plain interval
//! bisection), local error functionals ([`local_error`]) and the two greedy
//! tree algorithms ([`indicators`]). The [`oracle`] module enumerates small
//! conforming trees exhaustively to obtain best errors, and [`bench`] holds
//! the experiment harness behind the `conftree` binary.
//!
//! ```
//! use conftree::indicators::{Algorithm, Greedy, StoppingRule};
//! use conftree::local_error::{H1Error, QuadratureSettings, U2};
//! use conftree::nvb::{build_domain_mesh, Domain, NvbBackend};
//!
//! let mesh = build_domain_mesh(Domain::Square);
//! let mut backend = NvbBackend::new(&mesh).unwrap();
//! let functional = H1Error::new(U2, QuadratureSettings::default());
//! let mut run = Greedy::new(&mut backend, &functional, Algorithm::Conforming).unwrap();
//! let trace = run.run(StoppingRule::MaxIterations(50)).unwrap();
//! assert_eq!(trace.last().unwrap().complexity, 50);
//! ```

pub mod bench;
pub mod bisect1d;
mod errors;
pub mod fmt;
pub mod indicators;
pub mod local_error;
pub mod nvb;
pub mod oracle;
pub mod tree;

pub use errors::{Error, Result};
