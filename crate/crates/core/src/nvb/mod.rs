//! Newest-vertex bisection of triangles.
//!
//! Cells are triangles with exact dyadic vertices. Starting from a
//! compatibly labeled initial mesh, the subdivision patch of a cell is the
//! cell itself when its refinement edge is on the boundary and the pair
//! sharing that refinement edge otherwise, so at most two cells are ever
//! subdivided together and every patch subdivision keeps the mesh
//! edge-to-edge.

mod backend;
mod completion;
mod domains;
pub mod dump;
pub mod dyadic;
mod labeling;
mod mesh;

pub use backend::{EdgeTracker, NvbBackend};
pub use completion::complete;
pub use domains::{build_domain_mesh, single_triangle, Domain};
pub use labeling::{boundary_edges, check_compatibility, compatible_initial_labeling, InitialMesh};
pub use mesh::{nvb_children, triangle_area, EdgeKey, Triangle, VertexId, VertexTable};
