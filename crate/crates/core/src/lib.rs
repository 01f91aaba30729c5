//! Strongly coupled diffusion and Schrödinger evolution on finite directed
//! metric graphs.
//!
//! Every edge is parametrized over `[0, 1]`. Processes on different edges
//! interact pointwise through a matrix-valued coefficient `C(x)` (ephaptic
//! coupling) and through the nodes via a generalized Kirchhoff law with node
//! matrix `M` (synaptic coupling). The crate provides
//!
//! * graph construction, incidence algebra and classification ([`graph`]),
//! * coefficient fields and algebraic well-posedness checks ([`coupling`]),
//! * a P1 finite-element discretization of the energy form ([`assembly`]),
//! * parabolic and Schrödinger time stepping ([`evolution`]),
//! * the invariant-subspace calculus for pointwise projections ([`symmetry`]),
//! * the file formats shared with the command line front-end ([`io`]).

pub mod assembly;
pub mod coupling;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod symmetry;

pub use assembly::{assemble, build_dof_map, interpolate, nodal_vector, DiscreteSystem, DofMap, StateVector};
pub use coupling::{CouplingField, NodeMatrix, ScalarFn, WellPosednessReport};
pub use error::{Error, Result};
pub use evolution::{simulate_parabolic, simulate_schrodinger, Scheme, Trajectory};
pub use graph::{GraphClass, IncidenceSet, MetricGraph};
pub use symmetry::{EdgeProjection, SymmetryReport};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

/// Dense complex matrix used for all operators.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;
