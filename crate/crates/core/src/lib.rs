//! Structural and numerical analysis of reaction networks with generalized
//! mass-action kinetics, where the rate of each reaction is a power-law
//! monomial whose exponents (the kinetic complex) may differ from the
//! stoichiometry of its source complex.
//!
//! The crate covers parsing and validation of networks, the complex graph,
//! exact linear algebra and deficiencies, sign vectors of subspaces,
//! chirotopes and face lattices, complex balancing equilibria and the
//! associated sign conditions, and numerical integration of the dynamics.

pub mod analysis;
pub mod birch;
pub mod chirotope;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod graph;
pub mod kinetics;
pub mod lattice;
pub mod lp;
pub mod matrix;
pub mod network;
pub mod parse;
pub mod signs;
pub mod subspace;

pub use analysis::{
    analyze, check_genthm, check_uniqueness, check_uniqueness_subspaces, deficiencies,
    multistationarity_witness, Analysis, AnalysisVerdict, MultistationarityWitness,
    UniquenessCheck,
};
pub use birch::{solve_in_class, BirchMap, ClassSolutions, NewtonOptions};
pub use chirotope::{chirotope_of, sign_sets_equal, Chirotope};
pub use dynamics::{conservation_residuals, formation_rate, integrate, rate_jacobian, Trajectory};
pub use equilibria::{
    find_complex_balancing, kernel_positive_basis, laplacian, psi_tilde,
    pseudo_reaction_transform, EquilibriumSetDescriptor,
};
pub use error::{Error, ParseError, Result, ValidationError};
pub use graph::{circulation_rates, decompose, LinkageDecomposition};
pub use lattice::{face_lattice, find_dominant_lattice_iso, FaceLattice};
pub use matrix::{Rational, RationalMatrix};
pub use network::{Complex, GeneralizedNetwork, Reaction, Species};
pub use parse::parse_network;
pub use signs::{enumerate_sign_vectors, Sign, SignVector, SignVectorSet};
pub use subspace::{
    kinetic_order_subspace, orthogonal_complement, stoichiometric_subspace, DeficiencyMethod,
    DeficiencyReport, SubspaceBasis,
};
