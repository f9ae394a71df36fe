//! Digitized counterdiabatic driving: exact and approximate adiabatic gauge
//! potentials, composite-unitary drives built from `H` and `∂λH` rotations,
//! and the sweeps and exports behind the `udcd` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod drive;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod hamiltonians;
pub mod linalg;
pub mod quadrature;
pub mod schedule;
pub mod spectral;
pub mod table;

pub use config::RunConfig;
pub use eigen::{eigendecompose, SpectralDecomposition};
pub use error::{Error, Result};
pub use gates::{gate_sequence, GateSequence, ProductOrder};
pub use hamiltonians::{Affine, LmgModel, Model, ParametrizedHamiltonian, TwoLevelModel};
pub use linalg::{ComplexMatrix, HermitianOperator, StateVector, UnitaryMatrix};
pub use schedule::{regularized_angles, standard_angles, AngleSchedule};
pub use spectral::{spectral_function, SpectralFunction};
pub use table::CsvTable;
