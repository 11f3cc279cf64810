//! Numerical laboratory for the linearized plasma–vacuum interface problem with a
//! hyperbolically regularized vacuum: symmetric system matrices, the interface lifting,
//! weighted norms, admissible basic states and a finite-difference coupled solver.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the working precision to `f64`.

pub mod basic_state;
pub mod bundle;
pub mod config;
pub mod csvio;
pub mod eos;
pub mod identities;
pub mod error;
pub mod lifting;
pub mod norms;
pub mod linalg;
pub mod plasma;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod vacuum;

pub use error::{MhdError, Result};

pub type Scalar = f64;
pub type PlasmaState = plasma::PlasmaState<Scalar>;
pub type InterfaceGeometry = plasma::InterfaceGeometry<Scalar>;
pub type EosParams = eos::EosParams<Scalar>;
pub type ThermoPoint = eos::ThermoPoint<Scalar>;
pub type RegularizationParams = vacuum::RegularizationParams<Scalar>;
pub type VacuumField = vacuum::VacuumField<Scalar>;
pub type BasicStatePoint = basic_state::BasicStatePoint<Scalar>;
pub type BasicState = basic_state::BasicState<Scalar>;
pub type CutoffSpec = lifting::CutoffSpec<Scalar>;
pub type FrontField = lifting::FrontField<Scalar>;
pub type LiftedFunction = lifting::LiftedFunction<Scalar>;
pub type MatrixBundle8 = bundle::MatrixBundle<Scalar, 8>;
pub type MatrixBundle6 = bundle::MatrixBundle<Scalar, 6>;
pub type CoupledSolver = solver::CoupledSolver<Scalar>;
pub type CoupledState = solver::CoupledState<Scalar>;
pub type EnergyReport = solver::energy::EnergyReport<Scalar>;
