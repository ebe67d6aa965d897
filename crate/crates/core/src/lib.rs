//! Khovanov homology over F2, link determinants, quasi-alternating
//! certificates, Goeritz lattices and d-invariant tables of branched double
//! covers, plus the filtered-complex and mapping-cone machinery behind them.
//!
//! Integer-valued code is generic over [`IntScalar`]; the aliases below fix
//! the scalar to [`BigInt`].

pub mod conventions;
pub mod diagram;
pub mod dinv;
pub mod goeritz;
pub mod homalg;
pub mod khovanov;
pub mod linalg;
pub mod poly;
pub mod quasialt;
pub mod random;
pub mod scalar;

pub use num_bigint::BigInt;

pub use conventions::CONVENTIONS_VERSION;
pub use diagram::{braid_closure, parse_pd, DiagramError, LinkDiagram};
pub use dinv::DinvError;
pub use goeritz::GoeritzError;
pub use homalg::HomalgError;
pub use khovanov::{KhTable, KhovanovError};
pub use linalg::{LinalgError, MatF2, SparseF2};
pub use quasialt::{qa_certify, QaBudget, QaCertificate, QaOutcome};
pub use scalar::IntScalar;

pub type MatZ = linalg::IntMatrix<BigInt>;
pub type Rational = scalar::Rational<BigInt>;
pub type Lattice = goeritz::GoeritzLattice<BigInt>;
pub type DTable = dinv::DTable<BigInt>;
pub type CharClass = dinv::CharClass<BigInt>;
