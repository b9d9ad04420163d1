//! Exact computations in weight-graded module categories with commutator and
//! quantum Serre relations: presentations, Gröbner bases, modules, Ext algebras,
//! and comparison against flag-variety cohomology.

pub mod cli;
pub mod error;
pub mod ext;
pub mod gbasis;
pub mod linalg;
pub mod modules;
pub mod qfield;
pub mod presentation;
pub mod rootdata;

pub use error::{Error, Result};
pub use qfield::{qbinom, qint, QPoint, QScalar};
