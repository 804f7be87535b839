//! Bound states of one-dimensional three-body systems (two identical bosons
//! and a third particle) with a two-term separable pair interaction.

pub mod error;
pub mod faddeev;
pub mod linalg;
pub mod observables;
pub mod quadrature;
pub mod roots;
pub mod scan;
pub mod separable;
pub mod twobody;
pub mod wavefunction;

pub use error::{Error, Result};
pub use faddeev::{build_grid, find_spectrum, MassConfig, MomentumGrid, SpectrumSettings};
pub use twobody::PotentialParams;
