pub mod bohr_bourgain;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod fourier;
pub mod freiman;
pub mod group;
pub mod increment;
pub mod local;
pub mod sets;
pub mod spectrum;
pub mod verify;

pub use bohr_bourgain::BourgainSystem;
pub use error::{Error, Result};
pub use fourier::{GFunction, SpectrumFunction};
pub use group::{make_group, Group};
pub use increment::{itlem_evaluate, run_increment, Mode};
pub use sets::{GSet, ZSet};
