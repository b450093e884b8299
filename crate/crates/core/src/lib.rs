#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod peaks;
pub mod pump;
pub mod quadrature;
pub mod scattering;
pub mod selection;
pub mod ultracold;

pub use error::{MazerError, Result};
pub use params::{channel_wavenumbers, dressed_angle, ChannelWavenumbers, SystemParams};
pub use scattering::{scatter, ScatteringResult};
