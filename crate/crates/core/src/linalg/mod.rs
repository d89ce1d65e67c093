//! Dense linear-algebra primitives: the data container, thin SVD, leverage
//! scores, condition numbers and information-matrix log-determinants.

mod matrix;
mod spectral;
mod svd;

pub use matrix::DataMatrix;
pub use spectral::{condition_number, logdet_info, RANK_EPS};
pub(crate) use spectral::ratio_of_extremes;
pub use svd::{leverage_scores, thin_svd, LeverageVector, SvdFactors, TallSvd};
