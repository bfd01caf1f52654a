//! Special functions on the real line.

mod beta;
mod gamma;
mod hyp2f1;
mod incgamma;

pub use beta::{beta_fn, beta_pdf, ln_beta, pochhammer, reg_inc_beta};
pub use gamma::{gamma, ln_gamma, ln_gamma_ratio, ln_gamma_signed, rgamma};
pub use hyp2f1::gauss_2f1;
pub use incgamma::{chi2_sf, reg_lower_gamma, reg_upper_gamma};

pub(crate) use gamma::ln_gamma_pos;
