//! Reproducible random streams and the samplers built on them.

mod dist;
mod product;
mod rng;

pub use dist::{
    sample_beta, sample_dirichlet, sample_gamma, sample_std_normal, sample_uniform_ball,
    sample_uniform_ball_into, sample_unit_sphere_into, BetaSampler, GammaSampler,
};
pub use product::{
    beta_product_pdf, delta_pair, invert_beta_product, omega_pair, sample_chord_half_surface,
    sample_delta, sample_delta_c_squared, sample_delta_with, sample_omega, sample_omega_with,
    BetaPair, BetaProductSampler, BetaShape, DeltaCSquaredSampler, DeltaRep, OmegaRep,
};
pub use rng::{NormalMethod, RngStream};
