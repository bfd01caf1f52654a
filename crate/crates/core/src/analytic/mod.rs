//! Exact densities, moments and probabilities of the circumsphere
//! quantities, used as oracles for the simulation.
//!
//! Notation: omega is the circumradius, delta the distance from the foot O'
//! of the perpendicular from the ball centre to the flat, to the circumcentre,
//! h the distance from the centre to the flat, delta_c the distance from the
//! centre to the circumcentre and sigma = delta + omega.

mod cdf;
mod consts;
mod moments;
mod pdf;
mod prob;

pub use cdf::Var;
pub use consts::{constants, PdfConstants};
pub use moments::{
    asymptotic_moment_limits, moment_delta, moment_delta_c, moment_delta_c_even,
    moment_delta_even_pochhammer, moment_h2, moment_omega, moment_omega_even_pochhammer,
    moment_one_minus_delta_c2, moment_sigma,
};
pub use pdf::{
    conditional_pdf_delta_r_given_omega_r, joint_pdf_delta_c_omega, joint_pdf_delta_omega,
    joint_pdf_sigma_y, joint_pdf_sigma_y_rescaled, pdf_delta, pdf_delta_alt, pdf_delta_c, pdf_h,
    pdf_omega, pdf_omega_alt, pdf_r, pdf_segment_half_length, pdf_sigma, rescaled_joint_pdf,
};
pub use prob::{
    prob_contained, prob_contained_detailed, prob_contained_limit, prob_origin_outside,
    prob_origin_outside_detailed, prob_origin_outside_quadrature, Probability,
};
