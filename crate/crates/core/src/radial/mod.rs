//! Radial numerical kernel.

pub mod blowup;
pub mod families;
pub mod inversion;
pub mod operator;
pub mod profile;
pub mod stencil;

pub use blowup::{blowup_shoot, BlowupDomain, BlowupOptions, BlowupResult};
pub use families::{
    bubble_profile, bubble_residual, fit_explicit_bubble, m_harmonic, rescale_blowup, singular_profile, BubbleFit,
    BubbleOptions, PEqualsMTransform, SingularProfile,
};
pub use inversion::{invert_t, invert_t_with_estimate};
pub use operator::{m_laplacian_residual, residual_with, ResidualReport};
pub use profile::{RadialGrid, RadialProfile};
