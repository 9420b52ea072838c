//! Numerical workbench for abelian symplectic vortices whose target is the
//! Kähler cone `ℂⁿ∖{0}` over the round sphere, on a flat torus.
//!
//! The pipeline: holomorphic data ([`sections`]) is pushed onto the vortex
//! locus by a single complex gauge transformation `e^f`, where `f` solves the
//! Kazdan–Warner equation `Δf + B e^{2f} = w` ([`kazdan_warner`]). The
//! resulting solutions are mapped to τ-vortices and effective divisors
//! ([`vortex`]).
//!
//! Sign conventions used throughout:
//! * `Δ = -(∂²ₓ + ∂²ᵧ)` is positive semi-definite;
//! * a unitary connection is `i a_x dx + i a_y dy` and its curvature scalar is
//!   `iΛF_A = ∂ᵧa_x − ∂ₓa_y`;
//! * the moment equation is `iΛF_A = τ − μ∘u`.

pub mod cone;
pub mod exec;
pub mod kazdan_warner;
pub mod sections;
pub mod torus;
pub mod vortex;

pub use num_complex::Complex64;
