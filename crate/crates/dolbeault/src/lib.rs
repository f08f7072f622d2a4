//! Spectral Dolbeault calculus on flat complex tori.
//!
//! This crate implements a small numerical laboratory for complex geometry on
//! the torus X = ℂⁿ/(2πℤ)²ⁿ with n ∈ {1, 2}, discretized on uniform grids and
//! differentiated spectrally (FFT):
//!
//! * [`grid`] / [`scalar`] — uniform grids, complex scalar fields with a
//!   physical/spectral representation tag, exact spectral derivatives ∂/∂z_a,
//!   ∂/∂z̄_a, and Fourier-multiplier application;
//! * [`form`] / [`beltrami`] — (p,q)-forms and vector-valued (0,k)-forms
//!   φ = φ^i_J̄ dz̄^J ⊗ ∂_i ("Beltrami fields"), with wedge products,
//!   contraction i_φ, the exponential e^{i_φ}, Lie brackets and Lie
//!   derivatives, and the Cartan-type identities they satisfy;
//! * [`hodge`] — the flat-metric Hodge package: ∂, ∂̄, their L²-adjoints, the
//!   Dolbeault Laplacian, its Green operator G, the harmonic projection H,
//!   and the contraction-solver kernel T = ∂̄* ∘ G ∘ ∂;
//! * [`deformation`] — torus self-maps F = id + perturbation and the Beltrami
//!   fields φ = a⁻¹b they induce via their Jacobian blocks;
//! * [`extension`] — Neumann-series solvers for the holomorphic extension
//!   equation Ω = Ω₀ − T(φ⌟Ω) and its (p,q) generalization;
//! * [`beltrami_map`] — the dimension-one Beltrami equation ∂̄f = μ∂f solved
//!   through harmonic (1,0)-forms and quasi-periodic primitives;
//! * [`pluri`] — pluricanonical twists: Kähler patches g = δ + ∂∂̄ψ, the
//!   weighted connection ∇′, Beltrami divergences, and the defect identities
//!   coupling local holomorphy of sections to global equations;
//! * [`sampling`] — seeded band-limited random fields for reproducible test
//!   batteries.
//!
//! Everything is double precision; all randomized constructions take explicit
//! seeds; all reductions are sequential so that outputs are byte-reproducible
//! with or without the `parallel` feature.

pub mod beltrami;
pub mod beltrami_map;
pub mod deformation;
pub mod error;
mod exec;
pub mod extension;
pub mod form;
pub mod graded;
pub mod grid;
pub mod hodge;
pub mod multi_index;
pub mod pluri;
pub mod sampling;
pub mod scalar;

pub use beltrami::BeltramiField;
pub use beltrami_map::QuasiPeriodicMap;
pub use deformation::TorusMap;
pub use error::{Error, Result};
pub use extension::SolveReport;
pub use form::{FormField, Weight};
pub use graded::GradedForm;
pub use grid::TorusGrid;
pub use hodge::{DolbeaultKind, HodgePackage};
pub use pluri::KahlerPatch;
pub use scalar::{DerivativeKind, Representation, ScalarField};
