//! Numerical toolkit for signatures of axial-linear curves.
//!
//! A `C¹` curve `γ(s) = (x_1(s), …, x_d(s))` on `[0,1]` is *axial linear*
//! when one coordinate is linear in the parameter, `x_i(s) = C₀·s`. For such
//! curves the signature coefficients on the words `e_i^⊗k ⊗ e_j ⊗ e_i^⊗l`
//! integrate the derivative `x_j′` against a Beta density:
//!
//! ```text
//! S_{k,l}^{(j;i)} = C₀^{k+l} ∫₀¹ m_{k,l}(s) x_j′(s) ds,
//! m_{k,l}(s) = s^k (1−s)^l / (k!·l!),
//! ρ_{k,l} = (k+l+1)!·m_{k,l}     (the Be(k+1, l+1) density).
//! ```
//!
//! Because `ρ_{k,l}` concentrates at `k/(k+l)` as `k+l` grows, tracking the
//! scaled coefficients `Ŝ_{k,l} = (k+l+1)!·S_{k,l}/C₀^{k+l}` along integer
//! pairs with `k/(k+l) → x` recovers the derivative value `x_j′(x)`; summing
//! the level diagonals recovers the curve length. This crate provides
//!
//! * [`curve`] — curve presets, polylines, reparameterization to axial-linear
//!   form, sup/Hölder norm estimates;
//! * [`kernel`] — log-space evaluation of `ρ_{k,l}`, its mode, and the
//!   fast-decay envelope `3n^{3/2}e^{−n^{2ε₀}/18}`;
//! * [`quad`] — composite Gauss–Legendre quadrature with panels centered on
//!   the Beta mode;
//! * [`engine`] — scaled coefficient tables by quadrature and full truncated
//!   signatures by Chen products over polylines, plus cross-checks;
//! * [`rational`] — naive, decimal and continued-fraction rational
//!   approximation schemes driving the recovery limits;
//! * [`invert`] — recovery of derivative values, profiles, ratios, length,
//!   and trace reconstruction from a coefficient table;
//! * [`norms`] — asymptotic supremum / L¹ seminorm sequences, projective-norm
//!   bounds, and the isometry / discontinuity / modulus-of-continuity
//!   experiments.
//!
//! The crate is `no_std`-compatible (`alloc` required, enable the `libm`
//! feature in place of `std`); all IO lives in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("sig-core needs either the `std` or the `libm` feature");

pub mod curve;
pub mod engine;
pub mod invert;
pub mod kernel;
pub mod math;
pub mod norms;
pub mod quad;
pub mod rational;

pub use curve::{Curve, Polyline};
pub use engine::{CoeffTable, TruncatedSignature};
pub use invert::RecoverySequence;
pub use kernel::KernelIndex;
pub use quad::QuadConfig;
pub use rational::{RationalPair, RationalScheme};
