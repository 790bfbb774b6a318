//! Periodic grids, Fourier transforms and bilinear frequency operators.
//!
//! Transforms carry the `1/N^d` factor on the forward side, so a plane wave
//! `e^{ik·x}` has unit coefficient at `k` and the pseudo-product with `m ≡ 1`
//! is the pointwise product of band-limited fields.

mod bilinear;
mod field;
mod grid;
mod symbol;

pub use bilinear::{
    oscillation_integral, oscillatory_pseudo_product, oscillatory_pseudo_product_direct,
    pseudo_product, pseudo_product_direct, time_integrated_midpoint, time_integrated_oscillatory,
    PHI_FLOOR,
};
pub use field::{dealias, transform, Field, Rep};
pub use grid::Grid;
pub use symbol::{cutoff_symbol_near_r, support_measure, ChiProfile, SupportBox, Symbol2};
