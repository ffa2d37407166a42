//! Finite abelian groups by invariant factors, and their covers.

mod cover;
mod types;

pub use cover::{
    build_cocycle_cover, canonical_cover_of, load_cover, Cover, CoverSpec, Provenance,
};
pub use types::{
    factorize, is_prime, recognize_abelian, schur_multiplier, sylow_split, AbelianType,
};
