//! Finite groups as explicit element arenas.

pub mod group;
pub mod hom;
pub mod iso;
pub mod spec;
pub mod structure;
pub mod subgroup;

pub use group::Group;
pub use hom::Homomorphism;
pub use iso::{
    find_isomorphism, fingerprint, is_isomorphic, is_isomorphic_exact, Fingerprint, IsoVerdict,
};
pub use spec::{
    direct_power, direct_product, direct_product_all, injection, load_group, projection, GroupSpec,
};
pub use structure::{structure_report, StructureReport};
pub use subgroup::{
    centre, commutator_with_whole, derived_subgroup, normal_closure, quotient, subgroup_closure,
    Subgroup,
};
