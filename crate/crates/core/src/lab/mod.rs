//! The kernel groups `K(G,n)` and `K̃(G,n)`, natural covers, and the claim
//! registry that checks their properties.
mod catalogue;
mod kgroup;
mod ktilde;
mod verify;
pub use catalogue::{entry, load_all, Entry, Subject, ENTRIES};
pub use kgroup::{k_functorial, k_group, k_order, KGroup};
pub use ktilde::{
    first_fixing_permutations, ktilde, natural_cover, sn_recover, CoordinateAction, KTildeResult,
};
pub use verify::{
    abelian_types_up_to, claim, claims, run_suite, verify, CaseOutcome, Claim, ClaimOutcome,
    SuiteOptions, Verdict,
};
