//! Explicit quadratic relations: Sklyanin, the small elliptic quantum group
//! and the four SL(NM) families.

pub mod sklyanin;
pub mod slnm;
pub mod tv;

pub use sklyanin::{
    max_representation_residual, representation_residual, sklyanin_coeffs, sklyanin_coeffs_eta, sklyanin_coeffs_theta,
    sklyanin_relations, SklyaninForm, SklyaninRelation, SklyaninTerm, ZeroBetaReading,
};
pub use slnm::{
    relation_vectors_all, slnm_family_coeffs, slnm_family_sum, slnm_family_vectors, third_term_coeff, Family,
};
pub use tv::{tv_relation_vectors, tv_relations, TVKind, TVRelation};
