//! Falsification harnesses for the integral definitions.

mod bv;
mod claim;
mod diagram;
mod gauss_green;
mod hk;
mod mc;
mod packing;
mod seminorm;

pub use bv::{check_bv_partition_integral, check_bv_partition_integral_with, BvCheckConfig, BvReport, BvWitness, Rejections};
pub use claim::{ClaimSpec, Domain, EpsOutcome, IntegralClaim, Notion, Verdict, DEFAULT_EPS, FALSIFIER_NOTE};
pub use diagram::{run_diagram_suite, DiagramConfig, DiagramEntry, DiagramReport};
pub use gauss_green::{gauss_green_verify, DivSource, ExactSides, GaussGreenReport};
pub use hk::{
    hk_check, hk_check_with, hk_integrate_adaptive, singular_gauge, HkCheckConfig, HkClaim, HkEstimate, HkReport, HkTerm,
    HkTrial, HkWitness, ShellStep, ADAPTIVE_NOTE,
};
pub use mc::{
    mc_alpha_check, mc_monotone_comparison, ControlFunction, McClaim, McConfig, McPoint, McReport, McWitness,
    MonotoneComparison,
};
pub use seminorm::{seminorm_lower_bound, LevelStats, Seminorm, SeminormBound, SeminormQuery};
pub use packing::{
    check_packing_integral, check_packing_integral_with, restriction_consistency, revalidate_witness, BallTerm,
    PackingCheckConfig, PackingReport, PackingWitness, RestrictionReport,
};
