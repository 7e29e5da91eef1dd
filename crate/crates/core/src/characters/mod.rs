//! Cusp-level analysis of characters.
//!
//! Each ideal vertex of the polytope lifts to cusps of the manifold; a cusp
//! section is a flat torus whose homology is generated by short edge loops
//! in the cube complex, one per opposite facet pair. Cocycles from the
//! state game evaluate on these loops, which gives the restriction of a
//! character to each cusp as an integer vector.

mod choi_park;
mod cusp;
mod lattice;
mod perturb;

pub use choi_park::choi_park_b1;
pub use cusp::{
    case_one, case_two, cusp_loops, evaluate, iota_star_matrix, surjectivity_conditions, CaseConstruction, CuspLoop,
    CuspTorus, EdgeCochain, LoopStep, PairCondition, Surjectivity, SurjectivityReport, TabulatedCochain, UnitCocycle,
};
pub use lattice::{
    hermite_normal_form, kernel_sublattice, short_vectors, systole, two_pi_check, Gram, KernelLattice, Systole,
    TwoPiResult,
};
pub use perturb::{perturb, verify_certificate, Character, CuspCertificate, PerturbOptions, Perturbation};
