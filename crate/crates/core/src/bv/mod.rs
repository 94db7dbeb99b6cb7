//! Level sets, perimeters, co-area, Sobolev and oscillation inequalities, BV
//! measures and the piecewise-harmonic experiments.

mod coarea;
mod inequalities;
mod measures;

pub use coarea::{coarea_check, level_set, level_set_profile, perimeter, perimeter_vs_minkowski, CoareaReport, LevelSetProfile, PerimeterComparison};
pub use inequalities::{osc_check, sobolev_check, sobolev_checks, sobolev_exponent, OscReport, SobolevReport};
pub use measures::{
    bv_measure, bv_measure_equivalence, energy_vs_bv, holder_seminorm, sg_harmonic_blowup, BVMeasure, BlowupReport,
    EnergyVsBvReport, EquivalenceReport,
};
