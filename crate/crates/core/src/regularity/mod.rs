//! Weak Bakry-Emery estimates, heat-kernel regularity, pseudo-Poincare and
//! smoothing inequalities, and critical-exponent scans.

mod pairs;
mod scan;
mod smoothing;
mod verdict;
mod wbe;

pub use pairs::{sample_pairs, PairSampler, PairSet};
pub use scan::{critical_exponent_scan, exponent_fit, ScanEntry, ScanReport};
pub use smoothing::{beta_p, pseudo_poincare_check, pt_smoothing_check, riesz_check, FamilyRatioReport, FunctionRatio, RieszReport};
pub use verdict::{ScaleVerdict, VerdictParams};
pub use wbe::{kernel_holder_check, poly_kernel_bound_check, tensorization_check, wbe_ratio, TensorizationReport, WbeReport};
