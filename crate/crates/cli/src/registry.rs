/// A registry entry: a stable id and the library operations it chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub chain: &'static str,
}

const fn entry(id: &'static str, description: &'static str, chain: &'static str) -> ExperimentInfo {
    ExperimentInfo { id, description, chain }
}

/// The experiment catalog. Ids are part of the command-line contract.
pub const EXPERIMENTS: &[ExperimentInfo] = &[
    entry(
        "sanity",
        "heat semigroup identities: conservation, symmetry, semigroup law, energy",
        "spectral::spectral_sanity",
    ),
    entry(
        "besov-equivalence",
        "heat-based against metric-based Besov seminorms at alpha = d_H",
        "functionals::heat_besov_norms + functionals::besov_n_series",
    ),
    entry(
        "locality",
        "sup against min over scales of the KS seminorm at lambda = d_H",
        "functionals::ks_series",
    ),
    entry("coarea", "Var(f) against the integral of level-set perimeters", "bv::coarea_check"),
    entry(
        "perimeter-minkowski",
        "perimeter of cells against their lower Minkowski content",
        "bv::perimeter_vs_minkowski",
    ),
    entry("sobolev", "L^{1*} norm against Var on cell indicators", "bv::sobolev_check"),
    entry("osc", "oscillation against Var", "bv::osc_check"),
    entry("bv-measures", "pairwise density bounds of the BV measures across scales", "bv::bv_measure_equivalence"),
    entry("energy-vs-bv", "energy measure against the BV lower envelope", "bv::energy_vs_bv"),
    entry("wbe", "normalized Hoelder sup H(t) for each kappa", "regularity::wbe_ratio"),
    entry(
        "kernel-holder",
        "Hoelder regularity of the heat kernel and polynomial kernel bound",
        "regularity::kernel_holder_check + regularity::poly_kernel_bound_check",
    ),
    entry("pseudo-poincare", "pseudo-Poincare ratios for p = 1, 2", "regularity::pseudo_poincare_check"),
    entry("pt-smoothing", "P_t smoothing ratios for p = 2", "regularity::pt_smoothing_check"),
    entry("riesz", "Besov seminorm against fractional powers of the generator", "regularity::riesz_check"),
    entry("tensorization", "wBE on a factor and on its square", "regularity::tensorization_check"),
    entry("exponent-scan", "critical Besov exponent estimated from growth over scales", "regularity::critical_exponent_scan"),
    entry(
        "sg-harmonic-blowup",
        "KS variation of a corner harmonic function across levels",
        "bv::sg_harmonic_blowup",
    ),
];

pub fn find(id: &str) -> Option<&'static ExperimentInfo> {
    EXPERIMENTS.iter().find(|e| e.id == id)
}
