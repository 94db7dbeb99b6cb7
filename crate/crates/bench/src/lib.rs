//! Shared fixtures for the criterion benches.

use fractal_bv::families::{bv_family, wbe_family};
use fractal_bv::spectral::DEFAULT_EIGEN_CAP;
use fractal_bv::{build_graph, ApproxGraph, FractalSpec, HeatEngine, TestFunction};

pub fn graph(spec: &FractalSpec, level: usize) -> ApproxGraph {
    build_graph(spec, level, 100_000).expect("bench graph within cap")
}

pub fn engine(g: &ApproxGraph) -> HeatEngine {
    HeatEngine::for_graph(g, DEFAULT_EIGEN_CAP).expect("bench engine")
}

pub fn bv_functions(g: &ApproxGraph) -> Vec<TestFunction> {
    bv_family(g, 1).expect("bench family")
}

pub fn wbe_functions(g: &ApproxGraph) -> Vec<TestFunction> {
    wbe_family(g, 1).expect("bench family")
}
