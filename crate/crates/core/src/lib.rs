//! Numerical analysis of heat kernels, Besov and Korevaar-Schoen seminorms and
//! functions of bounded variation on graph approximations of nested fractals
//! (Vicsek set, Sierpinski gasket), the carpet graph and their products.

pub mod bv;
pub mod error;
pub mod families;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod regularity;
pub mod spectral;
pub mod series;
pub mod sets;

pub use error::{Error, Result};
pub use bv::{BVMeasure, LevelSetProfile};
pub use families::TestFunction;
pub use functionals::{FunctionalReport, PairBudget};
pub use geometry::{build_graph, build_spec, product_graph, ApproxGraph, FractalKind, FractalSpec, MetricOracle};
pub use grid::GridFunction;
pub use series::{ExponentFit, Reduction, ScalingSeries};
pub use regularity::{PairSampler, ScaleVerdict, VerdictParams, WbeReport};
pub use sets::VertexSet;
pub use spectral::{HeatEngine, HeatSemigroup, SpectralData};
