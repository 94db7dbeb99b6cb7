use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;
use crate::grid::GridFunction;
use crate::linalg::{solve_pinned, Laplacian};
use crate::sets::VertexSet;

/// Renormalised graph energy `E(f, g) = sum_edges c (f(x) - f(y)) (g(x) - g(y))`
/// with `c = rho^n` times the edge's base weight.
#[derive(Debug, Clone)]
pub struct DirichletForm<'g> {
    graph: &'g ApproxGraph,
    conductance: f64,
    lap: Laplacian,
}

pub fn assemble_form(graph: &ApproxGraph) -> Result<DirichletForm<'_>> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let conductance = graph.spec().resistance_factor.powi(graph.level() as i32);
    let lap = Laplacian::new(graph, graph.edge_weights(), conductance);
    Ok(DirichletForm { graph, conductance, lap })
}

impl<'g> DirichletForm<'g> {
    pub fn graph(&self) -> &'g ApproxGraph {
        self.graph
    }

    /// Uniform level conductance `rho^n`.
    pub fn conductance(&self) -> f64 {
        self.conductance
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.lap
    }

    pub fn energy(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        f.check(self.graph)?;
        g.check(self.graph)?;
        Ok(self.lap.energy(f, g))
    }

    pub fn energy_of(&self, f: &GridFunction) -> Result<f64> {
        self.energy(f, f)
    }

    /// Stiffness action `(A f)(x) = sum_y c_xy (f(x) - f(y))`.
    pub fn stiffness_apply(&self, f: &GridFunction) -> Result<GridFunction> {
        f.check(self.graph)?;
        let mut out = vec![0.0; f.len()];
        self.lap.apply(f, &mut out);
        Ok(GridFunction::new(out))
    }

    /// Generator action `(-L f)(x) = (A f)(x) / mu(x)`.
    pub fn generator_apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let mut a = self.stiffness_apply(f)?;
        for (v, m) in a.values_mut().iter_mut().zip(self.graph.measure()) {
            *v /= m;
        }
        Ok(a)
    }
}

/// `nu_f(x) = 1/2 sum_{y ~ x} c (f(x) - f(y))^2`; sums to `E(f, f)`.
pub fn energy_measure(form: &DirichletForm<'_>, f: &GridFunction) -> Result<Vec<f64>> {
    f.check(form.graph)?;
    Ok((0..f.len())
        .map(|x| 0.5 * form.lap.row(x).map(|(y, c)| c * (f[x] - f[y]).powi(2)).sum::<f64>())
        .collect())
}

/// Energy minimiser with prescribed values on `pinned`.
pub fn harmonic_extend(
    form: &DirichletForm<'_>,
    boundary_values: &BTreeMap<usize, f64>,
    pinned: &VertexSet,
) -> Result<GridFunction> {
    let n = form.graph.len();
    if pinned.universe() != n {
        return Err(Error::GraphMismatch { expected: n, got: pinned.universe() });
    }
    if pinned.is_empty() {
        return Err(Error::SingularSystem);
    }
    let mut values = vec![0.0; n];
    for x in pinned.iter() {
        values[x] = *boundary_values
            .get(&x)
            .ok_or_else(|| Error::InvalidParameter(format!("no boundary value for pinned vertex {x}")))?;
    }
    let v = solve_pinned(&form.lap, pinned.mask(), &values, &vec![0.0; n])?;
    Ok(GridFunction::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_graph, FractalSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gasket_level_zero_energy() {
        let g = build_graph(&FractalSpec::gasket(), 0, 10).unwrap();
        let form = assemble_form(&g).unwrap();
        let f = GridFunction::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(form.energy_of(&f).unwrap(), 2.0);
        assert_eq!(form.energy_of(&GridFunction::constant(3, 4.0)).unwrap(), 0.0);
    }

    #[test]
    fn gasket_harmonic_extension_rule() {
        let g = build_graph(&FractalSpec::gasket(), 1, 10).unwrap();
        let form = assemble_form(&g).unwrap();
        let b = g.boundary();
        let pinned = VertexSet::from_indices(g.len(), b.iter().copied());
        let vals = BTreeMap::from([(b[0], 1.0), (b[1], 0.0), (b[2], 0.0)]);
        let h = harmonic_extend(&form, &vals, &pinned).unwrap();
        // midpoint opposite the 1-corner gets 1/5, the two adjacent ones 2/5
        let mut mids: Vec<f64> = (0..g.len()).filter(|x| !pinned.contains(*x)).map(|x| h[x]).collect();
        mids.sort_by(f64::total_cmp);
        for (got, want) in mids.iter().zip([0.2, 0.4, 0.4]) {
            assert!((got - want).abs() < 1e-12);
        }
        // unit-conductance energy is 3/5 of the level-0 energy; rho = 5/3 restores it
        let unit = crate::linalg::Laplacian::new(&g, g.edge_weights(), 1.0).energy(&h, &h);
        assert!((unit - 1.2).abs() < 1e-12);
        assert!((form.energy_of(&h).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_extension_minimises_energy() {
        let g = build_graph(&FractalSpec::gasket(), 3, 1000).unwrap();
        let form = assemble_form(&g).unwrap();
        let pinned = VertexSet::from_indices(g.len(), g.boundary().iter().copied());
        let vals: BTreeMap<usize, f64> = g.boundary().iter().zip([1.0, -0.5, 0.25]).map(|(&x, v)| (x, v)).collect();
        let h = harmonic_extend(&form, &vals, &pinned).unwrap();
        let lh = form.stiffness_apply(&h).unwrap();
        for x in (0..g.len()).filter(|&x| !pinned.contains(x)) {
            assert!(lh[x].abs() < 1e-9);
        }
        let e = form.energy_of(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mut c = h.clone();
            for x in (0..g.len()).filter(|&x| !pinned.contains(x)) {
                c.values_mut()[x] += rng.gen_range(-0.1..0.1);
            }
            assert!(form.energy_of(&c).unwrap() >= e);
        }
    }

    #[test]
    fn constant_data_extends_to_constant() {
        let g = build_graph(&FractalSpec::vicsek(), 2, 1000).unwrap();
        let form = assemble_form(&g).unwrap();
        let pinned = VertexSet::from_indices(g.len(), g.boundary().iter().copied());
        let vals: BTreeMap<usize, f64> = g.boundary().iter().map(|&x| (x, 3.5)).collect();
        let h = harmonic_extend(&form, &vals, &pinned).unwrap();
        assert!(h.iter().all(|v| (v - 3.5).abs() < 1e-12));
        assert!(matches!(
            harmonic_extend(&form, &vals, &VertexSet::empty(g.len())),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn energy_measure_total_is_energy() {
        let g = build_graph(&FractalSpec::vicsek(), 2, 1000).unwrap();
        let form = assemble_form(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = GridFunction::new((0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let nu = energy_measure(&form, &f).unwrap();
            let e = form.energy_of(&f).unwrap();
            assert!((nu.iter().sum::<f64>() - e).abs() <= 1e-12 * e.max(1.0));
            assert!(nu.iter().all(|&v| v >= 0.0));
        }
    }
}
