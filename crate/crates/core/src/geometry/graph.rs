use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use super::metric::MetricOracle;
use super::spec::{FractalKind, FractalSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::sets::VertexSet;

/// Default cap on projected vertex counts for graph construction.
pub const DEFAULT_VERTEX_CAP: usize = 20_000;

/// Level-0 template of a self-similar family on an integer lattice.
struct Template {
    /// Level-0 vertices in lattice units of one level-0 cell.
    v0: Vec<[i64; 2]>,
    /// Offsets of the sub-cells, in units of one sub-cell.
    offsets: Vec<[i64; 2]>,
    /// Pairs of template vertices joined by an edge inside a cell.
    cell_edges: Vec<[usize; 2]>,
    /// Template vertices that are essential fixed points.
    boundary: Vec<usize>,
    /// For each boundary vertex, the map whose fixed point it is.
    fixing_map: Vec<usize>,
    l: i64,
}

fn template(kind: &FractalKind) -> Option<Template> {
    match kind {
        FractalKind::Gasket => Some(Template {
            v0: vec![[0, 0], [1, 0], [0, 1]],
            offsets: vec![[0, 0], [1, 0], [0, 1]],
            cell_edges: vec![[0, 1], [0, 2], [1, 2]],
            boundary: vec![0, 1, 2],
            fixing_map: vec![0, 1, 2],
            l: 2,
        }),
        // Cross cell: four corners joined through the centre. Doubled units so the
        // centre sits on the lattice.
        FractalKind::Vicsek => Some(Template {
            v0: vec![[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]],
            offsets: vec![[0, 0], [4, 0], [2, 2], [0, 4], [4, 4]],
            cell_edges: vec![[0, 4], [1, 4], [2, 4], [3, 4]],
            boundary: vec![0, 1, 2, 3],
            fixing_map: vec![0, 1, 4, 3],
            l: 3,
        }),
        FractalKind::CarpetGraph => Some(Template {
            v0: vec![[0, 0], [1, 0], [1, 1], [0, 1]],
            offsets: vec![
                [0, 0],
                [1, 0],
                [2, 0],
                [0, 1],
                [2, 1],
                [0, 2],
                [1, 2],
                [2, 2],
            ],
            cell_edges: vec![[0, 1], [1, 2], [2, 3], [3, 0]],
            boundary: vec![0, 1, 2, 3],
            fixing_map: vec![0, 2, 7, 5],
            l: 3,
        }),
        FractalKind::Product(..) => None,
    }
}

/// Vertex count predicted by the closed form (exact for gasket and vicsek, an
/// upper bound for the carpet).
pub fn projected_vertex_count(kind: &FractalKind, level: usize) -> usize {
    let pow = |b: usize| b.checked_pow(level as u32).unwrap_or(usize::MAX / 8);
    match kind {
        FractalKind::Gasket => 3 * (pow(3) + 1) / 2,
        FractalKind::Vicsek => 4 * pow(5) + 1,
        FractalKind::CarpetGraph => 4usize.saturating_mul(pow(8)),
        FractalKind::Product(a, b) => {
            projected_vertex_count(&a.kind, level).saturating_mul(projected_vertex_count(&b.kind, level))
        }
    }
}

/// A finite level-n approximation of a fractal: vertices, edges, cells and the
/// self-similar vertex measure.
#[derive(Debug)]
pub struct ApproxGraph {
    spec: FractalSpec,
    level: usize,
    coords: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    edge_weights: Vec<f64>,
    cells: Vec<Vec<usize>>,
    boundary: Vec<usize>,
    measure: Vec<f64>,
    mesh: f64,
    diameter: f64,
    adjacency: Vec<Vec<usize>>,
    factors: Option<Arc<(ApproxGraph, ApproxGraph)>>,
    metric: OnceLock<MetricOracle>,
}

impl ApproxGraph {
    pub fn spec(&self) -> &FractalSpec {
        &self.spec
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn len(&self) -> usize {
        self.measure.len()
    }
    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }
    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    /// Base conductance multiplier per edge: 1 on self-similar graphs, the
    /// measure of the frozen coordinate on products.
    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }
    /// Edge length `L^-n`.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }
    pub fn diameter(&self) -> f64 {
        self.diameter
    }
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }
    pub fn factors(&self) -> Option<(&ApproxGraph, &ApproxGraph)> {
        self.factors.as_deref().map(|(a, b)| (a, b))
    }

    pub fn metric(&self) -> &MetricOracle {
        self.metric.get_or_init(|| MetricOracle::new(self))
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.metric().dist(self, x, y)
    }

    /// Vertices of the cell with address `prefix` (any length up to the level).
    /// Product graphs index cells by the pair of factor addresses instead.
    pub fn cell(&self, prefix: &[usize]) -> Result<VertexSet> {
        if self.spec.is_product() {
            return Err(Error::InvalidParameter(
                "product graphs address cells with product_cell".into(),
            ));
        }
        let n = self.spec.cell_count as usize;
        if prefix.len() > self.level || prefix.iter().any(|&w| w >= n) {
            return Err(Error::InvalidParameter(format!(
                "cell address {prefix:?} invalid at level {}",
                self.level
            )));
        }
        let block = n.pow((self.level - prefix.len()) as u32);
        let start = prefix.iter().fold(0usize, |acc, &w| acc * n + w) * block;
        let mut set = VertexSet::empty(self.len());
        for cell in &self.cells[start..start + block] {
            for &v in cell {
                set.insert(v);
            }
        }
        Ok(set)
    }

    /// Images of the essential fixed points under the cell map `prefix`.
    pub fn cell_corners(&self, prefix: &[usize]) -> Result<Vec<usize>> {
        self.cell(prefix)?;
        let t = template(&self.spec.kind).expect("self-similar kind");
        let n = self.spec.cell_count as usize;
        Ok(t.boundary
            .iter()
            .zip(&t.fixing_map)
            .map(|(&b, &m)| {
                let idx = prefix
                    .iter()
                    .copied()
                    .chain(std::iter::repeat(m).take(self.level - prefix.len()))
                    .fold(0usize, |acc, w| acc * n + w);
                self.cells[idx][b]
            })
            .collect())
    }

    /// Union of the corners of all cells at `depth`: the level-`depth`
    /// vertices seen inside this graph.
    pub fn junctions(&self, depth: usize) -> Result<VertexSet> {
        let n = self.spec.cell_count as usize;
        let mut set = VertexSet::empty(self.len());
        let mut word = vec![0usize; depth];
        for c in 0..n.pow(depth as u32) {
            let mut rem = c;
            for k in (0..depth).rev() {
                word[k] = rem % n;
                rem /= n;
            }
            for v in self.cell_corners(&word)? {
                set.insert(v);
            }
        }
        Ok(set)
    }

    /// `cell(a) x cell(b)` on a product graph.
    pub fn product_cell(&self, a: &[usize], b: &[usize]) -> Result<VertexSet> {
        let (ga, gb) = self
            .factors()
            .ok_or_else(|| Error::InvalidParameter("not a product graph".into()))?;
        let ea = ga.cell(a)?;
        let eb = gb.cell(b)?;
        let mut set = VertexSet::empty(self.len());
        for i in ea.iter() {
            for j in eb.iter() {
                set.insert(i * gb.len() + j);
            }
        }
        Ok(set)
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.len()
    }

    fn from_parts(
        spec: FractalSpec,
        level: usize,
        coords: Vec<Vec<f64>>,
        edges: Vec<[usize; 2]>,
        edge_weights: Vec<f64>,
        cells: Vec<Vec<usize>>,
        boundary: Vec<usize>,
        measure: Vec<f64>,
        factors: Option<Arc<(ApproxGraph, ApproxGraph)>>,
    ) -> Self {
        let n = measure.len();
        let mut adjacency = vec![Vec::new(); n];
        for &[a, b] in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        let mesh = (spec.length_ratio as f64).powi(-(level as i32));
        let mut g = ApproxGraph {
            spec,
            level,
            coords,
            edges,
            edge_weights,
            cells,
            boundary,
            measure,
            mesh,
            diameter: 0.0,
            adjacency,
            factors,
            metric: OnceLock::new(),
        };
        g.diameter = match g.factors() {
            Some((a, b)) => {
                let q = g.spec.product_metric_exponent();
                (a.diameter.powf(q) + b.diameter.powf(q)).powf(1.0 / q)
            }
            None => {
                let mut best = 0usize;
                for &s in &g.boundary {
                    let hops = super::metric::bfs_hops(&g, s, u32::MAX);
                    best = best.max(hops.iter().copied().filter(|&h| h != u32::MAX).max().unwrap_or(0) as usize);
                }
                best as f64 * g.mesh
            }
        };
        g
    }
}

/// Builds the level-`level` approximation by enumerating IFS words in
/// lexicographic order; vertices are numbered in order of first appearance.
pub fn build_graph(spec: &FractalSpec, level: usize, cap: usize) -> Result<ApproxGraph> {
    if let FractalKind::Product(a, b) = &spec.kind {
        let ga = build_graph(a, level, cap)?;
        let gb = build_graph(b, level, cap)?;
        return product_graph(ga, gb, cap);
    }
    let projected = projected_vertex_count(&spec.kind, level);
    if projected > cap {
        return Err(Error::SizeCap { what: "graph", requested: projected, cap });
    }
    let t = template(&spec.kind).expect("self-similar kind");
    let n_maps = t.offsets.len();
    let n_cells = n_maps.pow(level as u32);
    let mut index: HashMap<[i64; 2], usize> = HashMap::new();
    let mut lattice: Vec<[i64; 2]> = Vec::new();
    let mut cells = Vec::with_capacity(n_cells);
    let mut edge_set: HashSet<[usize; 2]> = HashSet::new();
    let mut edges = Vec::new();
    let mut word = vec![0usize; level];
    for c in 0..n_cells {
        // word of cell c, most significant letter first
        let mut rem = c;
        for k in (0..level).rev() {
            word[k] = rem % n_maps;
            rem /= n_maps;
        }
        let mut origin = [0i64; 2];
        for &w in &word {
            origin[0] = origin[0] * t.l + t.offsets[w][0];
            origin[1] = origin[1] * t.l + t.offsets[w][1];
        }
        let cell: Vec<usize> = t
            .v0
            .iter()
            .map(|p| {
                let key = [origin[0] + p[0], origin[1] + p[1]];
                *index.entry(key).or_insert_with(|| {
                    lattice.push(key);
                    lattice.len() - 1
                })
            })
            .collect();
        for &[i, j] in &t.cell_edges {
            let (a, b) = (cell[i].min(cell[j]), cell[i].max(cell[j]));
            if edge_set.insert([a, b]) {
                edges.push([a, b]);
            }
        }
        cells.push(cell);
    }
    let nv = lattice.len();
    let cell_mass = (spec.cell_count as f64).powi(-(level as i32)) / t.v0.len() as f64;
    let mut measure = vec![0.0; nv];
    for cell in &cells {
        for &v in cell {
            measure[v] += cell_mass;
        }
    }
    let scale = (t.l as f64).powi(level as i32);
    let coords = lattice
        .iter()
        .map(|&[a, b]| {
            let (a, b) = (a as f64 / scale, b as f64 / scale);
            match spec.kind {
                FractalKind::Gasket => vec![a + b / 2.0, b * 3f64.sqrt() / 2.0],
                FractalKind::Vicsek => vec![a / 2.0, b / 2.0],
                _ => vec![a, b],
            }
        })
        .collect();
    // Essential fixed points: the template boundary vertices of the whole set.
    let full = (t.l).pow(level as u32);
    let boundary = t
        .boundary
        .iter()
        .map(|&i| index[&[t.v0[i][0] * full, t.v0[i][1] * full]])
        .collect();
    let edge_weights = vec![1.0; edges.len()];
    Ok(ApproxGraph::from_parts(
        spec.clone(),
        level,
        coords,
        edges,
        edge_weights,
        cells,
        boundary,
        measure,
        None,
    ))
}

/// Cartesian product with the product measure. Edges change one coordinate
/// along a factor edge; their base weight is the measure of the other
/// coordinate, which makes the heat kernel factorise.
pub fn product_graph(g1: ApproxGraph, g2: ApproxGraph, cap: usize) -> Result<ApproxGraph> {
    if g1.spec != g2.spec {
        return Err(Error::SpecMismatch(g1.spec.name(), g2.spec.name()));
    }
    if g1.level != g2.level {
        return Err(Error::InvalidParameter(format!(
            "product factors must share a level ({} vs {})",
            g1.level, g2.level
        )));
    }
    let (n1, n2) = (g1.len(), g2.len());
    let n = n1 * n2;
    if n > cap {
        return Err(Error::SizeCap { what: "product graph", requested: n, cap });
    }
    let spec = FractalSpec::product(&g1.spec, &g2.spec)?;
    let id = |a: usize, b: usize| a * n2 + b;
    let mut coords = Vec::with_capacity(n);
    let mut measure = Vec::with_capacity(n);
    for a in 0..n1 {
        for b in 0..n2 {
            let mut c = g1.coords[a].clone();
            c.extend_from_slice(&g2.coords[b]);
            coords.push(c);
            measure.push(g1.measure[a] * g2.measure[b]);
        }
    }
    let mut edges = Vec::new();
    let mut edge_weights = Vec::new();
    for (k, &[a, a2]) in g1.edges.iter().enumerate() {
        for b in 0..n2 {
            edges.push([id(a, b), id(a2, b)]);
            edge_weights.push(g1.edge_weights[k] * g2.measure[b]);
        }
    }
    for a in 0..n1 {
        for (k, &[b, b2]) in g2.edges.iter().enumerate() {
            edges.push([id(a, b), id(a, b2)]);
            edge_weights.push(g2.edge_weights[k] * g1.measure[a]);
        }
    }
    let mut cells = Vec::with_capacity(g1.cells.len() * g2.cells.len());
    for c1 in &g1.cells {
        for c2 in &g2.cells {
            let mut cell = Vec::with_capacity(c1.len() * c2.len());
            for &a in c1 {
                for &b in c2 {
                    cell.push(id(a, b));
                }
            }
            cells.push(cell);
        }
    }
    let mut boundary = Vec::new();
    for &a in &g1.boundary {
        for &b in &g2.boundary {
            boundary.push(id(a, b));
        }
    }
    let level = g1.level;
    Ok(ApproxGraph::from_parts(
        spec,
        level,
        coords,
        edges,
        edge_weights,
        cells,
        boundary,
        measure,
        Some(Arc::new((g1, g2))),
    ))
}

/// Resistance renormalisation of a self-similar network: the ratio of the
/// level-1 and level-0 effective resistances between two boundary vertices.
pub fn renormalization_factor(kind: &FractalKind) -> Result<f64> {
    let spec = match kind {
        FractalKind::Gasket => FractalSpec::gasket(),
        FractalKind::Vicsek => FractalSpec::vicsek(),
        _ => return Err(Error::InvalidParameter("no renormalisation oracle for this kind".into())),
    };
    let g0 = build_graph(&spec, 0, usize::MAX)?;
    let g1 = build_graph(&spec, 1, usize::MAX)?;
    let (a0, b0) = (g0.boundary[0], g0.boundary[1]);
    let (a1, b1) = (g1.boundary[0], g1.boundary[1]);
    Ok(effective_resistance(&g1, a1, b1)? / effective_resistance(&g0, a0, b0)?)
}

/// Effective resistance between `a` and `b` with the graph's base weights as
/// conductances.
pub fn effective_resistance(g: &ApproxGraph, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut pinned = vec![false; g.len()];
    pinned[b] = true;
    let mut rhs = vec![0.0; g.len()];
    rhs[a] = 1.0;
    let v = linalg::grounded_laplacian_solve(g, &g.edge_weights, &pinned, &vec![0.0; g.len()], &rhs)?;
    Ok(v[a])
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    spec: FractalSpec,
    level: usize,
    vertices: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    cells: Vec<Vec<usize>>,
    boundary: Vec<usize>,
    measure: Vec<f64>,
}

impl ApproxGraph {
    /// JSON export. Distances are never serialised.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson {
            spec: self.spec.clone(),
            level: self.level,
            vertices: self.coords.clone(),
            edges: self.edges.clone(),
            cells: self.cells.clone(),
            boundary: self.boundary.clone(),
            measure: self.measure.clone(),
        })
        .expect("graph serialises")
    }

    /// JSON import. Product graphs are rebuilt from their factor specs and
    /// checked against the file.
    pub fn from_json(text: &str) -> Result<ApproxGraph> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("graph json: {e}")))?;
        let nv = raw.measure.len();
        if raw.vertices.len() != nv {
            return Err(Error::GraphMismatch { expected: nv, got: raw.vertices.len() });
        }
        let bad_index = raw
            .edges
            .iter()
            .flatten()
            .chain(raw.cells.iter().flatten())
            .chain(raw.boundary.iter())
            .any(|&i| i >= nv);
        if bad_index || raw.measure.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidParameter("graph json: bad index or non-positive measure".into()));
        }
        if raw.spec.is_product() {
            let g = build_graph(&raw.spec, raw.level, usize::MAX)?;
            if g.len() != nv || g.edges != raw.edges {
                return Err(Error::InvalidParameter("product graph json does not match its spec".into()));
            }
            return Ok(g);
        }
        let weights = vec![1.0; raw.edges.len()];
        let g = ApproxGraph::from_parts(
            raw.spec,
            raw.level,
            raw.vertices,
            raw.edges,
            weights,
            raw.cells,
            raw.boundary,
            raw.measure,
            None,
        );
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }
}
