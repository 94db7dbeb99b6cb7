//! Seeded test-function families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::error::Result;
use crate::geometry::ApproxGraph;
use crate::grid::GridFunction;
use crate::sets::VertexSet;
use crate::spectral::{assemble_form, harmonic_extend};

/// A labelled test function.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub label: String,
    pub f: GridFunction,
}

fn words(alphabet: usize, depth: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..alphabet.pow(depth as u32)).map(move |c| {
        let mut w = vec![0; depth];
        let mut rem = c;
        for k in (0..depth).rev() {
            w[k] = rem % alphabet;
            rem /= alphabet;
        }
        w
    })
}

fn addr(w: &[usize]) -> String {
    w.iter().map(|d| d.to_string()).collect()
}

/// Indicators of the cells with the given addresses. On product graphs the
/// address is split as `(a, b)` halves of equal depth.
pub fn cell_indicator(g: &ApproxGraph, word: &[usize]) -> Result<TestFunction> {
    let set = if g.spec().is_product() {
        let (a, b) = word.split_at(word.len() / 2);
        g.product_cell(a, b)?
    } else {
        g.cell(word)?
    };
    Ok(TestFunction { label: format!("cell[{}]", addr(word)), f: set.indicator() })
}

/// Up to `per_depth` cell indicators at each depth, spread evenly through the
/// lexicographic order of addresses.
pub fn cell_indicators(g: &ApproxGraph, depths: &[usize], per_depth: usize) -> Result<Vec<TestFunction>> {
    let mut out = Vec::new();
    for &d in depths {
        let all: Vec<Vec<usize>> = if let Some((a, _)) = g.factors() {
            let na = a.spec().cell_count as usize;
            let fw: Vec<Vec<usize>> = words(na, d).collect();
            fw.iter().flat_map(|x| fw.iter().map(move |y| [x.clone(), y.clone()].concat())).collect()
        } else {
            words(g.spec().cell_count as usize, d).collect()
        };
        let k = per_depth.min(all.len());
        for i in 0..k {
            out.push(cell_indicator(g, &all[i * all.len() / k])?);
        }
    }
    Ok(out)
}

/// Harmonic off the depth-`depth` junctions, with seeded values in `[0, 1]`
/// at the junctions.
pub fn piecewise_harmonic(g: &ApproxGraph, depth: usize, seed: u64) -> Result<TestFunction> {
    let pinned = g.junctions(depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: BTreeMap<usize, f64> = pinned.iter().map(|x| (x, rng.gen_range(0.0..1.0))).collect();
    let form = assemble_form(g)?;
    let f = harmonic_extend(&form, &values, &pinned)?;
    Ok(TestFunction { label: format!("harmonic[d{depth},s{seed}]"), f })
}

/// Rounds `f` to `levels` evenly spaced values between its minimum and maximum.
pub fn quantized(tf: &TestFunction, levels: usize) -> TestFunction {
    let (lo, hi) = tf.f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let steps = levels.max(2) as f64 - 1.0;
    let f = if hi > lo {
        tf.f.iter().map(|&x| lo + ((x - lo) / (hi - lo) * steps).round() / steps * (hi - lo)).collect()
    } else {
        tf.f.to_vec()
    };
    TestFunction { label: format!("{}~q{levels}", tf.label), f: GridFunction::new(f) }
}

/// Harmonic extension of `corner_values` on the boundary vertices.
pub fn corner_harmonic(g: &ApproxGraph, corner_values: &[f64]) -> Result<GridFunction> {
    let pinned = VertexSet::from_indices(g.len(), g.boundary().iter().copied());
    let values: BTreeMap<usize, f64> = g.boundary().iter().copied().zip(corner_values.iter().copied()).collect();
    harmonic_extend(&assemble_form(g)?, &values, &pinned)
}

/// Seeded `+-1` vertex functions.
pub fn random_signs(g: &ApproxGraph, count: usize, seed: u64) -> Vec<TestFunction> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let f = (0..g.len()).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            TestFunction { label: format!("sign[{i}]"), f: GridFunction::new(f) }
        })
        .collect()
}

/// Constant on each depth-`depth` cell with seeded values in `0..levels`;
/// a vertex shared by several cells takes the value of the first address.
pub fn piecewise_cell_constant(g: &ApproxGraph, depth: usize, levels: u32, seed: u64) -> Result<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = vec![f64::NAN; g.len()];
    for w in words(g.spec().cell_count as usize, depth) {
        let v = rng.gen_range(0..levels) as f64;
        for x in g.cell(&w)?.iter() {
            if f[x].is_nan() {
                f[x] = v;
            }
        }
    }
    Ok(TestFunction { label: format!("cellconst[d{depth},s{seed}]"), f: GridFunction::new(f) })
}

/// Cell indicators at up to three depths plus, on nested fractals, piecewise
/// harmonic functions: the family used for the BV checks.
pub fn bv_family(g: &ApproxGraph, seed: u64) -> Result<Vec<TestFunction>> {
    let depths: Vec<usize> = (1..=g.level().min(3)).collect();
    let mut out = cell_indicators(g, &depths, 3)?;
    if !g.spec().is_product() {
        for d in 0..g.level().min(2) {
            out.push(piecewise_harmonic(g, d, seed.wrapping_add(d as u64))?);
        }
    }
    Ok(out)
}

/// BV family plus ten seeded random signs.
pub fn wbe_family(g: &ApproxGraph, seed: u64) -> Result<Vec<TestFunction>> {
    let mut out = bv_family(g, seed)?;
    out.extend(random_signs(g, 10, seed));
    Ok(out)
}
