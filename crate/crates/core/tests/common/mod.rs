#![allow(dead_code)]

use std::collections::BTreeMap;

use larr::dataset::{DataArray, Dataset, VariableMap};
use larr::events::make_event_variable;
use larr::{dims, Dims, Unit, Variable, VariableView};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All ordered selections of distinct labels from `pool`, including the empty one.
pub fn label_orders(pool: &[&'static str]) -> Vec<Vec<&'static str>> {
    let mut out = vec![vec![]];
    for &l in pool {
        for rest in label_orders(&pool.iter().copied().filter(|&x| x != l).collect::<Vec<_>>()) {
            let mut p = vec![l];
            p.extend(rest);
            out.push(p);
        }
    }
    out
}

pub fn dims_of(labels: &[&str], extents: &BTreeMap<&str, usize>) -> Dims {
    Dims::new(labels.iter().map(|l| (*l, extents[l]))).unwrap()
}

/// Reads element `index` (in the view's own dim order) through a naive
/// row-major computation on a contiguous copy.
pub fn at(values: &[f64], dims: &Dims, index: &BTreeMap<&str, usize>) -> f64 {
    let mut flat = 0;
    for (l, e) in dims.iter() {
        flat = flat * e + index[l];
    }
    values[flat]
}

/// Every multi-index of `dims` as a label map, in row-major order.
pub fn indices(dims: &Dims) -> Vec<BTreeMap<&str, usize>> {
    let mut out = Vec::with_capacity(dims.volume());
    let labels: Vec<&str> = dims.labels().iter().map(String::as_str).collect();
    let shape = dims.shape();
    for mut flat in 0..dims.volume() {
        let mut idx = BTreeMap::new();
        for d in (0..shape.len()).rev() {
            idx.insert(labels[d], flat % shape[d]);
            flat /= shape[d];
        }
        out.push(idx);
    }
    out
}

pub fn f64_values(v: &VariableView<'_>) -> Vec<f64> {
    v.values_vec::<f64>().unwrap()
}

/// Unit-weight event data with a `tof` event coordinate.
pub fn unit_events(dims: Dims, tof: Vec<Vec<f64>>) -> DataArray {
    let weights: Vec<Vec<f64>> = tof.iter().map(|l| vec![1.0; l.len()]).collect();
    let data = make_event_variable(dims.clone(), Unit::COUNTS, weights, None).unwrap();
    let tof = make_event_variable(dims, Unit::US, tof, None).unwrap();
    DataArray::new(data, [("tof".to_string(), tof)].into(), VariableMap::new()).unwrap()
}

/// Random event lists over `pixels` pixels with `events` events in total,
/// tof uniform in `[lo, hi)`.
pub fn random_lists(rng: &mut ChaCha8Rng, pixels: usize, events: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut lists = vec![Vec::new(); pixels];
    for _ in 0..events {
        let p = rng.random_range(0..pixels);
        lists[p].push(rng.random_range(lo..hi));
    }
    lists
}

pub fn edges(dim: &str, unit: Unit, values: Vec<f64>) -> Variable {
    let n = values.len();
    Variable::from_vec(Dims::new([(dim, n)]).unwrap(), unit, values).unwrap()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Four-item dataset: `a` 3-D and `b` 2-D with
/// variances, `c` 1-D, `d` 0-D; coords `x`, `y`, `z` (bin edges) and a
/// non-dimension coord `labels` on `y`; a scalar attribute on `a`.
pub fn four_item_dataset() -> Dataset {
    let (nx, ny, nz) = (4, 3, 2);
    let seq = |n: usize, scale: f64, offset: f64| -> Vec<f64> {
        (0..n).map(|i| offset + scale * i as f64).collect()
    };
    let a = Variable::with_variances(
        dims!["x" => nx, "y" => ny, "z" => nz],
        Unit::M,
        seq(nx * ny * nz, 0.5, 1.0),
        seq(nx * ny * nz, 0.01, 0.1),
    )
    .unwrap();
    let b = Variable::with_variances(
        dims!["y" => ny, "z" => nz],
        Unit::M,
        seq(ny * nz, 1.5, -2.0),
        seq(ny * nz, 0.02, 0.05),
    )
    .unwrap();
    let c = Variable::from_vec(dims!["x" => nx], Unit::S, seq(nx, 2.0, 0.0)).unwrap();
    let d = Variable::scalar(42i64, Unit::COUNTS).unwrap();
    let mut ds = Dataset::new();
    ds.set_coord("x", Variable::from_vec(dims!["x" => nx], Unit::M, seq(nx, 0.1, 0.0)).unwrap()).unwrap();
    ds.set_coord("y", Variable::from_vec(dims!["y" => ny], Unit::M, seq(ny, 0.2, 1.0)).unwrap()).unwrap();
    ds.set_coord("z", Variable::from_vec(dims!["z" => nz + 1], Unit::M, seq(nz + 1, 0.3, -0.3)).unwrap())
        .unwrap();
    ds.set_coord(
        "labels",
        Variable::from_vec(
            dims!["y" => ny],
            Unit::DIMENSIONLESS,
            vec!["low".to_string(), "mid".into(), "high".into()],
        )
        .unwrap(),
    )
    .unwrap();
    ds.set(
        "a",
        DataArray::from_data(a)
            .unwrap()
            .with_attr("temperature", Variable::scalar_with_variance(293.0, 0.25, Unit::K).unwrap())
            .unwrap(),
    )
    .unwrap();
    ds.set("b", DataArray::from_data(b).unwrap()).unwrap();
    ds.set("c", DataArray::from_data(c).unwrap()).unwrap();
    ds.set("d", DataArray::from_data(d).unwrap()).unwrap();
    ds
}

pub fn shuffled<T>(rng: &mut ChaCha8Rng, mut v: Vec<T>) -> Vec<T> {
    v.shuffle(rng);
    v
}
