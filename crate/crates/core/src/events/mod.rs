//! Event data: one variable-length list of events per dense element.
//!
//! An event data array holds event-list data together with at least one
//! event coordinate, an event-list coordinate whose list lengths match the
//! data. Dense coordinates describe the dense dims as usual.

mod storage;

pub use storage::{EventBuilder, EventStorage};

use std::collections::BTreeMap;

use crate::dataset::{DataArray, DataArrayView, VariableMap};
use crate::error::{Error, Result};
use crate::ops::BinaryOp;
use crate::units::Unit;
use crate::variable::{DType, Dims, Numeric, Values, Variable, VariableView};

/// Builds an event-list variable from per-element lists.
pub fn make_event_variable<T: Numeric>(
    dims: Dims,
    unit: Unit,
    lists: Vec<Vec<T>>,
    variances: Option<Vec<Vec<T>>>,
) -> Result<Variable> {
    Variable::from_lists(dims, unit, lists, variances)
}

/// Offsets and events of an event-list view in logical order, as f64.
fn flat_f64(v: &VariableView<'_>, variances: bool) -> (Vec<usize>, Vec<f64>) {
    fn go<T: Numeric>(v: &VariableView<'_>, variances: bool) -> (Vec<usize>, Vec<f64>) {
        let var = v.underlying();
        let buf = if variances { var.variances() } else { Some(var.values()) };
        let s = T::events(buf.expect("variances present")).expect("event dtype");
        let mut offsets = Vec::with_capacity(v.len() + 1);
        let mut flat = Vec::new();
        offsets.push(0);
        for p in v.layout().positions() {
            flat.extend(s.list(p).iter().map(|x| x.to_f64()));
            offsets.push(flat.len());
        }
        (offsets, flat)
    }
    match v.dtype() {
        DType::EventFloat64 => go::<f64>(v, variances),
        DType::EventFloat32 => go::<f32>(v, variances),
        DType::EventInt64 => go::<i64>(v, variances),
        DType::EventInt32 => go::<i32>(v, variances),
        _ => unreachable!("event dtype checked by caller"),
    }
}

fn require_event_data(da: &DataArrayView<'_>, op: &str) -> Result<()> {
    if !da.data().dtype().is_event() {
        return Err(Error::Type(format!("{op} requires event data, got {}", da.data().dtype())));
    }
    Ok(())
}

/// Validated bin edges as f64, with their dim label.
pub(crate) fn edge_values(edges: &VariableView<'_>) -> Result<(String, Vec<f64>)> {
    if edges.dims().rank() != 1 {
        return Err(Error::Edges(format!("bin edges must be 1-D, got {}", edges.dims())));
    }
    let values: Vec<f64> = match edges.dtype() {
        DType::Float64 => edges.values_vec::<f64>()?,
        DType::Float32 => edges.values_vec::<f32>()?.into_iter().map(f64::from).collect(),
        DType::Int64 => edges.values_vec::<i64>()?.into_iter().map(|x| x as f64).collect(),
        DType::Int32 => edges.values_vec::<i32>()?.into_iter().map(f64::from).collect(),
        other => return Err(Error::Type(format!("bin edges cannot be {other}"))),
    };
    if values.len() < 2 {
        return Err(Error::Edges("at least two bin edges are required".into()));
    }
    if let Some(i) = values.windows(2).position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::Edges(format!("bin edges must be strictly increasing (edges {i} and {})", i + 1)));
    }
    Ok((edges.dims().labels()[0].clone(), values))
}

/// Bin of `x` under the half-open rule, if in range.
#[inline]
pub(crate) fn find_bin(edges: &[f64], x: f64) -> Option<usize> {
    if !(x >= edges[0] && x < edges[edges.len() - 1]) {
        return None;
    }
    Some(edges.partition_point(|&e| e <= x) - 1)
}

/// Histograms event data along the event coordinate named after the dim
/// of `edges`.
///
/// Event `e` falls in bin `k` iff `edges[k] <= e < edges[k + 1]`; other
/// events are discarded. Bin values are the summed event weights. Bin
/// variances are the summed weight variances when the weights carry
/// variances; otherwise, for weights in `counts`, the summed weights
/// (Poisson statistics). The output has the data's dense dims followed by
/// the edge dim, with `edges` as its bin-edge coordinate.
pub fn histogram<'a, 'b>(
    da: impl Into<DataArrayView<'a>>,
    edges: impl Into<VariableView<'b>>,
) -> Result<DataArray> {
    let (da, edges) = (da.into(), edges.into());
    require_event_data(&da, "histogram")?;
    let (dim, bounds) = edge_values(&edges)?;
    let coord = da
        .coords()
        .get(&dim)
        .filter(|c| c.dtype().is_event())
        .ok_or_else(|| Error::Coord(format!("no event coordinate '{dim}' to histogram")))?;
    if coord.unit() != edges.unit() {
        return Err(Error::Unit(format!(
            "bin edges in {} do not match event coordinate '{dim}' in {}",
            edges.unit(),
            coord.unit()
        )));
    }
    if da.dims().contains(&dim) {
        return Err(Error::Dims(format!("data already has dimension '{dim}'")));
    }
    let order: Vec<&str> = da.dims().labels().iter().map(String::as_str).collect();
    let coord = coord.transpose(&order)?;
    let (offsets, positions) = flat_f64(&coord, false);
    let (_, weights) = flat_f64(da.data(), false);
    let weight_vars = da.data().has_variances().then(|| flat_f64(da.data(), true).1);
    let poisson = weight_vars.is_none() && da.unit() == Unit::COUNTS;

    let nbins = bounds.len() - 1;
    let lists = offsets.len() - 1;
    let mut values = vec![0.0; lists * nbins];
    let mut variances = (weight_vars.is_some() || poisson).then(|| vec![0.0; lists * nbins]);
    for list in 0..lists {
        let row = list * nbins;
        for j in offsets[list]..offsets[list + 1] {
            if let Some(k) = find_bin(&bounds, positions[j]) {
                values[row + k] += weights[j];
                if let Some(out) = variances.as_mut() {
                    out[row + k] += match &weight_vars {
                        Some(v) => v[j],
                        None => weights[j],
                    };
                }
            }
        }
    }
    let mut dims = da.dims().clone();
    dims.push(dim.clone(), nbins)?;
    let data = Variable::new(dims, da.unit(), Values::Float64(values), variances.map(Values::Float64))?;
    let mut coords: VariableMap = da
        .coords()
        .iter()
        .filter(|(_, c)| !c.dtype().is_event())
        .map(|(k, c)| (k.clone(), c.to_variable()))
        .collect();
    coords.insert(dim, edges.to_variable());
    let attrs = da
        .attrs()
        .iter()
        .filter(|(_, a)| !a.dtype().is_event())
        .map(|(k, a)| (k.clone(), a.to_variable()))
        .collect();
    DataArray::new(data, coords, attrs)
}

/// Joins runs of consecutive lists of an event buffer; run `i` spans
/// `runs[i]` lists.
pub(crate) fn merge_runs(values: Values, runs: &[usize]) -> Values {
    fn go<T>(s: EventStorage<T>, runs: &[usize]) -> EventStorage<T> {
        let (old, flat) = s.into_parts();
        let mut offsets = Vec::with_capacity(runs.len() + 1);
        let mut at = 0;
        offsets.push(old[0]);
        for &n in runs {
            at += n;
            offsets.push(old[at]);
        }
        EventStorage::from_parts(offsets, flat).expect("merged offsets stay valid")
    }
    match values {
        Values::EventFloat64(s) => Values::EventFloat64(go(s, runs)),
        Values::EventFloat32(s) => Values::EventFloat32(go(s, runs)),
        Values::EventInt64(s) => Values::EventInt64(go(s, runs)),
        Values::EventInt32(s) => Values::EventInt32(go(s, runs)),
        dense => dense,
    }
}

/// Concatenates the lists of an event variable along dense `dim`.
fn flatten_variable(v: &VariableView<'_>, out: &Dims, dim: &str) -> Result<Variable> {
    let mut order: Vec<&str> = out.labels().iter().map(String::as_str).collect();
    order.push(dim);
    let t = v.transpose(&order)?;
    let n = v.dims().extent(dim).expect("dim present");
    let grouped = t.to_variable();
    let runs = vec![n; out.volume()];
    let (_, unit, values, variances) = grouped.into_parts();
    Variable::new(out.clone(), unit, merge_runs(values, &runs), variances.map(|x| merge_runs(x, &runs)))
}

/// Removes dense dim `dim` by concatenating, for each remaining element,
/// the event lists along `dim` in ascending order. Dense coordinates and
/// attributes depending on `dim` are dropped.
pub fn flatten<'a>(da: impl Into<DataArrayView<'a>>, dim: &str) -> Result<DataArray> {
    let da = da.into();
    require_event_data(&da, "flatten")?;
    if !da.dims().contains(dim) {
        let internal = da.coords().get(dim).is_some_and(|c| c.dtype().is_event());
        return Err(Error::Dims(if internal {
            format!("'{dim}' is the internal event dimension and cannot be flattened")
        } else {
            format!("dimension '{dim}' not found in {}", da.dims())
        }));
    }
    let out = da.dims().without(dim);
    let data = flatten_variable(da.data(), &out, dim)?;
    let mut coords = VariableMap::new();
    for (name, c) in da.coords() {
        if c.dtype().is_event() {
            coords.insert(name.clone(), flatten_variable(c, &out, dim)?);
        } else if !c.dims().contains(dim) {
            coords.insert(name.clone(), c.to_variable());
        }
    }
    let attrs = da
        .attrs()
        .iter()
        .filter(|(_, a)| !a.dims().contains(dim))
        .map(|(k, a)| (k.clone(), a.to_variable()))
        .collect();
    DataArray::new(data, coords, attrs)
}

/// Per element, the list of `b` appended to the list of `a`.
fn append_lists(a: &VariableView<'_>, b: &VariableView<'_>) -> Result<Variable> {
    if a.unit() != b.unit() {
        return Err(Error::Unit(format!("cannot concatenate events in {} and {}", a.unit(), b.unit())));
    }
    if a.dtype() != b.dtype() || a.has_variances() != b.has_variances() {
        return Err(Error::Type(format!("cannot concatenate {} and {} events", a.dtype(), b.dtype())));
    }
    let order: Vec<&str> = a.dims().labels().iter().map(String::as_str).collect();
    let (x, y) = (a.to_variable(), b.transpose(&order)?.to_variable());
    let n = x.len();
    let picks: Vec<usize> = (0..n).flat_map(|i| [i, n + i]).collect();
    let join = |p: &Values, q: &Values| -> Result<Values> {
        Ok(merge_runs(p.concat(q)?.gather(picks.iter().copied()), &vec![2; n]))
    };
    let values = join(x.values(), y.values())?;
    let variances = match (x.variances(), y.variances()) {
        (Some(p), Some(q)) => Some(join(p, q)?),
        _ => None,
    };
    Variable::new(a.dims().clone(), a.unit(), values, variances)
}

/// Appends, per dense element, the events of `b` to those of `a`, for the
/// data and every event coordinate. Dense coordinates must match.
pub fn event_concatenate<'a, 'b>(
    a: impl Into<DataArrayView<'a>>,
    b: impl Into<DataArrayView<'b>>,
) -> Result<DataArray> {
    let (a, b) = (a.into(), b.into());
    require_event_data(&a, "event concatenation")?;
    require_event_data(&b, "event concatenation")?;
    if !a.dims().is_permutation_of(b.dims()) {
        return Err(Error::Shape(format!("dense dims {} and {} differ", a.dims(), b.dims())));
    }
    let names = |d: &DataArrayView<'_>| -> Vec<String> {
        d.coords().iter().filter(|(_, c)| c.dtype().is_event()).map(|(k, _)| k.clone()).collect()
    };
    if names(&a) != names(&b) {
        return Err(Error::Coord(format!("event coordinates {:?} and {:?} differ", names(&a), names(&b))));
    }
    let data = append_lists(a.data(), b.data())?;
    let mut coords = BTreeMap::new();
    for (name, ca) in a.coords() {
        let cb = b.coord(name)?;
        let merged = if ca.dtype().is_event() {
            append_lists(ca, cb)?
        } else if ca.identical(cb) {
            ca.to_variable()
        } else {
            return Err(Error::Coord(format!("mismatch in coordinate '{name}'")));
        };
        coords.insert(name.clone(), merged);
    }
    for name in b.coords().keys() {
        if !coords.contains_key(name) {
            return Err(Error::Coord(format!("coordinate '{name}' missing from the left operand")));
        }
    }
    let attrs = a
        .attrs()
        .iter()
        .filter(|(k, v)| b.attrs().get(*k).is_some_and(|w| w.identical(*v)))
        .map(|(k, v)| (k.clone(), v.to_variable()))
        .collect();
    DataArray::new(data, coords, attrs)
}

/// Which event-list variable of an event data array an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target<'n> {
    Data,
    Coord(&'n str),
}

/// Applies `op` between an event-list variable of `da` and a dense
/// operand broadcast into every list. List lengths are unchanged.
pub fn event_dense_op<'a, 'b>(
    da: impl Into<DataArrayView<'a>>,
    dense: impl Into<VariableView<'b>>,
    op: BinaryOp,
    target: Target<'_>,
) -> Result<DataArray> {
    let (da, dense) = (da.into(), dense.into());
    require_event_data(&da, "event-dense operation")?;
    if dense.dtype().is_event() {
        return Err(Error::Type("the dense operand holds event lists".into()));
    }
    if let Some(l) = dense.dims().labels().iter().find(|l| !da.dims().contains(l)) {
        return Err(Error::Dims(format!(
            "dense operand dimension '{l}' is not a dimension of the event data {}",
            da.dims()
        )));
    }
    let mut out = da.to_data_array();
    match target {
        Target::Data => {
            let result = op.apply(da.data(), &dense)?;
            let (_, coords, attrs) = out.into_parts();
            out = DataArray::new(result, coords, attrs)?;
        }
        Target::Coord(name) => {
            let coord = da.coord(name)?;
            if !coord.dtype().is_event() {
                return Err(Error::Coord(format!("'{name}' is not an event coordinate")));
            }
            let result = op.apply(coord, &dense)?;
            out.set_coord(name, result)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims;

    fn events(dims: Dims, tof: Vec<Vec<f64>>) -> DataArray {
        let weights: Vec<Vec<f64>> = tof.iter().map(|l| vec![1.0; l.len()]).collect();
        let data = make_event_variable(dims.clone(), Unit::COUNTS, weights, None).unwrap();
        let coord = make_event_variable(dims, Unit::US, tof, None).unwrap();
        DataArray::new(data, [("tof".to_string(), coord)].into(), VariableMap::new()).unwrap()
    }

    fn edges(v: Vec<f64>) -> Variable {
        let n = v.len();
        Variable::from_vec(dims!["tof" => n], Unit::US, v).unwrap()
    }

    #[test]
    fn storage_shape_checks() {
        let v =
            make_event_variable(dims!["x" => 2], Unit::US, vec![vec![1.0, 2.0], vec![3.0]], None).unwrap();
        assert_eq!(v.events_as::<f64>().unwrap().offsets(), &[0, 2, 3]);
        let three = vec![vec![1.0], vec![2.0], vec![3.0]];
        assert!(matches!(make_event_variable(dims!["x" => 2], Unit::US, three, None), Err(Error::Shape(_))));
        let r = make_event_variable(
            dims!["x" => 2],
            Unit::US,
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            Some(vec![vec![1.0, 1.0], vec![1.0]]),
        );
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn event_coordinate_is_required() {
        let data = make_event_variable(dims!["x" => 1], Unit::COUNTS, vec![vec![1.0]], None).unwrap();
        assert!(matches!(DataArray::from_data(data.clone()), Err(Error::Coord(_))));
        let short = make_event_variable(dims!["x" => 1], Unit::US, vec![Vec::<f64>::new()], None).unwrap();
        let r = DataArray::new(data, [("tof".to_string(), short)].into(), VariableMap::new());
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn histogram_examples() {
        let da = events(dims![], vec![vec![0.5, 1.5, 1.7, 2.5]]);
        let h = histogram(&da, &edges(vec![0.0, 1.0, 2.0, 3.0])).unwrap();
        assert_eq!(h.dims(), &dims!["tof" => 3]);
        assert_eq!(h.data().values_as::<f64>().unwrap(), &[1.0, 2.0, 1.0]);
        assert_eq!(h.data().variances_as::<f64>().unwrap(), &[1.0, 2.0, 1.0]);
        assert!(h.is_edges("tof", "tof").unwrap());
        let da = events(dims![], vec![vec![0.0, 3.0]]);
        let h = histogram(&da, &edges(vec![0.0, 1.0, 2.0, 3.0])).unwrap();
        assert_eq!(h.data().values_as::<f64>().unwrap(), &[1.0, 0.0, 0.0]);
        assert!(matches!(histogram(&da, &edges(vec![0.0, 2.0, 1.0])), Err(Error::Edges(_))));
        let metres = Variable::from_vec(dims!["tof" => 2], Unit::M, vec![0.0, 1.0]).unwrap();
        assert!(matches!(histogram(&da, &metres), Err(Error::Unit(_))));
        let other = Variable::from_vec(dims!["energy" => 2], Unit::US, vec![0.0, 1.0]).unwrap();
        assert!(matches!(histogram(&da, &other), Err(Error::Coord(_))));
    }

    #[test]
    fn weights_with_variances() {
        let data = make_event_variable(
            dims!["x" => 1],
            Unit::COUNTS,
            vec![vec![2.0, 3.0]],
            Some(vec![vec![0.5, 0.25]]),
        )
        .unwrap();
        let tof = make_event_variable(dims!["x" => 1], Unit::US, vec![vec![0.1, 0.2]], None).unwrap();
        let da = DataArray::new(data, [("tof".to_string(), tof)].into(), VariableMap::new()).unwrap();
        let h = histogram(&da, &edges(vec![0.0, 1.0])).unwrap();
        assert_eq!(h.data().values_as::<f64>().unwrap(), &[5.0]);
        assert_eq!(h.data().variances_as::<f64>().unwrap(), &[0.75]);
    }

    #[test]
    fn flatten_examples() {
        let da = events(dims!["x" => 2], vec![vec![1.0], vec![2.0, 3.0]]);
        let f = flatten(&da, "x").unwrap();
        assert!(f.dims().is_scalar());
        assert_eq!(f.coord("tof").unwrap().events_as::<f64>().unwrap().flat(), &[1.0, 2.0, 3.0]);
        let one = events(dims!["x" => 1, "y" => 2], vec![vec![1.0], vec![2.0, 3.0]]);
        let f = flatten(&one, "x").unwrap();
        assert_eq!(f.dims(), &dims!["y" => 2]);
        assert_eq!(f.coord("tof").unwrap().events_as::<f64>().unwrap().offsets(), &[0, 1, 3]);
        assert!(matches!(flatten(&da, "tof"), Err(Error::Dims(_))));
        let empty = events(dims!["x" => 0, "y" => 2], vec![]);
        let f = flatten(&empty, "x").unwrap();
        assert_eq!(f.coord("tof").unwrap().events_as::<f64>().unwrap().offsets(), &[0, 0, 0]);
    }

    #[test]
    fn flatten_along_outer_dim() {
        let da = events(dims!["x" => 2, "y" => 2], vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0, 5.0]]);
        let f = flatten(&da, "x").unwrap();
        let tof = f.coord("tof").unwrap().events_as::<f64>().unwrap().clone();
        assert_eq!(tof.list(0), &[1.0, 3.0]);
        assert_eq!(tof.list(1), &[2.0, 4.0, 5.0]);
    }

    #[test]
    fn concatenate_lists() {
        let a = events(dims!["x" => 2], vec![vec![1.0], vec![2.0]]);
        let b = events(dims!["x" => 2], vec![vec![10.0], vec![20.0, 30.0]]);
        let c = event_concatenate(&a, &b).unwrap();
        let tof = c.coord("tof").unwrap().events_as::<f64>().unwrap();
        assert_eq!(tof.list(0), &[1.0, 10.0]);
        assert_eq!(tof.list(1), &[2.0, 20.0, 30.0]);
        let empty = events(dims!["x" => 2], vec![vec![], vec![]]);
        assert!(event_concatenate(&a, &empty).unwrap().identical(&a));
        let three = events(dims!["x" => 3], vec![vec![], vec![], vec![]]);
        assert!(matches!(event_concatenate(&a, &three), Err(Error::Shape(_))));
    }

    #[test]
    fn dense_into_events() {
        let da = events(dims!["x" => 2], vec![vec![100.0], vec![200.0, 300.0]]);
        let offsets = Variable::from_vec(dims!["x" => 2], Unit::US, vec![1.0, 2.0]).unwrap();
        let r = event_dense_op(&da, &offsets, BinaryOp::Add, Target::Coord("tof")).unwrap();
        let tof = r.coord("tof").unwrap().events_as::<f64>().unwrap();
        assert_eq!(tof.list(0), &[101.0]);
        assert_eq!(tof.list(1), &[202.0, 302.0]);
        let one = Variable::scalar(1.0, Unit::DIMENSIONLESS).unwrap();
        let r = event_dense_op(&da, &one, BinaryOp::Multiply, Target::Data).unwrap();
        assert!(r.identical(&da));
        let m = Variable::scalar(1.0, Unit::M).unwrap();
        assert!(matches!(event_dense_op(&da, &m, BinaryOp::Add, Target::Coord("tof")), Err(Error::Unit(_))));
        let ev = make_event_variable(dims!["x" => 2], Unit::US, vec![vec![1.0], vec![2.0]], None).unwrap();
        let times = Variable::from_vec(dims!["x" => 2], Unit::DIMENSIONLESS, vec![2.0, 10.0]).unwrap();
        let out = crate::ops::multiply(&ev, &times).unwrap();
        assert_eq!(out.events_as::<f64>().unwrap().flat(), &[2.0, 20.0]);
    }
}
