//! Split-apply-combine over a coordinate.
//!
//! Grouping by a 1-D coordinate partitions the indices of its dim into
//! groups, either one group per distinct label (ordered by first
//! occurrence) or one group per bin of given edges (half-open bins,
//! out-of-range indices belong to no group). Combining replaces the
//! grouped dim by a new dim named after the coordinate. Other coordinates
//! and attributes depending on the grouped dim are dropped.

use std::collections::HashMap;

use crate::dataset::{DataArray, DataArrayView, VariableMap, ViewMap};
use crate::error::{Error, Result};
use crate::events::{edge_values, find_bin, merge_runs};
use crate::variable::{DType, Dims, Numeric, Values, Variable, VariableView};

/// Groups of indices along one dim of a data array.
#[derive(Clone, Debug)]
pub struct GroupBy<'a> {
    source: DataArrayView<'a>,
    dim: String,
    group_dim: String,
    groups: Vec<Vec<usize>>,
    group_coord: Variable,
}

#[derive(PartialEq, Eq, Hash)]
enum Label {
    Float(u64),
    Int(i64),
    Bool(bool),
    Text(String),
}

fn labels(v: &VariableView<'_>) -> Result<Vec<Label>> {
    Ok(match v.dtype() {
        // Bitwise keys, with -0.0 folded onto 0.0.
        DType::Float64 => {
            v.values_vec::<f64>()?.into_iter().map(|x| Label::Float((x + 0.0).to_bits())).collect()
        }
        DType::Float32 => {
            v.values_vec::<f32>()?.into_iter().map(|x| Label::Float(f64::from(x + 0.0).to_bits())).collect()
        }
        DType::Int64 => v.values_vec::<i64>()?.into_iter().map(Label::Int).collect(),
        DType::Int32 => v.values_vec::<i32>()?.into_iter().map(|x| Label::Int(x.into())).collect(),
        DType::Bool => v.values_vec::<bool>()?.into_iter().map(Label::Bool).collect(),
        DType::String => v.values_vec::<String>()?.into_iter().map(Label::Text).collect(),
        other => return Err(Error::Unsupported(format!("cannot group by {other} labels"))),
    })
}

fn numeric(v: &VariableView<'_>) -> Result<Vec<f64>> {
    Ok(match v.dtype() {
        DType::Float64 => v.values_vec::<f64>()?,
        DType::Float32 => v.values_vec::<f32>()?.into_iter().map(f64::from).collect(),
        DType::Int64 => v.values_vec::<i64>()?.into_iter().map(|x| x as f64).collect(),
        DType::Int32 => v.values_vec::<i32>()?.into_iter().map(f64::from).collect(),
        other => return Err(Error::Type(format!("cannot bin {other} coordinate values"))),
    })
}

/// Groups `da` by the 1-D coordinate `coord`, optionally binned by `bins`.
pub fn groupby<'a, 'b>(
    da: impl Into<DataArrayView<'a>>,
    coord: &str,
    bins: Option<impl Into<VariableView<'b>>>,
) -> Result<GroupBy<'a>> {
    let source = da.into();
    let key = source
        .coords()
        .get(coord)
        .ok_or_else(|| Error::Coord(format!("no coordinate '{coord}' to group by")))?;
    if key.dims().rank() != 1 || key.dtype().is_event() {
        return Err(Error::Unsupported(format!(
            "grouping coordinate '{coord}' must be 1-D over a dense dim, got {} {}",
            key.dtype(),
            key.dims()
        )));
    }
    let dim = key.dims().labels()[0].clone();
    if key.dims().extent(&dim) != source.dims().extent(&dim) {
        return Err(Error::Unsupported(format!("cannot group by bin-edge coordinate '{coord}'")));
    }
    let group_dim = coord.to_string();
    let (groups, group_coord) = match bins {
        None => {
            let mut index: HashMap<Label, usize> = HashMap::new();
            let mut groups: Vec<Vec<usize>> = Vec::new();
            let mut first = Vec::new();
            for (i, label) in labels(key)?.into_iter().enumerate() {
                let k = *index.entry(label).or_insert_with(|| {
                    groups.push(Vec::new());
                    first.push(i);
                    groups.len() - 1
                });
                groups[k].push(i);
            }
            let full = key.to_variable();
            let dims = Dims::new([(group_dim.as_str(), groups.len())])?;
            let (_, unit, values, variances) = full.into_parts();
            let group_coord = Variable::new(
                dims,
                unit,
                values.gather(first.iter().copied()),
                variances.map(|v| v.gather(first.iter().copied())),
            )?;
            (groups, group_coord)
        }
        Some(bins) => {
            let bins = bins.into();
            let (_, edges) = edge_values(&bins)?;
            if bins.unit() != key.unit() {
                return Err(Error::Unit(format!(
                    "bins in {} do not match coordinate '{coord}' in {}",
                    bins.unit(),
                    key.unit()
                )));
            }
            let mut groups = vec![Vec::new(); edges.len() - 1];
            for (i, x) in numeric(key)?.into_iter().enumerate() {
                if let Some(k) = find_bin(&edges, x) {
                    groups[k].push(i);
                }
            }
            let mut group_coord = bins.to_variable();
            let label = group_coord.dims().labels()[0].clone();
            group_coord.rename_dim(&label, &group_dim)?;
            (groups, group_coord)
        }
    };
    if group_dim != dim && source.dims().contains(&group_dim) {
        return Err(Error::Dims(format!("data already has a dimension '{group_dim}'")));
    }
    Ok(GroupBy { source, dim, group_dim, groups, group_coord })
}

fn unravel(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for d in (0..shape.len()).rev() {
        out[d] = flat % shape[d];
        flat /= shape[d];
    }
}

impl<'a> GroupBy<'a> {
    /// Member indices of each group along the grouped dim.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Dim of the source that is grouped over.
    pub fn dim(&self) -> &str {
        &self.dim
    }

    /// Name of the output dim replacing the grouped dim.
    pub fn group_dim(&self) -> &str {
        &self.group_dim
    }

    /// Group labels, or bin edges when grouping with bins.
    pub fn group_coord(&self) -> &Variable {
        &self.group_coord
    }

    fn out_dims(&self) -> Result<(Dims, usize)> {
        let p = self.source.dims().index_of(&self.dim).expect("grouped dim present");
        let mut dims = self.source.dims().without(&self.dim);
        dims.insert(p, self.group_dim.clone(), self.groups.len())?;
        Ok((dims, p))
    }

    /// For each output element in row-major order, the source buffer
    /// position of its first member slot (with the grouped index at 0).
    fn bases(&self, v: &VariableView<'_>, out: &Dims, p: usize) -> Vec<usize> {
        let layout = v.layout();
        let mut idx = vec![0; out.rank()];
        (0..out.volume())
            .map(|flat| {
                unravel(flat, out.shape(), &mut idx);
                idx[p] = 0;
                layout.position(&idx)
            })
            .collect()
    }

    /// Coords and attrs of the output: entries on the grouped dim are
    /// dropped and the group coordinate is attached.
    fn meta(&self) -> (VariableMap, VariableMap) {
        let keep = |m: &ViewMap<'_>| -> VariableMap {
            m.iter()
                .filter(|(_, v)| !v.dims().contains(&self.dim) && !v.dtype().is_event())
                .map(|(k, v)| (k.clone(), v.to_variable()))
                .collect()
        };
        let mut coords = keep(self.source.coords());
        coords.insert(self.group_dim.clone(), self.group_coord.clone());
        (coords, keep(self.source.attrs()))
    }

    fn reduce(&self, mean: bool) -> Result<DataArray> {
        let data = self.source.data();
        if mean && !data.dtype().is_float() {
            return Err(Error::Type(format!("mean requires float data, got {}", data.dtype())));
        }
        let result = match data.dtype() {
            DType::Float64 => self.reduce_typed::<f64>(mean),
            DType::Float32 => self.reduce_typed::<f32>(mean),
            DType::Int64 => self.reduce_typed::<i64>(mean),
            DType::Int32 => self.reduce_typed::<i32>(mean),
            other => Err(Error::Type(format!("cannot reduce {other} data by group"))),
        }?;
        let (coords, attrs) = self.meta();
        DataArray::new(result, coords, attrs)
    }

    fn reduce_typed<T: Numeric>(&self, mean: bool) -> Result<Variable> {
        let data = self.source.data();
        let (dims, p) = self.out_dims()?;
        let bases = self.bases(data, &dims, p);
        let stride = data.layout().strides()[p];
        let shape = dims.shape().to_vec();
        let mut idx = vec![0; dims.rank()];
        let mut accumulate = |buf: &[T], variance: bool| -> Values {
            let mut out = Vec::with_capacity(bases.len());
            for (flat, &base) in bases.iter().enumerate() {
                unravel(flat, &shape, &mut idx);
                let members = &self.groups[idx[p]];
                let mut acc = T::ZERO;
                for &m in members {
                    acc = acc.add(buf[base + m * stride]);
                }
                if mean {
                    let n = T::from_usize(members.len());
                    acc = if variance { acc.div(n.mul(n)) } else { acc.div(n) };
                }
                out.push(acc);
            }
            T::into_values(out)
        };
        let var = data.underlying();
        let values = accumulate(T::dense(var.values()).expect("dtype checked"), false);
        let variances = var.variances().map(|v| accumulate(T::dense(v).expect("dtype checked"), true));
        Variable::new(dims, data.unit(), values, variances)
    }

    /// Sum over the members of each group; empty groups give zero.
    pub fn sum(&self) -> Result<DataArray> {
        self.reduce(false)
    }

    /// Mean over the members of each group; empty groups give NaN with
    /// NaN variance.
    pub fn mean(&self) -> Result<DataArray> {
        self.reduce(true)
    }

    /// Concatenates the event lists of each group's members in ascending
    /// member order, for the data and every event coordinate.
    pub fn flatten(&self) -> Result<DataArray> {
        if !self.source.data().dtype().is_event() {
            return Err(Error::Type(format!(
                "flatten requires event data, got {}",
                self.source.data().dtype()
            )));
        }
        let (dims, p) = self.out_dims()?;
        let gather = |v: &VariableView<'_>| -> Result<Variable> {
            let order: Vec<&str> = self.source.dims().labels().iter().map(String::as_str).collect();
            let v = v.transpose(&order)?;
            let bases = self.bases(&v, &dims, p);
            let stride = v.layout().strides()[p];
            let mut idx = vec![0; dims.rank()];
            let mut picks = Vec::new();
            let mut runs = Vec::with_capacity(bases.len());
            for (flat, &base) in bases.iter().enumerate() {
                unravel(flat, dims.shape(), &mut idx);
                let members = &self.groups[idx[p]];
                picks.extend(members.iter().map(|&m| base + m * stride));
                runs.push(members.len());
            }
            let var = v.underlying();
            let values = merge_runs(var.values().gather(picks.iter().copied()), &runs);
            let variances = var.variances().map(|x| merge_runs(x.gather(picks.iter().copied()), &runs));
            Variable::new(dims.clone(), v.unit(), values, variances)
        };
        let data = gather(self.source.data())?;
        let (mut coords, attrs) = self.meta();
        for (name, c) in self.source.coords() {
            if c.dtype().is_event() {
                coords.insert(name.clone(), gather(c)?);
            }
        }
        DataArray::new(data, coords, attrs)
    }
}
