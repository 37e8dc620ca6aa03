//! Data arrays and datasets: variables with coordinates and attributes.
//!
//! A coordinate must use only dims of its data. Along each shared dim its
//! extent equals the data extent, or exceeds it by one along the
//! coordinate's inner (last) dim, in which case it holds bin edges.
//! Attributes follow the same extent rule for dims the data has, and may
//! additionally carry dims the data lacks (a point slice keeps the pair of
//! enclosing bin edges as an attribute).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ops::{self, BinaryOp};
use crate::units::Unit;
use crate::variable::{Dims, Variable, VariableView, VariableViewMut};

/// Name-keyed variables attached to data.
pub type VariableMap = BTreeMap<String, Variable>;
/// Name-keyed views attached to a data view.
pub type ViewMap<'a> = BTreeMap<String, VariableView<'a>>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Coord,
    Attr,
}

impl Role {
    fn name(self) -> &'static str {
        match self {
            Role::Coord => "coordinate",
            Role::Attr => "attribute",
        }
    }
}

fn check_entry(role: Role, name: &str, var: &VariableView<'_>, data: &Dims) -> Result<()> {
    let rank = var.dims().rank();
    for (i, (label, extent)) in var.dims().iter().enumerate() {
        match data.extent(label) {
            None if role == Role::Attr => {}
            None => {
                return Err(Error::Dims(format!(
                    "coordinate '{name}' uses dimension '{label}' which the data {data} lacks"
                )))
            }
            Some(e) if e == extent => {}
            Some(e) if extent == e + 1 && i + 1 == rank && !var.dtype().is_event() => {}
            Some(e) => {
                return Err(Error::Alignment(format!(
                    "{} '{name}' has extent {extent} along '{label}' where the data has {e}{}",
                    role.name(),
                    if i + 1 == rank { format!(" (bin edges would need {})", e + 1) } else { String::new() }
                )))
            }
        }
    }
    Ok(())
}

fn list_lengths(v: &VariableView<'_>) -> Vec<usize> {
    let offsets = v.underlying().values().offsets().expect("event variable");
    v.layout().positions().map(|p| offsets[p + 1] - offsets[p]).collect()
}

fn check_events(data: &VariableView<'_>, coords: &ViewMap<'_>) -> Result<()> {
    let event_coords: Vec<(&String, &VariableView<'_>)> =
        coords.iter().filter(|(_, c)| c.dtype().is_event()).collect();
    if !data.dtype().is_event() {
        if let Some((name, _)) = event_coords.first() {
            return Err(Error::Coord(format!("event coordinate '{name}' requires event data")));
        }
        return Ok(());
    }
    if event_coords.is_empty() {
        return Err(Error::Coord("event data requires at least one event coordinate".into()));
    }
    let expected = list_lengths(data);
    let order: Vec<&str> = data.dims().labels().iter().map(String::as_str).collect();
    for (name, coord) in event_coords {
        let aligned = coord
            .transpose(&order)
            .map_err(|_| Error::Shape(format!("event coordinate '{name}' must span the data dims")))?;
        if list_lengths(&aligned) != expected {
            return Err(Error::Shape(format!(
                "event coordinate '{name}' has list lengths differing from the data"
            )));
        }
    }
    Ok(())
}

fn check_all(data: &VariableView<'_>, coords: &ViewMap<'_>, attrs: &ViewMap<'_>) -> Result<()> {
    for (name, c) in coords {
        check_entry(Role::Coord, name, c, data.dims())?;
    }
    for (name, a) in attrs {
        check_entry(Role::Attr, name, a, data.dims())?;
    }
    check_events(data, coords)
}

fn views(map: &VariableMap) -> ViewMap<'_> {
    map.iter().map(|(k, v)| (k.clone(), v.view())).collect()
}

fn copies(map: &ViewMap<'_>) -> VariableMap {
    map.iter().map(|(k, v)| (k.clone(), v.to_variable())).collect()
}

/// Data with coordinates and attributes.
#[derive(Clone, Debug)]
pub struct DataArray {
    data: Variable,
    coords: VariableMap,
    attrs: VariableMap,
}

impl DataArray {
    pub fn new(data: Variable, coords: VariableMap, attrs: VariableMap) -> Result<Self> {
        check_all(&data.view(), &views(&coords), &views(&attrs))?;
        Ok(DataArray { data, coords, attrs })
    }

    /// Data array without coordinates. Fails for event data, which needs
    /// an event coordinate.
    pub fn from_data(data: Variable) -> Result<Self> {
        DataArray::new(data, VariableMap::new(), VariableMap::new())
    }

    pub fn with_coord(mut self, name: impl Into<String>, coord: Variable) -> Result<Self> {
        self.set_coord(name, coord)?;
        Ok(self)
    }

    pub fn with_attr(mut self, name: impl Into<String>, attr: Variable) -> Result<Self> {
        self.set_attr(name, attr)?;
        Ok(self)
    }

    pub fn data(&self) -> &Variable {
        &self.data
    }

    /// Writable view of the data; it cannot change unit or shape.
    pub fn data_mut(&mut self) -> VariableViewMut<'_> {
        self.data.view_mut()
    }

    pub fn coords(&self) -> &VariableMap {
        &self.coords
    }

    pub fn attrs(&self) -> &VariableMap {
        &self.attrs
    }

    pub fn coord(&self, name: &str) -> Result<&Variable> {
        self.coords.get(name).ok_or_else(|| Error::Key(format!("no coordinate '{name}'")))
    }

    pub fn attr(&self, name: &str) -> Result<&Variable> {
        self.attrs.get(name).ok_or_else(|| Error::Key(format!("no attribute '{name}'")))
    }

    pub fn dims(&self) -> &Dims {
        self.data.dims()
    }

    pub fn unit(&self) -> Unit {
        self.data.unit()
    }

    /// Inserts or replaces a coordinate after checking it against the data.
    pub fn set_coord(&mut self, name: impl Into<String>, coord: Variable) -> Result<()> {
        let name = name.into();
        let mut coords = views(&self.coords);
        coords.insert(name.clone(), coord.view());
        check_entry(Role::Coord, &name, &coord.view(), self.data.dims())?;
        check_events(&self.data.view(), &coords)?;
        self.coords.insert(name, coord);
        Ok(())
    }

    pub fn set_attr(&mut self, name: impl Into<String>, attr: Variable) -> Result<()> {
        let name = name.into();
        check_entry(Role::Attr, &name, &attr.view(), self.data.dims())?;
        self.attrs.insert(name, attr);
        Ok(())
    }

    pub fn remove_coord(&mut self, name: &str) -> Result<Variable> {
        let removed =
            self.coords.remove(name).ok_or_else(|| Error::Key(format!("no coordinate '{name}'")))?;
        if let Err(e) = check_events(&self.data.view(), &views(&self.coords)) {
            self.coords.insert(name.to_string(), removed);
            return Err(e);
        }
        Ok(removed)
    }

    pub fn remove_attr(&mut self, name: &str) -> Result<Variable> {
        self.attrs.remove(name).ok_or_else(|| Error::Key(format!("no attribute '{name}'")))
    }

    pub fn into_parts(self) -> (Variable, VariableMap, VariableMap) {
        (self.data, self.coords, self.attrs)
    }

    pub fn view(&self) -> DataArrayView<'_> {
        DataArrayView { data: self.data.view(), coords: views(&self.coords), attrs: views(&self.attrs) }
    }

    /// Writable view: data may be written, coordinates and attributes are
    /// read-only.
    pub fn view_mut(&mut self) -> DataArrayViewMut<'_> {
        DataArrayViewMut {
            data: self.data.view_mut(),
            coords: views(&self.coords),
            attrs: views(&self.attrs),
        }
    }

    pub fn slice_point(&self, dim: &str, index: usize) -> Result<DataArrayView<'_>> {
        self.view().slice_point(dim, index)
    }

    pub fn slice_range(&self, dim: &str, begin: usize, end: usize) -> Result<DataArrayView<'_>> {
        self.view().slice_range(dim, begin, end)
    }

    pub fn is_edges(&self, coord: &str, dim: &str) -> Result<bool> {
        self.view().is_edges(coord, dim)
    }

    /// Re-checks all invariants from scratch.
    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        for v in self.coords.values().chain(self.attrs.values()) {
            v.validate()?;
        }
        check_all(&self.data.view(), &views(&self.coords), &views(&self.attrs))
    }

    /// Deep bitwise equality of data, coordinates and attributes.
    pub fn identical(&self, other: &DataArray) -> bool {
        self.view().identical(&other.view())
    }
}

impl PartialEq for DataArray {
    fn eq(&self, other: &Self) -> bool {
        self.identical(other)
    }
}

impl<'a> From<&'a DataArray> for DataArrayView<'a> {
    fn from(da: &'a DataArray) -> Self {
        da.view()
    }
}

impl<'a, 'b: 'a> From<&'a DataArrayView<'b>> for DataArrayView<'a> {
    fn from(v: &'a DataArrayView<'b>) -> Self {
        v.clone()
    }
}

/// Read-only window into a data array or a dataset item.
#[derive(Clone, Debug)]
pub struct DataArrayView<'a> {
    data: VariableView<'a>,
    coords: ViewMap<'a>,
    attrs: ViewMap<'a>,
}

fn map_identical(a: &ViewMap<'_>, b: &ViewMap<'_>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((ka, va), (kb, vb))| ka == kb && va.identical(vb))
}

/// True when `v` holds bin edges along `dim` relative to `data`.
pub(crate) fn edges_along(v: &VariableView<'_>, data: &Dims, dim: &str) -> bool {
    match (v.dims().extent(dim), data.extent(dim)) {
        (Some(e), Some(d)) => e == d + 1,
        _ => false,
    }
}

/// Slices coordinates and attributes along `dim` consistently with a data
/// slice. `point` gives a point slice at `begin`; otherwise `begin..end`.
fn slice_meta<'a>(
    data: &Dims,
    coords: &ViewMap<'a>,
    attrs: &ViewMap<'a>,
    dim: &str,
    begin: usize,
    end: usize,
    point: bool,
) -> Result<(ViewMap<'a>, ViewMap<'a>)> {
    let slice = |v: &VariableView<'a>| -> Result<VariableView<'a>> {
        if edges_along(v, data, dim) {
            let stop = if point { begin + 2 } else { end + 1 };
            v.slice_range(dim, begin, stop)
        } else if point {
            v.slice_point(dim, begin)
        } else {
            v.slice_range(dim, begin, end)
        }
    };
    let mut new_coords = ViewMap::new();
    let mut new_attrs = ViewMap::new();
    for (name, a) in attrs {
        let sliced = if a.dims().contains(dim) { slice(a)? } else { a.clone() };
        new_attrs.insert(name.clone(), sliced);
    }
    for (name, c) in coords {
        if !c.dims().contains(dim) {
            new_coords.insert(name.clone(), c.clone());
        } else if !point || c.dtype().is_event() {
            new_coords.insert(name.clone(), slice(c)?);
        } else {
            new_attrs.insert(name.clone(), slice(c)?);
        }
    }
    Ok((new_coords, new_attrs))
}

impl<'a> DataArrayView<'a> {
    pub fn data(&self) -> &VariableView<'a> {
        &self.data
    }

    pub fn coords(&self) -> &ViewMap<'a> {
        &self.coords
    }

    pub fn attrs(&self) -> &ViewMap<'a> {
        &self.attrs
    }

    pub fn coord(&self, name: &str) -> Result<&VariableView<'a>> {
        self.coords.get(name).ok_or_else(|| Error::Key(format!("no coordinate '{name}'")))
    }

    pub fn dims(&self) -> &Dims {
        self.data.dims()
    }

    pub fn unit(&self) -> Unit {
        self.data.unit()
    }

    /// Point slice. Coordinates depending on `dim` become attributes;
    /// bin-edge coordinates keep the two edges enclosing `index`. Event
    /// coordinates stay coordinates.
    pub fn slice_point(&self, dim: &str, index: usize) -> Result<DataArrayView<'a>> {
        let data = self.data.slice_point(dim, index)?;
        let (coords, attrs) =
            slice_meta(self.dims(), &self.coords, &self.attrs, dim, index, index + 1, true)?;
        Ok(DataArrayView { data, coords, attrs })
    }

    /// Range slice. Bin-edge coordinates are sliced to `begin..end + 1`.
    pub fn slice_range(&self, dim: &str, begin: usize, end: usize) -> Result<DataArrayView<'a>> {
        let data = self.data.slice_range(dim, begin, end)?;
        let (coords, attrs) = slice_meta(self.dims(), &self.coords, &self.attrs, dim, begin, end, false)?;
        Ok(DataArrayView { data, coords, attrs })
    }

    pub fn is_edges(&self, coord: &str, dim: &str) -> Result<bool> {
        let c = self.coord(coord)?;
        c.dims().require(dim)?;
        Ok(edges_along(c, self.dims(), dim))
    }

    pub fn to_data_array(&self) -> DataArray {
        DataArray { data: self.data.to_variable(), coords: copies(&self.coords), attrs: copies(&self.attrs) }
    }

    pub fn identical(&self, other: &DataArrayView<'_>) -> bool {
        self.data.identical(&other.data)
            && map_identical(&self.coords, &other.coords)
            && map_identical(&self.attrs, &other.attrs)
    }
}

/// Window into a data array whose data may be written. Coordinates and
/// attributes are read-only; unit and shape cannot change.
#[derive(Debug)]
pub struct DataArrayViewMut<'a> {
    data: VariableViewMut<'a>,
    coords: ViewMap<'a>,
    attrs: ViewMap<'a>,
}

impl<'a> DataArrayViewMut<'a> {
    pub fn view(&self) -> DataArrayView<'_> {
        DataArrayView { data: self.data.view(), coords: self.coords.clone(), attrs: self.attrs.clone() }
    }

    pub fn data(&mut self) -> &mut VariableViewMut<'a> {
        &mut self.data
    }

    pub fn coords(&self) -> &ViewMap<'a> {
        &self.coords
    }

    pub fn attrs(&self) -> &ViewMap<'a> {
        &self.attrs
    }

    pub fn dims(&self) -> &Dims {
        self.data.dims()
    }

    pub fn into_slice_point(self, dim: &str, index: usize) -> Result<DataArrayViewMut<'a>> {
        let (coords, attrs) =
            slice_meta(self.data.dims(), &self.coords, &self.attrs, dim, index, index + 1, true)?;
        Ok(DataArrayViewMut { data: self.data.into_slice_point(dim, index)?, coords, attrs })
    }

    pub fn into_slice_range(self, dim: &str, begin: usize, end: usize) -> Result<DataArrayViewMut<'a>> {
        let (coords, attrs) =
            slice_meta(self.data.dims(), &self.coords, &self.attrs, dim, begin, end, false)?;
        Ok(DataArrayViewMut { data: self.data.into_slice_range(dim, begin, end)?, coords, attrs })
    }

    /// `data = data op other` after checking coordinates as for [`binary`].
    /// The unit of the data cannot change.
    pub fn apply_in_place<'b>(&mut self, other: impl Into<DataArrayView<'b>>, op: BinaryOp) -> Result<()> {
        let other = other.into();
        check_coords(&self.view(), &other)?;
        op.apply_in_place(&mut self.data, other.data())
    }
}

fn check_coords(a: &DataArrayView<'_>, b: &DataArrayView<'_>) -> Result<()> {
    for (name, ca) in &a.coords {
        if let Some(cb) = b.coords.get(name) {
            if !ca.identical(cb) {
                return Err(Error::Coord(format!("mismatch in coordinate '{name}'")));
            }
        }
    }
    let unmatched = |x: &DataArrayView<'_>, y: &DataArrayView<'_>, side: &str| -> Result<()> {
        for (name, c) in &x.coords {
            if y.coords.contains_key(name) {
                continue;
            }
            if let Some(dim) = c.dims().labels().iter().find(|l| y.dims().contains(l)) {
                return Err(Error::Coord(format!(
                    "coordinate '{name}' of the {side} operand has no counterpart although \
                     the other operand has dimension '{dim}'"
                )));
            }
        }
        Ok(())
    };
    unmatched(a, b, "left")?;
    unmatched(b, a, "right")
}

/// `a op b` with coordinate matching.
///
/// Coordinates present in both operands must be bitwise identical. A
/// coordinate present in one operand only must not depend on dims of the
/// other operand's data. Attributes are kept when present in one operand
/// only or identical in both.
pub fn binary<'a, 'b>(
    a: impl Into<DataArrayView<'a>>,
    b: impl Into<DataArrayView<'b>>,
    op: BinaryOp,
) -> Result<DataArray> {
    let (a, b) = (a.into(), b.into());
    check_coords(&a, &b)?;
    let data = op.apply(&a.data, &b.data)?;
    let mut coords = copies(&a.coords);
    for (name, c) in &b.coords {
        coords.entry(name.clone()).or_insert_with(|| c.to_variable());
    }
    let mut attrs = VariableMap::new();
    for (name, x) in &a.attrs {
        match b.attrs.get(name) {
            Some(y) if !x.identical(y) => {}
            _ => {
                attrs.insert(name.clone(), x.to_variable());
            }
        }
    }
    for (name, y) in &b.attrs {
        if !a.attrs.contains_key(name) {
            attrs.insert(name.clone(), y.to_variable());
        }
    }
    DataArray::new(data, coords, attrs)
}

fn reduce<'a>(da: DataArrayView<'a>, dim: &str, mean: bool) -> Result<DataArray> {
    let data = if mean { ops::mean(&da.data, dim)? } else { ops::sum(&da.data, dim)? };
    let keep = |m: &ViewMap<'_>| -> VariableMap {
        m.iter().filter(|(_, v)| !v.dims().contains(dim)).map(|(k, v)| (k.clone(), v.to_variable())).collect()
    };
    DataArray::new(data, keep(&da.coords), keep(&da.attrs))
}

/// Sum over `dim`; coordinates and attributes depending on `dim` are dropped.
pub fn sum<'a>(da: impl Into<DataArrayView<'a>>, dim: &str) -> Result<DataArray> {
    reduce(da.into(), dim, false)
}

/// Mean over `dim`; coordinates and attributes depending on `dim` are dropped.
pub fn mean<'a>(da: impl Into<DataArrayView<'a>>, dim: &str) -> Result<DataArray> {
    reduce(da.into(), dim, true)
}

#[derive(Clone, Debug)]
struct Item {
    data: Variable,
    attrs: VariableMap,
}

/// Named data items sharing coordinates, with all dims aligned.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    coords: VariableMap,
    items: BTreeMap<String, Item>,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    pub fn coords(&self) -> &VariableMap {
        &self.coords
    }

    pub fn coord(&self, name: &str) -> Result<&Variable> {
        self.coords.get(name).ok_or_else(|| Error::Key(format!("no coordinate '{name}'")))
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.items.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.items.keys().map(String::as_str)
    }

    /// Extent of every dim used by any item.
    fn extents(&self, skip: Option<&str>) -> Result<BTreeMap<String, usize>> {
        let mut out = BTreeMap::new();
        for (name, item) in &self.items {
            if Some(name.as_str()) == skip {
                continue;
            }
            merge_extents(&mut out, item.data.dims(), name)?;
        }
        Ok(out)
    }

    /// Aligned dims of the set: those of the items, in order of first use.
    pub fn dims(&self) -> Dims {
        let mut dims = Dims::scalar();
        for item in self.items.values() {
            for (l, e) in item.data.dims().iter() {
                if !dims.contains(l) {
                    dims.push(l, e).expect("aligned dims stay within the rank bound");
                }
            }
        }
        dims
    }

    fn item_view<'a>(&'a self, item: &'a Item) -> DataArrayView<'a> {
        let dims = item.data.dims();
        DataArrayView {
            data: item.data.view(),
            coords: self
                .coords
                .iter()
                .filter(|(_, c)| c.dims().labels_subset_of(dims))
                .map(|(k, c)| (k.clone(), c.view()))
                .collect(),
            attrs: views(&item.attrs),
        }
    }

    /// View of item `name` with the shared coordinates that apply to it.
    pub fn get(&self, name: &str) -> Result<DataArrayView<'_>> {
        let item = self.items.get(name).ok_or_else(|| Error::Key(format!("no item '{name}'")))?;
        Ok(self.item_view(item))
    }

    /// Writable view of item `name`: data may be written, coordinates are
    /// read-only.
    pub fn get_mut(&mut self, name: &str) -> Result<DataArrayViewMut<'_>> {
        let item = self.items.get_mut(name).ok_or_else(|| Error::Key(format!("no item '{name}'")))?;
        let dims = item.data.dims().clone();
        Ok(DataArrayViewMut {
            coords: self
                .coords
                .iter()
                .filter(|(_, c)| c.dims().labels_subset_of(&dims))
                .map(|(k, c)| (k.clone(), c.view()))
                .collect(),
            attrs: views(&item.attrs),
            data: item.data.view_mut(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, DataArrayView<'_>)> + '_ {
        self.items.iter().map(move |(k, item)| (k.as_str(), self.item_view(item)))
    }

    /// Inserts or replaces item `name`. Its dims must align with the other
    /// items, and its coordinates must equal shared coordinates of the same
    /// name; new coordinates become shared.
    pub fn set(&mut self, name: impl Into<String>, da: DataArray) -> Result<()> {
        let name = name.into();
        let mut extents = self.extents(Some(&name))?;
        merge_extents(&mut extents, da.dims(), &name)?;
        let (data, coords, attrs) = da.into_parts();
        for (cname, c) in &coords {
            if let Some(existing) = self.coords.get(cname) {
                if !existing.identical(c) {
                    return Err(Error::Coord(format!(
                        "coordinate '{cname}' of item '{name}' differs from the shared coordinate"
                    )));
                }
            }
        }
        let mut merged = self.coords.clone();
        for (cname, c) in coords {
            merged.entry(cname).or_insert(c);
        }
        check_shared(&merged, &extents)?;
        // Shared coordinates must also fit the new item where they apply.
        for (cname, c) in &merged {
            if c.dims().labels_subset_of(data.dims()) {
                check_entry(Role::Coord, cname, &c.view(), data.dims())?;
            }
        }
        let item_coords: ViewMap<'_> = merged
            .iter()
            .filter(|(_, c)| c.dims().labels_subset_of(data.dims()))
            .map(|(k, c)| (k.clone(), c.view()))
            .collect();
        check_events(&data.view(), &item_coords)?;
        self.coords = merged;
        self.items.insert(name, Item { data, attrs });
        Ok(())
    }

    /// Inserts or replaces a shared coordinate.
    pub fn set_coord(&mut self, name: impl Into<String>, coord: Variable) -> Result<()> {
        let name = name.into();
        let mut merged = self.coords.clone();
        merged.insert(name.clone(), coord);
        check_shared(&merged, &self.extents(None)?)?;
        for item in self.items.values() {
            let c = &merged[&name];
            if c.dims().labels_subset_of(item.data.dims()) {
                check_entry(Role::Coord, &name, &c.view(), item.data.dims())?;
            }
        }
        self.coords = merged;
        Ok(())
    }

    /// Builds a dataset from shared coordinates and `(data, attrs)` items,
    /// then checks every invariant.
    pub fn from_parts(
        coords: VariableMap,
        items: impl IntoIterator<Item = (String, Variable, VariableMap)>,
    ) -> Result<Dataset> {
        let ds = Dataset {
            coords,
            items: items.into_iter().map(|(name, data, attrs)| (name, Item { data, attrs })).collect(),
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Data and attributes of item `name`, without coordinates.
    pub fn item_parts(&self, name: &str) -> Result<(&Variable, &VariableMap)> {
        self.items
            .get(name)
            .map(|i| (&i.data, &i.attrs))
            .ok_or_else(|| Error::Key(format!("no item '{name}'")))
    }

    pub fn remove(&mut self, name: &str) -> Result<DataArray> {
        let view = self.get(name)?.to_data_array();
        self.items.remove(name);
        Ok(view)
    }

    /// Re-derives all extents from scratch and checks every invariant.
    pub fn validate(&self) -> Result<()> {
        let extents = self.extents(None)?;
        check_shared(&self.coords, &extents)?;
        for v in self.coords.values() {
            v.validate()?;
        }
        for item in self.items.values() {
            item.data.validate()?;
            for a in item.attrs.values() {
                a.validate()?;
            }
            let view = self.item_view(item);
            check_all(&view.data, &view.coords, &view.attrs)?;
        }
        Ok(())
    }

    pub fn identical(&self, other: &Dataset) -> bool {
        map_identical(&views(&self.coords), &views(&other.coords))
            && self.items.len() == other.items.len()
            && self.items.iter().zip(&other.items).all(|((ka, a), (kb, b))| {
                ka == kb && a.data.identical(&b.data) && map_identical(&views(&a.attrs), &views(&b.attrs))
            })
    }

    /// `a op b` for items present in both datasets. Items present in only
    /// one operand are omitted; shared coordinates are merged.
    pub fn binary(a: &Dataset, b: &Dataset, op: BinaryOp) -> Result<Dataset> {
        for (name, ca) in &a.coords {
            if let Some(cb) = b.coords.get(name) {
                if !ca.identical(cb) {
                    return Err(Error::Coord(format!("mismatch in coordinate '{name}'")));
                }
            }
        }
        let mut out = Dataset::new();
        out.coords = a.coords.clone();
        for (name, c) in &b.coords {
            out.coords.entry(name.clone()).or_insert_with(|| c.clone());
        }
        for (name, item) in &a.items {
            if let Some(other) = b.items.get(name) {
                let result = binary(a.item_view(item), b.item_view(other), op)?;
                out.set(name.clone(), result)?;
            }
        }
        Ok(out)
    }

    fn reduce(&self, dim: &str, mean: bool) -> Result<Dataset> {
        if !self.items.values().any(|i| i.data.dims().contains(dim)) {
            return Err(Error::Dims(format!("no item has dimension '{dim}'")));
        }
        let mut out = Dataset::new();
        out.coords = self
            .coords
            .iter()
            .filter(|(_, c)| !c.dims().contains(dim))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        for (name, item) in &self.items {
            let view = self.item_view(item);
            let da =
                if item.data.dims().contains(dim) { reduce(view, dim, mean)? } else { view.to_data_array() };
            out.set(name.clone(), da)?;
        }
        Ok(out)
    }

    /// Sums every item having `dim`; coordinates depending on `dim` are dropped.
    pub fn sum(&self, dim: &str) -> Result<Dataset> {
        self.reduce(dim, false)
    }

    pub fn mean(&self, dim: &str) -> Result<Dataset> {
        self.reduce(dim, true)
    }
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.identical(other)
    }
}

fn merge_extents(out: &mut BTreeMap<String, usize>, dims: &Dims, item: &str) -> Result<()> {
    for (l, e) in dims.iter() {
        match out.get(l) {
            Some(&x) if x != e => {
                return Err(Error::Alignment(format!(
                    "item '{item}' has extent {e} along '{l}' where the dataset has {x}"
                )))
            }
            Some(_) => {}
            None => {
                out.insert(l.to_string(), e);
            }
        }
    }
    Ok(())
}

/// Shared coordinates against the aligned extents. For dims no item uses,
/// coordinates sharing the dim must agree with each other.
fn check_shared(coords: &VariableMap, extents: &BTreeMap<String, usize>) -> Result<()> {
    let mut loose: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (name, c) in coords {
        let rank = c.dims().rank();
        for (i, (l, e)) in c.dims().iter().enumerate() {
            match extents.get(l) {
                Some(&x) => {
                    let edge = e == x + 1 && i + 1 == rank && !c.dtype().is_event();
                    if e != x && !edge {
                        return Err(Error::Alignment(format!(
                            "coordinate '{name}' has extent {e} along '{l}' where the dataset has {x}"
                        )));
                    }
                }
                None => match loose.get(l) {
                    Some(&(x, other)) if x != e => {
                        return Err(Error::Alignment(format!(
                            "coordinates '{other}' and '{name}' disagree on the extent of '{l}'"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        loose.insert(l, (e, name));
                    }
                },
            }
        }
    }
    Ok(())
}
