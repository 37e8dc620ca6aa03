//! Array-valued physical quantities and views into them.

mod dims;
mod layout;
mod values;

pub use dims::{Dims, MAX_RANK};
pub use layout::{Layout, Positions};
pub use values::{DType, Element, Numeric, Values};

use crate::error::{Error, Result};
use crate::events::EventStorage;
use crate::units::Unit;

/// Dims, one unit, a value buffer and an optional variance buffer of the
/// same shape and element type.
#[derive(Clone, Debug)]
pub struct Variable {
    dims: Dims,
    unit: Unit,
    values: Values,
    variances: Option<Values>,
}

fn check(dims: &Dims, unit: &Unit, values: &Values, variances: Option<&Values>) -> Result<()> {
    let dtype = values.dtype();
    if values.len() != dims.volume() {
        return Err(Error::Shape(format!(
            "{} {} for dims {} holding {} elements",
            values.len(),
            if dtype.is_event() { "event lists" } else { "values" },
            dims,
            dims.volume()
        )));
    }
    if matches!(dtype, DType::Bool | DType::String) && !unit.is_dimensionless() {
        return Err(Error::Unit(format!("{dtype} data must be dimensionless, got {unit}")));
    }
    if let Some(var) = variances {
        if !dtype.allows_variances() {
            return Err(Error::Type(format!("variances are not supported for {dtype}")));
        }
        if var.dtype() != dtype {
            return Err(Error::Type(format!(
                "variances of type {} do not match values of type {dtype}",
                var.dtype()
            )));
        }
        if var.len() != values.len() || var.offsets() != values.offsets() {
            return Err(Error::Shape("variances do not match the shape of the values".into()));
        }
        let bad = match var {
            Values::Float64(v) => v.iter().any(|&x| x < 0.0),
            Values::Float32(v) => v.iter().any(|&x| x < 0.0),
            Values::EventFloat64(s) => s.flat().iter().any(|&x| x < 0.0),
            Values::EventFloat32(s) => s.flat().iter().any(|&x| x < 0.0),
            _ => false,
        };
        if bad {
            return Err(Error::Validation("negative variance".into()));
        }
    }
    if let Some(offsets) = values.offsets() {
        let total = match values {
            Values::EventFloat64(s) => s.validate(),
            Values::EventFloat32(s) => s.validate(),
            Values::EventInt64(s) => s.validate(),
            Values::EventInt32(s) => s.validate(),
            _ => Ok(()),
        };
        total?;
        debug_assert_eq!(offsets.len(), dims.volume() + 1);
    }
    Ok(())
}

impl Variable {
    pub fn new(dims: Dims, unit: Unit, values: Values, variances: Option<Values>) -> Result<Self> {
        check(&dims, &unit, &values, variances.as_ref())?;
        Ok(Variable { dims, unit, values, variances })
    }

    pub fn from_vec<T: Element>(dims: Dims, unit: Unit, values: Vec<T>) -> Result<Self> {
        Variable::new(dims, unit, T::into_values(values), None)
    }

    pub fn with_variances<T: Element>(
        dims: Dims,
        unit: Unit,
        values: Vec<T>,
        variances: Vec<T>,
    ) -> Result<Self> {
        Variable::new(dims, unit, T::into_values(values), Some(T::into_values(variances)))
    }

    pub fn scalar<T: Element>(value: T, unit: Unit) -> Result<Self> {
        Variable::from_vec(Dims::scalar(), unit, vec![value])
    }

    pub fn scalar_with_variance(value: f64, variance: f64, unit: Unit) -> Result<Self> {
        Variable::with_variances(Dims::scalar(), unit, vec![value], vec![variance])
    }

    /// Event-list variable; one list per element of `dims`.
    pub fn from_lists<T: Numeric>(
        dims: Dims,
        unit: Unit,
        lists: Vec<Vec<T>>,
        variances: Option<Vec<Vec<T>>>,
    ) -> Result<Self> {
        if lists.len() != dims.volume() {
            return Err(Error::Shape(format!(
                "{} event lists for dims {} holding {} elements",
                lists.len(),
                dims,
                dims.volume()
            )));
        }
        let variances = match variances {
            Some(v) => {
                if v.len() != lists.len() || v.iter().zip(&lists).any(|(a, b)| a.len() != b.len()) {
                    return Err(Error::Shape("variance lists do not match the value list lengths".into()));
                }
                Some(T::into_event_values(EventStorage::from_lists(v)))
            }
            None => None,
        };
        Variable::new(dims, unit, T::into_event_values(EventStorage::from_lists(lists)), variances)
    }

    /// Event-list variable from prebuilt storage.
    pub fn from_events<T: Numeric>(
        dims: Dims,
        unit: Unit,
        values: EventStorage<T>,
        variances: Option<EventStorage<T>>,
    ) -> Result<Self> {
        Variable::new(dims, unit, T::into_event_values(values), variances.map(T::into_event_values))
    }

    pub(crate) fn buffers_mut(&mut self) -> (&mut Values, Option<&mut Values>) {
        (&mut self.values, self.variances.as_mut())
    }

    /// Re-checks all invariants from scratch.
    pub fn validate(&self) -> Result<()> {
        check(&self.dims, &self.unit, &self.values, self.variances.as_ref())
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn dtype(&self) -> DType {
        self.values.dtype()
    }

    pub fn len(&self) -> usize {
        self.dims.volume()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn variances(&self) -> Option<&Values> {
        self.variances.as_ref()
    }

    pub fn has_variances(&self) -> bool {
        self.variances.is_some()
    }

    pub fn into_parts(self) -> (Dims, Unit, Values, Option<Values>) {
        (self.dims, self.unit, self.values, self.variances)
    }

    pub fn values_as<T: Element>(&self) -> Result<&[T]> {
        T::dense(&self.values).map(Vec::as_slice).ok_or_else(|| type_mismatch(T::DTYPE, self.dtype()))
    }

    pub fn values_as_mut<T: Element>(&mut self) -> Result<&mut [T]> {
        let dtype = self.dtype();
        T::dense_mut(&mut self.values).map(Vec::as_mut_slice).ok_or_else(|| type_mismatch(T::DTYPE, dtype))
    }

    pub fn variances_as<T: Element>(&self) -> Result<&[T]> {
        let var = self.variances.as_ref().ok_or_else(|| Error::Type("variable has no variances".into()))?;
        T::dense(var).map(Vec::as_slice).ok_or_else(|| type_mismatch(T::DTYPE, self.dtype()))
    }

    pub fn events_as<T: Numeric>(&self) -> Result<&EventStorage<T>> {
        T::events(&self.values).ok_or_else(|| type_mismatch(T::EVENT_DTYPE, self.dtype()))
    }

    pub fn event_variances_as<T: Numeric>(&self) -> Result<&EventStorage<T>> {
        let var = self.variances.as_ref().ok_or_else(|| Error::Type("variable has no variances".into()))?;
        T::events(var).ok_or_else(|| type_mismatch(T::EVENT_DTYPE, self.dtype()))
    }

    /// Replaces the unit. Only owners can do this; views cannot.
    pub fn set_unit(&mut self, unit: Unit) -> Result<()> {
        check(&self.dims, &unit, &self.values, None)?;
        self.unit = unit;
        Ok(())
    }

    pub fn set_variances(&mut self, variances: Option<Values>) -> Result<()> {
        check(&self.dims, &self.unit, &self.values, variances.as_ref())?;
        self.variances = variances;
        Ok(())
    }

    pub fn rename_dim(&mut self, from: &str, to: &str) -> Result<()> {
        self.dims = self.dims.rename(from, to)?;
        Ok(())
    }

    pub fn view(&self) -> VariableView<'_> {
        VariableView { layout: Layout::contiguous(self.dims.clone()), var: self }
    }

    pub fn view_mut(&mut self) -> VariableViewMut<'_> {
        VariableViewMut { layout: Layout::contiguous(self.dims.clone()), var: self }
    }

    pub fn slice_point(&self, dim: &str, index: usize) -> Result<VariableView<'_>> {
        self.view().slice_point(dim, index)
    }

    pub fn slice_range(&self, dim: &str, begin: usize, end: usize) -> Result<VariableView<'_>> {
        self.view().slice_range(dim, begin, end)
    }

    pub fn slice_point_mut(&mut self, dim: &str, index: usize) -> Result<VariableViewMut<'_>> {
        self.view_mut().into_slice_point(dim, index)
    }

    pub fn slice_range_mut(&mut self, dim: &str, begin: usize, end: usize) -> Result<VariableViewMut<'_>> {
        self.view_mut().into_slice_range(dim, begin, end)
    }

    pub fn transpose(&self, order: &[&str]) -> Result<VariableView<'_>> {
        self.view().transpose(order)
    }

    pub fn transpose_mut(&mut self, order: &[&str]) -> Result<VariableViewMut<'_>> {
        let layout = Layout::contiguous(self.dims.clone()).transpose(order)?;
        Ok(VariableViewMut { var: self, layout })
    }

    /// Converts to a compatible unit, scaling values by the ratio of scales
    /// and variances by its square.
    pub fn to_unit(&self, target: Unit) -> Result<Variable> {
        if !self.unit.is_compatible(&target) {
            return Err(Error::Unit(format!("cannot convert {} to incompatible unit {target}", self.unit)));
        }
        let factor = self.unit.scale() / target.scale();
        let mut out = self.clone();
        out.unit = target;
        if factor == 1.0 {
            return Ok(out);
        }
        fn scale_values(v: &mut Values, f: f64) -> Result<()> {
            match v {
                Values::Float64(x) => x.iter_mut().for_each(|x| *x *= f),
                Values::Float32(x) => x.iter_mut().for_each(|x| *x = (*x as f64 * f) as f32),
                Values::EventFloat64(s) => s.flat_mut().iter_mut().for_each(|x| *x *= f),
                Values::EventFloat32(s) => s.flat_mut().iter_mut().for_each(|x| *x = (*x as f64 * f) as f32),
                other => {
                    return Err(Error::Type(format!(
                        "unit conversion with scale factor {f} requires floating-point data, got {}",
                        other.dtype()
                    )))
                }
            }
            Ok(())
        }
        scale_values(&mut out.values, factor)?;
        if let Some(var) = out.variances.as_mut() {
            scale_values(var, factor * factor)?;
        }
        Ok(out)
    }

    /// Bitwise equality of dims, unit, dtype, values and variances.
    pub fn identical(&self, other: &Variable) -> bool {
        self.dims == other.dims
            && self.unit == other.unit
            && self.values.identical(&other.values)
            && match (&self.variances, &other.variances) {
                (None, None) => true,
                (Some(a), Some(b)) => a.identical(b),
                _ => false,
            }
    }
}

impl PartialEq for Variable {
    fn eq(&self, other: &Self) -> bool {
        self.identical(other)
    }
}

fn type_mismatch(requested: DType, actual: DType) -> Error {
    Error::Type(format!("requested {requested} access to {actual} data"))
}

/// Read-only window into a [`Variable`]. No data is copied.
#[derive(Clone, Debug)]
pub struct VariableView<'a> {
    var: &'a Variable,
    layout: Layout,
}

impl<'a> From<&'a Variable> for VariableView<'a> {
    fn from(var: &'a Variable) -> Self {
        var.view()
    }
}

impl<'a, 'b: 'a> From<&'a VariableView<'b>> for VariableView<'a> {
    fn from(view: &'a VariableView<'b>) -> Self {
        view.clone()
    }
}

impl<'a, 'b: 'a> From<&'a VariableViewMut<'b>> for VariableView<'a> {
    fn from(view: &'a VariableViewMut<'b>) -> Self {
        view.view()
    }
}

impl<'a> VariableView<'a> {
    pub(crate) fn from_layout(var: &'a Variable, layout: Layout) -> Self {
        VariableView { var, layout }
    }

    pub fn dims(&self) -> &Dims {
        self.layout.dims()
    }

    pub fn unit(&self) -> Unit {
        self.var.unit
    }

    pub fn dtype(&self) -> DType {
        self.var.dtype()
    }

    pub fn has_variances(&self) -> bool {
        self.var.has_variances()
    }

    pub fn len(&self) -> usize {
        self.layout.volume()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// The viewed variable.
    pub fn underlying(&self) -> &'a Variable {
        self.var
    }

    /// True when the view covers the whole underlying buffer in its own order.
    pub fn is_whole(&self) -> bool {
        self.layout.dims() == self.var.dims() && self.layout.offset() == 0 && self.layout.is_contiguous()
    }

    pub fn slice_point(&self, dim: &str, index: usize) -> Result<VariableView<'a>> {
        Ok(VariableView { var: self.var, layout: self.layout.slice_point(dim, index)? })
    }

    pub fn slice_range(&self, dim: &str, begin: usize, end: usize) -> Result<VariableView<'a>> {
        Ok(VariableView { var: self.var, layout: self.layout.slice_range(dim, begin, end)? })
    }

    pub fn transpose(&self, order: &[&str]) -> Result<VariableView<'a>> {
        Ok(VariableView { var: self.var, layout: self.layout.transpose(order)? })
    }

    /// Deep, contiguous copy.
    pub fn to_variable(&self) -> Variable {
        if self.is_whole() {
            return self.var.clone();
        }
        Variable {
            dims: self.layout.dims().clone(),
            unit: self.var.unit,
            values: self.var.values.gather(self.layout.positions()),
            variances: self.var.variances.as_ref().map(|v| v.gather(self.layout.positions())),
        }
    }

    pub fn values_vec<T: Element>(&self) -> Result<Vec<T>> {
        let data = T::dense(&self.var.values).ok_or_else(|| type_mismatch(T::DTYPE, self.dtype()))?;
        Ok(self.layout.positions().map(|i| data[i].clone()).collect())
    }

    pub fn variances_vec<T: Element>(&self) -> Result<Vec<T>> {
        let data = self.var.variances_as::<T>()?;
        Ok(self.layout.positions().map(|i| data[i].clone()).collect())
    }

    pub fn value_at<T: Element>(&self, index: &[usize]) -> Result<T> {
        let data = T::dense(&self.var.values).ok_or_else(|| type_mismatch(T::DTYPE, self.dtype()))?;
        Ok(data[self.checked_position(index)?].clone())
    }

    pub fn variance_at<T: Element>(&self, index: &[usize]) -> Result<T> {
        let data = self.var.variances_as::<T>()?;
        Ok(data[self.checked_position(index)?].clone())
    }

    /// Event list at a logical index.
    pub fn list_at<T: Numeric>(&self, index: &[usize]) -> Result<&'a [T]> {
        let pos = self.checked_position(index)?;
        Ok(self.var.events_as::<T>()?.list(pos))
    }

    fn checked_position(&self, index: &[usize]) -> Result<usize> {
        let shape = self.dims().shape();
        if index.len() != shape.len() || index.iter().zip(shape).any(|(i, n)| i >= n) {
            return Err(Error::Bounds(format!("index {index:?} invalid for {}", self.dims())));
        }
        Ok(self.layout.position(index))
    }

    pub fn identical<'b>(&self, other: impl Into<VariableView<'b>>) -> bool {
        let other = other.into();
        self.dims() == other.dims() && self.to_variable().identical(&other.to_variable())
    }
}

/// Writable window into a [`Variable`].
///
/// A mutable view can overwrite elements but never change the unit, the
/// dimension labels or the shape of the underlying variable.
#[derive(Debug)]
pub struct VariableViewMut<'a> {
    var: &'a mut Variable,
    layout: Layout,
}

impl<'a> VariableViewMut<'a> {
    pub fn view(&self) -> VariableView<'_> {
        VariableView { var: self.var, layout: self.layout.clone() }
    }

    pub fn dims(&self) -> &Dims {
        self.layout.dims()
    }

    pub fn unit(&self) -> Unit {
        self.var.unit
    }

    pub fn dtype(&self) -> DType {
        self.var.dtype()
    }

    pub fn has_variances(&self) -> bool {
        self.var.has_variances()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn slice_point(&mut self, dim: &str, index: usize) -> Result<VariableViewMut<'_>> {
        let layout = self.layout.slice_point(dim, index)?;
        Ok(VariableViewMut { var: self.var, layout })
    }

    pub fn slice_range(&mut self, dim: &str, begin: usize, end: usize) -> Result<VariableViewMut<'_>> {
        let layout = self.layout.slice_range(dim, begin, end)?;
        Ok(VariableViewMut { var: self.var, layout })
    }

    pub fn into_slice_point(self, dim: &str, index: usize) -> Result<VariableViewMut<'a>> {
        let layout = self.layout.slice_point(dim, index)?;
        Ok(VariableViewMut { var: self.var, layout })
    }

    pub fn into_slice_range(self, dim: &str, begin: usize, end: usize) -> Result<VariableViewMut<'a>> {
        let layout = self.layout.slice_range(dim, begin, end)?;
        Ok(VariableViewMut { var: self.var, layout })
    }

    pub fn set_value<T: Element>(&mut self, index: &[usize], value: T) -> Result<()> {
        let pos = self.view().checked_position(index)?;
        let dtype = self.dtype();
        let data = T::dense_mut(&mut self.var.values).ok_or_else(|| type_mismatch(T::DTYPE, dtype))?;
        data[pos] = value;
        Ok(())
    }

    pub fn set_variance<T: Numeric>(&mut self, index: &[usize], variance: T) -> Result<()> {
        if variance.to_f64() < 0.0 {
            return Err(Error::Validation("negative variance".into()));
        }
        let pos = self.view().checked_position(index)?;
        let dtype = self.dtype();
        let data = self
            .var
            .variances
            .as_mut()
            .ok_or_else(|| Error::Type("variable has no variances".into()))
            .and_then(|v| T::dense_mut(v).ok_or_else(|| type_mismatch(T::DTYPE, dtype)))?;
        data[pos] = variance;
        Ok(())
    }

    /// Copies the elements of `src` into the viewed elements.
    ///
    /// `src` must have the same dims (in any order), unit, dtype and
    /// variance presence; event lists must have matching lengths.
    pub fn assign<'b>(&mut self, src: impl Into<VariableView<'b>>) -> Result<()> {
        let src = src.into();
        if !src.dims().is_permutation_of(self.dims()) {
            return Err(Error::Shape(format!("cannot assign {} into view of {}", src.dims(), self.dims())));
        }
        if src.unit() != self.unit() {
            return Err(Error::View(format!(
                "cannot assign data with unit {} through a view with unit {}",
                src.unit(),
                self.unit()
            )));
        }
        if src.dtype() != self.dtype() {
            return Err(Error::Type(format!("cannot assign {} into {}", src.dtype(), self.dtype())));
        }
        if src.has_variances() != self.has_variances() {
            return Err(Error::View("variance presence differs between source and target view".into()));
        }
        let order: Vec<&str> = self.dims().labels().iter().map(String::as_str).collect();
        let src = src.transpose(&order)?;
        let targets: Vec<usize> = self.layout.positions().collect();
        let sources: Vec<usize> = src.layout.positions().collect();
        copy_elements(&mut self.var.values, &targets, &src.var.values, &sources)?;
        if let (Some(dst), Some(s)) = (self.var.variances.as_mut(), src.var.variances.as_ref()) {
            copy_elements(dst, &targets, s, &sources)?;
        }
        Ok(())
    }

    pub(crate) fn parts(&mut self) -> (&mut Variable, &Layout) {
        (self.var, &self.layout)
    }
}

pub(crate) fn copy_elements(
    dst: &mut Values,
    dst_pos: &[usize],
    src: &Values,
    src_pos: &[usize],
) -> Result<()> {
    fn dense<T: Clone>(d: &mut [T], dp: &[usize], s: &[T], sp: &[usize]) {
        for (&i, &j) in dp.iter().zip(sp) {
            d[i] = s[j].clone();
        }
    }
    fn events<T: Copy>(
        d: &mut EventStorage<T>,
        dp: &[usize],
        s: &EventStorage<T>,
        sp: &[usize],
    ) -> Result<()> {
        if dp.iter().zip(sp).any(|(&i, &j)| d.list_len(i) != s.list_len(j)) {
            return Err(Error::Shape("event list lengths cannot change through a view".into()));
        }
        for (&i, &j) in dp.iter().zip(sp) {
            d.list_mut(i).copy_from_slice(s.list(j));
        }
        Ok(())
    }
    match (dst, src) {
        (Values::Float64(d), Values::Float64(s)) => dense(d, dst_pos, s, src_pos),
        (Values::Float32(d), Values::Float32(s)) => dense(d, dst_pos, s, src_pos),
        (Values::Int64(d), Values::Int64(s)) => dense(d, dst_pos, s, src_pos),
        (Values::Int32(d), Values::Int32(s)) => dense(d, dst_pos, s, src_pos),
        (Values::Bool(d), Values::Bool(s)) => dense(d, dst_pos, s, src_pos),
        (Values::String(d), Values::String(s)) => dense(d, dst_pos, s, src_pos),
        (Values::EventFloat64(d), Values::EventFloat64(s)) => events(d, dst_pos, s, src_pos)?,
        (Values::EventFloat32(d), Values::EventFloat32(s)) => events(d, dst_pos, s, src_pos)?,
        (Values::EventInt64(d), Values::EventInt64(s)) => events(d, dst_pos, s, src_pos)?,
        (Values::EventInt32(d), Values::EventInt32(s)) => events(d, dst_pos, s, src_pos)?,
        (d, s) => return Err(Error::Type(format!("cannot copy {} into {}", s.dtype(), d.dtype()))),
    }
    Ok(())
}

/// Shorthand for building [`Dims`] in tests and examples; panics on invalid input.
#[macro_export]
macro_rules! dims {
    () => { $crate::Dims::scalar() };
    ($($label:expr => $extent:expr),+ $(,)?) => {
        $crate::Dims::new([$(($label, $extent)),+]).expect("valid dims")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Variable {
        Variable::from_vec(dims!["x" => 3, "y" => 2], Unit::M, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()
    }

    #[test]
    fn construction_rules() {
        let v = Variable::from_vec(dims!["x" => 3], Unit::M, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(v.dims().rank(), 1);
        assert!(matches!(
            Variable::from_vec(dims!["x" => 3], Unit::M, vec![1.0, 2.0, 3.0, 4.0]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            Variable::with_variances(dims!["x" => 2], Unit::M, vec![1i64, 2], vec![1, 1]),
            Err(Error::Type(_))
        ));
        assert!(matches!(Variable::from_vec(dims!["x" => 1], Unit::M, vec![true]), Err(Error::Unit(_))));
        assert!(Variable::with_variances(dims!["x" => 1], Unit::M, vec![1.0], vec![-1.0]).is_err());
        assert!(Variable::with_variances(dims!["x" => 1], Unit::M, vec![1.0], vec![f64::NAN]).is_ok());
    }

    #[test]
    fn point_slice_drops_dim() {
        let v = xy();
        let row = v.slice_point("x", 1).unwrap();
        assert_eq!(row.dims(), &dims!["y" => 2]);
        assert_eq!(row.values_vec::<f64>().unwrap(), vec![2.0, 3.0]);
        assert!(matches!(v.slice_point("q", 0), Err(Error::Dims(_))));
        assert!(matches!(v.slice_point("x", 3), Err(Error::Bounds(_))));
    }

    #[test]
    fn range_slice_keeps_dim() {
        let v = Variable::from_vec(dims!["x" => 5], Unit::M, vec![0i64, 1, 2, 3, 4]).unwrap();
        let s = v.slice_range("x", 1, 3).unwrap();
        assert_eq!(s.dims(), &dims!["x" => 2]);
        assert_eq!(s.values_vec::<i64>().unwrap(), vec![1, 2]);
        assert!(v.slice_range("x", 0, 5).unwrap().identical(&v));
        assert!(matches!(v.slice_range("x", 4, 2), Err(Error::Bounds(_))));
    }

    #[test]
    fn copy_is_independent() {
        let mut v = Variable::from_vec(dims!["x" => 5], Unit::M, vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = v.slice_range("x", 1, 3).unwrap().to_variable();
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0]);
        v.values_as_mut::<f64>().unwrap()[1] = 100.0;
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0]);
        let s = Variable::scalar(2.5, Unit::S).unwrap();
        assert_eq!(s.view().to_variable(), s);
    }

    #[test]
    fn transpose_is_a_view() {
        let v = xy();
        let t = v.transpose(&["y", "x"]).unwrap();
        assert_eq!(t.dims(), &dims!["y" => 2, "x" => 3]);
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(t.value_at::<f64>(&[j, i]).unwrap(), v.view().value_at::<f64>(&[i, j]).unwrap());
            }
        }
        assert_eq!(v.transpose(&["x", "y"]).unwrap().to_variable(), v);
        assert!(matches!(v.transpose(&["x", "z"]), Err(Error::Dims(_))));
    }

    #[test]
    fn writes_through_views_reach_the_owner() {
        let mut v = xy();
        {
            let mut row = v.slice_point_mut("x", 2).unwrap();
            row.set_value(&[1], 42.0).unwrap();
        }
        assert_eq!(v.values_as::<f64>().unwrap()[5], 42.0);
        let src = Variable::from_vec(dims!["y" => 2], Unit::M, vec![7.0, 8.0]).unwrap();
        v.slice_point_mut("x", 0).unwrap().assign(&src).unwrap();
        assert_eq!(&v.values_as::<f64>().unwrap()[..2], &[7.0, 8.0]);
        let wrong_unit = Variable::from_vec(dims!["y" => 2], Unit::S, vec![7.0, 8.0]).unwrap();
        assert!(matches!(v.slice_point_mut("x", 0).unwrap().assign(&wrong_unit), Err(Error::View(_))));
    }

    #[test]
    fn to_unit_scales_values_and_variances() {
        let a = Variable::scalar(1.0, Unit::ANGSTROM).unwrap();
        assert_eq!(a.to_unit(Unit::M).unwrap().values_as::<f64>().unwrap(), &[1e-10]);
        let m = Variable::scalar_with_variance(2.0, 0.09, Unit::M).unwrap();
        let conv = m.to_unit(Unit::ANGSTROM).unwrap();
        assert_eq!(conv.values_as::<f64>().unwrap(), &[2e10]);
        let var = conv.variances_as::<f64>().unwrap()[0];
        assert!((var - 9e18).abs() / 9e18 < 1e-12);
        assert!(matches!(m.to_unit(Unit::S), Err(Error::Unit(_))));
    }
}
