//! Generic element-wise application of kernels to variables.
//!
//! [`transform`] takes `N` input variables (or views) and a [`Kernel`] and
//! produces a new variable. It resolves the runtime element types against
//! the kernel's supported type combinations, derives the output unit from
//! the input units, broadcasts inputs into missing dimensions, transposes
//! inputs to a common dimension order, propagates variances, and
//! broadcasts dense operands into the lists of an event-list operand.
//!
//! Evaluation is sequential in output row-major order, so results are
//! bitwise reproducible.

use std::borrow::Cow;
use std::fmt;

use crate::alloc::output_buffer;
use crate::error::{Error, Result};
use crate::events::{EventBuilder, EventStorage};
use crate::units::Unit;
use crate::variable::{
    copy_elements, DType, Dims, Layout, Numeric, Values, Variable, VariableView, VariableViewMut,
};

/// One supported combination of input element types.
///
/// For a [`Kernel`], `output` is the type the computation runs in and the
/// output element type; narrower inputs are promoted to it. For a
/// [`Predicate`], `output` is the comparison type and the result is boolean.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeCombo<const N: usize> {
    pub inputs: [DType; N],
    pub output: DType,
}

impl<const N: usize> TypeCombo<N> {
    pub const fn new(inputs: [DType; N], output: DType) -> Self {
        TypeCombo { inputs, output }
    }
}

/// An element-wise operation on `N` inputs.
pub trait Kernel<const N: usize>: Sync {
    fn name(&self) -> &str;

    /// Supported input type combinations, in terms of scalar element types.
    /// Event-list inputs match on their list element type.
    fn combos(&self) -> &[TypeCombo<N>];

    /// Output unit for the given input units.
    fn unit(&self, units: [Unit; N]) -> Result<Unit>;

    fn value<T: Numeric>(&self, x: [T; N]) -> T;

    /// Partial derivatives of [`Kernel::value`] with respect to each input.
    /// `None` means the kernel cannot propagate variances.
    fn partials<T: Numeric>(&self, _x: [T; N]) -> Option<[T; N]> {
        None
    }

    /// Value and variance for inputs with variances. The default is
    /// first-order propagation for independent inputs:
    /// `var = sum_i (df/dx_i)^2 * var_i`.
    fn value_and_variance<T: Numeric>(&self, x: [T; N], var: [T; N]) -> Option<(T, T)> {
        let d = self.partials(x)?;
        let mut v = T::ZERO;
        for i in 0..N {
            v = v.add(d[i].mul(d[i]).mul(var[i]));
        }
        Some((self.value(x), v))
    }
}

/// An element-wise test on `N` inputs producing booleans.
pub trait Predicate<const N: usize>: Sync {
    fn name(&self) -> &str;
    fn combos(&self) -> &[TypeCombo<N>];
    /// Validates input units; the output is always dimensionless.
    fn check_units(&self, units: [Unit; N]) -> Result<()>;
    fn test<T: Numeric>(&self, x: [T; N]) -> bool;
}

/// Output dims of a broadcast together with, per input, the stride of
/// each output dim in that input's own row-major index space (0 where the
/// input is broadcast).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroadcastPlan {
    pub dims: Dims,
    pub strides: Vec<Vec<usize>>,
}

/// Output dims are the first input's dims in order, followed by dims only
/// present in later inputs, in their order of appearance.
pub fn plan_broadcast(inputs: &[&Dims]) -> Result<BroadcastPlan> {
    let mut dims = Dims::scalar();
    for input in inputs {
        for (label, extent) in input.iter() {
            match dims.extent(label) {
                Some(e) if e != extent => {
                    return Err(Error::Shape(format!(
                        "dimension '{label}' has mismatching extents {e} and {extent}"
                    )))
                }
                Some(_) => {}
                None => dims.push(label, extent)?,
            }
        }
    }
    let strides = inputs
        .iter()
        .map(|input| {
            let own = crate::variable::Layout::contiguous((*input).clone());
            dims.labels().iter().map(|l| input.index_of(l).map_or(0, |i| own.strides()[i])).collect()
        })
        .collect();
    Ok(BroadcastPlan { dims, strides })
}

struct ComboDisplay<'a>(&'a [DType]);

impl fmt::Display for ComboDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(d.name())?;
        }
        f.write_str(")")
    }
}

fn resolve<const N: usize>(
    name: &str,
    combos: &[TypeCombo<N>],
    inputs: &[VariableView<'_>; N],
) -> Result<(TypeCombo<N>, Option<usize>)> {
    let dtypes: [DType; N] = std::array::from_fn(|i| inputs[i].dtype());
    let events: Vec<usize> = (0..N).filter(|&i| dtypes[i].is_event()).collect();
    if events.len() > 1 {
        return Err(Error::Unsupported(format!(
            "'{name}' received {} event-list operands; at most one is supported",
            events.len()
        )));
    }
    let elements = dtypes.map(DType::element);
    combos.iter().find(|c| c.inputs == elements).map(|c| (*c, events.first().copied())).ok_or_else(|| {
        Error::Type(format!("'{name}' does not support the type combination {}", ComboDisplay(&dtypes)))
    })
}

enum Data<'a, T: Numeric> {
    Dense(Cow<'a, [T]>),
    Events(Cow<'a, EventStorage<T>>),
}

struct Operand<'a, T: Numeric> {
    values: Data<'a, T>,
    variances: Option<Data<'a, T>>,
    layout: Layout,
}

fn borrow_data<T: Numeric>(values: &Values) -> Option<Data<'_, T>> {
    if let Some(v) = T::dense(values) {
        Some(Data::Dense(Cow::Borrowed(v.as_slice())))
    } else {
        T::events(values).map(|s| Data::Events(Cow::Borrowed(s)))
    }
}

fn owned_data<T: Numeric>(values: Values) -> Data<'static, T> {
    let event = values.dtype().is_event();
    let target = if event { T::EVENT_DTYPE } else { T::DTYPE };
    let cast = values.cast(target).expect("promotion between numeric types");
    if event {
        Data::Events(Cow::Owned(T::events(&cast).expect("cast to event type").clone()))
    } else {
        Data::Dense(Cow::Owned(T::dense(&cast).expect("cast to dense type").clone()))
    }
}

fn operand<'a, T: Numeric>(view: &VariableView<'a>) -> Operand<'a, T> {
    let var = view.underlying();
    if view.dtype().element() == T::DTYPE {
        Operand {
            values: borrow_data(var.values()).expect("dtype checked"),
            variances: var.variances().map(|v| borrow_data(v).expect("dtype checked")),
            layout: view.layout().clone(),
        }
    } else {
        let copy = view.to_variable();
        let layout = Layout::contiguous(copy.dims().clone());
        let (_, _, values, variances) = copy.into_parts();
        Operand { values: owned_data(values), variances: variances.map(owned_data), layout }
    }
}

/// Buffer strides of `layout` for each output dim (0 when broadcast).
fn strides_in(out: &Dims, layout: &Layout) -> Vec<usize> {
    out.labels().iter().map(|l| layout.dims().index_of(l).map_or(0, |i| layout.strides()[i])).collect()
}

/// Visits the buffer positions of all inputs in output row-major order.
pub(crate) fn for_each_position<const N: usize>(
    shape: &[usize],
    strides: &[Vec<usize>; N],
    offsets: [usize; N],
    mut f: impl FnMut([usize; N]),
) {
    let volume: usize = shape.iter().product();
    if volume == 0 {
        return;
    }
    let rank = shape.len();
    if rank == 0 {
        f(offsets);
        return;
    }
    let inner = shape[rank - 1];
    let inner_strides: [usize; N] = std::array::from_fn(|k| strides[k][rank - 1]);
    let mut index = vec![0usize; rank - 1];
    let mut base = offsets;
    loop {
        for i in 0..inner {
            f(std::array::from_fn(|k| base[k] + i * inner_strides[k]));
        }
        // Advance the outer multi-index.
        let mut d = rank - 1;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            index[d] += 1;
            for k in 0..N {
                base[k] += strides[k][d];
            }
            if index[d] < shape[d] {
                break;
            }
            for k in 0..N {
                base[k] -= strides[k][d] * shape[d];
            }
            index[d] = 0;
        }
    }
}

fn contiguous_in(shape: &[usize], strides: &[usize]) -> bool {
    let mut expected = 1;
    for (&n, &s) in shape.iter().zip(strides).rev() {
        if n > 1 && s != expected {
            return false;
        }
        expected *= n;
    }
    true
}

struct Prepared<'a, T: Numeric, const N: usize> {
    operands: [Operand<'a, T>; N],
    strides: [Vec<usize>; N],
    offsets: [usize; N],
}

fn prepare<'a, T: Numeric, const N: usize>(inputs: &[VariableView<'a>; N], out: &Dims) -> Prepared<'a, T, N> {
    let operands: [Operand<'a, T>; N] = std::array::from_fn(|k| operand::<T>(&inputs[k]));
    let strides = std::array::from_fn(|k| strides_in(out, &operands[k].layout));
    let offsets = std::array::from_fn(|k| operands[k].layout.offset());
    Prepared { operands, strides, offsets }
}

fn dense<'b, T: Numeric>(d: &'b Data<'_, T>) -> &'b [T] {
    match d {
        Data::Dense(v) => v,
        Data::Events(_) => unreachable!("dense operand expected"),
    }
}

/// Applies `kernel` element-wise to `inputs`.
pub fn transform<const N: usize, K: Kernel<N>>(
    inputs: [VariableView<'_>; N],
    kernel: &K,
) -> Result<Variable> {
    let (combo, event) = resolve(kernel.name(), kernel.combos(), &inputs)?;
    let unit = kernel.unit(std::array::from_fn(|i| inputs[i].unit()))?;
    let dims: Vec<&Dims> = inputs.iter().map(|v| v.dims()).collect();
    let plan = plan_broadcast(&dims)?;
    match combo.output {
        DType::Float64 => run::<f64, N, K>(&inputs, kernel, plan.dims, unit, event),
        DType::Float32 => run::<f32, N, K>(&inputs, kernel, plan.dims, unit, event),
        DType::Int64 => run::<i64, N, K>(&inputs, kernel, plan.dims, unit, event),
        DType::Int32 => run::<i32, N, K>(&inputs, kernel, plan.dims, unit, event),
        other => Err(Error::Type(format!("'{}' declares unsupported output type {other}", kernel.name()))),
    }
}

fn no_variance_rule(name: &str) -> Error {
    Error::Unsupported(format!("'{name}' cannot propagate variances"))
}

fn run<T: Numeric, const N: usize, K: Kernel<N>>(
    inputs: &[VariableView<'_>; N],
    kernel: &K,
    dims: Dims,
    unit: Unit,
    event: Option<usize>,
) -> Result<Variable> {
    let p = prepare::<T, N>(inputs, &dims);
    let with_variances = p.operands.iter().any(|o| o.variances.is_some());
    if let Some(ev) = event {
        return run_events(&p, kernel, dims, unit, ev, with_variances);
    }
    let shape = dims.shape();
    let volume = dims.volume();
    let vals: [&[T]; N] = std::array::from_fn(|k| dense(&p.operands[k].values));
    if !with_variances {
        let all_contiguous = (0..N).all(|k| contiguous_in(shape, &p.strides[k]))
            && p.strides.iter().all(|s| s.iter().zip(shape).all(|(&st, &n)| st != 0 || n <= 1));
        let values: Vec<T> = if all_contiguous {
            let slices: [&[T]; N] = std::array::from_fn(|k| &vals[k][p.offsets[k]..p.offsets[k] + volume]);
            let mut out = output_buffer(volume);
            out.extend((0..volume).map(|i| kernel.value(std::array::from_fn(|k| slices[k][i]))));
            out
        } else {
            let mut out = output_buffer(volume);
            for_each_position(shape, &p.strides, p.offsets, |pos| {
                out.push(kernel.value(std::array::from_fn(|k| vals[k][pos[k]])));
            });
            out
        };
        return Variable::new(dims, unit, T::into_values(values), None);
    }
    let zero = [T::ZERO];
    let vars: [&[T]; N] = std::array::from_fn(|k| match &p.operands[k].variances {
        Some(v) => dense(v),
        None => &zero[..],
    });
    let mut values = output_buffer(volume);
    let mut variances = output_buffer(volume);
    let mut supported = true;
    for_each_position(shape, &p.strides, p.offsets, |pos| {
        let x = std::array::from_fn(|k| vals[k][pos[k]]);
        let v =
            std::array::from_fn(
                |k| {
                    if p.operands[k].variances.is_some() {
                        vars[k][pos[k]]
                    } else {
                        T::ZERO
                    }
                },
            );
        match kernel.value_and_variance(x, v) {
            Some((a, b)) => {
                values.push(a);
                variances.push(b);
            }
            None => supported = false,
        }
    });
    if !supported {
        return Err(no_variance_rule(kernel.name()));
    }
    Variable::new(dims, unit, T::into_values(values), Some(T::into_values(variances)))
}

fn run_events<T: Numeric, const N: usize, K: Kernel<N>>(
    p: &Prepared<'_, T, N>,
    kernel: &K,
    dims: Dims,
    unit: Unit,
    ev: usize,
    with_variances: bool,
) -> Result<Variable> {
    let events = match &p.operands[ev].values {
        Data::Events(s) => s.as_ref(),
        Data::Dense(_) => unreachable!(),
    };
    let event_vars = match &p.operands[ev].variances {
        Some(Data::Events(s)) => Some(s.as_ref()),
        _ => None,
    };
    let dense_vals: [Option<&[T]>; N] = std::array::from_fn(|k| match &p.operands[k].values {
        Data::Dense(v) => Some(&v[..]),
        Data::Events(_) => None,
    });
    let dense_vars: [Option<&[T]>; N] = std::array::from_fn(|k| match &p.operands[k].variances {
        Some(Data::Dense(v)) => Some(&v[..]),
        _ => None,
    });
    let mut lists = Vec::with_capacity(dims.volume());
    for_each_position(dims.shape(), &p.strides, p.offsets, |pos| lists.push(pos));
    let total: usize = lists.iter().map(|pos| events.list_len(pos[ev])).sum();
    let mut values = EventBuilder::with_capacity(lists.len(), total);
    let mut variances = with_variances.then(|| EventBuilder::with_capacity(lists.len(), total));
    for pos in &lists {
        let list = events.list(pos[ev]);
        let mut x: [T; N] = std::array::from_fn(|k| dense_vals[k].map_or(T::ZERO, |v| v[pos[k]]));
        match variances.as_mut() {
            None => {
                for &e in list {
                    x[ev] = e;
                    values.push_event(kernel.value(x));
                }
            }
            Some(out_vars) => {
                let mut v: [T; N] = std::array::from_fn(|k| dense_vars[k].map_or(T::ZERO, |d| d[pos[k]]));
                let list_vars = event_vars.map(|s| s.list(pos[ev]));
                for (j, &e) in list.iter().enumerate() {
                    x[ev] = e;
                    v[ev] = list_vars.map_or(T::ZERO, |l| l[j]);
                    let (a, b) =
                        kernel.value_and_variance(x, v).ok_or_else(|| no_variance_rule(kernel.name()))?;
                    values.push_event(a);
                    out_vars.push_event(b);
                }
                out_vars.finish_list();
            }
        }
        values.finish_list();
    }
    Variable::from_events(dims, unit, values.build(), variances.map(EventBuilder::build))
}

/// Applies `predicate` element-wise, producing a dimensionless boolean
/// variable without variances. Event-list inputs are not supported.
pub fn transform_predicate<const N: usize, P: Predicate<N>>(
    inputs: [VariableView<'_>; N],
    predicate: &P,
) -> Result<Variable> {
    let (combo, event) = resolve(predicate.name(), predicate.combos(), &inputs)?;
    if event.is_some() {
        return Err(Error::Unsupported(format!(
            "'{}' does not accept event-list operands",
            predicate.name()
        )));
    }
    predicate.check_units(std::array::from_fn(|i| inputs[i].unit()))?;
    let dims: Vec<&Dims> = inputs.iter().map(|v| v.dims()).collect();
    let plan = plan_broadcast(&dims)?;
    fn go<T: Numeric, const N: usize, P: Predicate<N>>(
        inputs: &[VariableView<'_>; N],
        predicate: &P,
        dims: Dims,
    ) -> Result<Variable> {
        let p = prepare::<T, N>(inputs, &dims);
        let vals: [&[T]; N] = std::array::from_fn(|k| dense(&p.operands[k].values));
        let mut out = Vec::with_capacity(dims.volume());
        for_each_position(dims.shape(), &p.strides, p.offsets, |pos| {
            out.push(predicate.test(std::array::from_fn(|k| vals[k][pos[k]])));
        });
        Variable::from_vec(dims, Unit::DIMENSIONLESS, out)
    }
    match combo.output {
        DType::Float64 => go::<f64, N, P>(&inputs, predicate, plan.dims),
        DType::Float32 => go::<f32, N, P>(&inputs, predicate, plan.dims),
        DType::Int64 => go::<i64, N, P>(&inputs, predicate, plan.dims),
        DType::Int32 => go::<i32, N, P>(&inputs, predicate, plan.dims),
        other => {
            Err(Error::Type(format!("'{}' declares unsupported comparison type {other}", predicate.name())))
        }
    }
}

/// Target of [`transform_in_place`].
///
/// An owned [`Variable`] may have its unit replaced by the operation; a
/// [`VariableViewMut`] may not.
pub trait InPlaceTarget {
    #[doc(hidden)]
    fn target(&mut self) -> (&mut Variable, Layout, bool);
}

impl InPlaceTarget for Variable {
    fn target(&mut self) -> (&mut Variable, Layout, bool) {
        let layout = Layout::contiguous(self.dims().clone());
        (self, layout, true)
    }
}

impl InPlaceTarget for VariableViewMut<'_> {
    fn target(&mut self) -> (&mut Variable, Layout, bool) {
        let (var, layout) = self.parts();
        let layout = layout.clone();
        (var, layout, false)
    }
}

/// Computes `kernel(target, others...)` and writes the result into `target`.
///
/// The target is the first kernel argument. The result must have exactly
/// the target's dims, element type and variance presence; when the target
/// is a view, the result unit must equal the target's unit.
pub fn transform_in_place<const N: usize, K: Kernel<N>, X: InPlaceTarget + ?Sized>(
    target: &mut X,
    others: &[VariableView<'_>],
    kernel: &K,
) -> Result<()> {
    if others.len() + 1 != N {
        return Err(Error::Unsupported(format!(
            "'{}' takes {N} operands, got {}",
            kernel.name(),
            others.len() + 1
        )));
    }
    let (var, layout, may_change_unit) = target.target();
    let result = {
        let inputs: [VariableView<'_>; N] = std::array::from_fn(|k| {
            if k == 0 {
                VariableView::from_layout(var, layout.clone())
            } else {
                others[k - 1].clone()
            }
        });
        transform(inputs, kernel)?
    };
    if result.dims() != layout.dims() {
        return Err(Error::Shape(format!(
            "in-place '{}' would broadcast the target {} to {}",
            kernel.name(),
            layout.dims(),
            result.dims()
        )));
    }
    if result.dtype() != var.dtype() {
        return Err(Error::Type(format!(
            "in-place '{}' produces {} but the target holds {}",
            kernel.name(),
            result.dtype(),
            var.dtype()
        )));
    }
    if result.unit() != var.unit() && !may_change_unit {
        return Err(Error::View(format!(
            "in-place '{}' would change the unit of a view from {} to {}",
            kernel.name(),
            var.unit(),
            result.unit()
        )));
    }
    if result.has_variances() && !var.has_variances() {
        return Err(Error::Type(format!(
            "in-place '{}' would add variances to a target without variances",
            kernel.name()
        )));
    }
    let targets: Vec<usize> = layout.positions().collect();
    let sources: Vec<usize> = (0..result.len()).collect();
    let unit = result.unit();
    let (_, _, values, variances) = result.into_parts();
    let (dst_values, dst_variances) = var.buffers_mut();
    copy_elements(dst_values, &targets, &values, &sources)?;
    if let (Some(dst), Some(src)) = (dst_variances, variances.as_ref()) {
        copy_elements(dst, &targets, src, &sources)?;
    }
    if may_change_unit {
        var.set_unit(unit)?;
    }
    Ok(())
}
