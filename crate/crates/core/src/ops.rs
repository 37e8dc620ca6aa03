//! Built-in element-wise operations and reductions.
//!
//! Binary arithmetic promotes `int32` to `int64` and `float32` to `float64`
//! when the operand types differ; mixing integers and floats is rejected.
//! Integer arithmetic wraps on overflow (two's complement) without
//! detection. Integer division by zero is an [`Error::Arithmetic`]; float
//! division follows IEEE 754.

use crate::error::{Error, Result};
use crate::transform::{
    for_each_position, transform, transform_in_place, transform_predicate, InPlaceTarget, Kernel, Predicate,
    TypeCombo,
};
use crate::units::Unit;
use crate::variable::{DType, Numeric, Values, Variable, VariableView};

use DType::{Float32, Float64, Int32, Int64};

const ARITHMETIC: [TypeCombo<2>; 8] = [
    TypeCombo::new([Float64, Float64], Float64),
    TypeCombo::new([Float32, Float32], Float32),
    TypeCombo::new([Float64, Float32], Float64),
    TypeCombo::new([Float32, Float64], Float64),
    TypeCombo::new([Int64, Int64], Int64),
    TypeCombo::new([Int32, Int32], Int32),
    TypeCombo::new([Int64, Int32], Int64),
    TypeCombo::new([Int32, Int64], Int64),
];

const FLOAT_UNARY: [TypeCombo<1>; 2] =
    [TypeCombo::new([Float64], Float64), TypeCombo::new([Float32], Float32)];

fn require_equal(op: &str, a: Unit, b: Unit) -> Result<Unit> {
    if a != b {
        return Err(Error::Unit(format!("cannot {op} {a} and {b}")));
    }
    Ok(a)
}

pub struct Add;
pub struct Subtract;
pub struct Multiply;
pub struct Divide;
pub struct Sqrt;
pub struct Abs;
pub struct Sin;
pub struct Cos;
pub struct Equal;
pub struct Less;

impl Kernel<2> for Add {
    fn name(&self) -> &str {
        "add"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn unit(&self, [a, b]: [Unit; 2]) -> Result<Unit> {
        require_equal("add", a, b)
    }
    #[inline]
    fn value<T: Numeric>(&self, [a, b]: [T; 2]) -> T {
        a.add(b)
    }
    fn partials<T: Numeric>(&self, _: [T; 2]) -> Option<[T; 2]> {
        Some([T::ONE, T::ONE])
    }
    fn value_and_variance<T: Numeric>(&self, [a, b]: [T; 2], [va, vb]: [T; 2]) -> Option<(T, T)> {
        Some((a.add(b), va.add(vb)))
    }
}

impl Kernel<2> for Subtract {
    fn name(&self) -> &str {
        "subtract"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn unit(&self, [a, b]: [Unit; 2]) -> Result<Unit> {
        require_equal("subtract", a, b)
    }
    #[inline]
    fn value<T: Numeric>(&self, [a, b]: [T; 2]) -> T {
        a.sub(b)
    }
    fn partials<T: Numeric>(&self, _: [T; 2]) -> Option<[T; 2]> {
        Some([T::ONE, T::ZERO.sub(T::ONE)])
    }
    fn value_and_variance<T: Numeric>(&self, [a, b]: [T; 2], [va, vb]: [T; 2]) -> Option<(T, T)> {
        Some((a.sub(b), va.add(vb)))
    }
}

impl Kernel<2> for Multiply {
    fn name(&self) -> &str {
        "multiply"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn unit(&self, [a, b]: [Unit; 2]) -> Result<Unit> {
        a.mul(&b)
    }
    #[inline]
    fn value<T: Numeric>(&self, [a, b]: [T; 2]) -> T {
        a.mul(b)
    }
    fn partials<T: Numeric>(&self, [a, b]: [T; 2]) -> Option<[T; 2]> {
        Some([b, a])
    }
}

impl Kernel<2> for Divide {
    fn name(&self) -> &str {
        "divide"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn unit(&self, [a, b]: [Unit; 2]) -> Result<Unit> {
        a.div(&b)
    }
    #[inline]
    fn value<T: Numeric>(&self, [a, b]: [T; 2]) -> T {
        a.div(b)
    }
    fn partials<T: Numeric>(&self, [a, b]: [T; 2]) -> Option<[T; 2]> {
        Some([T::ONE.div(b), T::ZERO.sub(a.div(b.mul(b)))])
    }
}

impl Kernel<1> for Sqrt {
    fn name(&self) -> &str {
        "sqrt"
    }
    fn combos(&self) -> &[TypeCombo<1>] {
        &FLOAT_UNARY
    }
    fn unit(&self, [a]: [Unit; 1]) -> Result<Unit> {
        a.sqrt()
    }
    fn value<T: Numeric>(&self, [a]: [T; 1]) -> T {
        a.sqrt()
    }
    fn partials<T: Numeric>(&self, [a]: [T; 1]) -> Option<[T; 1]> {
        Some([T::ONE.div(T::from_f64(2.0).mul(a.sqrt()))])
    }
}

impl Kernel<1> for Abs {
    fn name(&self) -> &str {
        "abs"
    }
    fn combos(&self) -> &[TypeCombo<1>] {
        &FLOAT_UNARY
    }
    fn unit(&self, [a]: [Unit; 1]) -> Result<Unit> {
        Ok(a)
    }
    fn value<T: Numeric>(&self, [a]: [T; 1]) -> T {
        a.abs()
    }
    fn value_and_variance<T: Numeric>(&self, [a]: [T; 1], [v]: [T; 1]) -> Option<(T, T)> {
        Some((a.abs(), v))
    }
}

fn require_angle(op: &str, a: Unit) -> Result<Unit> {
    if a != Unit::DIMENSIONLESS {
        return Err(Error::Unit(format!("{op} requires a dimensionless argument, got {a}")));
    }
    Ok(Unit::DIMENSIONLESS)
}

impl Kernel<1> for Sin {
    fn name(&self) -> &str {
        "sin"
    }
    fn combos(&self) -> &[TypeCombo<1>] {
        &FLOAT_UNARY
    }
    fn unit(&self, [a]: [Unit; 1]) -> Result<Unit> {
        require_angle("sin", a)
    }
    fn value<T: Numeric>(&self, [a]: [T; 1]) -> T {
        a.sin()
    }
    fn partials<T: Numeric>(&self, [a]: [T; 1]) -> Option<[T; 1]> {
        Some([a.cos()])
    }
}

impl Kernel<1> for Cos {
    fn name(&self) -> &str {
        "cos"
    }
    fn combos(&self) -> &[TypeCombo<1>] {
        &FLOAT_UNARY
    }
    fn unit(&self, [a]: [Unit; 1]) -> Result<Unit> {
        require_angle("cos", a)
    }
    fn value<T: Numeric>(&self, [a]: [T; 1]) -> T {
        a.cos()
    }
    fn partials<T: Numeric>(&self, [a]: [T; 1]) -> Option<[T; 1]> {
        Some([T::ZERO.sub(a.sin())])
    }
}

impl Predicate<2> for Equal {
    fn name(&self) -> &str {
        "compare_eq"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn check_units(&self, [a, b]: [Unit; 2]) -> Result<()> {
        require_equal("compare", a, b).map(drop)
    }
    fn test<T: Numeric>(&self, [a, b]: [T; 2]) -> bool {
        a == b
    }
}

impl Predicate<2> for Less {
    fn name(&self) -> &str {
        "compare_lt"
    }
    fn combos(&self) -> &[TypeCombo<2>] {
        &ARITHMETIC
    }
    fn check_units(&self, [a, b]: [Unit; 2]) -> Result<()> {
        require_equal("compare", a, b).map(drop)
    }
    fn test<T: Numeric>(&self, [a, b]: [T; 2]) -> bool {
        a < b
    }
}

/// Arithmetic operation selector used by container-level operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Subtract,
    Multiply,
    Divide,
}

impl BinaryOp {
    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Subtract => "subtract",
            BinaryOp::Multiply => "multiply",
            BinaryOp::Divide => "divide",
        }
    }

    pub fn apply<'a, 'b>(
        self,
        a: impl Into<VariableView<'a>>,
        b: impl Into<VariableView<'b>>,
    ) -> Result<Variable> {
        let (a, b) = (a.into(), b.into());
        match self {
            BinaryOp::Add => transform([a, b], &Add),
            BinaryOp::Subtract => transform([a, b], &Subtract),
            BinaryOp::Multiply => transform([a, b], &Multiply),
            BinaryOp::Divide => {
                check_integer_divisor(&a, &b)?;
                transform([a, b], &Divide)
            }
        }
    }

    /// `target = target op other`, without broadcasting the target.
    pub fn apply_in_place<'b, X: InPlaceTarget + ?Sized>(
        self,
        target: &mut X,
        other: impl Into<VariableView<'b>>,
    ) -> Result<()> {
        let other = other.into();
        let others = std::slice::from_ref(&other);
        match self {
            BinaryOp::Add => transform_in_place(target, others, &Add),
            BinaryOp::Subtract => transform_in_place(target, others, &Subtract),
            BinaryOp::Multiply => transform_in_place(target, others, &Multiply),
            BinaryOp::Divide => {
                let integer = matches!(other.dtype().element(), Int64 | Int32);
                if integer && contains_zero(&other) {
                    return Err(Error::Arithmetic("integer division by zero".into()));
                }
                transform_in_place(target, others, &Divide)
            }
        }
    }
}

fn contains_zero(v: &VariableView<'_>) -> bool {
    fn dense<T: Numeric>(v: &VariableView<'_>) -> bool {
        let var = v.underlying();
        match T::dense(var.values()) {
            Some(buf) => v.layout().positions().any(|p| buf[p] == T::ZERO),
            None => {
                let s = T::events(var.values()).expect("numeric buffer");
                v.layout().positions().any(|p| s.list(p).contains(&T::ZERO))
            }
        }
    }
    match v.dtype().element() {
        Int64 => dense::<i64>(v),
        Int32 => dense::<i32>(v),
        _ => false,
    }
}

fn check_integer_divisor(a: &VariableView<'_>, b: &VariableView<'_>) -> Result<()> {
    let int = |d: DType| matches!(d.element(), Int64 | Int32);
    if int(a.dtype()) && int(b.dtype()) && contains_zero(b) {
        return Err(Error::Arithmetic("integer division by zero".into()));
    }
    Ok(())
}

/// Element-wise sum; variances add. Units must be equal.
pub fn add<'a, 'b>(a: impl Into<VariableView<'a>>, b: impl Into<VariableView<'b>>) -> Result<Variable> {
    BinaryOp::Add.apply(a, b)
}

/// Element-wise difference; variances add. Units must be equal.
pub fn subtract<'a, 'b>(a: impl Into<VariableView<'a>>, b: impl Into<VariableView<'b>>) -> Result<Variable> {
    BinaryOp::Subtract.apply(a, b)
}

pub fn multiply<'a, 'b>(a: impl Into<VariableView<'a>>, b: impl Into<VariableView<'b>>) -> Result<Variable> {
    BinaryOp::Multiply.apply(a, b)
}

pub fn divide<'a, 'b>(a: impl Into<VariableView<'a>>, b: impl Into<VariableView<'b>>) -> Result<Variable> {
    BinaryOp::Divide.apply(a, b)
}

pub fn sqrt<'a>(a: impl Into<VariableView<'a>>) -> Result<Variable> {
    transform([a.into()], &Sqrt)
}

pub fn abs<'a>(a: impl Into<VariableView<'a>>) -> Result<Variable> {
    transform([a.into()], &Abs)
}

pub fn sin<'a>(a: impl Into<VariableView<'a>>) -> Result<Variable> {
    transform([a.into()], &Sin)
}

pub fn cos<'a>(a: impl Into<VariableView<'a>>) -> Result<Variable> {
    transform([a.into()], &Cos)
}

pub fn compare_eq<'a, 'b>(
    a: impl Into<VariableView<'a>>,
    b: impl Into<VariableView<'b>>,
) -> Result<Variable> {
    transform_predicate([a.into(), b.into()], &Equal)
}

pub fn compare_lt<'a, 'b>(
    a: impl Into<VariableView<'a>>,
    b: impl Into<VariableView<'b>>,
) -> Result<Variable> {
    transform_predicate([a.into(), b.into()], &Less)
}

/// Sum over `dim`, accumulated in ascending index order.
pub fn sum<'a>(v: impl Into<VariableView<'a>>, dim: &str) -> Result<Variable> {
    reduce(&v.into(), dim, false)
}

/// Mean over `dim`: sum / N with variance (sum of variances) / N^2.
/// Floating-point data only; an empty dim gives NaN.
pub fn mean<'a>(v: impl Into<VariableView<'a>>, dim: &str) -> Result<Variable> {
    let v = v.into();
    if !v.dtype().is_float() || v.dtype().is_event() {
        return Err(Error::Type(format!("mean requires float data, got {}", v.dtype())));
    }
    reduce(&v, dim, true)
}

fn reduce(v: &VariableView<'_>, dim: &str, mean: bool) -> Result<Variable> {
    let d = v.dims().require(dim)?;
    match v.dtype() {
        Float64 => reduce_typed::<f64>(v, d, mean),
        Float32 => reduce_typed::<f32>(v, d, mean),
        Int64 => reduce_typed::<i64>(v, d, mean),
        Int32 => reduce_typed::<i32>(v, d, mean),
        other => Err(Error::Type(format!("cannot sum {other} data"))),
    }
}

fn reduce_typed<T: Numeric>(v: &VariableView<'_>, d: usize, mean: bool) -> Result<Variable> {
    let layout = v.layout();
    let n = layout.dims().shape()[d];
    let stride = layout.strides()[d];
    let out_dims = layout.dims().without(&layout.dims().labels()[d]);
    let mut out_strides = layout.strides().to_vec();
    out_strides.remove(d);
    let strides = [out_strides];
    let scale = T::from_usize(n);
    let accumulate = |buf: &[T], variance: bool| {
        let mut out = Vec::with_capacity(out_dims.volume());
        for_each_position(out_dims.shape(), &strides, [layout.offset()], |[base]| {
            let mut acc = T::ZERO;
            for k in 0..n {
                acc = acc.add(buf[base + k * stride]);
            }
            if mean {
                acc = if variance { acc.div(scale.mul(scale)) } else { acc.div(scale) };
            }
            out.push(acc);
        });
        T::into_values(out)
    };
    let var = v.underlying();
    let values = accumulate(T::dense(var.values()).expect("dtype checked"), false);
    let variances = var.variances().map(|buf| accumulate(T::dense(buf).expect("dtype checked"), true));
    Variable::new(out_dims, v.unit(), values, variances)
}

/// Joins `a` and `b` along `dim`.
///
/// Dims other than `dim` must agree (in any order; the output follows
/// `a`). An operand lacking `dim` contributes a single slice. When neither
/// operand has `dim`, a new outer dim of extent 2 is created.
pub fn concatenate<'a, 'b>(
    a: impl Into<VariableView<'a>>,
    b: impl Into<VariableView<'b>>,
    dim: &str,
) -> Result<Variable> {
    let (a, b) = (a.into(), b.into());
    if a.unit() != b.unit() {
        return Err(Error::Unit(format!("cannot concatenate {} and {}", a.unit(), b.unit())));
    }
    if a.dtype() != b.dtype() {
        return Err(Error::Type(format!("cannot concatenate {} and {}", a.dtype(), b.dtype())));
    }
    if a.has_variances() != b.has_variances() {
        return Err(Error::Type("cannot concatenate data with and without variances".into()));
    }
    let rest_a = a.dims().without(dim);
    let rest_b = b.dims().without(dim);
    if !rest_a.is_permutation_of(&rest_b) {
        return Err(Error::Shape(format!("cannot concatenate {} and {} along '{dim}'", a.dims(), b.dims())));
    }
    let na = a.dims().extent(dim).unwrap_or(1);
    let nb = b.dims().extent(dim).unwrap_or(1);
    let mut out = rest_a.clone();
    let p = a.dims().index_of(dim).unwrap_or(0);
    out.insert(p, dim, na + nb)?;

    // Both operands in output order, `dim` included only if present.
    let ordered = |v: &VariableView<'_>| -> Result<Variable> {
        let order: Vec<&str> =
            out.labels().iter().map(String::as_str).filter(|l| v.dims().contains(l)).collect();
        Ok(v.transpose(&order)?.to_variable())
    };
    let (a2, b2) = (ordered(&a)?, ordered(&b)?);
    let outer: usize = out.shape()[..p].iter().product();
    let inner: usize = out.shape()[p + 1..].iter().product();
    let (block_a, block_b) = (na * inner, nb * inner);
    let offset = a2.len();
    let picks: Vec<usize> = (0..outer)
        .flat_map(|o| {
            (o * block_a..(o + 1) * block_a).chain(offset + o * block_b..offset + (o + 1) * block_b)
        })
        .collect();
    let join = |x: &Values, y: &Values| -> Result<Values> { Ok(x.concat(y)?.gather(picks.iter().copied())) };
    let values = join(a2.values(), b2.values())?;
    let variances = match (a2.variances(), b2.variances()) {
        (Some(x), Some(y)) => Some(join(x, y)?),
        _ => None,
    };
    Variable::new(out, a.unit(), values, variances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims;
    use crate::Dims;

    fn f(dims: Dims, unit: Unit, v: Vec<f64>) -> Variable {
        Variable::from_vec(dims, unit, v).unwrap()
    }

    fn fv(value: f64, variance: f64, unit: Unit) -> Variable {
        Variable::scalar_with_variance(value, variance, unit).unwrap()
    }

    #[test]
    fn add_examples() {
        let a = f(dims!["x" => 2], Unit::M, vec![1.0, 2.0]);
        let b = f(dims!["x" => 2], Unit::M, vec![3.0, 4.0]);
        let c = add(&a, &b).unwrap();
        assert_eq!(c.values_as::<f64>().unwrap(), &[4.0, 6.0]);
        assert_eq!(c.unit(), Unit::M);
        let c = add(&fv(1.0, 0.04, Unit::M), &fv(2.0, 0.09, Unit::M)).unwrap();
        assert_eq!(c.values_as::<f64>().unwrap(), &[3.0]);
        assert!((c.variances_as::<f64>().unwrap()[0] - 0.13).abs() < 1e-15);
        let s = f(dims!["x" => 2], Unit::S, vec![1.0, 2.0]);
        assert!(matches!(add(&a, &s), Err(Error::Unit(_))));
        let ten = Variable::scalar(10.0, Unit::M).unwrap();
        assert_eq!(add(&a, &ten).unwrap().values_as::<f64>().unwrap(), &[11.0, 12.0]);
    }

    #[test]
    fn promotion_and_type_errors() {
        let a = Variable::from_vec(dims!["x" => 2], Unit::M, vec![1i32, 2]).unwrap();
        let b = Variable::from_vec(dims!["x" => 2], Unit::M, vec![3i64, 4]).unwrap();
        let c = add(&a, &b).unwrap();
        assert_eq!(c.dtype(), DType::Int64);
        let x = Variable::from_vec(dims!["x" => 2], Unit::M, vec![3.0f32, 4.0]).unwrap();
        let y = f(dims!["x" => 2], Unit::M, vec![1.0, 2.0]);
        assert_eq!(add(&x, &y).unwrap().dtype(), DType::Float64);
        assert_eq!(add(&x, &x).unwrap().dtype(), DType::Float32);
        assert!(matches!(add(&a, &y), Err(Error::Type(_))));
    }

    #[test]
    fn multiply_and_divide_variances() {
        let c = multiply(&fv(2.0, 0.04, Unit::M), &fv(3.0, 0.09, Unit::S)).unwrap();
        assert_eq!(c.values_as::<f64>().unwrap(), &[6.0]);
        assert!((c.variances_as::<f64>().unwrap()[0] - 0.72).abs() < 1e-12);
        assert_eq!(c.unit(), Unit::M.mul(&Unit::S).unwrap());
        let d = divide(&fv(6.0, 0.72, Unit::COUNTS), &fv(3.0, 0.09, Unit::COUNTS)).unwrap();
        assert_eq!(d.values_as::<f64>().unwrap(), &[2.0]);
        assert!((d.variances_as::<f64>().unwrap()[0] - 0.12).abs() < 1e-12);
        assert!(d.unit().is_dimensionless());
        let one = Variable::scalar(1.0, Unit::DIMENSIONLESS).unwrap();
        let x = fv(2.5, 0.3, Unit::M);
        assert!(multiply(&x, &one).unwrap().identical(&x));
    }

    #[test]
    fn integer_division_by_zero() {
        let a = Variable::from_vec(dims!["x" => 2], Unit::M, vec![4i64, 2]).unwrap();
        let b = Variable::from_vec(dims!["x" => 2], Unit::S, vec![2i64, 0]).unwrap();
        assert!(matches!(divide(&a, &b), Err(Error::Arithmetic(_))));
        assert_eq!(divide(&a, b.slice_point("x", 0).unwrap()).unwrap().values_as::<i64>().unwrap(), &[2, 1]);
        let fz = f(dims!["x" => 1], Unit::S, vec![0.0]);
        let q = divide(&f(dims!["x" => 1], Unit::M, vec![1.0]), &fz).unwrap();
        assert_eq!(q.values_as::<f64>().unwrap()[0], f64::INFINITY);
    }

    #[test]
    fn unary() {
        let m2 = Unit::M.mul(&Unit::M).unwrap();
        let r = sqrt(&f(dims![], m2, vec![25.0])).unwrap();
        assert_eq!(r.values_as::<f64>().unwrap(), &[5.0]);
        assert_eq!(r.unit(), Unit::M);
        let r = sqrt(&fv(4.0, 0.16, Unit::DIMENSIONLESS)).unwrap();
        assert!((r.variances_as::<f64>().unwrap()[0] - 0.01).abs() < 1e-15);
        let z = f(dims![], Unit::RAD, vec![0.0]);
        assert_eq!(sin(&z).unwrap().values_as::<f64>().unwrap(), &[0.0]);
        assert_eq!(cos(&z).unwrap().values_as::<f64>().unwrap(), &[1.0]);
        assert!(matches!(sin(&f(dims![], Unit::M, vec![0.0])), Err(Error::Unit(_))));
        assert!(matches!(sqrt(&f(dims![], Unit::M, vec![1.0])), Err(Error::Unit(_))));
        let a = abs(&fv(-2.0, 0.5, Unit::M)).unwrap();
        assert_eq!(a.values_as::<f64>().unwrap(), &[2.0]);
        assert_eq!(a.variances_as::<f64>().unwrap(), &[0.5]);
        let ints = Variable::from_vec(dims![], Unit::M, vec![4i64]).unwrap();
        assert!(matches!(sqrt(&ints), Err(Error::Type(_))));
    }

    #[test]
    fn comparisons() {
        let a = f(dims!["x" => 2], Unit::M, vec![1.0, 2.0]);
        let b = f(dims!["x" => 2], Unit::M, vec![1.0, 3.0]);
        let eq = compare_eq(&a, &b).unwrap();
        assert_eq!(eq.values_as::<bool>().unwrap(), &[true, false]);
        assert!(!eq.has_variances());
        assert_eq!(compare_lt(&a, &b).unwrap().values_as::<bool>().unwrap(), &[false, true]);
        assert!(compare_eq(&a, &a).unwrap().values_as::<bool>().unwrap().iter().all(|&x| x));
        let s = f(dims!["x" => 2], Unit::S, vec![1.0, 2.0]);
        assert!(matches!(compare_eq(&a, &s), Err(Error::Unit(_))));
    }

    #[test]
    fn reductions() {
        let v = f(dims!["x" => 3], Unit::COUNTS, vec![1.0, 2.0, 3.0]);
        let s = sum(&v, "x").unwrap();
        assert_eq!(s.values_as::<f64>().unwrap(), &[6.0]);
        assert_eq!(s.unit(), Unit::COUNTS);
        let m = Variable::from_vec(dims!["x" => 2, "y" => 2], Unit::M, vec![1i64, 2, 3, 4]).unwrap();
        assert_eq!(sum(&m, "y").unwrap().values_as::<i64>().unwrap(), &[3, 7]);
        assert_eq!(sum(&m, "x").unwrap().values_as::<i64>().unwrap(), &[4, 6]);
        let w =
            Variable::with_variances(dims!["x" => 3], Unit::M, vec![1.0, 2.0, 3.0], vec![1.0; 3]).unwrap();
        assert_eq!(sum(&w, "x").unwrap().variances_as::<f64>().unwrap(), &[3.0]);
        assert!(matches!(sum(&w, "q"), Err(Error::Dims(_))));
        let v = Variable::with_variances(dims!["x" => 4], Unit::M, vec![1.0, 2.0, 3.0, 4.0], vec![0.01; 4])
            .unwrap();
        let m = mean(&v, "x").unwrap();
        assert_eq!(m.values_as::<f64>().unwrap(), &[2.5]);
        assert!((m.variances_as::<f64>().unwrap()[0] - 0.0025).abs() < 1e-15);
        let one = f(dims!["x" => 1, "y" => 2], Unit::M, vec![7.0, 8.0]);
        assert_eq!(mean(&one, "x").unwrap().values_as::<f64>().unwrap(), &[7.0, 8.0]);
        let empty = f(dims!["x" => 0], Unit::M, vec![]);
        assert!(mean(&empty, "x").unwrap().values_as::<f64>().unwrap()[0].is_nan());
        let ints = Variable::from_vec(dims!["x" => 2], Unit::M, vec![1i64, 2]).unwrap();
        assert!(matches!(mean(&ints, "x"), Err(Error::Type(_))));
    }

    #[test]
    fn reduction_of_transposed_slice() {
        let v = f(dims!["x" => 3, "y" => 2], Unit::M, (0..6).map(f64::from).collect());
        let t = v.transpose(&["y", "x"]).unwrap();
        let t = t.slice_range("x", 1, 3).unwrap();
        assert_eq!(sum(&t, "x").unwrap().values_as::<f64>().unwrap(), &[2.0 + 4.0, 3.0 + 5.0]);
    }

    #[test]
    fn concatenation() {
        let a = f(dims!["x" => 2], Unit::M, vec![1.0, 2.0]);
        let b = f(dims!["x" => 3], Unit::M, vec![3.0, 4.0, 5.0]);
        let c = concatenate(&a, &b, "x").unwrap();
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let s1 = Variable::scalar(1.0, Unit::M).unwrap();
        let s2 = Variable::scalar(2.0, Unit::M).unwrap();
        let r = concatenate(&s1, &s2, "run").unwrap();
        assert_eq!(r.dims(), &dims!["run" => 2]);
        let s = f(dims!["x" => 2], Unit::S, vec![1.0, 2.0]);
        assert!(matches!(concatenate(&a, &s, "x"), Err(Error::Unit(_))));

        let xy = f(dims!["x" => 2, "y" => 2], Unit::M, vec![1.0, 2.0, 3.0, 4.0]);
        let yx = f(dims!["y" => 2, "x" => 1], Unit::M, vec![5.0, 6.0]);
        let c = concatenate(&xy, &yx, "x").unwrap();
        assert_eq!(c.dims(), &dims!["x" => 3, "y" => 2]);
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let c = concatenate(&xy, &yx, "y").unwrap_err();
        assert!(matches!(c, Error::Shape(_)));
        let row = f(dims!["y" => 2], Unit::M, vec![5.0, 6.0]);
        let c = concatenate(&xy, &row, "x").unwrap();
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let col = f(dims!["x" => 2], Unit::M, vec![7.0, 8.0]);
        let c = concatenate(&xy, &col, "y").unwrap();
        assert_eq!(c.dims(), &dims!["x" => 2, "y" => 3]);
        assert_eq!(c.values_as::<f64>().unwrap(), &[1.0, 2.0, 7.0, 3.0, 4.0, 8.0]);

        let words = Variable::from_vec(dims!["x" => 1], Unit::DIMENSIONLESS, vec!["a".to_string()]).unwrap();
        let c = concatenate(&words, &words, "x").unwrap();
        assert_eq!(c.values_as::<String>().unwrap(), &["a", "a"]);
    }

    #[test]
    fn in_place() {
        let mut v = f(dims!["x" => 3], Unit::M, vec![1.0, 2.0, 3.0]);
        let one = Variable::scalar(1.0, Unit::M).unwrap();
        BinaryOp::Add.apply_in_place(&mut v, &one).unwrap();
        assert_eq!(v.values_as::<f64>().unwrap(), &[2.0, 3.0, 4.0]);
        let two = Variable::scalar(2.0, Unit::DIMENSIONLESS).unwrap();
        {
            let mut s = v.slice_range_mut("x", 1, 3).unwrap();
            BinaryOp::Multiply.apply_in_place(&mut s, &two).unwrap();
        }
        assert_eq!(v.values_as::<f64>().unwrap(), &[2.0, 6.0, 8.0]);
        let m = Variable::scalar(2.0, Unit::M).unwrap();
        {
            let mut s = v.slice_range_mut("x", 1, 3).unwrap();
            assert!(matches!(BinaryOp::Multiply.apply_in_place(&mut s, &m), Err(Error::View(_))));
        }
        assert_eq!(v.values_as::<f64>().unwrap(), &[2.0, 6.0, 8.0]);
        BinaryOp::Multiply.apply_in_place(&mut v, &m).unwrap();
        assert_eq!(v.unit(), Unit::M.mul(&Unit::M).unwrap());
        let wide = f(dims!["y" => 2], Unit::M.mul(&Unit::M).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(BinaryOp::Add.apply_in_place(&mut v, &wide), Err(Error::Shape(_))));
    }
}
