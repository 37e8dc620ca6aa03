//! Runtime element types and the type-erased value buffer.

use std::fmt;

use crate::error::{Error, Result};
use crate::events::EventStorage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DType {
    Float64,
    Float32,
    Int64,
    Int32,
    Bool,
    String,
    EventFloat64,
    EventFloat32,
    EventInt64,
    EventInt32,
}

impl DType {
    pub const ALL: [DType; 10] = [
        DType::Float64,
        DType::Float32,
        DType::Int64,
        DType::Int32,
        DType::Bool,
        DType::String,
        DType::EventFloat64,
        DType::EventFloat32,
        DType::EventInt64,
        DType::EventInt32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DType::Float64 => "float64",
            DType::Float32 => "float32",
            DType::Int64 => "int64",
            DType::Int32 => "int32",
            DType::Bool => "bool",
            DType::String => "string",
            DType::EventFloat64 => "event_list_float64",
            DType::EventFloat32 => "event_list_float32",
            DType::EventInt64 => "event_list_int64",
            DType::EventInt32 => "event_list_int32",
        }
    }

    pub fn from_name(name: &str) -> Option<DType> {
        DType::ALL.into_iter().find(|d| d.name() == name)
    }

    pub fn is_event(self) -> bool {
        matches!(self, DType::EventFloat64 | DType::EventFloat32 | DType::EventInt64 | DType::EventInt32)
    }

    /// Scalar element type; the list element type for event lists.
    pub fn element(self) -> DType {
        match self {
            DType::EventFloat64 => DType::Float64,
            DType::EventFloat32 => DType::Float32,
            DType::EventInt64 => DType::Int64,
            DType::EventInt32 => DType::Int32,
            d => d,
        }
    }

    pub fn event_of(self) -> Option<DType> {
        match self {
            DType::Float64 => Some(DType::EventFloat64),
            DType::Float32 => Some(DType::EventFloat32),
            DType::Int64 => Some(DType::EventInt64),
            DType::Int32 => Some(DType::EventInt32),
            _ => None,
        }
    }

    pub fn is_float(self) -> bool {
        matches!(self.element(), DType::Float64 | DType::Float32)
    }

    pub fn is_numeric(self) -> bool {
        matches!(self.element(), DType::Float64 | DType::Float32 | DType::Int64 | DType::Int32)
    }

    pub fn allows_variances(self) -> bool {
        self.is_float()
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Type-erased element buffer of a [`Variable`](crate::Variable).
#[derive(Clone, Debug)]
pub enum Values {
    Float64(Vec<f64>),
    Float32(Vec<f32>),
    Int64(Vec<i64>),
    Int32(Vec<i32>),
    Bool(Vec<bool>),
    String(Vec<String>),
    EventFloat64(EventStorage<f64>),
    EventFloat32(EventStorage<f32>),
    EventInt64(EventStorage<i64>),
    EventInt32(EventStorage<i32>),
}

/// Applies `$body` with `$v` bound to the inner buffer of every variant.
macro_rules! for_each_buffer {
    ($values:expr, $v:ident => $body:expr) => {
        match $values {
            Values::Float64($v) => $body,
            Values::Float32($v) => $body,
            Values::Int64($v) => $body,
            Values::Int32($v) => $body,
            Values::Bool($v) => $body,
            Values::String($v) => $body,
            Values::EventFloat64($v) => $body,
            Values::EventFloat32($v) => $body,
            Values::EventInt64($v) => $body,
            Values::EventInt32($v) => $body,
        }
    };
}

impl Values {
    pub fn dtype(&self) -> DType {
        match self {
            Values::Float64(_) => DType::Float64,
            Values::Float32(_) => DType::Float32,
            Values::Int64(_) => DType::Int64,
            Values::Int32(_) => DType::Int32,
            Values::Bool(_) => DType::Bool,
            Values::String(_) => DType::String,
            Values::EventFloat64(_) => DType::EventFloat64,
            Values::EventFloat32(_) => DType::EventFloat32,
            Values::EventInt64(_) => DType::EventInt64,
            Values::EventInt32(_) => DType::EventInt32,
        }
    }

    /// Number of elements; for event lists, the number of lists.
    pub fn len(&self) -> usize {
        for_each_buffer!(self, v => v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn offsets(&self) -> Option<&[usize]> {
        match self {
            Values::EventFloat64(s) => Some(s.offsets()),
            Values::EventFloat32(s) => Some(s.offsets()),
            Values::EventInt64(s) => Some(s.offsets()),
            Values::EventInt32(s) => Some(s.offsets()),
            _ => None,
        }
    }

    /// Gathers elements (or whole lists) at the given buffer positions.
    pub fn gather(&self, positions: impl Iterator<Item = usize>) -> Values {
        match self {
            Values::Float64(v) => Values::Float64(positions.map(|i| v[i]).collect()),
            Values::Float32(v) => Values::Float32(positions.map(|i| v[i]).collect()),
            Values::Int64(v) => Values::Int64(positions.map(|i| v[i]).collect()),
            Values::Int32(v) => Values::Int32(positions.map(|i| v[i]).collect()),
            Values::Bool(v) => Values::Bool(positions.map(|i| v[i]).collect()),
            Values::String(v) => Values::String(positions.map(|i| v[i].clone()).collect()),
            Values::EventFloat64(s) => Values::EventFloat64(s.gather(positions)),
            Values::EventFloat32(s) => Values::EventFloat32(s.gather(positions)),
            Values::EventInt64(s) => Values::EventInt64(s.gather(positions)),
            Values::EventInt32(s) => Values::EventInt32(s.gather(positions)),
        }
    }

    /// Buffer holding the elements of `self` followed by those of `other`.
    pub(crate) fn concat(&self, other: &Values) -> Result<Values> {
        fn ev<T: Clone>(a: &EventStorage<T>, b: &EventStorage<T>) -> EventStorage<T> {
            EventStorage::from_lists(a.lists().chain(b.lists()).map(|l| l.iter().cloned()))
        }
        fn join<T: Clone>(a: &[T], b: &[T]) -> Vec<T> {
            a.iter().chain(b).cloned().collect()
        }
        Ok(match (self, other) {
            (Values::Float64(a), Values::Float64(b)) => Values::Float64(join(a, b)),
            (Values::Float32(a), Values::Float32(b)) => Values::Float32(join(a, b)),
            (Values::Int64(a), Values::Int64(b)) => Values::Int64(join(a, b)),
            (Values::Int32(a), Values::Int32(b)) => Values::Int32(join(a, b)),
            (Values::Bool(a), Values::Bool(b)) => Values::Bool(join(a, b)),
            (Values::String(a), Values::String(b)) => Values::String(join(a, b)),
            (Values::EventFloat64(a), Values::EventFloat64(b)) => Values::EventFloat64(ev(a, b)),
            (Values::EventFloat32(a), Values::EventFloat32(b)) => Values::EventFloat32(ev(a, b)),
            (Values::EventInt64(a), Values::EventInt64(b)) => Values::EventInt64(ev(a, b)),
            (Values::EventInt32(a), Values::EventInt32(b)) => Values::EventInt32(ev(a, b)),
            (a, b) => {
                return Err(Error::Type(format!("cannot join {} and {} buffers", a.dtype(), b.dtype())))
            }
        })
    }

    /// Bitwise equality; NaN payloads compare equal to themselves.
    pub fn identical(&self, other: &Values) -> bool {
        fn bits<T: Element>(a: &[T], b: &[T]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.bits_eq(y))
        }
        fn ev<T: Element>(a: &EventStorage<T>, b: &EventStorage<T>) -> bool {
            a.offsets() == b.offsets() && bits(a.flat(), b.flat())
        }
        match (self, other) {
            (Values::Float64(a), Values::Float64(b)) => bits(a, b),
            (Values::Float32(a), Values::Float32(b)) => bits(a, b),
            (Values::Int64(a), Values::Int64(b)) => bits(a, b),
            (Values::Int32(a), Values::Int32(b)) => bits(a, b),
            (Values::Bool(a), Values::Bool(b)) => bits(a, b),
            (Values::String(a), Values::String(b)) => bits(a, b),
            (Values::EventFloat64(a), Values::EventFloat64(b)) => ev(a, b),
            (Values::EventFloat32(a), Values::EventFloat32(b)) => ev(a, b),
            (Values::EventInt64(a), Values::EventInt64(b)) => ev(a, b),
            (Values::EventInt32(a), Values::EventInt32(b)) => ev(a, b),
            _ => false,
        }
    }

    /// Converts numeric values to another numeric dtype of the same kind
    /// (dense or event list).
    pub fn cast(&self, to: DType) -> Result<Values> {
        if self.dtype() == to {
            return Ok(self.clone());
        }
        if !(self.dtype().is_numeric() && to.is_numeric() && self.dtype().is_event() == to.is_event()) {
            return Err(Error::Type(format!("cannot convert {} to {to}", self.dtype())));
        }
        fn dense<S: Numeric>(v: &[S], to: DType) -> Values {
            match to {
                DType::Float64 => Values::Float64(v.iter().map(|x| x.to_f64()).collect()),
                DType::Float32 => Values::Float32(v.iter().map(|x| x.to_f64() as f32).collect()),
                DType::Int64 => Values::Int64(v.iter().map(|x| x.to_i64()).collect()),
                DType::Int32 => Values::Int32(v.iter().map(|x| x.to_i64() as i32).collect()),
                _ => unreachable!(),
            }
        }
        fn events<S: Numeric>(s: &EventStorage<S>, to: DType) -> Values {
            match to {
                DType::EventFloat64 => Values::EventFloat64(s.map(|x| x.to_f64())),
                DType::EventFloat32 => Values::EventFloat32(s.map(|x| x.to_f64() as f32)),
                DType::EventInt64 => Values::EventInt64(s.map(|x| x.to_i64())),
                DType::EventInt32 => Values::EventInt32(s.map(|x| x.to_i64() as i32)),
                _ => unreachable!(),
            }
        }
        Ok(match self {
            Values::Float64(v) => dense(v, to),
            Values::Float32(v) => dense(v, to),
            Values::Int64(v) => dense(v, to),
            Values::Int32(v) => dense(v, to),
            Values::EventFloat64(s) => events(s, to),
            Values::EventFloat32(s) => events(s, to),
            Values::EventInt64(s) => events(s, to),
            Values::EventInt32(s) => events(s, to),
            _ => unreachable!(),
        })
    }
}

/// A scalar element type storable in a dense [`Values`] buffer.
pub trait Element: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const DTYPE: DType;
    fn dense(values: &Values) -> Option<&Vec<Self>>;
    fn dense_mut(values: &mut Values) -> Option<&mut Vec<Self>>;
    fn into_values(v: Vec<Self>) -> Values;
    /// Equality on the bit pattern for floats, `==` otherwise.
    fn bits_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// Numeric element types usable in kernels and event lists.
///
/// Integer arithmetic wraps on overflow (two's complement).
pub trait Numeric: Element + Copy + PartialOrd + Default {
    const EVENT_DTYPE: DType;
    const ZERO: Self;
    const ONE: Self;
    fn events(values: &Values) -> Option<&EventStorage<Self>>;
    fn events_mut(values: &mut Values) -> Option<&mut EventStorage<Self>>;
    fn into_event_values(s: EventStorage<Self>) -> Values;
    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn div(self, rhs: Self) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn to_f64(self) -> f64;
    fn to_i64(self) -> i64;
    fn from_f64(v: f64) -> Self;
    fn from_usize(v: usize) -> Self;
    /// NaN for floats, zero for integers.
    fn nan() -> Self;
}

macro_rules! impl_element {
    ($t:ty, $variant:ident) => {
        impl Element for $t {
            const DTYPE: DType = DType::$variant;
            fn dense(values: &Values) -> Option<&Vec<Self>> {
                match values {
                    Values::$variant(v) => Some(v),
                    _ => None,
                }
            }
            fn dense_mut(values: &mut Values) -> Option<&mut Vec<Self>> {
                match values {
                    Values::$variant(v) => Some(v),
                    _ => None,
                }
            }
            fn into_values(v: Vec<Self>) -> Values {
                Values::$variant(v)
            }
        }
    };
}

macro_rules! impl_float_element {
    ($t:ty, $variant:ident) => {
        impl Element for $t {
            const DTYPE: DType = DType::$variant;
            fn dense(values: &Values) -> Option<&Vec<Self>> {
                match values {
                    Values::$variant(v) => Some(v),
                    _ => None,
                }
            }
            fn dense_mut(values: &mut Values) -> Option<&mut Vec<Self>> {
                match values {
                    Values::$variant(v) => Some(v),
                    _ => None,
                }
            }
            fn into_values(v: Vec<Self>) -> Values {
                Values::$variant(v)
            }
            fn bits_eq(&self, other: &Self) -> bool {
                self.to_bits() == other.to_bits()
            }
        }
    };
}

impl_float_element!(f64, Float64);
impl_float_element!(f32, Float32);
impl_element!(i64, Int64);
impl_element!(i32, Int32);
impl_element!(bool, Bool);
impl_element!(String, String);

macro_rules! numeric_events {
    ($event:ident) => {
        const EVENT_DTYPE: DType = DType::$event;
        fn events(values: &Values) -> Option<&EventStorage<Self>> {
            match values {
                Values::$event(s) => Some(s),
                _ => None,
            }
        }
        fn events_mut(values: &mut Values) -> Option<&mut EventStorage<Self>> {
            match values {
                Values::$event(s) => Some(s),
                _ => None,
            }
        }
        fn into_event_values(s: EventStorage<Self>) -> Values {
            Values::$event(s)
        }
    };
}

macro_rules! impl_float {
    ($t:ty, $event:ident) => {
        impl Numeric for $t {
            numeric_events!($event);
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            #[inline(always)]
            fn add(self, rhs: Self) -> Self {
                self + rhs
            }
            #[inline(always)]
            fn sub(self, rhs: Self) -> Self {
                self - rhs
            }
            #[inline(always)]
            fn mul(self, rhs: Self) -> Self {
                self * rhs
            }
            #[inline(always)]
            fn div(self, rhs: Self) -> Self {
                self / rhs
            }
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn to_i64(self) -> i64 {
                self as i64
            }
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            fn from_usize(v: usize) -> Self {
                v as $t
            }
            fn nan() -> Self {
                <$t>::NAN
            }
        }
    };
}

macro_rules! impl_int {
    ($t:ty, $event:ident) => {
        impl Numeric for $t {
            numeric_events!($event);
            const ZERO: Self = 0;
            const ONE: Self = 1;
            #[inline(always)]
            fn add(self, rhs: Self) -> Self {
                self.wrapping_add(rhs)
            }
            #[inline(always)]
            fn sub(self, rhs: Self) -> Self {
                self.wrapping_sub(rhs)
            }
            #[inline(always)]
            fn mul(self, rhs: Self) -> Self {
                self.wrapping_mul(rhs)
            }
            /// Callers reject zero divisors before evaluating.
            #[inline(always)]
            fn div(self, rhs: Self) -> Self {
                self.wrapping_div(rhs)
            }
            fn abs(self) -> Self {
                self.wrapping_abs()
            }
            fn sqrt(self) -> Self {
                (self as f64).sqrt() as $t
            }
            fn sin(self) -> Self {
                (self as f64).sin() as $t
            }
            fn cos(self) -> Self {
                (self as f64).cos() as $t
            }
            fn to_f64(self) -> f64 {
                self as f64
            }
            fn to_i64(self) -> i64 {
                self as i64
            }
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            fn from_usize(v: usize) -> Self {
                v as $t
            }
            fn nan() -> Self {
                0
            }
        }
    };
}

impl_float!(f64, EventFloat64);
impl_float!(f32, EventFloat32);
impl_int!(i64, EventInt64);
impl_int!(i32, EventInt32);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dtype_names_round_trip() {
        for d in DType::ALL {
            assert_eq!(DType::from_name(d.name()), Some(d));
        }
        assert!(DType::EventFloat32.allows_variances());
        assert!(!DType::EventInt64.allows_variances());
        assert!(!DType::Bool.allows_variances());
    }

    #[test]
    fn nan_is_identical_to_itself() {
        let a = Values::Float64(vec![f64::NAN, 1.0]);
        assert!(a.identical(&a.clone()));
        assert!(!Values::Float64(vec![0.0]).identical(&Values::Float64(vec![-0.0])));
    }

    #[test]
    fn integer_arithmetic_wraps() {
        assert_eq!(Numeric::add(i32::MAX, 1), i32::MIN);
        assert_eq!(Numeric::div(i64::MIN, -1), i64::MIN);
    }

    #[test]
    fn promotion_cast() {
        let v = Values::Int32(vec![1, -2]).cast(DType::Int64).unwrap();
        assert!(v.identical(&Values::Int64(vec![1, -2])));
        assert!(Values::Bool(vec![true]).cast(DType::Int64).is_err());
    }
}
