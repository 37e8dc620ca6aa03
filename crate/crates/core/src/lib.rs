//! Labeled multi-dimensional arrays with physical units, variances,
//! bin edges and event data.

mod alloc;
pub mod dataset;
pub mod demo;
pub mod error;
pub mod events;
pub mod groupby;
pub mod io;
pub mod ops;
pub mod plot;
pub mod render;
pub mod transform;
pub mod units;
pub mod variable;

pub use dataset::{DataArray, DataArrayView, DataArrayViewMut, Dataset, VariableMap};
pub use error::{Error, Result};
pub use events::{EventBuilder, EventStorage};
pub use groupby::{groupby, GroupBy};
pub use io::Container;
pub use ops::BinaryOp;
pub use units::{NamedUnitTable, Unit};
pub use variable::{DType, Dims, Element, Layout, Numeric, Values, Variable, VariableView, VariableViewMut};
