//! JSON file format for data arrays and datasets.
//!
//! A document is an object `{"version": 1, "type": ..., ...}`. Variables
//! are stored as
//!
//! ```json
//! {"dims": [["x", 3]], "unit": "m", "dtype": "float64",
//!  "values": [1.0, 2.0, 3.0], "variances": [0.1, 0.1, 0.1]}
//! ```
//!
//! with values flattened in row-major order. Event lists are stored as
//! `{"offsets": [...], "flat": [...]}`. Non-finite floats are written as
//! the strings `"nan"`, `"inf"` and `"-inf"`; a NaN with the sign bit set
//! is `"-nan"` and any other NaN is `"nan:0x<hex bits>"`, so payloads
//! survive a round trip. Finite floats use the shortest decimal that
//! parses back to the same bits.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::dataset::{DataArray, Dataset, VariableMap};
use crate::error::{Error, Result};
use crate::events::EventStorage;
use crate::units::Unit;
use crate::variable::{DType, Dims, Values, Variable};

pub const FORMAT_VERSION: u64 = 1;

/// Contents of a document.
#[derive(Clone, Debug)]
pub enum Container {
    DataArray(DataArray),
    Dataset(Dataset),
}

impl Container {
    pub fn identical(&self, other: &Container) -> bool {
        match (self, other) {
            (Container::DataArray(a), Container::DataArray(b)) => a.identical(b),
            (Container::Dataset(a), Container::Dataset(b)) => a.identical(b),
            _ => false,
        }
    }

    /// Re-checks every container invariant.
    pub fn validate(&self) -> Result<()> {
        match self {
            Container::DataArray(a) => a.validate(),
            Container::Dataset(d) => d.validate(),
        }
    }
}

impl From<DataArray> for Container {
    fn from(da: DataArray) -> Self {
        Container::DataArray(da)
    }
}

impl From<Dataset> for Container {
    fn from(ds: Dataset) -> Self {
        Container::Dataset(ds)
    }
}

fn nan_value(bits: u64, canonical: u64, sign: u64, width: usize) -> Value {
    if bits == canonical {
        Value::from("nan")
    } else if bits == canonical | sign {
        Value::from("-nan")
    } else {
        Value::from(format!("nan:0x{bits:0width$x}"))
    }
}

fn float_value(x: f64) -> Value {
    if x.is_nan() {
        nan_value(x.to_bits(), f64::NAN.to_bits(), 1 << 63, 16)
    } else if x.is_infinite() {
        Value::from(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        Value::from(x)
    }
}

fn float32_value(x: f32) -> Value {
    if x.is_nan() {
        nan_value(x.to_bits().into(), f32::NAN.to_bits().into(), 1 << 31, 8)
    } else {
        // f32 -> f64 is exact, so the f64 rendering parses back to the same f32.
        float_value(f64::from(x))
    }
}

fn encode_values(values: &Values) -> Value {
    fn events<T>(s: &EventStorage<T>, f: impl Fn(&T) -> Value) -> Value {
        json!({"offsets": s.offsets(), "flat": s.flat().iter().map(f).collect::<Vec<_>>()})
    }
    match values {
        Values::Float64(v) => v.iter().map(|&x| float_value(x)).collect(),
        Values::Float32(v) => v.iter().map(|&x| float32_value(x)).collect(),
        Values::Int64(v) => v.iter().map(|&x| Value::from(x)).collect(),
        Values::Int32(v) => v.iter().map(|&x| Value::from(x)).collect(),
        Values::Bool(v) => v.iter().map(|&x| Value::from(x)).collect(),
        Values::String(v) => v.iter().map(|x| Value::from(x.as_str())).collect(),
        Values::EventFloat64(s) => events(s, |&x| float_value(x)),
        Values::EventFloat32(s) => events(s, |&x| float32_value(x)),
        Values::EventInt64(s) => events(s, |&x| Value::from(x)),
        Values::EventInt32(s) => events(s, |&x| Value::from(x)),
    }
}

pub fn encode_variable(v: &Variable) -> Value {
    let mut obj = Map::new();
    obj.insert("dims".into(), v.dims().iter().map(|(l, e)| json!([l, e])).collect());
    obj.insert("unit".into(), Value::from(v.unit().to_string()));
    obj.insert("dtype".into(), Value::from(v.dtype().name()));
    obj.insert("values".into(), encode_values(v.values()));
    if let Some(var) = v.variances() {
        obj.insert("variances".into(), encode_values(var));
    }
    Value::Object(obj)
}

fn encode_map(map: &VariableMap) -> Value {
    Value::Object(map.iter().map(|(k, v)| (k.clone(), encode_variable(v))).collect())
}

pub fn encode_data_array(da: &DataArray) -> Value {
    json!({
        "version": FORMAT_VERSION,
        "type": "data_array",
        "data": encode_variable(da.data()),
        "coords": encode_map(da.coords()),
        "attrs": encode_map(da.attrs()),
    })
}

pub fn encode_dataset(ds: &Dataset) -> Value {
    let items: Map<String, Value> = ds
        .names()
        .map(|name| {
            let (data, attrs) = ds.item_parts(name).expect("listed item exists");
            (name.to_string(), json!({"data": encode_variable(data), "attrs": encode_map(attrs)}))
        })
        .collect();
    json!({
        "version": FORMAT_VERSION,
        "type": "dataset",
        "coords": encode_map(ds.coords()),
        "items": items,
    })
}

pub fn encode(x: &Container) -> Value {
    match x {
        Container::DataArray(da) => encode_data_array(da),
        Container::Dataset(ds) => encode_dataset(ds),
    }
}

fn write_value(value: &Value, path: &Path) -> Result<()> {
    let file =
        fs::File::create(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn save_data_array(da: &DataArray, path: impl AsRef<Path>) -> Result<()> {
    write_value(&encode_data_array(da), path.as_ref())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_value(&encode_dataset(ds), path.as_ref())
}

pub fn save(x: &Container, path: impl AsRef<Path>) -> Result<()> {
    write_value(&encode(x), path.as_ref())
}

pub fn to_string(x: &Container) -> String {
    encode(x).to_string()
}

// Decoding. `at` is a JSON-pointer-like location used in diagnostics.

fn parse_err(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("at {}: {msg}", if at.is_empty() { "/" } else { at }))
}

fn invalid(at: &str, e: Error) -> Error {
    Error::Validation(format!("at {}: {e}", if at.is_empty() { "/" } else { at }))
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, at: &str) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| parse_err(at, format!("missing field '{key}'")))
}

fn object<'v>(v: &'v Value, at: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(at, "expected an object"))
}

fn array<'v>(v: &'v Value, at: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(at, "expected an array"))
}

/// Bits of a non-finite float string, `None` if it is a plain number.
fn special(v: &Value, at: &str) -> Result<Option<Special>> {
    let Value::String(s) = v else {
        return Ok(None);
    };
    let bad = || parse_err(at, format!("expected a number, got \"{s}\""));
    Ok(Some(match s.as_str() {
        "nan" => Special::Nan(false),
        "-nan" => Special::Nan(true),
        "inf" => Special::Inf(false),
        "-inf" => Special::Inf(true),
        other => {
            let hex = other.strip_prefix("nan:0x").ok_or_else(bad)?;
            Special::Bits(u64::from_str_radix(hex, 16).map_err(|_| bad())?)
        }
    }))
}

enum Special {
    Nan(bool),
    Inf(bool),
    Bits(u64),
}

fn number(v: &Value, at: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(at, "expected a number"))
}

fn decode_f64(v: &Value, at: &str) -> Result<f64> {
    Ok(match special(v, at)? {
        None => number(v, at)?,
        Some(Special::Nan(neg)) => {
            if neg {
                -f64::NAN
            } else {
                f64::NAN
            }
        }
        Some(Special::Inf(neg)) => {
            if neg {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
        Some(Special::Bits(b)) => f64::from_bits(b),
    })
}

fn decode_f32(v: &Value, at: &str) -> Result<f32> {
    Ok(match special(v, at)? {
        None => number(v, at)? as f32,
        Some(Special::Nan(neg)) => {
            if neg {
                -f32::NAN
            } else {
                f32::NAN
            }
        }
        Some(Special::Inf(neg)) => {
            if neg {
                f32::NEG_INFINITY
            } else {
                f32::INFINITY
            }
        }
        Some(Special::Bits(b)) => {
            f32::from_bits(u32::try_from(b).map_err(|_| parse_err(at, "float32 bits out of range"))?)
        }
    })
}

fn decode_i64(v: &Value, at: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| parse_err(at, "expected an integer"))
}

fn decode_list<T>(v: &Value, at: &str, f: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    array(v, at)?.iter().enumerate().map(|(i, x)| f(x, &format!("{at}/{i}"))).collect()
}

fn decode_events<T>(v: &Value, at: &str, f: impl Fn(&Value, &str) -> Result<T>) -> Result<EventStorage<T>> {
    let obj = object(v, at)?;
    let offsets = decode_list(field(obj, "offsets", at)?, &format!("{at}/offsets"), |x, at| {
        x.as_u64().map(|o| o as usize).ok_or_else(|| parse_err(at, "expected a non-negative integer"))
    })?;
    let flat = decode_list(field(obj, "flat", at)?, &format!("{at}/flat"), f)?;
    EventStorage::from_parts(offsets, flat).map_err(|e| invalid(at, e))
}

fn decode_values(v: &Value, dtype: DType, at: &str) -> Result<Values> {
    let i32_of = |x: &Value, at: &str| -> Result<i32> {
        i32::try_from(decode_i64(x, at)?).map_err(|_| parse_err(at, "integer exceeds int32"))
    };
    Ok(match dtype {
        DType::Float64 => Values::Float64(decode_list(v, at, decode_f64)?),
        DType::Float32 => Values::Float32(decode_list(v, at, decode_f32)?),
        DType::Int64 => Values::Int64(decode_list(v, at, decode_i64)?),
        DType::Int32 => Values::Int32(decode_list(v, at, i32_of)?),
        DType::Bool => Values::Bool(decode_list(v, at, |x, at| {
            x.as_bool().ok_or_else(|| parse_err(at, "expected a boolean"))
        })?),
        DType::String => Values::String(decode_list(v, at, |x, at| {
            x.as_str().map(str::to_string).ok_or_else(|| parse_err(at, "expected a string"))
        })?),
        DType::EventFloat64 => Values::EventFloat64(decode_events(v, at, decode_f64)?),
        DType::EventFloat32 => Values::EventFloat32(decode_events(v, at, decode_f32)?),
        DType::EventInt64 => Values::EventInt64(decode_events(v, at, decode_i64)?),
        DType::EventInt32 => Values::EventInt32(decode_events(v, at, i32_of)?),
    })
}

pub fn decode_variable(v: &Value, at: &str) -> Result<Variable> {
    let obj = object(v, at)?;
    let dims_at = format!("{at}/dims");
    let pairs = decode_list(field(obj, "dims", at)?, &dims_at, |d, at| {
        let pair = array(d, at)?;
        match pair.as_slice() {
            [Value::String(l), e] => {
                let e = e.as_u64().ok_or_else(|| parse_err(at, "extent must be a non-negative integer"))?;
                Ok((l.clone(), e as usize))
            }
            _ => Err(parse_err(at, "expected [label, extent]")),
        }
    })?;
    let dims = Dims::new(pairs).map_err(|e| invalid(&dims_at, e))?;
    let unit_at = format!("{at}/unit");
    let unit: Unit = field(obj, "unit", at)?
        .as_str()
        .ok_or_else(|| parse_err(&unit_at, "expected a string"))?
        .parse()
        .map_err(|e| parse_err(&unit_at, e))?;
    let dtype_at = format!("{at}/dtype");
    let name = field(obj, "dtype", at)?.as_str().ok_or_else(|| parse_err(&dtype_at, "expected a string"))?;
    let dtype =
        DType::from_name(name).ok_or_else(|| parse_err(&dtype_at, format!("unknown dtype '{name}'")))?;
    let values = decode_values(field(obj, "values", at)?, dtype, &format!("{at}/values"))?;
    let variances =
        obj.get("variances").map(|v| decode_values(v, dtype, &format!("{at}/variances"))).transpose()?;
    Variable::new(dims, unit, values, variances).map_err(|e| invalid(at, e))
}

fn decode_map(v: Option<&Value>, at: &str) -> Result<VariableMap> {
    let Some(v) = v else {
        return Ok(VariableMap::new());
    };
    object(v, at)?.iter().map(|(k, x)| Ok((k.clone(), decode_variable(x, &format!("{at}/{k}"))?))).collect()
}

pub fn decode(doc: &Value) -> Result<Container> {
    let obj = object(doc, "")?;
    let version = field(obj, "version", "")?;
    if version.as_u64() != Some(FORMAT_VERSION) {
        return Err(parse_err("/version", format!("unsupported version {version}")));
    }
    let kind = field(obj, "type", "")?.as_str().ok_or_else(|| parse_err("/type", "expected a string"))?;
    match kind {
        "data_array" => {
            let data = decode_variable(field(obj, "data", "")?, "/data")?;
            let coords = decode_map(obj.get("coords"), "/coords")?;
            let attrs = decode_map(obj.get("attrs"), "/attrs")?;
            DataArray::new(data, coords, attrs).map(Container::DataArray).map_err(|e| invalid("", e))
        }
        "dataset" => {
            let coords = decode_map(obj.get("coords"), "/coords")?;
            let items = match obj.get("items") {
                Some(v) => object(v, "/items")?
                    .iter()
                    .map(|(name, item)| {
                        let at = format!("/items/{name}");
                        let item_obj = object(item, &at)?;
                        let data = decode_variable(field(item_obj, "data", &at)?, &format!("{at}/data"))?;
                        let attrs = decode_map(item_obj.get("attrs"), &format!("{at}/attrs"))?;
                        Ok((name.clone(), data, attrs))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            Dataset::from_parts(coords, items).map(Container::Dataset).map_err(|e| invalid("", e))
        }
        other => Err(parse_err("/type", format!("unknown container type '{other}'"))),
    }
}

pub fn from_str(text: &str) -> Result<Container> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    decode(&doc)
}

pub fn load(path: impl AsRef<Path>) -> Result<Container> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    from_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}
