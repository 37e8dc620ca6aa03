//! Text renderings of containers: a structure tree and a table for 1-D data.
//!
//! The structure tree depends only on names, dims, dtypes, units and the
//! presence of variances, never on values.

use std::fmt::Write;

use crate::dataset::{edges_along, DataArray, DataArrayView, Dataset, VariableMap};
use crate::error::{Error, Result};
use crate::io::Container;
use crate::variable::{DType, Dims, Variable, VariableView};

/// Set this variable (to any value) to disable ANSI styling.
pub const NO_COLOR_ENV: &str = "LARR_NO_COLOR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RenderOptions {
    pub color: bool,
}

impl RenderOptions {
    pub fn plain() -> Self {
        RenderOptions { color: false }
    }

    /// Color unless the opt-out variable is set.
    pub fn from_env() -> Self {
        RenderOptions { color: std::env::var_os(NO_COLOR_ENV).is_none() }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

/// Tree lines collected first so that columns align across the whole tree.
#[derive(Default)]
struct Tree {
    lines: Vec<Line>,
}

enum Line {
    Heading(String),
    Entry { lead: String, name: String, role: &'static str, cols: [String; 3], variances: bool },
}

fn role_of(c: &Variable, data: &Dims, base: &'static str) -> &'static str {
    match c.dims().labels().last() {
        Some(d) if base == "coord" && edges_along(&c.view(), data, d) => "edge-coord",
        _ => base,
    }
}

fn branch(last: bool) -> &'static str {
    if last {
        "└─ "
    } else {
        "├─ "
    }
}

fn indent(prefix: &str, last: bool) -> String {
    format!("{prefix}{}", if last { "   " } else { "│  " })
}

impl Tree {
    fn heading(&mut self, text: String) {
        self.lines.push(Line::Heading(text));
    }

    /// Adds a section title and returns the prefix for its children.
    fn section(&mut self, prefix: &str, title: &str, last: bool, opts: RenderOptions) -> String {
        self.heading(format!("{prefix}{}{}", branch(last), opts.paint("4", title)));
        indent(prefix, last)
    }

    fn entry(&mut self, prefix: &str, last: bool, name: &str, role: &'static str, var: &Variable) {
        self.lines.push(Line::Entry {
            lead: format!("{prefix}{}", branch(last)),
            name: name.to_string(),
            role,
            cols: [var.dims().to_string(), var.dtype().name().to_string(), format!("[{}]", var.unit())],
            variances: var.has_variances(),
        });
    }

    /// `close` marks the final entry as the last child of its parent.
    fn entries(&mut self, prefix: &str, map: &VariableMap, data: &Dims, base: &'static str, close: bool) {
        for (i, (name, var)) in map.iter().enumerate() {
            let last = close && i + 1 == map.len();
            self.entry(prefix, last, name, role_of(var, data, base), var);
        }
    }

    fn finish(self, opts: RenderOptions) -> String {
        let width = |f: &dyn Fn(&Line) -> usize| self.lines.iter().map(f).max().unwrap_or(0);
        let len = |s: &str| s.chars().count();
        let head_w = width(&|l| match l {
            Line::Entry { lead, name, .. } => len(lead) + len(name),
            _ => 0,
        });
        let role_w = width(&|l| match l {
            Line::Entry { role, .. } => len(role),
            _ => 0,
        });
        let col_w: Vec<usize> = (0..3)
            .map(|k| {
                width(&|l| match l {
                    Line::Entry { cols, .. } => len(&cols[k]),
                    _ => 0,
                })
            })
            .collect();
        let mut out = String::new();
        for line in &self.lines {
            match line {
                Line::Heading(text) => out += text,
                Line::Entry { lead, name, role, cols, variances } => {
                    let pad = " ".repeat(head_w - len(lead) - len(name));
                    let mut s = format!("{lead}{}{pad}  {role:<role_w$}", opts.paint("1", name));
                    for (c, w) in cols.iter().zip(&col_w) {
                        let _ = write!(s, "  {c:<w$}");
                    }
                    if *variances {
                        s += "  ±variances";
                    }
                    out += s.trim_end();
                }
            }
            out.push('\n');
        }
        out
    }
}

fn render_data_array(da: &DataArray, opts: RenderOptions) -> Tree {
    let mut t = Tree::default();
    t.heading(format!("{} {}", opts.paint("1", "DataArray"), da.dims()));
    let (coords, attrs) = (da.coords(), da.attrs());
    let inner = t.section("", "data", coords.is_empty() && attrs.is_empty(), opts);
    t.entry(&inner, true, "data", "data", da.data());
    if !coords.is_empty() {
        let inner = t.section("", "coords", attrs.is_empty(), opts);
        t.entries(&inner, coords, da.dims(), "coord", true);
    }
    if !attrs.is_empty() {
        let inner = t.section("", "attrs", true, opts);
        t.entries(&inner, attrs, da.dims(), "attr", true);
    }
    t
}

fn render_dataset(ds: &Dataset, opts: RenderOptions) -> Tree {
    let mut t = Tree::default();
    let dims = ds.dims();
    t.heading(format!("{} {}", opts.paint("1", "Dataset"), dims));
    let names: Vec<&str> = ds.names().collect();
    if !ds.coords().is_empty() {
        let inner = t.section("", "coords", names.is_empty(), opts);
        t.entries(&inner, ds.coords(), &dims, "coord", true);
    }
    if names.is_empty() {
        return t;
    }
    let prefix = t.section("", "data", true, opts);
    for (i, name) in names.iter().enumerate() {
        let (data, attrs) = ds.item_parts(name).expect("listed item exists");
        let last = i + 1 == names.len();
        t.entry(&prefix, last, name, "data", data);
        if !attrs.is_empty() {
            let inner = t.section(&indent(&prefix, last), "attrs", true, opts);
            t.entries(&inner, attrs, data.dims(), "attr", true);
        }
    }
    t
}

/// Structure tree of a data array or dataset.
pub fn render_structure(x: &Container, opts: RenderOptions) -> String {
    match x {
        Container::DataArray(da) => render_data_array(da, opts),
        Container::Dataset(ds) => render_dataset(ds, opts),
    }
    .finish(opts)
}

fn cell(v: &VariableView<'_>, i: &[usize], variance: bool) -> Result<String> {
    macro_rules! get {
        ($t:ty) => {
            if variance {
                v.variance_at::<$t>(i)?.to_string()
            } else {
                v.value_at::<$t>(i)?.to_string()
            }
        };
    }
    Ok(match v.dtype() {
        DType::Float64 => get!(f64),
        DType::Float32 => get!(f32),
        DType::Int64 => get!(i64),
        DType::Int32 => get!(i32),
        DType::Bool => v.value_at::<bool>(i)?.to_string(),
        DType::String => v.value_at::<String>(i)?,
        other => return Err(Error::Unsupported(format!("cannot tabulate {other} values"))),
    })
}

fn header(name: &str, unit: crate::Unit) -> String {
    format!("{name} [{unit}]")
}

/// Table of a data array with at most one dim: one column per coordinate
/// on that dim (edges as `[lo, hi)` intervals), then values and variances.
pub fn render_table<'a>(da: impl Into<DataArrayView<'a>>) -> Result<String> {
    let da = da.into();
    let data = da.data();
    if data.dims().rank() > 1 {
        return Err(Error::Unsupported(format!("tables need data of rank <= 1, got {}", data.dims())));
    }
    if data.dtype().is_event() {
        return Err(Error::Unsupported("tables need dense data; histogram event data first".into()));
    }
    let rows = data.dims().volume();
    let dim = data.dims().labels().first().cloned();
    let mut columns: Vec<(String, Vec<String>)> = Vec::new();
    for (name, c) in da.coords() {
        if c.dims().rank() > 1 || c.dtype().is_event() {
            continue;
        }
        let on_dim = match (&dim, c.dims().labels().first()) {
            (Some(d), Some(cd)) => d == cd,
            (None, None) => true,
            _ => false,
        };
        if !on_dim {
            continue;
        }
        let edges = dim.as_deref().is_some_and(|d| edges_along(c, data.dims(), d));
        let mut col = Vec::with_capacity(rows);
        for r in 0..rows {
            let idx: Vec<usize> = dim.iter().map(|_| r).collect();
            if edges {
                let lo = cell(c, &idx, false)?;
                let hi = cell(c, &[r + 1], false)?;
                col.push(format!("[{lo}, {hi})"));
            } else {
                col.push(cell(c, &idx, false)?);
            }
        }
        columns.push((header(name, c.unit()), col));
    }
    let index = |r: usize| -> Vec<usize> { dim.iter().map(|_| r).collect() };
    let values = (0..rows).map(|r| cell(data, &index(r), false)).collect::<Result<_>>()?;
    columns.push((header("value", data.unit()), values));
    if data.has_variances() {
        let var_unit = data.unit().pow(2)?;
        let variances = (0..rows).map(|r| cell(data, &index(r), true)).collect::<Result<_>>()?;
        columns.push((header("variance", var_unit), variances));
    }
    let widths: Vec<usize> = columns
        .iter()
        .map(|(h, c)| c.iter().chain([h]).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>| -> String {
        let mut s = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
        s.truncate(s.trim_end().len());
        s + "\n"
    };
    out += &line(columns.iter().map(|(h, _)| h.as_str()).collect());
    out +=
        &line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in 0..rows {
        out += &line(columns.iter().map(|(_, c)| c[r].as_str()).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{dims, Unit};

    fn histogram() -> DataArray {
        DataArray::from_data(
            Variable::with_variances(dims!["tof" => 2], Unit::COUNTS, vec![3.0, 1.0], vec![3.0, 1.0])
                .unwrap(),
        )
        .unwrap()
        .with_coord("tof", Variable::from_vec(dims!["tof" => 3], Unit::US, vec![0.0, 10.0, 20.0]).unwrap())
        .unwrap()
    }

    #[test]
    fn table_with_edges() {
        let t = render_table(&histogram()).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("tof [us]") && lines[0].contains("value [counts]"));
        assert!(lines[2].contains("[0, 10)"));
        assert!(lines[3].contains("[10, 20)"));
    }

    #[test]
    fn scalar_table_has_one_row() {
        let da = DataArray::from_data(Variable::scalar(2.5, Unit::M).unwrap()).unwrap();
        assert_eq!(render_table(&da).unwrap().lines().count(), 3);
        let flat =
            DataArray::from_data(Variable::from_vec(dims!["x" => 1, "y" => 1], Unit::M, vec![1.0]).unwrap())
                .unwrap();
        assert!(matches!(render_table(&flat), Err(Error::Unsupported(_))));
    }

    #[test]
    fn structure_is_value_independent() {
        let a = Container::from(histogram());
        let mut other = histogram();
        other.data_mut().set_value(&[0], 99.0).unwrap();
        let b = Container::from(other);
        let text = render_structure(&a, RenderOptions::plain());
        assert_eq!(text, render_structure(&b, RenderOptions::plain()));
        assert!(text.contains("edge-coord"));
        assert!(text.contains("±variances"));
        assert!(!text.contains('\x1b'));
        assert!(render_structure(&a, RenderOptions { color: true }).contains('\x1b'));
    }
}
