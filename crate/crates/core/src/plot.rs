//! Plot data emission: a CSV of the plotted numbers and a static SVG.
//!
//! 1-D data is drawn as a step line over bin-edge coordinates, otherwise
//! as point markers; standard deviations from variances become error bars.
//! 2-D data is drawn as a heatmap.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::{edges_along, DataArrayView};
use crate::error::{Error, Result};
use crate::units::Unit;
use crate::variable::{DType, VariableView};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

/// Files written by [`emit_plot`].
#[derive(Clone, Debug)]
pub struct PlotFiles {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

fn numbers(v: &VariableView<'_>, variances: bool) -> Result<Vec<f64>> {
    macro_rules! get {
        ($t:ty) => {
            if variances {
                v.variances_vec::<$t>()?
            } else {
                v.values_vec::<$t>()?
            }
        };
    }
    Ok(match v.dtype() {
        DType::Float64 => get!(f64),
        DType::Float32 => get!(f32).into_iter().map(f64::from).collect(),
        DType::Int64 => get!(i64).into_iter().map(|x| x as f64).collect(),
        DType::Int32 => get!(i32).into_iter().map(f64::from).collect(),
        other => return Err(Error::Unsupported(format!("cannot plot {other} values"))),
    })
}

/// Positions along one dim of the plotted data.
struct Axis {
    label: String,
    values: Vec<f64>,
    edges: bool,
}

impl Axis {
    fn new(da: &DataArrayView<'_>, dim: &str) -> Result<Axis> {
        let n = da.dims().extent(dim).expect("dim of data");
        if let Some(c) = da.coords().get(dim) {
            if c.dims().rank() == 1 && c.dtype().is_numeric() && !c.dtype().is_event() {
                return Ok(Axis {
                    label: axis_label(dim, c.unit()),
                    values: numbers(c, false)?,
                    edges: edges_along(c, da.dims(), dim),
                });
            }
        }
        Ok(Axis { label: format!("{dim} (index)"), values: (0..n).map(|i| i as f64).collect(), edges: false })
    }

    fn count(&self) -> usize {
        self.values.len() - usize::from(self.edges)
    }

    /// Cell boundaries: the edges themselves, or midpoints between points.
    fn bounds(&self) -> Vec<f64> {
        if self.edges {
            return self.values.clone();
        }
        let v = &self.values;
        match v.len() {
            0 => vec![],
            1 => vec![v[0] - 0.5, v[0] + 0.5],
            n => {
                let mut b = Vec::with_capacity(n + 1);
                b.push(v[0] - (v[1] - v[0]) / 2.0);
                b.extend(v.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                b.push(v[n - 1] + (v[n - 1] - v[n - 2]) / 2.0);
                b
            }
        }
    }

    fn csv_header(&self) -> Vec<String> {
        if self.edges {
            vec![format!("{} low", self.label), format!("{} high", self.label)]
        } else {
            vec![self.label.clone()]
        }
    }

    fn csv_cells(&self, i: usize) -> Vec<String> {
        if self.edges {
            vec![self.values[i].to_string(), self.values[i + 1].to_string()]
        } else {
            vec![self.values[i].to_string()]
        }
    }
}

fn axis_label(name: &str, unit: Unit) -> String {
    format!("{name} [{unit}]")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n"
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if lo > hi {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Linear map from a data range onto a pixel range.
#[derive(Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn map(&self, x: f64) -> f64 {
        self.from + (x - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn pt(x: f64) -> String {
    format!("{x:.2}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn svg_frame(svg: &mut String, xs: Scale, ys: Scale, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        pt(x0),
        pt(y1),
        pt(x1 - x0),
        pt(y0 - y1)
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = xs.lo + f * (xs.hi - xs.lo);
        let px = xs.map(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle">{4}</text>"#,
            pt(px),
            pt(y0),
            pt(y0 + 5.0),
            pt(y0 + 18.0),
            fmt_num(xv)
        );
        let yv = ys.lo + f * (ys.hi - ys.lo);
        let py = ys.map(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" text-anchor="end">{5}</text>"#,
            pt(x0 - 5.0),
            pt(py),
            pt(x0),
            pt(x0 - 8.0),
            pt(py + 4.0),
            fmt_num(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        pt((x0 + x1) / 2.0),
        pt(HEIGHT - 15.0),
        xml_escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{0}" text-anchor="middle" transform="rotate(-90 15 {0})">{1}</text>"#,
        pt((y0 + y1) / 2.0),
        xml_escape(ylabel)
    );
}

fn plot_1d(da: &DataArrayView<'_>) -> Result<(String, String)> {
    let data = da.data();
    let dim = &data.dims().labels()[0];
    let axis = Axis::new(da, dim)?;
    let values = numbers(data, false)?;
    let stddev = if data.has_variances() {
        Some(numbers(data, true)?.into_iter().map(f64::sqrt).collect::<Vec<_>>())
    } else {
        None
    };
    let ylabel = format!("[{}]", data.unit());

    let mut header = axis.csv_header();
    header.push(format!("value {ylabel}"));
    if stddev.is_some() {
        header.push(format!("stddev {ylabel}"));
    }
    let mut csv = csv_line(&header);
    for i in 0..values.len() {
        let mut row = axis.csv_cells(i);
        row.push(values[i].to_string());
        if let Some(s) = &stddev {
            row.push(s[i].to_string());
        }
        csv += &csv_line(&row);
    }

    let bounds = axis.bounds();
    let (xlo, xhi) = finite_range(bounds.iter().copied());
    let err = |i: usize| stddev.as_ref().map_or(0.0, |s| s[i]);
    let (ylo, yhi) = finite_range(
        (0..values.len())
            .flat_map(|i| [values[i] - err(i), values[i] + err(i)])
            .chain(axis.edges.then_some(0.0)),
    );
    let pad = (yhi - ylo) * 0.05;
    let xs = Scale { lo: xlo, hi: xhi, from: LEFT, to: WIDTH - RIGHT };
    let ys = Scale { lo: ylo - pad, hi: yhi + pad, from: HEIGHT - BOTTOM, to: TOP };
    let mut svg = String::new();
    svg_frame(&mut svg, xs, ys, &axis.label, &ylabel);
    if axis.edges {
        let mut path = String::new();
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && bounds[i].is_finite() && bounds[i + 1].is_finite()) {
                continue;
            }
            let cmd = if path.is_empty() || !values[i - 1].is_finite() { 'M' } else { 'L' };
            let _ = write!(
                path,
                "{cmd}{},{} L{},{} ",
                pt(xs.map(bounds[i])),
                pt(ys.map(v)),
                pt(xs.map(bounds[i + 1])),
                pt(ys.map(v))
            );
        }
        let _ = writeln!(
            svg,
            r##"<path d="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            path.trim_end()
        );
    }
    for (i, &v) in values.iter().enumerate() {
        let x = if axis.edges { (bounds[i] + bounds[i + 1]) / 2.0 } else { axis.values[i] };
        if !(v.is_finite() && x.is_finite()) {
            continue;
        }
        let (px, py) = (xs.map(x), ys.map(v));
        if let Some(s) = &stddev {
            if s[i].is_finite() && s[i] > 0.0 {
                let _ = writeln!(
                    svg,
                    r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333333"/>"##,
                    pt(px),
                    pt(ys.map(v - s[i])),
                    pt(ys.map(v + s[i]))
                );
            }
        }
        if !axis.edges {
            let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="3" fill="#1f77b4"/>"##, pt(px), pt(py));
        }
    }
    svg += "</svg>\n";
    Ok((csv, svg))
}

/// Perceptually ordered blue-to-yellow ramp.
fn color(f: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let f = f.clamp(0.0, 1.0) * 4.0;
    let k = (f.floor() as usize).min(3);
    let t = f - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |x: f64, y: f64| (x + t * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn plot_2d(da: &DataArrayView<'_>) -> Result<(String, String)> {
    let data = da.data();
    let (ydim, xdim) = (&data.dims().labels()[0], &data.dims().labels()[1]);
    let (yaxis, xaxis) = (Axis::new(da, ydim)?, Axis::new(da, xdim)?);
    let values = numbers(data, false)?;
    let stddev = if data.has_variances() {
        Some(numbers(data, true)?.into_iter().map(f64::sqrt).collect::<Vec<_>>())
    } else {
        None
    };
    let vlabel = format!("[{}]", data.unit());
    let mut header = yaxis.csv_header();
    header.extend(xaxis.csv_header());
    header.push(format!("value {vlabel}"));
    if stddev.is_some() {
        header.push(format!("stddev {vlabel}"));
    }
    let mut csv = csv_line(&header);
    let nx = xaxis.count();
    for (k, &v) in values.iter().enumerate() {
        let (i, j) = (k / nx, k % nx);
        let mut row = yaxis.csv_cells(i);
        row.extend(xaxis.csv_cells(j));
        row.push(v.to_string());
        if let Some(s) = &stddev {
            row.push(s[k].to_string());
        }
        csv += &csv_line(&row);
    }

    let (xb, yb) = (xaxis.bounds(), yaxis.bounds());
    let (xlo, xhi) = finite_range(xb.iter().copied());
    let (ylo, yhi) = finite_range(yb.iter().copied());
    let (vlo, vhi) = finite_range(values.iter().copied());
    let xs = Scale { lo: xlo, hi: xhi, from: LEFT, to: WIDTH - RIGHT };
    let ys = Scale { lo: ylo, hi: yhi, from: HEIGHT - BOTTOM, to: TOP };
    let mut svg = String::new();
    svg_frame(&mut svg, xs, ys, &xaxis.label, &yaxis.label);
    let _ = writeln!(
        svg,
        r#"<desc>color scale {} to {} {}</desc>"#,
        fmt_num(vlo),
        fmt_num(vhi),
        xml_escape(&vlabel)
    );
    for (k, &v) in values.iter().enumerate() {
        let (i, j) = (k / nx, k % nx);
        let (x0, x1, y0, y1) = (xb[j], xb[j + 1], yb[i], yb[i + 1]);
        if ![v, x0, x1, y0, y1].iter().all(|x| x.is_finite()) {
            continue;
        }
        let (px0, px1) = (xs.map(x0.min(x1)), xs.map(x0.max(x1)));
        let (py0, py1) = (ys.map(y0.max(y1)), ys.map(y0.min(y1)));
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            pt(px0),
            pt(py0),
            pt(px1 - px0),
            pt(py1 - py0),
            color((v - vlo) / (vhi - vlo))
        );
    }
    svg += "</svg>\n";
    Ok((csv, svg))
}

/// CSV and SVG renderings of dense 1-D or 2-D data, as text.
pub fn plot_text<'a>(da: impl Into<DataArrayView<'a>>) -> Result<(String, String)> {
    let da = da.into();
    let data = da.data();
    if data.dtype().is_event() {
        return Err(Error::Unsupported("cannot plot event data; histogram it first".into()));
    }
    match data.dims().rank() {
        1 => plot_1d(&da),
        2 => plot_2d(&da),
        r => Err(Error::Unsupported(format!("can plot 1-D or 2-D data, got rank {r}"))),
    }
}

/// Writes `<stem>.csv` and `<stem>.svg` into `out_dir`.
pub fn emit_plot<'a>(
    da: impl Into<DataArrayView<'a>>,
    out_dir: impl AsRef<Path>,
    stem: &str,
) -> Result<PlotFiles> {
    let (csv, svg) = plot_text(da)?;
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let files = PlotFiles { csv: dir.join(format!("{stem}.csv")), svg: dir.join(format!("{stem}.svg")) };
    fs::write(&files.csv, csv)?;
    fs::write(&files.svg, svg)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DataArray;
    use crate::dims;
    use crate::variable::Variable;

    fn hist(variances: bool) -> DataArray {
        let values = vec![3.0, 1.0, 4.0];
        let data = if variances {
            Variable::with_variances(dims!["tof" => 3], Unit::COUNTS, values.clone(), values).unwrap()
        } else {
            Variable::from_vec(dims!["tof" => 3], Unit::COUNTS, values).unwrap()
        };
        DataArray::from_data(data)
            .unwrap()
            .with_coord(
                "tof",
                Variable::from_vec(dims!["tof" => 4], Unit::US, vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
            )
            .unwrap()
    }

    #[test]
    fn histogram_csv_rows_match_data() {
        let (csv, svg) = plot_text(&hist(true)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "tof [us] low,tof [us] high,value [counts],stddev [counts]");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], format!("0,1,3,{}", 3f64.sqrt()));
        assert!(svg.contains("<path") && svg.contains("tof [us]"));
        let (csv, _) = plot_text(&hist(false)).unwrap();
        assert!(!csv.contains("stddev"));
    }

    #[test]
    fn rank_and_type_limits() {
        let cube = DataArray::from_data(
            Variable::from_vec(dims!["x" => 1, "y" => 1, "z" => 1], Unit::M, vec![1.0]).unwrap(),
        )
        .unwrap();
        assert!(matches!(plot_text(&cube), Err(Error::Unsupported(_))));
        let image = DataArray::from_data(
            Variable::from_vec(dims!["y" => 2, "x" => 2], Unit::M, vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
        )
        .unwrap();
        let (csv, svg) = plot_text(&image).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(svg.matches("<rect").count(), 2 + 4);
    }
}
