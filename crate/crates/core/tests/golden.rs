//! Output snapshots. Set `LARR_UPDATE_GOLDEN=1` to rewrite them.

mod common;

use std::path::PathBuf;

use larr::dataset::DataArray;
use larr::io::Container;
use larr::plot::plot_text;
use larr::render::{render_structure, RenderOptions};
use larr::{dims, Unit, Variable};

use common::*;

fn check(name: &str, got: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("LARR_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(got, want, "{name} changed");
}

#[test]
fn four_item_structure() {
    let text = render_structure(&Container::from(four_item_dataset()), RenderOptions::plain());
    check("four_items.txt", &text);
}

#[test]
fn histogram_plot() {
    let counts = vec![3.0, 7.0, 12.0, 5.0, 1.0];
    let da = DataArray::from_data(
        Variable::with_variances(dims!["tof" => 5], Unit::COUNTS, counts.clone(), counts).unwrap(),
    )
    .unwrap()
    .with_coord("tof", edges("tof", Unit::US, linspace(0.0, 500.0, 6)))
    .unwrap();
    let (csv, svg) = plot_text(&da).unwrap();
    check("histogram.csv", &csv);
    check("histogram.svg", &svg);
}
