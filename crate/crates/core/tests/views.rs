mod common;

use std::collections::BTreeMap;

use larr::{dims, Error, Unit, Variable};
use proptest::prelude::*;

use common::*;

#[derive(Clone, Debug)]
enum Cut {
    Point(usize, usize),
    Range(usize, usize, usize),
}

fn cuts() -> impl Strategy<Value = Vec<Cut>> {
    prop::collection::vec(
        prop_oneof![
            (0..3usize, any::<usize>()).prop_map(|(d, i)| Cut::Point(d, i)),
            (0..3usize, any::<usize>(), any::<usize>()).prop_map(|(d, b, e)| Cut::Range(d, b, e)),
        ],
        0..4,
    )
}

/// Narrows the index range of `label` the way `cut` should. Indices are
/// reduced modulo the current extent.
fn select(ranges: &mut BTreeMap<&'static str, (usize, usize, bool)>, label: &'static str, cut: &Cut) {
    let (lo, hi, _) = ranges[label];
    let n = hi - lo;
    match *cut {
        Cut::Point(_, i) => {
            ranges.insert(label, (lo + i % n, lo + i % n + 1, true));
        }
        Cut::Range(_, b, e) => {
            let (b, e) = (b % (n + 1), e % (n + 1));
            let (b, e) = (b.min(e), b.max(e));
            ranges.insert(label, (lo + b, lo + e, false));
        }
    }
}

proptest! {
    #[test]
    fn slice_chains_match_index_oracle(nx in 1..5usize, ny in 1..5usize, nz in 1..5usize, chain in cuts()) {
        let full = dims!["x" => nx, "y" => ny, "z" => nz];
        let values: Vec<f64> = (0..full.volume()).map(|i| i as f64).collect();
        let var = Variable::from_vec(full.clone(), Unit::M, values.clone()).unwrap();
        let mut view = var.view();
        let mut ranges: BTreeMap<&'static str, (usize, usize, bool)> =
            [("x", (0, nx, false)), ("y", (0, ny, false)), ("z", (0, nz, false))].into();
        for cut in &chain {
            let live: Vec<&'static str> = ["x", "y", "z"].into_iter().filter(|l| !ranges[l].2).collect();
            if live.is_empty() {
                break;
            }
            let label = match *cut {
                Cut::Point(d, _) | Cut::Range(d, _, _) => live[d % live.len()],
            };
            let (lo, hi, _) = ranges[label];
            if hi == lo {
                break;
            }
            select(&mut ranges, label, cut);
            let (lo2, hi2, point) = ranges[label];
            view = if point {
                view.slice_point(label, lo2 - lo).unwrap()
            } else {
                view.slice_range(label, lo2 - lo, hi2 - lo).unwrap()
            };
        }
        let got = view.values_vec::<f64>().unwrap();
        let mut want = Vec::new();
        for idx in indices(&full) {
            if ["x", "y", "z"].iter().all(|l| (ranges[l].0..ranges[l].1).contains(&idx[l])) {
                want.push(at(&values, &full, &idx));
            }
        }
        prop_assert_eq!(got, want);
        let kept: Vec<&str> = ["x", "y", "z"].into_iter().filter(|l| !ranges[l].2).collect();
        prop_assert_eq!(view.dims().labels(), kept.as_slice());
    }

    #[test]
    fn writes_through_views_land_in_the_parent(nx in 1..5usize, ny in 1..5usize, b in 0..5usize, e in 0..5usize, v in -10.0f64..10.0) {
        let (b, e) = (b.min(ny), e.min(ny));
        let (b, e) = (b.min(e), b.max(e));
        let mut var = Variable::from_vec(dims!["x" => nx, "y" => ny], Unit::M, vec![0.0; nx * ny]).unwrap();
        {
            let mut sub = var.slice_range_mut("y", b, e).unwrap();
            for i in 0..nx {
                for j in 0..e - b {
                    sub.set_value(&[i, j], v).unwrap();
                }
            }
        }
        let vals = var.values_as::<f64>().unwrap();
        for i in 0..nx {
            for j in 0..ny {
                let want = if (b..e).contains(&j) { v } else { 0.0 };
                prop_assert_eq!(vals[i * ny + j], want);
            }
        }
    }

    #[test]
    fn transpose_views_read_the_same_elements(nx in 1..4usize, ny in 1..4usize, nz in 1..4usize) {
        let full = dims!["x" => nx, "y" => ny, "z" => nz];
        let values: Vec<f64> = (0..full.volume()).map(|i| i as f64 * 0.5).collect();
        let var = Variable::from_vec(full.clone(), Unit::S, values.clone()).unwrap();
        for order in label_orders(&["x", "y", "z"]).into_iter().filter(|o| o.len() == 3) {
            let view = var.transpose(&order).unwrap();
            for (idx, got) in indices(view.dims()).iter().zip(view.values_vec::<f64>().unwrap()) {
                prop_assert_eq!(got, at(&values, &full, idx));
            }
        }
    }
}

#[test]
fn view_writes_cannot_change_unit_or_shape() {
    let mut var = Variable::from_vec(dims!["x" => 3], Unit::M, vec![1.0, 2.0, 3.0]).unwrap();
    let before = var.clone();
    let seconds = Variable::from_vec(dims!["x" => 2], Unit::S, vec![0.0, 0.0]).unwrap();
    let metres2 = Variable::from_vec(dims!["x" => 2, "y" => 2], Unit::M, vec![0.0; 4]).unwrap();
    {
        let mut view = var.slice_range_mut("x", 0, 2).unwrap();
        assert!(matches!(view.assign(&seconds), Err(Error::View(_))));
        assert!(matches!(view.assign(&metres2), Err(Error::Shape(_))));
    }
    assert!(var.identical(&before));
}
