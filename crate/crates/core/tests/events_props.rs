mod common;

use larr::dataset::DataArray;
use larr::events::{event_concatenate, flatten, histogram};
use larr::{dims, Unit};
use proptest::prelude::*;

use common::*;

fn lists() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..100.0, 0..20), 1..8)
}

fn tof_lists(da: &DataArray) -> Vec<Vec<f64>> {
    da.coord("tof").unwrap().events_as::<f64>().unwrap().lists().map(<[f64]>::to_vec).collect()
}

proptest! {
    #[test]
    fn histogramming_conserves_counts(l in lists(), bins in 1..30usize) {
        let total: usize = l.iter().map(Vec::len).sum();
        let da = unit_events(dims!["p" => l.len()], l.clone());
        // The last edge is exclusive, so widen it past every event.
        let h = histogram(&da, &edges("tof", Unit::US, linspace(0.0, 100.0 + 1e-9, bins + 1))).unwrap();
        let counts = h.data().values_as::<f64>().unwrap();
        prop_assert_eq!(counts.iter().sum::<f64>(), total as f64);
        for (p, list) in l.iter().enumerate() {
            prop_assert_eq!(counts[p * bins..(p + 1) * bins].iter().sum::<f64>(), list.len() as f64);
        }
    }

    #[test]
    fn flatten_concatenates_lists_in_order(l in lists()) {
        let da = unit_events(dims!["p" => l.len()], l.clone());
        let flat = flatten(&da, "p").unwrap();
        prop_assert!(flat.dims().is_scalar());
        let want: Vec<f64> = l.concat();
        prop_assert_eq!(tof_lists(&flat), vec![want]);
    }

    #[test]
    fn offsets_are_prefix_sums_of_lengths(l in lists()) {
        let da = unit_events(dims!["p" => l.len()], l.clone());
        let storage = da.coord("tof").unwrap().events_as::<f64>().unwrap();
        let mut want = vec![0];
        for list in &l {
            want.push(want.last().unwrap() + list.len());
        }
        prop_assert_eq!(storage.offsets(), want.as_slice());
        storage.validate().unwrap();
    }

    #[test]
    fn slices_copy_the_selected_lists(l in lists(), b in any::<usize>(), e in any::<usize>()) {
        let n = l.len();
        let (b, e) = (b % (n + 1), e % (n + 1));
        let (b, e) = (b.min(e), b.max(e));
        let da = unit_events(dims!["p" => n], l.clone());
        let sliced = da.slice_range("p", b, e).unwrap().to_data_array();
        sliced.validate().unwrap();
        prop_assert_eq!(tof_lists(&sliced), l[b..e].to_vec());
        if n > 0 {
            let point = da.slice_point("p", b % n).unwrap().to_data_array();
            prop_assert_eq!(tof_lists(&point), vec![l[b % n].clone()]);
        }
    }

    #[test]
    fn concatenation_appends_per_element(a in lists(), extra in prop::collection::vec(0.0f64..100.0, 0..5)) {
        let n = a.len();
        let b: Vec<Vec<f64>> = (0..n).map(|i| extra[..extra.len().min(i)].to_vec()).collect();
        let joined = event_concatenate(
            &unit_events(dims!["p" => n], a.clone()),
            &unit_events(dims!["p" => n], b.clone()),
        )
        .unwrap();
        let want: Vec<Vec<f64>> = a.iter().zip(&b).map(|(x, y)| [x.as_slice(), y.as_slice()].concat()).collect();
        prop_assert_eq!(tof_lists(&joined), want);
    }
}
