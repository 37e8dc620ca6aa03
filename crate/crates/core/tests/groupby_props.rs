mod common;

use larr::dataset::DataArray;
use larr::events::make_event_variable;
use larr::{dims, groupby, Unit, Variable};
use proptest::prelude::*;

use common::*;

const NO_BINS: Option<&Variable> = None;

fn keyed(values: &[f64], keys: &[i64]) -> DataArray {
    let n = values.len();
    DataArray::from_data(Variable::from_vec(dims!["x" => n], Unit::COUNTS, values.to_vec()).unwrap())
        .unwrap()
        .with_coord("key", Variable::from_vec(dims!["x" => n], Unit::DIMENSIONLESS, keys.to_vec()).unwrap())
        .unwrap()
}

fn pairs() -> impl Strategy<Value = Vec<(f64, i64)>> {
    prop::collection::vec((-100.0f64..100.0, 0i64..6), 1..=20)
}

proptest! {
    #[test]
    fn groups_partition_the_elements(p in pairs()) {
        let (values, keys): (Vec<f64>, Vec<i64>) = p.into_iter().unzip();
        let da = keyed(&values, &keys);
        let g = groupby(&da, "key", NO_BINS).unwrap();
        let mut seen: Vec<usize> = g.groups().iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..values.len()).collect::<Vec<_>>());
        for (members, label) in g.groups().iter().zip(g.group_coord().values_as::<i64>().unwrap()) {
            prop_assert!(members.iter().all(|&i| keys[i] == *label));
        }
    }

    #[test]
    fn sum_and_mean_match_masks(p in pairs()) {
        let (values, keys): (Vec<f64>, Vec<i64>) = p.into_iter().unzip();
        let da = keyed(&values, &keys);
        let sums = groupby(&da, "key", NO_BINS).unwrap().sum().unwrap();
        let means = groupby(&da, "key", NO_BINS).unwrap().mean().unwrap();
        let labels = sums.coord("key").unwrap().values_as::<i64>().unwrap();
        for (k, label) in labels.iter().enumerate() {
            let masked: Vec<f64> = values.iter().zip(&keys).filter(|(_, key)| *key == label).map(|(v, _)| *v).collect();
            let s: f64 = masked.iter().sum();
            prop_assert!((sums.data().values_as::<f64>().unwrap()[k] - s).abs() <= 1e-9);
            let m = means.data().values_as::<f64>().unwrap()[k];
            prop_assert!((m - s / masked.len() as f64).abs() <= 1e-9);
        }
    }

    #[test]
    fn flatten_gathers_lists_of_each_group(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pixels = 50;
        let l = random_lists(&mut r, pixels, 300, 0.0, 10.0);
        let keys: Vec<i64> = (0..pixels).map(|p| (p as i64 * 7 + seed as i64 % 5) % 4).collect();
        let da = unit_events(dims!["spectrum" => pixels], l.clone())
            .with_coord("bank", Variable::from_vec(dims!["spectrum" => pixels], Unit::DIMENSIONLESS, keys.clone()).unwrap())
            .unwrap();
        let out = groupby(&da, "bank", NO_BINS).unwrap().flatten().unwrap();
        let labels = out.coord("bank").unwrap().values_as::<i64>().unwrap();
        let tof = out.coord("tof").unwrap().events_as::<f64>().unwrap();
        for (k, label) in labels.iter().enumerate() {
            let want: Vec<f64> = (0..pixels).filter(|&p| keys[p] == *label).flat_map(|p| l[p].clone()).collect();
            prop_assert_eq!(tof.list(k), want.as_slice());
        }
    }
}

#[test]
fn bins_use_half_open_intervals() {
    let n = 5;
    let weights = make_event_variable(dims!["x" => n], Unit::COUNTS, vec![vec![1.0]; n], None).unwrap();
    let tof = make_event_variable(dims!["x" => n], Unit::US, vec![vec![0.0]; n], None).unwrap();
    let da = DataArray::new(weights, [("tof".to_string(), tof)].into(), Default::default())
        .unwrap()
        .with_coord(
            "angle",
            Variable::from_vec(dims!["x" => n], Unit::RAD, vec![0.0, 0.5, 1.0, 1.5, 2.0]).unwrap(),
        )
        .unwrap();
    let bins = edges("angle", Unit::RAD, vec![0.0, 1.0, 2.0]);
    let g = groupby(&da, "angle", Some(&bins)).unwrap();
    assert_eq!(g.groups(), &[vec![0, 1], vec![2, 3]]);
}
