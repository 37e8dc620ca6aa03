//! Synthetic end-to-end reduction.
//!
//! Generates event data for a sample and a vanadium run, applies a
//! per-pixel linear correction to the time-of-flight coordinate,
//! histograms, sums over pixels, normalizes sample by vanadium, and bins
//! the sample events by scattering angle. Every intermediate container is
//! saved; the two final results are also plotted.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::dataset::{self, DataArray, Dataset, VariableMap};
use crate::error::{Error, Result};
use crate::events::{event_dense_op, histogram, Target};
use crate::groupby::groupby;
use crate::io;
use crate::ops::BinaryOp;
use crate::plot::emit_plot;
use crate::units::Unit;
use crate::variable::{Dims, Variable};
use crate::EventBuilder;

pub const TOF_MIN: f64 = 1000.0;
pub const TOF_MAX: f64 = 19000.0;
pub const TOF_BINS: usize = 180;
pub const THETA_BINS: usize = 16;

#[derive(Clone, Copy, Debug)]
pub struct DemoConfig {
    pub pixels: usize,
    pub events: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub files: Vec<PathBuf>,
    pub normalized: DataArray,
    pub theta_histogram: DataArray,
}

/// Peak centres, widths (us) and relative weights per pixel bank.
type Mixture = [(f64, f64, f64); 3];

const SAMPLE: [Mixture; 4] = [
    [(4000.0, 300.0, 0.5), (9000.0, 500.0, 0.3), (14000.0, 700.0, 0.2)],
    [(4500.0, 300.0, 0.4), (9500.0, 500.0, 0.4), (14500.0, 700.0, 0.2)],
    [(5000.0, 350.0, 0.3), (10000.0, 550.0, 0.4), (15000.0, 750.0, 0.3)],
    [(5500.0, 350.0, 0.2), (10500.0, 550.0, 0.4), (15500.0, 750.0, 0.4)],
];

// Broad and nearly flat across the tof range.
const VANADIUM: [Mixture; 1] = [[(5000.0, 4000.0, 0.3), (10000.0, 5000.0, 0.4), (15000.0, 4000.0, 0.3)]];

fn theta(pixel: usize, pixels: usize) -> f64 {
    0.2 + 2.6 * pixel as f64 / (pixels.max(2) - 1) as f64
}

fn generate(cfg: &DemoConfig, banks: &[Mixture], stream: u64) -> Result<DataArray> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let n = cfg.pixels;
    let mean = cfg.events as f64 / n as f64;
    let counts = Poisson::new(mean.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Unsupported(format!("event count distribution: {e}")))?;
    let mut tof = EventBuilder::with_capacity(n, cfg.events + cfg.events / 8);
    for p in 0..n {
        let mixture = &banks[p * banks.len() / n];
        let normals: Vec<Normal<f64>> =
            mixture.iter().map(|&(mu, sigma, _)| Normal::new(mu, sigma).expect("positive width")).collect();
        let k = counts.sample(&mut rng) as usize;
        for _ in 0..k {
            let mut u: f64 = rng.random();
            let mut c = 0;
            while c + 1 < mixture.len() && u >= mixture[c].2 {
                u -= mixture[c].2;
                c += 1;
            }
            tof.push_event(normals[c].sample(&mut rng));
        }
        tof.finish_list();
    }
    let tof = tof.build();
    let dims = Dims::new([("spectrum", n)])?;
    let weights = tof.map(|_| 1.0);
    let data = Variable::from_events(dims.clone(), Unit::COUNTS, weights.clone(), Some(weights))?;
    let tof = Variable::from_events(dims.clone(), Unit::US, tof, None)?;
    let theta = Variable::from_vec(dims, Unit::RAD, (0..n).map(|p| theta(p, n)).collect())?;
    let coords: VariableMap = [("tof".to_string(), tof), ("theta".to_string(), theta)].into();
    DataArray::new(data, coords, VariableMap::new())
}

/// Per-pixel linear correction `tof * scale + offset`.
fn correct(da: &DataArray) -> Result<DataArray> {
    let n = da.dims().volume();
    let dims = Dims::new([("spectrum", n)])?;
    let thetas: Vec<f64> = (0..n).map(|p| theta(p, n)).collect();
    let scale = Variable::from_vec(
        dims.clone(),
        Unit::DIMENSIONLESS,
        thetas.iter().map(|t| 1.0 + 0.05 * t / std::f64::consts::PI).collect(),
    )?;
    let offset = Variable::from_vec(dims, Unit::US, thetas.iter().map(|t| -150.0 * t).collect())?;
    let scaled = event_dense_op(da, &scale, BinaryOp::Multiply, Target::Coord("tof"))?;
    event_dense_op(&scaled, &offset, BinaryOp::Add, Target::Coord("tof"))
}

pub fn tof_edges() -> Result<Variable> {
    let step = (TOF_MAX - TOF_MIN) / TOF_BINS as f64;
    Variable::from_vec(
        Dims::new([("tof", TOF_BINS + 1)])?,
        Unit::US,
        (0..=TOF_BINS).map(|i| TOF_MIN + step * i as f64).collect(),
    )
}

pub fn theta_edges() -> Result<Variable> {
    let step = std::f64::consts::PI / THETA_BINS as f64;
    Variable::from_vec(
        Dims::new([("theta", THETA_BINS + 1)])?,
        Unit::RAD,
        (0..=THETA_BINS).map(|i| step * i as f64).collect(),
    )
}

/// Runs the pipeline, writing all outputs into `out`.
pub fn run(cfg: &DemoConfig, out: impl AsRef<Path>) -> Result<DemoReport> {
    if cfg.pixels == 0 {
        return Err(Error::Unsupported("the demo needs at least one pixel".into()));
    }
    let out = out.as_ref();
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut save = |name: &str, da: &DataArray| -> Result<()> {
        let path = out.join(name);
        io::save_data_array(da, &path)?;
        files.push(path);
        Ok(())
    };

    let sample = generate(cfg, &SAMPLE, 0)?;
    let vanadium = generate(cfg, &VANADIUM, 1)?;
    save("01_sample_events.json", &sample)?;
    save("02_vanadium_events.json", &vanadium)?;

    let sample = correct(&sample)?;
    let vanadium = correct(&vanadium)?;
    save("03_sample_corrected.json", &sample)?;
    save("04_vanadium_corrected.json", &vanadium)?;

    let edges = tof_edges()?;
    let by_theta = groupby(&sample, "theta", Some(&theta_edges()?))?.flatten()?;
    let theta_histogram = histogram(&by_theta, &edges)?;
    let mut hists = Dataset::new();
    hists.set("sample", histogram(&sample, &edges)?)?;
    hists.set("vanadium", histogram(&vanadium, &edges)?)?;
    let summed = hists.sum("spectrum")?;
    let normalized = dataset::binary(summed.get("sample")?, summed.get("vanadium")?, BinaryOp::Divide)?;
    save("07_normalized.json", &normalized)?;
    save("08_theta_events.json", &by_theta)?;
    save("09_theta_histogram.json", &theta_histogram)?;
    for (ds, name) in [(&hists, "05_histograms.json"), (&summed, "06_summed.json")] {
        let path = out.join(name);
        io::save_dataset(ds, &path)?;
        files.push(path);
    }

    for (da, stem) in [(&normalized, "normalized"), (&theta_histogram, "theta_histogram")] {
        let plot = emit_plot(da, out, stem)?;
        files.push(plot.csv);
        files.push(plot.svg);
    }
    files.sort();
    Ok(DemoReport { files, normalized, theta_histogram })
}
