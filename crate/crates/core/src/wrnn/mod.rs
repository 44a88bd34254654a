//! Wavelet recurrent network forecasting: coefficient features from three
//! meteorological channels, a layered recurrent net realized as a masked
//! Williams–Zipser network, early stopping, and multi-day-ahead forecasts.

mod config;
mod train;

use thiserror::Error;

use crate::filters::{self, filter_bank, Band, CoefficientPyramid, FilterError};
use crate::metrics::MetricsError;
use crate::rnn::{Activation, RnnConfig, RnnError, RnnState};
use crate::timeseries::{normalize, ScaleParams, TimeSeries, TimeSeriesError};

pub use config::{
    prepare_vectors, run_experiment, run_table1_sweep, write_table1_csv, HiddenSpec, MeteoData,
    RunConfig, SweepEntry, CONFIG_KEYS, TABLE1_HEADER,
};
pub use train::{forecast, train_early_stopping, EarlyStopping, TrainReport, TrainSplit};

#[derive(Debug, Error)]
pub enum WrnnError {
    #[error("horizon must span at least two samples")]
    HorizonTooShort,
    #[error("misaligned series: {0}")]
    MisalignedSeries(String),
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("training diverged in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Rnn(#[from] RnnError),
    #[error(transparent)]
    TimeSeries(#[from] TimeSeriesError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WrnnError>;

/// Coefficients taken per channel: `a1(t0), d1(t0), d2(t0-), d2(t0+)`.
pub const FEATURES_PER_CHANNEL: usize = 4;
/// Channels feeding the network, in row order.
pub const INPUT_CHANNELS: [&str; 3] = ["temperature", "humidity", "wind_speed"];

/// Layered topology: delayed coefficient vectors into hidden layer 1, which
/// also hears the output one step back; hidden 1 into hidden 2; hidden 2
/// into a linear output neuron.
#[derive(Clone, Debug, PartialEq)]
pub struct WrnnTopology {
    pub input_width: usize,
    pub hidden: Vec<usize>,
    pub output: usize,
    pub input_delay_taps: usize,
    pub output_feedback_taps: usize,
}

impl Default for WrnnTopology {
    fn default() -> Self {
        Self {
            input_width: FEATURES_PER_CHANNEL * INPUT_CHANNELS.len(),
            hidden: vec![16, 16],
            output: 1,
            input_delay_taps: 3,
            output_feedback_taps: 1,
        }
    }
}

impl WrnnTopology {
    pub fn with_hidden(h1: usize, h2: usize) -> Self {
        Self {
            hidden: vec![h1, h2],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.len() != 2 {
            return Err(WrnnError::BadConfig(format!(
                "need exactly two hidden layers, got {}",
                self.hidden.len()
            )));
        }
        if self.hidden.iter().any(|&h| h == 0 || h % 2 != 0) {
            return Err(WrnnError::BadConfig(format!(
                "hidden layer sizes must be even and positive, got {:?}",
                self.hidden
            )));
        }
        if self.output != 1 || self.output_feedback_taps != 1 {
            return Err(WrnnError::BadConfig(
                "only a single output neuron with one feedback tap is supported".into(),
            ));
        }
        if self.input_width == 0 || self.input_delay_taps == 0 {
            return Err(WrnnError::BadConfig("empty input layer".into()));
        }
        Ok(())
    }

    /// External inputs of the recurrent net: every delayed coefficient vector.
    pub fn external_inputs(&self) -> usize {
        self.input_width * self.input_delay_taps
    }

    pub fn neurons(&self) -> usize {
        self.output + self.hidden.iter().sum::<usize>()
    }

    /// Neuron indices of hidden layer `layer` (0 or 1). Neuron 0 is the output.
    pub fn layer(&self, layer: usize) -> std::ops::Range<usize> {
        let start = self.output + self.hidden[..layer].iter().sum::<usize>();
        start..start + self.hidden[layer]
    }

    /// Trainable-weight mask over the `N x (p + N + 1)` weight matrix.
    pub fn mask(&self) -> Vec<bool> {
        let p = self.external_inputs();
        let n = self.neurons();
        let width = p + n + 1;
        let fb = |m: usize| p + 1 + m;
        let mut mask = vec![false; n * width];
        let mut allow = |neuron: usize, col: usize| mask[neuron * width + col] = true;
        for j in self.layer(0) {
            (0..p).for_each(|l| allow(j, l));
            allow(j, p);
            allow(j, fb(0));
        }
        for j in self.layer(1) {
            allow(j, p);
            self.layer(0).for_each(|m| allow(j, fb(m)));
        }
        allow(0, p);
        self.layer(1).for_each(|m| allow(0, fb(m)));
        mask
    }

    pub fn activations(&self) -> Vec<Activation> {
        let mut acts = vec![Activation::rbf_wavelet(); self.neurons()];
        acts[0] = Activation::linear();
        acts
    }
}

/// Levels and kept bands for a forecast horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSelection {
    pub levels: usize,
    pub keep: Vec<Band>,
}

/// `J = ceil(log2(horizon / step))`, so the coarsest band spans the horizon.
///
/// Kept bands: the residue, `d1` and `d2` (fed to the network directly), and
/// the four coarsest details, whose period spans reach down to a quarter of
/// the horizon and so hold the daily cycle for a two-day horizon. The
/// sub-daily details in between are thresholded to zero.
pub fn select_scales(step: i64, horizon: i64) -> Result<ScaleSelection> {
    if step <= 0 || horizon <= 0 || horizon % step != 0 {
        return Err(WrnnError::BadConfig(format!(
            "horizon {horizon} s is not a positive multiple of step {step} s"
        )));
    }
    let ratio = (horizon / step) as u64;
    if ratio < 2 {
        return Err(WrnnError::HorizonTooShort);
    }
    let levels = (u64::BITS - (ratio - 1).leading_zeros()) as usize;
    Ok(ScaleSelection {
        levels,
        keep: kept_bands(levels),
    })
}

pub fn kept_bands(levels: usize) -> Vec<Band> {
    let mut keep = vec![Band::Approx(levels)];
    for j in 1..=levels {
        if j <= 2 || j + 3 >= levels {
            keep.push(Band::Detail(j));
        }
    }
    keep
}

/// Coefficient rows and aligned normalized targets.
#[derive(Clone, Debug, PartialEq)]
pub struct InputVectorSet {
    /// One row of `FEATURES_PER_CHANNEL * 3` values per forecast origin.
    pub rows: Vec<Vec<f64>>,
    /// Normalized irradiance `horizon_steps` after each origin.
    pub targets: Vec<f64>,
    /// Sample index of each origin.
    pub origins: Vec<usize>,
    /// Name of the coefficient at each row position, e.g. `wind_speed:d2-`.
    pub band_map: Vec<String>,
    pub horizon_steps: usize,
    /// Start time and step of the underlying series.
    pub start_epoch: i64,
    pub step: i64,
    /// Maps normalized targets back to W/m2.
    pub target_scale: ScaleParams,
}

impl InputVectorSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Timestamp a target refers to.
    pub fn target_epoch(&self, row: usize) -> i64 {
        self.start_epoch + (self.origins[row] + self.horizon_steps) as i64 * self.step
    }

    /// External input of the recurrent net at `row`: the current and
    /// `taps - 1` previous rows, zero-padded before the first row.
    pub fn delayed(&self, row: usize, taps: usize) -> Vec<f64> {
        let width = self.rows.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(width * taps);
        for d in 0..taps {
            match row.checked_sub(d) {
                Some(r) => out.extend_from_slice(&self.rows[r]),
                None => out.extend(std::iter::repeat_n(0.0, width)),
            }
        }
        out
    }

    pub fn externals(&self, taps: usize) -> Vec<Vec<f64>> {
        (0..self.len()).map(|r| self.delayed(r, taps)).collect()
    }
}

fn channel_features(p: &CoefficientPyramid, keep: &[Band]) -> Result<[Vec<f64>; 3]> {
    let fb = filter_bank(p.family);
    let kept = filters::threshold_bands(p, keep)?;
    let a1 = filters::idwt_to_level(&kept, &fb, 1)?;
    Ok([a1, kept.details[0].clone(), kept.details[1].clone()])
}

/// Builds one row per origin `t0` in `0..n - horizon_steps`:
/// `[a1(t0/2), d1(t0/2), d2(floor(t0/4)), d2(ceil(t0/4))]` per channel, in
/// temperature, humidity, wind order. `a1` is rebuilt from the pyramid with
/// the bands outside `keep` zeroed; `d1`, `d2` are read directly. Targets
/// are irradiance at `t0 + horizon_steps`, normalized to `[-1, 1]`.
pub fn build_vectors(
    pyr_temp: &CoefficientPyramid,
    pyr_rh: &CoefficientPyramid,
    pyr_wind: &CoefficientPyramid,
    irr: &TimeSeries,
    horizon_steps: usize,
    keep: &[Band],
) -> Result<InputVectorSet> {
    let n = irr.len();
    for (name, p) in INPUT_CHANNELS.iter().zip([pyr_temp, pyr_rh, pyr_wind]) {
        if p.original_length != n {
            return Err(WrnnError::MisalignedSeries(format!(
                "{name} pyramid covers {} samples, irradiance {n}",
                p.original_length
            )));
        }
        if p.levels() < 2 {
            return Err(WrnnError::InsufficientHistory(format!(
                "{name} pyramid needs at least 2 levels"
            )));
        }
    }
    if horizon_steps == 0 || horizon_steps >= n {
        return Err(WrnnError::InsufficientHistory(format!(
            "{n} samples cannot cover a {horizon_steps}-step horizon"
        )));
    }
    let features = [
        channel_features(pyr_temp, keep)?,
        channel_features(pyr_rh, keep)?,
        channel_features(pyr_wind, keep)?,
    ];
    let (target_norm, target_scale) = normalize(irr, (-1.0, 1.0))?;
    let count = n - horizon_steps;
    let mut rows = Vec::with_capacity(count);
    for t0 in 0..count {
        let mut row = Vec::with_capacity(FEATURES_PER_CHANNEL * 3);
        for [a1, d1, d2] in &features {
            let (lo, hi) = (t0 / 4, t0.div_ceil(4));
            let at = |band: &Vec<f64>, i: usize| {
                band.get(i).copied().ok_or_else(|| {
                    WrnnError::InsufficientHistory(format!("no coefficient at index {i}"))
                })
            };
            row.push(at(a1, t0 / 2)?);
            row.push(at(d1, t0 / 2)?);
            row.push(at(d2, lo)?);
            row.push(at(d2, hi)?);
        }
        rows.push(row);
    }
    let band_map = INPUT_CHANNELS
        .iter()
        .flat_map(|c| ["a1", "d1", "d2-", "d2+"].map(move |b| format!("{c}:{b}")))
        .collect();
    Ok(InputVectorSet {
        rows,
        targets: target_norm.values()[horizon_steps..].to_vec(),
        origins: (0..count).collect(),
        band_map,
        horizon_steps,
        start_epoch: irr.start_epoch(),
        step: irr.step(),
        target_scale,
    })
}

/// A masked recurrent network with the layered topology.
#[derive(Clone, Debug, PartialEq)]
pub struct Wrnn {
    pub family: filters::Family,
    pub topology: WrnnTopology,
    pub net: RnnState,
}

pub fn assemble_wrnn(
    topology: &WrnnTopology,
    family: filters::Family,
    eta: f64,
    beta: f64,
    clip: Option<f64>,
    seed: u64,
) -> Result<Wrnn> {
    topology.validate()?;
    let cfg = RnnConfig {
        inputs: topology.external_inputs(),
        neurons: topology.neurons(),
        beta,
        eta,
        activation: crate::rnn::ActivationKind::RbfWavelet,
        clip,
    };
    let net = RnnState::masked(&cfg, Some(topology.mask()), topology.activations(), seed)?;
    Ok(Wrnn {
        family,
        topology: topology.clone(),
        net,
    })
}
