use std::ops::Range;

use super::{InputVectorSet, Result, Wrnn, WrnnError};
use crate::filters::Family;
use crate::metrics::{self, RMS_NORMALIZATION};
use crate::rnn::RnnError;
use crate::timeseries::{Channel, ScaleParams, TimeSeries};

/// Rows at the start of the training span that only prime the delay line.
pub const WARMUP_ROWS: usize = 3;

/// Chronological train/validation/test fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainSplit {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for TrainSplit {
    fn default() -> Self {
        Self {
            train: 0.70,
            val: 0.15,
            test: 0.15,
        }
    }
}

impl TrainSplit {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|f| !(*f > 0.0 && *f < 1.0)) || ((parts.iter().sum::<f64>()) - 1.0).abs() > 1e-9
        {
            return Err(WrnnError::BadConfig(format!(
                "split fractions must be in (0, 1) and sum to 1, got {parts:?}"
            )));
        }
        Ok(())
    }

    /// Row ranges of the three spans; the test span takes the remainder.
    pub fn ranges(&self, rows: usize) -> Result<(Range<usize>, Range<usize>, Range<usize>)> {
        self.validate()?;
        let n_train = (rows as f64 * self.train).floor() as usize;
        let n_val = (rows as f64 * self.val).floor() as usize;
        if n_train <= WARMUP_ROWS + 1 || n_val < 2 || rows < n_train + n_val + 2 {
            return Err(WrnnError::InsufficientHistory(format!(
                "{rows} rows are too few for a {:?} split",
                (self.train, self.val, self.test)
            )));
        }
        Ok((
            0..n_train,
            n_train..n_train + n_val,
            n_train + n_val..rows,
        ))
    }
}

/// Tracks the best validation error; `patience: None` never stops.
#[derive(Clone, Debug, PartialEq)]
pub struct EarlyStopping {
    patience: Option<usize>,
    best: f64,
    best_epoch: usize,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: Option<usize>) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
            stale: 0,
        }
    }

    /// Records an epoch; true when it strictly improved on the best so far.
    pub fn update(&mut self, epoch: usize, val_mse: f64) -> bool {
        if val_mse < self.best {
            self.best = val_mse;
            self.best_epoch = epoch;
            self.stale = 0;
            true
        } else {
            self.stale += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.patience.is_some_and(|p| self.stale >= p)
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }
}

/// Outcome of one training run, scored on the test span.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub family: Family,
    /// Width of the first hidden layer.
    pub neuron_count_2n: usize,
    pub hidden: Vec<usize>,
    pub relative_rms_percent: f64,
    pub gamma: f64,
    /// Epoch whose weights were kept.
    pub epochs_to_converge: usize,
    pub epochs_run: usize,
    /// Training MSE per epoch (normalized units).
    pub mse_trace: Vec<f64>,
    /// Validation MSE per epoch.
    pub val_trace: Vec<f64>,
    pub test_samples: usize,
    pub rms_normalization: &'static str,
}

fn diverged(epoch: usize) -> impl Fn(RnnError) -> WrnnError {
    move |e| match e {
        RnnError::NonFiniteActivation { .. } | RnnError::Diverged { .. } => {
            WrnnError::Diverged { epoch }
        }
        other => other.into(),
    }
}

/// Trains with RTRL on the training span, scoring the validation span after
/// every epoch, and restores the weights of the best validation epoch.
///
/// Each epoch restarts the recurrent state; the validation pass replays the
/// training span first so the feedback loop is primed.
pub fn train_early_stopping(
    wrnn: &mut Wrnn,
    data: &InputVectorSet,
    split: TrainSplit,
    max_epochs: usize,
    patience: Option<usize>,
) -> Result<TrainReport> {
    if max_epochs == 0 {
        return Err(WrnnError::BadConfig("max_epochs must be >= 1".into()));
    }
    let (train, val, test) = split.ranges(data.len())?;
    let externals = data.externals(wrnn.topology.input_delay_taps);
    let net = &mut wrnn.net;
    let mut stopper = EarlyStopping::new(patience);
    let mut best_weights = net.weights().to_vec();
    let mut mse_trace = Vec::new();
    let mut val_trace = Vec::new();

    for epoch in 1..=max_epochs {
        net.reset();
        let mse = net
            .train_epoch(
                &externals[train.clone()],
                &data.targets[train.clone()],
                WARMUP_ROWS,
            )
            .map_err(diverged(epoch))?;
        net.reset();
        let preds = net.run(&externals[..val.end]).map_err(diverged(epoch))?;
        let val_mse = metrics::mse(&preds[val.clone()], &data.targets[val.clone()])?;
        if !mse.is_finite() || !val_mse.is_finite() {
            return Err(WrnnError::Diverged { epoch });
        }
        mse_trace.push(mse);
        val_trace.push(val_mse);
        if stopper.update(epoch, val_mse) {
            best_weights.copy_from_slice(net.weights());
        }
        if stopper.should_stop() {
            break;
        }
    }

    net.set_weights(&best_weights)?;
    net.reset();
    let preds = net.run(&externals)?;
    let scale = &data.target_scale;
    let pred: Vec<f64> = preds[test.clone()].iter().map(|&p| physical(scale, p)).collect();
    let actual: Vec<f64> = data.targets[test.clone()].iter().map(|&t| scale.invert(t)).collect();
    let eval = metrics::evaluate(&pred, &actual)?;
    net.reset();
    Ok(TrainReport {
        family: wrnn.family,
        neuron_count_2n: wrnn.topology.hidden[0],
        hidden: wrnn.topology.hidden.clone(),
        relative_rms_percent: eval.relative_rms_percent,
        gamma: eval.gamma,
        epochs_to_converge: stopper.best_epoch(),
        epochs_run: mse_trace.len(),
        mse_trace,
        val_trace,
        test_samples: test.len(),
        rms_normalization: RMS_NORMALIZATION,
    })
}

fn physical(scale: &ScaleParams, normalized: f64) -> f64 {
    let (lo, hi) = Channel::Irradiance.range();
    scale.invert(normalized).clamp(lo, hi)
}

/// Irradiance forecast for every row, in W/m2 and clipped to the sensor
/// range. Sample `i` is the forecast for `horizon_steps` after origin `i`.
pub fn forecast(wrnn: &Wrnn, vectors: &InputVectorSet, scale: &ScaleParams) -> Result<TimeSeries> {
    if vectors.is_empty() {
        return Err(WrnnError::InsufficientHistory("no input rows".into()));
    }
    let mut net = wrnn.net.clone();
    net.reset();
    let preds = net.run(&vectors.externals(wrnn.topology.input_delay_taps))?;
    let values = preds.into_iter().map(|p| physical(scale, p)).collect();
    Ok(TimeSeries::new(
        vectors.target_epoch(0),
        vectors.step,
        values,
        Channel::Irradiance,
    )?)
}

#[cfg(test)]
mod tests {
    use super::super::{assemble_wrnn, build_vectors, kept_bands, WrnnTopology};
    use super::*;
    use crate::filters::{dwt, filter_bank};
    use crate::timeseries::{normalize, synth_meteo};

    fn small_vectors(days: usize) -> InputVectorSet {
        let fb = filter_bank(Family::Db4);
        let ps: Vec<_> = [Channel::Temperature, Channel::Humidity, Channel::WindSpeed]
            .iter()
            .map(|&c| {
                let (ts, _) = normalize(&synth_meteo(days, 2, c).unwrap(), (-1.0, 1.0)).unwrap();
                dwt(ts.values(), &fb, 6).unwrap()
            })
            .collect();
        let irr = synth_meteo(days, 2, Channel::Irradiance).unwrap();
        build_vectors(&ps[0], &ps[1], &ps[2], &irr, 72, &kept_bands(6)).unwrap()
    }

    #[test]
    fn split_ranges_are_chronological() {
        let (a, b, c) = TrainSplit::default().ranges(1000).unwrap();
        assert_eq!((a, b, c), (0..700, 700..850, 850..1000));
        assert!(TrainSplit { train: 0.5, val: 0.5, test: 0.5 }.validate().is_err());
        assert!(TrainSplit::default().ranges(10).is_err());
    }

    #[test]
    fn early_stopping_rules() {
        let mut es = EarlyStopping::new(Some(3));
        let vals = [1.0, 1.5, 2.0, 2.5, 3.0];
        let mut stopped_at = None;
        for (i, v) in vals.iter().enumerate() {
            es.update(i + 1, *v);
            if es.should_stop() {
                stopped_at = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped_at, Some(4));
        assert_eq!(es.best_epoch(), 1);

        let mut es = EarlyStopping::new(None);
        for e in 1..=1000 {
            es.update(e, e as f64);
            assert!(!es.should_stop());
        }
        // ties do not count as improvement
        let mut es = EarlyStopping::new(Some(1));
        assert!(es.update(1, 0.5));
        assert!(!es.update(2, 0.5));
        assert!(es.should_stop());
    }

    fn small_net(seed: u64) -> Wrnn {
        assemble_wrnn(&WrnnTopology::with_hidden(4, 4), Family::Db4, 0.01, 1.0, Some(1.0), seed).unwrap()
    }

    #[test]
    fn infinite_patience_runs_all_epochs() {
        let data = small_vectors(4);
        let mut w = small_net(1);
        let r = train_early_stopping(&mut w, &data, TrainSplit::default(), 7, None).unwrap();
        assert_eq!(r.epochs_run, 7);
        assert_eq!(r.mse_trace.len(), 7);
        let best = r.val_trace.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(r.val_trace[r.epochs_to_converge - 1], best);
        assert_eq!(r.rms_normalization, "range");
    }

    #[test]
    fn restored_weights_score_the_best_validation() {
        let data = small_vectors(4);
        let mut w = small_net(2);
        let r = train_early_stopping(&mut w, &data, TrainSplit::default(), 6, Some(2)).unwrap();
        let (_, val, _) = TrainSplit::default().ranges(data.len()).unwrap();
        let mut net = w.net.clone();
        net.reset();
        let preds = net.run(&data.externals(3)[..val.end]).unwrap();
        let v = metrics::mse(&preds[val.clone()], &data.targets[val]).unwrap();
        assert_eq!(v, r.val_trace[r.epochs_to_converge - 1]);
    }

    #[test]
    fn training_is_deterministic_and_mask_holds() {
        let data = small_vectors(4);
        let mut a = small_net(3);
        let mut b = small_net(3);
        let ra = train_early_stopping(&mut a, &data, TrainSplit::default(), 3, Some(5)).unwrap();
        let rb = train_early_stopping(&mut b, &data, TrainSplit::default(), 3, Some(5)).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a, b);
        let mask = a.topology.mask();
        assert!(a.net.weights().iter().zip(&mask).all(|(w, m)| *m || *w == 0.0));
    }

    #[test]
    fn zero_net_forecasts_the_midrange() {
        let data = small_vectors(4);
        let mut w = small_net(4);
        let zeros = vec![0.0; w.net.weights().len()];
        w.net.set_weights(&zeros).unwrap();
        let f = forecast(&w, &data, &data.target_scale).unwrap();
        assert_eq!(f.len(), data.len());
        let mid = data.target_scale.invert(0.0).max(0.0);
        assert!(f.values().iter().all(|&v| v == mid));
        assert_eq!(f.start_epoch(), data.target_epoch(0));
        assert_eq!(f.step(), 600);
    }
}
