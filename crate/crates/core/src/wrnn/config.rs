use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{
    assemble_wrnn, build_vectors, kept_bands, select_scales, train_early_stopping, InputVectorSet,
    Result, TrainReport, TrainSplit, Wrnn, WrnnError, WrnnTopology,
};
use crate::exec::Execution;
use crate::filters::{dwt, filter_bank, Family};
use crate::kv::KeyValues;
use crate::timeseries::{
    load_csv, normalize, resample_with, synth_meteo, Aggregation, Channel, TimeSeries,
};

/// Hidden-layer sizes: explicit, or the family's reference neuron count
/// for both layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HiddenSpec {
    Fixed(usize, usize),
    Table1,
}

impl HiddenSpec {
    pub fn topology(self, family: Family) -> Result<WrnnTopology> {
        let (h1, h2) = match self {
            HiddenSpec::Fixed(a, b) => (a, b),
            HiddenSpec::Table1 => {
                let n = family.table1_neurons().ok_or_else(|| {
                    WrnnError::BadConfig(format!("{family} has no reference neuron count"))
                })?;
                (n, n)
            }
        };
        let t = WrnnTopology::with_hidden(h1, h2);
        t.validate()?;
        Ok(t)
    }
}

impl fmt::Display for HiddenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HiddenSpec::Fixed(a, b) => write!(f, "{a},{b}"),
            HiddenSpec::Table1 => f.write_str("table1"),
        }
    }
}

impl FromStr for HiddenSpec {
    type Err = WrnnError;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "table1" {
            return Ok(HiddenSpec::Table1);
        }
        let sizes: Vec<usize> = s
            .split(',')
            .map(|v| v.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| WrnnError::BadConfig(format!("bad hidden sizes `{s}`")))?;
        match sizes.as_slice() {
            [a, b] => Ok(HiddenSpec::Fixed(*a, *b)),
            _ => Err(WrnnError::BadConfig(format!(
                "need exactly two hidden sizes, got `{s}`"
            ))),
        }
    }
}

/// Flat `key=value` run configuration. Unknown keys are errors.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    /// Decomposition depth; derived from the horizon when absent.
    pub levels: Option<usize>,
    pub horizon_steps: usize,
    pub step: i64,
    pub eta: f64,
    pub beta: f64,
    pub clip: Option<f64>,
    pub max_epochs: usize,
    pub patience: Option<usize>,
    pub seed: u64,
    pub split: TrainSplit,
    pub hidden: HiddenSpec,
    /// Length of generated data when no paths are given.
    pub days: usize,
    pub irradiance: Option<PathBuf>,
    pub temperature: Option<PathBuf>,
    pub humidity: Option<PathBuf>,
    pub wind: Option<PathBuf>,
    pub aggregation: Aggregation,
    /// Lifting decompositions: largest predictor length and polynomial
    /// orders suppressed.
    pub max_taps: usize,
    pub n_constraints: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: Family::Bior3_7,
            levels: None,
            horizon_steps: 288,
            step: 600,
            eta: 0.002,
            beta: 1.0,
            clip: Some(1.0),
            max_epochs: 5000,
            patience: Some(200),
            seed: 1,
            split: TrainSplit::default(),
            hidden: HiddenSpec::Fixed(16, 16),
            days: 60,
            irradiance: None,
            temperature: None,
            humidity: None,
            wind: None,
            aggregation: Aggregation::Sample,
            max_taps: 4,
            n_constraints: 2,
        }
    }
}

pub const CONFIG_KEYS: [&str; 22] = [
    "family",
    "levels",
    "horizon_steps",
    "step",
    "eta",
    "beta",
    "clip",
    "max_epochs",
    "patience",
    "seed",
    "train_frac",
    "val_frac",
    "test_frac",
    "hidden",
    "days",
    "irradiance",
    "temperature",
    "humidity",
    "wind",
    "aggregation",
    "max_taps",
    "n_constraints",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| WrnnError::BadConfig(format!("bad value `{value}` for `{key}`")))
}

fn optional<T: FromStr>(key: &str, value: &str, none: &[&str]) -> Result<Option<T>> {
    if none.contains(&value.trim()) {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

impl RunConfig {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path = |v: &str| Some(PathBuf::from(v.trim()));
        match key.trim() {
            "family" => self.family = value.parse()?,
            "levels" => self.levels = optional(key, value, &["auto"])?,
            "horizon_steps" => self.horizon_steps = parse(key, value)?,
            "step" => self.step = parse(key, value)?,
            "eta" => self.eta = parse(key, value)?,
            "beta" => self.beta = parse(key, value)?,
            "clip" => self.clip = optional(key, value, &["none", "off"])?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "patience" => self.patience = optional(key, value, &["inf", "none"])?,
            "seed" => self.seed = parse(key, value)?,
            "train_frac" => self.split.train = parse(key, value)?,
            "val_frac" => self.split.val = parse(key, value)?,
            "test_frac" => self.split.test = parse(key, value)?,
            "hidden" => self.hidden = value.parse()?,
            "days" => self.days = parse(key, value)?,
            "irradiance" => self.irradiance = path(value),
            "temperature" => self.temperature = path(value),
            "humidity" => self.humidity = path(value),
            "wind" => self.wind = path(value),
            "aggregation" => {
                self.aggregation = value.trim().parse().map_err(WrnnError::BadConfig)?
            }
            "max_taps" => self.max_taps = parse(key, value)?,
            "n_constraints" => self.n_constraints = parse(key, value)?,
            other => return Err(WrnnError::BadConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Defaults overridden by every entry of `kv`, in order.
    pub fn from_kv(kv: &KeyValues) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in kv.iter() {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let kv = KeyValues::parse(&text).map_err(WrnnError::BadConfig)?;
        Self::from_kv(&kv)
    }

    pub fn validate(&self) -> Result<()> {
        self.split.validate()?;
        let bad = |m: String| Err(WrnnError::BadConfig(m));
        if self.step <= 0 {
            return bad(format!("step must be > 0, got {}", self.step));
        }
        if self.horizon_steps == 0 {
            return bad("horizon_steps must be >= 1".into());
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if self.clip.is_some_and(|c| c.is_nan() || c <= 0.0) {
            return bad("clip must be > 0".into());
        }
        if self.max_epochs == 0 || self.days == 0 || self.levels == Some(0) {
            return bad("max_epochs, days and levels must be >= 1".into());
        }
        if self.max_taps == 0 || self.n_constraints > self.max_taps {
            return bad("need 1 <= max_taps and n_constraints <= max_taps".into());
        }
        Ok(())
    }

    /// Every setting, in [`CONFIG_KEYS`] order; absent paths are omitted.
    pub fn to_kv(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.push("family", self.family)
            .push(
                "levels",
                self.levels.map_or("auto".to_string(), |l| l.to_string()),
            )
            .push("horizon_steps", self.horizon_steps)
            .push("step", self.step)
            .push("eta", format!("{:?}", self.eta))
            .push("beta", format!("{:?}", self.beta))
            .push("clip", self.clip.map_or("none".to_string(), |c| format!("{c:?}")))
            .push("max_epochs", self.max_epochs)
            .push(
                "patience",
                self.patience.map_or("inf".to_string(), |p| p.to_string()),
            )
            .push("seed", self.seed)
            .push("train_frac", format!("{:?}", self.split.train))
            .push("val_frac", format!("{:?}", self.split.val))
            .push("test_frac", format!("{:?}", self.split.test))
            .push("hidden", self.hidden)
            .push("days", self.days);
        for (key, p) in [
            ("irradiance", &self.irradiance),
            ("temperature", &self.temperature),
            ("humidity", &self.humidity),
            ("wind", &self.wind),
        ] {
            if let Some(p) = p {
                kv.push(key, p.display());
            }
        }
        kv.push("aggregation", self.aggregation)
            .push("max_taps", self.max_taps)
            .push("n_constraints", self.n_constraints);
        kv
    }

    /// Levels actually used: explicit, or from the horizon.
    pub fn resolved_levels(&self) -> Result<usize> {
        match self.levels {
            Some(l) => Ok(l),
            None => Ok(select_scales(self.step, self.horizon_steps as i64 * self.step)?.levels),
        }
    }
}

/// The four time-aligned channels.
#[derive(Clone, Debug, PartialEq)]
pub struct MeteoData {
    pub irradiance: TimeSeries,
    pub temperature: TimeSeries,
    pub humidity: TimeSeries,
    pub wind: TimeSeries,
}

impl MeteoData {
    pub fn synth(days: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            irradiance: synth_meteo(days, seed, Channel::Irradiance)?,
            temperature: synth_meteo(days, seed, Channel::Temperature)?,
            humidity: synth_meteo(days, seed, Channel::Humidity)?,
            wind: synth_meteo(days, seed, Channel::WindSpeed)?,
        })
    }

    /// Loads `timestamp,value` CSVs, brings them to `step` and trims them to
    /// their common time span.
    pub fn load(
        paths: [&Path; 4],
        step: i64,
        aggregation: Aggregation,
    ) -> Result<Self> {
        let [irr, temp, rh, wind] = [
            (paths[0], Channel::Irradiance),
            (paths[1], Channel::Temperature),
            (paths[2], Channel::Humidity),
            (paths[3], Channel::WindSpeed),
        ]
        .map(|(p, c)| {
            load_csv(p, c, "timestamp", "value")
                .and_then(|ts| {
                    if ts.step() == step {
                        Ok(ts)
                    } else {
                        resample_with(&ts, step, aggregation)
                    }
                })
                .map_err(WrnnError::from)
        });
        Self::aligned([irr?, temp?, rh?, wind?])
    }

    /// Trims four series with a shared step to their overlap.
    pub fn aligned(series: [TimeSeries; 4]) -> Result<Self> {
        let step = series[0].step();
        if series.iter().any(|s| s.step() != step) {
            return Err(WrnnError::MisalignedSeries("channels differ in step".into()));
        }
        let start = series.iter().map(TimeSeries::start_epoch).max().expect("four series");
        let end = series.iter().map(TimeSeries::end_epoch).min().expect("four series");
        if series.iter().any(|s| (s.start_epoch() - start) % step != 0) {
            return Err(WrnnError::MisalignedSeries(
                "channel sample grids are offset from each other".into(),
            ));
        }
        if end < start {
            return Err(WrnnError::MisalignedSeries("channels do not overlap".into()));
        }
        let len = ((end - start) / step) as usize + 1;
        let [irradiance, temperature, humidity, wind] = series.map(|s| {
            let first = ((start - s.start_epoch()) / step) as usize;
            let values = s.values()[first..first + len].to_vec();
            TimeSeries::new(start, step, values, s.channel())
        });
        Ok(Self {
            irradiance: irradiance?,
            temperature: temperature?,
            humidity: humidity?,
            wind: wind?,
        })
    }

    /// Files named by the config, or generated data when none are set.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        let paths = [&cfg.irradiance, &cfg.temperature, &cfg.humidity, &cfg.wind];
        match paths.iter().filter(|p| p.is_some()).count() {
            0 => Self::synth(cfg.days, cfg.seed),
            4 => {
                let p = paths.map(|p| p.as_deref().expect("checked"));
                Self::load(p, cfg.step, cfg.aggregation)
            }
            _ => Err(WrnnError::BadConfig(
                "give all four data paths or none".into(),
            )),
        }
    }

    pub fn len(&self) -> usize {
        self.irradiance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irradiance.is_empty()
    }
}

/// Normalizes and decomposes the three input channels and builds the
/// network rows for `family`.
pub fn prepare_vectors(data: &MeteoData, family: Family, cfg: &RunConfig) -> Result<InputVectorSet> {
    if data.irradiance.step() != cfg.step {
        return Err(WrnnError::MisalignedSeries(format!(
            "data step {} s differs from configured {} s",
            data.irradiance.step(),
            cfg.step
        )));
    }
    let levels = cfg.resolved_levels()?;
    let fb = filter_bank(family);
    let pyramids = [&data.temperature, &data.humidity, &data.wind]
        .map(|ts| -> Result<_> {
            let (norm, _) = normalize(ts, (-1.0, 1.0))?;
            Ok(dwt(norm.values(), &fb, levels)?)
        });
    let [t, h, w] = pyramids;
    build_vectors(&t?, &h?, &w?, &data.irradiance, cfg.horizon_steps, &kept_bands(levels))
}

/// Builds, trains and scores one network.
pub fn run_experiment(
    data: &MeteoData,
    family: Family,
    cfg: &RunConfig,
) -> Result<(TrainReport, Wrnn, InputVectorSet)> {
    cfg.validate()?;
    let vectors = prepare_vectors(data, family, cfg)?;
    let topology = cfg.hidden.topology(family)?;
    let mut wrnn = assemble_wrnn(&topology, family, cfg.eta, cfg.beta, cfg.clip, cfg.seed)?;
    let report = train_early_stopping(&mut wrnn, &vectors, cfg.split, cfg.max_epochs, cfg.patience)?;
    Ok((report, wrnn, vectors))
}

#[derive(Debug)]
pub struct SweepEntry {
    pub family: Family,
    pub result: Result<TrainReport>,
}

/// One run per family on the same data and seed; failures are kept per
/// family. Entries come back sorted by family name.
pub fn run_table1_sweep(
    families: &[Family],
    data: &MeteoData,
    cfg: &RunConfig,
    exec: Execution,
) -> Result<Vec<SweepEntry>> {
    if families.is_empty() {
        return Err(WrnnError::BadConfig("no families to sweep".into()));
    }
    let mut entries = exec.map(families, |&family| SweepEntry {
        family,
        result: run_experiment(data, family, cfg).map(|(r, _, _)| r),
    });
    entries.sort_by_key(|e| e.family.name());
    Ok(entries)
}

pub const TABLE1_HEADER: &str = "family,2N,relative_rms_percent,gamma,epochs";

/// Failed families keep their row with empty metric cells.
pub fn write_table1_csv(entries: &[SweepEntry], path: impl AsRef<Path>) -> Result<()> {
    let mut sorted: Vec<&SweepEntry> = entries.iter().collect();
    sorted.sort_by_key(|e| e.family.name());
    let mut out = format!("{TABLE1_HEADER}\n");
    for e in sorted {
        match &e.result {
            Ok(r) => out.push_str(&format!(
                "{},{},{:.6},{:.6},{}\n",
                r.family, r.neuron_count_2n, r.relative_rms_percent, r.gamma, r.epochs_to_converge
            )),
            Err(_) => out.push_str(&format!("{},,,,\n", e.family)),
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_unknown_keys() {
        let kv = KeyValues::parse("family=db4\nhidden=table1\npatience=inf\neta=0.01\n").unwrap();
        let cfg = RunConfig::from_kv(&kv).unwrap();
        assert_eq!(cfg.family, Family::Db4);
        assert_eq!(cfg.hidden, HiddenSpec::Table1);
        assert_eq!(cfg.patience, None);
        assert_eq!(RunConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
        let bad = KeyValues::parse("famliy=db4").unwrap();
        assert!(matches!(RunConfig::from_kv(&bad), Err(WrnnError::BadConfig(m)) if m.contains("famliy")));
        let bad = KeyValues::parse("train_frac=0.9").unwrap();
        assert!(RunConfig::from_kv(&bad).is_err());
        let kv = cfg.to_kv();
        let keys: Vec<&str> = kv.iter().map(|(k, _)| k).collect();
        assert!(keys.iter().all(|k| CONFIG_KEYS.contains(k)));
    }

    #[test]
    fn hidden_spec() {
        assert_eq!("16,16".parse::<HiddenSpec>().unwrap(), HiddenSpec::Fixed(16, 16));
        assert!("16".parse::<HiddenSpec>().is_err());
        let t = HiddenSpec::Table1.topology(Family::Bior2_8).unwrap();
        assert_eq!(t.hidden, [6, 6]);
        assert!(HiddenSpec::Fixed(5, 6).topology(Family::Db4).is_err());
    }

    #[test]
    fn levels_follow_horizon() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.resolved_levels().unwrap(), 9);
        let cfg = RunConfig {
            horizon_steps: 144,
            ..RunConfig::default()
        };
        assert_eq!(cfg.resolved_levels().unwrap(), 8);
    }

    #[test]
    fn alignment_trims_to_overlap() {
        let mk = |start: i64, n: usize, c: Channel| {
            TimeSeries::new(start, 600, (0..n).map(|i| i as f64).collect(), c).unwrap()
        };
        let d = MeteoData::aligned([
            mk(0, 10, Channel::Irradiance),
            mk(1200, 10, Channel::Temperature),
            mk(600, 5, Channel::Humidity),
            mk(0, 20, Channel::WindSpeed),
        ])
        .unwrap();
        // overlap is 1200..=3000 s
        assert_eq!(d.len(), 4);
        assert_eq!(d.irradiance.values(), [2.0, 3.0, 4.0, 5.0]);
        assert_eq!(d.humidity.values(), [1.0, 2.0, 3.0, 4.0]);
        assert!(MeteoData::aligned([
            mk(0, 10, Channel::Irradiance),
            mk(300, 10, Channel::Temperature),
            mk(0, 10, Channel::Humidity),
            mk(0, 10, Channel::WindSpeed),
        ])
        .is_err());
    }

    #[test]
    fn csv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t1.csv");
        let ok = TrainReport {
            family: Family::Db4,
            neuron_count_2n: 8,
            hidden: vec![8, 8],
            relative_rms_percent: 4.5,
            gamma: 0.97,
            epochs_to_converge: 12,
            epochs_run: 30,
            mse_trace: vec![],
            val_trace: vec![],
            test_samples: 10,
            rms_normalization: "range",
        };
        let entries = vec![
            SweepEntry {
                family: Family::Sym4,
                result: Err(WrnnError::HorizonTooShort),
            },
            SweepEntry {
                family: Family::Db4,
                result: Ok(ok),
            },
        ];
        write_table1_csv(&entries, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "family,2N,relative_rms_percent,gamma,epochs\ndb4,8,4.500000,0.970000,12\nsym4,,,,\n"
        );
    }
}
