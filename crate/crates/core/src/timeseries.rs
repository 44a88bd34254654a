//! Uniformly sampled scalar series: CSV ingestion, resampling, normalization
//! and a seeded synthetic meteorological generator.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Default sampling interval of the measurement campaign, in seconds.
pub const DEFAULT_STEP: i64 = 600;

/// Longest run of missing samples that ingestion interpolates over.
pub const MAX_GAP_FILL: usize = 3;

/// 2008-01-01T00:00:00Z, start of every synthetic series.
pub const SYNTH_START_EPOCH: i64 = 1_199_145_600;

const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Error)]
pub enum TimeSeriesError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("timestamps not strictly increasing at data row {row}")]
    NonMonotonicTime { row: usize },
    #[error("series is empty")]
    EmptySeries,
    #[error("unparseable value `{value}` at data row {row}")]
    BadValue { row: usize, value: String },
    #[error("unparseable timestamp `{value}` at data row {row}")]
    BadTimestamp { row: usize, value: String },
    #[error("timestamp at data row {row} is off the {step} s sampling grid")]
    IrregularSampling { row: usize, step: i64 },
    #[error("step must be positive, got {0}")]
    InvalidStep(i64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("new step {new_step} s leaves fewer than 2 samples")]
    StepTooLarge { new_step: i64 },
    #[error("series needs at least {needed} samples, has {len}")]
    TooShort { needed: usize, len: usize },
    #[error("series is constant; cannot normalize")]
    ConstantSeries,
    #[error("target range [{lo}, {hi}] is empty")]
    BadRange { lo: f64, hi: f64 },
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TimeSeriesError>;

/// Measurement channel of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Irradiance,
    Temperature,
    Humidity,
    WindSpeed,
    Synthetic,
}

impl Channel {
    pub const METEO: [Channel; 4] = [
        Channel::Irradiance,
        Channel::Temperature,
        Channel::Humidity,
        Channel::WindSpeed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Irradiance => "irradiance",
            Channel::Temperature => "temperature",
            Channel::Humidity => "humidity",
            Channel::WindSpeed => "wind_speed",
            Channel::Synthetic => "synthetic",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Channel::Irradiance => "W/m2",
            Channel::Temperature => "degC",
            Channel::Humidity => "%",
            Channel::WindSpeed => "km/h",
            Channel::Synthetic => "",
        }
    }

    /// Short file stem used by the CLI (`temp.csv`, `rh.csv`, ...).
    pub fn file_stem(self) -> &'static str {
        match self {
            Channel::Irradiance => "irradiance",
            Channel::Temperature => "temp",
            Channel::Humidity => "rh",
            Channel::WindSpeed => "wind",
            Channel::Synthetic => "synthetic",
        }
    }

    /// Physical sensor range.
    pub fn range(self) -> (f64, f64) {
        match self {
            Channel::Irradiance => (0.0, 1400.0),
            Channel::Temperature => (-30.0, 60.0),
            Channel::Humidity => (0.0, 100.0),
            Channel::WindSpeed => (0.0, 150.0),
            Channel::Synthetic => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = TimeSeriesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "irradiance" | "irr" => Ok(Channel::Irradiance),
            "temperature" | "temp" => Ok(Channel::Temperature),
            "humidity" | "rh" => Ok(Channel::Humidity),
            "wind_speed" | "wind" => Ok(Channel::WindSpeed),
            "synthetic" => Ok(Channel::Synthetic),
            _ => Err(TimeSeriesError::UnknownChannel(s.to_string())),
        }
    }
}

/// Uniformly sampled scalar signal. Sample `k` sits at `start_epoch + k * step`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    start_epoch: i64,
    step: i64,
    values: Vec<f64>,
    channel: Channel,
}

impl TimeSeries {
    pub fn new(start_epoch: i64, step: i64, values: Vec<f64>, channel: Channel) -> Result<Self> {
        if step <= 0 {
            return Err(TimeSeriesError::InvalidStep(step));
        }
        if values.is_empty() {
            return Err(TimeSeriesError::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TimeSeriesError::NonFinite(i));
        }
        Ok(Self {
            start_epoch,
            step,
            values,
            channel,
        })
    }

    pub fn start_epoch(&self) -> i64 {
        self.start_epoch
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, k: usize) -> i64 {
        self.start_epoch + k as i64 * self.step
    }

    pub fn end_epoch(&self) -> i64 {
        self.timestamp(self.len() - 1)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.start_epoch, self.step, values, self.channel)
    }

    /// Writes `timestamp,value` rows with integer epoch seconds.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(["timestamp", "value"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([self.timestamp(k).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Affine map `y = lo + (x - offset) * gain` onto `target_range`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleParams {
    pub offset: f64,
    pub gain: f64,
    pub target_range: (f64, f64),
}

impl ScaleParams {
    pub fn apply(&self, x: f64) -> f64 {
        self.target_range.0 + (x - self.offset) * self.gain
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.target_range.0) / self.gain + self.offset
    }

    pub fn apply_series(&self, ts: &TimeSeries) -> Result<TimeSeries> {
        ts.with_values(ts.values.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn denormalize(&self, ts: &TimeSeries) -> Result<TimeSeries> {
        ts.with_values(ts.values.iter().map(|&y| self.invert(y)).collect())
    }
}

fn parse_timestamp(raw: &str) -> Option<i64> {
    let s = raw.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|dt| dt.and_utc().timestamp())
}

fn is_missing(raw: &str) -> bool {
    let s = raw.trim();
    s.is_empty() || s.eq_ignore_ascii_case("nan") || s.eq_ignore_ascii_case("na")
}

/// Loads one channel from a headed CSV.
///
/// Timestamps may be integer epoch seconds or ISO-8601 (UTC assumed when no
/// offset is given). Empty / `NaN` / `NA` cells count as missing samples, as
/// do holes in the timestamp grid. Runs of up to [`MAX_GAP_FILL`] missing
/// samples are linearly interpolated; longer holes split the series and the
/// longest segment is kept (earliest on ties).
pub fn load_csv(
    path: impl AsRef<Path>,
    channel: Channel,
    time_column: &str,
    value_column: &str,
) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| TimeSeriesError::MissingColumn(name.to_string()))
    };
    let tcol = find(time_column)?;
    let vcol = find(value_column)?;

    let mut times = Vec::new();
    let mut values: Vec<Option<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let traw = rec.get(tcol).unwrap_or("");
        let t = parse_timestamp(traw).ok_or_else(|| TimeSeriesError::BadTimestamp {
            row,
            value: traw.to_string(),
        })?;
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(TimeSeriesError::NonMonotonicTime { row });
            }
        }
        let vraw = rec.get(vcol).unwrap_or("");
        let v = if is_missing(vraw) {
            None
        } else {
            match vraw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => {
                    return Err(TimeSeriesError::BadValue {
                        row,
                        value: vraw.to_string(),
                    })
                }
            }
        };
        times.push(t);
        values.push(v);
    }
    if times.is_empty() {
        return Err(TimeSeriesError::EmptySeries);
    }

    let step = times
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .unwrap_or(DEFAULT_STEP);

    // Lay samples onto the grid; grid holes become missing samples.
    let start = times[0];
    let span = ((times[times.len() - 1] - start) / step) as usize + 1;
    let mut grid: Vec<Option<f64>> = vec![None; span];
    for (i, (&t, v)) in times.iter().zip(&values).enumerate() {
        if (t - start) % step != 0 {
            return Err(TimeSeriesError::IrregularSampling { row: i + 1, step });
        }
        grid[((t - start) / step) as usize] = *v;
    }

    let (first, filled) = fill_gaps(&grid).ok_or(TimeSeriesError::EmptySeries)?;
    TimeSeries::new(start + first as i64 * step, step, filled, channel)
}

/// Splits at holes longer than [`MAX_GAP_FILL`], interpolates the rest and
/// returns the longest contiguous segment with its start index.
fn fill_gaps(grid: &[Option<f64>]) -> Option<(usize, Vec<f64>)> {
    let mut segments: Vec<(usize, usize)> = Vec::new();
    let mut seg_start: Option<usize> = None;
    let mut last_valid = 0usize;
    for (i, v) in grid.iter().enumerate() {
        if v.is_none() {
            continue;
        }
        match seg_start {
            None => seg_start = Some(i),
            Some(s) => {
                if i - last_valid - 1 > MAX_GAP_FILL {
                    segments.push((s, last_valid));
                    seg_start = Some(i);
                }
            }
        }
        last_valid = i;
    }
    segments.push((seg_start?, last_valid));

    let (s, e) = segments
        .iter()
        .copied()
        .fold(None::<(usize, usize)>, |best, seg| match best {
            Some(b) if b.1 - b.0 >= seg.1 - seg.0 => Some(b),
            _ => Some(seg),
        })?;

    let mut out = Vec::with_capacity(e - s + 1);
    let mut prev = s;
    for i in s..=e {
        match grid[i] {
            Some(v) => {
                out.push(v);
                prev = i;
            }
            None => {
                let next = (i + 1..=e).find(|&j| grid[j].is_some()).unwrap_or(e);
                let (a, b) = (grid[prev].unwrap_or(0.0), grid[next].unwrap_or(0.0));
                let w = (i - prev) as f64 / (next - prev) as f64;
                out.push(a + (b - a) * w);
            }
        }
    }
    Some((s, out))
}

/// How coarse samples are derived when changing the sampling step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Aggregation {
    /// Linear interpolation at the new grid points.
    #[default]
    Sample,
    /// Mean of the source samples falling in each new step.
    Mean,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Sample => "sample",
            Aggregation::Mean => "mean",
        })
    }
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sample" | "linear" => Ok(Aggregation::Sample),
            "mean" | "average" => Ok(Aggregation::Mean),
            _ => Err(format!("unknown aggregation `{s}`")),
        }
    }
}

/// Linear interpolation onto a grid starting at the first sample.
pub fn resample(ts: &TimeSeries, new_step: i64) -> Result<TimeSeries> {
    if new_step <= 0 {
        return Err(TimeSeriesError::InvalidStep(new_step));
    }
    if ts.len() < 2 {
        return Err(TimeSeriesError::TooShort {
            needed: 2,
            len: ts.len(),
        });
    }
    if new_step == ts.step {
        return Ok(ts.clone());
    }
    let span = ts.end_epoch() - ts.start_epoch;
    let count = (span / new_step) as usize + 1;
    if count < 2 {
        return Err(TimeSeriesError::StepTooLarge { new_step });
    }
    let v = &ts.values;
    let out = (0..count)
        .map(|k| {
            let offset = k as i64 * new_step;
            let i = (offset / ts.step) as usize;
            let rem = offset - i as i64 * ts.step;
            if rem == 0 || i + 1 >= v.len() {
                v[i.min(v.len() - 1)]
            } else {
                let w = rem as f64 / ts.step as f64;
                v[i] + (v[i + 1] - v[i]) * w
            }
        })
        .collect();
    TimeSeries::new(ts.start_epoch, new_step, out, ts.channel)
}

/// Block-average onto a coarser grid; `new_step` must be a multiple of the
/// current step. A trailing partial block is averaged over what it has.
pub fn resample_mean(ts: &TimeSeries, new_step: i64) -> Result<TimeSeries> {
    if new_step <= 0 || new_step % ts.step != 0 {
        return Err(TimeSeriesError::InvalidStep(new_step));
    }
    let factor = (new_step / ts.step) as usize;
    let out: Vec<f64> = ts
        .values
        .chunks(factor)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    if out.len() < 2 && factor > 1 {
        return Err(TimeSeriesError::StepTooLarge { new_step });
    }
    TimeSeries::new(ts.start_epoch, new_step, out, ts.channel)
}

pub fn resample_with(ts: &TimeSeries, new_step: i64, how: Aggregation) -> Result<TimeSeries> {
    match how {
        Aggregation::Sample => resample(ts, new_step),
        Aggregation::Mean => resample_mean(ts, new_step),
    }
}

/// Affine rescale so that min maps to `lo` and max maps to `hi`.
pub fn normalize(ts: &TimeSeries, target: (f64, f64)) -> Result<(TimeSeries, ScaleParams)> {
    let (lo, hi) = target;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(TimeSeriesError::BadRange { lo, hi });
    }
    let (min, max) = ts
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if min == max {
        return Err(TimeSeriesError::ConstantSeries);
    }
    let params = ScaleParams {
        offset: min,
        gain: (hi - lo) / (max - min),
        target_range: target,
    };
    let values = ts
        .values
        .iter()
        .map(|&x| {
            // pin the extremes exactly
            if x == min {
                lo
            } else if x == max {
                hi
            } else {
                params.apply(x)
            }
        })
        .collect();
    Ok((ts.with_values(values)?, params))
}

/// Slow multi-day weather factor shared by all channels of one seed.
struct Weather {
    phases: [f64; 3],
}

impl Weather {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = rand_distr::Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
        Self {
            phases: [u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng)],
        }
    }

    /// Clear-sky amplitude factor, within 1 +/- 0.15.
    fn amplitude(&self, day: f64) -> f64 {
        use std::f64::consts::TAU;
        1.0 + 0.10 * (TAU * day / 6.7 + self.phases[0]).sin()
            + 0.05 * (TAU * day / 2.9 + self.phases[1]).sin()
    }

    fn wind_drift(&self, day: f64) -> f64 {
        (std::f64::consts::TAU * day / 4.3 + self.phases[2]).sin()
    }
}

fn channel_tag(channel: Channel) -> u64 {
    match channel {
        Channel::Irradiance => 0x1a2b,
        Channel::Temperature => 0x3c4d,
        Channel::Humidity => 0x5e6f,
        Channel::WindSpeed => 0x7a8b,
        Channel::Synthetic => 0x9c0d,
    }
}

/// Seeded synthetic series at 600 s over `days` days.
///
/// All channels of one seed share a slow weather factor, so they are
/// mutually consistent. Irradiance is a half-sine between 06:00 and 18:00
/// peaking near 1000 W/m2, scaled by the weather factor, with 3 %
/// multiplicative noise and clipped to the sensor range. Temperature and
/// humidity follow the sun with a three-hour lag; wind peaks mid-morning,
/// a quarter day ahead of temperature, on top of a multi-day drift. `Synthetic` is a clean unit sine with a
/// one-day period.
pub fn synth_meteo(days: usize, seed: u64, channel: Channel) -> Result<TimeSeries> {
    use std::f64::consts::TAU;
    if days == 0 {
        return Err(TimeSeriesError::EmptySeries);
    }
    let per_day = (SECONDS_PER_DAY / DEFAULT_STEP) as usize;
    let n = days * per_day;
    let weather = Weather::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (channel_tag(channel) << 32));
    let unit = Normal::new(0.0, 1.0).expect("valid normal");

    let values = (0..n)
        .map(|k| {
            let day = k as f64 / per_day as f64;
            let hour = 24.0 * day.fract();
            let amp = weather.amplitude(day);
            let eps = unit.sample(&mut rng);
            let lagged = (TAU * (hour - 9.0) / 24.0).sin();
            match channel {
                Channel::Irradiance => {
                    let clear = 1000.0 * (TAU * (hour - 6.0) / 24.0).sin().max(0.0);
                    (amp * clear * (1.0 + 0.03 * eps)).clamp(0.0, 1400.0)
                }
                Channel::Temperature => {
                    14.0 + 10.0 * (amp - 1.0) + 6.0 * amp * lagged + 0.05 * eps
                }
                Channel::Humidity => {
                    (65.0 - 15.0 * lagged - 20.0 * (amp - 1.0) + 0.2 * eps).clamp(5.0, 100.0)
                }
                Channel::WindSpeed => {
                    let diurnal = (TAU * (hour - 3.0) / 24.0).sin();
                    (8.0 + 4.0 * diurnal + weather.wind_drift(day) + 0.1 * eps).max(0.0)
                }
                Channel::Synthetic => (TAU * day).sin(),
            }
        })
        .collect();
    TimeSeries::new(SYNTH_START_EPOCH, DEFAULT_STEP, values, channel)
}

/// Writes `rows` as `header` CSV with LF endings.
pub(crate) fn write_rows(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    writeln!(f, "{}", header.join(","))?;
    for r in rows {
        writeln!(f, "{}", r.join(","))?;
    }
    f.flush()
}
