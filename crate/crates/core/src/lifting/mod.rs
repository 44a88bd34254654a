//! Second-generation wavelets by lifting: split, predict, update.
//!
//! Operators address their source sequence relative to the output index:
//! tap `i` of an operator with offset `o` reads `src[n + o + i]`. Reads
//! outside the sequence use half-sample symmetric reflection unless the
//! operator is [`EdgeRule::OneSided`].
//!
//! Odd-length signals put the trailing sample in the even half, so the
//! detail band is one shorter than the coarse band.

mod fit;
mod pyramid;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::filters::{reflect, FilterError};

pub use fit::{centered_offset, fit_predictor, interior_design, interpolating_weights, node_positions};
pub use pyramid::{
    lifting_forward, lifting_forward_batch, lifting_inverse, read_lifting_pyramid,
    write_lifting_pyramid, LiftingPyramid, StageBuilder,
};

#[derive(Debug, Error)]
pub enum LiftingError {
    #[error("need at least {needed} samples, got {len}")]
    TooShort { len: usize, needed: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("stage mismatch: {0}")]
    StageMismatch(String),
    #[error("design matrix has {rows} rows for {taps} taps")]
    RankDeficient { rows: usize, taps: usize },
    #[error("{constraints} polynomial constraints cannot be met with {taps} taps")]
    InfeasibleConstraints { taps: usize, constraints: usize },
    #[error("stage cannot be inverted: {0}")]
    NonInvertible(String),
    #[error("bad operator `{0}`")]
    BadOperator(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

pub type Result<T> = std::result::Result<T, LiftingError>;

/// Boundary handling for linear operators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeRule {
    /// Half-sample symmetric reflection.
    #[default]
    Reflect,
    /// Near the ends the tap window slides inside the sequence and the
    /// weights become the interpolating predictor for the shifted nodes,
    /// so polynomials up to degree `taps - 1` are still predicted exactly.
    /// Assumes predict geometry: the target lies halfway between source
    /// samples `n` and `n + 1`.
    OneSided,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LiftingOperator {
    Linear {
        coeffs: Vec<f64>,
        offset: isize,
        edge: EdgeRule,
    },
    /// Median of `taps` neighbours, optionally clamped. Nonlinear.
    Median {
        taps: usize,
        offset: isize,
        clamp: Option<(f64, f64)>,
    },
}

impl LiftingOperator {
    pub fn linear(coeffs: Vec<f64>, offset: isize) -> Self {
        LiftingOperator::Linear {
            coeffs,
            offset,
            edge: EdgeRule::Reflect,
        }
    }

    pub fn zero() -> Self {
        Self::linear(vec![0.0], 0)
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, LiftingOperator::Linear { .. })
    }

    pub fn taps(&self) -> usize {
        match self {
            LiftingOperator::Linear { coeffs, .. } => coeffs.len(),
            LiftingOperator::Median { taps, .. } => *taps,
        }
    }

    /// Operator output at index `n` reading from `src`.
    pub fn value_at(&self, src: &[f64], n: usize) -> f64 {
        let len = src.len();
        match self {
            LiftingOperator::Linear {
                coeffs,
                offset,
                edge,
            } => {
                let start = n as isize + offset;
                let taps = coeffs.len();
                if *edge == EdgeRule::OneSided && (start < 0 || start + taps as isize > len as isize)
                {
                    let width = taps.min(len);
                    let s = start.clamp(0, (len - width) as isize);
                    let nodes: Vec<f64> = (0..width)
                        .map(|i| (s + i as isize - n as isize) as f64 - 0.5)
                        .collect();
                    let w = interpolating_weights(&nodes);
                    return w
                        .iter()
                        .enumerate()
                        .map(|(i, wi)| wi * src[s as usize + i])
                        .sum();
                }
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * src[reflect(start + i as isize, len)])
                    .sum()
            }
            LiftingOperator::Median {
                taps,
                offset,
                clamp,
            } => {
                let start = n as isize + offset;
                let mut window: Vec<f64> = (0..*taps)
                    .map(|i| src[reflect(start + i as isize, len)])
                    .collect();
                window.sort_by(f64::total_cmp);
                let k = window.len();
                let m = if k % 2 == 1 {
                    window[k / 2]
                } else {
                    0.5 * (window[k / 2 - 1] + window[k / 2])
                };
                match clamp {
                    Some((lo, hi)) => m.clamp(*lo, *hi),
                    None => m,
                }
            }
        }
    }

    /// `out_len` outputs reading from `src`; an empty source gives zeros.
    pub fn apply(&self, src: &[f64], out_len: usize) -> Vec<f64> {
        if src.is_empty() {
            return vec![0.0; out_len];
        }
        (0..out_len).map(|n| self.value_at(src, n)).collect()
    }

    /// Dense `out_len x src_len` matrix of a linear operator.
    pub fn matrix(&self, src_len: usize, out_len: usize) -> Option<DMatrix<f64>> {
        if !self.is_linear() {
            return None;
        }
        let mut m = DMatrix::zeros(out_len, src_len);
        let mut unit = vec![0.0; src_len];
        for k in 0..src_len {
            unit[k] = 1.0;
            for (n, v) in self.apply(&unit, out_len).into_iter().enumerate() {
                m[(n, k)] = v;
            }
            unit[k] = 0.0;
        }
        Some(m)
    }
}

/// `linear@<offset>:<c0>,<c1>,..`, `linear1s@..` for one-sided edges, or
/// `median@<offset>:<taps>[:<lo>,<hi>]`. Coefficients round-trip exactly.
impl fmt::Display for LiftingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftingOperator::Linear {
                coeffs,
                offset,
                edge,
            } => {
                let kind = match edge {
                    EdgeRule::Reflect => "linear",
                    EdgeRule::OneSided => "linear1s",
                };
                let c: Vec<String> = coeffs.iter().map(|c| format!("{c:?}")).collect();
                write!(f, "{kind}@{offset}:{}", c.join(","))
            }
            LiftingOperator::Median {
                taps,
                offset,
                clamp,
            } => {
                write!(f, "median@{offset}:{taps}")?;
                if let Some((lo, hi)) = clamp {
                    write!(f, ":{lo:?},{hi:?}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for LiftingOperator {
    type Err = LiftingError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LiftingError::BadOperator(s.to_string());
        let (kind, rest) = s.trim().split_once('@').ok_or_else(bad)?;
        let mut parts = rest.split(':');
        let offset: isize = parts.next().and_then(|o| o.parse().ok()).ok_or_else(bad)?;
        let floats = |t: &str| -> Result<Vec<f64>> {
            t.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let op = match kind {
            "linear" | "linear1s" => {
                let coeffs = floats(parts.next().ok_or_else(bad)?)?;
                let edge = if kind == "linear" {
                    EdgeRule::Reflect
                } else {
                    EdgeRule::OneSided
                };
                LiftingOperator::Linear {
                    coeffs,
                    offset,
                    edge,
                }
            }
            "median" => {
                let taps: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                let clamp = match parts.next() {
                    Some(c) => match floats(c)?.as_slice() {
                        [lo, hi] => Some((*lo, *hi)),
                        _ => return Err(bad()),
                    },
                    None => None,
                };
                LiftingOperator::Median {
                    taps,
                    offset,
                    clamp,
                }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() || op.taps() == 0 {
            return Err(bad());
        }
        Ok(op)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StageOrder {
    #[default]
    PredictThenUpdate,
    UpdateThenPredict,
}

impl StageOrder {
    pub fn name(self) -> &'static str {
        match self {
            StageOrder::PredictThenUpdate => "predict_then_update",
            StageOrder::UpdateThenPredict => "update_then_predict",
        }
    }
}

impl FromStr for StageOrder {
    type Err = LiftingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predict_then_update" => Ok(StageOrder::PredictThenUpdate),
            "update_then_predict" => Ok(StageOrder::UpdateThenPredict),
            _ => Err(LiftingError::BadOperator(s.to_string())),
        }
    }
}

/// One split/predict/update stage.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingStage {
    pub order: StageOrder,
    pub predictor: LiftingOperator,
    pub updater: LiftingOperator,
    /// Polynomial orders the predictor suppresses.
    pub n_constraints: usize,
    /// Polynomial orders the updater preserves in the coarse band.
    pub n_tilde: usize,
}

impl LiftingStage {
    pub fn new(predictor: LiftingOperator, updater: LiftingOperator) -> Self {
        Self {
            order: StageOrder::PredictThenUpdate,
            predictor,
            updater,
            n_constraints: 0,
            n_tilde: 0,
        }
    }

    /// Unnormalized Haar: `d = odd - even`, `c = even + d/2`.
    pub fn haar() -> Self {
        Self {
            n_constraints: 1,
            n_tilde: 1,
            ..Self::new(
                LiftingOperator::linear(vec![1.0], 0),
                LiftingOperator::linear(vec![0.5], 0),
            )
        }
    }

    pub fn update_first(predictor: LiftingOperator, updater: LiftingOperator) -> Self {
        Self {
            order: StageOrder::UpdateThenPredict,
            ..Self::new(predictor, updater)
        }
    }
}

pub fn split(x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() < 2 {
        return Err(LiftingError::TooShort {
            len: x.len(),
            needed: 2,
        });
    }
    let even = x.iter().step_by(2).copied().collect();
    let odd = x.iter().skip(1).step_by(2).copied().collect();
    Ok((even, odd))
}

/// Interleaves `even` and `odd`; `even` may be one longer.
pub fn merge(even: &[f64], odd: &[f64]) -> Result<Vec<f64>> {
    if odd.len() > even.len() || even.len() > odd.len() + 1 {
        return Err(LiftingError::LengthMismatch(format!(
            "{} even vs {} odd samples",
            even.len(),
            odd.len()
        )));
    }
    let mut x = Vec::with_capacity(even.len() + odd.len());
    for (i, e) in even.iter().enumerate() {
        x.push(*e);
        if let Some(o) = odd.get(i) {
            x.push(*o);
        }
    }
    Ok(x)
}

/// `d[n] = odd[n] - P(even)[n]`.
pub fn predict_step(x_odd: &[f64], x_even: &[f64], stage: &LiftingStage) -> Result<Vec<f64>> {
    if x_odd.is_empty() || x_even.is_empty() {
        return Err(LiftingError::EmptyInput);
    }
    let p = stage.predictor.apply(x_even, x_odd.len());
    Ok(x_odd.iter().zip(p).map(|(o, p)| o - p).collect())
}

/// `c[n] = even[n] + U(d)[n]`.
pub fn update_step(x_even: &[f64], d: &[f64], stage: &LiftingStage) -> Result<Vec<f64>> {
    if d.is_empty() || d.len() > x_even.len() || d.len() + 1 < x_even.len() {
        return Err(LiftingError::LengthMismatch(format!(
            "{} even samples vs {} details",
            x_even.len(),
            d.len()
        )));
    }
    let u = stage.updater.apply(d, x_even.len());
    Ok(x_even.iter().zip(u).map(|(e, u)| e + u).collect())
}

/// Update first, then predict from the even samples:
/// `c = even + U(odd)`, `d = c - P(even)`. `d` has the length of `c`.
pub fn update_first_stage(
    x_even: &[f64],
    x_odd: &[f64],
    stage: &LiftingStage,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if stage.order != StageOrder::UpdateThenPredict {
        return Err(LiftingError::StageMismatch(
            "stage is not update_then_predict".into(),
        ));
    }
    if x_even.is_empty() || x_odd.is_empty() {
        return Err(LiftingError::EmptyInput);
    }
    if x_odd.len() > x_even.len() || x_odd.len() + 1 < x_even.len() {
        return Err(LiftingError::LengthMismatch(format!(
            "{} even vs {} odd samples",
            x_even.len(),
            x_odd.len()
        )));
    }
    let u = stage.updater.apply(x_odd, x_even.len());
    let c: Vec<f64> = x_even.iter().zip(u).map(|(e, u)| e + u).collect();
    let p = stage.predictor.apply(x_even, x_even.len());
    let d = c.iter().zip(p).map(|(c, p)| c - p).collect();
    Ok((c, d))
}

/// One forward stage on `x`: split, then lift in the stage's order.
pub fn forward_stage(x: &[f64], stage: &LiftingStage) -> Result<(Vec<f64>, Vec<f64>)> {
    let (even, odd) = split(x)?;
    match stage.order {
        StageOrder::PredictThenUpdate => {
            let d = predict_step(&odd, &even, stage)?;
            let c = update_step(&even, &d, stage)?;
            Ok((c, d))
        }
        StageOrder::UpdateThenPredict => update_first_stage(&even, &odd, stage),
    }
}

/// Length of the coarse band produced from `len` samples.
pub fn coarse_len(len: usize) -> usize {
    len.div_ceil(2)
}

/// Length of the detail band produced from `len` samples.
pub fn detail_len(len: usize, order: StageOrder) -> usize {
    match order {
        StageOrder::PredictThenUpdate => len / 2,
        StageOrder::UpdateThenPredict => len.div_ceil(2),
    }
}

/// Rebuilds the `len` samples that `stage` turned into `(c, d)`.
///
/// Predict-then-update stages invert by running the steps backwards, which
/// works for any operator. Update-first stages only keep `P(even)` and
/// `U(odd)`, so both linear operators must be invertible; they are undone by
/// linear solves.
pub fn inverse_stage(c: &[f64], d: &[f64], stage: &LiftingStage, len: usize) -> Result<Vec<f64>> {
    if c.len() != coarse_len(len) || d.len() != detail_len(len, stage.order) {
        return Err(LiftingError::StageMismatch(format!(
            "bands of length {}/{} do not match a {len}-sample {} stage",
            c.len(),
            d.len(),
            stage.order.name()
        )));
    }
    match stage.order {
        StageOrder::PredictThenUpdate => {
            if d.is_empty() {
                return Err(LiftingError::EmptyInput);
            }
            let u = stage.updater.apply(d, c.len());
            let even: Vec<f64> = c.iter().zip(u).map(|(c, u)| c - u).collect();
            let p = stage.predictor.apply(&even, d.len());
            let odd: Vec<f64> = d.iter().zip(p).map(|(d, p)| d + p).collect();
            merge(&even, &odd)
        }
        StageOrder::UpdateThenPredict => {
            let ne = c.len();
            let no = len / 2;
            let pm = stage
                .predictor
                .matrix(ne, ne)
                .ok_or_else(|| LiftingError::NonInvertible("nonlinear predictor".into()))?;
            let um = stage
                .updater
                .matrix(no, ne)
                .ok_or_else(|| LiftingError::NonInvertible("nonlinear updater".into()))?;
            // P(even) = c - d
            let rhs = nalgebra::DVector::from_iterator(ne, c.iter().zip(d).map(|(c, d)| c - d));
            let even = solve_full_rank(pm, rhs, "predictor")?;
            // U(odd) = c - even
            let rhs = nalgebra::DVector::from_iterator(ne, c.iter().zip(&even).map(|(c, e)| c - e));
            let odd = solve_full_rank(um, rhs, "updater")?;
            merge(&even, &odd)
        }
    }
}

fn solve_full_rank(
    m: DMatrix<f64>,
    rhs: nalgebra::DVector<f64>,
    what: &str,
) -> Result<Vec<f64>> {
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(LiftingError::NonInvertible(format!("singular {what}")));
    }
    let x = svd
        .solve(&rhs, 0.0)
        .map_err(|e| LiftingError::NonInvertible(e.to_string()))?;
    Ok(x.iter().copied().collect())
}
