//! First-generation wavelet filter banks and the classical multilevel DWT.
//!
//! Filters use the orthonormal convention `Σ h = √2`. With the convention
//! `φ(x) = 2 Σ h_k φ(2x − k)` the same filters would sum to 1; only relative
//! quantities (RMS %, Γ) are reported downstream, so the factor never leaks.
//!
//! Analysis is a correlation, `a[n] = Σ_k h[k] x[2n + k + shift]`, and
//! synthesis the matching transposed convolution with `h_dual`/`g_dual`.

mod coeffs;
mod pyramid;
mod transform;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use pyramid::{read_pyramid, threshold_bands, write_pyramid, Band, CoefficientPyramid};
pub use transform::{analysis_step, dwt, dwt_batch, dwt_with, idwt, idwt_to_level, synthesis_step};
pub(crate) use pyramid::{parse_field, read_bands, write_band_csv, MANIFEST_FILE, MANIFEST_FORMAT, MANIFEST_VERSION};
pub(crate) use transform::reflect;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("unknown wavelet family `{0}`")]
    UnknownFamily(String),
    #[error("signal of length {len} too short for {levels} levels")]
    TooShort { len: usize, levels: usize },
    #[error("levels must be >= 1")]
    BadLevels,
    #[error("inconsistent pyramid: {0}")]
    InconsistentPyramid(String),
    #[error("unknown band `{0}`")]
    UnknownBand(String),
    #[error("malformed pyramid manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, FilterError>;

/// Wavelet families. The first nine are the ones compared by the sweep
/// style report; `Haar` is kept for lifting-equivalence checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Bior2_8,
    Bior3_7,
    Bior3_9,
    Coif2,
    Db4,
    Db6,
    Db8,
    Sym4,
    Sym7,
    Haar,
}

impl Family {
    pub const TABLE1: [Family; 9] = [
        Family::Bior2_8,
        Family::Bior3_7,
        Family::Bior3_9,
        Family::Coif2,
        Family::Db4,
        Family::Db6,
        Family::Db8,
        Family::Sym4,
        Family::Sym7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bior2_8 => "bior2.8",
            Family::Bior3_7 => "bior3.7",
            Family::Bior3_9 => "bior3.9",
            Family::Coif2 => "coif2",
            Family::Db4 => "db4",
            Family::Db6 => "db6",
            Family::Db8 => "db8",
            Family::Sym4 => "sym4",
            Family::Sym7 => "sym7",
            Family::Haar => "haar",
        }
    }

    pub fn is_orthogonal(self) -> bool {
        !matches!(self, Family::Bior2_8 | Family::Bior3_7 | Family::Bior3_9)
    }

    /// Vanishing moments of the analysis wavelet.
    pub fn vanishing_moments(self) -> usize {
        match self {
            Family::Haar => 1,
            Family::Bior2_8 => 2,
            Family::Bior3_7 | Family::Bior3_9 => 3,
            Family::Coif2 | Family::Db4 | Family::Sym4 => 4,
            Family::Db6 => 6,
            Family::Sym7 => 7,
            Family::Db8 => 8,
        }
    }

    /// Neuron count (2N) reported for this family in the reference table.
    pub fn table1_neurons(self) -> Option<usize> {
        match self {
            Family::Bior2_8 => Some(6),
            Family::Bior3_7 | Family::Bior3_9 => Some(10),
            Family::Db4 => Some(8),
            Family::Coif2 | Family::Db6 | Family::Db8 | Family::Sym4 | Family::Sym7 => Some(12),
            Family::Haar => None,
        }
    }

    /// Periodic for orthogonal families, symmetric for biorthogonal ones.
    pub fn default_boundary(self) -> BoundaryMode {
        if self.is_orthogonal() {
            BoundaryMode::Periodic
        } else {
            BoundaryMode::Symmetric
        }
    }

    fn raw(self) -> (&'static [f64], &'static [f64]) {
        use coeffs::*;
        match self {
            Family::Haar => (&HAAR_DEC_LO, &HAAR_REC_LO),
            Family::Bior2_8 => (&BIOR2_8_DEC_LO, &BIOR2_8_REC_LO),
            Family::Bior3_7 => (&BIOR3_7_DEC_LO, &BIOR3_7_REC_LO),
            Family::Bior3_9 => (&BIOR3_9_DEC_LO, &BIOR3_9_REC_LO),
            Family::Coif2 => (&COIF2_DEC_LO, &COIF2_REC_LO),
            Family::Db4 => (&DB4_DEC_LO, &DB4_REC_LO),
            Family::Db6 => (&DB6_DEC_LO, &DB6_REC_LO),
            Family::Db8 => (&DB8_DEC_LO, &DB8_REC_LO),
            Family::Sym4 => (&SYM4_DEC_LO, &SYM4_REC_LO),
            Family::Sym7 => (&SYM7_DEC_LO, &SYM7_REC_LO),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FilterError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Family::TABLE1
            .iter()
            .chain(std::iter::once(&Family::Haar))
            .copied()
            .find(|f| f.name() == key)
            .ok_or_else(|| FilterError::UnknownFamily(s.to_string()))
    }
}

/// Signal extension used at the borders by the filter-bank transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Wrap-around; odd lengths are padded by repeating the last sample.
    Periodic,
    /// Half-sample mirror; bands grow to `floor((n + L − 1) / 2)`.
    Symmetric,
}

impl BoundaryMode {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::Symmetric => "symmetric",
        }
    }

    /// Band length after one analysis step of a length-`n` signal.
    pub fn next_len(self, n: usize, filter_len: usize) -> usize {
        match self {
            BoundaryMode::Periodic => n.div_ceil(2),
            BoundaryMode::Symmetric => (n + filter_len - 1) / 2,
        }
    }
}

impl FromStr for BoundaryMode {
    type Err = FilterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(BoundaryMode::Periodic),
            "symmetric" => Ok(BoundaryMode::Symmetric),
            _ => Err(FilterError::Manifest(format!("unknown boundary mode `{s}`"))),
        }
    }
}

/// Analysis pair `(h, g)` and synthesis pair `(h_dual, g_dual)`.
///
/// All four filters share one length and index origin, so the
/// biorthogonality condition reads `Σ_k h[k] h_dual[k + 2l] = δ_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    pub family: Family,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub h_dual: Vec<f64>,
    pub g_dual: Vec<f64>,
    pub vanishing_moments: usize,
}

impl FilterBank {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

pub fn filter_bank(family: Family) -> FilterBank {
    let (dec_lo, rec_lo) = family.raw();
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    // pywt relations: dec_hi[k] = (-1)^(k+1) rec_lo[k], rec_hi[k] = (-1)^k dec_lo[k]
    let dec_hi: Vec<f64> = rec_lo.iter().enumerate().map(|(k, v)| -sign(k) * v).collect();
    let rec_hi: Vec<f64> = dec_lo.iter().enumerate().map(|(k, v)| sign(k) * v).collect();
    FilterBank {
        family,
        h: dec_lo.iter().rev().copied().collect(),
        g: dec_hi.into_iter().rev().collect(),
        h_dual: rec_lo.to_vec(),
        g_dual: rec_hi,
        vanishing_moments: family.vanishing_moments(),
    }
}

/// Parses a family name; `Family::from_str` with the name of the operation.
pub fn filter_bank_by_name(name: &str) -> Result<FilterBank> {
    Ok(filter_bank(name.parse()?))
}
