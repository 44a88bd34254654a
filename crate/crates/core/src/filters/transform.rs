use super::{BoundaryMode, CoefficientPyramid, FilterBank, FilterError, Result};
use crate::exec::Execution;

/// Half-sample symmetric reflection into `0..n`, repeated as often as needed.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period);
    if r < n as isize {
        r as usize
    } else {
        (period - 1 - r) as usize
    }
}

/// One analysis step: low-pass and high-pass bands, each decimated by two.
pub fn analysis_step(x: &[f64], fb: &FilterBank, mode: BoundaryMode) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let taps = fb.len();
    let m = mode.next_len(n, taps);
    let mut a = vec![0.0; m];
    let mut d = vec![0.0; m];
    match mode {
        BoundaryMode::Periodic => {
            let padded = 2 * m;
            let at = |i: usize| x[i.min(n - 1)];
            for o in 0..m {
                let (mut sa, mut sd) = (0.0, 0.0);
                for k in 0..taps {
                    let v = at((2 * o + k) % padded);
                    sa += fb.h[k] * v;
                    sd += fb.g[k] * v;
                }
                a[o] = sa;
                d[o] = sd;
            }
        }
        BoundaryMode::Symmetric => {
            let shift = 2 - taps as isize;
            for o in 0..m {
                let (mut sa, mut sd) = (0.0, 0.0);
                let base = 2 * o as isize + shift;
                for k in 0..taps {
                    let v = x[reflect(base + k as isize, n)];
                    sa += fb.h[k] * v;
                    sd += fb.g[k] * v;
                }
                a[o] = sa;
                d[o] = sd;
            }
        }
    }
    (a, d)
}

/// Inverse of [`analysis_step`] for a signal of length `n`.
pub fn synthesis_step(
    a: &[f64],
    d: &[f64],
    fb: &FilterBank,
    mode: BoundaryMode,
    n: usize,
) -> Result<Vec<f64>> {
    let taps = fb.len();
    let m = mode.next_len(n, taps);
    if a.len() != m || d.len() != m {
        return Err(FilterError::InconsistentPyramid(format!(
            "bands of length {}/{} cannot rebuild {n} samples (expected {m})",
            a.len(),
            d.len()
        )));
    }
    match mode {
        BoundaryMode::Periodic => {
            let padded = 2 * m;
            let mut x = vec![0.0; padded];
            for o in 0..m {
                for k in 0..taps {
                    x[(2 * o + k) % padded] += fb.h_dual[k] * a[o] + fb.g_dual[k] * d[o];
                }
            }
            x.truncate(n);
            Ok(x)
        }
        BoundaryMode::Symmetric => {
            let mut x = vec![0.0; n];
            for (i, xi) in x.iter_mut().enumerate() {
                // t = i + L - 2 - 2o must land in 0..L
                let top = i + taps - 2;
                let o_max = (top / 2).min(m - 1);
                let o_min = (top + 1).saturating_sub(taps).div_ceil(2);
                let mut s = 0.0;
                for o in o_min..=o_max {
                    let t = top - 2 * o;
                    s += fb.h_dual[t] * a[o] + fb.g_dual[t] * d[o];
                }
                *xi = s;
            }
            Ok(x)
        }
    }
}

/// Multilevel DWT with the family's default boundary mode.
pub fn dwt(x: &[f64], fb: &FilterBank, levels: usize) -> Result<CoefficientPyramid> {
    dwt_with(x, fb, levels, fb.family.default_boundary())
}

pub fn dwt_with(
    x: &[f64],
    fb: &FilterBank,
    levels: usize,
    mode: BoundaryMode,
) -> Result<CoefficientPyramid> {
    if levels == 0 {
        return Err(FilterError::BadLevels);
    }
    if levels >= usize::BITS as usize || x.len() < 1usize << levels {
        return Err(FilterError::TooShort {
            len: x.len(),
            levels,
        });
    }
    let mut details = Vec::with_capacity(levels);
    let mut approx = x.to_vec();
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, fb, mode);
        details.push(d);
        approx = a;
    }
    Ok(CoefficientPyramid {
        family: fb.family,
        boundary_mode: mode,
        original_length: x.len(),
        residue: approx,
        details,
    })
}

/// Rebuilds the level-`level` approximation band (`0` gives the signal).
pub fn idwt_to_level(p: &CoefficientPyramid, fb: &FilterBank, level: usize) -> Result<Vec<f64>> {
    if p.family != fb.family {
        return Err(FilterError::InconsistentPyramid(format!(
            "pyramid built with {} but filter bank is {}",
            p.family, fb.family
        )));
    }
    let lens = p.level_lengths(fb.len());
    p.check_shape(&lens)?;
    if level > p.levels() {
        return Err(FilterError::BadLevels);
    }
    let mut approx = p.residue.clone();
    for j in (level..p.levels()).rev() {
        approx = synthesis_step(&approx, &p.details[j], fb, p.boundary_mode, lens[j])?;
    }
    Ok(approx)
}

pub fn idwt(p: &CoefficientPyramid, fb: &FilterBank) -> Result<Vec<f64>> {
    idwt_to_level(p, fb, 0)
}

/// [`dwt`] over many independent signals.
pub fn dwt_batch(
    signals: &[Vec<f64>],
    fb: &FilterBank,
    levels: usize,
    exec: Execution,
) -> Vec<Result<CoefficientPyramid>> {
    exec.map(signals, |x| dwt(x, fb, levels))
}
