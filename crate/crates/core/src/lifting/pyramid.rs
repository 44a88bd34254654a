use std::path::Path;

use crate::exec::Execution;
use crate::filters::{self, FilterError};
use crate::kv::KeyValues;

use super::{
    centered_offset, coarse_len, detail_len, fit_predictor, forward_stage, interior_design,
    inverse_stage, split, EdgeRule, LiftingError, LiftingOperator, LiftingStage, Result,
    StageOrder,
};

/// How the stage for each level is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum StageBuilder {
    FixedHaar,
    Fixed(LiftingStage),
    /// Refits a predictor of up to `max_taps` taps on every level's own
    /// samples, reproducing polynomials of degree `< n_constraints`, and
    /// follows it with the update `c[n] = even[n] + (d[n-1] + d[n]) / 4`.
    /// Short coarse levels fall back to fewer taps.
    Adaptive {
        max_taps: usize,
        n_constraints: usize,
    },
}

impl StageBuilder {
    pub fn build(&self, x: &[f64]) -> Result<LiftingStage> {
        match self {
            StageBuilder::FixedHaar => Ok(LiftingStage::haar()),
            StageBuilder::Fixed(stage) => Ok(stage.clone()),
            StageBuilder::Adaptive {
                max_taps,
                n_constraints,
            } => adaptive_stage(x, *max_taps, *n_constraints),
        }
    }
}

fn adaptive_stage(x: &[f64], max_taps: usize, n_constraints: usize) -> Result<LiftingStage> {
    if max_taps < n_constraints || max_taps == 0 {
        return Err(LiftingError::InfeasibleConstraints {
            taps: max_taps,
            constraints: n_constraints,
        });
    }
    let (even, odd) = split(x)?;
    for taps in (1..=max_taps).rev() {
        let offset = centered_offset(taps);
        let (design, target) = interior_design(&even, &odd, taps, offset);
        if design.nrows() < taps {
            continue;
        }
        let n = n_constraints.min(taps);
        let coeffs = fit_predictor(&target, &design, n, offset)?;
        return Ok(LiftingStage {
            order: StageOrder::PredictThenUpdate,
            predictor: LiftingOperator::Linear {
                coeffs,
                offset,
                edge: EdgeRule::OneSided,
            },
            updater: LiftingOperator::linear(vec![0.25, 0.25], -1),
            n_constraints: n,
            n_tilde: 1,
        });
    }
    Err(LiftingError::RankDeficient {
        rows: odd.len(),
        taps: 1,
    })
}

/// Coarse band `c^J`, details `d^1..d^J` (finest first) and the stages
/// needed to invert them.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingPyramid {
    pub original_length: usize,
    pub residue: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub stages: Vec<LiftingStage>,
}

impl LiftingPyramid {
    pub fn levels(&self) -> usize {
        self.stages.len()
    }

    /// Signal length entering each level, `[n, n_1, .., n_J]`.
    pub fn level_lengths(&self) -> Vec<usize> {
        let mut lens = vec![self.original_length];
        for _ in 0..self.levels() {
            lens.push(coarse_len(*lens.last().expect("non-empty")));
        }
        lens
    }

    fn check_shape(&self) -> Result<()> {
        let lens = self.level_lengths();
        let j = self.levels();
        let bad = |what: String| LiftingError::StageMismatch(what);
        if self.details.len() != j {
            return Err(bad(format!("{} detail bands for {j} stages", self.details.len())));
        }
        if self.residue.len() != lens[j] {
            return Err(bad(format!("residue length {}", self.residue.len())));
        }
        for (i, (d, st)) in self.details.iter().zip(&self.stages).enumerate() {
            if d.len() != detail_len(lens[i], st.order) {
                return Err(bad(format!("d{} length {}", i + 1, d.len())));
            }
        }
        Ok(())
    }

    pub fn detail_energy(&self) -> f64 {
        self.details.iter().flatten().map(|v| v * v).sum()
    }
}

pub fn lifting_forward(x: &[f64], levels: usize, builder: &StageBuilder) -> Result<LiftingPyramid> {
    if levels == 0 {
        return Err(FilterError::BadLevels.into());
    }
    if levels >= usize::BITS as usize || x.len() < 1usize << levels {
        return Err(LiftingError::TooShort {
            len: x.len(),
            needed: 1usize.checked_shl(levels as u32).unwrap_or(usize::MAX),
        });
    }
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    let mut stages = Vec::with_capacity(levels);
    for _ in 0..levels {
        let stage = builder.build(&approx)?;
        let (c, d) = forward_stage(&approx, &stage)?;
        details.push(d);
        stages.push(stage);
        approx = c;
    }
    Ok(LiftingPyramid {
        original_length: x.len(),
        residue: approx,
        details,
        stages,
    })
}

pub fn lifting_inverse(p: &LiftingPyramid) -> Result<Vec<f64>> {
    p.check_shape()?;
    let lens = p.level_lengths();
    let mut approx = p.residue.clone();
    for j in (0..p.levels()).rev() {
        approx = inverse_stage(&approx, &p.details[j], &p.stages[j], lens[j])?;
    }
    Ok(approx)
}

/// [`lifting_forward`] over independent signals.
pub fn lifting_forward_batch(
    signals: &[Vec<f64>],
    levels: usize,
    builder: &StageBuilder,
    exec: Execution,
) -> Vec<Result<LiftingPyramid>> {
    exec.map(signals, |x| lifting_forward(x, levels, builder))
}

/// Same layout as the filter-bank export, with `transform=lifting` and one
/// `stage=` line per level:
/// `<level>;<order>;<n_constraints>;<n_tilde>;<predictor>;<updater>`.
pub fn write_lifting_pyramid(p: &LiftingPyramid, dir: impl AsRef<Path>) -> Result<()> {
    p.check_shape()?;
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(FilterError::from)?;
    let mut kv = KeyValues::new();
    kv.push("format", filters::MANIFEST_FORMAT)
        .push("version", filters::MANIFEST_VERSION)
        .push("transform", "lifting")
        .push("levels", p.levels())
        .push("boundary_mode", "symmetric")
        .push("original_length", p.original_length);
    let j = p.levels();
    let bands = std::iter::once((format!("a{j}"), &p.residue))
        .chain(p.details.iter().enumerate().map(|(i, d)| (format!("d{}", i + 1), d)));
    for (name, values) in bands {
        let file = format!("{name}.csv");
        filters::write_band_csv(&dir.join(&file), values).map_err(FilterError::from)?;
        kv.push("band", format!("{name}:{file}:{}", values.len()));
    }
    for (i, st) in p.stages.iter().enumerate() {
        kv.push(
            "stage",
            format!(
                "{};{};{};{};{};{}",
                i + 1,
                st.order.name(),
                st.n_constraints,
                st.n_tilde,
                st.predictor,
                st.updater
            ),
        );
    }
    kv.write(dir.join(filters::MANIFEST_FILE))
        .map_err(FilterError::from)?;
    Ok(())
}

pub fn read_lifting_pyramid(dir: impl AsRef<Path>) -> Result<LiftingPyramid> {
    let (kv, residue, details) = filters::read_bands(dir.as_ref())?;
    if kv.get("transform") != Some("lifting") {
        return Err(FilterError::Manifest("not a lifting pyramid".into()).into());
    }
    let levels = details.len();
    let mut stages: Vec<Option<LiftingStage>> = vec![None; levels];
    for line in kv.get_all("stage") {
        let bad = || FilterError::Manifest(format!("bad stage line `{line}`"));
        let f: Vec<&str> = line.split(';').collect();
        let [level, order, n_constraints, n_tilde, pred, upd] = f.as_slice() else {
            return Err(bad().into());
        };
        let level: usize = level.parse().map_err(|_| bad())?;
        if level == 0 || level > levels {
            return Err(bad().into());
        }
        stages[level - 1] = Some(LiftingStage {
            order: order.parse()?,
            predictor: pred.parse()?,
            updater: upd.parse()?,
            n_constraints: n_constraints.parse().map_err(|_| bad())?,
            n_tilde: n_tilde.parse().map_err(|_| bad())?,
        });
    }
    let stages = stages
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| FilterError::Manifest(format!("stage {} missing", i + 1))))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let p = LiftingPyramid {
        original_length: filters::parse_field(&kv, "original_length")?,
        residue,
        details,
        stages,
    };
    p.check_shape()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{dwt, filter_bank, Family};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_haar_has_no_detail() {
        let p = lifting_forward(&[3.0; 64], 3, &StageBuilder::FixedHaar).unwrap();
        assert!(p.details.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(p.residue, [3.0; 8]);
    }

    #[test]
    fn haar_matches_filter_bank_after_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let fb = filter_bank(Family::Haar);
        for _ in 0..10 {
            let x = random(&mut rng, 256);
            let lp = lifting_forward(&x, 5, &StageBuilder::FixedHaar).unwrap();
            let fp = dwt(&x, &fb, 5).unwrap();
            for j in 1..=5 {
                let s = 2f64.powf((j as f64 - 2.0) / 2.0);
                let scaled: Vec<f64> = lp.details[j - 1].iter().map(|d| -s * d).collect();
                assert!(max_err(&scaled, &fp.details[j - 1]) < 1e-12);
            }
            let s = 2f64.powf(2.5);
            let scaled: Vec<f64> = lp.residue.iter().map(|c| s * c).collect();
            assert!(max_err(&scaled, &fp.residue) < 1e-12);
        }
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let builders = [
            StageBuilder::FixedHaar,
            StageBuilder::Adaptive {
                max_taps: 4,
                n_constraints: 2,
            },
            StageBuilder::Fixed(LiftingStage::new(
                LiftingOperator::Median {
                    taps: 3,
                    offset: -1,
                    clamp: Some((-0.5, 0.5)),
                },
                LiftingOperator::linear(vec![0.25, 0.25], -1),
            )),
        ];
        for b in &builders {
            for n in [8usize, 37, 100, 256] {
                let x = random(&mut rng, n);
                let p = lifting_forward(&x, 3, b).unwrap();
                assert!(max_err(&lifting_inverse(&p).unwrap(), &x) < 1e-11, "{b:?} n={n}");
            }
        }
    }

    #[test]
    fn adaptive_beats_haar_on_piecewise_linear() {
        let x: Vec<f64> = (0..256)
            .map(|k| {
                let t = k as f64;
                if k < 100 {
                    0.5 * t
                } else if k < 180 {
                    50.0 - 0.8 * (t - 100.0)
                } else {
                    -14.0 + 0.3 * (t - 180.0)
                }
            })
            .collect();
        let haar = lifting_forward(&x, 4, &StageBuilder::FixedHaar).unwrap();
        let adapt = lifting_forward(
            &x,
            4,
            &StageBuilder::Adaptive {
                max_taps: 4,
                n_constraints: 2,
            },
        )
        .unwrap();
        assert!(adapt.detail_energy() <= haar.detail_energy());
        assert!(adapt.detail_energy() < 0.1 * haar.detail_energy());
    }

    #[test]
    fn adaptive_shrinks_taps_on_short_levels() {
        let x: Vec<f64> = (0..16).map(|k| (k as f64).sin()).collect();
        let p = lifting_forward(
            &x,
            4,
            &StageBuilder::Adaptive {
                max_taps: 4,
                n_constraints: 3,
            },
        )
        .unwrap();
        let taps: Vec<usize> = p.stages.iter().map(|s| s.predictor.taps()).collect();
        assert_eq!(taps[0], 4);
        assert_eq!(*taps.last().unwrap(), 1);
        assert!(p.stages.iter().all(|s| s.n_constraints <= s.predictor.taps()));
        assert!(max_err(&lifting_inverse(&p).unwrap(), &x) < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            lifting_forward(&[1.0; 7], 3, &StageBuilder::FixedHaar),
            Err(LiftingError::TooShort { .. })
        ));
        assert!(lifting_forward(&[1.0; 8], 0, &StageBuilder::FixedHaar).is_err());
        let mut p = lifting_forward(&[1.0; 16], 2, &StageBuilder::FixedHaar).unwrap();
        p.details[0].pop();
        assert!(lifting_inverse(&p).is_err());
    }

    #[test]
    fn export_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random(&mut rng, 123);
        let p = lifting_forward(
            &x,
            4,
            &StageBuilder::Adaptive {
                max_taps: 4,
                n_constraints: 2,
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_lifting_pyramid(&p, dir.path()).unwrap();
        let back = read_lifting_pyramid(dir.path()).unwrap();
        assert_eq!(back, p);
        assert_eq!(lifting_inverse(&back).unwrap(), lifting_inverse(&p).unwrap());
        assert!(filters::read_pyramid(dir.path()).is_err());
    }

    #[test]
    fn batch_matches_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sigs: Vec<Vec<f64>> = (0..6).map(|_| random(&mut rng, 64)).collect();
        let b = StageBuilder::Adaptive {
            max_taps: 4,
            n_constraints: 2,
        };
        let seq = lifting_forward_batch(&sigs, 3, &b, Execution::Sequential);
        let par = lifting_forward_batch(&sigs, 3, &b, Execution::Parallel);
        for (s, p) in seq.iter().zip(&par) {
            assert_eq!(s.as_ref().unwrap(), p.as_ref().unwrap());
        }
    }
}
