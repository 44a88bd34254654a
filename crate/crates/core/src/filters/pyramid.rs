use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{BoundaryMode, Family, FilterError, Result};
use crate::kv::KeyValues;

pub(crate) const MANIFEST_FILE: &str = "manifest.txt";
pub(crate) const MANIFEST_FORMAT: &str = "wrnn-pyramid";
pub(crate) const MANIFEST_VERSION: &str = "1";

/// A named band of a `J`-level pyramid: the residue `aJ` or a detail `dj`,
/// `d1` being the finest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Band {
    Approx(usize),
    Detail(usize),
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Band::Approx(j) => write!(f, "a{j}"),
            Band::Detail(j) => write!(f, "d{j}"),
        }
    }
}

impl FromStr for Band {
    type Err = FilterError;

    /// Accepts `a9`, `a_9`, `d1`, `d_1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || FilterError::UnknownBand(s.to_string());
        let t = s.trim();
        let (kind, rest) = t.split_at(t.chars().next().map_or(0, char::len_utf8));
        let level: usize = rest
            .trim_start_matches('_')
            .parse()
            .map_err(|_| bad())?;
        if level == 0 {
            return Err(bad());
        }
        match kind {
            "a" | "A" => Ok(Band::Approx(level)),
            "d" | "D" => Ok(Band::Detail(level)),
            _ => Err(bad()),
        }
    }
}

/// Multilevel filter-bank decomposition: residue `a_J` plus details
/// `d_1..d_J` (finest first).
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPyramid {
    pub family: Family,
    pub boundary_mode: BoundaryMode,
    pub original_length: usize,
    pub residue: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl CoefficientPyramid {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Approximation lengths per level, `[n, n_1, .., n_J]`.
    pub fn level_lengths(&self, filter_len: usize) -> Vec<usize> {
        let mut lens = vec![self.original_length];
        for _ in 0..self.levels() {
            let last = *lens.last().expect("non-empty");
            lens.push(self.boundary_mode.next_len(last, filter_len));
        }
        lens
    }

    pub(crate) fn check_shape(&self, lens: &[usize]) -> Result<()> {
        let j = self.levels();
        if j == 0 {
            return Err(FilterError::InconsistentPyramid("no levels".into()));
        }
        if self.residue.len() != lens[j] {
            return Err(FilterError::InconsistentPyramid(format!(
                "residue has {} coefficients, expected {}",
                self.residue.len(),
                lens[j]
            )));
        }
        for (i, d) in self.details.iter().enumerate() {
            if d.len() != lens[i + 1] {
                return Err(FilterError::InconsistentPyramid(format!(
                    "d{} has {} coefficients, expected {}",
                    i + 1,
                    d.len(),
                    lens[i + 1]
                )));
            }
        }
        Ok(())
    }

    /// Every band present in this pyramid, residue first.
    pub fn bands(&self) -> Vec<Band> {
        let j = self.levels();
        std::iter::once(Band::Approx(j))
            .chain((1..=j).map(Band::Detail))
            .collect()
    }

    pub fn band(&self, band: Band) -> Option<&[f64]> {
        match band {
            Band::Approx(j) if j == self.levels() => Some(&self.residue),
            Band::Detail(j) if (1..=self.levels()).contains(&j) => Some(&self.details[j - 1]),
            _ => None,
        }
    }

    fn band_mut(&mut self, band: Band) -> Option<&mut Vec<f64>> {
        match band {
            Band::Approx(j) if j == self.levels() => Some(&mut self.residue),
            Band::Detail(j) if (1..=self.levels()).contains(&j) => Some(&mut self.details[j - 1]),
            _ => None,
        }
    }

    /// All coefficients, residue first.
    pub fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        self.residue
            .iter()
            .chain(self.details.iter().flatten())
            .copied()
    }
}

/// Zeroes every band not listed in `keep`; kept bands are copied unchanged.
pub fn threshold_bands(p: &CoefficientPyramid, keep: &[Band]) -> Result<CoefficientPyramid> {
    if let Some(b) = keep.iter().find(|b| p.band(**b).is_none()) {
        return Err(FilterError::UnknownBand(b.to_string()));
    }
    let mut out = p.clone();
    for band in p.bands() {
        if !keep.contains(&band) {
            out.band_mut(band)
                .expect("band listed by pyramid")
                .iter_mut()
                .for_each(|v| *v = 0.0);
        }
    }
    Ok(out)
}

pub(crate) fn write_band_csv(path: &Path, values: &[f64]) -> std::io::Result<()> {
    crate::timeseries::write_rows(
        path,
        &["index", "value"],
        values
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), format!("{v:?}")]),
    )
}

pub(crate) fn read_band_csv(path: &Path) -> Result<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let v = rec
            .get(1)
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| {
                FilterError::Manifest(format!("{}: bad value at row {}", path.display(), i + 1))
            })?;
        out.push(v);
    }
    Ok(out)
}

/// Writes `manifest.txt` plus one `<band>.csv` per band into `dir`.
pub fn write_pyramid(p: &CoefficientPyramid, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut kv = header(p, "dwt");
    for band in p.bands() {
        let values = p.band(band).expect("own band");
        let file = format!("{band}.csv");
        write_band_csv(&dir.join(&file), values)?;
        kv.push("band", format!("{band}:{file}:{}", values.len()));
    }
    kv.write(dir.join(MANIFEST_FILE))?;
    Ok(())
}

pub(crate) fn header(p: &CoefficientPyramid, transform: &str) -> KeyValues {
    let mut kv = KeyValues::new();
    kv.push("format", MANIFEST_FORMAT)
        .push("version", MANIFEST_VERSION)
        .push("transform", transform)
        .push("family", p.family)
        .push("levels", p.levels())
        .push("boundary_mode", p.boundary_mode.name())
        .push("original_length", p.original_length);
    kv
}

pub(crate) fn manifest_field<'a>(kv: &'a KeyValues, key: &str) -> Result<&'a str> {
    kv.get(key)
        .ok_or_else(|| FilterError::Manifest(format!("missing `{key}`")))
}

pub(crate) fn parse_field<T: FromStr>(kv: &KeyValues, key: &str) -> Result<T> {
    let raw = manifest_field(kv, key)?;
    raw.parse()
        .map_err(|_| FilterError::Manifest(format!("bad `{key}` value `{raw}`")))
}

/// Reads the bands listed in a manifest; returns the manifest alongside.
pub(crate) fn read_bands(dir: &Path) -> Result<(KeyValues, Vec<f64>, Vec<Vec<f64>>)> {
    let kv = KeyValues::read(dir.join(MANIFEST_FILE))?.map_err(FilterError::Manifest)?;
    if kv.get("format") != Some(MANIFEST_FORMAT) {
        return Err(FilterError::Manifest("not a wrnn-pyramid manifest".into()));
    }
    if kv.get("version") != Some(MANIFEST_VERSION) {
        return Err(FilterError::Manifest("unsupported manifest version".into()));
    }
    let levels: usize = parse_field(&kv, "levels")?;
    let mut residue = None;
    let mut details = vec![None; levels];
    for entry in kv.get_all("band") {
        let mut parts = entry.splitn(3, ':');
        let (name, file, len) = (parts.next(), parts.next(), parts.next());
        let (Some(name), Some(file), Some(len)) = (name, file, len) else {
            return Err(FilterError::Manifest(format!("bad band entry `{entry}`")));
        };
        let band: Band = name.parse()?;
        let values = read_band_csv(&dir.join(file))?;
        if len.parse::<usize>().ok() != Some(values.len()) {
            return Err(FilterError::InconsistentPyramid(format!(
                "{file} holds {} values, manifest says {len}",
                values.len()
            )));
        }
        match band {
            Band::Approx(j) if j == levels => residue = Some(values),
            Band::Detail(j) if (1..=levels).contains(&j) => details[j - 1] = Some(values),
            _ => return Err(FilterError::UnknownBand(name.to_string())),
        }
    }
    let residue = residue.ok_or_else(|| FilterError::Manifest("residue band missing".into()))?;
    let details = details
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| FilterError::Manifest(format!("d{} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((kv, residue, details))
}

pub fn read_pyramid(dir: impl AsRef<Path>) -> Result<CoefficientPyramid> {
    let dir = dir.as_ref();
    let (kv, residue, details) = read_bands(dir)?;
    if manifest_field(&kv, "transform")? != "dwt" {
        return Err(FilterError::Manifest("not a filter-bank pyramid".into()));
    }
    let p = CoefficientPyramid {
        family: parse_field(&kv, "family")?,
        boundary_mode: parse_field(&kv, "boundary_mode")?,
        original_length: parse_field(&kv, "original_length")?,
        residue,
        details,
    };
    let fb_len = super::filter_bank(p.family).len();
    p.check_shape(&p.level_lengths(fb_len))?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::super::{dwt, filter_bank, idwt};
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seeded(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn band_names() {
        assert_eq!("a9".parse::<Band>().unwrap(), Band::Approx(9));
        assert_eq!("d_2".parse::<Band>().unwrap(), Band::Detail(2));
        assert_eq!(Band::Detail(3).to_string(), "d3");
        assert!("x1".parse::<Band>().is_err());
        assert!("d0".parse::<Band>().is_err());
    }

    #[test]
    fn threshold_keep_all_is_identity() {
        let fb = filter_bank(Family::Db6);
        let p = dwt(&seeded(128, 1), &fb, 3).unwrap();
        assert_eq!(threshold_bands(&p, &p.bands()).unwrap(), p);
    }

    #[test]
    fn threshold_keep_none_reconstructs_zero() {
        let fb = filter_bank(Family::Bior3_7);
        let p = dwt(&seeded(128, 2), &fb, 3).unwrap();
        let z = threshold_bands(&p, &[]).unwrap();
        assert!(idwt(&z, &fb).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn threshold_residue_only_is_lowpass_projection() {
        let fb = filter_bank(Family::Db4);
        let x = seeded(256, 3);
        let p = dwt(&x, &fb, 3).unwrap();
        let kept = threshold_bands(&p, &[Band::Approx(3)]).unwrap();
        assert_eq!(kept.residue, p.residue);
        assert!(kept.details.iter().flatten().all(|&v| v == 0.0));
        let smooth = idwt(&kept, &fb).unwrap();

        // Oracle: same projection built by hand with zeroed detail bands.
        let mut manual = p.clone();
        manual.details.iter_mut().for_each(|d| d.fill(0.0));
        assert_eq!(smooth, idwt(&manual, &fb).unwrap());
        let ex: f64 = x.iter().map(|v| v * v).sum();
        let es: f64 = smooth.iter().map(|v| v * v).sum();
        assert!(es <= ex);
        // orthogonal projection: residual is orthogonal to the approximation
        let dot: f64 = smooth.iter().zip(&x).map(|(s, v)| s * (v - s)).sum();
        assert!(dot.abs() < 1e-10);
    }

    #[test]
    fn threshold_rejects_unknown_band() {
        let fb = filter_bank(Family::Db4);
        let p = dwt(&seeded(64, 4), &fb, 2).unwrap();
        assert!(matches!(
            threshold_bands(&p, &[Band::Detail(3)]),
            Err(FilterError::UnknownBand(_))
        ));
        assert!(threshold_bands(&p, &[Band::Approx(1)]).is_err());
    }

    #[test]
    fn export_round_trip() {
        let fb = filter_bank(Family::Bior3_7);
        let p = dwt(&seeded(200, 5), &fb, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_pyramid(&p, dir.path()).unwrap();
        let manifest = std::fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        assert!(manifest.contains("family=bior3.7"));
        assert!(manifest.contains("boundary_mode=symmetric"));
        assert!(manifest.contains("original_length=200"));
        assert!(dir.path().join("a4.csv").exists());
        assert_eq!(read_pyramid(dir.path()).unwrap(), p);
    }
}
