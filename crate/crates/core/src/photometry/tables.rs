use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use super::spd::{GRID_END_NM, GRID_LEN, GRID_START_NM};
use crate::error::{Error, Result};

/// Overrides the directory holding `cie_cmf_1931.csv` and `tcs_reflectance.csv`.
pub const DATA_DIR_ENV: &str = "VLCSIM_DATA_DIR";
pub const TCS_COUNT: usize = 14;

const CMF_FILE: &str = "cie_cmf_1931.csv";
const TCS_FILE: &str = "tcs_reflectance.csv";
const CMF_CSV: &str = include_str!("../../data/cie_cmf_1931.csv");
const TCS_CSV: &str = include_str!("../../data/tcs_reflectance.csv");

/// CIE 1931 2° colour matching functions and the 14 CIE 13.3 test colour
/// samples, resampled onto the shared grid.
#[derive(Debug)]
pub struct CieTables {
    pub(crate) x_bar: Vec<f64>,
    pub(crate) y_bar: Vec<f64>,
    pub(crate) z_bar: Vec<f64>,
    pub(crate) tcs: Vec<Vec<f64>>,
    pub(crate) locus: OnceLock<Vec<(f64, f64, f64)>>,
}

impl CieTables {
    /// Tables compiled into the binary.
    pub fn standard() -> &'static CieTables {
        static TABLES: OnceLock<CieTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            Self::parse(CMF_CSV, TCS_CSV).expect("bundled CIE tables are well formed")
        })
    }

    /// Reads both CSV files from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name))
                .map_err(|e| Error::Data(format!("{}: {e}", dir.join(name).display())))
        };
        Self::parse(&read(CMF_FILE)?, &read(TCS_FILE)?)
    }

    /// Directory named by `VLCSIM_DATA_DIR`, if set.
    pub fn env_dir() -> Option<PathBuf> {
        std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
    }

    /// Tables from `VLCSIM_DATA_DIR` when set, otherwise the bundled copy.
    pub fn from_env() -> Result<std::borrow::Cow<'static, CieTables>> {
        match Self::env_dir() {
            Some(dir) => Ok(std::borrow::Cow::Owned(Self::from_dir(dir)?)),
            None => Ok(std::borrow::Cow::Borrowed(Self::standard())),
        }
    }

    pub fn parse(cmf_csv: &str, tcs_csv: &str) -> Result<Self> {
        let (cmf_grid, cmf_cols) = read_columns(cmf_csv, CMF_FILE, 3)?;
        if cmf_grid.len() != GRID_LEN
            || cmf_grid
                .iter()
                .enumerate()
                .any(|(i, &l)| (l - (GRID_START_NM + i as f64)).abs() > 1e-9)
        {
            return Err(Error::Data(format!(
                "{CMF_FILE}: wavelengths must run 380..=780 nm in 1 nm steps"
            )));
        }
        let (tcs_grid, tcs_cols) = read_columns(tcs_csv, TCS_FILE, TCS_COUNT)?;
        if tcs_grid.first().copied().unwrap_or(f64::MAX) > GRID_START_NM
            || tcs_grid.last().copied().unwrap_or(f64::MIN) < GRID_END_NM
            || tcs_grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::Data(format!(
                "{TCS_FILE}: wavelengths must increase and cover 380-780 nm"
            )));
        }
        if tcs_cols.iter().flatten().any(|&r| r > 1.5) {
            return Err(Error::Data(format!("{TCS_FILE}: reflectance above 1.5")));
        }
        let tcs = tcs_cols
            .iter()
            .map(|col| resample(&tcs_grid, col))
            .collect();
        let mut cmf = cmf_cols.into_iter();
        Ok(Self {
            x_bar: cmf.next().unwrap(),
            y_bar: cmf.next().unwrap(),
            z_bar: cmf.next().unwrap(),
            tcs,
            locus: OnceLock::new(),
        })
    }

    /// Photopic luminosity function `V(λ) = ȳ(λ)`.
    pub fn luminosity(&self) -> &[f64] {
        &self.y_bar
    }

    /// Reflectance of test colour sample `i` (0-based) on the grid.
    pub fn tcs(&self, i: usize) -> &[f64] {
        &self.tcs[i]
    }
}

impl Clone for CieTables {
    fn clone(&self) -> Self {
        Self {
            x_bar: self.x_bar.clone(),
            y_bar: self.y_bar.clone(),
            z_bar: self.z_bar.clone(),
            tcs: self.tcs.clone(),
            locus: OnceLock::new(),
        }
    }
}

fn read_columns(text: &str, name: &str, columns: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut grid = Vec::new();
    let mut cols = vec![Vec::new(); columns];
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(format!("{name}: {e}")))?;
        if rec.len() != columns + 1 {
            return Err(Error::Data(format!(
                "{name}: row {} has {} fields, expected {}",
                line + 2,
                rec.len(),
                columns + 1
            )));
        }
        let mut values = rec.iter().map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| Error::Data(format!("{name}: row {}: bad value '{f}'", line + 2)))
        });
        grid.push(values.next().unwrap()?);
        for col in cols.iter_mut() {
            col.push(values.next().unwrap()?);
        }
    }
    Ok((grid, cols))
}

/// Linear interpolation of `(grid, values)` onto the 1 nm grid.
fn resample(grid: &[f64], values: &[f64]) -> Vec<f64> {
    (0..GRID_LEN)
        .map(|i| {
            let l = GRID_START_NM + i as f64;
            let j = grid.partition_point(|&g| g <= l).clamp(1, grid.len() - 1);
            let (l0, l1) = (grid[j - 1], grid[j]);
            let f = (l - l0) / (l1 - l0);
            values[j - 1] * (1.0 - f) + values[j] * f
        })
        .collect()
}
