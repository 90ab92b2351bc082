//! JSON run configuration. Boundary units are nm, fs and mm.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{tau_grid, Arm, InterferometerConfig, InterferometerKind};
use crate::spatial::{
    SpatialAmplitude, SpatialGrid, DEFAULT_SPATIAL_HALF_WIDTH, DEFAULT_SPATIAL_POINTS,
};
use crate::spectral::{FrequencyGrid, SpectralDensity, DEFAULT_SPECTRAL_POINTS};
use crate::state::{
    angular_bandwidth, angular_frequency, SpatialSector, SpectralSector, TwoPhotonState,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pump: PumpConfig,
    pub filter: FilterConfig,
    pub interferometer: InterferometerSpec,
    pub scan: ScanConfig,
    #[serde(default)]
    pub engine: EngineChoice,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub wavelength_nm: f64,
    pub spatial_profile: SpatialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialProfile {
    Gaussian {
        waist_mm: f64,
    },
    Hg1 {
        waist_mm: f64,
    },
    ShiftedGaussian {
        waist_mm: f64,
        offset_mm: f64,
    },
    /// CSV rows `x_mm,re[,im]`; relative paths resolve against the config file.
    TabulatedFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterShape {
    Rectangular,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub center_nm: f64,
    /// Full width for the rectangle, FWHM for the Gaussian.
    pub bandwidth_nm: f64,
    pub shape: FilterShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerSpec {
    pub kind: InterferometerKind,
    #[serde(default = "arm_b")]
    pub delay_arm: Arm,
    #[serde(default = "arm_b")]
    pub flip_arm: Arm,
}

fn arm_b() -> Arm {
    Arm::B
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub tau_start_fs: f64,
    pub tau_stop_fs: f64,
    pub tau_step_fs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    #[default]
    Closed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub spatial_points: usize,
    pub spectral_points: usize,
    pub spatial_halfwidth_mm: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            spatial_points: DEFAULT_SPATIAL_POINTS,
            spectral_points: DEFAULT_SPECTRAL_POINTS,
            spatial_halfwidth_mm: DEFAULT_SPATIAL_HALF_WIDTH * 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn field(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{name}: {msg}"))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field(name, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Parses and validates. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; tabulated profile paths become relative to it.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if let SpatialProfile::TabulatedFile { path: p } = &mut cfg.pump.spatial_profile {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        positive("pump.wavelength_nm", self.pump.wavelength_nm)?;
        match &self.pump.spatial_profile {
            SpatialProfile::Gaussian { waist_mm } | SpatialProfile::Hg1 { waist_mm } => {
                positive("pump.spatial_profile.waist_mm", *waist_mm)?
            }
            SpatialProfile::ShiftedGaussian {
                waist_mm,
                offset_mm,
            } => {
                positive("pump.spatial_profile.waist_mm", *waist_mm)?;
                if !offset_mm.is_finite() {
                    return Err(field("pump.spatial_profile.offset_mm", "must be finite"));
                }
            }
            SpatialProfile::TabulatedFile { .. } => {}
        }
        positive("filter.center_nm", self.filter.center_nm)?;
        positive("filter.bandwidth_nm", self.filter.bandwidth_nm)?;
        if self.filter.bandwidth_nm >= self.filter.center_nm {
            return Err(field(
                "filter.bandwidth_nm",
                "must be smaller than filter.center_nm",
            ));
        }
        let g = &self.grids;
        for (name, n) in [
            ("grids.spatial_points", g.spatial_points),
            ("grids.spectral_points", g.spectral_points),
        ] {
            if n < 3 || n % 2 == 0 {
                return Err(field(name, format!("must be odd and at least 3, got {n}")));
            }
        }
        positive("grids.spatial_halfwidth_mm", g.spatial_halfwidth_mm)?;
        self.taus().map_err(|e| field("scan", e))?;
        Ok(())
    }

    pub fn pump_frequency(&self) -> f64 {
        angular_frequency(self.pump.wavelength_nm / 1e9)
    }

    pub fn interferometer(&self, kind: InterferometerKind) -> Result<InterferometerConfig> {
        let base = match kind {
            InterferometerKind::Mzi => InterferometerConfig::mzi(self.pump_frequency())?,
            InterferometerKind::Mzim => InterferometerConfig::mzim(self.pump_frequency())?,
        };
        Ok(base.with_arms(self.interferometer.delay_arm, self.interferometer.flip_arm))
    }

    /// Delays in seconds.
    pub fn taus(&self) -> Result<Vec<f64>> {
        let max = 0.2 * 2.0 * std::f64::consts::PI / self.pump_frequency();
        tau_grid(
            self.scan.tau_start_fs * 1e-15,
            self.scan.tau_stop_fs * 1e-15,
            self.scan.tau_step_fs * 1e-15,
            max,
        )
    }

    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        let dw = angular_bandwidth(self.filter.center_nm / 1e9, self.filter.bandwidth_nm / 1e9);
        match self.filter.shape {
            FilterShape::Rectangular => SpectralDensity::rectangular(dw),
            FilterShape::Gaussian => {
                SpectralDensity::gaussian(dw / (2.0 * (2.0 * 2f64.ln()).sqrt()))
            }
        }
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(
            self.grids.spatial_halfwidth_mm / 1e3,
            self.grids.spatial_points,
        )
    }

    pub fn pump_profile(&self) -> Result<SpatialAmplitude> {
        let g = self.spatial_grid()?;
        match &self.pump.spatial_profile {
            SpatialProfile::Gaussian { waist_mm } => SpatialAmplitude::gaussian(g, waist_mm / 1e3),
            SpatialProfile::Hg1 { waist_mm } => SpatialAmplitude::hermite_gauss1(g, waist_mm / 1e3),
            SpatialProfile::ShiftedGaussian {
                waist_mm,
                offset_mm,
            } => SpatialAmplitude::shifted_gaussian(g, waist_mm / 1e3, offset_mm / 1e3),
            SpatialProfile::TabulatedFile { path } => {
                SpatialAmplitude::from_table(g, read_profile_table(path)?)
            }
        }
    }

    pub fn state(&self) -> Result<TwoPhotonState> {
        let density = self.spectral_density()?;
        let grid = FrequencyGrid::new(
            density.default_grid().half_width(),
            self.grids.spectral_points,
        )?;
        TwoPhotonState::new(
            SpatialSector::CorrelatedPump(self.pump_profile()?),
            SpectralSector::anti_correlated(&density, grid)?,
            self.pump_frequency(),
        )
    }
}

/// Reads `x_mm,re[,im]` rows; `#` starts a comment and a non-numeric first
/// row is taken as a header.
pub fn read_profile_table(path: &Path) -> Result<Vec<(f64, Complex64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let nums: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match nums {
            Ok(v) if v.len() == 2 || v.len() == 3 => {
                let im = v.get(2).copied().unwrap_or(0.0);
                rows.push((v[0] / 1e3, Complex64::new(v[1], im)));
            }
            // A leading header row is allowed.
            Err(_) if n == 0 => continue,
            _ => {
                let line = record.position().map_or(0, |p| p.line());
                return Err(Error::Parse(format!(
                    "{}:{line}: expected `x_mm,re[,im]`",
                    path.display()
                )));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const DEFAULT: &str = r#"{
        "pump": {"wavelength_nm": 405, "spatial_profile": {"kind": "gaussian", "waist_mm": 1.0}},
        "filter": {"center_nm": 810, "bandwidth_nm": 10, "shape": "rectangular"},
        "interferometer": {"kind": "mzi"},
        "scan": {"tau_start_fs": -200, "tau_stop_fs": 200, "tau_step_fs": 0.2}
    }"#;

    #[test]
    fn defaults_reproduce_default_state() {
        let cfg = RunConfig::from_json(DEFAULT).unwrap();
        let s = cfg.state().unwrap();
        assert_eq!(s, crate::state::default_spdc_state());
        assert_eq!(cfg.taus().unwrap().len(), 2001);
        assert_eq!(cfg.engine, EngineChoice::Closed);
    }

    #[test]
    fn rejects_bad_fields() {
        let bad = DEFAULT.replace("\"bandwidth_nm\": 10", "\"bandwidth_nm\": 900");
        assert!(RunConfig::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("filter.bandwidth_nm"));
        let bad = DEFAULT.replace("0.2}", "1.0}");
        assert!(RunConfig::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("scan"));
        let bad = DEFAULT.replace("\"mzi\"", "\"sagnac\"");
        assert!(RunConfig::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("line"));
    }

    #[test]
    fn gaussian_bandwidth_is_fwhm() {
        let cfg = RunConfig::from_json(&DEFAULT.replace("rectangular", "gaussian")).unwrap();
        let dw = angular_bandwidth(810e-9, 10e-9);
        let d = cfg.spectral_density().unwrap();
        let peak = d.density(0.0);
        approx::assert_relative_eq!(d.density(0.5 * dw), 0.5 * peak, max_relative = 1e-12);
    }
}
