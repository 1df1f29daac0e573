//! Scenario config files: one TOML document per scenario.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use comp_noma_core::ScenarioConfig;

/// On-disk scenario description. Field names are the file keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub inps: usize,
    pub mvnos: usize,
    pub bs_per_inp: usize,
    pub subcarriers: usize,
    pub subcarrier_bw_hz: f64,
    pub users: usize,
    pub users_per_mvno: Vec<usize>,
    pub antennas: usize,
    pub noma_cap: usize,
    pub p_max_mbs_w: f64,
    pub p_max_fbs_w: f64,
    pub p_max_mvno_w: f64,
    pub r_min_bps_hz: Vec<f64>,
    pub noise_psd_dbm_hz: f64,
    pub radius_m: f64,
    pub pathloss_exp: f64,
    pub channel_mean: f64,
    pub seed: u64,
}

impl ScenarioFile {
    pub fn to_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            inps: self.inps,
            mvnos: self.mvnos,
            bs_per_inp: self.bs_per_inp,
            subcarriers: self.subcarriers,
            subcarrier_bw_hz: self.subcarrier_bw_hz,
            users: self.users,
            users_per_mvno: self.users_per_mvno.clone(),
            antennas: self.antennas,
            noma_cap: self.noma_cap,
            p_max_mbs_w: self.p_max_mbs_w,
            p_max_fbs_w: self.p_max_fbs_w,
            p_max_mvno_w: self.p_max_mvno_w,
            r_min_bps_hz: self.r_min_bps_hz.clone(),
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            radius_m: self.radius_m,
            pathloss_exp: self.pathloss_exp,
            channel_mean: self.channel_mean,
        }
    }

    pub fn from_config(cfg: &ScenarioConfig, seed: u64) -> Self {
        ScenarioFile {
            inps: cfg.inps,
            mvnos: cfg.mvnos,
            bs_per_inp: cfg.bs_per_inp,
            subcarriers: cfg.subcarriers,
            subcarrier_bw_hz: cfg.subcarrier_bw_hz,
            users: cfg.users,
            users_per_mvno: cfg.users_per_mvno.clone(),
            antennas: cfg.antennas,
            noma_cap: cfg.noma_cap,
            p_max_mbs_w: cfg.p_max_mbs_w,
            p_max_fbs_w: cfg.p_max_fbs_w,
            p_max_mvno_w: cfg.p_max_mvno_w,
            r_min_bps_hz: cfg.r_min_bps_hz.clone(),
            noise_psd_dbm_hz: cfg.noise_psd_dbm_hz,
            radius_m: cfg.radius_m,
            pathloss_exp: cfg.pathloss_exp,
            channel_mean: cfg.channel_mean,
            seed,
        }
    }
}

/// Read and parse a scenario file.
pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario config {}", path.display()))?;
    let file: ScenarioFile = toml::from_str(&text)
        .with_context(|| format!("parsing scenario config {}", path.display()))?;
    Ok(file)
}

/// Write a scenario file.
pub fn save_scenario_file(path: &Path, file: &ScenarioFile) -> Result<()> {
    let text = toml::to_string_pretty(file).context("serializing scenario config")?;
    std::fs::write(path, text)
        .with_context(|| format!("writing scenario config {}", path.display()))?;
    Ok(())
}
