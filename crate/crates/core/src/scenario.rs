//! Network configuration and deployment generation.
//!
//! gNBs sit on the centres of a uniform square grid; UEs are a homogeneous
//! Poisson point process over the same square. Every random draw is derived
//! from `(seed, realization_id)` so a deployment can be regenerated exactly.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{db_to_linear, dbm_to_watts};

/// A count that may be unbounded. Serialized as an integer or the string
/// `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Limit {
    Finite(u32),
    Unbounded,
}

impl Limit {
    pub fn finite(self) -> Option<u32> {
        match self {
            Limit::Finite(v) => Some(v),
            Limit::Unbounded => None,
        }
    }

    /// Truncation length for a list of `len` items.
    pub fn cap(self, len: usize) -> usize {
        match self {
            Limit::Finite(v) => len.min(v as usize),
            Limit::Unbounded => len,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(v) => write!(f, "{v}"),
            Limit::Unbounded => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Limit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_matches('"');
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Limit::Unbounded),
            _ => t
                .parse::<u32>()
                .map(Limit::Finite)
                .map_err(|_| Error::Config(format!("expected a count or \"inf\", got {s:?}"))),
        }
    }
}

impl Serialize for Limit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Limit::Finite(v) => serializer.serialize_u32(*v),
            Limit::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Limit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(v) => Ok(Limit::Finite(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// How UE panels are oriented in each realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UeOrientation {
    /// Uniform random base azimuth per UE per realization.
    Random,
    /// All UEs share base azimuth 0°.
    Fixed,
}

/// Order in which allocation engines visit UEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UeOrder {
    /// Strongest initial-access RSRP first.
    DescendingRsrp,
    /// Plain UE index order.
    Index,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub area_side_m: f64,
    /// gNBs per km².
    pub gnb_density: f64,
    /// UEs per km².
    pub ue_density: f64,
    pub gnb_height_m: f64,
    pub ue_height_m: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub p_max_dbm: f64,
    pub noise_dbm: f64,
    /// Elements per gNB sector panel.
    pub n_t: usize,
    /// Elements per UE sector panel.
    pub n_r: usize,
    pub n_sec: usize,
    pub n_rf_gnb_sec: usize,
    pub n_rf_ue: usize,
    pub n_q_sweep_bits: u32,
    pub n_q_csi_bits: Limit,
    pub n_csi_rs: Limit,
    pub sinr_min_db: f64,
    pub sinr_max_db: f64,
    pub r_max_bps: f64,
    pub alpha_loss: f64,
    pub seed: u64,
    pub n_realizations: usize,

    /// Shared scatterer points per realization.
    pub n_scatterers: usize,
    pub scatterer_max_height_m: f64,
    /// LOS (and scatterer visibility) survives with probability exp(-d / los_decay_m).
    pub los_decay_m: f64,
    pub reflection_loss_db: f64,
    /// SSB transmit power; defaults to `p_max_dbm`.
    pub p_ssb_dbm: Option<f64>,
    /// Sweep candidates are kept when rsrp / noise is at least this.
    pub detection_floor_db: f64,
    /// Enforce N_SSB <= 64 on the gNB sweep codebook.
    pub nr_compliance: bool,
    /// Keep only beam pairs that are local RSRP maxima as sweep candidates.
    pub sweep_peaks_only: bool,
    pub gnb_random_rotation: bool,
    pub gnb_base_orientation_deg: f64,
    pub ue_orientation: UeOrientation,
    pub ue_order: UeOrder,
    /// Slot draws averaged for CBF TDMA inter-cell interference.
    pub cbf_slot_draws: usize,
    /// Zero-forcing refuses aggregates above this condition number.
    pub max_condition: f64,
}

impl Default for NetworkConfig {
    /// Baseline network with the published deployment parameters.
    fn default() -> Self {
        NetworkConfig {
            area_side_m: 500.0,
            gnb_density: 64.0,
            ue_density: 1000.0,
            gnb_height_m: 6.0,
            ue_height_m: 1.5,
            carrier_hz: 28e9,
            bandwidth_hz: 400e6,
            p_max_dbm: 30.0,
            noise_dbm: -78.0,
            n_t: 256,
            n_r: 16,
            n_sec: 4,
            n_rf_gnb_sec: 4,
            n_rf_ue: 1,
            n_q_sweep_bits: 4,
            n_q_csi_bits: Limit::Unbounded,
            n_csi_rs: Limit::Unbounded,
            sinr_min_db: -5.0,
            sinr_max_db: 20.05,
            r_max_bps: 2e9,
            alpha_loss: 0.75,
            seed: 1,
            n_realizations: 20,
            n_scatterers: 50,
            scatterer_max_height_m: 20.0,
            los_decay_m: 200.0,
            reflection_loss_db: 13.0,
            p_ssb_dbm: None,
            detection_floor_db: -10.0,
            nr_compliance: true,
            sweep_peaks_only: false,
            gnb_random_rotation: false,
            gnb_base_orientation_deg: 0.0,
            ue_orientation: UeOrientation::Random,
            ue_order: UeOrder::DescendingRsrp,
            cbf_slot_draws: 10,
            max_condition: 1e12,
        }
    }
}

impl NetworkConfig {
    /// Reduced profile that runs a paired campaign in minutes on one core:
    /// 250 m square, 4 gNBs, ~62 UEs, 64-element gNB panels.
    pub fn desk_scale() -> Self {
        NetworkConfig {
            area_side_m: 250.0,
            n_t: 64,
            ..NetworkConfig::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: NetworkConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Applies `key=value` overrides, where `key` is a field name.
    pub fn apply_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
            let key = key.trim();
            let raw = raw.trim();
            let value = parse_override_value(raw);
            table.insert(key.to_string(), value);
        }
        let cfg: NetworkConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_sec != 4 {
            return bad(format!("n_sec must be 4, got {}", self.n_sec));
        }
        if !(self.area_side_m > 0.0) {
            return bad("area_side_m must be positive".into());
        }
        if !(self.gnb_density > 0.0) {
            return bad("gnb_density must be positive".into());
        }
        if !(self.ue_density >= 0.0) {
            return bad("ue_density must be non-negative".into());
        }
        for (name, v) in [
            ("n_t", self.n_t),
            ("n_r", self.n_r),
            ("n_rf_gnb_sec", self.n_rf_gnb_sec),
            ("n_rf_ue", self.n_rf_ue),
            ("cbf_slot_draws", self.cbf_slot_draws),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.n_rf_ue != 1 {
            return bad("only single-RF-chain UEs (n_rf_ue = 1) are modelled".into());
        }
        if self.n_q_sweep_bits == 0 || self.n_q_sweep_bits > 12 {
            return bad(format!("n_q_sweep_bits must lie in 1..=12, got {}", self.n_q_sweep_bits));
        }
        if self.nr_compliance && (self.n_sec << self.n_q_sweep_bits) > 64 {
            return bad(format!(
                "sweep codebook of {} beams exceeds the 64 SSBs allowed in FR2",
                self.n_sec << self.n_q_sweep_bits
            ));
        }
        if let Limit::Finite(b) = self.n_q_csi_bits {
            if b == 0 || b > 20 {
                return bad(format!("n_q_csi_bits must lie in 1..=20 or be inf, got {b}"));
            }
        }
        if self.n_csi_rs == Limit::Finite(0) {
            return bad("n_csi_rs must be positive".into());
        }
        if !(self.sinr_min_db < self.sinr_max_db) {
            return bad("sinr_min_db must be below sinr_max_db".into());
        }
        if !(self.carrier_hz > 0.0 && self.bandwidth_hz > 0.0 && self.r_max_bps > 0.0) {
            return bad("carrier, bandwidth and r_max must be positive".into());
        }
        if !(self.alpha_loss > 0.0 && self.alpha_loss <= 1.0) {
            return bad("alpha_loss must lie in (0, 1]".into());
        }
        if !(self.los_decay_m > 0.0) {
            return bad("los_decay_m must be positive".into());
        }
        if !(self.max_condition > 1.0) {
            return bad("max_condition must exceed 1".into());
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        299_792_458.0 / self.carrier_hz
    }

    pub fn area_km2(&self) -> f64 {
        (self.area_side_m / 1000.0).powi(2)
    }

    pub fn p_max_w(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }

    pub fn p_ssb_w(&self) -> f64 {
        dbm_to_watts(self.p_ssb_dbm.unwrap_or(self.p_max_dbm))
    }

    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn sinr_min_linear(&self) -> f64 {
        db_to_linear(self.sinr_min_db)
    }

    pub fn n_rf_gnb(&self) -> usize {
        self.n_sec * self.n_rf_gnb_sec
    }

    pub fn gnb_count(&self) -> usize {
        (self.gnb_density * self.area_km2()).round() as usize
    }

    pub fn mean_ue_count(&self) -> f64 {
        self.ue_density * self.area_km2()
    }
}

fn parse_override_value(raw: &str) -> toml::Value {
    // Reuse the TOML grammar for scalars; anything unparsable is a string.
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => match t.remove("v") {
            // bare `inf` is a TOML float; unbounded limits are spelled as strings
            Some(toml::Value::Float(f)) if f.is_infinite() => toml::Value::String("inf".into()),
            Some(v) => v,
            None => toml::Value::String(raw.into()),
        },
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Position { x, y, z }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }

    pub fn horizontal_distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Boresight azimuths of the four sector panels for a base orientation.
pub fn panel_boresights(base_deg: f64) -> [f64; 4] {
    [0.0, 90.0, 180.0, 270.0].map(|off| crate::linalg::wrap_deg(base_deg + off))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub gnb_positions: Vec<Position>,
    pub gnb_panel_orientations: Vec<[f64; 4]>,
    pub ue_positions: Vec<Position>,
    pub ue_panel_orientations: Vec<[f64; 4]>,
    pub realization_id: u64,
}

impl Deployment {
    /// Deployment with given node positions, every node facing the axes.
    pub fn with_nodes(gnb_positions: Vec<Position>, ue_positions: Vec<Position>) -> Self {
        Deployment {
            gnb_panel_orientations: vec![panel_boresights(0.0); gnb_positions.len()],
            ue_panel_orientations: vec![panel_boresights(0.0); ue_positions.len()],
            gnb_positions,
            ue_positions,
            realization_id: 0,
        }
    }

    pub fn n_gnb(&self) -> usize {
        self.gnb_positions.len()
    }

    pub fn n_ue(&self) -> usize {
        self.ue_positions.len()
    }
}

/// Stream tags keep the per-purpose RNG streams of one realization apart.
pub mod stream {
    pub const DEPLOYMENT: u64 = 1;
    pub const ENVIRONMENT: u64 = 2;
    pub const PATHS: u64 = 3;
    pub const TDMA_SLOTS: u64 = 4;
}

/// Derives an independent RNG for `(seed, realization, purpose, index)`.
pub fn rng_for(seed: u64, realization: u64, purpose: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&realization.to_le_bytes());
    key[16..24].copy_from_slice(&purpose.to_le_bytes());
    key[24..].copy_from_slice(&index.to_le_bytes());
    rand_chacha::ChaCha8Rng::from_seed(key)
}

/// Side length (cells) of the gNB grid for `count` sites.
pub fn grid_side(count: usize) -> usize {
    let mut side = (count as f64).sqrt().round() as usize;
    while side * side < count {
        side += 1;
    }
    side
}

pub fn generate_deployment(cfg: &NetworkConfig, realization_id: u64) -> Result<Deployment> {
    cfg.validate()?;
    let n_gnb = cfg.gnb_count();
    if n_gnb == 0 {
        return Err(Error::Config(format!(
            "gNB density {} /km² over {} km² places no gNB",
            cfg.gnb_density,
            cfg.area_km2()
        )));
    }
    let mut rng = rng_for(cfg.seed, realization_id, stream::DEPLOYMENT, 0);
    let side = grid_side(n_gnb);
    let cell = cfg.area_side_m / side as f64;
    let mut gnb_positions = Vec::with_capacity(n_gnb);
    'grid: for row in 0..side {
        for col in 0..side {
            if gnb_positions.len() == n_gnb {
                break 'grid;
            }
            gnb_positions.push(Position::new(
                (col as f64 + 0.5) * cell,
                (row as f64 + 0.5) * cell,
                cfg.gnb_height_m,
            ));
        }
    }
    let gnb_panel_orientations = (0..n_gnb)
        .map(|_| {
            let base = if cfg.gnb_random_rotation {
                rng.gen_range(-180.0..180.0)
            } else {
                cfg.gnb_base_orientation_deg
            };
            panel_boresights(base)
        })
        .collect();

    let mean = cfg.mean_ue_count();
    let n_ue = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::Config(format!("UE density: {e}")))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let mut ue_positions = Vec::with_capacity(n_ue);
    let mut ue_panel_orientations = Vec::with_capacity(n_ue);
    for _ in 0..n_ue {
        ue_positions.push(Position::new(
            rng.gen_range(0.0..cfg.area_side_m),
            rng.gen_range(0.0..cfg.area_side_m),
            cfg.ue_height_m,
        ));
        let base = match cfg.ue_orientation {
            UeOrientation::Random => rng.gen_range(-180.0..180.0),
            UeOrientation::Fixed => 0.0,
        };
        ue_panel_orientations.push(panel_boresights(base));
    }
    Ok(Deployment {
        gnb_positions,
        gnb_panel_orientations,
        ue_positions,
        ue_panel_orientations,
        realization_id,
    })
}
