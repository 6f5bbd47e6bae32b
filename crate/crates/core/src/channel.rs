//! Geometric multi-panel channel model.
//!
//! Paths carry global-frame angles. [`assemble_channel`] rotates them into
//! each sector panel's local frame, drops paths outside the panel's ±45°
//! field of view, and sums rank-one steering outer products per panel pair.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{wrap_deg, CMatrix, CVector, C64};
use crate::scenario::{rng_for, stream, Deployment, NetworkConfig, Position};

/// Element spacing in wavelengths for every array in the simulator.
pub const D_OVER_LAMBDA: f64 = 0.5;

/// Half-width of a sector panel's field of view, azimuth and elevation.
pub const PANEL_HALF_WIDTH_DEG: f64 = 45.0;

/// Number of sector panels per node.
pub const N_PANELS: usize = 4;

pub fn ula_steering(n: usize, d_over_lambda: f64, phi_deg: f64) -> CVector {
    let scale = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * d_over_lambda * phi_deg.to_radians().sin();
    CVector::from_fn(n, |m, _| C64::from_polar(scale, m as f64 * step))
}

/// URA response `a_h(phi) ⊗ a_v(theta)`; element `(h, v)` sits at index
/// `h * n_v + v`.
pub fn ura_steering(n_h: usize, n_v: usize, d_over_lambda: f64, phi_deg: f64, theta_deg: f64) -> CVector {
    let h = ula_steering(n_h, d_over_lambda, phi_deg);
    let v = ula_steering(n_v, d_over_lambda, theta_deg);
    h.kronecker(&v)
}

/// Horizontal × vertical element layout of one sector panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelGeometry {
    pub n_h: usize,
    pub n_v: usize,
}

impl PanelGeometry {
    /// Most square factorization with `n_h >= n_v`.
    pub fn for_elements(n: usize) -> Self {
        let mut n_v = (n as f64).sqrt().floor() as usize;
        while n_v > 1 && n % n_v != 0 {
            n_v -= 1;
        }
        let n_v = n_v.max(1);
        PanelGeometry { n_h: n / n_v, n_v }
    }

    pub fn elements(&self) -> usize {
        self.n_h * self.n_v
    }

    pub fn steering(&self, phi_deg: f64, theta_deg: f64) -> CVector {
        ura_steering(self.n_h, self.n_v, D_OVER_LAMBDA, phi_deg, theta_deg)
    }
}

/// Panel layouts of the gNB and UE arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayLayout {
    pub gnb: PanelGeometry,
    pub ue: PanelGeometry,
}

impl ArrayLayout {
    pub fn from_config(cfg: &NetworkConfig) -> Self {
        ArrayLayout {
            gnb: PanelGeometry::for_elements(cfg.n_t),
            ue: PanelGeometry::for_elements(cfg.n_r),
        }
    }

    pub fn n_t(&self) -> usize {
        self.gnb.elements()
    }

    pub fn n_r(&self) -> usize {
        self.ue.elements()
    }
}

/// One LOS or reflected ray. AoD is in the gNB's global frame, AoA in the
/// UE's; both point from the array towards the first/last interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationPath {
    pub gain: C64,
    pub aod_az_deg: f64,
    pub aod_el_deg: f64,
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub bounces: u8,
    pub path_length_m: f64,
}

impl PropagationPath {
    pub fn is_los(&self) -> bool {
        self.bounces == 0
    }

    /// The same ray with transmitter and receiver roles swapped.
    pub fn reversed(&self) -> Self {
        PropagationPath {
            aod_az_deg: self.aoa_az_deg,
            aod_el_deg: self.aoa_el_deg,
            aoa_az_deg: self.aod_az_deg,
            aoa_el_deg: self.aod_el_deg,
            ..*self
        }
    }
}

/// Azimuth/elevation (degrees) of the direction from `from` to `to`.
pub fn direction(from: &Position, to: &Position) -> (f64, f64) {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    let dz = to.z - from.z;
    let az = if dx == 0.0 && dy == 0.0 { 0.0 } else { wrap_deg(dy.atan2(dx).to_degrees()) };
    (az, dz.atan2(dx.hypot(dy)).to_degrees())
}

/// Free-space amplitude gain over `length_m`, attenuated per bounce.
pub fn path_gain(length_m: f64, wavelength_m: f64, bounces: u8, reflection_loss_db: f64) -> C64 {
    let fspl = wavelength_m / (4.0 * PI * length_m);
    let reflection = 10f64.powf(-reflection_loss_db * bounces as f64 / 20.0);
    C64::from_polar(fspl * reflection, -2.0 * PI * length_m / wavelength_m)
}

/// Ray from `tx` to `rx`, optionally through a single reflection point.
pub fn geometric_path(
    tx: &Position,
    via: Option<&Position>,
    rx: &Position,
    wavelength_m: f64,
    reflection_loss_db: f64,
) -> PropagationPath {
    let (first, last, length, bounces) = match via {
        None => (rx, tx, tx.distance(rx), 0),
        Some(s) => (s, s, tx.distance(s) + s.distance(rx), 1),
    };
    let (aod_az, aod_el) = direction(tx, first);
    let (aoa_az, aoa_el) = direction(rx, last);
    PropagationPath {
        gain: path_gain(length, wavelength_m, bounces, reflection_loss_db),
        aod_az_deg: aod_az,
        aod_el_deg: aod_el,
        aoa_az_deg: aoa_az,
        aoa_el_deg: aoa_el,
        bounces,
        path_length_m: length,
    }
}

/// Scatterer field shared by every gNB–UE pair of one realization, with the
/// per-node visibility of each scatterer fixed up front so that paths are
/// spatially consistent across links.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Environment {
    pub scatterers: Vec<Position>,
    pub gnb_visible: Vec<Vec<bool>>,
    pub ue_visible: Vec<Vec<bool>>,
}

impl Environment {
    pub fn generate(cfg: &NetworkConfig, dep: &Deployment) -> Self {
        let mut rng = rng_for(cfg.seed, dep.realization_id, stream::ENVIRONMENT, 0);
        let scatterers: Vec<Position> = (0..cfg.n_scatterers)
            .map(|_| {
                Position::new(
                    rng.gen_range(0.0..cfg.area_side_m),
                    rng.gen_range(0.0..cfg.area_side_m),
                    rng.gen_range(0.0..=cfg.scatterer_max_height_m),
                )
            })
            .collect();
        let mut visibility = |nodes: &[Position]| -> Vec<Vec<bool>> {
            nodes
                .iter()
                .map(|n| {
                    scatterers
                        .iter()
                        .map(|s| rng.gen::<f64>() < (-n.distance(s) / cfg.los_decay_m).exp())
                        .collect()
                })
                .collect()
        };
        let gnb_visible = visibility(&dep.gnb_positions);
        let ue_visible = visibility(&dep.ue_positions);
        Environment {
            scatterers,
            gnb_visible,
            ue_visible,
        }
    }

    /// Environment with explicit scatterers, all visible to every node.
    pub fn fully_visible(scatterers: Vec<Position>, n_gnb: usize, n_ue: usize) -> Self {
        let k = scatterers.len();
        Environment {
            scatterers,
            gnb_visible: vec![vec![true; k]; n_gnb],
            ue_visible: vec![vec![true; k]; n_ue],
        }
    }
}

/// RNG stream for the LOS draw of one gNB–UE pair.
pub fn pair_rng(cfg: &NetworkConfig, dep: &Deployment, gnb: usize, ue: usize) -> rand_chacha::ChaCha8Rng {
    let index = ((gnb as u64) << 32) | ue as u64;
    rng_for(cfg.seed, dep.realization_id, stream::PATHS, index)
}

pub fn synthesize_paths<R: Rng>(
    cfg: &NetworkConfig,
    dep: &Deployment,
    env: &Environment,
    gnb: usize,
    ue: usize,
    rng: &mut R,
) -> Vec<PropagationPath> {
    let tx = &dep.gnb_positions[gnb];
    let rx = &dep.ue_positions[ue];
    let wavelength = cfg.wavelength_m();
    let mut paths = Vec::new();
    let p_los = (-tx.distance(rx) / cfg.los_decay_m).exp();
    if rng.gen::<f64>() < p_los {
        paths.push(geometric_path(tx, None, rx, wavelength, cfg.reflection_loss_db));
    }
    for (s, scatterer) in env.scatterers.iter().enumerate() {
        if env.gnb_visible[gnb][s] && env.ue_visible[ue][s] {
            paths.push(geometric_path(tx, Some(scatterer), rx, wavelength, cfg.reflection_loss_db));
        }
    }
    paths
}

const TRACE_HEADER: [&str; 10] = [
    "gnb_id", "ue_id", "gain_re", "gain_im", "aod_az", "aod_el", "aoa_az", "aoa_el", "bounces", "length_m",
];

pub type PathTable = BTreeMap<(usize, usize), Vec<PropagationPath>>;

/// Loads a ray trace (one path per row). `n_gnb`/`n_ue` bound the ids.
pub fn ingest_paths(path: &Path, n_gnb: usize, n_ue: usize) -> Result<PathTable> {
    let file = std::fs::File::open(path)?;
    ingest_paths_from_reader(file, path, n_gnb, n_ue)
}

pub fn ingest_paths_from_reader<R: Read>(reader: R, origin: &Path, n_gnb: usize, n_ue: usize) -> Result<PathTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut table = PathTable::new();
    let parse_error = |line: usize, message: String| Error::TraceParse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut saw_header = false;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if !saw_header {
            let names: Vec<&str> = record.iter().collect();
            if names != TRACE_HEADER {
                return Err(parse_error(line, format!("expected header {}", TRACE_HEADER.join(","))));
            }
            saw_header = true;
            continue;
        }
        if record.len() != TRACE_HEADER.len() {
            return Err(parse_error(line, format!("expected {} fields, got {}", TRACE_HEADER.len(), record.len())));
        }
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_error(line, format!("field {} is not a finite number: {:?}", TRACE_HEADER[i], &record[i])))
        };
        let id = |i: usize| -> Result<usize> {
            record[i]
                .parse::<usize>()
                .map_err(|_| parse_error(line, format!("field {} is not an id: {:?}", TRACE_HEADER[i], &record[i])))
        };
        let gnb = id(0)?;
        let ue = id(1)?;
        let gain = C64::new(num(2)?, num(3)?);
        let bounces = id(8)?;
        if bounces > 2 {
            return Err(parse_error(line, format!("bounces must be 0..=2, got {bounces}")));
        }
        if gain.norm() == 0.0 {
            return Err(parse_error(line, "path gain must be non-zero".into()));
        }
        let length = num(9)?;
        if length <= 0.0 {
            return Err(parse_error(line, "length_m must be positive".into()));
        }
        let (aod_az, aod_el, aoa_az, aoa_el) = (num(4)?, num(5)?, num(6)?, num(7)?);
        for (name, el) in [("aod_el", aod_el), ("aoa_el", aoa_el)] {
            if !(-90.0..=90.0).contains(&el) {
                return Err(parse_error(line, format!("{name} {el} outside [-90, 90]")));
            }
        }
        if gnb >= n_gnb {
            return Err(Error::UnknownNode { kind: "gNB", id: gnb, count: n_gnb });
        }
        if ue >= n_ue {
            return Err(Error::UnknownNode { kind: "UE", id: ue, count: n_ue });
        }
        table.entry((gnb, ue)).or_default().push(PropagationPath {
            gain,
            aod_az_deg: wrap_deg(aod_az),
            aod_el_deg: aod_el,
            aoa_az_deg: wrap_deg(aoa_az),
            aoa_el_deg: aoa_el,
            bounces: bounces as u8,
            path_length_m: length,
        });
    }
    Ok(table)
}

/// Writes paths in the trace format accepted by [`ingest_paths`].
pub fn write_trace<W: std::io::Write>(writer: W, table: &PathTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(TRACE_HEADER)?;
    for (&(gnb, ue), paths) in table {
        for p in paths {
            wtr.write_record([
                gnb.to_string(),
                ue.to_string(),
                format!("{:e}", p.gain.re),
                format!("{:e}", p.gain.im),
                p.aod_az_deg.to_string(),
                p.aod_el_deg.to_string(),
                p.aoa_az_deg.to_string(),
                p.aoa_el_deg.to_string(),
                p.bounces.to_string(),
                p.path_length_m.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Index of the panel whose field of view contains the global direction,
/// and the direction in that panel's frame.
pub fn panel_for(orientations: &[f64; 4], az_deg: f64, el_deg: f64) -> Option<(usize, f64)> {
    if !(-PANEL_HALF_WIDTH_DEG..=PANEL_HALF_WIDTH_DEG).contains(&el_deg) {
        return None;
    }
    orientations.iter().enumerate().find_map(|(p, &boresight)| {
        let local = wrap_deg(az_deg - boresight);
        (-PANEL_HALF_WIDTH_DEG..PANEL_HALF_WIDTH_DEG).contains(&local).then_some((p, local))
    })
}

/// Block channel between the four UE panels (rows) and four gNB panels
/// (columns). Panel pairs with no surviving path hold `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPanelChannel {
    pub n_r: usize,
    pub n_t: usize,
    blocks: Vec<Option<CMatrix>>,
    pub exact_paths: Vec<PropagationPath>,
}

impl MultiPanelChannel {
    pub fn zeros(n_r: usize, n_t: usize) -> Self {
        MultiPanelChannel {
            n_r,
            n_t,
            blocks: vec![None; N_PANELS * N_PANELS],
            exact_paths: Vec::new(),
        }
    }

    /// Block linking UE panel `ue_panel` to gNB panel `gnb_panel`.
    pub fn block(&self, ue_panel: usize, gnb_panel: usize) -> Option<&CMatrix> {
        self.blocks[ue_panel * N_PANELS + gnb_panel].as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Option::is_none)
    }

    /// Full `4 N_r × 4 N_t` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let mut h = CMatrix::zeros(N_PANELS * self.n_r, N_PANELS * self.n_t);
        for p in 0..N_PANELS {
            for q in 0..N_PANELS {
                if let Some(b) = self.block(p, q) {
                    h.view_mut((p * self.n_r, q * self.n_t), (self.n_r, self.n_t)).copy_from(b);
                }
            }
        }
        h
    }

    /// `w^H H` for a combiner `w` supported on UE panel `ue_panel` only
    /// (`w_panel` is the panel slice). Length `4 N_t`.
    pub fn combined_row(&self, ue_panel: usize, w_panel: &CVector) -> CVector {
        let mut row = CVector::zeros(N_PANELS * self.n_t);
        for q in 0..N_PANELS {
            if let Some(b) = self.block(ue_panel, q) {
                let part = b.tr_mul(&w_panel.conjugate());
                row.rows_mut(q * self.n_t, self.n_t).copy_from(&part);
            }
        }
        row
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().flatten().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }
}

pub fn assemble_channel(
    paths: &[PropagationPath],
    layout: &ArrayLayout,
    gnb_orient: &[f64; 4],
    ue_orient: &[f64; 4],
) -> MultiPanelChannel {
    let (n_r, n_t) = (layout.n_r(), layout.n_t());
    let mut grouped: Vec<Vec<(&PropagationPath, f64, f64)>> = vec![Vec::new(); N_PANELS * N_PANELS];
    for path in paths {
        let Some((q, aod_local)) = panel_for(gnb_orient, path.aod_az_deg, path.aod_el_deg) else {
            continue;
        };
        let Some((p, aoa_local)) = panel_for(ue_orient, path.aoa_az_deg, path.aoa_el_deg) else {
            continue;
        };
        grouped[p * N_PANELS + q].push((path, aod_local, aoa_local));
    }
    let blocks = grouped
        .into_iter()
        .map(|members| {
            if members.is_empty() {
                return None;
            }
            let scale = ((n_r * n_t) as f64 / members.len() as f64).sqrt();
            let mut block = CMatrix::zeros(n_r, n_t);
            for (path, aod_local, aoa_local) in members {
                let a_r = layout.ue.steering(aoa_local, path.aoa_el_deg);
                let a_t = layout.gnb.steering(aod_local, path.aod_el_deg);
                block.gerc(path.gain * scale, &a_r, &a_t, C64::new(1.0, 0.0));
            }
            Some(block)
        })
        .collect();
    MultiPanelChannel {
        n_r,
        n_t,
        blocks,
        exact_paths: paths.to_vec(),
    }
}
