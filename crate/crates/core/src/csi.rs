//! Quantized channel estimation.
//!
//! Path angles are snapped to the estimation lattice; paths that become
//! indistinguishable are reported as one path carrying the coherent sum of
//! their gains. Gains are otherwise known exactly.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::channel::{assemble_channel, ArrayLayout, MultiPanelChannel, PropagationPath};
use crate::codebook::EstimationGrid;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizedPath {
    pub gain: C64,
    pub q_aod_az: f64,
    pub q_aod_el: f64,
    pub q_aoa_az: f64,
    pub q_aoa_el: f64,
    /// Fewest bounces among the merged paths.
    pub bounces: u8,
    pub path_length_m: f64,
}

impl QuantizedPath {
    fn exact(p: &PropagationPath) -> Self {
        QuantizedPath {
            gain: p.gain,
            q_aod_az: p.aod_az_deg,
            q_aod_el: p.aod_el_deg,
            q_aoa_az: p.aoa_az_deg,
            q_aoa_el: p.aoa_el_deg,
            bounces: p.bounces,
            path_length_m: p.path_length_m,
        }
    }

    pub fn as_path(&self) -> PropagationPath {
        PropagationPath {
            gain: self.gain,
            aod_az_deg: self.q_aod_az,
            aod_el_deg: self.q_aod_el,
            aoa_az_deg: self.q_aoa_az,
            aoa_el_deg: self.q_aoa_el,
            bounces: self.bounces,
            path_length_m: self.path_length_m,
        }
    }
}

/// Snaps every path onto the lattice anchored at the gNB / UE base panel
/// orientation and merges collisions. An unbounded grid returns the paths
/// unchanged.
pub fn quantize_paths(
    paths: &[PropagationPath],
    grid: &EstimationGrid,
    gnb_anchor_deg: f64,
    ue_anchor_deg: f64,
) -> Vec<QuantizedPath> {
    if grid.is_exact() {
        return paths.iter().map(QuantizedPath::exact).collect();
    }
    let mut merged: Vec<QuantizedPath> = Vec::with_capacity(paths.len());
    let mut slot: HashMap<[i64; 4], usize> = HashMap::new();
    for p in paths {
        // finite grid, so snapping cannot fail
        let aod_az = grid.snap_az(p.aod_az_deg, gnb_anchor_deg).expect("finite grid");
        let aod_el = grid.snap_el(p.aod_el_deg).expect("finite grid");
        let aoa_az = grid.snap_az(p.aoa_az_deg, ue_anchor_deg).expect("finite grid");
        let aoa_el = grid.snap_el(p.aoa_el_deg).expect("finite grid");
        let key = [aod_az.index, aod_el.index, aoa_az.index, aoa_el.index];
        match slot.get(&key) {
            Some(&i) => {
                let q = &mut merged[i];
                q.gain += p.gain;
                q.bounces = q.bounces.min(p.bounces);
            }
            None => {
                slot.insert(key, merged.len());
                merged.push(QuantizedPath {
                    gain: p.gain,
                    q_aod_az: aod_az.angle_deg,
                    q_aod_el: aod_el.angle_deg,
                    q_aoa_az: aoa_az.angle_deg,
                    q_aoa_el: aoa_el.angle_deg,
                    bounces: p.bounces,
                    path_length_m: p.path_length_m,
                });
            }
        }
    }
    merged
}

/// Rebuilds the block channel from quantized paths. Paths that cancelled
/// to exactly zero gain are not reported by the estimator.
pub fn estimate_channel(
    quantized: &[QuantizedPath],
    layout: &ArrayLayout,
    gnb_orient: &[f64; 4],
    ue_orient: &[f64; 4],
) -> MultiPanelChannel {
    let paths: Vec<PropagationPath> = quantized
        .iter()
        .filter(|q| q.gain != C64::new(0.0, 0.0))
        .map(QuantizedPath::as_path)
        .collect();
    assemble_channel(&paths, layout, gnb_orient, ue_orient)
}

/// Feedback row `w_c^H Ĥ W_RF` of one UE over the gNB's RF beams.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub ue: usize,
    pub row: CVector,
}

pub fn effective_channel(
    ue: usize,
    ue_combiner: &CVector,
    est: &MultiPanelChannel,
    rf_precoders: &CMatrix,
) -> Result<EffectiveChannel> {
    let h = est.to_dense();
    if ue_combiner.len() != h.nrows() {
        return Err(Error::Dimension(format!(
            "combiner has {} entries, channel has {} receive elements",
            ue_combiner.len(),
            h.nrows()
        )));
    }
    if rf_precoders.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "RF precoder has {} rows, channel has {} transmit elements",
            rf_precoders.nrows(),
            h.ncols()
        )));
    }
    let row = (ue_combiner.adjoint() * h * rf_precoders).transpose();
    Ok(EffectiveChannel { ue, row })
}
