//! Everything the allocation engines need about one realization: true and
//! estimated channels, beam-pair responses, and the sweep results.

use std::sync::Arc;

use crate::beamsweep::{beam_responses, initial_association, keep_peaks, sweep, Association, BeamPairLink};
use crate::channel::{
    assemble_channel, pair_rng, synthesize_paths, ArrayLayout, Environment, MultiPanelChannel, PathTable,
    PropagationPath,
};
use crate::codebook::{build_sector_codebook, EstimationGrid, FullCodebook};
use crate::csi::{estimate_channel, quantize_paths};
use crate::linalg::{CMatrix, CVector, C64};
use crate::scenario::{Deployment, NetworkConfig};
use crate::Result;

/// Per-realization radio state shared by every allocation mode.
#[derive(Debug, Clone)]
pub struct RadioMap {
    pub cfg: NetworkConfig,
    pub realization_id: u64,
    pub layout: ArrayLayout,
    pub gnb_books: Vec<FullCodebook>,
    pub ue_books: Vec<FullCodebook>,
    /// True channels, `[ue][gnb]`.
    pub channels: Vec<Vec<MultiPanelChannel>>,
    /// Estimated channels; `None` when CSI is exact.
    estimates: Option<Vec<Vec<MultiPanelChannel>>>,
    /// Beam-pair responses on the true channel, `[ue][gnb]`, `None` for an
    /// all-zero channel.
    responses: Vec<Vec<Option<CMatrix>>>,
    est_responses: Option<Vec<Vec<Option<CMatrix>>>>,
    /// Sweep candidates per UE, strongest first.
    pub candidates: Vec<Vec<BeamPairLink>>,
    pub initial: Vec<Association>,
}

/// Which channel a quantity is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Csi {
    True,
    Estimated,
}

impl RadioMap {
    /// Synthesizes paths for every pair of the deployment and builds the map.
    pub fn synthesize(cfg: &NetworkConfig, dep: &Deployment) -> Result<Self> {
        let env = Environment::generate(cfg, dep);
        let paths: Vec<Vec<Vec<PropagationPath>>> = (0..dep.n_ue())
            .map(|ue| {
                (0..dep.n_gnb())
                    .map(|g| synthesize_paths(cfg, dep, &env, g, ue, &mut pair_rng(cfg, dep, g, ue)))
                    .collect()
            })
            .collect();
        Self::build(cfg, dep, paths)
    }

    /// Builds the map from an ingested path table; missing pairs have no paths.
    pub fn from_table(cfg: &NetworkConfig, dep: &Deployment, table: &PathTable) -> Result<Self> {
        let paths = (0..dep.n_ue())
            .map(|ue| {
                (0..dep.n_gnb())
                    .map(|g| table.get(&(g, ue)).cloned().unwrap_or_default())
                    .collect()
            })
            .collect();
        Self::build(cfg, dep, paths)
    }

    /// `paths[ue][gnb]`.
    pub fn build(cfg: &NetworkConfig, dep: &Deployment, paths: Vec<Vec<Vec<PropagationPath>>>) -> Result<Self> {
        cfg.validate()?;
        let layout = ArrayLayout::from_config(cfg);
        let gnb_sector = Arc::new(build_sector_codebook(cfg.n_q_sweep_bits, layout.gnb));
        let ue_sector = Arc::new(build_sector_codebook(cfg.n_q_sweep_bits, layout.ue));
        let gnb_books: Vec<FullCodebook> = dep
            .gnb_panel_orientations
            .iter()
            .map(|o| FullCodebook::uniform(Arc::clone(&gnb_sector), *o))
            .collect();
        let ue_books: Vec<FullCodebook> = dep
            .ue_panel_orientations
            .iter()
            .map(|o| FullCodebook::uniform(Arc::clone(&ue_sector), *o))
            .collect();

        let channels: Vec<Vec<MultiPanelChannel>> = paths
            .iter()
            .enumerate()
            .map(|(ue, per_gnb)| {
                per_gnb
                    .iter()
                    .enumerate()
                    .map(|(g, p)| {
                        assemble_channel(p, &layout, &dep.gnb_panel_orientations[g], &dep.ue_panel_orientations[ue])
                    })
                    .collect()
            })
            .collect();
        let grid = EstimationGrid::new(cfg.n_q_csi_bits);
        let estimates = (!grid.is_exact()).then(|| {
            paths
                .iter()
                .enumerate()
                .map(|(ue, per_gnb)| {
                    per_gnb
                        .iter()
                        .enumerate()
                        .map(|(g, p)| {
                            let (go, uo) = (&dep.gnb_panel_orientations[g], &dep.ue_panel_orientations[ue]);
                            let q = quantize_paths(p, &grid, go[0], uo[0]);
                            estimate_channel(&q, &layout, go, uo)
                        })
                        .collect()
                })
                .collect::<Vec<Vec<_>>>()
        });

        let respond = |chs: &Vec<Vec<MultiPanelChannel>>| -> Vec<Vec<Option<CMatrix>>> {
            chs.iter()
                .enumerate()
                .map(|(ue, per_gnb)| {
                    per_gnb
                        .iter()
                        .enumerate()
                        .map(|(g, h)| (!h.is_zero()).then(|| beam_responses(h, &gnb_books[g], &ue_books[ue])))
                        .collect()
                })
                .collect()
        };
        let responses = respond(&channels);
        let est_responses = estimates.as_ref().map(respond);

        let p_ssb = cfg.p_ssb_w();
        let floor = cfg.noise_w() * crate::linalg::db_to_linear(cfg.detection_floor_db);
        let zero_resp = CMatrix::zeros(0, 0);
        let candidates: Vec<Vec<BeamPairLink>> = (0..dep.n_ue())
            .map(|ue| {
                let chans: Vec<&MultiPanelChannel> = channels[ue].iter().collect();
                let resp: Vec<&CMatrix> = responses[ue].iter().map(|r| r.as_ref().unwrap_or(&zero_resp)).collect();
                let all = sweep(ue, &chans, Some(&resp), &layout, &gnb_books, &ue_books[ue], p_ssb, floor);
                match (cfg.sweep_peaks_only, gnb_books.first()) {
                    (true, Some(g)) => keep_peaks(&all, g.per_panel(), ue_books[ue].per_panel()),
                    _ => all,
                }
            })
            .collect();
        let initial = candidates.iter().map(|c| initial_association(c)).collect();

        Ok(RadioMap {
            cfg: cfg.clone(),
            realization_id: dep.realization_id,
            layout,
            gnb_books,
            ue_books,
            channels,
            estimates,
            responses,
            est_responses,
            candidates,
            initial,
        })
    }

    pub fn n_ue(&self) -> usize {
        self.channels.len()
    }

    pub fn n_gnb(&self) -> usize {
        self.gnb_books.len()
    }

    pub fn exact_csi(&self) -> bool {
        self.estimates.is_none()
    }

    pub fn channel(&self, ue: usize, gnb: usize, csi: Csi) -> &MultiPanelChannel {
        match (csi, &self.estimates) {
            (Csi::Estimated, Some(est)) => &est[ue][gnb],
            _ => &self.channels[ue][gnb],
        }
    }

    fn response_matrix(&self, ue: usize, gnb: usize, csi: Csi) -> Option<&CMatrix> {
        match (csi, &self.est_responses) {
            (Csi::Estimated, Some(est)) => est[ue][gnb].as_ref(),
            _ => self.responses[ue][gnb].as_ref(),
        }
    }

    /// `w_c^H H w_p` for UE beam `ue_beam` and gNB beam `gnb_beam`.
    pub fn response(&self, ue: usize, gnb: usize, ue_beam: usize, gnb_beam: usize, csi: Csi) -> C64 {
        self.response_matrix(ue, gnb, csi)
            .map_or(C64::new(0.0, 0.0), |r| r[(ue_beam, gnb_beam)])
    }

    /// Responses of one UE beam towards a list of gNB beams: the effective
    /// channel row over the gNB's RF stage.
    pub fn response_row(&self, ue: usize, gnb: usize, ue_beam: usize, gnb_beams: &[usize], csi: Csi) -> CVector {
        match self.response_matrix(ue, gnb, csi) {
            Some(r) => CVector::from_iterator(gnb_beams.len(), gnb_beams.iter().map(|&b| r[(ue_beam, b)])),
            None => CVector::zeros(gnb_beams.len()),
        }
    }

    /// `w_c^H H` over the full gNB array (length `4 N_t`).
    pub fn antenna_row(&self, ue: usize, gnb: usize, ue_beam: usize, csi: Csi) -> CVector {
        let book = &self.ue_books[ue];
        let beam = book.beam(ue_beam);
        self.channel(ue, gnb, csi).combined_row(beam.panel, book.panel_weights(ue_beam))
    }

    /// Served-UE capacity of one gNB panel and of the whole gNB.
    pub fn rf_limits(&self) -> (usize, usize) {
        (self.cfg.n_rf_gnb_sec, self.cfg.n_rf_gnb())
    }

    pub fn noise_w(&self) -> f64 {
        self.cfg.noise_w()
    }

    pub fn p_max_w(&self) -> f64 {
        self.cfg.p_max_w()
    }
}
