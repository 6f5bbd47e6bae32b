//! Exhaustive SSB beam sweep of initial access.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::channel::{panel_for, ArrayLayout, MultiPanelChannel, N_PANELS};
use crate::codebook::FullCodebook;
use crate::linalg::CMatrix;

/// A (gNB beam, UE beam) pair connecting one UE to one gNB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamPairLink {
    pub ue: usize,
    pub gnb: usize,
    pub gnb_beam: usize,
    pub ue_beam: usize,
    /// Linear SSB RSRP in watts.
    pub rsrp: f64,
    /// The strongest path through this beam pair is the LOS ray.
    pub is_los: bool,
    /// 1 = strongest candidate of this UE.
    pub candidate_rank: usize,
}

/// Complex beam-pair responses `w_c^H H w_p` for every UE beam (rows) and
/// gNB beam (columns) of one UE–gNB channel.
pub fn beam_responses(channel: &MultiPanelChannel, gnb_book: &FullCodebook, ue_book: &FullCodebook) -> CMatrix {
    let (nu, ng) = (ue_book.per_panel(), gnb_book.per_panel());
    let mut out = CMatrix::zeros(ue_book.len(), gnb_book.len());
    for p in 0..N_PANELS {
        for q in 0..N_PANELS {
            if let Some(h) = channel.block(p, q) {
                let wc = &ue_book.sector(p).weights;
                let wp = &gnb_book.sector(q).weights;
                let r = wc.adjoint() * h * wp;
                out.view_mut((p * nu, q * ng), (nu, ng)).copy_from(&r);
            }
        }
    }
    out
}

/// Per-beam array gains of every gated path of one channel, used to decide
/// which path dominates a beam pair.
struct PathBeamGains {
    /// (ue panel, gnb panel, |alpha|, bounces) per gated path.
    paths: Vec<(usize, usize, f64, u8)>,
    /// |w_c^H a_r| per path per local UE beam.
    ue_gain: Vec<Vec<f64>>,
    /// |a_t^H w_p| per path per local gNB beam.
    gnb_gain: Vec<Vec<f64>>,
}

impl PathBeamGains {
    fn new(channel: &MultiPanelChannel, layout: &ArrayLayout, gnb_book: &FullCodebook, ue_book: &FullCodebook) -> Self {
        let mut paths = Vec::new();
        let mut ue_gain = Vec::new();
        let mut gnb_gain = Vec::new();
        for path in &channel.exact_paths {
            let Some((q, aod)) = panel_for(gnb_book.boresights(), path.aod_az_deg, path.aod_el_deg) else {
                continue;
            };
            let Some((p, aoa)) = panel_for(ue_book.boresights(), path.aoa_az_deg, path.aoa_el_deg) else {
                continue;
            };
            let a_r = layout.ue.steering(aoa, path.aoa_el_deg);
            let a_t = layout.gnb.steering(aod, path.aod_el_deg);
            ue_gain.push((ue_book.sector(p).weights.adjoint() * &a_r).iter().map(|x| x.norm()).collect());
            gnb_gain.push((gnb_book.sector(q).weights.adjoint() * &a_t).iter().map(|x| x.norm()).collect());
            paths.push((p, q, path.gain.norm(), path.bounces));
        }
        PathBeamGains { paths, ue_gain, gnb_gain }
    }

    fn dominant_is_los(&self, ue_panel: usize, ue_local: usize, gnb_panel: usize, gnb_local: usize) -> bool {
        let mut best = (f64::NEG_INFINITY, false);
        for (k, &(p, q, amp, bounces)) in self.paths.iter().enumerate() {
            if p != ue_panel || q != gnb_panel {
                continue;
            }
            let c = amp * self.ue_gain[k][ue_local] * self.gnb_gain[k][gnb_local];
            if c > best.0 {
                best = (c, bounces == 0);
            }
        }
        best.1
    }
}

/// Descending RSRP; ties resolve by (gNB, gNB beam, UE beam).
pub fn candidate_order(a: &BeamPairLink, b: &BeamPairLink) -> Ordering {
    b.rsrp
        .total_cmp(&a.rsrp)
        .then(a.gnb.cmp(&b.gnb))
        .then(a.gnb_beam.cmp(&b.gnb_beam))
        .then(a.ue_beam.cmp(&b.ue_beam))
}

/// Sweep every (gNB, gNB beam, UE beam) triple for one UE. `channels` and
/// `gnb_books` are indexed by gNB; `responses` may pass precomputed
/// [`beam_responses`] to avoid recomputation.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    ue: usize,
    channels: &[&MultiPanelChannel],
    responses: Option<&[&CMatrix]>,
    layout: &ArrayLayout,
    gnb_books: &[FullCodebook],
    ue_book: &FullCodebook,
    p_ssb_w: f64,
    floor_w: f64,
) -> Vec<BeamPairLink> {
    let mut out = Vec::new();
    for (gnb, channel) in channels.iter().enumerate() {
        if channel.is_zero() {
            continue;
        }
        let owned;
        let resp = match responses {
            Some(r) => r[gnb],
            None => {
                owned = beam_responses(channel, &gnb_books[gnb], ue_book);
                &owned
            }
        };
        let gains = PathBeamGains::new(channel, layout, &gnb_books[gnb], ue_book);
        let (nu, ng) = (ue_book.per_panel(), gnb_books[gnb].per_panel());
        for ue_beam in 0..resp.nrows() {
            for gnb_beam in 0..resp.ncols() {
                let rsrp = p_ssb_w * resp[(ue_beam, gnb_beam)].norm_sqr();
                if rsrp <= 0.0 || rsrp < floor_w {
                    continue;
                }
                out.push(BeamPairLink {
                    ue,
                    gnb,
                    gnb_beam,
                    ue_beam,
                    rsrp,
                    is_los: gains.dominant_is_los(ue_beam / nu, ue_beam % nu, gnb_beam / ng, gnb_beam % ng),
                    candidate_rank: 0,
                });
            }
        }
    }
    out.sort_by(candidate_order);
    for (i, c) in out.iter_mut().enumerate() {
        c.candidate_rank = i + 1;
    }
    out
}

/// Keeps the beam pairs whose RSRP is a local maximum over the neighbouring
/// gNB and UE beams of the same panels, then re-ranks. Roughly one candidate
/// per resolvable path survives.
pub fn keep_peaks(candidates: &[BeamPairLink], gnb_per_panel: usize, ue_per_panel: usize) -> Vec<BeamPairLink> {
    let rsrp: HashMap<(usize, usize, usize), f64> =
        candidates.iter().map(|c| ((c.gnb, c.gnb_beam, c.ue_beam), c.rsrp)).collect();
    let neighbours = |beam: usize, per_panel: usize| {
        let local = beam % per_panel;
        let mut v = vec![beam];
        if local > 0 {
            v.push(beam - 1);
        }
        if local + 1 < per_panel {
            v.push(beam + 1);
        }
        v
    };
    let mut out: Vec<BeamPairLink> = candidates
        .iter()
        .filter(|c| {
            neighbours(c.gnb_beam, gnb_per_panel).into_iter().all(|gb| {
                neighbours(c.ue_beam, ue_per_panel)
                    .into_iter()
                    .all(|ub| rsrp.get(&(c.gnb, gb, ub)).map_or(true, |&r| r <= c.rsrp))
            })
        })
        .copied()
        .collect();
    out.sort_by(candidate_order);
    for (i, c) in out.iter_mut().enumerate() {
        c.candidate_rank = i + 1;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Association {
    Served(BeamPairLink),
    Uncovered,
}

impl Association {
    pub fn served(&self) -> Option<&BeamPairLink> {
        match self {
            Association::Served(b) => Some(b),
            Association::Uncovered => None,
        }
    }
}

/// Strongest candidate, or `Uncovered` when the sweep found nothing.
pub fn initial_association(candidates: &[BeamPairLink]) -> Association {
    candidates
        .iter()
        .min_by(|a, b| candidate_order(a, b))
        .copied()
        .map_or(Association::Uncovered, Association::Served)
}

/// Time for a full sweep: every UE beam held for one SS burst period.
pub fn sweep_duration_s(ue_book_len: usize, ss_period_s: f64) -> f64 {
    ue_book_len as f64 * ss_period_s
}
