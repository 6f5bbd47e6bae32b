//! Link-level metrics evaluated against the true channels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::allocation::{Allocation, Mode};
use crate::linalg::{linear_to_db, CMatrix, CVector};
use crate::precoder::GnbPrecoderState;
use crate::radio::{Csi, RadioMap};
use crate::scenario::NetworkConfig;

/// Truncated, attenuated Shannon mapping from SINR to rate.
pub fn throughput(sinr_db: f64, cfg: &NetworkConfig) -> f64 {
    if !(sinr_db >= cfg.sinr_min_db) {
        0.0
    } else if sinr_db >= cfg.sinr_max_db {
        cfg.r_max_bps
    } else {
        let sinr = 10f64.powf(sinr_db / 10.0);
        cfg.alpha_loss * cfg.bandwidth_hz * (1.0 + sinr).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStatus {
    Served,
    /// Detected during the sweep but not allocated.
    Dropped,
    /// No candidate above the detection floor.
    Uncovered,
}

/// Per-UE outcome of one allocation. Unserved UEs carry zero powers and
/// `-inf` ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport {
    pub ue: usize,
    pub status: LinkStatus,
    pub gnb: Option<usize>,
    pub gnb_beam: Option<usize>,
    pub ue_beam: Option<usize>,
    pub rss_w: f64,
    pub i_intra_w: f64,
    pub i_inter_w: f64,
    pub noise_w: f64,
    pub sinr_db: f64,
    pub inr_db: f64,
    pub inr_intra_db: f64,
    pub inr_inter_db: f64,
    pub snr_db: f64,
    pub rate_bps: f64,
    /// Candidate rank of the serving link, 0 when unserved.
    pub alloc_rank: usize,
    pub is_los: bool,
    pub is_handover: bool,
    /// UEs time-sharing the serving gNB (TDMA only, otherwise 1).
    pub n_shared: usize,
}

impl LinkReport {
    pub fn is_served(&self) -> bool {
        self.status == LinkStatus::Served
    }

    fn unserved(ue: usize, status: LinkStatus, noise_w: f64) -> Self {
        LinkReport {
            ue,
            status,
            gnb: None,
            gnb_beam: None,
            ue_beam: None,
            rss_w: 0.0,
            i_intra_w: 0.0,
            i_inter_w: 0.0,
            noise_w,
            sinr_db: f64::NEG_INFINITY,
            inr_db: f64::NEG_INFINITY,
            inr_intra_db: f64::NEG_INFINITY,
            inr_inter_db: f64::NEG_INFINITY,
            snr_db: f64::NEG_INFINITY,
            rate_bps: 0.0,
            alloc_rank: 0,
            is_los: false,
            is_handover: false,
            n_shared: 0,
        }
    }
}

/// Received powers of one served UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTerms {
    pub rss: f64,
    pub intra: f64,
    pub inter: f64,
}

impl LinkTerms {
    pub fn sinr(&self, noise_w: f64) -> f64 {
        self.rss / (self.intra + self.inter + noise_w)
    }
}

/// Full-array precoders `4 N_t × N_u` of every gNB.
pub fn combined_precoders(radio: &RadioMap, states: &[GnbPrecoderState]) -> Vec<CMatrix> {
    states.iter().map(|s| s.w_combined(&radio.gnb_books[s.gnb])).collect()
}

fn column_powers<'a>(row: &'a CVector, w: &'a CMatrix, p: f64) -> impl Iterator<Item = f64> + 'a {
    (0..w.ncols()).map(move |k| p * w.column(k).dot(row).norm_sqr())
}

/// `P_i |w_c,i^H H_i,j w_p,i|²` on the true channel. `None` if `ue` is not
/// served by `state`.
pub fn rss(radio: &RadioMap, state: &GnbPrecoderState, ue: usize) -> Option<f64> {
    let i = state.position(ue)?;
    let w = state.w_combined(&radio.gnb_books[state.gnb]);
    let row = radio.antenna_row(ue, state.gnb, state.served[i].ue_beam, Csi::True);
    Some(state.p_per_ue * w.column(i).dot(&row).norm_sqr())
}

/// Power received from the co-scheduled columns of the serving gNB,
/// excluding the UE's own column.
pub fn intra_interference(radio: &RadioMap, state: &GnbPrecoderState, ue: usize) -> Option<f64> {
    let i = state.position(ue)?;
    let w = state.w_combined(&radio.gnb_books[state.gnb]);
    let row = radio.antenna_row(ue, state.gnb, state.served[i].ue_beam, Csi::True);
    Some(
        column_powers(&row, &w, state.p_per_ue)
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, x)| x)
            .sum(),
    )
}

/// Power sum over every column of every gNB other than `serving_gnb`.
pub fn inter_interference(
    radio: &RadioMap,
    states: &[GnbPrecoderState],
    ue: usize,
    ue_beam: usize,
    serving_gnb: usize,
) -> f64 {
    states
        .iter()
        .filter(|s| s.gnb != serving_gnb && s.n_served() > 0)
        .map(|s| {
            let w = s.w_combined(&radio.gnb_books[s.gnb]);
            let row = radio.antenna_row(ue, s.gnb, ue_beam, Csi::True);
            column_powers(&row, &w, s.p_per_ue).sum::<f64>()
        })
        .sum()
}

/// RSS and interference of every served UE from full-array precoders.
pub fn link_terms(radio: &RadioMap, states: &[GnbPrecoderState]) -> BTreeMap<usize, LinkTerms> {
    let ws = combined_precoders(radio, states);
    let mut out = BTreeMap::new();
    for s in states {
        for (i, link) in s.served.iter().enumerate() {
            let mut terms = LinkTerms { rss: 0.0, intra: 0.0, inter: 0.0 };
            for other in states.iter().filter(|o| o.n_served() > 0) {
                let row = radio.antenna_row(link.ue, other.gnb, link.ue_beam, Csi::True);
                for (k, x) in column_powers(&row, &ws[other.gnb], other.p_per_ue).enumerate() {
                    if other.gnb != s.gnb {
                        terms.inter += x;
                    } else if k == i {
                        terms.rss = x;
                    } else {
                        terms.intra += x;
                    }
                }
            }
            out.insert(link.ue, terms);
        }
    }
    out
}

/// Averaged TDMA link powers: full power on the serving beam, and one
/// randomly co-slotted beam per other gNB.
pub fn tdma_terms(radio: &RadioMap, alloc: &Allocation) -> BTreeMap<usize, LinkTerms> {
    let per_gnb = alloc.per_gnb();
    let p = radio.p_max_w();
    let draws = alloc.tdma.as_ref().map_or(&[][..], |t| &t.draws[..]);
    let mut out = BTreeMap::new();
    for (ue, link) in alloc.serving.iter().enumerate() {
        let Some(link) = link else { continue };
        let beam_power = |gnb: usize, gnb_beam: usize| {
            let row = radio.antenna_row(ue, gnb, link.ue_beam, Csi::True);
            p * radio.gnb_books[gnb].embedded(gnb_beam).dot(&row).norm_sqr()
        };
        let rss = beam_power(link.gnb, link.gnb_beam);
        let mut inter = 0.0;
        for draw in draws {
            for (g, members) in per_gnb.iter().enumerate() {
                if g == link.gnb || members.is_empty() {
                    continue;
                }
                let other = alloc.serving[members[slot_pick(draw[g], members.len())]].expect("member is served");
                inter += beam_power(g, other.gnb_beam);
            }
        }
        if !draws.is_empty() {
            inter /= draws.len() as f64;
        }
        out.insert(ue, LinkTerms { rss, intra: 0.0, inter });
    }
    out
}

/// Index of the co-slotted UE for a uniform draw in [0, 1).
pub fn slot_pick(u: f64, n: usize) -> usize {
    ((u * n as f64) as usize).min(n - 1)
}

/// Network-wide statistics of one allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_ue: usize,
    pub n_served: usize,
    pub n_dropped: usize,
    pub n_uncovered: usize,
    /// Fraction of deployed UEs with SINR at or above the coverage threshold.
    pub coverage: f64,
    /// Median SINR over deployed UEs, unserved counted as `-inf`.
    pub median_sinr_db: f64,
    pub median_rate_bps: f64,
    pub sum_rate_bps: f64,
    /// Served-link count per candidate rank.
    pub rank_histogram: BTreeMap<usize, usize>,
    /// Shares among served UEs.
    pub los_share: f64,
    pub nlos_share: f64,
    pub handover_share: f64,
    pub secondary_share: f64,
    /// Served UEs whose intra-cell INR exceeds 0 dB.
    pub intra_inr_positive_share: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        let (a, b) = (values[n / 2 - 1], values[n / 2]);
        if a == b {
            a
        } else {
            0.5 * (a + b)
        }
    }
}

pub fn summarize(links: &[LinkReport], sinr_min_db: f64) -> Summary {
    let n_ue = links.len();
    let served: Vec<&LinkReport> = links.iter().filter(|l| l.is_served()).collect();
    let share = |count: usize, of: usize| if of == 0 { 0.0 } else { count as f64 / of as f64 };
    let mut rank_histogram = BTreeMap::new();
    for l in &served {
        *rank_histogram.entry(l.alloc_rank).or_insert(0) += 1;
    }
    let mut sinrs: Vec<f64> = links.iter().map(|l| l.sinr_db).collect();
    let mut rates: Vec<f64> = links.iter().map(|l| l.rate_bps).collect();
    let n_los = served.iter().filter(|l| l.is_los).count();
    Summary {
        n_ue,
        n_served: served.len(),
        n_dropped: links.iter().filter(|l| l.status == LinkStatus::Dropped).count(),
        n_uncovered: links.iter().filter(|l| l.status == LinkStatus::Uncovered).count(),
        coverage: share(links.iter().filter(|l| l.sinr_db >= sinr_min_db).count(), n_ue),
        median_sinr_db: median(&mut sinrs),
        median_rate_bps: median(&mut rates),
        sum_rate_bps: links.iter().map(|l| l.rate_bps).sum(),
        rank_histogram,
        los_share: share(n_los, served.len()),
        nlos_share: share(served.len() - n_los, served.len()),
        handover_share: share(served.iter().filter(|l| l.is_handover).count(), served.len()),
        secondary_share: share(served.iter().filter(|l| l.alloc_rank > 1).count(), served.len()),
        intra_inr_positive_share: share(served.iter().filter(|l| l.inr_intra_db > 0.0).count(), served.len()),
    }
}

/// Per-UE reports plus summary, evaluated on the true channels from the
/// full-array precoders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub mode: Mode,
    pub links: Vec<LinkReport>,
    pub summary: Summary,
}

pub fn network_report(radio: &RadioMap, alloc: &Allocation) -> NetworkReport {
    let cfg = &radio.cfg;
    let noise = radio.noise_w();
    let tdma = alloc.mode == Mode::CbfTdma;
    let terms = if tdma {
        tdma_terms(radio, alloc)
    } else {
        link_terms(radio, &alloc.states)
    };
    let per_gnb = alloc.per_gnb();
    let links: Vec<LinkReport> = (0..radio.n_ue())
        .map(|ue| match (&alloc.serving[ue], terms.get(&ue)) {
            (Some(link), Some(t)) => {
                let sinr_db = linear_to_db(t.sinr(noise));
                let n_shared = if tdma { per_gnb[link.gnb].len() } else { 1 };
                LinkReport {
                    ue,
                    status: LinkStatus::Served,
                    gnb: Some(link.gnb),
                    gnb_beam: Some(link.gnb_beam),
                    ue_beam: Some(link.ue_beam),
                    rss_w: t.rss,
                    i_intra_w: t.intra,
                    i_inter_w: t.inter,
                    noise_w: noise,
                    sinr_db,
                    inr_db: linear_to_db((t.intra + t.inter) / noise),
                    inr_intra_db: linear_to_db(t.intra / noise),
                    inr_inter_db: linear_to_db(t.inter / noise),
                    snr_db: linear_to_db(t.rss / noise),
                    rate_bps: throughput(sinr_db, cfg) / n_shared as f64,
                    alloc_rank: link.candidate_rank,
                    is_los: link.is_los,
                    is_handover: alloc.is_handover(ue),
                    n_shared,
                }
            }
            _ => {
                let status = if radio.candidates[ue].is_empty() {
                    LinkStatus::Uncovered
                } else {
                    LinkStatus::Dropped
                };
                LinkReport::unserved(ue, status, noise)
            }
        })
        .collect();
    let summary = summarize(&links, cfg.sinr_min_db);
    NetworkReport {
        mode: alloc.mode,
        links,
        summary,
    }
}
