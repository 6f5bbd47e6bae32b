//! Two-stage hybrid precoding (RF beam selection + zero-forcing baseband)
//! and the fully digital zero-forcing reference.

use crate::beamsweep::BeamPairLink;
use crate::codebook::FullCodebook;
use crate::csi::EffectiveChannel;
use crate::linalg::{right_pseudo_inverse, CMatrix, CVector, C64};
use crate::radio::{Csi, RadioMap};
use crate::{Error, Result};

/// gNB transmitter architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// One RF chain per served UE, analog beam from the sweep codebook.
    Hybrid,
    /// One RF chain per element, unconstrained digital precoding.
    Digital,
}

/// Precoder of one gNB for its current served set.
///
/// For [`Architecture::Hybrid`] `w_bb` is the normalized `N_u × N_u`
/// baseband matrix acting on the served beams; for
/// [`Architecture::Digital`] it is the full `4 N_t × N_u` precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct GnbPrecoderState {
    pub gnb: usize,
    pub arch: Architecture,
    /// Served links, ordered by UE id.
    pub served: Vec<BeamPairLink>,
    pub w_bb: CMatrix,
    pub p_per_ue: f64,
}

/// Rejects served sets that exceed the RF chains of a panel or the gNB.
pub fn check_capacity(
    gnb: usize,
    served: &[BeamPairLink],
    book: &FullCodebook,
    per_panel: Option<usize>,
    total: usize,
) -> Result<()> {
    if let Some(limit) = per_panel {
        let mut counts = [0usize; crate::channel::N_PANELS];
        for b in served {
            let panel = book.beam(b.gnb_beam).panel;
            counts[panel] += 1;
            if counts[panel] > limit {
                return Err(Error::Capacity { gnb, panel: Some(panel), limit });
            }
        }
    }
    if served.len() > total {
        return Err(Error::Capacity { gnb, panel: None, limit: total });
    }
    Ok(())
}

/// RF stage: column `i` is the full-array embedding of UE `i`'s serving beam.
pub fn rf_stage(
    gnb: usize,
    served: &[BeamPairLink],
    book: &FullCodebook,
    per_panel: usize,
    total: usize,
) -> Result<CMatrix> {
    check_capacity(gnb, served, book, Some(per_panel), total)?;
    let n = book.len() / book.per_panel() * book.panel_elements();
    let mut w = CMatrix::zeros(n, served.len());
    for (i, b) in served.iter().enumerate() {
        w.set_column(i, &book.embedded(b.gnb_beam));
    }
    Ok(w)
}

fn aggregate(rows: &[EffectiveChannel]) -> Result<CMatrix> {
    let width = rows.first().map_or(0, |r| r.row.len());
    if rows.iter().any(|r| r.row.len() != width) {
        return Err(Error::Dimension("effective rows differ in length".into()));
    }
    Ok(CMatrix::from_fn(rows.len(), width, |i, j| rows[i].row[j]))
}

/// `H̄^+` with `H̄ W = I`, or a rank-deficiency error naming the rows' UEs.
pub fn zero_forcing(rows: &[EffectiveChannel], max_condition: f64) -> Result<CMatrix> {
    let h_bar = aggregate(rows)?;
    let (pinv, condition) = right_pseudo_inverse(&h_bar);
    match pinv {
        Some(w) if condition <= max_condition => Ok(w),
        _ => Err(Error::RankDeficient {
            ues: rows.iter().map(|r| r.ue).collect(),
            condition,
        }),
    }
}

/// Scales column `i` of `w` by `1/sqrt(w_i^H G w_i)`, the norm of the
/// composed precoder when `G` is the Gram matrix of the RF columns.
pub fn normalize_columns(w: &mut CMatrix, gram: Option<&CMatrix>) {
    for mut col in w.column_iter_mut() {
        let power = match gram {
            Some(g) => (col.adjoint() * g * col.clone_owned())[(0, 0)].re,
            None => col.norm_squared(),
        };
        if power > 0.0 {
            col /= C64::new(power.sqrt(), 0.0);
        }
    }
}

/// Baseband zero-forcing over effective channels, normalized so that every
/// composed column `W_RF w_BB,i` has unit norm.
pub fn zf_stage(rows: &[EffectiveChannel], rf_gram: &CMatrix, max_condition: f64) -> Result<CMatrix> {
    let mut w = zero_forcing(rows, max_condition)?;
    normalize_columns(&mut w, Some(rf_gram));
    Ok(w)
}

pub fn compose(w_rf: &CMatrix, w_bb: &CMatrix) -> CMatrix {
    w_rf * w_bb
}

/// Fully digital zero-forcing over full-array rows `w_c^H Ĥ`, unit-norm columns.
pub fn dbf_precoder(rows: &[EffectiveChannel], max_condition: f64) -> Result<CMatrix> {
    let mut w = zero_forcing(rows, max_condition)?;
    normalize_columns(&mut w, None);
    Ok(w)
}

impl GnbPrecoderState {
    pub fn empty(gnb: usize, arch: Architecture) -> Self {
        GnbPrecoderState {
            gnb,
            arch,
            served: Vec::new(),
            w_bb: CMatrix::zeros(0, 0),
            p_per_ue: 0.0,
        }
    }

    /// Builds the precoder for `served` (any order; stored sorted by UE id)
    /// from the estimated channels, checking RF-chain capacity.
    pub fn build(radio: &RadioMap, gnb: usize, arch: Architecture, mut served: Vec<BeamPairLink>) -> Result<Self> {
        served.sort_by_key(|b| b.ue);
        if served.is_empty() {
            return Ok(Self::empty(gnb, arch));
        }
        let book = &radio.gnb_books[gnb];
        let (per_panel, total) = radio.rf_limits();
        let max_condition = radio.cfg.max_condition;
        let w_bb = match arch {
            Architecture::Hybrid => {
                check_capacity(gnb, &served, book, Some(per_panel), total)?;
                let beams: Vec<usize> = served.iter().map(|b| b.gnb_beam).collect();
                let rows: Vec<EffectiveChannel> = served
                    .iter()
                    .map(|b| EffectiveChannel {
                        ue: b.ue,
                        row: radio.response_row(b.ue, gnb, b.ue_beam, &beams, Csi::Estimated),
                    })
                    .collect();
                let gram = CMatrix::from_fn(beams.len(), beams.len(), |i, j| book.gram(beams[i], beams[j]));
                zf_stage(&rows, &gram, max_condition)?
            }
            Architecture::Digital => {
                check_capacity(gnb, &served, book, None, total)?;
                let rows: Vec<EffectiveChannel> = served
                    .iter()
                    .map(|b| EffectiveChannel {
                        ue: b.ue,
                        row: radio.antenna_row(b.ue, gnb, b.ue_beam, Csi::Estimated),
                    })
                    .collect();
                dbf_precoder(&rows, max_condition)?
            }
        };
        let p_per_ue = radio.p_max_w() / served.len() as f64;
        Ok(GnbPrecoderState {
            gnb,
            arch,
            served,
            w_bb,
            p_per_ue,
        })
    }

    pub fn n_served(&self) -> usize {
        self.served.len()
    }

    /// Column index of `ue` in this state.
    pub fn position(&self, ue: usize) -> Option<usize> {
        self.served.binary_search_by_key(&ue, |b| b.ue).ok()
    }

    pub fn gnb_beams(&self) -> Vec<usize> {
        self.served.iter().map(|b| b.gnb_beam).collect()
    }

    /// Effective channel of (ue, ue_beam) in this state's transmit basis.
    pub fn basis_row(&self, radio: &RadioMap, ue: usize, ue_beam: usize, csi: Csi) -> CVector {
        match self.arch {
            Architecture::Hybrid => radio.response_row(ue, self.gnb, ue_beam, &self.gnb_beams(), csi),
            Architecture::Digital => radio.antenna_row(ue, self.gnb, ue_beam, csi),
        }
    }

    /// Received power from every column at (ue, ue_beam), including `p_per_ue`.
    pub fn column_powers(&self, radio: &RadioMap, ue: usize, ue_beam: usize) -> Vec<f64> {
        if self.served.is_empty() {
            return Vec::new();
        }
        let row = self.basis_row(radio, ue, ue_beam, Csi::True);
        self.powers_from_row(&row)
    }

    pub fn powers_from_row(&self, row: &CVector) -> Vec<f64> {
        self.w_bb.tr_mul(row).iter().map(|a| self.p_per_ue * a.norm_sqr()).collect()
    }

    /// RF stage `4 N_t × N_u`, or `None` for a digital gNB.
    pub fn w_rf(&self, book: &FullCodebook) -> Option<CMatrix> {
        match self.arch {
            Architecture::Hybrid => {
                let n = crate::channel::N_PANELS * book.panel_elements();
                let mut w = CMatrix::zeros(n, self.served.len());
                for (i, b) in self.served.iter().enumerate() {
                    w.set_column(i, &book.embedded(b.gnb_beam));
                }
                Some(w)
            }
            Architecture::Digital => None,
        }
    }

    /// Full-array precoder `4 N_t × N_u`.
    pub fn w_combined(&self, book: &FullCodebook) -> CMatrix {
        match self.w_rf(book) {
            Some(rf) => compose(&rf, &self.w_bb),
            None => self.w_bb.clone(),
        }
    }

    pub fn total_power(&self) -> f64 {
        self.p_per_ue * self.served.len() as f64
    }
}
