//! Sector sweep codebooks and the angular lattice used for channel
//! estimation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::{PanelGeometry, N_PANELS, PANEL_HALF_WIDTH_DEG};
use crate::error::{Error, Result};
use crate::linalg::{wrap_deg, CMatrix, CVector, C64};
use crate::scenario::Limit;

#[derive(Debug, Clone)]
pub struct BeamEntry {
    pub beam_id: usize,
    pub steer_az_deg: f64,
    pub weights: CVector,
}

/// `2^n_q` steered beams uniformly covering one panel's (-45°, 45°).
#[derive(Debug, Clone)]
pub struct SectorCodebook {
    pub n_q: u32,
    pub geometry: PanelGeometry,
    pub entries: Vec<BeamEntry>,
    /// Weight vectors as columns, `N × 2^n_q`.
    pub weights: CMatrix,
    /// `weights^H weights`.
    pub gram: CMatrix,
}

impl SectorCodebook {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn spacing_deg(&self) -> f64 {
        2.0 * PANEL_HALF_WIDTH_DEG / self.len() as f64
    }
}

pub fn build_sector_codebook(n_q: u32, geometry: PanelGeometry) -> SectorCodebook {
    assert!(n_q >= 1, "sector codebook needs at least one bit");
    let count = 1usize << n_q;
    let spacing = 2.0 * PANEL_HALF_WIDTH_DEG / count as f64;
    let entries: Vec<BeamEntry> = (0..count)
        .map(|i| {
            let az = -PANEL_HALF_WIDTH_DEG + (i as f64 + 0.5) * spacing;
            BeamEntry {
                beam_id: i,
                steer_az_deg: az,
                weights: geometry.steering(az, 0.0),
            }
        })
        .collect();
    let columns: Vec<CVector> = entries.iter().map(|e| e.weights.clone()).collect();
    let weights = CMatrix::from_columns(&columns);
    let gram = weights.adjoint() * &weights;
    SectorCodebook {
        n_q,
        geometry,
        entries,
        weights,
        gram,
    }
}

/// Union of the four panel codebooks of one node. Global beam id
/// `panel * per_panel + local`.
#[derive(Debug, Clone)]
pub struct FullCodebook {
    books: [Arc<SectorCodebook>; N_PANELS],
    boresights: [f64; N_PANELS],
}

/// Where a global beam lives and where it points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalBeam {
    pub id: usize,
    pub panel: usize,
    pub local: usize,
    pub steer_az_deg: f64,
}

pub fn full_codebook(books: [Arc<SectorCodebook>; N_PANELS], orientations: [f64; N_PANELS]) -> Result<FullCodebook> {
    let len = books[0].len();
    let elements = books[0].geometry.elements();
    if books.iter().any(|b| b.len() != len || b.geometry.elements() != elements) {
        return Err(Error::Dimension("sector codebooks differ in size".into()));
    }
    Ok(FullCodebook {
        books,
        boresights: orientations,
    })
}

impl FullCodebook {
    /// Same sector book on every panel.
    pub fn uniform(book: Arc<SectorCodebook>, orientations: [f64; N_PANELS]) -> Self {
        FullCodebook {
            books: std::array::from_fn(|_| Arc::clone(&book)),
            boresights: orientations,
        }
    }

    pub fn per_panel(&self) -> usize {
        self.books[0].len()
    }

    pub fn len(&self) -> usize {
        N_PANELS * self.per_panel()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn panel_elements(&self) -> usize {
        self.books[0].geometry.elements()
    }

    pub fn sector(&self, panel: usize) -> &SectorCodebook {
        &self.books[panel]
    }

    pub fn boresights(&self) -> &[f64; N_PANELS] {
        &self.boresights
    }

    pub fn beam(&self, id: usize) -> GlobalBeam {
        let panel = id / self.per_panel();
        let local = id % self.per_panel();
        GlobalBeam {
            id,
            panel,
            local,
            steer_az_deg: wrap_deg(self.boresights[panel] + self.books[panel].entries[local].steer_az_deg),
        }
    }

    pub fn panel_weights(&self, id: usize) -> &CVector {
        let b = self.beam(id);
        &self.books[b.panel].entries[b.local].weights
    }

    /// Full-array weight vector: the panel weights in the panel's slice,
    /// zeros elsewhere.
    pub fn embedded(&self, id: usize) -> CVector {
        let n = self.panel_elements();
        let b = self.beam(id);
        let mut w = CVector::zeros(N_PANELS * n);
        w.rows_mut(b.panel * n, n).copy_from(self.panel_weights(id));
        w
    }

    /// Inner product `w_a^H w_b` of two embedded beams.
    pub fn gram(&self, a: usize, b: usize) -> C64 {
        let (ba, bb) = (self.beam(a), self.beam(b));
        if ba.panel != bb.panel {
            C64::new(0.0, 0.0)
        } else {
            self.books[ba.panel].gram[(ba.local, bb.local)]
        }
    }
}

/// Angular lattice of the channel-estimation codebook.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimationGrid {
    pub n_q: Limit,
}

pub fn resolution(n_q: Limit) -> Result<(f64, f64)> {
    match n_q {
        Limit::Unbounded => Err(Error::UnboundedResolution),
        Limit::Finite(bits) => {
            let n_sec = N_PANELS as f64;
            let az = 360.0 / (n_sec * 2f64.powi(bits as i32));
            let el = 180.0 / (n_sec * 2f64.powi(bits as i32 - 1));
            Ok((az, el))
        }
    }
}

/// A snapped angle together with its lattice index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapped {
    pub index: i64,
    pub angle_deg: f64,
}

/// Nearest lattice index for a position `u` in units of steps, with exact
/// midpoints going to the smaller index.
fn nearest_index(u: f64) -> i64 {
    (u - 0.5).ceil() as i64
}

impl EstimationGrid {
    pub fn new(n_q: Limit) -> Self {
        EstimationGrid { n_q }
    }

    pub fn is_exact(&self) -> bool {
        self.n_q == Limit::Unbounded
    }

    pub fn az_step_deg(&self) -> Option<f64> {
        resolution(self.n_q).ok().map(|r| r.0)
    }

    pub fn el_step_deg(&self) -> Option<f64> {
        resolution(self.n_q).ok().map(|r| r.1)
    }

    /// Snaps a global azimuth onto the lattice `anchor + (k + 1/2) step`.
    pub fn snap_az(&self, az_deg: f64, anchor_deg: f64) -> Result<Snapped> {
        let (step, _) = resolution(self.n_q)?;
        let count = (360.0 / step).round() as i64;
        let rel = wrap_deg(az_deg - anchor_deg);
        let k = nearest_index(rel / step - 0.5);
        Ok(Snapped {
            index: k.rem_euclid(count),
            angle_deg: wrap_deg(anchor_deg + (k as f64 + 0.5) * step),
        })
    }

    /// Snaps an elevation onto `-90 + (k + 1/2) step`.
    pub fn snap_el(&self, el_deg: f64) -> Result<Snapped> {
        let (_, step) = resolution(self.n_q)?;
        let count = (180.0 / step).round() as i64;
        let k = nearest_index((el_deg + 90.0) / step - 0.5).clamp(0, count - 1);
        Ok(Snapped {
            index: k,
            angle_deg: -90.0 + (k as f64 + 0.5) * step,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::panel_for;
    use proptest::prelude::*;

    const AXES: [f64; 4] = [0.0, 90.0, 180.0, -90.0];

    fn book(n_q: u32, n: usize) -> Arc<SectorCodebook> {
        Arc::new(build_sector_codebook(n_q, PanelGeometry::for_elements(n)))
    }

    #[test]
    fn sixteen_beam_book_spacing() {
        let b = book(4, 64);
        assert_eq!(b.len(), 16);
        assert_eq!(b.spacing_deg(), 5.625);
        for w in b.entries.windows(2) {
            assert!((w[1].steer_az_deg - w[0].steer_az_deg - 5.625).abs() < 1e-12);
        }
    }

    #[test]
    fn two_beam_book() {
        let b = book(1, 16);
        let az: Vec<f64> = b.entries.iter().map(|e| e.steer_az_deg).collect();
        assert_eq!(az, vec![-22.5, 22.5]);
    }

    #[test]
    fn six_bit_book_has_256_global_beams() {
        let b = book(6, 16);
        assert_eq!(b.len(), 64);
        assert_eq!(FullCodebook::uniform(b, AXES).len(), 256);
    }

    #[test]
    fn full_codebook_union_and_rotation() {
        let b = book(4, 16);
        let full = full_codebook(std::array::from_fn(|_| Arc::clone(&b)), [0.0, 90.0, 180.0, 270.0]).unwrap();
        assert_eq!(full.len(), 64);
        // beam 0 of the 180° panel: local -45 + half spacing
        let beam = full.beam(2 * 16);
        assert_eq!(beam.panel, 2);
        assert!((beam.steer_az_deg - (135.0 + 2.8125)).abs() < 1e-12);
        for id in 0..full.len() {
            let w = full.embedded(id);
            assert!((w.norm() - 1.0).abs() < 1e-12);
            let p = full.beam(id).panel;
            for (i, x) in w.iter().enumerate() {
                if i / 16 != p {
                    assert_eq!(*x, C64::new(0.0, 0.0));
                }
            }
        }
        let mismatched = full_codebook([Arc::clone(&b), Arc::clone(&b), Arc::clone(&b), book(3, 16)], AXES);
        assert!(mismatched.is_err());
    }

    #[test]
    fn gram_matches_embedded_products() {
        let full = FullCodebook::uniform(book(2, 16), AXES);
        for a in 0..full.len() {
            for b in 0..full.len() {
                let direct = full.embedded(a).dotc(&full.embedded(b));
                assert!((direct - full.gram(a, b)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn global_codebook_covers_every_azimuth() {
        let full = FullCodebook::uniform(book(4, 64), AXES);
        let step = resolution(Limit::Finite(4)).unwrap().0;
        let mut az = -180.0;
        while az < 180.0 {
            let nearest = (0..full.len())
                .map(|id| wrap_deg(full.beam(id).steer_az_deg - az).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= step / 2.0 + 1e-9, "az {az}: {nearest}");
            az += 0.1;
        }
    }

    #[test]
    fn adjacent_beams_overlap_without_holes() {
        let b = book(4, 64);
        let peak = 1.0;
        let mut worst = f64::INFINITY;
        let mut phi = -44.9;
        while phi < 45.0 {
            let a = b.geometry.steering(phi, 0.0);
            let best = b.entries.iter().map(|e| e.weights.dotc(&a).norm_sqr()).fold(0.0, f64::max);
            worst = worst.min(best);
            phi += 0.1;
        }
        assert!(worst > 0.0 && worst < peak);
        // crossover of an 8-wide aperture at this spacing stays within 3 dB
        assert!(worst > 0.5, "worst crossover gain {worst}");
        // and each beam peaks at its own steering angle
        for e in &b.entries {
            let g = e.weights.dotc(&b.geometry.steering(e.steer_az_deg, 0.0)).norm_sqr();
            assert!((g - peak).abs() < 1e-12);
            assert!(panel_for(&AXES, e.steer_az_deg, 0.0).unwrap().0 == 0);
        }
    }

    #[test]
    fn resolution_values() {
        assert_eq!(resolution(Limit::Finite(4)).unwrap(), (5.625, 5.625));
        assert_eq!(resolution(Limit::Finite(6)).unwrap(), (1.40625, 1.40625));
        assert_eq!(resolution(Limit::Finite(2)).unwrap(), (22.5, 22.5));
        assert!(matches!(resolution(Limit::Unbounded), Err(Error::UnboundedResolution)));
    }

    #[test]
    fn snapping_examples() {
        let grid = EstimationGrid::new(Limit::Finite(4));
        let s = grid.snap_az(7.0, 0.0).unwrap();
        assert_eq!(s.angle_deg, 8.4375);
        assert!((s.angle_deg - 7.0).abs() <= 2.8125);
        // exact midpoint between 2.8125 and 8.4375 goes to the smaller one
        assert_eq!(grid.snap_az(5.625, 0.0).unwrap().angle_deg, 2.8125);
        assert_eq!(grid.snap_el(90.0).unwrap().angle_deg, 90.0 - 2.8125);
        assert_eq!(grid.snap_el(-90.0).unwrap().angle_deg, -90.0 + 2.8125);
        assert!(EstimationGrid::new(Limit::Unbounded).snap_az(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn snapped_angles_lie_within_half_step(bits in 1u32..12, az in -180.0f64..180.0,
                                               el in -90.0f64..=90.0, anchor in -180.0f64..180.0) {
            let grid = EstimationGrid::new(Limit::Finite(bits));
            let (az_step, el_step) = resolution(Limit::Finite(bits)).unwrap();
            let s = grid.snap_az(az, anchor).unwrap();
            prop_assert!(wrap_deg(s.angle_deg - az).abs() <= az_step / 2.0 + 1e-9);
            // lattice membership
            let k = wrap_deg(s.angle_deg - anchor) / az_step - 0.5;
            prop_assert!((k - k.round()).abs() < 1e-6);
            let e = grid.snap_el(el).unwrap();
            prop_assert!((e.angle_deg - el).abs() <= el_step / 2.0 + 1e-9);
        }
    }
}
