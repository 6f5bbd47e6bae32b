//! Monte Carlo campaigns: realization loop, paired mode comparison,
//! aggregation and file output.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fs;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::allocation::{allocate, Mode};
use crate::channel::{pair_rng, synthesize_paths, Environment};
use crate::metrics::{network_report, summarize, LinkReport, NetworkReport, Summary};
use crate::radio::RadioMap;
use crate::scenario::{generate_deployment, panel_boresights, rng_for, Deployment, Limit, NetworkConfig, Position, UeOrientation};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// All modes' reports for one realization.
#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub realization_id: u64,
    /// Digest of the deployment, channels and sweep shared by every mode.
    pub radio_digest: u64,
    pub reports: Vec<NetworkReport>,
    /// Wall-clock allocation time per mode, seconds.
    pub alloc_seconds: Vec<(Mode, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub realization_id: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub cfg: NetworkConfig,
    pub modes: Vec<Mode>,
    pub realizations: Vec<RealizationResult>,
    pub failures: Vec<Failure>,
}

/// Which per-link quantity to collect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Sinr,
    Inr,
    Snr,
    Rate,
}

impl CampaignResult {
    pub fn links(&self, mode: Mode) -> impl Iterator<Item = &LinkReport> + '_ {
        self.realizations
            .iter()
            .flat_map(move |r| r.reports.iter().filter(move |rep| rep.mode == mode))
            .flat_map(|rep| rep.links.iter())
    }

    /// Summary over the links of every realization pooled together.
    pub fn pooled(&self, mode: Mode) -> Summary {
        let links: Vec<LinkReport> = self.links(mode).cloned().collect();
        summarize(&links, self.cfg.sinr_min_db)
    }

    /// Sorted samples of one metric for CDF plots.
    pub fn cdf_samples(&self, mode: Mode, metric: Metric) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .links(mode)
            .map(|l| match metric {
                Metric::Sinr => l.sinr_db,
                Metric::Inr => l.inr_db,
                Metric::Snr => l.snr_db,
                Metric::Rate => l.rate_bps,
            })
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn alloc_seconds(&self, mode: Mode) -> f64 {
        self.realizations
            .iter()
            .flat_map(|r| r.alloc_seconds.iter())
            .filter(|(m, _)| *m == mode)
            .map(|(_, s)| s)
            .sum()
    }
}

/// Stable digest of what every mode of a realization consumes.
pub fn radio_digest(radio: &RadioMap) -> u64 {
    let mut h = DefaultHasher::new();
    for per_gnb in &radio.channels {
        for ch in per_gnb {
            ch.frobenius_norm().to_bits().hash(&mut h);
            for p in &ch.exact_paths {
                p.gain.re.to_bits().hash(&mut h);
                p.gain.im.to_bits().hash(&mut h);
                p.aod_az_deg.to_bits().hash(&mut h);
                p.aoa_az_deg.to_bits().hash(&mut h);
            }
        }
    }
    for c in radio.candidates.iter().flatten() {
        (c.gnb, c.gnb_beam, c.ue_beam, c.rsrp.to_bits()).hash(&mut h);
    }
    h.finish()
}

/// Runs every mode on one radio map.
pub fn run_modes(radio: &RadioMap, modes: &[Mode]) -> Result<(Vec<NetworkReport>, Vec<(Mode, f64)>)> {
    let mut reports = Vec::with_capacity(modes.len());
    let mut times = Vec::with_capacity(modes.len());
    for &mode in modes {
        let start = Instant::now();
        let alloc = allocate(radio, mode)?;
        times.push((mode, start.elapsed().as_secs_f64()));
        reports.push(network_report(radio, &alloc));
    }
    Ok((reports, times))
}

pub fn run_realization(cfg: &NetworkConfig, modes: &[Mode], realization_id: u64) -> Result<RealizationResult> {
    let dep = generate_deployment(cfg, realization_id)?;
    let radio = RadioMap::synthesize(cfg, &dep)?;
    let (reports, alloc_seconds) = run_modes(&radio, modes)?;
    Ok(RealizationResult {
        realization_id,
        radio_digest: radio_digest(&radio),
        reports,
        alloc_seconds,
    })
}

/// Runs `cfg.n_realizations` paired realizations. A failing realization is
/// logged and recorded; the others still run.
pub fn run_campaign(cfg: &NetworkConfig, modes: &[Mode]) -> Result<CampaignResult> {
    cfg.validate()?;
    let outcomes: Vec<(u64, Result<RealizationResult>)> = (0..cfg.n_realizations as u64)
        .into_par_iter()
        .map(|r| (r, run_realization(cfg, modes, r)))
        .collect();
    let mut realizations = Vec::new();
    let mut failures = Vec::new();
    for (r, outcome) in outcomes {
        match outcome {
            Ok(res) => realizations.push(res),
            Err(e) => {
                log::error!("realization {r} failed: {e}");
                failures.push(Failure {
                    realization_id: r,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(CampaignResult {
        cfg: cfg.clone(),
        modes: modes.to_vec(),
        realizations,
        failures,
    })
}

pub const LINK_HEADER: [&str; 22] = [
    "realization_id",
    "mode",
    "ue",
    "status",
    "gnb",
    "gnb_beam",
    "ue_beam",
    "rss_w",
    "i_intra_w",
    "i_inter_w",
    "noise_w",
    "sinr_db",
    "inr_db",
    "inr_intra_db",
    "inr_inter_db",
    "snr_db",
    "rate_bps",
    "alloc_rank",
    "is_los",
    "is_handover",
    "n_shared",
    "schema_version",
];

fn opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn link_record(realization_id: u64, mode: Mode, l: &LinkReport) -> Vec<String> {
    let status = match l.status {
        crate::metrics::LinkStatus::Served => "served",
        crate::metrics::LinkStatus::Dropped => "dropped",
        crate::metrics::LinkStatus::Uncovered => "uncovered",
    };
    vec![
        realization_id.to_string(),
        mode.name().to_string(),
        l.ue.to_string(),
        status.to_string(),
        opt(l.gnb),
        opt(l.gnb_beam),
        opt(l.ue_beam),
        l.rss_w.to_string(),
        l.i_intra_w.to_string(),
        l.i_inter_w.to_string(),
        l.noise_w.to_string(),
        l.sinr_db.to_string(),
        l.inr_db.to_string(),
        l.inr_intra_db.to_string(),
        l.inr_inter_db.to_string(),
        l.snr_db.to_string(),
        l.rate_bps.to_string(),
        l.alloc_rank.to_string(),
        l.is_los.to_string(),
        l.is_handover.to_string(),
        l.n_shared.to_string(),
        SCHEMA_VERSION.to_string(),
    ]
}

#[derive(Serialize)]
struct RealizationSummary<'a> {
    realization_id: u64,
    radio_digest: String,
    modes: BTreeMap<&'static str, &'a Summary>,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema_version: u32,
    config: &'a NetworkConfig,
    modes: Vec<&'static str>,
    realizations_requested: usize,
    realizations_completed: usize,
    failures: &'a [Failure],
    aggregate: BTreeMap<&'static str, Summary>,
    realizations: Vec<RealizationSummary<'a>>,
}

pub const LINKS_FILE: &str = "links.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_FILE: &str = "timing.csv";

/// Writes `links.csv` and `summary.json`; `timing.csv` only when asked,
/// since wall-clock times differ between runs.
pub fn emit(result: &CampaignResult, out_dir: &Path, with_timing: bool) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let mut wtr = csv::Writer::from_path(out_dir.join(LINKS_FILE))?;
    wtr.write_record(LINK_HEADER)?;
    for r in &result.realizations {
        for rep in &r.reports {
            for l in &rep.links {
                wtr.write_record(link_record(r.realization_id, rep.mode, l))?;
            }
        }
    }
    wtr.flush()?;

    let doc = SummaryDoc {
        schema_version: SCHEMA_VERSION,
        config: &result.cfg,
        modes: result.modes.iter().map(|m| m.name()).collect(),
        realizations_requested: result.cfg.n_realizations,
        realizations_completed: result.realizations.len(),
        failures: &result.failures,
        aggregate: result.modes.iter().map(|&m| (m.name(), result.pooled(m))).collect(),
        realizations: result
            .realizations
            .iter()
            .map(|r| RealizationSummary {
                realization_id: r.realization_id,
                radio_digest: format!("{:016x}", r.radio_digest),
                modes: r.reports.iter().map(|rep| (rep.mode.name(), &rep.summary)).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(out_dir.join(SUMMARY_FILE), text)?;

    if with_timing {
        let mut wtr = csv::Writer::from_path(out_dir.join(TIMING_FILE))?;
        wtr.write_record(["realization_id", "mode", "alloc_seconds"])?;
        for r in &result.realizations {
            for (m, s) in &r.alloc_seconds {
                wtr.write_record([r.realization_id.to_string(), m.name().to_string(), s.to_string()])?;
            }
        }
        wtr.flush()?;
    }
    Ok(())
}

/// A random network small enough for the exhaustive oracle: 1 to 3 gNBs,
/// 1 to 6 UEs in a 60 m square, at most 4 monitored links per UE.
pub fn guard_rail_radio(base: &NetworkConfig, index: u64) -> Result<RadioMap> {
    let mut cfg = base.clone();
    cfg.area_side_m = 60.0;
    cfg.n_csi_rs = match cfg.n_csi_rs {
        Limit::Finite(n) if n <= 4 => Limit::Finite(n),
        _ => Limit::Finite(4),
    };
    cfg.validate()?;
    let mut rng = rng_for(cfg.seed, index, crate::scenario::stream::DEPLOYMENT, u64::MAX);
    let n_gnb = rng.gen_range(1..=3);
    let n_ue = rng.gen_range(1..=6);
    let side = cfg.area_side_m;
    let mut node = |h: f64| Position::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side), h);
    let gnb_positions: Vec<Position> = (0..n_gnb).map(|_| node(cfg.gnb_height_m)).collect();
    let ue_positions: Vec<Position> = (0..n_ue).map(|_| node(cfg.ue_height_m)).collect();
    let mut dep = Deployment::with_nodes(gnb_positions, ue_positions);
    dep.realization_id = index;
    if cfg.ue_orientation == UeOrientation::Random {
        for o in dep.ue_panel_orientations.iter_mut() {
            *o = panel_boresights(rng.gen_range(-180.0..180.0));
        }
    }
    let env = Environment::generate(&cfg, &dep);
    let paths = (0..n_ue)
        .map(|ue| {
            (0..n_gnb)
                .map(|g| synthesize_paths(&cfg, &dep, &env, g, ue, &mut pair_rng(&cfg, &dep, g, ue)))
                .collect()
        })
        .collect();
    RadioMap::build(&cfg, &dep, paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> NetworkConfig {
        let mut cfg = NetworkConfig::desk_scale();
        cfg.area_side_m = 100.0;
        cfg.gnb_density = 400.0;
        cfg.ue_density = 1200.0;
        cfg.n_t = 16;
        cfg.n_r = 4;
        cfg.n_realizations = 2;
        cfg.n_csi_rs = Limit::Finite(4);
        cfg
    }

    #[test]
    fn campaign_pairs_modes_on_shared_channels() {
        let cfg = tiny();
        let modes = [Mode::FivegNr, Mode::Ciaba];
        let res = run_campaign(&cfg, &modes).unwrap();
        assert!(res.failures.is_empty());
        assert_eq!(res.realizations.len(), 2);
        for r in &res.realizations {
            assert_eq!(r.reports.len(), 2);
            assert_eq!(r.reports[0].links.len(), r.reports[1].links.len());
            let again = run_realization(&cfg, &modes, r.realization_id).unwrap();
            assert_eq!(again.radio_digest, r.radio_digest);
            assert_eq!(again.reports, r.reports);
        }
    }

    #[test]
    fn emitted_files_are_reproducible() {
        let cfg = tiny();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [a.path(), b.path()] {
            emit(&run_campaign(&cfg, &[Mode::FivegNr, Mode::Diaba]).unwrap(), dir, false).unwrap();
        }
        for f in [LINKS_FILE, SUMMARY_FILE] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
        assert!(!a.path().join(TIMING_FILE).exists());
    }

    #[test]
    fn coverage_matches_rows() {
        let cfg = tiny();
        let res = run_campaign(&cfg, &[Mode::FivegNr]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit(&res, dir.path(), true).unwrap();
        let mut rdr = csv::Reader::from_path(dir.path().join(LINKS_FILE)).unwrap();
        let sinr_col = LINK_HEADER.iter().position(|h| *h == "sinr_db").unwrap();
        let rows: Vec<f64> = rdr
            .records()
            .map(|r| r.unwrap()[sinr_col].parse::<f64>().unwrap())
            .collect();
        let covered = rows.iter().filter(|&&s| s >= -5.0).count() as f64 / rows.len() as f64;
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["aggregate"]["5gnr"]["coverage"].as_f64().unwrap(), covered);
        assert!(dir.path().join(TIMING_FILE).exists());
    }

    #[test]
    fn empty_campaign_writes_headers_only() {
        let mut cfg = tiny();
        cfg.n_realizations = 0;
        let res = run_campaign(&cfg, &[Mode::FivegNr]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit(&res, dir.path(), false).unwrap();
        let text = fs::read_to_string(dir.path().join(LINKS_FILE)).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn guard_rail_instances_fit_the_oracle() {
        let cfg = tiny();
        for i in 0..10 {
            let r = guard_rail_radio(&cfg, i).unwrap();
            assert!(r.n_gnb() <= 3 && r.n_ue() <= 6);
            allocate(&r, Mode::Oracle).unwrap();
        }
    }
}
