//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hbfsim::allocation::{allocate, constraint_violations, Allocation, Mode};
use hbfsim::beamsweep::BeamPairLink;
use hbfsim::codebook::{resolution, EstimationGrid};
use hbfsim::metrics::{intra_interference, network_report, rss, throughput, LinkStatus};
use hbfsim::precoder::{Architecture, GnbPrecoderState};
use hbfsim::radio::RadioMap;
use hbfsim::runner::{emit, guard_rail_radio, run_campaign, CampaignResult, LINKS_FILE, SUMMARY_FILE};
use hbfsim::scenario::{generate_deployment, panel_boresights, Deployment, Limit, NetworkConfig, Position};
use hbfsim::Error;

type CMat = DMatrix<Complex64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_deployment(rng: &mut ChaCha8Rng, gnbs: &[Position], n_ue: usize, side: f64, cfg: &NetworkConfig) -> Deployment {
    let ues = (0..n_ue)
        .map(|_| Position::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side), cfg.ue_height_m))
        .collect();
    let mut dep = Deployment::with_nodes(gnbs.to_vec(), ues);
    for o in dep.ue_panel_orientations.iter_mut() {
        *o = panel_boresights(rng.gen_range(-180.0..180.0));
    }
    dep
}

fn grid_gnbs(per_side: usize, side: f64, height: f64) -> Vec<Position> {
    let cell = side / per_side as f64;
    let mut out = Vec::new();
    for i in 0..per_side {
        for j in 0..per_side {
            out.push(Position::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell, height));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// 1. zero-forcing cancels intra-cell interference under exact CSI

fn zf_cancellation() -> Outcome {
    let cfg = NetworkConfig::desk_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let gnb = [Position::new(50.0, 50.0, cfg.gnb_height_m)];
    let (mut instances, mut worst) = (0, 0.0f64);
    let mut attempts = 0;
    while instances < 100 {
        attempts += 1;
        if attempts > 2000 {
            return outcome(false, format!("only {instances} nonsingular instances found"));
        }
        let n_ue = rng.gen_range(2..=8);
        let mut dep = random_deployment(&mut rng, &gnb, n_ue, 100.0, &cfg);
        dep.realization_id = attempts;
        let radio = RadioMap::synthesize(&cfg, &dep).unwrap();
        let served: Vec<BeamPairLink> = radio.candidates.iter().filter_map(|c| c.first().copied()).collect();
        if served.len() < 2 {
            continue;
        }
        let state = match GnbPrecoderState::build(&radio, 0, Architecture::Hybrid, served) {
            Ok(s) => s,
            Err(Error::RankDeficient { .. }) | Err(Error::Capacity { .. }) => continue,
            Err(e) => return outcome(false, e.to_string()),
        };
        for link in &state.served {
            let s = rss(&radio, &state, link.ue).unwrap();
            let i = intra_interference(&radio, &state, link.ue).unwrap();
            worst = worst.max(i / s);
        }
        instances += 1;
    }
    outcome(worst <= 1e-12, format!("100 instances, max I_intra/RSS = {worst:.3e} (limit 1e-12)"))
}

// ---------------------------------------------------------------------------
// 2. throughput mapping

fn throughput_endpoints() -> Outcome {
    let cfg = NetworkConfig::default();
    let rate = |db: f64| throughput(db, &cfg);
    let oracle = |db: f64| 0.75 * 400e6 * (1.0 + 10f64.powf(db / 10.0)).log2();
    let at_min = rate(-5.0);
    let above_min = rate(-4.9);
    let below = rate(-5.0 - 1e-9);
    let sat = rate(20.05);
    let ten = rate(10.0);
    let checks = [
        at_min > 0.0 && above_min > 0.0,
        below == 0.0,
        (sat - 2e9).abs() <= 0.005 * 2e9,
        (oracle(20.05) - 2e9).abs() <= 0.005 * 2e9,
        (ten - 1.0378e9).abs() <= 0.001 * 1.0378e9,
        (ten - oracle(10.0)).abs() <= 1e-6,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "R(-5) = {:.4e}, R(-5-1e-9) = {below}, R(20.05) = {sat:.6e}, R(10) = {ten:.6e}",
            at_min
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. estimation lattice

fn quantization_resolution() -> Outcome {
    let r4 = resolution(Limit::Finite(4)).unwrap();
    let r6 = resolution(Limit::Finite(6)).unwrap();
    let exact = r4 == (5.625, 5.625) && r6 == (1.40625, 1.40625);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for bits in [4u32, 6] {
        let grid = EstimationGrid::new(Limit::Finite(bits));
        let (az_step, el_step) = resolution(Limit::Finite(bits)).unwrap();
        for _ in 0..10_000 {
            let az: f64 = rng.gen_range(-180.0..180.0);
            let anchor: f64 = rng.gen_range(-180.0..180.0);
            let el: f64 = rng.gen_range(-90.0..=90.0);
            let s = grid.snap_az(az, anchor).unwrap().angle_deg;
            let d_az = ((s - az + 540.0).rem_euclid(360.0) - 180.0).abs();
            let d_el = (grid.snap_el(el).unwrap().angle_deg - el).abs();
            worst = worst.max(d_az / (az_step / 2.0)).max(d_el / (el_step / 2.0));
        }
    }
    outcome(
        exact && worst <= 1.0 + 1e-12,
        format!("res(4) = {r4:?}, res(6) = {r6:?}, max error / half step = {worst:.6}"),
    )
}

// ---------------------------------------------------------------------------
// 4. oracle dominance, cross-checked by a naive enumerator on dense matrices

struct DenseNet {
    n_gnb: usize,
    /// `w_c^H H` over the gNB array for every candidate's UE beam:
    /// `rows[ue][cand][gnb]`.
    rows: Vec<Vec<Vec<CMat>>>,
    /// Embedded gNB beam per candidate, `beams[ue][cand]`.
    beams: Vec<Vec<CMat>>,
    panels: Vec<Vec<usize>>,
    gnbs: Vec<Vec<usize>>,
}

fn dense_net(radio: &RadioMap, cands: &[Vec<BeamPairLink>]) -> DenseNet {
    let dense: Vec<Vec<CMat>> = (0..radio.n_ue())
        .map(|u| (0..radio.n_gnb()).map(|g| radio.channels[u][g].to_dense()).collect())
        .collect();
    let mut rows = Vec::new();
    let mut beams = Vec::new();
    let mut panels = Vec::new();
    let mut gnbs = Vec::new();
    for (u, cs) in cands.iter().enumerate() {
        rows.push(
            cs.iter()
                .map(|c| {
                    let wc = radio.ue_books[u].embedded(c.ue_beam);
                    (0..radio.n_gnb()).map(|g| {
                        let r = wc.adjoint() * &dense[u][g];
                        CMat::from_row_slice(1, r.len(), r.as_slice())
                    }).collect()
                })
                .collect(),
        );
        beams.push(cs.iter().map(|c| {
            let v = radio.gnb_books[c.gnb].embedded(c.gnb_beam);
            CMat::from_column_slice(v.len(), 1, v.as_slice())
        }).collect());
        panels.push(cs.iter().map(|c| radio.gnb_books[c.gnb].beam(c.gnb_beam).panel).collect());
        gnbs.push(cs.iter().map(|c| c.gnb).collect());
    }
    DenseNet {
        n_gnb: radio.n_gnb(),
        rows,
        beams,
        panels,
        gnbs,
    }
}

/// Sum throughput of one assignment, `None` when infeasible.
fn naive_sum_rate(net: &DenseNet, choice: &[Option<usize>], cfg: &NetworkConfig) -> Option<f64> {
    let p_max = 10f64.powf((cfg.p_max_dbm - 30.0) / 10.0);
    let noise = 10f64.powf((cfg.noise_dbm - 30.0) / 10.0);
    let sinr_min = 10f64.powf(cfg.sinr_min_db / 10.0);
    // per gNB: served UEs in id order and unit-norm precoder columns
    let mut served: Vec<Vec<usize>> = vec![Vec::new(); net.n_gnb];
    for (u, c) in choice.iter().enumerate() {
        if let Some(c) = c {
            served[net.gnbs[u][*c]].push(u);
        }
    }
    let mut precoders: Vec<Vec<CMat>> = Vec::new();
    for (g, ues) in served.iter().enumerate() {
        let mut per_panel = [0usize; 4];
        for &u in ues {
            per_panel[net.panels[u][choice[u].unwrap()]] += 1;
        }
        if ues.len() > 4 * cfg.n_rf_gnb_sec || per_panel.iter().any(|&c| c > cfg.n_rf_gnb_sec) {
            return None;
        }
        if ues.is_empty() {
            precoders.push(Vec::new());
            continue;
        }
        let n = ues.len();
        let mut w_rf = CMat::zeros(net.beams[ues[0]][0].nrows(), n);
        for (k, &u) in ues.iter().enumerate() {
            w_rf.set_column(k, &net.beams[u][choice[u].unwrap()].column(0));
        }
        let mut h_bar = CMat::zeros(n, n);
        for (k, &u) in ues.iter().enumerate() {
            let row = &net.rows[u][choice[u].unwrap()][g] * &w_rf;
            h_bar.set_row(k, &row.row(0));
        }
        let sv = h_bar.clone().svd(false, false).singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        if !(smin > 0.0) || smax / smin > cfg.max_condition {
            return None;
        }
        let w_bb = h_bar.try_inverse()?;
        let w = &w_rf * w_bb;
        precoders.push(
            w.column_iter()
                .map(|c| {
                    let c = CMat::from_column_slice(c.len(), 1, c.as_slice());
                    let norm = c.norm();
                    c / Complex64::new(norm, 0.0)
                })
                .collect(),
        );
    }
    let mut sum = 0.0;
    for (g, ues) in served.iter().enumerate() {
        for (k, &u) in ues.iter().enumerate() {
            let c = choice[u].unwrap();
            let power = |gg: usize, col: &CMat| (&net.rows[u][c][gg] * col)[(0, 0)].norm_sqr();
            let p_g = p_max / ues.len() as f64;
            let s = p_g * power(g, &precoders[g][k]);
            let mut i = 0.0;
            for (kk, col) in precoders[g].iter().enumerate() {
                if kk != k {
                    i += p_g * power(g, col);
                }
            }
            for (gg, cols) in precoders.iter().enumerate() {
                if gg != g && !cols.is_empty() {
                    let p = p_max / cols.len() as f64;
                    i += cols.iter().map(|col| p * power(gg, col)).sum::<f64>();
                }
            }
            let sinr = s / (i + noise);
            if sinr < sinr_min {
                return None;
            }
            let db = 10.0 * sinr.log10();
            sum += if db >= cfg.sinr_max_db {
                cfg.r_max_bps
            } else {
                cfg.alpha_loss * cfg.bandwidth_hz * (1.0 + sinr).log2()
            };
        }
    }
    Some(sum)
}

fn naive_optimum(radio: &RadioMap) -> f64 {
    let cap = match radio.cfg.n_csi_rs {
        Limit::Finite(n) => n as usize,
        Limit::Unbounded => usize::MAX,
    };
    let cands: Vec<Vec<BeamPairLink>> =
        radio.candidates.iter().map(|c| c[..c.len().min(cap)].to_vec()).collect();
    let net = dense_net(radio, &cands);
    let mut best = 0.0f64;
    let mut choice: Vec<Option<usize>> = vec![None; radio.n_ue()];
    fn rec(
        u: usize,
        choice: &mut Vec<Option<usize>>,
        cands: &[Vec<BeamPairLink>],
        net: &DenseNet,
        cfg: &NetworkConfig,
        best: &mut f64,
    ) {
        if u == choice.len() {
            if let Some(s) = naive_sum_rate(net, choice, cfg) {
                *best = best.max(s);
            }
            return;
        }
        choice[u] = None;
        rec(u + 1, choice, cands, net, cfg, best);
        for c in 0..cands[u].len() {
            choice[u] = Some(c);
            rec(u + 1, choice, cands, net, cfg, best);
        }
        choice[u] = None;
    }
    rec(0, &mut choice, &cands, &net, &radio.cfg, &mut best);
    best
}

fn oracle_dominance() -> Outcome {
    let cfg = NetworkConfig::desk_scale();
    let mut failures = Vec::new();
    let mut margin = 0.0f64;
    for i in 0..50 {
        let radio = guard_rail_radio(&cfg, i).unwrap();
        let sum = |m: Mode| network_report(&radio, &allocate(&radio, m).unwrap()).summary.sum_rate_bps;
        let (oracle, ciaba, nr) = (sum(Mode::Oracle), sum(Mode::Ciaba), sum(Mode::FivegNr));
        let naive = naive_optimum(&radio);
        let tol = 1e-9 * oracle.max(1.0);
        if !(oracle + tol >= ciaba && ciaba >= 0.0 && oracle + tol >= nr) {
            failures.push(format!("instance {i}: oracle {oracle} ciaba {ciaba} 5gnr {nr}"));
        }
        if (oracle - naive).abs() > 1e-6 * naive.max(1.0) {
            failures.push(format!("instance {i}: oracle {oracle} naive {naive}"));
        }
        margin = margin.max(oracle - ciaba);
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("50 instances, oracle = naive enumerator, largest oracle - cIABA gap {:.1} Mbps", margin / 1e6)
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------------------
// 5. constraint satisfaction

/// Recomputes every served UE's SINR from the dense channel and the
/// combined precoders.
fn dense_sinr_violations(radio: &RadioMap, alloc: &Allocation) -> Vec<String> {
    let mut out = Vec::new();
    let cols: Vec<CMat> = alloc.states.iter().map(|s| s.w_combined(&radio.gnb_books[s.gnb])).collect();
    let noise = radio.noise_w();
    let sinr_min = 10f64.powf(radio.cfg.sinr_min_db / 10.0);
    for (ue, link) in alloc.serving.iter().enumerate() {
        let Some(l) = link else { continue };
        let wc = radio.ue_books[ue].embedded(l.ue_beam);
        let (mut s, mut i) = (0.0, 0.0);
        for (g, state) in alloc.states.iter().enumerate() {
            if state.n_served() == 0 {
                continue;
            }
            let y = wc.adjoint() * radio.channels[ue][g].to_dense() * &cols[g];
            for (k, b) in state.served.iter().enumerate() {
                let p = state.p_per_ue * y[(0, k)].norm_sqr();
                if g == l.gnb && b.ue == ue {
                    s += p;
                } else {
                    i += p;
                }
            }
        }
        if s / (i + noise) < sinr_min * (1.0 - 1e-9) {
            out.push(format!("UE {ue} at {:.4} dB", 10.0 * (s / (i + noise)).log10()));
        }
    }
    out
}

fn constraint_satisfaction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut allocations = 0;
    for case in 0..200u64 {
        let mut cfg = NetworkConfig::desk_scale();
        cfg.seed = rng.gen();
        cfg.area_side_m = rng.gen_range(130.0..=220.0);
        cfg.ue_density = rng.gen_range(300.0..=1200.0);
        cfg.n_t = [16, 64][rng.gen_range(0..2)];
        cfg.n_q_csi_bits = [Limit::Unbounded, Limit::Finite(4), Limit::Finite(6)][rng.gen_range(0..3)];
        cfg.n_csi_rs = [Limit::Finite(1), Limit::Finite(2), Limit::Finite(4), Limit::Unbounded][rng.gen_range(0..4)];
        let guard = case % 4 == 0;
        let radio = if guard {
            guard_rail_radio(&cfg, case).unwrap()
        } else {
            RadioMap::synthesize(&cfg, &generate_deployment(&cfg, case).unwrap()).unwrap()
        };
        for m in Mode::ALL {
            if m == Mode::Oracle && !guard {
                continue;
            }
            let alloc = match allocate(&radio, m) {
                Ok(a) => a,
                Err(e) => {
                    failures.push(format!("case {case} {m}: {e}"));
                    continue;
                }
            };
            allocations += 1;
            let report = network_report(&radio, &alloc);
            let mut v = constraint_violations(&radio, &alloc, &report);
            if m != Mode::CbfTdma {
                v.extend(dense_sinr_violations(&radio, &alloc));
            }
            let served = report.links.iter().filter(|l| l.status == LinkStatus::Served).count();
            if served != alloc.n_served() {
                v.push("report and allocation disagree on the served set".into());
            }
            if !v.is_empty() {
                failures.push(format!("case {case} {m}: {}", v.join(", ")));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("200 networks, {allocations} allocations, zero violations")
        } else {
            format!("{} violating allocations, first: {}", failures.len(), failures[0])
        },
    )
}

// ---------------------------------------------------------------------------
// 6-8, 10. desk-scale campaigns

fn desk_campaign() -> CampaignResult {
    let cfg = NetworkConfig::desk_scale();
    run_campaign(&cfg, &[Mode::FivegNr, Mode::Diaba, Mode::Ciaba]).unwrap()
}

fn ordering(ideal: &CampaignResult) -> Outcome {
    let nr = ideal.pooled(Mode::FivegNr);
    let d = ideal.pooled(Mode::Diaba);
    let c = ideal.pooled(Mode::Ciaba);

    let mut cfg = NetworkConfig::desk_scale();
    cfg.n_q_csi_bits = Limit::Finite(6);
    cfg.n_csi_rs = Limit::Finite(4);
    let quant = run_campaign(&cfg, &[Mode::Ciaba, Mode::Dbf]).unwrap();
    let cq = quant.pooled(Mode::Ciaba);
    let dbf = quant.pooled(Mode::Dbf);

    let sinr_order = c.median_sinr_db >= d.median_sinr_db && d.median_sinr_db >= nr.median_sinr_db;
    let coverage_order = c.coverage >= nr.coverage;
    let rate_order = cq.median_rate_bps >= dbf.median_rate_bps;
    outcome(
        ideal.failures.is_empty() && quant.failures.is_empty() && sinr_order && coverage_order && rate_order,
        format!(
            "median SINR cIABA {:.2} / dIABA {:.2} / 5G-NR {:.2} dB [{}]; coverage cIABA {:.3} vs 5G-NR {:.3} [{}]; \
             n_q=6, N_CSI-RS=4 median rate cIABA-HBF {:.1} vs DBF {:.1} Mbps [{}]",
            c.median_sinr_db,
            d.median_sinr_db,
            nr.median_sinr_db,
            ok(sinr_order),
            c.coverage,
            nr.coverage,
            ok(coverage_order),
            cq.median_rate_bps / 1e6,
            dbf.median_rate_bps / 1e6,
            ok(rate_order)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

fn residual_interference() -> Outcome {
    let mut cfg = NetworkConfig::desk_scale();
    cfg.n_q_csi_bits = Limit::Finite(4);
    cfg.n_csi_rs = Limit::Finite(4);
    let res = run_campaign(&cfg, &[Mode::FivegNr, Mode::Ciaba]).unwrap();
    let nr = res.pooled(Mode::FivegNr).intra_inr_positive_share;
    let c = res.pooled(Mode::Ciaba).intra_inr_positive_share;
    outcome(
        nr > 0.0 && c > 0.0,
        format!("n_q=4: served UEs with intra-cell INR > 0 dB: 5G-NR {:.1}%, cIABA {:.1}% (published >60%)", nr * 100.0, c * 100.0),
    )
}

fn secondary_links(ideal: &CampaignResult) -> Outcome {
    let c = ideal.pooled(Mode::Ciaba);
    outcome(
        c.secondary_share > 0.0,
        format!(
            "cIABA, N_CSI-RS=inf: rank > 1 for {:.1}% of served UEs (published 57%), handover {:.1}%",
            c.secondary_share * 100.0,
            c.handover_share * 100.0
        ),
    )
}

fn determinism(first: &CampaignResult) -> Outcome {
    let second = desk_campaign();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    emit(first, a.path(), false).unwrap();
    emit(&second, b.path(), false).unwrap();
    let same = [LINKS_FILE, SUMMARY_FILE]
        .iter()
        .all(|f| std::fs::read(a.path().join(f)).unwrap() == std::fs::read(b.path().join(f)).unwrap());
    let rows = std::fs::read_to_string(a.path().join(LINKS_FILE)).unwrap().lines().count() - 1;
    outcome(same, format!("two seeded runs, {rows} link rows, files identical: {same}"))
}

// ---------------------------------------------------------------------------
// 9. complexity trends

fn time_alloc(radio: &RadioMap, mode: Mode, reps: usize) -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..reps {
        let start = Instant::now();
        allocate(radio, mode).unwrap();
        best = best.min(start.elapsed());
    }
    best
}

fn complexity_trends() -> Outcome {
    let cfg = NetworkConfig::desk_scale();
    let side = cfg.area_side_m;
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let gnbs = grid_gnbs(2, side, cfg.gnb_height_m);
    let ue_counts = [25usize, 50, 100];
    let mut c_times = Vec::new();
    for &n in &ue_counts {
        let radio = RadioMap::synthesize(&cfg, &random_deployment(&mut rng, &gnbs, n, side, &cfg)).unwrap();
        c_times.push(time_alloc(&radio, Mode::Ciaba, 5).as_secs_f64());
    }
    // least-squares slope of log time against log N_UE
    let xs: Vec<f64> = ue_counts.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = c_times.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();

    let mut cfg_d = cfg.clone();
    cfg_d.n_csi_rs = Limit::Finite(4);
    let n_ue = 100;
    let ues: Vec<Position> = (0..n_ue)
        .map(|_| Position::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side), cfg.ue_height_m))
        .collect();
    let orient: Vec<f64> = (0..n_ue).map(|_| rng.gen_range(-180.0..180.0)).collect();
    let mut d_times = Vec::new();
    for per_side in [2usize, 3, 4] {
        let mut dep = Deployment::with_nodes(grid_gnbs(per_side, side, cfg.gnb_height_m), ues.clone());
        for (o, &b) in dep.ue_panel_orientations.iter_mut().zip(&orient) {
            *o = panel_boresights(b);
        }
        let radio = RadioMap::synthesize(&cfg_d, &dep).unwrap();
        d_times.push(time_alloc(&radio, Mode::Diaba, 40).as_secs_f64());
    }
    let superlinear = slope > 1.0;
    let non_increasing = d_times.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        superlinear && non_increasing,
        format!(
            "cIABA N_UE 25/50/100: {:.3}/{:.3}/{:.3} s, log-log slope {slope:.2} [{}]; \
             dIABA N_gNB 4/9/16 at 100 UEs: {:.4}/{:.4}/{:.4} s [{}]",
            c_times[0],
            c_times[1],
            c_times[2],
            ok(superlinear),
            d_times[0],
            d_times[1],
            d_times[2],
            ok(non_increasing)
        ),
    )
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let line = format!(
            "criterion {n:>2} {name:<28} {} ({:.1} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        println!("{line}");
        lines.push(o.pass);
    };
    run(1, "zf-cancellation", &mut zf_cancellation);
    run(2, "throughput-endpoints", &mut throughput_endpoints);
    run(3, "quantization-resolution", &mut quantization_resolution);
    run(4, "oracle-dominance", &mut oracle_dominance);
    run(5, "constraint-satisfaction", &mut constraint_satisfaction);
    let ideal = desk_campaign();
    run(6, "ordering-reproduction", &mut || ordering(&ideal));
    run(7, "residual-interference", &mut residual_interference);
    run(8, "secondary-bpl-usage", &mut || secondary_links(&ideal));
    run(9, "complexity-trends", &mut complexity_trends);
    run(10, "determinism", &mut || determinism(&ideal));
    let passed = lines.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", lines.len());
    if passed == lines.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
