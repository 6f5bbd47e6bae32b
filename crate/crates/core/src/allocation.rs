//! Beam pair link allocation: the default 5G-NR strongest-link admission,
//! distributed and centralized interference-aware allocation, an
//! exhaustive oracle for tiny networks, and the analog TDMA reference.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamsweep::BeamPairLink;
use crate::linalg::{db_to_linear, linear_to_db};
use crate::metrics::{slot_pick, throughput, LinkTerms, NetworkReport};
use crate::precoder::{Architecture, GnbPrecoderState};
use crate::radio::{Csi, RadioMap};
use crate::scenario::{rng_for, stream, Limit, UeOrder};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "5gnr")]
    FivegNr,
    #[serde(rename = "diaba")]
    Diaba,
    #[serde(rename = "ciaba")]
    Ciaba,
    #[serde(rename = "oracle")]
    Oracle,
    /// Strongest-link admission with fully digital zero-forcing.
    #[serde(rename = "dbf")]
    Dbf,
    #[serde(rename = "cbf-tdma")]
    CbfTdma,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::FivegNr, Mode::Diaba, Mode::Ciaba, Mode::Oracle, Mode::Dbf, Mode::CbfTdma];

    pub fn name(self) -> &'static str {
        match self {
            Mode::FivegNr => "5gnr",
            Mode::Diaba => "diaba",
            Mode::Ciaba => "ciaba",
            Mode::Oracle => "oracle",
            Mode::Dbf => "dbf",
            Mode::CbfTdma => "cbf-tdma",
        }
    }

    pub fn architecture(self) -> Architecture {
        match self {
            Mode::Dbf => Architecture::Digital,
            _ => Architecture::Hybrid,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown allocation mode {s:?} (expected 5gnr, diaba, ciaba, oracle, dbf or cbf-tdma)")))
    }
}

/// Monitored links of one UE, strongest first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub ue: usize,
    pub bpls: Vec<BeamPairLink>,
}

pub fn build_candidates(
    ue: usize,
    sweep: &[BeamPairLink],
    mode: Mode,
    initial_gnb: Option<usize>,
    n_csi_rs: Limit,
) -> CandidateSet {
    let bpls: Vec<BeamPairLink> = match mode {
        Mode::FivegNr | Mode::Dbf | Mode::CbfTdma => sweep.iter().take(1).copied().collect(),
        Mode::Diaba => {
            let on_serving: Vec<BeamPairLink> = sweep.iter().filter(|b| Some(b.gnb) == initial_gnb).copied().collect();
            on_serving[..n_csi_rs.cap(on_serving.len())].to_vec()
        }
        Mode::Ciaba | Mode::Oracle => sweep[..n_csi_rs.cap(sweep.len())].to_vec(),
    };
    CandidateSet { ue, bpls }
}

/// Uniform draws choosing the co-slotted UE of every gNB, `[draw][gnb]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TdmaSchedule {
    pub draws: Vec<Vec<f64>>,
}

/// A network-wide allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub mode: Mode,
    /// Serving link per UE, `None` when dropped or uncovered.
    pub serving: Vec<Option<BeamPairLink>>,
    /// gNB of the initial association per UE.
    pub initial_gnb: Vec<Option<usize>>,
    /// Precoder per gNB, indexed by gNB id. Empty for TDMA.
    pub states: Vec<GnbPrecoderState>,
    pub tdma: Option<TdmaSchedule>,
}

impl Allocation {
    /// Served UEs per gNB in ascending id order.
    pub fn per_gnb(&self) -> Vec<Vec<usize>> {
        let n_gnb = self.initial_gnb_count();
        let mut out = vec![Vec::new(); n_gnb];
        for (ue, link) in self.serving.iter().enumerate() {
            if let Some(l) = link {
                out[l.gnb].push(ue);
            }
        }
        out
    }

    fn initial_gnb_count(&self) -> usize {
        let from_links = self.serving.iter().flatten().map(|l| l.gnb + 1).max().unwrap_or(0);
        self.states.len().max(from_links).max(self.tdma.as_ref().map_or(0, |t| t.draws.first().map_or(0, Vec::len)))
    }

    pub fn is_handover(&self, ue: usize) -> bool {
        match (&self.serving[ue], self.initial_gnb[ue]) {
            (Some(l), Some(g)) => l.gnb != g,
            _ => false,
        }
    }

    pub fn n_served(&self) -> usize {
        self.serving.iter().flatten().count()
    }
}

/// UE processing order: covered UEs only.
pub fn ue_order(radio: &RadioMap) -> Vec<usize> {
    let mut ues: Vec<usize> = (0..radio.n_ue()).filter(|&u| !radio.candidates[u].is_empty()).collect();
    if radio.cfg.ue_order == UeOrder::DescendingRsrp {
        ues.sort_by(|&a, &b| {
            radio.candidates[b][0]
                .rsrp
                .total_cmp(&radio.candidates[a][0].rsrp)
                .then(a.cmp(&b))
        });
    }
    ues
}

fn initial_gnbs(radio: &RadioMap) -> Vec<Option<usize>> {
    radio.initial.iter().map(|a| a.served().map(|b| b.gnb)).collect()
}

/// RSS and interference of every served UE evaluated in the beam domain,
/// the evaluator shared by all allocation engines.
pub fn beam_domain_terms(radio: &RadioMap, states: &[GnbPrecoderState]) -> Vec<Option<LinkTerms>> {
    let mut out = vec![None; radio.n_ue()];
    for s in states {
        for (i, link) in s.served.iter().enumerate() {
            let own = s.column_powers(radio, link.ue, link.ue_beam);
            let mut t = LinkTerms {
                rss: own[i],
                intra: own.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, x)| x).sum(),
                inter: 0.0,
            };
            for other in states.iter().filter(|o| o.gnb != s.gnb && o.n_served() > 0) {
                t.inter += other.column_powers(radio, link.ue, link.ue_beam).iter().sum::<f64>();
            }
            out[link.ue] = Some(t);
        }
    }
    out
}

/// Whether new SINR checks cover only the serving gNB or the whole network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    ServingGnb,
    Network,
}

/// Incremental network state with cached per-UE powers.
struct Engine<'a> {
    radio: &'a RadioMap,
    arch: Architecture,
    states: Vec<GnbPrecoderState>,
    serving: Vec<Option<BeamPairLink>>,
    rss: Vec<f64>,
    intra: Vec<f64>,
    /// `[ue][gnb]` power received from each gNB's current precoder, kept
    /// current for served UEs.
    inter_from: Vec<Vec<f64>>,
    noise: f64,
    sinr_min: f64,
}

/// Outcome of a tentative admission.
struct Trial {
    link: BeamPairLink,
    state: GnbPrecoderState,
    own_sinr: f64,
}

impl<'a> Engine<'a> {
    fn new(radio: &'a RadioMap, arch: Architecture) -> Self {
        let (n_ue, n_gnb) = (radio.n_ue(), radio.n_gnb());
        Engine {
            radio,
            arch,
            states: (0..n_gnb).map(|g| GnbPrecoderState::empty(g, arch)).collect(),
            serving: vec![None; n_ue],
            rss: vec![0.0; n_ue],
            intra: vec![0.0; n_ue],
            inter_from: vec![vec![0.0; n_gnb]; n_ue],
            noise: radio.noise_w(),
            sinr_min: radio.cfg.sinr_min_linear(),
        }
    }

    fn power_from(&self, state: &GnbPrecoderState, ue: usize, ue_beam: usize) -> f64 {
        if state.n_served() == 0 {
            0.0
        } else {
            state.column_powers(self.radio, ue, ue_beam).iter().sum()
        }
    }

    /// Cached interference at `ue` from every gNB except `skip_a` and `skip_b`.
    fn inter_excluding(&self, ue: usize, skip_a: usize, skip_b: usize) -> f64 {
        self.inter_from[ue]
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != skip_a && g != skip_b)
            .map(|(_, x)| x)
            .sum()
    }

    fn sinr(&self, ue: usize) -> f64 {
        let gnb = self.serving[ue].expect("served UE").gnb;
        self.rss[ue] / (self.intra[ue] + self.inter_excluding(ue, gnb, gnb) + self.noise)
    }

    fn own_terms(state: &GnbPrecoderState, radio: &RadioMap, link: &BeamPairLink) -> (f64, f64) {
        let i = state.position(link.ue).expect("member of state");
        let p = state.column_powers(radio, link.ue, link.ue_beam);
        (p[i], p.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, x)| x).sum())
    }

    /// Tentatively adds `link` to its gNB. `None` if capacity, rank or any
    /// checked SINR fails.
    fn try_add(&self, link: BeamPairLink, scope: Scope) -> Option<Trial> {
        let j = link.gnb;
        let mut served = self.states[j].served.clone();
        served.push(link);
        let state = GnbPrecoderState::build(self.radio, j, self.arch, served).ok()?;

        let inter_new: f64 = self
            .states
            .iter()
            .filter(|s| s.gnb != j)
            .map(|s| self.power_from(s, link.ue, link.ue_beam))
            .sum();
        let (rss, intra) = Self::own_terms(&state, self.radio, &link);
        let own_sinr = rss / (intra + inter_new + self.noise);
        if own_sinr < self.sinr_min {
            return None;
        }
        for m in state.served.iter().filter(|m| m.ue != link.ue) {
            let (rss, intra) = Self::own_terms(&state, self.radio, m);
            if rss / (intra + self.inter_excluding(m.ue, j, j) + self.noise) < self.sinr_min {
                return None;
            }
        }
        if scope == Scope::Network {
            for (k, served) in self.serving.iter().enumerate() {
                let Some(m) = served else { continue };
                if m.gnb == j {
                    continue;
                }
                let inter = self.inter_excluding(k, m.gnb, j) + self.power_from(&state, k, m.ue_beam);
                if self.rss[k] / (self.intra[k] + inter + self.noise) < self.sinr_min {
                    return None;
                }
            }
        }
        Some(Trial { link, state, own_sinr })
    }

    /// Installs a new precoder on `gnb` and refreshes every cache it touches.
    fn install(&mut self, state: GnbPrecoderState) {
        let j = state.gnb;
        for m in &state.served {
            let (rss, intra) = Self::own_terms(&state, self.radio, m);
            self.rss[m.ue] = rss;
            self.intra[m.ue] = intra;
            self.inter_from[m.ue][j] = 0.0;
        }
        for k in 0..self.serving.len() {
            if let Some(m) = self.serving[k] {
                if m.gnb != j {
                    self.inter_from[k][j] = self.power_from(&state, k, m.ue_beam);
                }
            }
        }
        self.states[j] = state;
    }

    fn admit(&mut self, link: BeamPairLink, state: GnbPrecoderState) {
        self.serving[link.ue] = Some(link);
        for g in 0..self.states.len() {
            self.inter_from[link.ue][g] = if g == link.gnb {
                0.0
            } else {
                self.power_from(&self.states[g], link.ue, link.ue_beam)
            };
        }
        self.install(state);
    }

    fn remove(&mut self, ue: usize) -> Result<()> {
        let link = self.serving[ue].take().expect("removing a served UE");
        let served: Vec<BeamPairLink> = self.states[link.gnb].served.iter().filter(|m| m.ue != ue).copied().collect();
        let state = GnbPrecoderState::build(self.radio, link.gnb, self.arch, served)?;
        self.rss[ue] = 0.0;
        self.intra[ue] = 0.0;
        self.inter_from[ue].iter_mut().for_each(|x| *x = 0.0);
        self.install(state);
        Ok(())
    }

    /// Served UE with the lowest SINR below the threshold among `ues`.
    fn worst_below(&self, ues: impl Iterator<Item = usize>) -> Option<usize> {
        ues.map(|u| (self.sinr(u), u))
            .filter(|&(s, _)| s < self.sinr_min)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, u)| u)
    }

    /// Drops the weakest UE network-wide until every served UE meets the
    /// coverage threshold.
    fn enforce_coverage(&mut self) -> Result<()> {
        loop {
            let served: Vec<usize> = (0..self.serving.len()).filter(|&u| self.serving[u].is_some()).collect();
            match self.worst_below(served.into_iter()) {
                Some(ue) => self.remove(ue)?,
                None => return Ok(()),
            }
        }
    }

    fn finish(self, mode: Mode) -> Allocation {
        Allocation {
            mode,
            serving: self.serving,
            initial_gnb: initial_gnbs(self.radio),
            states: self.states,
            tdma: None,
        }
    }
}

/// Strongest-link admission: every UE takes its rank-1 link when RF chains
/// allow; UEs on the serving gNB that fall below the threshold are dropped.
pub fn allocate_5gnr(radio: &RadioMap, arch: Architecture) -> Result<Allocation> {
    let mut engine = Engine::new(radio, arch);
    for ue in ue_order(radio) {
        let link = radio.candidates[ue][0];
        let j = link.gnb;
        let mut served = engine.states[j].served.clone();
        served.push(link);
        let Ok(state) = GnbPrecoderState::build(radio, j, arch, served) else {
            continue;
        };
        engine.admit(link, state);
        loop {
            let members: Vec<usize> = engine.states[j].served.iter().map(|m| m.ue).collect();
            match engine.worst_below(members.into_iter()) {
                Some(victim) => engine.remove(victim)?,
                None => break,
            }
        }
    }
    engine.enforce_coverage()?;
    let mode = match arch {
        Architecture::Hybrid => Mode::FivegNr,
        Architecture::Digital => Mode::Dbf,
    };
    Ok(engine.finish(mode))
}

/// Interference-aware allocation: every monitored candidate is tried
/// against the current allocation; the feasible one with the highest own
/// SINR is committed.
pub fn allocate_iaba(radio: &RadioMap, mode: Mode) -> Result<Allocation> {
    let scope = match mode {
        Mode::Diaba => Scope::ServingGnb,
        Mode::Ciaba => Scope::Network,
        other => return Err(Error::Config(format!("{other} is not an interference-aware mode"))),
    };
    let initial = initial_gnbs(radio);
    let mut engine = Engine::new(radio, Architecture::Hybrid);
    for ue in ue_order(radio) {
        let cands = build_candidates(ue, &radio.candidates[ue], mode, initial[ue], radio.cfg.n_csi_rs);
        let mut best: Option<Trial> = None;
        for &link in &cands.bpls {
            if let Some(trial) = engine.try_add(link, scope) {
                if best.as_ref().map_or(true, |b| trial.own_sinr > b.own_sinr) {
                    best = Some(trial);
                }
            }
        }
        if let Some(trial) = best {
            engine.admit(trial.link, trial.state);
        }
    }
    engine.enforce_coverage()?;
    Ok(engine.finish(mode))
}

/// Limits of the exhaustive search.
pub const ORACLE_MAX_UES: usize = 6;
pub const ORACLE_MAX_GNBS: usize = 3;
pub const ORACLE_MAX_CANDIDATES: usize = 4;

/// Exhaustive search over every assignment of each UE to one of its
/// monitored links or to nothing. Ties go to the lexicographically smallest
/// assignment, with "dropped" ordered after every candidate.
pub fn allocate_oracle(radio: &RadioMap) -> Result<Allocation> {
    if radio.n_ue() > ORACLE_MAX_UES || radio.n_gnb() > ORACLE_MAX_GNBS {
        return Err(Error::OracleRefused(format!(
            "{} UEs and {} gNBs exceed the limits of {ORACLE_MAX_UES} and {ORACLE_MAX_GNBS}",
            radio.n_ue(),
            radio.n_gnb()
        )));
    }
    let initial = initial_gnbs(radio);
    let cands: Vec<Vec<BeamPairLink>> = (0..radio.n_ue())
        .map(|u| build_candidates(u, &radio.candidates[u], Mode::Oracle, initial[u], radio.cfg.n_csi_rs).bpls)
        .collect();
    if let Some((ue, c)) = cands.iter().enumerate().find(|(_, c)| c.len() > ORACLE_MAX_CANDIDATES) {
        return Err(Error::OracleRefused(format!(
            "UE {ue} monitors {} links, limit {ORACLE_MAX_CANDIDATES}",
            c.len()
        )));
    }

    let noise = radio.noise_w();
    let sinr_min = radio.cfg.sinr_min_linear();
    let mut choice = vec![0usize; radio.n_ue()];
    let mut best: Option<(f64, Vec<usize>, Vec<GnbPrecoderState>)> = None;
    loop {
        if let Some((sum, states)) = evaluate_assignment(radio, &cands, &choice, noise, sinr_min) {
            if best.as_ref().map_or(true, |b| sum > b.0) {
                best = Some((sum, choice.clone(), states));
            }
        }
        // odometer, last UE fastest; option `len` means dropped
        let mut i = choice.len();
        loop {
            if i == 0 {
                let (_, pick, states) = best.expect("the all-dropped assignment is always feasible");
                let serving = pick
                    .iter()
                    .enumerate()
                    .map(|(u, &c)| cands[u].get(c).copied())
                    .collect();
                return Ok(Allocation {
                    mode: Mode::Oracle,
                    serving,
                    initial_gnb: initial,
                    states,
                    tdma: None,
                });
            }
            i -= 1;
            if choice[i] < cands[i].len() {
                choice[i] += 1;
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Sum rate of one assignment, or `None` if it violates capacity, rank or
/// the coverage threshold.
fn evaluate_assignment(
    radio: &RadioMap,
    cands: &[Vec<BeamPairLink>],
    choice: &[usize],
    noise: f64,
    sinr_min: f64,
) -> Option<(f64, Vec<GnbPrecoderState>)> {
    let mut per_gnb = vec![Vec::new(); radio.n_gnb()];
    for (u, &c) in choice.iter().enumerate() {
        if let Some(link) = cands[u].get(c) {
            per_gnb[link.gnb].push(*link);
        }
    }
    let states: Vec<GnbPrecoderState> = per_gnb
        .into_iter()
        .enumerate()
        .map(|(g, served)| GnbPrecoderState::build(radio, g, Architecture::Hybrid, served))
        .collect::<Result<_>>()
        .ok()?;
    let mut sum = 0.0;
    for t in beam_domain_terms(radio, &states).into_iter().flatten() {
        let sinr = t.sinr(noise);
        if sinr < sinr_min {
            return None;
        }
        sum += throughput(linear_to_db(sinr), &radio.cfg);
    }
    Some((sum, states))
}

/// Analog single-beam service with time sharing: every UE takes its rank-1
/// link, one UE per gNB transmits at full power in each slot, and UEs below
/// the threshold are dropped weakest first.
pub fn allocate_cbf_tdma(radio: &RadioMap) -> Result<Allocation> {
    let n_gnb = radio.n_gnb();
    let mut rng = rng_for(radio.cfg.seed, radio.realization_id, stream::TDMA_SLOTS, 0);
    let draws: Vec<Vec<f64>> = (0..radio.cfg.cbf_slot_draws)
        .map(|_| (0..n_gnb).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let mut serving: Vec<Option<BeamPairLink>> = radio.candidates.iter().map(|c| c.first().copied()).collect();
    let p = radio.p_max_w();
    let noise = radio.noise_w();
    let sinr_min = radio.cfg.sinr_min_linear();
    loop {
        let mut per_gnb = vec![Vec::new(); n_gnb];
        for (u, l) in serving.iter().enumerate() {
            if let Some(l) = l {
                per_gnb[l.gnb].push(u);
            }
        }
        let mut worst: Option<(f64, usize)> = None;
        for (u, l) in serving.iter().enumerate() {
            let Some(l) = l else { continue };
            let rss = p * radio.response(u, l.gnb, l.ue_beam, l.gnb_beam, Csi::True).norm_sqr();
            let mut inter = 0.0;
            for draw in &draws {
                for (g, members) in per_gnb.iter().enumerate() {
                    if g == l.gnb || members.is_empty() {
                        continue;
                    }
                    let other = serving[members[slot_pick(draw[g], members.len())]].expect("served");
                    inter += p * radio.response(u, g, l.ue_beam, other.gnb_beam, Csi::True).norm_sqr();
                }
            }
            if !draws.is_empty() {
                inter /= draws.len() as f64;
            }
            let sinr = rss / (inter + noise);
            if sinr < sinr_min && worst.map_or(true, |(s, _)| sinr < s) {
                worst = Some((sinr, u));
            }
        }
        match worst {
            Some((_, u)) => serving[u] = None,
            None => break,
        }
    }
    Ok(Allocation {
        mode: Mode::CbfTdma,
        serving,
        initial_gnb: initial_gnbs(radio),
        states: Vec::new(),
        tdma: Some(TdmaSchedule { draws }),
    })
}

pub fn allocate(radio: &RadioMap, mode: Mode) -> Result<Allocation> {
    match mode {
        Mode::FivegNr => allocate_5gnr(radio, Architecture::Hybrid),
        Mode::Dbf => allocate_5gnr(radio, Architecture::Digital),
        Mode::Diaba | Mode::Ciaba => allocate_iaba(radio, mode),
        Mode::Oracle => allocate_oracle(radio),
        Mode::CbfTdma => allocate_cbf_tdma(radio),
    }
}

/// Coverage threshold, RF-chain and power constraints of a finalized
/// allocation, plus structural consistency. Returns one message per
/// violation.
pub fn constraint_violations(radio: &RadioMap, alloc: &Allocation, report: &NetworkReport) -> Vec<String> {
    let mut out = Vec::new();
    let cfg = &radio.cfg;
    for l in report.links.iter().filter(|l| l.is_served()) {
        // tolerance covers the different summation order of the report
        if l.sinr_db < cfg.sinr_min_db - 1e-9 {
            out.push(format!("UE {} served at {:.6} dB below the threshold", l.ue, l.sinr_db));
        }
    }
    for (ue, link) in alloc.serving.iter().enumerate() {
        if let Some(l) = link {
            if l.ue != ue || !radio.candidates[ue].contains(l) {
                out.push(format!("UE {ue} holds a link that is not one of its candidates"));
            }
        }
    }
    if alloc.mode == Mode::CbfTdma {
        return out;
    }
    let (per_panel, total) = radio.rf_limits();
    let per_gnb = alloc.per_gnb();
    for (g, state) in alloc.states.iter().enumerate() {
        let listed: Vec<usize> = state.served.iter().map(|b| b.ue).collect();
        let expected = per_gnb.get(g).cloned().unwrap_or_default();
        if state.gnb != g || listed != expected {
            out.push(format!("gNB {g} precoder serves {listed:?}, allocation says {expected:?}"));
        }
        if state.served.iter().any(|b| alloc.serving[b.ue] != Some(*b)) {
            out.push(format!("gNB {g} precoder links differ from the serving map"));
        }
        if state.n_served() > total {
            out.push(format!("gNB {g} serves {} UEs with {total} RF chains", state.n_served()));
        }
        if state.arch == Architecture::Hybrid {
            let mut counts = [0usize; crate::channel::N_PANELS];
            for b in &state.served {
                counts[radio.gnb_books[g].beam(b.gnb_beam).panel] += 1;
            }
            for (p, &c) in counts.iter().enumerate() {
                if c > per_panel {
                    out.push(format!("gNB {g} panel {p} serves {c} UEs with {per_panel} RF chains"));
                }
            }
        }
        let power = state.total_power();
        let expected_power = if state.n_served() > 0 { radio.p_max_w() } else { 0.0 };
        if (power - expected_power).abs() > 1e-9 * radio.p_max_w() {
            out.push(format!("gNB {g} transmits {power} W, expected {expected_power} W"));
        }
        let w = state.w_combined(&radio.gnb_books[g]);
        for (i, col) in w.column_iter().enumerate() {
            if (col.norm() - 1.0).abs() > 1e-9 {
                out.push(format!("gNB {g} column {i} has norm {}", col.norm()));
            }
        }
    }
    out
}

/// Throughput of a served link at `sinr` (linear).
pub fn rate_of(sinr: f64, radio: &RadioMap) -> f64 {
    throughput(linear_to_db(sinr), &radio.cfg)
}

/// Linear SINR threshold of the configuration.
pub fn sinr_threshold(radio: &RadioMap) -> f64 {
    db_to_linear(radio.cfg.sinr_min_db)
}
