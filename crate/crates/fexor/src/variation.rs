//! Monte Carlo study of read robustness under device-to-device Vth spread.
//!
//! For each of the four SLC (ciphertext, key) combinations, draw per-cell Vth
//! samples around the nominal level and push them through the read chain
//! (conduction test + SL settling). The worst-case sense margin is the gap
//! between the lowest settled SL that must read 1 and the highest that must
//! read 0, pooled across combinations.
//!
//! Sample i of ciphertext state s always comes from the RNG stream derived
//! from (seed, s, i), so the parallel and serial runners produce bit-identical
//! reports and both key polarities of a state share its Vth population.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cipher::key_to_bias;
use crate::device::{conducts, sample_vth, settle_sl, FerroProfile, Mode};
use crate::error::{Error, Result};

/// Fixed histogram window for settled-SL plots: 10 mV bins over
/// [-0.05, 0.55] V.
pub const HIST_LO: f64 = -0.05;
pub const HIST_HI: f64 = 0.55;
pub const HIST_BIN_WIDTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_samples: usize,
    /// Vth spread used for the draw; overrides the profile's sigma.
    pub sigma_vth: f64,
    pub v_read: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n_samples: 1000, sigma_vth: 0.04, v_read: 1.1, seed: 0 }
    }
}

/// Settled-SL samples for one (ciphertext, key) combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComboSamples {
    pub ct: u8,
    pub key: u8,
    /// The plaintext bit this combination must decode to (ct XOR key).
    pub expected_pt: u8,
    pub v_sl: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bin_width: f64,
    pub counts: Vec<u32>,
}

impl Histogram {
    fn of(values: &[f64]) -> Self {
        let bins = ((HIST_HI - HIST_LO) / HIST_BIN_WIDTH).round() as usize;
        let mut counts = vec![0u32; bins];
        for &v in values {
            let i = ((v - HIST_LO) / HIST_BIN_WIDTH).floor() as isize;
            let i = i.clamp(0, bins as isize - 1) as usize;
            counts[i] += 1;
        }
        Histogram { lo: HIST_LO, hi: HIST_HI, bin_width: HIST_BIN_WIDTH, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub config: McConfig,
    /// Vth draws per ciphertext state: [CT=0 population, CT=1 population].
    pub vth_samples: [Vec<f64>; 2],
    /// Settled SL per combination, in (ct, key) = (0,0), (0,1), (1,0), (1,1)
    /// order. Each has exactly `n_samples` entries.
    pub combos: [ComboSamples; 4],
    pub histograms: [Histogram; 4],
    pub worst_case_margin: f64,
}

/// One standard-normal draw from the stream keyed by (seed, state, sample).
fn vth_draw(cfg: &McConfig, profile: &FerroProfile, state: u8, sample: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((state as u64 + 1) << 40) | sample);
    let mut p = profile.clone();
    p.sigma_vth = cfg.sigma_vth;
    sample_vth(state, Mode::Slc, &p, &mut rng)
}

fn validate(cfg: &McConfig, profile: &FerroProfile) -> Result<()> {
    profile.validate()?;
    if cfg.n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    if !(cfg.sigma_vth >= 0.0 && cfg.sigma_vth.is_finite()) {
        return Err(Error::InvalidConfig("sigma_vth must be finite and nonnegative".into()));
    }
    if !cfg.v_read.is_finite() {
        return Err(Error::InvalidConfig("v_read must be finite".into()));
    }
    Ok(())
}

fn build_report(cfg: McConfig, profile: &FerroProfile, vth_samples: [Vec<f64>; 2]) -> Result<McReport> {
    let mut combos = Vec::with_capacity(4);
    for ct in 0..2u8 {
        for key in 0..2u8 {
            let (bl, sl_pre) = key_to_bias(key, profile.v_dd);
            let v_sl = vth_samples[ct as usize]
                .iter()
                .map(|&vth| settle_sl(conducts(cfg.v_read, bl, sl_pre, vth), bl, sl_pre, profile))
                .collect();
            combos.push(ComboSamples { ct, key, expected_pt: ct ^ key, v_sl });
        }
    }
    let combos: [ComboSamples; 4] = combos.try_into().expect("four combos");
    let histograms = [
        Histogram::of(&combos[0].v_sl),
        Histogram::of(&combos[1].v_sl),
        Histogram::of(&combos[2].v_sl),
        Histogram::of(&combos[3].v_sl),
    ];
    let worst_case_margin = margin_of(&combos)?;
    Ok(McReport { config: cfg, vth_samples, combos, histograms, worst_case_margin })
}

/// Serial Monte Carlo run.
pub fn run_mc(cfg: McConfig, profile: &FerroProfile) -> Result<McReport> {
    validate(&cfg, profile)?;
    let mut vth_samples = [Vec::new(), Vec::new()];
    for state in 0..2u8 {
        vth_samples[state as usize] = (0..cfg.n_samples as u64)
            .map(|i| vth_draw(&cfg, profile, state, i))
            .collect::<Result<_>>()?;
    }
    build_report(cfg, profile, vth_samples)
}

/// Parallel Monte Carlo run; bit-identical to `run_mc` for the same config
/// because every sample owns its RNG stream.
pub fn run_mc_parallel(cfg: McConfig, profile: &FerroProfile) -> Result<McReport> {
    validate(&cfg, profile)?;
    let mut vth_samples = [Vec::new(), Vec::new()];
    for state in 0..2u8 {
        vth_samples[state as usize] = (0..cfg.n_samples as u64)
            .into_par_iter()
            .map(|i| vth_draw(&cfg, profile, state, i))
            .collect::<Result<_>>()?;
    }
    build_report(cfg, profile, vth_samples)
}

fn margin_of(combos: &[ComboSamples; 4]) -> Result<f64> {
    let ones: Vec<f64> = combos
        .iter()
        .filter(|c| c.expected_pt == 1)
        .flat_map(|c| c.v_sl.iter().copied())
        .collect();
    let zeros: Vec<f64> = combos
        .iter()
        .filter(|c| c.expected_pt == 0)
        .flat_map(|c| c.v_sl.iter().copied())
        .collect();
    if ones.is_empty() || zeros.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let min_one = ones.iter().copied().fold(f64::INFINITY, f64::min);
    let max_zero = zeros.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(min_one - max_zero)
}

/// Worst-case sense margin of a report: min(SL | PT must be 1) minus
/// max(SL | PT must be 0). Negative means the populations overlap.
pub fn sense_margin(report: &McReport) -> Result<f64> {
    margin_of(&report.combos)
}

/// CSV of the Vth populations: one line per sample, one column per state.
pub fn vth_samples_csv(report: &McReport) -> String {
    let mut out = String::from("vth_ct0,vth_ct1\n");
    for i in 0..report.config.n_samples {
        out.push_str(&format!("{},{}\n", report.vth_samples[0][i], report.vth_samples[1][i]));
    }
    out
}

/// CSV of the settled-SL populations, one column per (ct, key) combination.
pub fn sl_samples_csv(report: &McReport) -> String {
    let mut out = String::from("ct0_key0,ct0_key1,ct1_key0,ct1_key1\n");
    for i in 0..report.config.n_samples {
        let row: Vec<String> =
            report.combos.iter().map(|c| format!("{}", c.v_sl[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// CSV of the fixed-bin SL histograms.
pub fn histogram_csv(report: &McReport) -> String {
    let mut out = String::from("bin_lo,bin_hi,ct0_key0,ct0_key1,ct1_key0,ct1_key1\n");
    let bins = report.histograms[0].counts.len();
    for b in 0..bins {
        let lo = HIST_LO + b as f64 * HIST_BIN_WIDTH;
        let hi = lo + HIST_BIN_WIDTH;
        let counts: Vec<String> =
            report.histograms.iter().map(|h| h.counts[b].to_string()).collect();
        out.push_str(&format!("{lo:.2},{hi:.2},{}\n", counts.join(",")));
    }
    out
}
