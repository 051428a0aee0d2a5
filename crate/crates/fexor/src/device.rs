//! Behavioral model of a single ferroelectric transistor (FeFET).
//!
//! A cell stores a ciphertext symbol as remnant polarization, observable as a
//! threshold-voltage (Vth) level: low Vth (LVT) conducts at the read voltage,
//! high Vth (HVT) stays off. The model is steady-state. Reads resolve
//! conduction with an ideal-switch rule and never disturb the stored state;
//! writes switch the full polarization once the gate-to-channel magnitude
//! reaches `v_switch`, which is what makes the V_W/3 inhibit scheme work.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Storage density: one bit per cell or one 2-bit symbol per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Slc,
    Mlc,
}

impl Mode {
    /// Number of distinct symbols a cell holds in this mode.
    pub fn levels(self) -> u8 {
        match self {
            Mode::Slc => 2,
            Mode::Mlc => 4,
        }
    }

    pub fn bits(self) -> u8 {
        match self {
            Mode::Slc => 1,
            Mode::Mlc => 2,
        }
    }

    pub fn max_symbol(self) -> u8 {
        self.levels() - 1
    }

    pub fn validate_symbol(self, symbol: u8) -> Result<()> {
        if symbol < self.levels() {
            Ok(())
        } else {
            Err(Error::InvalidSymbol { symbol, mode: self })
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Slc => write!(f, "slc"),
            Mode::Mlc => write!(f, "mlc"),
        }
    }
}

pub const PRESET_SIM_DEFAULT: &str = "sim-default";
pub const PRESET_28NM_EXPERIMENTAL: &str = "28nm-experimental";

/// Device and bias-scheme constants for one FeFET flavor.
///
/// Voltages are in volts, polarization in uC/cm^2. A profile carries the
/// nominal Vth targets for both storage modes plus the classification bands
/// used to turn a measured Vth back into a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FerroProfile {
    /// Bit-line drive during reads; the settled SL swings between 0 and this.
    pub v_dd: f64,
    /// Full program pulse (+V_W on the gate) that sets LVT.
    pub v_w_set: f64,
    /// Full erase pulse magnitude (applied as -V_W) that resets to HVT.
    pub v_w_reset: f64,
    /// BL/SL level on write-inhibited columns during the set step (2*V_W/3).
    pub v_inhibit_bl_sl: f64,
    /// WL level on unselected rows during the set step (V_W/3).
    pub v_inhibit_wl: f64,
    /// SLC read voltage V_R, between the two Vth levels.
    pub v_read_slc: f64,
    /// MLC read voltages [V_R1, V_R2, V_R3], interleaving the four Vth levels.
    pub v_read_mlc: [f64; 3],
    /// Nominal Vth per SLC ciphertext bit: [LVT for CT=0, HVT for CT=1].
    pub vth_slc: [f64; 2],
    /// Nominal Vth per MLC ciphertext symbol 0..=3, strictly increasing.
    pub vth_mlc: [f64; 4],
    /// Per-write Vth spread (one standard deviation).
    pub sigma_vth: f64,
    /// Fraction of the BL-to-SL difference transferred when the cell conducts.
    pub eta_transfer: f64,
    /// Minimum |gate - channel| that flips the stored polarization.
    pub v_switch: f64,
    /// WL bias on unselected rows during reads; keeps them off for any
    /// realistic Vth sample.
    pub unselected_wl_bias: f64,
    /// Remnant polarization per SLC bit (reporting only).
    pub polarization_slc: [f64; 2],
    /// Remnant polarization per MLC symbol (reporting only).
    pub polarization_mlc: [f64; 4],
    /// Vth classification bands per SLC bit as [lo, hi) pairs; the last band
    /// is closed at the top. Gaps between bands are unclassifiable.
    pub bands_slc: [[f64; 2]; 2],
    /// Vth classification bands per MLC symbol.
    pub bands_mlc: [[f64; 2]; 4],
    /// Logistic turn-on slope constant used when emitting Id-Vg curves.
    pub id_vg_slope: f64,
}

impl FerroProfile {
    /// Simulation defaults: LVT/HVT at 0.4/1.75 V read at 1.1 V, MLC levels
    /// midway between read voltages 1.1/1.8/2.5 V, write amplitude 3.6 V with
    /// the V_W/3 inhibit ladder, 40 mV Vth sigma, 98% SL transfer.
    pub fn sim_default() -> Self {
        FerroProfile {
            v_dd: 0.5,
            v_w_set: 3.6,
            v_w_reset: 3.2,
            v_inhibit_bl_sl: 2.4,
            v_inhibit_wl: 1.2,
            v_read_slc: 1.1,
            v_read_mlc: [1.1, 1.8, 2.5],
            vth_slc: [0.4, 1.75],
            vth_mlc: [0.4, 1.45, 2.15, 2.85],
            sigma_vth: 0.04,
            eta_transfer: 0.98,
            v_switch: 1.8, // V_W/2: inhibited thirds never switch, full pulses always do
            unselected_wl_bias: -0.5,
            polarization_slc: [2.5, -2.5],
            polarization_mlc: [2.5, 0.0, -2.5, -5.0],
            bands_slc: [[0.0, 1.1], [1.1, 3.0]],
            bands_mlc: [[0.0, 1.1], [1.1, 1.8], [1.8, 2.5], [2.5, 3.5]],
            id_vg_slope: 0.06,
        }
    }

    /// Constants matched to the 28 nm measured devices: SLC Vth bands
    /// 0-0.6 / 1.0-1.6 V, MLC bands 0-0.4 / 0.4-0.8 / 0.8-1.0 / 1.0-2.0 V,
    /// read points on the band boundaries, and a 0.2 V sense swing.
    pub fn experimental_28nm() -> Self {
        FerroProfile {
            v_dd: 0.2,
            v_w_set: 4.5,
            v_w_reset: 5.0,
            v_inhibit_bl_sl: 3.0,
            v_inhibit_wl: 1.5,
            v_read_slc: 0.8,
            v_read_mlc: [0.4, 0.8, 1.0],
            vth_slc: [0.3, 1.3],
            vth_mlc: [0.2, 0.6, 0.9, 1.5],
            sigma_vth: 0.04,
            eta_transfer: 0.98,
            v_switch: 2.25,
            unselected_wl_bias: -0.5,
            polarization_slc: [2.5, -2.5],
            polarization_mlc: [2.5, 0.0, -2.5, -5.0],
            bands_slc: [[0.0, 0.6], [1.0, 1.6]],
            bands_mlc: [[0.0, 0.4], [0.4, 0.8], [0.8, 1.0], [1.0, 2.0]],
            id_vg_slope: 0.06,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            PRESET_SIM_DEFAULT => Some(Self::sim_default()),
            PRESET_28NM_EXPERIMENTAL => Some(Self::experimental_28nm()),
            _ => None,
        }
    }

    /// Parse a profile from JSON and validate it.
    pub fn from_json(text: &str) -> Result<Self> {
        let profile: FerroProfile = serde_json::from_str(text)?;
        profile.validate()?;
        Ok(profile)
    }

    /// Check every load-time invariant. Called on construction paths; ops
    /// assume a valid profile afterwards.
    pub fn validate(&self) -> Result<()> {
        fn bad(msg: impl Into<String>) -> Result<()> {
            Err(Error::InvalidProfile(msg.into()))
        }

        let all = [
            self.v_dd,
            self.v_w_set,
            self.v_w_reset,
            self.v_inhibit_bl_sl,
            self.v_inhibit_wl,
            self.v_read_slc,
            self.v_read_mlc[0],
            self.v_read_mlc[1],
            self.v_read_mlc[2],
            self.vth_slc[0],
            self.vth_slc[1],
            self.vth_mlc[0],
            self.vth_mlc[1],
            self.vth_mlc[2],
            self.vth_mlc[3],
            self.sigma_vth,
            self.eta_transfer,
            self.v_switch,
            self.unselected_wl_bias,
            self.id_vg_slope,
            self.polarization_slc[0],
            self.polarization_slc[1],
            self.polarization_mlc[0],
            self.polarization_mlc[1],
            self.polarization_mlc[2],
            self.polarization_mlc[3],
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all voltages must be finite");
        }
        if self.v_dd <= 0.0 {
            return bad("v_dd must be positive");
        }
        if self.sigma_vth < 0.0 {
            return bad("sigma_vth must be nonnegative");
        }
        if !(self.eta_transfer > 0.0 && self.eta_transfer <= 1.0) {
            return bad("eta_transfer must lie in (0, 1]");
        }
        if self.id_vg_slope <= 0.0 {
            return bad("id_vg_slope must be positive");
        }

        // SLC read window: the read voltage separates the two levels.
        if !(0.0 < self.vth_slc[0] && self.vth_slc[0] < self.v_read_slc) {
            return bad("slc read window requires 0 < vth(0) < v_read_slc");
        }
        if self.vth_slc[1] <= self.v_read_slc {
            return bad("slc read window requires v_read_slc < vth(1)");
        }

        // MLC: the three read voltages interleave the four levels.
        let m = &self.vth_mlc;
        let r = &self.v_read_mlc;
        let interleaved = m[0] < r[0]
            && r[0] < m[1]
            && m[1] < r[1]
            && r[1] < m[2]
            && m[2] < r[2]
            && r[2] < m[3];
        if !(m[0] > 0.0 && interleaved) {
            return bad("mlc levels must interleave the read voltages: vth0 < VR1 < vth1 < VR2 < vth2 < VR3 < vth3");
        }

        // Write-inhibit ladder: a third of the pulse never switches, the full
        // pulse always does.
        if !(self.v_inhibit_wl < self.v_switch && self.v_switch <= self.v_w_set) {
            return bad("inhibit ladder requires v_inhibit_wl < v_switch <= v_w_set");
        }
        if self.v_w_reset < self.v_switch {
            return bad("reset pulse must reach v_switch");
        }

        // Reads are non-destructive. The SLC read point must sit below the
        // switching threshold; the higher MLC read points exceed v_switch for
        // the simulation defaults, so they are only required to stay below the
        // full write amplitude (the read path never applies write pulses).
        if self.v_read_slc >= self.v_switch {
            return bad("v_read_slc must stay below v_switch");
        }
        if self.v_read_mlc.iter().any(|&v| v >= self.v_w_set) {
            return bad("mlc read voltages must stay below v_w_set");
        }

        if self.polarization_slc[0] <= self.polarization_slc[1] {
            return bad("slc polarization must strictly decrease with level");
        }
        if !self.polarization_mlc.windows(2).all(|w| w[0] > w[1]) {
            return bad("mlc polarization must strictly decrease with level");
        }

        for (mode, bands) in [(Mode::Slc, &self.bands_slc[..]), (Mode::Mlc, &self.bands_mlc[..])] {
            for b in bands {
                if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
                    return bad(format!("{mode} band [{}, {}] is malformed", b[0], b[1]));
                }
            }
            if !bands.windows(2).all(|w| w[0][1] <= w[1][0]) {
                return bad(format!("{mode} bands must be ascending and non-overlapping"));
            }
        }

        Ok(())
    }

    /// Nominal Vth for a ciphertext symbol in the given mode.
    pub fn vth_of(&self, mode: Mode, symbol: u8) -> Result<f64> {
        mode.validate_symbol(symbol)?;
        Ok(self.vth_levels(mode)[symbol as usize])
    }

    pub fn vth_levels(&self, mode: Mode) -> &[f64] {
        match mode {
            Mode::Slc => &self.vth_slc,
            Mode::Mlc => &self.vth_mlc,
        }
    }

    pub fn read_voltages(&self, mode: Mode) -> &[f64] {
        match mode {
            Mode::Slc => std::slice::from_ref(&self.v_read_slc),
            Mode::Mlc => &self.v_read_mlc,
        }
    }

    pub fn bands(&self, mode: Mode) -> &[[f64; 2]] {
        match mode {
            Mode::Slc => &self.bands_slc,
            Mode::Mlc => &self.bands_mlc,
        }
    }

    /// Classify a measured Vth into a ciphertext symbol, or `None` when the
    /// value falls outside every band.
    pub fn classify_vth(&self, mode: Mode, vth: f64) -> Option<u8> {
        let bands = self.bands(mode);
        let last = bands.len() - 1;
        bands.iter().enumerate().find_map(|(i, b)| {
            let inside = if i == last {
                vth >= b[0] && vth <= b[1]
            } else {
                vth >= b[0] && vth < b[1]
            };
            inside.then_some(i as u8)
        })
    }
}

impl Default for FerroProfile {
    fn default() -> Self {
        Self::sim_default()
    }
}

/// One cell: the stored symbol and the Vth it actually landed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub level: u8,
    pub vth_actual: f64,
}

impl CellState {
    /// A cell sitting exactly on its nominal Vth.
    pub fn nominal(level: u8, mode: Mode, profile: &FerroProfile) -> Result<Self> {
        Ok(CellState { level, vth_actual: profile.vth_of(mode, level)? })
    }
}

/// Ideal-switch conduction test: the cell is on when the gate overdrives the
/// lower of its two channel terminals by more than Vth. Symmetric in BL/SL,
/// monotone in v_wl and in -vth.
pub fn conducts(v_wl: f64, v_bl: f64, v_sl: f64, vth: f64) -> bool {
    v_wl - v_bl.min(v_sl) > vth
}

/// Settled SL voltage after one read: a conducting cell drags the precharged
/// SL toward BL by `eta_transfer`, an off cell leaves the precharge alone.
pub fn settle_sl(on: bool, v_bl: f64, v_sl_precharge: f64, profile: &FerroProfile) -> f64 {
    if on {
        v_sl_precharge + profile.eta_transfer * (v_bl - v_sl_precharge)
    } else {
        v_sl_precharge
    }
}

/// Draw a programmed Vth for `level`: nominal plus Gaussian sigma_vth.
/// With sigma_vth = 0 this returns the nominal value exactly.
pub fn sample_vth<R: Rng + ?Sized>(
    level: u8,
    mode: Mode,
    profile: &FerroProfile,
    rng: &mut R,
) -> Result<f64> {
    let nominal = profile.vth_of(mode, level)?;
    let dist = Normal::new(nominal, profile.sigma_vth)
        .map_err(|e| Error::InvalidProfile(format!("vth distribution: {e}")))?;
    Ok(dist.sample(rng))
}

/// Apply one write pulse to a cell.
///
/// Switches to `target_if_switch` (resampling Vth) when the gate-to-channel
/// magnitude reaches `v_switch`; smaller pulses are inhibited and leave the
/// cell untouched, whatever the target. A switching pulse whose polarity
/// cannot move the level toward the target (positive pulses program toward
/// LVT, negative toward HVT) is rejected.
pub fn apply_write_pulse<R: Rng + ?Sized>(
    cell: &CellState,
    v_gate: f64,
    v_channel: f64,
    target_if_switch: u8,
    mode: Mode,
    profile: &FerroProfile,
    rng: &mut R,
) -> Result<CellState> {
    mode.validate_symbol(target_if_switch)?;
    let delta = v_gate - v_channel;
    if delta.abs() < profile.v_switch {
        return Ok(cell.clone());
    }
    let current = profile.vth_of(mode, cell.level)?;
    let target = profile.vth_of(mode, target_if_switch)?;
    if (target < current && delta < 0.0) || (target > current && delta > 0.0) {
        return Err(Error::InconsistentPulse {
            level: cell.level,
            target: target_if_switch,
            delta_v: delta,
        });
    }
    Ok(CellState {
        level: target_if_switch,
        vth_actual: sample_vth(target_if_switch, mode, profile, rng)?,
    })
}

/// Normalized Id-Vg transfer curve for plotting: logistic turn-on centered on
/// the cell's actual Vth. Returns (v_g, normalized current) pairs from
/// `v_g_start` to `v_g_stop` inclusive. The drain bias does not change the
/// normalized curve in this model; it is kept for sweep metadata.
pub fn id_vg_curve(
    cell: &CellState,
    v_g_start: f64,
    v_g_stop: f64,
    step: f64,
    v_drain: f64,
    profile: &FerroProfile,
) -> Vec<(f64, f64)> {
    assert!(step > 0.0, "sweep step must be positive");
    assert!(v_g_start < v_g_stop, "sweep must be ascending");
    debug_assert!(v_drain.is_finite());
    let n = ((v_g_stop - v_g_start) / step + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|i| {
            let v_g = v_g_start + i as f64 * step;
            let i_norm = 1.0 / (1.0 + (-(v_g - cell.vth_actual) / profile.id_vg_slope).exp());
            (v_g, i_norm)
        })
        .collect()
}
