//! The in-memory XOR cipher on top of the array.
//!
//! Ciphertext lives in the cells as Vth levels; the key is never stored. It
//! is applied as BL/SL polarity during reads: key=1 drives BL to V_DD with SL
//! precharged low, key=0 grounds BL and precharges SL high. A conducting cell
//! drags SL toward BL, an off cell leaves the precharge, so the settled SL is
//! the plaintext bit - ciphertext XOR key resolved in a single read cycle
//! for SLC, and in exactly three cycles for 2-bit cells.

use rand::Rng;
use serde::Serialize;

use crate::array::{BiasVector, FeArray};
use crate::device::Mode;
use crate::error::{Error, Result};
use crate::matrix::SymbolMatrix;

/// Sense-amplifier decode bands: at or below `v_low_max` reads 0, at or above
/// `v_high_min` reads 1, anything strictly between is indeterminate. The two
/// may coincide, which leaves no indeterminate gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SenseThresholds {
    pub v_low_max: f64,
    pub v_high_min: f64,
}

impl SenseThresholds {
    pub fn new(v_low_max: f64, v_high_min: f64) -> Result<Self> {
        if !(v_low_max.is_finite() && v_high_min.is_finite()) {
            return Err(Error::InvalidConfig("sense thresholds must be finite".into()));
        }
        if !(0.0 <= v_low_max && v_low_max <= v_high_min) {
            return Err(Error::InvalidConfig(
                "sense thresholds need 0 <= v_low_max <= v_high_min".into(),
            ));
        }
        Ok(SenseThresholds { v_low_max, v_high_min })
    }

    /// Simulation preset: 0 below a tenth of V_DD, 1 above half of V_DD.
    pub fn sim(v_dd: f64) -> Self {
        SenseThresholds { v_low_max: 0.1 * v_dd, v_high_min: 0.5 * v_dd }
    }

    /// Measured-device preset: [0, 0.1] V reads 0, above that reads 1, with
    /// no indeterminate gap.
    pub fn experimental() -> Self {
        SenseThresholds { v_low_max: 0.1, v_high_min: 0.1 }
    }
}

/// One read cycle of a decrypt: the read voltage, the settled SL per column,
/// and the per-column decode (None where the sense was indeterminate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleTrace {
    pub v_read: f64,
    pub sl: Vec<f64>,
    pub decoded: Vec<Option<u8>>,
}

/// Full decode trace for one row: one cycle in SLC, exactly three in MLC
/// whatever the data (constant-cycle contract).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecryptTrace {
    pub row: usize,
    pub cycles: Vec<CycleTrace>,
}

/// Elementwise XOR of plaintext and key symbols. Works for both modes since
/// MLC symbols XOR bitwise.
pub fn xor_encrypt(pt: &SymbolMatrix, key: &SymbolMatrix) -> Result<SymbolMatrix> {
    pt.check_compatible(key)?;
    let rows = (0..pt.rows())
        .map(|r| pt.row(r).iter().zip(key.row(r)).map(|(a, b)| a ^ b).collect())
        .collect();
    SymbolMatrix::from_rows(pt.mode(), rows)
}

/// Column bias for one key bit during a read: (BL, SL precharge).
pub fn key_to_bias(key_bit: u8, v_dd: f64) -> (f64, f64) {
    assert!(key_bit <= 1, "key bit must be 0 or 1");
    if key_bit == 1 {
        (v_dd, 0.0)
    } else {
        (0.0, v_dd)
    }
}

/// Decode one settled SL voltage. The key bit does not enter the decision
/// (the bias scheme already folded it in); it is accepted so call sites read
/// uniformly.
pub fn sense(v_sl: f64, _key_bit: u8, thresholds: &SenseThresholds) -> Result<u8> {
    if v_sl <= thresholds.v_low_max {
        Ok(0)
    } else if v_sl >= thresholds.v_high_min {
        Ok(1)
    } else {
        Err(Error::IndeterminateSense { v_sl })
    }
}

/// Read bias for one row under a key-bit vector: selected WL at `v_read`,
/// unselected WLs held at the profile's read-off bias, columns from
/// `key_to_bias`.
pub fn key_read_bias(
    array: &FeArray,
    row: usize,
    key_bits: &[u8],
    v_read: f64,
) -> Result<BiasVector> {
    let geom = array.geometry();
    if row >= geom.rows {
        return Err(Error::RowOutOfRange { row, rows: geom.rows });
    }
    if key_bits.len() != geom.cols {
        return Err(Error::LengthMismatch {
            what: "key bits",
            expected: geom.cols,
            got: key_bits.len(),
        });
    }
    for &k in key_bits {
        Mode::Slc.validate_symbol(k)?;
    }
    let mut wl = vec![array.profile().unselected_wl_bias; geom.rows];
    wl[row] = v_read;
    let (bl, sl_precharge) = key_bits
        .iter()
        .map(|&k| key_to_bias(k, array.profile().v_dd))
        .unzip();
    Ok(BiasVector { wl, bl, sl_precharge, selected_rows: vec![row] })
}

fn check_key_row(array: &FeArray, key_row: &[u8]) -> Result<()> {
    let cols = array.geometry().cols;
    if key_row.len() != cols {
        return Err(Error::LengthMismatch { what: "key row", expected: cols, got: key_row.len() });
    }
    for &k in key_row {
        array.mode().validate_symbol(k)?;
    }
    Ok(())
}

/// Decrypt one SLC row in a single read cycle. Any indeterminate sense aborts
/// with the offending column.
pub fn decrypt_row_slc(
    array: &FeArray,
    row: usize,
    key_row: &[u8],
    thresholds: &SenseThresholds,
) -> Result<(Vec<u8>, DecryptTrace)> {
    if array.mode() != Mode::Slc {
        return Err(Error::InvalidConfig("decrypt_row_slc requires an SLC array".into()));
    }
    check_key_row(array, key_row)?;
    let v_read = array.profile().v_read_slc;
    let bias = key_read_bias(array, row, key_row, v_read)?;
    let sl = array.read_cycle(row, &bias, v_read)?;
    let decoded: Vec<Option<u8>> =
        sl.iter().zip(key_row).map(|(&v, &k)| sense(v, k, thresholds).ok()).collect();
    let mut pt = Vec::with_capacity(sl.len());
    for (col, d) in decoded.iter().enumerate() {
        match d {
            Some(bit) => pt.push(*bit),
            None => return Err(Error::Undecodable { row, col, cycle: 1, v_sl: sl[col] }),
        }
    }
    let trace = DecryptTrace { row, cycles: vec![CycleTrace { v_read, sl, decoded }] };
    Ok((pt, trace))
}

/// Decrypt one MLC row with the fixed three-cycle schedule:
///
/// 1. key MSBs bias the columns, read at V_R2 -> plaintext MSBs;
/// 2. key LSBs, read at V_R1;
/// 3. key LSBs again, read at V_R3.
///
/// The ciphertext MSB (sensed MSB XOR key MSB) picks which of cycles 2 and 3
/// is the decisive LSB read. All three cycles always execute; an
/// indeterminate sense only matters in a decisive cycle.
pub fn decrypt_row_mlc(
    array: &FeArray,
    row: usize,
    key_row: &[u8],
    thresholds: &SenseThresholds,
) -> Result<(Vec<u8>, DecryptTrace)> {
    if array.mode() != Mode::Mlc {
        return Err(Error::InvalidConfig("decrypt_row_mlc requires an MLC array".into()));
    }
    check_key_row(array, key_row)?;
    let [v_r1, v_r2, v_r3] = array.profile().v_read_mlc;
    let key_msb: Vec<u8> = key_row.iter().map(|k| (k >> 1) & 1).collect();
    let key_lsb: Vec<u8> = key_row.iter().map(|k| k & 1).collect();

    let mut cycles = Vec::with_capacity(3);
    for (v_read, key_bits) in [(v_r2, &key_msb), (v_r1, &key_lsb), (v_r3, &key_lsb)] {
        let bias = key_read_bias(array, row, key_bits, v_read)?;
        let sl = array.read_cycle(row, &bias, v_read)?;
        let decoded =
            sl.iter().zip(key_bits).map(|(&v, &k)| sense(v, k, thresholds).ok()).collect();
        cycles.push(CycleTrace { v_read, sl, decoded });
    }

    let cols = array.geometry().cols;
    let mut pt = Vec::with_capacity(cols);
    for (col, &k_msb) in key_msb.iter().enumerate() {
        let msb = cycles[0].decoded[col].ok_or(Error::Undecodable {
            row,
            col,
            cycle: 1,
            v_sl: cycles[0].sl[col],
        })?;
        let ct_msb = msb ^ k_msb;
        let decisive = if ct_msb == 0 { 1 } else { 2 };
        let lsb = cycles[decisive].decoded[col].ok_or(Error::Undecodable {
            row,
            col,
            cycle: decisive + 1,
            v_sl: cycles[decisive].sl[col],
        })?;
        pt.push((msb << 1) | lsb);
    }
    Ok((pt, DecryptTrace { row, cycles }))
}

/// Encrypt a plaintext matrix under a key and store the ciphertext into the
/// array: two-step reset + per-row set for SLC, single-shot level programming
/// for MLC.
pub fn encrypt_store<R: Rng + ?Sized>(
    array: &mut FeArray,
    pt: &SymbolMatrix,
    key: &SymbolMatrix,
    rng: &mut R,
) -> Result<()> {
    if pt.mode() != array.mode() {
        return Err(Error::InvalidConfig(format!(
            "plaintext is {}, array is {}",
            pt.mode(),
            array.mode()
        )));
    }
    let geom = array.geometry();
    if pt.dims() != (geom.rows, geom.cols) {
        return Err(Error::DimensionMismatch { expected: (geom.rows, geom.cols), got: pt.dims() });
    }
    let ct = xor_encrypt(pt, key)?;
    match array.mode() {
        Mode::Slc => {
            array.reset_all(rng)?;
            for r in 0..geom.rows {
                array.program_row_slc(r, ct.row(r), rng)?;
            }
        }
        Mode::Mlc => array.program_levels(&ct, rng)?,
    }
    Ok(())
}

/// Decrypt the whole array row by row under a key matrix.
pub fn decrypt_matrix(
    array: &FeArray,
    key: &SymbolMatrix,
    thresholds: &SenseThresholds,
) -> Result<(SymbolMatrix, Vec<DecryptTrace>)> {
    let geom = array.geometry();
    if key.mode() != array.mode() {
        return Err(Error::InvalidConfig(format!(
            "key is {}, array is {}",
            key.mode(),
            array.mode()
        )));
    }
    if key.dims() != (geom.rows, geom.cols) {
        return Err(Error::DimensionMismatch { expected: (geom.rows, geom.cols), got: key.dims() });
    }
    let mut rows = Vec::with_capacity(geom.rows);
    let mut traces = Vec::with_capacity(geom.rows);
    for r in 0..geom.rows {
        let (pt, trace) = match array.mode() {
            Mode::Slc => decrypt_row_slc(array, r, key.row(r), thresholds)?,
            Mode::Mlc => decrypt_row_mlc(array, r, key.row(r), thresholds)?,
        };
        rows.push(pt);
        traces.push(trace);
    }
    Ok((SymbolMatrix::from_rows(array.mode(), rows)?, traces))
}
