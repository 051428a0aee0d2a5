//! Deterministic serialization helpers, CSV matrix interchange, and replay of
//! recorded threshold-voltage maps through the read path.
//!
//! Every JSON emitter here goes through a canonical form (sorted keys, pretty
//! printing, no timestamps) so that identical inputs produce byte-identical
//! output files across runs and machines.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::array::FeArray;
use crate::cipher::{decrypt_row_mlc, decrypt_row_slc, SenseThresholds};
use crate::device::{FerroProfile, Mode};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymbolMatrix, VoltMatrix};

/// Serialize any value to pretty JSON with object keys sorted. Going through
/// `serde_json::Value` funnels every map into a sorted-key representation, so
/// the output is canonical for a given value.
pub fn to_sorted_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)?)
}

/// SHA-256 hex digest of a value's canonical (sorted-key, compact) JSON form.
/// Used to stamp output reports with the exact configuration that made them.
pub fn config_hash_hex<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let canonical = serde_json::to_string(&v)?;
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    Ok(hex)
}

/// One symbol row per line, comma separated, LF newlines.
pub fn emit_symbol_matrix_csv(m: &SymbolMatrix) -> String {
    let mut out = String::new();
    for row in m.matrix().iter_rows() {
        let line: Vec<String> = row.iter().map(u8::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// One voltage row per line; values print in shortest round-trip form.
pub fn emit_volt_matrix_csv(m: &VoltMatrix) -> String {
    let mut out = String::new();
    for row in m.iter_rows() {
        let line: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn parse_csv_rows<T>(text: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<Vec<T>>> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            match parse(field) {
                Some(v) => row.push(v),
                None => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("{field:?} is not a valid {what}"),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no rows found".into() });
    }
    Ok(rows)
}

pub fn parse_symbol_matrix_csv(text: &str, mode: Mode) -> Result<SymbolMatrix> {
    let rows = parse_csv_rows(text, "symbol", |f| f.parse::<u8>().ok())?;
    SymbolMatrix::from_rows(mode, rows)
}

pub fn parse_volt_matrix_csv(text: &str) -> Result<VoltMatrix> {
    let rows = parse_csv_rows(text, "voltage", |f| f.parse::<f64>().ok().filter(|v| v.is_finite()))?;
    Matrix::from_rows(rows)
}

/// A recorded cipher demonstration: the measured threshold-voltage map of a
/// programmed array, the key it was programmed under, and the plaintext it is
/// expected to decrypt to.
#[derive(Debug, Clone)]
pub struct ReplayFixture {
    pub mode: Mode,
    /// Profile preset whose classification bands the voltages were measured
    /// against (a `FerroProfile::preset` name).
    pub band_preset: String,
    /// Free-text note on where the map came from.
    pub provenance: String,
    pub vth: VoltMatrix,
    pub key: SymbolMatrix,
    pub reference_pt: SymbolMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReplayFixtureRepr {
    mode: Mode,
    band_preset: String,
    provenance: String,
    vth: Matrix<f64>,
    key: Matrix<u8>,
    reference_pt: Matrix<u8>,
}

impl ReplayFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ReplayFixtureRepr = serde_json::from_str(text)?;
        let key = SymbolMatrix::from_matrix(repr.mode, repr.key)?;
        let reference_pt = SymbolMatrix::from_matrix(repr.mode, repr.reference_pt)?;
        if repr.vth.dims() != key.dims() {
            return Err(Error::DimensionMismatch { expected: repr.vth.dims(), got: key.dims() });
        }
        if repr.vth.dims() != reference_pt.dims() {
            return Err(Error::DimensionMismatch {
                expected: repr.vth.dims(),
                got: reference_pt.dims(),
            });
        }
        if FerroProfile::preset(&repr.band_preset).is_none() {
            return Err(Error::InvalidProfile(format!(
                "unknown band_preset {:?}",
                repr.band_preset
            )));
        }
        Ok(ReplayFixture {
            mode: repr.mode,
            band_preset: repr.band_preset,
            provenance: repr.provenance,
            vth: repr.vth,
            key,
            reference_pt,
        })
    }

    /// The profile whose bands this fixture was measured against.
    pub fn profile(&self) -> FerroProfile {
        FerroProfile::preset(&self.band_preset).expect("preset validated at load")
    }

    pub fn dims(&self) -> (usize, usize) {
        self.vth.dims()
    }
}

/// The 8x6 four-level demonstration map bundled with the crate.
pub fn bundled_mlc_8x6() -> ReplayFixture {
    ReplayFixture::from_json(include_str!("../data/fixtures/mlc_8x6_replay.json"))
        .expect("bundled fixture is valid")
}

/// Result of pushing a measured voltage map through classification and the
/// full read-decrypt path.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayOutcome {
    /// Band classification of each measured voltage; None where the voltage
    /// falls outside every band.
    pub classified_ct: Matrix<Option<u8>>,
    /// Plaintext symbol recovered by the simulated read cycles; None where a
    /// decisive sense was indeterminate.
    pub decoded_pt: Matrix<Option<u8>>,
    /// 1 where the cell is in error (unclassifiable, undecodable, or decoded
    /// plaintext differs from the reference).
    pub error_map: Matrix<u8>,
    pub error_cells: Vec<(usize, usize)>,
    pub unclassified: usize,
    pub errors: usize,
    pub cells: usize,
    pub error_rate: f64,
}

/// Replay a recorded voltage map: classify every cell against the profile's
/// bands and re-run the read-decrypt sequence at the measured voltages, then
/// compare with the reference plaintext. Cells decode independently (each
/// column settles on its own source line), so one bad cell cannot mask
/// another.
pub fn replay_experiment(
    fixture: &ReplayFixture,
    profile: &FerroProfile,
    thresholds: &SenseThresholds,
) -> Result<ReplayOutcome> {
    profile.validate()?;
    let (rows, cols) = fixture.dims();
    let mut classified = Matrix::filled(rows, cols, None)?;
    let mut decoded = Matrix::filled(rows, cols, None)?;
    let mut error_map = Matrix::filled(rows, cols, 0u8)?;
    let mut error_cells = Vec::new();
    let mut unclassified = 0;
    let mut errors = 0;

    for row in 0..rows {
        for col in 0..cols {
            let vth = *fixture.vth.get(row, col);
            let class = profile.classify_vth(fixture.mode, vth);
            classified.set(row, col, class);
            if class.is_none() {
                unclassified += 1;
            }

            let single = Matrix::from_vec(1, 1, vec![vth])?;
            let cell_array = FeArray::from_vth_map(fixture.mode, profile.clone(), &single)?;
            let key_row = [fixture.key.get(row, col)];
            let result = match fixture.mode {
                Mode::Slc => decrypt_row_slc(&cell_array, 0, &key_row, thresholds),
                Mode::Mlc => decrypt_row_mlc(&cell_array, 0, &key_row, thresholds),
            };
            let pt = match result {
                Ok((pt, _)) => Some(pt[0]),
                Err(Error::Undecodable { .. }) => None,
                Err(e) => return Err(e),
            };
            decoded.set(row, col, pt);

            let reference = fixture.reference_pt.get(row, col);
            if class.is_none() || pt != Some(reference) {
                error_map.set(row, col, 1);
                error_cells.push((row, col));
                errors += 1;
            }
        }
    }

    let cells = rows * cols;
    Ok(ReplayOutcome {
        classified_ct: classified,
        decoded_pt: decoded,
        error_map,
        error_cells,
        unclassified,
        errors,
        cells,
        error_rate: errors as f64 / cells as f64,
    })
}
