//! Crossbar array of FeFET cells with word-line / bit-line / source-line
//! bias scheduling.
//!
//! Writes follow the V_W/3 inhibit scheme: a reset pulse drives every cell to
//! the highest-Vth level, then each row is programmed with +V_W on its WL
//! while inhibited columns sit at 2*V_W/3 and unselected WLs at V_W/3, so no
//! unintended cell ever sees more than a third of the write amplitude.
//! Reads are non-destructive and leave the array untouched.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::device::{
    apply_write_pulse, conducts, sample_vth, settle_sl, CellState, FerroProfile, Mode,
};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymbolMatrix, VoltMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
}

impl ArrayGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("array geometry must be at least 1x1".into()));
        }
        Ok(ArrayGeometry { rows, cols })
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }
}

/// Voltage schedule for one array cycle: one WL entry per row, one BL and one
/// SL-precharge entry per column, plus the rows the cycle intends to act on.
/// Rows outside `selected_rows` are what the disturb audit watches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasVector {
    pub wl: Vec<f64>,
    pub bl: Vec<f64>,
    pub sl_precharge: Vec<f64>,
    pub selected_rows: Vec<usize>,
}

impl BiasVector {
    pub fn validate_for(&self, geometry: &ArrayGeometry) -> Result<()> {
        if self.wl.len() != geometry.rows {
            return Err(Error::LengthMismatch {
                what: "bias wl",
                expected: geometry.rows,
                got: self.wl.len(),
            });
        }
        if self.bl.len() != geometry.cols {
            return Err(Error::LengthMismatch {
                what: "bias bl",
                expected: geometry.cols,
                got: self.bl.len(),
            });
        }
        if self.sl_precharge.len() != geometry.cols {
            return Err(Error::LengthMismatch {
                what: "bias sl_precharge",
                expected: geometry.cols,
                got: self.sl_precharge.len(),
            });
        }
        let finite = self.wl.iter().chain(&self.bl).chain(&self.sl_precharge);
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBias("all voltages must be finite".into()));
        }
        if let Some(&r) = self.selected_rows.iter().find(|&&r| r >= geometry.rows) {
            return Err(Error::RowOutOfRange { row: r, rows: geometry.rows });
        }
        Ok(())
    }
}

/// One potential write disturb: an unselected cell that would see a
/// polarization-switching voltage under a given bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disturb {
    pub row: usize,
    pub col: usize,
    pub delta_v: f64,
}

#[derive(Serialize, Deserialize)]
struct ArrayDump {
    mode: Mode,
    rows: usize,
    cols: usize,
    cells: Vec<Vec<CellState>>,
}

/// The cell array plus the profile it was built against.
#[derive(Debug, Clone)]
pub struct FeArray {
    geometry: ArrayGeometry,
    mode: Mode,
    profile: FerroProfile,
    cells: Vec<CellState>,
}

impl FeArray {
    /// Fresh array with every cell in the reset (highest-Vth) state.
    pub fn new<R: Rng + ?Sized>(
        geometry: ArrayGeometry,
        mode: Mode,
        profile: FerroProfile,
        rng: &mut R,
    ) -> Result<Self> {
        profile.validate()?;
        let top = mode.max_symbol();
        let mut cells = Vec::with_capacity(geometry.cells());
        for _ in 0..geometry.cells() {
            cells.push(CellState { level: top, vth_actual: sample_vth(top, mode, &profile, rng)? });
        }
        Ok(FeArray { geometry, mode, profile, cells })
    }

    /// Array whose cells carry externally measured threshold voltages, for
    /// replaying recorded experiments through the read path. Each stored
    /// level is the band classification of its voltage, falling back to the
    /// nearest nominal level for out-of-band cells; the read path only looks
    /// at the voltage itself.
    pub fn from_vth_map(mode: Mode, profile: FerroProfile, vth: &VoltMatrix) -> Result<Self> {
        profile.validate()?;
        let (rows, cols) = vth.dims();
        let geometry = ArrayGeometry::new(rows, cols)?;
        let mut cells = Vec::with_capacity(geometry.cells());
        for row in 0..rows {
            for col in 0..cols {
                let v = *vth.get(row, col);
                if !v.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "vth at ({row}, {col}) is not finite"
                    )));
                }
                let level = profile.classify_vth(mode, v).unwrap_or_else(|| {
                    let nominals = profile.vth_levels(mode);
                    (0..nominals.len())
                        .min_by(|&a, &b| {
                            (nominals[a] - v).abs().total_cmp(&(nominals[b] - v).abs())
                        })
                        .unwrap() as u8
                });
                cells.push(CellState { level, vth_actual: v });
            }
        }
        Ok(FeArray { geometry, mode, profile, cells })
    }

    pub fn geometry(&self) -> ArrayGeometry {
        self.geometry
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn profile(&self) -> &FerroProfile {
        &self.profile
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.geometry.cols + col
    }

    pub fn cell(&self, row: usize, col: usize) -> &CellState {
        assert!(row < self.geometry.rows && col < self.geometry.cols, "cell index out of bounds");
        &self.cells[self.idx(row, col)]
    }

    /// Stored symbols as a matrix.
    pub fn levels(&self) -> SymbolMatrix {
        let m = Matrix::from_vec(
            self.geometry.rows,
            self.geometry.cols,
            self.cells.iter().map(|c| c.level).collect(),
        )
        .expect("geometry is valid");
        SymbolMatrix::from_matrix(self.mode, m).expect("stored levels are in range")
    }

    /// Actual (sampled) threshold voltages as a matrix.
    pub fn vth_map(&self) -> VoltMatrix {
        Matrix::from_vec(
            self.geometry.rows,
            self.geometry.cols,
            self.cells.iter().map(|c| c.vth_actual).collect(),
        )
        .expect("geometry is valid")
    }

    fn check_row(&self, row: usize) -> Result<()> {
        if row >= self.geometry.rows {
            return Err(Error::RowOutOfRange { row, rows: self.geometry.rows });
        }
        Ok(())
    }

    /// Bias schedule for the global reset: -V_W on every WL, channels at 0.
    /// Every row is an intentional target, so the disturb audit has nothing
    /// to inspect.
    pub fn reset_bias(&self) -> BiasVector {
        BiasVector {
            wl: vec![-self.profile.v_w_reset; self.geometry.rows],
            bl: vec![0.0; self.geometry.cols],
            sl_precharge: vec![0.0; self.geometry.cols],
            selected_rows: (0..self.geometry.rows).collect(),
        }
    }

    /// Bias schedule for the LVT-set step of one row: +V_W on the selected
    /// WL, V_W/3 on the others, columns grounded where the bit is 0 and held
    /// at 2*V_W/3 where the bit is 1 (write-inhibited, the cell keeps HVT).
    pub fn program_row_bias(&self, row: usize, ct_bits: &[u8]) -> Result<BiasVector> {
        self.check_row(row)?;
        if ct_bits.len() != self.geometry.cols {
            return Err(Error::LengthMismatch {
                what: "ct bits",
                expected: self.geometry.cols,
                got: ct_bits.len(),
            });
        }
        for &b in ct_bits {
            Mode::Slc.validate_symbol(b)?;
        }
        let mut wl = vec![self.profile.v_inhibit_wl; self.geometry.rows];
        wl[row] = self.profile.v_w_set;
        let col_level: Vec<f64> = ct_bits
            .iter()
            .map(|&b| if b == 0 { 0.0 } else { self.profile.v_inhibit_bl_sl })
            .collect();
        Ok(BiasVector {
            wl,
            bl: col_level.clone(),
            sl_precharge: col_level,
            selected_rows: vec![row],
        })
    }

    /// Apply one write bias to every cell. BL and SL must agree per column:
    /// during writes the channel floats at the common terminal level.
    fn apply_pulse_schedule<R: Rng + ?Sized>(
        &mut self,
        bias: &BiasVector,
        target_if_switch: u8,
        rng: &mut R,
    ) -> Result<()> {
        bias.validate_for(&self.geometry)?;
        for (c, (&bl, &sl)) in bias.bl.iter().zip(&bias.sl_precharge).enumerate() {
            if bl != sl {
                return Err(Error::InvalidBias(format!(
                    "write pulse needs BL == SL on column {c} (got {bl} vs {sl})"
                )));
            }
        }
        for r in 0..self.geometry.rows {
            for c in 0..self.geometry.cols {
                let i = self.idx(r, c);
                self.cells[i] = apply_write_pulse(
                    &self.cells[i],
                    bias.wl[r],
                    bias.bl[c],
                    target_if_switch,
                    self.mode,
                    &self.profile,
                    rng,
                )?;
            }
        }
        Ok(())
    }

    /// Drive every cell to the highest-Vth level with a full -V_W pulse.
    /// Idempotent on levels; Vth is resampled either way.
    pub fn reset_all<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let bias = self.reset_bias();
        self.apply_pulse_schedule(&bias, self.mode.max_symbol(), rng)
    }

    /// Program one row of SLC ciphertext using the two-step scheme's set
    /// step. Assumes the array was reset first (only 1 -> 0 transitions
    /// happen here; a cell already at LVT in an inhibited column keeps it).
    pub fn program_row_slc<R: Rng + ?Sized>(
        &mut self,
        row: usize,
        ct_bits: &[u8],
        rng: &mut R,
    ) -> Result<()> {
        if self.mode != Mode::Slc {
            return Err(Error::InvalidConfig("program_row_slc requires an SLC array".into()));
        }
        let bias = self.program_row_bias(row, ct_bits)?;
        // Positive pulses program toward LVT; that is the target wherever the
        // amplitude reaches v_switch, i.e. exactly the selected 0-columns.
        self.apply_pulse_schedule(&bias, 0, rng)
    }

    /// Set every cell's level directly (single-shot multi-level programming),
    /// resampling each Vth.
    pub fn program_levels<R: Rng + ?Sized>(
        &mut self,
        levels: &SymbolMatrix,
        rng: &mut R,
    ) -> Result<()> {
        if levels.mode() != self.mode {
            return Err(Error::InvalidConfig(format!(
                "level matrix is {}, array is {}",
                levels.mode(),
                self.mode
            )));
        }
        if levels.dims() != (self.geometry.rows, self.geometry.cols) {
            return Err(Error::DimensionMismatch {
                expected: (self.geometry.rows, self.geometry.cols),
                got: levels.dims(),
            });
        }
        for r in 0..self.geometry.rows {
            for c in 0..self.geometry.cols {
                let level = levels.get(r, c);
                let i = self.idx(r, c);
                self.cells[i] =
                    CellState { level, vth_actual: sample_vth(level, self.mode, &self.profile, rng)? };
            }
        }
        Ok(())
    }

    /// One read cycle on `row`: per column, resolve conduction of the
    /// selected cell at `v_read` against the column bias and return the
    /// settled SL voltages. Pure; the array state is untouched.
    pub fn read_cycle(&self, row: usize, bias: &BiasVector, v_read: f64) -> Result<Vec<f64>> {
        self.check_row(row)?;
        bias.validate_for(&self.geometry)?;
        let mut settled = Vec::with_capacity(self.geometry.cols);
        for c in 0..self.geometry.cols {
            let cell = &self.cells[self.idx(row, c)];
            let on = conducts(v_read, bias.bl[c], bias.sl_precharge[c], cell.vth_actual);
            settled.push(settle_sl(on, bias.bl[c], bias.sl_precharge[c], &self.profile));
        }
        Ok(settled)
    }

    /// List every cell outside the selected rows whose WL-to-terminal
    /// difference reaches the switching threshold under `bias`. Canonical
    /// reset/program schedules return an empty list.
    pub fn disturb_audit(&self, bias: &BiasVector) -> Vec<Disturb> {
        let mut out = Vec::new();
        for r in 0..self.geometry.rows {
            if bias.selected_rows.contains(&r) {
                continue;
            }
            for c in 0..self.geometry.cols {
                let d_bl = (bias.wl[r] - bias.bl[c]).abs();
                let d_sl = (bias.wl[r] - bias.sl_precharge[c]).abs();
                let worst = d_bl.max(d_sl);
                if worst >= self.profile.v_switch {
                    out.push(Disturb { row: r, col: c, delta_v: worst });
                }
            }
        }
        out
    }

    /// Dump as CSV: a `mode,rows,cols` header record, then one line per row
    /// of `level:vth` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{},{}\n", self.mode, self.geometry.rows, self.geometry.cols);
        for r in 0..self.geometry.rows {
            let line: Vec<String> = (0..self.geometry.cols)
                .map(|c| {
                    let cell = self.cell(r, c);
                    format!("{}:{}", cell.level, cell.vth_actual)
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, profile: FerroProfile) -> Result<Self> {
        profile.validate()?;
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty dump".into() })?;
        let parts: Vec<&str> = header.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse { line: 1, msg: "header must be mode,rows,cols".into() });
        }
        let mode = match parts[0].trim() {
            "slc" => Mode::Slc,
            "mlc" => Mode::Mlc,
            other => {
                return Err(Error::Parse { line: 1, msg: format!("unknown mode {other:?}") })
            }
        };
        let rows: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad row count".into() })?;
        let cols: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "bad col count".into() })?;
        let geometry = ArrayGeometry::new(rows, cols)?;

        let mut cells = Vec::with_capacity(geometry.cells());
        let mut count = 0usize;
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            count += 1;
            if count > rows {
                return Err(Error::Parse { line: lineno, msg: "more rows than the header declares".into() });
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {cols} cells, got {}", fields.len()),
                });
            }
            for f in fields {
                let (lvl, vth) = f.split_once(':').ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("cell {f:?} is not level:vth"),
                })?;
                let level: u8 = lvl.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad level {lvl:?}"),
                })?;
                mode.validate_symbol(level)?;
                let vth_actual: f64 = vth.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad vth {vth:?}"),
                })?;
                if !vth_actual.is_finite() {
                    return Err(Error::Parse { line: lineno, msg: "vth must be finite".into() });
                }
                cells.push(CellState { level, vth_actual });
            }
        }
        if count != rows {
            return Err(Error::Parse {
                line: count + 1,
                msg: format!("expected {rows} rows, got {count}"),
            });
        }
        Ok(FeArray { geometry, mode, profile, cells })
    }

    pub fn to_json(&self) -> Result<String> {
        let dump = ArrayDump {
            mode: self.mode,
            rows: self.geometry.rows,
            cols: self.geometry.cols,
            cells: self
                .cells
                .chunks(self.geometry.cols)
                .map(|row| row.to_vec())
                .collect(),
        };
        crate::io::to_sorted_pretty_json(&dump)
    }

    pub fn from_json(text: &str, profile: FerroProfile) -> Result<Self> {
        profile.validate()?;
        let dump: ArrayDump = serde_json::from_str(text)?;
        let geometry = ArrayGeometry::new(dump.rows, dump.cols)?;
        if dump.cells.len() != dump.rows {
            return Err(Error::LengthMismatch {
                what: "dump rows",
                expected: dump.rows,
                got: dump.cells.len(),
            });
        }
        let mut cells = Vec::with_capacity(geometry.cells());
        for row in &dump.cells {
            if row.len() != dump.cols {
                return Err(Error::LengthMismatch {
                    what: "dump cols",
                    expected: dump.cols,
                    got: row.len(),
                });
            }
            for cell in row {
                dump.mode.validate_symbol(cell.level)?;
                if !cell.vth_actual.is_finite() {
                    return Err(Error::InvalidConfig("vth must be finite".into()));
                }
                cells.push(cell.clone());
            }
        }
        Ok(FeArray { geometry, mode: dump.mode, profile, cells })
    }
}
