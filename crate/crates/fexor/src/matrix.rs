//! Dense row-major matrices for symbols and voltages.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::device::Mode;
use crate::error::{Error, Result};

/// Minimal rectangular matrix. Serializes as an array of row arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type VoltMatrix = Matrix<f64>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("matrix dimensions must be at least 1x1".into()));
        }
        Ok(Matrix { rows, cols, data: vec![value; rows * cols] })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("matrix dimensions must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "matrix data",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidConfig("matrix dimensions must be at least 1x1".into()));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("ragged row: expected {ncols} values, got {}", row.len()),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: nrows, cols: ncols, data })
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        assert!(row < self.rows && col < self.cols, "matrix index out of bounds");
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        assert!(row < self.rows && col < self.cols, "matrix index out of bounds");
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        assert!(row < self.rows, "matrix row out of bounds");
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.cols)
    }
}

impl<T: Serialize> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.data.chunks(self.cols))
    }
}

impl<'de, T: Deserialize<'de> + Clone> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<T>>::deserialize(deserializer)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// A bit matrix (SLC) or 2-bit-symbol matrix (MLC). Every entry is validated
/// against the mode on construction, so downstream code can trust the range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolMatrix {
    mode: Mode,
    cells: Matrix<u8>,
}

impl SymbolMatrix {
    pub fn new(mode: Mode, rows: usize, cols: usize, fill: u8) -> Result<Self> {
        mode.validate_symbol(fill)?;
        Ok(SymbolMatrix { mode, cells: Matrix::filled(rows, cols, fill)? })
    }

    pub fn from_matrix(mode: Mode, cells: Matrix<u8>) -> Result<Self> {
        for &s in cells.data() {
            mode.validate_symbol(s)?;
        }
        Ok(SymbolMatrix { mode, cells })
    }

    pub fn from_rows(mode: Mode, rows: Vec<Vec<u8>>) -> Result<Self> {
        Self::from_matrix(mode, Matrix::from_rows(rows)?)
    }

    /// Uniformly random symbols, e.g. a fresh key.
    pub fn random<R: Rng + ?Sized>(mode: Mode, rows: usize, cols: usize, rng: &mut R) -> Result<Self> {
        let mut m = Matrix::filled(rows, cols, 0u8)?;
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.gen_range(0..mode.levels()));
            }
        }
        Ok(SymbolMatrix { mode, cells: m })
    }

    /// Alternating test pattern: bits checkerboard in SLC, the four symbols
    /// tiled 2x2 in MLC.
    pub fn checkerboard(mode: Mode, rows: usize, cols: usize) -> Result<Self> {
        let mut m = Matrix::filled(rows, cols, 0u8)?;
        for r in 0..rows {
            for c in 0..cols {
                let s = match mode {
                    Mode::Slc => ((r + c) % 2) as u8,
                    Mode::Mlc => (2 * (r % 2) + c % 2) as u8,
                };
                m.set(r, c, s);
            }
        }
        Ok(SymbolMatrix { mode, cells: m })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rows(&self) -> usize {
        self.cells.rows()
    }

    pub fn cols(&self) -> usize {
        self.cells.cols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.cells.dims()
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        *self.cells.get(row, col)
    }

    pub fn set(&mut self, row: usize, col: usize, symbol: u8) -> Result<()> {
        self.mode.validate_symbol(symbol)?;
        self.cells.set(row, col, symbol);
        Ok(())
    }

    pub fn row(&self, row: usize) -> &[u8] {
        self.cells.row(row)
    }

    pub fn data(&self) -> &[u8] {
        self.cells.data()
    }

    pub fn matrix(&self) -> &Matrix<u8> {
        &self.cells
    }

    /// Number of positions where the two matrices disagree.
    pub fn count_diff(&self, other: &SymbolMatrix) -> Result<usize> {
        self.check_compatible(other)?;
        Ok(self.data().iter().zip(other.data()).filter(|(a, b)| a != b).count())
    }

    pub(crate) fn check_compatible(&self, other: &SymbolMatrix) -> Result<()> {
        if self.mode != other.mode {
            return Err(Error::InvalidConfig(format!(
                "mode mismatch: {} vs {}",
                self.mode, other.mode
            )));
        }
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch { expected: self.dims(), got: other.dims() });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for SymbolMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            mode: Mode,
            cells: Matrix<u8>,
        }
        let repr = Repr::deserialize(deserializer)?;
        SymbolMatrix::from_matrix(repr.mode, repr.cells).map_err(D::Error::custom)
    }
}
