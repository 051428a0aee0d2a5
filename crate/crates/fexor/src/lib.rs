//! Behavioral simulator and analysis toolkit for an in-memory XOR cipher
//! built from single-transistor ferroelectric FETs.
//!
//! Ciphertext lives in the array as threshold-voltage state (one bit per cell,
//! or two with four-level programming). The key never touches the stored
//! data: each key bit only picks the polarity of a column's bit-line/source-
//! line pair during a read, so the voltage that settles on the source line is
//! already plaintext XOR key. Decryption is therefore a read, and encryption
//! is an ordinary program of plaintext XOR key.
//!
//! The crate is organized around that pipeline:
//!
//! * [`device`]: cell electrostatics, programming pulses, profile presets;
//! * [`matrix`] and [`array`]: symbol/voltage matrices and the biased cell
//!   array with its write-inhibit discipline;
//! * [`cipher`]: XOR coding, key-to-bias mapping, sensing, and the one-cycle
//!   (two-level) and three-cycle (four-level) decrypt schedules;
//! * [`variation`]: Monte Carlo threshold-voltage variation and sense-margin
//!   analysis;
//! * [`perf`]: cycle, throughput, area, and workload-traffic comparisons
//!   against a two-transistor scheme and an AES accelerator;
//! * [`io`]: deterministic JSON/CSV interchange and replay of recorded
//!   voltage maps.

pub mod array;
pub mod cipher;
pub mod device;
pub mod error;
pub mod io;
pub mod matrix;
pub mod perf;
pub mod variation;

pub use array::{ArrayGeometry, BiasVector, Disturb, FeArray};
pub use cipher::{
    decrypt_matrix, decrypt_row_mlc, decrypt_row_slc, encrypt_store, key_to_bias, sense,
    xor_encrypt, CycleTrace, DecryptTrace, SenseThresholds,
};
pub use device::{CellState, FerroProfile, Mode, PRESET_28NM_EXPERIMENTAL, PRESET_SIM_DEFAULT};
pub use error::{Error, Result};
pub use matrix::{Matrix, SymbolMatrix, VoltMatrix};
pub use variation::{McConfig, McReport};
