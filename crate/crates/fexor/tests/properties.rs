//! Randomized invariants of the device physics, the cipher path, and the
//! bench models. Each property encodes a claim the rest of the crate leans
//! on; shrinkage output from any failure here points at a real modeling bug.

use fexor::cipher::{
    decrypt_matrix, encrypt_store, xor_encrypt, SenseThresholds,
};
use fexor::device::{apply_write_pulse, conducts, id_vg_curve, settle_sl, CellState};
use fexor::io::{
    emit_symbol_matrix_csv, emit_volt_matrix_csv, parse_symbol_matrix_csv, parse_volt_matrix_csv,
};
use fexor::perf::{
    derived_throughput_mbps, row_cycles, workload_latency, CipherOp, SchemeTiming, SenseAmpConfig,
    WorkloadLayer,
};
use fexor::{ArrayGeometry, FeArray, FerroProfile, Matrix, Mode, SymbolMatrix};
use proptest::prelude::*;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mode_of(is_mlc: bool) -> Mode {
    if is_mlc {
        Mode::Mlc
    } else {
        Mode::Slc
    }
}

proptest! {
    #[test]
    fn conduction_is_symmetric_and_monotone_in_gate(
        v_wl in -2.0..4.0f64,
        dv in 0.0..3.0f64,
        v_bl in -1.0..2.0f64,
        v_sl in -1.0..2.0f64,
        vth in -1.0..3.5f64,
    ) {
        prop_assert_eq!(conducts(v_wl, v_bl, v_sl, vth), conducts(v_wl, v_sl, v_bl, vth));
        if conducts(v_wl, v_bl, v_sl, vth) {
            prop_assert!(conducts(v_wl + dv, v_bl, v_sl, vth));
        }
        if !conducts(v_wl, v_bl, v_sl, vth) {
            prop_assert!(!conducts(v_wl, v_bl, v_sl, vth + dv));
        }
    }

    #[test]
    fn settled_voltage_stays_between_precharge_and_bitline(
        on in any::<bool>(),
        v_bl in 0.0..3.0f64,
        pre in 0.0..3.0f64,
    ) {
        let p = FerroProfile::sim_default();
        let v = settle_sl(on, v_bl, pre, &p);
        if on {
            prop_assert!(v >= v_bl.min(pre) - 1e-12);
            prop_assert!(v <= v_bl.max(pre) + 1e-12);
        } else {
            prop_assert_eq!(v, pre);
        }
    }

    #[test]
    fn sub_switch_pulses_never_disturb(
        is_mlc in any::<bool>(),
        level_raw in 0u8..4,
        target_raw in 0u8..4,
        frac in -0.999..0.999f64,
        v_channel in -4.0..4.0f64,
    ) {
        let mode = mode_of(is_mlc);
        let level = level_raw % mode.levels();
        let target = target_raw % mode.levels();
        let p = FerroProfile::sim_default();
        let cell = CellState::nominal(level, mode, &p).unwrap();
        let v_gate = v_channel + frac * p.v_switch;
        prop_assume!((v_gate - v_channel).abs() < p.v_switch);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = apply_write_pulse(&cell, v_gate, v_channel, target, mode, &p, &mut rng).unwrap();
        prop_assert_eq!(out, cell);
    }

    #[test]
    fn switching_pulses_are_idempotent(
        is_mlc in any::<bool>(),
        level_raw in 0u8..4,
        target_raw in 0u8..4,
        extra in 0.0..2.0f64,
    ) {
        let mode = mode_of(is_mlc);
        let level = level_raw % mode.levels();
        let target = target_raw % mode.levels();
        let mut p = FerroProfile::sim_default();
        p.sigma_vth = 0.0;
        let cell = CellState::nominal(level, mode, &p).unwrap();
        let cur = p.vth_of(mode, level).unwrap();
        let tgt = p.vth_of(mode, target).unwrap();
        // Positive gate pulses pull Vth down, negative push it up.
        let delta = if tgt > cur { -(p.v_switch + extra) } else { p.v_switch + extra };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let once = apply_write_pulse(&cell, delta, 0.0, target, mode, &p, &mut rng).unwrap();
        let twice = apply_write_pulse(&once, delta, 0.0, target, mode, &p, &mut rng).unwrap();
        prop_assert_eq!(once.level, target);
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn transfer_curve_is_monotone(
        level_raw in 0u8..4,
        offset in -0.2..0.2f64,
    ) {
        let p = FerroProfile::sim_default();
        let mut cell = CellState::nominal(level_raw % 4, Mode::Mlc, &p).unwrap();
        cell.vth_actual += offset;
        let curve = id_vg_curve(&cell, -1.0, 4.0, 0.05, 0.1, &p);
        prop_assert_eq!(curve.len(), 101);
        for pair in curve.windows(2) {
            // The logistic saturates to exactly 0.0/1.0 in the tails, so only
            // the turn-on region is strictly increasing.
            prop_assert!(pair[1].1 >= pair[0].1);
            if (pair[0].0 - cell.vth_actual).abs() < 0.5 {
                prop_assert!(pair[1].1 > pair[0].1);
            }
        }
        prop_assert!(curve.first().unwrap().1 < 1e-6);
        prop_assert!(curve.last().unwrap().1 > 1.0 - 1e-6);
    }

    #[test]
    fn xor_is_an_involution(
        seed in 0u64..1000,
        rows in 1usize..6,
        cols in 1usize..8,
        is_mlc in any::<bool>(),
    ) {
        let mode = mode_of(is_mlc);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let key = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let ct = xor_encrypt(&pt, &key).unwrap();
        let back = xor_encrypt(&ct, &key).unwrap();
        prop_assert_eq!(back, pt.clone());
        // Self-inverse also means a zero key is the identity.
        let zero = SymbolMatrix::new(mode, rows, cols, 0).unwrap();
        prop_assert_eq!(xor_encrypt(&pt, &zero).unwrap(), pt);
    }

    #[test]
    fn slc_decrypt_takes_one_cycle_and_recovers_plaintext(
        seed in 0u64..500,
        rows in 1usize..5,
        cols in 1usize..7,
    ) {
        let mut p = FerroProfile::sim_default();
        p.sigma_vth = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = SymbolMatrix::random(Mode::Slc, rows, cols, &mut rng).unwrap();
        let key = SymbolMatrix::random(Mode::Slc, rows, cols, &mut rng).unwrap();
        let geometry = ArrayGeometry::new(rows, cols).unwrap();
        let mut array = FeArray::new(geometry, Mode::Slc, p.clone(), &mut rng).unwrap();
        encrypt_store(&mut array, &pt, &key, &mut rng).unwrap();
        let th = SenseThresholds::sim(p.v_dd);
        let (dec, traces) = decrypt_matrix(&array, &key, &th).unwrap();
        prop_assert_eq!(dec, pt);
        for t in &traces {
            prop_assert_eq!(t.cycles.len(), 1);
        }
    }

    #[test]
    fn mlc_decrypt_always_takes_three_cycles(
        seed in 0u64..500,
        rows in 1usize..5,
        cols in 1usize..7,
    ) {
        let mut p = FerroProfile::sim_default();
        p.sigma_vth = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pt = SymbolMatrix::random(Mode::Mlc, rows, cols, &mut rng).unwrap();
        let key = SymbolMatrix::random(Mode::Mlc, rows, cols, &mut rng).unwrap();
        let geometry = ArrayGeometry::new(rows, cols).unwrap();
        let mut array = FeArray::new(geometry, Mode::Mlc, p.clone(), &mut rng).unwrap();
        encrypt_store(&mut array, &pt, &key, &mut rng).unwrap();
        let th = SenseThresholds::sim(p.v_dd);
        let (dec, traces) = decrypt_matrix(&array, &key, &th).unwrap();
        prop_assert_eq!(dec, pt);
        let [v_r1, v_r2, v_r3] = p.v_read_mlc;
        for t in &traces {
            prop_assert_eq!(t.cycles.len(), 3);
            prop_assert_eq!(t.cycles[0].v_read, v_r2);
            prop_assert_eq!(t.cycles[1].v_read, v_r1);
            prop_assert_eq!(t.cycles[2].v_read, v_r3);
        }
    }

    #[test]
    fn canonical_write_schedules_never_disturb(
        rows in 1usize..6,
        cols in 1usize..8,
        row_pick in 0usize..8,
        seed in 0u64..200,
    ) {
        let row = row_pick % rows;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geometry = ArrayGeometry::new(rows, cols).unwrap();
        let array =
            FeArray::new(geometry, Mode::Slc, FerroProfile::sim_default(), &mut rng).unwrap();
        let ct: Vec<u8> = (0..cols).map(|_| rng.gen_range(0..2)).collect();
        prop_assert!(array.disturb_audit(&array.reset_bias()).is_empty());
        let bias = array.program_row_bias(row, &ct).unwrap();
        prop_assert!(array.disturb_audit(&bias).is_empty());
    }

    #[test]
    fn derived_throughput_is_consistent_with_latency(
        sa_pow in 0u32..8,
        word_shift in 0u32..4,
    ) {
        let word_bits = 128usize << word_shift;
        let num_sa = 1usize << sa_pow;
        let sa = SenseAmpConfig::new(num_sa, word_bits).unwrap();
        for scheme in [SchemeTiming::this_work(), SchemeTiming::prior_fefet(), SchemeTiming::aes()] {
            for op in [CipherOp::Encrypt, CipherOp::Decrypt] {
                let mbps = derived_throughput_mbps(&scheme, op, &sa);
                let latency_s = row_cycles(&scheme, op, &sa) / scheme.clock_hz;
                prop_assert!((mbps * 1.0e6 * latency_s - word_bits as f64).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn more_sense_amps_never_slow_decryption(k1 in 0u32..8, k2 in 0u32..8) {
        prop_assume!(k1 <= k2);
        let tw = SchemeTiming::this_work();
        let a = SenseAmpConfig::new(1 << k1, 256).unwrap();
        let b = SenseAmpConfig::new(1 << k2, 256).unwrap();
        prop_assert!(
            row_cycles(&tw, CipherOp::Decrypt, &a) >= row_cycles(&tw, CipherOp::Decrypt, &b)
        );
    }

    #[test]
    fn single_layer_latency_ratio_is_exactly_half(
        ih in 1u64..64,
        iw in 1u64..64,
        fh in 1u64..8,
        fw in 1u64..8,
        channels in 1u64..64,
        num_filters in 1u64..128,
        stride in 1u64..4,
        bitwidth in 1u32..17,
    ) {
        prop_assume!(fh <= ih && fw <= iw);
        let layer = WorkloadLayer {
            name: "l".into(),
            ifmap_h: ih,
            ifmap_w: iw,
            filter_h: fh,
            filter_w: fw,
            channels,
            num_filters,
            stride,
            bitwidth,
        };
        let sa = SenseAmpConfig::default();
        let layers = std::slice::from_ref(&layer);
        let ours = workload_latency(layers, &SchemeTiming::this_work(), &sa).unwrap();
        let prior = workload_latency(layers, &SchemeTiming::prior_fefet(), &sa).unwrap();
        prop_assert_eq!(ours.cycles / prior.cycles, 0.5);
        prop_assert_eq!(ours.seconds / prior.seconds, 0.5);
    }

    #[test]
    fn matrix_csv_round_trips(
        seed in 0u64..1000,
        rows in 1usize..6,
        cols in 1usize..9,
        is_mlc in any::<bool>(),
    ) {
        let mode = mode_of(is_mlc);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let parsed = parse_symbol_matrix_csv(&emit_symbol_matrix_csv(&sym), mode).unwrap();
        prop_assert_eq!(parsed, sym);

        let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let volts = Matrix::from_vec(rows, cols, data).unwrap();
        let parsed = parse_volt_matrix_csv(&emit_volt_matrix_csv(&volts)).unwrap();
        prop_assert_eq!(parsed.data(), volts.data());
    }
}

/// A fixed plaintext XORed with uniformly random keys must produce uniformly
/// distributed ciphertext symbols: the stored state leaks nothing about the
/// data without the key.
#[test]
fn random_keys_whiten_fixed_plaintexts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for mode in [Mode::Slc, Mode::Mlc] {
        for pt in [
            SymbolMatrix::new(mode, 128, 128, 0).unwrap(),
            SymbolMatrix::checkerboard(mode, 128, 128).unwrap(),
        ] {
            let key = SymbolMatrix::random(mode, 128, 128, &mut rng).unwrap();
            let ct = xor_encrypt(&pt, &key).unwrap();
            let mut counts = vec![0u64; mode.levels() as usize];
            for &s in ct.data() {
                counts[s as usize] += 1;
            }
            let n = ct.data().len() as f64;
            let expected = n / mode.levels() as f64;
            let chi2: f64 =
                counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
            // 0.1% critical values for 1 and 3 degrees of freedom.
            let critical = if mode == Mode::Slc { 10.83 } else { 16.27 };
            assert!(chi2 < critical, "{mode} chi2 {chi2} at counts {counts:?}");
        }
    }
}
