//! End-to-end acceptance checks. Each test exercises one headline claim of
//! the cipher design and prints a single PASS line on success; run with
//! `cargo test -p fexor --test acceptance -- --nocapture` to see them.

use fexor::cipher::{decrypt_matrix, decrypt_row_mlc, decrypt_row_slc, encrypt_store, xor_encrypt};
use fexor::io::{bundled_mlc_8x6, replay_experiment};
use fexor::perf::{
    area_report, bundled_topologies, parse_topology_csv, speedup_latency, speedup_throughput,
    throughput_mbps, workload_latency, CipherOp, SchemeTiming, SenseAmpConfig, DEFAULT_BITWIDTH,
};
use fexor::variation::{run_mc, run_mc_parallel, sense_margin, McConfig};
use fexor::{
    ArrayGeometry, FeArray, FerroProfile, Mode, SenseThresholds, SymbolMatrix,
};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quiet_profile() -> FerroProfile {
    let mut p = FerroProfile::sim_default();
    p.sigma_vth = 0.0;
    p
}

fn full_path(
    mode: Mode,
    pt: &SymbolMatrix,
    key: &SymbolMatrix,
    profile: &FerroProfile,
    rng: &mut ChaCha8Rng,
) -> (SymbolMatrix, FeArray) {
    let (rows, cols) = pt.dims();
    let geometry = ArrayGeometry::new(rows, cols).unwrap();
    let mut array = FeArray::new(geometry, mode, profile.clone(), rng).unwrap();
    encrypt_store(&mut array, pt, key, rng).unwrap();
    let th = SenseThresholds::sim(profile.v_dd);
    let (dec, _) = decrypt_matrix(&array, key, &th).unwrap();
    (dec, array)
}

#[test]
fn criterion_1_slc_all_four_combinations() {
    // One row holding every (ciphertext, key) pair; stored state must be the
    // XOR and one read cycle must return the exact plaintext.
    let profile = quiet_profile();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pt = SymbolMatrix::from_rows(Mode::Slc, vec![vec![1, 0, 0, 1]]).unwrap();
    let key = SymbolMatrix::from_rows(Mode::Slc, vec![vec![1, 1, 0, 0]]).unwrap();
    let (dec, array) = full_path(Mode::Slc, &pt, &key, &profile, &mut rng);
    assert_eq!(dec, pt);
    assert_eq!(array.levels(), xor_encrypt(&pt, &key).unwrap());

    let th = SenseThresholds::sim(profile.v_dd);
    let (row_pt, trace) = decrypt_row_slc(&array, 0, key.row(0), &th).unwrap();
    assert_eq!(row_pt, pt.row(0));
    assert_eq!(trace.cycles.len(), 1, "two-level decrypt must take one cycle");
    println!("ACCEPTANCE 1 slc-all-four-combinations: PASS");
}

#[test]
fn criterion_2_mlc_all_sixteen_combinations() {
    // All 16 (symbol, key) pairs in one row; the decrypt must run exactly the
    // fixed three-cycle schedule (middle read first, then low, then high) and
    // recover every symbol.
    let profile = quiet_profile();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut pt_row = Vec::new();
    let mut key_row = Vec::new();
    for ct in 0..4u8 {
        for key in 0..4u8 {
            pt_row.push(ct ^ key);
            key_row.push(key);
        }
    }
    let pt = SymbolMatrix::from_rows(Mode::Mlc, vec![pt_row.clone()]).unwrap();
    let key = SymbolMatrix::from_rows(Mode::Mlc, vec![key_row.clone()]).unwrap();
    let (dec, array) = full_path(Mode::Mlc, &pt, &key, &profile, &mut rng);
    assert_eq!(dec, pt);

    let th = SenseThresholds::sim(profile.v_dd);
    let (row_pt, trace) = decrypt_row_mlc(&array, 0, &key_row, &th).unwrap();
    assert_eq!(row_pt, pt_row);
    assert_eq!(trace.cycles.len(), 3, "four-level decrypt must take three cycles");
    let reads: Vec<f64> = trace.cycles.iter().map(|c| c.v_read).collect();
    assert_eq!(reads, vec![1.8, 1.1, 2.5]);
    println!("ACCEPTANCE 2 mlc-all-sixteen-combinations: PASS");
}

#[test]
fn criterion_3_checkerboard_demo_accuracy() {
    // The 8x6 four-level demonstration: checkerboard ciphertext under a
    // random key decrypts with 100% accuracy, both noise-free and across 100
    // seeds of Vth spread.
    let ct = SymbolMatrix::checkerboard(Mode::Mlc, 8, 6).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let key = SymbolMatrix::random(Mode::Mlc, 8, 6, &mut rng).unwrap();
    let pt = xor_encrypt(&ct, &key).unwrap();
    let (dec, array) = full_path(Mode::Mlc, &pt, &key, &quiet_profile(), &mut rng);
    assert_eq!(dec, pt, "noise-free decrypt must be exact");
    assert_eq!(array.levels(), ct, "stored state must be the checkerboard");

    let mut noisy = FerroProfile::sim_default();
    noisy.sigma_vth = 0.04;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let key = SymbolMatrix::random(Mode::Mlc, 8, 6, &mut rng).unwrap();
        let pt = xor_encrypt(&ct, &key).unwrap();
        let (dec, _) = full_path(Mode::Mlc, &pt, &key, &noisy, &mut rng);
        assert_eq!(dec.count_diff(&pt).unwrap(), 0, "seed {seed} decoded with errors");
    }
    println!("ACCEPTANCE 3 checkerboard-demo-accuracy: PASS");
}

#[test]
fn criterion_4_throughput_latency_area_goldens() {
    let sa = SenseAmpConfig::default();
    let tw = SchemeTiming::this_work();
    let prior = SchemeTiming::prior_fefet();
    let aes = SchemeTiming::aes();

    assert!((throughput_mbps(&tw, CipherOp::Encrypt, &sa) - 1280.0).abs() < 1e-9);
    assert!((throughput_mbps(&tw, CipherOp::Decrypt, &sa) - 400.0).abs() < 1e-9);
    assert!((speedup_throughput(&tw, &aes, CipherOp::Encrypt, &sa) - 45.2).abs() < 0.05);
    assert!((speedup_throughput(&tw, &aes, CipherOp::Decrypt, &sa) - 14.12).abs() < 0.05);
    assert!((speedup_latency(&tw, &aes, CipherOp::Encrypt, &sa) - 46.2).abs() < 0.05);
    assert!((speedup_latency(&tw, &aes, CipherOp::Decrypt, &sa) - 15.13).abs() < 0.05);
    assert_eq!(speedup_latency(&tw, &prior, CipherOp::Encrypt, &sa), 2.0);
    assert_eq!(speedup_latency(&tw, &prior, CipherOp::Decrypt, &sa), 2.0);

    let area_tw = area_report(&tw, 128, 128);
    let area_prior = area_report(&prior, 128, 128);
    assert_eq!(area_tw.devices, Some(16_384));
    assert_eq!(area_prior.devices, Some(32_768));
    assert!((area_tw.cell_area_um2_per_bit.unwrap() - 0.1978).abs() < 1e-12);
    let ratio = area_tw.array_area_um2.unwrap() / area_prior.array_area_um2.unwrap();
    assert!((ratio - 0.5).abs() < 1e-12);
    println!("ACCEPTANCE 4 throughput-latency-area-goldens: PASS");
}

#[test]
fn criterion_5_workload_traffic_comparisons() {
    // Across all seven bundled accelerator workloads: exactly half the cipher
    // latency of the two-transistor scheme, and a 93% to 97% mean reduction
    // against the AES baseline with every workload inside the per-word
    // bracket.
    let sa = SenseAmpConfig::default();
    let tw = SchemeTiming::this_work();
    let prior = SchemeTiming::prior_fefet();
    let aes = SchemeTiming::aes();
    let lo = 1.0 - 8.0 / 121.0 - 1e-9;
    let hi = 1.0 - 2.5 / 115.5 + 1e-9;

    let mut reductions = Vec::new();
    for (name, csv) in bundled_topologies() {
        let layers = parse_topology_csv(csv, DEFAULT_BITWIDTH).unwrap();
        let ours = workload_latency(&layers, &tw, &sa).unwrap();
        let twot = workload_latency(&layers, &prior, &sa).unwrap();
        let base = workload_latency(&layers, &aes, &sa).unwrap();
        assert_eq!(ours.cycles / twot.cycles, 0.5, "{name} ratio");
        let reduction = 1.0 - ours.cycles / base.cycles;
        assert!(reduction > lo && reduction < hi, "{name} reduction {reduction}");
        reductions.push(reduction);
    }
    assert_eq!(reductions.len(), 7);
    let mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
    assert!((0.93..=0.97).contains(&mean), "mean reduction {mean}");
    println!("ACCEPTANCE 5 workload-traffic-comparisons: PASS (mean reduction {mean:.4})");
}

#[test]
fn criterion_6_monte_carlo_sense_margin() {
    // 1000-sample Vth spread at sigma 40 mV: the plaintext-one and
    // plaintext-zero source-line populations must not overlap and must keep
    // at least 200 mV of worst-case margin.
    let report = run_mc(McConfig::default(), &FerroProfile::sim_default()).unwrap();
    assert_eq!(report.config.n_samples, 1000);
    let margin = sense_margin(&report).unwrap();
    assert!(margin > 0.0, "populations overlap: margin {margin}");
    assert!(margin >= 0.2, "margin {margin} below 200 mV");
    assert_eq!(report.worst_case_margin, margin);
    for combo in &report.combos {
        assert_eq!(combo.v_sl.len(), 1000);
    }
    println!("ACCEPTANCE 6 monte-carlo-sense-margin: PASS (margin {margin:.3} V)");
}

#[test]
fn criterion_7_randomized_invariant_sweeps() {
    // Involution and wrong-key behavior over 1000 random matrices.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000u32 {
        let mode = if i % 2 == 0 { Mode::Slc } else { Mode::Mlc };
        let rows = rng.gen_range(1..7);
        let cols = rng.gen_range(1..9);
        let pt = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let key = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let ct = xor_encrypt(&pt, &key).unwrap();
        assert_eq!(xor_encrypt(&ct, &key).unwrap(), pt);

        let wrong = SymbolMatrix::random(mode, rows, cols, &mut rng).unwrap();
        let garbled = xor_encrypt(&ct, &wrong).unwrap();
        let expected = xor_encrypt(&pt, &xor_encrypt(&key, &wrong).unwrap()).unwrap();
        assert_eq!(garbled, expected);
        if wrong != key {
            assert_ne!(garbled, pt, "wrong key must not decrypt");
        }
    }

    // Programming one row never touches any other cell, bit for bit.
    let profile = FerroProfile::sim_default();
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    for _ in 0..1000 {
        let rows = rng.gen_range(2..6);
        let cols = rng.gen_range(1..8);
        let geometry = ArrayGeometry::new(rows, cols).unwrap();
        let mut array = FeArray::new(geometry, Mode::Slc, profile.clone(), &mut rng).unwrap();
        let row = rng.gen_range(0..rows);
        let ct: Vec<u8> = (0..cols).map(|_| rng.gen_range(0..2)).collect();
        let before: Vec<_> = (0..rows)
            .map(|r| (0..cols).map(|c| array.cell(r, c).clone()).collect::<Vec<_>>())
            .collect();
        array.program_row_slc(row, &ct, &mut rng).unwrap();
        for (r, before_row) in before.iter().enumerate() {
            if r == row {
                continue;
            }
            for (c, before_cell) in before_row.iter().enumerate() {
                assert_eq!(*array.cell(r, c), *before_cell, "cell ({r}, {c}) disturbed");
            }
        }
        // And the canonical schedules audit clean.
        assert!(array.disturb_audit(&array.reset_bias()).is_empty());
        let bias = array.program_row_bias(row, &ct).unwrap();
        assert!(array.disturb_audit(&bias).is_empty());
    }

    // Parallel and serial Monte Carlo agree bit for bit.
    for seed in 0..5u64 {
        let cfg = McConfig { n_samples: 250, seed, ..McConfig::default() };
        let serial = run_mc(cfg, &FerroProfile::sim_default()).unwrap();
        let parallel = run_mc_parallel(cfg, &FerroProfile::sim_default()).unwrap();
        assert_eq!(serial, parallel, "seed {seed} diverged");
    }
    println!("ACCEPTANCE 7 randomized-invariant-sweeps: PASS");
}

#[test]
fn criterion_8_recorded_map_replay() {
    // The bundled 8x6 measured-voltage map must reproduce its recorded
    // outcome exactly: 3 cell errors out of 48 (6.25%), nothing else.
    let fixture = bundled_mlc_8x6();
    let profile = fixture.profile();
    let out = replay_experiment(&fixture, &profile, &SenseThresholds::experimental()).unwrap();
    assert_eq!(out.cells, 48);
    assert_eq!(out.errors, 3);
    assert!((out.error_rate - 0.0625).abs() < 1e-12);
    assert_eq!(out.unclassified, 0);
    assert_eq!(out.error_cells, vec![(0, 3), (2, 4), (5, 1)]);
    println!("ACCEPTANCE 8 recorded-map-replay: PASS (3/48 cells in error)");
}
