//! One test per acceptance criterion. Each prints a single
//! `criterion N <name>: PASS|FAIL (<detail>)` line before asserting, so
//! `cargo test --test acceptance -- --nocapture` doubles as a report.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use amuse::dataset::{write_corpus, ParamChoice};
use amuse::sweep::{run_sweep, summarize, ChannelConfig, CellSummary, SweepBackend, SweepKind};
use amuse::table::write_csv;
use amuse::{embed_dataset, BackendConfig, ExperimentConfig, Protection};
use amuse_core::channel::{calibrate_base_prob, mix_seed, random_message, rng};
use amuse_core::codec::{binomial, decode, encode, submessage_length, EncodingParams};
use amuse_core::metrics::bit_accuracy;
use amuse_core::select::{coverage_ratio, select_params, ProtectionSpec, Ratio};
use amuse_core::BitString;
use rand::Rng;

fn verdict(id: u32, name: &str, pass: bool, detail: impl AsRef<str>) {
    println!(
        "criterion {id} {name}: {} ({})",
        if pass { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(pass, "criterion {id} failed: {}", detail.as_ref());
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

fn protections() -> Vec<Protection> {
    ["baseline", "60%", "80%"].iter().map(|s| s.parse().unwrap()).collect()
}

fn cell(cells: &[CellSummary], len: usize, p: Protection, scale: Option<f64>, s: f64) -> &CellSummary {
    cells
        .iter()
        .find(|c| c.message_len == len && c.protection == p && c.scale == scale && c.subset_ratio == s)
        .expect("cell present")
}

#[test]
fn criterion_01_submessage_length_table() {
    let start = Instant::now();
    let table = [
        (30, 60, 16),
        (30, 80, 9),
        (100, 60, 44),
        (100, 80, 23),
        (200, 60, 84),
        (200, 80, 43),
        (300, 60, 124),
        (300, 80, 63),
    ];
    let mut wrong = Vec::new();
    for (len, pct, want) in table {
        let s = select_params(&ProtectionSpec::new(Ratio::percent(pct), len, 100).unwrap());
        if s.length != want {
            wrong.push(format!("L={len} tau={pct}% gave {} want {want}", s.length));
        }
    }
    let pair = |pct| {
        let s = select_params(&ProtectionSpec::new(Ratio::percent(pct), 30, 100).unwrap());
        (s.chunks, s.excluded)
    };
    if pair(60) != (5, 3) || pair(80) != (5, 4) {
        wrong.push(format!("L=30 pairs {:?} {:?}", pair(60), pair(80)));
    }
    let t = start.elapsed();
    verdict(
        1,
        "sub-message length table",
        wrong.is_empty() && within(t, 1),
        format!("8 cells, {} mismatches {wrong:?}, {t:.2?}", wrong.len()),
    );
}

#[test]
fn criterion_02_three_chunk_worked_example() {
    let start = Instant::now();
    let m = random_message(300, 2);
    let params = EncodingParams::new(300, 3, 1, 6).unwrap();
    let enc = encode(&m, &params).unwrap();
    let subs: Vec<_> = enc.iter().collect();
    let lengths_ok = subs.len() == 6 && subs.iter().all(|s| s.raw.len() == 202);
    let mut per_combo = [0usize; 3];
    for s in &subs {
        per_combo[s.ordering_index] += 1;
    }

    let mut bad = Vec::new();
    for mask in 1u32..64 {
        let picked: Vec<usize> = (0..6).filter(|i| mask & (1 << i) != 0).collect();
        let items: Vec<BitString> = picked.iter().map(|&i| subs[i].raw.clone()).collect();
        let r = decode(&items, &params).unwrap();
        let covered: BTreeSet<usize> = picked
            .iter()
            .flat_map(|&i| enc.table().get(subs[i].ordering_index).unwrap().to_vec())
            .collect();
        let misses_chunk = covered.len() < 3;
        let ok_result = r.complete && r.message == m;
        if picked.len() >= 3 && !ok_result {
            bad.push(format!("{mask:06b} size {} failed", picked.len()));
        }
        if ok_result == misses_chunk {
            bad.push(format!("{mask:06b} outcome {ok_result} but misses_chunk {misses_chunk}"));
        }
    }
    let t = start.elapsed();
    verdict(
        2,
        "three-chunk worked example",
        lengths_ok && per_combo == [2, 2, 2] && bad.is_empty() && within(t, 1),
        format!("6 x 202 bits: {lengths_ok}, per combination {per_combo:?}, 63 subsets, {} violations, {t:.2?}", bad.len()),
    );
}

#[test]
fn criterion_03_round_trip_suite() {
    let start = Instant::now();
    let mut r = rng(mix_seed(3, &[3]));
    let cases = 10_000;
    let mut failures = 0;
    for case in 0..cases {
        let n = r.random_range(1..=12usize);
        let k = r.random_range(0..n);
        let c = binomial(n as u64, (n - k) as u64).unwrap() as usize;
        let samples = r.random_range(c..=4 * c);
        let len = r.random_range(1..=512usize);
        let m = random_message(len, case);
        let params = EncodingParams::new(len, n, k, samples).unwrap();
        let items: Vec<BitString> = encode(&m, &params).unwrap().iter().map(|s| s.raw).collect();
        let d = decode(&items, &params).unwrap();
        if !(d.complete && d.message == m) {
            failures += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        3,
        "round-trip suite",
        failures == 0 && within(t, 30),
        format!("{cases} cases, N <= 12, n in [C, 4C], {failures} failures, {t:.2?}"),
    );
}

#[test]
fn criterion_04_coverage_ratio_law() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 1..=6usize {
        for k in 0..n {
            let c = binomial(n as u64, (n - k) as u64).unwrap() as usize;
            let samples = 4 * c;
            let params = EncodingParams::new(12, n, k, samples).unwrap();
            let enc = encode(&BitString::zeros(12), &params).unwrap();
            for chunk in 0..n {
                let excluded = (1..=samples)
                    .filter(|&j| {
                        let idx = params.combination_for_sample(j).unwrap();
                        !enc.table().get(idx).unwrap().contains(&chunk)
                    })
                    .count();
                if excluded * n != samples * k {
                    bad.push(format!("N={n} K={k} chunk {chunk}: {excluded} excluded"));
                }
            }
            let closed = Ratio::new(
                binomial(n as u64 - 1, (n - k) as u64).unwrap() as u64,
                c as u64,
            )
            .unwrap();
            if coverage_ratio(n, k) != closed {
                bad.push(format!("N={n} K={k}: ratio {} vs {closed}", coverage_ratio(n, k)));
            }
            checked += 1;
        }
    }
    verdict(
        4,
        "coverage-ratio law",
        bad.is_empty(),
        format!("{checked} (N, K) pairs, {} violations {bad:?}", bad.len()),
    );
}

/// Every position of every copy of chunk bit `(chunk, bit)`.
fn copy_positions(params: &EncodingParams, m: &BitString) -> (Vec<BitString>, Vec<Vec<Vec<(usize, usize)>>>) {
    let enc = encode(m, params).unwrap();
    let b = params.ordering_bits;
    let w = params.chunk_len();
    let mut copies = vec![vec![Vec::new(); w]; params.chunks];
    let mut items = Vec::new();
    for (s, sub) in enc.iter().enumerate() {
        for (pos, &chunk) in enc.table().get(sub.ordering_index).unwrap().iter().enumerate() {
            for (bit, slot) in copies[chunk].iter_mut().enumerate() {
                slot.push((s, b + pos * w + bit));
            }
        }
        items.push(sub.raw);
    }
    (items, copies)
}

#[test]
fn criterion_05_majority_vote_correction() {
    let mut notes = Vec::new();
    let mut ok = true;
    for t in [3usize, 5, 7] {
        // one chunk per sample (N=3, K=2) and plain repetition (N=1)
        for (n, k, samples) in [(3usize, 2usize, 3 * t), (1, 0, t)] {
            let params = EncodingParams::new(60, n, k, samples).unwrap();
            let m = random_message(60, t as u64);
            let (items, copies) = copy_positions(&params, &m);
            assert!(copies.iter().flatten().all(|slot| slot.len() == t));

            // worst case below half: (t-1)/2 copies of every bit, rotating
            let mut noisy = items.clone();
            for (ci, chunk) in copies.iter().enumerate() {
                for (bi, slot) in chunk.iter().enumerate() {
                    for f in 0..(t - 1) / 2 {
                        let (s, at) = slot[(ci + bi + f) % t];
                        noisy[s].flip(at);
                    }
                }
            }
            let exact = decode(&noisy, &params).unwrap().message == m;

            // at half or more on a single bit the vote must lose that bit
            let mut broken = items.clone();
            for &(s, at) in copies[0][0].iter().take(t.div_ceil(2)) {
                broken[s].flip(at);
            }
            let ba = bit_accuracy(&decode(&broken, &params).unwrap().message, &m).unwrap();
            ok &= exact && ba < 1.0;
            notes.push(format!("t={t} N={n}: exact={exact} BA_broken={ba:.4}"));
        }
    }
    verdict(5, "majority-vote correction", ok, notes.join(", "));
}

fn dctdwt_length_config(scales: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        message_lengths: vec![100, 200, 300],
        protections: protections(),
        samples: 100,
        backend: SweepBackend::DctDwt {
            scales,
            image_size: 256,
        },
        channel: None,
        subset_ratios: vec![],
        trials: 10,
        seed: 36,
        output: None,
    }
}

#[test]
fn criterion_06_dctdwt_no_attack_accuracy() {
    let start = Instant::now();
    let rows = run_sweep(&dctdwt_length_config(vec![36.0]), SweepKind::Length).unwrap();
    let imperfect: Vec<String> = rows
        .iter()
        .filter(|r| r.ba != 1.0)
        .map(|r| format!("L={} {} trial {} BA {}", r.message_len, r.protection, r.trial, r.ba))
        .collect();
    let psnr = summarize(&rows).iter().filter_map(|c| c.mean_psnr).sum::<f64>() / 9.0;
    let t = start.elapsed();
    verdict(
        6,
        "DCT-DWT no-attack accuracy at scale 36",
        imperfect.is_empty() && rows.len() == 90 && within(t, 60),
        format!(
            "100 images 256x256, 3 lengths x 3 configs x 10 messages, {} rows below 1.0 {imperfect:?}, mean PSNR {psnr:.1} dB, {t:.2?}",
            imperfect.len()
        ),
    );
}

#[test]
fn criterion_07_dctdwt_length_trend() {
    let scales = vec![36.0, 30.0, 20.0];
    let cells = summarize(&run_sweep(&dctdwt_length_config(scales.clone()), SweepKind::Length).unwrap());
    let [base, p60, p80] = protections()[..] else { unreachable!() };
    let at = |len, p, s| cell(&cells, len, p, Some(s), 1.0).mean_ba;

    let trend: Vec<f64> = [100, 200, 300].iter().map(|&l| at(l, base, 20.0)).collect();
    let decreasing = trend[0] > trend[1] && trend[1] > trend[2];
    let mut below = Vec::new();
    for &s in &scales {
        for l in [100, 200, 300] {
            for p in [p60, p80] {
                if at(l, p, s) < at(l, base, s) {
                    below.push(format!("L={l} {p} scale {s}"));
                }
            }
        }
    }
    verdict(
        7,
        "DCT-DWT length/accuracy trend",
        decreasing && below.is_empty(),
        format!(
            "scale 20 baseline mean BA by L {trend:?} strictly decreasing: {decreasing}; AMUSE >= baseline in all 9 cells: {} {below:?}",
            below.is_empty()
        ),
    );
}

#[test]
fn criterion_08_subset_attack_sweep() {
    let start = Instant::now();
    let ratios = vec![0.2, 0.4, 0.6, 0.8, 1.0];
    let cfg = ExperimentConfig {
        message_lengths: vec![30, 100, 300],
        protections: protections(),
        samples: 100,
        backend: SweepBackend::Synthetic {},
        channel: None,
        subset_ratios: ratios.clone(),
        trials: 100,
        seed: 6,
        output: None,
    };
    let cells = summarize(&run_sweep(&cfg, SweepKind::Subset).unwrap());
    let mut bad = Vec::new();
    let mut dips = Vec::new();
    for l in [30, 100, 300] {
        for p in protections() {
            let bas: Vec<f64> = ratios.iter().map(|&s| cell(&cells, l, p, None, s).mean_ba).collect();
            if bas.windows(2).any(|w| w[1] < w[0]) {
                bad.push(format!("L={l} {p} not monotone {bas:?}"));
            }
            for (&s, &ba) in ratios.iter().zip(&bas) {
                let allowed_dip = p.to_string() == "80%" && s == 0.2;
                if ba < 1.0 {
                    if allowed_dip {
                        dips.push(format!("L={l} {p} s=20%: {ba:.4}"));
                    } else {
                        bad.push(format!("L={l} {p} s={s}: {ba:.4}"));
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        8,
        "subset-attack sweep",
        bad.is_empty() && within(t, 120),
        format!(
            "n=100, 100 trials, 3 lengths x 3 configs x 5 ratios; violations {bad:?}; dips {dips:?}; {t:.2?}"
        ),
    );
}

#[test]
fn criterion_09_length_scaled_channel() {
    let p0 = calibrate_base_prob(100, 0.9).unwrap();
    let cfg = ExperimentConfig {
        message_lengths: vec![100, 200, 300],
        protections: protections(),
        samples: 100,
        backend: SweepBackend::Synthetic {},
        channel: Some(ChannelConfig {
            base_probs: vec![p0],
            reference_length: 300,
        }),
        subset_ratios: vec![],
        trials: 10,
        seed: 9,
        output: None,
    };
    let cells = summarize(&run_sweep(&cfg, SweepKind::Length).unwrap());
    let [base, p60, p80] = protections()[..] else { unreachable!() };
    let mut lines = Vec::new();
    let mut ok = true;
    for l in [100, 200, 300] {
        let b = cell(&cells, l, base, None, 1.0);
        for p in [p60, p80] {
            let a = cell(&cells, l, p, None, 1.0);
            let better = a.mean_ba > b.mean_ba && a.mean_wa > b.mean_wa;
            ok &= better;
            lines.push(format!(
                "L={l} {p}: BA {:.4} vs {:.4}, WA {:.1} vs {:.1}{}",
                a.mean_ba,
                b.mean_ba,
                a.mean_wa,
                b.mean_wa,
                if better { "" } else { " NOT STRICTLY HIGHER" }
            ));
        }
    }
    let calib = cell(&cells, 300, base, None, 1.0).mean_ba;
    verdict(
        9,
        "length-scaled synthetic channel",
        ok,
        format!("p0={p0:.4}, baseline BA at L=300 {calib:.4}; {}", lines.join("; ")),
    );
}

fn csv_bytes(cfg: &ExperimentConfig, kind: SweepKind) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, &run_sweep(cfg, kind).unwrap()).unwrap();
    buf
}

#[test]
fn criterion_10_determinism() {
    let subset = ExperimentConfig {
        message_lengths: vec![30, 300],
        protections: protections(),
        samples: 100,
        backend: SweepBackend::Synthetic {},
        channel: Some(ChannelConfig {
            base_probs: vec![0.0, 0.3],
            reference_length: 300,
        }),
        subset_ratios: vec![0.2, 0.6, 1.0],
        trials: 20,
        seed: 10,
        output: None,
    };
    let length = ExperimentConfig {
        message_lengths: vec![100, 300],
        protections: protections(),
        samples: 12,
        backend: SweepBackend::DctDwt {
            scales: vec![36.0, 5.0],
            image_size: 160,
        },
        channel: Some(ChannelConfig {
            base_probs: vec![0.2],
            reference_length: 300,
        }),
        subset_ratios: vec![],
        trials: 3,
        seed: 10,
        output: None,
    };
    let csv_same = csv_bytes(&subset, SweepKind::Subset) == csv_bytes(&subset, SweepKind::Subset)
        && csv_bytes(&length, SweepKind::Length) == csv_bytes(&length, SweepKind::Length);

    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("src");
    write_corpus(&src, 8, 128, 10).unwrap();
    let m = random_message(200, 10);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let res = embed_dataset(&src, &out, &m, ParamChoice::Tau(Ratio::percent(60)), &BackendConfig::dctdwt(36.0).unwrap())
            .unwrap();
        let pixels: Vec<Vec<u8>> = res
            .manifest
            .samples
            .iter()
            .map(|s| std::fs::read(out.join(&s.file)).unwrap())
            .collect();
        (res.manifest.to_json(), pixels)
    };
    let (a, b) = (run("a"), run("b"));
    let manifests_same = a.0 == b.0;
    let images_same = a.1 == b.1;
    verdict(
        10,
        "determinism",
        csv_same && manifests_same && images_same,
        format!("sweep CSVs identical: {csv_same}, manifests identical: {manifests_same}, PNGs identical: {images_same}"),
    );
}

#[test]
fn length_law_used_by_the_table() {
    // the table cells follow directly from the sub-message length formula
    assert_eq!(submessage_length(30, 5, 3).unwrap(), 16);
    assert_eq!(submessage_length(300, 3, 1).unwrap(), 202);
}
