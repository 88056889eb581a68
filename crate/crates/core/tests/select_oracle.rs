use amuse_core::channel::{mix_seed, random_message, rng};
use amuse_core::codec::{binomial, encode, EncodingParams};
use amuse_core::select::{select_params, ProtectionSpec, Ratio};
use proptest::prelude::*;
use rand::Rng;

/// Brute force: every admissible (N, K), length measured by actually
/// encoding a message and reading the first sub-message.
fn oracle(tau: Ratio, len: usize, samples: usize) -> (usize, Vec<(usize, usize)>) {
    let m = random_message(len, 1);
    let mut best = len;
    let mut arg = vec![(1, 0)];
    for n in 2..=100usize {
        for k in 1..n {
            if (k as f64) / (n as f64) > tau.to_f64() + 1e-12 {
                continue;
            }
            let c = binomial(n as u64, (n - k) as u64).unwrap();
            if c > samples as u128 {
                continue;
            }
            let params = EncodingParams::new(len, n, k, samples).unwrap();
            let l = encode(&m, &params).unwrap().submessage(1).unwrap().raw.len();
            if l < best {
                best = l;
                arg = vec![(n, k)];
            } else if l == best {
                arg.push((n, k));
            }
        }
    }
    (best, arg)
}

#[test]
fn matches_brute_force_oracle_on_random_specs() {
    let mut r = rng(mix_seed(2024, &[1]));
    for case in 0..1000 {
        let den = r.random_range(1..=20u64);
        let num = r.random_range(1..=den);
        let tau = Ratio::new(num, den).unwrap();
        let len = r.random_range(1..=400usize);
        let samples = r.random_range(1..=150usize);
        let spec = ProtectionSpec::new(tau, len, samples).unwrap();
        let sel = select_params(&spec);
        let (best, args) = oracle(tau, len, samples);
        assert_eq!(sel.length, best, "case {case}: {spec:?}");
        assert!(
            args.contains(&(sel.chunks, sel.excluded)),
            "case {case}: {:?} not among {args:?}",
            (sel.chunks, sel.excluded)
        );
    }
}

#[test]
fn ties_go_to_last_visited_pair() {
    // L=3: (1,0), (2,1), (3,2) and (4,3) all give 3-bit sub-messages
    let tau = Ratio::percent(80);
    let sel = select_params(&ProtectionSpec::new(tau, 3, 4).unwrap());
    let (best, args) = oracle(tau, 3, 4);
    assert_eq!(args, vec![(1, 0), (2, 1), (3, 2), (4, 3)]);
    assert_eq!((sel.length, best), (3, 3));
    assert_eq!((sel.chunks, sel.excluded), (4, 3));
}

proptest! {
    #[test]
    fn larger_threshold_never_lengthens(
        len in 1usize..=400,
        samples in 1usize..=200,
        a in 1u64..=100,
        b in 1u64..=100,
    ) {
        let (lo, hi) = (a.min(b), a.max(b));
        let s_lo = select_params(&ProtectionSpec::new(Ratio::percent(lo), len, samples).unwrap());
        let s_hi = select_params(&ProtectionSpec::new(Ratio::percent(hi), len, samples).unwrap());
        prop_assert!(s_hi.length <= s_lo.length);
    }

    #[test]
    fn selection_is_feasible(
        len in 1usize..=400,
        samples in 1usize..=200,
        pct in 1u64..=100,
    ) {
        let tau = Ratio::percent(pct);
        let s = select_params(&ProtectionSpec::new(tau, len, samples).unwrap());
        if !s.is_pass_through() {
            prop_assert!(s.tau <= tau);
            prop_assert!(binomial(s.chunks as u64, (s.chunks - s.excluded) as u64).unwrap() <= samples as u128);
        } else {
            prop_assert_eq!((s.excluded, s.length), (0, len));
        }
        prop_assert!(EncodingParams::new(len, s.chunks, s.excluded, samples).is_ok());
    }
}
