use qsteg_core::adversary::{ChannelModel, Eavesdropper, EveMeasurement, EveStrategy};
use qsteg_core::dv::{
    bb84_reverse_extract, bb84_reverse_run, bb84_run, bb84_run_with_eve, displacement_next, mqs_embed_direct,
    mqs_extract_direct, mqs_run, qber_check, DvConfig, Preparation, ReverseVariant, StegoPlanDirect,
};
use qsteg_core::qstate::EmbeddingParams;
use qsteg_core::seed::{derive_stream, stream_from_seed};
use qsteg_core::stats::{binomial_band_99, chi_squared_gof};
use proptest::prelude::*;

fn config(m: usize, delta: usize) -> DvConfig {
    let mut c = DvConfig::new(m).unwrap();
    c.delta = delta;
    c
}

#[test]
fn mean_sift_size_is_half_the_signals() {
    let c = config(256, 26);
    let mut rng = stream_from_seed(100);
    let runs = 10_000;
    let total: usize = (0..runs)
        .map(|_| bb84_run(&c, &Preparation::Uniform, &mut rng).unwrap().sift_len())
        .sum();
    let mean = total as f64 / runs as f64;
    let expected = 2.0 * (256.0 + 26.0);
    assert!((mean - expected).abs() < 0.01 * expected, "{mean}");
}

#[test]
fn depolarizing_quarter_gives_quarter_qber() {
    let c = config(256, 26).with_channel(ChannelModel::depolarizing(0.25).unwrap());
    let mut rng = stream_from_seed(102);
    let mut errors = 0usize;
    let mut bits = 0usize;
    for _ in 0..20 {
        let t = bb84_run(&c, &Preparation::Uniform, &mut rng).unwrap();
        errors += (t.sifted_error_rate().unwrap() * t.sift_len() as f64).round() as usize;
        bits += t.sift_len();
    }
    let rate = errors as f64 / bits as f64;
    assert!((rate - 0.25).abs() < 0.02, "{rate}");
}

#[test]
fn check_bits_look_uniform() {
    let c = config(16, 12);
    let mut rng = stream_from_seed(103);
    let mut counts = [0u64; 2];
    for i in 0..10_000u64 {
        let message = (i * 2654435761) % 7 < 3;
        let out = mqs_run(&c, message, displacement_next(Some(i as usize), 16), &mut rng).unwrap();
        for &p in &out.transcript.announcements {
            counts[usize::from(out.transcript.prepared[p].bit())] += 1;
        }
    }
    let (_, p) = chi_squared_gof(&counts, &[0.5, 0.5]).unwrap();
    assert!(p > 0.01, "p = {p}, counts {counts:?}");
}

#[test]
fn wrong_displacement_is_a_coin_flip() {
    let c = config(16, 12);
    let mut rng = stream_from_seed(104);
    let runs = 4000;
    let mut agree = 0;
    for i in 0..runs {
        let message = i % 2 == 0;
        let t = bb84_run(&c, &Preparation::Uniform, &mut rng).unwrap();
        let plan = StegoPlanDirect::new(message, 3, 16).unwrap();
        let ann = mqs_embed_direct(&t, &plan, &mut rng).unwrap();
        if mqs_extract_direct(&t, &ann, 4).map(|b| b == message).unwrap_or(false) {
            agree += 1;
        }
    }
    let band = binomial_band_99(0.5, runs as u64);
    assert!(band.contains(agree as f64 / runs as f64), "{agree}");
}

#[test]
fn noisy_channel_stego_error_tracks_qber() {
    let q = 0.05;
    let c = config(16, 12).with_channel(ChannelModel::depolarizing(q).unwrap());
    let mut rng = stream_from_seed(105);
    let runs = 10_000;
    let wrong = (0..runs)
        .filter(|i| {
            let out = mqs_run(&c, i % 2 == 1, 1, &mut rng).unwrap();
            out.recovered_bit != Some(out.message_bit)
        })
        .count();
    let rate = wrong as f64 / runs as f64;
    assert!((rate - q).abs() < 0.02, "{rate}");
}

#[test]
fn heavy_noise_aborts() {
    let c = config(256, 36).with_channel(ChannelModel::depolarizing(0.25).unwrap());
    let mut rng = stream_from_seed(106);
    for _ in 0..200 {
        let t = bb84_run(&c, &Preparation::Uniform, &mut rng).unwrap();
        let plan = StegoPlanDirect::new(true, 1, 256).unwrap();
        let ann = mqs_embed_direct(&t, &plan, &mut rng).unwrap();
        let (qber, abort) = qber_check(&t, &ann, c.abort_qber).unwrap();
        assert!(abort, "qber {qber}");
    }
}

#[test]
fn embedded_preparation_matches_priors() {
    let params = EmbeddingParams::new(0.5, 1.0).unwrap();
    let priors = params.bb84_priors();
    let prep = Preparation::Embedded(params);
    let mut rng = stream_from_seed(107);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        counts[prep.draw(&mut rng).index()] += 1;
    }
    for i in 0..4 {
        assert!((counts[i] as f64 / n as f64 - priors[i]).abs() < 0.01);
    }
}

#[test]
fn reverse_runs_prepare_uniform_states() {
    let c = config(4, 6);
    let mut counts = [0u64; 4];
    for i in 0..100_000u64 {
        let mut rng = derive_stream(108, "reverse-histogram", i);
        let run = bb84_reverse_run(&c, Some(i % 3 == 0), 1 + (i as usize % 9), ReverseVariant::B, &mut rng).unwrap();
        counts[run.transcript.prepared[0].index()] += 1;
    }
    let (_, p) = chi_squared_gof(&counts, &[0.25; 4]).unwrap();
    assert!(p > 0.01, "p = {p}, counts {counts:?}");
}

#[test]
fn reverse_roundtrips_both_variants() {
    let c = DvConfig::new(64).unwrap();
    for variant in [ReverseVariant::B, ReverseVariant::A] {
        let mut rng = stream_from_seed(109);
        for i in 0..1000usize {
            let message = i % 2 == 0;
            let d = 1 + i % 40;
            let run = bb84_reverse_run(&c, Some(message), d, variant, &mut rng).unwrap();
            let bits: Vec<bool> = run.transcript.prepared.iter().map(|s| s.bit()).collect();
            assert_eq!(bb84_reverse_extract(&bits, &run.transcript.announcements, d, variant).unwrap(), message);
        }
    }
}

#[test]
fn full_interception_induces_quarter_qber() {
    let c = DvConfig::new(256).unwrap();
    for (f, target) in [(1.0, 0.25), (0.5, 0.125), (0.0, 0.0)] {
        let eve = Eavesdropper::new(EveStrategy {
            intercept_fraction: f,
            measurement: EveMeasurement::RandomBb84Basis,
        })
        .unwrap();
        let mut rng = stream_from_seed(110);
        let (mut errors, mut bits) = (0.0, 0usize);
        while bits < 10_000 {
            let (t, _) = bb84_run_with_eve(&c, &Preparation::Uniform, &eve, &mut rng).unwrap();
            errors += t.sifted_error_rate().unwrap() * t.sift_len() as f64;
            bits += t.sift_len();
        }
        let qber = errors / bits as f64;
        if f == 0.0 {
            assert_eq!(qber, 0.0);
        } else {
            assert!((qber - target).abs() < 0.02, "f={f}: {qber}");
        }
    }
}

proptest! {
    #[test]
    fn displacement_stays_in_range(p in 0usize..1_000_000, m in 1usize..10_000) {
        let d = displacement_next(Some(p), m);
        prop_assert!((1..=m).contains(&d));
    }

    #[test]
    fn sifting_is_consistent(seed in any::<u64>(), m in 2usize..40) {
        let t = bb84_run(&DvConfig::new(m).unwrap(), &Preparation::Uniform, &mut stream_from_seed(seed)).unwrap();
        prop_assert_eq!(t.sifted_key_sender.len(), t.sifted_key_receiver.len());
        prop_assert_eq!(&t.sifted_key_sender, &t.sifted_key_receiver);
        for &i in &t.sift_positions {
            prop_assert_eq!(t.prepared[i].basis(), t.measured[i].0);
        }
    }

    #[test]
    fn stego_position_never_announced(seed in any::<u64>(), d in 1usize..8, message in any::<bool>()) {
        let c = DvConfig::new(16).unwrap();
        let mut rng = stream_from_seed(seed);
        let t = bb84_run(&c, &Preparation::Uniform, &mut rng).unwrap();
        prop_assume!(!t.aborted);
        let plan = StegoPlanDirect::new(message, d, 16).unwrap();
        let ann = mqs_embed_direct(&t, &plan, &mut rng).unwrap();
        let stego = t.slot_of(*ann.last().unwrap()).unwrap() + d;
        prop_assert!(!ann.contains(&t.sift_positions[stego]));
        prop_assert_eq!(t.sifted_key_sender[stego], message);
    }

    #[test]
    fn reverse_preparation_is_message_blind(seed in any::<u64>(), d in 1usize..50, message in any::<bool>()) {
        let c = DvConfig::new(16).unwrap();
        for variant in [ReverseVariant::A, ReverseVariant::B] {
            let off = bb84_reverse_run(&c, None, d, variant, &mut stream_from_seed(seed)).unwrap();
            let on = bb84_reverse_run(&c, Some(message), d, variant, &mut stream_from_seed(seed));
            if let Ok(on) = on {
                prop_assert_eq!(&on.transcript.prepared, &off.transcript.prepared);
            }
        }
    }
}
