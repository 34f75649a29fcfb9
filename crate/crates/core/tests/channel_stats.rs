use std::f64::consts::PI;

use mesokey_core::channel::{
    eve_keyed_replay, keyless_xor_mismatch, mean_phase, monte_carlo_ber, observe, transmit, ChannelModel,
    Strategy,
};
use mesokey_core::helstrom::min_error_probability;
use mesokey_core::protocol::{demodulate, modulate};
use mesokey_core::rng::derived_rng;
use mesokey_core::SystemParams;
use rand::Rng;

fn params(n: f64, m: u32) -> SystemParams {
    SystemParams::new(n, m).unwrap()
}

fn unwrap_offset(measured: f64, truth: f64) -> f64 {
    let d = measured - truth;
    (d + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn single_pulse_spread_is_shot_noise() {
    let p = params(100.0, 1);
    let mut rng = derived_rng(3, 0);
    let samples = 100_000;
    let offsets: Vec<f64> = (0..samples)
        .map(|i| unwrap_offset(transmit(1.0, i, &p, ChannelModel::ShotNoise, &mut rng)[0].measured_phase, 1.0))
        .collect();
    let var = offsets.iter().map(|x| x * x).sum::<f64>() / samples as f64;
    let std = var.sqrt();
    // std of a sample std is about σ/√(2N)
    let tol = 3.0 * 0.1 / (2.0 * samples as f64).sqrt();
    assert!((std - 0.1).abs() < tol, "{std}");
}

#[test]
fn repeated_pulses_average_down() {
    let p = params(100.0, 1).with_repetition(4).unwrap();
    let mut rng = derived_rng(4, 0);
    let samples = 100_000;
    let offsets: Vec<f64> = (0..samples)
        .map(|i| unwrap_offset(mean_phase(&transmit(2.0, i, &p, ChannelModel::ShotNoise, &mut rng)), 2.0))
        .collect();
    let std = (offsets.iter().map(|x| x * x).sum::<f64>() / samples as f64).sqrt();
    let tol = 3.0 * 0.05 / (2.0 * samples as f64).sqrt() + 1e-4;
    assert!((std - 0.05).abs() < tol, "{std}");
}

#[test]
fn records_stay_on_the_circle() {
    let p = params(0.5, 8).with_repetition(3).unwrap();
    let mut rng = derived_rng(5, 0);
    for i in 0..2000 {
        for rec in transmit(6.2, i, &p, ChannelModel::ShotNoise, &mut rng) {
            assert!((0.0..2.0 * PI).contains(&rec.measured_phase));
        }
    }
}

#[test]
fn unciphered_bits_are_nearly_error_free() {
    let est = monte_carlo_ber(Strategy::Nearest, &params(100.0, 1), ChannelModel::ShotNoise, 100_000, 1).unwrap();
    assert_eq!(est.ber, 0.0);
}

#[test]
fn keyed_strategy_is_error_free_at_n_100() {
    let est = monte_carlo_ber(Strategy::Keyed, &params(100.0, 32), ChannelModel::ShotNoise, 100_000, 2).unwrap();
    assert_eq!(est.ber, 0.0);
}

#[test]
fn estimates_are_seed_deterministic() {
    let p = params(10.0, 16);
    let a = monte_carlo_ber(Strategy::Map, &p, ChannelModel::ShotNoise, 20_000, 9).unwrap();
    let b = monte_carlo_ber(Strategy::Map, &p, ChannelModel::ShotNoise, 20_000, 9).unwrap();
    assert_eq!(a, b);
    assert!(monte_carlo_ber(Strategy::Map, &p, ChannelModel::ShotNoise, 999, 9).is_err());
    assert!("bogus".parse::<Strategy>().is_err());
}

#[test]
fn map_is_no_worse_than_nearest() {
    let p = params(100.0, 32);
    let near = monte_carlo_ber(Strategy::Nearest, &p, ChannelModel::ShotNoise, 200_000, 6).unwrap();
    let map = monte_carlo_ber(Strategy::Map, &p, ChannelModel::ShotNoise, 200_000, 6).unwrap();
    let combined = (near.std_error.powi(2) + map.std_error.powi(2)).sqrt();
    assert!(map.ber <= near.ber + 3.0 * combined, "{} vs {}", map.ber, near.ber);
}

#[test]
fn eavesdropping_respects_the_floor() {
    for (m, n) in [(4, 1.0), (8, 1.0), (16, 10.0), (32, 100.0)] {
        let p = params(n, m);
        let floor = min_error_probability(&p).unwrap().pe;
        for strategy in [Strategy::Nearest, Strategy::Map] {
            let est = monte_carlo_ber(strategy, &p, ChannelModel::ShotNoise, 100_000, 11).unwrap();
            assert!(est.ber >= floor - 3.0 * est.std_error, "{strategy:?} M={m} n={n}: {} < {floor}", est.ber);
        }
    }
}

#[test]
fn wrong_key_replay_is_a_coin_flip() {
    let p = params(100.0, 32);
    let mut rng = derived_rng(12, 0);
    let trials = 100_000;
    let mut records = Vec::with_capacity(trials);
    let mut wrong = Vec::with_capacity(trials);
    let mut sent = Vec::with_capacity(trials);
    for i in 0..trials {
        let bit = rng.random_range(0..2u8);
        let k = rng.random_range(0..32u32);
        let obs = observe(modulate(bit, k, 32).unwrap(), i as u64, &p, ChannelModel::ShotNoise, &mut rng);
        records.extend(obs.eavesdropper);
        wrong.push(rng.random_range(0..32u32));
        sent.push(bit);
    }
    let guess = eve_keyed_replay(&records, 1, &wrong, 32).unwrap();
    let errors = guess.iter().zip(&sent).filter(|(g, s)| g != *s).count() as f64 / trials as f64;
    assert!((errors - 0.5).abs() < 0.01, "{errors}");
    assert!(eve_keyed_replay(&[], 1, &[], 32).unwrap().is_empty());
    assert!(eve_keyed_replay(&records[..3], 1, &wrong[..2], 32).is_err());
}

#[test]
fn keyed_replay_equals_receiver_on_shared_noise() {
    // low photon number so both actually make errors
    let p = params(2.0, 8).with_repetition(2).unwrap();
    let mut rng = derived_rng(13, 0);
    let (mut eve_records, mut bases, mut bob) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..20_000 {
        let k = rng.random_range(0..8u32);
        let obs = observe(modulate(i as u8 & 1, k, 8).unwrap(), i, &p, ChannelModel::ShotNoise, &mut rng);
        bob.push(demodulate(mean_phase(&obs.receiver), k, 8).unwrap());
        eve_records.extend(obs.eavesdropper);
        bases.push(k);
    }
    let eve = eve_keyed_replay(&eve_records, 2, &bases, 8).unwrap();
    assert_eq!(eve.as_slice(), bob.as_slice());
    assert!(bob.iter().enumerate().any(|(i, &b)| b != (i as u8 & 1)));
}

#[test]
fn repeated_reads_mismatch_as_independent_coins() {
    let run = keyless_xor_mismatch(&params(100.0, 32), ChannelModel::ShotNoise, 100_000, 21).unwrap();
    let predicted = run.predicted_rate();
    let sigma = (predicted * (1.0 - predicted) / run.trials as f64).sqrt();
    assert!((run.rate - predicted).abs() <= 3.0 * sigma, "{} vs {predicted}", run.rate);
    let quiet = keyless_xor_mismatch(&params(100.0, 32), ChannelModel::Noiseless, 1000, 21).unwrap();
    assert_eq!(quiet.rate, 0.0);
}

#[test]
fn huge_wheel_reads_are_random() {
    let run = keyless_xor_mismatch(&params(1.0, 4096), ChannelModel::ShotNoise, 50_000, 22).unwrap();
    assert!((run.rate - 0.5).abs() < 0.015, "{}", run.rate);
}
