mod common;

use common::{brute_force_expected_y, exhaustive_min, instance, naive_failing, track};
use gaptrack::adversary::{concentration_trial, expected_y_exact, sample_car, AdversarySetup};
use gaptrack::builders::{build, build_conditional, build_random_alterations, MinHashState};
use gaptrack::oracle::SearchStatus;
use gaptrack::{coverage, min_track_exact, min_track_greedy, Algorithm, TrackLayout};
use proptest::prelude::*;

/// `(wheels, f, l)` with `l <= max_l`.
fn small_instance(max_l: u64) -> impl Strategy<Value = (Vec<u64>, u64, u64)> {
    (1..=max_l)
        .prop_flat_map(|l| (Just(l), 1..=l))
        .prop_flat_map(|(l, f)| {
            let wheels = proptest::sample::subsequence((1..=f).collect::<Vec<_>>(), 1..=f as usize);
            (wheels, Just(f), Just(l))
        })
}

fn pillars_on(l: u64) -> impl Strategy<Value = Vec<u64>> {
    proptest::sample::subsequence((1..=l).collect::<Vec<_>>(), 0..=l as usize)
}

fn with_track(max_l: u64) -> impl Strategy<Value = ((Vec<u64>, u64, u64), Vec<u64>)> {
    small_instance(max_l).prop_flat_map(|inst| {
        let l = inst.2;
        (Just(inst), pillars_on(l))
    })
}

proptest! {
    #[test]
    fn coverage_agrees_with_definition(((wheels, f, l), pillars) in with_track(40)) {
        let inst = instance(&wheels, f, l);
        let report = coverage(&inst, &track(l, pillars.clone())).unwrap();
        let expected = naive_failing(&wheels, f, l, &pillars);
        prop_assert_eq!(report.supported, expected.is_empty());
        prop_assert_eq!(report.failure_count, expected.len());
        prop_assert_eq!(report.failing_offsets, expected);
    }

    #[test]
    fn cover_sets_are_dual_to_wheel_positions((wheels, f, l) in small_instance(40)) {
        let inst = instance(&wheels, f, l);
        for p in 1..=l {
            let from_offsets: Vec<u64> = inst
                .offsets()
                .filter(|&k| inst.wheel_positions(k).any(|j| j == p))
                .collect();
            prop_assert_eq!(inst.pillar_cover_set(p).unwrap(), from_offsets);
        }
    }

    #[test]
    fn adding_pillars_never_uncovers(((wheels, f, l), pillars) in with_track(30), extra in 1u64..=30) {
        let inst = instance(&wheels, f, l);
        let before = coverage(&inst, &track(l, pillars.clone())).unwrap();
        let p = (extra - 1) % l + 1;
        let mut more = pillars;
        if !more.contains(&p) {
            more.push(p);
            more.sort_unstable();
        }
        let after = coverage(&inst, &track(l, more)).unwrap();
        prop_assert!(after.failing_offsets.iter().all(|k| before.failing_offsets.contains(k)));
    }

    #[test]
    fn builders_support_and_repeat((wheels, f, l) in small_instance(60), seed in any::<u64>()) {
        let inst = instance(&wheels, f, l);
        for algo in [Algorithm::RandomAlterations, Algorithm::Conditional, Algorithm::LllFixit, Algorithm::Minhash] {
            let a = build(&inst, algo, seed).unwrap();
            let b = build(&inst, algo, seed).unwrap();
            prop_assert!(naive_failing(&wheels, f, l, a.track.pillars()).is_empty(), "{} unsupported", algo);
            prop_assert_eq!(a.pillar_count, a.track.len());
            prop_assert_eq!(a.track, b.track);
        }
    }

    #[test]
    fn oracles_bracket_the_optimum((wheels, f, l) in small_instance(14)) {
        let inst = instance(&wheels, f, l);
        let best = exhaustive_min(&wheels, f, l);
        let exact = min_track_exact(&inst, None);
        prop_assert_eq!(exact.status, SearchStatus::Optimal);
        prop_assert_eq!(exact.size(), Some(best));
        prop_assert!(naive_failing(&wheels, f, l, exact.track.as_ref().unwrap().pillars()).is_empty());
        prop_assert!(best >= inst.counting_lower_bound());

        let greedy = min_track_greedy(&inst).size().unwrap();
        let offsets = (l - f + 1) as f64;
        prop_assert!(greedy >= best);
        prop_assert!(greedy as f64 <= (1.0 + offsets.ln()) * best as f64 + 1e-9);
    }

    #[test]
    fn size_cap_below_optimum_finds_nothing((wheels, f, l) in small_instance(12)) {
        let inst = instance(&wheels, f, l);
        let best = exhaustive_min(&wheels, f, l);
        let capped = min_track_exact(&inst, Some(best - 1));
        prop_assert!(capped.track.is_none());
        prop_assert_eq!(capped.status, SearchStatus::NoSolutionUnderCap);
    }

    #[test]
    fn minhash_picks_exactly_the_offset_minima((wheels, f, l) in small_instance(60), seed in any::<u64>()) {
        let inst = instance(&wheels, f, l);
        let out = build(&inst, Algorithm::Minhash, seed).unwrap();
        let ranks = MinHashState::new(l, seed);
        let mut expected: Vec<u64> = (0..=l - f)
            .map(|k| wheels.iter().map(|&w| w + k).min_by_key(|&j| (ranks.rank(j), j)).unwrap())
            .collect();
        expected.sort_unstable();
        expected.dedup();
        prop_assert_eq!(out.track.pillars(), &expected[..]);
    }
}

#[test]
fn expected_y_matches_enumeration() {
    for n in 1..=5u64 {
        let setup = AdversarySetup::new(n).unwrap();
        let l = setup.track_length();
        let mut rng = common::rng(n);
        for density in [0.0, 0.2, 0.5, 1.0] {
            let pillars = common::random_track(&mut rng, l, density);
            let exact = expected_y_exact(&setup, &TrackLayout::new(l, pillars.clone()).unwrap()).unwrap();
            let brute = brute_force_expected_y(n, &pillars);
            assert!((exact - brute).abs() < 1e-12, "n={n} T={pillars:?}: {exact} vs {brute}");
        }
    }
}

#[test]
fn sampled_cars_have_fair_wheels() {
    let n = 8u64;
    let draws = 10_000u64;
    let mut counts = vec![0u64; 2 * n as usize + 1];
    let mut redraws = 0u64;
    for seed in 0..draws {
        let sample = sample_car(n, seed).unwrap();
        assert!(sample.car.n() >= 1);
        assert_eq!(sample.car.quarter_length(), 2 * n);
        redraws += u64::from(sample.redraws);
        for &w in sample.car.wheels() {
            counts[w as usize] += 1;
        }
    }
    // Redraws reject only the empty car, which has probability 2^-16 here.
    assert!(redraws <= 3, "{redraws} redraws");
    let sd = (draws as f64 * 0.25).sqrt();
    for (w, &c) in counts.iter().enumerate().skip(1) {
        let z = (c as f64 - draws as f64 / 2.0) / sd;
        assert!(z.abs() < 4.5, "wheel {w} appears {c} times (z = {z:.2})");
    }
}

#[test]
fn empirical_mean_converges() {
    let setup = AdversarySetup::new(16).unwrap();
    let l = setup.track_length();
    let pillars: Vec<u64> = (1..=l).filter(|p| p % 8 == 3).collect();
    let t = TrackLayout::new(l, pillars).unwrap();
    let mut errors = Vec::new();
    for trials in [100usize, 1_000, 10_000] {
        let r = concentration_trial(&setup, &t, trials, 5, &[0.1]).unwrap();
        let err = (r.empirical_mean - r.exact_mean).abs();
        assert!(err <= 5.0 * r.standard_error() + 1e-9, "trials={trials}: error {err}");
        errors.push((err, r.standard_error()));
    }
    assert!(errors[2].1 < errors[0].1 / 5.0);
}

#[test]
fn conditional_is_no_worse_than_random_on_average() {
    for (n, mult) in [(8u64, 16u64), (32, 16), (64, 8)] {
        let wheels: Vec<u64> = (1..=n).map(|i| 2 * i - 1).collect();
        let inst = instance(&wheels, 2 * n, 2 * n * mult);
        let det = build_conditional(&inst).pillar_count as f64;
        let seeds = 100;
        let mean = (0..seeds)
            .map(|s| build_random_alterations(&inst, s).pillar_count as f64)
            .sum::<f64>()
            / seeds as f64;
        assert!(det <= mean + 1.0, "n={n}: conditional {det} vs random mean {mean}");
    }
}

#[test]
fn minhash_rarely_samples_high_ranks() {
    let (n, f, l) = (32u64, 64u64, 2048u64);
    let quantile = (n as f64).ln() / n as f64;
    let threshold = (quantile * u64::MAX as f64) as u64;
    for s in 0..20u64 {
        let inst = common::instance(&uniform_wheels(n, f, s), f, l);
        let out = build(&inst, Algorithm::Minhash, s).unwrap();
        let ranks = MinHashState::new(l, s);
        let high = out.track.pillars().iter().filter(|&&p| ranks.rank(p) > threshold).count();
        let frac = high as f64 / out.track.len() as f64;
        let limit = 2.0 * (l - f + 1) as f64 / (n as f64 * out.track.len() as f64);
        assert!(frac <= limit, "seed {s}: {frac} of pillars above quantile, limit {limit}");
    }
}

fn uniform_wheels(n: u64, f: u64, seed: u64) -> Vec<u64> {
    let mut w: Vec<u64> = rand::seq::index::sample(&mut common::rng(seed), f as usize, n as usize)
        .into_iter()
        .map(|i| i as u64 + 1)
        .collect();
    w.sort_unstable();
    w
}
