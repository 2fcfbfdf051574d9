use kakutani_core::codes::{apply_stationary, compose, random_code};
use kakutani_core::feldman::{cycle_span_identity, generate, pattern_length};
use kakutani_core::flows::{ExactRoof, FlowPoint, Roof, RoofFunction, SpecialFlow};
use kakutani_core::systems::{build_tower, expected_mass, kac_sum};
use kakutani_core::{FeldmanSpec, SignedRational, Symbol, Word};
use num_bigint::BigUint;
use proptest::prelude::*;

fn letters(n: u32, l: u64) -> Vec<Word> {
    (0..n).map(|i| Word::single(Symbol(i), l)).collect()
}

#[test]
fn pattern_lengths_over_the_sweep() {
    for t in 1..=2u64 {
        for n in 2..=3u32 {
            for m in 1..=3u32 {
                for l in 1..=2u64 {
                    let spec = FeldmanSpec::new(t, m, letters(n, l)).unwrap();
                    for j in 1..=m {
                        let b = generate(&spec, j).unwrap();
                        let counted = b.word.symbols().count() as u64;
                        let formula = u128::from(t) * u128::from(n).pow(2 * m + 3) * u128::from(l);
                        assert_eq!(u128::from(counted), formula);
                        assert_eq!(pattern_length(&spec), BigUint::from(counted));
                    }
                    for j in 1..m {
                        for jp in j + 1..=m {
                            let (nn, big) = (u128::from(n), |e: u32| u128::from(n).pow(e));
                            let lhs = u128::from(t) * big(2 * jp) * u128::from(l);
                            let rhs = big(2 * (jp - j) - 1) * u128::from(t) * big(2 * j) * nn * u128::from(l);
                            assert_eq!(lhs, rhs);
                            assert!(cycle_span_identity(t, u64::from(n), l, j, jp));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn pattern_runs_follow_the_block_order() {
    let spec = FeldmanSpec::new(1, 2, letters(2, 3)).unwrap();
    let b1 = generate(&spec, 1).unwrap();
    // Each cycle is a^{4*3} b^{4*3}; there are 2^4 cycles.
    assert_eq!(b1.word.run_count(), 32);
    assert!(b1.word.runs().iter().all(|r| r.count == 12));
    assert_eq!(b1.word.runs()[0].symbol, Symbol(0));
}

proptest! {
    #[test]
    fn stationary_codes_match_windowed_evaluation(
        ids in prop::collection::vec(0u32..3, 1..60),
        radius in 0u32..3,
        seed in any::<u64>(),
    ) {
        let alphabet: Vec<Symbol> = (0..3).map(Symbol).collect();
        let code = random_code(radius, alphabet.clone(), alphabet, seed).unwrap();
        let w = Word::from_ids(&ids);
        let width = 2 * radius as usize + 1;
        match apply_stationary(&code, &w) {
            Ok(out) => {
                let x: Vec<Symbol> = w.symbols().collect();
                let naive: Vec<Symbol> = x.windows(width).map(|win| code.eval(win)).collect();
                prop_assert_eq!(out.symbols().collect::<Vec<_>>(), naive);
            }
            Err(_) => prop_assert!(ids.len() < width),
        }
    }

    #[test]
    fn composed_codes_apply_in_sequence(
        ids in prop::collection::vec(0u32..2, 8..40),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
    ) {
        let alphabet: Vec<Symbol> = (0..2).map(Symbol).collect();
        let c1 = random_code(1, alphabet.clone(), alphabet.clone(), s1).unwrap();
        let c2 = random_code(2, alphabet.clone(), alphabet, s2).unwrap();
        let w = Word::from_ids(&ids);
        let stepwise = apply_stationary(&c2, &apply_stationary(&c1, &w).unwrap()).unwrap();
        let joint = apply_stationary(&compose(&c1, &c2).unwrap(), &w).unwrap();
        prop_assert_eq!(stepwise, joint);
    }

    #[test]
    fn fiber_counts_stay_in_the_band(z in 0.0f64..1.0, w in 0.0f64..1.0, t in 10.0f64..2000.0, teeth in 1u32..32) {
        for roof in [RoofFunction::Cosine { a: 0.25, b: 0.2 }, RoofFunction::Sawtooth { teeth }] {
            let flow = SpecialFlow::new(std::f64::consts::SQRT_2 - 1.0, 3f64.sqrt() - 1.0, roof);
            prop_assert!(roof.in_stretch_band());
            let n = flow.fiber_count((z, w), t) as f64;
            prop_assert!(n >= t / 2.0 && n <= 2.0 * t, "N = {n} at t = {t}");
        }
    }

    #[test]
    fn exact_flow_composes(num in 0i64..1000, s1 in 0i64..5000, s2 in 0i64..5000, teeth in 1u32..8) {
        let q = |a: i64, b: i64| SignedRational::new(a, b);
        let flow = SpecialFlow::new(q(2, 7), q(3, 11), ExactRoof::Sawtooth { teeth });
        let p = FlowPoint { z: q(num, 1000), w: q(1, 3), s: q(1, 4) };
        let (a, b) = (q(s1, 97), q(s2, 89));
        prop_assert_eq!(flow.time_t(flow.time_t(p, a), b), flow.time_t(p, a + b));
        prop_assert_eq!(flow.time_t(flow.time_t(p, a), -a), p);
    }
}

#[test]
fn tower_mass_and_kac() {
    use kakutani_core::words::LevelPlan;
    use kakutani_core::{Alphabet, ConstructionSequence};
    let seq = ConstructionSequence::new(Alphabet::letters(2), false).unwrap();
    let z = num_rational::Ratio::from_integer(0);
    let first = LevelPlan { f: 1, l: 1, delta: z, words: vec![vec![(0, 1), (1, 1)], vec![(1, 1), (0, 1)]] };
    let seq = seq.build_next_level(&first).unwrap().sequence;
    let second = LevelPlan { f: 2, l: 2, delta: z, words: vec![vec![(0, 2), (1, 2)], vec![(1, 2), (0, 2)]] };
    let seq = seq.build_next_level(&second).unwrap().sequence;
    let tower = build_tower(&seq, 1).unwrap();
    assert_eq!(tower.total_mass(), expected_mass(&seq, 1));
    for base in [vec![(0usize, 0u64)], vec![(0, 1), (1, 0)]] {
        let returns = tower.first_return_map(&base).unwrap();
        assert_eq!(kac_sum(&returns), tower.total_mass());
    }
}
