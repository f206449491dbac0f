//! Structural invariants of the reductions and the metrics, across seeded
//! random automata.

use apnfa_core::evaluate::evaluate;
use apnfa_core::labelling::label;
use apnfa_core::planner::{
    solve, Candidate, GbpsRate, Objective, PlanOutcome, PlanProblem, StageCount,
};
use apnfa_core::ratio::Ratio;
use apnfa_core::reduce::{bfs_reduce, merge, merge_prune, prune};
use apnfa_core::text::format_nfa;
use apnfa_core::traffic::TrafficSample;
use apnfa_testkit::{random_nfa, random_sample, SplitMix64};

const ALPHABET: &[u8] = b"abcd";

fn nonempty_sample(rng: &mut SplitMix64) -> TrafficSample {
    let mut sample = random_sample(rng, ALPHABET, 40, 7);
    if sample.is_empty() {
        sample.insert(b"ab".to_vec(), 1);
    }
    sample
}

#[test]
fn prune_hits_the_exact_target_size() {
    let mut rng = SplitMix64::new(0x9e0_0001);
    for _ in 0..100 {
        let nfa = random_nfa(&mut rng, 12, ALPHABET);
        let labeling = label(&nfa, &nonempty_sample(&mut rng));
        for theta in [0.1, 0.35, 0.5, 0.9, 1.0] {
            let (reduced, report) = prune(&nfa, &labeling, theta).unwrap();
            let expected = Ratio::from_f64(theta)
                .unwrap()
                .mul_ceil(nfa.num_states() as u64) as usize;
            assert_eq!(reduced.num_states(), expected);
            assert_eq!(report.states_after, expected);
        }
    }
}

#[test]
fn merge_never_grows_and_bfs_matches_prune_sizes() {
    let mut rng = SplitMix64::new(0x9e0_0002);
    for _ in 0..100 {
        let nfa = random_nfa(&mut rng, 12, ALPHABET);
        let labeling = label(&nfa, &nonempty_sample(&mut rng));
        let (merged, report) = merge(&nfa, &labeling, 2.0, 0.8).unwrap();
        assert!(merged.num_states() <= nfa.num_states());
        assert_eq!(report.states_after, merged.num_states());

        let (reduced, _) = bfs_reduce(&nfa, 0.5).unwrap();
        let expected = Ratio::from_f64(0.5)
            .unwrap()
            .mul_ceil(nfa.num_states() as u64) as usize;
        assert_eq!(reduced.num_states(), expected);
    }
}

#[test]
fn reductions_serialize_deterministically() {
    let mut rng = SplitMix64::new(0x9e0_0003);
    for _ in 0..40 {
        let nfa = random_nfa(&mut rng, 10, ALPHABET);
        let labeling = label(&nfa, &nonempty_sample(&mut rng));
        let (a, _) = merge_prune(&nfa, &labeling, 1.8, 0.7, 0.6).unwrap();
        let (b, _) = merge_prune(&nfa, &labeling, 1.8, 0.7, 0.6).unwrap();
        assert_eq!(format_nfa(&a), format_nfa(&b));
    }
}

#[test]
fn labelling_is_additive_over_sample_merge() {
    let mut rng = SplitMix64::new(0x9e0_0004);
    for _ in 0..100 {
        let nfa = random_nfa(&mut rng, 10, ALPHABET);
        let first = random_sample(&mut rng, ALPHABET, 30, 6);
        let second = random_sample(&mut rng, ALPHABET, 30, 6);
        let mut merged = first.clone();
        merged.merge(&second);
        let combined = label(&nfa, &merged);
        let l1 = label(&nfa, &first);
        let l2 = label(&nfa, &second);
        for q in 0..nfa.num_states() {
            assert_eq!(combined.count_of(q), l1.count_of(q) + l2.count_of(q));
        }
    }
}

#[test]
fn significant_states_are_reachable() {
    let mut rng = SplitMix64::new(0x9e0_0005);
    for _ in 0..100 {
        let nfa = random_nfa(&mut rng, 10, ALPHABET);
        let labeling = label(&nfa, &nonempty_sample(&mut rng));
        let depths = nfa.bfs_depths();
        for (q, depth) in depths.iter().enumerate() {
            if labeling.count_of(q) > 0 {
                assert!(depth.is_some(), "state {q} labelled but unreachable");
            }
        }
    }
}

#[test]
fn acceptance_probability_is_monotone_under_reduction() {
    let mut rng = SplitMix64::new(0x9e0_0006);
    for _ in 0..60 {
        let nfa = random_nfa(&mut rng, 10, ALPHABET);
        let sample = nonempty_sample(&mut rng);
        let labeling = label(&nfa, &sample);
        let (reduced, _) = prune(&nfa, &labeling, 0.4).unwrap();
        let result = evaluate(&nfa, &reduced, &sample).unwrap();
        assert_eq!(result.a_fn, 0);
        // prob * |S| = a_tp + a_fp exactly, in integers before division
        let accepted = result.a_tp + result.a_fp;
        assert_eq!(result.prob, accepted as f64 / result.sample_size as f64);
        let precise_result = evaluate(&nfa, &nfa, &sample).unwrap();
        assert!(result.prob >= precise_result.prob);
    }
}

#[test]
fn opt_rsc_never_beats_a_fitting_single_precise_stage() {
    let mut rng = SplitMix64::new(0x9e0_0007);
    for _ in 0..60 {
        // the most precise candidate is the last: lowest acceptance
        let den = 10 + rng.below(20);
        let precise_accpt = Ratio::new(1 + rng.below(den / 2), den).unwrap();
        let mut candidates: Vec<Candidate> = (0..4)
            .map(|i| {
                let extra = 1 + rng.below(den - precise_accpt.num() * den / den);
                Candidate::new(
                    format!("c{i}"),
                    (1 + rng.below(500)) as f64,
                    Ratio::new((precise_accpt.num() + extra).min(den), den).unwrap(),
                )
            })
            .collect();
        let precise_lut = (1 + rng.below(500)) as f64;
        candidates.push(Candidate::new("precise", precise_lut, precise_accpt));
        let input_rate = GbpsRate::from_milli(1_000 + rng.below(200_000));
        let tp = GbpsRate::from_milli(1_000 + rng.below(10_000));
        // X exactly the precise candidate's single-stage output
        let max_output = GbpsRate::from_milli(
            (input_rate.milli() as u128 * precise_accpt.num() as u128 / precise_accpt.den() as u128)
                as u64
                + 1,
        );
        let problem = PlanProblem {
            candidates,
            input_rate,
            engine_throughput: tp,
            stages: StageCount::UpTo(3),
            objective: Objective::MinResources { max_output },
        };
        let single_stage_cost =
            (input_rate.milli() as u128).div_ceil(tp.milli() as u128) as f64 * precise_lut;
        match solve(&problem).unwrap() {
            PlanOutcome::Feasible { plan } => {
                assert!(
                    plan.total_luts <= single_stage_cost,
                    "optimum {} worse than the single precise stage {}",
                    plan.total_luts,
                    single_stage_cost
                );
            }
            PlanOutcome::Infeasible { binding } => {
                panic!("single precise stage fits, yet infeasible: {binding}")
            }
        }
    }
}
