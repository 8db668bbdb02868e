//! The LP and QP solvers against brute-force enumeration on small random
//! instances.

mod common;

use common::*;
use proptest::prelude::*;
use tia_core::statics::{
    analyze_kinematics, mechanism_activation, mechanism_suppression, opening_lp, solve_contact_forces_unchecked,
    Classification,
};

const ORACLE_TOL: f64 = 1e-8;
const SEEDS: std::ops::RangeInclusive<u64> = 1..=30;

#[test]
fn opening_value_matches_vertex_enumeration() {
    for seed in SEEDS {
        let inst = micro_instance(seed);
        let cols = dense_columns(&inst.g);
        let (z, _) = opening_lp(&inst.g).unwrap();
        let oracle = opening_oracle(&cols, 6);
        assert!(close(z, oracle, ORACLE_TOL), "seed {seed}: lp {z} oracle {oracle}");
    }
}

#[test]
fn work_rates_match_orthant_enumeration() {
    for seed in SEEDS {
        let inst = micro_instance(seed);
        let cols = dense_columns(&inst.g);
        let (gmax, _) = mechanism_activation(&inst.g, &inst.f).unwrap();
        let (gmin, _) = mechanism_suppression(&inst.g, &inst.f).unwrap();
        let neg: Vec<f64> = inst.f.iter().map(|v| -v).collect();
        let omax = work_rate_oracle(&cols, &inst.f);
        let omin = -work_rate_oracle(&cols, &neg);
        assert!(close(gmax, omax, ORACLE_TOL), "seed {seed}: γmax {gmax} oracle {omax}");
        assert!(close(gmin, omin, ORACLE_TOL), "seed {seed}: γmin {gmin} oracle {omin}");
    }
}

#[test]
fn contact_forces_match_support_enumeration() {
    for seed in SEEDS {
        let inst = micro_instance(seed);
        let cols = dense_columns(&inst.g);
        let b: Vec<f64> = inst.balanced.iter().map(|v| -v).collect();
        let oracle = qp_oracle(&cols, &b).expect("balanced by construction");
        let eq = solve_contact_forces_unchecked(&inst.g, &inst.balanced);
        assert!(eq.feasible, "seed {seed}: residual {}", eq.residual);
        for (a, o) in eq.lambdas.iter().zip(&oracle) {
            assert!(*a >= 0.0);
            assert!(close(*a, *o, ORACLE_TOL), "seed {seed}: λ {:?} oracle {:?}", eq.lambdas, oracle);
        }
    }
}

#[test]
fn instances_cover_open_locked_and_loaded_cases() {
    let (mut open, mut closed, mut active) = (0, 0, 0);
    for seed in SEEDS {
        let inst = micro_instance(seed);
        let (z, _) = opening_lp(&inst.g).unwrap();
        if z > 1e-6 {
            open += 1;
        } else {
            closed += 1;
        }
        if mechanism_activation(&inst.g, &inst.f).unwrap().0 > 1e-6 {
            active += 1;
        }
    }
    assert!(open >= 3 && closed >= 3 && active >= 3, "open {open} closed {closed} active {active}");
}

#[test]
fn mechanism_certificates_are_admissible() {
    for seed in SEEDS {
        let inst = micro_instance(seed);
        let (gmax, x) = mechanism_activation(&inst.g, &inst.f).unwrap();
        if gmax > 1e-9 {
            let rates = inst.g.tmul(&x);
            assert!(rates.iter().all(|r| *r >= -1e-9), "seed {seed}: {rates:?}");
            let work: f64 = inst.f.iter().zip(&x).map(|(a, b)| a * b).sum();
            let l1: f64 = x.iter().map(|v| v.abs()).sum();
            assert!(close(work / l1.max(1e-300), gmax, 1e-7), "seed {seed}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_is_scale_invariant(seed in 1u64..500, scale in 1e-3f64..1e3) {
        let inst = micro_instance(seed);
        let a = analyze_kinematics(&inst.g, &inst.f).unwrap();
        let scaled: Vec<f64> = inst.f.iter().map(|v| v * scale).collect();
        let b = analyze_kinematics(&inst.g, &scaled).unwrap();
        prop_assert_eq!(a.classification, b.classification);
    }

    #[test]
    fn work_rates_bracket_zero(seed in 1u64..500) {
        let inst = micro_instance(seed);
        let (gmax, _) = mechanism_activation(&inst.g, &inst.f).unwrap();
        let (gmin, _) = mechanism_suppression(&inst.g, &inst.f).unwrap();
        prop_assert!(gmax >= 0.0 && gmin <= 0.0);
    }

    #[test]
    fn balanced_loads_have_nonnegative_equilibria(seed in 1u64..500) {
        let inst = micro_instance(seed);
        let eq = solve_contact_forces_unchecked(&inst.g, &inst.balanced);
        prop_assert!(eq.feasible);
        prop_assert!(eq.residual <= 1e-6);
        prop_assert!(eq.lambdas.iter().all(|l| *l >= 0.0));
    }

    #[test]
    fn locked_means_zero_work_in_both_directions(seed in 1u64..500) {
        let inst = micro_instance(seed);
        let k = analyze_kinematics(&inst.g, &inst.f).unwrap();
        if k.classification == Classification::Locked {
            let cols = dense_columns(&inst.g);
            prop_assert!(work_rate_oracle(&cols, &inst.f) <= 1e-9);
        }
    }
}
