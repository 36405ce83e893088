use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::fixtures::*;
use crate::model::*;

fn opts(years: usize, seed: u64) -> McsOptions {
    McsOptions { years, seed, solve: SolveOptions::exact(), prefilter: true }
}

/// A boiler covering a flat 30 MW heat load over one typical day.
fn boiler_case(hours: usize) -> (PlanningInstance, InvestmentDecision) {
    let mut inst = toy(hours);
    inst.horizon.hours_per_day = hours;
    inst.horizon.typical_day_weights = vec![365.0];
    inst.equipment.push(gb("gb", 40.0, 1.0, 1.0));
    inst.loads.nominal.heat = vec![30.0; hours];
    (inst, InvestmentDecision { build: vec![true], storage: vec![] })
}

#[test]
fn zero_failure_rate_gives_zero_indices() {
    let (mut inst, d) = boiler_case(4);
    inst.reliability = Some(ReliabilityModel { failure_rate: 0.0, repair_rate: 0.1, overrides: vec![], fluctuation: [0.0; 3] });
    let r = assess(&inst, &d, &opts(5, 1)).unwrap();
    assert_eq!(r.years, 5);
    assert!(!r.partial);
    for c in &r.carriers {
        assert_eq!((c.eens, c.lole, c.lolf), (0.0, 0.0, 0.0));
    }
}

#[test]
fn hand_counted_outage() {
    let (inst, d) = boiler_case(24);
    let sim = Simulator::new(&inst, &d, opts(1, 0)).unwrap();
    let hours = sim.year_hours();
    assert_eq!(hours, 365 * 24);
    let mut up = vec![true; hours];
    for h in 100..104 {
        up[h] = false;
    }
    let mut loads = CarrierSeries::zeros(hours);
    loads.heat = vec![30.0; hours];
    let o = sim.simulate_year(&[up], &loads).unwrap();
    assert!((o.shed_energy[1] - 120.0).abs() < 1e-6);
    assert_eq!(o.shed_hours[1], 4);
    assert_eq!(o.events[1], 1);
    assert_eq!(o.shed_energy[0], 0.0);
}

#[test]
fn outage_across_midnight_is_one_event() {
    let (inst, d) = boiler_case(24);
    let sim = Simulator::new(&inst, &d, opts(1, 0)).unwrap();
    let hours = sim.year_hours();
    let mut up = vec![true; hours];
    for h in 22..26 {
        up[h] = false;
    }
    let mut loads = CarrierSeries::zeros(hours);
    loads.heat = vec![30.0; hours];
    let o = sim.simulate_year(&[up], &loads).unwrap();
    assert_eq!((o.shed_hours[1], o.events[1]), (4, 1));
}

#[test]
fn same_seed_same_answer() {
    let (mut inst, d) = boiler_case(4);
    inst.reliability = Some(ReliabilityModel { failure_rate: 0.05, repair_rate: 0.2, overrides: vec![], fluctuation: [0.0, 0.1, 0.0] });
    let a = assess(&inst, &d, &opts(3, 9)).unwrap();
    let b = assess(&inst, &d, &opts(3, 9)).unwrap();
    assert_eq!(a, b);
    assert!(a.of(Carrier::Heat).eens > 0.0);
}

#[test]
fn prefilter_does_not_change_results() {
    let (mut inst, d) = boiler_case(4);
    inst.loads.nominal.heat = vec![30.0, 36.0, 20.0, 39.0];
    inst.reliability = Some(ReliabilityModel { failure_rate: 0.02, repair_rate: 0.3, overrides: vec![], fluctuation: [0.0, 0.08, 0.0] });
    let on = assess(&inst, &d, &opts(2, 4)).unwrap();
    let off = assess(&inst, &d, &McsOptions { prefilter: false, ..opts(2, 4) }).unwrap();
    for (a, b) in on.carriers.iter().zip(&off.carriers) {
        assert!((a.eens - b.eens).abs() < 1e-6, "{} vs {}", a.eens, b.eens);
        assert_eq!(a.lole, b.lole);
        assert_eq!(a.lolf, b.lolf);
    }
}

#[test]
fn extra_unit_never_hurts() {
    let (mut inst, d) = boiler_case(4);
    inst.equipment.push(gb("spare", 40.0, 1.0, 1.0));
    inst.reliability = Some(ReliabilityModel { failure_rate: 0.05, repair_rate: 0.2, overrides: vec![], fluctuation: [0.0, 0.05, 0.0] });
    let one = InvestmentDecision { build: vec![true, false], ..d.clone() };
    let two = InvestmentDecision { build: vec![true, true], ..d };
    let a = assess(&inst, &one, &opts(3, 2)).unwrap();
    let b = assess(&inst, &two, &opts(3, 2)).unwrap();
    assert!(b.of(Carrier::Heat).eens <= a.of(Carrier::Heat).eens + 1e-6);
    assert!(b.of(Carrier::Heat).lole <= a.of(Carrier::Heat).lole);
}

#[test]
fn year_tiles_by_weight() {
    let h = Horizon { hours_per_day: 24, typical_day_weights: vec![100.0, 200.0, 65.0], planning_years: 1, discount_rate: 0.0, cyclic_soc: false };
    let days = year_days(&h);
    assert_eq!(days.len(), 365);
    let count = |i| days.iter().filter(|&&d| d == i).count();
    assert_eq!((count(0), count(1), count(2)), (100, 200, 65));
    // no long runs of a single typical day
    assert!(days[..30].iter().any(|&d| d == 0) && days[..30].iter().any(|&d| d == 2));
}

#[test]
fn availability_matches_stationary_share() {
    let (lambda, mu) = (0.02, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 400_000;
    let a = sample_availability(lambda, mu, n, &mut rng);
    let (pf, pr) = transition_probabilities(lambda, mu);
    let expected = mu / (lambda + mu);
    let share = a.iter().filter(|&&u| u).count() as f64 / n as f64;
    // autocorrelated chain: inflate the binomial error by the mixing factor
    let rho = 1.0 - pf - pr;
    let se = (expected * (1.0 - expected) / n as f64 * (1.0 + rho) / (1.0 - rho)).sqrt();
    assert!((share - expected).abs() < 4.0 * se, "{share} vs {expected}");
    assert!(a[0]);
}

#[test]
fn transition_limits() {
    assert_eq!(transition_probabilities(0.0, 0.3).0, 0.0);
    let (_, repair) = transition_probabilities(0.01, 1e9);
    assert!((repair - 1.0).abs() < 1e-9);
    let (_, repair) = transition_probabilities(0.01, f64::INFINITY);
    assert_eq!(repair, 1.0);
    // small rates agree with the per-hour exponential rule to first order
    let (fail, _) = transition_probabilities(1e-4, 1e-3);
    assert!((fail - (1.0 - (-1e-4f64).exp())).abs() < 1e-7);
}

#[test]
fn load_mean_and_spread() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 20_000;
    let mut profile = CarrierSeries::zeros(n);
    profile.electricity = vec![10.0; n];
    profile.heat = vec![4.0; n];
    let s = sample_loads(&profile, [0.1, 0.0, 0.3], &mut rng);
    let mean = s.electricity.iter().sum::<f64>() / n as f64;
    let sd = (s.electricity.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((mean - 10.0).abs() < 4.0 * 1.0 / (n as f64).sqrt(), "{mean}");
    assert!((sd - 1.0).abs() < 0.05, "{sd}");
    assert!(s.heat.iter().all(|&x| x == 4.0));
    assert!(s.cooling.iter().all(|&x| x == 0.0));
}

#[test]
fn confidence_interval_shrinks_with_years() {
    let outcomes: Vec<YearOutcome> = (0..100)
        .map(|i| YearOutcome { shed_energy: [i as f64 % 7.0, 0.0, 0.0], shed_hours: [i % 3, 0, 0], events: [i % 2, 0, 0] })
        .collect();
    let small = summarize(&outcomes[..10], false);
    let large = summarize(&outcomes, false);
    assert!(large.carriers[0].eens_ci < small.carriers[0].eens_ci);
    assert_eq!(summarize(&outcomes[..1], false).carriers[0].eens_ci, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_loads_are_never_negative(sigma in 0.0f64..3.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut profile = CarrierSeries::zeros(48);
        profile.electricity = vec![5.0; 48];
        let s = sample_loads(&profile, [sigma; 3], &mut rng);
        prop_assert!(s.electricity.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn tiling_keeps_the_year_length(weights in proptest::collection::vec(0.1f64..100.0, 1..6)) {
        let h = Horizon { hours_per_day: 24, typical_day_weights: weights, planning_years: 1, discount_rate: 0.0, cyclic_soc: false };
        prop_assert_eq!(year_days(&h).len(), 365);
    }
}
