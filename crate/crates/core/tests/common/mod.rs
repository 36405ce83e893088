//! Synthetic instances built through the public API only.
#![allow(dead_code)]

use iesplan::model::*;
use rand::Rng;

pub fn horizon(hours: usize) -> Horizon {
    Horizon { hours_per_day: hours, typical_day_weights: vec![365.0], planning_years: 1, discount_rate: 0.0, cyclic_soc: false }
}

/// Cheap tariffs and a shed penalty well above any investment.
pub fn base(name: &str, hours: usize) -> PlanningInstance {
    PlanningInstance {
        name: name.into(),
        horizon: horizon(hours),
        tariffs: TariffSeries { elec_price: vec![0.02; hours], gas_price: vec![0.01; hours] },
        loads: LoadProfile {
            nominal: CarrierSeries::zeros(hours),
            shed_penalty: CarrierSeries { electricity: vec![0.5; hours], heat: vec![0.5; hours], cooling: vec![0.5; hours] },
        },
        equipment: vec![],
        feeders: vec![],
        storage: vec![],
        budgets: None,
        reliability: None,
    }
}

pub fn cchp(id: &str, capacity: f64, cost: f64) -> EquipmentOption {
    EquipmentOption {
        id: id.into(),
        kind: EquipmentKind::Cchp,
        capacity,
        invest_cost: cost,
        conversion: vec![
            Conversion { from: Carrier::Gas, to: Carrier::Electricity, efficiency: 0.3 },
            Conversion { from: Carrier::Gas, to: Carrier::Heat, efficiency: 0.4 },
            Conversion { from: Carrier::Gas, to: Carrier::Cooling, efficiency: 0.2 },
        ],
    }
}

pub fn gb(id: &str, capacity: f64, cost: f64, eff: f64) -> EquipmentOption {
    EquipmentOption {
        id: id.into(),
        kind: EquipmentKind::Gb,
        capacity,
        invest_cost: cost,
        conversion: vec![Conversion { from: Carrier::Gas, to: Carrier::Heat, efficiency: eff }],
    }
}

pub fn ec(id: &str, capacity: f64, cost: f64, cop: f64) -> EquipmentOption {
    EquipmentOption {
        id: id.into(),
        kind: EquipmentKind::Ec,
        capacity,
        invest_cost: cost,
        conversion: vec![Conversion { from: Carrier::Electricity, to: Carrier::Cooling, efficiency: cop }],
    }
}

pub fn feeder(id: &str, capacity: f64) -> FeederSpec {
    FeederSpec { id: id.into(), capacity, efficiency: 1.0 }
}

pub fn bess(cost_energy: f64, cost_power: f64) -> StorageSpec {
    StorageSpec {
        kind: StorageKind::Bess,
        cost_energy,
        cost_power,
        soc_min: 0.1,
        soc_max: 0.9,
        eta_ch: 0.95,
        eta_dis: 0.95,
        max_charge_cycles: None,
        initial_soc: Some(0.9),
        max_energy: None,
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// At most six hours, three options and two feeders, with deviations on one or two hours.
/// Building everything always serves the deviated loads.
pub fn random_tiny<R: Rng>(rng: &mut R) -> (PlanningInstance, UncertaintyBudgets) {
    let hours = rng.gen_range(3..=6);
    let mut inst = base("random", hours);
    let heat: Vec<f64> = (0..hours).map(|_| round2(rng.gen_range(1.0..4.0))).collect();
    let elec: Vec<f64> = (0..hours).map(|_| round2(rng.gen_range(2.0..5.0))).collect();
    let peak_heat = heat.iter().cloned().fold(0.0, f64::max);
    let peak_elec = elec.iter().cloned().fold(0.0, f64::max);
    inst.equipment.push(gb("gb1", round2(peak_heat * 1.25 / 0.9 + 0.5), round2(rng.gen_range(0.5..2.0)), 0.9));
    let cooled = rng.gen_bool(0.5);
    if cooled {
        inst.equipment.push(ec("ec1", 2.0, round2(rng.gen_range(0.3..1.0)), 2.0));
        inst.loads.nominal.cooling = (0..hours).map(|_| round2(rng.gen_range(0.5..2.5))).collect();
    } else {
        inst.equipment.push(gb("gb2", round2(peak_heat * 0.8), round2(rng.gen_range(0.5..2.0)), 0.85));
    }
    inst.equipment.push(cchp("cchp1", round2(rng.gen_range(6.0..12.0)), round2(rng.gen_range(1.0..4.0))));
    let need = peak_elec * 1.25 + if cooled { 2.0 } else { 0.0 };
    if rng.gen_bool(0.5) {
        inst.feeders.push(feeder("f1", round2(need + 0.5)));
    } else {
        inst.feeders.push(feeder("f1", round2(need * 0.7)));
        inst.feeders.push(feeder("f2", round2(need * 0.6)));
    }
    inst.loads.nominal.electricity = elec;
    inst.loads.nominal.heat = heat;
    let mut delta = CarrierSeries::zeros(hours);
    let slots = rng.gen_range(1..=2).min(hours);
    let mut picked = Vec::new();
    while picked.len() < slots {
        let t = rng.gen_range(0..hours);
        if !picked.contains(&t) {
            picked.push(t);
        }
    }
    for &t in &picked {
        delta.electricity[t] = round2(0.2 * inst.loads.nominal.electricity[t]);
        delta.heat[t] = round2(0.2 * inst.loads.nominal.heat[t]);
    }
    let budgets = UncertaintyBudgets {
        gamma_n: 1,
        gamma_i: hours,
        gamma_d: rng.gen_range(1..=3),
        gamma_l: rng.gen_range(1..=2),
        delta_load: Some(delta),
        ..Default::default()
    };
    (inst, budgets)
}

/// Eight hours, two feeders, five options and mild load deviations on every hour.
pub fn park(hours: usize) -> PlanningInstance {
    let mut inst = base("park", hours);
    let shape = |lo: f64, hi: f64| -> Vec<f64> {
        (0..hours).map(|t| round2(lo + (hi - lo) * (std::f64::consts::PI * t as f64 / hours as f64).sin())).collect()
    };
    inst.loads.nominal.electricity = shape(4.0, 7.0);
    inst.loads.nominal.heat = shape(3.0, 6.0);
    inst.loads.nominal.cooling = shape(1.0, 2.5);
    inst.tariffs.elec_price = (0..hours).map(|t| if t % 4 < 2 { 0.02 } else { 0.035 }).collect();
    inst.feeders = vec![feeder("f1", 6.0), feeder("f2", 4.0)];
    inst.equipment = vec![
        cchp("cchp1", 10.0, 3.0),
        gb("gb1", 7.0, 1.0, 0.9),
        gb("gb2", 7.0, 1.1, 0.9),
        ec("ec1", 1.5, 0.5, 2.0),
        ec("ec2", 1.5, 0.6, 2.0),
    ];
    inst.budgets = Some(UncertaintyBudgets { gamma_n: 1, gamma_i: hours, gamma_d: 2, gamma_l: 1, delta_fraction: 0.05, ..Default::default() });
    inst
}
