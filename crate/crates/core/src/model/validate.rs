use std::collections::HashSet;
use std::fmt;

use super::{Carrier, EquipmentKind, PlanningInstance, StorageKind};

/// One violated invariant, identified by a stable code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

struct Collector(Vec<Diagnostic>);

impl Collector {
    fn check(&mut self, ok: bool, code: &'static str, message: impl FnOnce() -> String) {
        if !ok {
            self.0.push(Diagnostic { code, message: message() });
        }
    }
}

fn finite_nonneg(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite() && *x >= 0.0)
}

/// Every violated invariant of the instance, in a deterministic order. Empty means valid.
pub fn validate_instance(inst: &PlanningInstance) -> Vec<Diagnostic> {
    let mut c = Collector(Vec::new());
    let h = &inst.horizon;
    let period = h.period();

    c.check(h.hours_per_day > 0 && !h.typical_day_weights.is_empty(), "HORIZON_PERIOD", || {
        format!("period must be a positive multiple of hours_per_day, got {} days of {} h", h.days(), h.hours_per_day)
    });
    let weight_sum: f64 = h.typical_day_weights.iter().sum();
    c.check((weight_sum - 365.0).abs() <= 1e-9 && finite_nonneg(&h.typical_day_weights), "HORIZON_WEIGHTS", || {
        format!("typical-day weights must be non-negative and sum to 365, got {weight_sum}")
    });
    c.check(h.planning_years >= 1, "HORIZON_YEARS", || "planning_years must be at least 1".into());
    c.check(h.discount_rate >= 0.0 && h.discount_rate.is_finite(), "HORIZON_DISCOUNT", || {
        format!("discount_rate must be non-negative, got {}", h.discount_rate)
    });

    let series = [
        ("elec_price", &inst.tariffs.elec_price),
        ("gas_price", &inst.tariffs.gas_price),
    ];
    for (name, s) in series {
        c.check(s.len() == period, "TARIFF_LENGTH", || format!("{name} has {} entries, period is {period}", s.len()));
        c.check(finite_nonneg(s), "TARIFF_NEGATIVE", || format!("{name} has a negative or non-finite entry"));
    }
    for d in Carrier::LOADS {
        let l = inst.loads.nominal.get(d);
        let p = inst.loads.shed_penalty.get(d);
        c.check(l.len() == period, "LOAD_LENGTH", || format!("{d} load has {} entries, period is {period}", l.len()));
        c.check(p.len() == period, "LOAD_LENGTH", || format!("{d} penalty has {} entries, period is {period}", p.len()));
        c.check(finite_nonneg(l), "LOAD_NEGATIVE", || format!("{d} load has a negative or non-finite entry"));
        if p.len() == period && inst.tariffs.elec_price.len() == period && inst.tariffs.gas_price.len() == period {
            let bad = (0..period)
                .find(|&t| !(p[t] > inst.tariffs.elec_price[t].max(inst.tariffs.gas_price[t])));
            c.check(bad.is_none(), "PENALTY_DOMINANCE", || {
                format!("{d} shed penalty does not exceed the highest tariff at hour {}", bad.unwrap_or(0))
            });
        }
    }

    let mut ids = HashSet::new();
    for e in &inst.equipment {
        c.check(ids.insert(e.id.clone()), "DUPLICATE_ID", || format!("component id {} is repeated", e.id));
        c.check(e.capacity > 0.0 && e.capacity.is_finite(), "EQUIPMENT_CAPACITY", || {
            format!("{} capacity must be positive, got {}", e.id, e.capacity)
        });
        c.check(e.invest_cost >= 0.0 && e.invest_cost.is_finite(), "EQUIPMENT_COST", || {
            format!("{} invest_cost must be non-negative", e.id)
        });
        for conv in &e.conversion {
            c.check(conv.efficiency > 0.0 && conv.efficiency <= 2.0, "EQUIPMENT_EFFICIENCY", || {
                format!("{} efficiency {}→{} must lie in (0, 2], got {}", e.id, conv.from, conv.to, conv.efficiency)
            });
        }
        let pairs_ok = e.conversion.iter().all(|conv| conv.from == e.kind.input() && e.kind.outputs().contains(&conv.to))
            && e.kind.outputs().iter().all(|o| e.conversion.iter().filter(|conv| conv.to == *o).count() == 1)
            && e.conversion.len() == e.kind.outputs().len();
        c.check(pairs_ok, "EQUIPMENT_CONVERSION", || {
            let expected: Vec<String> = e.kind.outputs().iter().map(|o| format!("{}→{o}", e.kind.input())).collect();
            format!("{} ({}) must convert exactly {}", e.id, e.kind, expected.join(", "))
        });
        if e.kind == EquipmentKind::Ec {
            // an EC must not be a net electricity source
            c.check(e.coefficient(Carrier::Electricity) < 0.0, "EQUIPMENT_CONVERSION", || {
                format!("{} draws no electricity", e.id)
            });
        }
    }
    for f in &inst.feeders {
        c.check(ids.insert(f.id.clone()), "DUPLICATE_ID", || format!("component id {} is repeated", f.id));
        c.check(f.capacity > 0.0 && f.capacity.is_finite(), "FEEDER_CAPACITY", || {
            format!("{} capacity must be positive, got {}", f.id, f.capacity)
        });
        c.check(f.efficiency > 0.0 && f.efficiency <= 1.0, "FEEDER_EFFICIENCY", || {
            format!("{} efficiency must lie in (0, 1], got {}", f.id, f.efficiency)
        });
    }
    if let Some(first) = inst.feeders.first() {
        c.check(
            inst.feeders.iter().all(|f| f.efficiency == first.efficiency),
            "FEEDER_EFFICIENCY_MISMATCH",
            || "all feeders must share one substation efficiency".into(),
        );
    }

    let mut kinds = HashSet::new();
    for s in &inst.storage {
        c.check(kinds.insert(s.kind), "STORAGE_DUPLICATE", || format!("more than one {} given", s.kind));
        c.check(0.0 <= s.soc_min && s.soc_min < s.soc_max && s.soc_max <= 1.0, "STORAGE_SOC_ORDER", || {
            format!("{} needs 0 <= soc_min < soc_max <= 1, got [{}, {}]", s.kind, s.soc_min, s.soc_max)
        });
        let eta_ok = s.eta_ch > 0.0 && s.eta_ch <= 1.0 && s.eta_dis > 0.0 && s.eta_dis <= 1.0;
        c.check(eta_ok && s.eta_ch * s.eta_dis <= 1.0, "STORAGE_EFFICIENCY", || {
            format!("{} efficiencies must lie in (0, 1], got {} and {}", s.kind, s.eta_ch, s.eta_dis)
        });
        c.check(s.cost_energy >= 0.0 && s.cost_power >= 0.0, "STORAGE_COST", || {
            format!("{} costs must be non-negative", s.kind)
        });
        if let Some(cycles) = s.max_charge_cycles {
            c.check(cycles > 0.0, "STORAGE_CYCLES", || format!("{} max_charge_cycles must be positive", s.kind));
            c.check(s.kind == StorageKind::Bess, "STORAGE_CYCLES", || "cycle limits apply to BESS only".into());
        }
        if let Some(init) = s.initial_soc {
            c.check(s.soc_min <= init && init <= s.soc_max, "STORAGE_INITIAL_SOC", || {
                format!("{} initial_soc {init} outside [{}, {}]", s.kind, s.soc_min, s.soc_max)
            });
        }
        if let Some(max) = s.max_energy {
            c.check(max >= 0.0, "STORAGE_CAPACITY", || format!("{} max_energy must be non-negative", s.kind));
        }
    }

    if let Some(b) = &inst.budgets {
        for comp in inst.components() {
            let id = inst.component_id(comp);
            let (gi, gd) = b.windows(id);
            c.check(gi >= gd, "BUDGET_WINDOWS", || format!("{id}: gamma_i {gi} must be at least gamma_d {gd}"));
        }
        for o in &b.overrides {
            c.check(ids.contains(&o.id), "BUDGET_UNKNOWN_COMPONENT", || format!("override for unknown id {}", o.id));
        }
        c.check(b.delta_fraction >= 0.0 && b.delta_fraction.is_finite(), "BUDGET_DELTA", || {
            "delta_fraction must be non-negative".into()
        });
        let deltas = b.deltas(&inst.loads.nominal);
        for d in Carrier::LOADS {
            let dl = deltas.get(d);
            let l = inst.loads.nominal.get(d);
            c.check(dl.len() == period && finite_nonneg(dl), "BUDGET_DELTA", || {
                format!("{d} deviations must be {period} non-negative values")
            });
            if dl.len() == l.len() {
                c.check(dl.iter().zip(l).all(|(a, b)| a <= b), "BUDGET_DELTA", || {
                    format!("{d} deviation exceeds nominal load")
                });
            }
        }
    }

    if let Some(r) = &inst.reliability {
        let rates = std::iter::once((r.failure_rate, r.repair_rate)).chain(r.overrides.iter().map(|o| (o.failure_rate, o.repair_rate)));
        for (lambda, mu) in rates {
            c.check(lambda >= 0.0 && mu > 0.0 && lambda.is_finite(), "RELIABILITY_RATES", || {
                format!("need failure_rate >= 0 and repair_rate > 0, got {lambda} and {mu}")
            });
        }
        c.check(r.fluctuation.iter().all(|f| *f >= 0.0), "RELIABILITY_FLUCTUATION", || {
            "load fluctuations must be non-negative".into()
        });
    }
    c.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::*;

    fn codes(inst: &PlanningInstance) -> Vec<&'static str> {
        validate_instance(inst).into_iter().map(|d| d.code).collect()
    }

    fn toy_day() -> PlanningInstance {
        let mut inst = toy(24);
        inst.equipment.push(gb("gb", 10.0, 5.0, 0.9));
        inst.feeders.push(FeederSpec { id: "f".into(), capacity: 5.0, efficiency: 1.0 });
        inst
    }

    #[test]
    fn well_formed_toy_has_no_diagnostics() {
        assert!(validate_instance(&toy_day()).is_empty());
    }

    #[test]
    fn soc_order() {
        let mut inst = toy_day();
        inst.storage.push(StorageSpec {
            kind: StorageKind::Bess,
            cost_energy: 1.0,
            cost_power: 1.0,
            soc_min: 0.9,
            soc_max: 0.1,
            eta_ch: 0.9,
            eta_dis: 0.9,
            max_charge_cycles: None,
            initial_soc: None,
            max_energy: None,
        });
        assert!(codes(&inst).contains(&"STORAGE_SOC_ORDER"));
    }

    #[test]
    fn penalty_below_gas_price() {
        let mut inst = toy_day();
        inst.loads.shed_penalty.heat[7] = 15.0;
        assert_eq!(codes(&inst), vec!["PENALTY_DOMINANCE"]);
    }

    #[test]
    fn penalty_dominance_matches_tariff_scan() {
        let mut inst = toy_day();
        inst.tariffs.gas_price[3] = 999.0;
        inst.tariffs.elec_price[5] = 1000.0;
        let flagged = codes(&inst).iter().filter(|c| **c == "PENALTY_DOMINANCE").count();
        let oracle = Carrier::LOADS
            .iter()
            .filter(|&&d| {
                (0..24).any(|t| inst.loads.shed_penalty.get(d)[t] <= inst.tariffs.elec_price[t].max(inst.tariffs.gas_price[t]))
            })
            .count();
        assert_eq!(flagged, oracle);
        assert_eq!(flagged, 3);
    }

    #[test]
    fn wrong_conversion_pairs() {
        let mut inst = toy_day();
        inst.equipment[0].conversion.push(Conversion { from: Carrier::Gas, to: Carrier::Electricity, efficiency: 0.2 });
        inst.equipment[0].conversion[0].efficiency = 2.5;
        let cs = codes(&inst);
        assert!(cs.contains(&"EQUIPMENT_CONVERSION"));
        assert!(cs.contains(&"EQUIPMENT_EFFICIENCY"));
    }

    #[test]
    fn weights_and_lengths() {
        let mut inst = toy_day();
        inst.horizon.typical_day_weights = vec![300.0];
        inst.tariffs.gas_price.pop();
        let cs = codes(&inst);
        assert!(cs.contains(&"HORIZON_WEIGHTS"));
        assert!(cs.contains(&"TARIFF_LENGTH"));
    }

    #[test]
    fn budget_window_order() {
        let mut inst = toy_day();
        inst.budgets = Some(UncertaintyBudgets { gamma_n: 1, gamma_i: 1, gamma_d: 2, ..Default::default() });
        assert!(codes(&inst).contains(&"BUDGET_WINDOWS"));
    }

    #[test]
    fn feeder_efficiency_mismatch() {
        let mut inst = toy_day();
        inst.feeders.push(FeederSpec { id: "g".into(), capacity: 5.0, efficiency: 0.9 });
        assert_eq!(codes(&inst), vec!["FEEDER_EFFICIENCY_MISMATCH"]);
    }
}
