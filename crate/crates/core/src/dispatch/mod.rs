//! Energy-hub dispatch rows for the normal (0) and contingency (1) scenario copies.
//!
//! Rows are produced symbolically: the left side is linear in operation variables and the
//! right side is a sum of monomials over parameters (builds, capacities, loads, states,
//! charging modes). Binding the parameters to constants or model variables turns the same
//! rows into a primal MILP block, a parametric LP for dualization, or a KKT system.

mod block;
mod operate;

use std::fmt;

use crate::model::{Carrier, CarrierSeries, PlanningInstance, StorageKind};

pub use block::{
    add_block, add_investment, materialize, materialize_all, objective_terms, Binding, Bindings, Block, BindError,
    InvestmentVars, LinRow, ObjectiveTerms,
};
pub use operate::{min_shed_dispatch, normal_dispatch, DispatchError, Secondary, ShedDispatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpVar {
    Substation { sc: u8, t: usize },
    Equipment { sc: u8, n: usize, t: usize },
    Charge { sc: u8, k: usize, t: usize },
    Discharge { sc: u8, k: usize, t: usize },
    Energy { sc: u8, k: usize, t: usize },
    /// Charging-state binary Z.
    Mode { sc: u8, k: usize, t: usize },
    Shed { d: usize, t: usize },
    /// Elastic slack on normal-scenario balances, used only by feasibility checks.
    Unserved { d: usize, t: usize },
}

impl OpVar {
    pub fn scenario(self) -> u8 {
        match self {
            OpVar::Substation { sc, .. }
            | OpVar::Equipment { sc, .. }
            | OpVar::Charge { sc, .. }
            | OpVar::Discharge { sc, .. }
            | OpVar::Energy { sc, .. }
            | OpVar::Mode { sc, .. } => sc,
            OpVar::Shed { .. } => 1,
            OpVar::Unserved { .. } => 0,
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, OpVar::Mode { .. })
    }
}

impl fmt::Display for OpVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OpVar::Substation { sc, t } => write!(f, "psub{sc}[{t}]"),
            OpVar::Equipment { sc, n, t } => write!(f, "p{sc}[{n},{t}]"),
            OpVar::Charge { sc, k, t } => write!(f, "pch{sc}[{k},{t}]"),
            OpVar::Discharge { sc, k, t } => write!(f, "pdis{sc}[{k},{t}]"),
            OpVar::Energy { sc, k, t } => write!(f, "e{sc}[{k},{t}]"),
            OpVar::Mode { sc, k, t } => write!(f, "z{sc}[{k},{t}]"),
            OpVar::Shed { d, t } => write!(f, "shed[{},{t}]", Carrier::LOADS[d].short()),
            OpVar::Unserved { d, t } => write!(f, "unserved[{},{t}]", Carrier::LOADS[d].short()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Build(usize),
    EnergyCap(usize),
    PowerCap(usize),
    Charging { sc: u8, k: usize, t: usize },
    LoadUp { d: usize, t: usize },
    LoadDown { d: usize, t: usize },
    /// Component availability, indexed as in `PlanningInstance::components`.
    State { c: usize, t: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub factors: Vec<Param>,
}

impl Monomial {
    pub fn constant(coef: f64) -> Self {
        Monomial { coef, factors: Vec::new() }
    }

    pub fn of(coef: f64, factors: &[Param]) -> Self {
        Monomial { coef, factors: factors.to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Balance(usize),
    EquipmentCap,
    SubstationCap,
    Cycle,
    SocLow,
    SocHigh,
    /// Contingency copy: E ≤ X_E.
    EnergyLimit,
    ChargeCap,
    DischargeCap,
    /// Big-M halves of the split charge/discharge caps.
    ModeCharge,
    ModeDischarge,
    EnergyBalance,
    Terminal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Ge,
    Eq,
}

/// `Σ terms (sense) Σ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub family: Family,
    pub sc: u8,
    /// Storage index for storage families.
    pub storage: Option<usize>,
    pub name: String,
    pub terms: Vec<(OpVar, f64)>,
    pub sense: RowSense,
    pub rhs: Vec<Monomial>,
}

impl Row {
    /// Index of the dual multiplier π that this row carries, where one exists.
    pub fn dual_symbol(&self, instance: &PlanningInstance) -> Option<u8> {
        let kind = self.storage.map(|k| instance.storage[k].kind);
        let tess = kind == Some(StorageKind::Tess);
        let off = |b: u8, t: u8| Some(if tess { t } else { b });
        match (self.sc, self.family) {
            (0, Family::Balance(d)) => Some(1 + d as u8),
            (0, Family::EquipmentCap) => Some(4),
            (0, Family::SubstationCap) => Some(5),
            (0, Family::Cycle) => Some(6),
            (0, Family::SocLow) => off(7, 9),
            (0, Family::SocHigh) => off(8, 10),
            (0, Family::ChargeCap) => off(11, 13),
            (0, Family::DischargeCap) => off(12, 14),
            (0, Family::EnergyBalance) => off(15, 16),
            (1, Family::Balance(d)) => Some(17 + d as u8),
            (1, Family::EquipmentCap) => Some(20),
            (1, Family::SubstationCap) => Some(21),
            (1, Family::EnergyLimit) => off(22, 23),
            (1, Family::ChargeCap) => off(24, 26),
            (1, Family::DischargeCap) => off(25, 27),
            (1, Family::EnergyBalance) => off(28, 29),
            _ => None,
        }
    }
}

/// How the storage charge/discharge caps are written.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChargeCaps {
    /// P_ch ≤ M·Z, P_dis ≤ M(1−Z), P ≤ X_P, with Z an operation variable.
    Split { big_m: f64 },
    /// P_ch ≤ X_P·Z, P_dis ≤ X_P(1−Z), with Z a parameter.
    Merged,
}

/// Which operation costs enter the objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostSpec {
    pub operate: bool,
    pub shed: bool,
    pub unserved: f64,
    pub scale: f64,
}

impl CostSpec {
    /// f_ope0 + f_shed1.
    pub fn standard() -> Self {
        CostSpec { operate: true, shed: true, unserved: 0.0, scale: 1.0 }
    }

    /// Total unserved energy of the normal copy.
    pub fn feasibility() -> Self {
        CostSpec { operate: false, shed: false, unserved: 1.0, scale: 1.0 }
    }

    pub fn shed_only() -> Self {
        CostSpec { operate: false, shed: true, unserved: 0.0, scale: 1.0 }
    }
}

/// A dispatch problem shape: which scenario copies, which loads, and how caps are written.
#[derive(Clone, Debug)]
pub struct Formulation<'a> {
    pub instance: &'a PlanningInstance,
    pub normal: bool,
    pub contingency: bool,
    pub nominal: CarrierSeries,
    pub delta: CarrierSeries,
    pub caps: ChargeCaps,
    pub elastic: bool,
    /// Overrides the start-of-day energy of each storage with a constant.
    pub initial_energy: Option<Vec<f64>>,
}

impl<'a> Formulation<'a> {
    pub fn new(instance: &'a PlanningInstance) -> Self {
        Formulation {
            instance,
            normal: true,
            contingency: true,
            nominal: instance.loads.nominal.clone(),
            delta: CarrierSeries::zeros(instance.period()),
            caps: ChargeCaps::Split { big_m: instance.big_m() },
            elastic: false,
            initial_energy: None,
        }
    }

    pub fn normal_only(mut self) -> Self {
        self.contingency = false;
        self
    }

    pub fn contingency_only(mut self) -> Self {
        self.normal = false;
        self
    }

    pub fn with_loads(mut self, nominal: CarrierSeries, delta: CarrierSeries) -> Self {
        self.nominal = nominal;
        self.delta = delta;
        self
    }

    pub fn merged(mut self) -> Self {
        self.caps = ChargeCaps::Merged;
        self
    }

    pub fn elastic(mut self) -> Self {
        self.elastic = true;
        self
    }

    fn scenarios(&self) -> Vec<u8> {
        let mut s = Vec::new();
        if self.normal {
            s.push(0);
        }
        if self.contingency {
            s.push(1);
        }
        s
    }

    /// Operation variables in a fixed order.
    pub fn columns(&self) -> Vec<OpVar> {
        let inst = self.instance;
        let period = inst.period();
        let mut cols = Vec::new();
        for sc in self.scenarios() {
            for t in 0..period {
                cols.push(OpVar::Substation { sc, t });
                for n in 0..inst.equipment.len() {
                    cols.push(OpVar::Equipment { sc, n, t });
                }
                for k in 0..inst.storage.len() {
                    cols.push(OpVar::Charge { sc, k, t });
                    cols.push(OpVar::Discharge { sc, k, t });
                    cols.push(OpVar::Energy { sc, k, t });
                    if matches!(self.caps, ChargeCaps::Split { .. }) {
                        cols.push(OpVar::Mode { sc, k, t });
                    }
                }
                for d in 0..3 {
                    if sc == 1 {
                        cols.push(OpVar::Shed { d, t });
                    } else if self.elastic {
                        cols.push(OpVar::Unserved { d, t });
                    }
                }
            }
        }
        cols
    }

    /// Objective coefficient of an operation variable.
    pub fn cost(&self, v: OpVar, spec: &CostSpec) -> f64 {
        let inst = self.instance;
        let weight = |t: usize| inst.horizon.hour_weight(t).unwrap_or(0.0) * spec.scale;
        let c = match v {
            OpVar::Substation { sc: 0, t } if spec.operate => weight(t) * inst.tariffs.elec_price[t],
            OpVar::Equipment { sc: 0, n, t } if spec.operate && inst.equipment[n].burns_gas() => {
                weight(t) * inst.tariffs.gas_price[t]
            }
            OpVar::Shed { d, t } if spec.shed => weight(t) * inst.loads.shed_penalty.by_index(d)[t],
            OpVar::Unserved { .. } => spec.unserved * spec.scale,
            _ => 0.0,
        };
        c
    }

    /// Every row of the selected scenario copies.
    pub fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for sc in self.scenarios() {
            self.balance_rows(sc, &mut rows);
            self.capacity_rows(sc, &mut rows);
            for k in 0..self.instance.storage.len() {
                self.storage_rows(sc, k, &mut rows);
            }
        }
        rows
    }

    fn balance_rows(&self, sc: u8, rows: &mut Vec<Row>) {
        let inst = self.instance;
        let c_sub = inst.substation_efficiency();
        for t in 0..inst.period() {
            for (d, carrier) in Carrier::LOADS.into_iter().enumerate() {
                let mut terms = Vec::new();
                if carrier == Carrier::Electricity && !inst.feeders.is_empty() {
                    terms.push((OpVar::Substation { sc, t }, c_sub));
                }
                for (n, e) in inst.equipment.iter().enumerate() {
                    let a = e.coefficient(carrier);
                    if a != 0.0 {
                        terms.push((OpVar::Equipment { sc, n, t }, a));
                    }
                }
                for (k, s) in inst.storage.iter().enumerate() {
                    if s.kind.carrier() == carrier {
                        terms.push((OpVar::Discharge { sc, k, t }, 1.0));
                        terms.push((OpVar::Charge { sc, k, t }, -1.0));
                    }
                }
                if sc == 1 {
                    terms.push((OpVar::Shed { d, t }, 1.0));
                } else if self.elastic {
                    terms.push((OpVar::Unserved { d, t }, 1.0));
                }
                let l = self.nominal.by_index(d)[t];
                let dl = self.delta.by_index(d)[t];
                let mut rhs = vec![Monomial::constant(l)];
                if dl != 0.0 {
                    rhs.push(Monomial::of(dl, &[Param::LoadUp { d, t }]));
                    rhs.push(Monomial::of(-dl, &[Param::LoadDown { d, t }]));
                }
                rows.push(Row {
                    family: Family::Balance(d),
                    sc,
                    storage: None,
                    name: format!("bal{sc}_{}[{t}]", carrier.short()),
                    terms,
                    sense: RowSense::Ge,
                    rhs,
                });
            }
        }
    }

    fn capacity_rows(&self, sc: u8, rows: &mut Vec<Row>) {
        let inst = self.instance;
        let ne = inst.equipment.len();
        for t in 0..inst.period() {
            for (n, e) in inst.equipment.iter().enumerate() {
                let mut factors = vec![Param::Build(n)];
                if sc == 1 {
                    factors.push(Param::State { c: n, t });
                }
                rows.push(Row {
                    family: Family::EquipmentCap,
                    sc,
                    storage: None,
                    name: format!("cap{sc}[{n},{t}]"),
                    terms: vec![(OpVar::Equipment { sc, n, t }, -1.0)],
                    sense: RowSense::Ge,
                    rhs: vec![Monomial::of(-e.capacity, &factors)],
                });
            }
            let rhs = if sc == 1 {
                inst.feeders
                    .iter()
                    .enumerate()
                    .map(|(f, spec)| Monomial::of(-spec.capacity, &[Param::State { c: ne + f, t }]))
                    .collect()
            } else {
                vec![Monomial::constant(-inst.feeder_capacity())]
            };
            rows.push(Row {
                family: Family::SubstationCap,
                sc,
                storage: None,
                name: format!("sub{sc}[{t}]"),
                terms: vec![(OpVar::Substation { sc, t }, -1.0)],
                sense: RowSense::Ge,
                rhs,
            });
        }
    }

    fn storage_rows(&self, sc: u8, k: usize, rows: &mut Vec<Row>) {
        let inst = self.instance;
        let spec = &inst.storage[k];
        let h = &inst.horizon;
        let row = |family, name: String, terms, sense, rhs| Row { family, sc, storage: Some(k), name, terms, sense, rhs };
        let cap = |coef: f64| Monomial::of(coef, &[Param::EnergyCap(k)]);
        for day in 0..h.days() {
            let hours = h.day_hours(day);
            if let (Some(cycles), true) = (spec.max_charge_cycles, spec.kind == StorageKind::Bess) {
                rows.push(row(
                    Family::Cycle,
                    format!("cycle{sc}[{k},{day}]"),
                    hours.clone().map(|t| (OpVar::Charge { sc, k, t }, -1.0)).collect(),
                    RowSense::Ge,
                    vec![cap(-cycles)],
                ));
            }
            for t in hours.clone() {
                let e = OpVar::Energy { sc, k, t };
                let (ch, dis) = (OpVar::Charge { sc, k, t }, OpVar::Discharge { sc, k, t });
                if sc == 0 {
                    rows.push(row(Family::SocLow, format!("soclo{sc}[{k},{t}]"), vec![(e, 1.0)], RowSense::Ge, vec![cap(spec.soc_min)]));
                    rows.push(row(Family::SocHigh, format!("sochi{sc}[{k},{t}]"), vec![(e, -1.0)], RowSense::Ge, vec![cap(-spec.soc_max)]));
                } else {
                    rows.push(row(Family::EnergyLimit, format!("elim{sc}[{k},{t}]"), vec![(e, -1.0)], RowSense::Ge, vec![cap(-1.0)]));
                }
                let z = Param::Charging { sc, k, t };
                match self.caps {
                    ChargeCaps::Merged => {
                        rows.push(row(
                            Family::ChargeCap,
                            format!("chcap{sc}[{k},{t}]"),
                            vec![(ch, -1.0)],
                            RowSense::Ge,
                            vec![Monomial::of(-1.0, &[Param::PowerCap(k), z])],
                        ));
                        rows.push(row(
                            Family::DischargeCap,
                            format!("discap{sc}[{k},{t}]"),
                            vec![(dis, -1.0)],
                            RowSense::Ge,
                            vec![Monomial::of(-1.0, &[Param::PowerCap(k)]), Monomial::of(1.0, &[Param::PowerCap(k), z])],
                        ));
                    }
                    ChargeCaps::Split { big_m } => {
                        let mode = OpVar::Mode { sc, k, t };
                        rows.push(row(Family::ModeCharge, format!("zch{sc}[{k},{t}]"), vec![(ch, -1.0), (mode, big_m)], RowSense::Ge, vec![]));
                        rows.push(row(
                            Family::ModeDischarge,
                            format!("zdis{sc}[{k},{t}]"),
                            vec![(dis, -1.0), (mode, -big_m)],
                            RowSense::Ge,
                            vec![Monomial::constant(-big_m)],
                        ));
                        rows.push(row(Family::ChargeCap, format!("chcap{sc}[{k},{t}]"), vec![(ch, -1.0)], RowSense::Ge, vec![Monomial::of(-1.0, &[Param::PowerCap(k)])]));
                        rows.push(row(Family::DischargeCap, format!("discap{sc}[{k},{t}]"), vec![(dis, -1.0)], RowSense::Ge, vec![Monomial::of(-1.0, &[Param::PowerCap(k)])]));
                    }
                }
                // E_t − E_{t−1} − η_ch·P_ch + P_dis/η_dis = 0, with E_{t−1} the day's initial energy at the first hour
                let mut terms = vec![(e, 1.0), (ch, -spec.eta_ch), (dis, 1.0 / spec.eta_dis)];
                let mut rhs = Vec::new();
                if t == hours.start {
                    rhs.push(self.initial(k));
                } else {
                    terms.push((OpVar::Energy { sc, k, t: t - 1 }, -1.0));
                }
                rows.push(row(Family::EnergyBalance, format!("ebal{sc}[{k},{t}]"), terms, RowSense::Eq, rhs));
            }
            if h.cyclic_soc {
                rows.push(row(
                    Family::Terminal,
                    format!("cyclic{sc}[{k},{day}]"),
                    vec![(OpVar::Energy { sc, k, t: hours.end - 1 }, 1.0)],
                    RowSense::Eq,
                    vec![self.initial(k)],
                ));
            }
        }
    }

    fn initial(&self, k: usize) -> Monomial {
        match &self.initial_energy {
            Some(e) => Monomial::constant(e[k]),
            None => Monomial::of(self.instance.storage[k].initial_fraction(), &[Param::EnergyCap(k)]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::*;

    fn bess(cycles: Option<f64>) -> StorageSpec {
        StorageSpec {
            kind: StorageKind::Bess,
            cost_energy: 1.0,
            cost_power: 1.0,
            soc_min: 0.1,
            soc_max: 0.9,
            eta_ch: 0.9,
            eta_dis: 0.9,
            max_charge_cycles: cycles,
            initial_soc: None,
            max_energy: None,
        }
    }

    #[test]
    fn row_counts_per_scenario() {
        let mut inst = toy(3);
        inst.equipment.push(gb("gb", 10.0, 1.0, 0.9));
        inst.feeders.push(FeederSpec { id: "f".into(), capacity: 5.0, efficiency: 1.0 });
        inst.storage.push(bess(Some(2.0)));
        let f = Formulation::new(&inst).merged();
        let rows = f.rows();
        let count = |sc: u8, fam: Family| rows.iter().filter(|r| r.sc == sc && r.family == fam).count();
        assert_eq!(count(0, Family::Balance(0)), 3);
        assert_eq!(count(0, Family::Cycle), 1);
        assert_eq!(count(1, Family::Cycle), 1);
        assert_eq!(count(0, Family::SocLow), 3);
        assert_eq!(count(1, Family::SocLow), 0);
        assert_eq!(count(1, Family::EnergyLimit), 3);
        assert_eq!(count(1, Family::EnergyBalance), 3);
    }

    #[test]
    fn every_row_has_a_dual_symbol_except_documented_extras() {
        let mut inst = toy(2);
        inst.equipment.push(cchp("c", 10.0, 1.0));
        inst.feeders.push(FeederSpec { id: "f".into(), capacity: 5.0, efficiency: 1.0 });
        inst.storage.push(bess(Some(1.0)));
        let mut tess = bess(None);
        tess.kind = StorageKind::Tess;
        inst.storage.push(tess);
        let rows = Formulation::new(&inst).merged().rows();
        let mut seen = std::collections::BTreeSet::new();
        for r in &rows {
            match r.dual_symbol(&inst) {
                Some(s) => {
                    seen.insert(s);
                }
                None => assert!(r.sc == 1 && r.family == Family::Cycle, "unmapped row {}", r.name),
            }
        }
        assert_eq!(seen, (1..=29).collect());
    }

    #[test]
    fn columns_cover_row_terms() {
        let mut inst = toy(2);
        inst.equipment.push(ec("ec", 4.0, 1.0, 1.5));
        inst.storage.push(bess(None));
        for f in [Formulation::new(&inst), Formulation::new(&inst).merged().elastic()] {
            let cols: std::collections::HashSet<_> = f.columns().into_iter().collect();
            for r in f.rows() {
                for (v, _) in &r.terms {
                    assert!(cols.contains(v), "{v} missing");
                }
            }
        }
    }
}
