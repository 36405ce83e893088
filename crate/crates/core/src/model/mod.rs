//! Static planning data, first- and second-stage decision types, and cost arithmetic.

mod io;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{from_toml_str, load_instance, to_toml_string, InstanceIoError};
pub use validate::{validate_instance, Diagnostic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Electricity,
    Heat,
    Cooling,
    Gas,
}

impl Carrier {
    /// Carriers that carry demand. Gas is an input only.
    pub const LOADS: [Carrier; 3] = [Carrier::Electricity, Carrier::Heat, Carrier::Cooling];

    pub fn load_index(self) -> Option<usize> {
        match self {
            Carrier::Electricity => Some(0),
            Carrier::Heat => Some(1),
            Carrier::Cooling => Some(2),
            Carrier::Gas => None,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Carrier::Electricity => "e",
            Carrier::Heat => "h",
            Carrier::Cooling => "c",
            Carrier::Gas => "g",
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Carrier::Electricity => "electricity",
            Carrier::Heat => "heat",
            Carrier::Cooling => "cooling",
            Carrier::Gas => "gas",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquipmentKind {
    #[serde(rename = "CCHP")]
    Cchp,
    #[serde(rename = "GB")]
    Gb,
    #[serde(rename = "EC")]
    Ec,
}

impl EquipmentKind {
    pub fn input(self) -> Carrier {
        match self {
            EquipmentKind::Cchp | EquipmentKind::Gb => Carrier::Gas,
            EquipmentKind::Ec => Carrier::Electricity,
        }
    }

    pub fn outputs(self) -> &'static [Carrier] {
        match self {
            EquipmentKind::Cchp => &[Carrier::Electricity, Carrier::Heat, Carrier::Cooling],
            EquipmentKind::Gb => &[Carrier::Heat],
            EquipmentKind::Ec => &[Carrier::Cooling],
        }
    }
}

impl fmt::Display for EquipmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquipmentKind::Cchp => "CCHP",
            EquipmentKind::Gb => "GB",
            EquipmentKind::Ec => "EC",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conversion {
    pub from: Carrier,
    pub to: Carrier,
    pub efficiency: f64,
}

/// A candidate unit. `capacity` bounds its input power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquipmentOption {
    pub id: String,
    pub kind: EquipmentKind,
    pub capacity: f64,
    pub invest_cost: f64,
    pub conversion: Vec<Conversion>,
}

impl EquipmentOption {
    /// Net output per unit of input power for a load carrier.
    pub fn coefficient(&self, d: Carrier) -> f64 {
        let out: f64 = self.conversion.iter().filter(|c| c.to == d).map(|c| c.efficiency).sum();
        if self.kind.input() == d {
            out - 1.0
        } else {
            out
        }
    }

    pub fn burns_gas(&self) -> bool {
        self.kind.input() == Carrier::Gas
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeederSpec {
    pub id: String,
    pub capacity: f64,
    pub efficiency: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StorageKind {
    #[serde(rename = "BESS")]
    Bess,
    #[serde(rename = "TESS")]
    Tess,
}

impl StorageKind {
    pub fn carrier(self) -> Carrier {
        match self {
            StorageKind::Bess => Carrier::Electricity,
            StorageKind::Tess => Carrier::Heat,
        }
    }
}

impl fmt::Display for StorageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StorageKind::Bess => "BESS",
            StorageKind::Tess => "TESS",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSpec {
    pub kind: StorageKind,
    pub cost_energy: f64,
    #[serde(default)]
    pub cost_power: f64,
    pub soc_min: f64,
    pub soc_max: f64,
    pub eta_ch: f64,
    pub eta_dis: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_charge_cycles: Option<f64>,
    /// Energy at the start of every day as a fraction of X_E; defaults to `soc_min`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_soc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_energy: Option<f64>,
}

impl StorageSpec {
    pub fn initial_fraction(&self) -> f64 {
        self.initial_soc.unwrap_or(self.soc_min)
    }

    /// TESS power is tied to half its energy capacity.
    pub fn has_power_variable(&self) -> bool {
        self.kind == StorageKind::Bess
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    #[serde(default = "default_hours_per_day")]
    pub hours_per_day: usize,
    pub typical_day_weights: Vec<f64>,
    pub planning_years: u32,
    pub discount_rate: f64,
    #[serde(default)]
    pub cyclic_soc: bool,
}

fn default_hours_per_day() -> usize {
    24
}

impl Horizon {
    pub fn period(&self) -> usize {
        self.hours_per_day * self.typical_day_weights.len()
    }

    pub fn days(&self) -> usize {
        self.typical_day_weights.len()
    }

    pub fn day_of(&self, t: usize) -> usize {
        t / self.hours_per_day
    }

    pub fn day_hours(&self, day: usize) -> std::ops::Range<usize> {
        day * self.hours_per_day..(day + 1) * self.hours_per_day
    }

    pub fn discount_factor(&self) -> Result<f64, DomainError> {
        discount_factor(self.planning_years, self.discount_rate)
    }

    /// Present-value weight of one hour of operation at hour `t`.
    pub fn hour_weight(&self, t: usize) -> Result<f64, DomainError> {
        Ok(self.discount_factor()? * self.typical_day_weights[self.day_of(t)] / 365.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TariffSeries {
    pub elec_price: Vec<f64>,
    pub gas_price: Vec<f64>,
}

/// One value per load carrier per hour.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSeries {
    pub electricity: Vec<f64>,
    pub heat: Vec<f64>,
    pub cooling: Vec<f64>,
}

impl CarrierSeries {
    pub fn zeros(hours: usize) -> Self {
        CarrierSeries { electricity: vec![0.0; hours], heat: vec![0.0; hours], cooling: vec![0.0; hours] }
    }

    pub fn get(&self, d: Carrier) -> &[f64] {
        match d {
            Carrier::Electricity => &self.electricity,
            Carrier::Heat => &self.heat,
            Carrier::Cooling => &self.cooling,
            Carrier::Gas => &[],
        }
    }

    pub fn get_mut(&mut self, d: Carrier) -> &mut Vec<f64> {
        match d {
            Carrier::Electricity => &mut self.electricity,
            Carrier::Heat => &mut self.heat,
            Carrier::Cooling => &mut self.cooling,
            Carrier::Gas => panic!("gas carries no load"),
        }
    }

    pub fn by_index(&self, i: usize) -> &[f64] {
        self.get(Carrier::LOADS[i])
    }

    pub fn total(&self) -> f64 {
        Carrier::LOADS.iter().flat_map(|&d| self.get(d)).sum()
    }

    pub fn map(&self, f: impl Fn(Carrier, usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for d in Carrier::LOADS {
            for (t, v) in out.get_mut(d).iter_mut().enumerate() {
                *v = f(d, t, *v);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProfile {
    pub nominal: CarrierSeries,
    pub shed_penalty: CarrierSeries,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalScope {
    #[default]
    PerComponent,
    Global,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadBudgetScope {
    #[default]
    PerCarrier,
    Global,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentBudget {
    pub id: String,
    pub gamma_i: usize,
    pub gamma_d: usize,
}

/// Budgets for the contingency set and the load set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyBudgets {
    pub gamma_n: usize,
    pub gamma_i: usize,
    pub gamma_d: usize,
    pub gamma_l: usize,
    /// Per-hour deviation as a fraction of nominal load, used when `delta_load` is absent.
    #[serde(default)]
    pub delta_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_load: Option<CarrierSeries>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<ComponentBudget>,
    #[serde(default)]
    pub interval_scope: IntervalScope,
    #[serde(default)]
    pub load_scope: LoadBudgetScope,
}

impl Default for UncertaintyBudgets {
    fn default() -> Self {
        UncertaintyBudgets {
            gamma_n: 0,
            gamma_i: 0,
            gamma_d: 0,
            gamma_l: 0,
            delta_fraction: 0.0,
            delta_load: None,
            overrides: Vec::new(),
            interval_scope: IntervalScope::PerComponent,
            load_scope: LoadBudgetScope::PerCarrier,
        }
    }
}

impl UncertaintyBudgets {
    /// (Γ^I, Γ^D) for a component id.
    pub fn windows(&self, id: &str) -> (usize, usize) {
        self.overrides
            .iter()
            .find(|o| o.id == id)
            .map(|o| (o.gamma_i, o.gamma_d))
            .unwrap_or((self.gamma_i, self.gamma_d))
    }

    pub fn deltas(&self, nominal: &CarrierSeries) -> CarrierSeries {
        match &self.delta_load {
            Some(d) => d.clone(),
            None => nominal.map(|_, _, v| v * self.delta_fraction),
        }
    }

    pub fn is_nominal_only(&self) -> bool {
        let no_contingency = self.gamma_n == 0
            || (self.gamma_d == 0 && self.overrides.iter().all(|o| o.gamma_d == 0));
        no_contingency && self.gamma_l == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRates {
    pub id: String,
    pub failure_rate: f64,
    pub repair_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReliabilityModel {
    pub failure_rate: f64,
    pub repair_rate: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<ComponentRates>,
    /// Relative standard deviation of each load carrier.
    pub fluctuation: [f64; 3],
}

impl Default for ReliabilityModel {
    fn default() -> Self {
        ReliabilityModel { failure_rate: 0.0, repair_rate: 1.0, overrides: Vec::new(), fluctuation: [0.0; 3] }
    }
}

impl ReliabilityModel {
    pub fn rates(&self, id: &str) -> (f64, f64) {
        self.overrides
            .iter()
            .find(|o| o.id == id)
            .map(|o| (o.failure_rate, o.repair_rate))
            .unwrap_or((self.failure_rate, self.repair_rate))
    }
}

/// The full input to a planning run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningInstance {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub horizon: Horizon,
    pub tariffs: TariffSeries,
    pub loads: LoadProfile,
    #[serde(default)]
    pub equipment: Vec<EquipmentOption>,
    #[serde(default)]
    pub feeders: Vec<FeederSpec>,
    #[serde(default)]
    pub storage: Vec<StorageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<UncertaintyBudgets>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability: Option<ReliabilityModel>,
}

/// A component that can fail: equipment options first, then feeders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Equipment(usize),
    Feeder(usize),
}

impl PlanningInstance {
    pub fn period(&self) -> usize {
        self.horizon.period()
    }

    pub fn components(&self) -> Vec<Component> {
        (0..self.equipment.len())
            .map(Component::Equipment)
            .chain((0..self.feeders.len()).map(Component::Feeder))
            .collect()
    }

    pub fn component_id(&self, c: Component) -> &str {
        match c {
            Component::Equipment(n) => &self.equipment[n].id,
            Component::Feeder(f) => &self.feeders[f].id,
        }
    }

    /// Common substation efficiency; 1 with no feeders.
    pub fn substation_efficiency(&self) -> f64 {
        self.feeders.first().map(|f| f.efficiency).unwrap_or(1.0)
    }

    pub fn feeder_capacity(&self) -> f64 {
        self.feeders.iter().map(|f| f.capacity).sum()
    }

    /// Largest power any single flow can reach; used as the storage big-M.
    pub fn big_m(&self) -> f64 {
        let gen: f64 = self
            .equipment
            .iter()
            .map(|e| e.capacity * e.conversion.iter().map(|c| c.efficiency).fold(1.0, f64::max))
            .sum();
        (self.feeder_capacity() + gen).max(1.0)
    }

    pub fn discount_factor(&self) -> Result<f64, DomainError> {
        self.horizon.discount_factor()
    }

    pub fn budgets(&self) -> UncertaintyBudgets {
        self.budgets.clone().unwrap_or_default()
    }

    pub fn storage_of(&self, kind: StorageKind) -> Option<usize> {
        self.storage.iter().position(|s| s.kind == kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageCapacity {
    pub energy: f64,
    pub power: f64,
}

/// First-stage answer: which options to build and storage sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestmentDecision {
    pub build: Vec<bool>,
    pub storage: Vec<StorageCapacity>,
}

impl InvestmentDecision {
    pub fn empty(instance: &PlanningInstance) -> Self {
        InvestmentDecision {
            build: vec![false; instance.equipment.len()],
            storage: vec![StorageCapacity { energy: 0.0, power: 0.0 }; instance.storage.len()],
        }
    }

    pub fn invest_cost(&self, instance: &PlanningInstance) -> f64 {
        let equip: f64 = instance
            .equipment
            .iter()
            .zip(&self.build)
            .filter(|(_, &b)| b)
            .map(|(e, _)| e.invest_cost)
            .sum();
        let ess: f64 = instance
            .storage
            .iter()
            .zip(&self.storage)
            .map(|(s, c)| s.cost_energy * c.energy + s.cost_power * c.power)
            .sum();
        equip + ess
    }

    /// Stable short string used to detect repeated decisions.
    pub fn fingerprint(&self) -> String {
        let bits: String = self.build.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let ess: Vec<String> = self.storage.iter().map(|s| format!("{:.6}/{:.6}", s.energy, s.power)).collect();
        format!("{bits}|{}", ess.join(","))
    }
}

/// Operation of one scenario copy.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioOperation {
    pub substation: Vec<f64>,
    /// `equipment[n][t]`, input power.
    pub equipment: Vec<Vec<f64>>,
    pub charge: Vec<Vec<f64>>,
    pub discharge: Vec<Vec<f64>>,
    pub energy: Vec<Vec<f64>>,
    pub charging: Vec<Vec<bool>>,
    pub shed: CarrierSeries,
}

impl ScenarioOperation {
    pub fn zeros(instance: &PlanningInstance) -> Self {
        let t = instance.period();
        let k = instance.storage.len();
        ScenarioOperation {
            substation: vec![0.0; t],
            equipment: vec![vec![0.0; t]; instance.equipment.len()],
            charge: vec![vec![0.0; t]; k],
            discharge: vec![vec![0.0; t]; k],
            energy: vec![vec![0.0; t]; k],
            charging: vec![vec![false; t]; k],
            shed: CarrierSeries::zeros(t),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * alpha).collect::<Vec<_>>();
        let ss = |v: &Vec<Vec<f64>>| v.iter().map(s).collect::<Vec<_>>();
        ScenarioOperation {
            substation: s(&self.substation),
            equipment: ss(&self.equipment),
            charge: ss(&self.charge),
            discharge: ss(&self.discharge),
            energy: ss(&self.energy),
            charging: self.charging.clone(),
            shed: self.shed.map(|_, _, v| v * alpha),
        }
    }

    pub fn hours(&self) -> usize {
        self.substation.len()
    }
}

/// Second-stage operation: index 0 is the normal scenario, index 1 the contingency one.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperationPlan {
    pub scenarios: [ScenarioOperation; 2],
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub invest: f64,
    pub operate: f64,
    pub shed: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(invest: f64, operate: f64, shed: f64) -> Self {
        CostBreakdown { invest, operate, shed, total: invest + operate + shed }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("planning years must be at least 1, got {0}")]
    PlanningYears(u32),
    #[error("discount rate must be non-negative and finite, got {0}")]
    DiscountRate(f64),
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension { what: String, expected: usize, got: usize },
}

/// m = Σ_{yr=1..PP} 365 / (1+γ)^(yr−1).
pub fn discount_factor(years: u32, rate: f64) -> Result<f64, DomainError> {
    if years < 1 {
        return Err(DomainError::PlanningYears(years));
    }
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(DomainError::DiscountRate(rate));
    }
    let mut m = 0.0;
    let mut factor = 1.0;
    for _ in 0..years {
        m += 365.0 / factor;
        factor *= 1.0 + rate;
    }
    Ok(m)
}

fn check_len(what: &str, expected: usize, got: usize) -> Result<(), DomainError> {
    if expected != got {
        return Err(DomainError::Dimension { what: what.to_string(), expected, got });
    }
    Ok(())
}

fn check_operation(instance: &PlanningInstance, op: &ScenarioOperation, sc: usize) -> Result<(), DomainError> {
    let t = instance.period();
    check_len(&format!("scenario {sc} substation"), t, op.substation.len())?;
    check_len(&format!("scenario {sc} equipment"), instance.equipment.len(), op.equipment.len())?;
    for row in &op.equipment {
        check_len(&format!("scenario {sc} equipment hours"), t, row.len())?;
    }
    for d in Carrier::LOADS {
        check_len(&format!("scenario {sc} {d} shed"), t, op.shed.get(d).len())?;
    }
    Ok(())
}

/// Operating cost of the normal scenario under the instance tariffs.
pub fn operating_cost(instance: &PlanningInstance, op: &ScenarioOperation) -> Result<f64, DomainError> {
    let mut total = 0.0;
    for t in 0..instance.period() {
        let w = instance.horizon.hour_weight(t)?;
        let gas: f64 = instance
            .equipment
            .iter()
            .zip(&op.equipment)
            .filter(|(e, _)| e.burns_gas())
            .map(|(_, p)| p[t])
            .sum();
        total += w * (op.substation[t] * instance.tariffs.elec_price[t] + gas * instance.tariffs.gas_price[t]);
    }
    Ok(total)
}

/// Penalised cost of shed load.
pub fn shed_cost(instance: &PlanningInstance, op: &ScenarioOperation) -> Result<f64, DomainError> {
    let mut total = 0.0;
    for t in 0..instance.period() {
        let w = instance.horizon.hour_weight(t)?;
        for d in Carrier::LOADS {
            total += w * op.shed.get(d)[t] * instance.loads.shed_penalty.get(d)[t];
        }
    }
    Ok(total)
}

pub fn evaluate_cost(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    plan: &OperationPlan,
) -> Result<CostBreakdown, DomainError> {
    check_len("build vector", instance.equipment.len(), decision.build.len())?;
    check_len("storage capacities", instance.storage.len(), decision.storage.len())?;
    check_operation(instance, &plan.scenarios[0], 0)?;
    check_operation(instance, &plan.scenarios[1], 1)?;
    Ok(CostBreakdown::new(
        decision.invest_cost(instance),
        operating_cost(instance, &plan.scenarios[0])?,
        shed_cost(instance, &plan.scenarios[1])?,
    ))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

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

    pub fn toy(hours: usize) -> PlanningInstance {
        PlanningInstance {
            name: "toy".into(),
            horizon: Horizon {
                hours_per_day: hours,
                typical_day_weights: vec![365.0],
                planning_years: 1,
                discount_rate: 0.0,
                cyclic_soc: false,
            },
            tariffs: TariffSeries { elec_price: vec![50.0; hours], gas_price: vec![20.0; hours] },
            loads: LoadProfile {
                nominal: CarrierSeries::zeros(hours),
                shed_penalty: CarrierSeries {
                    electricity: vec![1000.0; hours],
                    heat: vec![1000.0; hours],
                    cooling: vec![1000.0; hours],
                },
            },
            equipment: vec![],
            feeders: vec![],
            storage: vec![],
            budgets: None,
            reliability: None,
        }
    }
}
