use std::collections::HashMap;

use super::{InnerError, Stage};
use crate::dispatch::{materialize_all, Bindings, Family, Formulation, LinRow, OpVar, RowSense};
use crate::model::{Carrier, InvestmentDecision, PlanningInstance};

/// The recourse LP for fixed X̂ and Z̃, with right-hand sides affine in the uncertainty binaries.
#[derive(Clone, Debug)]
pub struct ParametricLp {
    pub columns: Vec<OpVar>,
    pub costs: Vec<f64>,
    pub rows: Vec<LinRow>,
    /// A priori upper bound of every column.
    pub column_bounds: Vec<f64>,
    /// Valid bound on each row's dual; infinite where none is known.
    pub dual_caps: Vec<f64>,
}

/// One row of A'π ≤ c.
#[derive(Clone, Debug, PartialEq)]
pub struct DualConstraint {
    pub column: OpVar,
    pub terms: Vec<(usize, f64)>,
    pub cost: f64,
}

impl ParametricLp {
    pub fn build(
        instance: &PlanningInstance,
        decision: &InvestmentDecision,
        stage: &Stage,
        formulation: &Formulation,
        bindings: &Bindings,
    ) -> Result<Self, InnerError> {
        let columns = formulation.columns();
        let costs: Vec<f64> = columns.iter().map(|&c| formulation.cost(c, &stage.costs)).collect();
        let rows = materialize_all(formulation, bindings)?;
        let cost_of: HashMap<OpVar, f64> = columns.iter().copied().zip(costs.iter().copied()).collect();
        let column_bounds = columns.iter().map(|&c| column_bound(instance, decision, formulation, c)).collect();
        let dual_caps = rows
            .iter()
            .map(|r| {
                let t = row_hour(r);
                let shed = |d: usize| cost_of.get(&OpVar::Shed { d, t }).copied().unwrap_or(0.0);
                let bal = |d: usize| if r.sc == 1 { shed(d) } else { stage.costs.unserved * stage.costs.scale };
                match r.family {
                    Family::Balance(d) => bal(d),
                    Family::EquipmentCap => {
                        let n = equipment_of(r);
                        (0..3).map(|d| instance.equipment[n].coefficient(Carrier::LOADS[d]).max(0.0) * bal(d)).sum()
                    }
                    Family::SubstationCap => instance.substation_efficiency() * bal(0),
                    _ => f64::INFINITY,
                }
            })
            .collect();
        Ok(ParametricLp { columns, costs, rows, column_bounds, dual_caps })
    }

    pub fn index(&self) -> HashMap<OpVar, usize> {
        self.columns.iter().enumerate().map(|(j, &c)| (c, j)).collect()
    }
}

fn row_hour(r: &LinRow) -> usize {
    r.terms
        .iter()
        .find_map(|(v, _)| match *v {
            OpVar::Substation { t, .. } | OpVar::Equipment { t, .. } => Some(t),
            _ => None,
        })
        .unwrap_or(0)
}

fn equipment_of(r: &LinRow) -> usize {
    r.terms
        .iter()
        .find_map(|(v, _)| match *v {
            OpVar::Equipment { n, .. } => Some(n),
            _ => None,
        })
        .expect("equipment row without equipment term")
}

fn column_bound(instance: &PlanningInstance, decision: &InvestmentDecision, f: &Formulation, c: OpVar) -> f64 {
    let power = |k: usize| {
        let s = &decision.storage[k];
        if instance.storage[k].has_power_variable() {
            s.power
        } else {
            s.energy / 2.0
        }
    };
    let load = |d: usize, t: usize| f.nominal.by_index(d)[t] + f.delta.by_index(d)[t];
    match c {
        OpVar::Substation { .. } => instance.feeder_capacity(),
        OpVar::Equipment { n, .. } => instance.equipment[n].capacity * decision.build[n] as u8 as f64,
        OpVar::Charge { k, .. } | OpVar::Discharge { k, .. } => power(k),
        OpVar::Energy { k, .. } => decision.storage[k].energy,
        OpVar::Mode { .. } => 1.0,
        OpVar::Shed { d, t } | OpVar::Unserved { d, t } => load(d, t),
    }
}

/// Bound used for storage-related duals in the KKT system.
pub(super) fn storage_cap(instance: &PlanningInstance, stage: &Stage) -> f64 {
    let eta = instance.storage.iter().map(|s| s.eta_ch * s.eta_dis).fold(1.0, f64::min);
    let top = stage.costs.unserved.max(stage.max_shed_weight) * stage.costs.scale;
    let cycles = instance.storage.iter().filter_map(|s| s.max_charge_cycles).fold(1.0, f64::max);
    10.0 * top * cycles.max(1.0) / eta
}

/// One dual constraint per primal column; every row term must name a known column.
pub fn derive_dual_constraints(lp: &ParametricLp) -> Result<Vec<DualConstraint>, InnerError> {
    let index = lp.index();
    let mut out: Vec<DualConstraint> =
        lp.columns.iter().zip(&lp.costs).map(|(&column, &cost)| DualConstraint { column, terms: Vec::new(), cost }).collect();
    for (i, row) in lp.rows.iter().enumerate() {
        for &(v, a) in &row.terms {
            let j = *index.get(&v).ok_or_else(|| InnerError::UnmappedVariable(v.to_string()))?;
            out[j].terms.push((i, a));
        }
    }
    Ok(out)
}

pub fn is_free(row: &LinRow) -> bool {
    row.sense == RowSense::Eq
}
