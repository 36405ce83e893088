use thiserror::Error;

use super::{add_block, BindError, Bindings, CostSpec, Formulation, OpVar};
use crate::model::{Carrier, CarrierSeries, InvestmentDecision, PlanningInstance, ScenarioOperation};
use crate::solver::{self, Direction, LinExpr, Model, ModelError, Sense, SolveOptions, SolveStatus, SolverError};
use crate::uncertainty::ContingencyRealization;

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("dispatch solve ended with status {0}")]
    Status(SolveStatus),
}

/// Tie-break after shed is minimised.
#[derive(Clone, Debug, PartialEq)]
pub enum Secondary {
    /// Fuel and electricity cost of the contingency copy.
    OperatingCost,
    /// Maximise Σ_k min(E_k at the last hour, target_k).
    TerminalEnergy(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct ShedDispatch {
    pub operation: ScenarioOperation,
    pub shed: CarrierSeries,
    /// Weighted penalty cost, the f_shed1 of this dispatch.
    pub shed_cost: f64,
}

impl ShedDispatch {
    pub fn shed_energy(&self) -> f64 {
        self.shed.total()
    }

    pub fn shed_of(&self, d: Carrier) -> &[f64] {
        self.shed.get(d)
    }
}

/// Cheapest normal-scenario dispatch for the given loads; `None` when no shed-free dispatch exists.
pub fn normal_dispatch(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    loads: &CarrierSeries,
    options: &SolveOptions,
) -> Result<Option<(ScenarioOperation, f64)>, DispatchError> {
    let f = Formulation::new(instance).normal_only().with_loads(loads.clone(), CarrierSeries::zeros(instance.period()));
    let mut model = Model::new();
    let block = add_block(&mut model, &f, &Bindings::fixed(instance, decision), &CostSpec::standard(), "")?;
    model.set_objective(Direction::Minimize, block.cost.clone())?;
    let r = solver::solve(&model, options)?;
    match r.status {
        SolveStatus::Infeasible => Ok(None),
        _ if r.has_solution() => Ok(Some((block.operation(instance, &r, 0), r.objective.unwrap_or(0.0)))),
        s => Err(DispatchError::Status(s)),
    }
}

/// Contingency-copy dispatch that minimises shed cost first and then the secondary objective.
pub fn min_shed_dispatch(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    loads: &CarrierSeries,
    states: &ContingencyRealization,
    secondary: &Secondary,
    initial_energy: Option<&[f64]>,
    options: &SolveOptions,
) -> Result<ShedDispatch, DispatchError> {
    let mut f = Formulation::new(instance).contingency_only().with_loads(loads.clone(), CarrierSeries::zeros(instance.period()));
    f.initial_energy = initial_energy.map(|e| e.to_vec());
    let mut bindings = Bindings::fixed(instance, decision);
    for (c, row) in states.state.iter().enumerate() {
        for (t, &s) in row.iter().enumerate() {
            bindings.state[c][t] = super::Binding::Const(s as u8 as f64);
        }
    }
    let mut model = Model::new();
    let block = add_block(&mut model, &f, &bindings, &CostSpec::shed_only(), "")?;
    model.set_objective(Direction::Minimize, block.cost.clone())?;
    let first = solver::solve(&model, options)?;
    if !first.has_solution() {
        return Err(DispatchError::Status(first.status));
    }
    let best = first.objective.unwrap_or(0.0).max(0.0);
    if best > 0.0 || !matches!(secondary, Secondary::OperatingCost) || has_fuel_cost(instance) {
        model.add_constraint("shed_floor", block.cost.clone(), Sense::Le, best * (1.0 + 1e-9))?;
        let period = instance.period();
        match secondary {
            Secondary::OperatingCost => {
                let mut e = LinExpr::new();
                for t in 0..period {
                    let w = instance.horizon.hour_weight(t).unwrap_or(0.0);
                    e.add_term(block.vars[&OpVar::Substation { sc: 1, t }], w * instance.tariffs.elec_price[t]);
                    for (n, eq) in instance.equipment.iter().enumerate() {
                        if eq.burns_gas() {
                            e.add_term(block.vars[&OpVar::Equipment { sc: 1, n, t }], w * instance.tariffs.gas_price[t]);
                        }
                    }
                }
                model.set_objective(Direction::Minimize, e)?;
            }
            Secondary::TerminalEnergy(target) => {
                let mut e = LinExpr::new();
                for (k, &goal) in target.iter().enumerate() {
                    let q = model.continuous(format!("terminal[{k}]"), 0.0, goal.max(0.0))?;
                    let last = block.vars[&OpVar::Energy { sc: 1, k, t: period - 1 }];
                    model.add_constraint(format!("terminal_link[{k}]"), LinExpr::from(q) - last, Sense::Le, 0.0)?;
                    e.add_term(q, 1.0);
                }
                model.set_objective(Direction::Maximize, e)?;
            }
        }
        let second = solver::solve(&model, options)?;
        if second.has_solution() {
            return Ok(extract(instance, &block, &second));
        }
    }
    Ok(extract(instance, &block, &first))
}

fn has_fuel_cost(instance: &PlanningInstance) -> bool {
    instance.tariffs.elec_price.iter().chain(&instance.tariffs.gas_price).any(|&p| p > 0.0)
}

fn extract(instance: &PlanningInstance, block: &super::Block, r: &solver::SolveResult) -> ShedDispatch {
    let operation = block.operation(instance, r, 1);
    let shed = operation.shed.map(|_, _, v| if v.abs() < 1e-9 { 0.0 } else { v });
    let shed_cost = r.eval(&block.cost);
    ShedDispatch { operation, shed, shed_cost }
}
