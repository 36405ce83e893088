//! Outer column-and-constraint generation over investment decisions, plus the deterministic
//! and N-1 baseline planners.

use std::time::{Duration, Instant};

use log::{info, warn};
use thiserror::Error;

use crate::dispatch::{
    add_block, add_investment, objective_terms, BindError, Binding, Bindings, CostSpec, Formulation, InvestmentVars,
    OpVar,
};
use crate::inner::{enumerate_recourse, solve_inner, InnerError, InnerOptions, InnerTraceRow};
use crate::model::{
    CarrierSeries, CostBreakdown, InvestmentDecision, OperationPlan, PlanningInstance, ScenarioOperation,
    UncertaintyBudgets,
};
use crate::solver::{self, Direction, LinExpr, Model, ModelError, Sense, SolveOptions, SolveStatus, SolverError, Var};
use crate::uncertainty::{realize_load, Scenario, UncertaintyError};

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error(transparent)]
    Inner(#[from] InnerError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error("no investment plan is feasible: {0}")]
    Infeasible(String),
    #[error("{what} solve ended with status {status}")]
    Status { what: &'static str, status: SolveStatus },
    #[error("brute-force oracle does not handle storage sizing")]
    OracleStorage,
}

/// A plan with its operation and costs.
#[derive(Clone, Debug)]
pub struct PlanSolution {
    pub decision: InvestmentDecision,
    pub operation: OperationPlan,
    pub costs: CostBreakdown,
}

fn solve_checked(model: &Model, options: &SolveOptions, what: &'static str) -> Result<solver::SolveResult, PlanError> {
    let r = solver::solve(model, options)?;
    match r.status {
        SolveStatus::Infeasible => Err(PlanError::Infeasible(format!("{what} has no feasible plan"))),
        _ if r.has_solution() => Ok(r),
        status => Err(PlanError::Status { what, status }),
    }
}

/// min f_inv + f_ope0 over the normal scenario only.
pub fn solve_deterministic(instance: &PlanningInstance, options: &SolveOptions) -> Result<PlanSolution, PlanError> {
    let mut model = Model::new();
    let inv = add_investment(&mut model, instance)?;
    let f = Formulation::new(instance).normal_only();
    let block = add_block(&mut model, &f, &Bindings::variable(instance, &inv), &CostSpec::standard(), "")?;
    let terms = objective_terms(instance, Some(&inv), &f, &block);
    model.set_objective(Direction::Minimize, terms.f_inv.clone() + terms.f_ope0.clone())?;
    let r = solve_checked(&model, options, "deterministic model")?;
    let decision = inv.decision(instance, &r);
    let operation = OperationPlan { scenarios: [block.operation(instance, &r, 0), ScenarioOperation::zeros(instance)] };
    let costs = CostBreakdown::new(decision.invest_cost(instance), r.eval(&terms.f_ope0), 0.0);
    Ok(PlanSolution { decision, operation, costs })
}

/// Cheapest plan that serves every load with any single component out for the whole horizon.
pub fn solve_n1(instance: &PlanningInstance, options: &SolveOptions) -> Result<PlanSolution, PlanError> {
    let mut model = Model::new();
    let inv = add_investment(&mut model, instance)?;
    let normal = Formulation::new(instance).normal_only();
    let block = add_block(&mut model, &normal, &Bindings::variable(instance, &inv), &CostSpec::standard(), "")?;
    let terms = objective_terms(instance, Some(&inv), &normal, &block);
    let outage = Formulation::new(instance).contingency_only();
    for (c, _) in instance.components().iter().enumerate() {
        let mut bindings = Bindings::variable(instance, &inv);
        bindings.state[c] = vec![Binding::Const(0.0); instance.period()];
        let b = add_block(&mut model, &outage, &bindings, &CostSpec::shed_only(), &format!("out{c}_"))?;
        for (&op, &v) in &b.vars {
            if matches!(op, OpVar::Shed { .. }) {
                model.set_bounds(v, 0.0, 0.0)?;
            }
        }
    }
    model.set_objective(Direction::Minimize, terms.f_inv.clone() + terms.f_ope0.clone())?;
    let r = solve_checked(&model, options, "N-1 model")?;
    let decision = inv.decision(instance, &r);
    let operation = OperationPlan { scenarios: [block.operation(instance, &r, 0), ScenarioOperation::zeros(instance)] };
    let costs = CostBreakdown::new(decision.invest_cost(instance), r.eval(&terms.f_ope0), 0.0);
    Ok(PlanSolution { decision, operation, costs })
}

/// One outer cut: a fixed member scenario with its realized loads.
#[derive(Clone, Debug, PartialEq)]
pub struct CutBlock {
    pub q: usize,
    pub scenario: Scenario,
    pub loads: CarrierSeries,
}

impl CutBlock {
    pub fn new(instance: &PlanningInstance, budgets: &UncertaintyBudgets, q: usize, scenario: Scenario) -> Result<Self, PlanError> {
        let loads = realize_load(&scenario.load, &instance.loads.nominal, &budgets.deltas(&instance.loads.nominal))?;
        Ok(CutBlock { q, scenario, loads })
    }
}

pub struct Master {
    pub model: Model,
    pub inv: InvestmentVars,
    pub psi: Var,
    pub f_inv: LinExpr,
}

/// min f_inv + ψ with ψ ≥ 0 and, per cut, a fresh two-copy block with ψ ≥ its f_ope0 + f_shed1.
pub fn build_master(instance: &PlanningInstance, cuts: &[CutBlock]) -> Result<Master, PlanError> {
    let mut model = Model::new();
    let inv = add_investment(&mut model, instance)?;
    let psi = model.continuous("psi", 0.0, f64::INFINITY)?;
    for cut in cuts {
        let f = Formulation::new(instance).with_loads(cut.loads.clone(), CarrierSeries::zeros(instance.period()));
        let bindings = Bindings::variable(instance, &inv).with_scenario(&cut.scenario);
        let block = add_block(&mut model, &f, &bindings, &CostSpec::standard(), &format!("q{}_", cut.q))?;
        model.add_constraint(format!("epigraph[{}]", cut.q), LinExpr::from(psi) - block.cost, Sense::Ge, 0.0)?;
    }
    let f_inv = inv.f_inv(instance);
    model.set_objective(Direction::Minimize, f_inv.clone() + psi)?;
    Ok(Master { model, inv, psi, f_inv })
}

#[derive(Clone, Debug)]
pub struct RobustOptions {
    pub eps: f64,
    /// Relative tolerance; the stopping gap is max(eps, rel_eps·|UB|).
    pub rel_eps: f64,
    pub iteration_cap: usize,
    pub time_limit: Option<Duration>,
    pub inner: InnerOptions,
    pub master: SolveOptions,
}

impl Default for RobustOptions {
    fn default() -> Self {
        let eps = 1e-4;
        RobustOptions {
            eps,
            rel_eps: 1e-9,
            iteration_cap: 50,
            time_limit: None,
            inner: InnerOptions { abs_tol: eps / 10.0, ..InnerOptions::default() },
            master: SolveOptions::exact(),
        }
    }
}

impl RobustOptions {
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self.inner.abs_tol = eps / 10.0;
        self
    }

    pub fn tolerance(&self, upper: f64) -> f64 {
        self.eps.max(self.rel_eps * upper.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterStatus {
    Converged,
    /// The inner engine returned a scenario that is already cut.
    Stalled,
    IterationCap,
    TimeLimit,
}

impl OuterStatus {
    pub fn is_converged(self) -> bool {
        matches!(self, OuterStatus::Converged | OuterStatus::Stalled)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OuterStatus::Converged => "converged",
            OuterStatus::Stalled => "stalled",
            OuterStatus::IterationCap => "iteration-cap",
            OuterStatus::TimeLimit => "time-limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OuterTraceRow {
    pub q: usize,
    pub lower: f64,
    pub upper: f64,
    pub mp_time: Duration,
    pub sp_time: Duration,
    pub scenario: String,
}

#[derive(Clone, Debug)]
pub struct RobustSolution {
    pub plan: PlanSolution,
    pub lower: f64,
    pub upper: f64,
    pub status: OuterStatus,
    pub worst: Scenario,
    pub trace: Vec<OuterTraceRow>,
    /// Inner rows tagged with their outer iteration.
    pub inner_trace: Vec<(usize, InnerTraceRow)>,
    pub cuts: Vec<CutBlock>,
}

pub fn solve_robust(
    instance: &PlanningInstance,
    budgets: &UncertaintyBudgets,
    options: &RobustOptions,
) -> Result<RobustSolution, PlanError> {
    let started = Instant::now();
    let mut cuts: Vec<CutBlock> = Vec::new();
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut incumbent: Option<(InvestmentDecision, crate::inner::InnerResult)> = None;
    let mut trace = Vec::new();
    let mut inner_trace = Vec::new();
    let mut status = OuterStatus::IterationCap;
    for q in 1..=options.iteration_cap {
        let t0 = Instant::now();
        let master = build_master(instance, &cuts)?;
        let r = solve_checked(&master.model, &options.master, "outer master")?;
        let obj = r.objective.unwrap_or(0.0);
        lower = lower.max(obj - r.rel_gap.max(0.0) * obj.abs());
        let decision = master.inv.decision(instance, &r);
        let mp_time = t0.elapsed();
        let t1 = Instant::now();
        let inner = solve_inner(instance, &decision, budgets, &options.inner)?;
        let sp_time = t1.elapsed();
        let candidate = decision.invest_cost(instance) + inner.value;
        inner_trace.extend(inner.trace.iter().cloned().map(|row| (q, row)));
        let worst = inner.scenario.clone();
        if candidate < upper || incumbent.is_none() {
            upper = upper.min(candidate);
            incumbent = Some((decision, inner));
        }
        trace.push(OuterTraceRow { q, lower, upper, mp_time, sp_time, scenario: worst.fingerprint() });
        info!("outer q={q} lb={lower:.6} ub={upper:.6}");
        if upper.is_finite() && upper - lower <= options.tolerance(upper) {
            status = OuterStatus::Converged;
            break;
        }
        if cuts.iter().any(|c| c.scenario == worst) {
            status = OuterStatus::Stalled;
            warn!("worst scenario already cut at q={q}; gap {:.3e}", upper - lower);
            break;
        }
        if options.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            status = OuterStatus::TimeLimit;
            break;
        }
        cuts.push(CutBlock::new(instance, budgets, q, worst)?);
    }
    let (decision, inner) = incumbent.expect("at least one outer iteration ran");
    let operation = worst_case_operation(instance, budgets, &decision, &inner.scenario, &options.inner.solve)?;
    let costs = CostBreakdown::new(decision.invest_cost(instance), inner.operate, inner.shed);
    Ok(RobustSolution {
        plan: PlanSolution { decision, operation, costs },
        lower,
        upper,
        status,
        worst: inner.scenario,
        trace,
        inner_trace,
        cuts,
    })
}

/// Both scenario copies dispatched for a fixed plan at a given scenario.
pub fn worst_case_operation(
    instance: &PlanningInstance,
    budgets: &UncertaintyBudgets,
    decision: &InvestmentDecision,
    scenario: &Scenario,
    options: &SolveOptions,
) -> Result<OperationPlan, PlanError> {
    let cut = CutBlock::new(instance, budgets, 0, scenario.clone())?;
    let f = Formulation::new(instance).with_loads(cut.loads, CarrierSeries::zeros(instance.period()));
    let mut model = Model::new();
    let block = add_block(&mut model, &f, &Bindings::fixed(instance, decision).with_scenario(scenario), &CostSpec::standard(), "")?;
    model.set_objective(Direction::Minimize, block.cost.clone())?;
    let r = solver::solve(&model, options)?;
    if !r.has_solution() {
        // the normal copy cannot serve this scenario; report nothing rather than a fake dispatch
        return Ok(OperationPlan { scenarios: [ScenarioOperation::zeros(instance), ScenarioOperation::zeros(instance)] });
    }
    Ok(OperationPlan { scenarios: [block.operation(instance, &r, 0), block.operation(instance, &r, 1)] })
}

/// Exhaustive robust optimum: every build vector, every scenario, each dispatched directly.
pub fn enumerate_robust(
    instance: &PlanningInstance,
    budgets: &UncertaintyBudgets,
    limit: usize,
    options: &SolveOptions,
) -> Result<(f64, InvestmentDecision), PlanError> {
    if !instance.storage.is_empty() {
        return Err(PlanError::OracleStorage);
    }
    let n = instance.equipment.len();
    let mut best = (f64::INFINITY, InvestmentDecision::empty(instance));
    for mask in 0u64..(1 << n) {
        let decision = InvestmentDecision { build: (0..n).map(|i| mask >> i & 1 == 1).collect(), storage: vec![] };
        let invest = decision.invest_cost(instance);
        if invest >= best.0 {
            continue;
        }
        let (q, _) = enumerate_recourse(instance, &decision, budgets, limit, options)?;
        if invest + q < best.0 {
            best = (invest + q, decision);
        }
    }
    Ok(best)
}
