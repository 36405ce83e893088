//! Worst-case recourse for a fixed investment: a nested column-and-constraint loop that
//! alternates a max-min master over the uncertainty binaries (dualized or KKT form) with a
//! dispatch subproblem that proposes new charging patterns.

mod dual;
mod kkt;
mod linearize;
mod sd;
mod theta;

use std::time::{Duration, Instant};

use log::{debug, warn};
use thiserror::Error;

use crate::dispatch::{
    add_block, min_shed_dispatch, normal_dispatch, objective_terms, BindError, Bindings, CostSpec, DispatchError,
    Formulation, OpVar, Secondary,
};
use crate::model::{InvestmentDecision, PlanningInstance, UncertaintyBudgets};
use crate::solver::{self, Direction, Model, ModelError, SolveOptions, SolveStatus, SolverError, Var};
use crate::uncertainty::{enumerate_scenarios, realize_load, Scenario, UncertaintyError};

pub use dual::{derive_dual_constraints, DualConstraint, ParametricLp};
pub use kkt::build_mps_kkt;
pub use linearize::{linearize_exclusive_pair, linearize_product, LinearizeError};
pub use sd::build_mps_sd;
pub use theta::{add_theta, theta_deltas, ThetaVars};

#[derive(Debug, Error)]
pub enum InnerError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error(transparent)]
    Linearize(#[from] LinearizeError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error("row references variable {0} with no column")]
    UnmappedVariable(String),
    #[error("{what} solve ended with status {status}")]
    Status { what: &'static str, status: SolveStatus },
    #[error("penalty on unserved energy kept growing without clearing it")]
    Penalty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMethod {
    /// Strong duality with McCormick products.
    Sd,
    /// KKT complementarity with big-M binaries.
    Kkt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linearization {
    /// One product per uncertainty binary.
    Basic,
    /// Merged lower bound for mutually exclusive u+ and u−.
    Strengthened,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerStatus {
    Converged,
    /// The subproblem returned a charging pattern already in the pool.
    Stalled,
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct InnerOptions {
    pub method: InnerMethod,
    pub linearization: Linearization,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iterations: usize,
    /// Divide costs by the largest hour weight inside the masters.
    pub scale_costs: bool,
    pub solve: SolveOptions,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            method: InnerMethod::Sd,
            linearization: Linearization::Strengthened,
            abs_tol: 1e-5,
            rel_tol: 1e-9,
            max_iterations: 50,
            scale_costs: true,
            solve: SolveOptions::exact(),
        }
    }
}

impl InnerOptions {
    fn tolerance(&self, upper: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * upper.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Scenario-0 feasibility over load deviations.
    Feasibility,
    Cost,
}

/// Which copies and costs an inner loop works with.
#[derive(Clone, Debug)]
pub struct Stage {
    pub phase: Phase,
    pub costs: CostSpec,
    pub max_shed_weight: f64,
}

impl Stage {
    pub fn feasibility() -> Self {
        Stage { phase: Phase::Feasibility, costs: CostSpec::feasibility(), max_shed_weight: 0.0 }
    }

    pub fn cost(instance: &PlanningInstance, penalty: f64, scale: f64) -> Self {
        Stage {
            phase: Phase::Cost,
            costs: CostSpec { operate: true, shed: true, unserved: penalty, scale },
            max_shed_weight: max_shed_weight(instance),
        }
    }

    pub fn contingency(&self) -> bool {
        self.phase == Phase::Cost
    }

    pub fn formulation<'a>(&self, instance: &'a PlanningInstance, budgets: &UncertaintyBudgets) -> Formulation<'a> {
        let mut f = Formulation::new(instance)
            .with_loads(instance.loads.nominal.clone(), theta_deltas(instance, budgets))
            .elastic();
        if !self.contingency() {
            f = f.normal_only();
        }
        f
    }
}

fn max_shed_weight(instance: &PlanningInstance) -> f64 {
    let mut top: f64 = 0.0;
    for t in 0..instance.period() {
        let w = instance.horizon.hour_weight(t).unwrap_or(0.0);
        for d in 0..3 {
            top = top.max(w * instance.loads.shed_penalty.by_index(d)[t]);
        }
    }
    top
}

/// Starting penalty on scenario-0 unserved energy, well above any marginal supply cost.
pub fn unserved_penalty(instance: &PlanningInstance) -> f64 {
    let c_sub = instance.substation_efficiency();
    let mut c_max: f64 = 0.0;
    for t in 0..instance.period() {
        let w = instance.horizon.hour_weight(t).unwrap_or(0.0);
        let elec = if instance.feeders.is_empty() { 0.0 } else { instance.tariffs.elec_price[t] / c_sub };
        c_max = c_max.max(w * elec.max(instance.tariffs.gas_price[t]));
    }
    let a_min = instance
        .equipment
        .iter()
        .flat_map(|e| e.conversion.iter().map(|c| c.efficiency))
        .chain(instance.feeders.iter().map(|f| f.efficiency))
        .fold(1.0, f64::min);
    let eta = instance.storage.iter().map(|s| s.eta_ch * s.eta_dis).fold(1.0, f64::min);
    (100.0 * c_max / (a_min * a_min * eta)).max(1.0)
}

/// Charging modes Z̃[sc][k][t] for both copies.
pub type Charging = [Vec<Vec<f64>>; 2];

pub fn zero_charging(instance: &PlanningInstance) -> Charging {
    let z = vec![vec![0.0; instance.period()]; instance.storage.len()];
    [z.clone(), z]
}

/// An inner master: the uncertainty binaries, the value variable and the model to maximise.
pub struct MasterProblem {
    pub model: Model,
    pub theta: ThetaVars,
    pub sigma: Var,
}

pub fn build_mps(
    method: InnerMethod,
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    stage: &Stage,
    pool: &[Charging],
    linearization: Linearization,
) -> Result<MasterProblem, InnerError> {
    match method {
        InnerMethod::Sd => build_mps_sd(instance, decision, budgets, stage, pool, linearization),
        InnerMethod::Kkt => build_mps_kkt(instance, decision, budgets, stage, pool),
    }
}

/// The recourse dispatch for one scenario, with its charging pattern.
#[derive(Clone, Debug)]
pub struct SpsOutcome {
    /// Objective in stage units (scaled).
    pub value: f64,
    pub operate: f64,
    pub shed: f64,
    pub unserved: f64,
    pub charging: Charging,
}

pub fn solve_sps(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    stage: &Stage,
    scenario: &Scenario,
    options: &SolveOptions,
) -> Result<SpsOutcome, InnerError> {
    let f = stage.formulation(instance, budgets);
    let mut model = Model::new();
    let bindings = Bindings::fixed(instance, decision).with_scenario(scenario);
    let block = add_block(&mut model, &f, &bindings, &stage.costs, "")?;
    model.set_objective(Direction::Minimize, block.cost.clone())?;
    let r = solver::solve(&model, options)?;
    if !r.has_solution() {
        return Err(InnerError::Status { what: "subproblem", status: r.status });
    }
    let terms = objective_terms(instance, None, &f, &block);
    let mut charging = zero_charging(instance);
    let mut unserved = 0.0;
    for (&op, &v) in &block.vars {
        match op {
            OpVar::Mode { sc, k, t } => charging[sc as usize][k][t] = if r.value(v) > 0.5 { 1.0 } else { 0.0 },
            OpVar::Unserved { .. } => unserved += r.value(v).max(0.0),
            _ => {}
        }
    }
    Ok(SpsOutcome {
        value: r.objective.unwrap_or(0.0),
        operate: r.eval(&terms.f_ope0),
        shed: r.eval(&terms.f_shed1),
        unserved,
        charging,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerTraceRow {
    pub phase: Phase,
    pub iteration: usize,
    pub lower: f64,
    pub upper: f64,
    pub mps_time: Duration,
    pub sps_time: Duration,
    pub binaries: usize,
}

#[derive(Clone, Debug)]
pub struct InnerResult {
    /// Worst-case f_ope0 + f_shed1; infinite when some load realization is unservable.
    pub value: f64,
    pub scenario: Scenario,
    pub operate: f64,
    pub shed: f64,
    pub feasible: bool,
    pub status: InnerStatus,
    pub lower: f64,
    pub upper: f64,
    pub trace: Vec<InnerTraceRow>,
}

struct PhaseOutcome {
    lower: f64,
    upper: f64,
    best: Option<(Scenario, SpsOutcome)>,
    status: InnerStatus,
}

/// Below this, unserved energy counts as zero.
const UNSERVED_TOL: f64 = 1e-6;

pub fn solve_inner(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    options: &InnerOptions,
) -> Result<InnerResult, InnerError> {
    let mut trace = Vec::new();
    let feas = Stage::feasibility();
    let p1 = run_phase(instance, decision, budgets, &feas, 1.0, options, &mut trace)?;
    if p1.lower > UNSERVED_TOL {
        let (scenario, _) = p1.best.expect("phase with positive bound has an incumbent");
        return Ok(InnerResult {
            value: f64::INFINITY,
            scenario,
            operate: f64::INFINITY,
            shed: 0.0,
            feasible: false,
            status: p1.status,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            trace,
        });
    }
    if p1.upper > UNSERVED_TOL {
        warn!("feasibility phase ended at {:?} with bound {:.3e}; treating as feasible", p1.status, p1.upper);
    }
    let scale = if options.scale_costs {
        let top = (0..instance.period()).map(|t| instance.horizon.hour_weight(t).unwrap_or(0.0)).fold(0.0, f64::max);
        if top > 0.0 { 1.0 / top } else { 1.0 }
    } else {
        1.0
    };
    let mut penalty = unserved_penalty(instance);
    for _ in 0..40 {
        let stage = Stage::cost(instance, penalty, scale);
        let out = run_phase(instance, decision, budgets, &stage, scale, options, &mut trace)?;
        let (scenario, best) = out.best.expect("cost phase always has an incumbent");
        if best.unserved > UNSERVED_TOL {
            debug!("unserved {:.3e} at penalty {penalty}; doubling", best.unserved);
            penalty *= 2.0;
            continue;
        }
        return Ok(InnerResult {
            value: best.operate + best.shed,
            scenario,
            operate: best.operate,
            shed: best.shed,
            feasible: true,
            status: out.status,
            lower: out.lower,
            upper: out.upper,
            trace,
        });
    }
    Err(InnerError::Penalty)
}

fn run_phase(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    stage: &Stage,
    scale: f64,
    options: &InnerOptions,
    trace: &mut Vec<InnerTraceRow>,
) -> Result<PhaseOutcome, InnerError> {
    let mut pool = vec![zero_charging(instance)];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut best: Option<(Scenario, SpsOutcome)> = None;
    for iteration in 1..=options.max_iterations {
        let started = Instant::now();
        let mp = build_mps(options.method, instance, decision, budgets, stage, &pool, options.linearization)?;
        let binaries = mp.model.num_binaries();
        let r = solver::solve(&mp.model, &options.solve)?;
        if !r.has_solution() {
            return Err(InnerError::Status { what: "inner master", status: r.status });
        }
        let mps_time = started.elapsed();
        // an unfinished MIP only certifies its dual bound
        let bound = r.objective.unwrap_or(0.0) * (1.0 + r.rel_gap.max(0.0));
        upper = upper.min(bound / scale);
        let scenario = mp.theta.scenario(&r);
        let started = Instant::now();
        let sps = solve_sps(instance, decision, budgets, stage, &scenario, &options.solve)?;
        let sps_time = started.elapsed();
        let value = sps.value / scale;
        let unclean = stage.phase == Phase::Cost && sps.unserved > UNSERVED_TOL;
        if value > lower || best.is_none() || unclean {
            lower = lower.max(value);
            best = Some((scenario, sps.clone()));
        }
        trace.push(InnerTraceRow { phase: stage.phase, iteration, lower, upper, mps_time, sps_time, binaries });
        debug!("inner {:?} r={iteration} lb={lower:.6} ub={upper:.6}", stage.phase);
        if unclean {
            return Ok(PhaseOutcome { lower, upper, best, status: InnerStatus::IterationCap });
        }
        if stage.phase == Phase::Feasibility && (lower > UNSERVED_TOL || upper <= UNSERVED_TOL) {
            return Ok(PhaseOutcome { lower, upper, best, status: InnerStatus::Converged });
        }
        if upper.is_finite() && upper - lower <= options.tolerance(upper) {
            return Ok(PhaseOutcome { lower, upper, best, status: InnerStatus::Converged });
        }
        if pool.contains(&sps.charging) {
            return Ok(PhaseOutcome { lower, upper, best, status: InnerStatus::Stalled });
        }
        pool.push(sps.charging);
    }
    Ok(PhaseOutcome { lower, upper, best, status: InnerStatus::IterationCap })
}

/// Reference recourse by enumerating every scenario: the scenario-0 dispatch and the
/// contingency shed are solved separately and summed, and the worst sum is kept.
pub fn enumerate_recourse(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    limit: usize,
    options: &SolveOptions,
) -> Result<(f64, Scenario), InnerError> {
    let delta = budgets.deltas(&instance.loads.nominal);
    let mut worst = (f64::NEG_INFINITY, Scenario::nominal(instance.components().len(), instance.period()));
    let mut normal_cache = std::collections::HashMap::new();
    let mut shed_cache = std::collections::HashMap::new();
    for s in enumerate_scenarios(instance, budgets, limit)? {
        let loads = realize_load(&s.load, &instance.loads.nominal, &delta)?;
        let key = s.load.matrix();
        let c0 = match normal_cache.get(&key) {
            Some(&c) => c,
            None => {
                let c = normal_dispatch(instance, decision, &loads, options)?.map_or(f64::INFINITY, |(_, c)| c);
                normal_cache.insert(key.clone(), c);
                c
            }
        };
        // failures of unbuilt options change nothing, so mask them before caching
        let mut states = s.contingency.clone();
        for (n, &built) in decision.build.iter().enumerate() {
            if !built {
                states.state[n].iter_mut().for_each(|x| *x = true);
                states.start[n].iter_mut().for_each(|x| *x = false);
            }
        }
        let shed_key = (key.clone(), states.matrix());
        let c1 = if !c0.is_finite() {
            0.0
        } else if let Some(&c) = shed_cache.get(&shed_key) {
            c
        } else {
            let c = min_shed_dispatch(instance, decision, &loads, &states, &Secondary::OperatingCost, None, options)?.shed_cost;
            shed_cache.insert(shed_key, c);
            c
        };
        if c0 + c1 > worst.0 {
            worst = (c0 + c1, s);
        }
        if worst.0.is_infinite() {
            break;
        }
    }
    Ok(worst)
}
