use std::ffi::CString;
use std::time::Instant;

use highs::{RowProblem, Sense as HighsSense};
use highs_sys as sys;

use super::{Backend, Direction, Model, Sense, SolveOptions, SolveResult, SolveStatus, SolverError, VarKind};

/// Reference backend: the HiGHS MILP solver, linked statically.
#[derive(Clone, Copy, Debug, Default)]
pub struct HighsBackend;

const FEASIBILITY_TOL: f64 = 1e-9;

impl Backend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn version(&self) -> String {
        // SAFETY: plain getters on the linked library, no state involved
        unsafe { format!("{}.{}.{}", sys::Highs_versionMajor(), sys::Highs_versionMinor(), sys::Highs_versionPatch()) }
    }

    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<SolveResult, SolverError> {
        let start = Instant::now();
        let result = run(model, options, true)?;
        let result = match result.status {
            // HiGHS presolve cannot always tell the two apart
            RawStatus::UnboundedOrInfeasible => run(model, options, false)?,
            _ => result,
        };
        let status = match result.status {
            RawStatus::Optimal => SolveStatus::Optimal,
            RawStatus::Infeasible => SolveStatus::Infeasible,
            RawStatus::Unbounded => SolveStatus::Unbounded,
            RawStatus::UnboundedOrInfeasible => SolveStatus::Infeasible,
            RawStatus::TimeLimit => SolveStatus::TimeLimit,
            RawStatus::OtherLimit => SolveStatus::GapLimit,
            RawStatus::Failed => SolveStatus::Error,
        };
        let keep = matches!(status, SolveStatus::Optimal | SolveStatus::GapLimit | SolveStatus::TimeLimit)
            && result.feasible;
        let objective = keep.then(|| result.objective + model.objective().constant);
        Ok(SolveResult {
            status,
            values: if keep { Some(result.values) } else { None },
            objective,
            rel_gap: if model.is_mip() { result.gap } else { 0.0 },
            wall_time: start.elapsed(),
        })
    }
}

enum RawStatus {
    Optimal,
    Infeasible,
    Unbounded,
    UnboundedOrInfeasible,
    TimeLimit,
    OtherLimit,
    Failed,
}

struct RawResult {
    status: RawStatus,
    feasible: bool,
    values: Vec<f64>,
    objective: f64,
    gap: f64,
}

fn run(model: &Model, options: &SolveOptions, presolve: bool) -> Result<RawResult, SolverError> {
    let mut problem = RowProblem::default();
    let mut costs = vec![0.0; model.num_vars()];
    for &(v, c) in &model.objective().terms {
        costs[v.index()] += c;
    }
    let cols: Vec<highs::Col> = model
        .vars()
        .iter()
        .zip(&costs)
        .map(|(info, &cost)| match info.kind {
            VarKind::Continuous => problem.add_column(cost, info.lower..=info.upper),
            VarKind::Binary => problem.add_integer_column(cost, info.lower..=info.upper),
        })
        .collect();
    for c in model.constraints() {
        let row: Vec<(highs::Col, f64)> = c.expr.terms.iter().map(|&(v, k)| (cols[v.index()], k)).collect();
        match c.sense {
            Sense::Le => problem.add_row(..=c.rhs, row),
            Sense::Ge => problem.add_row(c.rhs.., row),
            Sense::Eq => problem.add_row(c.rhs..=c.rhs, row),
        }
    }
    let sense = match model.direction() {
        Direction::Minimize => HighsSense::Minimise,
        Direction::Maximize => HighsSense::Maximise,
    };
    let mut highs = problem
        .try_optimise(sense)
        .map_err(|s| SolverError::Backend(format!("model load failed: {s:?}")))?;
    highs.make_quiet();
    highs.set_option("threads", 1);
    highs.set_option("random_seed", (options.seed % (i32::MAX as u64)) as i32);
    highs.set_option("mip_rel_gap", options.gap_for(model));
    highs.set_option("primal_feasibility_tolerance", FEASIBILITY_TOL);
    highs.set_option("dual_feasibility_tolerance", FEASIBILITY_TOL);
    highs.set_option("mip_feasibility_tolerance", FEASIBILITY_TOL);
    if !presolve {
        highs.set_option("presolve", "off");
    }
    if let Some(limit) = options.time_limit {
        highs.set_option("time_limit", limit.as_secs_f64());
    }
    let mut solved = highs
        .try_solve()
        .map_err(|s| SolverError::Backend(format!("run failed: {s:?}")))?;
    let ptr = solved.as_mut_ptr();
    let raw = unsafe { sys::Highs_getModelStatus(ptr) };
    let status = match raw {
        sys::MODEL_STATUS_OPTIMAL | sys::MODEL_STATUS_MODEL_EMPTY => RawStatus::Optimal,
        sys::MODEL_STATUS_INFEASIBLE => RawStatus::Infeasible,
        sys::MODEL_STATUS_UNBOUNDED => RawStatus::Unbounded,
        sys::MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE => RawStatus::UnboundedOrInfeasible,
        sys::MODEL_STATUS_REACHED_TIME_LIMIT => RawStatus::TimeLimit,
        sys::MODEL_STATUS_REACHED_ITERATION_LIMIT
        | sys::MODEL_STATUS_OBJECTIVE_BOUND
        | sys::MODEL_STATUS_OBJECTIVE_TARGET
        | sys::MODEL_STATUS_REACHED_SOLUTION_LIMIT => RawStatus::OtherLimit,
        _ => RawStatus::Failed,
    };
    let feasible = int_info(ptr, "primal_solution_status") == Some(sys::SOLUTION_STATUS_FEASIBLE)
        || (raw == sys::MODEL_STATUS_MODEL_EMPTY);
    let values = solved.get_solution().columns().to_vec();
    let objective = solved.objective_value();
    let gap = if model.is_mip() { double_info(ptr, "mip_gap").unwrap_or(f64::INFINITY) } else { 0.0 };
    Ok(RawResult { status, feasible, values, objective, gap })
}

fn int_info(ptr: *mut std::ffi::c_void, name: &str) -> Option<sys::HighsInt> {
    let name = CString::new(name).ok()?;
    let mut value: sys::HighsInt = 0;
    let status = unsafe { sys::Highs_getIntInfoValue(ptr, name.as_ptr(), &mut value) };
    (status == sys::STATUS_OK).then_some(value)
}

fn double_info(ptr: *mut std::ffi::c_void, name: &str) -> Option<f64> {
    let name = CString::new(name).ok()?;
    let mut value = 0.0;
    let status = unsafe { sys::Highs_getDoubleInfoValue(ptr, name.as_ptr(), &mut value) };
    (status == sys::STATUS_OK).then_some(value)
}
