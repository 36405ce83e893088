//! Backend-neutral construction and solution of LP / MILP models.
//!
//! Every optimisation model in the crate is assembled as a [`Model`] and
//! handed to a [`Backend`]. The model owns its variables, constraints and
//! objective; handles are plain indices assigned in insertion order, so two
//! identical build sequences produce identical models.

mod expr;
mod highs_backend;
mod lp_format;

use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub use expr::LinExpr;
pub use highs_backend::HighsBackend;

/// Handle to a variable registered in a [`Model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Handle to a constraint registered in a [`Model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstrId(pub(crate) usize);

impl ConstrId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Clone, Debug)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("non-finite coefficient {value} in {context}")]
    NonFinite { context: String, value: f64 },
    #[error("invalid bounds [{lower}, {upper}] for variable {name}")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("variable handle {0} is not registered in this model")]
    UnknownVariable(usize),
}

/// A self-contained LP / MILP.
#[derive(Clone, Debug)]
pub struct Model {
    vars: Vec<VarInfo>,
    constraints: Vec<Constraint>,
    objective: LinExpr,
    direction: Direction,
}

impl Default for Model {
    fn default() -> Self {
        Self::new()
    }
}

impl Model {
    pub fn new() -> Self {
        Model {
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: LinExpr::default(),
            direction: Direction::Minimize,
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<Var, ModelError> {
        let name = name.into();
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            VarKind::Continuous => (lower, upper),
        };
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(ModelError::InvalidBounds { name, lower, upper });
        }
        self.vars.push(VarInfo { name, kind, lower, upper });
        Ok(Var(self.vars.len() - 1))
    }

    /// Continuous variable; bounds must already be known to be valid.
    pub fn continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<Var, ModelError> {
        self.add_var(name, VarKind::Continuous, lower, upper)
    }

    pub fn binary(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
            .expect("binary bounds are always valid")
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        expr: LinExpr,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstrId, ModelError> {
        let name = name.into();
        let mut expr = expr.canonical();
        self.check_expr(&expr, &name)?;
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite { context: name, value: rhs });
        }
        let rhs = rhs - expr.constant;
        expr.constant = 0.0;
        self.constraints.push(Constraint { name, expr, sense, rhs });
        Ok(ConstrId(self.constraints.len() - 1))
    }

    pub fn set_objective(&mut self, direction: Direction, expr: LinExpr) -> Result<(), ModelError> {
        let expr = expr.canonical();
        self.check_expr(&expr, "objective")?;
        self.objective = expr;
        self.direction = direction;
        Ok(())
    }

    fn check_expr(&self, expr: &LinExpr, context: &str) -> Result<(), ModelError> {
        if !expr.constant.is_finite() {
            return Err(ModelError::NonFinite { context: context.to_string(), value: expr.constant });
        }
        for &(v, c) in &expr.terms {
            if v.0 >= self.vars.len() {
                return Err(ModelError::UnknownVariable(v.0));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite { context: context.to_string(), value: c });
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn var(&self, v: Var) -> &VarInfo {
        &self.vars[v.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn is_mip(&self) -> bool {
        self.vars.iter().any(|v| v.kind == VarKind::Binary)
    }

    /// Tighten the bounds of an existing variable.
    pub fn set_bounds(&mut self, v: Var, lower: f64, upper: f64) -> Result<(), ModelError> {
        let info = self.vars.get_mut(v.0).ok_or(ModelError::UnknownVariable(v.0))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds { name: info.name.clone(), lower, upper });
        }
        info.lower = lower;
        info.upper = upper;
        Ok(())
    }

    /// Largest constraint violation (including bounds and integrality) of a point.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (info, &x) in self.vars.iter().zip(values) {
            worst = worst.max(info.lower - x).max(x - info.upper);
            if info.kind == VarKind::Binary {
                worst = worst.max((x - x.round()).abs());
            }
        }
        for c in &self.constraints {
            let lhs = c.expr.evaluate(values);
            let v = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Write the model in CPLEX LP text format.
    pub fn write_lp<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        lp_format::write(self, out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,
    TimeLimit,
    Error,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::GapLimit => "gap-limit",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::Error => "error",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Relative MIP gap; `None` picks the default for the model class.
    pub rel_gap: Option<f64>,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// When set, every solved model is also written here in LP format.
    pub dump_dir: Option<PathBuf>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { rel_gap: None, time_limit: None, seed: 0, dump_dir: None }
    }
}

pub const DEFAULT_LP_GAP: f64 = 1e-6;
pub const DEFAULT_MIP_GAP: f64 = 1e-4;

impl SolveOptions {
    pub fn exact() -> Self {
        SolveOptions { rel_gap: Some(0.0), ..Default::default() }
    }

    pub fn gap_for(&self, model: &Model) -> f64 {
        self.rel_gap
            .unwrap_or(if model.is_mip() { DEFAULT_MIP_GAP } else { DEFAULT_LP_GAP })
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Primal values, one per variable; present for optimal, gap-limit and
    /// time-limit-with-incumbent outcomes.
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub rel_gap: f64,
    pub wall_time: Duration,
}

impl SolveResult {
    pub fn has_solution(&self) -> bool {
        self.values.is_some()
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values.as_ref().map(|x| x[v.0]).unwrap_or(f64::NAN)
    }

    pub fn eval(&self, expr: &LinExpr) -> f64 {
        self.values.as_ref().map(|x| expr.evaluate(x)).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("could not write model dump: {0}")]
    Dump(#[from] std::io::Error),
}

/// A MILP engine able to solve any [`Model`].
pub trait Backend: Send + Sync {
    fn name(&self) -> &'static str;
    fn version(&self) -> String {
        String::new()
    }
    fn solve(&self, model: &Model, options: &SolveOptions) -> Result<SolveResult, SolverError>;
}

/// Name of the environment variable selecting the backend.
pub const BACKEND_ENV: &str = "IESPLAN_SOLVER";

/// Resolve the backend named by `IESPLAN_SOLVER` (default: HiGHS).
pub fn default_backend() -> Result<&'static dyn Backend, SolverError> {
    static HIGHS: HighsBackend = HighsBackend;
    match std::env::var(BACKEND_ENV) {
        Err(_) => Ok(&HIGHS),
        Ok(name) if name.is_empty() || name.eq_ignore_ascii_case("highs") => Ok(&HIGHS),
        Ok(name) => Err(SolverError::BackendUnavailable(name)),
    }
}

/// `name version` of the selected backend, or the selection error.
pub fn backend_description() -> String {
    match default_backend() {
        Ok(b) => format!("{} {}", b.name(), b.version()).trim_end().to_string(),
        Err(e) => e.to_string(),
    }
}

/// Solve with the default backend, dumping the model first when requested.
pub fn solve(model: &Model, options: &SolveOptions) -> Result<SolveResult, SolverError> {
    let backend = default_backend()?;
    if let Some(dir) = &options.dump_dir {
        dump(model, dir)?;
    }
    backend.solve(model, options)
}

fn dump(model: &Model, dir: &std::path::Path) -> Result<(), SolverError> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    std::fs::create_dir_all(dir)?;
    let id = COUNTER.fetch_add(1, Ordering::Relaxed);
    let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("model_{id:05}.lp")))?);
    model.write_lp(&mut file)?;
    Ok(())
}
