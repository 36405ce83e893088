mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::{info, warn};

use iesplan::model::{self, InvestmentDecision, PlanningInstance};
use iesplan::reliability::{self, ReliabilityIndices};
use iesplan::report::{self, CompareRow, CostFile, Manifest, SweepRow};
use iesplan::robust::{self, OuterTraceRow, PlanSolution};

use config::{Mode, RunConfig, Settings};

#[derive(Parser)]
#[command(name = "iesplan", version, about = "Robust equipment selection and sizing for park-level integrated energy systems")]
struct Cli {
    /// TOML file with default settings; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance and list every violated invariant
    Validate(Settings),
    /// Plan with one planner and write plan, costs, traces and dispatch
    Plan(Settings),
    /// Monte-Carlo reliability of a plan
    Assess(Settings),
    /// Plan with several planners and assess each with the same seed
    Compare(Settings),
    /// Robust plans over a range of one budget
    Sweep(Settings),
}

/// Exit status of a run.
enum Outcome {
    Done,
    NotConverged,
}

/// Failures before any planning starts are input errors.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Ok(Outcome::Done)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::NotConverged)) => ExitCode::from(2),
        Ok(Err(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
        Err(InputError(e)) => {
            eprintln!("input error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}

/// The error chain without links that only repeat their cause.
fn describe(e: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for link in e.chain() {
        let text = link.to_string();
        if !parts.last().is_some_and(|prev| prev.contains(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ")
}

struct Job {
    config: RunConfig,
    instance: PlanningInstance,
    instance_text: String,
}

fn prepare(name: &str, flags: Settings, config: Option<&Path>) -> std::result::Result<Job, InputError> {
    let file = match config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let config = RunConfig::resolve(name, flags.over(file))?;
    if name != "validate" {
        iesplan::solver::default_backend()?;
    }
    let instance_text =
        fs::read_to_string(&config.instance).with_context(|| format!("cannot read {}", config.instance.display()))?;
    let instance = model::from_toml_str(&instance_text).map_err(|e| {
        eprintln!("INSTANCE_PARSE: {e}");
        anyhow::anyhow!("cannot parse {}", config.instance.display())
    })?;
    let diagnostics = model::validate_instance(&instance);
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        return Err(InputError(anyhow::anyhow!("instance has {} violated invariant(s)", diagnostics.len())));
    }
    if name != "validate" {
        fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    }
    Ok(Job { config, instance, instance_text })
}

fn run(cli: Cli) -> std::result::Result<Result<Outcome>, InputError> {
    let cfg = cli.config.as_deref();
    let (name, flags) = match cli.command {
        Command::Validate(s) => ("validate", s),
        Command::Plan(s) => ("plan", s),
        Command::Assess(s) => ("assess", s),
        Command::Compare(s) => ("compare", s),
        Command::Sweep(s) => ("sweep", s),
    };
    let job = prepare(name, flags, cfg)?;
    match name {
        "validate" => {
            println!("{}: ok", job.config.instance.display());
            Ok(Ok(Outcome::Done))
        }
        "plan" => Ok(cmd_plan(&job)),
        "assess" => {
            let plan = match &job.config.plan {
                Some(p) => Some(report::read_plan(p)?.decision(&job.instance)?),
                None => None,
            };
            Ok(cmd_assess(&job, plan))
        }
        "compare" => {
            if job.config.modes.len() < 2 {
                return Err(InputError(anyhow::anyhow!("compare needs at least two modes, got {}", job.config.modes.len())));
            }
            Ok(cmd_compare(&job))
        }
        "sweep" => {
            if job.config.values.is_empty() {
                return Err(InputError(anyhow::anyhow!("sweep needs --values")));
            }
            Ok(cmd_sweep(&job))
        }
        _ => unreachable!(),
    }
}

/// A finished planning run, whatever the planner.
struct Planned {
    mode: Mode,
    solution: PlanSolution,
    converged: bool,
    status: &'static str,
    lower: Option<f64>,
    upper: Option<f64>,
    trace: Vec<OuterTraceRow>,
    inner_trace: Vec<(usize, iesplan::inner::InnerTraceRow)>,
}

fn plan_with(config: &RunConfig, instance: &PlanningInstance, mode: Mode) -> Result<Planned> {
    let single = |solution: PlanSolution| {
        let total = solution.costs.total;
        Planned {
            mode,
            solution,
            converged: true,
            status: "optimal",
            lower: None,
            upper: None,
            trace: vec![OuterTraceRow {
                q: 1,
                lower: total,
                upper: total,
                mp_time: Default::default(),
                sp_time: Default::default(),
                scenario: String::new(),
            }],
            inner_trace: Vec::new(),
        }
    };
    Ok(match mode {
        Mode::Deterministic => single(robust::solve_deterministic(instance, &config.solve_options())?),
        Mode::N1 => single(robust::solve_n1(instance, &config.solve_options())?),
        Mode::Robust => {
            let budgets = config.budgets(instance.budgets());
            let s = robust::solve_robust(instance, &budgets, &config.robust_options())?;
            Planned {
                mode,
                converged: s.status.is_converged(),
                status: s.status.as_str(),
                lower: Some(s.lower),
                upper: Some(s.upper),
                solution: s.plan,
                trace: s.trace,
                inner_trace: s.inner_trace,
            }
        }
    })
}

fn write_planned(dir: &Path, job: &Job, config: &RunConfig, p: &Planned) -> Result<()> {
    fs::create_dir_all(dir)?;
    report::write_plan(&dir.join("plan.toml"), &job.instance, &p.solution.decision)?;
    let costs = CostFile {
        mode: p.mode.as_str().into(),
        status: p.status.into(),
        costs: p.solution.costs,
        lower: p.lower,
        upper: p.upper,
        iterations: Some(p.trace.len()),
    };
    report::write_costs(&dir.join("costs.toml"), &costs)?;
    report::write_outer_trace(&dir.join("outer_trace.csv"), &p.trace)?;
    report::write_inner_trace(&dir.join("inner_trace.csv"), &p.inner_trace)?;
    report::write_dispatch(&dir.join("dispatch.csv"), &job.instance, &p.solution.operation)?;
    write_manifest(dir, job, config)
}

fn write_manifest(dir: &Path, job: &Job, config: &RunConfig) -> Result<()> {
    let m = Manifest::new(&config.command, &config.to_toml(), &job.instance_text, config.seed, std::env::args().collect());
    report::write_manifest(&dir.join("manifest.toml"), &m)?;
    Ok(())
}

fn cmd_plan(job: &Job) -> Result<Outcome> {
    let c = &job.config;
    let p = plan_with(c, &job.instance, c.mode)?;
    write_planned(&c.out, job, c, &p)?;
    let costs = &p.solution.costs;
    println!("mode      {}", c.mode.as_str());
    println!("status    {}", p.status);
    println!("built     {}", report::built_ids(&job.instance, &p.solution.decision));
    for (s, cap) in job.instance.storage.iter().zip(&p.solution.decision.storage) {
        println!("{:<9} energy {:.4} power {:.4}", s.kind.to_string(), cap.energy, cap.power);
    }
    println!("invest    {:.6}", costs.invest);
    println!("operate   {:.6}", costs.operate);
    println!("shed      {:.6}", costs.shed);
    println!("total     {:.6}", costs.total);
    println!("output    {}", c.out.display());
    Ok(if p.converged { Outcome::Done } else { Outcome::NotConverged })
}

fn assess_plan(config: &RunConfig, instance: &PlanningInstance, decision: &InvestmentDecision) -> Result<ReliabilityIndices> {
    if instance.reliability.is_none() {
        warn!("instance has no reliability data; components never fail");
    }
    Ok(reliability::assess(instance, decision, &config.mcs_options())?)
}

fn cmd_assess(job: &Job, plan: Option<InvestmentDecision>) -> Result<Outcome> {
    let c = &job.config;
    let (decision, converged) = match plan {
        Some(d) => (d, true),
        None => {
            let p = plan_with(c, &job.instance, c.mode)?;
            write_planned(&c.out, job, c, &p)?;
            (p.solution.decision, p.converged)
        }
    };
    let r = assess_plan(c, &job.instance, &decision)?;
    report::write_reliability(&c.out.join("reliability.csv"), &r)?;
    write_manifest(&c.out, job, c)?;
    println!("{:<8} {:>12} {:>10} {:>10} {:>10} {:>10} {:>10}", "carrier", "EENS", "±", "LOLE", "±", "LOLF", "±");
    for d in model::Carrier::LOADS {
        let x = r.of(d);
        println!(
            "{:<8} {:>12.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            d.to_string(),
            x.eens,
            x.eens_ci,
            x.lole,
            x.lole_ci,
            x.lolf,
            x.lolf_ci
        );
    }
    println!("years    {}{}", r.years, if r.partial { " (partial)" } else { "" });
    Ok(if converged && !r.partial { Outcome::Done } else { Outcome::NotConverged })
}

fn cmd_compare(job: &Job) -> Result<Outcome> {
    let c = &job.config;
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (i, &mode) in c.modes.iter().enumerate() {
        let dir = c.out.join(format!("{i}-{}", mode.as_str()));
        let result = plan_with(c, &job.instance, mode).and_then(|p| {
            write_planned(&dir, job, c, &p)?;
            let r = assess_plan(c, &job.instance, &p.solution.decision)?;
            report::write_reliability(&dir.join("reliability.csv"), &r)?;
            Ok((p, r))
        });
        match result {
            Ok((p, r)) => {
                all_ok &= p.converged && !r.partial;
                rows.push(CompareRow::new(mode.as_str(), p.status, p.solution.costs.total, &r));
            }
            Err(e) => {
                warn!("{} failed: {}", mode.as_str(), describe(&e));
                all_ok = false;
                rows.push(CompareRow::failed(mode.as_str(), &describe(&e)));
            }
        }
        info!("{} done", mode.as_str());
    }
    report::fill_increments(&mut rows);
    report::write_compare(&c.out.join("compare.csv"), &rows)?;
    write_manifest(&c.out, job, c)?;
    println!("{:<14} {:<14} {:>16} {:>16} {:>12}", "mode", "status", "total_cost", "increment", "EENS");
    for r in &rows {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        println!("{:<14} {:<14} {:>16} {:>16} {:>12}", r.mode, r.status, f(r.total_cost), f(r.cost_increment), f(r.eens_total));
    }
    Ok(if all_ok { Outcome::Done } else { Outcome::NotConverged })
}

fn cmd_sweep(job: &Job) -> Result<Outcome> {
    let c = &job.config;
    let name = c.parameter.as_str();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for &v in &c.values {
        let mut member = c.clone();
        member.mode = Mode::Robust;
        let mut budgets = c.budgets(job.instance.budgets());
        c.parameter.set(&mut budgets, v);
        member.gamma_n = Some(budgets.gamma_n);
        member.gamma_i = Some(budgets.gamma_i);
        member.gamma_d = Some(budgets.gamma_d);
        member.gamma_l = Some(budgets.gamma_l);
        let dir = c.out.join(format!("{name}-{v}"));
        match plan_with(&member, &job.instance, Mode::Robust).and_then(|p| write_planned(&dir, job, &member, &p).map(|_| p)) {
            Ok(p) => {
                all_ok &= p.converged;
                rows.push(SweepRow::solved(name, v, p.status, &job.instance, &p.solution.decision, &p.solution.costs));
            }
            Err(e) => {
                warn!("{name}={v} failed: {}", describe(&e));
                all_ok = false;
                rows.push(SweepRow::failed(name, v, &describe(&e)));
            }
        }
    }
    report::write_sweep(&c.out.join("sweep.csv"), &rows)?;
    write_manifest(&c.out, job, c)?;
    println!("{:<8} {:<14} {:>16} {:>10}  built", name, "status", "total_cost", "bess_e/p");
    for r in &rows {
        let cost = r.total_cost.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let ratio = r.bess_ratio.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
        println!("{:<8} {:<14} {:>16} {:>10}  {}", r.value, r.status, cost, ratio, r.built);
    }
    if rows.iter().all(|r| r.total_cost.is_none()) {
        bail!("every sweep point failed");
    }
    Ok(if all_ok { Outcome::Done } else { Outcome::NotConverged })
}
