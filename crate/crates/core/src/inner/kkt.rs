use super::dual::{derive_dual_constraints, is_free, storage_cap, ParametricLp};
use super::theta::add_theta;
use super::{Charging, InnerError, MasterProblem, Stage};
use crate::dispatch::{Bindings, RowSense};
use crate::model::{InvestmentDecision, PlanningInstance, UncertaintyBudgets};
use crate::solver::{Direction, LinExpr, Model, Sense, Var};

/// max σ s.t. for each pooled charging pattern, (x, π) satisfies the recourse KKT system and
/// σ ≤ c'x. Complementarity is written with one binary per inequality row and per column.
pub fn build_mps_kkt(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    stage: &Stage,
    pool: &[Charging],
) -> Result<MasterProblem, InnerError> {
    let mut model = Model::new();
    let theta = add_theta(&mut model, instance, decision, budgets, true, stage.contingency())?;
    let sigma = model.continuous("sigma", f64::NEG_INFINITY, f64::INFINITY)?;
    let f = stage.formulation(instance, budgets).merged();
    for (r, charging) in pool.iter().enumerate() {
        let bindings = theta.bind(Bindings::fixed(instance, decision)).with_charging(charging.clone());
        let lp = ParametricLp::build(instance, decision, stage, &f, &bindings)?;
        let fallback = storage_cap(instance, stage);
        let caps: Vec<f64> = lp.dual_caps.iter().map(|&c| if c.is_finite() { c } else { fallback }).collect();
        let x: Vec<Var> = lp
            .columns
            .iter()
            .zip(&lp.column_bounds)
            .map(|(c, &u)| model.continuous(format!("x{r}[{c}]"), 0.0, u.max(0.0)))
            .collect::<Result<_, _>>()?;
        let pi: Vec<Var> = lp
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let lo = if is_free(row) { -caps[i] } else { 0.0 };
                model.continuous(format!("pi{r}[{i}]"), lo, caps[i])
            })
            .collect::<Result<_, _>>()?;
        let index = lp.index();
        for (i, row) in lp.rows.iter().enumerate() {
            let mut slack = LinExpr::new();
            let mut scale = row.rhs.constant.abs();
            for &(v, a) in &row.terms {
                let j = index[&v];
                slack.add_term(x[j], a);
                scale += a.abs() * lp.column_bounds[j];
            }
            for &(_, c) in &row.rhs.terms {
                scale += c.abs();
            }
            let slack = slack - row.rhs.clone();
            match row.sense {
                RowSense::Eq => {
                    model.add_constraint(format!("pf{r}[{i}]"), slack, Sense::Eq, 0.0)?;
                }
                RowSense::Ge => {
                    model.add_constraint(format!("pf{r}[{i}]"), slack.clone(), Sense::Ge, 0.0)?;
                    let nu = model.binary(format!("nu{r}[{i}]"));
                    model.add_constraint(format!("cs_row{r}[{i}]"), slack - LinExpr::term(nu, scale), Sense::Le, 0.0)?;
                    model.add_constraint(format!("cs_pi{r}[{i}]"), LinExpr::from(pi[i]) + LinExpr::term(nu, caps[i]), Sense::Le, caps[i])?;
                }
            }
        }
        for (j, dc) in derive_dual_constraints(&lp)?.into_iter().enumerate() {
            // reduced cost c_j − Σ a π ≥ 0
            let mut reduced = LinExpr::constant(dc.cost);
            let mut bound = dc.cost.abs();
            for &(i, a) in &dc.terms {
                reduced.add_term(pi[i], -a);
                bound += a.abs() * caps[i];
            }
            model.add_constraint(format!("df{r}[{}]", dc.column), reduced.clone(), Sense::Ge, 0.0)?;
            let u = lp.column_bounds[j];
            if u <= 0.0 {
                continue;
            }
            let mu = model.binary(format!("mu{r}[{}]", dc.column));
            model.add_constraint(format!("cs_x{r}[{}]", dc.column), LinExpr::from(x[j]) - LinExpr::term(mu, u), Sense::Le, 0.0)?;
            model.add_constraint(format!("cs_rc{r}[{}]", dc.column), reduced + LinExpr::term(mu, bound), Sense::Le, bound)?;
        }
        let value: LinExpr = x.iter().zip(&lp.costs).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| LinExpr::term(v, c)).sum();
        model.add_constraint(format!("value[{r}]"), LinExpr::from(sigma) - value, Sense::Le, 0.0)?;
    }
    model.set_objective(Direction::Maximize, sigma.into())?;
    Ok(MasterProblem { model, theta, sigma })
}
