use std::collections::HashMap;

use super::dual::{derive_dual_constraints, is_free, ParametricLp};
use super::linearize::{linearize_exclusive_pair, linearize_product};
use super::theta::add_theta;
use super::{Charging, InnerError, Linearization, MasterProblem, Stage};
use crate::dispatch::{Bindings, Family};
use crate::model::{InvestmentDecision, PlanningInstance, UncertaintyBudgets};
use crate::solver::{Direction, LinExpr, Model, Sense, Var};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum ThetaKind {
    Up(usize, usize),
    Down(usize, usize),
    State,
}

/// max σ s.t. σ ≤ dual objective of the recourse LP for each pooled charging pattern.
pub fn build_mps_sd(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    stage: &Stage,
    pool: &[Charging],
    linearization: Linearization,
) -> Result<MasterProblem, InnerError> {
    let mut model = Model::new();
    let theta = add_theta(&mut model, instance, decision, budgets, true, stage.contingency())?;
    let mut kind: HashMap<Var, ThetaKind> = HashMap::new();
    for (&(d, t), &v) in &theta.up {
        kind.insert(v, ThetaKind::Up(d, t));
    }
    for (&(d, t), &v) in &theta.down {
        kind.insert(v, ThetaKind::Down(d, t));
    }
    for &v in theta.state.values() {
        kind.insert(v, ThetaKind::State);
    }
    let sigma = model.continuous("sigma", f64::NEG_INFINITY, f64::INFINITY)?;
    let f = stage.formulation(instance, budgets).merged();
    for (r, charging) in pool.iter().enumerate() {
        let bindings = theta.bind(Bindings::fixed(instance, decision)).with_charging(charging.clone());
        let lp = ParametricLp::build(instance, decision, stage, &f, &bindings)?;
        let pi: Vec<Var> = lp
            .rows
            .iter()
            .zip(&lp.dual_caps)
            .enumerate()
            .map(|(i, (row, &cap))| {
                let (lo, hi) = if is_free(row) { (f64::NEG_INFINITY, f64::INFINITY) } else { (0.0, cap) };
                model.continuous(format!("pi{r}[{i}]"), lo, hi)
            })
            .collect::<Result<_, _>>()?;
        for dc in derive_dual_constraints(&lp)? {
            let e: LinExpr = dc.terms.iter().map(|&(i, a)| LinExpr::term(pi[i], a)).sum();
            if !e.is_empty() {
                model.add_constraint(format!("dual{r}[{}]", dc.column), e, Sense::Le, dc.cost)?;
            }
        }
        // σ − Σ rhs(θ)·π ≤ 0
        let mut cut = LinExpr::from(sigma);
        for (i, row) in lp.rows.iter().enumerate() {
            if row.rhs.constant != 0.0 {
                cut.add_term(pi[i], -row.rhs.constant);
            }
            let cap = lp.dual_caps[i];
            let paired = linearization == Linearization::Strengthened && matches!(row.family, Family::Balance(_));
            let mut done = Vec::new();
            for &(u, coef) in &row.rhs.terms {
                if done.contains(&u) {
                    continue;
                }
                let name = format!("{r},{i},{}", u.index());
                if paired {
                    if let Some(ThetaKind::Up(d, t)) = kind.get(&u).copied() {
                        let down = theta.down[&(d, t)];
                        let down_coef = row.rhs.terms.iter().find(|(v, _)| *v == down).map(|&(_, c)| c);
                        if let Some(dc) = down_coef {
                            let (wp, wm) = linearize_exclusive_pair(&mut model, u, down, pi[i], cap, theta.is_exclusive(d, t), &name)?;
                            cut.add_term(wp, -coef);
                            cut.add_term(wm, -dc);
                            done.push(down);
                            continue;
                        }
                    }
                }
                let w = linearize_product(&mut model, u, pi[i], cap, &name)?;
                cut.add_term(w, -coef);
            }
        }
        model.add_constraint(format!("value[{r}]"), cut, Sense::Le, 0.0)?;
    }
    model.set_objective(Direction::Maximize, sigma.into())?;
    Ok(MasterProblem { model, theta, sigma })
}
