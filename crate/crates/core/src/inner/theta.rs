use std::collections::{BTreeMap, HashSet};

use crate::dispatch::{Binding, Bindings};
use crate::model::{CarrierSeries, Component, IntervalScope, InvestmentDecision, LoadBudgetScope, PlanningInstance, UncertaintyBudgets};
use crate::solver::{LinExpr, Model, ModelError, Sense, SolveResult, Var};
use crate::uncertainty::{Scenario, SetShape};

/// Uncertainty binaries of an inner master: u± for loads, s and y for components.
#[derive(Clone, Debug, Default)]
pub struct ThetaVars {
    pub up: BTreeMap<(usize, usize), Var>,
    pub down: BTreeMap<(usize, usize), Var>,
    pub state: BTreeMap<(usize, usize), Var>,
    pub start: BTreeMap<(usize, usize), Var>,
    exclusive: HashSet<(usize, usize)>,
    components: usize,
    hours: usize,
}

impl ThetaVars {
    pub fn is_exclusive(&self, d: usize, t: usize) -> bool {
        self.exclusive.contains(&(d, t))
    }

    pub fn count(&self) -> usize {
        self.up.len() + self.down.len() + self.state.len() + self.start.len()
    }

    /// Bind loads and states to these variables on top of fixed investment bindings.
    pub fn bind(&self, mut base: Bindings) -> Bindings {
        for (&(d, t), &v) in &self.up {
            base.load_up[d][t] = Binding::Expr(v.into());
        }
        for (&(d, t), &v) in &self.down {
            base.load_down[d][t] = Binding::Expr(v.into());
        }
        for (&(c, t), &v) in &self.state {
            base.state[c][t] = Binding::Expr(v.into());
        }
        base
    }

    pub fn scenario(&self, r: &SolveResult) -> Scenario {
        let mut s = Scenario::nominal(self.components, self.hours);
        for (&(d, t), &v) in &self.up {
            s.load.up[d][t] = r.value(v) > 0.5;
        }
        for (&(d, t), &v) in &self.down {
            s.load.down[d][t] = r.value(v) > 0.5;
        }
        for (&(c, t), &v) in &self.state {
            s.contingency.state[c][t] = r.value(v) > 0.5;
        }
        for (&(c, t), &v) in &self.start {
            s.contingency.start[c][t] = r.value(v) > 0.5;
        }
        s
    }
}

/// Membership constraints of 𝕃 (when `loads`) and 𝕊 (when `states`) over fresh binaries.
///
/// Components that are not built never get variables: their failure changes nothing, so the
/// worst case is unaffected.
pub fn add_theta(
    model: &mut Model,
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    budgets: &UncertaintyBudgets,
    loads: bool,
    states: bool,
) -> Result<ThetaVars, ModelError> {
    let period = instance.period();
    let components = instance.components();
    let mut th = ThetaVars { components: components.len(), hours: period, ..Default::default() };
    if loads && budgets.gamma_l > 0 {
        let delta = budgets.deltas(&instance.loads.nominal);
        for d in 0..3 {
            for t in 0..period {
                if delta.by_index(d)[t] > 0.0 {
                    let up = model.binary(format!("u+[{d},{t}]"));
                    let down = model.binary(format!("u-[{d},{t}]"));
                    model.add_constraint(format!("excl[{d},{t}]"), LinExpr::from(up) + down, Sense::Le, 1.0)?;
                    th.exclusive.insert((d, t));
                    th.up.insert((d, t), up);
                    th.down.insert((d, t), down);
                }
            }
        }
        let budget_row = |th: &ThetaVars, d: Option<usize>| -> LinExpr {
            th.up.iter().chain(&th.down).filter(|((dd, _), _)| d.map_or(true, |d| *dd == d)).map(|(_, &v)| LinExpr::from(v)).sum()
        };
        match budgets.load_scope {
            LoadBudgetScope::PerCarrier => {
                for d in 0..3 {
                    let e = budget_row(&th, Some(d));
                    if e.terms.len() > budgets.gamma_l {
                        model.add_constraint(format!("budget_l[{d}]"), e, Sense::Le, budgets.gamma_l as f64)?;
                    }
                }
            }
            LoadBudgetScope::Global => {
                let e = budget_row(&th, None);
                if e.terms.len() > budgets.gamma_l {
                    model.add_constraint("budget_l", e, Sense::Le, budgets.gamma_l as f64)?;
                }
            }
        }
    }
    if !states || budgets.gamma_n == 0 {
        return Ok(th);
    }
    let shape = SetShape::new(instance, budgets);
    let active: Vec<usize> = components
        .iter()
        .enumerate()
        .filter(|(c, comp)| {
            let built = match comp {
                Component::Equipment(n) => decision.build[*n],
                Component::Feeder(_) => true,
            };
            built && shape.windows[*c].1 > 0
        })
        .map(|(c, _)| c)
        .collect();
    for &c in &active {
        let (gi, gd) = shape.windows[c];
        for t in 0..period {
            th.state.insert((c, t), model.binary(format!("s[{c},{t}]")));
            th.start.insert((c, t), model.binary(format!("y[{c},{t}]")));
        }
        for t in 0..period {
            // Σ_{window} y + s = 1
            let mut e: LinExpr = shape.window(t, gd).map(|v| LinExpr::from(th.start[&(c, v)])).sum();
            e += th.state[&(c, t)];
            model.add_constraint(format!("dur[{c},{t}]"), e, Sense::Eq, 1.0)?;
            if shape.interval_scope == IntervalScope::PerComponent && shape.window(t, gi).count() > 1 {
                let e: LinExpr = shape.window(t, gi).map(|v| LinExpr::from(th.start[&(c, v)])).sum();
                model.add_constraint(format!("int[{c},{t}]"), e, Sense::Le, 1.0)?;
            }
        }
    }
    if shape.interval_scope == IntervalScope::Global && shape.gamma_i_global > 0 {
        for t in 0..period {
            let e: LinExpr = active
                .iter()
                .flat_map(|&c| shape.window(t, shape.gamma_i_global).map(move |v| (c, v)))
                .map(|key| LinExpr::from(th.start[&key]))
                .sum();
            if e.terms.len() > 1 {
                model.add_constraint(format!("int[{t}]"), e, Sense::Le, 1.0)?;
            }
        }
    }
    if active.len() > budgets.gamma_n {
        for t in 0..period {
            let e: LinExpr = active.iter().map(|&c| LinExpr::from(th.state[&(c, t)])).sum();
            model.add_constraint(format!("simul[{t}]"), e, Sense::Ge, (active.len() - budgets.gamma_n) as f64)?;
        }
    }
    Ok(th)
}

/// Load deviations that the formulation must carry for these budgets.
pub fn theta_deltas(instance: &PlanningInstance, budgets: &UncertaintyBudgets) -> CarrierSeries {
    if budgets.gamma_l == 0 {
        CarrierSeries::zeros(instance.period())
    } else {
        budgets.deltas(&instance.loads.nominal)
    }
}
