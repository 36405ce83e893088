use std::collections::HashMap;

use thiserror::Error;

use super::{CostSpec, Family, Formulation, OpVar, Param, Row, RowSense};
use crate::model::{Carrier, InvestmentDecision, PlanningInstance, ScenarioOperation, StorageCapacity, StorageKind};
use crate::solver::{LinExpr, Model, ModelError, Sense, SolveResult, Var, VarKind};
use crate::uncertainty::Scenario;

/// What a parameter stands for in a concrete model.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Const(f64),
    Expr(LinExpr),
}

#[derive(Debug, Error, PartialEq)]
pub enum BindError {
    #[error("row {row}: product of two decision-dependent parameters")]
    NonLinear { row: String },
    #[error("parameter {0:?} has no binding")]
    Unbound(Param),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parameter values for one materialization.
#[derive(Clone, Debug)]
pub struct Bindings {
    pub build: Vec<Binding>,
    pub energy: Vec<Binding>,
    pub power: Vec<Binding>,
    /// `charging[sc][k][t]`, needed only for merged caps.
    pub charging: Option<[Vec<Vec<f64>>; 2]>,
    pub load_up: Vec<Vec<Binding>>,
    pub load_down: Vec<Vec<Binding>>,
    pub state: Vec<Vec<Binding>>,
}

impl Bindings {
    /// A fixed decision with the nominal scenario.
    pub fn fixed(instance: &PlanningInstance, decision: &InvestmentDecision) -> Self {
        let period = instance.period();
        let nc = instance.components().len();
        Bindings {
            build: decision.build.iter().map(|&b| Binding::Const(b as u8 as f64)).collect(),
            energy: decision.storage.iter().map(|s| Binding::Const(s.energy)).collect(),
            power: instance
                .storage
                .iter()
                .zip(&decision.storage)
                .map(|(spec, s)| Binding::Const(if spec.has_power_variable() { s.power } else { s.energy / 2.0 }))
                .collect(),
            charging: None,
            load_up: vec![vec![Binding::Const(0.0); period]; 3],
            load_down: vec![vec![Binding::Const(0.0); period]; 3],
            state: vec![vec![Binding::Const(1.0); period]; nc],
        }
    }

    /// Investment left to the model, nominal scenario.
    pub fn variable(instance: &PlanningInstance, inv: &InvestmentVars) -> Self {
        let mut b = Bindings::fixed(instance, &InvestmentDecision::empty(instance));
        b.build = inv.build.iter().map(|&v| Binding::Expr(v.into())).collect();
        b.energy = inv.energy.iter().map(|&v| Binding::Expr(v.into())).collect();
        b.power = inv.power_exprs();
        b
    }

    pub fn with_scenario(mut self, scenario: &Scenario) -> Self {
        for d in 0..3 {
            for (t, (&u, &l)) in scenario.load.up[d].iter().zip(&scenario.load.down[d]).enumerate() {
                self.load_up[d][t] = Binding::Const(u as u8 as f64);
                self.load_down[d][t] = Binding::Const(l as u8 as f64);
            }
        }
        for (c, row) in scenario.contingency.state.iter().enumerate() {
            for (t, &s) in row.iter().enumerate() {
                self.state[c][t] = Binding::Const(s as u8 as f64);
            }
        }
        self
    }

    pub fn with_charging(mut self, charging: [Vec<Vec<f64>>; 2]) -> Self {
        self.charging = Some(charging);
        self
    }

    fn get(&self, p: Param) -> Result<Binding, BindError> {
        let b = match p {
            Param::Build(n) => self.build.get(n),
            Param::EnergyCap(k) => self.energy.get(k),
            Param::PowerCap(k) => self.power.get(k),
            Param::Charging { sc, k, t } => {
                let z = self.charging.as_ref().and_then(|c| c[sc as usize].get(k)).and_then(|r| r.get(t));
                return z.map(|&z| Binding::Const(z)).ok_or(BindError::Unbound(p));
            }
            Param::LoadUp { d, t } => self.load_up.get(d).and_then(|r| r.get(t)),
            Param::LoadDown { d, t } => self.load_down.get(d).and_then(|r| r.get(t)),
            Param::State { c, t } => self.state.get(c).and_then(|r| r.get(t)),
        };
        b.cloned().ok_or(BindError::Unbound(p))
    }
}

/// A row with its right-hand side resolved to an affine expression over model variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LinRow {
    pub name: String,
    pub family: Family,
    pub sc: u8,
    pub storage: Option<usize>,
    pub terms: Vec<(OpVar, f64)>,
    pub sense: RowSense,
    pub rhs: LinExpr,
}

pub fn materialize(row: &Row, bindings: &Bindings) -> Result<LinRow, BindError> {
    let mut rhs = LinExpr::new();
    for m in &row.rhs {
        let mut coef = m.coef;
        let mut expr: Option<LinExpr> = None;
        for &p in &m.factors {
            match bindings.get(p)? {
                Binding::Const(c) => coef *= c,
                Binding::Expr(e) if expr.is_none() => expr = Some(e),
                Binding::Expr(_) => return Err(BindError::NonLinear { row: row.name.clone() }),
            }
        }
        if coef == 0.0 {
            continue;
        }
        match expr {
            None => {
                rhs.add_constant(coef);
            }
            Some(e) => rhs += e * coef,
        }
    }
    Ok(LinRow {
        name: row.name.clone(),
        family: row.family,
        sc: row.sc,
        storage: row.storage,
        terms: row.terms.clone(),
        sense: row.sense,
        rhs: rhs.canonical(),
    })
}

pub fn materialize_all(f: &Formulation, bindings: &Bindings) -> Result<Vec<LinRow>, BindError> {
    f.rows().iter().map(|r| materialize(r, bindings)).collect()
}

/// First-stage variables of a planning model.
#[derive(Clone, Debug)]
pub struct InvestmentVars {
    pub build: Vec<Var>,
    pub energy: Vec<Var>,
    /// None for TESS, whose power is half its energy.
    pub power: Vec<Option<Var>>,
}

impl InvestmentVars {
    pub fn power_exprs(&self) -> Vec<Binding> {
        self.power
            .iter()
            .zip(&self.energy)
            .map(|(p, &e)| Binding::Expr(match p {
                Some(p) => (*p).into(),
                None => LinExpr::term(e, 0.5),
            }))
            .collect()
    }

    pub fn f_inv(&self, instance: &PlanningInstance) -> LinExpr {
        let mut e = LinExpr::new();
        for (n, &v) in self.build.iter().enumerate() {
            e.add_term(v, instance.equipment[n].invest_cost);
        }
        for (k, spec) in instance.storage.iter().enumerate() {
            e.add_term(self.energy[k], spec.cost_energy);
            if let Some(p) = self.power[k] {
                e.add_term(p, spec.cost_power);
            }
        }
        e.canonical()
    }

    pub fn decision(&self, instance: &PlanningInstance, result: &SolveResult) -> InvestmentDecision {
        InvestmentDecision {
            build: self.build.iter().map(|&v| result.value(v) > 0.5).collect(),
            storage: instance
                .storage
                .iter()
                .enumerate()
                .map(|(k, spec)| {
                    let energy = result.value(self.energy[k]).max(0.0);
                    let power = match self.power[k] {
                        Some(p) => result.value(p).max(0.0),
                        None => energy / 2.0,
                    };
                    debug_assert!(spec.kind == StorageKind::Bess || self.power[k].is_none());
                    StorageCapacity { energy, power }
                })
                .collect(),
        }
    }
}

/// Adds X^Equi, X^ESS_E and X^ESS_P with X_E ≥ X_P ≥ 0 and X_P ≤ M.
pub fn add_investment(model: &mut Model, instance: &PlanningInstance) -> Result<InvestmentVars, ModelError> {
    let big_m = instance.big_m();
    let build = instance.equipment.iter().map(|e| model.binary(format!("x[{}]", e.id))).collect();
    let mut energy = Vec::new();
    let mut power = Vec::new();
    for spec in &instance.storage {
        let cap = match spec.kind {
            StorageKind::Bess => spec.max_energy.unwrap_or(f64::INFINITY),
            StorageKind::Tess => spec.max_energy.unwrap_or(f64::INFINITY).min(2.0 * big_m),
        };
        let e = model.continuous(format!("xe[{}]", spec.kind), 0.0, cap)?;
        energy.push(e);
        if spec.has_power_variable() {
            let p = model.continuous(format!("xp[{}]", spec.kind), 0.0, big_m.min(cap))?;
            model.add_constraint(format!("ratio[{}]", spec.kind), LinExpr::from(e) - p, Sense::Ge, 0.0)?;
            power.push(Some(p));
        } else {
            power.push(None);
        }
    }
    Ok(InvestmentVars { build, energy, power })
}

/// Operation variables and rows of one scenario copy set, added to a model.
#[derive(Clone, Debug)]
pub struct Block {
    pub tag: String,
    pub vars: HashMap<OpVar, Var>,
    /// Objective contribution under the requested cost spec.
    pub cost: LinExpr,
}

impl Block {
    pub fn var(&self, v: OpVar) -> Option<Var> {
        self.vars.get(&v).copied()
    }

    /// Cost of one scenario copy under a cost spec.
    pub fn scenario_cost(&self, f: &Formulation, spec: &CostSpec, sc: u8) -> LinExpr {
        let mut e = LinExpr::new();
        for (&op, &v) in &self.vars {
            if op.scenario() == sc {
                let c = f.cost(op, spec);
                if c != 0.0 {
                    e.add_term(v, c);
                }
            }
        }
        e.canonical()
    }

    pub fn operation(&self, instance: &PlanningInstance, result: &SolveResult, sc: u8) -> ScenarioOperation {
        let mut op = ScenarioOperation::zeros(instance);
        let val = |v: OpVar| self.var(v).map(|x| result.value(x)).unwrap_or(0.0);
        for t in 0..instance.period() {
            op.substation[t] = val(OpVar::Substation { sc, t });
            for n in 0..instance.equipment.len() {
                op.equipment[n][t] = val(OpVar::Equipment { sc, n, t });
            }
            for k in 0..instance.storage.len() {
                op.charge[k][t] = val(OpVar::Charge { sc, k, t });
                op.discharge[k][t] = val(OpVar::Discharge { sc, k, t });
                op.energy[k][t] = val(OpVar::Energy { sc, k, t });
                op.charging[k][t] = val(OpVar::Mode { sc, k, t }) > 0.5;
            }
            if sc == 1 {
                for (d, carrier) in Carrier::LOADS.into_iter().enumerate() {
                    op.shed.get_mut(carrier)[t] = val(OpVar::Shed { d, t });
                }
            }
        }
        op
    }
}

/// Materializes the formulation into `model` with fresh operation variables.
pub fn add_block(
    model: &mut Model,
    f: &Formulation,
    bindings: &Bindings,
    costs: &CostSpec,
    tag: &str,
) -> Result<Block, BindError> {
    let mut vars = HashMap::new();
    let mut cost = LinExpr::new();
    for op in f.columns() {
        let kind = if op.is_binary() { VarKind::Binary } else { VarKind::Continuous };
        let v = model.add_var(format!("{tag}{op}"), kind, 0.0, if op.is_binary() { 1.0 } else { f64::INFINITY })?;
        vars.insert(op, v);
        let c = f.cost(op, costs);
        if c != 0.0 {
            cost.add_term(v, c);
        }
    }
    for row in f.rows() {
        let lin = materialize(&row, bindings)?;
        let mut expr = LinExpr::new();
        for &(op, c) in &lin.terms {
            expr.add_term(vars[&op], c);
        }
        let sense = match lin.sense {
            RowSense::Ge => Sense::Ge,
            RowSense::Eq => Sense::Eq,
        };
        model.add_constraint(format!("{tag}{}", lin.name), expr - lin.rhs, sense, 0.0)?;
    }
    Ok(Block { tag: tag.to_string(), vars, cost: cost.canonical() })
}

/// f_inv, f_ope0 and f_shed1 as expressions over model variables.
#[derive(Clone, Debug)]
pub struct ObjectiveTerms {
    pub f_inv: LinExpr,
    pub f_ope0: LinExpr,
    pub f_shed1: LinExpr,
}

pub fn objective_terms(instance: &PlanningInstance, inv: Option<&InvestmentVars>, f: &Formulation, block: &Block) -> ObjectiveTerms {
    let operate = CostSpec { operate: true, shed: false, unserved: 0.0, scale: 1.0 };
    ObjectiveTerms {
        f_inv: inv.map(|i| i.f_inv(instance)).unwrap_or_default(),
        f_ope0: block.scenario_cost(f, &operate, 0),
        f_shed1: block.scenario_cost(f, &CostSpec::shed_only(), 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{Formulation, Monomial};
    use crate::model::fixtures::*;
    use crate::model::*;
    use crate::solver::{self, Direction, SolveOptions, SolveStatus};

    fn solve_min(model: &mut Model, obj: LinExpr) -> SolveResult {
        model.set_objective(Direction::Minimize, obj).unwrap();
        solver::solve(model, &SolveOptions::exact()).unwrap()
    }

    #[test]
    fn product_of_two_variables_is_rejected() {
        let mut m = Model::new();
        let a = m.binary("a");
        let b = m.binary("b");
        let mut bind = Bindings::fixed(&toy(1), &InvestmentDecision { build: vec![], storage: vec![] });
        bind.build = vec![Binding::Expr(a.into())];
        bind.state = vec![vec![Binding::Expr(b.into())]];
        let row = Row {
            family: Family::EquipmentCap,
            sc: 1,
            storage: None,
            name: "r".into(),
            terms: vec![],
            sense: RowSense::Ge,
            rhs: vec![Monomial::of(2.0, &[Param::Build(0), Param::State { c: 0, t: 0 }])],
        };
        assert_eq!(materialize(&row, &bind), Err(BindError::NonLinear { row: "r".into() }));
        bind.state = vec![vec![Binding::Const(1.0)]];
        let lin = materialize(&row, &bind).unwrap();
        assert_eq!(lin.rhs.terms, vec![(a, 2.0)]);
    }

    #[test]
    fn zero_everything_is_feasible() {
        let inst = toy(4);
        let d = InvestmentDecision::empty(&inst);
        let f = Formulation::new(&inst);
        let mut m = Model::new();
        let b = add_block(&mut m, &f, &Bindings::fixed(&inst, &d), &CostSpec::standard(), "").unwrap();
        let r = solve_min(&mut m, b.cost.clone());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(0.0));
    }

    #[test]
    fn cchp_must_burn_twenty_for_six_electric() {
        let mut inst = toy(4);
        inst.equipment.push(cchp("c", 100.0, 1.0));
        inst.loads.nominal.electricity[3] = 6.0;
        let d = InvestmentDecision { build: vec![true], storage: vec![] };
        let f = Formulation::new(&inst).normal_only();
        let mut m = Model::new();
        let b = add_block(&mut m, &f, &Bindings::fixed(&inst, &d), &CostSpec::standard(), "").unwrap();
        let r = solve_min(&mut m, b.cost.clone());
        let p = r.value(b.var(OpVar::Equipment { sc: 0, n: 0, t: 3 }).unwrap());
        assert!((p - 20.0).abs() < 1e-7);
    }

    #[test]
    fn soc_bounds_scale_with_energy() {
        let mut inst = toy(3);
        inst.storage.push(StorageSpec {
            kind: StorageKind::Bess,
            cost_energy: 0.0,
            cost_power: 0.0,
            soc_min: 0.1,
            soc_max: 0.9,
            eta_ch: 1.0,
            eta_dis: 1.0,
            max_charge_cycles: None,
            initial_soc: Some(0.5),
            max_energy: None,
        });
        inst.feeders.push(FeederSpec { id: "f".into(), capacity: 50.0, efficiency: 1.0 });
        let d = InvestmentDecision { build: vec![], storage: vec![StorageCapacity { energy: 10.0, power: 10.0 }] };
        let f = Formulation::new(&inst).normal_only();
        for (dir, bound) in [(Direction::Maximize, 9.0), (Direction::Minimize, 1.0)] {
            let mut m = Model::new();
            let b = add_block(&mut m, &f, &Bindings::fixed(&inst, &d), &CostSpec::standard(), "").unwrap();
            m.set_objective(dir, b.var(OpVar::Energy { sc: 0, k: 0, t: 2 }).unwrap().into()).unwrap();
            let r = solver::solve(&m, &SolveOptions::exact()).unwrap();
            assert!((r.objective.unwrap() - bound).abs() < 1e-7, "{dir:?}");
        }
    }

    #[test]
    fn failed_equipment_is_forced_off() {
        let mut inst = toy(2);
        inst.equipment.push(gb("gb", 20.0, 1.0, 0.9));
        inst.loads.nominal.heat = vec![5.0, 5.0];
        let d = InvestmentDecision { build: vec![true], storage: vec![] };
        let mut sc = Scenario::nominal(1, 2);
        sc.contingency.state[0] = vec![false, false];
        let f = Formulation::new(&inst).contingency_only();
        let mut m = Model::new();
        let b = add_block(&mut m, &f, &Bindings::fixed(&inst, &d).with_scenario(&sc), &CostSpec::standard(), "").unwrap();
        let r = solve_min(&mut m, b.cost.clone());
        for t in 0..2 {
            assert!(r.value(b.var(OpVar::Equipment { sc: 1, n: 0, t }).unwrap()).abs() < 1e-9);
            assert!((r.value(b.var(OpVar::Shed { d: 1, t }).unwrap()) - 5.0).abs() < 1e-7);
        }
    }

    #[test]
    fn objective_terms_evaluate_by_hand() {
        let mut inst = toy(1);
        inst.equipment.push(gb("gb", 20.0, 200.0, 0.9));
        inst.loads.nominal.heat = vec![9.0];
        let mut m = Model::new();
        let inv = add_investment(&mut m, &inst).unwrap();
        let f = Formulation::new(&inst);
        let b = add_block(&mut m, &f, &Bindings::variable(&inst, &inv), &CostSpec::standard(), "").unwrap();
        let terms = objective_terms(&inst, Some(&inv), &f, &b);
        let obj = terms.f_inv.clone() + terms.f_ope0.clone() + terms.f_shed1.clone();
        let r = solve_min(&mut m, obj);
        assert_eq!(r.eval(&terms.f_inv), 200.0);
        // 10 MW of gas at 20 per MWh for 365 days
        assert!((r.eval(&terms.f_ope0) - 10.0 * 20.0 * 365.0).abs() < 1e-6);
        assert!(r.eval(&terms.f_shed1).abs() < 1e-9);
    }

    #[test]
    fn no_build_means_zero_objective() {
        let inst = toy(2);
        let mut m = Model::new();
        let inv = add_investment(&mut m, &inst).unwrap();
        let f = Formulation::new(&inst);
        let b = add_block(&mut m, &f, &Bindings::variable(&inst, &inv), &CostSpec::standard(), "").unwrap();
        let terms = objective_terms(&inst, Some(&inv), &f, &b);
        let r = solve_min(&mut m, terms.f_inv.clone() + terms.f_ope0.clone() + terms.f_shed1.clone());
        assert_eq!(r.objective, Some(0.0));
    }
}
