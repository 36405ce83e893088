//! The contingency set 𝕊 and the load set 𝕃: membership, realization and enumeration.

use std::fmt;

use thiserror::Error;

use crate::model::{Carrier, CarrierSeries, IntervalScope, LoadBudgetScope, PlanningInstance, UncertaintyBudgets};

/// Layout shared by every realization: components in instance order and the day structure.
#[derive(Clone, Debug, PartialEq)]
pub struct SetShape {
    pub hours_per_day: usize,
    pub days: usize,
    /// (Γ^I, Γ^D) per component.
    pub windows: Vec<(usize, usize)>,
    pub gamma_n: usize,
    pub gamma_i_global: usize,
    pub interval_scope: IntervalScope,
}

impl SetShape {
    pub fn new(instance: &PlanningInstance, budgets: &UncertaintyBudgets) -> Self {
        SetShape {
            hours_per_day: instance.horizon.hours_per_day,
            days: instance.horizon.days(),
            windows: instance.components().into_iter().map(|c| budgets.windows(instance.component_id(c))).collect(),
            gamma_n: budgets.gamma_n,
            gamma_i_global: budgets.gamma_i,
            interval_scope: budgets.interval_scope,
        }
    }

    pub fn period(&self) -> usize {
        self.hours_per_day * self.days
    }

    pub fn components(&self) -> usize {
        self.windows.len()
    }

    /// Hours of the trailing window of length `len` ending at `t`, cut at the day start.
    pub fn window(&self, t: usize, len: usize) -> std::ops::RangeInclusive<usize> {
        let day_start = t - t % self.hours_per_day;
        let start = (t + 1).saturating_sub(len).max(day_start);
        start..=t
    }
}

/// s[c][t] = operating, y[c][t] = failure starts at t.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContingencyRealization {
    pub state: Vec<Vec<bool>>,
    pub start: Vec<Vec<bool>>,
}

impl ContingencyRealization {
    pub fn nominal(components: usize, hours: usize) -> Self {
        ContingencyRealization { state: vec![vec![true; hours]; components], start: vec![vec![false; hours]; components] }
    }

    pub fn is_nominal(&self) -> bool {
        self.state.iter().flatten().all(|&s| s)
    }

    /// Compact text matrix: one row per component, `1` up, `0` down.
    pub fn matrix(&self) -> String {
        self.state.iter().map(|row| row.iter().map(|&s| if s { '1' } else { '0' }).collect::<String>()).collect::<Vec<_>>().join("/")
    }
}

/// u+ / u− per load carrier (electricity, heat, cooling) per hour.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LoadRealization {
    pub up: [Vec<bool>; 3],
    pub down: [Vec<bool>; 3],
}

impl LoadRealization {
    pub fn nominal(hours: usize) -> Self {
        LoadRealization {
            up: [vec![false; hours], vec![false; hours], vec![false; hours]],
            down: [vec![false; hours], vec![false; hours], vec![false; hours]],
        }
    }

    pub fn active(&self, d: usize) -> usize {
        self.up[d].iter().chain(&self.down[d]).filter(|&&u| u).count()
    }

    pub fn matrix(&self) -> String {
        (0..3)
            .map(|d| {
                self.up[d]
                    .iter()
                    .zip(&self.down[d])
                    .map(|(&u, &l)| match (u, l) {
                        (true, false) => '+',
                        (false, true) => '-',
                        (true, true) => '!',
                        _ => '.',
                    })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// A point of 𝕊 × 𝕃.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub contingency: ContingencyRealization,
    pub load: LoadRealization,
}

impl Scenario {
    pub fn nominal(components: usize, hours: usize) -> Self {
        Scenario { contingency: ContingencyRealization::nominal(components, hours), load: LoadRealization::nominal(hours) }
    }

    pub fn fingerprint(&self) -> String {
        format!("s={};l={}", self.contingency.matrix(), self.load.matrix())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fingerprint())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub violations: Vec<Violation>,
}

impl Membership {
    fn from(violations: Vec<Violation>) -> Self {
        Membership { member: violations.is_empty(), violations }
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum UncertaintyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("realized {carrier} load is negative at hour {hour}")]
    NegativeLoad { carrier: Carrier, hour: usize },
    #[error("scenario count exceeds the limit of {limit}")]
    Explosion { limit: usize },
}

fn dims(rows: &[Vec<bool>], components: usize, hours: usize, what: &str) -> Result<(), UncertaintyError> {
    if rows.len() != components || rows.iter().any(|r| r.len() != hours) {
        return Err(UncertaintyError::Dimension(format!("{what} must be {components} x {hours}")));
    }
    Ok(())
}

pub fn check_contingency(r: &ContingencyRealization, shape: &SetShape) -> Result<Membership, UncertaintyError> {
    let (nc, period) = (shape.components(), shape.period());
    dims(&r.state, nc, period, "state")?;
    dims(&r.start, nc, period, "start")?;
    let mut v = Vec::new();
    for t in 0..period {
        let down = r.state.iter().filter(|s| !s[t]).count();
        if down > shape.gamma_n {
            v.push(Violation { code: "SIMULTANEITY", detail: format!("{down} components down at hour {t}") });
        }
    }
    for c in 0..nc {
        let (gi, gd) = shape.windows[c];
        let y = &r.start[c];
        for t in 0..period {
            if shape.interval_scope == IntervalScope::PerComponent && gi > 0 {
                let starts = shape.window(t, gi).filter(|&v| y[v]).count();
                if starts > 1 {
                    v.push(Violation { code: "INTERVAL", detail: format!("component {c}: {starts} starts in window ending {t}") });
                }
            }
            let linked = shape.window(t, gd).filter(|&v| gd > 0 && y[v]).count() as i64;
            let expected = 1 - r.state[c][t] as i64;
            if linked != expected || (gd == 0 && y[t]) {
                v.push(Violation { code: "DURATION", detail: format!("component {c} at hour {t}") });
            }
        }
    }
    if shape.interval_scope == IntervalScope::Global && shape.gamma_i_global > 0 {
        for t in 0..period {
            let starts: usize = r.start.iter().map(|y| shape.window(t, shape.gamma_i_global).filter(|&v| y[v]).count()).sum();
            if starts > 1 {
                v.push(Violation { code: "INTERVAL", detail: format!("{starts} starts in window ending {t}") });
            }
        }
    }
    Ok(Membership::from(v))
}

pub fn check_load(r: &LoadRealization, budgets: &UncertaintyBudgets, hours: usize) -> Result<Membership, UncertaintyError> {
    for d in 0..3 {
        if r.up[d].len() != hours || r.down[d].len() != hours {
            return Err(UncertaintyError::Dimension(format!("load indicators must have {hours} hours")));
        }
    }
    let mut v = Vec::new();
    for d in 0..3 {
        for t in 0..hours {
            if r.up[d][t] && r.down[d][t] {
                v.push(Violation { code: "MUTUAL_EXCLUSION", detail: format!("{} hour {t}", Carrier::LOADS[d]) });
            }
        }
    }
    match budgets.load_scope {
        LoadBudgetScope::PerCarrier => {
            for d in 0..3 {
                if r.active(d) > budgets.gamma_l {
                    v.push(Violation { code: "BUDGET", detail: format!("{} has {} deviations", Carrier::LOADS[d], r.active(d)) });
                }
            }
        }
        LoadBudgetScope::Global => {
            let total: usize = (0..3).map(|d| r.active(d)).sum();
            if total > budgets.gamma_l {
                v.push(Violation { code: "BUDGET", detail: format!("{total} deviations in total") });
            }
        }
    }
    Ok(Membership::from(v))
}

/// l = l̄ + Δl·u+ − Δl·u−.
pub fn realize_load(r: &LoadRealization, nominal: &CarrierSeries, delta: &CarrierSeries) -> Result<CarrierSeries, UncertaintyError> {
    let hours = nominal.electricity.len();
    let mut out = nominal.clone();
    for (d, &carrier) in Carrier::LOADS.iter().enumerate() {
        let (l, dl) = (nominal.get(carrier), delta.get(carrier));
        if l.len() != hours || dl.len() != hours || r.up[d].len() != hours || r.down[d].len() != hours {
            return Err(UncertaintyError::Dimension("load series lengths differ".into()));
        }
        let target = out.get_mut(carrier);
        for t in 0..hours {
            let v = l[t] + dl[t] * (r.up[d][t] as u8 as f64) - dl[t] * (r.down[d][t] as u8 as f64);
            if v < 0.0 {
                return Err(UncertaintyError::NegativeLoad { carrier, hour: t });
            }
            target[t] = v;
        }
    }
    Ok(out)
}

/// Start patterns for one component: `(y, s)` pairs satisfying the per-component rules.
fn component_patterns(shape: &SetShape, c: usize, limit: usize) -> Result<Vec<(Vec<bool>, Vec<bool>)>, UncertaintyError> {
    let period = shape.period();
    let (gi, gd) = shape.windows[c];
    let mut out = Vec::new();
    if gd == 0 || shape.gamma_n == 0 {
        out.push((vec![false; period], vec![true; period]));
        return Ok(out);
    }
    let interval = if shape.interval_scope == IntervalScope::PerComponent { gi } else { 0 };
    let mut y = vec![false; period];
    fn rec(
        t: usize,
        y: &mut Vec<bool>,
        shape: &SetShape,
        interval: usize,
        gd: usize,
        out: &mut Vec<(Vec<bool>, Vec<bool>)>,
        limit: usize,
    ) -> Result<(), UncertaintyError> {
        if t == y.len() {
            let s = (0..y.len()).map(|h| !shape.window(h, gd).any(|v| y[v])).collect();
            out.push((y.clone(), s));
            if out.len() > limit {
                return Err(UncertaintyError::Explosion { limit });
            }
            return Ok(());
        }
        rec(t + 1, y, shape, interval, gd, out, limit)?;
        // a start is allowed only if no other start shares a window with it
        let span = interval.max(gd);
        if !shape.window(t, span).any(|v| y[v]) {
            y[t] = true;
            rec(t + 1, y, shape, interval, gd, out, limit)?;
            y[t] = false;
        }
        Ok(())
    }
    rec(0, &mut y, shape, interval, gd, &mut out, limit)?;
    Ok(out)
}

/// Every member of 𝕊, nominal first.
pub fn enumerate_contingencies(shape: &SetShape, limit: usize) -> Result<Vec<ContingencyRealization>, UncertaintyError> {
    let patterns: Vec<_> = (0..shape.components()).map(|c| component_patterns(shape, c, limit)).collect::<Result<_, _>>()?;
    let period = shape.period();
    let mut out = Vec::new();
    let mut down = vec![0usize; period];
    let mut chosen: Vec<usize> = Vec::with_capacity(patterns.len());
    #[allow(clippy::too_many_arguments)]
    fn rec(
        c: usize,
        patterns: &[Vec<(Vec<bool>, Vec<bool>)>],
        shape: &SetShape,
        down: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<ContingencyRealization>,
        limit: usize,
    ) -> Result<(), UncertaintyError> {
        if c == patterns.len() {
            let r = ContingencyRealization {
                state: chosen.iter().enumerate().map(|(c, &i)| patterns[c][i].1.clone()).collect(),
                start: chosen.iter().enumerate().map(|(c, &i)| patterns[c][i].0.clone()).collect(),
            };
            if shape.interval_scope == IntervalScope::Global && !check_contingency(&r, shape)?.member {
                return Ok(());
            }
            out.push(r);
            if out.len() > limit {
                return Err(UncertaintyError::Explosion { limit });
            }
            return Ok(());
        }
        for (i, (_, s)) in patterns[c].iter().enumerate() {
            if s.iter().enumerate().any(|(t, &up)| !up && down[t] + 1 > shape.gamma_n) {
                continue;
            }
            for (t, &up) in s.iter().enumerate() {
                down[t] += !up as usize;
            }
            chosen.push(i);
            rec(c + 1, patterns, shape, down, chosen, out, limit)?;
            chosen.pop();
            for (t, &up) in s.iter().enumerate() {
                down[t] -= !up as usize;
            }
        }
        Ok(())
    }
    rec(0, &patterns, shape, &mut down, &mut chosen, &mut out, limit)?;
    Ok(out)
}

/// Every member of 𝕃 whose deviations move the load. Indicators where Δl = 0 stay at 0.
pub fn enumerate_loads(budgets: &UncertaintyBudgets, delta: &CarrierSeries, limit: usize) -> Result<Vec<LoadRealization>, UncertaintyError> {
    let hours = delta.electricity.len();
    let slots: Vec<(usize, usize)> = (0..3)
        .flat_map(|d| (0..hours).map(move |t| (d, t)))
        .filter(|&(d, t)| delta.by_index(d)[t] > 0.0)
        .collect();
    let mut out = Vec::new();
    let mut current = LoadRealization::nominal(hours);
    let mut used = [0usize; 3];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        slots: &[(usize, usize)],
        budgets: &UncertaintyBudgets,
        current: &mut LoadRealization,
        used: &mut [usize; 3],
        out: &mut Vec<LoadRealization>,
        limit: usize,
    ) -> Result<(), UncertaintyError> {
        if i == slots.len() {
            out.push(current.clone());
            if out.len() > limit {
                return Err(UncertaintyError::Explosion { limit });
            }
            return Ok(());
        }
        rec(i + 1, slots, budgets, current, used, out, limit)?;
        let (d, t) = slots[i];
        let room = match budgets.load_scope {
            LoadBudgetScope::PerCarrier => used[d] < budgets.gamma_l,
            LoadBudgetScope::Global => used.iter().sum::<usize>() < budgets.gamma_l,
        };
        if room {
            used[d] += 1;
            for up in [true, false] {
                if up {
                    current.up[d][t] = true;
                } else {
                    current.down[d][t] = true;
                }
                rec(i + 1, slots, budgets, current, used, out, limit)?;
                current.up[d][t] = false;
                current.down[d][t] = false;
            }
            used[d] -= 1;
        }
        Ok(())
    }
    rec(0, &slots, budgets, &mut current, &mut used, &mut out, limit)?;
    Ok(out)
}

/// The full product 𝕊 × 𝕃, erroring once more than `limit` points would be produced.
pub fn enumerate_scenarios(
    instance: &PlanningInstance,
    budgets: &UncertaintyBudgets,
    limit: usize,
) -> Result<Vec<Scenario>, UncertaintyError> {
    let shape = SetShape::new(instance, budgets);
    let contingencies = enumerate_contingencies(&shape, limit)?;
    let loads = enumerate_loads(budgets, &budgets.deltas(&instance.loads.nominal), limit)?;
    if contingencies.len().saturating_mul(loads.len()) > limit {
        return Err(UncertaintyError::Explosion { limit });
    }
    let mut out = Vec::with_capacity(contingencies.len() * loads.len());
    for c in &contingencies {
        for l in &loads {
            out.push(Scenario { contingency: c.clone(), load: l.clone() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(components: usize, hours: usize, gn: usize, gi: usize, gd: usize) -> SetShape {
        SetShape {
            hours_per_day: hours,
            days: 1,
            windows: vec![(gi, gd); components],
            gamma_n: gn,
            gamma_i_global: gi,
            interval_scope: IntervalScope::PerComponent,
        }
    }

    fn bits(n: usize, mask: u32) -> Vec<bool> {
        (0..n).map(|i| mask >> i & 1 == 1).collect()
    }

    /// Brute force: every y pattern per component, s derived from the duration link.
    fn brute_force(sh: &SetShape) -> usize {
        let (nc, p) = (sh.components(), sh.period());
        let total = 1u64 << (nc * p * 2);
        let mut count = 0;
        for mask in 0..total {
            let start: Vec<Vec<bool>> = (0..nc).map(|c| bits(p, (mask >> (2 * c * p)) as u32 & ((1 << p) - 1))).collect();
            let state: Vec<Vec<bool>> = (0..nc).map(|c| bits(p, (mask >> (2 * c * p + p)) as u32 & ((1 << p) - 1))).collect();
            let r = ContingencyRealization { state, start };
            if check_contingency(&r, sh).unwrap().member {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn no_failure_point_is_member() {
        let sh = shape(2, 6, 1, 3, 2);
        assert!(check_contingency(&ContingencyRealization::nominal(2, 6), &sh).unwrap().member);
    }

    #[test]
    fn three_hour_failure_is_member() {
        let sh = shape(1, 10, 1, 3, 3);
        let mut r = ContingencyRealization::nominal(1, 10);
        r.start[0][4] = true;
        for t in 4..7 {
            r.state[0][t] = false;
        }
        assert!(check_contingency(&r, &sh).unwrap().member);
        r.state[0][7] = false;
        assert!(check_contingency(&r, &sh).unwrap().has("DURATION"));
    }

    #[test]
    fn two_simultaneous_failures_break_gamma_n_one() {
        let sh = shape(2, 4, 1, 2, 1);
        let mut r = ContingencyRealization::nominal(2, 4);
        for c in 0..2 {
            r.start[c][1] = true;
            r.state[c][1] = false;
        }
        let m = check_contingency(&r, &sh).unwrap();
        assert!(!m.member);
        assert!(m.has("SIMULTANEITY"));
    }

    #[test]
    fn window_is_truncated_at_day_start() {
        let sh = SetShape { hours_per_day: 4, days: 2, ..shape(1, 4, 1, 3, 3) };
        assert_eq!(sh.window(5, 3), 4..=5);
        assert_eq!(sh.window(1, 3), 0..=1);
        assert_eq!(sh.window(3, 3), 1..=3);
    }

    #[test]
    fn nominal_only_when_budgets_zero() {
        let sh = shape(3, 4, 0, 0, 0);
        assert_eq!(enumerate_contingencies(&sh, 100).unwrap().len(), 1);
        let b = UncertaintyBudgets::default();
        let delta = CarrierSeries { electricity: vec![1.0; 4], heat: vec![1.0; 4], cooling: vec![1.0; 4] };
        assert_eq!(enumerate_loads(&b, &delta, 100).unwrap().len(), 1);
    }

    #[test]
    fn single_component_count_matches_filter() {
        let sh = shape(1, 4, 1, 4, 2);
        let n = enumerate_contingencies(&sh, 1000).unwrap().len();
        assert_eq!(n, brute_force(&sh));
        assert_eq!(n, 5);
    }

    #[test]
    fn two_component_count_matches_filter() {
        for (gn, gi, gd) in [(1, 2, 1), (1, 3, 2), (2, 2, 2), (1, 1, 1)] {
            let sh = shape(2, 3, gn, gi, gd);
            let listed = enumerate_contingencies(&sh, 10_000).unwrap();
            assert_eq!(listed.len(), brute_force(&sh), "gn={gn} gi={gi} gd={gd}");
            assert!(listed.iter().all(|r| check_contingency(r, &sh).unwrap().member));
        }
    }

    #[test]
    fn global_interval_scope_counts() {
        let mut sh = shape(2, 3, 2, 2, 1);
        sh.interval_scope = IntervalScope::Global;
        assert_eq!(enumerate_contingencies(&sh, 10_000).unwrap().len(), brute_force(&sh));
    }

    fn load_filter(b: &UncertaintyBudgets, hours: usize, carriers: usize) -> usize {
        let slots = carriers * hours;
        let mut count = 0;
        for mask in 0..(1u32 << (2 * slots)) {
            let mut r = LoadRealization::nominal(hours);
            for i in 0..slots {
                r.up[i / hours][i % hours] = mask >> i & 1 == 1;
                r.down[i / hours][i % hours] = mask >> (slots + i) & 1 == 1;
            }
            if check_load(&r, b, hours).unwrap().member {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn load_counts_for_two_carriers() {
        let delta = CarrierSeries { electricity: vec![1.0; 2], heat: vec![1.0; 2], cooling: vec![0.0; 2] };
        let global = UncertaintyBudgets { gamma_l: 1, load_scope: LoadBudgetScope::Global, ..Default::default() };
        let n = enumerate_loads(&global, &delta, 1000).unwrap().len();
        assert_eq!(n, 9);
        assert_eq!(n, load_filter(&global, 2, 2));
        let per = UncertaintyBudgets { gamma_l: 1, ..Default::default() };
        let n = enumerate_loads(&per, &delta, 1000).unwrap().len();
        assert_eq!(n, 25);
        assert_eq!(n, load_filter(&per, 2, 2));
    }

    #[test]
    fn load_membership_codes() {
        let b = UncertaintyBudgets { gamma_l: 2, ..Default::default() };
        let mut r = LoadRealization::nominal(4);
        assert!(check_load(&r, &b, 4).unwrap().member);
        r.up[0][1] = true;
        r.down[0][1] = true;
        assert!(check_load(&r, &b, 4).unwrap().has("MUTUAL_EXCLUSION"));
        let mut r = LoadRealization::nominal(4);
        r.up[1][0] = true;
        r.up[1][2] = true;
        r.down[1][3] = true;
        let m = check_load(&r, &b, 4).unwrap();
        assert!(m.has("BUDGET") && !m.member);
    }

    #[test]
    fn realize_examples() {
        let nominal = CarrierSeries { electricity: vec![10.0, 60.0], heat: vec![0.0; 2], cooling: vec![0.0; 2] };
        let delta = nominal.map(|_, t, v| if t == 0 { 2.0 } else { 0.02 * v });
        let mut r = LoadRealization::nominal(2);
        assert_eq!(realize_load(&r, &nominal, &delta).unwrap(), nominal);
        r.up[0][0] = true;
        r.up[0][1] = true;
        let l = realize_load(&r, &nominal, &delta).unwrap();
        assert_eq!(l.electricity[0], 12.0);
        assert!((l.electricity[1] - 61.2).abs() < 1e-12);
    }

    #[test]
    fn negative_realized_load_is_an_error() {
        let nominal = CarrierSeries { electricity: vec![1.0], heat: vec![0.0], cooling: vec![0.0] };
        let delta = CarrierSeries { electricity: vec![2.0], heat: vec![0.0], cooling: vec![0.0] };
        let mut r = LoadRealization::nominal(1);
        r.down[0][0] = true;
        assert!(matches!(realize_load(&r, &nominal, &delta), Err(UncertaintyError::NegativeLoad { .. })));
    }

    #[test]
    fn explosion_is_reported() {
        let sh = shape(3, 8, 3, 1, 1);
        assert!(matches!(enumerate_contingencies(&sh, 50), Err(UncertaintyError::Explosion { .. })));
    }

    proptest! {
        #[test]
        fn nominal_member_for_any_budget(gn in 0usize..4, gd in 0usize..4, extra in 0usize..3, gl in 0usize..4) {
            let sh = shape(3, 6, gn, gd + extra, gd);
            prop_assert!(check_contingency(&ContingencyRealization::nominal(3, 6), &sh).unwrap().member);
            let b = UncertaintyBudgets { gamma_l: gl, ..Default::default() };
            prop_assert!(check_load(&LoadRealization::nominal(6), &b, 6).unwrap().member);
        }

        #[test]
        fn members_survive_larger_counting_budgets(gn in 1usize..3, gd in 1usize..3, gl in 0usize..2) {
            let sh = shape(2, 4, gn, gd, gd);
            let bigger = SetShape { gamma_n: gn + 1, ..sh.clone() };
            for r in enumerate_contingencies(&sh, 10_000).unwrap() {
                prop_assert!(check_contingency(&r, &bigger).unwrap().member);
            }
            let delta = CarrierSeries { electricity: vec![1.0; 3], heat: vec![1.0; 3], cooling: vec![1.0; 3] };
            let b = UncertaintyBudgets { gamma_l: gl, ..Default::default() };
            let b2 = UncertaintyBudgets { gamma_l: gl + 1, ..Default::default() };
            for r in enumerate_loads(&b, &delta, 100_000).unwrap() {
                prop_assert!(check_load(&r, &b2, 3).unwrap().member);
            }
        }

        #[test]
        fn enumeration_agrees_with_filter(gn in 0usize..3, gd in 0usize..3, extra in 0usize..2) {
            let sh = shape(2, 3, gn, gd + extra, gd);
            let listed = enumerate_contingencies(&sh, 10_000).unwrap();
            let unique: std::collections::HashSet<_> = listed.iter().cloned().collect();
            prop_assert_eq!(unique.len(), listed.len());
            prop_assert_eq!(listed.len(), brute_force(&sh));
        }
    }
}
