//! Sequential Monte-Carlo reliability of a fixed plan.
//!
//! A simulated year tiles the typical days by their weights. Component availability follows
//! a two-state Markov chain per hour, loads get a multiplicative normal perturbation, and each
//! day is dispatched to minimise shed with storage energy carried into the next day.

use log::{debug, warn};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::dispatch::{min_shed_dispatch, DispatchError, Secondary};
use crate::model::{
    Carrier, CarrierSeries, Horizon, InvestmentDecision, LoadProfile, PlanningInstance, ReliabilityModel, StorageCapacity,
    TariffSeries,
};
use crate::solver::SolveOptions;
use crate::uncertainty::ContingencyRealization;

/// Shed below this many MW does not count as a loss-of-load hour.
pub const SHED_TOL: f64 = 1e-6;

const DAYS_PER_YEAR: usize = 365;

#[derive(Debug, Error)]
pub enum ReliabilityError {
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
    #[error("instance has no typical days")]
    NoDays,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CarrierIndices {
    /// MWh per year.
    pub eens: f64,
    /// Hours per year.
    pub lole: f64,
    /// Occurrences per year.
    pub lolf: f64,
    /// 95 % confidence half-widths.
    pub eens_ci: f64,
    pub lole_ci: f64,
    pub lolf_ci: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityIndices {
    /// Electricity, heat, cooling.
    pub carriers: [CarrierIndices; 3],
    pub years: usize,
    /// Set when a dispatch failure stopped the run early.
    pub partial: bool,
}

impl ReliabilityIndices {
    pub fn of(&self, d: Carrier) -> &CarrierIndices {
        &self.carriers[d.load_index().expect("load carrier")]
    }

    pub fn total_eens(&self) -> f64 {
        self.carriers.iter().map(|c| c.eens).sum()
    }
}

#[derive(Clone, Debug)]
pub struct McsOptions {
    pub years: usize,
    pub seed: u64,
    pub solve: SolveOptions,
    /// Skip dispatch on all-up days whose loads are provably servable.
    pub prefilter: bool,
}

impl Default for McsOptions {
    fn default() -> Self {
        McsOptions { years: 500, seed: 0, solve: SolveOptions::default(), prefilter: true }
    }
}

/// Per-year sums for one carrier set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct YearOutcome {
    pub shed_energy: [f64; 3],
    pub shed_hours: [usize; 3],
    pub events: [usize; 3],
}

/// Two-state continuous-time chain observed hourly, so the long-run unavailability is exactly λ/(λ+μ).
/// Over one hour, up → down with probability λ/(λ+μ)·(1 − e^{−(λ+μ)}) and down → up with μ/(λ+μ)·(1 − e^{−(λ+μ)}).
/// Starts up.
pub fn sample_availability<R: Rng + ?Sized>(lambda: f64, mu: f64, hours: usize, rng: &mut R) -> Vec<bool> {
    let (p_fail, p_repair) = transition_probabilities(lambda, mu);
    let mut up = true;
    let mut out = Vec::with_capacity(hours);
    for _ in 0..hours {
        out.push(up);
        let u: f64 = rng.gen();
        up = if up { u >= p_fail } else { u < p_repair };
    }
    out
}

/// Hourly (fail, repair) probabilities of the two-state chain.
pub fn transition_probabilities(lambda: f64, mu: f64) -> (f64, f64) {
    let total = lambda + mu;
    if total <= 0.0 {
        return (0.0, 1.0);
    }
    if !total.is_finite() {
        return (if lambda.is_infinite() { 1.0 } else { 0.0 }, if mu.is_infinite() { 1.0 } else { 0.0 });
    }
    let settle = -(-total).exp_m1();
    (lambda / total * settle, mu / total * settle)
}

/// l·(1 + σ_d·N(0,1)) per hour and carrier, truncated at zero.
pub fn sample_loads<R: Rng + ?Sized>(profile: &CarrierSeries, fluctuation: [f64; 3], rng: &mut R) -> CarrierSeries {
    let hours = profile.electricity.len();
    let mut out = CarrierSeries::zeros(hours);
    for t in 0..hours {
        for (d, carrier) in Carrier::LOADS.into_iter().enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            out.get_mut(carrier)[t] = (profile.by_index(d)[t] * (1.0 + fluctuation[d] * z)).max(0.0);
        }
    }
    out
}

/// Typical-day index for each of the 365 days: counts by largest remainder, spread evenly.
pub fn year_days(horizon: &Horizon) -> Vec<usize> {
    let weights = &horizon.typical_day_weights;
    let total: f64 = weights.iter().sum();
    if weights.is_empty() || total <= 0.0 {
        return Vec::new();
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / total * DAYS_PER_YEAR as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = DAYS_PER_YEAR - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    let mut used = vec![0usize; weights.len()];
    let mut days = Vec::with_capacity(DAYS_PER_YEAR);
    for day in 0..DAYS_PER_YEAR {
        let progress = (day + 1) as f64 / DAYS_PER_YEAR as f64;
        let pick = (0..weights.len())
            .filter(|&i| used[i] < counts[i])
            .max_by(|&a, &b| {
                let da = counts[a] as f64 * progress - used[a] as f64;
                let db = counts[b] as f64 * progress - used[b] as f64;
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("counts sum to the year length");
        used[pick] += 1;
        days.push(pick);
    }
    days
}

fn window(s: &CarrierSeries, hours: std::ops::Range<usize>) -> CarrierSeries {
    CarrierSeries {
        electricity: s.electricity[hours.clone()].to_vec(),
        heat: s.heat[hours.clone()].to_vec(),
        cooling: s.cooling[hours].to_vec(),
    }
}

/// One typical day as a stand-alone instance with unit hour weights.
fn day_instance(instance: &PlanningInstance, day: usize, loads: CarrierSeries) -> PlanningInstance {
    let hours = instance.horizon.day_hours(day);
    let slice = |v: &[f64]| v[hours.clone()].to_vec();
    PlanningInstance {
        name: format!("{}-day{day}", instance.name),
        horizon: Horizon {
            hours_per_day: instance.horizon.hours_per_day,
            typical_day_weights: vec![1.0],
            planning_years: 1,
            discount_rate: 0.0,
            cyclic_soc: false,
        },
        tariffs: TariffSeries { elec_price: slice(&instance.tariffs.elec_price), gas_price: slice(&instance.tariffs.gas_price) },
        loads: LoadProfile { nominal: loads, shed_penalty: window(&instance.loads.shed_penalty, hours.clone()) },
        equipment: instance.equipment.clone(),
        feeders: instance.feeders.clone(),
        storage: instance.storage.clone(),
        budgets: None,
        reliability: None,
    }
}

/// Simulation context shared by all years of one plan.
pub struct Simulator<'a> {
    instance: &'a PlanningInstance,
    decision: &'a InvestmentDecision,
    model: ReliabilityModel,
    days: Vec<usize>,
    /// Largest α such that α × the typical day's nominal loads is servable with all components up.
    headroom: Vec<f64>,
    options: McsOptions,
}

impl<'a> Simulator<'a> {
    pub fn new(instance: &'a PlanningInstance, decision: &'a InvestmentDecision, options: McsOptions) -> Result<Self, ReliabilityError> {
        let days = year_days(&instance.horizon);
        if days.is_empty() {
            return Err(ReliabilityError::NoDays);
        }
        let model = instance.reliability.clone().unwrap_or_default();
        let mut sim = Simulator { instance, decision, model, days, headroom: Vec::new(), options };
        if sim.options.prefilter {
            sim.headroom = (0..instance.horizon.days()).map(|d| sim.day_headroom(d)).collect::<Result<_, _>>()?;
        }
        Ok(sim)
    }

    fn hours_per_day(&self) -> usize {
        self.instance.horizon.hours_per_day
    }

    pub fn year_hours(&self) -> usize {
        self.days.len() * self.hours_per_day()
    }

    fn nominal_day(&self, day: usize) -> CarrierSeries {
        window(&self.instance.loads.nominal, self.instance.horizon.day_hours(day))
    }

    /// Storage-free check at the all-up state, by bisection on a load multiplier.
    fn day_headroom(&self, day: usize) -> Result<f64, ReliabilityError> {
        let nominal = self.nominal_day(day);
        let mut bare = self.decision.clone();
        bare.storage.iter_mut().for_each(|s| *s = StorageCapacity { energy: 0.0, power: 0.0 });
        let h = self.hours_per_day();
        let up = ContingencyRealization::nominal(self.instance.components().len(), h);
        let servable = |alpha: f64| -> Result<bool, ReliabilityError> {
            let loads = nominal.map(|_, _, v| v * alpha);
            let inst = day_instance(self.instance, day, loads.clone());
            let r = min_shed_dispatch(&inst, &bare, &loads, &up, &Secondary::OperatingCost, None, &self.options.solve)?;
            Ok(r.shed.total() <= SHED_TOL)
        };
        if !servable(1.0)? {
            return Ok(0.0);
        }
        let top = 1.0 + 5.0 * self.model.fluctuation.iter().copied().fold(0.0, f64::max);
        if servable(top)? {
            return Ok(top);
        }
        let (mut lo, mut hi) = (1.0, top);
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if servable(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Draws one year's availability and loads from the year's own substream.
    pub fn sample_year(&self, year: usize) -> (Vec<Vec<bool>>, CarrierSeries) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        rng.set_stream(year as u64);
        let hours = self.year_hours();
        let availability = self
            .instance
            .components()
            .into_iter()
            .map(|c| {
                let (lambda, mu) = self.model.rates(self.instance.component_id(c));
                sample_availability(lambda, mu, hours, &mut rng)
            })
            .collect();
        let h = self.hours_per_day();
        let mut profile = CarrierSeries::zeros(0);
        for &day in &self.days {
            let nominal = self.nominal_day(day);
            for d in Carrier::LOADS {
                profile.get_mut(d).extend_from_slice(nominal.get(d));
            }
        }
        debug_assert_eq!(profile.electricity.len(), self.days.len() * h);
        let loads = sample_loads(&profile, self.model.fluctuation, &mut rng);
        (availability, loads)
    }

    /// Dispatches a year day by day and sums its shed statistics.
    pub fn simulate_year(&self, availability: &[Vec<bool>], loads: &CarrierSeries) -> Result<YearOutcome, ReliabilityError> {
        let h = self.hours_per_day();
        let target: Vec<f64> = self
            .instance
            .storage
            .iter()
            .zip(&self.decision.storage)
            .map(|(spec, cap)| spec.initial_fraction() * cap.energy)
            .collect();
        let mut energy = target.clone();
        let mut out = YearOutcome::default();
        let mut in_event = [false; 3];
        for (i, &day) in self.days.iter().enumerate() {
            let span = i * h..(i + 1) * h;
            let day_loads = window(loads, span.clone());
            let states: Vec<Vec<bool>> = availability.iter().map(|a| a[span.clone()].to_vec()).collect();
            let all_up = states.iter().flatten().all(|&s| s);
            let charged = energy.iter().zip(&target).all(|(e, t)| *e >= t - 1e-9);
            let shed = if self.options.prefilter && all_up && charged && self.within_headroom(day, &day_loads) {
                CarrierSeries::zeros(h)
            } else {
                let inst = day_instance(self.instance, day, day_loads.clone());
                let contingency = ContingencyRealization { state: states, start: vec![vec![false; h]; availability.len()] };
                let r = min_shed_dispatch(
                    &inst,
                    self.decision,
                    &day_loads,
                    &contingency,
                    &Secondary::TerminalEnergy(target.clone()),
                    Some(&energy),
                    &self.options.solve,
                )?;
                for (k, e) in energy.iter_mut().enumerate() {
                    *e = r.operation.energy[k][h - 1].max(0.0);
                }
                r.shed
            };
            for d in 0..3 {
                for &s in shed.by_index(d) {
                    if s > SHED_TOL {
                        out.shed_energy[d] += s;
                        out.shed_hours[d] += 1;
                        if !in_event[d] {
                            out.events[d] += 1;
                        }
                        in_event[d] = true;
                    } else {
                        in_event[d] = false;
                    }
                }
            }
        }
        Ok(out)
    }

    fn within_headroom(&self, day: usize, loads: &CarrierSeries) -> bool {
        let alpha = self.headroom[day];
        let nominal = self.nominal_day(day);
        (0..3).all(|d| loads.by_index(d).iter().zip(nominal.by_index(d)).all(|(l, n)| *l <= alpha * n + 1e-12))
    }
}

/// EENS, LOLE and LOLF per carrier over `options.years` simulated years.
pub fn assess(
    instance: &PlanningInstance,
    decision: &InvestmentDecision,
    options: &McsOptions,
) -> Result<ReliabilityIndices, ReliabilityError> {
    let sim = Simulator::new(instance, decision, options.clone())?;
    let mut outcomes = Vec::with_capacity(options.years);
    let mut partial = false;
    for year in 0..options.years {
        let (availability, loads) = sim.sample_year(year);
        match sim.simulate_year(&availability, &loads) {
            Ok(o) => outcomes.push(o),
            Err(e) if outcomes.is_empty() => return Err(e),
            Err(e) => {
                warn!("year {year} failed: {e}; reporting {} completed years", outcomes.len());
                partial = true;
                break;
            }
        }
        debug!("year {year} done");
    }
    Ok(summarize(&outcomes, partial))
}

fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * var.sqrt() / (n as f64).sqrt())
}

pub fn summarize(outcomes: &[YearOutcome], partial: bool) -> ReliabilityIndices {
    let mut carriers = [CarrierIndices::default(); 3];
    for (d, c) in carriers.iter_mut().enumerate() {
        let eens: Vec<f64> = outcomes.iter().map(|o| o.shed_energy[d]).collect();
        let lole: Vec<f64> = outcomes.iter().map(|o| o.shed_hours[d] as f64).collect();
        let lolf: Vec<f64> = outcomes.iter().map(|o| o.events[d] as f64).collect();
        (c.eens, c.eens_ci) = mean_ci(&eens);
        (c.lole, c.lole_ci) = mean_ci(&lole);
        (c.lolf, c.lolf_ci) = mean_ci(&lolf);
    }
    ReliabilityIndices { carriers, years: outcomes.len(), partial }
}

#[cfg(test)]
mod tests;
