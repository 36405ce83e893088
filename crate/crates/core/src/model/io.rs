use std::path::Path;

use thiserror::Error;

use super::PlanningInstance;

#[derive(Debug, Error)]
pub enum InstanceIoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed instance: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize instance: {0}")]
    Serialize(#[from] toml::ser::Error),
}

pub fn from_toml_str(text: &str) -> Result<PlanningInstance, InstanceIoError> {
    Ok(toml::from_str(text)?)
}

/// Canonical text form: parsing it back and re-serializing gives the same bytes.
pub fn to_toml_string(instance: &PlanningInstance) -> Result<String, InstanceIoError> {
    Ok(toml::to_string(instance)?)
}

pub fn load_instance(path: &Path) -> Result<PlanningInstance, InstanceIoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| InstanceIoError::Read { path: path.display().to_string(), source })?;
    from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::*;

    const SAMPLE: &str = r#"
name = "sample"

[horizon]
hours_per_day = 2
typical_day_weights = [365.0]
planning_years = 1
discount_rate = 0.0

[tariffs]
elec_price = [1.0, 2.0]
gas_price = [0.5, 0.5]

[loads.nominal]
electricity = [1.0, 2.0]
heat = [0.0, 1.0]
cooling = [0.0, 0.0]

[loads.shed_penalty]
electricity = [10.0, 10.0]
heat = [10.0, 10.0]
cooling = [10.0, 10.0]

[[equipment]]
id = "gb1"
kind = "GB"
capacity = 5.0
invest_cost = 3.0
conversion = [{ from = "gas", to = "heat", efficiency = 0.9 }]

[[feeders]]
id = "f1"
capacity = 4.0
efficiency = 1.0

[[storage]]
kind = "TESS"
cost_energy = 0.1
soc_min = 0.1
soc_max = 0.9
eta_ch = 0.95
eta_dis = 0.95
"#;

    #[test]
    fn parses_sample() {
        let inst = from_toml_str(SAMPLE).unwrap();
        assert_eq!(inst.period(), 2);
        assert_eq!(inst.equipment[0].kind, EquipmentKind::Gb);
        assert_eq!(inst.storage[0].initial_fraction(), 0.1);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = SAMPLE.replace("capacity = 4.0", "capacity = 4.0\ncolour = \"red\"");
        assert!(matches!(from_toml_str(&bad), Err(InstanceIoError::Parse(_))));
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let mut inst = toy(3);
        inst.equipment.push(cchp("c1", 12.5, 40.0));
        inst.equipment.push(ec("e1", 3.0, 4.0, 1.7));
        inst.feeders.push(FeederSpec { id: "f".into(), capacity: 9.0, efficiency: 0.98 });
        inst.budgets = Some(UncertaintyBudgets { gamma_n: 1, gamma_i: 3, gamma_d: 2, gamma_l: 1, delta_fraction: 0.02, ..Default::default() });
        inst.reliability = Some(ReliabilityModel { failure_rate: 0.001, repair_rate: 0.05, overrides: vec![], fluctuation: [0.05, 0.08, 0.05] });
        let first = to_toml_string(&inst).unwrap();
        let parsed = from_toml_str(&first).unwrap();
        assert_eq!(parsed, inst);
        assert_eq!(to_toml_string(&parsed).unwrap(), first);
    }

    #[test]
    fn sample_round_trips() {
        let inst = from_toml_str(SAMPLE).unwrap();
        let text = to_toml_string(&inst).unwrap();
        assert_eq!(to_toml_string(&from_toml_str(&text).unwrap()).unwrap(), text);
    }
}
