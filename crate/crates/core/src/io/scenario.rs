use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{validate_scenario, Scenario, Trajectory};

/// Parses and validates a scenario document (JSON).
pub fn scenario_from_str(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text)?;
    validate_scenario(scenario).map_err(Error::Validation)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read scenario {}: {e}", path.display())))?;
    scenario_from_str(&text)
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(scenario)?)?;
    Ok(())
}

/// Reads a trajectory file: one trajectory object or an array of them.
pub fn load_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let trajs: Vec<Trajectory> = if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    };
    for (i, t) in trajs.iter().enumerate() {
        let v = t.violations();
        if !v.is_empty() {
            return Err(Error::Validation(v.into_iter().map(|m| format!("{}[{i}]: {m}", path.display())).collect()));
        }
    }
    Ok(trajs)
}

/// Every `*.json` trajectory file in `dir`, in file-name order.
pub fn load_trajectory_dir(dir: &Path) -> Result<Vec<Trajectory>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot read directory {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        out.extend(load_trajectories(&p)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::scenario_suite;

    #[test]
    fn scenarios_round_trip() {
        for s in scenario_suite() {
            let text = serde_json::to_string(&s).unwrap();
            assert_eq!(scenario_from_str(&text).unwrap(), s);
        }
    }

    #[test]
    fn invalid_scenarios_list_violations() {
        let mut s = scenario_suite().remove(0);
        s.duration = -1.0;
        s.route.points.truncate(1);
        let err = scenario_from_str(&serde_json::to_string(&s).unwrap()).unwrap_err();
        let Error::Validation(v) = err else { panic!("expected validation error") };
        assert!(v.iter().any(|m| m.contains("duration")) && v.iter().any(|m| m.contains("route.points")));
    }
}
