use std::path::Path;

use sectorlen::zoo::state_from_json;
use sectorlen::{DensityMatrix, StateRecipe};

use crate::{CliError, CliResult};

/// A state argument is a JSON file when such a file exists, otherwise a
/// mini-language reference.
pub fn load_state(arg: &str) -> CliResult<DensityMatrix> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{arg}: {e}")))?;
        return state_from_json(&text).map_err(|e| CliError::input(format!("{arg}: {e}")));
    }
    let recipe: StateRecipe = arg.parse().map_err(|e| CliError::input(format!("{arg}: {e}")))?;
    recipe.build().map_err(|e| CliError::input(format!("{arg}: {e}")))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Compact number: integers without decimals, otherwise up to ten places.
pub fn num(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        let r = x.round();
        if r == 0.0 { "0".into() } else { format!("{r}") }
    } else {
        let s = format!("{x:.10}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn tuple(xs: &[f64]) -> String {
    format!("({})", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}
