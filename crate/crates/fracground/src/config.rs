//! Flat key=value config files for the CLI.
//!
//! Recognized keys (one `key = value` pair per line, `#` comments):
//!   dim, s, box, points, seed, out_dir
//!   potential.kind           constant | gaussian_well
//!   potential.value          (constant)
//!   potential.a, potential.b, potential.w, potential.center  (well)
//!   eps                      comma-separated decreasing list
//!   solver.step, solver.shift, solver.tol_residual, solver.tol_energy,
//!   solver.max_iters, solver.init_mu

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::field::{Grid, Potential};
use crate::solver::{Init, SolverOptions};
use crate::sweep::SweepConfig;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

pub fn parse_kv(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn req<'a>(map: &'a HashMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key).map(|s| s.as_str()).ok_or_else(|| Error::Config(format!("missing key `{key}`")))
}

fn num(map: &HashMap<String, String>, key: &str) -> Result<f64> {
    req(map, key)?.parse().map_err(|_| Error::Config(format!("key `{key}` is not a number")))
}

fn num_or(map: &HashMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| Error::Config(format!("key `{key}` is not a number"))),
    }
}

pub fn load_sweep_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path)?;
    sweep_config_from_str(&text)
}

pub fn sweep_config_from_str(text: &str) -> Result<SweepConfig> {
    let map = parse_kv(text)?;
    let dim = num(&map, "dim")? as u32;
    let s = num(&map, "s")?;
    let params = Params::new(dim, s)?;
    let grid = Grid::new(dim, num(&map, "box")?, num(&map, "points")? as usize)?;

    let potential = match req(&map, "potential.kind")? {
        "constant" => Potential::constant(num_or(&map, "potential.value", 1.0)?)?,
        "gaussian_well" => {
            let mut center = [0.0; 3];
            if let Some(cs) = map.get("potential.center") {
                for (i, c) in cs.split(',').take(3).enumerate() {
                    center[i] = c
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config("bad potential.center".into()))?;
                }
            }
            Potential::gaussian_well(
                num(&map, "potential.a")?,
                num(&map, "potential.b")?,
                num(&map, "potential.w")?,
                center,
            )?
        }
        other => return Err(Error::Config(format!("unknown potential.kind `{other}`"))),
    };

    let eps_schedule: Vec<f64> = req(&map, "eps")?
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Config("bad eps list".into())))
        .collect::<Result<_>>()?;

    let init = match map.get("solver.init_mu") {
        Some(v) => Init::Bubble {
            center: potential.argmin().unwrap_or([0.0; 3]),
            mu: v.parse().map_err(|_| Error::Config("bad solver.init_mu".into()))?,
        },
        None => Init::Random { seed: 1 },
    };
    let solver = SolverOptions {
        step: num_or(&map, "solver.step", 0.8)?,
        precond_shift: map.get("solver.shift").map(|v| v.parse().unwrap_or(1.0)),
        tol_residual: num_or(&map, "solver.tol_residual", 1e-7)?,
        tol_energy: num_or(&map, "solver.tol_energy", 1e-13)?,
        max_iters: num_or(&map, "solver.max_iters", 20000.0)? as usize,
        init,
    };

    let cfg = SweepConfig {
        params,
        grid,
        potential,
        eps_schedule,
        solver,
        out_dir: map.get("out_dir").map(PathBuf::from),
        seed: num_or(&map, "seed", 1.0)? as u64,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# sample sweep
dim = 1
s = 0.2
box = 3.0
points = 1024
potential.kind = gaussian_well
potential.a = 2.0
potential.b = 1.0
potential.w = 0.5
potential.center = 0.1, 0, 0
eps = 0.5, 0.45, 0.4, 0.35
solver.tol_residual = 1e-6
seed = 9
";

    #[test]
    fn parses_sample() {
        let cfg = sweep_config_from_str(SAMPLE).unwrap();
        assert_eq!(cfg.params.dim, 1);
        assert_eq!(cfg.grid.points_per_dim, 1024);
        assert_eq!(cfg.eps_schedule.len(), 4);
        assert_eq!(cfg.seed, 9);
        assert!(cfg.potential.argmin().unwrap()[0] == 0.1);
    }

    #[test]
    fn rejects_garbage() {
        assert!(sweep_config_from_str("dim 1").is_err());
        assert!(sweep_config_from_str("dim = 1\ns = 0.2").is_err(), "missing keys");
        let bad = SAMPLE.replace("eps = 0.5, 0.45, 0.4, 0.35", "eps = 0.5, 0.6, 0.4, 0.35");
        assert!(sweep_config_from_str(&bad).is_err(), "non-decreasing schedule");
    }
}
