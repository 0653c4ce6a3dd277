//! Flat `key = value` config file with one section per module.
//!
//! Unknown sections or keys are rejected so typos fail loudly instead of
//! silently running defaults. `#` starts a comment; every key has a
//! default, so an empty file is a valid config.

use kerr_rkg::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct RunConfig {
    // [kerr]
    pub mass: f64,
    pub spin: f64,
    // [mode]
    pub m: i64,
    pub mu: f64,
    // [grid]
    pub nr: usize,
    pub ntheta: usize,
    pub r_max: f64,
    pub eps_h: f64,
    // [evolution]
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    pub s_list: Vec<f64>,
    // [pencil]
    pub atil_path: Option<String>,
    pub b_path: Option<String>,
    // [stability]
    pub s_min: f64,
    pub s_max: f64,
    pub s_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            spin: 0.5,
            m: 1,
            mu: 0.0,
            nr: 40,
            ntheta: 20,
            r_max: 20.0,
            eps_h: 1e-3,
            dt: 1e-3,
            t_final: 10.0,
            record_every: 10,
            s_list: Vec::new(),
            atil_path: None,
            b_path: None,
            s_min: -1.0,
            s_max: 1.0,
            s_count: 201,
        }
    }
}

fn parse_num<T: std::str::FromStr>(section: &str, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Parse(format!("[{section}] {key} = {value:?} is not a valid number"))
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                match section.as_str() {
                    "kerr" | "mode" | "grid" | "evolution" | "pencil" | "stability" => {}
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: unknown section [{other}]",
                            lineno + 1
                        )))
                    }
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "line {}: expected 'key = value', got {line:?}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let full = format!("{section}.{key}");
            if seen.insert(full.clone(), ()).is_some() {
                return Err(Error::Parse(format!("duplicate key {full}")));
            }
            match full.as_str() {
                "kerr.mass" => cfg.mass = parse_num(&section, key, value)?,
                "kerr.spin" => cfg.spin = parse_num(&section, key, value)?,
                "mode.m" => cfg.m = parse_num(&section, key, value)?,
                "mode.mu" => cfg.mu = parse_num(&section, key, value)?,
                "grid.nr" => cfg.nr = parse_num(&section, key, value)?,
                "grid.ntheta" => cfg.ntheta = parse_num(&section, key, value)?,
                "grid.r_max" => cfg.r_max = parse_num(&section, key, value)?,
                "grid.eps_h" => cfg.eps_h = parse_num(&section, key, value)?,
                "evolution.dt" => cfg.dt = parse_num(&section, key, value)?,
                "evolution.t_final" => cfg.t_final = parse_num(&section, key, value)?,
                "evolution.record_every" => cfg.record_every = parse_num(&section, key, value)?,
                "evolution.s_list" => {
                    cfg.s_list = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| parse_num(&section, key, s.trim()))
                        .collect::<Result<_>>()?;
                }
                "pencil.atil_path" => cfg.atil_path = Some(value.to_string()),
                "pencil.b_path" => cfg.b_path = Some(value.to_string()),
                "stability.s_min" => cfg.s_min = parse_num(&section, key, value)?,
                "stability.s_max" => cfg.s_max = parse_num(&section, key, value)?,
                "stability.s_count" => cfg.s_count = parse_num(&section, key, value)?,
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {key:?} in section [{section}]",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        // Re-run the owning modules' invariants so errors surface at parse
        // time with exit code 2, not mid-run.
        kerr_rkg::geometry::KerrParams::new(self.mass, self.spin)?;
        kerr_rkg::geometry::ModeSpec::new(self.m, self.mu)?;
        if self.s_count == 0 {
            return Err(Error::InvalidParameter("stability.s_count must be >= 1".into()));
        }
        if self.s_max < self.s_min {
            return Err(Error::InvalidParameter(format!(
                "stability range [{}, {}] is empty",
                self.s_min, self.s_max
            )));
        }
        Ok(())
    }

    pub fn s_grid(&self) -> Vec<f64> {
        if self.s_count == 1 {
            return vec![self.s_min];
        }
        (0..self.s_count)
            .map(|i| {
                self.s_min + (self.s_max - self.s_min) * i as f64 / (self.s_count as f64 - 1.0)
            })
            .collect()
    }
}
