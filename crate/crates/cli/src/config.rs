//! Scenario configuration.
//!
//! A config is a TOML document with a few top-level keys and one table per
//! scenario kind:
//!
//! ```toml
//! schema_version = 1
//! kind = "twostate"
//! hbar = 1.0
//!
//! [twostate]
//! lambda_up = 2.0
//! lambda_down = 0.5
//! ```
//!
//! Unknown keys are rejected with a suggestion for the closest valid key.
//! Every key left out is filled with its default and listed in the run
//! manifest.

use std::f64::consts::FRAC_PI_4;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

const TOP_LEVEL_KEYS: [&str; 4] = ["schema_version", "kind", "hbar", "seed"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Thermal,
    Twostate,
    Noncommutative,
    Localize,
    Sweep,
}

impl Kind {
    pub const ALL: [Kind; 5] = [Kind::Thermal, Kind::Twostate, Kind::Noncommutative, Kind::Localize, Kind::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Thermal => "thermal",
            Kind::Twostate => "twostate",
            Kind::Noncommutative => "noncommutative",
            Kind::Localize => "localize",
            Kind::Sweep => "sweep",
        }
    }

    pub fn from_name(name: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalParams {
    pub levels: usize,
    /// Mean level spacing for randomly drawn spectra.
    pub spacing: f64,
    /// Explicit spectrum; replaces the random draw and the `levels` key.
    pub energies: Option<Vec<f64>>,
    pub windows: usize,
    /// Smallest window in units of `ħ / min|ΔE|`.
    pub t_min: f64,
    /// Largest window in units of `ħ / min|ΔE|`.
    pub t_max: f64,
    pub points_per_period: usize,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams { levels: 6, spacing: 1.0, energies: None, windows: 50, t_min: 10.0, t_max: 1e4, points_per_period: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoStateParams {
    pub lambda_up: Option<f64>,
    pub lambda_down: Option<f64>,
    pub eps_up: f64,
    pub eps_down: f64,
    /// Initial system state `cos θ0 |↑⟩ + sin θ0 |↓⟩`.
    pub theta0: f64,
    pub window: f64,
    pub samples: usize,
    pub n_theta: usize,
    pub gap_threshold: f64,
    /// Time at which the θ-grid is compared with the pointer pair.
    pub saddle_time: Option<f64>,
}

impl Default for TwoStateParams {
    fn default() -> Self {
        TwoStateParams {
            lambda_up: None,
            lambda_down: None,
            eps_up: 0.0,
            eps_down: 0.0,
            theta0: FRAC_PI_4,
            window: 50.0,
            samples: 501,
            n_theta: decohere_core::twostate::DEFAULT_THETA_POINTS,
            gap_threshold: decohere_core::twostate::DEFAULT_GAP_THRESHOLD,
            saddle_time: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoncommutativeParams {
    pub eps_up: Option<f64>,
    pub eps_down: Option<f64>,
    pub v_plus: Option<f64>,
    pub v_minus: Option<f64>,
    pub theta0: f64,
    /// Defaults to the first-order window `0.1·min(2ħ/|Δε|, ħ/|ΔV|)`.
    pub t_max: Option<f64>,
    pub samples: usize,
    pub diagnostic_samples: usize,
}

impl Default for NoncommutativeParams {
    fn default() -> Self {
        NoncommutativeParams {
            eps_up: None,
            eps_down: None,
            v_plus: None,
            v_minus: None,
            theta0: FRAC_PI_4,
            t_max: None,
            samples: 101,
            diagnostic_samples: 20001,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialShape {
    Cosine,
    Ramp,
    DoubleWell,
    Random,
    Values,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Lumps,
    Gaussian,
    PlaneWave,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizeParams {
    pub n_sites: usize,
    pub hop: Option<f64>,
    pub mass_proxy: Option<f64>,
    pub potential: PotentialShape,
    /// Scale of the chosen shape; a slope for `ramp`, a depth for `double_well`.
    pub amplitude: f64,
    pub potential_values: Option<Vec<f64>>,
    /// Rescale the potential onto `[0, 1]`.
    pub normalize_potential: bool,
    pub env_monitors: usize,
    pub coupling: f64,
    pub splitting: f64,
    pub initial: InitialState,
    pub centers: Option<Vec<f64>>,
    pub sigma: f64,
    pub momentum: f64,
    pub mode: i64,
    pub t_max: f64,
    pub samples: usize,
    /// Window for the branch resolution; defaults to `t_max`.
    pub window: Option<f64>,
    pub separation_factor: f64,
    pub probe_factor: f64,
}

impl Default for LocalizeParams {
    fn default() -> Self {
        LocalizeParams {
            n_sites: 16,
            hop: None,
            mass_proxy: None,
            potential: PotentialShape::Cosine,
            amplitude: 0.5,
            potential_values: None,
            normalize_potential: true,
            env_monitors: 2,
            coupling: 0.5,
            splitting: 0.0,
            initial: InitialState::Lumps,
            centers: None,
            sigma: 0.6,
            momentum: 0.0,
            mode: 0,
            t_max: 3.0,
            samples: 31,
            window: None,
            separation_factor: decohere_core::localization::DEFAULT_SEPARATION_FACTOR,
            probe_factor: decohere_core::localization::DEFAULT_PROBE_FACTOR,
        }
    }
}

pub const DEFAULT_HOP: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    scenario: Kind,
    parameter: String,
    values: Vec<toml::Value>,
    #[serde(default)]
    threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPlan {
    pub scenario: Kind,
    pub parameter: String,
    pub values: Vec<toml::Value>,
    /// Worker count; zero picks the available parallelism.
    pub threads: usize,
    #[serde(skip)]
    pub runs: Vec<ScenarioConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    Thermal(ThermalParams),
    Twostate(TwoStateParams),
    Noncommutative(NoncommutativeParams),
    Localize(LocalizeParams),
    Sweep(SweepPlan),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub kind: Kind,
    pub hbar: f64,
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub params: Params,
    #[serde(skip)]
    pub resolved_defaults: Vec<String>,
}

impl ScenarioConfig {
    /// Seed for randomized scenarios.
    pub fn require_seed(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::config(format!("{what} is randomized; set `seed` in the config or pass --seed")))
    }
}

/// Parses and validates `text`. `expected` is the kind implied by the
/// subcommand; the document's own `kind` must agree with it when both are
/// present. `seed_override` replaces the config seed.
pub fn parse_config(text: &str, expected: Option<Kind>, seed_override: Option<u64>) -> Result<ScenarioConfig> {
    let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.to_string().trim_end().to_string()))?;
    let mut defaults = Vec::new();

    let declared = match doc.get("kind") {
        None => None,
        Some(toml::Value::String(s)) => Some(Kind::from_name(s).ok_or_else(|| {
            let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
            CliError::config(format!("unknown kind `{s}`{}", suggestion(s, &names)))
        })?),
        Some(other) => return Err(CliError::config(format!("`kind` must be a string, found {}", other.type_str()))),
    };
    let kind = match (declared, expected) {
        (Some(d), Some(e)) if d != e => {
            return Err(CliError::config(format!("config declares kind `{}` but the `{}` subcommand was used", d.name(), e.name())))
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(CliError::config("config must declare `kind`")),
    };

    let mut allowed: Vec<&str> = TOP_LEVEL_KEYS.to_vec();
    allowed.push(kind.name());
    let sweep_base = if kind == Kind::Sweep { sweep_scenario(&doc)? } else { None };
    if let Some(base) = sweep_base {
        allowed.push(base.name());
    }
    for key in doc.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(format!("unknown key `{key}`{}", suggestion(key, &allowed))));
        }
    }

    let schema_version = match doc.get("schema_version") {
        None => {
            defaults.push("schema_version".to_string());
            SCHEMA_VERSION
        }
        Some(toml::Value::Integer(v)) if *v == i64::from(SCHEMA_VERSION) => SCHEMA_VERSION,
        Some(v) => return Err(CliError::config(format!("unsupported schema_version {v}; expected {SCHEMA_VERSION}"))),
    };
    let hbar = match doc.get("hbar") {
        None => {
            defaults.push("hbar".to_string());
            1.0
        }
        Some(v) => as_f64(v).ok_or_else(|| CliError::config("`hbar` must be a number"))?,
    };
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(CliError::config(format!("hbar must be positive and finite, got {hbar}")));
    }
    let seed = match seed_override {
        Some(s) => Some(s),
        None => match doc.get("seed") {
            None => None,
            Some(toml::Value::Integer(v)) if *v >= 0 => Some(*v as u64),
            Some(v) => return Err(CliError::config(format!("`seed` must be a non-negative integer, got {v}"))),
        },
    };

    let section = |name: &str| -> Result<toml::Table> {
        match doc.get(name) {
            None => Ok(toml::Table::new()),
            Some(toml::Value::Table(t)) => Ok(t.clone()),
            Some(_) => Err(CliError::config(format!("`{name}` must be a table"))),
        }
    };

    let header = Header { schema_version, hbar, seed };
    if kind == Kind::Sweep {
        let base = sweep_base.expect("sweep scenario resolved above");
        let table = section("sweep")?;
        if !table.contains_key("threads") {
            defaults.push("sweep.threads".to_string());
        }
        let sweep: SweepSection = typed("sweep", table, &["scenario", "parameter", "values", "threads"], &mut Vec::new())?;
        if sweep.values.is_empty() {
            return Err(CliError::config("sweep.values must not be empty"));
        }
        if sweep.threads > 1024 {
            return Err(CliError::config("sweep.threads must be at most 1024"));
        }
        let base_table = section(base.name())?;
        let base_keys = section_keys(base);
        let param = sweep.parameter.as_str();
        if param != "seed" && param != "hbar" && !base_keys.contains(&param.to_string()) {
            let mut cands: Vec<&str> = base_keys.iter().map(String::as_str).collect();
            cands.extend(["seed", "hbar"]);
            return Err(CliError::config(format!(
                "sweep.parameter `{param}` is not a key of [{}]{}",
                base.name(),
                suggestion(param, &cands)
            )));
        }
        let mut runs = Vec::with_capacity(sweep.values.len());
        for (i, value) in sweep.values.iter().enumerate() {
            let mut h = header;
            let mut t = base_table.clone();
            match param {
                "seed" => {
                    h.seed = match value {
                        toml::Value::Integer(v) if *v >= 0 => Some(*v as u64),
                        _ => return Err(CliError::config(format!("sweep value {i}: seed must be a non-negative integer"))),
                    }
                }
                "hbar" => {
                    h.hbar = as_f64(value)
                        .filter(|x| *x > 0.0 && x.is_finite())
                        .ok_or_else(|| CliError::config(format!("sweep value {i}: hbar must be a positive number")))?
                }
                _ => {
                    t.insert(param.to_string(), value.clone());
                }
            }
            let run = build(base, h, t, Vec::new())
                .map_err(|e| CliError::config(format!("sweep value {i} ({param} = {value}): {}", strip_prefix(&e))))?;
            runs.push(run);
        }
        return Ok(ScenarioConfig {
            schema_version,
            kind,
            hbar,
            seed,
            params: Params::Sweep(SweepPlan {
                scenario: base,
                parameter: sweep.parameter,
                values: sweep.values,
                threads: sweep.threads,
                runs,
            }),
            resolved_defaults: defaults,
        });
    }
    build(kind, header, section(kind.name())?, defaults)
}

#[derive(Clone, Copy)]
struct Header {
    schema_version: u32,
    hbar: f64,
    seed: Option<u64>,
}

fn build(kind: Kind, h: Header, table: toml::Table, mut defaults: Vec<String>) -> Result<ScenarioConfig> {
    let keys = section_keys(kind);
    let keys: Vec<&str> = keys.iter().map(String::as_str).collect();
    let params = match kind {
        Kind::Thermal => Params::Thermal(resolve_thermal(typed(kind.name(), table, &keys, &mut defaults)?)?),
        Kind::Twostate => Params::Twostate(resolve_twostate(typed(kind.name(), table, &keys, &mut defaults)?, h.hbar)?),
        Kind::Noncommutative => {
            Params::Noncommutative(resolve_noncommutative(typed(kind.name(), table, &keys, &mut defaults)?, h.hbar)?)
        }
        Kind::Localize => Params::Localize(resolve_localize(typed(kind.name(), table, &keys, &mut defaults)?, h.hbar)?),
        Kind::Sweep => return Err(CliError::config("a sweep cannot run another sweep")),
    };
    let cfg = ScenarioConfig { schema_version: h.schema_version, kind, hbar: h.hbar, seed: h.seed, params, resolved_defaults: defaults };
    check_seed(&cfg)?;
    Ok(cfg)
}

fn check_seed(cfg: &ScenarioConfig) -> Result<()> {
    match &cfg.params {
        Params::Thermal(p) if p.energies.is_none() => cfg.require_seed("the thermal spectrum").map(|_| ()),
        Params::Localize(p) if p.potential == PotentialShape::Random => cfg.require_seed("the potential").map(|_| ()),
        Params::Localize(p) if p.initial == InitialState::Random => cfg.require_seed("the initial state").map(|_| ()),
        _ => Ok(()),
    }
}

fn sweep_scenario(doc: &toml::Table) -> Result<Option<Kind>> {
    let Some(toml::Value::Table(t)) = doc.get("sweep") else {
        return Err(CliError::config("sweep config needs a [sweep] table with `scenario`, `parameter` and `values`"));
    };
    match t.get("scenario") {
        Some(toml::Value::String(s)) => match Kind::from_name(s) {
            Some(Kind::Sweep) => Err(CliError::config("a sweep cannot run another sweep")),
            Some(k) => Ok(Some(k)),
            None => {
                let names: Vec<&str> = Kind::ALL[..4].iter().map(|k| k.name()).collect();
                Err(CliError::config(format!("unknown sweep.scenario `{s}`{}", suggestion(s, &names))))
            }
        },
        _ => Err(CliError::config("sweep.scenario must name a scenario kind")),
    }
}

fn section_keys(kind: Kind) -> Vec<String> {
    let v = match kind {
        Kind::Thermal => serde_json::to_value(ThermalParams::default()),
        Kind::Twostate => serde_json::to_value(TwoStateParams::default()),
        Kind::Noncommutative => serde_json::to_value(NoncommutativeParams::default()),
        Kind::Localize => serde_json::to_value(LocalizeParams::default()),
        Kind::Sweep => return ["scenario", "parameter", "values", "threads"].iter().map(|s| s.to_string()).collect(),
    };
    match v {
        Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
        _ => unreachable!("parameter structs serialize to objects"),
    }
}

fn typed<T: DeserializeOwned>(name: &str, table: toml::Table, keys: &[&str], defaults: &mut Vec<String>) -> Result<T> {
    for key in table.keys() {
        if !keys.contains(&key.as_str()) {
            return Err(CliError::config(format!("unknown key `{name}.{key}`{}", suggestion(key, keys))));
        }
    }
    for key in keys {
        if !table.contains_key(*key) {
            defaults.push(format!("{name}.{key}"));
        }
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::config(format!("[{name}] {}", e.message())))
}

fn suggestion(key: &str, candidates: &[&str]) -> String {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(key, c), *c))
        .filter(|(d, c)| *d <= (c.len().max(key.len()) / 2).max(1))
        .min()
        .map(|(_, c)| format!("; did you mean `{c}`?"))
        .unwrap_or_default()
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn strip_prefix(e: &CliError) -> String {
    match e {
        CliError::Config(m) | CliError::Regime(m) | CliError::Io(m) => m.clone(),
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    let x = v.ok_or_else(|| CliError::config(format!("missing required key `{name}`")))?;
    finite(name, x)
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(format!("`{name}` must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(format!("`{name}` must be positive and finite, got {x}")))
    }
}

fn at_least(name: &str, x: usize, min: usize) -> Result<usize> {
    if x >= min {
        Ok(x)
    } else {
        Err(CliError::config(format!("`{name}` must be at least {min}, got {x}")))
    }
}

fn resolve_thermal(mut p: ThermalParams) -> Result<ThermalParams> {
    if let Some(e) = &p.energies {
        if e.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config("`thermal.energies` must be finite"));
        }
        p.levels = e.len();
    }
    at_least("thermal.levels", p.levels, 2)?;
    if p.levels > decohere_core::hilbert::MAX_TOTAL_DIM {
        return Err(CliError::config(format!("`thermal.levels` exceeds the cap of {}", decohere_core::hilbert::MAX_TOTAL_DIM)));
    }
    positive("thermal.spacing", p.spacing)?;
    at_least("thermal.windows", p.windows, 3)?;
    positive("thermal.t_min", p.t_min)?;
    positive("thermal.t_max", p.t_max)?;
    if p.t_max <= p.t_min {
        return Err(CliError::config("`thermal.t_max` must exceed `thermal.t_min`"));
    }
    at_least("thermal.points_per_period", p.points_per_period, 2)?;
    Ok(p)
}

fn resolve_twostate(mut p: TwoStateParams, _hbar: f64) -> Result<TwoStateParams> {
    require("twostate.lambda_up", p.lambda_up)?;
    require("twostate.lambda_down", p.lambda_down)?;
    finite("twostate.eps_up", p.eps_up)?;
    finite("twostate.eps_down", p.eps_down)?;
    finite("twostate.theta0", p.theta0)?;
    positive("twostate.window", p.window)?;
    at_least("twostate.samples", p.samples, 2)?;
    at_least("twostate.n_theta", p.n_theta, 3)?;
    positive("twostate.gap_threshold", p.gap_threshold)?;
    p.saddle_time = Some(positive("twostate.saddle_time", p.saddle_time.unwrap_or(p.window))?);
    Ok(p)
}

fn resolve_noncommutative(mut p: NoncommutativeParams, hbar: f64) -> Result<NoncommutativeParams> {
    let eu = require("noncommutative.eps_up", p.eps_up)?;
    let ed = require("noncommutative.eps_down", p.eps_down)?;
    let vp = require("noncommutative.v_plus", p.v_plus)?;
    let vm = require("noncommutative.v_minus", p.v_minus)?;
    if eu == ed {
        return Err(CliError::config("`noncommutative.eps_up` and `eps_down` must differ"));
    }
    if vp == vm {
        return Err(CliError::config("`noncommutative.v_plus` and `v_minus` must differ"));
    }
    finite("noncommutative.theta0", p.theta0)?;
    let window = first_order_window(hbar, eu - ed, vp - vm);
    p.t_max = Some(positive("noncommutative.t_max", p.t_max.unwrap_or(window))?);
    at_least("noncommutative.samples", p.samples, 2)?;
    at_least("noncommutative.diagnostic_samples", p.diagnostic_samples, 2)?;
    Ok(p)
}

/// `0.1·min(2ħ/|Δε|, ħ/|ΔV|)`.
pub fn first_order_window(hbar: f64, delta_eps: f64, delta_v: f64) -> f64 {
    0.1 * (2.0 * hbar / delta_eps.abs()).min(hbar / delta_v.abs())
}

fn resolve_localize(mut p: LocalizeParams, hbar: f64) -> Result<LocalizeParams> {
    at_least("localize.n_sites", p.n_sites, 4)?;
    p.hop = Some(match (p.hop, p.mass_proxy) {
        (Some(_), Some(_)) => return Err(CliError::config("set either `localize.hop` or `localize.mass_proxy`, not both")),
        (Some(h), None) => positive("localize.hop", h)?,
        (None, Some(m)) => hbar * hbar / (2.0 * positive("localize.mass_proxy", m)?),
        (None, None) => DEFAULT_HOP,
    });
    p.mass_proxy = None;
    finite("localize.amplitude", p.amplitude)?;
    match (p.potential, &p.potential_values) {
        (PotentialShape::Values, None) => {
            return Err(CliError::config("`localize.potential = \"values\"` needs `potential_values`"))
        }
        (PotentialShape::Values, Some(v)) => {
            if v.len() != p.n_sites {
                return Err(CliError::config(format!(
                    "`localize.potential_values` has {} entries but n_sites = {}",
                    v.len(),
                    p.n_sites
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(CliError::config("`localize.potential_values` must be finite"));
            }
        }
        (_, Some(_)) => return Err(CliError::config("`localize.potential_values` requires `potential = \"values\"`")),
        _ => {}
    }
    let dim = (p.n_sites as u128) << p.env_monitors.min(100);
    if dim > decohere_core::hilbert::MAX_TOTAL_DIM as u128 {
        return Err(CliError::config(format!(
            "n_sites · 2^env_monitors = {} exceeds the cap of {}",
            if p.env_monitors < 100 { dim.to_string() } else { "overflow".to_string() },
            decohere_core::hilbert::MAX_TOTAL_DIM
        )));
    }
    finite("localize.coupling", p.coupling)?;
    finite("localize.splitting", p.splitting)?;
    let n = p.n_sites as f64;
    let centers = p.centers.take().unwrap_or_else(|| match p.initial {
        InitialState::Lumps => vec![0.0, (p.n_sites / 2) as f64],
        _ => vec![(p.n_sites / 2) as f64],
    });
    if centers.is_empty() || centers.iter().any(|c| !c.is_finite() || *c < 0.0 || *c >= n) {
        return Err(CliError::config(format!("`localize.centers` must be non-empty and lie in [0, {})", p.n_sites)));
    }
    p.centers = Some(centers);
    positive("localize.sigma", p.sigma)?;
    finite("localize.momentum", p.momentum)?;
    positive("localize.t_max", p.t_max)?;
    at_least("localize.samples", p.samples, 2)?;
    p.window = Some(positive("localize.window", p.window.unwrap_or(p.t_max))?);
    positive("localize.separation_factor", p.separation_factor)?;
    positive("localize.probe_factor", p.probe_factor)?;
    Ok(p)
}
