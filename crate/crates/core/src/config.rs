//! Run configuration: JSON file plus command-line overrides.
//!
//! ```json
//! { "nu": {"pi_multiple": 1.0}, "lattice": "square", "character": "weierstrass" }
//! ```
//!
//! `nu` is a number or `{"pi_multiple": x}` (exact relative to π, which is
//! what the quantization check compares against). `lattice` is `"square"`,
//! `"hexagonal"` or a full `{ "n": .., "generators": .. }` spec. `character`
//! is a kind name or a tagged object (`{"kind": "explicit", ...}`).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::character::{AutomorphicData, CharacterSpec};
use crate::error::{Error, Result};
use crate::kernels::TruncationPolicy;
use crate::lattice::{Lattice, LatticeSpec};
use crate::operators::{MAX_EIGS, MIN_GRID};
use crate::verify::{SuiteSettings, Tolerances, MAX_SELBERG_LEVEL};

/// ν as written in a config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    PiMultiple { pi_multiple: f64 },
    Value(f64),
}

impl NuSpec {
    pub fn value(&self) -> f64 {
        match *self {
            NuSpec::PiMultiple { pi_multiple } => pi_multiple * PI,
            NuSpec::Value(v) => v,
        }
    }
}

/// Lattice by preset name or explicit generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeChoice {
    Preset(String),
    Spec(LatticeSpec),
}

impl LatticeChoice {
    pub const PRESETS: [&'static str; 2] = ["square", "hexagonal"];

    pub fn build(&self) -> Result<Lattice> {
        match self {
            LatticeChoice::Preset(name) => match name.as_str() {
                "square" => Ok(Lattice::square()),
                "hexagonal" => Ok(Lattice::hexagonal()),
                other => Err(Error::Config {
                    field: "lattice".into(),
                    message: format!("unknown preset `{other}`; supported: {}", Self::PRESETS.join(", ")),
                }),
            },
            LatticeChoice::Spec(spec) => Lattice::from_spec(spec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub nu: NuSpec,
    pub lattice: LatticeChoice,
    pub character: CharacterSpec,
    /// Absolute truncation tolerance of lattice sums.
    pub tolerance: f64,
    /// Gauss-Legendre points per axis on the fundamental domain.
    pub quad_order: usize,
    /// Gauss-Laguerre order of the Selberg transform.
    pub radial_order: usize,
    pub grid: usize,
    pub num_eigs: usize,
    pub levels: Vec<usize>,
    pub l_max: usize,
    pub threads: usize,
    pub output: Option<PathBuf>,
    pub tolerances: Tolerances,
}

const KNOWN_FIELDS: [&str; 14] = [
    "nu",
    "lattice",
    "character",
    "tolerance",
    "quad_order",
    "radial_order",
    "grid",
    "num_eigs",
    "levels",
    "l_max",
    "threads",
    "output",
    "tolerances",
    "schema",
];

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn take<T: serde::de::DeserializeOwned>(obj: &Map<String, Value>, field: &str) -> Result<Option<T>> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| config_err(field, e.to_string())),
    }
}

/// Parses a character given as a kind name or a tagged object.
pub fn parse_character(value: &Value) -> Result<CharacterSpec> {
    let kinds = CharacterSpec::KINDS.join(", ");
    let kind = match value {
        Value::String(s) => s.clone(),
        Value::Object(o) => o.get("kind").and_then(Value::as_str).unwrap_or_default().to_string(),
        _ => String::new(),
    };
    if !CharacterSpec::KINDS.contains(&kind.as_str()) {
        return Err(config_err("character", format!("unknown character kind `{kind}`; supported kinds: {kinds}")));
    }
    let tagged = match value {
        Value::String(s) => serde_json::json!({ "kind": s }),
        other => other.clone(),
    };
    serde_json::from_value(tagged).map_err(|e| config_err("character", e.to_string()))
}

/// Parses "pi", "2pi", "2*pi", "pi/2", "0.5pi" or a plain number.
pub fn parse_nu_expr(text: &str) -> Result<NuSpec> {
    let t: String = text.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || config_err("nu", format!("cannot parse `{text}` (use e.g. 3.14, pi, 2pi, pi/2)"));
    if let Some(pos) = t.find("pi") {
        let coef_text = t[..pos].trim_end_matches('*');
        let coef = if coef_text.is_empty() { 1.0 } else { coef_text.parse::<f64>().map_err(|_| bad())? };
        let rest = &t[pos + 2..];
        let div = if rest.is_empty() {
            1.0
        } else {
            rest.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?
        };
        return Ok(NuSpec::PiMultiple { pi_multiple: coef / div });
    }
    t.parse::<f64>().map(NuSpec::Value).map_err(|_| bad())
}

/// Command-line values that replace config-file values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub nu: Option<NuSpec>,
    pub lattice: Option<LatticeChoice>,
    pub character: Option<CharacterSpec>,
    pub tolerance: Option<f64>,
    pub quad_order: Option<usize>,
    pub radial_order: Option<usize>,
    pub grid: Option<usize>,
    pub num_eigs: Option<usize>,
    pub levels: Option<Vec<usize>>,
    pub l_max: Option<usize>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for everything but the triplet.
    pub fn with_triplet(nu: NuSpec, lattice: LatticeChoice, character: CharacterSpec) -> Self {
        Self {
            nu,
            lattice,
            character,
            tolerance: 1e-10,
            quad_order: 32,
            radial_order: 40,
            grid: 96,
            num_eigs: 6,
            levels: (0..=4).collect(),
            l_max: 6,
            threads: 1,
            output: None,
            tolerances: Tolerances::default(),
        }
    }

    /// The Weierstrass triplet on ℤ + iℤ at ν = π.
    pub fn weierstrass_square() -> Self {
        Self::with_triplet(
            NuSpec::PiMultiple { pi_multiple: 1.0 },
            LatticeChoice::Preset("square".into()),
            CharacterSpec::Weierstrass,
        )
    }

    /// Parses a JSON document; missing triplet fields are errors unless
    /// supplied by `overrides`.
    pub fn from_json_str(text: &str, overrides: &Overrides) -> Result<Self> {
        // serde_json's message already carries "at line L column C"
        let value: Value = serde_json::from_str(text).map_err(|e| config_err("<document>", e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| config_err("<document>", "expected a JSON object"))?;
        Self::from_object(obj, overrides)
    }

    pub fn from_path(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("<document>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text, overrides)
    }

    /// Config from flags alone; the triplet defaults to the Weierstrass
    /// triplet on ℤ + iℤ at ν = π.
    pub fn from_overrides(overrides: &Overrides) -> Result<Self> {
        let defaults = serde_json::json!({
            "nu": {"pi_multiple": 1.0},
            "lattice": "square",
            "character": "weierstrass",
        });
        Self::from_object(defaults.as_object().expect("object literal"), overrides)
    }

    fn from_object(obj: &Map<String, Value>, ov: &Overrides) -> Result<Self> {
        for key in obj.keys() {
            if !KNOWN_FIELDS.contains(&key.as_str()) {
                return Err(config_err(key, format!("unknown field; expected one of {}", KNOWN_FIELDS.join(", "))));
            }
        }
        if let Some(schema) = obj.get("schema") {
            if schema.as_u64() != Some(1) {
                return Err(config_err("schema", "only schema 1 is supported"));
            }
        }
        let nu = match ov.nu {
            Some(n) => n,
            None => take::<NuSpec>(obj, "nu")?.ok_or_else(|| config_err("nu", "missing"))?,
        };
        let lattice = match &ov.lattice {
            Some(l) => l.clone(),
            None => take::<LatticeChoice>(obj, "lattice")?.ok_or_else(|| config_err("lattice", "missing"))?,
        };
        let character = match &ov.character {
            Some(c) => c.clone(),
            None => parse_character(obj.get("character").ok_or_else(|| config_err("character", "missing"))?)?,
        };
        let mut cfg = Self::with_triplet(nu, lattice, character);
        macro_rules! field {
            ($name:ident) => {
                if let Some(v) = ov.$name.clone() {
                    cfg.$name = v;
                } else if let Some(v) = take(obj, stringify!($name))? {
                    cfg.$name = v;
                }
            };
        }
        field!(tolerance);
        field!(quad_order);
        field!(radial_order);
        field!(grid);
        field!(num_eigs);
        field!(levels);
        field!(l_max);
        field!(threads);
        if let Some(v) = ov.output.clone() {
            cfg.output = Some(v);
        } else if let Some(v) = take(obj, "output")? {
            cfg.output = Some(v);
        }
        if let Some(t) = take(obj, "tolerances")? {
            cfg.tolerances = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks numeric ranges and that the lattice and character build.
    pub fn validate(&self) -> Result<()> {
        let nu = self.nu.value();
        if !(nu.is_finite() && nu > 0.0) {
            return Err(config_err("nu", format!("must be positive, got {nu}")));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(config_err("tolerance", format!("must lie in (0, 1), got {}", self.tolerance)));
        }
        if self.quad_order < 2 {
            return Err(config_err("quad_order", "must be at least 2"));
        }
        if self.radial_order < 1 {
            return Err(config_err("radial_order", "must be at least 1"));
        }
        if self.grid < MIN_GRID {
            return Err(config_err("grid", format!("must be at least {MIN_GRID}")));
        }
        if self.num_eigs == 0 || self.num_eigs > MAX_EIGS {
            return Err(config_err("num_eigs", format!("must lie in 1..={MAX_EIGS}")));
        }
        if self.levels.is_empty() {
            return Err(config_err("levels", "must not be empty"));
        }
        if self.l_max > MAX_SELBERG_LEVEL {
            return Err(config_err("l_max", format!("must be at most {MAX_SELBERG_LEVEL}")));
        }
        if self.threads == 0 {
            return Err(config_err("threads", "must be at least 1"));
        }
        let t = &self.tolerances;
        let all = [
            t.dimension,
            t.character_independence,
            t.theta_dimension,
            t.selberg,
            t.character_integral,
            t.bargmann,
            t.periodization,
            t.functional_equation,
            t.reproducing,
            t.dbar,
            t.restriction,
            t.chain_rule,
            t.spectrum,
            t.ground_order,
        ];
        if all.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(config_err("tolerances", "all tolerances must be positive"));
        }
        let lattice = self.lattice.build().map_err(|e| match e {
            Error::Config { .. } => e,
            other => config_err("lattice", other.to_string()),
        })?;
        self.character.build(&lattice)?;
        Ok(())
    }

    pub fn nu_value(&self) -> f64 {
        self.nu.value()
    }

    pub fn build_lattice(&self) -> Result<Lattice> {
        self.lattice.build()
    }

    /// The triplet; RDQ is evaluated but not enforced here.
    pub fn automorphic_data(&self) -> Result<AutomorphicData> {
        let lattice = self.build_lattice()?;
        let character = self.character.build(&lattice)?;
        AutomorphicData::new(self.nu_value(), lattice, character)
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { tolerance: self.tolerance, ..TruncationPolicy::default() }
    }

    pub fn suite_settings(&self) -> SuiteSettings {
        SuiteSettings {
            policy: self.policy(),
            quad_order: self.quad_order,
            radial_order: self.radial_order,
            levels: self.levels.clone(),
            l_max: self.l_max,
            grid: self.grid,
            num_eigs: self.num_eigs,
            tolerances: self.tolerances,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_json_str(text, &Overrides::default())
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse(r#"{"nu": {"pi_multiple": 1.0}, "lattice": "square", "character": "weierstrass"}"#).unwrap();
        assert_eq!(cfg.nu_value(), PI);
        assert_eq!(cfg.tolerance, 1e-10);
        assert_eq!(cfg.quad_order, 32);
        assert_eq!(cfg.levels, vec![0, 1, 2, 3, 4]);
        assert!(cfg.automorphic_data().unwrap().rdq_valid());
        assert_eq!(cfg, RunConfig::weierstrass_square());
    }

    #[test]
    fn negative_nu_names_the_field() {
        let err = parse(r#"{"nu": -1, "lattice": "square", "character": "trivial"}"#).unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "nu"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_character_lists_kinds() {
        let err = parse(r#"{"nu": 1, "lattice": "square", "character": "dirichlet"}"#).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("character"));
        for kind in CharacterSpec::KINDS {
            assert!(text.contains(kind), "{text}");
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{\n  \"nu\": 1,\n  \"lattice\": }").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse(r#"{"nu": 1, "lattice": "square", "character": "trivial", "grdi": 4}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "grdi"));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides { nu: Some(parse_nu_expr("2pi").unwrap()), grid: Some(48), ..Overrides::default() };
        let cfg =
            RunConfig::from_json_str(r#"{"nu": 1, "lattice": "square", "character": "trivial", "grid": 64}"#, &ov)
                .unwrap();
        assert_eq!(cfg.nu_value(), 2.0 * PI);
        assert_eq!(cfg.grid, 48);
    }

    #[test]
    fn explicit_lattice_and_character() {
        let cfg = parse(
            r#"{"nu": {"pi_multiple": 2}, "lattice": {"n": 1, "generators": [[1, 0], [0, 1]]},
                "character": {"kind": "explicit", "generator_values": [[-1, 0], [1, 0]]}}"#,
        )
        .unwrap();
        assert!(cfg.automorphic_data().unwrap().rdq_valid());
        assert!(parse(r#"{"nu": 1, "lattice": "triangle", "character": "trivial"}"#).is_err());
    }

    #[test]
    fn nu_expressions() {
        assert_eq!(parse_nu_expr("pi").unwrap().value(), PI);
        assert_eq!(parse_nu_expr("2*pi").unwrap().value(), 2.0 * PI);
        assert_eq!(parse_nu_expr("pi/2").unwrap().value(), PI / 2.0);
        assert_eq!(parse_nu_expr("0.5pi").unwrap().value(), PI / 2.0);
        assert_eq!(parse_nu_expr("1.25").unwrap().value(), 1.25);
        assert!(parse_nu_expr("tau").is_err());
    }
}
