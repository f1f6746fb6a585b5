use std::path::Path;

use cohstate_core::{FormulaFamily, QuadraturePolicy, SpectrumSpec, TruncationPolicy};
use serde::Deserialize;

/// Errors that should terminate with exit code 2: the request itself is
/// malformed, before any numerics run.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Deserialize, Debug, Clone)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumConfig {
    Harmonic {
        omega: Option<f64>,
    },
    Hydrogen1d {
        omega: Option<f64>,
    },
    CustomTable {
        omega: Option<f64>,
        levels: Vec<f64>,
    },
    CustomFormula {
        omega: Option<f64>,
        #[serde(flatten)]
        family: FamilyConfig,
    },
}

#[derive(Deserialize, Debug, Clone)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyConfig {
    PowerLaw { p: f64 },
    AffineCapped { cap: f64 },
}

#[derive(Deserialize, Debug, Clone, Default)]
pub struct PolicyConfig {
    pub rel_tol: Option<f64>,
    pub n_cap: Option<usize>,
}

#[derive(Deserialize, Debug, Clone, Default)]
pub struct QuadConfig {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_panels: Option<usize>,
}

/// Top-level shape of a `--config` JSON file. Every block is optional;
/// command-line flags override whatever the file provides.
#[derive(Deserialize, Debug, Clone, Default)]
pub struct FileConfig {
    pub spectrum: Option<SpectrumConfig>,
    pub policy: Option<PolicyConfig>,
    pub quad: Option<QuadConfig>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))
}

/// Everything a subcommand needs to start computing.
pub struct Resolved {
    pub spec: SpectrumSpec,
    pub policy: TruncationPolicy,
    pub quad: QuadraturePolicy,
}

pub struct SpectrumFlags<'a> {
    pub kind: Option<&'a str>,
    pub omega: Option<f64>,
    pub levels: Option<&'a [f64]>,
    pub family: Option<&'a str>,
    pub family_param: Option<f64>,
}

fn family_from_flags(
    family: Option<&str>,
    param: Option<f64>,
) -> Result<FormulaFamily, ConfigError> {
    let name = match family {
        Some(f) => f,
        None => return cfg_err("custom-formula needs --family (power-law or affine-capped)"),
    };
    let p = match param {
        Some(p) => p,
        None => return cfg_err("custom-formula needs --family-param"),
    };
    match name {
        "power-law" | "power_law" => Ok(FormulaFamily::PowerLaw { p }),
        "affine-capped" | "affine_capped" => Ok(FormulaFamily::AffineCapped { cap: p }),
        other => cfg_err(format!(
            "unknown family '{other}' (expected power-law or affine-capped)"
        )),
    }
}

fn spectrum_from_flags(flags: &SpectrumFlags, omega: f64) -> Result<SpectrumSpec, ConfigError> {
    let kind = flags.kind.expect("caller checked kind is present");
    let spec = match kind {
        "harmonic" => SpectrumSpec::harmonic(omega),
        "hydrogen1d" => SpectrumSpec::hydrogen_1d(omega),
        "custom-table" | "custom_table" => {
            let levels = match flags.levels {
                Some(l) if !l.is_empty() => l.to_vec(),
                _ => return cfg_err("custom-table needs --levels with at least one value"),
            };
            SpectrumSpec::custom_table(omega, levels)
        }
        "custom-formula" | "custom_formula" => {
            let family = family_from_flags(flags.family, flags.family_param)?;
            SpectrumSpec::custom_formula(omega, family)
        }
        other => {
            return cfg_err(format!(
                "unknown spectrum '{other}' (expected harmonic, hydrogen1d, custom-table, or custom-formula)"
            ))
        }
    };
    spec.map_err(|e| ConfigError(e.to_string()))
}

fn spectrum_from_file(
    cfg: &SpectrumConfig,
    omega_flag: Option<f64>,
) -> Result<SpectrumSpec, ConfigError> {
    let pick = |file_omega: &Option<f64>| omega_flag.or(*file_omega).unwrap_or(1.0);
    let spec = match cfg {
        SpectrumConfig::Harmonic { omega } => SpectrumSpec::harmonic(pick(omega)),
        SpectrumConfig::Hydrogen1d { omega } => SpectrumSpec::hydrogen_1d(pick(omega)),
        SpectrumConfig::CustomTable { omega, levels } => {
            SpectrumSpec::custom_table(pick(omega), levels.clone())
        }
        SpectrumConfig::CustomFormula { omega, family } => {
            let fam = match family {
                FamilyConfig::PowerLaw { p } => FormulaFamily::PowerLaw { p: *p },
                FamilyConfig::AffineCapped { cap } => FormulaFamily::AffineCapped { cap: *cap },
            };
            SpectrumSpec::custom_formula(pick(omega), fam)
        }
    };
    spec.map_err(|e| ConfigError(e.to_string()))
}

/// Merge file config and flags. A `--spec` flag replaces the file's spectrum
/// block outright; `--omega` and the policy flags override field by field.
pub fn resolve(
    file: &FileConfig,
    flags: &SpectrumFlags,
    rel_tol: Option<f64>,
    n_cap: Option<usize>,
) -> Result<Resolved, ConfigError> {
    let spec = if flags.kind.is_some() {
        spectrum_from_flags(flags, flags.omega.unwrap_or(1.0))?
    } else if let Some(cfg) = &file.spectrum {
        spectrum_from_file(cfg, flags.omega)?
    } else {
        return cfg_err("no spectrum given; pass --spec or a config file with a spectrum block");
    };

    let file_policy = file.policy.clone().unwrap_or_default();
    let defaults = TruncationPolicy::default();
    let policy = TruncationPolicy {
        rel_tol: rel_tol.or(file_policy.rel_tol).unwrap_or(defaults.rel_tol),
        n_cap: n_cap.or(file_policy.n_cap).unwrap_or(defaults.n_cap),
    };
    policy.validate().map_err(|e| ConfigError(e.to_string()))?;

    let file_quad = file.quad.clone().unwrap_or_default();
    let qdefaults = QuadraturePolicy::default();
    let quad = QuadraturePolicy {
        abs_tol: file_quad.abs_tol.unwrap_or(qdefaults.abs_tol),
        rel_tol: file_quad.rel_tol.unwrap_or(qdefaults.rel_tol),
        max_panels: file_quad.max_panels.unwrap_or(qdefaults.max_panels),
    };
    if quad.abs_tol.is_nan()
        || quad.abs_tol <= 0.0
        || quad.rel_tol.is_nan()
        || quad.rel_tol < 0.0
        || quad.max_panels == 0
    {
        return cfg_err("quad block needs abs_tol > 0, rel_tol >= 0, max_panels >= 1");
    }

    Ok(Resolved { spec, policy, quad })
}
