//! Level sequences `0 = e_0 < e_1 < ...` in dimensionless form, plus the
//! frequency scale that multiplies them back into energies.

use crate::error::{Error, Result};

/// How many levels a formula spectrum is probed at construction time.
pub const DEFAULT_VALIDATION_DEPTH: usize = 10_000;

/// Parametric level formulas with a known analytic limit.
#[derive(Debug, Clone, PartialEq)]
pub enum FormulaFamily {
    /// e_n = 1 - (n+1)^(-p), p > 0, accumulating at 1.
    PowerLaw { p: f64 },
    /// e_n = cap * n/(n+1), cap > 0, accumulating at cap.
    AffineCapped { cap: f64 },
}

impl FormulaFamily {
    /// Distance e* - e_n to the accumulation point. Exactly computable,
    /// which is what keeps monotonicity checks meaningful at large n where
    /// neighbouring e_n collide in f64.
    fn gap(&self, n: usize) -> f64 {
        match self {
            FormulaFamily::PowerLaw { p } => ((n + 1) as f64).powf(-p),
            FormulaFamily::AffineCapped { cap } => cap / (n + 1) as f64,
        }
    }

    fn limit(&self) -> f64 {
        match self {
            FormulaFamily::PowerLaw { .. } => 1.0,
            FormulaFamily::AffineCapped { cap } => *cap,
        }
    }

    fn check_params(&self) -> Result<()> {
        let ok = match self {
            FormulaFamily::PowerLaw { p } => p.is_finite() && *p > 0.0,
            FormulaFamily::AffineCapped { cap } => cap.is_finite() && *cap > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpectrum(
                "formula parameter must be finite and positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumKind {
    Harmonic,
    Hydrogen1D,
    CustomTable(Vec<f64>),
    CustomFormula(FormulaFamily),
}

/// A nondegenerate discrete spectrum: level values e_n and a frequency omega.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    kind: SpectrumKind,
    omega: f64,
}

/// Numeric estimate of the level-sequence limit e*.
#[derive(Debug, Clone, Copy)]
pub struct LimitEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    FirstLevelNonzero,
    NotStrictlyIncreasing,
}

#[derive(Debug, Clone, Copy)]
pub struct Violation {
    pub index: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationResult {
    pub checked_up_to: usize,
    pub violation: Option<Violation>,
}

impl ValidationResult {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpectrum(
            "omega must be finite and positive".into(),
        ))
    }
}

impl SpectrumSpec {
    pub fn harmonic(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        Ok(Self {
            kind: SpectrumKind::Harmonic,
            omega,
        })
    }

    pub fn hydrogen_1d(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        Ok(Self {
            kind: SpectrumKind::Hydrogen1D,
            omega,
        })
    }

    /// Builds a spectrum from explicit level values. The whole table is
    /// validated up front; a violation is a construction error here.
    pub fn custom_table(omega: f64, levels: Vec<f64>) -> Result<Self> {
        check_omega(omega)?;
        if levels.is_empty() {
            return Err(Error::InvalidSpectrum("level table is empty".into()));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpectrum(
                "level table contains non-finite entries".into(),
            ));
        }
        let spec = Self {
            kind: SpectrumKind::CustomTable(levels),
            omega,
        };
        let n_max = spec.max_index().unwrap();
        let check = spec.validate(n_max);
        if let Some(v) = check.violation {
            return Err(Error::InvalidSpectrum(format!(
                "level table invalid at index {}: {:?}",
                v.index, v.kind
            )));
        }
        Ok(spec)
    }

    pub fn custom_formula(omega: f64, family: FormulaFamily) -> Result<Self> {
        Self::custom_formula_with_depth(omega, family, DEFAULT_VALIDATION_DEPTH)
    }

    pub fn custom_formula_with_depth(
        omega: f64,
        family: FormulaFamily,
        depth: usize,
    ) -> Result<Self> {
        check_omega(omega)?;
        family.check_params()?;
        let spec = Self {
            kind: SpectrumKind::CustomFormula(family),
            omega,
        };
        let check = spec.validate(depth);
        if let Some(v) = check.violation {
            return Err(Error::InvalidSpectrum(format!(
                "formula levels invalid at index {}: {:?}",
                v.index, v.kind
            )));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Short tag for report headers.
    pub fn name(&self) -> String {
        match &self.kind {
            SpectrumKind::Harmonic => "harmonic".into(),
            SpectrumKind::Hydrogen1D => "hydrogen1d".into(),
            SpectrumKind::CustomTable(t) => format!("custom_table[{}]", t.len()),
            SpectrumKind::CustomFormula(FormulaFamily::PowerLaw { p }) => {
                format!("power_law(p={p})")
            }
            SpectrumKind::CustomFormula(FormulaFamily::AffineCapped { cap }) => {
                format!("affine_capped(cap={cap})")
            }
        }
    }

    /// Dimensionless level e_n.
    pub fn level(&self, n: usize) -> Result<f64> {
        match &self.kind {
            SpectrumKind::Harmonic => Ok(n as f64),
            SpectrumKind::Hydrogen1D => {
                let d = (n + 1) as f64;
                Ok(1.0 - 1.0 / (d * d))
            }
            SpectrumKind::CustomTable(t) => t.get(n).copied().ok_or(Error::IndexBeyondTable {
                index: n,
                len: t.len(),
            }),
            SpectrumKind::CustomFormula(f) => Ok(f.limit() - f.gap(n)),
        }
    }

    /// e* - e_n for spectra with a finite accumulation point; None otherwise.
    pub fn level_gap(&self, n: usize) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Hydrogen1D => {
                let d = (n + 1) as f64;
                Some(1.0 / (d * d))
            }
            SpectrumKind::CustomFormula(f) => Some(f.gap(n)),
            _ => None,
        }
    }

    /// Largest valid level index, when the spectrum is a finite table.
    pub fn max_index(&self) -> Option<usize> {
        match &self.kind {
            SpectrumKind::CustomTable(t) => Some(t.len() - 1),
            _ => None,
        }
    }

    /// Checks e_0 = 0 and strict monotonicity through index n_max (or the
    /// table end). For spectra with an accumulation point the comparison runs
    /// on the gaps e* - e_n, which stay resolvable in f64 long after the
    /// levels themselves stop being distinct.
    pub fn validate(&self, n_max: usize) -> ValidationResult {
        let top = match self.max_index() {
            Some(last) => n_max.min(last),
            None => n_max,
        };
        if self.level(0).unwrap_or(f64::NAN) != 0.0 {
            return ValidationResult {
                checked_up_to: 0,
                violation: Some(Violation {
                    index: 0,
                    kind: ViolationKind::FirstLevelNonzero,
                }),
            };
        }
        let uses_gap = self.level_gap(0).is_some();
        for n in 0..top {
            let increasing = if uses_gap {
                self.level_gap(n + 1).unwrap() < self.level_gap(n).unwrap()
            } else {
                self.level(n + 1).unwrap() > self.level(n).unwrap()
            };
            if !increasing {
                return ValidationResult {
                    checked_up_to: n + 1,
                    violation: Some(Violation {
                        index: n + 1,
                        kind: ViolationKind::NotStrictlyIncreasing,
                    }),
                };
            }
        }
        ValidationResult {
            checked_up_to: top,
            violation: None,
        }
    }

    /// Limit of the level sequence. Exact for the built-ins, extrapolated
    /// numerically for formula spectra, unavailable for finite tables.
    pub fn limit_level(&self) -> Result<LimitEstimate> {
        match &self.kind {
            SpectrumKind::Harmonic => Ok(LimitEstimate {
                value: f64::INFINITY,
                uncertainty: 0.0,
            }),
            SpectrumKind::Hydrogen1D => Ok(LimitEstimate {
                value: 1.0,
                uncertainty: 0.0,
            }),
            SpectrumKind::CustomTable(_) => Err(Error::LimitUnavailable),
            SpectrumKind::CustomFormula(_) => {
                Ok(estimate_limit(|n| self.level(n).expect("formula level")))
            }
        }
    }

    /// Analytic accumulation point where one exists, used internally for
    /// log-level evaluation. Finite tables have none.
    pub(crate) fn finite_limit(&self) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Hydrogen1D => Some(1.0),
            SpectrumKind::CustomFormula(f) => Some(f.limit()),
            _ => None,
        }
    }
}

/// Aitken-accelerated limit of e_n sampled at geometrically spaced indices.
/// The uncertainty is the spread of the last accelerated values; for the
/// supported families it comfortably brackets the true limit.
fn estimate_limit(level: impl Fn(usize) -> f64) -> LimitEstimate {
    let samples: Vec<f64> = (0..=14).map(|k| level(64usize << k)).collect();
    let mut accel = Vec::with_capacity(samples.len() - 2);
    for w in samples.windows(3) {
        let d1 = w[1] - w[0];
        let d2 = w[2] - w[1];
        let den = d2 - d1;
        if den.abs() <= f64::EPSILON * (d1.abs() + d2.abs() + w[2].abs()) {
            accel.push(w[2]);
        } else {
            accel.push(w[2] - d2 * d2 / den);
        }
    }
    let value = *accel.last().unwrap();
    let prev = accel[accel.len() - 2];
    let tail_step = (samples[14] - samples[13]).abs();
    let uncertainty = ((value - prev).abs() * 4.0)
        .max(tail_step * 1e-4)
        .max(8.0 * f64::EPSILON * (1.0 + value.abs()));
    LimitEstimate { value, uncertainty }
}
