//! Energy moments over |J, gamma> and the identities they must satisfy:
//! <H> = omega J exactly (the action identity), and for the hydrogen chain
//! the variance window 0 < v(J) < 6(1 - J).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectrum::SpectrumSpec;
use crate::state::{self, TruncationPolicy, ORDER_TWO};

/// Default offset for the finite-difference phase derivative.
pub const ONE_FORM_FD_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, Copy)]
pub struct ObservableReport {
    pub j: f64,
    pub mean_h: f64,
    pub mean_h_sq: f64,
    /// Dimensionless energy variance v(J) = <H^2>/omega^2 - (<H>/omega)^2.
    pub v: f64,
    /// |<H>/(omega J) - 1|, the action identity in relative form.
    pub action_residual: f64,
    /// |i<d/dgamma> - J| with the derivative taken by central differences,
    /// the independent route to the canonical one-form.
    pub one_form_residual: f64,
}

/// <H> = omega * (sum e_n t_n) / (sum t_n).
pub fn mean_energy(spec: &SpectrumSpec, j: f64, policy: &TruncationPolicy) -> Result<f64> {
    let sums = state::power_sums(spec, j, policy, 1, false)?;
    Ok(spec.omega() * sums.s1 / sums.s0)
}

/// v(J) = sum e_n^2 t_n / sum t_n - J^2, using <H>/omega = J to avoid
/// squaring a nearly-cancelling mean.
pub fn variance_v(spec: &SpectrumSpec, j: f64, policy: &TruncationPolicy) -> Result<f64> {
    let sums = state::power_sums(spec, j, policy, ORDER_TWO, false)?;
    Ok(sums.s2 / sums.s0 - j * j)
}

/// Analytic canonical one-form i<J,gamma| d/dgamma |J,gamma> = S1/S0.
pub fn canonical_one_form(spec: &SpectrumSpec, j: f64, policy: &TruncationPolicy) -> Result<f64> {
    let sums = state::power_sums(spec, j, policy, 1, false)?;
    Ok(sums.s1 / sums.s0)
}

/// The same one-form by central differences of the overlap phase:
/// i<s(gamma)|d/dgamma|s(gamma)> ~ -Im(<s|s_+> - <s|s_->)/(2 delta).
pub fn one_form_finite_difference(
    spec: &Arc<SpectrumSpec>,
    j: f64,
    gamma: f64,
    delta: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidPolicy(
            "finite-difference delta must be positive".into(),
        ));
    }
    let s = state::coefficients(spec, j, gamma, policy)?;
    let sp = state::coefficients(spec, j, gamma + delta, policy)?;
    let sm = state::coefficients(spec, j, gamma - delta, policy)?;
    let op = state::overlap(&s, &sp)?;
    let om = state::overlap(&s, &sm)?;
    Ok(-(op - om).im / (2.0 * delta))
}

/// Everything the scan output needs for one label value.
pub fn observable_report(
    spec: &Arc<SpectrumSpec>,
    j: f64,
    policy: &TruncationPolicy,
) -> Result<ObservableReport> {
    let sums = state::power_sums(spec, j, policy, ORDER_TWO, true)?;
    let omega = spec.omega();
    let mean_h = omega * sums.s1 / sums.s0;
    let mean_h_sq = omega * omega * sums.s2 / sums.s0;
    let v = sums.s2 / sums.s0 - j * j;
    let action_residual = (sums.s1 / sums.s0 - j).abs();

    // finite-difference one-form straight from the level weights:
    // i<d/dgamma> ~ sum p_n sin(e_n d)/d
    let terms = sums.terms.as_ref().expect("terms kept");
    let d = ONE_FORM_FD_DELTA;
    let mut fd = 0.0f64;
    for (n, t) in terms.iter().enumerate() {
        let e_n = spec.level(n)?;
        fd += t * (e_n * d).sin();
    }
    fd /= d * sums.s0;
    let one_form_residual = (fd - j).abs();

    Ok(ObservableReport {
        j,
        mean_h,
        mean_h_sq,
        v,
        action_residual,
        one_form_residual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VarianceBoundReport {
    pub points: usize,
    /// Largest v(J) / (6(1-J)) seen over the grid.
    pub max_ratio: f64,
    pub worst_j: f64,
}

/// Checks 0 < v(J) < 6(1-J) pointwise on a grid of hydrogen-chain labels.
/// The first violation aborts with the offending numbers.
pub fn hydrogen_variance_bound_check(
    grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<VarianceBoundReport> {
    let spec = SpectrumSpec::hydrogen_1d(1.0)?;
    let mut max_ratio = 0.0f64;
    let mut worst_j = f64::NAN;
    for &j in grid {
        if !(j > 0.0 && j < 1.0) {
            return Err(Error::OutOfDomain { j, j_star: 1.0 });
        }
        let v = variance_v(&spec, j, policy)?;
        let bound = 6.0 * (1.0 - j);
        if !(v > 0.0 && v < bound) {
            return Err(Error::BoundViolated { j, v, bound });
        }
        let ratio = v / bound;
        if ratio > max_ratio {
            max_ratio = ratio;
            worst_j = j;
        }
    }
    Ok(VarianceBoundReport {
        points: grid.len(),
        max_ratio,
        worst_j,
    })
}
