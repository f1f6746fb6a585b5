//! Resolution of unity for the label states.
//!
//! Diagonal: int |c_n|^2 M(J)^2 dmu(J) = rho_n^{-1} int J^n dmu = 1 for every
//! n, checked by scaled quadrature. Off-diagonal entries carry a phase
//! e^{-i(e_n - e_m) gamma} that survives any fixed gamma-average over
//! [-Gamma, Gamma] only at order 1/Gamma; the Bohr-style window mean is
//! computed by quadrature and its decay fitted against the window size.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{scaled_moment, Measure, MomentSequence};
use crate::quad::{self, QuadraturePolicy};
use crate::spectrum::SpectrumSpec;
use crate::state::{coefficients, TruncationPolicy};

/// Acceptance band around the ideal 1/Gamma decay exponent of -1.
pub const SLOPE_BAND: f64 = 0.05;

/// Levels closer than this (relative) count as degenerate for the pair mean.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Off-diagonal pairs sampled by `resolution_check`, lowest levels first so
/// the smallest level splitting in the set stays O(1) * e_1.
pub const DEFAULT_PAIRS: [(usize, usize); 5] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)];

#[derive(Debug, Clone, Copy)]
pub struct OffdiagSample {
    pub n: usize,
    pub m: usize,
    /// Actual window used; nominal windows are nudged onto an envelope crest.
    pub gamma_window: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PairSlope {
    pub n: usize,
    pub m: usize,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct UnityReport {
    pub n_max: usize,
    pub gamma_window: f64,
    pub diag_errors: Vec<f64>,
    pub max_diag_error: f64,
    pub diag_tolerance: f64,
    pub offdiag_samples: Vec<OffdiagSample>,
    pub pair_slopes: Vec<PairSlope>,
    /// Fitted C in "off-diagonal magnitude <= C / Gamma".
    pub envelope_coefficient: Option<f64>,
    /// Mean fitted decay exponent across pairs.
    pub decay_slope: Option<f64>,
    pub pass: bool,
}

fn diag_tolerance(policy: &QuadraturePolicy) -> f64 {
    policy.rel_tol.max(policy.abs_tol)
}

/// Checks the diagonal entries 0..=n_max of the reconstructed identity.
pub fn verify_diagonal(
    spec: &Arc<SpectrumSpec>,
    mu: &Measure,
    n_max: usize,
    policy: &QuadraturePolicy,
) -> Result<UnityReport> {
    let moments = MomentSequence::build(spec.clone(), n_max)?;
    let mut diag_errors = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let scaled = scaled_moment(mu, n as f64, moments.log_rho(n)?, policy)?;
        diag_errors.push((scaled - 1.0).abs());
    }
    let max_diag_error = diag_errors.iter().cloned().fold(0.0f64, f64::max);
    let tol = diag_tolerance(policy);
    Ok(UnityReport {
        n_max,
        gamma_window: 0.0,
        max_diag_error,
        diag_tolerance: tol,
        diag_errors,
        offdiag_samples: vec![],
        pair_slopes: vec![],
        envelope_coefficient: None,
        decay_slope: None,
        pass: max_diag_error <= tol,
    })
}

/// Window mean (1/2 Gamma) int_{-Gamma}^{Gamma} e^{-i delta g} dg by composite
/// quadrature with panels no wider than a half period.
fn window_mean_phase(
    delta: f64,
    gamma_window: f64,
    policy: &QuadraturePolicy,
) -> Result<Complex64> {
    let half_periods =
        (2.0 * gamma_window * delta.abs() / std::f64::consts::PI).ceil() as usize + 1;
    if half_periods > 200_000 {
        return Err(Error::QuadratureNotConverged {
            error: f64::INFINITY,
            tol: policy.abs_tol,
            panels: half_periods,
        });
    }
    let seeds: Vec<f64> = (1..half_periods)
        .map(|k| -gamma_window + 2.0 * gamma_window * k as f64 / half_periods as f64)
        .collect();
    // the two components integrate to ~2/delta and ~0; an absolute tolerance
    // at the roundoff floor of the total |integrand| mass keeps the zero
    // component from demanding endless refinement
    let osc = QuadraturePolicy {
        abs_tol: policy.abs_tol.max(256.0 * f64::EPSILON * gamma_window),
        rel_tol: policy.rel_tol,
        max_panels: half_periods + 4096,
    };
    let re = quad::integrate(
        |g| (delta * g).cos(),
        -gamma_window,
        gamma_window,
        &seeds,
        &osc,
    )?;
    let im = quad::integrate(
        |g| -(delta * g).sin(),
        -gamma_window,
        gamma_window,
        &seeds,
        &osc,
    )?;
    Ok(Complex64::new(re.value, im.value) / (2.0 * gamma_window))
}

fn split_levels(spec: &SpectrumSpec, n: usize, m: usize) -> Result<f64> {
    let e_n = spec.level(n)?;
    let e_m = spec.level(m)?;
    let gap = (e_n - e_m).abs();
    if gap <= DEGENERACY_TOL * e_n.abs().max(e_m.abs()).max(1.0) {
        return Err(Error::DegeneratePair { n, m, gap });
    }
    Ok(e_n - e_m)
}

/// Bohr window mean of the (n, m) cross term of |J,gamma><J,gamma| at fixed J.
pub fn bohr_offdiagonal(
    spec: &Arc<SpectrumSpec>,
    n: usize,
    m: usize,
    j: f64,
    gamma_window: f64,
    policy: &TruncationPolicy,
    quad_policy: &QuadraturePolicy,
) -> Result<Complex64> {
    let delta = split_levels(spec, n, m)?;
    let state = coefficients(spec, j, 0.0, policy)?;
    let cn = state.coeffs().get(n).copied().unwrap_or_default();
    let cm = state.coeffs().get(m).copied().unwrap_or_default();
    let prefactor = cn * cm.conj();
    let mean = window_mean_phase(delta, gamma_window, quad_policy)?;
    Ok(prefactor * mean)
}

/// Closed form of the same mean: prefactor * sinc((e_n - e_m) Gamma).
pub fn bohr_offdiagonal_closed(
    spec: &Arc<SpectrumSpec>,
    n: usize,
    m: usize,
    j: f64,
    gamma_window: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    let delta = split_levels(spec, n, m)?;
    let state = coefficients(spec, j, 0.0, policy)?;
    let cn = state.coeffs().get(n).copied().unwrap_or_default();
    let cm = state.coeffs().get(m).copied().unwrap_or_default();
    let x = delta * gamma_window;
    let sinc = if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    Ok(cn * cm.conj() * sinc)
}

/// Nearest window >= pi/(2|delta|) where |sin(delta Gamma)| = 1, so the
/// sampled magnitudes sit on the decay envelope instead of wandering across
/// sinc oscillations.
fn crest_window(delta: f64, nominal: f64) -> f64 {
    let d = delta.abs();
    let k = ((d * nominal - std::f64::consts::FRAC_PI_2) / (2.0 * std::f64::consts::PI))
        .round()
        .max(0.0);
    (2.0 * std::f64::consts::PI * k + std::f64::consts::FRAC_PI_2) / d
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Full unity check: diagonal entries to n_max plus the measured 1/Gamma
/// decay of sampled off-diagonal entries over the given nominal windows.
///
/// Off-diagonal entries are integrated against dmu in J (weight
/// G_nm = int J^{(n+m)/2} dmu / sqrt(rho_n rho_m)) and against the window in
/// gamma; the reported magnitude is their product.
pub fn resolution_check(
    spec: &Arc<SpectrumSpec>,
    mu: &Measure,
    n_max: usize,
    gamma_windows: &[f64],
    policy: &QuadraturePolicy,
) -> Result<UnityReport> {
    let mut report = verify_diagonal(spec, mu, n_max, policy)?;
    if gamma_windows.is_empty() {
        return Ok(report);
    }
    if gamma_windows.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidPolicy(
            "gamma windows must be positive".into(),
        ));
    }
    let moments = MomentSequence::build(spec.clone(), n_max)?;

    let mut samples = Vec::new();
    let mut pair_slopes = Vec::new();
    let mut envelope = 0.0f64;
    for &(n, m) in DEFAULT_PAIRS
        .iter()
        .filter(|(n, m)| *n <= n_max && *m <= n_max)
    {
        let delta = split_levels(spec, n, m)?;
        let scale = 0.5 * (moments.log_rho(n)? + moments.log_rho(m)?);
        let weight = scaled_moment(mu, 0.5 * (n + m) as f64, scale, policy)?;
        let mut pts = Vec::with_capacity(gamma_windows.len());
        for &nominal in gamma_windows {
            let window = crest_window(delta, nominal);
            let mean = window_mean_phase(delta, window, policy)?;
            let magnitude = weight * mean.norm();
            samples.push(OffdiagSample {
                n,
                m,
                gamma_window: window,
                magnitude,
            });
            envelope = envelope.max(magnitude * window);
            pts.push((window.ln(), magnitude.ln()));
        }
        if pts.len() >= 2 {
            pair_slopes.push(PairSlope {
                n,
                m,
                slope: fit_slope(&pts),
            });
        }
    }

    let slopes_ok = !pair_slopes.is_empty()
        && pair_slopes
            .iter()
            .all(|p| (p.slope + 1.0).abs() <= SLOPE_BAND);
    let decay_slope = if pair_slopes.is_empty() {
        None
    } else {
        Some(pair_slopes.iter().map(|p| p.slope).sum::<f64>() / pair_slopes.len() as f64)
    };

    report.gamma_window = gamma_windows.iter().cloned().fold(0.0f64, f64::max);
    report.offdiag_samples = samples;
    report.pair_slopes = pair_slopes;
    report.envelope_coefficient = Some(envelope);
    report.decay_slope = decay_slope;
    report.pass = report.max_diag_error <= report.diag_tolerance && slopes_ok;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::canonical_measure;

    fn harmonic() -> Arc<SpectrumSpec> {
        Arc::new(SpectrumSpec::harmonic(1.0).unwrap())
    }

    fn hydrogen() -> Arc<SpectrumSpec> {
        Arc::new(SpectrumSpec::hydrogen_1d(1.0).unwrap())
    }

    #[test]
    fn diagonal_entries_are_unity_both_spectra() {
        let pol = QuadraturePolicy::default();
        for spec in [harmonic(), hydrogen()] {
            let mu = canonical_measure(&spec).unwrap();
            let r = verify_diagonal(&spec, &mu, 60, &pol).unwrap();
            assert!(r.pass, "max diag error {:e}", r.max_diag_error);
            assert!(r.max_diag_error < 1e-11);
            assert_eq!(r.diag_errors.len(), 61);
        }
    }

    #[test]
    fn bohr_mean_matches_sinc_closed_form() {
        let spec = hydrogen();
        let tp = TruncationPolicy::default();
        let qp = QuadraturePolicy::default();
        for &(n, m) in &[(0usize, 1usize), (1, 3)] {
            for &g in &[10.0, 100.37] {
                let a = bohr_offdiagonal(&spec, n, m, 0.5, g, &tp, &qp).unwrap();
                let b = bohr_offdiagonal_closed(&spec, n, m, 0.5, g, &tp).unwrap();
                assert!(
                    (a - b).norm() < 1e-10,
                    "pair ({n},{m}) window {g}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn bohr_mean_vanishes_at_sinc_zero() {
        // delta * Gamma = pi kills the window mean
        let spec = hydrogen();
        let delta = spec.level(1).unwrap(); // pair (0,1)
        let g = std::f64::consts::PI / delta;
        let v = bohr_offdiagonal(
            &spec,
            0,
            1,
            0.5,
            g,
            &TruncationPolicy::default(),
            &QuadraturePolicy::default(),
        )
        .unwrap();
        assert!(v.norm() < 1e-12, "got {v}");
    }

    #[test]
    fn harmonic_offdiagonals_die_at_window_pi() {
        // integer level gaps: [-pi, pi] already averages every cross term away
        let spec = harmonic();
        let v = bohr_offdiagonal(
            &spec,
            0,
            2,
            1.0,
            std::f64::consts::PI,
            &TruncationPolicy::default(),
            &QuadraturePolicy::default(),
        )
        .unwrap();
        assert!(v.norm() < 1e-13, "got {}", v.norm());
    }

    #[test]
    fn window_doubling_halves_the_envelope() {
        let spec = hydrogen();
        let tp = TruncationPolicy::default();
        let qp = QuadraturePolicy::default();
        let delta = split_levels(&spec, 0, 1).unwrap();
        let g1 = crest_window(delta, 50.0);
        let g2 = crest_window(delta, 2.0 * g1);
        let a = bohr_offdiagonal(&spec, 0, 1, 0.5, g1, &tp, &qp)
            .unwrap()
            .norm();
        let b = bohr_offdiagonal(&spec, 0, 1, 0.5, g2, &tp, &qp)
            .unwrap()
            .norm();
        let ratio = a / b * (g1 / g2);
        assert!((ratio - 1.0).abs() < 1e-8, "ratio {ratio}");
    }

    #[test]
    fn degenerate_pair_is_refused() {
        let spec = Arc::new(SpectrumSpec::custom_table(1.0, vec![0.0, 0.5, 0.5 + 1e-15]).unwrap());
        let r = bohr_offdiagonal(
            &spec,
            1,
            2,
            0.1,
            10.0,
            &TruncationPolicy::default(),
            &QuadraturePolicy::default(),
        );
        assert!(matches!(r, Err(Error::DegeneratePair { n: 1, m: 2, .. })));
    }

    #[test]
    fn same_index_pair_is_degenerate() {
        let r = bohr_offdiagonal(
            &hydrogen(),
            2,
            2,
            0.1,
            10.0,
            &TruncationPolicy::default(),
            &QuadraturePolicy::default(),
        );
        assert!(matches!(r, Err(Error::DegeneratePair { .. })));
    }

    #[test]
    fn resolution_check_fits_inverse_window_decay() {
        let pol = QuadraturePolicy::default();
        for spec in [harmonic(), hydrogen()] {
            let mu = canonical_measure(&spec).unwrap();
            let r = resolution_check(&spec, &mu, 20, &[100.0, 1000.0], &pol).unwrap();
            assert!(r.pass, "report failed: slopes {:?}", r.pair_slopes);
            for p in &r.pair_slopes {
                assert!(
                    (p.slope + 1.0).abs() < SLOPE_BAND,
                    "pair ({},{}): {}",
                    p.n,
                    p.m,
                    p.slope
                );
            }
            let c = r.envelope_coefficient.unwrap();
            assert!(c.is_finite() && c > 0.0 && c < 10.0, "C = {c}");
        }
    }

    #[test]
    fn crest_window_lands_on_unit_sine() {
        for &delta in &[0.75, 2.0, 5.0 / 36.0] {
            for &g in &[100.0, 1e4] {
                let w = crest_window(delta, g);
                assert!(((delta * w).sin().abs() - 1.0).abs() < 1e-9);
                assert!((w - g).abs() / g < 0.25, "window {w} far from nominal {g}");
            }
        }
    }
}
