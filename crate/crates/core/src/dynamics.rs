//! Time evolution of label states.
//!
//! The point of the construction is that e^{-iHt}|J, gamma> = |J, gamma + wt>,
//! so evolving the coefficients directly and rebuilding at the shifted label
//! must produce the same state to roundoff. Both routes are kept so the
//! verification can compare them.

use crate::error::{Error, Result};
use crate::phase::unit_phase;
use crate::spectrum::SpectrumSpec;
use crate::state::{coefficients, CoherentState, TruncationPolicy};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct TimeGrid {
    values: Vec<f64>,
}

impl TimeGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidTimeGrid);
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTimeGrid);
        }
        Ok(Self { values })
    }

    pub fn linspace(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if steps < 2 || !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(Error::InvalidTimeGrid);
        }
        let dt = (t1 - t0) / (steps - 1) as f64;
        let values = (0..steps).map(|i| t0 + i as f64 * dt).collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// e^{-iHt} applied to the coefficients: c_n -> c_n e^{-i e_n omega t}.
pub fn evolve_direct(state: &CoherentState, t: f64) -> CoherentState {
    let spec = state.spec();
    let wt = spec.omega() * t;
    let evolved: Vec<_> = state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let e_n = spec.level(n).expect("state index within spectrum range");
            c * unit_phase(e_n * wt)
        })
        .collect();
    CoherentState::with_replaced(state, evolved, state.gamma() + wt)
}

/// The same evolution through the label: rebuild at gamma + omega t.
pub fn evolve_label(state: &CoherentState, t: f64) -> Result<CoherentState> {
    let policy = state.policy();
    coefficients(
        state.spec(),
        state.j(),
        state.gamma() + state.spec().omega() * t,
        &policy,
    )
}

/// Survival probability P(t) = |<J,gamma| e^{-iHt} |J,gamma>|^2 on a grid.
/// gamma drops out of P, so the state is built once at gamma = 0.
pub fn autocorrelation(
    spec: &Arc<SpectrumSpec>,
    j: f64,
    grid: &TimeGrid,
    policy: &TruncationPolicy,
) -> Result<Vec<(f64, f64)>> {
    let state = coefficients(spec, j, 0.0, policy)?;
    let probs = state.probabilities();
    let omega = spec.omega();
    let mut out = Vec::with_capacity(grid.values().len());
    for &t in grid.values() {
        let mut acc_re = 0.0f64;
        let mut acc_im = 0.0f64;
        for (n, p) in probs.iter().enumerate() {
            let e_n = spec.level(n)?;
            let z = unit_phase(e_n * omega * t);
            acc_re += p * z.re;
            acc_im += p * z.im;
        }
        out.push((t, acc_re * acc_re + acc_im * acc_im));
    }
    Ok(out)
}
