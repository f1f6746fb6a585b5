//! Label states |J, gamma> and the power sums behind them.
//!
//! Everything reduces to partial sums of t_n = J^n / rho_n, optionally
//! weighted by e_n or e_n^2. Truncation is certified, not guessed: with
//! q = J/e_{N+1} < 1 the terms beyond N are dominated by a geometric series,
//! and the weighted tails follow from e_k t_k = J t_{k-1}.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{self, MomentSequence};
use crate::phase::unit_phase;
use crate::spectrum::{SpectrumKind, SpectrumSpec};

#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    pub rel_tol: f64,
    pub n_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            n_cap: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidPolicy(
                "rel_tol must be finite and positive".into(),
            ));
        }
        if self.n_cap == 0 {
            return Err(Error::InvalidPolicy("n_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// A certified partial sum: value, number of terms used, and a rigorous
/// bound on the neglected relative tail (zero when a finite table was
/// summed to its end).
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub n_terms: usize,
    pub rel_remainder: f64,
}

pub(crate) const ORDER_ZERO: usize = 0;
pub(crate) const ORDER_TWO: usize = 2;

#[derive(Debug, Clone)]
pub(crate) struct PowerSums {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub last_index: usize,
    pub rel_remainder: f64,
    pub terms: Option<Vec<f64>>,
}

fn domain_check(spec: &SpectrumSpec, j: f64) -> Result<()> {
    if !j.is_finite() || j < 0.0 {
        return Err(Error::OutOfDomain {
            j,
            j_star: j_star_display(spec),
        });
    }
    // a finite table is a finite sum and converges for every J
    if spec.max_index().is_some() {
        return Ok(());
    }
    let j_star = moments::radius_of_convergence(spec)?;
    if j >= j_star {
        return Err(Error::OutOfDomain { j, j_star });
    }
    Ok(())
}

fn j_star_display(spec: &SpectrumSpec) -> f64 {
    if spec.max_index().is_some() {
        f64::INFINITY
    } else {
        moments::radius_of_convergence(spec).unwrap_or(f64::NAN)
    }
}

/// Sums t_n, e_n t_n, e_n^2 t_n with a certified stopping rule.
///
/// `orders` picks how many of the weighted tails take part in the stopping
/// test (0 for normalization only, 2 when second moments are needed).
pub(crate) fn power_sums(
    spec: &SpectrumSpec,
    j: f64,
    policy: &TruncationPolicy,
    orders: usize,
    keep_terms: bool,
) -> Result<PowerSums> {
    policy.validate()?;
    domain_check(spec, j)?;

    let mut terms = if keep_terms { Some(vec![1.0f64]) } else { None };
    if j == 0.0 {
        return Ok(PowerSums {
            s0: 1.0,
            s1: 0.0,
            s2: 0.0,
            last_index: 0,
            rel_remainder: 0.0,
            terms,
        });
    }

    let table_end = spec.max_index();
    let mut t = 1.0f64;
    let mut e_n = 0.0f64;
    let mut s0 = 1.0f64;
    let mut s1 = 0.0f64;
    let mut s2 = 0.0f64;
    let mut n = 0usize;
    let mut best_rel = f64::INFINITY;

    loop {
        let exhausted = matches!(table_end, Some(last) if n + 1 > last);
        if exhausted {
            return Ok(PowerSums {
                s0,
                s1,
                s2,
                last_index: n,
                rel_remainder: 0.0,
                terms,
            });
        }
        let e_next = spec.level(n + 1)?;

        if j < e_next && n >= 1 {
            let q = j / e_next;
            // tail of sum t_k:           <= t_N q/(1-q)
            // tail of sum e_k t_k   = J sum_{m>=N} t_m        <= J (t_N + tail0)
            // tail of sum e_k^2 t_k = J sum_{m>=N} e_{m+1} t_m <= J R (e_N t_N + tail1)
            // with R = e_{N+1}/e_N, valid while successor ratios do not grow
            let tail0 = t * q / (1.0 - q);
            let tail1 = j * (t + tail0);
            let tail2 = j * (e_next / e_n) * (e_n * t + tail1);
            let rel0 = tail0 / s0;
            best_rel = best_rel.min(rel0);
            let ok0 = tail0 <= policy.rel_tol * s0;
            let ok1 = orders < 1 || tail1 <= policy.rel_tol * s1;
            let ok2 = orders < 2 || tail2 <= policy.rel_tol * s2;
            if ok0 && ok1 && ok2 {
                let mut rel = rel0;
                if orders >= 1 {
                    rel = rel.max(tail1 / s1);
                }
                if orders >= 2 {
                    rel = rel.max(tail2 / s2);
                }
                return Ok(PowerSums {
                    s0,
                    s1,
                    s2,
                    last_index: n,
                    rel_remainder: rel,
                    terms,
                });
            }
        }

        if n + 1 > policy.n_cap {
            return Err(Error::CapExceeded {
                n_cap: policy.n_cap,
                best: best_rel,
            });
        }
        n += 1;
        e_n = e_next;
        t *= j / e_n;
        s0 += t;
        s1 += e_n * t;
        s2 += e_n * e_n * t;
        if let Some(v) = terms.as_mut() {
            v.push(t);
        }
        if !s2.is_finite() || !t.is_finite() {
            return Err(Error::Overflow { n });
        }
    }
}

/// Squared normalization M(J)^2 = sum J^n / rho_n.
pub fn normalization_sq(
    spec: &SpectrumSpec,
    j: f64,
    policy: &TruncationPolicy,
) -> Result<SeriesValue> {
    let sums = power_sums(spec, j, policy, ORDER_ZERO, false)?;
    Ok(SeriesValue {
        value: sums.s0,
        n_terms: sums.last_index + 1,
        rel_remainder: sums.rel_remainder,
    })
}

/// M(J)^2 for the hydrogen chain in closed form,
/// 2 [ 1/(J(1-J)) + ln(1-J)/J^2 ] on 0 < J < 1, with a series branch below
/// J = 1e-3 where the two closed-form pieces cancel to ~1e-13 each other.
pub fn hydrogen_normalization_closed(j: f64) -> Result<f64> {
    if !(j > 0.0 && j < 1.0) || !j.is_finite() {
        return Err(Error::OutOfDomain { j, j_star: 1.0 });
    }
    if j < 1e-3 {
        // sum 2(n+1)/(n+2) J^n; eight terms reach 1e-24 here
        let mut total = 0.0f64;
        let mut jp = 1.0f64;
        for n in 0..=8usize {
            total += 2.0 * (n as f64 + 1.0) / (n as f64 + 2.0) * jp;
            jp *= j;
        }
        return Ok(total);
    }
    let log_term = (-j).ln_1p();
    Ok(2.0 * (1.0 / (j * (1.0 - j)) + log_term / (j * j)))
}

/// Coefficient vector of |J, gamma> in the level basis.
#[derive(Debug, Clone)]
pub struct CoherentState {
    spec: Arc<SpectrumSpec>,
    j: f64,
    gamma: f64,
    policy: TruncationPolicy,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl CoherentState {
    pub fn spec(&self) -> &Arc<SpectrumSpec> {
        &self.spec
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn truncation_index(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Bound on the probability mass dropped by truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Same label metadata, new coefficient vector; used by the evolution
    /// routines which rotate phases without touching moduli.
    pub(crate) fn with_replaced(base: &CoherentState, coeffs: Vec<Complex64>, gamma: f64) -> Self {
        Self {
            spec: base.spec.clone(),
            j: base.j,
            gamma,
            policy: base.policy,
            coeffs,
            tail_bound: base.tail_bound,
        }
    }
}

/// Builds |J, gamma>: c_n = M(J)^{-1} J^{n/2} e^{-i e_n gamma} / sqrt(rho_n).
///
/// For the hydrogen chain close to J* = 1 the certified stopping rule may
/// exhaust n_cap; the normalization then falls back to the closed form and
/// the dropped mass is reported through `tail_bound`.
pub fn coefficients(
    spec: &Arc<SpectrumSpec>,
    j: f64,
    gamma: f64,
    policy: &TruncationPolicy,
) -> Result<CoherentState> {
    policy.validate()?;
    domain_check(spec, j)?;
    if j == 0.0 {
        return Ok(CoherentState {
            spec: spec.clone(),
            j,
            gamma,
            policy: *policy,
            coeffs: vec![Complex64::new(1.0, 0.0)],
            tail_bound: 0.0,
        });
    }

    let (m_sq, n_upper, certified_tail) = match power_sums(spec, j, policy, ORDER_ZERO, false) {
        Ok(sums) => (sums.s0, sums.last_index, Some(sums.rel_remainder)),
        Err(Error::CapExceeded { n_cap, .. })
            if matches!(spec.kind(), SpectrumKind::Hydrogen1D) =>
        {
            (hydrogen_normalization_closed(j)?, n_cap, None)
        }
        Err(e) => return Err(e),
    };

    let momseq = MomentSequence::build(spec.clone(), n_upper)?;
    let half_ln_j = 0.5 * j.ln();
    let ln_m = 0.5 * m_sq.ln();
    let mut coeffs = Vec::with_capacity(n_upper + 1);
    let mut prob_sum = 0.0f64;
    for n in 0..=n_upper {
        let amp = (n as f64 * half_ln_j - 0.5 * momseq.log_rho(n)? - ln_m).exp();
        prob_sum += amp * amp;
        let e_n = spec.level(n)?;
        coeffs.push(amp * unit_phase(e_n * gamma));
    }
    let tail_bound = match certified_tail {
        Some(rel) => rel,
        // fallback path: whatever probability the partial sum failed to reach
        None => (1.0 - prob_sum).max(0.0),
    };
    Ok(CoherentState {
        spec: spec.clone(),
        j,
        gamma,
        policy: *policy,
        coeffs,
        tail_bound,
    })
}

/// <a|b> over the common coefficient range; the shorter state's missing
/// coefficients are zero.
pub fn overlap(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    if a.spec.as_ref() != b.spec.as_ref() {
        return Err(Error::SpectrumMismatch);
    }
    let n = a.coeffs.len().min(b.coeffs.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        acc += a.coeffs[k].conj() * b.coeffs[k];
    }
    Ok(acc)
}
