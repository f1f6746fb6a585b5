use std::path::Path;
use std::sync::Arc;

use cohstate_core::{autocorrelation, coefficients, observable_report, MomentSequence, TimeGrid};

use crate::config::Resolved;
use crate::output::{num, Report};
use crate::Failure;

fn emit(report: Report, out: Option<&Path>) -> Result<i32, Failure> {
    report
        .finish(out)
        .map_err(|e| Failure::Run(format!("cannot write output: {e}")))?;
    Ok(0)
}

pub fn table(res: &Resolved, n_max: usize, out: Option<&Path>) -> Result<i32, Failure> {
    let spec = Arc::new(res.spec.clone());
    let n_eff = match spec.max_index() {
        Some(last) => n_max.min(last),
        None => n_max,
    };
    let moments = MomentSequence::build(spec.clone(), n_eff).map_err(Failure::run)?;

    let mut rep = Report::new();
    rep.preamble("table", &spec, &res.policy, None);
    rep.meta(format!("n_max: {n_eff}"));
    rep.line("n,e_n,rho_n,log_rho_n");
    for n in 0..=n_eff {
        let e = spec.level(n).map_err(Failure::run)?;
        let lr = moments.log_rho(n).map_err(Failure::run)?;
        rep.line(format!("{n},{},{},{}", num(e), num(lr.exp()), num(lr)));
    }
    emit(rep, out)
}

pub fn state(res: &Resolved, j: f64, gamma: f64, out: Option<&Path>) -> Result<i32, Failure> {
    let spec = Arc::new(res.spec.clone());
    let st = coefficients(&spec, j, gamma, &res.policy).map_err(Failure::run)?;

    let mut rep = Report::new();
    rep.preamble("state", &spec, &res.policy, None);
    rep.meta(format!("J: {} gamma: {}", num(j), num(gamma)));
    rep.meta(format!(
        "n_terms: {} tail_bound: {}",
        st.coeffs().len(),
        num(st.tail_bound())
    ));
    rep.line("n,re_c_n,im_c_n,abs2_c_n");
    for (n, c) in st.coeffs().iter().enumerate() {
        rep.line(format!(
            "{n},{},{},{}",
            num(c.re),
            num(c.im),
            num(c.norm_sqr())
        ));
    }
    emit(rep, out)
}

pub fn scan(
    res: &Resolved,
    j_min: f64,
    j_max: f64,
    points: usize,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    if points == 0 || !(j_min.is_finite() && j_max.is_finite()) || j_min > j_max {
        return Err(Failure::Config(
            "scan needs finite --J-min <= --J-max and --points >= 1".into(),
        ));
    }
    let spec = Arc::new(res.spec.clone());
    let is_hydrogen = matches!(spec.kind(), cohstate_core::SpectrumKind::Hydrogen1D);

    let mut rep = Report::new();
    rep.preamble("scan", &spec, &res.policy, None);
    rep.meta(format!(
        "J_min: {} J_max: {} points: {points}",
        num(j_min),
        num(j_max)
    ));
    rep.line("J,mean_H,v,action_residual,one_form_residual,bound_margin");
    for k in 0..points {
        let j = if points == 1 {
            j_min
        } else {
            j_min + (j_max - j_min) * k as f64 / (points - 1) as f64
        };
        let obs = observable_report(&spec, j, &res.policy).map_err(Failure::run)?;
        let margin = if is_hydrogen {
            6.0 * (1.0 - j) - obs.v
        } else {
            f64::NAN
        };
        rep.line(format!(
            "{},{},{},{},{},{}",
            num(j),
            num(obs.mean_h),
            num(obs.v),
            num(obs.action_residual),
            num(obs.one_form_residual),
            num(margin)
        ));
    }
    emit(rep, out)
}

pub fn autocorr(
    res: &Resolved,
    j: f64,
    t_max: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<i32, Failure> {
    let grid = TimeGrid::linspace(0.0, t_max, steps).map_err(|e| Failure::Config(e.to_string()))?;
    let spec = Arc::new(res.spec.clone());
    let series = autocorrelation(&spec, j, &grid, &res.policy).map_err(Failure::run)?;

    let mut rep = Report::new();
    rep.preamble("autocorr", &spec, &res.policy, None);
    rep.meta(format!(
        "J: {} t_max: {} steps: {steps}",
        num(j),
        num(t_max)
    ));
    rep.line("t,P");
    for (t, p) in series {
        rep.line(format!("{},{}", num(t), num(p)));
    }
    emit(rep, out)
}
