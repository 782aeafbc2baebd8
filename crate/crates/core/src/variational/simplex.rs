//! Downhill simplex (Nelder-Mead) minimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Per-coordinate offset applied to the best point before each restart.
pub const RESTART_PERTURBATION: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub init: Vec<f64>,
    pub simplex_scale: f64,
    pub tol_f: f64,
    pub tol_x: f64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl OptimizerConfig {
    pub fn new(init: Vec<f64>) -> Self {
        Self { init, simplex_scale: 0.1, tol_f: 1e-12, tol_x: 1e-10, max_iter: 4000, restarts: 3 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.init.is_empty() {
            return Err(Error::Precondition("optimizer needs at least one parameter".into()));
        }
        if !(self.tol_f > 0.0 && self.tol_x > 0.0 && self.simplex_scale > 0.0) {
            return Err(Error::Precondition("optimizer tolerances and scale must be positive".into()));
        }
        if self.init.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("optimizer initial point"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// False when some run hit `max_iter` before meeting both tolerances.
    pub converged: bool,
}

/// One row of an optimizer trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub params: Vec<f64>,
    pub value: f64,
}

/// Best of an initial run and `cfg.restarts` restarts from the best point
/// shifted by [`RESTART_PERTURBATION`] in every coordinate.
pub fn nelder_mead<F>(objective: F, cfg: &OptimizerConfig) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    nelder_mead_traced(objective, cfg, None)
}

pub fn nelder_mead_traced<F>(
    mut objective: F,
    cfg: &OptimizerConfig,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    if !objective(&cfg.init).is_finite() {
        return Err(Error::NonFinite("objective at the initial point"));
    }
    let mut best = run(&mut objective, &cfg.init, cfg, &mut trace);
    let mut iterations = best.iterations;
    let mut converged = best.converged;
    for _ in 0..cfg.restarts {
        let start: Vec<f64> = best.params.iter().map(|x| x + RESTART_PERTURBATION).collect();
        let next = run(&mut objective, &start, cfg, &mut trace);
        iterations += next.iterations;
        converged &= next.converged;
        if next.value < best.value {
            best = next;
        }
    }
    Ok(Minimum { iterations, converged, ..best })
}

fn run<F>(f: &mut F, start: &[f64], cfg: &OptimizerConfig, trace: &mut Option<&mut Vec<TraceRow>>) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let d = start.len();
    let eval = |f: &mut F, x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += cfg.simplex_scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(f, p)).collect();

    let mut iter = 0;
    let mut converged = false;
    while iter < cfg.max_iter {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRow { iter, params: pts[0].clone(), value: vals[0] });
        }

        let spread_f = (vals[d] - vals[0]).abs();
        let spread_x = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread_f <= cfg.tol_f && spread_x <= cfg.tol_x {
            converged = true;
            break;
        }
        iter += 1;

        let centroid: Vec<f64> =
            (0..d).map(|j| pts[..d].iter().map(|p| p[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&pts[d]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(REFLECT);
        let fr = eval(f, &xr);
        if fr < vals[0] {
            let xe = along(REFLECT * EXPAND);
            let fe = eval(f, &xe);
            if fe < fr {
                pts[d] = xe;
                vals[d] = fe;
            } else {
                pts[d] = xr;
                vals[d] = fr;
            }
            continue;
        }
        if fr < vals[d - 1] {
            pts[d] = xr;
            vals[d] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[d] {
            let xc = along(REFLECT * CONTRACT);
            let fc = eval(f, &xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = eval(f, &xc);
            (xc, fc)
        };
        if fc < vals[d].min(fr) {
            pts[d] = xc;
            vals[d] = fc;
            continue;
        }
        for i in 1..=d {
            let shrunk: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(x, b)| b + SHRINK * (x - b)).collect();
            vals[i] = eval(f, &shrunk);
            pts[i] = shrunk;
        }
    }
    let best = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Minimum { params: pts[best].clone(), value: vals[best], iterations: iter, converged }
}
