//! Empirical checks of convergence domains, truncation-error orders and
//! the behaviour of truncated series around `x = e`.
//!
//! Grid points are independent and evaluated in parallel; results always
//! come back in grid order.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::oracle::{solve_phi, taylor_coeffs_at_e};
use crate::real::{euler_e, pow2, powu, Argument, GUARD_BITS};
use crate::series::{default_tolerance, evaluate, variables_from, Series, SeriesVariables, TruncatedEvaluation};
use crate::stirling::StirlingTables;

/// Consecutive increasing terms required to call a trace diverging.
pub const DEFAULT_DIVERGENCE_WINDOW: usize = 10;

pub const DEFAULT_PRECISION: u32 = 200;

pub const DEFAULT_MAX_TERMS: usize = 64;

/// Stirling tables large enough for `n_terms + 1` terms of `series`.
pub fn tables_for(series: Series, n_terms: usize) -> StirlingTables {
    StirlingTables::new(series.table_index_for(n_terms + 1).max(1))
}

/// `points` values spaced evenly in `ln x` from `lo` to `hi`, endpoints included.
pub fn geometric_grid(lo: &Argument, hi: &Argument, points: usize, precision: u32) -> Result<Vec<Argument>> {
    let work = precision + GUARD_BITS;
    let (a, b) = (lo.ln(work), hi.ln(work));
    match points {
        0 => Ok(Vec::new()),
        1 => Ok(vec![lo.clone()]),
        _ => (0..points)
            .map(|k| {
                if k == 0 {
                    return Ok(lo.clone());
                }
                if k + 1 == points {
                    return Ok(hi.clone());
                }
                let t = Float::with_val(work, k) / (points - 1) as u32;
                let ln_x = Float::with_val(work, &b - &a) * t + &a;
                Argument::from_float(&ln_x.exp())
            })
            .collect(),
    }
}

/// Like [`geometric_grid`] but without the lower endpoint: `points` values in `(lo, hi]`.
pub fn geometric_grid_open_left(lo: &Argument, hi: &Argument, points: usize, precision: u32) -> Result<Vec<Argument>> {
    let mut grid = geometric_grid(lo, hi, points + 1, precision)?;
    if !grid.is_empty() {
        grid.remove(0);
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Stopped after this many terms with the last one below tolerance.
    Converged(usize),
    Stagnant,
    /// Term magnitudes strictly increased over the final window.
    Diverging,
    /// The series is not defined at this point.
    OutOfDomain(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Converged(_) => "converged",
            Verdict::Stagnant => "stagnant",
            Verdict::Diverging => "diverging",
            Verdict::OutOfDomain(_) => "out_of_domain",
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub precision: u32,
    pub max_terms: usize,
    pub tol: Float,
    pub window: usize,
}

impl ScanConfig {
    pub fn new(precision: u32) -> Self {
        ScanConfig {
            precision,
            max_terms: DEFAULT_MAX_TERMS,
            tol: default_tolerance(precision),
            window: DEFAULT_DIVERGENCE_WINDOW,
        }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn with_tol(mut self, tol: Float) -> Self {
        self.tol = tol;
        self
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self::new(DEFAULT_PRECISION)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    pub x: Argument,
    pub alpha: Rational,
    pub series: Series,
    pub verdict: Verdict,
    /// `|term_n|` for `n = 1..`, as far as the evaluation went.
    pub last_term_trace: Vec<Float>,
    pub value: Option<Float>,
    pub reference: Option<Float>,
    pub terms: usize,
}

/// Strictly increasing over the last `window` entries.
pub fn is_diverging(trace: &[Float], window: usize) -> bool {
    window >= 2 && trace.len() >= window && trace[trace.len() - window..].windows(2).all(|w| w[1] > w[0])
}

fn classify(eval: &TruncatedEvaluation, window: usize) -> Verdict {
    if eval.converged {
        Verdict::Converged(eval.terms_used)
    } else if is_diverging(&eval.term_magnitudes, window) {
        Verdict::Diverging
    } else {
        Verdict::Stagnant
    }
}

/// What `series` approximates at `vars`, by root-finding at `precision` bits.
/// For [`Series::LagrangeW`] this is `w = (Phi - L1 + alpha L2) / alpha`.
pub fn reference_value(series: Series, vars: &SeriesVariables, precision: u32) -> Result<Float> {
    let phi = solve_phi(&vars.x, &vars.alpha, precision)?.root;
    if series != Series::LagrangeW {
        return Ok(phi);
    }
    let v = vars.at_precision(precision);
    let a = Float::with_val(precision, &v.alpha);
    let base = Float::with_val(precision, &v.l1 - Float::with_val(precision, &a * &v.l2));
    Ok(Float::with_val(precision, (phi - base) / a))
}

fn scan_point(
    series: Series,
    alpha: &Rational,
    x: &Argument,
    config: &ScanConfig,
    tables: &StirlingTables,
) -> ConvergenceVerdict {
    let out_of_domain = |reason: String| ConvergenceVerdict {
        x: x.clone(),
        alpha: alpha.clone(),
        series,
        verdict: Verdict::OutOfDomain(reason),
        last_term_trace: Vec::new(),
        value: None,
        reference: None,
        terms: 0,
    };
    let vars = match variables_from(x, alpha, config.precision) {
        Ok(v) => v,
        Err(e) => return out_of_domain(e.to_string()),
    };
    let eval = match evaluate(series, &vars, config.max_terms, &config.tol, tables) {
        Ok(r) => r,
        Err(e) => return out_of_domain(e.to_string()),
    };
    let reference = reference_value(series, &vars, config.precision + GUARD_BITS).ok();
    ConvergenceVerdict {
        x: x.clone(),
        alpha: alpha.clone(),
        series,
        verdict: classify(&eval, config.window),
        last_term_trace: eval.term_magnitudes,
        value: Some(eval.value),
        reference,
        terms: eval.terms_used,
    }
}

/// Classifies each grid point by the term trace of its partial sums.
pub fn convergence_scan(
    series: Series,
    alpha: &Rational,
    x_grid: &[Argument],
    config: &ScanConfig,
) -> Vec<ConvergenceVerdict> {
    let tables = tables_for(series, config.max_terms);
    x_grid
        .par_iter()
        .map(|x| scan_point(series, alpha, x, config, &tables))
        .collect()
}

/// Scan strictly inside `(1, e)`, below the proved convergence domains.
/// Purely informational.
pub fn conjecture_probe(
    series: Series,
    x_grid: &[Argument],
    max_terms: usize,
    precision: u32,
) -> Result<Vec<ConvergenceVerdict>> {
    if !matches!(series, Series::Comtet | Series::LogTauZeta) {
        return Err(Error::UnsupportedParameter(format!(
            "the probe covers series 2a and 4c, not {series}"
        )));
    }
    for x in x_grid {
        let l = x.ln(precision);
        if l <= 0 || l >= 1 {
            return Err(Error::Domain(format!("probe point {x} is not inside (1, e)")));
        }
    }
    let config = ScanConfig::new(precision).with_max_terms(max_terms);
    Ok(convergence_scan(series, &Rational::from(1), x_grid, &config))
}

/// `count` points spread evenly in `ln x` strictly inside `(1, e)`.
pub fn probe_grid(count: usize, precision: u32) -> Result<Vec<Argument>> {
    (1..=count)
        .map(|k| Argument::e_pow(Rational::from((k as i64, count as i64 + 1))))
        .map(|a| {
            // e^(k/(count+1)) has ln strictly in (0, 1); store it as a rational point
            Argument::from_float(&a.value(precision + GUARD_BITS))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurveRow {
    pub x: Argument,
    pub alpha: Rational,
    pub series: Series,
    pub terms: usize,
    pub approx: Option<Float>,
    pub reference: Option<Float>,
    pub abs_err: Option<Float>,
    pub rel_err: Option<Float>,
    /// Why the row has no approximation.
    pub note: Option<String>,
}

/// `N`-term truncation against the reference solver at each grid point.
pub fn error_curve(
    series: Series,
    n_terms: usize,
    alpha: &Rational,
    x_grid: &[Argument],
    precision: u32,
) -> Vec<ErrorCurveRow> {
    let tables = tables_for(series, n_terms);
    let no_stop = Float::new(precision);
    x_grid
        .par_iter()
        .map(|x| {
            let mut row = ErrorCurveRow {
                x: x.clone(),
                alpha: alpha.clone(),
                series,
                terms: n_terms,
                approx: None,
                reference: None,
                abs_err: None,
                rel_err: None,
                note: None,
            };
            let vars = match variables_from(x, alpha, precision) {
                Ok(v) => v,
                Err(e) => {
                    row.note = Some(e.to_string());
                    return row;
                }
            };
            match reference_value(series, &vars, precision + GUARD_BITS) {
                Ok(r) => row.reference = Some(r),
                Err(e) => row.note = Some(e.to_string()),
            }
            match evaluate(series, &vars, n_terms, &no_stop, &tables) {
                Ok(eval) => row.approx = Some(eval.value),
                Err(e) => row.note = Some(e.to_string()),
            }
            if let (Some(a), Some(r)) = (&row.approx, &row.reference) {
                let abs = Float::with_val(precision + GUARD_BITS, a - r).abs();
                let rel = if r.is_zero() {
                    Float::with_val(precision, &abs)
                } else {
                    Float::with_val(precision, &abs / Float::with_val(precision + GUARD_BITS, r.abs_ref()))
                };
                row.abs_err = Some(Float::with_val(precision, &abs));
                row.rel_err = Some(rel);
            }
            row
        })
        .collect()
}

/// Natural log of the quantity whose `N`-th power the truncation error of
/// `series` is expected to follow.
///
/// `L2/L1` for the expansions in `alpha/L1` or `tau`; `L2/L1^2` for the
/// associated-number expansion in `eta L_tau`; `1/L1` for the `eta`
/// expansion, whose leading omitted term is `eta^(N+1) L_tau`.
pub fn log_grading(series: Series, vars: &SeriesVariables) -> f64 {
    let l1 = vars.l1.to_f64().ln();
    let l2 = vars.l2.to_f64().ln();
    match series {
        Series::Comtet | Series::Zeta | Series::LagrangeW => l2 - l1,
        Series::LogTauZeta => l2 - 2.0 * l1,
        Series::LogTau => -l1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub series: Series,
    /// Fitted slope of `ln |err|` against `N ln(grading)`.
    pub slope: f64,
    pub intercept: f64,
    pub log_grading: f64,
    /// `(N, |err|)` for every `N` requested.
    pub points: Vec<(usize, Float)>,
    /// Some errors were below the precision floor and were left out.
    pub precision_limited: bool,
}

/// Least-squares slope and intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Regresses `ln |err_N|` on `N ln(grading)` at a single large `x` (`alpha = 1`).
pub fn order_fit(series: Series, n_range: &[usize], x_big: &Argument, precision: u32) -> Result<OrderFit> {
    let mut distinct = n_range.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "order fit needs at least 3 distinct truncation orders, got {}",
            distinct.len()
        )));
    }
    let alpha = Rational::from(1);
    let vars = variables_from(x_big, &alpha, precision)?;
    let reference = reference_value(series, &vars, precision + GUARD_BITS)?;
    let floor = Float::with_val(precision, reference.abs_ref()) * pow2(precision, -(precision as i32 - 16));
    let n_max = *distinct.last().expect("non-empty");
    let tables = tables_for(series, n_max);
    let grading = log_grading(series, &vars);

    let mut points = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut precision_limited = false;
    for &n in &distinct {
        let eval = evaluate(series, &vars, n, &Float::new(precision), &tables)?;
        let err = Float::with_val(
            precision,
            Float::with_val(precision + GUARD_BITS, &eval.value - &reference).abs_ref(),
        );
        if err <= floor {
            precision_limited = true;
        } else {
            xs.push(n as f64 * grading);
            ys.push(Float::with_val(precision, err.ln_ref()).to_f64());
        }
        points.push((n, err));
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} errors above the precision floor of 2^-{}",
            xs.len(),
            precision - 16
        )));
    }
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(OrderFit {
        series,
        slope,
        intercept,
        log_grading: grading,
        points,
        precision_limited,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorDeviation {
    pub order: usize,
    /// Finite-difference estimate of the `order`-th Taylor coefficient.
    pub numeric: Float,
    pub reference: Float,
    pub deviation: Float,
    pub relative: Float,
}

/// Largest truncation order accepted by [`taylor_match_check`].
pub const TAYLOR_MAX_TERMS: usize = 8;

/// Finite-difference Taylor coefficients of the `N`-term truncation at `x = e`,
/// compared with the reference coefficients for orders `0..min(N, 6)`.
///
/// Central differences use steps `h = 2^-(precision/4)` and `h/2`, combined
/// by one Richardson step. The truncation is evaluated at `2 precision + 64`
/// bits so that differencing up to fifth order stays above roundoff.
pub fn taylor_match_check(series: Series, n_terms: usize, precision: u32) -> Result<Vec<TaylorDeviation>> {
    if series == Series::LagrangeW {
        return Err(Error::UnsupportedParameter(
            "series 2d is the correction w, not W".into(),
        ));
    }
    if n_terms > TAYLOR_MAX_TERMS {
        return Err(Error::UnsupportedParameter(format!(
            "taylor match is defined for N <= {TAYLOR_MAX_TERMS}, got {n_terms}"
        )));
    }
    let count = n_terms.min(6);
    if count == 0 {
        return Ok(Vec::new());
    }
    let eval_prec = 2 * precision + 64;
    let h_exp = -((precision / 4) as i32);
    let quarter = pow2(eval_prec, h_exp - 2);
    let e = euler_e(eval_prec);
    let tables = tables_for(series, n_terms);
    let alpha = Rational::from(1);
    let no_stop = Float::new(eval_prec);

    // F at e + k h/4
    let max_k = 2 * (count as i64 - 1);
    let offsets: Vec<i64> = (-max_k..=max_k).collect();
    let values: Vec<(i64, Float)> = offsets
        .par_iter()
        .map(|&k| -> Result<(i64, Float)> {
            let x = if k == 0 {
                Argument::e()
            } else {
                Argument::from_float(&(Float::with_val(eval_prec, &quarter * k) + &e))?
            };
            let vars = variables_from(&x, &alpha, eval_prec)?;
            Ok((k, evaluate(series, &vars, n_terms, &no_stop, &tables)?.value))
        })
        .collect::<Result<_>>()?;
    let f: BTreeMap<i64, Float> = values.into_iter().collect();

    // j-th central difference with step s = unit h/4: offsets (j - 2i) unit / 2
    let difference = |j: usize, unit: i64| -> Float {
        let mut acc = Float::new(eval_prec);
        for i in 0..=j {
            let k = (j as i64 - 2 * i as i64) * unit / 2;
            let c = Float::with_val(eval_prec, Integer::from(j).binomial(i as u32));
            let term = c * &f[&k];
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let step = Float::with_val(eval_prec, &quarter * unit);
        acc / powu(&step, j as u32)
    };

    let reference = taylor_coeffs_at_e(count, precision);
    let mut out = Vec::with_capacity(count);
    for (j, want) in reference.into_iter().enumerate() {
        let derivative = if j == 0 {
            f[&0].clone()
        } else {
            let coarse = difference(j, 4);
            let fine = difference(j, 2);
            (fine * 4u32 - coarse) / 3u32
        };
        let fact = Float::with_val(eval_prec, Integer::from(Integer::factorial(j as u32)));
        let numeric = Float::with_val(precision, derivative / fact);
        let deviation = Float::with_val(precision, Float::with_val(eval_prec, &numeric - &want).abs_ref());
        let relative = Float::with_val(precision, &deviation / Float::with_val(precision, want.abs_ref()));
        out.push(TaylorDeviation {
            order: j,
            numeric,
            reference: want,
            deviation,
            relative,
        });
    }
    Ok(out)
}
