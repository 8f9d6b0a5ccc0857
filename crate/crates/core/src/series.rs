//! Series expansions of `Phi_alpha(x)` and `W(x)` with exact Stirling coefficients.
//!
//! All five expansions start from `L1 = ln x` and `L2 = ln ln x`:
//!
//! | selector | variables | coefficients | truncated by |
//! |---|---|---|---|
//! | [`Series::Comtet`] | `alpha/L1`, `L2` | cycle numbers | power of `alpha/L1` |
//! | [`Series::LagrangeW`] | `sigma`, `tau` | cycle numbers | total order in `sigma`, `tau` |
//! | [`Series::Zeta`] | `tau`, `zeta = 1/(1+sigma)` | 2-associated numbers | power of `tau` |
//! | [`Series::LogTau`] | `eta`, `L_tau = ln(1 - tau)` | cycle numbers | power of `eta` |
//! | [`Series::LogTauZeta`] | `eta L_tau`, `1/(1+eta)` | 2-associated numbers | power of `eta L_tau` |
//!
//! `LagrangeW` gives the correction `w` alone; the others give the full value.
//! The last three are for `alpha = 1`; other exponents go through
//! [`phi_via_w`].
//!
//! Alternating Stirling coefficients cancel heavily once many terms are
//! taken, so each evaluation first sums absolute values at low precision and
//! raises the working precision by the bits that cancellation will cost.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::oracle;
use crate::real::{pow2, Argument, GUARD_BITS};
use crate::stirling::{StirlingKind, StirlingTables};

/// Precision of the magnitude pass that sizes the working precision.
const PROBE_BITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    /// `L1 - alpha L2 + alpha sum_n (alpha/L1)^n sum_m (-1)^(n+m) [n, n-m+1] L2^m / m!`
    Comtet,
    /// `w = sum_m tau^m/m! sum_l (-1)^l [l+m, l+1] sigma^l`
    LagrangeW,
    /// `L1 - L2 + sum_m tau^m/m! sum_p (-1)^(p+m-1) zeta^(p+m) {p+m-1, p}_2`
    Zeta,
    /// `L1 - L2 - L_tau - sum_n (-eta)^n sum_m (-1)^(m+1) [n, n-m+1] L_tau^m / m!`
    LogTau,
    /// `L1 - L2 - L_tau + sum_m (L_tau eta)^m/m! sum_p (-1)^(p+m-1) {p+m-1, p}_2 (1+eta)^-(p+m)`
    LogTauZeta,
}

impl Series {
    pub const ALL: [Series; 5] = [
        Series::Comtet,
        Series::LagrangeW,
        Series::Zeta,
        Series::LogTau,
        Series::LogTauZeta,
    ];

    /// Short label used on the command line and in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Series::Comtet => "2a",
            Series::LagrangeW => "2d",
            Series::Zeta => "3a",
            Series::LogTau => "4a",
            Series::LogTauZeta => "4c",
        }
    }

    pub fn from_label(s: &str) -> Option<Series> {
        Series::ALL.into_iter().find(|series| series.label() == s)
    }

    pub fn coefficient_kind(self) -> StirlingKind {
        match self {
            Series::Comtet | Series::LagrangeW | Series::LogTau => StirlingKind::Cycle,
            Series::Zeta | Series::LogTauZeta => StirlingKind::Assoc2,
        }
    }

    /// Largest table index touched by term `n`.
    pub fn table_index_for(self, n: usize) -> usize {
        match self.coefficient_kind() {
            StirlingKind::Assoc2 => (2 * n).saturating_sub(2),
            _ => n,
        }
    }

    /// Whether the expansion is only defined for `alpha = 1`.
    pub fn requires_unit_alpha(self) -> bool {
        matches!(self, Series::Zeta | Series::LogTau | Series::LogTauZeta)
    }

    pub fn uses_log_tau(self) -> bool {
        matches!(self, Series::LogTau | Series::LogTauZeta)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Series::from_label(s).ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "expected one of 2a, 2d, 3a, 4a, 4c".into(),
        })
    }
}

/// The expansion variables derived from `(x, alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesVariables {
    pub x: Argument,
    pub alpha: Rational,
    pub precision: u32,
    pub l1: Float,
    pub l2: Float,
    pub sigma: Float,
    pub tau: Float,
    pub zeta: Float,
    /// `ln(1 - tau)`, present only when `tau < 1`.
    pub ltau: Option<Float>,
    /// `sigma / (1 - tau)`, present only when `tau < 1`.
    pub eta: Option<Float>,
}

/// Builds the variable set at `precision` bits. Requires `x > 1`, `alpha > 0`.
pub fn variables_from(x: &Argument, alpha: &Rational, precision: u32) -> Result<SeriesVariables> {
    if *alpha <= 0 {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let p = precision;
    let l1 = x.ln(p);
    if l1 <= 0 {
        return Err(Error::Domain(format!("L1 must be positive (x = {x} <= 1)")));
    }
    let a = Float::with_val(p, alpha);
    let l2 = Float::with_val(p, l1.ln_ref());
    let sigma = Float::with_val(p, &a / &l1);
    let tau = Float::with_val(p, Float::with_val(p, &a * &l2) / &l1);
    let zeta = Float::with_val(p, Float::with_val(p, &sigma + 1u32).recip_ref());
    let (ltau, eta) = if tau < 1 {
        let ltau = Float::with_val(p, (-tau.clone()).ln_1p());
        let one_minus_tau = Float::with_val(p, 1u32 - &tau);
        let eta = Float::with_val(p, &sigma / &one_minus_tau);
        (Some(ltau), Some(eta))
    } else {
        (None, None)
    };
    Ok(SeriesVariables {
        x: x.clone(),
        alpha: alpha.clone(),
        precision,
        l1,
        l2,
        sigma,
        tau,
        zeta,
        ltau,
        eta,
    })
}

impl SeriesVariables {
    /// The same variables recomputed from the exact inputs at another precision.
    pub fn at_precision(&self, precision: u32) -> SeriesVariables {
        variables_from(&self.x, &self.alpha, precision).expect("inputs were already validated")
    }

    pub fn x_value(&self) -> Float {
        self.x.value(self.precision)
    }

    pub fn alpha_value(&self) -> Float {
        Float::with_val(self.precision, &self.alpha)
    }

    pub fn is_unit_alpha(&self) -> bool {
        self.alpha == 1
    }
}

/// An `N`-term partial sum with its convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEvaluation {
    pub value: Float,
    /// The closed-form leading part (`L1 - alpha L2`, ...; zero for `w`).
    pub base: Float,
    /// Sum of the included terms.
    pub correction: Float,
    pub terms_used: usize,
    /// Magnitude of the last included term (zero if none).
    pub last_term: Float,
    /// Magnitude of the first omitted term.
    pub tail_estimate: Float,
    pub converged: bool,
    /// `|term_n|` for every included term, in order.
    pub term_magnitudes: Vec<Float>,
    /// Bits used internally, including guard and cancellation bits.
    pub working_precision: u32,
}

impl TruncatedEvaluation {
    fn scaled(mut self, factor: &Float) -> Self {
        self.value *= factor;
        self.base *= factor;
        self.correction *= factor;
        self.last_term *= factor;
        self.tail_estimate *= factor;
        for t in &mut self.term_magnitudes {
            *t *= factor;
        }
        self
    }
}

/// Inputs of one expansion at a fixed working precision.
struct Kernel {
    series: Series,
    base: Float,
    alpha: Float,
    sigma: Float,
    tau: Float,
    zeta: Float,
    l2: Float,
    ltau: Float,
    eta: Float,
}

impl Kernel {
    fn from_variables(series: Series, v: &SeriesVariables) -> Result<Kernel> {
        let p = v.precision;
        let alpha = v.alpha_value();
        let zero = Float::new(p);
        let (ltau, eta) = match (&v.ltau, &v.eta) {
            (Some(l), Some(e)) => (l.clone(), e.clone()),
            _ if series.uses_log_tau() => {
                return Err(Error::Domain(format!(
                    "tau = {} >= 1, so ln(1 - tau) is not real",
                    v.tau.to_f64()
                )))
            }
            _ => (zero.clone(), zero.clone()),
        };
        let base = match series {
            Series::Comtet => Float::with_val(p, &v.l1 - Float::with_val(p, &alpha * &v.l2)),
            Series::LagrangeW => zero,
            Series::Zeta => Float::with_val(p, &v.l1 - &v.l2),
            Series::LogTau | Series::LogTauZeta => Float::with_val(p, &v.l1 - &v.l2) - &ltau,
        };
        Ok(Kernel {
            series,
            base,
            alpha,
            sigma: v.sigma.clone(),
            tau: v.tau.clone(),
            zeta: v.zeta.clone(),
            l2: v.l2.clone(),
            ltau,
            eta,
        })
    }

    fn from_sigma_tau(sigma: &Float, tau: &Float, p: u32) -> Kernel {
        let zero = Float::new(p);
        Kernel {
            series: Series::LagrangeW,
            base: zero.clone(),
            alpha: Float::with_val(p, 1),
            sigma: Float::with_val(p, sigma),
            tau: Float::with_val(p, tau),
            zeta: zero.clone(),
            l2: zero.clone(),
            ltau: zero.clone(),
            eta: zero,
        }
    }

    fn prec(&self) -> u32 {
        self.base.prec()
    }

    /// Term `n` of the expansion, or the sum of its absolute parts.
    fn term(&self, tables: &StirlingTables, n: usize, absolute: bool) -> Result<Float> {
        let p = self.prec();
        let abs = |x: &Float| {
            if absolute {
                Float::with_val(p, x.abs_ref())
            } else {
                x.clone()
            }
        };
        let signed = |x: Float, negative: bool| if negative && !absolute { -x } else { x };
        match self.series {
            Series::Comtet => {
                // alpha sigma^n sum_{m=1}^n (-1)^(n+m) [n, n-m+1] L2^m / m!
                let l2 = abs(&self.l2);
                let mut inner = Float::new(p);
                let mut power = Float::with_val(p, 1);
                let mut fact = Float::with_val(p, 1);
                for m in 1..=n {
                    power *= &l2;
                    fact *= m as u32;
                    let c = Float::with_val(p, tables.cycle(n, n - m + 1)?.as_integer());
                    let t = Float::with_val(p, &c * &power) / &fact;
                    inner += signed(t, (n + m) % 2 == 1);
                }
                let scale = Float::with_val(p, abs(&self.alpha) * Float::with_val(p, abs(&self.sigma).pow(n as u32)));
                Ok(inner * scale)
            }
            Series::LagrangeW => {
                // sum_{m=1}^n tau^m/m! (-1)^(n-m) [n, n-m+1] sigma^(n-m)
                let tau = abs(&self.tau);
                let sigma = abs(&self.sigma);
                let mut inner = Float::new(p);
                let mut tau_pow = Float::with_val(p, 1);
                let mut fact = Float::with_val(p, 1);
                for m in 1..=n {
                    tau_pow *= &tau;
                    fact *= m as u32;
                    let c = Float::with_val(p, tables.cycle(n, n - m + 1)?.as_integer());
                    let sigma_pow = Float::with_val(p, (&sigma).pow((n - m) as u32));
                    let t = Float::with_val(p, &c * &tau_pow) * sigma_pow / &fact;
                    inner += signed(t, (n - m) % 2 == 1);
                }
                Ok(inner)
            }
            Series::Zeta => {
                // tau^m/m! sum_{p=0}^{m-1} (-1)^(p+m-1) zeta^(p+m) {p+m-1, p}_2
                let m = n;
                let zeta = abs(&self.zeta);
                let mut inner = Float::new(p);
                let mut zeta_pow = Float::with_val(p, (&zeta).pow(m as u32));
                for q in 0..m {
                    let c = Float::with_val(p, tables.assoc2(q + m - 1, q)?.as_integer());
                    inner += signed(Float::with_val(p, &c * &zeta_pow), (q + m - 1) % 2 == 1);
                    zeta_pow *= &zeta;
                }
                let lead = Float::with_val(p, abs(&self.tau).pow(m as u32))
                    / Float::with_val(p, rug::Integer::from(rug::Integer::factorial(m as u32)));
                Ok(inner * lead)
            }
            Series::LogTau => {
                // -(-eta)^n sum_{m=1}^n (-1)^(m+1) [n, n-m+1] L_tau^m / m!
                let ltau = abs(&self.ltau);
                let mut inner = Float::new(p);
                let mut power = Float::with_val(p, 1);
                let mut fact = Float::with_val(p, 1);
                for m in 1..=n {
                    power *= &ltau;
                    fact *= m as u32;
                    let c = Float::with_val(p, tables.cycle(n, n - m + 1)?.as_integer());
                    let t = Float::with_val(p, &c * &power) / &fact;
                    inner += signed(t, m % 2 == 0);
                }
                let eta_pow = Float::with_val(p, abs(&self.eta).pow(n as u32));
                // -(-1)^n
                Ok(signed(inner * eta_pow, n.is_multiple_of(2)))
            }
            Series::LogTauZeta => {
                // (L_tau eta)^m/m! sum_{p=0}^{m-1} (-1)^(p+m-1) {p+m-1, p}_2 (1+eta)^-(p+m)
                let m = n;
                let shrink = Float::with_val(p, Float::with_val(p, &self.eta + 1u32).recip_ref());
                let shrink = abs(&shrink);
                let mut inner = Float::new(p);
                let mut shrink_pow = Float::with_val(p, (&shrink).pow(m as u32));
                for q in 0..m {
                    let c = Float::with_val(p, tables.assoc2(q + m - 1, q)?.as_integer());
                    inner += signed(Float::with_val(p, &c * &shrink_pow), (q + m - 1) % 2 == 1);
                    shrink_pow *= &shrink;
                }
                let product = abs(&Float::with_val(p, &self.ltau * &self.eta));
                let lead = Float::with_val(p, product.pow(m as u32))
                    / Float::with_val(p, rug::Integer::from(rug::Integer::factorial(m as u32)));
                Ok(inner * lead)
            }
        }
    }
}

fn check_capacity(series: Series, tables: &StirlingTables, n: usize) -> Result<()> {
    let needed = series.table_index_for(n);
    if needed > tables.max_n() {
        return Err(Error::Capacity {
            table: series.coefficient_kind().name(),
            requested: needed,
            bound: tables.max_n(),
        });
    }
    Ok(())
}

/// Bits lost to cancellation over terms `1..=n_terms`, from absolute sums.
fn cancellation_bits(probe: &Kernel, tables: &StirlingTables, n_terms: usize) -> Result<u32> {
    let mut reference = probe.base.get_exp().unwrap_or(i32::MIN);
    let mut worst = i32::MIN;
    for n in 1..=n_terms {
        let bound = probe.term(tables, n, true)?;
        if let Some(e) = bound.get_exp() {
            if n == 1 {
                reference = reference.max(e);
            }
            worst = worst.max(e);
        }
    }
    if worst == i32::MIN || reference == i32::MIN {
        return Ok(0);
    }
    Ok(worst.saturating_sub(reference).max(0) as u32)
}

fn run(
    series: Series,
    build: impl Fn(u32) -> Result<Kernel>,
    precision: u32,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    check_capacity(series, tables, n_terms)?;
    let extra = cancellation_bits(&build(PROBE_BITS)?, tables, n_terms)?;
    let work = precision + GUARD_BITS + extra;
    let kernel = build(work)?;

    let mut sum = Float::new(work);
    let mut trace = Vec::with_capacity(n_terms);
    let mut converged = false;
    let mut last = Float::new(work);
    for n in 1..=n_terms {
        let term = kernel.term(tables, n, false)?;
        sum += &term;
        last = Float::with_val(work, term.abs_ref());
        trace.push(Float::with_val(precision, &last));
        if last < *tol {
            converged = true;
            break;
        }
    }
    let used = trace.len();
    let tail = if check_capacity(series, tables, used + 1).is_ok() {
        kernel.term(tables, used + 1, false)?.abs()
    } else {
        last.clone()
    };
    let value = Float::with_val(work, &kernel.base + &sum);
    Ok(TruncatedEvaluation {
        value: Float::with_val(precision, &value),
        base: Float::with_val(precision, &kernel.base),
        correction: Float::with_val(precision, &sum),
        terms_used: used,
        last_term: Float::with_val(precision, &last),
        tail_estimate: Float::with_val(precision, &tail),
        converged,
        term_magnitudes: trace,
        working_precision: work,
    })
}

fn require_unit_alpha(series: Series, vars: &SeriesVariables) -> Result<()> {
    if series.requires_unit_alpha() && !vars.is_unit_alpha() {
        return Err(Error::UnsupportedParameter(format!(
            "series {series} is derived for alpha = 1 only (got alpha = {})",
            vars.alpha
        )));
    }
    Ok(())
}

/// Evaluates the selected expansion with at most `n_terms` terms, stopping
/// early once a term's magnitude drops below `tol`.
///
/// For [`Series::LagrangeW`] the value is the correction `w` alone.
pub fn evaluate(
    series: Series,
    vars: &SeriesVariables,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    require_unit_alpha(series, vars)?;
    // surface tau >= 1 before any table work
    Kernel::from_variables(series, vars)?;
    run(
        series,
        |prec| Kernel::from_variables(series, &vars.at_precision(prec)),
        vars.precision,
        n_terms,
        tol,
        tables,
    )
}

/// Expansion in powers of `alpha / L1`; approximates `Phi_alpha(x)` for any `alpha > 0`.
pub fn eval_comtet(
    vars: &SeriesVariables,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    evaluate(Series::Comtet, vars, n_terms, tol, tables)
}

/// The correction `w(sigma, tau)` solving `1 - e^-w + sigma w - tau = 0`,
/// truncated at total order `n_terms` in `sigma` and `tau`.
pub fn eval_lagrange_w(
    sigma: &Float,
    tau: &Float,
    n_terms: usize,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    let precision = sigma.prec().max(tau.prec());
    run(
        Series::LagrangeW,
        |prec| Ok(Kernel::from_sigma_tau(sigma, tau, prec)),
        precision,
        n_terms,
        &Float::new(precision),
        tables,
    )
}

/// `W(x)` through 2-associated numbers in `tau` and `zeta`.
pub fn eval_zeta(
    vars: &SeriesVariables,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    evaluate(Series::Zeta, vars, n_terms, tol, tables)
}

/// `W(x)` in powers of `eta` with `L_tau = ln(1 - tau)`.
pub fn eval_log_tau(
    vars: &SeriesVariables,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    evaluate(Series::LogTau, vars, n_terms, tol, tables)
}

/// `W(x)` through 2-associated numbers in `eta L_tau` and `1/(1+eta)`.
pub fn eval_log_tau_zeta(
    vars: &SeriesVariables,
    n_terms: usize,
    tol: &Float,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    evaluate(Series::LogTauZeta, vars, n_terms, tol, tables)
}

/// Smallest `W` argument at which [`phi_via_w`] accepts a series.
pub const W_SERIES_MIN_ARGUMENT: u32 = 2;

/// `Phi_alpha(x) = alpha W(x^(1/alpha) / alpha)`, with `W` from
/// [`Series::Zeta`] or [`Series::LogTauZeta`].
pub fn phi_via_w(
    x: &Argument,
    alpha: &Rational,
    n_terms: usize,
    method: Series,
    tol: &Float,
    precision: u32,
    tables: &StirlingTables,
) -> Result<TruncatedEvaluation> {
    if !matches!(method, Series::Zeta | Series::LogTauZeta) {
        return Err(Error::UnsupportedParameter(format!(
            "the reduction to W uses series 3a or 4c, not {method}"
        )));
    }
    let reduced = x.reduce_for_alpha(alpha)?;
    let reduced_value = reduced.value(precision);
    if reduced_value < W_SERIES_MIN_ARGUMENT {
        return Err(Error::Domain(format!(
            "transformed argument x^(1/alpha)/alpha = {} is below {W_SERIES_MIN_ARGUMENT}",
            reduced_value.to_f64()
        )));
    }
    let vars = variables_from(&reduced, &Rational::from(1), precision)?;
    let w = evaluate(method, &vars, n_terms, tol, tables)?;
    Ok(w.scaled(&Float::with_val(precision, alpha)))
}

/// `|w(sigma, tau) - (-ln(1 - tau) + w(sigma/(1-tau), sigma ln(1-tau)/(1-tau)))|`
/// with both `w` values found by root-finding.
pub fn log_shift_residual(sigma: &Float, tau: &Float, precision: u32) -> Result<Float> {
    if *tau >= 1 {
        return Err(Error::Domain(format!("tau = {tau} must be below 1")));
    }
    let work = precision + GUARD_BITS;
    let tau = Float::with_val(work, tau);
    let direct = oracle::solve_shift_equation(sigma, &tau, precision)?;
    let ltau = Float::with_val(work, (-tau.clone()).ln_1p());
    let one_minus = Float::with_val(work, 1u32 - &tau);
    let sigma2 = Float::with_val(work, Float::with_val(work, sigma) / &one_minus);
    let tau2 = Float::with_val(work, &sigma2 * &ltau);
    let shifted = oracle::solve_shift_equation(&sigma2, &tau2, precision)?;
    let rhs = Float::with_val(work, &shifted.root - &ltau);
    Ok(Float::with_val(precision, (direct.root - rhs).abs()))
}

/// Default early-stopping tolerance `2^-(precision - 16)`.
pub fn default_tolerance(precision: u32) -> Float {
    pow2(precision, -(precision as i32 - 16))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arg(s: &str) -> Argument {
        Argument::parse(s).unwrap()
    }

    fn one() -> Rational {
        Rational::from(1)
    }

    #[test]
    fn variables_at_e() {
        let v = variables_from(&Argument::e(), &one(), 200).unwrap();
        assert_eq!(v.l1, 1);
        assert!(v.l2.is_zero());
        assert_eq!(v.sigma, 1);
        assert!(v.tau.is_zero());
        assert_eq!(v.zeta, 0.5);
        assert!(v.ltau.as_ref().unwrap().is_zero());
        assert_eq!(*v.eta.as_ref().unwrap(), 1);
    }

    #[test]
    fn variables_at_e_to_the_e() {
        let v = variables_from(&Argument::e_pow(Rational::new()), &one(), 64);
        assert!(v.is_err(), "x = 1 has L1 = 0");
        let x = Argument::from_float(&crate::real::euler_e(300).exp()).unwrap();
        let v = variables_from(&x, &one(), 200).unwrap();
        let e = crate::real::euler_e(200);
        assert!(Float::with_val(200, &v.l1 - &e).abs() < pow2(200, -190));
        assert!(Float::with_val(200, &v.l2 - 1u32).abs() < pow2(200, -190));
        assert!(Float::with_val(200, &v.tau - Float::with_val(200, e.recip_ref())).abs() < pow2(200, -190));
    }

    #[test]
    fn tau_at_least_one_leaves_log_tau_absent() {
        // alpha = 3, x = 30: tau = 3 ln ln 30 / ln 30 > 1
        let v = variables_from(&arg("30"), &Rational::from(3), 64).unwrap();
        assert!(v.tau >= 1);
        assert!(v.ltau.is_none() && v.eta.is_none());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(variables_from(&arg("0.5"), &one(), 64), Err(Error::Domain(_))));
        assert!(matches!(
            variables_from(&arg("5"), &Rational::from(-1), 64),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unit_alpha_is_enforced() {
        let tables = StirlingTables::new(16);
        let v = variables_from(&arg("2"), &Rational::from(2), 64).unwrap();
        let tol = default_tolerance(64);
        for series in [Series::Zeta, Series::LogTau, Series::LogTauZeta] {
            let err = evaluate(series, &v, 4, &tol, &tables).unwrap_err();
            assert!(matches!(err, Error::UnsupportedParameter(_)), "{series}");
        }
        assert!(eval_comtet(&v, 4, &tol, &tables).is_ok());
    }

    #[test]
    fn first_zeta_term_is_tau_zeta() {
        let tables = StirlingTables::new(8);
        let v = variables_from(&arg("50"), &one(), 128).unwrap();
        let r = eval_zeta(&v, 1, &Float::new(128), &tables).unwrap();
        let want = Float::with_val(128, &v.tau * &v.zeta);
        assert!(Float::with_val(128, &r.correction - &want).abs() < pow2(128, -120));
    }

    #[test]
    fn capacity_is_checked() {
        let tables = StirlingTables::new(10);
        let v = variables_from(&arg("100"), &one(), 64).unwrap();
        let tol = Float::new(64);
        assert!(eval_comtet(&v, 10, &tol, &tables).is_ok());
        assert!(matches!(
            eval_comtet(&v, 11, &tol, &tables),
            Err(Error::Capacity { .. })
        ));
        assert!(eval_zeta(&v, 6, &tol, &tables).is_ok());
        let err = eval_zeta(&v, 7, &tol, &tables).unwrap_err();
        assert_eq!(
            err,
            Error::Capacity {
                table: "assoc2",
                requested: 12,
                bound: 10
            }
        );
    }

    #[test]
    fn zero_terms_is_the_base() {
        let tables = StirlingTables::new(8);
        let v = variables_from(&arg("100"), &one(), 64).unwrap();
        let r = eval_zeta(&v, 0, &Float::new(64), &tables).unwrap();
        assert_eq!(r.terms_used, 0);
        assert!(!r.converged);
        assert_eq!(r.value, r.base);
        assert!(r.tail_estimate > 0);
    }

    #[test]
    fn lagrange_w_vanishes_without_tau() {
        let tables = StirlingTables::new(20);
        let sigma = Float::with_val(128, 0.37);
        let r = eval_lagrange_w(&sigma, &Float::new(128), 20, &tables).unwrap();
        assert!(r.value.is_zero());
    }

    #[test]
    fn phi_via_w_rejects_other_methods() {
        let tables = StirlingTables::new(16);
        let tol = default_tolerance(64);
        let err = phi_via_w(&arg("100"), &one(), 4, Series::Comtet, &tol, 64, &tables).unwrap_err();
        assert!(matches!(err, Error::UnsupportedParameter(_)));
    }

    #[test]
    fn log_shift_is_identity_at_zero_tau() {
        let r = log_shift_residual(&Float::with_val(200, 0.2), &Float::new(200), 200).unwrap();
        assert!(r.is_zero());
        assert!(log_shift_residual(&Float::with_val(64, 0.2), &Float::with_val(64, 1), 64).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for s in Series::ALL {
            assert_eq!(s.label().parse::<Series>().unwrap(), s);
        }
        assert!("5b".parse::<Series>().is_err());
    }
}
