//! Reference values by root-finding, independent of every series.
//!
//! `Phi_alpha(x)` solves `alpha ln y + y = ln x`; `W = Phi_1`. Roots are
//! bracketed first, then refined with a safeguarded Halley step that falls
//! back to bisection whenever it leaves the bracket.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::real::{euler_e, pow2, Argument, GUARD_BITS};

/// Iteration cap for the refinement phase.
pub const MAX_ITERATIONS: usize = 200;

/// Bisection steps taken before switching to Halley.
const SEED_BISECTIONS: usize = 8;

/// Bracket expansion limit; enough to reach roots near `2^-65536`.
const MAX_BRACKET_STEPS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub root: Float,
    pub iterations: usize,
    /// `|y^alpha e^y - x| / x`, or `|g(y)|` for [`solve_shift_equation`].
    pub residual: Float,
    pub precision_bits: u32,
}

impl SolveReport {
    /// The bound `2^-(precision - 12)` every successful solve satisfies.
    pub fn residual_bound(&self) -> Float {
        pow2(self.precision_bits, -(self.precision_bits as i32 - 12))
    }
}

/// Principal branch of Lambert W for `x >= 0`.
pub fn solve_w(x: &Argument, precision: u32) -> Result<SolveReport> {
    solve_phi(x, &Rational::from(1), precision)
}

/// The root of `y^alpha e^y = x`; for `alpha < 0` the branch `y > -alpha`.
pub fn solve_phi(x: &Argument, alpha: &Rational, precision: u32) -> Result<SolveReport> {
    let work = precision + GUARD_BITS;
    if x.is_zero() {
        if *alpha > 0 {
            return Ok(SolveReport {
                root: Float::new(precision),
                iterations: 0,
                residual: Float::new(precision),
                precision_bits: precision,
            });
        }
        return Err(Error::Domain(format!("x = 0 has no positive root for alpha = {alpha}")));
    }
    let ln_x = x.ln(work);
    let a = Float::with_val(work, alpha);

    if *alpha == 0 {
        if ln_x <= 0 {
            return Err(Error::Domain(format!("alpha = 0 needs x > 1, got x = {x}")));
        }
        return Ok(finish(ln_x, 0, &a, x, precision));
    }

    let f = |y: &Float| -> Float {
        let mut v = Float::with_val(work, y.ln_ref());
        v *= &a;
        v += y;
        v -= &ln_x;
        v
    };
    // Roots live in (floor, inf); f is increasing there.
    let floor = if *alpha < 0 {
        Float::with_val(work, -&a)
    } else {
        Float::new(work)
    };

    let mut trace = Vec::new();
    let (mut lo, mut hi) = if *alpha < 0 {
        let f_floor = f(&floor);
        if f_floor >= 0 {
            return Err(Error::Domain(format!(
                "alpha = {alpha} needs x > e^(-alpha) (-alpha)^alpha, got x = {x}"
            )));
        }
        let mut width = Float::with_val(work, 1);
        let mut hi = Float::with_val(work, &floor + &width);
        let mut steps = 0;
        while f(&hi) <= 0 {
            width <<= 1;
            hi = Float::with_val(work, &floor + &width);
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(bracket_failure(&trace));
            }
        }
        (floor.clone(), hi)
    } else {
        let start = Float::with_val(work, ln_x.clone().abs().max(&Float::with_val(work, 1)));
        let mut hi = start.clone();
        let mut steps = 0;
        while f(&hi) <= 0 {
            hi <<= 1;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(bracket_failure(&trace));
            }
        }
        let mut lo = Float::with_val(work, &hi >> 1);
        while f(&lo) >= 0 {
            lo >>= 1;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo.is_zero() {
                return Err(bracket_failure(&trace));
            }
        }
        (lo, hi)
    };

    let midpoint = |lo: &Float, hi: &Float| -> Float {
        let dl = Float::with_val(work, lo - &floor);
        let dh = Float::with_val(work, hi - &floor);
        if dl > 0 {
            // geometric in the offset from the floor, so tiny roots are reached quickly
            Float::with_val(work, (dl * dh).sqrt()) + &floor
        } else {
            Float::with_val(work, lo + hi) >> 1
        }
    };

    for _ in 0..SEED_BISECTIONS {
        let mid = midpoint(&lo, &hi);
        let fm = f(&mid);
        if fm.is_zero() {
            return Ok(finish(mid, 0, &a, x, precision));
        }
        if fm < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let tol = pow2(work, -(work as i32 - 8));
    let mut y = midpoint(&lo, &hi);
    for iteration in 1..=MAX_ITERATIONS {
        let fy = f(&y);
        if fy.is_zero() {
            return Ok(finish(y, iteration, &a, x, precision));
        }
        if fy < 0 {
            lo = y.clone();
        } else {
            hi = y.clone();
        }
        // f' = 1 + a/y, f'' = -a/y^2
        let d1 = Float::with_val(work, &a / &y) + 1u32;
        let d2 = -Float::with_val(work, &a / Float::with_val(work, y.square_ref()));
        let num = Float::with_val(work, &fy * &d1) * 2u32;
        let den = Float::with_val(work, d1.square_ref()) * 2u32 - Float::with_val(work, &fy * &d2);
        let mut next = Float::with_val(work, &y - Float::with_val(work, &num / &den));
        if !(next > lo && next < hi) || !next.is_finite() {
            next = midpoint(&lo, &hi);
        }
        let step = Float::with_val(work, &next - &y).abs();
        if trace.len() < 16 || iteration > MAX_ITERATIONS - 4 {
            trace.push(format!(
                "iteration {iteration}: y = {}, f(y) = {}",
                y.to_f64(),
                fy.to_f64()
            ));
        }
        y = next;
        if step <= Float::with_val(work, &tol * y.clone().abs()) {
            return Ok(finish(y, iteration, &a, x, precision));
        }
    }
    Err(Error::Solver {
        message: format!("no convergence after {MAX_ITERATIONS} iterations"),
        trace,
    })
}

fn bracket_failure(trace: &[String]) -> Error {
    Error::Solver {
        message: "could not bracket the root".into(),
        trace: trace.to_vec(),
    }
}

fn finish(root: Float, iterations: usize, alpha: &Float, x: &Argument, precision: u32) -> SolveReport {
    let work = alpha.prec();
    let root = Float::with_val(precision, &root);
    let residual = if root.is_zero() {
        Float::new(precision)
    } else {
        // exp(alpha ln y + y - ln x) - 1 at the guard precision
        let y = Float::with_val(work, &root);
        let mut log_lhs = Float::with_val(work, y.ln_ref()) * alpha;
        log_lhs += &y;
        log_lhs -= x.ln(work);
        Float::with_val(precision, log_lhs.exp_m1().abs())
    };
    SolveReport {
        root,
        iterations,
        residual,
        precision_bits: precision,
    }
}

/// Root `w` of `1 - e^(-w) + sigma w - tau = 0` for `sigma > 0`.
///
/// The left side is strictly increasing in `w`, so the root is unique. The
/// reported root is kept at `precision + 32` bits.
pub fn solve_shift_equation(sigma: &Float, tau: &Float, precision: u32) -> Result<SolveReport> {
    if *sigma <= 0 {
        return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
    }
    let work = precision + GUARD_BITS;
    let s = Float::with_val(work, sigma);
    let t = Float::with_val(work, tau);
    let g = |w: &Float| -> Float {
        let mut v = -Float::with_val(work, (-w.clone()).exp_m1());
        v += Float::with_val(work, &s * w);
        v -= &t;
        v
    };
    let report = |w: Float, iterations: usize| SolveReport {
        residual: Float::with_val(precision, g(&w).abs()),
        root: w,
        iterations,
        precision_bits: precision,
    };
    if t.is_zero() {
        return Ok(report(Float::new(work), 0));
    }

    let mut trace = Vec::new();
    let mut lo;
    let mut hi;
    let mut steps = 0;
    if t > 0 {
        lo = Float::new(work);
        hi = Float::with_val(work, 1);
        while g(&hi) <= 0 {
            hi <<= 1;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(bracket_failure(&trace));
            }
        }
    } else {
        hi = Float::new(work);
        lo = Float::with_val(work, -1);
        while g(&lo) >= 0 {
            lo <<= 1;
            steps += 1;
            if steps > MAX_BRACKET_STEPS {
                return Err(bracket_failure(&trace));
            }
        }
    }
    for _ in 0..SEED_BISECTIONS {
        let mid = Float::with_val(work, &lo + &hi) >> 1;
        if g(&mid) < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let tol = pow2(work, -(work as i32 - 8));
    let mut w = Float::with_val(work, &lo + &hi) >> 1;
    for iteration in 1..=MAX_ITERATIONS {
        let gw = g(&w);
        if gw.is_zero() {
            return Ok(report(w, iteration));
        }
        if gw < 0 {
            lo = w.clone();
        } else {
            hi = w.clone();
        }
        let ew = Float::with_val(work, (-w.clone()).exp());
        let d1 = Float::with_val(work, &ew + &s);
        let d2 = -ew;
        let num = Float::with_val(work, &gw * &d1) * 2u32;
        let den = Float::with_val(work, d1.square_ref()) * 2u32 - Float::with_val(work, &gw * &d2);
        let mut next = Float::with_val(work, &w - Float::with_val(work, &num / &den));
        if !(next > lo && next < hi) || !next.is_finite() {
            next = Float::with_val(work, &lo + &hi) >> 1;
        }
        let step = Float::with_val(work, &next - &w).abs();
        if trace.len() < 16 {
            trace.push(format!(
                "iteration {iteration}: w = {}, g(w) = {}",
                w.to_f64(),
                gw.to_f64()
            ));
        }
        w = next;
        let scale = Float::with_val(work, w.clone().abs()).max(&Float::with_val(work, 1));
        if step <= Float::with_val(work, &tol * &scale) {
            return Ok(report(w, iteration));
        }
    }
    Err(Error::Solver {
        message: format!("no convergence after {MAX_ITERATIONS} iterations"),
        trace,
    })
}

/// First `k` Taylor coefficients of `W` about `x = e`.
///
/// With `x = e + t` and `W = sum c_j t^j`, the relation `x (1 + W) W' = W`
/// fixes each `c_{j+1}` from `c_0..=c_j`, starting at `c_0 = W(e) = 1`.
pub fn taylor_coeffs_at_e(k: usize, precision: u32) -> Vec<Float> {
    let work = precision + GUARD_BITS;
    if k == 0 {
        return Vec::new();
    }
    let e = euler_e(work);
    let mut c: Vec<Float> = vec![Float::with_val(work, 1)];
    // a_i: coefficients of (e + t)(1 + W(t))
    let mut a: Vec<Float> = vec![Float::with_val(work, &e * 2u32)];
    for j in 0..k - 1 {
        if j >= 1 {
            let one_plus_w_prev = if j == 1 {
                Float::with_val(work, 2)
            } else {
                c[j - 1].clone()
            };
            a.push(Float::with_val(work, &e * &c[j]) + one_plus_w_prev);
        }
        let mut rhs = c[j].clone();
        for i in 1..=j {
            rhs -= Float::with_val(work, &a[i] * &c[j - i + 1]) * ((j - i + 1) as u32);
        }
        let denom = Float::with_val(work, &a[0] * ((j + 1) as u32));
        c.push(rhs / denom);
    }
    c.into_iter().map(|v| Float::with_val(precision, &v)).collect()
}
