//! Stirling numbers read off their exponential generating functions.
//!
//! `ln(1+z)^m`, `(e^z - 1)^m` and `(e^z - 1 - z)^m` are expanded as truncated
//! power series with exact rational coefficients. Nothing here touches the
//! recurrences in the parent module.

use rug::{Integer, Rational};

use super::StirlingKind;

/// Truncated power series `sum_k c[k] z^k`, `k <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries {
    coeffs: Vec<Rational>,
}

impl RationalSeries {
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Rational::new(); order + 1];
        coeffs[0] = Rational::from(1);
        RationalSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    /// `ln(1 + z)`.
    pub fn log1p(order: usize) -> Self {
        let mut s = Self::zero(order);
        for k in 1..=order {
            let c = Rational::from((1, k as u64));
            s.coeffs[k] = if k % 2 == 1 { c } else { -c };
        }
        s
    }

    /// `e^z - sum_{k < skip} z^k / k!`.
    pub fn exp_tail(order: usize, skip: usize) -> Self {
        let mut s = Self::zero(order);
        let mut fact = Integer::from(1);
        for k in 1..=order {
            fact *= k as u64;
            if k >= skip {
                s.coeffs[k] = Rational::from((Integer::from(1), fact.clone()));
            }
        }
        s
    }

    fn zero(order: usize) -> Self {
        RationalSeries {
            coeffs: vec![Rational::new(); order + 1],
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = self.order().min(rhs.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if *b != 0 {
                    out.coeffs[i + j] += Rational::from(a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, m: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..m {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Column `m` of the given kind for `n = 0..=n_max`, as `n!/m!` times the
/// `z^n` coefficient of the generating function (sign-corrected for cycles).
pub fn column(kind: StirlingKind, m: usize, n_max: usize) -> Vec<Integer> {
    let base = match kind {
        StirlingKind::Cycle => RationalSeries::log1p(n_max),
        StirlingKind::Subset => RationalSeries::exp_tail(n_max, 1),
        StirlingKind::Assoc2 => RationalSeries::exp_tail(n_max, 2),
    };
    let power = base.pow(m);
    let m_fact = Integer::from(Integer::factorial(m as u32));
    (0..=n_max)
        .map(|n| {
            let n_fact = Integer::from(Integer::factorial(n as u32));
            let mut value = Rational::from(power.coeff(n) * n_fact) / &m_fact;
            if kind == StirlingKind::Cycle && (n + m) % 2 == 1 {
                value = -value;
            }
            let (num, den) = value.into_numer_denom();
            assert_eq!(den, 1, "generating function coefficient is not an integer");
            num
        })
        .collect()
}
