//! Signed log-domain scalars.
//!
//! The tree constructions contain weight factors like `(N-1)^{-n}` and
//! `e^{λn}` that leave the f64 range near level `n ≈ 10^3`, while every
//! quantity the checks care about (residual signs, ratios of incident
//! weights) is invariant under a global rescaling. `LogNum` stores a sign
//! and `ln|x|` so sums and products of such quantities never overflow.

/// A real number stored as `sign * exp(ln_abs)`. Zero has `sign == 0` and
/// `ln_abs == -inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNum {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum { sign: 0, ln_abs: f64::NEG_INFINITY };
    pub const ONE: LogNum = LogNum { sign: 1, ln_abs: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogNum { sign: 1, ln_abs: x.ln() }
        } else {
            LogNum { sign: -1, ln_abs: (-x).ln() }
        }
    }

    /// Positive number from its natural log.
    pub fn from_ln(ln_abs: f64) -> Self {
        LogNum { sign: 1, ln_abs }
    }

    pub fn from_sign_ln(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogNum { sign, ln_abs }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    pub fn neg(&self) -> Self {
        LogNum { sign: -self.sign, ln_abs: self.ln_abs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_sign_ln(self.sign * o.sign, self.ln_abs + o.ln_abs)
    }

    pub fn div(&self, o: &Self) -> Self {
        debug_assert!(o.sign != 0, "division by log-domain zero");
        Self::from_sign_ln(self.sign * o.sign, self.ln_abs - o.ln_abs)
    }

    /// `|self|^e` for a nonnegative base; sign is dropped deliberately.
    pub fn abs_powf(&self, e: f64) -> Self {
        if self.sign == 0 {
            if e == 0.0 {
                Self::ONE
            } else {
                Self::ZERO
            }
        } else {
            Self::from_ln(e * self.ln_abs)
        }
    }

    /// Signed addition via log-sum-exp.
    pub fn add(&self, o: &Self) -> Self {
        if self.sign == 0 {
            return *o;
        }
        if o.sign == 0 {
            return *self;
        }
        let (big, small) = if self.ln_abs >= o.ln_abs { (self, o) } else { (o, self) };
        let d = small.ln_abs - big.ln_abs; // <= 0
        if self.sign == o.sign {
            LogNum { sign: big.sign, ln_abs: big.ln_abs + d.exp().ln_1p() }
        } else {
            // |big| - |small|; cancellation is inherent here.
            let rest = -(d.exp_m1()); // 1 - e^d
            if rest == 0.0 {
                Self::ZERO
            } else {
                LogNum { sign: big.sign, ln_abs: big.ln_abs + rest.ln() }
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

/// Log-sum-exp of positive terms given by their logs.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    m + s.ln()
}

/// Incremental log-sum-exp accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct LseAcc {
    max: f64,
    sum: f64,
    empty: bool,
}

impl LseAcc {
    pub fn new() -> Self {
        LseAcc { max: f64::NEG_INFINITY, sum: 0.0, empty: true }
    }

    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if self.empty {
            self.max = ln_term;
            self.sum = 1.0;
            self.empty = false;
        } else if ln_term <= self.max {
            self.sum += (ln_term - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        }
    }

    pub fn ln_total(&self) -> f64 {
        if self.empty {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}
