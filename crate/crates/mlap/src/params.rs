//! Classification of `(m, p, q)` and the sharp volume-growth thresholds.
//!
//! The `(p, q)` plane splits into the regions
//!
//! ```text
//! G1 = {p >= 0, m-1-p < q < m}          G2 = {q >= m}
//! G3 = {p < 0, m-1 < q < m}             G4 = {p < 0, q = m-1}
//! G5 = {p+q = m-1, p >= 0, q > 0} ∪ {p+q = m-1, q < 0}
//! G6 = {p < m-1-q, q < m-1} ∪ {(m-1, 0)}
//! ```
//!
//! and, off the critical line `p + q = m - 1`, into the four parts
//! `K1..K4` that determine the admissible exponent `t` of the summed
//! Caccioppoli-type estimate.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameter triple of the inequality `Δ_m u + u^p |∇u|^q ≤ 0`, `m > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTriple {
    pub m: f64,
    pub p: f64,
    pub q: f64,
}

impl ParamTriple {
    pub fn new(m: f64, p: f64, q: f64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() || !p.is_finite() || !q.is_finite() {
            return Err(Error::Parameter(format!(
                "need finite parameters with m > 1, got m={m}, p={p}, q={q}"
            )));
        }
        Ok(ParamTriple { m, p, q })
    }

    /// `p + q - (m - 1)`, the signed distance to the critical line.
    pub fn critical_excess(&self) -> f64 {
        self.p + self.q - (self.m - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GRegion {
    G1,
    G2,
    G3,
    G4,
    G5_1,
    G5_2,
    G6,
}

impl std::fmt::Display for GRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GRegion::G1 => "G1",
            GRegion::G2 => "G2",
            GRegion::G3 => "G3",
            GRegion::G4 => "G4",
            GRegion::G5_1 => "G5_1",
            GRegion::G5_2 => "G5_2",
            GRegion::G6 => "G6",
        };
        f.write_str(s)
    }
}

/// Total classifier: every triple lands in exactly one region.
pub fn classify_g(pt: ParamTriple) -> GRegion {
    let ParamTriple { m, p, q } = pt;
    if q >= m {
        return GRegion::G2;
    }
    // q < m from here on
    if q > m - 1.0 {
        return if p < 0.0 { GRegion::G3 } else { GRegion::G1 };
    }
    if q == m - 1.0 {
        if p < 0.0 {
            return GRegion::G4;
        }
        if p > 0.0 {
            return GRegion::G1; // m-1-p < q holds strictly
        }
        return GRegion::G5_1; // p = 0, q = m-1 > 0 sits on the critical line
    }
    // q < m - 1
    let excess = pt.critical_excess();
    if excess > 0.0 {
        return GRegion::G1; // forces p > 0
    }
    if excess < 0.0 {
        return GRegion::G6;
    }
    // on the critical line with q < m - 1
    if q > 0.0 {
        GRegion::G5_1
    } else if q < 0.0 {
        GRegion::G5_2
    } else {
        GRegion::G6 // (p, q) = (m-1, 0)
    }
}

/// Membership predicate straight from the set definitions, used by the
/// disjointness property tests.
pub fn g_region_contains(region: GRegion, pt: ParamTriple) -> bool {
    let ParamTriple { m, p, q } = pt;
    match region {
        GRegion::G1 => p >= 0.0 && m - 1.0 - p < q && q < m,
        GRegion::G2 => q >= m,
        GRegion::G3 => p < 0.0 && m - 1.0 < q && q < m,
        GRegion::G4 => p < 0.0 && q == m - 1.0,
        GRegion::G5_1 => p + q == m - 1.0 && p >= 0.0 && q > 0.0,
        GRegion::G5_2 => p + q == m - 1.0 && q < 0.0,
        GRegion::G6 => (p < m - 1.0 - q && q < m - 1.0) || (p == m - 1.0 && q == 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KRegion {
    K1,
    K2,
    K3,
    K4,
    OnCriticalLine,
}

impl std::fmt::Display for KRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            KRegion::K1 => "K1",
            KRegion::K2 => "K2",
            KRegion::K3 => "K3",
            KRegion::K4 => "K4",
            KRegion::OnCriticalLine => "on_critical_line",
        };
        f.write_str(s)
    }
}

/// Open interval of admissible `t`; `upper = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TInterval {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl TInterval {
    pub fn contains(&self, t: f64) -> bool {
        t > self.lower && self.upper.map_or(true, |u| t < u)
    }
}

/// K-partition of the plane off the critical line, with the admissible
/// `t`-interval for each part.
pub fn classify_k(pt: ParamTriple) -> (KRegion, Option<TInterval>) {
    let ParamTriple { m, p, q } = pt;
    let excess = pt.critical_excess();
    if excess == 0.0 {
        return (KRegion::OnCriticalLine, None);
    }
    let m1 = m - 1.0;
    if q <= m1 {
        if excess < 0.0 {
            (KRegion::K1, Some(TInterval { lower: m1, upper: None }))
        } else {
            (KRegion::K2, Some(TInterval { lower: 0.0, upper: Some(m1) }))
        }
    } else {
        let pivot = p * (1.0 - m) / (q - m1);
        if excess > 0.0 {
            (KRegion::K3, Some(TInterval { lower: pivot.max(0.0), upper: Some(m1) }))
        } else {
            (KRegion::K4, Some(TInterval { lower: m1, upper: Some(pivot) }))
        }
    }
}

/// Derived exponents of the summed estimate for a given `(t, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub t: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
    pub rho: f64,
}

impl ExponentSet {
    /// The three admissibility conditions: `b > 1`, `γ > 1`, `s > aρ`
    /// (equivalently `s` exceeds the gradient exponent of the right-hand
    /// side), plus `a ≥ 1` and `ρ > 1` needed by the derivation.
    pub fn is_valid(&self) -> bool {
        self.b > 1.0 && self.gamma > 1.0 && self.s > self.a * self.rho
            && self.a >= 1.0
            && self.rho > 1.0
    }

    /// Exponent `aρ = (mp + q + t(q-m)) / (p + q - m + 1)` carried by
    /// `|∇φ|` on the right-hand side.
    pub fn phi_exponent(&self) -> f64 {
        self.a * self.rho
    }
}

/// Compute `a, b, γ, ρ` for `(m, p, q)` and a chosen `(t, s)`.
pub fn exponents(pt: ParamTriple, t: f64, s: f64) -> Result<ExponentSet> {
    let ParamTriple { m, p, q } = pt;
    let pq_t = p + q - t;
    let excess = pt.critical_excess();
    if pq_t == 0.0 {
        return Err(Error::SingularDenominator("p + q = t".into()));
    }
    if t == m - 1.0 {
        return Err(Error::SingularDenominator("t = m - 1".into()));
    }
    if excess == 0.0 {
        return Err(Error::SingularDenominator("p + q = m - 1".into()));
    }
    let num = m * p + q + t * (q - m);
    let b_den = (m - 1.0) * p + t * (q - m + 1.0);
    if b_den == 0.0 {
        return Err(Error::SingularDenominator("(m-1)p + t(q-m+1) = 0".into()));
    }
    Ok(ExponentSet {
        t,
        s,
        a: num / pq_t,
        b: num / b_den,
        gamma: pq_t / (m - 1.0 - t),
        rho: pq_t / excess,
    })
}

/// The `t` (and, in the `G4` case, `s`) used at step `i` of the
/// contradiction arguments, by region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TSchedule {
    pub t: f64,
    pub s: Option<f64>,
}

/// Proof-specific choice of `t` at step `i >= 1`.
///
/// For `G4` the caller supplies `extra = l > 1`; the returned schedule then
/// also carries `s = -l(m-1)/p + m + 1/i`.
pub fn proof_t_schedule(pt: ParamTriple, i: u32, extra: Option<f64>) -> Result<TSchedule> {
    if i == 0 {
        return Err(Error::Parameter("schedule index i must be >= 1".into()));
    }
    let ParamTriple { m, p, q } = pt;
    let step = 1.0 / f64::from(i);
    let excess = pt.critical_excess();
    match classify_g(pt) {
        GRegion::G1 => Ok(TSchedule { t: step, s: None }),
        GRegion::G2 => {
            if excess > 0.0 {
                Ok(TSchedule { t: m - 1.0 - step, s: None })
            } else if excess < 0.0 {
                Ok(TSchedule { t: m - 1.0 + step, s: None })
            } else {
                Err(Error::UnsupportedRegion(
                    "G2 on the critical line reduces to a shifted exponent; no direct schedule"
                        .into(),
                ))
            }
        }
        GRegion::G3 => {
            let pivot = p * (1.0 - m) / (q - m + 1.0);
            if excess > 0.0 {
                Ok(TSchedule { t: pivot + step, s: None })
            } else if excess < 0.0 {
                Ok(TSchedule { t: pivot - step, s: None })
            } else {
                Err(Error::UnsupportedRegion(
                    "G3 on the critical line reduces to a shifted exponent; no direct schedule"
                        .into(),
                ))
            }
        }
        GRegion::G4 => {
            let l = extra.ok_or_else(|| {
                Error::Parameter("G4 schedule needs extra parameter l > 1".into())
            })?;
            if !(l > 1.0) {
                return Err(Error::Parameter(format!("G4 schedule needs l > 1, got {l}")));
            }
            let t = l * (m - 1.0) + step;
            let s = -l * (m - 1.0) / p + m + step;
            Ok(TSchedule { t, s: Some(s) })
        }
        r => Err(Error::UnsupportedRegion(format!(
            "no t-schedule for region {r}; the argument there does not use the summed estimate"
        ))),
    }
}

/// Extra data some thresholds need.
#[derive(Debug, Clone, Copy, Default)]
pub struct ThresholdOpts {
    /// Exponent for the `G4` polynomial bound `n^α`.
    pub alpha: Option<f64>,
    /// Rate for the `G5` exponential bound `e^{κn}`.
    pub kappa: Option<f64>,
    /// Graph constant used to validate `κ < κ_0`.
    pub p0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Value(f64),
    /// Non-existence holds with no volume assumption in this region.
    NoVolumeCondition,
}

/// `κ_0 = 1 / (2 (2 p_0)^{(m-1)/2} e)`.
pub fn kappa0(m: f64, p0: f64) -> f64 {
    1.0 / (2.0 * (2.0 * p0).powf((m - 1.0) / 2.0) * std::f64::consts::E)
}

/// Sharp volume-growth threshold for `W_o(n)`, by region.
pub fn threshold_w(pt: ParamTriple, n: u64, opts: ThresholdOpts) -> Result<Threshold> {
    if n < 2 {
        return Err(Error::Parameter(format!("threshold needs n >= 2, got {n}")));
    }
    let ParamTriple { m, p, q } = pt;
    let nf = n as f64;
    let ln_n = nf.ln();
    let excess = pt.critical_excess();
    let value = match classify_g(pt) {
        GRegion::G1 => nf.powf((m * p + q) / excess) * ln_n.powf((m - 1.0) / excess),
        GRegion::G2 => nf.powf(m) * ln_n.powf(m - 1.0),
        GRegion::G3 => {
            let d = q - m + 1.0;
            nf.powf(q / d) * ln_n.powf((m - 1.0) / d)
        }
        GRegion::G4 => {
            let alpha = opts
                .alpha
                .ok_or_else(|| Error::Parameter("G4 threshold needs alpha > 0".into()))?;
            if !(alpha > 0.0) {
                return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
            }
            nf.powf(alpha)
        }
        GRegion::G5_1 | GRegion::G5_2 => {
            if classify_g(pt) == GRegion::G5_2 && m >= 3.0 {
                return Ok(Threshold::NoVolumeCondition);
            }
            let kappa = opts
                .kappa
                .ok_or_else(|| Error::Parameter("G5 threshold needs kappa".into()))?;
            if !(kappa > 0.0) {
                return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
            }
            if let Some(p0) = opts.p0 {
                let k0 = kappa0(m, p0);
                if kappa >= k0 {
                    return Err(Error::Parameter(format!(
                        "kappa = {kappa} not below kappa0 = {k0}"
                    )));
                }
            }
            (kappa * nf).exp()
        }
        GRegion::G6 => return Ok(Threshold::NoVolumeCondition),
    };
    Ok(Threshold::Value(value))
}
