//! Verification suite: residual sweeps, Harnack ratios, cutoff functions,
//! the summed Caccioppoli-type estimate, the min-neighbor descent
//! diagnostic, and the volume-series parabolicity test.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{VertexFunction, WeightedGraph};
use crate::lognum::{log_sum_exp, LseAcc};
use crate::params::{exponents, ParamTriple};
use crate::tree::RadialProfile;
use crate::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Residual tolerance: a vertex passes when
/// `residual <= abs + rel * max(|Δ_m u|, u^p|∇u|^q)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 0.0, rel: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub checked_vertices: usize,
    /// `(vertex, scale-normalized residual)` for every check that failed,
    /// sorted by vertex id.
    pub violations: Vec<(usize, f64)>,
    /// Largest normalized residual over the checked vertices.
    pub max_residual: f64,
    pub tolerance: Tolerance,
    /// Vertices excluded because their neighborhood is truncated.
    pub boundary_excluded: Vec<usize>,
}

impl ResidualReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn residual_violates(res: &crate::graph::Residual, tol: Tolerance) -> bool {
    if res.value.is_infinite() && res.value > 0.0 {
        return true;
    }
    let scale = res.laplacian.abs().max(res.reaction.abs());
    if scale.is_finite() && scale > 0.0 {
        !(res.value <= tol.abs + tol.rel * scale)
    } else {
        res.normalized > tol.rel
    }
}

/// Sweep the residual of `Δ_m u + u^p |∇u|^q ≤ 0` over `interior`.
pub fn verify_supersolution(
    g: &WeightedGraph,
    u: &VertexFunction,
    pt: ParamTriple,
    interior: &BTreeSet<usize>,
    tol: Tolerance,
) -> Result<ResidualReport> {
    let mut nonpositive = Vec::new();
    for &x in interior {
        if u.value(x)? <= 0.0 {
            nonpositive.push(x);
            continue;
        }
        for &(y, _) in g.neighbors(x)? {
            if u.value(y)? <= 0.0 {
                nonpositive.push(y);
            }
        }
    }
    if !nonpositive.is_empty() {
        nonpositive.sort_unstable();
        nonpositive.dedup();
        return Err(Error::Domain(format!(
            "u must be positive on the closed neighborhood of the interior; offending vertices {nonpositive:?}"
        )));
    }
    let mut violations = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for &x in interior {
        let res = g.residual(u, pt.m, pt.p, pt.q, x)?;
        max_residual = max_residual.max(res.normalized);
        if residual_violates(&res, tol) {
            violations.push((x, res.normalized));
        }
    }
    let boundary_excluded =
        (0..g.vertex_count()).filter(|x| !interior.contains(x)).collect();
    Ok(ResidualReport {
        checked_vertices: interior.len(),
        violations,
        max_residual: if interior.is_empty() { 0.0 } else { max_residual },
        tolerance: tol,
        boundary_excluded,
    })
}

/// Vertices whose full neighborhood survives truncation: everything
/// strictly inside the outermost BFS sphere from the root.
pub fn truncation_interior(g: &WeightedGraph, o: usize) -> BTreeSet<usize> {
    let dist = g.bfs_distances(o);
    let max_d = dist.iter().flatten().max().copied().unwrap_or(0);
    (0..g.vertex_count()).filter(|&x| dist[x].is_some_and(|d| d < max_d)).collect()
}

/// Report of the per-level residual sweep on a radial profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialReport {
    pub checked_levels: u64,
    pub violations: Vec<(i64, f64)>,
    pub max_residual: f64,
    pub tolerance: Tolerance,
}

impl RadialReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `radial_residual ≤ 0` (within tolerance) at every level of the
/// profile's index range.
pub fn verify_profile(profile: &RadialProfile, tol: Tolerance) -> Result<RadialReport> {
    let (lo, hi) = profile.index_range();
    let mut violations = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for n in lo..=hi {
        let res = crate::tree::radial_residual(profile, n)?;
        max_residual = max_residual.max(res.normalized);
        if residual_violates(&res, tol) {
            violations.push((n, res.normalized));
        }
    }
    Ok(RadialReport {
        checked_levels: (hi - lo + 1) as u64,
        violations,
        max_residual,
        tolerance: tol,
    })
}

// ---------------------------------------------------------------------------
// Harnack
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnackReport {
    pub ok: bool,
    pub p1: f64,
    /// Worst `max(u(y)/u(x), u(x)/u(y))` over edges, with the edge.
    pub worst_ratio: f64,
    pub worst_pair: Option<(usize, usize)>,
    /// False when `u` vanishes somewhere but not identically.
    pub dichotomy_ok: bool,
}

/// Check `1/p_1 ≤ u(y)/u(x) ≤ p_1` on every edge, `p_1 = 1 + p_0^{1/(m-1)}`.
pub fn harnack_check(
    g: &WeightedGraph,
    u: &VertexFunction,
    m: f64,
    p0: f64,
) -> Result<HarnackReport> {
    if !(m > 1.0) {
        return Err(Error::Parameter(format!("m must exceed 1, got {m}")));
    }
    if !(p0 >= 1.0) {
        return Err(Error::Parameter(format!("p0 must be >= 1, got {p0}")));
    }
    let p1 = 1.0 + p0.powf(1.0 / (m - 1.0));
    let mut zeros = 0usize;
    for x in 0..g.vertex_count() {
        let v = u.value(x)?;
        if v < 0.0 {
            return Err(Error::Domain(format!("u must be nonnegative, u({x}) = {v}")));
        }
        if v == 0.0 {
            zeros += 1;
        }
    }
    if zeros > 0 {
        let all_zero = zeros == g.vertex_count();
        return Ok(HarnackReport {
            ok: all_zero,
            p1,
            worst_ratio: if all_zero { 1.0 } else { f64::INFINITY },
            worst_pair: None,
            dichotomy_ok: all_zero,
        });
    }
    let mut worst_ratio = 1.0f64;
    let mut worst_pair = None;
    for e in g.edges() {
        let r = u.value(e.v)? / u.value(e.u)?;
        let sym = r.max(1.0 / r);
        if sym > worst_ratio {
            worst_ratio = sym;
            worst_pair = Some((e.u, e.v));
        }
    }
    Ok(HarnackReport { ok: worst_ratio <= p1, p1, worst_ratio, worst_pair, dichotomy_ok: true })
}

/// Harnack ratio sweep along a radial profile: consecutive level ratios
/// `u_n / u_{n+1}` against `p_1` from the tree's own `p_0`.
pub fn harnack_check_profile(profile: &RadialProfile) -> HarnackReport {
    let p0 = profile.p0();
    let p1 = 1.0 + p0.powf(1.0 / (profile.params.m - 1.0));
    let (lo, hi) = profile.index_range();
    let mut worst_ratio = 1.0f64;
    let mut worst_pair = None;
    for n in lo..hi {
        let r = (profile.u_ln(n) - profile.u_ln(n + 1)).exp();
        let sym = r.max(1.0 / r);
        if sym > worst_ratio {
            worst_ratio = sym;
            worst_pair = Some((n as usize, (n + 1) as usize));
        }
    }
    HarnackReport { ok: worst_ratio <= p1, p1, worst_ratio, worst_pair, dichotomy_ok: true }
}

// ---------------------------------------------------------------------------
// Cutoff functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffKind {
    /// Radial hat: 1 on `B(o,n)`, linear on the annulus, 0 outside `B(o,2n)`.
    Hn(u64),
    /// `φ_i = (1/i) Σ_{k=i-1}^{2i-2} h_{2^k}`.
    PhiI(u32),
}

#[derive(Debug, Clone)]
pub struct CutoffFunction {
    pub kind: CutoffKind,
    pub values: VertexFunction,
}

/// `h_n` as a function of hop distance.
pub fn h_cutoff(n: u64, d: u64) -> f64 {
    if d <= n {
        1.0
    } else if d < 2 * n {
        2.0 - d as f64 / n as f64
    } else {
        0.0
    }
}

/// `φ_i` as a function of hop distance.
pub fn phi_cutoff(i: u32, d: u64) -> f64 {
    let mut s = 0.0;
    for k in (i - 1)..=(2 * i - 2) {
        s += h_cutoff(1u64 << k, d);
    }
    s / f64::from(i)
}

/// Materialize a cutoff on a graph from BFS distances.
pub fn make_cutoff(g: &WeightedGraph, o: usize, kind: CutoffKind) -> Result<CutoffFunction> {
    match kind {
        CutoffKind::Hn(n) if n == 0 => {
            return Err(Error::Parameter("h_n needs n >= 1".into()))
        }
        CutoffKind::PhiI(i) if i == 0 => {
            return Err(Error::Parameter("φ_i needs i >= 1".into()))
        }
        _ => {}
    }
    if o >= g.vertex_count() {
        return Err(Error::InvalidVertex(o));
    }
    let dist = g.bfs_distances(o);
    let values = (0..g.vertex_count())
        .map(|x| {
            let d = dist[x].expect("connected graph") as u64;
            match kind {
                CutoffKind::Hn(n) => h_cutoff(n, d),
                CutoffKind::PhiI(i) => phi_cutoff(i, d),
            }
        })
        .collect();
    Ok(CutoffFunction { kind, values: VertexFunction::linear(values) })
}

/// Verify `|∇_{xy} φ_i| ≤ c/(i·2^k)` on every annulus `B_k ∖ B_{k-1}`
/// with `i-1 ≤ k ≤ 2i`, measuring the actual level differences. Returns
/// the worst ratio `measured / bound`.
pub fn phi_gradient_bound(i: u32, c: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    for k in (i - 1)..=(2 * i) {
        let lo = if k == 0 { 1 } else { (1u64 << (k - 1)) + 1 };
        let hi = 1u64 << k;
        let bound = c / (f64::from(i) * (1u64 << k) as f64);
        for d in lo..=hi {
            let step = (phi_cutoff(i, d) - phi_cutoff(i, d + 1)).abs();
            let back = if d > 0 { (phi_cutoff(i, d) - phi_cutoff(i, d - 1)).abs() } else { 0.0 };
            worst = worst.max(step.max(back) / bound);
        }
    }
    (worst <= 1.0 + 1e-12, worst)
}

// ---------------------------------------------------------------------------
// Caccioppoli-type estimate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaccioppoliReport {
    pub lhs: f64,
    pub rhs: f64,
    /// The explicit constant multiplying the gradient sum.
    pub constant: f64,
    pub ok: bool,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

/// Explicit constant of the one-line estimate:
/// `C_{p1,t}^{(p+q-t)/(p+q-m+1)} (2s)^{(mp+q+t(q-m))/(p+q-m+1)}
///  t^{-(p(m-1)+t(q-m+1))/(p+q-m+1)}`.
pub fn caccioppoli_constant(pt: ParamTriple, t: f64, s: f64, p1: f64) -> Result<f64> {
    let ParamTriple { m, p, q } = pt;
    let exc = pt.critical_excess();
    let exps = exponents(pt, t, s)?;
    if !exps.is_valid() {
        return Err(Error::Parameter(format!(
            "(t, s) = ({t}, {s}) violates the admissibility conditions: {exps:?}"
        )));
    }
    let kappa = ((m - 1.0) * p + t * (q - m + 1.0)) / (p + q - t);
    let c_t = (2f64).powf(-1.0 - kappa) * kappa;
    let c_p1t = ((2.0 * p1).sqrt() * (1.0 + p1.powf(t))).powf(kappa + 1.0)
        * p1.powf((t + 1.0) * kappa)
        * c_t;
    let e_phi = (m * p + q + t * (q - m)) / exc;
    Ok(c_p1t.powf((p + q - t) / exc)
        * (2.0 * s).powf(e_phi)
        * t.powf(-(p * (m - 1.0) + t * (q - m + 1.0)) / exc))
}

/// Both sides of the estimate on an explicit graph.
///
/// `lhs = Σ_{x∈Ω} μ(x) u^{p-t} |∇u|^q φ^s`; `rhs` is the explicit constant
/// times `Σ μ_xy |∇_xy φ|^{(mp+q+t(q-m))/(p+q-m+1)}` over ordered adjacent
/// pairs in `Ω` where `φ` differs. When `Ω ≠ V`, `u(y) ≥ u(x)` is required
/// across the boundary.
pub fn caccioppoli_sides(
    g: &WeightedGraph,
    u: &VertexFunction,
    pt: ParamTriple,
    t: f64,
    s: f64,
    phi: &CutoffFunction,
    omega: Option<&BTreeSet<usize>>,
) -> Result<CaccioppoliReport> {
    let ParamTriple { m: _, p, q } = pt;
    let p1 = 1.0 + g.p0_constant().powf(1.0 / (pt.m - 1.0));
    let constant = caccioppoli_constant(pt, t, s, p1)?;
    let in_omega = |x: usize| omega.map_or(true, |set| set.contains(&x));
    if let Some(set) = omega {
        let mut bad = Vec::new();
        for &x in set {
            for &(y, _) in g.neighbors(x)? {
                if !set.contains(&y) && u.value(y)? < u.value(x)? {
                    bad.push((x, y));
                }
            }
        }
        if !bad.is_empty() {
            return Err(Error::Precondition(format!(
                "u must not decrease across the boundary of Ω; offending pairs {bad:?}"
            )));
        }
    }
    let e_phi = (pt.m * p + q + t * (q - pt.m)) / pt.critical_excess();
    let mut lhs = LseAcc::new();
    let mut rhs_sum = LseAcc::new();
    let mut lhs_infinite = false;
    for x in 0..g.vertex_count() {
        if !in_omega(x) {
            continue;
        }
        let phix = phi.values.value(x)?;
        if phix > 0.0 {
            let ux = u.log_value(x)?;
            if ux.sign <= 0 {
                return Err(Error::Domain(format!("u must be positive, u({x}) <= 0")));
            }
            let grad = g.gradient_norm_log(u, x)?;
            let grad_term = if grad.is_zero() {
                if q > 0.0 {
                    None
                } else if q == 0.0 {
                    Some(0.0)
                } else {
                    lhs_infinite = true;
                    None
                }
            } else {
                Some(q * grad.ln_abs)
            };
            if let Some(gt) = grad_term {
                lhs.push(
                    g.ln_vertex_measure(x)?
                        + (p - t) * ux.ln_abs
                        + gt
                        + s * phix.ln(),
                );
            }
        }
        for &(y, lw) in g.neighbors(x)? {
            if !in_omega(y) {
                continue;
            }
            let dphi = (phi.values.value(y)? - phix).abs();
            if dphi > 0.0 {
                rhs_sum.push(lw + e_phi * dphi.ln());
            }
        }
    }
    let ln_lhs = if lhs_infinite { f64::INFINITY } else { lhs.ln_total() };
    let ln_rhs = constant.ln() + rhs_sum.ln_total();
    Ok(CaccioppoliReport {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        constant,
        ok: ln_lhs <= ln_rhs,
        ln_lhs,
        ln_rhs,
    })
}

/// The same two sums evaluated radially on a profile tree truncated at
/// `depth`, with `Ω = V` and `φ = φ_i` centered at the root. Level counts
/// `|D_n| = N(N-1)^{n-1}` and `|E_n| = N(N-1)^n` replace vertex loops, so
/// depths far beyond any explicit graph are reachable.
pub fn caccioppoli_radial(
    profile: &RadialProfile,
    t: f64,
    s: f64,
    i: u32,
    depth: u64,
) -> Result<CaccioppoliReport> {
    if profile.case == crate::tree::CaseTag::V2 {
        return Err(Error::Parameter(
            "radial cutoff sums are for the one-sided constructions".into(),
        ));
    }
    let pt = profile.params;
    let ParamTriple { m, p, q } = pt;
    let support = 1u64 << (2 * i - 1);
    if depth < support {
        return Err(Error::Parameter(format!(
            "depth {depth} does not contain the support of φ_{i} (needs >= {support})"
        )));
    }
    let p0 = profile.p0_truncated(depth as i64);
    let p1 = 1.0 + p0.powf(1.0 / (m - 1.0));
    let constant = caccioppoli_constant(pt, t, s, p1)?;
    let e_phi = (m * p + q + t * (q - m)) / pt.critical_excess();
    let nn1 = ((profile.n_degree - 1) as f64).ln();
    let ln_n = (profile.n_degree as f64).ln();
    let mut lhs = LseAcc::new();
    let mut rhs_sum = LseAcc::new();
    for n in 0..=depth as i64 {
        let phi_n = phi_cutoff(i, n as u64);
        if phi_n > 0.0 {
            let ln_count = if n == 0 { 0.0 } else { ln_n + (n - 1) as f64 * nn1 };
            let level = radial_level(profile, n);
            lhs.push(
                ln_count
                    + level.ln_measure
                    + (p - t) * profile.u_ln(n)
                    + q * 0.5 * level.ln_grad_sq
                    + s * phi_n.ln(),
            );
        }
        let dphi = (phi_n - phi_cutoff(i, n as u64 + 1)).abs();
        if dphi > 0.0 && (n as u64) < depth {
            // ordered pairs across the level edge: 2 |E_n| μ_n |∇φ|^{e}
            let ln_edges = ln_n + n as f64 * nn1;
            rhs_sum.push(LN_2 + ln_edges + profile.mu_ln(n) + e_phi * dphi.ln());
        }
    }
    let ln_lhs = lhs.ln_total();
    let ln_rhs = constant.ln() + rhs_sum.ln_total();
    Ok(CaccioppoliReport {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        constant,
        ok: ln_lhs <= ln_rhs,
        ln_lhs,
        ln_rhs,
    })
}

struct RadialLevel {
    ln_measure: f64,
    ln_grad_sq: f64,
}

fn radial_level(profile: &RadialProfile, n: i64) -> RadialLevel {
    let nn1 = ((profile.n_degree - 1) as f64).ln();
    let d_up = profile.u_diff_ln(n);
    if n == 0 {
        let ln_measure = (profile.n_degree as f64).ln() + profile.mu_ln(0);
        RadialLevel { ln_measure, ln_grad_sq: 2.0 * d_up - LN_2 }
    } else {
        let up = nn1 + profile.mu_ln(n);
        let dn = profile.mu_ln(n - 1);
        let ln_measure = log_sum_exp(&[up, dn]);
        let d_dn = profile.u_diff_ln(n - 1);
        let ln_grad_sq =
            log_sum_exp(&[up + 2.0 * d_up, dn + 2.0 * d_dn]) - LN_2 - ln_measure;
        RadialLevel { ln_measure, ln_grad_sq }
    }
}

impl RadialProfile {
    /// `p_0` over levels `0..=depth` only.
    pub fn p0_truncated(&self, depth: i64) -> f64 {
        let mut best = 1.0f64;
        let (lo, _) = self.index_range();
        for n in lo.max(-depth)..=depth {
            let clone = self;
            best = best.max(p0_at(clone, n));
        }
        best
    }
}

fn p0_at(profile: &RadialProfile, n: i64) -> f64 {
    let nn1 = ((profile.n_degree - 1) as f64).ln();
    if n == 0 && profile.case != crate::tree::CaseTag::V2 {
        return profile.n_degree as f64;
    }
    let (up, dn) = if profile.case == crate::tree::CaseTag::V2 && n < 0 {
        (profile.mu_ln(n), nn1 + profile.mu_ln(n - 1))
    } else if profile.case == crate::tree::CaseTag::V2 || n > 0 {
        (nn1 + profile.mu_ln(n), profile.mu_ln(n - 1))
    } else {
        return profile.n_degree as f64;
    };
    let measure = log_sum_exp(&[up, dn]);
    (measure - profile.mu_ln(n)).exp().max((measure - profile.mu_ln(n - 1)).exp())
}

// ---------------------------------------------------------------------------
// Descent diagnostic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescentStep {
    pub vertex: usize,
    pub u: f64,
    pub laplacian: f64,
    pub grad: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescentTrace {
    pub steps: Vec<DescentStep>,
    /// True when the walk reached a vertex whose neighborhood is truncated.
    pub truncated: bool,
}

/// Follow `x_{n+1} = argmin_{y ~ x_n} u(y)` (ties to the smallest id),
/// recording `u`, `Δ_m u` and `|∇u|` along the way.
pub fn descent_sequence(
    g: &WeightedGraph,
    u: &VertexFunction,
    m: f64,
    x0: usize,
    max_steps: usize,
    boundary: Option<&BTreeSet<usize>>,
) -> Result<DescentTrace> {
    let g0 = g.gradient_norm(u, x0)?;
    if g0 == 0.0 {
        return Err(Error::Precondition(format!(
            "descent start needs |∇u(x0)| > 0, vertex {x0} has zero gradient"
        )));
    }
    let mut steps = Vec::new();
    let mut truncated = false;
    let mut x = x0;
    for _ in 0..max_steps {
        if boundary.is_some_and(|b| b.contains(&x)) {
            truncated = true;
            break;
        }
        steps.push(DescentStep {
            vertex: x,
            u: u.value(x)?,
            laplacian: g.m_laplacian(u, m, x)?,
            grad: g.gradient_norm(u, x)?,
        });
        let mut best: Option<(f64, usize)> = None;
        for &(y, _) in g.neighbors(x)? {
            let uy = u.value(y)?;
            match best {
                None => best = Some((uy, y)),
                Some((bu, by)) => {
                    if uy < bu || (uy == bu && y < by) {
                        best = Some((uy, y));
                    }
                }
            }
        }
        x = best.expect("connected graph has neighbors").1;
    }
    Ok(DescentTrace { steps, truncated })
}

// ---------------------------------------------------------------------------
// Parabolicity series
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub r_lo: usize,
    pub r_hi: usize,
    pub term: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesReport {
    pub terms: Vec<SeriesTerm>,
    /// Radius pairs skipped because the `W`-increment was not positive.
    pub skipped: Vec<(usize, usize)>,
}

/// Partial sums of `Σ ((r_{i+1}-r_i)^m / (W_o(r_{i+1}) - W_o(r_i)))^{1/(m-1)}`.
/// Divergence over the supplied radii is a trend, never a proof.
pub fn parabolicity_series(
    g: &WeightedGraph,
    o: usize,
    radii: &[usize],
    m: f64,
) -> Result<SeriesReport> {
    if !(m > 1.0) {
        return Err(Error::Parameter(format!("m must exceed 1, got {m}")));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("radii must be strictly increasing".into()));
    }
    let mut terms = Vec::new();
    let mut skipped = Vec::new();
    let mut partial = 0.0f64;
    for w in radii.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let dw = g.volume_w(o, hi)? - g.volume_w(o, lo)?;
        if dw <= 0.0 {
            skipped.push((lo, hi));
            continue;
        }
        let term = (((hi - lo) as f64).powf(m) / dw).powf(1.0 / (m - 1.0));
        partial += term;
        terms.push(SeriesTerm { r_lo: lo, r_hi: hi, term, partial_sum: partial });
    }
    Ok(SeriesReport { terms, skipped })
}
