//! Weighted graphs and the discrete differential operators.
//!
//! A [`WeightedGraph`] is an immutable, connected, locally finite graph with
//! symmetric strictly positive edge weights and a distinguished root. Edge
//! weights are kept as natural logs internally so that radially constructed
//! trees whose weights span thousands of orders of magnitude stay exactly
//! representable; every operator normalizes by the dominant incident weight
//! before exponentiating.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::lognum::{LogNum, LseAcc};
use crate::{Error, Result};

/// Edge weight on input: either the value itself or its natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeWeight {
    Linear(f64),
    Log(f64),
}

impl EdgeWeight {
    /// `(ln w, w)`; the linear value may flush to `0`/`inf` for extreme
    /// log inputs, which only the linear-scale reporting paths see.
    fn resolve(self) -> Result<(f64, f64)> {
        match self {
            EdgeWeight::Linear(w) => {
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidGraph(format!(
                        "edge weight must be strictly positive and finite, got {w}"
                    )));
                }
                Ok((w.ln(), w))
            }
            EdgeWeight::Log(lw) => {
                if !lw.is_finite() {
                    return Err(Error::InvalidGraph(format!(
                        "log edge weight must be finite, got {lw}"
                    )));
                }
                Ok((lw, lw.exp()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// ln of the (positive) weight.
    pub ln_w: f64,
    /// The weight itself, kept exactly as given for linear input.
    pub w: f64,
}

/// Immutable symmetric positively weighted graph with a root vertex.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_count: usize,
    root: usize,
    edges: Vec<Edge>,
    /// Per-vertex `(neighbor, ln weight)`, sorted by neighbor id.
    adjacency: Vec<Vec<(usize, f64)>>,
    /// Per-vertex `ln μ(x)` (log-sum-exp of incident log weights).
    ln_measure: Vec<f64>,
    /// Per-vertex `μ(x)` as a plain sum; exact on unit-weight graphs.
    measure: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(
        vertex_count: usize,
        root: usize,
        edge_list: &[(usize, usize, EdgeWeight)],
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        if root >= vertex_count {
            return Err(Error::InvalidVertex(root));
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut measure = vec![0.0f64; vertex_count];
        for &(u, v, w) in edge_list {
            if u >= vertex_count {
                return Err(Error::InvalidVertex(u));
            }
            if v >= vertex_count {
                return Err(Error::InvalidVertex(v));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge between {} and {}",
                    key.0, key.1
                )));
            }
            let (ln_w, w) = w.resolve()?;
            edges.push(Edge { u, v, ln_w, w });
            adjacency[u].push((v, ln_w));
            adjacency[v].push((u, ln_w));
            measure[u] += w;
            measure[v] += w;
        }
        for adj in &mut adjacency {
            adj.sort_unstable_by_key(|&(y, _)| y);
        }
        let ln_measure = adjacency
            .iter()
            .map(|adj| {
                let mut acc = LseAcc::new();
                for &(_, lw) in adj {
                    acc.push(lw);
                }
                acc.ln_total()
            })
            .collect::<Vec<_>>();
        let g = WeightedGraph { vertex_count, root, edges, adjacency, ln_measure, measure };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    fn is_connected(&self) -> bool {
        let dist = self.bfs_distances(self.root);
        dist.iter().all(|d| d.is_some())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> Result<&[(usize, f64)]> {
        self.adjacency.get(x).map(Vec::as_slice).ok_or(Error::InvalidVertex(x))
    }

    pub fn degree(&self, x: usize) -> Result<usize> {
        Ok(self.neighbors(x)?.len())
    }

    pub fn ln_edge_weight(&self, x: usize, y: usize) -> Result<f64> {
        let adj = self.neighbors(x)?;
        adj.binary_search_by_key(&y, |&(n, _)| n)
            .map(|i| adj[i].1)
            .map_err(|_| Error::Domain(format!("no edge between {x} and {y}")))
    }

    /// Vertex measure `μ(x) = Σ_{y~x} μ_xy`.
    pub fn vertex_measure(&self, x: usize) -> Result<f64> {
        self.measure.get(x).copied().ok_or(Error::InvalidVertex(x))
    }

    pub fn ln_vertex_measure(&self, x: usize) -> Result<f64> {
        self.ln_measure.get(x).copied().ok_or(Error::InvalidVertex(x))
    }

    /// Smallest `p_0 >= 1` with `μ_xy / μ(x) >= 1/p_0` on every ordered
    /// adjacent pair, i.e. `max_{x~y} μ(x)/μ_xy`.
    pub fn p0_constant(&self) -> f64 {
        let mut best = 1.0f64;
        for x in 0..self.vertex_count {
            let lm = self.ln_measure[x];
            for &(_, lw) in &self.adjacency[x] {
                best = best.max((lm - lw).exp());
            }
        }
        best
    }

    /// Hop distances from `o` by breadth-first traversal.
    pub fn bfs_distances(&self, o: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count];
        if o >= self.vertex_count {
            return dist;
        }
        let mut queue = VecDeque::new();
        dist[o] = Some(0);
        queue.push_back(o);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &(y, _) in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `B(o, n) = {x : d(o, x) <= n}`, sorted by vertex id.
    pub fn ball(&self, o: usize, n: usize) -> Result<Vec<usize>> {
        if o >= self.vertex_count {
            return Err(Error::InvalidVertex(o));
        }
        let dist = self.bfs_distances(o);
        Ok((0..self.vertex_count).filter(|&x| dist[x].is_some_and(|d| d <= n)).collect())
    }

    /// Ball volume `V_o(n) = Σ_{x ∈ B(o,n)} μ(x)`.
    pub fn volume_v(&self, o: usize, n: usize) -> Result<f64> {
        if o >= self.vertex_count {
            return Err(Error::InvalidVertex(o));
        }
        let dist = self.bfs_distances(o);
        Ok((0..self.vertex_count)
            .filter(|&x| dist[x].is_some_and(|d| d <= n))
            .map(|x| self.measure[x])
            .sum())
    }

    /// Outward-edge volume `W_o(n) = Σ μ_xy` over pairs with
    /// `x ∈ B(o,n)` and `d(o,x) < d(o,y)`. `W_o(0)` is the total outward
    /// edge weight at `o`.
    pub fn volume_w(&self, o: usize, n: usize) -> Result<f64> {
        if o >= self.vertex_count {
            return Err(Error::InvalidVertex(o));
        }
        let dist = self.bfs_distances(o);
        Ok(self
            .edges
            .iter()
            .filter(|e| {
                let (du, dv) = (dist[e.u].unwrap(), dist[e.v].unwrap());
                du != dv && du.min(dv) <= n
            })
            .map(|e| e.w)
            .sum())
    }
}

/// Representation of the per-vertex values of a [`VertexFunction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueRepr {
    Linear,
    /// Values are `ln u`; requires `u > 0` everywhere.
    Log,
}

/// A real-valued function on the vertex set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexFunction {
    pub repr: ValueRepr,
    pub values: Vec<f64>,
}

impl VertexFunction {
    pub fn linear(values: Vec<f64>) -> Self {
        VertexFunction { repr: ValueRepr::Linear, values }
    }

    /// Build a log-form function from `ln u` values; all must be finite.
    pub fn log(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("log-form value must be finite, got {bad}")));
        }
        Ok(VertexFunction { repr: ValueRepr::Log, values })
    }

    pub fn constant(c: f64, n: usize) -> Self {
        Self::linear(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of `u(x)` in linear scale.
    pub fn value(&self, x: usize) -> Result<f64> {
        let v = *self.values.get(x).ok_or(Error::InvalidVertex(x))?;
        Ok(match self.repr {
            ValueRepr::Linear => v,
            ValueRepr::Log => v.exp(),
        })
    }

    /// `u(x)` as a signed log-domain number.
    pub fn log_value(&self, x: usize) -> Result<LogNum> {
        let v = *self.values.get(x).ok_or(Error::InvalidVertex(x))?;
        Ok(match self.repr {
            ValueRepr::Linear => LogNum::from_f64(v),
            ValueRepr::Log => LogNum::from_ln(v),
        })
    }

    /// `u(y) - u(x)` as a signed log-domain number, stable in log form.
    pub fn difference(&self, y: usize, x: usize) -> Result<LogNum> {
        match self.repr {
            ValueRepr::Linear => {
                let vy = *self.values.get(y).ok_or(Error::InvalidVertex(y))?;
                let vx = *self.values.get(x).ok_or(Error::InvalidVertex(x))?;
                Ok(LogNum::from_f64(vy - vx))
            }
            ValueRepr::Log => {
                let ly = *self.values.get(y).ok_or(Error::InvalidVertex(y))?;
                let lx = *self.values.get(x).ok_or(Error::InvalidVertex(x))?;
                // u(y) - u(x) = e^max (± (1 - e^{-|ly-lx|}))
                if ly == lx {
                    return Ok(LogNum::ZERO);
                }
                let (hi, sign) = if ly > lx { (ly, 1) } else { (lx, -1) };
                let d = -(ly - lx).abs();
                let mag = -d.exp_m1(); // 1 - e^d in (0, 1]
                Ok(LogNum::from_sign_ln(sign, hi + mag.ln()))
            }
        }
    }

    fn check_domain(&self, g: &WeightedGraph) -> Result<()> {
        if self.values.len() != g.vertex_count() {
            return Err(Error::Domain(format!(
                "function defined on {} vertices but graph has {}",
                self.values.len(),
                g.vertex_count()
            )));
        }
        Ok(())
    }
}

/// Outcome of the supersolution residual `Δ_m u(x) + u(x)^p |∇u(x)|^q`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Residual {
    /// The raw residual value; `+inf` when the zero-gradient convention
    /// with `q < 0` fires.
    pub value: f64,
    /// `Δ_m u(x)`.
    pub laplacian: f64,
    /// `u(x)^p |∇u(x)|^q`.
    pub reaction: f64,
    /// Residual divided by `max(|Δ_m u|, u^p|∇u|^q)`; 0 when both vanish.
    pub normalized: f64,
}

impl WeightedGraph {
    /// Nonlinear m-Laplacian
    /// `Δ_m u(x) = (1/μ(x)) Σ_{y~x} μ_xy |u(y)-u(x)|^{m-2} (u(y)-u(x))`.
    pub fn m_laplacian(&self, u: &VertexFunction, m: f64, x: usize) -> Result<f64> {
        Ok(self.m_laplacian_log(u, m, x)?.to_f64())
    }

    pub fn m_laplacian_log(&self, u: &VertexFunction, m: f64, x: usize) -> Result<LogNum> {
        if !(m > 1.0) {
            return Err(Error::Parameter(format!("m must exceed 1, got {m}")));
        }
        u.check_domain(self)?;
        let lmx = self.ln_vertex_measure(x)?;
        let mut total = LogNum::ZERO;
        for &(y, lw) in self.neighbors(x)? {
            let diff = u.difference(y, x)?;
            // μ_xy/μ(x) * |Δ|^{m-2} Δ = exp(lw - lmx) * sign(Δ) |Δ|^{m-1}
            let term = LogNum::from_sign_ln(diff.sign, lw - lmx + (m - 1.0) * diff.ln_abs);
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Gradient form `Γ(f,h)(x) = Σ_{y~x} (μ_xy / 2μ(x)) (f(y)-f(x))(h(y)-h(x))`.
    pub fn gradient_form(
        &self,
        f: &VertexFunction,
        h: &VertexFunction,
        x: usize,
    ) -> Result<f64> {
        f.check_domain(self)?;
        h.check_domain(self)?;
        let lmx = self.ln_vertex_measure(x)?;
        let mut total = LogNum::ZERO;
        for &(y, lw) in self.neighbors(x)? {
            let df = f.difference(y, x)?;
            let dh = h.difference(y, x)?;
            let coeff = LogNum::from_ln(lw - lmx - std::f64::consts::LN_2);
            total = total.add(&coeff.mul(&df).mul(&dh));
        }
        Ok(total.to_f64())
    }

    /// `|∇u(x)| = sqrt(Γ(u,u)(x))`.
    pub fn gradient_norm(&self, u: &VertexFunction, x: usize) -> Result<f64> {
        Ok(self.gradient_norm_log(u, x)?.to_f64())
    }

    pub fn gradient_norm_log(&self, u: &VertexFunction, x: usize) -> Result<LogNum> {
        u.check_domain(self)?;
        let lmx = self.ln_vertex_measure(x)?;
        let mut acc = LseAcc::new();
        for &(y, lw) in self.neighbors(x)? {
            let du = u.difference(y, x)?;
            if !du.is_zero() {
                acc.push(lw - lmx - std::f64::consts::LN_2 + 2.0 * du.ln_abs);
            }
        }
        let ln_sq = acc.ln_total();
        if ln_sq == f64::NEG_INFINITY {
            Ok(LogNum::ZERO)
        } else {
            Ok(LogNum::from_ln(0.5 * ln_sq))
        }
    }

    /// Residual of the supersolution inequality at `x`.
    ///
    /// Conventions for a vanishing gradient: the reaction term is 0 when
    /// `q > 0`, the factor `|∇u|^q` is 1 when `q = 0`, and the residual is
    /// flagged `+inf` when `q < 0`.
    pub fn residual(
        &self,
        u: &VertexFunction,
        m: f64,
        p: f64,
        q: f64,
        x: usize,
    ) -> Result<Residual> {
        let ux = u.log_value(x)?;
        if ux.sign <= 0 {
            return Err(Error::Domain(format!(
                "residual requires u > 0 at vertex {x}, got {}",
                ux.to_f64()
            )));
        }
        let lap = self.m_laplacian_log(u, m, x)?;
        let grad = self.gradient_norm_log(u, x)?;
        let reaction = if grad.is_zero() {
            if q > 0.0 {
                LogNum::ZERO
            } else if q == 0.0 {
                LogNum::from_ln(p * ux.ln_abs)
            } else {
                return Ok(Residual {
                    value: f64::INFINITY,
                    laplacian: lap.to_f64(),
                    reaction: f64::INFINITY,
                    normalized: f64::INFINITY,
                });
            }
        } else {
            LogNum::from_ln(p * ux.ln_abs + q * grad.ln_abs)
        };
        Ok(compose_residual(lap, reaction))
    }
}

/// Combine the two residual terms with scale-free normalization.
pub(crate) fn compose_residual(lap: LogNum, reaction: LogNum) -> Residual {
    let total = lap.add(&reaction);
    let scale = lap.ln_abs.max(reaction.ln_abs);
    let normalized = if scale == f64::NEG_INFINITY {
        0.0
    } else {
        f64::from(lap.sign) * (lap.ln_abs - scale).exp()
            + f64::from(reaction.sign) * (reaction.ln_abs - scale).exp()
    };
    Residual {
        value: total.to_f64(),
        laplacian: lap.to_f64(),
        reaction: reaction.to_f64(),
        normalized,
    }
}

/// Chain of complete graphs `K_2, K_3, ..., K_max` where one vertex of each
/// `K_r` is identified with one vertex of `K_{r+1}`, rooted at the free
/// vertex of `K_2` (the only vertex of degree 1), all weights 1.
pub fn clique_chain(max_clique: usize) -> Result<WeightedGraph> {
    if max_clique < 2 {
        return Err(Error::Parameter("clique chain needs max_clique >= 2".into()));
    }
    let mut edges: Vec<(usize, usize, EdgeWeight)> = Vec::new();
    let mut next_id = 2usize; // 0 = root, 1 = joint of K_2 and K_3
    let mut joint = 1usize;
    edges.push((0, 1, EdgeWeight::Linear(1.0)));
    for r in 3..=max_clique {
        // K_r reuses `joint` and adds r-1 fresh vertices; the new far joint
        // is the last fresh vertex.
        let fresh: Vec<usize> = (0..r - 1).map(|k| next_id + k).collect();
        next_id += r - 1;
        let mut verts = vec![joint];
        verts.extend(&fresh);
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                edges.push((verts[i], verts[j], EdgeWeight::Linear(1.0)));
            }
        }
        joint = *fresh.last().unwrap();
    }
    WeightedGraph::new(next_id, 0, &edges)
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertex_count: usize,
    root: usize,
    edges: Vec<(usize, usize, serde_json::Value)>,
}

/// Parse the graph JSON format: weights are decimal strings, numbers, or
/// `{"log": value}` objects.
pub fn graph_from_json(text: &str) -> Result<WeightedGraph> {
    let raw: GraphJson = serde_json::from_str(text)?;
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (u, v, w) in raw.edges {
        let weight = match &w {
            serde_json::Value::String(s) => EdgeWeight::Linear(
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidGraph(format!("bad weight {s:?}: {e}")))?,
            ),
            serde_json::Value::Number(n) => EdgeWeight::Linear(
                n.as_f64().ok_or_else(|| Error::InvalidGraph(format!("bad weight {n}")))?,
            ),
            serde_json::Value::Object(map) => {
                let lv = map
                    .get("log")
                    .and_then(serde_json::Value::as_f64)
                    .ok_or_else(|| Error::InvalidGraph("weight object needs a \"log\" key".into()))?;
                EdgeWeight::Log(lv)
            }
            other => {
                return Err(Error::InvalidGraph(format!("unsupported weight encoding: {other}")))
            }
        };
        edges.push((u, v, weight));
    }
    WeightedGraph::new(raw.vertex_count, raw.root, &edges)
}

/// Serialize a graph to the interchange JSON, weights as `{"log": ...}`.
pub fn graph_to_json(g: &WeightedGraph) -> String {
    let edges: Vec<serde_json::Value> = g
        .edges()
        .iter()
        .map(|e| serde_json::json!([e.u, e.v, { "log": e.ln_w }]))
        .collect();
    let obj = serde_json::json!({
        "vertex_count": g.vertex_count(),
        "root": g.root(),
        "edges": edges,
    });
    serde_json::to_string_pretty(&obj).expect("graph json")
}

/// Parse a vertex-function JSON: `{"repr": "linear"|"log", "values": [...]}`.
pub fn function_from_json(text: &str) -> Result<VertexFunction> {
    let f: VertexFunction = serde_json::from_str(text)?;
    if f.repr == ValueRepr::Log {
        VertexFunction::log(f.values)
    } else {
        Ok(f)
    }
}

/// Map of named small test graphs used across examples and docs.
pub fn star_graph(spokes: usize) -> WeightedGraph {
    let edges: Vec<_> =
        (1..=spokes).map(|k| (0usize, k, EdgeWeight::Linear(1.0))).collect();
    WeightedGraph::new(spokes + 1, 0, &edges).expect("star graph")
}

/// Unit-weight homogeneous tree `T_N` truncated at `depth`, root 0.
/// Level sizes are `1, N, N(N-1), N(N-1)^2, ...`.
pub fn unit_tree(n_degree: usize, depth: usize) -> Result<WeightedGraph> {
    if n_degree < 3 {
        return Err(Error::Parameter("homogeneous tree needs N >= 3".into()));
    }
    let mut edges = Vec::new();
    let mut level: Vec<usize> = vec![0];
    let mut next = 1usize;
    for d in 0..depth {
        let children_each = if d == 0 { n_degree } else { n_degree - 1 };
        let mut new_level = Vec::with_capacity(level.len() * children_each);
        for &parent in &level {
            for _ in 0..children_each {
                edges.push((parent, next, EdgeWeight::Linear(1.0)));
                new_level.push(next);
                next += 1;
            }
        }
        level = new_level;
        if next > 2_000_000 {
            return Err(Error::SizeGuard(format!("unit tree would exceed {next} vertices")));
        }
    }
    WeightedGraph::new(next, 0, &edges)
}

/// Group vertices by BFS distance from `o`.
pub fn spheres(g: &WeightedGraph, o: usize) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, d) in g.bfs_distances(o).iter().enumerate() {
        if let Some(d) = d {
            out.entry(*d).or_default().push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge(w: f64) -> WeightedGraph {
        WeightedGraph::new(2, 0, &[(0, 1, EdgeWeight::Linear(w))]).unwrap()
    }

    #[test]
    fn vertex_measure_examples() {
        let star = star_graph(3);
        assert_eq!(star.vertex_measure(0).unwrap(), 3.0);
        let e = single_edge(2.5);
        assert_eq!(e.vertex_measure(0).unwrap(), 2.5);
        assert_eq!(e.vertex_measure(1).unwrap(), 2.5);
        // Example-2.2 chain: the K_3/K_4 joint has 2 edges inside K_3 and
        // 3 inside K_4.
        let chain = clique_chain(6).unwrap();
        let dist = chain.bfs_distances(0);
        let joint34 = (0..chain.vertex_count())
            .find(|&x| dist[x] == Some(2) && chain.degree(x).unwrap() == 5)
            .expect("K3/K4 joint");
        assert_eq!(chain.vertex_measure(joint34).unwrap(), 5.0);
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(WeightedGraph::new(2, 0, &[(0, 0, EdgeWeight::Linear(1.0))]).is_err());
        assert!(WeightedGraph::new(2, 0, &[(0, 1, EdgeWeight::Linear(-1.0))]).is_err());
        assert!(WeightedGraph::new(
            2,
            0,
            &[(0, 1, EdgeWeight::Linear(1.0)), (1, 0, EdgeWeight::Linear(2.0))]
        )
        .is_err());
        // disconnected
        assert!(WeightedGraph::new(3, 0, &[(0, 1, EdgeWeight::Linear(1.0))]).is_err());
        assert!(single_edge(1.0).vertex_measure(7).is_err());
    }

    #[test]
    fn m_laplacian_basics() {
        let g = single_edge(1.0);
        // constant function vanishes for any m
        for m in [1.5, 2.0, 3.0, 4.0] {
            let u = VertexFunction::constant(4.2, 2);
            assert_eq!(g.m_laplacian(&u, m, 0).unwrap(), 0.0);
            assert_eq!(g.m_laplacian(&u, m, 1).unwrap(), 0.0);
        }
        // single unit edge, u = (0,2), m = 3 at the 0 endpoint: |2|^1 * 2 = 4
        let u = VertexFunction::linear(vec![0.0, 2.0]);
        assert!((g.m_laplacian(&u, 3.0, 0).unwrap() - 4.0).abs() < 1e-12);
        assert!(g.m_laplacian(&u, 1.0, 0).is_err());
        assert!(g.m_laplacian(&u, 0.5, 0).is_err());
    }

    #[test]
    fn gradient_form_and_norm_examples() {
        let g = single_edge(1.0);
        let f = VertexFunction::linear(vec![0.0, 1.0]);
        let h = VertexFunction::linear(vec![0.0, 3.0]);
        assert!((g.gradient_form(&f, &h, 0).unwrap() - 1.5).abs() < 1e-12);
        assert!((g.gradient_form(&h, &f, 0).unwrap() - 1.5).abs() < 1e-12);
        assert!(g.gradient_form(&f, &VertexFunction::constant(9.0, 2), 0).unwrap().abs() < 1e-15);
        assert!((g.gradient_norm(&f, 0).unwrap() - (0.5f64).sqrt()).abs() < 1e-12);

        let star = star_graph(7);
        let mut vals = vec![0.0; 8];
        for v in vals.iter_mut().skip(1) {
            *v = 1.0;
        }
        let u = VertexFunction::linear(vals);
        assert!((star.gradient_norm(&u, 0).unwrap() - (0.5f64).sqrt()).abs() < 1e-12);
        assert!(star.gradient_norm(&VertexFunction::constant(1.0, 8), 0).unwrap() == 0.0);
    }

    #[test]
    fn log_form_matches_linear() {
        let g = star_graph(4);
        let lin = VertexFunction::linear(vec![2.0, 0.5, 1.25, 3.0, 0.75]);
        let log =
            VertexFunction::log(lin.values.iter().map(|v| v.ln()).collect()).unwrap();
        for x in 0..5 {
            let a = g.m_laplacian(&lin, 2.7, x).unwrap();
            let b = g.m_laplacian(&log, 2.7, x).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
            let ga = g.gradient_norm(&lin, x).unwrap();
            let gb = g.gradient_norm(&log, x).unwrap();
            assert!((ga - gb).abs() <= 1e-12 * ga.max(1.0));
        }
    }

    #[test]
    fn p0_examples() {
        // unit homogeneous tree T_N: μ(x) = N interior, μ_xy = 1
        let t3 = unit_tree(3, 4).unwrap();
        assert!((t3.p0_constant() - 3.0).abs() < 1e-12);
        assert!((single_edge(5.0).p0_constant() - 1.0).abs() < 1e-12);
        // chain truncated at K_5: max degree is the K_4/K_5 joint, 3+4=7
        let chain = clique_chain(5).unwrap();
        assert!((chain.p0_constant() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn balls_and_distances() {
        let chain = clique_chain(6).unwrap();
        assert_eq!(chain.ball(0, 0).unwrap(), vec![0]);
        let t3 = unit_tree(3, 3).unwrap();
        assert_eq!(t3.ball(0, 1).unwrap().len(), 4);
        // chain at n=2: root, K2/K3 joint, and the two remaining K_3 vertices
        assert_eq!(chain.ball(0, 2).unwrap().len(), 4);
        // balls nest
        for n in 0..4 {
            let inner = chain.ball(0, n).unwrap();
            let outer = chain.ball(0, n + 1).unwrap();
            assert!(inner.iter().all(|v| outer.contains(v)));
        }
    }

    #[test]
    fn volumes_on_small_graphs() {
        let e = single_edge(0.25);
        assert!((e.volume_v(0, 0).unwrap() - 0.25).abs() < 1e-15);
        assert!((e.volume_w(0, 0).unwrap() - 0.25).abs() < 1e-15);
        let t3 = unit_tree(3, 3).unwrap();
        // W_o(2) = 3 + 6 + 12 = 21 outward edges level by level
        assert_eq!(t3.volume_w(0, 2).unwrap(), 21.0);
        for n in 0..3 {
            assert!(t3.volume_w(0, n).unwrap() <= t3.volume_v(0, n).unwrap());
        }
    }

    #[test]
    fn clique_chain_volumes() {
        let chain = clique_chain(12).unwrap();
        // W_o(n) = (n+1)(n+2)/2
        for n in 0..=9 {
            let w = chain.volume_w(0, n).unwrap();
            let expect = ((n + 1) * (n + 2) / 2) as f64;
            assert_eq!(w, expect, "W_o({n})");
        }
        // sphere measure at distance n is n^2 + n + 1 (the joint of K_{n+1}
        // and K_{n+2} has degree 2n+1, plus n-1 internals of degree n each)
        for n in 2..=9usize {
            let inc = chain.volume_v(0, n).unwrap() - chain.volume_v(0, n - 1).unwrap();
            assert_eq!(inc, (n * n + n + 1) as f64, "V increment at {n}");
        }
    }

    #[test]
    fn residual_conventions() {
        let t3 = unit_tree(3, 2).unwrap();
        let one = VertexFunction::constant(1.0, t3.vertex_count());
        let r = t3.residual(&one, 2.0, 1.0, 1.0, 0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.normalized, 0.0);
        let r0 = t3.residual(&one, 2.0, 1.0, 0.0, 0).unwrap();
        assert_eq!(r0.value, 1.0); // q = 0: factor 1, residual u^p = 1
        let rneg = t3.residual(&one, 2.0, 1.0, -1.0, 0).unwrap();
        assert!(rneg.value.is_infinite());
        let zero = VertexFunction::constant(0.0, t3.vertex_count());
        assert!(t3.residual(&zero, 2.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn graph_json_roundtrip() {
        let g = clique_chain(5).unwrap();
        let text = graph_to_json(&g);
        let h = graph_from_json(&text).unwrap();
        assert_eq!(g.vertex_count(), h.vertex_count());
        assert_eq!(g.edges().len(), h.edges().len());
        for (a, b) in g.edges().iter().zip(h.edges()) {
            assert_eq!((a.u, a.v), (b.u, b.v));
            assert!((a.ln_w - b.ln_w).abs() < 1e-15);
        }
        // string and plain-number weights parse too
        let j = r#"{"vertex_count":2,"root":0,"edges":[[0,1,"2.5"]]}"#;
        let g2 = graph_from_json(j).unwrap();
        assert!((g2.vertex_measure(0).unwrap() - 2.5).abs() < 1e-15);
        let j3 = r#"{"vertex_count":2,"root":0,"edges":[[0,1,{"log":0.0}]]}"#;
        assert!(graph_from_json(j3).is_ok());
        let bad = r#"{"vertex_count":2,"root":0,"edges":[[0,0,"1.0"]]}"#;
        assert!(graph_from_json(bad).is_err());
    }
}
