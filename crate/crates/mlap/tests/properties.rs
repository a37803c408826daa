//! Property suites: operator identities against brute-force oracles on
//! random small graphs, classifier totality, and construction invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlap::graph::{unit_tree, EdgeWeight};
use mlap::params::{
    classify_g, classify_k, exponents, g_region_contains, proof_t_schedule, GRegion,
    KRegion, ParamTriple,
};
use mlap::tree::{
    lambda1, lambda1_limit, lambda3, lambda3_limit, lambda4, lambda4_limit, make_profile,
    radial_residual, CaseTag, SearchOpts,
};
use mlap::verify::harnack_check_profile;
use mlap::{VertexFunction, WeightedGraph};

const ALL_REGIONS: [GRegion; 7] = [
    GRegion::G1,
    GRegion::G2,
    GRegion::G3,
    GRegion::G4,
    GRegion::G5_1,
    GRegion::G5_2,
    GRegion::G6,
];

/// Random connected graph: spanning tree plus extra edges, weights in
/// `[0.1, 10]`.
fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> WeightedGraph {
    let n = rng.gen_range(2..=max_vertices);
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, EdgeWeight::Linear(rng.gen_range(0.1..=10.0))));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((key.0, key.1, EdgeWeight::Linear(rng.gen_range(0.1..=10.0))));
        }
    }
    WeightedGraph::new(n, 0, &edges).unwrap()
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> VertexFunction {
    VertexFunction::linear((0..n).map(|_| rng.gen_range(0.05..=5.0)).collect())
}

/// Direct-summation oracle for the m-Laplacian, written against the plain
/// definition with linear arithmetic only.
fn m_laplacian_oracle(g: &WeightedGraph, u: &[f64], m: f64, x: usize) -> f64 {
    let mu_x: f64 = g.neighbors(x).unwrap().iter().map(|&(_, lw)| lw.exp()).sum();
    let mut s = 0.0;
    for &(y, lw) in g.neighbors(x).unwrap() {
        let d: f64 = u[y] - u[x];
        s += lw.exp() * d.abs().powf(m - 2.0) * d;
    }
    s / mu_x
}

fn gradient_norm_oracle(g: &WeightedGraph, u: &[f64], x: usize) -> f64 {
    let mu_x: f64 = g.neighbors(x).unwrap().iter().map(|&(_, lw)| lw.exp()).sum();
    let mut s = 0.0;
    for &(y, lw) in g.neighbors(x).unwrap() {
        let d: f64 = u[y] - u[x];
        s += lw.exp() / (2.0 * mu_x) * d * d;
    }
    s.sqrt()
}

#[test]
fn operators_match_oracles_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6c6170);
    for _ in 0..300 {
        let g = random_graph(&mut rng, 12);
        let u = random_function(&mut rng, g.vertex_count());
        let m = rng.gen_range(1.01..=4.0);
        for x in 0..g.vertex_count() {
            let got = g.m_laplacian(&u, m, x).unwrap();
            let want = m_laplacian_oracle(&g, &u.values, m, x);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1e-12),
                "Δ_m mismatch at {x}: {got} vs {want}"
            );
            let got = g.gradient_norm(&u, x).unwrap();
            let want = gradient_norm_oracle(&g, &u.values, x);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-12));
            // Δ_2 against the standard weighted Laplacian
            let got2 = g.m_laplacian(&u, 2.0, x).unwrap();
            let want2 = m_laplacian_oracle(&g, &u.values, 2.0, x);
            assert!((got2 - want2).abs() <= 1e-12 * want2.abs().max(1e-12));
        }
    }
}

#[test]
fn gradient_form_symmetric_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 10);
        let n = g.vertex_count();
        let f = random_function(&mut rng, n);
        let h = random_function(&mut rng, n);
        let k = random_function(&mut rng, n);
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let combo = VertexFunction::linear(
            (0..n).map(|i| a * f.values[i] + b * h.values[i]).collect(),
        );
        for x in 0..n {
            let fh = g.gradient_form(&f, &h, x).unwrap();
            let hf = g.gradient_form(&h, &f, x).unwrap();
            assert!((fh - hf).abs() <= 1e-12 * fh.abs().max(1.0));
            let lin = g.gradient_form(&combo, &k, x).unwrap();
            let split = a * g.gradient_form(&f, &k, x).unwrap()
                + b * g.gradient_form(&h, &k, x).unwrap();
            assert!(
                (lin - split).abs() <= 1e-12 * lin.abs().max(1.0),
                "bilinearity at {x}: {lin} vs {split}"
            );
            assert!(g.gradient_form(&f, &f, x).unwrap() >= 0.0);
        }
    }
}

#[test]
fn edge_gradient_bounded_by_sqrt_2p0() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = random_graph(&mut rng, 10);
        let u = random_function(&mut rng, g.vertex_count());
        let bound = (2.0 * g.p0_constant()).sqrt();
        for x in 0..g.vertex_count() {
            let grad = g.gradient_norm(&u, x).unwrap();
            for &(y, _) in g.neighbors(x).unwrap() {
                let edge = (u.values[y] - u.values[x]).abs();
                assert!(
                    edge <= bound * grad * (1.0 + 1e-12) + 1e-300,
                    "|∇_xy u| = {edge} exceeds sqrt(2 p0)|∇u| = {}",
                    bound * grad
                );
            }
        }
    }
}

#[test]
fn volumes_nested_and_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let g = random_graph(&mut rng, 12);
        let o = rng.gen_range(0..g.vertex_count());
        let mut last_v = 0.0;
        let mut last_w = 0.0;
        let mut last_ball = Vec::new();
        for n in 0..6 {
            let ball = g.ball(o, n).unwrap();
            assert!(last_ball.iter().all(|v| ball.contains(v)));
            let v = g.volume_v(o, n).unwrap();
            let w = g.volume_w(o, n).unwrap();
            assert!(w <= v + 1e-12 * v, "W = {w} > V = {v}");
            assert!(v >= last_v && w >= last_w);
            last_v = v;
            last_w = w;
            last_ball = ball;
        }
        // hop distance satisfies the triangle inequality on sampled triples
        let d0 = g.bfs_distances(o);
        for _ in 0..10 {
            let a = rng.gen_range(0..g.vertex_count());
            let b = rng.gen_range(0..g.vertex_count());
            let da = g.bfs_distances(a);
            assert!(d0[b].unwrap() <= d0[a].unwrap() + da[b].unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn classifier_total_and_disjoint(
        p in -5.0f64..5.0,
        q in -5.0f64..5.0,
        mi in 0usize..3,
    ) {
        let m = [1.5, 2.0, 3.5][mi];
        let pt = ParamTriple::new(m, p, q).unwrap();
        let region = classify_g(pt);
        let mut hits = 0;
        for r in ALL_REGIONS {
            if g_region_contains(r, pt) {
                hits += 1;
                prop_assert_eq!(r, region);
            }
        }
        prop_assert_eq!(hits, 1);
    }

    #[test]
    fn k_interval_admits_valid_exponents(
        p in -5.0f64..5.0,
        q in -5.0f64..5.0,
        mi in 0usize..3,
        frac in 0.05f64..0.95,
    ) {
        let m = [1.5, 2.0, 3.5][mi];
        let pt = ParamTriple::new(m, p, q).unwrap();
        let (k, interval) = classify_k(pt);
        prop_assume!(k != KRegion::OnCriticalLine);
        let iv = interval.unwrap();
        let t = match iv.upper {
            Some(hi) => iv.lower + frac * (hi - iv.lower),
            None => iv.lower + frac * 10.0,
        };
        prop_assume!(t != pt.p + pt.q);
        let e = exponents(pt, t, 0.0).unwrap();
        // the first two admissibility ratios strictly exceed 1 inside the
        // interval
        prop_assert!(e.b > 1.0, "b = {} at t = {t} in {k:?}", e.b);
        prop_assert!(e.gamma > 1.0, "γ = {} at t = {t} in {k:?}", e.gamma);
        prop_assert!(e.rho > 1.0);
        prop_assert!(e.a >= 1.0);
    }
}

#[test]
fn schedules_approach_interval_boundary_monotonically() {
    let cases = [
        ParamTriple::new(2.0, 1.0, 1.0).unwrap(),
        ParamTriple::new(2.0, 1.0, 3.0).unwrap(),
        ParamTriple::new(2.0, -3.0, 3.0).unwrap(),
        ParamTriple::new(2.0, -1.0, 1.5).unwrap(),
        ParamTriple::new(2.0, -0.8, 1.5).unwrap(),
    ];
    for pt in cases {
        let (_, iv) = classify_k(pt);
        let iv = iv.unwrap();
        let ts: Vec<f64> =
            (2..60).map(|i| proof_t_schedule(pt, i, None).unwrap().t).collect();
        // distance to the approached endpoint shrinks monotonically
        let target = if (ts[1] - iv.lower).abs() < (ts[0] - iv.lower).abs() {
            iv.lower
        } else {
            iv.upper.unwrap()
        };
        for w in ts.windows(2) {
            assert!((w[1] - target).abs() < (w[0] - target).abs(), "{pt:?}");
        }
    }
}

fn corpus() -> Vec<mlap::RadialProfile> {
    let opts = SearchOpts::default();
    vec![
        make_profile(CaseTag::I, ParamTriple::new(2.0, 1.0, 1.0).unwrap(), 3, Some(1.0), 200, &opts).unwrap(),
        make_profile(CaseTag::I, ParamTriple::new(2.0, 1.0, 1.0).unwrap(), 4, Some(0.5), 200, &opts).unwrap(),
        make_profile(CaseTag::II, ParamTriple::new(2.0, 0.0, 3.0).unwrap(), 3, Some(1.0), 200, &opts).unwrap(),
        make_profile(CaseTag::III, ParamTriple::new(2.0, -1.0, 1.5).unwrap(), 3, Some(1.0), 200, &opts).unwrap(),
        make_profile(CaseTag::IV, ParamTriple::new(2.0, -1.0, 1.0).unwrap(), 3, Some(1.0), 200, &opts).unwrap(),
        make_profile(CaseTag::V1, ParamTriple::new(2.0, 0.5, 0.5).unwrap(), 3, None, 200, &opts).unwrap(),
        make_profile(CaseTag::V2, ParamTriple::new(2.0, 2.0, -1.0).unwrap(), 3, None, 200, &opts).unwrap(),
        make_profile(CaseTag::V1, ParamTriple::new(1.5, 0.25, 0.25).unwrap(), 3, None, 200, &opts).unwrap(),
    ]
}

#[test]
fn corpus_profiles_are_supersolutions_with_harnack() {
    for profile in corpus() {
        let (lo, hi) = profile.index_range();
        for n in lo..=hi {
            let r = radial_residual(&profile, n).unwrap();
            assert!(
                r.normalized <= 1e-9,
                "case {} level {n}: residual {}",
                profile.case,
                r.normalized
            );
        }
        // every positive supersolution on a (p0)-graph obeys the edge
        // Harnack bound with p1 from that p0
        let h = harnack_check_profile(&profile);
        assert!(
            h.ok,
            "case {}: ratio {} exceeds p1 {}",
            profile.case,
            h.worst_ratio,
            h.p1
        );
    }
}

#[test]
fn lambda_gap_eventually_monotone_on_geometric_grid() {
    let seed = 0f64;
    let p1 = ParamTriple::new(2.0, 1.0, 1.0).unwrap();
    let l1 = lambda1_limit(p1, 1.0).unwrap();
    let mut gaps: Vec<f64> = Vec::new();
    let mut n = 64u64;
    while n <= 1 << 22 {
        gaps.push((lambda1(&seed, p1, 1.0, n).unwrap() - l1).abs());
        n *= 2;
    }
    for w in gaps.windows(2).skip(2) {
        assert!(w[1] < w[0], "Λ_1 gaps not shrinking: {gaps:?}");
    }

    let p3 = ParamTriple::new(2.0, -1.0, 1.5).unwrap();
    let l3 = lambda3_limit(p3, 1.0).unwrap();
    let mut gaps: Vec<f64> = Vec::new();
    let mut n = 64u64;
    while n <= 1 << 22 {
        gaps.push((lambda3(&seed, p3, 1.0, n).unwrap() - l3).abs());
        n *= 2;
    }
    for w in gaps.windows(2).skip(2) {
        assert!(w[1] < w[0], "Λ_3 gaps not shrinking: {gaps:?}");
    }

    let p4 = ParamTriple::new(2.0, -1.0, 1.0).unwrap();
    let l4 = lambda4_limit(2.0, 1.0);
    let mut gaps: Vec<f64> = Vec::new();
    let mut n = 64u64;
    while n <= 1 << 16 {
        gaps.push((lambda4(&seed, p4, 1.0, n) - l4).abs());
        n *= 2;
    }
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "Λ_4 gaps not shrinking: {gaps:?}");
    }
}

#[test]
fn tree_volume_against_unit_oracle() {
    // the radial W sum on a profile with flat weights must agree with the
    // explicit unit tree: cross-representation oracle
    let t3 = unit_tree(3, 6).unwrap();
    for n in 0..5usize {
        let direct = t3.volume_w(0, n).unwrap();
        let closed = 3.0 * (2f64.powi(n as i32 + 1) - 1.0);
        assert_eq!(direct, closed);
    }
}
