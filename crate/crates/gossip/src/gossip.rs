//! Randomized gossip protocols as node-local updates driven by a seeded clock.
//!
//! Each single-edge and single-node protocol performs exactly the floating
//! point operations of the matching solver step on its consensus system, so
//! trajectories agree bit for bit under a shared random stream. Block and
//! dual protocols agree up to rounding.

use std::f64::consts::FRAC_1_SQRT_2;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sketchgossip_core::accelerated::AccParams;
use sketchgossip_core::linalg::{pseudoinverse, DenseMatrix};
use sketchgossip_core::sketch::{partial_fisher_yates, Sketch, SketchDistribution};
use sketchgossip_core::solver::{trial_rng, Stopping};
use sketchgossip_core::system::expected_objective;
use sketchgossip_core::{LinearSystem, Trace};

use crate::error::{param, GossipError, Result};
use crate::graph::{self, Network};

/// Atom budget above which `f` is not recorded.
const F_METRIC_SUPPORT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeSampling {
    /// `p_i ∝ ‖L_{i:}‖²_{B⁻¹}`
    RowNorms,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GossipProtocol {
    Pairwise {
        omega: f64,
    },
    WeightedPairwise {
        omega: f64,
        weights: Vec<f64>,
    },
    LaplacianNode {
        omega: f64,
        weights: Option<Vec<f64>>,
        sampling: NodeSampling,
    },
    Block {
        tau: usize,
        omega: f64,
        beta: f64,
    },
    PairwiseMomentum {
        omega: f64,
        beta: f64,
    },
    AccGossip(AccParams),
    DualRnm {
        tau: usize,
    },
}

impl GossipProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pairwise { .. } => "pairwise",
            Self::WeightedPairwise { .. } => "weighted",
            Self::LaplacianNode { .. } => "laplacian",
            Self::Block { .. } => "block",
            Self::PairwiseMomentum { .. } => "momentum",
            Self::AccGossip(_) => "acc",
            Self::DualRnm { .. } => "dual-rnm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GossipState {
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub v: Vec<f64>,
    /// Edge values of dual protocols.
    pub y: Vec<f64>,
    pub gamma_prev: f64,
    pub clock: u64,
    pub rng: ChaCha8Rng,
}

impl GossipState {
    /// `x⁰ = x¹ = v⁰ = c`, `y⁰ = 0`.
    pub fn new(c: &[f64], edges: usize, rng: ChaCha8Rng) -> Self {
        Self {
            x: c.to_vec(),
            x_prev: c.to_vec(),
            v: c.to_vec(),
            y: vec![0.0; edges],
            gamma_prev: 0.0,
            clock: 0,
            rng,
        }
    }

    fn commit(&mut self, next: Vec<f64>) {
        self.x_prev = std::mem::replace(&mut self.x, next);
        self.clock += 1;
    }
}

/// New values of the endpoints of edge `(i, j)`, `i < j`, moved toward
/// their weighted average. `wi`, `wj` are inverse weights.
fn pair_update(xi: f64, xj: f64, omega: f64, wi: f64, wj: f64) -> (f64, f64) {
    let r = xi - xj;
    let denom = wi + wj;
    let t = if denom > 0.0 { (omega * r) / denom } else { 0.0 };
    (xi - t * wi, xj - (-t) * wj)
}

fn add_momentum(next: &mut [f64], x: &[f64], prev: &[f64], beta: f64) {
    if beta != 0.0 {
        for ((n, a), p) in next.iter_mut().zip(x).zip(prev) {
            *n += beta * (a - p);
        }
    }
}

/// Weighted pairwise averaging over edge `e`. `invw` holds `1/w_i`.
pub fn pairwise_step(state: &mut GossipState, net: &Network, e: usize, omega: f64, invw: &[f64]) {
    let (i, j) = net.edges()[e];
    let mut next = state.x.clone();
    (next[i], next[j]) = pair_update(state.x[i], state.x[j], omega, invw[i], invw[j]);
    state.commit(next);
}

/// Pairwise averaging on `e` plus heavy-ball memory at every node.
pub fn momentum_gossip_step(state: &mut GossipState, net: &Network, e: usize, omega: f64, beta: f64) {
    let (i, j) = net.edges()[e];
    let mut next = state.x.clone();
    (next[i], next[j]) = pair_update(state.x[i], state.x[j], omega, 1.0, 1.0);
    add_momentum(&mut next, &state.x, &state.x_prev, beta);
    state.commit(next);
}

/// Node `i` projects onto its Laplacian row: with `ω = 1` and equal weights
/// it takes the average of itself and its neighbours.
pub fn laplacian_node_step(state: &mut GossipState, net: &Network, i: usize, omega: f64, invw: &[f64]) {
    let di = net.neighbors(i).len() as f64;
    let support = row_support(net, i, di);
    let x = &state.x;
    let mut r = 0.0;
    for &(l, a) in &support {
        r += a * x[l];
    }
    let mut denom = 0.0;
    for &(l, a) in &support {
        denom += (a * a) * invw[l];
    }
    let t = if denom > 0.0 { (omega * r) / denom } else { 0.0 };
    let mut next = x.clone();
    for &(l, a) in &support {
        next[l] = x[l] - (t * a) * invw[l];
    }
    state.commit(next);
}

/// Nonzeros of Laplacian row `i` in column order.
fn row_support(net: &Network, i: usize, di: f64) -> Vec<(usize, f64)> {
    let nb = net.neighbors(i);
    let mut out = Vec::with_capacity(nb.len() + 1);
    let split = nb.partition_point(|&l| l < i);
    out.extend(nb[..split].iter().map(|&l| (l, -1.0)));
    out.push((i, di));
    out.extend(nb[split..].iter().map(|&l| (l, -1.0)));
    out
}

/// Components of the sampled edges, as lists of nodes. Nodes outside the
/// sample are not listed.
pub fn edge_components(net: &Network, edges: &[usize]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(net.nodes());
    let mut touched = vec![false; net.nodes()];
    for &e in edges {
        let (i, j) = net.edges()[e];
        uf.union(i, j);
        touched[i] = true;
        touched[j] = true;
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in (0..net.nodes()).filter(|&v| touched[v]) {
        groups.entry(uf.find(v)).or_default().push(v);
    }
    groups.into_values().collect()
}

/// Block step on edge set `edges`: every component of the sampled subgraph
/// moves toward its mean, and every node adds `β(x − x_prev)`.
pub fn block_gossip_step(state: &mut GossipState, net: &Network, edges: &[usize], omega: f64, beta: f64) {
    let x = &state.x;
    let mut next = x.clone();
    for comp in edge_components(net, edges) {
        let mean = comp.iter().map(|&v| x[v]).sum::<f64>() / comp.len() as f64;
        for &v in &comp {
            next[v] = omega * mean + (1.0 - omega) * x[v];
        }
    }
    add_momentum(&mut next, x, &state.x_prev, beta);
    state.commit(next);
}

/// One accelerated round on edge `e` of the normalized incidence system.
pub fn acc_gossip_step(state: &mut GossipState, net: &Network, e: usize, params: &AccParams) {
    let (alpha, beta, gamma) = params.coefficients(state.gamma_prev);
    let (i, j) = net.edges()[e];
    let y: Vec<f64> = state
        .v
        .iter()
        .zip(&state.x)
        .map(|(v, x)| alpha * v + (1.0 - alpha) * x)
        .collect();
    let s = FRAC_1_SQRT_2;
    let t = (s * y[i] + (-s) * y[j]) / (s * s + s * s);
    let gt = gamma * t;
    let mut x = y.clone();
    x[i] = y[i] - t * s;
    x[j] = y[j] - t * (-s);
    for (l, v) in state.v.iter_mut().enumerate() {
        *v = beta * *v + (1.0 - beta) * y[l];
    }
    state.v[i] -= gt * s;
    state.v[j] -= gt * (-s);
    state.gamma_prev = gamma;
    state.commit(x);
}

/// Randomized Newton step on the edge duals of `edges`: `y_C` maximizes the
/// dual over those coordinates and `x = c + Qᵀy` follows.
pub fn dual_rnm_step(state: &mut GossipState, net: &Network, edges: &[usize]) -> Result<()> {
    let ends: Vec<(usize, usize)> = edges.iter().map(|&e| net.edges()[e]).collect();
    let k = ends.len();
    let m = DenseMatrix::from_fn(k, k, |a, b| {
        let (i, j) = ends[a];
        let (p, q) = ends[b];
        let mut s = 0.0;
        if i == p {
            s += 1.0;
        }
        if i == q {
            s -= 1.0;
        }
        if j == p {
            s -= 1.0;
        }
        if j == q {
            s += 1.0;
        }
        s
    });
    let gap: Vec<f64> = ends.iter().map(|&(i, j)| state.x[j] - state.x[i]).collect();
    let lam = pseudoinverse(&m)?.matvec(&gap);
    let mut next = state.x.clone();
    for ((&e, &(i, j)), l) in edges.iter().zip(&ends).zip(&lam) {
        state.y[e] += l;
        next[i] += l;
        next[j] -= l;
    }
    state.commit(next);
    Ok(())
}

/// Protocol plus everything precomputed for ticking it.
#[derive(Debug, Clone)]
pub struct Gossip<'a> {
    net: &'a Network,
    protocol: GossipProtocol,
    weights: Vec<f64>,
    invw: Vec<f64>,
    node_dist: Option<SketchDistribution>,
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega < 2.0 {
        Ok(())
    } else {
        Err(param("omega", format!("must lie in (0, 2), got {omega}")))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..1.0).contains(&beta) {
        Ok(())
    } else {
        Err(param("beta", format!("must lie in [0, 1), got {beta}")))
    }
}

fn check_tau(tau: usize, m: usize) -> Result<()> {
    if (1..=m).contains(&tau) {
        Ok(())
    } else {
        Err(param("tau", format!("must lie in [1, {m}], got {tau}")))
    }
}

impl<'a> Gossip<'a> {
    pub fn new(net: &'a Network, protocol: GossipProtocol) -> Result<Self> {
        let n = net.nodes();
        let m = net.edge_count();
        let mut node_dist = None;
        let weights = match &protocol {
            GossipProtocol::Pairwise { omega } => {
                check_omega(*omega)?;
                vec![1.0; n]
            }
            GossipProtocol::WeightedPairwise { omega, weights } => {
                check_omega(*omega)?;
                net.clone().with_weights(weights.clone())?;
                weights.clone()
            }
            GossipProtocol::LaplacianNode {
                omega,
                weights,
                sampling,
            } => {
                check_omega(*omega)?;
                let w = weights.clone().unwrap_or_else(|| vec![1.0; n]);
                let weighted = net.clone().with_weights(w.clone())?;
                node_dist = Some(match sampling {
                    NodeSampling::Uniform => SketchDistribution::uniform_coordinates(n)?,
                    NodeSampling::RowNorms => {
                        SketchDistribution::row_norms(&graph::laplacian(net), &graph::weight_geometry(&weighted)?)?
                    }
                });
                w
            }
            GossipProtocol::Block { tau, omega, beta } => {
                check_tau(*tau, m)?;
                check_omega(*omega)?;
                check_beta(*beta)?;
                vec![1.0; n]
            }
            GossipProtocol::PairwiseMomentum { omega, beta } => {
                check_omega(*omega)?;
                check_beta(*beta)?;
                vec![1.0; n]
            }
            GossipProtocol::AccGossip(p) => {
                if p.m != m {
                    return Err(param(
                        "acc",
                        format!("parameters built for {} edges, network has {m}", p.m),
                    ));
                }
                vec![1.0; n]
            }
            GossipProtocol::DualRnm { tau } => {
                check_tau(*tau, m)?;
                vec![1.0; n]
            }
        };
        let invw = weights.iter().map(|w| 1.0 / w).collect();
        Ok(Self {
            net,
            protocol,
            weights,
            invw,
            node_dist,
        })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    pub fn protocol(&self) -> &GossipProtocol {
        &self.protocol
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Fresh state for initial values `c`.
    pub fn start(&self, c: &[f64], rng: ChaCha8Rng) -> Result<GossipState> {
        if c.len() != self.net.nodes() {
            return Err(GossipError::Core(sketchgossip_core::CoreError::DimensionMismatch {
                expected: self.net.nodes(),
                got: c.len(),
            }));
        }
        Ok(GossipState::new(c, self.net.edge_count(), rng))
    }

    /// One clock tick: sample an edge, node or edge set, then update.
    pub fn tick(&self, state: &mut GossipState) -> Result<()> {
        let m = self.net.edge_count();
        match &self.protocol {
            GossipProtocol::Pairwise { omega } | GossipProtocol::WeightedPairwise { omega, .. } => {
                let e = state.rng.gen_range(0..m);
                pairwise_step(state, self.net, e, *omega, &self.invw);
            }
            GossipProtocol::LaplacianNode { omega, .. } => {
                let dist = self
                    .node_dist
                    .as_ref()
                    .expect("node distribution set for Laplacian gossip");
                let i = match dist.draw(&mut state.rng) {
                    Sketch::Indices(c) => c[0],
                    Sketch::Dense(_) => unreachable!("coordinate sketches only"),
                };
                laplacian_node_step(state, self.net, i, *omega, &self.invw);
            }
            GossipProtocol::Block { tau, omega, beta } => {
                let edges = partial_fisher_yates(m, *tau, &mut state.rng);
                block_gossip_step(state, self.net, &edges, *omega, *beta);
            }
            GossipProtocol::PairwiseMomentum { omega, beta } => {
                let e = state.rng.gen_range(0..m);
                momentum_gossip_step(state, self.net, e, *omega, *beta);
            }
            GossipProtocol::AccGossip(p) => {
                let e = state.rng.gen_range(0..m);
                acc_gossip_step(state, self.net, e, p);
            }
            GossipProtocol::DualRnm { tau } => {
                let edges = partial_fisher_yates(m, *tau, &mut state.rng);
                dual_rnm_step(state, self.net, &edges)?;
            }
        }
        Ok(())
    }

    /// The consensus system this protocol solves, with its sketch distribution.
    pub fn ac_system(&self) -> Result<(LinearSystem, SketchDistribution)> {
        let net = self.net;
        let m = net.edge_count();
        let weighted = || net.clone().with_weights(self.weights.clone());
        Ok(match &self.protocol {
            GossipProtocol::Pairwise { .. } | GossipProtocol::PairwiseMomentum { .. } => (
                graph::incidence_system(net)?,
                SketchDistribution::uniform_coordinates(m)?,
            ),
            GossipProtocol::WeightedPairwise { .. } => (
                graph::incidence_system(&weighted()?)?,
                SketchDistribution::uniform_coordinates(m)?,
            ),
            GossipProtocol::LaplacianNode { .. } => (
                graph::laplacian_system(&weighted()?)?,
                self.node_dist
                    .clone()
                    .expect("node distribution set for Laplacian gossip"),
            ),
            GossipProtocol::Block { tau, .. } | GossipProtocol::DualRnm { tau } => (
                graph::incidence_system(net)?,
                SketchDistribution::uniform_block(m, *tau)?,
            ),
            GossipProtocol::AccGossip(_) => (
                graph::normalized_incidence_system(net)?,
                SketchDistribution::uniform_coordinates(m)?,
            ),
        })
    }

    /// Weighted mean `Σ w_i c_i / Σ w_i` at every node.
    pub fn limit(&self, c: &[f64]) -> Vec<f64> {
        vec![weighted_mean(c, &self.weights); c.len()]
    }
}

pub fn weighted_mean(c: &[f64], w: &[f64]) -> f64 {
    let num: f64 = c.iter().zip(w).map(|(a, b)| a * b).sum();
    num / w.iter().sum::<f64>()
}

/// `Σ w_i x_i`
pub fn mass(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(a, b)| a * b).sum()
}

fn weighted_dist_sq(x: &[f64], target: &[f64], w: &[f64]) -> f64 {
    x.iter()
        .zip(target)
        .zip(w)
        .map(|((a, t), w)| w * (a - t) * (a - t))
        .sum()
}

/// Runs `gossip` from `c`, recording `rel_error`, `f` (small supports only),
/// `mass`, and for the dual protocol `dual_subopt`.
pub fn simulate(gossip: &Gossip, c: &[f64], stopping: &Stopping, seed: u64, trial: usize) -> Result<Trace> {
    if stopping.record_every == 0 {
        return Err(param("record_every", "must be positive"));
    }
    let mut state = gossip.start(c, trial_rng(seed, trial))?;
    let w = gossip.weights();
    let target = gossip.limit(c);
    let e0 = weighted_dist_sq(c, &target, w);
    let (system, dist) = gossip.ac_system()?;
    let ez = match dist.support() {
        Some(s) if s.len() <= F_METRIC_SUPPORT => Some(system.expected_z(&dist)?),
        _ => None,
    };
    let dual = matches!(gossip.protocol(), GossipProtocol::DualRnm { .. });
    let rel = |x: &[f64]| {
        if e0 == 0.0 {
            0.0
        } else {
            weighted_dist_sq(x, &target, w) / e0
        }
    };
    let record = |trace: &mut Trace, k: u64, x: &[f64], r: f64| {
        trace.push(trial, k, "rel_error", r);
        if let Some(ez) = &ez {
            trace.push(trial, k, "f", expected_objective(ez, x, &target));
        }
        trace.push(trial, k, "mass", mass(x, w));
        if dual {
            trace.push(trial, k, "dual_subopt", 0.5 * weighted_dist_sq(x, &target, w));
        }
    };
    let mut trace = Trace::new();
    let mut r = rel(&state.x);
    record(&mut trace, 0, &state.x, r);
    let reached = |r: f64| stopping.target.is_some_and(|t| r <= t);
    let mut k = 0;
    while k < stopping.max_iterations && !reached(r) {
        gossip.tick(&mut state)?;
        k += 1;
        r = rel(&state.x);
        if !r.is_finite() {
            return Err(GossipError::Core(sketchgossip_core::CoreError::Numerical(format!(
                "gossip diverged at tick {k}"
            ))));
        }
        if k % stopping.record_every == 0 || k == stopping.max_iterations || reached(r) {
            record(&mut trace, k, &state.x, r);
        }
    }
    Ok(trace)
}

/// Ticks until the relative error is at most `target`; `None` past `max_ticks`.
pub fn ticks_to_target(
    gossip: &Gossip,
    c: &[f64],
    target: f64,
    max_ticks: u64,
    rng: ChaCha8Rng,
) -> Result<Option<u64>> {
    let mut state = gossip.start(c, rng)?;
    let w = gossip.weights();
    let lim = gossip.limit(c);
    let e0 = weighted_dist_sq(c, &lim, w);
    if e0 == 0.0 {
        return Ok(Some(0));
    }
    for k in 1..=max_ticks {
        gossip.tick(&mut state)?;
        if weighted_dist_sq(&state.x, &lim, w) <= target * e0 {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    #[test]
    fn unit_pairwise_averages() {
        let net = Network::new(2, [(0, 1)]).unwrap();
        let mut s = GossipState::new(&[1.0, 4.0], 1, rng());
        pairwise_step(&mut s, &net, 0, 1.0, &[1.0, 1.0]);
        assert_eq!(s.x, vec![2.5, 2.5]);
        pairwise_step(&mut s, &net, 0, 0.0, &[1.0, 1.0]);
        assert_eq!(s.x, vec![2.5, 2.5]);
    }

    #[test]
    fn weighted_pairwise_barycenter() {
        let net = Network::new(2, [(0, 1)]).unwrap();
        let mut s = GossipState::new(&[0.0, 4.0], 1, rng());
        pairwise_step(&mut s, &net, 0, 1.0, &[1.0 / 3.0, 1.0]);
        assert!((s.x[0] - 1.0).abs() < 1e-15 && (s.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn star_center_update() {
        let net = Network::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut s = GossipState::new(&[0.0, 3.0, 3.0, 3.0], 3, rng());
        laplacian_node_step(&mut s, &net, 0, 1.0, &[1.0; 4]);
        assert!((s.x[0] - 2.25).abs() < 1e-14);
        for l in 1..4 {
            assert!((s.x[l] - 2.25).abs() < 1e-14);
        }
        assert!((s.x.iter().sum::<f64>() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn components_of_sample() {
        let net = graph::path(6).unwrap();
        // edges (0,1) (1,2) (3,4)
        let comps = edge_components(&net, &[0, 1, 3]);
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn support_is_column_ordered() {
        let net = graph::cycle(5).unwrap();
        assert_eq!(row_support(&net, 0, 2.0), vec![(0, 2.0), (1, -1.0), (4, -1.0)]);
        assert_eq!(row_support(&net, 4, 2.0), vec![(0, -1.0), (3, -1.0), (4, 2.0)]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let net = graph::cycle(5).unwrap();
        assert!(Gossip::new(&net, GossipProtocol::Pairwise { omega: 2.0 }).is_err());
        assert!(Gossip::new(
            &net,
            GossipProtocol::Block {
                tau: 6,
                omega: 1.0,
                beta: 0.0
            }
        )
        .is_err());
        assert!(Gossip::new(&net, GossipProtocol::PairwiseMomentum { omega: 1.0, beta: 1.0 }).is_err());
        assert!(Gossip::new(
            &net,
            GossipProtocol::WeightedPairwise {
                omega: 1.0,
                weights: vec![1.0; 4]
            }
        )
        .is_err());
    }
}
