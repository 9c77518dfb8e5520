//! Undirected networks, their generators, and the matrices that turn
//! consensus into a linear system.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchgossip_core::linalg::{DenseMatrix, SpdMatrix, Spectrum};
use sketchgossip_core::LinearSystem;

use crate::error::{param, GossipError, Result};

/// Regeneration budget for random geometric graphs.
pub const RGG_ATTEMPTS: usize = 100;

/// Connected simple graph. Edges are stored as `(i, j)` with `i < j`,
/// sorted lexicographically; that order fixes the rows of every matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    neighbors: Vec<Vec<usize>>,
}

impl Network {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(GossipError::InvalidNetwork(format!("need at least 2 nodes, got {n}")));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GossipError::InvalidNetwork(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(GossipError::InvalidNetwork(format!("self-loop at node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(GossipError::InvalidNetwork(format!("duplicate edge ({a}, {b})")));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let net = Self {
            n,
            edges,
            weights: None,
            neighbors,
        };
        if !net.is_connected() {
            return Err(GossipError::Disconnected);
        }
        Ok(net)
    }

    /// Attaches positive node weights.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(param(
                "weights",
                format!("expected {} values, got {}", self.n, weights.len()),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(param("weights", format!("must be positive and finite, got {w}")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Node weights, all ones when none are attached.
    pub fn weights_or_ones(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.n])
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        let root = uf.find(0);
        (1..self.n).all(|v| uf.find(v) == root)
    }

    /// Position of edge `(i, j)` in the stored order.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }
}

pub fn cycle(n: usize) -> Result<Network> {
    if n < 3 {
        return Err(param("n", format!("a cycle needs at least 3 nodes, got {n}")));
    }
    Network::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Result<Network> {
    Network::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)))
}

/// `a × b` lattice, node `r·b + c` at row `r`, column `c`.
pub fn grid2d(a: usize, b: usize) -> Result<Network> {
    let mut edges = Vec::new();
    for r in 0..a {
        for c in 0..b {
            let v = r * b + c;
            if c + 1 < b {
                edges.push((v, v + 1));
            }
            if r + 1 < a {
                edges.push((v, v + b));
            }
        }
    }
    Network::new(a * b, edges)
}

pub fn complete(n: usize) -> Result<Network> {
    Network::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// `√(ln n / n)`
pub fn rgg_radius(n: usize) -> f64 {
    ((n as f64).ln() / n as f64).sqrt()
}

/// Uniform points in the unit square joined when closer than `r`.
/// Regenerates up to [`RGG_ATTEMPTS`] times until connected.
pub fn rgg(n: usize, r: f64, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(param("n", format!("need at least 2 nodes, got {n}")));
    }
    if !(r > 0.0) {
        return Err(param("r", format!("radius must be positive, got {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RGG_ATTEMPTS {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if (dx * dx + dy * dy).sqrt() < r {
                    edges.push((i, j));
                }
            }
        }
        match Network::new(n, edges) {
            Ok(net) => return Ok(net),
            Err(GossipError::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GossipError::GenerationFailed { attempts: RGG_ATTEMPTS })
}

/// Parses `cycle:10`, `path:100`, `grid:4x4`, `complete:8` or `rgg:100`
/// (radius `√(ln n / n)`, placement seeded by `seed`).
pub fn parse_generator(spec: &str, seed: u64) -> Result<Network> {
    let err = |reason: &str| GossipError::Parse {
        input: spec.to_string(),
        reason: reason.to_string(),
    };
    let (kind, arg) = spec.split_once(':').ok_or_else(|| err("expected `kind:size`"))?;
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| err("size must be a positive integer"))
    };
    match kind.trim() {
        "cycle" => cycle(num(arg)?),
        "path" | "line" => path(num(arg)?),
        "complete" => complete(num(arg)?),
        "rgg" => {
            let n = num(arg)?;
            rgg(n, rgg_radius(n), seed)
        }
        "grid" => {
            let (a, b) = arg
                .split_once('x')
                .ok_or_else(|| err("grid size must look like `4x4`"))?;
            grid2d(num(a)?, num(b)?)
        }
        _ => Err(err("unknown generator; expected cycle, path, grid, rgg or complete")),
    }
}

/// Edge list text: a header `n m`, then `m` lines `i j`, 0-indexed.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Network> {
    let parse_err = |line: usize, reason: &str| GossipError::Parse {
        input: format!("line {line}"),
        reason: reason.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n m` header"))?;
    let pair = |ln: usize, l: &str| -> Result<(usize, usize)> {
        let mut it = l.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(parse_err(ln, "expected two non-negative integers")),
        }
    };
    let (n, m) = pair(hl, header)?;
    let edges = lines.map(|(ln, l)| pair(ln, l)).collect::<Result<Vec<_>>>()?;
    if edges.len() != m {
        return Err(parse_err(
            hl,
            &format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Network::new(n, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Network> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| GossipError::Io(e.to_string()))?;
    parse_edge_list(&text)
}

/// `m × n`; row `e = (i, j)` has `+1` at `i` and `−1` at `j`.
pub fn incidence(net: &Network) -> DenseMatrix {
    signed_rows(net, 1.0)
}

/// Incidence scaled by `1/√2`, so every row has unit norm.
pub fn normalized_incidence(net: &Network) -> DenseMatrix {
    signed_rows(net, FRAC_1_SQRT_2)
}

fn signed_rows(net: &Network, s: f64) -> DenseMatrix {
    let mut q = DenseMatrix::zeros(net.edge_count(), net.nodes());
    for (e, &(i, j)) in net.edges().iter().enumerate() {
        let row = q.row_mut(e);
        row[i] = s;
        row[j] = -s;
    }
    q
}

pub fn degree(net: &Network) -> DenseMatrix {
    let d: Vec<f64> = net.degrees().iter().map(|&d| d as f64).collect();
    DenseMatrix::from_diagonal(&d)
}

pub fn adjacency(net: &Network) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(net.nodes(), net.nodes());
    for &(i, j) in net.edges() {
        a.row_mut(i)[j] = 1.0;
        a.row_mut(j)[i] = 1.0;
    }
    a
}

/// `L = D − adjacency = QᵀQ`
pub fn laplacian(net: &Network) -> DenseMatrix {
    degree(net).sub(&adjacency(net))
}

/// `D⁻¹L`
pub fn random_walk_laplacian(net: &Network) -> DenseMatrix {
    let d = net.degrees();
    let l = laplacian(net);
    DenseMatrix::from_fn(net.nodes(), net.nodes(), |i, j| l[(i, j)] / d[i] as f64)
}

/// `D^{-1/2} L D^{-1/2}`
pub fn symmetric_normalized_laplacian(net: &Network) -> DenseMatrix {
    let s: Vec<f64> = net.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let l = laplacian(net);
    DenseMatrix::from_fn(net.nodes(), net.nodes(), |i, j| s[i] * l[(i, j)] * s[j])
}

/// Second-smallest Laplacian eigenvalue.
pub fn algebraic_connectivity(net: &Network) -> Result<f64> {
    let s = Spectrum::of_symmetric(&laplacian(net))?;
    Ok(s.eigenvalues[net.nodes() - 2])
}

/// `n / α(G)`
pub fn beta_of_graph(net: &Network) -> Result<f64> {
    Ok(net.nodes() as f64 / algebraic_connectivity(net)?)
}

/// Geometry for node weights: `Diag(w)`, or the identity when unweighted.
pub fn weight_geometry(net: &Network) -> Result<SpdMatrix> {
    Ok(match net.weights() {
        Some(w) => SpdMatrix::diagonal(w.to_vec())?,
        None => SpdMatrix::identity(net.nodes()),
    })
}

/// `Qx = 0` in the node-weight geometry.
pub fn incidence_system(net: &Network) -> Result<LinearSystem> {
    Ok(LinearSystem::new(
        incidence(net),
        vec![0.0; net.edge_count()],
        weight_geometry(net)?,
    )?)
}

/// `Lx = 0` in the node-weight geometry.
pub fn laplacian_system(net: &Network) -> Result<LinearSystem> {
    Ok(LinearSystem::new(
        laplacian(net),
        vec![0.0; net.nodes()],
        weight_geometry(net)?,
    )?)
}

/// `(Q/√2)x = 0` with `B = I`.
pub fn normalized_incidence_system(net: &Network) -> Result<LinearSystem> {
    Ok(LinearSystem::new(
        normalized_incidence(net),
        vec![0.0; net.edge_count()],
        SpdMatrix::identity(net.nodes()),
    )?)
}

/// `Σ_{i<j} (x_i − x_j)²` over all pairs.
pub fn all_pairs_spread(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            s += (x[i] - x[j]).powi(2);
        }
    }
    s
}

/// `Σ_{(i,j)∈E} (x_i − x_j)²`
pub fn edge_spread(net: &Network, x: &[f64]) -> f64 {
    net.edges().iter().map(|&(i, j)| (x[i] - x[j]).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_rows() {
        let net = Network::new(2, [(1, 0)]).unwrap();
        assert_eq!(incidence(&net).data(), &[1.0, -1.0]);
        assert_eq!(normalized_incidence(&net).data(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(Network::new(3, [(0, 1)]), Err(GossipError::Disconnected)));
        assert!(Network::new(3, [(0, 0), (1, 2)]).is_err());
        assert!(Network::new(3, [(0, 1), (1, 0), (1, 2)]).is_err());
        assert!(Network::new(3, [(0, 1), (1, 5)]).is_err());
        assert!(Network::new(1, []).is_err());
    }

    #[test]
    fn cycle_edges_sorted() {
        let c = cycle(4).unwrap();
        assert_eq!(c.edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(c.edge_index(3, 0), Some(1));
        assert_eq!(c.neighbors(0), &[1, 3]);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(parse_generator("cycle:10", 0).unwrap().edge_count(), 10);
        assert_eq!(parse_generator("grid:4x4", 0).unwrap().edge_count(), 24);
        assert_eq!(parse_generator("path:5", 0).unwrap().edge_count(), 4);
        assert_eq!(parse_generator("complete:5", 0).unwrap().edge_count(), 10);
        assert_eq!(parse_generator("rgg:50", 3).unwrap().nodes(), 50);
        assert!(parse_generator("star:5", 0).is_err());
        assert!(parse_generator("grid:4", 0).is_err());
        assert!(parse_generator("cycle", 0).is_err());
    }

    #[test]
    fn edge_list_round() {
        let net = parse_edge_list("# tri\n3 3\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!(net.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(parse_edge_list("3 3\n0 1\n1 2\n").is_err());
        assert!(parse_edge_list("3 2\n0 1\n1 x\n").is_err());
        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn weights_validated() {
        let c = cycle(3).unwrap();
        assert!(c.clone().with_weights(vec![1.0, 2.0]).is_err());
        assert!(c.clone().with_weights(vec![1.0, 0.0, 1.0]).is_err());
        assert_eq!(
            c.with_weights(vec![1.0, 2.0, 3.0]).unwrap().weights(),
            Some(&[1.0, 2.0, 3.0][..])
        );
    }
}
