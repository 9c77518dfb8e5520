//! Privacy-preserving gossip: the binary oracle, the ε-gap oracle and
//! controlled noise insertion, each run on the incidence system.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sketchgossip_core::solver::{trial_rng, Stopping};
use sketchgossip_core::Trace;

use crate::error::{param, GossipError, Result};
use crate::graph::{self, Network};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsizeSchedule {
    Constant(f64),
    /// `λᵗ = 1/(t + 1)`
    InvT,
    /// `λᵗ = a/√(t + 1)`
    InvSqrtT(f64),
    /// `λᵗ = √(R/(k + 1))` over the horizon `k`.
    Optimal {
        r: f64,
        horizon: u64,
    },
    /// `λᵗ = (1/2m) Σ_e |x_i − x_j|`, needs a global scan each tick.
    Adaptive,
}

impl StepsizeSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant(l) if !(l > 0.0) => Err(param("lambda", format!("must be positive, got {l}"))),
            Self::InvSqrtT(a) if !(a > 0.0) => Err(param("a", format!("must be positive, got {a}"))),
            Self::Optimal { r, .. } if !(r > 0.0) => Err(param("R", format!("must be positive, got {r}"))),
            _ => Ok(()),
        }
    }

    /// Stepsize at tick `t` (0-based); only `Adaptive` reads `x`.
    pub fn stepsize(&self, t: u64, net: &Network, x: &[f64]) -> f64 {
        match *self {
            Self::Constant(l) => l,
            Self::InvT => 1.0 / (t as f64 + 1.0),
            Self::InvSqrtT(a) => a / (t as f64 + 1.0).sqrt(),
            Self::Optimal { r, horizon } => (r / (horizon as f64 + 1.0)).sqrt(),
            Self::Adaptive => edge_gap_sum(net, x) / (2.0 * net.edge_count() as f64),
        }
    }
}

/// Primal values `x = c + Qᵀy` together with the edge duals `y`.
#[derive(Debug, Clone)]
pub struct PrivateState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub c: Vec<f64>,
    pub clock: u64,
    pub rng: ChaCha8Rng,
}

impl PrivateState {
    pub fn new(c: &[f64], edges: usize, rng: ChaCha8Rng) -> Self {
        Self {
            x: c.to_vec(),
            y: vec![0.0; edges],
            c: c.to_vec(),
            clock: 0,
            rng,
        }
    }

    /// `x_i += h`, `x_j −= h`, `y_e += h`.
    fn transfer(&mut self, net: &Network, e: usize, h: f64) {
        let (i, j) = net.edges()[e];
        self.x[i] += h;
        self.x[j] -= h;
        self.y[e] += h;
    }
}

/// Endpoints learn only which is larger and move `λ` toward each other.
/// A tie takes the `x_i ≥ x_j` branch.
pub fn binary_step(state: &mut PrivateState, net: &Network, e: usize, lambda: f64) {
    let (i, j) = net.edges()[e];
    let h = if state.x[i] < state.x[j] { lambda } else { -lambda };
    state.transfer(net, e, h);
    state.clock += 1;
}

/// Moves the endpoints `ε/2` together when their gap is at least `ε`.
/// Returns whether an update fired.
pub fn epsilon_gap_step(state: &mut PrivateState, net: &Network, e: usize, eps: f64) -> bool {
    let (i, j) = net.edges()[e];
    let h = if state.x[i] <= state.x[j] - eps {
        eps / 2.0
    } else if state.x[j] <= state.x[i] - eps {
        -eps / 2.0
    } else {
        0.0
    };
    if h != 0.0 {
        state.transfer(net, e, h);
    }
    state.clock += 1;
    h != 0.0
}

/// Fraction of edges whose gap is at least `ε`.
pub fn delta_fraction(net: &Network, x: &[f64], eps: f64) -> f64 {
    let over = net.edges().iter().filter(|&&(i, j)| (x[i] - x[j]).abs() >= eps).count();
    over as f64 / net.edge_count() as f64
}

/// Per-node noise memory for controlled noise insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseState {
    pub sigma: Vec<f64>,
    pub phi: Vec<f64>,
    /// Times each node has been sampled.
    pub times: Vec<u64>,
    /// Last injected `φ^{t−1} v^{t−1}`.
    pub last: Vec<f64>,
}

impl NoiseState {
    pub fn new(sigma: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if sigma.len() != phi.len() {
            return Err(param("phi", "sigma and phi must have one entry per node"));
        }
        if let Some(s) = sigma.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(param("sigma", format!("must be nonnegative, got {s}")));
        }
        if let Some(p) = phi.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(param("phi", format!("must lie in [0, 1), got {p}")));
        }
        let n = sigma.len();
        Ok(Self {
            sigma,
            phi,
            times: vec![0; n],
            last: vec![0.0; n],
        })
    }

    /// `w = φ^t v^t − φ^{t−1} v^{t−1}` for node `i`, then advances its memory.
    fn draw<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> f64 {
        let v = if self.sigma[i] > 0.0 {
            Normal::new(0.0, self.sigma[i]).expect("validated sigma").sample(rng)
        } else {
            0.0
        };
        let fresh = self.phi[i].powi(self.times[i] as i32) * v;
        let w = fresh - self.last[i];
        self.last[i] = fresh;
        self.times[i] += 1;
        w
    }
}

/// Pairwise averaging of noise-perturbed values. Draws the noise of the
/// smaller endpoint first.
pub fn noise_step(state: &mut PrivateState, net: &Network, e: usize, noise: &mut NoiseState) {
    let (i, j) = net.edges()[e];
    let wi = noise.draw(i, &mut state.rng);
    let wj = noise.draw(j, &mut state.rng);
    let avg = (state.x[i] + wi + state.x[j] + wj) / 2.0;
    state.x[i] = avg;
    state.x[j] = avg;
    state.clock += 1;
}

/// `Uᵏ = (R + Σλᵗ²)/Σλᵗ` with sums over `t = 0..=k`.
pub fn binary_rate_bound(schedule: &StepsizeSchedule, k: u64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(param("R", format!("must be nonnegative, got {r}")));
    }
    if let StepsizeSchedule::Adaptive = schedule {
        return Err(param("schedule", "the adaptive schedule has no a priori bound"));
    }
    schedule.validate()?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for t in 0..=k {
        let l = match *schedule {
            StepsizeSchedule::Constant(l) => l,
            StepsizeSchedule::InvT => 1.0 / (t as f64 + 1.0),
            StepsizeSchedule::InvSqrtT(a) => a / (t as f64 + 1.0).sqrt(),
            StepsizeSchedule::Optimal { r, horizon } => (r / (horizon as f64 + 1.0)).sqrt(),
            StepsizeSchedule::Adaptive => unreachable!(),
        };
        s1 += l;
        s2 += l * l;
    }
    Ok((r + s2) / s1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiThreshold {
    pub phi: Vec<f64>,
    /// `γ < α(G)/2`: noise decays slower than the noise-free gossip rate.
    pub noise_dominated: bool,
}

/// `φ_i = √(1 − γ/d_i)`; needs `0 ≤ γ ≤ d_min`.
pub fn phi_threshold(net: &Network, gamma: f64) -> Result<PhiThreshold> {
    let dmin = net.min_degree() as f64;
    if !(gamma >= 0.0 && gamma <= dmin) {
        return Err(param("gamma", format!("must lie in [0, {dmin}], got {gamma}")));
    }
    let alpha = graph::algebraic_connectivity(net)?;
    let phi = net
        .degrees()
        .iter()
        .map(|&d| (1.0 - gamma / d as f64).max(0.0).sqrt())
        .collect();
    Ok(PhiThreshold {
        phi,
        noise_dominated: gamma < alpha / 2.0,
    })
}

/// `Σ_e |x_i − x_j|`
pub fn edge_gap_sum(net: &Network, x: &[f64]) -> f64 {
    net.edges().iter().map(|&(i, j)| (x[i] - x[j]).abs()).sum()
}

/// `‖c̄1 − x‖²` with `c̄` the mean of `x`.
pub fn consensus_error(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean).powi(2)).sum()
}

/// `D(y) = −(Qc)ᵀy − ½‖Qᵀy‖²`
pub fn dual_value(net: &Network, c: &[f64], y: &[f64]) -> f64 {
    let mut qty = vec![0.0; net.nodes()];
    let mut lin = 0.0;
    for (&(i, j), &ye) in net.edges().iter().zip(y) {
        lin -= (c[i] - c[j]) * ye;
        qty[i] += ye;
        qty[j] -= ye;
    }
    lin - 0.5 * qty.iter().map(|v| v * v).sum::<f64>()
}

/// `D(y*) = ½‖c − c̄1‖²`
pub fn optimal_dual_value(c: &[f64]) -> f64 {
    0.5 * consensus_error(c)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Oracle {
    Binary(StepsizeSchedule),
    Gap(f64),
    Noise { sigma: Vec<f64>, phi: Vec<f64> },
}

impl Oracle {
    pub fn validate(&self, net: &Network) -> Result<()> {
        match self {
            Self::Binary(s) => s.validate(),
            Self::Gap(eps) if !(*eps > 0.0) => Err(param("epsilon", format!("must be positive, got {eps}"))),
            Self::Noise { sigma, phi } => {
                if sigma.len() != net.nodes() {
                    return Err(param(
                        "sigma",
                        format!("expected {} values, got {}", net.nodes(), sigma.len()),
                    ));
                }
                NoiseState::new(sigma.clone(), phi.clone()).map(|_| ())
            }
            _ => Ok(()),
        }
    }
}

/// Runs an oracle protocol with uniform edge sampling. Records
/// `consensus_error`, `rel_error`, `mass`, `gap_sum`, and per oracle
/// `dual_subopt` (binary and gap) and `delta` (gap).
pub fn simulate_private(
    net: &Network,
    oracle: &Oracle,
    c: &[f64],
    stopping: &Stopping,
    seed: u64,
    trial: usize,
) -> Result<Trace> {
    if c.len() != net.nodes() {
        return Err(param("c", format!("expected {} values, got {}", net.nodes(), c.len())));
    }
    if stopping.record_every == 0 {
        return Err(param("record_every", "must be positive"));
    }
    oracle.validate(net)?;
    let mut state = PrivateState::new(c, net.edge_count(), trial_rng(seed, trial));
    let mut noise = match oracle {
        Oracle::Noise { sigma, phi } => Some(NoiseState::new(sigma.clone(), phi.clone())?),
        _ => None,
    };
    let e0 = consensus_error(c);
    let d_star = optimal_dual_value(c);
    let m = net.edge_count();
    let record = |trace: &mut Trace, k: u64, s: &PrivateState| {
        let err = consensus_error(&s.x);
        trace.push(trial, k, "consensus_error", err);
        trace.push(trial, k, "rel_error", if e0 == 0.0 { 0.0 } else { err / e0 });
        trace.push(trial, k, "mass", s.x.iter().sum());
        trace.push(trial, k, "gap_sum", edge_gap_sum(net, &s.x));
        match oracle {
            Oracle::Binary(_) => trace.push(trial, k, "dual_subopt", d_star - dual_value(net, c, &s.y)),
            Oracle::Gap(eps) => {
                trace.push(trial, k, "dual_subopt", d_star - dual_value(net, c, &s.y));
                trace.push(trial, k, "delta", delta_fraction(net, &s.x, *eps));
            }
            Oracle::Noise { .. } => {}
        }
    };
    let mut trace = Trace::new();
    record(&mut trace, 0, &state);
    let reached = |s: &PrivateState| {
        stopping
            .target
            .is_some_and(|t| e0 == 0.0 || consensus_error(&s.x) <= t * e0)
    };
    let mut k = 0;
    while k < stopping.max_iterations && !reached(&state) {
        let e = state.rng.gen_range(0..m);
        match oracle {
            Oracle::Binary(schedule) => {
                let l = schedule.stepsize(k, net, &state.x);
                binary_step(&mut state, net, e, l);
            }
            Oracle::Gap(eps) => {
                epsilon_gap_step(&mut state, net, e, *eps);
            }
            Oracle::Noise { .. } => noise_step(&mut state, net, e, noise.as_mut().expect("noise state")),
        }
        k += 1;
        if state.x.iter().any(|v| !v.is_finite()) {
            return Err(GossipError::Core(sketchgossip_core::CoreError::Numerical(format!(
                "values diverged at tick {k}"
            ))));
        }
        if k % stopping.record_every == 0 || k == stopping.max_iterations || reached(&state) {
            record(&mut trace, k, &state);
        }
    }
    Ok(trace)
}
