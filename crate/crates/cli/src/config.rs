//! Flat `key = value` experiment configs with dotted keys.
//!
//! ```text
//! kind = solve
//! trials = 10
//! system = gaussian:300x200
//! solver.variant = momentum
//! momentum.beta = 0.3
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sketchgossip_core::accelerated::AccOption;
use sketchgossip_core::inexact::{InexactnessSpec, InnerSolver, SigmaSchedule};
use sketchgossip_core::Stopping;
use sketchgossip_gossip::privacy::StepsizeSchedule;
use sketchgossip_gossip::NodeSampling;

use crate::error::{HarnessError, Result};

/// Key/value pairs in file order, later overrides replacing earlier values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Blank lines and `#` comments are skipped; a key may appear once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_pair(line).ok_or_else(|| HarnessError::Syntax {
                line: k + 1,
                reason: "expected `key = value`".into(),
            })?;
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(HarnessError::Syntax {
                    line: k + 1,
                    reason: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| HarnessError::io(&path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (k, v) =
            split_pair(pair).ok_or_else(|| HarnessError::field(pair, "override must look like `key=value`"))?;
        self.set(k, v);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        None
    } else {
        Some((k, v))
    }
}

/// Typed reads that remember which keys were consumed.
struct Fields<'a> {
    raw: &'a RawConfig,
    used: RefCell<BTreeSet<String>>,
}

impl<'a> Fields<'a> {
    fn new(raw: &'a RawConfig) -> Self {
        Self {
            raw,
            used: RefCell::new(BTreeSet::new()),
        }
    }

    fn str(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.raw.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| HarnessError::field(key, format!("cannot parse `{v}` as {}", type_label::<T>()))),
        }
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| HarnessError::field(key, "required"))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn choice(&self, key: &str, default: Option<&'static str>, allowed: &[&str]) -> Result<&'a str> {
        let v = match (self.str(key), default) {
            (Some(v), _) => v,
            (None, Some(d)) => return Ok(d),
            (None, None) => {
                return Err(HarnessError::field(
                    key,
                    format!("required; one of {}", allowed.join(", ")),
                ))
            }
        };
        if allowed.contains(&v) {
            Ok(v)
        } else {
            Err(HarnessError::field(
                key,
                format!("unknown value `{v}`; expected one of {}", allowed.join(", ")),
            ))
        }
    }

    fn finish(self) -> Result<()> {
        let used = self.used.into_inner();
        match self.raw.entries().keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(HarnessError::field(k.clone(), "unknown key")),
            None => Ok(()),
        }
    }
}

fn type_label<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    match name {
        "f64" => "a number",
        "u64" | "usize" => "a nonnegative integer",
        _ => name,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    /// `gaussian:300x200`: `A` i.i.d. standard normal, `b = Az`.
    Gaussian { rows: usize, cols: usize },
    /// `spd:50`: `A = PᵀP` with `P` Gaussian `n × n`.
    Spd { n: usize },
    /// `sparse:300x100:10`: that many normal entries per row at random columns.
    Sparse { rows: usize, cols: usize, nnz: usize },
    /// `file:PATH`, with `b = Az` unless `system.rhs` names a vector file.
    File { a: PathBuf, b: Option<PathBuf> },
}

impl SystemSpec {
    pub fn parse(spec: &str, rhs: Option<PathBuf>) -> std::result::Result<Self, String> {
        let bad = || format!("expected gaussian:RxC, spd:N, sparse:RxC:G or file:PATH, got `{spec}`");
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        let num = |s: &str| s.trim().parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(bad);
        let dims = |s: &str| {
            let (r, c) = s.split_once('x').ok_or_else(bad)?;
            Ok::<_, String>((num(r)?, num(c)?))
        };
        if kind != "file" && rhs.is_some() {
            return Err("system.rhs applies to file systems only".into());
        }
        Ok(match kind {
            "gaussian" => {
                let (rows, cols) = dims(arg)?;
                Self::Gaussian { rows, cols }
            }
            "spd" => Self::Spd { n: num(arg)? },
            "sparse" => {
                let (d, g) = arg.rsplit_once(':').ok_or_else(bad)?;
                let (rows, cols) = dims(d)?;
                let nnz = num(g)?;
                if nnz > cols {
                    return Err(format!("{nnz} nonzeros per row exceed {cols} columns"));
                }
                Self::Sparse { rows, cols, nnz }
            }
            "file" if !arg.is_empty() => Self::File {
                a: PathBuf::from(arg),
                b: rhs,
            },
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometrySpec {
    Identity,
    /// Random weights in `[0.5, 3)`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Probabilities {
    RowNorms,
    Uniform,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SketchSpec {
    Coordinate(Probabilities),
    Block { tau: usize },
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Basic,
    Momentum {
        beta: f64,
    },
    StochasticMomentum {
        gamma: f64,
    },
    /// `value` is `ν` (option two) or `λ` (option one); `None` takes the largest admissible.
    Accelerated {
        option: AccOption,
        value: Option<f64>,
    },
    Inexact(InexactnessSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveSpec {
    pub system: SystemSpec,
    pub geometry: GeometrySpec,
    pub sketch: SketchSpec,
    pub omega: f64,
    pub method: MethodSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Uniform,
    Degree,
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuesSpec {
    /// Standard normal values.
    Gaussian,
    /// `c_i = i`.
    Linear,
    /// `c_0 = n`, zero elsewhere.
    Spike,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolSpec {
    Pairwise { omega: f64 },
    Laplacian { omega: f64, sampling: NodeSampling },
    Block { tau: usize, omega: f64, beta: f64 },
    Momentum { omega: f64, beta: f64 },
    Acc { option: AccOption, value: Option<f64> },
    Dual { tau: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GossipSpec {
    pub graph: String,
    pub weights: WeightSpec,
    pub protocol: ProtocolSpec,
    pub values: ValuesSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSpec {
    Const(f64),
    /// `φ_i = √(1 − γ/d_i)`
    Gamma(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    Binary(StepsizeSchedule),
    Gap(f64),
    Noise { sigma: f64, phi: PhiSpec },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivacySpec {
    pub graph: String,
    pub oracle: OracleSpec,
    pub values: ValuesSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Solve(SolveSpec),
    Gossip(GossipSpec),
    Privacy(PrivacySpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub seed: u64,
    pub trials: usize,
    pub stopping: Stopping,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    /// Reads every field, rejecting unknown keys and out-of-range values.
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let f = Fields::new(raw);
        let kind = f.choice("kind", None, &["solve", "gossip", "privacy"])?;
        let seed = f.or("seed", 0u64)?;
        let trials = f.or("trials", 1usize)?;
        if trials == 0 {
            return Err(HarnessError::field("trials", "must be positive"));
        }
        let max_iterations = f.or("iters", 1000u64)?;
        let target: Option<f64> = f.get("target")?;
        if let Some(t) = target {
            if !(t > 0.0 && t < 1.0) {
                return Err(HarnessError::field("target", format!("must lie in (0, 1), got {t}")));
            }
        }
        let record_every = f.or("record_every", 1u64)?;
        if record_every == 0 {
            return Err(HarnessError::field("record_every", "must be positive"));
        }
        let out = f.get::<PathBuf>("out")?;
        let problem = match kind {
            "solve" => Problem::Solve(solve_spec(&f)?),
            "gossip" => Problem::Gossip(gossip_spec(&f)?),
            _ => Problem::Privacy(privacy_spec(&f)?),
        };
        f.finish()?;
        Ok(Self {
            problem,
            seed,
            trials,
            stopping: Stopping {
                max_iterations,
                target,
                record_every,
            },
            out,
        })
    }
}

fn omega(f: &Fields, key: &str) -> Result<f64> {
    let w = f.or(key, 1.0)?;
    if w > 0.0 && w < 2.0 {
        Ok(w)
    } else {
        Err(HarnessError::field(key, format!("must lie in (0, 2), got {w}")))
    }
}

fn beta(f: &Fields, key: &str) -> Result<f64> {
    let b = f.or(key, 0.0)?;
    if (0.0..1.0).contains(&b) {
        Ok(b)
    } else {
        Err(HarnessError::field(key, format!("must lie in [0, 1), got {b}")))
    }
}

fn positive(f: &Fields, key: &str) -> Result<usize> {
    let v: usize = f.req(key)?;
    if v == 0 {
        return Err(HarnessError::field(key, "must be positive"));
    }
    Ok(v)
}

fn acc_option(f: &Fields) -> Result<(AccOption, Option<f64>)> {
    let option = match f.choice("acc.option", Some("2"), &["1", "2"])? {
        "1" => AccOption::One,
        _ => AccOption::Two,
    };
    let key = if option == AccOption::One {
        "acc.lambda"
    } else {
        "acc.nu"
    };
    Ok((option, f.get(key)?))
}

fn solve_spec(f: &Fields) -> Result<SolveSpec> {
    let spec: String = f.req("system")?;
    let system = SystemSpec::parse(&spec, f.get("system.rhs")?).map_err(|r| HarnessError::field("system", r))?;
    let geometry = match f.choice("system.geometry", Some("identity"), &["identity", "diagonal"])? {
        "identity" => GeometrySpec::Identity,
        _ => GeometrySpec::Diagonal,
    };
    let sketch = match f.choice(
        "sketch.variant",
        Some("coordinate"),
        &["coordinate", "block", "gaussian"],
    )? {
        "coordinate" => SketchSpec::Coordinate(match f.str("sketch.probabilities").unwrap_or("row-norms") {
            "row-norms" => Probabilities::RowNorms,
            "uniform" => Probabilities::Uniform,
            list => Probabilities::Explicit(
                list.split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| {
                        HarnessError::field(
                            "sketch.probabilities",
                            "expected row-norms, uniform or a comma-separated list",
                        )
                    })?,
            ),
        }),
        "block" => SketchSpec::Block {
            tau: positive(f, "sketch.tau")?,
        },
        _ => SketchSpec::Gaussian,
    };
    let omega = omega(f, "solver.omega")?;
    let method = match f.choice(
        "solver.variant",
        Some("basic"),
        &["basic", "momentum", "smomentum", "accelerated", "inexact"],
    )? {
        "basic" => MethodSpec::Basic,
        "momentum" => MethodSpec::Momentum {
            beta: beta(f, "momentum.beta")?,
        },
        "smomentum" => {
            let gamma: f64 = f.req("momentum.gamma")?;
            if !(gamma >= 0.0) {
                return Err(HarnessError::field(
                    "momentum.gamma",
                    format!("must be nonnegative, got {gamma}"),
                ));
            }
            MethodSpec::StochasticMomentum { gamma }
        }
        "accelerated" => {
            let (option, value) = acc_option(f)?;
            MethodSpec::Accelerated { option, value }
        }
        _ => MethodSpec::Inexact(inexact_spec(f)?),
    };
    if matches!(
        method,
        MethodSpec::Accelerated { .. } | MethodSpec::StochasticMomentum { .. }
    ) && geometry != GeometrySpec::Identity
    {
        return Err(HarnessError::field(
            "system.geometry",
            "this variant needs the identity geometry",
        ));
    }
    Ok(SolveSpec {
        system,
        geometry,
        sketch,
        omega,
        method,
    })
}

fn inexact_spec(f: &Fields) -> Result<InexactnessSpec> {
    Ok(
        match f.choice("inexact.variant", None, &["structured", "abstract", "norm", "function"])? {
            "structured" => InexactnessSpec::StructuredInner {
                inner: match f.choice("inexact.inner", Some("cg"), &["cg", "sp"])? {
                    "cg" => InnerSolver::Cg,
                    _ => InnerSolver::SketchProject,
                },
                r: positive(f, "inexact.r")?,
            },
            "abstract" => {
                let raw = f
                    .str("inexact.sigma")
                    .ok_or_else(|| HarnessError::field("inexact.sigma", "required"))?;
                InexactnessSpec::AbstractBounded(parse_sigma(raw).map_err(|r| HarnessError::field("inexact.sigma", r))?)
            }
            "norm" => InexactnessSpec::NormProportional(f.req("inexact.q")?),
            _ => InexactnessSpec::FunctionProportional(f.req("inexact.q")?),
        },
    )
}

/// A constant `0.1` or `geometric:a,ratio`.
fn parse_sigma(s: &str) -> std::result::Result<SigmaSchedule, String> {
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| format!("cannot parse `{v}` as a number"))
    };
    match s.strip_prefix("geometric:") {
        Some(rest) => {
            let (a, ratio) = rest.split_once(',').ok_or("expected geometric:a,ratio")?;
            Ok(SigmaSchedule::Geometric {
                a: num(a)?,
                ratio: num(ratio)?,
            })
        }
        None => Ok(SigmaSchedule::Constant(num(s)?)),
    }
}

fn values(f: &Fields) -> Result<ValuesSpec> {
    Ok(
        match f.choice("values.kind", Some("gaussian"), &["gaussian", "linear", "spike"])? {
            "gaussian" => ValuesSpec::Gaussian,
            "linear" => ValuesSpec::Linear,
            _ => ValuesSpec::Spike,
        },
    )
}

fn gossip_spec(f: &Fields) -> Result<GossipSpec> {
    let graph: String = f.req("graph")?;
    let weights = match f.str("protocol.weights").unwrap_or("uniform") {
        "uniform" => WeightSpec::Uniform,
        "degree" => WeightSpec::Degree,
        w => match w.strip_prefix("file:") {
            Some(p) => WeightSpec::File(PathBuf::from(p)),
            None => {
                return Err(HarnessError::field(
                    "protocol.weights",
                    format!("unknown value `{w}`; expected uniform, degree or file:PATH"),
                ))
            }
        },
    };
    let kind = f.choice(
        "protocol.kind",
        Some("pairwise"),
        &["pairwise", "laplacian", "block", "momentum", "acc", "dual"],
    )?;
    if weights != WeightSpec::Uniform && !matches!(kind, "pairwise" | "laplacian") {
        return Err(HarnessError::field(
            "protocol.weights",
            format!("`{kind}` gossip runs with uniform weights only"),
        ));
    }
    let protocol = match kind {
        "pairwise" => ProtocolSpec::Pairwise {
            omega: omega(f, "protocol.omega")?,
        },
        "laplacian" => ProtocolSpec::Laplacian {
            omega: omega(f, "protocol.omega")?,
            sampling: match f.choice("protocol.sampling", Some("rownorms"), &["rownorms", "uniform"])? {
                "rownorms" => NodeSampling::RowNorms,
                _ => NodeSampling::Uniform,
            },
        },
        "block" => ProtocolSpec::Block {
            tau: positive(f, "protocol.tau")?,
            omega: omega(f, "protocol.omega")?,
            beta: beta(f, "protocol.beta")?,
        },
        "momentum" => ProtocolSpec::Momentum {
            omega: omega(f, "protocol.omega")?,
            beta: beta(f, "protocol.beta")?,
        },
        "acc" => {
            let (option, value) = acc_option(f)?;
            ProtocolSpec::Acc { option, value }
        }
        _ => ProtocolSpec::Dual {
            tau: positive(f, "protocol.tau")?,
        },
    };
    Ok(GossipSpec {
        graph,
        weights,
        protocol,
        values: values(f)?,
    })
}

fn privacy_spec(f: &Fields) -> Result<PrivacySpec> {
    let graph: String = f.req("graph")?;
    let oracle = match f.choice("privacy.oracle", None, &["binary", "gap", "noise"])? {
        "binary" => {
            let schedule = match f.choice(
                "privacy.schedule",
                Some("adaptive"),
                &["constant", "invt", "invsqrt", "optimal", "adaptive"],
            )? {
                "constant" => StepsizeSchedule::Constant(f.req("privacy.lambda")?),
                "invt" => StepsizeSchedule::InvT,
                "invsqrt" => StepsizeSchedule::InvSqrtT(f.req("privacy.a")?),
                "optimal" => StepsizeSchedule::Optimal {
                    r: f.req("privacy.R")?,
                    horizon: f.req("iters")?,
                },
                _ => StepsizeSchedule::Adaptive,
            };
            schedule
                .validate()
                .map_err(|e| HarnessError::field("privacy.schedule", e.to_string()))?;
            OracleSpec::Binary(schedule)
        }
        "gap" => {
            let eps: f64 = f.req("privacy.epsilon")?;
            if !(eps > 0.0) {
                return Err(HarnessError::field(
                    "privacy.epsilon",
                    format!("must be positive, got {eps}"),
                ));
            }
            OracleSpec::Gap(eps)
        }
        _ => {
            let sigma: f64 = f.or("privacy.sigma", 1.0)?;
            if !(sigma >= 0.0) {
                return Err(HarnessError::field(
                    "privacy.sigma",
                    format!("must be nonnegative, got {sigma}"),
                ));
            }
            let raw = f
                .str("privacy.phi")
                .ok_or_else(|| HarnessError::field("privacy.phi", "required"))?;
            let phi = parse_phi(raw).map_err(|r| HarnessError::field("privacy.phi", r))?;
            OracleSpec::Noise { sigma, phi }
        }
    };
    Ok(PrivacySpec {
        graph,
        oracle,
        values: values(f)?,
    })
}

fn parse_phi(s: &str) -> std::result::Result<PhiSpec, String> {
    let num = |v: &str| v.parse::<f64>().map_err(|_| format!("cannot parse `{v}` as a number"));
    if let Some(v) = s.strip_prefix("const:") {
        let p = num(v)?;
        if (0.0..1.0).contains(&p) {
            return Ok(PhiSpec::Const(p));
        }
        return Err(format!("must lie in [0, 1), got {p}"));
    }
    if let Some(v) = s.strip_prefix("gamma:") {
        let g = num(v)?;
        if g >= 0.0 {
            return Ok(PhiSpec::Gamma(g));
        }
        return Err(format!("gamma must be nonnegative, got {g}"));
    }
    Err(format!("expected const:VALUE or gamma:VALUE, got `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_solve() {
        let c = ExperimentConfig::parse("kind = solve\nsystem = gaussian:5x3\n").unwrap();
        assert_eq!(c.trials, 1);
        assert_eq!(c.stopping.max_iterations, 1000);
        match c.problem {
            Problem::Solve(s) => {
                assert_eq!(s.system, SystemSpec::Gaussian { rows: 5, cols: 3 });
                assert_eq!(s.method, MethodSpec::Basic);
                assert_eq!(s.sketch, SketchSpec::Coordinate(Probabilities::RowNorms));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn field_paths_in_errors() {
        let err = ExperimentConfig::parse("kind = solve\nsystem = gaussian:5xq\n").unwrap_err();
        assert!(matches!(err, HarnessError::Config { ref field, .. } if field == "system"));
        let err = ExperimentConfig::parse("kind = solve\nsystem = gaussian:5x3\nsolver.omga = 1\n").unwrap_err();
        assert!(matches!(err, HarnessError::Config { ref field, .. } if field == "solver.omga"));
        let err =
            ExperimentConfig::parse("kind = gossip\ngraph = cycle:5\nprotocol.kind = momentum\nprotocol.beta = 1.5\n")
                .unwrap_err();
        assert!(matches!(err, HarnessError::Config { ref field, .. } if field == "protocol.beta"));
        let err = ExperimentConfig::parse("kind = solve\nkind = gossip\n").unwrap_err();
        assert!(matches!(err, HarnessError::Syntax { line: 2, .. }));
        assert!(matches!(
            ExperimentConfig::parse("just text"),
            Err(HarnessError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn overrides_replace() {
        let mut raw = RawConfig::parse("kind = gossip\ngraph = cycle:5\n").unwrap();
        raw.apply_override("graph=path:7").unwrap();
        raw.apply_override("protocol.kind = block").unwrap();
        raw.apply_override("protocol.tau=2").unwrap();
        let c = ExperimentConfig::from_raw(&raw).unwrap();
        match c.problem {
            Problem::Gossip(g) => {
                assert_eq!(g.graph, "path:7");
                assert_eq!(
                    g.protocol,
                    ProtocolSpec::Block {
                        tau: 2,
                        omega: 1.0,
                        beta: 0.0
                    }
                );
            }
            _ => panic!("wrong kind"),
        }
        assert!(raw.apply_override("novalue=").is_err());
    }

    #[test]
    fn system_and_schedule_forms() {
        assert_eq!(
            SystemSpec::parse("sparse:30x10:3", None),
            Ok(SystemSpec::Sparse {
                rows: 30,
                cols: 10,
                nnz: 3
            })
        );
        assert_eq!(SystemSpec::parse("spd:4", None), Ok(SystemSpec::Spd { n: 4 }));
        assert!(SystemSpec::parse("sparse:30x10:11", None).is_err());
        assert!(SystemSpec::parse("gaussian:0x3", None).is_err());
        assert!(SystemSpec::parse("spd:4", Some("b.txt".into())).is_err());
        assert_eq!(parse_sigma("0.5"), Ok(SigmaSchedule::Constant(0.5)));
        assert_eq!(
            parse_sigma("geometric:1,0.9"),
            Ok(SigmaSchedule::Geometric { a: 1.0, ratio: 0.9 })
        );
        let c = ExperimentConfig::parse(
            "kind = solve\nsystem = spd:6\nsketch.variant = coordinate\nsketch.probabilities = 0.5, 0.1, 0.1, 0.1, 0.1, 0.1\n",
        )
        .unwrap();
        match c.problem {
            Problem::Solve(s) => {
                assert!(matches!(s.sketch, SketchSpec::Coordinate(Probabilities::Explicit(ref p)) if p.len() == 6))
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn phi_forms() {
        assert_eq!(parse_phi("const:0.5"), Ok(PhiSpec::Const(0.5)));
        assert_eq!(parse_phi("gamma:0.2"), Ok(PhiSpec::Gamma(0.2)));
        assert!(parse_phi("const:1.0").is_err());
        assert!(parse_phi("0.3").is_err());
    }
}
