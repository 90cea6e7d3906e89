//! Experiment configuration files.
//!
//! ```json
//! {"seed": 7, "experiment": "moments", "params": {"r": 2, "s": 0.2}}
//! ```
//!
//! Every parameter block is checked against the preconditions of the library
//! call it feeds before any work starts.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sofic_core::indepsets::GoodSetParams;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    SampleGraph(SampleGraph),
    SoficCheck(SoficCheck),
    Moments(Moments),
    IndepEnumerate(IndepEnumerate),
    Planted(Planted),
    Cluster(Cluster),
    Shatter(Shatter),
    Homology(Homology),
    BernoulliContract(Contract),
    DiffuseContract(Diffuse),
    PartitionBalance(PartitionBalance),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SampleGraph(_) => "sample-graph",
            Experiment::SoficCheck(_) => "sofic-check",
            Experiment::Moments(_) => "moments",
            Experiment::IndepEnumerate(_) => "indep-enumerate",
            Experiment::Planted(_) => "planted",
            Experiment::Cluster(_) => "cluster",
            Experiment::Shatter(_) => "shatter",
            Experiment::Homology(_) => "homology",
            Experiment::BernoulliContract(_) => "bernoulli-contract",
            Experiment::DiffuseContract(_) => "diffuse-contract",
            Experiment::PartitionBalance(_) => "partition-balance",
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Experiment::SampleGraph(p) => p.validate(),
            Experiment::SoficCheck(p) => p.validate(),
            Experiment::Moments(p) => p.validate(),
            Experiment::IndepEnumerate(p) => p.validate(),
            Experiment::Planted(p) => p.validate(),
            Experiment::Cluster(p) => p.validate(),
            Experiment::Shatter(p) => p.validate(),
            Experiment::Homology(p) => p.validate(),
            Experiment::BernoulliContract(p) => p.validate(),
            Experiment::DiffuseContract(p) => p.validate(),
            Experiment::PartitionBalance(p) => p.validate(),
        }
    }
}

fn require(ok: bool, what: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(what.into()))
    }
}

fn unit_interval(name: &str, x: f64) -> Result<(), CliError> {
    require((0.0..=1.0).contains(&x), format!("{name} must lie in [0, 1], got {x}"))
}

fn distribution(name: &str, p: &[f64]) -> Result<(), CliError> {
    require(p.len() >= 2, format!("{name} needs at least two letters"))?;
    require(p.iter().all(|&x| (0.0..=1.0).contains(&x)), format!("{name} entries must lie in [0, 1]"))?;
    let total: f64 = p.iter().sum();
    require((total - 1.0).abs() <= 1e-9, format!("{name} must sum to 1, got {total}"))
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphModel {
    Perm,
    Config,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGraph {
    pub model: GraphModel,
    /// Rank for the permutation model; degree is `2r`.
    #[serde(default)]
    pub r: usize,
    /// Degree for the configuration model.
    #[serde(default)]
    pub d: usize,
    pub n: usize,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default = "default_max_cycle")]
    pub max_cycle: usize,
}

fn default_max_cycle() -> usize {
    4
}

impl SampleGraph {
    fn validate(&self) -> Result<(), CliError> {
        require(self.n >= 1, "n must be >= 1")?;
        require(self.count >= 1, "count must be >= 1")?;
        require(self.max_cycle <= 8, "max_cycle must be <= 8")?;
        match self.model {
            GraphModel::Perm => require(self.r >= 1, "permutation model needs r >= 1"),
            GraphModel::Config => {
                require(self.d >= 1, "configuration model needs d >= 1")?;
                require((self.d * self.n) % 2 == 0, format!("d*n must be even, got d={} n={}", self.d, self.n))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoficCheck {
    pub r: usize,
    pub n: usize,
    /// Radius of the word ball checked.
    pub radius: usize,
    pub delta: f64,
    #[serde(default = "one")]
    pub trials: usize,
    /// Also check the product with a trivial action on this many copies.
    #[serde(default)]
    pub trivial_copies: Option<usize>,
}

impl SoficCheck {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1 && self.n >= 1, "requires r >= 1 and n >= 1")?;
        require(self.radius <= 6, "radius must be <= 6")?;
        unit_interval("delta", self.delta)?;
        require(self.trials >= 1, "trials must be >= 1")?;
        require(self.trivial_copies != Some(0), "trivial_copies must be >= 1")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub n: usize,
    pub w: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Moments {
    pub r: usize,
    pub s: f64,
    /// Second density for the pair exponent; defaults to `s`.
    #[serde(default)]
    pub s2: Option<f64>,
    /// Overlap density; enables the pair rows.
    #[serde(default)]
    pub t: Option<f64>,
    /// Finite sizes for `(1/n) log E[#I_⌊sn⌋]`.
    #[serde(default)]
    pub ns: Vec<usize>,
    #[serde(default)]
    pub monte_carlo: Option<MonteCarloParams>,
}

impl Moments {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1, "r must be >= 1")?;
        require((0.0..0.5).contains(&self.s), format!("s must lie in [0, 1/2), got {}", self.s))?;
        if let Some(s2) = self.s2 {
            require((0.0..0.5).contains(&s2), format!("s2 must lie in [0, 1/2), got {s2}"))?;
            require(self.t.is_some(), "s2 requires t")?;
        }
        if let Some(t) = self.t {
            let s2 = self.s2.unwrap_or(self.s);
            require(t >= 0.0 && t <= self.s.min(s2), format!("t must lie in [0, min(s, s2)], got {t}"))?;
        }
        require(self.ns.iter().all(|&n| n >= 1), "ns entries must be >= 1")?;
        if let Some(mc) = &self.monte_carlo {
            require(mc.samples >= 2, "monte_carlo.samples must be >= 2")?;
            require(mc.n <= 64 && mc.w <= mc.n, "monte_carlo needs w <= n <= 64")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndepEnumerate {
    pub r: usize,
    pub n: usize,
    pub w_min: usize,
    pub w_max: usize,
    #[serde(default)]
    pub budget: Option<usize>,
    /// Write the sets themselves, not just their counts.
    #[serde(default)]
    pub write_sets: bool,
}

impl IndepEnumerate {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1, "r must be >= 1")?;
        require(self.n >= 1 && self.n <= 64, "n must lie in 1..=64")?;
        require(self.w_min <= self.w_max && self.w_max <= self.n, "requires w_min <= w_max <= n")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Planted {
    pub r: usize,
    pub big_r: usize,
    pub n: usize,
    pub w: usize,
    pub samples: usize,
}

impl Planted {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1 && self.big_r >= self.r, "requires 1 <= r <= big_r")?;
        require(self.n <= 24, "n must be <= 24 for exact per-graph counts")?;
        require(2 * self.w <= self.n, "requires 2w <= n")?;
        require(self.samples >= 2, "samples must be >= 2")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cluster {
    pub r: usize,
    pub n: usize,
    pub s: f64,
    pub eps: f64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub good_set: Option<GoodSetParams>,
}

impl Cluster {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1, "r must be >= 1")?;
        require(self.n >= 2 && self.n <= 64, "n must lie in 2..=64")?;
        require(self.s > 0.0 && self.s < 0.5, format!("s must lie in (0, 1/2), got {}", self.s))?;
        require(self.eps >= 0.0, "eps must be >= 0")?;
        require(self.trials >= 1, "trials must be >= 1")?;
        if let Some(g) = &self.good_set {
            g.validate().map_err(|e| CliError::Config(format!("good_set: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shatter {
    pub r: usize,
    pub n: usize,
    pub s: f64,
    pub eps: f64,
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub budget: Option<usize>,
}

impl Shatter {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1, "r must be >= 1")?;
        require(self.n >= 1 && self.n <= 64, "n must lie in 1..=64")?;
        require((0.0..=1.0).contains(&self.s), "s must lie in [0, 1]")?;
        require(self.eps >= 0.0, "eps must be >= 0")?;
        require(!self.kappas.is_empty(), "kappas must be nonempty")?;
        for &k in &self.kappas {
            require(k > 0.0 && k <= 1.0, format!("kappa must lie in (0, 1], got {k}"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ball {
    /// Marginal of the product target.
    pub marginal: Vec<f64>,
    /// TV radius; values above 1 accept every labeling.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Homology {
    pub r: usize,
    pub n: usize,
    pub window_radius: usize,
    pub o1: Ball,
    pub o2: Ball,
    pub kappa1: f64,
    pub kappa2: f64,
    pub d_max: usize,
    /// Cycle length bound; omitted means unbounded.
    #[serde(default)]
    pub l: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
}

impl Homology {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1 && self.n >= 1 && self.n <= 24, "requires r >= 1 and 1 <= n <= 24")?;
        require(self.window_radius <= 2, "window_radius must be <= 2")?;
        distribution("o1.marginal", &self.o1.marginal)?;
        distribution("o2.marginal", &self.o2.marginal)?;
        require(self.o1.marginal.len() == self.o2.marginal.len(), "o1 and o2 need the same alphabet")?;
        require(self.o1.radius > 0.0 && self.o2.radius > 0.0, "radii must be > 0")?;
        require(self.kappa1 > 0.0 && self.kappa1 <= self.kappa2, "requires 0 < kappa1 <= kappa2")?;
        require(self.d_max <= 3, "d_max must be <= 3")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contract {
    pub r: usize,
    pub n: usize,
    pub window_radius: usize,
    pub marginal: Vec<f64>,
    pub o1_radius: f64,
    pub o2_radius: f64,
    pub microstates: usize,
    pub steps: usize,
    pub delta: f64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default = "default_flips")]
    pub search_flips: usize,
}

fn default_flips() -> usize {
    2_000_000
}

impl Contract {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1 && self.n >= 1, "requires r >= 1 and n >= 1")?;
        require(self.window_radius <= 2, "window_radius must be <= 2")?;
        distribution("marginal", &self.marginal)?;
        require(self.o1_radius > 0.0 && self.o1_radius <= self.o2_radius, "requires 0 < o1_radius <= o2_radius")?;
        require(self.microstates >= 1, "microstates must be >= 1")?;
        require(self.steps >= 1, "steps must be >= 1")?;
        require(self.delta > 0.0, "delta must be > 0")?;
        require(self.trials >= 1, "trials must be >= 1")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diffuse {
    pub r: usize,
    /// Size of each copy.
    pub n: usize,
    /// Number of copies in the product with the trivial action.
    pub copies: usize,
    pub window_radius: usize,
    pub marginal: Vec<f64>,
    pub o1_radius: f64,
    pub o2_radius: f64,
    pub microstates: usize,
    pub delta: f64,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default = "default_flips")]
    pub search_flips: usize,
}

impl Diffuse {
    fn validate(&self) -> Result<(), CliError> {
        require(self.r >= 1 && self.n >= 1, "requires r >= 1 and n >= 1")?;
        require(self.copies >= 1, "copies must be >= 1")?;
        require(self.window_radius <= 2, "window_radius must be <= 2")?;
        distribution("marginal", &self.marginal)?;
        require(self.o1_radius > 0.0 && self.o1_radius <= self.o2_radius, "requires 0 < o1_radius <= o2_radius")?;
        require(self.microstates >= 1, "microstates must be >= 1")?;
        require(self.delta > 0.0, "delta must be > 0")?;
        require(self.trials >= 1, "trials must be >= 1")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionBalance {
    /// Number of unit-mass atoms.
    pub atoms: usize,
    /// Number of random functions; 1 runs the single-function balancer.
    pub functions: usize,
    /// Function values are multiples of `1/scale`.
    pub scale: u64,
    pub delta: f64,
    pub eps: f64,
    #[serde(default = "one")]
    pub trials: usize,
}

impl PartitionBalance {
    fn validate(&self) -> Result<(), CliError> {
        require(self.atoms >= 1, "atoms must be >= 1")?;
        require(self.functions >= 1, "functions must be >= 1")?;
        require(self.scale >= 1 && self.scale <= sofic_core::partition::MAX_SCALE, "scale must lie in 1..=2^20")?;
        require(self.delta > 0.0 && self.delta < 0.25, format!("requires delta in (0, 1/4), got {}", self.delta))?;
        let cap = if self.functions == 1 { self.delta / 200.0 } else { (self.delta / 100.0).powi(self.functions as i32) };
        require(self.eps > 0.0 && self.eps < cap, format!("requires 0 < eps < {cap:e} for {} function(s), got {}", self.functions, self.eps))?;
        require(1.0 / (self.atoms as f64) < self.eps, format!("requires atom weight 1/{} < eps", self.atoms))?;
        require(self.trials >= 1, "trials must be >= 1")
    }
}
