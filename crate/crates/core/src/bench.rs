//! Benchmark harness: generates the graphs of a plan, relabels each one at
//! random, and times every engine and mode on it.
//!
//! A plan is TOML:
//!
//! ```toml
//! seed = 7            # master seed for the relabellings
//! engines = ["dfs", "bfs"]
//! modes = ["group", "canonical"]
//! min_seconds = 0.1   # repeat a run until this much time has accumulated
//!
//! [[graphs]]
//! family = "gnp"
//! n = 100
//! p = 0.5
//! seed = 3
//! ```

use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{run, EngineConfig, EngineResult, Mode, Strategy};
use crate::error::{Error, Result};
use crate::generators::{generate, random_relabel, FamilySpec};
use crate::graph::{Colouring, Graph};
use crate::target::SelectorStrategy;

const MAX_REPEATS: usize = 10_000;

fn default_engines() -> Vec<String> {
    vec!["dfs".into(), "bfs".into()]
}

fn default_modes() -> Vec<String> {
    vec!["group".into(), "canonical".into()]
}

fn default_min_seconds() -> f64 {
    0.1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchPlan {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_engines")]
    pub engines: Vec<String>,
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    #[serde(default = "default_min_seconds")]
    pub min_seconds: f64,
    pub graphs: Vec<FamilySpec>,
}

impl BenchPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: BenchPlan = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("bench plan: {e}")))?;
        plan.strategies()?;
        plan.parsed_modes()?;
        if plan.min_seconds.is_nan() || plan.min_seconds < 0.0 {
            return Err(Error::InvalidParameter("min_seconds must be non-negative".into()));
        }
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn strategies(&self) -> Result<Vec<Strategy>> {
        self.engines
            .iter()
            .map(|s| s.parse().map_err(Error::InvalidParameter))
            .collect()
    }

    fn parsed_modes(&self) -> Result<Vec<Mode>> {
        self.modes.iter().map(|s| s.parse().map_err(Error::InvalidParameter)).collect()
    }
}

/// One CSV row. Everything except `repeats` and the two time columns is a
/// function of the plan alone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub instance: usize,
    pub engine: String,
    pub mode: String,
    pub repeats: usize,
    pub mean_seconds: f64,
    pub median_seconds: f64,
    pub nodes: u64,
    pub prunes: u64,
    pub generators: usize,
    pub group_order: String,
    /// SHA-256 of the certificate bytes, empty in group-only mode.
    pub cert_sha256: String,
}

/// Settings applied to every cell on top of the plan.
#[derive(Clone, Debug, Default)]
pub struct BenchOptions {
    pub selector: Option<SelectorStrategy>,
    pub budget: Option<u64>,
    pub no_shortcuts: bool,
}

fn mix(master: u64, a: u64, b: u64) -> u64 {
    let mut z = master ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn cert_digest(result: &EngineResult) -> String {
    result
        .canonical
        .as_ref()
        .map(|c| hex::encode(Sha256::digest(c.certificate.as_bytes())))
        .unwrap_or_default()
}

/// Runs `cfg` on `g` until `min` has accumulated; returns the first result
/// and every wall time.
pub fn time_runs(g: &Graph, p: &Colouring, cfg: &EngineConfig, min: Duration) -> Result<(EngineResult, Vec<f64>)> {
    let mut times = Vec::new();
    let mut total = Duration::ZERO;
    let mut first = None;
    while times.is_empty() || (total < min && times.len() < MAX_REPEATS) {
        let start = Instant::now();
        let result = run(g, p, cfg)?;
        let elapsed = start.elapsed();
        total += elapsed;
        times.push(elapsed.as_secs_f64());
        first.get_or_insert(result);
    }
    Ok((first.unwrap(), times))
}

fn mean_median(times: &[f64]) -> (f64, f64) {
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    };
    (mean, median)
}

pub fn run_plan(plan: &BenchPlan, opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let strategies = plan.strategies()?;
    let modes = plan.parsed_modes()?;
    let min = Duration::from_secs_f64(plan.min_seconds);
    let mut records = Vec::new();
    for (entry, spec) in plan.graphs.iter().enumerate() {
        let generated = generate(spec)?;
        for (instance, base) in generated.graphs().into_iter().enumerate() {
            let (g, _) = random_relabel(base, mix(plan.seed, entry as u64, instance as u64));
            let p = Colouring::unit(g.n());
            for &strategy in &strategies {
                for &mode in &modes {
                    let mut cfg = EngineConfig::new(mode, strategy);
                    cfg.selector = opts.selector;
                    cfg.node_budget = opts.budget;
                    if opts.no_shortcuts {
                        cfg = cfg.without_shortcuts();
                    }
                    let (result, times) = time_runs(&g, &p, &cfg, min)?;
                    let (mean, median) = mean_median(&times);
                    log::info!("{spec} #{instance} {strategy}/{mode}: {median:.6}s");
                    records.push(BenchRecord {
                        family: spec.family.name().to_string(),
                        n: g.n(),
                        seed: spec.seed,
                        instance,
                        engine: strategy.to_string(),
                        mode: mode.to_string(),
                        repeats: times.len(),
                        mean_seconds: mean,
                        median_seconds: median,
                        nodes: result.stats.nodes,
                        prunes: result.stats.prunes(),
                        generators: result.generators.len(),
                        group_order: result.group_order.to_string(),
                        cert_sha256: cert_digest(&result),
                    });
                }
            }
        }
    }
    Ok(records)
}

pub fn write_csv<W: std::io::Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
