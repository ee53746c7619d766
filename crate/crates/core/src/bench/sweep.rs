use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::baselines::{baseline_farthest_first, baseline_kmeanspp, BaselineMode};
use crate::error::{Error, Result};
use crate::instances::{gen_mst_metric_lb, gen_sbm, LabeledInstance, PolicyKind, ScriptedInstance};
use crate::kcenter::{kcenter_solve, strong_point_bound, KCenterConfig};
use crate::kcluster::{kcluster_solve, KClusterConfig, Objective};
use crate::mst::{mst_dense, mst_weak_solve, MstConfig};
use crate::oracle::{CorruptionMask, Distances, Evaluator, LedgerSnapshot, OracleSet, PointId, StrongOracle};
use crate::stats::{median, spearman};

/// Lloyd iterations of the strong k-means++ baseline.
pub const LLOYD_ITERS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SbmKcenter,
    SbmKmeans,
    MstLb,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sbm-kcenter" => Suite::SbmKcenter,
            "sbm-kmeans" => Suite::SbmKmeans,
            "mst-lb" => Suite::MstLb,
            other => return Err(Error::InvalidConfig(format!("unknown suite {other:?}"))),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::SbmKcenter => "sbm-kcenter",
            Suite::SbmKmeans => "sbm-kmeans",
            Suite::MstLb => "mst-lb",
        }
    }

    /// The algorithm under study, whose scale knob the sweep varies.
    pub fn algorithm(self) -> &'static str {
        match self {
            Suite::SbmKcenter => "kcenter",
            Suite::SbmKmeans => "kmeans",
            Suite::MstLb => "mst-weak",
        }
    }

    /// Reference the competitive ratio divides by.
    pub fn strong_baseline(self) -> &'static str {
        match self {
            Suite::SbmKcenter => "farthest-first-strong",
            Suite::SbmKmeans => "kmeanspp-strong",
            Suite::MstLb => "mst-exact",
        }
    }

    pub fn weak_baseline(self) -> Option<&'static str> {
        match self {
            Suite::SbmKcenter => Some("farthest-first-weak"),
            Suite::SbmKmeans => Some("kmeanspp-weak"),
            Suite::MstLb => None,
        }
    }

    /// Scale multipliers swept when none are given.
    pub fn default_scales(self) -> Vec<f64> {
        match self {
            Suite::SbmKcenter => vec![0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2, 0.25],
            Suite::SbmKmeans => vec![0.03, 0.04, 0.05, 0.06, 0.08],
            Suite::MstLb => vec![1.0],
        }
    }
}

/// Cross product of algorithm, scale, delta and seed for one suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepGrid {
    pub suite: Suite,
    pub n: usize,
    pub k: usize,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    /// `scale` for k-center, `cap_scale` for k-means; unused by the MST suite.
    pub scales: Vec<f64>,
    pub policy: PolicyKind,
    /// Also run the strong and weak baselines once per `(delta, seed)`.
    pub baselines: bool,
}

impl SweepGrid {
    pub fn new(suite: Suite, n: usize, k: usize, deltas: Vec<f64>, seeds: Vec<u64>) -> Self {
        Self { suite, n, k, deltas, seeds, scales: suite.default_scales(), policy: PolicyKind::ClusterFlip, baselines: true }
    }

    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &seed in &self.seeds {
            for &delta in &self.deltas {
                if self.baselines {
                    out.push(Cell { algorithm: self.suite.strong_baseline(), delta, seed, scale: None });
                    if let Some(w) = self.suite.weak_baseline() {
                        out.push(Cell { algorithm: w, delta, seed, scale: None });
                    }
                }
                match self.suite {
                    Suite::MstLb => out.push(Cell { algorithm: self.suite.algorithm(), delta, seed, scale: None }),
                    _ => {
                        for &s in &self.scales {
                            out.push(Cell { algorithm: self.suite.algorithm(), delta, seed, scale: Some(s) });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    algorithm: &'static str,
    delta: f64,
    seed: u64,
    scale: Option<f64>,
}

/// Everything needed to rerun one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub suite: Suite,
    pub algorithm: String,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub seed: u64,
    pub scale: Option<f64>,
    pub policy: PolicyKind,
    pub mask_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub config: ConfigEcho,
    pub strong_point_count: u64,
    pub strong_edge_count: u64,
    pub weak_count: u64,
    /// Cost under the true metric: max radius for k-center, sum of squared
    /// distances for k-means, tree weight for MST.
    pub cost: f64,
    pub log10_cost: f64,
    pub wall_ms: f64,
    pub error: Option<String>,
    /// Algorithm-specific diagnostics.
    pub extra: serde_json::Value,
}

impl RunRecord {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn delta(&self) -> f64 {
        self.config.delta
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn ledger(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            weak_count: self.weak_count,
            strong_point_count: self.strong_point_count,
            strong_edge_count: self.strong_edge_count,
        }
    }
}

/// Mask seed of a record. The same seed at every delta gives nested corrupt
/// sets, so raising delta only adds corrupted pairs.
pub fn mask_seed(seed: u64) -> u64 {
    seed ^ 0x5e_ed0f_c0dd_u64
}

enum Inst {
    Sbm(LabeledInstance),
    Lb(ScriptedInstance),
}

/// Exact distances of a strong oracle whose points are all revealed.
struct StrongAll<'a>(&'a StrongOracle, usize);

impl Distances for StrongAll<'_> {
    fn len(&self) -> usize {
        self.1
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.0.distance(PointId::from_idx(i), PointId::from_idx(j)).expect("all points revealed")
    }
}

/// Runs every cell of the grid. Cells run in parallel; the output is in grid
/// order (seed, delta, algorithm, scale). A failing cell yields a record with
/// `error` set and infinite cost.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<RunRecord>> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Ok(vec![]);
    }
    let mut instances = Vec::new();
    for &seed in &grid.seeds {
        let inst = match grid.suite {
            Suite::MstLb => grid.deltas.iter().map(|&d| gen_mst_metric_lb(grid.n, seed, d).map(Inst::Lb)).collect::<Result<Vec<_>>>()?,
            _ => vec![Inst::Sbm(gen_sbm(grid.n, grid.k, seed)?)],
        };
        instances.push(inst);
    }
    let records = cells
        .par_iter()
        .map(|cell| {
            let si = grid.seeds.iter().position(|&s| s == cell.seed).expect("seed in grid");
            let inst = match grid.suite {
                Suite::MstLb => {
                    let di = grid.deltas.iter().position(|&d| d == cell.delta).expect("delta in grid");
                    &instances[si][di]
                }
                _ => &instances[si][0],
            };
            run_cell(grid, cell, inst)
        })
        .collect();
    Ok(records)
}

fn run_cell(grid: &SweepGrid, cell: &Cell, inst: &Inst) -> RunRecord {
    let config = ConfigEcho {
        suite: grid.suite,
        algorithm: cell.algorithm.to_string(),
        n: grid.n,
        k: grid.k,
        delta: cell.delta,
        seed: cell.seed,
        scale: cell.scale,
        policy: grid.policy,
        mask_seed: mask_seed(cell.seed),
    };
    let start = Instant::now();
    let out = execute(&config, inst);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    match out {
        Ok((cost, ledger, extra)) => RunRecord {
            algorithm: config.algorithm.clone(),
            config,
            strong_point_count: ledger.strong_point_count,
            strong_edge_count: ledger.strong_edge_count,
            weak_count: ledger.weak_count,
            cost,
            log10_cost: cost.log10(),
            wall_ms,
            error: None,
            extra,
        },
        Err(e) => RunRecord {
            algorithm: config.algorithm.clone(),
            config,
            strong_point_count: 0,
            strong_edge_count: 0,
            weak_count: 0,
            cost: f64::INFINITY,
            log10_cost: f64::INFINITY,
            wall_ms,
            error: Some(e.to_string()),
            extra: serde_json::Value::Null,
        },
    }
}

/// Reruns one record from its config echo.
pub fn rerun(config: &ConfigEcho) -> Result<RunRecord> {
    let inst = match config.suite {
        Suite::MstLb => Inst::Lb(gen_mst_metric_lb(config.n, config.seed, config.delta)?),
        _ => Inst::Sbm(gen_sbm(config.n, config.k, config.seed)?),
    };
    let grid = SweepGrid {
        suite: config.suite,
        n: config.n,
        k: config.k,
        deltas: vec![config.delta],
        seeds: vec![config.seed],
        scales: config.scale.into_iter().collect(),
        policy: config.policy,
        baselines: false,
    };
    let algorithm = [config.suite.algorithm(), config.suite.strong_baseline()]
        .into_iter()
        .chain(config.suite.weak_baseline())
        .find(|a| *a == config.algorithm)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {:?}", config.algorithm)))?;
    let cell = Cell { algorithm, delta: config.delta, seed: config.seed, scale: config.scale };
    Ok(run_cell(&grid, &cell, &inst))
}

type Outcome = (f64, LedgerSnapshot, serde_json::Value);

fn execute(c: &ConfigEcho, inst: &Inst) -> Result<Outcome> {
    match inst {
        Inst::Sbm(inst) => {
            let eval = Evaluator::new(&inst.truth);
            let adversary = Arc::new(c.policy.build(inst, c.seed)?);
            let oracles = inst.oracles(CorruptionMask::new(c.mask_seed, c.delta)?, adversary);
            execute_sbm(c, &oracles, &eval)
        }
        Inst::Lb(inst) => {
            let eval = Evaluator::new(&inst.truth);
            let oracles = inst.oracles();
            match c.algorithm.as_str() {
                "mst-exact" => {
                    for p in 0..oracles.n() {
                        oracles.strong.point_query(PointId::from_idx(p))?;
                    }
                    let tree = mst_dense(&StrongAll(&oracles.strong, oracles.n()));
                    Ok((tree.weight(&eval), oracles.snapshot(), serde_json::Value::Null))
                }
                "mst-weak" => {
                    let cfg = MstConfig { seed: c.seed, ..MstConfig::default() };
                    let sol = mst_weak_solve(&oracles, &cfg)?;
                    let opt = mst_dense(&eval).weight(&eval);
                    let w = sol.true_weight(&eval);
                    let extra = serde_json::json!({
                        "optimal_weight": opt,
                        "ratio": w / opt,
                        "max_degree": sol.tree.max_degree(),
                        "block_size": inst.meta.block_size,
                        "matched_fraction": inst.meta.matched_fraction,
                        "warnings": sol.warnings,
                    });
                    Ok((w, sol.construction, extra))
                }
                other => Err(Error::InvalidConfig(format!("algorithm {other:?} does not run on the mst-lb suite"))),
            }
        }
    }
}

fn execute_sbm(c: &ConfigEcho, oracles: &OracleSet, eval: &Evaluator<'_>) -> Result<Outcome> {
    let scale = || c.scale.ok_or_else(|| Error::InvalidConfig("missing scale".into()));
    match c.algorithm.as_str() {
        "kcenter" => {
            let mut cfg = KCenterConfig::new(c.k, c.delta, c.seed);
            cfg.scale = scale()?;
            let sol = kcenter_solve(oracles, &cfg)?;
            let extra = serde_json::json!({
                "r_final": sol.r_final,
                "level_final": sol.level_final,
                "probes": sol.probes.len(),
                "rounds": sol.rounds.len(),
                "strong_point_bound": strong_point_bound(&cfg, c.n, oracles.aspect_ratio()),
            });
            Ok((sol.true_cost(eval), sol.ledger, extra))
        }
        "kmeans" => {
            let mut cfg = KClusterConfig::new(c.k, Objective::Means, c.delta, c.seed);
            cfg.cap_scale = scale()?;
            let sol = kcluster_solve(oracles, &cfg)?;
            let extra = serde_json::json!({
                "coreset_size": sol.coreset.len(),
                "cap": sol.plan.cap,
                "threshold": sol.plan.threshold,
                "opt_guess": sol.opt_guess,
                "probes": sol.probes.len(),
            });
            Ok((sol.true_cost(eval), sol.ledger, extra))
        }
        "farthest-first-strong" | "farthest-first-weak" => {
            let mode = if c.algorithm.ends_with("strong") { BaselineMode::StrongFull } else { BaselineMode::WeakOnly };
            let cl = baseline_farthest_first(oracles, mode, c.k, c.seed)?;
            Ok((cl.kcenter_cost(eval), oracles.snapshot(), serde_json::Value::Null))
        }
        "kmeanspp-strong" | "kmeanspp-weak" => {
            let mode = if c.algorithm.ends_with("strong") { BaselineMode::StrongFull } else { BaselineMode::WeakOnly };
            let cl = baseline_kmeanspp(oracles, mode, c.k, 2, c.seed, LLOYD_ITERS)?;
            Ok((cl.sum_cost(eval, 2), oracles.snapshot(), serde_json::Value::Null))
        }
        other => Err(Error::InvalidConfig(format!("algorithm {other:?} does not run on SBM suites"))),
    }
}

/// The record minimizing `strong_point_count * cost^exponent`, compared in
/// log space; ties go to fewer strong points, then to the lower seed.
/// Failed records are skipped.
pub fn select_tradeoff(records: &[RunRecord], exponent: f64) -> Result<&RunRecord> {
    let score = |r: &RunRecord| (r.strong_point_count as f64).ln() + exponent * r.cost.ln();
    records
        .iter()
        .filter(|r| r.ok())
        .min_by(|a, b| {
            score(a)
                .total_cmp(&score(b))
                .then(a.strong_point_count.cmp(&b.strong_point_count))
                .then(a.seed().cmp(&b.seed()))
        })
        .ok_or(Error::Empty("no successful records to select from"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedPick {
    pub seed: u64,
    pub scale: Option<f64>,
    pub strong_point_count: u64,
    pub query_fraction: f64,
    pub cost: f64,
    pub baseline_cost: f64,
    /// `cost / baseline_cost`.
    pub ratio: f64,
    /// Weak-only baseline cost over our cost, when the suite has one.
    pub weak_gap: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaSummary {
    pub delta: f64,
    pub picks: Vec<SeedPick>,
    pub median_ratio: f64,
    pub median_query_fraction: f64,
    /// Rank correlation of strong points against cost over all successful
    /// runs of the algorithm at this delta.
    pub spearman_queries_cost: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TradeoffSummary {
    pub suite: Suite,
    pub algorithm: String,
    pub baseline: String,
    pub exponent: f64,
    pub n: usize,
    pub per_delta: Vec<DeltaSummary>,
}

/// Per `(delta, seed)` trade-off point and its ratio to the strong baseline,
/// with medians over seeds.
pub fn summarize(grid: &SweepGrid, records: &[RunRecord], exponent: f64) -> Result<TradeoffSummary> {
    let algorithm = grid.suite.algorithm();
    let baseline = grid.suite.strong_baseline();
    let mut per_delta = Vec::new();
    for &delta in &grid.deltas {
        let at = |r: &&RunRecord| r.delta() == delta;
        let mut picks = Vec::new();
        for &seed in &grid.seeds {
            let cell: Vec<RunRecord> =
                records.iter().filter(at).filter(|r| r.seed() == seed && r.algorithm == algorithm).cloned().collect();
            let Ok(pick) = select_tradeoff(&cell, exponent) else { continue };
            let find = |name: &str| records.iter().filter(at).find(|r| r.seed() == seed && r.algorithm == name && r.ok());
            let base = find(baseline).ok_or_else(|| Error::InvalidConfig(format!("no {baseline} record for seed {seed}")))?;
            let weak_gap = grid.suite.weak_baseline().and_then(find).map(|w| w.cost / pick.cost);
            picks.push(SeedPick {
                seed,
                scale: pick.config.scale,
                strong_point_count: pick.strong_point_count,
                query_fraction: pick.strong_point_count as f64 / grid.n as f64,
                cost: pick.cost,
                baseline_cost: base.cost,
                ratio: pick.cost / base.cost,
                weak_gap,
            });
        }
        if picks.is_empty() {
            continue;
        }
        let ours: Vec<&RunRecord> = records.iter().filter(at).filter(|r| r.algorithm == algorithm && r.ok()).collect();
        let qs: Vec<f64> = ours.iter().map(|r| r.strong_point_count as f64).collect();
        let cs: Vec<f64> = ours.iter().map(|r| r.cost).collect();
        per_delta.push(DeltaSummary {
            delta,
            median_ratio: median(&picks.iter().map(|p| p.ratio).collect::<Vec<_>>()),
            median_query_fraction: median(&picks.iter().map(|p| p.query_fraction).collect::<Vec<_>>()),
            spearman_queries_cost: if ours.len() >= 2 { spearman(&qs, &cs) } else { 0.0 },
            picks,
        });
    }
    Ok(TradeoffSummary {
        suite: grid.suite,
        algorithm: algorithm.to_string(),
        baseline: baseline.to_string(),
        exponent,
        n: grid.n,
        per_delta,
    })
}

/// Flat CSV row; nested fields are embedded as JSON strings.
#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'static str,
    algorithm: &'a str,
    n: usize,
    k: usize,
    delta: f64,
    seed: u64,
    scale: Option<f64>,
    strong_point_count: u64,
    strong_edge_count: u64,
    weak_count: u64,
    cost: f64,
    log10_cost: f64,
    wall_ms: f64,
    error: Option<&'a str>,
    config: String,
    extra: String,
}

/// Writes `records.csv`, `tradeoff.json` and `ledger.json` into `dir`.
pub fn write_outputs(dir: impl AsRef<Path>, grid: &SweepGrid, records: &[RunRecord], exponent: f64) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("records.csv"))?;
    for r in records {
        w.serialize(CsvRow {
            suite: r.config.suite.as_str(),
            algorithm: &r.algorithm,
            n: r.config.n,
            k: r.config.k,
            delta: r.config.delta,
            seed: r.config.seed,
            scale: r.config.scale,
            strong_point_count: r.strong_point_count,
            strong_edge_count: r.strong_edge_count,
            weak_count: r.weak_count,
            cost: r.cost,
            log10_cost: r.log10_cost,
            wall_ms: r.wall_ms,
            error: r.error.as_deref(),
            config: serde_json::to_string(&r.config)?,
            extra: serde_json::to_string(&r.extra)?,
        })?;
    }
    w.flush()?;
    let summary = if records.is_empty() { None } else { Some(summarize(grid, records, exponent)?) };
    std::fs::write(dir.join("tradeoff.json"), serde_json::to_string_pretty(&summary)?)?;
    let ledger: Vec<serde_json::Value> = records
        .iter()
        .map(|r| serde_json::json!({ "config": r.config, "ledger": r.ledger(), "error": r.error }))
        .collect();
    std::fs::write(dir.join("ledger.json"), serde_json::to_string_pretty(&ledger)?)?;
    Ok(())
}
