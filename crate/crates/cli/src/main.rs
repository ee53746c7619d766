use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wsoracle::bench::{run_sweep, write_outputs, Suite, SweepGrid};
use wsoracle::instances::{
    gen_kcenter_lb, gen_mst_metric_lb, gen_mst_nonmetric_lb, gen_sbm, load_points_csv, read_table, write_points_csv,
    write_table, InstanceMeta, LabeledInstance, PolicyKind,
};
use wsoracle::kcenter::{kcenter_solve, KCenterConfig};
use wsoracle::kcluster::{kcluster_solve, KClusterConfig, Objective};
use wsoracle::mst::{mst_dense, mst_weak_solve, MstConfig};
use wsoracle::oracle::{Distances, WeakDistances};
use wsoracle::{CorruptionMask, Error, Evaluator, OracleSet, Result};

#[derive(Parser)]
#[command(name = "wsoracle", version, about = "Clustering and MST with a corrupted weak oracle and a metered strong oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-center by sample-and-cover.
    Kcenter(KCenterArgs),
    /// k-means through the streaming coreset.
    Kmeans(KClusterArgs),
    /// k-median through the streaming coreset.
    Kmedian(KClusterArgs),
    /// Spanning tree from weak distances only.
    Mst(MstArgs),
    /// Generate an instance file and its metadata sidecar.
    Gen(GenArgs),
    /// Parameter sweep with baselines and trade-off selection.
    Bench(BenchArgs),
}

/// Where the points come from. Defaults to a generated SBM instance.
#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// honest, cluster-flip, cluster-flip-repaired, uniform or constant.
    #[arg(long, default_value = "cluster-flip")]
    policy: String,
    /// Read points from a CSV file instead of generating them.
    #[arg(long, conflicts_with = "table")]
    points: Option<PathBuf>,
    /// The CSV's last column holds integer labels.
    #[arg(long, requires = "points")]
    labeled: bool,
    /// Read a binary distance table instead of generating points.
    #[arg(long)]
    table: Option<PathBuf>,
}

impl InstanceArgs {
    fn load(&self) -> Result<LabeledInstance> {
        if let Some(p) = &self.points {
            return load_points_csv(p, self.labeled);
        }
        if let Some(p) = &self.table {
            let truth = read_table(p)?;
            let meta = InstanceMeta {
                kind: "table".into(),
                n: truth.n(),
                k: self.k,
                mu: None,
                seed: self.seed,
                dim: None,
                aspect_ratio: truth.aspect_ratio(),
                scale: truth.scale(),
            };
            return Ok(LabeledInstance { truth: Arc::new(truth), labels: None, meta });
        }
        gen_sbm(self.n, self.k, self.seed)
    }

    fn oracles(&self, inst: &LabeledInstance) -> Result<OracleSet> {
        let adversary = PolicyKind::parse(&self.policy)?.build(inst, self.seed)?;
        Ok(inst.oracles(CorruptionMask::new(self.seed, self.delta)?, Arc::new(adversary)))
    }
}

#[derive(Args)]
struct KCenterArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Multiplier on the sample sizes.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value = "result.json")]
    out: PathBuf,
}

#[derive(Args)]
struct KClusterArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Accepted for parity with kcenter; the coreset search does not use it.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Multiplier on the heavy-ball threshold.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Multiplier on the coreset size cap.
    #[arg(long, default_value_t = 1.0)]
    cap_scale: f64,
    /// Visit the stream in a seeded random order.
    #[arg(long)]
    shuffle: bool,
    #[arg(long, default_value = "result.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MstFamily {
    Sbm,
    MetricLb,
    NonmetricLb,
}

#[derive(Args)]
struct MstArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corruption policy for the SBM family; the lower-bound families script their own.
    #[arg(long, default_value = "honest")]
    policy: String,
    #[arg(long, value_enum, default_value_t = MstFamily::MetricLb)]
    family: MstFamily,
    /// Triangles sampled to check that the weak distances are a metric.
    #[arg(long, default_value_t = 100_000)]
    validate: usize,
    #[arg(long, default_value = "result.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFamily {
    Sbm,
    KcenterLb,
    MstMetricLb,
    MstNonmetricLb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenFormat {
    Table,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenFamily::Sbm)]
    family: GenFamily,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corruption probability of the scripted families.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    delta: f64,
    /// Far distance of the k-center family.
    #[arg(long, default_value_t = 10.0)]
    c: f64,
    /// Table format writes the distance table; CSV needs a point family.
    #[arg(long, value_enum, default_value_t = GenFormat::Table)]
    format: GenFormat,
    /// Output file; metadata goes to the same path with `.json` appended.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// sbm-kcenter, sbm-kmeans or mst-lb.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
    deltas: Vec<f64>,
    /// Either a count (`5` means seeds 0..5) or a comma-separated list.
    #[arg(long, default_value = "5")]
    seeds: String,
    /// Scale multipliers to sweep; suite defaults when omitted.
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long, default_value = "cluster-flip")]
    policy: String,
    /// Exponent of the cost in the trade-off score `queries * cost^exponent`.
    #[arg(long, default_value_t = 10.0)]
    exponent: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Kcenter(a) => kcenter(a),
        Command::Kmeans(a) => kcluster(a, Objective::Means),
        Command::Kmedian(a) => kcluster(a, Objective::Median),
        Command::Mst(a) => mst(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)?)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn kcenter(a: KCenterArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let oracles = a.inst.oracles(&inst)?;
    let mut cfg = KCenterConfig::new(a.inst.k, a.inst.delta, a.inst.seed);
    cfg.epsilon = a.epsilon;
    cfg.scale = a.scale;
    let sol = kcenter_solve(&oracles, &cfg)?;
    let eval = Evaluator::new(&inst.truth);
    let coverage: Vec<f64> = sol.rounds.iter().map(|r| r.coverage).collect();
    write_json(
        &a.out,
        &json!({
            "instance": inst.meta,
            "config": cfg,
            "centers": sol.centers,
            "cost": sol.true_cost(&eval),
            "ledger": sol.ledger,
            "r_final": sol.r_final,
            "level_final": sol.level_final,
            "coverage": coverage,
            "rounds": sol.rounds,
            "probes": sol.probes,
            "plan": sol.plan,
        }),
    )
}

fn kcluster(a: KClusterArgs, objective: Objective) -> Result<()> {
    let inst = a.inst.load()?;
    let oracles = a.inst.oracles(&inst)?;
    let mut cfg = KClusterConfig::new(a.inst.k, objective, a.inst.delta, a.inst.seed);
    cfg.c_threshold *= a.scale;
    cfg.cap_scale = a.cap_scale;
    cfg.shuffle = a.shuffle;
    let sol = kcluster_solve(&oracles, &cfg)?;
    let eval = Evaluator::new(&inst.truth);
    write_json(
        &a.out,
        &json!({
            "instance": inst.meta,
            "config": cfg,
            "centers": sol.centers,
            "cost": sol.true_cost(&eval),
            "ledger": sol.ledger,
            "coreset_size": sol.coreset.len(),
            "opt_guess": sol.opt_guess,
            "plan": sol.plan,
            "probes": sol.probes,
        }),
    )
}

fn mst(a: MstArgs) -> Result<()> {
    let (truth, oracles, meta) = match a.family {
        MstFamily::Sbm => {
            let inst = gen_sbm(a.n, a.k, a.seed)?;
            let adversary = PolicyKind::parse(&a.policy)?.build(&inst, a.seed)?;
            let o = inst.oracles(CorruptionMask::new(a.seed, a.delta)?, Arc::new(adversary));
            (inst.truth.clone(), o, serde_json::to_value(&inst.meta)?)
        }
        MstFamily::MetricLb | MstFamily::NonmetricLb => {
            let inst = if matches!(a.family, MstFamily::MetricLb) {
                gen_mst_metric_lb(a.n, a.seed, a.delta)?
            } else {
                gen_mst_nonmetric_lb(a.n, a.seed, a.delta)?
            };
            (inst.truth.clone(), inst.oracles(), serde_json::to_value(&inst.meta)?)
        }
    };
    let cfg = MstConfig { seed: a.seed, eps: None, validate_triangles: a.validate };
    let sol = mst_weak_solve(&oracles, &cfg)?;
    let eval = Evaluator::new(&truth);
    let weight = sol.true_weight(&eval);
    let optimal = mst_dense(&eval).weight(&eval);
    // weak weight of the output tree, read after the run
    let weak = WeakDistances(&oracles.weak);
    let weak_weight: f64 = sol.tree.edges().iter().map(|&(c, p)| weak.dist(c.idx(), p.idx())).sum();
    write_json(
        &a.out,
        &json!({
            "instance": meta,
            "edges": sol.tree.canonical_edges(),
            "weak_weight": weak_weight,
            "weak_mst_weight": sol.weak_mst_weight,
            "weight": weight,
            "optimal_weight": optimal,
            "ratio": weight / optimal,
            "max_degree": sol.tree.max_degree(),
            "ledger": sol.construction,
            "validation": sol.validation,
            "warnings": sol.warnings,
        }),
    )
}

fn gen(a: GenArgs) -> Result<()> {
    let sidecar = {
        let mut s = a.out.clone().into_os_string();
        s.push(".json");
        PathBuf::from(s)
    };
    let (truth, meta) = match a.family {
        GenFamily::Sbm => {
            let inst = gen_sbm(a.n, a.k, a.seed)?;
            if a.format == GenFormat::Csv {
                write_points_csv(&a.out, &inst)?;
                return write_json(&sidecar, &serde_json::to_value(&inst.meta)?);
            }
            (inst.truth.clone(), serde_json::to_value(&inst.meta)?)
        }
        GenFamily::KcenterLb => {
            let lb = gen_kcenter_lb(a.k, a.c, a.n, a.seed, a.delta)?;
            let meta = json!({
                "lower_bound": lb.instance.meta,
                "c": lb.c,
                "special": lb.special,
                "matching": lb.matching,
                "far_point": lb.far_point,
                "corrupt": lb.instance.corrupt,
            });
            (lb.instance.truth.clone(), meta)
        }
        GenFamily::MstMetricLb | GenFamily::MstNonmetricLb => {
            let inst = if matches!(a.family, GenFamily::MstMetricLb) {
                gen_mst_metric_lb(a.n, a.seed, a.delta)?
            } else {
                gen_mst_nonmetric_lb(a.n, a.seed, a.delta)?
            };
            (inst.truth.clone(), json!({ "lower_bound": inst.meta, "corrupt": inst.corrupt }))
        }
    };
    if a.format == GenFormat::Csv {
        return Err(Error::InvalidConfig("only the sbm family has coordinates; use --format table".into()));
    }
    write_table(&a.out, &truth)?;
    eprintln!("wrote {}", a.out.display());
    write_json(&sidecar, &meta)
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = |_| Error::InvalidConfig(format!("bad seed list {s:?}"));
    if s.contains(',') {
        s.split(',').map(|t| t.trim().parse().map_err(bad)).collect()
    } else {
        Ok((0..s.trim().parse::<u64>().map_err(bad)?).collect())
    }
}

fn bench(a: BenchArgs) -> Result<()> {
    let suite = Suite::parse(&a.suite)?;
    let mut grid = SweepGrid::new(suite, a.n, a.k, a.deltas, parse_seeds(&a.seeds)?);
    if let Some(s) = a.scales {
        grid.scales = s;
    }
    grid.policy = PolicyKind::parse(&a.policy)?;
    let records = run_sweep(&grid)?;
    let failed = records.iter().filter(|r| !r.ok()).count();
    write_outputs(&a.out, &grid, &records, a.exponent)?;
    eprintln!("{} records ({failed} failed) in {}", records.len(), a.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_count_or_list() {
        assert_eq!(parse_seeds("3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4,9").unwrap(), vec![4, 9]);
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
