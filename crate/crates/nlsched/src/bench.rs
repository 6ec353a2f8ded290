//! Experiment drivers: hardness measurement, forward/backward comparison,
//! solve rate under a node cap, improvement factor, and nodes-by-n curves.
//!
//! Every driver writes one append-only CSV of raw per-solve rows under
//! `results/{experiment}.csv` and skips rows already present, so an
//! interrupted grid resumes where it stopped and a finished grid is
//! idempotent. Aggregations are pure functions over the row set and are
//! recomputed from the full file each run. Wall-clock time is recorded for
//! transparency but never used in any comparison; node counts are the
//! comparison currency.

use std::collections::{BTreeMap, HashSet};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::dominance::{build_table, RuleSet};
use crate::exec::batch_map;
use crate::instance::Instance;
use crate::instgen::gen_instance;
use crate::penalty::PenaltyFn;
use crate::search::{resolve_direction, solve, Direction, SolveConfig, SolveStatus};
use crate::{Error, Result};

pub const DEFAULT_NODE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SolveRate,
    DirectionCompare,
    Improvement,
    NodesByN,
    SetN,
    SetT,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::SolveRate => "solve-rate",
            Experiment::DirectionCompare => "direction",
            Experiment::Improvement => "improvement",
            Experiment::NodesByN => "nodes-by-n",
            Experiment::SetN => "set-n",
            Experiment::SetT => "set-T",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solve-rate" => Ok(Experiment::SolveRate),
            "direction" => Ok(Experiment::DirectionCompare),
            "improvement" => Ok(Experiment::Improvement),
            "nodes-by-n" => Ok(Experiment::NodesByN),
            "set-n" => Ok(Experiment::SetN),
            "set-T" => Ok(Experiment::SetT),
            _ => Err(Error::DomainError(format!("unknown experiment `{s}`"))),
        }
    }
}

pub const RECORD_HEADER: &str = "experiment,beta,sigma,n,instance,direction,rules,\
nodes_generated,nodes_expanded,status,cost,wall_ms";

/// One raw solve within an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub beta: f64,
    pub sigma: f64,
    pub n: usize,
    pub instance: String,
    pub direction: Direction,
    pub rules: RuleSet,
    pub nodes_generated: u64,
    pub nodes_expanded: u64,
    pub status: SolveStatus,
    /// Present iff status is Optimal.
    pub cost: Option<f64>,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            self.experiment,
            self.beta,
            self.sigma,
            self.n,
            self.instance,
            self.direction.as_str(),
            self.rules.as_str(),
            self.nodes_generated,
            self.nodes_expanded,
            self.status.as_str(),
            self.cost.map(|c| c.to_string()).unwrap_or_default(),
            self.wall_ms,
        )
    }

    /// Identity of a solve within one experiment file, used for resuming.
    pub fn key(&self) -> String {
        record_key(&self.instance, self.beta, self.direction, self.rules)
    }

    pub fn parse_row(line: &str) -> Result<ExperimentRecord> {
        let bad = |reason: &str| Error::Parse { line: 0, reason: format!("{reason}: `{line}`") };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(bad("expected 12 fields"));
        }
        let num = |i: usize, what: &str| -> Result<f64> {
            fields[i].parse().map_err(|_| bad(&format!("bad {what}")))
        };
        Ok(ExperimentRecord {
            experiment: fields[0].to_string(),
            beta: num(1, "beta")?,
            sigma: num(2, "sigma")?,
            n: fields[3].parse().map_err(|_| bad("bad n"))?,
            instance: fields[4].to_string(),
            direction: fields[5].parse()?,
            rules: fields[6].parse()?,
            nodes_generated: fields[7].parse().map_err(|_| bad("bad nodes_generated"))?,
            nodes_expanded: fields[8].parse().map_err(|_| bad("bad nodes_expanded"))?,
            status: match fields[9] {
                "optimal" => SolveStatus::Optimal,
                "cap_exceeded" => SolveStatus::NodeCapExceeded,
                other => return Err(bad(&format!("bad status `{other}`"))),
            },
            cost: if fields[10].is_empty() { None } else { Some(num(10, "cost")?) },
            wall_ms: num(11, "wall_ms")?,
        })
    }
}

fn record_key(instance: &str, beta: f64, direction: Direction, rules: RuleSet) -> String {
    format!("{instance}|{beta}|{}|{}", direction.as_str(), rules.as_str())
}

/// Fraction of job pairs ordered in every schedule position: a
/// theorem-backed full conclusion in either direction, or a head conclusion
/// whose window covers t1 = P - p_i - p_j (the largest possible combined
/// length of the surrounding sequences). Low hardness means a large
/// effective search space.
pub fn hardness(instance: &Instance, f: &PenaltyFn) -> Result<f64> {
    let n = instance.n();
    if n < 2 {
        return Err(Error::DomainError("hardness needs at least two jobs".into()));
    }
    let table = build_table(instance, f, RuleSet::NewRules)?;
    let total = instance.total_p();
    let mut counted = 0usize;
    for rel in table.pairs() {
        let t1 = total - instance.job(rel.i).p - instance.job(rel.j).p;
        let head_covers = rel.head.is_some_and(|(_, t_star)| t_star >= t1);
        if rel.full_global.is_some() || head_covers {
            counted += 1;
        }
    }
    Ok(counted as f64 / (n * (n - 1) / 2) as f64)
}

pub const HARDNESS_HEADER: &str = "instance,n,sigma,beta,hardness";

/// Per-instance hardness rows for a loaded set; sigma column is empty for
/// instances without generator metadata.
pub fn hardness_report(instances: &[Instance], f: &PenaltyFn) -> Result<String> {
    let rows = batch_map(instances, |inst| hardness(inst, f));
    let mut out = String::from(HARDNESS_HEADER);
    out.push('\n');
    for (inst, h) in instances.iter().zip(rows) {
        let sigma = inst.meta.map(|m| m.sigma.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", inst.name, inst.n(), sigma, f.beta(), h?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardnessCell {
    pub beta: f64,
    pub sigma: f64,
    pub n: usize,
    pub count: usize,
    pub mean_hardness: f64,
}

/// Generates `per_cell` fresh n-job instances for every (beta, sigma) cell
/// and averages their hardness. Instance indices run cell-major so every
/// instance draws from a distinct RNG stream.
pub fn hardness_grid(
    n: usize,
    betas: &[f64],
    sigmas: &[f64],
    per_cell: u64,
    seed: u64,
) -> Result<Vec<HardnessCell>> {
    let mut tasks = Vec::new();
    let mut index = 0u64;
    for &beta in betas {
        for &sigma in sigmas {
            for _ in 0..per_cell {
                tasks.push((beta, sigma, index));
                index += 1;
            }
        }
    }
    let values = batch_map(&tasks, |&(beta, sigma, idx)| -> Result<f64> {
        let inst = gen_instance(n, sigma, beta, seed, idx)?;
        hardness(&inst, &PenaltyFn::new(beta)?)
    });
    let mut cells = Vec::new();
    let mut it = values.into_iter();
    for &beta in betas {
        for &sigma in sigmas {
            let mut sum = 0.0;
            for _ in 0..per_cell {
                sum += it.next().expect("task list matches cell layout")?;
            }
            cells.push(HardnessCell {
                beta,
                sigma,
                n,
                count: per_cell as usize,
                mean_hardness: sum / per_cell as f64,
            });
        }
    }
    Ok(cells)
}

/// One planned solve: an instance at a beta, in a resolved direction,
/// under a rule set.
#[derive(Debug, Clone, Copy)]
pub struct Task<'a> {
    pub instance: &'a Instance,
    pub beta: f64,
    pub direction: Direction,
    pub rules: RuleSet,
}

/// Baseline rule set the improvement factor compares against: the
/// weight-and-ratio rule where it applies (exactly beta = 2), adjacent-swap
/// pruning alone otherwise.
pub fn improvement_baseline(beta: f64) -> RuleSet {
    if beta == 2.0 {
        RuleSet::Mshj
    } else {
        RuleSet::LocalOnly
    }
}

fn meta_beta(instance: &Instance) -> Result<f64> {
    instance
        .meta
        .map(|m| m.beta_target)
        .ok_or_else(|| {
            Error::DomainError(format!("instance {} lacks generator metadata", instance.name))
        })
}

/// Plans the task list for an experiment. Every instance is solved at its
/// generation-target beta, so per-(beta, sigma) cells of the output line up
/// with the cells of the generating grid.
///
/// Rule-set comparisons (solve rate, improvement) run all their rule sets
/// in one direction, the one Auto picks for the full rule set, so node
/// counts differ only by pruning power. The direction comparison instead
/// fixes the rule set and varies the direction.
pub fn plan<'a>(experiment: Experiment, instances: &'a [Instance]) -> Result<Vec<Task<'a>>> {
    let mut tasks = Vec::new();
    for inst in instances {
        let beta = meta_beta(inst)?;
        let auto = resolve_direction(Direction::Auto, RuleSet::All, beta);
        match experiment {
            Experiment::SolveRate => {
                for rules in [RuleSet::All, improvement_baseline(beta), RuleSet::None] {
                    tasks.push(Task { instance: inst, beta, direction: auto, rules });
                }
            }
            Experiment::DirectionCompare => {
                for rules in [RuleSet::None, RuleSet::All] {
                    for direction in [Direction::Forward, Direction::Backward] {
                        tasks.push(Task { instance: inst, beta, direction, rules });
                    }
                }
            }
            Experiment::Improvement => {
                for rules in [RuleSet::All, improvement_baseline(beta)] {
                    tasks.push(Task { instance: inst, beta, direction: auto, rules });
                }
            }
            Experiment::NodesByN | Experiment::SetN | Experiment::SetT => {
                tasks.push(Task { instance: inst, beta, direction: auto, rules: RuleSet::All });
            }
        }
    }
    Ok(tasks)
}

/// Runs every task not in `done`, in parallel when built with the
/// `parallel` feature, returning records in task order.
pub fn run_tasks(
    experiment: Experiment,
    tasks: &[Task],
    node_cap: u64,
    done: &HashSet<String>,
) -> Result<Vec<ExperimentRecord>> {
    let todo: Vec<&Task> = tasks
        .iter()
        .filter(|t| !done.contains(&record_key(&t.instance.name, t.beta, t.direction, t.rules)))
        .collect();
    let results = batch_map(&todo, |task| -> Result<ExperimentRecord> {
        let f = PenaltyFn::new(task.beta)?;
        let config = SolveConfig { direction: task.direction, rules: task.rules, node_cap };
        let started = Instant::now();
        let res = solve(task.instance, &f, &config)?;
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        let meta = task.instance.meta.expect("planned instances carry metadata");
        Ok(ExperimentRecord {
            experiment: experiment.as_str().to_string(),
            beta: task.beta,
            sigma: meta.sigma,
            n: task.instance.n(),
            instance: task.instance.name.clone(),
            direction: res.direction,
            rules: task.rules,
            nodes_generated: res.stats.nodes_generated,
            nodes_expanded: res.stats.nodes_expanded,
            status: res.status,
            cost: res.cost,
            wall_ms,
        })
    });
    results.into_iter().collect()
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    let path = path.as_ref();
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != RECORD_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    reason: format!("unexpected record header in {}", path.display()),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        records.push(ExperimentRecord::parse_row(line)?);
    }
    Ok(records)
}

/// Appends rows, creating the file with its header first if needed.
pub fn append_records(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    if file.metadata()?.len() == 0 {
        writeln!(file, "{RECORD_HEADER}")?;
    }
    for rec in records {
        writeln!(file, "{}", rec.csv_row())?;
    }
    Ok(())
}

// Aggregation cells. Grouping keys use the bit patterns of the (positive)
// floats, which orders them numerically.

type Bits = u64;

fn bits(x: f64) -> Bits {
    debug_assert!(x >= 0.0);
    x.to_bits()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveRateCell {
    pub beta: f64,
    pub sigma: f64,
    pub rules: RuleSet,
    pub solved: usize,
    pub total: usize,
}

impl SolveRateCell {
    pub fn fraction(&self) -> f64 {
        self.solved as f64 / self.total as f64
    }
}

pub fn solve_rate_cells(records: &[ExperimentRecord]) -> Vec<SolveRateCell> {
    let mut cells: BTreeMap<(Bits, Bits, &str), (RuleSet, usize, usize)> = BTreeMap::new();
    for r in records {
        let entry = cells
            .entry((bits(r.beta), bits(r.sigma), r.rules.as_str()))
            .or_insert((r.rules, 0, 0));
        entry.2 += 1;
        if r.status == SolveStatus::Optimal {
            entry.1 += 1;
        }
    }
    cells
        .into_iter()
        .map(|((b, s, _), (rules, solved, total))| SolveRateCell {
            beta: f64::from_bits(b),
            sigma: f64::from_bits(s),
            rules,
            solved,
            total,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionCell {
    pub beta: f64,
    pub sigma: f64,
    pub rules: RuleSet,
    /// Instances where the forward run generated strictly fewer nodes;
    /// ties count against forward.
    pub forward_fewer: usize,
    pub measured: usize,
    /// Instances skipped because either variant hit the node cap.
    pub skipped: usize,
}

impl DirectionCell {
    pub fn fraction(&self) -> Option<f64> {
        (self.measured > 0).then(|| self.forward_fewer as f64 / self.measured as f64)
    }
}

pub fn direction_cells(records: &[ExperimentRecord]) -> Vec<DirectionCell> {
    // Pair the two variants of each (instance, beta, rules) run.
    let mut pairs: BTreeMap<(String, Bits, &str), [Option<&ExperimentRecord>; 2]> =
        BTreeMap::new();
    for r in records {
        let slot = match r.direction {
            Direction::Forward => 0,
            Direction::Backward => 1,
            Direction::Auto => continue,
        };
        pairs.entry((r.instance.clone(), bits(r.beta), r.rules.as_str())).or_default()[slot] =
            Some(r);
    }
    let mut cells: BTreeMap<(Bits, Bits, &str), DirectionCell> = BTreeMap::new();
    for ((_, _, _), [fwd, bwd]) in pairs {
        let (Some(fwd), Some(bwd)) = (fwd, bwd) else { continue };
        let cell = cells
            .entry((bits(fwd.beta), bits(fwd.sigma), fwd.rules.as_str()))
            .or_insert(DirectionCell {
                beta: fwd.beta,
                sigma: fwd.sigma,
                rules: fwd.rules,
                forward_fewer: 0,
                measured: 0,
                skipped: 0,
            });
        if fwd.status != SolveStatus::Optimal || bwd.status != SolveStatus::Optimal {
            cell.skipped += 1;
            continue;
        }
        cell.measured += 1;
        if fwd.nodes_generated < bwd.nodes_generated {
            cell.forward_fewer += 1;
        }
    }
    cells.into_values().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprovementCell {
    pub beta: f64,
    pub sigma: f64,
    /// Instances where both runs finished under the cap.
    pub measured: usize,
    /// Instances dropped because a run hit the cap (its true node count is
    /// unknowable, so the ratio would be meaningless).
    pub excluded: usize,
    /// mean(nodes with the full rule set) / mean(nodes with the baseline),
    /// absent when nothing in the cell was measurable.
    pub ratio: Option<f64>,
}

pub fn improvement_cells(records: &[ExperimentRecord]) -> Vec<ImprovementCell> {
    let mut pairs: BTreeMap<(String, Bits), [Option<&ExperimentRecord>; 2]> = BTreeMap::new();
    for r in records {
        let slot = if r.rules == RuleSet::All {
            0
        } else if r.rules == improvement_baseline(r.beta) {
            1
        } else {
            continue;
        };
        pairs.entry((r.instance.clone(), bits(r.beta))).or_default()[slot] = Some(r);
    }
    struct Acc {
        beta: f64,
        sigma: f64,
        measured: usize,
        excluded: usize,
        all_nodes: f64,
        base_nodes: f64,
    }
    let mut cells: BTreeMap<(Bits, Bits), Acc> = BTreeMap::new();
    for ((_, _), [all, base]) in pairs {
        let (Some(all), Some(base)) = (all, base) else { continue };
        let acc = cells.entry((bits(all.beta), bits(all.sigma))).or_insert(Acc {
            beta: all.beta,
            sigma: all.sigma,
            measured: 0,
            excluded: 0,
            all_nodes: 0.0,
            base_nodes: 0.0,
        });
        if all.status != SolveStatus::Optimal || base.status != SolveStatus::Optimal {
            acc.excluded += 1;
            continue;
        }
        acc.measured += 1;
        acc.all_nodes += all.nodes_generated as f64;
        acc.base_nodes += base.nodes_generated as f64;
    }
    cells
        .into_values()
        .map(|acc| ImprovementCell {
            beta: acc.beta,
            sigma: acc.sigma,
            measured: acc.measured,
            excluded: acc.excluded,
            ratio: (acc.measured > 0 && acc.base_nodes > 0.0)
                .then(|| acc.all_nodes / acc.base_nodes),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodesByNCell {
    pub n: usize,
    pub sigma: f64,
    pub beta: f64,
    pub solved: usize,
    pub capped: usize,
    /// Average nodes_generated over solved instances only.
    pub mean_nodes: Option<f64>,
}

pub fn nodes_by_n_cells(records: &[ExperimentRecord]) -> Vec<NodesByNCell> {
    let mut cells: BTreeMap<(usize, Bits, Bits), (usize, usize, f64)> = BTreeMap::new();
    for r in records {
        let entry = cells.entry((r.n, bits(r.sigma), bits(r.beta))).or_insert((0, 0, 0.0));
        if r.status == SolveStatus::Optimal {
            entry.0 += 1;
            entry.2 += r.nodes_generated as f64;
        } else {
            entry.1 += 1;
        }
    }
    cells
        .into_iter()
        .map(|((n, s, b), (solved, capped, sum))| NodesByNCell {
            n,
            sigma: f64::from_bits(s),
            beta: f64::from_bits(b),
            solved,
            capped,
            mean_nodes: (solved > 0).then(|| sum / solved as f64),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetTCell {
    pub sigma: f64,
    pub beta: f64,
    pub solved: usize,
    pub total: usize,
    pub mean_nodes_solved: Option<f64>,
}

pub fn set_t_cells(records: &[ExperimentRecord]) -> Vec<SetTCell> {
    let mut cells: BTreeMap<(Bits, Bits), (usize, usize, f64)> = BTreeMap::new();
    for r in records {
        let entry = cells.entry((bits(r.sigma), bits(r.beta))).or_insert((0, 0, 0.0));
        entry.1 += 1;
        if r.status == SolveStatus::Optimal {
            entry.0 += 1;
            entry.2 += r.nodes_generated as f64;
        }
    }
    cells
        .into_iter()
        .map(|((s, b), (solved, total, sum))| SetTCell {
            sigma: f64::from_bits(s),
            beta: f64::from_bits(b),
            solved,
            total,
            mean_nodes_solved: (solved > 0).then(|| sum / solved as f64),
        })
        .collect()
}

/// Sizes, sigmas, and replication for the nodes-by-n sweep, which generates
/// its own instances rather than reading a set directory.
#[derive(Debug, Clone)]
pub struct NodesByNSpec {
    pub sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub beta: f64,
    pub count: u64,
    pub seed: u64,
}

impl NodesByNSpec {
    /// Desk scale finishes in minutes; `full` takes hundred-instance
    /// averages out to sizes where pruning is the difference between
    /// finishing and not.
    pub fn preset(full: bool, seed: u64) -> Self {
        NodesByNSpec {
            sizes: (1..=if full { 22 } else { 16 }).collect(),
            sigmas: vec![0.1, 0.5],
            beta: 2.0,
            count: if full { 100 } else { 10 },
            seed,
        }
    }
}

/// Generates the nodes-by-n instances; names carry sigma and n so rows
/// from different cells never collide in the resume key.
pub fn gen_nodes_by_n(spec: &NodesByNSpec) -> Result<Vec<Instance>> {
    let mut instances = Vec::new();
    let mut index = 0u64;
    for &sigma in &spec.sigmas {
        for &n in &spec.sizes {
            for k in 0..spec.count {
                let mut inst = gen_instance(n, sigma, spec.beta, spec.seed, index)?;
                inst.name = format!("nbn-s{sigma}-n{n}-{k}");
                index += 1;
                instances.push(inst);
            }
        }
    }
    Ok(instances)
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub out_dir: PathBuf,
    pub node_cap: u64,
    /// Restricts the run to instances whose generation-target beta is
    /// listed; empty means no restriction.
    pub betas: Vec<f64>,
    pub plot_data: bool,
}

impl GridOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        GridOptions {
            out_dir: out_dir.into(),
            node_cap: DEFAULT_NODE_CAP,
            betas: Vec::new(),
            plot_data: false,
        }
    }

    pub fn results_path(&self, experiment: Experiment) -> PathBuf {
        self.out_dir.join("results").join(format!("{}.csv", experiment.as_str()))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub experiment: Experiment,
    pub new_rows: usize,
    pub total_rows: usize,
    pub results_path: PathBuf,
}

/// Plans, resumes, runs, appends, and (optionally) re-derives the plot
/// CSVs for one experiment over an already-loaded instance list.
pub fn run_experiment(
    experiment: Experiment,
    instances: &[Instance],
    opts: &GridOptions,
) -> Result<ExperimentOutcome> {
    let selected: Vec<Instance> = if opts.betas.is_empty() {
        instances.to_vec()
    } else {
        instances
            .iter()
            .filter(|inst| {
                inst.meta.map_or(false, |m| opts.betas.contains(&m.beta_target))
            })
            .cloned()
            .collect()
    };
    let tasks = plan(experiment, &selected)?;
    let results_path = opts.results_path(experiment);
    let existing = read_records(&results_path)?;
    let done: HashSet<String> = existing.iter().map(|r| r.key()).collect();
    let fresh = run_tasks(experiment, &tasks, opts.node_cap, &done)?;
    append_records(&results_path, &fresh)?;
    let mut all = existing;
    let new_rows = fresh.len();
    all.extend(fresh);
    if opts.plot_data {
        write_plot_data(experiment, &all, &opts.out_dir)?;
    }
    Ok(ExperimentOutcome {
        experiment,
        new_rows,
        total_rows: all.len(),
        results_path,
    })
}

fn write_plot_csv(path: &Path, rows: &[(String, String, String)]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = String::from("x,y,series\n");
    for (x, y, series) in rows {
        out.push_str(&format!("{x},{y},{series}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// One aggregated (x, y, series) file per figure the experiment supports,
/// recomputed from the full record set.
fn write_plot_data(experiment: Experiment, records: &[ExperimentRecord], out_dir: &Path) -> Result<()> {
    let plots = out_dir.join("plots");
    let fmt = |x: f64| x.to_string();
    match experiment {
        Experiment::SolveRate => {
            let rows: Vec<_> = solve_rate_cells(records)
                .iter()
                .map(|c| {
                    (fmt(c.sigma), fmt(c.fraction()), format!("beta {} {}", c.beta, c.rules.as_str()))
                })
                .collect();
            write_plot_csv(&plots.join("solve-rate.csv"), &rows)?;
        }
        Experiment::DirectionCompare => {
            let rows: Vec<_> = direction_cells(records)
                .iter()
                .filter_map(|c| {
                    c.fraction().map(|frac| {
                        (fmt(c.sigma), fmt(frac), format!("beta {} {}", c.beta, c.rules.as_str()))
                    })
                })
                .collect();
            write_plot_csv(&plots.join("direction.csv"), &rows)?;
        }
        Experiment::Improvement => {
            let rows: Vec<_> = improvement_cells(records)
                .iter()
                .filter_map(|c| c.ratio.map(|r| (fmt(c.sigma), fmt(r), format!("beta {}", c.beta))))
                .collect();
            write_plot_csv(&plots.join("improvement.csv"), &rows)?;
        }
        Experiment::NodesByN | Experiment::SetN => {
            let rows: Vec<_> = nodes_by_n_cells(records)
                .iter()
                .filter_map(|c| {
                    c.mean_nodes
                        .map(|m| (c.n.to_string(), fmt(m), format!("sigma {}", c.sigma)))
                })
                .collect();
            write_plot_csv(&plots.join(format!("{}.csv", experiment.as_str())), &rows)?;
        }
        Experiment::SetT => {
            let cells = set_t_cells(records);
            let solved: Vec<_> = cells
                .iter()
                .map(|c| {
                    (fmt(c.sigma), fmt(c.solved as f64 / c.total as f64), format!("beta {}", c.beta))
                })
                .collect();
            write_plot_csv(&plots.join("set-T-solved.csv"), &solved)?;
            let nodes: Vec<_> = cells
                .iter()
                .filter_map(|c| {
                    c.mean_nodes_solved
                        .map(|m| (fmt(c.sigma), fmt(m), format!("beta {}", c.beta)))
                })
                .collect();
            write_plot_csv(&plots.join("set-T-nodes.csv"), &nodes)?;
        }
    }
    Ok(())
}
