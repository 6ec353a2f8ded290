//! Exact A* over the subset lattice, in two mirrored variants.
//!
//! Backward builds the schedule from the back: a state is the set S of jobs
//! still unplaced, occupying [0, p(S)]; removing j schedules it last within
//! that window at cost w_j f(p(S)). Forward builds a growing prefix;
//! appending i after elapsed time t costs w_i f(t + p_i).
//!
//! Every state value (elapsed time, heuristic) is recomputed from the
//! bitmask in ascending bit order, never carried incrementally along the
//! path, so node counts are a pure function of instance, config, and float
//! semantics: reruns are byte-identical.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::dominance::{
    self, build_table, DominanceTable, RuleSet, PRUNE_MARGIN, TIME_SLACK,
};
use crate::instance::{evaluate, Instance, Schedule};
use crate::penalty::PenaltyFn;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    /// Resolved per rule set and beta before the search starts; never
    /// appears in results.
    Auto,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
            Direction::Auto => "auto",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            "auto" => Ok(Direction::Auto),
            _ => Err(Error::DomainError(format!("unknown direction `{s}`"))),
        }
    }
}

/// Auto picks the variant that tends to generate fewer nodes: with the
/// theorem-backed global rules enabled, forward pays off above beta = 1
/// (that is where tail conclusions exist); without them, forward only below
/// beta = 1 or at exactly 2.
pub fn resolve_direction(direction: Direction, rules: RuleSet, beta: f64) -> Direction {
    match direction {
        Direction::Auto => {
            let forward = if rules.uses_new_global() {
                beta > 1.0
            } else {
                beta < 1.0 || beta == 2.0
            };
            if forward {
                Direction::Forward
            } else {
                Direction::Backward
            }
        }
        fixed => fixed,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub direction: Direction,
    pub rules: RuleSet,
    pub node_cap: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            direction: Direction::Auto,
            rules: RuleSet::All,
            node_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NodeCapExceeded,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NodeCapExceeded => "cap_exceeded",
        }
    }
}

/// nodes_generated counts arcs pushed into the queue, duplicates included;
/// the root push is not an arc and is not counted. nodes_expanded counts
/// non-stale pops. max_queue is the peak queue length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_generated: u64,
    pub nodes_expanded: u64,
    pub max_queue: usize,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Present iff status is Optimal.
    pub schedule: Option<Schedule>,
    /// Recomputed as evaluate(schedule); the accumulated g only guides.
    pub cost: Option<f64>,
    pub stats: SearchStats,
    pub status: SolveStatus,
    /// The resolved direction actually run (never Auto).
    pub direction: Direction,
}

pub const SOLVE_CSV_HEADER: &str =
    "instance,beta,direction,rules,status,cost,nodes_generated,nodes_expanded,max_queue,wall_ms";

impl SolveResult {
    /// One row matching [`SOLVE_CSV_HEADER`]. Cost is empty unless optimal.
    pub fn csv_row(&self, instance: &str, beta: f64, rules: RuleSet, wall_ms: f64) -> String {
        let cost = self.cost.map(|c| c.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3}",
            instance,
            beta,
            self.direction.as_str(),
            rules.as_str(),
            self.status.as_str(),
            cost,
            self.stats.nodes_generated,
            self.stats.nodes_expanded,
            self.stats.max_queue,
            wall_ms
        )
    }
}

/// Admissible bound on the cost of completing the remaining jobs.
/// Backward: each i in `subset` completes no earlier than p_i, so
/// sum w_i f(p_i); elapsed is ignored. Forward: `subset` is the unplaced
/// complement after a prefix of length `elapsed`; each completes no earlier
/// than elapsed + p_i.
pub fn lower_bound(
    subset: u64,
    elapsed: f64,
    direction: Direction,
    instance: &Instance,
    f: &PenaltyFn,
) -> f64 {
    let mut total = 0.0;
    let mut rest = subset;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let job = instance.job(i);
        total += match direction {
            Direction::Backward => job.w * f.eval(job.p),
            Direction::Forward => job.w * f.eval(elapsed + job.p),
            Direction::Auto => unreachable!("lower_bound requires a resolved direction"),
        };
    }
    total
}

fn mask_p_sum(mask: u64, instance: &Instance) -> f64 {
    let mut total = 0.0;
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        total += instance.job(i).p;
    }
    total
}

/// Should the backward arc removing `cand` from `s` (placing it last in
/// [0, t1]) be skipped? True when the incoming job locally precedes `cand`
/// at the adjacent start, or some k still in `s` must come after `cand`
/// globally (full conclusion, or a head conclusion covering t1).
pub fn prune_backward(
    s: u64,
    incoming: Option<usize>,
    cand: usize,
    t1: f64,
    instance: &Instance,
    f: &PenaltyFn,
    table: &DominanceTable,
) -> bool {
    if !table.rules().uses_local() {
        return false;
    }
    if let Some(j) = incoming {
        let cand_job = instance.job(cand);
        if dominance::local_at_margin(
            instance.job(j),
            cand_job,
            t1 - cand_job.p,
            f,
            PRUNE_MARGIN,
        ) {
            return true;
        }
    }
    let others = s & !(1 << cand);
    if (table.global_succ_mask(cand) | table.mshj_succ_mask(cand)) & others != 0 {
        return true;
    }
    let mut heads = table.head_succ_mask(cand) & others;
    while heads != 0 {
        let k = heads.trailing_zeros() as usize;
        heads &= heads - 1;
        if table.head_bound(cand, k) >= t1 + TIME_SLACK {
            return true;
        }
    }
    false
}

/// Should the forward arc appending `cand` after prefix `p` (elapsed `t`)
/// be skipped? True when `cand` locally precedes the prefix's last job at
/// the adjacent start (the swap is no worse), or some unplaced k must come
/// before `cand` globally (full conclusion, or a tail conclusion already
/// active at t).
pub fn prune_forward(
    p: u64,
    incoming: Option<usize>,
    cand: usize,
    t: f64,
    instance: &Instance,
    f: &PenaltyFn,
    table: &DominanceTable,
) -> bool {
    if !table.rules().uses_local() {
        return false;
    }
    if let Some(j) = incoming {
        let last = instance.job(j);
        if dominance::local_at_margin(instance.job(cand), last, t - last.p, f, PRUNE_MARGIN) {
            return true;
        }
    }
    let n = table.n();
    let full = full_mask(n);
    let outside = full & !p & !(1 << cand);
    if (table.global_pred_mask(cand) | table.mshj_pred_mask(cand)) & outside != 0 {
        return true;
    }
    let mut tails = table.tail_pred_mask(cand) & outside;
    while tails != 0 {
        let k = tails.trailing_zeros() as usize;
        tails &= tails - 1;
        if table.tail_bound(k, cand) <= t - TIME_SLACK {
            return true;
        }
    }
    false
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Queue entry. Pop order: smallest priority, then largest g (deeper nodes
/// first), then smallest mask, then smallest label, so expansions are fully
/// deterministic.
struct HeapNode {
    priority: f64,
    g: f64,
    mask: u64,
    /// u32::MAX at the root.
    label: u32,
}

impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.mask.cmp(&self.mask))
            .then_with(|| other.label.cmp(&self.label))
    }
}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapNode {}

const ROOT_LABEL: u32 = u32::MAX;

pub fn solve(instance: &Instance, f: &PenaltyFn, config: &SolveConfig) -> Result<SolveResult> {
    let n = instance.n();
    if n > 64 {
        return Err(Error::TooLarge { n, what: "search bitmask", limit: 64 });
    }
    let direction = resolve_direction(config.direction, config.rules, f.beta());
    let table = build_table(instance, f, config.rules)?;
    let full = full_mask(n);
    let (root, target) = match direction {
        Direction::Backward => (full, 0),
        Direction::Forward => (0, full),
        Direction::Auto => unreachable!(),
    };

    let mut stats = SearchStats::default();
    let mut heap = BinaryHeap::new();
    // mask -> label of the arc that first reached it (final, since the
    // heuristic is consistent).
    let mut closed: HashMap<u64, u32> = HashMap::new();

    let heuristic = |mask: u64| -> f64 {
        match direction {
            Direction::Backward => lower_bound(mask, 0.0, direction, instance, f),
            Direction::Forward => {
                let elapsed = mask_p_sum(mask, instance);
                lower_bound(full & !mask, elapsed, direction, instance, f)
            }
            Direction::Auto => unreachable!(),
        }
    };

    heap.push(HeapNode { priority: heuristic(root), g: 0.0, mask: root, label: ROOT_LABEL });
    stats.max_queue = 1;

    while let Some(node) = heap.pop() {
        if closed.contains_key(&node.mask) {
            continue;
        }
        closed.insert(node.mask, node.label);
        stats.nodes_expanded += 1;
        if node.mask == target {
            let schedule = reconstruct(&closed, direction, full);
            let cost = evaluate(instance, &schedule, f)?;
            return Ok(SolveResult {
                schedule: Some(schedule),
                cost: Some(cost),
                stats,
                status: SolveStatus::Optimal,
                direction,
            });
        }

        let incoming =
            if node.label == ROOT_LABEL { None } else { Some(node.label as usize) };
        let t = mask_p_sum(node.mask, instance);
        #[cfg(debug_assertions)]
        let h_parent = heuristic(node.mask);

        let candidates = match direction {
            Direction::Backward => node.mask,
            Direction::Forward => full & !node.mask,
            Direction::Auto => unreachable!(),
        };
        let mut rest = candidates;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let pruned = match direction {
                Direction::Backward => {
                    prune_backward(node.mask, incoming, i, t, instance, f, &table)
                }
                Direction::Forward => {
                    prune_forward(node.mask, incoming, i, t, instance, f, &table)
                }
                Direction::Auto => unreachable!(),
            };
            if pruned {
                continue;
            }
            let job = instance.job(i);
            let (child, arc) = match direction {
                Direction::Backward => (node.mask & !(1 << i), job.w * f.eval(t)),
                Direction::Forward => (node.mask | (1 << i), job.w * f.eval(t + job.p)),
                Direction::Auto => unreachable!(),
            };
            let child_h = heuristic(child);
            debug_assert!(
                h_parent <= arc + child_h + 1e-9 * (1.0 + h_parent.abs()),
                "inconsistent heuristic along arc {:#b} -> {:#b}",
                node.mask,
                child
            );
            if stats.nodes_generated + 1 > config.node_cap {
                return Ok(SolveResult {
                    schedule: None,
                    cost: None,
                    stats,
                    status: SolveStatus::NodeCapExceeded,
                    direction,
                });
            }
            stats.nodes_generated += 1;
            heap.push(HeapNode {
                priority: node.g + arc + child_h,
                g: node.g + arc,
                mask: child,
                label: i as u32,
            });
            stats.max_queue = stats.max_queue.max(heap.len());
        }
    }
    // The un-pruned target arc always survives (pruning skips dominated
    // arcs only), so an empty queue without reaching the target is a bug.
    Err(Error::Inconsistency(
        "search queue exhausted before reaching the target state".into(),
    ))
}

/// Walks the closed set from the trivial end back to the root. Backward
/// removal order is reverse schedule order, so walking mask 0 up to the
/// full set yields the schedule front to back; the forward walk is the
/// mirror image and gets reversed.
fn reconstruct(closed: &HashMap<u64, u32>, direction: Direction, full: u64) -> Schedule {
    let mut schedule = Vec::new();
    match direction {
        Direction::Backward => {
            let mut cur = 0u64;
            while cur != full {
                let label = closed[&cur];
                schedule.push(label as usize);
                cur |= 1 << label;
            }
        }
        Direction::Forward => {
            let mut cur = full;
            while cur != 0 {
                let label = closed[&cur];
                schedule.push(label as usize);
                cur &= !(1 << label);
            }
            schedule.reverse();
        }
        Direction::Auto => unreachable!(),
    }
    schedule
}
