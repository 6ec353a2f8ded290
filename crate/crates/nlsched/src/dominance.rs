//! Pairwise precedence relations and the per-instance table consumed by the
//! search.
//!
//! Terminology used throughout:
//!
//! * local at t: starting two adjacent jobs at prefix length t, one order is
//!   no worse than the swap.
//! * local: the adjacent preference holds for every prefix length.
//! * global: every optimal schedule orders the pair this way, adjacent or
//!   not. Conclusions are one-sided: `Holds` or `Unknown`, never a
//!   refutation.
//! * interval global: the global property restricted to prefix lengths
//!   below (head) or above (tail) the crossing time.
//!
//! For a pair that is not locally ordered either way, the preference flips
//! exactly once, at the crossing time: phi is strictly monotone in t and
//! tends to p_i/p_j, so `phi_ij(t) = w_i/w_j` has a unique root.

use crate::instance::{Instance, Job};
use crate::penalty::PenaltyFn;
use crate::{Error, Result};

/// Relative margin required of every conclusion that feeds pruning, so
/// float noise can only lose pruning power, never prune an optimum away.
pub const PRUNE_MARGIN: f64 = 1e-12;

/// Absolute slack on crossing-time comparisons during pruning; three orders
/// of magnitude above the bisection tolerance.
pub const TIME_SLACK: f64 = 1e-6;

/// Bisection parameters for the crossing-time solver.
const BISECT_TOL: f64 = 1e-9;
const BISECT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalRelation {
    IBeforeJ,
    JBeforeI,
    /// Neither order holds for all t; the preference flips at the crossing
    /// time.
    Crossing,
}

/// Direction of a one-sided conclusion about a stored pair (i, j), i < j.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    IJ,
    JI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalConclusion {
    Holds,
    Unknown,
}

/// Which dominance families the solver may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSet {
    None,
    LocalOnly,
    Mshj,
    NewRules,
    All,
}

impl RuleSet {
    pub fn uses_local(self) -> bool {
        !matches!(self, RuleSet::None)
    }
    pub fn uses_mshj(self) -> bool {
        matches!(self, RuleSet::Mshj | RuleSet::All)
    }
    pub fn uses_new_global(self) -> bool {
        matches!(self, RuleSet::NewRules | RuleSet::All)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleSet::None => "none",
            RuleSet::LocalOnly => "local",
            RuleSet::Mshj => "mshj",
            RuleSet::NewRules => "new",
            RuleSet::All => "all",
        }
    }
}

impl std::str::FromStr for RuleSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(RuleSet::None),
            "local" => Ok(RuleSet::LocalOnly),
            "mshj" => Ok(RuleSet::Mshj),
            "new" => Ok(RuleSet::NewRules),
            "all" => Ok(RuleSet::All),
            _ => Err(Error::DomainError(format!("unknown rule set `{s}`"))),
        }
    }
}

/// True iff scheduling i immediately before j, starting at prefix length t,
/// is no worse than the swap: `w_i/w_j >= phi_ij(t)`, evaluated
/// cross-multiplied so zero weights need no special case.
pub fn local_at(i: &Job, j: &Job, t: f64, f: &PenaltyFn) -> bool {
    local_at_margin(i, j, t, f, 0.0)
}

/// [`local_at`] demanding the inequality by a relative margin.
pub fn local_at_margin(i: &Job, j: &Job, t: f64, f: &PenaltyFn, margin: f64) -> bool {
    let both = f.eval(t + i.p + j.p);
    i.w * (both - f.eval(t + i.p)) >= j.w * (both - f.eval(t + j.p)) * (1.0 + margin)
}

/// True iff i precedes j locally for every prefix length.
///
/// Equivalent to `w_j/w_i <= inf_t phi_ji(t)`; the infimum sits at t=0 when
/// phi_ji is increasing and at the limit `p_j/p_i` when decreasing, which is
/// decided by which job is longer and which side of 1 beta is on.
pub fn local_order(i: &Job, j: &Job, f: &PenaltyFn) -> bool {
    local_order_margin(i, j, f, 0.0)
}

fn local_order_margin(i: &Job, j: &Job, f: &PenaltyFn, margin: f64) -> bool {
    let infimum_is_limit = if f.beta() >= 1.0 { i.p >= j.p } else { i.p <= j.p };
    if infimum_is_limit {
        // w_j/w_i <= p_j/p_i
        j.w * i.p * (1.0 + margin) <= i.w * j.p
    } else {
        // w_j/w_i <= phi_ji(0) = (f(p_i+p_j) - f(p_i)) / (f(p_i+p_j) - f(p_j))
        let both = f.eval(i.p + j.p);
        j.w * (both - f.eval(j.p)) * (1.0 + margin) <= i.w * (both - f.eval(i.p))
    }
}

pub fn classify_local(i: &Job, j: &Job, f: &PenaltyFn) -> LocalRelation {
    if local_order(i, j, f) {
        LocalRelation::IBeforeJ
    } else if local_order(j, i, f) {
        LocalRelation::JBeforeI
    } else {
        LocalRelation::Crossing
    }
}

/// Crossing time of a pair ordered neither way: the unique root of
/// `phi_ij(t) = w_i/w_j`, by bisection (phi is strictly monotone). Returns
/// None for locally ordered pairs. Absolute tolerance 1e-9.
pub fn crossing_time(i: &Job, j: &Job, f: &PenaltyFn) -> Result<Option<f64>> {
    if classify_local(i, j, f) != LocalRelation::Crossing {
        return Ok(None);
    }
    // Crossing pairs have positive weights on both sides: a zero-weight job
    // is locally ordered against everything.
    let r = i.w / j.w;
    let h = |t: f64| f.phi(i.p, j.p, t) - r;
    let h0 = h(0.0);
    if h0 == 0.0 {
        return Ok(Some(0.0));
    }
    let mut hi = i.p + j.p;
    let mut found = false;
    for _ in 0..BISECT_MAX_ITER {
        let v = h(hi);
        if v == 0.0 {
            return Ok(Some(hi));
        }
        if (v > 0.0) != (h0 > 0.0) {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if !found {
        return Err(Error::Inconsistency(format!(
            "no sign change of phi - w_i/w_j up to t={hi} for pair ({}, {}): \
             ratio {r} outside phi's range",
            i.id, j.id
        )));
    }
    let mut lo = 0.0;
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0) == (h0 > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// One-sided global conclusion: `Holds` means every optimal schedule puts i
/// before j. Local order is necessary in all three sufficient conditions:
/// it transfers to a global order outright when beta >= 1 or when i is the
/// shorter job, and below 1 with i longer it transfers under the extra
/// weight condition `w_i/w_j >= (p_i/p_j)^(2-beta)`.
pub fn global_order(i: &Job, j: &Job, f: &PenaltyFn) -> GlobalConclusion {
    global_order_margin(i, j, f, 0.0)
}

fn global_order_margin(i: &Job, j: &Job, f: &PenaltyFn, margin: f64) -> GlobalConclusion {
    if !local_order_margin(i, j, f, margin) {
        return GlobalConclusion::Unknown;
    }
    if f.beta() >= 1.0 || i.p <= j.p {
        return GlobalConclusion::Holds;
    }
    if i.w >= j.w * (i.p / j.p).powf(2.0 - f.beta()) * (1.0 + margin) {
        GlobalConclusion::Holds
    } else {
        GlobalConclusion::Unknown
    }
}

/// Head-interval conclusion `i` before `j` for every placement whose
/// surrounding sequences total at most t*. Exists only below beta = 1 for a
/// crossing pair with i the shorter job (the one preferred early); the
/// mirrored situation above beta = 1 is explicitly refuted by
/// counterexample and must stay absent.
pub fn head_interval(i: &Job, j: &Job, f: &PenaltyFn) -> Result<Option<f64>> {
    if f.beta() >= 1.0 || i.p >= j.p {
        return Ok(None);
    }
    crossing_time(i, j, f)
}

/// Tail-interval conclusion `i` before `j` for every placement after a
/// prefix of length at least t*. Exists only above beta = 1 for a crossing
/// pair with i the shorter job (the one preferred late); below 1 the
/// analogous transfer is an open question and must stay absent.
pub fn tail_interval(i: &Job, j: &Job, f: &PenaltyFn) -> Result<Option<f64>> {
    if f.beta() <= 1.0 || i.p >= j.p {
        return Ok(None);
    }
    crossing_time(i, j, f)
}

/// Weight-and-ratio rule, exact beta = 2 only: `w_i >= w_j` together with a
/// strictly larger Smith ratio puts i globally before j.
pub fn mshj_rule(i: &Job, j: &Job, f: &PenaltyFn) -> bool {
    mshj_margin(i, j, f, 0.0)
}

fn mshj_margin(i: &Job, j: &Job, f: &PenaltyFn, margin: f64) -> bool {
    f.beta() == 2.0 && i.w >= j.w * (1.0 + margin) && i.w * j.p > j.w * i.p * (1.0 + margin)
}

/// Everything known about one unordered pair (i, j), i < j by id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRelation {
    pub i: usize,
    pub j: usize,
    pub local: LocalRelation,
    pub crossing_time: Option<f64>,
    /// Theorem-backed full global order, when concluded.
    pub full_global: Option<Dir>,
    /// `(dir, t*)`: dir's first job precedes the other whenever the
    /// surrounding sequences total at most t*.
    pub head: Option<(Dir, f64)>,
    /// `(dir, t*)`: dir's first job precedes the other after any prefix of
    /// length at least t*.
    pub tail: Option<(Dir, f64)>,
    /// beta = 2 weight-and-ratio conclusion, kept separate from the
    /// theorem-backed field so rule sets can enable them independently.
    pub mshj: Option<Dir>,
}

/// Pairwise relations for one instance plus adjacency views the search
/// consults per candidate in O(1) (bit tests) or O(popcount) (interval
/// conclusions, which also need a time comparison).
pub struct DominanceTable {
    n: usize,
    rules: RuleSet,
    rels: Vec<PairRelation>,
    /// Bit b of global_succ[a]: a globally precedes b (theorem-backed).
    global_succ: Vec<u64>,
    global_pred: Vec<u64>,
    mshj_succ: Vec<u64>,
    mshj_pred: Vec<u64>,
    /// Bit b of head_succ[a]: head conclusion a-before-b with bound
    /// head_t[a*n+b]; absent entries are NaN.
    head_succ: Vec<u64>,
    head_t: Vec<f64>,
    /// Bit a of tail_pred[b]: tail conclusion a-before-b from tail_t[a*n+b].
    tail_pred: Vec<u64>,
    tail_t: Vec<f64>,
}

impl DominanceTable {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn rules(&self) -> RuleSet {
        self.rules
    }
    pub fn pairs(&self) -> &[PairRelation] {
        &self.rels
    }

    pub fn pair(&self, i: usize, j: usize) -> &PairRelation {
        debug_assert!(i < j && j < self.n);
        let n = self.n;
        &self.rels[i * (2 * n - i - 1) / 2 + (j - i - 1)]
    }

    /// Theorem-backed `a` globally before `b`?
    pub fn global_holds(&self, a: usize, b: usize) -> bool {
        self.global_succ[a] & (1 << b) != 0
    }

    pub fn mshj_holds(&self, a: usize, b: usize) -> bool {
        self.mshj_succ[a] & (1 << b) != 0
    }

    /// Head conclusion `a` before `b` covering surrounding length `t1`.
    pub fn head_covers(&self, a: usize, b: usize, t1: f64) -> bool {
        // NaN (absent) compares false.
        self.head_t[a * self.n + b] >= t1
    }

    /// Candidates the search masks against; see `search::prune_*`.
    pub(crate) fn global_succ_mask(&self, a: usize) -> u64 {
        self.global_succ[a]
    }
    pub(crate) fn global_pred_mask(&self, a: usize) -> u64 {
        self.global_pred[a]
    }
    pub(crate) fn mshj_succ_mask(&self, a: usize) -> u64 {
        self.mshj_succ[a]
    }
    pub(crate) fn mshj_pred_mask(&self, a: usize) -> u64 {
        self.mshj_pred[a]
    }
    pub(crate) fn head_succ_mask(&self, a: usize) -> u64 {
        self.head_succ[a]
    }
    pub(crate) fn head_bound(&self, a: usize, b: usize) -> f64 {
        self.head_t[a * self.n + b]
    }
    pub(crate) fn tail_pred_mask(&self, b: usize) -> u64 {
        self.tail_pred[b]
    }
    pub(crate) fn tail_bound(&self, a: usize, b: usize) -> f64 {
        self.tail_t[a * self.n + b]
    }
}

/// Computes the pair relations for `instance`. Local relations and crossing
/// times are always recorded; the global families are populated per
/// `rules`, each conclusion re-checked with [`PRUNE_MARGIN`].
pub fn build_table(instance: &Instance, f: &PenaltyFn, rules: RuleSet) -> Result<DominanceTable> {
    let n = instance.n();
    if n > 64 {
        return Err(Error::TooLarge { n, what: "dominance table", limit: 64 });
    }
    let mut rels = Vec::with_capacity(n * (n - 1) / 2);
    let mut global_succ = vec![0u64; n];
    let mut global_pred = vec![0u64; n];
    let mut mshj_succ = vec![0u64; n];
    let mut mshj_pred = vec![0u64; n];
    let mut head_succ = vec![0u64; n];
    let mut tail_pred = vec![0u64; n];
    let mut head_t = vec![f64::NAN; n * n];
    let mut tail_t = vec![f64::NAN; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (instance.job(i), instance.job(j));
            let local = classify_local(a, b, f);
            let t_star = if local == LocalRelation::Crossing {
                crossing_time(a, b, f)?
            } else {
                None
            };
            let mut rel = PairRelation {
                i,
                j,
                local,
                crossing_time: t_star,
                full_global: None,
                head: None,
                tail: None,
                mshj: None,
            };
            if rules.uses_new_global() {
                rel.full_global =
                    if global_order_margin(a, b, f, PRUNE_MARGIN) == GlobalConclusion::Holds {
                        Some(Dir::IJ)
                    } else if global_order_margin(b, a, f, PRUNE_MARGIN)
                        == GlobalConclusion::Holds
                    {
                        Some(Dir::JI)
                    } else {
                        None
                    };
                if let Some(t) = t_star {
                    // The early-preferred job of a crossing pair is the
                    // shorter one below beta = 1 and the longer one above;
                    // interval conclusions always favor the shorter job
                    // (early head below 1, late tail above 1).
                    let shorter_first = if a.p < b.p { Dir::IJ } else { Dir::JI };
                    if f.beta() < 1.0 {
                        rel.head = Some((shorter_first, t));
                    } else if f.beta() > 1.0 {
                        rel.tail = Some((shorter_first, t));
                    }
                }
            }
            if rules.uses_mshj() {
                rel.mshj = if mshj_margin(a, b, f, PRUNE_MARGIN) {
                    Some(Dir::IJ)
                } else if mshj_margin(b, a, f, PRUNE_MARGIN) {
                    Some(Dir::JI)
                } else {
                    None
                };
            }

            let store = |succ: &mut Vec<u64>, pred: &mut Vec<u64>, dir: Dir| {
                let (x, y) = match dir {
                    Dir::IJ => (i, j),
                    Dir::JI => (j, i),
                };
                succ[x] |= 1 << y;
                pred[y] |= 1 << x;
            };
            if let Some(dir) = rel.full_global {
                store(&mut global_succ, &mut global_pred, dir);
            }
            if let Some(dir) = rel.mshj {
                store(&mut mshj_succ, &mut mshj_pred, dir);
            }
            if let Some((dir, t)) = rel.head {
                let (x, y) = match dir {
                    Dir::IJ => (i, j),
                    Dir::JI => (j, i),
                };
                head_succ[x] |= 1 << y;
                head_t[x * n + y] = t;
            }
            if let Some((dir, t)) = rel.tail {
                let (x, y) = match dir {
                    Dir::IJ => (i, j),
                    Dir::JI => (j, i),
                };
                tail_pred[y] |= 1 << x;
                tail_t[x * n + y] = t;
            }
            rels.push(rel);
        }
    }
    Ok(DominanceTable {
        n,
        rules,
        rels,
        global_succ,
        global_pred,
        mshj_succ,
        mshj_pred,
        head_succ,
        head_t,
        tail_pred,
        tail_t,
    })
}

pub const RELATIONS_HEADER: &str = "i,j,local,crossing_time,full_global,head_t,tail_t,mshj";

/// One CSV row per unordered pair. Interval columns carry only the time
/// bound; their direction is implied (the shorter job of a crossing pair).
pub fn relations_csv(table: &DominanceTable) -> String {
    use std::fmt::Write as _;
    let mut out = String::from(RELATIONS_HEADER);
    out.push('\n');
    for rel in table.pairs() {
        let local = match rel.local {
            LocalRelation::IBeforeJ => "i_before_j",
            LocalRelation::JBeforeI => "j_before_i",
            LocalRelation::Crossing => "crossing",
        };
        let dir_str = |d: Option<Dir>| match d {
            Some(Dir::IJ) => "i_before_j".to_string(),
            Some(Dir::JI) => "j_before_i".to_string(),
            None => "none".to_string(),
        };
        let time_str = |t: Option<f64>| t.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            rel.i,
            rel.j,
            local,
            time_str(rel.crossing_time),
            dir_str(rel.full_global),
            time_str(rel.head.map(|(_, t)| t)),
            time_str(rel.tail.map(|(_, t)| t)),
            dir_str(rel.mshj),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::*;
    use crate::instance::evaluate;
    use crate::instgen;
    use itertools::Itertools;

    fn job(id: usize, p: f64, w: f64) -> Job {
        Job { id, p, w }
    }

    fn f(beta: f64) -> PenaltyFn {
        PenaltyFn::new(beta).unwrap()
    }

    // The crossing pair of the counterexample instance: i=(13,7), j=(8,5).
    fn crossing_pair() -> (Job, Job) {
        (job(0, 13.0, 7.0), job(1, 8.0, 5.0))
    }

    #[test]
    fn local_at_crossing_pair() {
        let (i, j) = crossing_pair();
        let f2 = f(2.0);
        assert!(local_at(&i, &j, 0.0, &f2));
        assert!(!local_at(&i, &j, 2.0, &f2));
    }

    #[test]
    fn local_at_huge_ratio_always_true() {
        let i = job(0, 6.0, 1e6);
        let j = job(1, 5.0, 1.0);
        let f2 = f(2.0);
        for k in 0..100 {
            assert!(local_at(&i, &j, k as f64 * 3.7, &f2));
        }
    }

    #[test]
    fn local_order_examples() {
        // beta >= 1, p_i >= p_j: w_j/w_i = 0.25 <= p_j/p_i = 0.5.
        assert!(local_order(&job(0, 2.0, 4.0), &job(1, 1.0, 1.0), &f(2.0)));
        // Crossing pair: neither direction.
        let (i, j) = crossing_pair();
        assert!(!local_order(&i, &j, &f(2.0)));
        assert!(!local_order(&j, &i, &f(2.0)));
        // beta >= 1, p_i <= p_j: w_j/w_i = 1.5 <= phi_ji(0) = 1.6.
        assert!(local_order(&job(0, 4.0, 1.0), &job(1, 8.0, 1.5), &f(2.0)));
    }

    #[test]
    fn crossing_time_of_counterexample_pair() {
        let (i, j) = crossing_pair();
        let t = crossing_time(&i, &j, &f(2.0)).unwrap().unwrap();
        assert!((t - 19.0 / 18.0).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn crossing_time_absent_for_ordered_pair() {
        let t = crossing_time(&job(0, 4.0, 1.0), &job(1, 8.0, 1.5), &f(2.0)).unwrap();
        assert_eq!(t, None);
    }

    #[test]
    fn crossing_time_self_consistent_below_one() {
        // Construct a crossing pair at beta = 0.5: need w_i/w_j strictly
        // between phi_ij(0) and p_i/p_j.
        let fh = f(0.5);
        let (p_i, p_j) = (2.0, 6.0);
        let lo = fh.phi(p_i, p_j, 0.0);
        let hi = p_i / p_j;
        assert!(lo < hi);
        let r = 0.5 * (lo + hi);
        let i = job(0, p_i, r);
        let j = job(1, p_j, 1.0);
        assert_eq!(classify_local(&i, &j, &fh), LocalRelation::Crossing);
        let t = crossing_time(&i, &j, &fh).unwrap().unwrap();
        assert!((fh.phi(p_i, p_j, t) - r).abs() < 1e-9);
    }

    #[test]
    fn global_order_examples() {
        // beta = 2, locally ordered => Holds.
        assert_eq!(
            global_order(&job(0, 4.0, 1.0), &job(1, 8.0, 1.5), &f(2.0)),
            GlobalConclusion::Holds
        );
        // Crossing pair: Unknown both ways.
        let (i, j) = crossing_pair();
        assert_eq!(global_order(&i, &j, &f(2.0)), GlobalConclusion::Unknown);
        assert_eq!(global_order(&j, &i, &f(2.0)), GlobalConclusion::Unknown);
        // beta = 0.5, longer-first case with the weight condition:
        // w_i/w_j = 4 >= (p_i/p_j)^1.5 = 2^1.5.
        let i = job(0, 4.0, 4.0);
        let j = job(1, 2.0, 1.0);
        assert_eq!(global_order(&i, &j, &f(0.5)), GlobalConclusion::Holds);
    }

    #[test]
    fn global_oscar_example_verified_by_enumeration() {
        // For the longer-first beta<1 conclusion above, check that every
        // optimal schedule of small pools containing the pair puts i first.
        let fh = f(0.5);
        let i = job(0, 4.0, 4.0);
        let j = job(1, 2.0, 1.0);
        let fillers = [(1.0, 0.7), (3.0, 2.2), (7.0, 1.3), (5.0, 0.9), (9.0, 4.1)];
        for take in 0..=fillers.len() {
            let mut jobs = vec![i, j];
            for (k, &(p, w)) in fillers.iter().take(take).enumerate() {
                jobs.push(job(2 + k, p, w));
            }
            let inst = Instance::new("pool", jobs).unwrap();
            let ids: Vec<usize> = (0..inst.n()).collect();
            let mut best = f64::INFINITY;
            let mut orders: Vec<Vec<usize>> = Vec::new();
            for perm in ids.iter().copied().permutations(inst.n()) {
                let c = evaluate(&inst, &perm, &fh).unwrap();
                if c < best * (1.0 - 1e-12) {
                    best = c;
                    orders = vec![perm];
                } else if c <= best * (1.0 + 1e-12) {
                    orders.push(perm);
                }
            }
            for order in orders {
                let pos_i = order.iter().position(|&x| x == 0).unwrap();
                let pos_j = order.iter().position(|&x| x == 1).unwrap();
                assert!(pos_i < pos_j, "optimal order {order:?} violates the conclusion");
            }
        }
    }

    #[test]
    fn head_interval_gates() {
        // Absent for the beta = 2 crossing pair in both orientations: the
        // head transfer is refuted above beta = 1.
        let (i, j) = crossing_pair();
        assert_eq!(head_interval(&i, &j, &f(2.0)).unwrap(), None);
        assert_eq!(head_interval(&j, &i, &f(2.0)).unwrap(), None);
        // Present below beta = 1 for a crossing pair, shorter job first.
        let fh = f(0.5);
        let r = 0.5 * (fh.phi(2.0, 6.0, 0.0) + 2.0 / 6.0);
        let a = job(0, 2.0, r);
        let b = job(1, 6.0, 1.0);
        let t = head_interval(&a, &b, &fh).unwrap().unwrap();
        assert!(t > 0.0);
        assert_eq!(head_interval(&b, &a, &fh).unwrap(), None);
        // Absent at beta = 1.5 even for a crossing pair with a shorter.
        let f15 = f(1.5);
        let lo = f15.phi(8.0, 13.0, 0.0);
        let hi: f64 = 8.0 / 13.0;
        let rr = 0.5 * (lo.min(hi) + lo.max(hi));
        let c = job(0, 8.0, rr);
        let d = job(1, 13.0, 1.0);
        if classify_local(&c, &d, &f15) == LocalRelation::Crossing {
            assert_eq!(head_interval(&c, &d, &f15).unwrap(), None);
        }
    }

    #[test]
    fn tail_interval_gates() {
        let (i, j) = crossing_pair();
        let f2 = f(2.0);
        // j is shorter and late-preferred: tail j-before-i at t* = 19/18.
        let t = tail_interval(&j, &i, &f2).unwrap().unwrap();
        assert!((t - 19.0 / 18.0).abs() < 1e-6);
        assert_eq!(tail_interval(&i, &j, &f2).unwrap(), None);
        // No tail conclusions below beta = 1 (open question in the source
        // theory): same shape as the head test's crossing pair.
        let fh = f(0.5);
        let r = 0.5 * (fh.phi(2.0, 6.0, 0.0) + 2.0 / 6.0);
        let a = job(0, 2.0, r);
        let b = job(1, 6.0, 1.0);
        assert_eq!(tail_interval(&a, &b, &fh).unwrap(), None);
        assert_eq!(tail_interval(&b, &a, &fh).unwrap(), None);
        // Absent for locally ordered pairs.
        assert_eq!(tail_interval(&job(0, 1.0, 1.0), &job(1, 2.0, 1.0), &f2).unwrap(), None);
    }

    #[test]
    fn mshj_examples() {
        let f2 = f(2.0);
        // Heavier and better ratio.
        assert!(mshj_rule(&job(0, 2.0, 5.0), &job(1, 3.0, 4.0), &f2));
        // Better ratio but lighter: no conclusion.
        assert!(!mshj_rule(&job(0, 1.0, 3.0), &job(1, 3.0, 4.0), &f2));
        // Not beta = 2.
        assert!(!mshj_rule(&job(0, 2.0, 5.0), &job(1, 3.0, 4.0), &f(2.1)));
    }

    #[test]
    fn mshj_implies_local_and_global() {
        let f2 = f(2.0);
        for idx in 0..400 {
            let inst = instgen::gen_instance(2, 0.4, 2.0, 555, idx).unwrap();
            let (a, b) = (*inst.job(0), *inst.job(1));
            for (x, y) in [(a, b), (b, a)] {
                if mshj_rule(&x, &y, &f2) {
                    assert!(local_order(&x, &y, &f2));
                    assert_eq!(global_order(&x, &y, &f2), GlobalConclusion::Holds);
                }
            }
        }
    }

    #[test]
    fn global_implies_local_on_random_pairs() {
        for &beta in &[0.5, 0.8, 1.1, 2.0, 3.2] {
            let fb = f(beta);
            for idx in 0..200 {
                let inst = instgen::gen_instance(2, 0.5, beta, 777, idx).unwrap();
                let (a, b) = (*inst.job(0), *inst.job(1));
                for (x, y) in [(a, b), (b, a)] {
                    if global_order(&x, &y, &fb) == GlobalConclusion::Holds {
                        assert!(local_order(&x, &y, &fb));
                    }
                }
            }
        }
    }

    #[test]
    fn local_order_matches_dense_local_at_grid() {
        // The all-t characterization agrees with sampling local_at on a
        // dense grid, including far-out t where phi nears its limit.
        for &beta in &[0.5, 0.8, 1.0, 1.1, 2.0, 3.2] {
            let fb = f(beta);
            for idx in 0..60 {
                let inst = instgen::gen_instance(2, 0.5, beta, 901, idx).unwrap();
                let (a, b) = (*inst.job(0), *inst.job(1));
                let span = 10.0 * (a.p + b.p);
                let mut sampled = true;
                for k in 0..=400 {
                    let t = span * k as f64 / 400.0;
                    if !local_at(&a, &b, t, &fb) {
                        sampled = false;
                        break;
                    }
                }
                // Far field: the limit decides; sample a few huge t too.
                for &t in &[1e4, 1e6, 1e8] {
                    if !local_at(&a, &b, t, &fb) {
                        sampled = false;
                    }
                }
                assert_eq!(
                    local_order(&a, &b, &fb),
                    sampled,
                    "pair ({a:?}, {b:?}) beta={beta}"
                );
            }
        }
    }

    #[test]
    fn phi_monotonicity_cases() {
        let grids: [(f64, f64, f64, bool); 4] = [
            // (p_i, p_j, beta, increasing?)
            (7.0, 3.0, 2.0, true),
            (3.0, 7.0, 0.5, true),
            (3.0, 7.0, 2.0, false),
            (7.0, 3.0, 0.5, false),
        ];
        for (p_i, p_j, beta, increasing) in grids {
            let fb = f(beta);
            let mut prev = fb.phi(p_i, p_j, 0.0);
            for k in 1..=200 {
                let t = (p_i + p_j) * 10.0 * k as f64 / 200.0;
                let cur = fb.phi(p_i, p_j, t);
                if increasing {
                    assert!(cur > prev, "phi not increasing at t={t} for beta={beta}");
                } else {
                    assert!(cur < prev, "phi not decreasing at t={t} for beta={beta}");
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn phi_limit_cases() {
        for &beta in &[0.5, 1.1, 2.0, 3.2] {
            let fb = f(beta);
            for &(p_i, p_j) in &[(2.0, 1.0), (13.0, 8.0), (1.0, 100.0), (99.0, 98.0)] {
                let t = 1e5 * (p_i + p_j);
                assert!(
                    (fb.phi(p_i, p_j, t) - p_i / p_j).abs() <= 1e-3,
                    "limit violated at beta={beta} p=({p_i},{p_j})"
                );
            }
        }
    }

    #[test]
    fn table_for_counterexample_instance() {
        let inst = crossing_counterexample();
        let f2 = f(2.0);
        let table = build_table(&inst, &f2, RuleSet::All).unwrap();
        // Pair (i=0, j=1) crosses at 19/18 with tail j-before-i.
        let rel = table.pair(0, 1);
        assert_eq!(rel.local, LocalRelation::Crossing);
        assert!((rel.crossing_time.unwrap() - 19.0 / 18.0).abs() < 1e-6);
        assert_eq!(rel.full_global, None);
        assert_eq!(rel.head, None);
        let (dir, t) = rel.tail.unwrap();
        assert_eq!(dir, Dir::JI);
        assert!((t - 19.0 / 18.0).abs() < 1e-6);
    }

    #[test]
    fn table_rules_none_has_no_global_fields() {
        let inst = crossing_counterexample();
        let table = build_table(&inst, &f(2.0), RuleSet::None).unwrap();
        for rel in table.pairs() {
            assert_eq!(rel.full_global, None);
            assert_eq!(rel.head, None);
            assert_eq!(rel.tail, None);
            assert_eq!(rel.mshj, None);
        }
    }

    #[test]
    fn table_single_job_is_empty() {
        let inst = Instance::new("one", vec![job(0, 3.0, 1.0)]).unwrap();
        let table = build_table(&inst, &f(2.0), RuleSet::All).unwrap();
        assert!(table.pairs().is_empty());
    }

    #[test]
    fn relations_csv_shape() {
        let inst = crossing_counterexample();
        let table = build_table(&inst, &f(2.0), RuleSet::All).unwrap();
        let csv = relations_csv(&table);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), RELATIONS_HEADER);
        assert_eq!(lines.count(), 3);
        assert!(csv.contains("0,1,crossing,1.05555"));
    }
}
