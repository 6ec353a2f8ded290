//! Exact reference solvers. Slow by design; everything faster is validated
//! against these.

use itertools::Itertools;

use crate::instance::{evaluate, Instance, Schedule};
use crate::penalty::PenaltyFn;
use crate::{Error, Result};

pub const BRUTE_FORCE_MAX_N: usize = 10;
pub const DP_MAX_N: usize = 24;

/// Full permutation enumeration, n <= 10. Returns the optimal cost and the
/// lexicographically smallest optimal schedule (enumeration is in
/// lexicographic order and only strict improvements are kept).
pub fn brute_force_opt(instance: &Instance, f: &PenaltyFn) -> Result<(Schedule, f64)> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            what: "brute-force enumeration",
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    if n == 0 {
        return Ok((vec![], 0.0));
    }
    let mut best: Option<(Schedule, f64)> = None;
    for perm in (0..n).permutations(n) {
        let cost = evaluate(instance, &perm, f)?;
        match &best {
            Some((_, c)) if cost >= *c => {}
            _ => best = Some((perm, cost)),
        }
    }
    Ok(best.expect("n >= 1"))
}

/// Subset dynamic program: `OPT(S) = min_{j in S} OPT(S\{j}) + w_j * f(p(S))`
/// (j is the job finishing last among S, at time p(S)). O(2^n * n) time,
/// O(2^n) memory, guarded at n <= 24.
pub fn dp_opt(instance: &Instance, f: &PenaltyFn) -> Result<f64> {
    let n = instance.n();
    if n > DP_MAX_N {
        return Err(Error::TooLarge {
            n,
            what: "subset dynamic program",
            limit: DP_MAX_N,
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let p: Vec<f64> = instance.jobs().iter().map(|j| j.p).collect();
    let w: Vec<f64> = instance.jobs().iter().map(|j| j.w).collect();
    let full: usize = (1 << n) - 1;
    let mut opt = vec![0.0f64; full + 1];
    for mask in 1..=full {
        let mut p_sum = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            p_sum += p[j];
            bits &= bits - 1;
        }
        let fp = f.eval(p_sum);
        let mut best = f64::INFINITY;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            let cand = opt[mask & !(1 << j)] + w[j] * fp;
            if cand < best {
                best = cand;
            }
            bits &= bits - 1;
        }
        opt[mask] = best;
    }
    Ok(opt[full])
}
