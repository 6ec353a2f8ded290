//! Reproducible random instances.
//!
//! Model: processing times uniform on {1,...,100}; Smith ratios r = 2^X with
//! X normal, mean 0, standard deviation `beta * sigma` for beta >= 1 and
//! `2 * sigma` for beta < 1; weights w = r * p. Small sigma concentrates the
//! ratios and makes instances hard, large sigma spreads them out.
//!
//! Every instance is a pure function of (seed, index): each one gets its own
//! stream cipher RNG keyed by both values, so sets can be regenerated
//! byte-identically in any order.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::instance::{format_instance, GenMeta, Instance, Job};
use crate::{Error, Result};

/// Parameters for one batch of same-shape instances.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub n: usize,
    pub sigma: f64,
    pub beta: f64,
    pub count: usize,
    pub seed: u64,
}

/// Standard deviation of the ratio exponent X. The concentration of Smith
/// ratios that makes an instance hard scales with beta, hence the coupling
/// for beta >= 1; below 1 a fixed doubling of the spread is used instead.
pub fn ratio_exponent_sd(beta: f64, sigma: f64) -> f64 {
    if beta >= 1.0 {
        beta * sigma
    } else {
        2.0 * sigma
    }
}

fn instance_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// Draws one Smith ratio 2^X. Exposed so the ratio distribution itself can
/// be tested against its nominal spread.
pub fn sample_smith_ratio(beta: f64, sigma: f64, rng: &mut impl Rng) -> f64 {
    let sd = ratio_exponent_sd(beta, sigma);
    let normal = Normal::new(0.0, sd).expect("positive sd");
    2f64.powf(normal.sample(rng))
}

/// One random instance, deterministic in (seed, index). `beta` only selects
/// the ratio spread; it is recorded in the meta block, not in the jobs.
pub fn gen_instance(n: usize, sigma: f64, beta: f64, seed: u64, index: u64) -> Result<Instance> {
    if n == 0 {
        return Err(Error::DomainError("generator requires n >= 1".into()));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::DomainError(format!(
            "generator requires sigma > 0, got {sigma}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    let mut rng = instance_rng(seed, index);
    let mut jobs: Vec<Job> = Vec::with_capacity(n);
    for id in 0..n {
        // Resample on (measure-zero) Smith-ratio collisions so the
        // distinctness assumption holds by construction.
        loop {
            let p = rng.gen_range(1..=100u32) as f64;
            let r = sample_smith_ratio(beta, sigma, &mut rng);
            let w = r * p;
            let ratio = w / p;
            if jobs.iter().all(|j| j.smith_ratio() != ratio) {
                jobs.push(Job { id, p, w });
                break;
            }
        }
    }
    Ok(Instance::new(format!("r{seed}-{index}"), jobs)?.with_meta(GenMeta {
        sigma,
        seed,
        index,
        beta_target: beta,
    }))
}

fn named(mut inst: Instance, name: String) -> Instance {
    inst.name = name;
    inst
}

/// Custom batch: `count` instances named `n{n}-{k}`.
pub fn gen_custom(spec: &GenSpec) -> Result<Vec<Instance>> {
    (0..spec.count)
        .map(|k| {
            let inst = gen_instance(spec.n, spec.sigma, spec.beta, spec.seed, k as u64)?;
            Ok(named(inst, format!("n{}-{}", spec.n, k)))
        })
        .collect()
}

/// Size sweep: n = 1..35, 10 instances each, sigma = 0.5, ratios drawn for
/// beta = 2. 350 instances named `n{n}-{k}`.
pub fn gen_set_n(seed: u64) -> Result<Vec<Instance>> {
    let mut out = Vec::with_capacity(350);
    let mut index = 0u64;
    for n in 1..=35 {
        for k in 0..10 {
            let inst = gen_instance(n, 0.5, 2.0, seed, index)?;
            out.push(named(inst, format!("n{n}-{k}")));
            index += 1;
        }
    }
    Ok(out)
}

/// Spread sweep: sigma = 0.100, 0.101, ..., 1.000, 3 instances each, n = 25,
/// ratios drawn for beta = 2. 2703 instances named `T{sigma:.3}-{k}`.
pub fn gen_set_t(seed: u64) -> Result<Vec<Instance>> {
    let mut out = Vec::with_capacity(2703);
    let mut index = 0u64;
    for millis in 100..=1000u32 {
        let sigma = f64::from(millis) / 1000.0;
        for k in 0..3 {
            let inst = gen_instance(25, sigma, 2.0, seed, index)?;
            out.push(named(inst, format!("T{sigma:.3}-{k}")));
            index += 1;
        }
    }
    Ok(out)
}

pub const MAIN_GRID_SIGMAS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const MAIN_GRID_BETAS: [f64; 10] = [0.5, 0.8, 1.1, 1.4, 1.7, 2.0, 2.3, 2.6, 2.9, 3.2];

/// Desk-scale cells stay solvable without pruning in seconds; the full grid
/// is sized for real measurement runs.
pub const DESK_N: usize = 16;
pub const DESK_PER_CELL: usize = 5;
pub const FULL_N: usize = 20;
pub const FULL_PER_CELL: usize = 25;

/// The (sigma, beta) grid: every combination of [`MAIN_GRID_SIGMAS`] and
/// [`MAIN_GRID_BETAS`], `per_cell` instances each, named
/// `b{beta:.1}-s{sigma:.1}-{k}`.
pub fn gen_main_grid(seed: u64, full: bool) -> Result<Vec<Instance>> {
    let (n, per_cell) = if full {
        (FULL_N, FULL_PER_CELL)
    } else {
        (DESK_N, DESK_PER_CELL)
    };
    let mut out = Vec::with_capacity(100 * per_cell);
    let mut index = 0u64;
    for &beta in &MAIN_GRID_BETAS {
        for &sigma in &MAIN_GRID_SIGMAS {
            for k in 0..per_cell {
                let inst = gen_instance(n, sigma, beta, seed, index)?;
                out.push(named(inst, format!("b{beta:.1}-s{sigma:.1}-{k}")));
                index += 1;
            }
        }
    }
    Ok(out)
}

pub const MANIFEST_HEADER: &str = "setname,instance,n,beta_target,sigma,seed,index";

/// Writes `dir/{setname}/{name}.inst` for every instance plus a
/// `manifest.csv` listing them in order. Rewrites are byte-identical.
pub fn write_set(dir: impl AsRef<Path>, setname: &str, instances: &[Instance]) -> Result<()> {
    let set_dir = dir.as_ref().join(setname);
    std::fs::create_dir_all(&set_dir)?;
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for inst in instances {
        let meta = inst.meta.ok_or_else(|| {
            Error::Inconsistency(format!("instance {} has no generator meta", inst.name))
        })?;
        std::fs::write(
            set_dir.join(format!("{}.inst", inst.name)),
            format_instance(inst),
        )?;
        let _ = writeln!(
            manifest,
            "{},{},{},{},{},{},{}",
            setname,
            inst.name,
            inst.n(),
            meta.beta_target,
            meta.sigma,
            meta.seed,
            meta.index
        );
    }
    std::fs::write(set_dir.join("manifest.csv"), manifest)?;
    Ok(())
}

/// Reads every instance listed in `dir/manifest.csv`, in manifest order.
pub fn read_set(set_dir: impl AsRef<Path>) -> Result<Vec<Instance>> {
    let set_dir = set_dir.as_ref();
    let manifest = std::fs::read_to_string(set_dir.join("manifest.csv"))?;
    let mut out = Vec::new();
    for (i, line) in manifest.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let name = line.split(',').nth(1).ok_or_else(|| Error::Parse {
            line: i + 1,
            reason: "manifest row missing instance name".into(),
        })?;
        out.push(crate::instance::read_instance(
            set_dir.join(format!("{name}.inst")),
        )?);
    }
    Ok(out)
}
