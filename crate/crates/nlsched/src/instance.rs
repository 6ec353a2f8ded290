//! Jobs, instances, schedules, cost evaluation, and the instance text format.

use std::fmt::Write as _;
use std::path::Path;

use crate::penalty::PenaltyFn;
use crate::{Error, Result};

pub const FORMAT_HEADER: &str = "# nlsched-instance v1";

/// One job: processing time `p` and priority weight `w`.
///
/// Weights are allowed to be zero (one reference fixture needs it); negative
/// weights, non-positive processing times, and duplicate Smith ratios are
/// rejected when the instance is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub id: usize,
    pub p: f64,
    pub w: f64,
}

impl Job {
    /// Smith ratio `w / p`, the exact priority order at beta = 1.
    pub fn smith_ratio(&self) -> f64 {
        self.w / self.p
    }
}

/// Generator parameters carried along for bookkeeping; never consulted by
/// the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenMeta {
    pub sigma: f64,
    pub seed: u64,
    pub index: u64,
    pub beta_target: f64,
}

/// A named set of jobs with ids `0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    jobs: Vec<Job>,
    pub meta: Option<GenMeta>,
}

/// Processing order as a permutation of job ids, first job first.
pub type Schedule = Vec<usize>;

impl Instance {
    pub fn new(name: impl Into<String>, jobs: Vec<Job>) -> Result<Self> {
        for (pos, job) in jobs.iter().enumerate() {
            if job.id != pos {
                return Err(Error::InvalidJob {
                    id: job.id,
                    reason: format!("expected id {pos} at position {pos}"),
                });
            }
            if !(job.p > 0.0) || !job.p.is_finite() {
                return Err(Error::InvalidJob {
                    id: job.id,
                    reason: format!("processing time must be positive, got {}", job.p),
                });
            }
            if !(job.w >= 0.0) || !job.w.is_finite() {
                return Err(Error::InvalidJob {
                    id: job.id,
                    reason: format!("weight must be non-negative, got {}", job.w),
                });
            }
        }
        for a in 0..jobs.len() {
            for b in a + 1..jobs.len() {
                if jobs[a].smith_ratio() == jobs[b].smith_ratio() {
                    return Err(Error::DuplicateSmithRatio {
                        a,
                        b,
                        ratio: jobs[a].smith_ratio(),
                    });
                }
            }
        }
        Ok(Instance {
            name: name.into(),
            jobs,
            meta: None,
        })
    }

    pub fn with_meta(mut self, meta: GenMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    /// Total processing time of all jobs.
    pub fn total_p(&self) -> f64 {
        self.jobs.iter().map(|j| j.p).sum()
    }
}

/// Checks that `schedule` is a permutation of `0..n-1`.
fn check_permutation(instance: &Instance, schedule: &[usize]) -> Result<()> {
    let n = instance.n();
    if schedule.len() != n {
        return Err(Error::InvalidSchedule(format!(
            "schedule has {} entries, instance has {n} jobs",
            schedule.len()
        )));
    }
    let mut seen = vec![false; n];
    for &id in schedule {
        if id >= n || seen[id] {
            return Err(Error::InvalidSchedule(format!(
                "job id {id} out of range or repeated"
            )));
        }
        seen[id] = true;
    }
    Ok(())
}

/// Total cost `sum_j w_j * f(C_j)` of processing the jobs in the given order
/// back to back from time zero.
pub fn evaluate(instance: &Instance, schedule: &[usize], f: &PenaltyFn) -> Result<f64> {
    check_permutation(instance, schedule)?;
    let mut t = 0.0;
    let mut total = 0.0;
    for &id in schedule {
        let job = instance.job(id);
        t += job.p;
        total += job.w * f.eval(t);
    }
    Ok(total)
}

/// Jobs in decreasing Smith-ratio order; the optimal schedule at beta = 1.
pub fn smith_schedule(instance: &Instance) -> Result<Schedule> {
    let mut order: Schedule = (0..instance.n()).collect();
    order.sort_by(|&a, &b| {
        instance
            .job(b)
            .smith_ratio()
            .partial_cmp(&instance.job(a).smith_ratio())
            .expect("finite ratios")
    });
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if instance.job(a).smith_ratio() == instance.job(b).smith_ratio() {
            return Err(Error::DuplicateSmithRatio {
                a,
                b,
                ratio: instance.job(a).smith_ratio(),
            });
        }
    }
    Ok(order)
}

/// Renders the instance in the text format, meta line included when present.
pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    if let Some(m) = &instance.meta {
        let _ = writeln!(
            out,
            "# generator: sigma={} seed={} index={} beta={}",
            m.sigma, m.seed, m.index, m.beta_target
        );
    }
    for job in instance.jobs() {
        let _ = writeln!(out, "{},{},{}", job.id, job.p, job.w);
    }
    out
}

/// Parses the text format: header line, `#` comments, then `id,p,w` rows
/// with ids 0..n-1 in order.
pub fn parse_instance(text: &str, name: impl Into<String>) -> Result<Instance> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => break (i, l.trim()),
            None => {
                return Err(Error::Parse {
                    line: 0,
                    reason: "empty file".into(),
                })
            }
        }
    };
    if header.1 != FORMAT_HEADER {
        return Err(Error::Parse {
            line: header.0 + 1,
            reason: format!("expected header `{FORMAT_HEADER}`"),
        });
    }
    let mut meta = None;
    let mut jobs = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(kv) = rest.trim().strip_prefix("generator:") {
                meta = parse_meta(kv);
            }
            continue;
        }
        let mut fields = line.split(',');
        let mut next = |what: &str| -> Result<&str> {
            fields.next().map(str::trim).ok_or_else(|| Error::Parse {
                line: i + 1,
                reason: format!("missing {what}"),
            })
        };
        let id: usize = next("id")?.parse().map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("bad id: {e}"),
        })?;
        let p: f64 = next("p")?.parse().map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("bad p: {e}"),
        })?;
        let w: f64 = next("w")?.parse().map_err(|e| Error::Parse {
            line: i + 1,
            reason: format!("bad w: {e}"),
        })?;
        jobs.push(Job { id, p, w });
    }
    let inst = Instance::new(name, jobs)?;
    Ok(match meta {
        Some(m) => inst.with_meta(m),
        None => inst,
    })
}

fn parse_meta(kv: &str) -> Option<GenMeta> {
    let mut sigma = None;
    let mut seed = None;
    let mut index = None;
    let mut beta = None;
    for part in kv.split_whitespace() {
        let (key, value) = part.split_once('=')?;
        match key {
            "sigma" => sigma = value.parse().ok(),
            "seed" => seed = value.parse().ok(),
            "index" => index = value.parse().ok(),
            "beta" => beta = value.parse().ok(),
            _ => {}
        }
    }
    Some(GenMeta {
        sigma: sigma?,
        seed: seed?,
        index: index?,
        beta_target: beta?,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    parse_instance(&text, name)
}

pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_instance(instance))?;
    Ok(())
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn evaluate_three_job_example() {
        let inst = three_job_example();
        let f = PenaltyFn::new(2.0).unwrap();
        // (i,k,j): completions 4, 5, 13 -> 1*16 + 0*25 + 1.5*169 = 269.5
        assert_eq!(evaluate(&inst, &[0, 1, 2], &f).unwrap(), 269.5);
        // (j,k,i): completions 8, 9, 13 -> 1.5*64 + 0*81 + 1*169 = 265
        assert_eq!(evaluate(&inst, &[2, 1, 0], &f).unwrap(), 265.0);
    }

    #[test]
    fn evaluate_single_job() {
        let inst = Instance::new("one", vec![Job { id: 0, p: 2.0, w: 3.0 }]).unwrap();
        let f = PenaltyFn::new(1.0).unwrap();
        assert_eq!(evaluate(&inst, &[0], &f).unwrap(), 6.0);
    }

    #[test]
    fn evaluate_rejects_non_permutations() {
        let inst = three_job_example();
        let f = PenaltyFn::new(2.0).unwrap();
        assert!(matches!(
            evaluate(&inst, &[0, 0, 1], &f),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            evaluate(&inst, &[0, 1], &f),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            evaluate(&inst, &[0, 1, 3], &f),
            Err(Error::InvalidSchedule(_))
        ));
    }

    #[test]
    fn smith_orders_by_ratio() {
        // a=(2,4) ratio 2, b=(1,1) ratio 1.
        let inst = Instance::new(
            "two",
            vec![Job { id: 0, p: 2.0, w: 4.0 }, Job { id: 1, p: 1.0, w: 1.0 }],
        )
        .unwrap();
        assert_eq!(smith_schedule(&inst).unwrap(), vec![0, 1]);
        let f = PenaltyFn::new(1.0).unwrap();
        assert_eq!(evaluate(&inst, &[0, 1], &f).unwrap(), 4.0 * 2.0 + 1.0 * 3.0);
        assert_eq!(evaluate(&inst, &[1, 0], &f).unwrap(), 1.0 * 1.0 + 4.0 * 3.0);
    }

    #[test]
    fn smith_single_job_is_identity() {
        let inst = Instance::new("one", vec![Job { id: 0, p: 5.0, w: 2.0 }]).unwrap();
        assert_eq!(smith_schedule(&inst).unwrap(), vec![0]);
    }

    #[test]
    fn construction_rejects_bad_jobs() {
        assert!(Instance::new("bad", vec![Job { id: 0, p: 0.0, w: 1.0 }]).is_err());
        assert!(Instance::new("bad", vec![Job { id: 0, p: 1.0, w: -1.0 }]).is_err());
        assert!(Instance::new("bad", vec![Job { id: 1, p: 1.0, w: 1.0 }]).is_err());
        // Equal Smith ratios 4/2 = 2/1.
        assert!(matches!(
            Instance::new(
                "bad",
                vec![Job { id: 0, p: 2.0, w: 4.0 }, Job { id: 1, p: 1.0, w: 2.0 }]
            ),
            Err(Error::DuplicateSmithRatio { .. })
        ));
    }

    #[test]
    fn format_round_trips() {
        let inst = crossing_counterexample().with_meta(GenMeta {
            sigma: 0.5,
            seed: 42,
            index: 3,
            beta_target: 2.0,
        });
        let text = format_instance(&inst);
        let back = parse_instance(&text, "crossing-counterexample").unwrap();
        assert_eq!(back, inst);
        // Re-rendering is byte-identical.
        assert_eq!(format_instance(&back), text);
    }

    #[test]
    fn parse_rejects_missing_header() {
        assert!(matches!(
            parse_instance("0,1,1\n", "x"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn shipped_fixture_files_match_constructors() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
        for (file, inst) in [
            ("three-job-example.inst", three_job_example()),
            ("crossing-counterexample.inst", crossing_counterexample()),
            ("six-job-dag-example.inst", six_job_dag_example()),
        ] {
            let read = read_instance(dir.join(file)).unwrap();
            assert_eq!(read, inst, "{file} differs from the in-code fixture");
            assert_eq!(std::fs::read_to_string(dir.join(file)).unwrap(), format_instance(&inst));
        }
    }
}
