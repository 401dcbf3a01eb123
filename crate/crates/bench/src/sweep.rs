//! Solving one instance for several structure counts.

use std::time::Duration;

use rayon::prelude::*;
use vnstt::cost::COST_TOLERANCE;
use vnstt::trace::format_cost;
use vnstt::vns::{best_of_trace, max_k, solve_vns, VnsRun};
use vnstt::{Error, Problem, Result};

/// Band of structure size / N in which the best solutions were reported
/// for the 90-event dataset. Shown as an observation only.
pub const REPORTED_RATIO_BAND: (f64, f64) = (0.081, 0.162);

pub const REPORT_HEADER: &str = "k,structure_size,best_cost,best_structure,best_leading_event,\
final_cost,construct_calls,cost_evaluations,stage_minima_non_increasing,structure_ratio,\
in_reported_band";

/// Every divisor `d` of `n` with `2 <= d <= n / 2`.
pub fn all_divisor_ks(n: usize) -> Vec<usize> {
    (2..=max_k(n)).filter(|d| n.is_multiple_of(*d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    /// Size of the largest structure.
    pub structure_size: usize,
    pub best_cost: Option<f64>,
    pub best_structure: Option<usize>,
    /// 1-based event number.
    pub best_leading_event: Option<usize>,
    pub final_cost: Option<f64>,
    pub construct_calls: u64,
    pub cost_evaluations: u64,
    pub cost_terms: u64,
    pub stage_minima_non_increasing: bool,
    pub elapsed: Duration,
}

impl SweepRow {
    fn from_run(run: &VnsRun) -> Self {
        let best = best_of_trace(run).ok();
        Self {
            k: run.k,
            structure_size: run.structure_sizes.iter().copied().max().unwrap_or(0),
            best_cost: best.map(|b| b.cost),
            best_structure: best.map(|b| b.structure),
            best_leading_event: best.map(|b| b.leading_event + 1),
            final_cost: run.final_record.cost,
            construct_calls: run.construct_calls,
            cost_evaluations: run.cost_evaluations,
            cost_terms: run.cost_terms,
            stage_minima_non_increasing: run.stage_minima_non_increasing(),
            elapsed: run.elapsed,
        }
    }

    /// Structure size as a fraction of the event count.
    pub fn ratio(&self, events: usize) -> f64 {
        self.structure_size as f64 / events as f64
    }

    pub fn in_reported_band(&self, events: usize) -> bool {
        let r = self.ratio(events);
        r >= REPORTED_RATIO_BAND.0 && r <= REPORTED_RATIO_BAND.1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub instance_id: String,
    pub events: usize,
    /// Ordered by k ascending.
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// The k with the cheapest final solution; ties go to the smaller k.
    pub fn best_k(&self) -> Option<&SweepRow> {
        let min = self
            .rows
            .iter()
            .filter_map(|r| r.final_cost)
            .fold(f64::INFINITY, f64::min);
        self.rows
            .iter()
            .find(|r| matches!(r.final_cost, Some(c) if c <= min + COST_TOLERANCE))
    }

    /// CSV rendering. Wall-clock time is left out so the bytes depend only
    /// on the inputs.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{:.4},{}\n",
                r.k,
                r.structure_size,
                opt(r.best_cost.map(format_cost)),
                opt(r.best_structure.map(|s| s.to_string())),
                opt(r.best_leading_event.map(|e| e.to_string())),
                opt(r.final_cost.map(format_cost)),
                r.construct_calls,
                r.cost_evaluations,
                r.stage_minima_non_increasing,
                r.ratio(self.events),
                r.in_reported_band(self.events),
            ));
        }
        out
    }
}

/// Solves `problem` once per k on a pool of `jobs` threads. Runs come back
/// in the order of `ks` regardless of scheduling.
pub fn run_sweep(problem: &Problem, ks: &[usize], jobs: usize) -> Result<Vec<VnsRun>> {
    let n = problem.num_events();
    if let Some(&k) = ks.iter().find(|&&k| k < 2 || k > max_k(n)) {
        return Err(Error::KOutOfRange {
            k,
            max: max_k(n),
            events: n,
        });
    }
    if jobs <= 1 {
        return ks.iter().map(|&k| solve_vns(problem, k)).collect();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
        .install(|| ks.par_iter().map(|&k| solve_vns(problem, k)).collect())
}

pub fn report(problem: &Problem, runs: &[VnsRun]) -> SweepReport {
    let mut rows: Vec<SweepRow> = runs.iter().map(SweepRow::from_run).collect();
    rows.sort_by_key(|r| r.k);
    SweepReport {
        instance_id: problem.id().to_string(),
        events: problem.num_events(),
        rows,
    }
}
