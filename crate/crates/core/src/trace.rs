//! Trace export and text tables.
//!
//! Event numbers in every output are 1-based positions in the instance
//! event list.

use std::fmt::Write as _;

use crate::vns::VnsRun;

pub const TRACE_HEADER: &str = "k,structure,rotation,leading_event,cost,feasible";

/// Fixed six-decimal rendering with a '.' separator.
pub fn format_cost(cost: f64) -> String {
    format!("{cost:.6}")
}

fn cost_cell(cost: Option<f64>) -> (String, bool) {
    match cost {
        Some(c) => (format_cost(c), true),
        None => (String::new(), false),
    }
}

/// Trace rows of one run without the header. Rotation records come first
/// in execution order; the last row (structure 0) is the final
/// construction.
pub fn trace_rows(run: &VnsRun) -> Vec<String> {
    let mut rows: Vec<String> = run
        .trace
        .iter()
        .map(|r| {
            let (cost, ok) = cost_cell(r.cost);
            format!(
                "{},{},{},{},{},{}",
                run.k,
                r.structure,
                r.rotation,
                r.leading_event + 1,
                cost,
                ok
            )
        })
        .collect();
    let (cost, ok) = cost_cell(run.final_record.cost);
    rows.push(format!(
        "{},0,0,{},{},{}",
        run.k,
        run.final_record.leading_event + 1,
        cost,
        ok
    ));
    rows
}

/// CSV trace of several runs, header first.
pub fn trace_csv<'a>(runs: impl IntoIterator<Item = &'a VnsRun>) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for run in runs {
        for row in trace_rows(run) {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

fn short_cost(cost: Option<f64>) -> String {
    cost.map_or_else(|| "FAILED".to_string(), |c| format!("{c:.2}"))
}

/// Per-rotation table: for each structure a column of leading events and
/// a column of costs.
pub fn rotation_table(run: &VnsRun) -> String {
    let mut out = String::new();
    let size = run.structure_sizes.first().copied().unwrap_or(0);
    writeln!(out, "k = {}, NSk = {}", run.k, size).unwrap();
    let mut header = String::new();
    for i in 1..=run.k {
        write!(header, "{:>6} {:>8}", format!("NS{i}"), "Cost").unwrap();
        header.push_str("  ");
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    let rows = run.structure_sizes.iter().copied().max().unwrap_or(0);
    let stages: Vec<Vec<_>> = (1..=run.k).map(|i| run.stage(i).collect()).collect();
    for r in 0..rows {
        let mut line = String::new();
        for stage in &stages {
            match stage.get(r) {
                Some(rec) => write!(
                    line,
                    "{:>6} {:>8}",
                    rec.leading_event + 1,
                    short_cost(rec.cost)
                )
                .unwrap(),
                None => write!(line, "{:>6} {:>8}", "", "").unwrap(),
            }
            line.push_str("  ");
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    out
}

/// Per-structure summary for several runs: the event leading each
/// structure after realignment ("#") over the structure's best cost
/// ("C"), ten structures per line.
pub fn stage_table<'a>(runs: impl IntoIterator<Item = &'a VnsRun>) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>4} {:>4} {:>7}     # = event leading the structure, C = solution cost",
        "k", "NSk", "NSi"
    )
    .unwrap();
    for run in runs {
        let minima = run.stage_minima();
        let leaders: Vec<usize> = run
            .final_structures
            .structures()
            .iter()
            .map(|s| s[0] + 1)
            .collect();
        for (chunk, start) in (0..run.k).step_by(10).enumerate() {
            let end = (start + 10).min(run.k);
            let (k, size) = if chunk == 0 {
                (run.k.to_string(), run.structure_sizes[0].to_string())
            } else {
                (String::new(), String::new())
            };
            let mut ids = format!(
                "{k:>4} {size:>4} {:>7}  #",
                format!("{}..{}", start + 1, end)
            );
            let mut costs = format!("{:>4} {:>4} {:>7}  C", "", "", "");
            for i in start..end {
                write!(ids, " {:>7}", leaders[i]).unwrap();
                write!(costs, " {:>7}", short_cost(minima[i])).unwrap();
            }
            writeln!(out, "{ids}").unwrap();
            writeln!(out, "{costs}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::small_instance;
    use crate::model::{Event, Problem};
    use crate::vns::solve_vns;

    fn run(n: usize, k: usize) -> VnsRun {
        let mut inst = small_instance();
        inst.calendar.days = 6;
        inst.events = (0..n)
            .map(|i| Event {
                id: format!("e{i:02}"),
                lecturer: format!("l{}", 1 + i % 2),
                groups: vec![format!("g{}", 1 + i % 2)],
                fixed: None,
                unpreferred_timeslots: vec![i % 5],
            })
            .collect();
        solve_vns(&Problem::new(inst).unwrap(), k).unwrap()
    }

    #[test]
    fn csv_shape() {
        let r = run(6, 2);
        let csv = trace_csv([&r]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines.len(), 1 + 6 + 1);
        assert!(lines[1].starts_with("2,1,0,1,"));
        assert!(lines[4].starts_with("2,2,0,4,"));
        assert!(lines[7].starts_with("2,0,0,"));
        for line in &lines[1..] {
            let cost = line.split(',').nth(4).unwrap();
            assert_eq!(cost.split('.').nth(1).unwrap().len(), 6, "{line}");
            assert!(line.ends_with(",true"));
        }
    }

    #[test]
    fn failed_rows_have_empty_cost() {
        let mut r = run(4, 2);
        r.trace[1].cost = None;
        let rows = trace_rows(&r);
        assert!(rows[1].ends_with(",,false"), "{}", rows[1]);
    }

    #[test]
    fn tables_render() {
        let r = run(12, 2);
        let t = rotation_table(&r);
        assert!(t.starts_with("k = 2, NSk = 6\n"));
        assert_eq!(t.lines().count(), 2 + 6);
        let r2 = run(24, 12);
        let s = stage_table([&r, &r2]);
        // header + 2 lines for k=2 + 4 lines for k=12 (two chunks)
        assert_eq!(s.lines().count(), 1 + 2 + 4);
        assert!(s.contains("11..12"));
    }
}
