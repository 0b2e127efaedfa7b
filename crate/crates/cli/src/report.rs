//! `report.csv` rows.

use std::io::Write;

use innerpave::solver::{Method, SolverConfig, Solution};
use serde::Serialize;

/// Written in place of a time when the run hit its timeout.
pub const TIMEOUT: &str = "TIMEOUT";

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub bench: String,
    pub algo: String,
    pub eps: f64,
    pub omega: f64,
    pub contractor: String,
    pub strategy: String,
    pub schedule: String,
    pub n_inner: usize,
    pub n_outer: u64,
    pub n_undecided: usize,
    pub inner_volume: f64,
    pub t_first_s: Option<f64>,
    /// Seconds, or [`TIMEOUT`].
    pub t_total_s: String,
    pub contractor_calls: u64,
    pub globsat_calls: u64,
}

impl Row {
    pub fn new(bench: &str, method: Method, cfg: &SolverConfig, s: &Solution) -> Self {
        Row {
            bench: bench.to_string(),
            algo: method.name().to_string(),
            eps: cfg.epsilon,
            omega: cfg.omega,
            contractor: cfg.contractor.name().to_string(),
            strategy: cfg.strategy.name().to_string(),
            schedule: cfg.schedule.name().to_string(),
            n_inner: s.paving.inner.len(),
            n_outer: s.stats.outer_count,
            n_undecided: s.paving.undecided.len(),
            inner_volume: s.inner_volume(),
            t_first_s: s.stats.first_solution.map(|t| t.as_secs_f64()),
            t_total_s: if s.stats.timed_out {
                TIMEOUT.to_string()
            } else {
                s.stats.elapsed.as_secs_f64().to_string()
            },
            contractor_calls: s.stats.contractions,
            globsat_calls: s.stats.glob_sat_calls,
        }
    }

    /// The time the comparison ratio is taken on: time to first inner box
    /// for first-only runs, total time otherwise. `None` on timeout.
    pub fn ratio_time(&self, first_only: bool) -> Option<f64> {
        if self.t_total_s == TIMEOUT {
            return None;
        }
        if first_only {
            self.t_first_s
        } else {
            self.t_total_s.parse().ok()
        }
    }
}

/// A row of `compare` output: a run plus the JLA/IPABC time ratio of its
/// (bench, eps) group.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub row: Row,
    pub jla_ipabc_ratio: String,
}

pub fn write_csv<T: Serialize>(out: impl Write, rows: &[T]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const ROW_HEADER: [&str; 15] = [
    "bench",
    "algo",
    "eps",
    "omega",
    "contractor",
    "strategy",
    "schedule",
    "n_inner",
    "n_outer",
    "n_undecided",
    "inner_volume",
    "t_first_s",
    "t_total_s",
    "contractor_calls",
    "globsat_calls",
];

/// csv cannot serialize flattened structs, so the header is written by hand
/// and each record as a (row, ratio) tuple.
pub fn write_compare_csv(out: impl Write, rows: &[CompareRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(ROW_HEADER.iter().chain(&["jla_ipabc_ratio"]))?;
    for r in rows {
        w.serialize((&r.row, &r.jla_ipabc_ratio))?;
    }
    w.flush()?;
    Ok(())
}

/// Fills the ratio column: for every (bench, eps) group that has both a JLA
/// and an IPABC run, `t(jla) / t(ipabc)`, or [`TIMEOUT`] when JLA timed out.
pub fn with_ratios(rows: Vec<Row>, first_only: bool) -> Vec<CompareRow> {
    let find = |bench: &str, eps: f64, algo: Method| {
        rows.iter()
            .find(|r| r.bench == bench && r.eps == eps && r.algo == algo.name())
    };
    rows.iter()
        .map(|r| {
            let jla = find(&r.bench, r.eps, Method::Jla);
            let ipa = find(&r.bench, r.eps, Method::Ipa);
            let ratio = match (jla, ipa) {
                (Some(j), Some(i)) => match (j.ratio_time(first_only), i.ratio_time(first_only)) {
                    (Some(tj), Some(ti)) if ti > 0.0 => format!("{}", tj / ti),
                    (None, _) if j.t_total_s == TIMEOUT => TIMEOUT.to_string(),
                    _ => String::new(),
                },
                _ => String::new(),
            };
            CompareRow {
                row: r.clone(),
                jla_ipabc_ratio: ratio,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(algo: Method, eps: f64, total: &str, first: Option<f64>) -> Row {
        Row {
            bench: "parabola".into(),
            algo: algo.name().into(),
            eps,
            omega: 0.1,
            contractor: "bc3".into(),
            strategy: "normal".into(),
            schedule: "dfs".into(),
            n_inner: 1,
            n_outer: 0,
            n_undecided: 0,
            inner_volume: 0.5,
            t_first_s: first,
            t_total_s: total.into(),
            contractor_calls: 0,
            globsat_calls: 0,
        }
    }

    #[test]
    fn ratio_per_group() {
        let rows = vec![
            row(Method::Jla, 1e-2, "2", Some(1.0)),
            row(Method::Ipa, 1e-2, "0.5", Some(0.25)),
            row(Method::Jla, 1e-3, TIMEOUT, None),
            row(Method::Ipa, 1e-3, "0.5", Some(0.25)),
        ];
        let all = with_ratios(rows.clone(), false);
        assert_eq!(all[0].jla_ipabc_ratio, "4");
        assert_eq!(all[1].jla_ipabc_ratio, "4");
        assert_eq!(all[2].jla_ipabc_ratio, TIMEOUT);
        let first = with_ratios(rows, true);
        assert_eq!(first[0].jla_ipabc_ratio, "4");
    }

    #[test]
    fn single_run_has_blank_ratio() {
        let r = with_ratios(vec![row(Method::Ipa, 1e-2, "1", None)], false);
        assert_eq!(r[0].jla_ipabc_ratio, "");
    }

    #[test]
    fn csv_header_and_empty_first_time() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row(Method::Ipa, 0.01, "1.5", None)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "bench,algo,eps,omega,contractor,strategy,schedule,n_inner,n_outer,n_undecided,\
             inner_volume,t_first_s,t_total_s,contractor_calls,globsat_calls"
        );
        assert_eq!(lines.next().unwrap(), "parabola,ipabc,0.01,0.1,bc3,normal,dfs,1,0,0,0.5,,1.5,0,0");
        assert_eq!(text.lines().next().unwrap(), ROW_HEADER.join(","));
    }

    #[test]
    fn compare_csv_appends_ratio() {
        let rows = with_ratios(
            vec![row(Method::Jla, 1e-2, "2", None), row(Method::Ipa, 1e-2, "1", None)],
            false,
        );
        let mut buf = Vec::new();
        write_compare_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].ends_with("globsat_calls,jla_ipabc_ratio"));
        assert!(lines[1].starts_with("parabola,jla,") && lines[1].ends_with(",2"));
    }
}
