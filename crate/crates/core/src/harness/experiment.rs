use std::fmt::Write as _;
use std::time::Duration;

use log::{info, warn};

use crate::contour::build_rule;
use crate::dense::C64;
use crate::error::{Error, Result};
use crate::forge::{dense_oracle, gen_symmetric_dense, gen_weierstrass, GroundTruth, OracleEigen};
use crate::moments::{factorize_points_with, MatrixPencil};
use crate::solvers::{solve_with, EigenResult, Method, Timing};

use super::config::{ExperimentConfig, ProblemSource, TimingMode};
use super::problem_file::load_problem;

pub const CSV_HEADER: &str = "method,M,L,mhat,t_lu,t_solve,t_other,t_total,max_res,min_res,found,oracle_match";

/// One (method, L, M) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub l: usize,
    /// Moment degree the method actually used.
    pub m: usize,
    pub mhat: usize,
    pub timing: Timing,
    /// Residual extremes over in-region pairs matched to the oracle.
    pub max_res: Option<f64>,
    pub min_res: Option<f64>,
    /// Oracle eigenvalues (with multiplicity) matched by a computed pair.
    pub found: usize,
    pub expected: usize,
    /// In-region pairs with no oracle partner.
    pub spurious: usize,
    pub oracle_match: bool,
    pub error: Option<String>,
}

impl ReportRow {
    fn failed(method: Method, l: usize, m: usize, expected: usize, err: &Error) -> Self {
        Self {
            method,
            l,
            m,
            mhat: 0,
            timing: Timing::default(),
            max_res: None,
            min_res: None,
            found: 0,
            expected,
            spurious: 0,
            oracle_match: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    /// Distinct in-region oracle eigenvalues.
    pub oracle: Vec<OracleEigen>,
    pub dim: usize,
}

impl ExperimentReport {
    pub fn csv(&self, timing: TimingMode) -> String {
        write_csv(&self.rows, timing)
    }
}

/// Builds or loads the configured pencil.
pub fn load(cfg: &ExperimentConfig) -> Result<(MatrixPencil, Option<GroundTruth>)> {
    match cfg.problem()? {
        ProblemSource::Jordan(spec) => {
            let (p, t) = gen_weierstrass(&spec.clone().with_transform(cfg.conditioning), cfg.seed)?;
            Ok((p, Some(t)))
        }
        ProblemSource::Symmetric(spec) => {
            let (p, t) = gen_symmetric_dense(spec, cfg.seed)?;
            Ok((p, Some(t)))
        }
        ProblemSource::File(path) => load_problem(path),
    }
}

/// Result of greedily pairing computed eigenvalues with oracle ones.
#[derive(Debug, Clone, Default)]
pub struct Matching {
    /// `(computed index, oracle index, distance)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_computed: Vec<usize>,
    pub unmatched_oracle: Vec<usize>,
}

/// Pairs closest values first; each value is used at most once.
pub fn match_eigenvalues(computed: &[C64], oracle: &[C64], tol: f64) -> Matching {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, c) in computed.iter().enumerate() {
        for (j, o) in oracle.iter().enumerate() {
            let d = (c - o).norm();
            if d <= tol {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_c = vec![false; computed.len()];
    let mut used_o = vec![false; oracle.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in cand {
        if !used_c[i] && !used_o[j] {
            used_c[i] = true;
            used_o[j] = true;
            pairs.push((i, j, d));
        }
    }
    pairs.sort_by_key(|p| p.1);
    Matching {
        pairs,
        unmatched_computed: (0..computed.len()).filter(|&i| !used_c[i]).collect(),
        unmatched_oracle: (0..oracle.len()).filter(|&j| !used_o[j]).collect(),
    }
}

/// Summarizes one solver result against the flattened oracle list.
pub fn score(result: &EigenResult, l: usize, m: usize, oracle: &[C64], tol: f64) -> ReportRow {
    let inside: Vec<_> = result.inside().collect();
    let values: Vec<C64> = inside.iter().map(|p| p.value).collect();
    let mt = match_eigenvalues(&values, oracle, tol);
    let res: Vec<f64> = mt.pairs.iter().map(|&(i, _, _)| inside[i].residual).collect();
    ReportRow {
        method: result.method,
        l,
        m,
        mhat: result.rank,
        timing: result.timing,
        max_res: res.iter().copied().reduce(f64::max),
        min_res: res.iter().copied().reduce(f64::min),
        found: mt.pairs.len(),
        expected: oracle.len(),
        spurious: mt.unmatched_computed.len(),
        oracle_match: mt.pairs.len() == oracle.len(),
        error: None,
    }
}

/// Moment degree a method runs with for a requested M.
pub fn effective_m(method: Method, m: usize) -> usize {
    match method {
        Method::Feast | Method::Beyn => 1,
        _ => m,
    }
}

/// Runs every (method, L, M) cell on one pencil. Factorizations and the
/// oracle are computed once and shared, so each row's `t_lu` is that shared
/// cost.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (pencil, truth) = load(cfg)?;
    run_on(cfg, &pencil, truth.as_ref())
}

pub fn run_on(cfg: &ExperimentConfig, pencil: &MatrixPencil, truth: Option<&GroundTruth>) -> Result<ExperimentReport> {
    let oracle = dense_oracle(pencil, &cfg.region, truth)?;
    let flat = OracleEigen::flatten(&oracle);
    info!("oracle: {} eigenvalues in {}", flat.len(), cfg.region);
    let mut report = ExperimentReport {
        rows: Vec::new(),
        oracle,
        dim: pencil.dim(),
    };
    if cfg.methods.is_empty() {
        return Ok(report);
    }
    let rule = build_rule(cfg.region, cfg.rule, cfg.n)?;
    let factors = factorize_points_with(pencil, &rule, cfg.half_contour);
    for &method in &cfg.methods {
        for &(l, m) in &cfg.sweep {
            let m_used = effective_m(method, m);
            let row = match &factors {
                Err(e) => ReportRow::failed(method, l, m_used, flat.len(), e),
                Ok(f) => match solve_with(f, &cfg.solver_config(method, l, m_used)) {
                    Ok(r) => score(&r, l, m_used, &flat, cfg.match_tol),
                    Err(e) => {
                        warn!("{method} L={l} M={m_used}: {e}");
                        ReportRow::failed(method, l, m_used, flat.len(), &e)
                    }
                },
            };
            report.rows.push(row);
        }
    }
    Ok(report)
}

fn seconds(d: Duration) -> String {
    format!("{}.{:09}", d.as_secs(), d.subsec_nanos())
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:e}"))
}

pub fn write_csv(rows: &[ReportRow], timing: TimingMode) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let t = match timing {
            TimingMode::Wall => r.timing,
            TimingMode::Off => Timing::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.m,
            r.l,
            r.mhat,
            seconds(t.t_lu),
            seconds(t.t_solve),
            seconds(t.t_other),
            seconds(t.t_total),
            opt(r.max_res),
            opt(r.min_res),
            r.found,
            r.oracle_match
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_cfg() -> ExperimentConfig {
        ExperimentConfig::parse(
            "problem = jordan:(0.5,0,1);(3,0,1)\nconditioning = identity\nN = 16\nsweep = 2x1\nmethods = ss_rr\n",
        )
        .unwrap()
    }

    #[test]
    fn single_cell_matches_oracle() {
        let rep = run_experiment(&toy_cfg()).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let r = &rep.rows[0];
        assert!(r.oracle_match);
        assert_eq!(r.found, 1);
        assert!(r.max_res.unwrap() < 1e-12);
        assert_eq!(r.timing.t_other, r.timing.t_total - r.timing.t_lu - r.timing.t_solve);
    }

    #[test]
    fn empty_methods_give_empty_report() {
        let mut cfg = toy_cfg();
        cfg.methods.clear();
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.rows.is_empty());
        assert_eq!(rep.csv(TimingMode::Wall), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn solver_errors_stay_in_their_row() {
        let mut cfg = toy_cfg();
        cfg.problem = Some("jordan:(0.5,0,1);(3,0,1);(0.1,0.2,1)".parse().unwrap());
        cfg.conditioning = crate::forge::Transform::Random { cond: 10.0 };
        cfg.methods = vec![Method::Feast, Method::SsRr];
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.rows[0].error.as_deref().unwrap().contains("Hermitian"));
        assert!(!rep.rows[0].oracle_match);
        assert!(rep.rows[1].oracle_match);
        let csv = rep.csv(TimingMode::Off);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("feast,1,2,0,0.000000000,"));
    }

    #[test]
    fn matching_is_greedy_by_distance() {
        let c = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(5.0, 0.0)];
        let o = [C64::new(1.0 + 1e-9, 0.0), C64::new(1e-10, 0.0), C64::new(2.0, 0.0)];
        let m = match_eigenvalues(&c, &o, 1e-6);
        assert_eq!(m.pairs.len(), 2);
        assert_eq!(m.unmatched_computed, vec![2]);
        assert_eq!(m.unmatched_oracle, vec![2]);
    }

    #[test]
    fn seconds_are_exact() {
        assert_eq!(seconds(Duration::new(3, 5)), "3.000000005");
    }
}
