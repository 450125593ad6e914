//! Grid evaluation for `qie sweep`.

use qie_core::closedform::work_statistics_closed_form;
use qie_core::metrics::entropy_production;
use qie_core::{
    probability_ratio, work_statistics_direct, CouplingMode, EngineSpec, Magnetization, WorkStatistics,
};
use rayon::prelude::*;

use crate::config::{Output, PathChoice, SweepConfig};
use crate::table::{Cell, Table};

pub struct SweepOutput {
    pub table: Table,
    /// Rows whose status is not `ok`.
    pub failures: usize,
}

fn path_label(p: PathChoice) -> &'static str {
    match p {
        PathChoice::DirectSum => "direct_sum",
        PathChoice::ClosedForm => "closed_form",
        PathChoice::Both => "both",
    }
}

/// Relative difference against the reference `b`; absolute when `b` is 0.
pub fn relative_discrepancy(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

pub fn columns(cfg: &SweepConfig) -> Vec<String> {
    let mut cols: Vec<String> = ["n", "beta", "omega", "mode", "path", "status"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for out in &cfg.outputs {
        if cfg.computation_path == PathChoice::Both && out.has_closed_form() {
            cols.push(format!("{out}_direct_sum"));
            cols.push(format!("{out}_closed_form"));
        } else {
            cols.push(out.to_string());
        }
    }
    if cfg.computation_path == PathChoice::Both {
        cols.push("discrepancy".into());
    }
    cols
}

/// Statistics of both modes at one grid point along one path, computed on
/// first use.
struct Lazy<'a> {
    spec: &'a EngineSpec,
    closed: bool,
    cache: [Option<Result<WorkStatistics, String>>; 2],
}

impl<'a> Lazy<'a> {
    fn new(spec: &'a EngineSpec, closed: bool) -> Self {
        Lazy { spec, closed, cache: [None, None] }
    }

    fn get(&mut self, mode: CouplingMode) -> Result<WorkStatistics, String> {
        let i = mode as usize;
        let (spec, closed) = (self.spec, self.closed);
        self.cache[i]
            .get_or_insert_with(|| {
                let r = if closed {
                    work_statistics_closed_form(spec, mode)
                } else {
                    work_statistics_direct(spec, mode)
                };
                r.map_err(|e| e.to_string())
            })
            .clone()
    }
}

fn row_values(
    cfg: &SweepConfig,
    spec: &EngineSpec,
    mode: CouplingMode,
    direct: &mut Lazy,
    closed: &mut Lazy,
) -> Result<Vec<Cell>, String> {
    let primary_closed = cfg.computation_path == PathChoice::ClosedForm;
    let both = cfg.computation_path == PathChoice::Both;
    let mut cells = Vec::new();

    let scalar = |out: Output, lazy: &mut Lazy| -> Result<Cell, String> {
        let s = lazy.get(mode)?;
        Ok(match out {
            Output::MeanWork => Cell::Float(s.mean),
            Output::Variance => Cell::Float(s.variance),
            Output::Nsr => s.nsr.into(),
            Output::LambdaW => {
                let col = lazy.get(CouplingMode::Collective)?;
                let ind = lazy.get(CouplingMode::Independent)?;
                ((ind.mean > 0.0).then(|| col.mean / ind.mean)).into()
            }
            Output::Sigma => Cell::Float(
                entropy_production(&s, spec.beta, cfg.erasure_entropy).map_err(|e| e.to_string())?,
            ),
            Output::TurQ => {
                let sigma = entropy_production(&s, spec.beta, cfg.erasure_entropy).map_err(|e| e.to_string())?;
                s.nsr.map(|nsr| nsr * sigma).into()
            }
            Output::RatioRm => Cell::Float(
                probability_ratio(spec, Magnetization::from_twice(i64::from(spec.n))).map_err(|e| e.to_string())?,
            ),
        })
    };

    for &out in &cfg.outputs {
        if both && out.has_closed_form() {
            cells.push(scalar(out, direct)?);
            cells.push(scalar(out, closed)?);
        } else if primary_closed && out != Output::RatioRm {
            cells.push(scalar(out, closed)?);
        } else {
            cells.push(scalar(out, direct)?);
        }
    }
    if both {
        let d = direct.get(mode)?;
        let c = closed.get(mode)?;
        let worst = relative_discrepancy(c.mean, d.mean).max(relative_discrepancy(c.variance, d.variance));
        cells.push(Cell::Float(worst));
    }
    Ok(cells)
}

fn point_rows(cfg: &SweepConfig, n: u32, beta: f64, width: usize) -> Vec<Vec<Cell>> {
    let head = |mode: CouplingMode, status: String| -> Vec<Cell> {
        vec![
            Cell::from(n),
            Cell::Float(beta),
            Cell::Float(cfg.omega),
            Cell::from(mode.as_str()),
            Cell::from(path_label(cfg.computation_path)),
            Cell::Text(status),
        ]
    };
    let spec = match EngineSpec::new(n, cfg.omega, beta) {
        Ok(s) => s,
        Err(e) => {
            return cfg
                .modes
                .iter()
                .map(|&m| pad(head(m, format!("error: {e}")), width))
                .collect()
        }
    };
    let mut direct = Lazy::new(&spec, false);
    let mut closed = Lazy::new(&spec, true);
    cfg.modes
        .iter()
        .map(|&mode| match row_values(cfg, &spec, mode, &mut direct, &mut closed) {
            Ok(values) => {
                let mut row = head(mode, "ok".into());
                row.extend(values);
                row
            }
            Err(e) => pad(head(mode, format!("error: {e}")), width),
        })
        .collect()
}

fn pad(mut row: Vec<Cell>, width: usize) -> Vec<Cell> {
    row.resize(width, Cell::Empty);
    row
}

/// Evaluates the grid concurrently; rows come back n-major, then beta
/// ascending, then mode.
pub fn run_sweep(cfg: &SweepConfig) -> SweepOutput {
    let cols = columns(cfg);
    let width = cols.len();
    let points: Vec<(u32, f64)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.beta_values.iter().map(move |&b| (n, b)))
        .collect();
    let blocks: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .map(|&(n, beta)| point_rows(cfg, n, beta, width))
        .collect();
    let mut table = Table::new(cols);
    let status = table.column_index("status").expect("status column");
    let mut failures = 0;
    for row in blocks.into_iter().flatten() {
        if row[status] != Cell::from("ok") {
            failures += 1;
        }
        table.push(row);
    }
    SweepOutput { table, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> SweepConfig {
        SweepConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn single_qubit_hot_point() {
        let out = run_sweep(&config("modes = [\"collective\"]\n[grid]\nn = [1]\nbeta = [0.0]\n"));
        let t = &out.table;
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.column("mean_work").unwrap(), vec![0.5]);
        assert_eq!(out.failures, 0);
    }

    #[test]
    fn row_order_is_n_then_beta_then_mode() {
        let out = run_sweep(&config("[grid]\nn = [4, 2]\nbeta = [1.0, 0.0]\n"));
        let t = &out.table;
        let keys: Vec<(f64, f64, String)> = t
            .rows
            .iter()
            .map(|r| (r[0].as_f64().unwrap(), r[1].as_f64().unwrap(), r[3].to_string()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 8);
    }

    #[test]
    fn both_paths_agree_for_small_systems() {
        let out = run_sweep(&config(
            "computation_path = \"both\"\n[grid]\nn = { start = 1, end = 20 }\nbeta = [0.0, 0.1, 1.0, 5.0]\n",
        ));
        assert_eq!(out.failures, 0);
        let d = out.table.column("discrepancy").unwrap();
        let worst = d.iter().cloned().fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
        assert!(out.table.column_index("mean_work_closed_form").is_some());
    }

    #[test]
    fn failing_point_keeps_the_run_going() {
        let out = run_sweep(&config(
            "computation_path = \"closed_form\"\n[grid]\nn = [2]\nbeta = [1.0, inf]\n",
        ));
        assert_eq!(out.table.rows.len(), 4);
        assert_eq!(out.failures, 2);
        let status = out.table.column_index("status").unwrap();
        assert!(out.table.rows[2][status].to_string().starts_with("error"));
        assert_eq!(out.table.rows[0][status].to_string(), "ok");
    }
}
