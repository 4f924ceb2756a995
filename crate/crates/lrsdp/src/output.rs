//! JSON result documents and CSV traces.

use std::path::Path;

use lrsdp_core::nalgebra::{DMatrix, DVector};
use lrsdp_core::{IterationRecord, KktResidues, SdpProblem, Solution, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::{read_file, write_file, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub n: usize,
    pub m: usize,
    pub manifold: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residues {
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_g: f64,
    pub eta_max: f64,
}

impl From<KktResidues> for Residues {
    fn from(r: KktResidues) -> Self {
        Self { eta_p: r.eta_p, eta_d: r.eta_d, eta_g: r.eta_g, eta_max: r.eta_max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub tol: f64,
    pub p0: usize,
    pub sigma0: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub gamma: f64,
    pub tau: f64,
    pub theta: f64,
    pub delta_ne: usize,
    pub max_iters: usize,
    pub time_limit: Option<f64>,
    pub seed: u64,
}

impl From<&SolverOptions> for OptionsEcho {
    fn from(o: &SolverOptions) -> Self {
        Self {
            tol: o.tol,
            p0: o.p0,
            sigma0: o.sigma0,
            sigma_min: o.sigma_min,
            sigma_max: o.sigma_max,
            gamma: o.gamma,
            tau: o.tau,
            theta: o.theta,
            delta_ne: o.delta_ne,
            max_iters: o.max_iters,
            time_limit: o.max_time,
            seed: o.seed,
        }
    }
}

/// One trace row; field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub p: usize,
    pub sigma: f64,
    pub eps: f64,
    pub eta_p: f64,
    pub eta_d: f64,
    pub eta_g: f64,
    pub eta_max: f64,
    pub gradnorm: f64,
    pub inner_iters: usize,
    pub time: f64,
}

impl From<&IterationRecord> for TraceRow {
    fn from(r: &IterationRecord) -> Self {
        Self {
            k: r.k,
            p: r.p,
            sigma: r.sigma,
            eps: r.eps,
            eta_p: r.eta_p,
            eta_d: r.eta_d,
            eta_g: r.eta_g,
            eta_max: r.eta_max,
            gradnorm: r.grad_norm,
            inner_iters: r.inner_iters,
            time: r.time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub problem: ProblemInfo,
    pub objective: f64,
    pub residues: Residues,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub status: String,
    pub wall_time: f64,
    pub options: OptionsEcho,
    pub trace: Vec<TraceRow>,
    /// Rows of the factor `Y`.
    pub factor: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl ResultDocument {
    pub fn new(problem: &SdpProblem, solution: &Solution, options: &SolverOptions, wall_time: f64) -> Self {
        let y = solution.factor.matrix();
        Self {
            problem: ProblemInfo {
                n: problem.dim(),
                m: problem.num_constraints(),
                manifold: problem.manifold().name().into(),
            },
            objective: solution.objective,
            residues: solution.residues.into(),
            lambda_min: solution.lambda_min,
            lambda_max: solution.lambda_max,
            status: solution.status.name().into(),
            wall_time,
            options: options.into(),
            trace: solution.trace.iter().map(TraceRow::from).collect(),
            factor: (0..y.nrows()).map(|i| y.row(i).iter().copied().collect()).collect(),
            y: solution.y.iter().copied().collect(),
            z: solution.z.iter().copied().collect(),
        }
    }

    pub fn factor_matrix(&self) -> Result<DMatrix<f64>> {
        let n = self.factor.len();
        let p = self.factor.first().map_or(0, Vec::len);
        if self.factor.iter().any(|r| r.len() != p) {
            return Err(Error::Invalid("factor rows have unequal lengths".into()));
        }
        Ok(DMatrix::from_fn(n, p, |i, j| self.factor[i][j]))
    }

    pub fn dual_y(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.y)
    }

    pub fn dual_z(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.z)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_json()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?)
    }
}

pub fn trace_csv(rows: &[TraceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["k", "p", "sigma", "eps", "eta_p", "eta_d", "eta_g", "eta_max", "gradnorm", "inner_iters", "time"])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
}

pub fn write_trace(rows: &[TraceRow], path: &Path) -> Result<()> {
    write_file(path, &trace_csv(rows)?)
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRow>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.map_err(Error::from)).collect()
}
