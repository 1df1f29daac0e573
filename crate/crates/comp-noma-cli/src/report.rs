//! Text serialization of solver results: a sectioned CSV layout carrying
//! the headline numbers, per-constraint residuals, the full allocation
//! arrays and the iteration trace. The reader restores the allocation so a
//! stored result can be re-validated against its scenario.

use std::path::Path;

use anyhow::{bail, Context, Result};
use comp_noma_core::num_complex::Complex64;

use comp_noma_core::result::SolverResult;
use comp_noma_core::sinr::{AllocationState, Mode};
use comp_noma_core::NetworkScenario;

/// Reader/writer of the solver-result file layout.
pub struct SolverResultFile;

impl SolverResultFile {
    /// Serialize a result. Sections: `meta`, `residual`, `rho`, `x`, `w`,
    /// `trace`; one CSV record per line, section name first.
    pub fn render(scn: &NetworkScenario, result: &SolverResult, wall_time_s: f64) -> String {
        let idx = scn.idx();
        let mut out = String::new();
        out.push_str(&format!(
            "meta,objective,{}\nmeta,binary_objective,{}\nmeta,gap,{}\nmeta,outer_iterations,{}\nmeta,inner_iterations,{}\nmeta,status,{:?}\nmeta,wall_time_s,{}\n",
            result.objective,
            result.binary_objective,
            result.gap.map(|g| g.to_string()).unwrap_or_else(|| "none".into()),
            result.outer_iterations,
            result.inner_iterations,
            result.status,
            wall_time_s,
        ));
        for (key, value) in result.report.flat_entries() {
            out.push_str(&format!("residual,{key},{value}\n"));
        }
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            if result.allocation.rho[e] != 0.0 {
                out.push_str(&format!("rho,{i},{b},{n},{k},{}\n", result.allocation.rho[e]));
            }
            if result.allocation.x[e] != 0.0 {
                out.push_str(&format!("x,{i},{b},{n},{k},{}\n", result.allocation.x[e]));
            }
            let w = result.allocation.beam(scn, i, b, n, k);
            for (m, c) in w.iter().enumerate() {
                if c.re != 0.0 || c.im != 0.0 {
                    out.push_str(&format!("w,{i},{b},{n},{k},{m},{},{}\n", c.re, c.im));
                }
            }
        }
        for t in &result.trace {
            out.push_str(&format!(
                "trace,{},{},{},{},{},{}\n",
                t.iteration, t.objective, t.bound, t.inner_beam, t.inner_assign, t.multiplier_norm
            ));
        }
        out
    }

    pub fn write(
        path: &Path,
        scn: &NetworkScenario,
        result: &SolverResult,
        wall_time_s: f64,
    ) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(path, Self::render(scn, result, wall_time_s))
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Restore the allocation arrays of a stored result.
    pub fn read_allocation(path: &Path, scn: &NetworkScenario) -> Result<AllocationState> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Self::parse_allocation(&text, scn)
    }

    pub fn parse_allocation(text: &str, scn: &NetworkScenario) -> Result<AllocationState> {
        let idx = scn.idx();
        let mut alloc = AllocationState::zeros(scn, Mode::Binary);
        let mut fractional = false;
        for (lineno, line) in text.lines().enumerate() {
            let mut parts = line.split(',');
            let section = parts.next().unwrap_or("");
            let fail = || anyhow::anyhow!("malformed line {} in result file", lineno + 1);
            match section {
                "rho" | "x" => {
                    let vals: Vec<&str> = parts.collect();
                    if vals.len() != 5 {
                        bail!(fail());
                    }
                    let (i, b, n, k) = (
                        vals[0].parse::<usize>().map_err(|_| fail())?,
                        vals[1].parse::<usize>().map_err(|_| fail())?,
                        vals[2].parse::<usize>().map_err(|_| fail())?,
                        vals[3].parse::<usize>().map_err(|_| fail())?,
                    );
                    let value = vals[4].parse::<f64>().map_err(|_| fail())?;
                    if value != 0.0 && value != 1.0 {
                        fractional = true;
                    }
                    let e = idx.of(i, b, n, k);
                    if section == "rho" {
                        alloc.rho[e] = value;
                    } else {
                        alloc.x[e] = value;
                    }
                }
                "w" => {
                    let vals: Vec<&str> = parts.collect();
                    if vals.len() != 7 {
                        bail!(fail());
                    }
                    let (i, b, n, k, m) = (
                        vals[0].parse::<usize>().map_err(|_| fail())?,
                        vals[1].parse::<usize>().map_err(|_| fail())?,
                        vals[2].parse::<usize>().map_err(|_| fail())?,
                        vals[3].parse::<usize>().map_err(|_| fail())?,
                        vals[4].parse::<usize>().map_err(|_| fail())?,
                    );
                    let re = vals[5].parse::<f64>().map_err(|_| fail())?;
                    let im = vals[6].parse::<f64>().map_err(|_| fail())?;
                    alloc.w[idx.vec_of(i, b, n, k) + m] = Complex64::new(re, im);
                }
                _ => {}
            }
        }
        if fractional {
            alloc.mode = Mode::Relaxed;
        }
        Ok(alloc)
    }
}
