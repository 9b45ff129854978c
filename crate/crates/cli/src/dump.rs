//! Tabular disc dumps: comma-separated node data with a `#`-prefixed
//! parameter block and a one-line column header.
//!
//! One row per grid node carries the node indices, polar coordinates, the
//! disc components and their stored Wirtinger derivatives, all in full
//! double precision (shortest round-trip formatting). A dump can be reloaded
//! and its Cauchy-Riemann, attachment and containment residuals recomputed
//! from the stored data alone.

use jdisc::bishop::{cr_residual_with_derivatives, Disc, DiscFamilyParams};
use jdisc::disc_ops::DiscFunction;
use jdisc::geometry::ComplexMatrixField;
use jdisc::grid::DiscGrid;
use jdisc::poly::C64;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("dump parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dump is missing header field {0}")]
    MissingField(&'static str),
    #[error("dump has {got} data rows, expected {expected}")]
    RowCount { got: usize, expected: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Serialize a disc to the dump format.
pub fn write_disc_dump(disc: &Disc) -> String {
    let grid = disc.z[0].grid();
    let n = disc.params.dim_n();
    let mut out = String::new();
    out.push_str("# jdisc-disc-dump v1\n");
    let _ = writeln!(out, "# n = {}", n);
    let _ = writeln!(out, "# n_r = {}", grid.n_r());
    let _ = writeln!(out, "# n_theta = {}", grid.n_theta());
    let _ = writeln!(out, "# lambda = {}", disc.params.lambda);
    let _ = writeln!(out, "# c = {}", join_f64(&disc.params.c));
    let _ = writeln!(out, "# t = {}", join_f64(&disc.params.t));
    let _ = writeln!(out, "# fixed_point = {}", disc.residuals.fixed_point);
    let _ = writeln!(out, "# cauchy_riemann = {}", disc.residuals.cauchy_riemann);
    let _ = writeln!(out, "# attachment = {}", disc.residuals.attachment);
    let _ = writeln!(out, "# containment = {}", disc.residuals.containment);
    let _ = writeln!(
        out,
        "# holomorphy_defect = {}",
        disc.residuals.holomorphy_defect
    );
    let _ = writeln!(out, "# iterations = {}", disc.iterations);
    out.push_str("ring,k,r,theta");
    for j in 1..=n {
        let _ = write!(
            out,
            ",re_z{j},im_z{j},re_dz{j},im_dz{j},re_dzb{j},im_dzb{j}"
        );
    }
    out.push('\n');
    for ring in 0..grid.n_rings() {
        for k in 0..grid.n_theta() {
            let _ = write!(out, "{ring},{k},{},{}", grid.radius(ring), grid.theta(k));
            for j in 0..n {
                let z = disc.z[j].value(ring, k);
                let dz = disc.dz[j].value(ring, k);
                let dzb = disc.dzb[j].value(ring, k);
                let _ = write!(
                    out,
                    ",{},{},{},{},{},{}",
                    z.re, z.im, dz.re, dz.im, dzb.re, dzb.im
                );
            }
            out.push('\n');
        }
    }
    out
}

fn join_f64(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// A reloaded dump: parameters, stored residual block, and fields.
pub struct LoadedDump {
    pub params: DiscFamilyParams,
    pub n_r: usize,
    pub n_theta: usize,
    pub stored: StoredResiduals,
    pub z: Vec<DiscFunction>,
    pub dz: Vec<DiscFunction>,
    pub dzb: Vec<DiscFunction>,
}

#[derive(Clone, Copy, Debug)]
pub struct StoredResiduals {
    pub fixed_point: f64,
    pub cauchy_riemann: f64,
    pub attachment: f64,
    pub containment: f64,
}

impl LoadedDump {
    /// Recompute the residuals that are functions of the stored fields.
    pub fn recompute_residuals(&self, structure: &ComplexMatrixField) -> StoredResiduals {
        let grid = self.z[0].grid().clone();
        let cr = cr_residual_with_derivatives(
            structure,
            &self.z,
            &self.dz,
            &self.dzb,
            self.params.lambda,
        );
        let mut attachment: f64 = 0.0;
        for comp in &self.z {
            let trace = comp.boundary_trace();
            for k in grid.boundary().upper_arc_indices() {
                attachment = attachment.max(trace[k].re.abs());
            }
        }
        let mut containment = f64::NEG_INFINITY;
        for comp in &self.z {
            for v in comp.values() {
                containment = containment.max(v.re);
            }
        }
        StoredResiduals {
            fixed_point: self.stored.fixed_point,
            cauchy_riemann: cr,
            attachment,
            containment,
        }
    }
}

/// Parse a dump produced by [`write_disc_dump`].
pub fn parse_disc_dump(text: &str) -> Result<LoadedDump, DumpError> {
    let mut n = None;
    let mut n_r = None;
    let mut n_theta = None;
    let mut lambda = None;
    let mut c_vals: Option<Vec<f64>> = None;
    let mut t_vals: Option<Vec<f64>> = None;
    let mut stored = StoredResiduals {
        fixed_point: f64::NAN,
        cauchy_riemann: f64::NAN,
        attachment: f64::NAN,
        containment: f64::NAN,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen_header = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once('=') {
                let key = key.trim();
                let value = value.trim();
                let parse_f64 = |v: &str| {
                    v.parse::<f64>().map_err(|_| DumpError::Parse {
                        line: lineno + 1,
                        message: format!("bad number {v:?}"),
                    })
                };
                match key {
                    "n" => n = Some(parse_usize(value, lineno)?),
                    "n_r" => n_r = Some(parse_usize(value, lineno)?),
                    "n_theta" => n_theta = Some(parse_usize(value, lineno)?),
                    "lambda" => lambda = Some(parse_f64(value)?),
                    "c" => c_vals = Some(parse_f64_list(value, lineno)?),
                    "t" => t_vals = Some(parse_f64_list(value, lineno)?),
                    "fixed_point" => stored.fixed_point = parse_f64(value)?,
                    "cauchy_riemann" => stored.cauchy_riemann = parse_f64(value)?,
                    "attachment" => stored.attachment = parse_f64(value)?,
                    "containment" => stored.containment = parse_f64(value)?,
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if !line.starts_with("ring,") {
                return Err(DumpError::Parse {
                    line: lineno + 1,
                    message: "expected column header".into(),
                });
            }
            seen_header = true;
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split(',') {
            row.push(tok.parse::<f64>().map_err(|_| DumpError::Parse {
                line: lineno + 1,
                message: format!("bad number {tok:?}"),
            })?);
        }
        rows.push(row);
    }
    let n = n.ok_or(DumpError::MissingField("n"))?;
    let n_r = n_r.ok_or(DumpError::MissingField("n_r"))?;
    let n_theta = n_theta.ok_or(DumpError::MissingField("n_theta"))?;
    let lambda = lambda.ok_or(DumpError::MissingField("lambda"))?;
    let c_vals = c_vals.ok_or(DumpError::MissingField("c"))?;
    let t_vals = t_vals.ok_or(DumpError::MissingField("t"))?;
    if n == 0 || n > 8 {
        return Err(DumpError::Parse {
            line: 0,
            message: format!("dimension {n} out of range 1..=8"),
        });
    }
    if c_vals.len() != n || t_vals.len() != n {
        return Err(DumpError::Parse {
            line: 0,
            message: "parameter vectors disagree with dimension".into(),
        });
    }
    let invalid = |x: f64| x.is_nan() || x < 0.0;
    if t_vals.iter().copied().any(invalid) || invalid(lambda) {
        return Err(DumpError::Parse {
            line: 0,
            message: "parameters out of range".into(),
        });
    }
    if !(4..=1024).contains(&n_r) || !(16..=4096).contains(&n_theta) || !n_theta.is_power_of_two()
    {
        return Err(DumpError::Parse {
            line: 0,
            message: format!("grid shape ({n_r}, {n_theta}) out of range"),
        });
    }
    let expected_rows = (n_r + 1) * n_theta;
    if rows.len() != expected_rows {
        return Err(DumpError::RowCount {
            got: rows.len(),
            expected: expected_rows,
        });
    }
    let width = 4 + 6 * n;
    let grid = DiscGrid::new(n_r, n_theta);
    let mut z = vec![vec![C64::new(0.0, 0.0); grid.n_nodes()]; n];
    let mut dz = z.clone();
    let mut dzb = z.clone();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(DumpError::Parse {
                line: 0,
                message: format!("row {i} has {} columns, expected {width}", row.len()),
            });
        }
        let ring = row[0] as usize;
        let k = row[1] as usize;
        if ring > n_r || k >= n_theta {
            return Err(DumpError::Parse {
                line: 0,
                message: format!("node index ({ring}, {k}) out of range"),
            });
        }
        let idx = grid.node_index(ring, k);
        for j in 0..n {
            let base = 4 + 6 * j;
            z[j][idx] = C64::new(row[base], row[base + 1]);
            dz[j][idx] = C64::new(row[base + 2], row[base + 3]);
            dzb[j][idx] = C64::new(row[base + 4], row[base + 5]);
        }
    }
    let pack = |data: Vec<Vec<C64>>, grid: &Arc<DiscGrid>| -> Result<Vec<DiscFunction>, DumpError> {
        data.into_iter()
            .map(|vals| {
                DiscFunction::from_values(grid.clone(), vals).map_err(|e| DumpError::Parse {
                    line: 0,
                    message: e.to_string(),
                })
            })
            .collect()
    };
    Ok(LoadedDump {
        params: DiscFamilyParams::new(c_vals, t_vals, lambda),
        n_r,
        n_theta,
        stored,
        z: pack(z, &grid)?,
        dz: pack(dz, &grid)?,
        dzb: pack(dzb, &grid)?,
    })
}

fn parse_usize(v: &str, lineno: usize) -> Result<usize, DumpError> {
    v.parse::<usize>().map_err(|_| DumpError::Parse {
        line: lineno + 1,
        message: format!("bad integer {v:?}"),
    })
}

fn parse_f64_list(v: &str, lineno: usize) -> Result<Vec<f64>, DumpError> {
    v.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| DumpError::Parse {
                line: lineno + 1,
                message: format!("bad number {tok:?}"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use jdisc::bishop::{BishopSolver, SolveOptions};
    use jdisc::poly::{CPoly, PolyMatrix};

    fn stock_disc() -> (Disc, ComplexMatrixField) {
        let a = ComplexMatrixField::new(
            1,
            PolyMatrix::from_entries(1, 1, vec![CPoly::var_zb(1, 0)]),
            4.0,
            true,
        )
        .unwrap();
        let solver = BishopSolver::new(DiscGrid::new(8, 32), a.clone());
        let disc = solver
            .solve(
                &DiscFamilyParams::new(vec![0.1], vec![0.5], 0.05),
                &SolveOptions::default(),
            )
            .unwrap();
        (disc, a)
    }

    #[test]
    fn dump_round_trip_reproduces_residuals() {
        let (disc, structure) = stock_disc();
        let text = write_disc_dump(&disc);
        let loaded = parse_disc_dump(&text).unwrap();
        assert_eq!(loaded.params, disc.params);
        let recomputed = loaded.recompute_residuals(&structure);
        assert!((recomputed.cauchy_riemann - disc.residuals.cauchy_riemann).abs() < 1e-12);
        assert!((recomputed.attachment - disc.residuals.attachment).abs() < 1e-12);
        assert!((recomputed.containment - disc.residuals.containment).abs() < 1e-12);
        assert_eq!(loaded.stored.fixed_point, disc.residuals.fixed_point);
    }

    #[test]
    fn parser_rejects_malformed_dumps() {
        assert!(parse_disc_dump("").is_err());
        assert!(parse_disc_dump("# n = 1\nring,k\n1,2\n").is_err());
        let (disc, _) = stock_disc();
        let text = write_disc_dump(&disc);
        // truncate some rows
        let truncated: String = text.lines().take(20).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            parse_disc_dump(&truncated),
            Err(DumpError::RowCount { .. }) | Err(DumpError::Parse { .. })
        ));
    }
}
