//! The 2n-parameter disc family: sweeps, the evaluation map `(c, t) ↦ z(0)`,
//! its Newton inversion, and covering certification for a truncated wedge.
//!
//! At `λ = 0` the evaluation map is exactly linear, `Ev₀(c, t) = t·P₀φ + ic`,
//! and stays a small perturbation of it for small `λ`; Newton iteration with
//! a finite-difference Jacobian, initialized at the exact linear inverse,
//! certifies that sampled wedge points are centers of family discs.

use crate::bishop::{BishopError, BishopSolver, Disc, DiscFamilyParams, SolveOptions};
use crate::linalg::realify_vector;
use crate::poly::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("target point is outside the truncated wedge (Re p_{index} = {value:.3e})")]
    OutsideWedge { index: usize, value: f64 },
    #[error("Newton iteration stalled (residual {residual:.3e} after {steps} steps)")]
    NewtonStalled { residual: f64, steps: usize },
    #[error(transparent)]
    Solver(#[from] BishopError),
}

/// Parameter grid: each `c_j` sweeps `c_range` with `c_count` points, each
/// `t_j` sweeps `t_range` (positive) with `t_count` points, full product.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub c_range: (f64, f64),
    pub t_range: (f64, f64),
    pub c_count: usize,
    pub t_count: usize,
}

impl SweepGrid {
    fn axis(&self, range: (f64, f64), count: usize, i: usize) -> f64 {
        if count <= 1 {
            0.5 * (range.0 + range.1)
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64
        }
    }

    /// All parameter points in deterministic index order.
    pub fn points(&self, dim_n: usize, lambda: f64) -> Vec<DiscFamilyParams> {
        assert!(self.t_range.0 > 0.0, "t must stay positive in a sweep");
        let per_dim_c = self.c_count;
        let per_dim_t = self.t_count;
        let total = per_dim_c.pow(dim_n as u32) * per_dim_t.pow(dim_n as u32);
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut c = vec![0.0; dim_n];
            let mut t = vec![0.0; dim_n];
            for cj in c.iter_mut() {
                *cj = self.axis(self.c_range, per_dim_c, rem % per_dim_c);
                rem /= per_dim_c;
            }
            for tj in t.iter_mut() {
                *tj = self.axis(self.t_range, per_dim_t, rem % per_dim_t);
                rem /= per_dim_t;
            }
            out.push(DiscFamilyParams::new(c, t, lambda));
        }
        out
    }
}

/// Converged discs of a parameter sweep, with per-point failure causes.
#[derive(Debug)]
pub struct FamilySweep {
    pub lambda: f64,
    pub discs: Vec<Disc>,
    pub failures: Vec<(DiscFamilyParams, String)>,
}

/// Tolerances a disc must meet to enter a sweep.
#[derive(Clone, Copy, Debug)]
pub struct AdmissionTolerances {
    pub attachment: f64,
    pub containment: f64,
}

impl Default for AdmissionTolerances {
    fn default() -> Self {
        AdmissionTolerances {
            attachment: 1e-8,
            containment: 1e-10,
        }
    }
}

/// Solve every parameter point of the grid; discs failing the attachment or
/// containment checks are recorded as failures, never stored.
pub fn sweep_family(
    solver: &BishopSolver,
    grid: &SweepGrid,
    lambda: f64,
    opts: &SolveOptions,
    admission: &AdmissionTolerances,
) -> FamilySweep {
    let n = solver.structure().dim_n();
    let mut discs = Vec::new();
    let mut failures = Vec::new();
    for params in grid.points(n, lambda) {
        match solver.solve(&params, opts) {
            Ok(disc) => {
                if disc.residuals.attachment > admission.attachment {
                    failures.push((params, format!(
                        "attachment residual {:.3e} above {:.3e}",
                        disc.residuals.attachment, admission.attachment
                    )));
                } else if disc.residuals.containment > admission.containment {
                    failures.push((params, format!(
                        "containment residual {:.3e} above {:.3e}",
                        disc.residuals.containment, admission.containment
                    )));
                } else {
                    discs.push(disc);
                }
            }
            Err(e) => failures.push((params, e.to_string())),
        }
    }
    FamilySweep {
        lambda,
        discs,
        failures,
    }
}

/// Disc center for given parameters: `Ev_λ(c, t) = z(c, t)(0)`.
pub fn evaluation_map(
    solver: &BishopSolver,
    params: &DiscFamilyParams,
    opts: &SolveOptions,
) -> Result<Vec<C64>, BishopError> {
    Ok(solver.solve(params, opts)?.center())
}

/// Options for [`invert_evaluation`].
#[derive(Clone, Copy, Debug)]
pub struct InvertOptions {
    /// Target residual on `‖Ev(c,t) − p‖`.
    pub tol: f64,
    pub max_steps: usize,
    /// Relative finite-difference step of the Jacobian.
    pub fd_step_rel: f64,
    /// Targets must satisfy `Re p_j ≤ −margin`.
    pub wedge_margin: f64,
    pub solve: SolveOptions,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            tol: 1e-9,
            max_steps: 12,
            fd_step_rel: 1e-5,
            wedge_margin: 0.0,
            solve: SolveOptions::default(),
        }
    }
}

/// A successful inversion: parameters whose disc passes through the target.
#[derive(Clone, Debug)]
pub struct InversionResult {
    pub params: DiscFamilyParams,
    pub residual: f64,
    pub newton_steps: usize,
}

/// Newton inversion of the evaluation map at a wedge point, initialized at
/// the exact inverse of the linear model `Ev₀(c, t) = t P₀φ + i c`.
pub fn invert_evaluation(
    solver: &BishopSolver,
    target: &[C64],
    lambda: f64,
    opts: &InvertOptions,
) -> Result<InversionResult, FamilyError> {
    let n = solver.structure().dim_n();
    assert_eq!(target.len(), n);
    for (j, p) in target.iter().enumerate() {
        if p.re > -opts.wedge_margin {
            return Err(FamilyError::OutsideWedge {
                index: j,
                value: p.re,
            });
        }
    }
    let p0 = solver.cutoff().p0();
    // linear inverse: c = Im p, t = Re p / P₀φ (both numerator and P₀φ ≤ 0)
    let mut x = DVector::<f64>::zeros(2 * n);
    for j in 0..n {
        x[j] = target[j].im;
        x[n + j] = target[j].re / p0;
    }
    let params_of = |x: &DVector<f64>| {
        DiscFamilyParams::new(
            x.as_slice()[..n].to_vec(),
            x.as_slice()[n..].iter().map(|t| t.max(0.0)).collect(),
            lambda,
        )
    };
    let residual_of = |x: &DVector<f64>| -> Result<(DVector<f64>, f64), FamilyError> {
        let center = evaluation_map(solver, &params_of(x), &opts.solve)?;
        let diff: Vec<f64> = realify_vector(&center)
            .iter()
            .zip(realify_vector(target).iter())
            .map(|(a, b)| a - b)
            .collect();
        let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok((DVector::from_vec(diff), norm))
    };

    let (mut r, mut r_norm) = residual_of(&x)?;
    let mut steps = 0usize;
    while r_norm > opts.tol {
        if steps >= opts.max_steps {
            return Err(FamilyError::NewtonStalled {
                residual: r_norm,
                steps,
            });
        }
        steps += 1;
        // forward-difference Jacobian
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for col in 0..2 * n {
            let h = opts.fd_step_rel * x[col].abs().max(1e-2);
            let mut xp = x.clone();
            xp[col] += h;
            let (rp, _) = residual_of(&xp)?;
            for row in 0..2 * n {
                jac[(row, col)] = (rp[row] - r[row]) / h;
            }
        }
        let step = jac
            .lu()
            .solve(&r)
            .ok_or(FamilyError::NewtonStalled {
                residual: r_norm,
                steps,
            })?;
        // keep t positive: backtrack if a full step would cross zero
        let mut scale = 1.0;
        for _ in 0..8 {
            let ok = (0..n).all(|j| x[n + j] - scale * step[n + j] > 0.0 || x[n + j] == 0.0);
            if ok {
                break;
            }
            scale *= 0.5;
        }
        let x_new = &x - step * scale;
        let (r_new, r_new_norm) = residual_of(&x_new)?;
        if !r_new_norm.is_finite() || r_new_norm >= r_norm && r_norm < 1e3 * opts.tol {
            return Err(FamilyError::NewtonStalled {
                residual: r_norm,
                steps,
            });
        }
        x = x_new;
        r = r_new;
        r_norm = r_new_norm;
    }
    Ok(InversionResult {
        params: params_of(&x),
        residual: r_norm,
        newton_steps: steps,
    })
}

/// One certified target of a covering run.
#[derive(Clone, Debug)]
pub struct CoveringHit {
    pub target: Vec<C64>,
    pub params: DiscFamilyParams,
    pub residual: f64,
    pub newton_steps: usize,
}

/// Result of sampling the truncated wedge and inverting the evaluation map
/// at every sample. Misses are data, not errors.
#[derive(Clone, Debug)]
pub struct CoveringReport {
    pub delta: f64,
    pub lambda: f64,
    pub scale: f64,
    pub seed: u64,
    pub hits: Vec<CoveringHit>,
    pub misses: Vec<(Vec<C64>, String)>,
}

impl CoveringReport {
    pub fn miss_count(&self) -> usize {
        self.misses.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.hits.iter().map(|h| h.residual).fold(0.0, f64::max)
    }

    pub fn max_newton_steps(&self) -> usize {
        self.hits.iter().map(|h| h.newton_steps).max().unwrap_or(0)
    }
}

/// Draw a point of the truncated wedge
/// `{x_j − δ Σ_{k≠j} x_k < 0, x_j < 0}` at the given scale, in flattened
/// coordinates, by rejection sampling.
pub fn sample_truncated_wedge(
    rng: &mut ChaCha8Rng,
    dim_n: usize,
    delta: f64,
    scale: f64,
) -> Vec<C64> {
    loop {
        let xs: Vec<f64> = (0..dim_n)
            .map(|_| -scale * rng.random_range(0.02..1.0))
            .collect();
        let ok = (0..dim_n).all(|j| {
            let others: f64 = (0..dim_n).filter(|&k| k != j).map(|k| xs[k]).sum();
            xs[j] - delta * others < -1e-4 * scale
        });
        if !ok {
            continue;
        }
        return xs
            .iter()
            .map(|&x| C64::new(x, scale * rng.random_range(-0.5..0.5)))
            .collect();
    }
}

/// Sample `sample_count` targets of the truncated wedge (seeded, hence
/// reproducible) and invert the evaluation map at each.
pub fn covering_check(
    solver: &BishopSolver,
    delta: f64,
    sample_count: usize,
    lambda: f64,
    scale: f64,
    seed: u64,
    opts: &InvertOptions,
) -> CoveringReport {
    assert!(delta > 0.0, "truncation parameter must be positive");
    let n = solver.structure().dim_n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = Vec::new();
    let mut misses = Vec::new();
    for _ in 0..sample_count {
        let target = sample_truncated_wedge(&mut rng, n, delta, scale);
        match invert_evaluation(solver, &target, lambda, opts) {
            Ok(done) => {
                if done.params.t.iter().all(|&t| t > 0.0) {
                    hits.push(CoveringHit {
                        target,
                        params: done.params,
                        residual: done.residual,
                        newton_steps: done.newton_steps,
                    });
                } else {
                    misses.push((target, "inverted with non-positive t".into()));
                }
            }
            Err(e) => misses.push((target, e.to_string())),
        }
    }
    CoveringReport {
        delta,
        lambda,
        scale,
        seed,
        hits,
        misses,
    }
}
