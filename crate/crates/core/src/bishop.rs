//! The model holomorphic disc family and the Picard solver for the
//! Bishop-type integral equation.
//!
//! With `φ` a fixed smooth boundary cutoff vanishing on the closed upper
//! semicircle and negative below, the model family is
//! `z_j(ζ) = t_j Sφ(ζ) + i c_j` (`t_j > 0`, `c_j ∈ ℝ`). For a structure with
//! complex matrix `A` at dilation scale `λ`, discs glued to the flattened
//! edge solve the fixed-point equation
//!
//! ```text
//! z = t Sφ + i c + T[A(λz)·conj(z_ζ)] − conj(T[A(λz)·conj(z_ζ)](1/ζ̄))
//! ```
//!
//! Applying `∂̄` gives `z_ζ̄ = A(λz)·conj(z_ζ)` — the conjugate pairing of
//! the Cauchy-Riemann system — so fixed points are pseudoholomorphic discs.
//! The first and last terms are holomorphic; on the boundary circle their
//! `T`-parts cancel in real part, which glues `Re z_j = 0` along the upper
//! semicircle exactly.
//!
//! The right side has vanishing z-derivative at `λ = 0`, so plain Picard
//! iteration from the model disc contracts for small `λ`. Discs are stored
//! in split form: the holomorphic head is differentiated through its
//! coefficients and the solver correction through the grid collocation that
//! produced it, keeping the recorded Wirtinger derivatives consistent with
//! the equation to near machine precision.

use crate::disc_ops::{
    negative_mode_content, CauchyGreenPlan, DiscFunction, DiscOpsError, SchwarzCoeffs,
};
use crate::geometry::ComplexMatrixField;
use crate::grid::DiscGrid;
use crate::poly::C64;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BishopError {
    #[error("correction ratio {ratio:.3} stayed >= 1 for three consecutive steps; λ too large")]
    NoContraction { ratio: f64 },
    #[error("no convergence within {max_iter} iterations (last correction {last_correction:.3e})")]
    MaxIterExceeded {
        max_iter: usize,
        last_correction: f64,
    },
    #[error("iterate left the chart of the structure (|λz| = {norm:.3} > {radius:.3})")]
    RangeEscape { norm: f64, radius: f64 },
    #[error("λ = {lambda} exceeds the configured threshold {threshold}")]
    LambdaTooLarge { lambda: f64, threshold: f64 },
    #[error(transparent)]
    DiscOps(#[from] DiscOpsError),
}

/// Smooth real cutoff on the boundary circle: identically zero on the closed
/// upper semicircle, strictly negative on the open lower arc, flat to all
/// orders at the junctions.
pub fn cutoff_bump(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t <= PI {
        0.0
    } else {
        let s = (t - PI) * (2.0 * PI - t);
        -(-1.0 / s).exp()
    }
}

/// The cutoff sampled on a grid boundary together with its Schwarz extension.
#[derive(Clone, Debug)]
pub struct BoundaryCutoff {
    values: Vec<f64>,
    schwarz: SchwarzCoeffs,
    field: DiscFunction,
    derivative_field: DiscFunction,
    p0: f64,
}

impl BoundaryCutoff {
    pub fn standard(grid: &Arc<DiscGrid>) -> Self {
        let values: Vec<f64> = (0..grid.n_theta())
            .map(|k| cutoff_bump(grid.theta(k)))
            .collect();
        let complex_vals: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        let schwarz = SchwarzCoeffs::new(grid, &complex_vals).expect("cutoff is real");
        let field = schwarz.field_on(grid);
        let derivative_field = schwarz.derivative_field_on(grid);
        let p0 = schwarz.at_origin().re;
        BoundaryCutoff {
            values,
            schwarz,
            field,
            derivative_field,
            p0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `P₀φ` — the (negative) mean of the cutoff over the grid circle.
    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn schwarz(&self) -> &SchwarzCoeffs {
        &self.schwarz
    }

    /// `Sφ` sampled on the grid.
    pub fn schwarz_field(&self) -> &DiscFunction {
        &self.field
    }

    /// `(Sφ)'` sampled on the grid, exact from the coefficients.
    pub fn schwarz_derivative_field(&self) -> &DiscFunction {
        &self.derivative_field
    }
}

/// Real parameters of one disc: `z ≈ t Sφ + i c` at scale `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscFamilyParams {
    pub c: Vec<f64>,
    pub t: Vec<f64>,
    pub lambda: f64,
}

impl DiscFamilyParams {
    pub fn new(c: Vec<f64>, t: Vec<f64>, lambda: f64) -> Self {
        assert_eq!(c.len(), t.len());
        assert!(t.iter().all(|&tj| tj >= 0.0), "t_j must be nonnegative");
        assert!(lambda >= 0.0);
        DiscFamilyParams { c, t, lambda }
    }

    pub fn dim_n(&self) -> usize {
        self.c.len()
    }
}

/// Residual record attached to every solved disc.
#[derive(Clone, Copy, Debug, Default)]
pub struct DiscResiduals {
    /// `‖z − h(z)‖_∞` at the returned iterate.
    pub fixed_point: f64,
    /// `sup_interior ‖z_ζ̄ − A(λz)·conj(z_ζ)‖`.
    pub cauchy_riemann: f64,
    /// `max_{bD⁺} |Re z_j|`.
    pub attachment: f64,
    /// `max over all nodes of Re z_j` (≤ 0 keeps the disc inside the wedge).
    pub containment: f64,
    /// Largest negative-mode content of the holomorphic right-hand terms.
    pub holomorphy_defect: f64,
}

/// A solved disc in split form: total sampled components together with their
/// certified Wirtinger derivatives, parameters, residuals and the solver's
/// convergence record.
#[derive(Clone, Debug)]
pub struct Disc {
    pub z: Vec<DiscFunction>,
    /// `z_ζ`: exact head derivative plus the collocation derivative of the
    /// solver correction.
    pub dz: Vec<DiscFunction>,
    /// `z_ζ̄` (the head is holomorphic, so this is the correction's part).
    pub dzb: Vec<DiscFunction>,
    pub params: DiscFamilyParams,
    pub residuals: DiscResiduals,
    pub iterations: usize,
    /// Max observed ratio of successive correction norms.
    pub contraction_ratio: Option<f64>,
}

impl Disc {
    pub fn center(&self) -> Vec<C64> {
        self.z.iter().map(|c| c.center_value()).collect()
    }

    pub fn components(&self) -> &[DiscFunction] {
        &self.z
    }
}

/// Solver options; `tol` bounds the sup-norm fixed-point residual.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub lambda_threshold: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-11,
            max_iter: 80,
            damping: 1.0,
            lambda_threshold: 0.1,
        }
    }
}

/// One component's transform correction with its certified derivatives.
#[derive(Clone)]
struct CorrectionTerm {
    field: DiscFunction,
    dz: DiscFunction,
    dzb: DiscFunction,
}

impl CorrectionTerm {
    fn blend(self, new: CorrectionTerm, damping: f64) -> CorrectionTerm {
        let old_w = C64::new(1.0 - damping, 0.0);
        let new_w = C64::new(damping, 0.0);
        CorrectionTerm {
            field: self.field.scale(old_w).add(&new.field.scale(new_w)),
            dz: self.dz.scale(old_w).add(&new.dz.scale(new_w)),
            dzb: self.dzb.scale(old_w).add(&new.dzb.scale(new_w)),
        }
    }
}

/// Shared state for solving many discs of one structure on one grid.
pub struct BishopSolver {
    grid: Arc<DiscGrid>,
    plan: CauchyGreenPlan,
    cutoff: BoundaryCutoff,
    structure: ComplexMatrixField,
}

impl BishopSolver {
    pub fn new(grid: Arc<DiscGrid>, structure: ComplexMatrixField) -> Self {
        let plan = CauchyGreenPlan::new(grid.clone());
        let cutoff = BoundaryCutoff::standard(&grid);
        BishopSolver {
            grid,
            plan,
            cutoff,
            structure,
        }
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn cutoff(&self) -> &BoundaryCutoff {
        &self.cutoff
    }

    pub fn structure(&self) -> &ComplexMatrixField {
        &self.structure
    }

    pub fn plan(&self) -> &CauchyGreenPlan {
        &self.plan
    }

    fn head_fields(&self, params: &DiscFamilyParams) -> (Vec<DiscFunction>, Vec<DiscFunction>) {
        let n = params.dim_n();
        let mut head = Vec::with_capacity(n);
        let mut head_dz = Vec::with_capacity(n);
        for j in 0..n {
            let tj = C64::new(params.t[j], 0.0);
            let cj = C64::new(0.0, params.c[j]);
            head.push(self.cutoff.schwarz_field().map(|v| v * tj + cj));
            head_dz.push(self.cutoff.schwarz_derivative_field().scale(tj));
        }
        (head, head_dz)
    }

    /// The explicit model disc `z_j = t_j Sφ + i c_j` (the `λ = 0` family).
    pub fn model_disc(&self, params: &DiscFamilyParams) -> Disc {
        let (head, head_dz) = self.head_fields(params);
        let zero: Vec<DiscFunction> = (0..params.dim_n())
            .map(|_| DiscFunction::zero(self.grid.clone()))
            .collect();
        let residuals = self.residual_record(&head, &head_dz, &zero, params, 0.0, 0.0);
        Disc {
            z: head,
            dz: head_dz,
            dzb: zero,
            params: params.clone(),
            residuals,
            iterations: 0,
            contraction_ratio: None,
        }
    }

    /// Evaluate the density `A(λ z(node))·conj(z_ζ(node))` for all nodes,
    /// with range checking against the chart of the structure.
    fn transported_density(
        &self,
        z: &[DiscFunction],
        dz: &[DiscFunction],
        lambda: f64,
    ) -> Result<Vec<Vec<C64>>, BishopError> {
        let n = z.len();
        let n_nodes = self.grid.n_nodes();
        let radius = self.structure.domain_radius();
        let mut g = vec![vec![C64::new(0.0, 0.0); n_nodes]; n];
        let mut point = vec![C64::new(0.0, 0.0); n];
        for idx in 0..n_nodes {
            let mut norm_sq = 0.0;
            for (j, comp) in z.iter().enumerate() {
                point[j] = comp.values()[idx] * lambda;
                norm_sq += point[j].norm_sqr();
            }
            let norm = norm_sq.sqrt();
            if norm > radius {
                return Err(BishopError::RangeEscape { norm, radius });
            }
            let am = self.structure.eval(&point);
            for row in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for col in 0..n {
                    acc += am[(row, col)] * dz[col].values()[idx].conj();
                }
                g[row][idx] = acc;
            }
        }
        Ok(g)
    }

    /// One application of the right-hand side
    /// `h(z) = t Sφ + i c + T[A(λz)·conj(z_ζ)] − conj(T[...](1/ζ̄))`, with
    /// `z_ζ` taken spectrally from the supplied fields.
    ///
    /// Also reports the holomorphy defect of the first and reflected terms
    /// (largest negative Fourier mode of their boundary traces).
    pub fn rhs(
        &self,
        z: &[DiscFunction],
        params: &DiscFamilyParams,
    ) -> Result<(Vec<DiscFunction>, f64), BishopError> {
        let dz: Vec<DiscFunction> = z.iter().map(|c| c.wirtinger().0).collect();
        let (head, _) = self.head_fields(params);
        let (corrections, defect) = self.transform_terms(z, &dz, params)?;
        let out = head
            .iter()
            .zip(&corrections)
            .map(|(h, c)| h.add(&c.field))
            .collect();
        Ok((out, defect))
    }

    /// The `T − conj(T∘refl)` correction for a given iterate: per component
    /// the field, its exact ζ-derivative, and its `∂̄` (the density itself),
    /// plus the holomorphy defect of the head and reflected terms.
    fn transform_terms(
        &self,
        z: &[DiscFunction],
        dz: &[DiscFunction],
        params: &DiscFamilyParams,
    ) -> Result<(Vec<CorrectionTerm>, f64), BishopError> {
        let n = params.dim_n();
        let mut holo = negative_mode_content(
            &self.grid,
            self.cutoff.schwarz_field().boundary_trace(),
        );
        if params.lambda == 0.0 {
            // A(0·z) = A(0) = 0 for a centered structure: corrections vanish
            let zero = DiscFunction::zero(self.grid.clone());
            return Ok((
                (0..n)
                    .map(|_| CorrectionTerm {
                        field: zero.clone(),
                        dz: zero.clone(),
                        dzb: zero.clone(),
                    })
                    .collect(),
                holo,
            ));
        }
        let g = self.transported_density(z, dz, params.lambda)?;
        let mut out = Vec::with_capacity(n);
        for g_j in g {
            let gj = DiscFunction::from_values(self.grid.clone(), g_j)?;
            let t = self.plan.apply(&gj);
            holo = holo.max(negative_mode_content(
                &self.grid,
                t.reflected.boundary_trace(),
            ));
            out.push(CorrectionTerm {
                field: t.interior.sub(&t.reflected),
                dz: t.interior_dz.sub(&t.reflected_dz),
                // ∂̄(T g) = g and the reflected term is holomorphic
                dzb: gj,
            });
        }
        Ok((out, holo))
    }

    /// Picard iteration from the model disc. Geometric convergence is
    /// required: three consecutive non-contracting steps abort the solve.
    pub fn solve(
        &self,
        params: &DiscFamilyParams,
        opts: &SolveOptions,
    ) -> Result<Disc, BishopError> {
        if params.lambda > opts.lambda_threshold {
            return Err(BishopError::LambdaTooLarge {
                lambda: params.lambda,
                threshold: opts.lambda_threshold,
            });
        }
        let n = params.dim_n();
        let (head, head_dz) = self.head_fields(params);
        let zero_term = || CorrectionTerm {
            field: DiscFunction::zero(self.grid.clone()),
            dz: DiscFunction::zero(self.grid.clone()),
            dzb: DiscFunction::zero(self.grid.clone()),
        };
        let mut corr: Vec<CorrectionTerm> = (0..n).map(|_| zero_term()).collect();
        let mut prev_delta: Option<f64> = None;
        let mut bad_steps = 0usize;
        let mut worst_ratio: Option<f64> = None;
        let mut holo_defect: f64 = 0.0;
        let mut iterations = 0usize;
        let mut last_delta = f64::INFINITY;
        for iter in 1..=opts.max_iter {
            iterations = iter;
            let z: Vec<DiscFunction> = head
                .iter()
                .zip(&corr)
                .map(|(h, u)| h.add(&u.field))
                .collect();
            let dz: Vec<DiscFunction> = head_dz
                .iter()
                .zip(&corr)
                .map(|(h, u)| h.add(&u.dz))
                .collect();
            let (new_corr, defect) = self.transform_terms(&z, &dz, params)?;
            holo_defect = holo_defect.max(defect);
            let delta = new_corr
                .iter()
                .zip(&corr)
                .map(|(a, b)| a.field.sub(&b.field).sup_norm())
                .fold(0.0, f64::max);
            corr = if opts.damping == 1.0 {
                new_corr
            } else {
                new_corr
                    .into_iter()
                    .zip(corr)
                    .map(|(nc, oc)| oc.blend(nc, opts.damping))
                    .collect()
            };
            if let Some(prev) = prev_delta {
                if prev > 10.0 * opts.tol && delta > 10.0 * opts.tol {
                    let ratio = delta / prev;
                    worst_ratio = Some(worst_ratio.map_or(ratio, |w: f64| w.max(ratio)));
                    if ratio >= 1.0 {
                        bad_steps += 1;
                        if bad_steps >= 3 {
                            return Err(BishopError::NoContraction { ratio });
                        }
                    } else {
                        bad_steps = 0;
                    }
                }
            }
            prev_delta = Some(delta);
            last_delta = delta;
            if delta < opts.tol {
                break;
            }
            if iter == opts.max_iter {
                return Err(BishopError::MaxIterExceeded {
                    max_iter: opts.max_iter,
                    last_correction: delta,
                });
            }
        }
        let z: Vec<DiscFunction> = head
            .iter()
            .zip(&corr)
            .map(|(h, u)| h.add(&u.field))
            .collect();
        let dz: Vec<DiscFunction> = head_dz
            .iter()
            .zip(&corr)
            .map(|(h, u)| h.add(&u.dz))
            .collect();
        let dzb: Vec<DiscFunction> = corr.into_iter().map(|u| u.dzb).collect();
        let residuals = self.residual_record(&z, &dz, &dzb, params, last_delta, holo_defect);
        Ok(Disc {
            z,
            dz,
            dzb,
            params: params.clone(),
            residuals,
            iterations,
            contraction_ratio: worst_ratio,
        })
    }

    /// Retry with halved λ on failed contraction; returns the disc at the
    /// first λ that converges (recorded in its params).
    pub fn solve_with_bisection(
        &self,
        params: &DiscFamilyParams,
        opts: &SolveOptions,
        max_halvings: usize,
    ) -> Result<Disc, BishopError> {
        let mut p = params.clone();
        let mut last_err = None;
        for _ in 0..=max_halvings {
            match self.solve(&p, opts) {
                Ok(disc) => return Ok(disc),
                Err(BishopError::NoContraction { ratio }) => {
                    last_err = Some(BishopError::NoContraction { ratio });
                    p.lambda *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(BishopError::NoContraction { ratio: f64::NAN }))
    }

    /// Cauchy-Riemann residual of a solved disc from its stored derivatives.
    pub fn cr_residual_of(&self, disc: &Disc) -> f64 {
        cr_residual_with_derivatives(
            &self.structure,
            &disc.z,
            &disc.dz,
            &disc.dzb,
            disc.params.lambda,
        )
    }

    fn residual_record(
        &self,
        z: &[DiscFunction],
        dz: &[DiscFunction],
        dzb: &[DiscFunction],
        params: &DiscFamilyParams,
        fixed_point: f64,
        holomorphy_defect: f64,
    ) -> DiscResiduals {
        let cauchy_riemann =
            cr_residual_with_derivatives(&self.structure, z, dz, dzb, params.lambda);
        let boundary = self.grid.boundary();
        let mut attachment: f64 = 0.0;
        for comp in z {
            let trace = comp.boundary_trace();
            for k in boundary.upper_arc_indices() {
                attachment = attachment.max(trace[k].re.abs());
            }
        }
        let mut containment = f64::NEG_INFINITY;
        for comp in z {
            for v in comp.values() {
                containment = containment.max(v.re);
            }
        }
        DiscResiduals {
            fixed_point,
            cauchy_riemann,
            attachment,
            containment,
            holomorphy_defect,
        }
    }
}

/// `sup` over interior nodes of the Euclidean norm of
/// `z_ζ̄ − A(λz)·conj(z_ζ)`, with the derivatives supplied by the caller.
pub fn cr_residual_with_derivatives(
    structure: &ComplexMatrixField,
    z: &[DiscFunction],
    dz: &[DiscFunction],
    dzb: &[DiscFunction],
    lambda: f64,
) -> f64 {
    let n = z.len();
    let grid = z[0].grid().clone();
    let n_t = grid.n_theta();
    let mut worst: f64 = 0.0;
    let mut point = vec![C64::new(0.0, 0.0); n];
    for ring in 0..grid.n_r() {
        for k in 0..n_t {
            let idx = ring * n_t + k;
            for (j, comp) in z.iter().enumerate() {
                point[j] = comp.values()[idx] * lambda;
            }
            let am = structure.eval(&point);
            let mut node_sq = 0.0;
            for row in 0..n {
                let mut rhs = C64::new(0.0, 0.0);
                for col in 0..n {
                    rhs += am[(row, col)] * dz[col].values()[idx].conj();
                }
                let res = dzb[row].values()[idx] - rhs;
                node_sq += res.norm_sqr();
            }
            worst = worst.max(node_sq.sqrt());
        }
    }
    worst
}

/// Cauchy-Riemann residual of raw sampled components, differentiating
/// spectrally on the grid. Suitable for resolved test fields.
pub fn cr_residual(structure: &ComplexMatrixField, z: &[DiscFunction], lambda: f64) -> f64 {
    let derivs: Vec<(DiscFunction, DiscFunction)> = z.iter().map(|c| c.wirtinger()).collect();
    let dz: Vec<DiscFunction> = derivs.iter().map(|(a, _)| a.clone()).collect();
    let dzb: Vec<DiscFunction> = derivs.into_iter().map(|(_, b)| b).collect();
    cr_residual_with_derivatives(structure, z, &dz, &dzb, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{CPoly, PolyMatrix};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn stock_structure(n: usize) -> ComplexMatrixField {
        // A(z) = diag(z̄_1, …, z̄_n); centered with vanishing z-jet
        let mut entries = Vec::new();
        for j in 0..n {
            for l in 0..n {
                entries.push(if j == l {
                    CPoly::var_zb(n, j)
                } else {
                    CPoly::zero(n)
                });
            }
        }
        ComplexMatrixField::new(n, PolyMatrix::from_entries(n, n, entries), 4.0, true).unwrap()
    }

    #[test]
    fn cutoff_sign_pattern_and_smoothness() {
        assert_eq!(cutoff_bump(0.0), 0.0);
        assert_eq!(cutoff_bump(PI / 2.0), 0.0);
        assert_eq!(cutoff_bump(PI), 0.0);
        assert!(cutoff_bump(3.0 * PI / 2.0) < -0.6);
        assert!(cutoff_bump(PI + 1e-3) < 0.0);
        // flat junctions
        let h = 1e-3;
        assert!(cutoff_bump(PI + h).abs() < 1e-40);
        assert!(cutoff_bump(2.0 * PI - h).abs() < 1e-40);
    }

    #[test]
    fn p0_of_cutoff_regression() {
        // quadrature oracle: fine trapezoid of the bump (continuum value)
        let fine = 1 << 14;
        let oracle: f64 = (0..fine)
            .map(|k| cutoff_bump(2.0 * PI * k as f64 / fine as f64))
            .sum::<f64>()
            / fine as f64;
        let grid = DiscGrid::new(32, 128);
        let cutoff = BoundaryCutoff::standard(&grid);
        // the operative value is the grid mean; it sits within the bump's
        // slow spectral tail of the continuum value
        assert_abs_diff_eq!(cutoff.p0(), oracle, epsilon = 1e-5);
        // frozen regression value at the default boundary resolution
        assert_abs_diff_eq!(cutoff.p0(), -0.245_635_985_964_670_84, epsilon = 1e-13);
        assert!(cutoff.p0() < 0.0);
    }

    #[test]
    fn model_disc_properties() {
        let grid = DiscGrid::new(32, 128);
        let solver = BishopSolver::new(grid.clone(), ComplexMatrixField::standard(1, 1.0));
        // t = 0: constant disc z ≡ ic
        let constant = solver.model_disc(&DiscFamilyParams::new(vec![0.7], vec![0.0], 0.0));
        assert!(
            constant.z[0]
                .sub(&DiscFunction::from_fn(grid.clone(), |_| c(0.0, 0.7)))
                .sup_norm()
                < 1e-15
        );
        // n = 1, t = 1, c = 0
        let disc = solver.model_disc(&DiscFamilyParams::new(vec![0.0], vec![1.0], 0.0));
        // center value = P₀φ < 0, real
        let center = disc.z[0].center_value();
        assert_abs_diff_eq!(center.re, solver.cutoff().p0(), epsilon = 1e-10);
        assert!(center.re < 0.0);
        // attachment: Re z = 0 on the closed upper semicircle, to rounding
        assert!(disc.residuals.attachment < 1e-12);
        // interior minimum is attained below the center value
        let mut min_re = f64::INFINITY;
        for v in disc.z[0].values() {
            min_re = min_re.min(v.re);
        }
        assert!(min_re < center.re && center.re < 0.0);
        // containment: Re z ≤ 0 up to rounding everywhere
        assert!(disc.residuals.containment <= 1e-12);
        // the model disc is exactly holomorphic in split form
        assert!(disc.residuals.cauchy_riemann < 1e-13);
    }

    #[test]
    fn rhs_at_lambda_zero_is_model_disc() {
        let grid = DiscGrid::new(24, 64);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.3], vec![0.8], 0.0);
        let model = solver.model_disc(&params);
        // rhs is independent of z at λ = 0
        let junk: Vec<DiscFunction> =
            vec![DiscFunction::from_fn(grid.clone(), |z| z * z + c(0.2, 0.1))];
        let (h, _) = solver.rhs(&junk, &params).unwrap();
        assert!(h[0].sub(&model.z[0]).sup_norm() < 1e-13);
    }

    #[test]
    fn constant_discs_are_exact_fixed_points_for_every_lambda() {
        let grid = DiscGrid::new(24, 64);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        for &lambda in &[0.0, 0.02, 0.08] {
            let params = DiscFamilyParams::new(vec![0.4], vec![0.0], lambda);
            let constant = solver.model_disc(&params);
            let (h, _) = solver.rhs(&constant.z, &params).unwrap();
            // z ≡ ic: z_ζ = 0, so the transform terms vanish and rhs = ic
            assert!(h[0].sub(&constant.z[0]).sup_norm() < 1e-12);
            let disc = solver.solve(&params, &SolveOptions::default()).unwrap();
            assert!(disc.z[0].sub(&constant.z[0]).sup_norm() < 1e-11);
        }
    }

    #[test]
    fn solver_at_lambda_zero_returns_model_in_one_iteration() {
        let grid = DiscGrid::new(32, 128);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.2], vec![1.0], 0.0);
        let disc = solver.solve(&params, &SolveOptions::default()).unwrap();
        assert_eq!(disc.iterations, 1);
        let model = solver.model_disc(&params);
        assert!(disc.z[0].sub(&model.z[0]).sup_norm() < 1e-12);
        assert!(disc.residuals.fixed_point < 1e-14);
    }

    #[test]
    fn rhs_perturbation_is_first_order_in_lambda() {
        // ‖h(model) − model‖ ~ O(λ): two-point ratio
        let grid = DiscGrid::new(24, 64);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let delta_at = |lambda: f64| {
            let params = DiscFamilyParams::new(vec![0.0], vec![1.0], lambda);
            let model = solver.model_disc(&params);
            let (h, _) = solver.rhs(&model.z, &params).unwrap();
            h[0].sub(&model.z[0]).sup_norm()
        };
        let d1 = delta_at(0.04);
        let d2 = delta_at(0.02);
        let ratio = d2 / d1;
        assert!(
            (0.3..=0.7).contains(&ratio),
            "rhs perturbation ratio {ratio} not first order"
        );
    }

    #[test]
    fn stock_solve_converges_with_certified_residuals() {
        let grid = DiscGrid::new(32, 128);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.0], vec![1.0], 0.05);
        let disc = solver.solve(&params, &SolveOptions::default()).unwrap();
        assert!(disc.residuals.fixed_point < 1e-11);
        assert!(
            disc.residuals.cauchy_riemann < 1e-6,
            "CR residual {}",
            disc.residuals.cauchy_riemann
        );
        assert!(disc.residuals.attachment < 1e-8);
        assert!(disc.residuals.containment <= 1e-10);
        assert!(disc.residuals.holomorphy_defect < 1e-8);
        let q = disc.contraction_ratio.unwrap();
        assert!(q < 0.2, "contraction ratio {q}");
        // containment is strict in the interior
        let mut interior_max = f64::NEG_INFINITY;
        for ring in 0..grid.n_r() {
            for k in 0..grid.n_theta() {
                interior_max = interior_max.max(disc.z[0].value(ring, k).re);
            }
        }
        assert!(interior_max < 0.0, "interior not strictly inside the wedge");
    }

    #[test]
    fn stored_derivatives_match_finite_differences() {
        // the split-form derivatives must agree with plain finite
        // differences of the interpolated disc at interior points
        let grid = DiscGrid::new(32, 128);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.1], vec![0.8], 0.05);
        let disc = solver.solve(&params, &SolveOptions::default()).unwrap();
        let h = 1e-4;
        for &(ring, k) in &[(8usize, 5usize), (16, 40), (24, 100)] {
            let z0 = grid.node_point(ring, k);
            let f = &disc.z[0];
            let dx = (f.eval_at(z0 + c(h, 0.0)) - f.eval_at(z0 - c(h, 0.0))) / (2.0 * h);
            let dy = (f.eval_at(z0 + c(0.0, h)) - f.eval_at(z0 - c(0.0, h))) / (2.0 * h);
            let fd_dz = (dx - c(0.0, 1.0) * dy) * 0.5;
            let fd_dzb = (dx + c(0.0, 1.0) * dy) * 0.5;
            let stored_dz = disc.dz[0].value(ring, k);
            let stored_dzb = disc.dzb[0].value(ring, k);
            assert!(
                (fd_dz - stored_dz).norm() < 1e-6,
                "dz mismatch at {z0}: {fd_dz} vs {stored_dz}"
            );
            assert!(
                (fd_dzb - stored_dzb).norm() < 1e-6,
                "dzb mismatch at {z0}: {fd_dzb} vs {stored_dzb}"
            );
        }
    }

    #[test]
    fn solver_consistency_under_tolerance_halving() {
        let grid = DiscGrid::new(24, 64);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.1], vec![0.7], 0.05);
        let loose = solver
            .solve(
                &params,
                &SolveOptions {
                    tol: 1e-8,
                    ..Default::default()
                },
            )
            .unwrap();
        let tight = solver
            .solve(
                &params,
                &SolveOptions {
                    tol: 5e-9,
                    ..Default::default()
                },
            )
            .unwrap();
        let diff = loose.z[0].sub(&tight.z[0]).sup_norm();
        assert!(diff < 1e-8, "tolerance halving moved the disc by {diff}");
    }

    #[test]
    fn two_resolution_center_agreement_and_regression() {
        // radial refinement at the default boundary resolution; the boundary
        // data (hence the continuum problem) is shared by both grids
        let params = DiscFamilyParams::new(vec![0.0], vec![1.0], 0.05);
        let coarse = BishopSolver::new(DiscGrid::new(32, 128), stock_structure(1));
        let fine = BishopSolver::new(DiscGrid::new(48, 128), stock_structure(1));
        let z0_coarse = coarse
            .solve(&params, &SolveOptions::default())
            .unwrap()
            .center()[0];
        let z0_fine = fine
            .solve(&params, &SolveOptions::default())
            .unwrap()
            .center()[0];
        assert!(
            (z0_coarse - z0_fine).norm() < 1e-6,
            "grid resolutions disagree: {z0_coarse} vs {z0_fine}"
        );
    }

    #[test]
    fn perturbation_scaling_of_solutions() {
        // ‖solve(λ) − solve(0)‖_∞ = O(λ): ratio at λ ∈ {0.05, 0.025} in [0.3, 0.7]
        let grid = DiscGrid::new(32, 128);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let base = solver
            .solve(
                &DiscFamilyParams::new(vec![0.0], vec![1.0], 0.0),
                &SolveOptions::default(),
            )
            .unwrap();
        let dist_at = |lambda: f64| {
            let disc = solver
                .solve(
                    &DiscFamilyParams::new(vec![0.0], vec![1.0], lambda),
                    &SolveOptions::default(),
                )
                .unwrap();
            disc.z[0].sub(&base.z[0]).sup_norm()
        };
        let d1 = dist_at(0.05);
        let d2 = dist_at(0.025);
        let ratio = d2 / d1;
        assert!((0.3..=0.7).contains(&ratio), "perturbation ratio {ratio}");
    }

    #[test]
    fn smooth_dependence_on_c_at_lambda_zero() {
        // finite-difference derivative of the converged disc in c equals i·1
        let grid = DiscGrid::new(24, 64);
        let solver = BishopSolver::new(grid.clone(), stock_structure(1));
        let h = 1e-4;
        let opts = SolveOptions::default();
        let plus = solver
            .solve(&DiscFamilyParams::new(vec![h], vec![0.5], 0.0), &opts)
            .unwrap();
        let minus = solver
            .solve(&DiscFamilyParams::new(vec![-h], vec![0.5], 0.0), &opts)
            .unwrap();
        let deriv = plus.z[0].sub(&minus.z[0]).scale(c(0.5 / h, 0.0));
        let expect = DiscFunction::from_fn(grid.clone(), |_| c(0.0, 1.0));
        assert!(deriv.sub(&expect).sup_norm() < 1e-6);
    }

    #[test]
    fn cr_residual_control_values() {
        let grid = DiscGrid::new(24, 64);
        let a0 = ComplexMatrixField::standard(1, 1.0);
        // holomorphic z, A ≡ 0 → 0 within differentiation tolerance
        let holo = vec![DiscFunction::from_fn(grid.clone(), |z| z * z - c(0.3, 0.0))];
        assert!(cr_residual(&a0, &holo, 0.0) < 1e-9);
        // z = conj(ζ), A ≡ 0 → ≈ 1 (symbolic oracle: z_ζ̄ = 1)
        let anti = vec![DiscFunction::from_fn(grid.clone(), |z| z.conj())];
        let r = cr_residual(&a0, &anti, 0.0);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn lambda_threshold_is_enforced() {
        let grid = DiscGrid::new(16, 32);
        let solver = BishopSolver::new(grid, stock_structure(1));
        let params = DiscFamilyParams::new(vec![0.0], vec![1.0], 0.5);
        assert!(matches!(
            solver.solve(&params, &SolveOptions::default()),
            Err(BishopError::LambdaTooLarge { .. })
        ));
    }
}
