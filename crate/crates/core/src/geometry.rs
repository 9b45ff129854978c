//! Almost complex structures on a chart of ℂⁿ and their coordinate
//! normalizations.
//!
//! A structure is primarily represented by its complex matrix field `A(z)`:
//! the n×n matrix with `L v = A v̄` where `L = (J_st + J)⁻¹(J_st − J)`. This
//! representation guarantees `J² = −I` by construction; the real 2n×2n field
//! `J` is derived. Pseudoholomorphic maps `z(ζ)` into the chart satisfy
//! `z_ζ̄ = A(z) · conj(z_ζ)`.
//!
//! The module also carries wedge data: defining functions `ρ_j` of a totally
//! real edge `{ρ = 0}`, the truncation `ρ̃_j = ρ_j − τ Σ_{k≠j} ρ_k + C Σ ρ_k²`,
//! and the coordinate change that flattens the edge onto `iℝⁿ`.

use crate::linalg::{
    complexify_vector, j_standard, operator_norm, real_of_complex_linear,
    real_of_conjugate_linear, realify_vector, split_real_linear,
};
use crate::poly::{C64, CPoly, PolyMatrix};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default tolerance for the structure axiom `J² = −I`.
pub const STRUCTURE_AXIOM_TOL: f64 = 1e-10;
/// Default tolerance for the normalization residual `‖A'_z(0)‖`.
pub const NORMALIZATION_RESIDUAL_TOL: f64 = 1e-8;
/// Default truncation degree for pushed-forward polynomial fields.
pub const DEFAULT_DEGREE_CAP: usize = 4;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("J(p)² differs from -I by {defect:.3e} (tolerance {tol:.3e})")]
    NotAStructure { defect: f64, tol: f64 },
    #[error("J_st + J(p) is not invertible")]
    SingularResolvent,
    #[error("L = (J_st + J)⁻¹(J_st − J) has complex-linear part of size {defect:.3e}")]
    NotConjugateLinear { defect: f64 },
    #[error("operator norm of A(p) is {norm:.6} >= 1")]
    NormTooLarge { norm: f64 },
    #[error("Jacobian factor of the transformation rule is singular at the evaluation point")]
    SingularJacobianFactor,
    #[error("field is not centered: ‖A(0)‖ = {norm:.3e}")]
    NotCentered { norm: f64 },
    #[error("complex-linear parts of dρ_j are dependent (σ_min = {sigma_min:.3e})")]
    NotTotallyReal { sigma_min: f64 },
    #[error("gradient of ρ_{index} vanishes at the base point (|∇ρ| = {norm:.3e})")]
    DegenerateGradient { index: usize, norm: f64 },
    #[error("defining function ρ_{index} does not vanish at the origin (ρ(0) = {value:.3e})")]
    EdgeNotThroughOrigin { index: usize, value: f64 },
    #[error(
        "coordinate function x_{index} failed the plurisubharmonicity certificate \
         (min Hessian eigenvalue {min_eig:.3e}); enlarge C or shrink the chart"
    )]
    PshCertificationFailed { index: usize, min_eig: f64 },
    #[error("polynomial map is not a local diffeomorphism: {0}")]
    NotADiffeo(String),
    #[error("point inversion did not converge within {0} iterations")]
    InversionDiverged(usize),
    #[error("polynomial entry is not real-valued (defect {0:.3e})")]
    NotRealValued(f64),
}

// ---------------------------------------------------------------------------
// Complex matrix fields
// ---------------------------------------------------------------------------

/// Polynomial field `z ↦ A(z)` of n×n complex matrices on a chart.
#[derive(Clone, Debug)]
pub struct ComplexMatrixField {
    dim_n: usize,
    entries: PolyMatrix,
    domain_radius: f64,
    normalized: bool,
}

impl ComplexMatrixField {
    pub fn new(
        dim_n: usize,
        entries: PolyMatrix,
        domain_radius: f64,
        normalized: bool,
    ) -> Result<Self, GeometryError> {
        assert_eq!(entries.rows(), dim_n);
        assert_eq!(entries.cols(), dim_n);
        assert!(domain_radius > 0.0);
        let field = ComplexMatrixField {
            dim_n,
            entries,
            domain_radius,
            normalized,
        };
        if normalized {
            let at0 = field.entries.constant_part();
            let norm = at0.norm();
            if norm > 1e-12 {
                return Err(GeometryError::NotCentered { norm });
            }
        }
        Ok(field)
    }

    /// The integrable model `A ≡ 0`.
    pub fn standard(dim_n: usize, domain_radius: f64) -> Self {
        ComplexMatrixField {
            dim_n,
            entries: PolyMatrix::zero(dim_n, dim_n, dim_n),
            domain_radius,
            normalized: true,
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn entries(&self) -> &PolyMatrix {
        &self.entries
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn eval(&self, p: &[C64]) -> DMatrix<C64> {
        self.entries.eval(p)
    }

    /// Operator norm of `A(p)`; must stay below 1 inside the chart.
    pub fn norm_at(&self, p: &[C64]) -> f64 {
        operator_norm(&real_of_conjugate_linear(&self.eval(p)))
    }

    /// `A_λ(z) = A(λ z)` for real λ ≥ 0. Dilation enlarges the chart by 1/λ.
    pub fn dilate(&self, lambda: f64) -> ComplexMatrixField {
        assert!(lambda >= 0.0);
        let entries = PolyMatrix::from_entries(
            self.dim_n,
            self.dim_n,
            (0..self.dim_n * self.dim_n)
                .map(|i| self.entries.get(i / self.dim_n, i % self.dim_n).dilate(lambda))
                .collect(),
        );
        let domain_radius = if lambda > 0.0 {
            self.domain_radius / lambda
        } else {
            f64::INFINITY
        };
        ComplexMatrixField {
            dim_n: self.dim_n,
            entries,
            domain_radius,
            normalized: self.normalized,
        }
    }
}

/// `A_λ` as a standalone operation.
pub fn dilate_structure(a: &ComplexMatrixField, lambda: f64) -> ComplexMatrixField {
    a.dilate(lambda)
}

// ---------------------------------------------------------------------------
// Real structure fields
// ---------------------------------------------------------------------------

/// A field of real 2n×2n matrices `J(p)` with `J² = −I`.
///
/// Either supplied directly with polynomial entries (in `(z, z̄)` form,
/// validated real-valued) or derived pointwise from a complex matrix field.
#[derive(Clone, Debug)]
pub struct RealStructureField {
    dim_n: usize,
    source: StructureSource,
}

#[derive(Clone, Debug)]
enum StructureSource {
    PolynomialEntries(Vec<CPoly>),
    Derived(ComplexMatrixField),
}

impl RealStructureField {
    /// The constant standard structure `J_st`.
    pub fn standard(dim_n: usize) -> Self {
        let jst = j_standard(dim_n);
        let entries = (0..2 * dim_n)
            .flat_map(|i| (0..2 * dim_n).map(move |j| (i, j)))
            .map(|(i, j)| CPoly::constant(dim_n, C64::new(jst[(i, j)], 0.0)))
            .collect();
        RealStructureField {
            dim_n,
            source: StructureSource::PolynomialEntries(entries),
        }
    }

    /// Constant structure from a fixed matrix.
    pub fn constant(dim_n: usize, j: &DMatrix<f64>) -> Self {
        assert_eq!(j.nrows(), 2 * dim_n);
        let entries = (0..2 * dim_n)
            .flat_map(|i| (0..2 * dim_n).map(move |jj| (i, jj)))
            .map(|(i, jj)| CPoly::constant(dim_n, C64::new(j[(i, jj)], 0.0)))
            .collect();
        RealStructureField {
            dim_n,
            source: StructureSource::PolynomialEntries(entries),
        }
    }

    /// Row-major polynomial entries, each validated to be real-valued.
    pub fn from_polynomial_entries(
        dim_n: usize,
        entries: Vec<CPoly>,
    ) -> Result<Self, GeometryError> {
        assert_eq!(entries.len(), 4 * dim_n * dim_n);
        for e in &entries {
            let defect = e.realness_defect();
            if defect > 1e-12 {
                return Err(GeometryError::NotRealValued(defect));
            }
        }
        Ok(RealStructureField {
            dim_n,
            source: StructureSource::PolynomialEntries(entries),
        })
    }

    /// Derive `J` pointwise from the complex matrix of the structure.
    pub fn derived(a: ComplexMatrixField) -> Self {
        RealStructureField {
            dim_n: a.dim_n(),
            source: StructureSource::Derived(a),
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn eval(&self, p: &[C64]) -> Result<DMatrix<f64>, GeometryError> {
        match &self.source {
            StructureSource::PolynomialEntries(entries) => {
                let n2 = 2 * self.dim_n;
                Ok(DMatrix::from_fn(n2, n2, |i, j| {
                    entries[i * n2 + j].eval(p).re
                }))
            }
            StructureSource::Derived(a) => structure_from_complex_matrix(&a.eval(p)),
        }
    }

    /// `‖J(p)² + I‖` — zero for a genuine structure.
    pub fn structure_defect(&self, p: &[C64]) -> Result<f64, GeometryError> {
        let j = self.eval(p)?;
        let n2 = 2 * self.dim_n;
        Ok((&j * &j + DMatrix::<f64>::identity(n2, n2)).norm())
    }
}

// ---------------------------------------------------------------------------
// J ↔ A conversions
// ---------------------------------------------------------------------------

/// Extract the complex matrix `A(p)` from `J(p)`.
///
/// `L = (J_st + J)⁻¹(J_st − J)` is conjugate-linear exactly when `J² = −I`;
/// `A` is read off from `L v = A v̄`.
pub fn complex_matrix_from_structure(
    j: &RealStructureField,
    p: &[C64],
    tol: f64,
) -> Result<DMatrix<C64>, GeometryError> {
    let jp = j.eval(p)?;
    complex_matrix_from_structure_matrix(&jp, tol)
}

/// Same as [`complex_matrix_from_structure`] for an already evaluated matrix.
pub fn complex_matrix_from_structure_matrix(
    jp: &DMatrix<f64>,
    tol: f64,
) -> Result<DMatrix<C64>, GeometryError> {
    let n2 = jp.nrows();
    assert_eq!(n2 % 2, 0);
    let n = n2 / 2;
    let ident = DMatrix::<f64>::identity(n2, n2);
    let defect = (jp * jp + &ident).norm();
    if defect > tol {
        return Err(GeometryError::NotAStructure { defect, tol });
    }
    let jst = j_standard(n);
    let sum = &jst + jp;
    let lu = sum.lu();
    let l = lu
        .solve(&(&jst - jp))
        .ok_or(GeometryError::SingularResolvent)?;
    let (p_lin, q_lin) = split_real_linear(&l);
    let lin_defect = p_lin.norm();
    if lin_defect > tol.max(1e-9) {
        return Err(GeometryError::NotConjugateLinear { defect: lin_defect });
    }
    Ok(q_lin)
}

/// Rebuild `J(p)` from `A(p)` via `J = J_st (I − L)(I + L)⁻¹`, `L v = A v̄`.
pub fn structure_from_complex_matrix(a: &DMatrix<C64>) -> Result<DMatrix<f64>, GeometryError> {
    let n = a.nrows();
    let l = real_of_conjugate_linear(a);
    let norm = operator_norm(&l);
    if norm >= 1.0 {
        return Err(GeometryError::NormTooLarge { norm });
    }
    let ident = DMatrix::<f64>::identity(2 * n, 2 * n);
    let lu = (&ident + &l).lu();
    let inv = lu
        .solve(&(&ident - &l))
        .ok_or(GeometryError::SingularResolvent)?;
    Ok(j_standard(n) * inv)
}

// ---------------------------------------------------------------------------
// Polynomial diffeomorphisms and the transformation rule
// ---------------------------------------------------------------------------

/// Polynomial coordinate change `Φ` fixing the origin with invertible
/// differential at 0, together with its truncated formal inverse.
#[derive(Clone, Debug)]
pub struct PolyDiffeo {
    comps: Vec<CPoly>,
    inverse: Vec<CPoly>,
    degree_cap: usize,
}

impl PolyDiffeo {
    pub fn new(comps: Vec<CPoly>, degree_cap: usize) -> Result<Self, GeometryError> {
        let n = comps.len();
        assert!(n > 0);
        let zero = vec![C64::new(0.0, 0.0); n];
        for (j, c) in comps.iter().enumerate() {
            if c.eval(&zero).norm() > 1e-12 {
                return Err(GeometryError::NotADiffeo(format!(
                    "component {} does not vanish at 0",
                    j
                )));
            }
        }
        let lin = linear_part_real(&comps);
        let lin_inv = lin
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::NotADiffeo("singular differential at 0".into()))?;
        let inverse = truncated_inverse(&comps, &lin_inv, degree_cap);
        Ok(PolyDiffeo {
            comps,
            inverse,
            degree_cap,
        })
    }

    pub fn identity(n: usize, degree_cap: usize) -> Self {
        let comps: Vec<CPoly> = (0..n).map(|j| CPoly::var_z(n, j)).collect();
        PolyDiffeo {
            comps: comps.clone(),
            inverse: comps,
            degree_cap,
        }
    }

    /// `Φ(z) = P z` for an invertible complex matrix `P`.
    pub fn complex_linear(p: &DMatrix<C64>, degree_cap: usize) -> Result<Self, GeometryError> {
        let n = p.nrows();
        let comps = (0..n)
            .map(|j| {
                let mut acc = CPoly::zero(n);
                for k in 0..n {
                    acc = acc.add(&CPoly::var_z(n, k).scale(p[(j, k)]));
                }
                acc
            })
            .collect();
        PolyDiffeo::new(comps, degree_cap)
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn components(&self) -> &[CPoly] {
        &self.comps
    }

    pub fn inverse_components(&self) -> &[CPoly] {
        &self.inverse
    }

    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        self.comps.iter().map(|c| c.eval(z)).collect()
    }

    pub fn eval_inverse_poly(&self, w: &[C64]) -> Vec<C64> {
        self.inverse.iter().map(|c| c.eval(w)).collect()
    }

    /// Wirtinger matrix `[∂Φ_j/∂z_k]`.
    pub fn wirtinger_z(&self) -> PolyMatrix {
        let n = self.dim();
        PolyMatrix::from_entries(
            n,
            n,
            (0..n * n).map(|i| self.comps[i / n].dz(i % n)).collect(),
        )
    }

    /// Wirtinger matrix `[∂Φ_j/∂z̄_k]`.
    pub fn wirtinger_zb(&self) -> PolyMatrix {
        let n = self.dim();
        PolyMatrix::from_entries(
            n,
            n,
            (0..n * n).map(|i| self.comps[i / n].dzb(i % n)).collect(),
        )
    }

    /// Full real differential at a point, as a 2n×2n matrix.
    pub fn real_differential(&self, z: &[C64]) -> DMatrix<f64> {
        let pz = self.wirtinger_z().eval(z);
        let pzb = self.wirtinger_zb().eval(z);
        real_of_complex_linear(&pz) + real_of_conjugate_linear(&pzb)
    }

    pub fn linear_part_is_identity(&self, tol: f64) -> bool {
        let n = self.dim();
        (linear_part_real(&self.comps) - DMatrix::<f64>::identity(2 * n, 2 * n)).norm() <= tol
    }

    /// Solve `Φ(z) = w` by Newton iteration, seeded by the truncated inverse.
    pub fn invert_point(
        &self,
        w: &[C64],
        tol: f64,
        max_iter: usize,
    ) -> Result<Vec<C64>, GeometryError> {
        let mut z = self.eval_inverse_poly(w);
        for _ in 0..max_iter {
            let fz = self.eval(&z);
            let residual: Vec<f64> = realify_vector(&fz)
                .iter()
                .zip(realify_vector(w).iter())
                .map(|(a, b)| a - b)
                .collect();
            let res_norm = residual.iter().map(|r| r * r).sum::<f64>().sqrt();
            if res_norm < tol {
                return Ok(z);
            }
            let d = self.real_differential(&z);
            let step = d
                .lu()
                .solve(&DVector::from_vec(residual))
                .ok_or(GeometryError::SingularJacobianFactor)?;
            let mut zr = realify_vector(&z);
            for (i, s) in step.iter().enumerate() {
                zr[i] -= s;
            }
            z = complexify_vector(&zr);
        }
        Err(GeometryError::InversionDiverged(max_iter))
    }

    /// `self ∘ inner`, truncated at the larger degree cap.
    pub fn compose(&self, inner: &PolyDiffeo) -> Result<PolyDiffeo, GeometryError> {
        let cap = self.degree_cap.max(inner.degree_cap);
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose_truncated(&inner.comps, cap))
            .collect();
        PolyDiffeo::new(comps, cap)
    }
}

/// Real 2n×2n linear part at 0 of a polynomial map.
fn linear_part_real(comps: &[CPoly]) -> DMatrix<f64> {
    let n = comps.len();
    let p = DMatrix::from_fn(n, n, |j, k| comps[j].coeff_z_linear(k));
    let q = DMatrix::from_fn(n, n, |j, k| comps[j].coeff_zb_linear(k));
    real_of_complex_linear(&p) + real_of_conjugate_linear(&q)
}

/// Truncated inverse by fixed-point iteration: with `Φ = L + N`,
/// `Ψ ← L⁻¹ ∘ (id − N ∘ Ψ)` gains one correct degree per pass.
fn truncated_inverse(comps: &[CPoly], lin_inv: &DMatrix<f64>, cap: usize) -> Vec<CPoly> {
    let n = comps.len();
    let (p_inv, q_inv) = split_real_linear(lin_inv);
    let apply_lin_inv = |u: &[CPoly]| -> Vec<CPoly> {
        (0..n)
            .map(|j| {
                let mut acc = CPoly::zero(n);
                for k in 0..n {
                    acc = acc.add(&u[k].scale(p_inv[(j, k)]));
                    acc = acc.add(&u[k].conj().scale(q_inv[(j, k)]));
                }
                acc
            })
            .collect()
    };
    // N = Φ − L, degree ≥ 2
    let nonlinear: Vec<CPoly> = (0..n)
        .map(|j| {
            let mut lin = CPoly::zero(n);
            for k in 0..n {
                lin = lin.add(&CPoly::var_z(n, k).scale(comps[j].coeff_z_linear(k)));
                lin = lin.add(&CPoly::var_zb(n, k).scale(comps[j].coeff_zb_linear(k)));
            }
            comps[j].sub(&lin)
        })
        .collect();
    let id: Vec<CPoly> = (0..n).map(|j| CPoly::var_z(n, j)).collect();
    let mut psi = apply_lin_inv(&id);
    for _ in 0..cap {
        let n_of_psi: Vec<CPoly> = nonlinear
            .iter()
            .map(|nj| nj.compose_truncated(&psi, cap))
            .collect();
        let rhs: Vec<CPoly> = (0..n).map(|j| id[j].sub(&n_of_psi[j])).collect();
        psi = apply_lin_inv(&rhs);
        psi = psi.iter().map(|p| p.truncate(cap)).collect();
    }
    psi
}

/// Transformation rule for complex matrices under `z' = Φ(z)`:
/// `A' = (Φ_z A + Φ_z̄)(conj(Φ_z) + conj(Φ_z̄) A)⁻¹`, evaluated at `z'`.
pub fn transform_complex_matrix(
    a: &ComplexMatrixField,
    phi: &PolyDiffeo,
    z_prime: &[C64],
) -> Result<DMatrix<C64>, GeometryError> {
    let z = phi.invert_point(z_prime, 1e-13, 50)?;
    let az = a.eval(&z);
    let pz = phi.wirtinger_z().eval(&z);
    let pzb = phi.wirtinger_zb().eval(&z);
    let numerator = &pz * &az + &pzb;
    let denominator = pz.conjugate() + pzb.conjugate() * &az;
    let lu = denominator.lu();
    let n = a.dim_n();
    let inv = lu
        .solve(&DMatrix::<C64>::identity(n, n))
        .ok_or(GeometryError::SingularJacobianFactor)?;
    Ok(numerator * inv)
}

/// Push the whole polynomial field through `Φ`, truncating at `cap`.
///
/// The matrix inverse in the transformation rule is expanded as a truncated
/// Neumann series around the constant part, then re-expressed in the new
/// coordinates through the truncated inverse of `Φ`.
pub fn pushforward_field(
    a: &ComplexMatrixField,
    phi: &PolyDiffeo,
    cap: usize,
) -> Result<ComplexMatrixField, GeometryError> {
    let pz = phi.wirtinger_z();
    let pzb = phi.wirtinger_zb();
    let numerator = pz.mul_truncated(a.entries(), cap).add(&pzb);
    let denominator = pz.conj().add(&pzb.conj().mul_truncated(a.entries(), cap));
    let den_inv = denominator
        .neumann_inverse_truncated(cap)
        .ok_or(GeometryError::SingularJacobianFactor)?;
    let a_in_old = numerator.mul_truncated(&den_inv, cap);
    let entries = a_in_old.compose_truncated(phi.inverse_components(), cap);
    // The chart of validity shrinks in general; keep the input radius as the
    // nominal value (callers re-certify ‖A'‖ < 1 where they evaluate).
    let at0 = entries.constant_part().norm();
    ComplexMatrixField::new(a.dim_n(), entries, a.domain_radius(), at0 <= 1e-12)
}

/// Quadratic change of coordinates that kills the z-linear jet of `A`:
/// `Φ_j(z) = z_j − Σ_{k,l} (∂A_{jl}/∂z_k)(0) z_k z̄_l`.
///
/// Requires `A(0) = 0`. Returns the diffeomorphism and the transformed field;
/// the residual `‖A'_z(0)‖` is certified by the caller via finite differences
/// (see [`z_jet_residual`]).
pub fn normalize_structure(
    a: &ComplexMatrixField,
    cap: usize,
) -> Result<(PolyDiffeo, ComplexMatrixField), GeometryError> {
    let n = a.dim_n();
    let at0 = a.entries().constant_part().norm();
    if at0 > 1e-12 {
        return Err(GeometryError::NotCentered { norm: at0 });
    }
    let mut comps = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = CPoly::var_z(n, j);
        for l in 0..n {
            let a_jl = a.entries().get(j, l);
            for k in 0..n {
                let coeff = a_jl.dz(k).constant_term();
                if coeff.norm() > 0.0 {
                    let quad = CPoly::var_z(n, k).mul(&CPoly::var_zb(n, l));
                    c = c.sub(&quad.scale(coeff));
                }
            }
        }
        comps.push(c);
    }
    let phi = PolyDiffeo::new(comps, cap)?;
    let a_new = pushforward_field(a, &phi, cap)?;
    Ok((phi, a_new))
}

/// Finite-difference `max_k ‖∂A/∂z_k(0)‖_max` for a polynomial matrix field.
pub fn z_jet_residual(a: &ComplexMatrixField, h: f64) -> f64 {
    let n = a.dim_n();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let mut ep = vec![C64::new(0.0, 0.0); n];
        ep[k] = C64::new(h, 0.0);
        let em: Vec<C64> = ep.iter().map(|z| -z).collect();
        let dx = (a.eval(&ep) - a.eval(&em)) / C64::new(2.0 * h, 0.0);
        let mut eip = vec![C64::new(0.0, 0.0); n];
        eip[k] = C64::new(0.0, h);
        let eim: Vec<C64> = eip.iter().map(|z| -z).collect();
        let dy = (a.eval(&eip) - a.eval(&eim)) / C64::new(2.0 * h, 0.0);
        // ∂/∂z = (∂/∂x − i ∂/∂y)/2
        let dz = (dx - dy * C64::new(0.0, 1.0)) * C64::new(0.5, 0.0);
        for v in dz.iter() {
            worst = worst.max(v.norm());
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Wedges and edge flattening
// ---------------------------------------------------------------------------

/// Defining functions of a totally real edge `{ρ_j = 0}` and its wedge
/// `{ρ_j < 0}`, with the truncation parameters.
#[derive(Clone, Debug)]
pub struct WedgeSpec {
    dim_n: usize,
    rho: Vec<CPoly>,
    pub tau: f64,
    pub big_c: f64,
    pub delta: f64,
}

impl WedgeSpec {
    pub fn new(
        dim_n: usize,
        rho: Vec<CPoly>,
        tau: f64,
        big_c: f64,
        delta: f64,
    ) -> Result<Self, GeometryError> {
        assert_eq!(rho.len(), dim_n);
        for r in &rho {
            let defect = r.realness_defect();
            if defect > 1e-12 {
                return Err(GeometryError::NotRealValued(defect));
            }
        }
        Ok(WedgeSpec {
            dim_n,
            rho,
            tau,
            big_c,
            delta,
        })
    }

    /// The flat model wedge: `ρ_j = x_j`.
    pub fn flat(dim_n: usize, delta: f64) -> Self {
        let rho = (0..dim_n)
            .map(|j| {
                CPoly::var_z(dim_n, j)
                    .add(&CPoly::var_zb(dim_n, j))
                    .scale(C64::new(0.5, 0.0))
            })
            .collect();
        WedgeSpec {
            dim_n,
            rho,
            tau: 0.0,
            big_c: 0.0,
            delta,
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn rho(&self) -> &[CPoly] {
        &self.rho
    }

    pub fn rho_at(&self, p: &[C64]) -> Vec<f64> {
        self.rho.iter().map(|r| r.eval(p).re).collect()
    }

    /// `ρ̃_j = ρ_j − τ Σ_{k≠j} ρ_k + C Σ_k ρ_k²`.
    pub fn rho_tilde(&self) -> Vec<CPoly> {
        let n = self.dim_n;
        let sum_sq = self
            .rho
            .iter()
            .fold(CPoly::zero(n), |acc, r| acc.add(&r.mul(r)));
        (0..n)
            .map(|j| {
                let mut p = self.rho[j].clone();
                for k in 0..n {
                    if k != j {
                        p = p.sub(&self.rho[k].scale(C64::new(self.tau, 0.0)));
                    }
                }
                p.add(&sum_sq.scale(C64::new(self.big_c, 0.0)))
            })
            .collect()
    }

    /// Real gradient `∇ρ_j(p)` in interleaved coordinates.
    pub fn gradient(&self, j: usize, p: &[C64]) -> Vec<f64> {
        let mut g = Vec::with_capacity(2 * self.dim_n);
        for k in 0..self.dim_n {
            let dzk = self.rho[j].dz(k).eval(p);
            g.push(2.0 * dzk.re);
            g.push(-2.0 * dzk.im);
        }
        g
    }

    /// Check the edge invariants at a point: non-vanishing gradients and
    /// linear independence of the J-complex linear parts of `dρ_j`.
    /// Returns the total-reality margin (smallest singular value).
    pub fn edge_invariants_at(
        &self,
        p: &[C64],
        j_field: &RealStructureField,
        grad_tol: f64,
    ) -> Result<f64, GeometryError> {
        for j in 0..self.dim_n {
            let g = self.gradient(j, p);
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < grad_tol {
                return Err(GeometryError::DegenerateGradient { index: j, norm });
            }
        }
        let sigma_min = self.total_reality_margin(p, j_field)?;
        Ok(sigma_min)
    }

    /// Smallest singular value of the map `v ↦ ((dρ_j(v) − i dρ_j(Jv))/2)_j`,
    /// whose invertibility is the total-reality condition.
    pub fn total_reality_margin(
        &self,
        p: &[C64],
        j_field: &RealStructureField,
    ) -> Result<f64, GeometryError> {
        let n = self.dim_n;
        let jp = j_field.eval(p)?;
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for j in 0..n {
            let g = DVector::from_vec(self.gradient(j, p));
            let gj = jp.transpose() * &g; // (dρ ∘ J)(e_k) = gᵀ J e_k
            for k in 0..2 * n {
                m[(2 * j, k)] = 0.5 * g[k];
                m[(2 * j + 1, k)] = -0.5 * gj[k];
            }
        }
        let svd = m.svd(false, false);
        Ok(svd
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }
}

/// Result of flattening a totally real edge onto `iℝⁿ`.
#[derive(Clone, Debug)]
pub struct FlattenOutput {
    /// Composite coordinate change (complex-linear straightening followed by
    /// the map `z ↦ ρ̃ + i y`).
    pub diffeo: PolyDiffeo,
    /// The structure in the flattened coordinates; `A(0) = 0` is preserved.
    pub structure: ComplexMatrixField,
    /// Flattened wedge: edge `{x = 0}`, truncated wedge `{x_j < 0}`.
    pub wedge: WedgeSpec,
    /// Max `|Re Φ(p)|` over the sampled edge points.
    pub edge_flatness: f64,
    /// Per-coordinate minimum Levi-form eigenvalue over the sample region.
    pub psh_margins: Vec<f64>,
}

/// Options for [`flatten_edge`].
#[derive(Clone, Debug)]
pub struct FlattenOptions {
    pub degree_cap: usize,
    /// Number of edge sample points for the flatness check.
    pub edge_samples: usize,
    /// Radius of the ball on which strict psh-ness of `x_j` is certified.
    pub psh_radius: f64,
    pub psh_samples: usize,
    /// Certification fails when a Levi eigenvalue drops below `-psh_tol`.
    pub psh_tol: f64,
    pub grad_tol: f64,
    pub reality_tol: f64,
}

impl Default for FlattenOptions {
    fn default() -> Self {
        FlattenOptions {
            degree_cap: DEFAULT_DEGREE_CAP,
            edge_samples: 60,
            psh_radius: 0.02,
            psh_samples: 40,
            psh_tol: 1e-9,
            grad_tol: 1e-8,
            reality_tol: 1e-8,
        }
    }
}

/// Straighten the truncated wedge: build `ρ̃_j`, apply the complex-linear
/// change making `ρ̃_j = x_j + o(|z|)` and then `z ↦ ρ̃ + i y`. Verifies
/// flatness of the edge image and certifies plurisubharmonicity of the new
/// coordinate functions `x_j` near the origin.
pub fn flatten_edge(
    wedge: &WedgeSpec,
    a: &ComplexMatrixField,
    opts: &FlattenOptions,
) -> Result<FlattenOutput, GeometryError> {
    let n = wedge.dim_n();
    assert_eq!(n, a.dim_n());
    let origin = vec![C64::new(0.0, 0.0); n];
    let at0 = a.entries().constant_part().norm();
    if at0 > 1e-12 {
        return Err(GeometryError::NotCentered { norm: at0 });
    }
    for (j, r) in wedge.rho().iter().enumerate() {
        let v = r.eval(&origin).re;
        if v.abs() > 1e-12 {
            return Err(GeometryError::EdgeNotThroughOrigin { index: j, value: v });
        }
    }
    // At the origin of a normalized chart J(0) = J_st, so total reality is the
    // invertibility of the complex linear-part matrix of ρ̃.
    let sigma_min = wedge.edge_invariants_at(&origin, &RealStructureField::standard(n), opts.grad_tol)?;
    if sigma_min < opts.reality_tol {
        return Err(GeometryError::NotTotallyReal { sigma_min });
    }

    let rho_tilde = wedge.rho_tilde();
    let c_mat = DMatrix::from_fn(n, n, |j, k| rho_tilde[j].dz(k).eval(&origin));
    // ρ̃_j = 2 Re Σ_k c_jk z_k + O(2); with w = 2 C z the linear part is Re w_j.
    let p_mat = c_mat.scale(2.0);
    if p_mat.clone().try_inverse().is_none() {
        return Err(GeometryError::NotTotallyReal { sigma_min: 0.0 });
    }
    let natural_cap = rho_tilde
        .iter()
        .map(|p| p.total_degree())
        .max()
        .unwrap_or(2)
        .max(opts.degree_cap);
    let lin_map = PolyDiffeo::complex_linear(&p_mat, natural_cap)?;
    // ρ̂_j = ρ̃_j ∘ P⁻¹ expressed in w; linear substitution, no truncation loss.
    let rho_hat: Vec<CPoly> = rho_tilde
        .iter()
        .map(|r| r.compose_truncated(lin_map.inverse_components(), natural_cap))
        .collect();
    // Φ₂: w ↦ ρ̂(w) + i Im w, i.e. ρ̂_j + (w_j − w̄_j)/2.
    let phi2_comps: Vec<CPoly> = (0..n)
        .map(|j| {
            rho_hat[j]
                .add(&CPoly::var_z(n, j).scale(C64::new(0.5, 0.0)))
                .sub(&CPoly::var_zb(n, j).scale(C64::new(0.5, 0.0)))
        })
        .collect();
    let phi2 = PolyDiffeo::new(phi2_comps, natural_cap)?;
    let diffeo = phi2.compose(&lin_map)?;

    let structure = pushforward_field(a, &diffeo, opts.degree_cap)?;

    // Edge flatness: project seed points onto {ρ = 0} by Gauss-Newton, then
    // measure |Re Φ(p)|.
    let mut edge_flatness: f64 = 0.0;
    let scale = 0.05;
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next_unit = move || {
        // xorshift; deterministic sampling, no external seed needed here
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < opts.edge_samples && attempts < opts.edge_samples * 10 {
        attempts += 1;
        let seed: Vec<C64> = (0..n)
            .map(|_| C64::new(scale * next_unit(), scale * next_unit()))
            .collect();
        if let Some(p) = project_to_edge(wedge, &seed, 1e-13, 40) {
            let image = diffeo.eval(&p);
            for w in &image {
                edge_flatness = edge_flatness.max(w.re.abs());
            }
            checked += 1;
        }
    }

    // Certify psh-ness of each flattened coordinate x_j near 0.
    let j_field = RealStructureField::derived(structure.clone());
    let mut psh_margins = Vec::with_capacity(n);
    for j in 0..n {
        let xj = crate::psh::ScalarField::coordinate_x(n, j);
        let report = crate::psh::psh_certificate(
            &xj,
            &crate::psh::BallSampler::new(n, opts.psh_radius, opts.psh_samples, 7 + j as u64),
            &j_field,
        )
        .map_err(|_| GeometryError::SingularResolvent)?;
        let min_eig = report.min_eigenvalue();
        if min_eig < -opts.psh_tol {
            return Err(GeometryError::PshCertificationFailed { index: j, min_eig });
        }
        psh_margins.push(min_eig);
    }

    let flat_wedge = WedgeSpec::flat(n, wedge.delta);
    Ok(FlattenOutput {
        diffeo,
        structure,
        wedge: flat_wedge,
        edge_flatness,
        psh_margins,
    })
}

/// Gauss-Newton projection of a seed point onto the edge `{ρ_j = 0}`.
pub fn project_to_edge(
    wedge: &WedgeSpec,
    seed: &[C64],
    tol: f64,
    max_iter: usize,
) -> Option<Vec<C64>> {
    let n = wedge.dim_n();
    let mut p = realify_vector(seed);
    for _ in 0..max_iter {
        let pc = complexify_vector(&p);
        let vals = DVector::from_vec(wedge.rho_at(&pc));
        if vals.norm() < tol {
            return Some(pc);
        }
        let jac = DMatrix::from_fn(n, 2 * n, |j, k| wedge.gradient(j, &pc)[k]);
        // least-norm step: Jᵀ(JJᵀ)⁻¹ ρ
        let jjt = &jac * jac.transpose();
        let y = jjt.lu().solve(&vals)?;
        let step = jac.transpose() * y;
        for k in 0..2 * n {
            p[k] -= step[k];
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn origin(n: usize) -> Vec<C64> {
        vec![c(0.0, 0.0); n]
    }

    /// Brute-force oracle for n = 1: build L as a real 2×2 matrix, verify
    /// conjugate-linearity L(iv) = −i L(v), and read off the complex scalar.
    fn oracle_extract_a_scalar(j: &DMatrix<f64>) -> C64 {
        let jst = j_standard(1);
        let l = (jst.clone() + j).lu().solve(&(jst - j)).unwrap();
        // L(1) and L(i) as complex numbers
        let l1 = C64::new(l[(0, 0)], l[(1, 0)]);
        let li = C64::new(l[(0, 1)], l[(1, 1)]);
        let defect = (li - l1 * C64::new(0.0, 1.0).conj() * 1.0).norm();
        // conjugate-linearity: L(i·1) = −i·L(1) = A·conj(i), with A = L(1)
        assert!(
            (li + C64::new(0.0, 1.0) * l1).norm() < 1e-12,
            "not conjugate-linear, defect {defect}"
        );
        l1
    }

    #[test]
    fn standard_structure_gives_zero_matrix() {
        let j = RealStructureField::standard(2);
        let p = vec![c(0.1, -0.2), c(0.3, 0.05)];
        let a = complex_matrix_from_structure(&j, &p, STRUCTURE_AXIOM_TOL).unwrap();
        assert!(a.norm() < 1e-14);
    }

    #[test]
    fn extraction_matches_two_by_two_oracle() {
        // J = [[0, -4], [1/4, 0]] squares to -I
        let jm = DMatrix::from_row_slice(2, 2, &[0.0, -4.0, 0.25, 0.0]);
        let j = RealStructureField::constant(1, &jm);
        let a = complex_matrix_from_structure(&j, &origin(1), STRUCTURE_AXIOM_TOL).unwrap();
        let expected = oracle_extract_a_scalar(&jm);
        assert!((a[(0, 0)] - expected).norm() < 1e-13);
        assert_abs_diff_eq!(a[(0, 0)].re, 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(a[(0, 0)].im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn zero_matrix_gives_standard_structure() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0); 4]);
        let j = structure_from_complex_matrix(&a).unwrap();
        assert!((j - j_standard(2)).norm() < 1e-14);
    }

    #[test]
    fn structure_round_trip() {
        let a = DMatrix::from_row_slice(1, 1, &[c(0.6, 0.0)]);
        let j = structure_from_complex_matrix(&a).unwrap();
        // J² = −I
        let defect = (&j * &j + DMatrix::<f64>::identity(2, 2)).norm();
        assert!(defect < 1e-12);
        assert_abs_diff_eq!(j[(0, 1)], -4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(j[(1, 0)], 0.25, epsilon = 1e-12);
        let a2 = complex_matrix_from_structure_matrix(&j, 1e-10).unwrap();
        assert!((a2[(0, 0)] - c(0.6, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_round_trips() {
        // structure_from ∘ complex_matrix_from = id within 1e−10
        let samples = [
            DMatrix::from_row_slice(1, 1, &[c(0.3, -0.5)]),
            DMatrix::from_row_slice(1, 1, &[c(-0.7, 0.2)]),
            DMatrix::from_row_slice(
                2,
                2,
                &[c(0.2, 0.1), c(-0.3, 0.05), c(0.0, -0.4), c(0.25, 0.25)],
            ),
        ];
        for a in &samples {
            let j = structure_from_complex_matrix(a).unwrap();
            let back = complex_matrix_from_structure_matrix(&j, 1e-10).unwrap();
            assert!((a - back).norm() < 1e-10);
        }
    }

    #[test]
    fn norm_too_large_is_rejected() {
        let a = DMatrix::from_row_slice(1, 1, &[c(1.2, 0.0)]);
        match structure_from_complex_matrix(&a) {
            Err(GeometryError::NormTooLarge { norm }) => assert!((norm - 1.2).abs() < 1e-12),
            other => panic!("expected NormTooLarge, got {:?}", other),
        }
    }

    #[test]
    fn transform_by_identity_is_identity() {
        let n = 1;
        let entries = PolyMatrix::from_entries(1, 1, vec![CPoly::var_zb(n, 0)]);
        let a = ComplexMatrixField::new(n, entries, 1.0, true).unwrap();
        let phi = PolyDiffeo::identity(n, 4);
        let pt = vec![c(0.2, 0.1)];
        let out = transform_complex_matrix(&a, &phi, &pt).unwrap();
        assert!((out[(0, 0)] - a.eval(&pt)[(0, 0)]).norm() < 1e-12);
    }

    #[test]
    fn transform_by_complex_linear_matches_formula_and_pushforward() {
        // Under z' = Pz the matrix becomes P·A(P⁻¹z')·conj(P)⁻¹.
        let n = 1;
        let p = DMatrix::from_row_slice(1, 1, &[c(2.0, 1.0)]);
        let entries = PolyMatrix::from_entries(1, 1, vec![CPoly::var_zb(n, 0)]);
        let a = ComplexMatrixField::new(n, entries, 10.0, true).unwrap();
        let phi = PolyDiffeo::complex_linear(&p, 6).unwrap();
        let zp = vec![c(0.15, -0.1)];
        let out = transform_complex_matrix(&a, &phi, &zp).unwrap();
        let pinv = p[(0, 0)].inv();
        let expected = p[(0, 0)] * (pinv * zp[0]).conj() * p[(0, 0)].conj().inv();
        assert!((out[(0, 0)] - expected).norm() < 1e-11);

        // and cross-check against the structure pushforward: push J forward
        // by dΦ and re-extract A' at z'.
        let z = phi.invert_point(&zp, 1e-13, 30).unwrap();
        let j_old = structure_from_complex_matrix(&a.eval(&z)).unwrap();
        let d = phi.real_differential(&z);
        let d_inv = d.clone().try_inverse().unwrap();
        let j_new = &d * j_old * d_inv;
        let a_check = complex_matrix_from_structure_matrix(&j_new, 1e-9).unwrap();
        assert!((out[(0, 0)] - a_check[(0, 0)]).norm() < 1e-9);
    }

    #[test]
    fn holomorphic_change_preserves_integrability() {
        // A ≡ 0 stays 0 under any holomorphic polynomial diffeo.
        let n = 1;
        let a = ComplexMatrixField::standard(n, 1.0);
        let comps = vec![CPoly::var_z(n, 0).add(
            &CPoly::var_z(n, 0).mul(&CPoly::var_z(n, 0)).scale(c(0.3, -0.2)),
        )];
        let phi = PolyDiffeo::new(comps, 5).unwrap();
        let pushed = pushforward_field(&a, &phi, 5).unwrap();
        assert!(pushed.entries().max_coeff_norm() < 1e-13);
        let out = transform_complex_matrix(&a, &phi, &[c(0.1, 0.05)]).unwrap();
        assert!(out.norm() < 1e-12);
    }

    #[test]
    fn pushforward_is_functorial() {
        // transforming by Φ then Ψ equals transforming by Ψ∘Φ, up to the
        // truncation order on a small chart.
        let n = 1;
        let cap = 6;
        let entries = PolyMatrix::from_entries(
            1,
            1,
            vec![CPoly::var_zb(n, 0).scale(c(0.4, 0.0)).add(
                &CPoly::var_z(n, 0).mul(&CPoly::var_zb(n, 0)).scale(c(0.2, 0.1)),
            )],
        );
        let a = ComplexMatrixField::new(n, entries, 1.0, true).unwrap();
        let phi = PolyDiffeo::new(
            vec![CPoly::var_z(n, 0).add(&CPoly::var_z(n, 0).mul(&CPoly::var_zb(n, 0)).scale(c(0.5, 0.0)))],
            cap,
        )
        .unwrap();
        let psi = PolyDiffeo::new(
            vec![CPoly::var_z(n, 0).add(&CPoly::var_zb(n, 0).mul(&CPoly::var_zb(n, 0)).scale(c(-0.3, 0.2)))],
            cap,
        )
        .unwrap();
        let step1 = pushforward_field(&a, &phi, cap).unwrap();
        let step2 = pushforward_field(&step1, &psi, cap).unwrap();
        let combined = pushforward_field(&a, &psi.compose(&phi).unwrap(), cap).unwrap();
        // compare on a small chart where truncation error is tiny
        for &(x, y) in &[(0.02, 0.01), (-0.015, 0.02), (0.01, -0.02)] {
            let pt = vec![c(x, y)];
            let d = (step2.eval(&pt) - combined.eval(&pt)).norm();
            assert!(d < 1e-7, "functoriality defect {d}");
        }
    }

    #[test]
    fn normalize_kills_z_linear_jet() {
        // A(z) = z → Φ(z) = z − z z̄ and the z-jet of the new field vanishes.
        let n = 1;
        let entries = PolyMatrix::from_entries(1, 1, vec![CPoly::var_z(n, 0)]);
        let a = ComplexMatrixField::new(n, entries, 0.9, false).unwrap();
        let (phi, a_new) = normalize_structure(&a, 5).unwrap();
        // Φ has the components z − z z̄
        let expected = CPoly::var_z(n, 0).sub(&CPoly::var_z(n, 0).mul(&CPoly::var_zb(n, 0)));
        let diff = phi.components()[0].sub(&expected);
        assert!(diff.max_coeff_norm() < 1e-13);
        assert!(phi.linear_part_is_identity(1e-13));
        let residual = z_jet_residual(&a_new, 1e-5);
        assert!(residual < 1e-8, "z-jet residual {residual}");
        assert!(a_new.entries().constant_part().norm() < 1e-12);
    }

    #[test]
    fn normalize_of_integrable_field_is_identity() {
        let a = ComplexMatrixField::standard(1, 1.0);
        let (phi, a_new) = normalize_structure(&a, 4).unwrap();
        let id = PolyDiffeo::identity(1, 4);
        assert!(phi.components()[0].sub(&id.components()[0]).max_coeff_norm() < 1e-14);
        assert!(a_new.entries().max_coeff_norm() < 1e-14);
    }

    #[test]
    fn normalize_cannot_remove_antiholomorphic_jet() {
        // A(z) = z̄ needs no correction and keeps its z̄-linear part.
        let n = 1;
        let entries = PolyMatrix::from_entries(1, 1, vec![CPoly::var_zb(n, 0)]);
        let a = ComplexMatrixField::new(n, entries, 0.9, true).unwrap();
        let (phi, a_new) = normalize_structure(&a, 5).unwrap();
        let id = PolyDiffeo::identity(n, 5);
        let diff = phi.components()[0].sub(&id.components()[0]);
        assert!(diff.max_coeff_norm() < 1e-13);
        let zb_coeff = a_new.entries().get(0, 0).coeff_zb_linear(0);
        assert!((zb_coeff - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn normalize_requires_centered_field() {
        let n = 1;
        let entries = PolyMatrix::from_entries(1, 1, vec![CPoly::constant(n, c(0.5, 0.0))]);
        let a = ComplexMatrixField::new(n, entries, 1.0, false).unwrap();
        assert!(matches!(
            normalize_structure(&a, 4),
            Err(GeometryError::NotCentered { .. })
        ));
    }

    #[test]
    fn normalization_on_random_quadratic_fields() {
        // three random degree-2 inputs; residual below 1e−8 each
        let n = 2;
        let coeffs = [
            [0.31, -0.12, 0.05, 0.2, -0.07, 0.11],
            [-0.21, 0.17, 0.09, -0.14, 0.25, 0.03],
            [0.11, 0.23, -0.19, 0.08, -0.05, 0.16],
        ];
        for cs in &coeffs {
            let mut entries = Vec::new();
            for j in 0..n {
                for l in 0..n {
                    // generic z-linear + z̄-linear + one quadratic term
                    let p = CPoly::var_z(n, 0)
                        .scale(c(cs[0] * (j as f64 + 1.0), cs[1]))
                        .add(&CPoly::var_z(n, 1).scale(c(cs[2], cs[3] * (l as f64 + 1.0))))
                        .add(&CPoly::var_zb(n, 0).scale(c(cs[4], cs[5])))
                        .add(
                            &CPoly::var_z(n, 0)
                                .mul(&CPoly::var_zb(n, 1))
                                .scale(c(cs[5], -cs[2])),
                        );
                    entries.push(p);
                }
            }
            let a = ComplexMatrixField::new(
                n,
                PolyMatrix::from_entries(n, n, entries),
                0.5,
                false,
            )
            .unwrap();
            let (_, a_new) = normalize_structure(&a, 5).unwrap();
            let residual = z_jet_residual(&a_new, 1e-5);
            assert!(residual < 1e-8, "z-jet residual {residual}");
        }
    }

    #[test]
    fn dilation_examples() {
        let n = 1;
        // A(z) = z̄²
        let entries = PolyMatrix::from_entries(
            1,
            1,
            vec![CPoly::var_zb(n, 0).mul(&CPoly::var_zb(n, 0))],
        );
        let a = ComplexMatrixField::new(n, entries, 1.0, true).unwrap();
        // λ = 1 is the identity dilation
        let a1 = dilate_structure(&a, 1.0);
        let pt = vec![c(0.7, -0.3)];
        assert!((a1.eval(&pt)[(0, 0)] - a.eval(&pt)[(0, 0)]).norm() < 1e-15);
        // λ = 0.1: A_λ(z) = 0.01 z̄², sup over the unit disc = 0.01
        let a01 = dilate_structure(&a, 0.1);
        let mut sup: f64 = 0.0;
        for k in 0..64 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let z = vec![C64::from_polar(1.0, th)];
            sup = sup.max(a01.eval(&z)[(0, 0)].norm());
        }
        assert_abs_diff_eq!(sup, 0.01, epsilon = 1e-12);
        // λ = 0 collapses a normalized field to zero
        let a0 = dilate_structure(&a, 0.0);
        assert!(a0.eval(&pt).norm() < 1e-15);
    }

    #[test]
    fn dilation_sup_norm_scales_linearly() {
        // ratio test at λ ∈ {0.1, 0.05, 0.025} for a field with nonzero z̄-jet
        let n = 1;
        let entries = PolyMatrix::from_entries(
            1,
            1,
            vec![CPoly::var_zb(n, 0).add(&CPoly::var_zb(n, 0).mul(&CPoly::var_zb(n, 0)))],
        );
        let a = ComplexMatrixField::new(n, entries, 4.0, true).unwrap();
        let sup_at = |lam: f64| {
            let al = dilate_structure(&a, lam);
            let mut sup: f64 = 0.0;
            for i in 0..24 {
                for k in 0..24 {
                    let z = vec![c(
                        -1.0 + 2.0 * i as f64 / 23.0,
                        -1.0 + 2.0 * k as f64 / 23.0,
                    )];
                    sup = sup.max(al.eval(&z).norm());
                }
            }
            sup
        };
        let s1 = sup_at(0.1);
        let s2 = sup_at(0.05);
        let s3 = sup_at(0.025);
        let r1 = s2 / s1;
        let r2 = s3 / s2;
        assert!((0.4..=0.6).contains(&r1), "ratio {r1}");
        assert!((0.4..=0.6).contains(&r2), "ratio {r2}");
    }

    #[test]
    fn flatten_flat_edge_is_identity() {
        let n = 1;
        let wedge = WedgeSpec::flat(n, 0.3);
        let a = ComplexMatrixField::standard(n, 1.0);
        let out = flatten_edge(&wedge, &a, &FlattenOptions::default()).unwrap();
        let pt = vec![c(0.01, -0.03)];
        let img = out.diffeo.eval(&pt);
        assert!((img[0] - pt[0]).norm() < 1e-12);
        assert!(out.edge_flatness < 1e-10);
        assert!(out.structure.entries().max_coeff_norm() < 1e-12);
    }

    #[test]
    fn flatten_parabolic_edge() {
        // ρ = x + y², A ≡ 0, τ = 0, C = 1: sampled edge points land on iℝ.
        let n = 1;
        let x = CPoly::var_z(n, 0).add(&CPoly::var_zb(n, 0)).scale(c(0.5, 0.0));
        let y = CPoly::var_z(n, 0)
            .sub(&CPoly::var_zb(n, 0))
            .scale(c(0.0, -0.5));
        let rho = x.add(&y.mul(&y));
        let wedge = WedgeSpec::new(n, vec![rho], 0.0, 1.0, 0.3).unwrap();
        let a = ComplexMatrixField::standard(n, 1.0);
        let out = flatten_edge(&wedge, &a, &FlattenOptions::default()).unwrap();
        assert!(
            out.edge_flatness < 1e-10,
            "edge flatness {}",
            out.edge_flatness
        );
        // with C = 1 > 0 the flattened x_1 must be strictly psh near 0
        assert!(out.psh_margins[0] > 0.0);
    }

    #[test]
    fn truncated_wedge_is_contained_in_wedge() {
        // n = 2, ρ_j = x_j, τ = 0.1, C = 1: {ρ̃ < 0} ⊂ {x < 0} by rejection sampling.
        let n = 2;
        let mk_x = |j: usize| {
            CPoly::var_z(n, j)
                .add(&CPoly::var_zb(n, j))
                .scale(c(0.5, 0.0))
        };
        let wedge = WedgeSpec::new(n, vec![mk_x(0), mk_x(1)], 0.1, 1.0, 0.3).unwrap();
        let rho_tilde = wedge.rho_tilde();
        // spot-check the formula: ρ̃₁ = x₁ − 0.1 x₂ + (x₁² + x₂²)
        let pt = vec![c(0.03, 0.7), c(-0.02, -0.4)];
        let x1 = 0.03;
        let x2 = -0.02;
        let expected = x1 - 0.1 * x2 + (x1 * x1 + x2 * x2);
        assert_abs_diff_eq!(rho_tilde[0].eval(&pt).re, expected, epsilon = 1e-14);

        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut kept = 0usize;
        while kept < 1000 {
            let p = vec![
                c(next() * 2.0 - 1.0, next() * 2.0 - 1.0),
                c(next() * 2.0 - 1.0, next() * 2.0 - 1.0),
            ];
            let inside = rho_tilde.iter().all(|r| r.eval(&p).re < 0.0);
            if !inside {
                continue;
            }
            kept += 1;
            assert!(p[0].re < 0.0 && p[1].re < 0.0, "containment fails at {:?}", p);
        }
    }

    #[test]
    fn degenerate_gradient_is_rejected() {
        // ρ = x² has vanishing gradient at 0
        let n = 1;
        let x = CPoly::var_z(n, 0).add(&CPoly::var_zb(n, 0)).scale(c(0.5, 0.0));
        let wedge = WedgeSpec::new(n, vec![x.mul(&x)], 0.0, 1.0, 0.3).unwrap();
        let a = ComplexMatrixField::standard(n, 1.0);
        assert!(matches!(
            flatten_edge(&wedge, &a, &FlattenOptions::default()),
            Err(GeometryError::DegenerateGradient { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_contractive_matrix(n: usize) -> impl Strategy<Value = DMatrix<C64>> {
            proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
                let raw = DMatrix::from_fn(n, n, |i, j| {
                    let (re, im) = v[i * n + j];
                    C64::new(re, im)
                });
                // scale inside the contraction region
                let norm = crate::linalg::complex_operator_norm(&raw).max(1e-9);
                raw * C64::new(0.8 / norm.max(1.0), 0.0)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn round_trip_structure_and_matrix(a in arb_contractive_matrix(2)) {
                let j = structure_from_complex_matrix(&a).unwrap();
                // the rebuilt structure squares to -I
                let defect = (&j * &j + DMatrix::<f64>::identity(4, 4)).norm();
                prop_assert!(defect < 1e-10);
                let back = complex_matrix_from_structure_matrix(&j, 1e-8).unwrap();
                prop_assert!((&a - back).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn poly_diffeo_inverse_round_trip() {
        let n = 2;
        let comps = vec![
            CPoly::var_z(n, 0).add(&CPoly::var_z(n, 1).mul(&CPoly::var_zb(n, 0)).scale(c(0.7, 0.2))),
            CPoly::var_z(n, 1).add(&CPoly::var_z(n, 0).mul(&CPoly::var_z(n, 0)).scale(c(-0.4, 0.5))),
        ];
        let phi = PolyDiffeo::new(comps, 8).unwrap();
        let w = vec![c(0.03, -0.01), c(0.02, 0.04)];
        let z = phi.invert_point(&w, 1e-14, 50).unwrap();
        let back = phi.eval(&z);
        assert!((back[0] - w[0]).norm() < 1e-13);
        assert!((back[1] - w[1]).norm() < 1e-13);
        // the truncated polynomial inverse is accurate to truncation order
        let approx = phi.eval_inverse_poly(&w);
        assert!((approx[0] - z[0]).norm() < 1e-9);
        assert!((approx[1] - z[1]).norm() < 1e-9);
    }
}
