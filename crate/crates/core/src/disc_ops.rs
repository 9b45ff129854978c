//! Function spaces on the closed unit disc and the boundary/solid integral
//! operators acting on them.
//!
//! Boundary operators (`P₀`, Cauchy transform `K`, Schwarz integral `S`) act
//! through discrete Fourier coefficients, which keeps them accurate up to the
//! boundary. The Cauchy-Green transform `T` (the solid operator with
//! `∂̄(Tf) = f`, holomorphic outside the closed disc) has two evaluation
//! paths:
//!
//! * a pointwise path using singularity subtraction against the closed form
//!   `T1 = ζ̄` on the disc and `T1 = 1/ζ` outside;
//! * a grid path ([`CauchyGreenPlan`]) that solves the first-order modal ODEs
//!   `û_k' − (k/r) û_k = 2 f̂_{k+1}` by radial collocation, producing fields
//!   smooth enough to differentiate spectrally. The same modal data yields the
//!   exterior Laurent coefficients, hence the reflected field
//!   `ζ ↦ conj(Tf(1/ζ̄))` with no near-singular quadrature.

use crate::grid::DiscGrid;
use crate::poly::C64;
use nalgebra::linalg::LU;
use nalgebra::DVector;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscOpsError {
    #[error("boundary data must be real (max |Im| = {0:.3e})")]
    NonRealInput(f64),
    #[error("target point |ζ| = {0:.6} is too close to the boundary for direct quadrature")]
    TooCloseToBoundary(f64),
    #[error("function values must be finite")]
    NonFinite,
}

/// Average of boundary values over the circle; spectrally exact for
/// trigonometric polynomials.
pub fn mean_p0(values: &[C64]) -> C64 {
    let n = values.len() as f64;
    values.iter().sum::<C64>() / n
}

// ---------------------------------------------------------------------------
// Disc functions
// ---------------------------------------------------------------------------

/// Complex scalar field sampled on a [`DiscGrid`], stored ring-major.
#[derive(Clone, Debug)]
pub struct DiscFunction {
    grid: Arc<DiscGrid>,
    values: Vec<C64>,
}

impl DiscFunction {
    pub fn from_values(grid: Arc<DiscGrid>, values: Vec<C64>) -> Result<Self, DiscOpsError> {
        assert_eq!(values.len(), grid.n_nodes());
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(DiscOpsError::NonFinite);
        }
        Ok(DiscFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<DiscGrid>, f: impl Fn(C64) -> C64) -> Self {
        let mut values = Vec::with_capacity(grid.n_nodes());
        for ring in 0..grid.n_rings() {
            for k in 0..grid.n_theta() {
                values.push(f(grid.node_point(ring, k)));
            }
        }
        DiscFunction { grid, values }
    }

    pub fn zero(grid: Arc<DiscGrid>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.n_nodes()];
        DiscFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, ring: usize, k: usize) -> C64 {
        self.values[self.grid.node_index(ring, k)]
    }

    pub fn ring(&self, ring: usize) -> &[C64] {
        let n = self.grid.n_theta();
        &self.values[ring * n..(ring + 1) * n]
    }

    pub fn boundary_trace(&self) -> &[C64] {
        self.ring(self.grid.boundary_ring())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &DiscFunction) -> DiscFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        DiscFunction { grid: self.grid.clone(), values }
    }

    pub fn sub(&self, other: &DiscFunction) -> DiscFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        DiscFunction { grid: self.grid.clone(), values }
    }

    pub fn scale(&self, s: C64) -> DiscFunction {
        DiscFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> DiscFunction {
        DiscFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Angular Fourier coefficients per ring: `out[ring][mode_index]`.
    pub fn ring_modes(&self) -> Vec<Vec<C64>> {
        (0..self.grid.n_rings())
            .map(|ring| self.grid.ring_to_modes(self.ring(ring)))
            .collect()
    }

    /// Value at the disc center: radial extrapolation of the angular mean.
    pub fn center_value(&self) -> C64 {
        let means: Vec<C64> = (0..self.grid.n_rings())
            .map(|ring| mean_p0(self.ring(ring)))
            .collect();
        self.grid.radial_interpolate(&means, 0.0)
    }

    /// Spectral interpolation at an arbitrary point of the closed disc:
    /// Fourier in the angle, barycentric polynomial in the radius.
    pub fn eval_at(&self, zeta: C64) -> C64 {
        let r = zeta.norm();
        let theta = zeta.arg();
        let modes = self.ring_modes();
        let n = self.grid.n_theta();
        let mut acc = C64::new(0.0, 0.0);
        let mut radial = vec![C64::new(0.0, 0.0); self.grid.n_rings()];
        for idx in 0..n {
            let m = self.grid.mode_number(idx);
            for ring in 0..self.grid.n_rings() {
                radial[ring] = modes[ring][idx];
            }
            let cm = self.grid.radial_interpolate(&radial, r);
            acc += cm * C64::from_polar(1.0, m as f64 * theta);
        }
        acc
    }

    /// Polar Wirtinger derivatives `(f_ζ, f_ζ̄)`:
    /// `f_ζ = e^{−iθ}(f_r − (i/r) f_θ)/2`, `f_ζ̄ = e^{iθ}(f_r + (i/r) f_θ)/2`,
    /// with `f_θ` by Fourier differentiation and `f_r` by barycentric
    /// collocation across the rings.
    pub fn wirtinger(&self) -> (DiscFunction, DiscFunction) {
        let g = &self.grid;
        let n_t = g.n_theta();
        let n_rings = g.n_rings();
        // angular derivative ring by ring
        let mut f_theta = vec![C64::new(0.0, 0.0); self.values.len()];
        for ring in 0..n_rings {
            let mut modes = g.ring_to_modes(self.ring(ring));
            for (idx, c) in modes.iter_mut().enumerate() {
                let m = g.mode_number(idx);
                // zero the unpaired Nyquist mode for the odd-order derivative
                if idx == n_t / 2 {
                    *c = C64::new(0.0, 0.0);
                } else {
                    *c *= C64::new(0.0, m as f64);
                }
            }
            let d = g.modes_to_ring(&modes);
            f_theta[ring * n_t..(ring + 1) * n_t].copy_from_slice(&d);
        }
        // radial derivative column by column
        let d = g.radial_diff();
        let mut f_r = vec![C64::new(0.0, 0.0); self.values.len()];
        for k in 0..n_t {
            for i in 0..n_rings {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..n_rings {
                    acc += self.values[j * n_t + k] * d[(i, j)];
                }
                f_r[i * n_t + k] = acc;
            }
        }
        let mut dz = vec![C64::new(0.0, 0.0); self.values.len()];
        let mut dzb = vec![C64::new(0.0, 0.0); self.values.len()];
        for ring in 0..n_rings {
            let r = g.radius(ring);
            for k in 0..n_t {
                let idx = ring * n_t + k;
                let e_neg = C64::from_polar(1.0, -g.theta(k));
                let ft_over_r = f_theta[idx] / r;
                let i_unit = C64::new(0.0, 1.0);
                dz[idx] = e_neg * (f_r[idx] - i_unit * ft_over_r) * 0.5;
                dzb[idx] = e_neg.conj() * (f_r[idx] + i_unit * ft_over_r) * 0.5;
            }
        }
        (
            DiscFunction { grid: g.clone(), values: dz },
            DiscFunction { grid: g.clone(), values: dzb },
        )
    }
}

/// Wirtinger derivatives as a free function.
pub fn wirtinger_derivatives(f: &DiscFunction) -> (DiscFunction, DiscFunction) {
    f.wirtinger()
}

// ---------------------------------------------------------------------------
// Boundary operators through Fourier coefficients
// ---------------------------------------------------------------------------

fn check_real(values: &[C64]) -> Result<(), DiscOpsError> {
    let worst = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(DiscOpsError::NonRealInput(worst));
    }
    Ok(())
}

/// Cauchy transform by the Fourier-coefficient rule `e^{imθ} ↦ ζ^m` for
/// `m ≥ 0` and `↦ 0` for `m < 0`; valid on the whole closed disc.
pub fn cauchy_transform(grid: &DiscGrid, boundary_values: &[C64], zeta: C64) -> C64 {
    let modes = grid.ring_to_modes(boundary_values);
    let n = grid.n_theta();
    let mut acc = C64::new(0.0, 0.0);
    let mut zp = C64::new(1.0, 0.0);
    for m in 0..n / 2 {
        acc += modes[m] * zp;
        zp *= zeta;
    }
    acc
}

/// Cauchy transform by direct boundary quadrature; loses accuracy near the
/// boundary, hence the margin guard.
pub fn cauchy_transform_quadrature(
    grid: &DiscGrid,
    boundary_values: &[C64],
    zeta: C64,
    margin: f64,
) -> Result<C64, DiscOpsError> {
    if zeta.norm() > 1.0 - margin {
        return Err(DiscOpsError::TooCloseToBoundary(zeta.norm()));
    }
    let n = grid.n_theta();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let omega = C64::from_polar(1.0, grid.theta(k));
        acc += boundary_values[k] * omega / (omega - zeta);
    }
    Ok(acc / n as f64)
}

/// Holomorphic Schwarz extension of real boundary data, as the coefficient
/// list of `Σ d_m ζ^m`.
///
/// `S = 2K − P₀`; the trace of `Re Sφ` reproduces φ exactly at the grid
/// angles and `Im Sφ(0) = 0`.
#[derive(Clone, Debug)]
pub struct SchwarzCoeffs {
    coeffs: Vec<C64>,
}

impl SchwarzCoeffs {
    pub fn new(grid: &DiscGrid, phi: &[C64]) -> Result<Self, DiscOpsError> {
        check_real(phi)?;
        let modes = grid.ring_to_modes(phi);
        let n = grid.n_theta();
        let mut coeffs = vec![C64::new(0.0, 0.0); n / 2 + 1];
        coeffs[0] = C64::new(modes[0].re, 0.0);
        for m in 1..n / 2 {
            coeffs[m] = modes[m] * 2.0;
        }
        // the unpaired cosine mode at the Nyquist frequency
        coeffs[n / 2] = C64::new(modes[n / 2].re, 0.0);
        Ok(SchwarzCoeffs { coeffs })
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut zp = C64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += c * zp;
            zp *= zeta;
        }
        acc
    }

    /// Value at the origin, `P₀φ`, exactly real.
    pub fn at_origin(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn field_on(&self, grid: &Arc<DiscGrid>) -> DiscFunction {
        let n = grid.n_theta();
        let mut values = vec![C64::new(0.0, 0.0); grid.n_nodes()];
        for ring in 0..grid.n_rings() {
            let r = grid.radius(ring);
            let mut modes = vec![C64::new(0.0, 0.0); n];
            let mut rp = 1.0;
            for (m, c) in self.coeffs.iter().enumerate() {
                modes[m % n] += c * rp;
                rp *= r;
            }
            let ring_vals = grid.modes_to_ring(&modes);
            values[ring * n..(ring + 1) * n].copy_from_slice(&ring_vals);
        }
        DiscFunction {
            grid: grid.clone(),
            values,
        }
    }

    /// `(Sφ)'` sampled on the grid, from the exact coefficient rule
    /// `Σ m d_m ζ^{m−1}`.
    pub fn derivative_field_on(&self, grid: &Arc<DiscGrid>) -> DiscFunction {
        let n = grid.n_theta();
        let mut values = vec![C64::new(0.0, 0.0); grid.n_nodes()];
        for ring in 0..grid.n_rings() {
            let r = grid.radius(ring);
            let mut modes = vec![C64::new(0.0, 0.0); n];
            let mut rp = 1.0;
            for (m, c) in self.coeffs.iter().enumerate().skip(1) {
                modes[(m - 1) % n] += c * (m as f64) * rp;
                rp *= r;
            }
            let ring_vals = grid.modes_to_ring(&modes);
            values[ring * n..(ring + 1) * n].copy_from_slice(&ring_vals);
        }
        DiscFunction {
            grid: grid.clone(),
            values,
        }
    }
}

/// Schwarz integral of real boundary data at one point of the closed disc.
pub fn schwarz_transform(grid: &DiscGrid, phi: &[C64], zeta: C64) -> Result<C64, DiscOpsError> {
    Ok(SchwarzCoeffs::new(grid, phi)?.eval(zeta))
}

// ---------------------------------------------------------------------------
// Cauchy-Green transform: pointwise path
// ---------------------------------------------------------------------------

/// `T1` on the closed disc.
pub fn t_of_one_interior(zeta: C64) -> C64 {
    zeta.conj()
}

/// `T1` outside the closed disc.
pub fn t_of_one_exterior(zeta: C64) -> C64 {
    zeta.inv()
}

/// `T(ω̄)` on the closed disc.
pub fn t_of_conj_interior(zeta: C64) -> C64 {
    zeta.conj() * zeta.conj() * 0.5
}

/// `T(ω̄)` outside the closed disc.
pub fn t_of_conj_exterior(zeta: C64) -> C64 {
    0.5 / (zeta * zeta)
}

/// Pointwise Cauchy-Green transform by singularity subtraction against the
/// closed forms `T1` and `T(ω̄)`:
///
/// ```text
/// Tf(ζ) = f(b)·T1(ζ) + f_ζ̄(b)·T(ω̄ − b̄)(ζ) + T[f − f(b) − f_ζ̄(b)(ω̄ − b̄)](ζ)
/// ```
///
/// with base point `b = ζ` on the closed disc and the radial boundary
/// projection `b = ζ/|ζ|` for exterior targets. The remaining integrand is
/// continuous at the base point, so the plain grid quadrature applies.
pub fn cauchy_green_transform(f: &DiscFunction, zeta: C64) -> C64 {
    let grid = f.grid();
    let r = zeta.norm();
    let interior = r <= 1.0;
    let base = if interior {
        zeta
    } else {
        C64::from_polar(1.0, zeta.arg())
    };
    let c0 = f.eval_at(base);
    let (f_z, f_zb) = f.wirtinger();
    let c1 = f_zb.eval_at(base);
    // the subtracted integrand extends continuously over the base point
    let at_base = f_z.eval_at(base);
    let (t1, t_conj) = if interior {
        (t_of_one_interior(zeta), t_of_conj_interior(zeta))
    } else {
        (t_of_one_exterior(zeta), t_of_conj_exterior(zeta))
    };
    let mut acc = C64::new(0.0, 0.0);
    for ring in 0..grid.n_rings() {
        let w = grid.area_weight(ring);
        if w == 0.0 {
            continue;
        }
        for k in 0..grid.n_theta() {
            let omega = grid.node_point(ring, k);
            let d = omega - zeta;
            let local = if d.norm() < 1e-13 {
                at_base
            } else {
                (f.value(ring, k) - c0 - c1 * (omega.conj() - base.conj())) / d
            };
            acc += local * w;
        }
    }
    c0 * t1 + c1 * (t_conj - base.conj() * t1) - acc / PI
}

/// Pointwise Green-Schwarz reconstruction at one target of the closed disc,
/// entirely through the subtraction-quadrature path.
pub fn green_schwarz_reconstruct_at(f: &DiscFunction, zeta: C64) -> Result<C64, DiscOpsError> {
    let grid = f.grid();
    let trace = f.boundary_trace();
    let phi: Vec<C64> = trace.iter().map(|v| C64::new(v.re, 0.0)).collect();
    let psi: Vec<C64> = trace.iter().map(|v| C64::new(v.im, 0.0)).collect();
    let s = SchwarzCoeffs::new(grid, &phi)?.eval(zeta);
    let ip0psi = C64::new(0.0, 1.0) * mean_p0(&psi);
    let (_, f_zb) = f.wirtinger();
    let t_in = cauchy_green_transform(&f_zb, zeta);
    let refl = if zeta.norm() > 0.0 {
        cauchy_green_transform(&f_zb, zeta.conj().inv()).conj()
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(s + ip0psi + t_in - refl)
}

// ---------------------------------------------------------------------------
// Cauchy-Green transform: grid path (modal collocation)
// ---------------------------------------------------------------------------

/// Factorized modal solvers for applying `T` to whole grid functions.
///
/// For each output angular mode `k`, the radial profile solves
/// `û_k' − (k/r) û_k = 2 f̂_{k+1}` on the collocation rings; modes `k ≥ 0`
/// carry the boundary condition `û_k(1) = 0` (no holomorphic content in `T`),
/// modes `k < 0` are determined by regularity alone. The boundary values of
/// the negative modes are the exterior Laurent coefficients
/// `a_j = û_{−j}(1)`, giving `Tf(ζ') = Σ a_j ζ'^{−j}` outside and the
/// reflected field `conj(Tf(1/ζ̄)) = Σ conj(a_j) ζ^j` on the disc.
pub struct CauchyGreenPlan {
    grid: Arc<DiscGrid>,
    solvers: Vec<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

/// Output of one plan application.
pub struct CauchyGreenFields {
    /// `Tf` on the grid.
    pub interior: DiscFunction,
    /// `ζ ↦ conj(Tf(1/ζ̄))` on the grid (holomorphic by construction).
    pub reflected: DiscFunction,
    /// `(Tf)_ζ` assembled mode by mode from the radial solves; exact for the
    /// modal representation (the lone out-of-band derivative mode is dropped).
    pub interior_dz: DiscFunction,
    /// Derivative of the reflected field, from the exact coefficient rule.
    pub reflected_dz: DiscFunction,
    /// Exterior Laurent coefficients `a_j`, `j = 1 …`, of `Tf(ζ') = Σ a_j ζ'^{−j}`.
    pub exterior_coeffs: Vec<C64>,
}

impl CauchyGreenPlan {
    pub fn new(grid: Arc<DiscGrid>) -> Self {
        let n_t = grid.n_theta();
        let n_rings = grid.n_rings();
        let d = grid.radial_diff().clone();
        let mut solvers = Vec::with_capacity(n_t);
        for idx in 0..n_t {
            let k = grid.mode_number(idx);
            let mut l = d.clone();
            for i in 0..n_rings {
                l[(i, i)] -= k as f64 / grid.radius(i);
            }
            if k >= 0 {
                let b = grid.boundary_ring();
                for j in 0..n_rings {
                    l[(b, j)] = 0.0;
                }
                l[(b, b)] = 1.0;
            }
            solvers.push(l.lu());
        }
        CauchyGreenPlan { grid, solvers }
    }

    pub fn grid(&self) -> &Arc<DiscGrid> {
        &self.grid
    }

    pub fn apply(&self, f: &DiscFunction) -> CauchyGreenFields {
        let g = &self.grid;
        let n_t = g.n_theta();
        let n_rings = g.n_rings();
        let in_modes = f.ring_modes();
        // mode-major output coefficients
        let mut out_modes = vec![vec![C64::new(0.0, 0.0); n_rings]; n_t];
        for out_idx in 0..n_t {
            let k = g.mode_number(out_idx);
            let m_in = k + 1;
            let half = (n_t / 2) as i64;
            // input Nyquist mode is unresolved and dropped; k = N/2 − 1 has no source
            if m_in >= half || m_in <= -half {
                continue;
            }
            let in_idx = g.mode_index(m_in);
            let mut rhs_re = DVector::zeros(n_rings);
            let mut rhs_im = DVector::zeros(n_rings);
            let mut nonzero = false;
            for ring in 0..n_rings {
                let v = in_modes[ring][in_idx] * 2.0;
                if v.norm() > 0.0 {
                    nonzero = true;
                }
                rhs_re[ring] = v.re;
                rhs_im[ring] = v.im;
            }
            if !nonzero {
                continue;
            }
            if k >= 0 {
                let b = g.boundary_ring();
                rhs_re[b] = 0.0;
                rhs_im[b] = 0.0;
            }
            let sol_re = self.solvers[out_idx].solve(&rhs_re).expect("modal solve");
            let sol_im = self.solvers[out_idx].solve(&rhs_im).expect("modal solve");
            for ring in 0..n_rings {
                out_modes[out_idx][ring] = C64::new(sol_re[ring], sol_im[ring]);
            }
        }
        // assemble Tf ring by ring
        let mut interior = vec![C64::new(0.0, 0.0); g.n_nodes()];
        let mut ring_buf = vec![C64::new(0.0, 0.0); n_t];
        for ring in 0..n_rings {
            for idx in 0..n_t {
                ring_buf[idx] = out_modes[idx][ring];
            }
            let vals = g.modes_to_ring(&ring_buf);
            interior[ring * n_t..(ring + 1) * n_t].copy_from_slice(&vals);
        }
        // (Tf)_ζ mode by mode: û_k e^{ikθ} contributes (û_k' + k û_k/r)/2 to
        // mode k − 1; the radial profiles are collocation polynomials, so the
        // differentiation matrix is exact on them
        let d = g.radial_diff();
        let mut deriv_modes = vec![vec![C64::new(0.0, 0.0); n_rings]; n_t];
        for idx in 0..n_t {
            let k = g.mode_number(idx);
            let target = k - 1;
            if target < -((n_t / 2) as i64) {
                continue;
            }
            let profile = &out_modes[idx];
            if profile.iter().all(|v| v.norm() == 0.0) {
                continue;
            }
            let t_idx = g.mode_index(target);
            for ring in 0..n_rings {
                let mut dr = C64::new(0.0, 0.0);
                for jj in 0..n_rings {
                    dr += profile[jj] * d[(ring, jj)];
                }
                deriv_modes[t_idx][ring] =
                    (dr + profile[ring] * (k as f64 / g.radius(ring))) * 0.5;
            }
        }
        let mut interior_dz = vec![C64::new(0.0, 0.0); g.n_nodes()];
        for ring in 0..n_rings {
            for idx in 0..n_t {
                ring_buf[idx] = deriv_modes[idx][ring];
            }
            let vals = g.modes_to_ring(&ring_buf);
            interior_dz[ring * n_t..(ring + 1) * n_t].copy_from_slice(&vals);
        }
        // exterior coefficients a_j = û_{−j}(1)
        let b = g.boundary_ring();
        let mut exterior_coeffs = Vec::with_capacity(n_t / 2);
        for j in 1..=n_t / 2 {
            let idx = g.mode_index(-(j as i64));
            exterior_coeffs.push(out_modes[idx][b]);
        }
        // reflected field: Σ_j conj(a_j) ζ^j; the top term lands on the
        // shared Nyquist slot, which agrees with it at the grid angles
        let mut reflected = vec![C64::new(0.0, 0.0); g.n_nodes()];
        for ring in 0..n_rings {
            let r = g.radius(ring);
            for c in ring_buf.iter_mut() {
                *c = C64::new(0.0, 0.0);
            }
            let mut rp = r;
            for (jm1, a) in exterior_coeffs.iter().enumerate() {
                let j = jm1 + 1;
                if j <= n_t / 2 {
                    ring_buf[j % n_t] = a.conj() * rp;
                }
                rp *= r;
            }
            let vals = g.modes_to_ring(&ring_buf);
            reflected[ring * n_t..(ring + 1) * n_t].copy_from_slice(&vals);
        }
        // derivative of the reflected field: Σ_j j conj(a_j) ζ^{j−1}
        let mut reflected_dz = vec![C64::new(0.0, 0.0); g.n_nodes()];
        for ring in 0..n_rings {
            let r = g.radius(ring);
            for c in ring_buf.iter_mut() {
                *c = C64::new(0.0, 0.0);
            }
            let mut rp = 1.0;
            for (jm1, a) in exterior_coeffs.iter().enumerate() {
                let j = jm1 + 1;
                if j <= n_t / 2 {
                    ring_buf[(j - 1) % n_t] = a.conj() * (j as f64) * rp;
                }
                rp *= r;
            }
            let vals = g.modes_to_ring(&ring_buf);
            reflected_dz[ring * n_t..(ring + 1) * n_t].copy_from_slice(&vals);
        }
        CauchyGreenFields {
            interior: DiscFunction { grid: g.clone(), values: interior },
            reflected: DiscFunction { grid: g.clone(), values: reflected },
            interior_dz: DiscFunction { grid: g.clone(), values: interior_dz },
            reflected_dz: DiscFunction { grid: g.clone(), values: reflected_dz },
            exterior_coeffs,
        }
    }
}

impl CauchyGreenFields {
    /// Evaluate `Tf` outside the closed disc from the Laurent coefficients.
    pub fn exterior_value(&self, zeta: C64) -> C64 {
        debug_assert!(zeta.norm() >= 1.0);
        let inv = zeta.inv();
        let mut acc = C64::new(0.0, 0.0);
        let mut p = inv;
        for a in &self.exterior_coeffs {
            acc += a * p;
            p *= inv;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Green-Schwarz reconstruction
// ---------------------------------------------------------------------------

/// Reconstruct `f` from its boundary data and `∂̄`-part:
/// `Sφ(ζ) + i P₀ψ + Tf_ζ̄(ζ) − conj(Tf_ζ̄(1/ζ̄))` with `φ = Re f`, `ψ = Im f`
/// on the boundary circle.
pub fn green_schwarz_reconstruct(
    f: &DiscFunction,
    plan: &CauchyGreenPlan,
) -> Result<DiscFunction, DiscOpsError> {
    let grid = f.grid().clone();
    let trace = f.boundary_trace();
    let phi: Vec<C64> = trace.iter().map(|v| C64::new(v.re, 0.0)).collect();
    let psi: Vec<C64> = trace.iter().map(|v| C64::new(v.im, 0.0)).collect();
    let schwarz = SchwarzCoeffs::new(&grid, &phi)?.field_on(&grid);
    let ip0psi = C64::new(0.0, 1.0) * mean_p0(&psi);
    let (_, f_zb) = f.wirtinger();
    let t = plan.apply(&f_zb);
    let out = schwarz
        .map(|v| v + ip0psi)
        .add(&t.interior)
        .sub(&t.reflected);
    Ok(out)
}

/// Max boundary residual of `Re[Tg(ζ) − conj(Tg(1/ζ̄))]` — analytically zero
/// on the unit circle.
pub fn boundary_symmetrization_residual(t: &CauchyGreenFields) -> f64 {
    t.interior
        .boundary_trace()
        .iter()
        .zip(t.reflected.boundary_trace())
        .map(|(a, b)| (a - b).re.abs())
        .fold(0.0, f64::max)
}

/// Largest magnitude over the strictly negative Fourier modes of a boundary
/// trace; a holomorphy defect indicator. The shared Nyquist slot carries no
/// sign information and is excluded.
pub fn negative_mode_content(grid: &DiscGrid, boundary_values: &[C64]) -> f64 {
    let modes = grid.ring_to_modes(boundary_values);
    let mut worst: f64 = 0.0;
    for idx in 0..grid.n_theta() {
        let m = grid.mode_number(idx);
        if m < 0 && idx != grid.n_theta() / 2 {
            worst = worst.max(modes[idx].norm());
        }
    }
    worst
}
