//! Discretization of the closed unit disc.
//!
//! Angles are equispaced (`θ_k = 2πk/n_θ`, `n_θ` a power of two) so that all
//! angular operations are discrete Fourier transforms. Radii are Gauss-
//! Legendre nodes mapped to `(0, 1)` — no node sits at the coordinate
//! singularity `r = 0` — plus the boundary circle as the outermost ring.
//! Radial differentiation and interpolation use barycentric polynomial
//! collocation on those nodes.

use crate::poly::C64;
use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Equispaced boundary angles.
#[derive(Clone, Debug)]
pub struct BoundaryGrid {
    n_theta: usize,
}

impl BoundaryGrid {
    pub fn new(n_theta: usize) -> Self {
        assert!(n_theta >= 16, "need at least 16 boundary nodes");
        assert!(n_theta.is_power_of_two(), "n_theta must be a power of two");
        BoundaryGrid { n_theta }
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_theta as f64
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_theta).map(|k| self.theta(k))
    }

    /// Indices of the closed upper semicircle `θ ∈ [0, π]`.
    pub fn upper_arc_indices(&self) -> impl Iterator<Item = usize> {
        0..=self.n_theta / 2
    }

    /// Indices of the open lower arc `θ ∈ (π, 2π)`.
    pub fn lower_arc_indices(&self) -> impl Iterator<Item = usize> {
        self.n_theta / 2 + 1..self.n_theta
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 2..=n {
        let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Polar grid on the closed disc: `n_r` interior Gauss-Legendre rings plus the
/// boundary ring, each carrying `n_theta` equispaced nodes.
pub struct DiscGrid {
    boundary: BoundaryGrid,
    n_r: usize,
    /// Ring radii, ascending; the last entry is exactly 1.
    radii: Vec<f64>,
    /// Area quadrature weight per ring (weight · r · 2π/n_θ); boundary ring 0.
    ring_area_weights: Vec<f64>,
    /// Plain Gauss-Legendre weights on [0, 1] for the interior rings.
    radial_weights: Vec<f64>,
    /// Barycentric weights over all rings (interior + boundary).
    bary: Vec<f64>,
    /// Radial differentiation matrix over all rings.
    radial_diff: DMatrix<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DiscGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscGrid")
            .field("n_r", &self.n_r)
            .field("n_theta", &self.boundary.n_theta)
            .finish()
    }
}

impl DiscGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Arc<Self> {
        assert!(n_r >= 4);
        let boundary = BoundaryGrid::new(n_theta);
        let (gl_nodes, gl_weights) = gauss_legendre(n_r);
        let mut radii: Vec<f64> = gl_nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let radial_weights: Vec<f64> = gl_weights.iter().map(|w| 0.5 * w).collect();
        radii.push(1.0);
        let ring_area_weights: Vec<f64> = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if i < n_r {
                    radial_weights[i] * r * 2.0 * PI / n_theta as f64
                } else {
                    0.0
                }
            })
            .collect();
        let bary = barycentric_weights(&radii);
        let radial_diff = differentiation_matrix(&radii, &bary);
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n_theta);
        let fft_inv = planner.plan_fft_inverse(n_theta);
        Arc::new(DiscGrid {
            boundary,
            n_r,
            radii,
            ring_area_weights,
            radial_weights,
            bary,
            radial_diff,
            fft_fwd,
            fft_inv,
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.boundary.n_theta()
    }

    /// Total number of rings including the boundary.
    pub fn n_rings(&self) -> usize {
        self.n_r + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.n_rings() * self.n_theta()
    }

    pub fn boundary(&self) -> &BoundaryGrid {
        &self.boundary
    }

    pub fn radius(&self, ring: usize) -> f64 {
        self.radii[ring]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn boundary_ring(&self) -> usize {
        self.n_r
    }

    pub fn theta(&self, k: usize) -> f64 {
        self.boundary.theta(k)
    }

    pub fn node_index(&self, ring: usize, k: usize) -> usize {
        ring * self.n_theta() + k
    }

    pub fn node_point(&self, ring: usize, k: usize) -> C64 {
        C64::from_polar(self.radii[ring], self.theta(k))
    }

    pub fn area_weight(&self, ring: usize) -> f64 {
        self.ring_area_weights[ring]
    }

    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    pub fn radial_diff(&self) -> &DMatrix<f64> {
        &self.radial_diff
    }

    /// Sum of all area weights; equals π up to rounding.
    pub fn total_area(&self) -> f64 {
        self.ring_area_weights
            .iter()
            .map(|w| w * self.n_theta() as f64)
            .sum()
    }

    /// Forward DFT of one ring: values ↦ coefficients `c_m = (1/N) Σ f_k e^{-imθ_k}`,
    /// stored with mode `m` at index `m mod N`.
    pub fn ring_to_modes(&self, ring_values: &[C64]) -> Vec<C64> {
        let n = self.n_theta();
        debug_assert_eq!(ring_values.len(), n);
        let mut buf = ring_values.to_vec();
        self.fft_fwd.process(&mut buf);
        let scale = 1.0 / n as f64;
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    /// Inverse of [`Self::ring_to_modes`].
    pub fn modes_to_ring(&self, modes: &[C64]) -> Vec<C64> {
        let mut buf = modes.to_vec();
        self.fft_inv.process(&mut buf);
        buf
    }

    /// Signed mode number for a coefficient index.
    pub fn mode_number(&self, idx: usize) -> i64 {
        let n = self.n_theta() as i64;
        let i = idx as i64;
        if i < n / 2 { i } else { i - n }
    }

    /// Coefficient index of a signed mode number.
    pub fn mode_index(&self, m: i64) -> usize {
        let n = self.n_theta() as i64;
        debug_assert!(m >= -n / 2 && m < n / 2);
        (m.rem_euclid(n)) as usize
    }

    /// Interpolate radial data (one value per ring) at radius `r` by the
    /// barycentric formula; exact at the nodes, polynomial elsewhere.
    pub fn radial_interpolate(&self, ring_values: &[C64], r: f64) -> C64 {
        debug_assert_eq!(ring_values.len(), self.n_rings());
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (i, &ri) in self.radii.iter().enumerate() {
            let d = r - ri;
            if d.abs() < 1e-300 {
                return ring_values[i];
            }
            let w = self.bary[i] / d;
            num += ring_values[i] * w;
            den += w;
        }
        num / den
    }
}

/// Scaled barycentric weights `w_i = 1/Π_{j≠i}(x_i − x_j)`, with the factors
/// rescaled to avoid underflow (only ratios of the weights matter).
fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let span = nodes[n - 1] - nodes[0];
    let scale = 4.0 / span;
    (0..n)
        .map(|i| {
            let mut w = 1.0;
            for j in 0..n {
                if j != i {
                    w *= (nodes[i] - nodes[j]) * scale;
                }
            }
            1.0 / w
        })
        .collect()
}

/// Collocation differentiation matrix on arbitrary nodes.
fn differentiation_matrix(nodes: &[f64], bary: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    d
}
