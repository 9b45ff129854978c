//! Polynomials in chart coordinates `(z, z̄)` with complex coefficients.
//!
//! Everything geometric in this crate (structure matrices, defining functions
//! of wedges, coordinate changes) is a polynomial in the variables
//! `z_1, …, z_n, z̄_1, …, z̄_n`. Working with this ring keeps coordinate
//! changes closed-form: Wirtinger derivatives, conjugation and composition
//! are exact, and matrix inverses are Neumann series truncated at a fixed
//! total degree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

pub type C64 = Complex64;

/// `z^a z̄^b` as a pair of exponent vectors of equal length.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Monomial {
    pub z: Vec<u8>,
    pub zb: Vec<u8>,
}

impl Monomial {
    pub fn unit(n_vars: usize) -> Self {
        Monomial {
            z: vec![0; n_vars],
            zb: vec![0; n_vars],
        }
    }

    pub fn total_degree(&self) -> usize {
        self.z.iter().map(|&e| e as usize).sum::<usize>()
            + self.zb.iter().map(|&e| e as usize).sum::<usize>()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            zb: self.zb.iter().zip(&other.zb).map(|(a, b)| a + b).collect(),
        }
    }

    fn eval(&self, point: &[C64]) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (j, (&a, &b)) in self.z.iter().zip(&self.zb).enumerate() {
            for _ in 0..a {
                acc *= point[j];
            }
            for _ in 0..b {
                acc *= point[j].conj();
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &e) in self.z.iter().enumerate() {
            if e > 0 {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "z{}", j + 1)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        for (j, &e) in self.zb.iter().enumerate() {
            if e > 0 {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "zb{}", j + 1)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Complex polynomial in `(z, z̄)` over a chart of ℂⁿ.
#[derive(Clone, Debug)]
pub struct CPoly {
    n_vars: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl CPoly {
    pub fn zero(n_vars: usize) -> Self {
        CPoly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: C64) -> Self {
        let mut p = CPoly::zero(n_vars);
        if c != C64::new(0.0, 0.0) {
            p.terms.insert(Monomial::unit(n_vars), c);
        }
        p
    }

    /// The coordinate `z_j` (zero-based index).
    pub fn var_z(n_vars: usize, j: usize) -> Self {
        let mut m = Monomial::unit(n_vars);
        m.z[j] = 1;
        CPoly::from_term(n_vars, m, C64::new(1.0, 0.0))
    }

    /// The conjugate coordinate `z̄_j` (zero-based index).
    pub fn var_zb(n_vars: usize, j: usize) -> Self {
        let mut m = Monomial::unit(n_vars);
        m.zb[j] = 1;
        CPoly::from_term(n_vars, m, C64::new(1.0, 0.0))
    }

    pub fn from_term(n_vars: usize, m: Monomial, c: C64) -> Self {
        let mut p = CPoly::zero(n_vars);
        p.add_term(m, c);
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: C64) {
        debug_assert_eq!(m.z.len(), self.n_vars);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if c.norm() != 0.0 {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().norm() == 0.0 {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> C64 {
        self.terms.get(m).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Coefficient of the plain monomial `z_j`.
    pub fn coeff_z_linear(&self, j: usize) -> C64 {
        let mut m = Monomial::unit(self.n_vars);
        m.z[j] = 1;
        self.coeff(&m)
    }

    /// Coefficient of the plain monomial `z̄_j`.
    pub fn coeff_zb_linear(&self, j: usize) -> C64 {
        let mut m = Monomial::unit(self.n_vars);
        m.zb[j] = 1;
        self.coeff(&m)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff(&Monomial::unit(self.n_vars))
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[C64]) -> C64 {
        debug_assert_eq!(point.len(), self.n_vars);
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            acc += c * m.eval(point);
        }
        acc
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CPoly {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        if s == C64::new(0.0, 0.0) {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * s);
        }
        out
    }

    /// Product truncated at total degree `cap`.
    pub fn mul_truncated(&self, other: &CPoly, cap: usize) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (ma, ca) in &self.terms {
            let da = ma.total_degree();
            if da > cap {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.total_degree() > cap {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        self.mul_truncated(other, usize::MAX >> 1)
    }

    pub fn pow_truncated(&self, e: usize, cap: usize) -> CPoly {
        let mut out = CPoly::constant(self.n_vars, C64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul_truncated(self, cap);
        }
        out
    }

    pub fn truncate(&self, cap: usize) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            if m.total_degree() <= cap {
                out.terms.insert(m.clone(), *c);
            }
        }
        out
    }

    /// Formal Wirtinger derivative ∂/∂z_j.
    pub fn dz(&self, j: usize) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            if m.z[j] > 0 {
                let mut m2 = m.clone();
                m2.z[j] -= 1;
                out.add_term(m2, c * (m.z[j] as f64));
            }
        }
        out
    }

    /// Formal Wirtinger derivative ∂/∂z̄_j.
    pub fn dzb(&self, j: usize) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            if m.zb[j] > 0 {
                let mut m2 = m.clone();
                m2.zb[j] -= 1;
                out.add_term(m2, c * (m.zb[j] as f64));
            }
        }
        out
    }

    /// Pointwise complex conjugate as a polynomial: conj coefficients, swap z ↔ z̄.
    pub fn conj(&self) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.terms.insert(
                Monomial {
                    z: m.zb.clone(),
                    zb: m.z.clone(),
                },
                c.conj(),
            );
        }
        out
    }

    /// Max coefficient deviation from being a real-valued function, i.e. from p = conj(p).
    pub fn realness_defect(&self) -> f64 {
        let diff = self.sub(&self.conj());
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Substitute `z_j ↦ subs[j]`, `z̄_j ↦ conj(subs[j])`, truncating at `cap`.
    pub fn compose_truncated(&self, subs: &[CPoly], cap: usize) -> CPoly {
        debug_assert_eq!(subs.len(), self.n_vars);
        let out_vars = subs[0].n_vars;
        let conj_subs: Vec<CPoly> = subs.iter().map(|p| p.conj()).collect();
        let mut out = CPoly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut term = CPoly::constant(out_vars, *c);
            for (j, (&a, &b)) in m.z.iter().zip(&m.zb).enumerate() {
                for _ in 0..a {
                    term = term.mul_truncated(&subs[j], cap);
                }
                for _ in 0..b {
                    term = term.mul_truncated(&conj_subs[j], cap);
                }
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitute `z ↦ λ z` for real λ: scales each term by λ^degree.
    pub fn dilate(&self, lambda: f64) -> CPoly {
        let mut out = CPoly::zero(self.n_vars);
        for (m, c) in &self.terms {
            let s = lambda.powi(m.total_degree() as i32);
            if s != 0.0 {
                out.terms.insert(m.clone(), c * s);
            }
        }
        out
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6e}{:+.6e}i)·{}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

/// Matrix with polynomial entries, row-major.
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<CPoly>,
}

impl PolyMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<CPoly>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        PolyMatrix { rows, cols, entries }
    }

    pub fn zero(n_vars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![CPoly::zero(n_vars); rows * cols],
        }
    }

    pub fn identity(n_vars: usize, n: usize) -> Self {
        let mut m = PolyMatrix::zero(n_vars, n, n);
        for i in 0..n {
            *m.get_mut(i, i) = CPoly::constant(n_vars, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut CPoly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        PolyMatrix::from_entries(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> PolyMatrix {
        PolyMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(|p| p.scale(s)).collect(),
        )
    }

    pub fn mul_truncated(&self, other: &PolyMatrix, cap: usize) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let n_vars = self.entries[0].n_vars();
        let mut out = PolyMatrix::zero(n_vars, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CPoly::zero(n_vars);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul_truncated(other.get(k, j), cap));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn conj(&self) -> PolyMatrix {
        PolyMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(|p| p.conj()).collect(),
        )
    }

    pub fn truncate(&self, cap: usize) -> PolyMatrix {
        PolyMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries.iter().map(|p| p.truncate(cap)).collect(),
        )
    }

    pub fn compose_truncated(&self, subs: &[CPoly], cap: usize) -> PolyMatrix {
        PolyMatrix::from_entries(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|p| p.compose_truncated(subs, cap))
                .collect(),
        )
    }

    pub fn eval(&self, point: &[C64]) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(point))
    }

    pub fn constant_part(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|p| p.max_coeff_norm())
            .fold(0.0, f64::max)
    }

    /// Truncated inverse via a Neumann series around the constant part.
    ///
    /// Writes `M = M(0)(I + N)` with `N(0) = 0`; since `N^k` has lowest total
    /// degree `k`, the series `Σ (-N)^k M(0)⁻¹` stabilizes modulo degree `cap`
    /// after `cap` terms. Fails if `M(0)` is singular.
    pub fn neumann_inverse_truncated(&self, cap: usize) -> Option<PolyMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let n_vars = self.entries[0].n_vars();
        let m0 = self.constant_part();
        let m0_inv = m0.clone().try_inverse()?;
        // guard against a nearly-singular constant part
        if (m0_inv.clone() * m0 - DMatrix::<C64>::identity(n, n)).norm() > 1e-8 {
            return None;
        }
        let m0_inv_poly = PolyMatrix::from_entries(
            n,
            n,
            (0..n * n)
                .map(|idx| CPoly::constant(n_vars, m0_inv[(idx / n, idx % n)]))
                .collect(),
        );
        let big_n = m0_inv_poly.mul_truncated(self, cap).sub(&PolyMatrix::identity(n_vars, n));
        let mut acc = PolyMatrix::identity(n_vars, n);
        let mut power = PolyMatrix::identity(n_vars, n);
        for _ in 0..cap {
            power = power.mul_truncated(&big_n, cap).scale(C64::new(-1.0, 0.0));
            if power.max_coeff_norm() == 0.0 {
                break;
            }
            acc = acc.add(&power);
        }
        Some(acc.mul_truncated(&m0_inv_poly, cap))
    }
}
