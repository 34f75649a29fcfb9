//! Dense Hermitian eigensolver.
//!
//! Householder reduction to a real symmetric tridiagonal matrix followed by
//! implicit QL iterations with Wilkinson-style shifts. Eigenvectors are
//! optional; the error-probability path only needs the spectrum.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: alloc::vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|a_ij − conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }
}

/// Eigenvalues in ascending order and, when requested, the matching
/// orthonormal eigenvectors stored column-major (`vectors[k * dim + i]` is
/// component `i` of eigenvector `k`).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Complex64>>,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Option<&[Complex64]> {
        let dim = self.values.len();
        self.vectors.as_ref().map(|v| &v[k * dim..(k + 1) * dim])
    }
}

/// Eigen-decomposition of a Hermitian matrix. Only the lower triangle is
/// read.
pub fn eigh(matrix: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    let n = matrix.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let tri = tridiagonalize(matrix, want_vectors);
    let mut diag = tri.diag;
    let mut off = tri.off;

    let mut z = want_vectors.then(|| {
        let mut z = alloc::vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });
    tql(&mut diag, &mut off, z.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let values = order.iter().map(|&i| diag[i]).collect();

    let vectors = z.map(|z| {
        let mut out = Vec::with_capacity(n * n);
        for &col in &order {
            // tridiagonal eigenvector, then undo the phase scaling and the
            // Householder reflections
            let mut v: Vec<Complex64> = (0..n)
                .map(|i| tri.phases[i] * z[i * n + col])
                .collect();
            for (k, u) in tri.reflectors.iter().enumerate().rev() {
                apply_reflector(u, &mut v[k + 1..]);
            }
            out.extend(v);
        }
        out
    });
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(matrix: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(matrix, false)?.values)
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples `i` and `i + 1`; the last entry is zero.
    off: Vec<f64>,
    /// Diagonal unitary that maps the real tridiagonal form back to the
    /// complex one.
    phases: Vec<Complex64>,
    /// Scaled Householder vectors `u` with `H = I − u u*`, one per step.
    reflectors: Vec<Vec<Complex64>>,
}

fn apply_reflector(u: &[Complex64], v: &mut [Complex64]) {
    let dot: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    for (x, a) in v.iter_mut().zip(u) {
        *x -= a * dot;
    }
}

fn tridiagonalize(matrix: &ComplexMatrix, keep_reflectors: bool) -> Tridiagonal {
    let n = matrix.dim();
    // working copy of the full Hermitian matrix, rebuilt from the lower
    // triangle
    let mut a = ComplexMatrix::from_fn(n, |i, j| {
        if i >= j {
            matrix.get(i, j)
        } else {
            matrix.get(j, i).conj()
        }
    });
    let mut sub = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut reflectors = Vec::new();

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|i| a.get(k + 1 + i, k)).collect();
        let sigma = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let tail_sq: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail_sq == 0.0 {
            // already tridiagonal in this column
            sub[k] = x[0];
            if keep_reflectors {
                reflectors.push(alloc::vec![Complex64::new(0.0, 0.0); m]);
            }
            continue;
        }
        let x0_abs = x[0].norm();
        let phase = if x0_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x0_abs
        };
        let alpha = -phase * sigma;
        let mut u = x;
        u[0] -= alpha;
        // |v|² = 2σ(σ + |x₀|); scale so that H = I − u u*
        let scale = libm::sqrt(2.0 / (2.0 * sigma * (sigma + x0_abs)));
        for z in u.iter_mut() {
            *z *= scale;
        }

        // B ← H B H on the trailing block
        let mut p: Vec<Complex64> = (0..m)
            .map(|i| (0..m).map(|j| a.get(k + 1 + i, k + 1 + j) * u[j]).sum())
            .collect();
        let half_k: Complex64 = u.iter().zip(&p).map(|(a, b)| a.conj() * b).sum::<Complex64>() * 0.5;
        for (pi, ui) in p.iter_mut().zip(&u) {
            *pi -= ui * half_k;
        }
        for i in 0..m {
            for j in 0..m {
                let delta = u[i] * p[j].conj() + p[i] * u[j].conj();
                let idx = (k + 1 + i) * n + (k + 1 + j);
                a.data[idx] -= delta;
            }
        }
        sub[k] = alpha;
        if keep_reflectors {
            reflectors.push(u);
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut off = alloc::vec![0.0; n];
    let mut phases = alloc::vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let mag = sub[k].norm();
        off[k] = mag;
        phases[k + 1] = if mag == 0.0 {
            phases[k]
        } else {
            phases[k] * (sub[k] / mag)
        };
    }
    Tridiagonal {
        diag,
        off,
        phases,
        reflectors,
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. On return `d` holds the
/// eigenvalues; `z` (row-major, starting from the identity) accumulates the
/// eigenvectors as columns.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    // absolute floor for deflation; the relative test alone stalls when
    // neighbouring diagonal entries are (near) zero
    let norm = d.iter().zip(e.iter()).fold(0.0f64, |acc, (a, b)| acc.max(a.abs() + b.abs()));
    let floor = f64::EPSILON * norm;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::Numerical(alloc::format!(
                    "tridiagonal QL did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
