use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[0..n]`, `off[0..n-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues ascending with orthonormal eigenvectors; `vectors[k]` is the
/// eigenvector of `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricSpectrum {
    /// Full decomposition. Costs `O(N³)`.
    pub fn compute(t: &SymTridiagonal) -> Result<Self> {
        let n = t.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        let values = ql_implicit(t, &mut m, n)?;
        let vectors = values.iter().map(|&(_, row)| m[row * n..(row + 1) * n].to_vec()).collect();
        Ok(Self {
            values: values.into_iter().map(|(v, _)| v).collect(),
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |A - QΛQᵀ|` over entries.
    pub fn reconstruction_residual(&self, t: &SymTridiagonal) -> f64 {
        let a = t.to_dense();
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.values[k] * self.vectors[k][i] * self.vectors[k][j]).sum();
                worst = worst.max((a[i][j] - s).abs());
            }
        }
        worst
    }

    /// `max |QᵀQ - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d: f64 = self.vectors[i].iter().zip(&self.vectors[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(t: &SymTridiagonal) -> Result<Vec<f64>> {
    let mut none: Vec<f64> = Vec::new();
    Ok(ql_implicit(t, &mut none, 0)?.into_iter().map(|(v, _)| v).collect())
}

/// Eigenvalues ascending plus `Qᵀv` for each given vector, without forming Q.
/// Costs `O(N²)` per tracked vector.
pub fn eigen_projections(t: &SymTridiagonal, vectors: &[&[f64]]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = t.len();
    let r = vectors.len();
    for v in vectors {
        if v.len() != n {
            return Err(Error::Domain(format!("vector length {} does not match matrix size {n}", v.len())));
        }
    }
    let mut m = vec![0.0; n * r];
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..n {
            m[i * r + j] = v[i];
        }
    }
    let order = ql_implicit(t, &mut m, r)?;
    let values = order.iter().map(|&(v, _)| v).collect();
    let proj = (0..r)
        .map(|j| order.iter().map(|&(_, row)| m[row * r + j]).collect())
        .collect();
    Ok((values, proj))
}

/// Eigenvector for a known eigenvalue by inverse iteration.
pub fn eigenvector_for(t: &SymTridiagonal, lambda: f64) -> Vec<f64> {
    let n = t.len();
    let shift = lambda + 1e-10 * t.norm_inf().max(1.0) * f64::EPSILON.sqrt();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..3 {
        x = solve_shifted(t, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    // fix the sign so the largest component is positive
    let big = x.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if big < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
    x
}

// Tridiagonal solve of (T - σI) x = b with partial pivoting.
fn solve_shifted(t: &SymTridiagonal, sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = t.len();
    // rows hold (sub, diag, sup, sup2) after pivoting
    let mut a: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            [
                if i > 0 { t.off[i - 1] } else { 0.0 },
                t.diag[i] - sigma,
                if i + 1 < n { t.off[i] } else { 0.0 },
                0.0,
            ]
        })
        .collect();
    let mut y = b.to_vec();
    let tiny = f64::EPSILON * t.norm_inf().max(1.0);
    for i in 0..n.saturating_sub(1) {
        let (cur, next) = (a[i], a[i + 1]);
        if next[0].abs() > cur[1].abs() {
            // swap rows i and i+1
            a[i] = [0.0, next[0], next[1], next[2]];
            a[i + 1] = [cur[1], cur[2], cur[3], 0.0];
            y.swap(i, i + 1);
        }
        let piv = if a[i][1] == 0.0 { tiny } else { a[i][1] };
        a[i][1] = piv;
        let f = a[i + 1][0] / piv;
        a[i + 1][0] = 0.0;
        a[i + 1][1] -= f * a[i][2];
        a[i + 1][2] -= f * a[i][3];
        y[i + 1] -= f * y[i];
    }
    if a[n - 1][1] == 0.0 {
        a[n - 1][1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        if i + 1 < n {
            s -= a[i][2] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][3] * x[i + 2];
        }
        x[i] = s / a[i][1];
    }
    x
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `m` is `n × r`, row-major, and receives every Givens rotation as a row
/// operation (`m ← Gᵀ m`). Starting from the identity gives `Qᵀ`; starting
/// from a column of vectors gives their projections. Returns
/// `(eigenvalue, row of m)` sorted ascending.
fn ql_implicit(t: &SymTridiagonal, m: &mut [f64], r: usize) -> Result<Vec<(f64, usize)>> {
    let n = t.len();
    let mut d = t.diag.clone();
    let mut e = t.off.clone();
    e.push(0.0);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut mm = l;
        while mm < n - 1 && e[mm].abs() > eps * tst1 {
            mm += 1;
        }
        if mm > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::EigenNoConvergence(l));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut rr = p.hypot(1.0);
                if p < 0.0 {
                    rr = -rr;
                }
                d[l] = e[l] / (p + rr);
                d[l + 1] = e[l] * (p + rr);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[mm];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..mm).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    rr = p.hypot(e[i]);
                    e[i + 1] = s * rr;
                    s = e[i] / rr;
                    c = p / rr;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if r > 0 {
                        let (lo, hi) = m.split_at_mut((i + 1) * r);
                        let row_i = &mut lo[i * r..];
                        let row_j = &mut hi[..r];
                        for (a, b) in row_i.iter_mut().zip(row_j.iter_mut()) {
                            let old_i = *a;
                            let old_j = *b;
                            *b = s * old_i + c * old_j;
                            *a = c * old_i - s * old_j;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut order: Vec<(f64, usize)> = d.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let vals = eigenvalues(&laplacian(n)).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn full_decomposition_invariants() {
        let diag: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64).sin() * 3.0).collect();
        let off: Vec<f64> = (0..39).map(|i| 0.5 + ((i * 3 % 5) as f64) * 0.1).collect();
        let t = SymTridiagonal::new(diag, off).unwrap();
        let sp = SymmetricSpectrum::compute(&t).unwrap();
        assert!(sp.reconstruction_residual(&t) <= 1e-10 * t.norm_inf());
        assert!(sp.orthonormality_defect() <= 1e-12);
        assert!(sp.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn projections_match_full() {
        let t = laplacian(30);
        let sp = SymmetricSpectrum::compute(&t).unwrap();
        let u: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).cos()).collect();
        let (vals, proj) = eigen_projections(&t, &[&u]).unwrap();
        for k in 0..30 {
            assert!((vals[k] - sp.values[k]).abs() < 1e-13);
            let direct: f64 = sp.vectors[k].iter().zip(&u).map(|(a, b)| a * b).sum();
            assert!((proj[0][k] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_iteration_recovers_eigenvector() {
        let t = laplacian(60);
        let vals = eigenvalues(&t).unwrap();
        let v = eigenvector_for(&t, vals[0]);
        let av = t.mul_vec(&v);
        for i in 0..60 {
            assert!((av[i] - vals[0] * v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![4.0], vec![]).unwrap();
        assert_eq!(eigenvalues(&t).unwrap(), vec![4.0]);
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }
}
