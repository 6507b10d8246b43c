//! Brute-force reference implementations: plain nested `Vec`s, explicit index
//! loops and a cyclic Jacobi eigensolver on real symmetric embeddings. Nothing
//! here calls into the library except to copy matrix entries in and out.

#![allow(dead_code, clippy::needless_range_loop)]

use covmat::ComplexMatrix;
use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

pub fn zero(n: usize, m: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); m]; n]
}

pub fn rows(m: &ComplexMatrix) -> Mat {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        assert_eq!(ra.len(), rb.len());
        for (x, y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).norm());
        }
    }
    worst
}

pub fn adjoint(a: &Mat) -> Mat {
    let (n, m) = (a.len(), a[0].len());
    let mut out = zero(m, n);
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = zero(n, m);
    for i in 0..n {
        for j in 0..m {
            for l in 0..k {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Spectrum of a Hermitian matrix from its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose eigenvalues are those of `h`, each twice.
pub fn hermitian_spectrum(h: &Mat) -> Vec<f64> {
    let n = h.len();
    let mut e = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = (h[i][j] + h[j][i].conj()) * 0.5;
            e[i][j] = z.re;
            e[i + n][j + n] = z.re;
            e[i][j + n] = -z.im;
            e[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(e).into_iter().step_by(2).collect()
}

/// Singular values, descending, from the Hermitian dilation
/// `[[0, M], [M^dagger, 0]]` whose spectrum is `+-sigma_i` padded with zeros.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    let (r, c) = (m.len(), m[0].len());
    let mut dilation = zero(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            dilation[i][r + j] = m[i][j];
            dilation[r + j][i] = m[i][j].conj();
        }
    }
    let mut sv: Vec<f64> = hermitian_spectrum(&dilation)
        .into_iter()
        .rev()
        .take(r.min(c))
        .map(|x| x.max(0.0))
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

pub fn real_singular_values(m: &[Vec<f64>]) -> Vec<f64> {
    let complex: Mat = m
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    singular_values(&complex)
}

pub fn trace_norm(m: &Mat) -> f64 {
    singular_values(m).iter().sum()
}

/// `tr_B` of a `da x db` operator.
pub fn reduce_a(rho: &Mat, da: usize, db: usize) -> Mat {
    let mut out = zero(da, da);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                out[a][ap] += rho[a * db + b][ap * db + b];
            }
        }
    }
    out
}

/// `tr_A` of a `da x db` operator.
pub fn reduce_b(rho: &Mat, da: usize, db: usize) -> Mat {
    let mut out = zero(db, db);
    for b in 0..db {
        for bp in 0..db {
            for a in 0..da {
                out[b][bp] += rho[a * db + b][a * db + bp];
            }
        }
    }
    out
}

/// `rho^{T_A}[(a b), (a' b')] = rho[(a' b), (a b')]`.
pub fn partial_transpose_a(rho: &Mat, da: usize, db: usize) -> Mat {
    let mut out = zero(da * db, da * db);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                for bp in 0..db {
                    out[a * db + b][ap * db + bp] = rho[ap * db + b][a * db + bp];
                }
            }
        }
    }
    out
}

/// `R[(a a'), (b b')] = rho[(a b), (a' b')]`.
pub fn realign(rho: &Mat, da: usize, db: usize) -> Mat {
    let mut out = zero(da * da, db * db);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                for bp in 0..db {
                    out[a * da + ap][b * db + bp] = rho[a * db + b][ap * db + bp];
                }
            }
        }
    }
    out
}

/// `tr(rho m)`.
pub fn expectation(rho: &Mat, m: &Mat) -> Complex64 {
    let n = rho.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[i][j] * m[j][i];
        }
    }
    acc
}

/// Identity, symmetric, antisymmetric, diagonal generators with
/// `tr(G_a G_b) = delta_ab`, written out entry by entry.
pub fn gell_mann(d: usize) -> Vec<Mat> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let h = 0.5f64.sqrt();
    let mut out = Vec::new();
    let mut id = zero(d, d);
    for i in 0..d {
        id[i][i] = r(1.0 / (d as f64).sqrt());
    }
    out.push(id);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = zero(d, d);
            m[j][k] = r(h);
            m[k][j] = r(h);
            out.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = zero(d, d);
            m[j][k] = Complex64::new(0.0, -h);
            m[k][j] = Complex64::new(0.0, h);
            out.push(m);
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = zero(d, d);
        for i in 0..l {
            m[i][i] = r(1.0 / norm);
        }
        m[l][l] = r(-(l as f64) / norm);
        out.push(m);
    }
    out
}

/// `C_mn = <G_m (x) H_n> - <G_m><H_n>` by a four-fold loop per entry.
pub fn correlation_block(rho: &Mat, da: usize, db: usize, ga: &[Mat], gb: &[Mat]) -> Vec<Vec<f64>> {
    let ra = reduce_a(rho, da, db);
    let rb = reduce_b(rho, da, db);
    let mut out = vec![vec![0.0; gb.len()]; ga.len()];
    for (m, g) in ga.iter().enumerate() {
        let mean_g = expectation(&ra, g).re;
        for (n, h) in gb.iter().enumerate() {
            let mean_h = expectation(&rb, h).re;
            let mut joint = Complex64::new(0.0, 0.0);
            for a in 0..da {
                for ap in 0..da {
                    for b in 0..db {
                        for bp in 0..db {
                            joint += rho[a * db + b][ap * db + bp] * g[ap][a] * h[bp][b];
                        }
                    }
                }
            }
            out[m][n] = joint.re - mean_g * mean_h;
        }
    }
    out
}

pub fn purity(rho: &Mat) -> f64 {
    rho.iter().flatten().map(|z| z.norm_sqr()).sum()
}
