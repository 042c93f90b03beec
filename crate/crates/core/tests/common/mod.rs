//! Independent reference implementations for the integration tests. Nothing
//! here calls into the crate's linear algebra.
#![allow(dead_code)]

use hsrecon_core::{Matrix, MultiCube};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_dense(m: &Matrix) -> Dense {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

pub fn random_dense<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Dense {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ar, ac) = (a.len(), a[0].len());
    let (br, bc) = (b.len(), b[0].len());
    let mut out = vec![vec![0.0; ac * bc]; ar * br];
    for i in 0..ar * br {
        for j in 0..ac * bc {
            out[i][j] = a[i / br][j / bc] * b[i % br][j % bc];
        }
    }
    out
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn ones(n: usize) -> Dense {
    vec![vec![1.0; n]; n]
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    assert_eq!(a[0].len(), inner);
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn matvec(a: &Dense, v: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Dense) -> Dense {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        assert!(p.abs() > 1e-300, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// A random symmetric positive definite matrix `A Aᵀ + n·I`.
pub fn random_spd<R: Rng>(n: usize, rng: &mut R) -> Dense {
    let a = random_dense(n, n, rng);
    let mut s = mul(&a, &transpose(&a));
    for (i, row) in s.iter_mut().enumerate() {
        row[i] += n as f64 * 0.1;
    }
    // Exact symmetry.
    for i in 0..n {
        for j in 0..i {
            s[i][j] = s[j][i];
        }
    }
    s
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    assert_eq!((a.len(), a[0].len()), (b.len(), b[0].len()));
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &Dense) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn random_cube<R: Rng>(h: usize, w: usize, m: usize, rng: &mut R) -> MultiCube {
    let data = (0..h * w * m).map(|_| rng.random_range(0.0..1.0)).collect();
    MultiCube::new(h, w, m, data).unwrap()
}
