//! Small dense and banded LU factorizations with partial pivoting.
//!
//! The dense factorization reports the determinant as a sign and a natural
//! log-magnitude so that characteristic determinants spanning hundreds of
//! orders of magnitude can be bracketed without overflow.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular to machine precision (zero pivot at column {column})")]
    Singular { column: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
}

/// Determinant as `sign * exp(log_abs)`. A zero determinant has `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub sign: i8,
    pub log_abs: f64,
}

impl LogDet {
    pub const ZERO: LogDet = LogDet {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Value as an `f64`; under/overflows for extreme magnitudes.
    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }
}

/// Row-major dense LU factorization `P A = L U`.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    swaps: usize,
    zero_pivot: Option<usize>,
}

impl DenseLu {
    /// Factorizes a row-major `n x n` matrix. A zero pivot is recorded rather
    /// than treated as an error so the determinant of a singular matrix is
    /// still available.
    pub fn new(n: usize, mut a: Vec<f64>) -> Result<Self, LinalgError> {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        if a.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut zero_pivot = None;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                zero_pivot.get_or_insert(k);
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / pivot;
                a[i * n + k] = l;
                if l != 0.0 {
                    for j in (k + 1)..n {
                        a[i * n + j] -= l * a[k * n + j];
                    }
                }
            }
        }
        Ok(DenseLu {
            n,
            lu: a,
            perm,
            swaps,
            zero_pivot,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn log_det(&self) -> LogDet {
        if self.zero_pivot.is_some() {
            return LogDet::ZERO;
        }
        let mut sign: i8 = if self.swaps.is_multiple_of(2) { 1 } else { -1 };
        let mut log_abs = 0.0;
        for k in 0..self.n {
            let d = self.lu[k * self.n + k];
            if d < 0.0 {
                sign = -sign;
            }
            log_abs += d.abs().ln();
        }
        LogDet { sign, log_abs }
    }

    /// Absolute values of the U diagonal.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.lu[k * self.n + k].abs()).collect()
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) -> Result<(), LinalgError> {
        if let Some(column) = self.zero_pivot {
            return Err(LinalgError::Singular { column });
        }
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
        Ok(())
    }
}

/// Banded LU factorization with partial pivoting (row interchanges confined
/// to the lower bandwidth, fill-in widens the upper band to `ku + kl`).
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku_fill: usize,
    width: usize,
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    /// Builds and factorizes from `(row, col, value)` triplets; duplicates add.
    pub fn from_triplets(
        n: usize,
        kl: usize,
        ku: usize,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self, LinalgError> {
        let ku_fill = ku + kl;
        let width = kl + ku_fill + 1;
        let mut band = BandLu {
            n,
            kl,
            ku_fill,
            width,
            data: vec![0.0; n * width],
            piv: vec![0; n],
        };
        for &(i, j, v) in entries {
            if !v.is_finite() {
                return Err(LinalgError::NonFinite);
            }
            assert!(
                j + kl >= i && j <= i + ku,
                "entry ({i}, {j}) outside declared band"
            );
            let idx = band.index(i, j);
            band.data[idx] += v;
        }
        band.factor()?;
        Ok(band)
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    fn factor(&mut self) -> Result<(), LinalgError> {
        let n = self.n;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + self.ku_fill).min(n - 1);
            let mut p = k;
            let mut pmax = self.data[self.index(k, k)].abs();
            for i in (k + 1)..=last_row {
                let v = self.data[self.index(i, k)].abs();
                if v > pmax {
                    p = i;
                    pmax = v;
                }
            }
            if pmax == 0.0 {
                return Err(LinalgError::Singular { column: k });
            }
            self.piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.index(k, j);
                    let b = self.index(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.index(k, k)];
            for i in (k + 1)..=last_row {
                let ik = self.index(i, k);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                if l != 0.0 {
                    for j in (k + 1)..=last_col {
                        let kj = self.data[self.index(k, j)];
                        let ij = self.index(i, j);
                        self.data[ij] -= l * kj;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in (k + 1)..=(k + self.kl).min(n - 1) {
                b[i] -= self.data[self.index(i, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..=(i + self.ku_fill).min(n - 1) {
                s -= self.data[self.index(i, j)] * b[j];
            }
            b[i] = s / self.data[self.index(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
            .collect()
    }

    #[test]
    fn determinant_sign_and_magnitude() {
        // det = -2 after a required pivot swap
        let lu = DenseLu::new(2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let d = lu.log_det();
        assert_eq!(d.sign, -1);
        assert!((d.log_abs - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn huge_determinant_does_not_overflow() {
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1e200;
        }
        let d = DenseLu::new(n, a).unwrap().log_det();
        assert_eq!(d.sign, 1);
        assert!((d.log_abs - 40.0 * 200.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn singular_matrix_has_zero_determinant() {
        let lu = DenseLu::new(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(lu.log_det().is_zero());
        assert!(lu.solve(&mut [1.0, 1.0]).is_err());
    }

    #[test]
    fn non_finite_is_rejected() {
        assert_eq!(
            DenseLu::new(1, vec![f64::NAN]).unwrap_err(),
            LinalgError::NonFinite
        );
    }

    #[test]
    fn band_and_dense_solves_agree() {
        let n = 30;
        let (kl, ku) = (3, 2);
        let mut entries = Vec::new();
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces row interchanges
                let v = if i == j {
                    0.01
                } else {
                    ((i * 7 + j * 13) % 11) as f64 - 5.0
                };
                entries.push((i, j, v));
                dense[i * n + j] = v;
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = matvec(n, &dense, &x);
        let mut xb = b.clone();
        BandLu::from_triplets(n, kl, ku, &entries)
            .unwrap()
            .solve(&mut xb);
        let mut xd = b;
        DenseLu::new(n, dense).unwrap().solve(&mut xd).unwrap();
        for i in 0..n {
            assert!((xb[i] - x[i]).abs() < 1e-9, "band {i}");
            assert!((xd[i] - x[i]).abs() < 1e-9, "dense {i}");
        }
    }
}
