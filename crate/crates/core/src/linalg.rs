use crate::scalar::Scalar;

/// Square matrix in row-major order. Rows are indexed by `i`, columns by `j`,
/// both running over `0..n`; every kernel determinant in the crate follows this.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> S {
        det_in_place(self.n, self.data.clone())
    }
}

/// Determinant of the `n×n` row-major matrix `a`, consuming it.
pub fn det_in_place<S: Scalar>(n: usize, mut a: Vec<S>) -> S {
    if n == 0 {
        return S::one();
    }
    let mut det = S::one();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].better_pivot(&a[piv * n + col]) {
                piv = r;
            }
        }
        if a[piv * n + col].is_zero() {
            return S::zero();
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[col * n + col].clone();
        for r in col + 1..n {
            if a[r * n + col].is_zero() {
                continue;
            }
            let factor = a[r * n + col].clone() / p.clone();
            for c in col + 1..n {
                let v = a[r * n + c].clone() - factor.clone() * a[col * n + c].clone();
                a[r * n + c] = v;
            }
        }
        det = det * p;
    }
    det
}
