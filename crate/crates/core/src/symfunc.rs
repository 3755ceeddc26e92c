//! Symmetric-function coefficients and Gelfand–Tsetlin combinatorics.
//!
//! `h_r`/`e_r` and their windowed variants feed the kernel determinants;
//! GT patterns and Schur polynomials give the combinatorial form of Λ.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::det_in_place;
use crate::scalar::Scalar;
use crate::types::WeylPoint;

/// `h_0..=h_max` of `alpha`, built by adding one variable at a time:
/// `h_k(α ∪ {a}) = h_k(α) + a·h_{k−1}(α ∪ {a})`.
pub fn complete_homogeneous_table<S: Scalar>(max: usize, alpha: &[S]) -> Vec<S> {
    let mut h = vec![S::zero(); max + 1];
    h[0] = S::one();
    for a in alpha {
        for k in 1..=max {
            let v = h[k].clone() + a.clone() * h[k - 1].clone();
            h[k] = v;
        }
    }
    h
}

/// `e_0..=e_n` of `alpha` (n = number of variables).
pub fn elementary_table<S: Scalar>(alpha: &[S]) -> Vec<S> {
    let n = alpha.len();
    let mut e = vec![S::zero(); n + 1];
    e[0] = S::one();
    for (m, a) in alpha.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            let v = e[k].clone() + a.clone() * e[k - 1].clone();
            e[k] = v;
        }
    }
    e
}

/// `h_r(α)`; 1 for `r = 0`, 0 for `r < 0`.
pub fn complete_homogeneous<S: Scalar>(r: i64, alpha: &[S]) -> S {
    if r < 0 {
        return S::zero();
    }
    complete_homogeneous_table(r as usize, alpha).pop().unwrap()
}

/// `e_r(α)`; 1 for `r = 0`, 0 for `r < 0` or `r > |α|`.
pub fn elementary<S: Scalar>(r: i64, alpha: &[S]) -> S {
    if r < 0 || r as usize > alpha.len() {
        return S::zero();
    }
    elementary_table(alpha).swap_remove(r as usize)
}

fn window<S>(i: usize, j: usize, alpha: &[S]) -> Result<&[S]> {
    if i > j {
        return Err(Error::IndexOrder { i, j });
    }
    if j >= alpha.len() {
        return Err(Error::Dimension {
            expected: j + 1,
            got: alpha.len(),
        });
    }
    Ok(&alpha[i + 1..=j])
}

/// `h^{(ij)}_r(α) = h_r(α_{i+1}, …, α_j)`, with `h^{(jj)}_r = 1(r = 0)`.
pub fn windowed_h<S: Scalar>(r: i64, i: usize, j: usize, alpha: &[S]) -> Result<S> {
    Ok(complete_homogeneous(r, window(i, j, alpha)?))
}

/// `e^{(ij)}_r(α) = e_r(α_{i+1}, …, α_j)`, with `e^{(jj)}_r = 1(r = 0)`.
pub fn windowed_e<S: Scalar>(r: i64, i: usize, j: usize, alpha: &[S]) -> Result<S> {
    Ok(elementary(r, window(i, j, alpha)?))
}

/// A Gelfand–Tsetlin pattern of order `N+1`: row `k` holds `k+1` integers and
/// consecutive rows interlace,
/// `x^k_k ≤ x^{k−1}_{k−1} ≤ x^k_{k−1} ≤ … ≤ x^k_1 ≤ x^{k−1}_0 ≤ x^k_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GtPattern {
    rows: Vec<Vec<i64>>,
}

impl GtPattern {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::Dimension {
                    expected: k + 1,
                    got: row.len(),
                });
            }
            if k == 0 {
                continue;
            }
            let above = &rows[k - 1];
            for i in 0..k {
                if !(row[i + 1] <= above[i] && above[i] <= row[i]) {
                    return Err(Error::InvalidArgument(format!(
                        "rows {} and {k} do not interlace",
                        k - 1
                    )));
                }
            }
        }
        Ok(GtPattern { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// `N+1`.
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// `sh(x)`: the bottom row `x^N`.
    pub fn shape(&self) -> &[i64] {
        self.rows.last().map(|r| r.as_slice()).unwrap_or(&[])
    }

    /// `ledge(x) = (x^0_0, x^1_1, …, x^N_N)`.
    pub fn ledge(&self) -> Vec<i64> {
        self.rows.iter().enumerate().map(|(k, r)| r[k]).collect()
    }

    /// Exponent of `α_k` in the pattern weight: `Σx^k − Σx^{k−1}`.
    pub fn exponents(&self) -> Vec<i64> {
        let mut prev = 0;
        self.rows
            .iter()
            .map(|r| {
                let s: i64 = r.iter().sum();
                let e = s - prev;
                prev = s;
                e
            })
            .collect()
    }
}

/// Streams every GT pattern with bottom row `shape` (and left edge `ledge`,
/// when given). Rows are filled from the shape upward; each entry ranges over
/// the interval its neighbours in the row below allow.
pub fn enumerate_gt(shape: &WeylPoint, ledge: Option<&[i64]>) -> GtIter {
    GtIter::new(shape.coords().to_vec(), ledge.map(|l| l.to_vec()))
}

pub struct GtIter {
    rows: Vec<Vec<i64>>,
    ledge: Option<Vec<i64>>,
    started: bool,
    done: bool,
}

impl GtIter {
    fn new(shape: Vec<i64>, ledge: Option<Vec<i64>>) -> Self {
        let n = shape.len();
        let mut it = GtIter {
            rows: Vec::new(),
            ledge,
            started: false,
            done: false,
        };
        if n == 0 {
            it.done = true;
            return it;
        }
        if let Some(d) = &it.ledge {
            // sh = z, ledge = d is feasible iff d is nonincreasing, d_N = z_N
            // and z_i >= d_i
            let feasible = d.len() == n
                && d.windows(2).all(|w| w[0] >= w[1])
                && d[n - 1] == shape[n - 1]
                && shape.iter().zip(d).all(|(z, d)| z >= d);
            if !feasible {
                it.done = true;
                return it;
            }
        }
        it.rows = (0..n).map(|k| vec![0; k + 1]).collect();
        it.rows[n - 1] = shape;
        if n > 1 {
            it.reset_from(n - 2);
        }
        it
    }

    fn fixed(&self, k: usize, i: usize) -> Option<i64> {
        match &self.ledge {
            Some(d) if i == k => Some(d[k]),
            _ => None,
        }
    }

    fn bounds(&self, k: usize, i: usize) -> (i64, i64) {
        if let Some(v) = self.fixed(k, i) {
            return (v, v);
        }
        let below = &self.rows[k + 1];
        let mut lo = below[i + 1];
        if let Some(d) = &self.ledge {
            lo = lo.max(d[i]);
        }
        (lo, below[i])
    }

    /// Sets rows `k, k−1, …, 0` to their entrywise minima.
    fn reset_from(&mut self, k: usize) {
        for row in (0..=k).rev() {
            for i in 0..=row {
                let (lo, hi) = self.bounds(row, i);
                debug_assert!(lo <= hi);
                self.rows[row][i] = lo;
            }
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.rows.len();
        for k in 0..n.saturating_sub(1) {
            for i in 0..=k {
                let (_, hi) = self.bounds(k, i);
                if self.rows[k][i] < hi {
                    self.rows[k][i] += 1;
                    for prev in 0..i {
                        self.rows[k][prev] = self.bounds(k, prev).0;
                    }
                    if k > 0 {
                        self.reset_from(k - 1);
                    }
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for GtIter {
    type Item = GtPattern;

    fn next(&mut self) -> Option<GtPattern> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(GtPattern {
            rows: self.rows.clone(),
        })
    }
}

/// `α^x = α₀^{x⁰₀} ∏_k α_k^{Σx^k − Σx^{k−1}}`.
pub fn gt_weight<S: Scalar>(pattern: &GtPattern, alpha: &[S]) -> Result<S> {
    if alpha.len() != pattern.order() {
        return Err(Error::Dimension {
            expected: pattern.order(),
            got: alpha.len(),
        });
    }
    let mut w = S::one();
    for (a, e) in alpha.iter().zip(pattern.exponents()) {
        if e == 0 {
            continue;
        }
        if e < 0 && a.is_zero() {
            return Err(Error::ZeroWeightNegativeExponent);
        }
        w = w * a.powi(e);
    }
    Ok(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchurMethod {
    GtSum,
    Determinant,
}

/// Schur polynomial `s_z(α)`. Shapes with `z_N < 0` are evaluated as
/// `∏α_k^{z_N} · s_{z−z_N}(α)`.
pub fn schur<S: Scalar>(shape: &WeylPoint, alpha: &[S], method: SchurMethod) -> Result<S> {
    let n = shape.len();
    if alpha.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: alpha.len(),
        });
    }
    if n == 0 {
        return Ok(S::one());
    }
    let base = shape[n - 1];
    let (shape, prefactor) = if base < 0 {
        let mut pre = S::one();
        for a in alpha {
            if a.is_zero() {
                return Err(Error::ZeroWeightNegativeExponent);
            }
            pre = pre * a.powi(base);
        }
        (shape.shifted(-base), pre)
    } else {
        (shape.clone(), S::one())
    };
    let value = match method {
        SchurMethod::GtSum => gt_sum(shape.coords(), alpha, &mut HashMap::new()),
        SchurMethod::Determinant => schur_bialternant(&shape, alpha)?,
    };
    Ok(prefactor * value)
}

/// `Σ_x α^x` over GT patterns with bottom row `row`, summed one row at a
/// time: `Σ_{y ≺ row} α_k^{|row|−|y|} Σ_{x: sh(x)=y} α^x`, memoized on `y`.
fn gt_sum<S: Scalar>(row: &[i64], alpha: &[S], memo: &mut HashMap<Vec<i64>, S>) -> S {
    let k = row.len() - 1;
    if k == 0 {
        return alpha[0].powi(row[0]);
    }
    if let Some(v) = memo.get(row) {
        return v.clone();
    }
    let total: i64 = row.iter().sum();
    let mut sum = S::zero();
    let mut y: Vec<i64> = (0..k).map(|i| row[i + 1]).collect();
    loop {
        let below: i64 = y.iter().sum();
        sum = sum + alpha[k].powi(total - below) * gt_sum(&y, &alpha[..k], memo);
        // next y with row[i+1] ≤ y_i ≤ row[i], odometer order
        let mut i = 0;
        while i < k && y[i] == row[i] {
            y[i] = row[i + 1];
            i += 1;
        }
        if i == k {
            break;
        }
        y[i] += 1;
    }
    memo.insert(row.to_vec(), sum.clone());
    sum
}

/// `det{α_j^{z_i − i + N}} / ∏_{i<j}(α_i − α_j)` for nonnegative `z`.
fn schur_bialternant<S: Scalar>(shape: &WeylPoint, alpha: &[S]) -> Result<S> {
    let n = alpha.len();
    let mut vandermonde = S::one();
    for i in 0..n {
        for j in i + 1..n {
            let d = alpha[i].clone() - alpha[j].clone();
            if d.is_zero() {
                return Err(Error::CoincidentVariables);
            }
            vandermonde = vandermonde * d;
        }
    }
    let top = n as i64 - 1;
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        for a in alpha {
            m.push(a.powi(shape[i] - i as i64 + top));
        }
    }
    Ok(det_in_place(n, m) / vandermonde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use crate::types::rational;

    fn q(v: &[i64]) -> Vec<Exact> {
        v.iter().map(|&x| rational(x)).collect()
    }

    fn wp(v: &[i64]) -> WeylPoint {
        WeylPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn row_recursion_matches_pattern_enumeration() {
        let alpha = vec![Exact::new(3.into(), 2.into()), rational(2), Exact::new(1.into(), 3.into()), rational(5)];
        for z in [[0, 0, 0, 0], [2, 1, 0, 0], [4, 2, 2, 1], [5, 5, 1, 0]] {
            let z = wp(&z);
            let mut direct = rational(0);
            for x in enumerate_gt(&z, None) {
                direct += gt_weight::<Exact>(&x, &alpha).unwrap();
            }
            assert_eq!(schur(&z, &alpha, SchurMethod::GtSum).unwrap(), direct, "{z:?}");
        }
    }

    #[test]
    fn h_and_e_conventions() {
        assert_eq!(complete_homogeneous(0, &q(&[5, 7])), rational(1));
        assert_eq!(complete_homogeneous(-2, &q(&[1, 2, 3])), rational(0));
        assert_eq!(complete_homogeneous(2, &q(&[1, 2])), rational(7));
        assert_eq!(elementary(2, &q(&[1, 2, 3])), rational(11));
        assert_eq!(elementary(4, &q(&[1, 2, 3])), rational(0));
        assert_eq!(elementary::<Exact>(0, &[]), rational(1));
        assert_eq!(elementary::<Exact>(-1, &q(&[1])), rational(0));
    }

    #[test]
    fn windowed_examples() {
        assert_eq!(windowed_h(1, 0, 2, &q(&[9, 2, 3])).unwrap(), rational(5));
        assert_eq!(windowed_h(0, 1, 1, &q(&[9, 2, 3])).unwrap(), rational(1));
        assert_eq!(windowed_h(3, 1, 1, &q(&[9, 2, 3])).unwrap(), rational(0));
        assert_eq!(windowed_h(2, 0, 1, &q(&[9, 2])).unwrap(), rational(4));
        assert_eq!(windowed_e(2, 0, 2, &q(&[9, 2, 3])).unwrap(), rational(6));
        assert_eq!(windowed_e(-1, 0, 2, &q(&[9, 2, 3])).unwrap(), rational(0));
        assert_eq!(windowed_e(1, 2, 2, &q(&[1, 2, 3])).unwrap(), rational(0));
        assert_eq!(
            windowed_h(1, 2, 1, &q(&[1, 2, 3])),
            Err(Error::IndexOrder { i: 2, j: 1 })
        );
        assert_eq!(
            windowed_e(1, 2, 1, &q(&[1, 2, 3])),
            Err(Error::IndexOrder { i: 2, j: 1 })
        );
    }

    /// Every integer triangle with the given bottom row, checked against the
    /// interlacing inequalities directly.
    fn brute_force_count(shape: &[i64]) -> usize {
        let n = shape.len();
        let lo = *shape.iter().min().unwrap();
        let hi = *shape.iter().max().unwrap();
        let free: usize = n * (n - 1) / 2;
        let width = (hi - lo + 1) as usize;
        let mut count = 0;
        let mut digits = vec![0usize; free];
        loop {
            let mut rows: Vec<Vec<i64>> = Vec::new();
            let mut it = digits.iter();
            for k in 0..n - 1 {
                rows.push((0..=k).map(|_| lo + *it.next().unwrap() as i64).collect());
            }
            rows.push(shape.to_vec());
            if GtPattern::new(rows).is_ok() {
                count += 1;
            }
            let mut pos = 0;
            loop {
                if pos == free {
                    return count;
                }
                digits[pos] += 1;
                if digits[pos] < width {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn gt_enumeration_examples() {
        assert_eq!(enumerate_gt(&wp(&[1, 0]), None).count(), 2);
        assert_eq!(enumerate_gt(&wp(&[2, 1, 0]), None).count(), 8);
        assert_eq!(brute_force_count(&[2, 1, 0]), 8);
        assert_eq!(enumerate_gt(&wp(&[1, 1]), Some(&[0, 1])).count(), 0);
        assert_eq!(enumerate_gt(&wp(&[1, 1]), Some(&[1, 1])).count(), 1);
    }

    #[test]
    fn gt_enumeration_matches_brute_force() {
        for shape in [
            vec![3, 1, 0],
            vec![2, 2, 0],
            vec![3, 2, 1, 0],
            vec![2, 0, 0, -1],
            vec![1, 1, 1],
        ] {
            let patterns: Vec<_> = enumerate_gt(&wp(&shape), None).collect();
            let unique: std::collections::HashSet<_> = patterns.iter().cloned().collect();
            assert_eq!(unique.len(), patterns.len(), "duplicates for {shape:?}");
            assert_eq!(patterns.len(), brute_force_count(&shape), "{shape:?}");
        }
    }

    #[test]
    fn ledge_filter_matches_post_filtering() {
        let shape = wp(&[4, 2, 1, 0]);
        let all: Vec<_> = enumerate_gt(&shape, None).collect();
        for d in [[2, 1, 0, 0], [4, 2, 1, 0], [3, 3, 1, 0], [1, 1, 1, 0], [2, 1, 1, 1]] {
            let direct = enumerate_gt(&shape, Some(&d)).count();
            let filtered = all.iter().filter(|x| x.ledge() == d).count();
            assert_eq!(direct, filtered, "ledge {d:?}");
        }
    }

    #[test]
    fn weight_examples() {
        let zero = GtPattern::new(vec![vec![0], vec![0, 0]]).unwrap();
        assert_eq!(gt_weight(&zero, &q(&[3, 5])).unwrap(), rational(1));
        let up = GtPattern::new(vec![vec![1], vec![1, 0]]).unwrap();
        let down = GtPattern::new(vec![vec![0], vec![1, 0]]).unwrap();
        assert_eq!(gt_weight(&up, &q(&[3, 5])).unwrap(), rational(3));
        assert_eq!(gt_weight(&down, &q(&[3, 5])).unwrap(), rational(5));
        let neg = GtPattern::new(vec![vec![-1], vec![0, -1]]).unwrap();
        assert_eq!(
            gt_weight(&neg, &q(&[0, 5])),
            Err(Error::ZeroWeightNegativeExponent)
        );
    }

    #[test]
    fn schur_examples() {
        let ab = q(&[3, 5]);
        for m in [SchurMethod::GtSum, SchurMethod::Determinant] {
            assert_eq!(schur(&wp(&[1, 0]), &ab, m).unwrap(), rational(8));
            assert_eq!(schur(&wp(&[0, 0, 0]), &q(&[2, 3, 7]), m).unwrap(), rational(1));
        }
        assert_eq!(
            schur(&wp(&[2, 1, 0]), &q(&[1, 1, 1]), SchurMethod::GtSum).unwrap(),
            rational(8)
        );
        assert_eq!(
            schur(&wp(&[2, 1, 0]), &q(&[1, 1, 1]), SchurMethod::Determinant),
            Err(Error::CoincidentVariables)
        );
    }

    #[test]
    fn negative_shapes_shift_consistently() {
        let alpha = q(&[2, 3, 5]);
        let z = wp(&[1, -1, -2]);
        let gt = schur(&z, &alpha, SchurMethod::GtSum).unwrap();
        let det = schur(&z, &alpha, SchurMethod::Determinant).unwrap();
        assert_eq!(gt, det);
        // direct GT sum over the unshifted pattern set
        let direct = enumerate_gt(&z, None)
            .map(|x| gt_weight(&x, &alpha).unwrap())
            .fold(rational(0), |a, b| a + b);
        assert_eq!(direct, gt);
    }
}
