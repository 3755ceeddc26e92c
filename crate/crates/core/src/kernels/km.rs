use crate::error::{Error, Result};
use crate::linalg::det_in_place;
use crate::scalar::Real;
use crate::types::{RateVector, WeylPoint};

use super::weights::mixed_sum;

pub(crate) fn check_dims(nu: &RateVector, points: &[&WeylPoint]) -> Result<()> {
    for p in points {
        if p.len() != nu.len() {
            return Err(Error::Dimension {
                expected: nu.len(),
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Karlin–McGregor kernel `P^ν_t(z, z′)` of independent Poisson processes
/// killed on leaving the chamber.
///
/// Row `i` is scaled by `e^{−ν_i t} ν_i^{z′_i − i}` and column `j` by
/// `ν_j^{j − z_j}`, turning each entry into a Poisson mass,
/// `pois(z′_i − z_j − i + j; ν_i t)·(ν_i/ν_j)^{z_j − j}`.
pub fn km_kernel<R: Real>(z: &WeylPoint, z2: &WeylPoint, t: &R, nu: &RateVector) -> Result<R> {
    check_dims(nu, &[z, z2])?;
    let rates: Vec<R> = nu.scalars();
    Ok(km_with(z.coords(), z2.coords(), t, &rates))
}

pub(crate) fn km_with<R: Real>(z: &[i64], z2: &[i64], t: &R, rates: &[R]) -> R {
    let n = rates.len();
    if z.iter().zip(z2).any(|(a, b)| b < a) {
        return R::zero();
    }
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        let lambda = rates[i].clone() * t.clone();
        for j in 0..n {
            let deg = z2[i] - z[j] - i as i64 + j as i64;
            let mass = R::poisson(deg, &lambda);
            if mass.is_zero() || i == j {
                m.push(mass);
            } else {
                let ratio = rates[i].clone() / rates[j].clone();
                m.push(mass * ratio.powi(z[j] - j as i64));
            }
        }
    }
    det_in_place(n, m)
}

/// [`km_kernel`] at many points for fixed `t`, with Poisson masses tabulated
/// up to a maximal degree.
#[derive(Clone, Debug)]
pub struct KmTable<R> {
    rates: Vec<R>,
    t: R,
    masses: Vec<Vec<R>>,
}

impl<R: Real> KmTable<R> {
    pub fn new(rates: &[R], t: &R, max_degree: usize) -> Self {
        let masses = rates
            .iter()
            .map(|r| R::poisson_table(&(r.clone() * t.clone()), max_degree + 1))
            .collect();
        KmTable {
            rates: rates.to_vec(),
            t: t.clone(),
            masses,
        }
    }

    fn mass(&self, i: usize, deg: i64) -> R {
        if deg < 0 {
            return R::zero();
        }
        match self.masses[i].get(deg as usize) {
            Some(v) => v.clone(),
            None => R::poisson(deg, &(self.rates[i].clone() * self.t.clone())),
        }
    }

    /// Column factors `(ν_i/ν_j)^{z_j − j}` for start point `z`, row-major.
    pub fn scales(&self, z: &[i64]) -> Vec<R> {
        let n = self.rates.len();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(if i == j {
                    R::one()
                } else {
                    (self.rates[i].clone() / self.rates[j].clone()).powi(z[j] - j as i64)
                });
            }
        }
        out
    }

    /// `P^ν_t(z, z′)` with `scales` from [`Self::scales`] for the same `z`.
    pub fn eval(&self, z: &[i64], z2: &[i64], scales: &[R]) -> R {
        let n = self.rates.len();
        if z.iter().zip(z2).any(|(a, b)| b < a) {
            return R::zero();
        }
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mass = self.mass(i, z2[i] - z[j] - i as i64 + j as i64);
                m.push(if mass.is_zero() {
                    mass
                } else {
                    mass * scales[i * n + j].clone()
                });
            }
        }
        det_in_place(n, m)
    }
}

/// `P^λ_t(z,z′) ∏_k (ν_k/λ_k)^{z′_k−z_k} e^{−(ν_k−λ_k)t}`: the kernel under
/// rates `ν` recovered from the kernel under rates `λ`.
pub fn change_of_measure<R: Real>(
    z: &WeylPoint,
    z2: &WeylPoint,
    t: &R,
    nu: &RateVector,
    lambda: &RateVector,
) -> Result<R> {
    check_dims(nu, &[z, z2])?;
    check_dims(lambda, &[z, z2])?;
    let base = km_kernel(z, z2, t, lambda)?;
    let nus: Vec<R> = nu.scalars();
    let lams: Vec<R> = lambda.scalars();
    let mut factor = R::one();
    let mut exponent = R::zero();
    for k in 0..nus.len() {
        let ratio = nus[k].clone() / lams[k].clone();
        factor = factor * ratio.powi(z2[k] - z[k]);
        exponent = exponent - (nus[k].clone() - lams[k].clone()) * t.clone();
    }
    Ok(base * factor * exponent.exp())
}

/// Rákos–Schütz kernel `φ^ν_t(d, d′)` of the departure process, evaluated
/// with the same row/column scaling as [`km_kernel`]: entry `(i,j)` becomes
/// `(ν_i/ν_j)^{d_j−j} Σ_k c_k(ν/ν_i) pois(n+k; ν_i t)`, `n = d′_i−d_j−i+j`.
pub fn phi_direct<R: Real>(d: &WeylPoint, d2: &WeylPoint, t: &R, nu: &RateVector) -> Result<R> {
    check_dims(nu, &[d, d2])?;
    let rates: Vec<R> = nu.scalars();
    Ok(phi_with(d.coords(), d2.coords(), t, &rates))
}

pub(crate) fn phi_with<R: Real>(d: &[i64], d2: &[i64], t: &R, rates: &[R]) -> R {
    let n = rates.len();
    if d.iter().zip(d2).any(|(a, b)| b < a) {
        return R::zero();
    }
    let mut m = Vec::with_capacity(n * n);
    for i in 0..n {
        let lambda = rates[i].clone() * t.clone();
        let beta: Vec<R> = rates.iter().map(|r| r.clone() / rates[i].clone()).collect();
        for j in 0..n {
            let deg = d2[i] - d[j] - i as i64 + j as i64;
            let sum = mixed_sum(deg, i, j, &beta, &lambda, |k| R::poisson(k, &lambda));
            let ratio = rates[i].clone() / rates[j].clone();
            m.push(sum * ratio.powi(d[j] - j as i64));
        }
    }
    det_in_place(n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::weights::{w, w_ij};

    fn wp(v: &[i64]) -> WeylPoint {
        WeylPoint::new(v.to_vec()).unwrap()
    }

    /// Unscaled formula with the plain weights, as written.
    fn km_reference(z: &[i64], z2: &[i64], t: f64, nu: &[f64]) -> f64 {
        let n = nu.len();
        let det = crate::linalg::Matrix::from_fn(n, |i, j| {
            w(z2[i] - z[j] - i as i64 + j as i64, &t)
        })
        .det();
        let pre: f64 = (0..n)
            .map(|k| nu[k].powi((z2[k] - z[k]) as i32) * (-nu[k] * t).exp())
            .product();
        pre * det
    }

    fn phi_reference(d: &[i64], d2: &[i64], t: f64, nu: &RateVector) -> f64 {
        let n = nu.len();
        let det = crate::linalg::Matrix::from_fn(n, |i, j| {
            w_ij(d2[i] - d[j] - i as i64 + j as i64, &t, nu, i, j).unwrap()
        })
        .det();
        let pre: f64 = (0..n)
            .map(|k| nu.rate(k).powi((d2[k] - d[k]) as i32) * (-nu.rate(k) * t).exp())
            .product();
        pre * det
    }

    #[test]
    fn km_examples() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let v: f64 = km_kernel(&wp(&[0, 0, 0]), &wp(&[0, 0, 0]), &0.7, &nu).unwrap();
        assert!((v - (-6.0f64 * 0.7).exp()).abs() < 1e-15);
        let v: f64 = km_kernel(&wp(&[2, 1, 0]), &wp(&[2, 0, 0]), &0.7, &nu).unwrap();
        assert_eq!(v, 0.0);
        let unit = RateVector::parse("1,1").unwrap();
        let v: f64 = km_kernel(&wp(&[0, 0]), &wp(&[1, 0]), &1.0, &unit).unwrap();
        assert!((v - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn scaled_km_matches_reference() {
        let nu = RateVector::parse("1.5,2,3.25").unwrap();
        for (z, z2) in [
            ([0, 0, 0], [3, 1, 0]),
            ([2, 1, -1], [4, 3, 0]),
            ([1, 1, 1], [5, 2, 2]),
        ] {
            let a: f64 = km_kernel(&wp(&z), &wp(&z2), &1.3, &nu).unwrap();
            let b = km_reference(&z, &z2, 1.3, nu.rates());
            assert!((a - b).abs() < 1e-14, "{z:?} {z2:?}: {a} vs {b}");
            let rates: Vec<f64> = nu.scalars();
            let table = KmTable::new(&rates, &1.3, 4);
            let c = table.eval(&z, &z2, &table.scales(&z));
            assert!((a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn change_of_measure_is_identity() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let lam = RateVector::parse("0.5,4,1.25").unwrap();
        let z = wp(&[1, 0, 0]);
        let z2 = wp(&[3, 2, 1]);
        let a: f64 = km_kernel(&z, &z2, &0.9, &nu).unwrap();
        let b: f64 = change_of_measure(&z, &z2, &0.9, &nu, &lam).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
        let same: f64 = change_of_measure(&z, &z2, &0.9, &nu, &nu).unwrap();
        assert!((a - same).abs() < 1e-15);
    }

    #[test]
    fn scaled_phi_matches_reference() {
        let nu = RateVector::parse("1,2,3").unwrap();
        for (d, d2) in [
            ([0, 0, 0], [2, 1, 0]),
            ([1, 0, 0], [3, 3, 1]),
            ([2, 2, 0], [2, 2, 0]),
        ] {
            let a: f64 = phi_direct(&wp(&d), &wp(&d2), &0.8, &nu).unwrap();
            let b = phi_reference(&d, &d2, 0.8, &nu);
            assert!((a - b).abs() < 1e-13, "{d:?} {d2:?}: {a} vs {b}");
        }
    }

    #[test]
    fn phi_small_time_and_monotonicity() {
        let nu = RateVector::parse("1,2,3").unwrap();
        let d = wp(&[2, 1, 0]);
        let v: f64 = phi_direct(&d, &d, &1e-6, &nu).unwrap();
        assert!((v - 1.0).abs() < 1e-5);
        let v: f64 = phi_direct(&d, &wp(&[3, 0, 0]), &1.0, &nu).unwrap();
        assert_eq!(v, 0.0);
    }
}
