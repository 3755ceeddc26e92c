//! Determinantal transition kernels: Karlin–McGregor `P_t`, Rákos–Schütz
//! `φ_t`, the intertwining kernels `Λ`, `Π`, `Λ_Q`, `Π_Q`, and truncated
//! lattice sums over them.
//!
//! Every matrix is indexed by rows `i` and columns `j` over `0..=N`.

mod intertwining;
mod km;
mod noncrossing;
mod truncation;
mod weights;

pub use intertwining::{
    chamber_box, lambda_kernel, lambda_q, pi_kernel, pi_q, pi_q_support, pi_support,
    LambdaMethod, LambdaTable, PiTable,
};
pub use km::{change_of_measure, km_kernel, phi_direct, KmTable};
pub use noncrossing::{
    noncrossing_prob, noncrossing_prob_pointwise, phi_via_intertwining, MAX_LATTICE_POINTS,
};
pub(crate) use noncrossing::{check_points, check_tol};
pub use truncation::{
    dominated_box, ln_poisson_upper_tail, Factor, TruncationBox, MAX_BOX_WIDTH,
};
pub use weights::{w, w_ij};

use crate::linalg::det_in_place;
use crate::scalar::Scalar;

/// A computed quantity with a bound on its truncation error.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelValue<R> {
    pub value: R,
    pub abs_error: f64,
}

impl<R> KernelValue<R> {
    pub fn exact(value: R) -> Self {
        KernelValue {
            value,
            abs_error: 0.0,
        }
    }
}

/// Both sides of the Cauchy–Binet identity
/// `Σ_{z∈W^N} det{ξ_i(z_j−j)} det{ψ_j(z_i−i)} = det{Σ_z ξ_i(z) ψ_j(z)}`
/// for functions supported on `[lo, lo + len)` and given as value tables.
pub fn cauchy_binet<S: Scalar>(xi: &[Vec<S>], psi: &[Vec<S>], lo: i64) -> (S, S) {
    let n = xi.len();
    let at = |f: &Vec<S>, z: i64| -> S {
        let k = z - lo;
        if k < 0 || k as usize >= f.len() {
            S::zero()
        } else {
            f[k as usize].clone()
        }
    };
    let len = xi.iter().chain(psi).map(|f| f.len()).max().unwrap_or(0) as i64;
    let hi = lo + len - 1;
    // z_j − j ∈ [lo, hi] for a nonzero term
    let top = n as i64 - 1;
    let lower: Vec<i64> = (0..n as i64).map(|j| lo + j).collect();
    let upper: Vec<i64> = (0..n as i64).map(|j| hi + j.min(top)).collect();
    let mut lhs = S::zero();
    for z in chamber_box(&lower, &upper) {
        let a: Vec<S> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| at(&xi[i], z[j] - j as i64))
            .collect();
        let b: Vec<S> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| at(&psi[j], z[i] - i as i64))
            .collect();
        let da = det_in_place(n, a);
        if da.is_zero() {
            continue;
        }
        lhs = lhs + da * det_in_place(n, b);
    }
    let mut m = Vec::with_capacity(n * n);
    for f in xi {
        for g in psi {
            let mut s = S::zero();
            for z in lo..=hi {
                s = s + at(f, z) * at(g, z);
            }
            m.push(s);
        }
    }
    (lhs, det_in_place(n, m))
}
