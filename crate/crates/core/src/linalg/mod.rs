//! Eigensolvers: implicit-shift QL on symmetric tridiagonal matrices and
//! Householder reduction of dense complex Hermitian matrices to that form.

mod hermitian;
mod tridiagonal;

pub use hermitian::{eigh, eigh_lowest, HermitianMatrix, HermitianEigen};
pub use tridiagonal::{tridiagonal_eigvals, tridiagonal_eigvecs, tridiagonal_eigh};

use crate::C64;

/// Relative tolerance used to decide ties when fixing eigenvector signs.
const TIE_TOL: f64 = 1e-10;

/// Index of the first component whose magnitude is within `TIE_TOL` of the
/// largest one.
fn dominant_index(mags: impl Iterator<Item = f64> + Clone) -> usize {
    let max = mags.clone().fold(0.0, f64::max);
    mags.into_iter().position(|m| m >= max * (1.0 - TIE_TOL)).unwrap_or(0)
}

/// Flips `v` so that its largest-magnitude component (lowest index on ties)
/// is positive.
pub fn fix_sign(v: &mut [f64]) {
    let k = dominant_index(v.iter().map(|x| x.abs()));
    if v[k] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Complex analogue of [`fix_sign`]: rotates the global phase so that the
/// dominant component is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let k = dominant_index(v.iter().map(|x| x.norm()));
    let m = v[k].norm();
    if m > 0.0 {
        let phase = v[k].conj() / m;
        v.iter_mut().for_each(|x| *x *= phase);
        v[k] = C64::new(v[k].re, 0.0);
    }
}
