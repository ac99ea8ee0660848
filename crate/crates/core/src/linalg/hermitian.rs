use super::{fix_phase, tridiagonal_eigh, tridiagonal_eigvals, tridiagonal_eigvecs};
use crate::{Error, Result, C64};
use rayon::prelude::*;

/// Blocks smaller than this are updated on the calling thread.
const PAR_THRESHOLD: usize = 192;

/// Dense complex matrix stored row-major, intended to be Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    /// Builds the matrix entry by entry. The caller is responsible for
    /// Hermiticity; see [`HermitianMatrix::hermiticity_residual`].
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let data = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` to `value` and `(j, i)` to its conjugate. Diagonal
    /// entries keep only the real part.
    pub fn set_pair(&mut self, i: usize, j: usize, value: C64) {
        if i == j {
            self.data[i * self.n + i] = C64::new(value.re, 0.0);
        } else {
            self.data[i * self.n + j] = value;
            self.data[j * self.n + i] = value.conj();
        }
    }

    /// Adds `value` to `(i, j)` and its conjugate to `(j, i)`.
    pub fn add_pair(&mut self, i: usize, j: usize, value: C64) {
        if i == j {
            self.data[i * self.n + i] += C64::new(value.re, 0.0);
        } else {
            self.data[i * self.n + j] += value;
            self.data[j * self.n + i] += value.conj();
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `max |A − A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |A − B|`; matrices of different size compare as infinitely far.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `A·v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// `⟨u|A|v⟩`.
    pub fn element(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.apply(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// `A·B − B·A`.
    pub fn commutator(&self, other: &Self) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                let b = other.data[i * n + k];
                if a == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j] - b * self.data[k * n + j];
                }
            }
        }
        out
    }
}

fn dot(row: &[C64], v: &[C64]) -> C64 {
    row.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Elementary reflector `I − τ·v·v†` with `v[0] = 1`, acting on the
/// trailing `v.len()` coordinates.
struct Reflector {
    tau: C64,
    v: Vec<C64>,
}

impl Reflector {
    fn apply(&self, y: &mut [C64]) {
        let s: C64 = self.v.iter().zip(y.iter()).map(|(v, y)| v.conj() * y).sum();
        let s = self.tau * s;
        y.iter_mut().zip(&self.v).for_each(|(y, v)| *y -= s * v);
    }
}

/// `A = Q·T·Q†` with `T` real symmetric tridiagonal and `Q` the product of
/// the stored reflectors.
struct Tridiagonalized {
    diag: Vec<f64>,
    off: Vec<f64>,
    reflectors: Vec<Option<Reflector>>,
}

impl Tridiagonalized {
    /// Maps a vector in the tridiagonal basis back to the original one.
    fn back_transform(&self, z: &[f64]) -> Vec<C64> {
        let mut y: Vec<C64> = z.iter().map(|&x| C64::new(x, 0.0)).collect();
        for (k, r) in self.reflectors.iter().enumerate().rev() {
            if let Some(r) = r {
                r.apply(&mut y[k + 1..]);
            }
        }
        fix_phase(&mut y);
        y
    }
}

fn tridiagonalize(a: &HermitianMatrix) -> Result<Tridiagonalized> {
    let n = a.n;
    if n == 0 {
        return Err(Error::InvalidDimension("empty matrix".into()));
    }
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    let mut m = a.data.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(1));

    for k in 0..n.saturating_sub(1) {
        diag[k] = m[k * n + k].re;
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| m[(k + 1 + i) * n + k]).collect();
        let alpha = x[0];
        let xnorm = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 && alpha.im == 0.0 {
            off[k] = alpha.re;
            reflectors.push(None);
            continue;
        }
        let beta = -(alpha.norm().hypot(xnorm)).copysign(alpha.re);
        let tau = (C64::new(beta, 0.0) - alpha) / beta;
        let scale = C64::new(1.0, 0.0) / (alpha - beta);
        let mut v = Vec::with_capacity(len);
        v.push(C64::new(1.0, 0.0));
        v.extend(x[1..].iter().map(|z| z * scale));
        off[k] = beta;

        // Two-sided update of the trailing block B ← B − v·w† − w·v†.
        let base = (k + 1) * n + (k + 1);
        let row_of = |i: usize| base + i * n;
        let p: Vec<C64> = if len >= PAR_THRESHOLD {
            (0..len)
                .into_par_iter()
                .map(|i| tau * dot(&m[row_of(i)..row_of(i) + len], &v))
                .collect()
        } else {
            (0..len).map(|i| tau * dot(&m[row_of(i)..row_of(i) + len], &v)).collect()
        };
        let pv: C64 = p.iter().zip(&v).map(|(p, v)| p.conj() * v).sum();
        let shift = -0.5 * tau * pv;
        let w: Vec<C64> = p.iter().zip(&v).map(|(p, v)| p + shift * v).collect();
        let update = |i: usize, row: &mut [C64]| {
            let (vi, wi) = (v[i], w[i]);
            for (j, x) in row.iter_mut().enumerate() {
                *x -= vi * w[j].conj() + wi * v[j].conj();
            }
            row[i].im = 0.0;
        };
        let block = &mut m[(k + 1) * n..];
        if len >= PAR_THRESHOLD {
            block.par_chunks_mut(n).enumerate().for_each(|(i, r)| update(i, &mut r[k + 1..]));
        } else {
            block.chunks_mut(n).enumerate().for_each(|(i, r)| update(i, &mut r[k + 1..]));
        }
        reflectors.push(Some(Reflector { tau, v }));
    }
    diag[n - 1] = m[n * n - 1].re;
    Ok(Tridiagonalized { diag, off, reflectors })
}

/// Eigenpairs of a Hermitian matrix: ascending real eigenvalues and unit
/// eigenvectors, each with its dominant component real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

/// Full eigendecomposition.
pub fn eigh(a: &HermitianMatrix) -> Result<HermitianEigen> {
    let t = tridiagonalize(a)?;
    let (values, z) = tridiagonal_eigh(&t.diag, &t.off)?;
    let vectors = z.par_iter().map(|z| t.back_transform(z)).collect();
    Ok(HermitianEigen { values, vectors })
}

/// The `k` lowest eigenpairs, computed by inverse iteration on the
/// tridiagonal form.
pub fn eigh_lowest(a: &HermitianMatrix, k: usize) -> Result<HermitianEigen> {
    if k > a.n {
        return Err(Error::InvalidParameter(format!(
            "requested {k} eigenpairs of a {}-dimensional matrix",
            a.n
        )));
    }
    let t = tridiagonalize(a)?;
    let mut values = tridiagonal_eigvals(&t.diag, &t.off)?;
    values.truncate(k);
    let z = tridiagonal_eigvecs(&t.diag, &t.off, &values)?;
    let vectors = z.iter().map(|z| t.back_transform(z)).collect();
    Ok(HermitianEigen { values, vectors })
}
