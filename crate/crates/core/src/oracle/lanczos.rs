use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Method, SpectrumResult, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::{CompiledOperator, StateVector};

pub const LANCZOS_MAX_QUBITS: usize = 20;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Budget of matrix-vector products across all restarts.
    pub max_krylov: usize,
    /// Krylov basis size before an explicit restart from the Ritz vector.
    pub restart: usize,
    /// Allowed ground-energy change between the last two estimates.
    pub tol: f64,
    pub residual_tol: f64,
    pub seed: u64,
    /// The eigenvector is returned only up to this register size.
    pub keep_state_max_qubits: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_krylov: 5000,
            restart: 50,
            tol: 1e-12,
            residual_tol: RESIDUAL_TOL * 0.1,
            seed: 0,
            keep_state_max_qubits: 16,
        }
    }
}

pub fn lanczos_ground(h: &PauliSum<f64>, opts: &LanczosOptions) -> Result<SpectrumResult> {
    lanczos_with(h, None, opts)
}

/// Lanczos from a given start vector (random when `None`).
pub fn lanczos_with(
    h: &PauliSum<f64>,
    start: Option<Vec<C>>,
    opts: &LanczosOptions,
) -> Result<SpectrumResult> {
    let (mut result, vector) = run(h, start, opts)?;
    if h.n_qubits() <= opts.keep_state_max_qubits {
        result.ground_state = Some(StateVector::from_amplitudes(h.n_qubits(), vector)?);
    }
    Ok(result)
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C], a: C, x: &[C]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Lowest Ritz pair of the tridiagonal matrix.
fn ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (j, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (theta, eig.eigenvectors.column(j).iter().copied().collect())
}

/// Returns the result without the state plus the raw eigenvector.
pub(super) fn run(
    h: &PauliSum<f64>,
    start: Option<Vec<C>>,
    opts: &LanczosOptions,
) -> Result<(SpectrumResult, Vec<C>)> {
    let n = h.n_qubits();
    if n > LANCZOS_MAX_QUBITS {
        return Err(Error::Capacity {
            what: "Lanczos qubits",
            requested: n,
            limit: LANCZOS_MAX_QUBITS,
        });
    }
    if !(opts.tol > 0.0) || !(opts.residual_tol > 0.0) || opts.restart < 2 {
        return Err(Error::InvalidArgument(
            "Lanczos needs tol > 0, residual_tol > 0 and restart >= 2".into(),
        ));
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("Lanczos input".into()));
    }
    let dim = 1usize << n;
    let op = CompiledOperator::new(h)?;
    let scale = h.l1_norm().max(1.0);

    let mut x = match start {
        Some(v) => {
            if v.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: v.len(),
                });
            }
            v
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            (0..dim)
                .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        }
    };
    let nx = norm(&x);
    if !(nx > 0.0) || !nx.is_finite() {
        return Err(Error::InvalidArgument(
            "Lanczos start vector has zero norm".into(),
        ));
    }
    x.iter_mut().for_each(|a| *a /= nx);

    let k_max = opts.restart.min(dim);
    let mut matvecs = 0usize;
    let mut previous = f64::INFINITY;
    let mut hx = vec![C::default(); dim];
    loop {
        let mut basis: Vec<Vec<C>> = vec![x.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![C::default(); dim];
        loop {
            let j = alphas.len();
            op.apply_into(&basis[j], &mut w)?;
            matvecs += 1;
            let alpha = dot(&basis[j], &w).re;
            axpy(&mut w, C::new(-alpha, 0.0), &basis[j]);
            if j > 0 {
                axpy(&mut w, C::new(-betas[j - 1], 0.0), &basis[j - 1]);
            }
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    axpy(&mut w, -c, v);
                }
            }
            alphas.push(alpha);
            let beta = norm(&w);
            if alphas.len() >= k_max || beta <= 1e-13 * scale || matvecs >= opts.max_krylov {
                break;
            }
            if alphas.len().is_multiple_of(5) {
                let (_, s) = ritz(&alphas, &betas);
                if (beta * s[s.len() - 1]).abs() < 0.01 * opts.residual_tol {
                    break;
                }
            }
            betas.push(beta);
            w.iter_mut().for_each(|a| *a /= beta);
            basis.push(std::mem::replace(&mut w, vec![C::default(); dim]));
        }

        let (theta, s) = ritz(&alphas, &betas);
        x.iter_mut().for_each(|a| *a = C::default());
        for (v, &si) in basis.iter().zip(&s) {
            axpy(&mut x, C::new(si, 0.0), v);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|a| *a /= nx);
        op.apply_into(&x, &mut hx)?;
        matvecs += 1;
        let energy = dot(&x, &hx).re;
        let residual = hx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if !energy.is_finite() {
            return Err(Error::NonFinite { iteration: matvecs });
        }
        // Rounding in a matvec is of order eps·‖H‖, so the energy tolerance
        // cannot usefully go below that.
        let tol = opts.tol.max(1e-14 * scale);
        let settled = (energy - previous).abs() < tol || (energy - theta).abs() < tol;
        if residual < opts.residual_tol && settled {
            let result = SpectrumResult {
                ground_energy: energy,
                ground_state: None,
                residual,
                method: Method::Lanczos,
                work: matvecs,
            };
            return Ok((result, x));
        }
        if matvecs >= opts.max_krylov {
            return Err(Error::NotConverged {
                what: "Lanczos ground state",
                best: energy,
            });
        }
        previous = energy;
    }
}
