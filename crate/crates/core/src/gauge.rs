//! Local gauges for band eigenframes.
//!
//! The eigensolver fixes eigenvector phases pointwise (largest entry real
//! positive), which is deterministic but not smooth in λ. Differentiating a
//! frame needs a smooth gauge; [`ReferenceGauge`] provides one by projecting
//! fixed basis vectors onto the band and orthonormalizing (Löwdin).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, expi_hermitian, ComplexMatrix, HermitianMatrix, C64, ZERO};

/// Smallest singular value of the reference overlap accepted by [`ReferenceGauge`].
const GAUGE_SINGULAR_TOL: f64 = 1e-6;

/// Rotates band columns (dim × r) at a parameter point into a fixed gauge.
pub trait Gauge: Sync {
    fn fix(&self, point: &[f64], band: &ComplexMatrix) -> Result<ComplexMatrix>;
}

/// The raw eigensolver gauge, unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolverGauge;

impl Gauge for SolverGauge {
    fn fix(&self, _point: &[f64], band: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(band.clone())
    }
}

/// Frame `Φ · polar(Φ† R)`, where `R` selects the basis vectors `indices`.
///
/// For a single band this makes component `indices[0]` real positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceGauge {
    indices: Vec<usize>,
}

impl ReferenceGauge {
    pub fn new(indices: Vec<usize>) -> Self {
        Self { indices }
    }

    /// The last `r` basis vectors of a `dim`-dimensional space.
    pub fn last(dim: usize, r: usize) -> Self {
        Self {
            indices: (dim - r..dim).collect(),
        }
    }

    /// Picks the best-conditioned reference set for `band` by greedy row pivoting.
    pub fn pivoted(band: &ComplexMatrix) -> Self {
        let (dim, r) = (band.rows(), band.cols());
        let mut rows: Vec<Vec<C64>> = (0..dim)
            .map(|i| (0..r).map(|a| band[(i, a)]).collect())
            .collect();
        let mut chosen = Vec::with_capacity(r);
        for _ in 0..r {
            let best = (0..dim)
                .filter(|i| !chosen.contains(i))
                .max_by(|&x, &y| linalg::norm(&rows[x]).total_cmp(&linalg::norm(&rows[y])))
                .expect("band has at least r rows");
            chosen.push(best);
            let pivot = rows[best].clone();
            let pn = linalg::norm(&pivot);
            if pn == 0.0 {
                continue;
            }
            let unit: Vec<C64> = pivot.iter().map(|z| z / pn).collect();
            for row in rows.iter_mut() {
                let c = linalg::inner_unchecked(&unit, row);
                for (x, u) in row.iter_mut().zip(&unit) {
                    *x -= c * u;
                }
            }
        }
        chosen.sort_unstable();
        Self { indices: chosen }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl Gauge for ReferenceGauge {
    fn fix(&self, _point: &[f64], band: &ComplexMatrix) -> Result<ComplexMatrix> {
        let r = band.cols();
        if self.indices.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                actual: self.indices.len(),
            });
        }
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= band.rows()) {
            return Err(Error::InvalidArgument(format!(
                "reference index {bad} out of range"
            )));
        }
        // overlap[a][b] = (φ_a, e_{indices[b]})
        let mut overlap = ComplexMatrix::zeros(r, r);
        for a in 0..r {
            for (b, &i) in self.indices.iter().enumerate() {
                overlap[(a, b)] = band[(i, a)].conj();
            }
        }
        let sigma = linalg::smallest_singular_value(&overlap)?;
        if sigma < GAUGE_SINGULAR_TOL {
            return Err(Error::GaugeSingular(sigma));
        }
        band.checked_mul(&linalg::unitarize(&overlap)?)
    }
}

/// Point-dependent frame rotation `Φ(λ) ↦ Φ(λ) G(λ)` on top of another gauge.
pub struct Twisted<'a, G> {
    inner: G,
    twist: Box<dyn Fn(&[f64]) -> ComplexMatrix + Send + Sync + 'a>,
}

impl<'a, G: Gauge> Twisted<'a, G> {
    pub fn new(inner: G, twist: impl Fn(&[f64]) -> ComplexMatrix + Send + Sync + 'a) -> Self {
        Self {
            inner,
            twist: Box::new(twist),
        }
    }

    /// Abelian rephasing `φ ↦ e^{i a(λ)} φ`.
    pub fn phase(inner: G, a: impl Fn(&[f64]) -> f64 + Send + Sync + 'a) -> Self {
        Self::new(inner, move |p| {
            ComplexMatrix::scalar(C64::from_polar(1.0, a(p)))
        })
    }
}

impl<G: Gauge> Gauge for Twisted<'_, G> {
    fn fix(&self, point: &[f64], band: &ComplexMatrix) -> Result<ComplexMatrix> {
        let base = self.inner.fix(point, band)?;
        base.checked_mul(&(self.twist)(point))
    }
}

/// Deterministic pseudo-random smooth function
/// `a(x) = Σⱼ cⱼ sin(kⱼ·x + δⱼ)` used as a gauge function.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    terms: Vec<(f64, Vec<f64>, f64)>,
}

impl TrigPolynomial {
    pub fn random(seed: u64, dim: usize, terms: usize, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..terms)
            .map(|_| {
                let c = amplitude * rng.gen_range(-1.0..1.0);
                let k = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let delta = rng.gen_range(0.0..std::f64::consts::TAU);
                (c, k, delta)
            })
            .collect();
        Self { terms }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, k, d)| c * (dot(k, x) + d).sin())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for (c, k, d) in &self.terms {
            let w = c * (dot(k, x) + d).cos();
            for (gi, ki) in g.iter_mut().zip(k) {
                *gi += w * ki;
            }
        }
        g
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smooth unitary field `U(λ) = exp(i Σⱼ aⱼ(λ) Tⱼ)` over a basis of r×r
/// Hermitian matrices, with pseudo-random trigonometric coefficients.
pub struct SmoothUnitaryField {
    coefficients: Vec<TrigPolynomial>,
    basis: Vec<HermitianMatrix>,
}

impl SmoothUnitaryField {
    pub fn random(seed: u64, n_params: usize, r: usize, amplitude: f64) -> Self {
        let basis = hermitian_basis(r);
        let coefficients = (0..basis.len())
            .map(|j| {
                TrigPolynomial::random(seed.wrapping_add(j as u64 * 7919), n_params, 3, amplitude)
            })
            .collect();
        Self {
            coefficients,
            basis,
        }
    }

    pub fn value(&self, point: &[f64]) -> ComplexMatrix {
        let r = self.basis[0].dim();
        let mut k = HermitianMatrix::zeros(r);
        for (a, t) in self.coefficients.iter().zip(&self.basis) {
            k = k.add_scaled(a.value(point), t);
        }
        expi_hermitian(&k, -1.0).expect("small Hermitian generator")
    }

    /// `∂ₖU` by central differences of step `h`.
    pub fn derivatives(&self, point: &[f64], h: f64) -> Vec<ComplexMatrix> {
        (0..point.len())
            .map(|k| {
                let mut p = point.to_vec();
                p[k] += h;
                let plus = self.value(&p);
                p[k] -= 2.0 * h;
                let minus = self.value(&p);
                (&plus - &minus).scale_real(0.5 / h)
            })
            .collect()
    }
}

/// Orthogonal basis of r×r Hermitian matrices (generalized Gell-Mann plus identity).
fn hermitian_basis(r: usize) -> Vec<HermitianMatrix> {
    let mut out = Vec::with_capacity(r * r);
    out.push(HermitianMatrix::new(ComplexMatrix::identity(r)).expect("identity"));
    for i in 0..r {
        for j in i + 1..r {
            let mut s = ComplexMatrix::zeros(r, r);
            s[(i, j)] = C64::new(1.0, 0.0);
            s[(j, i)] = C64::new(1.0, 0.0);
            out.push(HermitianMatrix::new(s).expect("symmetric"));
            let mut a = ComplexMatrix::zeros(r, r);
            a[(i, j)] = C64::new(0.0, -1.0);
            a[(j, i)] = C64::new(0.0, 1.0);
            out.push(HermitianMatrix::new(a).expect("antisymmetric imaginary"));
        }
    }
    for d in 1..r {
        let mut m = ComplexMatrix::zeros(r, r);
        for i in 0..d {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m[(d, d)] = C64::new(-(d as f64), 0.0);
        out.push(HermitianMatrix::new(m).expect("diagonal"));
    }
    debug_assert!(out.iter().all(|m| m.as_slice().iter().any(|z| *z != ZERO)));
    out
}
