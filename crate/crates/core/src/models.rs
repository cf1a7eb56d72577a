//! Parameterized Hermitian families `H(λ) = H₀ + Σₖ λᵏ Gₖ` and their
//! eigenframes grouped into degenerate bands.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, pauli, ComplexMatrix, EigenDecomposition, HermitianMatrix, C64};

/// Default energy tolerance for grouping eigenvalues into bands.
pub const DEFAULT_BAND_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianModel {
    dim: usize,
    generators: Vec<HermitianMatrix>,
    offset: Option<HermitianMatrix>,
}

impl HermitianModel {
    pub fn new(generators: Vec<HermitianMatrix>, offset: Option<HermitianMatrix>) -> Result<Self> {
        let dim = match (generators.first(), &offset) {
            (Some(g), _) => g.dim(),
            (None, Some(h0)) => h0.dim(),
            (None, None) => {
                return Err(Error::InvalidArgument(
                    "model needs at least one generator".into(),
                ));
            }
        };
        for g in generators.iter().chain(offset.iter()) {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: g.dim(),
                });
            }
        }
        Ok(Self {
            dim,
            generators,
            offset,
        })
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Parameter-space dimension.
    pub fn n_params(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[HermitianMatrix] {
        &self.generators
    }

    pub fn offset(&self) -> Option<&HermitianMatrix> {
        self.offset.as_ref()
    }

    pub fn eval_hamiltonian(&self, point: &[f64]) -> Result<HermitianMatrix> {
        if point.len() != self.n_params() {
            return Err(Error::DimensionMismatch {
                expected: self.n_params(),
                actual: point.len(),
            });
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("parameter point"));
        }
        let mut h = self
            .offset
            .clone()
            .unwrap_or_else(|| HermitianMatrix::zeros(self.dim));
        for (g, &x) in self.generators.iter().zip(point) {
            if x != 0.0 {
                h = h.add_scaled(x, g);
            }
        }
        Ok(h)
    }

    pub fn eigenframe(&self, point: &[f64], band_tol: f64) -> Result<EigenFrame> {
        eigenframe(self, point, band_tol)
    }
}

/// `H(λ) = λᵏ σₖ` on C², with eigenvalues `±|λ|`.
pub fn spin_half_model() -> HermitianModel {
    HermitianModel::new(pauli().to_vec(), None).expect("Pauli matrices share dimension 2")
}

/// Closed-form eigenvectors `(φ₊, φ₋)` of the spin-½ model in spherical
/// coordinates, in the gauge where the lower component is real positive.
pub fn spin_half_frame(theta: f64, phi: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::ChartSingularity(format!(
            "theta = {theta} outside (0, pi)"
        )));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, -phi);
    let plus = vec![e * c, C64::new(s, 0.0)];
    let minus = vec![e * (-s), C64::new(c, 0.0)];
    Ok((plus, minus))
}

/// The five mutually anticommuting 4×4 Hermitian matrices
/// `σ₁⊗1, σ₂⊗1, σ₃⊗σ₁, σ₃⊗σ₂, σ₃⊗σ₃`.
pub fn gamma_matrices() -> [HermitianMatrix; 5] {
    let [sx, sy, sz] = pauli();
    let id = ComplexMatrix::identity(2);
    let h = |m: ComplexMatrix| {
        HermitianMatrix::new(m).expect("Kronecker product of Hermitian matrices")
    };
    [
        h(kron(&sx, &id)),
        h(kron(&sy, &id)),
        h(kron(&sz, &sx)),
        h(kron(&sz, &sy)),
        h(kron(&sz, &sz)),
    ]
}

/// `H(λ) = Σ_{k=1..5} λᵏ Γₖ` on C⁴: two doubly degenerate levels `±|λ|`
/// for every `λ ≠ 0`.
pub fn degenerate_example_model() -> HermitianModel {
    HermitianModel::new(gamma_matrices().to_vec(), None).expect("gamma matrices share dimension 4")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BandSelector {
    /// Band number counted from the lowest energy.
    Index { index: usize, multiplicity: usize },
    /// The band whose mean energy is closest to `energy`.
    Energy { energy: f64, multiplicity: usize },
}

impl BandSelector {
    pub fn index(index: usize, multiplicity: usize) -> Self {
        Self::Index {
            index,
            multiplicity,
        }
    }

    pub fn multiplicity(&self) -> usize {
        match *self {
            Self::Index { multiplicity, .. } | Self::Energy { multiplicity, .. } => multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    pub point: Vec<f64>,
    pub decomposition: EigenDecomposition,
    /// Contiguous eigenvalue index ranges, ascending in energy.
    pub bands: Vec<Range<usize>>,
    pub band_tol: f64,
}

impl EigenFrame {
    /// Resolves a selector to its eigenvalue index range, checking multiplicity.
    pub fn resolve(&self, band: &BandSelector) -> Result<Range<usize>> {
        let range = match *band {
            BandSelector::Index { index, .. } => {
                self.bands.get(index).cloned().ok_or(Error::NoSuchBand {
                    index,
                    available: self.bands.len(),
                })?
            }
            BandSelector::Energy { energy, .. } => self
                .bands
                .iter()
                .min_by(|a, b| {
                    (self.band_energy(a) - energy)
                        .abs()
                        .total_cmp(&(self.band_energy(b) - energy).abs())
                })
                .cloned()
                .expect("a frame always has at least one band"),
        };
        if range.len() != band.multiplicity() {
            return Err(Error::MultiplicityMismatch {
                expected: band.multiplicity(),
                actual: range.len(),
            });
        }
        Ok(range)
    }

    /// Mean eigenvalue over a band.
    pub fn band_energy(&self, range: &Range<usize>) -> f64 {
        let e = &self.decomposition.eigenvalues[range.clone()];
        e.iter().sum::<f64>() / e.len() as f64
    }

    /// Eigenvector columns of the selected band (dim × r), raw solver gauge.
    pub fn band_columns(&self, band: &BandSelector) -> Result<ComplexMatrix> {
        let range = self.resolve(band)?;
        Ok(self.decomposition.eigenvectors.select_columns(range))
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.bands.iter().map(Range::len).collect()
    }
}

pub fn eigenframe(model: &HermitianModel, point: &[f64], band_tol: f64) -> Result<EigenFrame> {
    if !(band_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "band_tol must be positive, got {band_tol}"
        )));
    }
    let h = model.eval_hamiltonian(point)?;
    let decomposition = linalg::hermitian_eigen(&h)?;
    let bands = group_bands(&decomposition.eigenvalues, band_tol)?;
    Ok(EigenFrame {
        point: point.to_vec(),
        decomposition,
        bands,
        band_tol,
    })
}

/// Splits ascending eigenvalues into bands. Gaps in `(tol, 2 tol)` are refused.
fn group_bands(eigenvalues: &[f64], tol: f64) -> Result<Vec<Range<usize>>> {
    let mut bands = Vec::new();
    let mut start = 0;
    for i in 1..eigenvalues.len() {
        let gap = eigenvalues[i] - eigenvalues[i - 1];
        if gap <= tol {
            continue;
        }
        if gap < 2.0 * tol {
            return Err(Error::AmbiguousBanding { spacing: gap, tol });
        }
        bands.push(start..i);
        start = i;
    }
    bands.push(start..eigenvalues.len());
    for b in &bands {
        let spread = eigenvalues[b.end - 1] - eigenvalues[b.start];
        if spread > tol {
            return Err(Error::AmbiguousBanding {
                spacing: spread,
                tol,
            });
        }
    }
    Ok(bands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, ONE, ZERO};
    use proptest::prelude::*;

    fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        &(a * b) + &(b * a)
    }

    #[test]
    fn spin_half_hamiltonian_values() {
        let m = spin_half_model();
        let [_, _, sz] = pauli();
        assert_eq!(m.eval_hamiltonian(&[0.0, 0.0, 1.0]).unwrap(), sz);
        assert_eq!(
            m.eval_hamiltonian(&[0.0; 3]).unwrap(),
            HermitianMatrix::zeros(2)
        );
        let h = m.eval_hamiltonian(&[1.0, 1.0, 0.0]).unwrap();
        let expected = ComplexMatrix::from_rows(&[
            vec![ZERO, C64::new(1.0, -1.0)],
            vec![C64::new(1.0, 1.0), ZERO],
        ])
        .unwrap();
        assert_eq!(*h.as_matrix(), expected);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        assert!(matches!(
            spin_half_model().eval_hamiltonian(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        ));
    }

    #[test]
    fn model_rejects_mixed_dimensions() {
        let [sx, ..] = pauli();
        let g = gamma_matrices()[0].clone();
        assert!(HermitianModel::new(vec![sx, g], None).is_err());
    }

    #[test]
    fn spin_half_spectrum() {
        let f = spin_half_model()
            .eigenframe(&[1.0, 2.0, 2.0], DEFAULT_BAND_TOL)
            .unwrap();
        assert!((f.decomposition.eigenvalues[0] + 3.0).abs() < 1e-12);
        assert!((f.decomposition.eigenvalues[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_generators_traceless_and_anticommuting() {
        let m = spin_half_model();
        let g = m.generators();
        for j in 0..3 {
            assert_eq!(g[j].trace(), ZERO);
            for k in 0..3 {
                let ac = anticommutator(&g[j], &g[k]);
                let expected = if j == k {
                    ComplexMatrix::identity(2).scale_real(2.0)
                } else {
                    ComplexMatrix::zeros(2, 2)
                };
                assert!((&ac - &expected).max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn spin_half_frame_values() {
        let (p, m) = spin_half_frame(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p[0] - C64::new(r, 0.0)).norm() < 1e-15);
        assert!((p[1] - C64::new(r, 0.0)).norm() < 1e-15);
        assert!(inner(&p, &m).unwrap().norm() < 1e-15);
        assert!(spin_half_frame(0.0, 0.0).is_err());
        assert!(spin_half_frame(std::f64::consts::PI, 0.0).is_err());
    }

    #[test]
    fn spin_half_frame_diagonalizes_hamiltonian() {
        let model = spin_half_model();
        for &(theta, phi, r) in &[(0.3, 0.1, 1.0), (1.2, 2.5, 2.0), (2.9, -1.0, 0.5)] {
            let (p, m) = spin_half_frame(theta, phi).unwrap();
            let lam = [
                r * theta.sin() * phi.cos(),
                r * theta.sin() * phi.sin(),
                r * theta.cos(),
            ];
            let h = model.eval_hamiltonian(&lam).unwrap();
            for (v, e) in [(&p, r), (&m, -r)] {
                let hv = h.mul_vec(v).unwrap();
                let res: f64 = hv
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| (a - b * e).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-12, "residual {res}");
            }
        }
    }

    #[test]
    fn gamma_matrices_anticommute() {
        let g = gamma_matrices();
        for j in 0..5 {
            for k in 0..5 {
                let ac = anticommutator(&g[j], &g[k]);
                let expected = if j == k {
                    ComplexMatrix::identity(4).scale_real(2.0)
                } else {
                    ComplexMatrix::zeros(4, 4)
                };
                assert!((&ac - &expected).max_abs() < 1e-15, "({j},{k})");
            }
        }
    }

    #[test]
    fn degenerate_model_spectrum() {
        let m = degenerate_example_model();
        assert_eq!((m.dim(), m.n_params()), (4, 5));
        let f = m
            .eigenframe(&[1.0, 0.0, 0.0, 0.0, 0.0], DEFAULT_BAND_TOL)
            .unwrap();
        for (e, x) in f
            .decomposition
            .eigenvalues
            .iter()
            .zip([-1.0, -1.0, 1.0, 1.0])
        {
            assert!((e - x).abs() < 1e-12);
        }
        assert_eq!(f.multiplicities(), vec![2, 2]);
        let f = m
            .eigenframe(&[0.3, -0.2, 0.7, 0.1, -0.5], DEFAULT_BAND_TOL)
            .unwrap();
        assert_eq!(f.multiplicities(), vec![2, 2]);
        assert_eq!(f.resolve(&BandSelector::index(1, 2)).unwrap(), 2..4);
    }

    #[test]
    fn eigenframe_banding() {
        let spin = spin_half_model();
        assert_eq!(
            spin.eigenframe(&[0.0, 0.0, 1.0], 1e-8)
                .unwrap()
                .multiplicities(),
            vec![1, 1]
        );
        assert_eq!(
            spin.eigenframe(&[0.0, 0.0, 0.0], 1e-8)
                .unwrap()
                .multiplicities(),
            vec![2]
        );
        assert!(spin.eigenframe(&[0.0, 0.0, 1.0], 0.0).is_err());
        // Spacing 2|λ| = 1.5e-8 sits in (tol, 2 tol).
        assert!(matches!(
            spin.eigenframe(&[0.0, 0.0, 0.75e-8], 1e-8),
            Err(Error::AmbiguousBanding { .. })
        ));
    }

    #[test]
    fn band_selection() {
        let f = spin_half_model()
            .eigenframe(&[0.0, 0.0, 1.0], 1e-8)
            .unwrap();
        assert_eq!(f.resolve(&BandSelector::index(1, 1)).unwrap(), 1..2);
        assert_eq!(
            f.resolve(&BandSelector::Energy {
                energy: -0.9,
                multiplicity: 1
            })
            .unwrap(),
            0..1
        );
        assert!(matches!(
            f.resolve(&BandSelector::index(2, 1)),
            Err(Error::NoSuchBand { .. })
        ));
        assert!(matches!(
            f.resolve(&BandSelector::index(0, 2)),
            Err(Error::MultiplicityMismatch { .. })
        ));
        let cols = f.band_columns(&BandSelector::index(1, 1)).unwrap();
        assert_eq!(cols.column(0), vec![ONE, ZERO]);
    }

    proptest! {
        #[test]
        fn eval_is_affine(
            a in -2.0f64..2.0, b in -2.0f64..2.0,
            l1 in prop::array::uniform3(-2.0f64..2.0),
            l2 in prop::array::uniform3(-2.0f64..2.0),
        ) {
            let [sx, ..] = pauli();
            let model = HermitianModel::new(pauli().to_vec(), Some(sx)).unwrap();
            let mix: Vec<f64> = l1.iter().zip(&l2).map(|(x, y)| a * x + b * y).collect();
            let lhs = model.eval_hamiltonian(&mix).unwrap();
            let h1 = model.eval_hamiltonian(&l1).unwrap();
            let h2 = model.eval_hamiltonian(&l2).unwrap();
            let h0 = model.offset().unwrap();
            let rhs = &(&h1.scale_real(a) + &h2.scale_real(b)) + &h0.scale_real(1.0 - a - b);
            prop_assert!((lhs.as_matrix() - &rhs).max_abs() < 1e-13);
        }

        #[test]
        fn multiplicities_scale_invariant(
            lam in prop::array::uniform5(-1.0f64..1.0),
            c in 0.1f64..10.0,
        ) {
            let norm: f64 = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
            let norm3: f64 = lam[..3].iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3 && norm3 > 1e-3);
            let scaled: Vec<f64> = lam.iter().map(|x| c * x).collect();
            let m = degenerate_example_model();
            prop_assert_eq!(
                m.eigenframe(&lam, DEFAULT_BAND_TOL).unwrap().multiplicities(),
                m.eigenframe(&scaled, DEFAULT_BAND_TOL).unwrap().multiplicities()
            );
            let s = spin_half_model();
            prop_assert_eq!(
                s.eigenframe(&lam[..3], DEFAULT_BAND_TOL).unwrap().multiplicities(),
                s.eigenframe(&scaled[..3], DEFAULT_BAND_TOL).unwrap().multiplicities()
            );
        }
    }
}
