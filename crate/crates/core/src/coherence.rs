//! Density-matrix treatment of the level shifts: evolution under commuting
//! Hamiltonian paths, the work cost of sudden quenches that excite
//! coherences, and the active correction unitary that restores the
//! incoherent work cost.
//!
//! Everything here is 2x2; matrices are stored as plain arrays of
//! `Complex64` with Hermiticity enforced at construction.

use num_complex::Complex64;

use crate::error::{Error, Result};

type Mat2 = [[Complex64; 2]; 2];

const HERMITICITY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

fn mat_trace(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

fn is_hermitian(a: &Mat2) -> bool {
    (a[0][0].im).abs() <= HERMITICITY_TOL
        && (a[1][1].im).abs() <= HERMITICITY_TOL
        && (a[0][1] - a[1][0].conj()).norm() <= HERMITICITY_TOL
}

/// Eigen-pairs of a 2x2 Hermitian matrix, ascending by eigenvalue, each
/// eigenvector normalized with its first non-negligible component made real
/// and positive.
fn hermitian_eigen(a: &Mat2) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let diag_low = a[0][0].re;
    let diag_high = a[1][1].re;
    let off = a[1][0];
    let mid = 0.5 * (diag_low + diag_high);
    let half_gap = 0.5 * (diag_low - diag_high);
    let radius = (half_gap * half_gap + off.norm_sqr()).sqrt();
    let values = [mid - radius, mid + radius];

    let vector_for = |lambda: f64| -> [Complex64; 2] {
        // Two candidate rows of (A - lambda I); pick the better conditioned.
        let candidate_a = [c(a[0][1].re, a[0][1].im), c(lambda - diag_low, 0.0)];
        let candidate_b = [c(lambda - diag_high, 0.0), c(off.re, off.im)];
        let norm_a = (candidate_a[0].norm_sqr() + candidate_a[1].norm_sqr()).sqrt();
        let norm_b = (candidate_b[0].norm_sqr() + candidate_b[1].norm_sqr()).sqrt();
        let (mut v, norm) = if norm_a >= norm_b {
            (candidate_a, norm_a)
        } else {
            (candidate_b, norm_b)
        };
        if norm == 0.0 {
            // Degenerate (diagonal) case: fall back to the basis vectors.
            return if lambda == values[0] {
                [c(1.0, 0.0), c(0.0, 0.0)]
            } else {
                [c(0.0, 0.0), c(1.0, 0.0)]
            };
        }
        v[0] /= norm;
        v[1] /= norm;
        canonical_phase(v)
    };

    let mut vectors = [vector_for(values[0]), vector_for(values[1])];
    if radius == 0.0 {
        vectors = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    }
    (values, vectors)
}

/// Rotates a vector's global phase so its first component of appreciable
/// magnitude is real and positive.
fn canonical_phase(v: [Complex64; 2]) -> [Complex64; 2] {
    let pivot = if v[0].norm() > 1e-9 { v[0] } else { v[1] };
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

/// A 2x2 Hermitian Hamiltonian with its eigen-decomposition (energies
/// ascending).
#[derive(Debug, Clone)]
pub struct Hamiltonian2 {
    matrix: Mat2,
    energies: [f64; 2],
    eigenvectors: [[Complex64; 2]; 2],
}

impl Hamiltonian2 {
    pub fn from_matrix(matrix: Mat2) -> Result<Self> {
        if !matrix
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::InvalidConfig {
                field: "hamiltonian",
                reason: "entries must be finite".to_string(),
            });
        }
        if !is_hermitian(&matrix) {
            return Err(Error::InvalidConfig {
                field: "hamiltonian",
                reason: "matrix is not Hermitian".to_string(),
            });
        }
        let (energies, eigenvectors) = hermitian_eigen(&matrix);
        Ok(Self {
            matrix,
            energies,
            eigenvectors,
        })
    }

    /// Diagonal Hamiltonian `diag(e_low, e_high)`.
    pub fn diagonal(e_low: f64, e_high: f64) -> Self {
        Self::from_matrix([
            [c(e_low, 0.0), Complex64::ZERO],
            [Complex64::ZERO, c(e_high, 0.0)],
        ])
        .expect("diagonal real matrix is Hermitian")
    }

    /// Hamiltonian with energies `(e_low, e_high)` whose eigenbasis is the
    /// standard basis rotated by `theta`.
    pub fn rotated(e_low: f64, e_high: f64, theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        let rotation: Mat2 = [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]];
        let diagonal: Mat2 = [
            [c(e_low, 0.0), Complex64::ZERO],
            [Complex64::ZERO, c(e_high, 0.0)],
        ];
        let matrix = mat_mul(&mat_mul(&rotation, &diagonal), &mat_adjoint(&rotation));
        Self::from_matrix(matrix).expect("rotated Hermitian matrix stays Hermitian")
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn energies(&self) -> [f64; 2] {
        self.energies
    }

    /// Normalized eigenvector of the `i`-th energy (phase-canonical).
    pub fn eigenvector(&self, i: usize) -> [Complex64; 2] {
        self.eigenvectors[i]
    }

    fn splitting(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    fn require_non_degenerate(&self) -> Result<()> {
        let scale = self
            .matrix
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(1.0f64, f64::max);
        if self.splitting() <= HERMITICITY_TOL * scale {
            return Err(Error::DegenerateSpectrum {
                splitting: self.splitting(),
            });
        }
        Ok(())
    }
}

/// A 2x2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix2 {
    matrix: Mat2,
}

impl DensityMatrix2 {
    pub fn from_matrix(matrix: Mat2) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidConfig {
            field: "density_matrix",
            reason,
        };
        if !is_hermitian(&matrix) {
            return Err(invalid("matrix is not Hermitian".to_string()));
        }
        let trace = mat_trace(&matrix).re;
        if (trace - 1.0).abs() > HERMITICITY_TOL {
            return Err(invalid(format!("trace is {trace}, expected 1")));
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix);
        if eigenvalues[0] < -HERMITICITY_TOL {
            return Err(invalid(format!("negative eigenvalue {}", eigenvalues[0])));
        }
        Ok(Self { matrix })
    }

    /// Diagonal state `diag(p_lower, p_upper)` in the standard basis.
    pub fn diagonal(p_lower: f64, p_upper: f64) -> Result<Self> {
        Self::from_matrix([
            [c(p_lower, 0.0), Complex64::ZERO],
            [Complex64::ZERO, c(p_upper, 0.0)],
        ])
    }

    /// Incoherent mixture of a Hamiltonian's eigenstates with weights
    /// `(p_low, p_high)` on the (ascending) energy eigenvectors.
    pub fn mixture(basis: &Hamiltonian2, p_low: f64, p_high: f64) -> Result<Self> {
        if !(p_low.is_finite() && p_high.is_finite())
            || p_low < -HERMITICITY_TOL
            || p_high < -HERMITICITY_TOL
            || (p_low + p_high - 1.0).abs() > HERMITICITY_TOL
        {
            return Err(Error::InvalidConfig {
                field: "density_matrix",
                reason: format!("weights ({p_low}, {p_high}) are not a distribution"),
            });
        }
        let mut matrix = [[Complex64::ZERO; 2]; 2];
        for (weight, vector) in [
            (p_low, basis.eigenvector(0)),
            (p_high, basis.eigenvector(1)),
        ] {
            for i in 0..2 {
                for j in 0..2 {
                    matrix[i][j] += weight * vector[i] * vector[j].conj();
                }
            }
        }
        // Projector sums are Hermitian up to round-off; symmetrize exactly.
        let symmetric = [
            [c(matrix[0][0].re, 0.0), matrix[0][1]],
            [matrix[0][1].conj(), c(matrix[1][1].re, 0.0)],
        ];
        Self::from_matrix(symmetric)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Population on the `i`-th eigenvector of `basis`.
    pub fn population(&self, basis: &Hamiltonian2, i: usize) -> f64 {
        let v = basis.eigenvector(i);
        let mut acc = Complex64::ZERO;
        for (row, vi) in v.iter().enumerate() {
            for (col, vj) in v.iter().enumerate() {
                acc += vi.conj() * self.matrix[row][col] * *vj;
            }
        }
        acc.re
    }

    /// Magnitude of the off-diagonal element in `basis`'s eigenbasis.
    pub fn coherence_in(&self, basis: &Hamiltonian2) -> f64 {
        let a = basis.eigenvector(0);
        let b = basis.eigenvector(1);
        let mut acc = Complex64::ZERO;
        for (row, ai) in a.iter().enumerate() {
            for (col, bj) in b.iter().enumerate() {
                acc += ai.conj() * self.matrix[row][col] * *bj;
            }
        }
        acc.norm()
    }

    /// Eigenvalues of the state, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian_eigen(&self.matrix).0
    }

    fn conjugate_by(&self, u: &Mat2) -> Self {
        Self {
            matrix: mat_mul(&mat_mul(u, &self.matrix), &mat_adjoint(u)),
        }
    }
}

/// A 2x2 unitary.
#[derive(Debug, Clone)]
pub struct Unitary2 {
    matrix: Mat2,
}

impl Unitary2 {
    pub fn from_matrix(matrix: Mat2) -> Result<Self> {
        let product = mat_mul(&matrix, &mat_adjoint(&matrix));
        let identity_error = (product[0][0] - c(1.0, 0.0)).norm()
            + product[0][1].norm()
            + product[1][0].norm()
            + (product[1][1] - c(1.0, 0.0)).norm();
        if identity_error > 4.0 * HERMITICITY_TOL {
            return Err(Error::InvalidConfig {
                field: "unitary",
                reason: format!("U U^dag deviates from identity by {identity_error:.3e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    /// Applies the unitary to a column vector.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.matrix[0][0] * v[0] + self.matrix[0][1] * v[1],
            self.matrix[1][0] * v[0] + self.matrix[1][1] * v[1],
        ]
    }
}

/// One level shift along the commuting (always-diagonal) Hamiltonian path:
/// free evolution over a step of duration `tau` while the upper level moves
/// from `n * step_energy` to `(n+1) * step_energy`. The accumulated phase is
/// `step_energy * (n + 1/2) * tau`; a state diagonal in the shared eigenbasis
/// is returned exactly unchanged.
pub fn diagonal_path_step(
    state: &DensityMatrix2,
    n: u32,
    step_energy: f64,
    tau: f64,
) -> DensityMatrix2 {
    assert!(step_energy.is_finite() && tau.is_finite());
    let phase = step_energy * (n as f64 + 0.5) * tau;
    let rotation = Complex64::from_polar(1.0, -phase);
    let m = state.matrix();
    // Conjugation by diag(1, e^{-i phase}) leaves the diagonal untouched and
    // rotates only the off-diagonal pair.
    let matrix = [
        [m[0][0], m[0][1] * rotation.conj()],
        [m[1][0] * rotation, m[1][1]],
    ];
    DensityMatrix2 { matrix }
}

/// Work cost of an instantaneous Hamiltonian change with the state left
/// untouched: `Tr(rho H_new) - Tr(rho H_old)`.
pub fn sudden_quench_work(
    state: &DensityMatrix2,
    h_old: &Hamiltonian2,
    h_new: &Hamiltonian2,
) -> f64 {
    let before = mat_trace(&mat_mul(state.matrix(), h_old.matrix())).re;
    let after = mat_trace(&mat_mul(state.matrix(), h_new.matrix())).re;
    after - before
}

/// Average work of a sudden quench in the two-measurement picture with
/// `E_a = E_a' = 0`: `p_b (e_b' - e_b) + (p_a - p_b) p(a -> b') e_b'`.
/// The transition probabilities are doubly stochastic, which is what reduces
/// the four-outcome average to this form.
pub fn coherent_average_work(
    p_a: f64,
    p_b: f64,
    p_a_to_bprime: f64,
    e_b: f64,
    e_bprime: f64,
) -> f64 {
    assert!(
        (p_a + p_b - 1.0).abs() <= HERMITICITY_TOL,
        "occupation probabilities must sum to 1"
    );
    assert!(
        (0.0..=1.0).contains(&p_a_to_bprime),
        "transition probability must lie in [0, 1]"
    );
    p_b * (e_bprime - e_b) + (p_a - p_b) * p_a_to_bprime * e_bprime
}

/// The basis-change unitary mapping each old energy eigenvector to the new
/// eigenvector of the same (ascending) rank: `U = sum_i |new_i><old_i|`.
/// The per-vector phases follow the canonical real-positive-pivot convention;
/// degenerate spectra are rejected because the pairing would be ambiguous.
pub fn correction_unitary(h_old: &Hamiltonian2, h_new: &Hamiltonian2) -> Result<Unitary2> {
    h_old.require_non_degenerate()?;
    h_new.require_non_degenerate()?;
    let mut matrix = [[Complex64::ZERO; 2]; 2];
    for rank in 0..2 {
        let old = h_old.eigenvector(rank);
        let new = h_new.eigenvector(rank);
        for i in 0..2 {
            for j in 0..2 {
                matrix[i][j] += new[i] * old[j].conj();
            }
        }
    }
    Unitary2::from_matrix(matrix)
}

/// Result of an actively corrected quench.
#[derive(Debug, Clone, Copy)]
pub struct CorrectedQuench {
    /// Work cost with the correction unitary applied before re-measuring the
    /// energy: `Tr(U rho U^dag H_new) - Tr(rho H_old)`.
    pub work: f64,
    /// Set when the input state carried coherence in the old eigenbasis, in
    /// which case the protocol's diagonality precondition was violated and
    /// the incoherent-cost identity need not hold.
    pub precondition_violated: bool,
}

/// Applies the correction unitary during the quench, restoring the work cost
/// `sum_i P_i (E_i_new - E_i_old)` of a coherence-free shift.
pub fn corrected_quench_work(
    state: &DensityMatrix2,
    h_old: &Hamiltonian2,
    h_new: &Hamiltonian2,
) -> Result<CorrectedQuench> {
    let unitary = correction_unitary(h_old, h_new)?;
    let rotated = state.conjugate_by(unitary.matrix());
    let before = mat_trace(&mat_mul(state.matrix(), h_old.matrix())).re;
    let after = mat_trace(&mat_mul(rotated.matrix(), h_new.matrix())).re;
    Ok(CorrectedQuench {
        work: after - before,
        precondition_violated: state.coherence_in(h_old) > HERMITICITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    #[test]
    fn diagonal_states_pass_through_path_steps_unchanged() {
        let state = DensityMatrix2::diagonal(0.7, 0.3).unwrap();
        for n in [0u32, 3, 17] {
            for tau in [0.0, 0.1, 2.5] {
                let stepped = diagonal_path_step(&state, n, 0.8, tau);
                assert_eq!(stepped.matrix(), state.matrix());
            }
        }
    }

    #[test]
    fn path_step_rotates_coherences_by_the_expected_phase() {
        let coherence = 0.21;
        let state = DensityMatrix2::from_matrix([
            [c(0.6, 0.0), c(coherence, 0.0)],
            [c(coherence, 0.0), c(0.4, 0.0)],
        ])
        .unwrap();
        let n = 2u32;
        let step_energy = 0.9;
        let tau = 1.3;
        let stepped = diagonal_path_step(&state, n, step_energy, tau);
        let phase = step_energy * (n as f64 + 0.5) * tau;
        let expected = c(coherence, 0.0) * Complex64::from_polar(1.0, -phase);
        assert!((stepped.matrix()[1][0] - expected).norm() < TOL);
        // Unitarity: spectrum is untouched.
        let before = state.eigenvalues();
        let after = stepped.eigenvalues();
        assert!((before[0] - after[0]).abs() < TOL);
        assert!((before[1] - after[1]).abs() < TOL);

        let frozen = diagonal_path_step(&state, n, step_energy, 0.0);
        assert_eq!(frozen.matrix(), state.matrix());
    }

    #[test]
    fn sudden_quench_work_closed_forms() {
        let h = Hamiltonian2::diagonal(0.0, 1.0);
        let state = DensityMatrix2::diagonal(0.8, 0.2).unwrap();
        assert_eq!(sudden_quench_work(&state, &h, &h), 0.0);

        let widened = Hamiltonian2::diagonal(0.0, 1.0 + 0.5);
        assert!((sudden_quench_work(&state, &h, &widened) - 0.2 * 0.5).abs() < TOL);
    }

    #[test]
    fn sudden_quench_work_matches_direct_trace_oracle() {
        // Oracle: explicit 2x2 trace arithmetic for diag(0.8, 0.2), old gaps
        // (0, 1), new gaps (0, 2) in a basis rotated by pi/6.
        let state = DensityMatrix2::diagonal(0.8, 0.2).unwrap();
        let h_old = Hamiltonian2::diagonal(0.0, 1.0);
        let h_new = Hamiltonian2::rotated(0.0, 2.0, std::f64::consts::FRAC_PI_6);

        let theta = std::f64::consts::FRAC_PI_6;
        let expected_after = 0.8 * 2.0 * theta.sin().powi(2) + 0.2 * 2.0 * theta.cos().powi(2);
        let expected = expected_after - 0.2;
        assert!((expected - 0.5).abs() < TOL);
        assert!((sudden_quench_work(&state, &h_old, &h_new) - expected).abs() < TOL);
    }

    #[test]
    fn coherent_average_work_closed_forms() {
        // No coherent excitation: only the occupied-level shift is paid.
        assert!((coherent_average_work(0.8, 0.2, 0.0, 1.0, 2.5) - 0.2 * 1.5).abs() < TOL);
        // Balanced populations: the transition term cancels.
        assert!((coherent_average_work(0.5, 0.5, 0.7, 1.0, 3.0) - 0.5 * 2.0).abs() < TOL);
        // Worked example.
        assert!((coherent_average_work(0.8, 0.2, 0.25, 1.0, 2.0) - 0.5).abs() < TOL);
    }

    #[test]
    fn measurement_model_agrees_with_the_trace_definition() {
        // For a state diagonal in the old basis, the two-measurement average
        // with Born-rule (doubly stochastic) transitions equals the trace
        // difference.
        for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_6, 1.2] {
            let p_a = 0.75;
            let p_b = 0.25;
            let e_b = 0.8;
            let e_bprime = 1.7;
            let h_old = Hamiltonian2::diagonal(0.0, e_b);
            let h_new = Hamiltonian2::rotated(0.0, e_bprime, theta);
            let state = DensityMatrix2::diagonal(p_a, p_b).unwrap();
            let overlap = theta.sin().powi(2);
            let model = coherent_average_work(p_a, p_b, overlap, e_b, e_bprime);
            let trace = sudden_quench_work(&state, &h_old, &h_new);
            assert!((model - trace).abs() < TOL, "theta={theta}");
        }
    }

    #[test]
    fn correction_unitary_maps_old_eigenvectors_to_new() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h_old = random_hamiltonian(&mut rng);
            let h_new = random_hamiltonian(&mut rng);
            let unitary = correction_unitary(&h_old, &h_new).unwrap();

            // Residual oracle: U |old_i> must be proportional to |new_i>.
            for rank in 0..2 {
                let mapped = unitary.apply(h_old.eigenvector(rank));
                let target = h_new.eigenvector(rank);
                let overlap = (mapped[0].conj() * target[0] + mapped[1].conj() * target[1]).norm();
                assert!((overlap - 1.0).abs() < TOL);
            }
        }
    }

    #[test]
    fn correction_unitary_is_identity_for_equal_hamiltonians() {
        let h = Hamiltonian2::rotated(0.2, 1.4, 0.7);
        let unitary = correction_unitary(&h, &h).unwrap();
        assert!((unitary.matrix()[0][0] - c(1.0, 0.0)).norm() < 1e-9);
        assert!((unitary.matrix()[1][1] - c(1.0, 0.0)).norm() < 1e-9);
        assert!(unitary.matrix()[0][1].norm() < 1e-9);
        assert!(unitary.matrix()[1][0].norm() < 1e-9);
    }

    #[test]
    fn correction_unitary_recovers_the_basis_rotation() {
        let theta = 0.35;
        let h_old = Hamiltonian2::diagonal(0.0, 1.0);
        let h_new = Hamiltonian2::rotated(0.0, 1.0, theta);
        let unitary = correction_unitary(&h_old, &h_new).unwrap();
        assert!((unitary.matrix()[0][0].re - theta.cos()).abs() < 1e-9);
        assert!((unitary.matrix()[1][0].re - theta.sin()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_spectra_are_rejected() {
        let flat = Hamiltonian2::diagonal(1.0, 1.0);
        let other = Hamiltonian2::diagonal(0.0, 1.0);
        assert!(matches!(
            correction_unitary(&flat, &other),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn corrected_quench_restores_the_incoherent_cost() {
        let h_old = Hamiltonian2::diagonal(0.0, 1.0);
        let state = DensityMatrix2::diagonal(0.8, 0.2).unwrap();
        for theta in [0.0, 0.4, 1.1] {
            let h_new = Hamiltonian2::rotated(0.0, 2.0, theta);
            let outcome = corrected_quench_work(&state, &h_old, &h_new).unwrap();
            assert!(!outcome.precondition_violated);
            assert!((outcome.work - 0.2).abs() < TOL, "theta={theta}");
        }

        let h_same = Hamiltonian2::rotated(0.0, 1.0, 0.9);
        let mixed = DensityMatrix2::mixture(&h_same, 0.6, 0.4).unwrap();
        let outcome = corrected_quench_work(&mixed, &h_same, &h_same).unwrap();
        assert!(outcome.work.abs() < TOL);
    }

    #[test]
    fn coherent_states_raise_the_precondition_flag() {
        let h_old = Hamiltonian2::diagonal(0.0, 1.0);
        let h_new = Hamiltonian2::rotated(0.0, 2.0, 0.3);
        let coherent =
            DensityMatrix2::from_matrix([[c(0.6, 0.0), c(0.2, 0.1)], [c(0.2, -0.1), c(0.4, 0.0)]])
                .unwrap();
        let outcome = corrected_quench_work(&coherent, &h_old, &h_new).unwrap();
        assert!(outcome.precondition_violated);
    }

    fn random_hamiltonian(rng: &mut ChaCha8Rng) -> Hamiltonian2 {
        let gap = 0.2 + rng.random::<f64>() * 2.0;
        let base = rng.random::<f64>() - 0.5;
        let theta = rng.random::<f64>() * std::f64::consts::PI;
        Hamiltonian2::rotated(base, base + gap, theta)
    }

    #[test]
    fn uncorrected_quenches_never_beat_corrected_ones_under_the_stated_conditions() {
        // Majority population on the lower level and a widening gap.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p_low = 0.5 + 0.5 * rng.random::<f64>();
            let gap_old = 0.1 + rng.random::<f64>();
            let gap_new = gap_old + rng.random::<f64>();
            let theta_old = rng.random::<f64>() * std::f64::consts::PI;
            let theta_new = rng.random::<f64>() * std::f64::consts::PI;
            let h_old = Hamiltonian2::rotated(0.0, gap_old, theta_old);
            let h_new = Hamiltonian2::rotated(0.0, gap_new, theta_new);
            let state = DensityMatrix2::mixture(&h_old, p_low, 1.0 - p_low).unwrap();

            let corrected = corrected_quench_work(&state, &h_old, &h_new).unwrap();
            let sudden = sudden_quench_work(&state, &h_old, &h_new);
            let incoherent = p_low * (h_new.energies()[0] - h_old.energies()[0])
                + (1.0 - p_low) * (h_new.energies()[1] - h_old.energies()[1]);
            assert!((corrected.work - incoherent).abs() < TOL);
            assert!(sudden >= corrected.work - TOL);
        }
    }

    #[test]
    fn mixture_populations_round_trip() {
        let h = Hamiltonian2::rotated(0.0, 1.3, 0.8);
        let state = DensityMatrix2::mixture(&h, 0.65, 0.35).unwrap();
        assert!((state.population(&h, 0) - 0.65).abs() < TOL);
        assert!((state.population(&h, 1) - 0.35).abs() < TOL);
        assert!(state.coherence_in(&h) < TOL);
    }

    #[test]
    fn constructors_validate_their_matrices() {
        assert!(Hamiltonian2::from_matrix([
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.5, 0.0), c(1.0, 0.0)],
        ])
        .is_err());
        assert!(DensityMatrix2::diagonal(0.9, 0.2).is_err());
        assert!(DensityMatrix2::diagonal(1.2, -0.2).is_err());
        assert!(
            Unitary2::from_matrix([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)],])
                .is_err()
        );
    }
}
