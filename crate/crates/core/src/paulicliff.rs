//! Generalized Pauli operators, the Clifford generators `X`, `H_d`, `P`, and an
//! operational Clifford membership test by conjugation.
//!
//! Named gates keep their phases as integer exponents over a `K_d`-th root of
//! unity (`K_d = d` for odd `d`, `2d` for even `d`); complex values are only
//! produced when a matrix is materialized.

use serde::{Deserialize, Serialize};

use crate::arith::{self, SL2Element};
use crate::error::{Error, Result};
use crate::matrix::{c, root_of_unity, CMatrix, UnitaryMatrix, C64, UNITARY_TOL};

/// Tolerance for entrywise up-to-phase matching.
pub const MATCH_TOL: f64 = 1e-9;

/// Order of the Heisenberg phase root: `d` for odd `d`, `2d` for even `d`.
pub fn phase_modulus(d: u64) -> u64 {
    if d.is_multiple_of(2) {
        2 * d
    } else {
        d
    }
}

fn check_dim(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d as i64,
            reason: "qudit dimension must be >= 2",
        });
    }
    Ok(())
}

/// Label of `phase · X^a Z^b`, with `phase = exp(2πi·phase_exp/K_d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliIndex {
    pub a: u64,
    pub b: u64,
    pub phase_exp: u64,
}

impl PauliIndex {
    pub fn new(d: u64, a: i64, b: i64, phase_exp: i64) -> Self {
        PauliIndex {
            a: arith::modulo(a, d as i64) as u64,
            b: arith::modulo(b, d as i64) as u64,
            phase_exp: arith::modulo(phase_exp, phase_modulus(d) as i64) as u64,
        }
    }

    /// Phase-free label `X^a Z^b`.
    pub fn xz(d: u64, a: i64, b: i64) -> Self {
        Self::new(d, a, b, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// Non-identity Pauli labels in lexicographic `(a, b)` order. This fixes the
/// row and column order of every adjoint matrix.
pub fn nonzero_indices(d: u64) -> Vec<PauliIndex> {
    (0..d)
        .flat_map(|a| (0..d).map(move |b| PauliIndex { a, b, phase_exp: 0 }))
        .filter(|u| !u.is_identity())
        .collect()
}

/// Shift `X|j⟩ = |j+1⟩`.
pub fn pauli_x(d: u64) -> UnitaryMatrix {
    let n = d as usize;
    let perm: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
    UnitaryMatrix::permutation(&perm).expect("cyclic shift is a permutation")
}

/// Clock `Z|j⟩ = ω^j|j⟩`.
pub fn pauli_z(d: u64) -> UnitaryMatrix {
    let vals: Vec<C64> = (0..d as i64).map(|j| root_of_unity(j, d)).collect();
    UnitaryMatrix::trusted(crate::matrix::diagonal(&vals))
}

/// Raw matrix of `phase · X^a Z^b`: entry `(j+a, j)` equals `phase · ω^{bj}`.
pub(crate) fn pauli_matrix(d: u64, u: &PauliIndex) -> CMatrix {
    let n = d as usize;
    let phase = root_of_unity(u.phase_exp as i64, phase_modulus(d));
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        let row = (j + u.a as usize) % n;
        m[(row, j)] = phase * root_of_unity((u.b as i64) * j as i64, d);
    }
    m
}

pub fn pauli_v(d: u64, u: &PauliIndex) -> Result<UnitaryMatrix> {
    check_dim(d)?;
    Ok(UnitaryMatrix::trusted(pauli_matrix(d, u)))
}

/// Generalized Hadamard, `H[k, j] = ω^{jk}/√d`.
pub fn hadamard(d: u64) -> UnitaryMatrix {
    let n = d as usize;
    let norm = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(n, n, |k, j| root_of_unity((j * k) as i64, d) * norm);
    UnitaryMatrix::trusted(m)
}

/// Exponent of the phase gate entry `j` over the root of order `K_d`:
/// `j²` over `2d` for even `d`, `j(j+1)/2` over `d` for odd `d`.
pub fn phase_gate_exponent(d: u64, j: u64) -> u64 {
    if d.is_multiple_of(2) {
        (j * j) % (2 * d)
    } else {
        (j * (j + 1) / 2) % d
    }
}

/// Phase gate `P|j⟩ = ω^{j(j+ρ_d)/2}|j⟩` with `ρ_d = 0` for even `d`, `1` for odd.
pub fn phase_gate(d: u64) -> UnitaryMatrix {
    let k = phase_modulus(d);
    let vals: Vec<C64> = (0..d)
        .map(|j| root_of_unity(phase_gate_exponent(d, j) as i64, k))
        .collect();
    UnitaryMatrix::trusted(crate::matrix::diagonal(&vals))
}

/// Exponent `e` with `V_v V_u V_v† = ω^e V_u`, using
/// `e = v_b·u_a − v_a·u_b (mod d)`.
pub fn commutation_phase(d: u64, v: &PauliIndex, u: &PauliIndex) -> u64 {
    let d_i = d as i64;
    let e = (v.b as i64) * (u.a as i64) - (v.a as i64) * (u.b as i64);
    arith::modulo(e, d_i) as u64
}

/// Result of recognizing a matrix as `phase · X^a Z^b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliMatch {
    /// `(a, b)` and, when `phase_is_root`, the exponent of `phase` over `K_d`.
    pub index: PauliIndex,
    pub phase: C64,
    pub phase_is_root: bool,
}

/// Recognizes `M = c·X^a Z^b` with `|c| = 1`, matching entrywise at `tol`.
pub(crate) fn recognize_pauli(d: u64, m: &CMatrix, tol: f64) -> Option<PauliMatch> {
    let n = d as usize;
    if m.nrows() != n || m.ncols() != n {
        return None;
    }
    let threshold = 0.5 / (d as f64).sqrt();
    let (row, col) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| m[(i, j)].norm() > threshold)?;
    let a = arith::modulo(row as i64 - col as i64, d as i64);
    for b in 0..d as i64 {
        let phase = m[(row, col)] / root_of_unity(b * col as i64, d);
        if (phase.norm() - 1.0).abs() > tol {
            return None;
        }
        let candidate = pauli_matrix(d, &PauliIndex::xz(d, a, b)) * phase;
        if crate::matrix::max_abs_diff(&candidate, m) <= tol {
            let k = phase_modulus(d);
            let turns = phase.arg() / std::f64::consts::TAU * k as f64;
            let nearest = turns.round();
            let phase_is_root = (root_of_unity(nearest as i64, k) - phase).norm() <= tol;
            let phase_exp = if phase_is_root { nearest as i64 } else { 0 };
            return Some(PauliMatch {
                index: PauliIndex::new(d, a, b, phase_exp),
                phase,
                phase_is_root,
            });
        }
    }
    None
}

/// Returns `(u, c)` with `M = c·V_u` if such a pair exists.
pub fn is_pauli_up_to_phase(d: u64, m: &CMatrix) -> Result<Option<PauliMatch>> {
    check_dim(d)?;
    let u = UnitaryMatrix::new(m.clone())?;
    if u.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            found: u.dim(),
        });
    }
    Ok(recognize_pauli(d, m, MATCH_TOL))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

/// Outcome of the conjugation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordWitness {
    pub member: bool,
    /// Columns are the index images of `X` and `Z`.
    pub sl2_image: Option<SL2Element>,
    pub failure_axis: Option<Axis>,
    pub x_image: Option<PauliMatch>,
    pub z_image: Option<PauliMatch>,
}

/// Decides whether `U` normalizes the Heisenberg group by conjugating `X` and
/// `Z` and recognizing the results.
pub fn clifford_membership(d: u64, u: &UnitaryMatrix) -> Result<CliffordWitness> {
    check_dim(d)?;
    if u.dim() != d as usize {
        return Err(Error::DimensionMismatch {
            expected: d as usize,
            found: u.dim(),
        });
    }
    let x_img = recognize_pauli(d, &u.conjugate(pauli_x(d).matrix()), MATCH_TOL);
    let Some(x_img) = x_img else {
        return Ok(CliffordWitness {
            member: false,
            sl2_image: None,
            failure_axis: Some(Axis::X),
            x_image: None,
            z_image: None,
        });
    };
    let z_img = recognize_pauli(d, &u.conjugate(pauli_z(d).matrix()), MATCH_TOL);
    let Some(z_img) = z_img else {
        return Ok(CliffordWitness {
            member: false,
            sl2_image: None,
            failure_axis: Some(Axis::Z),
            x_image: Some(x_img),
            z_image: None,
        });
    };
    let image = SL2Element::reduced(
        [
            [x_img.index.a as i64, z_img.index.a as i64],
            [x_img.index.b as i64, z_img.index.b as i64],
        ],
        d as i64,
    );
    // Conjugation preserves the commutator phase of X and Z.
    debug_assert_eq!(image.det(), 1);
    Ok(CliffordWitness {
        member: true,
        sl2_image: Some(image),
        failure_axis: None,
        x_image: Some(x_img),
        z_image: Some(z_img),
    })
}

/// `Π U Π†` with `Π` the permutation matrix of [`arith::crt_index_map`].
pub fn crt_conjugate(d1: u64, d2: u64, u: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    let perm = arith::crt_index_map(d1, d2)?;
    if u.dim() != perm.len() {
        return Err(Error::DimensionMismatch {
            expected: perm.len(),
            found: u.dim(),
        });
    }
    let pi = UnitaryMatrix::permutation(&perm)?;
    Ok(UnitaryMatrix::trusted(pi.conjugate(u.matrix())))
}

/// Hadamard with scaled kernel, `H^{(s)}[k, j] = ω^{s·jk}/√d`.
///
/// Under the CRT relabeling `H_{d1·d2}` becomes `H^{(s1)}_{d1} ⊗ H^{(s2)}_{d2}`
/// with `s1 = d2⁻¹ mod d1` and `s2 = d1⁻¹ mod d2`.
pub fn scaled_hadamard(d: u64, scale: i64) -> UnitaryMatrix {
    let n = d as usize;
    let norm = 1.0 / (d as f64).sqrt();
    let m = CMatrix::from_fn(n, n, |k, j| root_of_unity(scale * (j * k) as i64, d) * norm);
    UnitaryMatrix::trusted(m)
}

/// Identity helper used by callers that need `ω = e^{2πi/d}`.
pub fn omega(d: u64) -> C64 {
    if d == 0 {
        c(1.0, 0.0)
    } else {
        root_of_unity(1, d)
    }
}

/// Unitarity tolerance re-exported for callers configuring recognition.
pub const DEFAULT_UNITARY_TOL: f64 = UNITARY_TOL;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{max_abs_diff, projective_deviation};

    fn sl2(d: i64, e: [[i64; 2]; 2]) -> SL2Element {
        SL2Element::reduced(e, d)
    }

    #[test]
    fn qubit_paulis() {
        let x = pauli_x(2);
        let z = pauli_z(2);
        let expect_x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let expect_z = crate::matrix::diagonal(&[c(1., 0.), c(-1., 0.)]);
        assert_eq!(x.matrix(), &expect_x);
        assert_eq!(z.matrix(), &expect_z);
    }

    #[test]
    fn qutrit_commutation_relation() {
        let (x, z) = (pauli_x(3), pauli_z(3));
        let zx = z.matrix() * x.matrix();
        let xz = x.matrix() * z.matrix() * omega(3);
        assert!(max_abs_diff(&zx, &xz) < 1e-15);
    }

    #[test]
    fn paulis_have_order_d() {
        let i4 = CMatrix::identity(4, 4);
        assert_eq!(pauli_x(4).pow(4).matrix(), &i4);
        assert!(max_abs_diff(pauli_z(4).pow(4).matrix(), &i4) < 1e-15);
    }

    #[test]
    fn phase_gate_examples() {
        let p2 = phase_gate(2).diagonal_entries();
        assert_eq!(p2, vec![c(1., 0.), c(0., 1.)]);
        let p3 = phase_gate(3).diagonal_entries();
        assert!((p3[0] - c(1., 0.)).norm() < 1e-15);
        assert!((p3[1] - omega(3)).norm() < 1e-15);
        assert!((p3[2] - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn hadamard_fourth_power_is_projectively_identity() {
        for d in 2..=9 {
            let h4 = hadamard(d).pow(4);
            let id = CMatrix::identity(d as usize, d as usize);
            assert!(projective_deviation(h4.matrix(), &id) < 1e-12, "d = {d}");
            // H² is the index negation permutation.
            let h2 = hadamard(d).pow(2);
            for j in 0..d as usize {
                let neg = (d as usize - j) % d as usize;
                assert!((h2.matrix()[(neg, j)] - c(1., 0.)).norm() < 1e-12);
            }
        }
    }

    fn conjugation_exponent(d: u64, v: &PauliIndex, u: &PauliIndex) -> u64 {
        let vv = pauli_v(d, v).unwrap();
        let vu = pauli_v(d, u).unwrap();
        let conj = vv.conjugate(vu.matrix());
        (0..d)
            .find(|&e| max_abs_diff(&conj, &(vu.matrix() * root_of_unity(e as i64, d))) < 1e-12)
            .expect("conjugate of a Pauli is a phase multiple")
    }

    #[test]
    fn commutation_phase_examples() {
        let z = PauliIndex::xz(2, 0, 1);
        let x = PauliIndex::xz(2, 1, 0);
        assert_eq!(commutation_phase(2, &z, &x), 1);
        assert_eq!(conjugation_exponent(2, &z, &x), 1);
        let x3 = PauliIndex::xz(3, 1, 0);
        let z3 = PauliIndex::xz(3, 0, 1);
        assert_eq!(commutation_phase(3, &x3, &z3), 2);
        assert_eq!(conjugation_exponent(3, &x3, &z3), 2);
        for d in 2..=5 {
            for u in nonzero_indices(d) {
                assert_eq!(commutation_phase(d, &u, &u), 0);
            }
        }
    }

    #[test]
    fn commutation_phase_is_antisymmetric_and_matches_conjugation() {
        for d in 2..=8u64 {
            let all: Vec<_> = (0..d)
                .flat_map(|a| (0..d).map(move |b| PauliIndex::xz(d, a as i64, b as i64)))
                .collect();
            for v in &all {
                for u in &all {
                    let e1 = commutation_phase(d, v, u);
                    let e2 = commutation_phase(d, u, v);
                    assert_eq!((e1 + e2) % d, 0);
                }
            }
            if d <= 5 {
                for v in &all {
                    for u in &all {
                        assert_eq!(commutation_phase(d, v, u), conjugation_exponent(d, v, u));
                    }
                }
            }
        }
    }

    #[test]
    fn recognizes_paulis_up_to_phase() {
        let u = PauliIndex::new(3, 2, 1, 2);
        let m = pauli_v(3, &u).unwrap();
        let got = is_pauli_up_to_phase(3, m.matrix()).unwrap().unwrap();
        assert_eq!((got.index.a, got.index.b), (2, 1));
        assert!((got.phase - omega(3) * omega(3)).norm() < 1e-12);
        assert!(got.phase_is_root);
        assert_eq!(got.index.phase_exp, 2);

        assert!(is_pauli_up_to_phase(2, hadamard(2).matrix())
            .unwrap()
            .is_none());

        let id = is_pauli_up_to_phase(4, &CMatrix::identity(4, 4))
            .unwrap()
            .unwrap();
        assert_eq!((id.index.a, id.index.b), (0, 0));
        assert!((id.phase - c(1., 0.)).norm() < 1e-15);

        let bad = CMatrix::identity(2, 2) * c(2.0, 0.0);
        assert!(matches!(
            is_pauli_up_to_phase(2, &bad),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn generator_sl2_images() {
        for d in 2..=9u64 {
            let h = clifford_membership(d, &hadamard(d)).unwrap();
            assert!(h.member);
            assert_eq!(h.sl2_image.unwrap(), sl2(d as i64, [[0, -1], [1, 0]]));
            let p = clifford_membership(d, &phase_gate(d)).unwrap();
            assert!(p.member);
            assert_eq!(p.sl2_image.unwrap(), sl2(d as i64, [[1, 0], [1, 1]]));
            let x = clifford_membership(d, &pauli_x(d)).unwrap();
            assert_eq!(x.sl2_image.unwrap(), SL2Element::identity(d as i64));
        }
    }

    #[test]
    fn qubit_t_gate_is_not_clifford() {
        let t = UnitaryMatrix::diagonal(&[c(1., 0.), crate::matrix::turns(0.125)]).unwrap();
        let w = clifford_membership(2, &t).unwrap();
        assert!(!w.member);
        assert_eq!(w.failure_axis, Some(Axis::X));
        assert!(w.sl2_image.is_none());
    }

    #[test]
    fn membership_rejects_wrong_dimension() {
        assert!(matches!(
            clifford_membership(3, &hadamard(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn clifford_conjugates_every_pauli_to_a_pauli() {
        for d in 2..=6u64 {
            let gens = [pauli_x(d), hadamard(d), phase_gate(d)];
            let word = &(&gens[1] * &gens[2]) * &(&gens[0] * &gens[2]);
            for g in gens.iter().chain(std::iter::once(&word)) {
                assert!(clifford_membership(d, g).unwrap().member);
                for u in nonzero_indices(d) {
                    let vu = pauli_v(d, &u).unwrap();
                    let image = g.conjugate(vu.matrix());
                    assert!(recognize_pauli(d, &image, 1e-9).is_some());
                }
            }
        }
    }

    #[test]
    fn psi_is_multiplicative_on_generator_words() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in 2..=7u64 {
            let gens = [pauli_x(d), hadamard(d), phase_gate(d)];
            for _ in 0..20 {
                let len = rng.random_range(1..=6);
                let mut u = UnitaryMatrix::identity(d as usize);
                let mut v = UnitaryMatrix::identity(d as usize);
                for _ in 0..len {
                    u = &u * &gens[rng.random_range(0..3)];
                    v = &v * &gens[rng.random_range(0..3)];
                }
                let wu = clifford_membership(d, &u).unwrap();
                let wv = clifford_membership(d, &v).unwrap();
                let wuv = clifford_membership(d, &(&u * &v)).unwrap();
                assert!(wu.member && wv.member && wuv.member);
                let prod = wu.sl2_image.unwrap().mul(&wv.sl2_image.unwrap());
                assert_eq!(prod, wuv.sl2_image.unwrap());
            }
        }
    }

    #[test]
    fn crt_conjugate_factors_shift_and_identity() {
        let x6 = crt_conjugate(2, 3, &pauli_x(6)).unwrap();
        let x23 = pauli_x(2).kron(&pauli_x(3));
        assert!(max_abs_diff(x6.matrix(), x23.matrix()) < 1e-12);
        let i6 = crt_conjugate(2, 3, &UnitaryMatrix::identity(6)).unwrap();
        assert_eq!(i6.matrix(), &CMatrix::identity(6, 6));
        assert!(crt_conjugate(2, 4, &UnitaryMatrix::identity(8)).is_err());
    }

    #[test]
    fn crt_conjugate_factors_hadamard_with_scaled_kernels() {
        for (d1, d2) in [(2u64, 3u64), (3, 4), (4, 9), (5, 2)] {
            let s1 = arith::mod_inverse(d2 as i64, d1 as i64).unwrap();
            let s2 = arith::mod_inverse(d1 as i64, d2 as i64).unwrap();
            let h = crt_conjugate(d1, d2, &hadamard(d1 * d2)).unwrap();
            let local = scaled_hadamard(d1, s1).kron(&scaled_hadamard(d2, s2));
            assert!(
                max_abs_diff(h.matrix(), local.matrix()) < 1e-12,
                "({d1},{d2})"
            );
        }
    }

    #[test]
    fn naive_hadamard_factorization_fails_for_six() {
        // The scaled kernel on the qutrit factor is 2 = 2⁻¹ mod 3, so the plain
        // tensor product of local Hadamards is off by a non-scalar parity.
        let h = crt_conjugate(2, 3, &hadamard(6)).unwrap();
        let naive = hadamard(2).kron(&hadamard(3));
        assert!(projective_deviation(h.matrix(), naive.matrix()) > 0.1);
    }
}
