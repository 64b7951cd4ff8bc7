//! Composite dimensions: intra-qudit CNOT gates, induced magic, Bézout
//! synthesis of phase gates, tensor-structure tests, the trichotomy
//! classification and the density certification pipeline.

use serde::{Deserialize, Serialize};

use crate::adjointrep;
use crate::arith;
use crate::certgeom::{self, InfinitenessCertificate};
use crate::closure;
use crate::diagonalgates::t_s;
use crate::error::{Error, Result};
use crate::matrix::{c, kron, max_abs_diff, root_of_unity, CMatrix, UnitaryMatrix};
use crate::paulicliff::{self, hadamard, pauli_x, pauli_z, phase_gate, phase_modulus};

/// Relative singular-value threshold for the operator Schmidt rank.
pub const SCHMIDT_TOL: f64 = 1e-9;
/// Bound on the `m` component for the algebra route of the normalizer test.
pub const ALGEBRA_TOL: f64 = 1e-8;

/// `CN|x⟩|y⟩ = |x⟩|y + x mod q⟩` on `C^p ⊗ C^q`, basis index `x·q + y`.
pub fn cn_gate(p: u64, q: u64) -> Result<UnitaryMatrix> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidArgument(format!(
            "CN needs p, q >= 2, got ({p}, {q})"
        )));
    }
    let (p, q) = (p as usize, q as usize);
    let perm: Vec<usize> = (0..p * q)
        .map(|i| {
            let (x, y) = (i / q, i % q);
            x * q + (y + x) % q
        })
        .collect();
    UnitaryMatrix::permutation(&perm)
}

/// CRT relabeling for pairwise coprime `factors`: `x ↦` mixed-radix index of
/// `(x mod f_1, …, x mod f_n)`.
fn crt_multi_index(factors: &[u64]) -> Vec<usize> {
    let d: u64 = factors.iter().product();
    (0..d)
        .map(|x| factors.iter().fold(0u64, |acc, &f| acc * f + x % f) as usize)
        .collect()
}

/// `Π† CN_{p,q} Π` inside a single qudit of dimension `d`.
///
/// When `p·q` is a proper divisor of `d` with a coprime cofactor `r`, the gate
/// is `CN_{p,q} ⊗ I_r` in the relabeled basis.
pub fn intra_qudit_cn(d: u64, p: u64, q: u64) -> Result<UnitaryMatrix> {
    let g = arith::gcd(p as i64, q as i64);
    if g != 1 {
        return Err(Error::NotCoprime {
            p: p as i64,
            q: q as i64,
            gcd: g,
        });
    }
    if p < 2 || q < 2 || !d.is_multiple_of(p * q) {
        return Err(Error::InvalidArgument(format!(
            "{p}·{q} does not divide {d}"
        )));
    }
    let r = d / (p * q);
    let rg = arith::gcd(r as i64, (p * q) as i64);
    if rg != 1 {
        return Err(Error::NotCoprime {
            p: (p * q) as i64,
            q: r as i64,
            gcd: rg,
        });
    }
    let (factors, local) = if r == 1 {
        (vec![p, q], cn_gate(p, q)?)
    } else {
        (
            vec![p, q, r],
            cn_gate(p, q)?.kron(&UnitaryMatrix::identity(r as usize)),
        )
    };
    let pi = UnitaryMatrix::permutation(&crt_multi_index(&factors))?;
    Ok(UnitaryMatrix::trusted(
        pi.adjoint().conjugate(local.matrix()),
    ))
}

/// `Σ_{x<p} exp(2πix/q)|x⟩⟨x|`.
fn t_q_on(p: u64, q: u64) -> UnitaryMatrix {
    let vals: Vec<_> = (0..p as i64).map(|x| root_of_unity(x, q)).collect();
    UnitaryMatrix::trusted(crate::matrix::diagonal(&vals))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InducedMagic {
    pub lhs: UnitaryMatrix,
    pub rhs: UnitaryMatrix,
    pub max_abs_deviation: f64,
}

/// Compares `CN (I_p ⊗ Z_q†) CN†` with `T_q ⊗ Z_q†`, where `T_q` acts on `C^p`.
pub fn induced_magic_check(p: u64, q: u64) -> Result<InducedMagic> {
    let cn = cn_gate(p, q)?;
    let zq_dag = pauli_z(q).adjoint();
    let lhs = UnitaryMatrix::trusted(
        cn.conjugate(UnitaryMatrix::identity(p as usize).kron(&zq_dag).matrix()),
    );
    let rhs = t_q_on(p, q).kron(&zq_dag);
    let max_abs_deviation = max_abs_diff(lhs.matrix(), rhs.matrix());
    Ok(InducedMagic {
        lhs,
        rhs,
        max_abs_deviation,
    })
}

/// `T_q^a · T_p^b` on dimension `p` with `a·p + b·q = 1`.
pub fn bezout_t_synthesis(p: u64, q: u64) -> Result<UnitaryMatrix> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidArgument(format!(
            "synthesis needs p, q >= 2, got ({p}, {q})"
        )));
    }
    let (a, b) = arith::bezout(p as i64, q as i64)?;
    Ok(&t_q_on(p, q).pow(a) * &t_s(p, p)?.pow(b))
}

/// Realignment `R[(i1, j1), (i2, j2)] = V[i1·l + i2, j1·l + j2]`.
fn realign(v: &CMatrix, k: usize, l: usize) -> CMatrix {
    CMatrix::from_fn(k * k, l * l, |r, s| {
        let (i1, j1) = (r / k, r % k);
        let (i2, j2) = (s / l, s % l);
        v[(i1 * l + i2, j1 * l + j2)]
    })
}

fn check_split(v: &CMatrix, k: usize, l: usize) -> Result<()> {
    if k == 0 || l == 0 || v.nrows() != k * l || v.ncols() != k * l {
        return Err(Error::DimensionMismatch {
            expected: k * l,
            found: v.nrows(),
        });
    }
    Ok(())
}

pub fn operator_schmidt_rank(v: &UnitaryMatrix, k: usize, l: usize) -> Result<usize> {
    check_split(v.matrix(), k, l)?;
    let sv = realign(v.matrix(), k, l).singular_values();
    let top = sv.max();
    Ok(sv.iter().filter(|&&s| s > SCHMIDT_TOL * top).count())
}

/// Unitary factors `(A, B)` with `V = A ⊗ B` when the Schmidt rank is one.
pub fn tensor_factors(
    v: &UnitaryMatrix,
    k: usize,
    l: usize,
) -> Result<Option<(UnitaryMatrix, UnitaryMatrix)>> {
    if operator_schmidt_rank(v, k, l)? != 1 {
        return Ok(None);
    }
    let svd = realign(v.matrix(), k, l).svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numeric("SVD did not return singular vectors".into())),
    };
    let top = (0..svd.singular_values.len())
        .max_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .expect("nonempty spectrum");
    let sigma = svd.singular_values[top];
    // Split σ so each factor is unitary: ‖A‖_F = √k, ‖B‖_F = √l.
    let sa = (k as f64).sqrt();
    let sb = sigma / sa;
    let a = CMatrix::from_fn(k, k, |i, j| u[(i * k + j, top)] * sa);
    let b = CMatrix::from_fn(l, l, |i, j| v_t[(top, i * l + j)] * sb);
    Ok(Some((
        UnitaryMatrix::with_tolerance(a, 1e-8)?,
        UnitaryMatrix::with_tolerance(b, 1e-8)?,
    )))
}

pub fn swap_gate(k: usize) -> UnitaryMatrix {
    let perm: Vec<usize> = (0..k * k).map(|i| (i % k) * k + i / k).collect();
    UnitaryMatrix::permutation(&perm).expect("swap is a permutation")
}

/// Parts of `M` in `C·I ⊕ p1 ⊕ p2 ⊕ m` for the split `C^k ⊗ C^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecomposition {
    pub scalar: CMatrix,
    pub p1: CMatrix,
    pub p2: CMatrix,
    pub m: CMatrix,
}

pub fn decompose_local_correlation(
    mat: &CMatrix,
    k: usize,
    l: usize,
) -> Result<LocalDecomposition> {
    check_split(mat, k, l)?;
    let n = k * l;
    let scalar = CMatrix::identity(n, n) * (mat.trace() / n as f64);
    let tr2 = CMatrix::from_fn(k, k, |i, j| {
        (0..l).map(|t| mat[(i * l + t, j * l + t)]).sum()
    });
    let tr1 = CMatrix::from_fn(l, l, |i, j| {
        (0..k).map(|t| mat[(t * l + i, t * l + j)]).sum()
    });
    let p1 = kron(&(tr2 / c(l as f64, 0.0)), &CMatrix::identity(l, l)) - &scalar;
    let p2 = kron(&CMatrix::identity(k, k), &(tr1 / c(k as f64, 0.0))) - &scalar;
    let m = mat - &scalar - &p1 - &p2;
    Ok(LocalDecomposition { scalar, p1, p2, m })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizerClass {
    InProduct,
    ProductTimesSwap,
    Outside,
}

/// Whether `V` normalizes the local algebra `p1 ⊕ p2`, by conjugating a basis.
fn normalizes_local_algebra(v: &UnitaryMatrix, k: usize, l: usize) -> Result<bool> {
    let mut basis = Vec::new();
    for u in paulicliff::nonzero_indices(k as u64) {
        basis.push(kron(
            &paulicliff::pauli_matrix(k as u64, &u),
            &CMatrix::identity(l, l),
        ));
    }
    for u in paulicliff::nonzero_indices(l as u64) {
        basis.push(kron(
            &CMatrix::identity(k, k),
            &paulicliff::pauli_matrix(l as u64, &u),
        ));
    }
    for y in &basis {
        let parts = decompose_local_correlation(&v.conjugate(y), k, l)?;
        if parts.m.norm() >= ALGEBRA_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classifies `V` against the normalizer of `SU(k) ⊗ SU(l)`, checking the
/// Schmidt-rank answer against the local-algebra answer.
pub fn normalizer_membership(v: &UnitaryMatrix, k: usize, l: usize) -> Result<NormalizerClass> {
    let class = if operator_schmidt_rank(v, k, l)? == 1 {
        NormalizerClass::InProduct
    } else if k == l && operator_schmidt_rank(&(&swap_gate(k) * v), k, l)? == 1 {
        NormalizerClass::ProductTimesSwap
    } else {
        NormalizerClass::Outside
    };
    let by_algebra = normalizes_local_algebra(v, k, l)?;
    if by_algebra != (class != NormalizerClass::Outside) {
        return Err(Error::Inconsistent(format!(
            "Schmidt rank gives {class:?} but local-algebra test gives {by_algebra}"
        )));
    }
    Ok(class)
}

/// Whether a two-qudit gate is entangling and not a local gate times SWAP.
pub fn brylinski_check(v: &UnitaryMatrix, d: usize) -> Result<bool> {
    Ok(operator_schmidt_rank(v, d, d)? > 1
        && operator_schmidt_rank(&(&swap_gate(d) * v), d, d)? > 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    PrimeI,
    PrimePowerII,
    CoprimeIII,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyVerdict {
    pub d: u64,
    pub case_tag: CaseTag,
    pub p: Option<u64>,
    pub m: Option<u32>,
    /// Pairwise coprime prime-power factors of `d`.
    pub factors: Vec<u64>,
    pub bound: Option<f64>,
    pub recommended_s: Option<u64>,
    pub recommended_gates: Vec<String>,
}

/// Smallest integer above the `T_s` bound that does not divide `modulus`.
fn smallest_admissible_s(d: u64, modulus: u64) -> u64 {
    let bound = certgeom::ts_universality_bound(d);
    let mut s = bound.floor() as u64 + 1;
    while modulus.is_multiple_of(s) {
        s += 1;
    }
    s
}

pub fn trichotomy_classify(d: u64) -> Result<TrichotomyVerdict> {
    let f = arith::factorize(d)?;
    let clifford = ["X", "H", "P"].map(String::from).to_vec();
    let factors = f.prime_powers();
    let verdict = if f.is_prime() {
        let s = smallest_admissible_s(d, phase_modulus(d));
        let mut gates = clifford;
        gates.push(format!("Ts({s})"));
        TrichotomyVerdict {
            d,
            case_tag: CaseTag::PrimeI,
            p: Some(d),
            m: Some(1),
            factors,
            bound: Some(certgeom::ts_universality_bound(d)),
            recommended_s: Some(s),
            recommended_gates: gates,
        }
    } else if f.is_prime_power() {
        let s = smallest_admissible_s(d, d);
        let mut gates = clifford;
        gates.push(format!("Ts({s})"));
        TrichotomyVerdict {
            d,
            case_tag: CaseTag::PrimePowerII,
            p: Some(f.factors[0].0),
            m: Some(f.factors[0].1),
            factors,
            bound: Some(certgeom::ts_universality_bound(d)),
            recommended_s: Some(s),
            recommended_gates: gates,
        }
    } else {
        let mut gates = clifford;
        for w in factors.windows(2) {
            gates.push(format!("intraCN({},{})", w[0], w[1]));
        }
        TrichotomyVerdict {
            d,
            case_tag: CaseTag::CoprimeIII,
            p: None,
            m: None,
            factors,
            bound: None,
            recommended_s: None,
            recommended_gates: gates,
        }
    };
    Ok(verdict)
}

/// Gates named in [`TrichotomyVerdict::recommended_gates`].
pub fn recommended_generators(verdict: &TrichotomyVerdict) -> Result<Vec<UnitaryMatrix>> {
    let d = verdict.d;
    let mut gates = vec![pauli_x(d), hadamard(d), phase_gate(d)];
    match verdict.case_tag {
        CaseTag::PrimeI | CaseTag::PrimePowerII => {
            let s = verdict.recommended_s.expect("cases I and II carry s");
            gates.push(t_s(d, s)?);
        }
        CaseTag::CoprimeIII => {
            for w in verdict.factors.windows(2) {
                gates.push(intra_qudit_cn(d, w[0], w[1])?);
            }
        }
    }
    Ok(gates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_word_len: usize,
    /// Cap on distinct projective classes visited by the certificate search.
    pub max_search_elements: usize,
    pub closure_cap: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_word_len: 8,
            max_search_elements: 100_000,
            closure_cap: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityStatus {
    Dense,
    Finite,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    #[serde(flatten)]
    pub limits: Budgets,
    pub search_elements_visited: usize,
    pub search_depth_reached: usize,
    pub closure_count: Option<usize>,
}

/// Verdict `{"d", "status", "irreducible", "certificate", "finite_order", "budgets"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityVerdict {
    pub d: u64,
    pub status: DensityStatus,
    pub irreducible: bool,
    pub commutant_dim: Option<usize>,
    pub certificate: Option<InfinitenessCertificate>,
    /// Projective order of a completely enumerated group.
    pub finite_order: Option<usize>,
    pub budgets: BudgetReport,
    pub diagnostic: Option<String>,
}

/// Irreducibility, then a certificate search, then closure enumeration.
pub fn density_certify(
    d: u64,
    generators: &[UnitaryMatrix],
    budgets: Budgets,
) -> Result<DensityVerdict> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    if budgets.max_word_len == 0 || budgets.max_search_elements == 0 || budgets.closure_cap == 0 {
        return Err(Error::InvalidArgument("budgets must be positive".into()));
    }
    let mut report = BudgetReport {
        limits: budgets,
        search_elements_visited: 0,
        search_depth_reached: 0,
        closure_count: None,
    };
    let (commutant_dim, diagnostic) = match adjointrep::commutant_dimension(d, generators) {
        Ok(dim) => (Some(dim), None),
        Err(e @ Error::CommutantAmbiguous { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let Some(dim) = commutant_dim else {
        return Ok(DensityVerdict {
            d,
            status: DensityStatus::Inconclusive,
            irreducible: false,
            commutant_dim,
            certificate: None,
            finite_order: None,
            budgets: report,
            diagnostic,
        });
    };
    let irreducible = dim == 1;
    if irreducible {
        let out = certgeom::certificate_search(
            generators,
            budgets.max_word_len,
            budgets.max_search_elements,
        )?;
        report.search_elements_visited = out.elements_visited;
        report.search_depth_reached = out.max_word_len_reached;
        if let Some(cert) = out.certificate {
            return Ok(DensityVerdict {
                d,
                status: DensityStatus::Dense,
                irreducible,
                commutant_dim,
                certificate: Some(cert),
                finite_order: None,
                budgets: report,
                diagnostic: None,
            });
        }
    }
    let cl = closure::projective_closure(generators, budgets.closure_cap)?;
    report.closure_count = Some(cl.count());
    let (status, finite_order, diagnostic) = if cl.complete {
        (DensityStatus::Finite, Some(cl.count()), None)
    } else {
        let hint = if irreducible {
            "no certificate within the search budgets and closure hit its cap; raise --budget-words, --budget-search or --budget-closure"
        } else {
            "adjoint action is reducible and closure hit its cap"
        };
        (DensityStatus::Inconclusive, None, Some(hint.to_string()))
    };
    Ok(DensityVerdict {
        d,
        status,
        irreducible,
        commutant_dim,
        certificate: None,
        finite_order,
        budgets: report,
        diagnostic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::projective_deviation;
    use crate::paulicliff::{clifford_membership, crt_conjugate};
    use rand::{Rng, SeedableRng};

    fn random_unitary(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        UnitaryMatrix::new(m.qr().q()).unwrap()
    }

    #[test]
    fn cn_examples() {
        let cn = cn_gate(2, 2).unwrap();
        let mut cnot = CMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
            cnot[(r, col)] = c(1., 0.);
        }
        assert_eq!(cn.matrix(), &cnot);
        let cn23 = cn_gate(2, 3).unwrap();
        // |1⟩|2⟩ has index 5 and maps to |1⟩|0⟩, index 3.
        assert_eq!(cn23.matrix()[(3, 5)], c(1., 0.));
        for (p, q) in [(2u64, 3u64), (3, 4), (4, 4), (5, 2)] {
            let n = (p * q) as usize;
            assert_eq!(
                cn_gate(p, q).unwrap().pow(q as i64).matrix(),
                &CMatrix::identity(n, n)
            );
        }
    }

    #[test]
    fn intra_qudit_cn_examples() {
        let g = intra_qudit_cn(6, 2, 3).unwrap();
        let back = crt_conjugate(2, 3, &g).unwrap();
        assert_eq!(back.matrix(), cn_gate(2, 3).unwrap().matrix());
        for i in 0..6 {
            assert_eq!(
                g.matrix().row(i).iter().filter(|z| z.norm() > 0.5).count(),
                1
            );
            assert_eq!(
                g.matrix()
                    .column(i)
                    .iter()
                    .filter(|z| z.norm() > 0.5)
                    .count(),
                1
            );
        }
        let g12 = intra_qudit_cn(12, 4, 3).unwrap();
        assert_eq!(g12.pow(3).matrix(), &CMatrix::identity(12, 12));
        assert!(intra_qudit_cn(12, 2, 6).is_err());
        assert!(intra_qudit_cn(7, 2, 3).is_err());
        // Cofactor extension: CN_{2,3} ⊗ I_5 inside d = 30.
        let g30 = intra_qudit_cn(30, 2, 3).unwrap();
        assert_eq!(g30.pow(3).matrix(), &CMatrix::identity(30, 30));
        assert!(intra_qudit_cn(12, 2, 3).is_err());
    }

    #[test]
    fn induced_magic_grid() {
        for p in 2..=9 {
            for q in 2..=9 {
                assert!(
                    induced_magic_check(p, q).unwrap().max_abs_deviation < 1e-12,
                    "({p},{q})"
                );
            }
        }
    }

    #[test]
    fn bezout_synthesis_examples() {
        let t = bezout_t_synthesis(2, 3).unwrap();
        assert!(
            max_abs_diff(
                t.matrix(),
                &crate::matrix::diagonal(&[c(1., 0.), root_of_unity(1, 6)])
            ) < 1e-12
        );
        let t = bezout_t_synthesis(3, 4).unwrap();
        let expect =
            crate::matrix::diagonal(&[c(1., 0.), root_of_unity(1, 12), root_of_unity(2, 12)]);
        assert!(max_abs_diff(t.matrix(), &expect) < 1e-12);
        assert!(bezout_t_synthesis(2, 1).is_err());
        assert!(bezout_t_synthesis(4, 6).is_err());
        for p in 2..=9u64 {
            for q in 2..=9u64 {
                if arith::gcd(p as i64, q as i64) == 1 {
                    let t = bezout_t_synthesis(p, q).unwrap();
                    assert!(max_abs_diff(t.matrix(), t_s(p, p * q).unwrap().matrix()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn schmidt_rank_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let prod = random_unitary(2, &mut rng).kron(&random_unitary(3, &mut rng));
        assert_eq!(operator_schmidt_rank(&prod, 2, 3).unwrap(), 1);
        assert_eq!(
            operator_schmidt_rank(&cn_gate(2, 3).unwrap(), 2, 3).unwrap(),
            2
        );
        assert_eq!(operator_schmidt_rank(&swap_gate(2), 2, 2).unwrap(), 4);
        assert!(operator_schmidt_rank(&prod, 2, 2).is_err());
    }

    #[test]
    fn tensor_factors_recover_product() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let (a, b) = (random_unitary(3, &mut rng), random_unitary(4, &mut rng));
        let (fa, fb) = tensor_factors(&a.kron(&b), 3, 4).unwrap().unwrap();
        assert!(max_abs_diff(fa.kron(&fb).matrix(), a.kron(&b).matrix()) < 1e-10);
        assert!(projective_deviation(fa.matrix(), a.matrix()) < 1e-10);
        assert!(tensor_factors(&cn_gate(2, 3).unwrap(), 2, 3)
            .unwrap()
            .is_none());
    }

    #[test]
    fn normalizer_examples() {
        let h = hadamard(2).kron(&hadamard(3));
        assert_eq!(
            normalizer_membership(&h, 2, 3).unwrap(),
            NormalizerClass::InProduct
        );
        assert_eq!(
            normalizer_membership(&swap_gate(2), 2, 2).unwrap(),
            NormalizerClass::ProductTimesSwap
        );
        assert_eq!(
            normalizer_membership(&cn_gate(2, 3).unwrap(), 2, 3).unwrap(),
            NormalizerClass::Outside
        );
    }

    #[test]
    fn normalizer_routes_agree_on_battery() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for (k, l) in [(2usize, 2usize), (2, 3), (3, 3)] {
            let mut battery = vec![
                random_unitary(k, &mut rng).kron(&random_unitary(l, &mut rng)),
                random_unitary(k * l, &mut rng),
                cn_gate(k as u64, l as u64).unwrap(),
            ];
            if k == l {
                battery.push(
                    &swap_gate(k) * &random_unitary(k, &mut rng).kron(&random_unitary(l, &mut rng)),
                );
                battery.push(swap_gate(k));
            }
            for v in &battery {
                normalizer_membership(v, k, l).unwrap();
            }
        }
    }

    #[test]
    fn local_decomposition_examples() {
        let a = paulicliff::pauli_matrix(2, &paulicliff::PauliIndex::xz(2, 1, 0));
        let b = paulicliff::pauli_matrix(3, &paulicliff::PauliIndex::xz(3, 1, 2));
        let parts = decompose_local_correlation(&kron(&a, &CMatrix::identity(3, 3)), 2, 3).unwrap();
        assert!(parts.p2.norm() + parts.m.norm() + parts.scalar.norm() < 1e-12);
        let parts = decompose_local_correlation(&kron(&a, &b), 2, 3).unwrap();
        assert!(parts.p1.norm() + parts.p2.norm() + parts.scalar.norm() < 1e-12);
        let parts = decompose_local_correlation(&CMatrix::identity(6, 6), 2, 3).unwrap();
        assert!(parts.p1.norm() + parts.p2.norm() + parts.m.norm() < 1e-12);
    }

    #[test]
    fn local_decomposition_is_orthogonal_and_complete() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (k, l) in [(2usize, 3usize), (3, 4)] {
            for _ in 0..100 {
                let n = k * l;
                let m = CMatrix::from_fn(n, n, |_, _| {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                let p = decompose_local_correlation(&m, k, l).unwrap();
                let sum = &p.scalar + &p.p1 + &p.p2 + &p.m;
                assert!(max_abs_diff(&sum, &m) < 1e-10);
                let parts = [&p.scalar, &p.p1, &p.p2, &p.m];
                for i in 0..4 {
                    for j in i + 1..4 {
                        assert!(parts[i].dotc(parts[j]).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn brylinski_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        assert!(brylinski_check(&cn_gate(2, 2).unwrap(), 2).unwrap());
        let prod = random_unitary(2, &mut rng).kron(&random_unitary(2, &mut rng));
        assert!(!brylinski_check(&prod, 2).unwrap());
        assert!(!brylinski_check(&swap_gate(2), 2).unwrap());
    }

    #[test]
    fn trichotomy_examples() {
        let v = trichotomy_classify(5).unwrap();
        assert_eq!(v.case_tag, CaseTag::PrimeI);
        let v = trichotomy_classify(8).unwrap();
        assert_eq!(
            (v.case_tag, v.recommended_s),
            (CaseTag::PrimePowerII, Some(44))
        );
        let v = trichotomy_classify(36).unwrap();
        assert_eq!(v.case_tag, CaseTag::CoprimeIII);
        assert_eq!(v.factors, vec![4, 9]);
        assert_eq!(v.recommended_gates, vec!["X", "H", "P", "intraCN(4,9)"]);
        let v = trichotomy_classify(9).unwrap();
        assert_eq!(v.recommended_s, Some(50));
        assert!((v.bound.unwrap() - 49.73).abs() < 0.01);
        assert_eq!(trichotomy_classify(4).unwrap().recommended_s, Some(19));
    }

    #[test]
    fn recommended_s_is_admissible() {
        for d in 2..=100u64 {
            let v = trichotomy_classify(d).unwrap();
            if let Some(s) = v.recommended_s {
                assert!(s as f64 > certgeom::ts_universality_bound(d));
                let modulus = if v.case_tag == CaseTag::PrimeI {
                    phase_modulus(d)
                } else {
                    d
                };
                assert_ne!(modulus % s, 0);
                assert!(!clifford_membership(d, &t_s(d, s).unwrap()).unwrap().member);
            }
        }
    }

    #[test]
    fn qubit_pipeline_verdicts() {
        let cliff = vec![pauli_x(2), hadamard(2), phase_gate(2)];
        let v = density_certify(2, &cliff, Budgets::default()).unwrap();
        assert_eq!(v.status, DensityStatus::Finite);
        assert_eq!(v.finite_order, Some(24));
        let mut ct = cliff.clone();
        ct.push(t_s(2, 8).unwrap());
        let v = density_certify(2, &ct, Budgets::default()).unwrap();
        assert_eq!(v.status, DensityStatus::Dense);
        assert!(v.irreducible);
        assert!((v.certificate.unwrap().proj_distance - 0.3902).abs() < 1e-4);
    }

    #[test]
    fn clifford_pipeline_orders() {
        for d in 2..=4u64 {
            let sl2 = arith::enumerate_sl2(d).unwrap().len();
            let v = density_certify(
                d,
                &[pauli_x(d), hadamard(d), phase_gate(d)],
                Budgets::default(),
            )
            .unwrap();
            assert_eq!(v.status, DensityStatus::Finite);
            assert_eq!(v.finite_order, Some((d * d) as usize * sl2));
        }
    }
}
