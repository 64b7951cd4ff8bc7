//! Adjoint action of gates on traceless matrices in the Pauli basis, commutant
//! dimension, SL(2, Z/dZ) orbits and invariant subspaces.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, SL2Element};
use crate::error::{Error, Result};
use crate::matrix::{c, hermitian_eigen, root_of_unity, CMatrix, UnitaryMatrix, C64};
use crate::paulicliff::{self, PauliIndex};

/// Singular values below this count toward the commutant dimension.
pub const SIGMA_TOL: f64 = 1e-7;
/// Eigenvalues of the auxiliary Hermitian elements closer than this are merged.
const CLUSTER_TOL: f64 = 1e-6;
const SEED: u64 = 0x05ee_dad1;

/// Matrix of `M ↦ U M U†` on traceless matrices, in the basis of
/// [`paulicliff::nonzero_indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMatrix {
    pub source_dim: u64,
    pub dim_alg: usize,
    pub entries: CMatrix,
}

fn check_gates(d: u64, gates: &[UnitaryMatrix]) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d as i64,
            reason: "qudit dimension must be >= 2",
        });
    }
    if gates.is_empty() {
        return Err(Error::InvalidArgument("gate list is empty".into()));
    }
    for g in gates {
        if g.dim() != d as usize {
            return Err(Error::DimensionMismatch {
                expected: d as usize,
                found: g.dim(),
            });
        }
    }
    Ok(())
}

/// Coefficients of `W` in the Pauli basis: `tr(V_u† W)/d` for each nonzero `u`.
fn pauli_coefficients(d: u64, w: &CMatrix) -> Vec<C64> {
    let n = d as usize;
    let mut out = Vec::with_capacity(n * n - 1);
    for a in 0..n {
        for b in 0..n {
            if a == 0 && b == 0 {
                continue;
            }
            let mut acc = c(0.0, 0.0);
            for j in 0..n {
                acc += root_of_unity(-((b * j) as i64), d) * w[((j + a) % n, j)];
            }
            out.push(acc / d as f64);
        }
    }
    out
}

pub fn adjoint_in_pauli_basis(d: u64, u: &UnitaryMatrix) -> Result<AdjointMatrix> {
    check_gates(d, std::slice::from_ref(u))?;
    let basis = paulicliff::nonzero_indices(d);
    let m = basis.len();
    let mut entries = CMatrix::zeros(m, m);
    for (col, idx) in basis.iter().enumerate() {
        let image = u.conjugate(&paulicliff::pauli_matrix(d, idx));
        for (row, coef) in pauli_coefficients(d, &image).into_iter().enumerate() {
            entries[(row, col)] = coef;
        }
    }
    Ok(AdjointMatrix {
        source_dim: d,
        dim_alg: m,
        entries,
    })
}

/// Commutant of a set of adjoint matrices, with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Commutant {
    pub dim: usize,
    /// Frobenius-orthonormal basis of the commutant.
    pub basis: Vec<CMatrix>,
    /// Singular values of the reduced linear system, ascending.
    pub singular_values: Vec<f64>,
}

/// Groups ascending eigenvalues into clusters separated by more than `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// A random Hermitian element of the *-algebra generated by `mats`.
fn random_hermitian_in_algebra(mats: &[CMatrix], rng: &mut ChaCha8Rng) -> CMatrix {
    let n = mats[0].nrows();
    let mut letters: Vec<CMatrix> = Vec::with_capacity(2 * mats.len());
    for m in mats {
        letters.push(m.clone());
        letters.push(m.adjoint());
    }
    let mut acc = CMatrix::zeros(n, n);
    for _ in 0..16 {
        let len = rng.random_range(1..=5);
        let mut w = CMatrix::identity(n, n);
        for _ in 0..len {
            w = &w * &letters[rng.random_range(0..letters.len())];
        }
        let coef = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        acc += &w * coef;
    }
    (&acc + acc.adjoint()) * c(0.5, 0.0)
}

/// Upper-triangular factor of a tall matrix supplied in row blocks.
struct StreamingQr {
    r: Option<CMatrix>,
    cols: usize,
}

impl StreamingQr {
    fn new(cols: usize) -> Self {
        StreamingQr { r: None, cols }
    }

    fn push(&mut self, block: CMatrix) {
        let stacked = match self.r.take() {
            None => block,
            Some(r) => {
                let mut s = CMatrix::zeros(r.nrows() + block.nrows(), self.cols);
                s.rows_mut(0, r.nrows()).copy_from(&r);
                s.rows_mut(r.nrows(), block.nrows()).copy_from(&block);
                s
            }
        };
        self.r = Some(stacked.qr().r());
    }

    fn finish(self) -> CMatrix {
        self.r.unwrap_or_else(|| CMatrix::zeros(0, self.cols))
    }
}

/// Null space of the matrix whose R-factor is `r`, with the ambiguity guard.
fn null_space(r: CMatrix) -> Result<(Vec<nalgebra::DVector<C64>>, Vec<f64>)> {
    let cols = r.ncols();
    let mut square = CMatrix::zeros(cols, cols);
    let rows = r.nrows().min(cols);
    square.rows_mut(0, rows).copy_from(&r.rows(0, rows));
    let svd = square.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    if sigma
        .iter()
        .any(|&s| (SIGMA_TOL / 10.0..=SIGMA_TOL * 10.0).contains(&s))
    {
        sigma.sort_by(f64::total_cmp);
        return Err(Error::CommutantAmbiguous {
            threshold: SIGMA_TOL,
            singular_values: sigma,
        });
    }
    let null: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < SIGMA_TOL)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    sigma.sort_by(f64::total_cmp);
    Ok((null, sigma))
}

/// Commutant of the matrices `mats` (all `n × n`).
///
/// Candidates are restricted to the block structure of a random Hermitian
/// element of the generated algebra; the remaining linear system is solved
/// exactly by QR and SVD.
pub fn matrix_commutant(mats: &[CMatrix]) -> Result<Commutant> {
    let n = mats[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = random_hermitian_in_algebra(mats, &mut rng);
    let (values, q) = hermitian_eigen(&h)?;
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for range in clusters(&values, CLUSTER_TOL) {
        for r in range.clone() {
            for s in range.clone() {
                candidates.push((r, s));
            }
        }
    }
    let ncand = candidates.len();
    let chunk = (4 * ncand).max(2048).div_ceil(n).max(1);
    let mut qr = StreamingQr::new(ncand);
    for a in mats {
        let at = q.adjoint() * a * &q;
        let mut x0 = 0;
        while x0 < n {
            let xs = chunk.min(n - x0);
            let mut block = CMatrix::zeros(xs * n, ncand);
            for (t, &(r, s)) in candidates.iter().enumerate() {
                // Column of Ã·E_rs − E_rs·Ã at entry (x, y).
                for x in x0..x0 + xs {
                    block[((x - x0) * n + s, t)] += at[(x, r)];
                }
                if (x0..x0 + xs).contains(&r) {
                    for y in 0..n {
                        block[((r - x0) * n + y, t)] -= at[(s, y)];
                    }
                }
            }
            qr.push(block);
            x0 += xs;
        }
    }
    let (null, singular_values) = null_space(qr.finish())?;
    if null.is_empty() {
        return Err(Error::Numeric(
            "commutant came out empty; the identity always commutes".into(),
        ));
    }
    let basis = null
        .iter()
        .map(|v| {
            let mut m = CMatrix::zeros(n, n);
            for (t, &(r, s)) in candidates.iter().enumerate() {
                m[(r, s)] = v[t];
            }
            &q * m * q.adjoint()
        })
        .collect::<Vec<_>>();
    Ok(Commutant {
        dim: basis.len(),
        basis,
        singular_values,
    })
}

fn adjoint_matrices(d: u64, gates: &[UnitaryMatrix]) -> Result<Vec<CMatrix>> {
    check_gates(d, gates)?;
    gates
        .iter()
        .map(|g| adjoint_in_pauli_basis(d, g).map(|a| a.entries))
        .collect()
}

pub fn commutant(d: u64, gates: &[UnitaryMatrix]) -> Result<Commutant> {
    matrix_commutant(&adjoint_matrices(d, gates)?)
}

/// Dimension of the commutant of the adjoint action; `1` means irreducible.
pub fn commutant_dimension(d: u64, gates: &[UnitaryMatrix]) -> Result<usize> {
    commutant(d, gates).map(|c| c.dim)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// `gcd(a, b, d)`, shared by every member.
    pub invariant: u64,
    pub members: Vec<PauliIndex>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTable {
    pub d: u64,
    /// Ordered by smallest member.
    pub orbits: Vec<Orbit>,
}

pub fn orbit_decomposition(d: u64) -> Result<OrbitTable> {
    orbit_decomposition_with_cap(d, arith::DEFAULT_SL2_CAP)
}

pub fn orbit_decomposition_with_cap(d: u64, cap: u64) -> Result<OrbitTable> {
    let group = arith::enumerate_sl2_with_cap(d, cap)?;
    let n = d as usize;
    let mut seen = vec![false; n * n];
    seen[0] = true;
    let mut orbits = Vec::new();
    for start in 1..n * n {
        if seen[start] {
            continue;
        }
        let u = ((start / n) as i64, (start % n) as i64);
        let mut members = Vec::new();
        for g in &group {
            let (a, b) = g.apply(u);
            let key = a as usize * n + b as usize;
            if !seen[key] {
                seen[key] = true;
                members.push(PauliIndex::xz(d, a, b));
            }
        }
        members.sort();
        let invariant = arith::gcd(arith::gcd(u.0, u.1), d as i64) as u64;
        orbits.push(Orbit {
            invariant,
            size: members.len(),
            members,
        });
    }
    Ok(OrbitTable { d, orbits })
}

/// Report format `{"d", "commutant_dim", "orbits": [{"invariant", "size"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub d: u64,
    pub commutant_dim: usize,
    pub orbits: Vec<OrbitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub invariant: u64,
    pub size: usize,
}

pub fn orbit_report(d: u64, gates: &[UnitaryMatrix]) -> Result<OrbitReport> {
    let table = orbit_decomposition(d)?;
    Ok(OrbitReport {
        d,
        commutant_dim: commutant_dimension(d, gates)?,
        orbits: table
            .orbits
            .iter()
            .map(|o| OrbitSummary {
                invariant: o.invariant,
                size: o.size,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockMethod {
    /// Orbits of SL(2, Z/dZ) on Pauli labels.
    Orbit,
    /// Isotypic components of the numerically computed commutant.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantBlock {
    pub dimension: usize,
    /// Pauli labels on which the block projector has support.
    pub support: Vec<PauliIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSubspaceReport {
    pub d: u64,
    pub method: BlockMethod,
    pub commutant_dim: usize,
    pub blocks: Vec<InvariantBlock>,
}

/// Whether the images in SL(2, Z/dZ) generate the whole group.
fn generates_sl2(d: u64, images: &[SL2Element]) -> Result<bool> {
    let total = arith::enumerate_sl2(d)?.len();
    let mut seen = std::collections::HashSet::new();
    let id = SL2Element::identity(d as i64);
    seen.insert(id);
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for h in images {
            let next = g.mul(h);
            if seen.insert(next) {
                frontier.push(next);
            }
        }
    }
    Ok(seen.len() == total)
}

/// Invariant subspaces of the adjoint action.
///
/// Clifford generator sets whose images generate SL(2, Z/dZ) use the orbit
/// blocks when the commutant dimension confirms them; everything else falls
/// back to the isotypic decomposition of the numerical commutant.
pub fn invariant_subspace_report(
    d: u64,
    gates: &[UnitaryMatrix],
) -> Result<InvariantSubspaceReport> {
    let comm = commutant(d, gates)?;
    if d <= arith::DEFAULT_SL2_CAP {
        let mut images = Vec::new();
        let mut all_clifford = true;
        for g in gates {
            let w = paulicliff::clifford_membership(d, g)?;
            match w.sl2_image {
                Some(img) if w.member => images.push(img),
                _ => {
                    all_clifford = false;
                    break;
                }
            }
        }
        if all_clifford && generates_sl2(d, &images)? {
            let table = orbit_decomposition(d)?;
            if table.orbits.len() == comm.dim {
                return Ok(InvariantSubspaceReport {
                    d,
                    method: BlockMethod::Orbit,
                    commutant_dim: comm.dim,
                    blocks: table
                        .orbits
                        .into_iter()
                        .map(|o| InvariantBlock {
                            dimension: o.size,
                            support: o.members,
                        })
                        .collect(),
                });
            }
        }
    }
    let blocks = isotypic_blocks(d, &comm)?;
    Ok(InvariantSubspaceReport {
        d,
        method: BlockMethod::Numerical,
        commutant_dim: comm.dim,
        blocks,
    })
}

fn isotypic_blocks(d: u64, comm: &Commutant) -> Result<Vec<InvariantBlock>> {
    let n = comm.basis[0].nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x15_07);
    let mut k = CMatrix::zeros(n, n);
    for m in &comm.basis {
        k += m * c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let k = (&k + k.adjoint()) * c(0.5, 0.0);
    let (values, q) = hermitian_eigen(&k)?;
    let parts: Vec<CMatrix> = clusters(&values, CLUSTER_TOL)
        .into_iter()
        .map(|r| q.columns(r.start, r.len()).into_owned())
        .collect();

    // Irreducible pieces are equivalent iff the commutant links them.
    let mut parent: Vec<usize> = (0..parts.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let linked = comm
                .basis
                .iter()
                .any(|m| (parts[i].adjoint() * m * &parts[j]).norm() > CLUSTER_TOL);
            if linked {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..parts.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let labels = paulicliff::nonzero_indices(d);
    let mut blocks: Vec<InvariantBlock> = groups
        .values()
        .map(|members| {
            let mut dimension = 0;
            let mut weight = vec![0.0f64; n];
            for &i in members {
                dimension += parts[i].ncols();
                for col in parts[i].column_iter() {
                    for (r, v) in col.iter().enumerate() {
                        weight[r] += v.norm_sqr();
                    }
                }
            }
            let support = (0..n)
                .filter(|&r| weight[r] > 1e-9)
                .map(|r| labels[r])
                .collect();
            InvariantBlock { dimension, support }
        })
        .collect();
    blocks.sort_by(|a, b| a.support.first().cmp(&b.support.first()));
    Ok(blocks)
}
