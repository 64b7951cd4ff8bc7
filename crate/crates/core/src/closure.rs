//! Projective group closure by breadth-first enumeration over phase-normalized
//! canonical forms.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{max_abs_diff, CMatrix, UnitaryMatrix};

/// Entries within this of the largest magnitude are treated as tied.
const TIE_TOL: f64 = 1e-6;
/// Canonical forms closer than this (entrywise) are the same element.
pub const MERGE_TOL: f64 = 1e-6;
const KEY_SCALE: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveCanonicalForm {
    pub dim: usize,
    /// The input times the conjugate phase of its pivot entry.
    pub entries: CMatrix,
    /// Real and imaginary parts rounded to 8 decimals, row-major.
    pub key: Vec<i64>,
}

pub fn canonicalize(u: &UnitaryMatrix) -> ProjectiveCanonicalForm {
    canonicalize_matrix(u.matrix())
}

pub(crate) fn canonicalize_matrix(m: &CMatrix) -> ProjectiveCanonicalForm {
    let n = m.nrows();
    let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = (0..n * n)
        .map(|k| m[(k / n, k % n)])
        .find(|z| z.norm() >= max - TIE_TOL)
        .expect("a nonzero matrix has a pivot");
    let phase = pivot.conj() / pivot.norm();
    let entries = m * phase;
    let mut key = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            let z = entries[(i, j)];
            key.push((z.re * KEY_SCALE).round() as i64);
            key.push((z.im * KEY_SCALE).round() as i64);
        }
    }
    ProjectiveCanonicalForm {
        dim: n,
        entries,
        key,
    }
}

/// Insert-only set of projective classes with an ε-comparison inside each
/// hash bucket.
#[derive(Debug, Default, Clone)]
pub struct ProjectiveSet {
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    forms: Vec<ProjectiveCanonicalForm>,
}

impl ProjectiveSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn contains(&self, form: &ProjectiveCanonicalForm) -> bool {
        self.buckets.get(&form.key).is_some_and(|ids| {
            ids.iter()
                .any(|&i| max_abs_diff(&self.forms[i].entries, &form.entries) <= MERGE_TOL)
        })
    }

    /// Returns `true` if the class was new.
    pub fn insert(&mut self, form: ProjectiveCanonicalForm) -> bool {
        if self.contains(&form) {
            return false;
        }
        let id = self.forms.len();
        self.buckets.entry(form.key.clone()).or_default().push(id);
        self.forms.push(form);
        true
    }

    pub fn forms(&self) -> &[ProjectiveCanonicalForm] {
        &self.forms
    }
}

#[derive(Debug, Clone)]
pub struct Closure {
    /// Representatives in discovery order, starting with the identity.
    pub elements: Vec<UnitaryMatrix>,
    pub set: ProjectiveSet,
    pub complete: bool,
    pub cap: usize,
}

/// Closure report `{"complete", "count", "cap"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub complete: bool,
    pub count: usize,
    pub cap: usize,
}

impl Closure {
    pub fn count(&self) -> usize {
        self.elements.len()
    }

    pub fn report(&self) -> ClosureReport {
        ClosureReport {
            complete: self.complete,
            count: self.count(),
            cap: self.cap,
        }
    }
}

/// Generators followed by their inverses, in the order `g0, g0⁻¹, g1, …`.
pub(crate) fn letters(generators: &[UnitaryMatrix]) -> Vec<UnitaryMatrix> {
    generators
        .iter()
        .flat_map(|g| [g.clone(), g.adjoint()])
        .collect()
}

/// Breadth-first closure under right multiplication by generators and their
/// inverses. Stops with `complete = false` once more than `cap` classes exist.
pub fn projective_closure(generators: &[UnitaryMatrix], cap: usize) -> Result<Closure> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "closure cap must be positive".into(),
        ));
    }
    let n = generators[0].dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let letters = letters(generators);
    let identity = UnitaryMatrix::identity(n);
    let mut set = ProjectiveSet::new();
    set.insert(canonicalize(&identity));
    let mut elements = vec![identity];
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let products: Vec<(UnitaryMatrix, ProjectiveCanonicalForm)> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let base = &elements[i];
                letters.iter().map(move |l| {
                    let p = base * l;
                    let f = canonicalize(&p);
                    (p, f)
                })
            })
            .collect();
        let mut next = Vec::new();
        for (p, f) in products {
            if set.insert(f) {
                if elements.len() >= cap {
                    return Ok(Closure {
                        elements,
                        set,
                        complete: false,
                        cap,
                    });
                }
                next.push(elements.len());
                elements.push(p);
            }
        }
        frontier = next;
    }
    Ok(Closure {
        elements,
        set,
        complete: true,
        cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, turns};
    use crate::paulicliff::{clifford_membership, hadamard, pauli_x, pauli_z, phase_gate};
    use rand::{Rng, SeedableRng};

    fn clifford(d: u64) -> Vec<UnitaryMatrix> {
        vec![pauli_x(d), hadamard(d), phase_gate(d)]
    }

    fn random_unitary(n: usize, rng: &mut impl Rng) -> UnitaryMatrix {
        let m = CMatrix::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        UnitaryMatrix::new(m.qr().q()).unwrap()
    }

    #[test]
    fn canonical_keys_ignore_global_phase() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let u = random_unitary(3, &mut rng);
            let v = u.times_phase(turns(rng.random_range(0.0..1.0)));
            assert_eq!(canonicalize(&u).key, canonicalize(&v).key);
        }
        let i = UnitaryMatrix::identity(2);
        assert_eq!(
            canonicalize(&i).key,
            canonicalize(&i.times_phase(c(-1., 0.))).key
        );
        assert_ne!(canonicalize(&pauli_x(2)).key, canonicalize(&pauli_z(2)).key);
    }

    #[test]
    fn clifford_closure_orders() {
        assert_eq!(
            projective_closure(&clifford(2), 20_000).unwrap().report(),
            ClosureReport {
                complete: true,
                count: 24,
                cap: 20_000
            }
        );
        let c3 = projective_closure(&clifford(3), 20_000).unwrap();
        assert!(c3.complete);
        assert_eq!(c3.count(), 216);
    }

    #[test]
    fn clifford_t_closure_hits_cap() {
        let t = UnitaryMatrix::diagonal(&[c(1., 0.), turns(0.125)]).unwrap();
        let mut gens = clifford(2);
        gens.push(t);
        let cl = projective_closure(&gens, 20_000).unwrap();
        assert!(!cl.complete);
        assert_eq!(cl.count(), 20_000);
    }

    #[test]
    fn closure_is_generator_order_independent() {
        let a = projective_closure(&clifford(3), 1000).unwrap();
        let mut rev = clifford(3);
        rev.reverse();
        let b = projective_closure(&rev, 1000).unwrap();
        assert_eq!(a.count(), b.count());
        for f in b.set.forms() {
            assert!(a.set.contains(f));
        }
    }

    #[test]
    fn closure_elements_are_clifford() {
        for d in [2u64, 3] {
            let cl = projective_closure(&clifford(d), 1000).unwrap();
            for e in &cl.elements {
                assert!(clifford_membership(d, e).unwrap().member);
            }
        }
    }

    #[test]
    fn closure_report_json() {
        let r = projective_closure(&clifford(2), 100).unwrap().report();
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"complete":true,"count":24,"cap":100}"#
        );
    }

    #[test]
    fn closure_rejects_bad_input() {
        assert!(projective_closure(&[], 10).is_err());
        assert!(projective_closure(&clifford(2), 0).is_err());
        assert!(projective_closure(&[pauli_x(2), pauli_x(3)], 10).is_err());
    }
}
