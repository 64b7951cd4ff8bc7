//! Spectral span, projective distance to the identity and the search for
//! near-identity elements that certify an infinite group.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::closure::{self, canonicalize, ProjectiveSet};
use crate::error::{Error, Result};
use crate::matrix::{unitary_eigenvalues, UnitaryMatrix};

/// Distances within this of `1/2` never certify.
pub const CERT_MARGIN: f64 = 1e-9;
/// Spans below this are reported as exactly zero.
const SPAN_SNAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    /// Eigenphases in turns, sorted, each in `[0, 1)`.
    pub eigenphases: Vec<f64>,
    /// Length in turns of the shortest arc covering the spectrum.
    pub span: f64,
    /// `min_φ ‖e^{iφ}U − I‖ = 2 sin(π·span/2)`.
    pub proj_distance: f64,
    /// Midpoint of the covering arc, in turns.
    pub centering_phase: f64,
}

/// Eigenphases this close below one turn are reported as zero.
const PHASE_SNAP: f64 = 1e-12;

pub fn spectral_report(u: &UnitaryMatrix) -> Result<SpectralReport> {
    let mut phases: Vec<f64> = unitary_eigenvalues(u.matrix())?
        .iter()
        .map(|z| {
            let t = z.arg() / (2.0 * PI);
            let t = t.rem_euclid(1.0);
            if t >= 1.0 - PHASE_SNAP {
                0.0
            } else {
                t
            }
        })
        .collect();
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("non-finite eigenphase".into()));
    }
    phases.sort_by(f64::total_cmp);
    let m = phases.len();
    // The covering arc starts right after the largest cyclic gap.
    let (mut gap, mut start) = (phases[0] + 1.0 - phases[m - 1], 0);
    for i in 1..m {
        let g = phases[i] - phases[i - 1];
        if g > gap {
            gap = g;
            start = i;
        }
    }
    let mut span = (1.0 - gap).max(0.0);
    if span < SPAN_SNAP {
        span = 0.0;
    }
    let centering_phase = (phases[start] + span / 2.0).rem_euclid(1.0);
    Ok(SpectralReport {
        eigenphases: phases,
        span,
        proj_distance: 2.0 * (PI * span / 2.0).sin(),
        centering_phase,
    })
}

/// One generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}^-1", self.generator)
        } else {
            write!(f, "g{}", self.generator)
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Element with `0 < dist_proj(h, I) < 1/2`.
///
/// Serializes as `{"word", "proj_distance", "eigenphases"}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfinitenessCertificate {
    #[serde(skip)]
    pub element: UnitaryMatrix,
    /// Product `L1·L2·…` of the letters, left to right.
    pub word: Vec<Letter>,
    pub proj_distance: f64,
    pub eigenphases: Vec<f64>,
}

fn certify(report: &SpectralReport) -> bool {
    report.span > 0.0 && report.proj_distance < 0.5 - CERT_MARGIN
}

pub fn certificate_check(u: &UnitaryMatrix) -> Result<Option<InfinitenessCertificate>> {
    let report = spectral_report(u)?;
    Ok(certify(&report).then(|| InfinitenessCertificate {
        element: u.clone(),
        word: Vec::new(),
        proj_distance: report.proj_distance,
        eigenphases: report.eigenphases,
    }))
}

/// `π(d−1) / (2·arcsin(1/4))`, the order above which `T_s` has small enough
/// spectral span.
pub fn ts_universality_bound(d: u64) -> f64 {
    PI * (d as f64 - 1.0) / (2.0 * (0.25f64).asin())
}

/// Outcome of [`certificate_search`], including how much was explored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub certificate: Option<InfinitenessCertificate>,
    pub elements_visited: usize,
    pub max_word_len_reached: usize,
    /// No new classes appeared, so the generated group is finite.
    pub exhausted: bool,
}

/// Breadth-first search over words in the generators and their inverses.
///
/// Letters are ordered `g0, g0^-1, g1, …`; each projective class keeps its
/// first word, so the returned certificate has minimal length and is first in
/// lexicographic order among those.
pub fn certificate_search(
    generators: &[UnitaryMatrix],
    max_word_len: usize,
    max_elements: usize,
) -> Result<SearchOutcome> {
    if generators.is_empty() {
        return Err(Error::InvalidArgument("no generators".into()));
    }
    if max_word_len == 0 || max_elements == 0 {
        return Err(Error::InvalidArgument(
            "search budgets must be positive".into(),
        ));
    }
    let n = generators[0].dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.dim(),
        });
    }
    let mats = closure::letters(generators);
    let labels: Vec<Letter> = (0..generators.len())
        .flat_map(|g| {
            [
                Letter {
                    generator: g,
                    inverse: false,
                },
                Letter {
                    generator: g,
                    inverse: true,
                },
            ]
        })
        .collect();

    let identity = UnitaryMatrix::identity(n);
    let mut seen = ProjectiveSet::new();
    seen.insert(canonicalize(&identity));
    let mut frontier: Vec<(UnitaryMatrix, Vec<Letter>)> = vec![(identity, Vec::new())];
    let mut depth = 0;
    while depth < max_word_len && !frontier.is_empty() {
        depth += 1;
        let candidates: Vec<_> = frontier
            .par_iter()
            .flat_map_iter(|(base, word)| {
                mats.iter().zip(&labels).map(move |(m, &l)| {
                    let p = base * m;
                    let f = canonicalize(&p);
                    let mut w = word.clone();
                    w.push(l);
                    (p, f, w)
                })
            })
            .collect();
        let mut fresh = Vec::new();
        for (p, f, w) in candidates {
            if seen.contains(&f) {
                continue;
            }
            seen.insert(f);
            fresh.push((p, w));
            if seen.len() >= max_elements {
                break;
            }
        }
        let reports: Vec<Result<SpectralReport>> =
            fresh.par_iter().map(|(p, _)| spectral_report(p)).collect();
        for ((p, w), report) in fresh.iter().zip(reports) {
            let report = report?;
            if certify(&report) {
                return Ok(SearchOutcome {
                    certificate: Some(InfinitenessCertificate {
                        element: p.clone(),
                        word: w.clone(),
                        proj_distance: report.proj_distance,
                        eigenphases: report.eigenphases,
                    }),
                    elements_visited: seen.len(),
                    max_word_len_reached: depth,
                    exhausted: false,
                });
            }
        }
        if seen.len() >= max_elements {
            return Ok(SearchOutcome {
                certificate: None,
                elements_visited: seen.len(),
                max_word_len_reached: depth,
                exhausted: false,
            });
        }
        frontier = fresh;
    }
    Ok(SearchOutcome {
        certificate: None,
        elements_visited: seen.len(),
        max_word_len_reached: depth,
        exhausted: frontier.is_empty(),
    })
}
