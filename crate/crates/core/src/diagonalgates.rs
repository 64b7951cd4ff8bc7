//! Diagonal phase gates: coboundaries, the bicharacter test, the `T_s` family
//! and the orbit-mixing Fourier test.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::matrix::{c, root_of_unity, UnitaryMatrix, C64};
use crate::paulicliff::{self, phase_modulus};

/// Tolerance on `|ζ(x)| = 1`.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;
pub const BICHARACTER_TOL: f64 = 1e-9;
/// Fourier coefficients above this magnitude count as nonzero.
pub const DFT_TOL: f64 = 1e-9;

/// Unit-modulus function on Z_d, normalized so that `ζ(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFunction {
    pub d: u64,
    pub values: Vec<C64>,
}

impl PhaseFunction {
    /// Validates unit modulus and divides out `ζ(0)`.
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDimension {
                dim: values.len() as i64,
                reason: "phase function needs d >= 2 values",
            });
        }
        if let Some((x, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| (v.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
        {
            return Err(Error::InvalidArgument(format!(
                "phase value at {x} has modulus {}",
                v.norm()
            )));
        }
        let base = values[0].conj();
        Ok(PhaseFunction {
            d: values.len() as u64,
            values: values.into_iter().map(|v| v * base).collect(),
        })
    }

    /// `ζ(k) = exp(2πi·k/s)` on representatives `k = 0, …, d−1`.
    pub fn ts(d: u64, s: u64) -> Result<Self> {
        if d < 2 || s < 1 {
            return Err(Error::InvalidArgument(format!(
                "T_s needs d >= 2 and s >= 1, got d = {d}, s = {s}"
            )));
        }
        Ok(PhaseFunction {
            d,
            values: (0..d as i64).map(|k| root_of_unity(k, s)).collect(),
        })
    }

    /// Reads the phases off a diagonal unitary.
    pub fn from_diagonal(u: &UnitaryMatrix, tol: f64) -> Result<Self> {
        if !u.is_diagonal(tol) {
            return Err(Error::InvalidArgument("gate is not diagonal".into()));
        }
        Self::new(u.diagonal_entries())
    }

    fn at(&self, x: i64) -> C64 {
        self.values[arith::modulo(x, self.d as i64) as usize]
    }
}

pub fn t_zeta(zeta: &PhaseFunction) -> UnitaryMatrix {
    UnitaryMatrix::trusted(crate::matrix::diagonal(&zeta.values))
}

/// `T_s = Σ_k exp(2πik/s)|k⟩⟨k|` on dimension `d`.
pub fn t_s(d: u64, s: u64) -> Result<UnitaryMatrix> {
    Ok(t_zeta(&PhaseFunction::ts(d, s)?))
}

/// `δ(x, y) = ζ(x+y) / (ζ(x)·ζ(y))` with addition mod `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoboundaryTable {
    pub d: u64,
    pub delta: Vec<Vec<C64>>,
}

impl CoboundaryTable {
    pub fn get(&self, x: u64, y: u64) -> C64 {
        self.delta[(x % self.d) as usize][(y % self.d) as usize]
    }
}

pub fn coboundary(zeta: &PhaseFunction) -> CoboundaryTable {
    let d = zeta.d as i64;
    let delta = (0..d)
        .map(|x| {
            (0..d)
                .map(|y| {
                    if x == 0 || y == 0 {
                        c(1.0, 0.0)
                    } else {
                        zeta.at(x + y) * (zeta.at(x) * zeta.at(y)).conj()
                    }
                })
                .collect()
        })
        .collect();
    CoboundaryTable { d: zeta.d, delta }
}

/// Whether `b(x, y+z) = b(x, y)·b(x, z)` for every triple.
pub fn bicharacter_test(table: &CoboundaryTable) -> bool {
    let d = table.d;
    (0..d).all(|x| {
        (0..d).all(|y| {
            (0..d).all(|z| {
                let lhs = table.get(x, y + z);
                let rhs = table.get(x, y) * table.get(x, z);
                (lhs - rhs).norm() <= BICHARACTER_TOL
            })
        })
    })
}

/// Clifford membership of `T_ζ` by the bicharacter test, cross-checked against
/// operational conjugation. Disagreement is an error.
pub fn diagonal_is_clifford(zeta: &PhaseFunction) -> Result<bool> {
    let by_table = bicharacter_test(&coboundary(zeta));
    let operational = paulicliff::clifford_membership(zeta.d, &t_zeta(zeta))?.member;
    if by_table != operational {
        return Err(Error::Inconsistent(format!(
            "bicharacter test says {by_table}, conjugation says {operational} for d = {}",
            zeta.d
        )));
    }
    Ok(by_table)
}

/// The divisibility predicate `s | K_d` for Clifford-ness of `T_s`.
///
/// Kept for comparison only; it disagrees with operational membership for
/// some even `d` (see [`ts_discrepancies`]).
pub fn ts_divisibility_criterion(d: u64, s: u64) -> bool {
    phase_modulus(d).is_multiple_of(s)
}

/// A pair `(d, s)` where the divisibility predicate and operational
/// membership of `T_s` disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsDiscrepancy {
    pub d: u64,
    pub s: u64,
    pub predicted_clifford: bool,
    pub operational_clifford: bool,
}

/// All disagreements between [`ts_divisibility_criterion`] and operational
/// membership over `2 ≤ d ≤ d_max`, `2 ≤ s ≤ s_max`.
pub fn ts_discrepancies(d_max: u64, s_max: u64) -> Result<Vec<TsDiscrepancy>> {
    let mut out = Vec::new();
    for d in 2..=d_max {
        for s in 2..=s_max {
            let predicted = ts_divisibility_criterion(d, s);
            let operational = diagonal_is_clifford(&PhaseFunction::ts(d, s)?)?;
            if predicted != operational {
                out.push(TsDiscrepancy {
                    d,
                    s,
                    predicted_clifford: predicted,
                    operational_clifford: operational,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorMixing {
    pub u: u64,
    pub nonzero_units: Vec<u64>,
}

/// Mixing report `{"d", "s", "mixing", "per_divisor", "prime_power"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingReport {
    pub d: u64,
    pub s: Option<u64>,
    pub mixing: bool,
    pub per_divisor: Vec<DivisorMixing>,
    /// False when `d` is not a prime power and all proper divisors were used.
    pub prime_power: bool,
}

/// `f̂(b) = d^{-1/2} Σ_k δ(u, k)·ω^{-kb}`.
pub fn coboundary_dft(table: &CoboundaryTable, u: u64, b: u64) -> C64 {
    let d = table.d;
    let sum: C64 = (0..d)
        .map(|k| table.get(u, k) * root_of_unity(-((k * b) as i64), d))
        .sum();
    sum / (d as f64).sqrt()
}

pub fn orbit_mixing_test(zeta: &PhaseFunction) -> Result<MixingReport> {
    let d = zeta.d;
    let table = coboundary(zeta);
    let units = arith::units(d);
    let per_divisor: Vec<DivisorMixing> = arith::proper_divisors(d)
        .into_iter()
        .map(|u| DivisorMixing {
            u,
            nonzero_units: units
                .iter()
                .copied()
                .filter(|&b| coboundary_dft(&table, u, b).norm() > DFT_TOL)
                .collect(),
        })
        .collect();
    Ok(MixingReport {
        d,
        s: None,
        mixing: per_divisor.iter().all(|m| !m.nonzero_units.is_empty()),
        per_divisor,
        prime_power: arith::factorize(d)?.is_prime_power(),
    })
}

pub fn ts_mixing_report(d: u64, s: u64) -> Result<MixingReport> {
    let mut report = orbit_mixing_test(&PhaseFunction::ts(d, s)?)?;
    report.s = Some(s);
    Ok(report)
}

/// Closed form of the coboundary Fourier coefficient of `T_s`:
/// `d^{-1/2}·(1 − ω^{nu})(1 − λ_s)/(1 − ω^{−n})` with `λ_s = exp(−2πi·d/s)`.
pub fn ts_dft_closed_form(d: u64, s: u64, u: u64, n: u64) -> Result<C64> {
    if arith::gcd(n as i64, d as i64) != 1 {
        return Err(Error::NotAUnit {
            value: n as i64,
            modulus: d as i64,
        });
    }
    if u == 0 || u >= d || !d.is_multiple_of(u) {
        return Err(Error::InvalidArgument(format!(
            "{u} is not a proper divisor of {d}"
        )));
    }
    let one = c(1.0, 0.0);
    let lambda = root_of_unity(-(d as i64), s);
    let num = (one - root_of_unity((n * u) as i64, d)) * (one - lambda);
    let den = one - root_of_unity(-(n as i64), d);
    Ok(num / den / (d as f64).sqrt())
}
