//! Exact integer and modular arithmetic: factorization, Bézout pairs, CRT
//! index maps and brute-force enumeration of SL(2, Z/nZ).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`enumerate_sl2`] unless a caller raises it.
/// Enumeration visits n⁴ candidate matrices.
pub const DEFAULT_SL2_CAP: u64 = 30;

/// Canonical prime-power factorization of an integer d ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub d: u64,
    /// `(p, m)` pairs with strictly increasing primes and `m ≥ 1`.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// The pairwise coprime prime-power factors `p^m`, in prime order.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, m)| p.pow(m)).collect()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }
}

pub fn factorize(d: u64) -> Result<Factorization> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d as i64,
            reason: "factorization requires d >= 2",
        });
    }
    let mut factors = Vec::new();
    let mut rest = d;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut m = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                m += 1;
            }
            factors.push((p, m));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { d, factors })
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.is_prime()).unwrap_or(false)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Non-negative residue of `x` modulo `n`.
pub fn modulo(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

/// Divisors `u` of `d` with `1 < u < d`, ascending.
pub fn proper_divisors(d: u64) -> Vec<u64> {
    (2..d).filter(|u| d.is_multiple_of(*u)).collect()
}

/// Units of Z/dZ, ascending.
pub fn units(d: u64) -> Vec<u64> {
    (1..d).filter(|&n| gcd(n as i64, d as i64) == 1).collect()
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let (g, x, _) = extended_gcd(modulo(a, n), n);
    (g == 1).then(|| modulo(x, n))
}

/// Bézout coefficients `(a, b)` with `a·p + b·q = 1`.
///
/// The pair is made canonical by reducing `a` modulo `q` into `(-q/2, q/2]`;
/// `b` then follows exactly. `p = 1` yields `(1, 0)`.
pub fn bezout(p: i64, q: i64) -> Result<(i64, i64)> {
    if p < 1 || q < 1 {
        return Err(Error::InvalidArgument(format!(
            "bezout expects positive integers, got ({p}, {q})"
        )));
    }
    let g = gcd(p, q);
    if g != 1 {
        return Err(Error::NotCoprime { p, q, gcd: g });
    }
    if p == 1 {
        return Ok((1, 0));
    }
    if q == 1 {
        return Ok((0, 1));
    }
    let mut a = mod_inverse(p, q).expect("coprime inputs have an inverse");
    if 2 * a > q {
        a -= q;
    }
    let b = (1 - a * p) / q;
    debug_assert_eq!(a * p + b * q, 1);
    Ok((a, b))
}

/// CRT relabeling `x ↦ (x mod d1)·d2 + (x mod d2)` on `{0, …, d1·d2 − 1}`.
///
/// Entry `x` of the returned vector is the tensor-basis index of `x`.
pub fn crt_index_map(d1: u64, d2: u64) -> Result<Vec<usize>> {
    if d1 < 1 || d2 < 1 {
        return Err(Error::InvalidArgument(format!(
            "CRT factors must be positive, got ({d1}, {d2})"
        )));
    }
    let g = gcd(d1 as i64, d2 as i64);
    if g != 1 {
        return Err(Error::NotCoprime {
            p: d1 as i64,
            q: d2 as i64,
            gcd: g,
        });
    }
    let d = d1 * d2;
    Ok((0..d)
        .map(|x| ((x % d1) * d2 + (x % d2)) as usize)
        .collect())
}

/// A 2×2 matrix over Z/nZ with unit determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SL2Element {
    /// Row-major entries `[[a, b], [c, d]]`, each reduced into `[0, n)`.
    pub entries: [[i64; 2]; 2],
    pub modulus: i64,
}

impl SL2Element {
    /// Builds an element, reducing entries and checking `ad − bc ≡ 1`.
    pub fn new(entries: [[i64; 2]; 2], modulus: i64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidDimension {
                dim: modulus,
                reason: "SL(2) modulus must be >= 2",
            });
        }
        let el = Self::reduced(entries, modulus);
        if el.det() != 1 {
            return Err(Error::InvalidArgument(format!(
                "determinant of {:?} is {} mod {modulus}, not 1",
                el.entries,
                el.det()
            )));
        }
        Ok(el)
    }

    /// Reduces entries without the determinant check.
    pub fn reduced(entries: [[i64; 2]; 2], modulus: i64) -> Self {
        let r = |x: i64| modulo(x, modulus);
        SL2Element {
            entries: [
                [r(entries[0][0]), r(entries[0][1])],
                [r(entries[1][0]), r(entries[1][1])],
            ],
            modulus,
        }
    }

    pub fn identity(modulus: i64) -> Self {
        Self::reduced([[1, 0], [0, 1]], modulus)
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.entries;
        modulo(a * d - b * c, self.modulus)
    }

    pub fn mul(&self, other: &SL2Element) -> SL2Element {
        debug_assert_eq!(self.modulus, other.modulus);
        let [[a, b], [c, d]] = self.entries;
        let [[e, f], [g, h]] = other.entries;
        Self::reduced(
            [
                [a * e + b * g, a * f + b * h],
                [c * e + d * g, c * f + d * h],
            ],
            self.modulus,
        )
    }

    /// Action on a column vector of Z_n².
    pub fn apply(&self, u: (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.entries;
        (
            modulo(a * u.0 + b * u.1, self.modulus),
            modulo(c * u.0 + d * u.1, self.modulus),
        )
    }
}

/// All of SL(2, Z/nZ) by exhaustive filtering, with the default cap.
pub fn enumerate_sl2(n: u64) -> Result<Vec<SL2Element>> {
    enumerate_sl2_with_cap(n, DEFAULT_SL2_CAP)
}

/// All of SL(2, Z/nZ), in lexicographic order of `(a, b, c, d)`.
pub fn enumerate_sl2_with_cap(n: u64, cap: u64) -> Result<Vec<SL2Element>> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n as i64,
            reason: "SL(2) modulus must be >= 2",
        });
    }
    if n > cap {
        return Err(Error::BudgetExceeded {
            what: "SL(2) enumeration modulus",
            requested: n as usize,
            cap: cap as usize,
        });
    }
    let n = n as i64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if modulo(a * d - b * c, n) == 1 {
                        out.push(SL2Element {
                            entries: [[a, b], [c, d]],
                            modulus: n,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}
