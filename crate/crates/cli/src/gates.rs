//! Gate registry: `X`, `Z`, `H`, `P`, `Ts(s)`, `CN(p,q)`, `intraCN(p,q)` and
//! `matrix:<path>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use quk::composite::{cn_gate, intra_qudit_cn};
use quk::diagonalgates::t_s;
use quk::matrix::MatrixJson;
use quk::paulicliff::{hadamard, pauli_x, pauli_z, phase_gate};
use quk::{Error, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateSpec {
    X,
    Z,
    H,
    P,
    Ts(u64),
    Cn(u64, u64),
    IntraCn(u64, u64),
    Matrix(PathBuf),
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::X => write!(f, "X"),
            GateSpec::Z => write!(f, "Z"),
            GateSpec::H => write!(f, "H"),
            GateSpec::P => write!(f, "P"),
            GateSpec::Ts(s) => write!(f, "Ts({s})"),
            GateSpec::Cn(p, q) => write!(f, "CN({p},{q})"),
            GateSpec::IntraCn(p, q) => write!(f, "intraCN({p},{q})"),
            GateSpec::Matrix(path) => write!(f, "matrix:{}", path.display()),
        }
    }
}

fn call_args<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn parse_u64(arg: &str, spec: &str) -> Result<u64, String> {
    arg.trim()
        .parse()
        .map_err(|_| format!("bad integer {arg:?} in gate spec {spec:?}"))
}

fn parse_pair(args: &str, spec: &str) -> Result<(u64, u64), String> {
    let mut it = args.split(',');
    match (it.next(), it.next(), it.next()) {
        (Some(p), Some(q), None) => Ok((parse_u64(p, spec)?, parse_u64(q, spec)?)),
        _ => Err(format!("gate spec {spec:?} expects two arguments")),
    }
}

impl FromStr for GateSpec {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let t = text.trim();
        if let Some(path) = t.strip_prefix("matrix:") {
            if path.is_empty() {
                return Err("matrix: needs a file path".into());
            }
            return Ok(GateSpec::Matrix(PathBuf::from(path)));
        }
        match t {
            "X" => return Ok(GateSpec::X),
            "Z" => return Ok(GateSpec::Z),
            "H" => return Ok(GateSpec::H),
            "P" => return Ok(GateSpec::P),
            _ => {}
        }
        if let Some(args) = call_args(t, "Ts") {
            return Ok(GateSpec::Ts(parse_u64(args, t)?));
        }
        if let Some(args) = call_args(t, "intraCN") {
            let (p, q) = parse_pair(args, t)?;
            return Ok(GateSpec::IntraCn(p, q));
        }
        if let Some(args) = call_args(t, "CN") {
            let (p, q) = parse_pair(args, t)?;
            return Ok(GateSpec::Cn(p, q));
        }
        Err(format!(
            "unknown gate {t:?}; expected X, Z, H, P, Ts(s), CN(p,q), intraCN(p,q) or matrix:<path>"
        ))
    }
}

/// Polar projection onto the unitary group, so near-unitary input accepted
/// under a loose tolerance satisfies the strict checks downstream.
fn nearest_unitary(u: UnitaryMatrix) -> quk::Result<UnitaryMatrix> {
    let svd = u.into_matrix().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(w), Some(v_t)) => UnitaryMatrix::new(w * v_t),
        _ => Err(Error::Numeric("SVD failed on matrix input".into())),
    }
}

impl GateSpec {
    /// Builds the gate on a `d`-level system. `tol` bounds the unitarity
    /// deviation accepted for matrix files.
    pub fn build(&self, d: u64, tol: f64) -> quk::Result<UnitaryMatrix> {
        let u = match self {
            GateSpec::X => pauli_x(d),
            GateSpec::Z => pauli_z(d),
            GateSpec::H => hadamard(d),
            GateSpec::P => phase_gate(d),
            GateSpec::Ts(s) => t_s(d, *s)?,
            GateSpec::Cn(p, q) => cn_gate(*p, *q)?,
            GateSpec::IntraCn(p, q) => intra_qudit_cn(d, *p, *q)?,
            GateSpec::Matrix(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::MalformedMatrix(format!("{}: {e}", path.display())))?;
                let m = MatrixJson::parse(&text)?.to_matrix()?;
                nearest_unitary(UnitaryMatrix::with_tolerance(m, tol)?)?
            }
        };
        if u.dim() != d as usize {
            return Err(Error::DimensionMismatch {
                expected: d as usize,
                found: u.dim(),
            });
        }
        Ok(u)
    }
}
