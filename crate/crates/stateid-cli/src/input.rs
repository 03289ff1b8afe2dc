//! Input file loading: states, pairs, quads, and protocol instances, all as
//! JSON documents. Complex scalars are `[re, im]` pairs; a state is either
//! an amplitude vector (a pure state) or a density matrix given by rows.

use num_complex::Complex64;
use serde_json::Value;
use std::path::Path;

use stateid::linmat::{ComplexMatrix, DensityMatrix, PureState};
use stateid::smp::{Matching, P1Input, P2Input};

pub type Result<T> = std::result::Result<T, String>;

pub fn load_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}

fn complex_from(v: &Value, ctx: &str) -> Result<Complex64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| format!("{ctx}: complex scalars are [re, im] pairs"))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| format!("{ctx}: non-numeric real part"))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| format!("{ctx}: non-numeric imaginary part"))?;
    Ok(Complex64::new(re, im))
}

/// An amplitude vector: `[[re, im], ...]`.
pub fn pure_from_value(v: &Value, name: &str) -> Result<PureState> {
    let rows = v
        .as_array()
        .ok_or_else(|| format!("{name}: expected an array of [re, im] amplitudes"))?;
    let amps: Result<Vec<Complex64>> = rows
        .iter()
        .map(|r| complex_from(r, name))
        .collect();
    PureState::new(amps?).map_err(|e| format!("{name}: {e}"))
}

/// A density matrix: `[[[re, im], ...], ...]` (rows of complex entries).
pub fn density_from_matrix(v: &Value, name: &str) -> Result<DensityMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| format!("{name}: expected an array of rows"))?;
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let entries = row
            .as_array()
            .ok_or_else(|| format!("{name}: expected rows of [re, im] entries"))?;
        let r: Result<Vec<Complex64>> =
            entries.iter().map(|e| complex_from(e, name)).collect();
        parsed.push(r?);
    }
    if parsed.is_empty() || parsed.iter().any(|r| r.len() != parsed.len()) {
        return Err(format!("{name}: density matrix must be square and nonempty"));
    }
    DensityMatrix::new(ComplexMatrix::from_rows(parsed)).map_err(|e| format!("{name}: {e}"))
}

/// A state in either form: amplitude vector or density matrix.
pub fn state_from_value(v: &Value, name: &str) -> Result<DensityMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| format!("{name}: expected an array"))?;
    let is_vector = rows
        .first()
        .and_then(|r| r.as_array())
        .map(|r| r.len() == 2 && r.iter().all(|e| e.is_number()))
        .unwrap_or(false);
    if is_vector {
        Ok(DensityMatrix::from_pure(&pure_from_value(v, name)?))
    } else {
        density_from_matrix(v, name)
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| format!("missing field {name}"))
}

pub fn load_pair(path: &Path) -> Result<(DensityMatrix, DensityMatrix)> {
    let v = load_json(path)?;
    Ok((
        state_from_value(field(&v, "alpha0")?, "alpha0")?,
        state_from_value(field(&v, "alpha1")?, "alpha1")?,
    ))
}

pub struct QuadFile {
    pub alpha0: DensityMatrix,
    pub alpha1: DensityMatrix,
    pub beta0: DensityMatrix,
    pub beta1: DensityMatrix,
    /// Present when the alphas were given as amplitude vectors.
    pub pure_alphas: Option<(PureState, PureState)>,
}

pub fn load_quad(path: &Path) -> Result<QuadFile> {
    let v = load_json(path)?;
    let a0v = field(&v, "alpha0")?;
    let a1v = field(&v, "alpha1")?;
    let alpha0 = state_from_value(a0v, "alpha0")?;
    let alpha1 = state_from_value(a1v, "alpha1")?;
    let pure_alphas = match (
        pure_from_value(a0v, "alpha0"),
        pure_from_value(a1v, "alpha1"),
    ) {
        (Ok(a), Ok(b)) => Some((a, b)),
        _ => None,
    };
    Ok(QuadFile {
        alpha0,
        alpha1,
        beta0: state_from_value(field(&v, "beta0")?, "beta0")?,
        beta1: state_from_value(field(&v, "beta1")?, "beta1")?,
        pure_alphas,
    })
}

fn bits_from(v: &Value, name: &str) -> Result<Vec<u8>> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("{name}: expected a bit array"))?;
    arr.iter()
        .map(|b| {
            b.as_u64()
                .filter(|&x| x <= 1)
                .map(|x| x as u8)
                .ok_or_else(|| format!("{name}: entries must be 0 or 1"))
        })
        .collect()
}

pub fn load_p1(path: &Path) -> Result<P1Input> {
    let v = load_json(path)?;
    P1Input::new(
        bits_from(field(&v, "x")?, "x")?,
        bits_from(field(&v, "s")?, "s")?,
        bits_from(field(&v, "y")?, "y")?,
    )
    .map_err(|e| e.to_string())
}

pub fn load_p2(path: &Path) -> Result<P2Input> {
    let v = load_json(path)?;
    let y = bits_from(field(&v, "y")?, "y")?;
    let edges_v = field(&v, "matching")?
        .as_array()
        .ok_or("matching: expected an array of [i, j] pairs")?;
    let mut edges = Vec::with_capacity(edges_v.len());
    for e in edges_v {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or("matching: edges are [i, j] pairs")?;
        let i = pair[0].as_u64().ok_or("matching: non-integer index")? as usize;
        let j = pair[1].as_u64().ok_or("matching: non-integer index")? as usize;
        edges.push((i, j));
    }
    let matching = Matching::new(edges, y.len()).map_err(|e| e.to_string())?;
    P2Input::new(matching, bits_from(field(&v, "edge_bits")?, "edge_bits")?, y)
        .map_err(|e| e.to_string())
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(s: &str, name: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("{name}: cannot parse '{t}' as a number"))
        })
        .collect()
}
