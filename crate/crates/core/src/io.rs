//! JSON file format for channels and generators.
//!
//! ```json
//! {"dimension": 2, "representation": "transfer", "basis": "pauli",
//!  "data": [[[1, 0], [0, 0], ...], ...]}
//! ```
//!
//! `representation` is one of `kraus`, `choi`, `transfer`, `generator`.
//! Complex entries are `[re, im]` pairs; a bare number is read as a real
//! entry. Kraus data is an array of `d×d` matrices. Kraus and Choi data
//! must use `matrix_units`.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channel::{choi_of, transfer_from_kraus, BasisTag, ChannelMatrix, ChoiMatrix, KrausSet, OperatorBasis};
use crate::error::{Error, Result};
use crate::lindblad::GeneratorMatrix;
use crate::linalg::CMat;
use crate::scalar::{cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Kraus,
    Choi,
    Transfer,
    Generator,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    dimension: usize,
    representation: Representation,
    #[serde(default = "default_basis")]
    basis: BasisTag,
    data: Value,
}

fn default_basis() -> BasisTag {
    BasisTag::MatrixUnits
}

/// Contents of a parsed file.
#[derive(Debug, Clone, PartialEq)]
pub enum MapFile<R: Real = f64> {
    Channel(ChannelMatrix<R>),
    Generator(GeneratorMatrix<R>),
}

fn parse_entry<R: Real>(v: &Value) -> Result<crate::scalar::Cx<R>> {
    let num = |v: &Value| -> Result<f64> {
        let x = v.as_f64().ok_or_else(|| Error::Parse(format!("expected a number, found {v}")))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(Error::Parse("non-finite entry".into()))
        }
    };
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(cx(R::lit(num(&pair[0])?), R::lit(num(&pair[1])?))),
        Value::Array(other) => Err(Error::Parse(format!("complex entry must be [re, im], found {} items", other.len()))),
        _ => Ok(cx(R::lit(num(v)?), R::zero())),
    }
}

fn parse_matrix<R: Real>(v: &Value, size: usize) -> Result<CMat<R>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    if rows.len() != size {
        return Err(Error::Parse(format!("expected {size} rows, found {}", rows.len())));
    }
    let mut m = Array2::zeros((size, size));
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?;
        if row.len() != size {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {size}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            m[[i, j]] = parse_entry(e)?;
        }
    }
    Ok(m)
}

/// Parses the JSON text of a channel or generator file.
pub fn parse_map<R: Real>(text: &str) -> Result<MapFile<R>> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let d = raw.dimension;
    if d == 0 || d > 64 {
        return Err(Error::Parse(format!("dimension {d} out of range")));
    }
    let basis = OperatorBasis::new(raw.basis, d)?;
    let n = d * d;
    match raw.representation {
        Representation::Transfer => Ok(MapFile::Channel(ChannelMatrix::new(parse_matrix(&raw.data, n)?, basis)?)),
        Representation::Generator => Ok(MapFile::Generator(GeneratorMatrix::new(parse_matrix(&raw.data, n)?, basis)?)),
        Representation::Choi => {
            require_units(raw.basis, "choi")?;
            Ok(MapFile::Channel(ChoiMatrix::new(parse_matrix(&raw.data, n)?)?.to_channel()))
        }
        Representation::Kraus => {
            require_units(raw.basis, "kraus")?;
            let ops = raw.data.as_array().ok_or_else(|| Error::Parse("kraus data must be an array of matrices".into()))?;
            let ops = ops.iter().map(|k| parse_matrix(k, d)).collect::<Result<Vec<_>>>()?;
            Ok(MapFile::Channel(transfer_from_kraus(&KrausSet::new(ops)?)))
        }
    }
}

fn require_units(basis: BasisTag, what: &str) -> Result<()> {
    if basis == BasisTag::MatrixUnits {
        Ok(())
    } else {
        Err(Error::UnsupportedBasis(format!("{what} data must use matrix_units")))
    }
}

/// Parses a channel; generator files are rejected.
pub fn parse_channel<R: Real>(text: &str) -> Result<ChannelMatrix<R>> {
    match parse_map(text)? {
        MapFile::Channel(c) => Ok(c),
        MapFile::Generator(_) => Err(Error::Parse("expected a channel, found a generator".into())),
    }
}

pub fn parse_generator<R: Real>(text: &str) -> Result<GeneratorMatrix<R>> {
    match parse_map(text)? {
        MapFile::Generator(g) => Ok(g),
        MapFile::Channel(_) => Err(Error::Parse("expected a generator".into())),
    }
}

pub fn read_channel<R: Real>(path: &Path) -> Result<ChannelMatrix<R>> {
    parse_channel(&std::fs::read_to_string(path)?)
}

pub fn read_generator<R: Real>(path: &Path) -> Result<GeneratorMatrix<R>> {
    parse_generator(&std::fs::read_to_string(path)?)
}

fn matrix_json<R: Real>(m: &CMat<R>) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.iter().map(|z| json!([z.re.as_f64(), z.im.as_f64()])).collect()))
            .collect(),
    )
}

fn document(d: usize, rep: Representation, basis: BasisTag, data: Value) -> Value {
    json!({"dimension": d, "representation": rep, "basis": basis, "data": data})
}

pub fn channel_to_json<R: Real>(t: &ChannelMatrix<R>) -> Value {
    document(t.dim(), Representation::Transfer, t.basis().tag, matrix_json(t.entries()))
}

pub fn generator_to_json<R: Real>(l: &GeneratorMatrix<R>) -> Value {
    document(l.dim(), Representation::Generator, l.basis().tag, matrix_json(l.entries()))
}

pub fn choi_to_json<R: Real>(t: &ChannelMatrix<R>) -> Value {
    document(t.dim(), Representation::Choi, BasisTag::MatrixUnits, matrix_json(choi_of(t).entries()))
}

/// Kraus form via the Choi eigendecomposition; fails when the map is not CP.
pub fn kraus_to_json<R: Real>(t: &ChannelMatrix<R>, tol: R) -> Result<Value> {
    let k = choi_of(t).kraus(tol)?;
    let data = Value::Array(k.ops().iter().map(matrix_json).collect());
    Ok(document(t.dim(), Representation::Kraus, BasisTag::MatrixUnits, data))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
