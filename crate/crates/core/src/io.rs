//! Tensor file format: one tensor per file as structured text (JSON) with
//! `row_dims`, `col_dims`, `domain` ("rational" | "float64") and `entries`
//! as either a dense row-major value list or a sparse list of
//! {idx, value} records with 1-based full multi-indices. Unlisted sparse
//! entries are zero.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Domain, Rational, Scalar, ScalarError};
use crate::tensor::{Shape, Tensor, TensorError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("unknown domain {0:?} (expected \"rational\" or \"float64\")")]
    UnknownDomain(String),
    #[error("sparse index {0:?} out of range")]
    SparseIndex(Vec<usize>),
    #[error("cannot convert non-finite float {0} to a rational")]
    NonFinite(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct SparseEntry {
    idx: Vec<usize>,
    value: ValueRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entries {
    Dense(Vec<ValueRepr>),
    Sparse(Vec<SparseEntry>),
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    domain: String,
    entries: Entries,
}

/// A tensor in whichever scalar domain its file declared.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Rational(Tensor<Rational>),
    Float64(Tensor<f64>),
}

impl AnyTensor {
    pub fn domain(&self) -> Domain {
        match self {
            AnyTensor::Rational(_) => Domain::Rational,
            AnyTensor::Float64(_) => Domain::Float64,
        }
    }

    pub fn shape(&self) -> &Shape {
        match self {
            AnyTensor::Rational(t) => t.shape(),
            AnyTensor::Float64(t) => t.shape(),
        }
    }

    /// Exact conversion into the rational domain (every finite float is a
    /// dyadic rational).
    pub fn into_rational(self) -> Result<Tensor<Rational>, IoError> {
        match self {
            AnyTensor::Rational(t) => Ok(t),
            AnyTensor::Float64(t) => {
                let shape = t.shape().clone();
                let entries: Result<Vec<_>, IoError> = t
                    .entries()
                    .iter()
                    .map(|&v| {
                        if !v.is_finite() {
                            return Err(IoError::NonFinite(v));
                        }
                        Ok(Rational::from_f64_exact(v)?)
                    })
                    .collect();
                Ok(Tensor::new(shape, entries?)?)
            }
        }
    }

    /// Nearest-float conversion into the float64 domain.
    pub fn into_float64(self) -> Tensor<f64> {
        match self {
            AnyTensor::Rational(t) => t.to_float64(),
            AnyTensor::Float64(t) => t,
        }
    }
}

fn parse_value<T: Scalar>(v: &ValueRepr) -> Result<T, IoError> {
    match v {
        ValueRepr::Text(s) => Ok(T::parse(s)?),
        ValueRepr::Num(n) => match T::DOMAIN {
            Domain::Float64 => Ok(T::parse(&format!("{n}"))?),
            // exact conversion keeps integer-valued JSON numbers exact
            Domain::Rational => {
                if !n.is_finite() {
                    return Err(IoError::NonFinite(*n));
                }
                let r = Rational::from_f64_exact(*n)?;
                Ok(T::parse(&r.render())?)
            }
        },
    }
}

fn decode_tensor<T: Scalar>(file: &TensorFile) -> Result<Tensor<T>, IoError> {
    let shape = Shape::new(file.row_dims.clone(), file.col_dims.clone())?;
    match &file.entries {
        Entries::Dense(values) if !values.is_empty() => {
            let entries: Result<Vec<T>, IoError> = values.iter().map(parse_value).collect();
            Ok(Tensor::new(shape, entries?)?)
        }
        Entries::Dense(_) => Ok(Tensor::zero(shape)),
        Entries::Sparse(list) => {
            let mut entries = vec![T::zero(); shape.len()];
            for item in list {
                let flat = shape
                    .flat_index(&item.idx)
                    .ok_or_else(|| IoError::SparseIndex(item.idx.clone()))?;
                entries[flat] = parse_value(&item.value)?;
            }
            Ok(Tensor::new(shape, entries)?)
        }
    }
}

fn parse_file(path: &Path, text: &str) -> Result<AnyTensor, IoError> {
    let file: TensorFile = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    match file.domain.as_str() {
        "rational" => Ok(AnyTensor::Rational(decode_tensor(&file)?)),
        "float64" => Ok(AnyTensor::Float64(decode_tensor(&file)?)),
        other => Err(IoError::UnknownDomain(other.to_string())),
    }
}

pub fn read_tensor(path: &Path) -> Result<AnyTensor, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    parse_file(path, &text)
}

fn encode_value<T: Scalar>(v: &T) -> ValueRepr {
    match T::DOMAIN {
        Domain::Rational => ValueRepr::Text(v.render()),
        Domain::Float64 => {
            let f = v.to_f64();
            if f.is_finite() {
                ValueRepr::Num(f)
            } else {
                ValueRepr::Text(v.render())
            }
        }
    }
}

fn encode_tensor<T: Scalar>(t: &Tensor<T>) -> TensorFile {
    TensorFile {
        row_dims: t.shape().row_dims().to_vec(),
        col_dims: t.shape().col_dims().to_vec(),
        domain: T::DOMAIN.name().to_string(),
        entries: Entries::Dense(t.entries().iter().map(encode_value).collect()),
    }
}

pub fn render_tensor(tensor: &AnyTensor) -> String {
    let file = match tensor {
        AnyTensor::Rational(t) => encode_tensor(t),
        AnyTensor::Float64(t) => encode_tensor(t),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("static schema");
    text.push('\n');
    text
}

pub fn write_tensor(path: &Path, tensor: &AnyTensor) -> Result<(), IoError> {
    fs::write(path, render_tensor(tensor)).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Parse a tensor from in-memory JSON text (same schema as the files).
pub fn parse_tensor(text: &str) -> Result<AnyTensor, IoError> {
    parse_file(Path::new("<inline>"), text)
}
