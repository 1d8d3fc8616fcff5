//! JSON encodings of vectors and matrices.
//!
//! Real entries are plain numbers; complex entries are `[re, im]` pairs. A
//! vector or matrix is written with plain numbers whenever every imaginary
//! part is zero. Matrices are `{"rows", "cols", "field", "data"}` documents
//! with row-major data. Floats use the shortest representation that parses back to
//! the same bits.

use crate::error::{Error, Result};
use crate::spaces::{Field, Matrix, Vector, C64};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for C64 {
    fn from(e: Entry) -> C64 {
        match e {
            Entry::Real(r) => C64::new(r, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn entries(values: impl Iterator<Item = C64> + Clone) -> Vec<Entry> {
    let real = values.clone().all(|z| z.im == 0.0);
    values
        .map(|z| if real { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) })
        .collect()
}

pub mod cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
        entries(v.iter().copied()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vector, D::Error> {
        let e: Vec<Entry> = Vec::deserialize(d)?;
        Ok(Vector::from_iterator(e.len(), e.into_iter().map(C64::from)))
    }
}

/// Matrix document: `{"rows", "cols", "field", "data"}` with row-major data.
#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Entry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Doc(MatrixDoc),
    Rows(Vec<Vec<Entry>>),
}

fn to_doc(m: &Matrix) -> MatrixDoc {
    let real = m.iter().all(|z| z.im == 0.0);
    let data = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let z = m[(i, j)];
            if real {
                Entry::Real(z.re)
            } else {
                Entry::Complex([z.re, z.im])
            }
        })
        .collect();
    let field = if real { Field::Real } else { Field::Complex };
    MatrixDoc { rows: m.nrows(), cols: m.ncols(), field, data }
}

fn from_repr(repr: MatrixRepr) -> Result<Matrix> {
    match repr {
        MatrixRepr::Rows(rows) => rows_to_matrix(rows),
        MatrixRepr::Doc(doc) => {
            if doc.rows == 0 || doc.cols == 0 {
                return Err(Error::Input("empty matrix".into()));
            }
            if doc.data.len() != doc.rows * doc.cols {
                return Err(Error::Input(format!(
                    "expected {} entries for a {}x{} matrix, got {}",
                    doc.rows * doc.cols,
                    doc.rows,
                    doc.cols,
                    doc.data.len()
                )));
            }
            let data: Vec<C64> = doc.data.into_iter().map(C64::from).collect();
            if doc.field.is_real() && data.iter().any(|z| z.im != 0.0) {
                return Err(Error::Input("complex entry in a matrix declared real".into()));
            }
            Ok(Matrix::from_row_slice(doc.rows, doc.cols, &data))
        }
    }
}

pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_doc(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        from_repr(MatrixRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn rows_to_matrix(rows: Vec<Vec<Entry>>) -> Result<Matrix> {
    let r = rows.len();
    let c = rows.first().map(|row| row.len()).unwrap_or(0);
    if r == 0 || c == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Input("ragged matrix rows".into()));
    }
    let data: Vec<C64> = rows.into_iter().flatten().map(C64::from).collect();
    Ok(Matrix::from_row_slice(r, c, &data))
}

/// Parses Matrix JSON, either the `{"rows", "cols", "field", "data"}` document
/// or a bare array of rows. Entries are numbers or `[re, im]` pairs.
pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    // Syntax errors keep their position; shape errors are reported afterwards.
    let value: serde_json::Value = serde_json::from_str(text)?;
    let repr: MatrixRepr = serde_json::from_value(value)
        .map_err(|_| Error::Input("expected a matrix document or an array of rows".into()))?;
    from_repr(repr)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string(&to_doc(m)).expect("in-memory serialisation")
}

pub fn vector_from_json(text: &str) -> Result<Vector> {
    let e: Vec<Entry> = serde_json::from_str(text)?;
    Ok(Vector::from_iterator(e.len(), e.into_iter().map(C64::from)))
}

pub fn vector_to_json(v: &Vector) -> String {
    serde_json::to_string(&entries(v.iter().copied())).expect("in-memory serialisation")
}
