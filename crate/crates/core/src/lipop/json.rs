//! `{"space": "<spec>", "cells": [{"C", "d", "A", "b"}], "box_radius": R}`.

use super::{Cell, PwlOperator};
use crate::error::{Error, Result};
use crate::spaces::parse_space;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct CellDoc {
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    d: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PwlDoc {
    space: String,
    cells: Vec<CellDoc>,
    box_radius: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<DMatrix<f64>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::Input(format!("{what}: row of length {} where {cols} was expected", bad.len())));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl PwlOperator {
    pub fn to_json(&self) -> String {
        let doc = PwlDoc {
            space: self.space.to_string(),
            cells: self
                .cells
                .iter()
                .map(|c| CellDoc {
                    c: rows(&c.c),
                    d: c.d.iter().copied().collect(),
                    a: rows(&c.a),
                    b: c.b.iter().copied().collect(),
                })
                .collect(),
            box_radius: self.box_radius,
        };
        serde_json::to_string(&doc).expect("finite floats serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PwlDoc = serde_json::from_str(text)?;
        let space = parse_space(&doc.space)?;
        let n = space.dim();
        let cells = doc
            .cells
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Ok(Cell {
                    c: matrix(&c.c, n, &format!("cell {k} C"))?,
                    d: DVector::from_vec(c.d.clone()),
                    a: matrix(&c.a, n, &format!("cell {k} A"))?,
                    b: DVector::from_vec(c.b.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PwlOperator::new(space, cells, doc.box_radius)
    }
}
