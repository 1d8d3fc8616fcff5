//! The space mini-language.
//!
//! ```text
//! space := pnorm | poly | sum
//! pnorm := ["c"] "l" (number | "inf") ":" integer      l2:3, cl2:2, linf:4, l1.5:2
//! poly  := "poly:" (path | json-object)
//! sum   := "sum:" ("l1" | "linf") "(" space ("," space)+ ")"
//! ```
//!
//! Sums with more than two summands nest to the left.

use super::{Field, NormKind, NormedSpace, Polytope, SumKind};
use crate::error::{Error, Result};
use serde::Deserialize;
use std::fmt;

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyFile {
    Full { vertices: Vec<Vec<f64>>, facets: Vec<Vec<f64>> },
    Polygon { half_vertices: Vec<[f64; 2]> },
}

pub fn parse_space(input: &str) -> Result<NormedSpace> {
    let mut p = Parser { s: input, pos: 0 };
    let space = p.space()?;
    if p.pos != input.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(space)
}

/// Parses the polyhedral JSON formats accepted after `poly:`.
pub fn polyhedral_from_json(text: &str) -> Result<NormedSpace> {
    match serde_json::from_str::<PolyFile>(text)? {
        PolyFile::Full { vertices, facets } => NormedSpace::polyhedral(vertices, facets),
        PolyFile::Polygon { half_vertices } => NormedSpace::symmetric_polygon(&half_vertices),
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { position: self.pos, message: message.to_string() }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{token}'")))
        }
    }

    fn space(&mut self) -> Result<NormedSpace> {
        if self.eat("sum:") {
            self.sum()
        } else if self.eat("poly:") {
            self.poly()
        } else {
            self.pnorm()
        }
    }

    fn sum(&mut self) -> Result<NormedSpace> {
        let kind = if self.eat("linf") {
            SumKind::Linf
        } else if self.eat("l1") {
            SumKind::L1
        } else {
            return Err(self.error("expected sum kind 'l1' or 'linf'"));
        };
        self.expect("(")?;
        let mut parts = vec![self.space()?];
        while self.eat(",") {
            parts.push(self.space()?);
        }
        if parts.len() < 2 {
            return Err(self.error("a sum needs at least two summands"));
        }
        let at = self.pos;
        self.expect(")")?;
        NormedSpace::sum_many(kind, parts).map_err(|e| Error::Parse { position: at, message: e.to_string() })
    }

    fn poly(&mut self) -> Result<NormedSpace> {
        let start = self.pos;
        let text = if self.rest().starts_with('{') {
            let mut depth = 0usize;
            let mut end = None;
            for (i, ch) in self.rest().char_indices() {
                match ch {
                    '{' => depth += 1,
                    '}' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(i + 1);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let end = end.ok_or_else(|| self.error("unbalanced braces in inline polytope"))?;
            let t = self.rest()[..end].to_string();
            self.pos += end;
            t
        } else {
            let len = self.rest().find([',', ')']).unwrap_or(self.rest().len());
            if len == 0 {
                return Err(self.error("expected a polytope path"));
            }
            let path = &self.rest()[..len];
            let t = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse { position: start, message: format!("cannot read '{path}': {e}") })?;
            self.pos += len;
            t
        };
        polyhedral_from_json(&text).map_err(|e| Error::Parse { position: start, message: e.to_string() })
    }

    fn pnorm(&mut self) -> Result<NormedSpace> {
        let field = if self.eat("c") { Field::Complex } else { Field::Real };
        self.expect("l")?;
        let at = self.pos;
        let len = self.rest().find(':').ok_or_else(|| self.error("expected ':' after the exponent"))?;
        let token = &self.rest()[..len];
        let p = if token == "inf" {
            f64::INFINITY
        } else {
            token
                .parse::<f64>()
                .ok()
                .filter(|p| p.is_finite() && *p >= 1.0)
                .ok_or_else(|| self.error(&format!("invalid exponent '{token}'")))?
        };
        self.pos += len + 1;
        let at_dim = self.pos;
        let len = self.rest().find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest().len());
        let n: usize = self.rest()[..len]
            .parse()
            .map_err(|_| self.error("expected a dimension"))?;
        self.pos += len;
        if n == 0 {
            return Err(Error::Parse { position: at_dim, message: "dimension must be positive".into() });
        }
        NormedSpace::lp(n, p, field).map_err(|e| Error::Parse { position: at, message: e.to_string() })
    }
}

fn write_sum_parts(s: &NormedSpace, kind: SumKind, out: &mut Vec<String>) {
    match s.kind() {
        NormKind::Sum(inner) if inner.kind == kind => {
            write_sum_parts(&inner.left, kind, out);
            out.push(inner.right.to_string());
        }
        _ => out.push(s.to_string()),
    }
}

impl fmt::Display for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            NormKind::PNorm(p) => {
                let c = if self.field().is_real() { "" } else { "c" };
                if p.is_infinite() {
                    write!(f, "{c}linf:{}", self.dim())
                } else {
                    write!(f, "{c}l{p}:{}", self.dim())
                }
            }
            NormKind::Polyhedral(poly) => {
                let json = serde_json::to_string(&Polytope { vertices: poly.vertices.clone(), facets: poly.facets.clone() })
                    .map_err(|_| fmt::Error)?;
                write!(f, "poly:{json}")
            }
            NormKind::Sum(s) => {
                let mut parts = Vec::new();
                write_sum_parts(self, s.kind, &mut parts);
                let k = match s.kind {
                    SumKind::L1 => "l1",
                    SumKind::Linf => "linf",
                };
                write!(f, "sum:{k}({})", parts.join(","))
            }
        }
    }
}
