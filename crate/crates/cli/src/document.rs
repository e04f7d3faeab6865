//! JSON codebook documents. Coordinates are exact `"p/q"` strings.

use std::fmt::Write;

use anyhow::{bail, Context, Result};
use carpet_quant::optimal::{decompose_any, OptimalSet};
use carpet_quant::point::{format_rational, parse_rational};
use carpet_quant::{Codebook, Point};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Constructed,
    Lloyd,
    File,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub level: u32,
    pub m: u32,
    pub k: u64,
    /// Level-`ℓ` words receiving `m + 1` points; absent when unknown.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variants: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookDocument {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDoc>,
    /// Position in the enumeration of optimal sets, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
    pub points: Vec<[String; 2]>,
    pub provenance: Provenance,
}

impl CodebookDocument {
    pub fn from_codebook(codebook: &Codebook, provenance: Provenance) -> Self {
        let n = codebook.len();
        let decomposition = decompose_any(n as u64)
            .ok()
            .map(|d| DecompositionDoc { level: d.level, m: d.m, k: d.k, t: None, variants: None });
        CodebookDocument {
            n,
            decomposition,
            index: None,
            points: codebook
                .points()
                .iter()
                .map(|p| [format_rational(&p.x), format_rational(&p.y)])
                .collect(),
            provenance,
        }
    }

    pub fn from_optimal(set: &OptimalSet, index: Option<String>) -> Self {
        let d = &set.decomposition;
        let mut doc = Self::from_codebook(&set.codebook, Provenance::Constructed);
        doc.decomposition = Some(DecompositionDoc {
            level: d.level,
            m: d.m,
            k: d.k,
            t: Some(set.t.iter().map(|w| w.to_string()).collect()),
            variants: Some(set.variants.clone()),
        });
        doc.index = index;
        doc
    }

    pub fn codebook(&self) -> Result<Codebook> {
        if self.points.len() != self.n {
            bail!("document declares n = {} but lists {} points", self.n, self.points.len());
        }
        let points = self
            .points
            .iter()
            .map(|[x, y]| {
                Ok(Point::new(
                    parse_rational(x).with_context(|| format!("bad x coordinate {x:?}"))?,
                    parse_rational(y).with_context(|| format!("bad y coordinate {y:?}"))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Codebook::new(points)?)
    }
}

/// Accepts a single document or an array; returns the documents in order.
pub fn parse_documents(text: &str) -> Result<Vec<CodebookDocument>> {
    let value: serde_json::Value = serde_json::from_str(text).context("input is not valid JSON")?;
    let mut docs: Vec<CodebookDocument> = if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    };
    if docs.is_empty() {
        bail!("no codebook documents in input");
    }
    for d in &mut docs {
        d.codebook()?;
        d.provenance = Provenance::File;
    }
    Ok(docs)
}

pub const POINTS_CSV_HEADER: &str = "doc,point,x,y,x_approx,y_approx";

pub fn documents_csv(docs: &[CodebookDocument]) -> Result<String> {
    let mut out = String::from(POINTS_CSV_HEADER);
    out.push('\n');
    for (i, d) in docs.iter().enumerate() {
        for (j, p) in d.codebook()?.points().iter().enumerate() {
            let (fx, fy) = p.to_f64();
            writeln!(out, "{i},{j},{},{},{fx:.9},{fy:.9}", d.points[j][0], d.points[j][1])?;
        }
    }
    Ok(out)
}
