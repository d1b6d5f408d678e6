//! Text formats for cubature rules: a versioned JSON document, a CSV table
//! and whitespace-separated plot data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cubature::{CubatureRule, Gamma, OrbitIndex, WeightFamily, WeightSpec};
use crate::error::{Error, Result};
use crate::geometry::{DomainTag, Point2};
use crate::jacobi::JacobiParams;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "x,y,w,j,k,branch";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    /// Normalization constant of the weight, as used to scale the rule.
    pub normalization: f64,
}

impl Provenance {
    fn for_weight(weight: &WeightSpec) -> Self {
        Self {
            library: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            normalization: weight.normalization(),
        }
    }
}

/// Serialized form of a [`CubatureRule`]. Field order here is the field order
/// of the emitted JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDocument {
    pub schema_version: u32,
    pub family: WeightFamily,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    pub degree: usize,
    pub domain: String,
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// `[j, k, branch]` per node.
    pub orbit_index: Vec<[usize; 3]>,
    pub provenance: Provenance,
}

impl RuleDocument {
    pub fn from_rule(rule: &CubatureRule) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            family: rule.weight.family,
            alpha: rule.weight.params.alpha(),
            beta: rule.weight.params.beta(),
            gamma: rule.weight.gamma.value(),
            n: rule.n,
            degree: rule.degree,
            domain: rule.domain.name().to_string(),
            nodes: rule.nodes.iter().map(|p| [p.a, p.b]).collect(),
            weights: rule.weights.clone(),
            orbit_index: rule
                .orbit_index
                .iter()
                .map(|o| [o.j, o.k, o.branch as usize])
                .collect(),
            provenance: Provenance::for_weight(&rule.weight),
        }
    }

    /// Validates the document and rebuilds the rule it describes.
    pub fn to_rule(&self) -> Result<CubatureRule> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Input(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let params = JacobiParams::new(self.alpha, self.beta)?;
        let gamma = Gamma::from_value(self.gamma)?;
        let weight = WeightSpec::new(self.family, params, gamma)?;
        let domain: DomainTag = self.domain.parse()?;
        if domain != self.family.domain() {
            return Err(Error::Input(format!(
                "domain '{}' does not match weight family {:?}",
                self.domain, self.family
            )));
        }
        let m = self.nodes.len();
        if self.weights.len() != m || self.orbit_index.len() != m {
            return Err(Error::Input(format!(
                "length mismatch: {m} nodes, {} weights, {} orbit indices",
                self.weights.len(),
                self.orbit_index.len()
            )));
        }
        if let Some(i) = self
            .weights
            .iter()
            .position(|w| !(w.is_finite() && *w > 0.0))
        {
            return Err(Error::Input(format!("weight {i} is not positive")));
        }
        if let Some(i) = self
            .nodes
            .iter()
            .position(|p| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::NonFinite { index: i });
        }
        let mut orbit_index = Vec::with_capacity(m);
        for o in &self.orbit_index {
            let branch = u8::try_from(o[2])
                .ok()
                .filter(|b| *b <= 4)
                .ok_or_else(|| Error::Input(format!("branch {} out of range", o[2])))?;
            orbit_index.push(OrbitIndex {
                j: o[0],
                k: o[1],
                branch,
            });
        }
        Ok(CubatureRule {
            weight,
            n: self.n,
            degree: self.degree,
            domain,
            nodes: self.nodes.iter().map(|p| Point2::new(p[0], p[1])).collect(),
            weights: self.weights.clone(),
            orbit_index,
        })
    }
}

/// Pretty-printed JSON with shortest round-trip floats and a trailing newline.
pub fn export_json(rule: &CubatureRule) -> String {
    let mut s = serde_json::to_string_pretty(&RuleDocument::from_rule(rule))
        .expect("rule documents contain only finite numbers");
    s.push('\n');
    s
}

pub fn import_json(text: &str) -> Result<CubatureRule> {
    let doc: RuleDocument =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("bad rule document: {e}")))?;
    doc.to_rule()
}

/// One row per node, 17 significant digits.
pub fn export_csv(rule: &CubatureRule) -> String {
    let mut s = String::with_capacity(64 * (rule.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for ((p, w), o) in rule.nodes.iter().zip(&rule.weights).zip(&rule.orbit_index) {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{},{},{}",
            p.a, p.b, w, o.j, o.k, o.branch
        );
    }
    s
}

/// `x y` per line, nodes grouped by orbit `(j, k)`, blocks separated by a
/// blank line.
pub fn export_plotdata(rule: &CubatureRule) -> String {
    let mut s = String::new();
    let mut prev: Option<(usize, usize)> = None;
    for (p, o) in rule.nodes.iter().zip(&rule.orbit_index) {
        let key = (o.j, o.k);
        if prev.is_some_and(|q| q != key) {
            s.push('\n');
        }
        prev = Some(key);
        let _ = writeln!(s, "{} {}", p.a, p.b);
    }
    s
}

/// Reads the `x y` pairs back from plot data.
pub fn parse_plotdata(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<f64>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y)), None) => out.push((x, y)),
            _ => {
                return Err(Error::Input(format!(
                    "line {}: expected two numbers",
                    ln + 1
                )))
            }
        }
    }
    Ok(out)
}
