//! JSON ring file format.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cyclo::{format_rational, parse_rational, Cyclotomic};
use crate::fusion::{FusionError, FusionRing, ValidationReport};

#[derive(Clone, Debug, PartialEq)]
pub enum Dims {
    Auto,
    Exact(Vec<Cyclotomic>),
}

impl Serialize for Dims {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dims::Auto => s.serialize_str("auto"),
            Dims::Exact(v) => v.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Dims {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Token(String),
            List(Vec<Cyclotomic>),
        }
        match Repr::deserialize(d)? {
            Repr::Token(t) if t == "auto" => Ok(Dims::Auto),
            Repr::Token(t) => Err(serde::de::Error::custom(format!("dims must be a list or \"auto\", got {t:?}"))),
            Repr::List(v) => Ok(Dims::Exact(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingFile {
    pub name: String,
    pub labels: Vec<String>,
    /// `[λ, μ, ν, N_{λ,μ}^ν]`, zero entries omitted.
    pub fusion: Vec<[u32; 4]>,
    pub dual: Vec<usize>,
    pub twists: Vec<String>,
    pub dims: Dims,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_charge: Option<String>,
}

#[derive(Debug, Error)]
pub enum RingFileError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}[{index}]: {message}")]
    Field { field: &'static str, index: usize, message: String },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("ring fails validation:\n{}", .0.violations.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(ValidationReport),
}

impl RingFile {
    pub fn from_ring(ring: &FusionRing) -> Self {
        RingFile {
            name: ring.name().to_string(),
            labels: ring.names().to_vec(),
            fusion: ring.fusion_entries().into_iter().map(|(a, b, c, m)| [a as u32, b as u32, c as u32, m]).collect(),
            dual: ring.duals().to_vec(),
            twists: ring.twists().iter().map(format_rational).collect(),
            dims: match ring.dims() {
                Some(d) => Dims::Exact(d.to_vec()),
                None => Dims::Auto,
            },
            central_charge: ring.central_charge_hint().map(format_rational),
        }
    }

    pub fn parse(text: &str) -> Result<Self, RingFileError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
            RingFileError::Parse { line: e.line(), column: e.column(), message }
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ring file serializes");
        s.push('\n');
        s
    }

    /// Builds the ring without running the axiom checks.
    pub fn to_ring_unchecked(&self) -> Result<FusionRing, RingFileError> {
        let twists = self
            .twists
            .iter()
            .enumerate()
            .map(|(index, t)| parse_rational(t).map_err(|e| RingFileError::Field { field: "twists", index, message: e.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        let entries: Vec<(usize, usize, usize, u32)> =
            self.fusion.iter().map(|&[a, b, c, m]| (a as usize, b as usize, c as usize, m)).collect();
        let dims = match &self.dims {
            Dims::Auto => None,
            Dims::Exact(d) => Some(d.clone()),
        };
        let mut ring = FusionRing::new(self.name.clone(), self.labels.clone(), &entries, self.dual.clone(), twists, dims)?;
        if let Some(c) = &self.central_charge {
            let c = parse_rational(c).map_err(|e| RingFileError::Field { field: "central_charge", index: 0, message: e.to_string() })?;
            ring = ring.with_central_charge_hint(c);
        }
        Ok(ring)
    }

    /// Builds the ring and rejects it with the validation report if any
    /// axiom fails.
    pub fn to_ring(&self) -> Result<FusionRing, RingFileError> {
        let ring = self.to_ring_unchecked()?;
        let report = ring.validate();
        if report.is_valid() {
            Ok(ring)
        } else {
            Err(RingFileError::Invalid(report))
        }
    }
}

pub fn load_ring(text: &str) -> Result<FusionRing, RingFileError> {
    RingFile::parse(text)?.to_ring()
}
