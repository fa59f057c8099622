//! JSON file formats for complexes, orders, tie-vector lists and the
//! 26-atom construction artifact.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::example26::{Construction, VerificationReport};
use crate::order::QPOrder;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::subset::Subset;
use crate::ternary::TernaryVector;

/// `{"n": 7, "generators": [[1,5,7], [2,3,4,6]]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub n: usize,
    pub generators: Vec<Vec<u64>>,
}

impl ComplexFile {
    /// Describes `complex` by its maximal faces.
    pub fn from_complex(complex: &SimplicialComplex) -> ComplexFile {
        ComplexFile {
            n: complex.n(),
            generators: complex.maximal_faces().iter().map(atoms_of).collect(),
        }
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_generators(self.n, &subsets(self.n, &self.generators)?)
    }
}

/// Either `{"n": 5, "weights": ["7", "10", ...]}` or
/// `{"n": 2, "classes": [[[]], [[1]], [[2]], [[1,2]]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<Vec<Vec<u64>>>>,
}

impl OrderFile {
    pub fn from_weights(weights: &[Rational]) -> OrderFile {
        OrderFile { n: weights.len(), weights: Some(weights.iter().map(format_rational).collect()), classes: None }
    }

    pub fn from_order(order: &QPOrder) -> OrderFile {
        OrderFile {
            n: order.n(),
            weights: None,
            classes: Some(order.classes().iter().map(|c| c.iter().map(atoms_of).collect()).collect()),
        }
    }

    /// The weights, when the file gives them.
    pub fn weights(&self) -> Result<Option<Vec<Rational>>> {
        let Some(ws) = &self.weights else { return Ok(None) };
        if ws.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: ws.len() });
        }
        ws.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>>>().map(Some)
    }

    pub fn to_order(&self) -> Result<QPOrder> {
        match (&self.weights, &self.classes) {
            (Some(_), None) => QPOrder::from_weights(&self.weights()?.expect("weights present")),
            (None, Some(classes)) => QPOrder::from_classes(
                self.n,
                classes.iter().map(|c| subsets(self.n, c)).collect::<Result<Vec<_>>>()?,
            ),
            _ => Err(Error::Format("an order file needs exactly one of \"weights\" and \"classes\"".into())),
        }
    }
}

/// `{"vectors": [[0,1,-1,0,-1], ...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorsFile {
    pub vectors: Vec<Vec<i8>>,
}

impl VectorsFile {
    pub fn from_vectors(vectors: &[TernaryVector]) -> VectorsFile {
        VectorsFile { vectors: vectors.iter().map(TernaryVector::entries).collect() }
    }

    pub fn to_vectors(&self) -> Result<Vec<TernaryVector>> {
        self.vectors.iter().map(|v| TernaryVector::from_entries(v)).collect()
    }
}

/// The stored 26-atom construction together with its verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionFile {
    pub selector: u32,
    pub m: Vec<Vec<u8>>,
    pub m_prime: Vec<Vec<u8>>,
    pub weights: Vec<String>,
    #[serde(rename = "N")]
    pub n_weight: String,
    #[serde(rename = "K")]
    pub k_weight: String,
    /// `A′_1..A′_4, B′_1..B′_4` as atom lists.
    pub sets: Vec<Vec<u64>>,
    pub xprime: Vec<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
}

impl ConstructionFile {
    pub fn new(c: &Construction, report: Option<VerificationReport>) -> ConstructionFile {
        ConstructionFile {
            selector: c.selector,
            m: c.m.clone(),
            m_prime: c.m_prime.clone(),
            weights: c.weights.iter().map(format_rational).collect(),
            n_weight: format_rational(&c.n_weight),
            k_weight: format_rational(&c.k_weight),
            sets: c.sets().iter().map(atoms_of).collect(),
            xprime: c.xprime.iter().map(TernaryVector::entries).collect(),
            report,
        }
    }

    /// Rebuilds the construction exactly as stored; nothing is recomputed.
    /// The listed sets must match the rows of `M′`.
    pub fn to_construction(&self) -> Result<Construction> {
        let c = Construction {
            selector: self.selector,
            m: self.m.clone(),
            m_prime: self.m_prime.clone(),
            weights: self.weights.iter().map(|w| parse_rational(w)).collect::<Result<_>>()?,
            n_weight: parse_rational(&self.n_weight)?,
            k_weight: parse_rational(&self.k_weight)?,
            xprime: self.xprime.iter().map(|v| TernaryVector::from_entries(v)).collect::<Result<_>>()?,
        };
        if c.m_prime.len() != 8 || c.m_prime.iter().any(|r| r.len() != 26) {
            return Err(Error::Shape("M′ must be an 8×26 matrix".into()));
        }
        let listed: Vec<Vec<u64>> = c.sets().iter().map(atoms_of).collect();
        if listed != self.sets {
            return Err(Error::Format("listed sets disagree with the rows of M′".into()));
        }
        Ok(c)
    }
}

fn atoms_of(s: &Subset) -> Vec<u64> {
    s.atoms().map(|a| a as u64).collect()
}

fn subsets(n: usize, lists: &[Vec<u64>]) -> Result<Vec<Subset>> {
    lists.iter().map(|atoms| Subset::from_atoms(n, atoms.iter().copied())).collect()
}

/// Parses JSON, reporting the line and column of syntax errors.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}
