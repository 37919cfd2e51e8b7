//! Text document formats for distributions and transformations. All
//! numbers travel as strings ("0.5", "1/2", "-3e-2") and parse exactly;
//! rendering picks the exact decimal form when one exists and the p/q
//! form otherwise, so documents round-trip bit-exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{Atom, Distribution, Segment};
use crate::numeric::Rational;
use crate::transform::{AffinePiece, Direction, PiecewiseAffineMap, TransformError};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("field {field}: {message}")]
    BadNumber { field: String, message: String },
    #[error("rejected: {}", .0.join("; "))]
    Rejected(Vec<String>),
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    x: String,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    left: String,
    right: String,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    atoms: Vec<AtomDoc>,
    segments: Vec<SegmentDoc>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    slope: String,
    intercept: String,
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    direction: String,
    breakpoints: Vec<String>,
    pieces: Vec<PieceDoc>,
    values: Vec<String>,
}

fn number(field: String, text: &str) -> Result<Rational, DocumentError> {
    Rational::parse(text).map_err(|e| DocumentError::BadNumber {
        field,
        message: e.to_string(),
    })
}

/// Exact textual form of a rational: plain decimal when terminating,
/// numerator/denominator otherwise. Both re-parse to the same value.
pub fn render_number(r: &Rational) -> String {
    let decimal = r.to_decimal_string();
    if decimal.starts_with('~') {
        r.to_string()
    } else {
        decimal
    }
}

pub fn parse_distribution(text: &str) -> Result<Distribution, DocumentError> {
    let doc: DistributionDoc = serde_json::from_str(text)?;
    let atoms = doc
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Ok(Atom {
                location: number(format!("atoms[{i}].x"), &a.x)?,
                mass: number(format!("atoms[{i}].mass"), &a.mass)?,
            })
        })
        .collect::<Result<Vec<_>, DocumentError>>()?;
    let segments = doc
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(Segment {
                left: number(format!("segments[{i}].left"), &s.left)?,
                right: number(format!("segments[{i}].right"), &s.right)?,
                mass: number(format!("segments[{i}].mass"), &s.mass)?,
            })
        })
        .collect::<Result<Vec<_>, DocumentError>>()?;
    Distribution::new(atoms, segments).map_err(DocumentError::Rejected)
}

pub fn render_distribution(d: &Distribution) -> String {
    let doc = DistributionDoc {
        atoms: d
            .atoms()
            .iter()
            .map(|a| AtomDoc {
                x: render_number(&a.location),
                mass: render_number(&a.mass),
            })
            .collect(),
        segments: d
            .segments()
            .iter()
            .map(|s| SegmentDoc {
                left: render_number(&s.left),
                right: render_number(&s.right),
                mass: render_number(&s.mass),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}

pub fn parse_map(text: &str) -> Result<PiecewiseAffineMap, DocumentError> {
    let doc: MapDoc = serde_json::from_str(text)?;
    let direction = match doc.direction.as_str() {
        "nondecreasing" => Direction::Nondecreasing,
        "nonincreasing" => Direction::Nonincreasing,
        other => {
            return Err(DocumentError::Rejected(vec![format!(
                "direction must be \"nondecreasing\" or \"nonincreasing\", got {other:?}"
            )]))
        }
    };
    let breakpoints = doc
        .breakpoints
        .iter()
        .enumerate()
        .map(|(i, b)| number(format!("breakpoints[{i}]"), b))
        .collect::<Result<Vec<_>, _>>()?;
    let pieces = doc
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(AffinePiece {
                slope: number(format!("pieces[{i}].slope"), &p.slope)?,
                intercept: number(format!("pieces[{i}].intercept"), &p.intercept)?,
            })
        })
        .collect::<Result<Vec<_>, DocumentError>>()?;
    let values = doc
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| number(format!("values[{i}]"), v))
        .collect::<Result<Vec<_>, _>>()?;
    PiecewiseAffineMap::new(direction, breakpoints, pieces, values).map_err(|e| match e {
        TransformError::Invalid(violations) => DocumentError::Rejected(violations),
        other => DocumentError::Rejected(vec![other.to_string()]),
    })
}

pub fn render_map(phi: &PiecewiseAffineMap) -> String {
    let doc = MapDoc {
        direction: match phi.direction() {
            Direction::Nondecreasing => "nondecreasing".to_string(),
            Direction::Nonincreasing => "nonincreasing".to_string(),
        },
        breakpoints: phi.breakpoints().iter().map(render_number).collect(),
        pieces: phi
            .pieces()
            .iter()
            .map(|p| PieceDoc {
                slope: render_number(&p.slope),
                intercept: render_number(&p.intercept),
            })
            .collect(),
        values: phi.breakpoint_values().iter().map(render_number).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}
