//! Distributions with finitely many atoms plus piecewise-linear CDF
//! segments, total mass exactly 1. This class is closed under reflection
//! and under pushforward through monotone piecewise-affine maps, and every
//! CDF evaluation is an exact rational.

use std::fmt;

use thiserror::Error;

use crate::numeric::{ExtendedReal, Rational};

/// A point x carrying positive probability mass P(X = x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub location: Rational,
    pub mass: Rational,
}

/// A uniform-density block: the CDF rises linearly by `mass` across
/// [left, right). Segments carry total mass, not density; the density
/// mass/(right-left) is derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub left: Rational,
    pub right: Rational,
    pub mass: Rational,
}

impl Segment {
    pub fn density(&self) -> Rational {
        &self.mass / &(&self.right - &self.left)
    }

    pub fn width(&self) -> Rational {
        &self.right - &self.left
    }
}

/// F(x) = P(X <= x) together with its strict companion F°(x) = P(X < x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluatedCdf {
    /// F°(x) = P(X < x)
    pub strict: Rational,
    /// F(x) = P(X <= x)
    pub weak: Rational,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Distribution {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("invalid distribution: {0}")]
    Invalid(String),
    #[error("empty sample")]
    EmptySample,
}

impl Distribution {
    /// Builds a canonical distribution, returning the violation list if
    /// the canonicalized components do not form a valid distribution.
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self, Vec<String>> {
        let d = Self::canonicalize(atoms, segments);
        let violations = d.validate();
        if violations.is_empty() {
            Ok(d)
        } else {
            Err(violations)
        }
    }

    /// Sorts, merges colliding atoms, drops zero-mass components, and
    /// merges adjacent segments of equal density. Does not check mass.
    fn canonicalize(mut atoms: Vec<Atom>, mut segments: Vec<Segment>) -> Self {
        atoms.retain(|a| !a.mass.is_zero());
        atoms.sort_by(|a, b| a.location.cmp(&b.location));
        let mut merged_atoms: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged_atoms.last_mut() {
                Some(last) if last.location == atom.location => {
                    last.mass = &last.mass + &atom.mass;
                }
                _ => merged_atoms.push(atom),
            }
        }

        segments.retain(|s| !s.mass.is_zero());
        segments.sort_by(|a, b| a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right)));
        let mut merged_segments: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            match merged_segments.last_mut() {
                Some(last)
                    if last.right == seg.left
                        && seg.left < seg.right
                        && last.left < last.right
                        && last.density() == seg.density() =>
                {
                    last.mass = &last.mass + &seg.mass;
                    last.right = seg.right;
                }
                _ => merged_segments.push(seg),
            }
        }

        Distribution {
            atoms: merged_atoms,
            segments: merged_segments,
        }
    }

    /// One entry per invariant violation; empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut total = Rational::zero();
        for atom in &self.atoms {
            if !atom.mass.is_positive() {
                violations.push(format!("atom at {} has non-positive mass {}", atom.location, atom.mass));
            }
            total = &total + &atom.mass;
        }
        for pair in self.atoms.windows(2) {
            if pair[0].location >= pair[1].location {
                violations.push(format!(
                    "atom locations not strictly increasing at {}",
                    pair[1].location
                ));
            }
        }
        for seg in &self.segments {
            if seg.left >= seg.right {
                violations.push(format!("segment [{}, {}) has non-positive width", seg.left, seg.right));
            }
            if !seg.mass.is_positive() {
                violations.push(format!(
                    "segment [{}, {}) has non-positive mass {}",
                    seg.left, seg.right, seg.mass
                ));
            }
            total = &total + &seg.mass;
        }
        for pair in self.segments.windows(2) {
            if pair[1].left < pair[0].right {
                violations.push(format!(
                    "overlapping segments: [{}, {}) and [{}, {})",
                    pair[0].left, pair[0].right, pair[1].left, pair[1].right
                ));
            }
        }
        if total != Rational::one() {
            violations.push(format!("total mass {total} ≠ 1"));
        }
        violations
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Evaluates F°(x) and F(x) exactly.
    pub fn cdf(&self, x: &Rational) -> EvaluatedCdf {
        let mut strict = Rational::zero();
        let mut atom_here = Rational::zero();
        for atom in &self.atoms {
            if atom.location < *x {
                strict = &strict + &atom.mass;
            } else if atom.location == *x {
                atom_here = atom.mass.clone();
            }
        }
        for seg in &self.segments {
            if seg.right <= *x {
                strict = &strict + &seg.mass;
            } else if seg.left < *x {
                // partial coverage; segments carry no point mass, so the
                // strict and weak values agree on them
                strict = &strict + &(&seg.mass * &(&(x - &seg.left) / &seg.width()));
            }
        }
        let weak = &strict + &atom_here;
        EvaluatedCdf { strict, weak }
    }

    /// Exact P(a < X < b); zero whenever a >= b.
    pub fn mass_open(&self, a: &ExtendedReal, b: &ExtendedReal) -> Rational {
        if a >= b {
            return Rational::zero();
        }
        let below_b = match b {
            ExtendedReal::PosInfinity => Rational::one(),
            ExtendedReal::NegInfinity => unreachable!("a < b rules out b = -inf"),
            ExtendedReal::Finite(q) => self.cdf(q).strict,
        };
        let through_a = match a {
            ExtendedReal::NegInfinity => Rational::zero(),
            ExtendedReal::PosInfinity => unreachable!("a < b rules out a = +inf"),
            ExtendedReal::Finite(q) => self.cdf(q).weak,
        };
        &below_b - &through_a
    }

    /// The law of -X.
    pub fn reflect(&self) -> Distribution {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: -&a.location,
                mass: a.mass.clone(),
            })
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                left: -&s.right,
                right: -&s.left,
                mass: s.mass.clone(),
            })
            .collect();
        Self::canonicalize(atoms, segments)
    }

    /// (min of support, max of support) = (rq(0), lq(1)); always finite
    /// for this representation class.
    pub fn support_bounds(&self) -> (ExtendedReal, ExtendedReal) {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let mut consider = |low: &Rational, high: &Rational| {
            lo = Some(match lo.take() {
                Some(v) => v.min(low.clone()),
                None => low.clone(),
            });
            hi = Some(match hi.take() {
                Some(v) => v.max(high.clone()),
                None => high.clone(),
            });
        };
        for atom in &self.atoms {
            consider(&atom.location, &atom.location);
        }
        for seg in &self.segments {
            consider(&seg.left, &seg.right);
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => (ExtendedReal::Finite(lo), ExtendedReal::Finite(hi)),
            _ => (ExtendedReal::NegInfinity, ExtendedReal::PosInfinity),
        }
    }

    /// Uniform empirical law: an atom at every distinct value with mass
    /// multiplicity/n.
    pub fn from_empirical(values: &[Rational]) -> Result<Distribution, DistributionError> {
        if values.is_empty() {
            return Err(DistributionError::EmptySample);
        }
        let n = Rational::from_integer(values.len() as i64);
        let unit = &Rational::one() / &n;
        let atoms = values
            .iter()
            .map(|v| Atom {
                location: v.clone(),
                mass: unit.clone(),
            })
            .collect();
        Distribution::new(atoms, Vec::new())
            .map_err(|v| DistributionError::Invalid(v.join("; ")))
    }

    /// Uniform distribution on [a, b].
    pub fn uniform(a: Rational, b: Rational) -> Result<Distribution, Vec<String>> {
        Distribution::new(
            Vec::new(),
            vec![Segment {
                left: a,
                right: b,
                mass: Rational::one(),
            }],
        )
    }

    /// Point mass at x.
    pub fn point(x: Rational) -> Distribution {
        Distribution {
            atoms: vec![Atom {
                location: x,
                mass: Rational::one(),
            }],
            segments: Vec::new(),
        }
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Distribution {{ atoms: [")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", a.location, a.mass)?;
        }
        write!(f, "], segments: [")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{},{}):{}", s.left, s.right, s.mass)?;
        }
        write!(f, "] }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rational {
        Rational::parse(s).unwrap()
    }

    fn fin(s: &str) -> ExtendedReal {
        ExtendedReal::Finite(rat(s))
    }

    pub(crate) fn uniform01() -> Distribution {
        Distribution::uniform(rat("0"), rat("1")).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(Distribution::point(rat("3")).validate().is_empty());

        let short = Distribution {
            atoms: vec![Atom {
                location: rat("3"),
                mass: rat("1/2"),
            }],
            segments: vec![],
        };
        assert_eq!(short.validate(), vec!["total mass 1/2 ≠ 1".to_string()]);

        let overlapping = Distribution {
            atoms: vec![],
            segments: vec![
                Segment {
                    left: rat("0"),
                    right: rat("1"),
                    mass: rat("1/2"),
                },
                Segment {
                    left: rat("1/2"),
                    right: rat("2"),
                    mass: rat("1/2"),
                },
            ],
        };
        assert!(overlapping
            .validate()
            .iter()
            .any(|v| v.contains("overlapping segments")));
    }

    #[test]
    fn cdf_uniform_and_point() {
        let u = uniform01();
        let e = u.cdf(&rat("1/2"));
        assert_eq!(e.strict, rat("1/2"));
        assert_eq!(e.weak, rat("1/2"));

        let p = Distribution::point(rat("3"));
        let e = p.cdf(&rat("3"));
        assert_eq!(e.strict, rat("0"));
        assert_eq!(e.weak, rat("1"));
    }

    #[test]
    fn mass_open_examples() {
        let u = uniform01();
        assert_eq!(u.mass_open(&fin("1/4"), &fin("3/4")), rat("1/2"));
        assert_eq!(u.mass_open(&fin("5"), &fin("5")), rat("0"));
        assert_eq!(u.mass_open(&fin("3/4"), &fin("1/4")), rat("0"));
        assert_eq!(
            u.mass_open(&ExtendedReal::NegInfinity, &ExtendedReal::PosInfinity),
            rat("1")
        );
        assert_eq!(u.mass_open(&ExtendedReal::NegInfinity, &fin("1/2")), rat("1/2"));
    }

    #[test]
    fn reflect_examples() {
        let p = Distribution::point(rat("3")).reflect();
        assert_eq!(p.atoms()[0].location, rat("-3"));

        let u = uniform01().reflect();
        assert_eq!(u.segments()[0].left, rat("-1"));
        assert_eq!(u.segments()[0].right, rat("0"));

        let two = Distribution::from_empirical(&[rat("1"), rat("2")]).unwrap();
        let r = two.reflect();
        assert_eq!(r.atoms()[0].location, rat("-2"));
        assert_eq!(r.atoms()[1].location, rat("-1"));

        assert_eq!(uniform01().reflect().reflect(), uniform01());
    }

    #[test]
    fn support_bounds_examples() {
        assert_eq!(uniform01().support_bounds(), (fin("0"), fin("1")));
        assert_eq!(
            Distribution::point(rat("3")).support_bounds(),
            (fin("3"), fin("3"))
        );
    }

    #[test]
    fn from_empirical_examples() {
        let d = Distribution::from_empirical(&[rat("1"), rat("2"), rat("2")]).unwrap();
        assert_eq!(d.atoms().len(), 2);
        assert_eq!(d.atoms()[0].mass, rat("1/3"));
        assert_eq!(d.atoms()[1].mass, rat("2/3"));

        let single = Distribution::from_empirical(&[rat("5")]).unwrap();
        assert_eq!(single.atoms()[0].mass, rat("1"));

        assert!(Distribution::from_empirical(&[]).is_err());
    }

    #[test]
    fn canonicalize_merges_equal_density_segments() {
        let d = Distribution::new(
            vec![],
            vec![
                Segment {
                    left: rat("0"),
                    right: rat("1/2"),
                    mass: rat("1/2"),
                },
                Segment {
                    left: rat("1/2"),
                    right: rat("1"),
                    mass: rat("1/2"),
                },
            ],
        )
        .unwrap();
        assert_eq!(d.segments().len(), 1);
        assert_eq!(d, uniform01());
    }

    #[test]
    fn atom_inside_segment_contributes_jump() {
        // half uniform on [0,1], half an atom at 1/2
        let d = Distribution::new(
            vec![Atom {
                location: rat("1/2"),
                mass: rat("1/2"),
            }],
            vec![Segment {
                left: rat("0"),
                right: rat("1"),
                mass: rat("1/2"),
            }],
        )
        .unwrap();
        let e = d.cdf(&rat("1/2"));
        assert_eq!(e.strict, rat("1/4"));
        assert_eq!(e.weak, rat("3/4"));
    }
}
