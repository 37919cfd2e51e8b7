//! Monotone piecewise-affine transformations with an explicitly chosen
//! value at every breakpoint, so one-sided continuity is data rather than
//! a convention. Provides the generalized inverses
//! sup{x : phi(x) <= y} and inf{x : phi(x) >= y} and the exact
//! pushforward of a distribution.

use thiserror::Error;

use crate::distribution::{Atom, Distribution, Segment};
use crate::numeric::{ExtendedReal, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Nondecreasing,
    Nonincreasing,
}

/// One affine piece: x -> slope * x + intercept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub slope: Rational,
    pub intercept: Rational,
}

impl AffinePiece {
    pub fn apply(&self, x: &Rational) -> Rational {
        &(&self.slope * x) + &self.intercept
    }
}

/// phi: R -> R, affine on each open interval between consecutive
/// breakpoints, with the designated value `breakpoint_values[i]` at
/// `breakpoints[i]`. Piece i applies on (b_{i-1}, b_i) with b_0 = -inf
/// and b_{k+1} = +inf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseAffineMap {
    direction: Direction,
    breakpoints: Vec<Rational>,
    pieces: Vec<AffinePiece>,
    breakpoint_values: Vec<Rational>,
}

/// Whether phi is continuous from each side, with the breakpoints at
/// which each side fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityReport {
    pub left_continuous: bool,
    pub right_continuous: bool,
    pub left_witnesses: Vec<Rational>,
    pub right_witnesses: Vec<Rational>,
}

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("invalid transformation: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("operation requires a nondecreasing map")]
    WrongDirection,
}

impl PiecewiseAffineMap {
    pub fn new(
        direction: Direction,
        breakpoints: Vec<Rational>,
        pieces: Vec<AffinePiece>,
        breakpoint_values: Vec<Rational>,
    ) -> Result<Self, TransformError> {
        let map = PiecewiseAffineMap {
            direction,
            breakpoints,
            pieces,
            breakpoint_values,
        };
        let violations = map.validate();
        if violations.is_empty() {
            Ok(map)
        } else {
            Err(TransformError::Invalid(violations))
        }
    }

    pub fn identity() -> Self {
        PiecewiseAffineMap {
            direction: Direction::Nondecreasing,
            breakpoints: vec![],
            pieces: vec![AffinePiece {
                slope: Rational::one(),
                intercept: Rational::zero(),
            }],
            breakpoint_values: vec![],
        }
    }

    pub fn constant(c: Rational) -> Self {
        PiecewiseAffineMap {
            direction: Direction::Nondecreasing,
            breakpoints: vec![],
            pieces: vec![AffinePiece {
                slope: Rational::zero(),
                intercept: c,
            }],
            breakpoint_values: vec![],
        }
    }

    pub fn affine(slope: Rational, intercept: Rational) -> Self {
        let direction = if slope.is_negative() {
            Direction::Nonincreasing
        } else {
            Direction::Nondecreasing
        };
        PiecewiseAffineMap {
            direction,
            breakpoints: vec![],
            pieces: vec![AffinePiece { slope, intercept }],
            breakpoint_values: vec![],
        }
    }

    /// The step map from the equivariance counterexample: x below 1/2,
    /// x + 5 from 1/2 on (right continuous, not left continuous).
    pub fn counterexample_step() -> Self {
        PiecewiseAffineMap::new(
            Direction::Nondecreasing,
            vec![Rational::new(1, 2)],
            vec![
                AffinePiece {
                    slope: Rational::one(),
                    intercept: Rational::zero(),
                },
                AffinePiece {
                    slope: Rational::one(),
                    intercept: Rational::from_integer(5),
                },
            ],
            vec![Rational::new(11, 2)],
        )
        .expect("the step map is valid")
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn breakpoint_values(&self) -> &[Rational] {
        &self.breakpoint_values
    }

    fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.pieces.len() != self.breakpoints.len() + 1 {
            violations.push(format!(
                "{} breakpoints require {} pieces, got {}",
                self.breakpoints.len(),
                self.breakpoints.len() + 1,
                self.pieces.len()
            ));
            return violations;
        }
        if self.breakpoint_values.len() != self.breakpoints.len() {
            violations.push(format!(
                "{} breakpoints require {} designated values, got {}",
                self.breakpoints.len(),
                self.breakpoints.len(),
                self.breakpoint_values.len()
            ));
            return violations;
        }
        for pair in self.breakpoints.windows(2) {
            if pair[0] >= pair[1] {
                violations.push(format!(
                    "breakpoints not strictly increasing at {}",
                    pair[1]
                ));
            }
        }
        let nondecreasing = self.direction == Direction::Nondecreasing;
        for (i, piece) in self.pieces.iter().enumerate() {
            let ok = if nondecreasing {
                !piece.slope.is_negative()
            } else {
                !piece.slope.is_positive()
            };
            if !ok {
                violations.push(format!(
                    "piece {} slope {} fights the {:?} direction",
                    i, piece.slope, self.direction
                ));
            }
        }
        for (i, b) in self.breakpoints.iter().enumerate() {
            let left_limit = self.pieces[i].apply(b);
            let right_limit = self.pieces[i + 1].apply(b);
            let v = &self.breakpoint_values[i];
            let ok = if nondecreasing {
                left_limit <= *v && *v <= right_limit
            } else {
                right_limit <= *v && *v <= left_limit
            };
            if !ok {
                violations.push(format!(
                    "value {} at breakpoint {} outside the one-sided limits [{}, {}]",
                    v, b, left_limit, right_limit
                ));
            }
        }
        violations
    }

    /// phi(x): the designated value at a breakpoint, the covering piece
    /// elsewhere.
    pub fn eval(&self, x: &Rational) -> Rational {
        match self.breakpoints.binary_search(x) {
            Ok(i) => self.breakpoint_values[i].clone(),
            Err(i) => self.pieces[i].apply(x),
        }
    }

    pub fn continuity(&self) -> ContinuityReport {
        let mut left_witnesses = Vec::new();
        let mut right_witnesses = Vec::new();
        for (i, b) in self.breakpoints.iter().enumerate() {
            let v = &self.breakpoint_values[i];
            if self.pieces[i].apply(b) != *v {
                left_witnesses.push(b.clone());
            }
            if self.pieces[i + 1].apply(b) != *v {
                right_witnesses.push(b.clone());
            }
        }
        ContinuityReport {
            left_continuous: left_witnesses.is_empty(),
            right_continuous: right_witnesses.is_empty(),
            left_witnesses,
            right_witnesses,
        }
    }

    /// The open domain interval of piece i, as (lower, upper) extended
    /// reals.
    fn piece_interval(&self, i: usize) -> (ExtendedReal, ExtendedReal) {
        let lower = if i == 0 {
            ExtendedReal::NegInfinity
        } else {
            ExtendedReal::Finite(self.breakpoints[i - 1].clone())
        };
        let upper = if i == self.breakpoints.len() {
            ExtendedReal::PosInfinity
        } else {
            ExtendedReal::Finite(self.breakpoints[i].clone())
        };
        (lower, upper)
    }

    /// phi*(y) = sup{x : phi(x) <= y}, for nondecreasing phi.
    /// NegInfinity if the set is empty, PosInfinity if it is all of R.
    pub fn preimage_sup(&self, y: &Rational) -> Result<ExtendedReal, TransformError> {
        if self.direction != Direction::Nondecreasing {
            return Err(TransformError::WrongDirection);
        }
        let mut best: Option<ExtendedReal> = None;
        let mut consider = |candidate: ExtendedReal| {
            best = Some(match best.take() {
                Some(b) => b.max(candidate),
                None => candidate,
            });
        };
        for (i, b) in self.breakpoints.iter().enumerate() {
            if self.breakpoint_values[i] <= *y {
                consider(ExtendedReal::Finite(b.clone()));
            }
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            let (lower, upper) = self.piece_interval(i);
            if piece.slope.is_zero() {
                if piece.intercept <= *y {
                    consider(upper);
                }
            } else {
                // values on the open piece approach slope*lower+intercept
                // from above, so the subset is nonempty iff that
                // unattained infimum sits strictly below y... except the
                // sup we report is the same either way: clamp the exact
                // solution of slope*x+intercept = y into the interval.
                let solution = &(y - &piece.intercept) / &piece.slope;
                let sup = ExtendedReal::Finite(solution).min(upper.clone());
                if sup > lower {
                    consider(sup);
                }
            }
        }
        Ok(best.unwrap_or(ExtendedReal::NegInfinity))
    }

    /// phi_star(y) = inf{x : phi(x) >= y}, for nondecreasing phi.
    /// PosInfinity if the set is empty, NegInfinity if it is all of R.
    pub fn preimage_inf(&self, y: &Rational) -> Result<ExtendedReal, TransformError> {
        if self.direction != Direction::Nondecreasing {
            return Err(TransformError::WrongDirection);
        }
        let mut best: Option<ExtendedReal> = None;
        let mut consider = |candidate: ExtendedReal| {
            best = Some(match best.take() {
                Some(b) => b.min(candidate),
                None => candidate,
            });
        };
        for (i, b) in self.breakpoints.iter().enumerate() {
            if self.breakpoint_values[i] >= *y {
                consider(ExtendedReal::Finite(b.clone()));
            }
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            let (lower, upper) = self.piece_interval(i);
            if piece.slope.is_zero() {
                if piece.intercept >= *y {
                    consider(lower);
                }
            } else {
                let solution = &(y - &piece.intercept) / &piece.slope;
                let inf = ExtendedReal::Finite(solution).max(lower.clone());
                if inf < upper {
                    consider(inf);
                }
            }
        }
        Ok(best.unwrap_or(ExtendedReal::PosInfinity))
    }

    /// Pointwise negation; flips the direction.
    pub fn negate(&self) -> PiecewiseAffineMap {
        PiecewiseAffineMap {
            direction: match self.direction {
                Direction::Nondecreasing => Direction::Nonincreasing,
                Direction::Nonincreasing => Direction::Nondecreasing,
            },
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece {
                    slope: -&p.slope,
                    intercept: -&p.intercept,
                })
                .collect(),
            breakpoint_values: self.breakpoint_values.iter().map(|v| -v).collect(),
        }
    }
}

/// The exact law of phi(X). Atoms map through eval; segments split at
/// breakpoints, then each sub-segment maps through its affine piece. A
/// zero-slope piece collapses its sub-segment to an atom. Breakpoints
/// interior to a segment carry zero mass, so designated values only
/// matter for atoms of `d` sitting exactly on a breakpoint.
pub fn pushforward(d: &Distribution, phi: &PiecewiseAffineMap) -> Distribution {
    let mut atoms: Vec<Atom> = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();

    for atom in d.atoms() {
        atoms.push(Atom {
            location: phi.eval(&atom.location),
            mass: atom.mass.clone(),
        });
    }

    for seg in d.segments() {
        let mut cuts: Vec<Rational> = vec![seg.left.clone()];
        for b in phi.breakpoints() {
            if seg.left < *b && *b < seg.right {
                cuts.push(b.clone());
            }
        }
        cuts.push(seg.right.clone());
        let density = seg.density();
        for pair in cuts.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            let sub_mass = &density * &(hi - lo);
            // any interior point of (lo, hi) identifies the piece
            let midpoint = &(lo + hi) / &Rational::from_integer(2);
            let piece_index = match phi.breakpoints().binary_search(&midpoint) {
                Ok(_) => unreachable!("cuts include every interior breakpoint"),
                Err(i) => i,
            };
            let piece = &phi.pieces()[piece_index];
            if piece.slope.is_zero() {
                atoms.push(Atom {
                    location: piece.intercept.clone(),
                    mass: sub_mass,
                });
            } else {
                let a = piece.apply(lo);
                let b = piece.apply(hi);
                let (left, right) = if a <= b { (a, b) } else { (b, a) };
                segments.push(Segment {
                    left,
                    right,
                    mass: sub_mass,
                });
            }
        }
    }

    Distribution::new(atoms, segments)
        .expect("pushforward of a valid distribution is valid")
}
