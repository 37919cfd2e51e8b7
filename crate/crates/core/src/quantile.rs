//! Left and right quantile functions computed from their set-infimum
//! definitions: lq(p) = inf{x : F(x) >= p} and rq(p) = inf{x : F(x) > p}.
//! A candidate-enumeration oracle, independent of the sweep below, lives
//! here too so tests can cross-check every answer.

use thiserror::Error;

use crate::distribution::Distribution;
use crate::numeric::{ExtendedReal, Rational};

/// A probability p with 0 <= p <= 1, enforced at construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProbabilityLevel(Rational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuantileError {
    #[error("probability {0} outside [0, 1]")]
    OutOfRange(Rational),
    #[error("quantile interval requires 0 < p < 1, got {0}")]
    IntervalEndpoint(Rational),
}

impl ProbabilityLevel {
    pub fn new(p: Rational) -> Result<Self, QuantileError> {
        if p.is_negative() || p > Rational::one() {
            return Err(QuantileError::OutOfRange(p));
        }
        Ok(ProbabilityLevel(p))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// 1 - p, for the symmetry and decreasing-map identities.
    pub fn complement(&self) -> ProbabilityLevel {
        ProbabilityLevel(&Rational::one() - &self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0 == Rational::one()
    }
}

/// [lq(p), rq(p)]; lower <= upper always.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantileInterval {
    pub lower: ExtendedReal,
    pub upper: ExtendedReal,
}

/// The CDF as an explicit piecewise-linear profile: sorted critical
/// points, the jump at each, and the slope on each open gap between
/// consecutive points.
struct CdfProfile {
    points: Vec<Rational>,
    jumps: Vec<Rational>,
    slopes: Vec<Rational>,
}

impl CdfProfile {
    fn build(d: &Distribution) -> CdfProfile {
        let mut points: Vec<Rational> = Vec::new();
        for atom in d.atoms() {
            points.push(atom.location.clone());
        }
        for seg in d.segments() {
            points.push(seg.left.clone());
            points.push(seg.right.clone());
        }
        points.sort();
        points.dedup();

        let jumps = points
            .iter()
            .map(|x| {
                d.atoms()
                    .iter()
                    .find(|a| a.location == *x)
                    .map(|a| a.mass.clone())
                    .unwrap_or_else(Rational::zero)
            })
            .collect();

        // segment interiors are disjoint and endpoints are all critical
        // points, so each gap lies inside at most one segment
        let slopes = points
            .windows(2)
            .map(|gap| {
                d.segments()
                    .iter()
                    .find(|s| s.left <= gap[0] && gap[1] <= s.right)
                    .map(|s| s.density())
                    .unwrap_or_else(Rational::zero)
            })
            .collect();

        CdfProfile {
            points,
            jumps,
            slopes,
        }
    }
}

/// lq(p) = inf{x : F(x) >= p}; NegInfinity exactly when p = 0.
pub fn left_quantile(d: &Distribution, p: &ProbabilityLevel) -> ExtendedReal {
    if p.is_zero() {
        return ExtendedReal::NegInfinity;
    }
    let p = p.value();
    let profile = CdfProfile::build(d);
    let mut cum = Rational::zero();
    for i in 0..profile.points.len() {
        if i > 0 {
            let slope = &profile.slopes[i - 1];
            if !slope.is_zero() {
                let width = &profile.points[i] - &profile.points[i - 1];
                let gain = slope * &width;
                let target = &(&cum + &gain);
                if p <= target {
                    // F crosses p inside the gap; the crossing attains it
                    return ExtendedReal::Finite(
                        &profile.points[i - 1] + &(&(p - &cum) / slope),
                    );
                }
                cum = &cum + &gain;
            }
        }
        let weak = &cum + &profile.jumps[i];
        if weak >= *p {
            return ExtendedReal::Finite(profile.points[i].clone());
        }
        cum = weak;
    }
    // total mass is 1, so p <= 1 always returns above
    unreachable!("valid distribution reaches mass 1")
}

/// rq(p) = inf{x : F(x) > p}; PosInfinity exactly when p = 1.
pub fn right_quantile(d: &Distribution, p: &ProbabilityLevel) -> ExtendedReal {
    if p.is_one() {
        return ExtendedReal::PosInfinity;
    }
    let p = p.value();
    let profile = CdfProfile::build(d);
    let mut cum = Rational::zero();
    for i in 0..profile.points.len() {
        if i > 0 {
            let slope = &profile.slopes[i - 1];
            if !slope.is_zero() {
                let width = &profile.points[i] - &profile.points[i - 1];
                let gain = slope * &width;
                let target = &cum + &gain;
                if *p < target {
                    // F exceeds p immediately past the crossing
                    return ExtendedReal::Finite(
                        &profile.points[i - 1] + &(&(p - &cum) / slope),
                    );
                }
                cum = target;
            }
        }
        let weak = &cum + &profile.jumps[i];
        if weak > *p {
            return ExtendedReal::Finite(profile.points[i].clone());
        }
        cum = weak;
    }
    unreachable!("valid distribution reaches mass 1")
}

/// [lq(p), rq(p)] for 0 < p < 1.
pub fn quantile_interval(
    d: &Distribution,
    p: &ProbabilityLevel,
) -> Result<QuantileInterval, QuantileError> {
    if p.is_zero() || p.is_one() {
        return Err(QuantileError::IntervalEndpoint(p.value().clone()));
    }
    Ok(QuantileInterval {
        lower: left_quantile(d, p),
        upper: right_quantile(d, p),
    })
}

/// Independent oracle for lq: enumerate every candidate (atom locations,
/// segment endpoints, per-gap linear solutions of F(x) = p), keep those
/// with F(candidate) >= p, take the minimum, and verify no smaller x
/// qualifies by probing the piecewise form below it.
pub fn oracle_left_quantile(d: &Distribution, p: &ProbabilityLevel) -> ExtendedReal {
    if p.is_zero() {
        return ExtendedReal::NegInfinity;
    }
    let p = p.value();
    let mut critical: Vec<Rational> = Vec::new();
    for atom in d.atoms() {
        critical.push(atom.location.clone());
    }
    for seg in d.segments() {
        critical.push(seg.left.clone());
        critical.push(seg.right.clone());
    }
    critical.sort();
    critical.dedup();

    let mut candidates: Vec<Rational> = critical.clone();
    for gap in critical.windows(2) {
        let lo_weak = d.cdf(&gap[0]).weak;
        let hi_strict = d.cdf(&gap[1]).strict;
        if hi_strict > lo_weak {
            // linear rise across the gap; solve F(x) = p on it
            let slope = &(&hi_strict - &lo_weak) / &(&gap[1] - &gap[0]);
            let x = &gap[0] + &(&(p - &lo_weak) / &slope);
            if gap[0] < x && x <= gap[1] {
                candidates.push(x);
            }
        }
    }
    candidates.sort();
    candidates.dedup();

    let answer = candidates
        .into_iter()
        .find(|c| d.cdf(c).weak >= *p)
        .expect("p <= 1 is attained on a valid distribution");

    // minimality: every critical point below, and the midpoint of the gap
    // immediately below, must sit strictly under p
    for c in &critical {
        if *c < answer {
            assert!(d.cdf(c).weak < *p, "oracle found a smaller qualifying point");
        }
    }
    let below = critical.iter().filter(|c| **c < answer).max();
    let probe = match below {
        Some(c) => &(c + &answer) / &Rational::from_integer(2),
        None => &answer - &Rational::one(),
    };
    if probe < answer {
        assert!(d.cdf(&probe).weak < *p, "oracle minimality probe failed");
    }
    ExtendedReal::Finite(answer)
}
