//! Executable theorem checking: each identity relating quantiles of X and
//! of phi(X) becomes an operation that evaluates both sides exactly,
//! records whether its hypotheses hold, and renders a verdict. A seeded
//! random search hunts for violations when a hypothesis is dropped and
//! doubles as a self-test when none is.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::distribution::{Atom, Distribution, Segment};
use crate::numeric::{ExtendedReal, Rational};
use crate::quantile::{left_quantile, right_quantile, ProbabilityLevel};
use crate::transform::{pushforward, PiecewiseAffineMap, TransformError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    LeftEquivariance,
    RightEquivariance,
    DecreasingA,
    DecreasingB,
    Symmetry,
    SandwichLq,
    SandwichRq,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoremId::LeftEquivariance => "left-equivariance",
            TheoremId::RightEquivariance => "right-equivariance",
            TheoremId::DecreasingA => "decreasing-a",
            TheoremId::DecreasingB => "decreasing-b",
            TheoremId::Symmetry => "symmetry",
            TheoremId::SandwichLq => "sandwich-lq",
            TheoremId::SandwichRq => "sandwich-rq",
        };
        f.write_str(s)
    }
}

/// Structured verdict of one theorem check. When every hypothesis holds,
/// `equal` (and `ploss` = 0 for the sandwich variants) is the theorem
/// itself: a false verdict under satisfied hypotheses is a library bug.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    /// (hypothesis name, satisfied) pairs.
    pub hypotheses: Vec<(&'static str, bool)>,
    pub lhs: ExtendedReal,
    /// None when the inner quantile is infinite and applying phi to it
    /// would extrapolate.
    pub rhs: Option<ExtendedReal>,
    /// Exact equality of lhs and rhs (interval membership for the
    /// sandwich variants).
    pub equal: bool,
    pub ploss: Option<Rational>,
    /// Human-readable repro of the inputs for a violation found by
    /// search; not part of the report line.
    pub witness: Option<String>,
}

impl TheoremReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|(_, ok)| *ok)
    }

    /// True when the theorem's conclusion holds as stated.
    pub fn conclusion_holds(&self) -> bool {
        self.equal && self.ploss.as_ref().is_none_or(|d| d.is_zero())
    }

    /// A violation is a failed conclusion under satisfied hypotheses.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_hold() && !self.conclusion_holds()
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} hypotheses=", self.theorem_id)?;
        let failed: Vec<&str> = self
            .hypotheses
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| *name)
            .collect();
        if failed.is_empty() {
            write!(f, "OK")?;
        } else {
            write!(f, "FAIL({})", failed.join(","))?;
        }
        write!(f, " lhs={}", self.lhs)?;
        match &self.rhs {
            Some(v) => write!(f, " rhs={v}")?,
            None => write!(f, " rhs=undefined")?,
        }
        write!(f, " equal={}", self.equal)?;
        match &self.ploss {
            Some(d) => write!(f, " ploss={d}"),
            None => write!(f, " ploss=-"),
        }
    }
}

/// delta_Y(a, b) = P(a < Y < b) + P(b < Y < a); symmetric, zero at a = b.
pub fn probability_loss(d: &Distribution, a: &ExtendedReal, b: &ExtendedReal) -> Rational {
    &d.mass_open(a, b) + &d.mass_open(b, a)
}

fn apply_to_quantile(phi: &PiecewiseAffineMap, q: &ExtendedReal) -> Option<ExtendedReal> {
    q.finite().map(|x| ExtendedReal::Finite(phi.eval(x)))
}

fn equivariance_report(
    theorem_id: TheoremId,
    hypotheses: Vec<(&'static str, bool)>,
    lhs: ExtendedReal,
    inner_quantile: &ExtendedReal,
    phi: &PiecewiseAffineMap,
) -> TheoremReport {
    let rhs = apply_to_quantile(phi, inner_quantile);
    let mut hypotheses = hypotheses;
    if rhs.is_none() {
        // applying phi to an infinite quantile is not extrapolated
        hypotheses.push(("p-in-(0,1)", false));
    }
    let equal = rhs.as_ref() == Some(&lhs);
    TheoremReport {
        theorem_id,
        hypotheses,
        lhs,
        rhs,
        equal,
        ploss: None,
        witness: None,
    }
}

/// lq_{phi(X)}(p) = phi(lq_X(p)) under nondecreasing left-continuous phi.
pub fn check_left_equivariance(
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
) -> TheoremReport {
    let continuity = phi.continuity();
    let hypotheses = vec![
        ("nondecreasing", phi.direction() == crate::transform::Direction::Nondecreasing),
        ("left-continuity", continuity.left_continuous),
    ];
    let lhs = left_quantile(&pushforward(d, phi), p);
    let inner = left_quantile(d, p);
    equivariance_report(TheoremId::LeftEquivariance, hypotheses, lhs, &inner, phi)
}

/// rq_{phi(X)}(p) = phi(rq_X(p)) under nondecreasing right-continuous phi.
pub fn check_right_equivariance(
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
) -> TheoremReport {
    let continuity = phi.continuity();
    let hypotheses = vec![
        ("nondecreasing", phi.direction() == crate::transform::Direction::Nondecreasing),
        ("right-continuity", continuity.right_continuous),
    ];
    let lhs = right_quantile(&pushforward(d, phi), p);
    let inner = right_quantile(d, p);
    equivariance_report(TheoremId::RightEquivariance, hypotheses, lhs, &inner, phi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecreasingVariant {
    /// lq_{phi(X)}(p) = phi(rq_X(1-p)), phi nonincreasing right continuous.
    A,
    /// rq_{phi(X)}(p) = phi(lq_X(1-p)), phi nonincreasing left continuous.
    B,
}

pub fn check_decreasing_equivariance(
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
    variant: DecreasingVariant,
) -> TheoremReport {
    let continuity = phi.continuity();
    let nonincreasing =
        phi.direction() == crate::transform::Direction::Nonincreasing;
    let q = p.complement();
    let (theorem_id, hypotheses, lhs, inner) = match variant {
        DecreasingVariant::A => (
            TheoremId::DecreasingA,
            vec![
                ("nonincreasing", nonincreasing),
                ("right-continuity", continuity.right_continuous),
            ],
            left_quantile(&pushforward(d, phi), p),
            right_quantile(d, &q),
        ),
        DecreasingVariant::B => (
            TheoremId::DecreasingB,
            vec![
                ("nonincreasing", nonincreasing),
                ("left-continuity", continuity.left_continuous),
            ],
            right_quantile(&pushforward(d, phi), p),
            left_quantile(d, &q),
        ),
    };
    equivariance_report(theorem_id, hypotheses, lhs, &inner, phi)
}

/// lq_X(p) = -rq_{-X}(1-p); no hypotheses beyond validity.
pub fn check_symmetry(d: &Distribution, p: &ProbabilityLevel) -> TheoremReport {
    let lhs = left_quantile(d, p);
    let rhs = right_quantile(&d.reflect(), &p.complement()).neg();
    let equal = lhs == rhs;
    TheoremReport {
        theorem_id: TheoremId::Symmetry,
        hypotheses: vec![],
        lhs,
        rhs: Some(rhs),
        equal,
        ploss: None,
        witness: None,
    }
}

/// With Y = phi(X) and phi merely nondecreasing: phi(lq_X(p)) and
/// phi(rq_X(p)) both land inside [lq_Y(p), rq_Y(p)] with zero probability
/// loss against the matching endpoint. No continuity hypothesis.
pub fn check_sandwich(
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
) -> Result<(TheoremReport, TheoremReport), TransformError> {
    if phi.direction() != crate::transform::Direction::Nondecreasing {
        return Err(TransformError::WrongDirection);
    }
    let y = pushforward(d, phi);
    let lq_y = left_quantile(&y, p);
    let rq_y = right_quantile(&y, p);
    let make = |theorem_id, inner: ExtendedReal, endpoint: &ExtendedReal| {
        let mapped = apply_to_quantile(phi, &inner);
        let mut hypotheses = vec![("nondecreasing", true)];
        let (equal, ploss) = match &mapped {
            Some(v) => (
                lq_y <= *v && *v <= rq_y,
                Some(probability_loss(&y, v, endpoint)),
            ),
            None => {
                hypotheses.push(("p-in-(0,1)", false));
                (false, None)
            }
        };
        TheoremReport {
            theorem_id,
            hypotheses,
            lhs: mapped.unwrap_or(inner),
            rhs: Some(endpoint.clone()),
            equal,
            ploss,
            witness: None,
        }
    };
    let lq_x = left_quantile(d, p);
    let rq_x = right_quantile(d, p);
    Ok((
        make(TheoremId::SandwichLq, lq_x, &lq_y),
        make(TheoremId::SandwichRq, rq_x, &rq_y),
    ))
}

/// Which hypothesis the random search deliberately violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropHypothesis {
    None,
    LeftContinuity,
    RightContinuity,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("trials must be positive")]
    NoTrials,
}

/// Deterministically generates `trials` random (distribution, map, p)
/// triples. With a dropped hypothesis the maps violate it by
/// construction and every failed identity is returned; with
/// `DropHypothesis::None` the hypotheses are satisfied, so any returned
/// report is a library bug (shrunk to a small repro before returning).
pub fn search_counterexamples(
    seed: u64,
    trials: u64,
    drop: DropHypothesis,
) -> Result<Vec<TheoremReport>, SearchError> {
    if trials == 0 {
        return Err(SearchError::NoTrials);
    }
    let mut violations = Vec::new();
    for index in 0..trials {
        let mut rng = trial_rng(seed, index);
        let d = generate::distribution(&mut rng);
        let p = generate::level(&mut rng, &d);
        match drop {
            DropHypothesis::LeftContinuity => {
                let phi = generate::map_violating_left_continuity(&mut rng, &d, &p);
                let report = check_left_equivariance(&d, &phi, &p);
                debug_assert!(!report.hypotheses_hold());
                if !report.equal {
                    violations.push(with_witness(report, &d, &phi, &p));
                }
            }
            DropHypothesis::RightContinuity => {
                let phi = generate::map_violating_right_continuity(&mut rng, &d, &p);
                let report = check_right_equivariance(&d, &phi, &p);
                debug_assert!(!report.hypotheses_hold());
                if !report.equal {
                    violations.push(with_witness(report, &d, &phi, &p));
                }
            }
            DropHypothesis::None => {
                for report in run_satisfied_checks(&mut rng, &d, &p) {
                    let (report, d, phi) = report;
                    if report.is_violation() {
                        violations.push(shrink_violation(report, d, phi, p.clone()));
                    }
                }
            }
        }
    }
    Ok(violations)
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn with_witness(
    mut report: TheoremReport,
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
) -> TheoremReport {
    report.witness = Some(format!("d={d:?} phi={phi:?} p={}", p.value()));
    report
}

/// One full-hypothesis pass: every checker against a map generated to
/// satisfy that checker's continuity requirement.
fn run_satisfied_checks(
    rng: &mut ChaCha8Rng,
    d: &Distribution,
    p: &ProbabilityLevel,
) -> Vec<(TheoremReport, Distribution, PiecewiseAffineMap)> {
    use generate::Continuity;
    let mut out = Vec::new();

    let phi = generate::map(rng, Continuity::LeftContinuous);
    out.push((check_left_equivariance(d, &phi, p), d.clone(), phi));

    let phi = generate::map(rng, Continuity::RightContinuous);
    out.push((check_right_equivariance(d, &phi, p), d.clone(), phi));

    let phi = generate::map(rng, Continuity::RightContinuous).negate();
    out.push((
        check_decreasing_equivariance(d, &phi, p, DecreasingVariant::A),
        d.clone(),
        phi,
    ));

    let phi = generate::map(rng, Continuity::LeftContinuous).negate();
    out.push((
        check_decreasing_equivariance(d, &phi, p, DecreasingVariant::B),
        d.clone(),
        phi,
    ));

    let identity = PiecewiseAffineMap::identity();
    out.push((check_symmetry(d, p), d.clone(), identity));

    let phi = generate::map(rng, Continuity::Free);
    if let Ok((a, b)) = check_sandwich(d, &phi, p) {
        out.push((a, d.clone(), phi.clone()));
        out.push((b, d.clone(), phi));
    }
    out
}

/// Greedy component removal: re-run the same theorem on smaller inputs
/// while the violation persists, then attach the minimal repro.
fn shrink_violation(
    report: TheoremReport,
    mut d: Distribution,
    mut phi: PiecewiseAffineMap,
    p: ProbabilityLevel,
) -> TheoremReport {
    let still_violates = |d: &Distribution, phi: &PiecewiseAffineMap| -> bool {
        rerun(report.theorem_id, d, phi, &p).is_some_and(|r| r.is_violation())
    };
    loop {
        let mut progressed = false;
        for candidate in shrink_distribution_candidates(&d) {
            if still_violates(&candidate, &phi) {
                d = candidate;
                progressed = true;
                break;
            }
        }
        for candidate in shrink_map_candidates(&phi) {
            if still_violates(&d, &candidate) {
                phi = candidate;
                progressed = true;
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    let mut report = rerun(report.theorem_id, &d, &phi, &p).unwrap_or(report);
    report.witness = Some(format!("d={d:?} phi={phi:?} p={}", p.value()));
    report
}

fn rerun(
    theorem_id: TheoremId,
    d: &Distribution,
    phi: &PiecewiseAffineMap,
    p: &ProbabilityLevel,
) -> Option<TheoremReport> {
    match theorem_id {
        TheoremId::LeftEquivariance => Some(check_left_equivariance(d, phi, p)),
        TheoremId::RightEquivariance => Some(check_right_equivariance(d, phi, p)),
        TheoremId::DecreasingA => {
            Some(check_decreasing_equivariance(d, phi, p, DecreasingVariant::A))
        }
        TheoremId::DecreasingB => {
            Some(check_decreasing_equivariance(d, phi, p, DecreasingVariant::B))
        }
        TheoremId::Symmetry => Some(check_symmetry(d, p)),
        TheoremId::SandwichLq => check_sandwich(d, phi, p).ok().map(|(a, _)| a),
        TheoremId::SandwichRq => check_sandwich(d, phi, p).ok().map(|(_, b)| b),
    }
}

fn shrink_distribution_candidates(d: &Distribution) -> Vec<Distribution> {
    let mut out = Vec::new();
    let components = d.atoms().len() + d.segments().len();
    if components <= 1 {
        return out;
    }
    for skip in 0..components {
        let mut atoms: Vec<Atom> = Vec::new();
        let mut segments: Vec<Segment> = Vec::new();
        let mut removed = Rational::zero();
        for (i, a) in d.atoms().iter().enumerate() {
            if i == skip {
                removed = a.mass.clone();
            } else {
                atoms.push(a.clone());
            }
        }
        for (j, s) in d.segments().iter().enumerate() {
            if d.atoms().len() + j == skip {
                removed = s.mass.clone();
            } else {
                segments.push(s.clone());
            }
        }
        let keep = &Rational::one() - &removed;
        if !keep.is_positive() {
            continue;
        }
        for a in &mut atoms {
            a.mass = &a.mass / &keep;
        }
        for s in &mut segments {
            s.mass = &s.mass / &keep;
        }
        if let Ok(candidate) = Distribution::new(atoms, segments) {
            out.push(candidate);
        }
    }
    out
}

fn shrink_map_candidates(phi: &PiecewiseAffineMap) -> Vec<PiecewiseAffineMap> {
    let mut out = Vec::new();
    for skip in 0..phi.breakpoints().len() {
        let breakpoints: Vec<Rational> = phi
            .breakpoints()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, b)| b.clone())
            .collect();
        let values: Vec<Rational> = phi
            .breakpoint_values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, v)| v.clone())
            .collect();
        let pieces: Vec<_> = phi
            .pieces()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip + 1)
            .map(|(_, p)| p.clone())
            .collect();
        if let Ok(candidate) =
            PiecewiseAffineMap::new(phi.direction(), breakpoints, pieces, values)
        {
            out.push(candidate);
        }
    }
    out
}

/// Randomized inputs for the search and the property suites: small
/// rationals (denominators <= 64), 1-8 atoms, 0-4 segments, 0-4
/// breakpoints, so failures stay readable.
pub mod generate {
    use super::*;

    pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
        let denominator = rng.gen_range(1..=64i64);
        let numerator = rng.gen_range(-8 * denominator..=8 * denominator);
        Rational::new(numerator, denominator)
    }

    /// Strictly increasing coordinates.
    fn sorted_distinct(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
        let mut values: Vec<Rational> = Vec::with_capacity(count);
        while values.len() < count {
            let v = small_rational(rng);
            if !values.contains(&v) {
                values.push(v);
            }
        }
        values.sort();
        values
    }

    pub fn distribution(rng: &mut ChaCha8Rng) -> Distribution {
        let n_atoms = rng.gen_range(1..=8usize);
        let n_segments = rng.gen_range(0..=4usize);
        let locations = sorted_distinct(rng, n_atoms);
        let endpoints = sorted_distinct(rng, 2 * n_segments);

        let weights: Vec<i64> = (0..n_atoms + n_segments)
            .map(|_| rng.gen_range(1..=8i64))
            .collect();
        let total: i64 = weights.iter().sum();
        let total = Rational::from_integer(total);

        let atoms = locations
            .into_iter()
            .zip(&weights)
            .map(|(location, w)| Atom {
                location,
                mass: &Rational::from_integer(*w) / &total,
            })
            .collect();
        let segments = endpoints
            .chunks(2)
            .zip(weights[n_atoms..].iter())
            .map(|(pair, w)| Segment {
                left: pair[0].clone(),
                right: pair[1].clone(),
                mass: &Rational::from_integer(*w) / &total,
            })
            .collect();
        Distribution::new(atoms, segments).expect("generated distribution is valid")
    }

    /// p in (0, 1); sometimes an exact CDF value of `d`, to land on the
    /// flat stretches where equality cases live.
    pub fn level(rng: &mut ChaCha8Rng, d: &Distribution) -> ProbabilityLevel {
        if rng.gen_bool(0.3) && !d.atoms().is_empty() {
            let i = rng.gen_range(0..d.atoms().len());
            let p = d.cdf(&d.atoms()[i].location).weak;
            if p.is_positive() && p < Rational::one() {
                return ProbabilityLevel::new(p).unwrap();
            }
        }
        let denominator = rng.gen_range(2..=64i64);
        let numerator = rng.gen_range(1..denominator);
        ProbabilityLevel::new(Rational::new(numerator, denominator)).unwrap()
    }

    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum Continuity {
        LeftContinuous,
        RightContinuous,
        Continuous,
        /// Designated values drawn freely from [left limit, right limit].
        Free,
    }

    fn slope(rng: &mut ChaCha8Rng) -> Rational {
        if rng.gen_bool(0.25) {
            Rational::zero()
        } else {
            Rational::new(rng.gen_range(1..=8i64), rng.gen_range(1..=8i64))
        }
    }

    /// A valid nondecreasing map with the requested continuity class,
    /// built left to right so every designated value sits between its
    /// one-sided limits.
    pub fn map(rng: &mut ChaCha8Rng, continuity: Continuity) -> PiecewiseAffineMap {
        let k = rng.gen_range(0..=4usize);
        let breakpoints = sorted_distinct(rng, k);
        map_with_breakpoints(rng, continuity, breakpoints, false)
    }

    pub(super) fn map_with_breakpoints(
        rng: &mut ChaCha8Rng,
        continuity: Continuity,
        breakpoints: Vec<Rational>,
        force_jumps: bool,
    ) -> PiecewiseAffineMap {
        let mut pieces = vec![crate::transform::AffinePiece {
            slope: slope(rng),
            intercept: small_rational(rng),
        }];
        let mut values = Vec::with_capacity(breakpoints.len());
        for b in &breakpoints {
            let left_limit = pieces.last().unwrap().apply(b);
            let jump = if continuity == Continuity::Continuous {
                Rational::zero()
            } else if force_jumps {
                Rational::new(rng.gen_range(1..=16i64), rng.gen_range(1..=4i64))
            } else if rng.gen_bool(0.5) {
                Rational::zero()
            } else {
                Rational::new(rng.gen_range(0..=16i64), rng.gen_range(1..=4i64))
            };
            let right_start = &left_limit + &jump;
            let value = match continuity {
                Continuity::LeftContinuous | Continuity::Continuous => left_limit.clone(),
                Continuity::RightContinuous => right_start.clone(),
                Continuity::Free => match rng.gen_range(0..3u8) {
                    0 => left_limit.clone(),
                    1 => right_start.clone(),
                    _ => &(&left_limit + &right_start) / &Rational::from_integer(2),
                },
            };
            let next_slope = slope(rng);
            let intercept = &right_start - &(&next_slope * b);
            values.push(value);
            pieces.push(crate::transform::AffinePiece {
                slope: next_slope,
                intercept,
            });
        }
        let map = PiecewiseAffineMap::new(
            crate::transform::Direction::Nondecreasing,
            breakpoints,
            pieces,
            values,
        )
        .expect("constructed map is valid");
        if continuity == Continuity::Continuous {
            debug_assert!(map.continuity().left_continuous && map.continuity().right_continuous);
        }
        map
    }

    /// Breakpoints that tend to interact with the distribution: half the
    /// time one is planted exactly at the given quantile of `d`.
    fn biased_breakpoints(
        rng: &mut ChaCha8Rng,
        anchor: Option<&Rational>,
    ) -> Vec<Rational> {
        let k = rng.gen_range(1..=4usize);
        let mut points = sorted_distinct(rng, k);
        if let Some(anchor) = anchor {
            if rng.gen_bool(0.5) && !points.contains(anchor) {
                points[0] = anchor.clone();
                points.sort();
                points.dedup();
            }
        }
        points
    }

    /// Nondecreasing, genuinely jumping at every breakpoint with the
    /// designated value on the right limit: right continuous, not left.
    pub fn map_violating_left_continuity(
        rng: &mut ChaCha8Rng,
        d: &Distribution,
        p: &ProbabilityLevel,
    ) -> PiecewiseAffineMap {
        let anchor = left_quantile(d, p);
        let breakpoints = biased_breakpoints(rng, anchor.finite());
        let map =
            map_with_breakpoints(rng, Continuity::RightContinuous, breakpoints, true);
        debug_assert!(!map.continuity().left_continuous);
        map
    }

    /// Nondecreasing, jumping everywhere with the value on the left
    /// limit: left continuous, not right.
    pub fn map_violating_right_continuity(
        rng: &mut ChaCha8Rng,
        d: &Distribution,
        p: &ProbabilityLevel,
    ) -> PiecewiseAffineMap {
        let anchor = right_quantile(d, p);
        let breakpoints = biased_breakpoints(rng, anchor.finite());
        let map =
            map_with_breakpoints(rng, Continuity::LeftContinuous, breakpoints, true);
        debug_assert!(!map.continuity().right_continuous);
        map
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

    fn level(s: &str) -> ProbabilityLevel {
        ProbabilityLevel::new(rat(s)).unwrap()
    }

    fn uniform01() -> Distribution {
        Distribution::uniform(rat("0"), rat("1")).unwrap()
    }

    fn two_atoms() -> Distribution {
        Distribution::from_empirical(&[rat("1"), rat("2")]).unwrap()
    }

    #[test]
    fn probability_loss_examples() {
        let t = pushforward(&uniform01(), &PiecewiseAffineMap::counterexample_step());
        assert_eq!(probability_loss(&t, &fin("1/2"), &fin("11/2")), rat("0"));
        assert_eq!(
            probability_loss(&uniform01(), &fin("0"), &fin("1/4")),
            rat("1/4")
        );
        assert_eq!(probability_loss(&uniform01(), &fin("5"), &fin("5")), rat("0"));
        // symmetry in the arguments
        assert_eq!(
            probability_loss(&uniform01(), &fin("3/4"), &fin("1/4")),
            rat("1/2")
        );
    }

    #[test]
    fn left_equivariance_counterexample() {
        let report = check_left_equivariance(
            &uniform01(),
            &PiecewiseAffineMap::counterexample_step(),
            &level("1/2"),
        );
        assert!(!report.hypotheses_hold());
        assert_eq!(report.lhs, fin("1/2"));
        assert_eq!(report.rhs, Some(fin("11/2")));
        assert!(!report.equal);
        assert_eq!(
            report.to_string(),
            "left-equivariance hypotheses=FAIL(left-continuity) lhs=1/2 rhs=11/2 equal=false ploss=-"
        );
    }

    #[test]
    fn left_equivariance_shift_and_identity() {
        let shift = PiecewiseAffineMap::affine(rat("1"), rat("5"));
        let report = check_left_equivariance(&uniform01(), &shift, &level("1/2"));
        assert!(report.hypotheses_hold());
        assert_eq!(report.lhs, fin("11/2"));
        assert_eq!(report.rhs, Some(fin("11/2")));
        assert!(report.equal);

        let report = check_left_equivariance(
            &two_atoms(),
            &PiecewiseAffineMap::identity(),
            &level("1/2"),
        );
        assert_eq!(report.lhs, fin("1"));
        assert!(report.equal);
    }

    #[test]
    fn right_equivariance_examples() {
        let report = check_right_equivariance(
            &uniform01(),
            &PiecewiseAffineMap::counterexample_step(),
            &level("1/2"),
        );
        assert!(report.hypotheses_hold());
        assert_eq!(report.lhs, fin("11/2"));
        assert_eq!(report.rhs, Some(fin("11/2")));
        assert!(report.equal);

        let report = check_right_equivariance(
            &two_atoms(),
            &PiecewiseAffineMap::identity(),
            &level("1/2"),
        );
        assert_eq!(report.lhs, fin("2"));
        assert!(report.equal);

        let shift = PiecewiseAffineMap::affine(rat("1"), rat("5"));
        let report = check_right_equivariance(&uniform01(), &shift, &level("1/2"));
        assert_eq!(report.lhs, fin("11/2"));
        assert!(report.equal);
    }

    #[test]
    fn decreasing_equivariance_examples() {
        let neg = PiecewiseAffineMap::affine(rat("-1"), rat("0"));
        let report = check_decreasing_equivariance(
            &uniform01(),
            &neg,
            &level("1/4"),
            DecreasingVariant::A,
        );
        assert!(report.hypotheses_hold());
        assert_eq!(report.lhs, fin("-3/4"));
        assert_eq!(report.rhs, Some(fin("-3/4")));
        assert!(report.equal);

        let report = check_decreasing_equivariance(
            &two_atoms(),
            &neg,
            &level("1/2"),
            DecreasingVariant::A,
        );
        assert_eq!(report.lhs, fin("-2"));
        assert!(report.equal);

        for variant in [DecreasingVariant::A, DecreasingVariant::B] {
            let report = check_decreasing_equivariance(
                &Distribution::point(rat("3")),
                &neg,
                &level("1/2"),
                variant,
            );
            assert_eq!(report.lhs, fin("-3"));
            assert!(report.equal);
        }
    }

    #[test]
    fn symmetry_examples() {
        let report = check_symmetry(&two_atoms(), &level("1/2"));
        assert_eq!(report.lhs, fin("1"));
        assert!(report.equal);

        let report = check_symmetry(&uniform01(), &level("1/3"));
        assert_eq!(report.lhs, fin("1/3"));
        assert!(report.equal);

        let report = check_symmetry(&Distribution::point(rat("3")), &level("2/3"));
        assert_eq!(report.lhs, fin("3"));
        assert!(report.equal);
    }

    #[test]
    fn sandwich_examples() {
        let (lq_report, rq_report) = check_sandwich(
            &uniform01(),
            &PiecewiseAffineMap::counterexample_step(),
            &level("1/2"),
        )
        .unwrap();
        assert_eq!(lq_report.lhs, fin("11/2"));
        assert!(lq_report.equal);
        assert_eq!(lq_report.ploss, Some(rat("0")));
        assert!(rq_report.equal);
        assert_eq!(rq_report.ploss, Some(rat("0")));

        let step_up = PiecewiseAffineMap::new(
            crate::transform::Direction::Nondecreasing,
            vec![rat("2")],
            vec![
                crate::transform::AffinePiece { slope: rat("1"), intercept: rat("0") },
                crate::transform::AffinePiece { slope: rat("1"), intercept: rat("10") },
            ],
            vec![rat("12")],
        )
        .unwrap();
        let (lq_report, rq_report) =
            check_sandwich(&two_atoms(), &step_up, &level("1/2")).unwrap();
        assert_eq!(lq_report.lhs, fin("1"));
        assert!(lq_report.equal && rq_report.equal);
        assert_eq!(lq_report.ploss, Some(rat("0")));

        let down = PiecewiseAffineMap::affine(rat("-1"), rat("0"));
        assert!(check_sandwich(&uniform01(), &down, &level("1/2")).is_err());
    }

    #[test]
    fn search_finds_left_continuity_violations() {
        let found = search_counterexamples(1, 200, DropHypothesis::LeftContinuity).unwrap();
        assert!(!found.is_empty());
        assert!(found.iter().all(|r| !r.hypotheses_hold() && !r.equal));
        assert!(found[0].witness.is_some());
    }

    #[test]
    fn search_finds_right_continuity_violations() {
        let found =
            search_counterexamples(1, 200, DropHypothesis::RightContinuity).unwrap();
        assert!(!found.is_empty());
    }

    #[test]
    fn search_with_full_hypotheses_is_clean() {
        let found = search_counterexamples(7, 300, DropHypothesis::None).unwrap();
        assert_eq!(found, vec![]);
    }

    #[test]
    fn search_rejects_zero_trials() {
        assert_eq!(
            search_counterexamples(1, 0, DropHypothesis::None),
            Err(SearchError::NoTrials)
        );
    }

    #[test]
    fn report_line_format_is_stable() {
        let report = check_symmetry(&uniform01(), &level("1/3"));
        assert_eq!(
            report.to_string(),
            "symmetry hypotheses=OK lhs=1/3 rhs=1/3 equal=true ploss=-"
        );
    }
}
