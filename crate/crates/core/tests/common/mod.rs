// not every test target uses every suite
#![allow(dead_code)]

//! Shared randomized suites: the quantile-law checks, the
//! theorem-equivariance checks, and the oracle cross-checks. The small
//! property tests and the full acceptance gate both drive these with
//! different trial counts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quantiles_core::diagnostics::{
    check_decreasing_equivariance, check_left_equivariance, check_right_equivariance,
    check_sandwich, check_symmetry, generate, probability_loss, DecreasingVariant,
};
use quantiles_core::quantile::{
    left_quantile, oracle_left_quantile, quantile_interval, right_quantile,
};
use quantiles_core::transform::pushforward;
use quantiles_core::{Distribution, ExtendedReal, PiecewiseAffineMap, ProbabilityLevel, Rational};

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn half() -> Rational {
    Rational::new(1, 2)
}

/// Candidate probe points: every critical coordinate, the gap midpoints,
/// and sentinels beyond the support.
fn probe_points(d: &Distribution, extra: &[&ExtendedReal]) -> Vec<Rational> {
    let mut points: Vec<Rational> = Vec::new();
    for a in d.atoms() {
        points.push(a.location.clone());
    }
    for s in d.segments() {
        points.push(s.left.clone());
        points.push(s.right.clone());
    }
    for e in extra {
        if let Some(q) = e.finite() {
            points.push(q.clone());
        }
    }
    points.sort();
    points.dedup();
    let mut probes = points.clone();
    for pair in points.windows(2) {
        probes.push(&(&pair[0] + &pair[1]) * &half());
    }
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        probes.push(first - &Rational::one());
        probes.push(last + &Rational::one());
    }
    probes.sort();
    probes.dedup();
    probes
}

/// One pass of the quantile laws, the value-criterion characterizations
/// and the interval membership identity, all exact. Panics with context
/// on any violation.
pub fn check_quantile_laws(d: &Distribution, p: &ProbabilityLevel, p2: &ProbabilityLevel) {
    let lq = left_quantile(d, p);
    let rq = right_quantile(d, p);
    let context = || format!("d={d:?} p={}", p.value());

    // (a) F(lq(p)) >= p
    if let Some(x) = lq.finite() {
        assert!(d.cdf(x).weak >= *p.value(), "law (a) failed: {}", context());
    }
    // (b) lq <= rq
    assert!(lq <= rq, "law (b) failed: {}", context());
    // (c) p1 < p2 => rq(p1) <= lq(p2)
    let (small, large) = if p.value() <= p2.value() { (p, p2) } else { (p2, p) };
    if small.value() < large.value() {
        assert!(
            right_quantile(d, small) <= left_quantile(d, large),
            "law (c) failed: {} p2={}",
            context(),
            p2.value()
        );
    }
    // (e) no mass strictly between the quantiles
    assert!(
        d.mass_open(&lq, &rq).is_zero(),
        "law (e) failed: {}",
        context()
    );
    // (f) F°(rq(p)) <= p
    if let Some(x) = rq.finite() {
        assert!(d.cdf(x).strict <= *p.value(), "law (f) failed: {}", context());
    }
    // (g) lq < rq => F(lq) = p
    if lq < rq {
        if let Some(x) = lq.finite() {
            assert_eq!(d.cdf(x).weak, *p.value(), "law (g) failed: {}", context());
        }
    }
    // (h) support bounds carry all the mass
    let (low, high) = d.support_bounds();
    let zero = ProbabilityLevel::new(Rational::zero()).unwrap();
    let one = ProbabilityLevel::new(Rational::one()).unwrap();
    assert_eq!(low, right_quantile(d, &zero), "law (h) failed: {}", context());
    assert_eq!(high, left_quantile(d, &one), "law (h) failed: {}", context());
    assert!(
        d.mass_open(&ExtendedReal::NegInfinity, &low).is_zero(),
        "law (h) failed below support: {}",
        context()
    );
    assert!(
        d.mass_open(&high, &ExtendedReal::PosInfinity).is_zero(),
        "law (h) failed above support: {}",
        context()
    );
    // (i) monotone in p over the pair
    if small.value() < large.value() {
        assert!(left_quantile(d, small) <= left_quantile(d, large));
        assert!(right_quantile(d, small) <= right_quantile(d, large));
    }
    // (j) lq(F(x)) = x at every atom
    for atom in d.atoms() {
        let level = ProbabilityLevel::new(d.cdf(&atom.location).weak).unwrap();
        assert_eq!(
            left_quantile(d, &level),
            ExtendedReal::Finite(atom.location.clone()),
            "law (j) failed at atom {}: {}",
            atom.location,
            context()
        );
    }

    let probes = probe_points(d, &[&lq, &rq]);
    // (k) x < lq => F(x) < p; x > rq => F(x) > p
    for x in &probes {
        let ext = ExtendedReal::Finite(x.clone());
        if ext < lq {
            assert!(d.cdf(x).weak < *p.value(), "law (k) failed at {x}: {}", context());
        }
        if ext > rq {
            assert!(d.cdf(x).weak > *p.value(), "law (k) failed at {x}: {}", context());
        }
    }

    // value criterion: lq is the only a with F(a) >= p such that x < a
    // implies F(x) < p, and rq the only a with strict cdf at most p such
    // that x > a implies F(x) > p. For every other candidate we exhibit
    // an exact witness breaking one of the two clauses.
    let midpoint = |a: &Rational, b: &Rational| &(a + b) * &half();
    for a in &probes {
        let ext = ExtendedReal::Finite(a.clone());
        if ext < lq {
            // first clause fails directly
            assert!(
                d.cdf(a).weak < *p.value(),
                "value criterion lq failed below at {a}: {}",
                context()
            );
        } else if ext > lq {
            // a point strictly between lq and a defeats the second clause
            let witness = match lq.finite() {
                Some(q) => midpoint(q, a),
                None => a - &Rational::one(),
            };
            assert!(
                d.cdf(&witness).weak >= *p.value(),
                "value criterion lq failed above at {a}: {}",
                context()
            );
        }
        if ext > rq {
            assert!(
                d.cdf(a).strict > *p.value(),
                "value criterion rq failed above at {a}: {}",
                context()
            );
        } else if ext < rq {
            let witness = match rq.finite() {
                Some(q) => midpoint(a, q),
                None => a + &Rational::one(),
            };
            assert!(
                d.cdf(&witness).weak <= *p.value(),
                "value criterion rq failed below at {a}: {}",
                context()
            );
        }
    }

    // interval membership: y in [lq, rq] <=> F°(y) <= p <= F(y)
    if !p.is_zero() && !p.is_one() {
        let interval = quantile_interval(d, p).unwrap();
        for y in &probes {
            let ext = ExtendedReal::Finite(y.clone());
            let inside = interval.lower <= ext && ext <= interval.upper;
            let cdf = d.cdf(y);
            let characterized = cdf.strict <= *p.value() && cdf.weak >= *p.value();
            assert_eq!(
                inside, characterized,
                "interval membership failed at {y}: {}",
                context()
            );
        }
    }
}

/// Runs `trials` seeded passes of the quantile laws; returns the number
/// of passes (for sanity in callers).
pub fn quantile_law_suite(seed: u64, trials: u64) -> u64 {
    for index in 0..trials {
        let mut rng = trial_rng(seed, index);
        let d = generate::distribution(&mut rng);
        let p = generate::level(&mut rng, &d);
        let p2 = generate::level(&mut rng, &d);
        check_quantile_laws(&d, &p, &p2);
    }
    trials
}

/// One full-hypothesis theorem pass over a random (d, p): every checker
/// must report equal (and zero probability loss for the sandwich).
pub fn check_theorems_hold(rng: &mut ChaCha8Rng, d: &Distribution, p: &ProbabilityLevel) {
    use generate::Continuity;

    let phi = generate::map(rng, Continuity::LeftContinuous);
    let report = check_left_equivariance(d, &phi, p);
    assert!(
        report.hypotheses_hold() && report.equal,
        "left equivariance failed: {report} d={d:?} phi={phi:?} p={}",
        p.value()
    );

    let phi = generate::map(rng, Continuity::RightContinuous);
    let report = check_right_equivariance(d, &phi, p);
    assert!(
        report.hypotheses_hold() && report.equal,
        "right equivariance failed: {report} d={d:?} phi={phi:?} p={}",
        p.value()
    );

    let phi = generate::map(rng, Continuity::RightContinuous).negate();
    let report = check_decreasing_equivariance(d, &phi, p, DecreasingVariant::A);
    assert!(
        report.hypotheses_hold() && report.equal,
        "decreasing (a) failed: {report} d={d:?} phi={phi:?} p={}",
        p.value()
    );

    let phi = generate::map(rng, Continuity::LeftContinuous).negate();
    let report = check_decreasing_equivariance(d, &phi, p, DecreasingVariant::B);
    assert!(
        report.hypotheses_hold() && report.equal,
        "decreasing (b) failed: {report} d={d:?} phi={phi:?} p={}",
        p.value()
    );

    let report = check_symmetry(d, p);
    assert!(report.equal, "symmetry failed: {report} d={d:?} p={}", p.value());

    // sandwich must survive arbitrary discontinuity
    let phi = generate::map(rng, Continuity::Free);
    let (a, b) = check_sandwich(d, &phi, p).unwrap();
    for report in [a, b] {
        assert!(
            report.hypotheses_hold() && report.conclusion_holds(),
            "sandwich failed: {report} d={d:?} phi={phi:?} p={}",
            p.value()
        );
    }

}

pub fn theorem_suite(seed: u64, trials: u64) -> u64 {
    for index in 0..trials {
        let mut rng = trial_rng(seed.wrapping_add(0x5EED), index);
        let d = generate::distribution(&mut rng);
        let p = generate::level(&mut rng, &d);
        check_theorems_hold(&mut rng, &d, &p);
    }
    trials
}

/// left_quantile against the candidate-enumeration oracle.
pub fn oracle_quantile_suite(seed: u64, trials: u64) -> u64 {
    for index in 0..trials {
        let mut rng = trial_rng(seed.wrapping_add(0x0AC1E), index);
        let d = generate::distribution(&mut rng);
        let p = generate::level(&mut rng, &d);
        assert_eq!(
            left_quantile(&d, &p),
            oracle_left_quantile(&d, &p),
            "oracle disagreement: d={d:?} p={}",
            p.value()
        );
    }
    trials
}

/// pushforward against direct atom mapping and merging, atom-only laws.
pub fn oracle_pushforward_suite(seed: u64, trials: u64) -> u64 {
    for index in 0..trials {
        let mut rng = trial_rng(seed.wrapping_add(0xA70), index);
        let n = rng.gen_range(1..=8usize);
        let values: Vec<Rational> = (0..n).map(|_| generate::small_rational(&mut rng)).collect();
        let d = Distribution::from_empirical(&values).unwrap();
        let phi = generate::map(&mut rng, generate::Continuity::Free);
        let expected = atom_pushforward_oracle(&d, &phi);
        assert_eq!(
            pushforward(&d, &phi),
            expected,
            "pushforward oracle disagreement: d={d:?} phi={phi:?}"
        );
    }
    trials
}

/// Independent discrete route: map every atom, merge colliding images.
fn atom_pushforward_oracle(d: &Distribution, phi: &PiecewiseAffineMap) -> Distribution {
    use std::collections::BTreeMap;
    let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
    for atom in d.atoms() {
        let image = phi.eval(&atom.location);
        let entry = merged.entry(image).or_insert_with(Rational::zero);
        *entry = &*entry + &atom.mass;
    }
    let atoms = merged
        .into_iter()
        .map(|(location, mass)| quantiles_core::Atom { location, mass })
        .collect();
    Distribution::new(atoms, Vec::new()).unwrap()
}

/// Probability-loss laws: symmetry and vanishing on the diagonal.
pub fn probability_loss_suite(seed: u64, trials: u64) -> u64 {
    for index in 0..trials {
        let mut rng = trial_rng(seed.wrapping_add(0x1055), index);
        let d = generate::distribution(&mut rng);
        let a = ExtendedReal::Finite(generate::small_rational(&mut rng));
        let b = ExtendedReal::Finite(generate::small_rational(&mut rng));
        assert_eq!(probability_loss(&d, &a, &b), probability_loss(&d, &b, &a));
        assert!(probability_loss(&d, &a, &a).is_zero());
    }
    trials
}
