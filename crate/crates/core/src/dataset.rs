//! Empirical data: sorted vectors, the midpoint-averaged weighted median,
//! set-based left/right medians, CSV ingestion, and the earthquake
//! rescaling demo. This is the one module that touches irrational values
//! (10^x and log10), and it does so only through correctly-rounded
//! interval routines; the exact core never sees them.

use std::io::Read;

use thiserror::Error;

use crate::distribution::Distribution;
use crate::numeric::{decimal_magnitude, pow_ten, round_shifted, Rational};
use crate::quantile::{left_quantile, right_quantile, ProbabilityLevel};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("empty input")]
    Empty,
    #[error("weighted median requires a sorted vector")]
    Unsorted,
    #[error("amplitude {0} is not positive")]
    NonPositiveAmplitude(Rational),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}, column {column:?}: {message}")]
    BadCell {
        row: usize,
        column: String,
        message: String,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A vector of exact values; `sorted` records whether the caller has
/// arranged it nondecreasing, which the weighted median requires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataVector {
    values: Vec<Rational>,
    sorted: bool,
}

impl DataVector {
    pub fn new(values: Vec<Rational>) -> Self {
        let sorted = values.windows(2).all(|w| w[0] <= w[1]);
        DataVector { values, sorted }
    }

    pub fn sorted(mut values: Vec<Rational>) -> Self {
        values.sort();
        DataVector {
            values,
            sorted: true,
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Midpoint-averaged sample median: the middle element for odd n, the
/// exact average of the two middle elements for even n.
pub fn weighted_median(v: &DataVector) -> Result<Rational, DatasetError> {
    if v.is_empty() {
        return Err(DatasetError::Empty);
    }
    if !v.is_sorted() {
        return Err(DatasetError::Unsorted);
    }
    let n = v.len();
    if n % 2 == 1 {
        Ok(v.values[n / 2].clone())
    } else {
        Ok(&(&v.values[n / 2 - 1] + &v.values[n / 2]) / &Rational::from_integer(2))
    }
}

fn empirical(v: &DataVector) -> Result<Distribution, DatasetError> {
    Distribution::from_empirical(v.values()).map_err(|_| DatasetError::Empty)
}

/// lq at p = 1/2 of the empirical law.
pub fn left_median(v: &DataVector) -> Result<Rational, DatasetError> {
    let d = empirical(v)?;
    let half = ProbabilityLevel::new(Rational::new(1, 2)).unwrap();
    Ok(left_quantile(&d, &half)
        .finite()
        .expect("median of a finite sample is finite")
        .clone())
}

/// rq at p = 1/2 of the empirical law.
pub fn right_median(v: &DataVector) -> Result<Rational, DatasetError> {
    let d = empirical(v)?;
    let half = ProbabilityLevel::new(Rational::new(1, 2)).unwrap();
    Ok(right_quantile(&d, &half)
        .finite()
        .expect("median of a finite sample is finite")
        .clone())
}

/// One observation: Richter magnitude and the shaking amplitude it was
/// derived from (magnitude = log10 amplitude).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EarthquakeRecord {
    pub ml: Rational,
    pub amplitude: Rational,
}

impl EarthquakeRecord {
    pub fn new(ml: Rational, amplitude: Rational) -> Result<Self, DatasetError> {
        if !amplitude.is_positive() {
            return Err(DatasetError::NonPositiveAmplitude(amplitude));
        }
        Ok(EarthquakeRecord { ml, amplitude })
    }
}

/// The ten-row demo table, bundled.
pub const EARTHQUAKES_CSV: &str = include_str!("../data/earthquakes.csv");

pub fn table_one() -> Vec<EarthquakeRecord> {
    read_earthquakes(EARTHQUAKES_CSV.as_bytes(), "ml", "amplitude")
        .expect("bundled table parses")
}

/// Reads one named column as a DataVector, every cell parsed exactly.
pub fn read_column<R: Read>(reader: R, column: &str) -> Result<DataVector, DatasetError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let idx = column_index(&mut rdr, column)?;
    let mut values = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let cell = record.get(idx).ok_or_else(|| DatasetError::BadCell {
            row: row + 1,
            column: column.to_string(),
            message: "missing cell".to_string(),
        })?;
        values.push(parse_cell(cell, row + 1, column)?);
    }
    if values.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(DataVector::new(values))
}

/// Reads (magnitude, amplitude) records from the two named columns.
pub fn read_earthquakes<R: Read>(
    reader: R,
    ml_column: &str,
    amplitude_column: &str,
) -> Result<Vec<EarthquakeRecord>, DatasetError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let ml_idx = column_index(&mut rdr, ml_column)?;
    let amp_idx = column_index(&mut rdr, amplitude_column)?;
    let mut records = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let get = |idx: usize, column: &str| -> Result<Rational, DatasetError> {
            let cell = record.get(idx).ok_or_else(|| DatasetError::BadCell {
                row: row + 1,
                column: column.to_string(),
                message: "missing cell".to_string(),
            })?;
            parse_cell(cell, row + 1, column)
        };
        records.push(EarthquakeRecord::new(
            get(ml_idx, ml_column)?,
            get(amp_idx, amplitude_column)?,
        )?);
    }
    if records.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(records)
}

fn column_index<R: Read>(
    rdr: &mut csv::Reader<R>,
    column: &str,
) -> Result<usize, DatasetError> {
    let headers = rdr.headers()?;
    headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| DatasetError::MissingColumn(column.to_string()))
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<Rational, DatasetError> {
    Rational::parse(cell.trim()).map_err(|e| DatasetError::BadCell {
        row,
        column: column.to_string(),
        message: e.to_string(),
    })
}

/// One side of the demo: a median of the amplitudes, the matching median
/// of the magnitudes, and 10^(magnitude median) rounded to the requested
/// significant digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MedianComparison {
    pub amplitude_median: Rational,
    pub magnitude_median: Rational,
    pub rescaled_magnitude_median: Rational,
    /// amplitude median and 10^(magnitude median) agree to the requested
    /// digits.
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoReport {
    pub precision: u32,
    pub weighted: MedianComparison,
    pub left: MedianComparison,
    pub right: MedianComparison,
    /// weighted amplitude median minus the rescaled weighted magnitude
    /// median.
    pub discrepancy: Rational,
}

/// The rescaling demo: the weighted medians of the two columns disagree
/// after mapping back through 10^x, while the left/right set-based
/// medians commute with the rescaling (to the stated precision, the map
/// being transcendental).
pub fn earthquake_demo(
    records: &[EarthquakeRecord],
    precision: u32,
) -> Result<DemoReport, DatasetError> {
    if records.is_empty() {
        return Err(DatasetError::Empty);
    }
    let amplitudes = DataVector::sorted(records.iter().map(|r| r.amplitude.clone()).collect());
    let magnitudes = DataVector::sorted(records.iter().map(|r| r.ml.clone()).collect());

    let compare = |a_median: Rational, m_median: Rational| -> MedianComparison {
        let rescaled = precise::pow10(&m_median, precision);
        let agree = precise::round_significant(&a_median, precision) == rescaled;
        MedianComparison {
            amplitude_median: a_median,
            magnitude_median: m_median,
            rescaled_magnitude_median: rescaled,
            agree,
        }
    };

    let weighted = compare(weighted_median(&amplitudes)?, weighted_median(&magnitudes)?);
    let left = compare(left_median(&amplitudes)?, left_median(&magnitudes)?);
    let right = compare(right_median(&amplitudes)?, right_median(&magnitudes)?);
    let discrepancy = &weighted.amplitude_median - &weighted.rescaled_magnitude_median;

    Ok(DemoReport {
        precision,
        weighted,
        left,
        right,
        discrepancy,
    })
}

/// Correctly-rounded 10^x and log10, by dyadic interval refinement over
/// big-integer fixed point. Used only by the demo.
pub mod precise {
    use super::*;
    use num::bigint::BigInt;
    use num::{One, Zero};

    /// Rounds to `sig` significant decimal digits, ties away from zero.
    pub fn round_significant(x: &Rational, sig: u32) -> Rational {
        if x.is_zero() {
            return Rational::zero();
        }
        let magnitude = decimal_magnitude(x);
        let shift = i64::from(sig) - 1 - magnitude;
        let scaled = round_shifted(x, shift);
        &Rational::from_integer(scaled) * &pow_ten(-shift)
    }

    /// 10^x correctly rounded to `sig` significant digits. Exact when x
    /// is an integer.
    pub fn pow10(x: &Rational, sig: u32) -> Rational {
        if x.is_integer() {
            let e: i64 = x
                .numerator()
                .try_into()
                .expect("integer exponent fits i64");
            return pow_ten(e);
        }
        let mut work = sig + 8;
        loop {
            let (lo, hi) = pow10_bounds(x, work);
            let lo_rounded = round_significant(&lo, sig);
            let hi_rounded = round_significant(&hi, sig);
            if lo_rounded == hi_rounded {
                return lo_rounded;
            }
            work += 8;
        }
    }

    /// log10(a) correctly rounded to `sig` significant digits, a > 0.
    /// Exact when a is an integer power of ten.
    pub fn log10(a: &Rational, sig: u32) -> Rational {
        assert!(a.is_positive(), "log10 requires a positive argument");
        let magnitude = decimal_magnitude(a);
        if *a == pow_ten(magnitude) {
            return Rational::from_integer(magnitude);
        }
        let mut work = sig + 8;
        loop {
            // bisect the fractional part over dyadics until both ends
            // round identically
            let mut lo = Rational::zero();
            let mut hi = Rational::one();
            let steps = (u64::from(work) * 10) / 3 + 8;
            let half = Rational::new(1, 2);
            let mut stuck = false;
            for _ in 0..steps {
                let mid = &(&lo + &hi) * &half;
                let exponent = &Rational::from_integer(magnitude) + &mid;
                let (plo, phi) = pow10_bounds(&exponent, work + 4);
                if *a > phi {
                    lo = mid;
                } else if *a < plo {
                    hi = mid;
                } else {
                    // bracket too wide to decide; retry wider
                    stuck = true;
                    break;
                }
            }
            if !stuck {
                let m = Rational::from_integer(magnitude);
                let lo_rounded = round_significant(&(&m + &lo), sig);
                let hi_rounded = round_significant(&(&m + &hi), sig);
                if lo_rounded == hi_rounded {
                    return lo_rounded;
                }
            }
            work += 8;
        }
    }

    /// Rational bounds lo <= 10^x <= hi with about `work` correct decimal
    /// digits.
    fn pow10_bounds(x: &Rational, work: u32) -> (Rational, Rational) {
        let floor = x.floor();
        let floor_i: i64 = (&floor).try_into().expect("exponent magnitude fits i64");
        let frac = x - &Rational::from_integer(floor);
        debug_assert!(!frac.is_negative() && frac < Rational::one());

        let bits = (u64::from(work) * 10) / 3 + 16;
        // dyadic truncation of the fractional exponent
        let t = (&frac * &Rational::from_integer(BigInt::one() << bits)).floor();

        let scale = BigInt::from(10u32).pow(work + 8);
        // interval chain for 10^(2^-j), outward rounded
        let mut chain_lo = BigInt::from(10) * &scale;
        let mut chain_hi = chain_lo.clone();
        let mut acc_lo = scale.clone();
        let mut acc_hi = scale.clone();
        for j in 1..=bits {
            chain_lo = (&chain_lo * &scale).sqrt();
            chain_hi = (&chain_hi * &scale).sqrt() + 1;
            let bit = (&t >> (bits - j)) & BigInt::one();
            if !bit.is_zero() {
                acc_lo = (&acc_lo * &chain_lo) / &scale;
                acc_hi = (&acc_hi * &chain_hi) / &scale + 1;
            }
        }
        // cover the truncated remainder delta < 2^-bits:
        // 10^delta <= 1 + 3 * 2^-bits
        acc_hi = &acc_hi + ((&acc_hi * BigInt::from(3)) >> bits) + 1;

        let shift = pow_ten(floor_i);
        let scale_rat = Rational::from_integer(scale);
        (
            &(&Rational::from_integer(acc_lo) / &scale_rat) * &shift,
            &(&Rational::from_integer(acc_hi) / &scale_rat) * &shift,
        )
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        fn rat(s: &str) -> Rational {
            Rational::parse(s).unwrap()
        }

        #[test]
        fn round_significant_examples() {
            assert_eq!(round_significant(&rat("178691.954873"), 7), rat("178692.0"));
            assert_eq!(round_significant(&rat("178691.954873"), 6), rat("178692"));
            assert_eq!(round_significant(&rat("0.0012345"), 2), rat("0.0012"));
            assert_eq!(round_significant(&rat("-19.47287"), 3), rat("-19.5"));
        }

        #[test]
        fn pow10_examples() {
            assert_eq!(pow10(&rat("3"), 5), rat("1000"));
            assert_eq!(pow10(&rat("-2"), 5), rat("0.01"));
            assert_eq!(pow10(&rat("5.252105"), 7), rat("178692.0"));
            assert_eq!(pow10(&rat("5.252105"), 6), rat("178692"));
            assert_eq!(pow10(&rat("5.21478"), 7), rat("163975.9"));
            assert_eq!(pow10(&rat("5.28943"), 7), rat("194728.7"));
            assert_eq!(pow10(&rat("0.5"), 6), rat("3.16228"));
            assert_eq!(pow10(&rat("-0.5"), 6), rat("0.316228"));
        }

        #[test]
        fn pow10_is_monotone_on_a_grid() {
            let grid = [
                "-2.5", "-1.25", "-0.1", "0.3", "1.1", "4.21094", "5.21478", "5.72736",
            ];
            let values: Vec<Rational> =
                grid.iter().map(|s| pow10(&rat(s), 9)).collect();
            for pair in values.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }

        #[test]
        fn log10_examples() {
            assert_eq!(log10(&rat("1000"), 5), rat("3"));
            assert_eq!(log10(&rat("0.01"), 5), rat("-2"));
            assert_eq!(log10(&rat("2"), 6), rat("0.301030"));
            assert_eq!(log10(&rat("163975.9"), 6), rat("5.21478"));
        }

        #[test]
        fn pow10_log10_round_trip_on_table_grid() {
            let precision = 7u32;
            let tolerance = pow_ten(-(precision as i64));
            for s in [
                "4.21094", "4.69852", "4.92185", "5.12098", "5.21478", "5.28943",
                "5.32558", "5.47828", "5.59103", "5.72736",
            ] {
                let x = rat(s);
                let y = pow10(&x, precision + 3);
                let z = log10(&y, precision + 3);
                assert!((&z - &x).abs() < tolerance, "round trip drift at {s}: {z}");
            }
        }
    }
}
