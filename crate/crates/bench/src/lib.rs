//! Fixtures shared by the benchmarks.

use qverify_core::{Assignment, LaurentSeries};
use rug::Rational;

/// A dense unit series `1 + sum_k c_k q^k` through `n`.
pub fn dense(n: i64, seed: i64) -> LaurentSeries {
    let terms = (0..=n).map(|k| (k, Rational::from(((k * seed) % 7 - 3) | 1) / Rational::from(k + 1)));
    LaurentSeries::from_terms(terms, n)
}

pub fn assignment(s: &str) -> Assignment {
    Assignment::parse(s).expect("fixture assignment")
}
