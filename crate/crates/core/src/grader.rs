//! Length-based simplicity score of a natural-language answer.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraderError {
    #[error("cannot grade an empty answer")]
    EmptyInput,
    #[error("score {0} is outside the open interval (0, 10)")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Low,
    Mid,
    High,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplicityScore {
    pub value: f64,
    pub band: Band,
    pub template_length: usize,
    pub input_length: usize,
}

impl fmt::Display for SimplicityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.value)
    }
}

/// Trims, collapses internal whitespace runs to one space and counts
/// Unicode scalar values.
pub fn normalized_length(text: &str) -> usize {
    normalize(text).chars().count()
}

pub(crate) fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `10·σ(10·(|template|/|input| − 0.7))`.
pub fn simplicity_score(template: &str, input: &str) -> Result<SimplicityScore, GraderError> {
    let input_length = normalized_length(input);
    if input_length == 0 {
        return Err(GraderError::EmptyInput);
    }
    let template_length = normalized_length(template);
    let ratio = template_length as f64 / input_length as f64;
    let value = 10.0 * sigmoid(10.0 * (ratio - 0.7));
    Ok(SimplicityScore {
        value,
        band: band_of(value),
        template_length,
        input_length,
    })
}

pub fn score_band(value: f64) -> Result<Band, GraderError> {
    if !(value > 0.0 && value < 10.0) {
        return Err(GraderError::OutOfRange(value.to_string()));
    }
    Ok(band_of(value))
}

// Extreme length ratios round the score to exactly 0 or 10 in double
// precision, so computed scores skip the range check.
fn band_of(value: f64) -> Band {
    if value <= 5.0 {
        Band::Low
    } else if value < 8.0 {
        Band::Mid
    } else {
        Band::High
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn of_lengths(t: usize, i: usize) -> SimplicityScore {
        simplicity_score(&"t".repeat(t), &"i".repeat(i)).unwrap()
    }

    #[test]
    fn lengths() {
        assert_eq!(normalized_length("  Some  children swim. "), 19);
        assert_eq!(normalized_length(""), 0);
        assert_eq!(normalized_length("A"), 1);
        assert_eq!(normalized_length("Barking dogs don't bite."), 24);
        assert_eq!(
            normalized_length("For all x, if x is a dog and x barks, then x does not bite."),
            59
        );
        assert_eq!(normalized_length("Außer\tdem\n\nHund"), 14);
    }

    #[test]
    fn analytic_points() {
        let s = of_lengths(70, 100);
        assert!((s.value - 5.0).abs() < 1e-12);
        assert_eq!(s.band, Band::Low);
        let same = simplicity_score("Some children swim.", "Some children swim.").unwrap();
        // 10 / (1 + e^-3), e^-3 = 0.049787068367863944
        assert!((same.value - 9.525741268224333).abs() < 1e-9);
        assert_eq!(same.band, Band::High);
    }

    #[test]
    fn word_for_word_dog_sentence() {
        let s = simplicity_score(
            "Barking dogs don't bite.",
            "For all x, if x is a dog and x barks, then x does not bite.",
        )
        .unwrap();
        // 10·σ(10·(24/59 − 0.7)) = 10·σ(−2.9322...) = 0.5058...
        assert!((s.value - 0.50584).abs() < 1e-4, "{}", s.value);
        assert_eq!(s.band, Band::Low);
        assert_eq!(s.to_string(), "0.51");
    }

    #[test]
    fn band_edges() {
        assert_eq!(score_band(5.0).unwrap(), Band::Low);
        assert_eq!(score_band(7.99).unwrap(), Band::Mid);
        assert_eq!(score_band(8.0).unwrap(), Band::High);
        assert!(score_band(0.0).is_err());
        assert!(score_band(10.0).is_err());
        assert!(score_band(f64::NAN).is_err());
    }

    #[test]
    fn high_band_starts_near_ratio_0_8386() {
        assert_eq!(of_lengths(838, 1000).band, Band::Mid);
        assert_eq!(of_lengths(839, 1000).band, Band::High);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(simplicity_score("x", "   "), Err(GraderError::EmptyInput));
    }

    proptest! {
        // strict only below ratio 3, where doubles still resolve the step
        #[test]
        fn longer_template_scores_higher(t in 1usize..500, i in 1usize..500) {
            let (a, b) = (of_lengths(t, i).value, of_lengths(t + 1, i).value);
            prop_assert!(b >= a);
            if (t + 1) as f64 / (i as f64) < 3.0 {
                prop_assert!(b > a);
            }
        }

        #[test]
        fn longer_input_scores_lower(t in 1usize..500, i in 1usize..500) {
            let (a, b) = (of_lengths(t, i).value, of_lengths(t, i + 1).value);
            prop_assert!(b <= a);
            if (t as f64) / (i as f64) < 3.0 {
                prop_assert!(b < a);
            }
        }

        #[test]
        fn value_in_range(t in 1usize..500, i in 1usize..500) {
            let v = of_lengths(t, i).value;
            prop_assert!(v > 0.0 && v <= 10.0);
            if (t as f64) / (i as f64) < 4.0 {
                prop_assert!(v < 10.0);
            }
        }

        #[test]
        fn identical_strings_depend_only_on_ratio(s in "[a-z]{1,40}") {
            prop_assert_eq!(simplicity_score(&s, &s).unwrap().value, of_lengths(3, 3).value);
        }
    }
}
