//! Cheap generator statistics and the Krull dimension, used as regression
//! predictors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{MonomialOrder, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Statistics of the generator degrees, where a generator's degree is its
/// largest term degree.
pub fn degree_stats(generators: &[Polynomial]) -> Result<DegreeStats, FeatureError> {
    if generators.is_empty() {
        return Err(FeatureError::InvalidArgument(
            "degree statistics of an empty generator list",
        ));
    }
    let degs: Vec<f64> = generators.iter().map(|g| g.degree() as f64).collect();
    let n = degs.len() as f64;
    let mean = degs.iter().sum::<f64>() / n;
    let var = degs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    Ok(DegreeStats {
        min: generators.iter().map(Polynomial::degree).min().unwrap(),
        max: generators.iter().map(Polynomial::degree).max().unwrap(),
        mean,
        std: var.sqrt(),
    })
}

/// Number of generators whose leading monomial under `order` is a power of
/// a single variable.
pub fn pure_power_count(generators: &[Polynomial], order: MonomialOrder) -> usize {
    generators
        .iter()
        .filter_map(|g| {
            if g.order() == order {
                g.lead_monomial().copied()
            } else {
                g.with_order(order).lead_monomial().copied()
            }
        })
        .filter(|m| m.is_pure_power())
        .count()
}

/// Krull dimension of `R/I` from a Gröbner basis of `I` in `nvars`
/// variables: the largest set of variables containing the support of no
/// leading monomial. Returns -1 for the unit ideal.
pub fn krull_dimension(gb: &[Polynomial], nvars: usize) -> i32 {
    assert!(nvars < 32, "subset enumeration limited to 31 variables");
    let supports: Vec<u32> = gb
        .iter()
        .filter_map(|g| g.lead_monomial())
        .map(|m| m.support())
        .collect();
    let mut best = -1;
    for subset in 0u32..(1 << nvars) {
        let size = subset.count_ones() as i32;
        if size > best && supports.iter().all(|&s| s & !subset != 0) {
            best = size;
        }
    }
    best
}

/// Per-sample predictor values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub min_deg: u32,
    pub max_deg: u32,
    pub mean_deg: f64,
    pub std_deg: f64,
    pub pure_powers: usize,
    pub num_gens: usize,
    /// Krull dimension, or -1 when not computed (or for the unit ideal).
    pub dimension: i32,
}

impl FeatureVector {
    pub const NAMES: [&'static str; 7] = [
        "min_deg",
        "max_deg",
        "mean_deg",
        "std_deg",
        "pure_powers",
        "num_gens",
        "dimension",
    ];

    pub fn get(&self, name: &str) -> Result<f64, FeatureError> {
        Ok(match name {
            "min_deg" => self.min_deg as f64,
            "max_deg" => self.max_deg as f64,
            "mean_deg" => self.mean_deg,
            "std_deg" => self.std_deg,
            "pure_powers" => self.pure_powers as f64,
            "num_gens" => self.num_gens as f64,
            "dimension" => self.dimension as f64,
            other => return Err(FeatureError::UnknownFeature(other.to_string())),
        })
    }
}

/// Features of a generating set; `gb` (a Gröbner basis of the same ideal)
/// supplies the dimension when present.
pub fn featurize(
    generators: &[Polynomial],
    gb: Option<&[Polynomial]>,
    order: MonomialOrder,
) -> Result<FeatureVector, FeatureError> {
    let stats = degree_stats(generators)?;
    let nvars = generators[0].nvars();
    Ok(FeatureVector {
        min_deg: stats.min,
        max_deg: stats.max,
        mean_deg: stats.mean,
        std_deg: stats.std,
        pure_powers: pure_power_count(generators, order),
        num_gens: generators.len(),
        dimension: gb.map_or(-1, |gb| krull_dimension(gb, nvars)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(text: &str) -> Polynomial {
        Polynomial::parse(text, 3, MonomialOrder::Grevlex).unwrap()
    }

    fn of_degrees(degs: &[u32]) -> Vec<Polynomial> {
        degs.iter().map(|&d| p3(&format!("x1^{d}+1"))).collect()
    }

    #[test]
    fn degree_stat_examples() {
        let s = degree_stats(&of_degrees(&[2, 2, 2])).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.std), (2, 2, 2.0, 0.0));
        let s = degree_stats(&of_degrees(&[1, 3])).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.std), (1, 3, 2.0, 1.0));
        let s = degree_stats(&of_degrees(&[5])).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.std), (5, 5, 5.0, 0.0));
        assert!(degree_stats(&[]).is_err());
    }

    #[test]
    fn generator_degree_is_the_largest_term_degree() {
        let s = degree_stats(&[p3("x1+x2^3*x3")]).unwrap();
        assert_eq!(s.max, 4);
    }

    #[test]
    fn pure_power_examples() {
        let g = MonomialOrder::Grevlex;
        assert_eq!(
            pure_power_count(&[p3("x1^2+-1*x2"), p3("x1*x2+-1*x3")], g),
            1
        );
        assert_eq!(pure_power_count(&[p3("x1+-1*x2")], g), 1);
        assert_eq!(pure_power_count(&[p3("x1*x2+-1*x3^2")], g), 0);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(krull_dimension(&[p3("x1"), p3("x2"), p3("x3")], 3), 0);
        assert_eq!(krull_dimension(&[], 3), 3);
        let cubic = [p3("x1^2+-1*x2"), p3("x1*x2+-1*x3"), p3("x2^2+-1*x1*x3")];
        assert_eq!(krull_dimension(&cubic, 3), 1);
        assert_eq!(krull_dimension(&[p3("1")], 3), -1);
    }

    #[test]
    fn feature_lookup() {
        let f = featurize(
            &[p3("x1^2+-1*x2"), p3("x1*x2+-1*x3")],
            None,
            MonomialOrder::Grevlex,
        )
        .unwrap();
        assert_eq!(f.get("num_gens").unwrap(), 2.0);
        assert_eq!(f.get("pure_powers").unwrap(), 1.0);
        assert_eq!(f.dimension, -1);
        assert!(f.get("regularity").is_err());
    }
}
