//! Coordinate weights for the weighted function-space criterion.
//!
//! Product weights carry one `gamma_j` per coordinate; general weights carry
//! one `gamma_u` per subset of coordinates. The empty set always has weight 1.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HodnError, Result};

/// General weights are stored as a dense map keyed by subset bitmask; cap the
/// dimension so 2^s stays small.
pub const GENERAL_WEIGHT_MAX_DIM: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Weights {
    /// `gamma_u = prod_(j in u) gamma_j`.
    Product(Vec<f64>),
    /// Arbitrary nonnegative `gamma_u`; bitmask bit `j-1` set means
    /// coordinate `j` is in `u`. Mask 0 is implicit with weight 1.
    General { dim: usize, gamma: BTreeMap<u64, f64> },
}

impl Weights {
    pub fn product(gamma: Vec<f64>) -> Result<Self> {
        if gamma.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(HodnError::InvalidParameter(
                "product weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Weights::Product(gamma))
    }

    pub fn general(dim: usize, gamma: BTreeMap<u64, f64>) -> Result<Self> {
        if dim > GENERAL_WEIGHT_MAX_DIM {
            return Err(HodnError::InvalidParameter(format!(
                "general weights limited to dim <= {GENERAL_WEIGHT_MAX_DIM}, got {dim}"
            )));
        }
        for (&mask, &g) in &gamma {
            if mask >= 1u64 << dim {
                return Err(HodnError::InvalidParameter(format!(
                    "weight subset mask {mask:#b} exceeds dim {dim}"
                )));
            }
            if !(g >= 0.0) || !g.is_finite() {
                return Err(HodnError::InvalidParameter(
                    "general weights must be finite and nonnegative".into(),
                ));
            }
        }
        Ok(Weights::General { dim, gamma })
    }

    pub fn dim(&self) -> usize {
        match self {
            Weights::Product(g) => g.len(),
            Weights::General { dim, .. } => *dim,
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, Weights::Product(_))
    }

    /// Per-coordinate weight for product weights (1-based `j`).
    pub fn gamma_j(&self, j: usize) -> Option<f64> {
        match self {
            Weights::Product(g) => g.get(j - 1).copied(),
            Weights::General { .. } => None,
        }
    }

    /// Subset weight by bitmask. Mask 0 yields 1; unknown masks under general
    /// weights yield 0.
    pub fn gamma_subset(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 1.0;
        }
        match self {
            Weights::Product(g) => {
                let mut prod = 1.0;
                let mut m = mask;
                while m != 0 {
                    let j = m.trailing_zeros() as usize;
                    prod *= g.get(j).copied().unwrap_or(0.0);
                    m &= m - 1;
                }
                prod
            }
            Weights::General { gamma, .. } => gamma.get(&mask).copied().unwrap_or(0.0),
        }
    }

    /// Restrict to the first `s` coordinates.
    pub fn truncate(&self, s: usize) -> Result<Self> {
        match self {
            Weights::Product(g) => {
                if g.len() < s {
                    return Err(HodnError::DimensionMismatch(format!(
                        "only {} product weights for dimension {s}",
                        g.len()
                    )));
                }
                Ok(Weights::Product(g[..s].to_vec()))
            }
            Weights::General { dim, gamma } => {
                if *dim < s {
                    return Err(HodnError::DimensionMismatch(format!(
                        "general weights cover dim {dim} < requested {s}"
                    )));
                }
                let mask_cap = 1u64 << s;
                let g = gamma
                    .iter()
                    .filter(|(&m, _)| m < mask_cap)
                    .map(|(&m, &v)| (m, v))
                    .collect();
                Weights::general(s, g)
            }
        }
    }
}

/// Parse the weight mini-language:
/// - `1` — all product weights equal to 1
/// - `j^-2` (any negative exponent, e.g. `j^-3.5`) — `gamma_j = j^exponent`
/// - `list:0.9,0.5,0.25,...` — explicit product weights
/// - `general:@FILE` — general weights from a file of `j1 j2 ... : value`
///   lines (coordinates are 1-based)
pub fn parse_weights(spec: &str, dim: usize) -> Result<Weights> {
    let spec = spec.trim();
    if spec == "1" {
        return Weights::product(vec![1.0; dim]);
    }
    if let Some(rest) = spec.strip_prefix("j^") {
        let expo: f64 = rest.parse().map_err(|_| {
            HodnError::InvalidParameter(format!("bad exponent in weight spec {spec:?}"))
        })?;
        return Weights::product((1..=dim).map(|j| (j as f64).powf(expo)).collect());
    }
    if let Some(rest) = spec.strip_prefix("list:") {
        let vals: Vec<f64> = rest
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| {
                    HodnError::InvalidParameter(format!("bad weight value {t:?}"))
                })
            })
            .collect::<Result<_>>()?;
        if vals.len() < dim {
            return Err(HodnError::InvalidParameter(format!(
                "weight list has {} entries but dimension is {dim}",
                vals.len()
            )));
        }
        return Weights::product(vals[..dim].to_vec());
    }
    if let Some(rest) = spec.strip_prefix("general:@") {
        return read_general_weights(std::fs::File::open(Path::new(rest))?, dim);
    }
    Err(HodnError::InvalidParameter(format!(
        "unrecognized weight spec {spec:?}; expected 1, j^-2, list:..., or general:@file"
    )))
}

/// General-weight file: one subset per line, `j1 j2 ... : value`.
/// Blank lines and `#` comments are ignored; unlisted subsets get weight 0.
pub fn read_general_weights<R: Read>(reader: R, dim: usize) -> Result<Weights> {
    let mut gamma = BTreeMap::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (subset, value) = t.split_once(':').ok_or_else(|| {
            HodnError::MalformedFile(format!(
                "weight line {} missing `:` separator",
                lineno + 1
            ))
        })?;
        let mut mask = 0u64;
        for tok in subset.split_whitespace() {
            let j: usize = tok.parse().map_err(|_| {
                HodnError::MalformedFile(format!("bad coordinate {tok:?} on line {}", lineno + 1))
            })?;
            if j == 0 || j > dim {
                return Err(HodnError::MalformedFile(format!(
                    "coordinate {j} out of range 1..={dim} on line {}",
                    lineno + 1
                )));
            }
            mask |= 1u64 << (j - 1);
        }
        if mask == 0 {
            return Err(HodnError::MalformedFile(format!(
                "empty subset on line {}",
                lineno + 1
            )));
        }
        let v: f64 = value.trim().parse().map_err(|_| {
            HodnError::MalformedFile(format!("bad weight value on line {}", lineno + 1))
        })?;
        if gamma.insert(mask, v).is_some() {
            return Err(HodnError::MalformedFile(format!(
                "duplicate subset on line {}",
                lineno + 1
            )));
        }
    }
    Weights::general(dim, gamma)
}
