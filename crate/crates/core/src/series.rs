//! Graded dimension tables.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    Presentation,
    Oracle,
    E2Page,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::ClosedForm => "closed-form",
            Source::Presentation => "presentation",
            Source::Oracle => "oracle",
            Source::E2Page => "e2-page",
        }
    }
}

/// Dimensions by weight `0..=cutoff`, tagged with how they were obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSeries {
    pub source: Source,
    pub coeffs: Vec<u64>,
}

/// The generic dimension table; every table in this crate is indexed by
/// a single weight.
pub type GradedDimensionTable = HilbertSeries;

impl HilbertSeries {
    pub fn new(source: Source, coeffs: Vec<u64>) -> Self {
        HilbertSeries { source, coeffs }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Weightwise `self ≤ other` on the common range.
    pub fn dominated_by(&self, other: &HilbertSeries) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// Per-weight equality flags on the common range.
    pub fn equal_flags(&self, other: &HilbertSeries) -> Vec<bool> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a == b)
            .collect()
    }
}
