use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SOURCE8: [&str; 8] = [
    "Title",
    "Heading",
    "Sub-Heading",
    "Text Block",
    "List",
    "Table",
    "Image Content",
    "Image/Table Caption",
];

pub const INVOICE5: [&str; 5] = [
    "Logo",
    "Address",
    "Bill/Invoice Information",
    "Tables",
    "(Total) Amount Information",
];

pub const RESUME6: [&str; 6] = ["Education", "Experience", "Bio", "Skills", "Summary", "Other"];

/// Ordered label set; a label's class index is its position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelTaxonomy {
    pub name: String,
    pub labels: Vec<String>,
}

impl LabelTaxonomy {
    pub fn new(name: impl Into<String>, labels: Vec<String>) -> Result<Self> {
        let tax = LabelTaxonomy {
            name: name.into(),
            labels,
        };
        tax.validate()?;
        Ok(tax)
    }

    fn from_static(name: &str, labels: &[&str]) -> Self {
        LabelTaxonomy {
            name: name.to_string(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn source8() -> Self {
        Self::from_static("source8", &SOURCE8)
    }

    pub fn invoice5() -> Self {
        Self::from_static("invoice5", &INVOICE5)
    }

    pub fn resume6() -> Self {
        Self::from_static("resume6", &RESUME6)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "source8" => Some(Self::source8()),
            "invoice5" => Some(Self::invoice5()),
            "resume6" => Some(Self::resume6()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::InvalidManifest(format!("taxonomy {:?} has no labels", self.name)));
        }
        for (i, label) in self.labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidManifest(format!("taxonomy {:?} has an empty label", self.name)));
            }
            if self.labels[..i].contains(label) {
                return Err(Error::InvalidManifest(format!(
                    "taxonomy {:?} repeats label {label:?}",
                    self.name
                )));
            }
            if label == crate::FOREGROUND {
                return Err(Error::InvalidManifest(format!(
                    "taxonomy {:?} uses the reserved label \"foreground\"",
                    self.name
                )));
            }
        }
        if let Some(builtin) = Self::builtin(&self.name) {
            if builtin.labels != self.labels {
                return Err(Error::InvalidManifest(format!(
                    "taxonomy {:?} does not match the built-in label list",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }
}
