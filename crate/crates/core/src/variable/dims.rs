use std::fmt;

use crate::error::{Error, Result};

/// Maximum number of dimensions of any array.
pub const MAX_RANK: usize = 6;

/// Ordered dimension labels with their extents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dims {
    labels: Vec<String>,
    shape: Vec<usize>,
}

impl Dims {
    pub fn new<I, S>(dims: I) -> Result<Dims>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out = Dims::scalar();
        for (label, extent) in dims {
            out.push(label, extent)?;
        }
        Ok(out)
    }

    /// Zero-dimensional dims.
    pub fn scalar() -> Dims {
        Dims::default()
    }

    pub fn push(&mut self, label: impl Into<String>, extent: usize) -> Result<()> {
        let label = label.into();
        if self.contains(&label) {
            return Err(Error::Dims(format!("duplicate dimension label '{label}'")));
        }
        if self.rank() == MAX_RANK {
            return Err(Error::Dims(format!("rank exceeds the maximum of {MAX_RANK}")));
        }
        self.labels.push(label);
        self.shape.push(extent);
        Ok(())
    }

    pub fn insert(&mut self, pos: usize, label: impl Into<String>, extent: usize) -> Result<()> {
        let label = label.into();
        if self.contains(&label) {
            return Err(Error::Dims(format!("duplicate dimension label '{label}'")));
        }
        if self.rank() == MAX_RANK {
            return Err(Error::Dims(format!("rank exceeds the maximum of {MAX_RANK}")));
        }
        self.labels.insert(pos, label);
        self.shape.insert(pos, extent);
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn is_scalar(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Number of elements (1 for zero-dimensional dims).
    pub fn volume(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn extent(&self, label: &str) -> Option<usize> {
        self.index_of(label).map(|i| self.shape[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.labels.iter().map(String::as_str).zip(self.shape.iter().copied())
    }

    pub(crate) fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::Dims(format!("dimension '{label}' not found in {self}")))
    }

    pub(crate) fn set_extent(&mut self, index: usize, extent: usize) {
        self.shape[index] = extent;
    }

    pub(crate) fn remove(&mut self, index: usize) {
        self.labels.remove(index);
        self.shape.remove(index);
    }

    pub fn without(&self, label: &str) -> Dims {
        let mut out = self.clone();
        if let Some(i) = out.index_of(label) {
            out.remove(i);
        }
        out
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Dims> {
        let i = self.require(from)?;
        if from != to && self.contains(to) {
            return Err(Error::Dims(format!("dimension '{to}' already present in {self}")));
        }
        let mut out = self.clone();
        out.labels[i] = to.to_string();
        Ok(out)
    }

    /// True when `other` holds the same labels, in any order, with equal extents.
    pub fn is_permutation_of(&self, other: &Dims) -> bool {
        self.rank() == other.rank() && self.iter().all(|(l, e)| other.extent(l) == Some(e))
    }

    /// True when every label of `self` is a label of `other`.
    pub fn labels_subset_of(&self, other: &Dims) -> bool {
        self.labels.iter().all(|l| other.contains(l))
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (l, e)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}: {e}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let d = Dims::new([("x", 3), ("y", 2)]).unwrap();
        assert_eq!(d.volume(), 6);
        assert_eq!(d.extent("y"), Some(2));
        assert_eq!(d.to_string(), "(x: 3, y: 2)");
        assert_eq!(Dims::scalar().volume(), 1);
    }

    #[test]
    fn rejects_duplicates_and_excess_rank() {
        assert!(matches!(Dims::new([("x", 1), ("x", 2)]), Err(Error::Dims(_))));
        let labels = ["a", "b", "c", "d", "e", "f", "g"];
        assert!(Dims::new(labels[..6].iter().map(|l| (*l, 1))).is_ok());
        assert!(matches!(Dims::new(labels.iter().map(|l| (*l, 1))), Err(Error::Dims(_))));
    }
}
