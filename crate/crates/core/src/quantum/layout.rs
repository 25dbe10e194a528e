use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tensor factors `(label, dimension)`; basis ordering is
/// lexicographic with the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct SystemLayout {
    factors: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in factors.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::Layout("empty factor label".into()));
            }
            if *dim == 0 {
                return Err(Error::Layout(format!("factor `{label}` has dimension 0")));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::Layout(format!("duplicate label `{label}`")));
            }
        }
        Ok(SystemLayout { factors })
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    /// The empty layout (total dimension 1).
    pub fn trivial() -> Self {
        SystemLayout { factors: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].1)
    }

    /// Concatenation `self ⊗ other`; labels must stay unique.
    pub fn concat(&self, other: &SystemLayout) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    /// Sub-layout containing `labels`, kept in this layout's order.
    pub fn subset(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.position(l)?;
        }
        Ok(SystemLayout {
            factors: self
                .factors
                .iter()
                .filter(|(l, _)| labels.contains(&l.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Complement of `labels`, kept in this layout's order.
    pub fn complement(&self, labels: &[&str]) -> Result<Self> {
        for l in labels {
            self.position(l)?;
        }
        Ok(SystemLayout {
            factors: self
                .factors
                .iter()
                .filter(|(l, _)| !labels.contains(&l.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Same factors with one dimension replaced.
    pub fn with_dim(&self, label: &str, dim: usize) -> Result<Self> {
        let pos = self.position(label)?;
        let mut factors = self.factors.clone();
        factors[pos].1 = dim;
        Self::new(factors)
    }
}

impl TryFrom<Vec<(String, usize)>> for SystemLayout {
    type Error = Error;
    fn try_from(v: Vec<(String, usize)>) -> Result<Self> {
        SystemLayout::new(v)
    }
}

impl From<SystemLayout> for Vec<(String, usize)> {
    fn from(l: SystemLayout) -> Self {
        l.factors
    }
}

/// Multi-index ↔ flat index conversion for a list of dimensions.
pub(crate) fn split_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub(crate) fn join_index(parts: &[usize], dims: &[usize]) -> usize {
    parts
        .iter()
        .zip(dims)
        .fold(0, |acc, (&p, &d)| acc * d + p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(SystemLayout::new([("A", 2), ("A", 3)]).is_err());
        assert!(SystemLayout::new([("A", 0)]).is_err());
        let l = SystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        assert_eq!(l.dim(), 6);
        assert_eq!(l.position("B").unwrap(), 1);
        assert!(matches!(l.position("C"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn index_round_trip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            assert_eq!(join_index(&split_index(i, &dims), &dims), i);
        }
    }
}
