//! Labeled subsystems and the row-major index layout of their tensor product.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total dimension of a composite space.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// A named finite-dimensional subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Subsystem { name: name.into(), dim }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.dim)
    }
}

/// Ordered registry of subsystems.
///
/// Amplitude index layout is row-major in registration order: the first
/// subsystem is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeSpace {
    subsystems: Vec<Subsystem>,
    total_dim: usize,
}

impl CompositeSpace {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        Self::with_cap(subsystems, DEFAULT_MAX_DIM)
    }

    pub fn with_cap(subsystems: Vec<Subsystem>, max_dim: usize) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::Label("a composite space needs at least one subsystem".into()));
        }
        let mut total: usize = 1;
        for (i, s) in subsystems.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::Label("empty subsystem name".into()));
            }
            if s.dim < 2 {
                return Err(Error::Dimension(format!(
                    "subsystem {} has dimension {}; physical subsystems need at least 2",
                    s.name, s.dim
                )));
            }
            if subsystems[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::Label(format!("duplicate subsystem name {}", s.name)));
            }
            total = total
                .checked_mul(s.dim)
                .filter(|&t| t <= max_dim)
                .ok_or_else(|| Error::Dimension(format!("total dimension exceeds the cap of {max_dim}")))?;
        }
        Ok(CompositeSpace { subsystems, total_dim: total })
    }

    /// Shorthand for `CompositeSpace::new` from `(name, dim)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(n, d)| Subsystem::new(n, d)).collect())
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn names(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Subsystem> {
        self.subsystems.iter().find(|s| s.name == name)
    }

    /// Positions of `names` in this space, in the order given.
    pub fn positions<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let p = self.position(n).ok_or_else(|| Error::Label(format!("{n} is not a subsystem of {self}")))?;
            if out.contains(&p) {
                return Err(Error::Label(format!("{n} listed twice")));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// The subsystems named in `names`, arranged in this space's order.
    ///
    /// Fails with a subset error if a name is not registered here.
    pub fn subspace<S: AsRef<str>>(&self, names: &[S]) -> Result<CompositeSpace> {
        let mut pos = self.positions(names).map_err(|e| match e {
            Error::Label(m) => Error::Subset(m),
            other => other,
        })?;
        if pos.is_empty() {
            return Err(Error::Subset("empty subsystem subset".into()));
        }
        pos.sort_unstable();
        Ok(self.select(&pos))
    }

    /// Everything in this space that is not named in `names`, in order.
    pub fn complement<S: AsRef<str>>(&self, names: &[S]) -> Result<Option<CompositeSpace>> {
        let pos = self.positions(names)?;
        let rest: Vec<usize> = (0..self.len()).filter(|p| !pos.contains(p)).collect();
        if rest.is_empty() {
            Ok(None)
        } else {
            Ok(Some(self.select(&rest)))
        }
    }

    /// Concatenation `self ++ other`; names must not collide.
    pub fn concat(&self, other: &CompositeSpace) -> Result<CompositeSpace> {
        if let Some(s) = other.subsystems.iter().find(|s| self.contains(&s.name)) {
            return Err(Error::Disjointness(format!("{} appears on both sides", s.name)));
        }
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        CompositeSpace::new(subs)
    }

    /// True when every subsystem of `other` is registered here with the same dimension.
    pub fn includes(&self, other: &CompositeSpace) -> bool {
        other.subsystems.iter().all(|s| self.get(&s.name) == Some(s))
    }

    /// True when both spaces hold the same subsystems, in any order.
    pub fn same_set(&self, other: &CompositeSpace) -> bool {
        self.len() == other.len() && self.includes(other)
    }

    pub fn is_disjoint(&self, other: &CompositeSpace) -> bool {
        other.subsystems.iter().all(|s| !self.contains(&s.name))
    }

    fn select(&self, positions: &[usize]) -> CompositeSpace {
        let subs: Vec<Subsystem> = positions.iter().map(|&p| self.subsystems[p].clone()).collect();
        let total = subs.iter().map(|s| s.dim).product();
        CompositeSpace { subsystems: subs, total_dim: total }
    }

    /// Row-major strides of every subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.subsystems[i + 1].dim;
        }
        strides
    }

    /// Flat-index offsets contributed by the subsystems at `positions`.
    ///
    /// Entry `k` is the offset of the `k`-th multi-index over `positions`,
    /// enumerated row-major in the order the positions are given. Adding an
    /// offset from a disjoint position set gives a full flat index.
    pub fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &p in positions {
            let d = self.subsystems[p].dim;
            let s = strides[p];
            let mut next = Vec::with_capacity(out.len() * d);
            for &base in &out {
                for digit in 0..d {
                    next.push(base + digit * s);
                }
            }
            out = next;
        }
        out
    }

    /// Flat index of a basis ket given one digit per subsystem.
    pub fn flat_index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.len() {
            return Err(Error::Dimension(format!("expected {} indices, got {}", self.len(), digits.len())));
        }
        let mut idx = 0;
        for (d, s) in digits.iter().zip(&self.subsystems) {
            if *d >= s.dim {
                return Err(Error::Dimension(format!("index {d} out of range for {} (dim {})", s.name, s.dim)));
            }
            idx = idx * s.dim + d;
        }
        Ok(idx)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (i, s) in self.subsystems.iter().enumerate().rev() {
            out[i] = flat % s.dim;
            flat /= s.dim;
        }
        out
    }
}

impl fmt::Display for CompositeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.subsystems.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", names.join(", "))
    }
}
