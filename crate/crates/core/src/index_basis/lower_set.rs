use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::index_basis::generating::{coefficient_unchecked, AnisotropyParams};

/// Per-coordinate polynomial degrees of a tensorized basis function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter(
                "multi-index needs at least one coordinate".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// Number of nonzero entries.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&k| k > 0).count()
    }

    fn predecessors(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.0.len()).filter(|&j| self.0[j] > 0).map(|j| {
            let mut e = self.0.clone();
            e[j] -= 1;
            MultiIndex(e)
        })
    }

    fn successor(&self, j: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[j] += 1;
        MultiIndex(e)
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Downward-closed finite set of multi-indices, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerSet {
    dim: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl LowerSet {
    /// Validates distinctness and downward closure.
    pub fn new(dim: usize, indices: Vec<MultiIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let mut position = HashMap::with_capacity(indices.len());
        for (i, k) in indices.iter().enumerate() {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            if position.insert(k.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate index {k}")));
            }
        }
        for k in &indices {
            for p in k.predecessors() {
                if !position.contains_key(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "not downward closed: {k} present but {p} missing"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            indices,
            position,
        })
    }

    /// All indices of total degree `< degree`, sorted lexicographically.
    pub fn total_degree(dim: usize, degree: usize) -> Result<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; dim];
        loop {
            if cur.iter().sum::<usize>() < degree {
                out.push(MultiIndex(cur.clone()));
            }
            let mut j = 0;
            loop {
                if j == dim {
                    out.sort();
                    return Self::new(dim, out);
                }
                cur[j] += 1;
                if cur[j] < degree {
                    break;
                }
                cur[j] = 0;
                j += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        self.position.contains_key(k)
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.position.get(k).copied()
    }

    /// Largest degree used in each coordinate.
    pub fn max_degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for k in &self.indices {
            for (o, &e) in out.iter_mut().zip(k.entries()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// Indices outside the set whose predecessors all lie inside.
    pub fn margin(&self) -> Vec<MultiIndex> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for k in &self.indices {
            for j in 0..self.dim {
                let s = k.successor(j);
                if !self.contains(&s)
                    && s.predecessors().all(|p| self.contains(&p))
                    && seen.insert(s.clone())
                {
                    out.push(s);
                }
            }
        }
        if self.indices.is_empty() {
            out.push(MultiIndex::zero(self.dim));
        }
        out.sort();
        out
    }
}

#[derive(Debug)]
struct Candidate {
    value: f64,
    index: MultiIndex,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Larger coefficient first; ties go to the lexicographically smaller index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// The `n` multi-indices with the largest coefficients `c_k`, grown greedily
/// from the admissible frontier. Coefficients decrease componentwise, so the
/// result is downward closed.
pub fn build_lower_set(y: &AnisotropyParams, n: usize) -> Result<LowerSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("lower set size must be >= 1".into()));
    }
    let dim = y.dim();
    let mut chosen: Vec<MultiIndex> = Vec::with_capacity(n);
    let mut members: HashSet<MultiIndex> = HashSet::with_capacity(n);
    let mut queued: HashSet<MultiIndex> = HashSet::new();
    let mut heap = BinaryHeap::new();

    let zero = MultiIndex::zero(dim);
    heap.push(Candidate {
        value: coefficient_unchecked(y, &zero),
        index: zero.clone(),
    });
    queued.insert(zero);

    while chosen.len() < n {
        let Some(Candidate { index, .. }) = heap.pop() else {
            unreachable!("frontier of an infinite index lattice is never empty")
        };
        members.insert(index.clone());
        for j in 0..dim {
            let s = index.successor(j);
            if queued.contains(&s) {
                continue;
            }
            if s.predecessors().all(|p| members.contains(&p)) {
                heap.push(Candidate {
                    value: coefficient_unchecked(y, &s),
                    index: s.clone(),
                });
                queued.insert(s);
            }
        }
        chosen.push(index);
    }
    LowerSet::new(dim, chosen)
}
