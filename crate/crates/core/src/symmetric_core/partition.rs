use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SymmetricError;

/// Which of the three partition sets a tuple belongs to, most specific first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionClass {
    /// Nonnegative with last part zero.
    Lambda0,
    /// Nonnegative.
    Lambda,
    /// Any weakly decreasing integer tuple.
    LambdaInf,
}

/// Weakly decreasing integer tuple λ_1 ≥ … ≥ λ_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct SignedPartition {
    parts: Vec<i32>,
}

impl TryFrom<Vec<i32>> for SignedPartition {
    type Error = SymmetricError;
    fn try_from(v: Vec<i32>) -> Result<Self, Self::Error> {
        SignedPartition::new(v)
    }
}

impl From<SignedPartition> for Vec<i32> {
    fn from(p: SignedPartition) -> Self {
        p.parts
    }
}

impl SignedPartition {
    pub fn new(parts: Vec<i32>) -> Result<Self, SymmetricError> {
        if parts.is_empty() {
            return Err(SymmetricError::Partition("at least one part required".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymmetricError::Partition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(SignedPartition { parts })
    }

    /// Sorts arbitrary integers into a partition.
    pub fn from_unsorted(mut parts: Vec<i32>) -> Result<Self, SymmetricError> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn zero(n: usize) -> Self {
        SignedPartition { parts: vec![0; n] }
    }

    pub fn parts(&self) -> &[i32] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> i64 {
        self.parts.iter().map(|&x| x as i64).sum()
    }

    pub fn first(&self) -> i32 {
        self.parts[0]
    }

    pub fn last(&self) -> i32 {
        *self.parts.last().unwrap()
    }

    /// λ_1 − λ_n.
    pub fn spread(&self) -> i32 {
        self.first() - self.last()
    }

    pub fn class(&self) -> PartitionClass {
        if self.last() == 0 {
            PartitionClass::Lambda0
        } else if self.last() > 0 {
            PartitionClass::Lambda
        } else {
            PartitionClass::LambdaInf
        }
    }

    pub fn in_class(&self, c: PartitionClass) -> bool {
        match c {
            PartitionClass::LambdaInf => true,
            PartitionClass::Lambda => self.last() >= 0,
            PartitionClass::Lambda0 => self.last() == 0,
        }
    }

    /// λ + (m, …, m).
    pub fn shift(&self, m: i32) -> Self {
        SignedPartition { parts: self.parts.iter().map(|&x| x + m).collect() }
    }

    /// λ + k·(1, 0, …, 0, −1); unchanged for n = 1.
    pub fn add_phi(&self, k: i32) -> Self {
        let mut parts = self.parts.clone();
        let n = parts.len();
        if n >= 2 {
            parts[0] += k;
            parts[n - 1] -= k;
        }
        SignedPartition { parts }
    }

    /// λ ≤ μ in dominance order.
    pub fn dominance_leq(&self, other: &Self) -> Result<bool, SymmetricError> {
        if self.n() != other.n() {
            return Err(SymmetricError::LengthMismatch(self.n(), other.n()));
        }
        let mut a = 0i64;
        let mut b = 0i64;
        for (x, y) in self.parts.iter().zip(&other.parts) {
            a += *x as i64;
            b += *y as i64;
            if a > b {
                return Ok(false);
            }
        }
        Ok(a == b)
    }

    /// "m[2,0]" style label.
    pub fn m_label(&self) -> String {
        format!("m{self}")
    }
}

impl fmt::Display for SignedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl FromStr for SignedPartition {
    type Err = SymmetricError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts = t
            .split(',')
            .map(|x| x.trim().parse::<i32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SymmetricError::Partition(format!("cannot parse {s:?}: {e}")))?;
        SignedPartition::new(parts)
    }
}

/// All n-part partitions with parts in [lo, hi] and the given sum, in
/// lexicographically decreasing order (a linear extension of dominance).
pub fn partitions_in_box(n: usize, total: i64, lo: i32, hi: i32) -> Vec<SignedPartition> {
    fn rec(n: usize, total: i64, lo: i32, cap: i32, prefix: &mut Vec<i32>, out: &mut Vec<SignedPartition>) {
        if n == 0 {
            if total == 0 {
                out.push(SignedPartition { parts: prefix.clone() });
            }
            return;
        }
        let rest = (n - 1) as i64;
        for first in (lo..=cap).rev() {
            // remaining parts lie in [lo, first]
            let remaining = total - first as i64;
            if remaining > rest * first as i64 || remaining < rest * lo as i64 {
                continue;
            }
            prefix.push(first);
            rec(n - 1, remaining, lo, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || lo > hi {
        return out;
    }
    rec(n, total, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Partitions μ ≤ λ whose parts stay within [lo, hi], lexicographically decreasing.
pub fn dominated_in_box(lambda: &SignedPartition, lo: i32, hi: i32) -> Vec<SignedPartition> {
    partitions_in_box(lambda.n(), lambda.size(), lo, hi)
        .into_iter()
        .filter(|mu| mu.dominance_leq(lambda).unwrap())
        .collect()
}

/// Partitions μ ≤ λ; every such μ lies in [λ_n, λ_1].
pub fn dominated_by(lambda: &SignedPartition) -> Vec<SignedPartition> {
    dominated_in_box(lambda, lambda.last(), lambda.first())
}
