//! Classical Lie algebra types and their ranks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root system type of a classical compact group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    /// `U(n)`, Hermitian matrices.
    A,
    /// `SO(2n+1)`, imaginary antisymmetric matrices of odd size.
    B,
    /// `Sp(n)` in the `J`-convention, Hermitian `H` with `H^t J + J H = 0`.
    C,
    /// `SO(2n)`, imaginary antisymmetric matrices of even size.
    D,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [ClassTag::A, ClassTag::B, ClassTag::C, ClassTag::D];

    /// Whether points of the associated process live on the half-line.
    pub fn is_half_line(self) -> bool {
        !matches!(self, ClassTag::A)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::A => "A",
            ClassTag::B => "B",
            ClassTag::C => "C",
            ClassTag::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(ClassTag::A),
            "B" => Ok(ClassTag::B),
            "C" => Ok(ClassTag::C),
            "D" => Ok(ClassTag::D),
            other => Err(Error::Domain(format!("unknown class tag `{other}`"))),
        }
    }
}

/// A class tag together with its rank `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixClass {
    pub tag: ClassTag,
    pub rank: usize,
}

impl MatrixClass {
    pub fn new(tag: ClassTag, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Domain("rank must be at least 1".into()));
        }
        Ok(Self { tag, rank })
    }

    /// Rank-zero classes only arise as the trivial order-1 minor of a B/D matrix.
    pub(crate) fn trivial_b() -> Self {
        Self {
            tag: ClassTag::B,
            rank: 0,
        }
    }

    pub fn a(rank: usize) -> Self {
        Self::new(ClassTag::A, rank).expect("rank >= 1")
    }
    pub fn b(rank: usize) -> Self {
        Self::new(ClassTag::B, rank).expect("rank >= 1")
    }
    pub fn c(rank: usize) -> Self {
        Self::new(ClassTag::C, rank).expect("rank >= 1")
    }
    pub fn d(rank: usize) -> Self {
        Self::new(ClassTag::D, rank).expect("rank >= 1")
    }

    /// Size of the ambient square matrices: `n`, `2n+1`, `2n`, `2n`.
    pub fn ambient_dim(&self) -> usize {
        match self.tag {
            ClassTag::A => self.rank,
            ClassTag::B => 2 * self.rank + 1,
            ClassTag::C | ClassTag::D => 2 * self.rank,
        }
    }

    /// Number of levels of the interlaced point process.
    pub fn level_count(&self) -> usize {
        let n = self.rank;
        match self.tag {
            ClassTag::A | ClassTag::C => n,
            ClassTag::B => 2 * n,
            ClassTag::D => 2 * n - 1,
        }
    }

    /// Number of points at level `r` (1-based).
    pub fn points_at_level(&self, r: usize) -> Result<usize> {
        self.check_level(r)?;
        Ok(match self.tag {
            ClassTag::A | ClassTag::C => r,
            ClassTag::B | ClassTag::D => r.div_ceil(2),
        })
    }

    pub fn total_points(&self) -> usize {
        (1..=self.level_count())
            .map(|r| self.points_at_level(r).unwrap_or(0))
            .sum()
    }

    pub fn check_level(&self, r: usize) -> Result<()> {
        if r == 0 || r > self.level_count() {
            return Err(Error::Domain(format!(
                "level {r} out of range 1..={} for class {}{}",
                self.level_count(),
                self.tag,
                self.rank
            )));
        }
        Ok(())
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tag, self.rank)
    }
}
