//! Main minors, radial parts, minor sequences and the interlaced point
//! configurations built from them.

use nalgebra::DMatrix;

use crate::class::{ClassTag, MatrixClass};
use crate::ensembles::{StructuredHermitian, STRUCTURE_TOL};
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_eigenvalues, pfaffian_sign};

/// A point of the closed Weyl chamber of `class`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPart {
    pub class: MatrixClass,
    pub values: Vec<f64>,
}

/// Class of the top-left `m x m` block of a matrix of class `parent`.
pub fn minor_class(parent: MatrixClass, m: usize) -> Result<MatrixClass> {
    let dim = parent.ambient_dim();
    if m == 0 || m > dim {
        return Err(Error::Domain(format!(
            "minor order {m} outside 1..={dim} for class {parent}"
        )));
    }
    match parent.tag {
        ClassTag::A => MatrixClass::new(ClassTag::A, m),
        ClassTag::B | ClassTag::D => {
            if m == 1 {
                Ok(MatrixClass::trivial_b())
            } else if m % 2 == 1 {
                MatrixClass::new(ClassTag::B, (m - 1) / 2)
            } else {
                MatrixClass::new(ClassTag::D, m / 2)
            }
        }
        ClassTag::C => {
            if m % 2 == 1 {
                Err(Error::Domain(format!(
                    "odd minor order {m} of a class C matrix is not classical"
                )))
            } else {
                MatrixClass::new(ClassTag::C, m / 2)
            }
        }
    }
}

/// The top-left `m x m` submatrix with its inherited class.
pub fn main_minor(h: &StructuredHermitian, m: usize) -> Result<StructuredHermitian> {
    let class = minor_class(h.class(), m)?;
    let sub = h.matrix().view((0, 0), (m, m)).into_owned();
    Ok(StructuredHermitian::new_unchecked(class, sub))
}

/// Radial part: eigenvalues for A, positive eigenvalues for B and C, and for
/// D the magnitudes with the sign of the last entry fixed by the Pfaffian.
pub fn radial_part(h: &StructuredHermitian) -> Result<RadialPart> {
    h.validate(STRUCTURE_TOL)?;
    radial_part_unchecked(h)
}

pub(crate) fn radial_part_unchecked(h: &StructuredHermitian) -> Result<RadialPart> {
    let class = h.class();
    let n = class.rank;
    if n == 0 {
        return Ok(RadialPart { class, values: Vec::new() });
    }
    let eig = hermitian_eigenvalues(h.matrix())?;
    let values = match class.tag {
        ClassTag::A => eig,
        ClassTag::B | ClassTag::C => eig[..n].iter().map(|v| v.max(0.0)).collect(),
        ClassTag::D => {
            let mut v: Vec<f64> = eig[..n].iter().map(|v| v.max(0.0)).collect();
            // D(x) has Pf(-i D(x)) = (-1)^n prod x_k
            let m = h.matrix();
            let a = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im);
            let s = pfaffian_sign(&a)?;
            let parity = if n.is_multiple_of(2) { 1 } else { -1 };
            if s * parity < 0 {
                v[n - 1] = -v[n - 1];
            }
            v
        }
    };
    Ok(RadialPart { class, values })
}

/// Orders of the main minors entering the minor sequence of `class`.
pub fn minor_orders(class: MatrixClass) -> Vec<usize> {
    let n = class.rank;
    match class.tag {
        ClassTag::A => (1..=n).collect(),
        ClassTag::B => (2..=2 * n + 1).collect(),
        ClassTag::C => (1..=n).map(|i| 2 * i).collect(),
        ClassTag::D => (2..=2 * n).collect(),
    }
}

/// Radial parts of the main minors, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorSequence {
    pub class: MatrixClass,
    /// `(order, radial part)` pairs.
    pub parts: Vec<(usize, RadialPart)>,
}

impl MinorSequence {
    pub fn part(&self, order: usize) -> Option<&RadialPart> {
        self.parts.iter().find(|(o, _)| *o == order).map(|(_, p)| p)
    }
}

pub fn minor_sequence(h: &StructuredHermitian) -> Result<MinorSequence> {
    h.validate(STRUCTURE_TOL)?;
    minor_sequence_unchecked(h)
}

/// As [`minor_sequence`] without the structural check; used in hot sampling loops
/// on matrices that are valid by construction.
pub(crate) fn minor_sequence_unchecked(h: &StructuredHermitian) -> Result<MinorSequence> {
    let class = h.class();
    let parts = minor_orders(class)
        .into_iter()
        .map(|m| Ok((m, radial_part_unchecked(&main_minor(h, m)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinorSequence { class, parts })
}

/// One realisation of the interlaced point process: `levels[r - 1]` holds
/// the locations at level `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    pub class: MatrixClass,
    pub levels: Vec<Vec<f64>>,
}

impl PointConfiguration {
    pub fn level(&self, r: usize) -> &[f64] {
        &self.levels[r - 1]
    }

    /// All `(level, location)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.iter().map(move |&y| (i + 1, y)))
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn to_point_configuration(seq: &MinorSequence) -> Result<PointConfiguration> {
    let class = seq.class;
    let part = |order: usize| {
        seq.part(order).ok_or_else(|| {
            Error::Structural(format!("minor sequence lacks order {order}"))
        })
    };
    let abs = |v: &[f64]| v.iter().map(|x| x.abs()).collect::<Vec<_>>();
    let levels = match class.tag {
        ClassTag::A => (1..=class.rank)
            .map(|i| part(i).map(|p| p.values.clone()))
            .collect::<Result<Vec<_>>>()?,
        ClassTag::C => (1..=class.rank)
            .map(|i| part(2 * i).map(|p| p.values.clone()))
            .collect::<Result<Vec<_>>>()?,
        ClassTag::B | ClassTag::D => (1..=class.level_count())
            .map(|i| part(i + 1).map(|p| abs(&p.values)))
            .collect::<Result<Vec<_>>>()?,
    };
    for (i, l) in levels.iter().enumerate() {
        let want = class.points_at_level(i + 1)?;
        if l.len() != want {
            return Err(Error::Structural(format!(
                "level {} has {} points, class {class} needs {want}",
                i + 1,
                l.len()
            )));
        }
    }
    Ok(PointConfiguration { class, levels })
}
