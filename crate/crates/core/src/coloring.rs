use alloc::format;
use alloc::vec::Vec;

use crate::{Color, HatError, Result};

/// A hat assignment: one color in `0..q` per vertex.
///
/// Ordering is lexicographic on the value vector, which is the order every
/// exhaustive sweep uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring {
    values: Vec<Color>,
    q: Color,
}

impl Coloring {
    pub fn new(q: Color, values: Vec<Color>) -> Result<Self> {
        if q == 0 {
            return Err(HatError::invalid("q must be at least 1"));
        }
        if let Some((v, &c)) = values.iter().enumerate().find(|(_, &c)| c >= q) {
            return Err(HatError::invalid(format!("vertex {v} has color {c} >= q={q}")));
        }
        Ok(Coloring { values, q })
    }

    pub fn zeros(n: usize, q: Color) -> Self {
        Coloring {
            values: alloc::vec![0; n],
            q,
        }
    }

    /// The `index`-th coloring of `[0,q)^n` in lexicographic order (vertex 0
    /// is the most significant digit).
    pub fn from_index(mut index: u64, n: usize, q: Color) -> Self {
        let mut values = alloc::vec![0; n];
        for slot in values.iter_mut().rev() {
            *slot = (index % u64::from(q)) as Color;
            index /= u64::from(q);
        }
        Coloring { values, q }
    }

    pub fn q(&self) -> Color {
        self.q
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Color] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Color> {
        self.values
    }
}

impl core::ops::Index<usize> for Coloring {
    type Output = Color;

    fn index(&self, v: usize) -> &Color {
        &self.values[v]
    }
}

/// Odometer step: increments the last digit with carry. Returns `false`
/// after wrapping around from the all-`(q-1)` vector.
pub(crate) fn advance(values: &mut [Color], q: Color) -> bool {
    for slot in values.iter_mut().rev() {
        *slot += 1;
        if *slot < q {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Mixed-radix index of `digits` in base `q`, most significant first.
#[inline]
pub(crate) fn lex_index(digits: &[Color], q: Color) -> usize {
    digits.iter().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}
