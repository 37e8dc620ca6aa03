//! Strided mapping from logical indices to buffer positions.

use crate::error::{Error, Result};
use crate::variable::Dims;

/// Logical dims of a (possibly sliced or transposed) window into a
/// row-major buffer, with per-dim strides and a base offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    dims: Dims,
    strides: Vec<usize>,
    offset: usize,
}

pub(crate) fn contiguous_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![0; shape.len()];
    let mut acc = 1;
    for (s, &n) in strides.iter_mut().zip(shape).rev() {
        *s = acc;
        acc *= n;
    }
    strides
}

impl Layout {
    pub fn contiguous(dims: Dims) -> Layout {
        let strides = contiguous_strides(dims.shape());
        Layout { dims, strides, offset: 0 }
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn volume(&self) -> usize {
        self.dims.volume()
    }

    /// True when elements occupy `offset..offset + volume` in row-major order.
    pub fn is_contiguous(&self) -> bool {
        self.dims
            .shape()
            .iter()
            .zip(self.strides.iter().zip(contiguous_strides(self.dims.shape())))
            .all(|(&n, (&s, c))| n <= 1 || s == c)
    }

    pub fn position(&self, index: &[usize]) -> usize {
        self.offset + index.iter().zip(&self.strides).map(|(i, s)| i * s).sum::<usize>()
    }

    pub fn slice_point(&self, dim: &str, index: usize) -> Result<Layout> {
        let d = self.dims.require(dim)?;
        let extent = self.dims.shape()[d];
        if index >= extent {
            return Err(Error::Bounds(format!(
                "index {index} out of range for dimension '{dim}' of extent {extent}"
            )));
        }
        let mut out = self.clone();
        out.offset += index * self.strides[d];
        out.dims.remove(d);
        out.strides.remove(d);
        Ok(out)
    }

    pub fn slice_range(&self, dim: &str, begin: usize, end: usize) -> Result<Layout> {
        let d = self.dims.require(dim)?;
        let extent = self.dims.shape()[d];
        if begin > end || end > extent {
            return Err(Error::Bounds(format!(
                "range {begin}..{end} invalid for dimension '{dim}' of extent {extent}"
            )));
        }
        let mut out = self.clone();
        if end > begin {
            out.offset += begin * self.strides[d];
        }
        out.dims.set_extent(d, end - begin);
        Ok(out)
    }

    pub fn transpose(&self, order: &[&str]) -> Result<Layout> {
        let not_perm =
            || Error::Dims(format!("{order:?} is not a permutation of the labels of {}", self.dims));
        if order.len() != self.dims.rank() {
            return Err(not_perm());
        }
        let mut dims = Dims::scalar();
        let mut strides = Vec::with_capacity(order.len());
        for label in order {
            let i = self.dims.index_of(label).ok_or_else(not_perm)?;
            dims.push(*label, self.dims.shape()[i]).map_err(|_| not_perm())?;
            strides.push(self.strides[i]);
        }
        Ok(Layout { dims, strides, offset: self.offset })
    }

    /// Buffer positions of all elements in logical row-major order.
    pub fn positions(&self) -> Positions<'_> {
        Positions::new(self.dims.shape(), &self.strides, self.offset)
    }
}

/// Iterator over buffer positions of a strided layout.
pub struct Positions<'a> {
    shape: &'a [usize],
    strides: &'a [usize],
    index: Vec<usize>,
    next: usize,
    remaining: usize,
}

impl<'a> Positions<'a> {
    pub(crate) fn new(shape: &'a [usize], strides: &'a [usize], offset: usize) -> Self {
        Positions {
            shape,
            strides,
            index: vec![0; shape.len()],
            next: offset,
            remaining: shape.iter().product(),
        }
    }
}

impl Iterator for Positions<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        let current = self.next;
        self.remaining -= 1;
        if self.remaining > 0 {
            for d in (0..self.shape.len()).rev() {
                self.index[d] += 1;
                self.next += self.strides[d];
                if self.index[d] < self.shape[d] {
                    break;
                }
                self.next -= self.strides[d] * self.shape[d];
                self.index[d] = 0;
            }
        }
        Some(current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Positions<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(dims: &[(&str, usize)]) -> Layout {
        Layout::contiguous(Dims::new(dims.iter().copied()).unwrap())
    }

    #[test]
    fn positions_follow_row_major_order() {
        let l = layout(&[("x", 2), ("y", 3)]);
        assert_eq!(l.positions().collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        let t = l.transpose(&["y", "x"]).unwrap();
        assert_eq!(t.positions().collect::<Vec<_>>(), vec![0, 3, 1, 4, 2, 5]);
    }

    #[test]
    fn slicing() {
        let l = layout(&[("x", 3), ("y", 2)]);
        let row = l.slice_point("x", 1).unwrap();
        assert_eq!(row.positions().collect::<Vec<_>>(), vec![2, 3]);
        let cols = l.slice_range("y", 1, 2).unwrap();
        assert_eq!(cols.positions().collect::<Vec<_>>(), vec![1, 3, 5]);
        assert!(!cols.is_contiguous());
        assert!(matches!(l.slice_point("x", 3), Err(Error::Bounds(_))));
        assert!(matches!(l.slice_point("q", 0), Err(Error::Dims(_))));
        assert!(matches!(l.slice_range("x", 2, 1), Err(Error::Bounds(_))));
        assert_eq!(l.slice_range("x", 3, 3).unwrap().positions().count(), 0);
    }

    #[test]
    fn zero_dim_has_one_position() {
        let l = layout(&[]);
        assert_eq!(l.positions().collect::<Vec<_>>(), vec![0]);
        let empty = layout(&[("x", 0), ("y", 2)]);
        assert_eq!(empty.positions().count(), 0);
    }
}
