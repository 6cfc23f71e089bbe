//! Regions: sets of coordinates of one table, stored as a dense bitset.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::table::Coordinate;

#[derive(Clone, PartialEq, Eq)]
pub struct Region {
    rows: usize,
    cols: usize,
    bits: FixedBitSet,
}

impl Region {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: FixedBitSet::with_capacity(rows * cols),
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut r = Self::empty(rows, cols);
        r.bits.insert_range(..);
        r
    }

    pub fn from_coords(rows: usize, cols: usize, coords: impl IntoIterator<Item = Coordinate>) -> Self {
        let mut r = Self::empty(rows, cols);
        for c in coords {
            r.insert(c);
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn index(&self, c: Coordinate) -> Option<usize> {
        (c.row >= 1 && c.row <= self.rows && c.col >= 1 && c.col <= self.cols)
            .then(|| (c.row - 1) * self.cols + c.col - 1)
    }

    pub fn contains(&self, c: Coordinate) -> bool {
        self.index(c).is_some_and(|i| self.bits.contains(i))
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    /// Panics if `c` lies outside the table.
    pub fn insert(&mut self, c: Coordinate) {
        let i = self.index(c).expect("coordinate outside the table");
        self.bits.insert(i);
    }

    pub fn insert_index(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Flat cell indices in table order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Coordinates in table order.
    pub fn iter(&self) -> impl Iterator<Item = Coordinate> + '_ {
        let cols = self.cols;
        self.bits.ones().map(move |i| Coordinate::new(i / cols + 1, i % cols + 1))
    }

    /// Nonempty rows of the region, each with its coordinates in order.
    pub fn by_row(&self) -> Vec<(usize, Vec<Coordinate>)> {
        let mut out: Vec<(usize, Vec<Coordinate>)> = Vec::new();
        for c in self.iter() {
            match out.last_mut() {
                Some((k, v)) if *k == c.row => v.push(c),
                _ => out.push((c.row, vec![c])),
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &Region) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &Region) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn complement(&mut self) {
        self.bits.toggle_range(..);
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| (c.row, c.col))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let mut a = Region::from_coords(2, 3, [Coordinate::new(1, 1), Coordinate::new(2, 3)]);
        let b = Region::from_coords(2, 3, [Coordinate::new(2, 3)]);
        assert!(b.is_subset(&a));
        a.complement();
        assert_eq!(a.len(), 4);
        a.union_with(&b);
        assert_eq!(a.len(), 5);
        assert!(!a.contains(Coordinate::new(1, 1)));
        assert!(!a.contains(Coordinate::new(3, 1)));
        assert_eq!(Region::full(2, 3).by_row().len(), 2);
    }
}
