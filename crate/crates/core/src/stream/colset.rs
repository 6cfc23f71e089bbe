//! Column sets carried from one row to the next: a few explicit columns plus
//! at most one right-open interval.

use crate::error::StreamError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnSet {
    /// Sorted, all below `open_from`.
    finite: Vec<usize>,
    open_from: Option<usize>,
}

impl ColumnSet {
    pub fn new(mut finite: Vec<usize>, open_from: Option<usize>) -> Self {
        finite.sort_unstable();
        finite.dedup();
        if let Some(c) = open_from {
            finite.retain(|&x| x < c);
        }
        Self { finite, open_from }
    }

    pub fn contains(&self, col: usize) -> bool {
        self.open_from.is_some_and(|c| col >= c) || self.finite.binary_search(&col).is_ok()
    }

    pub fn finite(&self) -> &[usize] {
        &self.finite
    }

    pub fn open_from(&self) -> Option<usize> {
        self.open_from
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.open_from.is_none()
    }

    /// Stored column numbers, the interval start included.
    pub fn size(&self) -> usize {
        self.finite.len() + usize::from(self.open_from.is_some())
    }
}

/// Builds a `ColumnSet` from one row of booleans given left to right.
///
/// A run of members that reaches the end of the row becomes the open
/// interval, so it costs one stored column however long it is.
#[derive(Debug, Clone)]
pub struct ColumnSetBuilder {
    finite: Vec<usize>,
    run_start: Option<usize>,
    last: usize,
    bound: usize,
    label: String,
}

impl ColumnSetBuilder {
    /// `bound` caps the finite part; `label` names the expression in errors.
    pub fn new(bound: usize, label: String) -> Self {
        Self {
            finite: Vec::new(),
            run_start: None,
            last: 0,
            bound,
            label,
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Records column `col`, which must follow the previous one.
    pub fn push(&mut self, col: usize, member: bool) -> Result<(), StreamError> {
        if col != self.last + 1 {
            return Err(StreamError::OutOfOrder(format!(
                "column {col} after column {}",
                self.last
            )));
        }
        self.last = col;
        match (member, self.run_start) {
            (true, None) => self.run_start = Some(col),
            (false, Some(s)) => {
                self.run_start = None;
                self.finite.extend(s..col);
                if self.finite.len() > self.bound {
                    return Err(StreamError::RepresentationOverflow {
                        expr: self.label.clone(),
                        bound: self.bound,
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Columns stored so far, the pending run counted as one.
    pub fn size(&self) -> usize {
        self.finite.len() + usize::from(self.run_start.is_some())
    }

    /// Closes the row and resets the builder for the next one.
    pub fn finish(&mut self) -> ColumnSet {
        let open_from = self.run_start.take();
        self.last = 0;
        ColumnSet {
            finite: std::mem::take(&mut self.finite),
            open_from,
        }
    }
}

/// `2^min(size, 24)`: the finite-part budget for an expression of that size.
pub fn finite_bound(size: usize) -> usize {
    1usize << size.min(24)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(bits: &[bool], bound: usize) -> Result<ColumnSet, StreamError> {
        let mut b = ColumnSetBuilder::new(bound, "x".into());
        for (i, &m) in bits.iter().enumerate() {
            b.push(i + 1, m)?;
        }
        Ok(b.finish())
    }

    #[test]
    fn trailing_run_is_open() {
        let s = build(&[false, true, false, true, true, true], 4).unwrap();
        assert_eq!(s.finite(), &[2]);
        assert_eq!(s.open_from(), Some(4));
        assert!(s.contains(4) && s.contains(100) && s.contains(2));
        assert!(!s.contains(3) && !s.contains(1));
        assert_eq!(s.size(), 2);
    }

    #[test]
    fn all_true_is_one_interval() {
        let s = build(&[true; 50], 1).unwrap();
        assert_eq!(s, ColumnSet::new(vec![], Some(1)));
    }

    #[test]
    fn overflow_is_reported() {
        let bits: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        assert!(matches!(
            build(&bits, 3),
            Err(StreamError::RepresentationOverflow { bound: 3, .. })
        ));
    }

    #[test]
    fn normalizes() {
        let s = ColumnSet::new(vec![5, 1, 7, 1], Some(6));
        assert_eq!(s.finite(), &[1, 5]);
        assert_eq!(finite_bound(3), 8);
        assert_eq!(finite_bound(100), 1 << 24);
    }
}
