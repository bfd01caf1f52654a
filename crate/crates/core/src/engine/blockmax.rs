use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maxima of consecutive blocks of `k` events over the global event range
/// [start, end). Blocks are aligned on multiples of `k`; the partial blocks
/// at either end are kept so that adjacent segments can be joined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMaxSegment {
    pub k: u64,
    pub start: u64,
    pub end: u64,
    /// Maximum over [start, first boundary) when start is not aligned, or
    /// over the whole segment when it lies inside a single block.
    pub head: Option<f64>,
    /// Maxima of the complete blocks, in event order.
    pub maxima: Vec<f64>,
    /// Maximum over [last boundary, end).
    pub tail: Option<f64>,
}

impl BlockMaxSegment {
    pub fn empty(k: u64, at: u64) -> Self {
        Self {
            k,
            start: at,
            end: at,
            head: None,
            maxima: Vec::new(),
            tail: None,
        }
    }

    fn boundaries(k: u64, start: u64, end: u64) -> (u64, u64) {
        (start.div_ceil(k) * k, end / k * k)
    }

    /// (block id, maximum) for every block touched, in order.
    fn pieces(&self) -> Vec<(u64, f64)> {
        if self.start == self.end {
            return Vec::new();
        }
        let k = self.k;
        let (fb, lb) = Self::boundaries(k, self.start, self.end);
        let mut out = Vec::with_capacity(self.maxima.len() + 2);
        if fb > lb {
            out.push((
                self.start / k,
                self.head.expect("segment inside one block has a head"),
            ));
            return out;
        }
        if let Some(h) = self.head {
            out.push((self.start / k, h));
        }
        out.extend(
            self.maxima
                .iter()
                .enumerate()
                .map(|(i, &m)| (fb / k + i as u64, m)),
        );
        if let Some(t) = self.tail {
            out.push((lb / k, t));
        }
        out
    }

    fn from_pieces(k: u64, start: u64, end: u64, pieces: &[(u64, f64)]) -> Self {
        let mut seg = Self::empty(k, start);
        seg.end = end;
        if start == end {
            return seg;
        }
        let (fb, lb) = Self::boundaries(k, start, end);
        if fb > lb {
            seg.head = Some(pieces[0].1);
            return seg;
        }
        for &(id, m) in pieces {
            let lo = id * k;
            if lo < start {
                seg.head = Some(m);
            } else if lo + k > end {
                seg.tail = Some(m);
            } else {
                seg.maxima.push(m);
            }
        }
        seg
    }

    /// Builds a segment from `values`, the first of which is global event `start`.
    pub fn from_values(k: u64, start: u64, values: &[f64]) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!(
                "block size must be at least 2, got {k}"
            )));
        }
        let mut acc = BlockMaxAccum::new(k, start);
        for &v in values {
            acc.push(v);
        }
        Ok(acc.finish())
    }

    /// Joins two adjacent segments (`self` first).
    pub fn join(&self, next: &BlockMaxSegment) -> Result<Self> {
        if self.k != next.k {
            return Err(Error::ShapeMismatch(format!(
                "block sizes {} and {}",
                self.k, next.k
            )));
        }
        if self.start == self.end {
            return Ok(next.clone());
        }
        if next.start == next.end {
            return Ok(self.clone());
        }
        if self.end != next.start {
            return Err(Error::ShapeMismatch(format!(
                "segments [{}, {}) and [{}, {}) are not adjacent",
                self.start, self.end, next.start, next.end
            )));
        }
        let mut pieces = self.pieces();
        for (id, m) in next.pieces() {
            match pieces.last_mut() {
                Some(last) if last.0 == id => last.1 = last.1.max(m),
                _ => pieces.push((id, m)),
            }
        }
        Ok(Self::from_pieces(self.k, self.start, next.end, &pieces))
    }

    /// Number of events in the incomplete end blocks.
    pub fn discarded(&self) -> u64 {
        self.end - self.start - self.k * self.maxima.len() as u64
    }
}

/// Streaming builder for [`BlockMaxSegment`].
#[derive(Debug, Clone)]
pub(crate) struct BlockMaxAccum {
    k: u64,
    start: u64,
    next: u64,
    current: Option<(u64, f64)>,
    pieces: Vec<(u64, f64)>,
}

impl BlockMaxAccum {
    pub fn new(k: u64, start: u64) -> Self {
        Self {
            k,
            start,
            next: start,
            current: None,
            pieces: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let id = self.next / self.k;
        self.next += 1;
        match &mut self.current {
            Some((cid, m)) if *cid == id => {
                if x > *m {
                    *m = x;
                }
            }
            cur => {
                if let Some(p) = cur.take() {
                    self.pieces.push(p);
                }
                *cur = Some((id, x));
            }
        }
    }

    pub fn finish(mut self) -> BlockMaxSegment {
        if let Some(p) = self.current.take() {
            self.pieces.push(p);
        }
        BlockMaxSegment::from_pieces(self.k, self.start, self.next, &self.pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_to_ten_in_blocks_of_five() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = BlockMaxSegment::from_values(5, 0, &v).unwrap();
        assert_eq!(s.maxima, vec![5.0, 10.0]);
        assert_eq!(s.discarded(), 0);
        let s = BlockMaxSegment::from_values(10, 0, &v).unwrap();
        assert_eq!(s.maxima, vec![10.0]);
        let s = BlockMaxSegment::from_values(4, 0, &v).unwrap();
        assert_eq!(s.maxima, vec![4.0, 8.0]);
        assert_eq!(s.discarded(), 2);
        assert!(BlockMaxSegment::from_values(1, 0, &v).is_err());
    }

    #[test]
    fn constant_stream() {
        let s = BlockMaxSegment::from_values(3, 0, &[2.5; 12]).unwrap();
        assert!(s.maxima.iter().all(|&m| m == 2.5));
        assert_eq!(s.maxima.len(), 4);
    }

    #[test]
    fn non_adjacent_join_fails() {
        let a = BlockMaxSegment::from_values(3, 0, &[1.0; 4]).unwrap();
        let b = BlockMaxSegment::from_values(3, 5, &[1.0; 4]).unwrap();
        assert!(a.join(&b).is_err());
    }

    proptest! {
        #[test]
        fn joining_split_streams_matches_whole(
            xs in prop::collection::vec(0.0f64..100.0, 0..80),
            k in 2u64..9,
            offset in 0u64..20,
            c1 in 0usize..80,
            c2 in 0usize..80,
        ) {
            let (c1, c2) = (c1.min(xs.len()), c2.min(xs.len()));
            let (c1, c2) = (c1.min(c2), c1.max(c2));
            let whole = BlockMaxSegment::from_values(k, offset, &xs).unwrap();
            let a = BlockMaxSegment::from_values(k, offset, &xs[..c1]).unwrap();
            let b = BlockMaxSegment::from_values(k, offset + c1 as u64, &xs[c1..c2]).unwrap();
            let c = BlockMaxSegment::from_values(k, offset + c2 as u64, &xs[c2..]).unwrap();
            let left = a.join(&b).unwrap().join(&c).unwrap();
            let right = a.join(&b.join(&c).unwrap()).unwrap();
            prop_assert_eq!(&left, &whole);
            prop_assert_eq!(&right, &whole);
            // every maximum dominates its block
            let fb = offset.div_ceil(k) * k;
            for (i, m) in whole.maxima.iter().enumerate() {
                let lo = (fb + i as u64 * k - offset) as usize;
                prop_assert!(xs[lo..lo + k as usize].iter().all(|x| x <= m));
            }
        }
    }
}
