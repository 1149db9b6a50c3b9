//! Permutations of a dense universe `0..n` with 1-based list positions.

use crate::error::{Error, Result};

/// Elements are dense integers `0..n-1`.
pub type ElementId = usize;

/// A bijection between elements and list positions `1..=n`.
///
/// Both direction maps are maintained so that position and element lookups
/// are O(1). Consistency of the two maps is asserted in debug builds after
/// every mutation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// element id -> 1-based position
    pos_of: Vec<usize>,
    /// 0-based list index -> element id
    elem_at: Vec<ElementId>,
}

impl Permutation {
    /// The identity list: element `i` sits at position `i + 1`.
    pub fn identity(n: usize) -> Self {
        Self {
            pos_of: (1..=n).collect(),
            elem_at: (0..n).collect(),
        }
    }

    /// Builds a permutation from its list order (`order[i]` is the element at
    /// position `i + 1`).
    pub fn from_order(order: &[ElementId]) -> Result<Self> {
        let n = order.len();
        let mut pos_of = vec![usize::MAX; n];
        for (idx, &e) in order.iter().enumerate() {
            if e >= n {
                return Err(Error::MalformedPermutation(format!(
                    "element {e} out of range for n = {n}"
                )));
            }
            if pos_of[e] != usize::MAX {
                return Err(Error::MalformedPermutation(format!(
                    "element {e} appears more than once"
                )));
            }
            pos_of[e] = idx + 1;
        }
        Ok(Self {
            pos_of,
            elem_at: order.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.elem_at.len()
    }

    /// 1-based position of `z`.
    pub fn position(&self, z: ElementId) -> Result<usize> {
        self.pos_of
            .get(z)
            .copied()
            .ok_or(Error::UnknownElement(z))
    }

    /// Element at 1-based position `pos`.
    pub fn element_at(&self, pos: usize) -> Result<ElementId> {
        if pos == 0 || pos > self.n() {
            return Err(Error::InvalidPosition(pos));
        }
        Ok(self.elem_at[pos - 1])
    }

    /// The list order, front to back.
    pub fn order(&self) -> &[ElementId] {
        &self.elem_at
    }

    /// Whether this and `other` range over the same universe.
    pub fn same_universe(&self, other: &Permutation) -> bool {
        self.n() == other.n()
    }

    /// Moves `z` to position 1 by adjacent swaps, shifting every element that
    /// preceded it back by one. Returns the swap count, `position(z) - 1`.
    pub fn move_to_front_in_place(&mut self, z: ElementId) -> Result<u64> {
        let pos = self.position(z)?;
        self.elem_at[..pos].rotate_right(1);
        for (idx, &e) in self.elem_at[..pos].iter().enumerate() {
            self.pos_of[e] = idx + 1;
        }
        debug_assert!(self.is_consistent());
        Ok((pos - 1) as u64)
    }

    /// Non-mutating variant of [`move_to_front_in_place`].
    ///
    /// [`move_to_front_in_place`]: Permutation::move_to_front_in_place
    pub fn move_to_front(&self, z: ElementId) -> Result<(Permutation, u64)> {
        let mut next = self.clone();
        let cost = next.move_to_front_in_place(z)?;
        Ok((next, cost))
    }

    /// Number of unordered pairs ordered differently by `self` and `other`;
    /// equals the minimum number of adjacent swaps turning one into the other.
    ///
    /// Merge-sort based, O(n log n). [`inversion_distance_bruteforce`] is the
    /// quadratic reference kept for cross-checks.
    pub fn inversion_distance(&self, other: &Permutation) -> Result<u64> {
        if !self.same_universe(other) {
            return Err(Error::DomainMismatch);
        }
        // Walk self's list front to back and count inversions of the
        // corresponding positions in `other`.
        let mut seq: Vec<usize> = self.elem_at.iter().map(|&e| other.pos_of[e]).collect();
        let mut scratch = vec![0usize; seq.len()];
        Ok(count_inversions(&mut seq, &mut scratch))
    }

    fn is_consistent(&self) -> bool {
        self.pos_of.len() == self.elem_at.len()
            && self
                .elem_at
                .iter()
                .enumerate()
                .all(|(idx, &e)| e < self.n() && self.pos_of[e] == idx + 1)
    }
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Permutation{:?}", self.elem_at)
    }
}

/// O(n^2) pair-counting reference for [`Permutation::inversion_distance`].
pub fn inversion_distance_bruteforce(a: &Permutation, b: &Permutation) -> Result<u64> {
    if !a.same_universe(b) {
        return Err(Error::DomainMismatch);
    }
    let n = a.n();
    let mut count = 0u64;
    for x in 0..n {
        for y in x + 1..n {
            let ax = a.pos_of[x] < a.pos_of[y];
            let bx = b.pos_of[x] < b.pos_of[y];
            if ax != bx {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn count_inversions(seq: &mut [usize], scratch: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = seq.split_at_mut(mid);
    let mut inv = count_inversions(left, &mut scratch[..mid])
        + count_inversions(right, &mut scratch[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            scratch[k] = left[i];
            i += 1;
        } else {
            scratch[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    scratch[k..k + left.len() - i].copy_from_slice(&left[i..]);
    scratch[k + left.len() - i..n].copy_from_slice(&right[j..]);
    seq.copy_from_slice(&scratch[..n]);
    inv
}

/// Splits a 1-based position into `2^p + q` with `0 <= q < 2^p`.
///
/// The decomposition is unique: `p` is the floor of log2 of the position.
pub fn position_decompose(pos: usize) -> Result<(u32, usize)> {
    if pos == 0 {
        return Err(Error::InvalidPosition(pos));
    }
    let p = pos.ilog2();
    Ok((p, pos - (1usize << p)))
}
