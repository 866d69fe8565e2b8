use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Heap entry. Pops lowest `f`, then highest `g`, then lowest index (the
/// storage order is lexicographic in `(i, j, k)`).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Entry {
    pub f: f64,
    pub g: f64,
    pub idx: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Binary heap with lazy deletion; callers skip stale entries on pop.
#[derive(Default)]
pub(crate) struct OpenList {
    heap: BinaryHeap<Entry>,
}

impl OpenList {
    pub fn push(&mut self, f: f64, g: f64, idx: usize) {
        self.heap.push(Entry { f, g, idx: idx as u32 });
    }

    pub fn pop(&mut self) -> Option<Entry> {
        self.heap.pop()
    }
}
