//! Growable Fenwick tree over `u64` counts.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Default)]
pub struct Fenwick {
    raw: Vec<u64>,
    tree: Vec<u64>,
}

impl Fenwick {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    fn grow(&mut self, min_len: usize) {
        let new_len = min_len.next_power_of_two().max(16);
        self.raw.resize(new_len, 0);
        // rebuild in O(n)
        let mut tree = vec![0u64; new_len + 1];
        for (i, &v) in self.raw.iter().enumerate() {
            let j = i + 1;
            tree[j] += v;
            let parent = j + (j & j.wrapping_neg());
            if parent <= new_len {
                tree[parent] += tree[j];
            }
        }
        self.tree = tree;
    }

    pub fn add(&mut self, idx: usize, delta: u64) {
        if idx >= self.raw.len() {
            self.grow(idx + 1);
        }
        self.raw[idx] += delta;
        let mut j = idx + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of counts at indices `< idx`.
    pub fn prefix(&self, idx: usize) -> u64 {
        let mut j = idx.min(self.raw.len());
        let mut s = 0;
        while j > 0 {
            s += self.tree[j];
            j -= j & j.wrapping_neg();
        }
        s
    }

    pub fn get(&self, idx: usize) -> u64 {
        self.raw.get(idx).copied().unwrap_or(0)
    }
}
