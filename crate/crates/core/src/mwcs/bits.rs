/// Fixed-width bitsets over matrix cells, stored back to back in one buffer.
pub(super) struct CellSets {
    words: usize,
    data: Vec<u64>,
}

impl CellSets {
    pub fn new(sets: usize, cells: usize) -> Self {
        let words = cells.div_ceil(64).max(1);
        Self {
            words,
            data: vec![0; sets * words],
        }
    }

    #[inline]
    pub fn set(&self, k: usize) -> &[u64] {
        &self.data[k * self.words..(k + 1) * self.words]
    }

    #[inline]
    pub fn insert(&mut self, k: usize, cell: usize) {
        self.data[k * self.words + cell / 64] |= 1 << (cell % 64);
    }

    pub fn copy(&mut self, from: usize, to: usize) {
        let w = self.words;
        self.data.copy_within(from * w..(from + 1) * w, to * w);
    }

    pub fn union_into(&mut self, a: usize, b: usize, to: usize) {
        let w = self.words;
        for i in 0..w {
            self.data[to * w + i] = self.data[a * w + i] | self.data[b * w + i];
        }
    }

    /// Sum and count of the cells in both `a` and `b`.
    pub fn intersection_sum(&self, a: usize, b: usize, scores: &[f64]) -> (f64, usize) {
        let (sa, sb) = (self.set(a), self.set(b));
        let mut sum = 0.0;
        let mut count = 0;
        for (i, (x, y)) in sa.iter().zip(sb).enumerate() {
            let mut m = x & y;
            while m != 0 {
                let bit = m.trailing_zeros() as usize;
                sum += scores[i * 64 + bit];
                count += 1;
                m &= m - 1;
            }
        }
        (sum, count)
    }

    pub fn members(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.set(k).iter().enumerate() {
            let mut m = w;
            while m != 0 {
                out.push(i * 64 + m.trailing_zeros() as usize);
                m &= m - 1;
            }
        }
        out
    }
}

/// Lexicographic order of two ascending member lists given as bitsets.
pub(super) fn lex_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    // The first differing bit decides: whoever owns the smaller cell sorts first.
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            let bit = diff & diff.wrapping_neg();
            return if x & bit != 0 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            };
        }
    }
    std::cmp::Ordering::Equal
}
