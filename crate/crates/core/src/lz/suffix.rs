//! Suffix array, LCP array and a range-minimum table over it.

/// Suffix array by prefix doubling. `text` may use any `u32` alphabet.
pub(crate) fn suffix_array(text: &[u32]) -> Vec<usize> {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    if n <= 1 {
        return sa;
    }

    // Initial ranks: dense relabeling of the symbols.
    let mut sorted: Vec<u32> = text.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rank: Vec<u64> = text
        .iter()
        .map(|s| sorted.binary_search(s).unwrap() as u64)
        .collect();
    let mut tmp = vec![0u64; n];
    let mut keys = vec![0u64; n];

    let mut k = 1;
    loop {
        // Rank of the second half is shifted by one so "past the end" sorts first.
        for i in 0..n {
            let second = if i + k < n { rank[i + k] + 1 } else { 0 };
            keys[i] = (rank[i] << 32) | second;
        }
        sa.sort_unstable_by_key(|&i| keys[i]);

        tmp[sa[0]] = 0;
        for w in 1..n {
            let bump = (keys[sa[w]] != keys[sa[w - 1]]) as u64;
            tmp[sa[w]] = tmp[sa[w - 1]] + bump;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] as usize == n - 1 || k >= n {
            break;
        }
        k *= 2;
    }
    sa
}

/// Kasai's algorithm. `lcp[r]` is the common prefix length of the suffixes at
/// ranks `r - 1` and `r`; `lcp[0] = 0`.
pub(crate) fn lcp_array(text: &[u32], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i];
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1];
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h;
        h = h.saturating_sub(1);
    }
    lcp
}

/// Sparse table answering range minimum queries in O(1).
pub(crate) struct RangeMin {
    levels: Vec<Vec<usize>>,
}

impl RangeMin {
    pub(crate) fn new(values: Vec<usize>) -> Self {
        let n = values.len();
        let mut levels = vec![values];
        let mut width = 1;
        while 2 * width <= n {
            let prev = levels.last().unwrap();
            let next = (0..=n - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Minimum over the inclusive range `lo..=hi`.
    pub(crate) fn min(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let len = hi - lo + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let row = &self.levels[level];
        row[lo].min(row[hi + 1 - (1 << level)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_sa(text: &[u32]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..text.len()).collect();
        sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        sa
    }

    #[test]
    fn matches_naive_sort() {
        let texts: [&[u32]; 5] = [
            &[0, 0, 0, 0, 0],
            &[0, 1, 0, 1, 0, 1],
            &[3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5],
            &[7],
            &[2, 2, 1, 2, 2, 1, 2, 2, 1, 0],
        ];
        for t in texts {
            assert_eq!(suffix_array(t), naive_sa(t), "{t:?}");
        }
    }

    #[test]
    fn lcp_and_rmq() {
        let t = [1u32, 0, 1, 0, 1];
        let sa = suffix_array(&t);
        let mut rank = vec![0; t.len()];
        for (r, &i) in sa.iter().enumerate() {
            rank[i] = r;
        }
        let lcp = lcp_array(&t, &sa, &rank);
        // suffixes in order: 0 1 | 0 1 0 1 | 1 | 1 0 1 | 1 0 1 0 1
        assert_eq!(sa, vec![3, 1, 4, 2, 0]);
        assert_eq!(lcp, vec![0, 2, 0, 1, 3]);
        let rm = RangeMin::new(lcp);
        assert_eq!(rm.min(1, 1), 2);
        assert_eq!(rm.min(3, 4), 1);
        assert_eq!(rm.min(1, 4), 0);
    }
}
