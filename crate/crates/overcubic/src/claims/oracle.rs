//! Brute-force combinatorial oracle for small bt(n).
//!
//! Counts overcubic partitions by direct recursion over the decorated
//! objects themselves — no series arithmetic is involved, so this is an
//! independent cross-check of the eta-quotient route. An overcubic
//! partition uses odd parts in one copy and even parts in two colors,
//! and the first occurrence of each distinct (colored) part may be
//! overlined.
//!
//! Only intended for small `n` (the recursion visits every decorated
//! multiset once).

/// Number of overcubic partitions of each `0..=n`.
pub fn overcubic_counts(n: usize) -> Vec<u64> {
    // Colored part sizes: odd values once, even values twice.
    let mut sizes = Vec::new();
    for v in 1..=n.max(1) {
        sizes.push(v);
        if v % 2 == 0 {
            sizes.push(v);
        }
    }

    // Walk multisets over the colored sizes; a used size contributes a
    // factor 2 for the overline choice on its first occurrence.
    fn walk(sizes: &[usize], idx: usize, rem: usize) -> u64 {
        if rem == 0 {
            return 1;
        }
        if idx == sizes.len() {
            return 0;
        }
        let mut total = walk(sizes, idx + 1, rem);
        let v = sizes[idx];
        let mut used = v;
        while used <= rem {
            total += 2 * walk(sizes, idx + 1, rem - used);
            used += v;
        }
        total
    }

    (0..=n).map(|k| walk(&sizes, 0, k)).collect()
}

/// Number of overcubic partition triples of each `0..=n`: the threefold
/// convolution of [`overcubic_counts`].
pub fn bt_counts(n: usize) -> Vec<u64> {
    let single = overcubic_counts(n);
    let mut pair = vec![0u64; n + 1];
    for i in 0..=n {
        for j in 0..=(n - i) {
            pair[i + j] += single[i] * single[j];
        }
    }
    let mut triple = vec![0u64; n + 1];
    for i in 0..=n {
        for j in 0..=(n - i) {
            triple[i + j] += pair[i] * single[j];
        }
    }
    triple
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_counts_by_hand() {
        // n=1: {1}, {overlined 1}. n=2: 2_b, 2_r (each overlined or not)
        // and 1+1 with the first 1 optionally overlined.
        let c = overcubic_counts(3);
        assert_eq!(c[0], 1);
        assert_eq!(c[1], 2);
        assert_eq!(c[2], 6);
    }

    #[test]
    fn triples_by_hand() {
        let bt = bt_counts(2);
        // Empty triple; one component holds a partition of 1 (3 slots x
        // 2 decorations); for 2: one component holds 2 (3 x 6) or two
        // components hold 1 each (3 pairs x 2 x 2).
        assert_eq!(bt[0], 1);
        assert_eq!(bt[1], 6);
        assert_eq!(bt[2], 30);
    }
}
