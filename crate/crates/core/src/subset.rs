//! Lexicographically smallest subset search over a finite state machine.
//!
//! Items `0..n` are scanned in order; choosing item `i` in state `s` moves to
//! `step(i, s)` (or is forbidden when `step` returns `None`). A backward
//! reachability table then lets a greedy forward pass pick, at each point,
//! the smallest index that can still be completed to an accepting state.

struct BitTable {
    words: usize,
    bits: Vec<u64>,
}

impl BitTable {
    fn new(rows: usize, states: usize) -> Self {
        let words = states.div_ceil(64);
        BitTable { words, bits: vec![0; rows * words] }
    }

    fn get(&self, row: usize, state: usize) -> bool {
        self.bits[row * self.words + state / 64] >> (state % 64) & 1 == 1
    }

    fn set(&mut self, row: usize, state: usize) {
        self.bits[row * self.words + state / 64] |= 1 << (state % 64);
    }
}

/// Smallest sorted index list (in lexicographic order) driving `start` to an
/// accepting state, or `None` if no subset does.
pub(crate) fn lex_smallest<S, A>(n: usize, states: usize, start: usize, step: S, accept: A) -> Option<Vec<usize>>
where
    S: Fn(usize, usize) -> Option<usize>,
    A: Fn(usize) -> bool,
{
    let accepting: Vec<bool> = (0..states).map(&accept).collect();
    let mut can = BitTable::new(n + 1, states);
    for (state, &ok) in accepting.iter().enumerate() {
        if ok {
            can.set(n, state);
        }
    }
    for i in (0..n).rev() {
        for state in 0..states {
            let ok = accepting[state]
                || can.get(i + 1, state)
                || step(i, state).is_some_and(|next| can.get(i + 1, next));
            if ok {
                can.set(i, state);
            }
        }
    }
    if !can.get(0, start) {
        return None;
    }
    let mut chosen = Vec::new();
    let mut state = start;
    let mut i = 0;
    while !accepting[state] {
        let j = (i..n).find(|&j| step(j, state).is_some_and(|next| can.get(j + 1, next)))?;
        chosen.push(j);
        state = step(j, state).expect("checked above");
        i = j + 1;
    }
    Some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force lexicographic minimum over all subsets.
    fn brute(values: &[u64], p: u64) -> Option<Vec<usize>> {
        let n = values.len();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..1 << n {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if set.iter().map(|&i| values[i]).sum::<u64>() % p == 0 && best.as_ref().is_none_or(|b| set < *b) {
                best = Some(set);
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_on_nonempty_zero_sums() {
        let p = 7u64;
        let mut seed = 12345u64;
        for _ in 0..500 {
            let n = (seed % 9) as usize + 1;
            let values: Vec<u64> = (0..n)
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (seed >> 33) % p
                })
                .collect();
            // state = 2 * sum + nonempty
            let got = lex_smallest(
                n,
                2 * p as usize,
                0,
                |i, s| Some(2 * ((s / 2 + values[i] as usize) % p as usize) + 1),
                |s| s == 1,
            );
            assert_eq!(got, brute(&values, p), "{values:?}");
        }
    }
}
