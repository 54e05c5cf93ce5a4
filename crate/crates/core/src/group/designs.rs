//! Stage designs for group screening: the smallest Plackett–Burman design
//! for main effects, and resolution V regular fractions for interactions.

use crate::design::Design;
use crate::error::{Error, Result};
use crate::factorial::{full_factorial, plackett_burman, regular_fraction, DefiningWordSet, Word};

/// Smallest Plackett–Burman design (n = 4, 8, 12, …) with at least
/// `min_runs` runs and `m` columns, truncated to its first m columns.
pub fn smallest_pb(m: usize, min_runs: usize) -> Result<Design> {
    let mut n = 4;
    while n <= 4096 {
        if n >= min_runs.max(m + 1) {
            if let Ok(pb) = plackett_burman(n) {
                return pb.select_columns(&(0..m).collect::<Vec<_>>());
            }
        }
        n += 4;
    }
    Err(Error::ConstructionUnavailable { order: m + 1, supported: "plackett-burman up to 4096 runs".into() })
}

const SEARCH_NODES: usize = 200_000;

/// Regular two-level design of resolution at least V in m variables: the
/// full factorial for m ≤ 4, otherwise the smallest base found by a bounded
/// depth-first search over generators of length at least four.
pub fn resolution_v(m: usize) -> Result<Design> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    if m <= 4 {
        return full_factorial(m);
    }
    for k in 4..m {
        if let Some(gens) = search_generators(k, m - k) {
            let words: Vec<Word> = gens
                .iter()
                .enumerate()
                .map(|(i, g)| Word(g | 1 << (k + i)))
                .collect();
            let set = DefiningWordSet::new(m, words, None)?;
            debug_assert!(set.resolution() >= 5);
            return Ok(regular_fraction(&set)?.0);
        }
    }
    full_factorial(m)
}

fn search_generators(k: usize, q: usize) -> Option<Vec<u64>> {
    let candidates: Vec<u64> = {
        let mut c: Vec<u64> = (1u64..1 << k).filter(|w| w.count_ones() >= 4).collect();
        c.sort_by_key(|w| (w.count_ones(), *w));
        c
    };
    let mut chosen: Vec<u64> = Vec::new();
    // Relation words over the full variable set, excluding the identity.
    let mut relation: Vec<u64> = Vec::new();
    let mut nodes = 0usize;
    fn dfs(
        k: usize,
        q: usize,
        start: usize,
        candidates: &[u64],
        chosen: &mut Vec<u64>,
        relation: &mut Vec<u64>,
        nodes: &mut usize,
    ) -> bool {
        if chosen.len() == q {
            return true;
        }
        for (idx, &c) in candidates.iter().enumerate().skip(start) {
            *nodes += 1;
            if *nodes > SEARCH_NODES {
                return false;
            }
            let word = c | 1 << (k + chosen.len());
            if word.count_ones() < 5 || relation.iter().any(|r| (r ^ word).count_ones() < 5) {
                continue;
            }
            let added: Vec<u64> = std::iter::once(word).chain(relation.iter().map(|r| r ^ word)).collect();
            let before = relation.len();
            relation.extend(added);
            chosen.push(c);
            if dfs(k, q, idx + 1, candidates, chosen, relation, nodes) {
                return true;
            }
            chosen.pop();
            relation.truncate(before);
        }
        false
    }
    dfs(k, q, 0, &candidates, &mut chosen, &mut relation, &mut nodes).then_some(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{build_model_matrix, least_squares, TermSet};

    #[test]
    fn smallest_pb_sizes() {
        assert_eq!(smallest_pb(4, 0).unwrap().n(), 8);
        assert_eq!(smallest_pb(3, 0).unwrap().n(), 4);
        assert_eq!(smallest_pb(11, 0).unwrap().n(), 12);
        assert_eq!(smallest_pb(3, 5).unwrap().n(), 8);
    }

    #[test]
    fn resolution_v_supports_all_two_factor_interactions() {
        for m in [5, 6, 8] {
            let d = resolution_v(m).unwrap();
            let mm = build_model_matrix(&d, &TermSet::canonical(m, true, true, true, false)).unwrap();
            assert!(least_squares(&mm, &vec![0.0; d.n()]).is_ok(), "m={m}");
        }
        assert_eq!(resolution_v(5).unwrap().n(), 16);
        assert_eq!(resolution_v(6).unwrap().n(), 32);
    }
}
