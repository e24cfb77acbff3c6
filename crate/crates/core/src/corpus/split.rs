use num_rational::Ratio;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::{seed, Error, Result};

const SPLIT_NAMES: [&str; 3] = ["train", "dev", "test"];

/// Train/dev/test fractions, held as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Ratio<u64>,
    pub dev: Ratio<u64>,
    pub test: Ratio<u64>,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: Ratio<u64>, dev: Ratio<u64>, test: Ratio<u64>, seed: u64) -> Result<Self> {
        if train + dev + test != Ratio::from_integer(1) {
            return Err(Error::Config(format!(
                "split fractions {train} + {dev} + {test} do not sum to 1"
            )));
        }
        Ok(Self { train, dev, test, seed })
    }

    /// From integer proportions such as `29580:6336:6344`.
    pub fn from_proportions(parts: [u64; 3], seed: u64) -> Result<Self> {
        let total: u64 = parts.iter().sum();
        if total == 0 {
            return Err(Error::Config("split proportions are all zero".into()));
        }
        Self::new(
            Ratio::new(parts[0], total),
            Ratio::new(parts[1], total),
            Ratio::new(parts[2], total),
            seed,
        )
    }

    /// Parses `0.8,0.1,0.1`, `4/5,1/10,1/10` or `29580:6336:6344`.
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        if s.contains(':') {
            let parts = s
                .split(':')
                .map(|p| {
                    p.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("bad split proportion {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let parts: [u64; 3] = parts
                .try_into()
                .map_err(|_| Error::Config(format!("expected three proportions in {s:?}")))?;
            return Self::from_proportions(parts, seed);
        }
        let fracs = s.split(',').map(parse_fraction).collect::<Result<Vec<_>>>()?;
        let [train, dev, test]: [Ratio<u64>; 3] = fracs
            .try_into()
            .map_err(|_| Error::Config(format!("expected three fractions in {s:?}")))?;
        Self::new(train, dev, test, seed)
    }

    fn fractions(&self) -> [Ratio<u64>; 3] {
        [self.train, self.dev, self.test]
    }
}

/// Parses an exact decimal (`0.125`) or a fraction (`1/8`).
pub(crate) fn parse_fraction(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::Config(format!("bad fraction {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let den = 10u64.pow(frac.len() as u32);
    let num: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Ratio::from_integer(int) + Ratio::new(num, den))
}

/// Stratified, seeded three-way split.
///
/// Per-label quotas are `floor(n_label * fraction)` plus at most one extra
/// document per (label, split) cell; the extras are placed by a max-flow so
/// that every split total also stays within one document of its target.
pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus, Corpus)> {
    if corpus.is_empty() {
        return Err(Error::EmptySplit("input"));
    }
    let fracs = spec.fractions();
    let labels = corpus.labels();
    let members: Vec<Vec<usize>> = labels
        .iter()
        .map(|l| {
            corpus
                .documents()
                .iter()
                .enumerate()
                .filter(|(_, d)| &d.label == l)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let sizes: Vec<u64> = members.iter().map(|m| m.len() as u64).collect();
    let quotas = stratified_quotas(&sizes, &fracs);
    for (s, name) in SPLIT_NAMES.iter().enumerate() {
        if quotas.iter().map(|q| q[s]).sum::<u64>() == 0 {
            return Err(Error::EmptySplit(name));
        }
    }

    let mut rng = seed::rng(spec.seed);
    let mut which = vec![0usize; corpus.len()];
    for (ids, q) in members.into_iter().zip(&quotas) {
        let mut ids = ids;
        ids.shuffle(&mut rng);
        let mut it = ids.into_iter();
        for (s, &count) in q.iter().enumerate() {
            for i in it.by_ref().take(count as usize) {
                which[i] = s;
            }
        }
    }
    let part = |s: usize| corpus.subset(&which.iter().map(|&w| w == s).collect::<Vec<_>>());
    Ok((part(0), part(1), part(2)))
}

/// Integer matrix `[label][split]` with row sums equal to `sizes`, cells
/// within one of `size * fraction`, column sums within one of `N * fraction`.
pub(crate) fn stratified_quotas(sizes: &[u64], fracs: &[Ratio<u64>; 3]) -> Vec<[u64; 3]> {
    let total: u64 = sizes.iter().sum();
    let mut quotas: Vec<[u64; 3]> = sizes
        .iter()
        .map(|&n| fracs.map(|f| (Ratio::from_integer(n) * f).to_integer()))
        .collect();
    let row_need: Vec<u64> = sizes
        .iter()
        .zip(&quotas)
        .map(|(&n, q)| n - q.iter().sum::<u64>())
        .collect();
    let cell_open: Vec<[bool; 3]> = sizes
        .iter()
        .map(|&n| fracs.map(|f| !(Ratio::from_integer(n) * f).is_integer()))
        .collect();
    let placed: [u64; 3] = std::array::from_fn(|s| quotas.iter().map(|q| q[s]).sum());

    // Split totals are each floor or ceil of N f_s. Candidates are tried in
    // largest-remainder order; integrality of the bounded flow guarantees one
    // of them is feasible.
    let ideal: [Ratio<u64>; 3] = fracs.map(|f| Ratio::from_integer(total) * f);
    let floors: [u64; 3] = ideal.map(|r| r.to_integer());
    let short = total - floors.iter().sum::<u64>();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| ideal[b].fract().cmp(&ideal[a].fract()).then(a.cmp(&b)));
    let fractional: Vec<usize> = order.into_iter().filter(|&s| !ideal[s].is_integer()).collect();
    for bumped in combinations(&fractional, short as usize) {
        let mut cap = floors;
        for &s in &bumped {
            cap[s] += 1;
        }
        if (0..3).any(|s| cap[s] < placed[s]) {
            continue;
        }
        let col_cap: [u64; 3] = std::array::from_fn(|s| cap[s] - placed[s]);
        if let Some(extras) = bipartite_flow(&row_need, &col_cap, &cell_open) {
            for (q, e) in quotas.iter_mut().zip(extras) {
                for s in 0..3 {
                    q[s] += u64::from(e[s]);
                }
            }
            return quotas;
        }
    }
    unreachable!("stratified rounding always has a feasible completion")
}

/// k-subsets of `items`, in lexicographic order of positions.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with_first: Vec<Vec<usize>> = combinations(&items[1..], k - 1)
        .into_iter()
        .map(|mut c| {
            c.insert(0, items[0]);
            c
        })
        .collect();
    with_first.extend(combinations(&items[1..], k));
    with_first
}

/// Unit-capacity bipartite flow by augmenting paths; rows are visited in
/// order so the result is deterministic.
fn bipartite_flow(row_need: &[u64], col_cap: &[u64; 3], open: &[[bool; 3]]) -> Option<Vec<[bool; 3]>> {
    let rows = row_need.len();
    let mut used = vec![[false; 3]; rows];
    let mut col_used = [0u64; 3];
    for r in 0..rows {
        for _ in 0..row_need[r] {
            let mut seen_cols = [false; 3];
            let mut seen_rows = vec![false; rows];
            if !augment(r, &mut used, &mut col_used, col_cap, open, &mut seen_cols, &mut seen_rows) {
                return None;
            }
        }
    }
    Some(used)
}

fn augment(
    r: usize,
    used: &mut [[bool; 3]],
    col_used: &mut [u64; 3],
    col_cap: &[u64; 3],
    open: &[[bool; 3]],
    seen_cols: &mut [bool; 3],
    seen_rows: &mut [bool],
) -> bool {
    seen_rows[r] = true;
    for s in 0..3 {
        if !open[r][s] || used[r][s] || seen_cols[s] {
            continue;
        }
        seen_cols[s] = true;
        if col_used[s] < col_cap[s] {
            used[r][s] = true;
            col_used[s] += 1;
            return true;
        }
        // Column full: try to move one of its units to another column.
        for other in 0..used.len() {
            if seen_rows[other] || !used[other][s] {
                continue;
            }
            used[other][s] = false;
            col_used[s] -= 1;
            if augment(other, used, col_used, col_cap, open, seen_cols, seen_rows) {
                used[r][s] = true;
                col_used[s] += 1;
                return true;
            }
            used[other][s] = true;
            col_used[s] += 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, TokenizerConfig};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn corpus(labels: &[&str]) -> Corpus {
        let tok = TokenizerConfig::default();
        let docs = labels
            .iter()
            .enumerate()
            .map(|(i, l)| Document::new(format!("d{i}"), "x", *l, &tok))
            .collect();
        Corpus::new(docs, tok).unwrap()
    }

    #[test]
    fn ten_docs_eight_one_one() {
        let c = corpus(&["O", "T", "O", "T", "O", "T", "O", "T", "O", "T"]);
        let spec = SplitSpec::parse("0.8,0.1,0.1", 7).unwrap();
        let (a, b, t) = split_corpus(&c, &spec).unwrap();
        assert_eq!((a.len(), b.len(), t.len()), (8, 1, 1));
        let again = split_corpus(&c, &spec).unwrap();
        assert_eq!(a.ids().collect::<Vec<_>>(), again.0.ids().collect::<Vec<_>>());
        assert_eq!(b.ids().collect::<Vec<_>>(), again.1.ids().collect::<Vec<_>>());
    }

    #[test]
    fn fractions_must_sum_to_one() {
        assert!(SplitSpec::parse("0.8,0.1,0.2", 0).is_err());
        assert!(SplitSpec::parse("1/3,1/3,1/3", 0).is_ok());
        assert_eq!(parse_fraction("0.125").unwrap(), Ratio::new(1, 8));
    }

    #[test]
    fn empty_split_is_an_error() {
        let c = corpus(&["O", "T", "O"]);
        let spec = SplitSpec::parse("0.9,0.05,0.05", 1).unwrap();
        assert!(matches!(split_corpus(&c, &spec), Err(Error::EmptySplit(_))));
    }

    proptest! {
        #[test]
        fn split_is_a_stratified_partition(
            label_sizes in prop::collection::vec(1usize..40, 1..6),
            parts in prop::array::uniform3(1u64..20),
            seed in any::<u64>(),
        ) {
            let labels: Vec<String> = label_sizes
                .iter()
                .enumerate()
                .flat_map(|(l, &n)| std::iter::repeat_n(format!("L{l}"), n))
                .collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let c = corpus(&refs);
            let spec = SplitSpec::from_proportions(parts, seed).unwrap();
            let total = c.len() as u64;
            match split_corpus(&c, &spec) {
                Err(Error::EmptySplit(_)) => {}
                Err(e) => panic!("{e}"),
                Ok((a, b, t)) => {
                    let ids = |c: &Corpus| c.ids().map(String::from).collect::<BTreeSet<_>>();
                    let (ia, ib, it) = (ids(&a), ids(&b), ids(&t));
                    prop_assert!(ia.is_disjoint(&ib) && ia.is_disjoint(&it) && ib.is_disjoint(&it));
                    prop_assert_eq!(ia.len() + ib.len() + it.len(), c.len());
                    let sum: u64 = parts.iter().sum();
                    for (part, p) in [&a, &b, &t].iter().zip(parts) {
                        let ideal = Ratio::new(total * p, sum);
                        let got = Ratio::from_integer(part.len() as u64);
                        prop_assert!(got >= ideal.floor() && got <= ideal.ceil());
                        for (l, &n) in label_sizes.iter().enumerate() {
                            let have = part.label_counts().get(format!("L{l}").as_str()).copied().unwrap_or(0) as u64;
                            let ideal = Ratio::new(n as u64 * p, sum);
                            prop_assert!(Ratio::from_integer(have) >= ideal.floor());
                            prop_assert!(Ratio::from_integer(have) <= ideal.ceil());
                        }
                    }
                }
            }
        }
    }
}
