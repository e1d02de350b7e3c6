//! Exhaustive enumeration of marked constellations and Hurwitz numbers.

use std::collections::{BTreeMap, BTreeSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::perm::{
    canonicalize, class_members, class_representative, for_each_marking, is_transitive, CanonicalKey,
    MarkedTuple, Permutation,
};
use crate::portrait::{validate_branching, BranchingData};

/// Explicit resource limits. Exceeding one is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ceilings {
    pub max_degree: u32,
    /// Upper bound on the number of raw tuples the backtracking may visit.
    pub max_tuples: u128,
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings {
            max_degree: 6,
            max_tuples: 20_000_000,
        }
    }
}

impl Ceilings {
    pub fn check_degree(&self, d: u32) -> Result<()> {
        if d > self.max_degree {
            return Err(Error::Capacity {
                what: "degree",
                value: d as u128,
                limit: self.max_degree as u128,
            });
        }
        Ok(())
    }

    pub fn check_tuples(&self, what: &'static str, n: u128) -> Result<()> {
        if n > self.max_tuples {
            return Err(Error::Capacity {
                what,
                value: n,
                limit: self.max_tuples,
            });
        }
        Ok(())
    }
}

/// Whether data-parallel loops fan out over threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    pub ceilings: Ceilings,
    pub execution: Execution,
}

impl Options {
    pub fn serial() -> Self {
        Options {
            execution: Execution::Serial,
            ..Options::default()
        }
    }
}

/// Maps `f` over `items` and merges the results, in parallel when enabled.
/// `merge` must be associative and commutative for the result to be
/// schedule independent.
pub(crate) fn fan_out<T, R, F, I, M>(exec: Execution, items: &[T], f: F, empty: I, merge: M) -> R
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(&f).reduce(&empty, &merge),
        _ => items.iter().map(&f).fold(empty(), &merge),
    }
}

/// One representative per conjugacy class of valid marked tuples, ordered by key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstellationSet {
    data: BranchingData,
    classes: BTreeMap<CanonicalKey, MarkedTuple>,
}

impl ConstellationSet {
    pub fn from_keys(data: BranchingData, keys: BTreeSet<CanonicalKey>) -> Result<Self> {
        let classes = keys
            .into_iter()
            .map(|k| {
                let t = k.decode()?;
                Ok((k, t))
            })
            .collect::<Result<_>>()?;
        Ok(ConstellationSet { data, classes })
    }

    pub fn data(&self) -> &BranchingData {
        &self.data
    }

    pub fn total(&self) -> usize {
        self.classes.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.classes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalKey, &MarkedTuple)> {
        self.classes.iter()
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.classes.contains_key(key)
    }

    pub fn representative(&self, key: &CanonicalKey) -> Option<&MarkedTuple> {
        self.classes.get(key)
    }

    /// Position of `key` in key order.
    pub fn index_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.classes.contains_key(key).then(|| self.classes.range(..key).count())
    }
}

/// Number of elements in the conjugacy class of cycle type `lambda`.
pub fn class_size(lambda: &Partition) -> u128 {
    let d = lambda.total() as u128;
    let mut size: u128 = (1..=d).product();
    let mut distinct: Vec<u32> = lambda.parts().to_vec();
    distinct.dedup();
    for part in distinct {
        let m = lambda.multiplicity(part) as u128;
        size /= (part as u128).pow(m as u32) * (1..=m).product::<u128>();
    }
    size
}

/// Raw tuples visited by the backtracking: product of class sizes over the
/// free positions.
pub fn search_size(data: &BranchingData) -> u128 {
    let k = data.targets().len();
    if k < 2 {
        return 1;
    }
    data.branch()[1..k - 1]
        .iter()
        .map(class_size)
        .fold(1u128, |acc, s| acc.saturating_mul(s))
}

fn prepare(data: &BranchingData, opts: &Options) -> Result<()> {
    validate_branching(data).into_result()?;
    opts.ceilings.check_degree(data.degree())?;
    opts.ceilings.check_tuples("raw tuple count", search_size(data))
}

/// Every factorization of the identity with the prescribed cycle types whose
/// first entry is the class representative, up to the transitivity check.
/// Calls `visit` with each transitive tuple.
fn for_each_tuple<F>(
    data: &BranchingData,
    classes: &[Vec<Permutation>],
    first_free: &Permutation,
    visit: &mut F,
) where
    F: FnMut(&[Permutation]),
{
    let k = data.targets().len();
    let g0 = class_representative(data.branching(0));
    let mut entries = vec![g0.clone(); k];
    let prefix = g0.then(first_free);
    entries[1] = first_free.clone();
    if k == 2 {
        return;
    }
    fn recurse<F: FnMut(&[Permutation])>(
        pos: usize,
        prefix: Permutation,
        entries: &mut Vec<Permutation>,
        classes: &[Vec<Permutation>],
        data: &BranchingData,
        visit: &mut F,
    ) {
        let k = entries.len();
        if pos == k - 1 {
            let last = prefix.inverse();
            if &last.cycle_type() != data.branching(pos) {
                return;
            }
            entries[pos] = last;
            if is_transitive(entries, data.degree() as usize) {
                visit(entries);
            }
            return;
        }
        for g in &classes[pos] {
            entries[pos] = g.clone();
            recurse(pos + 1, prefix.then(g), entries, classes, data, visit);
        }
    }
    recurse(2, prefix, &mut entries, classes, data, visit);
}

fn collect_keys(
    data: &BranchingData,
    opts: &Options,
    marked: bool,
) -> Result<BTreeSet<CanonicalKey>> {
    prepare(data, opts)?;
    let k = data.targets().len();
    let classes: Vec<Vec<Permutation>> = (0..k)
        .map(|b| {
            if b == 0 || b == k - 1 {
                Vec::new()
            } else {
                class_members(data.branching(b))
            }
        })
        .collect();
    let slots = if marked { data.mark_slots() } else { Vec::new() };
    let firsts = classes[1].clone();
    let keys = fan_out(
        opts.execution,
        &firsts,
        |g1| {
            let mut out = BTreeSet::new();
            for_each_tuple(data, &classes, g1, &mut |entries| {
                for_each_marking(entries, &slots, |marks| {
                    let t = MarkedTuple::new(entries.to_vec(), marks.to_vec());
                    out.insert(canonicalize(&t));
                });
            });
            out
        },
        BTreeSet::new,
        |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            a.extend(b);
            a
        },
    );
    Ok(keys)
}

/// All conjugacy classes of valid marked tuples for `data`.
pub fn enumerate_marked(data: &BranchingData, opts: &Options) -> Result<ConstellationSet> {
    let keys = collect_keys(data, opts, true)?;
    ConstellationSet::from_keys(data.clone(), keys)
}

/// Number of marked classes, the degree of the source map.
pub fn hurwitz_number(data: &BranchingData, opts: &Options) -> Result<u128> {
    Ok(collect_keys(data, opts, true)?.len() as u128)
}

/// Number of classes of tuples with the marks forgotten.
pub fn unmarked_count(data: &BranchingData, opts: &Options) -> Result<u128> {
    Ok(collect_keys(data, opts, false)?.len() as u128)
}
