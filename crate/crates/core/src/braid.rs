//! Hurwitz moves, pure braid generators and the decomposition of a
//! constellation set into braid orbits (connected components).
//!
//! Positions are 0-based here. `σ_i` acts on positions `i, i + 1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::count::{fan_out, ConstellationSet, Execution};
use crate::error::{Error, Result};
use crate::perm::{canonicalize, CanonicalKey, MarkedTuple, Permutation};
use crate::portrait::BranchingData;

/// A tuple in the middle of a braid word: entries may sit away from their
/// home positions, so each position records which target label it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BraidState {
    pub entries: Vec<Permutation>,
    /// Marks in source order, attached to whichever position carries `F(a)`.
    pub marks: Vec<Vec<u8>>,
    /// `labels[p]` is the home position of the entry currently at `p`.
    pub labels: Vec<usize>,
    /// `F` as home positions.
    map: Vec<usize>,
}

impl BraidState {
    pub fn new(t: &MarkedTuple, data: &BranchingData) -> Self {
        BraidState {
            entries: t.entries().to_vec(),
            marks: t.marks().to_vec(),
            labels: (0..t.entries().len()).collect(),
            map: data.map().to_vec(),
        }
    }

    pub fn is_home(&self) -> bool {
        self.labels.iter().enumerate().all(|(p, &l)| p == l)
    }

    pub fn to_tuple(&self) -> Result<MarkedTuple> {
        if !self.is_home() {
            return Err(Error::ModelViolation("braid word is not pure".into()));
        }
        Ok(MarkedTuple::new(self.entries.clone(), self.marks.clone()))
    }

    fn check(&self, i: usize) -> Result<()> {
        if i + 1 >= self.entries.len() {
            return Err(Error::Position {
                position: i,
                len: self.entries.len(),
            });
        }
        Ok(())
    }

    fn transport_marks(&mut self, label: usize, by: &Permutation) {
        for (a, mark) in self.marks.iter_mut().enumerate() {
            if self.map[a] == label {
                *mark = by.map_set(mark);
            }
        }
    }

    /// `(g_i, g_{i+1}) ↦ (g_i g_{i+1} g_i⁻¹, g_i)`.
    pub fn sigma(&mut self, i: usize) -> Result<()> {
        self.check(i)?;
        let gi = self.entries[i].clone();
        let by = gi.inverse();
        let moved = self.entries[i + 1].relabel(&by);
        self.transport_marks(self.labels[i + 1], &by);
        self.entries[i] = moved;
        self.entries[i + 1] = gi;
        self.labels.swap(i, i + 1);
        Ok(())
    }

    /// `(g_i, g_{i+1}) ↦ (g_{i+1}, g_{i+1}⁻¹ g_i g_{i+1})`.
    pub fn sigma_inv(&mut self, i: usize) -> Result<()> {
        self.check(i)?;
        let gj = self.entries[i + 1].clone();
        let moved = self.entries[i].relabel(&gj);
        self.transport_marks(self.labels[i], &gj);
        self.entries[i + 1] = moved;
        self.entries[i] = gj;
        self.labels.swap(i, i + 1);
        Ok(())
    }

    /// The pure generator `A_ij`, `i < j`: bring `j` down next to `i`, wind
    /// it once around `i`, and carry it back.
    pub fn pure(&mut self, i: usize, j: usize, inverse: bool) -> Result<()> {
        if i >= j || j >= self.entries.len() {
            return Err(Error::Position {
                position: j,
                len: self.entries.len(),
            });
        }
        for p in (i + 1..j).rev() {
            self.sigma_inv(p)?;
        }
        if inverse {
            self.sigma_inv(i)?;
            self.sigma_inv(i)?;
        } else {
            self.sigma(i)?;
            self.sigma(i)?;
        }
        for p in i + 1..j {
            self.sigma(p)?;
        }
        Ok(())
    }
}

pub fn apply_sigma(t: &MarkedTuple, data: &BranchingData, i: usize) -> Result<BraidState> {
    let mut s = BraidState::new(t, data);
    s.sigma(i)?;
    Ok(s)
}

pub fn apply_pure_generator(
    t: &MarkedTuple,
    data: &BranchingData,
    i: usize,
    j: usize,
) -> Result<MarkedTuple> {
    let mut s = BraidState::new(t, data);
    s.pure(i, j, false)?;
    s.to_tuple()
}

pub fn apply_pure_generator_inverse(
    t: &MarkedTuple,
    data: &BranchingData,
    i: usize,
    j: usize,
) -> Result<MarkedTuple> {
    let mut s = BraidState::new(t, data);
    s.pure(i, j, true)?;
    s.to_tuple()
}

/// All position pairs `(i, j)`, `i < j`.
pub fn generator_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect()
}

/// The permutation of class indices induced by `A_ij`.
pub fn generator_action(cs: &ConstellationSet, i: usize, j: usize) -> Result<Vec<usize>> {
    let keys: Vec<&CanonicalKey> = cs.keys().collect();
    let index: BTreeMap<&CanonicalKey, usize> = keys.iter().enumerate().map(|(n, k)| (*k, n)).collect();
    cs.iter()
        .map(|(_, t)| {
            let image = canonicalize(&apply_pure_generator(t, cs.data(), i, j)?);
            index.get(&image).copied().ok_or_else(|| {
                Error::ModelViolation(format!("A_{i}{j} left the constellation set"))
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub id: usize,
    pub keys: Vec<CanonicalKey>,
    pub representative: MarkedTuple,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.keys.len()
    }
}

/// Braid orbits, ordered (and numbered) by least key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub orbits: Vec<Orbit>,
    membership: BTreeMap<CanonicalKey, usize>,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.membership.get(key).copied()
    }

    pub fn total(&self) -> usize {
        self.orbits.iter().map(Orbit::size).sum()
    }

    /// Orbit sizes in decreasing order.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.orbits.iter().map(Orbit::size).collect();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

fn neighbors(
    key: &CanonicalKey,
    data: &BranchingData,
    pairs: &[(usize, usize)],
) -> Result<BTreeSet<CanonicalKey>> {
    let t = key.decode()?;
    pairs
        .iter()
        .map(|&(i, j)| Ok(canonicalize(&apply_pure_generator(&t, data, i, j)?)))
        .collect()
}

/// Orbits of all pure generators acting on the classes of `cs`.
pub fn decompose_components(cs: &ConstellationSet, exec: Execution) -> Result<ComponentDecomposition> {
    let data = cs.data();
    let pairs = generator_pairs(data.targets().len());
    let mut membership: BTreeMap<CanonicalKey, usize> = BTreeMap::new();
    let mut orbits = Vec::new();
    for start in cs.keys() {
        if membership.contains_key(start) {
            continue;
        }
        let id = orbits.len();
        let mut seen: BTreeSet<CanonicalKey> = BTreeSet::from([start.clone()]);
        let mut frontier: Vec<CanonicalKey> = vec![start.clone()];
        while !frontier.is_empty() {
            let found = fan_out(
                exec,
                &frontier,
                |k| neighbors(k, data, &pairs),
                || Ok(BTreeSet::new()),
                |a: Result<BTreeSet<CanonicalKey>>, b| {
                    let mut a = a?;
                    a.extend(b?);
                    Ok(a)
                },
            )?;
            frontier = found.into_iter().filter(|k| seen.insert(k.clone())).collect();
        }
        for k in &seen {
            if !cs.contains(k) {
                return Err(Error::ModelViolation(
                    "braid orbit left the constellation set".into(),
                ));
            }
            membership.insert(k.clone(), id);
        }
        orbits.push(Orbit {
            id,
            representative: start.decode()?,
            keys: seen.into_iter().collect(),
        });
    }
    Ok(ComponentDecomposition { orbits, membership })
}
