//! Permutations of `{1..d}`, cycle bookkeeping, and canonical keys for marked
//! tuples modulo simultaneous conjugation.
//!
//! Points are stored 0-based and act on the right: the product `g h` applies
//! `g` first. A tuple `(g_1, ..., g_k)` is a factorization of the identity when
//! `g_1 g_2 ... g_k` evaluated left factor first is the identity. Every other
//! module goes through [`product`] so the convention lives in one place.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::portrait::BranchingData;

const UNSET: u8 = u8::MAX;

/// A bijection of `{0..d}`, `d <= 255`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        assert!(d < UNSET as usize, "degree {d} too large");
        Permutation {
            images: (0..d as u8).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        if d >= UNSET as usize {
            return Err(Error::Invalid(format!("degree {d} too large")));
        }
        let mut seen = vec![false; d];
        for &x in &images {
            if x >= d || seen[x] {
                return Err(Error::NotABijection(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u8).collect(),
        })
    }

    /// Builds a permutation of degree `d` from 1-based disjoint cycles.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d || touched[x - 1] {
                    return Err(Error::NotABijection(format!("{cycles:?}")));
                }
                touched[x - 1] = true;
                images[x - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), next.degree());
        Permutation {
            images: self.images.iter().map(|&x| next.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Permutation { images: inv }
    }

    /// Renames every point `x` to `map(x)`. Equals `map⁻¹ · self · map` in the
    /// left-to-right product.
    pub fn relabel(&self, map: &Permutation) -> Permutation {
        let mut out = vec![0u8; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            out[map.image(x)] = map.images[y as usize];
        }
        Permutation { images: out }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y as usize)
    }

    /// Disjoint cycles, each starting at its smallest point, ordered by that point.
    /// Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.image(x);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Partition {
        let lens = self.cycles().iter().map(|c| c.len() as u32).collect();
        Partition::new(lens).unwrap_or_else(|_| Partition::ones(0))
    }

    /// Applies the permutation to a set of points, returning it sorted.
    pub fn map_set(&self, points: &[u8]) -> Vec<u8> {
        let mut out: Vec<u8> = points.iter().map(|&x| self.images[x as usize]).collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            wrote = true;
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        if !wrote {
            write!(f, "id")?;
        }
        Ok(())
    }
}

/// Left-to-right product `g_1 g_2 ... g_k` of permutations of degree `d`.
pub fn product<'a, I>(d: usize, perms: I) -> Permutation
where
    I: IntoIterator<Item = &'a Permutation>,
{
    perms
        .into_iter()
        .fold(Permutation::identity(d), |acc, g| acc.then(g))
}

pub fn cycle_type(g: &Permutation) -> Partition {
    g.cycle_type()
}

/// Whether the group generated by `gs` acts transitively on `{0..d}`.
pub fn is_transitive(gs: &[Permutation], d: usize) -> bool {
    if d <= 1 {
        return true;
    }
    if gs.is_empty() {
        return false;
    }
    orbits(gs, d).len() == 1
}

/// Orbits of the group generated by `gs` on `{0..d}`, each sorted, ordered by
/// smallest point.
pub fn orbits(gs: &[Permutation], d: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; d];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in gs {
                let y = g.image(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// All `d!` permutations of degree `d` in lexicographic order of images.
pub fn all_permutations(d: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (0..d).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation {
            images: current.iter().map(|&x| x as u8).collect(),
        });
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..d).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// Every permutation of degree `λ.total()` with cycle type `λ`, sorted.
pub fn class_members(lambda: &Partition) -> Vec<Permutation> {
    all_permutations(lambda.total() as usize)
        .into_iter()
        .filter(|g| &g.cycle_type() == lambda)
        .collect()
}

/// The representative with cycles of decreasing length on consecutive points.
pub fn class_representative(lambda: &Partition) -> Permutation {
    let d = lambda.total() as usize;
    let mut images = vec![0usize; d];
    let mut start = 0;
    for &part in lambda.parts() {
        let part = part as usize;
        for i in 0..part {
            images[start + i] = start + (i + 1) % part;
        }
        start += part;
    }
    Permutation::from_images(images).expect("consecutive cycles form a bijection")
}

/// A tuple of permutations indexed by target position, with each source label
/// marking one cycle (stored as its sorted point set) of the entry over its image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedTuple {
    entries: Vec<Permutation>,
    marks: Vec<Vec<u8>>,
}

impl MarkedTuple {
    pub fn new(entries: Vec<Permutation>, marks: Vec<Vec<u8>>) -> Self {
        let marks = marks
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m
            })
            .collect();
        MarkedTuple { entries, marks }
    }

    pub fn degree(&self) -> usize {
        self.entries.first().map_or(0, Permutation::degree)
    }

    pub fn entries(&self) -> &[Permutation] {
        &self.entries
    }

    pub fn marks(&self) -> &[Vec<u8>] {
        &self.marks
    }

    pub fn into_parts(self) -> (Vec<Permutation>, Vec<Vec<u8>>) {
        (self.entries, self.marks)
    }

    pub fn product(&self) -> Permutation {
        product(self.degree(), &self.entries)
    }

    /// Simultaneous conjugation: renames each point `x` to `map(x)`.
    pub fn relabel(&self, map: &Permutation) -> MarkedTuple {
        MarkedTuple {
            entries: self.entries.iter().map(|g| g.relabel(map)).collect(),
            marks: self.marks.iter().map(|m| map.map_set(m)).collect(),
        }
    }

    /// Keeps only the marks of the first `n` source labels.
    pub fn truncate_marks(&self, n: usize) -> MarkedTuple {
        MarkedTuple {
            entries: self.entries.clone(),
            marks: self.marks[..n].to_vec(),
        }
    }

    /// Checks every invariant against `data`: cycle types, identity product,
    /// transitivity, and that marks are distinct cycles of the right length.
    pub fn check(&self, data: &BranchingData) -> std::result::Result<(), String> {
        let d = data.degree() as usize;
        if self.entries.len() != data.targets().len() {
            return Err(format!(
                "{} entries for {} targets",
                self.entries.len(),
                data.targets().len()
            ));
        }
        if self.marks.len() != data.sources().len() {
            return Err(format!(
                "{} marks for {} sources",
                self.marks.len(),
                data.sources().len()
            ));
        }
        for (b, g) in self.entries.iter().enumerate() {
            if g.degree() != d {
                return Err(format!("entry {b} has degree {}", g.degree()));
            }
            if &g.cycle_type() != data.branching(b) {
                return Err(format!(
                    "entry {b} has cycle type {} instead of {}",
                    g.cycle_type(),
                    data.branching(b)
                ));
            }
        }
        if !self.product().is_identity() {
            return Err("product is not the identity".into());
        }
        if !is_transitive(&self.entries, d) {
            return Err("entries do not act transitively".into());
        }
        for (a, mark) in self.marks.iter().enumerate() {
            let g = &self.entries[data.image(a)];
            let is_cycle = g.cycles().iter().any(|c| {
                let mut c = c.iter().map(|&x| x as u8).collect::<Vec<_>>();
                c.sort_unstable();
                &c == mark
            });
            if !is_cycle {
                return Err(format!("mark of source {a} is not a cycle"));
            }
            if mark.len() as u32 != data.ramification(a) {
                return Err(format!("mark of source {a} has the wrong length"));
            }
            for other in 0..a {
                if data.image(other) == data.image(a) && self.marks[other] == *mark {
                    return Err(format!("sources {other} and {a} mark the same cycle"));
                }
            }
        }
        Ok(())
    }
}

/// Encoding of a marked tuple that is minimal over all relabelings of its points.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 {
            return Err(Error::Invalid("odd-length hex key".into()));
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Invalid(format!("bad hex key: {e}")))?;
        let key = CanonicalKey(bytes);
        key.decode()?;
        Ok(key)
    }

    /// Recovers the canonical representative tuple.
    pub fn decode(&self) -> Result<MarkedTuple> {
        let mut r = Reader { bytes: &self.0, pos: 0 };
        let d = r.u32()? as usize;
        let n_entries = r.u32()? as usize;
        let mut entries = Vec::with_capacity(n_entries);
        for _ in 0..n_entries {
            let len = r.u32()? as usize;
            if len != d {
                return Err(Error::Invalid("entry length differs from degree".into()));
            }
            let images = (0..len)
                .map(|_| r.point())
                .collect::<Result<Vec<_>>>()?;
            entries.push(Permutation::from_images(images)?);
        }
        let n_marks = r.u32()? as usize;
        let mut marks = Vec::with_capacity(n_marks);
        for _ in 0..n_marks {
            let len = r.u32()? as usize;
            let points = (0..len)
                .map(|_| r.point().map(|p| p as u8))
                .collect::<Result<Vec<_>>>()?;
            marks.push(points);
        }
        if r.pos != self.0.len() {
            return Err(Error::Invalid("trailing bytes in key".into()));
        }
        Ok(MarkedTuple::new(entries, marks))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Invalid("truncated key".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// 1-based u16 on the wire, 0-based in memory.
    fn point(&mut self) -> Result<usize> {
        let b = self.take(2)?;
        let v = u16::from_be_bytes([b[0], b[1]]) as usize;
        v.checked_sub(1)
            .ok_or_else(|| Error::Invalid("zero point in key".into()))
    }
}

/// Breadth-first relabeling from `base`, following entries in order.
/// Returns `old -> new`.
fn bfs_labels(entries: &[Permutation], d: usize, base: usize) -> Vec<u8> {
    let mut label = vec![UNSET; d];
    let mut next = 0u8;
    let mut queue = VecDeque::with_capacity(d);
    let mut seed = Some(base);
    while let Some(start) = seed {
        label[start] = next;
        next += 1;
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for g in entries {
                let y = g.image(x);
                if label[y] == UNSET {
                    label[y] = next;
                    next += 1;
                    queue.push_back(y);
                }
            }
        }
        // only reached for intransitive input, where keys are not canonical
        seed = label.iter().position(|&l| l == UNSET);
    }
    label
}

fn encode(t: &MarkedTuple, label: &[u8]) -> Vec<u8> {
    let d = t.degree();
    let mut old_of = vec![0usize; d];
    for (old, &new) in label.iter().enumerate() {
        old_of[new as usize] = old;
    }
    let mut out = Vec::with_capacity(8 + t.entries.len() * (4 + 2 * d) + 4 + t.marks.len() * 6);
    out.extend_from_slice(&(d as u32).to_be_bytes());
    out.extend_from_slice(&(t.entries.len() as u32).to_be_bytes());
    for g in &t.entries {
        out.extend_from_slice(&(d as u32).to_be_bytes());
        for &old in &old_of {
            let img = label[g.image(old)] as u16 + 1;
            out.extend_from_slice(&img.to_be_bytes());
        }
    }
    out.extend_from_slice(&(t.marks.len() as u32).to_be_bytes());
    for mark in &t.marks {
        out.extend_from_slice(&(mark.len() as u32).to_be_bytes());
        let mut pts: Vec<u16> = mark.iter().map(|&x| label[x as usize] as u16 + 1).collect();
        pts.sort_unstable();
        for p in pts {
            out.extend_from_slice(&p.to_be_bytes());
        }
    }
    out
}

/// Canonical key of a transitive marked tuple: the least encoding over all
/// base points of the breadth-first relabeling.
pub fn canonicalize(t: &MarkedTuple) -> CanonicalKey {
    let d = t.degree();
    let mut best: Option<Vec<u8>> = None;
    for base in 0..d.max(1) {
        let label = if d == 0 { Vec::new() } else { bfs_labels(&t.entries, d, base) };
        let enc = encode(t, &label);
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    CanonicalKey(best.unwrap_or_default())
}

/// Calls `visit` with every assignment of marks to cycles, where source `i`
/// must mark a cycle of length `slots[i].1` of `entries[slots[i].0]`, and two
/// sources over the same entry mark distinct cycles.
pub fn for_each_marking<F>(entries: &[Permutation], slots: &[(usize, u32)], mut visit: F)
where
    F: FnMut(&[Vec<u8>]),
{
    let cycles: Vec<Vec<Vec<u8>>> = entries
        .iter()
        .map(|g| {
            g.cycles()
                .into_iter()
                .map(|c| {
                    let mut c: Vec<u8> = c.into_iter().map(|x| x as u8).collect();
                    c.sort_unstable();
                    c
                })
                .collect()
        })
        .collect();
    let mut used: Vec<Vec<bool>> = cycles.iter().map(|cs| vec![false; cs.len()]).collect();
    let mut chosen: Vec<Vec<u8>> = Vec::with_capacity(slots.len());
    fn recurse<F: FnMut(&[Vec<u8>])>(
        i: usize,
        slots: &[(usize, u32)],
        cycles: &[Vec<Vec<u8>>],
        used: &mut [Vec<bool>],
        chosen: &mut Vec<Vec<u8>>,
        visit: &mut F,
    ) {
        if i == slots.len() {
            visit(chosen);
            return;
        }
        let (pos, len) = slots[i];
        for c in 0..cycles[pos].len() {
            if used[pos][c] || cycles[pos][c].len() as u32 != len {
                continue;
            }
            used[pos][c] = true;
            chosen.push(cycles[pos][c].clone());
            recurse(i + 1, slots, cycles, used, chosen, visit);
            chosen.pop();
            used[pos][c] = false;
        }
    }
    recurse(0, slots, &cycles, &mut used, &mut chosen, &mut visit);
}
