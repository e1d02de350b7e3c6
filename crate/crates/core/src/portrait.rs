//! Branching data `(A, B, d, F, br, rm)`, validation of the Hurwitz space
//! conditions, fully marked completions and target relabelings.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::Partition;

pub const MAX_DEGREE: u32 = 254;

/// Labeled discrete data of a Hurwitz space. Labels are kept in input order,
/// which fixes tuple positions for the whole pipeline.
///
/// Construction only checks structure (distinct labels, total maps); the
/// Hurwitz conditions are checked by [`validate_branching`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BranchingData {
    sources: Vec<String>,
    targets: Vec<String>,
    degree: u32,
    map: Vec<usize>,
    ram: Vec<u32>,
    branch: Vec<Partition>,
}

impl BranchingData {
    pub fn new(
        sources: Vec<String>,
        targets: Vec<String>,
        degree: u32,
        map: Vec<usize>,
        ram: Vec<u32>,
        branch: Vec<Partition>,
    ) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::Invalid(format!("degree {degree} out of range")));
        }
        check_distinct("source", &sources)?;
        check_distinct("target", &targets)?;
        if map.len() != sources.len() || ram.len() != sources.len() {
            return Err(Error::Invalid("map and ram must cover every source".into()));
        }
        if branch.len() != targets.len() {
            return Err(Error::Invalid("branch must cover every target".into()));
        }
        if let Some(&b) = map.iter().find(|&&b| b >= targets.len()) {
            return Err(Error::Invalid(format!("map image {b} outside targets")));
        }
        Ok(BranchingData {
            sources,
            targets,
            degree,
            map,
            ram,
            branch,
        })
    }

    /// Convenience constructor from label strings, used heavily in tests.
    pub fn from_labels(
        sources: &[&str],
        targets: &[&str],
        degree: u32,
        map: &[(&str, &str)],
        ram: &[(&str, u32)],
        branch: &[(&str, &[u32])],
    ) -> Result<Self> {
        let sources: Vec<String> = sources.iter().map(|s| s.to_string()).collect();
        let targets: Vec<String> = targets.iter().map(|s| s.to_string()).collect();
        let find = |labels: &[String], l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::Invalid(format!("unknown label {l}")))
        };
        let mut m = vec![usize::MAX; sources.len()];
        for (a, b) in map {
            m[find(&sources, a)?] = find(&targets, b)?;
        }
        let mut r = vec![0; sources.len()];
        for (a, k) in ram {
            r[find(&sources, a)?] = *k;
        }
        let mut br = vec![None; targets.len()];
        for (b, parts) in branch {
            br[find(&targets, b)?] = Some(Partition::new(parts.to_vec())?);
        }
        if m.contains(&usize::MAX) || r.contains(&0) || br.contains(&None) {
            return Err(Error::Invalid("missing map, ram or branch entry".into()));
        }
        BranchingData::new(sources, targets, degree, m, r, br.into_iter().flatten().collect())
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Target position of `F(a)`.
    pub fn image(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn ramification(&self, a: usize) -> u32 {
        self.ram[a]
    }

    pub fn ram(&self) -> &[u32] {
        &self.ram
    }

    pub fn branching(&self, b: usize) -> &Partition {
        &self.branch[b]
    }

    pub fn branch(&self) -> &[Partition] {
        &self.branch
    }

    /// Sources over target `b`, in source order.
    pub fn fiber(&self, b: usize) -> Vec<usize> {
        (0..self.sources.len()).filter(|&a| self.map[a] == b).collect()
    }

    pub fn source_index(&self, label: &str) -> Option<usize> {
        self.sources.iter().position(|s| s == label)
    }

    pub fn target_index(&self, label: &str) -> Option<usize> {
        self.targets.iter().position(|s| s == label)
    }

    /// `(target position, rm)` for every source, the form markings consume.
    pub fn mark_slots(&self) -> Vec<(usize, u32)> {
        self.map.iter().copied().zip(self.ram.iter().copied()).collect()
    }

    pub fn is_fully_marked(&self) -> bool {
        (0..self.targets.len()).all(|b| {
            let rms: Vec<u32> = self.fiber(b).iter().map(|&a| self.ram[a]).collect();
            self.branch[b].equals_multiset(&rms)
        })
    }

    /// Reorders targets and sources. `target_order[i]` is the old position of
    /// the new `i`-th target, likewise for sources.
    pub fn reorder(&self, target_order: &[usize], source_order: &[usize]) -> Result<Self> {
        check_order(target_order, self.targets.len())?;
        check_order(source_order, self.sources.len())?;
        let mut new_pos = vec![0; target_order.len()];
        for (new, &old) in target_order.iter().enumerate() {
            new_pos[old] = new;
        }
        BranchingData::new(
            source_order.iter().map(|&a| self.sources[a].clone()).collect(),
            target_order.iter().map(|&b| self.targets[b].clone()).collect(),
            self.degree,
            source_order.iter().map(|&a| new_pos[self.map[a]]).collect(),
            source_order.iter().map(|&a| self.ram[a]).collect(),
            target_order.iter().map(|&b| self.branch[b].clone()).collect(),
        )
    }
}

fn check_distinct(kind: &str, labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::Invalid(format!("duplicate {kind} label {l}")));
        }
    }
    Ok(())
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::NotABijection(format!("{order:?}")));
    }
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::NotABijection(format!("{order:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Which requirement a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Structure,
    Cardinality,
    PartitionTotal,
    Ramification,
    RiemannHurwitz,
    Submultiset,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Structure => "structure",
            Condition::Cardinality => "cardinality",
            Condition::PartitionTotal => "partition-total",
            Condition::Ramification => "ramification",
            Condition::RiemannHurwitz => "condition-1",
            Condition::Submultiset => "condition-2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition.id(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub fully_marked: bool,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>, fully_marked: bool) -> Self {
        let ok = violations.is_empty();
        ValidationReport {
            ok,
            violations,
            fully_marked: ok && fully_marked,
        }
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    /// Turns a failed report into an error listing every violation.
    pub fn into_result(self) -> Result<()> {
        if self.ok {
            return Ok(());
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        Err(Error::Invalid(msgs.join("; ")))
    }
}

/// Checks cardinalities, partition totals, ramification bounds, the
/// Riemann-Hurwitz count and the per-fiber submultiset condition.
pub fn validate_branching(data: &BranchingData) -> ValidationReport {
    let mut v = Vec::new();
    let mut push = |condition, message: String| v.push(Violation { condition, message });
    let d = data.degree as i128;

    if data.sources.len() < 3 {
        push(
            Condition::Cardinality,
            format!("need at least 3 sources, got {}", data.sources.len()),
        );
    }
    if data.targets.len() < 3 {
        push(
            Condition::Cardinality,
            format!("need at least 3 targets, got {}", data.targets.len()),
        );
    }
    for (b, lambda) in data.branch.iter().enumerate() {
        if lambda.total() != data.degree {
            push(
                Condition::PartitionTotal,
                format!(
                    "branching {} over {} sums to {}, degree is {}",
                    lambda,
                    data.targets[b],
                    lambda.total(),
                    data.degree
                ),
            );
        }
    }
    for (a, &k) in data.ram.iter().enumerate() {
        if k == 0 || k > data.degree {
            push(
                Condition::Ramification,
                format!("rm({}) = {k} outside 1..={}", data.sources[a], data.degree),
            );
        }
    }
    let sum: i128 = data.branch.iter().map(|l| d - l.len() as i128).sum();
    if sum != 2 * d - 2 {
        push(
            Condition::RiemannHurwitz,
            format!("sum of d - length(br(b)) is {sum}, expected {}", 2 * d - 2),
        );
    }
    for b in 0..data.targets.len() {
        let rms: Vec<u32> = data.fiber(b).iter().map(|&a| data.ram[a]).collect();
        if !data.branch[b].contains_multiset(&rms) {
            push(
                Condition::Submultiset,
                format!(
                    "ramification {:?} over {} is not a submultiset of {}",
                    rms, data.targets[b], data.branch[b]
                ),
            );
        }
    }
    let fully = v.is_empty() && data.is_fully_marked();
    ValidationReport::from_violations(v, fully)
}

/// A fully marked completion together with its embedding and the factor
/// `deg ν` relating the two fiber counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub full: BranchingData,
    pub deg_nu: u64,
    /// `embedding[a]` is the position of source `a` in `full`.
    pub embedding: Vec<usize>,
}

impl Completion {
    pub fn added(&self) -> usize {
        self.full.sources.len() - self.embedding.len()
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Adds one fresh source `q<k>` per unconsumed part of each `br(b)`, in target
/// order then decreasing part length.
pub fn fully_marked_completion(data: &BranchingData) -> Result<Completion> {
    validate_branching(data).into_result()?;
    let mut full = data.clone();
    let mut next = 1usize;
    let mut deg_nu = 1u64;
    for b in 0..data.targets.len() {
        let rms: Vec<u32> = data.fiber(b).iter().map(|&a| data.ram[a]).collect();
        let rest = data.branch[b]
            .remainder(&rms)
            .expect("validated data has submultiset fibers");
        let mut per_len: BTreeMap<u32, u64> = BTreeMap::new();
        for len in rest {
            *per_len.entry(len).or_default() += 1;
            let label = loop {
                let candidate = format!("q{next}");
                next += 1;
                if !full.sources.contains(&candidate) && !full.targets.contains(&candidate) {
                    break candidate;
                }
            };
            full.sources.push(label);
            full.map.push(b);
            full.ram.push(len);
        }
        for count in per_len.values() {
            deg_nu = deg_nu
                .checked_mul(factorial(*count))
                .ok_or(Error::Capacity {
                    what: "deg_nu",
                    value: u128::MAX,
                    limit: u64::MAX as u128,
                })?;
        }
    }
    Ok(Completion {
        full,
        deg_nu,
        embedding: (0..data.sources.len()).collect(),
    })
}

/// Branching data whose sources and targets are the same labeled set `P`:
/// the datum of a self-correspondence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Portrait {
    data: BranchingData,
}

impl Portrait {
    pub fn new(
        points: Vec<String>,
        degree: u32,
        map: Vec<usize>,
        ram: Vec<u32>,
        branch: Vec<Partition>,
    ) -> Result<Self> {
        let data = BranchingData::new(points.clone(), points, degree, map, ram, branch)?;
        Ok(Portrait { data })
    }

    pub fn from_data(data: BranchingData) -> Result<Self> {
        if data.sources != data.targets {
            return Err(Error::Invalid("sources and targets differ".into()));
        }
        Ok(Portrait { data })
    }

    pub fn from_labels(
        points: &[&str],
        degree: u32,
        map: &[(&str, &str)],
        ram: &[(&str, u32)],
        branch: &[(&str, &[u32])],
    ) -> Result<Self> {
        Portrait::from_data(BranchingData::from_labels(
            points, points, degree, map, ram, branch,
        )?)
    }

    pub fn data(&self) -> &BranchingData {
        &self.data
    }

    pub fn points(&self) -> &[String] {
        &self.data.sources
    }

    pub fn len(&self) -> usize {
        self.data.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.sources.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.data.degree
    }

    pub fn validate(&self) -> ValidationReport {
        validate_branching(&self.data)
    }

    /// Errors unless the portrait is valid and has the four points the
    /// dynamics needs.
    pub fn require_dynamics(&self) -> Result<()> {
        self.validate().into_result()?;
        if self.len() < 4 {
            return Err(Error::TooFewPoints(self.len()));
        }
        Ok(())
    }

    /// Reorders the point set, keeping sources and targets aligned.
    pub fn reorder_points(&self, order: &[usize]) -> Result<Self> {
        Portrait::from_data(self.data.reorder(order, order)?)
    }
}

/// Relabels targets by `sigma` (given as `sigma[p] = σ(p)`): `F ↦ σ⁻¹∘F` and
/// `br ↦ br∘σ`, `rm` unchanged.
pub fn relabel_target(portrait: &Portrait, sigma: &[usize]) -> Result<Portrait> {
    let n = portrait.len();
    check_order(sigma, n)?;
    let mut inv = vec![0; n];
    for (p, &s) in sigma.iter().enumerate() {
        inv[s] = p;
    }
    let data = &portrait.data;
    let new = BranchingData::new(
        data.sources.clone(),
        data.targets.clone(),
        data.degree,
        data.map.iter().map(|&b| inv[b]).collect(),
        data.ram.clone(),
        (0..n).map(|b| data.branch[sigma[b]].clone()).collect(),
    )?;
    Portrait::from_data(new)
}
