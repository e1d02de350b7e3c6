//! Admissible covers over the three one-node degenerations of a four-pointed
//! target, their smoothings, and the top degree of the source map.
//!
//! A split `{0, j} | rest` is handled in a *split order* of the four target
//! positions: the first two entries live on one side of the node, the last two
//! on the other, and the product of the four entries is the identity. The node
//! monodromy of the first side is `h = (g_1 g_2)⁻¹ = g_3 g_4`; its cycles are
//! the source nodes, of ramification `k_i` equal to the cycle lengths.
//!
//! A cover is stored as an *aligned* tuple on one set of sheets, with the
//! second side transported so its node cycles coincide with those of `h`.
//! Rotating the second side along the node cycles gives the same cover and a
//! different smoothing; the cover key is the least canonical key over all
//! rotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::braid::{decompose_components, generator_action, ComponentDecomposition};
use crate::count::{enumerate_marked, fan_out, ConstellationSet, Options};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::perm::{
    canonicalize, class_members, class_representative, for_each_marking, is_transitive, orbits,
    CanonicalKey, MarkedTuple, Permutation,
};
use crate::portrait::{fully_marked_completion, validate_branching, BranchingData, Completion};

/// One of the three splits `{0, j} | complement` of four target positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TargetSplit {
    j: usize,
}

impl TargetSplit {
    pub fn all() -> [TargetSplit; 3] {
        [TargetSplit { j: 1 }, TargetSplit { j: 2 }, TargetSplit { j: 3 }]
    }

    pub fn new(j: usize) -> Result<Self> {
        if !(1..=3).contains(&j) {
            return Err(Error::Position { position: j, len: 4 });
        }
        Ok(TargetSplit { j })
    }

    /// The positions `{0, j}` colliding at this boundary point.
    pub fn pair(&self) -> (usize, usize) {
        (0, self.j)
    }

    /// Target positions in split order.
    pub fn order(&self) -> [usize; 4] {
        match self.j {
            1 => [0, 1, 2, 3],
            2 => [0, 2, 1, 3],
            _ => [1, 2, 3, 0],
        }
    }

    pub fn describe(&self, targets: &[String]) -> String {
        let rest: Vec<&str> = (1..4).filter(|&b| b != self.j).map(|b| targets[b].as_str()).collect();
        format!("{{{},{}}}|{{{}}}", targets[0], targets[self.j], rest.join(","))
    }
}

/// The data with targets permuted into split order.
fn split_data(full: &BranchingData, split: TargetSplit) -> Result<BranchingData> {
    let order: Vec<usize> = split.order().to_vec();
    let sources: Vec<usize> = (0..full.sources().len()).collect();
    full.reorder(&order, &sources)
}

/// Converts an identity-product tuple from split order to target order.
pub fn to_target_order(split: TargetSplit, t: &MarkedTuple, full: &BranchingData) -> MarkedTuple {
    let e = t.entries();
    match split.j {
        1 => t.clone(),
        2 => {
            // (x0, x2, x1, x3) -> (x0, x2 x1 x2⁻¹, x2, x3)
            let by = e[1].inverse();
            let marks = t
                .marks()
                .iter()
                .enumerate()
                .map(|(a, m)| if full.image(a) == 1 { by.map_set(m) } else { m.clone() })
                .collect();
            MarkedTuple::new(
                vec![e[0].clone(), e[2].relabel(&by), e[1].clone(), e[3].clone()],
                marks,
            )
        }
        _ => MarkedTuple::new(
            vec![e[3].clone(), e[0].clone(), e[1].clone(), e[2].clone()],
            t.marks().to_vec(),
        ),
    }
}

/// Node monodromy of the first side, `(g_1 g_2)⁻¹`.
fn node_monodromy(t: &MarkedTuple) -> Permutation {
    t.entries()[0].then(&t.entries()[1]).inverse()
}

/// The rotation `z` advancing cycle `i` of `h` by `steps[i]`.
fn rotation(h: &Permutation, cycles: &[Vec<usize>], steps: &[u32]) -> Permutation {
    let mut images: Vec<usize> = (0..h.degree()).collect();
    for (cycle, &s) in cycles.iter().zip(steps) {
        for (i, &x) in cycle.iter().enumerate() {
            images[x] = cycle[(i + s as usize) % cycle.len()];
        }
    }
    Permutation::from_images(images).expect("rotation is a bijection")
}

/// Walks `h` from each cycle's smallest point, so cycle `i` lists
/// `x, h(x), h²(x), ...`.
fn ordered_cycles(h: &Permutation) -> Vec<Vec<usize>> {
    h.cycles()
}

/// Rotates the second side of an aligned tuple by `z`.
fn rotate_second_side(t: &MarkedTuple, z: &Permutation, second: &[bool]) -> MarkedTuple {
    let e = t.entries();
    let marks = t
        .marks()
        .iter()
        .zip(second)
        .map(|(m, &s)| if s { z.map_set(m) } else { m.clone() })
        .collect();
    MarkedTuple::new(
        vec![e[0].clone(), e[1].clone(), e[2].relabel(z), e[3].relabel(z)],
        marks,
    )
}

/// Every step vector in `Π Z/k_i`, in lexicographic order.
fn all_steps(lens: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &k in lens {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..k).map(move |s| {
                    let mut v = v.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleCover {
    pub split: TargetSplit,
    pub key: CanonicalKey,
    /// Aligned tuple in split order.
    pub tuple: MarkedTuple,
    /// Cycles of the node monodromy, each listed along the monodromy.
    pub node_cycles: Vec<Vec<usize>>,
    pub node_profile: Partition,
    pub multiplicity: u64,
}

impl AdmissibleCover {
    fn from_key(split: TargetSplit, key: CanonicalKey) -> Result<Self> {
        let tuple = key.decode()?;
        let h = node_monodromy(&tuple);
        let node_cycles = ordered_cycles(&h);
        let multiplicity = node_cycles.iter().map(|c| c.len() as u64).product();
        Ok(AdmissibleCover {
            split,
            key,
            node_profile: h.cycle_type(),
            node_cycles,
            tuple,
            multiplicity,
        })
    }

    pub fn first_side(&self) -> &[Permutation] {
        &self.tuple.entries()[..2]
    }

    pub fn second_side(&self) -> &[Permutation] {
        &self.tuple.entries()[2..]
    }
}

/// Whether each source's mark lies on the second side in split order.
fn second_side_sources(full: &BranchingData, split: TargetSplit) -> Vec<bool> {
    let order = split.order();
    (0..full.sources().len())
        .map(|a| order[2..].contains(&full.image(a)))
        .collect()
}

fn cover_key(t: &MarkedTuple, second: &[bool]) -> CanonicalKey {
    let h = node_monodromy(t);
    let cycles = ordered_cycles(&h);
    let lens: Vec<u32> = cycles.iter().map(|c| c.len() as u32).collect();
    all_steps(&lens)
        .iter()
        .map(|s| canonicalize(&rotate_second_side(t, &rotation(&h, &cycles, s), second)))
        .min()
        .expect("at least the identity rotation")
}

/// Bijections between cycles of `h` and cycles of `g` preserving lengths,
/// as lists of matched index pairs.
fn gluings(h_cycles: &[Vec<usize>], g_cycles: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut used = vec![false; g_cycles.len()];
    let mut current = Vec::new();
    fn recurse(
        i: usize,
        h: &[Vec<usize>],
        g: &[Vec<usize>],
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == h.len() {
            out.push(current.clone());
            return;
        }
        for j in 0..g.len() {
            if used[j] || g[j].len() != h[i].len() {
                continue;
            }
            used[j] = true;
            current.push((i, j));
            recurse(i + 1, h, g, used, current, out);
            current.pop();
            used[j] = false;
        }
    }
    recurse(0, h_cycles, g_cycles, &mut used, &mut current, &mut out);
    out
}

/// All admissible covers of the fully marked data over one split, one per
/// isomorphism class, ordered by key.
pub fn enumerate_admissible(
    full: &BranchingData,
    split: TargetSplit,
    opts: &Options,
) -> Result<Vec<AdmissibleCover>> {
    let report = validate_branching(full);
    report.clone().into_result()?;
    if full.targets().len() != 4 {
        return Err(Error::NotFourPoints(full.targets().len()));
    }
    if !report.fully_marked {
        return Err(Error::NotFullyMarked);
    }
    opts.ceilings.check_degree(full.degree())?;
    let sd = split_data(full, split)?;
    let d = full.degree() as usize;
    let a = class_representative(sd.branching(0));
    let c = class_representative(sd.branching(2));
    let bs = class_members(sd.branching(1));
    let es = class_members(sd.branching(3));
    opts.ceilings
        .check_tuples("admissible side pairs", bs.len() as u128 * es.len() as u128)?;
    let slots = sd.mark_slots();
    let second = second_side_sources(full, split);
    let sides2: Vec<(Permutation, Permutation, Partition)> = es
        .iter()
        .map(|e| {
            let ce = c.then(e);
            let lambda = ce.cycle_type();
            (e.clone(), ce, lambda)
        })
        .collect();

    let keys = fan_out(
        opts.execution,
        &bs,
        |b| {
            let mut found = BTreeSet::new();
            let h = a.then(b).inverse();
            let lambda = h.cycle_type();
            let h_cycles = ordered_cycles(&h);
            for (e, ce, mu) in &sides2 {
                if *mu != lambda {
                    continue;
                }
                let g_cycles = ordered_cycles(ce);
                for glue in gluings(&h_cycles, &g_cycles) {
                    // phi sends h-cycle i onto ce-cycle j, walking both forward
                    let mut phi_inv = vec![0usize; d];
                    for &(i, j) in &glue {
                        for (x, y) in h_cycles[i].iter().zip(&g_cycles[j]) {
                            phi_inv[*y] = *x;
                        }
                    }
                    let phi_inv = Permutation::from_images(phi_inv).expect("gluing is a bijection");
                    let entries = vec![a.clone(), b.clone(), c.relabel(&phi_inv), e.relabel(&phi_inv)];
                    if !is_transitive(&entries, d) {
                        continue;
                    }
                    for_each_marking(&entries, &slots, |marks| {
                        let t = MarkedTuple::new(entries.clone(), marks.to_vec());
                        found.insert(cover_key(&t, &second));
                    });
                }
            }
            found
        },
        BTreeSet::new,
        |mut x, y| {
            x.extend(y);
            x
        },
    );
    keys.into_iter()
        .map(|k| AdmissibleCover::from_key(split, k))
        .collect()
}

/// One branch of the normalized Hurwitz curve through a cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// Least rotation vector of the branch.
    pub rotation: Vec<u32>,
    /// `lcm` of the node ramification indices.
    pub local_degree: u64,
    /// `local_degree / k_i` for each source node.
    pub vanishing_orders: Vec<u64>,
    /// Key, in target order, of the smoothing at `rotation`.
    pub smoothed_key: CanonicalKey,
    /// Keys of every smoothing on this branch.
    pub sheet_keys: Vec<CanonicalKey>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchExpansion {
    pub branches: Vec<Branch>,
}

impl BranchExpansion {
    pub fn total_local_degree(&self) -> u64 {
        self.branches.iter().map(|b| b.local_degree).sum()
    }
}

/// Rotation vectors modulo the diagonal rotation, with their smoothings.
pub fn expand_branches(cover: &AdmissibleCover, full: &BranchingData) -> BranchExpansion {
    let t = &cover.tuple;
    let h = node_monodromy(t);
    let cycles = &cover.node_cycles;
    let lens: Vec<u32> = cycles.iter().map(|c| c.len() as u32).collect();
    let l = lens.iter().fold(1u64, |acc, &k| acc.lcm(&(k as u64)));
    let second = second_side_sources(full, cover.split);
    let smooth = |steps: &[u32]| {
        let rotated = rotate_second_side(t, &rotation(&h, cycles, steps), &second);
        canonicalize(&to_target_order(cover.split, &rotated, full))
    };
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut branches = Vec::new();
    for steps in all_steps(&lens) {
        if seen.contains(&steps) {
            continue;
        }
        let mut sheet_keys = Vec::new();
        let mut cur = steps.clone();
        for _ in 0..l {
            seen.insert(cur.clone());
            sheet_keys.push(smooth(&cur));
            cur = cur.iter().zip(&lens).map(|(&s, &k)| (s + 1) % k).collect();
        }
        branches.push(Branch {
            smoothed_key: sheet_keys[0].clone(),
            rotation: steps,
            local_degree: l,
            vanishing_orders: lens.iter().map(|&k| l / k as u64).collect(),
            sheet_keys,
        });
    }
    BranchExpansion { branches }
}

/// For each source node, the source labels on the side of its first-side
/// component, after checking the source curve is a tree of stable components.
pub fn node_label_sets(cover: &AdmissibleCover, full: &BranchingData) -> Result<Vec<BTreeSet<usize>>> {
    let t = &cover.tuple;
    let d = t.degree();
    let order = cover.split.order();
    let e = t.entries();
    let side1 = orbits(&e[..2], d);
    let side2 = orbits(&e[2..], d);
    let n1 = side1.len();
    let comp_of = |side: usize, x: usize| -> usize {
        if side == 0 {
            side1.iter().position(|o| o.contains(&x)).expect("covered")
        } else {
            n1 + side2.iter().position(|o| o.contains(&x)).expect("covered")
        }
    };
    let n_comp = n1 + side2.len();
    let edges: Vec<(usize, usize)> = cover
        .node_cycles
        .iter()
        .map(|c| (comp_of(0, c[0]), comp_of(1, c[0])))
        .collect();
    if edges.len() + 1 != n_comp {
        return Err(Error::ModelViolation(format!(
            "source curve over split is not a tree: {} components, {} nodes",
            n_comp,
            edges.len()
        )));
    }
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for (a, mark) in t.marks().iter().enumerate() {
        let pos = order.iter().position(|&b| b == full.image(a)).expect("split order covers");
        let side = usize::from(pos >= 2);
        labels[comp_of(side, mark[0] as usize)].push(a);
    }
    for (comp, ls) in labels.iter().enumerate() {
        let degree = edges.iter().filter(|&&(x, y)| x == comp || y == comp).count();
        if ls.len() + degree < 3 {
            return Err(Error::ModelViolation(format!(
                "unstable source component with {} marks and {} nodes",
                ls.len(),
                degree
            )));
        }
    }
    let mut out = Vec::with_capacity(edges.len());
    for (skip, &(start, _)) in edges.iter().enumerate() {
        let mut reached = vec![false; n_comp];
        reached[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for (i, &(u, v)) in edges.iter().enumerate() {
                if i == skip {
                    continue;
                }
                let next = if u == x { v } else if v == x { u } else { continue };
                if !reached[next] {
                    reached[next] = true;
                    stack.push(next);
                }
            }
        }
        out.push(
            (0..n_comp)
                .filter(|&c| reached[c])
                .flat_map(|c| labels[c].iter().copied())
                .collect(),
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverRecord {
    pub cover: AdmissibleCover,
    pub expansion: BranchExpansion,
    pub node_sets: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBoundary {
    pub split: TargetSplit,
    pub covers: Vec<CoverRecord>,
}

impl SplitBoundary {
    pub fn multiplicity_sum(&self) -> u64 {
        self.covers.iter().map(|c| c.cover.multiplicity).sum()
    }
}

/// Everything the boundary computations share: the completion, both
/// constellation sets, their components and the covers over each split.
#[derive(Debug, Clone)]
pub struct BoundaryAnalysis {
    pub original: BranchingData,
    pub completion: Completion,
    pub original_set: ConstellationSet,
    pub full_set: ConstellationSet,
    pub components: ComponentDecomposition,
    pub full_components: ComponentDecomposition,
    pub splits: Vec<SplitBoundary>,
}

pub fn analyze_boundary(data: &BranchingData, opts: &Options) -> Result<BoundaryAnalysis> {
    validate_branching(data).into_result()?;
    if data.targets().len() != 4 {
        return Err(Error::NotFourPoints(data.targets().len()));
    }
    let completion = fully_marked_completion(data)?;
    let full = &completion.full;
    let original_set = enumerate_marked(data, opts)?;
    let full_set = enumerate_marked(full, opts)?;
    let components = decompose_components(&original_set, opts.execution)?;
    let full_components = decompose_components(&full_set, opts.execution)?;
    let mut splits = Vec::new();
    for split in TargetSplit::all() {
        let covers = enumerate_admissible(full, split, opts)?
            .into_iter()
            .map(|cover| {
                let expansion = expand_branches(&cover, full);
                let node_sets = node_label_sets(&cover, full)?;
                Ok(CoverRecord {
                    cover,
                    expansion,
                    node_sets,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        splits.push(SplitBoundary { split, covers });
    }
    Ok(BoundaryAnalysis {
        original: data.clone(),
        completion,
        original_set,
        full_set,
        components,
        full_components,
        splits,
    })
}

impl BoundaryAnalysis {
    pub fn full(&self) -> &BranchingData {
        &self.completion.full
    }

    /// Original component of a fully marked class, by forgetting the added marks.
    pub fn component_of_full(&self, key: &CanonicalKey) -> Result<usize> {
        let t = key.decode()?;
        let forgotten = canonicalize(&t.truncate_marks(self.original.sources().len()));
        self.components
            .orbit_of(&forgotten)
            .ok_or_else(|| Error::ModelViolation("forgetting marks left the constellation set".into()))
    }

    /// Number of fully marked classes over an original component, or all.
    pub fn full_count(&self, component: Option<usize>) -> Result<u64> {
        let mut n = 0;
        for key in self.full_set.keys() {
            if component.is_none_or(|c| self.component_of_full(key).ok() == Some(c)) {
                n += 1;
            }
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitFlatness {
    pub split: TargetSplit,
    pub multiplicity_sum: u64,
    pub expected: u64,
    /// Smoothings reproduce every fully marked class exactly once.
    pub smoothings_biject: bool,
    /// Every cover's branch local degrees add up to its multiplicity.
    pub branches_consistent: bool,
}

impl SplitFlatness {
    pub fn ok(&self) -> bool {
        self.multiplicity_sum == self.expected && self.smoothings_biject && self.branches_consistent
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatnessReport {
    pub splits: Vec<SplitFlatness>,
}

impl FlatnessReport {
    pub fn ok(&self) -> bool {
        self.splits.iter().all(SplitFlatness::ok)
    }
}

pub fn flatness_check(analysis: &BoundaryAnalysis) -> FlatnessReport {
    let expected = analysis.full_set.total() as u64;
    let all: Vec<&CanonicalKey> = analysis.full_set.keys().collect();
    let splits = analysis
        .splits
        .iter()
        .map(|s| {
            let mut sheets: Vec<&CanonicalKey> = s
                .covers
                .iter()
                .flat_map(|c| c.expansion.branches.iter().flat_map(|b| b.sheet_keys.iter()))
                .collect();
            sheets.sort();
            SplitFlatness {
                split: s.split,
                multiplicity_sum: s.multiplicity_sum(),
                expected,
                smoothings_biject: sheets == all,
                branches_consistent: s
                    .covers
                    .iter()
                    .all(|c| c.expansion.total_local_degree() == c.cover.multiplicity),
            }
        })
        .collect();
    FlatnessReport { splits }
}

/// The identity `deg π₁ = rm(p) · (deg π₂ + deg E(p))` for one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiLedger {
    pub p: usize,
    pub deg_pi1: u64,
    pub rm_p: u64,
    pub deg_e: u64,
    /// Degree of the source map on the fully marked space.
    pub deg_pi2: i128,
}

/// One boundary incidence counted in `deg E(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contribution {
    pub p: usize,
    pub split: TargetSplit,
    pub cover: CanonicalKey,
    pub branch: usize,
    pub node: usize,
    pub labels: BTreeSet<usize>,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTop {
    pub value: u64,
    pub component: Option<usize>,
    pub deg_nu: u64,
    pub ledgers: Vec<PsiLedger>,
    pub contributions: Vec<Contribution>,
}

impl fmt::Display for PsiLedger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} deg_pi1={} rm={} degE={} deg_pi2_full={}",
            self.p, self.deg_pi1, self.rm_p, self.deg_e, self.deg_pi2
        )
    }
}

/// Top degree of the source map on a component (or the whole space), from
/// the boundary incidences of every point of `A`. Fails with a model
/// violation unless all four points give the same non-negative integer.
pub fn theta_top(analysis: &BoundaryAnalysis, component: Option<usize>) -> Result<ThetaTop> {
    let original = &analysis.original;
    let n_points = original.sources().len();
    if n_points != 4 {
        return Err(Error::NotFourPoints(n_points));
    }
    if let Some(c) = component {
        if c >= analysis.components.len() {
            return Err(Error::UnknownComponent(c));
        }
    }
    let deg_pi1 = analysis.full_count(component)?;
    let deg_nu = analysis.completion.deg_nu;
    let mut ledgers = Vec::new();
    let mut contributions = Vec::new();
    for p in 0..n_points {
        let mut deg_e = 0u64;
        for s in &analysis.splits {
            for rec in &s.covers {
                for (bi, branch) in rec.expansion.branches.iter().enumerate() {
                    if let Some(c) = component {
                        if analysis.component_of_full(&branch.smoothed_key)? != c {
                            continue;
                        }
                    }
                    for (ni, x) in rec.node_sets.iter().enumerate() {
                        let total = analysis.full().sources().len();
                        let complement: BTreeSet<usize> = (0..total).filter(|a| !x.contains(a)).collect();
                        for side in [x, &complement] {
                            let in_p: Vec<usize> = side.iter().copied().filter(|&a| a < n_points).collect();
                            if in_p == [p] && side.len() >= 2 {
                                let order = branch.vanishing_orders[ni];
                                deg_e += order;
                                contributions.push(Contribution {
                                    p,
                                    split: s.split,
                                    cover: rec.cover.key.clone(),
                                    branch: bi,
                                    node: ni,
                                    labels: side.clone(),
                                    order,
                                });
                            }
                        }
                    }
                }
            }
        }
        let rm_p = original.ramification(p) as u64;
        if deg_pi1 % rm_p != 0 {
            return Err(Error::ModelViolation(format!(
                "deg_pi1 = {deg_pi1} is not divisible by rm({}) = {rm_p}",
                original.sources()[p]
            )));
        }
        let deg_pi2 = (deg_pi1 / rm_p) as i128 - deg_e as i128;
        ledgers.push(PsiLedger {
            p,
            deg_pi1,
            rm_p,
            deg_e,
            deg_pi2,
        });
    }
    let first = ledgers[0].deg_pi2;
    if let Some(bad) = ledgers.iter().find(|l| l.deg_pi2 != first) {
        return Err(Error::ModelViolation(format!(
            "top degree depends on the chosen point: {} at {} but {} at {}",
            first,
            original.sources()[0],
            bad.deg_pi2,
            original.sources()[bad.p]
        )));
    }
    if first < 0 || first % deg_nu as i128 != 0 {
        return Err(Error::ModelViolation(format!(
            "top degree {first} of the fully marked space is negative or not divisible by deg_nu = {deg_nu}"
        )));
    }
    Ok(ThetaTop {
        value: (first / deg_nu as i128) as u64,
        component,
        deg_nu,
        ledgers,
        contributions,
    })
}

/// Euler characteristic of a fully marked component from the monodromy
/// around the three boundary points, with the puncture count per split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerReport {
    pub full_component: usize,
    pub degree: usize,
    /// Cycles of `A_0j` on the component's classes, `j = 1, 2, 3`.
    pub monodromy_cycles: Vec<usize>,
    /// Branches attributed to the component, per split.
    pub branch_counts: Vec<usize>,
    pub chi: i64,
}

impl EulerReport {
    pub fn consistent(&self) -> bool {
        self.monodromy_cycles == self.branch_counts && self.chi <= 2 && self.chi % 2 == 0
    }
}

pub fn euler_characteristic(analysis: &BoundaryAnalysis, full_component: usize) -> Result<EulerReport> {
    let dec = &analysis.full_components;
    let orbit = dec
        .orbits
        .get(full_component)
        .ok_or(Error::UnknownComponent(full_component))?;
    let keys: Vec<&CanonicalKey> = analysis.full_set.keys().collect();
    let members: BTreeSet<usize> = keys
        .iter()
        .enumerate()
        .filter(|(_, k)| dec.orbit_of(k) == Some(full_component))
        .map(|(i, _)| i)
        .collect();
    let mut monodromy_cycles = Vec::new();
    for j in 1..4 {
        let act = generator_action(&analysis.full_set, 0, j)?;
        let mut seen = BTreeSet::new();
        let mut cycles = 0;
        for &start in &members {
            if seen.contains(&start) {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while seen.insert(x) {
                x = act[x];
            }
        }
        monodromy_cycles.push(cycles);
    }
    let mut branch_counts: BTreeMap<TargetSplit, usize> = BTreeMap::new();
    for s in &analysis.splits {
        let count = s
            .covers
            .iter()
            .flat_map(|c| c.expansion.branches.iter())
            .filter(|b| dec.orbit_of(&b.smoothed_key) == Some(full_component))
            .count();
        branch_counts.insert(s.split, count);
    }
    let n = orbit.size();
    Ok(EulerReport {
        full_component,
        degree: n,
        chi: -(n as i64) + monodromy_cycles.iter().sum::<usize>() as i64,
        monodromy_cycles,
        branch_counts: branch_counts.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::Portrait;

    fn rabbit() -> BranchingData {
        Portrait::from_labels(
            &["inf", "0", "c1", "c2"],
            2,
            &[("inf", "inf"), ("0", "c1"), ("c1", "c2"), ("c2", "0")],
            &[("inf", 2), ("0", 2), ("c1", 1), ("c2", 1)],
            &[("inf", &[2]), ("0", &[1, 1]), ("c1", &[2]), ("c2", &[1, 1])],
        )
        .unwrap()
        .data()
        .clone()
    }

    #[test]
    fn rabbit_covers_per_split() {
        let full = fully_marked_completion(&rabbit()).unwrap().full;
        let opts = Options::serial();
        // {inf,0}: single cover with node (2)
        let s01 = enumerate_admissible(&full, TargetSplit::new(1).unwrap(), &opts).unwrap();
        assert_eq!(s01.len(), 1);
        assert_eq!(s01[0].multiplicity, 2);
        // {inf,c1}: two covers with node (1,1)
        let s02 = enumerate_admissible(&full, TargetSplit::new(2).unwrap(), &opts).unwrap();
        assert_eq!(s02.len(), 2);
        assert!(s02.iter().all(|c| c.multiplicity == 1 && c.node_profile.parts() == [1, 1]));
    }

    #[test]
    fn rabbit_flat_and_theta_top() {
        let a = analyze_boundary(&rabbit(), &Options::serial()).unwrap();
        let flat = flatness_check(&a);
        assert!(flat.ok(), "{flat:?}");
        let t = theta_top(&a, None).unwrap();
        assert_eq!(t.value, 1);
        let degs: Vec<u64> = t.ledgers.iter().map(|l| l.deg_e).collect();
        assert_eq!(degs, vec![0, 0, 1, 1]);
        let chi = euler_characteristic(&a, 0).unwrap();
        assert!(chi.consistent(), "{chi:?}");
        assert_eq!(chi.chi, 2);
    }

    #[test]
    fn single_node_branch() {
        let full = fully_marked_completion(&rabbit()).unwrap().full;
        let covers = enumerate_admissible(&full, TargetSplit::new(1).unwrap(), &Options::serial()).unwrap();
        let exp = expand_branches(&covers[0], &full);
        assert_eq!(exp.branches.len(), 1);
        assert_eq!(exp.branches[0].local_degree, 2);
        assert_eq!(exp.branches[0].vanishing_orders, vec![1]);
    }
}
