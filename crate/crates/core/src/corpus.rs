//! Exhaustive generators of small branching data and portraits, used by the
//! test suites and benchmarks.

use std::collections::BTreeSet;

use crate::partition::Partition;
use crate::portrait::{validate_branching, BranchingData, Portrait};

/// All partitions of `n`, each in decreasing order.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition::new(prefix.clone()).expect("positive parts"));
            return;
        }
        for p in (1..=n.min(max)).rev() {
            prefix.push(p);
            go(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Every `k`-tuple of partitions of `d` satisfying the Riemann-Hurwitz count.
pub fn branch_profiles(d: u32, k: usize) -> Vec<Vec<Partition>> {
    let parts = partitions(d);
    let target = 2 * d as i64 - 2;
    let mut out = Vec::new();
    fn go(
        k: usize,
        parts: &[Partition],
        d: u32,
        remaining: i64,
        prefix: &mut Vec<Partition>,
        out: &mut Vec<Vec<Partition>>,
    ) {
        if prefix.len() == k {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for p in parts {
            let w = d as i64 - p.len() as i64;
            if w <= remaining {
                prefix.push(p.clone());
                go(k, parts, d, remaining - w, prefix, out);
                prefix.pop();
            }
        }
    }
    go(k, &parts, d, target, &mut Vec::new(), &mut out);
    out
}

/// The fully marked datum with one source per part of each branching.
pub fn fully_marked(profile: &[Partition]) -> BranchingData {
    let d = profile[0].total();
    let targets: Vec<String> = (0..profile.len()).map(|b| format!("t{b}")).collect();
    let mut sources = Vec::new();
    let mut map = Vec::new();
    let mut ram = Vec::new();
    for (b, lambda) in profile.iter().enumerate() {
        for (i, &part) in lambda.parts().iter().enumerate() {
            sources.push(format!("s{b}_{i}"));
            map.push(b);
            ram.push(part);
        }
    }
    BranchingData::new(sources, targets, d, map, ram, profile.to_vec()).expect("well formed")
}

/// Fully marked data with `k` targets for every degree up to `max_degree`.
pub fn fully_marked_data(max_degree: u32, k: usize) -> Vec<BranchingData> {
    (1..=max_degree)
        .flat_map(|d| branch_profiles(d, k))
        .map(|p| fully_marked(&p))
        .collect()
}

/// Assignments of values to `n` sources forming a submultiset of `lambda`.
fn submultiset_assignments(lambda: &Partition, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut avail: Vec<u32> = lambda.parts().to_vec();
    fn go(n: usize, avail: &mut Vec<u32>, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let mut tried = BTreeSet::new();
        for i in 0..avail.len() {
            let v = avail[i];
            if !tried.insert(v) {
                continue;
            }
            avail.remove(i);
            prefix.push(v);
            go(n, avail, prefix, out);
            prefix.pop();
            avail.insert(i, v);
        }
    }
    go(n, &mut avail, &mut Vec::new(), &mut out);
    out
}

type PortraitShape = (Vec<usize>, Vec<u32>, Vec<Partition>);

fn relabeled(shape: &PortraitShape, sigma: &[usize]) -> PortraitShape {
    // point x is renamed sigma[x]
    let n = sigma.len();
    let mut map = vec![0; n];
    let mut ram = vec![0; n];
    let mut br = vec![Partition::ones(1); n];
    for x in 0..n {
        map[sigma[x]] = sigma[shape.0[x]];
        ram[sigma[x]] = shape.1[x];
        br[sigma[x]] = shape.2[x].clone();
    }
    (map, ram, br)
}

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    crate::perm::all_permutations(n)
        .into_iter()
        .map(|p| p.images().iter().map(|&x| x as usize).collect())
        .collect()
}

/// Every valid portrait on `n` points of degree `d`, one per isomorphism
/// class under renaming of points, in a deterministic order.
pub fn portraits(d: u32, n: usize) -> Vec<Portrait> {
    let perms = permutations_of(n);
    let mut seen: BTreeSet<PortraitShape> = BTreeSet::new();
    let mut out = Vec::new();
    let n_maps = n.pow(n as u32);
    for profile in branch_profiles(d, n) {
        for code in 0..n_maps {
            let mut map = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                map.push(c % n);
                c /= n;
            }
            // choose rm fiber by fiber
            let mut rams: Vec<Vec<u32>> = vec![vec![0; n]];
            for (b, lambda) in profile.iter().enumerate() {
                let fiber: Vec<usize> = (0..n).filter(|&a| map[a] == b).collect();
                let options = submultiset_assignments(lambda, fiber.len());
                rams = rams
                    .into_iter()
                    .flat_map(|r| {
                        let fiber = fiber.clone();
                        options.iter().map(move |vals| {
                            let mut r = r.clone();
                            for (&a, &v) in fiber.iter().zip(vals) {
                                r[a] = v;
                            }
                            r
                        })
                    })
                    .collect();
            }
            for ram in rams {
                let shape = (map.clone(), ram, profile.clone());
                let canon = perms
                    .iter()
                    .map(|s| relabeled(&shape, s))
                    .min()
                    .expect("nonempty");
                if !seen.insert(canon.clone()) {
                    continue;
                }
                let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
                let p = Portrait::new(points, d, canon.0, canon.1, canon.2).expect("well formed");
                if validate_branching(p.data()).ok {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Data with some preimages left unmarked: every way of dropping sources
/// from the fully marked datum while keeping at least three.
pub fn partially_marked(profile: &[Partition]) -> Vec<BranchingData> {
    let full = fully_marked(profile);
    let n = full.sources().len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let keep: Vec<usize> = (0..n).filter(|&a| mask & (1 << a) != 0).collect();
        if keep.len() < 3 {
            continue;
        }
        let data = BranchingData::new(
            keep.iter().map(|&a| full.sources()[a].clone()).collect(),
            full.targets().to_vec(),
            full.degree(),
            keep.iter().map(|&a| full.image(a)).collect(),
            keep.iter().map(|&a| full.ramification(a)).collect(),
            full.branch().to_vec(),
        )
        .expect("well formed");
        out.push(data);
    }
    out
}
