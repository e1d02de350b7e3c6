//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Tolerances are pinned here: counts and bounds compare exactly, decimals
//! within `DECIMAL_TOL`, and wall-clock limits are per criterion.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hurwitz_cli::{run, FigureParams, OutputMode, RunConfig, Verb};
use hurwitz_core::boundary::{analyze_boundary, flatness_check, theta_top};
use hurwitz_core::braid::{
    apply_pure_generator, apply_pure_generator_inverse, decompose_components, generator_pairs,
};
use hurwitz_core::corpus;
use hurwitz_core::count::{enumerate_marked, hurwitz_number, Execution, Options};
use hurwitz_core::dynamics::{polynomiality_index, single_valued_band};
use hurwitz_core::perm::{
    all_permutations, canonicalize, for_each_marking, is_transitive, CanonicalKey, MarkedTuple,
    Permutation,
};
use hurwitz_core::portrait::{fully_marked_completion, BranchingData, Portrait};
use hurwitz_core::root::{compare_roots, BoundValue, RootValue};
use hurwitz_core::Partition;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DECIMAL_TOL: f64 = 1e-12;
const FIXTURE_LIMIT: Duration = Duration::from_secs(5);
const FLATNESS_LIMIT: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Machine output of `report` as a key map, plus the orbit lines.
fn report(file: &str) -> Result<(BTreeMap<String, String>, Vec<String>), String> {
    let cfg = RunConfig {
        mode: OutputMode::Machine,
        ..RunConfig::new(Verb::Report, Some(data(file)))
    };
    let out = run(&cfg);
    ensure(out.code == 0, format!("report exited {}: {}", out.code, out.stderr))?;
    let mut kv = BTreeMap::new();
    let mut orbits = Vec::new();
    for line in out.stdout.lines() {
        if line.starts_with("orbit ") {
            orbits.push(line.to_string());
        } else if let Some((k, v)) = line.split_once('=') {
            kv.insert(k.to_string(), v.to_string());
        }
    }
    Ok((kv, orbits))
}

fn expect(kv: &BTreeMap<String, String>, pairs: &[(&str, &str)]) -> Result<(), String> {
    for (k, v) in pairs {
        match kv.get(*k) {
            Some(got) if got == v => {}
            got => return Err(format!("{k}: expected {v}, got {got:?}")),
        }
    }
    Ok(())
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail}; {took:.2?}"))
}

fn rabbit() -> Check {
    timed(FIXTURE_LIMIT, || {
        let (kv, orbits) = report("rabbit.txt")?;
        expect(
            &kv,
            &[
                ("deg_pi1", "2"),
                ("components", "1"),
                ("component_sizes", "2"),
                ("pi", "2^(1/1)"),
                ("theta_top", "1"),
                ("bound_k0", "[2,2]"),
                ("bound_k1", "[1,1]"),
                ("inverse_bound_k0", "[1,1]"),
                ("inverse_bound_k1", "[2,2]"),
            ],
        )?;
        ensure(orbits.len() == 1 && orbits[0].starts_with("orbit 0 size 2 "), "one orbit of size 2")?;
        // the inverse top row is d^(|P|-3) = 2
        Ok("deg 2, one orbit of 2, PI 2, top 1, tables exact".into())
    })
}

fn z2_plus_i() -> Check {
    timed(FIXTURE_LIMIT, || {
        let (kv, _) = report("z2_plus_i.txt")?;
        expect(
            &kv,
            &[("deg_pi1", "2"), ("components", "1"), ("pi", "2^(1/1)"), ("theta_top", "1")],
        )?;
        let chain = BoundValue::new(BigRational::from_integer(1.into()), RootValue::integer(2), 1);
        ensure(BoundValue::integer(2).cmp(&chain) == Ordering::Equal, "2 = 2 * 1")?;
        Ok("deg 2, one component, PI 2, top 1, chain tight".into())
    })
}

fn identity() -> Check {
    let (kv, _) = report("identity.txt")?;
    expect(
        &kv,
        &[
            ("deg_pi1", "1"),
            ("full_count", "1"),
            ("components", "1"),
            ("pi", "1^(1/1)"),
            ("theta_top", "1"),
            ("bound_k0", "[1,1]"),
            ("bound_k1", "[1,1]"),
        ],
    )?;
    Ok("all counts 1, PI 1, bounds [1,1]".into())
}

/// A random fully marked datum with four targets and degree at most 3.
fn random_fully_marked(rng: &mut ChaCha8Rng) -> BranchingData {
    loop {
        let d = rng.gen_range(1..=3);
        let parts = corpus::partitions(d);
        let profile: Vec<Partition> = (0..4).map(|_| parts.choose(rng).unwrap().clone()).collect();
        let weight: u32 = profile.iter().map(|p| d - p.len() as u32).sum();
        if weight == 2 * d - 2 {
            return corpus::fully_marked(&profile);
        }
    }
}

fn flatness() -> Check {
    timed(FLATNESS_LIMIT, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut splits = 0;
        for _ in 0..24 {
            let datum = random_fully_marked(&mut rng);
            let n = hurwitz_number(&datum, &Options::serial()).map_err(|e| e.to_string())? as u64;
            let a = analyze_boundary(&datum, &Options::default()).map_err(|e| e.to_string())?;
            for s in &a.splits {
                ensure(s.multiplicity_sum() == n, format!("{datum:?}: sum {} != {n}", s.multiplicity_sum()))?;
                for c in &s.covers {
                    ensure(
                        c.expansion.total_local_degree() == c.cover.multiplicity,
                        "branch degrees differ from multiplicity",
                    )?;
                }
                splits += 1;
            }
            ensure(flatness_check(&a).ok(), "smoothing bijection failed")?;
        }
        Ok(format!("24 data, {splits} splits"))
    })
}

fn four_point_corpus() -> Vec<Portrait> {
    (1..=3).flat_map(|d| corpus::portraits(d, 4)).collect()
}

fn endpoints(corpus: &[Portrait]) -> Check {
    let mut checked = 0;
    let mut violations = 0;
    for p in corpus {
        let a = analyze_boundary(p.data(), &Options::default()).map_err(|e| e.to_string())?;
        let Ok(top) = theta_top(&a, None) else { continue };
        let theta0 = BoundValue::integer(a.original_set.total() as u64);
        let coeff = BigRational::from_integer(top.value.into());
        let r = RootValue::integer(*p.data().ram().iter().max().unwrap() as u64);
        let pi = polynomiality_index(p).map_err(|e| e.to_string())?.pi;
        for ratio in [r, pi] {
            if theta0 < BoundValue::new(coeff.clone(), ratio, 1) {
                violations += 1;
            }
        }
        checked += 1;
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    ensure(checked > 400, format!("only {checked} portraits"))?;
    Ok(format!("{checked} portraits, 0 violations"))
}

fn theta_consistency(corpus: &[Portrait]) -> Check {
    for p in corpus {
        let a = analyze_boundary(p.data(), &Options::default()).map_err(|e| e.to_string())?;
        let whole = theta_top(&a, None).map_err(|e| format!("{:?}: {e}", p.points()))?;
        let first = whole.ledgers[0].deg_pi2;
        ensure(whole.ledgers.iter().all(|l| l.deg_pi2 == first), "depends on p")?;
        ensure(first == whole.value as i128 * whole.deg_nu as i128, "not integral")?;
        let mut sum = 0;
        for c in 0..a.components.len() {
            sum += theta_top(&a, Some(c)).map_err(|e| e.to_string())?.value;
        }
        ensure(sum == whole.value, "not additive over components")?;
    }
    Ok(format!("{} portraits", corpus.len()))
}

/// Orbit-minimal raw encoding under relabeling by every permutation.
fn orbit_min(t: &MarkedTuple, group: &[Permutation]) -> Vec<u8> {
    group
        .iter()
        .map(|g| {
            let r = t.relabel(g);
            let mut v: Vec<u8> = r.entries().iter().flat_map(|e| e.images().to_vec()).collect();
            for m in r.marks() {
                v.push(u8::MAX);
                v.extend(m);
            }
            v
        })
        .min()
        .unwrap()
}

fn brute_force_keys(data: &BranchingData) -> BTreeSet<CanonicalKey> {
    let d = data.degree() as usize;
    let group = all_permutations(d);
    let k = data.targets().len();
    let slots = data.mark_slots();
    let mut classes: BTreeMap<Vec<u8>, MarkedTuple> = BTreeMap::new();
    let total = group.len().pow(k as u32);
    for mut code in 0..total {
        let entries: Vec<Permutation> = (0..k)
            .map(|_| {
                let g = group[code % group.len()].clone();
                code /= group.len();
                g
            })
            .collect();
        let ok = entries.iter().enumerate().all(|(b, g)| &g.cycle_type() == data.branching(b))
            && entries.iter().fold(Permutation::identity(d), |a, g| a.then(g)).is_identity()
            && is_transitive(&entries, d);
        if ok {
            for_each_marking(&entries, &slots, |marks| {
                let t = MarkedTuple::new(entries.clone(), marks.to_vec());
                classes.entry(orbit_min(&t, &group)).or_insert(t);
            });
        }
    }
    classes.values().map(canonicalize).collect()
}

fn oracle() -> Check {
    let mut data = Vec::new();
    for d in 1..=3 {
        // data needs at least three targets
        for k in 3..=4 {
            for profile in corpus::branch_profiles(d, k) {
                data.push(corpus::fully_marked(&profile));
                data.extend(corpus::partially_marked(&profile).into_iter().step_by(7));
            }
        }
    }
    for datum in &data {
        let set = enumerate_marked(datum, &Options::default()).map_err(|e| e.to_string())?;
        let keys: BTreeSet<CanonicalKey> = set.keys().cloned().collect();
        ensure(keys == brute_force_keys(datum), format!("key sets differ for {datum:?}"))?;
    }
    Ok(format!("{} data, key sets equal", data.len()))
}

fn braids() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pool: Vec<(BranchingData, MarkedTuple)> = Vec::new();
    for d in 2..=4 {
        for profile in corpus::branch_profiles(d, 4) {
            let datum = corpus::fully_marked(&profile);
            let set = enumerate_marked(&datum, &Options::default()).map_err(|e| e.to_string())?;
            pool.extend(set.iter().map(|(_, t)| (datum.clone(), t.clone())));
        }
    }
    let sample: Vec<_> = pool.choose_multiple(&mut rng, 100).cloned().collect();
    ensure(sample.len() == 100, "fewer than 100 tuples")?;
    for (datum, t) in &sample {
        for (i, j) in generator_pairs(4) {
            let moved = apply_pure_generator(t, datum, i, j).map_err(|e| e.to_string())?;
            moved.check(datum).map_err(|e| format!("A_{i}{j}: {e}"))?;
            let back = apply_pure_generator_inverse(&moved, datum, i, j).map_err(|e| e.to_string())?;
            ensure(&back == t, "round trip is not the identity")?;
        }
    }
    let mut data = corpus::fully_marked_data(3, 4);
    data.push(fully_marked_completion(&corpus::fully_marked_data(2, 4)[0]).map_err(|e| e.to_string())?.full);
    for datum in &data {
        let set = enumerate_marked(datum, &Options::default()).map_err(|e| e.to_string())?;
        let dec = decompose_components(&set, Execution::default()).map_err(|e| e.to_string())?;
        ensure(dec.total() == set.total(), "orbit sizes do not sum to the total")?;
        let mut order = vec![0, 1, 2, 3];
        order.shuffle(&mut rng);
        let sources: Vec<usize> = (0..datum.sources().len()).collect();
        let r = datum.reorder(&order, &sources).map_err(|e| e.to_string())?;
        let rs = enumerate_marked(&r, &Options::default()).map_err(|e| e.to_string())?;
        let rd = decompose_components(&rs, Execution::default()).map_err(|e| e.to_string())?;
        ensure(rd.size_profile() == dec.size_profile(), "orbit sizes change under reordering")?;
    }
    Ok(format!("100 tuples x 6 generators, {} decompositions", data.len()))
}

fn roots() -> Check {
    let r = |m: u64, l: u32| RootValue::new(m, l).unwrap();
    ensure(r(8, 3) == r(2, 1), "(8,3) != (2,1)")?;
    ensure(compare_roots(&r(6, 2), &r(2, 1)) == Ordering::Greater, "(6,2) <= (2,1)")?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let values: Vec<RootValue> = (0..300)
        .map(|_| r(rng.gen_range(1..=1_000_000), rng.gen_range(1..=8)))
        .collect();
    for v in &values {
        for k in 2..=v.index() {
            if v.index() % k == 0 {
                let root = v.radicand().nth_root(k);
                ensure(root.pow(k) != *v.radicand(), format!("{v} is not reduced"))?;
            }
        }
        // the same value written with a larger index reduces back
        let lifted = RootValue::new(v.radicand().pow(3), v.index() * 3).unwrap();
        ensure(&lifted == v, format!("{v} does not reduce canonically"))?;
    }
    for a in values.iter().take(60) {
        for b in values.iter().take(60) {
            ensure(compare_roots(a, b) == compare_roots(b, a).reverse(), "not antisymmetric")?;
            for c in values.iter().take(20) {
                if a <= b && b <= c {
                    ensure(a <= c, "not transitive")?;
                }
            }
            // multiplying radicands by the same power preserves order for equal indices
            if a.index() == b.index() {
                let s = BigUint::from(7u32).pow(a.index());
                let a2 = RootValue::new(a.radicand() * &s, a.index()).unwrap();
                let b2 = RootValue::new(b.radicand() * &s, b.index()).unwrap();
                ensure(compare_roots(&a2, &b2) == compare_roots(a, b), "not multiplicative")?;
            }
        }
    }
    Ok("300 random roots, laws hold".into())
}

fn six_fold() -> BranchingData {
    BranchingData::from_labels(
        &["a", "b", "c", "e"],
        &["a", "b", "c", "e"],
        3,
        &[("a", "a"), ("b", "b"), ("c", "e"), ("e", "e")],
        &[("a", 3), ("b", 3), ("c", 1), ("e", 1)],
        &[("a", &[3]), ("b", &[3]), ("c", &[1, 1, 1]), ("e", &[1, 1, 1])],
    )
    .unwrap()
}

fn deg_nu_factor() -> Check {
    let mut data: Vec<BranchingData> = Vec::new();
    for d in 1..=3 {
        for profile in corpus::branch_profiles(d, 4) {
            data.extend(corpus::partially_marked(&profile).into_iter().step_by(5));
        }
    }
    data.push(six_fold());
    let mut max_nu = 0;
    for datum in &data {
        let c = fully_marked_completion(datum).map_err(|e| e.to_string())?;
        let n = hurwitz_number(datum, &Options::default()).map_err(|e| e.to_string())?;
        let full = hurwitz_number(&c.full, &Options::default()).map_err(|e| e.to_string())?;
        ensure(full == c.deg_nu as u128 * n, format!("{full} != {} * {n}", c.deg_nu))?;
        max_nu = max_nu.max(c.deg_nu);
    }
    ensure(max_nu >= 6, "no case with deg_nu = 6")?;
    Ok(format!("{} data, largest deg_nu {max_nu}", data.len()))
}

fn figure_rows(d: u32, n: usize, ell0: u32) -> Result<Vec<(usize, f64, f64)>, String> {
    let mut cfg = RunConfig::new(Verb::Figure, None);
    cfg.figure = FigureParams {
        degree: Some(d),
        points: Some(n),
        ell0: Some(ell0),
    };
    let out = run(&cfg);
    ensure(out.code == 0, out.stderr.clone())?;
    let mut lines = out.stdout.lines().filter(|l| !l.starts_with('#'));
    ensure(lines.next() == Some("k,lower_log,upper_log"), "bad CSV header")?;
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let p = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
            Ok((f[0].parse().map_err(|_| "bad k")?, p(f[1])?, p(f[2])?))
        })
        .collect()
}

fn figure() -> Check {
    let ln2 = 2f64.ln();
    let line = figure_rows(2, 4, 1)?;
    ensure(line.len() == 2, "expected rows k = 0, 1")?;
    for &(k, lo, hi) in &line {
        ensure(lo == hi, "band does not degenerate")?;
        ensure((hi - k as f64 * ln2).abs() < DECIMAL_TOL, "not the line of slope log 2")?;
    }
    let band = figure_rows(2, 5, 2)?;
    let (_, lo, hi) = band[1];
    ensure((lo - 0.5 * ln2).abs() < DECIMAL_TOL && (hi - ln2).abs() < DECIMAL_TOL, "k=1 row off")?;
    for (d, ell0) in [(2, 1), (2, 2), (3, 1)] {
        let b = single_valued_band(d, 4, ell0).map_err(|e| e.to_string())?;
        ensure(
            b.lyapunov.coeff == BigRational::new(1.into(), (2 * ell0 as i64).into()) && b.lyapunov.d == d,
            "Lyapunov bound is not (1/(2 ell0)) log d",
        )?;
    }
    Ok(format!("within {DECIMAL_TOL:e}, Lyapunov exact"))
}

fn main() -> ExitCode {
    let corpus = four_point_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("rabbit end to end", Box::new(rabbit)),
        ("z^2+i end to end", Box::new(z2_plus_i)),
        ("degree one identity", Box::new(identity)),
        ("flatness of the target map", Box::new(flatness)),
        ("endpoint inequalities", Box::new(|| endpoints(&corpus))),
        ("top degree consistency", Box::new(|| theta_consistency(&corpus))),
        ("enumeration oracle", Box::new(oracle)),
        ("braid suite", Box::new(braids)),
        ("exact roots", Box::new(roots)),
        ("fully marked factor", Box::new(deg_nu_factor)),
        ("figure band", Box::new(figure)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
