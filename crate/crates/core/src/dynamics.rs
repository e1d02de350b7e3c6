//! Polynomiality index, bound tables for the dynamical degrees, the band
//! available when the inverse correspondence is single valued, and iterates.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::count::{Ceilings, ConstellationSet};
use crate::error::{Error, Result};
use crate::portrait::Portrait;
use crate::root::{BoundValue, RootValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NoPeriodicCritical,
    Intermediate,
    TopologicalPolynomialLike,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::NoPeriodicCritical => "no-periodic-critical",
            Classification::Intermediate => "intermediate",
            Classification::TopologicalPolynomialLike => "topological-polynomial-like",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInfo {
    pub points: Vec<usize>,
    pub product: BigUint,
    pub length: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortraitCycleReport {
    pub cycles: Vec<CycleInfo>,
    pub pi: RootValue,
    pub ell0: Option<u32>,
    pub classification: Classification,
}

/// Cycles of a self-map of `{0..n}`, each starting at its smallest point.
fn functional_cycles(map: &[usize]) -> Vec<Vec<usize>> {
    let n = map.len();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut path = Vec::new();
        let mut x = start;
        while state[x] == 0 {
            state[x] = 1;
            path.push(x);
            x = map[x];
        }
        if state[x] == 1 {
            let pos = path.iter().position(|&y| y == x).expect("on path");
            let mut cycle = path[pos..].to_vec();
            let min = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap();
            cycle.rotate_left(min);
            cycles.push(cycle);
        }
        for y in path {
            state[y] = 2;
        }
    }
    cycles.sort();
    cycles
}

/// Cycle report for a self-map with big-integer local degrees and total degree `d`.
pub fn cycle_report(map: &[usize], rm: &[BigUint], d: &BigUint) -> Result<PortraitCycleReport> {
    let mut cycles = Vec::new();
    let mut pi = RootValue::one();
    let mut ell0: Option<u32> = None;
    for points in functional_cycles(map) {
        let product: BigUint = points.iter().map(|&p| rm[p].clone()).product();
        let length = points.len() as u32;
        let root = RootValue::new(product.clone(), length)?;
        if root > pi {
            pi = root;
        }
        // degree one has no ramification at all
        if !d.is_one() && points.iter().any(|&p| &rm[p] == d) {
            ell0 = Some(ell0.map_or(length, |l| l.min(length)));
        }
        cycles.push(CycleInfo {
            points,
            product,
            length,
        });
    }
    let classification = if pi.is_one() {
        Classification::NoPeriodicCritical
    } else if pi.index() == 1 && pi.radicand() == d {
        Classification::TopologicalPolynomialLike
    } else {
        Classification::Intermediate
    };
    Ok(PortraitCycleReport {
        cycles,
        pi,
        ell0,
        classification,
    })
}

/// The largest geometric mean of local degrees over the periodic cycles of `F`.
pub fn polynomiality_index(p: &Portrait) -> Result<PortraitCycleReport> {
    p.require_dynamics()?;
    let data = p.data();
    let rm: Vec<BigUint> = data.ram().iter().map(|&k| BigUint::from(k)).collect();
    cycle_report(data.map(), &rm, &BigUint::from(data.degree()))
}

/// The report for the `n`-th iterate: `F^n` with local degrees multiplied
/// along orbits and degree `d^n`.
pub fn iterate_cycle_report(p: &Portrait, n: u32) -> Result<PortraitCycleReport> {
    p.require_dynamics()?;
    if n == 0 {
        return Err(Error::Invalid("iterate count must be positive".into()));
    }
    let data = p.data();
    let len = p.len();
    let mut map: Vec<usize> = (0..len).collect();
    let mut rm: Vec<BigUint> = vec![BigUint::one(); len];
    for _ in 0..n {
        for a in 0..len {
            rm[a] *= data.ramification(map[a]);
            map[a] = data.image(map[a]);
        }
    }
    cycle_report(&map, &rm, &BigUint::from(data.degree()).pow(n))
}

/// Whether a periodic fully ramified point exists, and whether every other
/// critical point is periodic or there is exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KcReport {
    pub p0: Option<usize>,
    pub ell0: Option<u32>,
    pub critical_points: usize,
    pub kc1: bool,
    pub kc2: bool,
}

impl KcReport {
    pub fn holds(&self) -> bool {
        self.kc1 && self.kc2
    }
}

pub fn kc_conditions(p: &Portrait) -> Result<KcReport> {
    p.require_dynamics()?;
    let data = p.data();
    let d = data.degree();
    let cycles = functional_cycles(data.map());
    let periodic: Vec<Option<u32>> = (0..p.len())
        .map(|x| {
            cycles
                .iter()
                .find(|c| c.contains(&x))
                .map(|c| c.len() as u32)
        })
        .collect();
    let p0 = (0..p.len())
        .filter(|&x| data.ramification(x) == d && d > 1 && periodic[x].is_some())
        .min_by_key(|&x| (periodic[x], x));
    // unmarked critical points never lie in cycles: their images are in P
    let mut critical = 0usize;
    let mut others_periodic = true;
    for b in 0..p.len() {
        let total = data.branching(b).parts().iter().filter(|&&k| k > 1).count();
        let marked: Vec<usize> = data
            .fiber(b)
            .into_iter()
            .filter(|&a| data.ramification(a) > 1)
            .collect();
        critical += total;
        if total > marked.len() {
            others_periodic = false;
        }
        for a in marked {
            if Some(a) != p0 && periodic[a].is_none() {
                others_periodic = false;
            }
        }
    }
    let kc1 = p0.is_some();
    let kc2 = kc1 && (others_periodic || critical == 2);
    Ok(KcReport {
        p0,
        ell0: p0.and_then(|x| periodic[x]),
        critical_points: critical,
        kc1,
        kc2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub k: usize,
    pub lower: BoundValue,
    pub upper: BoundValue,
    pub pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBoundTable {
    pub n_minus_3: usize,
    pub r: RootValue,
    pub rows: Vec<BoundRow>,
    /// Set when `R > 1`, so the degrees strictly decrease in `k`.
    pub strictly_decreasing: bool,
}

fn integer_bound(n: &BigUint) -> BoundValue {
    BoundValue::new(BigRational::from_integer(n.clone().into()), RootValue::one(), 0)
}

/// Interval bounds `Θ_top · R^(n-3-k) ≤ Θ_k ≤ Θ_0 · R^(-k)`, with the endpoint
/// rows replaced by their exact values when known.
pub fn degree_bounds(
    theta0: &BigUint,
    theta_top: Option<&BigUint>,
    r: &RootValue,
    n: usize,
) -> Result<DegreeBoundTable> {
    if n < 4 {
        return Err(Error::TooFewPoints(n));
    }
    if theta0 < &BigUint::one() {
        return Err(Error::Invalid("theta0 must be positive".into()));
    }
    let top = n - 3;
    let one = BigUint::one();
    let theta_t = theta_top.unwrap_or(&one);
    let coeff = |x: &BigUint| BigRational::from_integer(x.clone().into());
    let chain_end = BoundValue::new(coeff(theta_t), r.clone(), top as i64);
    if integer_bound(theta0) < chain_end {
        return Err(Error::BoundContradiction(format!(
            "theta0 = {theta0} is below R^{top} * theta_top = {chain_end}"
        )));
    }
    let rows = (0..=top)
        .map(|k| {
            let lower = BoundValue::new(coeff(theta_t), r.clone(), (top - k) as i64);
            let upper = BoundValue::new(coeff(theta0), r.clone(), -(k as i64));
            if k == 0 {
                BoundRow {
                    k,
                    lower: integer_bound(theta0),
                    upper: integer_bound(theta0),
                    pinned: true,
                }
            } else if k == top && theta_top.is_some() {
                BoundRow {
                    k,
                    lower: integer_bound(theta_t),
                    upper: integer_bound(theta_t),
                    pinned: true,
                }
            } else {
                BoundRow {
                    k,
                    lower,
                    upper,
                    pinned: false,
                }
            }
        })
        .collect();
    Ok(DegreeBoundTable {
        n_minus_3: top,
        r: r.clone(),
        rows,
        strictly_decreasing: !r.is_one(),
    })
}

/// Bounds for the inverse correspondence: row `k` becomes row `n-3-k`.
pub fn inverse_transform(t: &DegreeBoundTable) -> DegreeBoundTable {
    let rows = t
        .rows
        .iter()
        .rev()
        .enumerate()
        .map(|(k, row)| BoundRow { k, ..row.clone() })
        .collect();
    DegreeBoundTable {
        n_minus_3: t.n_minus_3,
        r: t.r.clone(),
        rows,
        strictly_decreasing: t.strictly_decreasing,
    }
}

/// A real number `q · log d`, with `q` exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogMultiple {
    pub coeff: BigRational,
    pub d: u32,
}

impl LogMultiple {
    pub fn new(coeff: BigRational, d: u32) -> Self {
        LogMultiple { coeff, d }
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN) * (self.d as f64).ln()
    }

    /// Decimal rendering with 12 significant digits.
    pub fn decimal(&self) -> String {
        significant(self.to_f64(), 12)
    }
}

impl fmt::Display for LogMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff == BigRational::from_integer(0.into()) {
            return f.write_str("0");
        }
        if !self.coeff.is_one() {
            write!(f, "({})*", self.coeff)?;
        }
        write!(f, "log({})", self.d)
    }
}

/// `x` rounded to `digits` significant digits in plain decimal notation.
pub fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandRow {
    pub k: usize,
    pub lower: LogMultiple,
    pub upper: LogMultiple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub d: u32,
    pub n_points: usize,
    pub ell0: u32,
    pub rows: Vec<BandRow>,
    /// Lower bound on the Lyapunov exponents of the invariant measure.
    pub lyapunov: LogMultiple,
    /// Upper bound on the topological entropy of the inverse.
    pub entropy: LogMultiple,
}

/// Rows `(k, (k/ell0) log d, k log d)` bounding `log Θ_k` of the inverse when
/// it is single valued.
pub fn single_valued_band(d: u32, n_points: usize, ell0: u32) -> Result<Band> {
    if d < 2 {
        return Err(Error::Invalid("band needs degree at least 2".into()));
    }
    if n_points < 4 {
        return Err(Error::TooFewPoints(n_points));
    }
    if ell0 < 1 {
        return Err(Error::Invalid("ell0 must be at least 1".into()));
    }
    let q = |n: i64, m: i64| BigRational::new(n.into(), m.into());
    let rows = (0..=n_points - 3)
        .map(|k| BandRow {
            k,
            lower: LogMultiple::new(q(k as i64, ell0 as i64), d),
            upper: LogMultiple::new(q(k as i64, 1), d),
        })
        .collect();
    Ok(Band {
        d,
        n_points,
        ell0,
        rows,
        lyapunov: LogMultiple::new(q(1, 2 * ell0 as i64), d),
        entropy: LogMultiple::new(q(n_points as i64 - 3, 1), d),
    })
}

/// `(n, Θ_0^n, Θ_top^n)` for `n = 1..=iterations`.
pub fn iterate_counts(theta0: &BigUint, theta_top: &BigUint, iterations: u32) -> Vec<(u32, BigUint, BigUint)> {
    (1..=iterations)
        .map(|n| (n, theta0.pow(n), theta_top.pow(n)))
        .collect()
}

/// Fiber size of the source map of the `n`-fold composite, by listing the
/// chains of classes: each step lifts through a full fiber of the next factor.
pub fn composite_fiber_count(cs: &ConstellationSet, n: u32, ceilings: &Ceilings) -> Result<BigUint> {
    let width = cs.total();
    let size = (width as u128).checked_pow(n).unwrap_or(u128::MAX);
    ceilings.check_tuples("composite chain count", size)?;
    let mut chains: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        chains = chains
            .iter()
            .flat_map(|c| {
                (0..width).map(move |i| {
                    let mut c = c.clone();
                    c.push(i);
                    c
                })
            })
            .collect();
    }
    Ok(BigUint::from(chains.len()))
}
