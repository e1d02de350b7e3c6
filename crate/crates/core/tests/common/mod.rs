#![allow(dead_code)]

use hurwitz_core::portrait::{BranchingData, Portrait};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rabbit() -> Portrait {
    Portrait::from_labels(
        &["inf", "0", "c1", "c2"],
        2,
        &[("inf", "inf"), ("0", "c1"), ("c1", "c2"), ("c2", "0")],
        &[("inf", 2), ("0", 2), ("c1", 1), ("c2", 1)],
        &[("inf", &[2]), ("0", &[1, 1]), ("c1", &[2]), ("c2", &[1, 1])],
    )
    .unwrap()
}

/// z^2 + i: the finite critical point is strictly preperiodic.
pub fn z2_plus_i() -> Portrait {
    Portrait::from_labels(
        &["inf", "i", "u", "v"],
        2,
        &[("inf", "inf"), ("i", "u"), ("u", "v"), ("v", "u")],
        &[("inf", 2), ("i", 1), ("u", 1), ("v", 1)],
        &[("inf", &[2]), ("i", &[2]), ("u", &[1, 1]), ("v", &[1, 1])],
    )
    .unwrap()
}

pub fn identity_portrait() -> Portrait {
    Portrait::from_labels(
        &["a", "b", "c", "e"],
        1,
        &[("a", "a"), ("b", "b"), ("c", "c"), ("e", "e")],
        &[("a", 1), ("b", 1), ("c", 1), ("e", 1)],
        &[("a", &[1]), ("b", &[1]), ("c", &[1]), ("e", &[1])],
    )
    .unwrap()
}

/// Degree 3 with no marked preimage over `c`, whose fiber has type (1,1,1):
/// completion adds three labels there, a factor 3! = 6.
pub fn six_fold() -> BranchingData {
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
