//! Combinatorial ground layer: permutations, sign words, pair partitions
//! (matchings) with ε-decorations, and set partitions with the non-crossing
//! machinery (joins, enumerations, blow-ups, relative complements).

mod pairing;
mod perm;
mod setpart;

pub use pairing::{
    enumerate_eps_pairings, enumerate_pairings, induced_permutation, Eps, EpsilonMap,
    PairPartition, MAX_PAIRING_HALF_SIZE,
};
pub use perm::{hat_map, Permutation, Sign, SignPair};
pub use setpart::{
    collapse_admissible, cycle_structure_of_join, enumerate_admissible, enumerate_nc12,
    enumerate_nc12_on, enumerate_noncrossing, enumerate_noncrossing_on, enumerate_set_partitions,
    join_pairings, relative_nc_complement, SetPartition, UnionFind, MAX_NC12_GROUND,
    MAX_NC_GROUND, MAX_SET_PARTITION_GROUND,
};
