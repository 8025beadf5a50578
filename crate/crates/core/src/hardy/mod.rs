//! Dyadic covers, partitions of unity, atoms and atomic decompositions.

mod atoms;
mod cover;
mod decompose;
mod partition;
mod random;
mod report;

pub use cover::{DyadicCover, Family, Interval, ZETA};
pub use partition::{build_partition, PartitionOfUnity};
pub use atoms::{
    case3_split, effective_support, family_measure, haar_shape, measure_median, two_atom_split, validate_atom,
    validate_atom_with_constant, Atom, AtomKind, AtomReport, Case3Piece, Case3Split, Shape, TwoAtomSplit,
    CANCEL_TOLERANCE,
};
pub use decompose::{
    atom_constant, atomic_decompose, local_atomic_decompose, Decomposition, Remainder, Source, DEFAULT_DEPTH,
    MAX_DEPTH, RECONSTRUCT_TOLERANCE,
};
pub use random::{random_atom, random_batch, Profile, RandomAtom, MAX_SCALE, PROFILES};
pub use report::{
    atom_maximal_norm, family_kernel, h1_norm_report, maximal_norm, named_source, H1Config, H1Point, H1Report,
};
