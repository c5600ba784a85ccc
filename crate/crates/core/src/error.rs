use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("n = {0} is out of range (need 1 <= n <= {max})", max = crate::charspace::MAX_RANK)]
    InvalidRank(usize),
    #[error("group (Z/{p})^{n} is too large for exhaustive enumeration")]
    GroupTooLarge { p: u32, n: usize },
    #[error("character {0:?} is zero")]
    ZeroCharacter(Vec<u32>),
    #[error("character {coords:?} has length {} but the group has rank {n}", coords.len())]
    WrongLength { coords: Vec<u32>, n: usize },
    #[error("coordinate {value} of character {coords:?} is not reduced mod {p}")]
    UnreducedCoordinate {
        coords: Vec<u32>,
        value: u32,
        p: u32,
    },
    #[error("relation is not homogeneous (weights {0} and {1})")]
    Inhomogeneous(usize, usize),
    #[error("generator index {index} out of range ({count} generators)")]
    UnknownGenerator { index: u32, count: usize },
    #[error("arrangement is empty")]
    EmptyArrangement,
    #[error("line {0:?} is not part of the arrangement")]
    LineNotInArrangement(Vec<u32>),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
