//! Whole-configuration model: the etale algebra with involution (E, sigma)
//! and the descriptor of the target algebra with involution (A, tau).
//!
//! The algebra is described by per-place isomorphism-class facts only
//! (ramification set, hyperbolic flags), never by structure constants.
//! Factors on which the involution restricts to the identity contribute
//! dimensions but carry no d, so they never enter the index set I.

use crate::arith::SquareClass;
use crate::error::{Error, Result};
use crate::local::{local_vector, Place};
use crate::multiquad::{in_v, GeneratorList, StableFactor};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Involution type of the target algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    Orthogonal,
    Symplectic,
    Unitary,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraKind::Orthogonal => "orthogonal",
            AlgebraKind::Symplectic => "symplectic",
            AlgebraKind::Unitary => "unitary",
        };
        write!(f, "{s}")
    }
}

/// Per-place description of (A, tau).
///
/// `ramified_places` is the ramification set of the quaternion-class
/// algebra (empty means A is split); `hyperbolic_at` flags the ramified
/// places where (A, tau) is the hyperbolic involution over the local
/// quaternion division algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDescriptor {
    pub kind: AlgebraKind,
    pub degree: u64,
    pub ramified_places: BTreeSet<Place>,
    pub hyperbolic_at: BTreeSet<Place>,
}

impl AlgebraDescriptor {
    pub fn split(kind: AlgebraKind, degree: u64) -> Self {
        AlgebraDescriptor {
            kind,
            degree,
            ramified_places: BTreeSet::new(),
            hyperbolic_at: BTreeSet::new(),
        }
    }

    pub fn is_split(&self) -> bool {
        self.ramified_places.is_empty()
    }

    /// Orientation machinery is active only for nonsplit orthogonal.
    pub fn orientation_active(&self) -> bool {
        self.kind == AlgebraKind::Orthogonal && !self.is_split()
    }

    /// Human tag used in orientation-mismatch diagnostics.
    pub fn describe(&self) -> String {
        if self.is_split() {
            format!("split {}", self.kind)
        } else {
            format!("nonsplit {}", self.kind)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ramified_places.len() % 2 != 0 {
            return Err(Error::BadAlgebra(format!(
                "ramification set has odd size {}",
                self.ramified_places.len()
            )));
        }
        if !self.hyperbolic_at.is_subset(&self.ramified_places) {
            return Err(Error::BadAlgebra(
                "hyperbolic places must be ramified places".to_string(),
            ));
        }
        if self.degree == 0 {
            return Err(Error::BadAlgebra("degree must be positive".to_string()));
        }
        Ok(())
    }
}

/// The etale side: indexed stable factors plus the dimensions of the
/// identity-involution part and of the split-with-swap part.
#[derive(Clone, Debug)]
pub struct EtaleConfig {
    pub factors: Vec<StableFactor>,
    pub identity_rank: u64,
    pub split_rank: u64,
}

impl EtaleConfig {
    pub fn of_factors(factors: Vec<StableFactor>) -> Self {
        EtaleConfig { factors, identity_rank: 0, split_rank: 0 }
    }
}

/// A validated (E, sigma) / (A, tau) pair, with derived global data.
#[derive(Clone, Debug)]
pub struct Configuration {
    etale: EtaleConfig,
    algebra: AlgebraDescriptor,
    disc: SquareClass,
    generators: GeneratorList,
}

impl Configuration {
    /// Validate the dimension relations and the factor invariants.
    ///
    /// First kind (orthogonal, symplectic): the total degree is
    /// n = sum 2 * 2^(r_i) + identity_rank + 2 * split_rank and the fixed
    /// algebra must have dimension [(n+1)/2], which pins identity_rank to
    /// 0 or 1. Second kind (unitary): the fixed algebra has dimension n
    /// over the base, which forces identity_rank = 0 and makes the degree
    /// n = sum 2^(r_i) + split_rank.
    pub fn new(etale: EtaleConfig, algebra: AlgebraDescriptor) -> Result<Self> {
        algebra.validate()?;
        let stable: u64 = etale.factors.iter().map(|f| f.degree() / 2).sum();
        let n = match algebra.kind {
            AlgebraKind::Orthogonal | AlgebraKind::Symplectic => {
                let n = 2 * stable + etale.identity_rank + 2 * etale.split_rank;
                let dim_f = stable + etale.identity_rank + etale.split_rank;
                if dim_f != (n + 1) / 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "dim F = {dim_f} but [(n+1)/2] = {} for n = {n}; \
                         identity_rank must be 0 or 1",
                        (n + 1) / 2
                    )));
                }
                n
            }
            AlgebraKind::Unitary => {
                if etale.identity_rank != 0 {
                    return Err(Error::DimensionMismatch(
                        "unitary configurations admit no identity-involution factors"
                            .to_string(),
                    ));
                }
                stable + etale.split_rank
            }
        };
        if n != algebra.degree {
            return Err(Error::DegreeMismatch { config: n, algebra: algebra.degree });
        }
        let mut disc = SquareClass::one();
        for f in &etale.factors {
            if f.field().is_rationals() {
                disc = disc.mul(f.d());
            }
        }
        let generators = GeneratorList::for_factors(etale.factors.iter());
        Ok(Configuration { etale, algebra, disc, generators })
    }

    pub fn factors(&self) -> &[StableFactor] {
        &self.etale.factors
    }

    /// Size of the index set I.
    pub fn index_count(&self) -> usize {
        self.etale.factors.len()
    }

    pub fn identity_rank(&self) -> u64 {
        self.etale.identity_rank
    }

    pub fn split_rank(&self) -> u64 {
        self.etale.split_rank
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn generators(&self) -> &GeneratorList {
        &self.generators
    }

    pub fn factor(&self, i: usize) -> Result<&StableFactor> {
        self.etale.factors.get(i).ok_or(Error::BadFactorIndex(i))
    }

    /// Square class of the discriminant algebra of E: the product of the
    /// d_i over the factors with F_i = Q. Norms from proper multiquadratic
    /// fields, the identity part and the split part contribute squares.
    pub fn disc_class(&self) -> &SquareClass {
        &self.disc
    }

    /// Whether the discriminant algebra splits at v.
    pub fn v_prime_member(&self, v: &Place) -> bool {
        local_vector(&self.disc, v).is_zero()
    }

    /// Whether E tensor Q_v is fully split with swap: no identity part and
    /// every stable factor locally split (split factors always qualify).
    pub fn split_with_swap_at(&self, v: &Place) -> bool {
        self.etale.identity_rank == 0
            && self.etale.factors.iter().all(|f| !in_v(f, v))
    }
}
