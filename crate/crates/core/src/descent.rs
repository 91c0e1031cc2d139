//! Odd-degree descent bookkeeping: splitting tables of the extension,
//! the index transfer, and the invariant identity between rho upstairs
//! and rho downstairs.
//!
//! Base change is implemented for the slice where every fixed field is Q:
//! the extension then stays a field over the extension (no odd-degree
//! field contains a quadratic subfield), the index set transfers
//! identically, and each place contributes through the parity of its odd
//! local degrees. Anything else fails loudly rather than guessing
//! relative factorizations.

use crate::arith::IntPolynomial;
use crate::datum::{rho, validate_datum, LocalDatum};
use crate::engine::{Outcome, Reason, Verdict};
use crate::error::{Error, Result};
use crate::involution::Configuration;
use crate::local::Place;
use crate::obstruction::ObstructionGroup;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A monic irreducible polynomial of odd degree defining the extension.
#[derive(Clone, Debug)]
pub struct OddExtension {
    poly: IntPolynomial,
    disc: BigInt,
}

impl OddExtension {
    pub fn new(poly: IntPolynomial) -> Result<Self> {
        if !poly.is_monic() {
            return Err(Error::NotMonic);
        }
        if poly.degree() % 2 == 0 {
            return Err(Error::BadDegree(poly.degree(), "odd".to_string()));
        }
        poly.certify_irreducible()?;
        let disc = poly.discriminant();
        Ok(OddExtension { poly, disc })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree() as u32
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    fn is_ramified(&self, p: &num_bigint::BigUint) -> bool {
        (self.disc.magnitude() % p) == num_bigint::BigUint::from(0u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Computed,
    UserSupplied,
}

/// Local degrees above one place, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub degrees: Vec<u32>,
    pub provenance: Provenance,
}

/// Map from places to the multisets of local degrees of the extension.
#[derive(Clone, Debug)]
pub struct SplittingTable {
    degree: u32,
    rows: BTreeMap<Place, TableRow>,
}

impl SplittingTable {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn rows(&self) -> &BTreeMap<Place, TableRow> {
        &self.rows
    }

    pub fn row(&self, v: &Place) -> Option<&TableRow> {
        self.rows.get(v)
    }
}

fn validate_row(degree: u32, place: &Place, degrees: &[u32]) -> Result<()> {
    if degrees.iter().any(|&d| d == 0) {
        return Err(Error::BadTableRow {
            place: place.clone(),
            reason: "zero local degree".to_string(),
        });
    }
    if degrees.iter().sum::<u32>() != degree {
        return Err(Error::BadTableRow {
            place: place.clone(),
            reason: format!("degrees sum to {}, expected {degree}", degrees.iter().sum::<u32>()),
        });
    }
    if degrees.iter().filter(|&&d| d % 2 == 1).count() % 2 == 0 {
        return Err(Error::OddParityViolated(place.clone()));
    }
    Ok(())
}

/// Build splitting rows for the requested places. Finite unramified rows
/// come from distinct-degree splitting, the archimedean row from the real
/// root count; ramified primes need a user-supplied row, which is
/// validated and, where a computation is also possible, cross-checked.
pub fn build_table(
    ext: &OddExtension,
    places: &[Place],
    user_rows: &BTreeMap<Place, Vec<u32>>,
) -> Result<SplittingTable> {
    let degree = ext.degree();
    let mut wanted: Vec<Place> = places.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut rows = BTreeMap::new();
    for v in wanted {
        if let Some(user) = user_rows.get(&v) {
            let mut degrees = user.clone();
            degrees.sort_unstable();
            validate_row(degree, &v, &degrees)?;
            if let Some(computed) = computed_row(ext, &v)? {
                if computed != degrees {
                    return Err(Error::BadTableRow {
                        place: v.clone(),
                        reason: format!(
                            "user row {degrees:?} contradicts computed row {computed:?}"
                        ),
                    });
                }
            }
            rows.insert(v, TableRow { degrees, provenance: Provenance::UserSupplied });
            continue;
        }
        match computed_row(ext, &v)? {
            Some(degrees) => {
                rows.insert(v, TableRow { degrees, provenance: Provenance::Computed });
            }
            None => {
                let p = v.prime().expect("only finite places can be ramified");
                return Err(Error::RamifiedPrime(p.to_string()));
            }
        }
    }
    Ok(SplittingTable { degree, rows })
}

/// Computed degrees at a place, or None at a ramified prime.
fn computed_row(ext: &OddExtension, v: &Place) -> Result<Option<Vec<u32>>> {
    match v {
        Place::Infinite => {
            let real = ext.poly().real_root_count() as u32;
            let mut degrees = vec![1u32; real as usize];
            degrees.extend(std::iter::repeat(2).take(((ext.degree() - real) / 2) as usize));
            Ok(Some(degrees))
        }
        Place::Finite(p) => {
            if ext.is_ramified(p) {
                return Ok(None);
            }
            Ok(Some(ext.poly().split_degrees(p)?))
        }
    }
}

/// Count of odd local degrees at v; always odd for an odd-degree
/// extension, so an even count flags a bad user row.
pub fn odd_place_parity(table: &SplittingTable, v: &Place) -> Result<usize> {
    let row = table.row(v).ok_or_else(|| Error::MissingTableRow(v.clone()))?;
    let count = row.degrees.iter().filter(|&&d| d % 2 == 1).count();
    if count % 2 == 0 {
        return Err(Error::OddParityViolated(v.clone()));
    }
    Ok(count)
}

/// The transferred index set I' and the action of the transfer on class
/// maps. On the supported slice (all fixed fields Q) each factor keeps a
/// single index and d stays a non-square, so the transfer is the identity
/// relabeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChangeIndex {
    size: usize,
}

impl BaseChangeIndex {
    pub fn index_count(&self) -> usize {
        self.size
    }

    /// The dual action on class maps: verbatim.
    pub fn transfer_class(&self, c: &[bool]) -> Vec<bool> {
        debug_assert_eq!(c.len(), self.size);
        c.to_vec()
    }
}

pub fn base_change_index(cfg: &Configuration, ext: &OddExtension) -> Result<BaseChangeIndex> {
    let _ = ext;
    for (i, f) in cfg.factors().iter().enumerate() {
        if !f.field().is_rationals() {
            return Err(Error::UnsupportedBaseChange(i));
        }
    }
    Ok(BaseChangeIndex { size: cfg.index_count() })
}

/// Verify the invariant identity behind descent: for every basis class,
/// rho evaluated upstairs (each place weighted by the parity of its odd
/// local degrees, even-degree places contributing nothing) equals rho
/// downstairs. The parity bookkeeping forces equality; false is a bug
/// signal, not an input property.
pub fn check_rho_descent(
    cfg: &Configuration,
    group: &ObstructionGroup,
    datum: &LocalDatum,
    ext: &OddExtension,
    user_rows: &BTreeMap<Place, Vec<u32>>,
) -> Result<bool> {
    let transfer = base_change_index(cfg, ext)?;
    validate_datum(cfg, datum)?;
    let support: BTreeSet<Place> = datum.support_places();
    let places: Vec<Place> = support.into_iter().collect();
    let table = build_table(ext, &places, user_rows)?;
    for c in group.basis() {
        let downstairs = rho(cfg, group, datum, &c)?;
        let c_up = transfer.transfer_class(&c);
        let mut upstairs = crate::local::BrauerInvariant::ZERO;
        for e in datum.entries() {
            if !c_up[e.factor] {
                continue;
            }
            let odd_places = odd_place_parity(&table, &e.place)?;
            if odd_places % 2 == 1 {
                upstairs += e.inv;
            }
        }
        if upstairs != downstairs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Transfer a verdict over the extension back down: existence descends,
/// non-existence extends scalars, inconclusive passes through.
pub fn descent_verdict(verdict_over_ext: Verdict) -> Verdict {
    let mut v = verdict_over_ext;
    match v.outcome {
        Outcome::Exists => {
            v.reason = Reason::OddDegreeDescent;
            v.evidence.transferred_from_odd_extension = Some(true);
        }
        Outcome::NotExists => {
            v.evidence.transferred_from_odd_extension = Some(true);
        }
        Outcome::Inconclusive => {}
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SquareClass;
    use crate::datum::{principal_pattern, DatumEntry};
    use crate::involution::{AlgebraDescriptor, AlgebraKind, EtaleConfig};
    use crate::multiquad::{MultiquadraticField, StableFactor, DEFAULT_PRIME_BOUND};
    use crate::obstruction::build_c;

    fn sc(n: i64) -> SquareClass {
        SquareClass::from_i64(n).unwrap()
    }

    fn factor(gens: &[i64], d: i64) -> StableFactor {
        let field =
            MultiquadraticField::new(gens.iter().map(|&g| sc(g)).collect()).unwrap();
        StableFactor::new(field, sc(d)).unwrap()
    }

    fn fp(p: u64) -> Place {
        Place::finite_u64(p).unwrap()
    }

    fn cubic() -> OddExtension {
        OddExtension::new(IntPolynomial::from_i64(&[-1, -1, 0, 1]).unwrap()).unwrap()
    }

    fn no_user_rows() -> BTreeMap<Place, Vec<u32>> {
        BTreeMap::new()
    }

    #[test]
    fn extension_validation() {
        cubic();
        // Even degree rejected.
        assert!(matches!(
            OddExtension::new(IntPolynomial::from_i64(&[-2, 0, 1]).unwrap()),
            Err(Error::BadDegree(2, _))
        ));
        // Reducible rejected.
        assert!(OddExtension::new(IntPolynomial::from_i64(&[0, -1, 0, 1]).unwrap()).is_err());
        // Degree 1 fine.
        OddExtension::new(IntPolynomial::from_i64(&[-4, 1]).unwrap()).unwrap();
    }

    #[test]
    fn build_table_spec_rows() {
        let ext = cubic();
        let t = build_table(&ext, &[fp(5)], &no_user_rows()).unwrap();
        assert_eq!(t.row(&fp(5)).unwrap().degrees, vec![1, 2]);

        let t = build_table(&ext, &[Place::Infinite], &no_user_rows()).unwrap();
        let row = t.row(&Place::Infinite).unwrap();
        assert_eq!(row.degrees, vec![1, 2]);
        assert_eq!(row.provenance, Provenance::Computed);

        assert!(matches!(
            build_table(&ext, &[fp(23)], &no_user_rows()),
            Err(Error::RamifiedPrime(p)) if p == "23"
        ));
    }

    #[test]
    fn user_rows_for_ramified_places() {
        let ext = cubic();
        // disc = -23; 23 = (x - 3)(x - 10)^2 style shapes are possible, but
        // only the shape constraints are validated here.
        let mut rows = BTreeMap::new();
        rows.insert(fp(23), vec![1, 2]);
        let t = build_table(&ext, &[fp(23)], &rows).unwrap();
        assert_eq!(t.row(&fp(23)).unwrap().provenance, Provenance::UserSupplied);

        let mut bad = BTreeMap::new();
        bad.insert(fp(23), vec![1, 1]); // sums to 2
        assert!(matches!(
            build_table(&ext, &[fp(23)], &bad),
            Err(Error::BadTableRow { .. })
        ));

        let mut even = BTreeMap::new();
        even.insert(fp(23), vec![1, 1, 1, 2, 3]); // sums wrong anyway
        assert!(build_table(&ext, &[fp(23)], &even).is_err());

        // A user row for a computable place must match the computation.
        let mut lying = BTreeMap::new();
        lying.insert(fp(5), vec![3]);
        assert!(matches!(
            build_table(&ext, &[fp(5)], &lying),
            Err(Error::BadTableRow { .. })
        ));
    }

    #[test]
    fn parity_counts() {
        let ext = cubic();
        let t = build_table(&ext, &[fp(5), fp(2), Place::Infinite], &no_user_rows()).unwrap();
        assert_eq!(odd_place_parity(&t, &fp(5)).unwrap(), 1); // {1,2}
        assert_eq!(odd_place_parity(&t, &fp(2)).unwrap(), 1); // {3}
        assert!(matches!(
            odd_place_parity(&t, &fp(7)),
            Err(Error::MissingTableRow(_))
        ));
        // A degree-1 extension gives rows {1}: count 1.
        let lin = OddExtension::new(IntPolynomial::from_i64(&[-4, 1]).unwrap()).unwrap();
        let t = build_table(&lin, &[fp(7)], &no_user_rows()).unwrap();
        assert_eq!(odd_place_parity(&t, &fp(7)).unwrap(), 1);
    }

    #[test]
    fn parity_always_odd_on_unramified_primes() {
        let ext = cubic();
        let mut checked = 0;
        for p in crate::arith::PrimeWalk::new().take(110) {
            if p == 23 {
                continue;
            }
            let v = fp(p);
            let t = build_table(&ext, &[v.clone()], &no_user_rows()).unwrap();
            assert_eq!(odd_place_parity(&t, &v).unwrap() % 2, 1, "p = {p}");
            checked += 1;
        }
        assert!(checked >= 100);
    }

    #[test]
    fn base_change_slice() {
        let cfg = Configuration::new(
            EtaleConfig::of_factors(vec![factor(&[], 3), factor(&[], 5)]),
            AlgebraDescriptor::split(AlgebraKind::Symplectic, 4),
        )
        .unwrap();
        let t = base_change_index(&cfg, &cubic()).unwrap();
        assert_eq!(t.index_count(), 2);
        assert_eq!(t.transfer_class(&[true, false]), vec![true, false]);

        let deg1 = OddExtension::new(IntPolynomial::from_i64(&[-4, 1]).unwrap()).unwrap();
        assert_eq!(base_change_index(&cfg, &deg1).unwrap().index_count(), 2);

        let unsupported = Configuration::new(
            EtaleConfig::of_factors(vec![factor(&[2], 17)]),
            AlgebraDescriptor::split(AlgebraKind::Symplectic, 4),
        )
        .unwrap();
        assert!(matches!(
            base_change_index(&unsupported, &cubic()),
            Err(Error::UnsupportedBaseChange(0))
        ));
    }

    #[test]
    fn rho_descent_identity() {
        let cfg = Configuration::new(
            EtaleConfig::of_factors(vec![factor(&[], 3), factor(&[], 5)]),
            AlgebraDescriptor::split(AlgebraKind::Symplectic, 4),
        )
        .unwrap();
        let group = build_c(&cfg, DEFAULT_PRIME_BOUND).unwrap();
        let base = LocalDatum::new(false, vec![]);
        let datum = base
            .add(&principal_pattern(&cfg, 0, &sc(2)).unwrap())
            .add(&principal_pattern(&cfg, 1, &sc(7)).unwrap());
        assert!(!datum.entries().is_empty());
        assert!(check_rho_descent(&cfg, &group, &datum, &cubic(), &no_user_rows()).unwrap());

        // Degree-1 extension: trivially true.
        let deg1 = OddExtension::new(IntPolynomial::from_i64(&[-4, 1]).unwrap()).unwrap();
        assert!(check_rho_descent(&cfg, &group, &datum, &deg1, &no_user_rows()).unwrap());

        // Datum supported at 5 with row {1, 2}: preserved at the odd place.
        let d5 = LocalDatum::new(
            false,
            vec![
                DatumEntry { factor: 1, place: fp(5), inv: crate::local::BrauerInvariant::HALF },
                DatumEntry { factor: 1, place: fp(2), inv: crate::local::BrauerInvariant::HALF },
            ],
        );
        validate_datum(&cfg, &d5).unwrap();
        assert!(check_rho_descent(&cfg, &group, &d5, &cubic(), &no_user_rows()).unwrap());
    }

    #[test]
    fn witness_places_restrict_through_tables() {
        // A K-witness with an odd-degree place above it stays a witness.
        let a = factor(&[], 3);
        let b = factor(&[], 5);
        let w = crate::multiquad::v_intersection(&a, &b, DEFAULT_PRIME_BOUND)
            .unwrap();
        let v = w.witness().unwrap().clone();
        let t = build_table(&cubic(), &[v.clone()], &no_user_rows()).unwrap();
        assert!(odd_place_parity(&t, &v).unwrap() % 2 == 1);
        assert!(crate::multiquad::in_v(&a, &v) && crate::multiquad::in_v(&b, &v));
    }

    #[test]
    fn verdict_transfer() {
        use crate::engine::{Evidence, Outcome, Reason};
        let exists = Verdict {
            outcome: Outcome::Exists,
            reason: Reason::RhoZero,
            evidence: Evidence::default(),
        };
        let t = descent_verdict(exists);
        assert_eq!(t.outcome, Outcome::Exists);
        assert_eq!(t.reason, Reason::OddDegreeDescent);
        assert_eq!(t.evidence.transferred_from_odd_extension, Some(true));

        let inconclusive = Verdict {
            outcome: Outcome::Inconclusive,
            reason: Reason::DatumRequired,
            evidence: Evidence::default(),
        };
        let t = descent_verdict(inconclusive.clone());
        assert_eq!(t, inconclusive);

        let not_exists = Verdict {
            outcome: Outcome::NotExists,
            reason: Reason::RhoNonzero,
            evidence: Evidence::default(),
        };
        let t = descent_verdict(not_exists);
        assert_eq!(t.outcome, Outcome::NotExists);
        assert_eq!(t.reason, Reason::RhoNonzero);
    }
}
