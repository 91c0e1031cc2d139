//! The published JSON document schemas: run configurations in, reports
//! out. Field names and value encodings here are a compatibility
//! contract; places are "inf" or a decimal prime string, invariants are
//! "0" or "1/2", factor indices are 1-based.

use crate::arith::{IntPolynomial, SquareClass};
use crate::datum::{CliffordClass, CliffordClassPair, DatumEntry, LocalDatum};
use crate::descent::TableRow;
use crate::engine::{GroupEvidence, RhoEntry, Verdict};
use crate::error::{Error, Result};
use crate::involution::{AlgebraDescriptor, AlgebraKind, Configuration, EtaleConfig};
use crate::local::{BrauerInvariant, Place};
use crate::multiquad::{MultiquadraticField, StableFactor, DEFAULT_PRIME_BOUND};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Top-level input document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDoc {
    pub kind: AlgebraKind,
    pub algebra: AlgebraDoc,
    pub etale: EtaleDoc,
    #[serde(default)]
    pub datum: Option<DatumDoc>,
    #[serde(default)]
    pub clifford: Option<Vec<CliffordDoc>>,
    #[serde(default)]
    pub extension: Option<ExtensionDoc>,
    #[serde(default)]
    pub options: OptionsDoc,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub degree: u64,
    #[serde(default)]
    pub ramified_places: Vec<Place>,
    #[serde(default)]
    pub hyperbolic_at: Vec<Place>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaleDoc {
    pub factors: Vec<FactorDoc>,
    #[serde(default)]
    pub identity_rank: u64,
    #[serde(default)]
    pub split_rank: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub f_gens: Vec<i64>,
    pub d: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDoc {
    pub oriented: bool,
    pub entries: Vec<DatumEntryDoc>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumEntryDoc {
    /// 1-based factor index.
    pub factor: usize,
    pub place: Place,
    pub inv: BrauerInvariant,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliffordDoc {
    pub place: Place,
    /// One invariant for a field center, two for a split center.
    pub theta: Vec<BrauerInvariant>,
    pub tau: Vec<BrauerInvariant>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDoc {
    /// Constant-first integer coefficients.
    pub poly: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDoc {
    #[serde(default = "default_prime_bound")]
    pub prime_bound: u64,
    #[serde(default)]
    pub assert_local_existence: bool,
}

fn default_prime_bound() -> u64 {
    DEFAULT_PRIME_BOUND
}

impl Default for OptionsDoc {
    fn default() -> Self {
        OptionsDoc {
            prime_bound: DEFAULT_PRIME_BOUND,
            assert_local_existence: false,
        }
    }
}

/// Parsed and validated run inputs in domain form.
pub struct RunInputs {
    pub config: Configuration,
    pub datum: Option<LocalDatum>,
    pub clifford: Option<Vec<CliffordClassPair>>,
    pub extension: Option<crate::descent::OddExtension>,
    pub prime_bound: u64,
    pub assert_local_existence: bool,
}

/// Parse a document, naming the offending path on schema errors.
pub fn parse_document(text: &str) -> Result<RunConfigDoc> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

impl RunConfigDoc {
    /// Convert to domain types, running all validations.
    pub fn into_inputs(self) -> Result<RunInputs> {
        let mut factors = Vec::with_capacity(self.etale.factors.len());
        for f in &self.etale.factors {
            let mut basis = Vec::with_capacity(f.f_gens.len());
            for &g in &f.f_gens {
                basis.push(SquareClass::from_i64(g)?);
            }
            let field = MultiquadraticField::new(basis)?;
            factors.push(StableFactor::new(field, SquareClass::from_i64(f.d)?)?);
        }
        let etale = EtaleConfig {
            factors,
            identity_rank: self.etale.identity_rank,
            split_rank: self.etale.split_rank,
        };
        let algebra = AlgebraDescriptor {
            kind: self.kind,
            degree: self.algebra.degree,
            ramified_places: self.algebra.ramified_places.into_iter().collect(),
            hyperbolic_at: self.algebra.hyperbolic_at.into_iter().collect(),
        };
        let config = Configuration::new(etale, algebra)?;

        let datum = match self.datum {
            None => None,
            Some(doc) => {
                let mut entries = Vec::with_capacity(doc.entries.len());
                for e in doc.entries {
                    if e.factor == 0 || e.factor > config.index_count() {
                        return Err(Error::BadFactorIndex(e.factor));
                    }
                    entries.push(DatumEntry {
                        factor: e.factor - 1,
                        place: e.place,
                        inv: e.inv,
                    });
                }
                Some(LocalDatum::new(doc.oriented, entries))
            }
        };

        let clifford = match self.clifford {
            None => None,
            Some(docs) => {
                let mut pairs = Vec::with_capacity(docs.len());
                for doc in docs {
                    let theta = clifford_class(&doc.place, &doc.theta)?;
                    let tau = clifford_class(&doc.place, &doc.tau)?;
                    pairs.push(CliffordClassPair { place: doc.place, theta, tau });
                }
                Some(pairs)
            }
        };

        let extension = match self.extension {
            None => None,
            Some(doc) => {
                let coeffs = doc.poly.iter().map(|&c| BigInt::from(c)).collect();
                Some(crate::descent::OddExtension::new(IntPolynomial::new(coeffs)?)?)
            }
        };

        Ok(RunInputs {
            config,
            datum,
            clifford,
            extension,
            prime_bound: self.options.prime_bound,
            assert_local_existence: self.options.assert_local_existence,
        })
    }
}

fn clifford_class(place: &Place, invs: &[BrauerInvariant]) -> Result<CliffordClass> {
    match invs {
        [inv] => Ok(CliffordClass::FieldCenter(*inv)),
        [a, b] => Ok(CliffordClass::SplitCenter(*a, *b)),
        other => Err(Error::Schema {
            path: format!("clifford[{place}]"),
            message: format!("expected 1 or 2 invariants, got {}", other.len()),
        }),
    }
}

/// A report: the version stamp plus one command-specific body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    #[serde(flatten)]
    pub body: ReportBody,
}

pub const SCHEMA_VERSION: &str = env!("CARGO_PKG_VERSION");

impl Report {
    pub fn new(body: ReportBody) -> Self {
        Report { version: SCHEMA_VERSION.to_string(), body }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ReportBody {
    Analyze {
        verdict: Verdict,
    },
    Obstruction {
        c: GroupEvidence,
        c_indep: GroupEvidence,
    },
    Rho {
        obstruction: GroupEvidence,
        rho: Vec<RhoEntry>,
    },
    Witness {
        /// 1-based factor pair.
        pair: (usize, usize),
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Place>,
        #[serde(skip_serializing_if = "Option::is_none")]
        empty_certificate: Option<EmptyCertificateDoc>,
    },
    ShaCheck {
        index_count: usize,
        tuples: Vec<Vec<u8>>,
        sha_quotient_order: String,
        c_order: String,
        isomorphic: bool,
    },
    Descent {
        table: Vec<TableRowDoc>,
        rho_identity: bool,
        verdict_over_extension: Verdict,
        verdict: Verdict,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyCertificateDoc {
    pub special_places: Vec<Place>,
    pub patterns_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRowDoc {
    pub place: Place,
    pub degrees: Vec<u32>,
    pub provenance: crate::descent::Provenance,
}

impl TableRowDoc {
    pub fn of(place: &Place, row: &TableRow) -> Self {
        TableRowDoc {
            place: place.clone(),
            degrees: row.degrees.clone(),
            provenance: row.provenance,
        }
    }
}
