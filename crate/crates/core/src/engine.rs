//! Verdict assembly: fast paths, the obstruction pipeline, and evidence
//! that can be re-checked without re-running the engine.
//!
//! The pipeline refuses to conclude outside its hypotheses: without a
//! local-existence assertion, or when the oriented local gate fails, the
//! verdict is Inconclusive rather than NotExists.

use crate::datum::{rho, validate_datum, CliffordClassPair, LocalDatum};
use crate::error::{Error, Result};
use crate::involution::Configuration;
use crate::local::{BrauerInvariant, Place};
use crate::multiquad::{in_v, is_linearly_disjoint};
use crate::obstruction::{build_c, build_c_indep, EdgeWitness, ObstructionGroup};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Exists,
    NotExists,
    Inconclusive,
}

/// Enumerated justification for a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Local embedding existence was not asserted.
    NoLocalAssertion,
    /// Oriented local embeddings fail at some critical place, so the
    /// hypotheses of the global criterion are unmet.
    OrientedGateFailed,
    /// All factors pairwise linearly disjoint.
    PairwiseLinearlyDisjoint,
    /// Some factor linearly disjoint from every other.
    HubLinearlyDisjoint,
    /// The disjointness group is trivial via chains.
    IndependenceGroupTrivial,
    /// The obstruction group itself is trivial.
    ObstructionGroupTrivial,
    /// rho vanishes on every basis class.
    RhoZero,
    /// rho is nonzero on some class.
    RhoNonzero,
    /// Nontrivial obstruction group and no datum supplied.
    DatumRequired,
    /// Transferred from an odd-degree extension.
    OddDegreeDescent,
}

impl std::fmt::Display for Reason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Reason::NoLocalAssertion => "no local existence assertion",
            Reason::OrientedGateFailed => "oriented local existence fails",
            Reason::PairwiseLinearlyDisjoint => "pairwise linearly disjoint",
            Reason::HubLinearlyDisjoint => "one factor disjoint from all others",
            Reason::IndependenceGroupTrivial => "disjointness group trivial",
            Reason::ObstructionGroupTrivial => "obstruction group trivial",
            Reason::RhoZero => "rho vanishes on the obstruction group",
            Reason::RhoNonzero => "rho is nonzero",
            Reason::DatumRequired => "datum required",
            Reason::OddDegreeDescent => "exists over an odd-degree extension",
        };
        write!(f, "{s}")
    }
}

/// Serialized view of an obstruction group for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEvidence {
    pub relation: String,
    /// 1-based classes, sorted.
    pub classes: Vec<Vec<usize>>,
    pub order: String,
    pub witnesses: Vec<WitnessEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    /// 1-based factor pair.
    pub pair: (usize, usize),
    /// Common V-place for intersection edges, absent for disjointness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub place: Option<Place>,
}

impl GroupEvidence {
    pub fn of(group: &ObstructionGroup) -> Self {
        let relation = match group.relation() {
            crate::obstruction::GroupRelation::PlaceIntersection => "v_intersection",
            crate::obstruction::GroupRelation::LinearDisjointness => "linear_disjointness",
        }
        .to_string();
        let classes = group
            .classes()
            .iter()
            .map(|c| c.iter().map(|i| i + 1).collect())
            .collect();
        let witnesses = group
            .witnesses()
            .iter()
            .map(|(&(i, j), w)| WitnessEdge {
                pair: (i + 1, j + 1),
                place: match w {
                    EdgeWitness::Place(v) => Some(v.clone()),
                    EdgeWitness::LinearlyDisjoint => None,
                },
            })
            .collect();
        GroupEvidence {
            relation,
            classes,
            order: group.order().to_string(),
            witnesses,
        }
    }
}

/// One row of a rho table: a class (1-based member indices) and its value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoEntry {
    pub class: Vec<usize>,
    pub value: BrauerInvariant,
}

/// Outcome of the oriented gate at one critical place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedPlaceCheck {
    pub place: Place,
    pub classes_equal: bool,
}

/// Machine-checkable support for a verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<GroupEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independence: Option<GroupEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_table: Option<Vec<RhoEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_class: Option<RhoEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hub_factor: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oriented_checks: Option<Vec<OrientedPlaceCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transferred_from_odd_extension: Option<bool>,
}

/// The engine's answer with its justification and evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: Reason,
    pub evidence: Evidence,
}

impl Verdict {
    fn new(outcome: Outcome, reason: Reason, evidence: Evidence) -> Self {
        Verdict { outcome, reason, evidence }
    }
}

/// Strongest applicable disjointness fast path, if any: pairwise, then
/// hub, then triviality of the disjointness group via chains.
pub fn fast_path_report(cfg: &Configuration) -> Option<Verdict> {
    let factors = cfg.factors();
    let m = factors.len();
    let disjoint = |i: usize, j: usize| is_linearly_disjoint(&factors[i], &factors[j]);
    let pairwise =
        (0..m).all(|i| (i + 1..m).all(|j| disjoint(i, j)));
    let indep = build_c_indep(cfg);
    if pairwise {
        return Some(Verdict::new(
            Outcome::Exists,
            Reason::PairwiseLinearlyDisjoint,
            Evidence {
                independence: Some(GroupEvidence::of(&indep)),
                ..Default::default()
            },
        ));
    }
    if let Some(hub) = (0..m).find(|&i| (0..m).all(|j| j == i || disjoint(i, j))) {
        return Some(Verdict::new(
            Outcome::Exists,
            Reason::HubLinearlyDisjoint,
            Evidence {
                independence: Some(GroupEvidence::of(&indep)),
                hub_factor: Some(hub + 1),
                ..Default::default()
            },
        ));
    }
    if indep.is_trivial() {
        return Some(Verdict::new(
            Outcome::Exists,
            Reason::IndependenceGroupTrivial,
            Evidence {
                independence: Some(GroupEvidence::of(&indep)),
                ..Default::default()
            },
        ));
    }
    None
}

/// Full pipeline. Validation errors are errors; everything the theorems
/// cannot settle is an Inconclusive verdict, never a guess.
pub fn decide(
    cfg: &Configuration,
    datum: Option<&LocalDatum>,
    clifford_pairs: Option<&[CliffordClassPair]>,
    assert_local_existence: bool,
    prime_bound: u64,
) -> Result<Verdict> {
    if let Some(d) = datum {
        validate_datum(cfg, d)?;
    }
    if !assert_local_existence {
        return Ok(Verdict::new(
            Outcome::Inconclusive,
            Reason::NoLocalAssertion,
            Evidence {
                missing: Some(vec!["assertion of local embedding existence".to_string()]),
                ..Default::default()
            },
        ));
    }
    if cfg.algebra().orientation_active() {
        let pairs = clifford_pairs.unwrap_or(&[]);
        let critical = crate::datum::compute_p(cfg)?;
        let mut checks = Vec::new();
        for v in &critical {
            let pair = pairs
                .iter()
                .find(|p| &p.place == v)
                .ok_or_else(|| Error::MissingCliffordPair(v.clone()))?;
            checks.push(OrientedPlaceCheck {
                place: v.clone(),
                classes_equal: pair.theta == pair.tau,
            });
        }
        // Shape validation covers all supplied pairs, not only critical ones.
        if !crate::datum::oriented_local_everywhere(cfg, pairs)? {
            return Ok(Verdict::new(
                Outcome::Inconclusive,
                Reason::OrientedGateFailed,
                Evidence { oriented_checks: Some(checks), ..Default::default() },
            ));
        }
    }
    if let Some(verdict) = fast_path_report(cfg) {
        return Ok(verdict);
    }
    let group = build_c(cfg, prime_bound)?;
    if group.is_trivial() {
        return Ok(Verdict::new(
            Outcome::Exists,
            Reason::ObstructionGroupTrivial,
            Evidence {
                obstruction: Some(GroupEvidence::of(&group)),
                ..Default::default()
            },
        ));
    }
    match datum {
        Some(d) => {
            let mut table = Vec::new();
            let mut violating = None;
            for c in group.basis() {
                let value = rho(cfg, &group, d, &c)?;
                let class: Vec<usize> = (0..c.len()).filter(|&i| c[i]).map(|i| i + 1).collect();
                let entry = RhoEntry { class, value };
                if !value.is_zero() && violating.is_none() {
                    violating = Some(entry.clone());
                }
                table.push(entry);
            }
            let evidence = Evidence {
                obstruction: Some(GroupEvidence::of(&group)),
                rho_table: Some(table),
                violating_class: violating.clone(),
                ..Default::default()
            };
            Ok(match violating {
                None => Verdict::new(Outcome::Exists, Reason::RhoZero, evidence),
                Some(_) => Verdict::new(Outcome::NotExists, Reason::RhoNonzero, evidence),
            })
        }
        None => Ok(Verdict::new(
            Outcome::Inconclusive,
            Reason::DatumRequired,
            Evidence {
                obstruction: Some(GroupEvidence::of(&group)),
                missing: Some(vec!["local embedding datum".to_string()]),
                ..Default::default()
            },
        )),
    }
}

/// Re-check a verdict from its own evidence: witnesses must satisfy both
/// V-predicates, disjointness edges must hold, rho rows must recompute to
/// the stated values, and gate failures must name a genuinely failing
/// place. Returns false when the evidence does not support the verdict.
pub fn verify_verdict(
    cfg: &Configuration,
    datum: Option<&LocalDatum>,
    verdict: &Verdict,
) -> Result<bool> {
    let factors = cfg.factors();
    let check_group = |ev: &GroupEvidence| -> Result<bool> {
        for edge in &ev.witnesses {
            let (i, j) = (edge.pair.0 - 1, edge.pair.1 - 1);
            if i >= factors.len() || j >= factors.len() {
                return Ok(false);
            }
            match &edge.place {
                Some(v) => {
                    if !in_v(&factors[i], v) || !in_v(&factors[j], v) {
                        return Ok(false);
                    }
                }
                None => {
                    if !is_linearly_disjoint(&factors[i], &factors[j]) {
                        return Ok(false);
                    }
                }
            }
        }
        // Classes must partition 1..=m.
        let mut seen: Vec<usize> = ev.classes.iter().flatten().copied().collect();
        seen.sort_unstable();
        Ok(seen == (1..=factors.len()).collect::<Vec<_>>())
    };
    let check_rho_rows = |rows: &[RhoEntry]| -> Result<bool> {
        let d = match datum {
            Some(d) => d,
            None => return Ok(false),
        };
        let group = build_c(cfg, crate::multiquad::DEFAULT_PRIME_BOUND)?;
        for row in rows {
            let mut c = vec![false; factors.len()];
            for &i in &row.class {
                if i == 0 || i > factors.len() {
                    return Ok(false);
                }
                c[i - 1] = true;
            }
            if rho(cfg, &group, d, &c)? != row.value {
                return Ok(false);
            }
        }
        Ok(true)
    };
    match (verdict.outcome, verdict.reason) {
        (Outcome::Exists, Reason::PairwiseLinearlyDisjoint) => {
            let m = factors.len();
            Ok((0..m).all(|i| {
                (i + 1..m).all(|j| is_linearly_disjoint(&factors[i], &factors[j]))
            }))
        }
        (Outcome::Exists, Reason::HubLinearlyDisjoint) => {
            match verdict.evidence.hub_factor {
                Some(h) if h >= 1 && h <= factors.len() => {
                    let i = h - 1;
                    Ok((0..factors.len()).all(|j| {
                        j == i || is_linearly_disjoint(&factors[i], &factors[j])
                    }))
                }
                _ => Ok(false),
            }
        }
        (Outcome::Exists, Reason::IndependenceGroupTrivial) => {
            match &verdict.evidence.independence {
                Some(ev) => Ok(check_group(ev)? && ev.classes.len() <= 1),
                None => Ok(false),
            }
        }
        (Outcome::Exists, Reason::ObstructionGroupTrivial) => {
            match &verdict.evidence.obstruction {
                Some(ev) => Ok(check_group(ev)? && ev.classes.len() <= 1),
                None => Ok(false),
            }
        }
        (Outcome::Exists, Reason::RhoZero) => match &verdict.evidence.rho_table {
            Some(rows) => {
                Ok(rows.iter().all(|r| r.value.is_zero()) && check_rho_rows(rows)?)
            }
            None => Ok(false),
        },
        (Outcome::Exists, Reason::OddDegreeDescent) => {
            Ok(verdict.evidence.transferred_from_odd_extension == Some(true))
        }
        (Outcome::NotExists, Reason::RhoNonzero) => {
            match &verdict.evidence.violating_class {
                Some(row) => Ok(!row.value.is_zero()
                    && check_rho_rows(std::slice::from_ref(row))?),
                None => Ok(false),
            }
        }
        (Outcome::Inconclusive, Reason::OrientedGateFailed) => {
            match &verdict.evidence.oriented_checks {
                Some(checks) => {
                    let critical = crate::datum::compute_p(cfg)?;
                    let failing = checks.iter().any(|c| !c.classes_equal);
                    let all_critical =
                        checks.iter().all(|c| critical.contains(&c.place));
                    Ok(failing && all_critical)
                }
                None => Ok(false),
            }
        }
        (Outcome::Inconclusive, Reason::NoLocalAssertion)
        | (Outcome::Inconclusive, Reason::DatumRequired) => Ok(true),
        (Outcome::NotExists, _) => {
            // A NotExists passed through descent keeps its inner reason and
            // evidence; re-check the rho row when present.
            match &verdict.evidence.violating_class {
                Some(row) => Ok(!row.value.is_zero()
                    && (verdict.evidence.transferred_from_odd_extension == Some(true)
                        || check_rho_rows(std::slice::from_ref(row))?)),
                None => Ok(false),
            }
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::SquareClass;
    use crate::datum::{CliffordClass, DatumEntry};
    use crate::involution::{AlgebraDescriptor, AlgebraKind, EtaleConfig};
    use crate::multiquad::{MultiquadraticField, StableFactor, DEFAULT_PRIME_BOUND};
    use std::collections::BTreeSet;

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

    fn inv(h: bool) -> BrauerInvariant {
        BrauerInvariant::from_bool(h)
    }

    fn entry(factor: usize, p: u64, half: bool) -> DatumEntry {
        DatumEntry { factor, place: fp(p), inv: inv(half) }
    }

    fn split_config(factors: Vec<StableFactor>) -> Configuration {
        let degree = factors.iter().map(|f| f.degree()).sum();
        Configuration::new(
            EtaleConfig::of_factors(factors),
            AlgebraDescriptor::split(AlgebraKind::Orthogonal, degree),
        )
        .unwrap()
    }

    fn oriented_order_two() -> Configuration {
        let etale = EtaleConfig::of_factors(vec![factor(&[2], 17), factor(&[5], 2)]);
        let alg = AlgebraDescriptor {
            kind: AlgebraKind::Orthogonal,
            degree: 8,
            ramified_places: [fp(2), fp(5)].into_iter().collect(),
            hyperbolic_at: BTreeSet::new(),
        };
        Configuration::new(etale, alg).unwrap()
    }

    #[test]
    fn pairwise_fast_path() {
        let cfg = split_config(vec![factor(&[], 3), factor(&[], 5), factor(&[], 7)]);
        let v = decide(&cfg, None, None, true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::Exists);
        assert_eq!(v.reason, Reason::PairwiseLinearlyDisjoint);
        assert!(verify_verdict(&cfg, None, &v).unwrap());
    }

    #[test]
    fn hub_fast_path() {
        // Factor 1 disjoint from both others, which overlap each other.
        let cfg = split_config(vec![factor(&[], 3), factor(&[5], 7), factor(&[5], 11)]);
        let v = fast_path_report(&cfg).unwrap();
        assert_eq!(v.reason, Reason::HubLinearlyDisjoint);
        assert_eq!(v.evidence.hub_factor, Some(1));
        assert!(verify_verdict(&cfg, None, &v).unwrap());
    }

    #[test]
    fn chain_fast_path() {
        // Disjointness edges form a 4-cycle: connected, so chains collapse
        // the group, but every factor overlaps one other, so no hub.
        let cfg = split_config(vec![
            factor(&[2], 3),
            factor(&[5], 7),
            factor(&[2], 11),
            factor(&[5], 13),
        ]);
        assert!(!is_linearly_disjoint(&cfg.factors()[0], &cfg.factors()[2]));
        assert!(!is_linearly_disjoint(&cfg.factors()[1], &cfg.factors()[3]));
        let v = fast_path_report(&cfg).unwrap();
        assert_eq!(v.reason, Reason::IndependenceGroupTrivial);
        assert!(verify_verdict(&cfg, None, &v).unwrap());
    }

    #[test]
    fn no_fast_path() {
        let cfg = split_config(vec![factor(&[2], 17), factor(&[2], 5)]);
        assert!(fast_path_report(&cfg).is_none());
    }

    #[test]
    fn verdict_fixture_not_exists() {
        let cfg = oriented_order_two();
        let datum = LocalDatum::new(true, vec![entry(0, 17, true), entry(1, 5, true)]);
        let v = decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::NotExists);
        assert_eq!(v.reason, Reason::RhoNonzero);
        let violating = v.evidence.violating_class.as_ref().unwrap();
        assert_eq!(violating.class, vec![1]);
        assert_eq!(violating.value, inv(true));
        assert!(verify_verdict(&cfg, Some(&datum), &v).unwrap());
    }

    #[test]
    fn verdict_fixture_exists_after_moving_entry() {
        // Both entries inside V_1 at places 17 and 7 cancel.
        let cfg = oriented_order_two();
        let datum = LocalDatum::new(true, vec![entry(0, 17, true), entry(0, 7, true)]);
        let v = decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::Exists);
        assert_eq!(v.reason, Reason::RhoZero);
        assert!(verify_verdict(&cfg, Some(&datum), &v).unwrap());
    }

    #[test]
    fn no_local_assertion_gate() {
        let cfg = split_config(vec![factor(&[], 3)]);
        let v = decide(&cfg, None, None, false, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.reason, Reason::NoLocalAssertion);
    }

    #[test]
    fn datum_required_gate() {
        let cfg = split_config(vec![factor(&[2], 17), factor(&[5], 2)]);
        let v = decide(&cfg, None, None, true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.reason, Reason::DatumRequired);
        assert!(verify_verdict(&cfg, None, &v).unwrap());
    }

    #[test]
    fn oriented_gate_inconclusive_not_notexists() {
        let etale = EtaleConfig::of_factors(vec![factor(&[], -1)]);
        let alg = AlgebraDescriptor {
            kind: AlgebraKind::Orthogonal,
            degree: 2,
            ramified_places: [fp(5), fp(13)].into_iter().collect(),
            hyperbolic_at: [fp(13)].into_iter().collect(),
        };
        let cfg = Configuration::new(etale, alg).unwrap();
        let unequal = CliffordClassPair {
            place: fp(13),
            theta: CliffordClass::SplitCenter(inv(false), inv(false)),
            tau: CliffordClass::SplitCenter(inv(true), inv(false)),
        };
        let v = decide(&cfg, None, Some(&[unequal]), true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.reason, Reason::OrientedGateFailed);
        assert!(verify_verdict(&cfg, None, &v).unwrap());
    }

    #[test]
    fn fast_paths_confirmed_by_pipeline() {
        let samples = vec![
            vec![factor(&[], 3), factor(&[], 5)],
            vec![factor(&[], 3), factor(&[5], 7), factor(&[5], 11)],
            vec![factor(&[2], 3), factor(&[7], 5), factor(&[2], 11)],
        ];
        for factors in samples {
            let cfg = split_config(factors);
            if fast_path_report(&cfg).is_some() {
                let c = build_c(&cfg, DEFAULT_PRIME_BOUND).unwrap();
                assert!(c.is_trivial());
            }
        }
    }

    #[test]
    fn decide_deterministic() {
        let cfg = oriented_order_two();
        let datum = LocalDatum::new(true, vec![entry(0, 17, true), entry(1, 5, true)]);
        let a = decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        let b = decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn verdict_roundtrips_and_reverifies() {
        let cfg = oriented_order_two();
        let datum = LocalDatum::new(true, vec![entry(0, 17, true), entry(1, 5, true)]);
        let v = decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let parsed: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, v);
        assert!(verify_verdict(&cfg, Some(&datum), &parsed).unwrap());
    }

    #[test]
    fn tampered_evidence_fails_verification() {
        let cfg = oriented_order_two();
        let datum = LocalDatum::new(true, vec![entry(0, 17, true), entry(1, 5, true)]);
        let mut v =
            decide(&cfg, Some(&datum), Some(&[]), true, DEFAULT_PRIME_BOUND).unwrap();
        if let Some(row) = v.evidence.violating_class.as_mut() {
            row.value = inv(false);
        }
        assert!(!verify_verdict(&cfg, Some(&datum), &v).unwrap());
    }
}
