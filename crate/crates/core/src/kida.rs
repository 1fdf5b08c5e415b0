//! λ/μ transition across `p`-extensions of abelian fields: the single-step
//! formula, composition of steps, twist aggregation and the
//! algebraic/analytic transfer check.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::chargroup::{dual_group, Character, FiniteAbelianGroup};
use crate::localfactor::{
    self, m_extension, LocalCharData, LocalError, LocalFactorReport, LocalType,
};
use crate::qexp::{frobenius_data, CoefficientSource, ModularFormData, QexpError, Reduction};
use crate::splitting::{self, efg, AbelianField, SplittingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KidaError {
    #[error("μ must be 0 over the base field (got {0})")]
    MuNonzero(String),
    #[error(transparent)]
    Field(#[from] SplittingError),
    #[error("no local type for ramified prime {ell} dividing the level; pass one explicitly")]
    MissingLocalType { ell: u64 },
    #[error("local data at {ell}: {source}")]
    Local { ell: u64, source: LocalError },
    #[error(transparent)]
    Form(#[from] QexpError),
    #[error("{0}")]
    HypothesisRequired(&'static str),
    #[error("λ must be given when μ = 0")]
    MissingLambda,
    #[error("transition gave negative λ = {0}")]
    NegativeLambda(i64),
    #[error("chain mismatch: {0}")]
    ChainMismatch(String),
    #[error("composition identity failed: {lhs} != {rhs}")]
    InternalAdditivityViolation { lhs: i64, rhs: i64 },
    #[error("mismatched inputs: {0}")]
    MismatchedInputs(String),
    #[error("twist data incomplete: {0}")]
    IncompleteTwistData(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantKind {
    Algebraic,
    Analytic,
    Plus,
    Minus,
}

impl InvariantKind {
    pub fn is_signed(self) -> bool {
        matches!(self, InvariantKind::Plus | InvariantKind::Minus)
    }

    pub fn name(self) -> &'static str {
        match self {
            InvariantKind::Algebraic => "algebraic",
            InvariantKind::Analytic => "analytic",
            InvariantKind::Plus => "plus",
            InvariantKind::Minus => "minus",
        }
    }
}

impl std::str::FromStr for InvariantKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "algebraic" | "alg" => Ok(InvariantKind::Algebraic),
            "analytic" | "an" => Ok(InvariantKind::Analytic),
            "plus" | "+" => Ok(InvariantKind::Plus),
            "minus" | "-" => Ok(InvariantKind::Minus),
            _ => Err(format!("unknown invariant kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AssertedInput,
    Computed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub kind: InvariantKind,
    /// `None` when unknown.
    pub mu: Option<u64>,
    /// Present only when `mu == Some(0)`.
    pub lambda: Option<u64>,
    pub provenance: Provenance,
}

impl InvariantRecord {
    pub fn asserted(kind: InvariantKind, mu: u64, lambda: u64) -> Self {
        let lambda = (mu == 0).then_some(lambda);
        InvariantRecord {
            kind,
            mu: Some(mu),
            lambda,
            provenance: Provenance::AssertedInput,
        }
    }
}

/// Where local types come from: Frobenius data of a form at good primes,
/// plus explicit types that take precedence.
#[derive(Debug, Clone, Default)]
pub struct LocalSource<'a> {
    pub form: Option<&'a ModularFormData>,
    pub overrides: BTreeMap<u64, LocalType>,
}

impl<'a> LocalSource<'a> {
    pub fn from_form(form: &'a ModularFormData) -> Self {
        LocalSource {
            form: Some(form),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, ell: u64, v: LocalType) -> Self {
        self.overrides.insert(ell, v);
        self
    }
}

/// `α^f + β^f` for the roots of `x² − a x + c` over `F_p`.
fn power_trace(a: u64, c: u64, f: u64, p: u64) -> u64 {
    let (mut prev, mut cur) = (2 % p, a % p);
    if f == 0 {
        return prev;
    }
    for _ in 1..f {
        let next = (arith::mul_mod(a, cur, p) + p - arith::mul_mod(c, prev, p)) % p;
        prev = cur;
        cur = next;
    }
    cur
}

/// The local type of `f` at the places of `field` above `ℓ`.
pub fn resolve_local_type(
    source: &LocalSource<'_>,
    field: &AbelianField,
    ell: u64,
    p: u64,
) -> Result<LocalType, KidaError> {
    if let Some(v) = source.overrides.get(&ell) {
        return Ok(v.clone());
    }
    let form = source.form.ok_or(KidaError::MissingLocalType { ell })?;
    if form.divides_level(ell) {
        if let CoefficientSource::EllipticCurve(e) = form.source() {
            // Only trivial or unramified quadratic characters occur here.
            match e.reduction_type(ell)? {
                Reduction::SplitMultiplicative => {
                    return Ok(LocalType::Special(LocalCharData::unramified(true)))
                }
                Reduction::NonsplitMultiplicative => {
                    let f = efg(field, ell)?.f;
                    return Ok(LocalType::Special(LocalCharData::unramified(f % 2 == 0)));
                }
                _ => {}
            }
        }
        return Err(KidaError::MissingLocalType { ell });
    }
    let fd = frobenius_data(form, ell, p)?;
    let f = efg(field, ell)?.f;
    let c = arith::pow_mod(fd.c, f, p);
    Ok(LocalType::unramified_ps(
        power_trace(fd.a, fd.c, f, p) as i128,
        c as i128,
        p,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceContribution {
    pub ell: u64,
    /// Number of places of `F′∞` above `ℓ`.
    pub places: u64,
    pub local: LocalFactorReport,
    #[serde(skip)]
    pub local_type: LocalType,
}

impl PlaceContribution {
    pub fn total(&self) -> i64 {
        self.places as i64 * self.local.m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionReport {
    pub p: u64,
    pub kind: InvariantKind,
    pub base: String,
    pub extension: String,
    #[serde(skip)]
    pub base_field: AbelianField,
    #[serde(skip)]
    pub extension_field: AbelianField,
    /// `[F′∞ : F∞]` after reducing both fields at `p`.
    pub degree: u64,
    pub mu_in: u64,
    pub lambda_in: u64,
    pub mu_out: u64,
    pub lambda_out: u64,
    /// `degree·λ_in + Σ g_v h_v`, when the tables apply.
    pub lambda_table: Option<u64>,
    pub places: Vec<PlaceContribution>,
    pub unramified_at_p: bool,
    pub hypotheses_asserted: bool,
    pub warnings: Vec<String>,
}

pub struct TransitionInput<'a> {
    pub source: LocalSource<'a>,
    pub p: u64,
    pub base: &'a AbelianField,
    pub extension: &'a AbelianField,
    pub record: InvariantRecord,
    pub hypotheses_asserted: bool,
}

fn nonneg(x: i64) -> Result<u64, KidaError> {
    u64::try_from(x).map_err(|_| KidaError::NegativeLambda(x))
}

fn check_mu(record: &InvariantRecord) -> Result<u64, KidaError> {
    match record.mu {
        Some(0) => record.lambda.ok_or(KidaError::MissingLambda),
        Some(m) => Err(KidaError::MuNonzero(m.to_string())),
        None => Err(KidaError::MuNonzero("unknown".into())),
    }
}

/// `λ(F′∞) = [F′∞:F∞]·λ(F∞) + Σ_{w′} m(F′∞,w′ / F∞,w, V)`.
pub fn transition(input: &TransitionInput<'_>) -> Result<TransitionReport, KidaError> {
    let p = input.p;
    let kind = input.record.kind;
    let lambda_in = check_mu(&input.record)?;
    let ram = splitting::ramified_set(input.base, input.extension, p)?;
    let mut warnings = Vec::new();

    if kind.is_signed() {
        if !input.hypotheses_asserted {
            return Err(KidaError::HypothesisRequired(
                "signed invariants need the congruence hypothesis asserted (--assert-hypotheses)",
            ));
        }
        if !localfactor::is_p_power(ram.extension_reduced.degree(), p) {
            return Err(KidaError::HypothesisRequired(
                "signed invariants need the extension field to be a p-extension of Q",
            ));
        }
    }
    if let Some(form) = input.source.form {
        match form.prime_coefficient(p) {
            Ok(ap) => {
                let ordinary = ap.rem_euclid(p as i128) != 0;
                if kind.is_signed() && ordinary {
                    warnings.push(format!("a_{p} is a unit: the form is ordinary at {p}"));
                } else if !kind.is_signed() && !ordinary {
                    warnings.push(format!(
                        "a_{p} is divisible by {p}: the form is not ordinary at {p}"
                    ));
                }
                if kind.is_signed() && form.weight() != 2 {
                    warnings.push("signed invariants are defined for weight 2".to_string());
                }
            }
            Err(_) => warnings.push(format!("ordinarity at {p} not checked: a_{p} unavailable")),
        }
    }
    if !ram.unramified_at_p {
        warnings.push(format!("extension ramified at {p}: both fields replaced by their maximal subfields unramified at {p}"));
    }
    let reduced = ram.base_reduced != *input.base || ram.extension_reduced != *input.extension;
    if reduced && ram.tower_degree != ram.degree {
        warnings.push(format!(
            "[F'inf:Finf] = {} for the fields as given; the formula uses the reduced degree {}",
            ram.tower_degree, ram.degree
        ));
    }

    let mut places = Vec::new();
    let mut all_tabulated = true;
    for rp in &ram.primes {
        let v = resolve_local_type(&input.source, input.base, rp.ell, p)?;
        let local =
            localfactor::local_factor(&v, rp.ell, rp.local_degree, p).map_err(|source| {
                KidaError::Local {
                    ell: rp.ell,
                    source,
                }
            })?;
        all_tabulated &= local.h.is_some();
        places.push(PlaceContribution {
            ell: rp.ell,
            places: rp.places,
            local,
            local_type: v,
        });
    }
    let sum: i64 = places.iter().map(PlaceContribution::total).sum();
    let lambda_out = nonneg(ram.degree as i64 * lambda_in as i64 + sum)?;

    let lambda_table = if all_tabulated && ram.linearly_disjoint {
        let h: i64 = places
            .iter()
            .map(|c| c.places as i64 * c.local.h.unwrap_or(0))
            .sum();
        Some(nonneg(ram.degree as i64 * lambda_in as i64 + h)?)
    } else {
        if !ram.linearly_disjoint {
            warnings.push(
                "extension not linearly disjoint from the base tower: table route skipped"
                    .to_string(),
            );
        }
        None
    };
    if let Some(t) = lambda_table {
        if t != lambda_out {
            return Err(KidaError::InternalAdditivityViolation {
                lhs: t as i64,
                rhs: lambda_out as i64,
            });
        }
    }

    Ok(TransitionReport {
        p,
        kind,
        base: input.base.to_string(),
        extension: input.extension.to_string(),
        base_field: input.base.clone(),
        extension_field: input.extension.clone(),
        degree: ram.degree,
        mu_in: 0,
        lambda_in,
        mu_out: 0,
        lambda_out,
        lambda_table,
        places,
        unramified_at_p: ram.unramified_at_p,
        hypotheses_asserted: input.hypotheses_asserted,
        warnings,
    })
}

fn merge_warnings(a: &[String], b: &[String]) -> Vec<String> {
    let mut w: Vec<String> = a.iter().chain(b).cloned().collect();
    w.sort();
    w.dedup();
    w
}

/// Composite report for `F ⊆ F′ ⊆ F″` from the reports for `F′/F` and
/// `F″/F′`, checking the bookkeeping identity
/// `Σ_{w″} m(F″/F) = [F″∞:F′∞]·Σ_{w′} m(F′/F) + Σ_{w″} m(F″/F′)`.
pub fn compose(
    ab: &TransitionReport,
    bc: &TransitionReport,
) -> Result<TransitionReport, KidaError> {
    if ab.p != bc.p {
        return Err(KidaError::ChainMismatch(format!(
            "p = {} vs {}",
            ab.p, bc.p
        )));
    }
    if ab.kind != bc.kind {
        return Err(KidaError::ChainMismatch("different invariant kinds".into()));
    }
    let middle_ok = ab.extension_field.is_subfield_of(&bc.base_field)
        && bc.base_field.is_subfield_of(&ab.extension_field);
    if !middle_ok {
        return Err(KidaError::ChainMismatch("the middle fields differ".into()));
    }
    if ab.lambda_out != bc.lambda_in {
        return Err(KidaError::ChainMismatch(format!(
            "λ over the middle field: {} vs {}",
            ab.lambda_out, bc.lambda_in
        )));
    }
    let d_bc = bc.degree;
    let by_ell = |r: &TransitionReport| -> BTreeMap<u64, PlaceContribution> {
        r.places.iter().map(|c| (c.ell, c.clone())).collect()
    };
    let (lower, upper) = (by_ell(ab), by_ell(bc));
    let ells: std::collections::BTreeSet<u64> = lower.keys().chain(upper.keys()).copied().collect();

    let mut places = Vec::new();
    let (mut lhs, mut first, mut second) = (0i64, 0i64, 0i64);
    for ell in ells {
        let local_err = |source| KidaError::Local { ell, source };
        let (v, d_ab, count_ab) = match lower.get(&ell) {
            Some(c) => (c.local_type.clone(), c.local.local_degree, c.places),
            None => (upper[&ell].local_type.clone(), 1, 0),
        };
        let (d_up, count) = match upper.get(&ell) {
            Some(c) => (c.local.local_degree, c.places),
            None => (1, count_ab * d_bc),
        };
        let degree = d_ab * d_up;
        if count_ab > 0 && count * d_up != count_ab * d_bc {
            return Err(KidaError::InternalAdditivityViolation {
                lhs: (count * d_up) as i64,
                rhs: (count_ab * d_bc) as i64,
            });
        }
        let local = localfactor::local_factor(&v, ell, degree, ab.p).map_err(local_err)?;
        let m_ab = if d_ab > 1 {
            m_extension(&v, d_ab).map_err(local_err)?
        } else {
            0
        };
        let m_up = match upper.get(&ell) {
            Some(c) => c.local.m,
            None => 0,
        };
        lhs += count as i64 * local.m;
        first += count_ab as i64 * m_ab;
        second += count as i64 * m_up;
        places.push(PlaceContribution {
            ell,
            places: count,
            local,
            local_type: v,
        });
    }
    let rhs = d_bc as i64 * first + second;
    if lhs != rhs {
        return Err(KidaError::InternalAdditivityViolation { lhs, rhs });
    }
    let degree = ab.degree * d_bc;
    let lambda_out = nonneg(degree as i64 * ab.lambda_in as i64 + lhs)?;
    if lambda_out != bc.lambda_out {
        return Err(KidaError::InternalAdditivityViolation {
            lhs: lambda_out as i64,
            rhs: bc.lambda_out as i64,
        });
    }
    let lambda_table = match (ab.lambda_table, bc.lambda_table) {
        (Some(_), Some(_)) => Some(lambda_out),
        _ => None,
    };
    Ok(TransitionReport {
        p: ab.p,
        kind: ab.kind,
        base: ab.base.clone(),
        extension: bc.extension.clone(),
        base_field: ab.base_field.clone(),
        extension_field: bc.extension_field.clone(),
        degree,
        mu_in: 0,
        lambda_in: ab.lambda_in,
        mu_out: 0,
        lambda_out,
        lambda_table,
        places,
        unramified_at_p: ab.unramified_at_p && bc.unramified_at_p,
        hypotheses_asserted: ab.hypotheses_asserted && bc.hypotheses_asserted,
        warnings: merge_warnings(&ab.warnings, &bc.warnings),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistInvariants {
    pub mu: u64,
    pub lambda: u64,
}

/// `λ(F′∞) = Σ_{χ ∈ G^∨} λ(F∞, A_χ)` for `G = Gal(F′/F)`.
pub fn lambda_via_twists(
    group: &FiniteAbelianGroup,
    twists: &BTreeMap<Character, TwistInvariants>,
) -> Result<u64, KidaError> {
    let dual = dual_group(group);
    let mut total = 0u64;
    for chi in &dual {
        let t = twists.get(chi).ok_or_else(|| {
            KidaError::IncompleteTwistData(format!("no value for character {:?}", chi.exponents()))
        })?;
        if t.mu != 0 {
            return Err(KidaError::IncompleteTwistData(format!(
                "μ = {} for character {:?}",
                t.mu,
                chi.exponents()
            )));
        }
        total += t.lambda;
    }
    if twists.len() != dual.len() {
        return Err(KidaError::IncompleteTwistData(format!(
            "{} values for {} characters",
            twists.len(),
            dual.len()
        )));
    }
    Ok(total)
}

/// Per-twist values `λ(F∞, A_{χ_j}) = λ(F∞, A) + Σ_w (m(V) − m(V_{χ_j}))`
/// for a cyclic step in which every ramified prime has a single place,
/// totally ramified in the whole step.
pub fn twist_lambdas(
    report: &TransitionReport,
) -> Result<BTreeMap<Character, TwistInvariants>, KidaError> {
    let d = report.degree;
    let group = FiniteAbelianGroup::cyclic(d);
    let mut out = BTreeMap::new();
    for chi in dual_group(&group) {
        let j = chi.exponents().first().copied().unwrap_or(0);
        let mut lambda = report.lambda_in as i64;
        for c in &report.places {
            if c.places != 1 || c.local.local_degree != d {
                return Err(KidaError::IncompleteTwistData(format!(
                    "prime {} is not a single totally ramified place",
                    c.ell
                )));
            }
            let m0 = per_twist_m(&c.local_type, 0, d)
                .map_err(|source| KidaError::Local { ell: c.ell, source })?;
            let mj = per_twist_m(&c.local_type, j, d)
                .map_err(|source| KidaError::Local { ell: c.ell, source })?;
            lambda += m0 as i64 - mj as i64;
        }
        out.insert(
            chi,
            TwistInvariants {
                mu: 0,
                lambda: nonneg(lambda)?,
            },
        );
    }
    Ok(out)
}

fn per_twist_m(v: &LocalType, j: u64, d: u64) -> Result<u64, LocalError> {
    match v {
        LocalType::Generic(values) => {
            let len = values.len() as u64;
            if !len.is_multiple_of(d) {
                return Err(LocalError::IncoherentGenericData(format!(
                    "{len} values for degree {d}"
                )));
            }
            Ok(values[(j * (len / d)) as usize])
        }
        _ => localfactor::m_single(v, j, d),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McTransferReport {
    pub p: u64,
    pub base: String,
    pub extension: String,
    pub lambda_in: u64,
    pub lambda_algebraic: u64,
    pub lambda_analytic: u64,
    /// Main conjecture over the base, if known; it transfers unchanged.
    pub main_conjecture_base: Option<bool>,
    pub main_conjecture_extension: Option<bool>,
    pub statement: String,
}

/// The main conjecture over `F` with `μ = 0` holds iff it holds over `F′`.
pub fn mc_transfer(
    base_status: Option<bool>,
    algebraic: &TransitionReport,
    analytic: &TransitionReport,
) -> Result<McTransferReport, KidaError> {
    if algebraic.kind != InvariantKind::Algebraic || analytic.kind != InvariantKind::Analytic {
        return Err(KidaError::MismatchedInputs(
            "expected one algebraic and one analytic report".into(),
        ));
    }
    if algebraic.p != analytic.p
        || algebraic.base_field != analytic.base_field
        || algebraic.extension_field != analytic.extension_field
        || algebraic.degree != analytic.degree
    {
        return Err(KidaError::MismatchedInputs(
            "the reports describe different extensions".into(),
        ));
    }
    if algebraic.lambda_in != analytic.lambda_in {
        return Err(KidaError::MismatchedInputs(format!(
            "λ over the base differs: algebraic {} vs analytic {}",
            algebraic.lambda_in, analytic.lambda_in
        )));
    }
    let contributions = |r: &TransitionReport| -> Vec<(u64, u64, i64)> {
        r.places
            .iter()
            .map(|c| (c.ell, c.places, c.local.m))
            .collect()
    };
    if contributions(algebraic) != contributions(analytic) {
        return Err(KidaError::MismatchedInputs(
            "local contributions differ".into(),
        ));
    }
    if algebraic.lambda_out != analytic.lambda_out {
        return Err(KidaError::InternalAdditivityViolation {
            lhs: algebraic.lambda_out as i64,
            rhs: analytic.lambda_out as i64,
        });
    }
    let statement = format!(
        "with mu = 0, the main conjecture over {} is equivalent to the main conjecture over {}",
        algebraic.base, algebraic.extension
    );
    Ok(McTransferReport {
        p: algebraic.p,
        base: algebraic.base.clone(),
        extension: algebraic.extension.clone(),
        lambda_in: algebraic.lambda_in,
        lambda_algebraic: algebraic.lambda_out,
        lambda_analytic: analytic.lambda_out,
        main_conjecture_base: base_status,
        main_conjecture_extension: base_status,
        statement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::EllipticCurve;

    fn run(
        form: &ModularFormData,
        base: &AbelianField,
        ext: &AbelianField,
        kind: InvariantKind,
        lambda: u64,
    ) -> Result<TransitionReport, KidaError> {
        transition(&TransitionInput {
            source: LocalSource::from_form(form),
            p: 11,
            base,
            extension: ext,
            record: InvariantRecord::asserted(kind, 0, lambda),
            hypotheses_asserted: false,
        })
    }

    #[test]
    fn delta_examples() {
        let d = ModularFormData::delta();
        let q = AbelianField::rational();
        let f23 = AbelianField::with_degree(23, 11).unwrap();
        let r = run(&d, &q, &f23, InvariantKind::Algebraic, 1).unwrap();
        assert_eq!((r.degree, r.lambda_out, r.lambda_table), (11, 11, Some(11)));
        assert_eq!(r.places[0].local.h, Some(0));

        let f1123 = AbelianField::with_degree(1123, 11).unwrap();
        let r = run(&d, &q, &f1123, InvariantKind::Analytic, 1).unwrap();
        assert_eq!(
            (r.lambda_out, r.places[0].places, r.places[0].local.h),
            (31, 1, Some(20))
        );
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }

    #[test]
    fn degenerate_contracts() {
        let d = ModularFormData::delta();
        let f23 = AbelianField::with_degree(23, 11).unwrap();
        let r = run(&d, &f23, &f23, InvariantKind::Algebraic, 7).unwrap();
        assert_eq!((r.degree, r.lambda_out, r.places.len()), (1, 7, 0));

        let q = AbelianField::rational();
        let err = transition(&TransitionInput {
            source: LocalSource::from_form(&d),
            p: 11,
            base: &q,
            extension: &f23,
            record: InvariantRecord::asserted(InvariantKind::Algebraic, 1, 0),
            hypotheses_asserted: false,
        });
        assert_eq!(err.unwrap_err(), KidaError::MuNonzero("1".into()));
        let sc = LocalSource::default().with_override(23, LocalType::Supercuspidal);
        let r = transition(&TransitionInput {
            source: sc,
            p: 11,
            base: &q,
            extension: &f23,
            record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, 2),
            hypotheses_asserted: false,
        })
        .unwrap();
        assert_eq!(
            (r.lambda_out, r.places[0].local.m, r.lambda_table),
            (22, 0, Some(22))
        );
    }

    #[test]
    fn missing_local_type_for_level_prime() {
        let table = crate::qexp::HeckeTable::parse("weight 2 level 23\n2 1\n11 1\n").unwrap();
        let form = ModularFormData::table(table);
        let q = AbelianField::rational();
        let f23 = AbelianField::with_degree(23, 11).unwrap();
        assert_eq!(
            run(&form, &q, &f23, InvariantKind::Algebraic, 1).unwrap_err(),
            KidaError::MissingLocalType { ell: 23 }
        );
        let src = LocalSource::from_form(&form)
            .with_override(23, LocalType::Special(LocalCharData::unramified(true)));
        let r = transition(&TransitionInput {
            source: src,
            p: 11,
            base: &q,
            extension: &f23,
            record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, 0),
            hypotheses_asserted: false,
        })
        .unwrap();
        assert_eq!(r.lambda_out, 10);
    }

    #[test]
    fn residue_degree_raises_frobenius() {
        // x² − a x + c with roots 2, 3 mod 5: a = 5 ≡ 0, c = 6 ≡ 1.
        assert_eq!(power_trace(0, 1, 1, 5), 0);
        assert_eq!(power_trace(0, 1, 2, 5), (4 + 9) % 5);
        assert_eq!(power_trace(0, 1, 4, 5), (16 + 81) % 5);
    }

    #[test]
    fn signed_requires_hypotheses() {
        let e = ModularFormData::elliptic_curve(EllipticCurve::x0_11());
        let q = AbelianField::rational();
        let f = AbelianField::with_degree(23, 11).unwrap();
        assert!(matches!(
            run(&e, &q, &f, InvariantKind::Plus, 1),
            Err(KidaError::HypothesisRequired(_))
        ));
        let mk = |kind| {
            transition(&TransitionInput {
                source: LocalSource::from_form(&e),
                p: 11,
                base: &q,
                extension: &f,
                record: InvariantRecord::asserted(kind, 0, 2),
                hypotheses_asserted: true,
            })
            .unwrap()
        };
        assert_eq!(
            mk(InvariantKind::Plus).lambda_out,
            mk(InvariantKind::Minus).lambda_out
        );
    }

    #[test]
    fn twists_aggregate_to_transition() {
        let d = ModularFormData::delta();
        let q = AbelianField::rational();
        for (n, expected, per) in [(23u64, 11u64, 1u64), (1123, 31, 3)] {
            let f = AbelianField::with_degree(n, 11).unwrap();
            let r = run(&d, &q, &f, InvariantKind::Algebraic, 1).unwrap();
            let tw = twist_lambdas(&r).unwrap();
            for (chi, t) in &tw {
                assert_eq!(t.lambda, if chi.is_trivial() { 1 } else { per });
            }
            assert_eq!(
                lambda_via_twists(&FiniteAbelianGroup::cyclic(11), &tw),
                Ok(expected)
            );
        }
        let mut partial = twist_lambdas(
            &run(
                &d,
                &q,
                &AbelianField::with_degree(23, 11).unwrap(),
                InvariantKind::Algebraic,
                1,
            )
            .unwrap(),
        )
        .unwrap();
        let first = partial.keys().next().unwrap().clone();
        partial.remove(&first);
        assert!(matches!(
            lambda_via_twists(&FiniteAbelianGroup::cyclic(11), &partial),
            Err(KidaError::IncompleteTwistData(_))
        ));
    }

    #[test]
    fn mc_transfer_examples() {
        let d = ModularFormData::delta();
        let q = AbelianField::rational();
        let f = AbelianField::with_degree(23, 11).unwrap();
        let alg = run(&d, &q, &f, InvariantKind::Algebraic, 1).unwrap();
        let an = run(&d, &q, &f, InvariantKind::Analytic, 1).unwrap();
        let t = mc_transfer(Some(true), &alg, &an).unwrap();
        assert_eq!(
            (
                t.lambda_algebraic,
                t.lambda_analytic,
                t.main_conjecture_extension
            ),
            (11, 11, Some(true))
        );
        let an2 = run(&d, &q, &f, InvariantKind::Analytic, 2).unwrap();
        assert!(matches!(
            mc_transfer(None, &alg, &an2),
            Err(KidaError::MismatchedInputs(_))
        ));
    }

    #[test]
    fn compose_p3_chain() {
        // Q ⊂ degree-3 ⊂ degree-9 subfields of Q(ζ₁₀₉); 109 ≡ 1 mod 27.
        let q = AbelianField::rational();
        let f3 = AbelianField::with_degree(109, 3).unwrap();
        let f9 = AbelianField::with_degree(109, 9).unwrap();
        let generic = LocalType::Generic(vec![2, 0, 1, 0, 1, 0, 0, 1, 0]);
        let mk = |a: &AbelianField, b: &AbelianField, lambda: u64| {
            transition(&TransitionInput {
                source: LocalSource::default().with_override(109, generic.clone()),
                p: 3,
                base: a,
                extension: b,
                record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, lambda),
                hypotheses_asserted: false,
            })
        };
        let ab = mk(&q, &f3, 4).unwrap();
        let restricted = generic.restrict(3).unwrap();
        let bc = transition(&TransitionInput {
            source: LocalSource::default().with_override(109, restricted),
            p: 3,
            base: &f3,
            extension: &f9,
            record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, ab.lambda_out),
            hypotheses_asserted: false,
        })
        .unwrap();
        let direct = mk(&q, &f9, 4).unwrap();
        let composed = compose(&ab, &bc).unwrap();
        assert_eq!(composed.lambda_out, direct.lambda_out);
        assert_eq!(composed.degree, 9);

        let trivial = mk(&f9, &f9, direct.lambda_out).unwrap();
        assert_eq!(
            compose(&direct, &trivial).unwrap().lambda_out,
            direct.lambda_out
        );
        assert!(matches!(
            compose(&bc, &ab),
            Err(KidaError::ChainMismatch(_))
        ));
    }
}
