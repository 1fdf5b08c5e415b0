//! Acceptance criteria, one PASS/FAIL line each; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kida_core::arith;
use kida_core::kida::{
    mc_transfer, resolve_local_type, transition, InvariantKind, InvariantRecord, KidaError,
    LocalSource, TransitionInput, TransitionReport,
};
use kida_core::localfactor::{h_v, local_factor, m_extension, LocalType};
use kida_core::qexp::{delta_coefficients, EllipticCurve, ModularFormData};
use kida_core::splitting::{tower_places, AbelianField};
use kida_core::verify::{count_points_euler, run_suite, Suite};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn delta_transition(
    ext: &AbelianField,
    kind: InvariantKind,
) -> Result<TransitionReport, KidaError> {
    let delta = ModularFormData::delta();
    transition(&TransitionInput {
        source: LocalSource::from_form(&delta),
        p: 11,
        base: &AbelianField::rational(),
        extension: ext,
        record: InvariantRecord::asserted(kind, 0, 1),
        hypotheses_asserted: false,
    })
}

fn field(n: u64) -> AbelianField {
    AbelianField::with_degree(n, 11).expect("unique degree-11 subfield")
}

fn c1_tau_23() -> Outcome {
    let (coeffs, t) = timed(|| delta_coefficients(2000));
    let coeffs = coeffs.map_err(|e| e.to_string())?;
    ensure(
        coeffs[22] == 18_643_272,
        format!("tau(23) = {}", coeffs[22]),
    )?;
    ensure(t < Duration::from_secs(1), format!("took {t:?}"))?;
    Ok(format!("tau(23) = 18643272 in {t:.2?} at precision 2000"))
}

fn c2_tau_1123() -> Outcome {
    let (coeffs, t) = timed(|| delta_coefficients(1200));
    let coeffs = coeffs.map_err(|e| e.to_string())?;
    let r = coeffs[1122].rem_euclid(11);
    ensure(r == 2, format!("tau(1123) mod 11 = {r}"))?;
    ensure(t < Duration::from_secs(5), format!("took {t:?}"))?;
    Ok(format!("tau(1123) = 2 mod 11 in {t:.2?} at precision 1200"))
}

fn c3_hv() -> Outcome {
    let delta = ModularFormData::delta();
    let src = LocalSource::from_form(&delta);
    let q = AbelianField::rational();
    let mut hs = Vec::new();
    for ell in [23u64, 1123] {
        let v = resolve_local_type(&src, &q, ell, 11).map_err(|e| e.to_string())?;
        hs.push(h_v(&v, 11).map_err(|e| e.to_string())?);
    }
    ensure(hs == [0, 20], format!("h = {hs:?}"))?;
    Ok("h_23(delta) = 0, h_1123(delta) = 20".into())
}

fn c4_lambda_11() -> Outcome {
    let r = delta_transition(&field(23), InvariantKind::Algebraic).map_err(|e| e.to_string())?;
    ensure(r.lambda_out == 11, format!("lambda = {}", r.lambda_out))?;
    Ok("lambda(Q(zeta_23)+, delta) = 11".into())
}

fn c5_lambda_31() -> Outcome {
    let r = delta_transition(&field(1123), InvariantKind::Algebraic).map_err(|e| e.to_string())?;
    let g = tower_places(&AbelianField::rational(), 1123, 11)
        .map_err(|e| e.to_string())?
        .g_infinity;
    ensure(g == 1, format!("g_1123 = {g}"))?;
    ensure(
        r.places.len() == 1 && r.places[0].places == 1,
        "expected one place above 1123",
    )?;
    ensure(r.lambda_out == 31, format!("lambda = {}", r.lambda_out))?;
    Ok("lambda = 31 over the degree-11 subfield of Q(zeta_1123), g_1123 = 1".into())
}

fn suite_outcome(suite: Suite, seed: u64, size: Option<u64>, limit: Option<Duration>) -> Outcome {
    let (r, t) = timed(|| run_suite(suite, seed, size));
    ensure(
        r.passed(),
        format!(
            "{} counterexamples, first: {:?}",
            r.counterexamples.len(),
            r.counterexamples.first()
        ),
    )?;
    if let Some(limit) = limit {
        ensure(t < limit, format!("took {t:?}"))?;
    }
    Ok(format!(
        "{suite}: {} cases, 0 counterexamples, {t:.2?}",
        r.cases
    ))
}

fn c6_group_identity() -> Outcome {
    suite_outcome(
        Suite::GroupIdentity,
        7,
        Some(200),
        Some(Duration::from_secs(60)),
    )
}

fn c7_tower_additivity() -> Outcome {
    suite_outcome(Suite::TowerAdditivity, 1, Some(27), None)
}

fn c8_path_agreement() -> Outcome {
    suite_outcome(Suite::PathAgreement, 3, None, None)
}

fn c9_elliptic_curve() -> Outcome {
    let curve = EllipticCurve::x0_11();
    let form = ModularFormData::elliptic_curve(curve);
    let src = LocalSource::from_form(&form);
    let q = AbelianField::rational();
    let mut tested = 0;
    for ell in
        (2..=5000u64).filter(|&l| l % 11 == 1 && arith::is_prime(l) && curve.has_good_reduction(l))
    {
        let v = resolve_local_type(&src, &q, ell, 11).map_err(|e| e.to_string())?;
        let h = h_v(&v, 11).map_err(|e| e.to_string())?;
        let n = count_points_euler(&curve, ell);
        ensure(
            (h != 0) == n.is_multiple_of(11),
            format!("ell = {ell}: h = {h}, #E = {n}"),
        )?;
        tested += 1;
    }
    Ok(format!(
        "X0(11), p = 11: {tested} primes l = 1 mod 11 up to 5000 agree with point counts"
    ))
}

fn c10_mc_transfer() -> Outcome {
    for n in [23u64, 1123] {
        let alg =
            delta_transition(&field(n), InvariantKind::Algebraic).map_err(|e| e.to_string())?;
        let an = delta_transition(&field(n), InvariantKind::Analytic).map_err(|e| e.to_string())?;
        let t = mc_transfer(Some(true), &alg, &an).map_err(|e| e.to_string())?;
        ensure(
            t.lambda_algebraic == t.lambda_analytic,
            format!("{} vs {}", t.lambda_algebraic, t.lambda_analytic),
        )?;
    }
    Ok("algebraic and analytic transitions agree (11 and 31)".into())
}

fn c11_degenerate() -> Outcome {
    let f = field(23);
    let delta = ModularFormData::delta();
    let same = transition(&TransitionInput {
        source: LocalSource::from_form(&delta),
        p: 11,
        base: &f,
        extension: &f,
        record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, 5),
        hypotheses_asserted: false,
    })
    .map_err(|e| e.to_string())?;
    ensure(
        (same.mu_out, same.lambda_out) == (0, 5),
        "degree-1 transition is not the identity",
    )?;

    let mu = transition(&TransitionInput {
        source: LocalSource::from_form(&delta),
        p: 11,
        base: &AbelianField::rational(),
        extension: &f,
        record: InvariantRecord::asserted(InvariantKind::Algebraic, 2, 0),
        hypotheses_asserted: false,
    });
    ensure(
        matches!(mu, Err(KidaError::MuNonzero(_))),
        format!("mu != 0 gave {mu:?}"),
    )?;

    for e in [1u64, 11, 121] {
        let sc = LocalType::Supercuspidal;
        ensure(
            h_v(&sc, e) == Ok(0) && m_extension(&sc, e) == Ok(0),
            "supercuspidal contributes",
        )?;
        ensure(
            local_factor(&sc, 23, e, 11).map(|r| r.m) == Ok(0),
            "supercuspidal report",
        )?;
    }
    let sc_run = transition(&TransitionInput {
        source: LocalSource::default().with_override(23, LocalType::Supercuspidal),
        p: 11,
        base: &AbelianField::rational(),
        extension: &f,
        record: InvariantRecord::asserted(InvariantKind::Algebraic, 0, 1),
        hypotheses_asserted: false,
    })
    .map_err(|e| e.to_string())?;
    ensure(sc_run.lambda_out == 11, "supercuspidal transition")?;
    Ok("degree 1 is the identity, mu != 0 rejected, supercuspidal gives 0".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("tau(23) exact and fast", c1_tau_23),
        ("tau(1123) mod 11", c2_tau_1123),
        ("h_23 and h_1123 for delta", c3_hv),
        ("lambda over Q(zeta_23)+", c4_lambda_11),
        ("lambda over the 1123 field", c5_lambda_31),
        ("group identity suite", c6_group_identity),
        ("tower additivity suite", c7_tower_additivity),
        ("table versus sum", c8_path_agreement),
        ("elliptic curve consistency", c9_elliptic_curve),
        ("main conjecture transfer", c10_mc_transfer),
        ("degenerate contracts", c11_degenerate),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2} ({name}): {detail}", i + 1),
            Err(why) => {
                println!("FAIL criterion {:>2} ({name}): {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
