//! Seeded property suites. Each run is deterministic in `(suite, seed, size)`
//! and collects counterexamples instead of stopping at the first one.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith;
use crate::chargroup::{
    abelian_groups_up_to, multiplicity, Character, FiniteAbelianGroup, IdentityContext,
    RepMultiset, Subgroup,
};
use crate::kida::{resolve_local_type, LocalSource};
use crate::localfactor::{
    check_tower_additivity, h_v, local_factor, m_extension, LocalCharData, LocalType,
};
use crate::qexp::{EllipticCurve, ModularFormData};
use crate::splitting::AbelianField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GroupIdentity,
    TowerAdditivity,
    PathAgreement,
    Hasse,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::GroupIdentity => "group-identity",
            Suite::TowerAdditivity => "tower-additivity",
            Suite::PathAgreement => "path-agreement",
            Suite::Hasse => "hasse",
        }
    }

    /// Group order bound, cyclic order bound, unused, and prime bound.
    pub fn default_size(self) -> u64 {
        match self {
            Suite::GroupIdentity => 200,
            Suite::TowerAdditivity => 27,
            Suite::PathAgreement => 0,
            Suite::Hasse => 5000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "group-identity" => Ok(Suite::GroupIdentity),
            "tower-additivity" => Ok(Suite::TowerAdditivity),
            "path-agreement" => Ok(Suite::PathAgreement),
            "hasse" => Ok(Suite::Hasse),
            _ => Err(format!("unknown suite `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub size: u64,
    pub cases: u64,
    pub counterexamples: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Random representations drawn per subgroup in the group-identity suite.
pub const SAMPLES_PER_SUBGROUP: usize = 100;

pub fn run_suite(suite: Suite, seed: u64, size: Option<u64>) -> SuiteReport {
    let size = size.unwrap_or(suite.default_size());
    let mut report = SuiteReport {
        suite,
        seed,
        size,
        cases: 0,
        counterexamples: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::GroupIdentity => group_identity(&mut report, &mut rng, size),
        Suite::TowerAdditivity => tower_additivity(&mut report, &mut rng, size),
        Suite::PathAgreement => path_agreement(&mut report),
        Suite::Hasse => hasse(&mut report, &mut rng, size),
    }
    report
}

fn group_identity(report: &mut SuiteReport, rng: &mut ChaCha8Rng, max_order: u64) {
    for g in abelian_groups_up_to(max_order) {
        let n = g.order() as usize;
        for h in g.all_subgroups() {
            let ctx = IdentityContext::new(&g, &h).expect("subgroup of g");
            for _ in 0..SAMPLES_PER_SUBGROUP {
                let k = rng.gen_range(0..=n.min(8));
                let w: Vec<(usize, u64)> = (0..k)
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(1..=3)))
                    .collect();
                let c = ctx.check(&w);
                report.cases += 1;
                if !c.holds() {
                    report.counterexamples.push(format!(
                        "G={:?} H={:?} W={:?}: {} != {}",
                        g.factors(),
                        h.generators(),
                        w,
                        c.lhs,
                        c.rhs
                    ));
                }
            }
        }
    }
}

fn prime_powers_up_to(bound: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (3..=bound).filter(|&p| arith::is_prime(p)) {
        let mut b = 1;
        while p.pow(b) <= bound {
            out.push((p, b));
            b += 1;
        }
    }
    out
}

/// Characters over `Z/p^b` covering every branch of the tables.
fn sample_chars(p: u64, b: u32) -> Vec<LocalCharData> {
    let mut out = vec![
        LocalCharData::unramified(true),
        LocalCharData::unramified(false),
    ];
    for trivial in [true, false] {
        out.push(LocalCharData::ramified(trivial, false));
        for k in 1..=b + 1 {
            out.push(LocalCharData::ramified_of_order(trivial, p.pow(k)));
        }
        out.push(LocalCharData::ramified_of_order(trivial, 2));
    }
    out
}

fn tabulated_types(p: u64, chars: &[LocalCharData]) -> Vec<LocalType> {
    let mut types = vec![LocalType::Supercuspidal];
    for a in 0..p {
        for c in 1..p {
            types.push(LocalType::unramified_ps(a as i128, c as i128, p));
        }
    }
    for &x in chars {
        types.push(LocalType::Special(x));
        for &y in chars {
            types.push(LocalType::RamifiedPS(x, y));
        }
    }
    types
}

fn divisor_chains(p: u64, b: u32) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for i in 0..=b {
        for j in i..=b {
            out.push((p.pow(i), p.pow(j)));
        }
    }
    out
}

fn tower_additivity(report: &mut SuiteReport, rng: &mut ChaCha8Rng, bound: u64) {
    for (p, b) in prime_powers_up_to(bound) {
        let d = p.pow(b);
        let chains = divisor_chains(p, b);
        for v in tabulated_types(p, &sample_chars(p, b)) {
            for &(inner, outer) in &chains {
                report.cases += 1;
                match check_tower_additivity(&v, inner, outer) {
                    Ok(c) if c.holds() => {}
                    Ok(c) => report.counterexamples.push(format!(
                        "{v} over {inner} | {outer}: {} != {}",
                        c.lhs, c.rhs
                    )),
                    Err(e) => report
                        .counterexamples
                        .push(format!("{v} over {inner} | {outer}: {e}")),
                }
            }
        }

        // Generic data from explicit character multisets over Z/p^b.
        let g = FiniteAbelianGroup::cyclic(d);
        for _ in 0..20 {
            let mut w = RepMultiset::new(g.clone());
            let mut mults = vec![0u64; d as usize];
            for _ in 0..rng.gen_range(1..=6) {
                let j = rng.gen_range(0..d);
                let m = rng.gen_range(1..=2);
                mults[j as usize] += m;
                w.add(Character::new(&g, vec![j]).expect("character"), m)
                    .expect("character of g");
            }
            let values: Vec<u64> = (0..d).map(|j| mults[((d - j) % d) as usize]).collect();
            let v = LocalType::Generic(values);
            for &(inner, outer) in &chains {
                report.cases += 1;
                match check_tower_additivity(&v, inner, outer) {
                    Ok(c) if c.holds() => {}
                    Ok(c) => report.counterexamples.push(format!(
                        "{v} over {inner} | {outer}: {} != {}",
                        c.lhs, c.rhs
                    )),
                    Err(e) => report
                        .counterexamples
                        .push(format!("{v} over {inner} | {outer}: {e}")),
                }
            }
            for k in 0..=b {
                let step = p.pow(k);
                let Ok(LocalType::Generic(r)) = v.restrict(step) else {
                    report
                        .counterexamples
                        .push(format!("{v}: restriction along {step} failed"));
                    continue;
                };
                let sub = Subgroup::new(vec![vec![step % d]]);
                for (idx, &val) in r.iter().enumerate() {
                    report.cases += 1;
                    let chi_inv =
                        Character::new(&g, vec![(d - idx as u64 % d) % d]).expect("character");
                    let oracle = multiplicity(&w, &chi_inv, &sub).expect("subgroup of g");
                    if oracle != val {
                        report.counterexamples.push(format!(
                            "{v} restricted along {step}: index {idx} gives {val}, oracle {oracle}"
                        ));
                    }
                }
            }
        }
    }
}

/// Primes and `e ∈ {p, p²}` for the table-versus-sum comparison.
pub const PATH_PRIMES: [u64; 3] = [3, 5, 11];

fn path_agreement(report: &mut SuiteReport) {
    for p in PATH_PRIMES {
        for v in tabulated_types(p, &sample_chars(p, 2)) {
            for e in [p, p * p] {
                report.cases += 1;
                let table = h_v(&v, e);
                let sum = m_extension(&v, e);
                match (table, sum) {
                    (Ok(h), Ok(m)) if h == m => {
                        if let Err(err) = local_factor(&v, 0, e, p) {
                            report.counterexamples.push(format!("{v} e={e}: {err}"));
                        }
                    }
                    (h, m) => report
                        .counterexamples
                        .push(format!("{v} e={e}: table {h:?}, sum {m:?}")),
                }
            }
        }
    }
}

/// `#E(F_ℓ)` by Euler's criterion, independent of the square-table count.
pub fn count_points_euler(e: &EllipticCurve, ell: u64) -> u64 {
    let m = ell as i128;
    let r = |v: i64| (v as i128).rem_euclid(m);
    let (a1, a2, a3, a4, a6) = (r(e.a1), r(e.a2), r(e.a3), r(e.a4), r(e.a6));
    let mut total: i64 = ell as i64 + 1;
    for x in 0..m {
        let cubic = (((x * x % m) * x) % m + a2 * x % m * x + a4 * x + a6) % m;
        let lin = (a1 * x + a3) % m;
        let d = ((4 * cubic + lin * lin) % m) as u64;
        if d != 0 {
            let leg = arith::pow_mod(d, (ell - 1) / 2, ell);
            total += if leg == 1 { 1 } else { -1 };
        }
    }
    total as u64
}

fn random_curve(rng: &mut ChaCha8Rng) -> EllipticCurve {
    loop {
        let mut c = || rng.gen_range(-12i64..=12);
        let e = EllipticCurve::new(c(), c(), c(), c(), c());
        if e.discriminant() != 0 {
            return e;
        }
    }
}

fn hasse(report: &mut SuiteReport, rng: &mut ChaCha8Rng, bound: u64) {
    let mut curves = vec![(EllipticCurve::x0_11(), 11u64)];
    for p in [3u64, 5, 7] {
        curves.push((random_curve(rng), p));
    }
    let q = AbelianField::rational();
    for (curve, p) in curves {
        let form = ModularFormData::elliptic_curve(curve);
        let source = LocalSource::from_form(&form);
        for ell in
            (3..=bound).filter(|&l| l % p == 1 && arith::is_prime(l) && curve.has_good_reduction(l))
        {
            report.cases += 1;
            let count = count_points_euler(&curve, ell);
            let a = ell as i64 + 1 - count as i64;
            if (a * a) as u64 > 4 * ell {
                report.counterexamples.push(format!(
                    "{curve} at {ell}: |a| = {} breaks the Hasse bound",
                    a.abs()
                ));
            }
            let h = resolve_local_type(&source, &q, ell, p)
                .map_err(|e| e.to_string())
                .and_then(|v| h_v(&v, p).map_err(|e| e.to_string()));
            match h {
                Ok(h) if (h != 0) == count.is_multiple_of(p) => {}
                Ok(h) => report
                    .counterexamples
                    .push(format!("{curve} p={p} ell={ell}: h = {h}, #E = {count}")),
                Err(e) => report
                    .counterexamples
                    .push(format!("{curve} p={p} ell={ell}: {e}")),
            }
        }
    }
}
