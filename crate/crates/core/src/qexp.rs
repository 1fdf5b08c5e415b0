//! q-expansions and Fourier-coefficient sources: the discriminant form via
//! the η-product, elliptic curves via point counting, and Hecke eigenvalue
//! tables. Also Dirichlet twists `Σ a_n ψ(n) qⁿ`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, pow_mod, unit_group, UnitGroup};
use crate::chargroup::Character;

/// Default number of `q`-expansion terms kept for the discriminant form.
pub const DEFAULT_PRECISION: usize = 2000;

/// Largest prime accepted by the naive point counter.
pub const POINT_COUNT_BOUND: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QexpError {
    #[error("coefficient {n} requested beyond precision {precision}")]
    PrecisionExceeded { n: usize, precision: usize },
    #[error("integer overflow while {0}")]
    Overflow(&'static str),
    #[error("{ell} divides the discriminant of the curve")]
    BadReduction { ell: u64 },
    #[error("{ell} exceeds the point-counting bound {bound}")]
    BoundExceeded { ell: u64, bound: u64 },
    #[error("{ell} divides the level; supply a local type for it")]
    RamifiedLevel { ell: u64 },
    #[error("no coefficient available for n = {0}")]
    MissingCoefficient(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the auxiliary prime must differ from p = {0}")]
    SameAsP(u64),
    #[error("table line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("could not read table: {0}")]
    Io(String),
}

/// A truncated power series `Σ_{i=0}^{B} cᵢ qⁱ` with exact integer
/// coefficients. Nothing beyond `q^B` is ever read or written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<i128>,
}

impl PowerSeries {
    pub fn from_coeffs(mut coeffs: Vec<i128>, precision: usize) -> Self {
        coeffs.resize(precision + 1, 0);
        PowerSeries { coeffs }
    }

    pub fn one(precision: usize) -> Self {
        Self::from_coeffs(vec![1], precision)
    }

    /// Euler's pentagonal series `∏(1 − qⁿ) = Σ_{k∈Z} (−1)^k q^{k(3k−1)/2}`.
    pub fn pentagonal(precision: usize) -> Self {
        let mut c = vec![0i128; precision + 1];
        c[0] = 1;
        for k in 1.. {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let a = k * (3 * k - 1) / 2;
            let b = k * (3 * k + 1) / 2;
            if a > precision {
                break;
            }
            c[a] += sign;
            if b <= precision {
                c[b] += sign;
            }
        }
        PowerSeries { coeffs: c }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<i128, QexpError> {
        self.coeffs
            .get(n)
            .copied()
            .ok_or(QexpError::PrecisionExceeded {
                n,
                precision: self.precision(),
            })
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Truncated product at the smaller of the two precisions. Zero terms
    /// of `other` are skipped, so multiplying by a sparse series is cheap.
    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries, QexpError> {
        let b = self.precision().min(other.precision());
        let mut out = vec![0i128; b + 1];
        for (j, &oj) in other.coeffs.iter().enumerate().take(b + 1) {
            if oj == 0 {
                continue;
            }
            for i in 0..=(b - j) {
                let term = self.coeffs[i]
                    .checked_mul(oj)
                    .ok_or(QexpError::Overflow("multiplying series"))?;
                out[i + j] = out[i + j]
                    .checked_add(term)
                    .ok_or(QexpError::Overflow("multiplying series"))?;
            }
        }
        Ok(PowerSeries { coeffs: out })
    }

    pub fn pow(&self, k: u32) -> Result<PowerSeries, QexpError> {
        let mut acc = PowerSeries::one(self.precision());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// `τ(1), …, τ(B)` from `Δ = q ∏(1 − qⁿ)^{24}`: the pentagonal series
/// multiplied in 24 times, then shifted by one.
pub fn delta_coefficients(precision: usize) -> Result<Vec<i128>, QexpError> {
    if precision == 0 {
        return Ok(Vec::new());
    }
    let eta = PowerSeries::pentagonal(precision - 1).pow(24)?;
    Ok(eta.coeffs().to_vec())
}

/// Ramanujan's `τ(n)` computed at the given precision budget.
pub fn tau(n: usize, precision: usize) -> Result<i128, QexpError> {
    if n == 0 || n > precision {
        return Err(QexpError::PrecisionExceeded { n, precision });
    }
    // Only the first n terms are needed; the budget just bounds n.
    let eta = PowerSeries::pentagonal(n - 1).pow(24)?;
    eta.coeff(n - 1)
}

/// A Weierstrass curve `y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EllipticCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
}

impl EllipticCurve {
    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Self {
        EllipticCurve { a1, a2, a3, a4, a6 }
    }

    /// `y² + y = x³ − x² − 10x − 20`, the curve `X₀(11)`.
    pub fn x0_11() -> Self {
        EllipticCurve::new(0, -1, 1, -10, -20)
    }

    pub fn discriminant(&self) -> i128 {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn has_good_reduction(&self, ell: u64) -> bool {
        self.discriminant() % ell as i128 != 0
    }

    fn check_prime(&self, ell: u64) -> Result<(), QexpError> {
        if !arith::is_prime(ell) {
            return Err(QexpError::NotPrime(ell));
        }
        if ell > POINT_COUNT_BOUND {
            return Err(QexpError::BoundExceeded {
                ell,
                bound: POINT_COUNT_BOUND,
            });
        }
        if !self.has_good_reduction(ell) {
            return Err(QexpError::BadReduction { ell });
        }
        Ok(())
    }

    /// `#E(F_ℓ)` including the point at infinity.
    pub fn count_points(&self, ell: u64) -> Result<u64, QexpError> {
        self.check_prime(ell)?;
        Ok(self.count_projective(ell))
    }

    /// Point count of the reduced cubic, singular or not.
    fn count_projective(&self, ell: u64) -> u64 {
        let m = ell as i128;
        let r = |v: i64| (v as i128).rem_euclid(m);
        let (a1, a2, a3, a4, a6) = (r(self.a1), r(self.a2), r(self.a3), r(self.a4), r(self.a6));
        let mut count = 1u64;
        if ell == 2 {
            for x in 0..2i128 {
                for y in 0..2i128 {
                    let lhs = y * y + a1 * x * y + a3 * y;
                    let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                    if (lhs - rhs).rem_euclid(2) == 0 {
                        count += 1;
                    }
                }
            }
            return count;
        }
        // (2y + a₁x + a₃)² = 4(x³ + a₂x² + a₄x + a₆) + (a₁x + a₃)²
        let mut roots = vec![0u64; ell as usize];
        for y in 0..ell {
            roots[(y * y % ell) as usize] += 1;
        }
        for x in 0..m {
            let cubic = ((x * x % m * x) + a2 * x % m * x + a4 * x + a6) % m;
            let lin = (a1 * x + a3) % m;
            let d = (4 * cubic + lin * lin) % m;
            count += roots[d as usize];
        }
        count
    }

    /// `c₄ = b₂² − 24 b₄`.
    pub fn c4(&self) -> i128 {
        let (a1, a2, a3, a4) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        b2 * b2 - 24 * b4
    }

    /// Reduction type of this model at `ℓ`. A non-minimal model reports
    /// `Additive` at primes where it is not minimal.
    pub fn reduction_type(&self, ell: u64) -> Result<Reduction, QexpError> {
        if !arith::is_prime(ell) {
            return Err(QexpError::NotPrime(ell));
        }
        if ell > POINT_COUNT_BOUND {
            return Err(QexpError::BoundExceeded {
                ell,
                bound: POINT_COUNT_BOUND,
            });
        }
        let l = ell as i128;
        if self.discriminant() % l != 0 {
            return Ok(Reduction::Good);
        }
        if self.c4() % l == 0 {
            return Ok(Reduction::Additive);
        }
        // The nodal cubic has ℓ ∓ 1 smooth points plus the node.
        let n = self.count_projective(ell);
        Ok(if n == ell {
            Reduction::SplitMultiplicative
        } else {
            Reduction::NonsplitMultiplicative
        })
    }

    /// `a_ℓ = ℓ + 1 − #E(F_ℓ)`.
    pub fn ap(&self, ell: u64) -> Result<i64, QexpError> {
        let n = self.count_points(ell)?;
        Ok(ell as i64 + 1 - n as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reduction {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{},{},{},{}]",
            self.a1, self.a2, self.a3, self.a4, self.a6
        )
    }
}

/// Hecke eigenvalues `a_ℓ` at primes, as read from a table file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeTable {
    pub weight: u32,
    pub level: u64,
    pub coefficients: BTreeMap<u64, i128>,
}

impl HeckeTable {
    /// Parses the table format: a `weight k level N` header, then one
    /// `ℓ a_ℓ` record per line. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, QexpError> {
        let mut header: Option<(u32, u64)> = None;
        let mut coefficients = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| QexpError::Parse {
                line: line_no,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            if header.is_none() {
                match fields.as_slice() {
                    ["weight", k, "level", n] => {
                        let k: u32 = k.parse().map_err(|_| err("bad weight"))?;
                        let n: u64 = n.parse().map_err(|_| err("bad level"))?;
                        if k < 2 || n == 0 {
                            return Err(err("weight must be >= 2 and level >= 1"));
                        }
                        header = Some((k, n));
                        continue;
                    }
                    _ => return Err(err("expected header `weight <k> level <N>`")),
                }
            }
            match fields.as_slice() {
                [ell, a] => {
                    let ell: u64 = ell.parse().map_err(|_| err("bad prime"))?;
                    let a: i128 = a.parse().map_err(|_| err("bad coefficient"))?;
                    if !arith::is_prime(ell) {
                        return Err(err("index is not prime"));
                    }
                    if coefficients.insert(ell, a).is_some() {
                        return Err(err("duplicate prime"));
                    }
                }
                _ => return Err(err("expected `<prime> <coefficient>`")),
            }
        }
        let (weight, level) = header.ok_or(QexpError::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        Ok(HeckeTable {
            weight,
            level,
            coefficients,
        })
    }

    pub fn load(path: &Path) -> Result<Self, QexpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QexpError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Nebentypus {
    Trivial,
    /// Values of `ε(ℓ) mod p` for a fixed `p`.
    Residues {
        p: u64,
        values: BTreeMap<u64, u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CoefficientSource {
    Delta,
    EllipticCurve(EllipticCurve),
    Table(HeckeTable),
}

/// A normalized eigenform with rational-integer Fourier coefficients.
#[derive(Debug)]
pub struct ModularFormData {
    weight: u32,
    level: u64,
    nebentypus: Nebentypus,
    source: CoefficientSource,
    precision: usize,
    delta_cache: OnceLock<Result<Vec<i128>, QexpError>>,
}

impl Clone for ModularFormData {
    fn clone(&self) -> Self {
        ModularFormData {
            weight: self.weight,
            level: self.level,
            nebentypus: self.nebentypus.clone(),
            source: self.source.clone(),
            precision: self.precision,
            delta_cache: OnceLock::new(),
        }
    }
}

impl ModularFormData {
    pub fn delta() -> Self {
        Self::delta_with_precision(DEFAULT_PRECISION)
    }

    pub fn delta_with_precision(precision: usize) -> Self {
        ModularFormData {
            weight: 12,
            level: 1,
            nebentypus: Nebentypus::Trivial,
            source: CoefficientSource::Delta,
            precision,
            delta_cache: OnceLock::new(),
        }
    }

    /// Weight 2; the level is recorded as the radical of the model's
    /// discriminant, which is where `frobenius_data` refuses to go.
    pub fn elliptic_curve(curve: EllipticCurve) -> Self {
        let disc = curve.discriminant().unsigned_abs();
        let level = arith::factor(u64::try_from(disc).unwrap_or(u64::MAX))
            .primes()
            .product();
        ModularFormData {
            weight: 2,
            level,
            nebentypus: Nebentypus::Trivial,
            source: CoefficientSource::EllipticCurve(curve),
            precision: DEFAULT_PRECISION,
            delta_cache: OnceLock::new(),
        }
    }

    pub fn table(table: HeckeTable) -> Self {
        ModularFormData {
            weight: table.weight,
            level: table.level,
            nebentypus: Nebentypus::Trivial,
            source: CoefficientSource::Table(table),
            precision: DEFAULT_PRECISION,
            delta_cache: OnceLock::new(),
        }
    }

    pub fn with_nebentypus(mut self, nebentypus: Nebentypus) -> Self {
        self.nebentypus = nebentypus;
        self
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn nebentypus(&self) -> &Nebentypus {
        &self.nebentypus
    }

    pub fn source(&self) -> &CoefficientSource {
        &self.source
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn label(&self) -> String {
        match &self.source {
            CoefficientSource::Delta => "delta".to_string(),
            CoefficientSource::EllipticCurve(e) => format!("ec{e}"),
            CoefficientSource::Table(t) => format!("table(weight={},level={})", t.weight, t.level),
        }
    }

    pub fn divides_level(&self, ell: u64) -> bool {
        match &self.source {
            CoefficientSource::EllipticCurve(e) => !e.has_good_reduction(ell),
            _ => self.level.is_multiple_of(ell),
        }
    }

    fn delta_series(&self) -> Result<&[i128], QexpError> {
        self.delta_cache
            .get_or_init(|| delta_coefficients(self.precision))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    /// `a_ℓ` for a prime `ℓ`.
    pub fn prime_coefficient(&self, ell: u64) -> Result<i128, QexpError> {
        if !arith::is_prime(ell) {
            return Err(QexpError::NotPrime(ell));
        }
        match &self.source {
            CoefficientSource::Delta => self.coefficient(ell),
            CoefficientSource::EllipticCurve(e) => {
                if e.has_good_reduction(ell) {
                    e.ap(ell).map(i128::from)
                } else {
                    Err(QexpError::BadReduction { ell })
                }
            }
            CoefficientSource::Table(t) => t
                .coefficients
                .get(&ell)
                .copied()
                .ok_or(QexpError::MissingCoefficient(ell)),
        }
    }

    /// `a_n` for any `n ≥ 1`. Non-prime indices of curve and table sources
    /// come from the Hecke recursion, which needs a trivial nebentypus.
    pub fn coefficient(&self, n: u64) -> Result<i128, QexpError> {
        if n == 0 {
            return Err(QexpError::MissingCoefficient(0));
        }
        if let CoefficientSource::Delta = self.source {
            let series = self.delta_series()?;
            return series
                .get(n as usize - 1)
                .copied()
                .ok_or(QexpError::PrecisionExceeded {
                    n: n as usize,
                    precision: self.precision,
                });
        }
        if self.nebentypus != Nebentypus::Trivial && !arith::is_prime(n) {
            return Err(QexpError::MissingCoefficient(n));
        }
        let mut acc: i128 = 1;
        for &(ell, e) in arith::factor(n).pairs() {
            let a = self.prime_coefficient(ell)?;
            let bad = self.divides_level(ell);
            let chi = if bad {
                0
            } else {
                arith::checked_pow_i128(ell as i128, self.weight - 1)
                    .map_err(|_| QexpError::Overflow("Hecke recursion"))?
            };
            // a_{ℓ^{r+1}} = a_ℓ a_{ℓ^r} − ℓ^{k−1} a_{ℓ^{r−1}}
            let (mut prev, mut cur) = (1i128, a);
            for _ in 1..e {
                let next = a
                    .checked_mul(cur)
                    .and_then(|x| x.checked_sub(chi.checked_mul(prev)?))
                    .ok_or(QexpError::Overflow("Hecke recursion"))?;
                prev = cur;
                cur = next;
            }
            acc = acc
                .checked_mul(cur)
                .ok_or(QexpError::Overflow("Hecke recursion"))?;
        }
        Ok(acc)
    }

    /// Whether `a_p` is prime to `p`.
    pub fn is_ordinary(&self, p: u64) -> Result<bool, QexpError> {
        Ok(self.prime_coefficient(p)?.rem_euclid(p as i128) != 0)
    }
}

/// Frobenius characteristic polynomial `x² − a x + c` reduced mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrobeniusData {
    pub ell: u64,
    pub p: u64,
    pub a: u64,
    pub c: u64,
}

/// `(a_ℓ mod p, ℓ^{k−1} ε(ℓ) mod p)` at a prime `ℓ ∤ Np`.
pub fn frobenius_data(f: &ModularFormData, ell: u64, p: u64) -> Result<FrobeniusData, QexpError> {
    if ell == p {
        return Err(QexpError::SameAsP(p));
    }
    if !arith::is_prime(ell) {
        return Err(QexpError::NotPrime(ell));
    }
    if f.divides_level(ell) {
        return Err(QexpError::RamifiedLevel { ell });
    }
    let a = f.prime_coefficient(ell)?.rem_euclid(p as i128) as u64;
    let eps = match f.nebentypus() {
        Nebentypus::Trivial => 1,
        Nebentypus::Residues { p: q, values } => {
            if *q != p {
                return Err(QexpError::MissingCoefficient(ell));
            }
            *values.get(&ell).ok_or(QexpError::MissingCoefficient(ell))? % p
        }
    };
    let c = arith::mul_mod(pow_mod(ell, u64::from(f.weight() - 1), p), eps, p);
    Ok(FrobeniusData { ell, p, a, c })
}

/// `ζ_order^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootOfUnity {
    pub order: u64,
    pub power: u64,
}

impl RootOfUnity {
    /// `±1` when the root is rational.
    pub fn as_sign(&self) -> Option<i128> {
        let (o, k) = (self.order, self.power % self.order);
        if k == 0 {
            Some(1)
        } else if 2 * k == o {
            Some(-1)
        } else {
            None
        }
    }
}

/// A Dirichlet character mod `m`, as a character of the unit group.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    units: UnitGroup,
    chi: Character,
}

impl DirichletCharacter {
    pub fn new(modulus: u64, exponents: Vec<u64>) -> Result<Self, crate::chargroup::GroupError> {
        let units = unit_group(modulus);
        let chi = Character::new(units.group(), exponents)?;
        Ok(DirichletCharacter {
            modulus,
            units,
            chi,
        })
    }

    pub fn trivial(modulus: u64) -> Self {
        let units = unit_group(modulus);
        let chi = Character::trivial(units.group());
        DirichletCharacter {
            modulus,
            units,
            chi,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn conj(&self) -> Self {
        DirichletCharacter {
            modulus: self.modulus,
            units: self.units.clone(),
            chi: self.chi.conj(self.units.group()),
        }
    }

    /// `ψ(n)`, or `None` when `gcd(n, m) > 1`.
    pub fn value(&self, n: u64) -> Option<RootOfUnity> {
        if n.gcd(&self.modulus) != 1 {
            return None;
        }
        let coords = self.units.to_coords(n % self.modulus.max(1)).ok()?;
        let order = self.units.group().exponent();
        Some(RootOfUnity {
            order,
            power: self.chi.value_exponent(self.units.group(), &coords),
        })
    }
}

/// `a_n ψ(n)` kept as an integer times a root of unity; `root == None`
/// means the twisted coefficient is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwistedCoefficient {
    pub base: i128,
    pub root: Option<RootOfUnity>,
}

impl TwistedCoefficient {
    pub fn is_zero(&self) -> bool {
        self.root.is_none() || self.base == 0
    }

    pub fn as_integer(&self) -> Option<i128> {
        match self.root {
            None => Some(0),
            Some(r) => r.as_sign().map(|s| s * self.base),
        }
    }

    pub fn twist(&self, psi: &DirichletCharacter, n: u64) -> TwistedCoefficient {
        match (self.root, psi.value(n)) {
            (Some(r), Some(s)) => {
                let order = r.order.lcm(&s.order);
                let power = (r.power * (order / r.order) + s.power * (order / s.order)) % order;
                TwistedCoefficient {
                    base: self.base,
                    root: Some(RootOfUnity { order, power }),
                }
            }
            _ => TwistedCoefficient {
                base: self.base,
                root: None,
            },
        }
    }
}

/// The `n`-th coefficient of `f_ψ = Σ a_n ψ(n) qⁿ`.
pub fn twist_coefficients(
    f: &ModularFormData,
    psi: &DirichletCharacter,
    n: u64,
) -> Result<TwistedCoefficient, QexpError> {
    let base = f.coefficient(n)?;
    let plain = TwistedCoefficient {
        base,
        root: Some(RootOfUnity { order: 1, power: 0 }),
    };
    Ok(plain.twist(psi, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_examples() {
        assert_eq!(tau(1, 2000), Ok(1));
        assert_eq!(tau(2, 2000), Ok(-24));
        assert_eq!(tau(23, 2000), Ok(18643272));
        assert_eq!(tau(1123, 1200).map(|t| t.rem_euclid(11)), Ok(2));
        assert_eq!(
            tau(1201, 1200),
            Err(QexpError::PrecisionExceeded {
                n: 1201,
                precision: 1200
            })
        );
        assert_eq!(
            tau(0, 10),
            Err(QexpError::PrecisionExceeded {
                n: 0,
                precision: 10
            })
        );
    }

    #[test]
    fn pentagonal_series_start() {
        let p = PowerSeries::pentagonal(12);
        assert_eq!(p.coeffs(), &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn cached_delta_matches_direct() {
        let f = ModularFormData::delta_with_precision(200);
        for n in [1u64, 2, 3, 23, 100, 199, 200] {
            assert_eq!(f.coefficient(n).unwrap(), tau(n as usize, 200).unwrap());
        }
        assert!(matches!(
            f.coefficient(201),
            Err(QexpError::PrecisionExceeded { .. })
        ));
    }

    #[test]
    fn x0_11_small_primes() {
        let e = EllipticCurve::x0_11();
        assert_eq!(e.discriminant(), -161051);
        let mut affine = 0;
        for x in 0..2i64 {
            for y in 0..2i64 {
                if (y * y + y - (x * x * x - x * x - 10 * x - 20)).rem_euclid(2) == 0 {
                    affine += 1;
                }
            }
        }
        assert_eq!(e.ap(2), Ok(2 + 1 - (affine + 1)));
        for (ell, a) in [
            (2, -2),
            (3, -1),
            (5, 1),
            (7, -2),
            (13, 4),
            (17, -2),
            (19, 0),
            (23, -1),
        ] {
            assert_eq!(e.ap(ell), Ok(a), "a_{ell}");
        }
        assert_eq!(e.ap(11), Err(QexpError::BadReduction { ell: 11 }));
        assert_eq!(
            e.ap(100_003),
            Err(QexpError::BoundExceeded {
                ell: 100_003,
                bound: POINT_COUNT_BOUND
            })
        );
    }

    #[test]
    fn reduction_types() {
        let e = EllipticCurve::x0_11();
        assert_eq!(e.reduction_type(11), Ok(Reduction::SplitMultiplicative));
        assert_eq!(e.reduction_type(13), Ok(Reduction::Good));
        // 37a: a₃₇ = −1
        let nonsplit = EllipticCurve::new(0, 0, 1, -1, 0);
        assert_eq!(nonsplit.discriminant(), 37);
        assert_eq!(
            nonsplit.reduction_type(37),
            Ok(Reduction::NonsplitMultiplicative)
        );
        let cusp = EllipticCurve::new(0, 0, 0, 0, 1); // Δ = −432, c₄ = 0
        assert_eq!(cusp.reduction_type(3), Ok(Reduction::Additive));
    }

    #[test]
    fn ec_x0_11_at_23_matches_point_of_order_11_criterion() {
        let e = EllipticCurve::x0_11();
        let a = e.ap(23).unwrap();
        let n = e.count_points(23).unwrap();
        assert_eq!(a.rem_euclid(11) == 2, n.is_multiple_of(11));
    }

    #[test]
    fn frobenius_examples() {
        let d = ModularFormData::delta();
        assert_eq!(frobenius_data(&d, 23, 11).map(|f| (f.a, f.c)), Ok((10, 1)));
        assert_eq!(frobenius_data(&d, 1123, 11).map(|f| (f.a, f.c)), Ok((2, 1)));
        assert_eq!(frobenius_data(&d, 11, 11), Err(QexpError::SameAsP(11)));
        let e = ModularFormData::elliptic_curve(EllipticCurve::x0_11());
        assert_eq!(e.level(), 11);
        assert_eq!(
            frobenius_data(&e, 11, 3),
            Err(QexpError::RamifiedLevel { ell: 11 })
        );
        // a_19 = 0 for X₀(11)
        assert_eq!(frobenius_data(&e, 19, 5).map(|f| (f.a, f.c)), Ok((0, 4)));
    }

    #[test]
    fn table_parsing_and_recursion() {
        let text = "# X0(11)\nweight 2 level 11\n2 -2\n3 -1\n5 1 # comment\n11 1\n";
        let t = HeckeTable::parse(text).unwrap();
        assert_eq!(t.coefficients.len(), 4);
        let f = ModularFormData::table(t);
        assert_eq!(f.coefficient(4), Ok(2)); // a_4 = a_2² − 2
        assert_eq!(f.coefficient(6), Ok(2));
        assert_eq!(f.coefficient(121), Ok(1));
        assert_eq!(f.coefficient(7), Err(QexpError::MissingCoefficient(7)));

        assert!(matches!(
            HeckeTable::parse("2 -2\n"),
            Err(QexpError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            HeckeTable::parse("weight 2 level 11\n4 2\n"),
            Err(QexpError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            HeckeTable::parse("weight 2 level 11\n2 1\n2 1\n"),
            Err(QexpError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn twist_examples() {
        let d = ModularFormData::delta();
        let triv = DirichletCharacter::trivial(3);
        assert_eq!(
            twist_coefficients(&d, &triv, 2).unwrap().as_integer(),
            Some(-24)
        );
        let quad = DirichletCharacter::new(3, vec![1]).unwrap();
        assert_eq!(
            twist_coefficients(&d, &quad, 2).unwrap().as_integer(),
            Some(24)
        );
        assert_eq!(
            twist_coefficients(&d, &quad, 3).unwrap().as_integer(),
            Some(0)
        );
        assert!(twist_coefficients(&d, &quad, 6).unwrap().is_zero());
    }

    #[test]
    fn twist_then_conjugate_restores() {
        let d = ModularFormData::delta_with_precision(60);
        let psi = DirichletCharacter::new(7, vec![1]).unwrap();
        for n in 1..=60u64 {
            let t = twist_coefficients(&d, &psi, n)
                .unwrap()
                .twist(&psi.conj(), n);
            if n % 7 != 0 {
                assert_eq!(t.as_integer(), Some(d.coefficient(n).unwrap()));
            } else {
                assert!(t.is_zero());
            }
        }
    }
}
