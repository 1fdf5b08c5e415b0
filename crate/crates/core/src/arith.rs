//! Exact integer and residue arithmetic.
//!
//! Everything here works on `u64` moduli with `u128` intermediates, or on
//! `i128` values with checked operations. Nothing wraps silently.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::chargroup::FiniteAbelianGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("p-adic valuation of zero is undefined")]
    ZeroInput,
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

/// A residue class `value mod modulus`, always kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i128, modulus: u64) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Err(ArithError::ZeroModulus);
        }
        let value = value.rem_euclid(modulus as i128) as u64;
        Ok(Residue { value, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }

    pub fn mul(&self, other: &Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, exp: u64) -> Residue {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.0.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    pub fn product(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Trial-division factorization. `n <= 1` yields the empty product.
pub fn factor(mut n: u64) -> Factorization {
    let mut out = Vec::new();
    if n <= 1 {
        return Factorization(out);
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Factorization(out)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n).pairs() == [(n, 1)]
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let eg = (a as i128 % m as i128).extended_gcd(&(m as i128));
    (eg.gcd == 1).then(|| eg.x.rem_euclid(m as i128) as u64)
}

/// Chinese remaindering for pairwise coprime moduli. Returns `(x, M)`.
pub fn crt(pairs: &[(u64, u64)]) -> (u64, u64) {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, n) in pairs {
        if n == 1 {
            continue;
        }
        let inv = inv_mod(m % n, n).expect("crt moduli must be coprime");
        let diff = (r % n + n - x % n) % n;
        let t = mul_mod(diff, inv, n);
        let new_m = m * n;
        x = ((x as u128 + m as u128 * t as u128) % new_m as u128) as u64;
        m = new_m;
    }
    (x, m)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .pairs()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Least `k ≥ 1` with `a^k ≡ 1`.
pub fn mult_order(a: Residue) -> Result<u64, ArithError> {
    if !a.is_unit() {
        return Err(ArithError::NotAUnit {
            value: a.value,
            modulus: a.modulus,
        });
    }
    if a.modulus == 1 {
        return Ok(1);
    }
    let mut order = euler_phi(a.modulus);
    for (q, _) in factor(order).pairs().to_vec() {
        while order.is_multiple_of(q) && pow_mod(a.value, order / q, a.modulus) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// Largest `t` with `p^t | n`.
pub fn padic_val(n: i128, p: u64) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroInput);
    }
    if p < 2 {
        return Err(ArithError::NotPrime(p));
    }
    let p = p as i128;
    let mut n = n;
    let mut t = 0;
    while n % p == 0 {
        n /= p;
        t += 1;
    }
    Ok(t)
}

/// `p`-adic valuation of `a^k - 1` computed with residues modulo `p^bound`,
/// capped at `bound`.
pub fn padic_val_pow_minus_one(a: u64, k: u64, p: u64, bound: u32) -> u32 {
    let mut m = 1u64;
    for _ in 0..bound {
        m = m.checked_mul(p).expect("valuation bound too large for u64");
    }
    let mut r = (pow_mod(a, k, m) + m - 1) % m;
    if r == 0 {
        return bound;
    }
    let mut t = 0;
    while r.is_multiple_of(p) {
        r /= p;
        t += 1;
    }
    t
}

pub fn checked_pow_i128(base: i128, exp: u32) -> Result<i128, ArithError> {
    let mut acc: i128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(ArithError::Overflow("power"))?;
    }
    Ok(acc)
}

fn primitive_root_mod_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factor(p - 1).primes().collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Discrete logarithm of `x` to base `g`, where `g` has order `n` modulo `m`.
/// Pohlig–Hellman over the factorization of `n`.
fn discrete_log(x: u64, g: u64, n: u64, m: u64) -> Option<u64> {
    let mut pairs = Vec::new();
    for &(r, a) in factor(n).pairs() {
        let ra = r.pow(a);
        let gr = pow_mod(g, n / ra, m);
        let xr = pow_mod(x, n / ra, m);
        let gamma = pow_mod(gr, ra / r, m);
        let gr_inv = inv_mod(gr, m)?;
        let mut t = 0u64;
        let mut rpow = 1u64;
        for i in 0..a {
            let shifted = mul_mod(xr, pow_mod(gr_inv, t, m), m);
            let h = pow_mod(shifted, r.pow(a - 1 - i), m);
            let mut cur = 1u64;
            let mut digit = None;
            for d in 0..r {
                if cur == h {
                    digit = Some(d);
                    break;
                }
                cur = mul_mod(cur, gamma, m);
            }
            t += digit? * rpow;
            rpow *= r;
        }
        pairs.push((t, ra));
    }
    Some(crt(&pairs).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ComponentKind {
    /// Cyclic unit group of an odd prime power, or of 4.
    Cyclic,
    /// The `±1` factor of `(Z/2^k)^×` for `k ≥ 3`.
    TwoSign,
    /// The `5^j` factor of `(Z/2^k)^×` for `k ≥ 3`.
    TwoFive,
}

#[derive(Debug, Clone)]
struct Component {
    prime: u64,
    prime_power: u64,
    generator: u64,
    order: u64,
    kind: ComponentKind,
}

impl Component {
    fn log(&self, x: u64) -> Option<u64> {
        let q = self.prime_power;
        let x = x % q;
        match self.kind {
            ComponentKind::Cyclic => discrete_log(x, self.generator, self.order, q),
            ComponentKind::TwoSign => Some(u64::from(x % 4 == 3)),
            ComponentKind::TwoFive => {
                let y = if x % 4 == 3 { q - x } else { x };
                discrete_log(y, 5, self.order, q)
            }
        }
    }
}

#[derive(Debug, Clone)]
struct PrimaryPart {
    component: usize,
    prime_power: u64,
    slot: usize,
    generator: u64,
}

/// The unit group of `Z/N`, in invariant-factor form, with explicit maps
/// between residues and coordinate vectors.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    group: FiniteAbelianGroup,
    generators: Vec<u64>,
    components: Vec<Component>,
    primary: Vec<PrimaryPart>,
}

pub fn unit_group(modulus: u64) -> UnitGroup {
    assert!(modulus >= 1, "unit_group modulus must be positive");
    let n = modulus;
    let embed = |q: u64, v: u64| crt(&[(v, q), (1, n / q)]).0;

    let mut components = Vec::new();
    for &(p, e) in factor(n).pairs() {
        let q = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => components.push(Component {
                    prime: 2,
                    prime_power: 4,
                    generator: 3,
                    order: 2,
                    kind: ComponentKind::Cyclic,
                }),
                _ => {
                    components.push(Component {
                        prime: 2,
                        prime_power: q,
                        generator: q - 1,
                        order: 2,
                        kind: ComponentKind::TwoSign,
                    });
                    components.push(Component {
                        prime: 2,
                        prime_power: q,
                        generator: 5,
                        order: q / 4,
                        kind: ComponentKind::TwoFive,
                    });
                }
            }
            continue;
        }
        let mut g = primitive_root_mod_prime(p);
        if e > 1 && pow_mod(g, p - 1, p * p) == 1 {
            g += p;
        }
        components.push(Component {
            prime: p,
            prime_power: q,
            generator: g,
            order: (p - 1) * p.pow(e - 1),
            kind: ComponentKind::Cyclic,
        });
    }

    // Split every cyclic component into primary parts, then deal each
    // prime's parts into slots from the largest invariant factor down.
    let mut by_prime: std::collections::BTreeMap<u64, Vec<(u32, usize)>> = Default::default();
    for (ci, c) in components.iter().enumerate() {
        for &(r, a) in factor(c.order).pairs() {
            by_prime.entry(r).or_default().push((a, ci));
        }
    }
    let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    let mut primary = Vec::new();
    for (&r, parts) in by_prime.iter_mut() {
        parts.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        for (i, &(a, ci)) in parts.iter().enumerate() {
            let slot = rank - 1 - i;
            let ra = r.pow(a);
            factors[slot] *= ra;
            let c = &components[ci];
            let cof = c.order / ra;
            let u = inv_mod(cof % ra, ra).expect("cofactor is prime to r");
            let local = pow_mod(c.generator, cof * u, c.prime_power);
            primary.push(PrimaryPart {
                component: ci,
                prime_power: ra,
                slot,
                generator: embed(c.prime_power, local),
            });
        }
    }
    let mut generators = vec![1u64; rank];
    for part in &primary {
        generators[part.slot] = mul_mod(generators[part.slot], part.generator, n);
    }
    let group =
        FiniteAbelianGroup::new(factors).expect("invariant factors form a divisibility chain");
    UnitGroup {
        modulus,
        group,
        generators,
        components,
        primary,
    }
}

impl UnitGroup {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    /// Residues generating each invariant-factor slot.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn to_coords(&self, residue: u64) -> Result<Vec<u64>, ArithError> {
        let x = residue % self.modulus.max(1);
        if self.modulus > 1 && x.gcd(&self.modulus) != 1 {
            return Err(ArithError::NotAUnit {
                value: residue,
                modulus: self.modulus,
            });
        }
        let logs: Vec<u64> = self
            .components
            .iter()
            .map(|c| c.log(x).expect("unit has a discrete log"))
            .collect();
        let mut per_slot: Vec<Vec<(u64, u64)>> = vec![Vec::new(); self.group.rank()];
        for part in &self.primary {
            per_slot[part.slot].push((logs[part.component] % part.prime_power, part.prime_power));
        }
        Ok(per_slot.iter().map(|pairs| crt(pairs).0).collect())
    }

    pub fn from_coords(&self, coords: &[u64]) -> u64 {
        assert_eq!(
            coords.len(),
            self.group.rank(),
            "coordinate length mismatch"
        );
        let mut x = 1 % self.modulus;
        for part in &self.primary {
            let c = coords[part.slot] % part.prime_power;
            x = mul_mod(x, pow_mod(part.generator, c, self.modulus), self.modulus);
        }
        x
    }

    /// The residue `≡ value (mod q)` and `≡ 1` modulo the complementary
    /// prime-power part of the modulus. `q` must be an exact prime-power
    /// divisor of the modulus.
    pub fn embed(&self, q: u64, value: u64) -> u64 {
        crt(&[(value % q, q), (1, self.modulus / q)]).0
    }

    /// Generators of the subgroup of units `≡ 1` away from `ℓ`, i.e. the
    /// `ℓ`-component of the unit group.
    pub fn local_generators(&self, ell: u64) -> Vec<u64> {
        self.components
            .iter()
            .filter(|c| c.prime == ell)
            .map(|c| self.embed(c.prime_power, c.generator))
            .collect()
    }

    /// Generators of `{x : x ≡ 1 mod ℓ^j}` inside the `ℓ`-component, for
    /// `ℓ^j` dividing the `ℓ`-part of the modulus.
    pub fn congruence_generators(&self, ell: u64, j: u32) -> Vec<u64> {
        let k = factor(self.modulus).exponent_of(ell);
        if k == 0 || j >= k {
            return Vec::new();
        }
        if j == 0 || (ell == 2 && j == 1) {
            return self.local_generators(ell);
        }
        let q = ell.pow(k);
        vec![self.embed(q, 1 + ell.pow(j))]
    }
}
