//! Abelian fields presented as fixed fields `Q(ζ_N)^H`, decomposition data
//! of rational primes in them, and place counts in cyclotomic towers.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, crt, factor, unit_group, UnitGroup};
use crate::chargroup::span_order;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplittingError {
    #[error("conductor must be at least 1")]
    ZeroConductor,
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("the auxiliary prime must differ from p = {0}")]
    SameAsP(u64),
    #[error("the base field is not contained in the extension field")]
    NotASubfield,
    #[error("degree {degree} is not a power of {p}")]
    NotPPower { degree: u64, p: u64 },
    #[error("no subfield of degree {degree} in Q(zeta_{conductor})")]
    NoSuchSubfield { conductor: u64, degree: u64 },
    #[error("Q(zeta_{conductor}) has more than one subfield of degree {degree}; give generators instead")]
    AmbiguousDegree { conductor: u64, degree: u64 },
    #[error("modulus overflow while building tower layer {layer}")]
    Overflow { layer: u32 },
    #[error("bad field spec `{spec}`: {msg}")]
    Parse { spec: String, msg: String },
}

/// The fixed field of `H ⊆ (Z/N)^×` inside `Q(ζ_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianField {
    conductor: u64,
    gens: Vec<u64>,
    degree: u64,
}

impl AbelianField {
    pub fn new(conductor: u64, gens: Vec<u64>) -> Result<Self, SplittingError> {
        if conductor == 0 {
            return Err(SplittingError::ZeroConductor);
        }
        let mut reduced = Vec::with_capacity(gens.len());
        for g in gens {
            let r = g % conductor;
            if conductor > 1 && r.gcd(&conductor) != 1 {
                return Err(SplittingError::NotAUnit {
                    value: g,
                    modulus: conductor,
                });
            }
            reduced.push(r);
        }
        let ug = unit_group(conductor);
        let h = span_order(ug.group().factors(), &coords(&ug, &reduced));
        Ok(AbelianField {
            conductor,
            gens: reduced,
            degree: ug.order() / h,
        })
    }

    pub fn rational() -> Self {
        AbelianField {
            conductor: 1,
            gens: Vec::new(),
            degree: 1,
        }
    }

    pub fn cyclotomic(n: u64) -> Result<Self, SplittingError> {
        Self::new(n, Vec::new())
    }

    /// `Q(ζ_N)⁺`, fixed by complex conjugation.
    pub fn real_cyclotomic(n: u64) -> Result<Self, SplittingError> {
        Self::new(n, vec![n.saturating_sub(1).max(1) % n.max(1)])
    }

    /// The unique subfield of degree `d` in `Q(ζ_N)`, when there is one.
    pub fn with_degree(n: u64, d: u64) -> Result<Self, SplittingError> {
        if n == 0 {
            return Err(SplittingError::ZeroConductor);
        }
        let ug = unit_group(n);
        let order = ug.order();
        if d == 0 || !order.is_multiple_of(d) {
            return Err(SplittingError::NoSuchSubfield {
                conductor: n,
                degree: d,
            });
        }
        let factors = ug.group().factors().to_vec();
        let mut h_coords: Vec<Vec<u64>> = Vec::new();
        for &(q, _) in factor(order).pairs() {
            let a = factor(d).exponent_of(q);
            let sylow: u64 = factors
                .iter()
                .map(|&di| q.pow(factor(di).exponent_of(q)))
                .product();
            let slots: Vec<usize> = (0..factors.len())
                .filter(|&i| factors[i].is_multiple_of(q))
                .collect();
            let whole = q.pow(a) == sylow;
            if a > 0 && !whole && slots.len() > 1 {
                return Err(SplittingError::AmbiguousDegree {
                    conductor: n,
                    degree: d,
                });
            }
            for &i in &slots {
                let qe = q.pow(factor(factors[i]).exponent_of(q));
                let mult = if a == 0 {
                    factors[i] / qe
                } else if whole {
                    continue;
                } else {
                    factors[i] / qe * q.pow(a)
                };
                let mut v = vec![0u64; factors.len()];
                v[i] = mult % factors[i];
                h_coords.push(v);
            }
        }
        let gens = h_coords.iter().map(|c| ug.from_coords(c)).collect();
        let field = Self::new(n, gens)?;
        debug_assert_eq!(field.degree, d);
        Ok(field)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    /// Residues mod `m` generating the preimage of `H` under
    /// `(Z/m)^× → (Z/N)^×`. Requires `N | m`.
    fn preimage_gens(&self, ug: &UnitGroup) -> Vec<u64> {
        let m = ug.modulus();
        let n = self.conductor;
        debug_assert_eq!(m % n, 0);
        let mf = factor(m);
        let nf = factor(n);
        let mut out = Vec::new();
        for &h in &self.gens {
            let parts: Vec<(u64, u64)> = mf
                .pairs()
                .iter()
                .map(|&(q, e)| {
                    let qe = q.pow(e);
                    if nf.exponent_of(q) > 0 {
                        (h % qe, qe)
                    } else {
                        (1 % qe, qe)
                    }
                })
                .collect();
            out.push(crt(&parts).0 % m.max(1));
        }
        for &(q, _) in mf.pairs() {
            out.extend(ug.congruence_generators(q, nf.exponent_of(q)));
        }
        out
    }

    /// Whether `self ⊆ other` as subfields of a common cyclotomic field.
    pub fn is_subfield_of(&self, other: &AbelianField) -> bool {
        let m = self.conductor.lcm(&other.conductor);
        let ug = unit_group(m);
        let mine = coords(&ug, &self.preimage_gens(&ug));
        let theirs = coords(&ug, &other.preimage_gens(&ug));
        let moduli = ug.group().factors();
        let base = span_order(moduli, &mine);
        theirs.iter().all(|t| {
            let mut ext = mine.clone();
            ext.push(t.clone());
            span_order(moduli, &ext) == base
        })
    }
}

impl fmt::Display for AbelianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "Q");
        }
        let gens: Vec<String> = self.gens.iter().map(u64::to_string).collect();
        write!(f, "cyclotomic:{}:gens={}", self.conductor, gens.join(","))
    }
}

impl FromStr for AbelianField {
    type Err = SplittingError;

    /// `Q` | `cyclotomic:<N>:degree=<d>` | `cyclotomic:<N>:gens=<g1,g2,...>`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| SplittingError::Parse {
            spec: s.to_string(),
            msg: msg.to_string(),
        };
        let t = s.trim();
        if t == "Q" {
            return Ok(Self::rational());
        }
        let mut parts = t.splitn(3, ':');
        if parts.next() != Some("cyclotomic") {
            return Err(bad("expected `Q` or `cyclotomic:<N>:...`"));
        }
        let n: u64 = parts
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad("conductor must be a positive integer"))?;
        if n == 0 {
            return Err(bad("conductor must be a positive integer"));
        }
        match parts.next() {
            None => Self::cyclotomic(n),
            Some(rest) => {
                if let Some(d) = rest.strip_prefix("degree=") {
                    let d: u64 = d
                        .parse()
                        .map_err(|_| bad("degree must be a positive integer"))?;
                    Self::with_degree(n, d)
                } else if let Some(g) = rest.strip_prefix("gens=") {
                    let gens = if g.is_empty() {
                        Vec::new()
                    } else {
                        g.split(',')
                            .map(|x| {
                                x.trim()
                                    .parse::<i64>()
                                    .map(|v| v.rem_euclid(n as i64) as u64)
                            })
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| bad("generators must be integers"))?
                    };
                    Self::new(n, gens)
                } else {
                    Err(bad("expected `degree=<d>` or `gens=<list>`"))
                }
            }
        }
    }
}

fn coords(ug: &UnitGroup, residues: &[u64]) -> Vec<Vec<u64>> {
    residues
        .iter()
        .map(|&r| ug.to_coords(r).expect("generators are units"))
        .collect()
}

/// Ramification index, residue degree and number of places above `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaceData {
    pub ell: u64,
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

/// Residue mod `m` acting as Frobenius at `ℓ`: `≡ ℓ` away from `ℓ` and
/// `≡ 1` on the `ℓ`-part.
fn frobenius_residue(m: u64, ell: u64) -> u64 {
    let v = factor(m).exponent_of(ell);
    let le = ell.pow(v);
    crt(&[(ell % (m / le), m / le), (1 % le, le)]).0
}

struct Layer {
    ug: UnitGroup,
    a: Vec<Vec<u64>>,
    b: Vec<Vec<u64>>,
}

impl Layer {
    fn moduli(&self) -> &[u64] {
        self.ug.group().factors()
    }

    fn degree(&self) -> u64 {
        let m = self.moduli();
        let (ga, gb) = (
            span_order(m, &self.a) as u128,
            span_order(m, &self.b) as u128,
        );
        let mut ab = self.a.clone();
        ab.extend(self.b.iter().cloned());
        let gab = span_order(m, &ab) as u128;
        (self.ug.order() as u128 * gab / (ga * gb)) as u64
    }

    /// Order of the image of `⟨gens⟩` in `G/(A ∩ B)`, computed through the
    /// diagonal embedding into `G/A × G/B`.
    fn image_order(&self, gens: &[Vec<u64>]) -> u64 {
        let m = self.moduli();
        let r = m.len();
        let doubled: Vec<u64> = m.iter().chain(m).copied().collect();
        let zero = vec![0u64; r];
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for a in &self.a {
            rows.push(a.iter().chain(&zero).copied().collect());
        }
        for b in &self.b {
            rows.push(zero.iter().chain(b).copied().collect());
        }
        let base = span_order(&doubled, &rows);
        for g in gens {
            rows.push(g.iter().chain(g).copied().collect());
        }
        span_order(&doubled, &rows) / base
    }

    fn decomposition(&self, ell: u64) -> (Vec<Vec<u64>>, Vec<Vec<u64>>) {
        let inertia = coords(&self.ug, &self.ug.local_generators(ell));
        let mut dec = inertia.clone();
        dec.push(
            self.ug
                .to_coords(frobenius_residue(self.ug.modulus(), ell))
                .expect("unit"),
        );
        (inertia, dec)
    }
}

/// Layer `F·Q_m` of the cyclotomic `Z_p`-extension, presented at modulus
/// `lcm(N, p^{m+1})` as the intersection of the preimage of `H` with the
/// preimage of `μ_{p−1}`.
fn tower_layer(field: &AbelianField, p: u64, m: u32) -> Result<Layer, SplittingError> {
    let pm = p
        .checked_pow(m + 1)
        .ok_or(SplittingError::Overflow { layer: m })?;
    let modulus = (field.conductor / field.conductor.gcd(&pm))
        .checked_mul(pm)
        .ok_or(SplittingError::Overflow { layer: m })?;
    let ug = unit_group(modulus);
    let a = coords(&ug, &field.preimage_gens(&ug));
    let mu_field = AbelianField::new(pm, vec![mu_generator(p, m + 1)])?;
    let b = coords(&ug, &mu_field.preimage_gens(&ug));
    Ok(Layer { ug, a, b })
}

/// A generator of `μ_{p−1} ⊂ (Z/p^k)^×`.
fn mu_generator(p: u64, k: u32) -> u64 {
    let pk = p.pow(k);
    let g = unit_group(pk).generators().first().copied().unwrap_or(1);
    arith::pow_mod(g, p.pow(k - 1), pk)
}

pub fn efg(field: &AbelianField, ell: u64) -> Result<PlaceData, SplittingError> {
    if !arith::is_prime(ell) {
        return Err(SplittingError::NotPrime(ell));
    }
    let ug = unit_group(field.conductor);
    let m = ug.group().factors();
    let h = coords(&ug, &field.gens);
    let inertia = coords(&ug, &ug.local_generators(ell));
    let frob = ug
        .to_coords(frobenius_residue(field.conductor, ell))
        .expect("unit");
    let oh = span_order(m, &h);
    let mut hi = h.clone();
    hi.extend(inertia);
    let ohi = span_order(m, &hi);
    hi.push(frob);
    let ohif = span_order(m, &hi);
    Ok(PlaceData {
        ell,
        e: ohi / oh,
        f: ohif / ohi,
        g: ug.order() / ohif,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LayerPlaces {
    /// Exponent `m` of the presentation modulus `lcm(N, p^{m+1})`.
    pub m: u32,
    pub degree: u64,
    pub e: u64,
    pub g: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerPlaceData {
    pub ell: u64,
    pub p: u64,
    pub g_infinity: u64,
    /// Ramification index of `ℓ` in `F∞`, the same as in `F`.
    pub e: u64,
    pub ramified: bool,
    pub layers: Vec<LayerPlaces>,
}

pub fn layer_places(
    field: &AbelianField,
    ell: u64,
    p: u64,
    m: u32,
) -> Result<LayerPlaces, SplittingError> {
    let layer = tower_layer(field, p, m)?;
    let degree = layer.degree();
    let (inertia, dec) = layer.decomposition(ell);
    let e = layer.image_order(&inertia);
    let d = layer.image_order(&dec);
    Ok(LayerPlaces {
        m,
        degree,
        e,
        g: degree / d,
    })
}

fn check_tower_primes(ell: u64, p: u64) -> Result<(), SplittingError> {
    if p == 2 {
        return Err(SplittingError::EvenPrime);
    }
    for q in [ell, p] {
        if !arith::is_prime(q) {
            return Err(SplittingError::NotPrime(q));
        }
    }
    if ell == p {
        return Err(SplittingError::SameAsP(p));
    }
    Ok(())
}

/// Number of places of `F∞` above `ℓ`. Layers are walked until one that
/// grows the degree by `p` leaves the place count unchanged; layers below
/// `F ∩ Q∞` do not grow the degree and are skipped by that test.
pub fn tower_places(
    field: &AbelianField,
    ell: u64,
    p: u64,
) -> Result<TowerPlaceData, SplittingError> {
    check_tower_primes(ell, p)?;
    let mut layers = vec![layer_places(field, ell, p, 0)?];
    loop {
        let m = layers.len() as u32;
        let next = layer_places(field, ell, p, m)?;
        let prev = *layers.last().expect("nonempty");
        layers.push(next);
        if next.degree == prev.degree * p && next.g == prev.g {
            break;
        }
    }
    let last = *layers.last().expect("nonempty");
    Ok(TowerPlaceData {
        ell,
        p,
        g_infinity: last.g,
        e: last.e,
        ramified: last.e > 1,
        layers,
    })
}

/// The maximal subfield of `F∞` unramified at `p`: with `N = N₀ p^k`, the
/// group `{a mod N₀ : (a, 1) ∈ H·μ_{p−1}}` inside `(Z/N₀)^×`.
pub fn unramified_at_p_reduction(
    field: &AbelianField,
    p: u64,
) -> Result<AbelianField, SplittingError> {
    if p == 2 {
        return Err(SplittingError::EvenPrime);
    }
    if !arith::is_prime(p) {
        return Err(SplittingError::NotPrime(p));
    }
    let n = field.conductor;
    let k = factor(n).exponent_of(p);
    if k == 0 {
        return Ok(field.clone());
    }
    let pk = p.pow(k);
    let n0 = n / pk;
    let ug_n = unit_group(n);
    let mut gens = field.gens.clone();
    gens.push(ug_n.embed(pk, mu_generator(p, k)));

    // Homomorphism to U₁ ≅ Z/p^{k−1}: x ↦ log((x mod p^k)^{p−1}).
    let ug_p = unit_group(pk);
    let u1 = p.pow(k - 1);
    let image = |x: u64| -> u64 {
        let c = ug_p
            .to_coords(arith::pow_mod(x % pk, p - 1, pk))
            .expect("unit");
        c.first().copied().unwrap_or(0) / (p - 1) % u1
    };
    let t: Vec<u64> = gens.iter().map(|&x| image(x)).collect();
    let val = |x: u64| {
        if x == 0 {
            k
        } else {
            factor(x).exponent_of(p).min(k - 1)
        }
    };
    let (i0, _) = t
        .iter()
        .enumerate()
        .min_by_key(|(_, &x)| val(x))
        .expect("nonempty");
    let t0 = t[i0];
    let mut kernel = Vec::new();
    let mod_n0 = |x: u64| x % n0.max(1);
    if t0 == 0 {
        kernel.extend(gens.iter().map(|&g| mod_n0(g)));
    } else {
        let v0 = factor(t0).exponent_of(p);
        let unit0 = t0 / p.pow(v0);
        let modulus = u1 / p.pow(v0);
        let inv0 = arith::inv_mod(unit0 % modulus.max(1), modulus.max(1)).unwrap_or(0);
        for (i, &g) in gens.iter().enumerate() {
            if i == i0 {
                continue;
            }
            let c = (t[i] / p.pow(v0)) % modulus.max(1);
            let c = arith::mul_mod(c, inv0, modulus.max(1));
            let back = arith::pow_mod(arith::inv_mod(gens[i0], n).expect("unit"), c, n);
            kernel.push(mod_n0(arith::mul_mod(g, back, n)));
        }
        kernel.push(mod_n0(arith::pow_mod(gens[i0], modulus, n)));
    }
    if n0 == 1 {
        return Ok(AbelianField::rational());
    }
    AbelianField::new(n0, kernel)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamifiedPrime {
    pub ell: u64,
    /// `[F′∞,w′ : F∞,w]`, the same at every place above `ℓ`.
    pub local_degree: u64,
    /// Number of places of `F′∞` above `ℓ`.
    pub places: u64,
    pub tower: TowerPlaceData,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamificationReport {
    pub p: u64,
    pub base: AbelianField,
    pub extension: AbelianField,
    pub base_reduced: AbelianField,
    pub extension_reduced: AbelianField,
    /// `[F′^ur : F^ur]`.
    pub degree: u64,
    /// `[F′∞ : F∞]` for the fields as given.
    pub tower_degree: u64,
    pub unramified_at_p: bool,
    pub linearly_disjoint: bool,
    pub primes: Vec<RamifiedPrime>,
}

fn is_p_power(mut d: u64, p: u64) -> bool {
    while d.is_multiple_of(p) {
        d /= p;
    }
    d == 1
}

/// `[F′∞ : F∞]`, read off a layer above both `p`-parts of the conductors.
pub fn tower_degree(
    base: &AbelianField,
    ext: &AbelianField,
    p: u64,
) -> Result<u64, SplittingError> {
    let m = factor(base.conductor)
        .exponent_of(p)
        .max(factor(ext.conductor).exponent_of(p));
    let lb = tower_layer(base, p, m)?.degree();
    let le = tower_layer(ext, p, m)?.degree();
    Ok(le / lb)
}

pub fn ramified_set(
    base: &AbelianField,
    ext: &AbelianField,
    p: u64,
) -> Result<RamificationReport, SplittingError> {
    if p == 2 {
        return Err(SplittingError::EvenPrime);
    }
    if !arith::is_prime(p) {
        return Err(SplittingError::NotPrime(p));
    }
    if !base.is_subfield_of(ext) {
        return Err(SplittingError::NotASubfield);
    }
    let base_reduced = unramified_at_p_reduction(base, p)?;
    let extension_reduced = unramified_at_p_reduction(ext, p)?;
    let degree = extension_reduced.degree / base_reduced.degree;
    if !is_p_power(degree, p) {
        return Err(SplittingError::NotPPower { degree, p });
    }
    let tower_degree = tower_degree(base, ext, p)?;
    let unramified_at_p = efg(ext, p)?.e == efg(base, p)?.e;
    let mut primes = Vec::new();
    for q in factor(ext.conductor).primes().filter(|&q| q != p) {
        let e_ext = efg(ext, q)?.e;
        let e_base = efg(base, q)?.e;
        if e_ext == e_base {
            continue;
        }
        let local_degree = e_ext / e_base;
        if !is_p_power(local_degree, p) {
            return Err(SplittingError::NotPPower {
                degree: local_degree,
                p,
            });
        }
        let tower = tower_places(ext, q, p)?;
        primes.push(RamifiedPrime {
            ell: q,
            local_degree,
            places: tower.g_infinity,
            tower,
        });
    }
    Ok(RamificationReport {
        p,
        base: base.clone(),
        extension: ext.clone(),
        base_reduced,
        extension_reduced,
        degree,
        tower_degree,
        unramified_at_p,
        linearly_disjoint: tower_degree == ext.degree / base.degree,
        primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f23() -> AbelianField {
        AbelianField::real_cyclotomic(23).unwrap()
    }

    #[test]
    fn field_construction() {
        assert_eq!(f23().degree(), 11);
        assert!(AbelianField::cyclotomic(1).unwrap().is_rational());
        assert_eq!(AbelianField::with_degree(1123, 11).unwrap().degree(), 11);
        assert_eq!(
            AbelianField::with_degree(15, 2),
            Err(SplittingError::AmbiguousDegree {
                conductor: 15,
                degree: 2
            })
        );
        assert_eq!(AbelianField::with_degree(15, 8).unwrap().degree(), 8);
        assert_eq!(
            AbelianField::with_degree(15, 3),
            Err(SplittingError::NoSuchSubfield {
                conductor: 15,
                degree: 3
            })
        );
        assert_eq!(
            AbelianField::new(10, vec![5]),
            Err(SplittingError::NotAUnit {
                value: 5,
                modulus: 10
            })
        );
    }

    #[test]
    fn field_spec_grammar() {
        assert_eq!(
            "Q".parse::<AbelianField>().unwrap(),
            AbelianField::rational()
        );
        let f: AbelianField = "cyclotomic:23:gens=-1".parse().unwrap();
        assert_eq!(f.degree(), 11);
        let g: AbelianField = "cyclotomic:1123:degree=11".parse().unwrap();
        assert_eq!(g.degree(), 11);
        assert!("cyclotomic:0:degree=1".parse::<AbelianField>().is_err());
        assert!("cyclo:5".parse::<AbelianField>().is_err());
        assert!("cyclotomic:7:order=3".parse::<AbelianField>().is_err());
    }

    #[test]
    fn efg_examples() {
        assert_eq!(
            efg(&f23(), 23).unwrap(),
            PlaceData {
                ell: 23,
                e: 11,
                f: 1,
                g: 1
            }
        );
        let f1123 = AbelianField::with_degree(1123, 11).unwrap();
        assert_eq!(
            efg(&f1123, 1123).unwrap(),
            PlaceData {
                ell: 1123,
                e: 11,
                f: 1,
                g: 1
            }
        );
        // 47 ≡ 1 mod 23: totally split
        assert_eq!(
            efg(&f23(), 47).unwrap(),
            PlaceData {
                ell: 47,
                e: 1,
                f: 1,
                g: 11
            }
        );
        // 2 has order 11 mod 23, and 2 ∈ H·⟨2⟩ gives f = 11 in Q(ζ₂₃)⁺
        assert_eq!(
            efg(&f23(), 2).unwrap(),
            PlaceData {
                ell: 2,
                e: 1,
                f: 11,
                g: 1
            }
        );
    }

    #[test]
    fn efg_product_is_degree_small_exhaustive() {
        for n in 1..=60u64 {
            let ug = unit_group(n);
            for sub in ug.group().all_subgroups() {
                let gens: Vec<u64> = sub.generators().iter().map(|c| ug.from_coords(c)).collect();
                let field = AbelianField::new(n, gens).unwrap();
                for ell in [2u64, 3, 5, 7, 11, 13] {
                    let d = efg(&field, ell).unwrap();
                    assert_eq!(d.e * d.f * d.g, field.degree(), "N={n} ell={ell}");
                }
            }
        }
    }

    #[test]
    fn subfield_tests() {
        let q = AbelianField::rational();
        assert!(q.is_subfield_of(&f23()));
        assert!(!f23().is_subfield_of(&q));
        let full = AbelianField::cyclotomic(23 * 3).unwrap();
        assert!(f23().is_subfield_of(&full));
        let q3 = AbelianField::cyclotomic(3).unwrap();
        assert!(q3.is_subfield_of(&full));
        assert!(!q3.is_subfield_of(&f23()));
    }

    #[test]
    fn tower_places_examples() {
        let q = AbelianField::rational();
        assert_eq!(tower_places(&q, 1123, 11).unwrap().g_infinity, 1);
        assert_eq!(tower_places(&q, 23, 11).unwrap().g_infinity, 1);
        // 3^10 ≡ 1 mod 121, not mod 1331
        assert_eq!(tower_places(&q, 3, 11).unwrap().g_infinity, 11);
        // 17^2 ≡ 1 mod 9, not mod 27
        assert_eq!(tower_places(&q, 17, 3).unwrap().g_infinity, 3);
        assert_eq!(tower_places(&q, 3, 3), Err(SplittingError::SameAsP(3)));
    }

    #[test]
    fn tower_stays_stable_past_stopping_point() {
        let q = AbelianField::rational();
        for (ell, p) in [(3u64, 11u64), (17, 3), (19, 3), (23, 11), (7, 5)] {
            let t = tower_places(&q, ell, p).unwrap();
            let last = t.layers.last().unwrap().m;
            for m in last + 1..=last + 3 {
                assert_eq!(
                    layer_places(&q, ell, p, m).unwrap().g,
                    t.g_infinity,
                    "ell={ell} p={p} m={m}"
                );
            }
            for w in t.layers.windows(2) {
                assert!(w[1].g == w[0].g || w[1].g == w[0].g * p);
            }
        }
    }

    #[test]
    fn tower_skips_layers_inside_base() {
        // F = first layer of the 3-adic tower: F·Q_0 = F·Q_1 = F.
        let f = AbelianField::with_degree(9, 3).unwrap();
        let t = tower_places(&f, 17, 3).unwrap();
        assert_eq!(t.layers[0].degree, t.layers[1].degree);
        assert_eq!(t.g_infinity, 3);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(unramified_at_p_reduction(&f23(), 11).unwrap(), f23());
        let z11 = AbelianField::cyclotomic(11).unwrap();
        assert!(unramified_at_p_reduction(&z11, 11).unwrap().is_rational());
        let z121 = AbelianField::cyclotomic(121).unwrap();
        assert!(unramified_at_p_reduction(&z121, 11).unwrap().is_rational());
        let z23p = AbelianField::cyclotomic(23 * 11).unwrap();
        let r = unramified_at_p_reduction(&z23p, 11).unwrap();
        assert_eq!((r.conductor(), r.degree()), (23, 22));
        // Diagonal coupling of the 23- and 11-parts collapses completely.
        let ug = unit_group(253);
        let diag = ug.embed(23, 5) * ug.embed(11, 2) % 253;
        let coupled = AbelianField::new(253, vec![diag]).unwrap();
        assert!(unramified_at_p_reduction(&coupled, 11)
            .unwrap()
            .is_rational());
    }

    #[test]
    fn ramified_set_examples() {
        let q = AbelianField::rational();
        let r = ramified_set(&q, &f23(), 11).unwrap();
        assert_eq!(r.degree, 11);
        assert!(r.linearly_disjoint && r.unramified_at_p);
        assert_eq!(r.primes.len(), 1);
        assert_eq!(
            (
                r.primes[0].ell,
                r.primes[0].local_degree,
                r.primes[0].places
            ),
            (23, 11, 1)
        );

        let f1123 = AbelianField::with_degree(1123, 11).unwrap();
        let r = ramified_set(&q, &f1123, 11).unwrap();
        assert_eq!(
            (
                r.primes[0].ell,
                r.primes[0].local_degree,
                r.primes[0].places
            ),
            (1123, 11, 1)
        );

        assert!(ramified_set(&f23(), &f23(), 11).unwrap().primes.is_empty());
        assert_eq!(
            ramified_set(&f23(), &q, 11).unwrap_err(),
            SplittingError::NotASubfield
        );
        let z23 = AbelianField::cyclotomic(23).unwrap();
        assert_eq!(
            ramified_set(&q, &z23, 11).unwrap_err(),
            SplittingError::NotPPower { degree: 22, p: 11 }
        );
        assert_eq!(
            ramified_set(&q, &f23(), 2).unwrap_err(),
            SplittingError::EvenPrime
        );
    }
}
