//! Local types at primes `ℓ ≠ p` and the multiplicities `m_L(V)` and
//! `m(L′/L, V)` over a cyclic totally ramified `p`-extension `L′/L`.
//!
//! Characters of `Gal(L′/L) ≅ Z/D` are indexed by `j ∈ Z/D`, with `χ_j`
//! sending a fixed generator to `ζ_D^j`.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("generic local data only supports m_extension")]
    GenericUnsupported,
    #[error("incoherent generic data: {0}")]
    IncoherentGenericData(String),
    #[error("a ramified character needs `order=` to be restricted or twisted individually")]
    UnresolvedInertiaOrder,
    #[error("local degree {degree} is not a power of {p}")]
    NotPPower { degree: u64, p: u64 },
    #[error("bad local type `{spec}`: {msg}")]
    Parse { spec: String, msg: String },
    #[error("table value {h} disagrees with multiplicity sum {m}")]
    PathDisagreement { m: i64, h: i64 },
}

/// A character `φ` of the local Galois group, described by the bits the
/// multiplicity formulas need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalCharData {
    pub ramified: bool,
    pub trivial_mod_p: bool,
    /// Whether `φ` becomes unramified over the local extension in question.
    pub becomes_unramified_over_extension: bool,
    /// Order of `φ` on inertia, when known. Always `Some(1)` if unramified.
    pub inertia_order: Option<u64>,
}

impl LocalCharData {
    pub fn unramified(trivial_mod_p: bool) -> Self {
        LocalCharData {
            ramified: false,
            trivial_mod_p,
            becomes_unramified_over_extension: true,
            inertia_order: Some(1),
        }
    }

    pub fn ramified(trivial_mod_p: bool, dies: bool) -> Self {
        LocalCharData {
            ramified: true,
            trivial_mod_p,
            becomes_unramified_over_extension: dies,
            inertia_order: None,
        }
    }

    pub fn ramified_of_order(trivial_mod_p: bool, order: u64) -> Self {
        if order <= 1 {
            return Self::unramified(trivial_mod_p);
        }
        LocalCharData {
            ramified: true,
            trivial_mod_p,
            becomes_unramified_over_extension: false,
            inertia_order: Some(order),
        }
    }

    /// Whether `χφ` is unramified for some character `χ` of `Z/degree`.
    fn dies_over(&self, degree: u64) -> bool {
        match (self.ramified, self.inertia_order) {
            (false, _) => true,
            (true, Some(o)) => degree.is_multiple_of(o),
            (true, None) => self.becomes_unramified_over_extension,
        }
    }

    /// The `j` with `χ_j φ` unramified over a degree-`D` extension.
    fn untwisting_index(&self, degree: u64) -> Result<Option<u64>, LocalError> {
        if !self.ramified {
            return Ok(Some(0));
        }
        match self.inertia_order {
            Some(o) if degree.is_multiple_of(o) => Ok(Some(degree - degree / o)),
            Some(_) => Ok(None),
            None if self.becomes_unramified_over_extension => {
                Err(LocalError::UnresolvedInertiaOrder)
            }
            None => Ok(None),
        }
    }

    /// `φ` restricted to a subextension of degree `d` over the base.
    fn restrict(&self, d: u64) -> Result<LocalCharData, LocalError> {
        // Without a known order, a character that survives the whole
        // extension survives every piece of it.
        if !self.ramified
            || d == 1
            || (self.inertia_order.is_none() && !self.becomes_unramified_over_extension)
        {
            return Ok(*self);
        }
        let o = self
            .inertia_order
            .ok_or(LocalError::UnresolvedInertiaOrder)?;
        Ok(LocalCharData::ramified_of_order(
            self.trivial_mod_p,
            o / o.gcd(&d),
        ))
    }

    /// `h(φ)` for ramification index `e`.
    pub fn h(&self, e: u64) -> i64 {
        if !self.trivial_mod_p {
            0
        } else if !self.ramified {
            e as i64 - 1
        } else if self.dies_over(e) {
            -1
        } else {
            0
        }
    }
}

impl fmt::Display for LocalCharData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{}",
            if self.ramified { "ram" } else { "unram" },
            if self.trivial_mod_p {
                "triv"
            } else {
                "nontriv"
            }
        )?;
        if self.ramified {
            match self.inertia_order {
                Some(o) => write!(f, ",order={o}"),
                None => write!(
                    f,
                    ",{}",
                    if self.becomes_unramified_over_extension {
                        "dies"
                    } else {
                        "survives"
                    }
                ),
            }
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LocalType {
    /// `x² − a x + c` reduced mod `p`.
    UnramifiedPS {
        a: u64,
        c: u64,
        p: u64,
    },
    RamifiedPS(LocalCharData, LocalCharData),
    Special(LocalCharData),
    Supercuspidal,
    /// `m_L(V_{χ_j})` for `j ∈ Z/D`, `D` the length.
    Generic(Vec<u64>),
}

impl fmt::Display for LocalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalType::UnramifiedPS { a, c, .. } => write!(f, "ups:a={a},c={c}"),
            LocalType::RamifiedPS(x, y) => write!(f, "ramps:{x};{y}"),
            LocalType::Special(x) => write!(f, "special:{x}"),
            LocalType::Supercuspidal => write!(f, "sc"),
            LocalType::Generic(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "generic:{}", parts.join(","))
            }
        }
    }
}

fn parse_charspec(spec: &str, whole: &str) -> Result<LocalCharData, LocalError> {
    let bad = |msg: &str| LocalError::Parse {
        spec: whole.to_string(),
        msg: msg.to_string(),
    };
    let fields: Vec<&str> = spec.split(',').map(str::trim).collect();
    if fields.len() < 2 {
        return Err(bad(
            "character spec is `ram|unram,triv|nontriv[,dies|survives][,order=n]`",
        ));
    }
    let ramified = match fields[0] {
        "ram" => true,
        "unram" => false,
        _ => return Err(bad("expected `ram` or `unram`")),
    };
    let trivial = match fields[1] {
        "triv" => true,
        "nontriv" => false,
        _ => return Err(bad("expected `triv` or `nontriv`")),
    };
    let mut dies = None;
    let mut order = None;
    for extra in &fields[2..] {
        match *extra {
            "dies" => dies = Some(true),
            "survives" => dies = Some(false),
            x => match x.strip_prefix("order=").map(str::parse::<u64>) {
                Some(Ok(o)) if o >= 1 => order = Some(o),
                _ => return Err(bad("unknown character attribute")),
            },
        }
    }
    if !ramified {
        if order.is_some_and(|o| o != 1) || dies == Some(false) {
            return Err(bad("an unramified character has inertia order 1"));
        }
        return Ok(LocalCharData::unramified(trivial));
    }
    match (order, dies) {
        (Some(1), _) => Err(bad("a ramified character has inertia order > 1")),
        (Some(o), _) => Ok(LocalCharData::ramified_of_order(trivial, o)),
        (None, d) => Ok(LocalCharData::ramified(trivial, d.unwrap_or(false))),
    }
}

impl LocalType {
    /// Parses the local-type grammar
    /// `ups:a=<int>,c=<int>` | `ramps:<cs>;<cs>` | `special:<cs>` | `sc` |
    /// `generic:<m0,m1,...>`, reducing `ups` residues mod `p`.
    pub fn parse(spec: &str, p: u64) -> Result<Self, LocalError> {
        let bad = |msg: &str| LocalError::Parse {
            spec: spec.to_string(),
            msg: msg.to_string(),
        };
        let s = spec.trim();
        if s == "sc" {
            return Ok(LocalType::Supercuspidal);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("unknown local type"))?;
        match kind {
            "ups" => {
                let mut a = None;
                let mut c = None;
                for kv in rest.split(',') {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| bad("expected `a=<int>,c=<int>`"))?;
                    let v: i64 = v
                        .trim()
                        .parse()
                        .map_err(|_| bad("residues must be integers"))?;
                    match k.trim() {
                        "a" => a = Some(v),
                        "c" => c = Some(v),
                        _ => return Err(bad("expected `a=<int>,c=<int>`")),
                    }
                }
                let (a, c) = a
                    .zip(c)
                    .ok_or_else(|| bad("both `a` and `c` are required"))?;
                Ok(LocalType::unramified_ps(a as i128, c as i128, p))
            }
            "ramps" => {
                let (x, y) = rest
                    .split_once(';')
                    .ok_or_else(|| bad("expected two character specs separated by `;`"))?;
                Ok(LocalType::RamifiedPS(
                    parse_charspec(x, spec)?,
                    parse_charspec(y, spec)?,
                ))
            }
            "special" => Ok(LocalType::Special(parse_charspec(rest, spec)?)),
            "generic" => {
                let values = rest
                    .split(',')
                    .map(|x| x.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad("generic values are nonnegative integers"))?;
                if values.is_empty() {
                    return Err(bad("generic data needs at least one value"));
                }
                Ok(LocalType::Generic(values))
            }
            _ => Err(bad("unknown local type")),
        }
    }

    pub fn unramified_ps(a: i128, c: i128, p: u64) -> Self {
        let m = p as i128;
        LocalType::UnramifiedPS {
            a: a.rem_euclid(m) as u64,
            c: c.rem_euclid(m) as u64,
            p,
        }
    }

    /// Name of the `h`-table row that applies.
    pub fn table_case(&self) -> &'static str {
        match self {
            LocalType::UnramifiedPS { a, c, p } => match Self::ups_multiplicity(*a, *c, *p) {
                2 => "ups-two-trivial-roots",
                1 => "ups-one-trivial-root",
                _ => "ups-no-trivial-root",
            },
            LocalType::RamifiedPS(..) => "ramified-ps",
            LocalType::Special(_) => "special",
            LocalType::Supercuspidal => "supercuspidal",
            LocalType::Generic(_) => "generic",
        }
    }

    fn ups_multiplicity(a: u64, c: u64, p: u64) -> u64 {
        if a == 2 % p && c == 1 % p {
            2
        } else if a == (c + 1) % p {
            1
        } else {
            0
        }
    }

    /// `V` restricted to the subextension of degree `d` over the base.
    /// Generic data over `Z/D` becomes data over `Z/(D/d)` by summing each
    /// coset of `dZ/D`.
    pub fn restrict(&self, d: u64) -> Result<LocalType, LocalError> {
        Ok(match self {
            LocalType::UnramifiedPS { .. } | LocalType::Supercuspidal => self.clone(),
            LocalType::RamifiedPS(x, y) => LocalType::RamifiedPS(x.restrict(d)?, y.restrict(d)?),
            LocalType::Special(x) => LocalType::Special(x.restrict(d)?),
            LocalType::Generic(v) => {
                let len = v.len() as u64;
                if d == 0 || !len.is_multiple_of(d) {
                    return Err(LocalError::IncoherentGenericData(format!(
                        "{len} values cannot be restricted along degree {d}"
                    )));
                }
                let k = (len / d) as usize;
                let mut out = vec![0u64; k];
                for (j, &m) in v.iter().enumerate() {
                    out[j % k] += m;
                }
                LocalType::Generic(out)
            }
        })
    }
}

/// `m_L(V_{χ_j})` for the character `χ_j` of `Z/degree`.
pub fn m_single(v: &LocalType, j: u64, degree: u64) -> Result<u64, LocalError> {
    let j = j % degree.max(1);
    let one = |phi: &LocalCharData| -> Result<u64, LocalError> {
        if !phi.trivial_mod_p {
            return Ok(0);
        }
        Ok(u64::from(phi.untwisting_index(degree)? == Some(j)))
    };
    match v {
        LocalType::UnramifiedPS { a, c, p } => Ok(if j == 0 {
            LocalType::ups_multiplicity(*a, *c, *p)
        } else {
            0
        }),
        LocalType::RamifiedPS(x, y) => Ok(one(x)? + one(y)?),
        LocalType::Special(x) => one(x),
        LocalType::Supercuspidal => Ok(0),
        LocalType::Generic(_) => Err(LocalError::GenericUnsupported),
    }
}

/// Number of `j ∈ Z/degree` with `χ_j φ` unramified and `≡ 1 mod p`.
fn untwisted_count(phi: &LocalCharData, degree: u64) -> u64 {
    u64::from(phi.trivial_mod_p && phi.dies_over(degree))
}

/// `m(L′/L, V) = Σ_χ m_L(V) − m_L(V_χ)` for `[L′:L] = degree`.
pub fn m_extension(v: &LocalType, degree: u64) -> Result<i64, LocalError> {
    if degree == 0 {
        return Err(LocalError::NotPPower { degree, p: 0 });
    }
    let d = degree as i64;
    match v {
        LocalType::Generic(values) => {
            let len = values.len() as u64;
            if !len.is_multiple_of(degree) {
                return Err(LocalError::IncoherentGenericData(format!(
                    "{len} values do not cover a degree-{degree} extension"
                )));
            }
            let step = (len / degree) as usize;
            let m0 = values[0] as i64;
            Ok(values.iter().step_by(step).map(|&m| m0 - m as i64).sum())
        }
        LocalType::RamifiedPS(x, y) => {
            let m0 = (m_untwisted(x) + m_untwisted(y)) as i64;
            Ok(d * m0 - (untwisted_count(x, degree) + untwisted_count(y, degree)) as i64)
        }
        LocalType::Special(x) => Ok(d * m_untwisted(x) as i64 - untwisted_count(x, degree) as i64),
        _ => Ok((d - 1) * m_single(v, 0, degree)? as i64),
    }
}

fn m_untwisted(phi: &LocalCharData) -> u64 {
    u64::from(phi.trivial_mod_p && !phi.ramified)
}

/// `h(φ)` from the character table.
pub fn h_char(phi: &LocalCharData, e: u64) -> i64 {
    phi.h(e)
}

/// `h_v` from the case tables.
pub fn h_v(v: &LocalType, e: u64) -> Result<i64, LocalError> {
    let e1 = e as i64 - 1;
    match v {
        LocalType::UnramifiedPS { a, c, p } => Ok(match LocalType::ups_multiplicity(*a, *c, *p) {
            2 => 2 * e1,
            1 => e1,
            _ => 0,
        }),
        LocalType::RamifiedPS(x, y) => Ok(x.h(e) + y.h(e)),
        LocalType::Special(x) => Ok(x.h(e)),
        LocalType::Supercuspidal => Ok(0),
        LocalType::Generic(_) => Err(LocalError::GenericUnsupported),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalPath {
    Table,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalFactorReport {
    pub ell: u64,
    pub local_degree: u64,
    pub local_type: String,
    pub m: i64,
    pub h: Option<i64>,
    pub path: LocalPath,
}

pub fn is_p_power(mut d: u64, p: u64) -> bool {
    if d == 0 || p < 2 {
        return false;
    }
    while d.is_multiple_of(p) {
        d /= p;
    }
    d == 1
}

/// Evaluates the local contribution by both routes where both apply.
pub fn local_factor(
    v: &LocalType,
    ell: u64,
    local_degree: u64,
    p: u64,
) -> Result<LocalFactorReport, LocalError> {
    if !is_p_power(local_degree, p) {
        return Err(LocalError::NotPPower {
            degree: local_degree,
            p,
        });
    }
    let m = m_extension(v, local_degree)?;
    let (h, path) = match v {
        LocalType::Generic(_) => (None, LocalPath::Generic),
        _ => {
            let h = h_v(v, local_degree)?;
            if h != m {
                return Err(LocalError::PathDisagreement { m, h });
            }
            (Some(h), LocalPath::Table)
        }
    };
    Ok(LocalFactorReport {
        ell,
        local_degree,
        local_type: v.to_string(),
        m,
        h,
        path,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AdditivityCheck {
    /// `m(L″/L, V)`.
    pub lhs: i64,
    /// `[L″:L′]·m(L′/L, V) + m(L″/L′, V)`.
    pub rhs: i64,
}

impl AdditivityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Both sides of the tower formula for `L ⊆ L′ ⊆ L″` with
/// `[L′:L] = inner` and `[L″:L] = outer`.
pub fn check_tower_additivity(
    v: &LocalType,
    inner: u64,
    outer: u64,
) -> Result<AdditivityCheck, LocalError> {
    if inner == 0 || !outer.is_multiple_of(inner) {
        return Err(LocalError::IncoherentGenericData(format!(
            "{inner} does not divide {outer}"
        )));
    }
    let lhs = m_extension(v, outer)?;
    let upper = v.restrict(inner)?;
    let rhs = (outer / inner) as i64 * m_extension(v, inner)? + m_extension(&upper, outer / inner)?;
    Ok(AdditivityCheck { lhs, rhs })
}
