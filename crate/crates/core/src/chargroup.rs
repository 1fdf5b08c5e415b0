//! Finite abelian groups, their characters, and multiplicities of characters
//! in finite-dimensional representations.
//!
//! A group is `Z/d₁ × … × Z/d_r` with `d₁ | d₂ | … | d_r`. Elements and
//! characters are both integer vectors; a character with exponents `c`
//! sends `g` to `ζ^{Σ cᵢ gᵢ (L/dᵢ)}` where `L = d_r` and `ζ` is a primitive
//! `L`-th root of unity. No root of unity is ever evaluated numerically.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invariant factors {0:?} do not form a divisibility chain of integers >= 2")]
    BadInvariantFactors(Vec<u64>),
    #[error("vector {0:?} is not an element of the group")]
    NotAnElement(Vec<u64>),
    #[error("subgroup generators do not belong to the representation's group")]
    SubgroupMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, GroupError> {
        let chain_ok =
            factors.iter().all(|&d| d >= 2) && factors.windows(2).all(|w| w[1] % w[0] == 0);
        if !chain_ok {
            return Err(GroupError::BadInvariantFactors(factors));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            factors: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(&[n])
    }

    /// Invariant-factor form of `Z/n₁ × … × Z/n_s` for arbitrary `nᵢ ≥ 1`.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &n in orders {
            for &(p, e) in crate::arith::factor(n).pairs() {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for parts in by_prime.values_mut() {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            for (i, q) in parts.iter().enumerate() {
                factors[rank - 1 - i] *= q;
            }
        }
        FiniteAbelianGroup { factors }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn is_element(&self, v: &[u64]) -> bool {
        v.len() == self.rank() && v.iter().zip(&self.factors).all(|(&x, &d)| x < d)
    }

    fn check(&self, v: &[u64]) -> Result<(), GroupError> {
        if self.is_element(v) {
            Ok(())
        } else {
            Err(GroupError::NotAnElement(v.to_vec()))
        }
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((&x, &y), &d)| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| (d - x) % d)
            .collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| ((x as u128 * k as u128) % d as u128) as u64)
            .collect()
    }

    /// Mixed-radix index of an element, in `0..order()`.
    pub fn index_of(&self, v: &[u64]) -> usize {
        v.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> Vec<u64> {
        let mut v = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.factors[i] as usize;
            v[i] = (idx % d) as u64;
            idx /= d;
        }
        v
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Order of the subgroup generated by `gens`.
    pub fn subgroup_order(&self, gens: &[Vec<u64>]) -> u64 {
        span_order(&self.factors, gens)
    }

    pub fn subgroup_contains(&self, gens: &[Vec<u64>], x: &[u64]) -> bool {
        let mut extended = gens.to_vec();
        extended.push(x.to_vec());
        self.subgroup_order(&extended) == self.subgroup_order(gens)
    }

    /// Explicit element list of `⟨gens⟩`, sorted. Intended for small groups.
    pub fn subgroup_elements(&self, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let mut seen = vec![false; self.order() as usize];
        let mut out = vec![self.identity()];
        seen[self.index_of(&self.identity())] = true;
        let mut frontier = out.clone();
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                let iy = self.index_of(&y);
                if !seen[iy] {
                    seen[iy] = true;
                    out.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        out.sort();
        out
    }

    /// Every subgroup, each given by a generating set. Brute force; meant for
    /// groups of a few hundred elements.
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let n = self.order() as usize;
        let elements: Vec<Vec<u64>> = self.elements().collect();
        let mut known: BTreeMap<Vec<bool>, Vec<Vec<u64>>> = BTreeMap::new();
        let mut trivial = vec![false; n];
        trivial[self.index_of(&self.identity())] = true;
        known.insert(trivial.clone(), Vec::new());
        let mut queue = vec![(trivial, Vec::<Vec<u64>>::new())];
        while let Some((members, gens)) = queue.pop() {
            for (i, g) in elements.iter().enumerate() {
                if members[i] {
                    continue;
                }
                // ⟨S, g⟩ = ⋃_k (S + k·g)
                let mut next = members.clone();
                let mut shift = g.clone();
                loop {
                    let si = self.index_of(&shift);
                    if members[si] {
                        break;
                    }
                    for (j, m) in members.iter().enumerate() {
                        if *m {
                            let y = self.add(&elements[j], &shift);
                            next[self.index_of(&y)] = true;
                        }
                    }
                    shift = self.add(&shift, g);
                }
                if !known.contains_key(&next) {
                    let mut new_gens = gens.clone();
                    new_gens.push(g.clone());
                    known.insert(next.clone(), new_gens.clone());
                    queue.push((next, new_gens));
                }
            }
        }
        let mut subs: Vec<Subgroup> = known.into_values().map(Subgroup::new).collect();
        subs.sort_by_key(|s| (self.subgroup_order(s.generators()), s.generators().to_vec()));
        subs
    }
}

/// A subgroup presented by generators in coordinate form.
/// Order of the subgroup of `Z/d₁ × … × Z/d_r` generated by `gens`, by
/// triangularizing the relation lattice `span(gens) + ⊕ dᵢ Z` column by
/// column. The `dᵢ` need not form a divisibility chain.
pub fn span_order(moduli: &[u64], gens: &[Vec<u64>]) -> u64 {
    let r = moduli.len();
    let d: Vec<i128> = moduli.iter().map(|&x| x as i128).collect();
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().zip(&d).map(|(&x, &m)| x as i128 % m).collect())
        .collect();
    let mut index = 1u64;
    for j in 0..r {
        let mut pivot = vec![0i128; r];
        pivot[j] = d[j];
        let mut rest = Vec::with_capacity(rows.len() + 1);
        for mut row in rows.drain(..) {
            if row[j] != 0 {
                let eg = pivot[j].extended_gcd(&row[j]);
                let (a, b) = (pivot[j] / eg.gcd, row[j] / eg.gcd);
                let mut new_pivot = vec![0i128; r];
                let mut new_row = vec![0i128; r];
                for k in j..r {
                    new_pivot[k] = (eg.x * pivot[k] + eg.y * row[k]).rem_euclid(d[k]);
                    new_row[k] = (b * pivot[k] - a * row[k]).rem_euclid(d[k]);
                }
                new_pivot[j] = eg.gcd.abs();
                new_row[j] = 0;
                pivot = new_pivot;
                row = new_row;
            }
            if row[j + 1..].iter().any(|&x| x != 0) {
                rest.push(row);
            }
        }
        // d_j e_j = (d_j / g) · pivot − (tail correction), so the tail of
        // (d_j / g) · pivot stays in the lattice.
        let g = pivot[j];
        let mult = d[j] / g;
        let tail: Vec<i128> = (0..r)
            .map(|k| {
                if k <= j {
                    0
                } else {
                    (mult * pivot[k]).rem_euclid(d[k])
                }
            })
            .collect();
        if tail.iter().any(|&x| x != 0) {
            rest.push(tail);
        }
        index *= g as u64;
        rows = rest;
    }
    moduli.iter().product::<u64>() / index
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    gens: Vec<Vec<u64>>,
}

impl Subgroup {
    pub fn new(gens: Vec<Vec<u64>>) -> Self {
        Subgroup { gens }
    }

    pub fn whole(group: &FiniteAbelianGroup) -> Self {
        let gens = (0..group.rank())
            .map(|i| {
                let mut e = group.identity();
                e[i] = 1;
                e
            })
            .collect();
        Subgroup { gens }
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.gens
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Character {
    exps: Vec<u64>,
}

impl Character {
    pub fn new(group: &FiniteAbelianGroup, exps: Vec<u64>) -> Result<Self, GroupError> {
        group.check(&exps)?;
        Ok(Character { exps })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Character {
            exps: group.identity(),
        }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&c| c == 0)
    }

    /// `k` with `χ(g) = ζ_L^k`, `L` the group exponent.
    pub fn value_exponent(&self, group: &FiniteAbelianGroup, g: &[u64]) -> u64 {
        let l = group.exponent() as u128;
        let total: u128 = self
            .exps
            .iter()
            .zip(g)
            .zip(group.factors())
            .map(|((&c, &x), &d)| c as u128 * x as u128 * (l / d as u128))
            .sum();
        (total % l) as u64
    }

    pub fn mul(&self, group: &FiniteAbelianGroup, other: &Character) -> Character {
        Character {
            exps: group.add(&self.exps, &other.exps),
        }
    }

    pub fn conj(&self, group: &FiniteAbelianGroup) -> Character {
        Character {
            exps: group.neg(&self.exps),
        }
    }

    fn restriction_key(&self, group: &FiniteAbelianGroup, h: &Subgroup) -> Vec<u64> {
        h.generators()
            .iter()
            .map(|g| self.value_exponent(group, g))
            .collect()
    }
}

/// All `|G|` characters in lexicographic exponent order; the first is trivial.
pub fn dual_group(group: &FiniteAbelianGroup) -> Vec<Character> {
    group.elements().map(|exps| Character { exps }).collect()
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order `≤ max_order` up to isomorphism, ordered by
/// group order and then by invariant factors.
pub fn abelian_groups_up_to(max_order: u64) -> Vec<FiniteAbelianGroup> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        let mut shapes: Vec<Vec<u64>> = vec![Vec::new()];
        for &(p, e) in crate::arith::factor(n).pairs() {
            let mut next = Vec::new();
            for shape in &shapes {
                for part in partitions(e, e) {
                    let mut s = shape.clone();
                    s.extend(part.iter().map(|&k| p.pow(k)));
                    next.push(s);
                }
            }
            shapes = next;
        }
        let mut groups: Vec<FiniteAbelianGroup> = shapes
            .iter()
            .map(|s| FiniteAbelianGroup::from_cyclic_orders(s))
            .collect();
        groups.sort();
        out.extend(groups);
    }
    out
}

/// Characters trivial on `h`, i.e. the dual of `G/H`.
pub fn annihilator(group: &FiniteAbelianGroup, h: &Subgroup) -> Vec<Character> {
    dual_group(group)
        .into_iter()
        .filter(|chi| chi.restriction_key(group, h).iter().all(|&k| k == 0))
        .collect()
}

/// A representation of a finite abelian group as a multiset of characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepMultiset {
    group: FiniteAbelianGroup,
    entries: BTreeMap<Character, u64>,
}

impl RepMultiset {
    pub fn new(group: FiniteAbelianGroup) -> Self {
        RepMultiset {
            group,
            entries: BTreeMap::new(),
        }
    }

    pub fn regular(group: FiniteAbelianGroup) -> Self {
        let mut w = RepMultiset::new(group);
        for chi in dual_group(&w.group) {
            w.entries.insert(chi, 1);
        }
        w
    }

    pub fn add(&mut self, chi: Character, mult: u64) -> Result<(), GroupError> {
        self.group.check(chi.exponents())?;
        if mult > 0 {
            *self.entries.entry(chi).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Character, u64)> {
        self.entries.iter().map(|(c, &m)| (c, m))
    }

    pub fn dim(&self) -> u64 {
        self.entries.values().sum()
    }

    fn check_subgroup(&self, h: &Subgroup) -> Result<(), GroupError> {
        if h.generators().iter().all(|g| self.group.is_element(g)) {
            Ok(())
        } else {
            Err(GroupError::SubgroupMismatch)
        }
    }
}

/// Multiplicity of `χ|_H` in `W|_H`, counted by restriction.
pub fn multiplicity(w: &RepMultiset, chi: &Character, h: &Subgroup) -> Result<u64, GroupError> {
    w.check_subgroup(h)?;
    w.group.check(chi.exponents())?;
    let target = chi.restriction_key(&w.group, h);
    Ok(w.entries()
        .filter(|(psi, _)| psi.restriction_key(&w.group, h) == target)
        .map(|(_, m)| m)
        .sum())
}

/// Multiplicity of `χ|_H` in `W|_H` by the inner-product formula
/// `(1/|H|) Σ_h tr W(h) · conj χ(h)`, summed in `Z[ζ_L]` and reduced
/// modulo the cyclotomic polynomial.
pub fn multiplicity_by_trace(
    w: &RepMultiset,
    chi: &Character,
    h: &Subgroup,
) -> Result<u64, GroupError> {
    w.check_subgroup(h)?;
    w.group.check(chi.exponents())?;
    let g = &w.group;
    let l = g.exponent();
    let elements = g.subgroup_elements(h.generators());
    let mut acc = CyclotomicInteger::zero(l);
    for x in &elements {
        let conj = (l - chi.value_exponent(g, x)) % l;
        for (psi, m) in w.entries() {
            acc.add_root_power(psi.value_exponent(g, x) + conj, m as i128);
        }
    }
    let total = acc
        .to_integer()
        .expect("an inner product of characters is rational");
    let size = elements.len() as i128;
    debug_assert_eq!(total % size, 0);
    Ok((total / size) as u64)
}

/// Both sides of the subgroup identity for `Σ_χ (⟨W,1⟩ − ⟨W,χ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroupIdentityCheck {
    pub lhs: i64,
    pub rhs: i64,
}

impl GroupIdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates
/// `Σ_{χ∈G^∨}(⟨W,1⟩_G − ⟨W,χ⟩_G)` against
/// `|H|·Σ_{χ∈(G/H)^∨}(⟨W,1⟩_G − ⟨W,χ⟩_G) + Σ_{χ∈H^∨}(⟨W,1⟩_H − ⟨W,χ⟩_H)`
/// by direct counting.
pub fn check_group_identity(
    w: &RepMultiset,
    h: &Subgroup,
) -> Result<GroupIdentityCheck, GroupError> {
    w.check_subgroup(h)?;
    let g = &w.group;
    let h_order = g.subgroup_order(h.generators()) as i64;

    // Multiplicity of each character of G in W.
    let in_g = |chi: &Character| -> i64 { w.entries.get(chi).copied().unwrap_or(0) as i64 };
    let trivial = Character::trivial(g);
    let one_g = in_g(&trivial);
    let lhs: i64 = dual_group(g).iter().map(|chi| one_g - in_g(chi)).sum();

    let quotient: i64 = annihilator(g, h).iter().map(|chi| one_g - in_g(chi)).sum();

    // Characters of H are the distinct restrictions of characters of G.
    let mut restricted: HashMap<Vec<u64>, i64> = HashMap::new();
    for (psi, m) in w.entries() {
        *restricted.entry(psi.restriction_key(g, h)).or_insert(0) += m as i64;
    }
    let h_dual: BTreeSet<Vec<u64>> = dual_group(g)
        .iter()
        .map(|c| c.restriction_key(g, h))
        .collect();
    debug_assert_eq!(h_dual.len() as i64, h_order);
    let one_h = restricted
        .get(&trivial.restriction_key(g, h))
        .copied()
        .unwrap_or(0);
    let sub: i64 = h_dual
        .iter()
        .map(|k| one_h - restricted.get(k).copied().unwrap_or(0))
        .sum();

    Ok(GroupIdentityCheck {
        lhs,
        rhs: h_order * quotient + sub,
    })
}

/// Per-`(G, H)` data for checking the subgroup identity against many
/// representations: the restriction class of every character and whether
/// it is trivial on `H`, both indexed by `index_of` of the exponents.
#[derive(Debug, Clone)]
pub struct IdentityContext {
    order: usize,
    h_order: i64,
    class_of: Vec<usize>,
    classes: usize,
    trivial_on_h: Vec<bool>,
}

impl IdentityContext {
    pub fn new(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Self, GroupError> {
        if !h.generators().iter().all(|g| group.is_element(g)) {
            return Err(GroupError::SubgroupMismatch);
        }
        let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(group.order() as usize);
        let mut trivial_on_h = Vec::with_capacity(group.order() as usize);
        for chi in dual_group(group) {
            let key = chi.restriction_key(group, h);
            trivial_on_h.push(key.iter().all(|&k| k == 0));
            let next = ids.len();
            class_of.push(*ids.entry(key).or_insert(next));
        }
        Ok(IdentityContext {
            order: group.order() as usize,
            h_order: group.subgroup_order(h.generators()) as i64,
            class_of,
            classes: ids.len(),
            trivial_on_h,
        })
    }

    /// Both sides of the identity for `W` given as `(character index,
    /// multiplicity)` pairs.
    pub fn check(&self, w: &[(usize, u64)]) -> GroupIdentityCheck {
        let mut in_g = vec![0i64; self.order];
        for &(idx, m) in w {
            in_g[idx] += m as i64;
        }
        let one_g = in_g[0];
        let lhs: i64 = in_g.iter().map(|&m| one_g - m).sum();
        let quotient: i64 = in_g
            .iter()
            .zip(&self.trivial_on_h)
            .filter(|(_, &t)| t)
            .map(|(&m, _)| one_g - m)
            .sum();
        let mut restricted = vec![0i64; self.classes];
        for (idx, &m) in in_g.iter().enumerate() {
            restricted[self.class_of[idx]] += m;
        }
        let one_h = restricted[self.class_of[0]];
        let sub: i64 = restricted.iter().map(|&m| one_h - m).sum();
        GroupIdentityCheck {
            lhs,
            rhs: self.h_order * quotient + sub,
        }
    }
}

/// An element of `Z[ζ_L]` stored as coefficients of `1, ζ, …, ζ^{L−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicInteger {
    order: u64,
    coeffs: Vec<i128>,
}

impl CyclotomicInteger {
    pub fn zero(order: u64) -> Self {
        CyclotomicInteger {
            order,
            coeffs: vec![0; order.max(1) as usize],
        }
    }

    pub fn add_root_power(&mut self, k: u64, coeff: i128) {
        let l = self.order.max(1);
        self.coeffs[(k % l) as usize] += coeff;
    }

    /// The value as a rational integer, if it is one.
    pub fn to_integer(&self) -> Option<i128> {
        let phi = cyclotomic_polynomial(self.order.max(1));
        let rem = poly_rem(&self.coeffs, &phi);
        rem.iter()
            .skip(1)
            .all(|&c| c == 0)
            .then(|| rem.first().copied().unwrap_or(0))
    }
}

/// Coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    // x^n − 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i128; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut quot = vec![0i128; rem.len().saturating_sub(dd)];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

fn poly_rem(num: &[i128], den: &[i128]) -> Vec<i128> {
    // den is monic.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i - dd + j] -= c * dj;
            }
        }
    }
    rem.truncate(dd.max(1));
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(factors: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(factors.to_vec()).unwrap()
    }

    #[test]
    fn rejects_broken_chains() {
        assert!(FiniteAbelianGroup::new(vec![4, 6]).is_err());
        assert!(FiniteAbelianGroup::new(vec![1, 2]).is_err());
        assert_eq!(
            FiniteAbelianGroup::from_cyclic_orders(&[4, 6]).factors(),
            &[2, 12]
        );
        assert_eq!(
            FiniteAbelianGroup::from_cyclic_orders(&[1, 1]).factors(),
            &[] as &[u64]
        );
    }

    #[test]
    fn dual_group_examples() {
        let t = FiniteAbelianGroup::trivial();
        let d = dual_group(&t);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_trivial());
        assert_eq!(dual_group(&g(&[3])).len(), 3);
        let d = dual_group(&g(&[2, 4]));
        assert_eq!(d.len(), 8);
        assert!(d[0].is_trivial());
        let set: BTreeSet<_> = d.iter().collect();
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn characters_are_distinct_as_functions_and_closed() {
        let grp = g(&[2, 6]);
        let dual = dual_group(&grp);
        let tables: BTreeSet<Vec<u64>> = dual
            .iter()
            .map(|c| grp.elements().map(|x| c.value_exponent(&grp, &x)).collect())
            .collect();
        assert_eq!(tables.len(), 12);
        for a in &dual {
            for b in &dual {
                assert!(dual.contains(&a.mul(&grp, b)));
            }
        }
    }

    #[test]
    fn multiplicity_examples() {
        let grp = g(&[3]);
        let mut w = RepMultiset::new(FiniteAbelianGroup::trivial());
        w.add(Character::trivial(w.group()), 5).unwrap();
        let t = FiniteAbelianGroup::trivial();
        assert_eq!(
            multiplicity(&w, &Character::trivial(&t), &Subgroup::whole(&t)),
            Ok(5)
        );

        let reg = RepMultiset::regular(grp.clone());
        for chi in dual_group(&grp) {
            assert_eq!(multiplicity(&reg, &chi, &Subgroup::whole(&grp)), Ok(1));
            assert_eq!(
                multiplicity_by_trace(&reg, &chi, &Subgroup::whole(&grp)),
                Ok(1)
            );
        }
    }

    #[test]
    fn multiplicity_on_diagonal_subgroup_matches_trace_oracle() {
        let grp = g(&[2, 2]);
        let diag = Subgroup::new(vec![vec![1, 1]]);
        let mut w = RepMultiset::new(grp.clone());
        w.add(Character::new(&grp, vec![0, 1]).unwrap(), 2).unwrap();
        w.add(Character::new(&grp, vec![1, 0]).unwrap(), 3).unwrap();
        w.add(Character::new(&grp, vec![1, 1]).unwrap(), 1).unwrap();
        for chi in dual_group(&grp) {
            let by_count = multiplicity(&w, &chi, &diag).unwrap();
            assert_eq!(by_count, multiplicity_by_trace(&w, &chi, &diag).unwrap());
        }
        // (0,1) and (1,0) restrict to the sign on the diagonal; (1,1) to 1.
        let triv = Character::trivial(&grp);
        assert_eq!(multiplicity(&w, &triv, &diag), Ok(1));
        assert_eq!(
            multiplicity(&w, &Character::new(&grp, vec![1, 0]).unwrap(), &diag),
            Ok(5)
        );
    }

    #[test]
    fn subgroup_mismatch() {
        let w = RepMultiset::regular(g(&[3]));
        let bad = Subgroup::new(vec![vec![5]]);
        assert_eq!(
            check_group_identity(&w, &bad),
            Err(GroupError::SubgroupMismatch)
        );
    }

    #[test]
    fn group_identity_examples() {
        let grp = g(&[9]);
        let h = Subgroup::new(vec![vec![3]]);
        let mut triv = RepMultiset::new(grp.clone());
        triv.add(Character::trivial(&grp), 1).unwrap();
        let c = check_group_identity(&triv, &h).unwrap();
        assert_eq!((c.lhs, c.rhs), (8, 8));

        let reg = RepMultiset::regular(grp.clone());
        let c = check_group_identity(&reg, &h).unwrap();
        assert!(c.holds());
        // Direct evaluation: every multiplicity is 1, so every term vanishes.
        assert_eq!((c.lhs, c.rhs), (0, 0));
    }

    #[test]
    fn trivial_representation_of_trivial_group_gives_zero() {
        let t = FiniteAbelianGroup::trivial();
        let mut w = RepMultiset::new(t.clone());
        w.add(Character::trivial(&t), 1).unwrap();
        let c = check_group_identity(&w, &Subgroup::new(vec![])).unwrap();
        assert_eq!((c.lhs, c.rhs), (0, 0));
    }

    #[test]
    fn subgroup_order_matches_closure() {
        for grp in [g(&[12]), g(&[2, 4]), g(&[3, 9]), g(&[2, 2, 6])] {
            for sub in grp.all_subgroups() {
                let elems = grp.subgroup_elements(sub.generators());
                assert_eq!(grp.subgroup_order(sub.generators()), elems.len() as u64);
                for x in grp.elements() {
                    assert_eq!(
                        grp.subgroup_contains(sub.generators(), &x),
                        elems.contains(&x)
                    );
                }
            }
        }
    }

    #[test]
    fn identity_context_matches_direct_check() {
        let g = FiniteAbelianGroup::new(vec![2, 6]).unwrap();
        let chars = dual_group(&g);
        for h in g.all_subgroups() {
            let ctx = IdentityContext::new(&g, &h).unwrap();
            let mut w = RepMultiset::new(g.clone());
            let mut pairs = Vec::new();
            for (k, chi) in chars.iter().enumerate().filter(|(k, _)| k % 3 != 1) {
                let m = (k % 4) as u64;
                w.add(chi.clone(), m).unwrap();
                pairs.push((g.index_of(chi.exponents()), m));
            }
            assert_eq!(ctx.check(&pairs), check_group_identity(&w, &h).unwrap());
        }
    }

    #[test]
    fn abelian_group_counts() {
        let groups = abelian_groups_up_to(16);
        let of_order = |n: u64| groups.iter().filter(|g| g.order() == n).count();
        assert_eq!(
            (of_order(1), of_order(8), of_order(12), of_order(16)),
            (1, 3, 2, 5)
        );
        assert_eq!(
            groups.len(),
            1 + 1 + 1 + 2 + 1 + 1 + 1 + 3 + 2 + 1 + 1 + 2 + 1 + 1 + 1 + 5
        );
    }

    #[test]
    fn subgroup_counts() {
        // Z/12 has one subgroup per divisor; Z/2 × Z/2 has five.
        assert_eq!(g(&[12]).all_subgroups().len(), 6);
        assert_eq!(g(&[2, 2]).all_subgroups().len(), 5);
        assert_eq!(g(&[3, 9]).all_subgroups().len(), 10);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        let mut z = CyclotomicInteger::zero(6);
        for k in 0..6 {
            z.add_root_power(k, 1);
        }
        assert_eq!(z.to_integer(), Some(0));
        let mut z = CyclotomicInteger::zero(6);
        z.add_root_power(1, 1);
        assert_eq!(z.to_integer(), None);
    }
}
