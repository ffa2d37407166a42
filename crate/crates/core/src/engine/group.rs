use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use smallvec::SmallVec;

use crate::limits::Limits;
use crate::Result;

/// Groups up to this order get a precomputed multiplication table.
const TABLE_LIMIT: usize = 512;
/// Mixed-radix code spaces up to this size are indexed by a flat array.
const DENSE_LIMIT: usize = 1 << 24;

const ABSENT: u32 = u32::MAX;

type Code = SmallVec<[u32; 16]>;

/// An enumerated finite group.
///
/// Elements are the indices `0..order()`, index 0 is always the identity.
/// Each index carries a canonical fixed-width code (a permutation image
/// array, a digit vector, a tuple of component indices, ...) interpreted by
/// the group's law. Cloning is cheap; the element arena is shared.
#[derive(Clone)]
pub struct Group(Arc<Inner>);

struct Inner {
    law: Law,
    width: usize,
    codes: Vec<u32>,
    index: Index,
    inverses: Vec<u32>,
    generators: Vec<usize>,
    table: Option<Vec<u32>>,
    orders: OnceLock<Vec<u32>>,
}

/// How codes multiply.
pub(crate) enum Law {
    /// Image arrays on `0..width`; `(a*b)[k] = b[a[k]]` (apply `a` first).
    Permutation,
    /// Digit vectors in `⊕ Z/m_i`.
    Abelian { moduli: Vec<u32> },
    /// Central extension of `⊕ Z/d_i` by a bilinear cocycle.
    Cocycle(CocycleLaw),
    /// A user-supplied Cayley table over `0..order`.
    Table {
        order: usize,
        identity: u32,
        table: Vec<u32>,
    },
    /// Componentwise product; codes are tuples of component indices.
    Tuple { components: Vec<Group> },
    /// Elements of another group; codes are single parent indices. Used for
    /// subgroups (partial index) and quotients (index maps a whole coset).
    Parent { parent: Group },
}

/// Pairs `(x, z)` with `x ∈ ⊕ Z/d_i` and `z` in the multiplier slots.
#[derive(Clone, Debug)]
pub(crate) struct CocycleLaw {
    pub moduli: Vec<u32>,
    /// `(i, j, gcd(d_i, d_j))` for `i < j`, only slots with gcd > 1.
    pub slots: Vec<(usize, usize, u32)>,
    /// `(i, coefficient, slot)`: adds `c·x_i·y_i` into that slot.
    pub twist: Vec<(usize, u32, usize)>,
}

impl CocycleLaw {
    fn cocycle(&self, x: &[u32], y: &[u32], slot: usize) -> u64 {
        let (i, j, m) = self.slots[slot];
        let m = m as u64;
        let mut v = (x[j] as u64 % m) * (y[i] as u64 % m) % m;
        for &(t, c, s) in &self.twist {
            if s == slot {
                v = (v + c as u64 * (x[t] as u64 % m) % m * (y[t] as u64 % m)) % m;
            }
        }
        v
    }

    fn mul(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        let k = self.moduli.len();
        for (i, &d) in self.moduli.iter().enumerate() {
            out[i] = ((a[i] as u64 + b[i] as u64) % d as u64) as u32;
        }
        for (s, &(_, _, m)) in self.slots.iter().enumerate() {
            let m64 = m as u64;
            let z = a[k + s] as u64 + b[k + s] as u64 + self.cocycle(a, b, s);
            out[k + s] = (z % m64) as u32;
        }
    }

    fn invert(&self, a: &[u32], out: &mut [u32]) {
        let k = self.moduli.len();
        let mut neg: Code = SmallVec::from_elem(0, k);
        for (i, &d) in self.moduli.iter().enumerate() {
            neg[i] = (d - a[i] % d) % d;
            out[i] = neg[i];
        }
        // (x,z)(-x,w) = (0, z + w + φ(x,-x)) forces w = -z - φ(x,-x).
        for (s, &(_, _, m)) in self.slots.iter().enumerate() {
            let m64 = m as u64;
            let z = (a[k + s] as u64 + self.cocycle(a, &neg, s)) % m64;
            out[k + s] = ((m64 - z) % m64) as u32;
        }
    }

    pub fn code_radices(&self) -> Vec<usize> {
        self.moduli
            .iter()
            .map(|&d| d as usize)
            .chain(self.slots.iter().map(|&(_, _, m)| m as usize))
            .collect()
    }
}

impl Law {
    fn mul(&self, a: &[u32], b: &[u32], out: &mut [u32]) {
        match self {
            Law::Permutation => {
                for (o, &ai) in out.iter_mut().zip(a) {
                    *o = b[ai as usize];
                }
            }
            Law::Abelian { moduli } => {
                for (i, &m) in moduli.iter().enumerate() {
                    out[i] = (a[i] + b[i]) % m;
                }
            }
            Law::Cocycle(c) => c.mul(a, b, out),
            Law::Table { order, table, .. } => {
                out[0] = table[a[0] as usize * order + b[0] as usize];
            }
            Law::Tuple { components } => {
                for (i, g) in components.iter().enumerate() {
                    out[i] = g.mul(a[i] as usize, b[i] as usize) as u32;
                }
            }
            Law::Parent { parent } => {
                out[0] = parent.mul(a[0] as usize, b[0] as usize) as u32;
            }
        }
    }

    fn invert(&self, a: &[u32], out: &mut [u32]) {
        match self {
            Law::Permutation => {
                for (k, &ak) in a.iter().enumerate() {
                    out[ak as usize] = k as u32;
                }
            }
            Law::Abelian { moduli } => {
                for (i, &m) in moduli.iter().enumerate() {
                    out[i] = (m - a[i]) % m;
                }
            }
            Law::Cocycle(c) => c.invert(a, out),
            Law::Table {
                order,
                identity,
                table,
            } => {
                let row = &table[a[0] as usize * order..(a[0] as usize + 1) * order];
                out[0] = row.iter().position(|&v| v == *identity).unwrap_or(0) as u32;
            }
            Law::Tuple { components } => {
                for (i, g) in components.iter().enumerate() {
                    out[i] = g.inv(a[i] as usize) as u32;
                }
            }
            Law::Parent { parent } => out[0] = parent.inv(a[0] as usize) as u32,
        }
    }

    fn identity(&self, width: usize) -> Code {
        match self {
            Law::Permutation => (0..width as u32).collect(),
            Law::Table { identity, .. } => smallvec::smallvec![*identity],
            _ => SmallVec::from_elem(0, width),
        }
    }

    fn radices(&self, width: usize) -> Option<Vec<usize>> {
        match self {
            Law::Permutation => None,
            Law::Abelian { moduli } => Some(moduli.iter().map(|&m| m as usize).collect()),
            Law::Cocycle(c) => Some(c.code_radices()),
            Law::Table { order, .. } => Some(vec![*order]),
            Law::Tuple { components } => Some(components.iter().map(Group::order).collect()),
            Law::Parent { parent } => Some(vec![parent.order()]),
        }
        .filter(|r| r.len() == width)
    }
}

/// Maps codes to element indices.
enum Index {
    Dense {
        strides: Vec<usize>,
        slots: Vec<u32>,
    },
    Hashed(HashMap<Box<[u32]>, u32>),
}

impl Index {
    fn for_law(law: &Law, width: usize) -> Index {
        if let Some(radices) = law.radices(width) {
            let size = radices
                .iter()
                .try_fold(1usize, |acc, &r| acc.checked_mul(r.max(1)));
            if let Some(size) = size.filter(|&s| s <= DENSE_LIMIT) {
                let mut strides = vec![1usize; radices.len()];
                for i in (0..radices.len().saturating_sub(1)).rev() {
                    strides[i] = strides[i + 1] * radices[i + 1].max(1);
                }
                return Index::Dense {
                    strides,
                    slots: vec![ABSENT; size],
                };
            }
        }
        Index::Hashed(HashMap::new())
    }

    #[inline]
    fn get(&self, code: &[u32]) -> Option<usize> {
        match self {
            Index::Dense { strides, slots } => {
                let rank: usize = code
                    .iter()
                    .zip(strides)
                    .map(|(&c, &s)| c as usize * s)
                    .sum();
                match slots.get(rank) {
                    Some(&v) if v != ABSENT => Some(v as usize),
                    _ => None,
                }
            }
            Index::Hashed(map) => map.get(code).map(|&v| v as usize),
        }
    }

    fn insert(&mut self, code: &[u32], value: usize) {
        match self {
            Index::Dense { strides, slots } => {
                let rank: usize = code
                    .iter()
                    .zip(strides.iter())
                    .map(|(&c, &s)| c as usize * s)
                    .sum();
                slots[rank] = value as u32;
            }
            Index::Hashed(map) => {
                map.insert(code.into(), value as u32);
            }
        }
    }
}

/// Incremental arena used while enumerating.
pub(crate) struct Arena {
    law: Law,
    width: usize,
    codes: Vec<u32>,
    index: Index,
}

impl Arena {
    pub(crate) fn new(law: Law, width: usize) -> Arena {
        let index = Index::for_law(&law, width);
        Arena {
            law,
            width,
            codes: Vec::new(),
            index,
        }
    }

    pub(crate) fn with_capacity(law: Law, width: usize, capacity: usize) -> Arena {
        let mut a = Arena::new(law, width);
        a.codes.reserve(capacity * width);
        a
    }

    pub(crate) fn len(&self) -> usize {
        self.codes.len() / self.width
    }

    /// Appends `code` if new; returns its index either way.
    pub(crate) fn push(&mut self, code: &[u32]) -> (usize, bool) {
        if let Some(i) = self.index.get(code) {
            return (i, false);
        }
        let i = self.len();
        self.codes.extend_from_slice(code);
        self.index.insert(code, i);
        (i, true)
    }

    /// Appends `code` without a duplicate check.
    pub(crate) fn push_unchecked(&mut self, code: &[u32]) {
        let i = self.len();
        self.codes.extend_from_slice(code);
        self.index.insert(code, i);
    }

    pub(crate) fn code(&self, i: usize) -> &[u32] {
        &self.codes[i * self.width..(i + 1) * self.width]
    }

    /// Overrides the index entry for a non-canonical code (quotients).
    pub(crate) fn alias(&mut self, code: &[u32], value: usize) {
        self.index.insert(code, value);
    }

    pub(crate) fn finish(self, generators: Vec<usize>) -> Group {
        Group::assemble(self, generators)
    }
}

impl Group {
    fn assemble(arena: Arena, generators: Vec<usize>) -> Group {
        let Arena {
            law,
            width,
            codes,
            index,
        } = arena;
        debug_assert!(width > 0, "codes have at least one coordinate");
        let order = codes.len() / width;
        let mut inner = Inner {
            law,
            width,
            codes,
            index,
            inverses: Vec::new(),
            generators: Vec::new(),
            table: None,
            orders: OnceLock::new(),
        };
        let mut buf: Code = SmallVec::from_elem(0, width);
        let mut inverses = Vec::with_capacity(order);
        for i in 0..order {
            inner.law.invert(inner.code(i), &mut buf);
            inverses.push(inner.index.get(&buf).expect("inverse lies in the group") as u32);
        }
        inner.inverses = inverses;
        let mut gens: Vec<usize> = Vec::new();
        for g in generators {
            if g != 0 && !gens.contains(&g) {
                gens.push(g);
            }
        }
        inner.generators = gens;
        if order <= TABLE_LIMIT {
            let mut table = Vec::with_capacity(order * order);
            for a in 0..order {
                for b in 0..order {
                    table.push(inner.mul_slow(a, b, &mut buf) as u32);
                }
            }
            inner.table = Some(table);
        }
        Group(Arc::new(inner))
    }

    /// Breadth-first closure of `generators` under `law`, in generator order.
    pub(crate) fn closure(
        law: Law,
        width: usize,
        generators: &[Vec<u32>],
        limits: &Limits,
    ) -> Result<Group> {
        let mut arena = Arena::new(law, width);
        let identity = arena.law.identity(width);
        arena.push(&identity);
        let mut gen_idx = Vec::with_capacity(generators.len());
        let mut buf: Code = SmallVec::from_elem(0, width);
        let mut head = 0;
        // Generators themselves are reached from the identity in the first layer.
        while head < arena.len() {
            for g in generators {
                arena.law.mul(arena.code(head), g, &mut buf);
                let (_, fresh) = arena.push(&buf);
                if fresh {
                    limits.check(arena.len() as u128)?;
                }
            }
            head += 1;
        }
        for g in generators {
            gen_idx.push(arena.index.get(g).expect("generator enumerated"));
        }
        Ok(arena.finish(gen_idx))
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn generators(&self) -> &[usize] {
        &self.0.generators
    }

    /// Canonical code of element `i`.
    pub fn code(&self, i: usize) -> &[u32] {
        self.0.code(i)
    }

    /// Index of the element with the given code, if it lies in the group.
    pub fn index_of(&self, code: &[u32]) -> Option<usize> {
        if code.len() != self.0.width {
            return None;
        }
        self.0.index.get(code)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.0.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => {
                let mut buf: Code = SmallVec::from_elem(0, self.0.width);
                self.0.mul_slow(a, b, &mut buf)
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.0.inverses[a] as usize
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut base = a;
        let mut acc = 0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// `g⁻¹ a g`.
    pub fn conjugate(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    pub fn commutes(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .enumerate()
            .all(|(i, &a)| gens[i + 1..].iter().all(|&b| self.commutes(a, b)))
    }

    /// Orders of all elements, computed once.
    pub fn element_orders(&self) -> &[u32] {
        self.0.orders.get_or_init(|| {
            let n = self.order();
            let mut orders = vec![0u32; n];
            let mut powers = Vec::new();
            for x in 0..n {
                if orders[x] != 0 {
                    continue;
                }
                powers.clear();
                powers.push(0usize);
                let mut y = x;
                while y != 0 {
                    powers.push(y);
                    y = self.mul(y, x);
                }
                let ord = powers.len().max(1) as u64;
                // ord(x^k) = ord / gcd(k, ord)
                for (k, &p) in powers.iter().enumerate() {
                    if orders[p] == 0 {
                        orders[p] = (ord / gcd(k as u64, ord)) as u32;
                    }
                }
            }
            orders
        })
    }

    pub fn element_order(&self, a: usize) -> u32 {
        self.element_orders()[a]
    }

    /// Components of a tuple-law group (direct products and K-groups).
    pub fn components(&self) -> Option<&[Group]> {
        match &self.0.law {
            Law::Tuple { components } => Some(components),
            _ => None,
        }
    }

    /// The group whose indices this group's codes refer to, for subgroups
    /// materialized as groups and for quotients.
    pub fn parent(&self) -> Option<&Group> {
        match &self.0.law {
            Law::Parent { parent } => Some(parent),
            _ => None,
        }
    }

    pub fn ptr_eq(&self, other: &Group) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// True when both groups have the same law parameters and the same
    /// canonical codes in the same order, i.e. they are the same enumerated
    /// model even if built separately.
    pub fn same_model(&self, other: &Group) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.order() != other.order() || self.0.width != other.0.width {
            return false;
        }
        let laws_match = match (&self.0.law, &other.0.law) {
            (Law::Permutation, Law::Permutation) => true,
            (Law::Abelian { moduli: a }, Law::Abelian { moduli: b }) => a == b,
            (Law::Cocycle(a), Law::Cocycle(b)) => {
                a.moduli == b.moduli && a.slots == b.slots && a.twist == b.twist
            }
            (Law::Table { table: a, .. }, Law::Table { table: b, .. }) => a == b,
            (Law::Tuple { components: a }, Law::Tuple { components: b }) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_model(y))
            }
            (Law::Parent { parent: a }, Law::Parent { parent: b }) => a.same_model(b),
            _ => false,
        };
        laws_match && self.0.codes == other.0.codes
    }

    /// Short description of the element model.
    pub fn model_name(&self) -> &'static str {
        match &self.0.law {
            Law::Permutation => "permutation",
            Law::Abelian { .. } => "abelian",
            Law::Cocycle(_) => "cocycle",
            Law::Table { .. } => "cayley",
            Law::Tuple { .. } => "tuple",
            Law::Parent { .. } => "subquotient",
        }
    }

    /// Moduli of an abelian digit-vector model.
    pub fn abelian_moduli(&self) -> Option<&[u32]> {
        match &self.0.law {
            Law::Abelian { moduli } => Some(moduli),
            _ => None,
        }
    }

    /// Builds the group on an explicit element list (identity first); the
    /// caller guarantees closure.
    pub(crate) fn from_arena(arena: Arena, generators: Vec<usize>) -> Group {
        Group::assemble(arena, generators)
    }

    /// Breadth-first enumeration of the subgroup generated by `gens`, used
    /// when only membership order matters.
    pub(crate) fn bfs_members(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out
    }
}

impl Inner {
    fn order(&self) -> usize {
        self.codes.len() / self.width
    }

    #[inline]
    fn code(&self, i: usize) -> &[u32] {
        &self.codes[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    fn mul_slow(&self, a: usize, b: usize, buf: &mut [u32]) -> usize {
        self.law.mul(self.code(a), self.code(b), buf);
        self.index
            .get(buf)
            .expect("group is closed under multiplication")
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("model", &self.model_name())
            .field("order", &self.order())
            .field("generators", &self.generators())
            .finish()
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: u32) -> Group {
        Group::closure(
            Law::Abelian { moduli: vec![n] },
            1,
            &[vec![1]],
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn closure_enumerates_cyclic() {
        let g = cyclic(6);
        assert_eq!(g.order(), 6);
        assert_eq!(g.code(0), &[0]);
        assert_eq!(g.element_orders(), &[1, 6, 3, 2, 3, 6]);
        assert_eq!(g.pow(1, 6), 0);
    }

    #[test]
    fn permutation_law_applies_left_first() {
        // (1 2) then (2 3): 1 -> 2 -> 3
        let law = Law::Permutation;
        let mut out = [0u32; 3];
        law.mul(&[1, 0, 2], &[0, 2, 1], &mut out);
        assert_eq!(out, [2, 0, 1]);
    }

    #[test]
    fn budget_is_enforced_during_closure() {
        let limits = Limits::default().with_elements(4);
        let err = Group::closure(Law::Abelian { moduli: vec![7] }, 1, &[vec![1]], &limits);
        assert!(matches!(err, Err(crate::Error::BudgetExceeded { .. })));
    }

    #[test]
    fn cocycle_inverse_is_two_sided() {
        let law = CocycleLaw {
            moduli: vec![3, 3],
            slots: vec![(0, 1, 3)],
            twist: vec![],
        };
        let g = Group::closure(
            Law::Cocycle(law),
            3,
            &[vec![1, 0, 0], vec![0, 1, 0]],
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(g.order(), 27);
        for x in 0..g.order() {
            assert_eq!(g.mul(x, g.inv(x)), 0);
            assert_eq!(g.mul(g.inv(x), x), 0);
        }
        assert!(!g.is_abelian());
    }
}
