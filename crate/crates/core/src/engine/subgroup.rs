use std::fmt;

use super::group::{Arena, Group, Law};
use super::hom::Homomorphism;
use crate::{Error, Result};

/// A subgroup of an enumerated group, stored as a sorted index set.
#[derive(Clone)]
pub struct Subgroup {
    parent: Group,
    members: Vec<u32>,
    mask: Vec<bool>,
    generators: Vec<usize>,
    normal: bool,
}

/// Incremental subgroup closure inside a fixed parent.
pub(crate) struct ClosureBuilder<'g> {
    group: &'g Group,
    mask: Vec<bool>,
    members: Vec<usize>,
    gens: Vec<usize>,
}

impl<'g> ClosureBuilder<'g> {
    pub(crate) fn new(group: &'g Group) -> Self {
        let mut mask = vec![false; group.order()];
        mask[0] = true;
        ClosureBuilder {
            group,
            mask,
            members: vec![0],
            gens: Vec::new(),
        }
    }

    pub(crate) fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    pub(crate) fn len(&self) -> usize {
        self.members.len()
    }

    /// Adds `x` as a generator; returns false if it was already a member.
    ///
    /// Old members are closed under the old generators, so only their
    /// products with `x` need visiting; new members are multiplied by all
    /// generators.
    pub(crate) fn add(&mut self, x: usize) -> bool {
        if self.mask[x] {
            return false;
        }
        self.gens.push(x);
        let g = self.group;
        let old = self.members.len();
        let mut head = old;
        for i in 0..old {
            let y = g.mul(self.members[i], x);
            if !self.mask[y] {
                self.mask[y] = true;
                self.members.push(y);
            }
        }
        while head < self.members.len() {
            let m = self.members[head];
            for k in 0..self.gens.len() {
                let y = g.mul(m, self.gens[k]);
                if !self.mask[y] {
                    self.mask[y] = true;
                    self.members.push(y);
                }
            }
            head += 1;
        }
        true
    }

    pub(crate) fn add_all(&mut self, xs: impl IntoIterator<Item = usize>) {
        for x in xs {
            self.add(x);
        }
    }

    /// Keeps adding conjugates of generators by the parent generators until
    /// the subgroup is normal.
    pub(crate) fn normalize(&mut self) {
        let g = self.group;
        let mut next = 0;
        while next < self.gens.len() {
            let s = self.gens[next];
            for &t in g.generators() {
                let c = g.conjugate(s, t);
                self.add(c);
            }
            next += 1;
        }
    }

    pub(crate) fn finish(self, normal: Option<bool>) -> Subgroup {
        let ClosureBuilder {
            group, mask, gens, ..
        } = self;
        let members: Vec<u32> = mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i as u32)
            .collect();
        let mut sub = Subgroup {
            parent: group.clone(),
            members,
            mask,
            generators: gens,
            normal: false,
        };
        sub.normal = normal.unwrap_or_else(|| sub.check_normal());
        sub
    }
}

impl Subgroup {
    /// The subgroup consisting of `members`, which must already be closed.
    pub fn from_members(parent: &Group, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: Vec<usize> = members.into_iter().collect();
        let mut b = ClosureBuilder::new(parent);
        for &m in &members {
            b.add(m);
        }
        let mut distinct = members.clone();
        distinct.push(0);
        distinct.sort_unstable();
        distinct.dedup();
        if b.len() != distinct.len() {
            return Err(Error::Precondition(
                "member set is not closed under multiplication".into(),
            ));
        }
        Ok(b.finish(None))
    }

    pub fn trivial(parent: &Group) -> Self {
        ClosureBuilder::new(parent).finish(Some(true))
    }

    pub fn whole(parent: &Group) -> Self {
        let mut b = ClosureBuilder::new(parent);
        b.add_all(parent.generators().iter().copied());
        b.finish(Some(true))
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.members.iter().map(|&m| m as usize)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members().all(|m| other.contains(m))
    }

    pub fn same_members(&self, other: &Subgroup) -> bool {
        self.members == other.members
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let mut b = ClosureBuilder::new(&self.parent);
        for m in self.members().filter(|&m| other.contains(m)) {
            b.add(m);
        }
        b.finish(if self.normal && other.normal {
            Some(true)
        } else {
            None
        })
    }

    /// Whether every element of the subgroup commutes with every parent
    /// element.
    pub fn is_central(&self) -> bool {
        let g = &self.parent;
        self.generators
            .iter()
            .all(|&s| g.generators().iter().all(|&t| g.commutes(s, t)))
    }

    fn check_normal(&self) -> bool {
        let g = &self.parent;
        self.generators
            .iter()
            .all(|&s| g.generators().iter().all(|&t| self.mask[g.conjugate(s, t)]))
    }

    /// The subgroup as a group in its own right; element `k` of the result is
    /// the `k`-th smallest member.
    pub fn as_group(&self) -> Group {
        let mut arena = Arena::with_capacity(
            Law::Parent {
                parent: self.parent.clone(),
            },
            1,
            self.members.len(),
        );
        for &m in &self.members {
            arena.push_unchecked(&[m]);
        }
        let gens = self
            .generators
            .iter()
            .map(|&g| {
                self.members
                    .binary_search(&(g as u32))
                    .expect("generator is a member")
            })
            .collect();
        Group::from_arena(arena, gens)
    }

    /// The inclusion of [`Subgroup::as_group`] into the parent.
    pub fn inclusion(&self) -> Homomorphism {
        let source = self.as_group();
        Homomorphism::new_unchecked(source, self.parent.clone(), self.members.clone())
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("order", &self.order())
            .field("parent_order", &self.parent.order())
            .field("normal", &self.normal)
            .finish()
    }
}

/// Smallest subgroup containing `gens`.
pub fn subgroup_closure(g: &Group, gens: &[usize]) -> Subgroup {
    let mut b = ClosureBuilder::new(g);
    b.add_all(gens.iter().copied());
    b.finish(None)
}

/// Smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &Group, gens: &[usize]) -> Subgroup {
    let mut b = ClosureBuilder::new(g);
    b.add_all(gens.iter().copied());
    b.normalize();
    b.finish(Some(true))
}

/// `[G, G]`, the normal closure of commutators of generators.
pub fn derived_subgroup(g: &Group) -> Subgroup {
    let gens = g.generators();
    let mut seeds = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            seeds.push(g.commutator(a, b));
        }
    }
    normal_closure(g, &seeds)
}

/// `[H, G]` for a normal subgroup `H`.
pub fn commutator_with_whole(h: &Subgroup) -> Subgroup {
    let g = h.parent();
    let mut seeds = Vec::new();
    for &a in h.generators() {
        for &b in g.generators() {
            seeds.push(g.commutator(a, b));
        }
    }
    normal_closure(g, &seeds)
}

/// `Z(G)`: elements commuting with every generator.
pub fn centre(g: &Group) -> Subgroup {
    let gens = g.generators();
    let mut b = ClosureBuilder::new(g);
    for x in 0..g.order() {
        if !b.contains(x) && gens.iter().all(|&t| g.commutes(x, t)) {
            b.add(x);
        }
    }
    b.finish(Some(true))
}

/// Quotient by a normal subgroup. Cosets are numbered in order of their
/// least member, which is also the canonical representative.
pub fn quotient(g: &Group, n: &Subgroup) -> Result<(Group, Homomorphism)> {
    if !n.parent().ptr_eq(g) {
        return Err(Error::Precondition(
            "subgroup belongs to another group".into(),
        ));
    }
    if !n.is_normal() {
        return Err(Error::NotNormal);
    }
    const UNSET: u32 = u32::MAX;
    let order = g.order();
    let mut coset_of = vec![UNSET; order];
    let mut reps = Vec::with_capacity(order / n.order());
    for x in 0..order {
        if coset_of[x] != UNSET {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(x as u32);
        for m in n.members() {
            coset_of[g.mul(x, m)] = id;
        }
    }
    let mut arena = Arena::with_capacity(Law::Parent { parent: g.clone() }, 1, reps.len());
    for &r in &reps {
        arena.push_unchecked(&[r]);
    }
    for (x, &c) in coset_of.iter().enumerate() {
        arena.alias(&[x as u32], c as usize);
    }
    let gens = g
        .generators()
        .iter()
        .map(|&x| coset_of[x] as usize)
        .collect();
    let q = Group::from_arena(arena, gens);
    let projection = Homomorphism::new_unchecked(g.clone(), q.clone(), coset_of);
    Ok((q, projection))
}
