use crate::engine::group::{Arena, Group, Law};
use crate::engine::hom::Homomorphism;
use crate::engine::spec::odometer;
use crate::engine::subgroup::{derived_subgroup, Subgroup};
use crate::{Error, Limits, Result};

/// `K(G, n)`: tuples in `G^n` whose product lies in `[G, G]`.
///
/// The group is enumerated directly as a tuple-model group; the ambient
/// `G^n` is never materialized.
#[derive(Clone, Debug)]
pub struct KGroup {
    base: Group,
    n: usize,
    group: Group,
    derived: Subgroup,
}

/// Predicted `|G|^{n-1}·|[G,G]|`.
pub fn k_order(order: usize, derived_order: usize, n: usize) -> u128 {
    (order as u128).pow(n as u32 - 1) * derived_order as u128
}

/// Enumerates `K(g, n)`: free choice of the first `n-1` coordinates, then
/// the last coordinate ranges over the `[G,G]`-coset forced by the product.
/// Indices are lexicographic in the free coordinates, then by the sorted
/// members of `[G,G]`.
pub fn k_group(g: &Group, n: usize, limits: &Limits) -> Result<KGroup> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let derived = derived_subgroup(g);
    let order = k_order(g.order(), derived.order(), n);
    limits.check(order)?;
    let commutators: Vec<usize> = derived.members().collect();
    let mut arena = Arena::with_capacity(
        Law::Tuple {
            components: vec![g.clone(); n],
        },
        n,
        order as usize,
    );
    let radices = vec![g.order() as u32; n - 1];
    let mut free = vec![0u32; n - 1];
    let mut tuple = vec![0u32; n];
    let prefixes = (g.order() as u128).pow(n as u32 - 1);
    for _ in 0..prefixes {
        let p = free.iter().fold(0, |acc, &x| g.mul(acc, x as usize));
        let p_inv = g.inv(p);
        tuple[..n - 1].copy_from_slice(&free);
        for &c in &commutators {
            tuple[n - 1] = g.mul(p_inv, c) as u32;
            arena.push_unchecked(&tuple);
        }
        odometer(&mut free, &radices);
    }
    let mut gens = Vec::new();
    let mut push_gen = |arena: &mut Arena, t: &[u32]| gens.push(arena.push(t).0);
    for i in 0..n - 1 {
        for &x in g.generators() {
            let mut t = vec![0u32; n];
            t[i] = x as u32;
            t[n - 1] = g.inv(x) as u32;
            push_gen(&mut arena, &t);
        }
    }
    for &c in derived.generators() {
        let mut t = vec![0u32; n];
        t[n - 1] = c as u32;
        push_gen(&mut arena, &t);
    }
    let group = Group::from_arena(arena, gens);
    Ok(KGroup {
        base: g.clone(),
        n,
        group,
        derived,
    })
}

impl KGroup {
    pub fn base(&self) -> &Group {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// `[G, G]` inside the base.
    pub fn base_derived(&self) -> &Subgroup {
        &self.derived
    }

    /// Base indices of the coordinates of element `x`.
    pub fn tuple(&self, x: usize) -> &[u32] {
        self.group.code(x)
    }

    pub fn index_of_tuple(&self, t: &[u32]) -> Option<usize> {
        self.group.index_of(t)
    }

    /// The membership criterion, evaluated from scratch.
    pub fn satisfies_criterion(&self, t: &[u32]) -> bool {
        let g = &self.base;
        t.len() == self.n
            && t.iter().all(|&x| (x as usize) < g.order())
            && self
                .derived
                .contains(t.iter().fold(0, |acc, &x| g.mul(acc, x as usize)))
    }

    /// Element with `x` in coordinate `i` and the identity elsewhere, if it
    /// lies in `K`.
    pub fn embed(&self, i: usize, x: usize) -> Option<usize> {
        let mut t = vec![0u32; self.n];
        t[i] = x as u32;
        self.group.index_of(&t)
    }

    /// Projection onto coordinate `k`; surjective for every `k`.
    pub fn coordinate(&self, k: usize) -> Homomorphism {
        let map = (0..self.order()).map(|x| self.tuple(x)[k]).collect();
        Homomorphism::new_unchecked(self.group.clone(), self.base.clone(), map)
    }

    /// Elements whose coordinates all lie in `h` (`K(H, n)` for normal `H`
    /// with `[H,H]` taken inside `H`).
    pub fn restrict_to(&self, h: &Subgroup) -> Result<Subgroup> {
        let h_derived = derived_subgroup(&h.as_group());
        let in_h_derived: Vec<bool> = {
            let members: Vec<usize> = h.members().collect();
            let mut mask = vec![false; self.base.order()];
            for m in h_derived.members() {
                mask[members[m]] = true;
            }
            mask
        };
        let g = &self.base;
        let members = (0..self.order()).filter(|&x| {
            let t = self.tuple(x);
            t.iter().all(|&c| h.contains(c as usize))
                && in_h_derived[t.iter().fold(0, |acc, &c| g.mul(acc, c as usize))]
        });
        Subgroup::from_members(&self.group, members)
    }
}

/// The map `K(G, n) → K(H, n)` induced componentwise by `h: G → H`.
pub fn k_functorial(h: &Homomorphism, source: &KGroup, target: &KGroup) -> Result<Homomorphism> {
    if source.n != target.n {
        return Err(Error::Precondition("K-groups have different n".into()));
    }
    if !source.base.same_model(h.source()) || !target.base.same_model(h.target()) {
        return Err(Error::Precondition(
            "homomorphism does not match the K-group bases".into(),
        ));
    }
    let mut image = vec![0u32; source.n];
    let map = (0..source.order())
        .map(|x| {
            for (o, &c) in image.iter_mut().zip(source.tuple(x)) {
                *o = h.apply(c as usize) as u32;
            }
            target
                .index_of_tuple(&image)
                .map(|y| y as u32)
                .ok_or_else(|| {
                    Error::NotHomomorphism(format!(
                        "image of element {x} is not in the target K-group"
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Homomorphism::new(source.group.clone(), target.group.clone(), map)
}
