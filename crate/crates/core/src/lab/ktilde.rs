use super::kgroup::{k_group, KGroup};
use crate::abelian::{build_cocycle_cover, canonical_cover_of, AbelianType, Cover, Provenance};
use crate::engine::group::Group;
use crate::engine::hom::Homomorphism;
use crate::engine::spec::direct_product;
use crate::engine::subgroup::{
    normal_closure, quotient, subgroup_closure, ClosureBuilder, Subgroup,
};
use crate::{Error, Limits, Result};

/// `K̃(G, n)` computed as `K(G*, n) / K(M, n)` from a cover `G*`.
#[derive(Clone, Debug)]
pub struct KTildeResult {
    group: Group,
    h2_image: Subgroup,
    onto_k: Homomorphism,
    cover: Cover,
    k: KGroup,
    k_total: KGroup,
    projection: Homomorphism,
}

/// Builds `K̃(g, n)`. Without a cover, `g` must be abelian and the canonical
/// cocycle cover is used.
pub fn ktilde(g: &Group, n: usize, cover: Option<&Cover>, limits: &Limits) -> Result<KTildeResult> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let cover = match cover {
        Some(c) => {
            if !c.base().same_model(g) {
                return Err(Error::Precondition(
                    "cover base is not the given group".into(),
                ));
            }
            c.clone()
        }
        None if g.is_abelian() => canonical_cover_of(g, limits)?,
        None => {
            return Err(Error::Precondition(
                "a non-abelian group needs a user-supplied cover".into(),
            ))
        }
    };
    let total = cover.total();
    let m = cover.kernel();
    let k_total = k_group(total, n, limits)?;
    let k_m = k_total.restrict_to(m)?;
    let (group, projection) = quotient(k_total.group(), &k_m)?;
    let k = k_group(cover.base(), n, limits)?;

    let pi = cover.projection();
    let mut image = vec![0u32; n];
    let map = (0..group.order())
        .map(|q| {
            let rep = group.code(q)[0] as usize;
            for (o, &c) in image.iter_mut().zip(k_total.tuple(rep)) {
                *o = pi.apply(c as usize) as u32;
            }
            k.index_of_tuple(&image)
                .map(|y| y as u32)
                .ok_or_else(|| Error::InvalidCover("projected tuple is not in K(G, n)".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let onto_k = Homomorphism::new(group.clone(), k.group().clone(), map)?;

    let seeds: Vec<usize> = m
        .generators()
        .iter()
        .map(|&x| projection.apply(k_total.embed(0, x).expect("(m,1,...,1) lies in K")))
        .collect();
    let h2_image = subgroup_closure(&group, &seeds);

    Ok(KTildeResult {
        group,
        h2_image,
        onto_k,
        cover,
        k,
        k_total,
        projection,
    })
}

impl KTildeResult {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Image of `{(m, 1, ..., 1) : m ∈ M}`.
    pub fn h2_image(&self) -> &Subgroup {
        &self.h2_image
    }

    /// `K̃(G, n) → K(G, n)`.
    pub fn onto_k(&self) -> &Homomorphism {
        &self.onto_k
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn cover_used(&self) -> &Provenance {
        self.cover.provenance()
    }

    pub fn k(&self) -> &KGroup {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    /// `K(G*, n)`.
    pub fn k_total(&self) -> &KGroup {
        &self.k_total
    }

    /// `K(G*, n) → K̃(G, n)`.
    pub fn projection(&self) -> &Homomorphism {
        &self.projection
    }

    /// Representative tuple (in `G*`) of element `x`.
    pub fn representative(&self, x: usize) -> &[u32] {
        self.k_total.tuple(self.group.code(x)[0] as usize)
    }
}

/// The natural cover of an odd-order abelian group: the subquotient
/// `⟨(g, g⁻¹), (m, 1)⟩ / ⟨(m, m⁻¹)⟩` of `G* × G*` for the canonical cocycle
/// cover `G*`, projected to `G` through the first coordinate.
pub fn natural_cover(a: &AbelianType, limits: &Limits) -> Result<Cover> {
    if a.order().is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "natural covers are only constructed for odd order, {a} has order {}",
            a.order()
        )));
    }
    let cocycle = build_cocycle_cover(a, None, limits)?;
    let total = cocycle.total();
    let m = cocycle.kernel();
    let square = direct_product(total, total, limits)?;
    let pair = |x: usize, y: usize| {
        square
            .index_of(&[x as u32, y as u32])
            .expect("pair in square")
    };

    let mut b = ClosureBuilder::new(&square);
    for &g in total.generators() {
        b.add(pair(g, total.inv(g)));
    }
    for &x in m.generators() {
        b.add(pair(x, 0));
    }
    let h = b.finish(None).as_group();
    // member index of a square element inside `h`
    let square_to_h = |s: usize| h.index_of(&[s as u32]).expect("element of the subgroup");
    let anti: Vec<usize> = m
        .generators()
        .iter()
        .map(|&x| square_to_h(pair(x, total.inv(x))))
        .collect();
    let n = normal_closure(&h, &anti);
    let (q, _) = quotient(&h, &n)?;

    let pi = cocycle.projection();
    let map = (0..q.order())
        .map(|x| {
            let in_h = q.code(x)[0] as usize;
            let in_square = h.code(in_h)[0] as usize;
            pi.apply(square.code(in_square)[0] as usize) as u32
        })
        .collect();
    let projection = Homomorphism::new(q, cocycle.base().clone(), map)?;
    Cover::new(projection, Provenance::Natural, None)
}

/// Coordinate permutations fixing the first coordinate, acting on a K- or
/// K̃-group.
pub trait CoordinateAction {
    fn acting_group(&self) -> &Group;
    fn degree(&self) -> usize;
    /// Image of element `x` under `perm` (a permutation of `0..degree`
    /// fixing 0): coordinate `i` moves to position `perm[i]`.
    fn permute(&self, x: usize, perm: &[usize]) -> usize;
    /// The group that the quotient should recover.
    fn base(&self) -> &Group;
}

impl CoordinateAction for KGroup {
    fn acting_group(&self) -> &Group {
        self.group()
    }

    fn degree(&self) -> usize {
        self.n()
    }

    fn permute(&self, x: usize, perm: &[usize]) -> usize {
        let t = self.tuple(x);
        let mut out = vec![0u32; t.len()];
        for (i, &c) in t.iter().enumerate() {
            out[perm[i]] = c;
        }
        self.index_of_tuple(&out)
            .expect("K is closed under coordinate permutations")
    }

    fn base(&self) -> &Group {
        KGroup::base(self)
    }
}

impl CoordinateAction for KTildeResult {
    fn acting_group(&self) -> &Group {
        &self.group
    }

    fn degree(&self) -> usize {
        self.n()
    }

    fn permute(&self, x: usize, perm: &[usize]) -> usize {
        let rep = self.group.code(x)[0] as usize;
        let moved = self.k_total.permute(rep, perm);
        self.projection.apply(moved)
    }

    fn base(&self) -> &Group {
        self.cover.base()
    }
}

/// All permutations of `0..n` fixing 0, in lexicographic order.
pub fn first_fixing_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(&mut vec![0], &mut (1..n).collect(), &mut out);
    out
}

/// Quotient by the normal closure of `{x·σ(x⁻¹)}` over all elements `x` and
/// all `σ ∈ S_{n-1}` fixing the first coordinate.
pub fn sn_recover(k: &impl CoordinateAction) -> Result<Group> {
    let n = k.degree();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "recovery needs n ≥ 3, got {n}"
        )));
    }
    let g = k.acting_group();
    let perms = first_fixing_permutations(n);
    let mut b = ClosureBuilder::new(g);
    for x in 0..g.order() {
        let x_inv = g.inv(x);
        for p in &perms {
            b.add(g.mul(x, k.permute(x_inv, p)));
        }
    }
    b.normalize();
    let nsub = b.finish(Some(true));
    Ok(quotient(g, &nsub)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::recognize_abelian;
    use crate::engine::iso::{is_isomorphic, IsoVerdict};
    use crate::engine::spec::{load_group, GroupSpec};
    use crate::engine::structure::exponent;

    fn ab(d: &[u32]) -> Group {
        load_group(&GroupSpec::abelian(d), &Limits::default()).unwrap()
    }

    fn t(d: &[u64]) -> AbelianType {
        AbelianType::from_divisors(d).unwrap()
    }

    #[test]
    fn heisenberg_from_z3_squared() {
        let r = ktilde(&ab(&[3, 3]), 2, None, &Limits::default()).unwrap();
        assert_eq!(r.order(), 27);
        assert_eq!(exponent(r.group()), 3);
        assert!(!r.group().is_abelian());
        assert_eq!(r.h2_image().order(), 3);
        assert_eq!(r.cover_used().tag(), "canonical-cocycle");
    }

    #[test]
    fn cyclic_ktilde_is_a_power() {
        let r = ktilde(&ab(&[4]), 3, None, &Limits::default()).unwrap();
        assert_eq!(recognize_abelian(r.group()).unwrap(), t(&[4, 4]));
    }

    #[test]
    fn klein_four_ktilde() {
        let r = ktilde(&ab(&[2, 2]), 2, None, &Limits::default()).unwrap();
        assert_eq!(recognize_abelian(r.group()).unwrap(), t(&[2, 2, 2]));
    }

    #[test]
    fn exactness_of_the_sequence() {
        let r = ktilde(&ab(&[3, 3]), 3, None, &Limits::default()).unwrap();
        assert_eq!(r.order(), r.h2_image().order() * r.k().order());
        assert!(r.onto_k().is_surjective());
        assert!(r.onto_k().kernel().same_members(r.h2_image()));
        assert!(r.h2_image().is_central());
    }

    #[test]
    fn natural_covers() {
        let l = Limits::default();
        let c = natural_cover(&t(&[3, 3]), &l).unwrap();
        assert_eq!(c.total().order(), 27);
        assert_eq!(exponent(c.total()), 3);
        let k = ktilde(&ab(&[3, 3]), 2, None, &l).unwrap();
        assert_eq!(
            is_isomorphic(c.total(), k.group(), &l),
            IsoVerdict::Isomorphic
        );
        let c = natural_cover(&t(&[15]), &l).unwrap();
        assert_eq!(recognize_abelian(c.total()).unwrap(), t(&[15]));
        assert!(natural_cover(&t(&[2, 2]), &l).is_err());
    }

    #[test]
    fn recovery_from_coordinates() {
        let l = Limits::default();
        let z3 = ab(&[3]);
        let k = k_group(&z3, 3, &l).unwrap();
        let q = sn_recover(&k).unwrap();
        assert_eq!(is_isomorphic(&q, &z3, &l), IsoVerdict::Isomorphic);
        assert!(sn_recover(&k_group(&z3, 2, &l).unwrap()).is_err());
    }

    #[test]
    fn permutations_fixing_the_first_point() {
        let p = first_fixing_permutations(4);
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|s| s[0] == 0));
        assert_eq!(p[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn non_abelian_needs_cover() {
        let s3 = load_group(
            &GroupSpec::permutation(3, &["(1 2 3)", "(1 2)"]).unwrap(),
            &Limits::default(),
        )
        .unwrap();
        assert!(matches!(
            ktilde(&s3, 2, None, &Limits::default()),
            Err(Error::Precondition(_))
        ));
    }
}
