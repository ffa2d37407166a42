use std::collections::{BTreeMap, HashSet};

use serde::{Serialize, Serializer};

use super::group::{lcm, Group};
use super::subgroup::{
    centre, commutator_with_whole, derived_subgroup, normal_closure, ClosureBuilder, Subgroup,
};
use crate::abelian::{factorize, recognize_abelian, AbelianType};
use crate::engine::subgroup::quotient;
use crate::{Error, Limits, Result};

/// Subgroup lattices explored by the Frattini fallback are capped here.
const MAX_LATTICE: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub order: usize,
    pub exponent: u64,
    /// `None` (serialized as -1) for non-nilpotent groups; 0 for the trivial group.
    #[serde(serialize_with = "minus_one_if_none")]
    pub nilpotency_class: Option<usize>,
    /// `None` (serialized as -1) for non-solvable groups.
    #[serde(serialize_with = "minus_one_if_none")]
    pub derived_length: Option<usize>,
    pub is_perfect: bool,
    pub is_abelian: bool,
    pub centre_order: usize,
    pub derived_order: usize,
    /// `None` when the Frattini subgroup is beyond the fallback bound.
    pub frattini_order: Option<usize>,
    pub abelianization: AbelianType,
    pub element_order_histogram: BTreeMap<u32, usize>,
}

fn minus_one_if_none<S: Serializer>(
    v: &Option<usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_i64(*x as i64),
        None => s.serialize_i64(-1),
    }
}

pub fn exponent(g: &Group) -> u64 {
    g.element_orders()
        .iter()
        .fold(1u64, |acc, &o| lcm(acc, o as u64))
}

pub fn order_histogram(g: &Group) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &o in g.element_orders() {
        *h.entry(o).or_insert(0) += 1;
    }
    h
}

/// `G = γ_1 ≥ γ_2 ≥ ...` until it stabilizes; the last term is either
/// trivial (nilpotent) or a repeated non-trivial term.
pub fn lower_central_series(g: &Group) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(g)];
    loop {
        let last = series.last().expect("non-empty");
        if last.is_trivial() {
            break;
        }
        let next = commutator_with_whole(last);
        if next.order() == last.order() {
            break;
        }
        series.push(next);
    }
    series
}

/// `G ≥ G' ≥ G'' ≥ ...` until it stabilizes.
pub fn derived_series(g: &Group) -> Vec<Subgroup> {
    let mut series = vec![Subgroup::whole(g)];
    loop {
        let last = series.last().expect("non-empty");
        if last.is_trivial() {
            break;
        }
        let gens = last.generators();
        let mut seeds = Vec::new();
        for (i, &a) in gens.iter().enumerate() {
            for &b in &gens[i + 1..] {
                seeds.push(g.commutator(a, b));
            }
        }
        // characteristic in a normal subgroup, so closing in G suffices
        let next = normal_closure(g, &seeds);
        if next.order() == last.order() {
            break;
        }
        series.push(next);
    }
    series
}

pub fn nilpotency_class(g: &Group) -> Option<usize> {
    let series = lower_central_series(g);
    series
        .last()
        .expect("non-empty")
        .is_trivial()
        .then(|| series.len() - 1)
}

pub fn derived_length(g: &Group) -> Option<usize> {
    let series = derived_series(g);
    series
        .last()
        .expect("non-empty")
        .is_trivial()
        .then(|| series.len() - 1)
}

pub fn is_nilpotent(g: &Group) -> bool {
    nilpotency_class(g).is_some()
}

pub fn is_solvable(g: &Group) -> bool {
    derived_length(g).is_some()
}

pub fn is_perfect(g: &Group) -> bool {
    derived_subgroup(g).order() == g.order()
}

/// Frattini subgroup.
///
/// Nilpotent groups use `Φ(G) = [G,G]·⟨(g_p)^p⟩` over generators `g` and
/// primes `p`, where `g_p` is the `p`-part of `g`; for p-groups this is
/// `G^p[G,G]`. Other groups up to `limits.frattini_fallback` intersect their
/// maximal subgroups.
pub fn frattini(g: &Group, limits: &Limits) -> Result<Subgroup> {
    if is_nilpotent(g) {
        Ok(frattini_nilpotent(g))
    } else if g.order() <= limits.frattini_fallback {
        frattini_by_maximal_subgroups(g)
    } else {
        Err(Error::FrattiniBound {
            order: g.order(),
            bound: limits.frattini_fallback,
        })
    }
}

fn frattini_nilpotent(g: &Group) -> Subgroup {
    let derived = derived_subgroup(g);
    let primes = factorize(g.order() as u64);
    let mut b = ClosureBuilder::new(g);
    b.add_all(derived.generators().iter().copied());
    for &x in g.generators() {
        let ord = g.element_order(x) as u64;
        for &(p, _) in &primes {
            let mut coprime = ord;
            while coprime.is_multiple_of(p) {
                coprime /= p;
            }
            let p_part = g.pow(x, coprime);
            b.add(g.pow(p_part, p));
        }
    }
    b.finish(Some(true))
}

/// Literal intersection of all maximal subgroups. Every subgroup is a join
/// of cyclic subgroups, so the lattice is explored by joining cyclic
/// subgroups onto known proper subgroups; a proper subgroup is maximal iff
/// every such join is the whole group.
pub fn frattini_by_maximal_subgroups(g: &Group) -> Result<Subgroup> {
    let n = g.order();
    if n == 1 {
        return Ok(Subgroup::trivial(g));
    }
    let mut cyclic_gens = Vec::new();
    let mut seen_cyclic: HashSet<Vec<u32>> = HashSet::new();
    for x in 1..n {
        let members = sorted_members(&g.bfs_members(&[x]));
        if seen_cyclic.insert(members) {
            cyclic_gens.push(x);
        }
    }
    let mut known: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: Vec<Vec<usize>> = vec![vec![]];
    known.insert(vec![0]);
    let mut intersection: Option<Vec<bool>> = None;
    let mut head = 0;
    while head < queue.len() {
        let gens = queue[head].clone();
        head += 1;
        let mut base = ClosureBuilder::new(g);
        base.add_all(gens.iter().copied());
        let mut maximal = true;
        for &c in &cyclic_gens {
            if base.contains(c) {
                continue;
            }
            let mut join = ClosureBuilder::new(g);
            join.add_all(gens.iter().copied());
            join.add(c);
            if join.len() == n {
                continue;
            }
            maximal = false;
            let sub = join.finish(Some(false));
            let key: Vec<u32> = sub.members().map(|m| m as u32).collect();
            if known.insert(key) {
                if known.len() > MAX_LATTICE {
                    return Err(Error::Precondition(
                        "subgroup lattice too large for the Frattini fallback".into(),
                    ));
                }
                let mut next = gens.clone();
                next.push(c);
                queue.push(next);
            }
        }
        if maximal {
            let mask: Vec<bool> = (0..n).map(|x| base.contains(x)).collect();
            intersection = Some(match intersection {
                None => mask,
                Some(acc) => acc.iter().zip(&mask).map(|(&a, &b)| a && b).collect(),
            });
        }
    }
    let mask = intersection.expect("a non-trivial finite group has a maximal subgroup");
    Subgroup::from_members(g, (0..n).filter(|&x| mask[x]))
}

fn sorted_members(m: &[usize]) -> Vec<u32> {
    let mut v: Vec<u32> = m.iter().map(|&x| x as u32).collect();
    v.sort_unstable();
    v
}

/// Conjugacy class id of every element, and class sizes by id. Class ids
/// are assigned in order of least member.
pub fn conjugacy_classes(g: &Group) -> (Vec<u32>, Vec<usize>) {
    const UNSET: u32 = u32::MAX;
    let mut class = vec![UNSET; g.order()];
    let mut sizes = Vec::new();
    let mut orbit = Vec::new();
    for x in 0..g.order() {
        if class[x] != UNSET {
            continue;
        }
        let id = sizes.len() as u32;
        class[x] = id;
        orbit.clear();
        orbit.push(x);
        let mut head = 0;
        while head < orbit.len() {
            let y = orbit[head];
            head += 1;
            for &t in g.generators() {
                let z = g.conjugate(y, t);
                if class[z] == UNSET {
                    class[z] = id;
                    orbit.push(z);
                }
            }
        }
        sizes.push(orbit.len());
    }
    (class, sizes)
}

/// Abelianization `G/[G,G]`.
pub fn abelianization(g: &Group) -> AbelianType {
    let d = derived_subgroup(g);
    let (q, _) = quotient(g, &d).expect("derived subgroup is normal");
    recognize_abelian(&q).expect("abelianization is abelian")
}

pub fn structure_report(g: &Group, limits: &Limits) -> StructureReport {
    let derived = derived_subgroup(g);
    let z = centre(g);
    let frattini_order = frattini(g, limits).ok().map(|f| f.order());
    let (q, _) = quotient(g, &derived).expect("derived subgroup is normal");
    StructureReport {
        order: g.order(),
        exponent: exponent(g),
        nilpotency_class: nilpotency_class(g),
        derived_length: derived_length(g),
        is_perfect: derived.order() == g.order(),
        is_abelian: derived.is_trivial(),
        centre_order: z.order(),
        derived_order: derived.order(),
        frattini_order,
        abelianization: recognize_abelian(&q).expect("abelianization is abelian"),
        element_order_histogram: order_histogram(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::spec::{load_group, GroupSpec};

    fn perm(deg: usize, gens: &[&str]) -> Group {
        load_group(
            &GroupSpec::permutation(deg, gens).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    fn ab(d: &[u32]) -> Group {
        load_group(&GroupSpec::abelian(d), &Limits::default()).unwrap()
    }

    #[test]
    fn cyclic_six_report() {
        let r = structure_report(&ab(&[6]), &Limits::default());
        assert_eq!(r.nilpotency_class, Some(1));
        assert_eq!(r.exponent, 6);
        assert_eq!(r.abelianization, AbelianType::cyclic(6));
        assert!(r.is_abelian);
        assert_eq!(r.frattini_order, Some(1));
    }

    #[test]
    fn a5_is_perfect_and_not_solvable() {
        let a5 = perm(5, &["(1 2 3 4 5)", "(3 4 5)"]);
        let r = structure_report(&a5, &Limits::default());
        assert!(r.is_perfect);
        assert_eq!(r.derived_length, None);
        assert_eq!(r.nilpotency_class, None);
        assert_eq!(r.centre_order, 1);
        assert_eq!(r.frattini_order, Some(1));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["derived_length"], -1);
    }

    #[test]
    fn frattini_small_cases() {
        let l = Limits::default();
        assert_eq!(frattini(&ab(&[2, 2]), &l).unwrap().order(), 1);
        assert_eq!(frattini(&ab(&[4]), &l).unwrap().order(), 2);
        assert_eq!(frattini(&ab(&[12]), &l).unwrap().order(), 2);
        assert_eq!(frattini(&ab(&[9, 3]), &l).unwrap().order(), 3);
    }

    #[test]
    fn frattini_routes_agree_on_nilpotent_groups() {
        let l = Limits::default();
        let d4 = perm(4, &["(1 2 3 4)", "(2 4)"]);
        let q8 = perm(8, &["(1 3 2 4)(5 8 6 7)", "(1 5 2 6)(3 7 4 8)"]);
        for g in [d4, q8, ab(&[2, 4]), ab(&[6, 6]), ab(&[8])] {
            let a = frattini(&g, &l).unwrap();
            let b = frattini_by_maximal_subgroups(&g).unwrap();
            assert!(a.same_members(&b), "order {}", g.order());
        }
    }

    #[test]
    fn frattini_of_non_nilpotent_groups() {
        let s3 = perm(3, &["(1 2 3)", "(1 2)"]);
        assert_eq!(frattini(&s3, &Limits::default()).unwrap().order(), 1);
        let s4 = perm(4, &["(1 2 3 4)", "(1 2)"]);
        assert_eq!(frattini(&s4, &Limits::default()).unwrap().order(), 1);
        let tight = Limits {
            frattini_fallback: 5,
            ..Limits::default()
        };
        assert!(matches!(
            frattini(&s3, &tight),
            Err(Error::FrattiniBound { .. })
        ));
    }

    #[test]
    fn d4_series() {
        let d4 = perm(4, &["(1 2 3 4)", "(2 4)"]);
        assert_eq!(nilpotency_class(&d4), Some(2));
        assert_eq!(derived_length(&d4), Some(2));
        let s3 = perm(3, &["(1 2 3)", "(1 2)"]);
        assert_eq!(nilpotency_class(&s3), None);
        assert_eq!(derived_length(&s3), Some(2));
        assert_eq!(nilpotency_class(&ab(&[])), Some(0));
    }

    #[test]
    fn class_sizes_of_s3() {
        let s3 = perm(3, &["(1 2 3)", "(1 2)"]);
        let (_, mut sizes) = conjugacy_classes(&s3);
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 3]);
    }
}
