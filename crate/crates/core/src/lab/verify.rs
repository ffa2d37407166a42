//! Data-driven claim registry. Every claim runs over catalogue subjects (or
//! a fixed global family) and reports measured values next to its verdict.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::catalogue::{load_all, Subject};
use super::kgroup::{k_functorial, k_group, k_order, KGroup};
use super::ktilde::{ktilde, natural_cover, sn_recover, KTildeResult};
use crate::abelian::{
    build_cocycle_cover, canonical_cover_of, factorize, recognize_abelian, schur_multiplier,
    sylow_split, AbelianType, Cover, Provenance,
};
use crate::engine::group::{gcd, Group};
use crate::engine::hom::Homomorphism;
use crate::engine::iso::is_isomorphic;
use crate::engine::spec::{abelian_group, direct_product, direct_product_all};
use crate::engine::structure::{
    abelianization, exponent, frattini, is_nilpotent, is_perfect, is_solvable, nilpotency_class,
};
use crate::engine::subgroup::{centre, derived_subgroup, quotient, subgroup_closure, Subgroup};
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Measured and reported without a verdict.
    Recorded,
    /// Not run: the case exceeds the element budget.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseOutcome {
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub verdict: Verdict,
    pub measured: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimOutcome {
    pub claim: String,
    pub statement: String,
    pub verdict: Verdict,
    pub counts: BTreeMap<Verdict, usize>,
    pub cases: Vec<CaseOutcome>,
}

impl ClaimOutcome {
    fn aggregate(claim: &Claim, cases: Vec<CaseOutcome>) -> Self {
        let mut counts = BTreeMap::new();
        for c in &cases {
            *counts.entry(c.verdict).or_insert(0) += 1;
        }
        let has = |v| counts.contains_key(&v);
        let verdict = if has(Verdict::Fail) {
            Verdict::Fail
        } else if has(Verdict::Pass) {
            Verdict::Pass
        } else if has(Verdict::Recorded) {
            Verdict::Recorded
        } else {
            Verdict::Skipped
        };
        ClaimOutcome {
            claim: claim.id.to_string(),
            statement: claim.statement.to_string(),
            verdict,
            counts,
            cases,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub limits: Limits,
    /// Only catalogue groups of at most this order.
    pub max_order: Option<usize>,
    /// Total random samples for sampling claims, split over their cases.
    pub samples: usize,
    /// Overrides each claim's default values of `n` (values below a claim's
    /// minimum are dropped).
    pub ns: Option<Vec<usize>>,
    /// Restricts to these catalogue keys.
    pub subjects: Option<Vec<String>>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            limits: Limits::default(),
            max_order: None,
            samples: 10_000,
            ns: None,
            subjects: None,
            seed: 0x5eed,
        }
    }
}

type Check = fn(&Ctx, &Subject, usize, &mut Probe) -> Result<()>;

enum Kind {
    PerSubject {
        applies: fn(&Subject) -> bool,
        check: Check,
    },
    Global(fn(&Ctx) -> Vec<CaseOutcome>),
}

pub struct Claim {
    pub id: &'static str,
    pub statement: &'static str,
    pub default_ns: &'static [usize],
    pub min_n: usize,
    kind: Kind,
}

impl Claim {
    fn ns(&self, opts: &SuiteOptions) -> Vec<usize> {
        match &opts.ns {
            Some(ns) => ns.iter().copied().filter(|&n| n >= self.min_n).collect(),
            None => self.default_ns.to_vec(),
        }
    }
}

/// Measured values and failed expectations of one case.
#[derive(Default)]
pub struct Probe {
    measured: BTreeMap<String, Value>,
    failures: Vec<String>,
    recorded_only: bool,
    note: Option<String>,
}

impl Probe {
    fn put(&mut self, key: &str, v: impl Serialize) {
        self.measured.insert(
            key.to_string(),
            serde_json::to_value(v).expect("serializable measurement"),
        );
    }

    fn check(&mut self, key: &str, ok: bool) {
        self.put(key, ok);
        if !ok {
            self.failures.push(format!("{key} is false"));
        }
    }

    fn check_eq<T: Serialize + PartialEq + Display>(&mut self, key: &str, got: T, want: T) {
        if got != want {
            self.failures
                .push(format!("{key}: measured {got}, expected {want}"));
        }
        self.put(key, got);
    }

    /// Exact isomorphism within the bound; fingerprint agreement above it.
    fn check_iso(&mut self, key: &str, a: &Group, b: &Group, limits: &Limits) {
        let v = is_isomorphic(a, b, limits);
        self.put(key, v);
        if !v.compatible() {
            self.failures
                .push(format!("{key}: groups are not isomorphic"));
        }
    }

    fn record_only(&mut self, note: &str) {
        self.recorded_only = true;
        self.note = Some(note.to_string());
    }

    fn note(&mut self, note: &str) {
        self.note = Some(note.to_string());
    }
}

type Slot<T> = Arc<OnceLock<Result<Arc<T>>>>;

struct Ctx<'a> {
    opts: &'a SuiteOptions,
    ktildes: Mutex<HashMap<(String, usize, usize), Slot<KTildeResult>>>,
    kgroups: Mutex<HashMap<(String, usize), Slot<KGroup>>>,
    samples_per_case: usize,
}

impl<'a> Ctx<'a> {
    fn new(opts: &'a SuiteOptions) -> Self {
        Ctx {
            opts,
            ktildes: Mutex::new(HashMap::new()),
            kgroups: Mutex::new(HashMap::new()),
            samples_per_case: opts.samples,
        }
    }

    fn limits(&self) -> &Limits {
        &self.opts.limits
    }

    fn ktilde(&self, s: &Subject, cover: usize, n: usize) -> Result<Arc<KTildeResult>> {
        let slot = {
            let mut map = self.ktildes.lock().expect("cache lock");
            map.entry((s.key.clone(), cover, n)).or_default().clone()
        };
        slot.get_or_init(|| {
            ktilde(&s.group, n, Some(&s.covers[cover].1), self.limits()).map(Arc::new)
        })
        .clone()
    }

    fn k(&self, s: &Subject, n: usize) -> Result<Arc<KGroup>> {
        let slot = {
            let mut map = self.kgroups.lock().expect("cache lock");
            map.entry((s.key.clone(), n)).or_default().clone()
        };
        slot.get_or_init(|| k_group(&s.group, n, self.limits()).map(Arc::new))
            .clone()
    }
}

fn any(_: &Subject) -> bool {
    true
}

fn abelian(s: &Subject) -> bool {
    s.is_abelian()
}

fn abelian_p_group(s: &Subject) -> bool {
    s.abelian_type
        .as_ref()
        .is_some_and(|t| !t.is_trivial() && t.is_p_group())
}

fn odd_abelian(s: &Subject) -> bool {
    s.abelian_type.as_ref().is_some_and(|t| t.order() % 2 == 1)
}

fn several_covers(s: &Subject) -> bool {
    s.covers.len() > 1
}

pub fn claims() -> &'static [Claim] {
    CLAIMS
}

static CLAIMS: &[Claim] = &[
    Claim {
        id: "abelian-centre",
        statement: "For an abelian p-group and n >= 3: if the exponent divides n then K~(G,n) = G x K~(G,n-1); if p does not divide n then Z(K~(G,n)) = H2(G) x K(Z,n) with Z the image of Z(G*)",
        default_ns: &[3, 4],
        min_n: 3,
        kind: Kind::PerSubject { applies: abelian_p_group, check: check_abelian_centre },
    },
    Claim {
        id: "abelian-n2",
        statement: "For abelian G of odd order K~(G,2) is a cover of G; for elementary abelian 2-groups K~(G,2) is elementary abelian of type G x H2(G)",
        default_ns: &[2],
        min_n: 2,
        kind: Kind::PerSubject { applies: abelian, check: check_abelian_n2 },
    },
    Claim {
        id: "abelian-structure",
        statement: "For an abelian p-group and n >= 3: K~(G,n) has class 2 unless G is cyclic, its commutator subgroup is H2(G), and its Frattini subgroup is an extension of H2(G) by Phi(G)^(n-1)",
        default_ns: &[3, 4],
        min_n: 3,
        kind: Kind::PerSubject { applies: abelian_p_group, check: check_abelian_structure },
    },
    Claim {
        id: "abelianization",
        statement: "For n >= 3, K~(G,n)^ab = K(G,n)^ab = (G^ab)^(n-1)",
        default_ns: &[3],
        min_n: 3,
        kind: Kind::PerSubject { applies: any, check: check_abelianization },
    },
    Claim {
        id: "central-sequence",
        statement: "0 -> H2(G) -> K~(G,n) -> K(G,n) -> 1 is central exact; for n >= 3 H2(G) lies in the commutator subgroup",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: any, check: check_central_sequence },
    },
    Claim {
        id: "commutator-identity",
        statement: "([h1,h2],1,...,1) is the commutator of (h1,h1^-1,1,...,1) and (h2,1,h2^-1,1,...,1) in K(G,n), n >= 3",
        default_ns: &[3, 4],
        min_n: 3,
        kind: Kind::PerSubject { applies: any, check: check_commutator_identity },
    },
    Claim {
        id: "cover-independence",
        statement: "K(G*,n)/K(M,n) does not depend on the cover G*",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: several_covers, check: check_cover_independence },
    },
    Claim {
        id: "cyclic",
        statement: "For cyclic G, K~(G,n) = G^(n-1)",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: cyclic, check: check_cyclic },
    },
    Claim {
        id: "extension-heritage",
        statement: "G is finite, nilpotent, perfect or solvable iff K~(G,n) is",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: any, check: check_extension_heritage },
    },
    Claim {
        id: "induced-maps",
        statement: "A homomorphism G -> H induces K~(G,n) -> K~(H,n) compatible with the induced maps on H2 and on K(-,n)",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: digit_model, check: check_induced_maps },
    },
    Claim {
        id: "k-order",
        statement: "|K(G,n)| = |G|^(n-1) |[G,G]|",
        default_ns: &[2, 3, 4],
        min_n: 2,
        kind: Kind::PerSubject { applies: any, check: check_k_order },
    },
    Claim {
        id: "kernel-functor",
        statement: "Injective or surjective maps induce injective or surjective maps on K(-,n); K(G1 x G2,n) = K(G1,n) x K(G2,n) naturally; for n >= 3, K(G,n)^ab -> K(G^ab,n) is an isomorphism",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: any, check: check_kernel_functor },
    },
    Claim {
        id: "kernel-heritage",
        statement: "G is abelian, finite, nilpotent, perfect or solvable iff K(G,n) is",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: any, check: check_kernel_heritage },
    },
    Claim {
        id: "kernel-perfect-abelian",
        statement: "K(G,n) = G^n for perfect G and K(G,n) = G^(n-1) for abelian G",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: perfect_or_abelian, check: check_kernel_perfect_abelian },
    },
    Claim {
        id: "natural-cover-examples",
        statement: "For odd p the natural cover of Z/p is Z/p and that of (Z/p)^2 is extra-special of order p^3 and exponent p",
        default_ns: &[2],
        min_n: 2,
        kind: Kind::PerSubject { applies: prime_or_prime_square, check: check_natural_cover_examples },
    },
    Claim {
        id: "perfect-cover",
        statement: "For finite perfect G there is an exact sequence 1 -> G~ -> K~(G,n) -> G^(n-1) -> 1 with G~ the universal central extension",
        default_ns: &[2],
        min_n: 2,
        kind: Kind::PerSubject { applies: perfect, check: check_perfect_cover },
    },
    Claim {
        id: "read-centre-image",
        statement: "For abelian G the image of Z(G*) in G does not depend on the cover G*",
        default_ns: &[2],
        min_n: 2,
        kind: Kind::PerSubject { applies: abelian_several_covers, check: check_read_centre_image },
    },
    Claim {
        id: "schur-oracle",
        statement: "The cocycle cover of every abelian group of order at most 100 is a cover with |[G*,G*]| equal to the gcd-formula multiplier",
        default_ns: &[],
        min_n: 2,
        kind: Kind::Global(check_schur_oracle),
    },
    Claim {
        id: "sn-recovery",
        statement: "K(G,n)/N and K~(G,n)/N~ are isomorphic to G, N the normal closure of g sigma(g^-1) over sigma in S_(n-1)",
        default_ns: &[3],
        min_n: 3,
        kind: Kind::PerSubject { applies: any, check: check_sn_recovery },
    },
    Claim {
        id: "sylow-product",
        statement: "For nilpotent G, K~(G,n) is the product of K~(S_p,n) over its Sylow subgroups",
        default_ns: &[2, 3],
        min_n: 2,
        kind: Kind::PerSubject { applies: abelian_not_p_group, check: check_sylow_product },
    },
    Claim {
        id: "warped-baer",
        statement: "For abelian G of odd order, <(g,g^-1),(m,1)>/<(m,m^-1)> in (G*)^2 is a cover isomorphic to K~(G,2)",
        default_ns: &[2],
        min_n: 2,
        kind: Kind::PerSubject { applies: odd_abelian, check: check_warped_baer },
    },
];

fn cyclic(s: &Subject) -> bool {
    s.abelian_type.as_ref().is_some_and(AbelianType::is_cyclic)
}

fn perfect(s: &Subject) -> bool {
    is_perfect(&s.group)
}

fn perfect_or_abelian(s: &Subject) -> bool {
    s.is_abelian() || perfect(s)
}

fn digit_model(s: &Subject) -> bool {
    s.group.abelian_moduli().is_some()
}

fn abelian_several_covers(s: &Subject) -> bool {
    s.is_abelian() && several_covers(s)
}

fn abelian_not_p_group(s: &Subject) -> bool {
    s.abelian_type.as_ref().is_some_and(|t| !t.is_p_group())
}

fn prime_or_prime_square(s: &Subject) -> bool {
    s.abelian_type.as_ref().is_some_and(|t| {
        let d = t.divisors();
        d[0] % 2 == 1
            && crate::abelian::is_prime(d[0])
            && (d.len() == 1 || (d.len() == 2 && d[0] == d[1]))
    })
}

fn sorted_type(g: &Group) -> Result<AbelianType> {
    recognize_abelian(g)
}

fn check_k_order(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let g = &s.group;
    let d = derived_subgroup(g);
    let predicted = k_order(g.order(), d.order(), n);
    p.put("predicted", predicted.to_string());
    let k = ctx.k(s, n)?;
    p.check_eq("order", k.order() as u128, predicted);
    let round_trip = (0..k.order()).all(|x| k.index_of_tuple(k.tuple(x)) == Some(x));
    p.check("indices_distinct", round_trip);
    let criterion = (0..k.order()).all(|x| k.satisfies_criterion(k.tuple(x)));
    p.check("criterion_holds", criterion);
    // independent count over all of G^n when small enough
    if (g.order() as u128).pow(n as u32) <= 1_000_000 {
        let count = count_tuples_with_product_in(g, n, &d);
        p.check_eq("brute_force_count", count as u128, predicted);
    }
    Ok(())
}

fn count_tuples_with_product_in(g: &Group, n: usize, d: &Subgroup) -> usize {
    fn rec(g: &Group, left: usize, acc: usize, d: &Subgroup) -> usize {
        if left == 0 {
            return d.contains(acc) as usize;
        }
        (0..g.order())
            .map(|x| rec(g, left - 1, g.mul(acc, x), d))
            .sum()
    }
    rec(g, n, 0, d)
}

fn check_kernel_functor(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let g = &s.group;
    let k = ctx.k(s, n)?;

    let (gab, to_ab) = quotient(g, &derived_subgroup(g))?;
    let k_ab = k_group(&gab, n, l)?;
    let onto = k_functorial(&to_ab, &k, &k_ab)?;
    p.check("surjection_induces_surjection", onto.is_surjective());

    let cyclic_sub = subgroup_closure(g, &g.generators()[..1.min(g.generators().len())]);
    let inc = cyclic_sub.inclusion();
    let k_sub = k_group(inc.source(), n, l)?;
    let into = k_functorial(&inc, &k_sub, &k)?;
    p.check("injection_induces_injection", into.is_injective());

    let z2 = abelian_group(&[2], l)?;
    let prod = direct_product(g, &z2, l)?;
    let k_prod = k_group(&prod, n, l)?;
    let k_z2 = k_group(&z2, n, l)?;
    let pair = direct_product(k.group(), k_z2.group(), l)?;
    let mut left = vec![0u32; n];
    let mut right = vec![0u32; n];
    let map = (0..k_prod.order())
        .map(|x| {
            for (i, &c) in k_prod.tuple(x).iter().enumerate() {
                let code = prod.code(c as usize);
                left[i] = code[0];
                right[i] = code[1];
            }
            let a = k
                .index_of_tuple(&left)
                .expect("first components form a K element") as u32;
            let b = k_z2
                .index_of_tuple(&right)
                .expect("second components form a K element") as u32;
            pair.index_of(&[a, b]).expect("pair in product") as u32
        })
        .collect();
    let natural = Homomorphism::new(k_prod.group().clone(), pair.clone(), map)?;
    p.check("product_map_is_isomorphism", natural.is_isomorphism());

    let kernel_is_derived = onto.kernel().same_members(&derived_subgroup(k.group()));
    if n >= 3 {
        p.check("abelianization_map_is_isomorphism", kernel_is_derived);
    } else {
        p.put("abelianization_map_is_isomorphism", kernel_is_derived);
    }
    Ok(())
}

fn check_kernel_perfect_abelian(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let k = ctx.k(s, n)?;
    if let Some(t) = &s.abelian_type {
        p.check_eq("k_type", sorted_type(k.group())?, t.power(n - 1));
    }
    if perfect(s) {
        p.check_eq(
            "k_order",
            k.order() as u128,
            (s.order() as u128).pow(n as u32),
        );
    }
    Ok(())
}

fn heritage(p: &mut Probe, g: &Group, h: &Group) {
    type Property = (&'static str, fn(&Group) -> bool);
    let props: [Property; 3] = [
        ("nilpotent", is_nilpotent),
        ("perfect", is_perfect),
        ("solvable", is_solvable),
    ];
    for (name, f) in props {
        let (a, b) = (f(g), f(h));
        p.put(&format!("base_{name}"), a);
        if a != b {
            p.failures.push(format!("{name}: base {a}, extension {b}"));
        }
    }
}

fn check_kernel_heritage(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let k = ctx.k(s, n)?;
    let (a, b) = (s.group.is_abelian(), k.group().is_abelian());
    p.put("base_abelian", a);
    if a != b {
        p.failures.push(format!("abelian: base {a}, K {b}"));
    }
    heritage(p, &s.group, k.group());
    Ok(())
}

fn check_central_sequence(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let r = ctx.ktilde(s, 0, n)?;
    let h2 = r.h2_image();
    p.put("cover", &s.covers[0].0);
    p.put("order", r.order());
    p.put("h2_order", h2.order());
    p.put("k_order", r.k().order());
    p.check("orders_multiply", r.order() == h2.order() * r.k().order());
    p.check("h2_central", h2.is_central());
    p.check("onto_k_surjective", r.onto_k().is_surjective());
    p.check("kernel_is_h2", r.onto_k().kernel().same_members(h2));
    p.check_eq(
        "h2_type",
        sorted_type(&h2.as_group())?,
        r.cover().multiplier().clone(),
    );
    let inside = h2.is_subset_of(&derived_subgroup(r.group()));
    if n >= 3 {
        p.check("h2_in_derived", inside);
    } else {
        p.put("h2_in_derived", inside);
        p.note("containment in the commutator subgroup is recorded only for n = 2");
    }
    Ok(())
}

fn check_abelianization(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let r = ctx.ktilde(s, 0, n)?;
    let expected = abelianization(&s.group).power(n - 1);
    p.check_eq("ktilde_ab", abelianization(r.group()), expected.clone());
    p.check_eq("k_ab", abelianization(r.k().group()), expected);
    Ok(())
}

fn check_cyclic(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let r = ctx.ktilde(s, 0, n)?;
    let t = s.abelian_type.as_ref().expect("cyclic subject is abelian");
    p.check("abelian", r.group().is_abelian());
    p.check_eq("type", sorted_type(r.group())?, t.power(n - 1));
    Ok(())
}

fn check_extension_heritage(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let r = ctx.ktilde(s, 0, n)?;
    p.put("order", r.order());
    heritage(p, &s.group, r.group());
    Ok(())
}

fn check_sn_recovery(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let k = ctx.k(s, n)?;
    let from_k = sn_recover(k.as_ref())?;
    p.put("k_quotient_order", from_k.order());
    p.check_iso("k_quotient_iso", &from_k, &s.group, l);
    let r = ctx.ktilde(s, 0, n)?;
    let from_kt = sn_recover(r.as_ref())?;
    p.put("ktilde_quotient_order", from_kt.order());
    p.check_iso("ktilde_quotient_iso", &from_kt, &s.group, l);
    Ok(())
}

fn check_perfect_cover(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let r = ctx.ktilde(s, 0, n)?;
    let cover = r.cover();
    let m = cover.kernel().order() as u128;
    p.check_eq(
        "order",
        r.order() as u128,
        m * (s.order() as u128).pow(n as u32),
    );
    p.check("perfect", is_perfect(r.group()));
    let pi = cover.projection();
    let kernel: Vec<usize> = (0..r.order())
        .filter(|&x| {
            r.representative(x)[1..]
                .iter()
                .all(|&c| pi.apply(c as usize) == 0)
        })
        .collect();
    let kernel = Subgroup::from_members(r.group(), kernel)?;
    p.check_eq("kernel_order", kernel.order(), cover.total().order());
    p.check("kernel_normal", kernel.is_normal());
    p.check_iso("kernel_iso_cover", &kernel.as_group(), cover.total(), l);
    Ok(())
}

fn check_cover_independence(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let first = ctx.ktilde(s, 0, n)?;
    p.put("order", first.order());
    let mut labels = vec![s.covers[0].0.clone()];
    for i in 1..s.covers.len() {
        let other = ctx.ktilde(s, i, n)?;
        let label = &s.covers[i].0;
        labels.push(label.clone());
        p.check_iso(
            &format!("iso_{}_{}", s.covers[0].0, label),
            first.group(),
            other.group(),
            l,
        );
    }
    p.put("covers", labels);
    if first.group().is_abelian() {
        p.put("type", sorted_type(first.group())?);
    }
    Ok(())
}

fn check_read_centre_image(_ctx: &Ctx, s: &Subject, _n: usize, p: &mut Probe) -> Result<()> {
    let images: Vec<Subgroup> = s.covers.iter().map(|(_, c)| c.centre_image()).collect();
    let mut sizes = BTreeMap::new();
    for ((label, _), img) in s.covers.iter().zip(&images) {
        sizes.insert(label.clone(), img.order());
    }
    p.put("image_orders", sizes);
    let same = images.iter().all(|i| i.same_members(&images[0]));
    p.check("images_coincide", same);
    Ok(())
}

fn check_sylow_product(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let whole = ctx.ktilde(s, 0, n)?;
    let mut parts = Vec::new();
    let mut h2_product = 1usize;
    let mut primes = Vec::new();
    for (prime, part) in sylow_split(t) {
        let g = abelian_group(&part.divisors_u32()?, l)?;
        let r = ktilde(&g, n, None, l)?;
        h2_product *= r.h2_image().order();
        primes.push(prime);
        parts.push(r.group().clone());
    }
    p.put("primes", primes);
    let product = direct_product_all(&parts, l)?;
    p.check_eq("order", product.order(), whole.order());
    p.check_eq("h2_order", h2_product, whole.h2_image().order());
    p.check_iso("iso", whole.group(), &product, l);
    Ok(())
}

/// `K̃(G,2) → K(G,2) → G`, the sequence that makes `K̃(G,2)` a candidate
/// cover of an abelian group.
fn ktilde2_as_cover(r: &KTildeResult) -> Result<Cover> {
    let to_base = r.onto_k().then(&r.k().coordinate(0))?;
    Cover::new(to_base, Provenance::Natural, None)
}

fn check_abelian_n2(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let r = ctx.ktilde(s, 0, n)?;
    p.put("order", r.order());
    let as_cover = ktilde2_as_cover(&r);
    if t.order() % 2 == 1 {
        match &as_cover {
            Ok(c) => p.check_eq("kernel_type", c.multiplier().clone(), schur_multiplier(t)),
            Err(e) => p.failures.push(format!("not a cover: {e}")),
        }
        p.put("is_cover", as_cover.is_ok());
    } else if t.is_elementary() {
        p.check("abelian", r.group().is_abelian());
        p.check_eq("exponent", exponent(r.group()), 2);
        p.check_eq("type", sorted_type(r.group())?, t.sum(&schur_multiplier(t)));
    } else {
        p.put("is_cover", as_cover.is_ok());
        p.put("abelian", r.group().is_abelian());
        p.record_only("even order, not elementary: no claim, measured only");
    }
    Ok(())
}

fn check_warped_baer(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let c = natural_cover(t, l)?;
    p.put("order", c.total().order());
    p.check_eq("kernel_type", c.multiplier().clone(), schur_multiplier(t));
    let r = ctx.ktilde(s, 0, n)?;
    p.check_iso("iso_ktilde", c.total(), r.group(), l);
    Ok(())
}

fn check_natural_cover_examples(ctx: &Ctx, s: &Subject, _n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let prime = t.divisors()[0];
    let c = natural_cover(t, l)?;
    let total = c.total();
    if t.rank() == 1 {
        p.check_eq("type", sorted_type(total)?, t.clone());
    } else {
        p.check_eq("order", total.order() as u64, prime.pow(3));
        p.check_eq("exponent", exponent(total), prime);
        p.check("non_abelian", !total.is_abelian());
        let z = centre(total);
        let d = derived_subgroup(total);
        let f = frattini(total, l)?;
        p.check_eq("centre_order", z.order() as u64, prime);
        p.check("centre_is_derived", z.same_members(&d));
        p.check("centre_is_frattini", z.same_members(&f));
    }
    Ok(())
}

fn check_abelian_structure(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let r = ctx.ktilde(s, 0, n)?;
    let g = r.group();
    let class = nilpotency_class(g);
    p.put("class", class);
    if !t.is_cyclic() {
        p.check_eq("class_is_two", class.unwrap_or(usize::MAX), 2);
    }
    let h2 = r.h2_image();
    p.check("derived_is_h2", derived_subgroup(g).same_members(h2));
    let phi = frattini(g, l)?;
    let phi_base = frattini(&s.group, l)?.order();
    let expected = h2.order() as u128 * (phi_base as u128).pow(n as u32 - 1);
    p.check_eq("frattini_order", phi.order() as u128, expected);
    p.check("h2_in_frattini", h2.is_subset_of(&phi));
    p.check_eq(
        "frattini_image_order",
        r.onto_k().image_of(&phi).order() as u128,
        (phi_base as u128).pow(n as u32 - 1),
    );
    Ok(())
}

fn check_abelian_centre(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let t = s.abelian_type.as_ref().expect("abelian subject");
    let prime = factorize(t.order())[0].0;
    let r = ctx.ktilde(s, 0, n)?;
    let z = centre(r.group());
    p.put("centre_order", z.order());
    let mut applied = false;
    if (n as u64).is_multiple_of(t.exponent()) {
        applied = true;
        let smaller = ctx.ktilde(s, 0, n - 1)?;
        let product = direct_product(&s.group, smaller.group(), l)?;
        p.check_eq("product_order", product.order(), r.order());
        p.check_iso("iso_g_times_previous", r.group(), &product, l);
    }
    if !(n as u64).is_multiple_of(prime) {
        applied = true;
        let cover = r.cover();
        let image = cover.centre_image();
        let image_type = sorted_type(&image.as_group())?;
        let expected = cover.multiplier().sum(&image_type.power(n - 1));
        p.put("centre_image_order", image.order());
        p.check_eq("centre_type", sorted_type(&z.as_group())?, expected);
    }
    if !applied {
        p.record_only("neither the exponent divides n nor is n prime to p");
    }
    Ok(())
}

/// Reduction `⊕ Z/d_i → ⊕ Z/e_i` with `e_i | d_i`: modulo the smallest
/// prime when some divisor is composite, otherwise onto the first factor.
fn reduction_target(moduli: &[u32]) -> Vec<u32> {
    let order: u64 = moduli.iter().map(|&m| m as u64).product();
    let p = factorize(order).first().map_or(1, |&(p, _)| p) as u32;
    if moduli.iter().any(|&m| !crate::abelian::is_prime(m as u64)) {
        moduli
            .iter()
            .map(|&m| gcd(m as u64, p as u64) as u32)
            .collect()
    } else {
        moduli
            .iter()
            .enumerate()
            .map(|(i, &m)| if i == 0 { m } else { 1 })
            .collect()
    }
}

/// Slot list of the cocycle model on `moduli`.
fn slots(moduli: &[u32]) -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    for i in 0..moduli.len() {
        for j in i + 1..moduli.len() {
            let m = gcd(moduli[i] as u64, moduli[j] as u64) as u32;
            if m > 1 {
                out.push((i, j, m));
            }
        }
    }
    out
}

fn check_induced_maps(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let l = ctx.limits();
    let d = s.group.abelian_moduli().expect("digit model").to_vec();
    let e = reduction_target(&d);
    p.put("target_moduli", &e);
    let h = abelian_group(&e, l)?;
    let alpha = Homomorphism::new(
        s.group.clone(),
        h.clone(),
        (0..s.order())
            .map(|x| {
                let code: Vec<u32> = s
                    .group
                    .code(x)
                    .iter()
                    .zip(&e)
                    .map(|(&c, &m)| c % m)
                    .collect();
                h.index_of(&code).expect("reduced digits") as u32
            })
            .collect(),
    )?;
    let cover_g = canonical_cover_of(&s.group, l)?;
    let cover_h = canonical_cover_of(&h, l)?;
    let (sg, sh) = (slots(&d), slots(&e));
    let (gs, hs) = (cover_g.total(), cover_h.total());
    let lift_map = (0..gs.order())
        .map(|x| {
            let code = gs.code(x);
            let mut out: Vec<u32> = code[..d.len()]
                .iter()
                .zip(&e)
                .map(|(&c, &m)| c % m)
                .collect();
            for &(i, j, m) in &sh {
                let k = sg
                    .iter()
                    .position(|&(a, b, _)| (a, b) == (i, j))
                    .expect("slot survives reduction");
                out.push(code[d.len() + k] % m);
            }
            hs.index_of(&out).expect("reduced cover element") as u32
        })
        .collect();
    let lift = Homomorphism::new(gs.clone(), hs.clone(), lift_map)?;
    let lift_ok = (0..gs.order()).all(|x| {
        alpha.apply(cover_g.projection().apply(x)) == cover_h.projection().apply(lift.apply(x))
    });
    p.check("lift_covers_map", lift_ok);

    let rg = ktilde(&s.group, n, Some(&cover_g), l)?;
    let rh = ktilde(&h, n, Some(&cover_h), l)?;
    let k_lift = k_functorial(&lift, rg.k_total(), rh.k_total())?;
    let mut map = vec![u32::MAX; rg.order()];
    let mut well_defined = true;
    for x in 0..rg.k_total().order() {
        let y = rh.projection().apply(k_lift.apply(x)) as u32;
        let slot = &mut map[rg.projection().apply(x)];
        if *slot == u32::MAX {
            *slot = y;
        } else if *slot != y {
            well_defined = false;
        }
    }
    p.check("descends_to_quotient", well_defined);
    if !well_defined {
        return Ok(());
    }
    let induced = Homomorphism::new(rg.group().clone(), rh.group().clone(), map)?;

    let k_alpha = k_functorial(&alpha, rg.k(), rh.k())?;
    let compatible_k = (0..rg.order())
        .all(|x| rh.onto_k().apply(induced.apply(x)) == k_alpha.apply(rg.onto_k().apply(x)));
    p.check("compatible_with_k", compatible_k);

    let compatible_h2 = cover_g.kernel().members().all(|m| {
        let src = rg
            .projection()
            .apply(rg.k_total().embed(0, m).expect("central tuple"));
        let dst = rh
            .projection()
            .apply(rh.k_total().embed(0, lift.apply(m)).expect("central tuple"));
        induced.apply(src) == dst
    });
    p.check("compatible_with_h2", compatible_h2);
    p.check(
        "h2_into_h2",
        induced.image_of(rg.h2_image()).is_subset_of(rh.h2_image()),
    );
    Ok(())
}

fn check_commutator_identity(ctx: &Ctx, s: &Subject, n: usize, p: &mut Probe) -> Result<()> {
    let k = ctx.k(s, n)?;
    let g = &s.group;
    let kg = k.group();
    let seed = ctx.opts.seed
        ^ (n as u64)
        ^ s.key
            .bytes()
            .fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = ctx.samples_per_case.max(1);
    let mut bad = 0usize;
    for _ in 0..samples {
        let h1 = rng.gen_range(0..g.order());
        let h2 = rng.gen_range(0..g.order());
        let mut a = vec![0u32; n];
        a[0] = h1 as u32;
        a[1] = g.inv(h1) as u32;
        let mut b = vec![0u32; n];
        b[0] = h2 as u32;
        b[2] = g.inv(h2) as u32;
        let mut c = vec![0u32; n];
        c[0] = g.commutator(h1, h2) as u32;
        let (a, b) = (k.index_of_tuple(&a), k.index_of_tuple(&b));
        let lhs = k.index_of_tuple(&c);
        match (a, b, lhs) {
            (Some(a), Some(b), Some(lhs)) if kg.commutator(a, b) == lhs => {}
            _ => bad += 1,
        }
    }
    p.put("samples", samples);
    p.check_eq("violations", bad, 0);
    Ok(())
}

/// Every canonical divisor chain with product at most `bound`.
pub fn abelian_types_up_to(bound: u64) -> Vec<AbelianType> {
    fn rec(prefix: &mut Vec<u64>, product: u64, bound: u64, out: &mut Vec<AbelianType>) {
        out.push(AbelianType::from_divisors(prefix).expect("positive divisors"));
        // extend on the left so the chain stays d_1 | d_2 | ...
        let last = prefix.first().copied();
        for d in 2..=bound / product {
            if last.is_none_or(|l| l % d == 0) {
                prefix.insert(0, d);
                rec(prefix, product * d, bound, out);
                prefix.remove(0);
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 1, bound, &mut out);
    out.sort();
    out
}

fn check_schur_oracle(ctx: &Ctx) -> Vec<CaseOutcome> {
    abelian_types_up_to(100)
        .into_par_iter()
        .map(|t| {
            let mut p = Probe::default();
            let result = (|| -> Result<()> {
                let c = build_cocycle_cover(&t, None, ctx.limits())?;
                let d = derived_subgroup(c.total());
                let m = schur_multiplier(&t);
                p.check_eq("derived_order", d.order() as u64, m.order());
                p.check_eq("derived_type", sorted_type(&d.as_group())?, m);
                p.check("kernel_is_derived", d.same_members(c.kernel()));
                p.check(
                    "class_at_most_two",
                    nilpotency_class(c.total()).unwrap_or(usize::MAX) <= 2,
                );
                Ok(())
            })();
            finish_case(t.to_string(), None, p, result)
        })
        .collect()
}

fn finish_case(subject: String, n: Option<usize>, mut p: Probe, result: Result<()>) -> CaseOutcome {
    let verdict = match result {
        Err(e) if e.is_budget() => {
            p.note = Some(e.to_string());
            Verdict::Skipped
        }
        Err(e) => {
            p.failures.push(e.to_string());
            Verdict::Fail
        }
        Ok(()) if !p.failures.is_empty() => Verdict::Fail,
        Ok(()) if p.recorded_only => Verdict::Recorded,
        Ok(()) => Verdict::Pass,
    };
    CaseOutcome {
        subject,
        n,
        verdict,
        measured: p.measured,
        failures: p.failures,
        note: p.note,
    }
}

pub fn claim(id: &str) -> Result<&'static Claim> {
    CLAIMS
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownClaim(id.to_string()))
}

/// Runs one claim over the given subjects.
pub fn verify(claim_id: &str, subjects: &[Subject], opts: &SuiteOptions) -> Result<ClaimOutcome> {
    let c = claim(claim_id)?;
    let ctx = Ctx::new(opts);
    let mut out = run_claims(&ctx, &[c], subjects);
    Ok(out.pop().expect("one claim"))
}

/// Runs the named claims (all when empty) over the catalogue, in parallel.
/// Outcomes are sorted by claim id; cases keep catalogue order.
pub fn run_suite(claim_ids: &[String], opts: &SuiteOptions) -> Result<Vec<ClaimOutcome>> {
    let selected: Vec<&Claim> = if claim_ids.is_empty() {
        CLAIMS.iter().collect()
    } else {
        claim_ids
            .iter()
            .map(|id| claim(id))
            .collect::<Result<_>>()?
    };
    let mut subjects = load_all(opts.max_order, &opts.limits)?;
    if let Some(keys) = &opts.subjects {
        for k in keys {
            if !subjects.iter().any(|s| &s.key == k) && super::catalogue::entry(k).is_none() {
                return Err(Error::Precondition(format!(
                    "unknown catalogue group `{k}`"
                )));
            }
        }
        subjects.retain(|s| keys.contains(&s.key));
    }
    let ctx = Ctx::new(opts);
    let mut out = run_claims(&ctx, &selected, &subjects);
    out.sort_by(|a, b| a.claim.cmp(&b.claim));
    Ok(out)
}

fn run_claims(ctx: &Ctx, claims: &[&Claim], subjects: &[Subject]) -> Vec<ClaimOutcome> {
    enum Job<'c> {
        Case(&'c Subject, usize, Check),
        Global(fn(&Ctx) -> Vec<CaseOutcome>),
    }
    let mut jobs: Vec<(usize, Job)> = Vec::new();
    for (ci, c) in claims.iter().enumerate() {
        match &c.kind {
            Kind::PerSubject { applies, check } => {
                for s in subjects.iter().filter(|s| applies(s)) {
                    for n in c.ns(ctx.opts) {
                        jobs.push((ci, Job::Case(s, n, *check)));
                    }
                }
            }
            Kind::Global(f) => jobs.push((ci, Job::Global(*f))),
        }
    }
    let sampling_cases = jobs
        .iter()
        .filter(|(ci, j)| claims[*ci].id == "commutator-identity" && matches!(j, Job::Case(..)))
        .count()
        .max(1);
    let ctx = Ctx {
        samples_per_case: ctx.opts.samples.div_ceil(sampling_cases),
        ..Ctx::new(ctx.opts)
    };
    let results: Vec<(usize, Vec<CaseOutcome>)> = jobs
        .par_iter()
        .map(|(ci, job)| match job {
            Job::Case(s, n, check) => {
                let mut p = Probe::default();
                let r = check(&ctx, s, *n, &mut p);
                (*ci, vec![finish_case(s.key.clone(), Some(*n), p, r)])
            }
            Job::Global(f) => (*ci, f(&ctx)),
        })
        .collect();
    let mut per_claim: Vec<Vec<CaseOutcome>> = vec![Vec::new(); claims.len()];
    for (ci, cases) in results {
        per_claim[ci].extend(cases);
    }
    claims
        .iter()
        .zip(per_claim)
        .map(|(c, cases)| ClaimOutcome::aggregate(c, cases))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_sorted() {
        let ids: Vec<&str> = claims().iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn unknown_claim() {
        assert_eq!(
            verify("no-such-claim", &[], &SuiteOptions::default()).unwrap_err(),
            Error::UnknownClaim("no-such-claim".into())
        );
    }

    #[test]
    fn abelian_types_enumeration() {
        let ts = abelian_types_up_to(16);
        // orders 1..=16 have 1,1,1,2,1,1,1,3,2,1,1,2,1,1,1,5 abelian groups
        assert_eq!(ts.len(), 25);
        assert!(ts.contains(&AbelianType::from_divisors(&[2, 2, 2, 2]).unwrap()));
        assert!(ts.contains(&AbelianType::trivial()));
    }

    #[test]
    fn small_suite_passes() {
        let opts = SuiteOptions {
            max_order: Some(8),
            samples: 200,
            ..SuiteOptions::default()
        };
        let ids = [
            "central-sequence",
            "cover-independence",
            "read-centre-image",
            "k-order",
        ]
        .map(String::from);
        for outcome in run_suite(&ids, &opts).unwrap() {
            assert_eq!(outcome.verdict, Verdict::Pass, "{outcome:#?}");
        }
    }

    #[test]
    fn reduction_targets() {
        assert_eq!(reduction_target(&[6, 6]), vec![2, 2]);
        assert_eq!(reduction_target(&[3, 3]), vec![3, 1]);
        assert_eq!(reduction_target(&[2, 4]), vec![2, 2]);
    }
}
