use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{HarnessConfig, HarnessReport, Tally};
use crate::equivalence::Sampler;
use crate::semantics::arrows::*;
use crate::semantics::{Arrow, Elem, FiniteMagma, SemError, SemObject, Semantics};
use crate::syntax::{BiMagma, Mode, Prop};
use crate::typing::{check, Context};

/// Random trials per diagram.
const TRIALS: usize = 40;
/// Generated judgments for the substitution lemma.
const SUBSTITUTIONS: usize = 500;
/// Largest random carrier.
const MAX_CARRIER: usize = 4;

/// The structural lemmas of the model on random small objects, uniqueness
/// of the mediating arrow among homomorphisms of commutative semigroups, and
/// the substitution lemma.
pub fn category(cfg: &HarnessConfig) -> HarnessReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tally = Tally::default();
    let rerun = format!("parlam harness category --seed {}{}", cfg.seed, cfg.mode.cli_flags());
    let run = |name: &str, tally: &mut Tally, r: Result<Option<String>, SemError>| {
        tally.checks += 1;
        match r {
            Ok(None) => {}
            Ok(Some(detail)) => tally.fail(name, detail, rerun.clone()),
            Err(SemError::SizeCap { .. }) => tally.skipped += 1,
            Err(e) => tally.fail(name, e.to_string(), rerun.clone()),
        }
    };
    let pools = [cfg.mode.clone(), Mode::algebraic(BiMagma::rnd())];
    for pool in &pools {
        for _ in 0..TRIALS {
            let g = Objects::new(pool);
            run("bifunctoriality", &mut tally, bifunctoriality(&g, &mut rng, cfg.size_cap));
            run("injections", &mut tally, injections(&g, &mut rng));
            run("inclusion", &mut tally, inclusion_lemma(&g, &mut rng, cfg.size_cap));
            run("mediating-arrow", &mut tally, mediating(&g, &mut rng, cfg.size_cap));
            run("ccc", &mut tally, ccc(&g, &mut rng, cfg.size_cap));
        }
    }
    let groups = comm_semigroups(3);
    let unique = coproduct_uniqueness(&groups, cfg.size_cap);
    tally.checks += unique.checks;
    tally.skipped += unique.skipped;
    tally.failures.extend(unique.failures.into_iter().map(|mut f| {
        f.rerun = rerun.clone();
        f
    }));
    let sub = substitution(cfg, &mut rng, &rerun);
    let notes = vec![
        format!(
            "{} commutative semigroups of size <= 3 up to isomorphism",
            groups.len()
        ),
        format!("{} substitution instances", sub.1),
    ];
    tally.merge(sub.0);
    HarnessReport::new("category", cfg, tally, notes, start.elapsed())
}

/// A source of random small objects and arrows.
struct Objects {
    scalars: Option<Arc<BiMagma>>,
}

impl Objects {
    fn new(mode: &Mode) -> Objects {
        Objects {
            scalars: mode.scalars().map(|s| Arc::new(s.clone())),
        }
    }

    fn object(&self, rng: &mut ChaCha8Rng) -> SemObject {
        match rng.gen_range(0..6) {
            0 => SemObject::unit(),
            1 => match &self.scalars {
                Some(s) => SemObject::scalars(s.clone()),
                None => SemObject::scalars(Arc::new(BiMagma::z4())),
            },
            2 => SemObject::cp(&SemObject::unit(), &SemObject::unit()),
            _ => {
                let n = rng.gen_range(1..=MAX_CARRIER);
                let table = |rows: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<u16>> {
                    (0..rows)
                        .map(|_| (0..n).map(|_| rng.gen_range(0..n as u16)).collect())
                        .collect()
                };
                let op = table(n, rng);
                let act = self.scalars.as_ref().map(|s| table(s.len(), rng));
                SemObject::magma(FiniteMagma { op, act })
            }
        }
    }

    fn arrow(&self, dom: &SemObject, cod: &SemObject, rng: &mut ChaCha8Rng) -> Result<Arrow, SemError> {
        let cod_car = cod.carrier(1 << 16)?;
        let n = dom.carrier(1 << 16)?.len();
        let table = (0..n)
            .map(|_| cod_car.choose(rng).cloned().ok_or_else(|| SemError::Undefined("empty codomain".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Arrow::from_table(dom, cod, table)
    }

    fn scalar_count(&self) -> u16 {
        self.scalars.as_ref().map_or(0, |s| s.len() as u16)
    }
}

fn differ(what: &str, l: &Arrow, r: &Arrow) -> Result<Option<String>, SemError> {
    if l.equals(r)? {
        return Ok(None);
    }
    let (x, a, b) = l.first_difference(r).expect("arrows differ");
    Ok(Some(format!(
        "{what}: at {} the composites give {} and {}",
        l.dom().render(&x),
        l.cod().render(&a),
        l.cod().render(&b)
    )))
}

fn bifunctoriality(g: &Objects, rng: &mut ChaCha8Rng, cap: u64) -> Result<Option<String>, SemError> {
    let [a0, a1, a2, b0, b1, b2] = std::array::from_fn(|_| g.object(rng));
    let f1 = g.arrow(&a0, &a1, rng)?;
    let f2 = g.arrow(&a1, &a2, rng)?;
    let g1 = g.arrow(&b0, &b1, rng)?;
    let g2 = g.arrow(&b1, &b2, rng)?;
    let lhs = compose(&cp_map(&f2, &g2, cap)?, &cp_map(&f1, &g1, cap)?, cap)?;
    let rhs = cp_map(&compose(&f2, &f1, cap)?, &compose(&g2, &g1, cap)?, cap)?;
    if let Some(d) = differ("(f ⊕ g) ∘ (f' ⊕ g') = (f ∘ f') ⊕ (g ∘ g')", &lhs, &rhs)? {
        return Ok(Some(d));
    }
    let ids = cp_map(&identity(&a0, cap)?, &identity(&b0, cap)?, cap)?;
    differ("Id ⊕ Id = Id", &ids, &identity(&SemObject::cp(&a0, &b0), cap)?)
}

fn injections(g: &Objects, rng: &mut ChaCha8Rng) -> Result<Option<String>, SemError> {
    let (a, b) = (g.object(rng), g.object(rng));
    let c = SemObject::cp(&a, &b);
    for (side, o) in [(0, &a), (1, &b)] {
        let inj = |x: &Elem| if side == 0 { Elem::l(x.clone()) } else { Elem::r(x.clone()) };
        let car = o.carrier(1 << 16)?;
        for x in car.iter() {
            for y in car.iter() {
                let l = inj(&o.op(x, y)?);
                let r = c.op(&inj(x), &inj(y))?;
                if l != r {
                    return Ok(Some(format!(
                        "injection {} is not additive at {}, {}",
                        side + 1,
                        o.render(x),
                        o.render(y)
                    )));
                }
            }
            for s in 0..g.scalar_count() {
                if inj(&o.act(s, x)?) != c.act(s, &inj(x))? {
                    return Ok(Some(format!(
                        "injection {} does not commute with scalar {s} at {}",
                        side + 1,
                        o.render(x)
                    )));
                }
            }
        }
    }
    Ok(None)
}

fn inclusion_lemma(g: &Objects, rng: &mut ChaCha8Rng, cap: u64) -> Result<Option<String>, SemError> {
    let (a, b) = (g.object(rng), g.object(rng));
    let c = SemObject::cp(&a, &b);
    let lhs = compose(&op_arrow(&c, cap)?, &product_map(&inj1(&a, &b, cap)?, &inj2(&a, &b, cap)?, cap)?, cap)?;
    differ("∔ ∘ (i1 × i2) = inclusion", &lhs, &inclusion(&a, &b, cap)?)
}

fn mediating(g: &Objects, rng: &mut ChaCha8Rng, cap: u64) -> Result<Option<String>, SemError> {
    let (a, b, c) = (g.object(rng), g.object(rng), g.object(rng));
    let f = g.arrow(&a, &c, rng)?;
    let h = g.arrow(&b, &c, rng)?;
    let m = mediate(&f, &h, cap)?;
    if let Some(d) = differ("[f,g] ∘ i1 = f", &compose(&m, &inj1(&a, &b, cap)?, cap)?, &f)? {
        return Ok(Some(d));
    }
    if let Some(d) = differ("[f,g] ∘ i2 = g", &compose(&m, &inj2(&a, &b, cap)?, cap)?, &h)? {
        return Ok(Some(d));
    }
    let lhs = compose(&m, &inclusion(&a, &b, cap)?, cap)?;
    let rhs = compose(&op_arrow(&c, cap)?, &product_map(&f, &h, cap)?, cap)?;
    differ("[f,g] ∘ inclusion = ⊕̂ ∘ (f × g)", &lhs, &rhs)
}

fn ccc(g: &Objects, rng: &mut ChaCha8Rng, cap: u64) -> Result<Option<String>, SemError> {
    let (a, gamma, b) = (g.object(rng), g.object(rng), g.object(rng));
    let f = g.arrow(&SemObject::prod(&a, &gamma), &b, rng)?;
    let uncurry = |h: &Arrow| -> Result<Arrow, SemError> {
        compose(
            &eval(&a, &b, cap)?,
            &compose(&product_map(h, &identity(&a, cap)?, cap)?, &sigma(&a, &gamma, cap)?, cap)?,
            cap,
        )
    };
    let curried = curry(&f, cap)?;
    if let Some(d) = differ("ε ∘ (curry f × Id) = f", &uncurry(&curried)?, &f)? {
        return Ok(Some(d));
    }
    let h = g.arrow(&gamma, &SemObject::hom(&a, &b), rng)?;
    differ("curry(ε ∘ (h × Id)) = h", &curry(&uncurry(&h)?, cap)?, &h)
}

/// Every commutative semigroup with at most `max` elements, one per
/// isomorphism class, as operation tables.
pub fn comm_semigroups(max: usize) -> Vec<Vec<Vec<u16>>> {
    let mut out = Vec::new();
    for n in 1..=max {
        let cells = n * n;
        let mut classes: Vec<Vec<u16>> = Vec::new();
        let perms = permutations(n);
        for code in 0..(n as u64).pow(cells as u32) {
            let mut flat = vec![0u16; cells];
            let mut c = code;
            for v in flat.iter_mut() {
                *v = (c % n as u64) as u16;
                c /= n as u64;
            }
            let op = |x: usize, y: usize| flat[x * n + y] as usize;
            let comm = (0..n).all(|x| (0..n).all(|y| op(x, y) == op(y, x)));
            let assoc = comm
                && (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| op(op(x, y), z) == op(x, op(y, z)))));
            if !assoc {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    // Relabel element i as p[i].
                    let mut t = vec![0u16; cells];
                    for x in 0..n {
                        for y in 0..n {
                            t[p[x] * n + p[y]] = p[op(x, y)] as u16;
                        }
                    }
                    t
                })
                .min()
                .expect("at least one permutation");
            if !classes.contains(&canon) {
                classes.push(canon);
            }
        }
        classes.sort();
        out.extend(classes.into_iter().map(|flat| flat.chunks(n).map(|r| r.to_vec()).collect()));
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn homomorphisms(a: &[Vec<u16>], c: &[Vec<u16>]) -> Vec<Vec<u16>> {
    let (n, m) = (a.len(), c.len());
    let mut out = Vec::new();
    for code in 0..(m as u64).pow(n as u32) {
        let mut h = vec![0u16; n];
        let mut k = code;
        for v in h.iter_mut() {
            *v = (k % m as u64) as u16;
            k /= m as u64;
        }
        let ok = (0..n).all(|x| {
            (0..n).all(|y| h[a[x][y] as usize] == c[h[x] as usize][h[y] as usize])
        });
        if ok {
            out.push(h);
        }
    }
    out
}

/// Counts homomorphisms `h : A ⊕ B → C` with `h ∘ i1 = f`, `h ∘ i2 = g`,
/// stopping at two. Values on tagged elements are forced; the rest are
/// searched with every closed constraint checked as soon as it is known.
fn count_mediators(sum: &[Vec<usize>], forced: &[Option<u16>], c: &[Vec<u16>]) -> (usize, Option<Vec<u16>>) {
    fn consistent(sum: &[Vec<usize>], h: &[Option<u16>], c: &[Vec<u16>], i: usize) -> bool {
        if h[i].is_none() {
            return true;
        }
        for x in 0..h.len() {
            let Some(hx) = h[x] else { continue };
            for y in 0..h.len() {
                let Some(hy) = h[y] else { continue };
                let z = sum[x][y];
                if x != i && y != i && z != i {
                    continue;
                }
                if let Some(hz) = h[z] {
                    if hz != c[hx as usize][hy as usize] {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn go(
        sum: &[Vec<usize>],
        h: &mut Vec<Option<u16>>,
        c: &[Vec<u16>],
        i: usize,
        found: &mut (usize, Option<Vec<u16>>),
    ) {
        if found.0 >= 2 {
            return;
        }
        if i == h.len() {
            found.0 += 1;
            found.1.get_or_insert_with(|| h.iter().map(|v| v.expect("assigned")).collect());
            return;
        }
        if h[i].is_some() {
            if consistent(sum, h, c, i) {
                go(sum, h, c, i + 1, found);
            }
            return;
        }
        for v in 0..c.len() as u16 {
            h[i] = Some(v);
            if consistent(sum, h, c, i) {
                go(sum, h, c, i + 1, found);
            }
        }
        h[i] = None;
    }
    let mut h = forced.to_vec();
    let mut found = (0, None);
    // Forced values must agree among themselves before the search starts.
    if (0..h.len()).all(|i| consistent(sum, &h, c, i)) {
        go(sum, &mut h, c, 0, &mut found);
    }
    found
}

fn coproduct_uniqueness(groups: &[Vec<Vec<u16>>], cap: u64) -> Tally {
    let obj = |t: &Vec<Vec<u16>>| {
        SemObject::magma(FiniteMagma {
            op: t.clone(),
            act: None,
        })
    };
    let triples: Vec<(usize, usize, usize)> = (0..groups.len())
        .flat_map(|a| (0..groups.len()).flat_map(move |b| (0..groups.len()).map(move |c| (a, b, c))))
        .collect();
    let parts: Vec<Tally> = triples
        .par_iter()
        .map(|&(ia, ib, ic)| {
            let mut tally = Tally::default();
            let (a, b, c) = (obj(&groups[ia]), obj(&groups[ib]), obj(&groups[ic]));
            let r = (|| -> Result<(), SemError> {
                let s = SemObject::cp(&a, &b);
                let car = s.carrier(cap)?;
                let sum: Vec<Vec<usize>> = car
                    .iter()
                    .map(|x| {
                        car.iter()
                            .map(|y| Ok(s.rank(&s.op(x, y)?)? as usize))
                            .collect::<Result<Vec<_>, SemError>>()
                    })
                    .collect::<Result<_, _>>()?;
                let ct = &groups[ic];
                let c_car = c.carrier(cap)?;
                for f in homomorphisms(&groups[ia], ct) {
                    for g in homomorphisms(&groups[ib], ct) {
                        tally.checks += 1;
                        let forced: Vec<Option<u16>> = car
                            .iter()
                            .map(|x| match x {
                                Elem::L(v) => Some(f[a.rank(v).expect("rank") as usize]),
                                Elem::R(v) => Some(g[b.rank(v).expect("rank") as usize]),
                                _ => None,
                            })
                            .collect();
                        let (count, h) = count_mediators(&sum, &forced, ct);
                        let to_arrow = |d: &SemObject, t: &[u16]| {
                            Arrow::from_table(d, &c, t.iter().map(|&i| c_car[i as usize].clone()).collect())
                        };
                        let m = mediate(&to_arrow(&a, &f)?, &to_arrow(&b, &g)?, cap)?;
                        let detail = format!(
                            "A = {:?}, B = {:?}, C = {:?}, f = {f:?}, g = {g:?}",
                            groups[ia], groups[ib], groups[ic]
                        );
                        match (count, h) {
                            (1, Some(h)) if to_arrow(&s, &h)?.equals(&m)? => {}
                            (1, _) => tally.fail(
                                "coproduct-uniqueness",
                                format!("the unique homomorphism is not [f,g]: {detail}"),
                                String::new(),
                            ),
                            (0, _) => tally.fail(
                                "coproduct-uniqueness",
                                format!("[f,g] is not a homomorphism: {detail}"),
                                String::new(),
                            ),
                            _ => tally.fail(
                                "coproduct-uniqueness",
                                format!("several homomorphisms satisfy the triangles: {detail}"),
                                String::new(),
                            ),
                        }
                    }
                }
                Ok(())
            })();
            if let Err(e) = r {
                tally.checks += 1;
                tally.fail("coproduct-uniqueness", e.to_string(), String::new());
            }
            tally
        })
        .collect();
    let mut tally = Tally::default();
    for p in parts {
        tally.merge(p);
    }
    tally
}

/// `⟦Γ ⊢ t[u/x] : B⟧ = ⟦x:A, Γ ⊢ t : B⟧ ∘ ⟨⟦Γ ⊢ u : A⟧, Id⟩` on generated judgments.
fn substitution(cfg: &HarnessConfig, rng: &mut ChaCha8Rng, rerun: &str) -> (Tally, usize) {
    let mode = &cfg.mode;
    let sem = Semantics::new(mode, cfg.size_cap);
    let mut sampler = Sampler::new(rng.gen(), mode);
    let small = Prop::all_up_to(1);
    let mut tally = Tally::default();
    let mut made = 0;
    let mut attempts = 0;
    while made < SUBSTITUTIONS && attempts < 50 * SUBSTITUTIONS {
        attempts += 1;
        let gamma = if rng.gen_bool(0.5) {
            Context::new()
        } else {
            let p = small.choose(rng).expect("nonempty").clone();
            Context::new().extend("y", p).expect("fresh")
        };
        let Some((u, a)) = sampler.sample_up_to_in(&gamma, None, 5, 8) else { continue };
        let inner = gamma.extend("x", a.clone()).expect("fresh");
        let Some((t, b)) = sampler.sample_up_to_in(&inner, None, 6, 8) else { continue };
        if !t.free_vars().iter().any(|v| &**v == "x") {
            continue;
        }
        made += 1;
        tally.checks += 1;
        let substituted = t.subst("x", &u);
        let r = (|| -> Result<Option<String>, String> {
            let js = check(&gamma, &substituted, &b, mode).map_err(|e| e.to_string())?;
            let jt = check(&inner, &t, &b, mode).map_err(|e| e.to_string())?;
            let ju = check(&gamma, &u, &a, mode).map_err(|e| e.to_string())?;
            let cap = cfg.size_cap;
            let sem_err = |e: SemError| e.to_string();
            let lhs = sem.denote_term(&js).map_err(sem_err)?;
            let dt = sem.denote_term(&jt).map_err(sem_err)?;
            let du = sem.denote_term(&ju).map_err(sem_err)?;
            let g_obj = sem.denote_context(&gamma.props()).map_err(sem_err)?;
            let pairing = compose(
                &product_map(&du, &identity(&g_obj, cap).map_err(sem_err)?, cap).map_err(sem_err)?,
                &diag(&g_obj, cap).map_err(sem_err)?,
                cap,
            )
            .map_err(sem_err)?;
            let rhs = compose(&dt, &pairing, cap).map_err(sem_err)?;
            differ("substitution", &lhs, &rhs).map_err(sem_err)
        })();
        let what = format!("{gamma} |- ({t})[{u}/x] : {b}");
        match r {
            Ok(None) => {}
            Ok(Some(d)) => tally.fail("substitution", format!("{what}\n{d}"), rerun.to_string()),
            Err(e) if e.contains("size cap") => tally.skipped += 1,
            Err(e) => tally.fail("substitution", format!("{what}\n{e}"), rerun.to_string()),
        }
    }
    (tally, made)
}
