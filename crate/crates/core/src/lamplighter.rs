//! The wreath product `(Z/pZ) ≀ Z^d` and its actions on the finite coset
//! spaces `X_m`, identified with `(Z/pZ) × (Z/mZ)^d`.
//!
//! An element is a pair `(f, u)` with `f: Z^d -> Z/pZ` of finite support and
//! `u` a translation. Products follow `(f,u)·(f',u') = (x ↦ f(x+u') + f'(x),
//! u+u')`, the convention under which `(f, u)` sends the identity coset of
//! `H_m` to `(Σ_{x ∈ mZ^d} f(x), u mod m)` and the coset action is a left
//! action.
//!
//! The Schreier graph of `X_m` is a `p`-cycle through the lamp values over
//! the torus origin, with a copy of the `(Z/mZ)^d` Cayley graph glued to each
//! cycle vertex.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::graph::{self, EdgeLabel, Graph};

/// Group element `(f, u)`: finitely many lit lamps plus a translation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LamplighterElement {
    /// Lamp values, only nonzero entries, keyed by position in `Z^d`.
    lamps: BTreeMap<Vec<i64>, u64>,
    /// Translation part.
    shift: Vec<i64>,
}

/// Ambient parameters of the wreath product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathParams {
    pub p: u64,
    pub d: u8,
}

impl WreathParams {
    pub fn new(p: u64, d: u8) -> Result<Self> {
        if p < 2 || d < 1 {
            return Err(Error::InvalidArgument(format!(
                "wreath product needs p >= 2 and d >= 1, got p={p} d={d}"
            )));
        }
        Ok(WreathParams { p, d })
    }
}

impl LamplighterElement {
    pub fn identity(params: WreathParams) -> Self {
        LamplighterElement {
            lamps: BTreeMap::new(),
            shift: vec![0; params.d as usize],
        }
    }

    pub fn new(params: WreathParams, lamps: &[(Vec<i64>, u64)], shift: Vec<i64>) -> Result<Self> {
        if shift.len() != params.d as usize {
            return Err(Error::InvalidArgument("shift dimension mismatch".into()));
        }
        let mut map = BTreeMap::new();
        for (pos, val) in lamps {
            if pos.len() != params.d as usize {
                return Err(Error::InvalidArgument("lamp position dimension mismatch".into()));
            }
            let v = val % params.p;
            if v != 0 {
                let entry = map.entry(pos.clone()).or_insert(0);
                *entry = (*entry + v) % params.p;
                if *entry == 0 {
                    map.remove(pos);
                }
            }
        }
        Ok(LamplighterElement { lamps: map, shift })
    }

    /// The lamp generator `(δ_0, 0)`.
    pub fn lamp_generator(params: WreathParams) -> Self {
        LamplighterElement::new(params, &[(vec![0; params.d as usize], 1)], vec![0; params.d as usize])
            .unwrap()
    }

    /// The translation generator `(0, ±e_i)`.
    pub fn translation_generator(params: WreathParams, axis: u8, sign: i64) -> Self {
        let mut shift = vec![0i64; params.d as usize];
        shift[axis as usize] = sign;
        LamplighterElement { lamps: BTreeMap::new(), shift }
    }

    pub fn lamps(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.lamps
    }

    pub fn shift(&self) -> &[i64] {
        &self.shift
    }

    pub fn is_identity(&self) -> bool {
        self.lamps.is_empty() && self.shift.iter().all(|&c| c == 0)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self, params: WreathParams) -> Self {
        let mut lamps = other.lamps.clone();
        for (pos, val) in &self.lamps {
            let moved: Vec<i64> = pos
                .iter()
                .zip(&other.shift)
                .map(|(a, b)| a - b)
                .collect();
            let entry = lamps.entry(moved).or_insert(0);
            *entry = (*entry + val) % params.p;
        }
        lamps.retain(|_, v| *v != 0);
        let shift = self
            .shift
            .iter()
            .zip(&other.shift)
            .map(|(a, b)| a + b)
            .collect();
        LamplighterElement { lamps, shift }
    }

    pub fn inverse(&self, params: WreathParams) -> Self {
        let mut lamps = BTreeMap::new();
        for (pos, val) in &self.lamps {
            let moved: Vec<i64> = pos.iter().zip(&self.shift).map(|(a, b)| a + b).collect();
            lamps.insert(moved, (params.p - val) % params.p);
        }
        lamps.retain(|_, v| *v != 0);
        LamplighterElement {
            lamps,
            shift: self.shift.iter().map(|c| -c).collect(),
        }
    }

    /// ℓ¹ norm of the translation part.
    pub fn shift_norm(&self) -> i64 {
        self.shift.iter().map(|c| c.abs()).sum()
    }
}

/// A point of `X_m = (Z/pZ) × (Z/mZ)^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetPoint {
    pub lamp: u64,
    pub torus: Vec<u64>,
    pub modulus: u64,
}

impl CosetPoint {
    pub fn origin(params: WreathParams, m: u64) -> Self {
        CosetPoint { lamp: 0, torus: vec![0; params.d as usize], modulus: m }
    }

    pub fn key(&self) -> String {
        let torus: Vec<String> = self.torus.iter().map(|v| v.to_string()).collect();
        format!("{}|{}", self.lamp, torus.join(","))
    }
}

fn rem(v: i64, m: u64) -> u64 {
    v.rem_euclid(m as i64) as u64
}

/// Left action of `g` on a point of `X_m`.
pub fn coset_act(
    g: &LamplighterElement,
    x: &CosetPoint,
    params: WreathParams,
) -> Result<CosetPoint> {
    if x.torus.len() != params.d as usize {
        return Err(Error::InvalidArgument("coset point dimension mismatch".into()));
    }
    let m = x.modulus;
    let mut lamp_delta = 0u64;
    for (pos, val) in &g.lamps {
        let congruent = pos
            .iter()
            .zip(&x.torus)
            .all(|(c, t)| rem(*c, m) == *t);
        if congruent {
            lamp_delta = (lamp_delta + val) % params.p;
        }
    }
    let torus = x
        .torus
        .iter()
        .zip(&g.shift)
        .map(|(t, s)| rem(*t as i64 + s, m))
        .collect();
    Ok(CosetPoint {
        lamp: (x.lamp + lamp_delta) % params.p,
        torus,
        modulus: m,
    })
}

/// Image of the identity coset of `H_m`: `(Σ_{x ∈ mZ^d} f(x), u mod m)`.
pub fn project(g: &LamplighterElement, m: u64, params: WreathParams) -> Result<CosetPoint> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("modulus {m} below 2")));
    }
    coset_act(g, &CosetPoint::origin(params, m), params)
}

/// The Schreier graph of the action on `X_m`.
#[derive(Debug, Clone)]
pub struct CosetGraph {
    pub params: WreathParams,
    pub m: u64,
    generators: Vec<LamplighterElement>,
}

/// Symmetric generating list: lamp generator (with inverse when `p > 2`)
/// and the `±e_i` translations.
pub fn standard_generators(params: WreathParams) -> Vec<LamplighterElement> {
    let mut gens = vec![LamplighterElement::lamp_generator(params)];
    if params.p > 2 {
        gens.push(LamplighterElement::lamp_generator(params).inverse(params));
    }
    for axis in 0..params.d {
        gens.push(LamplighterElement::translation_generator(params, axis, 1));
        gens.push(LamplighterElement::translation_generator(params, axis, -1));
    }
    gens
}

/// Builds `X_m`; `p·m^d` must stay within `cap`.
pub fn build_coset_graph(params: WreathParams, m: u64, cap: usize) -> Result<CosetGraph> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("modulus {m} below 2")));
    }
    let size = params.p as u128 * (m as u128).pow(params.d as u32);
    if size > cap as u128 {
        return Err(Error::CapExceeded {
            cap,
            context: format!("building X_{m} with {size} points"),
        });
    }
    Ok(CosetGraph {
        params,
        m,
        generators: standard_generators(params),
    })
}

impl CosetGraph {
    pub fn size(&self) -> usize {
        (self.params.p as u128 * (self.m as u128).pow(self.params.d as u32)) as usize
    }

    /// Exact diameter, memoized per `(p, d, m)` since the witness sweeps
    /// revisit the same spaces for many elements.
    pub fn diameter(&self) -> u32 {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u8, u64), u32>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (self.params.p, self.params.d, self.m);
        if let Some(&d) = cache.lock().unwrap().get(&key) {
            return d;
        }
        let origin = CosetPoint::origin(self.params, self.m);
        let d = graph::component_diameter(self, &origin, self.size()).expect("finite graph");
        cache.lock().unwrap().insert(key, d);
        d
    }
}

impl Graph for CosetGraph {
    type Point = CosetPoint;

    fn neighbors(&self, p: &CosetPoint) -> Vec<(EdgeLabel, CosetPoint)> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                (
                    EdgeLabel { factor: 0, generator: i as u32 },
                    coset_act(g, p, self.params).expect("matching dimension"),
                )
            })
            .collect()
    }

    fn key(&self, p: &CosetPoint) -> String {
        p.key()
    }

    fn vertices(&self) -> Option<Vec<CosetPoint>> {
        let d = self.params.d as usize;
        let mut out = Vec::with_capacity(self.size());
        let mut torus = vec![0u64; d];
        loop {
            for lamp in 0..self.params.p {
                out.push(CosetPoint {
                    lamp,
                    torus: torus.clone(),
                    modulus: self.m,
                });
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return Some(out);
                }
                torus[axis] += 1;
                if torus[axis] < self.m {
                    break;
                }
                torus[axis] = 0;
                axis += 1;
            }
        }
    }
}

/// Checks the structural description of `X_m`: dropping lamp edges leaves
/// `p` disjoint torus Cayley graphs, and lamp edges form a `p`-cycle over
/// the torus origin.
pub fn verify_coset_structure(params: WreathParams, m: u64, cap: usize) -> Result<()> {
    let g = build_coset_graph(params, m, cap)?;
    let vertices = g.vertices().unwrap();
    if vertices.len() != g.size() {
        return Err(Error::InvalidArgument("vertex count mismatch".into()));
    }
    let lamp_gen = LamplighterElement::lamp_generator(params);
    for v in &vertices {
        let image = coset_act(&lamp_gen, v, params)?;
        let at_origin = v.torus.iter().all(|&t| t == 0);
        if at_origin {
            if image.lamp != (v.lamp + 1) % params.p || image.torus != v.torus {
                return Err(Error::InvalidArgument("lamp edge shape wrong at origin".into()));
            }
        } else if image != *v {
            return Err(Error::InvalidArgument(
                "lamp generator moved a point outside the origin fiber".into(),
            ));
        }
        for axis in 0..params.d {
            let t = LamplighterElement::translation_generator(params, axis, 1);
            let w = coset_act(&t, v, params)?;
            if w.lamp != v.lamp {
                return Err(Error::InvalidArgument("translation changed a lamp".into()));
            }
            let mut expected = v.torus.clone();
            expected[axis as usize] = (expected[axis as usize] + 1) % m;
            if w.torus != expected {
                return Err(Error::InvalidArgument("translation edge shape wrong".into()));
            }
        }
    }
    Ok(())
}

/// Witness that some point of some `X_m` is displaced by a fixed fraction of
/// the diameter.
#[derive(Debug, Clone)]
pub struct CdWitness {
    pub m: u64,
    pub point: CosetPoint,
    pub displacement: u32,
    pub diameter: u32,
}

impl CdWitness {
    pub fn ratio_at_least(&self, num: u32, den: u32) -> bool {
        self.displacement as u64 * den as u64 >= self.diameter as u64 * num as u64
    }
}

/// Certified displacement ratios, one per ambient `(p, d)`, computed by the
/// exhaustive sweep in `cd_ratio_is_exact_over_short_words` and frozen here.
pub fn frozen_ratio(params: WreathParams) -> Option<(u32, u32)> {
    match (params.p, params.d) {
        (2, 1) => Some((1, 3)),
        (3, 1) => Some((1, 3)),
        (2, 2) => Some((1, 5)),
        _ => None,
    }
}

/// Controlled-diameter witness: picks `m` following the translation /
/// pure-lamp cases, then scans `X_m` for the best displaced point.
pub fn cd_witness(g: &LamplighterElement, params: WreathParams) -> Result<CdWitness> {
    if g.is_identity() {
        return Err(Error::TrivialElement);
    }
    let m = if g.shift_norm() > 0 {
        2 * g.shift_norm() as u64
    } else {
        let far = g
            .lamps
            .keys()
            .max_by_key(|pos| (pos.iter().map(|c| c.abs()).sum::<i64>(), std::cmp::Reverse((*pos).clone())))
            .expect("nontrivial lamp part");
        let norm: i64 = far.iter().map(|c| c.abs()).sum();
        (2 * norm as u64 + 1).max(2)
    };
    let graph = build_coset_graph(params, m, 1 << 22)?;
    let diameter = graph.diameter();
    let mut best: Option<(u32, CosetPoint)> = None;
    for x in graph.vertices().unwrap() {
        let gx = coset_act(g, &x, params)?;
        if gx == x {
            continue;
        }
        let disp = graph::distance(&graph, &x, &gx, graph.size())?
            .expect("same component on a connected graph");
        let better = match &best {
            None => true,
            Some((bd, bp)) => disp > *bd || (disp == *bd && x.key() < bp.key()),
        };
        if better {
            best = Some((disp, x));
        }
    }
    let (displacement, point) = best.ok_or_else(|| {
        Error::ProbeInapplicable(format!("element acts trivially on X_{m}"))
    })?;
    Ok(CdWitness { m, point, displacement, diameter })
}

/// All distinct elements spelled by generator words of length at most
/// `max_len`.
pub fn elements_up_to_length(params: WreathParams, max_len: usize) -> Vec<LamplighterElement> {
    let gens = standard_generators(params);
    let mut seen: HashMap<LamplighterElement, ()> = HashMap::new();
    let identity = LamplighterElement::identity(params);
    seen.insert(identity.clone(), ());
    let mut frontier = vec![identity];
    let mut out: Vec<LamplighterElement> = Vec::new();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for e in &frontier {
            for s in &gens {
                let f = s.compose(e, params);
                if !seen.contains_key(&f) {
                    seen.insert(f.clone(), ());
                    out.push(f.clone());
                    next.push(f);
                }
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    const P2D1: WreathParams = WreathParams { p: 2, d: 1 };

    #[test]
    fn projection_examples() {
        let delta = LamplighterElement::lamp_generator(P2D1);
        let pt = project(&delta, 3, P2D1).unwrap();
        assert_eq!((pt.lamp, pt.torus.as_slice()), (1, &[0][..]));

        let id = LamplighterElement::identity(P2D1);
        let pt = project(&id, 5, P2D1).unwrap();
        assert_eq!((pt.lamp, pt.torus.as_slice()), (0, &[0][..]));

        let t5 = LamplighterElement::new(P2D1, &[], vec![5]).unwrap();
        let pt = project(&t5, 3, P2D1).unwrap();
        assert_eq!((pt.lamp, pt.torus.as_slice()), (0, &[2][..]));

        assert!(project(&id, 1, P2D1).is_err());
    }

    #[test]
    fn coset_action_examples() {
        let p3 = WreathParams { p: 3, d: 1 };
        let lamp = LamplighterElement::lamp_generator(p3);
        let x = CosetPoint { lamp: 0, torus: vec![0], modulus: 5 };
        let y = coset_act(&lamp, &x, p3).unwrap();
        assert_eq!((y.lamp, y.torus.as_slice()), (1, &[0][..]));

        let off = CosetPoint { lamp: 1, torus: vec![2], modulus: 5 };
        assert_eq!(coset_act(&lamp, &off, p3).unwrap(), off);

        let t = LamplighterElement::translation_generator(p3, 0, 1);
        let x = CosetPoint { lamp: 2, torus: vec![4], modulus: 5 };
        let y = coset_act(&t, &x, p3).unwrap();
        assert_eq!((y.lamp, y.torus.as_slice()), (2, &[0][..]));
    }

    #[test]
    fn group_law_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for params in [P2D1, WreathParams { p: 3, d: 1 }, WreathParams { p: 2, d: 2 }] {
            for _ in 0..200 {
                let g = random_element(&mut rng, params);
                let h = random_element(&mut rng, params);
                let gh = g.compose(&h, params);
                let back = gh.compose(&h.inverse(params), params);
                assert_eq!(back, g);
                assert!(g.compose(&g.inverse(params), params).is_identity());
            }
        }
    }

    fn random_element(
        rng: &mut rand_chacha::ChaCha8Rng,
        params: WreathParams,
    ) -> LamplighterElement {
        let d = params.d as usize;
        let lamps: Vec<(Vec<i64>, u64)> = (0..rng.gen_range(0..4))
            .map(|_| {
                (
                    (0..d).map(|_| rng.gen_range(-4i64..5)).collect(),
                    rng.gen_range(0..params.p),
                )
            })
            .collect();
        let shift = (0..d).map(|_| rng.gen_range(-5i64..6)).collect();
        LamplighterElement::new(params, &lamps, shift).unwrap()
    }

    #[test]
    fn projection_is_equivariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for params in [P2D1, WreathParams { p: 3, d: 1 }, WreathParams { p: 2, d: 2 }] {
            for _ in 0..334 {
                let g = random_element(&mut rng, params);
                let h = random_element(&mut rng, params);
                let m = rng.gen_range(2u64..9);
                let lhs = project(&g.compose(&h, params), m, params).unwrap();
                let rhs = coset_act(&g, &project(&h, m, params).unwrap(), params).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn torus_projection_is_equivariant_for_translations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let params = WreathParams { p: 2, d: 2 };
        for _ in 0..200 {
            let g = random_element(&mut rng, params);
            let m = rng.gen_range(2u64..7);
            let x = CosetPoint {
                lamp: rng.gen_range(0..2),
                torus: vec![rng.gen_range(0..m), rng.gen_range(0..m)],
                modulus: m,
            };
            let y = coset_act(&g, &x, params).unwrap();
            let expected: Vec<u64> = x
                .torus
                .iter()
                .zip(g.shift())
                .map(|(t, s)| (*t as i64 + s).rem_euclid(m as i64) as u64)
                .collect();
            assert_eq!(y.torus, expected);
        }
    }

    #[test]
    fn coset_space_sizes() {
        let g = build_coset_graph(P2D1, 3, 1000).unwrap();
        assert_eq!(g.size(), 6);
        assert_eq!(g.vertices().unwrap().len(), 6);
        let g = build_coset_graph(WreathParams { p: 3, d: 2 }, 2, 1000).unwrap();
        assert_eq!(g.size(), 12);
        assert!(build_coset_graph(P2D1, 100, 10).is_err());
    }

    #[test]
    fn structure_checks() {
        verify_coset_structure(P2D1, 3, 1000).unwrap();
        verify_coset_structure(WreathParams { p: 3, d: 1 }, 4, 1000).unwrap();
        verify_coset_structure(WreathParams { p: 2, d: 2 }, 3, 1000).unwrap();
    }

    #[test]
    fn small_coset_diameter_is_exact() {
        let g = build_coset_graph(P2D1, 3, 1000).unwrap();
        assert_eq!(g.diameter(), 3);
    }

    #[test]
    fn cd_witness_translation_case() {
        let t2 = LamplighterElement::new(P2D1, &[], vec![2]).unwrap();
        let w = cd_witness(&t2, P2D1).unwrap();
        assert_eq!(w.m, 4);
        assert!(w.displacement >= 2);
    }

    #[test]
    fn cd_witness_lamp_case() {
        let p2 = P2D1;
        let g = LamplighterElement::new(p2, &[(vec![3], 1)], vec![0]).unwrap();
        let w = cd_witness(&g, p2).unwrap();
        assert_eq!(w.m, 7);
        assert!(w.displacement >= 6);
    }

    #[test]
    fn cd_witness_rejects_identity() {
        let id = LamplighterElement::identity(P2D1);
        assert!(matches!(cd_witness(&id, P2D1), Err(Error::TrivialElement)));
    }
}
