//! Experiment configs, the verification suites behind them, and artifact
//! writers. One experiment per invocation; outputs are deterministic given
//! `(config, seed)` and every JSON artifact embeds the config digest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::factor::{FactorElement, FactorKind, OrbitGraph, OrbitHandle};
use crate::gluing::{
    self, action_family, cd_family, check_partition_condition, FamilyBudget, GluedGraph,
    GluingSpace, GrowthFn, OracleMode, PartitionOutcome,
};
use crate::graph;
use crate::grigorchuk::{self, GrigorchukElement};
use crate::growth::{
    self, fit_exponent, fit_exponent_samples, vol_table, AnalysisParams, GrowthTable,
    LowerBoundCertificate,
};
use crate::houghton::{self, HoughtonElement, StarGraph, StarVertex};
use crate::lamplighter::{self, LamplighterElement, WreathParams};
use crate::word::{FactorId, ProductSpec, Syllable, SyllableWord};

/// One pass/fail line of a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(name: &str, detail: String) -> Self {
        CheckResult { name: name.into(), passed: true, detail }
    }

    pub fn fail(name: &str, detail: String) -> Self {
        CheckResult { name: name.into(), passed: false, detail }
    }

    pub fn of(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.into(), passed, detail }
    }
}

// ---------------------------------------------------------------------------
// Grigorchuk suite

#[derive(Debug, Clone, Serialize)]
pub struct DisplacementRow {
    pub word: String,
    pub level: u32,
    pub displacement: u32,
    pub diameter: u32,
}

impl DisplacementRow {
    pub fn ratio(&self) -> f64 {
        self.displacement as f64 / self.diameter as f64
    }
}

/// Structure of the level graphs: size, connectivity, endpoints, diameter,
/// and agreement between the action and the Gray rule.
pub fn grigorchuk_structure_suite(max_level: u32) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in 1..=max_level {
        let name = format!("level-{n}");
        let lg = match grigorchuk::level_graph(n) {
            Ok(lg) => lg,
            Err(e) => {
                out.push(CheckResult::fail(&name, format!("construction failed: {e}")));
                continue;
            }
        };
        let mut problems = Vec::new();
        if lg.size() != 1usize << n {
            problems.push(format!("vertex count {}", lg.size()));
        }
        let edges = grigorchuk::gray_edge_set(n);
        if edges != grigorchuk::action_edge_set(n) {
            problems.push("gray rule disagrees with the action".into());
        }
        let mut degree = vec![0u32; 1 << n];
        for &(v, w) in &edges {
            degree[v as usize] += 1;
            degree[w as usize] += 1;
        }
        let leftmost = (1u32 << n) - 1;
        let rightmost = (1u32 << (n - 1)) - 1;
        let deg1: BTreeSet<u32> =
            (0..1u32 << n).filter(|&v| degree[v as usize] == 1).collect();
        let expected: BTreeSet<u32> = [leftmost, rightmost].into_iter().collect();
        if deg1 != expected {
            problems.push(format!("degree-1 vertices {deg1:?}"));
        }
        match graph::component(&*lg, &leftmost, 1 << n) {
            Ok(comp) if comp.len() == 1usize << n => {}
            _ => problems.push("not connected".into()),
        }
        match graph::eccentricity(&*lg, &leftmost, 1 << n) {
            Ok(ecc) if ecc == (1u32 << n) - 1 => {}
            Ok(ecc) => problems.push(format!("diameter {ecc}")),
            Err(e) => problems.push(format!("eccentricity failed: {e}")),
        }
        if problems.is_empty() {
            out.push(CheckResult::pass(
                &name,
                format!("2^{n} vertices, interval of length {}", (1u64 << n) - 1),
            ));
        } else {
            out.push(CheckResult::fail(&name, problems.join("; ")));
        }
    }
    out
}

/// Displacement witnesses for every nontrivial word of length at most
/// `max_word`, deduplicated by reduced form.
pub fn grigorchuk_displacement_sweep(
    max_word: usize,
    max_level: u32,
) -> (Vec<DisplacementRow>, Vec<CheckResult>) {
    let mut forms: BTreeSet<String> = BTreeSet::new();
    let letters = ['a', 'b', 'c', 'd'];
    let mut frontier = vec![String::new()];
    for _ in 0..max_word {
        let mut next = Vec::with_capacity(frontier.len() * 4);
        for w in &frontier {
            for l in letters {
                let mut word = w.clone();
                word.push(l);
                forms.insert(grigorchuk::reduce(&word));
                next.push(word);
            }
        }
        frontier = next;
    }
    forms.retain(|w| !grigorchuk::is_trivial(w));
    let words: Vec<String> = forms.into_iter().collect();
    let results: Vec<std::result::Result<DisplacementRow, String>> = words
        .par_iter()
        .map(|w| match grigorchuk::displacement_witness(w, max_level) {
            Ok(witness) => {
                if witness.certifies_eighth() {
                    Ok(DisplacementRow {
                        word: w.clone(),
                        level: witness.level,
                        displacement: witness.displacement,
                        diameter: witness.diameter,
                    })
                } else {
                    Err(format!("witness for `{w}` below an eighth"))
                }
            }
            Err(e) => Err(format!("no witness for `{w}` within {max_level} levels: {e}")),
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(e),
        }
    }
    rows.sort_by(|a, b| a.word.len().cmp(&b.word.len()).then(a.word.cmp(&b.word)));
    let checks = vec![CheckResult::of(
        "displacement-eighth",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} reduced forms certified", rows.len())
        } else {
            failures.join("; ")
        },
    )];
    (rows, checks)
}

pub fn displacement_csv(rows: &[DisplacementRow]) -> String {
    let mut out = String::from("g,level,displacement,diameter,ratio\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6}",
            r.word,
            r.level,
            r.displacement,
            r.diameter,
            r.ratio()
        )
        .unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Lamplighter suite

#[derive(Debug, Clone, Serialize)]
pub struct LampWitnessRow {
    pub element: String,
    pub m: u64,
    pub displacement: u32,
    pub diameter: u32,
}

pub fn lamplighter_element_key(g: &LamplighterElement) -> String {
    let lamps: Vec<String> = g
        .lamps()
        .iter()
        .map(|(pos, v)| {
            let coords: Vec<String> = pos.iter().map(|c| c.to_string()).collect();
            format!("({}):{v}", coords.join("."))
        })
        .collect();
    let shift: Vec<String> = g.shift().iter().map(|c| c.to_string()).collect();
    format!("f[{}];u({})", lamps.join(" "), shift.join("."))
}

/// Structure checks of `X_m` plus the exhaustive controlled-diameter sweep
/// over short words, against the frozen ratio.
pub fn lamplighter_suite(
    p: u64,
    d: u8,
    max_word: usize,
    moduli: &[u64],
) -> Result<(Vec<LampWitnessRow>, Vec<CheckResult>)> {
    let params = WreathParams::new(p, d)?;
    let mut checks = Vec::new();
    for &m in moduli {
        let size_ok = lamplighter::build_coset_graph(params, m, 1 << 22)?.size()
            == (p as u128 * (m as u128).pow(d as u32)) as usize;
        let structure = lamplighter::verify_coset_structure(params, m, 1 << 22);
        checks.push(CheckResult::of(
            &format!("coset-structure-m{m}"),
            size_ok && structure.is_ok(),
            match structure {
                Ok(()) => format!("|X_{m}| = {}·{m}^{d}, p-cycle plus tori", p),
                Err(e) => e.to_string(),
            },
        ));
    }
    let (num, den) = lamplighter::frozen_ratio(params).ok_or_else(|| {
        Error::InvalidArgument(format!("no frozen ratio for (p, d) = ({p}, {d})"))
    })?;
    let elements = lamplighter::elements_up_to_length(params, max_word);
    let witnesses: Vec<std::result::Result<(LamplighterElement, lamplighter::CdWitness), String>> =
        elements
            .par_iter()
            .map(|g| {
                lamplighter::cd_witness(g, params)
                    .map(|w| (g.clone(), w))
                    .map_err(|e| format!("{}: {e}", lamplighter_element_key(g)))
            })
            .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for w in witnesses {
        match w {
            Ok((g, witness)) => {
                if !witness.ratio_at_least(num, den) {
                    failures.push(format!(
                        "{}: ratio {}/{} below {num}/{den}",
                        lamplighter_element_key(&g),
                        witness.displacement,
                        witness.diameter
                    ));
                }
                rows.push(LampWitnessRow {
                    element: lamplighter_element_key(&g),
                    m: witness.m,
                    displacement: witness.displacement,
                    diameter: witness.diameter,
                });
            }
            Err(e) => failures.push(e),
        }
    }
    rows.sort_by(|a, b| a.element.cmp(&b.element));
    checks.push(CheckResult::of(
        "cd-witness-frozen-ratio",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} elements of length <= {max_word} certified at ratio >= {num}/{den}",
                rows.len()
            )
        } else {
            failures.join("; ")
        },
    ));
    Ok((rows, checks))
}

pub fn lamplighter_csv(rows: &[LampWitnessRow]) -> String {
    let mut out = String::from("element,m,displacement,diameter\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.element, r.m, r.displacement, r.diameter).unwrap();
    }
    out
}

/// Growth of the action on the disjoint union of the `X_m`, `m <= m_max`.
pub fn lamplighter_growth(p: u64, d: u8, m_max: u64, n_max: u32) -> Result<GrowthTable> {
    let params = WreathParams::new(p, d)?;
    let mut moduli: Vec<u64> = Vec::new();
    let mut m = 2;
    while m <= m_max {
        moduli.push(m);
        m = (m * 2).min(m + 32);
    }
    if *moduli.last().unwrap() != m_max {
        moduli.push(m_max);
    }
    let mut table: Option<GrowthTable> = None;
    for m in moduli {
        let coset = lamplighter::build_coset_graph(params, m, 1 << 22)?;
        let mut basepoints = vec![lamplighter::CosetPoint::origin(params, m)];
        let mut far = lamplighter::CosetPoint::origin(params, m);
        for t in far.torus.iter_mut() {
            *t = m / 2;
        }
        basepoints.push(far);
        let mut mid = lamplighter::CosetPoint::origin(params, m);
        mid.torus[0] = m / 2;
        mid.lamp = 1 % p;
        basepoints.push(mid);
        basepoints.sort();
        basepoints.dedup();
        let t = vol_table(&coset, &basepoints, n_max)?;
        match &mut table {
            None => table = Some(t),
            Some(existing) => existing.merge_max(&t),
        }
    }
    Ok(table.unwrap())
}

// ---------------------------------------------------------------------------
// Houghton suite

/// Exact growth of `H_2` on the star, checked against `2n + 1`.
pub fn houghton_vol_suite(n_max: u32) -> Result<(GrowthTable, Vec<CheckResult>)> {
    let star = StarGraph::new(2)?;
    let mut basepoints = vec![StarVertex::Origin];
    let mut step = 1i64;
    while step <= n_max as i64 {
        basepoints.push(houghton::z_to_star(step));
        basepoints.push(houghton::z_to_star(-step));
        step *= 4;
    }
    let table = vol_table(&star, &basepoints, n_max)?;
    let violations: Vec<u32> = (0..=n_max)
        .filter(|&n| table.get(n).unwrap() > 2 * n as u64 + 1)
        .collect();
    let checks = vec![CheckResult::of(
        "houghton-linear-vol",
        violations.is_empty(),
        if violations.is_empty() {
            format!("vol(n) <= 2n+1 for n <= {n_max}")
        } else {
            format!("violated at n = {violations:?}")
        },
    )];
    Ok((table, checks))
}

/// Pair-action lower bound counts with the quadratic checks.
pub fn houghton_pair_suite(n_max: u32) -> Result<(Vec<(u32, usize)>, Vec<CheckResult>)> {
    let bounds = houghton::pair_ball_counts(n_max)?;
    let counts: Vec<(u32, usize)> = bounds.iter().map(|b| (b.n, b.count)).collect();
    let mut checks = Vec::new();
    let quadratic = counts
        .iter()
        .all(|(n, count)| *count >= ((*n as usize + 1) * (*n as usize + 1)));
    checks.push(CheckResult::of(
        "pair-count-quadratic",
        quadratic,
        format!("count(n) >= (n+1)^2 for n <= {n_max}"),
    ));
    let lo = 8.min(n_max);
    let samples: Vec<(u64, u64)> = counts
        .iter()
        .filter(|(n, _)| *n >= lo && *n >= 1)
        .map(|(n, c)| (*n as u64, *c as u64))
        .collect();
    let fit = fit_exponent_samples(&samples)?;
    checks.push(CheckResult::of(
        "pair-count-slope",
        fit.slope >= 1.8,
        format!("log-log slope {:.3} over n in [{lo}, {n_max}]", fit.slope),
    ));
    Ok((counts, checks))
}

pub fn pair_counts_csv(counts: &[(u32, usize)]) -> String {
    let mut out = String::from("n,count\n");
    for (n, c) in counts {
        writeln!(out, "{n},{c}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Gluing suites

fn gluing_product() -> ProductSpec {
    ProductSpec::free(vec![
        (FactorId(1), FactorKind::Grigorchuk),
        (FactorId(2), FactorKind::Integers),
        (FactorId(3), FactorKind::Lamplighter { p: 2, d: 1 }),
    ])
    .expect("static product spec")
}

fn seam_basepoints(space: &GluingSpace) -> Vec<gluing::GluedPoint> {
    let mut points = BTreeSet::new();
    for (k, piece) in space.pieces().iter().enumerate() {
        points.insert(space.canonical(k as u32, piece.entry.clone()));
        points.insert(space.canonical(k as u32, piece.exit.clone()));
    }
    points.into_iter().collect()
}

/// Max ball size at each radius within one piece, cached per orbit.
struct PieceBallCache {
    product: ProductSpec,
    cache: BTreeMap<(FactorId, OrbitHandle), Vec<u64>>,
    n_max: u32,
}

impl PieceBallCache {
    fn new(product: ProductSpec, n_max: u32) -> Self {
        PieceBallCache { product, cache: BTreeMap::new(), n_max }
    }

    fn max_ball(&mut self, factor: FactorId, orbit: OrbitHandle) -> Result<&Vec<u64>> {
        if !self.cache.contains_key(&(factor, orbit)) {
            let kind = self.product.kind(factor)?;
            let orbit_graph = OrbitGraph::new(*kind, orbit)?;
            let table = growth::vol_table_exhaustive(&orbit_graph, self.n_max)?;
            self.cache.insert((factor, orbit), table.vol);
        }
        Ok(&self.cache[&(factor, orbit)])
    }
}

/// Lemma-style growth bound over a seeded family: every measured ball of
/// radius `n` has at most `(2n+1)·f(n)` points, `f` the max piece ball.
pub fn gluing_growth_suite(
    seed: u64,
    count: usize,
    q_max: usize,
    piece_cap: usize,
    n_max: u32,
) -> Result<Vec<CheckResult>> {
    let product = gluing_product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = FamilyBudget { q_max, piece_size_cap: piece_cap, count };
    let family = action_family(&product, &budget, &mut rng)?;
    let mut cache = PieceBallCache::new(product.clone(), n_max);
    let mut violations = Vec::new();
    for (idx, space) in family.iter().enumerate() {
        let mut piece_ball = vec![0u64; n_max as usize + 1];
        for piece in space.pieces() {
            let vol = cache.max_ball(piece.factor, piece.orbit)?;
            for (n, v) in vol.iter().enumerate() {
                piece_ball[n] = piece_ball[n].max(*v);
            }
        }
        let ambient = GluedGraph::new(space, &product);
        let basepoints = seam_basepoints(space);
        let table = vol_table(&ambient, &basepoints, n_max)?;
        for n in 0..=n_max as usize {
            let bound = (2 * n as u64 + 1) * piece_ball[n];
            if table.vol[n] > bound {
                violations.push(format!(
                    "gluing {idx}: vol({n}) = {} > {bound}",
                    table.vol[n]
                ));
            }
        }
    }
    Ok(vec![CheckResult::of(
        "gluing-growth-bound",
        violations.is_empty(),
        if violations.is_empty() {
            format!("{} gluings respect (2n+1)·f(n) up to n = {n_max}", family.len())
        } else {
            violations.join("; ")
        },
    )])
}

/// Controlled-diameter family: pieces marked at diametral pairs keep the
/// fitted exponent at or below 1.25 when the pieces grow linearly.
pub fn cd_growth_suite(
    seed: u64,
    count: usize,
    q_max: usize,
    piece_cap: usize,
    n_max: u32,
) -> Result<Vec<CheckResult>> {
    let product = gluing_product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = FamilyBudget { q_max, piece_size_cap: piece_cap, count };
    let family = cd_family(&product, &budget, &mut rng)?;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (idx, space) in family.iter().enumerate() {
        let ambient = GluedGraph::new(space, &product);
        let basepoints = seam_basepoints(space);
        let table = vol_table(&ambient, &basepoints, n_max)?;
        let fit = fit_exponent(&table, 16.min(n_max - 1), n_max)?;
        worst = worst.max(fit.slope);
        if fit.slope > 1.25 {
            failures.push(format!("gluing {idx}: slope {:.3}", fit.slope));
        }
    }
    Ok(vec![CheckResult::of(
        "cd-gluing-linear-growth",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} diametrally marked gluings, worst slope {worst:.3}", family.len())
        } else {
            failures.join("; ")
        },
    )])
}

fn faithfulness_product(rng: &mut ChaCha8Rng) -> ProductSpec {
    let ids = [FactorId(1), FactorId(2), FactorId(3), FactorId(4)];
    let mut pairs = Vec::new();
    for (a, &i) in ids.iter().enumerate() {
        for &j in ids.iter().skip(a + 1) {
            if rng.gen_bool(0.3) {
                pairs.push((i, j));
            }
        }
    }
    ProductSpec::new(
        vec![
            (FactorId(1), FactorKind::Grigorchuk),
            (FactorId(2), FactorKind::Integers),
            (FactorId(3), FactorKind::Cyclic { m: 5 }),
            (FactorId(4), FactorKind::Houghton { rays: 2 }),
        ],
        pairs,
    )
    .expect("static factor list")
}

fn random_factor_element(
    rng: &mut ChaCha8Rng,
    kind: &FactorKind,
) -> FactorElement {
    loop {
        let candidate = match kind {
            FactorKind::Grigorchuk => {
                let len = rng.gen_range(1..=5);
                let word: String = (0..len)
                    .map(|_| ['a', 'b', 'c', 'd'][rng.gen_range(0..4)])
                    .collect();
                FactorElement::Grig(GrigorchukElement::new(&word).unwrap())
            }
            FactorKind::Integers => FactorElement::Int(rng.gen_range(-3..=3)),
            FactorKind::Cyclic { m } => FactorElement::Mod(rng.gen_range(0..*m)),
            FactorKind::Houghton { rays } => {
                let gens = houghton::standard_generators(*rays).unwrap();
                let mut g = HoughtonElement::identity(*rays);
                for _ in 0..rng.gen_range(1..=4) {
                    g = gens[rng.gen_range(0..gens.len())].compose(&g).unwrap();
                }
                FactorElement::Hough(g)
            }
            FactorKind::Lamplighter { p, d } => {
                let params = WreathParams { p: *p, d: *d };
                let gens = lamplighter::standard_generators(params);
                let mut g = LamplighterElement::identity(params);
                for _ in 0..rng.gen_range(1..=4) {
                    g = gens[rng.gen_range(0..gens.len())].compose(&g, params);
                }
                FactorElement::Lamp(g)
            }
        };
        if !kind.is_identity(&candidate) {
            return candidate;
        }
    }
}

/// Seeded nontrivial words over `{Grigorchuk, Z, Z/5Z, H_2}` with assorted
/// commutation matrices; every word must move `e_1` of its witness gluing.
pub fn faithfulness_suite(seed: u64, word_count: usize) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verified = 0usize;
    let mut failures = Vec::new();
    while verified < word_count && failures.len() < 5 {
        let product = faithfulness_product(&mut rng);
        let ids = product.ids();
        let len = rng.gen_range(1..=6);
        let syllables: Vec<Syllable> = (0..len)
            .map(|_| {
                let factor = ids[rng.gen_range(0..ids.len())];
                let kind = product.kind(factor).unwrap();
                Syllable { factor, element: random_factor_element(&mut rng, kind) }
            })
            .collect();
        let word = SyllableWord::new(syllables);
        let normal = crate::word::reduce_to_normal_form(&word, &product)?;
        if normal.is_empty() {
            continue;
        }
        match gluing::faithfulness_witness(&normal, &product, OracleMode::MovedPoint) {
            Ok(witness) => {
                debug_assert_ne!(witness.start, witness.end);
                verified += 1;
            }
            Err(e) => failures.push(format!("word {verified}: {e}")),
        }
    }
    Ok(vec![CheckResult::of(
        "faithfulness-witnesses",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{verified} seeded nontrivial words move e_1 on their witness gluing")
        } else {
            failures.join("; ")
        },
    )])
}

/// Condition (1) checks for the stock power laws.
pub fn partition_condition_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates = [1u64, 2, 4, 8, 16, 32, 64];
    let mut tuples: Vec<Vec<(u64, u64)>> = vec![
        vec![(1, 1)],
        vec![(1, 100)],
        vec![(3, 4), (17, 2)],
    ];
    for _ in 0..20 {
        let len = rng.gen_range(1..=5);
        tuples.push(
            (0..len)
                .map(|_| (rng.gen_range(1..64u64), rng.gen_range(1..16u64)))
                .collect(),
        );
    }
    let mut checks = Vec::new();
    for alpha in [1.0f64, 1.5, 2.0] {
        let outcome =
            check_partition_condition(&GrowthFn::PowerLaw(alpha), &candidates, &tuples)?;
        checks.push(CheckResult::of(
            &format!("partition-alpha-{alpha}"),
            outcome.holds(),
            match &outcome {
                PartitionOutcome::Holds { constant } => format!("holds with C1 = {constant}"),
                PartitionOutcome::Fails { .. } => "unexpectedly failed".into(),
            },
        ));
    }
    let sqrt = check_partition_condition(&GrowthFn::PowerLaw(0.5), &candidates, &tuples)?;
    checks.push(CheckResult::of(
        "partition-sqrt-fails",
        !sqrt.holds(),
        match &sqrt {
            PartitionOutcome::Fails { witnesses } => format!(
                "every candidate defeated; witness for C1=64 has {} entries",
                witnesses
                    .iter()
                    .find(|(c, _)| *c == 64)
                    .map(|(_, t)| t.iter().map(|(_, m)| *m).sum::<u64>())
                    .unwrap_or(0)
            ),
            PartitionOutcome::Holds { constant } => {
                format!("sqrt passed with C1 = {constant}")
            }
        },
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Sparse-support probe suite

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub r: u32,
    pub certificate: LowerBoundCertificate,
}

/// Runs the free-product probe for `H_2 * Z` at each radius and checks the
/// quadratic mechanism: slope of certified counts at least 1.7 and every
/// certificate bounded by its direct count.
pub fn free_product_probe_suite(
    r_list: &[u32],
    cross_check_cap: usize,
) -> Result<(Vec<ProbeReport>, Vec<CheckResult>)> {
    let product = ProductSpec::free(vec![
        (FactorId(1), FactorKind::Houghton { rays: 2 }),
        (FactorId(2), FactorKind::Integers),
    ])?;
    let g = FactorElement::Hough(HoughtonElement::from_z_fn(3, 0, 0, |z| match z {
        0 => 1,
        1 => 2,
        2 => 0,
        z => z,
    })?);
    let t = FactorElement::Int(1);
    let r_max = r_list.iter().copied().max().unwrap_or(1);
    let star = StarGraph::new(2)?;
    let alpha = vol_table(&star, &[StarVertex::Origin], r_max)?;

    let reports: Vec<std::result::Result<ProbeReport, String>> = r_list
        .par_iter()
        .map(|&r| {
            let params = AnalysisParams::derive(1, 2, r, alpha.clone());
            growth::glued_free_product_probe(
                &product,
                FactorId(1),
                &g,
                FactorId(2),
                &t,
                &params,
                cross_check_cap,
            )
            .map(|(_, certificate)| ProbeReport { r, certificate })
            .map_err(|e| format!("R = {r}: {e}"))
        })
        .collect();
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for r in reports {
        match r {
            Ok(rep) => out.push(rep),
            Err(e) => failures.push(e),
        }
    }
    out.sort_by_key(|r| r.r);
    let mut checks = Vec::new();
    checks.push(CheckResult::of(
        "probe-runs",
        failures.is_empty(),
        if failures.is_empty() {
            format!("certificates computed for R in {r_list:?}")
        } else {
            failures.join("; ")
        },
    ));
    let bounded = out.iter().all(|r| match r.certificate.direct_count {
        Some(direct) => r.certificate.certified_count <= direct,
        None => false,
    });
    checks.push(CheckResult::of(
        "probe-certificate-bounded",
        bounded && !out.is_empty(),
        "certified count <= direct BFS count for every R".into(),
    ));
    if out.len() >= 2 {
        let samples: Vec<(u64, u64)> = out
            .iter()
            .map(|r| (r.r as u64, r.certificate.certified_count as u64))
            .collect();
        let fit = fit_exponent_samples(&samples)?;
        checks.push(CheckResult::of(
            "probe-slope",
            fit.slope >= 1.7,
            format!("log-log slope {:.3} across R", fit.slope),
        ));
    }
    Ok((out, checks))
}

// ---------------------------------------------------------------------------
// Experiment configs and the runner

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentKind {
    VerifyGrigorchuk {
        max_level: u32,
        max_word: usize,
    },
    VerifyLamplighter {
        p: u64,
        d: u8,
        max_word: usize,
    },
    VerifyHoughton {
        vol_max: u32,
        pair_max: u32,
    },
    VerifyGluing {
        count: usize,
        q_max: usize,
        piece_cap: usize,
        radius_max: u32,
        words: usize,
    },
    GrowthGrigorchuk {
        max_level: u32,
        n_max: u32,
    },
    GrowthLamplighter {
        p: u64,
        d: u8,
        m_max: u64,
        n_max: u32,
    },
    GrowthHoughton {
        n_max: u32,
    },
    GrowthHoughtonPair {
        n_max: u32,
    },
    ProbeFreeProduct {
        left: String,
        right: String,
        r_list: Vec<u32>,
    },
    ExportDot {
        family: String,
        #[serde(default)]
        level: Option<u32>,
        #[serde(default)]
        m: Option<u64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

fn default_jobs() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// Digest of the experiment semantics: the kind and the seed. Output
    /// directory and worker count are plumbing and do not affect artifacts.
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Semantics<'a> {
            #[serde(flatten)]
            kind: &'a ExperimentKind,
            seed: u64,
        }
        let bytes = serde_json::to_vec(&Semantics { kind: &self.kind, seed: self.seed })
            .expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        hex_string(&hasher.finalize())
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::Config { field: "jobs".into(), reason: "must be positive".into() });
        }
        let positive = |field: &str, v: u64| -> Result<()> {
            if v == 0 {
                Err(Error::Config { field: field.into(), reason: "must be positive".into() })
            } else {
                Ok(())
            }
        };
        match &self.kind {
            ExperimentKind::VerifyGrigorchuk { max_level, max_word } => {
                positive("max_level", *max_level as u64)?;
                positive("max_word", *max_word as u64)?;
            }
            ExperimentKind::VerifyLamplighter { p, d, max_word } => {
                if *p < 2 {
                    return Err(Error::Config { field: "p".into(), reason: "needs p >= 2".into() });
                }
                positive("d", *d as u64)?;
                positive("max_word", *max_word as u64)?;
            }
            ExperimentKind::VerifyHoughton { vol_max, pair_max } => {
                positive("vol_max", *vol_max as u64)?;
                positive("pair_max", *pair_max as u64)?;
            }
            ExperimentKind::VerifyGluing { count, q_max, piece_cap, radius_max, words } => {
                positive("count", *count as u64)?;
                positive("q_max", *q_max as u64)?;
                positive("piece_cap", *piece_cap as u64)?;
                positive("radius_max", *radius_max as u64)?;
                positive("words", *words as u64)?;
            }
            ExperimentKind::GrowthGrigorchuk { max_level, n_max } => {
                positive("max_level", *max_level as u64)?;
                positive("n_max", *n_max as u64)?;
            }
            ExperimentKind::GrowthLamplighter { p, d, m_max, n_max } => {
                if *p < 2 || *m_max < 2 {
                    return Err(Error::Config {
                        field: "p/m_max".into(),
                        reason: "needs p >= 2 and m_max >= 2".into(),
                    });
                }
                positive("d", *d as u64)?;
                positive("n_max", *n_max as u64)?;
            }
            ExperimentKind::GrowthHoughton { n_max }
            | ExperimentKind::GrowthHoughtonPair { n_max } => {
                positive("n_max", *n_max as u64)?;
            }
            ExperimentKind::ProbeFreeProduct { left, right, r_list } => {
                if left != "houghton2" {
                    return Err(Error::Config {
                        field: "left".into(),
                        reason: format!("unsupported left factor `{left}`"),
                    });
                }
                if right != "Z" {
                    return Err(Error::Config {
                        field: "right".into(),
                        reason: format!("unsupported right factor `{right}`"),
                    });
                }
                if r_list.is_empty() || r_list.iter().any(|r| *r == 0) {
                    return Err(Error::Config {
                        field: "r_list".into(),
                        reason: "needs positive radii".into(),
                    });
                }
            }
            ExperimentKind::ExportDot { family, level, m } => match family.as_str() {
                "grigorchuk" => {
                    if level.is_none() {
                        return Err(Error::Config {
                            field: "level".into(),
                            reason: "grigorchuk export needs --level".into(),
                        });
                    }
                }
                "lamplighter" | "cycle" => {
                    if m.is_none() {
                        return Err(Error::Config {
                            field: "m".into(),
                            reason: format!("{family} export needs --m"),
                        });
                    }
                }
                "gluing-sample" => {}
                other => {
                    return Err(Error::Config {
                        field: "family".into(),
                        reason: format!("unknown export family `{other}`"),
                    })
                }
            },
        }
        Ok(())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

/// Everything a run produced: the pass/fail lines and the files written.
#[derive(Debug)]
pub struct RunOutcome {
    pub checks: Vec<CheckResult>,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

fn json_artifact<T: Serialize>(digest: &str, payload: &T) -> Result<String> {
    let mut value = serde_json::to_value(payload)?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("config_digest".into(), serde_json::Value::String(digest.into()));
    } else {
        value = serde_json::json!({ "config_digest": digest, "payload": value });
    }
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct ChecksPayload<'a> {
    checks: &'a [CheckResult],
}

/// Runs one experiment, writing artifacts under the config's output
/// directory. Deterministic for a fixed `(config, seed)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let digest = config.digest();
    let dir = config.out_dir.clone();
    let mut artifacts = Vec::new();
    let mut checks = Vec::new();
    match &config.kind {
        ExperimentKind::VerifyGrigorchuk { max_level, max_word } => {
            checks.extend(grigorchuk_structure_suite(*max_level));
            let (rows, sweep_checks) = grigorchuk_displacement_sweep(*max_word, *max_level);
            checks.extend(sweep_checks);
            artifacts.push(write_artifact(&dir, "grigorchuk_displacement.csv", &displacement_csv(&rows))?);
        }
        ExperimentKind::VerifyLamplighter { p, d, max_word } => {
            let (rows, suite_checks) = lamplighter_suite(*p, *d, *max_word, &[2, 3, 4, 5, 6])?;
            checks.extend(suite_checks);
            artifacts.push(write_artifact(&dir, "lamplighter_cd.csv", &lamplighter_csv(&rows))?);
        }
        ExperimentKind::VerifyHoughton { vol_max, pair_max } => {
            let (table, vol_checks) = houghton_vol_suite(*vol_max)?;
            checks.extend(vol_checks);
            artifacts.push(write_artifact(&dir, "houghton_vol.csv", &table.to_csv())?);
            let (counts, pair_checks) = houghton_pair_suite(*pair_max)?;
            checks.extend(pair_checks);
            artifacts.push(write_artifact(&dir, "houghton_pairs.csv", &pair_counts_csv(&counts))?);
        }
        ExperimentKind::VerifyGluing { count, q_max, piece_cap, radius_max, words } => {
            checks.extend(gluing_growth_suite(config.seed, *count, *q_max, *piece_cap, *radius_max)?);
            checks.extend(cd_growth_suite(config.seed ^ 1, *count / 10 + 1, 24, *piece_cap, 256)?);
            checks.extend(faithfulness_suite(config.seed ^ 2, *words)?);
            checks.extend(partition_condition_suite(config.seed ^ 3)?);
        }
        ExperimentKind::GrowthGrigorchuk { max_level, n_max } => {
            let mut table: Option<GrowthTable> = None;
            for n in 1..=*max_level {
                let lg = grigorchuk::level_graph(n)?;
                let t = growth::vol_table_exhaustive(&*lg, *n_max)?;
                match &mut table {
                    None => table = Some(t),
                    Some(existing) => existing.merge_max(&t),
                }
            }
            let table = table.unwrap();
            let over = (0..=*n_max).find(|&k| table.get(k).unwrap() > 2 * k as u64 + 1);
            checks.push(CheckResult::of(
                "grigorchuk-linear-vol",
                over.is_none(),
                format!("vol(k) <= 2k+1 over levels up to {max_level}"),
            ));
            artifacts.push(write_artifact(&dir, "grigorchuk_growth.csv", &table.to_csv())?);
        }
        ExperimentKind::GrowthLamplighter { p, d, m_max, n_max } => {
            let table = lamplighter_growth(*p, *d, *m_max, *n_max)?;
            let fit = fit_exponent(&table, 8.min(*n_max - 1), *n_max)?;
            checks.push(CheckResult::of(
                "lamplighter-exponent",
                (fit.slope - *d as f64).abs() <= 0.15,
                format!("slope {:.3} for d = {d}", fit.slope),
            ));
            artifacts.push(write_artifact(&dir, "lamplighter_growth.csv", &table.to_csv())?);
        }
        ExperimentKind::GrowthHoughton { n_max } => {
            let (table, vol_checks) = houghton_vol_suite(*n_max)?;
            checks.extend(vol_checks);
            artifacts.push(write_artifact(&dir, "houghton_growth.csv", &table.to_csv())?);
        }
        ExperimentKind::GrowthHoughtonPair { n_max } => {
            let (counts, pair_checks) = houghton_pair_suite(*n_max)?;
            checks.extend(pair_checks);
            artifacts.push(write_artifact(&dir, "houghton_pairs.csv", &pair_counts_csv(&counts))?);
        }
        ExperimentKind::ProbeFreeProduct { r_list, .. } => {
            let (reports, probe_checks) = free_product_probe_suite(r_list, 2_000_000)?;
            checks.extend(probe_checks);
            let payload = serde_json::json!({ "reports": reports });
            artifacts.push(write_artifact(
                &dir,
                "probe_certificates.json",
                &json_artifact(&digest, &payload)?,
            )?);
        }
        ExperimentKind::ExportDot { family, level, m } => {
            let (name, dot) = match family.as_str() {
                "grigorchuk" => {
                    let lg = grigorchuk::level_graph(level.unwrap())?;
                    (format!("grigorchuk_level{}.dot", level.unwrap()), graph::to_dot(&*lg, false)?)
                }
                "lamplighter" => {
                    let params = WreathParams::new(2, 1)?;
                    let coset = lamplighter::build_coset_graph(params, m.unwrap(), 1 << 20)?;
                    (format!("lamplighter_x{}.dot", m.unwrap()), graph::to_dot(&coset, false)?)
                }
                "cycle" => {
                    let kind = FactorKind::Integers;
                    let orbit_graph = OrbitGraph::new(kind, OrbitHandle::Cycle(m.unwrap()))?;
                    (format!("cycle_{}.dot", m.unwrap()), graph::to_dot(&orbit_graph, false)?)
                }
                "gluing-sample" => {
                    let product = gluing_product();
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    let budget = FamilyBudget { q_max: 4, piece_size_cap: 32, count: 1 };
                    let family = action_family(&product, &budget, &mut rng)?;
                    let space = family.into_iter().next().ok_or_else(|| {
                        Error::InvalidArgument("empty sample family".into())
                    })?;
                    let ambient = GluedGraph::new(&space, &product);
                    ("gluing_sample.dot".to_string(), graph::to_dot(&ambient, false)?)
                }
                other => {
                    return Err(Error::Config {
                        field: "family".into(),
                        reason: format!("unknown export family `{other}`"),
                    })
                }
            };
            checks.push(CheckResult::pass("export-dot", name.clone()));
            artifacts.push(write_artifact(&dir, &name, &dot)?);
        }
    }
    let summary = json_artifact(&digest, &ChecksPayload { checks: &checks })?;
    artifacts.push(write_artifact(&dir, "checks.json", &summary)?);
    Ok(RunOutcome { checks, artifacts })
}
