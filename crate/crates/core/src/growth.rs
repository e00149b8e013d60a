//! Growth measurement and the sparse-support lower-bound probe.
//!
//! `vol_table` measures `vol(n) = max_x |B(x, n)|` over supplied basepoints;
//! `fit_exponent` runs a log-log regression; `coarse_components` partitions a
//! point set by distance-`D` chains. `sparse_support_probe` implements the
//! commutator counting argument: iterate `h = [g, t]` from a basepoint,
//! attach each iterate to the support of `g`, extract representatives of
//! distinct coarse components, and sum the sizes of their pairwise disjoint
//! factor-metric balls. The certificate never exceeds the directly measured
//! ambient ball, and says so by carrying both counts.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FactorElement;
use crate::gluing::{self, GluedGraph, GluingSpace, OracleMode};
use crate::graph::{self, Graph};
use crate::word::{FactorId, ProductSpec, Syllable, SyllableWord};

/// `n ↦ max observed ball cardinality`, with basepoint provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthTable {
    /// `vol[n]` for `n = 0..=n_max`.
    pub vol: Vec<u64>,
    pub basepoints: Vec<String>,
    /// Whether every point of a finite domain served as a basepoint.
    pub exhaustive: bool,
}

impl GrowthTable {
    pub fn new(vol: Vec<u64>, basepoints: Vec<String>, exhaustive: bool) -> Result<Self> {
        if vol.is_empty() || vol[0] < 1 {
            return Err(Error::InvalidArgument("growth tables start at vol(0) >= 1".into()));
        }
        if vol.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("growth tables are nondecreasing".into()));
        }
        Ok(GrowthTable { vol, basepoints, exhaustive })
    }

    pub fn max_radius(&self) -> u32 {
        self.vol.len() as u32 - 1
    }

    pub fn get(&self, n: u32) -> Option<u64> {
        self.vol.get(n as usize).copied()
    }

    /// Pointwise maximum, truncated to the shorter table.
    pub fn merge_max(&mut self, other: &GrowthTable) {
        let len = self.vol.len().min(other.vol.len());
        self.vol.truncate(len);
        for (i, v) in self.vol.iter_mut().enumerate() {
            *v = (*v).max(other.vol[i]);
        }
        self.basepoints.extend(other.basepoints.iter().cloned());
        self.exhaustive = self.exhaustive && other.exhaustive;
    }

    /// CSV with header `n,vol`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,vol\n");
        for (n, v) in self.vol.iter().enumerate() {
            out.push_str(&format!("{n},{v}\n"));
        }
        out
    }
}

/// Exact `vol` over the given basepoints up to radius `n_max`.
pub fn vol_table<G: Graph>(
    graph: &G,
    basepoints: &[G::Point],
    n_max: u32,
) -> Result<GrowthTable> {
    if basepoints.is_empty() {
        return Err(Error::InvalidArgument("vol_table needs at least one basepoint".into()));
    }
    let domain = graph.vertices();
    if let Some(domain) = &domain {
        let set: BTreeSet<&G::Point> = domain.iter().collect();
        for b in basepoints {
            if !set.contains(b) {
                return Err(Error::PointOutsideDomain {
                    point: graph.key(b),
                    context: "vol_table basepoint".into(),
                });
            }
        }
    }
    let exhaustive = match &domain {
        Some(domain) => {
            let set: BTreeSet<&G::Point> = basepoints.iter().collect();
            domain.iter().all(|v| set.contains(v))
        }
        None => false,
    };
    let mut vol = vec![0u64; n_max as usize + 1];
    for b in basepoints {
        let sizes = graph::ball_sizes(graph, b, n_max);
        for (n, s) in sizes.iter().enumerate() {
            vol[n] = vol[n].max(*s as u64);
        }
    }
    GrowthTable::new(vol, basepoints.iter().map(|b| graph.key(b)).collect(), exhaustive)
}

/// Exhaustive `vol` over every vertex of a finite graph.
pub fn vol_table_exhaustive<G: Graph>(graph: &G, n_max: u32) -> Result<GrowthTable> {
    let vertices = graph.vertices().ok_or_else(|| {
        Error::InvalidArgument("exhaustive vol needs a finite domain".into())
    })?;
    vol_table(graph, &vertices, n_max)
}

/// Least-squares slope of `log vol` against `log n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
}

pub fn fit_exponent(table: &GrowthTable, lo: u32, hi: u32) -> Result<ExponentFit> {
    if lo < 1 || hi <= lo || hi > table.max_radius() {
        return Err(Error::InvalidArgument(format!(
            "degenerate radius range [{lo}, {hi}] for a table up to {}",
            table.max_radius()
        )));
    }
    let points: Vec<(f64, f64)> = (lo..=hi)
        .map(|n| ((n as f64).ln(), (table.vol[n as usize] as f64).ln()))
        .collect();
    least_squares(&points)
}

/// Log-log regression over arbitrary `(n, value)` samples.
pub fn fit_exponent_samples(samples: &[(u64, u64)]) -> Result<ExponentFit> {
    if samples.len() < 2 || samples.iter().any(|(n, v)| *n < 1 || *v < 1) {
        return Err(Error::InvalidArgument("need two positive samples".into()));
    }
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|(n, v)| ((*n as f64).ln(), (*v as f64).ln()))
        .collect();
    least_squares(&points)
}

fn least_squares(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all radii coincide after rounding".into()));
    }
    let slope = sxy / sxx;
    let stderr = if points.len() > 2 {
        let ss_res: f64 = points
            .iter()
            .map(|p| {
                let predicted = mean_y + slope * (p.0 - mean_x);
                (p.1 - predicted).powi(2)
            })
            .sum();
        (ss_res / (k - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(ExponentFit { slope, stderr })
}

#[cfg(test)]
mod fit_tests {
    use super::*;

    #[test]
    fn sample_fit_matches_table_fit() {
        let samples: Vec<(u64, u64)> = vec![(8, 64), (16, 256), (32, 1024)];
        let fit = fit_exponent_samples(&samples).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit_exponent_samples(&[(1, 1)]).is_err());
    }
}

/// Partition of `points` into `D`-coarse connected components: the classes
/// of the transitive closure of "distance at most `D`" in `metric`.
///
/// Output is canonical (components sorted by smallest key, points sorted),
/// so it does not depend on the input order.
pub fn coarse_components<G: Graph>(
    metric: &G,
    points: &[G::Point],
    d: u32,
) -> Vec<Vec<G::Point>> {
    let points: Vec<G::Point> = {
        let mut sorted: Vec<G::Point> = points.to_vec();
        sorted.sort_by_key(|p| metric.key(p));
        sorted.dedup();
        sorted
    };
    let mut component = vec![usize::MAX; points.len()];
    let mut next = 0;
    for i in 0..points.len() {
        if component[i] != usize::MAX {
            continue;
        }
        component[i] = next;
        let mut queue = VecDeque::from([i]);
        while let Some(a) = queue.pop_front() {
            let reach = graph::ball(metric, &points[a], d);
            for b in 0..points.len() {
                if component[b] == usize::MAX && reach.contains_key(&points[b]) {
                    component[b] = next;
                    queue.push_back(b);
                }
            }
        }
        next += 1;
    }
    let mut out = vec![Vec::new(); next];
    for (i, p) in points.into_iter().enumerate() {
        out[component[i]].push(p);
    }
    out
}

/// Constants of the sparse-support analysis. `d1 = 2d + 3` always, and the
/// probe radius realizes `d2 = d1 + 1/2` exactly on even `r`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisParams {
    pub c: u32,
    pub d: u32,
    pub r: u32,
    pub d1: u32,
    /// `2·d2`, kept doubled so the half stays exact.
    pub d2_times_two: u32,
    pub alpha: GrowthTable,
}

impl AnalysisParams {
    pub fn derive(c: u32, d: u32, r: u32, alpha: GrowthTable) -> Self {
        let d1 = 2 * d + 3;
        AnalysisParams { c, d, r, d1, d2_times_two: 2 * d1 + 1, alpha }
    }

    /// `⌈d2·r⌉ = d1·r + ⌈r/2⌉`.
    pub fn probe_radius(&self) -> u32 {
        self.d1 * self.r + self.r.div_ceil(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionFlag {
    Holds,
    Fails { witness: String },
    Indeterminate { reason: String },
}

impl ConditionFlag {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionFlag::Holds)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub points: Vec<String>,
    pub diameter: Option<u32>,
}

/// Exact-on-the-window report of conditions (C1)-(C4).
#[derive(Debug, Clone, Serialize)]
pub struct SparseSupportReport {
    pub window_radius: u32,
    pub support_in_window: usize,
    pub bounded_displacement: ConditionFlag,
    pub small_components: ConditionFlag,
    pub components_separated: ConditionFlag,
    pub large_balls: ConditionFlag,
    pub components: Vec<ComponentReport>,
}

impl SparseSupportReport {
    pub fn all_hold(&self) -> bool {
        self.bounded_displacement.holds()
            && self.small_components.holds()
            && self.components_separated.holds()
            && self.large_balls.holds()
    }
}

/// Checks the sparse-support conditions for `g` on the window
/// `B_ambient(base, window_radius)`. Support found in the margin just beyond
/// the window turns the component conditions indeterminate rather than
/// silently passing.
pub fn check_sparse_conditions<G, H>(
    ambient: &G,
    factor_metric: &H,
    act_g: &dyn Fn(&G::Point) -> G::Point,
    base: &G::Point,
    window_radius: u32,
    params: &AnalysisParams,
) -> Result<SparseSupportReport>
where
    G: Graph,
    H: Graph<Point = G::Point>,
{
    let margin = params.d + 1;
    let wide = graph::ball(ambient, base, window_radius + margin);
    let mut support: Vec<G::Point> = Vec::new();
    let mut margin_support = false;
    for (p, dist) in &wide {
        if act_g(p) != *p {
            if *dist <= window_radius {
                support.push(p.clone());
            } else {
                margin_support = true;
            }
        }
    }
    support.sort_by_key(|p| ambient.key(p));
    if support.is_empty() && !margin_support {
        return Err(Error::TrivialElement);
    }

    // (C1): displacement bound in the factor metric, exact on the window.
    let mut c1 = ConditionFlag::Holds;
    for p in &support {
        let gp = act_g(p);
        let reach = graph::ball(factor_metric, p, params.d);
        if !reach.contains_key(&gp) {
            c1 = ConditionFlag::Fails { witness: ambient.key(p) };
            break;
        }
    }

    let components = coarse_components(factor_metric, &support, params.d);
    let boundary_caveat = if margin_support {
        Some("support continues beyond the window".to_string())
    } else {
        None
    };

    // (C2): every component has diameter at most C.
    let mut c2 = ConditionFlag::Holds;
    let mut reports = Vec::new();
    for comp in &components {
        let mut diameter = Some(0u32);
        'pairs: for a in comp {
            let reach = graph::ball(factor_metric, a, params.c);
            for b in comp {
                match reach.get(b) {
                    Some(d) => {
                        diameter = diameter.map(|cur| cur.max(*d));
                    }
                    None => {
                        diameter = None;
                        c2 = ConditionFlag::Fails {
                            witness: format!("{} .. {}", ambient.key(a), ambient.key(b)),
                        };
                        break 'pairs;
                    }
                }
            }
        }
        reports.push(ComponentReport {
            points: comp.iter().map(|p| ambient.key(p)).collect(),
            diameter,
        });
    }
    if c2.holds() {
        if let Some(reason) = &boundary_caveat {
            c2 = ConditionFlag::Indeterminate { reason: reason.clone() };
        }
    }

    // (C3): distinct components are R-separated.
    let mut c3 = ConditionFlag::Holds;
    'outer: for (i, a_comp) in components.iter().enumerate() {
        for a in a_comp {
            let reach = graph::ball(factor_metric, a, params.r.saturating_sub(1));
            for (j, b_comp) in components.iter().enumerate() {
                if i == j {
                    continue;
                }
                if b_comp.iter().any(|b| reach.contains_key(b)) {
                    c3 = ConditionFlag::Fails {
                        witness: format!("components {i} and {j} within {}", params.r - 1),
                    };
                    break 'outer;
                }
            }
        }
    }
    if c3.holds() {
        if let Some(reason) = &boundary_caveat {
            c3 = ConditionFlag::Indeterminate { reason: reason.clone() };
        }
    }

    // (C4): |B_{G,X}(x, R)| >= α(R/C)/C around every support point.
    let mut c4 = ConditionFlag::Holds;
    let alpha_at = params.r / params.c;
    match params.alpha.get(alpha_at) {
        None => {
            c4 = ConditionFlag::Indeterminate {
                reason: format!("alpha table has no entry at {alpha_at}"),
            };
        }
        Some(alpha) => {
            // |B| >= alpha(R/C)/C, kept in integers as |B|·C >= alpha(R/C).
            for p in &support {
                let ball = graph::ball(factor_metric, p, params.r);
                if (ball.len() as u64) * u64::from(params.c) < alpha {
                    c4 = ConditionFlag::Fails { witness: ambient.key(p) };
                    break;
                }
            }
        }
    }

    Ok(SparseSupportReport {
        window_radius,
        support_in_window: support.len(),
        bounded_displacement: c1,
        small_components: c2,
        components_separated: c3,
        large_balls: c4,
        components: reports,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BallWitness {
    pub center: String,
    pub ball_size: usize,
}

/// Replayable output of the probe: the commutator orbit, the extracted
/// component representatives with their disjoint ball sizes, and the direct
/// ambient count the certificate is checked against.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundCertificate {
    pub basepoint: String,
    pub r: u32,
    pub probe_radius: u32,
    pub ball_radius: u32,
    pub orbit_points: Vec<String>,
    pub component_count: usize,
    pub c1_measured: u32,
    pub witnesses: Vec<BallWitness>,
    pub certified_count: usize,
    pub direct_count: Option<usize>,
}

fn ball_capped<G: Graph>(
    graph: &G,
    x: &G::Point,
    n: u32,
    cap: usize,
) -> Option<HashMap<G::Point, u32>> {
    let mut dist: HashMap<G::Point, u32> = HashMap::new();
    dist.insert(x.clone(), 0);
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        if d == n {
            continue;
        }
        for (_, q) in graph.neighbors(&p) {
            if q != p && !dist.contains_key(&q) {
                dist.insert(q.clone(), d + 1);
                if dist.len() > cap {
                    return None;
                }
                queue.push_back(q);
            }
        }
    }
    Some(dist)
}

/// The lazily grown `D`-coarse component of `start` inside the support of
/// `g`, in the factor metric.
fn support_component<G: Graph>(
    factor_metric: &G,
    act_g: &dyn Fn(&G::Point) -> G::Point,
    start: &G::Point,
    d: u32,
    cap: usize,
) -> Result<BTreeSet<G::Point>>
where
    G::Point: Ord,
{
    let mut comp: BTreeSet<G::Point> = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start.clone()];
    while let Some(p) = frontier.pop() {
        for (q, _) in graph::ball(factor_metric, &p, d) {
            if act_g(&q) != q && comp.insert(q.clone()) {
                frontier.push(q);
                if comp.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        context: "growing a support component".into(),
                    });
                }
            }
        }
    }
    Ok(comp)
}

/// Runs the commutator counting argument for `h = [g, t]` from the first
/// basepoint whose `h`-orbit stays injective for `r` steps.
#[allow(clippy::too_many_arguments)]
pub fn sparse_support_probe<G, H>(
    ambient: &G,
    factor_metric: &H,
    act_g: &dyn Fn(&G::Point) -> G::Point,
    act_g_inv: &dyn Fn(&G::Point) -> G::Point,
    act_t: &dyn Fn(&G::Point) -> G::Point,
    act_t_inv: &dyn Fn(&G::Point) -> G::Point,
    base_candidates: &[G::Point],
    params: &AnalysisParams,
    cross_check_cap: usize,
) -> Result<LowerBoundCertificate>
where
    G: Graph,
    H: Graph<Point = G::Point>,
    G::Point: Ord,
{
    let r = params.r;
    let act_h = |x: &G::Point| act_g_inv(&act_t_inv(&act_g(&act_t(x))));

    // Find x_0 with pairwise distinct iterates x_0, ..., x_r.
    let mut orbit: Option<Vec<G::Point>> = None;
    for candidate in base_candidates {
        let mut points = vec![candidate.clone()];
        let mut seen: BTreeSet<G::Point> = BTreeSet::from([candidate.clone()]);
        for _ in 0..r {
            let next = act_h(points.last().unwrap());
            if !seen.insert(next.clone()) {
                break;
            }
            points.push(next);
        }
        if points.len() == r as usize + 1 {
            orbit = Some(points);
            break;
        }
    }
    let orbit = orbit.ok_or_else(|| {
        Error::ProbeInapplicable(format!(
            "no sampled basepoint has {} distinct iterates under [g, t]",
            r + 1
        ))
    })?;
    let basepoint = orbit[0].clone();

    // Attach each iterate to the support of g within ambient distance 1.
    let mut attached: Vec<G::Point> = Vec::with_capacity(orbit.len());
    for (n, x) in orbit.iter().enumerate() {
        if act_g(x) != *x {
            attached.push(x.clone());
            continue;
        }
        let near = ambient
            .neighbors(x)
            .into_iter()
            .map(|(_, q)| q)
            .find(|q| act_g(q) != *q);
        match near {
            Some(q) => attached.push(q),
            None => {
                return Err(Error::ProbeConstruction {
                    index: n,
                    reason: format!(
                        "support of g not within distance 1 of iterate {}",
                        ambient.key(x)
                    ),
                })
            }
        }
    }

    // Verify the displacement bound (C1) on the attached points.
    for y in &attached {
        let gy = act_g(y);
        if !graph::ball(factor_metric, y, params.d).contains_key(&gy) {
            return Err(Error::ProbeInapplicable(format!(
                "displacement of g at {} exceeds D = {}",
                ambient.key(y),
                params.d
            )));
        }
    }

    // Group the attached points by coarse component of supp(g); extract one
    // representative per component, in orbit order.
    let component_cap = 100_000;
    let mut rep_for: HashMap<G::Point, G::Point> = HashMap::new();
    let mut reps: Vec<G::Point> = Vec::new();
    let mut c1_measured: u32 = 0;
    for y in &attached {
        if rep_for.contains_key(y) {
            continue;
        }
        let comp = support_component(factor_metric, act_g, y, params.d, component_cap)?;
        let known = comp.iter().find_map(|p| rep_for.get(p).cloned());
        let rep = match known {
            Some(rep) => rep,
            None => {
                reps.push(y.clone());
                // Measured C1: ambient 1-neighborhood size of the component.
                let mut hood: BTreeSet<G::Point> = comp.iter().cloned().collect();
                for p in comp.iter() {
                    for (_, q) in ambient.neighbors(p) {
                        hood.insert(q);
                    }
                }
                c1_measured = c1_measured.max(hood.len() as u32);
                y.clone()
            }
        };
        for p in comp {
            rep_for.insert(p, rep.clone());
        }
        rep_for.insert(y.clone(), rep);
    }

    // Disjoint factor-metric balls around the representatives.
    let ball_radius = r / 2;
    let mut balls: Vec<HashMap<G::Point, u32>> = Vec::with_capacity(reps.len());
    for z in &reps {
        balls.push(graph::ball(factor_metric, z, ball_radius));
    }
    let mut union: BTreeSet<G::Point> = BTreeSet::new();
    let mut certified = 0usize;
    for (z, ball) in reps.iter().zip(&balls) {
        for p in ball.keys() {
            if !union.insert(p.clone()) {
                return Err(Error::ProbeConstruction {
                    index: 0,
                    reason: format!(
                        "balls of radius {ball_radius} overlap near {}",
                        ambient.key(z)
                    ),
                });
            }
        }
        certified += ball.len();
    }

    // Cross-check against the direct ambient ball when affordable.
    let probe_radius = params.probe_radius();
    let direct = ball_capped(ambient, &basepoint, probe_radius, cross_check_cap);
    if let Some(direct_ball) = &direct {
        if certified > direct_ball.len() {
            return Err(Error::ProbeConstruction {
                index: 0,
                reason: format!(
                    "certificate {certified} exceeds the direct count {}",
                    direct_ball.len()
                ),
            });
        }
        for p in &union {
            if !direct_ball.contains_key(p) {
                return Err(Error::ProbeConstruction {
                    index: 0,
                    reason: format!(
                        "witness ball point {} left B(x0, {probe_radius})",
                        ambient.key(p)
                    ),
                });
            }
        }
    }

    Ok(LowerBoundCertificate {
        basepoint: ambient.key(&basepoint),
        r,
        probe_radius,
        ball_radius,
        orbit_points: orbit.iter().map(|p| ambient.key(p)).collect(),
        component_count: reps.len(),
        c1_measured,
        witnesses: reps
            .iter()
            .zip(&balls)
            .map(|(z, b)| BallWitness { center: ambient.key(z), ball_size: b.len() })
            .collect(),
        certified_count: certified,
        direct_count: direct.map(|d| d.len()),
    })
}

/// Builds the chain gluing on which `[g, t]^r` is verified faithful and runs
/// the sparse-support probe on it.
///
/// The chain is the faithfulness witness of `[g, t]^r`; by construction the
/// commutator pushes its entry point one piece forward per application, so
/// the orbit stays injective for `r` steps and meets a fresh support
/// component of `g` in every `g`-piece it crosses.
pub fn glued_free_product_probe(
    product: &ProductSpec,
    g_factor: FactorId,
    g: &FactorElement,
    t_factor: FactorId,
    t: &FactorElement,
    params: &AnalysisParams,
    cross_check_cap: usize,
) -> Result<(GluingSpace, LowerBoundCertificate)> {
    let g_kind = *product.kind(g_factor)?;
    let t_kind = *product.kind(t_factor)?;
    if product.commutes(g_factor, t_factor) {
        return Err(Error::ProbeInapplicable(
            "the two factors commute, so [g, t] is trivial".into(),
        ));
    }
    let commutator = vec![
        Syllable { factor: t_factor, element: t.clone() },
        Syllable { factor: g_factor, element: g.clone() },
        Syllable { factor: t_factor, element: t_kind.invert(t) },
        Syllable { factor: g_factor, element: g_kind.invert(g) },
    ];
    let mut syllables = Vec::with_capacity(4 * params.r as usize);
    for _ in 0..params.r {
        syllables.extend(commutator.iter().cloned());
    }
    let word = SyllableWord::new(syllables);
    let witness = gluing::faithfulness_witness(&word, product, OracleMode::MovedPoint)?;
    let space = witness.space;

    let certificate = {
        let ambient = GluedGraph::new(&space, product);
        let metric = GluedGraph::restricted(&space, product, g_factor);
        let g_syl = Syllable { factor: g_factor, element: g.clone() };
        let g_inv_syl = Syllable { factor: g_factor, element: g_kind.invert(g) };
        let t_syl = Syllable { factor: t_factor, element: t.clone() };
        let t_inv_syl = Syllable { factor: t_factor, element: t_kind.invert(t) };
        let space_ref = &space;
        let act_g = |x: &gluing::GluedPoint| {
            gluing::syllable_act(&g_syl, space_ref, product, x).expect("validated syllable")
        };
        let act_g_inv = |x: &gluing::GluedPoint| {
            gluing::syllable_act(&g_inv_syl, space_ref, product, x).expect("validated syllable")
        };
        let act_t = |x: &gluing::GluedPoint| {
            gluing::syllable_act(&t_syl, space_ref, product, x).expect("validated syllable")
        };
        let act_t_inv = |x: &gluing::GluedPoint| {
            gluing::syllable_act(&t_inv_syl, space_ref, product, x).expect("validated syllable")
        };
        let mut candidates = vec![space.first_entry()];
        for k in 0..space.len() - 1 {
            candidates.push(gluing::GluedPoint {
                piece: k as u32,
                local: space.pieces()[k].exit.clone(),
            });
        }
        sparse_support_probe(
            &ambient,
            &metric,
            &act_g,
            &act_g_inv,
            &act_t,
            &act_t_inv,
            &candidates,
            params,
            cross_check_cap,
        )?
    };
    Ok((space, certificate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ExplicitGraph, IntLineGraph};

    #[test]
    fn vol_on_the_line_is_linear() {
        let basepoints = vec![0i64, 5, -17];
        let table = vol_table(&IntLineGraph, &basepoints, 128).unwrap();
        for n in 0..=128u32 {
            assert_eq!(table.get(n).unwrap(), 2 * n as u64 + 1);
        }
        assert!(!table.exhaustive);
        let fit = fit_exponent(&table, 8, 128).unwrap();
        assert!((0.95..=1.05).contains(&fit.slope), "slope {}", fit.slope);
    }

    #[test]
    fn exact_quadratic_fits_slope_two() {
        let vol: Vec<u64> = (0..=200u64).map(|n| (n * n).max(1)).collect();
        let table = GrowthTable::new(vol, vec!["synthetic".into()], false).unwrap();
        let fit = fit_exponent(&table, 8, 200).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!(fit.stderr < 1e-9);
    }

    #[test]
    fn vol_table_flags_exhaustive_domains() {
        let g = ExplicitGraph::cycle(10);
        let table = vol_table_exhaustive(&g, 6).unwrap();
        assert!(table.exhaustive);
        assert_eq!(table.get(0), Some(1));
        assert_eq!(table.get(6), Some(10));
        let partial = vol_table(&g, &[3], 6).unwrap();
        assert!(!partial.exhaustive);
    }

    #[test]
    fn vol_table_rejects_foreign_basepoints() {
        let g = ExplicitGraph::cycle(4);
        assert!(matches!(
            vol_table(&g, &[9], 3),
            Err(Error::PointOutsideDomain { .. })
        ));
    }

    #[test]
    fn growth_table_invariants() {
        assert!(GrowthTable::new(vec![], vec![], false).is_err());
        assert!(GrowthTable::new(vec![0], vec![], false).is_err());
        assert!(GrowthTable::new(vec![1, 3, 2], vec![], false).is_err());
        let csv = GrowthTable::new(vec![1, 3, 5], vec![], true).unwrap().to_csv();
        assert_eq!(csv, "n,vol\n0,1\n1,3\n2,5\n");
    }

    #[test]
    fn fit_rejects_degenerate_ranges() {
        let table = GrowthTable::new(vec![1, 3, 5, 7], vec![], false).unwrap();
        assert!(fit_exponent(&table, 0, 3).is_err());
        assert!(fit_exponent(&table, 2, 2).is_err());
        assert!(fit_exponent(&table, 1, 9).is_err());
    }

    #[test]
    fn coarse_components_on_the_line() {
        let points = vec![0i64, 1, 10, 11];
        let comps = coarse_components(&IntLineGraph, &points, 2);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0], vec![0, 1]);
        assert_eq!(comps[1], vec![10, 11]);
        // Wide D merges everything.
        let comps = coarse_components(&IntLineGraph, &points, 12);
        assert_eq!(comps.len(), 1);
        // Singleton input.
        let comps = coarse_components(&IntLineGraph, &[42], 1);
        assert_eq!(comps, vec![vec![42]]);
    }

    #[test]
    fn coarse_components_ignore_input_order() {
        let forward = vec![0i64, 1, 10, 11, 20];
        let backward = vec![20i64, 11, 1, 10, 0];
        assert_eq!(
            coarse_components(&IntLineGraph, &forward, 2),
            coarse_components(&IntLineGraph, &backward, 2)
        );
    }

    #[test]
    fn separation_failures_are_monotone_in_r() {
        // If two components sit within R1 and R1 < R2, the R2 check also
        // fails.
        let alpha = GrowthTable::new(vec![1; 200], vec![], false).unwrap();
        let act = |x: &i64| match *x {
            0 => 1,
            1 => 0,
            40 => 41,
            41 => 40,
            z => z,
        };
        for (r1, r2) in [(45u32, 60u32), (50, 80)] {
            let p1 = AnalysisParams::derive(4, 2, r1, alpha.clone());
            let p2 = AnalysisParams::derive(4, 2, r2, alpha.clone());
            let rep1 =
                check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 64, &p1).unwrap();
            let rep2 =
                check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 64, &p2).unwrap();
            if !rep1.components_separated.holds() {
                assert!(!rep2.components_separated.holds());
            }
        }
    }

    #[test]
    fn sparse_conditions_on_a_three_cycle() {
        // A 3-cycle at the origin of the line: one component of diameter 2,
        // displacement at most 2, linear balls.
        let act = |x: &i64| match *x {
            0 => 1,
            1 => 2,
            2 => 0,
            z => z,
        };
        let alpha: Vec<u64> = (0..=64u64).map(|n| 2 * n + 1).collect();
        let alpha = GrowthTable::new(alpha, vec!["0".into()], false).unwrap();
        let params = AnalysisParams::derive(2, 2, 16, alpha);
        let report =
            check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 32, &params).unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].diameter, Some(2));
        assert_eq!(report.support_in_window, 3);
    }

    #[test]
    fn sparse_conditions_identity_is_an_error() {
        let act = |x: &i64| *x;
        let alpha = GrowthTable::new(vec![1; 65], vec![], false).unwrap();
        let params = AnalysisParams::derive(1, 2, 16, alpha);
        assert!(matches!(
            check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 32, &params),
            Err(Error::TrivialElement)
        ));
    }

    #[test]
    fn sparse_conditions_two_far_copies() {
        let act = |x: &i64| match *x {
            0 => 1,
            1 => 2,
            2 => 0,
            100 => 101,
            101 => 102,
            102 => 100,
            z => z,
        };
        let alpha: Vec<u64> = (0..=64u64).map(|n| 2 * n + 1).collect();
        let alpha = GrowthTable::new(alpha, vec![], false).unwrap();
        let params = AnalysisParams::derive(2, 2, 16, alpha);
        let report =
            check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 120, &params).unwrap();
        assert_eq!(report.components.len(), 2);
        assert!(report.components_separated.holds());
        // At R = 200 the separation fails.
        let alpha2: Vec<u64> = (0..=200u64).map(|n| 2 * n + 1).collect();
        let params = AnalysisParams::derive(2, 2, 200, GrowthTable::new(alpha2, vec![], false).unwrap());
        let report =
            check_sparse_conditions(&IntLineGraph, &IntLineGraph, &act, &0, 120, &params).unwrap();
        assert!(!report.components_separated.holds());
    }

    #[test]
    fn params_derivation() {
        let alpha = GrowthTable::new(vec![1], vec![], false).unwrap();
        let p = AnalysisParams::derive(2, 2, 16, alpha);
        assert_eq!(p.d1, 7);
        assert_eq!(p.d2_times_two, 15);
        assert_eq!(p.probe_radius(), 7 * 16 + 8);
    }

    #[test]
    fn trivial_probe_at_r_one() {
        // h = [g, t] on the line with g the 0<->1 swap and t the shift.
        let act_g = |x: &i64| match *x {
            0 => 1,
            1 => 0,
            z => z,
        };
        let act_t = |x: &i64| x + 1;
        let act_t_inv = |x: &i64| x - 1;
        let alpha: Vec<u64> = (0..=8u64).map(|n| 2 * n + 1).collect();
        let params =
            AnalysisParams::derive(1, 2, 1, GrowthTable::new(alpha, vec![], false).unwrap());
        let cert = sparse_support_probe(
            &IntLineGraph,
            &IntLineGraph,
            &act_g,
            &act_g,
            &act_t,
            &act_t_inv,
            &[0i64, 5],
            &params,
            1_000_000,
        )
        .unwrap();
        assert_eq!(cert.ball_radius, 0);
        assert!(cert.certified_count >= 1);
        assert!(cert.certified_count <= cert.direct_count.unwrap());
    }
}
