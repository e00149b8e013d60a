//! The Grigorchuk group acting on the binary rooted tree.
//!
//! Elements are formal words over the involutive generators `a, b, c, d`,
//! acting on binary strings by the standard automaton
//! `a = (1,1)swap`, `b = (a,c)`, `c = (a,d)`, `d = (1,b)`.
//!
//! Composition convention, used everywhere in this crate: a word acts
//! right-to-left, so `act("ab", w) = a(b(w))`.
//!
//! The level-`n` Schreier graph is an interval of length `2^n - 1` whose
//! vertex order follows the Gray code rule: each word is adjacent to the word
//! with its first digit flipped, and to the word with the digit after its
//! first `0` flipped (when that digit exists).

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, Graph};

/// Hard cap on level graph construction.
pub const LEVEL_CAP: u32 = 16;

const LETTERS: [char; 4] = ['a', 'b', 'c', 'd'];

fn check_word(word: &str) -> Result<()> {
    for ch in word.chars() {
        if !LETTERS.contains(&ch) {
            return Err(Error::InvalidArgument(format!(
                "letter `{ch}` is not one of a,b,c,d"
            )));
        }
    }
    Ok(())
}

/// A Grigorchuk group element as a (possibly unreduced) word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GrigorchukElement {
    word: String,
}

impl GrigorchukElement {
    pub fn new(word: &str) -> Result<Self> {
        check_word(word)?;
        Ok(GrigorchukElement { word: word.to_string() })
    }

    pub fn identity() -> Self {
        GrigorchukElement { word: String::new() }
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    /// Reduced form: free reduction plus the Klein relations on `{b,c,d}`.
    pub fn reduced(&self) -> String {
        reduce(&self.word)
    }

    /// `self` composed after `other` (so `other` acts first).
    pub fn compose(&self, other: &Self) -> Self {
        GrigorchukElement { word: reduce(&format!("{}{}", self.word, other.word)) }
    }

    /// All four generators are involutions, so inversion reverses the word.
    pub fn inverse(&self) -> Self {
        GrigorchukElement { word: self.word.chars().rev().collect() }
    }

    pub fn is_trivial(&self) -> bool {
        is_trivial(&self.word)
    }

    /// Canonical equality via the word problem.
    pub fn equal(&self, other: &Self) -> bool {
        let mut w = self.word.clone();
        w.extend(other.word.chars().rev());
        is_trivial(&w)
    }
}

/// Free + Klein reduction: `xx -> 1` and `xy -> z` for `{x,y,z} = {b,c,d}`.
pub fn reduce(word: &str) -> String {
    let mut stack: Vec<char> = Vec::with_capacity(word.len());
    for ch in word.chars() {
        stack.push(ch);
        loop {
            let n = stack.len();
            if n < 2 {
                break;
            }
            let (x, y) = (stack[n - 2], stack[n - 1]);
            if x == y {
                stack.truncate(n - 2);
            } else if x != 'a' && y != 'a' {
                let z = ['b', 'c', 'd']
                    .into_iter()
                    .find(|&l| l != x && l != y)
                    .unwrap();
                stack.truncate(n - 2);
                stack.push(z);
            } else {
                break;
            }
        }
    }
    stack.into_iter().collect()
}

/// Applies a single generator to a binary word packed as bits.
///
/// Bit `i` of `bits` is the `i`-th digit, so bit 0 is the first digit.
pub fn apply_letter(letter: char, bits: u32, len: u32) -> u32 {
    let mut state = letter;
    let mut pos = 0;
    let mut out = bits;
    while pos < len {
        let digit = (out >> pos) & 1;
        match state {
            'a' => {
                out ^= 1 << pos;
                return out;
            }
            'b' => state = if digit == 0 { 'a' } else { 'c' },
            'c' => state = if digit == 0 { 'a' } else { 'd' },
            'd' => {
                if digit == 0 {
                    return out;
                }
                state = 'b';
            }
            _ => unreachable!(),
        }
        pos += 1;
    }
    out
}

/// Applies a word right-to-left to packed bits.
pub fn act_bits(word: &str, bits: u32, len: u32) -> u32 {
    let mut out = bits;
    for ch in word.chars().rev() {
        out = apply_letter(ch, out, len);
    }
    out
}

pub fn parse_point(point: &str) -> Result<(u32, u32)> {
    let mut bits = 0u32;
    let mut len = 0u32;
    for ch in point.chars() {
        match ch {
            '0' => {}
            '1' => bits |= 1 << len,
            _ => {
                return Err(Error::PointOutsideDomain {
                    point: point.to_string(),
                    context: "binary tree vertices are 0/1 strings".into(),
                })
            }
        }
        len += 1;
        if len > 31 {
            return Err(Error::InvalidArgument("tree vertex longer than 31 digits".into()));
        }
    }
    Ok((bits, len))
}

pub fn format_point(bits: u32, len: u32) -> String {
    (0..len)
        .map(|i| if (bits >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Action of a word on a binary string; length preserving.
pub fn act(word: &str, point: &str) -> Result<String> {
    check_word(word)?;
    let (bits, len) = parse_point(point)?;
    Ok(format_point(act_bits(word, bits, len), len))
}

/// Wreath recursion of a word: root swap flag and the two sections, so that
/// `g(x·w) = ε(x)·g_x(w)`.
pub fn sections(word: &str) -> (bool, String, String) {
    let mut swap = false;
    let mut s0: Vec<char> = Vec::new();
    let mut s1: Vec<char> = Vec::new();
    // Letters applied first are rightmost; fold them in from the right.
    for ch in word.chars().rev() {
        let (eps, l0, l1) = match ch {
            'a' => (true, None, None),
            'b' => (false, Some('a'), Some('c')),
            'c' => (false, Some('a'), Some('d')),
            'd' => (false, None, Some('b')),
            _ => panic!("invalid letter {ch}"),
        };
        let (into0, into1) = if swap { (l1, l0) } else { (l0, l1) };
        if let Some(l) = into0 {
            s0.push(l);
        }
        if let Some(l) = into1 {
            s1.push(l);
        }
        swap ^= eps;
    }
    s0.reverse();
    s1.reverse();
    (swap, s0.into_iter().collect(), s1.into_iter().collect())
}

fn root_swap(word: &str) -> bool {
    word.chars().filter(|&c| c == 'a').count() % 2 == 1
}

fn trivial_memo() -> &'static Mutex<HashMap<String, bool>> {
    static MEMO: OnceLock<Mutex<HashMap<String, bool>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn is_trivial_reduced(word: &str) -> bool {
    if word.is_empty() {
        return true;
    }
    if root_swap(word) {
        return false;
    }
    if word.len() == 1 {
        return false;
    }
    if let Some(&hit) = trivial_memo().lock().unwrap().get(word) {
        return hit;
    }
    let (swap, s0, s1) = sections(word);
    debug_assert!(!swap);
    let result = is_trivial_reduced(&reduce(&s0)) && is_trivial_reduced(&reduce(&s1));
    trivial_memo()
        .lock()
        .unwrap()
        .insert(word.to_string(), result);
    result
}

/// Word problem: contraction on sections with memoization.
pub fn is_trivial(word: &str) -> bool {
    is_trivial_reduced(&reduce(word))
}

/// Active vertices of the portrait up to (excluding) `depth`.
///
/// A vertex is active when the root permutation of the section there swaps
/// its two children.
pub fn portrait(word: &str, depth: u32) -> BTreeSet<String> {
    let mut active = BTreeSet::new();
    collect_portrait(&reduce(word), String::new(), depth, &mut active);
    active
}

fn collect_portrait(word: &str, prefix: String, depth: u32, active: &mut BTreeSet<String>) {
    if depth == 0 || is_trivial_reduced(word) {
        return;
    }
    let (swap, s0, s1) = sections(word);
    if swap {
        active.insert(prefix.clone());
    }
    collect_portrait(&reduce(&s0), format!("{prefix}0"), depth - 1, active);
    collect_portrait(&reduce(&s1), format!("{prefix}1"), depth - 1, active);
}

/// Erases the last digit: the covering map from level `n` to level `n-1`.
pub fn covering_map(point: &str) -> Result<String> {
    let (_, len) = parse_point(point)?;
    if len < 2 {
        return Err(Error::InvalidArgument(
            "covering map needs a word of length at least 2".into(),
        ));
    }
    Ok(point[..point.len() - 1].to_string())
}

/// Gray-rule neighbors of a packed vertex at level `n`.
pub fn gray_neighbors(bits: u32, n: u32) -> Vec<u32> {
    let mut out = vec![bits ^ 1];
    let first_zero = (bits | !((1u32 << n) - 1)).trailing_ones();
    if first_zero + 1 < n {
        out.push(bits ^ (1 << (first_zero + 1)));
    }
    out
}

/// The level-`n` Schreier graph with its cached interval ordering.
#[derive(Debug)]
pub struct LevelGraph {
    pub level: u32,
    /// `order[p]` = vertex at interval position `p`, leftmost is `1^n`.
    pub order: Vec<u32>,
    /// `position[v]` = interval position of vertex `v`.
    pub position: Vec<u32>,
}

impl LevelGraph {
    pub fn size(&self) -> usize {
        1usize << self.level
    }

    pub fn diameter(&self) -> u32 {
        (1u32 << self.level) - 1
    }

    /// Interval distance between two vertices.
    pub fn distance(&self, v: u32, w: u32) -> u32 {
        self.position[v as usize].abs_diff(self.position[w as usize])
    }
}

impl Graph for LevelGraph {
    type Point = u32;

    fn neighbors(&self, p: &u32) -> Vec<(EdgeLabel, u32)> {
        ['a', 'b', 'c', 'd']
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                (
                    EdgeLabel { factor: 0, generator: i as u32 },
                    apply_letter(s, *p, self.level),
                )
            })
            .collect()
    }

    fn key(&self, p: &u32) -> String {
        format_point(*p, self.level)
    }

    fn vertices(&self) -> Option<Vec<u32>> {
        Some((0..1u32 << self.level).collect())
    }
}

/// Edge set `{v, s·v}` (loops dropped) derived from the group action.
pub fn action_edge_set(n: u32) -> BTreeSet<(u32, u32)> {
    let mut edges = BTreeSet::new();
    for v in 0..1u32 << n {
        for s in LETTERS {
            let w = apply_letter(s, v, n);
            if w != v {
                edges.insert((v.min(w), v.max(w)));
            }
        }
    }
    edges
}

/// Edge set from the Gray code rule.
pub fn gray_edge_set(n: u32) -> BTreeSet<(u32, u32)> {
    let mut edges = BTreeSet::new();
    for v in 0..1u32 << n {
        for w in gray_neighbors(v, n) {
            edges.insert((v.min(w), v.max(w)));
        }
    }
    edges
}

fn build_level_graph(n: u32) -> Result<LevelGraph> {
    if n == 0 || n > LEVEL_CAP {
        return Err(Error::CapExceeded {
            cap: LEVEL_CAP as usize,
            context: format!("level graph at level {n}"),
        });
    }
    if action_edge_set(n) != gray_edge_set(n) {
        return Err(Error::InvalidArgument(format!(
            "gray rule and action disagree at level {n}"
        )));
    }
    // The Gray adjacency is a path; walk it from the leftmost vertex 1^n.
    let size = 1usize << n;
    let leftmost = (1u32 << n) - 1;
    let mut order = Vec::with_capacity(size);
    let mut position = vec![u32::MAX; size];
    let mut current = leftmost;
    let mut previous = u32::MAX;
    for pos in 0..size {
        order.push(current);
        position[current as usize] = pos as u32;
        if pos + 1 == size {
            break;
        }
        let next = gray_neighbors(current, n)
            .into_iter()
            .find(|&w| w != previous)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("level {n} graph is not an interval"))
            })?;
        previous = current;
        current = next;
    }
    Ok(LevelGraph { level: n, order, position })
}

/// Cached level graph accessor; levels are validated on first construction.
pub fn level_graph(n: u32) -> Result<Arc<LevelGraph>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<LevelGraph>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(found) = cache.lock().unwrap().get(&n) {
        return Ok(found.clone());
    }
    let built = Arc::new(build_level_graph(n)?);
    cache
        .lock()
        .unwrap()
        .entry(n)
        .or_insert_with(|| built.clone());
    Ok(built)
}

/// A level, vertex and distance certifying the 1/8 displacement bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementWitness {
    pub level: u32,
    pub vertex: String,
    pub displacement: u32,
    pub diameter: u32,
}

impl DisplacementWitness {
    /// `d_n(gw, w) >= diam(Γ_n) / 8`, kept in integers.
    pub fn certifies_eighth(&self) -> bool {
        8 * self.displacement >= self.diameter
    }
}

/// Searches levels `1..=level_cap` for a vertex moved by at least an eighth
/// of the level diameter. Scans vertices in lexicographic order and keeps the
/// first maximum, so the result is deterministic.
pub fn displacement_witness(word: &str, level_cap: u32) -> Result<DisplacementWitness> {
    if is_trivial(word) {
        return Err(Error::TrivialElement);
    }
    let reduced = reduce(word);
    for n in 1..=level_cap {
        let lg = level_graph(n)?;
        let mut best: Option<(u32, String)> = None;
        for v in 0..1u32 << n {
            let w = act_bits(&reduced, v, n);
            let disp = lg.distance(v, w);
            let name = format_point(v, n);
            let better = match &best {
                None => disp > 0,
                Some((bd, bn)) => disp > *bd || (disp == *bd && name < *bn),
            };
            if better {
                best = Some((disp, name));
            }
        }
        if let Some((disp, vertex)) = best {
            if 8 * disp >= lg.diameter() {
                return Ok(DisplacementWitness {
                    level: n,
                    vertex,
                    displacement: disp,
                    diameter: lg.diameter(),
                });
            }
        }
    }
    Err(Error::CapExceeded {
        cap: level_cap as usize,
        context: format!("displacement witness search for `{word}`"),
    })
}

/// All reduced nontrivial words of length at most `max_len`, one per
/// distinct reduced form.
pub fn reduced_words_up_to(max_len: usize) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in LETTERS {
                let candidate = reduce(&format!("{w}{l}"));
                if candidate.len() > w.len() && seen.insert(candidate.clone()) {
                    next.push(candidate);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}
