//! Random stores, random queries and a brute-force oracle for the
//! integration suites.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use gsmat::executor::JoinTrace;
use gsmat::gen::{generate, write_ntriples, GenConfig};
use gsmat::parser::{NTriplesReader, RawTriple};
use gsmat::query::QueryTerm;
use gsmat::{parse_query, Engine, ExecMode, QueryGraph, Store};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const MODES: [ExecMode; 4] = [
    ExecMode::Sequential,
    ExecMode::Parallel { workers: 1 },
    ExecMode::Parallel { workers: 2 },
    ExecMode::Parallel { workers: 8 },
];

pub struct Dataset {
    pub nt: String,
    pub triples: Vec<RawTriple>,
    pub store: Store,
}

impl Dataset {
    pub fn from_config(cfg: &GenConfig) -> Dataset {
        let mut nt = Vec::new();
        write_ntriples(&generate(cfg).expect("valid generator config"), &mut nt).unwrap();
        let nt = String::from_utf8(nt).unwrap();
        let triples: Vec<RawTriple> = NTriplesReader::new(nt.as_bytes())
            .map(|t| t.expect("generated N-Triples parse"))
            .collect();
        let store = Store::from_ntriples(nt.as_bytes()).unwrap();
        Dataset { nt, triples, store }
    }

    /// 50 to 1000 triples over 2 to 8 predicates, with a node pool between
    /// an eighth and a half of the triple count.
    pub fn random(rng: &mut StdRng) -> Dataset {
        let triples = rng.random_range(50..=1000u64);
        let predicates = rng.random_range(2..=8u32);
        let nodes = rng.random_range(triples / 8..=triples / 2).max(8);
        Dataset::from_config(&GenConfig {
            triples,
            predicates,
            zipf: rng.random_range(0.0..1.5),
            seed: rng.random(),
            nodes: Some(nodes),
        })
    }
}

/// Which endpoints a random query may hold as constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constants {
    /// Up to the given number of walk nodes become constants.
    Upto(usize),
    /// None; every endpoint is a variable.
    None,
}

/// A connected query of `n` patterns built by walking the data graph, so
/// most queries have answers. Some patterns are perturbed to a different or
/// unknown predicate. The pattern order is shuffled.
pub fn walk_query(rng: &mut StdRng, data: &Dataset, n: usize, constants: Constants) -> String {
    let mut incident: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, t) in data.triples.iter().enumerate() {
        incident.entry(&t.subject).or_default().push(i);
        incident.entry(&t.object).or_default().push(i);
    }
    let predicates: Vec<&str> = {
        let set: HashSet<&str> = data.triples.iter().map(|t| t.predicate.as_str()).collect();
        let mut v: Vec<&str> = set.into_iter().collect();
        v.sort_unstable();
        v
    };

    let mut chosen = vec![rng.random_range(0..data.triples.len())];
    let mut nodes: Vec<&str> = Vec::new();
    add_nodes(&data.triples[chosen[0]], &mut nodes);
    while chosen.len() < n {
        let node = *nodes.choose(rng).unwrap();
        let next = *incident[node].choose(rng).unwrap();
        chosen.push(next);
        add_nodes(&data.triples[next], &mut nodes);
    }

    let max_constants = match constants {
        Constants::Upto(k) => rng.random_range(0..=k.min(nodes.len() - 1)),
        Constants::None => 0,
    };
    let mut constant_nodes: HashSet<&str> = HashSet::new();
    while constant_nodes.len() < max_constants {
        constant_nodes.insert(*nodes.choose(rng).unwrap());
    }
    let term = |node: &str| {
        if constant_nodes.contains(node) {
            format!("<{node}>")
        } else {
            format!("?v{}", nodes.iter().position(|n| *n == node).unwrap())
        }
    };

    let mut patterns: Vec<String> = chosen
        .iter()
        .map(|&i| {
            let t = &data.triples[i];
            let predicate = match rng.random_range(0..100) {
                0..=7 => predicates.choose(rng).unwrap().to_string(),
                8..=9 => "http://example.org/missing".to_owned(),
                _ => t.predicate.clone(),
            };
            format!("{} <{}> {}", term(&t.subject), predicate, term(&t.object))
        })
        .collect();
    shuffle(rng, &mut patterns);

    let vars: Vec<String> = nodes
        .iter()
        .filter(|n| !constant_nodes.contains(*n))
        .map(|n| term(n))
        .collect();
    let mut text = String::from("SELECT ");
    if rng.random_bool(0.2) {
        text.push_str("DISTINCT ");
    }
    if rng.random_bool(0.3) {
        text.push('*');
    } else {
        let mut projected: Vec<&String> = vars.iter().filter(|_| rng.random_bool(0.6)).collect();
        if projected.is_empty() {
            projected.push(&vars[0]);
        }
        shuffle(rng, &mut projected);
        let list: Vec<&str> = projected.iter().map(|s| s.as_str()).collect();
        text.push_str(&list.join(" "));
    }
    text.push_str(" WHERE {\n");
    for p in patterns {
        let _ = writeln!(text, "  {p} .");
    }
    text.push('}');
    text
}

fn add_nodes<'a>(t: &'a RawTriple, nodes: &mut Vec<&'a str>) {
    for n in [&t.subject, &t.object] {
        if !nodes.contains(&n.as_str()) {
            nodes.push(n);
        }
    }
}

fn shuffle<T>(rng: &mut StdRng, items: &mut [T]) {
    use rand::seq::SliceRandom;
    items.shuffle(rng);
}

/// Nested-loop join of the patterns in textual order over term strings.
/// Returns `None` when an intermediate result would pass `cap` rows.
pub fn oracle(triples: &[RawTriple], q: &QueryGraph, cap: usize) -> Option<Vec<Vec<String>>> {
    let distinct: HashSet<&RawTriple> = triples.iter().collect();
    let mut by_predicate: HashMap<&str, Vec<&RawTriple>> = HashMap::new();
    for t in distinct {
        by_predicate.entry(&t.predicate).or_default().push(t);
    }
    let slot = |v: &str| q.variables.iter().position(|x| x == v).unwrap();
    let mut rows: Vec<Vec<Option<&str>>> = vec![vec![None; q.variables.len()]];
    for p in &q.patterns {
        let candidates = by_predicate
            .get(p.predicate.as_str())
            .map_or(&[][..], |v| v);
        let mut next = Vec::new();
        for row in &rows {
            for t in candidates {
                let mut b = row.clone();
                let ok = [
                    (&p.subject, t.subject.as_str()),
                    (&p.object, t.object.as_str()),
                ]
                .into_iter()
                .all(|(term, value)| match term {
                    QueryTerm::Const(c) => c == value,
                    QueryTerm::Var(v) => {
                        let cell = &mut b[slot(v)];
                        match cell {
                            Some(bound) => *bound == value,
                            None => {
                                *cell = Some(value);
                                true
                            }
                        }
                    }
                });
                if ok {
                    next.push(b);
                    if next.len() > cap {
                        return None;
                    }
                }
            }
        }
        rows = next;
    }
    let cols: Vec<usize> = q.projected().iter().map(|v| slot(v)).collect();
    let mut out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|&c| r[c].unwrap().to_owned()).collect())
        .collect();
    out.sort_unstable();
    if q.distinct {
        out.dedup();
    }
    Some(out)
}

/// Engine output as a sorted bag of decoded rows.
pub fn engine_bag(
    store: &Store,
    q: &QueryGraph,
    mode: ExecMode,
) -> (Vec<Vec<String>>, Vec<JoinTrace>) {
    let result = Engine::new(store)
        .with_trace(true)
        .run(q, mode)
        .expect("query runs");
    let mut rows: Vec<Vec<String>> = result
        .decoded_rows(store.dictionary())
        .unwrap()
        .into_iter()
        .map(|r| r.into_iter().map(str::to_owned).collect())
        .collect();
    rows.sort_unstable();
    (rows, result.traces)
}

/// A random dataset and a query over it whose oracle result is small
/// enough to enumerate.
pub struct Trial {
    pub data: Dataset,
    pub text: String,
    pub query: QueryGraph,
    pub expected: Vec<Vec<String>>,
}

pub const ORACLE_CAP: usize = 50_000;

pub fn trial(rng: &mut StdRng) -> Trial {
    let data = Dataset::random(rng);
    loop {
        let n = rng.random_range(1..=6);
        let text = walk_query(rng, &data, n, Constants::Upto(2));
        let query = parse_query(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
        if let Some(expected) = oracle(&data.triples, &query, ORACLE_CAP) {
            return Trial {
                data,
                text,
                query,
                expected,
            };
        }
    }
}

/// Checks one join's pre-allocation against counts computed here from the
/// join inputs.
pub fn check_trace(t: &JoinTrace) -> Result<(), String> {
    let p = &t.prealloc;
    let n = p.counts.len();
    if p.offsets.len() != n || p.groups.len() != n || t.emitted.len() != n {
        return Err(format!("step {}: array lengths differ", t.step));
    }
    let mut running = 0u64;
    for i in 0..n {
        if p.offsets[i] != running {
            return Err(format!(
                "step {}: P[{i}] = {} but prefix sum is {running}",
                t.step, p.offsets[i]
            ));
        }
        running += p.counts[i];
    }
    if running != p.total {
        return Err(format!(
            "step {}: total {} != sum of N {running}",
            t.step, p.total
        ));
    }
    let mut next = 0;
    for g in &p.groups {
        if g.start != next || g.is_empty() {
            return Err(format!(
                "step {}: groups do not tile the left table",
                t.step
            ));
        }
        next = g.end;
    }
    if next != t.left.len() {
        return Err(format!(
            "step {}: groups cover {next} of {} rows",
            t.step,
            t.left.len()
        ));
    }

    let left_cols: Vec<usize> = t
        .join_vars
        .iter()
        .map(|v| t.left.column_of(v).unwrap())
        .collect();
    let right_cols: Vec<usize> = t
        .join_vars
        .iter()
        .map(|v| t.right.column_of(v).unwrap())
        .collect();
    let first = (0..t.join_vars.len())
        .min_by_key(|&i| left_cols[i])
        .unwrap();
    if right_cols[first] != t.right_key {
        return Err(format!(
            "step {}: right side keyed on the wrong column",
            t.step
        ));
    }
    let mut by_first: HashMap<u64, u64> = HashMap::new();
    let mut by_all: HashMap<Vec<u64>, u64> = HashMap::new();
    for r in t.right.rows() {
        *by_first.entry(r[right_cols[first]]).or_default() += 1;
        *by_all
            .entry(right_cols.iter().map(|&c| r[c]).collect())
            .or_default() += 1;
    }
    let mut first_matches = 0u64;
    let mut full_matches = 0u64;
    for (i, g) in p.groups.iter().enumerate() {
        let mut group_first = 0u64;
        for row in g.clone().map(|k| t.left.row(k)) {
            group_first += by_first.get(&row[left_cols[first]]).copied().unwrap_or(0);
            let key: Vec<u64> = left_cols.iter().map(|&c| row[c]).collect();
            full_matches += by_all.get(&key).copied().unwrap_or(0);
        }
        if group_first != p.counts[i] {
            return Err(format!(
                "step {}: N[{i}] = {} but {group_first} rows match",
                t.step, p.counts[i]
            ));
        }
        if t.emitted[i] as u64 > p.counts[i] {
            return Err(format!(
                "step {}: group {i} emitted {} > N = {}",
                t.step, t.emitted[i], p.counts[i]
            ));
        }
        first_matches += group_first;
    }
    if first_matches != p.total {
        return Err(format!(
            "step {}: sum of N {} != first-variable matches {first_matches}",
            t.step, p.total
        ));
    }
    let emitted: u64 = t.emitted.iter().map(|&e| e as u64).sum();
    if emitted != full_matches {
        return Err(format!(
            "step {}: emitted {emitted} rows, expected {full_matches}",
            t.step
        ));
    }
    Ok(())
}
