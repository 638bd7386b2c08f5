//! Seeded generators for protocol expressions, architectures, functors and
//! synthetic repositories.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

use archmatch::category::{close, FunctorMapping, MorphismKind, PseudoCategory};
use archmatch::dsl::{ArchKind, SourceUnit};
use archmatch::protocol::{compile, minimal_dfa, ProtocolExpr, DEFAULT_STATE_LIMIT};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn alphabet(n: usize) -> Vec<String> {
    ["a", "b", "c", "d", "e", "f"][..n].iter().map(|s| s.to_string()).collect()
}

/// Random expression of at most the given depth.
pub fn random_expr(rng: &mut StdRng, alphabet: &[String], depth: usize) -> ProtocolExpr {
    let leaf = |rng: &mut StdRng| {
        if rng.gen_ratio(1, 12) {
            ProtocolExpr::Eps
        } else {
            ProtocolExpr::ev(alphabet.choose(rng).unwrap().clone())
        }
    };
    if depth == 0 || rng.gen_ratio(1, 4) {
        return leaf(rng);
    }
    let sub = |rng: &mut StdRng| random_expr(rng, alphabet, depth - 1);
    match rng.gen_range(0..5) {
        0 => leaf(rng),
        1 => ProtocolExpr::seq(sub(rng), sub(rng)),
        2 => ProtocolExpr::alt(sub(rng), sub(rng)),
        3 => ProtocolExpr::star(sub(rng)),
        _ => ProtocolExpr::shuffle(sub(rng), sub(rng)),
    }
}

/// Proptest strategy for expressions over the first `n` letters.
pub fn arb_expr(n: usize, depth: u32) -> impl Strategy<Value = ProtocolExpr> {
    let names = alphabet(n);
    let leaf = prop_oneof![
        1 => Just(ProtocolExpr::Eps),
        8 => proptest::sample::select(names).prop_map(ProtocolExpr::ev),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProtocolExpr::seq(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ProtocolExpr::alt(a, b)),
            inner.clone().prop_map(ProtocolExpr::star),
            (inner.clone(), inner).prop_map(|(a, b)| ProtocolExpr::shuffle(a, b)),
        ]
    })
}

/// An expression in which every given event occurs exactly once.
pub fn linear_expr(rng: &mut StdRng, events: &[String]) -> ProtocolExpr {
    if events.len() == 1 {
        let e = ProtocolExpr::ev(events[0].clone());
        return if rng.gen_ratio(1, 3) { ProtocolExpr::star(e) } else { e };
    }
    let cut = rng.gen_range(1..events.len());
    let (l, r) = events.split_at(cut);
    let (a, b) = (linear_expr(rng, l), linear_expr(rng, r));
    let e = match rng.gen_range(0..4) {
        0 => ProtocolExpr::seq(a, b),
        1 => ProtocolExpr::alt(a, b),
        2 => ProtocolExpr::shuffle(a, b),
        _ => ProtocolExpr::seq(a, b),
    };
    if rng.gen_ratio(1, 4) {
        ProtocolExpr::star(e)
    } else {
        e
    }
}

/// Replaces the `k`-th event occurrence (pre-order) by the empty word.
pub fn delete_event(e: &ProtocolExpr, k: &mut usize) -> ProtocolExpr {
    use ProtocolExpr::*;
    match e {
        Eps => Eps,
        Ev(m) => {
            let hit = *k == 0;
            *k = k.wrapping_sub(1);
            if hit {
                Eps
            } else {
                Ev(m.clone())
            }
        }
        Seq(a, b) => ProtocolExpr::seq(delete_event(a, k), delete_event(b, k)),
        Alt(a, b) => ProtocolExpr::alt(delete_event(a, k), delete_event(b, k)),
        Star(a) => ProtocolExpr::star(delete_event(a, k)),
        Shuffle(a, b) => ProtocolExpr::shuffle(delete_event(a, k), delete_event(b, k)),
    }
}

/// Random single-kind edge set over `n` objects named `o0..`.
pub fn random_edges(rng: &mut StdRng, n: usize, m: usize, acyclic: bool) -> Vec<(String, String)> {
    let mut edges = BTreeSet::new();
    let mut attempts = 0;
    while edges.len() < m && attempts < m * 20 {
        attempts += 1;
        let (mut x, mut y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if acyclic {
            if x == y {
                continue;
            }
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
        }
        edges.insert((format!("o{x}"), format!("o{y}")));
    }
    edges.into_iter().collect()
}

pub fn category(name: &str, kind: ArchKind, objects: usize, edges: &[(String, String)], k: MorphismKind) -> PseudoCategory {
    let mut c = PseudoCategory::new(name, kind);
    for i in 0..objects {
        c.add_object(format!("o{i}"));
    }
    for (x, y) in edges {
        c.add_morphism(x.clone(), k, y.clone());
    }
    c
}

/// Pairs `(x, z)` joined by a directed path of at least two edges.
pub fn reachable_in_two_or_more(edges: &[(String, String)]) -> BTreeSet<(String, String)> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (x, y) in edges {
        succ.entry(x).or_default().push(y);
    }
    let mut out = BTreeSet::new();
    for start in succ.keys() {
        // BFS over (node, at least two steps taken) pairs.
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for &y in &succ[start] {
            if seen.insert((y, false)) {
                queue.push_back((y, false));
            }
        }
        while let Some((v, long)) = queue.pop_front() {
            if long {
                out.insert((start.to_string(), v.to_string()));
            }
            for &w in succ.get(v).into_iter().flatten() {
                if seen.insert((w, true)) {
                    queue.push_back((w, true));
                }
            }
        }
    }
    out
}

/// A closed business category with a valid mapping onto a closed
/// application category built from the images of its morphisms.
pub fn valid_functor(rng: &mut StdRng) -> FunctorMapping {
    let n = rng.gen_range(1..=12);
    let m = rng.gen_range(1..=8);
    let mut ba = PseudoCategory::new("BA", ArchKind::Business);
    for i in 0..n {
        ba.add_object(format!("I{i}"));
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let k = if rng.gen_bool(0.5) { MorphismKind::Ext } else { MorphismKind::Cmp };
        ba.add_morphism(format!("I{x}"), k, format!("I{y}"));
    }
    let ba = close(&ba);
    let object_map: BTreeMap<String, String> =
        (0..n).map(|i| (format!("I{i}"), format!("C{}", rng.gen_range(0..m)))).collect();
    let generator_map = BTreeMap::from([(MorphismKind::Ext, MorphismKind::Use), (MorphismKind::Cmp, MorphismKind::Cmp)]);
    let mut aa = PseudoCategory::new("AA", ArchKind::Application);
    for j in 0..m {
        aa.add_object(format!("C{j}"));
    }
    for f in ba.morphisms() {
        aa.add_morphism(object_map[&f.src].clone(), generator_map[&f.kind], object_map[&f.dst].clone());
    }
    // Unrelated extra structure in the target.
    for _ in 0..rng.gen_range(0..=3) {
        let (x, y) = (rng.gen_range(0..m), rng.gen_range(0..m));
        aa.add_morphism(format!("C{x}"), MorphismKind::Use, format!("C{y}"));
    }
    FunctorMapping {
        name: "F".into(),
        source: ba,
        target: close(&aa),
        object_map,
        generator_map,
    }
}

const VERBS: [&str; 10] = ["get", "put", "list", "find", "open", "close", "send", "load", "save", "scan"];
const NOUNS: [&str; 8] = ["Record", "Order", "Item", "User", "Report", "Invoice", "Ledger", "Ticket"];
const TYPES: [&str; 3] = ["String", "Integer", "Boolean"];

fn method_names(rng: &mut StdRng, k: usize, taken: &BTreeSet<String>) -> Vec<String> {
    let mut names = BTreeSet::new();
    while names.len() < k {
        let n = format!("{}{}", VERBS.choose(rng).unwrap(), NOUNS.choose(rng).unwrap());
        if !taken.contains(&n) {
            names.insert(n);
        }
    }
    let mut names: Vec<String> = names.into_iter().collect();
    names.shuffle(rng);
    names
}

fn signature(rng: &mut StdRng, name: &str) -> String {
    let params: Vec<String> = (0..rng.gen_range(0..=3))
        .map(|i| format!("p{i}: {}", TYPES.choose(rng).unwrap()))
        .collect();
    let ret = if rng.gen_ratio(1, 3) {
        format!(": {}", TYPES.choose(rng).unwrap())
    } else {
        String::new()
    };
    format!("{name}({}){ret}", params.join(", "))
}

/// One synthetic component per unit: a provided interface of 3–6 methods,
/// a guarded contract whose protocol has a minimal DFA of at most
/// `max_states` states, and optionally a required interface with its own
/// methods.
pub struct Synthetic {
    pub units: Vec<SourceUnit>,
    /// Per component: provided interface text, protocol text.
    pub components: Vec<SyntheticComponent>,
}

pub struct SyntheticComponent {
    pub name: String,
    pub interface: String,
    pub methods: Vec<String>,
    pub interface_text: String,
    pub protocol: ProtocolExpr,
    pub required: Vec<String>,
}

pub fn synthetic(seed: u64, count: usize, max_states: usize, with_required: bool) -> Synthetic {
    let mut rng = rng(seed);
    let mut units = Vec::new();
    let mut components = Vec::new();
    for i in 0..count {
        let k = rng.gen_range(3..=6);
        let methods = method_names(&mut rng, k, &BTreeSet::new());
        let protocol = loop {
            let p = linear_expr(&mut rng, &methods);
            let states = minimal_dfa(&compile(&p), DEFAULT_STATE_LIMIT).unwrap().state_count();
            if states <= max_states {
                break p;
            }
        };
        let sigs: Vec<String> = methods.iter().map(|m| signature(&mut rng, m)).collect();
        let name = format!("Comp{i:04}");
        let iface = format!("Api{i:04}");
        let mut text = String::new();
        let mut interface_text = format!("interface {iface} {{\n");
        for s in &sigs {
            let _ = writeln!(interface_text, "  {s};");
        }
        interface_text.push_str("}\n");
        text.push_str(&interface_text);
        let required = if with_required {
            let taken: BTreeSet<String> = methods.iter().cloned().collect();
            let n = rng.gen_range(1..=3);
            let req = method_names(&mut rng, n, &taken);
            let _ = writeln!(text, "interface Req{i:04} {{");
            for r in &req {
                let _ = writeln!(text, "  {};", signature(&mut rng, r));
            }
            text.push_str("}\n");
            req
        } else {
            Vec::new()
        };
        let _ = writeln!(text, "contract Ctr{i:04} implements {iface} {{");
        text.push_str("  init { \"ready := true\" }\n");
        for s in &sigs {
            let _ = writeln!(text, "  method {s} [guard: \"ready\" design: \"skip\"];");
        }
        let _ = writeln!(text, "  protocol {{ {protocol} }}\n}}");
        let _ = write!(text, "component {name} {{ provided contract Ctr{i:04}");
        if with_required {
            let _ = write!(text, " required interface Req{i:04}");
        }
        text.push_str(" }\n");
        units.push(SourceUnit::new(format!("comp{i:04}.adl"), text));
        components.push(SyntheticComponent {
            name,
            interface: iface,
            methods,
            interface_text,
            protocol,
            required,
        });
    }
    Synthetic { units, components }
}
