//! Business and application architectures as pseudo-categories.
//!
//! Objects are interfaces (business) or components (application). Morphisms
//! are typed by a generator kind, and composition is only defined where the
//! composition table has an entry, so mixed-kind paths produce no composite.
//! An arrow `x -k-> y` reads "y stands in relation k to x": `I1 -ext-> I2`
//! means I2 extends I1.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::dsl::{ArchKind, ArchNode, Diagnostic, LinkNode, Span};
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismKind {
    Ext,
    Cmp,
    Use,
    /// Implicit on every object; never stored.
    Id,
}

impl MorphismKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismKind::Ext => "ext",
            MorphismKind::Cmp => "cmp",
            MorphismKind::Use => "use",
            MorphismKind::Id => "id",
        }
    }
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphismKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ext" => MorphismKind::Ext,
            "cmp" => MorphismKind::Cmp,
            "use" => MorphismKind::Use,
            "id" => MorphismKind::Id,
            _ => return Err(format!("unknown morphism kind `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Morphism {
    pub src: String,
    pub dst: String,
    pub kind: MorphismKind,
    /// Produced by closure rather than declared.
    pub derived: bool,
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.src, self.kind, self.dst)
    }
}

/// Partial composition of generator kinds. `Id` is neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionTable {
    entries: BTreeMap<(MorphismKind, MorphismKind), MorphismKind>,
}

impl CompositionTable {
    pub fn new(entries: impl IntoIterator<Item = ((MorphismKind, MorphismKind), MorphismKind)>) -> Self {
        CompositionTable {
            entries: entries.into_iter().collect(),
        }
    }

    /// `ext;ext -> ext`, `cmp;cmp -> cmp`.
    pub fn business() -> Self {
        use MorphismKind::*;
        Self::new([((Ext, Ext), Ext), ((Cmp, Cmp), Cmp)])
    }

    /// `use;use -> use`, `cmp;cmp -> cmp`.
    pub fn application() -> Self {
        use MorphismKind::*;
        Self::new([((Use, Use), Use), ((Cmp, Cmp), Cmp)])
    }

    /// Kind of `g ∘ f` for `f` of kind `first` followed by `g` of kind `then`.
    pub fn compose(&self, first: MorphismKind, then: MorphismKind) -> Option<MorphismKind> {
        match (first, then) {
            (MorphismKind::Id, k) | (k, MorphismKind::Id) => Some(k),
            _ => self.entries.get(&(first, then)).copied(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (MorphismKind, MorphismKind, MorphismKind)> + '_ {
        self.entries.iter().map(|(&(s, t), &u)| (s, t, u))
    }
}

type Key = (String, String, MorphismKind);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoCategory {
    pub name: String,
    pub kind: ArchKind,
    objects: BTreeSet<String>,
    /// At most one morphism per (src, dst, kind); the value is the derived flag.
    morphisms: BTreeMap<Key, bool>,
    generators: BTreeSet<MorphismKind>,
    table: CompositionTable,
}

impl PseudoCategory {
    /// An empty category with the generators and table for its kind.
    pub fn new(name: impl Into<String>, kind: ArchKind) -> Self {
        let (generators, table) = match kind {
            ArchKind::Business => (
                BTreeSet::from([MorphismKind::Ext, MorphismKind::Cmp]),
                CompositionTable::business(),
            ),
            ArchKind::Application => (
                BTreeSet::from([MorphismKind::Use, MorphismKind::Cmp]),
                CompositionTable::application(),
            ),
        };
        PseudoCategory {
            name: name.into(),
            kind,
            objects: BTreeSet::new(),
            morphisms: BTreeMap::new(),
            generators,
            table,
        }
    }

    pub fn add_object(&mut self, name: impl Into<String>) {
        self.objects.insert(name.into());
    }

    /// Adds a declared morphism. Duplicates merge; a declaration overrides a
    /// derived copy.
    pub fn add_morphism(&mut self, src: impl Into<String>, kind: MorphismKind, dst: impl Into<String>) {
        self.morphisms.insert((src.into(), dst.into(), kind), false);
    }

    pub fn remove_morphism(&mut self, src: &str, kind: MorphismKind, dst: &str) -> bool {
        self.morphisms.remove(&(src.to_string(), dst.to_string(), kind)).is_some()
    }

    pub fn objects(&self) -> &BTreeSet<String> {
        &self.objects
    }

    pub fn generators(&self) -> &BTreeSet<MorphismKind> {
        &self.generators
    }

    pub fn table(&self) -> &CompositionTable {
        &self.table
    }

    pub fn morphisms(&self) -> impl Iterator<Item = Morphism> + '_ {
        self.morphisms.iter().map(|((src, dst, kind), &derived)| Morphism {
            src: src.clone(),
            dst: dst.clone(),
            kind: *kind,
            derived,
        })
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn derived_count(&self) -> usize {
        self.morphisms.values().filter(|&&d| d).count()
    }

    /// Identities always exist.
    pub fn has_morphism(&self, src: &str, kind: MorphismKind, dst: &str) -> bool {
        (kind == MorphismKind::Id && src == dst && self.objects.contains(src))
            || self.morphisms.contains_key(&(src.to_string(), dst.to_string(), kind))
    }
}

fn diag(arch: &ArchNode, span: Span, message: String) -> Diagnostic {
    Diagnostic::error("architecture", span, format!("architecture `{}`: {message}", arch.name.name))
}

/// Builds a category from an `architecture` declaration: exactly the declared
/// objects and morphisms.
pub fn build(arch: &ArchNode, model: &Model) -> Result<PseudoCategory, Vec<Diagnostic>> {
    let mut cat = PseudoCategory::new(arch.name.name.clone(), arch.kind);
    let mut diags = Vec::new();
    for obj in &arch.objects {
        let known = match arch.kind {
            ArchKind::Business => model.interfaces.contains_key(&obj.name),
            ArchKind::Application => {
                model.components.contains_key(&obj.name) || model.publications.contains_key(&obj.name)
            }
        };
        if !known {
            let what = match arch.kind {
                ArchKind::Business => "interface",
                ArchKind::Application => "component",
            };
            diags.push(diag(arch, obj.span, format!("unknown {what} `{}`", obj.name)));
        }
        cat.add_object(obj.name.clone());
    }
    for m in &arch.morphisms {
        for end in [&m.src, &m.dst] {
            if !cat.objects.contains(&end.name) {
                diags.push(diag(arch, end.span, format!("unknown object `{}`", end.name)));
            }
        }
        match m.kind.name.parse::<MorphismKind>() {
            Ok(kind) if cat.generators.contains(&kind) => cat.add_morphism(m.src.name.clone(), kind, m.dst.name.clone()),
            Ok(kind) => diags.push(diag(
                arch,
                m.kind.span,
                format!("morphism kind `{kind}` is not allowed in a {} architecture", arch.kind.as_str()),
            )),
            Err(e) => diags.push(diag(arch, m.kind.span, e)),
        }
    }
    if diags.is_empty() {
        Ok(cat)
    } else {
        Err(diags)
    }
}

/// Least fixed point of composition: for `f: x -> y` of kind `s` and
/// `g: y -> z` of kind `t` with `s;t -> u` in the table, `x -u-> z` is added
/// as a derived morphism.
pub fn close(cat: &PseudoCategory) -> PseudoCategory {
    let mut out = cat.clone();
    let mut succ: BTreeMap<String, BTreeSet<(String, MorphismKind)>> = BTreeMap::new();
    let mut pred: BTreeMap<String, BTreeSet<(String, MorphismKind)>> = BTreeMap::new();
    for (src, dst, kind) in cat.morphisms.keys() {
        succ.entry(src.clone()).or_default().insert((dst.clone(), *kind));
        pred.entry(dst.clone()).or_default().insert((src.clone(), *kind));
    }
    let mut work: VecDeque<Key> = cat.morphisms.keys().cloned().collect();
    while let Some((x, y, s)) = work.pop_front() {
        let mut fresh = Vec::new();
        for (z, t) in succ.get(&y).into_iter().flatten() {
            if let Some(u) = cat.table.compose(s, *t) {
                fresh.push((x.clone(), z.clone(), u));
            }
        }
        for (w, r) in pred.get(&x).into_iter().flatten() {
            if let Some(u) = cat.table.compose(*r, s) {
                fresh.push((w.clone(), y.clone(), u));
            }
        }
        for key in fresh {
            if out.morphisms.contains_key(&key) {
                continue;
            }
            out.morphisms.insert(key.clone(), true);
            succ.entry(key.0.clone()).or_default().insert((key.1.clone(), key.2));
            pred.entry(key.1.clone()).or_default().insert((key.0.clone(), key.2));
            work.push_back(key);
        }
    }
    out
}

/// Well-formedness report: morphism kinds outside the generator set and
/// dangling object references are errors; composable pairs whose kinds have
/// no table entry are warnings.
pub fn check_category(cat: &PseudoCategory) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let err = |m: String| Diagnostic::error("category", Span::default(), format!("`{}`: {m}", cat.name));
    for m in cat.morphisms() {
        if !cat.generators.contains(&m.kind) {
            out.push(err(format!(
                "morphism {m} has kind `{}` outside the generators of a {} architecture",
                m.kind,
                cat.kind.as_str()
            )));
        }
        for end in [&m.src, &m.dst] {
            if !cat.objects.contains(end) {
                out.push(err(format!("morphism {m} refers to undeclared object `{end}`")));
            }
        }
    }
    for f in cat.morphisms() {
        for g in cat.morphisms().filter(|g| g.src == f.dst) {
            if cat.table.compose(f.kind, g.kind).is_none() {
                out.push(Diagnostic::warning(
                    "composition-undefined",
                    Span::default(),
                    format!("`{}`: composition undefined for {f} then {g}", cat.name),
                ));
            }
        }
    }
    out
}

/// A declared linkage between two categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorMapping {
    pub name: String,
    pub source: PseudoCategory,
    pub target: PseudoCategory,
    pub object_map: BTreeMap<String, String>,
    pub generator_map: BTreeMap<MorphismKind, MorphismKind>,
}

/// Builds a mapping from a `link` declaration and already-built categories.
pub fn build_link(
    link: &LinkNode,
    categories: &BTreeMap<String, PseudoCategory>,
) -> Result<FunctorMapping, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let err = |span: Span, m: String| Diagnostic::error("link", span, format!("link `{}`: {m}", link.name.name));
    let source = categories.get(&link.from.name);
    let target = categories.get(&link.to.name);
    for (id, cat) in [(&link.from, source), (&link.to, target)] {
        if cat.is_none() {
            diags.push(err(id.span, format!("unknown architecture `{}`", id.name)));
        }
    }
    let mut object_map = BTreeMap::new();
    for (a, b) in &link.maps {
        if object_map.insert(a.name.clone(), b.name.clone()).is_some() {
            diags.push(err(a.span, format!("object `{}` is mapped twice", a.name)));
        }
    }
    let mut generator_map = BTreeMap::new();
    for (a, b) in &link.generators {
        match (a.name.parse::<MorphismKind>(), b.name.parse::<MorphismKind>()) {
            (Ok(s), Ok(t)) => {
                if generator_map.insert(s, t).is_some() {
                    diags.push(err(a.span, format!("generator `{s}` is mapped twice")));
                }
            }
            (Err(e), _) => diags.push(err(a.span, e)),
            (_, Err(e)) => diags.push(err(b.span, e)),
        }
    }
    match (source, target) {
        (Some(source), Some(target)) if diags.is_empty() => Ok(FunctorMapping {
            name: link.name.name.clone(),
            source: source.clone(),
            target: target.clone(),
            object_map,
            generator_map,
        }),
        _ => Err(diags),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctorError {
    #[error("mapping `{name}` is not total: no image for {missing}")]
    NotTotal { name: String, missing: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A composition-table entry whose image is not preserved.
    Composition {
        first: MorphismKind,
        then: MorphismKind,
        result: MorphismKind,
        expected: MorphismKind,
        found: Option<MorphismKind>,
    },
    /// A source morphism whose image is missing in the target.
    MissingMorphism { source: Morphism, image: Morphism },
    /// An object mapped outside the target category.
    ObjectImage { object: String, image: String },
    /// A generator mapped outside the target generators.
    GeneratorImage { generator: MorphismKind, image: MorphismKind },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Composition {
                first,
                then,
                result,
                expected,
                found,
            } => {
                let found = found.map_or("undefined".to_string(), |k| k.to_string());
                write!(
                    f,
                    "table entry {first} x {then} -> {result} maps to {found}, expected {expected}"
                )
            }
            Violation::MissingMorphism { source, image } => {
                write!(f, "{source} has no image: target lacks {image}")
            }
            Violation::ObjectImage { object, image } => {
                write!(f, "object {object} maps to {image}, which is not a target object")
            }
            Violation::GeneratorImage { generator, image } => {
                write!(f, "generator {generator} maps to {image}, which is not a target generator")
            }
        }
    }
}

/// Outcome of [`check_functor`]; passes when there are no violations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctorVerdict {
    pub violations: Vec<Violation>,
}

impl FunctorVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that the mapping is a homomorphism of generators with respect to
/// both composition tables, that every source morphism has an image of the
/// mapped kind between the mapped objects, and that objects map to objects.
pub fn check_functor(f: &FunctorMapping) -> Result<FunctorVerdict, FunctorError> {
    let missing: Vec<String> = f
        .source
        .objects
        .iter()
        .filter(|o| !f.object_map.contains_key(*o))
        .map(|o| format!("object `{o}`"))
        .chain(
            f.source
                .generators
                .iter()
                .filter(|g| !f.generator_map.contains_key(*g))
                .map(|g| format!("generator `{g}`")),
        )
        .collect();
    if !missing.is_empty() {
        return Err(FunctorError::NotTotal {
            name: f.name.clone(),
            missing: missing.join(", "),
        });
    }
    let map_kind = |k: MorphismKind| match k {
        MorphismKind::Id => MorphismKind::Id,
        k => f.generator_map[&k],
    };
    let mut violations = Vec::new();
    for (&generator, &image) in &f.generator_map {
        if f.source.generators.contains(&generator) && !f.target.generators.contains(&image) {
            violations.push(Violation::GeneratorImage { generator, image });
        }
    }
    for (s, t, u) in f.source.table.entries() {
        let expected = map_kind(u);
        let found = f.target.table.compose(map_kind(s), map_kind(t));
        if found != Some(expected) {
            violations.push(Violation::Composition {
                first: s,
                then: t,
                result: u,
                expected,
                found,
            });
        }
    }
    for obj in &f.source.objects {
        let image = &f.object_map[obj];
        if !f.target.objects.contains(image) {
            violations.push(Violation::ObjectImage {
                object: obj.clone(),
                image: image.clone(),
            });
        }
    }
    for m in f.source.morphisms() {
        let (Some(fx), Some(fy)) = (f.object_map.get(&m.src), f.object_map.get(&m.dst)) else {
            continue;
        };
        let kind = map_kind(m.kind);
        if !f.target.has_morphism(fx, kind, fy) {
            violations.push(Violation::MissingMorphism {
                image: Morphism {
                    src: fx.clone(),
                    dst: fy.clone(),
                    kind,
                    derived: false,
                },
                source: m,
            });
        }
    }
    Ok(FunctorVerdict { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_unit, SourceUnit};
    use crate::model::resolve;
    use MorphismKind::*;

    fn business(edges: &[(&str, MorphismKind, &str)]) -> PseudoCategory {
        let mut c = PseudoCategory::new("BA", ArchKind::Business);
        for (s, k, d) in edges {
            c.add_object(*s);
            c.add_object(*d);
            c.add_morphism(*s, *k, *d);
        }
        c
    }

    fn keys(c: &PseudoCategory) -> Vec<String> {
        c.morphisms().map(|m| format!("{m}{}", if m.derived { " (derived)" } else { "" })).collect()
    }

    #[test]
    fn transitive_extension() {
        let ba = business(&[("I1", Ext, "I2"), ("I2", Ext, "I3")]);
        assert_eq!(ba.objects().len(), 3);
        assert_eq!(ba.morphism_count(), 2);
        let closed = close(&ba);
        assert_eq!(keys(&closed), ["I1 -ext-> I2", "I1 -ext-> I3 (derived)", "I2 -ext-> I3"]);
        assert_eq!(close(&closed), closed);
    }

    #[test]
    fn single_object_has_only_identity() {
        let mut c = PseudoCategory::new("AA", ArchKind::Application);
        c.add_object("C1");
        let closed = close(&c);
        assert_eq!(closed.morphism_count(), 0);
        assert!(closed.has_morphism("C1", Id, "C1"));
        assert!(!closed.has_morphism("C1", Use, "C1"));
    }

    #[test]
    fn mixed_kinds_do_not_compose() {
        let ba = business(&[("x", Ext, "y"), ("y", Cmp, "z")]);
        let closed = close(&ba);
        assert_eq!(closed.derived_count(), 0);
        let diags = check_category(&closed);
        assert_eq!(diags.len(), 1);
        assert!(!diags[0].is_error());
        assert!(diags[0].message.contains("composition undefined"), "{}", diags[0].message);
    }

    #[test]
    fn well_formed_closed_category_is_clean() {
        let ba = close(&business(&[("a", Ext, "b"), ("b", Ext, "c"), ("c", Ext, "d")]));
        assert!(check_category(&ba).is_empty());
    }

    #[test]
    fn dangling_and_foreign_kinds_are_errors() {
        let mut c = PseudoCategory::new("BA", ArchKind::Business);
        c.add_object("a");
        c.add_morphism("a", Ext, "ghost");
        c.add_morphism("a", Use, "a");
        let diags = check_category(&c);
        assert_eq!(diags.iter().filter(|d| d.is_error()).count(), 2);
    }

    fn arch_model(text: &str) -> (Model, ArchNode) {
        let tree = parse_unit(&SourceUnit::new("a.adl", text)).unwrap();
        let model = resolve(&[tree]).unwrap();
        let arch = model.architectures.values().next().unwrap().clone();
        (model, arch)
    }

    #[test]
    fn build_checks_kinds_and_objects() {
        let (model, arch) = arch_model(
            "interface I1 { } interface I2 { }
             architecture business B { object I1; object I2; morphism I1 -ext-> I2; }",
        );
        let cat = build(&arch, &model).unwrap();
        assert_eq!(cat.morphism_count(), 1);

        let (model, arch) = arch_model(
            "interface I1 { } interface I2 { }
             architecture business B { object I1; object I2; morphism I1 -use-> I2; }",
        );
        let diags = build(&arch, &model).unwrap_err();
        assert!(diags[0].message.contains("`use` is not allowed"), "{}", diags[0].message);

        let (model, arch) = arch_model("interface I1 { } architecture business B { object I1; morphism I1 -ext-> I9; }");
        let diags = build(&arch, &model).unwrap_err();
        assert!(diags[0].message.contains("unknown object `I9`"));
    }

    fn functor(source: PseudoCategory, target: PseudoCategory, objects: &[(&str, &str)]) -> FunctorMapping {
        FunctorMapping {
            name: "F".into(),
            object_map: objects.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            generator_map: [(Ext, Use), (Cmp, Cmp)].into(),
            source,
            target,
        }
    }

    fn application(edges: &[(&str, MorphismKind, &str)]) -> PseudoCategory {
        let mut c = PseudoCategory::new("AA", ArchKind::Application);
        for (s, k, d) in edges {
            c.add_object(*s);
            c.add_object(*d);
            c.add_morphism(*s, *k, *d);
        }
        c
    }

    #[test]
    fn functor_passes_and_fails() {
        let ba = close(&business(&[("I1", Ext, "I2")]));
        let aa = close(&application(&[("C1", Use, "C2")]));
        let f = functor(ba.clone(), aa, &[("I1", "C1"), ("I2", "C2")]);
        assert!(check_functor(&f).unwrap().passed());

        let mut broken = application(&[]);
        broken.add_object("C1");
        broken.add_object("C2");
        let f = functor(ba, broken, &[("I1", "C1"), ("I2", "C2")]);
        let verdict = check_functor(&f).unwrap();
        assert_eq!(verdict.violations.len(), 1);
        assert_eq!(
            verdict.violations[0].to_string(),
            "I1 -ext-> I2 has no image: target lacks C1 -use-> C2"
        );
    }

    #[test]
    fn identity_functor_passes() {
        let aa = close(&application(&[("C1", Use, "C2"), ("C2", Cmp, "C3")]));
        let f = FunctorMapping {
            name: "Id".into(),
            object_map: aa.objects().iter().map(|o| (o.clone(), o.clone())).collect(),
            generator_map: [(Use, Use), (Cmp, Cmp)].into(),
            source: aa.clone(),
            target: aa,
        };
        assert!(check_functor(&f).unwrap().passed());
    }

    #[test]
    fn partial_mappings_are_rejected() {
        let ba = business(&[("I1", Ext, "I2")]);
        let f = functor(ba, application(&[("C1", Use, "C2")]), &[("I1", "C1")]);
        assert!(matches!(check_functor(&f), Err(FunctorError::NotTotal { .. })));
    }

    #[test]
    fn generator_map_must_be_a_homomorphism() {
        let ba = business(&[]);
        let mut f = functor(ba, application(&[]), &[]);
        f.generator_map = [(Ext, Use), (Cmp, Use)].into();
        let verdict = check_functor(&f).unwrap();
        assert!(verdict.passed(), "{:?}", verdict.violations);
        f.generator_map = [(Ext, Use), (Cmp, Ext)].into();
        let verdict = check_functor(&f).unwrap();
        assert_eq!(verdict.violations.len(), 2);
    }
}
