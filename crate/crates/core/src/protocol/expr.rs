use std::collections::BTreeSet;
use std::fmt;

/// A behavior protocol: a regular expression over method-call events.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolExpr {
    /// The empty word.
    Eps,
    /// A call event `?m`.
    Ev(String),
    Seq(Box<ProtocolExpr>, Box<ProtocolExpr>),
    Alt(Box<ProtocolExpr>, Box<ProtocolExpr>),
    /// Zero or more repetitions.
    Star(Box<ProtocolExpr>),
    /// Interleaving (shuffle product) of the two operand languages.
    Shuffle(Box<ProtocolExpr>, Box<ProtocolExpr>),
}

impl ProtocolExpr {
    pub fn ev(name: impl Into<String>) -> Self {
        ProtocolExpr::Ev(name.into())
    }

    pub fn seq(a: ProtocolExpr, b: ProtocolExpr) -> Self {
        ProtocolExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn alt(a: ProtocolExpr, b: ProtocolExpr) -> Self {
        ProtocolExpr::Alt(Box::new(a), Box::new(b))
    }

    pub fn star(a: ProtocolExpr) -> Self {
        ProtocolExpr::Star(Box::new(a))
    }

    pub fn shuffle(a: ProtocolExpr, b: ProtocolExpr) -> Self {
        ProtocolExpr::Shuffle(Box::new(a), Box::new(b))
    }

    /// Right-nested alternative of the given expressions; `None` when empty.
    pub fn alt_all(items: impl IntoIterator<Item = ProtocolExpr>) -> Option<Self> {
        let mut items: Vec<_> = items.into_iter().collect();
        let mut acc = items.pop()?;
        while let Some(prev) = items.pop() {
            acc = ProtocolExpr::alt(prev, acc);
        }
        Some(acc)
    }

    /// `(?m1 + ?m2 + ...)*`: any call order over the given methods.
    pub fn universal<'a>(methods: impl IntoIterator<Item = &'a str>) -> Self {
        match Self::alt_all(methods.into_iter().map(ProtocolExpr::ev)) {
            Some(body) => ProtocolExpr::star(body),
            None => ProtocolExpr::Eps,
        }
    }

    /// Every event name mentioned by the expression.
    pub fn events(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_events(&mut out);
        out
    }

    fn collect_events(&self, out: &mut BTreeSet<String>) {
        match self {
            ProtocolExpr::Eps => {}
            ProtocolExpr::Ev(m) => {
                out.insert(m.clone());
            }
            ProtocolExpr::Star(e) => e.collect_events(out),
            ProtocolExpr::Seq(a, b) | ProtocolExpr::Alt(a, b) | ProtocolExpr::Shuffle(a, b) => {
                a.collect_events(out);
                b.collect_events(out);
            }
        }
    }

    /// Rewrites every event through `f`.
    pub fn rename(&self, f: &impl Fn(&str) -> String) -> ProtocolExpr {
        match self {
            ProtocolExpr::Eps => ProtocolExpr::Eps,
            ProtocolExpr::Ev(m) => ProtocolExpr::Ev(f(m)),
            ProtocolExpr::Star(e) => ProtocolExpr::star(e.rename(f)),
            ProtocolExpr::Seq(a, b) => ProtocolExpr::seq(a.rename(f), b.rename(f)),
            ProtocolExpr::Alt(a, b) => ProtocolExpr::alt(a.rename(f), b.rename(f)),
            ProtocolExpr::Shuffle(a, b) => ProtocolExpr::shuffle(a.rename(f), b.rename(f)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProtocolExpr::Eps | ProtocolExpr::Ev(_) => 0,
            ProtocolExpr::Star(e) => 1 + e.depth(),
            ProtocolExpr::Seq(a, b) | ProtocolExpr::Alt(a, b) | ProtocolExpr::Shuffle(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ProtocolExpr::Shuffle(..) => 0,
            ProtocolExpr::Alt(..) => 1,
            ProtocolExpr::Seq(..) => 2,
            ProtocolExpr::Star(_) => 3,
            ProtocolExpr::Eps | ProtocolExpr::Ev(_) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            ProtocolExpr::Eps => f.write_str("()"),
            ProtocolExpr::Ev(m) => write!(f, "?{m}"),
            ProtocolExpr::Star(e) => {
                e.write_at(f, 3)?;
                f.write_str("*")
            }
            // Binary operators associate to the right.
            ProtocolExpr::Seq(a, b) => {
                a.write_at(f, 3)?;
                f.write_str(" ")?;
                b.write_at(f, 2)
            }
            ProtocolExpr::Alt(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" + ")?;
                b.write_at(f, 1)
            }
            ProtocolExpr::Shuffle(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" | ")?;
                b.write_at(f, 0)
            }
        }
    }
}

/// Canonical concrete syntax; parses back to the same tree.
impl fmt::Display for ProtocolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_respects_associativity() {
        let right = ProtocolExpr::seq(
            ProtocolExpr::ev("a"),
            ProtocolExpr::seq(ProtocolExpr::ev("b"), ProtocolExpr::ev("c")),
        );
        assert_eq!(right.to_string(), "?a ?b ?c");
        let left = ProtocolExpr::seq(
            ProtocolExpr::seq(ProtocolExpr::ev("a"), ProtocolExpr::ev("b")),
            ProtocolExpr::ev("c"),
        );
        assert_eq!(left.to_string(), "(?a ?b) ?c");
        let star = ProtocolExpr::star(ProtocolExpr::alt(ProtocolExpr::ev("a"), ProtocolExpr::Eps));
        assert_eq!(star.to_string(), "(?a + ())*");
    }

    #[test]
    fn universal_over_nothing_is_eps() {
        assert_eq!(ProtocolExpr::universal([]), ProtocolExpr::Eps);
        assert_eq!(ProtocolExpr::universal(["a", "b"]).to_string(), "(?a + ?b)*");
    }
}
