//! The CCS term language: labels, actions, relabelling functions, process
//! terms, and the constant environment that gives constants their meaning.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Keywords of the concrete syntax that cannot be used as label names.
pub(crate) const RESERVED: &[&str] = &["tau", "new", "agent", "alphabet"];

fn is_ident_tail(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// A symbol of the visible alphabet. Always starts with a lowercase letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LabelId(Arc<str>);

impl LabelId {
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
            && chars.all(is_ident_tail)
            && !RESERVED.contains(&name);
        if ok {
            Ok(LabelId(name.into()))
        } else {
            Err(Error::InvalidIdentifier(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for LabelId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        LabelId::new(&s)
    }
}

impl From<LabelId> for String {
    fn from(l: LabelId) -> String {
        l.0.to_string()
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a process constant. Always starts with an uppercase letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConstName(Arc<str>);

impl ConstName {
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(is_ident_tail);
        if ok {
            Ok(ConstName(name.into()))
        } else {
            Err(Error::InvalidIdentifier(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConstName {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        ConstName::new(&s)
    }
}

impl From<ConstName> for String {
    fn from(c: ConstName) -> String {
        c.0.to_string()
    }
}

impl fmt::Display for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ConstName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Name,
    CoName,
}

/// A visible label: a name `a` or its co-name `'a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub polarity: Polarity,
    pub base: LabelId,
}

impl Label {
    pub fn name(base: LabelId) -> Self {
        Label { polarity: Polarity::Name, base }
    }

    pub fn coname(base: LabelId) -> Self {
        Label { polarity: Polarity::CoName, base }
    }

    /// Swaps polarity, keeping the base name.
    pub fn complement(&self) -> Label {
        let polarity = match self.polarity {
            Polarity::Name => Polarity::CoName,
            Polarity::CoName => Polarity::Name,
        };
        Label { polarity, base: self.base.clone() }
    }
}

pub fn complement(l: &Label) -> Label {
    l.complement()
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Name => write!(f, "{}", self.base),
            Polarity::CoName => write!(f, "'{}", self.base),
        }
    }
}

/// Either the internal action τ or a visible label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ActionRepr", into = "ActionRepr")]
pub enum Action {
    Tau,
    Visible(Label),
}

impl Action {
    pub fn name(base: LabelId) -> Self {
        Action::Visible(Label::name(base))
    }

    pub fn coname(base: LabelId) -> Self {
        Action::Visible(Label::coname(base))
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    pub fn label(&self) -> Option<&Label> {
        match self {
            Action::Tau => None,
            Action::Visible(l) => Some(l),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Visible(l) => l.fmt(f),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ActionRepr {
    Tau { tau: bool },
    Visible { name: LabelId, co: bool },
}

impl TryFrom<ActionRepr> for Action {
    type Error = String;
    fn try_from(r: ActionRepr) -> Result<Self, String> {
        match r {
            ActionRepr::Tau { tau: true } => Ok(Action::Tau),
            ActionRepr::Tau { tau: false } => Err("`tau` must be true".into()),
            ActionRepr::Visible { name, co: false } => Ok(Action::name(name)),
            ActionRepr::Visible { name, co: true } => Ok(Action::coname(name)),
        }
    }
}

impl From<Action> for ActionRepr {
    fn from(a: Action) -> Self {
        match a {
            Action::Tau => ActionRepr::Tau { tau: true },
            Action::Visible(l) => ActionRepr::Visible {
                name: l.base,
                co: l.polarity == Polarity::CoName,
            },
        }
    }
}

/// A finite renaming of base names, extended to labels by keeping polarity
/// and to τ as the identity. Names outside the map are left unchanged.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Relabeling(BTreeMap<LabelId, LabelId>);

impl Relabeling {
    pub fn new(map: BTreeMap<LabelId, LabelId>) -> Self {
        Relabeling(map)
    }

    pub fn single(from: LabelId, to: LabelId) -> Self {
        Relabeling(BTreeMap::from([(from, to)]))
    }

    pub fn map(&self) -> &BTreeMap<LabelId, LabelId> {
        &self.0
    }

    pub fn rename(&self, base: &LabelId) -> LabelId {
        self.0.get(base).unwrap_or(base).clone()
    }

    pub fn apply_label(&self, l: &Label) -> Label {
        Label { polarity: l.polarity, base: self.rename(&l.base) }
    }

    pub fn apply(&self, u: &Action) -> Action {
        match u {
            Action::Tau => Action::Tau,
            Action::Visible(l) => Action::Visible(self.apply_label(l)),
        }
    }
}

impl FromIterator<(LabelId, LabelId)> for Relabeling {
    fn from_iter<I: IntoIterator<Item = (LabelId, LabelId)>>(iter: I) -> Self {
        Relabeling(iter.into_iter().collect())
    }
}

pub fn apply_relabeling(rf: &Relabeling, u: &Action) -> Action {
    rf.apply(u)
}

/// A CCS process expression. Subterms are reference counted so cloning a
/// term, and building large shared terms such as Klop processes, is cheap.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProcessTerm {
    Nil,
    Prefix {
        action: Action,
        body: Arc<ProcessTerm>,
    },
    Sum {
        left: Arc<ProcessTerm>,
        right: Arc<ProcessTerm>,
    },
    Par {
        left: Arc<ProcessTerm>,
        right: Arc<ProcessTerm>,
    },
    /// Hides both polarities of every listed base name.
    Restr {
        hidden: BTreeSet<LabelId>,
        body: Arc<ProcessTerm>,
    },
    Relab {
        body: Arc<ProcessTerm>,
        map: Relabeling,
    },
    Const {
        name: ConstName,
    },
}

impl ProcessTerm {
    pub fn nil() -> Self {
        ProcessTerm::Nil
    }

    pub fn prefix(action: Action, body: ProcessTerm) -> Self {
        ProcessTerm::Prefix { action, body: Arc::new(body) }
    }

    pub fn sum(left: ProcessTerm, right: ProcessTerm) -> Self {
        ProcessTerm::Sum { left: Arc::new(left), right: Arc::new(right) }
    }

    pub fn par(left: ProcessTerm, right: ProcessTerm) -> Self {
        ProcessTerm::Par { left: Arc::new(left), right: Arc::new(right) }
    }

    pub fn restr(hidden: impl IntoIterator<Item = LabelId>, body: ProcessTerm) -> Self {
        ProcessTerm::Restr { hidden: hidden.into_iter().collect(), body: Arc::new(body) }
    }

    pub fn relab(body: ProcessTerm, map: Relabeling) -> Self {
        ProcessTerm::Relab { body: Arc::new(body), map }
    }

    pub fn constant(name: ConstName) -> Self {
        ProcessTerm::Const { name }
    }

    pub fn tau(body: ProcessTerm) -> Self {
        ProcessTerm::prefix(Action::Tau, body)
    }

    /// Number of syntax nodes, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        match self {
            ProcessTerm::Nil | ProcessTerm::Const { .. } => 1,
            ProcessTerm::Prefix { body, .. }
            | ProcessTerm::Restr { body, .. }
            | ProcessTerm::Relab { body, .. } => 1 + body.size(),
            ProcessTerm::Sum { left, right } | ProcessTerm::Par { left, right } => {
                1 + left.size() + right.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProcessTerm::Nil | ProcessTerm::Const { .. } => 0,
            ProcessTerm::Prefix { body, .. }
            | ProcessTerm::Restr { body, .. }
            | ProcessTerm::Relab { body, .. } => 1 + body.depth(),
            ProcessTerm::Sum { left, right } | ProcessTerm::Par { left, right } => {
                1 + left.depth().max(right.depth())
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("process terms always serialize")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    /// Visits every base name occurring anywhere in the term's own syntax
    /// (prefixes, restriction sets, relabelling maps), without unfolding
    /// constants.
    fn visit_mentioned(&self, out: &mut impl FnMut(&LabelId), consts: &mut impl FnMut(&ConstName)) {
        match self {
            ProcessTerm::Nil => {}
            ProcessTerm::Const { name } => consts(name),
            ProcessTerm::Prefix { action, body } => {
                if let Some(l) = action.label() {
                    out(&l.base);
                }
                body.visit_mentioned(out, consts);
            }
            ProcessTerm::Sum { left, right } | ProcessTerm::Par { left, right } => {
                left.visit_mentioned(out, consts);
                right.visit_mentioned(out, consts);
            }
            ProcessTerm::Restr { hidden, body } => {
                hidden.iter().for_each(&mut *out);
                body.visit_mentioned(out, consts);
            }
            ProcessTerm::Relab { body, map } => {
                body.visit_mentioned(out, consts);
                for (from, to) in map.map() {
                    out(from);
                    out(to);
                }
            }
        }
    }

    /// Every base name mentioned by the term, in order of first appearance.
    pub fn mentioned_labels(&self) -> Vec<LabelId> {
        let mut seen = IndexSet::new();
        self.visit_mentioned(&mut |l| {
            seen.insert(l.clone());
        }, &mut |_| {});
        seen.into_iter().collect()
    }

    pub fn constants(&self) -> BTreeSet<ConstName> {
        let mut out = BTreeSet::new();
        self.visit_mentioned(&mut |_| {}, &mut |c| {
            out.insert(c.clone());
        });
        out
    }
}

/// Defining equations for constants plus the declared visible alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    alphabet: IndexSet<LabelId>,
    defs: IndexMap<ConstName, ProcessTerm>,
}

impl Environment {
    /// Builds a closed environment. Fails if a definition references an
    /// undefined constant or mentions a label missing from the alphabet.
    pub fn new(
        alphabet: impl IntoIterator<Item = LabelId>,
        defs: impl IntoIterator<Item = (ConstName, ProcessTerm)>,
    ) -> Result<Self> {
        let alphabet: IndexSet<LabelId> = alphabet.into_iter().collect();
        let mut map = IndexMap::new();
        for (name, body) in defs {
            if map.contains_key(&name) {
                return Err(Error::DuplicateConstant(name.to_string()));
            }
            map.insert(name, body);
        }
        let env = Environment { alphabet, defs: map };
        for body in env.defs.values() {
            env.check_term(body)?;
        }
        Ok(env)
    }

    /// An environment without constants whose alphabet is exactly the
    /// labels mentioned by `terms`, in order of first appearance.
    pub fn for_terms<'a>(terms: impl IntoIterator<Item = &'a ProcessTerm>) -> Self {
        Environment::default().extended_for(terms)
    }

    /// Returns a copy whose alphabet additionally contains every label
    /// mentioned by `terms`.
    pub fn extended_for<'a>(&self, terms: impl IntoIterator<Item = &'a ProcessTerm>) -> Self {
        let mut env = self.clone();
        for t in terms {
            env.alphabet.extend(t.mentioned_labels());
        }
        env
    }

    pub fn alphabet(&self) -> impl ExactSizeIterator<Item = &LabelId> {
        self.alphabet.iter()
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }

    /// Number of distinct actions over the alphabet: both polarities of
    /// every label plus τ.
    pub fn action_count(&self) -> usize {
        2 * self.alphabet.len() + 1
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&ConstName, &ProcessTerm)> {
        self.defs.iter()
    }

    pub fn lookup(&self, name: &ConstName) -> Result<&ProcessTerm> {
        self.defs.get(name).ok_or_else(|| Error::UnboundConstant(name.to_string()))
    }

    /// Checks that `p` only references defined constants and declared labels.
    pub fn check_term(&self, p: &ProcessTerm) -> Result<()> {
        let mut label = None;
        let mut constant = None;
        p.visit_mentioned(
            &mut |l| {
                if label.is_none() && !self.alphabet.contains(l) {
                    label = Some(Error::LabelNotInAlphabet(l.to_string()));
                }
            },
            &mut |c| {
                if constant.is_none() && !self.defs.contains_key(c) {
                    constant = Some(Error::UnboundConstant(c.to_string()));
                }
            },
        );
        constant.or(label).map_or(Ok(()), Err)
    }
}

/// Base names occurring in a prefix of `p` or of any definition reachable
/// from `p`. Restriction does not remove names from this set.
pub fn free_labels(env: &Environment, p: &ProcessTerm) -> Result<BTreeSet<LabelId>> {
    fn walk(
        env: &Environment,
        p: &ProcessTerm,
        out: &mut BTreeSet<LabelId>,
        visited: &mut HashSet<ConstName>,
    ) -> Result<()> {
        match p {
            ProcessTerm::Nil => Ok(()),
            ProcessTerm::Prefix { action, body } => {
                if let Some(l) = action.label() {
                    out.insert(l.base.clone());
                }
                walk(env, body, out, visited)
            }
            ProcessTerm::Sum { left, right } | ProcessTerm::Par { left, right } => {
                walk(env, left, out, visited)?;
                walk(env, right, out, visited)
            }
            ProcessTerm::Restr { body, .. } | ProcessTerm::Relab { body, .. } => {
                walk(env, body, out, visited)
            }
            ProcessTerm::Const { name } => {
                let def = env.lookup(name)?;
                if visited.insert(name.clone()) {
                    walk(env, def, out, visited)?;
                }
                Ok(())
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(env, p, &mut out, &mut HashSet::new())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> LabelId {
        LabelId::new(s).unwrap()
    }

    #[test]
    fn complement_flips_polarity() {
        assert_eq!(complement(&Label::name(l("a"))), Label::coname(l("a")));
        assert_eq!(complement(&Label::coname(l("a"))), Label::name(l("a")));
        let b = Label::name(l("b"));
        assert_eq!(complement(&complement(&b)), b);
    }

    #[test]
    fn relabeling_examples() {
        let rf = Relabeling::single(l("a"), l("b"));
        assert_eq!(apply_relabeling(&rf, &Action::Tau), Action::Tau);
        assert_eq!(apply_relabeling(&rf, &Action::name(l("a"))), Action::name(l("b")));
        assert_eq!(apply_relabeling(&rf, &Action::coname(l("a"))), Action::coname(l("b")));
        assert_eq!(apply_relabeling(&rf, &Action::name(l("c"))), Action::name(l("c")));
    }

    #[test]
    fn relabeling_commutes_with_complement_exhaustively() {
        let names = ["a", "b", "c"];
        let rf: Relabeling = [(l("a"), l("b")), (l("b"), l("b"))].into_iter().collect();
        for n in names {
            for lab in [Label::name(l(n)), Label::coname(l(n))] {
                assert_eq!(rf.apply_label(&lab.complement()), rf.apply_label(&lab).complement());
            }
        }
    }

    #[test]
    fn identifiers_are_validated() {
        assert!(LabelId::new("a1_x").is_ok());
        assert!(LabelId::new("").is_err());
        assert!(LabelId::new("A").is_err());
        assert!(LabelId::new("tau").is_err());
        assert!(ConstName::new("Buf_2").is_ok());
        assert!(ConstName::new("buf").is_err());
    }

    #[test]
    fn free_labels_examples() {
        let env = Environment::default();
        let a0 = ProcessTerm::prefix(Action::name(l("a")), ProcessTerm::Nil);
        assert_eq!(free_labels(&env, &a0).unwrap(), BTreeSet::from([l("a")]));

        let sum = ProcessTerm::sum(a0.clone(), ProcessTerm::prefix(Action::coname(l("b")), ProcessTerm::Nil));
        assert_eq!(free_labels(&env, &sum).unwrap(), BTreeSet::from([l("a"), l("b")]));

        let hidden = ProcessTerm::restr([l("a")], a0);
        assert_eq!(free_labels(&env, &hidden).unwrap(), BTreeSet::from([l("a")]));
    }

    #[test]
    fn free_labels_follows_recursive_constants() {
        let a = ConstName::new("A").unwrap();
        let b = ConstName::new("B").unwrap();
        let env = Environment::new(
            [l("a"), l("b")],
            [
                (a.clone(), ProcessTerm::prefix(Action::name(l("a")), ProcessTerm::constant(b.clone()))),
                (b.clone(), ProcessTerm::prefix(Action::name(l("b")), ProcessTerm::constant(a.clone()))),
            ],
        )
        .unwrap();
        assert_eq!(free_labels(&env, &ProcessTerm::constant(a)).unwrap(), BTreeSet::from([l("a"), l("b")]));

        let missing = ProcessTerm::constant(ConstName::new("C").unwrap());
        assert!(matches!(free_labels(&env, &missing), Err(Error::UnboundConstant(_))));
    }

    #[test]
    fn environment_rejects_open_definitions() {
        let a = ConstName::new("A").unwrap();
        let body = ProcessTerm::constant(ConstName::new("B").unwrap());
        assert!(matches!(Environment::new([], [(a.clone(), body)]), Err(Error::UnboundConstant(_))));

        let body = ProcessTerm::prefix(Action::name(l("z")), ProcessTerm::Nil);
        assert!(matches!(Environment::new([l("a")], [(a, body)]), Err(Error::LabelNotInAlphabet(_))));
    }

    #[test]
    fn action_count_doubles_alphabet_plus_tau() {
        let env = Environment::new([l("a"), l("b"), l("c")], []).unwrap();
        assert_eq!(env.action_count(), 7);
    }

    #[test]
    fn json_shape_is_canonical() {
        let t = ProcessTerm::prefix(Action::Tau, ProcessTerm::prefix(Action::coname(l("a")), ProcessTerm::Nil));
        let js = t.to_json();
        assert_eq!(
            js,
            r#"{"kind":"prefix","action":{"tau":true},"body":{"kind":"prefix","action":{"name":"a","co":true},"body":{"kind":"nil"}}}"#
        );
        assert_eq!(ProcessTerm::from_json(&js).unwrap(), t);

        let r = ProcessTerm::relab(
            ProcessTerm::restr([l("b"), l("a")], ProcessTerm::constant(ConstName::new("P").unwrap())),
            Relabeling::single(l("a"), l("c")),
        );
        let js = r.to_json();
        assert_eq!(
            js,
            r#"{"kind":"relab","body":{"kind":"restr","hidden":["a","b"],"body":{"kind":"const","name":"P"}},"map":{"a":"c"}}"#
        );
        assert_eq!(ProcessTerm::from_json(&js).unwrap().to_json(), js);
    }

    #[test]
    fn json_rejects_bad_actions() {
        assert!(ProcessTerm::from_json(r#"{"kind":"prefix","action":{"tau":false},"body":{"kind":"nil"}}"#).is_err());
        assert!(ProcessTerm::from_json(r#"{"kind":"prefix","action":{"name":"A","co":false},"body":{"kind":"nil"}}"#).is_err());
    }
}
