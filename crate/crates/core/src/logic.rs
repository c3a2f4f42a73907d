//! Propositional events, worlds and truth-table machinery.

use std::fmt;

use crate::error::Error;

/// Default maximum number of atoms; keeps the world space at most 2^16.
pub const DEFAULT_ATOM_CAP: usize = 16;

const RESERVED: &[&str] = &["v", "true", "false"];

/// Returns true if `name` is a legal atom name.
pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    let first_ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_');
    first_ok
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !RESERVED.contains(&name)
}

/// Declared atoms, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AtomTable {
    names: Vec<String>,
}

impl AtomTable {
    pub fn new<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = AtomTable::default();
        for name in names {
            table.push(name.into())?;
        }
        Ok(table)
    }

    /// Appends an atom and returns its index.
    pub fn push(&mut self, name: String) -> Result<usize, Error> {
        if !is_valid_atom_name(&name) {
            return Err(Error::InvalidAtomName(name));
        }
        if self.names.contains(&name) {
            return Err(Error::DuplicateAtom(name));
        }
        self.names.push(name);
        Ok(self.names.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// A name not yet in the table, derived from `stem`.
    pub fn fresh_name(&self, stem: &str) -> String {
        if self.index_of(stem).is_none() && is_valid_atom_name(stem) {
            return stem.to_string();
        }
        (0..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| self.index_of(n).is_none())
            .expect("unbounded name supply")
    }
}

/// Propositional event over atom indices. `Or` and implication are sugar
/// built from `Not` and `And`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Bottom,
    Top,
    Atom(usize),
    Not(Box<Event>),
    And(Box<Event>, Box<Event>),
}

impl Event {
    pub fn atom(index: usize) -> Event {
        Event::Atom(index)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Event) -> Event {
        Event::Not(Box::new(e))
    }

    pub fn and(a: Event, b: Event) -> Event {
        Event::And(Box::new(a), Box::new(b))
    }

    /// `a v b`, desugared to `!(!a & !b)`.
    pub fn or(a: Event, b: Event) -> Event {
        Event::not(Event::and(Event::not(a), Event::not(b)))
    }

    /// Material implication `a -> b`, desugared to `!(a & !b)`.
    pub fn implies(a: Event, b: Event) -> Event {
        Event::not(Event::and(a, Event::not(b)))
    }

    /// `atom` or its negation.
    pub fn literal(atom: usize, positive: bool) -> Event {
        if positive {
            Event::Atom(atom)
        } else {
            Event::not(Event::Atom(atom))
        }
    }

    /// Left-nested conjunction; the empty conjunction is `Top`.
    pub fn conj<I: IntoIterator<Item = Event>>(items: I) -> Event {
        items
            .into_iter()
            .reduce(Event::and)
            .unwrap_or(Event::Top)
    }

    /// Highest atom index used, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            Event::Bottom | Event::Top => None,
            Event::Atom(i) => Some(*i),
            Event::Not(e) => e.max_atom(),
            Event::And(a, b) => a.max_atom().max(b.max_atom()),
        }
    }

    pub fn collect_atoms(&self, out: &mut Vec<usize>) {
        match self {
            Event::Bottom | Event::Top => {}
            Event::Atom(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            Event::Not(e) => e.collect_atoms(out),
            Event::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Checks every atom index against a table of `num_atoms` atoms.
    pub fn check(&self, num_atoms: usize) -> Result<(), Error> {
        match self.max_atom() {
            Some(i) if i >= num_atoms => Err(Error::AtomIndex { index: i, num_atoms }),
            _ => Ok(()),
        }
    }

    /// Renders in the textual event grammar. `Or` sugar is re-sugared where
    /// the shape is recognisable, so parse(display(e)) == e.
    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> EventDisplay<'a> {
        EventDisplay { event: self, atoms }
    }
}

pub struct EventDisplay<'a> {
    event: &'a Event,
    atoms: &'a AtomTable,
}

// Precedence levels: 0 = or, 1 = and, 2 = unary/atomic.
fn write_event(f: &mut fmt::Formatter<'_>, e: &Event, atoms: &AtomTable, ctx: u8) -> fmt::Result {
    if let Event::Not(inner) = e {
        if let Event::And(a, b) = inner.as_ref() {
            if let (Event::Not(x), Event::Not(y)) = (a.as_ref(), b.as_ref()) {
                if ctx > 0 {
                    write!(f, "(")?;
                }
                write_event(f, x, atoms, 0)?;
                write!(f, " v ")?;
                // Right operand of `v` binds tighter so left nesting round-trips.
                write_event(f, y, atoms, 1)?;
                if ctx > 0 {
                    write!(f, ")")?;
                }
                return Ok(());
            }
        }
    }
    match e {
        Event::Bottom => write!(f, "false"),
        Event::Top => write!(f, "true"),
        Event::Atom(i) => match atoms.name(*i) {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "#{i}"),
        },
        Event::Not(inner) => {
            write!(f, "!")?;
            write_event(f, inner, atoms, 2)
        }
        Event::And(a, b) => {
            if ctx > 1 {
                write!(f, "(")?;
            }
            write_event(f, a, atoms, 1)?;
            write!(f, " & ")?;
            write_event(f, b, atoms, 2)?;
            if ctx > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for EventDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_event(f, self.event, self.atoms, 0)
    }
}

/// The conditional event `consequent | antecedent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionalEvent {
    pub consequent: Event,
    pub antecedent: Event,
}

impl ConditionalEvent {
    pub fn new(consequent: Event, antecedent: Event) -> Self {
        ConditionalEvent { consequent, antecedent }
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            write!(
                f,
                "({} | {})",
                self.consequent.display(atoms),
                self.antecedent.display(atoms)
            )
        })
    }
}

pub(crate) struct DisplayWith<F>(pub F);

impl<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result> fmt::Display for DisplayWith<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (self.0)(f)
    }
}

/// Three-valued truth of a conditional event in a world.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Indeterminate,
}

/// A truth assignment; bit `i` of `index` is the truth of atom `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    index: usize,
    num_atoms: usize,
}

impl World {
    pub fn new(index: usize, num_atoms: usize) -> Self {
        debug_assert!(num_atoms >= usize::BITS as usize || index < (1usize << num_atoms));
        World { index, num_atoms }
    }

    pub fn from_assignment(bits: &[bool]) -> Self {
        let index = bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .fold(0usize, |acc, (i, _)| acc | (1 << i));
        World { index, num_atoms: bits.len() }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn truth(&self, atom: usize) -> bool {
        (self.index >> atom) & 1 == 1
    }

    pub fn assignment(&self) -> Vec<bool> {
        (0..self.num_atoms).map(|i| self.truth(i)).collect()
    }

    /// Space-separated literal list, e.g. `bird !penguin fly`.
    pub fn describe(&self, atoms: &AtomTable) -> String {
        (0..self.num_atoms)
            .map(|i| {
                let name = atoms.name(i).unwrap_or("?");
                if self.truth(i) {
                    name.to_string()
                } else {
                    format!("!{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn eval_event(w: &World, e: &Event) -> Result<bool, Error> {
    e.check(w.num_atoms)?;
    Ok(eval_unchecked(w, e))
}

fn eval_unchecked(w: &World, e: &Event) -> bool {
    match e {
        Event::Bottom => false,
        Event::Top => true,
        Event::Atom(i) => w.truth(*i),
        Event::Not(inner) => !eval_unchecked(w, inner),
        Event::And(a, b) => eval_unchecked(w, a) && eval_unchecked(w, b),
    }
}

pub fn eval_conditional(w: &World, c: &ConditionalEvent) -> Result<Truth, Error> {
    if !eval_event(w, &c.antecedent)? {
        return Ok(Truth::Indeterminate);
    }
    Ok(if eval_event(w, &c.consequent)? {
        Truth::True
    } else {
        Truth::False
    })
}

/// A set of worlds as a bitset over world indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldSet {
    len: usize,
    words: Vec<u64>,
}

impl WorldSet {
    pub fn empty(len: usize) -> Self {
        WorldSet { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = WorldSet { len, words: vec![u64::MAX; len.div_ceil(64)] };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the universe this set lives in.
    pub fn universe(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn minus(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn complement(&self) -> WorldSet {
        let mut s = WorldSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// All worlds over an atom table, in increasing index order.
#[derive(Debug, Clone)]
pub struct WorldSpace {
    num_atoms: usize,
    worlds: Vec<World>,
    atom_masks: Vec<WorldSet>,
}

pub fn enumerate_worlds(table: &AtomTable) -> Result<WorldSpace, Error> {
    enumerate_worlds_with_cap(table, DEFAULT_ATOM_CAP)
}

pub fn enumerate_worlds_with_cap(table: &AtomTable, cap: usize) -> Result<WorldSpace, Error> {
    WorldSpace::with_cap(table.len(), cap)
}

impl WorldSpace {
    pub fn with_cap(num_atoms: usize, cap: usize) -> Result<Self, Error> {
        if num_atoms > cap {
            return Err(Error::ResourceLimit {
                what: "atom count",
                cap,
                actual: num_atoms,
            });
        }
        let n = 1usize << num_atoms;
        let worlds: Vec<World> = (0..n).map(|i| World::new(i, num_atoms)).collect();
        let atom_masks = (0..num_atoms)
            .map(|a| {
                let mut s = WorldSet::empty(n);
                for w in &worlds {
                    if w.truth(a) {
                        s.insert(w.index());
                    }
                }
                s
            })
            .collect();
        Ok(WorldSpace { num_atoms, worlds, atom_masks })
    }

    pub fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world(&self, index: usize) -> World {
        self.worlds[index]
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.len())
    }

    /// The set of worlds satisfying `e`.
    pub fn mask(&self, e: &Event) -> Result<WorldSet, Error> {
        e.check(self.num_atoms)?;
        Ok(self.mask_unchecked(e))
    }

    fn mask_unchecked(&self, e: &Event) -> WorldSet {
        match e {
            Event::Bottom => WorldSet::empty(self.len()),
            Event::Top => self.all(),
            Event::Atom(i) => self.atom_masks[*i].clone(),
            Event::Not(inner) => self.mask_unchecked(inner).complement(),
            Event::And(a, b) => self.mask_unchecked(a).and(&self.mask_unchecked(b)),
        }
    }
}

/// True iff `a` and `b` agree on every world over `table`.
pub fn equivalent(table: &AtomTable, a: &Event, b: &Event) -> Result<bool, Error> {
    let space = WorldSpace::with_cap(table.len(), usize::BITS as usize - 1)?;
    equivalent_in(&space, a, b)
}

pub fn equivalent_in(space: &WorldSpace, a: &Event, b: &Event) -> Result<bool, Error> {
    a.check(space.num_atoms())?;
    b.check(space.num_atoms())?;
    Ok(space
        .worlds()
        .iter()
        .all(|w| eval_unchecked(w, a) == eval_unchecked(w, b)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(names: &[&str]) -> AtomTable {
        AtomTable::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn atom_names_follow_grammar() {
        assert!(is_valid_atom_name("have_legs"));
        assert!(is_valid_atom_name("_x1"));
        assert!(!is_valid_atom_name("v"));
        assert!(!is_valid_atom_name("true"));
        assert!(!is_valid_atom_name("1a"));
        assert!(!is_valid_atom_name("Bird"));
        assert!(matches!(
            AtomTable::new(["a", "a"]),
            Err(Error::DuplicateAtom(_))
        ));
    }

    #[test]
    fn event_evaluation() {
        // atoms: bird=0, fly=1
        let w = World::from_assignment(&[true, true]);
        assert!(eval_event(&w, &Event::and(Event::atom(0), Event::atom(1))).unwrap());
        assert!(eval_event(&w, &Event::Top).unwrap());
        assert!(!eval_event(&w, &Event::Bottom).unwrap());
        // atoms: bird=0, penguin=1
        let w = World::from_assignment(&[true, false]);
        let e = Event::and(Event::not(Event::atom(1)), Event::atom(0));
        assert!(eval_event(&w, &e).unwrap());
        assert!(matches!(
            eval_event(&w, &Event::atom(5)),
            Err(Error::AtomIndex { index: 5, .. })
        ));
    }

    #[test]
    fn conditional_evaluation() {
        // bird=0, fly=1
        let c = ConditionalEvent::new(Event::atom(1), Event::atom(0));
        let t = |b: bool, f: bool| eval_conditional(&World::from_assignment(&[b, f]), &c).unwrap();
        assert_eq!(t(true, true), Truth::True);
        assert_eq!(t(true, false), Truth::False);
        assert_eq!(t(false, true), Truth::Indeterminate);
    }

    #[test]
    fn world_enumeration() {
        let s = enumerate_worlds(&table(&["a", "b"])).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(
            s.worlds().iter().map(|w| w.index()).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        let s = enumerate_worlds(&table(&["bird", "penguin", "fly", "have_legs"])).unwrap();
        assert_eq!(s.len(), 16);
        let s = enumerate_worlds(&AtomTable::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.world(0).assignment(), Vec::<bool>::new());
        let many = AtomTable::new((0..17).map(|i| format!("a{i}"))).unwrap();
        match enumerate_worlds(&many) {
            Err(Error::ResourceLimit { cap: 16, actual: 17, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn world_index_assignment_bijection() {
        let s = enumerate_worlds(&table(&["a", "b", "c", "d"])).unwrap();
        let mut seen = std::collections::HashSet::new();
        for w in s.worlds() {
            let back = World::from_assignment(&w.assignment());
            assert_eq!(back, *w);
            assert!(seen.insert(w.assignment()));
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn equivalence_examples() {
        let t = table(&["bird", "fly"]);
        let (bird, fly) = (Event::atom(0), Event::atom(1));
        assert!(equivalent(&t, &Event::and(bird.clone(), fly.clone()), &Event::and(fly.clone(), bird.clone())).unwrap());
        assert!(equivalent(&t, &bird, &Event::and(bird.clone(), Event::Top)).unwrap());
        let t = table(&["bird", "penguin"]);
        assert!(!equivalent(&t, &Event::atom(0), &Event::atom(1)).unwrap());
    }

    #[test]
    fn display_round_trips_shapes() {
        let t = table(&["a", "b", "c"]);
        let e = Event::or(Event::and(Event::atom(0), Event::not(Event::atom(1))), Event::atom(2));
        assert_eq!(e.display(&t).to_string(), "a & !b v c");
        let e = Event::and(Event::or(Event::atom(0), Event::atom(1)), Event::atom(2));
        assert_eq!(e.display(&t).to_string(), "(a v b) & c");
        let e = Event::not(Event::and(Event::atom(0), Event::atom(1)));
        assert_eq!(e.display(&t).to_string(), "!(a & b)");
    }

    pub(crate) fn arb_event(num_atoms: usize) -> impl Strategy<Value = Event> {
        let leaf = prop_oneof![
            Just(Event::Top),
            Just(Event::Bottom),
            (0..num_atoms).prop_map(Event::Atom),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Event::not),
                (inner.clone(), inner).prop_map(|(a, b)| Event::and(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn indeterminate_iff_antecedent_false(a in arb_event(3), b in arb_event(3), idx in 0usize..8) {
            let w = World::new(idx, 3);
            let c = ConditionalEvent::new(a, b.clone());
            let ind = eval_conditional(&w, &c).unwrap() == Truth::Indeterminate;
            prop_assert_eq!(ind, !eval_event(&w, &b).unwrap());
        }

        #[test]
        fn mask_agrees_with_pointwise_eval(e in arb_event(3)) {
            let s = WorldSpace::with_cap(3, 16).unwrap();
            let m = s.mask(&e).unwrap();
            for w in s.worlds() {
                prop_assert_eq!(m.contains(w.index()), eval_event(w, &e).unwrap());
            }
        }

        #[test]
        fn equivalence_is_an_equivalence_relation(a in arb_event(3), b in arb_event(3), c in arb_event(3)) {
            let t = table(&["x", "y", "z"]);
            prop_assert!(equivalent(&t, &a, &a).unwrap());
            let ab = equivalent(&t, &a, &b).unwrap();
            prop_assert_eq!(ab, equivalent(&t, &b, &a).unwrap());
            if ab && equivalent(&t, &b, &c).unwrap() {
                prop_assert!(equivalent(&t, &a, &c).unwrap());
            }
        }
    }
}
