//! k-iterated pushdown automata.
//!
//! An [`Automaton`] reads a word of input tokens. A transition fires when
//! the current state matches, the input item is `eps` or the next unread
//! letter, and the transition's pattern equals `topsym` of the store
//! exactly. A word is accepted when some run reaches a configuration with
//! all input read and an empty store, in any state.

mod analysis;
mod format;
mod search;

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::store::{validate_symbol, Store, StoreSymbol, SymbolError};

pub use format::{parse_automaton, render_automaton, FormatError};
pub use search::{
    accepts, reachable, step, Configuration, Engine, Goal, Language, SearchBounds, Trace,
    Verdict,
};

/// Keyword for the empty input item in files and in the builder API.
pub const EPSILON: &str = "eps";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub u32);

/// Store operation performed by a transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Pop(usize),
    Push(usize, Vec<SymbolId>),
}

impl Action {
    pub fn level(&self) -> usize {
        match self {
            Action::Pop(j) | Action::Push(j, _) => *j,
        }
    }

    pub fn apply(&self, store: &Store<SymbolId>) -> Option<Store<SymbolId>> {
        match self {
            Action::Pop(j) => store.pop(*j),
            Action::Push(j, word) => store.push(*j, word),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    /// `None` for an epsilon transition.
    pub input: Option<LetterId>,
    /// Must equal `topsym` of the store exactly.
    pub pattern: Vec<SymbolId>,
    pub to: StateId,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("iteration level must be at least 1")]
    ZeroLevel,
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("{kind} `{name}` declared twice")]
    Duplicate { kind: &'static str, name: String },
    #[error("operation level {level} outside 1..={max}")]
    Level { level: usize, max: usize },
    #[error("pattern has {len} symbols, more than the {max} store levels")]
    PatternTooLong { len: usize, max: usize },
    #[error("pattern must not be empty")]
    EmptyPattern,
    #[error("input letter `{0}` is reserved")]
    ReservedLetter(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// A k-iterated pushdown automaton with named states, letters and symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    levels: usize,
    states: Vec<String>,
    initial: StateId,
    letters: Vec<String>,
    symbols: Vec<StoreSymbol>,
    start_symbol: SymbolId,
    transitions: Vec<Transition>,
}

impl Automaton {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial_state(&self) -> StateId {
        self.initial
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn symbols(&self) -> &[StoreSymbol] {
        &self.symbols
    }

    pub fn start_symbol(&self) -> SymbolId {
        self.start_symbol
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.0 as usize]
    }

    pub fn letter_name(&self, id: LetterId) -> &str {
        &self.letters[id.0 as usize]
    }

    pub fn symbol_name(&self, id: SymbolId) -> &str {
        self.symbols[id.0 as usize].as_str()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        position(&self.states, name).map(StateId)
    }

    pub fn letter_id(&self, name: &str) -> Option<LetterId> {
        position(&self.letters, name).map(LetterId)
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|s| s.as_str() == name)
            .map(|i| SymbolId(i as u32))
    }

    /// `start_symbol[e]` at the automaton's level.
    pub fn initial_store(&self) -> Store<SymbolId> {
        Store::initial(self.levels, self.start_symbol)
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration {
            state: self.initial,
            position: 0,
            store: self.initial_store(),
        }
    }

    /// Maps input tokens to letter ids, rejecting undeclared letters.
    pub fn encode_input<T: AsRef<str>>(&self, word: &[T]) -> Result<Vec<LetterId>, AutomatonError> {
        word.iter()
            .map(|t| {
                self.letter_id(t.as_ref()).ok_or_else(|| AutomatonError::Undeclared {
                    kind: "input letter",
                    name: t.as_ref().to_string(),
                })
            })
            .collect()
    }

    pub fn render_store(&self, store: &Store<SymbolId>) -> String {
        store.render_with(&|s: &SymbolId, out: &mut String| out.push_str(self.symbol_name(*s)))
    }

    /// Converts a store over symbol names to one over this automaton's ids.
    pub fn encode_store(&self, store: &Store<StoreSymbol>) -> Result<Store<SymbolId>, AutomatonError> {
        if let Some(name) = first_unknown(store, self) {
            return Err(AutomatonError::Undeclared {
                kind: "store symbol",
                name,
            });
        }
        Ok(store.map(&|s: &StoreSymbol| self.symbol_id(s.as_str()).expect("checked above")))
    }

    pub fn render_configuration(&self, c: &Configuration) -> String {
        format!(
            "({}, {} read, {})",
            self.state_name(c.state),
            c.position,
            self.render_store(&c.store)
        )
    }

    /// Human-readable form of transition `id`.
    pub fn describe_transition(&self, id: usize) -> String {
        let t = &self.transitions[id];
        let input = t.input.map_or(EPSILON, |l| self.letter_name(l));
        let pattern: Vec<&str> = t.pattern.iter().map(|s| self.symbol_name(*s)).collect();
        let action = match &t.action {
            Action::Pop(j) => format!("pop {j}"),
            Action::Push(j, w) => {
                let w: Vec<&str> = w.iter().map(|s| self.symbol_name(*s)).collect();
                format!("push {j} {}", w.join(" ")).trim_end().to_string()
            }
        };
        format!(
            "#{id} {} {} [{}] -> {} {}",
            self.state_name(t.from),
            input,
            pattern.join(" "),
            self.state_name(t.to),
            action
        )
    }
}

fn first_unknown(store: &Store<StoreSymbol>, a: &Automaton) -> Option<String> {
    for (s, inner) in store.iter() {
        if a.symbol_id(s.as_str()).is_none() {
            return Some(s.to_string());
        }
        if let Some(name) = first_unknown(inner, a) {
            return Some(name);
        }
    }
    None
}

fn position(names: &[String], name: &str) -> Option<u32> {
    names.iter().position(|n| n == name).map(|i| i as u32)
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_automaton(self))
    }
}

/// Store operation given by symbol names, used by [`AutomatonBuilder`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op<'a> {
    Pop(usize),
    Push(usize, Vec<&'a str>),
}

/// Assembles an [`Automaton`] from names, validating every reference.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    levels: usize,
    states: Vec<String>,
    initial: Option<String>,
    letters: Vec<String>,
    symbols: Vec<StoreSymbol>,
    start_symbol: Option<String>,
    transitions: Vec<Transition>,
    seen: HashSet<Transition>,
}

impl AutomatonBuilder {
    pub fn new(levels: usize) -> Self {
        AutomatonBuilder {
            levels,
            states: Vec::new(),
            initial: None,
            letters: Vec::new(),
            symbols: Vec::new(),
            start_symbol: None,
            transitions: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn states<I, S>(mut self, names: I) -> Result<Self, AutomatonError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for name in names {
            let name = name.into();
            if self.states.contains(&name) {
                return Err(AutomatonError::Duplicate { kind: "state", name });
            }
            self.states.push(name);
        }
        Ok(self)
    }

    pub fn initial(mut self, name: &str) -> Self {
        self.initial = Some(name.to_string());
        self
    }

    pub fn letters<I, S>(mut self, names: I) -> Result<Self, AutomatonError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for name in names {
            let name = name.into();
            if name == EPSILON || name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(AutomatonError::ReservedLetter(name));
            }
            if self.letters.contains(&name) {
                return Err(AutomatonError::Duplicate { kind: "input letter", name });
            }
            self.letters.push(name);
        }
        Ok(self)
    }

    pub fn symbols<I, S>(mut self, names: I) -> Result<Self, AutomatonError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for name in names {
            let symbol = StoreSymbol::new(name.as_ref())?;
            if self.symbols.contains(&symbol) {
                return Err(AutomatonError::Duplicate {
                    kind: "store symbol",
                    name: symbol.to_string(),
                });
            }
            self.symbols.push(symbol);
        }
        Ok(self)
    }

    pub fn start_symbol(mut self, name: &str) -> Self {
        self.start_symbol = Some(name.to_string());
        self
    }

    fn state(&self, name: &str) -> Result<StateId, AutomatonError> {
        position(&self.states, name).map(StateId).ok_or_else(|| AutomatonError::Undeclared {
            kind: "state",
            name: name.to_string(),
        })
    }

    fn symbol(&self, name: &str) -> Result<SymbolId, AutomatonError> {
        validate_symbol(name)?;
        self.symbols
            .iter()
            .position(|s| s.as_str() == name)
            .map(|i| SymbolId(i as u32))
            .ok_or_else(|| AutomatonError::Undeclared {
                kind: "store symbol",
                name: name.to_string(),
            })
    }

    /// Adds a transition. `input` is `None` (or `Some("eps")`) for epsilon.
    /// Duplicate transitions are merged.
    pub fn transition(
        mut self,
        from: &str,
        input: Option<&str>,
        pattern: &[&str],
        to: &str,
        op: Op<'_>,
    ) -> Result<Self, AutomatonError> {
        let from = self.state(from)?;
        let to = self.state(to)?;
        let input = match input {
            None | Some(EPSILON) => None,
            Some(letter) => Some(position(&self.letters, letter).map(LetterId).ok_or_else(
                || AutomatonError::Undeclared {
                    kind: "input letter",
                    name: letter.to_string(),
                },
            )?),
        };
        if pattern.is_empty() {
            return Err(AutomatonError::EmptyPattern);
        }
        if pattern.len() > self.levels {
            return Err(AutomatonError::PatternTooLong {
                len: pattern.len(),
                max: self.levels,
            });
        }
        let pattern = pattern
            .iter()
            .map(|s| self.symbol(s))
            .collect::<Result<Vec<_>, _>>()?;
        let action = match op {
            Op::Pop(j) => Action::Pop(j),
            Op::Push(j, word) => Action::Push(
                j,
                word.iter().map(|s| self.symbol(s)).collect::<Result<_, _>>()?,
            ),
        };
        let level = action.level();
        if level == 0 || level > self.levels {
            return Err(AutomatonError::Level {
                level,
                max: self.levels,
            });
        }
        let t = Transition {
            from,
            input,
            pattern,
            to,
            action,
        };
        if self.seen.insert(t.clone()) {
            self.transitions.push(t);
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Automaton, AutomatonError> {
        if self.levels == 0 {
            return Err(AutomatonError::ZeroLevel);
        }
        let initial = match &self.initial {
            Some(name) => self.state(name)?,
            None => {
                return Err(AutomatonError::Undeclared {
                    kind: "initial state",
                    name: String::new(),
                })
            }
        };
        let start_symbol = match &self.start_symbol {
            Some(name) => self.symbol(name)?,
            None => {
                return Err(AutomatonError::Undeclared {
                    kind: "start symbol",
                    name: String::new(),
                })
            }
        };
        Ok(Automaton {
            levels: self.levels,
            states: self.states,
            initial,
            letters: self.letters,
            symbols: self.symbols,
            start_symbol,
            transitions: self.transitions,
        })
    }
}

/// Transitions grouped by (state, pattern), in declaration order.
pub(crate) fn index_transitions(a: &Automaton) -> HashMap<(StateId, Vec<SymbolId>), Vec<usize>> {
    let mut index: HashMap<(StateId, Vec<SymbolId>), Vec<usize>> = HashMap::new();
    for (i, t) in a.transitions.iter().enumerate() {
        index.entry((t.from, t.pattern.clone())).or_default().push(i);
    }
    index
}
