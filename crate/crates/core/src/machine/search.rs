//! One-step relation and bounded acceptance search.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use smallvec::SmallVec;

use super::analysis::LowerBound;
use super::{Automaton, AutomatonError, LetterId, StateId, SymbolId};
use crate::store::Store;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    /// Letters consumed so far.
    pub position: usize,
    pub store: Store<SymbolId>,
}

/// Limits on the search. `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_store_symbols: Option<usize>,
    pub max_configurations: Option<usize>,
}

pub const DEFAULT_MAX_CONFIGURATIONS: usize = 10_000_000;

impl SearchBounds {
    /// `4 * (len + 4)` store symbols and 10^7 configurations.
    pub fn default_for(input_len: usize) -> Self {
        SearchBounds {
            max_store_symbols: Some(4 * (input_len + 4)),
            max_configurations: Some(DEFAULT_MAX_CONFIGURATIONS),
        }
    }

    pub fn unlimited() -> Self {
        SearchBounds {
            max_store_symbols: None,
            max_configurations: None,
        }
    }
}

/// A witness run: each configuration with the transition applied to it,
/// followed by the final configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<(Configuration, usize)>,
    pub last: Configuration,
}

impl Trace {
    pub fn first(&self) -> &Configuration {
        self.steps.first().map_or(&self.last, |(c, _)| c)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every step against the one-step relation.
    pub fn replays(&self, a: &Automaton, input: &[LetterId]) -> bool {
        let nexts = self
            .steps
            .iter()
            .skip(1)
            .map(|(c, _)| c)
            .chain(std::iter::once(&self.last));
        self.steps.iter().zip(nexts).all(|((c, t), next)| {
            step(a, c, input)
                .iter()
                .any(|(succ, tid)| tid == t && succ == next)
        })
    }

    pub fn render(&self, a: &Automaton) -> String {
        let mut out = String::new();
        for (c, t) in &self.steps {
            out.push_str(&a.render_configuration(c));
            out.push_str("  ");
            out.push_str(&a.describe_transition(*t));
            out.push('\n');
        }
        out.push_str(&a.render_configuration(&self.last));
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted(Trace),
    /// Search space exhausted, no bound hit.
    Rejected,
    /// Some branch was cut by a bound.
    Inconclusive,
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Accepted(_) => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Accepted(_) => 0,
            Verdict::Rejected => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// All input read and the store empty, any state.
    Accept,
    Exact(Configuration),
}

/// Words of bounded length accepted by an automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub words: BTreeSet<Vec<LetterId>>,
    /// False when some branch was cut by a bound.
    pub complete: bool,
}

type PatternIndex = HashMap<SmallVec<[SymbolId; 4]>, Vec<usize>>;

/// Search engine for one automaton: transition index plus the static
/// consumption bound used to discard hopeless configurations.
pub struct Engine<'a> {
    automaton: &'a Automaton,
    index: Vec<PatternIndex>,
    bound: Option<LowerBound>,
    memoize: bool,
}

struct Frame<'e> {
    config: Configuration,
    candidates: &'e [usize],
    next: usize,
}

impl<'a> Engine<'a> {
    pub fn new(automaton: &'a Automaton) -> Self {
        let mut index: Vec<PatternIndex> = vec![HashMap::new(); automaton.states().len()];
        for ((state, pattern), ids) in super::index_transitions(automaton) {
            index[state.0 as usize].insert(pattern.into_iter().collect(), ids);
        }
        Engine {
            automaton,
            index,
            bound: LowerBound::new(automaton),
            memoize: true,
        }
    }

    /// Disables the consumption bound.
    pub fn without_pruning(mut self) -> Self {
        self.bound = None;
        self
    }

    /// Disables the visited set; only safe with a configuration bound.
    pub fn without_memo(mut self) -> Self {
        self.memoize = false;
        self
    }

    pub fn automaton(&self) -> &'a Automaton {
        self.automaton
    }

    fn candidates(&self, state: StateId, store: &Store<SymbolId>) -> &[usize] {
        let key: SmallVec<[SymbolId; 4]> = store.topsym_iter().copied().collect();
        if key.is_empty() {
            return &[];
        }
        self.index[state.0 as usize]
            .get(key.as_slice())
            .map_or(&[], Vec::as_slice)
    }

    fn fire(&self, c: &Configuration, tid: usize, next_letter: Option<LetterId>) -> Option<Configuration> {
        let t = &self.automaton.transitions()[tid];
        let position = match t.input {
            None => c.position,
            Some(l) if next_letter == Some(l) => c.position + 1,
            Some(_) => return None,
        };
        Some(Configuration {
            state: t.to,
            position,
            store: t.action.apply(&c.store)?,
        })
    }

    pub fn step(&self, c: &Configuration, input: &[LetterId]) -> Vec<(Configuration, usize)> {
        let next = input.get(c.position).copied();
        self.candidates(c.state, &c.store)
            .iter()
            .filter_map(|&tid| self.fire(c, tid, next).map(|succ| (succ, tid)))
            .collect()
    }

    fn hopeless(&self, c: &Configuration, budget: usize) -> bool {
        self.bound
            .as_ref()
            .is_some_and(|b| b.exceeds(c.state.0 as usize, &c.store, budget))
    }

    pub fn accepts(&self, input: &[LetterId], bounds: SearchBounds) -> Verdict {
        self.search(self.automaton.initial_configuration(), input, &Goal::Accept, bounds)
    }

    /// Depth-first search from `from` towards `goal`, trying transitions in
    /// declaration order. Deterministic for fixed inputs and bounds.
    pub fn search(
        &self,
        from: Configuration,
        input: &[LetterId],
        goal: &Goal,
        bounds: SearchBounds,
    ) -> Verdict {
        let (goal_position, prune) = match goal {
            Goal::Accept => (input.len(), true),
            Goal::Exact(c) => (c.position, c.store.is_empty()),
        };
        let reached = |c: &Configuration| match goal {
            Goal::Accept => c.position == input.len() && c.store.is_empty(),
            Goal::Exact(g) => c == g,
        };
        let admissible = |c: &Configuration, cut: &mut bool| -> bool {
            if c.store.is_empty() || c.position > goal_position {
                return false;
            }
            if bounds
                .max_store_symbols
                .is_some_and(|max| c.store.total_size() > max)
            {
                *cut = true;
                return false;
            }
            !(prune && self.hopeless(c, goal_position - c.position))
        };

        if reached(&from) {
            return Verdict::Accepted(Trace {
                steps: vec![],
                last: from,
            });
        }
        let mut cut = false;
        if !admissible(&from, &mut cut) {
            return if cut { Verdict::Inconclusive } else { Verdict::Rejected };
        }

        let mut visited: HashSet<Configuration> = HashSet::new();
        if self.memoize {
            visited.insert(from.clone());
        }
        let mut explored = 1usize;
        let mut stack = vec![Frame {
            candidates: self.candidates(from.state, &from.store),
            config: from,
            next: 0,
        }];

        while let Some(frame) = stack.last_mut() {
            if frame.next == frame.candidates.len() {
                stack.pop();
                continue;
            }
            let tid = frame.candidates[frame.next];
            frame.next += 1;
            let letter = input.get(frame.config.position).copied();
            let Some(succ) = self.fire(&frame.config, tid, letter) else {
                continue;
            };
            if reached(&succ) {
                let steps = stack
                    .iter()
                    .map(|f| (f.config.clone(), f.candidates[f.next - 1]))
                    .collect();
                return Verdict::Accepted(Trace { steps, last: succ });
            }
            if !admissible(&succ, &mut cut) {
                continue;
            }
            if self.memoize && !visited.insert(succ.clone()) {
                continue;
            }
            explored += 1;
            if bounds.max_configurations.is_some_and(|max| explored > max) {
                return Verdict::Inconclusive;
            }
            stack.push(Frame {
                candidates: self.candidates(succ.state, &succ.store),
                config: succ,
                next: 0,
            });
        }
        if cut {
            Verdict::Inconclusive
        } else {
            Verdict::Rejected
        }
    }

    /// Every accepted word of length at most `max_len`, found by running the
    /// automaton with the input letters chosen freely.
    pub fn language(&self, max_len: usize, bounds: SearchBounds) -> Language {
        #[derive(Clone, PartialEq, Eq, Hash)]
        struct Node {
            state: StateId,
            word: Vec<LetterId>,
            store: Store<SymbolId>,
        }
        let transitions = self.automaton.transitions();
        let mut words = BTreeSet::new();
        let mut complete = true;
        let mut visited: HashSet<Node> = HashSet::new();
        let start = self.automaton.initial_configuration();
        let mut stack = vec![Node {
            state: start.state,
            word: vec![],
            store: start.store,
        }];
        let mut explored = 0usize;

        while let Some(node) = stack.pop() {
            explored += 1;
            if bounds.max_configurations.is_some_and(|max| explored > max) {
                complete = false;
                break;
            }
            for &tid in self.candidates(node.state, &node.store).iter().rev() {
                let t = &transitions[tid];
                let Some(store) = t.action.apply(&node.store) else {
                    continue;
                };
                let mut word = node.word.clone();
                if let Some(l) = t.input {
                    if word.len() == max_len {
                        continue;
                    }
                    word.push(l);
                }
                if store.is_empty() {
                    words.insert(word);
                    continue;
                }
                if bounds
                    .max_store_symbols
                    .is_some_and(|max| store.total_size() > max)
                {
                    complete = false;
                    continue;
                }
                let succ = Node {
                    state: t.to,
                    word,
                    store,
                };
                let probe = Configuration {
                    state: succ.state,
                    position: succ.word.len(),
                    store: succ.store.clone(),
                };
                if self.hopeless(&probe, max_len - succ.word.len()) {
                    continue;
                }
                if visited.insert(succ.clone()) {
                    stack.push(succ);
                }
            }
        }
        Language { words, complete }
    }
}

pub fn step(a: &Automaton, c: &Configuration, input: &[LetterId]) -> Vec<(Configuration, usize)> {
    Engine::new(a).step(c, input)
}

/// Runs the acceptance search on a word of input tokens.
pub fn accepts<T: AsRef<str>>(
    a: &Automaton,
    input: &[T],
    bounds: SearchBounds,
) -> Result<Verdict, AutomatonError> {
    let input = a.encode_input(input)?;
    Ok(Engine::new(a).accepts(&input, bounds))
}

/// Whether `goal` is reachable from `from` while reading `input` from
/// `from.position` up to `goal.position`.
pub fn reachable<T: AsRef<str>>(
    a: &Automaton,
    from: Configuration,
    goal: Configuration,
    input: &[T],
    bounds: SearchBounds,
) -> Result<Verdict, AutomatonError> {
    let input = a.encode_input(input)?;
    Ok(Engine::new(a).search(from, &input, &Goal::Exact(goal), bounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{AutomatonBuilder, Op};

    /// Pops `Z` on `a`, or on `eps` when the flag holds an `F`.
    fn two_keys() -> Automaton {
        AutomatonBuilder::new(2)
            .states(["q"])
            .unwrap()
            .initial("q")
            .letters(["a"])
            .unwrap()
            .symbols(["Z", "F"])
            .unwrap()
            .start_symbol("Z")
            .transition("q", Some("a"), &["Z"], "q", Op::Pop(1))
            .unwrap()
            .transition("q", None, &["Z", "F"], "q", Op::Pop(1))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn patterns_match_exactly() {
        let a = two_keys();
        let input = a.encode_input(&["a"]).unwrap();
        let c = a.initial_configuration();
        let succ = step(&a, &c, &input);
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].1, 0);

        let zf = Configuration {
            store: c.store.push(2, &[a.symbol_id("F").unwrap()]).unwrap(),
            ..c.clone()
        };
        let succ = step(&a, &zf, &input);
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0].1, 1);
        assert_eq!(succ[0].0.position, 0);
    }

    #[test]
    fn empty_input_with_stuck_store_is_rejected() {
        let a = two_keys();
        let verdict = accepts(&a, &[] as &[&str], SearchBounds::default_for(0)).unwrap();
        assert_eq!(verdict, Verdict::Rejected);
        assert!(accepts(&a, &["a"], SearchBounds::default_for(1))
            .unwrap()
            .is_accepted());
    }

    #[test]
    fn undeclared_letters_are_errors() {
        let a = two_keys();
        assert!(accepts(&a, &["b"], SearchBounds::default_for(1)).is_err());
    }

    #[test]
    fn zero_step_reachability() {
        let a = two_keys();
        let c = a.initial_configuration();
        let v = reachable(&a, c.clone(), c, &["a"], SearchBounds::unlimited()).unwrap();
        assert!(matches!(v, Verdict::Accepted(t) if t.is_empty()));
    }

    #[test]
    fn store_bound_gives_inconclusive() {
        // Counter machine: a^n on the flag, then pops them with b's.
        let a = AutomatonBuilder::new(2)
            .states(["up", "down"])
            .unwrap()
            .initial("up")
            .letters(["a", "b"])
            .unwrap()
            .symbols(["Z", "F"])
            .unwrap()
            .start_symbol("Z")
            .transition("up", None, &["Z"], "up", Op::Push(2, vec!["F"]))
            .unwrap()
            .transition("up", None, &["Z", "F"], "up", Op::Push(2, vec!["F"]))
            .unwrap()
            .transition("up", None, &["Z", "F"], "down", Op::Pop(2))
            .unwrap()
            .transition("down", Some("a"), &["Z", "F"], "down", Op::Pop(2))
            .unwrap()
            .transition("down", Some("b"), &["Z"], "down", Op::Pop(1))
            .unwrap()
            .build()
            .unwrap();
        let word = ["a", "a", "a", "b"];
        let tight = SearchBounds {
            max_store_symbols: Some(3),
            max_configurations: None,
        };
        assert_eq!(accepts(&a, &word, tight).unwrap(), Verdict::Inconclusive);
        let v = accepts(&a, &word, SearchBounds::default_for(word.len())).unwrap();
        let Verdict::Accepted(trace) = v else {
            panic!("expected acceptance")
        };
        assert!(trace.replays(&a, &a.encode_input(&word).unwrap()));
        assert_eq!(
            accepts(&a, &["a", "b", "b"], SearchBounds::default_for(3)).unwrap(),
            Verdict::Rejected
        );
    }

    #[test]
    fn language_of_counter() {
        let a = AutomatonBuilder::new(1)
            .states(["q"])
            .unwrap()
            .initial("q")
            .letters(["a", "b"])
            .unwrap()
            .symbols(["Z", "A"])
            .unwrap()
            .start_symbol("Z")
            .transition("q", Some("a"), &["Z"], "q", Op::Push(1, vec!["A", "A"]))
            .unwrap()
            .transition("q", Some("b"), &["A"], "q", Op::Pop(1))
            .unwrap()
            .build()
            .unwrap();
        let lang = Engine::new(&a).language(5, SearchBounds::default_for(5));
        assert!(lang.complete);
        let words: Vec<String> = lang
            .words
            .iter()
            .map(|w| w.iter().map(|l| a.letter_name(*l)).collect())
            .collect();
        assert_eq!(words, vec!["abb"]);
    }
}
