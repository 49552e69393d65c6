//! Constructors for the 2-iterated automata recognising Fibonacci lengths,
//! ball contours and sector contours.
//!
//! Every construction starts with a guess loop that stacks `F`s on the
//! flag of the start symbol `Z`, then replaces `Z` by the root elements,
//! which inherit the guessed height. A tree element `A[F^h]` expands into
//! its rule word at height `h - 1` and is read once its flag is empty.

use thiserror::Error;

use crate::contour::{ROOT_MARK, SIDE_MARK};
use crate::grammar::{Family, GrammarError, SubstitutionSystem};
use crate::machine::{Automaton, AutomatonBuilder, AutomatonError, Op};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Guess loops add one `F` per step.
    #[default]
    Corrected,
    /// The transition tables exactly as printed, with `push2(FF)` in the
    /// guess loop. Only available for the Fibonacci tree.
    AsPrinted,
}

impl std::str::FromStr for Variant {
    type Err = BuildError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corrected" => Ok(Variant::Corrected),
            "as-printed" | "asprinted" => Ok(Variant::AsPrinted),
            _ => Err(BuildError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("sector count must be at least 1")]
    ZeroSigma,
    #[error("unknown variant `{0}` (expected corrected or as-printed)")]
    UnknownVariant(String),
    #[error("the as-printed variant exists only for {0}")]
    VariantUnavailable(&'static str),
    #[error("read letter `{0}` collides with a sector marker")]
    MarkerCollision(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// `from, input, pattern, to, step`, all by name.
type Row = (String, Option<String>, Vec<String>, String, Step);

/// Transitions collected by name before validation.
struct Table {
    rows: Vec<Row>,
}

enum Step {
    Pop(usize),
    Push(usize, Vec<String>),
}

impl Table {
    fn new() -> Self {
        Table { rows: Vec::new() }
    }

    fn add(&mut self, from: &str, input: Option<&str>, pattern: &[&str], to: &str, step: Step) {
        self.rows.push((
            from.to_string(),
            input.map(str::to_string),
            pattern.iter().map(|s| s.to_string()).collect(),
            to.to_string(),
            step,
        ));
    }

    fn build(
        self,
        states: &[&str],
        letters: &[String],
        symbols: &[String],
        start: &str,
    ) -> Result<Automaton, AutomatonError> {
        let mut b = AutomatonBuilder::new(2)
            .states(states.iter().copied())?
            .initial(states[0])
            .letters(letters.iter().cloned())?
            .symbols(symbols.iter())?
            .start_symbol(start);
        for (from, input, pattern, to, step) in &self.rows {
            let pattern: Vec<&str> = pattern.iter().map(String::as_str).collect();
            let op = match step {
                Step::Pop(j) => Op::Pop(*j),
                Step::Push(j, w) => Op::Push(*j, w.iter().map(String::as_str).collect()),
            };
            b = b.transition(from, input.as_deref(), &pattern, to, op)?;
        }
        b.build()
    }
}

fn push1<S: AsRef<str>>(word: &[S]) -> Step {
    Step::Push(1, word.iter().map(|s| s.as_ref().to_string()).collect())
}

fn guess_push(f: &str, v: Variant) -> Step {
    match v {
        Variant::Corrected => Step::Push(2, vec![f.to_string()]),
        Variant::AsPrinted => Step::Push(2, vec![f.to_string(), f.to_string()]),
    }
}

/// `base`, prefixed with `_` until it differs from every label.
fn reserve(base: &str, labels: &[String]) -> String {
    let mut name = base.to_string();
    while labels.contains(&name) {
        name.insert(0, '_');
    }
    name
}

fn is_fibonacci(sys: &SubstitutionSystem) -> bool {
    sys.family() == Family::Polygonal(5)
}

/// Recognises `a^n` for the Fibonacci numbers `n` (`f0 = f1 = 1`).
pub fn fibonacci_automaton(v: Variant) -> Automaton {
    let mut t = Table::new();
    t.add("q0", None, &["Z"], "q0", Step::Push(2, vec!["F".into()]));
    t.add("q0", None, &["Z"], "q0", push1(&["X2"]));
    t.add("q0", None, &["Z", "F"], "q0", guess_push("F", v));
    t.add("q0", None, &["Z", "F"], "q0", push1(&["X2"]));
    t.add("q0", None, &["X1", "F"], "q1", Step::Pop(2));
    t.add("q0", None, &["X2", "F"], "q2", Step::Pop(2));
    t.add("q0", Some("a"), &["X1"], "q0", Step::Pop(1));
    t.add("q0", Some("a"), &["X2"], "q0", Step::Pop(1));
    t.add("q1", None, &["X1", "F"], "q0", push1(&["X1", "X2"]));
    t.add("q2", None, &["X2", "F"], "q0", push1(&["X1"]));
    t.add("q1", None, &["X1"], "q0", push1(&["X1", "X2"]));
    t.add("q2", None, &["X2"], "q0", push1(&["X1"]));
    let symbols: Vec<String> = ["Z", "X1", "X2", "F"].map(String::from).to_vec();
    t.build(&["q0", "q1", "q2"], &["a".to_string()], &symbols, "Z")
        .expect("fibonacci table is well formed")
}

/// Depth-first expansion of the tree: per label `A`, descend on `AF`,
/// expand in `q1`, read on a bare `A`.
fn tree_rules(t: &mut Table, sys: &SubstitutionSystem, f: &str) {
    let labels = sys.labels();
    for a in labels {
        t.add("q0", None, &[a, f], "q1", Step::Pop(2));
    }
    for (i, a) in labels.iter().enumerate() {
        t.add("q0", Some(sys.read_letter(i)), &[a], "q0", Step::Pop(1));
    }
    for (i, a) in labels.iter().enumerate() {
        let rule: Vec<&str> = sys.rule(i).iter().map(|&j| sys.label(j)).collect();
        t.add("q1", None, &[a, f], "q0", push1(&rule));
    }
    for (i, a) in labels.iter().enumerate() {
        let rule: Vec<&str> = sys.rule(i).iter().map(|&j| sys.label(j)).collect();
        t.add("q1", None, &[a], "q0", push1(&rule));
    }
}

/// Accepts exactly the ball contours `read(lw(l))^sigma`, `l >= 0`, of the
/// tree rooted at `root`.
pub fn ball_automaton(
    sys: &SubstitutionSystem,
    root: &str,
    sigma: usize,
    v: Variant,
) -> Result<Automaton, BuildError> {
    if sigma == 0 {
        return Err(BuildError::ZeroSigma);
    }
    if v == Variant::AsPrinted && !is_fibonacci(sys) {
        return Err(BuildError::VariantUnavailable("the Fibonacci tree"));
    }
    sys.label_index(root)?;
    let labels = sys.labels();
    let z = reserve("Z", labels);
    let f = reserve("F", labels);
    let roots = vec![root; sigma];

    let mut t = Table::new();
    t.add("q0", None, &[&z], "q0", Step::Push(2, vec![f.clone()]));
    t.add("q0", None, &[&z], "q0", push1(&roots));
    t.add("q0", None, &[&z, &f], "q0", guess_push(&f, v));
    t.add("q0", None, &[&z, &f], "q0", push1(&roots));
    tree_rules(&mut t, sys, &f);

    let mut symbols = vec![z.clone()];
    symbols.extend(labels.iter().cloned());
    symbols.push(f);
    Ok(t.build(&["q0", "q1"], &sys.terminals(), &symbols, &z)?)
}

/// Accepts exactly the sector contours of the tree rooted at `root` for
/// `l >= 1`: `r s^l lw(l) s^l` in the planar families, `lw(l)` otherwise.
pub fn sector_automaton(
    sys: &SubstitutionSystem,
    root: &str,
    v: Variant,
) -> Result<Automaton, BuildError> {
    sys.label_index(root)?;
    if v == Variant::AsPrinted {
        if !is_fibonacci(sys) || root != "W" {
            return Err(BuildError::VariantUnavailable("the white Fibonacci sector"));
        }
        return Ok(printed_white_sector());
    }
    let labels = sys.labels();
    let z = reserve("Z", labels);
    let f = reserve("F", labels);
    let mut t = Table::new();
    let mut symbols = vec![z.clone()];
    let mut letters = Vec::new();

    if sys.family().marks_sides() {
        if let Some(c) = sys
            .terminals()
            .into_iter()
            .find(|x| x == ROOT_MARK || x == SIDE_MARK)
        {
            return Err(BuildError::MarkerCollision(c));
        }
        let sr = reserve("Sr", labels);
        let l = reserve("L", labels);
        let x = reserve("X", labels);
        t.add("q0", None, &[&z], "q0", Step::Push(2, vec![f.clone()]));
        t.add("q0", None, &[&z], "q0", push1(&[&sr]));
        t.add("q0", None, &[&z, &f], "q0", Step::Push(2, vec![f.clone()]));
        t.add("q0", None, &[&z, &f], "q0", push1(&[&sr]));
        t.add("q0", Some(ROOT_MARK), &[&sr, &f], "q1", Step::Pop(2));
        t.add("q1", None, &[&sr, &f], "q0", push1(&[l.as_str(), root, x.as_str()]));
        t.add("q0", Some(SIDE_MARK), &[&l, &f], "q0", Step::Pop(2));
        t.add("q0", None, &[&l], "q0", Step::Pop(1));
        t.add("q0", Some(SIDE_MARK), &[&x, &f], "q0", Step::Pop(2));
        t.add("q0", None, &[&x], "q0", Step::Pop(1));
        symbols.extend([sr, l, x]);
        letters.extend([ROOT_MARK.to_string(), SIDE_MARK.to_string()]);
    } else {
        t.add("q0", None, &[&z], "q0", Step::Push(2, vec![f.clone()]));
        t.add("q0", None, &[&z, &f], "q0", Step::Push(2, vec![f.clone()]));
        t.add("q0", None, &[&z, &f], "q0", push1(&[root]));
    }
    tree_rules(&mut t, sys, &f);

    symbols.extend(labels.iter().cloned());
    symbols.push(f);
    letters.extend(sys.terminals());
    Ok(t.build(&["q0", "q1"], &letters, &symbols, &z)?)
}

/// The white-sector table as printed, with `Bb`, `Wb`, `Wr` for the
/// subscripted symbols.
fn printed_white_sector() -> Automaton {
    let mut t = Table::new();
    let pop = Step::Pop;
    t.add("q0", None, &["Z"], "q0", Step::Push(2, vec!["F".into()]));
    t.add("q0", None, &["Z"], "q0", push1(&["Wr"]));
    t.add("q0", None, &["Z", "F"], "q0", guess_push("F", Variant::AsPrinted));
    t.add("q0", None, &["Z", "F"], "q0", push1(&["Wr"]));
    t.add("q0", None, &["W", "F"], "q1", pop(2));
    t.add("q0", None, &["B", "F"], "q1", pop(2));
    t.add("q0", Some("r"), &["Wr", "F"], "q1", pop(2));
    t.add("q0", Some("r"), &["Wr"], "q1", pop(1));
    t.add("q0", None, &["Wb", "F"], "q1", pop(2));
    t.add("q0", Some("s"), &["Bb", "F"], "q1", pop(2));
    t.add("q0", Some("b"), &["Bb"], "q0", pop(1));
    t.add("q0", Some("b"), &["B"], "q0", pop(1));
    t.add("q0", Some("w"), &["W"], "q0", pop(1));
    t.add("q0", Some("w"), &["Wb"], "q0", pop(1));
    t.add("q0", Some("s"), &["X", "F"], "q0", pop(1));
    t.add("q1", None, &["Wr", "F"], "q0", push1(&["Bb", "W", "Wr"]));
    t.add("q1", None, &["Wb", "F"], "q0", push1(&["B", "W", "Wr", "X"]));
    t.add("q1", None, &["W", "F"], "q0", push1(&["B", "W", "W"]));
    t.add("q1", None, &["Bb", "F"], "q0", push1(&["Bb", "W"]));
    t.add("q1", None, &["B", "F"], "q0", push1(&["B", "W"]));
    let symbols: Vec<String> = ["Z", "B", "W", "Bb", "Wb", "Wr", "X", "F"].map(String::from).to_vec();
    let letters: Vec<String> = ["r", "s", "b", "w"].map(String::from).to_vec();
    t.build(&["q0", "q1"], &letters, &symbols, "Z")
        .expect("printed sector table is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{dodecahedral, fibonacci, parse_word, SubstitutionSystem};
    use crate::machine::{accepts, SearchBounds};

    fn run(a: &Automaton, word: &str) -> bool {
        let w = parse_word(word);
        accepts(a, &w, SearchBounds::default_for(w.len()))
            .unwrap()
            .is_accepted()
    }

    #[test]
    fn fibonacci_small_lengths() {
        let a = fibonacci_automaton(Variant::Corrected);
        let accepted: Vec<usize> = (0..15).filter(|&n| run(&a, &"a".repeat(n))).collect();
        assert_eq!(accepted, vec![1, 2, 3, 5, 8, 13]);
        let printed = fibonacci_automaton(Variant::AsPrinted);
        assert!(run(&printed, "a"));
        assert!(!run(&printed, "aa"));
    }

    #[test]
    fn sector_caption_words() {
        let w = sector_automaton(&fibonacci(), "W", Variant::Corrected).unwrap();
        let b = sector_automaton(&fibonacci(), "B", Variant::Corrected).unwrap();
        assert!(run(&w, "rssbwbwwbwwss"));
        assert!(run(&b, "rssbwbwwss"));
        assert!(!run(&w, "rsbwbwwbwwss"));
        assert!(!run(&w, "rw"));
        assert!(!run(&b, "rssbwbwwbwwss"));
    }

    #[test]
    fn ball_words() {
        let a = ball_automaton(&fibonacci(), "W", 5, Variant::Corrected).unwrap();
        assert!(run(&a, &"bwbwwbww".repeat(5)));
        assert!(run(&a, "wwwww"));
        assert!(!run(&a, &"bwbwwbww".repeat(4)));
        let d = ball_automaton(&dodecahedral(), "O", 8, Variant::Corrected).unwrap();
        assert!(run(&d, &"oooooccct".repeat(8)));
    }

    #[test]
    fn reserved_names_are_prefixed() {
        let sys = SubstitutionSystem::new(
            Family::Custom,
            &["Z", "F"],
            &[&["Z", "F"], &["Z"]],
            &["z", "f"],
        )
        .unwrap();
        let a = ball_automaton(&sys, "Z", 1, Variant::Corrected).unwrap();
        let names: Vec<&str> = a.symbols().iter().map(|s| s.as_str()).collect();
        assert_eq!(names, ["_Z", "Z", "F", "_F"]);
        assert!(run(&a, "zf"));
        assert!(run(&a, "zfz"));
        assert!(!run(&a, "zz"));
    }

    #[test]
    fn printed_variant_is_restricted() {
        let hept = crate::grammar::polygonal(7).unwrap();
        assert_eq!(
            ball_automaton(&hept, "W", 9, Variant::AsPrinted),
            Err(BuildError::VariantUnavailable("the Fibonacci tree"))
        );
        assert!(sector_automaton(&fibonacci(), "B", Variant::AsPrinted).is_err());
        assert!(sector_automaton(&fibonacci(), "W", Variant::AsPrinted).is_ok());
        assert_eq!(ball_automaton(&fibonacci(), "W", 0, Variant::Corrected), Err(BuildError::ZeroSigma));
    }
}
