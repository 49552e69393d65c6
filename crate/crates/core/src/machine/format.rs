//! Line-oriented text format for automata.
//!
//! ```text
//! levels: 2
//! states: q0 q1
//! initial: q0
//! input: b w
//! store: Z B W F
//! start_symbol: Z
//! t: q0 eps Z  -> q0 push 2 F
//! t: q0 eps Z  -> q0 push 1 W W W W W
//! t: q0 b   B  -> q0 pop 1
//! t: q1 eps WF -> q0 push 1 B W W
//! ```
//!
//! `#` starts a comment. Patterns are written as concatenated single
//! character symbols, or as `[X1 F]` when a symbol is longer than one
//! character. `push j` with no symbols deletes the top element.

use std::fmt::Write;

use thiserror::Error;

use super::{Action, Automaton, AutomatonBuilder, AutomatonError, Op, EPSILON};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Automaton {
        line: usize,
        #[source]
        source: AutomatonError,
    },
}

impl FormatError {
    pub fn line(&self) -> usize {
        match self {
            FormatError::Syntax { line, .. } | FormatError::Automaton { line, .. } => *line,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn at(line: usize) -> impl Fn(AutomatonError) -> FormatError {
    move |source| FormatError::Automaton { line, source }
}

struct Header<'a> {
    line: usize,
    values: Vec<&'a str>,
}

const KEYS: &[&str] = &["levels", "states", "initial", "input", "store", "start_symbol"];

pub fn parse_automaton(text: &str) -> Result<Automaton, FormatError> {
    let mut headers: Vec<Option<Header<'_>>> = KEYS.iter().map(|_| None).collect();
    let mut transitions = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| syntax(line, format!("expected `key: value`, found `{content}`")))?;
        let key = key.trim();
        if key == "t" {
            transitions.push((line, value.trim()));
            continue;
        }
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| syntax(line, format!("unknown key `{key}`")))?;
        if headers[slot].is_some() {
            return Err(syntax(line, format!("`{key}` given twice")));
        }
        headers[slot] = Some(Header {
            line,
            values: value.split_whitespace().collect(),
        });
    }

    let take = |slot: usize| -> Result<&Header<'_>, FormatError> {
        headers[slot]
            .as_ref()
            .ok_or_else(|| syntax(last_line, format!("missing `{}`", KEYS[slot])))
    };
    let single = |slot: usize| -> Result<(usize, &str), FormatError> {
        let h = take(slot)?;
        match h.values.as_slice() {
            [v] => Ok((h.line, *v)),
            _ => Err(syntax(h.line, format!("`{}` takes exactly one value", KEYS[slot]))),
        }
    };

    let (levels_line, levels) = single(0)?;
    let levels: usize = levels
        .parse()
        .map_err(|_| syntax(levels_line, format!("invalid level `{levels}`")))?;
    let states = take(1)?;
    let (initial_line, initial) = single(2)?;
    let input = take(3)?;
    let store = take(4)?;
    let (start_line, start) = single(5)?;

    let mut builder = AutomatonBuilder::new(levels)
        .states(states.values.iter().copied())
        .map_err(at(states.line))?
        .letters(input.values.iter().copied())
        .map_err(at(input.line))?
        .symbols(store.values.iter().copied())
        .map_err(at(store.line))?
        .initial(initial)
        .start_symbol(start);
    if levels == 0 {
        return Err(at(levels_line)(AutomatonError::ZeroLevel));
    }
    if !states.values.contains(&initial) {
        return Err(at(initial_line)(AutomatonError::Undeclared {
            kind: "state",
            name: initial.to_string(),
        }));
    }
    if !store.values.contains(&start) {
        return Err(at(start_line)(AutomatonError::Undeclared {
            kind: "store symbol",
            name: start.to_string(),
        }));
    }

    for (line, body) in transitions {
        let (lhs, rhs) = body
            .split_once("->")
            .ok_or_else(|| syntax(line, "transition lacks `->`"))?;
        let mut left = lhs.split_whitespace();
        let from = left.next().ok_or_else(|| syntax(line, "missing source state"))?;
        let input = left.next().ok_or_else(|| syntax(line, "missing input item"))?;
        let pattern_text: Vec<&str> = left.collect();
        let pattern = parse_pattern(line, &pattern_text.join(" "), &store.values)?;

        let right: Vec<&str> = rhs.split_whitespace().collect();
        let (to, op) = match right.as_slice() {
            [to, "pop", j] => (*to, Op::Pop(parse_level(line, j)?)),
            [to, "push", j, word @ ..] => (*to, Op::Push(parse_level(line, j)?, word.to_vec())),
            _ => return Err(syntax(line, "expected `STATE pop J` or `STATE push J WORD`")),
        };
        let input = if input == EPSILON { None } else { Some(input) };
        let pattern: Vec<&str> = pattern.iter().map(String::as_str).collect();
        builder = builder
            .transition(from, input, &pattern, to, op)
            .map_err(at(line))?;
    }
    builder.build().map_err(at(last_line))
}

fn parse_level(line: usize, text: &str) -> Result<usize, FormatError> {
    text.parse()
        .map_err(|_| syntax(line, format!("invalid level `{text}`")))
}

fn parse_pattern(line: usize, text: &str, declared: &[&str]) -> Result<Vec<String>, FormatError> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| syntax(line, "unterminated `[` in pattern"))?;
        return Ok(inner.split_whitespace().map(str::to_string).collect());
    }
    if text.is_empty() {
        return Err(syntax(line, "missing pattern"));
    }
    if text.contains(char::is_whitespace) {
        return Err(syntax(line, "patterns with spaces must be bracketed"));
    }
    if declared.contains(&text) {
        return Ok(vec![text.to_string()]);
    }
    Ok(text.chars().map(|c| c.to_string()).collect())
}

pub fn render_automaton(a: &Automaton) -> String {
    let multi = a.symbols().iter().any(|s| s.as_str().chars().count() > 1);
    let mut out = String::new();
    let _ = writeln!(out, "levels: {}", a.levels());
    let _ = writeln!(out, "states: {}", a.states().join(" "));
    let _ = writeln!(out, "initial: {}", a.state_name(a.initial_state()));
    let _ = writeln!(out, "input: {}", a.letters().join(" ").trim_end());
    let symbols: Vec<&str> = a.symbols().iter().map(|s| s.as_str()).collect();
    let _ = writeln!(out, "store: {}", symbols.join(" "));
    let _ = writeln!(out, "start_symbol: {}", a.symbol_name(a.start_symbol()));
    for t in a.transitions() {
        let names: Vec<&str> = t.pattern.iter().map(|s| a.symbol_name(*s)).collect();
        let pattern = if multi {
            format!("[{}]", names.join(" "))
        } else {
            names.concat()
        };
        let input = t.input.map_or(EPSILON, |l| a.letter_name(l));
        let action = match &t.action {
            Action::Pop(j) => format!("pop {j}"),
            Action::Push(j, word) => {
                let mut s = format!("push {j}");
                for sym in word {
                    s.push(' ');
                    s.push_str(a.symbol_name(*sym));
                }
                s
            }
        };
        let _ = writeln!(
            out,
            "t: {} {} {} -> {} {}",
            a.state_name(t.from),
            input,
            pattern,
            a.state_name(t.to),
            action
        );
    }
    out.lines()
        .map(str::trim_end)
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}
