//! Runs a built automaton against the contour oracle: positives per level,
//! seeded single-edit mutations, and optionally the full language up to a
//! length.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;
use std::time::Instant;

use serde::Serialize;

use crate::builders::{ball_automaton, sector_automaton, BuildError, Variant};
use crate::contour::{mutate, ContourError, ContourKind, ContourSpec};
use crate::grammar::render_word;
use crate::machine::{Automaton, Engine, SearchBounds, Verdict};

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub spec: ContourSpec,
    pub variant: Variant,
    pub levels: RangeInclusive<usize>,
    pub mutations: usize,
    pub seed: u64,
    pub exhaustive_len: Option<usize>,
    pub max_store: Option<usize>,
    pub max_configs: Option<usize>,
}

impl CheckConfig {
    pub fn new(spec: ContourSpec) -> Self {
        let start = spec.min_level();
        CheckConfig {
            spec,
            variant: Variant::Corrected,
            levels: start..=start + 4,
            mutations: 20,
            seed: 0,
            exhaustive_len: None,
            max_store: None,
            max_configs: None,
        }
    }

    fn bounds(&self, len: usize) -> SearchBounds {
        let mut b = SearchBounds::default_for(len);
        if let Some(s) = self.max_store {
            b.max_store_symbols = Some(s);
        }
        if let Some(c) = self.max_configs {
            b.max_configurations = Some(c);
        }
        b
    }

    pub fn automaton(&self) -> Result<Automaton, BuildError> {
        let sys = &self.spec.system;
        let root = sys.label(self.spec.root);
        match self.spec.kind {
            ContourKind::Ball => ball_automaton(sys, root, self.spec.sigma, self.variant),
            ContourKind::Sector => sector_automaton(sys, root, self.variant),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub level: usize,
    pub len: usize,
    /// Verdict on the contour word.
    pub positive: String,
    pub mutations: usize,
    /// Mutations that got the expected verdict.
    pub rejected: usize,
    pub millis: u128,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.positive == "accepted" && self.rejected == self.mutations
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExhaustiveRow {
    pub max_len: usize,
    pub complete: bool,
    pub expected: usize,
    pub accepted: usize,
    /// Accepted words that are no contour word, then contour words that
    /// were not accepted.
    pub unexpected: Vec<String>,
    pub missing: Vec<String>,
    pub millis: u128,
}

impl ExhaustiveRow {
    pub fn passed(&self) -> bool {
        self.complete && self.unexpected.is_empty() && self.missing.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    pub exhaustive: Option<ExhaustiveRow>,
    pub pass: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error("contour word at level {0} is too long to materialise")]
    TooLong(usize),
}

/// True when `word` is the contour word at some level.
fn is_oracle_word(spec: &ContourSpec, word: &[String]) -> Result<bool, CheckError> {
    let mut level = spec.min_level();
    loop {
        let len = spec.length(level)?;
        if len > word.len().into() {
            return Ok(false);
        }
        if len == word.len().into() && spec.word(level)? == word {
            return Ok(true);
        }
        level += 1;
    }
}

pub fn run_check(config: &CheckConfig) -> Result<CheckReport, CheckError> {
    let automaton = config.automaton()?;
    let engine = Engine::new(&automaton);
    let alphabet = config.spec.alphabet();
    let encode = |w: &[String]| {
        automaton
            .encode_input(w)
            .expect("contour letters belong to the automaton alphabet")
    };

    let mut rows = Vec::new();
    for level in config.levels.clone() {
        let started = Instant::now();
        let len = config.spec.length(level)?;
        let len: usize = len.try_into().map_err(|_| CheckError::TooLong(level))?;
        let word = config.spec.word(level)?;
        let positive = engine.accepts(&encode(&word), config.bounds(len));

        let mut rejected = 0;
        let seed = config.seed.wrapping_add(level as u64);
        let variants = mutate(&word, &alphabet, seed, config.mutations);
        for m in &variants {
            let expect_accept = is_oracle_word(&config.spec, m)?;
            let verdict = engine.accepts(&encode(m), config.bounds(m.len()));
            let ok = match verdict {
                Verdict::Accepted(_) => expect_accept,
                Verdict::Rejected => !expect_accept,
                Verdict::Inconclusive => false,
            };
            rejected += usize::from(ok);
        }
        rows.push(CheckRow {
            level,
            len,
            positive: positive.name().to_string(),
            mutations: variants.len(),
            rejected,
            millis: started.elapsed().as_millis(),
        });
    }

    let exhaustive = match config.exhaustive_len {
        None => None,
        Some(max_len) => Some(exhaustive(config, &engine, max_len)?),
    };
    let pass = rows.iter().all(CheckRow::passed) && exhaustive.as_ref().is_none_or(ExhaustiveRow::passed);
    Ok(CheckReport {
        rows,
        exhaustive,
        pass,
    })
}

fn exhaustive(config: &CheckConfig, engine: &Engine<'_>, max_len: usize) -> Result<ExhaustiveRow, CheckError> {
    let started = Instant::now();
    let a = engine.automaton();
    let mut expected = BTreeSet::new();
    let mut level = config.spec.min_level();
    while config.spec.length(level)? <= max_len.into() {
        let word = config.spec.word(level)?;
        expected.insert(a.encode_input(&word).expect("contour letters are declared"));
        level += 1;
    }
    let mut bounds = SearchBounds::default_for(max_len);
    if let Some(c) = config.max_configs {
        bounds.max_configurations = Some(c);
    }
    if let Some(s) = config.max_store {
        bounds.max_store_symbols = Some(s);
    }
    let language = engine.language(max_len, bounds);
    let render = |w: &Vec<_>| {
        let letters: Vec<&str> = w.iter().map(|l| a.letter_name(*l)).collect();
        render_word(&letters)
    };
    Ok(ExhaustiveRow {
        max_len,
        complete: language.complete,
        expected: expected.len(),
        accepted: language.words.len(),
        unexpected: language.words.difference(&expected).map(render).collect(),
        missing: expected.difference(&language.words).map(render).collect(),
        millis: started.elapsed().as_millis(),
    })
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>5} {:>10} {:>12} {:>9} {:>8} {:>8}",
            "level", "len", "positive", "mutations", "rejected", "millis"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>5} {:>10} {:>12} {:>9} {:>8} {:>8}",
                r.level, r.len, r.positive, r.mutations, r.rejected, r.millis
            )?;
        }
        if let Some(e) = &self.exhaustive {
            writeln!(
                f,
                "exhaustive up to {}: {} expected, {} accepted, complete {}, {} ms",
                e.max_len, e.expected, e.accepted, e.complete, e.millis
            )?;
            for w in &e.unexpected {
                writeln!(f, "  unexpected: {w}")?;
            }
            for w in &e.missing {
                writeln!(f, "  missing: {w}")?;
            }
        }
        writeln!(f, "{}", if self.pass { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::fibonacci;

    #[test]
    fn fibonacci_ball_passes() {
        let mut c = CheckConfig::new(ContourSpec::ball(fibonacci(), "W", 5).unwrap());
        c.levels = 0..=3;
        c.mutations = 10;
        c.exhaustive_len = Some(10);
        let report = run_check(&c).unwrap();
        assert!(report.pass, "{report}");
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.rows[2].len, 40);
        let e = report.exhaustive.unwrap();
        assert_eq!((e.expected, e.accepted), (1, 1));
    }

    #[test]
    fn printed_ball_fails_at_level_two() {
        let mut c = CheckConfig::new(ContourSpec::ball(fibonacci(), "W", 5).unwrap());
        c.variant = Variant::AsPrinted;
        c.levels = 0..=3;
        c.mutations = 5;
        let report = run_check(&c).unwrap();
        assert!(!report.pass);
        let failing: Vec<usize> = report.rows.iter().filter(|r| !r.passed()).map(|r| r.level).collect();
        assert_eq!(failing, vec![2]);
    }

    #[test]
    fn json_field_names() {
        let mut c = CheckConfig::new(ContourSpec::sector(fibonacci(), "W").unwrap());
        c.levels = 1..=1;
        c.mutations = 2;
        let json = serde_json::to_value(run_check(&c).unwrap()).unwrap();
        let row = &json["rows"][0];
        for key in ["level", "len", "positive", "mutations", "rejected", "millis"] {
            assert!(row.get(key).is_some(), "{key}");
        }
        assert_eq!(json["pass"], true);
    }
}
