//! Acceptance suite. Each check prints one PASS or FAIL line; the process
//! exits non-zero when any check fails.
//!
//! Expected values come from the helpers in this file (Fibonacci
//! iteration, direct string rewriting, hand-copied tables), never from the
//! library code under test.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use hyperpda::builders::{ball_automaton, fibonacci_automaton, sector_automaton, Variant};
use hyperpda::check::{run_check, CheckConfig};
use hyperpda::contour::{mutate, ContourSpec};
use hyperpda::grammar::{self, cell120, dodecahedral, fibonacci, polygonal};
use hyperpda::machine::{Automaton, Configuration, Engine, Goal, SearchBounds, Verdict};
use hyperpda::store::Store;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1, 1, 2, 3, 5, ... up to `limit`.
fn fib_upto(limit: usize) -> Vec<usize> {
    let mut out = vec![1, 1];
    while out[out.len() - 1] + out[out.len() - 2] <= limit {
        out.push(out[out.len() - 1] + out[out.len() - 2]);
    }
    out
}

/// Rewrites every character with `rules` `level` times.
fn rewrite(rules: &[(char, &str)], root: char, level: usize) -> String {
    let mut word = root.to_string();
    for _ in 0..level {
        word = word
            .chars()
            .map(|c| rules.iter().find(|(l, _)| *l == c).unwrap().1)
            .collect();
    }
    word
}

fn polygonal_rules(p: usize) -> Vec<(char, String)> {
    vec![
        ('B', format!("B{}", "W".repeat(p - 4))),
        ('W', format!("B{}", "W".repeat(p - 3))),
    ]
}

fn rewrite_owned(rules: &[(char, String)], root: char, level: usize) -> String {
    let borrowed: Vec<(char, &str)> = rules.iter().map(|(c, s)| (*c, s.as_str())).collect();
    rewrite(&borrowed, root, level)
}

const DODECA_RULES: [(char, &str); 4] = [('O', "OOOOOCCCT"), ('H', "OOOOCCCT"), ('C', "OOOCCCT"), ('T', "OOHCCT")];

fn letters(word: &str) -> Vec<String> {
    word.chars().map(|c| c.to_ascii_lowercase().to_string()).collect()
}

fn verdict(a: &Automaton, word: &[String]) -> Verdict {
    let input = a.encode_input(word).expect("letters are declared");
    Engine::new(a).accepts(&input, SearchBounds::default_for(input.len()))
}

fn expect_accepted(a: &Automaton, word: &[String], what: &str) -> Result<(), String> {
    match verdict(a, word) {
        Verdict::Accepted(_) => Ok(()),
        v => Err(format!("{what}: {v}")),
    }
}

/// Every mutation must be rejected unless it happens to be another
/// contour word in `oracle`.
fn expect_mutations_rejected(
    a: &Automaton,
    word: &[String],
    alphabet: &[String],
    seed: u64,
    count: usize,
    oracle: &BTreeSet<Vec<String>>,
    what: &str,
) -> Result<usize, String> {
    let mut rejected = 0;
    for m in mutate(word, alphabet, seed, count) {
        ensure(m.as_slice() != word, || format!("{what}: mutation equals the word"))?;
        let expected_accept = oracle.contains(&m);
        match (verdict(a, &m), expected_accept) {
            (Verdict::Rejected, false) => rejected += 1,
            (Verdict::Accepted(_), true) => {}
            (v, _) => return Err(format!("{what}: mutation {} gave {v}", m.concat())),
        }
    }
    Ok(rejected)
}

fn within(started: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let spent = started.elapsed();
    ensure(spent < limit, || format!("{what} took {spent:.1?}, limit {limit:?}"))
}

fn fibonacci_lengths() -> Outcome {
    let started = Instant::now();
    let fibs: BTreeSet<usize> = fib_upto(377).into_iter().collect();
    let a = fibonacci_automaton(Variant::Corrected);
    let mut accepted = Vec::new();
    for n in 1..=377 {
        match verdict(&a, &vec!["a".to_string(); n]) {
            Verdict::Accepted(_) => accepted.push(n),
            Verdict::Rejected => {}
            Verdict::Inconclusive => return Err(format!("a^{n} inconclusive")),
        }
    }
    let want: Vec<usize> = fibs.into_iter().collect();
    ensure(accepted == want, || format!("accepted {accepted:?}"))?;
    within(started, Duration::from_secs(60), "sweep")?;
    Ok(format!("377 lengths, {} accepted, {:.1?}", accepted.len(), started.elapsed()))
}

fn configuration(a: &Automaton, position: usize, store: &str) -> Configuration {
    Configuration {
        state: a.state_id("q0").unwrap(),
        position,
        store: a
            .encode_store(&Store::parse(store, 2).unwrap())
            .unwrap(),
    }
}

fn element(symbol: &str, height: usize) -> String {
    if height == 0 {
        symbol.to_string()
    } else {
        format!("{symbol}[{}]", vec!["F"; height].join("."))
    }
}

fn fibonacci_relations() -> Outcome {
    let a = fibonacci_automaton(Variant::Corrected);
    let f = fib_upto(1000);
    let engine = Engine::new(&a);
    for k in 0..=10 {
        for (top, n) in [("X2", f[k]), ("X1", f[k + 1])] {
            let input = a.encode_input(&vec!["a"; n]).unwrap();
            let from = configuration(&a, 0, &element(top, k));
            let goal = Goal::Exact(configuration(&a, n, "e"));
            let v = engine.search(from, &input, &goal, SearchBounds::default_for(n));
            ensure(v.is_accepted(), || format!("{top}[F^{k}] with a^{n}: {v}"))?;
        }
    }
    Ok("k = 0..10, both relations".into())
}

fn caption_strings() -> Outcome {
    let sys = fibonacci();
    let w = sys.label_index("W").unwrap();
    let lw = grammar::render_word(&sys.read_word(&sys.level_word(w, 2)));
    ensure(lw == "bwbwwbww", || format!("level word {lw}"))?;
    let white = ContourSpec::sector(fibonacci(), "W").unwrap().word(2).unwrap().concat();
    ensure(white == "rssbwbwwbwwss", || format!("white sector {white}"))?;
    let black = ContourSpec::sector(fibonacci(), "B").unwrap().word(2).unwrap().concat();
    ensure(black == "rssbwbwwss", || format!("black sector {black}"))?;
    Ok("3 strings equal".into())
}

fn ball_word(rules: &[(char, String)], root: char, level: usize, sigma: usize) -> Vec<String> {
    letters(&rewrite_owned(rules, root, level).repeat(sigma))
}

fn planar_balls() -> Outcome {
    let started = Instant::now();
    let cases = [(5, 5), (5, 7), (6, 6), (6, 8), (7, 7), (7, 9)];
    let mut total_mutations = 0;
    let mut longest = 0;
    for (p, sigma) in cases {
        let sys = polygonal(p).unwrap();
        let a = ball_automaton(&sys, "W", sigma, Variant::Corrected).map_err(|e| e.to_string())?;
        let rules = polygonal_rules(p);
        let oracle: BTreeSet<Vec<String>> = (0..=6).map(|l| ball_word(&rules, 'W', l, sigma)).collect();
        let alphabet = vec!["b".to_string(), "w".to_string()];
        for level in 0..=8 {
            let word = ball_word(&rules, 'W', level, sigma);
            longest = longest.max(word.len());
            let what = format!("p={p} sigma={sigma} level {level}");
            expect_accepted(&a, &word, &what)?;
            if level <= 5 {
                let seed = 1000 * p as u64 + 10 * sigma as u64 + level as u64;
                total_mutations += expect_mutations_rejected(&a, &word, &alphabet, seed, 100, &oracle, &what)?;
            }
        }
    }
    within(started, Duration::from_secs(300), "ball sweep")?;
    Ok(format!(
        "6 tilings, levels 0..8, {total_mutations} mutations rejected, longest word {longest}, {:.1?}",
        started.elapsed()
    ))
}

fn all_words(alphabet: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |c| {
                    let mut next = w.clone();
                    next.push(c.to_string());
                    next
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn sector_word(rules: &[(char, String)], root: char, level: usize) -> Vec<String> {
    let side = "s".repeat(level);
    letters(&format!("r{side}{}{side}", rewrite_owned(rules, root, level)))
}

/// Compares the accepted language up to `max_len` with `oracle`, and
/// additionally runs every word up to `per_word` letters one by one.
fn sweep(a: &Automaton, alphabet: &[&str], oracle: &BTreeSet<Vec<String>>, max_len: usize, per_word: usize) -> Result<(), String> {
    let language = Engine::new(a).language(max_len, SearchBounds::default_for(max_len));
    ensure(language.complete, || "language enumeration hit a bound".into())?;
    let found: BTreeSet<Vec<String>> = language
        .words
        .iter()
        .map(|w| w.iter().map(|l| a.letter_name(*l).to_string()).collect())
        .collect();
    ensure(&found == oracle, || format!("accepted {found:?}, expected {oracle:?}"))?;
    for word in all_words(alphabet, per_word) {
        let v = verdict(a, &word);
        ensure(v != Verdict::Inconclusive, || format!("{} inconclusive", word.concat()))?;
        ensure(v.is_accepted() == oracle.contains(&word), || format!("{}: {v}", word.concat()))?;
    }
    Ok(())
}

fn completeness() -> Outcome {
    let started = Instant::now();
    let rules = polygonal_rules(5);
    let max_len = 14;

    let ball = ball_automaton(&fibonacci(), "W", 5, Variant::Corrected).map_err(|e| e.to_string())?;
    let oracle: BTreeSet<Vec<String>> = (0..4)
        .map(|l| ball_word(&rules, 'W', l, 5))
        .filter(|w| w.len() <= max_len)
        .collect();
    sweep(&ball, &["b", "w"], &oracle, max_len, max_len).map_err(|e| format!("ball: {e}"))?;
    let mut expected = oracle.len();

    for root in ['W', 'B'] {
        let a = sector_automaton(&fibonacci(), &root.to_string(), Variant::Corrected).map_err(|e| e.to_string())?;
        let oracle: BTreeSet<Vec<String>> = (1..6)
            .map(|l| sector_word(&rules, root, l))
            .filter(|w| w.len() <= max_len)
            .collect();
        expected += oracle.len();
        sweep(&a, &["r", "s", "b", "w"], &oracle, max_len, 8).map_err(|e| format!("sector {root}: {e}"))?;
    }
    Ok(format!(
        "3 automata, lengths <= {max_len}, {expected} contour words, {:.1?}",
        started.elapsed()
    ))
}

fn count_law() -> Outcome {
    let sys = fibonacci();
    let w = sys.label_index("W").unwrap();
    let mut fib = vec![BigUint::from(1u32), BigUint::from(1u32)];
    while fib.len() < 2 * 50 + 2 {
        let next = &fib[fib.len() - 1] + &fib[fib.len() - 2];
        fib.push(next);
    }
    for level in 0..=50 {
        let total = sys.level_total(w, level);
        ensure(total == fib[2 * level + 1], || format!("level {level}: {total}"))?;
    }
    let rules = polygonal_rules(5);
    for level in 0..=12 {
        let direct = rewrite_owned(&rules, 'W', level).len();
        ensure(fib[2 * level + 1] == direct.into(), || format!("expansion at level {level}: {direct}"))?;
    }
    Ok(format!("levels 0..50 (total at 50 = {})", fib[101]))
}

fn dodecagrid() -> Outcome {
    let started = Instant::now();
    let sys = dodecahedral();
    let o = sys.label_index("O").unwrap();
    let lw1 = sys.label_word(&sys.level_word(o, 1)).concat();
    ensure(lw1 == "OOOOOCCCT", || format!("level word {lw1}"))?;
    for level in 0..=6 {
        for root in ['O', 'H', 'C', 'T'] {
            let direct = rewrite(&DODECA_RULES, root, level).len();
            let total = sys.level_total(sys.label_index(&root.to_string()).unwrap(), level);
            ensure(total == direct.into(), || format!("{root} level {level}: {total} vs {direct}"))?;
        }
    }
    let a = ball_automaton(&sys, "O", 8, Variant::Corrected).map_err(|e| e.to_string())?;
    let ball = |l: usize| letters(&rewrite(&DODECA_RULES, 'O', l).repeat(8));
    let oracle: BTreeSet<Vec<String>> = (0..=4).map(ball).collect();
    let alphabet: Vec<String> = ["o", "h", "c", "t"].map(String::from).to_vec();
    let mut rejected = 0;
    for level in 0..=5 {
        let word = ball(level);
        expect_accepted(&a, &word, &format!("ball level {level}"))?;
        if level <= 3 {
            rejected += expect_mutations_rejected(&a, &word, &alphabet, 77 + level as u64, 50, &oracle, "dodeca")?;
        }
    }
    Ok(format!("levels 0..5 accepted, {rejected} mutations rejected, {:.1?}", started.elapsed()))
}

const TABLE: &[(&str, [usize; 11])] = &[
    ("9", [6, 10, 21, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("8", [5, 10, 21, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("7", [4, 10, 21, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("6a", [3, 11, 20, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("6b", [2, 12, 20, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("5", [2, 11, 20, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("4", [2, 10, 20, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("3", [1, 11, 19, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("2", [1, 10, 19, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("1", [1, 10, 18, 35, 3, 19, 14, 5, 1, 1, 1]),
    ("0", [1, 10, 18, 34, 3, 19, 14, 5, 1, 1, 1]),
];

/// Level word of the 120-cell tree as label indices, children in column
/// order.
fn cell_level(root: usize, level: usize) -> Vec<usize> {
    let mut word = vec![root];
    for _ in 0..level {
        word = word
            .iter()
            .flat_map(|&x| TABLE[x].1.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)))
            .collect();
    }
    word
}

fn cell120_grid() -> Outcome {
    let sys = cell120();
    let matrix = sys.count_matrix();
    for (label, row) in TABLE {
        let got = matrix.row(label).ok_or_else(|| format!("missing row {label}"))?;
        ensure(got == row, || format!("row {label}: {got:?}"))?;
    }
    let (labels, _) = grammar::parse_count_table(grammar::cell120_table()).map_err(|e| e.to_string())?;
    let wanted: Vec<&str> = TABLE.iter().map(|(l, _)| *l).collect();
    ensure(labels == wanted, || format!("labels {labels:?}"))?;
    let row_sum: usize = TABLE[0].1.iter().sum();
    ensure(row_sum == 116, || format!("row sum {row_sum}"))?;
    let total = sys.level_total(0, 1);
    ensure(total == 116u32.into(), || format!("level 1 total {total}"))?;

    let read = |w: &[usize]| -> Vec<String> { w.iter().map(|&x| TABLE[x].0.to_string()).collect() };
    let ball = ball_automaton(&sys, "9", 16, Variant::Corrected).map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for level in 1..=2 {
        let one = read(&cell_level(0, level));
        let word: Vec<String> = one.iter().cycle().take(16 * one.len()).cloned().collect();
        expect_accepted(&ball, &word, &format!("ball level {level}"))?;
        sizes.push(word.len());
    }
    let started = Instant::now();
    let single = ball_automaton(&sys, "9", 1, Variant::Corrected).map_err(|e| e.to_string())?;
    let word = read(&cell_level(0, 3));
    expect_accepted(&single, &word, "sector level 3")?;
    let spent = started.elapsed();
    within(started, Duration::from_secs(120), "level 3 sector")?;
    Ok(format!(
        "table matches, ball words of {} and {} letters accepted, level 3 sector ({} letters) in {spent:.1?}",
        sizes[0],
        sizes[1],
        word.len()
    ))
}

fn printed_variant() -> Outcome {
    let a = fibonacci_automaton(Variant::AsPrinted);
    let two = verdict(&a, &["a".to_string(), "a".to_string()]);
    ensure(two == Verdict::Rejected, || format!("a^2: {two}"))?;
    let one = verdict(&a, &["a".to_string()]);
    ensure(one.is_accepted(), || format!("a: {one}"))?;

    let mut config = CheckConfig::new(ContourSpec::ball(fibonacci(), "W", 5).unwrap());
    config.variant = Variant::AsPrinted;
    config.levels = 0..=3;
    config.mutations = 10;
    let report = run_check(&config).map_err(|e| e.to_string())?;
    ensure(!report.pass, || "as-printed ball check passed".into())?;
    let first_failure = report.rows.iter().find(|r| !r.passed()).map(|r| r.level);
    ensure(first_failure == Some(2), || format!("first failing level {first_failure:?}"))?;
    let corrected = {
        config.variant = Variant::Corrected;
        run_check(&config).map_err(|e| e.to_string())?
    };
    ensure(corrected.pass, || "corrected ball check failed".into())?;
    Ok("a^2 rejected, ball check fails first at level 2".into())
}

fn main() {
    // Keep the filter arguments cargo passes from breaking the run.
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let checks: [Check; 9] = [
        ("fibonacci-lengths", fibonacci_lengths),
        ("fibonacci-relations", fibonacci_relations),
        ("caption-strings", caption_strings),
        ("planar-balls", planar_balls),
        ("completeness-sweep", completeness),
        ("count-law", count_law),
        ("dodecagrid", dodecagrid),
        ("cell120-grid", cell120_grid),
        ("as-printed-variant", printed_variant),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
