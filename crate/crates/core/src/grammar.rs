//! Label substitution systems generating the spanning trees of the tilings.
//!
//! Level `l` of the tree rooted at `x` is the word obtained from `x` by `l`
//! rounds of parallel substitution. Counts per label follow from the count
//! matrix and are kept as big integers.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

const CELL120_TABLE: &str = include_str!("../data/cell120.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{0}` declared twice")]
    DuplicateLabel(String),
    #[error("label `{0}` has no rule")]
    MissingRule(String),
    #[error("rule for `{0}` is empty")]
    EmptyRule(String),
    #[error("polygonal systems need p >= 5, got {0}")]
    PolygonTooSmall(usize),
    #[error("unknown system `{0}` (expected fib, polygonal:<p>, dodeca or cell120)")]
    UnknownSystem(String),
    #[error("bad count table: {0}")]
    Table(String),
}

/// Which tiling a system spans; decides the default sector multiplicities
/// and whether sector contours carry side markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// The `{p,4}` and `{p+2,3}` tilings; `p = 5` is the Fibonacci tree.
    Polygonal(usize),
    Dodecahedral,
    Cell120,
    Custom,
}

impl Family {
    /// Sector counts of the balls of this family.
    pub fn multiplicities(self) -> Vec<usize> {
        match self {
            Family::Polygonal(p) => vec![p, p + 2],
            Family::Dodecahedral => vec![8],
            Family::Cell120 => vec![16],
            Family::Custom => vec![],
        }
    }

    /// Planar sectors are bounded by marked side branches.
    pub fn marks_sides(self) -> bool {
        matches!(self, Family::Polygonal(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionSystem {
    family: Family,
    labels: Vec<String>,
    rules: Vec<Vec<usize>>,
    read: Vec<String>,
}

impl SubstitutionSystem {
    /// `rules[i]` and `read[i]` belong to `labels[i]`; rule words name
    /// labels.
    pub fn new(
        family: Family,
        labels: &[&str],
        rules: &[&[&str]],
        read: &[&str],
    ) -> Result<Self, GrammarError> {
        let mut names: Vec<String> = Vec::with_capacity(labels.len());
        for label in labels {
            if names.iter().any(|n| n == label) {
                return Err(GrammarError::DuplicateLabel(label.to_string()));
            }
            names.push(label.to_string());
        }
        if rules.len() < names.len() || read.len() < names.len() {
            let missing = names[rules.len().min(read.len())].clone();
            return Err(GrammarError::MissingRule(missing));
        }
        let index = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| GrammarError::UnknownLabel(s.to_string()))
        };
        let mut parsed = Vec::with_capacity(names.len());
        for (label, rule) in names.iter().zip(rules) {
            if rule.is_empty() {
                return Err(GrammarError::EmptyRule(label.clone()));
            }
            parsed.push(rule.iter().map(|s| index(s)).collect::<Result<Vec<_>, _>>()?);
        }
        Ok(SubstitutionSystem {
            family,
            labels: names,
            rules: parsed,
            read: read.iter().take(labels.len()).map(|s| s.to_string()).collect(),
        })
    }

    fn from_counts(family: Family, labels: &[&str], counts: &[Vec<usize>], read: &[&str]) -> Self {
        let rules: Vec<Vec<usize>> = counts
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .flat_map(|(col, &n)| std::iter::repeat_n(col, n))
                    .collect()
            })
            .collect();
        SubstitutionSystem {
            family,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            rules,
            read: read.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn label_index(&self, name: &str) -> Result<usize, GrammarError> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| GrammarError::UnknownLabel(name.to_string()))
    }

    pub fn rule(&self, label: usize) -> &[usize] {
        &self.rules[label]
    }

    pub fn read_letter(&self, label: usize) -> &str {
        &self.read[label]
    }

    /// Distinct read letters in label order.
    pub fn terminals(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.read {
            if !out.contains(r) {
                out.push(r.clone());
            }
        }
        out
    }

    pub fn count_matrix(&self) -> CountMatrix {
        let n = self.labels.len();
        let mut entries = vec![vec![0usize; n]; n];
        for (x, rule) in self.rules.iter().enumerate() {
            for &y in rule {
                entries[x][y] += 1;
            }
        }
        CountMatrix {
            labels: self.labels.clone(),
            entries,
        }
    }

    /// Emits level `level` of the tree rooted at `root`, left to right,
    /// without materialising intermediate levels.
    pub fn for_each_level_label<F: FnMut(usize)>(&self, root: usize, level: usize, mut emit: F) {
        if level == 0 {
            emit(root);
            return;
        }
        let mut stack: Vec<(&[usize], usize)> = vec![(&self.rules[root], 0)];
        while let Some((word, i)) = stack.last_mut() {
            if *i == word.len() {
                stack.pop();
                continue;
            }
            let x = word[*i];
            *i += 1;
            if stack.len() == level {
                emit(x);
            } else {
                stack.push((&self.rules[x], 0));
            }
        }
    }

    pub fn level_word(&self, root: usize, level: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_level_label(root, level, |x| out.push(x));
        out
    }

    /// One round of parallel substitution.
    pub fn substitute(&self, word: &[usize]) -> Vec<usize> {
        word.iter()
            .flat_map(|&x| self.rules[x].iter().copied())
            .collect()
    }

    pub fn read_word(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&x| self.read[x].clone()).collect()
    }

    pub fn label_word(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&x| self.labels[x].clone()).collect()
    }

    /// Label counts of level `level`, by label index.
    pub fn level_counts(&self, root: usize, level: usize) -> Vec<BigUint> {
        let m = self.count_matrix();
        let n = self.labels.len();
        let mut v = vec![BigUint::zero(); n];
        v[root] = BigUint::one();
        for _ in 0..level {
            let mut next = vec![BigUint::zero(); n];
            for (x, vx) in v.iter().enumerate() {
                if vx.is_zero() {
                    continue;
                }
                for (y, &c) in m.entries[x].iter().enumerate() {
                    if c != 0 {
                        next[y] += vx * c;
                    }
                }
            }
            v = next;
        }
        v
    }

    pub fn level_total(&self, root: usize, level: usize) -> BigUint {
        self.level_counts(root, level).into_iter().sum()
    }
}

/// `entries[x][y]` = occurrences of label `y` in the rule of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<usize>>,
}

impl CountMatrix {
    pub fn row(&self, label: &str) -> Option<&[usize]> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(&self.entries[i])
    }

    pub fn row_sum(&self, label: &str) -> Option<usize> {
        self.row(label).map(|r| r.iter().sum())
    }
}

impl fmt::Display for CountMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, row) in self.labels.iter().zip(&self.entries) {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            writeln!(f, "{label}: {}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `W -> B W^(p-3)`, `B -> B W^(p-4)`.
pub fn polygonal(p: usize) -> Result<SubstitutionSystem, GrammarError> {
    if p < 5 {
        return Err(GrammarError::PolygonTooSmall(p));
    }
    Ok(SubstitutionSystem::from_counts(
        Family::Polygonal(p),
        &["B", "W"],
        &[vec![1, p - 4], vec![1, p - 3]],
        &["b", "w"],
    ))
}

/// `B -> BW`, `W -> BWW`.
pub fn fibonacci() -> SubstitutionSystem {
    polygonal(5).expect("p = 5 is valid")
}

pub fn dodecahedral() -> SubstitutionSystem {
    SubstitutionSystem::new(
        Family::Dodecahedral,
        &["O", "H", "C", "T"],
        &[
            &["O", "O", "O", "O", "O", "C", "C", "C", "T"],
            &["O", "O", "O", "O", "C", "C", "C", "T"],
            &["O", "O", "O", "C", "C", "C", "T"],
            &["O", "O", "H", "C", "C", "T"],
        ],
        &["o", "h", "c", "t"],
    )
    .expect("dodecahedral rules are well formed")
}

/// Rule words list each column label as often as its count, in column
/// order.
pub fn cell120() -> SubstitutionSystem {
    let (labels, counts) = parse_count_table(CELL120_TABLE).expect("embedded table is valid");
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    SubstitutionSystem::from_counts(Family::Cell120, &labels, &counts, &labels)
}

/// Raw text of the embedded 120-cell count table.
pub fn cell120_table() -> &'static str {
    CELL120_TABLE
}

/// Parses `label: n1 n2 ...` lines; `#` starts a comment.
pub fn parse_count_table(text: &str) -> Result<(Vec<String>, Vec<Vec<usize>>), GrammarError> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (label, counts) = line
            .split_once(':')
            .ok_or_else(|| GrammarError::Table(format!("missing `:` in `{line}`")))?;
        let counts = counts
            .split_whitespace()
            .map(|c| {
                c.parse::<usize>()
                    .map_err(|_| GrammarError::Table(format!("bad count `{c}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        labels.push(label.trim().to_string());
        rows.push(counts);
    }
    if rows.iter().any(|r| r.len() != labels.len()) {
        return Err(GrammarError::Table("table is not square".into()));
    }
    if let Some(i) = rows.iter().position(|r| r.iter().all(|&c| c == 0)) {
        return Err(GrammarError::EmptyRule(labels[i].clone()));
    }
    Ok((labels, rows))
}

/// Looks up a builtin system: `fib`, `polygonal:<p>` (or `p<p>`), `dodeca`,
/// `cell120`.
pub fn builtin(name: &str) -> Result<SubstitutionSystem, GrammarError> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "fib" | "fibonacci" | "pentagrid" | "heptagrid" => Ok(fibonacci()),
        "dodeca" | "dodecahedral" | "dodecagrid" => Ok(dodecahedral()),
        "cell120" | "120cell" | "120-cell" => Ok(cell120()),
        _ => {
            let p = lower
                .strip_prefix("polygonal:")
                .or_else(|| lower.strip_prefix('p'))
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| GrammarError::UnknownSystem(name.to_string()))?;
            polygonal(p)
        }
    }
}

/// Single-character alphabets render contiguously, others space-separated.
pub fn render_word<S: AsRef<str>>(word: &[S]) -> String {
    if word.iter().all(|t| t.as_ref().chars().count() == 1) {
        word.iter().map(AsRef::as_ref).collect()
    } else {
        word.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
    }
}

/// Inverse of [`render_word`]: whitespace-separated tokens when the text
/// contains whitespace, single characters otherwise.
pub fn parse_word(text: &str) -> Vec<String> {
    let text = text.trim();
    if text.contains(char::is_whitespace) {
        text.split_whitespace().map(str::to_string).collect()
    } else {
        text.chars().map(|c| c.to_string()).collect()
    }
}

/// `label: value` per label, then `total: value`.
pub fn render_counts(sys: &SubstitutionSystem, counts: &[BigUint]) -> String {
    let mut out = String::new();
    for (label, c) in sys.labels().iter().zip(counts) {
        out.push_str(&format!("{label}: {c}\n"));
    }
    let total: BigUint = counts.iter().sum();
    out.push_str(&format!("total: {total}\n"));
    out
}
