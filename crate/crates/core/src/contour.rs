//! Contour words of balls and truncated sectors.
//!
//! A ball contour at level `l` is the level word of one sector, read
//! letterwise, repeated once per sector. A planar sector contour is
//! `r s^l lw(l) s^l`: the root marker, the left branch, the bottom level and
//! the right branch. Sectors of the 3D and 4D grids carry no side markers
//! and their contour is the bottom level word.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grammar::{GrammarError, SubstitutionSystem};

/// Terminal letter marking the root of a planar sector.
pub const ROOT_MARK: &str = "r";
/// Terminal letter marking a side-branch tile of a planar sector.
pub const SIDE_MARK: &str = "s";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContourError {
    #[error("sector contours start at level 1")]
    SectorLevelZero,
    #[error("sector multiplicity must be at least 1")]
    ZeroSigma,
    #[error("read letter `{0}` collides with a contour marker")]
    MarkerCollision(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    Ball,
    Sector,
}

/// Names a family of contour words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContourSpec {
    pub system: SubstitutionSystem,
    pub root: usize,
    /// Number of sectors around a ball; unused for sectors.
    pub sigma: usize,
    pub kind: ContourKind,
}

impl ContourSpec {
    pub fn ball(system: SubstitutionSystem, root: &str, sigma: usize) -> Result<Self, ContourError> {
        if sigma == 0 {
            return Err(ContourError::ZeroSigma);
        }
        let root = system.label_index(root)?;
        Ok(ContourSpec {
            system,
            root,
            sigma,
            kind: ContourKind::Ball,
        })
    }

    pub fn sector(system: SubstitutionSystem, root: &str) -> Result<Self, ContourError> {
        let root = system.label_index(root)?;
        if system.family().marks_sides() {
            if let Some(r) = system
                .terminals()
                .into_iter()
                .find(|t| t == ROOT_MARK || t == SIDE_MARK)
            {
                return Err(ContourError::MarkerCollision(r));
            }
        }
        Ok(ContourSpec {
            system,
            root,
            sigma: 1,
            kind: ContourKind::Sector,
        })
    }

    /// False when a ball uses a sector count the tiling does not have. Such
    /// specs still work; the flag is informational.
    pub fn sigma_is_declared(&self) -> bool {
        self.kind == ContourKind::Sector
            || self.system.family().multiplicities().contains(&self.sigma)
    }

    pub fn min_level(&self) -> usize {
        match self.kind {
            ContourKind::Ball => 0,
            ContourKind::Sector => 1,
        }
    }

    fn marks_sides(&self) -> bool {
        self.kind == ContourKind::Sector && self.system.family().marks_sides()
    }

    /// Streams the contour word at `level`.
    pub fn for_each_letter<F: FnMut(&str)>(&self, level: usize, mut emit: F) -> Result<(), ContourError> {
        let sys = &self.system;
        match self.kind {
            ContourKind::Ball => {
                for _ in 0..self.sigma {
                    sys.for_each_level_label(self.root, level, |x| emit(sys.read_letter(x)));
                }
            }
            ContourKind::Sector => {
                if level == 0 {
                    return Err(ContourError::SectorLevelZero);
                }
                let sides = self.marks_sides();
                if sides {
                    emit(ROOT_MARK);
                    (0..level).for_each(|_| emit(SIDE_MARK));
                }
                sys.for_each_level_label(self.root, level, |x| emit(sys.read_letter(x)));
                if sides {
                    (0..level).for_each(|_| emit(SIDE_MARK));
                }
            }
        }
        Ok(())
    }

    pub fn word(&self, level: usize) -> Result<Vec<String>, ContourError> {
        let mut out = Vec::new();
        self.for_each_letter(level, |t| out.push(t.to_string()))?;
        Ok(out)
    }

    /// Length of the contour word at `level`, from the count matrix.
    pub fn length(&self, level: usize) -> Result<num_bigint::BigUint, ContourError> {
        let tree = self.system.level_total(self.root, level);
        match self.kind {
            ContourKind::Ball => Ok(tree * self.sigma),
            ContourKind::Sector if level == 0 => Err(ContourError::SectorLevelZero),
            ContourKind::Sector if self.marks_sides() => Ok(tree + 1u32 + 2 * level),
            ContourKind::Sector => Ok(tree),
        }
    }

    /// Letters an automaton for this family reads: markers first for
    /// planar sectors, then read letters in label order.
    pub fn alphabet(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.marks_sides() {
            out.push(ROOT_MARK.to_string());
            out.push(SIDE_MARK.to_string());
        }
        out.extend(self.system.terminals());
        out
    }
}

pub fn ball_contour(spec: &ContourSpec, level: usize) -> Vec<String> {
    debug_assert_eq!(spec.kind, ContourKind::Ball);
    spec.word(level).expect("ball contours exist at every level")
}

pub fn sector_contour(spec: &ContourSpec, level: usize) -> Result<Vec<String>, ContourError> {
    debug_assert_eq!(spec.kind, ContourKind::Sector);
    spec.word(level)
}

/// `count` seeded single-edit variants of `word` over `alphabet`: a
/// substitution, insertion or deletion of one letter. Every variant
/// differs from `word`.
pub fn mutate<S: AsRef<str>>(word: &[S], alphabet: &[S], seed: u64, count: usize) -> Vec<Vec<String>> {
    let word: Vec<&str> = word.iter().map(AsRef::as_ref).collect();
    let alphabet: Vec<&str> = alphabet.iter().map(AsRef::as_ref).collect();
    assert!(!alphabet.is_empty(), "mutation needs a nonempty alphabet");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut edited: Vec<String> = word.iter().map(|s| s.to_string()).collect();
        match rng.gen_range(0..3) {
            0 if !word.is_empty() && alphabet.len() > 1 => {
                let i = rng.gen_range(0..word.len());
                let choices: Vec<&str> = alphabet.iter().copied().filter(|a| *a != word[i]).collect();
                edited[i] = choices[rng.gen_range(0..choices.len())].to_string();
            }
            1 => {
                let i = rng.gen_range(0..=word.len());
                let letter = alphabet[rng.gen_range(0..alphabet.len())];
                edited.insert(i, letter.to_string());
            }
            2 if !word.is_empty() => {
                edited.remove(rng.gen_range(0..word.len()));
            }
            _ => continue,
        }
        out.push(edited);
    }
    out
}
