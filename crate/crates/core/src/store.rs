//! Iterated pushdown stores.
//!
//! A level-0 store is the empty word. A level-(k+1) store is a sequence of
//! elements `A[flag]`, where `A` is a store symbol and `flag` is a level-k
//! store. The leftmost element is the top of the store.
//!
//! Stores are persistent: every operation returns a new value and shares
//! the untouched parts of its input. Each node caches its structural hash
//! and symbol count, so hashing and [`Store::total_size`] are `O(1)`.
//!
//! Operation semantics:
//!
//! * `pop(1)` removes the top element; `pop(j+1)` pops at level `j` inside
//!   the flag of the top element. Popping an empty store is undefined.
//! * `push(1, w)` replaces the top element `A[flag]` by `w1[flag]..wm[flag]`
//!   (on the empty store, by `w1[e]..wm[e]`); an empty `w` deletes the top.
//! * `push(j, w)` for `j >= 2` descends into the flag of the top element and
//!   stacks `w` on the store found at level `j`, each new element carrying a
//!   copy of the flag of the element it covers. It is undefined on an empty
//!   store. With this reading `pop(j)` undoes `push(j, "F")` for `j >= 2`.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Characters that may not appear inside a store symbol.
const RESERVED: &[char] = &['[', ']', '.'];

/// Rendering of the empty store.
pub const EMPTY_TOKEN: &str = "e";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("store symbol must not be empty")]
    Empty,
    #[error("store symbol {0:?} contains whitespace or one of `[ ] .`")]
    Reserved(String),
    #[error("store symbol `e` is reserved for the empty store")]
    EmptyMarker,
}

/// A token of a store alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StoreSymbol(Arc<str>);

impl StoreSymbol {
    pub fn new(token: &str) -> Result<Self, SymbolError> {
        validate_symbol(token)?;
        Ok(StoreSymbol(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StoreSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for StoreSymbol {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StoreSymbol::new(s)
    }
}

pub fn validate_symbol(token: &str) -> Result<(), SymbolError> {
    if token.is_empty() {
        return Err(SymbolError::Empty);
    }
    if token.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c)) {
        return Err(SymbolError::Reserved(token.to_string()));
    }
    if token == EMPTY_TOKEN {
        return Err(SymbolError::EmptyMarker);
    }
    Ok(())
}

type Link<S> = Option<Arc<Node<S>>>;

struct Node<S> {
    symbol: S,
    inner: Store<S>,
    rest: Link<S>,
    /// Symbols in this element, its flag, and everything below it.
    size: usize,
    /// Elements in this chain, counting this one.
    len: usize,
    digest: u64,
}

impl<S> Drop for Node<S> {
    // Long outer chains would otherwise be dropped recursively.
    fn drop(&mut self) {
        let mut next = self.rest.take();
        while let Some(node) = next {
            match Arc::try_unwrap(node) {
                Ok(mut node) => next = node.rest.take(),
                Err(_) => break,
            }
        }
    }
}

fn link_size<S>(link: &Link<S>) -> usize {
    link.as_ref().map_or(0, |n| n.size)
}

fn link_len<S>(link: &Link<S>) -> usize {
    link.as_ref().map_or(0, |n| n.len)
}

fn link_digest<S>(link: &Link<S>) -> u64 {
    link.as_ref().map_or(0x5bd1_e995, |n| n.digest)
}

fn cons<S: Hash>(symbol: S, inner: Store<S>, rest: Link<S>) -> Link<S> {
    let mut h = DefaultHasher::new();
    symbol.hash(&mut h);
    inner.digest().hash(&mut h);
    link_digest(&rest).hash(&mut h);
    let size = 1 + inner.total_size() + link_size(&rest);
    let len = 1 + link_len(&rest);
    Some(Arc::new(Node {
        symbol,
        inner,
        rest,
        size,
        len,
        digest: h.finish(),
    }))
}

/// A k-level iterated pushdown store.
pub struct Store<S> {
    level: usize,
    top: Link<S>,
}

impl<S> Clone for Store<S> {
    fn clone(&self) -> Self {
        Store {
            level: self.level,
            top: self.top.clone(),
        }
    }
}

impl<S> Store<S> {
    /// The empty store of the given level.
    pub fn empty(level: usize) -> Self {
        Store { level, top: None }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_none()
    }

    /// Number of symbols at all levels.
    pub fn total_size(&self) -> usize {
        link_size(&self.top)
    }

    /// Number of elements in the outermost sequence.
    pub fn len(&self) -> usize {
        link_len(&self.top)
    }

    fn digest(&self) -> u64 {
        link_digest(&self.top) ^ (self.level as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }

    /// The top element, as its symbol and flag.
    pub fn top(&self) -> Option<(&S, &Store<S>)> {
        self.top.as_deref().map(|n| (&n.symbol, &n.inner))
    }

    /// Elements of the outermost sequence, top first.
    pub fn iter(&self) -> Elements<'_, S> {
        Elements {
            next: self.top.as_deref(),
        }
    }

    /// Symbols visible through [`topsym`](Store::topsym), outermost first.
    pub fn topsym_iter(&self) -> TopSymbols<'_, S> {
        TopSymbols { store: Some(self) }
    }

    pub fn topsym(&self) -> Vec<S>
    where
        S: Clone,
    {
        self.topsym_iter().cloned().collect()
    }
}

impl<S: Clone + Hash> Store<S> {
    /// The store `symbol[e]` of the given level (`level >= 1`).
    pub fn initial(level: usize, symbol: S) -> Self {
        assert!(level >= 1, "a level-0 store holds no symbols");
        Store {
            level,
            top: cons(symbol, Store::empty(level - 1), None),
        }
    }

    /// Builds a store from its elements, top first. Returns `None` when a
    /// flag has the wrong level or `level` is 0 with elements present.
    pub fn from_elements<I>(level: usize, elements: I) -> Option<Self>
    where
        I: IntoIterator<Item = (S, Store<S>)>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut link = None;
        for (symbol, inner) in elements.into_iter().rev() {
            if level == 0 || inner.level != level - 1 {
                return None;
            }
            link = cons(symbol, inner, link);
        }
        Some(Store { level, top: link })
    }

    pub fn pop(&self, j: usize) -> Option<Self> {
        if j == 0 || j > self.level {
            return None;
        }
        let node = self.top.as_deref()?;
        if j == 1 {
            return Some(Store {
                level: self.level,
                top: node.rest.clone(),
            });
        }
        let inner = node.inner.pop(j - 1)?;
        Some(Store {
            level: self.level,
            top: cons(node.symbol.clone(), inner, node.rest.clone()),
        })
    }

    pub fn push(&self, j: usize, word: &[S]) -> Option<Self> {
        if j == 0 || j > self.level {
            return None;
        }
        if j == 1 {
            let (flag, rest) = match self.top.as_deref() {
                Some(node) => (node.inner.clone(), node.rest.clone()),
                None => (Store::empty(self.level - 1), None),
            };
            return Some(Store {
                level: self.level,
                top: prepend(word, &flag, rest),
            });
        }
        let node = self.top.as_deref()?;
        let inner = node.inner.stack(j - 1, word)?;
        Some(Store {
            level: self.level,
            top: cons(node.symbol.clone(), inner, node.rest.clone()),
        })
    }

    /// Stacks `word` on the sequence found at level `j`, keeping the element
    /// it covers.
    fn stack(&self, j: usize, word: &[S]) -> Option<Self> {
        if j == 1 {
            let flag = match self.top.as_deref() {
                Some(node) => node.inner.clone(),
                None => Store::empty(self.level - 1),
            };
            return Some(Store {
                level: self.level,
                top: prepend(word, &flag, self.top.clone()),
            });
        }
        let node = self.top.as_deref()?;
        let inner = node.inner.stack(j - 1, word)?;
        Some(Store {
            level: self.level,
            top: cons(node.symbol.clone(), inner, node.rest.clone()),
        })
    }

    /// Applies `f` to every symbol, preserving structure.
    pub fn map<T, F>(&self, f: &F) -> Store<T>
    where
        T: Clone + Hash,
        F: Fn(&S) -> T,
    {
        let elements: Vec<(T, Store<T>)> = self
            .iter()
            .map(|(symbol, inner)| (f(symbol), inner.map(f)))
            .collect();
        Store::from_elements(self.level, elements).expect("levels preserved by map")
    }
}

fn prepend<S: Clone + Hash>(word: &[S], flag: &Store<S>, rest: Link<S>) -> Link<S> {
    word.iter()
        .rev()
        .fold(rest, |link, symbol| cons(symbol.clone(), flag.clone(), link))
}

impl<S: PartialEq> PartialEq for Store<S> {
    fn eq(&self, other: &Self) -> bool {
        if self.level != other.level {
            return false;
        }
        let (mut a, mut b) = (&self.top, &other.top);
        loop {
            match (a, b) {
                (None, None) => return true,
                (Some(x), Some(y)) => {
                    if Arc::ptr_eq(x, y) {
                        return true;
                    }
                    if x.digest != y.digest
                        || x.size != y.size
                        || x.len != y.len
                        || x.symbol != y.symbol
                        || x.inner != y.inner
                    {
                        return false;
                    }
                    a = &x.rest;
                    b = &y.rest;
                }
                _ => return false,
            }
        }
    }
}

impl<S: Eq> Eq for Store<S> {}

impl<S> Hash for Store<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.digest());
    }
}

pub struct Elements<'a, S> {
    next: Option<&'a Node<S>>,
}

impl<'a, S> Iterator for Elements<'a, S> {
    type Item = (&'a S, &'a Store<S>);

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.next?;
        self.next = node.rest.as_deref();
        Some((&node.symbol, &node.inner))
    }
}

pub struct TopSymbols<'a, S> {
    store: Option<&'a Store<S>>,
}

impl<'a, S> Iterator for TopSymbols<'a, S> {
    type Item = &'a S;

    fn next(&mut self) -> Option<Self::Item> {
        let (symbol, inner) = self.store?.top()?;
        self.store = Some(inner);
        Some(symbol)
    }
}

impl<S> Store<S> {
    /// Renders the store, writing each symbol with `name`.
    ///
    /// The empty store renders as `e`. An element with an empty flag renders
    /// as its bare symbol, otherwise as `SYM[flag]`; elements are joined by
    /// `.`.
    pub fn render_with<F>(&self, name: &F) -> String
    where
        F: Fn(&S, &mut String),
    {
        let mut out = String::new();
        self.write_with(&mut out, name);
        out
    }

    fn write_with<F>(&self, out: &mut String, name: &F)
    where
        F: Fn(&S, &mut String),
    {
        if self.is_empty() {
            out.push_str(EMPTY_TOKEN);
            return;
        }
        for (i, (symbol, inner)) in self.iter().enumerate() {
            if i > 0 {
                out.push('.');
            }
            name(symbol, out);
            if !inner.is_empty() {
                out.push('[');
                inner.write_with(out, name);
                out.push(']');
            }
        }
    }
}

impl<S: fmt::Display> fmt::Display for Store<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.render_with(&|s: &S, out: &mut String| {
            use fmt::Write;
            let _ = write!(out, "{s}");
        });
        f.write_str(&text)
    }
}

impl<S: fmt::Debug> fmt::Debug for Store<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.render_with(&|s: &S, out: &mut String| {
            use fmt::Write;
            let _ = write!(out, "{s:?}");
        });
        write!(f, "Store<{}>({text})", self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreParseError {
    #[error("unexpected end of input at offset {0}")]
    UnexpectedEnd(usize),
    #[error("unexpected character {found:?} at offset {offset}")]
    Unexpected { found: char, offset: usize },
    #[error("element at offset {0} nests deeper than the store level")]
    TooDeep(usize),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

impl Store<StoreSymbol> {
    /// Parses the textual rendering of a store of the given level.
    pub fn parse(text: &str, level: usize) -> Result<Self, StoreParseError> {
        let mut parser = Parser {
            chars: text.trim().char_indices().collect(),
            pos: 0,
        };
        let store = parser.store(level)?;
        match parser.peek() {
            None => Ok(store),
            Some((offset, found)) => Err(StoreParseError::Unexpected { found, offset }),
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn offset(&self) -> usize {
        self.chars.last().map_or(0, |&(i, c)| i + c.len_utf8())
    }

    fn token(&mut self) -> Result<String, StoreParseError> {
        let mut token = String::new();
        while let Some((_, c)) = self.peek() {
            if c.is_whitespace() || RESERVED.contains(&c) {
                break;
            }
            token.push(c);
            self.pos += 1;
        }
        match self.peek() {
            _ if !token.is_empty() => Ok(token),
            Some((offset, found)) => Err(StoreParseError::Unexpected { found, offset }),
            None => Err(StoreParseError::UnexpectedEnd(self.offset())),
        }
    }

    fn store(&mut self, level: usize) -> Result<Store<StoreSymbol>, StoreParseError> {
        let start = self.pos;
        let first = self.token()?;
        if first == EMPTY_TOKEN {
            return Ok(Store::empty(level));
        }
        self.pos = start;
        let mut elements = Vec::new();
        loop {
            let at = self.peek().map_or(self.offset(), |(i, _)| i);
            if level == 0 {
                return Err(StoreParseError::TooDeep(at));
            }
            let symbol = StoreSymbol::new(&self.token()?)?;
            let inner = if let Some((_, '[')) = self.peek() {
                self.pos += 1;
                if level == 1 {
                    // Only `[e]` is meaningful below level 1.
                    let inner = self.store(0)?;
                    self.expect(']')?;
                    inner
                } else {
                    let inner = self.store(level - 1)?;
                    self.expect(']')?;
                    inner
                }
            } else {
                Store::empty(level - 1)
            };
            elements.push((symbol, inner));
            match self.peek() {
                Some((_, '.')) => self.pos += 1,
                _ => break,
            }
        }
        Ok(Store::from_elements(level, elements).expect("parsed flags have level - 1"))
    }

    fn expect(&mut self, want: char) -> Result<(), StoreParseError> {
        match self.peek() {
            Some((_, c)) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some((offset, found)) => Err(StoreParseError::Unexpected { found, offset }),
            None => Err(StoreParseError::UnexpectedEnd(self.offset())),
        }
    }
}
