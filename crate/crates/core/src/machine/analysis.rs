//! Static lower bounds on the input a store still has to consume.
//!
//! For automata of level 1 or 2 we compute `cost(q, A, h)`: a lower bound
//! on the letters read while removing a top element `A[flag]` with
//! `|flag| = h`, starting in state `q`. The abstraction keeps the state,
//! the symbol and the flag height; it forgets the flag's contents, so a
//! two-symbol pattern `AY` is assumed to fire at every `h >= 1`. Heights
//! at or above [`HEIGHT_CLAMP`] collapse into one node. Every concrete run
//! is a run of the abstraction, so the minimum over abstract derivations
//! never exceeds the concrete consumption.
//!
//! The elements below the top are charged `min_q cost(q, A, h)`. A
//! configuration whose total bound exceeds the remaining input cannot
//! reach an empty store with all input read, and the search drops it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Action, Automaton, SymbolId};
use crate::store::Store;

/// Flag heights `>= HEIGHT_CLAMP` share one abstract node.
pub const HEIGHT_CLAMP: usize = 64;

const INF: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct LowerBound {
    symbols: usize,
    /// `cost[(q * symbols + a) * (H + 1) + h]`
    cost: Vec<u64>,
    /// `any[a * (H + 1) + h]`, the minimum over states.
    any: Vec<u64>,
}

struct Rule {
    head: usize,
    base: u64,
    body: Vec<usize>,
}

impl LowerBound {
    /// Returns `None` for automata above level 2.
    pub fn new(a: &Automaton) -> Option<Self> {
        if a.levels() > 2 {
            return None;
        }
        let states = a.states().len();
        let symbols = a.symbols().len();
        let width = HEIGHT_CLAMP + 1;
        let node = |q: usize, s: usize, h: usize| (q * symbols + s) * width + h;
        let any_base = states * symbols * width;
        let any_node = |s: usize, h: usize| any_base + s * width + h;
        let total = any_base + symbols * width;

        let heights: Vec<usize> = (0..width).collect();
        let mut rules = Vec::new();
        for t in a.transitions() {
            let q = t.from.0 as usize;
            let to = t.to.0 as usize;
            let sym = t.pattern[0].0 as usize;
            let base = u64::from(t.input.is_some());
            let applicable: &[usize] = match (a.levels(), t.pattern.len()) {
                (1, _) | (_, 1) => &heights[..1],
                _ => &heights[1..],
            };
            for &h in applicable {
                let head = node(q, sym, h);
                match &t.action {
                    Action::Pop(1) => rules.push(Rule {
                        head,
                        base,
                        body: vec![],
                    }),
                    Action::Pop(_) => {
                        if h == 0 {
                            continue;
                        }
                        rules.push(Rule {
                            head,
                            base,
                            body: vec![node(to, sym, h - 1)],
                        });
                        if h == HEIGHT_CLAMP {
                            rules.push(Rule {
                                head,
                                base,
                                body: vec![node(to, sym, h)],
                            });
                        }
                    }
                    Action::Push(1, word) => {
                        let body = match word.split_first() {
                            None => vec![],
                            Some((first, rest)) => std::iter::once(node(to, first.0 as usize, h))
                                .chain(rest.iter().map(|s| any_node(s.0 as usize, h)))
                                .collect(),
                        };
                        rules.push(Rule { head, base, body });
                    }
                    Action::Push(_, word) => {
                        let target = (h + word.len()).min(HEIGHT_CLAMP);
                        rules.push(Rule {
                            head,
                            base,
                            body: vec![node(to, sym, target)],
                        });
                    }
                }
            }
        }
        for q in 0..states {
            for s in 0..symbols {
                for h in 0..width {
                    rules.push(Rule {
                        head: any_node(s, h),
                        base: 0,
                        body: vec![node(q, s, h)],
                    });
                }
            }
        }

        let value = knuth(total, &rules);
        Some(LowerBound {
            symbols,
            cost: value[..any_base].to_vec(),
            any: value[any_base..].to_vec(),
        })
    }

    fn clamp(h: usize) -> usize {
        h.min(HEIGHT_CLAMP)
    }

    pub fn top_cost(&self, state: usize, symbol: SymbolId, height: usize) -> u64 {
        let width = HEIGHT_CLAMP + 1;
        self.cost[(state * self.symbols + symbol.0 as usize) * width + Self::clamp(height)]
    }

    pub fn buried_cost(&self, symbol: SymbolId, height: usize) -> u64 {
        self.any[symbol.0 as usize * (HEIGHT_CLAMP + 1) + Self::clamp(height)]
    }

    /// True when emptying `store` from `state` needs more than `budget`
    /// letters.
    pub fn exceeds(&self, state: usize, store: &Store<SymbolId>, budget: usize) -> bool {
        let budget = budget as u64;
        let mut total: u64 = 0;
        for (i, (symbol, flag)) in store.iter().enumerate() {
            let c = if i == 0 {
                self.top_cost(state, *symbol, flag.len())
            } else {
                self.buried_cost(*symbol, flag.len())
            };
            total = total.saturating_add(c);
            if total > budget {
                return true;
            }
        }
        false
    }
}

/// Minimum-cost derivations for rules of the form
/// `head <= base + sum(body)` (Knuth's generalisation of Dijkstra).
fn knuth(nodes: usize, rules: &[Rule]) -> Vec<u64> {
    let mut value = vec![INF; nodes];
    let mut done = vec![false; nodes];
    let mut uses: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut remaining: Vec<usize> = Vec::with_capacity(rules.len());
    let mut partial: Vec<u64> = Vec::with_capacity(rules.len());
    let mut heap = BinaryHeap::new();

    for (r, rule) in rules.iter().enumerate() {
        for &b in &rule.body {
            uses[b].push(r);
        }
        remaining.push(rule.body.len());
        partial.push(rule.base);
        if rule.body.is_empty() && rule.base < value[rule.head] {
            value[rule.head] = rule.base;
            heap.push(Reverse((rule.base, rule.head)));
        }
    }

    while let Some(Reverse((d, n))) = heap.pop() {
        if done[n] || d > value[n] {
            continue;
        }
        done[n] = true;
        for &r in &uses[n] {
            partial[r] = partial[r].saturating_add(d);
            remaining[r] -= 1;
            if remaining[r] == 0 {
                let head = rules[r].head;
                if !done[head] && partial[r] < value[head] {
                    value[head] = partial[r];
                    heap.push(Reverse((partial[r], head)));
                }
            }
        }
    }
    value
}
