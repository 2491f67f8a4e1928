//! Finite automata over events plus `TICK`, with the finite-word algorithms
//! the closure checkers need.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Letters of a tick word. `Tick` advances integer time by one unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Tick,
    Event(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Tick => f.write_str("TICK"),
            Symbol::Event(a) => f.write_str(a),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TickWord(pub Vec<Symbol>);

impl TickWord {
    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Space separated; the empty word prints as `ε`.
impl fmt::Display for TickWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(Symbol::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for TickWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ε" {
            return Ok(TickWord::default());
        }
        Ok(TickWord(
            s.split_whitespace()
                .map(|tok| match tok {
                    "TICK" => Symbol::Tick,
                    a => Symbol::Event(a.to_string()),
                })
                .collect(),
        ))
    }
}

/// A nondeterministic finite automaton. States are `0..num_states()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<Symbol>,
    initial: usize,
    accepting: Vec<bool>,
    /// Per state, `(symbol index, target)` pairs sorted and deduplicated.
    delta: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    /// A shortest accepted word.
    Witness(TickWord),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Included,
    /// A shortest word accepted by the left automaton but not the right.
    Counterexample(TickWord),
}

impl Nfa {
    /// `transitions` are `(source, symbol, target)`; every symbol must be in
    /// `alphabet`.
    pub fn new(
        alphabet: impl IntoIterator<Item = Symbol>,
        num_states: usize,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, Symbol, usize)>,
    ) -> Result<Self> {
        let mut alphabet: Vec<Symbol> = alphabet.into_iter().collect();
        alphabet.sort();
        alphabet.dedup();
        if initial >= num_states {
            return Err(Error::domain("initial state out of range"));
        }
        let mut acc = vec![false; num_states];
        for s in accepting {
            *acc.get_mut(s).ok_or_else(|| Error::domain("accepting state out of range"))? = true;
        }
        let mut delta = vec![Vec::new(); num_states];
        for (src, sym, dst) in transitions {
            if src >= num_states || dst >= num_states {
                return Err(Error::domain("transition endpoint out of range"));
            }
            let idx = alphabet
                .binary_search(&sym)
                .map_err(|_| Error::domain(format!("symbol '{sym}' is not in the alphabet")))?;
            delta[src].push((idx, dst));
        }
        for row in &mut delta {
            row.sort_unstable();
            row.dedup();
        }
        Ok(Nfa { alphabet, initial, accepting: acc, delta })
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    /// `(symbol, target)` pairs leaving `s`.
    pub fn transitions(&self, s: usize) -> impl Iterator<Item = (&Symbol, usize)> {
        self.delta[s].iter().map(move |&(i, t)| (&self.alphabet[i], t))
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().map(Vec::len).sum()
    }

    fn symbol_index(&self, sym: &Symbol) -> Option<usize> {
        self.alphabet.binary_search(sym).ok()
    }

    /// Sorted, deduplicated successor set.
    fn step(&self, states: &[usize], sym: usize) -> Vec<usize> {
        let mut next: Vec<usize> = states
            .iter()
            .flat_map(|&s| self.delta[s].iter().filter(move |(i, _)| *i == sym).map(|&(_, t)| t))
            .collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    pub fn accepts(&self, word: &TickWord) -> Result<bool> {
        let mut current = vec![self.initial];
        for sym in word.symbols() {
            let idx = self
                .symbol_index(sym)
                .ok_or_else(|| Error::domain(format!("symbol '{sym}' is not in the alphabet")))?;
            current = self.step(&current, idx);
            if current.is_empty() {
                return Ok(false);
            }
        }
        Ok(current.iter().any(|&s| self.accepting[s]))
    }

    /// Breadth-first search from the initial state.
    pub fn emptiness(&self) -> Emptiness {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.num_states()];
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            if self.accepting[s] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((prev, sym)) = parent[cur] {
                    word.push(self.alphabet[sym].clone());
                    cur = prev;
                }
                word.reverse();
                return Emptiness::Witness(TickWord(word));
            }
            for &(sym, t) in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, sym));
                    queue.push_back(t);
                }
            }
        }
        Emptiness::Empty
    }

    /// States reachable from the initial one.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for &(_, t) in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Every distinct accepted word of length at most `max_len`, in
    /// length-lexicographic order by symbol. Fails once more than
    /// `cap` words would be produced.
    pub fn accepted_words(&self, max_len: usize, cap: usize) -> Result<Vec<TickWord>> {
        let mut out = Vec::new();
        let mut layer = vec![(Vec::<Symbol>::new(), vec![self.initial])];
        for len in 0..=max_len {
            let mut next_layer = Vec::new();
            for (word, states) in layer {
                if states.iter().any(|&s| self.accepting[s]) {
                    if out.len() >= cap {
                        return Err(Error::Resource { what: "accepted-word enumeration", cap });
                    }
                    out.push(TickWord(word.clone()));
                }
                if len == max_len {
                    continue;
                }
                for sym in 0..self.alphabet.len() {
                    let next = self.step(&states, sym);
                    if !next.is_empty() {
                        let mut w = word.clone();
                        w.push(self.alphabet[sym].clone());
                        next_layer.push((w, next));
                    }
                }
                if next_layer.len() > cap {
                    return Err(Error::Resource { what: "accepted-word enumeration", cap });
                }
            }
            layer = next_layer;
        }
        Ok(out)
    }
}

/// Decides `L(left) ⊆ L(right)` over finite words.
///
/// Explores the product of `left` with the subset construction of `right`
/// breadth first, so a returned counterexample is as short as possible.
/// Symbols the two automata do not share simply have no transitions on the
/// side that lacks them. Fails with a resource error once more than `cap`
/// product states have been created; no verdict is drawn from a partial
/// construction.
pub fn language_inclusion(left: &Nfa, right: &Nfa, cap: usize) -> Result<Inclusion> {
    // symbol index in `left` -> symbol index in `right`
    let translate: Vec<Option<usize>> = left.alphabet.iter().map(|s| right.symbol_index(s)).collect();

    let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut nodes: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut parent: Vec<Option<(usize, usize)>> = Vec::new();
    let start = (left.initial, vec![right.initial]);
    ids.insert(start.clone(), 0);
    nodes.push(start);
    parent.push(None);

    let mut head = 0;
    while head < nodes.len() {
        let (q, subset) = nodes[head].clone();
        if left.accepting[q] && !subset.iter().any(|&s| right.accepting[s]) {
            let mut word = Vec::new();
            let mut cur = head;
            while let Some((prev, sym)) = parent[cur] {
                word.push(left.alphabet[sym].clone());
                cur = prev;
            }
            word.reverse();
            return Ok(Inclusion::Counterexample(TickWord(word)));
        }
        // group successor computation per symbol
        let mut by_symbol: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(sym, t) in &left.delta[q] {
            by_symbol.entry(sym).or_default().push(t);
        }
        for (sym, targets) in by_symbol {
            let next_subset = match translate[sym] {
                Some(rs) => right.step(&subset, rs),
                None => Vec::new(),
            };
            for t in targets {
                let key = (t, next_subset.clone());
                if !ids.contains_key(&key) {
                    if nodes.len() >= cap {
                        return Err(Error::Resource { what: "inclusion product", cap });
                    }
                    ids.insert(key.clone(), nodes.len());
                    nodes.push(key);
                    parent.push(Some((head, sym)));
                }
            }
        }
        head += 1;
    }
    Ok(Inclusion::Included)
}
