//! The transposition table shared by all search algorithms.
//!
//! One record per state key: the backed-up value `v`, the per-action child
//! values `v'`, the resolution entry `(r, resolved)`, selection counts, and
//! visit sums for UCT. A record whose state was expanded (or is terminal) is
//! part of the search tree proper; those are the states harvested as
//! training targets.

use std::collections::HashMap;

use crate::game::{Action, Gain, State, StateKey};

/// Table entry of one state.
#[derive(Clone, Debug)]
pub struct NodeRecord {
    /// The state itself, kept for harvesting training pairs.
    pub state: State,
    /// Backed-up value, first-player point of view.
    pub v: f64,
    /// Resolution value: +1 / -1 once proven, 0 otherwise (also 0 for a
    /// proven draw, distinguished by `resolved`).
    pub r: Gain,
    /// Whether the exact result of the state is proven.
    pub resolved: bool,
    /// Whether the state is terminal.
    pub terminal: bool,
    /// Whether children have been generated and evaluated.
    pub expanded: bool,
    /// Legal actions in canonical order (empty for terminal records).
    pub actions: Vec<Action>,
    /// Child state keys, parallel to `actions`.
    pub child_keys: Vec<StateKey>,
    /// Child values `v'(s, a)`, parallel to `actions`.
    pub vprime: Vec<f64>,
    /// How often each action was chosen by search iterations.
    pub n: Vec<u32>,
    /// Sum of values backed up through each action (UCT).
    pub w: Vec<f64>,
    /// Total visits of this record (UCT).
    pub visits: u32,
    /// Sum of values backed up through this record (UCT).
    pub value_sum: f64,
}

impl NodeRecord {
    /// Record for a terminal state.
    pub fn terminal(state: State, v: f64, gain: Gain) -> NodeRecord {
        NodeRecord {
            state,
            v,
            r: gain,
            resolved: true,
            terminal: true,
            expanded: false,
            actions: Vec::new(),
            child_keys: Vec::new(),
            vprime: Vec::new(),
            n: Vec::new(),
            w: Vec::new(),
            visits: 0,
            value_sum: 0.0,
        }
    }

    /// Record for a freshly expanded inner state.
    pub fn expanded(
        state: State,
        actions: Vec<Action>,
        child_keys: Vec<StateKey>,
        vprime: Vec<f64>,
        v: f64,
    ) -> NodeRecord {
        let k = actions.len();
        NodeRecord {
            state,
            v,
            r: 0,
            resolved: false,
            terminal: false,
            expanded: true,
            actions,
            child_keys,
            vprime,
            n: vec![0; k],
            w: vec![0.0; k],
            visits: 0,
            value_sum: 0.0,
        }
    }

    /// Record holding only a state and its value (alpha-beta harvest).
    pub fn valued(state: State, v: f64) -> NodeRecord {
        NodeRecord {
            state,
            v,
            r: 0,
            resolved: false,
            terminal: false,
            expanded: true,
            actions: Vec::new(),
            child_keys: Vec::new(),
            vprime: Vec::new(),
            n: Vec::new(),
            w: Vec::new(),
            visits: 0,
            value_sum: 0.0,
        }
    }

    /// Whether this record belongs to the search tree proper (expanded or
    /// terminal), as opposed to a child seen only from its parent.
    pub fn in_tree(&self) -> bool {
        self.expanded || self.terminal
    }
}

/// Map from state key to record, plus an expansion counter for node budgets.
#[derive(Default)]
pub struct SearchTable {
    map: HashMap<u64, NodeRecord>,
    expansions: u64,
}

impl SearchTable {
    pub fn new() -> SearchTable {
        SearchTable::default()
    }

    /// Drop everything (between games).
    pub fn clear(&mut self) {
        self.map.clear();
        self.expansions = 0;
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// States inserted so far (the node budget's clock).
    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn get(&self, key: StateKey) -> Option<&NodeRecord> {
        self.map.get(&key.0)
    }

    pub fn get_mut(&mut self, key: StateKey) -> Option<&mut NodeRecord> {
        self.map.get_mut(&key.0)
    }

    pub fn contains(&self, key: StateKey) -> bool {
        self.map.contains_key(&key.0)
    }

    /// Insert a record under its state's key.
    pub fn insert(&mut self, rec: NodeRecord) {
        self.expansions += 1;
        self.map.insert(rec.state.key().0, rec);
    }

    /// Resolution entry of a state: `(r, resolved)`, defaulting to
    /// unresolved for states the table has never seen.
    pub fn resolution(&self, key: StateKey) -> (Gain, bool) {
        self.map
            .get(&key.0)
            .map_or((0, false), |rec| (rec.r, rec.resolved))
    }

    /// Training pairs: every in-tree state with its backed-up value.
    pub fn harvest(&self) -> impl Iterator<Item = (&State, f64)> + '_ {
        self.map
            .values()
            .filter(|rec| rec.in_tree())
            .map(|rec| (&rec.state, rec.v))
    }

    /// All records (diagnostics).
    pub fn records(&self) -> impl Iterator<Item = &NodeRecord> + '_ {
        self.map.values()
    }
}
