//! Hand-built game trees for search diagnostics.
//!
//! A [`SyntheticTree`] is an explicit tree (or DAG) of numbered nodes: inner
//! nodes list their children, leaves carry a terminal gain. Node values for
//! the adaptive evaluation can be seeded from [`SyntheticTree::seed_table`],
//! which makes it possible to script exactly what a search sees at every
//! step and assert its decisions move by move. Players alternate by depth;
//! the root belongs to the first player.

use crate::eval::HeuristicKind;

use super::{
    Action, Extras, Gain, Game, LengthProfile, NotationError, Player, State, StateKey, Zobrist,
};

struct SynNode {
    children: Vec<usize>,
    terminal_gain: Option<Gain>,
    heuristic: f64,
    depth: u32,
}

/// Builder for [`SyntheticTree`]; add nodes bottom-up, then call
/// [`TreeBuilder::finish`] with the root id.
pub struct TreeBuilder {
    nodes: Vec<SynNode>,
}

impl TreeBuilder {
    pub fn new() -> TreeBuilder {
        TreeBuilder { nodes: Vec::new() }
    }

    /// Add a terminal leaf with the given gain; returns its id.
    pub fn terminal(&mut self, gain: Gain) -> usize {
        self.nodes.push(SynNode {
            children: Vec::new(),
            terminal_gain: Some(gain),
            heuristic: gain as f64,
            depth: 0,
        });
        self.nodes.len() - 1
    }

    /// Add an inner node with a fixed heuristic value and child list.
    pub fn node(&mut self, heuristic: f64, children: Vec<usize>) -> usize {
        assert!(!children.is_empty(), "inner node needs children");
        for &c in &children {
            assert!(c < self.nodes.len(), "child {c} not built yet");
        }
        self.nodes.push(SynNode {
            children,
            terminal_gain: None,
            heuristic,
            depth: 0,
        });
        self.nodes.len() - 1
    }

    /// Fix the root and compute node depths.
    pub fn finish(mut self, root: usize) -> SyntheticTree {
        assert!(root < self.nodes.len());
        let mut queue = std::collections::VecDeque::from([(root, 0u32)]);
        let mut seen = vec![false; self.nodes.len()];
        let mut max_depth = 0;
        while let Some((id, d)) = queue.pop_front() {
            if seen[id] {
                continue;
            }
            seen[id] = true;
            self.nodes[id].depth = d;
            max_depth = max_depth.max(d);
            for &c in &self.nodes[id].children {
                queue.push_back((c, d + 1));
            }
        }
        let zobrist = Zobrist::new(self.nodes.len(), "synthetic");
        SyntheticTree { nodes: self.nodes, root, max_depth, zobrist }
    }
}

impl Default for TreeBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// An explicit game tree; see the module docs.
pub struct SyntheticTree {
    nodes: Vec<SynNode>,
    root: usize,
    max_depth: u32,
    zobrist: Zobrist,
}

impl SyntheticTree {
    fn node_of(&self, s: &State) -> usize {
        match s.extras {
            Extras::Node(id) => id as usize,
            _ => panic!("state {} is not a synthetic-tree state", s.key()),
        }
    }

    /// The state for node `id`.
    pub fn state_of(&self, id: usize) -> State {
        let node = &self.nodes[id];
        let to_move = if node.depth % 2 == 0 { Player::First } else { Player::Second };
        let mut key = self.zobrist.cell(id, Player::First);
        if to_move == Player::Second {
            key ^= self.zobrist.to_move();
        }
        State::new(Vec::new(), to_move, node.depth, key, Extras::Node(id as u32))
    }

    /// Every node's state paired with its scripted heuristic value, for
    /// seeding a table-backed adaptive evaluation.
    pub fn seed_table(&self) -> Vec<(State, f64)> {
        (0..self.nodes.len())
            .map(|id| (self.state_of(id), self.nodes[id].heuristic))
            .collect()
    }
}

impl Game for SyntheticTree {
    fn name(&self) -> String {
        format!("synthetic-{}", self.nodes.len())
    }

    fn rows(&self) -> usize {
        1
    }

    fn cols(&self) -> usize {
        self.nodes.len()
    }

    fn initial_state(&self) -> State {
        self.state_of(self.root)
    }

    fn legal_actions(&self, s: &State) -> Vec<Action> {
        assert!(
            !self.is_terminal(s),
            "legal_actions called on terminal state {}",
            s.key()
        );
        (0..self.nodes[self.node_of(s)].children.len())
            .map(|i| Action::Place(i as u16))
            .collect()
    }

    fn apply(&self, s: &State, a: Action) -> State {
        let node = &self.nodes[self.node_of(s)];
        match a {
            Action::Place(i) if (i as usize) < node.children.len() => {
                self.state_of(node.children[i as usize])
            }
            other => panic!(
                "illegal action {} in state {}",
                self.format_action(other),
                s.key()
            ),
        }
    }

    fn is_terminal(&self, s: &State) -> bool {
        self.nodes[self.node_of(s)].terminal_gain.is_some()
    }

    fn gain(&self, s: &State) -> Gain {
        self.nodes[self.node_of(s)]
            .terminal_gain
            .unwrap_or_else(|| panic!("gain called on non-terminal state {}", s.key()))
    }

    fn piece_counts(&self, _s: &State) -> (u32, u32) {
        (0, 0)
    }

    fn length_profile(&self) -> LengthProfile {
        LengthProfile::Exact(self.max_depth)
    }

    fn plane_shape(&self) -> (usize, usize, usize) {
        (1, 1, self.nodes.len())
    }

    fn encode_planes(&self, s: &State, out: &mut Vec<f32>) {
        let id = self.node_of(s);
        out.extend((0..self.nodes.len()).map(|i| (i == id) as u8 as f32));
    }

    fn symmetries(&self, s: &State) -> Vec<State> {
        vec![s.clone()]
    }

    fn parse_action(&self, text: &str) -> Result<Action, NotationError> {
        text.parse::<u16>()
            .map(Action::Place)
            .map_err(|_| NotationError(format!("bad child index '{text}'")))
    }

    fn format_action(&self, a: Action) -> String {
        match a {
            Action::Place(i) => i.to_string(),
            other => panic!("{other:?} is not a synthetic-tree action"),
        }
    }

    fn to_fen(&self, s: &State) -> String {
        format!("node:{}", self.node_of(s))
    }

    fn from_fen(&self, text: &str) -> Result<State, NotationError> {
        let id = text
            .strip_prefix("node:")
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| NotationError(format!("bad node '{text}'")))?;
        if id >= self.nodes.len() {
            return Err(NotationError(format!("node {id} does not exist")));
        }
        Ok(self.state_of(id))
    }

    fn supports_heuristic(&self, kind: HeuristicKind) -> bool {
        matches!(
            kind,
            HeuristicKind::Classic
                | HeuristicKind::DepthAdditive
                | HeuristicKind::DepthMultiplicative
                | HeuristicKind::Mobility
        )
    }

    fn recompute_key(&self, s: &State) -> StateKey {
        self.state_of(self.node_of(s)).key()
    }
}
