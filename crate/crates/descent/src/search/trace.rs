//! Line-oriented search tracing.
//!
//! With a sink attached, each search iteration appends one line describing
//! the walked path and the value backed up to the root. The format is plain
//! text, one record per line, meant for eyeballing and diffing rather than
//! machine consumption.

use std::io::Write;

use crate::game::{Game, State};

/// Destination for trace lines.
pub struct TraceSink {
    out: Box<dyn Write + Send>,
}

impl TraceSink {
    pub fn new(out: Box<dyn Write + Send>) -> TraceSink {
        TraceSink { out }
    }

    /// One best-first iteration: the actions walked from the root and the
    /// value (and, once known, resolution) backed up to it.
    pub fn iteration(
        &mut self,
        game: &dyn Game,
        iter: u64,
        path: &[crate::game::Action],
        root: &State,
        v: f64,
        r: i8,
        resolved: bool,
    ) {
        let mut line = format!("iter={iter} path=");
        if path.is_empty() {
            line.push('-');
        } else {
            let mut first = true;
            for a in path {
                if !first {
                    line.push('/');
                }
                line.push_str(&game.format_action(*a));
                first = false;
            }
        }
        line.push_str(&format!(" v={v:.4}"));
        if resolved {
            line.push_str(&format!(" r={r:+}"));
        }
        let _ = root;
        let _ = writeln!(self.out, "{line}");
    }

    /// One completed deepening of iterative-deepening alpha-beta.
    pub fn deepening(&mut self, game: &dyn Game, depth: u32, best: crate::game::Action, v: f64) {
        let _ = writeln!(
            self.out,
            "depth={depth} best={} v={v:.4}",
            game.format_action(best)
        );
    }

    /// Free-form note (search start and end).
    pub fn note(&mut self, text: &str) {
        let _ = writeln!(self.out, "{text}");
    }
}
