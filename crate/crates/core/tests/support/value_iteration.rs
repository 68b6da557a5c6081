//! Value-iteration oracle for a 1-row corridor task, written from the task
//! rules alone: move along the row, collect X, Y, Z in order at their cells,
//! then save the victim. Shares no code with the environment or agents.

/// Reward magnitudes, copied in by the caller as plain numbers.
#[derive(Debug, Clone, Copy)]
pub struct Rewards {
    pub step: f64,
    pub blocked: f64,
    pub collect: f64,
    pub wrong: f64,
    pub rescue: f64,
}

/// Row of `len` cells: start at 0, X at 1, Y at 2, Z at 3, victim at `len - 1`.
pub struct Corridor {
    pub len: usize,
    pub rewards: Rewards,
    pub gamma: f64,
}

/// 14 actions in the order up, down, left, right, A, B, C, X, Y, Z, save,
/// use, remove, carry.
pub const ACTIONS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct S {
    pub col: usize,
    /// bit 2 = X, bit 1 = Y, bit 0 = Z
    pub flags: usize,
    pub saved: bool,
}

impl Corridor {
    pub fn states(&self) -> usize {
        self.len * 16
    }

    pub fn index(&self, s: S) -> usize {
        (s.col * 8 + s.flags) * 2 + s.saved as usize
    }

    pub fn decode(&self, i: usize) -> S {
        S { col: i / 16, flags: (i / 2) % 8, saved: i % 2 == 1 }
    }

    /// Bit of the first uncollected type, or None when all three are set.
    fn next_bit(flags: usize) -> Option<usize> {
        [4, 2, 1].into_iter().find(|b| flags & b == 0)
    }

    /// (reward, next state, terminal)
    pub fn transition(&self, s: S, a: usize) -> (f64, S, bool) {
        let r = self.rewards;
        match a {
            0 | 1 => (r.step + r.blocked, s, false),
            2 if s.col == 0 => (r.step + r.blocked, s, false),
            2 => (r.step, S { col: s.col - 1, ..s }, false),
            3 if s.col + 1 == self.len => (r.step + r.blocked, s, false),
            3 => (r.step, S { col: s.col + 1, ..s }, false),
            4..=9 => {
                // X, Y, Z are actions 7, 8, 9 and live at columns 1, 2, 3
                let bit = match (a, s.col) {
                    (7, 1) => Some(4),
                    (8, 2) => Some(2),
                    (9, 3) => Some(1),
                    _ => None,
                };
                match bit {
                    Some(b) if Self::next_bit(s.flags) == Some(b) => (r.step + r.collect, S { flags: s.flags | b, ..s }, false),
                    _ => (r.step + r.wrong, s, false),
                }
            }
            10 if s.col + 1 == self.len && s.flags == 7 && !s.saved => (r.step + r.rescue, S { saved: true, ..s }, true),
            _ => (r.step + r.wrong, s, false),
        }
    }

    /// Optimal state values; saved states are absorbing with value 0.
    pub fn solve(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.states()];
        loop {
            let mut delta: f64 = 0.0;
            for i in 0..self.states() {
                let s = self.decode(i);
                if s.saved {
                    continue;
                }
                let best = (0..ACTIONS).map(|a| self.q(&v, s, a)).fold(f64::NEG_INFINITY, f64::max);
                delta = delta.max((best - v[i]).abs());
                v[i] = best;
            }
            if delta < 1e-13 {
                return v;
            }
        }
    }

    pub fn q(&self, v: &[f64], s: S, a: usize) -> f64 {
        let (r, next, terminal) = self.transition(s, a);
        if terminal {
            r
        } else {
            r + self.gamma * v[self.index(next)]
        }
    }

    /// Optimal actions in `s` (all maximizers within `tol`).
    pub fn optimal_actions(&self, v: &[f64], s: S, tol: f64) -> Vec<usize> {
        let qs: Vec<f64> = (0..ACTIONS).map(|a| self.q(v, s, a)).collect();
        let best = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..ACTIONS).filter(|&a| qs[a] >= best - tol).collect()
    }
}
