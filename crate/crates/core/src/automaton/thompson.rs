//! Thompson construction (with ε edges).

use fixedbitset::FixedBitSet;

use super::parse::{Ast, ByteSet};

#[derive(Clone, Debug, Default)]
pub struct NState {
    pub eps: Vec<usize>,
    pub trans: Vec<(ByteSet, usize)>,
}

/// An automaton with ε edges, one start state and one accepting state.
#[derive(Clone, Debug)]
pub struct ThompsonNfa {
    pub states: Vec<NState>,
    pub start: usize,
    pub accept: usize,
}

impl ThompsonNfa {
    pub fn build(ast: &Ast) -> Self {
        let mut b = Builder { states: Vec::new() };
        // a fresh start state with no incoming edges
        let start = b.add();
        let (s, e) = b.fragment(ast);
        b.states[start].eps.push(s);
        ThompsonNfa {
            states: b.states,
            start,
            accept: e,
        }
    }

    pub fn closure(&self, set: &mut FixedBitSet) {
        let mut stack: Vec<usize> = set.ones().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.states[q].eps {
                if !set.put(t) {
                    stack.push(t);
                }
            }
        }
    }

    /// Subset simulation with ε-closures.
    pub fn accepts(&self, input: &[u8]) -> bool {
        let n = self.states.len();
        let mut cur = FixedBitSet::with_capacity(n);
        cur.insert(self.start);
        self.closure(&mut cur);
        for &b in input {
            let mut next = FixedBitSet::with_capacity(n);
            for q in cur.ones() {
                for (set, t) in &self.states[q].trans {
                    if set.contains(b) {
                        next.insert(*t);
                    }
                }
            }
            self.closure(&mut next);
            if next.is_clear() {
                return false;
            }
            cur = next;
        }
        cur.contains(self.accept)
    }
}

struct Builder {
    states: Vec<NState>,
}

impl Builder {
    fn add(&mut self) -> usize {
        self.states.push(NState::default());
        self.states.len() - 1
    }

    fn eps(&mut self, from: usize, to: usize) {
        self.states[from].eps.push(to);
    }

    /// Returns the (entry, exit) states of a fresh fragment for `ast`.
    fn fragment(&mut self, ast: &Ast) -> (usize, usize) {
        match ast {
            Ast::Empty => {
                let s = self.add();
                (s, s)
            }
            Ast::Class(set) => {
                let s = self.add();
                let e = self.add();
                self.states[s].trans.push((*set, e));
                (s, e)
            }
            Ast::Concat(items) => {
                let (start, mut end) = self.fragment(&items[0]);
                for item in &items[1..] {
                    let (s, e) = self.fragment(item);
                    self.eps(end, s);
                    end = e;
                }
                (start, end)
            }
            Ast::Alt(branches) => {
                let s = self.add();
                let e = self.add();
                for branch in branches {
                    let (bs, be) = self.fragment(branch);
                    self.eps(s, bs);
                    self.eps(be, e);
                }
                (s, e)
            }
            Ast::Repeat { node, min, max } => {
                let s = self.add();
                let mut end = s;
                for _ in 0..*min {
                    let (fs, fe) = self.fragment(node);
                    self.eps(end, fs);
                    end = fe;
                }
                match max {
                    None => {
                        // end -> (node)* -> e
                        let e = self.add();
                        let (fs, fe) = self.fragment(node);
                        self.eps(end, fs);
                        self.eps(end, e);
                        self.eps(fe, fs);
                        self.eps(fe, e);
                        (s, e)
                    }
                    Some(max) => {
                        let e = self.add();
                        self.eps(end, e);
                        for _ in *min..*max {
                            let (fs, fe) = self.fragment(node);
                            self.eps(end, fs);
                            self.eps(fe, e);
                            end = fe;
                        }
                        (s, e)
                    }
                }
            }
        }
    }
}
