use super::cnf::CnfFormula;
use super::SolveError;

const UNSET: i8 = 0;

fn lit_index(l: i32) -> usize {
    2 * (l.unsigned_abs() as usize) + usize::from(l < 0)
}

/// DPLL with two watched literals and chronological backtracking.
///
/// Branches on the lowest unassigned variable, trying false first. After a
/// model is returned, the next call resumes the search as if the model had
/// been excluded by a clause over its decisions, so models come out once
/// each, in a fixed order.
#[derive(Debug, Clone)]
pub struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<i32>,
    /// Trail length at each decision, and whether the decision was flipped.
    decisions: Vec<(usize, bool)>,
    head: usize,
    started: bool,
    exhausted: bool,
}

impl Dpll {
    pub fn new(cnf: &CnfFormula) -> Self {
        let mut s = Dpll {
            num_vars: cnf.num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * cnf.num_vars + 2],
            value: vec![UNSET; cnf.num_vars + 1],
            trail: Vec::new(),
            decisions: Vec::new(),
            head: 0,
            started: false,
            exhausted: false,
        };
        let mut units = Vec::new();
        for c in &cnf.clauses {
            match c.len() {
                0 => s.exhausted = true,
                1 => units.push(c[0]),
                _ => {
                    let i = s.clauses.len();
                    s.watches[lit_index(-c[0])].push(i);
                    s.watches[lit_index(-c[1])].push(i);
                    s.clauses.push(c.clone());
                }
            }
        }
        for u in units {
            match s.lit_value(u) {
                1 => {}
                -1 => s.exhausted = true,
                _ => s.assign(u),
            }
        }
        s
    }

    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 { v } else { -v }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Unit propagation; false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let l = self.trail[self.head];
            self.head += 1;
            // Clauses watching the literal that just became false.
            let watching = std::mem::take(&mut self.watches[lit_index(l)]);
            let mut keep = Vec::with_capacity(watching.len());
            let mut conflict = false;
            for (k, &ci) in watching.iter().enumerate() {
                if conflict {
                    keep.extend_from_slice(&watching[k..]);
                    break;
                }
                let clause = &mut self.clauses[ci];
                if clause[0] == -l {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.lit_value(other) == 1 {
                    keep.push(ci);
                    continue;
                }
                let replacement = (2..self.clauses[ci].len()).find(|&j| self.lit_value(self.clauses[ci][j]) != -1);
                match replacement {
                    Some(j) => {
                        self.clauses[ci].swap(1, j);
                        let w = self.clauses[ci][1];
                        self.watches[lit_index(-w)].push(ci);
                    }
                    None => {
                        keep.push(ci);
                        if self.lit_value(other) == -1 {
                            conflict = true;
                        } else {
                            self.assign(other);
                        }
                    }
                }
            }
            let slot = &mut self.watches[lit_index(l)];
            keep.append(slot);
            *slot = keep;
            if conflict {
                return false;
            }
        }
        true
    }

    /// Undoes decisions until one can be flipped; false when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some((mark, flipped)) = self.decisions.pop() {
            let decision = self.trail[mark];
            for &l in &self.trail[mark..] {
                self.value[l.unsigned_abs() as usize] = UNSET;
            }
            self.trail.truncate(mark);
            self.head = mark;
            if !flipped {
                self.decisions.push((mark, true));
                self.assign(-decision);
                return true;
            }
        }
        false
    }

    pub fn next_model(&mut self) -> Option<Vec<bool>> {
        if self.exhausted {
            return None;
        }
        if self.started && !self.backtrack() {
            self.exhausted = true;
            return None;
        }
        self.started = true;
        let mut next_var = 1;
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    self.exhausted = true;
                    return None;
                }
                next_var = 1;
                continue;
            }
            while next_var <= self.num_vars && self.value[next_var] != UNSET {
                next_var += 1;
            }
            if next_var > self.num_vars {
                return Some(self.value[1..].iter().map(|&v| v == 1).collect());
            }
            self.decisions.push((self.trail.len(), false));
            self.assign(-(next_var as i32));
        }
    }
}

/// Every model of `cnf`, in the solver's fixed order, each as a vector
/// indexed by `variable - 1`.
pub fn models(cnf: &CnfFormula, cap: usize) -> Result<Vec<Vec<bool>>, SolveError> {
    let mut solver = Dpll::new(cnf);
    let mut out = Vec::new();
    while let Some(m) = solver.next_model() {
        if out.len() == cap {
            return Err(SolveError::ModelCap { cap });
        }
        out.push(m);
    }
    Ok(out)
}
