use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::Indexed;
use crate::program::{GroundAtom, NormalProgram};

/// Clauses over variables `1..=num_vars`. The first `atom_vars` variables are
/// the program atoms in sorted order; the rest name rule bodies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    pub names: Vec<String>,
    pub atom_vars: usize,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Self {
        let names = (1..=num_vars).map(|v| format!("x{v}")).collect();
        CnfFormula { num_vars, clauses, names, atom_vars: num_vars }
    }

    pub fn name(&self, var: i32) -> &str {
        &self.names[var.unsigned_abs() as usize - 1]
    }
}

/// Builds the completion of a program and extends it with loop formulas.
#[derive(Debug, Clone)]
pub struct Encoder {
    pub(crate) ix: Indexed,
    cnf: CnfFormula,
    bodies: BTreeMap<Vec<i32>, i32>,
}

/// Sorts, deduplicates and drops tautologies.
fn normalize(mut clause: Vec<i32>) -> Option<Vec<i32>> {
    clause.sort_by_key(|&l| (l.unsigned_abs(), l > 0));
    clause.dedup();
    if clause.windows(2).any(|w| w[0] == -w[1]) {
        None
    } else {
        Some(clause)
    }
}

impl Encoder {
    pub fn new(program: &NormalProgram) -> Self {
        let ix = Indexed::new(program);
        let names: Vec<String> = ix.atoms.iter().map(ToString::to_string).collect();
        let atom_vars = names.len();
        let cnf = CnfFormula { num_vars: atom_vars, clauses: Vec::new(), names, atom_vars };
        let mut enc = Encoder { ix, cnf, bodies: BTreeMap::new() };
        enc.complete();
        enc
    }

    pub fn cnf(&self) -> &CnfFormula {
        &self.cnf
    }

    pub fn into_cnf(self) -> CnfFormula {
        self.cnf
    }

    pub(crate) fn add_clause(&mut self, clause: Vec<i32>) -> bool {
        match normalize(clause) {
            Some(c) => {
                self.cnf.clauses.push(c);
                true
            }
            None => false,
        }
    }

    fn body_lits(&self, rule: usize) -> Vec<i32> {
        let r = &self.ix.rules[rule];
        let mut lits: Vec<i32> = r.pos.iter().map(|&b| b as i32 + 1).chain(r.neg.iter().map(|&b| -(b as i32 + 1))).collect();
        lits.sort_by_key(|&l| (l.unsigned_abs(), l > 0));
        lits.dedup();
        lits
    }

    /// A literal equivalent to the body of `rule`; `None` for an empty body.
    fn body_literal(&mut self, rule: usize) -> Option<i32> {
        let lits = self.body_lits(rule);
        match lits.len() {
            0 => None,
            1 => Some(lits[0]),
            _ => {
                if let Some(&v) = self.bodies.get(&lits) {
                    return Some(v);
                }
                self.cnf.num_vars += 1;
                let v = self.cnf.num_vars as i32;
                let text: Vec<String> = lits
                    .iter()
                    .map(|&l| {
                        let name = &self.cnf.names[l.unsigned_abs() as usize - 1];
                        if l > 0 { name.clone() } else { format!("not {name}") }
                    })
                    .collect();
                self.cnf.names.push(format!("body({})", text.join(", ")));
                for &l in &lits {
                    self.add_clause(vec![-v, l]);
                }
                let mut back: Vec<i32> = lits.iter().map(|&l| -l).collect();
                back.push(v);
                self.add_clause(back);
                self.bodies.insert(lits, v);
                Some(v)
            }
        }
    }

    fn complete(&mut self) {
        let mut by_head: Vec<Vec<usize>> = vec![Vec::new(); self.ix.atoms.len()];
        let mut constraints = Vec::new();
        for (i, r) in self.ix.rules.iter().enumerate() {
            match r.head {
                Some(h) => by_head[h].push(i),
                None => constraints.push(i),
            }
        }
        for (atom, rules) in by_head.into_iter().enumerate() {
            let p = atom as i32 + 1;
            if rules.is_empty() {
                self.add_clause(vec![-p]);
                continue;
            }
            let mut support = vec![-p];
            let mut fact = false;
            for &r in &rules {
                match self.body_literal(r) {
                    None => fact = true,
                    Some(b) => {
                        support.push(b);
                        self.add_clause(vec![-b, p]);
                    }
                }
            }
            if fact {
                self.add_clause(vec![p]);
            } else {
                self.add_clause(support);
            }
        }
        for r in constraints {
            let clause = self.body_lits(r).into_iter().map(|l| -l).collect();
            if !self.add_clause(clause) {
                continue;
            }
        }
    }

    /// Checks a completion model and, when it is not stable, adds the loop
    /// formula of an unfounded loop it satisfies.
    pub fn loop_formula(&mut self, model: &[bool]) -> LoopCheck {
        let m = &model[..self.ix.atoms.len()];
        let least = self.ix.least_model(|r| r.neg.iter().all(|&b| !m[b]));
        let unfounded: Vec<usize> = (0..m.len()).filter(|&i| m[i] && !least[i]).collect();
        if unfounded.is_empty() {
            return LoopCheck::Stable;
        }
        let in_u: BTreeSet<usize> = unfounded.iter().copied().collect();
        let mut graph: DiGraph<usize, ()> = DiGraph::new();
        let nodes: BTreeMap<usize, NodeIndex> = unfounded.iter().map(|&a| (a, graph.add_node(a))).collect();
        for r in &self.ix.rules {
            let Some(h) = r.head else { continue };
            if !in_u.contains(&h) || !r.pos.iter().all(|&b| m[b]) || r.neg.iter().any(|&b| m[b]) {
                continue;
            }
            for b in r.pos.iter().filter(|b| in_u.contains(b)) {
                graph.update_edge(nodes[&h], nodes[b], ());
            }
        }
        // Tarjan lists components in reverse topological order, so the first
        // one has no edges into the others.
        let sink = tarjan_scc(&graph).into_iter().next().expect("nonempty graph");
        let members: BTreeSet<usize> = sink.iter().map(|&n| graph[n]).collect();
        let external: Vec<usize> = (0..self.ix.rules.len())
            .filter(|&i| {
                let r = &self.ix.rules[i];
                r.head.is_some_and(|h| members.contains(&h)) && r.pos.iter().all(|b| !members.contains(b))
            })
            .collect();
        let mut support = Vec::new();
        for r in external {
            match self.body_literal(r) {
                Some(b) => support.push(b),
                None => unreachable!("an atom with a fact is never unfounded"),
            }
        }
        let mut clauses = Vec::new();
        for &p in &members {
            let mut clause = vec![-(p as i32 + 1)];
            clause.extend(&support);
            if let Some(c) = normalize(clause) {
                self.cnf.clauses.push(c.clone());
                clauses.push(c);
            }
        }
        LoopCheck::Loop { atoms: members.iter().map(|&a| self.ix.atoms[a].clone()).collect(), clauses }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopCheck {
    Stable,
    Loop { atoms: Vec<GroundAtom>, clauses: Vec<Vec<i32>> },
}

/// `p <-> (body_1 | ... | body_k)` for every atom, plus one clause per
/// constraint. Bodies with several literals get a defined variable.
pub fn clark_completion(program: &NormalProgram) -> CnfFormula {
    Encoder::new(program).into_cnf()
}

/// Stability test of a completion model; adds loop clauses to `encoder`.
pub fn loop_formulas(encoder: &mut Encoder, model: &[bool]) -> LoopCheck {
    encoder.loop_formula(model)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tightness {
    pub tight: bool,
    /// A positive cycle, starting from its smallest atom, when not tight.
    pub cycle: Vec<GroundAtom>,
}

/// Acyclicity of the positive dependency graph (head to positive body).
pub fn tightness_check(program: &NormalProgram) -> Tightness {
    let ix = Indexed::new(program);
    let mut graph: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..ix.atoms.len()).map(|i| graph.add_node(i)).collect();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ix.atoms.len()];
    for r in &ix.rules {
        if let Some(h) = r.head {
            for &b in &r.pos {
                if succ[h].insert(b) {
                    graph.add_edge(nodes[h], nodes[b], ());
                }
            }
        }
    }
    let cyclic: Option<BTreeSet<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| scc.into_iter().map(|n| graph[n]).collect::<BTreeSet<usize>>())
        .filter(|scc| scc.len() > 1 || scc.iter().any(|&a| succ[a].contains(&a)))
        .min_by_key(|scc| *scc.iter().next().expect("components are nonempty"));
    let Some(scc) = cyclic else {
        return Tightness { tight: true, cycle: vec![] };
    };
    let mut path = vec![*scc.iter().next().expect("nonempty")];
    loop {
        let cur = *path.last().expect("nonempty path");
        let next = *succ[cur].iter().find(|b| scc.contains(b)).expect("strongly connected");
        if let Some(k) = path.iter().position(|&a| a == next) {
            let cycle = path[k..].iter().map(|&a| ix.atoms[a].clone()).collect();
            return Tightness { tight: false, cycle };
        }
        path.push(next);
    }
}

/// DIMACS text: header, one clause per line, then `c map` lines naming the
/// atom variables and `c body` lines naming the defined ones.
pub fn emit_dimacs(cnf: &CnfFormula) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    for v in 1..=cnf.num_vars {
        let kind = if v <= cnf.atom_vars { "map" } else { "body" };
        let _ = writeln!(out, "c {kind} {v} {}", cnf.names[v - 1]);
    }
    out
}
