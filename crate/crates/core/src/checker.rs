//! Verification engine: product of the symbolic transition system with the
//! Büchi automaton of the negated property, searched by nested DFS.

mod oracle;

pub use oracle::{partition_oracle_check, OracleVerdict, ORACLE_MAX_EXPRESSIONS};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::buchi::{eval_lasso, translate, BuchiAutomaton, Ltl};
use crate::model::{
    collect_constants, desugar_exists, eliminate_globals, validate, validate_property, LtlFo, ModelError, Prop, TasSpec,
};
use crate::optimize::{
    build_constraint_graph, ldt_rewrite, minimize_assignment_sets, naive_assignment_sets, ConstraintGraph,
};
use crate::symbolic::{
    build_navigation_set, compile_condition, CompiledService, ExprCond, Mode, SymbolicError, SymbolicState,
    TransitionSystem,
};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("navigation set has {0} expressions, the partition oracle accepts at most {ORACLE_MAX_EXPRESSIONS}")]
    OracleTooLarge(usize),
    #[error("property has {0} atoms, at most 64 are supported")]
    TooManyAtoms(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub mode: Mode,
    /// Assignment set minimization on or off.
    pub asm: bool,
    /// Bound on visited product states, and on distinct system states
    /// generated while expanding them.
    pub max_states: usize,
    pub max_seconds: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { mode: Mode::Ldt, asm: true, max_states: 5_000_000, max_seconds: 600 }
    }
}

impl CheckOptions {
    pub fn new(mode: Mode, asm: bool) -> Self {
        CheckOptions { mode, asm, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    States,
    Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LassoStep {
    /// Service that produced the snapshot; `init` for the first one.
    pub service: String,
    /// Expression name to value tag, for every non-constant expression.
    pub assignments: BTreeMap<String, String>,
}

/// A counterexample `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<LassoStep>,
    pub cycle: Vec<LassoStep>,
}

impl Lasso {
    pub fn steps(&self) -> impl Iterator<Item = &LassoStep> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lasso serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Lasso> {
        serde_json::from_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated(Lasso),
    ResourceLimit { kind: LimitKind, visited: usize },
}

impl Verdict {
    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated(_))
    }

    pub fn lasso(&self) -> Option<&Lasso> {
        match self {
            Verdict::Violated(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Violated(_) => f.write_str("violated"),
            Verdict::ResourceLimit { kind: LimitKind::States, .. } => f.write_str("limit-states"),
            Verdict::ResourceLimit { kind: LimitKind::Time, .. } => f.write_str("limit-time"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    /// Distinct product states.
    pub states: usize,
    /// Distinct symbolic states of the system.
    pub system_states: usize,
    /// Product transitions explored, over both passes.
    pub transitions: usize,
    pub peak_frontier: usize,
    pub elapsed: Duration,
    pub navigation_size: usize,
    pub avg_pool: f64,
    pub buchi_states: usize,
    pub mode: Option<Mode>,
    pub asm: bool,
}

/// Evaluation of one property atom on a symbolic state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomEval {
    Cond(ExprCond),
    /// Holds iff `last_service` equals this index.
    Service(u16),
}

/// Everything the search needs, after the normalization pipeline.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub system: TransitionSystem,
    pub graph: ConstraintGraph,
    pub automaton: BuchiAutomaton,
    pub atoms: Vec<AtomEval>,
    /// The negated property over atom indices.
    pub negated: Ltl<usize>,
    /// The property after global elimination.
    pub property: LtlFo,
    /// The system after global elimination and existential desugaring.
    pub spec: TasSpec,
}

impl Prepared {
    pub fn letter(&self, s: &SymbolicState) -> u64 {
        let mut bits = 0u64;
        for (i, a) in self.atoms.iter().enumerate() {
            let holds = match a {
                AtomEval::Cond(c) => c.eval(&s.values),
                AtomEval::Service(j) => s.last_service == *j,
            };
            if holds {
                bits |= 1 << i;
            }
        }
        bits
    }
}

fn check_valid(spec: &TasSpec, prop: &LtlFo) -> Result<(), CheckError> {
    let mut report = validate(spec);
    report.diagnostics.extend(validate_property(spec, prop).diagnostics);
    if report.is_valid() {
        Ok(())
    } else {
        let msgs: Vec<String> =
            report.diagnostics.iter().map(|d| format!("{:?} at {}: {}", d.code, d.location, d.message)).collect();
        Err(CheckError::Invalid(msgs.join("; ")))
    }
}

/// Runs global elimination, existential desugaring, compilation, the mode
/// rewrite, pool construction and the Büchi translation of `!prop`.
pub fn prepare(spec: &TasSpec, prop: &LtlFo, mode: Mode, asm: bool) -> Result<Prepared, CheckError> {
    check_valid(spec, prop)?;
    let ge = eliminate_globals(spec, prop);
    let spec = desugar_exists(&ge.spec)?;
    let property = ge.property;
    let constants = collect_constants(&spec, &[&property]);
    let nav = build_navigation_set(&spec.schema, &spec.variables, &constants);
    let rewrite = |c: &crate::model::Condition| -> Result<ExprCond, CheckError> {
        let e = compile_condition(&spec.schema, &nav, c)?;
        Ok(match mode {
            Mode::Ldt => ldt_rewrite(&nav, &e),
            Mode::Naive => e.nnf(),
        })
    };
    let init = rewrite(&spec.init)?;
    let mut services = Vec::new();
    for s in &spec.services {
        let propagated =
            s.propagated.iter().map(|v| nav.var_index(v).expect("validated propagated variable")).collect();
        services.push(CompiledService {
            name: s.name.clone(),
            pre: rewrite(&s.pre)?,
            post: rewrite(&s.post)?,
            propagated,
        });
    }
    let (automaton, table) = translate(&Ltl::not(property.formula.clone()));
    if table.len() > 64 {
        return Err(CheckError::TooManyAtoms(table.len()));
    }
    let mut atoms = Vec::new();
    for p in &table {
        atoms.push(match p {
            Prop::Cond(c) => AtomEval::Cond(rewrite(c)?),
            Prop::Service(name) => {
                let j = spec.services.iter().position(|s| &s.name == name).expect("validated service");
                AtomEval::Service(j as u16 + 1)
            }
        });
    }
    let negated = Ltl::not(property.formula.clone())
        .map_atoms(&mut |p: &Prop| table.iter().position(|x| x == p).expect("atom interned"));
    let mut conds: Vec<&ExprCond> = vec![&init];
    for s in &services {
        conds.push(&s.pre);
        conds.push(&s.post);
    }
    // Letters fix every atom's truth value, so both polarities constrain pools.
    let mut negated_atoms = Vec::new();
    for p in &table {
        if let Prop::Cond(c) = p {
            negated_atoms.push(rewrite(&crate::model::Condition::not(c.clone()))?);
        }
    }
    for a in &atoms {
        if let AtomEval::Cond(c) = a {
            conds.push(c);
        }
    }
    conds.extend(negated_atoms.iter());
    let graph = build_constraint_graph(&nav, &conds, mode);
    let pools = if asm { minimize_assignment_sets(&graph, &nav) } else { naive_assignment_sets(&nav) };
    let system = TransitionSystem::new(nav, init, services, pools, mode);
    Ok(Prepared { system, graph, automaton, atoms, negated, property, spec })
}

/// Checks `prop` on `spec`. `Holds` iff no reachable accepting lasso of the
/// product exists.
pub fn check(spec: &TasSpec, prop: &LtlFo, opts: &CheckOptions) -> Result<(Verdict, CheckStats), CheckError> {
    let prep = prepare(spec, prop, opts.mode, opts.asm)?;
    Ok(search(&prep, opts))
}

type Node = u64;

fn node(sys: u32, q: u32) -> Node {
    ((sys as u64) << 32) | q as u64
}

fn split(n: Node) -> (u32, u32) {
    ((n >> 32) as u32, n as u32)
}

/// Set of product nodes as one bit row per system state.
struct NodeSet {
    words: usize,
    bits: Vec<u64>,
    len: usize,
}

impl NodeSet {
    fn new(buchi_states: usize) -> Self {
        NodeSet { words: buchi_states.div_ceil(64).max(1), bits: Vec::new(), len: 0 }
    }

    fn insert(&mut self, n: Node) -> bool {
        let (s, q) = split(n);
        let i = s as usize * self.words + q as usize / 64;
        if i >= self.bits.len() {
            self.bits.resize((i + 1).max(self.bits.len() * 2), 0);
        }
        let mask = 1u64 << (q % 64);
        if self.bits[i] & mask != 0 {
            return false;
        }
        self.bits[i] |= mask;
        self.len += 1;
        true
    }

    fn len(&self) -> usize {
        self.len
    }
}

struct Search<'a> {
    prep: &'a Prepared,
    index: HashMap<SymbolicState, u32>,
    states: Vec<SymbolicState>,
    letters: Vec<u64>,
    succ: Vec<Option<Rc<[u32]>>>,
    transitions: usize,
    max_states: usize,
    start: Instant,
    limit: Duration,
    aborted: Option<LimitKind>,
}

impl<'a> Search<'a> {
    fn intern(&mut self, s: SymbolicState) -> u32 {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        debug_assert!(
            self.prep.system.mode == Mode::Ldt
                || crate::symbolic::is_congruent(&self.prep.system.constraints, &s.values),
            "naive search reached a non-congruent state"
        );
        let i = self.states.len() as u32;
        self.letters.push(self.prep.letter(&s));
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.succ.push(None);
        i
    }

    /// Successor ids of system state `i`. Sets `aborted` and returns a
    /// partial list once a limit is hit mid-enumeration.
    fn system_successors(&mut self, i: u32) -> Rc<[u32]> {
        if let Some(v) = &self.succ[i as usize] {
            return Rc::clone(v);
        }
        let prep = self.prep;
        let state = self.states[i as usize].clone();
        let mut ids = Vec::new();
        let mut emitted = 0usize;
        for j in 0..prep.system.services.len() {
            let complete = prep.system.try_for_each_successor(&state, j, &mut |s| {
                ids.push(self.intern(s));
                emitted += 1;
                if self.states.len() > self.max_states {
                    self.aborted = Some(LimitKind::States);
                } else if emitted.is_multiple_of(4096) && self.start.elapsed() > self.limit {
                    self.aborted = Some(LimitKind::Time);
                }
                self.aborted.is_none()
            });
            if !complete {
                return ids.into();
            }
        }
        let ids: Rc<[u32]> = ids.into();
        self.succ[i as usize] = Some(Rc::clone(&ids));
        ids
    }

    fn product_successors(&mut self, n: Node) -> Vec<Node> {
        let (s, q) = split(n);
        let succ = self.system_successors(s);
        let aut = &self.prep.automaton;
        // Automaton moves per distinct letter; successors share few letters.
        let mut moves: Vec<(u64, Vec<u32>)> = Vec::new();
        let mut out = Vec::new();
        for &t in succ.iter() {
            let letter = self.letters[t as usize];
            let k = match moves.iter().position(|m| m.0 == letter) {
                Some(k) => k,
                None => {
                    let rs = aut.successors[q as usize]
                        .iter()
                        .filter(|&&r| aut.labels[r].matches(letter))
                        .map(|&r| r as u32)
                        .collect();
                    moves.push((letter, rs));
                    moves.len() - 1
                }
            };
            out.extend(moves[k].1.iter().map(|&r| node(t, r)));
        }
        self.transitions += out.len();
        out
    }

    fn accepting(&self, n: Node) -> bool {
        self.prep.automaton.accepting[split(n).1 as usize]
    }

    fn step(&self, n: Node) -> LassoStep {
        let s = &self.states[split(n).0 as usize];
        let sys = &self.prep.system;
        let nav = &sys.nav;
        LassoStep {
            service: sys.service_name(s.last_service).to_string(),
            assignments: (0..nav.num_paths() as u32)
                .map(|e| (nav.name(e), nav.value_tag(e, s.values[e as usize])))
                .collect(),
        }
    }
}

fn search(prep: &Prepared, opts: &CheckOptions) -> (Verdict, CheckStats) {
    let start = Instant::now();
    let limit = Duration::from_secs(opts.max_seconds);
    let mut st = Search {
        prep,
        index: HashMap::new(),
        states: Vec::new(),
        letters: Vec::new(),
        succ: Vec::new(),
        transitions: 0,
        max_states: opts.max_states,
        start,
        limit,
        aborted: None,
    };
    let aut = &prep.automaton;
    let mut roots = Vec::new();
    prep.system.try_for_each_initial(&mut |s| {
        let i = st.intern(s);
        for &q in &aut.initial {
            if aut.labels[q].matches(st.letters[i as usize]) {
                roots.push(node(i, q as u32));
            }
        }
        if st.states.len() > opts.max_states {
            st.aborted = Some(LimitKind::States);
        }
        st.aborted.is_none()
    });

    let mut visited1 = NodeSet::new(aut.num_states());
    let mut visited2 = NodeSet::new(aut.num_states());
    let mut peak = 0usize;
    let mut verdict = Verdict::Holds;

    if let Some(kind) = st.aborted {
        roots.clear();
        verdict = Verdict::ResourceLimit { kind, visited: 0 };
    }
    'outer: for root in roots {
        if !visited1.insert(root) {
            continue;
        }
        let mut stack: Vec<(Node, Vec<Node>, usize)> = vec![(root, st.product_successors(root), 0)];
        while let Some(top) = stack.last_mut() {
            if let Some(kind) = st.aborted {
                verdict = Verdict::ResourceLimit { kind, visited: visited1.len() };
                break 'outer;
            }
            if top.2 < top.1.len() {
                let m = top.1[top.2];
                top.2 += 1;
                if visited1.insert(m) {
                    if visited1.len() > opts.max_states {
                        verdict = Verdict::ResourceLimit { kind: LimitKind::States, visited: visited1.len() };
                        break 'outer;
                    }
                    if visited1.len().is_multiple_of(1024) && start.elapsed() > limit {
                        verdict = Verdict::ResourceLimit { kind: LimitKind::Time, visited: visited1.len() };
                        break 'outer;
                    }
                    let succ = st.product_successors(m);
                    stack.push((m, succ, 0));
                    peak = peak.max(stack.len());
                }
                continue;
            }
            let (seed, _, _) = stack.pop().expect("non-empty stack");
            if st.accepting(seed) {
                let cycle = inner_dfs(&mut st, seed, &mut visited2);
                if let Some(kind) = st.aborted {
                    verdict = Verdict::ResourceLimit { kind, visited: visited1.len() };
                    break 'outer;
                }
                if let Some(cycle) = cycle {
                    let prefix: Vec<LassoStep> = stack.iter().map(|f| st.step(f.0)).collect();
                    let cycle: Vec<LassoStep> = cycle.iter().map(|&n| st.step(n)).collect();
                    verdict = Verdict::Violated(Lasso { prefix, cycle });
                    break 'outer;
                }
            }
        }
    }

    let stats = CheckStats {
        states: visited1.len(),
        system_states: st.states.len(),
        transitions: st.transitions,
        peak_frontier: peak,
        elapsed: start.elapsed(),
        navigation_size: prep.system.nav.len(),
        avg_pool: prep.system.pools.average_size(&prep.system.nav),
        buchi_states: aut.num_states(),
        mode: Some(prep.system.mode),
        asm: opts.asm,
    };
    (verdict, stats)
}

/// Second pass: a path from `seed` back to `seed`, as the list of nodes
/// starting at `seed`.
fn inner_dfs(st: &mut Search<'_>, seed: Node, visited: &mut NodeSet) -> Option<Vec<Node>> {
    let mut stack: Vec<(Node, Vec<Node>, usize)> = vec![(seed, st.product_successors(seed), 0)];
    while let Some(top) = stack.last_mut() {
        if top.2 < top.1.len() {
            let m = top.1[top.2];
            top.2 += 1;
            if m == seed {
                return Some(stack.iter().map(|f| f.0).collect());
            }
            if visited.insert(m) {
                let succ = st.product_successors(m);
                if st.aborted.is_some() {
                    return None;
                }
                stack.push((m, succ, 0));
            }
            continue;
        }
        stack.pop();
    }
    None
}

/// Why a lasso failed to replay.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("lasso cycle is empty")]
    EmptyCycle,
    #[error("step {0}: unknown service `{1}`")]
    UnknownService(usize, String),
    #[error("step {0}: bad assignment for `{1}`")]
    BadAssignment(usize, String),
    #[error("step 0 is not an initial state")]
    NotInitial,
    #[error("step {0} is not a valid transition")]
    BadTransition(usize),
    #[error("cycle does not close")]
    OpenCycle,
    #[error("lasso does not violate the property")]
    NotAViolation,
}

/// Validates a counterexample: the first step is initial, consecutive steps
/// are transitions, the cycle closes and the lasso satisfies `!prop`.
/// Assignment sets are not consulted.
pub fn replay(spec: &TasSpec, prop: &LtlFo, lasso: &Lasso, mode: Mode) -> Result<(), ReplayError> {
    if lasso.cycle.is_empty() {
        return Err(ReplayError::EmptyCycle);
    }
    let prep = prepare(spec, prop, mode, false).map_err(|_| ReplayError::NotAViolation)?;
    let sys = &prep.system;
    let nav = &sys.nav;
    let mut states = Vec::new();
    for (i, step) in lasso.steps().enumerate() {
        let last = if step.service == "init" {
            0
        } else {
            match sys.services.iter().position(|s| s.name == step.service) {
                Some(j) => j as u16 + 1,
                None => return Err(ReplayError::UnknownService(i, step.service.clone())),
            }
        };
        let mut values: Vec<u16> = (0..nav.len() as u32).map(|e| nav.const_value(e).unwrap_or(0)).collect();
        if step.assignments.len() != nav.num_paths() {
            return Err(ReplayError::BadAssignment(i, "<count>".into()));
        }
        for (name, tag) in &step.assignments {
            let e = nav
                .index_of(name)
                .filter(|&e| !nav.is_const(e))
                .ok_or_else(|| ReplayError::BadAssignment(i, name.clone()))?;
            values[e as usize] =
                nav.parse_value_tag(e, tag).ok_or_else(|| ReplayError::BadAssignment(i, name.clone()))?;
        }
        states.push(SymbolicState { values, last_service: last });
    }
    if !sys.is_initial(&states[0]) {
        return Err(ReplayError::NotInitial);
    }
    let valid = |from: &SymbolicState, to: &SymbolicState| {
        to.last_service > 0 && sys.is_transition(from, to.last_service as usize - 1, to)
    };
    for i in 1..states.len() {
        if !valid(&states[i - 1], &states[i]) {
            return Err(ReplayError::BadTransition(i));
        }
    }
    let p = lasso.prefix.len();
    if !valid(states.last().unwrap(), &states[p]) {
        return Err(ReplayError::OpenCycle);
    }
    let letters: Vec<u64> = states.iter().map(|s| prep.letter(s)).collect();
    let holds = |l: &u64, a: &usize| l & (1 << a) != 0;
    if !eval_lasso(&prep.negated, &letters[..p], &letters[p..], &holds) {
        return Err(ReplayError::NotAViolation);
    }
    Ok(())
}
