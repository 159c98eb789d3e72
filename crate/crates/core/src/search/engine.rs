//! Layered forward saturation over distinct formulas.
//!
//! Layer `k` holds the formulas first derived at derivation depth `k`. Each
//! layer combines only applications with at least one parent from the
//! previous layer, so nothing is generated twice. Every application found is
//! kept as a hyperedge; the cheapest derivation of the goal (fewest steps
//! counted over the derivation tree) is read off with Knuth's generalization
//! of Dijkstra's algorithm.
//!
//! Inference rules whose result is determined by the parents run unrestricted.
//! Rules that can manufacture formulas without bound (replacement rewrites,
//! Conj and Add) only produce members of a per-search universe: subformulas of
//! anything reachable from the start set and the goal by at most
//! `rewrite_radius` rewrites.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::formula::{Formula, Site};
use crate::rules::schema::{self, directions};
use crate::rules::{Direction, RuleId};

type Id = u32;

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub rule: RuleId,
    /// Schema order.
    pub parents: Vec<Id>,
    pub result: Id,
    pub site: Option<Site>,
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Found,
    Exhausted,
    Truncated,
}

pub(crate) struct Limits {
    pub max_depth: usize,
    pub max_frontier: usize,
    pub max_formula_len: usize,
    pub rewrite_radius: usize,
    pub allow_contradiction: bool,
}

pub(crate) struct Engine<'a> {
    limits: &'a Limits,
    formulas: Vec<Formula>,
    ids: HashMap<Formula, Id>,
    start_count: usize,
    /// Formulas with id below this bound are usable as parents.
    known_end: usize,
    edges: Vec<Edge>,
    edges_by_parent: Vec<Vec<u32>>,
    impl_by_ante: HashMap<Formula, Vec<Id>>,
    impl_by_cons: HashMap<Formula, Vec<Id>>,
    disj_by_left: HashMap<Formula, Vec<Id>>,
    disj_by_right: HashMap<Formula, Vec<Id>>,
    universe: HashSet<Formula>,
    /// Universe conjunctions and disjunctions, keyed by each child.
    conj_by_child: HashMap<Formula, Vec<Formula>>,
    disj_by_child: HashMap<Formula, Vec<Formula>>,
    add_disjuncts: HashSet<Formula>,
    pub depth_reached: usize,
}

pub(crate) struct Derivation {
    pub outcome: Outcome,
    /// Steps in dependency order; parents below `start_count` are start
    /// formulas, others index earlier steps as `start_count + position`.
    pub steps: Vec<Edge>,
}

impl<'a> Engine<'a> {
    pub fn new(
        limits: &'a Limits,
        start: &[Formula],
        goal: &Formula,
        add_disjuncts: Vec<Formula>,
    ) -> Self {
        let mut engine = Engine {
            limits,
            formulas: Vec::new(),
            ids: HashMap::new(),
            start_count: 0,
            known_end: 0,
            edges: Vec::new(),
            edges_by_parent: Vec::new(),
            impl_by_ante: HashMap::new(),
            impl_by_cons: HashMap::new(),
            disj_by_left: HashMap::new(),
            disj_by_right: HashMap::new(),
            universe: HashSet::new(),
            conj_by_child: HashMap::new(),
            disj_by_child: HashMap::new(),
            add_disjuncts: add_disjuncts.into_iter().collect(),
            depth_reached: 0,
        };
        for f in start {
            engine.intern(f.clone());
        }
        engine.start_count = engine.formulas.len();
        engine.build_universe(goal);
        engine.index_range(0, engine.start_count);
        engine.known_end = engine.start_count;
        engine
    }

    fn build_universe(&mut self, goal: &Formula) {
        let mut seeds: Vec<Formula> = self.formulas.clone();
        if *goal != Formula::False {
            seeds.push(goal.clone());
        }
        let mut reached: HashSet<Formula> = seeds.iter().cloned().collect();
        let mut frontier = seeds;
        for _ in 0..self.limits.rewrite_radius {
            let mut next = Vec::new();
            for f in &frontier {
                for result in rewrites(f) {
                    if result.0.len() <= self.limits.max_formula_len && reached.insert(result.0.clone()) {
                        next.push(result.0);
                    }
                }
            }
            frontier = next;
        }
        for f in &reached {
            for sub in f.subformulas() {
                self.universe.insert(sub);
            }
        }
        let mut members: Vec<&Formula> = self.universe.iter().collect();
        members.sort();
        for f in members {
            match f {
                Formula::And(a, b) => {
                    self.conj_by_child.entry((**a).clone()).or_default().push(f.clone());
                    if a != b {
                        self.conj_by_child.entry((**b).clone()).or_default().push(f.clone());
                    }
                }
                Formula::Or(a, b) => {
                    self.disj_by_child.entry((**a).clone()).or_default().push(f.clone());
                    if a != b {
                        self.disj_by_child.entry((**b).clone()).or_default().push(f.clone());
                    }
                }
                _ => {}
            }
        }
    }

    fn intern(&mut self, f: Formula) -> (Id, bool) {
        if let Some(&id) = self.ids.get(&f) {
            return (id, false);
        }
        let id = self.formulas.len() as Id;
        self.ids.insert(f.clone(), id);
        self.formulas.push(f);
        self.edges_by_parent.push(Vec::new());
        (id, true)
    }

    fn index_range(&mut self, from: usize, to: usize) {
        for id in from..to {
            let f = self.formulas[id].clone();
            match &f {
                Formula::Implies(p, q) => {
                    self.impl_by_ante.entry((**p).clone()).or_default().push(id as Id);
                    self.impl_by_cons.entry((**q).clone()).or_default().push(id as Id);
                }
                Formula::Or(p, r) => {
                    self.disj_by_left.entry((**p).clone()).or_default().push(id as Id);
                    self.disj_by_right.entry((**r).clone()).or_default().push(id as Id);
                }
                _ => {}
            }
        }
    }

    fn known(&self, f: &Formula) -> Option<Id> {
        self.ids.get(f).copied().filter(|&id| (id as usize) < self.known_end)
    }

    pub fn formula(&self, id: Id) -> &Formula {
        &self.formulas[id as usize]
    }

    pub fn explored(&self) -> usize {
        self.formulas.len()
    }

    /// Runs layers until the goal has a provably cheapest derivation, the
    /// space is saturated, or a bound is hit.
    pub fn run(&mut self, goal: &Formula) -> Derivation {
        let mut layer_start = 0;
        if let Some(d) = self.try_goal(goal, 0) {
            return d;
        }
        for depth in 1..=self.limits.max_depth {
            self.depth_reached = depth;
            let layer_end = self.known_end;
            let produced = self.expand(layer_start, layer_end);
            self.index_range(layer_end, self.formulas.len());
            self.known_end = self.formulas.len();
            layer_start = layer_end;
            if let Some(d) = self.try_goal(goal, depth) {
                return d;
            }
            if self.formulas.len() > self.limits.max_frontier {
                return self.finish(goal, Outcome::Truncated);
            }
            if !produced {
                return self.finish(goal, Outcome::Exhausted);
            }
        }
        self.finish(goal, Outcome::Exhausted)
    }

    fn try_goal(&self, goal: &Formula, depth: usize) -> Option<Derivation> {
        let goal_id = self.known(goal)?;
        let (cost, best) = self.min_costs();
        let c = cost[goal_id as usize];
        (c as usize <= depth).then(|| Derivation {
            outcome: Outcome::Found,
            steps: self.extract(goal_id, &best),
        })
    }

    /// Out of budget or saturated: report the best derivation seen, if any.
    fn finish(&self, goal: &Formula, outcome: Outcome) -> Derivation {
        if let Some(goal_id) = self.known(goal) {
            let (_, best) = self.min_costs();
            return Derivation {
                outcome: Outcome::Found,
                steps: self.extract(goal_id, &best),
            };
        }
        Derivation { outcome, steps: Vec::new() }
    }

    fn min_costs(&self) -> (Vec<u32>, Vec<Option<u32>>) {
        let n = self.known_end;
        let mut cost = vec![u32::MAX; n];
        let mut best: Vec<Option<u32>> = vec![None; n];
        let mut remaining: Vec<usize> = self.edges.iter().map(|e| e.parents.len()).collect();
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        for (id, c) in cost.iter_mut().enumerate().take(self.start_count) {
            *c = 0;
            heap.push(Reverse((0u32, id as Id)));
        }
        while let Some(Reverse((c, id))) = heap.pop() {
            let i = id as usize;
            if settled[i] || c > cost[i] {
                continue;
            }
            settled[i] = true;
            for &e in &self.edges_by_parent[i] {
                let slot = &mut remaining[e as usize];
                *slot -= 1;
                if *slot > 0 {
                    continue;
                }
                let edge = &self.edges[e as usize];
                let r = edge.result as usize;
                if r >= n || settled[r] {
                    continue;
                }
                let total = edge
                    .parents
                    .iter()
                    .fold(1u32, |acc, &p| acc.saturating_add(cost[p as usize]));
                if total < cost[r] {
                    cost[r] = total;
                    best[r] = Some(e);
                    heap.push(Reverse((total, edge.result)));
                }
            }
        }
        (cost, best)
    }

    fn extract(&self, goal: Id, best: &[Option<u32>]) -> Vec<Edge> {
        let mut emitted: HashMap<Id, Id> = HashMap::new();
        let mut steps = Vec::new();
        self.emit(goal, best, &mut emitted, &mut steps);
        steps
    }

    fn emit(&self, id: Id, best: &[Option<u32>], emitted: &mut HashMap<Id, Id>, steps: &mut Vec<Edge>) -> Id {
        if (id as usize) < self.start_count {
            return id;
        }
        if let Some(&slot) = emitted.get(&id) {
            return slot;
        }
        let edge = &self.edges[best[id as usize].expect("derived formula has an edge") as usize];
        let parents = edge.parents.iter().map(|&p| self.emit(p, best, emitted, steps)).collect();
        let slot = (self.start_count + steps.len()) as Id;
        steps.push(Edge {
            rule: edge.rule,
            parents,
            result: id,
            site: edge.site.clone(),
            direction: edge.direction,
        });
        emitted.insert(id, slot);
        slot
    }

    /// Generates every application with a parent in `from..to`. Returns
    /// whether any new formula appeared.
    fn expand(&mut self, from: usize, to: usize) -> bool {
        let before = self.formulas.len();
        let mut seen: HashSet<(RuleId, Vec<Id>, Formula)> = HashSet::new();
        let mut pending: Vec<(RuleId, Vec<Id>, Formula, Option<Site>, Option<Direction>)> = Vec::new();
        let max_len = self.limits.max_formula_len;
        let mut add = |rule: RuleId, parents: Vec<Id>, result: Formula, site: Option<Site>, direction: Option<Direction>| {
            if result.len() <= max_len && seen.insert((rule, parents.clone(), result.clone())) {
                pending.push((rule, parents, result, site, direction));
            }
        };
        let new: Vec<(Id, Formula)> =
            (from..to).map(|i| (i as Id, self.formulas[i].clone())).collect();
        let lookup = |m: &HashMap<Formula, Vec<Id>>, k: &Formula| m.get(k).cloned().unwrap_or_default();

        for rule in RuleId::ALL {
            for (x, fx) in &new {
                let x = *x;
                match rule {
                    RuleId::MP => {
                        if let Formula::Implies(p, q) = fx {
                            if let Some(a) = self.known(p) {
                                add(rule, vec![x, a], (**q).clone(), None, None);
                            }
                        }
                        for i in lookup(&self.impl_by_ante, fx) {
                            if let Formula::Implies(_, q) = self.formula(i) {
                                add(rule, vec![i, x], (**q).clone(), None, None);
                            }
                        }
                    }
                    RuleId::MT => {
                        if let Formula::Implies(p, q) = fx {
                            if let Some(nq) = self.known(&Formula::Not(q.clone())) {
                                add(rule, vec![x, nq], Formula::Not(p.clone()), None, None);
                            }
                        }
                        if let Formula::Not(y) = fx {
                            for i in lookup(&self.impl_by_cons, y) {
                                if let Formula::Implies(p, _) = self.formula(i) {
                                    add(rule, vec![i, x], Formula::Not(p.clone()), None, None);
                                }
                            }
                        }
                    }
                    RuleId::DS => {
                        if let Formula::Or(p, q) = fx {
                            if let Some(np) = self.known(&Formula::Not(p.clone())) {
                                add(rule, vec![x, np], (**q).clone(), None, None);
                            }
                        }
                        if let Formula::Not(y) = fx {
                            for d in lookup(&self.disj_by_left, y) {
                                if let Formula::Or(_, q) = self.formula(d) {
                                    add(rule, vec![d, x], (**q).clone(), None, None);
                                }
                            }
                        }
                    }
                    RuleId::HS => {
                        if let Formula::Implies(p, q) = fx {
                            for j in lookup(&self.impl_by_ante, q) {
                                if j == x {
                                    continue;
                                }
                                if let Some(r) = schema::hypothetical_syllogism(fx, self.formula(j)) {
                                    add(rule, vec![x, j], r, None, None);
                                }
                            }
                            for j in lookup(&self.impl_by_cons, p) {
                                if j == x {
                                    continue;
                                }
                                if let Some(r) = schema::hypothetical_syllogism(self.formula(j), fx) {
                                    add(rule, vec![j, x], r, None, None);
                                }
                            }
                        }
                    }
                    RuleId::Simp => {
                        if let Some(r) = schema::simplification(fx) {
                            add(rule, vec![x], r, None, None);
                        }
                    }
                    RuleId::Conj => {
                        for c in self.conj_by_child.get(fx).cloned().unwrap_or_default() {
                            if let Formula::And(a, b) = &c {
                                if let (Some(ia), Some(ib)) = (self.known(a), self.known(b)) {
                                    add(rule, vec![ia, ib], c.clone(), None, None);
                                }
                            }
                        }
                    }
                    RuleId::Add => {
                        for d in self.disj_by_child.get(fx).cloned().unwrap_or_default() {
                            if let Formula::Or(a, b) = &d {
                                if **a == *fx && self.add_disjuncts.contains(&**b)
                                    || **b == *fx && self.add_disjuncts.contains(&**a)
                                {
                                    add(rule, vec![x], d.clone(), None, None);
                                }
                            }
                        }
                    }
                    RuleId::CD => {
                        if let Formula::Implies(p, _) = fx {
                            // x as the first implication.
                            for d in lookup(&self.disj_by_left, p) {
                                if let Formula::Or(_, r) = self.formula(d) {
                                    for j in lookup(&self.impl_by_ante, r) {
                                        self.dilemma(x, j, d, &mut add);
                                    }
                                }
                            }
                            // x as the second implication.
                            for d in lookup(&self.disj_by_right, p) {
                                if let Formula::Or(q, _) = self.formula(d) {
                                    for i in lookup(&self.impl_by_ante, q) {
                                        self.dilemma(i, x, d, &mut add);
                                    }
                                }
                            }
                        }
                        if let Formula::Or(p, r) = fx {
                            for i in lookup(&self.impl_by_ante, p) {
                                for j in lookup(&self.impl_by_ante, r) {
                                    self.dilemma(i, j, x, &mut add);
                                }
                            }
                        }
                    }
                    RuleId::Com | RuleId::DeM | RuleId::Impl | RuleId::DN | RuleId::CP => {
                        for site in fx.sites() {
                            for &direction in directions(rule) {
                                if let Some(r) = schema::rewrite_at(rule, direction, fx, &site) {
                                    if self.universe.contains(&r) {
                                        add(rule, vec![x], r, Some(site.clone()), Some(direction));
                                    }
                                }
                            }
                        }
                    }
                    RuleId::Contra => {
                        if !self.limits.allow_contradiction {
                            continue;
                        }
                        if let Some(n) = self.known(&Formula::not(fx.clone())) {
                            add(rule, vec![x, n], Formula::False, None, None);
                        }
                        if let Formula::Not(y) = fx {
                            if let Some(p) = self.known(y) {
                                add(rule, vec![p, x], Formula::False, None, None);
                            }
                        }
                    }
                }
            }
        }

        for (rule, parents, result, site, direction) in pending {
            let (rid, _) = self.intern(result);
            let e = self.edges.len() as u32;
            for &p in &parents {
                self.edges_by_parent[p as usize].push(e);
            }
            self.edges.push(Edge { rule, parents, result: rid, site, direction });
        }
        self.formulas.len() > before
    }

    fn dilemma(
        &self,
        i: Id,
        j: Id,
        d: Id,
        add: &mut impl FnMut(RuleId, Vec<Id>, Formula, Option<Site>, Option<Direction>),
    ) {
        if i == j {
            return;
        }
        if let Some(r) = schema::constructive_dilemma(self.formula(i), self.formula(j), self.formula(d)) {
            add(RuleId::CD, vec![i, j, d], r, None, None);
        }
    }
}

/// Every single rewrite of `f` at any site, in rule/site/direction order.
fn rewrites(f: &Formula) -> Vec<(Formula, RuleId)> {
    let mut out = Vec::new();
    let sites = f.sites();
    for rule in RuleId::ALL.into_iter().filter(|r| r.is_replacement()) {
        for site in &sites {
            for &direction in directions(rule) {
                if let Some(r) = schema::rewrite_at(rule, direction, f, site) {
                    out.push((r, rule));
                }
            }
        }
    }
    out
}
