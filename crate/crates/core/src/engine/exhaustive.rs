use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;

use crate::aggregation::{Aggregation, Bond, CanonicalForm, Endpoint, Member};
use crate::detector::isomorphism::SimpleGraph;
use crate::detector::{LabelMode, ProbeOperationGraph, TargetGraph};
use crate::model::{DataLibrary, FiberDiscipline, FiberType, ProbeLibrary, ProbeType};

/// Every distinct aggregation isomorphic to one of the acceptance targets,
/// assuming unlimited copies of every data and probe type.
///
/// The search assigns one data type per target vertex (in BFS order, each new
/// vertex drawn from the probe-neighbours of its parent) and one probe type
/// per target edge, subject to fiber consistency, the fiber discipline and
/// type uniqueness. For unlabeled targets, symmetric embeddings are pruned:
/// the root must carry the smallest type in its automorphism orbit, and the
/// second vertex the smallest in its orbit under the root's stabilizer. Some
/// embedding of every aggregation satisfies both. Results are deduplicated by
/// canonical form and returned in canonical order.
pub fn enumerate_exhaustive(
    data: &DataLibrary,
    probes: &ProbeLibrary,
    target: &ProbeOperationGraph,
) -> Vec<Aggregation> {
    let index = Index::new(data, probes);
    let mut found: BTreeMap<CanonicalForm, Aggregation> = BTreeMap::new();
    for t in target.targets() {
        let plan = Plan::new(t, target.mode(), &index);
        let Some(plan) = plan else { continue };
        let roots = plan.root_candidates(&index);
        let partials: Vec<BTreeMap<CanonicalForm, Aggregation>> = roots
            .par_iter()
            .map(|&root| {
                let mut search = Search::new(&index, &plan);
                search.start(root);
                search.found
            })
            .collect();
        for part in partials {
            found.extend(part);
        }
    }
    found.into_values().collect()
}

/// A probe with the fibers it takes on the first and second type of a pair.
type Joint = (ProbeType, FiberType, FiberType);

struct Index {
    discipline: FiberDiscipline,
    bodies: Vec<u32>,
    fiber_counts: Vec<usize>,
    /// `(type, type)` -> probes joining them, with the fiber on each side.
    pairs: HashMap<(usize, usize), Vec<Joint>>,
    /// Types sharing at least one probe, sorted.
    neighbours: Vec<Vec<usize>>,
}

impl Index {
    fn new(data: &DataLibrary, probes: &ProbeLibrary) -> Self {
        let bodies: Vec<u32> = data.bodies().collect();
        let position: HashMap<u32, usize> =
            bodies.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let mut pairs: HashMap<(usize, usize), Vec<_>> = HashMap::new();
        let mut neighbours = vec![Vec::new(); bodies.len()];
        for probe in probes.probes() {
            if !data.contains_fiber(probe.a()) || !data.contains_fiber(probe.b()) {
                continue;
            }
            let (x, y) = (position[&probe.a().owner], position[&probe.b().owner]);
            if x == y {
                continue;
            }
            pairs.entry((x, y)).or_default().push((*probe, probe.a(), probe.b()));
            pairs.entry((y, x)).or_default().push((*probe, probe.b(), probe.a()));
            neighbours[x].push(y);
            neighbours[y].push(x);
        }
        for ns in &mut neighbours {
            ns.sort_unstable();
            ns.dedup();
        }
        Self {
            discipline: data.discipline,
            fiber_counts: data.types.iter().map(|t| t.fiber_count()).collect(),
            bodies,
            pairs,
            neighbours,
        }
    }
}

struct Plan {
    /// Target vertices in BFS order.
    order: Vec<usize>,
    /// For each position, earlier target vertices adjacent to it (parent first).
    back: Vec<Vec<usize>>,
    degree: Vec<usize>,
    /// Fixed data type per target vertex in labeled mode.
    fixed: Option<Vec<usize>>,
    /// Target vertices whose type each vertex must exceed.
    exceeds: Vec<Vec<usize>>,
}

impl Plan {
    fn new(t: &TargetGraph, mode: LabelMode, index: &Index) -> Option<Self> {
        let g = t.graph();
        let mut seen = vec![false; g.n()];
        let mut order = Vec::with_capacity(g.n());
        let mut parent = vec![usize::MAX; g.n()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut pos = vec![usize::MAX; g.n()];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let back = order
            .iter()
            .map(|&v| {
                let mut earlier: Vec<usize> = g
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&u| pos[u] < pos[v] && u != parent[v])
                    .collect();
                if parent[v] != usize::MAX {
                    earlier.insert(0, parent[v]);
                }
                earlier
            })
            .collect();
        let fixed = match (mode, t.labels()) {
            (LabelMode::BodyLabeled, Some(labels)) => {
                let mut out = Vec::with_capacity(labels.len());
                for body in labels {
                    out.push(index.bodies.iter().position(|b| b == body)?);
                }
                Some(out)
            }
            _ => None,
        };
        let mut exceeds = vec![Vec::new(); g.n()];
        if fixed.is_none() {
            let root = order[0];
            for (w, ex) in exceeds.iter_mut().enumerate() {
                if w != root && automorphism_exists(g, &[(root, w)]) {
                    ex.push(root);
                }
            }
            if let Some(&second) = order.get(1) {
                for (w, ex) in exceeds.iter_mut().enumerate() {
                    if w != root && w != second && automorphism_exists(g, &[(root, root), (second, w)]) {
                        ex.push(second);
                    }
                }
            }
        }
        Some(Self {
            degree: (0..g.n()).map(|v| g.degree(v)).collect(),
            order,
            back,
            fixed,
            exceeds,
        })
    }

    fn root_candidates(&self, index: &Index) -> Vec<usize> {
        let root = self.order[0];
        match &self.fixed {
            Some(fixed) => vec![fixed[root]],
            None => (0..index.bodies.len()).collect(),
        }
    }
}

struct Search<'a> {
    index: &'a Index,
    plan: &'a Plan,
    assign: Vec<usize>,
    used: Vec<bool>,
    /// Per target vertex: bonds through each fiber (index - 1).
    fiber_use: Vec<Vec<u32>>,
    bonds: Vec<(usize, usize, ProbeType, FiberType, FiberType)>,
    found: BTreeMap<CanonicalForm, Aggregation>,
}

impl<'a> Search<'a> {
    fn new(index: &'a Index, plan: &'a Plan) -> Self {
        let k = plan.order.len();
        Self {
            index,
            plan,
            assign: vec![usize::MAX; k],
            used: vec![false; index.bodies.len()],
            fiber_use: vec![Vec::new(); k],
            bonds: Vec::new(),
            found: BTreeMap::new(),
        }
    }

    fn start(&mut self, root: usize) {
        let v = self.plan.order[0];
        if self.admissible(v, root) {
            self.enter(v, root);
            self.bond_back(0, 0);
            self.leave(v, root);
        }
    }

    fn admissible(&self, v: usize, ty: usize) -> bool {
        if self.used[ty] {
            return false;
        }
        if let Some(fixed) = &self.plan.fixed {
            if fixed[v] != ty {
                return false;
            }
        }
        if self.plan.exceeds[v].iter().any(|&u| ty < self.assign[u]) {
            return false;
        }
        match self.index.discipline {
            FiberDiscipline::Exclusive => self.index.fiber_counts[ty] >= self.plan.degree[v],
            FiberDiscipline::Committed => true,
        }
    }

    fn enter(&mut self, v: usize, ty: usize) {
        self.assign[v] = ty;
        self.used[ty] = true;
        self.fiber_use[v] = vec![0; self.index.fiber_counts[ty]];
    }

    fn leave(&mut self, v: usize, ty: usize) {
        self.assign[v] = usize::MAX;
        self.used[ty] = false;
    }

    fn fiber_free(&self, v: usize, fiber: FiberType) -> bool {
        let uses = &self.fiber_use[v];
        let k = fiber.index as usize - 1;
        match self.index.discipline {
            FiberDiscipline::Exclusive => uses[k] == 0,
            FiberDiscipline::Committed => uses
                .iter()
                .enumerate()
                .all(|(j, &c)| c == 0 || j == k),
        }
    }

    fn place(&mut self, pos: usize) {
        if pos == self.plan.order.len() {
            self.record();
            return;
        }
        let v = self.plan.order[pos];
        let candidates: Vec<usize> = match &self.plan.fixed {
            Some(fixed) => vec![fixed[v]],
            None => {
                let parent = self.plan.back[pos][0];
                self.index.neighbours[self.assign[parent]].clone()
            }
        };
        for ty in candidates {
            if !self.admissible(v, ty) {
                continue;
            }
            self.enter(v, ty);
            self.bond_back(pos, 0);
            self.leave(v, ty);
        }
    }

    /// Chooses a probe for the `i`-th back edge of the vertex at `pos`.
    fn bond_back(&mut self, pos: usize, i: usize) {
        let v = self.plan.order[pos];
        let Some(&u) = self.plan.back[pos].get(i) else {
            self.place(pos + 1);
            return;
        };
        let key = (self.assign[u], self.assign[v]);
        let Some(options) = self.index.pairs.get(&key) else {
            return;
        };
        for &(probe, fu, fv) in options {
            if !self.fiber_free(u, fu) || !self.fiber_free(v, fv) {
                continue;
            }
            self.fiber_use[u][fu.index as usize - 1] += 1;
            self.fiber_use[v][fv.index as usize - 1] += 1;
            self.bonds.push((u, v, probe, fu, fv));
            self.bond_back(pos, i + 1);
            self.bonds.pop();
            self.fiber_use[u][fu.index as usize - 1] -= 1;
            self.fiber_use[v][fv.index as usize - 1] -= 1;
        }
    }

    fn record(&mut self) {
        let members = self
            .assign
            .iter()
            .enumerate()
            .map(|(v, &ty)| Member {
                instance: v as u64,
                body: self.index.bodies[ty],
            })
            .collect();
        let bonds = self
            .bonds
            .iter()
            .map(|&(u, v, probe, fu, fv)| {
                let eu = Endpoint {
                    instance: u as u64,
                    fiber: fu,
                };
                let ev = Endpoint {
                    instance: v as u64,
                    fiber: fv,
                };
                let (a, b) = if probe.a() == fu { (eu, ev) } else { (ev, eu) };
                Bond { probe, a, b }
            })
            .collect();
        let agg = Aggregation::new(members, bonds);
        self.found.entry(agg.canonical_form()).or_insert(agg);
    }
}

/// Whether some automorphism of `g` sends every `a` to its `b` in `pins`.
fn automorphism_exists(g: &SimpleGraph, pins: &[(usize, usize)]) -> bool {
    let n = g.n();
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for &(a, b) in pins {
        if map[a] != usize::MAX || taken[b] || g.degree(a) != g.degree(b) {
            return false;
        }
        map[a] = b;
        taken[b] = true;
    }
    extend_automorphism(g, &mut map, &mut taken, 0)
}

fn extend_automorphism(g: &SimpleGraph, map: &mut [usize], taken: &mut [bool], v: usize) -> bool {
    if v == g.n() {
        return true;
    }
    let consistent = |map: &[usize]| (0..v).all(|u| g.has_edge(u, v) == g.has_edge(map[u], map[v]));
    if map[v] != usize::MAX {
        return consistent(map) && extend_automorphism(g, map, taken, v + 1);
    }
    for w in 0..g.n() {
        if taken[w] || g.degree(w) != g.degree(v) {
            continue;
        }
        map[v] = w;
        taken[w] = true;
        if consistent(map) && extend_automorphism(g, map, taken, v + 1) {
            return true;
        }
        map[v] = usize::MAX;
        taken[w] = false;
    }
    false
}
