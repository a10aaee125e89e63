use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{EngineConfig, EngineError};
use crate::aggregation::{Aggregation, Bond, Endpoint, InstanceId, InvariantViolation, Member};
use crate::detector::ProbeOperationGraph;
use crate::model::{BodyId, DataLibrary, FiberDiscipline, FiberType, ProbeLibrary, ProbeType};

/// Copies of each data and probe type to place on the platform.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadRequest {
    pub data: BTreeMap<BodyId, u64>,
    pub probes: BTreeMap<ProbeType, u64>,
}

impl LoadRequest {
    /// `copies` of every data type and every probe type in the libraries.
    pub fn uniform(data: &DataLibrary, probes: &ProbeLibrary, copies: u64) -> Self {
        Self {
            data: data.bodies().map(|b| (b, copies)).collect(),
            probes: probes.probes().iter().map(|&p| (p, copies)).collect(),
        }
    }
}

/// One successful basic probe operation, as written to traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: u64,
    pub probe: ProbeType,
    pub endpoints: [Endpoint; 2],
    /// Orders of the two aggregations before the operation; equal slots for
    /// an intra-aggregation bond.
    pub merged_orders: [usize; 2],
    pub intra: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub data_loaded: u64,
    pub data_on_platform: u64,
    pub probes_loaded: u64,
    pub probes_free: u64,
    pub probes_bound: u64,
    pub aggregations: usize,
    pub max_order: usize,
}

#[derive(Clone, Debug)]
struct Instance {
    body: BodyId,
    slot: usize,
    /// Bonds through each fiber, indexed by `fiber.index - 1`.
    fiber_use: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
struct Slot {
    members: Vec<InstanceId>,
    bodies: BTreeSet<BodyId>,
    bonds: Vec<Bond>,
    pairs: BTreeSet<(InstanceId, InstanceId)>,
}

/// Where a candidate operation would land.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Score {
    inter: bool,
    order: usize,
    bonds: usize,
}

/// A finite platform: data instances, their aggregations and the free probe
/// pool, driven by a seeded generator.
#[derive(Clone, Debug)]
pub struct PlatformState {
    discipline: FiberDiscipline,
    threshold: usize,
    instances: Vec<Instance>,
    by_body: BTreeMap<BodyId, Vec<InstanceId>>,
    slots: Vec<Option<Slot>>,
    free_probes: BTreeMap<ProbeType, u64>,
    data_loaded: u64,
    probes_loaded: u64,
    steps: u64,
    rng: ChaCha8Rng,
}

impl PlatformState {
    /// Places the requested copies on the platform. Every data instance
    /// starts as its own 1-aggregation.
    pub fn load(
        data: &DataLibrary,
        probes: &ProbeLibrary,
        request: &LoadRequest,
        target: &ProbeOperationGraph,
        seed: u64,
    ) -> Result<Self, EngineError> {
        let mut state = Self {
            discipline: data.discipline,
            threshold: target.threshold(),
            instances: Vec::new(),
            by_body: BTreeMap::new(),
            slots: Vec::new(),
            free_probes: BTreeMap::new(),
            data_loaded: 0,
            probes_loaded: 0,
            steps: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for (&body, &requested) in &request.data {
            let ty = data
                .get(body)
                .ok_or_else(|| EngineError::UnknownType(format!("data type {body}")))?;
            let available = data.copies(body);
            if !available.covers(requested) {
                return Err(EngineError::InsufficientInventory {
                    what: format!("data type {body}"),
                    requested,
                    available: available.finite().unwrap_or(u64::MAX),
                });
            }
            for _ in 0..requested {
                let id = state.instances.len() as InstanceId;
                state.instances.push(Instance {
                    body,
                    slot: state.slots.len(),
                    fiber_use: vec![0; ty.fiber_count()],
                });
                state.slots.push(Some(Slot {
                    members: vec![id],
                    bodies: BTreeSet::from([body]),
                    ..Slot::default()
                }));
                state.by_body.entry(body).or_default().push(id);
            }
            state.data_loaded += requested;
        }
        for (&probe, &requested) in &request.probes {
            if !probes.contains(&probe) {
                return Err(EngineError::UnknownType(format!("probe {probe}")));
            }
            let available = probes.copies(&probe);
            if !available.covers(requested) {
                return Err(EngineError::InsufficientInventory {
                    what: format!("probe {probe}"),
                    requested,
                    available: available.finite().unwrap_or(u64::MAX),
                });
            }
            if requested > 0 {
                *state.free_probes.entry(probe).or_default() += requested;
            }
            state.probes_loaded += requested;
        }
        Ok(state)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn free_copies(&self, probe: &ProbeType) -> u64 {
        self.free_probes.get(probe).copied().unwrap_or(0)
    }

    pub fn instances(&self) -> impl Iterator<Item = Member> + '_ {
        self.instances.iter().enumerate().map(|(k, i)| Member {
            instance: k as InstanceId,
            body: i.body,
        })
    }

    /// Order of the aggregation containing `instance`.
    pub fn order_of(&self, instance: InstanceId) -> Option<usize> {
        let slot = self.instances.get(instance as usize)?.slot;
        self.slots[slot].as_ref().map(|s| s.members.len())
    }

    /// Snapshot of every aggregation on the platform.
    pub fn aggregations(&self) -> Vec<Aggregation> {
        self.slots
            .iter()
            .flatten()
            .map(|s| {
                let members = s
                    .members
                    .iter()
                    .map(|&id| Member {
                        instance: id,
                        body: self.instances[id as usize].body,
                    })
                    .collect();
                Aggregation::new(members, s.bonds.clone())
            })
            .collect()
    }

    fn endpoint_ok(&self, probe: ProbeType, fiber: FiberType, e: Endpoint) -> Result<(), EngineError> {
        let inst = self
            .instances
            .get(e.instance as usize)
            .ok_or(EngineError::UnknownInstance(e.instance))?;
        if e.fiber != fiber || inst.body != fiber.owner {
            return Err(EngineError::FiberMismatch { probe, endpoint: e });
        }
        let k = fiber.index as usize - 1;
        if k >= inst.fiber_use.len() {
            return Err(EngineError::FiberMismatch { probe, endpoint: e });
        }
        let free = match self.discipline {
            FiberDiscipline::Exclusive => inst.fiber_use[k] == 0,
            FiberDiscipline::Committed => inst
                .fiber_use
                .iter()
                .enumerate()
                .all(|(j, &c)| c == 0 || j == k),
        };
        if free {
            Ok(())
        } else {
            Err(EngineError::FiberOccupied(e))
        }
    }

    /// Validates an operation and returns where it would land.
    fn assess(&self, probe: ProbeType, a: Endpoint, b: Endpoint) -> Result<Score, EngineError> {
        self.endpoint_ok(probe, probe.a(), a)?;
        self.endpoint_ok(probe, probe.b(), b)?;
        let sa = self.instances[a.instance as usize].slot;
        let sb = self.instances[b.instance as usize].slot;
        let left = self.slots[sa].as_ref().expect("live slot");
        if sa == sb {
            let pair = (a.instance.min(b.instance), a.instance.max(b.instance));
            if left.pairs.contains(&pair) {
                return Err(EngineError::UniquenessViolation(probe.a().owner));
            }
            return Ok(Score {
                inter: false,
                order: left.members.len(),
                bonds: left.bonds.len() + 1,
            });
        }
        let right = self.slots[sb].as_ref().expect("live slot");
        let order = left.members.len() + right.members.len();
        if order > self.threshold {
            return Err(EngineError::ThresholdViolation {
                left: left.members.len(),
                right: right.members.len(),
                threshold: self.threshold,
            });
        }
        if let Some(&dup) = left.bodies.intersection(&right.bodies).next() {
            return Err(EngineError::UniquenessViolation(dup));
        }
        Ok(Score {
            inter: true,
            order,
            bonds: left.bonds.len() + right.bonds.len() + 1,
        })
    }

    /// Applies one probe copy to the given endpoints: a merge of two
    /// aggregations or a new bond inside one.
    pub fn basic_probe_operation(
        &mut self,
        probe: ProbeType,
        a: Endpoint,
        b: Endpoint,
    ) -> Result<StepRecord, EngineError> {
        if self.free_copies(&probe) == 0 {
            return Err(EngineError::NoFreeProbe(probe));
        }
        let score = self.assess(probe, a, b)?;
        let sa = self.instances[a.instance as usize].slot;
        let sb = self.instances[b.instance as usize].slot;
        let merged_orders = [
            self.slots[sa].as_ref().map_or(0, |s| s.members.len()),
            self.slots[sb].as_ref().map_or(0, |s| s.members.len()),
        ];
        if score.inter {
            let (keep, gone) = (sa.min(sb), sa.max(sb));
            let absorbed = self.slots[gone].take().expect("live slot");
            for &id in &absorbed.members {
                self.instances[id as usize].slot = keep;
            }
            let target = self.slots[keep].as_mut().expect("live slot");
            target.members.extend(absorbed.members);
            target.bodies.extend(absorbed.bodies);
            target.bonds.extend(absorbed.bonds);
            target.pairs.extend(absorbed.pairs);
        }
        let slot = self.slots[sa.min(sb)].as_mut().expect("live slot");
        slot.bonds.push(Bond { probe, a, b });
        slot.pairs.insert((a.instance.min(b.instance), a.instance.max(b.instance)));
        for e in [a, b] {
            self.instances[e.instance as usize].fiber_use[e.fiber.index as usize - 1] += 1;
        }
        let left = self.free_probes.get_mut(&probe).expect("free copy");
        *left -= 1;
        if *left == 0 {
            self.free_probes.remove(&probe);
        }
        self.steps += 1;
        Ok(StepRecord {
            step: self.steps,
            probe,
            endpoints: [a, b],
            merged_orders,
            intra: !score.inter,
        })
    }

    /// High cohesiveness: among all legal endpoint pairs for `probe`, prefer
    /// merging aggregations over bonding inside one, then the largest
    /// resulting order, then the most bonds. Remaining ties are broken
    /// uniformly by the platform generator.
    pub fn select_targets(&mut self, probe: ProbeType) -> Result<(Endpoint, Endpoint), EngineError> {
        let empty = Vec::new();
        let sources = self.by_body.get(&probe.a().owner).unwrap_or(&empty);
        let sinks = self.by_body.get(&probe.b().owner).unwrap_or(&empty);
        let mut best: Option<Score> = None;
        let mut tied: Vec<(Endpoint, Endpoint)> = Vec::new();
        for &i in sources {
            let a = Endpoint {
                instance: i,
                fiber: probe.a(),
            };
            for &j in sinks {
                let b = Endpoint {
                    instance: j,
                    fiber: probe.b(),
                };
                let Ok(score) = self.assess(probe, a, b) else {
                    continue;
                };
                match best {
                    Some(s) if score < s => {}
                    Some(s) if score == s => tied.push((a, b)),
                    _ => {
                        best = Some(score);
                        tied.clear();
                        tied.push((a, b));
                    }
                }
            }
        }
        match tied.len() {
            0 => Err(EngineError::NoLegalTarget(probe)),
            1 => Ok(tied[0]),
            n => Ok(tied[self.rng.gen_range(0..n)]),
        }
    }

    /// Runs the stochastic platform until no free probe can act or
    /// `max_steps` operations have happened. Each round draws a free probe
    /// copy uniformly among types not known to be stuck; a type with no legal
    /// target is set aside until some other operation changes the platform.
    /// `observer` sees every successful step.
    pub fn run<F>(&mut self, config: &EngineConfig, mut observer: F) -> Vec<Aggregation>
    where
        F: FnMut(&StepRecord, &PlatformState),
    {
        let mut stalled: BTreeSet<ProbeType> = BTreeSet::new();
        let mut done = 0u64;
        while done < config.max_steps {
            let live: Vec<(ProbeType, u64)> = self
                .free_probes
                .iter()
                .filter(|(p, _)| !stalled.contains(p))
                .map(|(&p, &c)| (p, c))
                .collect();
            let total: u64 = live.iter().map(|(_, c)| c).sum();
            if total == 0 {
                break;
            }
            let mut pick = self.rng.gen_range(0..total);
            let mut probe = live[0].0;
            for (p, c) in &live {
                if pick < *c {
                    probe = *p;
                    break;
                }
                pick -= c;
            }
            match self.select_targets(probe) {
                Ok((a, b)) => {
                    let record = self
                        .basic_probe_operation(probe, a, b)
                        .expect("selected targets are legal");
                    stalled.clear();
                    done += 1;
                    observer(&record, self);
                }
                Err(_) => {
                    stalled.insert(probe);
                }
            }
        }
        self.aggregations()
    }

    /// Checks every aggregation against the structural rules and the
    /// threshold, and that data and probes are conserved.
    pub fn audit(&self) -> Result<AuditReport, InvariantViolation> {
        let aggs = self.aggregations();
        let mut max_order = 0;
        let mut bound = 0u64;
        let mut on_platform = 0u64;
        for agg in &aggs {
            agg.check(self.discipline)?;
            if agg.order() > self.threshold {
                return Err(InvariantViolation::OverThreshold {
                    order: agg.order(),
                    threshold: self.threshold,
                });
            }
            max_order = max_order.max(agg.order());
            bound += agg.bond_count() as u64;
            on_platform += agg.order() as u64;
        }
        let free: u64 = self.free_probes.values().sum();
        let report = AuditReport {
            data_loaded: self.data_loaded,
            data_on_platform: on_platform,
            probes_loaded: self.probes_loaded,
            probes_free: free,
            probes_bound: bound,
            aggregations: aggs.len(),
            max_order,
        };
        assert_eq!(on_platform, self.data_loaded, "data instances lost");
        assert_eq!(free + bound, self.probes_loaded, "probe copies lost");
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::TargetGraph;
    use crate::engine::Mode;
    use crate::model::{Copies, DataType, ProbeKind};

    fn chain(n: u32) -> (DataLibrary, ProbeLibrary) {
        let data = DataLibrary::new((1..=n).map(|b| DataType::new(b, ["l", "r"])).collect());
        let mut probes = ProbeLibrary::new(ProbeKind::Connective);
        for b in 1..n {
            probes.insert(
                ProbeType::connective(FiberType::new(b, 2), FiberType::new(b + 1, 1)),
                Copies::Unbounded,
            );
        }
        (data, probes)
    }

    fn ep(instance: InstanceId, owner: BodyId, index: u32) -> Endpoint {
        Endpoint {
            instance,
            fiber: FiberType::new(owner, index),
        }
    }

    #[test]
    fn threshold_and_uniqueness_are_enforced() {
        let (data, probes) = chain(3);
        let target = ProbeOperationGraph::single(TargetGraph::new(2, [(0, 1)])).unwrap();
        let req = LoadRequest::uniform(&data, &probes, 2);
        let mut st = PlatformState::load(&data, &probes, &req, &target, 0).unwrap();
        let p12 = probes.probes()[0];
        let p23 = probes.probes()[1];
        // Instances: 0,1 -> body 1; 2,3 -> body 2; 4,5 -> body 3.
        st.basic_probe_operation(p12, ep(0, 1, 2), ep(2, 2, 1)).unwrap();
        assert_eq!(
            st.basic_probe_operation(p23, ep(2, 2, 2), ep(4, 3, 1)),
            Err(EngineError::ThresholdViolation {
                left: 2,
                right: 1,
                threshold: 2
            })
        );
        assert!(matches!(
            st.basic_probe_operation(p12, ep(1, 1, 1), ep(3, 2, 1)),
            Err(EngineError::FiberMismatch { .. })
        ));
        st.audit().unwrap();
        let mut drained = st.clone();
        drained.free_probes.remove(&p12);
        assert_eq!(
            drained.basic_probe_operation(p12, ep(0, 1, 1), ep(1, 2, 1)),
            Err(EngineError::NoFreeProbe(p12))
        );
    }

    #[test]
    fn duplicate_types_never_merge() {
        let (data, probes) = chain(2);
        let target = ProbeOperationGraph::single(TargetGraph::cycle(3)).unwrap();
        let mut req = LoadRequest::uniform(&data, &probes, 2);
        req.probes.insert(probes.probes()[0], 2);
        let mut st = PlatformState::load(&data, &probes, &req, &target, 1).unwrap();
        let p = probes.probes()[0];
        // Bodies: instances 0,1 -> 1; 2,3 -> 2.
        st.basic_probe_operation(p, ep(0, 1, 2), ep(2, 2, 1)).unwrap();
        assert_eq!(
            st.basic_probe_operation(p, ep(1, 1, 2), ep(2, 2, 1)),
            Err(EngineError::FiberOccupied(ep(2, 2, 1)))
        );
        let mut st2 = st.clone();
        st2.basic_probe_operation(p, ep(1, 1, 2), ep(3, 2, 1)).unwrap();
        st2.audit().unwrap();
    }

    #[test]
    fn inventory_is_checked_on_load() {
        let (mut data, probes) = chain(2);
        data.set_copies(1, Copies::Finite(1));
        let target = ProbeOperationGraph::single(TargetGraph::cycle(3)).unwrap();
        let req = LoadRequest::uniform(&data, &probes, 2);
        assert!(matches!(
            PlatformState::load(&data, &probes, &req, &target, 0),
            Err(EngineError::InsufficientInventory { requested: 2, available: 1, .. })
        ));
    }

    #[test]
    fn cohesiveness_prefers_the_larger_merge() {
        // Bodies 1..=4 in a chain. After 1-2 and 3-4 are bonded, a 2-3 probe
        // can join the two pairs (order 4, 3 bonds) or attach a lone 3 to the
        // pair 1-2 (order 3). The larger merge must win.
        let (data, probes) = chain(4);
        let target = ProbeOperationGraph::single(TargetGraph::new(4, [(0, 1), (1, 2), (2, 3)])).unwrap();
        let mut req = LoadRequest::uniform(&data, &probes, 1);
        req.data.insert(3, 2);
        let mut st = PlatformState::load(&data, &probes, &req, &target, 7).unwrap();
        let (p12, p23, p34) = (probes.probes()[0], probes.probes()[1], probes.probes()[2]);
        // Instances: 0 -> 1, 1 -> 2, 2,3 -> 3, 4 -> 4.
        st.basic_probe_operation(p12, ep(0, 1, 2), ep(1, 2, 1)).unwrap();
        st.basic_probe_operation(p34, ep(2, 3, 2), ep(4, 4, 1)).unwrap();
        for _ in 0..20 {
            let (a, b) = st.clone().select_targets(p23).unwrap();
            assert_eq!((a.instance, b.instance), (1, 2));
        }
        st.basic_probe_operation(p23, ep(1, 2, 2), ep(2, 3, 1)).unwrap();
        assert_eq!(st.order_of(0), Some(4));
    }

    #[test]
    fn runs_are_reproducible() {
        let (data, probes) = chain(5);
        let target = ProbeOperationGraph::single(TargetGraph::new(3, [(0, 1), (1, 2)])).unwrap();
        let req = LoadRequest::uniform(&data, &probes, 4);
        let config = EngineConfig {
            mode: Mode::Stochastic,
            seed: 11,
            max_steps: u64::MAX,
        };
        let go = || {
            let mut st = PlatformState::load(&data, &probes, &req, &target, config.seed).unwrap();
            let mut trace = Vec::new();
            let out = st.run(&config, |r, s| {
                s.audit().unwrap();
                trace.push(r.clone());
            });
            (out, trace)
        };
        let (a, ta) = go();
        let (b, tb) = go();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        assert!(a.iter().all(|m| m.order() <= 3));
    }
}
