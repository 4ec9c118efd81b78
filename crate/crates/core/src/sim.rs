//! Round-based Monte Carlo simulation of leader/follower replication.
//!
//! Update `k` is initiated at `kc`, written sequentially to the leaders and
//! committed at `(k+1)c`, then multicast to every follower. A follower
//! applies it at `(k+1)c + T_w` if `T_w < c`; otherwise the write is
//! preempted at `(k+2)c` by the multicast of update `k+1`. Each slot after
//! warmup carries one instantaneous read at a uniform offset `T_a ∈ [0, c)`
//! to `r` distinct nodes, which returns the freshest version among them.
//!
//! All timestamps are kept as integer round indices, so a node's age is
//! exactly `Z·c + T_a` with `Z` the number of rounds since its data was
//! initiated.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{SystemConfig, TimingModel};
use crate::dist::WriteTimeDistribution;
use crate::error::{Error, Result};
use crate::rng::{seeded, SimRng};

/// Cap on the automatically chosen warmup.
pub const MAX_WARMUP_ROUNDS: u64 = 1_000_000;

/// Number of contiguous batches behind the reported standard errors.
pub const STDERR_BATCHES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub cfg: SystemConfig,
    pub timing: TimingModel,
    pub dist: WriteTimeDistribution,
    /// Rounds discarded before the first query. `None` picks
    /// [`default_warmup`] from the per-round success probability.
    pub warmup_rounds: Option<u64>,
    pub query_slots: u64,
    pub seed: u64,
}

impl SimParams {
    pub fn new(
        cfg: SystemConfig,
        timing: TimingModel,
        dist: WriteTimeDistribution,
        query_slots: u64,
        seed: u64,
    ) -> Self {
        Self {
            cfg,
            timing,
            dist,
            warmup_rounds: None,
            query_slots,
            seed,
        }
    }

    pub fn validate(&self) -> Result<f64> {
        self.cfg.validate()?;
        let c = self.timing.commit_time(self.cfg.l)?;
        if self.query_slots < 1 {
            return Err(Error::invalid("query_slots must be >= 1"));
        }
        Ok(c)
    }
}

/// `min(10·⌈1/p_c⌉ + 50, 10^6)`. The initial all-consistent state is
/// forgotten geometrically, leaving a bias below `(1 − p_c)^W`.
pub fn default_warmup(p_success: f64) -> u64 {
    if p_success <= 0.0 {
        return MAX_WARMUP_ROUNDS;
    }
    let rounds = (1.0 / p_success).ceil();
    if rounds >= MAX_WARMUP_ROUNDS as f64 {
        return MAX_WARMUP_ROUNDS;
    }
    (10 * rounds as u64 + 50).min(MAX_WARMUP_ROUNDS)
}

/// What one follower holds: the round index of the newest update it applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FollowerState {
    applied_round: Option<i64>,
}

impl FollowerState {
    pub fn uninitialized() -> Self {
        Self {
            applied_round: None,
        }
    }

    pub fn with_applied_round(round: i64) -> Self {
        Self {
            applied_round: Some(round),
        }
    }

    pub fn applied_round(&self) -> Option<i64> {
        self.applied_round
    }

    /// Initiation time of the newest applied update, `round · c`.
    pub fn latest_applied_timestamp(&self, c: f64) -> Option<f64> {
        self.applied_round.map(|k| k as f64 * c)
    }

    /// Rounds elapsed between the applied update and the slot containing a
    /// read, i.e. `Z` in `age = Z·c + T_a`.
    pub fn missed_rounds(&self, slot: i64) -> Result<u64> {
        let k = self.applied_round.ok_or(Error::UninitializedFollower)?;
        Ok((slot - k) as u64)
    }

    fn apply(&mut self, round: i64) {
        debug_assert!(self.applied_round.is_none_or(|k| k <= round));
        self.applied_round = Some(round);
    }
}

/// Age of a follower at absolute time `t`: `t − latest_applied_timestamp`.
pub fn follower_age_at(state: &FollowerState, t: f64, c: f64) -> Result<f64> {
    let ts = state
        .latest_applied_timestamp(c)
        .ok_or(Error::UninitializedFollower)?;
    Ok(t - ts)
}

/// Node state for one data chunk. Nodes `0..l` are leaders, `l..n` followers.
#[derive(Debug, Clone)]
pub struct ReplicaGroup {
    leaders: u32,
    commit: f64,
    dist: WriteTimeDistribution,
    slot: i64,
    followers: Vec<FollowerState>,
    /// Completion offset of this slot's multicast write per follower;
    /// `INFINITY` when the write will be preempted.
    pending: Vec<f64>,
    slot_open: bool,
}

impl ReplicaGroup {
    /// A group at slot 0 in which every follower already holds update −1,
    /// the one committed at time 0.
    pub fn new(cfg: &SystemConfig, commit: f64, dist: WriteTimeDistribution) -> Self {
        let f = cfg.followers() as usize;
        Self {
            leaders: cfg.l,
            commit,
            dist,
            slot: 0,
            followers: vec![FollowerState::with_applied_round(-1); f],
            pending: vec![f64::INFINITY; f],
            slot_open: false,
        }
    }

    pub fn slot(&self) -> i64 {
        self.slot
    }

    pub fn commit_time(&self) -> f64 {
        self.commit
    }

    pub fn followers(&self) -> &[FollowerState] {
        &self.followers
    }

    /// Starts the current slot's multicast of update `slot − 1`: one write
    /// time per follower, in follower order. Returns how many will land.
    pub fn begin_slot<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        debug_assert!(!self.slot_open);
        let c = self.commit;
        let mut landed = 0;
        for p in &mut self.pending {
            let tw = self.dist.sample(rng);
            *p = if tw < c {
                landed += 1;
                tw
            } else {
                f64::INFINITY
            };
        }
        self.slot_open = true;
        landed
    }

    /// `Z` for `node` at offset `offset` into the open slot. A write landing
    /// at exactly `offset` is visible.
    pub fn missed_rounds(&self, node: u32, offset: f64) -> u64 {
        if node < self.leaders {
            return 1;
        }
        let i = (node - self.leaders) as usize;
        if self.slot_open && self.pending[i] <= offset {
            1
        } else {
            self.followers[i]
                .missed_rounds(self.slot)
                .expect("followers start initialized")
        }
    }

    pub fn age(&self, node: u32, offset: f64) -> f64 {
        self.missed_rounds(node, offset) as f64 * self.commit + offset
    }

    /// Applies every write that landed and advances to the next slot.
    pub fn end_slot(&mut self) {
        let round = self.slot - 1;
        for (state, &p) in self.followers.iter_mut().zip(&self.pending) {
            if p.is_finite() {
                state.apply(round);
            }
        }
        self.pending.fill(f64::INFINITY);
        self.slot += 1;
        self.slot_open = false;
    }
}

/// One read query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub slot_index: u64,
    /// `T_a ∈ [0, c)`.
    pub arrival_offset: f64,
    pub queried_nodes: Vec<u32>,
    /// The read reached at least one leader (event B1).
    pub hit_leader: bool,
    /// `Z_min` over the queried nodes.
    pub missed_rounds: u64,
    pub age: f64,
}

/// Monte Carlo estimates from one run.
///
/// Reads in nearby slots often see the same stale follower, so ages are
/// autocorrelated over roughly `1/p_c` slots. Standard errors for ages
/// therefore use batch means over [`STDERR_BATCHES`] contiguous batches of
/// slots rather than the per-query variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub commit_time: f64,
    pub warmup_rounds: u64,
    pub query_slots: u64,
    pub mean_age: f64,
    pub stderr_age: f64,
    pub count_b1: u64,
    pub count_b2: u64,
    pub mean_age_b1: Option<f64>,
    pub stderr_b1: Option<f64>,
    pub mean_age_b2: Option<f64>,
    pub stderr_b2: Option<f64>,
    /// Fraction of post-warmup follower writes with `T_w < c`.
    pub empirical_pc: Option<f64>,
    pub stderr_pc: Option<f64>,
    /// Smallest and largest age seen on a B1 read.
    pub min_age_b1: Option<f64>,
    pub max_age_b1: Option<f64>,
}

/// `max(3·stderr, 1% of |reference|)`, the band used to compare a Monte
/// Carlo estimate with a closed-form value.
pub fn agreement_tolerance(stderr: f64, reference: f64) -> f64 {
    (3.0 * stderr).max(0.01 * reference.abs())
}

/// Ratio-of-sums estimator with a batch-means standard error.
#[derive(Debug, Clone, Default)]
struct BatchedMean {
    sums: Vec<f64>,
    counts: Vec<u64>,
    min: f64,
    max: f64,
}

impl BatchedMean {
    fn new(batches: usize) -> Self {
        Self {
            sums: vec![0.0; batches],
            counts: vec![0; batches],
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn push(&mut self, batch: usize, x: f64) {
        self.sums[batch] += x;
        self.counts[batch] += 1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn count(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn total(&self) -> f64 {
        self.sums.iter().sum()
    }

    fn mean(&self) -> Option<f64> {
        let n = self.count();
        (n > 0).then(|| self.total() / n as f64)
    }

    /// `sqrt(Σ (s_i − m·n_i)² / (B(B−1))) / n̄` over the `B` batches.
    fn stderr(&self) -> Option<f64> {
        let mean = self.mean()?;
        let b = self.sums.len();
        if b < 2 {
            return None;
        }
        let ss: f64 = self
            .sums
            .iter()
            .zip(&self.counts)
            .map(|(&s, &n)| {
                let e = s - mean * n as f64;
                e * e
            })
            .sum();
        let avg_count = self.count() as f64 / b as f64;
        Some((ss / (b * (b - 1)) as f64).sqrt() / avg_count)
    }

    fn merge(&self, other: &BatchedMean) -> BatchedMean {
        BatchedMean {
            sums: self
                .sums
                .iter()
                .zip(&other.sums)
                .map(|(a, b)| a + b)
                .collect(),
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }
}

/// Step-by-step driver; [`run`] is the usual entry point.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SimParams,
    group: ReplicaGroup,
    rng: SimRng,
    warmup: u64,
    nodes: Vec<u32>,
    queries: u64,
    writes: u64,
    landed: u64,
}

impl Simulator {
    pub fn new(params: SimParams) -> Result<Self> {
        let c = params.validate()?;
        let cfg = params.cfg;
        let pc = params.dist.cdf(c);
        let reads_can_miss_leaders = cfg.r <= cfg.followers();
        if pc <= 0.0 && reads_can_miss_leaders {
            return Err(Error::ModelDegenerate(format!(
                "F_w(c) = 0 for {} at c = {c}: reads that miss the leaders have unbounded age",
                params.dist
            )));
        }
        let warmup = match params.warmup_rounds {
            Some(w) => w,
            // Followers cannot influence any read, so there is nothing to forget.
            None if !reads_can_miss_leaders => 50,
            None => default_warmup(pc),
        };
        let mut sim = Self {
            params,
            group: ReplicaGroup::new(&cfg, c, params.dist),
            rng: seeded(params.seed),
            warmup,
            nodes: (0..cfg.n).collect(),
            queries: 0,
            writes: 0,
            landed: 0,
        };
        for _ in 0..warmup {
            sim.group.begin_slot(&mut sim.rng);
            sim.group.end_slot();
        }
        Ok(sim)
    }

    pub fn commit_time(&self) -> f64 {
        self.group.commit_time()
    }

    pub fn warmup_rounds(&self) -> u64 {
        self.warmup
    }

    pub fn group(&self) -> &ReplicaGroup {
        &self.group
    }

    /// Simulates one slot and the read issued in it.
    pub fn next_query(&mut self) -> QueryRecord {
        let c = self.group.commit_time();
        let cfg = self.params.cfg;
        self.landed += self.group.begin_slot(&mut self.rng) as u64;
        self.writes += u64::from(cfg.followers());

        let offset = self.rng.random_range(0.0..c);
        let r = cfg.r as usize;
        let n = self.nodes.len();
        for i in 0..r {
            let j = self.rng.random_range(i..n);
            self.nodes.swap(i, j);
        }
        let queried = &self.nodes[..r];
        let hit_leader = queried.iter().any(|&v| v < cfg.l);
        let missed_rounds = queried
            .iter()
            .map(|&v| self.group.missed_rounds(v, offset))
            .min()
            .expect("r >= 1");
        let record = QueryRecord {
            slot_index: self.queries,
            arrival_offset: offset,
            queried_nodes: queried.to_vec(),
            hit_leader,
            missed_rounds,
            age: missed_rounds as f64 * c + offset,
        };
        self.group.end_slot();
        self.queries += 1;
        record
    }
}

/// Runs `params.query_slots` queried slots after warmup and summarises them.
/// Deterministic in `params`.
pub fn run(params: &SimParams) -> Result<SimSummary> {
    let mut sim = Simulator::new(*params)?;
    let slots = params.query_slots;
    let batches = STDERR_BATCHES.min(slots);
    let mut b1 = BatchedMean::new(batches as usize);
    let mut b2 = BatchedMean::new(batches as usize);
    for i in 0..slots {
        let batch = (u128::from(i) * u128::from(batches) / u128::from(slots)) as usize;
        let q = sim.next_query();
        if q.hit_leader {
            b1.push(batch, q.age);
        } else {
            b2.push(batch, q.age);
        }
    }
    let all = b1.merge(&b2);
    let pc = (sim.writes > 0).then(|| sim.landed as f64 / sim.writes as f64);
    let (count_b1, count_b2) = (b1.count(), b2.count());
    Ok(SimSummary {
        commit_time: sim.commit_time(),
        warmup_rounds: sim.warmup,
        query_slots: slots,
        mean_age: all.mean().expect("query_slots >= 1"),
        stderr_age: all.stderr().unwrap_or(0.0),
        count_b1,
        count_b2,
        mean_age_b1: b1.mean(),
        stderr_b1: b1.stderr(),
        mean_age_b2: b2.mean(),
        stderr_b2: b2.stderr(),
        empirical_pc: pc,
        stderr_pc: pc.map(|p| (p * (1.0 - p) / sim.writes as f64).sqrt()),
        min_age_b1: (count_b1 > 0).then_some(b1.min),
        max_age_b1: (count_b1 > 0).then_some(b1.max),
    })
}
