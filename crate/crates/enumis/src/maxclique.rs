//! Maximum-clique problem instances: graph model, QUBO encoding, exact
//! reference enumerator, seeded random graphs, and the annealing-backed
//! feasible-solution sampler.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::enumeration::{Sampler, SamplerError, Solution, SolutionKey};
use crate::ising::{sa_sample_with_rng, AnnealSchedule, IsingModel, QuboModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    ZeroVertices,
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {v} out of range for {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("density {0} outside [0, 1]")]
    DensityOutOfRange(f64),
    #[error("clique penalty must exceed 1, got {0}")]
    PenaltyTooSmall(f64),
}

/// Undirected simple graph over vertices 0..n with dense bitset adjacency
/// rows. Row intersection drives both the clique checks and the exact
/// enumerator.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    n_edges: usize,
}

impl Graph {
    pub fn new(n_vertices: usize) -> Result<Self, GraphError> {
        if n_vertices == 0 {
            return Err(GraphError::ZeroVertices);
        }
        let words = n_vertices.div_ceil(64);
        Ok(Graph {
            n: n_vertices,
            words,
            adj: vec![0; n_vertices * words],
            n_edges: 0,
        })
    }

    pub fn from_edges(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(n_vertices)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts an edge; duplicates are absorbed. Returns whether the edge
    /// was new.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange { v: w, n: self.n });
            }
        }
        if self.is_adjacent(u, v) {
            return Ok(false);
        }
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
        self.n_edges += 1;
        Ok(true)
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Edge count divided by C(n, 2); zero for a single vertex.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.n_edges as f64 / (self.n * (self.n - 1) / 2) as f64
        }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Nonadjacent vertex pairs (u, v) with u < v: the complement edge set.
    pub fn complement_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n)
                .filter(move |&v| !self.is_adjacent(u, v))
                .map(move |v| (u, v))
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n)
                .filter(move |&v| self.is_adjacent(u, v))
                .map(move |v| (u, v))
        })
    }
}

/// A set of vertices, stored sorted; encodable as the bit vector whose set
/// bits mark the members.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet {
    members: Vec<u32>,
}

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = u32>) -> Self {
        let mut members: Vec<u32> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_key(&self, n_vertices: usize) -> SolutionKey {
        SolutionKey::from_indices(n_vertices, self.members.iter().map(|&v| v as usize))
    }

    pub fn from_key(key: &SolutionKey) -> Self {
        VertexSet {
            members: key.ones().map(|i| i as u32).collect(),
        }
    }
}

/// True iff every pair of vertices in `s` is adjacent in `g`. Empty and
/// singleton sets are cliques.
pub fn is_clique(g: &Graph, s: &VertexSet) -> Result<bool, GraphError> {
    for &v in s.members() {
        if v as usize >= g.n {
            return Err(GraphError::VertexOutOfRange { v: v as usize, n: g.n });
        }
    }
    let members = s.members();
    for (idx, &u) in members.iter().enumerate() {
        let row = g.row(u as usize);
        for &v in &members[idx + 1..] {
            if row[v as usize / 64] >> (v as usize % 64) & 1 == 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// QUBO whose minima are exactly the maximum cliques of `g`:
/// `-sum_v x_v + penalty * sum_{nonadjacent u,v} x_u x_v`.
/// The equivalence requires penalty > 1.
pub fn max_clique_qubo(g: &Graph, penalty: f64) -> Result<QuboModel, GraphError> {
    if !(penalty > 1.0) || !penalty.is_finite() {
        return Err(GraphError::PenaltyTooSmall(penalty));
    }
    let quadratic: Vec<(usize, usize, f64)> = g
        .complement_edges()
        .map(|(u, v)| (u, v, penalty))
        .collect();
    Ok(QuboModel::new(g.n, quadratic, vec![-1.0; g.n], 0.0)
        .expect("clique QUBO construction is always valid"))
}

struct CliqueSearch<'a> {
    g: &'a Graph,
    words: usize,
    best_size: usize,
    best: Vec<Vec<u32>>,
    deadline: Option<Instant>,
    nodes: u64,
    aborted: bool,
}

fn count_bits(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

fn iter_bits(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
    mask.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}

impl CliqueSearch<'_> {
    /// Bron-Kerbosch over (R, P, X) with the max-degree-in-P pivot and the
    /// incumbent bound |R| + |P| < best (strict, so ties survive).
    fn expand(&mut self, r: &mut Vec<u32>, p: &[u64], x: &[u64]) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    self.aborted = true;
                }
            }
        }
        if self.aborted {
            return;
        }
        let p_count = count_bits(p);
        if p_count == 0 {
            if count_bits(x) == 0 && r.len() >= self.best_size {
                // maximal clique at least as large as the incumbent
                if r.len() > self.best_size {
                    self.best_size = r.len();
                    self.best.clear();
                }
                let mut clique = r.clone();
                clique.sort_unstable();
                self.best.push(clique);
            }
            return;
        }
        if r.len() + p_count < self.best_size {
            return;
        }
        // pivot: vertex of P | X with the most neighbors inside P
        let pivot = iter_bits(p)
            .chain(iter_bits(x))
            .max_by_key(|&u| {
                self.g
                    .row(u)
                    .iter()
                    .zip(p)
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum::<usize>()
            })
            .expect("P is nonempty");
        let pivot_row = self.g.row(pivot);
        let candidates: Vec<usize> = iter_bits(p)
            .filter(|&v| pivot_row[v / 64] >> (v % 64) & 1 == 0)
            .collect();

        let mut p = p.to_vec();
        let mut x = x.to_vec();
        let mut next_p = vec![0u64; self.words];
        let mut next_x = vec![0u64; self.words];
        for v in candidates {
            let row = self.g.row(v);
            for w in 0..self.words {
                next_p[w] = p[w] & row[w];
                next_x[w] = x[w] & row[w];
            }
            r.push(v as u32);
            self.expand(r, &next_p, &next_x);
            r.pop();
            if self.aborted {
                return;
            }
            p[v / 64] &= !(1 << (v % 64));
            x[v / 64] |= 1 << (v % 64);
        }
    }
}

/// All maximum-cardinality cliques of `g`, canonically ordered. Exact;
/// intended for desk-scale graphs where the search completes in reasonable
/// time.
pub fn enumerate_max_cliques_exact(g: &Graph) -> Vec<VertexSet> {
    enumerate_max_cliques_budgeted(g, None).expect("unbudgeted search cannot abort")
}

/// As [`enumerate_max_cliques_exact`] but gives up and returns `None` once
/// `budget` has elapsed.
pub fn enumerate_max_cliques_budgeted(
    g: &Graph,
    budget: Option<Duration>,
) -> Option<Vec<VertexSet>> {
    let words = g.words;
    let mut p = vec![0u64; words];
    for v in 0..g.n {
        p[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch {
        g,
        words,
        best_size: 0,
        best: Vec::new(),
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        aborted: false,
    };
    search.expand(&mut Vec::new(), &p, &vec![0u64; words]);
    if search.aborted {
        return None;
    }
    let mut cliques: Vec<VertexSet> = search
        .best
        .into_iter()
        .map(VertexSet::new)
        .collect();
    cliques.sort();
    Some(cliques)
}

/// Seeded Erdos-Renyi graph with exactly `round(C(n,2) * density)` edges
/// drawn uniformly without replacement (ties at .5 round up).
pub fn erdos_renyi(n: usize, density: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(GraphError::DensityOutOfRange(density));
    }
    let mut g = Graph::new(n)?;
    let n_pairs = n * (n - 1) / 2;
    let target = (n_pairs as f64 * density).round() as usize;
    let mut pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..target {
        let pick = rng.gen_range(k..pairs.len());
        pairs.swap(k, pick);
        let (u, v) = pairs[k];
        g.add_edge(u as usize, v as usize)?;
    }
    Ok(g)
}

/// Feasible-solution sampler for the maximum-clique problem: each draw runs
/// one annealing pass on the clique QUBO's Ising image, decodes the spins to
/// a vertex set, and redraws until the set is a clique. Yields the set's key
/// with cost equal to minus its size.
pub struct CliqueSampler {
    graph: Graph,
    ising: IsingModel,
    schedule: AnnealSchedule,
    rng: ChaCha8Rng,
    redraw_cap: Option<u64>,
}

/// Builds a [`CliqueSampler`]; requires penalty > 1.
pub fn make_clique_sampler(
    g: &Graph,
    penalty: f64,
    schedule: AnnealSchedule,
    seed: u64,
) -> Result<CliqueSampler, GraphError> {
    let ising = max_clique_qubo(g, penalty)?.to_ising();
    Ok(CliqueSampler {
        graph: g.clone(),
        ising,
        schedule,
        rng: ChaCha8Rng::seed_from_u64(seed),
        redraw_cap: None,
    })
}

impl CliqueSampler {
    /// Caps consecutive infeasible draws before `draw` reports failure.
    pub fn with_redraw_cap(mut self, cap: u64) -> Self {
        self.redraw_cap = Some(cap);
        self
    }
}

impl Sampler for CliqueSampler {
    fn draw(&mut self) -> Result<Solution, SamplerError> {
        let mut attempts = 0u64;
        loop {
            if self.redraw_cap.is_some_and(|cap| attempts >= cap) {
                return Err(SamplerError::RedrawCapExhausted {
                    cap: self.redraw_cap.unwrap(),
                });
            }
            attempts += 1;
            let config = sa_sample_with_rng(&self.ising, &self.schedule, &mut self.rng);
            let key = config.to_key();
            let set = VertexSet::from_key(&key);
            if is_clique(&self.graph, &set).expect("decoded set is in range") {
                return Ok(Solution::new(key, -(set.len() as f64)));
            }
        }
    }
}
