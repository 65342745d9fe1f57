//! Ising and QUBO energy models, an exhaustive ground-state oracle, and a
//! seeded single-spin-flip simulated annealer.
//!
//! Spin convention: a QUBO variable x maps to a spin via sigma = 1 - 2x,
//! so x = 0 corresponds to sigma = +1. Solution keys use the x picture
//! (bit set means sigma = -1).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::SolutionKey;

/// Largest spin count accepted by the exhaustive ground-state oracle.
pub const GROUND_STATE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model must have at least one variable")]
    Empty,
    #[error("expected {expected} linear coefficients, got {got}")]
    LinearLengthMismatch { expected: usize, got: usize },
    #[error("self-coupling on index {0}")]
    SelfCoupling(usize),
    #[error("coupling ({i}, {j}) out of range for size {n}")]
    CouplingOutOfRange { i: usize, j: usize, n: usize },
    #[error("duplicate coupling ({i}, {j})")]
    DuplicateCoupling { i: usize, j: usize },
    #[error("coefficients must be finite")]
    NonFiniteCoefficient,
    #[error("configuration has {got} entries, model has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spins must be exactly +1 or -1")]
    InvalidSpinValue,
    #[error("exhaustive search capped at {cap} spins, model has {n}")]
    GroundStateCapExceeded { n: usize, cap: usize },
    #[error("annealing schedule requires 0 < beta_initial <= beta_final and sweeps >= 1")]
    InvalidSchedule,
}

/// Quadratic energy over spins in {-1, +1}:
/// `H(sigma) = -sum_{i<j} J_ij sigma_i sigma_j - sum_i h_i sigma_i + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n_spins: usize,
    couplings: BTreeMap<(u32, u32), f64>,
    fields: Vec<f64>,
    offset: f64,
    // adjacency derived from couplings, one list per spin
    neighbors: Vec<Vec<(u32, f64)>>,
}

fn normalize_couplings(
    n: usize,
    couplings: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<BTreeMap<(u32, u32), f64>, ModelError> {
    let mut map = BTreeMap::new();
    for (a, b, value) in couplings {
        if a == b {
            return Err(ModelError::SelfCoupling(a));
        }
        if a >= n || b >= n {
            return Err(ModelError::CouplingOutOfRange { i: a, j: b, n });
        }
        if !value.is_finite() {
            return Err(ModelError::NonFiniteCoefficient);
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if value == 0.0 {
            continue;
        }
        if map.insert((i as u32, j as u32), value).is_some() {
            return Err(ModelError::DuplicateCoupling { i, j });
        }
    }
    Ok(map)
}

fn build_neighbors(n: usize, couplings: &BTreeMap<(u32, u32), f64>) -> Vec<Vec<(u32, f64)>> {
    let mut neighbors = vec![Vec::new(); n];
    for (&(i, j), &v) in couplings {
        neighbors[i as usize].push((j, v));
        neighbors[j as usize].push((i, v));
    }
    neighbors
}

impl IsingModel {
    /// Couplings may be given in either index order; zero couplings are
    /// dropped, duplicates are rejected.
    pub fn new(
        n_spins: usize,
        couplings: impl IntoIterator<Item = (usize, usize, f64)>,
        fields: Vec<f64>,
        offset: f64,
    ) -> Result<Self, ModelError> {
        if n_spins == 0 {
            return Err(ModelError::Empty);
        }
        if fields.len() != n_spins {
            return Err(ModelError::LinearLengthMismatch {
                expected: n_spins,
                got: fields.len(),
            });
        }
        if !offset.is_finite() || fields.iter().any(|h| !h.is_finite()) {
            return Err(ModelError::NonFiniteCoefficient);
        }
        let couplings = normalize_couplings(n_spins, couplings)?;
        let neighbors = build_neighbors(n_spins, &couplings);
        Ok(IsingModel {
            n_spins,
            couplings,
            fields,
            offset,
            neighbors,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.couplings
            .iter()
            .map(|(&(i, j), &v)| (i as usize, j as usize, v))
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Energy of a spin configuration.
    pub fn energy(&self, config: &SpinConfig) -> Result<f64, ModelError> {
        if config.len() != self.n_spins {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_spins,
                got: config.len(),
            });
        }
        Ok(self.energy_unchecked(&config.spins))
    }

    fn energy_unchecked(&self, spins: &[i8]) -> f64 {
        let mut e = self.offset;
        for (&(i, j), &v) in &self.couplings {
            e -= v * f64::from(spins[i as usize] * spins[j as usize]);
        }
        for (h, &s) in self.fields.iter().zip(spins) {
            e -= h * f64::from(s);
        }
        e
    }

    /// All configurations attaining the minimum energy, with that minimum,
    /// by exhaustive search over 2^n configurations (n capped at
    /// [`GROUND_STATE_CAP`]). Output is sorted by solution key.
    ///
    /// The walk visits configurations in Gray-code order so each step flips
    /// a single spin; candidate minima are re-evaluated from scratch so the
    /// incremental updates cannot drift ties apart.
    pub fn ground_states_exhaustive(&self) -> Result<(Vec<SpinConfig>, f64), ModelError> {
        let n = self.n_spins;
        if n > GROUND_STATE_CAP {
            return Err(ModelError::GroundStateCapExceeded {
                n,
                cap: GROUND_STATE_CAP,
            });
        }
        let mut spins = vec![1i8; n];
        let mut locals: Vec<f64> = (0..n)
            .map(|i| {
                self.fields[i]
                    + self.neighbors[i]
                        .iter()
                        .map(|&(j, v)| v * f64::from(spins[j as usize]))
                        .sum::<f64>()
            })
            .collect();
        let mut energy = self.energy_unchecked(&spins);
        let mut best = energy;
        let mut ties = vec![SpinConfig { spins: spins.clone() }];

        let total: u64 = 1 << n;
        for step in 1..total {
            let flip = step.trailing_zeros() as usize;
            let old = spins[flip];
            energy += 2.0 * f64::from(old) * locals[flip];
            spins[flip] = -old;
            for &(j, v) in &self.neighbors[flip] {
                locals[j as usize] -= 2.0 * v * f64::from(old);
            }
            let guard = 1e-9 * (1.0 + best.abs());
            if energy <= best + guard {
                let exact = self.energy_unchecked(&spins);
                if exact < best {
                    best = exact;
                    ties.clear();
                    ties.push(SpinConfig { spins: spins.clone() });
                } else if exact == best {
                    ties.push(SpinConfig { spins: spins.clone() });
                }
            }
        }
        ties.sort_by_key(|c| c.to_key());
        Ok((ties, best))
    }
}

/// Quadratic energy over binary variables:
/// `E(x) = sum_i linear_i x_i + sum_{u<v} quadratic_uv x_u x_v + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    n_vars: usize,
    quadratic: BTreeMap<(u32, u32), f64>,
    linear: Vec<f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(
        n_vars: usize,
        quadratic: impl IntoIterator<Item = (usize, usize, f64)>,
        linear: Vec<f64>,
        offset: f64,
    ) -> Result<Self, ModelError> {
        if n_vars == 0 {
            return Err(ModelError::Empty);
        }
        if linear.len() != n_vars {
            return Err(ModelError::LinearLengthMismatch {
                expected: n_vars,
                got: linear.len(),
            });
        }
        if !offset.is_finite() || linear.iter().any(|a| !a.is_finite()) {
            return Err(ModelError::NonFiniteCoefficient);
        }
        let quadratic = normalize_couplings(n_vars, quadratic)?;
        Ok(QuboModel {
            n_vars,
            quadratic,
            linear,
            offset,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn quadratic(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.quadratic
            .iter()
            .map(|(&(i, j), &v)| (i as usize, j as usize, v))
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Energy of a 0/1 assignment.
    pub fn energy(&self, assignment: &[bool]) -> Result<f64, ModelError> {
        if assignment.len() != self.n_vars {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_vars,
                got: assignment.len(),
            });
        }
        let mut e = self.offset;
        for (a, &x) in self.linear.iter().zip(assignment) {
            if x {
                e += a;
            }
        }
        for (&(u, v), &q) in &self.quadratic {
            if assignment[u as usize] && assignment[v as usize] {
                e += q;
            }
        }
        Ok(e)
    }

    /// Equivalent Ising model under sigma = 1 - 2x. The energy of every
    /// assignment is preserved exactly; constants move into the offset.
    pub fn to_ising(&self) -> IsingModel {
        let n = self.n_vars;
        let mut fields = vec![0.0; n];
        let mut offset = self.offset;
        for (v, &a) in self.linear.iter().enumerate() {
            fields[v] += a / 2.0;
            offset += a / 2.0;
        }
        let mut couplings = Vec::with_capacity(self.quadratic.len());
        for (&(u, v), &q) in &self.quadratic {
            couplings.push((u as usize, v as usize, -q / 4.0));
            fields[u as usize] += q / 4.0;
            fields[v as usize] += q / 4.0;
            offset += q / 4.0;
        }
        IsingModel::new(n, couplings, fields, offset)
            .expect("conversion preserves validity")
    }
}

/// A spin configuration with entries in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self, ModelError> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(ModelError::InvalidSpinValue);
        }
        Ok(SpinConfig { spins })
    }

    /// Configuration corresponding to an assignment x via sigma = 1 - 2x.
    pub fn from_bits(bits: &[bool]) -> Self {
        SpinConfig {
            spins: bits.iter().map(|&b| if b { -1 } else { 1 }).collect(),
        }
    }

    pub fn from_key(key: &SolutionKey) -> Self {
        SpinConfig {
            spins: (0..key.len())
                .map(|i| if key.get(i) { -1 } else { 1 })
                .collect(),
        }
    }

    /// Key in the x picture: bit set where sigma = -1.
    pub fn to_key(&self) -> SolutionKey {
        let bits: Vec<bool> = self.spins.iter().map(|&s| s == -1).collect();
        SolutionKey::from_bools(&bits)
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Geometric,
    Linear,
}

/// Inverse-temperature ramp for the annealer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub sweeps: u32,
    pub beta_initial: f64,
    pub beta_final: f64,
    pub interpolation: Interpolation,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            sweeps: 1000,
            beta_initial: 0.1,
            beta_final: 10.0,
            interpolation: Interpolation::Geometric,
        }
    }
}

impl AnnealSchedule {
    pub fn new(
        sweeps: u32,
        beta_initial: f64,
        beta_final: f64,
        interpolation: Interpolation,
    ) -> Result<Self, ModelError> {
        let valid = sweeps >= 1
            && beta_initial > 0.0
            && beta_final >= beta_initial
            && beta_final.is_finite();
        if !valid {
            return Err(ModelError::InvalidSchedule);
        }
        Ok(AnnealSchedule {
            sweeps,
            beta_initial,
            beta_final,
            interpolation,
        })
    }

    fn beta_at(&self, sweep: u32) -> f64 {
        if self.sweeps <= 1 {
            return self.beta_final;
        }
        let t = f64::from(sweep) / f64::from(self.sweeps - 1);
        match self.interpolation {
            Interpolation::Geometric => {
                self.beta_initial * (self.beta_final / self.beta_initial).powf(t)
            }
            Interpolation::Linear => self.beta_initial + (self.beta_final - self.beta_initial) * t,
        }
    }
}

/// One annealing run: a uniformly random start followed by `sweeps` passes
/// of single-spin Metropolis updates in fixed index order, with beta ramped
/// from `beta_initial` to `beta_final`. Deterministic in (model, schedule,
/// seed).
pub fn sa_sample(model: &IsingModel, schedule: &AnnealSchedule, seed: u64) -> SpinConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sa_sample_with_rng(model, schedule, &mut rng)
}

/// [`sa_sample`] driven by an external generator, for samplers that draw
/// many times from one seeded stream.
pub fn sa_sample_with_rng(
    model: &IsingModel,
    schedule: &AnnealSchedule,
    rng: &mut ChaCha8Rng,
) -> SpinConfig {
    let n = model.n_spins;
    let mut spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    // local field L_i = sum_j J_ij sigma_j + h_i; flipping i costs
    // delta = 2 sigma_i L_i and shifts each neighbor's local field
    let mut locals: Vec<f64> = (0..n)
        .map(|i| {
            model.fields[i]
                + model.neighbors[i]
                    .iter()
                    .map(|&(j, v)| v * f64::from(spins[j as usize]))
                    .sum::<f64>()
        })
        .collect();
    for sweep in 0..schedule.sweeps {
        let beta = schedule.beta_at(sweep);
        for i in 0..n {
            let delta = 2.0 * f64::from(spins[i]) * locals[i];
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp();
            if accept {
                let old = spins[i];
                spins[i] = -old;
                for &(j, v) in &model.neighbors[i] {
                    locals[j as usize] -= 2.0 * v * f64::from(old);
                }
            }
        }
    }
    SpinConfig { spins }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(spins: &[i8]) -> SpinConfig {
        SpinConfig::new(spins.to_vec()).unwrap()
    }

    #[test]
    fn ising_energy_ferromagnetic_pair() {
        let m = IsingModel::new(2, vec![(0, 1, 1.0)], vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(m.energy(&config(&[1, 1])).unwrap(), -1.0);
        assert_eq!(m.energy(&config(&[1, -1])).unwrap(), 1.0);
    }

    #[test]
    fn ising_energy_degenerate_model_is_offset() {
        let m = IsingModel::new(3, vec![], vec![0.0; 3], 2.5).unwrap();
        for bits in 0..8u32 {
            let spins: Vec<i8> = (0..3).map(|b| if bits >> b & 1 == 1 { -1 } else { 1 }).collect();
            assert_eq!(m.energy(&config(&spins)).unwrap(), 2.5);
        }
    }

    #[test]
    fn ising_energy_single_spin_field() {
        let m = IsingModel::new(1, vec![], vec![1.0], 0.0).unwrap();
        assert_eq!(m.energy(&config(&[-1])).unwrap(), 1.0);
        assert_eq!(m.energy(&config(&[1])).unwrap(), -1.0);
    }

    #[test]
    fn ising_energy_ignores_coupling_input_order() {
        let a = IsingModel::new(3, vec![(0, 1, 0.5), (1, 2, -0.25)], vec![0.1; 3], 0.0).unwrap();
        let b = IsingModel::new(3, vec![(2, 1, -0.25), (1, 0, 0.5)], vec![0.1; 3], 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn model_construction_errors() {
        assert_eq!(
            IsingModel::new(2, vec![(0, 0, 1.0)], vec![0.0; 2], 0.0),
            Err(ModelError::SelfCoupling(0))
        );
        assert_eq!(
            IsingModel::new(2, vec![(0, 2, 1.0)], vec![0.0; 2], 0.0),
            Err(ModelError::CouplingOutOfRange { i: 0, j: 2, n: 2 })
        );
        assert_eq!(
            IsingModel::new(2, vec![(0, 1, 1.0), (1, 0, 2.0)], vec![0.0; 2], 0.0),
            Err(ModelError::DuplicateCoupling { i: 0, j: 1 })
        );
        assert!(IsingModel::new(0, vec![], vec![], 0.0).is_err());
        assert!(IsingModel::new(1, vec![], vec![f64::NAN], 0.0).is_err());
        assert!(SpinConfig::new(vec![1, 0]).is_err());
    }

    #[test]
    fn qubo_energy_examples() {
        let single = QuboModel::new(1, vec![], vec![-1.0], 0.0).unwrap();
        assert_eq!(single.energy(&[true]).unwrap(), -1.0);
        assert_eq!(single.energy(&[false]).unwrap(), 0.0);
        let offset_only = QuboModel::new(3, vec![], vec![0.0; 3], 4.0).unwrap();
        assert_eq!(offset_only.energy(&[false, false, false]).unwrap(), 4.0);
    }

    #[test]
    fn qubo_to_ising_single_variable() {
        let q = QuboModel::new(1, vec![], vec![1.0], 0.0).unwrap();
        let m = q.to_ising();
        assert_eq!(m.fields(), &[0.5]);
        assert_eq!(m.offset(), 0.5);
        assert_eq!(m.couplings().count(), 0);
    }

    #[test]
    fn qubo_to_ising_zero_model() {
        let q = QuboModel::new(4, vec![], vec![0.0; 4], 0.0).unwrap();
        let m = q.to_ising();
        assert_eq!(m.fields(), &[0.0; 4]);
        assert_eq!(m.offset(), 0.0);
        assert_eq!(m.couplings().count(), 0);
    }

    #[test]
    fn qubo_to_ising_preserves_energy_exactly() {
        let q = QuboModel::new(
            3,
            vec![(0, 1, 2.0), (0, 2, -1.5), (1, 2, 0.75)],
            vec![-1.0, 0.5, 2.0],
            0.25,
        )
        .unwrap();
        let m = q.to_ising();
        for bits in 0..8u32 {
            let x: Vec<bool> = (0..3).map(|b| bits >> b & 1 == 1).collect();
            let sigma = SpinConfig::from_bits(&x);
            let eq = q.energy(&x).unwrap();
            let ei = m.energy(&sigma).unwrap();
            assert!((eq - ei).abs() <= 1e-12, "{eq} vs {ei}");
        }
    }

    #[test]
    fn ground_states_ferromagnetic_pair() {
        let m = IsingModel::new(2, vec![(0, 1, 1.0)], vec![0.0, 0.0], 0.0).unwrap();
        let (states, e) = m.ground_states_exhaustive().unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states, vec![config(&[1, 1]), config(&[-1, -1])]);
    }

    #[test]
    fn ground_states_single_spin() {
        let m = IsingModel::new(1, vec![], vec![1.0], 0.0).unwrap();
        let (states, e) = m.ground_states_exhaustive().unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states, vec![config(&[1])]);
    }

    #[test]
    fn ground_states_frustrated_triangle() {
        let m = IsingModel::new(
            3,
            vec![(0, 1, -1.0), (0, 2, -1.0), (1, 2, -1.0)],
            vec![0.0; 3],
            0.0,
        )
        .unwrap();
        let (states, e) = m.ground_states_exhaustive().unwrap();
        assert_eq!(e, -1.0);
        assert_eq!(states.len(), 6);
    }

    #[test]
    fn ground_states_cap() {
        let m = IsingModel::new(25, vec![], vec![0.0; 25], 0.0).unwrap();
        assert!(matches!(
            m.ground_states_exhaustive(),
            Err(ModelError::GroundStateCapExceeded { .. })
        ));
    }

    #[test]
    fn sa_is_deterministic_per_seed() {
        let m = IsingModel::new(
            4,
            vec![(0, 1, 1.0), (1, 2, -0.5), (2, 3, 0.25)],
            vec![0.1, -0.2, 0.3, 0.0],
            0.0,
        )
        .unwrap();
        let schedule = AnnealSchedule::default();
        assert_eq!(sa_sample(&m, &schedule, 99), sa_sample(&m, &schedule, 99));
    }

    #[test]
    fn sa_finds_single_spin_ground_state() {
        let m = IsingModel::new(1, vec![], vec![1.0], 0.0).unwrap();
        let schedule = AnnealSchedule::default();
        let mut up = 0u32;
        for seed in 0..1000 {
            if sa_sample(&m, &schedule, seed).spins() == [1] {
                up += 1;
            }
        }
        assert!(up >= 950, "ground-state frequency {up}/1000");
    }

    #[test]
    fn sa_uniform_on_flat_landscape() {
        // zero model: the stationary distribution is uniform over the four
        // configurations; chi-squared test at level 0.01 (df 3, cutoff 11.345)
        let m = IsingModel::new(2, vec![], vec![0.0, 0.0], 0.0).unwrap();
        let schedule = AnnealSchedule::default();
        let mut counts = [0u64; 4];
        for seed in 0..10_000 {
            let cfg = sa_sample(&m, &schedule, seed);
            let idx = cfg.spins().iter().enumerate().fold(0usize, |acc, (i, &s)| {
                acc | usize::from(s == -1) << i
            });
            counts[idx] += 1;
        }
        let expected = 2500.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 11.345, "chi2 {chi2}, counts {counts:?}");
    }

    #[test]
    fn schedule_validation() {
        assert!(AnnealSchedule::new(0, 0.1, 1.0, Interpolation::Linear).is_err());
        assert!(AnnealSchedule::new(10, 0.0, 1.0, Interpolation::Linear).is_err());
        assert!(AnnealSchedule::new(10, 2.0, 1.0, Interpolation::Linear).is_err());
        assert!(AnnealSchedule::new(10, 0.5, 0.5, Interpolation::Geometric).is_ok());
    }

    #[test]
    fn key_spin_roundtrip() {
        let cfg = config(&[1, -1, -1, 1]);
        let key = cfg.to_key();
        assert_eq!(format!("{key}"), "0110");
        assert_eq!(SpinConfig::from_key(&key), cfg);
    }
}
