//! Seeded instance generators: full sets, good sets, unconstrained
//! random sets, and random loops. Deterministic per seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::loops::find_loop;
use crate::model::{Point, PointSet};
use crate::structure::is_good;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// Grown so the counting identity holds at every step; always full.
    Full,
    /// Rejection sampling keeping only independent points; always good.
    Good,
    /// Distinct random points, no structural guarantee.
    Random,
    /// A random circuit, emitted as its own point set.
    Loop,
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub kind: GenKind,
    pub n: usize,
    pub size: usize,
    /// Per-axis label budgets (alphabet sizes).
    pub budgets: Vec<usize>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(
        kind: GenKind,
        n: usize,
        size: usize,
        budgets: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if size == 0 {
            return Err(Error::InfeasibleBudget("size must be at least 1".into()));
        }
        let budgets = match budgets.len() {
            0 => vec![size; n],
            1 => vec![budgets[0]; n],
            k if k == n => budgets,
            k => return Err(Error::InfeasibleBudget(format!("{k} budgets for {n} axes"))),
        };
        if budgets.contains(&0) {
            return Err(Error::InfeasibleBudget("budgets must be at least 1".into()));
        }
        Ok(GeneratorSpec {
            kind,
            n,
            size,
            budgets,
            seed,
        })
    }
}

const REJECTION_ATTEMPTS: usize = 20_000;

pub fn generate(spec: &GeneratorSpec) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::Full => generate_full(spec, &mut rng),
        GenKind::Good => generate_filtered(spec, &mut rng, true),
        GenKind::Random => generate_filtered(spec, &mut rng, false),
        GenKind::Loop => generate_loop(spec, &mut rng),
    }
}

/// Grows a full set: every step adds a point carrying exactly one fresh
/// coordinate and `n-1` labels drawn from the existing pools, so each
/// new row is independent (its fresh column is private) and the count
/// `N(S) - (n-1) = |S|` is preserved.
fn generate_full(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let n = spec.n;
    let mut pool_sizes = vec![1usize; n];
    let mut points = vec![Point::new((0..n).map(|_| "0".to_string()))];
    while points.len() < spec.size {
        let open: Vec<usize> = (0..n)
            .filter(|&i| pool_sizes[i] < spec.budgets[i])
            .collect();
        let Some(&axis) = open.choose(rng) else {
            return Err(Error::InfeasibleBudget(format!(
                "budgets exhausted after {} of {} points",
                points.len(),
                spec.size
            )));
        };
        let labels: Vec<String> = (0..n)
            .map(|i| {
                if i == axis {
                    pool_sizes[i].to_string()
                } else {
                    rng.gen_range(0..pool_sizes[i]).to_string()
                }
            })
            .collect();
        pool_sizes[axis] += 1;
        points.push(Point::new(labels));
    }
    let set = PointSet::new(n, points)?;
    debug_assert!(crate::structure::is_full(&set).unwrap());
    Ok(set)
}

/// Rejection sampling of distinct points; with `keep_good` every
/// accepted point must stay independent of the previous ones.
fn generate_filtered(
    spec: &GeneratorSpec,
    rng: &mut ChaCha8Rng,
    keep_good: bool,
) -> Result<PointSet> {
    let mut points: Vec<Point> = Vec::new();
    for _ in 0..REJECTION_ATTEMPTS {
        if points.len() == spec.size {
            break;
        }
        let candidate = random_point(spec, rng);
        if points.contains(&candidate) {
            continue;
        }
        if keep_good {
            let mut trial = points.clone();
            trial.push(candidate.clone());
            let trial = PointSet::new(spec.n, trial)?;
            if !is_good(&trial) {
                continue;
            }
        }
        points.push(candidate);
    }
    if points.len() < spec.size {
        return Err(Error::InfeasibleBudget(format!(
            "could not place {} points within the label budgets",
            spec.size
        )));
    }
    PointSet::new(spec.n, points)
}

/// Grows a good set until a random candidate closes a circuit, then
/// emits that circuit.
fn generate_loop(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let mut points: Vec<Point> = Vec::new();
    for _ in 0..REJECTION_ATTEMPTS {
        let candidate = random_point(spec, rng);
        if points.contains(&candidate) {
            continue;
        }
        let mut trial = points.clone();
        trial.push(candidate);
        let trial = PointSet::new(spec.n, trial)?;
        if is_good(&trial) {
            points = trial.points().to_vec();
            continue;
        }
        let cert = find_loop(&trial).expect("dependent set contains a loop");
        return Ok(cert.point_set(spec.n));
    }
    Err(Error::InfeasibleBudget(
        "no circuit arose within the label budgets".into(),
    ))
}

fn random_point(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Point {
    Point::new((0..spec.n).map(|i| rng.gen_range(0..spec.budgets[i]).to_string()))
}
