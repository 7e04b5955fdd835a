//! Deterministic k-means (Lloyd iteration with restarts) over labelled points.
//!
//! Points are put in a canonical order (by label, then coordinates) before
//! clustering, so the result does not depend on input order. The first
//! restart seeds centroids farthest-first from the point of largest norm;
//! later restarts draw `k` distinct points from a ChaCha8 stream seeded with
//! `seed + restart`. The restart with the smallest within-cluster SSE wins,
//! ties going to the earlier restart. Clusters are finally renumbered by
//! ascending centroid coordinates.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("no points to cluster")]
    EmptyInput,
    #[error("k = {k} exceeds the {n} available points")]
    TooManyClusters { k: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("point `{label}` has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        got: usize,
    },
    #[error("point `{0}` has a non-finite coordinate")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("clustering result does not match the given points")]
    MismatchedInputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePoint {
    pub label: String,
    pub coords: Vec<f64>,
}

impl FeaturePoint {
    pub fn new(label: impl Into<String>, coords: impl Into<Vec<f64>>) -> Self {
        Self {
            label: label.into(),
            coords: coords.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureScaling {
    #[default]
    None,
    /// Standardise each coordinate to zero mean and unit (population) variance.
    ZScore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iterations: usize,
    /// Largest centroid movement regarded as converged.
    pub convergence_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub feature_scaling: FeatureScaling,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_scaling(mut self, scaling: FeatureScaling) -> Self {
        self.feature_scaling = scaling;
        self
    }
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: 2,
            max_iterations: 100,
            convergence_tol: 1e-9,
            restarts: 100,
            seed: 0,
            feature_scaling: FeatureScaling::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    /// Centroids in input units, numbered by ascending coordinates.
    pub centroids: Vec<Vec<f64>>,
    pub assignment: BTreeMap<String, usize>,
    /// Within-cluster sum of squared distances, in the clustered space.
    pub within_sse: f64,
    /// Lloyd iterations of the winning restart.
    pub iterations: usize,
    /// Index of the restart that produced this result.
    pub restart: usize,
}

impl ClusteringResult {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Labels of each cluster, sorted.
    pub fn members(&self) -> Vec<Vec<String>> {
        let mut groups = vec![Vec::new(); self.k()];
        for (label, &c) in &self.assignment {
            groups[c].push(label.clone());
        }
        groups
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn cmp_coords(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Index of the nearest centroid, ties to the lowest index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn means(points: &[Vec<f64>], assignment: &[usize], k: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &n) in sums.iter_mut().zip(&counts) {
        if n > 0 {
            for x in s.iter_mut() {
                *x /= n as f64;
            }
        }
    }
    (sums, counts)
}

fn sse(points: &[Vec<f64>], assignment: &[usize], centroids: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

struct Run {
    assignment: Vec<usize>,
    sse: f64,
    iterations: usize,
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(
    points: &[Vec<f64>],
    assignment: &mut [usize],
    centroids: &mut [Vec<f64>],
    counts: &mut [usize],
) {
    while let Some(empty) = counts.iter().position(|&n| n == 0) {
        let donor = (0..points.len())
            .filter(|&i| counts[assignment[i]] > 1)
            .max_by(|&i, &j| {
                sq_dist(&points[i], &centroids[assignment[i]])
                    .total_cmp(&sq_dist(&points[j], &centroids[assignment[j]]))
                    .then(j.cmp(&i))
            })
            .expect("k <= n guarantees a cluster with two or more points");
        counts[assignment[donor]] -= 1;
        assignment[donor] = empty;
        counts[empty] = 1;
        centroids[empty] = points[donor].clone();
    }
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, config: &KMeansConfig) -> Run {
    let k = centroids.len();
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let (mut next, mut counts) = means(points, &assignment, k);
        if counts.contains(&0) {
            repair_empty(points, &mut assignment, &mut next, &mut counts);
            next = means(points, &assignment, k).0;
        }
        let movement = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        let reassigned: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        let stable = reassigned == assignment;
        assignment = reassigned;
        if stable && movement <= config.convergence_tol {
            break;
        }
    }
    let (mut final_centroids, mut counts) = means(points, &assignment, k);
    if counts.contains(&0) {
        repair_empty(points, &mut assignment, &mut final_centroids, &mut counts);
        final_centroids = means(points, &assignment, k).0;
    }
    Run {
        sse: sse(points, &assignment, &final_centroids),
        assignment,
        iterations,
    }
}

/// Farthest-first seeding starting from the point of largest norm.
fn farthest_first(points: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let norm = |p: &Vec<f64>| p.iter().map(|x| x * x).sum::<f64>();
    let first = (0..points.len())
        .max_by(|&i, &j| {
            norm(&points[i])
                .total_cmp(&norm(&points[j]))
                .then(j.cmp(&i))
        })
        .unwrap_or(0);
    let mut chosen = vec![first];
    let mut min_d: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while chosen.len() < k {
        let next = (0..points.len())
            .max_by(|&i, &j| min_d[i].total_cmp(&min_d[j]).then(j.cmp(&i)))
            .unwrap_or(0);
        chosen.push(next);
        for (d, p) in min_d.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn random_seeds(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, points.len(), k)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

fn zscore(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let n = points.len() as f64;
    let mut out = points.to_vec();
    for d in 0..dim {
        let mean = points.iter().map(|p| p[d]).sum::<f64>() / n;
        let var = points.iter().map(|p| (p[d] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for p in out.iter_mut() {
            p[d] = if sd > 0.0 { (p[d] - mean) / sd } else { 0.0 };
        }
    }
    out
}

fn validate(points: &[FeaturePoint], config: &KMeansConfig) -> Result<(), ClusterError> {
    let first = points.first().ok_or(ClusterError::EmptyInput)?;
    if config.k == 0 {
        return Err(ClusterError::ZeroClusters);
    }
    if config.k > points.len() {
        return Err(ClusterError::TooManyClusters {
            k: config.k,
            n: points.len(),
        });
    }
    if config.max_iterations == 0 {
        return Err(ClusterError::InvalidConfig(
            "max_iterations must be positive",
        ));
    }
    if config.restarts == 0 {
        return Err(ClusterError::InvalidConfig("restarts must be positive"));
    }
    if config.convergence_tol.is_nan() || config.convergence_tol < 0.0 {
        return Err(ClusterError::InvalidConfig(
            "convergence_tol must be non-negative",
        ));
    }
    let dim = first.coords.len();
    if dim == 0 {
        return Err(ClusterError::InvalidConfig(
            "points need at least one coordinate",
        ));
    }
    for p in points {
        if p.coords.len() != dim {
            return Err(ClusterError::DimensionMismatch {
                label: p.label.clone(),
                expected: dim,
                got: p.coords.len(),
            });
        }
        if p.coords.iter().any(|x| !x.is_finite()) {
            return Err(ClusterError::NonFinite(p.label.clone()));
        }
    }
    Ok(())
}

pub fn kmeans(
    points: &[FeaturePoint],
    config: &KMeansConfig,
) -> Result<ClusteringResult, ClusterError> {
    validate(points, config)?;
    let k = config.k;

    let mut ordered: Vec<&FeaturePoint> = points.iter().collect();
    ordered.sort_by(|a, b| {
        a.label
            .cmp(&b.label)
            .then_with(|| cmp_coords(&a.coords, &b.coords))
    });
    let raw: Vec<Vec<f64>> = ordered.iter().map(|p| p.coords.clone()).collect();
    let work = match config.feature_scaling {
        FeatureScaling::None => raw.clone(),
        FeatureScaling::ZScore => zscore(&raw),
    };

    let mut best: Option<(usize, Run)> = None;
    for restart in 0..config.restarts {
        let seeds = if restart == 0 {
            farthest_first(&work, k)
        } else {
            random_seeds(&work, k, config.seed.wrapping_add(restart as u64))
        };
        let run = lloyd(&work, seeds, config);
        if best.as_ref().is_none_or(|(_, b)| run.sse < b.sse) {
            best = Some((restart, run));
        }
    }
    let (restart, run) = best.expect("restarts > 0");

    // Centroids in input units, then canonical renumbering.
    let (centroids, _) = means(&raw, &run.assignment, k);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| cmp_coords(&centroids[a], &centroids[b]).then(a.cmp(&b)));
    let mut relabel = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
    }
    let assignment = ordered
        .iter()
        .zip(&run.assignment)
        .map(|(p, &c)| (p.label.clone(), relabel[c]))
        .collect();
    Ok(ClusteringResult {
        centroids: order.iter().map(|&c| centroids[c].clone()).collect(),
        assignment,
        within_sse: run.sse,
        iterations: run.iterations,
        restart,
    })
}

/// One cluster in a [`ClusterReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterGroup {
    pub index: usize,
    pub centroid: Vec<f64>,
    pub members: Vec<String>,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub groups: Vec<ClusterGroup>,
    pub within_sse: f64,
    pub iterations: usize,
}

/// Per-cluster membership (sorted by label), centroid and SSE in input units.
pub fn cluster_report(
    result: &ClusteringResult,
    points: &[FeaturePoint],
) -> Result<ClusterReport, ClusterError> {
    if points.len() != result.assignment.len() {
        return Err(ClusterError::MismatchedInputs);
    }
    let k = result.k();
    let mut groups: Vec<ClusterGroup> = result
        .centroids
        .iter()
        .enumerate()
        .map(|(index, c)| ClusterGroup {
            index,
            centroid: c.clone(),
            members: Vec::new(),
            sse: 0.0,
        })
        .collect();
    for p in points {
        let &c = result
            .assignment
            .get(&p.label)
            .ok_or(ClusterError::MismatchedInputs)?;
        if c >= k || p.coords.len() != groups[c].centroid.len() {
            return Err(ClusterError::MismatchedInputs);
        }
        groups[c].sse += sq_dist(&p.coords, &groups[c].centroid);
        groups[c].members.push(p.label.clone());
    }
    for g in &mut groups {
        g.members.sort();
    }
    Ok(ClusterReport {
        k,
        within_sse: groups.iter().map(|g| g.sse).sum(),
        groups,
        iterations: result.iterations,
    })
}

impl std::fmt::Display for ClusterReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "k = {} (SSE {:.5})", self.k, self.within_sse)?;
        for g in &self.groups {
            let centroid: Vec<String> = g.centroid.iter().map(|x| format!("{x:.3}")).collect();
            writeln!(
                f,
                "  group {}: ({}) {{{}}}",
                g.index + 1,
                centroid.join(", "),
                g.members.join(", ")
            )?;
        }
        Ok(())
    }
}
