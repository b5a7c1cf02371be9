//! K-means over spectrum features, with an inertia-elbow scan for picking k.
//!
//! Initialization draws are keyed to point coordinates rather than input
//! position, and centroid means sum members in a canonical order, so a fixed
//! seed yields the same clustering no matter how the features are ordered.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::langid::fnv1a;
use crate::spectral::SpectrumFeature;

/// Fitted k-means model.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub seed: u64,
    pub iterations_run: usize,
    pub converged: bool,
}

/// One document's cluster index and Euclidean distance to its centroid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub doc_id: String,
    pub cluster: usize,
    pub distance: f64,
}

/// Lloyd-iteration settings shared by [`kmeans_fit`] and [`elbow_scan`].
#[derive(Debug, Clone)]
pub struct KMeansParams {
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            max_iter: 300,
            tol: 1e-6,
            restarts: 10,
        }
    }
}

/// Inertia per k plus the elbow choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElbowReport {
    pub k_values: Vec<usize>,
    pub inertias: Vec<f64>,
    pub selected_k: usize,
}

impl ElbowReport {
    /// Discrete curvature inertia(k-1) - 2*inertia(k) + inertia(k+1);
    /// `None` at the endpoints where it is undefined.
    pub fn second_differences(&self) -> Vec<Option<f64>> {
        (0..self.inertias.len())
            .map(|i| {
                if i == 0 || i + 1 == self.inertias.len() {
                    None
                } else {
                    Some(self.inertias[i - 1] - 2.0 * self.inertias[i] + self.inertias[i + 1])
                }
            })
            .collect()
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Coordinate-wise order; used for order-independent tie-breaking and for
/// summing cluster members in a canonical sequence.
fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Hash of (seed, restart, round, point coordinates) mapped into (0, 1).
fn point_draw(seed: u64, restart: u64, round: u64, point: &[f64]) -> f64 {
    let mut bytes = Vec::with_capacity(24 + point.len() * 8);
    bytes.extend_from_slice(&seed.to_le_bytes());
    bytes.extend_from_slice(&restart.to_le_bytes());
    bytes.extend_from_slice(&round.to_le_bytes());
    for &v in point {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    ((fnv1a(&bytes) >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// K-means++ initialization with draws keyed to point identity: each round
/// every candidate gets an exponential race time -ln(u)/weight and the
/// smallest time wins, which picks points with probability proportional to
/// their squared distance from the chosen centroids but independently of
/// input order.
fn plus_plus_init(points: &[Vec<f64>], k: usize, seed: u64, restart: u64) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    for round in 0..k as u64 {
        let mut best: Option<(f64, &Vec<f64>)> = None;
        for point in points {
            let u = point_draw(seed, restart, round, point);
            let race = if round == 0 {
                -u.ln()
            } else {
                let d2 = centroids
                    .iter()
                    .map(|c| squared_distance(point, c))
                    .fold(f64::INFINITY, f64::min);
                if d2 > 0.0 {
                    -u.ln() / d2
                } else {
                    f64::INFINITY
                }
            };
            let better = match &best {
                None => true,
                Some((t, p)) => {
                    race < *t || (race == *t && cmp_points(point, p) == Ordering::Less)
                }
            };
            if better {
                best = Some((race, point));
            }
        }
        let (race, choice) = best.expect("at least one point");
        if race.is_infinite() {
            // Every remaining point coincides with a centroid; duplicate one
            // and let empty-cluster repair sort it out.
            centroids.push(points[0].clone());
        } else {
            centroids.push(choice.clone());
        }
    }
    centroids
}

/// Nearest-centroid index; ties go to the lowest index.
fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d2 = squared_distance(point, c);
        if d2 < best.1 {
            best = (i, d2);
        }
    }
    best
}

fn assign_all(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut labels = Vec::with_capacity(points.len());
    let mut total = 0.0;
    for point in points {
        let (label, d2) = nearest(centroids, point);
        labels.push(label);
        total += d2;
    }
    (labels, total)
}

/// New centroids as member means, summed in canonical point order. A cluster
/// with no members is reseeded to the point farthest from its previous
/// centroid (skipping points already used to repair another cluster).
fn update_centroids(
    points: &[Vec<f64>],
    labels: &[usize],
    previous: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let k = previous.len();
    let dim = previous[0].len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &label) in labels.iter().enumerate() {
        members[label].push(i);
    }
    let mut repaired: Vec<usize> = Vec::new();
    let mut centroids = Vec::with_capacity(k);
    for (c, member) in members.iter_mut().enumerate() {
        if member.is_empty() {
            let far = (0..points.len())
                .filter(|i| !repaired.contains(i))
                .max_by(|&a, &b| {
                    squared_distance(&points[a], &previous[c])
                        .total_cmp(&squared_distance(&points[b], &previous[c]))
                        .then_with(|| cmp_points(&points[b], &points[a]))
                })
                .expect("fewer repairs than points");
            repaired.push(far);
            centroids.push(points[far].clone());
            continue;
        }
        member.sort_by(|&a, &b| cmp_points(&points[a], &points[b]));
        let mut mean = vec![0.0; dim];
        for &i in member.iter() {
            for (m, v) in mean.iter_mut().zip(&points[i]) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= member.len() as f64;
        }
        centroids.push(mean);
    }
    centroids
}

struct Fit {
    centroids: Vec<Vec<f64>>,
    labels: Vec<usize>,
    inertia: f64,
    iterations: usize,
    converged: bool,
}

fn lloyd(points: &[Vec<f64>], init: Vec<Vec<f64>>, max_iter: usize, tol: f64) -> Fit {
    let mut centroids = init;
    let mut prev_inertia = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        iterations += 1;
        let (_, inertia) = assign_all(points, &centroids);
        debug_assert!(
            inertia <= prev_inertia + 1e-9,
            "inertia rose from {prev_inertia} to {inertia}"
        );
        prev_inertia = inertia;
        let labels = assign_all(points, &centroids).0;
        let next = update_centroids(points, &labels, &centroids);
        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < tol {
            converged = true;
            break;
        }
    }
    let (labels, inertia) = assign_all(points, &centroids);
    debug_assert!(inertia <= prev_inertia + 1e-9);
    Fit {
        centroids,
        labels,
        inertia,
        iterations,
        converged,
    }
}

fn validate_features(features: &[SpectrumFeature], k: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::InvalidHyperparameter("k must be at least 1".into()));
    }
    if features.len() < k {
        return Err(Error::TooFewPoints {
            k,
            points: features.len(),
        });
    }
    let expected = features[0].bins.len();
    for f in features {
        if f.bins.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: f.bins.len(),
            });
        }
    }
    Ok(features.iter().map(|f| f.bins.clone()).collect())
}

/// Best of `restarts` k-means++ runs, optionally with one extra run from an
/// explicit warm-start init. Ties in inertia keep the earliest run.
fn best_fit(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    params: &KMeansParams,
    warm_start: Option<Vec<Vec<f64>>>,
) -> Result<Fit> {
    if params.restarts == 0 || params.max_iter == 0 {
        return Err(Error::InvalidHyperparameter(
            "restarts and max_iter must be at least 1".into(),
        ));
    }
    if params.tol.is_nan() || params.tol < 0.0 {
        return Err(Error::InvalidHyperparameter(
            "tol must be non-negative".into(),
        ));
    }
    let mut best: Option<Fit> = None;
    let inits = (0..params.restarts as u64)
        .map(|r| plus_plus_init(points, k, seed, r))
        .chain(warm_start);
    for init in inits {
        let fit = lloyd(points, init, params.max_iter, params.tol);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Fits k-means with k-means++ initialization, Lloyd iterations, and
/// best-of-restarts selection by inertia. Deterministic for a fixed seed,
/// regardless of feature order.
pub fn kmeans_fit(
    features: &[SpectrumFeature],
    k: usize,
    seed: u64,
    params: &KMeansParams,
) -> Result<(KMeansModel, Vec<ClusterAssignment>)> {
    let points = validate_features(features, k)?;
    let fit = best_fit(&points, k, seed, params, None)?;
    let assignments = features
        .iter()
        .zip(&fit.labels)
        .zip(&points)
        .map(|((f, &cluster), point)| ClusterAssignment {
            doc_id: f.doc_id.clone(),
            cluster,
            distance: squared_distance(point, &fit.centroids[cluster]).sqrt(),
        })
        .collect();
    let model = KMeansModel {
        k,
        centroids: fit.centroids,
        seed,
        iterations_run: fit.iterations,
        converged: fit.converged,
    };
    Ok((model, assignments))
}

/// Sum over features of the squared Euclidean distance to the nearest
/// centroid.
pub fn inertia(model: &KMeansModel, features: &[SpectrumFeature]) -> f64 {
    features
        .iter()
        .map(|f| {
            assert_eq!(f.bins.len(), model.centroids[0].len(), "dimension mismatch");
            nearest(&model.centroids, &f.bins).1
        })
        .sum()
}

/// Index of the nearest centroid; ties go to the lowest index.
pub fn assign(model: &KMeansModel, feature: &SpectrumFeature) -> usize {
    assert_eq!(
        feature.bins.len(),
        model.centroids[0].len(),
        "dimension mismatch"
    );
    nearest(&model.centroids, &feature.bins).0
}

/// Fits every k in `k_min..=k_max` and picks the elbow: the interior k
/// maximizing the second difference of the inertia curve (ties go to the
/// smallest k). Each k also tries a warm start built from the previous best
/// centroids plus the point farthest from them, so the reported inertias
/// never increase with k.
pub fn elbow_scan(
    features: &[SpectrumFeature],
    k_min: usize,
    k_max: usize,
    seed: u64,
    restarts: usize,
) -> Result<ElbowReport> {
    if k_max < k_min + 2 {
        return Err(Error::ElbowRangeTooNarrow(k_min, k_max));
    }
    let params = KMeansParams {
        restarts,
        ..KMeansParams::default()
    };
    let points = validate_features(features, k_max.max(k_min))?;
    if k_min == 0 {
        return Err(Error::InvalidHyperparameter("k must be at least 1".into()));
    }

    let mut k_values = Vec::new();
    let mut inertias = Vec::new();
    let mut previous: Option<Vec<Vec<f64>>> = None;
    for k in k_min..=k_max {
        let warm = previous.take().map(|mut centroids| {
            let far = (0..points.len())
                .max_by(|&a, &b| {
                    nearest(&centroids, &points[a])
                        .1
                        .total_cmp(&nearest(&centroids, &points[b]).1)
                        .then_with(|| cmp_points(&points[b], &points[a]))
                })
                .expect("non-empty points");
            centroids.push(points[far].clone());
            centroids
        });
        let fit = best_fit(&points, k, seed, &params, warm)?;
        if let Some(&last) = inertias.last() {
            debug_assert!(fit.inertia <= last + 1e-9);
        }
        k_values.push(k);
        inertias.push(fit.inertia);
        previous = Some(fit.centroids);
    }

    let selected_k = (1..k_values.len() - 1)
        .max_by(|&a, &b| {
            let curve = |i: usize| inertias[i - 1] - 2.0 * inertias[i] + inertias[i + 1];
            curve(a).total_cmp(&curve(b)).then(b.cmp(&a))
        })
        .map(|i| k_values[i])
        .expect("range has an interior point");
    Ok(ElbowReport {
        k_values,
        inertias,
        selected_k,
    })
}
