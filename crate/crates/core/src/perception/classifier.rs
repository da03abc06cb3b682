//! Room/passage classifier: at most two threshold rules learned by
//! clustering unlabelled views with k-means and fitting a depth-two tree.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{Feature, FeatureVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Room,
    Passage,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Room => "room",
            Label::Passage => "passage",
        }
    }

    pub fn from_name(s: &str) -> Option<Label> {
        match s {
            "room" => Some(Label::Room),
            "passage" => Some(Label::Passage),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Ge,
}

impl Comparison {
    pub fn name(self) -> &'static str {
        match self {
            Comparison::Lt => "lt",
            Comparison::Ge => "ge",
        }
    }

    pub fn from_name(s: &str) -> Option<Comparison> {
        match s {
            "lt" => Some(Comparison::Lt),
            "ge" => Some(Comparison::Ge),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rule {
    pub feature: Feature,
    pub op: Comparison,
    pub threshold: f64,
    pub label: Label,
}

impl Rule {
    pub fn matches(&self, f: &FeatureVector) -> bool {
        let v = f.get(self.feature);
        match self.op {
            Comparison::Lt => v < self.threshold,
            Comparison::Ge => v >= self.threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainError {
    TooFewSamples {
        needed: usize,
        got: usize,
    },
    /// The samples do not separate into two clusters.
    Degenerate,
    TooManyRules(usize),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            TrainError::Degenerate => f.write_str("samples do not form two distinct clusters"),
            TrainError::TooManyRules(n) => write!(f, "classifier allows at most 2 rules, got {n}"),
        }
    }
}

impl core::error::Error for TrainError {}

/// Ordered first-match rules with a fallback label.
#[derive(Clone, Debug, PartialEq)]
pub struct RoomPassageClassifier {
    rules: Vec<Rule>,
    default_label: Label,
}

impl RoomPassageClassifier {
    pub fn new(rules: Vec<Rule>, default_label: Label) -> Result<Self, TrainError> {
        if rules.len() > 2 {
            return Err(TrainError::TooManyRules(rules.len()));
        }
        Ok(Self {
            rules,
            default_label,
        })
    }

    /// Hand-set classifier: a view is a room when `front_max < 1.5 d` and
    /// `all_std < 3`, otherwise a passage.
    pub fn default_for(d: f64) -> Self {
        Self {
            rules: alloc::vec![
                Rule {
                    feature: Feature::FrontMax,
                    op: Comparison::Ge,
                    threshold: 1.5 * d,
                    label: Label::Passage
                },
                Rule {
                    feature: Feature::AllStd,
                    op: Comparison::Ge,
                    threshold: 3.0,
                    label: Label::Passage
                },
            ],
            default_label: Label::Room,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_label(&self) -> Label {
        self.default_label
    }

    pub fn classify(&self, f: &FeatureVector) -> Label {
        self.rules
            .iter()
            .find(|r| r.matches(f))
            .map_or(self.default_label, |r| r.label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            max_iterations: 100,
        }
    }
}

const K: usize = 2;

pub fn train_classifier(
    samples: &[FeatureVector],
    cfg: &TrainConfig,
) -> Result<RoomPassageClassifier, TrainError> {
    if samples.len() < 2 * K {
        return Err(TrainError::TooFewSamples {
            needed: 2 * K,
            got: samples.len(),
        });
    }
    let points: Vec<[f64; 12]> = samples.iter().map(FeatureVector::to_array).collect();
    let assignment = kmeans(&points, cfg)?;

    // The cluster with the shorter mean front_max is the room cluster.
    let fm = Feature::FrontMax as usize;
    let mut sums = [0.0; K];
    let mut counts = [0usize; K];
    for (p, &c) in points.iter().zip(&assignment) {
        sums[c] += p[fm];
        counts[c] += 1;
    }
    let room_cluster = if sums[0] / counts[0] as f64 <= sums[1] / counts[1] as f64 {
        0
    } else {
        1
    };
    let labels: Vec<Label> = assignment
        .iter()
        .map(|&c| {
            if c == room_cluster {
                Label::Room
            } else {
                Label::Passage
            }
        })
        .collect();

    let all: Vec<usize> = (0..points.len()).collect();
    let root = best_split(&points, &labels, &all).ok_or(TrainError::Degenerate)?;
    let (purer, other, purer_op) = if gini(&labels, &root.left) <= gini(&labels, &root.right) {
        (&root.left, &root.right, Comparison::Lt)
    } else {
        (&root.right, &root.left, Comparison::Ge)
    };
    let mut rules = alloc::vec![Rule {
        feature: Feature::ALL[root.feature],
        op: purer_op,
        threshold: root.threshold,
        label: majority(&labels, purer),
    }];
    let mut default_label = majority(&labels, other);
    if gini(&labels, other) > 0.0 {
        if let Some(child) = best_split(&points, &labels, other) {
            let (q, rest, op) = if gini(&labels, &child.left) <= gini(&labels, &child.right) {
                (&child.left, &child.right, Comparison::Lt)
            } else {
                (&child.right, &child.left, Comparison::Ge)
            };
            rules.push(Rule {
                feature: Feature::ALL[child.feature],
                op,
                threshold: child.threshold,
                label: majority(&labels, q),
            });
            default_label = majority(&labels, rest);
        }
    }
    RoomPassageClassifier::new(rules, default_label)
}

fn dist_sq(a: &[f64; 12], b: &[f64; 12]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means with k-means++ seeding; returns the cluster of each point.
fn kmeans(points: &[[f64; 12]], cfg: &TrainConfig) -> Result<Vec<usize>, TrainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers: Vec<[f64; 12]> = Vec::with_capacity(K);
    centers.push(points[rng.gen_range(0..points.len())]);
    while centers.len() < K {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| {
                centers
                    .iter()
                    .map(|c| dist_sq(p, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(TrainError::Degenerate);
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = points.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if *w > 0.0 {
                chosen = i;
            }
            if pick < *w {
                break;
            }
            pick -= w;
        }
        centers.push(points[chosen]);
    }

    let mut assignment = alloc::vec![usize::MAX; points.len()];
    for _ in 0..cfg.max_iterations {
        let mut changed = false;
        for (p, slot) in points.iter().zip(assignment.iter_mut()) {
            let mut best = 0;
            for c in 1..K {
                if dist_sq(p, &centers[c]) < dist_sq(p, &centers[best]) {
                    best = c;
                }
            }
            if *slot != best {
                *slot = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&[f64; 12]> = points
                .iter()
                .zip(&assignment)
                .filter_map(|(p, &a)| (a == c).then_some(p))
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut mean = [0.0; 12];
            for m in &members {
                for (acc, v) in mean.iter_mut().zip(m.iter()) {
                    *acc += v;
                }
            }
            for v in mean.iter_mut() {
                *v /= members.len() as f64;
            }
            *center = mean;
        }
    }
    if (0..K).any(|c| !assignment.contains(&c)) {
        return Err(TrainError::Degenerate);
    }
    Ok(assignment)
}

struct Split {
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn gini(labels: &[Label], idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let rooms = idx.iter().filter(|&&i| labels[i] == Label::Room).count() as f64;
    let p = rooms / idx.len() as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

fn majority(labels: &[Label], idx: &[usize]) -> Label {
    let rooms = idx.iter().filter(|&&i| labels[i] == Label::Room).count();
    if 2 * rooms > idx.len() {
        Label::Room
    } else {
        Label::Passage
    }
}

/// Lowest weighted-Gini threshold split over `idx`, scanning features in
/// declaration order; earlier candidates win ties.
fn best_split(points: &[[f64; 12]], labels: &[Label], idx: &[usize]) -> Option<Split> {
    let n = idx.len() as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..12 {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| points[a][f].total_cmp(&points[b][f]));
        let total_rooms = order.iter().filter(|&&i| labels[i] == Label::Room).count() as f64;
        let mut left_rooms = 0.0;
        for k in 0..order.len().saturating_sub(1) {
            if labels[order[k]] == Label::Room {
                left_rooms += 1.0;
            }
            let (lo, hi) = (points[order[k]][f], points[order[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = n - nl;
            let g = |rooms: f64, count: f64| {
                let p = rooms / count;
                1.0 - p * p - (1.0 - p) * (1.0 - p)
            };
            let score = (nl * g(left_rooms, nl) + nr * g(total_rooms - left_rooms, nr)) / n;
            if best.map_or(true, |(s, _, _)| score < s - 1e-12) {
                best = Some((score, f, 0.5 * (lo + hi)));
            }
        }
    }
    let (_, feature, threshold) = best?;
    let (left, right) = idx.iter().partition(|&&i| points[i][feature] < threshold);
    Some(Split {
        feature,
        threshold,
        left,
        right,
    })
}
