use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::world::View;

/// Angular sectors used to summarise a view, relative to the heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorConfig {
    /// Front sector is `[-front_half, +front_half]`.
    pub front_half: f64,
    /// Lateral sectors span `[lateral_lo, lateral_hi]` on each side.
    pub lateral_lo: f64,
    pub lateral_hi: f64,
}

impl Default for SectorConfig {
    fn default() -> Self {
        Self {
            front_half: 15f64.to_radians(),
            lateral_lo: 45f64.to_radians(),
            lateral_hi: 110f64.to_radians(),
        }
    }
}

impl SectorConfig {
    pub fn is_front(&self, rel: f64) -> bool {
        rel.abs() <= self.front_half + 1e-12
    }

    pub fn is_left(&self, rel: f64) -> bool {
        rel >= self.lateral_lo - 1e-12 && rel <= self.lateral_hi + 1e-12
    }

    pub fn is_right(&self, rel: f64) -> bool {
        self.is_left(-rel)
    }
}

/// Named feature columns, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Feature {
    FrontAvg,
    FrontMax,
    FrontMin,
    LeftAvg,
    LeftMax,
    RightAvg,
    RightMax,
    AllAvg,
    AllMax,
    AllMin,
    AllMedian,
    AllStd,
}

impl Feature {
    pub const ALL: [Feature; 12] = [
        Feature::FrontAvg,
        Feature::FrontMax,
        Feature::FrontMin,
        Feature::LeftAvg,
        Feature::LeftMax,
        Feature::RightAvg,
        Feature::RightMax,
        Feature::AllAvg,
        Feature::AllMax,
        Feature::AllMin,
        Feature::AllMedian,
        Feature::AllStd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::FrontAvg => "front_avg",
            Feature::FrontMax => "front_max",
            Feature::FrontMin => "front_min",
            Feature::LeftAvg => "left_avg",
            Feature::LeftMax => "left_max",
            Feature::RightAvg => "right_avg",
            Feature::RightMax => "right_max",
            Feature::AllAvg => "all_avg",
            Feature::AllMax => "all_max",
            Feature::AllMin => "all_min",
            Feature::AllMedian => "all_median",
            Feature::AllStd => "all_std",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FeatureVector {
    pub front_avg: f64,
    pub front_max: f64,
    pub front_min: f64,
    pub left_avg: f64,
    pub left_max: f64,
    pub right_avg: f64,
    pub right_max: f64,
    pub all_avg: f64,
    pub all_max: f64,
    pub all_min: f64,
    pub all_median: f64,
    pub all_std: f64,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        match feature {
            Feature::FrontAvg => self.front_avg,
            Feature::FrontMax => self.front_max,
            Feature::FrontMin => self.front_min,
            Feature::LeftAvg => self.left_avg,
            Feature::LeftMax => self.left_max,
            Feature::RightAvg => self.right_avg,
            Feature::RightMax => self.right_max,
            Feature::AllAvg => self.all_avg,
            Feature::AllMax => self.all_max,
            Feature::AllMin => self.all_min,
            Feature::AllMedian => self.all_median,
            Feature::AllStd => self.all_std,
        }
    }

    pub fn set(&mut self, feature: Feature, value: f64) {
        let slot = match feature {
            Feature::FrontAvg => &mut self.front_avg,
            Feature::FrontMax => &mut self.front_max,
            Feature::FrontMin => &mut self.front_min,
            Feature::LeftAvg => &mut self.left_avg,
            Feature::LeftMax => &mut self.left_max,
            Feature::RightAvg => &mut self.right_avg,
            Feature::RightMax => &mut self.right_max,
            Feature::AllAvg => &mut self.all_avg,
            Feature::AllMax => &mut self.all_max,
            Feature::AllMin => &mut self.all_min,
            Feature::AllMedian => &mut self.all_median,
            Feature::AllStd => &mut self.all_std,
        };
        *slot = value;
    }

    pub fn to_array(&self) -> [f64; 12] {
        Feature::ALL.map(|f| self.get(f))
    }
}

#[derive(Default)]
struct Acc {
    sum: f64,
    max: f64,
    min: f64,
    n: usize,
}

impl Acc {
    fn push(&mut self, r: f64) {
        if self.n == 0 {
            self.max = r;
            self.min = r;
        } else {
            self.max = self.max.max(r);
            self.min = self.min.min(r);
        }
        self.sum += r;
        self.n += 1;
    }

    fn avg(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }
}

/// Summary statistics of a view. Empty sectors report zero.
pub fn compute_features(view: &View, sectors: &SectorConfig) -> FeatureVector {
    let (mut front, mut left, mut right, mut all) = (
        Acc::default(),
        Acc::default(),
        Acc::default(),
        Acc::default(),
    );
    for (i, &r) in view.ranges.iter().enumerate() {
        let rel = view.relative_angle(i);
        if sectors.is_front(rel) {
            front.push(r);
        }
        if sectors.is_left(rel) {
            left.push(r);
        }
        if sectors.is_right(rel) {
            right.push(r);
        }
        all.push(r);
    }
    let mean = all.avg();
    let var = if all.n == 0 {
        0.0
    } else {
        view.ranges
            .iter()
            .map(|r| (r - mean) * (r - mean))
            .sum::<f64>()
            / all.n as f64
    };
    let mut sorted: Vec<f64> = view.ranges.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = if sorted.is_empty() {
        0.0
    } else {
        sorted[(sorted.len() - 1) / 2]
    };
    FeatureVector {
        front_avg: front.avg(),
        front_max: front.max,
        front_min: front.min,
        left_avg: left.avg(),
        left_max: left.max,
        right_avg: right.avg(),
        right_max: right.max,
        all_avg: mean,
        all_max: all.max,
        all_min: all.min,
        all_median: median,
        all_std: var.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{Pose, SensorConfig};
    use alloc::vec;

    fn view(ranges: Vec<f64>) -> View {
        View {
            pose: Pose::new(1.0, 1.0, 0.0),
            ranges,
            sensor: SensorConfig::default(),
        }
    }

    #[test]
    fn constant_view() {
        let f = compute_features(&view(vec![25.0; 660]), &SectorConfig::default());
        for x in f.to_array().iter().take(11) {
            assert_eq!(*x, 25.0);
        }
        assert_eq!(f.all_std, 0.0);
    }

    #[test]
    fn single_short_ray_sets_min() {
        let mut r = vec![25.0; 660];
        r[17] = 5.0;
        let f = compute_features(&view(r), &SectorConfig::default());
        assert_eq!(f.all_min, 5.0);
        assert_eq!(f.all_median, 25.0);
    }

    #[test]
    fn median_is_lower_middle() {
        let r: Vec<f64> = (0..660).map(|i| i as f64 / 100.0).collect();
        let f = compute_features(&view(r), &SectorConfig::default());
        assert_eq!(f.all_median, 3.29);
    }

    #[test]
    fn feature_names_round_trip() {
        for f in Feature::ALL {
            assert_eq!(Feature::from_name(f.name()), Some(f));
        }
        assert_eq!(Feature::from_name("nope"), None);
    }
}
