use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::explore::grid::{CellLabel, PassageGrid};
use crate::geometry::Point;
use crate::perception::{FeatureVector, Label, RoomPassageClassifier, Stretch};
use crate::world::Pose;

/// Allen's thirteen interval relations, `a` relative to `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AllenRelation {
    Before,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    FinishedBy,
    Contains,
    StartedBy,
    OverlappedBy,
    MetBy,
    After,
}

impl AllenRelation {
    /// Relations in which the two intervals share a stretch of positive length.
    pub fn is_overlapping(self) -> bool {
        !matches!(
            self,
            AllenRelation::Before
                | AllenRelation::Meets
                | AllenRelation::MetBy
                | AllenRelation::After
        )
    }

    pub fn inverse(self) -> AllenRelation {
        use AllenRelation::*;
        match self {
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Starts => StartedBy,
            During => Contains,
            Finishes => FinishedBy,
            Equals => Equals,
            FinishedBy => Finishes,
            Contains => During,
            StartedBy => Starts,
            OverlappedBy => Overlaps,
            MetBy => Meets,
            After => Before,
        }
    }
}

/// Classifies the closed intervals `a` and `b`, treating endpoints closer
/// than `eps` as equal.
pub fn allen_relation(a: (f64, f64), b: (f64, f64), eps: f64) -> AllenRelation {
    use AllenRelation::*;
    let cmp = |x: f64, y: f64| {
        if (x - y).abs() <= eps {
            Ordering::Equal
        } else if x < y {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    };
    let (a0, a1) = a;
    let (b0, b1) = b;
    match (cmp(a0, b0), cmp(a1, b1)) {
        (Ordering::Equal, Ordering::Equal) => Equals,
        (Ordering::Equal, Ordering::Less) => Starts,
        (Ordering::Equal, Ordering::Greater) => StartedBy,
        (Ordering::Greater, Ordering::Equal) => Finishes,
        (Ordering::Less, Ordering::Equal) => FinishedBy,
        (Ordering::Greater, Ordering::Less) => During,
        (Ordering::Less, Ordering::Greater) => Contains,
        (Ordering::Less, Ordering::Less) => match cmp(a1, b0) {
            Ordering::Less => Before,
            Ordering::Equal => Meets,
            Ordering::Greater => Overlaps,
        },
        (Ordering::Greater, Ordering::Greater) => match cmp(a0, b1) {
            Ordering::Greater => After,
            Ordering::Equal => MetBy,
            Ordering::Less => OverlappedBy,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityConfig {
    pub max_distance: f64,
    /// Required overlap as a fraction of the mean stretch length.
    pub min_overlap: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            max_distance: 1.0,
            min_overlap: 1.0 / 3.0,
        }
    }
}

fn stretch_order(a: &Stretch, b: &Stretch) -> Ordering {
    a.length
        .total_cmp(&b.length)
        .then(a.origin.x.total_cmp(&b.origin.x))
        .then(a.origin.y.total_cmp(&b.origin.y))
        .then(a.direction.total_cmp(&b.direction))
}

/// Axial overlap of two stretches projected onto the longer one's axis, along
/// with their Allen relation there.
pub fn projected_overlap(a: &Stretch, b: &Stretch) -> (AllenRelation, f64) {
    let (long, short, swapped) = if stretch_order(a, b) == Ordering::Less {
        (b, a, true)
    } else {
        (a, b, false)
    };
    let u = Point::from_angle(long.direction);
    let proj = |p: Point| (p - long.origin).dot(u);
    let il = (0.0_f64, long.length);
    let (s0, s1) = (proj(short.origin), proj(short.end()));
    let is = (s0.min(s1), s0.max(s1));
    let overlap = (il.1.min(is.1) - il.0.max(is.0)).max(0.0);
    let (ia, ib) = if swapped { (is, il) } else { (il, is) };
    (allen_relation(ia, ib, 1e-9), overlap)
}

pub fn similar_stretches(a: &Stretch, b: &Stretch) -> bool {
    similar_with(a, b, &SimilarityConfig::default())
}

pub fn similar_with(a: &Stretch, b: &Stretch, cfg: &SimilarityConfig) -> bool {
    if a.segment().distance_to_segment(&b.segment()) > cfg.max_distance + 1e-12 {
        return false;
    }
    let (relation, overlap) = projected_overlap(a, b);
    relation.is_overlapping() && overlap + 1e-9 >= cfg.min_overlap * 0.5 * (a.length + b.length)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateState {
    Pending,
    Explored,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub id: u32,
    pub stretch: Stretch,
    pub start: Pose,
    pub state: CandidateState,
}

impl Candidate {
    pub fn new(id: u32, stretch: Stretch) -> Self {
        Self {
            id,
            stretch,
            start: stretch.detected_at,
            state: CandidateState::Pending,
        }
    }
}

/// Why a stretch failed to qualify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disqualified {
    NotElongated,
    Similar,
    Covered,
    Room,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateList {
    queue: VecDeque<Candidate>,
    history: Vec<Candidate>,
    similarity: SimilarityConfig,
}

impl CandidateList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn queue(&self) -> impl Iterator<Item = &Candidate> {
        self.queue.iter()
    }

    pub fn history(&self) -> &[Candidate] {
        &self.history
    }

    pub fn next_id(&self) -> u32 {
        self.history.len() as u32
    }

    pub fn is_similar_to_known(&self, s: &Stretch) -> bool {
        self.queue
            .iter()
            .chain(self.history.iter())
            .any(|c| similar_with(&c.stretch, s, &self.similarity))
    }

    /// Front insertion iff the stretch's average length exceeds `2 d`.
    pub fn enqueue(&mut self, c: Candidate, d: f64) {
        self.history.push(c);
        if c.stretch.avg_length > 2.0 * d {
            self.queue.push_front(c);
        } else {
            self.queue.push_back(c);
        }
    }

    /// Creates a pending candidate from `stretch` and enqueues it.
    pub fn push_stretch(&mut self, stretch: Stretch, d: f64) -> Candidate {
        let c = Candidate::new(self.next_id(), stretch);
        self.enqueue(c, d);
        c
    }

    pub fn set_state(&mut self, id: u32, state: CandidateState) {
        if let Some(c) = self.history.iter_mut().find(|c| c.id == id) {
            c.state = state;
        }
        if let Some(c) = self.queue.iter_mut().find(|c| c.id == id) {
            c.state = state;
        }
    }

    /// Pops candidates until one still covers new ground and is unlike every
    /// explored candidate. Failures are marked Rejected.
    pub fn next_candidate(&mut self, grid: &PassageGrid) -> Option<Candidate> {
        while let Some(c) = self.queue.pop_front() {
            let explored_similar = self.history.iter().any(|h| {
                h.id != c.id
                    && h.state == CandidateState::Explored
                    && similar_with(&h.stretch, &c.stretch, &self.similarity)
            });
            if explored_similar || !uncovered(&c.stretch, grid) {
                self.set_state(c.id, CandidateState::Rejected);
                continue;
            }
            return Some(c);
        }
        None
    }
}

/// None of start, midpoint and end is Obstructed and at most one is Passage.
pub fn uncovered(s: &Stretch, grid: &PassageGrid) -> bool {
    let mut passages = 0;
    for p in [s.origin, s.midpoint(), s.end()] {
        match grid.label_at(p) {
            Some(CellLabel::Obstructed) => return false,
            Some(CellLabel::Passage(_)) => passages += 1,
            None => {}
        }
    }
    passages <= 1
}

pub fn check_candidate(
    stretch: &Stretch,
    grid: &PassageGrid,
    list: &CandidateList,
    classifier: &RoomPassageClassifier,
    features: &FeatureVector,
) -> Result<(), Disqualified> {
    if !(stretch.length > stretch.width) {
        return Err(Disqualified::NotElongated);
    }
    if list.is_similar_to_known(stretch) {
        return Err(Disqualified::Similar);
    }
    if !uncovered(stretch, grid) {
        return Err(Disqualified::Covered);
    }
    if classifier.classify(features) == Label::Room {
        return Err(Disqualified::Room);
    }
    Ok(())
}

pub fn qualify_candidate(
    stretch: &Stretch,
    grid: &PassageGrid,
    list: &CandidateList,
    classifier: &RoomPassageClassifier,
    features: &FeatureVector,
) -> bool {
    check_candidate(stretch, grid, list, classifier, features).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Bounds;

    fn stretch(x: f64, y: f64, dir: f64, length: f64) -> Stretch {
        let pose = Pose::new(x, y, dir);
        Stretch {
            origin: pose.position(),
            direction: dir,
            length,
            width: 2.0,
            avg_length: length,
            detected_at: pose,
        }
    }

    #[test]
    fn allen_basics() {
        use AllenRelation::*;
        assert_eq!(allen_relation((0.0, 1.0), (2.0, 3.0), 1e-9), Before);
        assert_eq!(allen_relation((0.0, 2.0), (2.0, 3.0), 1e-9), Meets);
        assert_eq!(allen_relation((0.0, 2.5), (2.0, 3.0), 1e-9), Overlaps);
        assert_eq!(allen_relation((2.0, 2.5), (2.0, 3.0), 1e-9), Starts);
        assert_eq!(allen_relation((2.2, 2.5), (2.0, 3.0), 1e-9), During);
        assert_eq!(allen_relation((2.2, 3.0), (2.0, 3.0), 1e-9), Finishes);
        assert_eq!(allen_relation((2.0, 3.0), (2.0, 3.0), 1e-9), Equals);
        for (a, b) in [
            ((0.0, 1.0), (0.5, 3.0)),
            ((1.0, 2.0), (0.0, 3.0)),
            ((0.0, 3.0), (3.0, 4.0)),
        ] {
            assert_eq!(
                allen_relation(b, a, 1e-9),
                allen_relation(a, b, 1e-9).inverse()
            );
        }
    }

    #[test]
    fn similarity_examples() {
        let a = stretch(0.0, 0.0, 0.0, 12.0);
        assert!(similar_stretches(&a, &a));
        assert!(!similar_stretches(&a, &stretch(0.0, 10.0, 0.0, 12.0)));
        let b = stretch(8.0, 0.5, 0.0, 12.0);
        assert!(similar_stretches(&a, &b));
        assert!(similar_stretches(&b, &a));
        let c = stretch(8.01, 0.5, 0.0, 12.0);
        assert!(!similar_stretches(&a, &c));
    }

    #[test]
    fn enqueue_front_only_above_two_d() {
        let mut list = CandidateList::new();
        let mut s = stretch(0.0, 0.0, 0.0, 10.0);
        s.avg_length = 8.0;
        list.push_stretch(s, 7.0);
        s.origin.y = 20.0;
        s.avg_length = 15.0;
        list.push_stretch(s, 7.0);
        s.origin.y = 40.0;
        s.avg_length = 14.0;
        list.push_stretch(s, 7.0);
        let order: Vec<f64> = list.queue().map(|c| c.stretch.avg_length).collect();
        assert_eq!(order, alloc::vec![15.0, 8.0, 14.0]);
    }

    #[test]
    fn covered_stretch_is_rejected_on_pop() {
        let mut grid = PassageGrid::new(Bounds {
            width: 40.0,
            height: 40.0,
        });
        let mut list = CandidateList::new();
        let stale = stretch(2.5, 2.5, 0.0, 10.0);
        let fresh = stretch(2.5, 20.5, 0.0, 10.0);
        list.push_stretch(stale, 7.0);
        list.push_stretch(fresh, 7.0);
        grid.set(grid.cell_of(stale.midpoint()), CellLabel::Passage(0));
        grid.set(grid.cell_of(stale.end()), CellLabel::Passage(0));
        let got = list.next_candidate(&grid).unwrap();
        assert_eq!(got.stretch, fresh);
        assert_eq!(list.history()[0].state, CandidateState::Rejected);
        assert_eq!(list.next_candidate(&grid), None);
    }
}
