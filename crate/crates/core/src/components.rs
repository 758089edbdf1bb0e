//! Related components, axis-wise class chaining, the quotient image,
//! maximal relatively full partitions, and the structural checks tying
//! them to loops.
//!
//! Two points of a good set are related when some finite full subset
//! contains both. The oracle methods decide this by exhaustive subset
//! scans (exact, bounded); the heuristics merge parts by coordinate
//! arithmetic (sound, possibly finer). Heuristic results carry an
//! explicit method flag so they are never mistaken for oracle answers.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::loops::{enumerate_loops, maximal_good_subset, LoopCert};
use crate::model::{Point, PointSet};
use crate::structure::{is_full, is_good, IncidenceSystem};
use crate::ORACLE_BOUND;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionMethod {
    /// Exhaustive subset scan; errors above [`ORACLE_BOUND`].
    Oracle,
    /// Merge rules only.
    Heuristic,
    /// Oracle within bounds, heuristic beyond, flagged in the result.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodUsed {
    Oracle,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    Related,
    RelativelyFull,
}

/// A disjoint cover of a point set, parts ordered by their least point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub parts: Vec<PointSet>,
    pub kind: PartitionKind,
    pub method: MethodUsed,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part containing `p`.
    pub fn part_of(&self, p: &Point) -> Option<usize> {
        self.parts.iter().position(|part| part.contains(p))
    }

    /// True if every part of `self` lies inside a part of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        self.parts.iter().all(|part| {
            let Some(host) = other.part_of(part.point(0)) else {
                return false;
            };
            other.parts[host].contains_set(part)
        })
    }
}

/// Deterministic union-find over point indices.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, so classes are stable under scan order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Classes as sorted index lists, ordered by least member.
    fn classes(&mut self, n: usize) -> Vec<Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = self.find(i);
            map.entry(r).or_default().push(i);
        }
        map.into_values().collect()
    }
}

fn classes_to_partition(
    set: &PointSet,
    classes: Vec<Vec<usize>>,
    kind: PartitionKind,
    method: MethodUsed,
) -> Partition {
    Partition {
        parts: classes.iter().map(|c| set.subset(c)).collect(),
        kind,
        method,
    }
}

fn bound_check(what: &'static str, len: usize) -> Result<()> {
    if len > ORACLE_BOUND {
        return Err(Error::BoundExceeded {
            what,
            bound: ORACLE_BOUND,
            actual: len,
        });
    }
    Ok(())
}

/// Counts the distinct coordinates of the masked subset using a stamp
/// buffer; returns `(subset size, coordinate count)`.
struct CoordCounter {
    stamp: Vec<u32>,
    epoch: u32,
}

impl CoordCounter {
    fn new(ncols: usize) -> Self {
        CoordCounter {
            stamp: vec![0; ncols],
            epoch: 0,
        }
    }

    fn count(&mut self, sys: &IncidenceSystem<'_>, mask: u32) -> (usize, usize) {
        self.epoch += 1;
        let mut size = 0;
        let mut ncoords = 0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            size += 1;
            for &c in sys.row(i) {
                if self.stamp[c] != self.epoch {
                    self.stamp[c] = self.epoch;
                    ncoords += 1;
                }
            }
        }
        (size, ncoords)
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    let mut out = Vec::new();
    let mut bits = mask;
    while bits != 0 {
        out.push(bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    out
}

/// Related components of a good set.
///
/// Oracle: every subset of a good set is good, so fullness reduces to the
/// counting identity `|T| = N(T) - (n-1)`; points co-occurring in a full
/// subset are unioned. Heuristic: singleton parts are merged while two
/// parts' coordinate pools share exactly `n-1` coordinates (inside a good
/// ambient set such a union is full).
pub fn related_components(set: &PointSet, method: PartitionMethod) -> Result<Partition> {
    if !is_good(set) {
        return Err(Error::NotGood);
    }
    let use_oracle = match method {
        PartitionMethod::Oracle => {
            bound_check("related-component oracle", set.len())?;
            true
        }
        PartitionMethod::Heuristic => false,
        PartitionMethod::Auto => set.len() <= ORACLE_BOUND,
    };
    if use_oracle {
        let classes = related_oracle_classes(set);
        Ok(classes_to_partition(
            set,
            classes,
            PartitionKind::Related,
            MethodUsed::Oracle,
        ))
    } else {
        let classes = related_heuristic_classes(set, &mut |_| 0);
        Ok(classes_to_partition(
            set,
            classes,
            PartitionKind::Related,
            MethodUsed::Heuristic,
        ))
    }
}

fn related_oracle_classes(set: &PointSet) -> Vec<Vec<usize>> {
    let sys = IncidenceSystem::new(set);
    let n = set.dim();
    let len = set.len();
    let mut uf = UnionFind::new(len);
    let mut counter = CoordCounter::new(sys.coordinates());
    for mask in 1u32..(1u32 << len) {
        let (size, ncoords) = counter.count(&sys, mask);
        if size + n == ncoords + 1 {
            let idx = mask_indices(mask);
            for w in idx.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    uf.classes(len)
}

/// Heuristic merge loop; `pick` selects among the currently qualifying
/// part pairs (index into the candidate list), which exercises
/// merge-order independence in tests. The default picks the first.
pub(crate) fn related_heuristic_classes(
    set: &PointSet,
    pick: &mut dyn FnMut(usize) -> usize,
) -> Vec<Vec<usize>> {
    let sys = IncidenceSystem::new(set);
    let n = set.dim();
    let mut parts: Vec<Vec<usize>> = (0..set.len()).map(|i| vec![i]).collect();
    let mut pools: Vec<BTreeSet<usize>> = (0..set.len())
        .map(|i| sys.row(i).iter().copied().collect())
        .collect();
    loop {
        let mut candidates = Vec::new();
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let shared = pools[a].intersection(&pools[b]).count();
                debug_assert!(
                    shared < n,
                    "parts of a good set share at most n-1 coordinates"
                );
                if shared == n - 1 {
                    candidates.push((a, b));
                }
            }
        }
        if candidates.is_empty() {
            break;
        }
        let (a, b) = candidates[pick(candidates.len()) % candidates.len()];
        let merged_points = parts.remove(b);
        let merged_pool = pools.remove(b);
        parts[a].extend(merged_points);
        parts[a].sort_unstable();
        pools[a].extend(merged_pool);
    }
    parts.sort_by_key(|p| p[0]);
    parts
}

/// A minimum-cardinality full subset containing both points, if any.
pub fn find_full_witness(set: &PointSet, x: &Point, y: &Point) -> Result<Option<PointSet>> {
    if !is_good(set) {
        return Err(Error::NotGood);
    }
    bound_check("full-witness search", set.len())?;
    let ix = set
        .index_of(x)
        .ok_or_else(|| Error::PointNotInSet(x.to_string()))?;
    let iy = set
        .index_of(y)
        .ok_or_else(|| Error::PointNotInSet(y.to_string()))?;
    if ix == iy {
        return Ok(Some(set.subset(&[ix])));
    }
    let sys = IncidenceSystem::new(set);
    let n = set.dim();
    let mut counter = CoordCounter::new(sys.coordinates());
    let others: Vec<usize> = (0..set.len()).filter(|&i| i != ix && i != iy).collect();
    let base: u32 = (1 << ix) | (1 << iy);
    for extra in 0..=others.len() {
        use itertools::Itertools;
        for combo in others.iter().combinations(extra) {
            let mask = combo.iter().fold(base, |m, &&i| m | (1 << i));
            let (size, ncoords) = counter.count(&sys, mask);
            if size + n == ncoords + 1 {
                return Ok(Some(set.subset(&mask_indices(mask))));
            }
        }
    }
    Ok(None)
}

/// A cross-section of the related components together with the class
/// structure of the axis-wise chaining relation and the image point set.
#[derive(Clone, Debug)]
pub struct QuotientModel {
    pub components: Partition,
    /// One chosen point per component, in component order.
    pub cross_section: Vec<Point>,
    /// Per axis: original label to class label (the least label of the
    /// chained class).
    pub class_labels: Vec<BTreeMap<String, String>>,
    /// The cross-section mapped through the class labels.
    pub image: PointSet,
}

/// Quotient with the canonical cross-section (least point per
/// component).
pub fn quotient(set: &PointSet, method: PartitionMethod) -> Result<QuotientModel> {
    let components = related_components(set, method)?;
    let picks = vec![0; components.len()];
    quotient_of(set, components, &picks)
}

/// Quotient with an explicit cross-section: `picks[k]` selects the point
/// within part `k`. The image is independent of the choice; tests
/// exercise that.
pub fn quotient_with_cross_section(
    set: &PointSet,
    method: PartitionMethod,
    picks: &[usize],
) -> Result<QuotientModel> {
    let components = related_components(set, method)?;
    quotient_of(set, components, picks)
}

fn quotient_of(set: &PointSet, components: Partition, picks: &[usize]) -> Result<QuotientModel> {
    if picks.len() != components.len() {
        return Err(Error::InvalidCrossSection(format!(
            "{} picks for {} components",
            picks.len(),
            components.len()
        )));
    }
    let n = set.dim();
    // Per axis, chain labels that co-occur in a component's projection.
    let mut class_labels: Vec<BTreeMap<String, String>> = Vec::with_capacity(n);
    for axis in 0..n {
        let mut labels: Vec<String> =
            BTreeSet::from_iter(set.iter().map(|p| p.label(axis).to_string()))
                .into_iter()
                .collect();
        labels.sort();
        let pos: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut uf = UnionFind::new(labels.len());
        for part in &components.parts {
            let in_part: Vec<usize> = part.iter().map(|p| pos[p.label(axis)]).collect();
            for w in in_part.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut map = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            let root = uf.find(i);
            map.insert(label.clone(), labels[root].clone());
        }
        class_labels.push(map);
    }
    let mut cross_section = Vec::with_capacity(components.len());
    let mut image_points = Vec::with_capacity(components.len());
    for (k, part) in components.parts.iter().enumerate() {
        if picks[k] >= part.len() {
            return Err(Error::InvalidCrossSection(format!(
                "pick {} out of range for a part of {} points",
                picks[k],
                part.len()
            )));
        }
        let chosen = part.point(picks[k]).clone();
        let image_labels: Vec<String> = (0..n)
            .map(|axis| class_labels[axis][chosen.label(axis)].clone())
            .collect();
        cross_section.push(chosen);
        image_points.push(Point::new(image_labels));
    }
    let image = PointSet::new(n, image_points)?;
    Ok(QuotientModel {
        components,
        cross_section,
        class_labels,
        image,
    })
}

/// The unique partition into maximal relatively full parts.
///
/// Oracle: points co-occurring in any relatively full subset (decided by
/// the rank identity `rank = N(T) - (n-1)`) are unioned. Heuristic: two
/// points sharing exactly `n-1` coordinates form a relatively full pair,
/// and parts joined by such a pair merge.
pub fn relatively_full_components(set: &PointSet, method: PartitionMethod) -> Result<Partition> {
    let use_oracle = match method {
        PartitionMethod::Oracle => {
            bound_check("relatively-full oracle", set.len())?;
            true
        }
        PartitionMethod::Heuristic => false,
        PartitionMethod::Auto => set.len() <= ORACLE_BOUND,
    };
    let classes = if use_oracle {
        relatively_full_oracle_classes(set)
    } else {
        relatively_full_heuristic_classes(set)
    };
    Ok(classes_to_partition(
        set,
        classes,
        PartitionKind::RelativelyFull,
        if use_oracle {
            MethodUsed::Oracle
        } else {
            MethodUsed::Heuristic
        },
    ))
}

fn relatively_full_oracle_classes(set: &PointSet) -> Vec<Vec<usize>> {
    let sys = IncidenceSystem::new(set);
    let n = set.dim();
    let len = set.len();
    let mut uf = UnionFind::new(len);
    let mut counter = CoordCounter::new(sys.coordinates());
    for mask in 1u32..(1u32 << len) {
        let (size, ncoords) = counter.count(&sys, mask);
        // rank <= |T| always, so the identity needs N(T) - (n-1) <= |T|.
        if ncoords + 1 > size + n {
            continue;
        }
        let idx = mask_indices(mask);
        if sys.rank_of(&idx) + n == ncoords + 1 {
            for w in idx.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    uf.classes(len)
}

fn relatively_full_heuristic_classes(set: &PointSet) -> Vec<Vec<usize>> {
    let n = set.dim();
    let mut uf = UnionFind::new(set.len());
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let shared = (0..n)
                .filter(|&axis| set.point(i).label(axis) == set.point(j).label(axis))
                .count();
            if shared == n - 1 {
                uf.union(i, j);
            }
        }
    }
    uf.classes(set.len())
}

/// Both sides of the equivalence: the union of per-part maximal good and
/// full subsets is maximal good in `S` exactly when every loop of `S`
/// stays inside a single relatively full part.
#[derive(Clone, Debug)]
pub struct UnionMaximalGoodReport {
    pub partition: Partition,
    /// One maximal good (hence full) subset per part.
    pub full_subsets: Vec<PointSet>,
    pub union_is_maximal_good: bool,
    pub loops: Vec<LoopCert>,
    pub every_loop_in_one_part: bool,
}

pub fn check_union_maximal_good(set: &PointSet) -> Result<UnionMaximalGoodReport> {
    bound_check("maximal-good union check", set.len())?;
    let partition = relatively_full_components(set, PartitionMethod::Oracle)?;
    let mut full_subsets = Vec::with_capacity(partition.len());
    let mut union_points = Vec::new();
    for part in &partition.parts {
        let f = maximal_good_subset(part);
        assert!(
            is_full(&f).unwrap_or(false),
            "maximal good subset of a relatively full part must be full"
        );
        union_points.extend(f.iter().cloned());
        full_subsets.push(f);
    }
    let union = PointSet::new(set.dim(), union_points)?;
    let sys = IncidenceSystem::new(set);
    let union_indices = set.indices_of(&union).expect("union within set");
    let union_is_maximal_good =
        sys.rank_of(&union_indices) == union.len() && sys.rank() == union.len();
    let loops = enumerate_loops(set, usize::MAX)?;
    let every_loop_in_one_part = loops.iter().all(|cert| {
        partition
            .parts
            .iter()
            .any(|part| cert.points().iter().all(|p| part.contains(p)))
    });
    assert_eq!(
        union_is_maximal_good, every_loop_in_one_part,
        "the union/loop equivalence must hold; offending set: {set}"
    );
    Ok(UnionMaximalGoodReport {
        partition,
        full_subsets,
        union_is_maximal_good,
        loops,
        every_loop_in_one_part,
    })
}
