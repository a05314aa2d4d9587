//! Minimum supporting tracks.
//!
//! Supporting every offset is a set cover problem: the universe is the offset
//! range `{0..ℓ-f}` and pillar `p` covers the offsets `k` with `p ∈ C + k`.
//! [`min_track_exact`] solves it by branch and bound; [`min_track_greedy`] is
//! the classical greedy approximation.

use crate::model::{Instance, TrackLayout};

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// Search exhausted; the returned track is minimum.
    Optimal,
    /// Search exhausted and no track within the size cap exists.
    NoSolutionUnderCap,
    /// Node limit reached; the track, if any, is the best one found.
    NodeLimit,
    /// Produced by the greedy heuristic.
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub track: Option<TrackLayout>,
    pub optimal: bool,
    pub status: SearchStatus,
    pub explored_nodes: u64,
    pub size_cap: Option<usize>,
}

impl OracleResult {
    pub fn size(&self) -> Option<usize> {
        self.track.as_ref().map(TrackLayout::len)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub size_cap: Option<usize>,
    pub node_limit: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            size_cap: None,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[cfg(test)]
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    fn and_count(&self, other: &Bits) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    fn minus(&self, other: &Bits) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

struct Search<'a> {
    instance: &'a Instance,
    /// Offsets covered by each position; index 0 unused.
    covers: Vec<Bits>,
    excluded: Vec<bool>,
    chosen: Vec<u64>,
    best: Option<Vec<u64>>,
    /// Only solutions strictly smaller than this are still of interest.
    bound: usize,
    nodes: u64,
    node_limit: u64,
    hit_limit: bool,
}

impl Search<'_> {
    fn candidates(&self, offset: usize) -> impl Iterator<Item = u64> + '_ {
        self.instance
            .wheel_positions(offset as u64)
            .filter(|&p| !self.excluded[p as usize])
    }

    /// Lower bound on pillars still needed, or `None` when some offset has no
    /// admissible pillar left.
    fn lower_bound(&self, uncovered: &Bits) -> Option<usize> {
        let remaining = uncovered.count() as usize;
        let max_gain = (1..self.covers.len())
            .filter(|&p| !self.excluded[p])
            .map(|p| self.covers[p].and_count(uncovered))
            .max()
            .unwrap_or(0) as usize;
        if max_gain == 0 {
            return None;
        }
        let by_gain = remaining.div_ceil(max_gain);

        // Offsets with pairwise disjoint candidate sets need distinct pillars.
        let mut used = vec![false; self.covers.len()];
        let mut packing = 0;
        for k in uncovered.iter() {
            let mut any = false;
            let mut clash = false;
            for p in self.candidates(k) {
                any = true;
                clash |= used[p as usize];
            }
            if !any {
                return None;
            }
            if !clash {
                packing += 1;
                for p in self.instance.wheel_positions(k as u64) {
                    if !self.excluded[p as usize] {
                        used[p as usize] = true;
                    }
                }
            }
        }
        Some(by_gain.max(packing))
    }

    fn run(&mut self, uncovered: &Bits) {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.hit_limit = true;
            return;
        }
        if uncovered.is_empty() {
            if self.chosen.len() < self.bound {
                self.bound = self.chosen.len();
                let mut best = self.chosen.clone();
                best.sort_unstable();
                self.best = Some(best);
            }
            return;
        }
        match self.lower_bound(uncovered) {
            Some(lb) if self.chosen.len() + lb < self.bound => {}
            _ => return,
        }

        // Branch on the most constrained offset.
        let branch = uncovered
            .iter()
            .min_by_key(|&k| (self.candidates(k).count(), k))
            .expect("uncovered is nonempty");
        let mut options: Vec<(u32, u64)> = self
            .candidates(branch)
            .map(|p| (self.covers[p as usize].and_count(uncovered), p))
            .collect();
        options.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut newly_excluded = Vec::with_capacity(options.len());
        for (_, p) in options {
            self.chosen.push(p);
            let next = uncovered.minus(&self.covers[p as usize]);
            self.run(&next);
            self.chosen.pop();
            if self.hit_limit {
                break;
            }
            // Later siblings need not consider p again.
            self.excluded[p as usize] = true;
            newly_excluded.push(p);
        }
        for p in newly_excluded {
            self.excluded[p as usize] = false;
        }
    }
}

fn cover_table(instance: &Instance) -> Vec<Bits> {
    let universe = instance.offset_count();
    let mut covers = vec![Bits::zeros(universe); instance.track_length() as usize + 1];
    for (p, bits) in covers.iter_mut().enumerate().skip(1) {
        for k in instance.covered_offsets(p as u64) {
            bits.set(k as usize);
        }
    }
    covers
}

/// Minimum supporting track, optionally restricted to at most `size_cap`
/// pillars, with the default node limit.
pub fn min_track_exact(instance: &Instance, size_cap: Option<usize>) -> OracleResult {
    min_track_exact_with(
        instance,
        ExactOptions {
            size_cap,
            ..ExactOptions::default()
        },
    )
}

pub fn min_track_exact_with(instance: &Instance, options: ExactOptions) -> OracleResult {
    let greedy = min_track_greedy(instance)
        .track
        .expect("greedy always returns a track");
    let (best, bound) = match options.size_cap {
        Some(cap) if greedy.len() > cap => (None, cap + 1),
        _ => (Some(greedy.pillars().to_vec()), greedy.len()),
    };
    let mut search = Search {
        instance,
        covers: cover_table(instance),
        excluded: vec![false; instance.track_length() as usize + 1],
        chosen: Vec::new(),
        best,
        bound,
        nodes: 0,
        node_limit: options.node_limit,
        hit_limit: false,
    };
    search.run(&Bits::ones(instance.offset_count()));

    let status = match (search.hit_limit, &search.best) {
        (true, _) => SearchStatus::NodeLimit,
        (false, Some(_)) => SearchStatus::Optimal,
        (false, None) => SearchStatus::NoSolutionUnderCap,
    };
    let track_length = instance.track_length();
    OracleResult {
        track: search
            .best
            .map(|p| TrackLayout::new(track_length, p).expect("positions within track")),
        optimal: status == SearchStatus::Optimal,
        status,
        explored_nodes: search.nodes,
        size_cap: options.size_cap,
    }
}

/// Greedy set cover: repeatedly take the pillar covering the most uncovered
/// offsets, ties going to the smaller position.
pub fn min_track_greedy(instance: &Instance) -> OracleResult {
    let len = instance.track_length() as usize;
    let mut gain: Vec<usize> = (0..=len)
        .map(|p| {
            if p == 0 {
                0
            } else {
                instance.covered_offsets(p as u64).count()
            }
        })
        .collect();
    let mut covered = vec![false; instance.offset_count()];
    let mut remaining = covered.len();
    let mut mask = vec![false; len + 1];

    while remaining > 0 {
        let (pick, _) = gain
            .iter()
            .enumerate()
            .skip(1)
            .fold((0, 0), |(bp, bg), (p, &g)| if g > bg { (p, g) } else { (bp, bg) });
        debug_assert!(pick > 0);
        mask[pick] = true;
        for k in instance.covered_offsets(pick as u64) {
            let k = k as usize;
            if covered[k] {
                continue;
            }
            covered[k] = true;
            remaining -= 1;
            for p in instance.wheel_positions(k as u64) {
                gain[p as usize] -= 1;
            }
        }
    }

    OracleResult {
        track: Some(TrackLayout::from_mask(&mask)),
        optimal: false,
        status: SearchStatus::Heuristic,
        explored_nodes: 0,
        size_cap: None,
    }
}
