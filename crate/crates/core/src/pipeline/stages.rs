//! The individual stages of a pipeline run.

use std::collections::{HashSet, VecDeque};

use super::forest::{Item, NodeKind};
use super::{Flow, Runner, Stage};
use crate::congruence::{solve_pair_class_tail, solve_pair_constrained};
use crate::error::{Error, Result};
use crate::system::ProjClass;
use crate::zerosum::{
    alon_lift_contraction, alon_threshold, lift_contraction, lift_threshold, olson_threshold, olson_zero_sum,
    search_contraction, FpVec2,
};

/// How secondary variables are pushed up one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Finder {
    /// Pigeonhole over `3p^2 - 2` vectors, then a class contraction.
    Lift,
    /// The `F_p^3` length-`p` zero-sum route.
    Alon { strict: bool },
}

impl Finder {
    pub(crate) fn window(self, p: u64) -> usize {
        match self {
            Finder::Lift => lift_threshold(p),
            Finder::Alon { strict } => alon_threshold(p, strict),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Finder::Lift => "lift",
            Finder::Alon { .. } => "alon",
        }
    }
}

/// Minimum-cost multiset of level-zero vectors summing to zero mod `p` and
/// meeting at least two projective classes. Cost is the number of vectors
/// outside `big`, then the total count. Each distinct vector is used at
/// most `p` times, since `p` more copies add nothing.
fn cheapest_primary(groups: &[(FpVec2, ProjClass, Vec<usize>)], big: ProjClass, p: u64) -> Option<Vec<usize>> {
    let pu = p as usize;
    let sums = pu * pu;
    let multi = pu + 2;
    let states = sums * (pu + 3);
    let encode = |sum: usize, cls: usize| cls * sums + sum;
    let mut cost: Vec<Option<(u32, u32)>> = vec![None; states];
    cost[encode(0, 0)] = Some((0, 0));
    let mut choice: Vec<Vec<(u8, u32)>> = Vec::with_capacity(groups.len());
    for (vec, class, members) in groups {
        let copies = members.len().min(pu);
        let mut next: Vec<Option<(u32, u32)>> = cost.clone();
        let mut layer: Vec<(u8, u32)> = (0..states).map(|s| (0, s as u32)).collect();
        let outside = *class != big;
        for s in 0..states {
            let Some((c_out, c_all)) = cost[s] else { continue };
            let (cls, sum) = (s / sums, s % sums);
            let new_cls = match cls {
                0 => 1 + class.index(),
                c if c == multi || c == 1 + class.index() => c,
                _ => multi,
            };
            let (mut u, mut v) = (sum / pu, sum % pu);
            for k in 1..=copies {
                u = (u + vec[0] as usize) % pu;
                v = (v + vec[1] as usize) % pu;
                let t = encode(u * pu + v, new_cls);
                let cand = (c_out + if outside { k as u32 } else { 0 }, c_all + k as u32);
                if next[t].is_none_or(|cur| cand < cur) {
                    next[t] = Some(cand);
                    layer[t] = (k as u8, s as u32);
                }
            }
        }
        cost = next;
        choice.push(layer);
    }
    let mut state = encode(0, multi);
    cost[state]?;
    let mut picked = Vec::new();
    for g in (0..groups.len()).rev() {
        let (k, prev) = choice[g][state];
        picked.extend_from_slice(&groups[g].2[..k as usize]);
        state = prev as usize;
    }
    picked.sort_unstable();
    Some(picked)
}

impl Runner<'_> {
    /// Disjoint contractions of level-zero columns in `h` into primary
    /// variables, up to `p^tau` of them.
    pub(crate) fn generate_primaries(&mut self, h: &[usize]) -> Result<Flow<Vec<usize>>> {
        let p = self.p;
        let target = (p as usize).pow(self.tau);
        let mut remaining: Vec<usize> = h.to_vec();
        let mut out = Vec::new();
        while out.len() < target {
            let mut counts = vec![0usize; ProjClass::count(p)];
            let mut groups: Vec<(FpVec2, ProjClass, Vec<usize>)> = Vec::new();
            let mut slot = vec![usize::MAX; (p * p) as usize];
            for &i in &remaining {
                let v = self.forest.reduced(Item::Column(i), 0);
                let class = ProjClass::of(v[0], v[1], p).expect("level-zero column");
                counts[class.index()] += 1;
                let code = (v[0] * p + v[1]) as usize;
                if slot[code] == usize::MAX {
                    slot[code] = groups.len();
                    groups.push((v, class, Vec::new()));
                }
                groups[slot[code]].2.push(i);
            }
            let big = counts
                .iter()
                .enumerate()
                .fold((0, 0), |best, (idx, &n)| if n > best.1 { (idx, n) } else { best })
                .0;
            let big = ProjClass::from_index(big, p).expect("class index");
            let Some(picked) = cheapest_primary(&groups, big, p) else { break };
            let used: HashSet<usize> = picked.iter().copied().collect();
            remaining.retain(|i| !used.contains(i));
            let items: Vec<Item> = picked.into_iter().map(Item::Column).collect();
            let node = self.contract(Stage::Primaries, 0, items, NodeKind::Primary, "primary-dp");
            if let Some(cert) = self.finished(node) {
                return Ok(Flow::Done(cert));
            }
            out.push(node);
        }
        Ok(Flow::Continue(out))
    }

    /// Push every window of `pools[l]` up one level, for `l` in `levels`,
    /// stopping at a level once `pools[l+1]` holds `need[l+1]` items.
    pub(crate) fn cascade(
        &mut self,
        stage: Stage,
        pools: &mut [VecDeque<Item>],
        levels: std::ops::Range<u32>,
        need: &[usize],
        finder: Finder,
    ) -> Result<()> {
        let p = self.p;
        let window_size = finder.window(p);
        for l in levels {
            let l_us = l as usize;
            let mut window: Vec<Item> = Vec::with_capacity(window_size);
            loop {
                if pools[l_us + 1].len() >= need[l_us + 1] {
                    break;
                }
                while window.len() < window_size {
                    match pools[l_us].pop_front() {
                        Some(item) => window.push(item),
                        None => break,
                    }
                }
                if window.is_empty() {
                    break;
                }
                let below = window.len() < window_size;
                if below && self.guaranteed && stage != Stage::Stepstones {
                    break;
                }
                let vs: Vec<[u128; 2]> = window.iter().map(|&it| self.forest.scaled(it, l, 2)).collect();
                let found = match (finder, below) {
                    (_, true) if stage == Stage::Stepstones => None,
                    (_, true) => search_contraction(&vs, p),
                    (Finder::Lift, false) => Some(lift_contraction(&vs, p)?),
                    (Finder::Alon { strict }, false) => Some(alon_lift_contraction(&vs, p, strict)?.indices),
                };
                let Some(idx) = found else { break };
                let items: Vec<Item> = idx.iter().map(|&j| window[j]).collect();
                let chosen: HashSet<usize> = idx.into_iter().collect();
                let mut k = 0;
                window.retain(|_| {
                    k += 1;
                    !chosen.contains(&(k - 1))
                });
                let node = self.contract(stage, l, items, NodeKind::Secondary, finder.name());
                match self.forest.node(node).level {
                    Some(up) if up <= self.tau => pools[up as usize].push_back(Item::Node(node)),
                    _ => {
                        if self.guaranteed {
                            return Err(Error::PipelineFailure {
                                stage: stage.name().into(),
                                detail: format!("contraction from level {l} skipped past level {}", self.tau),
                            });
                        }
                    }
                }
            }
            for item in window.into_iter().rev() {
                pools[l_us].push_front(item);
            }
        }
        Ok(())
    }

    /// Contract primaries level by level until `p` of them sit at level `tau`.
    pub(crate) fn raise_primaries(
        &mut self,
        primaries: Vec<usize>,
        stepstones: &mut [VecDeque<Item>],
    ) -> Result<Flow<Vec<usize>>> {
        let p = self.p;
        let pu = p as usize;
        let tau = self.tau;
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); tau as usize + 1];
        for n in primaries {
            let l = self.forest.node(n).level.expect("finished nodes short-circuit");
            by_level[l as usize].push(n);
        }
        for l in 1..tau {
            let mut queue = std::mem::take(&mut by_level[l as usize]);
            while queue.len() >= olson_threshold(p) {
                let window: Vec<usize> = queue[..olson_threshold(p)].to_vec();
                let vs: Vec<FpVec2> = window.iter().map(|&n| self.forest.reduced(Item::Node(n), l)).collect();
                let idx = olson_zero_sum(&vs, p)?;
                let picked: Vec<usize> = idx.iter().map(|&j| window[j]).collect();
                queue.retain(|n| !picked.contains(n));
                let items = picked.into_iter().map(Item::Node).collect();
                let node = self.contract(Stage::RaisePrimaries, l, items, NodeKind::Primary, "olson");
                if let Some(flow) = self.place_primary(node, &mut by_level) {
                    return Ok(flow);
                }
            }
            // groups of p primaries, one contraction each, with stepstones
            for group in queue.chunks_exact(pu) {
                let pool = &mut stepstones[l as usize];
                let (secondaries, finder): (Vec<Item>, &str) = if l + 2 <= tau {
                    let mut by_class: Vec<Vec<Item>> = vec![Vec::new(); ProjClass::count(p)];
                    for &it in pool.iter() {
                        let v = self.forest.reduced(it, l);
                        by_class[ProjClass::of(v[0], v[1], p).expect("level-l item").index()].push(it);
                    }
                    let best = by_class.iter().max_by_key(|c| c.len()).expect("p+1 classes");
                    if best.len() < pu - 1 {
                        return Err(self.shortfall(Stage::RaisePrimaries, l, "p-1 same-class stepstones"));
                    }
                    (best[..pu - 1].to_vec(), "class-tail")
                } else {
                    if pool.len() < 2 * pu - 3 {
                        return Err(self.shortfall(Stage::RaisePrimaries, l, "2p-3 stepstones"));
                    }
                    (pool.iter().take(2 * pu - 3).copied().collect(), "constrained")
                };
                let mut cols: Vec<Item> = group.iter().map(|&n| Item::Node(n)).collect();
                cols.extend_from_slice(&secondaries);
                let vs: Vec<FpVec2> = cols.iter().map(|&it| self.forest.reduced(it, l)).collect();
                let idx = if finder == "class-tail" {
                    solve_pair_class_tail(&vs, p)?
                } else {
                    solve_pair_constrained(&vs, p)?
                };
                let items: Vec<Item> = idx.iter().map(|&j| cols[j]).collect();
                pool.retain(|it| !items.contains(it));
                let node = self.contract(Stage::RaisePrimaries, l, items, NodeKind::Primary, finder);
                if let Some(flow) = self.place_primary(node, &mut by_level) {
                    return Ok(flow);
                }
            }
        }
        self.record_census(Stage::RaisePrimaries, &by_level, stepstones);
        Ok(Flow::Continue(std::mem::take(&mut by_level[tau as usize])))
    }

    fn place_primary(&mut self, node: usize, by_level: &mut [Vec<usize>]) -> Option<Flow<Vec<usize>>> {
        if let Some(cert) = self.finished(node) {
            return Some(Flow::Done(cert));
        }
        let l = self.forest.node(node).level.expect("finite level");
        by_level[l as usize].push(node);
        None
    }

    pub(crate) fn shortfall(&self, stage: Stage, level: u32, what: &str) -> Error {
        Error::PipelineFailure { stage: stage.name().into(), detail: format!("level {level} lacks {what}") }
    }
}
