//! The contraction engine: primary variables from a level-zero set, secondary
//! stepstones, raising primaries to level `tau`, secondaries at level `tau`,
//! and a final constrained contraction that yields a certificate.

mod forest;
mod stages;

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

pub use forest::{Forest, Item, NodeKind, VarNode};
use stages::Finder;

use crate::certificate::{check_certificate, Certificate};
use crate::congruence::{oracle_subset_solution, solve_pair_constrained};
use crate::error::{Error, Result};
use crate::normalize::{normalize, Normalized};
use crate::system::{select_h, System};
use crate::zerosum::{alon_threshold, lift_threshold, FpVec2, ALON_C};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Assert every counting inequality; any shortfall is a failure.
    #[default]
    Guaranteed,
    /// Run regardless of size and fall back to the subset oracle.
    Opportunistic,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Use `C p` thresholds with `C = 9996` instead of `min(C p, 3p^2 - 2)`.
    pub strict_constants: bool,
}

/// Which variable-count hypothesis applies: by `tau >= 3`, `tau = 2`, `tau = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremCase {
    I,
    Ii,
    Iii,
}

impl TheoremCase {
    pub fn for_tau(tau: u32) -> Self {
        match tau {
            0 | 1 => TheoremCase::Iii,
            2 => TheoremCase::Ii,
            _ => TheoremCase::I,
        }
    }
}

/// Smallest `s` meeting the variable-count hypothesis for `(p, tau)`.
///
/// For `tau >= 2` this is `s > 2 p^(2tau+1) (p-1) - 2d`. For `tau = 1` it is
/// `s > (4p^2 + n - 3p) d^2 / (2p(p-1)) - 2d` where `n` is the linear
/// contraction threshold, i.e. the constant `C = n / p`.
pub fn theorem_min_s(p: u64, tau: u32, strict: bool) -> u128 {
    let p128 = p as u128;
    let d = p128.pow(tau) * (p128 - 1);
    match TheoremCase::for_tau(tau) {
        TheoremCase::I | TheoremCase::Ii => 2 * p128.pow(2 * tau + 1) * (p128 - 1) - 2 * d + 1,
        TheoremCase::Iii => {
            let n = alon_threshold(p, strict) as u128;
            (4 * p128 * p128 + n - 3 * p128) * d * d / (2 * p128 * (p128 - 1)) - 2 * d + 1
        }
    }
}

/// The case for `(p, tau, s)`, or the hypothesis it misses.
pub fn theorem_conditions(p: u64, tau: u32, s: usize, strict: bool) -> std::result::Result<TheoremCase, String> {
    let case = TheoremCase::for_tau(tau);
    if tau == 0 {
        return Err("tau must be at least 1".into());
    }
    let min_s = theorem_min_s(p, tau, strict);
    if (s as u128) < min_s {
        return Err(format!("s = {s} is below the bound {min_s} for p={p}, tau={tau}"));
    }
    match case {
        TheoremCase::I if p < 7 => Err(format!("tau >= 3 needs p >= 7, got {p}")),
        TheoremCase::Ii if strict && 2 * p < ALON_C + 8 => {
            Err(format!("tau = 2 with C = {ALON_C} needs p >= {}, got {p}", ALON_C / 2 + 4))
        }
        TheoremCase::Iii if p < 5 => Err(format!("tau = 1 needs p >= 5, got {p}")),
        _ => Ok(case),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Primaries,
    Stepstones,
    RaisePrimaries,
    SecondariesAtTau,
    Final,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Primaries => "primaries",
            Stage::Stepstones => "stepstones",
            Stage::RaisePrimaries => "raise_primaries",
            Stage::SecondariesAtTau => "secondaries_at_tau",
            Stage::Final => "final",
        }
    }
}

/// One line of the run log.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionRecord {
    pub stage: Stage,
    pub from_level: u32,
    pub kind: NodeKind,
    pub finder: &'static str,
    pub inputs: Vec<Item>,
    pub node: usize,
    pub level: Option<u32>,
    pub valuations: [Option<u32>; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct StageCensus {
    pub stage: Stage,
    pub primaries_by_level: Vec<usize>,
    pub secondaries_by_level: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum Route {
    /// The contraction pipeline; `early` names the stage that produced a
    /// primary variable above level `tau`, if one did.
    Pipeline { early: Option<Stage> },
    /// The pipeline stopped short and the subset oracle answered.
    Oracle { reason: String },
}

pub struct SolveReport {
    /// Refers to columns of [`SolveReport::solved_system`].
    pub certificate: Certificate,
    pub route: Route,
    pub case: TheoremCase,
    pub normalized: Option<Normalized>,
    pub censuses: Vec<StageCensus>,
    pub log: Vec<ContractionRecord>,
}

impl SolveReport {
    /// The system the certificate is for: the normalized one when
    /// normalization was needed, else the input.
    pub fn solved_system<'a>(&'a self, input: &'a System) -> &'a System {
        self.normalized.as_ref().map_or(input, |n| &n.system)
    }
}

pub(crate) enum Flow<T> {
    Continue(T),
    Done(Certificate),
}

pub(crate) struct Runner<'a> {
    pub(crate) forest: Forest<'a>,
    pub(crate) p: u64,
    pub(crate) tau: u32,
    pub(crate) guaranteed: bool,
    strict: bool,
    early: Option<Stage>,
    log: Vec<ContractionRecord>,
    censuses: Vec<StageCensus>,
}

impl<'a> Runner<'a> {
    fn new(sys: &'a System, opts: &SolveOptions) -> Self {
        Runner {
            forest: Forest::new(sys),
            p: sys.p(),
            tau: sys.tau(),
            guaranteed: opts.mode == Mode::Guaranteed,
            strict: opts.strict_constants,
            early: None,
            log: Vec::new(),
            censuses: Vec::new(),
        }
    }

    pub(crate) fn contract(
        &mut self,
        stage: Stage,
        from_level: u32,
        items: Vec<Item>,
        kind: NodeKind,
        finder: &'static str,
    ) -> usize {
        let node = self.forest.contract(&items, kind);
        let n = self.forest.node(node);
        let m = self.forest.system().modulus();
        let record = ContractionRecord {
            stage,
            from_level,
            kind,
            finder,
            inputs: items,
            node,
            level: n.level,
            valuations: [m.vord(n.coeff[0]), m.vord(n.coeff[1])],
        };
        log::debug!("{} contraction at level {from_level} -> node {node} level {:?}", stage.name(), n.level);
        self.log.push(record);
        node
    }

    /// A certificate if `node` is primary and already above level `tau`.
    pub(crate) fn finished(&mut self, node: usize) -> Option<Certificate> {
        let n = self.forest.node(node);
        if n.kind != NodeKind::Primary || n.level.is_some_and(|l| l <= self.tau) {
            return None;
        }
        let stage = self.log.last().map(|r| r.stage).unwrap_or(Stage::Primaries);
        self.early = Some(stage);
        Some(Certificate::new(self.forest.leaves(node)))
    }

    pub(crate) fn record_census(&mut self, stage: Stage, primaries: &[Vec<usize>], secondaries: &[VecDeque<Item>]) {
        let census = StageCensus {
            stage,
            primaries_by_level: primaries.iter().map(Vec::len).collect(),
            secondaries_by_level: secondaries.iter().map(VecDeque::len).collect(),
        };
        log::info!("{} census: {:?}", stage.name(), census);
        self.censuses.push(census);
    }

    fn require(&self, stage: Stage, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
        if self.guaranteed && !ok {
            return Err(Error::PipelineFailure { stage: stage.name().into(), detail: detail() });
        }
        Ok(())
    }

    fn run(&mut self) -> Result<Certificate> {
        let sys = self.forest.system();
        let (p, tau) = (self.p, self.tau);
        let pu = p as usize;
        let big_p = pu.pow(tau + 1);
        let h = select_h(sys)?.indices;
        let in_h: HashSet<usize> = h.iter().copied().collect();

        let primaries = match self.generate_primaries(&h)? {
            Flow::Done(c) => return Ok(c),
            Flow::Continue(v) => v,
        };
        let needed = pu.pow(tau);
        self.require(Stage::Primaries, primaries.len() >= needed, || {
            format!("{} primaries from #H = {}, need {needed}", primaries.len(), h.len())
        })?;
        if primaries.len() < pu {
            return Err(self.shortfall(Stage::Primaries, 0, "enough primaries"));
        }

        // columns by level, outside H, in index order
        let mut free: Vec<Vec<usize>> = vec![Vec::new(); tau as usize + 1];
        for i in 0..sys.len() {
            if in_h.contains(&i) {
                continue;
            }
            if let Some(l) = sys.level(i).filter(|&l| l <= tau) {
                free[l as usize].push(i);
            }
        }

        let at_tau = if tau >= 2 {
            let budget = 7 * pu.pow(tau);
            let available = free[0].len() + free[1].len();
            self.require(Stage::Stepstones, available >= budget, || {
                format!("(m_0 - #H) + m_1 = {available} < 7p^tau = {budget}")
            })?;
            // the first 7p^tau free columns at levels 0 and 1
            let mut sources: Vec<usize> = free[0].iter().chain(&free[1]).copied().collect();
            sources.sort_unstable();
            sources.truncate(budget);
            let taken: HashSet<usize> = sources.iter().copied().collect();
            for level in free.iter_mut().take(2) {
                level.retain(|i| !taken.contains(i));
            }
            let mut pools: Vec<VecDeque<Item>> = vec![VecDeque::new(); tau as usize + 1];
            for &i in &sources {
                pools[sys.level(i).expect("level 0 or 1") as usize].push_back(Item::Column(i));
            }
            let unlimited = vec![usize::MAX; tau as usize + 1];
            self.cascade(Stage::Stepstones, &mut pools, 0..tau - 1, &unlimited, Finder::Lift)?;
            self.record_census(Stage::Stepstones, &[], &pools);
            let wide = 3 * pu * pu - pu - 2;
            for l in 1..tau - 1 {
                let have = pools[l as usize].len();
                self.require(Stage::Stepstones, have >= wide, || format!("level {l}: {have} < 3p^2-p-2 = {wide}"))?;
            }
            let have = pools[tau as usize - 1].len();
            self.require(Stage::Stepstones, have >= 4 * pu - 6, || {
                format!("level {}: {have} < 4p-6 = {}", tau - 1, 4 * pu - 6)
            })?;
            match self.raise_primaries(primaries, &mut pools)? {
                Flow::Done(c) => return Ok(c),
                Flow::Continue(v) => v,
            }
        } else {
            primaries
        };
        if at_tau.len() < pu {
            return Err(self.shortfall(Stage::RaisePrimaries, tau, "p primaries"));
        }

        let case = TheoremCase::for_tau(tau);
        let remaining: usize = free.iter().map(Vec::len).sum();
        let finder = match case {
            TheoremCase::I => Finder::Lift,
            _ => Finder::Alon { strict: self.strict },
        };
        let pt = pu.pow(tau);
        let (claim, what) = match case {
            TheoremCase::I => (6 * big_p - 8 * pt, "6p^(tau+1) - 8p^tau"),
            TheoremCase::Ii => (4 * pu.pow(3) - 8 * pu * pu, "4p^3 - 8p^2"),
            TheoremCase::Iii => ((2 * pu * pu + alon_threshold(p, self.strict)).saturating_sub(3 * pu + 3), "2p^2 + (C-3)p - 3"),
        };
        self.require(Stage::SecondariesAtTau, remaining >= claim, || {
            format!("{remaining} secondary candidates < {what} = {claim}")
        })?;
        // pool sizes each level needs, from the top down
        let window = finder.window(p);
        let mut need = vec![0usize; tau as usize + 1];
        need[tau as usize] = 2 * pu - 3;
        for l in (0..tau as usize).rev() {
            let outputs = need[l + 1].saturating_sub(free[l + 1].len());
            need[l] = if outputs == 0 { 0 } else { (outputs - 1) * pu + window };
        }
        let slack = lift_threshold(p);
        let mut pools: Vec<VecDeque<Item>> = free
            .iter()
            .enumerate()
            .map(|(l, cols)| {
                let take = if self.guaranteed { need[l] } else { need[l].saturating_add(slack) };
                cols.iter().take(take).map(|&i| Item::Column(i)).collect()
            })
            .collect();
        self.cascade(Stage::SecondariesAtTau, &mut pools, 0..tau, &need, finder)?;
        let mut by_level = vec![Vec::new(); tau as usize + 1];
        by_level[tau as usize] = at_tau.clone();
        self.record_census(Stage::SecondariesAtTau, &by_level, &pools);
        let top = &pools[tau as usize];
        if top.len() < 2 * pu - 3 {
            return Err(self.shortfall(Stage::SecondariesAtTau, tau, "2p-3 secondaries"));
        }

        let mut cols: Vec<Item> = at_tau[..pu].iter().map(|&n| Item::Node(n)).collect();
        cols.extend(top.iter().take(2 * pu - 3).copied());
        let vs: Vec<FpVec2> = cols.iter().map(|&it| self.forest.reduced(it, tau)).collect();
        let idx = solve_pair_constrained(&vs, p)?;
        let items: Vec<Item> = idx.iter().map(|&j| cols[j]).collect();
        let node = self.contract(Stage::Final, tau, items, NodeKind::Primary, "constrained");
        let cert = self.finished(node);
        self.early = None;
        cert.ok_or_else(|| Error::PipelineFailure {
            stage: Stage::Final.name().into(),
            detail: format!("final contraction landed at level {:?}", self.forest.node(node).level),
        })
    }
}

/// Find a certificate for `sys`, normalizing first when the level-count
/// bounds fail.
pub fn solve(sys: &System, opts: &SolveOptions) -> Result<SolveReport> {
    let case = TheoremCase::for_tau(sys.tau());
    let opportunistic = opts.mode == Mode::Opportunistic;
    let oracle = |work: &System, reason: String| -> Result<(Certificate, Route)> {
        log::info!("{reason}; asking the subset oracle");
        let cert = oracle_subset_solution(work)
            .ok_or_else(|| Error::Unsolvable(format!("no rank-two subset solution mod p^{}", sys.tau() + 1)))?;
        Ok((cert, Route::Oracle { reason }))
    };
    let normalized = match sys.census().violated_bound() {
        Some(bound) => {
            log::info!("normalizing: {bound}");
            match normalize(sys) {
                Ok(n) => Some(n),
                Err(e) if opportunistic => {
                    let (certificate, route) = oracle(sys, format!("normalization failed: {e}"))?;
                    return Ok(SolveReport { certificate, route, case, normalized: None, censuses: vec![], log: vec![] });
                }
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let work = normalized.as_ref().map_or(sys, |n| &n.system);
    if !opportunistic {
        theorem_conditions(sys.p(), sys.tau(), sys.len(), opts.strict_constants).map_err(Error::InsufficientVariables)?;
        if let Some(bound) = work.census().violated_bound() {
            return Err(Error::PipelineFailure { stage: "normalize".into(), detail: bound });
        }
    }
    let mut runner = Runner::new(work, opts);
    let (certificate, route) = match runner.run() {
        Ok(cert) => {
            runner.forest.check_exact().map_err(|detail| Error::PipelineFailure { stage: "forest".into(), detail })?;
            (cert, Route::Pipeline { early: runner.early })
        }
        Err(e) if opportunistic && !matches!(e, Error::Counterexample(_)) => {
            oracle(work, format!("pipeline stopped: {e}"))?
        }
        Err(e) => return Err(e),
    };
    check_certificate(work, &certificate)
        .map_err(|detail| Error::PipelineFailure { stage: "certificate".into(), detail })?;
    let Runner { censuses, log, .. } = runner;
    Ok(SolveReport { certificate, route, case, normalized, censuses, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify;
    use crate::generate::{random_system, Profile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn opportunistic() -> SolveOptions {
        SolveOptions { mode: Mode::Opportunistic, strict_constants: false }
    }

    #[test]
    fn theorem_bounds() {
        assert_eq!(theorem_min_s(5, 1, false), 1541);
        assert_eq!(theorem_min_s(7, 2, false), 201_097);
        assert_eq!(theorem_min_s(7, 3, false), 9_878_401);
        assert!(theorem_conditions(5, 1, 1541, false).is_ok());
        assert!(theorem_conditions(5, 1, 1540, false).is_err());
        assert!(theorem_conditions(3, 1, 100_000, false).is_err());
        assert!(theorem_conditions(5, 3, 10_000_000, false).is_err());
        assert!(theorem_conditions(7, 2, 201_097, true).is_err());
    }

    #[test]
    fn two_axis_h_gives_three_primaries() {
        let mut cols = Vec::new();
        for k in 0..9u128 {
            cols.push([1 + 3 * k, 3 * (k % 2)]);
        }
        for k in 0..9u128 {
            cols.push([3 * (k % 3), 1 + 3 * k]);
        }
        let sys = System::new(3, 1, 8, &cols).unwrap();
        let h: Vec<usize> = (0..18).collect();
        let mut runner = Runner::new(&sys, &opportunistic());
        let Flow::Continue(primaries) = runner.generate_primaries(&h).unwrap() else {
            panic!("no column sum vanishes to level 2 here");
        };
        assert_eq!(primaries.len(), 3);
        let mut seen = HashSet::new();
        for &n in &primaries {
            let leaves = runner.forest.leaves(n);
            assert_eq!(leaves.len(), 6);
            assert_eq!(leaves.iter().filter(|&&i| i < 9).count(), 3);
            assert!(leaves.iter().all(|&i| seen.insert(i)));
            assert!(runner.forest.node(n).level.is_some_and(|l| l >= 1));
        }
        runner.forest.check_exact().unwrap();
    }

    #[test]
    fn exact_zero_primary_short_circuits() {
        let modulus = 5u128.pow(4);
        let mut cols = vec![[1u128, 0]; 10];
        cols.extend(vec![[0u128, 1]; 10]);
        cols.extend(vec![[modulus - 1, modulus - 1]; 10]);
        let sys = System::new(5, 1, 4, &cols).unwrap();
        let h: Vec<usize> = (0..30).collect();
        let mut runner = Runner::new(&sys, &opportunistic());
        let Flow::Done(cert) = runner.generate_primaries(&h).unwrap() else {
            panic!("(1,0) + (0,1) + (-1,-1) vanishes exactly");
        };
        assert_eq!(cert.support.len(), 3);
        assert!(verify(&sys, &cert));
    }

    #[test]
    fn stepstones_for_p7_tau3() {
        let (p, tau) = (7u64, 3u32);
        let budget = 7 * 7usize.pow(tau);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = crate::padic::Modulus::new(p, 8).unwrap();
        let cols: Vec<[u128; 2]> = (0..budget)
            .map(|_| loop {
                let c = [rng.gen_range(0..m.modulus()), rng.gen_range(0..m.modulus())];
                if c[0] % 7 != 0 || c[1] % 7 != 0 {
                    break c;
                }
            })
            .collect();
        let sys = System::new(p, tau, 8, &cols).unwrap();
        let mut runner = Runner::new(&sys, &SolveOptions::default());
        let mut pools: Vec<VecDeque<Item>> = vec![VecDeque::new(); 4];
        pools[0] = (0..budget).map(Item::Column).collect();
        runner.cascade(Stage::Stepstones, &mut pools, 0..tau - 1, &[usize::MAX; 4], Finder::Lift).unwrap();
        assert!(pools[1].len() >= 138, "{}", pools[1].len());
        assert!(pools[2].len() >= 22, "{}", pools[2].len());
        assert!(pools[3].is_empty());
        for (l, pool) in pools.iter().enumerate() {
            assert!(pool.iter().all(|&it| runner.forest.level(it) == Some(l as u32)));
        }
        runner.forest.check_exact().unwrap();
    }

    #[test]
    fn nine_level_one_primaries_raise_to_level_two() {
        let p = 3u64;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = crate::padic::Modulus::new(p, 8).unwrap();
        let top = m.modulus();
        for _ in 0..50 {
            // primaries from (1,0), (0,1), (-1+3u, -1+3v): level one with two classes
            let mut cols: Vec<[u128; 2]> = Vec::new();
            for _ in 0..9 {
                let (u, v) = loop {
                    let (u, v) = (rng.gen_range(0..top / 3), rng.gen_range(0..top / 3));
                    if u % 3 != 0 || v % 3 != 0 {
                        break (u, v);
                    }
                };
                cols.extend([[1, 0], [0, 1], [(3 * u + top - 1) % top, (3 * v + top - 1) % top]]);
            }
            for _ in 0..20 {
                cols.push(loop {
                    let c = [3 * rng.gen_range(0..top / 3), 3 * rng.gen_range(0..top / 3)];
                    if c[0] % 9 != 0 || c[1] % 9 != 0 {
                        break c;
                    }
                });
            }
            let sys = System::new(p, 2, 8, &cols).unwrap();
            let mut runner = Runner::new(&sys, &SolveOptions::default());
            let primaries: Vec<usize> = (0..9)
                .map(|g| {
                    let items: Vec<Item> = (3 * g..3 * g + 3).map(Item::Column).collect();
                    runner.forest.contract(&items, NodeKind::Primary)
                })
                .collect();
            assert!(primaries.iter().all(|&n| runner.forest.node(n).level == Some(1)));
            let mut pools: Vec<VecDeque<Item>> = vec![VecDeque::new(); 3];
            pools[1] = (27..47).map(Item::Column).collect();
            match runner.raise_primaries(primaries, &mut pools).unwrap() {
                Flow::Done(cert) => assert!(verify(&sys, &cert)),
                Flow::Continue(at_two) => {
                    assert!(at_two.len() >= 3);
                    assert!(at_two.iter().all(|&n| runner.forest.node(n).level == Some(2)));
                }
            }
            runner.forest.check_exact().unwrap();
        }
    }

    #[test]
    fn contraction_two_arithmetic() {
        for p in [3usize, 5, 7] {
            for tau in 2..5u32 {
                let t = p.pow(tau);
                for x in 0..=t {
                    assert!(t - x + x / p >= p.pow(tau - 1));
                }
            }
        }
    }

    #[test]
    fn empty_secondary_pool_is_an_error() {
        let mut cols = Vec::new();
        for k in 0..25u128 {
            cols.push([1 + 5 * k, 5]);
        }
        for k in 0..25u128 {
            cols.push([(k % 4) + 1, 1 + 5 * k]);
        }
        let sys = System::new(5, 1, 6, &cols).unwrap();
        let mut runner = Runner::new(&sys, &opportunistic());
        match runner.run() {
            Err(Error::PipelineFailure { stage, .. }) => assert_eq!(stage, "secondaries_at_tau"),
            Err(e) => panic!("unexpected error {e}"),
            Ok(cert) => assert!(verify(&sys, &cert), "only a short circuit may succeed"),
        }
    }

    #[test]
    fn case_iii_census() {
        let sys = random_system(5, 1, 11, 1541, 3, Profile::Normalized).unwrap();
        let report = solve(&sys, &SolveOptions::default()).unwrap();
        assert!(verify(&sys, &report.certificate));
        if report.route == (Route::Pipeline { early: None }) {
            let last = report.censuses.last().unwrap();
            assert_eq!(last.stage, Stage::SecondariesAtTau);
            assert!(last.secondaries_by_level[1] >= 7);
            assert!(last.primaries_by_level[1] >= 5);
        }
    }

    #[test]
    fn guaranteed_mode_rejects_small_systems() {
        let sys = random_system(5, 1, 6, 200, 0, Profile::Normalized).unwrap();
        assert!(matches!(solve(&sys, &SolveOptions::default()), Err(Error::InsufficientVariables(_))));
        let report = solve(&sys, &opportunistic()).unwrap();
        assert!(verify(&sys, &report.certificate));
    }
}
