use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{unlinked, Angle, LamClass, LaminationError};

/// Finitely many classes of a `d`-invariant lamination; angles in no class
/// are implicitly singleton classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLamination {
    pub degree: u32,
    pub classes: Vec<LamClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Holds automatically for finite truncations.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub conditions: Vec<ConditionResult>,
    pub ok: bool,
}

impl InvarianceReport {
    pub fn status(&self, condition: &str) -> Option<CheckStatus> {
        self.conditions.iter().find(|c| c.condition == condition).map(|c| c.status)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.conditions.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.condition.as_str()).collect()
    }
}

fn result(condition: &str, fail: Option<String>) -> ConditionResult {
    ConditionResult {
        condition: condition.into(),
        status: if fail.is_some() { CheckStatus::Fail } else { CheckStatus::Pass },
        counterexample: fail,
    }
}

impl FiniteLamination {
    pub fn new(degree: u32, classes: Vec<LamClass>) -> Result<Self, LaminationError> {
        if degree < 2 {
            return Err(LaminationError::InvalidDegree(degree));
        }
        Ok(FiniteLamination { degree, classes })
    }

    fn owner(&self) -> HashMap<Angle, usize> {
        let mut m = HashMap::new();
        for (i, c) in self.classes.iter().enumerate() {
            for &a in c.angles() {
                m.entry(a).or_insert(i);
            }
        }
        m
    }

    pub fn contains_class(&self, c: &LamClass) -> bool {
        self.classes.contains(c)
    }

    pub fn num_angles(&self) -> usize {
        self.classes.iter().map(LamClass::len).sum()
    }

    /// Checks (E1) closed graph, (E2) unlinked classes, (D1) images of classes
    /// are classes, (D2) preimages that appear are unions of classes, and
    /// (D3) gaps cover their images with positive orientation.
    pub fn check_invariance(&self) -> InvarianceReport {
        let d = self.degree;
        let owner = self.owner();
        let mut conditions = vec![ConditionResult {
            condition: "E1".into(),
            status: CheckStatus::Vacuous,
            counterexample: Some("finitely many finite classes always have a closed graph".into()),
        }];

        let mut e2 = None;
        'outer: for (i, a) in self.classes.iter().enumerate() {
            for b in &self.classes[i + 1..] {
                match unlinked(a, b) {
                    Ok(true) => {}
                    Ok(false) => {
                        e2 = Some(format!("{a} and {b} are linked"));
                        break 'outer;
                    }
                    Err(_) => {
                        e2 = Some(format!("{a} and {b} share an angle"));
                        break 'outer;
                    }
                }
            }
        }
        conditions.push(result("E2", e2));

        let is_class = |c: &LamClass| self.contains_class(c) || (c.len() == 1 && !owner.contains_key(&c.angles()[0]));
        let d1 = self.classes.iter().find_map(|g| {
            let img = g.sigma(d);
            (!is_class(&img)).then(|| format!("image of {g} is {img}, which is not a class"))
        });
        conditions.push(result("D1", d1));

        let mut d2 = None;
        'd2: for h in &self.classes {
            for a in h.angles() {
                for x in a.preimages(d) {
                    if let Some(&i) = owner.get(&x) {
                        let g = &self.classes[i];
                        if g.sigma(d) != *h {
                            d2 = Some(format!("{x} maps into {h} but its class {g} does not map onto it"));
                            break 'd2;
                        }
                    }
                }
            }
        }
        conditions.push(result("D2", d2));

        let d3 = self.classes.iter().filter(|g| g.is_gap()).find_map(|g| covering_failure(d, g));
        conditions.push(result("D3", d3));

        let ok = conditions.iter().all(|c| c.status != CheckStatus::Fail);
        InvarianceReport { conditions, ok }
    }
}

/// For a gap `g`: each complementary arc `(s, t)` must map to the
/// complementary arc `(σ(s), σ(t))` of `σ(g)`.
pub(crate) fn covering_failure(d: u32, g: &LamClass) -> Option<String> {
    let img = g.sigma(d);
    let pts = img.angles();
    for (s, t) in g.arcs() {
        let (fs, ft) = (s.sigma(d), t.sigma(d));
        let ok = if fs == ft {
            pts.len() == 1
        } else {
            let i = pts.binary_search(&fs).expect("image point");
            pts[(i + 1) % pts.len()] == ft
        };
        if !ok {
            return Some(format!("arc ({s}, {t}) of {g} does not map onto a complementary arc of {img}"));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ClassType {
    Critical,
    Periodic {
        period: usize,
    },
    Precritical {
        steps: usize,
    },
    Preperiodic {
        preperiod: usize,
        period: usize,
    },
    /// No repetition or critical image within the horizon. This is a
    /// bounded-horizon verdict only: finite gaps of invariant laminations
    /// are never wandering.
    WanderingAtHorizon {
        horizon: usize,
    },
}

/// Orbit type of a class, decided from its first `horizon` images. When
/// several apply, the order is critical, periodic, precritical, preperiodic.
pub fn class_type(l: &FiniteLamination, c: &LamClass, horizon: usize) -> ClassType {
    let d = l.degree;
    let critical = |g: &LamClass| g.sigma(d).len() < g.len();
    if critical(c) {
        return ClassType::Critical;
    }
    let mut orbit = vec![c.clone()];
    for _ in 0..horizon.max(1) {
        let next = orbit.last().expect("nonempty").sigma(d);
        orbit.push(next);
    }
    if let Some(n) = (1..orbit.len()).find(|&n| orbit[n] == *c) {
        return ClassType::Periodic { period: n };
    }
    if let Some(i) = (1..orbit.len()).find(|&i| critical(&orbit[i])) {
        return ClassType::Precritical { steps: i };
    }
    for j in 2..orbit.len() {
        if let Some(i) = (1..j).find(|&i| orbit[i] == orbit[j]) {
            return ClassType::Preperiodic { preperiod: i, period: j - i };
        }
    }
    ClassType::WanderingAtHorizon { horizon: horizon.max(1) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub level: usize,
    pub target: LamClass,
    /// Number of valid pairings; the chosen one minimizes the largest class
    /// diameter, ties broken lexicographically.
    pub valid_pairings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub lamination: FiniteLamination,
    /// Classes added at each level; level 0 is the forward orbit of the seed.
    pub levels: Vec<Vec<LamClass>>,
    pub ambiguities: Vec<Ambiguity>,
}

const ORBIT_LIMIT: usize = 256;

/// Lamination generated from `seed` by `depth` rounds of pullback.
pub fn pullback_generate(seed: &LamClass, d: u32, depth: usize) -> Result<FiniteLamination, LaminationError> {
    Ok(pullback_with_report(seed, d, depth)?.lamination)
}

pub fn pullback_with_report(seed: &LamClass, d: u32, depth: usize) -> Result<PullbackReport, LaminationError> {
    if d < 2 {
        return Err(LaminationError::InvalidDegree(d));
    }
    if seed.len() < 2 {
        return Err(LaminationError::InvalidClass("seed must have at least two angles".into()));
    }
    if seed.is_gap() {
        if let Some(msg) = covering_failure(d, seed) {
            return Err(LaminationError::InvalidClass(msg));
        }
    }
    let mut classes: Vec<LamClass> = vec![seed.clone()];
    let mut cur = seed.clone();
    for _ in 0..ORBIT_LIMIT {
        let next = cur.sigma(d);
        if next.len() < 2 || classes.contains(&next) {
            break;
        }
        classes.push(next.clone());
        cur = next;
    }
    let mut owner: HashMap<Angle, usize> = HashMap::new();
    for (i, c) in classes.iter().enumerate() {
        for &a in c.angles() {
            if owner.insert(a, i).is_some() {
                return Err(LaminationError::InvalidClass(format!("forward orbit of {seed} overlaps itself")));
            }
        }
    }
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if !unlinked(a, b)? {
                return Err(LaminationError::InvalidClass(format!("forward images {a} and {b} are linked")));
            }
        }
    }
    let mut levels = vec![classes.clone()];
    let mut ambiguities = Vec::new();
    for level in 1..=depth {
        let mut added = Vec::new();
        for h in levels[level - 1].clone() {
            let mut pre: Vec<Angle> = h.angles().iter().flat_map(|a| a.preimages(d)).collect();
            pre.sort();
            pre.dedup();
            let mut rest = Vec::new();
            for x in pre {
                match owner.get(&x) {
                    Some(&i) if classes[i].sigma(d) != h => {
                        return Err(LaminationError::NoValidPairing(format!(
                            "{x} lies in {} which does not map onto {h}",
                            classes[i]
                        )))
                    }
                    Some(_) => {}
                    None => rest.push(x),
                }
            }
            if rest.is_empty() {
                continue;
            }
            let (best, count) = best_pairing(d, &h, &rest, &classes)
                .ok_or_else(|| LaminationError::NoValidPairing(format!("preimages of {h} at level {level}")))?;
            if count > 1 {
                ambiguities.push(Ambiguity { level, target: h.clone(), valid_pairings: count });
            }
            for block in best {
                for &a in block.angles() {
                    owner.insert(a, classes.len());
                }
                classes.push(block.clone());
                added.push(block);
            }
        }
        levels.push(added);
    }
    let mut sorted = classes;
    sorted.sort();
    Ok(PullbackReport { lamination: FiniteLamination { degree: d, classes: sorted }, levels, ambiguities })
}

/// Exhaustive search over partitions of `rest` into classes mapping onto
/// `h`, unlinked with each other and with `existing`. Returns the best
/// partition and the number of valid ones.
fn best_pairing(d: u32, h: &LamClass, rest: &[Angle], existing: &[LamClass]) -> Option<(Vec<LamClass>, usize)> {
    let mut blocks: Vec<Vec<Angle>> = Vec::new();
    let mut best: Option<(num_rational::Ratio<i64>, Vec<LamClass>)> = None;
    let mut count = 0usize;
    let max_blocks = rest.len() / h.len();
    search(d, h, rest, existing, 0, max_blocks, &mut blocks, &mut best, &mut count);
    best.map(|(_, b)| (b, count))
}

fn linked_partial(a: &[Angle], b: &[Angle]) -> bool {
    if a.len() < 2 || b.len() < 2 {
        return false;
    }
    let ca = LamClass::new(a.to_vec()).expect("distinct angles");
    let cb = LamClass::new(b.to_vec()).expect("distinct angles");
    !unlinked(&ca, &cb).unwrap_or(false)
}

#[allow(clippy::too_many_arguments)]
fn search(
    d: u32,
    h: &LamClass,
    rest: &[Angle],
    existing: &[LamClass],
    i: usize,
    max_blocks: usize,
    blocks: &mut Vec<Vec<Angle>>,
    best: &mut Option<(num_rational::Ratio<i64>, Vec<LamClass>)>,
    count: &mut usize,
) {
    if i == rest.len() {
        let mut out = Vec::with_capacity(blocks.len());
        for b in blocks.iter() {
            let c = LamClass::new(b.clone()).expect("distinct angles");
            if c.sigma(d) != *h || (c.is_gap() && covering_failure(d, &c).is_some()) {
                return;
            }
            out.push(c);
        }
        *count += 1;
        out.sort();
        let score = out.iter().map(LamClass::diameter).max().expect("at least one block");
        let better = match best {
            None => true,
            Some((s, b)) => score < *s || (score == *s && out < *b),
        };
        if better {
            *best = Some((score, out));
        }
        return;
    }
    let x = rest[i];
    for k in 0..=blocks.len() {
        if k == blocks.len() {
            if blocks.len() == max_blocks {
                break;
            }
            blocks.push(Vec::new());
        }
        blocks[k].push(x);
        let ok = (0..blocks.len()).all(|j| j == k || !linked_partial(&blocks[k], &blocks[j]))
            && existing.iter().all(|e| blocks[k].len() < 2 || !linked_partial(&blocks[k], e.angles()));
        if ok {
            search(d, h, rest, existing, i + 1, max_blocks, blocks, best, count);
        }
        blocks[k].pop();
        if blocks[k].is_empty() {
            blocks.pop();
        }
    }
}
