use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::words::{decompose, ConstructionSequence, Piece, Symbol, Word, DEFAULT_EXPANSION_CAP};
use crate::Rational;

/// Largest number of subcolumn slots a default stacking plan may list.
pub const MAX_PLAN_SLOTS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemError {
    InvalidSequence(String),
    InvalidPlan(String),
    /// The orbit left the part of the tower the stacking plan determines.
    Escape { column: usize, sub: u64, level: u64 },
    NoReturn { column: usize, sub: u64, level: u64 },
    EmptyBaseSet,
    TooLarge(String),
    Overflow,
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::InvalidSequence(why) => write!(f, "invalid sequence: {why}"),
            SystemError::InvalidPlan(why) => write!(f, "invalid stacking plan: {why}"),
            SystemError::Escape { column, sub, level } => write!(
                f,
                "orbit escapes the built tower at column {column}, subcolumn {sub}, level {level}"
            ),
            SystemError::NoReturn { column, sub, level } => write!(
                f,
                "no return to the base set from column {column}, subcolumn {sub}, level {level}"
            ),
            SystemError::EmptyBaseSet => write!(f, "the base set is empty"),
            SystemError::TooLarge(why) => write!(f, "too large: {why}"),
            SystemError::Overflow => write!(f, "arithmetic overflow"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SystemError {}

/// A cell of the tower: `level` of subcolumn `sub` of `column`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub column: usize,
    pub sub: u64,
    pub level: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub word: Word,
    pub width: Rational,
    /// Number of equal-width subcolumns the column is cut into.
    pub subcolumns: u64,
}

/// Stack order of subcolumns: the top of `order[i]` sits below the bottom of
/// `order[i + 1]`. With `wrap` the last one is stacked below the first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackingPlan {
    pub order: Vec<(usize, u64)>,
    pub wrap: bool,
}

/// A level of a construction sequence realized as a tower of labelled
/// intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSystem {
    pub level: usize,
    pub height: u64,
    pub columns: Vec<Column>,
    pub plan: StackingPlan,
    #[serde(skip)]
    labels: Vec<Vec<Symbol>>,
    #[serde(skip)]
    slots: Vec<Vec<usize>>,
}

const NO_SLOT: usize = usize::MAX;

impl TowerSystem {
    /// Assembles a tower from explicit columns and plan.
    pub fn new(level: usize, columns: Vec<Column>, plan: StackingPlan) -> Result<Self, SystemError> {
        let height = columns.first().map(|c| c.word.len()).unwrap_or(0);
        if height == 0 {
            return Err(SystemError::InvalidSequence("a tower needs nonempty columns".into()));
        }
        let mut labels = Vec::with_capacity(columns.len());
        let mut slots = Vec::with_capacity(columns.len());
        for c in &columns {
            if c.word.len() != height {
                return Err(SystemError::InvalidSequence("columns differ in height".into()));
            }
            if c.subcolumns == 0 {
                return Err(SystemError::InvalidPlan("a column needs at least one subcolumn".into()));
            }
            if c.subcolumns as usize > MAX_PLAN_SLOTS {
                return Err(SystemError::TooLarge("subcolumn count".into()));
            }
            labels.push(
                c.word
                    .expand(DEFAULT_EXPANSION_CAP)
                    .map_err(|e| SystemError::TooLarge(alloc::format!("column of height {}", e.length)))?,
            );
            slots.push(vec![NO_SLOT; c.subcolumns as usize]);
        }
        for (i, &(c, s)) in plan.order.iter().enumerate() {
            let slot = slots
                .get_mut(c)
                .and_then(|v| v.get_mut(s as usize))
                .ok_or_else(|| SystemError::InvalidPlan(alloc::format!("no subcolumn ({c}, {s})")))?;
            if *slot != NO_SLOT {
                return Err(SystemError::InvalidPlan(alloc::format!("subcolumn ({c}, {s}) listed twice")));
            }
            *slot = i;
        }
        Ok(TowerSystem { level, height, columns, plan, labels, slots })
    }

    /// Rebuilds the lookup tables after deserialization.
    pub fn rebuild(self) -> Result<Self, SystemError> {
        TowerSystem::new(self.level, self.columns, self.plan)
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn label(&self, cell: Cell) -> Symbol {
        self.labels[cell.column][cell.level as usize]
    }

    pub fn cell_mass(&self, column: usize) -> Rational {
        let c = &self.columns[column];
        c.width / Rational::from_integer(c.subcolumns)
    }

    /// Total mass of the levels, `Σ width * height`.
    pub fn total_mass(&self) -> Rational {
        self.columns
            .iter()
            .fold(Rational::zero(), |acc, c| acc + c.width * Rational::from_integer(self.height))
    }

    /// Every cell, column by column.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let h = self.height;
        self.columns.iter().enumerate().flat_map(move |(column, c)| {
            (0..c.subcolumns).flat_map(move |sub| (0..h).map(move |level| Cell { column, sub, level }))
        })
    }

    pub fn bottom_of_plan(&self) -> Option<Cell> {
        self.plan.order.first().map(|&(column, sub)| Cell { column, sub, level: 0 })
    }

    fn escape(cell: Cell) -> SystemError {
        SystemError::Escape { column: cell.column, sub: cell.sub, level: cell.level }
    }

    /// One step of the tower map: up within a column, from a top to the
    /// bottom of the next subcolumn in the plan.
    pub fn step(&self, cell: Cell) -> Result<Cell, SystemError> {
        if cell.level + 1 < self.height {
            return Ok(Cell { level: cell.level + 1, ..cell });
        }
        let slot = self.slots[cell.column][cell.sub as usize];
        if slot == NO_SLOT {
            return Err(Self::escape(cell));
        }
        let next = if slot + 1 < self.plan.order.len() {
            slot + 1
        } else if self.plan.wrap {
            0
        } else {
            return Err(Self::escape(cell));
        };
        let (column, sub) = self.plan.order[next];
        Ok(Cell { column, sub, level: 0 })
    }

    pub fn inverse(&self, cell: Cell) -> Result<Cell, SystemError> {
        if cell.level > 0 {
            return Ok(Cell { level: cell.level - 1, ..cell });
        }
        let slot = self.slots[cell.column][cell.sub as usize];
        if slot == NO_SLOT {
            return Err(Self::escape(cell));
        }
        let prev = if slot > 0 {
            slot - 1
        } else if self.plan.wrap {
            self.plan.order.len() - 1
        } else {
            return Err(Self::escape(cell));
        };
        let (column, sub) = self.plan.order[prev];
        Ok(Cell { column, sub, level: self.height - 1 })
    }

    /// Labels read along the orbit of `cell` from time `-radius` to `radius`.
    pub fn name_of_point(&self, cell: Cell, radius: u64) -> Result<Word, SystemError> {
        let mut start = cell;
        for _ in 0..radius {
            start = self.inverse(start)?;
        }
        self.orbit_name(start, 2 * radius + 1)
    }

    /// Labels of the first `steps` points of the forward orbit.
    pub fn orbit_name(&self, start: Cell, steps: u64) -> Result<Word, SystemError> {
        let mut w = Word::empty();
        let mut c = start;
        for i in 0..steps {
            w.push(self.label(c), 1);
            if i + 1 < steps {
                c = self.step(c)?;
            }
        }
        Ok(w)
    }

    /// Visits to `hit` among the first `steps` points of the orbit.
    pub fn visit_count<F: FnMut(Cell) -> bool>(&self, start: Cell, steps: u64, mut hit: F) -> Result<u64, SystemError> {
        let mut c = start;
        let mut count = 0;
        for i in 0..steps {
            count += u64::from(hit(c));
            if i + 1 < steps {
                c = self.step(c)?;
            }
        }
        Ok(count)
    }

    /// First return to the union of level cells `base` (pairs
    /// `(column, level)`, all subcolumns included).
    pub fn first_return_map(&self, base: &[(usize, u64)]) -> Result<Vec<Return>, SystemError> {
        let mut member = vec![vec![false; self.height as usize]; self.columns.len()];
        for &(c, l) in base {
            if c >= self.columns.len() || l >= self.height {
                return Err(SystemError::InvalidPlan(alloc::format!("no level cell ({c}, {l})")));
            }
            member[c][l as usize] = true;
        }
        let cells: Vec<Cell> = self.cells().filter(|c| member[c.column][c.level as usize]).collect();
        if cells.is_empty() {
            return Err(SystemError::EmptyBaseSet);
        }
        let limit: u64 = self.columns.iter().map(|c| c.subcolumns * self.height).sum();
        let mut out = Vec::with_capacity(cells.len());
        for from in cells {
            let mut c = from;
            let mut time = 0;
            loop {
                c = self.step(c)?;
                time += 1;
                if member[c.column][c.level as usize] {
                    break;
                }
                if time > limit {
                    return Err(SystemError::NoReturn { column: from.column, sub: from.sub, level: from.level });
                }
            }
            out.push(Return { from, time, to: c, mass: self.cell_mass(from.column) });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Return {
    pub from: Cell,
    pub time: u64,
    pub to: Cell,
    pub mass: Rational,
}

/// `Σ time * mass` over the returns; equals the mass swept by the orbits.
pub fn kac_sum(returns: &[Return]) -> Rational {
    returns
        .iter()
        .fold(Rational::zero(), |acc, r| acc + r.mass * Rational::from_integer(r.time))
}

/// Level-`n` words in order of occurrence inside every top word.
fn occurrences(seq: &ConstructionSequence, n: usize) -> Result<Vec<Vec<usize>>, SystemError> {
    let spacers = seq.spacers();
    let mut occ: Vec<Vec<usize>> = (0..seq.levels[n].words.len()).map(|i| vec![i]).collect();
    for k in n..seq.levels.len() - 1 {
        let lower = &seq.levels[k];
        let mut next = Vec::with_capacity(seq.levels[k + 1].words.len());
        let mut total = 0usize;
        for (wi, w) in seq.levels[k + 1].words.iter().enumerate() {
            let pieces = decompose(lower, w, spacers).map_err(|pos| {
                SystemError::InvalidSequence(alloc::format!(
                    "level {} word {wi} does not decompose at {pos}",
                    k + 1
                ))
            })?;
            let mut list = Vec::new();
            for p in pieces {
                if let Piece::Word(i) = p {
                    total += occ[i].len();
                    if total > MAX_PLAN_SLOTS {
                        return Err(SystemError::TooLarge(alloc::format!(
                            "more than {MAX_PLAN_SLOTS} level-{n} words in the top level"
                        )));
                    }
                    list.extend_from_slice(&occ[i]);
                }
            }
            next.push(list);
        }
        occ = next;
    }
    Ok(occ)
}

/// The level-`n` tower of `seq`, normalized so the top level has mass 1.
/// Each column is cut into one subcolumn per occurrence of its word in the
/// top words, and the default plan stacks them in reading order, wrapping
/// around. Spacers added above level `n` are skipped, so the tower map is the
/// return map of the top tower to the level-`n` tower.
pub fn build_tower(seq: &ConstructionSequence, n: usize) -> Result<TowerSystem, SystemError> {
    seq.validate().map_err(|e| SystemError::InvalidSequence(alloc::format!("{e}")))?;
    let level = seq
        .level(n)
        .ok_or_else(|| SystemError::InvalidSequence(alloc::format!("level {n} is not built")))?;
    let top = seq.top();
    let denom = (top.words.len() as u64).checked_mul(top.h).ok_or(SystemError::Overflow)?;
    let occ = occurrences(seq, n)?;
    let mut counts = vec![0u64; level.words.len()];
    let mut order = Vec::new();
    for list in &occ {
        for &i in list {
            order.push((i, counts[i]));
            counts[i] += 1;
        }
    }
    if counts.contains(&0) {
        return Err(SystemError::InvalidSequence(alloc::format!(
            "some level-{n} word never occurs in the top level"
        )));
    }
    let columns = level
        .words
        .iter()
        .zip(&counts)
        .map(|(w, &c)| Column { word: w.clone(), width: Rational::new(c, denom), subcolumns: c })
        .collect();
    TowerSystem::new(n, columns, StackingPlan { order, wrap: true })
}

/// `∏_{k=n}^{top-1} (1 + δ_k)^{-1}`: the mass of the level-`n` tower when the
/// top tower has mass 1.
pub fn expected_mass(seq: &ConstructionSequence, n: usize) -> Rational {
    seq.levels[n..seq.levels.len() - 1]
        .iter()
        .filter_map(|l| l.params.as_ref())
        .fold(Rational::one(), |acc, p| acc / (Rational::one() + p.delta))
}

/// `(column, level)`, standing for all subcolumns at once.
pub type LevelCell = (usize, u64);

/// Level cells of the level-`n+1` tower where an `n`-word starts (`all`)
/// and where an `n`-word starts a new block of `l` repetitions (`first`).
pub fn repetition_cells(
    seq: &ConstructionSequence,
    n: usize,
) -> Result<(Vec<LevelCell>, Vec<LevelCell>), SystemError> {
    let lower = seq
        .level(n)
        .ok_or_else(|| SystemError::InvalidSequence(alloc::format!("level {n} is not built")))?;
    let upper = seq
        .level(n + 1)
        .ok_or_else(|| SystemError::InvalidSequence(alloc::format!("level {} is not built", n + 1)))?;
    let l = lower.params.as_ref().map(|p| p.l).unwrap_or(1);
    let mut all = Vec::new();
    let mut first = Vec::new();
    for (wi, w) in upper.words.iter().enumerate() {
        let pieces = decompose(lower, w, seq.spacers())
            .map_err(|pos| SystemError::InvalidSequence(alloc::format!("word {wi} stuck at {pos}")))?;
        let mut pos = 0u64;
        let mut prev: Option<usize> = None;
        let mut run = 0u64;
        for p in pieces {
            match p {
                Piece::Word(i) => {
                    run = if prev == Some(i) { run + 1 } else { 0 };
                    all.push((wi, pos));
                    if run.is_multiple_of(l) {
                        first.push((wi, pos));
                    }
                    prev = Some(i);
                    pos += lower.h;
                }
                Piece::Spacers(c) => {
                    prev = None;
                    pos += c;
                }
            }
        }
    }
    Ok((all, first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{Alphabet, LevelPlan};

    fn two_letter() -> ConstructionSequence {
        ConstructionSequence::new(Alphabet::letters(2), false).unwrap()
    }

    fn aabb() -> ConstructionSequence {
        let plan = LevelPlan { f: 2, l: 2, delta: Rational::zero(), words: vec![vec![(0, 2), (1, 2)]] };
        two_letter().build_next_level(&plan).unwrap().sequence
    }

    #[test]
    fn level_zero_tower() {
        let t = build_tower(&two_letter(), 0).unwrap();
        assert_eq!(t.column_count(), 2);
        assert_eq!(t.height, 1);
        assert!(t.columns.iter().all(|c| c.width == Rational::new(1, 2)));
    }

    #[test]
    fn aabb_tower() {
        let seq = aabb();
        let t = build_tower(&seq, 1).unwrap();
        assert_eq!((t.column_count(), t.height), (1, 4));
        assert_eq!(t.columns[0].width, Rational::new(1, 4));
        let below = build_tower(&seq, 0).unwrap();
        assert_eq!(below.total_mass(), Rational::one());
        // Reading the level-0 tower from its plan start spells the top word.
        let name = below.orbit_name(below.bottom_of_plan().unwrap(), 4).unwrap();
        assert_eq!(name, seq.top().words[0]);
    }

    #[test]
    fn names_and_returns() {
        let t = build_tower(&aabb(), 1).unwrap();
        let bottom = Cell { column: 0, sub: 0, level: 0 };
        assert_eq!(t.name_of_point(Cell { level: 2, ..bottom }, 0).unwrap(), Word::from_ids(&[1]));
        assert_eq!(t.orbit_name(bottom, 4).unwrap(), Word::from_ids(&[0, 0, 1, 1]));
        let r = t.first_return_map(&[(0, 0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].time, 4);
        let whole: Vec<(usize, u64)> = (0..4).map(|l| (0, l)).collect();
        let r = t.first_return_map(&whole).unwrap();
        assert!(r.iter().all(|x| x.time == 1 && t.step(x.from).unwrap() == x.to));
        assert_eq!(kac_sum(&r), t.total_mass());
    }

    #[test]
    fn partial_plan_escapes() {
        let col = Column { word: Word::from_ids(&[0, 1]), width: Rational::new(1, 4), subcolumns: 2 };
        let plan = StackingPlan { order: vec![(0, 1), (0, 0)], wrap: false };
        let t = TowerSystem::new(0, vec![col], plan).unwrap();
        let top = Cell { column: 0, sub: 0, level: 1 };
        assert!(matches!(t.step(top), Err(SystemError::Escape { .. })));
        assert_eq!(t.step(Cell { sub: 1, ..top }).unwrap(), Cell { column: 0, sub: 0, level: 0 });
        assert!(t.name_of_point(Cell { column: 0, sub: 1, level: 0 }, 1).is_err());
        assert!(matches!(t.first_return_map(&[(0, 0)]), Err(SystemError::Escape { .. })));
    }

    #[test]
    fn bad_plans_rejected() {
        let col = Column { word: Word::from_ids(&[0]), width: Rational::one(), subcolumns: 1 };
        let twice = StackingPlan { order: vec![(0, 0), (0, 0)], wrap: true };
        assert!(TowerSystem::new(0, vec![col.clone()], twice).is_err());
        let missing = StackingPlan { order: vec![(0, 3)], wrap: true };
        assert!(TowerSystem::new(0, vec![col], missing).is_err());
    }

    #[test]
    fn repetition_markers() {
        let (all, first) = repetition_cells(&aabb(), 0).unwrap();
        assert_eq!(all, vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
        assert_eq!(first, vec![(0, 0), (0, 2)]);
    }
}
