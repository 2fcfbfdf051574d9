use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::tower::{Cell, SystemError, TowerSystem};
use crate::words::{Symbol, Word};
use crate::Rational;

/// Integer roof over a tower, constant on the declared pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IntegerRoof {
    Constant { value: u64 },
    /// Value by label; labels not listed get `default`.
    BySymbol { values: Vec<(Symbol, u64)>, default: u64 },
    ByColumn { values: Vec<u64> },
}

impl IntegerRoof {
    fn at(&self, tower: &TowerSystem, cell: Cell) -> u64 {
        match self {
            IntegerRoof::Constant { value } => *value,
            IntegerRoof::BySymbol { values, default } => {
                let s = tower.label(cell);
                values.iter().find(|(t, _)| *t == s).map(|&(_, v)| v).unwrap_or(*default)
            }
            IntegerRoof::ByColumn { values } => values[cell.column],
        }
    }

    fn values(&self) -> Vec<u64> {
        match self {
            IntegerRoof::Constant { value } => alloc::vec![*value],
            IntegerRoof::BySymbol { values, default } => {
                values.iter().map(|&(_, v)| v).chain(core::iter::once(*default)).collect()
            }
            IntegerRoof::ByColumn { values } => values.clone(),
        }
    }
}

/// A point `(x, j)` with `0 <= j < f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoofPoint {
    pub cell: Cell,
    pub height: u64,
}

/// The tower `T^f` over a tower system: climb `f(x)` floors, then move by
/// the base map. Floors above the ground carry `filler` when one is given,
/// otherwise the base label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoofTower {
    pub base: TowerSystem,
    pub roof: IntegerRoof,
    pub filler: Option<Symbol>,
}

/// Summary of a simulated orbit of a roof tower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofRun {
    pub steps: u64,
    /// Completed passes through a base column.
    pub blocks: u64,
    pub mean_block_length: f64,
    /// `mean_block_length / h`.
    pub block_ratio: f64,
}

impl RoofTower {
    pub fn new(base: TowerSystem, roof: IntegerRoof, filler: Option<Symbol>) -> Result<Self, SystemError> {
        if let IntegerRoof::ByColumn { values } = &roof {
            if values.len() != base.column_count() {
                return Err(SystemError::InvalidPlan("one roof value per column is required".into()));
            }
        }
        if roof.values().contains(&0) {
            return Err(SystemError::InvalidPlan("the roof must be at least 1".into()));
        }
        Ok(RoofTower { base, roof, filler })
    }

    pub fn is_trivial(&self) -> bool {
        self.roof.values().iter().all(|&v| v == 1)
    }

    pub fn roof_at(&self, cell: Cell) -> u64 {
        self.roof.at(&self.base, cell)
    }

    pub fn step(&self, p: RoofPoint) -> Result<RoofPoint, SystemError> {
        if p.height + 1 < self.roof_at(p.cell) {
            Ok(RoofPoint { height: p.height + 1, ..p })
        } else {
            Ok(RoofPoint { cell: self.base.step(p.cell)?, height: 0 })
        }
    }

    pub fn label(&self, p: RoofPoint) -> Symbol {
        match self.filler {
            Some(s) if p.height > 0 => s,
            _ => self.base.label(p.cell),
        }
    }

    pub fn orbit_name(&self, start: RoofPoint, steps: u64) -> Result<Word, SystemError> {
        let mut w = Word::empty();
        let mut p = start;
        for i in 0..steps {
            w.push(self.label(p), 1);
            if i + 1 < steps {
                p = self.step(p)?;
            }
        }
        Ok(w)
    }

    /// `∫ f` with respect to the normalized base measure.
    pub fn integral(&self) -> Rational {
        let mut num = Rational::zero();
        for (ci, c) in self.base.columns.iter().enumerate() {
            let mut along = 0u64;
            for level in 0..self.base.height {
                along += self.roof_at(Cell { column: ci, sub: 0, level });
            }
            num += c.width * Rational::from_integer(along);
        }
        num / self.base.total_mass()
    }

    /// Runs `steps` steps from the ground floor of `start` and measures the
    /// length of the passes through whole base columns.
    pub fn simulate(&self, start: Cell, steps: u64) -> Result<RoofRun, SystemError> {
        let mut p = RoofPoint { cell: start, height: 0 };
        let mut first = None;
        let mut last = 0u64;
        let mut starts = 0u64;
        for t in 0..steps {
            if p.height == 0 && p.cell.level == 0 {
                first.get_or_insert(t);
                last = t;
                starts += 1;
            }
            p = self.step(p)?;
        }
        let blocks = starts.saturating_sub(1);
        let mean = match first {
            Some(f) if blocks > 0 => (last - f) as f64 / blocks as f64,
            _ => 0.0,
        };
        Ok(RoofRun {
            steps,
            blocks,
            mean_block_length: mean,
            block_ratio: mean / self.base.height as f64,
        })
    }
}
