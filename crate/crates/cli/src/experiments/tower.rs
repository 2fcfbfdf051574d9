use std::collections::HashSet;

use kakutani_core::feldman::{level_plan, PatternType};
use kakutani_core::systems::{build_tower, expected_mass, kac_sum, IntegerRoof, RoofPoint, RoofTower, TowerSystem};
use kakutani_core::words::ConstructionSequence;
use kakutani_core::{Alphabet, Rational, Symbol};

use super::{num, Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-tower-roof",
    description: "Cutting-and-stacking tower: mass, Kac identity, and block stretch under a piecewise-constant roof",
    modes: &[Mode::Rational],
    params: &[
        ParamSpec { name: "steps", kind: ParamKind::Int { min: 1, max: 1_000_000_000 }, default: "100000", doc: "roof-tower steps" },
        ParamSpec { name: "roof_a", kind: ParamKind::Int { min: 1, max: 1000 }, default: "1", doc: "roof over label a" },
        ParamSpec { name: "roof_b", kind: ParamKind::Int { min: 1, max: 1000 }, default: "2", doc: "roof over label b" },
        ParamSpec { name: "t", kind: ParamKind::Int { min: 1, max: 4 }, default: "1", doc: "T of the level plans" },
        ParamSpec { name: "tolerance", kind: ParamKind::Float { min: 0.0, max: 1.0 }, default: "0.05", doc: "relative tolerance on the block ratio" },
    ],
    run,
};

/// Two letters, two passages, each built from the pattern types
/// `(1, 2, 3)` and `(3, 2, 1)`.
pub fn demo_sequence(t: u64) -> Result<ConstructionSequence, ExperimentError> {
    let pi = PatternType(vec![1, 2, 3]);
    let types = [pi.reversed(), pi];
    let mut seq = ConstructionSequence::new(Alphabet::letters(2), false).map_err(ExperimentError::failed)?;
    for _ in 0..2 {
        let plan = level_plan(seq.top().words.len(), t, 3, &types, Rational::from_integer(0)).map_err(ExperimentError::failed)?;
        seq = seq.build_next_level(&plan).map_err(ExperimentError::failed)?.sequence;
    }
    Ok(seq)
}

/// The cell map is a bijection, so one step carries the total mass onto itself.
fn step_preserves_mass(tower: &TowerSystem) -> Result<bool, ExperimentError> {
    let mut images = HashSet::new();
    let mut before = Rational::from_integer(0);
    let mut after = Rational::from_integer(0);
    for c in tower.cells() {
        let d = tower.step(c).map_err(ExperimentError::failed)?;
        before += tower.cell_mass(c.column);
        if images.insert(d) {
            after += tower.cell_mass(d.column);
        }
    }
    Ok(before == after && before == tower.total_mass())
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let seq = demo_sequence(p.uint("t"))?;
    let tower = build_tower(&seq, 1).map_err(ExperimentError::failed)?;
    let mut out = Outcome::default();

    let mass_ok = tower.total_mass() == expected_mass(&seq, 1);
    out.checks.push(Check::new("mass", mass_ok, format!("total mass {}", tower.total_mass())));
    out.checks.push(Check::new("step-preserves-mass", step_preserves_mass(&tower)?, "one tower step".into()));

    let bases: Vec<Vec<(usize, u64)>> = vec![
        (0..tower.column_count()).map(|c| (c, 0)).collect(),
        vec![(0, 5), (1, tower.height / 2)],
    ];
    let mut kac_ok = true;
    for base in &bases {
        let returns = tower.first_return_map(base).map_err(ExperimentError::failed)?;
        kac_ok &= kac_sum(&returns) == tower.total_mass();
    }
    out.checks.push(Check::new("kac", kac_ok, format!("{} base sets", bases.len())));

    let start = tower.bottom_of_plan().expect("plan is nonempty");
    let trivial = RoofTower::new(tower.clone(), IntegerRoof::Constant { value: 1 }, None).map_err(ExperimentError::failed)?;
    let same = trivial.orbit_name(RoofPoint { cell: start, height: 0 }, 10_000).map_err(ExperimentError::failed)?
        == tower.orbit_name(start, 10_000).map_err(ExperimentError::failed)?;
    out.checks.push(Check::new("trivial-roof-names", same, "10000 steps".into()));

    let (fa, fb) = (p.uint("roof_a"), p.uint("roof_b"));
    let roof = IntegerRoof::BySymbol { values: vec![(Symbol(0), fa), (Symbol(1), fb)], default: 1 };
    let rt = RoofTower::new(tower.clone(), roof, None).map_err(ExperimentError::failed)?;
    let integral = rt.integral();
    let target = *integral.numer() as f64 / *integral.denom() as f64;
    let sim = rt.simulate(start, p.uint("steps")).map_err(ExperimentError::failed)?;
    let tol = p.float("tolerance");
    let ok = sim.blocks > 0 && (sim.block_ratio - target).abs() <= tol * target;
    out.checks.push(Check::new(
        "block-ratio",
        ok,
        format!("ratio {} vs integral {integral} over {} blocks", sim.block_ratio, sim.blocks),
    ));

    let mut table = Table::new(&["level", "height", "columns", "total_mass", "roof_integral", "steps", "blocks", "block_ratio"]);
    table.push([
        "1".into(),
        tower.height.to_string(),
        tower.column_count().to_string(),
        tower.total_mass().to_string(),
        integral.to_string(),
        sim.steps.to_string(),
        sim.blocks.to_string(),
        sim.block_ratio.to_string(),
    ]);
    out.table = table;
    out.summary.insert("block_ratio".into(), num(sim.block_ratio));
    out.summary.insert("roof_integral".into(), integral.to_string().into());
    Ok(out)
}
