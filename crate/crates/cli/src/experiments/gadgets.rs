use kakutani_core::trees::{generate_gadget, GadgetKind};
use kakutani_core::words::{build_from_tree_plan, check_a1, check_a2, check_a4, derive_parameters_from_tree};
use kakutani_core::Tree;

use super::{Check, Context, Experiment, Outcome, Table};
use crate::config::{Mode, ParamKind, ParamSpec};
use crate::ExperimentError;

pub static EXPERIMENT: Experiment = Experiment {
    id: "exp-tree-gadgets",
    description: "Tree gadgets: encodings round-trip and the derived construction sequences satisfy (A1)-(A4)",
    modes: &[Mode::Rational],
    params: &[
        ParamSpec { name: "depths", kind: ParamKind::IntList { min: 1, max: 12 }, default: "[2, 3, 4]", doc: "gadget depths" },
        ParamSpec {
            name: "kinds",
            kind: ParamKind::TextList,
            default: "[\"deep-branch\", \"bounded-branch\"]",
            doc: "gadget kinds",
        },
        ParamSpec { name: "levels", kind: ParamKind::Int { min: 1, max: 3 }, default: "2", doc: "construction levels built from each plan" },
        ParamSpec { name: "t", kind: ParamKind::Int { min: 1, max: 4 }, default: "1", doc: "T of the level plans" },
    ],
    run,
};

fn kind_of(name: &str) -> Result<GadgetKind, ExperimentError> {
    serde_json::from_value(serde_json::Value::String(name.to_owned()))
        .map_err(|_| ExperimentError::Schema(format!("unknown gadget kind `{name}`")))
}

fn round_trips(tree: &Tree) -> Result<bool, ExperimentError> {
    let text = Tree::from_text(&tree.to_text()).map_err(ExperimentError::failed)? == *tree;
    let bound = tree.max_entry().unwrap_or(0);
    let span = tree.enumeration_span(bound).map_err(ExperimentError::failed)?;
    let bits = tree.encode_enumeration(span, bound).map_err(ExperimentError::failed)?;
    let enumeration = Tree::decode_enumeration(&bits, bound).map_err(ExperimentError::failed)? == *tree;
    Ok(text && enumeration)
}

fn run(ctx: &Context) -> Result<Outcome, ExperimentError> {
    let p = &ctx.params;
    let levels = p.uint("levels") as usize;
    let t = p.uint("t");
    let mut table = Table::new(&["kind", "depth", "nodes", "max_branch", "level", "h", "a1", "a2", "a3", "a4"]);
    let (mut encoding_fail, mut shape_fail, mut spec_fail, mut a3_fail) = (0u64, 0u64, 0u64, 0u64);
    for name in p.texts("kinds") {
        let kind = kind_of(&name)?;
        for &depth in &p.ints("depths") {
            let depth = depth as usize;
            let tree = generate_gadget(kind, depth, ctx.seed ^ depth as u64);
            encoding_fail += u64::from(!tree.validate() || !round_trips(&tree)?);
            let branch = tree.max_branch_length().map_err(ExperimentError::failed)?;
            let shape_ok = match kind {
                GadgetKind::DeepBranch => branch >= depth,
                GadgetKind::BoundedBranch => branch < depth,
            };
            shape_fail += u64::from(!shape_ok);
            let plan = derive_parameters_from_tree(&tree, levels);
            let (seq, readable) = build_from_tree_plan(&plan, t).map_err(ExperimentError::failed)?;
            for n in 1..seq.levels.len() {
                let (lower, upper) = (&seq.levels[n - 1], &seq.levels[n]);
                let a1 = check_a1(upper);
                let a2 = check_a2(lower, upper, None).map_err(ExperimentError::failed)?;
                let a4 = check_a4(lower, upper, None).map_err(ExperimentError::failed)?;
                let a3 = readable[n - 1];
                spec_fail += u64::from(!(a1 && a2 && a4));
                a3_fail += u64::from(!a3);
                table.push([
                    name.clone(),
                    depth.to_string(),
                    tree.len().to_string(),
                    branch.to_string(),
                    n.to_string(),
                    upper.h.to_string(),
                    a1.to_string(),
                    a2.to_string(),
                    a3.to_string(),
                    a4.to_string(),
                ]);
            }
        }
    }
    let mut out = Outcome { table, ..Default::default() };
    out.checks.push(Check::new("encodings", encoding_fail == 0, format!("{encoding_fail} failed round trips")));
    out.checks.push(Check::new("branch-lengths", shape_fail == 0, format!("{shape_fail} gadgets of the wrong shape")));
    out.checks.push(Check::new("a1-a2-a4", spec_fail == 0, format!("{spec_fail} failing levels")));
    out.checks.push(Check::new("a3", a3_fail == 0, format!("{a3_fail} levels not uniquely readable")));
    Ok(out)
}
