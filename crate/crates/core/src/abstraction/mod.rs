//! Relating an abstract component to a concrete one: input/output relations,
//! Galois connections between their histories, and concretizers.

mod concretize;
mod galois;
mod relation;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub use concretize::{
    check_finv_in_g, concretize, ConcretizeError, ConcretizerSpec, FinvOutcome, ParamBinding, ParamDecl, ParamKind, ParamValue,
};
pub use galois::{
    abstract_output, apply_f, build_output_checker, derive_output_relation, g_member, output_checker_relation, verify_galois,
    AbstractionFn, AbstractionMap, GaloisCounterexample, GaloisError, GaloisOptions, GaloisOutcome, GaloisSpec, MemberClause, Orientation,
    Universe,
};
pub use relation::{eval_relation, fold_verdicts, CheckerRef, PairRef, RelationError, RelationEval, RelationForm, RelationSpec};

use crate::component::{run, ComponentSpec, SimOptions};
use crate::stream::ChannelHistory;
use crate::testing::TestInput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Input,
    Output,
}

/// Which of the two components a channel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Abstract,
    Concrete,
}

impl Level {
    /// `a` or `c`, as used in qualified names like `a.AccState`.
    pub fn prefix(self) -> &'static str {
        match self {
            Level::Abstract => "a",
            Level::Concrete => "c",
        }
    }
}

pub fn qualified(level: Level, channel: &str) -> String {
    alloc::format!("{}.{}", level.prefix(), channel)
}

/// Outcome of running an abstract and a concrete test side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceResult {
    pub ri_holds: bool,
    pub ri_per_tick: Vec<bool>,
    /// `None` if either run or the RO evaluation failed.
    pub ro_holds: Option<bool>,
    /// Per-tick RO verdicts, empty when `ro_holds` is `None`.
    pub witness: Vec<bool>,
    /// `¬RI ∨ RO`; `None` when RI holds and RO could not be decided.
    pub corresponding: Option<bool>,
    pub abstract_output: Option<ChannelHistory>,
    pub concrete_output: Option<ChannelHistory>,
    pub diagnostics: Vec<String>,
}

/// Checks whether concrete input `tc` corresponds to abstract input `ta`
/// and, if so, whether the outputs of both runs are related by `ro`.
pub fn check_correspondence(
    spec_a: &ComponentSpec,
    spec_c: &ComponentSpec,
    ri: &RelationSpec,
    ro: &RelationSpec,
    ta: &TestInput,
    tc: &TestInput,
    opts: SimOptions,
) -> CorrespondenceResult {
    let mut res = CorrespondenceResult {
        ri_holds: false,
        ri_per_tick: Vec::new(),
        ro_holds: None,
        witness: Vec::new(),
        corresponding: None,
        abstract_output: None,
        concrete_output: None,
        diagnostics: Vec::new(),
    };
    match eval_relation(ri, &ta.bindings, &tc.bindings, opts) {
        Ok(ev) => {
            res.ri_holds = ev.holds;
            res.ri_per_tick = ev.per_tick;
        }
        Err(e) => {
            res.diagnostics.push(alloc::format!("input relation `{}`: {e}", ri.name));
            return res;
        }
    }
    if !res.ri_holds {
        res.diagnostics.push(alloc::format!(
            "input relation `{}` does not hold; correspondence holds vacuously",
            ri.name
        ));
        res.corresponding = Some(true);
    }
    let n = ta.horizon();
    let ya = run(spec_a, &ta.bindings, n, opts).map_err(|e| alloc::format!("abstract run: {e}"));
    let yc = run(spec_c, &tc.bindings, tc.horizon(), opts).map_err(|e| alloc::format!("concrete run: {e}"));
    match (ya, yc) {
        (Ok(ya), Ok(yc)) => {
            match eval_relation(ro, &ya, &yc, opts) {
                Ok(ev) => {
                    res.ro_holds = Some(ev.holds);
                    res.witness = ev.per_tick;
                    if res.ri_holds {
                        res.corresponding = Some(ev.holds);
                    }
                }
                Err(e) => res.diagnostics.push(alloc::format!("output relation `{}`: {e}", ro.name)),
            }
            res.abstract_output = Some(ya);
            res.concrete_output = Some(yc);
        }
        (ya, yc) => {
            for e in [ya.err(), yc.err()].into_iter().flatten() {
                res.diagnostics.push(e.to_string());
            }
        }
    }
    res
}
