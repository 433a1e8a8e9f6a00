//! The well-quasi-order on runs and its constructive consequences: embedding
//! search, domination pairs in finite run samples, run amalgamation, and
//! pumping.
//!
//! A run embeds into a longer run when a strictly increasing index sequence
//! matches each step to a step with the same transition index and pointwise
//! dominating configurations. The target-anchored variant pins the last match
//! to the last step of the larger run (so targets compare); the
//! source-anchored variant pins the first match to the first step (so sources
//! compare).

use num::{BigInt, BigUint};
use thiserror::Error;

use crate::vass::{
    add_effect, validate_run, AnchoredTransition, Configuration, Run, TransId, Vass,
};

/// Which end of the runs an embedding is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    TargetAnchored,
    SourceAnchored,
}

/// A witness that one run embeds into another: the matched positions in the
/// larger run, zero-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunEmbedding {
    pub indices: Vec<usize>,
    pub anchor: Anchor,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WqoError {
    #[error("prerequisite violated: {0}")]
    PrerequisiteViolated(String),
    #[error("splice produced an invalid run at step {0}")]
    SpliceInvalid(usize),
}

/// Pointwise order on configurations: same state and every counter no larger.
pub fn config_leq(c1: &Configuration, c2: &Configuration) -> bool {
    c1.state == c2.state
        && c1.vec.len() == c2.vec.len()
        && c1.vec.iter().zip(&c2.vec).all(|(a, b)| a <= b)
}

fn step_leq(a: &AnchoredTransition, b: &AnchoredTransition) -> bool {
    a.trans == b.trans && config_leq(&a.src, &b.src) && config_leq(&a.trg, &b.trg)
}

/// Finds an embedding of `small` into `large`, or `None`.
///
/// Greedy matching is complete here: configuration dominance is upward closed
/// along a fixed transition sequence, so for the target-anchored variant the
/// rightmost choice at every position never blocks an earlier match, and
/// symmetrically for the source-anchored variant. The result is the unique
/// greedy witness, which makes downstream splices deterministic.
pub fn find_embedding(small: &Run, large: &Run, anchor: Anchor) -> Option<RunEmbedding> {
    let k = small.len();
    let l = large.len();
    if k > l {
        return None;
    }
    let s = small.steps();
    let g = large.steps();
    match anchor {
        Anchor::TargetAnchored => {
            let mut indices = vec![0usize; k];
            // last match is pinned to the last step
            if !step_leq(&s[k - 1], &g[l - 1]) {
                return None;
            }
            indices[k - 1] = l - 1;
            let mut upper = l - 1;
            for j in (0..k - 1).rev() {
                let mut found = None;
                for i in (j..upper).rev() {
                    if step_leq(&s[j], &g[i]) {
                        found = Some(i);
                        break;
                    }
                }
                match found {
                    Some(i) => {
                        indices[j] = i;
                        upper = i;
                    }
                    None => return None,
                }
            }
            Some(RunEmbedding { indices, anchor })
        }
        Anchor::SourceAnchored => {
            let mut indices = vec![0usize; k];
            if !step_leq(&s[0], &g[0]) {
                return None;
            }
            indices[0] = 0;
            let mut lower = 0usize;
            for j in 1..k {
                let mut found = None;
                for (i, step) in g.iter().enumerate().take(l).skip(lower + 1) {
                    if step_leq(&s[j], step) {
                        found = Some(i);
                        break;
                    }
                }
                match found {
                    Some(i) => {
                        indices[j] = i;
                        lower = i;
                    }
                    None => return None,
                }
            }
            Some(RunEmbedding { indices, anchor })
        }
    }
}

fn check_embedding(small: &Run, large: &Run, emb: &RunEmbedding, anchor: Anchor) -> bool {
    if emb.anchor != anchor || emb.indices.len() != small.len() {
        return false;
    }
    let mut prev: Option<usize> = None;
    for (j, &i) in emb.indices.iter().enumerate() {
        if i >= large.len() || prev.is_some_and(|p| i <= p) {
            return false;
        }
        if !step_leq(&small.steps()[j], &large.steps()[i]) {
            return false;
        }
        prev = Some(i);
    }
    match anchor {
        Anchor::TargetAnchored => emb.indices.last() == Some(&(large.len() - 1)),
        Anchor::SourceAnchored => emb.indices.first() == Some(&0),
    }
}

/// Scans an ordered finite list of runs for a dominated pair `(i, j)` with
/// `i < j` and `runs[i]` embedding into `runs[j]`; returns the smallest such
/// pair ordered by `j`, then `i`. Over any infinite sequence with a common
/// source (target-anchored) or target (source-anchored) such a pair must
/// exist; on a finite list there may be none.
pub fn find_domination(runs: &[Run], anchor: Anchor) -> Result<Option<(usize, usize)>, WqoError> {
    match anchor {
        Anchor::TargetAnchored => {
            if runs.windows(2).any(|w| w[0].source() != w[1].source()) {
                return Err(WqoError::PrerequisiteViolated("runs must share their source".into()));
            }
        }
        Anchor::SourceAnchored => {
            if runs.windows(2).any(|w| w[0].target() != w[1].target()) {
                return Err(WqoError::PrerequisiteViolated("runs must share their target".into()));
            }
        }
    }
    for j in 1..runs.len() {
        for i in 0..j {
            if find_embedding(&runs[i], &runs[j], anchor).is_some() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

fn target_surplus(base: &Run, bigger: &Run) -> Result<Vec<BigUint>, WqoError> {
    let bt = base.target();
    let gt = bigger.target();
    if bt.state != gt.state || bt.vec.len() != gt.vec.len() {
        return Err(WqoError::PrerequisiteViolated("targets must share a state".into()));
    }
    let mut delta = Vec::with_capacity(bt.vec.len());
    for (a, b) in bt.vec.iter().zip(&gt.vec) {
        if b < a {
            return Err(WqoError::PrerequisiteViolated("target surplus must be nonnegative".into()));
        }
        delta.push(b - a);
    }
    Ok(delta)
}

/// Combines two runs that both dominate `base` (target-anchored, same source)
/// into one run whose target carries both surpluses.
///
/// The construction interleaves, for every matched position of `base`, first
/// the excess block of `r1` and then the excess block of `r2` ahead of the
/// matched step. Both blocks are fireable there: each starts at a point that
/// dominates the configuration it was anchored at in its own run, and VASS
/// steps are monotone in the counters. The result is replayed and validated;
/// a failed replay is reported, never silently accepted.
pub fn amalgamate(
    vass: &Vass,
    base: &Run,
    r1: &Run,
    r2: &Run,
    emb1: &RunEmbedding,
    emb2: &RunEmbedding,
) -> Result<Run, WqoError> {
    if base.source() != r1.source() || base.source() != r2.source() {
        return Err(WqoError::PrerequisiteViolated("all runs must share their source".into()));
    }
    if !check_embedding(base, r1, emb1, Anchor::TargetAnchored) {
        return Err(WqoError::PrerequisiteViolated("emb1 is not a target-anchored embedding".into()));
    }
    if !check_embedding(base, r2, emb2, Anchor::TargetAnchored) {
        return Err(WqoError::PrerequisiteViolated("emb2 is not a target-anchored embedding".into()));
    }
    let d1 = target_surplus(base, r1)?;
    let d2 = target_surplus(base, r2)?;

    let mut indices: Vec<TransId> = Vec::new();
    let mut prev1 = 0usize;
    let mut prev2 = 0usize;
    for j in 0..base.len() {
        let m1 = emb1.indices[j];
        let m2 = emb2.indices[j];
        for step in &r1.steps()[prev1..m1] {
            indices.push(step.trans);
        }
        for step in &r2.steps()[prev2..m2] {
            indices.push(step.trans);
        }
        indices.push(base.steps()[j].trans);
        prev1 = m1 + 1;
        prev2 = m2 + 1;
    }

    let combined = Run::replay(vass, base.source().clone(), &indices)
        .map_err(|_| WqoError::SpliceInvalid(0))?;
    validate_run(vass, &combined).map_err(|v| WqoError::SpliceInvalid(v.index))?;

    let expected = add_effect(
        &base.target().vec,
        &d1.iter().zip(&d2).map(|(a, b)| BigInt::from(a + b)).collect::<Vec<_>>(),
    )
    .expect("sum of nonnegative vectors");
    if combined.target().state != base.target().state || combined.target().vec != expected {
        return Err(WqoError::SpliceInvalid(combined.len()));
    }
    Ok(combined)
}

/// Iterated amalgamation: from `base` embedded in `bigger` with target
/// surplus `delta`, builds a run from the same source whose target is
/// `trg(base) + n * delta`.
pub fn pump_run(
    vass: &Vass,
    base: &Run,
    bigger: &Run,
    emb: &RunEmbedding,
    n: usize,
) -> Result<Run, WqoError> {
    if base.source() != bigger.source() {
        return Err(WqoError::PrerequisiteViolated("runs must share their source".into()));
    }
    if !check_embedding(base, bigger, emb, Anchor::TargetAnchored) {
        return Err(WqoError::PrerequisiteViolated("not a target-anchored embedding".into()));
    }
    target_surplus(base, bigger)?;
    match n {
        0 => Ok(base.clone()),
        1 => Ok(bigger.clone()),
        _ => {
            let mut acc = bigger.clone();
            for _ in 2..=n {
                let emb_acc = find_embedding(base, &acc, Anchor::TargetAnchored).ok_or_else(|| {
                    WqoError::PrerequisiteViolated("pumped run lost the base embedding".into())
                })?;
                acc = amalgamate(vass, base, &acc, bigger, &emb_acc, emb)?;
            }
            Ok(acc)
        }
    }
}
