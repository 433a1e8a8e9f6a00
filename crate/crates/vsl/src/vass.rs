//! Exact data model for vector addition systems with states: configurations,
//! anchored transitions, runs, single-step firing and run replay.
//!
//! Counter values are arbitrary-precision nonnegative integers and transition
//! effects are arbitrary-precision signed integers, so generated families with
//! fast-growing counters never overflow.

use std::collections::HashMap;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigUint, Zero};
use thiserror::Error;

/// Index of a state in its [`Vass`]. State identifiers are interned strings
/// with stable indices, so indices survive round-trips through the text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of a transition in its [`Vass`]. Runs reference transitions by index
/// and transition equality in the run order is index equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub src: StateId,
    pub effect: Vec<BigInt>,
    pub dst: StateId,
}

/// A vector addition system with states: a finite state set plus a finite
/// indexed list of transitions carrying signed integer effect vectors.
/// Immutable after construction; all operations take `&self`.
#[derive(Debug, Clone)]
pub struct Vass {
    dim: usize,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    transitions: Vec<Transition>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VassError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    BadStateId(usize),
    #[error("effect vector has length {got}, expected {want}")]
    EffectLength { got: usize, want: usize },
    #[error("run must contain at least one step")]
    EmptyRun,
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Why a single firing attempt was rejected.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FireError {
    #[error("transition index {0} out of range")]
    BadTransition(usize),
    #[error("configuration is in the wrong state for this transition")]
    WrongState,
    #[error("counter {0} would become negative")]
    NegativeCounter(usize),
    #[error("configuration vector has length {got}, expected {want}")]
    DimensionMismatch { got: usize, want: usize },
}

impl Vass {
    pub fn new(dim: usize) -> Result<Vass, VassError> {
        if dim == 0 {
            return Err(VassError::ZeroDimension);
        }
        Ok(Vass { dim, names: Vec::new(), index: HashMap::new(), transitions: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_state(&mut self, name: &str) -> Result<StateId, VassError> {
        if self.index.contains_key(name) {
            return Err(VassError::DuplicateState(name.to_string()));
        }
        let id = StateId(self.names.len());
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_transition(
        &mut self,
        src: StateId,
        effect: Vec<BigInt>,
        dst: StateId,
    ) -> Result<TransId, VassError> {
        if src.0 >= self.names.len() {
            return Err(VassError::BadStateId(src.0));
        }
        if dst.0 >= self.names.len() {
            return Err(VassError::BadStateId(dst.0));
        }
        if effect.len() != self.dim {
            return Err(VassError::EffectLength { got: effect.len(), want: self.dim });
        }
        let id = TransId(self.transitions.len());
        self.transitions.push(Transition { src, effect, dst });
        Ok(id)
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.names[id.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransId) -> Option<&Transition> {
        self.transitions.get(id.0)
    }

    /// Fires transition `t` in configuration `c`: the state must match the
    /// transition source and every counter must stay nonnegative.
    pub fn fire(&self, c: &Configuration, t: TransId) -> Result<Configuration, FireError> {
        let tr = self.transitions.get(t.0).ok_or(FireError::BadTransition(t.0))?;
        if c.vec.len() != self.dim {
            return Err(FireError::DimensionMismatch { got: c.vec.len(), want: self.dim });
        }
        if c.state != tr.src {
            return Err(FireError::WrongState);
        }
        let vec = add_effect(&c.vec, &tr.effect).map_err(FireError::NegativeCounter)?;
        Ok(Configuration { state: tr.dst, vec })
    }

    /// Backward firing: the unique predecessor of `c` under `t`, when the
    /// subtracted vector stays nonnegative.
    pub fn fire_backward(&self, c: &Configuration, t: TransId) -> Result<Configuration, FireError> {
        let tr = self.transitions.get(t.0).ok_or(FireError::BadTransition(t.0))?;
        if c.vec.len() != self.dim {
            return Err(FireError::DimensionMismatch { got: c.vec.len(), want: self.dim });
        }
        if c.state != tr.dst {
            return Err(FireError::WrongState);
        }
        let vec = sub_effect(&c.vec, &tr.effect).map_err(FireError::NegativeCounter)?;
        Ok(Configuration { state: tr.src, vec })
    }

    /// Parses the plain text format: `dim D`, then `state NAME` lines, then
    /// `trans SRC DST d1 .. dD` lines. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Vass, VassError> {
        let mut vass: Option<Vass> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            match keyword {
                "dim" => {
                    if vass.is_some() {
                        return Err(VassError::Parse { line, reason: "duplicate dim line".into() });
                    }
                    let d: usize = tokens
                        .next()
                        .ok_or_else(|| VassError::Parse { line, reason: "missing dimension".into() })?
                        .parse()
                        .map_err(|_| VassError::Parse { line, reason: "bad dimension".into() })?;
                    vass = Some(Vass::new(d).map_err(|e| VassError::Parse { line, reason: e.to_string() })?);
                }
                "state" => {
                    let v = vass
                        .as_mut()
                        .ok_or_else(|| VassError::Parse { line, reason: "dim must come first".into() })?;
                    let name = tokens
                        .next()
                        .ok_or_else(|| VassError::Parse { line, reason: "missing state name".into() })?;
                    v.add_state(name).map_err(|e| VassError::Parse { line, reason: e.to_string() })?;
                }
                "trans" => {
                    let v = vass
                        .as_mut()
                        .ok_or_else(|| VassError::Parse { line, reason: "dim must come first".into() })?;
                    let src = tokens
                        .next()
                        .ok_or_else(|| VassError::Parse { line, reason: "missing source state".into() })?;
                    let dst = tokens
                        .next()
                        .ok_or_else(|| VassError::Parse { line, reason: "missing target state".into() })?;
                    let src = v
                        .state_id(src)
                        .ok_or_else(|| VassError::Parse { line, reason: format!("unknown state `{src}`") })?;
                    let dst = v
                        .state_id(dst)
                        .ok_or_else(|| VassError::Parse { line, reason: format!("unknown state `{dst}`") })?;
                    let mut effect = Vec::with_capacity(v.dim);
                    for tok in tokens {
                        let x: BigInt = tok
                            .parse()
                            .map_err(|_| VassError::Parse { line, reason: format!("bad integer `{tok}`") })?;
                        effect.push(x);
                    }
                    if effect.len() != v.dim {
                        return Err(VassError::Parse {
                            line,
                            reason: format!("effect has {} entries, expected {}", effect.len(), v.dim),
                        });
                    }
                    v.add_transition(src, effect, dst)
                        .map_err(|e| VassError::Parse { line, reason: e.to_string() })?;
                }
                other => {
                    return Err(VassError::Parse { line, reason: format!("unknown keyword `{other}`") });
                }
            }
        }
        vass.ok_or(VassError::Parse { line: 0, reason: "empty input, expected a dim line".into() })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("dim {}\n", self.dim));
        for name in &self.names {
            out.push_str(&format!("state {name}\n"));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "trans {} {}",
                self.names[t.src.0], self.names[t.dst.0]
            ));
            for x in &t.effect {
                out.push_str(&format!(" {x}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A state paired with a nonnegative counter vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub vec: Vec<BigUint>,
}

impl Configuration {
    pub fn new(state: StateId, vec: Vec<BigUint>) -> Configuration {
        Configuration { state, vec }
    }

    pub fn from_u64s(state: StateId, vals: &[u64]) -> Configuration {
        Configuration { state, vec: vals.iter().map(|&x| BigUint::from(x)).collect() }
    }

    /// Maximum coordinate value.
    pub fn norm(&self) -> BigUint {
        norm(&self.vec)
    }

    /// Renders as `NAME v1 .. vD`.
    pub fn display<'a>(&'a self, vass: &'a Vass) -> ConfigDisplay<'a> {
        ConfigDisplay { config: self, vass }
    }

    /// Parses `NAME v1 .. vD` against the states of `vass`.
    pub fn parse(vass: &Vass, text: &str) -> Result<Configuration, VassError> {
        let mut tokens = text.split_whitespace();
        let name = tokens
            .next()
            .ok_or_else(|| VassError::Parse { line: 1, reason: "missing state name".into() })?;
        let state = vass
            .state_id(name)
            .ok_or_else(|| VassError::UnknownState(name.to_string()))?;
        let mut vec = Vec::with_capacity(vass.dim());
        for tok in tokens {
            let x: BigUint = tok
                .parse()
                .map_err(|_| VassError::Parse { line: 1, reason: format!("bad counter value `{tok}`") })?;
            vec.push(x);
        }
        if vec.len() != vass.dim() {
            return Err(VassError::Parse {
                line: 1,
                reason: format!("configuration has {} counters, expected {}", vec.len(), vass.dim()),
            });
        }
        Ok(Configuration { state, vec })
    }
}

pub struct ConfigDisplay<'a> {
    config: &'a Configuration,
    vass: &'a Vass,
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.vass.state_name(self.config.state))?;
        for x in &self.config.vec {
            write!(f, " {x}")?;
        }
        Ok(())
    }
}

/// A single firing with both endpoint configurations recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchoredTransition {
    pub src: Configuration,
    pub trans: TransId,
    pub trg: Configuration,
}

/// A nonempty chained sequence of anchored transitions; the witness object
/// for reachability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run(Vec<AnchoredTransition>);

impl Run {
    pub fn new(steps: Vec<AnchoredTransition>) -> Result<Run, VassError> {
        if steps.is_empty() {
            return Err(VassError::EmptyRun);
        }
        Ok(Run(steps))
    }

    /// Rebuilds a run from its serialized form (source plus transition
    /// indices) by firing each transition in order.
    pub fn replay(vass: &Vass, source: Configuration, indices: &[TransId]) -> Result<Run, FireError> {
        if indices.is_empty() {
            return Err(FireError::BadTransition(usize::MAX));
        }
        let mut steps = Vec::with_capacity(indices.len());
        let mut current = source;
        for &t in indices {
            let next = vass.fire(&current, t)?;
            steps.push(AnchoredTransition { src: current, trans: t, trg: next.clone() });
            current = next;
        }
        Ok(Run(steps))
    }

    pub fn source(&self) -> &Configuration {
        &self.0[0].src
    }

    pub fn target(&self) -> &Configuration {
        &self.0[self.0.len() - 1].trg
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &[AnchoredTransition] {
        &self.0
    }

    pub fn indices(&self) -> Vec<TransId> {
        self.0.iter().map(|s| s.trans).collect()
    }
}

/// Sum of the effects of a run's transitions; equals target minus source.
pub fn run_effect(vass: &Vass, run: &Run) -> Vec<BigInt> {
    let mut total = vec![BigInt::zero(); vass.dim()];
    for step in run.steps() {
        if let Some(tr) = vass.transition(step.trans) {
            for (acc, x) in total.iter_mut().zip(&tr.effect) {
                *acc += x;
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunViolationKind {
    BadTransitionIndex,
    SourceStateMismatch,
    TargetStateMismatch,
    EffectMismatch,
    ChainBroken,
    DimensionMismatch,
}

/// First violated invariant of a run, with the step where it occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunViolation {
    pub index: usize,
    pub kind: RunViolationKind,
}

/// Replay oracle: confirms every anchored-transition invariant and the
/// chaining invariant, reporting the first violation. Every constructive
/// operation (pumping, amalgamation, generated paths) is checked through it.
pub fn validate_run(vass: &Vass, run: &Run) -> Result<(), RunViolation> {
    for (i, step) in run.steps().iter().enumerate() {
        let tr = match vass.transition(step.trans) {
            Some(tr) => tr,
            None => return Err(RunViolation { index: i, kind: RunViolationKind::BadTransitionIndex }),
        };
        if step.src.vec.len() != vass.dim() || step.trg.vec.len() != vass.dim() {
            return Err(RunViolation { index: i, kind: RunViolationKind::DimensionMismatch });
        }
        if step.src.state != tr.src {
            return Err(RunViolation { index: i, kind: RunViolationKind::SourceStateMismatch });
        }
        if step.trg.state != tr.dst {
            return Err(RunViolation { index: i, kind: RunViolationKind::TargetStateMismatch });
        }
        match add_effect(&step.src.vec, &tr.effect) {
            Ok(expected) if expected == step.trg.vec => {}
            _ => return Err(RunViolation { index: i, kind: RunViolationKind::EffectMismatch }),
        }
        if i + 1 < run.len() && run.steps()[i + 1].src != step.trg {
            return Err(RunViolation { index: i, kind: RunViolationKind::ChainBroken });
        }
    }
    Ok(())
}

/// `vec + eff`, or the index of the first coordinate that would drop below zero.
pub fn add_effect(vec: &[BigUint], eff: &[BigInt]) -> Result<Vec<BigUint>, usize> {
    let mut out = Vec::with_capacity(vec.len());
    for (i, (v, e)) in vec.iter().zip(eff).enumerate() {
        let sum = BigInt::from(v.clone()) + e;
        match sum.sign() {
            Sign::Minus => return Err(i),
            _ => out.push(sum.to_biguint().unwrap()),
        }
    }
    Ok(out)
}

/// `vec - eff`, or the index of the first coordinate that would drop below zero.
pub fn sub_effect(vec: &[BigUint], eff: &[BigInt]) -> Result<Vec<BigUint>, usize> {
    let mut out = Vec::with_capacity(vec.len());
    for (i, (v, e)) in vec.iter().zip(eff).enumerate() {
        let diff = BigInt::from(v.clone()) - e;
        match diff.sign() {
            Sign::Minus => return Err(i),
            _ => out.push(diff.to_biguint().unwrap()),
        }
    }
    Ok(out)
}

/// Maximum coordinate of a nonnegative vector; zero for the empty vector.
pub fn norm(vec: &[BigUint]) -> BigUint {
    vec.iter().cloned().max().unwrap_or_else(BigUint::zero)
}

/// Maximum absolute coordinate of a signed vector.
pub fn norm_signed(vec: &[BigInt]) -> BigUint {
    vec.iter().map(|x| x.magnitude().clone()).max().unwrap_or_else(BigUint::zero)
}

pub fn biguint_vec(vals: &[u64]) -> Vec<BigUint> {
    vals.iter().map(|&x| BigUint::from(x)).collect()
}

pub fn bigint_vec(vals: &[i64]) -> Vec<BigInt> {
    vals.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_loop(effect: &[i64]) -> (Vass, StateId, TransId) {
        let mut v = Vass::new(effect.len()).unwrap();
        let q = v.add_state("q").unwrap();
        let t = v.add_transition(q, bigint_vec(effect), q).unwrap();
        (v, q, t)
    }

    #[test]
    fn fire_adds_effect() {
        let (v, q, t) = single_loop(&[2]);
        let c = Configuration::from_u64s(q, &[0]);
        let c2 = v.fire(&c, t).unwrap();
        assert_eq!(c2, Configuration::from_u64s(q, &[2]));
    }

    #[test]
    fn fire_guards_negative_counters() {
        let (v, q, t) = single_loop(&[-1]);
        let c = Configuration::from_u64s(q, &[0]);
        assert_eq!(v.fire(&c, t), Err(FireError::NegativeCounter(0)));
    }

    #[test]
    fn fire_rejects_wrong_state() {
        let mut v = Vass::new(1).unwrap();
        let q = v.add_state("q").unwrap();
        let p = v.add_state("p").unwrap();
        let t = v.add_transition(q, bigint_vec(&[1]), q).unwrap();
        let c = Configuration::from_u64s(p, &[0]);
        assert_eq!(v.fire(&c, t), Err(FireError::WrongState));
    }

    #[test]
    fn fire_initial_phase_loop_of_fraction_family() {
        // The increasing loop of the n=1 four-counter family.
        let mut v = Vass::new(4).unwrap();
        let q = v.add_state("q_guess").unwrap();
        let t = v.add_transition(q, bigint_vec(&[1, 1, 0, 0]), q).unwrap();
        let c = Configuration::from_u64s(q, &[3, 3, 0, 0]);
        assert_eq!(v.fire(&c, t).unwrap(), Configuration::from_u64s(q, &[4, 4, 0, 0]));
    }

    #[test]
    fn run_effect_sums_steps() {
        let mut v = Vass::new(2).unwrap();
        let q = v.add_state("q").unwrap();
        let t1 = v.add_transition(q, bigint_vec(&[1, 2]), q).unwrap();
        let t2 = v.add_transition(q, bigint_vec(&[0, -1]), q).unwrap();
        let run = Run::replay(&v, Configuration::from_u64s(q, &[0, 0]), &[t1, t2]).unwrap();
        assert_eq!(run_effect(&v, &run), bigint_vec(&[1, 1]));

        let single = Run::replay(&v, Configuration::from_u64s(q, &[0, 5]), &[t2]).unwrap();
        assert_eq!(run_effect(&v, &single), bigint_vec(&[0, -1]));
    }

    #[test]
    fn run_effect_of_balanced_loop_iterations_is_zero() {
        let mut v = Vass::new(1).unwrap();
        let q = v.add_state("q").unwrap();
        let up = v.add_transition(q, bigint_vec(&[1]), q).unwrap();
        let down = v.add_transition(q, bigint_vec(&[-1]), q).unwrap();
        let run = Run::replay(
            &v,
            Configuration::from_u64s(q, &[0]),
            &[up, down, up, down, up, down],
        )
        .unwrap();
        assert_eq!(run_effect(&v, &run), bigint_vec(&[0]));
        let diff = BigInt::from(run.target().vec[0].clone()) - BigInt::from(run.source().vec[0].clone());
        assert_eq!(diff, BigInt::zero());
    }

    #[test]
    fn validate_accepts_replayed_runs() {
        let (v, q, t) = single_loop(&[2]);
        let run = Run::replay(&v, Configuration::from_u64s(q, &[0]), &[t, t, t]).unwrap();
        assert!(validate_run(&v, &run).is_ok());
    }

    #[test]
    fn validate_reports_broken_chain() {
        let (v, q, t) = single_loop(&[2]);
        let a = AnchoredTransition {
            src: Configuration::from_u64s(q, &[0]),
            trans: t,
            trg: Configuration::from_u64s(q, &[2]),
        };
        let b = AnchoredTransition {
            src: Configuration::from_u64s(q, &[4]), // does not chain
            trans: t,
            trg: Configuration::from_u64s(q, &[6]),
        };
        let run = Run::new(vec![a, b]).unwrap();
        let err = validate_run(&v, &run).unwrap_err();
        assert_eq!(err.index, 0);
        assert_eq!(err.kind, RunViolationKind::ChainBroken);
    }

    #[test]
    fn validate_reports_effect_mismatch() {
        let (v, q, t) = single_loop(&[2]);
        let a = AnchoredTransition {
            src: Configuration::from_u64s(q, &[0]),
            trans: t,
            trg: Configuration::from_u64s(q, &[3]),
        };
        let run = Run::new(vec![a]).unwrap();
        let err = validate_run(&v, &run).unwrap_err();
        assert_eq!(err.kind, RunViolationKind::EffectMismatch);
    }

    #[test]
    fn text_format_round_trips() {
        let text = "dim 2\nstate q\nstate q_t\ntrans q q 1 2\ntrans q q_t 0 -1\ntrans q_t q_t -1 -2\ntrans q_t q_t 0 -1\n";
        let v = Vass::parse(text).unwrap();
        assert_eq!(v.dim(), 2);
        assert_eq!(v.state_count(), 2);
        assert_eq!(v.transitions().len(), 4);
        assert_eq!(v.to_text(), text);
        // comments and blank lines are ignored
        let commented = format!("# slope fixture\n\n{text}# end\n");
        assert_eq!(Vass::parse(&commented).unwrap().to_text(), text);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(Vass::parse("state q\n").is_err());
        assert!(Vass::parse("dim 1\ntrans q q 1\n").is_err());
        assert!(Vass::parse("dim 1\nstate q\ntrans q q 1 2\n").is_err());
        assert!(Vass::parse("dim 1\nstate q\nstate q\n").is_err());
        assert!(Vass::parse("").is_err());
    }

    #[test]
    fn configuration_text_round_trips() {
        let v = Vass::parse("dim 3\nstate q\n").unwrap();
        let c = Configuration::parse(&v, "q 1 0 42").unwrap();
        assert_eq!(c.display(&v).to_string(), "q 1 0 42");
        assert!(Configuration::parse(&v, "p 1 0 42").is_err());
        assert!(Configuration::parse(&v, "q 1 0").is_err());
    }
}
