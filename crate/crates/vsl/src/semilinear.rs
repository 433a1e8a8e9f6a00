//! Exact linear and semilinear set algebra over configurations: membership
//! with witnesses, period filters for proportionality and ratio conditions,
//! a two-tier transition-invariance check, and canonical enumeration of all
//! semilinear configuration sets up to a size budget.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use num::{BigInt, BigRational, BigUint, One, Zero};
use thiserror::Error;

use crate::explore::SearchBounds;
use crate::numtheory::LinearFunction;
use crate::vass::{norm, Configuration, TransId, Vass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetError {
    #[error("vector length mismatch inside a linear set")]
    DimensionMismatch,
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// `base + N p_1 + .. + N p_k` over nonnegative integer vectors. Canonical
/// form: zero periods dropped, remaining periods sorted lexicographically and
/// deduplicated; the base is untouched.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearSet {
    base: Vec<BigUint>,
    periods: Vec<Vec<BigUint>>,
}

impl LinearSet {
    pub fn new(base: Vec<BigUint>, periods: Vec<Vec<BigUint>>) -> Result<LinearSet, SetError> {
        let dim = base.len();
        let mut kept: Vec<Vec<BigUint>> = Vec::new();
        for p in periods {
            if p.len() != dim {
                return Err(SetError::DimensionMismatch);
            }
            if p.iter().any(|x| !x.is_zero()) {
                kept.push(p);
            }
        }
        kept.sort();
        kept.dedup();
        Ok(LinearSet { base, periods: kept })
    }

    pub fn from_u64s(base: &[u64], periods: &[&[u64]]) -> LinearSet {
        LinearSet::new(
            base.iter().map(|&x| BigUint::from(x)).collect(),
            periods.iter().map(|p| p.iter().map(|&x| BigUint::from(x)).collect()).collect(),
        )
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[BigUint] {
        &self.base
    }

    pub fn periods(&self) -> &[Vec<BigUint>] {
        &self.periods
    }

    /// Sum of the norms of base and periods.
    pub fn size(&self) -> BigUint {
        let mut total = norm(&self.base);
        for p in &self.periods {
            total += norm(p);
        }
        total
    }

    /// Decides `v = base + sum n_i p_i` with nonnegative coefficients by a
    /// depth-first search over the coefficient space; each coefficient is
    /// bounded per coordinate by the remaining residual. Returns the
    /// lexicographically least witness when the point is a member.
    pub fn member(&self, v: &[BigUint]) -> Option<Vec<BigUint>> {
        if v.len() != self.dim() {
            return None;
        }
        let mut residual = Vec::with_capacity(v.len());
        for (x, b) in v.iter().zip(&self.base) {
            if x < b {
                return None;
            }
            residual.push(x - b);
        }
        let mut witness = vec![BigUint::zero(); self.periods.len()];
        if self.member_rec(0, &residual, &mut witness) {
            Some(witness)
        } else {
            None
        }
    }

    fn member_rec(&self, idx: usize, residual: &[BigUint], witness: &mut [BigUint]) -> bool {
        if idx == self.periods.len() {
            return residual.iter().all(|x| x.is_zero());
        }
        let p = &self.periods[idx];
        // largest usable coefficient for this period
        let bound = residual
            .iter()
            .zip(p)
            .filter(|(_, pe)| !pe.is_zero())
            .map(|(r, pe)| r / pe)
            .min()
            .expect("periods are nonzero");
        let mut n = BigUint::zero();
        while n <= bound {
            let next: Vec<BigUint> = residual.iter().zip(p).map(|(r, pe)| r - pe * &n).collect();
            witness[idx] = n.clone();
            if self.member_rec(idx + 1, &next, witness) {
                return true;
            }
            n += 1u32;
        }
        false
    }
}

/// A finite union of state-tagged linear sets. States are stored by name so
/// the set is meaningful independent of any particular system; operations
/// that fire transitions take the ambient system as a parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearConfigSet {
    components: Vec<(String, LinearSet)>,
}

impl SemilinearConfigSet {
    pub fn new(components: Vec<(String, LinearSet)>) -> SemilinearConfigSet {
        SemilinearConfigSet { components }
    }

    pub fn empty() -> SemilinearConfigSet {
        SemilinearConfigSet { components: Vec::new() }
    }

    pub fn components(&self) -> &[(String, LinearSet)] {
        &self.components
    }

    /// Sum of component sizes.
    pub fn size(&self) -> BigUint {
        self.components.iter().map(|(_, l)| l.size()).sum()
    }

    pub fn contains(&self, state: &str, vec: &[BigUint]) -> bool {
        self.components.iter().any(|(s, l)| s == state && l.member(vec).is_some())
    }

    pub fn contains_config(&self, vass: &Vass, c: &Configuration) -> bool {
        self.contains(vass.state_name(c.state), &c.vec)
    }

    /// Structured text format: one `component STATE` header per component,
    /// followed by its `base` line and one `period` line per period.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (state, l) in &self.components {
            out.push_str(&format!("component {state}\n"));
            out.push_str("base");
            for x in &l.base {
                out.push_str(&format!(" {x}"));
            }
            out.push('\n');
            for p in &l.periods {
                out.push_str("period");
                for x in p {
                    out.push_str(&format!(" {x}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<SemilinearConfigSet, SetError> {
        let mut components: Vec<(String, LinearSet)> = Vec::new();
        let mut current: Option<(String, Option<Vec<BigUint>>, Vec<Vec<BigUint>>)> = None;
        fn flush(
            components: &mut Vec<(String, LinearSet)>,
            cur: &mut Option<(String, Option<Vec<BigUint>>, Vec<Vec<BigUint>>)>,
            line: usize,
        ) -> Result<(), SetError> {
            if let Some((state, base, periods)) = cur.take() {
                let base =
                    base.ok_or(SetError::Parse { line, reason: "component without base".into() })?;
                let l = LinearSet::new(base, periods)?;
                components.push((state, l));
            }
            Ok(())
        }
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let keyword = tokens.next().unwrap();
            match keyword {
                "component" => {
                    flush(&mut components, &mut current, line)?;
                    let state = tokens
                        .next()
                        .ok_or(SetError::Parse { line, reason: "missing state name".into() })?;
                    current = Some((state.to_string(), None, Vec::new()));
                }
                "base" | "period" => {
                    let entry = current.as_mut().ok_or(SetError::Parse {
                        line,
                        reason: "vector before any component".into(),
                    })?;
                    let mut vec = Vec::new();
                    for tok in tokens {
                        let x: BigUint = tok.parse().map_err(|_| SetError::Parse {
                            line,
                            reason: format!("bad integer `{tok}`"),
                        })?;
                        vec.push(x);
                    }
                    if keyword == "base" {
                        if entry.1.is_some() {
                            return Err(SetError::Parse { line, reason: "duplicate base".into() });
                        }
                        entry.1 = Some(vec);
                    } else {
                        entry.2.push(vec);
                    }
                }
                other => {
                    return Err(SetError::Parse {
                        line,
                        reason: format!("unknown keyword `{other}`"),
                    })
                }
            }
        }
        flush(&mut components, &mut current, 0)?;
        Ok(SemilinearConfigSet { components })
    }
}

/// All periods that are positive rational multiples of `delta`, with the
/// multiplier in irreducible form. Cross-multiplied exact integer test.
pub fn proportional_periods(
    set: &SemilinearConfigSet,
    delta: &[BigUint],
) -> Vec<(usize, usize, BigRational)> {
    let mut out = Vec::new();
    let pivot = match delta.iter().position(|d| !d.is_zero()) {
        Some(i) => i,
        None => return out,
    };
    for (ci, (_, l)) in set.components.iter().enumerate() {
        if l.dim() != delta.len() {
            continue;
        }
        'periods: for (pi, p) in l.periods.iter().enumerate() {
            if p[pivot].is_zero() {
                continue;
            }
            for i in 0..delta.len() {
                if p[i].clone() * &delta[pivot] != delta[i].clone() * &p[pivot] {
                    continue 'periods;
                }
            }
            let r = BigRational::new(
                BigInt::from(p[pivot].clone()),
                BigInt::from(delta[pivot].clone()),
            );
            out.push((ci, pi, r));
        }
    }
    out
}

/// All periods `p` with `lin1(p) = ratio * lin2(p)` (exact, cross-multiplied)
/// and a nonzero projection onto the union of the two supports.
pub fn ratio_satisfying_periods(
    set: &SemilinearConfigSet,
    lin1: &LinearFunction,
    lin2: &LinearFunction,
    ratio: &BigRational,
) -> Vec<(usize, usize)> {
    let mut proj: Vec<usize> = lin1.support();
    proj.extend(lin2.support());
    proj.sort_unstable();
    proj.dedup();
    let mut out = Vec::new();
    for (ci, (_, l)) in set.components.iter().enumerate() {
        if l.dim() != lin1.dim() {
            continue;
        }
        for (pi, p) in l.periods.iter().enumerate() {
            if proj.iter().all(|&i| p[i].is_zero()) {
                continue;
            }
            let lhs = BigInt::from(lin1.eval(p)) * ratio.denom();
            let rhs = ratio.numer() * BigInt::from(lin2.eval(p));
            if lhs == rhs {
                out.push((ci, pi));
            }
        }
    }
    out
}

/// Verdict of the transition-invariance check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvarianceVerdict {
    Verified,
    Refuted(InvarianceWitness),
    UnknownWithinBounds,
}

/// A member configuration, a fireable transition, and the successor that
/// escaped the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceWitness {
    pub config: Configuration,
    pub trans: TransId,
    pub result: Configuration,
}

/// Two-tier invariance check.
///
/// Tier one is complete for refutation up to the box: it enumerates every
/// member whose norm fits the bound and tries every fireable transition.
/// Tier two is a sound syntactic criterion for verification: per component
/// and transition, the shifted base (lifted into the nonnegative orthant by
/// every minimal period top-up) must land in some component at the successor
/// state whose periods generate the source component's periods. Exact
/// semilinear invariance is undecided here; when neither tier answers, the
/// verdict is unknown.
pub fn check_invariance(
    vass: &Vass,
    set: &SemilinearConfigSet,
    bounds: &SearchBounds,
) -> InvarianceVerdict {
    if let Some(w) = refute_invariance(vass, set, bounds) {
        return InvarianceVerdict::Refuted(w);
    }
    if verify_invariance_syntactic(vass, set) {
        InvarianceVerdict::Verified
    } else {
        InvarianceVerdict::UnknownWithinBounds
    }
}

/// Tier one: search the boxed members for an escaping transition. Complete
/// for refutation among members with norm within the bound; `None` when the
/// bounds carry no box.
pub fn refute_invariance(
    vass: &Vass,
    set: &SemilinearConfigSet,
    bounds: &SearchBounds,
) -> Option<InvarianceWitness> {
    let bound = bounds.norm.as_ref()?;
    let mut members: BTreeSet<Configuration> = BTreeSet::new();
    for (state, l) in &set.components {
        let sid = match vass.state_id(state) {
            Some(sid) => sid,
            None => continue,
        };
        if l.dim() != vass.dim() {
            continue;
        }
        collect_members_in_box(l, bound, &mut |vec| {
            members.insert(Configuration::new(sid, vec));
        });
    }
    for c in members {
        for t in 0..vass.transitions().len() {
            if let Ok(next) = vass.fire(&c, TransId(t)) {
                if !set.contains_config(vass, &next) {
                    return Some(InvarianceWitness { config: c, trans: TransId(t), result: next });
                }
            }
        }
    }
    None
}

fn collect_members_in_box(l: &LinearSet, bound: &BigUint, sink: &mut impl FnMut(Vec<BigUint>)) {
    fn rec(l: &LinearSet, idx: usize, point: &[BigUint], bound: &BigUint, sink: &mut impl FnMut(Vec<BigUint>)) {
        if point.iter().any(|x| x > bound) {
            return;
        }
        if idx == l.periods().len() {
            sink(point.to_vec());
            return;
        }
        let mut current = point.to_vec();
        loop {
            if current.iter().any(|x| x > bound) {
                return;
            }
            rec(l, idx + 1, &current, bound, sink);
            for (x, p) in current.iter_mut().zip(&l.periods()[idx]) {
                *x += p;
            }
        }
    }
    rec(l, 0, l.base(), bound, sink);
}

/// Tier two: the syntactic sufficient condition, checked for every component
/// and outgoing transition.
fn verify_invariance_syntactic(vass: &Vass, set: &SemilinearConfigSet) -> bool {
    for (state, l) in &set.components {
        let sid = match vass.state_id(state) {
            Some(sid) => sid,
            None => continue,
        };
        if l.dim() != vass.dim() {
            return false;
        }
        for (ti, tr) in vass.transitions().iter().enumerate() {
            if tr.src != sid {
                continue;
            }
            if !component_transition_covered(vass, set, l, ti) {
                return false;
            }
        }
    }
    true
}

fn component_transition_covered(
    vass: &Vass,
    set: &SemilinearConfigSet,
    l: &LinearSet,
    ti: usize,
) -> bool {
    let tr = &vass.transitions()[ti];
    let dst_name = vass.state_name(tr.dst);
    let shifted: Vec<BigInt> =
        l.base().iter().zip(&tr.effect).map(|(b, e)| BigInt::from(b.clone()) + e).collect();
    let topups = match minimal_topups(&shifted, l.periods()) {
        Some(t) => t,
        None => return false,
    };
    'topup: for m in &topups {
        let mut point = shifted.clone();
        for (coeff, p) in m.iter().zip(l.periods()) {
            if *coeff > 0 {
                for (x, pe) in point.iter_mut().zip(p) {
                    *x += BigInt::from(pe.clone()) * coeff;
                }
            }
        }
        let point: Vec<BigUint> =
            point.iter().map(|x| x.to_biguint().expect("topup lifts into N^d")).collect();
        for (cand_state, cand) in set.components() {
            if cand_state != dst_name || cand.dim() != l.dim() {
                continue;
            }
            if cand.member(&point).is_none() {
                continue;
            }
            let lattice = LinearSet::new(vec![BigUint::zero(); cand.dim()], cand.periods().to_vec())
                .expect("lattice of an existing set");
            if l.periods().iter().all(|p| lattice.member(p).is_some()) {
                continue 'topup;
            }
        }
        return false;
    }
    true
}

/// Minimal coefficient vectors lifting `shifted` into the nonnegative
/// orthant. The solution set is upward closed in the coefficients, so its
/// minimal elements cover every fireable member. `None` means the grid was
/// too large to scan and the caller should give up rather than guess.
fn minimal_topups(shifted: &[BigInt], periods: &[Vec<BigUint>]) -> Option<Vec<Vec<u64>>> {
    let mut deficits: Vec<(usize, u64)> = Vec::new();
    for (j, x) in shifted.iter().enumerate() {
        if x.sign() == num::bigint::Sign::Minus {
            let d = (-x).to_biguint().unwrap();
            deficits.push((j, u64::try_from(&d).ok().filter(|&d| d <= 64)?));
        }
    }
    if deficits.is_empty() {
        return Some(vec![vec![0; periods.len()]]);
    }
    let mut bounds = Vec::with_capacity(periods.len());
    let mut grid: u64 = 1;
    for p in periods {
        let mut b = 0u64;
        for &(j, d) in &deficits {
            if let Ok(pe) = u64::try_from(&p[j]) {
                if pe > 0 {
                    b = b.max(d.div_ceil(pe));
                }
            }
        }
        bounds.push(b);
        grid = grid.saturating_mul(b + 1);
        if grid > 4096 {
            return None;
        }
    }
    if periods.is_empty() {
        return Some(Vec::new()); // deficits exist but nothing can lift them
    }
    let mut solutions: Vec<Vec<u64>> = Vec::new();
    let mut m = vec![0u64; periods.len()];
    'grid: loop {
        let ok = deficits.iter().all(|&(j, d)| {
            let supplied: BigUint =
                periods.iter().zip(&m).map(|(p, &c)| p[j].clone() * BigUint::from(c)).sum();
            supplied >= BigUint::from(d)
        });
        if ok {
            solutions.push(m.clone());
        }
        for i in 0..m.len() {
            if m[i] < bounds[i] {
                m[i] += 1;
                continue 'grid;
            }
            m[i] = 0;
            if i + 1 == m.len() {
                break 'grid;
            }
        }
    }
    let minimal: Vec<Vec<u64>> = solutions
        .iter()
        .filter(|s| {
            !solutions.iter().any(|o| *o != **s && o.iter().zip(s.iter()).all(|(a, b)| a <= b))
        })
        .cloned()
        .collect();
    Some(minimal)
}

// ---------------------------------------------------------------------------
// Canonical enumeration of semilinear configuration sets by size.

/// Internal pool entry with machine-word coordinates; enumeration budgets are
/// desk scale, so coordinates fit comfortably.
#[derive(Debug, Clone)]
pub(crate) struct PoolSet {
    pub base: Vec<u64>,
    pub periods: Vec<Vec<u64>>,
    pub size: u64,
}

impl PoolSet {
    pub(crate) fn to_linear_set(&self) -> LinearSet {
        LinearSet::from_u64s(
            &self.base,
            &self.periods.iter().map(|p| p.as_slice()).collect::<Vec<_>>(),
        )
    }

    /// Membership with machine-word arithmetic, mirroring [`LinearSet::member`].
    pub(crate) fn member_u64(&self, v: &[u64]) -> bool {
        if v.len() != self.base.len() {
            return false;
        }
        let mut residual = Vec::with_capacity(v.len());
        for (x, b) in v.iter().zip(&self.base) {
            if x < b {
                return false;
            }
            residual.push(x - b);
        }
        fn rec(periods: &[Vec<u64>], residual: &[u64]) -> bool {
            if periods.is_empty() {
                return residual.iter().all(|&x| x == 0);
            }
            let p = &periods[0];
            let bound = residual
                .iter()
                .zip(p)
                .filter(|(_, &pe)| pe > 0)
                .map(|(&r, &pe)| r / pe)
                .min()
                .unwrap_or(0);
            for n in 0..=bound {
                let mut next: Vec<u64> = Vec::with_capacity(residual.len());
                let mut ok = true;
                for (&r, &pe) in residual.iter().zip(p) {
                    match pe.checked_mul(n).and_then(|u| r.checked_sub(u)) {
                        Some(x) => next.push(x),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && rec(&periods[1..], &next) {
                    return true;
                }
            }
            false
        }
        rec(&self.periods, &residual)
    }
}

/// Shared enumeration state: a component pool ordered by size and per-size
/// subset tables. Each enumeration shape assigns every state one subset of
/// pool components; every canonical set is emitted exactly once, levels in
/// nondecreasing total size.
pub struct SemilinearSpace {
    states: Vec<String>,
    dim: usize,
    pool: Vec<PoolSet>,
    pool_built: u64,
    subsets: Vec<Vec<Vec<u32>>>,
}

impl SemilinearSpace {
    pub fn new(states: Vec<String>, dim: usize) -> SemilinearSpace {
        SemilinearSpace { states, dim, pool: Vec::new(), pool_built: 0, subsets: Vec::new() }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub(crate) fn pool(&self) -> &[PoolSet] {
        &self.pool
    }

    /// Extends the pool and subset tables so every level up to `t` can be
    /// iterated.
    pub fn ensure_level(&mut self, t: u64) {
        while self.pool_built <= t {
            let size = self.pool_built;
            for beta in (0..=size).rev() {
                let remaining = size - beta;
                for base in vectors_with_norm_exactly(self.dim, beta) {
                    if remaining == 0 {
                        self.pool.push(PoolSet { base, periods: Vec::new(), size });
                    } else {
                        for periods in period_sets_with_total(self.dim, remaining) {
                            self.pool.push(PoolSet { base: base.clone(), periods, size });
                        }
                    }
                }
            }
            self.pool_built += 1;
        }
        while self.subsets.len() as u64 <= t {
            let sigma = self.subsets.len() as u64;
            let mut out: Vec<Vec<u32>> = Vec::new();
            let mut cur: Vec<u32> = Vec::new();
            subsets_rec(&self.pool, 0, sigma, &mut cur, &mut out);
            out.sort_by_key(|s| s.len()); // stable: index order kept within a length
            self.subsets.push(out);
        }
    }

    fn subsets(&self, sigma: u64) -> &[Vec<u32>] {
        &self.subsets[sigma as usize]
    }

    /// Visits every candidate of total size exactly `t`; the callback gets
    /// per-state pool id lists. `ensure_level(t)` must have run first.
    pub fn for_each_at_level<R>(
        &self,
        t: u64,
        mut f: impl FnMut(&[(usize, &[u32])]) -> ControlFlow<R>,
    ) -> Option<R> {
        let m = self.states.len();
        if m == 0 {
            if t == 0 {
                if let ControlFlow::Break(r) = f(&[]) {
                    return Some(r);
                }
            }
            return None;
        }
        let mut composition = vec![0u64; m];
        composition[m - 1] = t;
        let mut parts: Vec<(usize, &[u32])> = Vec::with_capacity(m);
        loop {
            let lists: Vec<&[Vec<u32>]> = composition.iter().map(|&s| self.subsets(s)).collect();
            if lists.iter().all(|l| !l.is_empty()) {
                let mut idx = vec![0usize; m];
                'odometer: loop {
                    parts.clear();
                    for s in 0..m {
                        parts.push((s, lists[s][idx[s]].as_slice()));
                    }
                    if let ControlFlow::Break(r) = f(&parts) {
                        return Some(r);
                    }
                    for s in (0..m).rev() {
                        idx[s] += 1;
                        if idx[s] < lists[s].len() {
                            continue 'odometer;
                        }
                        idx[s] = 0;
                        if s == 0 {
                            break 'odometer;
                        }
                    }
                }
            }
            if !next_composition(&mut composition) {
                return None;
            }
        }
    }

    /// Builds the owned set for a candidate, components ordered by state then
    /// pool id.
    pub fn materialize(&self, parts: &[(usize, &[u32])]) -> SemilinearConfigSet {
        let mut components = Vec::new();
        for (state_idx, ids) in parts {
            for &id in *ids {
                components.push((
                    self.states[*state_idx].clone(),
                    self.pool[id as usize].to_linear_set(),
                ));
            }
        }
        SemilinearConfigSet::new(components)
    }

    /// True when the candidate contains the point `(state_idx, v)`.
    pub(crate) fn candidate_contains(
        &self,
        parts: &[(usize, &[u32])],
        state_idx: usize,
        v: &[u64],
    ) -> bool {
        parts.iter().any(|(s, ids)| {
            *s == state_idx && ids.iter().any(|&id| self.pool[id as usize].member_u64(v))
        })
    }
}

/// Advances a fixed-sum composition; the sequence starts at `(0, .., 0, t)`.
fn next_composition(c: &mut [u64]) -> bool {
    let m = c.len();
    if m <= 1 {
        return false;
    }
    if c[m - 1] > 0 {
        c[m - 2] += 1;
        c[m - 1] -= 1;
        return true;
    }
    for i in (1..m - 1).rev() {
        if c[i] > 0 {
            let v = c[i];
            c[i] = 0;
            c[i - 1] += 1;
            c[m - 1] = v - 1;
            return true;
        }
    }
    false
}

fn subsets_rec(
    pool: &[PoolSet],
    start: usize,
    remaining: u64,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if remaining == 0 {
        out.push(cur.clone());
    }
    for i in start..pool.len() {
        if pool[i].size > remaining {
            break; // pool is ordered by size
        }
        cur.push(i as u32);
        subsets_rec(pool, i + 1, remaining - pool[i].size, cur, out);
        cur.pop();
    }
}

/// All vectors in `{0..m}^dim` with maximum coordinate exactly `m`, in
/// lexicographic order.
fn vectors_with_norm_exactly(dim: usize, m: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; dim];
    fn rec(dim: usize, m: u64, idx: usize, hit: bool, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if idx == dim {
            if hit {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=m {
            cur[idx] = v;
            rec(dim, m, idx + 1, hit || v == m, cur, out);
        }
        cur[idx] = 0;
    }
    rec(dim, m, 0, m == 0, &mut cur, &mut out);
    out
}

/// All sets of distinct nonzero vectors with norms summing to `total`, each
/// sorted lexicographically; generated as strictly increasing sequences.
fn period_sets_with_total(dim: usize, total: u64) -> Vec<Vec<Vec<u64>>> {
    let mut alphabet: Vec<(Vec<u64>, u64)> = Vec::new();
    for m in 1..=total {
        for v in vectors_with_norm_exactly(dim, m) {
            let n = m;
            alphabet.push((v, n));
        }
    }
    alphabet.sort();
    let mut out = Vec::new();
    let mut cur: Vec<Vec<u64>> = Vec::new();
    fn rec(
        alphabet: &[(Vec<u64>, u64)],
        start: usize,
        remaining: u64,
        cur: &mut Vec<Vec<u64>>,
        out: &mut Vec<Vec<Vec<u64>>>,
    ) {
        if remaining == 0 {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        for i in start..alphabet.len() {
            let (v, n) = &alphabet[i];
            if *n <= remaining {
                cur.push(v.clone());
                rec(alphabet, i + 1, remaining - n, cur, out);
                cur.pop();
            }
        }
    }
    rec(&alphabet, 0, total, &mut cur, &mut out);
    out
}

/// Streams every canonical semilinear configuration set of size at most
/// `budget` over the given states, in deterministic nondecreasing-size order
/// with no duplicates.
pub fn enumerate_semilinear(states: &[String], dim: usize, budget: u64) -> SemilinearEnumerator {
    let space = SemilinearSpace::new(states.to_vec(), dim);
    SemilinearEnumerator {
        space,
        budget,
        level: 0,
        buffer: Vec::new(),
        buffer_pos: 0,
        level_loaded: false,
    }
}

pub struct SemilinearEnumerator {
    space: SemilinearSpace,
    budget: u64,
    level: u64,
    buffer: Vec<SemilinearConfigSet>,
    buffer_pos: usize,
    level_loaded: bool,
}

impl Iterator for SemilinearEnumerator {
    type Item = SemilinearConfigSet;

    fn next(&mut self) -> Option<SemilinearConfigSet> {
        loop {
            if !self.level_loaded {
                if self.level > self.budget {
                    return None;
                }
                self.space.ensure_level(self.level);
                let mut buffer = Vec::new();
                let space = &self.space;
                space.for_each_at_level::<()>(self.level, |parts| {
                    buffer.push(space.materialize(parts));
                    ControlFlow::Continue(())
                });
                self.buffer = buffer;
                self.buffer_pos = 0;
                self.level_loaded = true;
            }
            if self.buffer_pos < self.buffer.len() {
                let item = self.buffer[self.buffer_pos].clone();
                self.buffer_pos += 1;
                return Some(item);
            }
            self.level += 1;
            self.level_loaded = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vass::biguint_vec;

    #[test]
    fn member_base_point() {
        let l = LinearSet::from_u64s(&[3, 1], &[&[1, 1]]);
        let w = l.member(&biguint_vec(&[3, 1])).unwrap();
        assert!(w.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn member_parity_excludes_odd() {
        let l = LinearSet::from_u64s(&[0], &[&[2]]);
        assert!(l.member(&biguint_vec(&[7])).is_none());
        assert!(l.member(&biguint_vec(&[8])).is_some());
    }

    #[test]
    fn member_two_periods_with_witness() {
        let l = LinearSet::from_u64s(&[0, 0], &[&[1, 2], &[1, 0]]);
        // canonical order sorts periods to [(1,0), (1,2)]
        assert_eq!(l.periods()[0], biguint_vec(&[1, 0]));
        let w = l.member(&biguint_vec(&[3, 4])).unwrap();
        assert_eq!(w, biguint_vec(&[1, 2]));
        let mut total = l.base().to_vec();
        for (c, p) in w.iter().zip(l.periods()) {
            for (t, pe) in total.iter_mut().zip(p) {
                *t += pe * c;
            }
        }
        assert_eq!(total, biguint_vec(&[3, 4]));
    }

    #[test]
    fn member_agrees_with_brute_force_on_small_instances() {
        // oracle: enumerate all coefficient tuples up to the box
        fn brute(l: &LinearSet, v: &[u64]) -> bool {
            let k = l.periods().len();
            let mut coeffs = vec![0u64; k];
            loop {
                let mut point: Vec<u64> =
                    l.base().iter().map(|x| u64::try_from(x).unwrap()).collect();
                for (c, p) in coeffs.iter().zip(l.periods()) {
                    for (x, pe) in point.iter_mut().zip(p) {
                        *x += c * u64::try_from(pe).unwrap();
                    }
                }
                if point == v {
                    return true;
                }
                let mut i = 0;
                loop {
                    if i == k {
                        return false;
                    }
                    coeffs[i] += 1;
                    if coeffs[i] <= 8 {
                        break;
                    }
                    coeffs[i] = 0;
                    i += 1;
                }
            }
        }
        let sets = [
            LinearSet::from_u64s(&[0, 0], &[&[1, 2], &[2, 1]]),
            LinearSet::from_u64s(&[1, 0], &[&[1, 1]]),
            LinearSet::from_u64s(&[0, 2], &[&[0, 3], &[2, 0], &[1, 1]]),
            LinearSet::from_u64s(&[3, 3], &[]),
        ];
        for l in &sets {
            for x in 0..=6u64 {
                for y in 0..=6u64 {
                    let v = [x, y];
                    let got = l.member(&biguint_vec(&v)).is_some();
                    assert_eq!(got, brute(l, &v), "{l:?} at {v:?}");
                }
            }
        }
    }

    #[test]
    fn member_config_respects_state_tags() {
        let set = SemilinearConfigSet::new(vec![
            ("q".into(), LinearSet::from_u64s(&[0], &[&[2]])),
            ("p".into(), LinearSet::from_u64s(&[1], &[&[2]])),
        ]);
        assert!(set.contains("q", &biguint_vec(&[4])));
        assert!(!set.contains("q", &biguint_vec(&[1])));
        assert!(!set.contains("r", &biguint_vec(&[4])));
        assert!(set.contains("p", &biguint_vec(&[1])));
    }

    #[test]
    fn set_size_sums_norms() {
        let set = SemilinearConfigSet::new(vec![
            ("q".into(), LinearSet::from_u64s(&[0, 0], &[&[1, 2]])),
            ("p".into(), LinearSet::from_u64s(&[1, 1], &[&[1, 0], &[0, 3]])),
        ]);
        assert_eq!(set.size(), BigUint::from(7u32));
    }

    #[test]
    fn proportional_periods_finds_multiples() {
        let set = SemilinearConfigSet::new(vec![(
            "q".into(),
            LinearSet::from_u64s(&[0, 0], &[&[3, 6], &[2, 3]]),
        )]);
        let hits = proportional_periods(&set, &biguint_vec(&[1, 2]));
        assert_eq!(hits.len(), 1);
        let (ci, pi, r) = &hits[0];
        assert_eq!((*ci, *pi), (0, 1)); // canonical order puts (2,3) first
        assert_eq!(*r, BigRational::from(BigInt::from(3)));
    }

    #[test]
    fn proportional_periods_scaling_invariance() {
        let set = SemilinearConfigSet::new(vec![(
            "q".into(),
            LinearSet::from_u64s(&[1, 0], &[&[3, 6], &[1, 0], &[5, 10]]),
        )]);
        let d1 = proportional_periods(&set, &biguint_vec(&[1, 2]));
        let d2 = proportional_periods(&set, &biguint_vec(&[4, 8]));
        let idx1: Vec<(usize, usize)> = d1.iter().map(|(a, b, _)| (*a, *b)).collect();
        let idx2: Vec<(usize, usize)> = d2.iter().map(|(a, b, _)| (*a, *b)).collect();
        assert_eq!(idx1, idx2);
        assert_eq!(idx1.len(), 2);
        for ((_, _, r1), (_, _, r2)) in d1.iter().zip(&d2) {
            assert_eq!(r1.clone(), r2 * BigRational::from(BigInt::from(4)));
        }
    }

    #[test]
    fn ratio_periods_exact_test() {
        let lin1 = LinearFunction::new(vec![1, 0, 0]).unwrap();
        let lin2 = LinearFunction::new(vec![0, 1, 0]).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let set = SemilinearConfigSet::new(vec![(
            "q".into(),
            LinearSet::from_u64s(&[0, 0, 0], &[&[1, 2, 0], &[0, 0, 5], &[1, 1, 0]]),
        )]);
        let hits = ratio_satisfying_periods(&set, &lin1, &lin2, &half);
        assert_eq!(hits.len(), 1);
        let (_, pi) = hits[0];
        assert_eq!(set.components()[0].1.periods()[pi], biguint_vec(&[1, 2, 0]));

        let lin1b = LinearFunction::new(vec![1, 2, 0]).unwrap();
        let lin2b = LinearFunction::new(vec![0, 0, 1]).unwrap();
        let three = BigRational::from(BigInt::from(3));
        let set2 = SemilinearConfigSet::new(vec![(
            "q".into(),
            LinearSet::from_u64s(&[0, 0, 0], &[&[1, 1, 1]]),
        )]);
        assert_eq!(ratio_satisfying_periods(&set2, &lin1b, &lin2b, &three).len(), 1);
    }

    fn parity_vass() -> Vass {
        Vass::parse("dim 1\nstate q\ntrans q q 2\n").unwrap()
    }

    #[test]
    fn invariance_parity_verified() {
        let v = parity_vass();
        let set =
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[&[2]]))]);
        assert_eq!(
            check_invariance(&v, &set, &SearchBounds::norm(20)),
            InvarianceVerdict::Verified
        );
    }

    #[test]
    fn invariance_refuted_with_witness() {
        let v = parity_vass();
        let set =
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[&[3]]))]);
        match check_invariance(&v, &set, &SearchBounds::norm(20)) {
            InvarianceVerdict::Refuted(w) => {
                assert_eq!(w.config.vec, biguint_vec(&[0]));
                assert_eq!(w.result.vec, biguint_vec(&[2]));
                assert_eq!(v.fire(&w.config, w.trans).unwrap(), w.result);
                assert!(!set.contains_config(&v, &w.result));
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn invariance_two_state_slope_cover() {
        let v = Vass::parse(
            "dim 2\nstate q\nstate q_t\ntrans q q 1 2\ntrans q q_t 0 -1\ntrans q_t q_t -1 -2\ntrans q_t q_t 0 -1\n",
        )
        .unwrap();
        let set = SemilinearConfigSet::new(vec![
            ("q".into(), LinearSet::from_u64s(&[0, 0], &[&[1, 2]])),
            ("q_t".into(), LinearSet::from_u64s(&[1, 0], &[&[1, 0], &[1, 2]])),
            ("q_t".into(), LinearSet::from_u64s(&[1, 1], &[&[1, 0], &[1, 2]])),
        ]);
        assert_eq!(
            check_invariance(&v, &set, &SearchBounds::norm(30)),
            InvarianceVerdict::Verified
        );
    }

    #[test]
    fn invariance_never_verifies_refutable_sets() {
        // cross-tier property: anything the syntactic tier verifies has no
        // counterexample in a large box
        let v = Vass::parse("dim 1\nstate q\ntrans q q 2\ntrans q q -1\n").unwrap();
        let candidates = [
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[&[1]]))]),
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[&[2]]))]),
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[1], &[&[1]]))]),
        ];
        for set in &candidates {
            if verify_invariance_syntactic(&v, set) {
                assert!(
                    refute_invariance(&v, set, &SearchBounds::norm(40)).is_none(),
                    "{set:?}"
                );
            }
        }
    }

    #[test]
    fn text_format_round_trips() {
        let set = SemilinearConfigSet::new(vec![
            ("q".into(), LinearSet::from_u64s(&[0, 0], &[&[1, 2]])),
            ("q_t".into(), LinearSet::from_u64s(&[1, 0], &[&[1, 0], &[1, 2]])),
        ]);
        let text = set.to_text();
        let parsed = SemilinearConfigSet::parse(&text).unwrap();
        assert_eq!(parsed, set);
        assert_eq!(parsed.to_text(), text);
        assert_eq!(SemilinearConfigSet::parse("").unwrap(), SemilinearConfigSet::empty());
    }

    #[test]
    fn enumerate_budget_zero() {
        let sets: Vec<SemilinearConfigSet> = enumerate_semilinear(&["q".into()], 1, 0).collect();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0], SemilinearConfigSet::empty());
        assert_eq!(
            sets[1],
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[]))])
        );
    }

    #[test]
    fn enumerate_budget_two_one_state() {
        let sets: Vec<SemilinearConfigSet> = enumerate_semilinear(&["q".into()], 1, 2).collect();
        // independent count: components of size 0,1,2 are 1,2,3; subsets with
        // total 0,1,2 are 2,4,8
        assert_eq!(sets.len(), 14);
        let mut last = BigUint::zero();
        let mut seen = std::collections::HashSet::new();
        for s in &sets {
            assert!(s.size() >= last, "sizes must be nondecreasing");
            last = s.size();
            assert!(seen.insert(format!("{s:?}")), "duplicate {s:?}");
        }
        let want = [
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[0], &[&[2]]))]),
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[1], &[&[1]]))]),
            SemilinearConfigSet::new(vec![("q".into(), LinearSet::from_u64s(&[2], &[]))]),
        ];
        for w in &want {
            assert!(sets.contains(w), "missing {w:?}");
        }
    }

    #[test]
    fn enumerate_budget_one_two_states() {
        let states: Vec<String> = vec!["a".into(), "b".into()];
        let sets: Vec<SemilinearConfigSet> = enumerate_semilinear(&states, 1, 1).collect();
        for state in ["a", "b"] {
            let singleton =
                SemilinearConfigSet::new(vec![(state.into(), LinearSet::from_u64s(&[1], &[]))]);
            assert!(sets.contains(&singleton), "missing singleton for {state}");
        }
        let mut seen = std::collections::HashSet::new();
        for s in &sets {
            assert!(seen.insert(format!("{s:?}")));
        }
    }
}
