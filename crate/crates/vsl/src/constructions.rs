//! Generators for the analyzed VASS families: the four-counter fraction
//! multiplication family and its decrement-tail variant, the counter-triple
//! and zero-test gadgets, ratio-loop modifications, and the two-state slope
//! fixture.

use num::{BigInt, BigRational, BigUint, One, Zero};
use thiserror::Error;

use crate::numtheory::{zero_set, LinearFunction};
use crate::vass::{Configuration, StateId, Vass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("coordinate {0} out of range")]
    BadCoordinate(usize),
    #[error("linear functions must be reduced")]
    NotReduced,
    #[error("linear functions must have disjoint supports")]
    OverlappingSupports,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// The fraction list `f_i = a_i / b_i > 1` driving the multiplication family,
/// stored as coprime pairs with index `i` running from 1 to `n`. Phase `i`
/// multiplies the second counter by `f_i` once per round trip, `2^i` trips in
/// an accepting pass, so the full pass scales by the product of `f_i^(2^i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionSchedule {
    pairs: Vec<(BigUint, BigUint)>,
}

impl FractionSchedule {
    pub fn new(pairs: Vec<(BigUint, BigUint)>) -> Result<FractionSchedule, BuildError> {
        if pairs.is_empty() {
            return Err(BuildError::InvalidSchedule("need at least one fraction".into()));
        }
        for (a, b) in &pairs {
            if b.is_zero() || a <= b {
                return Err(BuildError::InvalidSchedule("fractions must be greater than one".into()));
            }
            if num::Integer::gcd(a, b) != BigUint::one() {
                return Err(BuildError::InvalidSchedule("fractions must be in lowest terms".into()));
            }
        }
        Ok(FractionSchedule { pairs })
    }

    /// The only shipped default: the single-phase schedule, forced to
    /// `1 + 1/4 = 5/4`. Longer compliant schedules are caller-supplied.
    pub fn default_n1() -> FractionSchedule {
        FractionSchedule::new(vec![(BigUint::from(5u32), BigUint::from(4u32))]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(BigUint, BigUint)] {
        &self.pairs
    }

    fn fraction(&self, i: usize) -> BigRational {
        let (a, b) = &self.pairs[i];
        BigRational::new(BigInt::from(a.clone()), BigInt::from(b.clone()))
    }

    /// Validates the compliance conditions: strictly increasing fractions,
    /// the last one exactly `1 + 1/4^n`, and the description size bounds
    /// `4^(n^2+n)` per fraction and `4^(2(n^2+n))` for the product.
    pub fn validate_compliance(&self) -> Result<(), BuildError> {
        let n = self.n();
        for i in 1..n {
            if self.fraction(i - 1) >= self.fraction(i) {
                return Err(BuildError::InvalidSchedule("fractions must strictly increase".into()));
            }
        }
        let four_n = BigUint::from(4u32).pow(n as u32);
        let (a_n, b_n) = &self.pairs[n - 1];
        if *b_n != four_n || *a_n != &four_n + 1u32 {
            return Err(BuildError::InvalidSchedule(format!(
                "last fraction must be 1 + 1/4^{n}"
            )));
        }
        let per_bound = BigUint::from(4u32).pow((n * n + n) as u32);
        for (a, b) in &self.pairs {
            if a.max(b) > &per_bound {
                return Err(BuildError::InvalidSchedule("fraction description too large".into()));
            }
        }
        let f = self.product();
        let f_bound = BigUint::from(4u32).pow((2 * (n * n + n)) as u32);
        if f.numer().magnitude().max(f.denom().magnitude()) > &f_bound {
            return Err(BuildError::InvalidSchedule("product description too large".into()));
        }
        Ok(())
    }

    /// The exact product of `f_i^(2^i)` in lowest terms.
    pub fn product(&self) -> BigRational {
        let mut f = BigRational::one();
        for i in 0..self.n() {
            let e = 1u32 << (i + 1);
            f *= self.fraction(i).pow(e as i32);
        }
        f
    }

    /// The product of `b_i^(2^i)`: the counter value forced on the first
    /// coordinate of one scaled line step.
    pub fn scale(&self) -> BigUint {
        let mut n = BigUint::one();
        for (i, (_, b)) in self.pairs.iter().enumerate() {
            n *= b.pow(1u32 << (i + 1));
        }
        n
    }

    /// The line direction `(N, N * f_n^(2^n), 0, 0)` with `N` the scale.
    pub fn line_direction(&self) -> Vec<BigUint> {
        let n = self.n();
        let scaled = BigRational::from(BigInt::from(self.scale()))
            * self.fraction(n - 1).pow((1u32 << n) as i32);
        debug_assert!(scaled.is_integer());
        vec![
            self.scale(),
            scaled.to_integer().to_biguint().unwrap(),
            BigUint::zero(),
            BigUint::zero(),
        ]
    }
}

/// The generated multiplication family plus its distinguished configurations.
#[derive(Debug, Clone)]
pub struct UnFamily {
    pub vass: Vass,
    /// Initial state at the zero vector.
    pub initial: Configuration,
    /// Final state at the zero vector.
    pub accepting: Configuration,
    pub guess_state: StateId,
    /// `p_n, .., p_1, p_0` in phase order.
    pub p_states: Vec<StateId>,
    /// `q_n, .., q_1` in phase order.
    pub q_states: Vec<StateId>,
    pub schedule: FractionSchedule,
}

/// Builds the four-counter family: guess a value on the first two counters,
/// run one multiplication phase per fraction (each phase transfers the second
/// counter through the third, scaling by its fraction once per budgeted round
/// trip), then drain along the product ratio in the final state.
pub fn build_un(schedule: &FractionSchedule) -> Result<UnFamily, BuildError> {
    let n = schedule.n();
    let mut v = Vass::new(4).expect("positive dimension");
    let q_in = v.add_state("q_in").unwrap();
    let q_guess = v.add_state("q_guess").unwrap();
    let mut p_states = Vec::with_capacity(n + 1);
    let mut q_states = Vec::with_capacity(n);
    for i in (1..=n).rev() {
        p_states.push(v.add_state(&format!("p_{i}")).unwrap());
        q_states.push(v.add_state(&format!("q_{i}")).unwrap());
    }
    let p0 = v.add_state("p_0").unwrap();
    p_states.push(p0);

    let one = BigInt::one();
    let pow2 = |e: usize| BigInt::from(2u32).pow(e as u32);

    v.add_transition(q_in, vec![one.clone(), one.clone(), BigInt::zero(), BigInt::zero()], q_guess)
        .unwrap();
    v.add_transition(q_guess, vec![one.clone(), one.clone(), BigInt::zero(), BigInt::zero()], q_guess)
        .unwrap();
    v.add_transition(q_guess, vec![BigInt::zero(), BigInt::zero(), BigInt::zero(), pow2(n)], p_states[0])
        .unwrap();
    for (idx, i) in (1..=n).rev().enumerate() {
        let p_i = p_states[idx];
        let q_i = q_states[idx];
        let (a, b) = &schedule.pairs()[i - 1];
        // transfer loop: second counter into the third
        v.add_transition(p_i, vec![BigInt::zero(), -one.clone(), one.clone(), BigInt::zero()], p_i)
            .unwrap();
        // enter the scaling loop
        v.add_transition(p_i, vec![BigInt::zero(); 4], q_i).unwrap();
        // scaling loop: third counter back into the second at a_i : b_i
        v.add_transition(
            q_i,
            vec![BigInt::zero(), BigInt::from(a.clone()), -BigInt::from(b.clone()), BigInt::zero()],
            q_i,
        )
        .unwrap();
        // one round trip costs one unit of the budget counter
        v.add_transition(q_i, vec![BigInt::zero(), BigInt::zero(), BigInt::zero(), -one.clone()], p_i)
            .unwrap();
        // move to the next phase, topping up the budget
        let next = p_states[idx + 1];
        if i > 1 {
            v.add_transition(p_i, vec![BigInt::zero(), BigInt::zero(), BigInt::zero(), pow2(i - 1)], next)
                .unwrap();
        } else {
            v.add_transition(p_i, vec![BigInt::zero(); 4], next).unwrap();
        }
    }
    // final drain along the product ratio: subtract (denominator, numerator)
    let f = schedule.product();
    v.add_transition(
        p0,
        vec![
            -f.denom().clone(),
            -f.numer().clone(),
            BigInt::zero(),
            BigInt::zero(),
        ],
        p0,
    )
    .unwrap();

    let zero4 = vec![BigUint::zero(); 4];
    Ok(UnFamily {
        initial: Configuration::new(q_in, zero4.clone()),
        accepting: Configuration::new(p0, zero4),
        guess_state: q_guess,
        p_states,
        q_states,
        vass: v,
        schedule: schedule.clone(),
    })
}

/// The decrement-tail variant plus the objects the ratio conditions speak
/// about: endpoints, the anchor state, and the line direction.
#[derive(Debug, Clone)]
pub struct VnFamily {
    pub vass: Vass,
    pub s: Configuration,
    pub t: Configuration,
    /// Anchor state for the line conditions: the phase state right before the
    /// last multiplication phase runs.
    pub q: StateId,
    /// The line direction `(N, N * f_n^(2^n), 0, 0)`.
    pub delta: Vec<BigUint>,
    pub family: UnFamily,
}

/// Extends the multiplication family with a forced decrement of the second
/// counter followed by a loop that keeps decreasing it.
pub fn build_vn(schedule: &FractionSchedule) -> Result<VnFamily, BuildError> {
    let family = build_un(schedule)?;
    let mut v = family.vass.clone();
    let q_out = v.add_state("q_out").unwrap();
    let p0 = *family.p_states.last().unwrap();
    let dec = vec![BigInt::zero(), -BigInt::one(), BigInt::zero(), BigInt::zero()];
    v.add_transition(p0, dec.clone(), q_out).unwrap();
    v.add_transition(q_out, dec, q_out).unwrap();
    let zero4 = vec![BigUint::zero(); 4];
    // the line anchor: the state entered after the first multiplication phase,
    // which is p_0 itself for a single-phase schedule
    let anchor = family.p_states[1];
    Ok(VnFamily {
        s: Configuration::new(family.initial.state, zero4.clone()),
        t: Configuration::new(q_out, zero4),
        q: anchor,
        delta: schedule.line_direction(),
        vass: v,
        family,
    })
}

/// Adds a loop at `state` decreasing coordinate `coord` by one. Not
/// idempotent: adding twice yields two identical loops.
pub fn add_decrement_loop(vass: &Vass, state: &str, coord: usize) -> Result<Vass, BuildError> {
    let sid = vass.state_id(state).ok_or_else(|| BuildError::UnknownState(state.into()))?;
    if coord >= vass.dim() {
        return Err(BuildError::BadCoordinate(coord));
    }
    let mut v = vass.clone();
    let mut eff = vec![BigInt::zero(); v.dim()];
    eff[coord] = -BigInt::one();
    v.add_transition(sid, eff, sid).unwrap();
    Ok(v)
}

/// Adds the ratio loops at `state`: a decrement per support coordinate of
/// `lin2`, an increment and a decrement per coordinate outside both supports,
/// and one loop per value-preserving step vector of each function. The added
/// family is deduplicated; existing transitions are untouched.
pub fn modify_vass(
    vass: &Vass,
    state: &str,
    lin1: &LinearFunction,
    lin2: &LinearFunction,
) -> Result<Vass, BuildError> {
    if lin1.dim() != vass.dim() || lin2.dim() != vass.dim() {
        return Err(BuildError::DimensionMismatch);
    }
    if !lin1.is_reduced() || !lin2.is_reduced() {
        return Err(BuildError::NotReduced);
    }
    let supp1 = lin1.support();
    let supp2 = lin2.support();
    if supp1.iter().any(|i| supp2.contains(i)) {
        return Err(BuildError::OverlappingSupports);
    }
    let sid = vass.state_id(state).ok_or_else(|| BuildError::UnknownState(state.into()))?;

    let mut loops: Vec<Vec<BigInt>> = Vec::new();
    for &i in &supp2 {
        let mut eff = vec![BigInt::zero(); vass.dim()];
        eff[i] = -BigInt::one();
        loops.push(eff);
    }
    for i in 0..vass.dim() {
        if !supp1.contains(&i) && !supp2.contains(&i) {
            let mut up = vec![BigInt::zero(); vass.dim()];
            up[i] = BigInt::one();
            let mut down = vec![BigInt::zero(); vass.dim()];
            down[i] = -BigInt::one();
            loops.push(up);
            loops.push(down);
        }
    }
    loops.extend(zero_set(lin1));
    loops.extend(zero_set(lin2));
    let mut seen = std::collections::BTreeSet::new();
    let mut v = vass.clone();
    for eff in loops {
        if seen.insert(eff.clone()) {
            v.add_transition(sid, eff, sid).unwrap();
        }
    }
    Ok(v)
}

/// The counter-triple gadget: after a one-shot increment of `(3, 0, 0)` a
/// loop adds `(0, 1, 3)`, so the loop state holds exactly the triples
/// `(3, k, 3k)`.
pub fn build_gadget_b() -> (Vass, Configuration) {
    let mut v = Vass::new(3).unwrap();
    let g_in = v.add_state("g_in").unwrap();
    let g_loop = v.add_state("g_loop").unwrap();
    v.add_transition(g_in, vec![BigInt::from(3), BigInt::zero(), BigInt::zero()], g_loop).unwrap();
    v.add_transition(g_loop, vec![BigInt::zero(), BigInt::one(), BigInt::from(3)], g_loop).unwrap();
    let entry = Configuration::new(g_in, vec![BigUint::zero(); 3]);
    (v, entry)
}

/// Expected behaviour of the zero-test gadget for a given bound: the largest
/// drop of the budget counter across one pass, and the only complementary
/// split that attains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroTestProfile {
    pub bound: u64,
    pub max_budget_drop: u64,
}

/// The zero-test gadget over counters `(a, a_bar, y, z)`: pay two units of
/// `y`, then run two loop states in sequence, the first moving `a_bar` into
/// `a` and the second moving `a` back, each step paying one unit of `z`.
/// Starting from `a + a_bar = B`, the drop on `z` across both loops is at
/// most `2B`, attained exactly when `(a, a_bar) = (0, B)` before and after.
pub fn build_zero_test_gadget(bound: u64) -> Result<(Vass, ZeroTestProfile), BuildError> {
    if bound == 0 {
        return Err(BuildError::InvalidSchedule("bound must be positive".into()));
    }
    let mut v = Vass::new(4).unwrap();
    let z_in = v.add_state("z_in").unwrap();
    let fill = v.add_state("z_fill").unwrap();
    let drain = v.add_state("z_drain").unwrap();
    let z_out = v.add_state("z_out").unwrap();
    let zero = BigInt::zero;
    v.add_transition(z_in, vec![zero(), zero(), -BigInt::from(2), zero()], fill).unwrap();
    v.add_transition(fill, vec![BigInt::one(), -BigInt::one(), zero(), -BigInt::one()], fill).unwrap();
    v.add_transition(fill, vec![zero(), zero(), zero(), zero()], drain).unwrap();
    v.add_transition(drain, vec![-BigInt::one(), BigInt::one(), zero(), -BigInt::one()], drain).unwrap();
    v.add_transition(drain, vec![zero(), zero(), zero(), zero()], z_out).unwrap();
    Ok((v, ZeroTestProfile { bound, max_budget_drop: 2 * bound }))
}

/// Fixture with two states and a slope-two line: a doubling loop feeds a
/// second state whose loops can drain exactly the points strictly below the
/// doubled line.
#[derive(Debug, Clone)]
pub struct SlopeFixture {
    pub vass: Vass,
    pub s: Configuration,
    pub t: Configuration,
    pub q: StateId,
    pub base: Vec<BigUint>,
    pub delta: Vec<BigUint>,
}

pub fn build_toy_slope() -> SlopeFixture {
    let mut v = Vass::new(2).unwrap();
    let q = v.add_state("q").unwrap();
    let q_t = v.add_state("q_t").unwrap();
    v.add_transition(q, vec![BigInt::one(), BigInt::from(2)], q).unwrap();
    v.add_transition(q, vec![BigInt::zero(), -BigInt::one()], q_t).unwrap();
    v.add_transition(q_t, vec![-BigInt::one(), -BigInt::from(2)], q_t).unwrap();
    v.add_transition(q_t, vec![BigInt::zero(), -BigInt::one()], q_t).unwrap();
    SlopeFixture {
        s: Configuration::new(q, vec![BigUint::zero(); 2]),
        t: Configuration::new(q_t, vec![BigUint::zero(); 2]),
        q,
        base: vec![BigUint::zero(); 2],
        delta: vec![BigUint::one(), BigUint::from(2u32)],
        vass: v,
    }
}
