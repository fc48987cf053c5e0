use std::fmt;

use crate::OracleError;

/// Variable id inside a [`Table`]. Ids below [`PRIME_OFFSET`] are graph
/// vertex slots; `v + PRIME_OFFSET` is a second copy of vertex `v`, used for
/// the extra proxy argument of extended bridge functions.
pub type Var = u16;

pub const PRIME_OFFSET: Var = 64;

pub fn primed(v: Var) -> Var {
    v + PRIME_OFFSET
}

/// Division guard shared by every ratio in the workspace.
pub const DIV_EPS: f64 = 1e-12;

/// Dense non-negative factor over finitely many discrete variables.
///
/// Variables are kept sorted by id; storage is row-major with the last
/// variable varying fastest.
#[derive(Clone, PartialEq)]
pub struct Table {
    vars: Vec<Var>,
    cards: Vec<usize>,
    data: Vec<f64>,
}

impl Table {
    pub fn scalar(x: f64) -> Table {
        Table { vars: vec![], cards: vec![], data: vec![x] }
    }

    /// `vars` must be strictly increasing.
    pub fn new(vars: Vec<Var>, cards: Vec<usize>, data: Vec<f64>) -> Result<Table, OracleError> {
        if vars.len() != cards.len() || vars.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OracleError::Shape("variables must be sorted and match cardinalities".into()));
        }
        let size = checked_size(&cards)?;
        if data.len() != size {
            return Err(OracleError::Shape(format!("expected {size} entries, got {}", data.len())));
        }
        Ok(Table { vars, cards, data })
    }

    /// Build from a function of the joint state (states listed in `vars` order).
    pub fn from_fn(
        vars: Vec<Var>,
        cards: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Table, OracleError> {
        let size = checked_size(&cards)?;
        let mut data = Vec::with_capacity(size);
        let mut st = vec![0usize; cards.len()];
        for _ in 0..size {
            data.push(f(&st));
            advance(&mut st, &cards);
        }
        Table::new(vars, cards, data)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.vars.binary_search(&v).is_ok()
    }

    pub fn card_of(&self, v: Var) -> Option<usize> {
        self.vars.binary_search(&v).ok().map(|i| self.cards[i])
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Entry at a joint state given by a lookup over this table's variables.
    pub fn at(&self, state_of: impl Fn(Var) -> usize) -> f64 {
        let mut idx = 0;
        for (v, &c) in self.vars.iter().zip(&self.cards) {
            idx = idx * c + state_of(*v);
        }
        self.data[idx]
    }

    /// Entry at an explicit state listed in `vars` order.
    pub fn get(&self, states: &[usize]) -> f64 {
        let mut idx = 0;
        for (s, &c) in states.iter().zip(&self.cards) {
            idx = idx * c + s;
        }
        self.data[idx]
    }

    /// Visit every joint state with its value.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        let mut st = vec![0usize; self.cards.len()];
        for &x in &self.data {
            f(&st, x);
            advance(&mut st, &self.cards);
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Table {
        Table { vars: self.vars.clone(), cards: self.cards.clone(), data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, k: f64) -> Table {
        self.map(|x| x * k)
    }

    fn union_layout(&self, other: &Table) -> Result<(Vec<Var>, Vec<usize>), OracleError> {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let mut cards = Vec::with_capacity(vars.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            let take_left = j >= other.vars.len() || (i < self.vars.len() && self.vars[i] <= other.vars[j]);
            if take_left {
                if j < other.vars.len() && self.vars[i] == other.vars[j] {
                    if self.cards[i] != other.cards[j] {
                        return Err(OracleError::Shape(format!("cardinality mismatch on variable #{}", self.vars[i])));
                    }
                    j += 1;
                }
                vars.push(self.vars[i]);
                cards.push(self.cards[i]);
                i += 1;
            } else {
                vars.push(other.vars[j]);
                cards.push(other.cards[j]);
                j += 1;
            }
        }
        checked_size(&cards)?;
        Ok((vars, cards))
    }

    /// Strides of this table's variables within a layout over `vars`.
    fn strides_in(&self, vars: &[Var]) -> Vec<usize> {
        let mut own = vec![0usize; self.vars.len()];
        let mut s = 1;
        for k in (0..self.vars.len()).rev() {
            own[k] = s;
            s *= self.cards[k];
        }
        vars.iter()
            .map(|v| match self.vars.binary_search(v) {
                Ok(k) => own[k],
                Err(_) => 0,
            })
            .collect()
    }

    fn combine(&self, other: &Table, f: impl Fn(f64, f64) -> Result<f64, ()>) -> Result<Table, OracleError> {
        let (vars, cards) = self.union_layout(other)?;
        let sa = self.strides_in(&vars);
        let sb = other.strides_in(&vars);
        let size: usize = cards.iter().product();
        let mut data = Vec::with_capacity(size);
        let mut st = vec![0usize; cards.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            match f(self.data[ia], other.data[ib]) {
                Ok(x) => data.push(x),
                Err(()) => {
                    let state = vars.iter().copied().zip(st.iter().copied()).filter(|(v, _)| other.has_var(*v)).collect();
                    return Err(OracleError::ZeroMass { state });
                }
            }
            // odometer step with incremental offsets
            for k in (0..cards.len()).rev() {
                st[k] += 1;
                ia += sa[k];
                ib += sb[k];
                if st[k] < cards[k] {
                    break;
                }
                ia -= sa[k] * cards[k];
                ib -= sb[k] * cards[k];
                st[k] = 0;
            }
        }
        Ok(Table { vars, cards, data })
    }

    pub fn product(&self, other: &Table) -> Result<Table, OracleError> {
        self.combine(other, |a, b| Ok(a * b))
    }

    /// Pointwise quotient over the union of variables. Fails if a
    /// denominator entry is below [`DIV_EPS`].
    pub fn ratio(&self, other: &Table) -> Result<Table, OracleError> {
        self.combine(other, |a, b| if b.abs() < DIV_EPS { Err(()) } else { Ok(a / b) })
    }

    pub fn add(&self, other: &Table) -> Result<Table, OracleError> {
        self.combine(other, |a, b| Ok(a + b))
    }

    pub fn sub(&self, other: &Table) -> Result<Table, OracleError> {
        self.combine(other, |a, b| Ok(a - b))
    }

    /// Largest absolute entrywise difference (tables broadcast to their union).
    pub fn max_abs_diff(&self, other: &Table) -> Result<f64, OracleError> {
        Ok(self.sub(other)?.data.iter().fold(0.0f64, |m, x| m.max(x.abs())))
    }

    /// Sum out every variable not in `keep`.
    pub fn marginal(&self, keep: &[Var]) -> Table {
        let mut vars = Vec::new();
        let mut cards = Vec::new();
        for (v, &c) in self.vars.iter().zip(&self.cards) {
            if keep.contains(v) {
                vars.push(*v);
                cards.push(c);
            }
        }
        let out_layout = Table { vars: vars.clone(), cards: cards.clone(), data: vec![] };
        let so = out_layout.strides_in(&self.vars);
        let size: usize = cards.iter().product();
        let mut data = vec![0.0; size];
        let mut st = vec![0usize; self.cards.len()];
        let mut io = 0usize;
        for &x in &self.data {
            data[io] += x;
            for k in (0..self.cards.len()).rev() {
                st[k] += 1;
                io += so[k];
                if st[k] < self.cards[k] {
                    break;
                }
                io -= so[k] * self.cards[k];
                st[k] = 0;
            }
        }
        Table { vars, cards, data }
    }

    pub fn sum_out(&self, drop: &[Var]) -> Table {
        let keep: Vec<Var> = self.vars.iter().copied().filter(|v| !drop.contains(v)).collect();
        self.marginal(&keep)
    }

    /// Fix `v` at `state` and drop it.
    pub fn slice(&self, v: Var, state: usize) -> Result<Table, OracleError> {
        let Ok(k) = self.vars.binary_search(&v) else {
            return Err(OracleError::Shape(format!("variable #{v} not in table")));
        };
        if state >= self.cards[k] {
            return Err(OracleError::Shape(format!("state {state} out of range for #{v}")));
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(k);
        cards.remove(k);
        let strides = self.strides_in(&self.vars);
        let base = state * strides[k];
        Table::from_fn(vars, cards, |st| {
            let mut idx = base;
            let mut j = 0;
            for (i, &t) in strides.iter().enumerate() {
                if i != k {
                    idx += st[j] * t;
                    j += 1;
                }
            }
            self.data[idx]
        })
    }

    /// Rename variables through `f`; the result is re-sorted.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> Result<Table, OracleError> {
        let new: Vec<Var> = self.vars.iter().map(|&v| f(v)).collect();
        let mut order: Vec<usize> = (0..new.len()).collect();
        order.sort_by_key(|&i| new[i]);
        if order.windows(2).any(|w| new[w[0]] == new[w[1]]) {
            return Err(OracleError::Shape("rename merges two variables".into()));
        }
        let vars: Vec<Var> = order.iter().map(|&i| new[i]).collect();
        let cards: Vec<usize> = order.iter().map(|&i| self.cards[i]).collect();
        let strides = self.strides_in(&self.vars);
        Table::from_fn(vars, cards, |st| {
            let mut idx = 0;
            for (pos, &i) in order.iter().enumerate() {
                idx += st[pos] * strides[i];
            }
            self.data[idx]
        })
    }

    /// Broadcast over an additional variable (constant along it).
    pub fn extend(&self, v: Var, card: usize) -> Result<Table, OracleError> {
        if let Some(c) = self.card_of(v) {
            if c != card {
                return Err(OracleError::Shape(format!("cardinality mismatch on variable #{v}")));
            }
            return Ok(self.clone());
        }
        let ones = Table { vars: vec![v], cards: vec![card], data: vec![1.0; card] };
        self.product(&ones)
    }

    /// Per-slice sums over `random` for every state of the other variables;
    /// returns the largest deviation from 1.
    pub fn normalization_error(&self, random: &[Var]) -> f64 {
        let ctx: Vec<Var> = self.vars.iter().copied().filter(|v| !random.contains(v)).collect();
        self.marginal(&ctx).data.iter().fold(0.0f64, |m, x| m.max((x - 1.0).abs()))
    }
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Table").field("vars", &self.vars).field("cards", &self.cards).field("data", &self.data).finish()
    }
}

pub(crate) fn checked_size(cards: &[usize]) -> Result<usize, OracleError> {
    let mut size = 1usize;
    for &c in cards {
        size = size.checked_mul(c).filter(|&s| s <= crate::MAX_STATES).ok_or(OracleError::TooLarge)?;
    }
    Ok(size)
}

pub(crate) fn advance(st: &mut [usize], cards: &[usize]) {
    for k in (0..cards.len()).rev() {
        st[k] += 1;
        if st[k] < cards[k] {
            return;
        }
        st[k] = 0;
    }
}
