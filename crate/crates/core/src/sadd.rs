//! Shifted addition `A + (B >> D)` as BDDs, plus a plain integer reference.
//!
//! The shifter is a logarithmic multiplexer cascade (one stage per bit of
//! `D`) and the adder is a ripple-carry chain. The result has `n + 1` output
//! bits, bit `n` being the carry-out.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::bdd::{self, BddError, Manager, NodeRef, VarId, VarKind, VarOrder};

/// Largest supported operand width; integer inputs are packed into `u64`.
pub const MAX_WIDTH: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaddError {
    #[error("operand width must be in 1..={MAX_WIDTH}, got {0}")]
    BadWidth(u32),
    #[error("shift width {d_width} cannot express shift {n} (need at least {min})")]
    ShiftTooNarrow { n: u32, d_width: u32, min: u32 },
    #[error("operand {name}={value} does not fit in {bits} bits")]
    OperandOutOfRange {
        name: &'static str,
        value: u64,
        bits: u32,
    },
    #[error("output bit {index} out of range for width {width}")]
    BitOutOfRange { index: usize, width: usize },
    #[error(transparent)]
    Bdd(#[from] BddError),
}

pub type Result<T, E = SaddError> = std::result::Result<T, E>;

/// Operand widths of one shifted-addition instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SaddParams {
    n: u32,
    d_width: u32,
}

/// Smallest `w` with `2^w >= n + 1`.
pub fn min_shift_width(n: u32) -> u32 {
    u32::BITS - n.leading_zeros()
}

impl SaddParams {
    pub fn new(n: u32, d_width: u32) -> Result<Self> {
        if n == 0 || n > MAX_WIDTH {
            return Err(SaddError::BadWidth(n));
        }
        let min = min_shift_width(n);
        if d_width < min || d_width > MAX_WIDTH {
            return Err(SaddError::ShiftTooNarrow { n, d_width, min });
        }
        Ok(Self { n, d_width })
    }

    /// `d_width = ceil(log2(n + 1))`, the narrowest shift able to encode `n`.
    pub fn minimal(n: u32) -> Result<Self> {
        Self::new(n, min_shift_width(n))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d_width(&self) -> u32 {
        self.d_width
    }

    pub fn num_vars(&self) -> usize {
        (2 * self.n + self.d_width) as usize
    }

    /// All variables: `a0..a(n-1)`, `b0..b(n-1)`, `d0..d(w-1)`.
    pub fn vars(&self) -> Vec<VarId> {
        let regs = [
            (VarKind::A, self.n),
            (VarKind::B, self.n),
            (VarKind::D, self.d_width),
        ];
        regs.into_iter()
            .flat_map(|(kind, w)| (0..w).map(move |i| VarId::new(kind, i)))
            .collect()
    }

    /// Variables in [`SaddParams::vars`] order.
    pub fn canonical_order(&self) -> VarOrder {
        VarOrder::new(self.vars()).expect("canonical variables are distinct")
    }

    /// Uniformly random permutation of all variables.
    pub fn random_order<R: Rng + ?Sized>(&self, rng: &mut R) -> VarOrder {
        let mut vars = self.vars();
        vars.shuffle(rng);
        VarOrder::new(vars).expect("shuffled variables are distinct")
    }

    pub fn contains(&self, var: VarId) -> bool {
        let width = match var.kind {
            VarKind::A | VarKind::B => self.n,
            VarKind::D => self.d_width,
        };
        var.index < width
    }

    fn mask(bits: u32) -> u64 {
        if bits >= 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        }
    }

    /// Packs integer operands, checking their ranges.
    pub fn input(&self, a: u64, b: u64, d: u64) -> Result<SaddInput> {
        for (name, value, bits) in [("A", a, self.n), ("B", b, self.n), ("D", d, self.d_width)] {
            if value & !Self::mask(bits) != 0 {
                return Err(SaddError::OperandOutOfRange { name, value, bits });
            }
        }
        Ok(SaddInput { a, b, d })
    }
}

/// A total assignment to the `A`, `B` and `D` registers, bit `i` of each field
/// being variable index `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SaddInput {
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

impl SaddInput {
    pub fn get(&self, var: VarId) -> bool {
        let word = match var.kind {
            VarKind::A => self.a,
            VarKind::B => self.b,
            VarKind::D => self.d,
        };
        var.index < 64 && word >> var.index & 1 == 1
    }

    pub fn set(&mut self, var: VarId, value: bool) {
        let word = match var.kind {
            VarKind::A => &mut self.a,
            VarKind::B => &mut self.b,
            VarKind::D => &mut self.d,
        };
        if value {
            *word |= 1 << var.index;
        } else {
            *word &= !(1 << var.index);
        }
    }

    pub fn to_assignment(&self, params: &SaddParams) -> bdd::Assignment {
        params
            .vars()
            .into_iter()
            .map(|v| (v, self.get(v)))
            .collect()
    }
}

/// `A + floor(B / 2^D)`; shifts of `n` or more contribute nothing.
pub fn oracle_sadd(params: &SaddParams, a: u64, b: u64, d: u64) -> Result<u64> {
    let x = params.input(a, b, d)?;
    Ok(sadd_value(x))
}

/// Unchecked variant of [`oracle_sadd`] on packed inputs.
pub fn sadd_value(x: SaddInput) -> u64 {
    let shifted = if x.d >= 64 { 0 } else { x.b >> x.d };
    x.a + shifted
}

/// Bit `m` of the shifted addition on packed inputs.
pub fn sadd_bit(x: SaddInput, m: u32) -> bool {
    sadd_value(x) >> m & 1 == 1
}

/// Multi-bit function: one BDD root per output bit, LSB first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVecFn {
    bits: Vec<NodeRef>,
}

impl BitVecFn {
    pub fn new(bits: Vec<NodeRef>) -> Self {
        Self { bits }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[NodeRef] {
        &self.bits
    }

    /// The `m`-th output root.
    pub fn output_bit(&self, m: usize) -> Result<NodeRef> {
        self.bits.get(m).copied().ok_or(SaddError::BitOutOfRange {
            index: m,
            width: self.bits.len(),
        })
    }

    /// Evaluates every bit and packs them into an integer (LSB first).
    pub fn eval_value(&self, mgr: &Manager, x: SaddInput) -> Result<u64> {
        let mut value = 0;
        for (i, &bit) in self.bits.iter().enumerate() {
            if mgr.eval_with(bit, |v| Some(x.get(v)))? {
                value |= 1 << i;
            }
        }
        Ok(value)
    }
}

/// Free-function form of [`BitVecFn::output_bit`].
pub fn output_bit(f: &BitVecFn, m: usize) -> Result<NodeRef> {
    f.output_bit(m)
}

fn register(mgr: &mut Manager, kind: VarKind, width: u32) -> Result<Vec<NodeRef>> {
    (0..width)
        .map(|i| Ok(mgr.var(VarId::new(kind, i))?))
        .collect()
}

/// `B >> D` as an `n`-bit vector.
pub fn build_shifter(mgr: &mut Manager, params: &SaddParams) -> Result<BitVecFn> {
    let n = params.n as usize;
    let mut cur = register(mgr, VarKind::B, params.n)?;
    let select = register(mgr, VarKind::D, params.d_width)?;
    let zero = mgr.zero();
    for (stage, &sel) in select.iter().enumerate() {
        let amount = 1usize.checked_shl(stage as u32).unwrap_or(usize::MAX);
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let shifted = i
                .checked_add(amount)
                .and_then(|j| cur.get(j).copied())
                .unwrap_or(zero);
            next.push(mgr.ite(sel, shifted, cur[i])?);
        }
        cur = next;
    }
    Ok(BitVecFn::new(cur))
}

/// `A + (B >> D)` as an `(n + 1)`-bit vector; bit `n` is the carry-out.
pub fn build_sadd(mgr: &mut Manager, params: &SaddParams) -> Result<BitVecFn> {
    let a = register(mgr, VarKind::A, params.n)?;
    let s = build_shifter(mgr, params)?;
    let mut carry = mgr.zero();
    let mut out = Vec::with_capacity(params.n as usize + 1);
    for (&ai, &si) in a.iter().zip(s.bits()) {
        let half = mgr.xor(ai, si)?;
        out.push(mgr.xor(half, carry)?);
        let generate = mgr.and(ai, si)?;
        let propagate = mgr.and(half, carry)?;
        carry = mgr.or(generate, propagate)?;
    }
    out.push(carry);
    Ok(BitVecFn::new(out))
}
