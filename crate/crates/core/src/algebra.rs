//! Dicke subspaces, collective angular-momentum operators and
//! single-transition pseudo-spin operators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_error, unitarity_error, CMatrix, C64, I};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(v: i32) -> Self {
        HalfInt(2 * v)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Fixed-(N, J) block of N two-level systems. Basis index 0 is M = -J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DickeSubspace {
    n_dots: u32,
    j: HalfInt,
    multiplicity: u64,
}

impl DickeSubspace {
    pub fn n_dots(&self) -> u32 {
        self.n_dots
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.doubled() as usize + 1
    }

    /// M values, ascending from -J.
    pub fn labels(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m_at(i).value()).collect()
    }

    pub fn m_at(&self, index: usize) -> HalfInt {
        HalfInt::from_doubled(-self.j.doubled() + 2 * index as i32)
    }

    pub fn index_of(&self, m: HalfInt) -> Result<usize> {
        let offset = m.doubled() + self.j.doubled();
        if offset < 0 || offset > 2 * self.j.doubled() || offset % 2 != 0 {
            return Err(Error::InvalidIndex(format!("M={m} not in J={} ladder", self.j)));
        }
        Ok((offset / 2) as usize)
    }

    /// Number of degenerate copies D_J of this J inside the 2^N product space.
    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// D_J = (2J+1)/(J+N/2+1) * C(N, N/2+J), evaluated in integers.
pub fn dicke_multiplicity(n_dots: u32, j: HalfInt) -> u64 {
    let k = ((n_dots as i32 + j.doubled()) / 2) as u64;
    let two_j_plus_1 = (j.doubled() + 1) as u64;
    binomial(u64::from(n_dots), k) * two_j_plus_1 / (k + 1)
}

pub fn build_subspace(n_dots: u32, j: HalfInt) -> Result<DickeSubspace> {
    let reject = |reason| Error::InvalidSubspace { n_dots, j2: j.doubled(), reason };
    if n_dots == 0 {
        return Err(reject("need at least one dot"));
    }
    if j.doubled() < 0 || j.doubled() > n_dots as i32 {
        return Err(reject("J outside 0..=N/2"));
    }
    if (n_dots as i32 - j.doubled()) % 2 != 0 {
        return Err(reject("parity of J does not match N/2"));
    }
    Ok(DickeSubspace { n_dots, j, multiplicity: dicke_multiplicity(n_dots, j) })
}

/// All allowed J for N dots, largest first.
pub fn allowed_j(n_dots: u32) -> Vec<HalfInt> {
    (0..=n_dots as i32).rev().step_by(2).map(HalfInt::from_doubled).collect()
}

/// The Hilbert space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Dicke(DickeSubspace),
    /// Tensor product, first factor most significant.
    Product(DickeSubspace, DickeSubspace),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Dicke(s) => s.dim(),
            Space::Product(a, b) => a.dim() * b.dim(),
        }
    }
}

impl From<DickeSubspace> for Space {
    fn from(s: DickeSubspace) -> Self {
        Space::Dicke(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: Space,
    entries: CMatrix,
    hermitian: bool,
    unitary: bool,
}

impl OperatorMatrix {
    /// Wraps `entries`; the Hermitian and unitary flags are detected.
    pub fn new(space: impl Into<Space>, entries: CMatrix) -> Result<Self> {
        let space = space.into();
        let d = space.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::SubspaceMismatch(format!(
                "matrix is {}x{}, space has dimension {d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let hermitian = hermiticity_error(&entries) <= HERMITIAN_TOL;
        let unitary = unitarity_error(&entries) <= UNITARY_TOL;
        Ok(OperatorMatrix { space, entries, hermitian, unitary })
    }

    pub fn zeros(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        OperatorMatrix { space, entries: CMatrix::zeros(d, d), hermitian: true, unitary: false }
    }

    pub fn identity(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        OperatorMatrix { space, entries: CMatrix::identity(d, d), hermitian: true, unitary: true }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// The Dicke subspace, if this operator lives on one.
    pub fn subspace(&self) -> Option<DickeSubspace> {
        match self.space {
            Space::Dicke(s) => Some(s),
            Space::Product(..) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn get(&self, r: usize, s: usize) -> C64 {
        self.entries[(r, s)]
    }

    fn check_space(&self, other: &OperatorMatrix) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SubspaceMismatch(format!("{:?} vs {:?}", self.space, other.space)));
        }
        Ok(())
    }

    pub fn plus(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_space(other)?;
        OperatorMatrix::new(self.space, &self.entries + &other.entries)
    }

    pub fn minus(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_space(other)?;
        OperatorMatrix::new(self.space, &self.entries - &other.entries)
    }

    pub fn times(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_space(other)?;
        OperatorMatrix::new(self.space, &self.entries * &other.entries)
    }

    pub fn scaled(&self, factor: C64) -> OperatorMatrix {
        let entries = &self.entries * factor;
        let hermitian = self.hermitian && factor.im == 0.0;
        let unitary = self.unitary && (factor.norm() - 1.0).abs() < 1e-15;
        OperatorMatrix { space: self.space, entries, hermitian, unitary }
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_space(other)?;
        let e = &self.entries * &other.entries - &other.entries * &self.entries;
        OperatorMatrix::new(self.space, e)
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            space: self.space,
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// Tensor product with `other`; both factors must be Dicke subspaces.
    pub fn kron(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        match (self.space, other.space) {
            (Space::Dicke(a), Space::Dicke(b)) => {
                OperatorMatrix::new(Space::Product(a, b), self.entries.kronecker(&other.entries))
            }
            _ => Err(Error::SubspaceMismatch("kron needs two Dicke factors".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveOps {
    pub jz: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
    pub j2: OperatorMatrix,
}

impl CollectiveOps {
    pub fn jx(&self) -> OperatorMatrix {
        let e = (self.jplus.entries() + self.jminus.entries()) * c(0.5);
        OperatorMatrix::new(self.jz.space(), e).expect("same space")
    }

    pub fn jy(&self) -> OperatorMatrix {
        let e = (self.jplus.entries() - self.jminus.entries()) * (-I * 0.5);
        OperatorMatrix::new(self.jz.space(), e).expect("same space")
    }
}

pub fn collective_ops(sub: DickeSubspace) -> CollectiveOps {
    let d = sub.dim();
    let j = sub.j().value();
    let jz = CMatrix::from_fn(d, d, |r, s| if r == s { c(sub.m_at(r).value()) } else { c(0.0) });
    let mut jp = CMatrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        let m = sub.m_at(i).value();
        jp[(i + 1, i)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let j2 = (&jp * &jm + &jm * &jp) * c(0.5) + &jz * &jz;
    let wrap = |e| OperatorMatrix::new(sub, e).expect("dimension matches subspace");
    CollectiveOps { jz: wrap(jz), jplus: wrap(jp), jminus: wrap(jm), j2: wrap(j2) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Transition `r <-> s` (r < s) along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransitionIndex {
    pub axis: Axis,
    pub r: usize,
    pub s: usize,
}

impl TransitionIndex {
    pub fn new(axis: Axis, r: usize, s: usize) -> Result<Self> {
        if r >= s {
            return Err(Error::InvalidIndex(format!("transition needs r < s, got ({r}, {s})")));
        }
        Ok(TransitionIndex { axis, r, s })
    }

    pub fn x(r: usize, s: usize) -> Result<Self> {
        Self::new(Axis::X, r, s)
    }

    pub fn y(r: usize, s: usize) -> Result<Self> {
        Self::new(Axis::Y, r, s)
    }

    pub fn z(r: usize, s: usize) -> Result<Self> {
        Self::new(Axis::Z, r, s)
    }
}

pub fn transition_op(sub: DickeSubspace, idx: TransitionIndex) -> Result<OperatorMatrix> {
    let TransitionIndex { axis, r, s } = idx;
    if r >= s {
        return Err(Error::InvalidIndex(format!("transition needs r < s, got ({r}, {s})")));
    }
    if s >= sub.dim() {
        return Err(Error::InvalidIndex(format!("transition ({r}, {s}) outside dimension {}", sub.dim())));
    }
    let d = sub.dim();
    let mut e = CMatrix::zeros(d, d);
    match axis {
        Axis::X => {
            e[(r, s)] = c(0.5);
            e[(s, r)] = c(0.5);
        }
        Axis::Y => {
            e[(r, s)] = -I * 0.5;
            e[(s, r)] = I * 0.5;
        }
        Axis::Z => {
            e[(r, r)] = c(0.5);
            e[(s, s)] = c(-0.5);
        }
    }
    OperatorMatrix::new(sub, e)
}
