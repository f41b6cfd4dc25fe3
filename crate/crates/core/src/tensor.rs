//! Dense tensors whose axes are labelled by modes.
//!
//! Entries are stored row-major over the tensor's listed mode order. Two
//! tensors compare equal when they carry the same modes and agree after the
//! axes are aligned by mode id, so the listed order is only a storage detail.
//! Serialization always uses the canonical order (ascending mode id).
//!
//! Indices are 0-based throughout the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::{dispatch, FieldError, FieldKind, Floats, PrimeRing, Rationals, Ring, Scalar};

/// Identifier of a mode (a hyperedge).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeId(pub String);

/// Identifier of a network vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

macro_rules! string_id {
    ($t:ident) => {
        impl $t {
            pub fn new(s: impl Into<String>) -> Self {
                $t(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }
        impl From<&str> for $t {
            fn from(s: &str) -> Self {
                $t(s.to_string())
            }
        }
        impl From<String> for $t {
            fn from(s: String) -> Self {
                $t(s)
            }
        }
        impl From<&String> for $t {
            fn from(s: &String) -> Self {
                $t(s.clone())
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}
string_id!(ModeId);
string_id!(VertexId);

/// A named axis with index set `0..length`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub id: ModeId,
    pub length: usize,
}

impl Mode {
    pub fn new(id: impl Into<ModeId>, length: usize) -> Self {
        Mode {
            id: id.into(),
            length,
        }
    }
}

/// Errors from tensor construction and manipulation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("position does not match the tensor's modes")]
    BadPosition,
    #[error("tensors have different orders ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("mode {0} occurs in both operands")]
    ModeCollision(ModeId),
    #[error("rows must be a nonempty proper subset of the modes")]
    BadBipartition,
    #[error("rank is not computed over f64")]
    FloatRankRefused,
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("mode {0} is listed twice")]
    DuplicateMode(ModeId),
    #[error("mode {0} has length zero")]
    ZeroLength(ModeId),
    #[error("unknown mode {0}")]
    UnknownMode(ModeId),
    #[error("volume overflows the address space")]
    TooLarge,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Typed dense storage.
#[derive(Clone, Debug)]
pub(crate) enum Entries {
    Rational(Vec<BigRational>),
    Prime(u64, Vec<u64>),
    Float(Vec<f64>),
}

impl Entries {
    pub(crate) fn kind(&self) -> FieldKind {
        match self {
            Entries::Rational(_) => FieldKind::Rational,
            Entries::Prime(p, _) => FieldKind::Prime(*p),
            Entries::Float(_) => FieldKind::Float64,
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            Entries::Rational(v) => v.len(),
            Entries::Prime(_, v) => v.len(),
            Entries::Float(v) => v.len(),
        }
    }
}

/// A ring that can borrow and build [`Entries`] of its own element type.
pub(crate) trait Dense: Ring {
    fn view<'a>(&self, e: &'a Entries) -> &'a [Self::Elem];
    fn wrap(&self, v: Vec<Self::Elem>) -> Entries;
}

impl Dense for Rationals {
    fn view<'a>(&self, e: &'a Entries) -> &'a [BigRational] {
        match e {
            Entries::Rational(v) => v,
            _ => panic!("storage is not rational"),
        }
    }
    fn wrap(&self, v: Vec<BigRational>) -> Entries {
        Entries::Rational(v)
    }
}

impl Dense for PrimeRing {
    fn view<'a>(&self, e: &'a Entries) -> &'a [u64] {
        match e {
            Entries::Prime(p, v) if *p == self.0 => v,
            _ => panic!("storage is not GF({})", self.0),
        }
    }
    fn wrap(&self, v: Vec<u64>) -> Entries {
        Entries::Prime(self.0, v)
    }
}

impl Dense for Floats {
    fn view<'a>(&self, e: &'a Entries) -> &'a [f64] {
        match e {
            Entries::Float(v) => v,
            _ => panic!("storage is not f64"),
        }
    }
    fn wrap(&self, v: Vec<f64>) -> Entries {
        Entries::Float(v)
    }
}

/// An assignment of an index to each mode of a tensor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Position(pub BTreeMap<ModeId, usize>);

impl Position {
    pub fn new() -> Self {
        Position(BTreeMap::new())
    }

    pub fn with(mut self, mode: impl Into<ModeId>, index: usize) -> Self {
        self.0.insert(mode.into(), index);
        self
    }
}

/// Product of mode lengths, checked for overflow.
pub(crate) fn volume_of(modes: &[Mode]) -> Result<usize, TensorError> {
    modes
        .iter()
        .try_fold(1usize, |acc, m| acc.checked_mul(m.length))
        .ok_or(TensorError::TooLarge)
}

/// Row-major strides for a list of lengths.
pub(crate) fn strides(lengths: &[usize]) -> Vec<usize> {
    let mut s = vec![1; lengths.len()];
    for k in (0..lengths.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * lengths[k + 1];
    }
    s
}

/// Advances a row-major multi-index; returns false after the last one.
pub(crate) fn advance(index: &mut [usize], lengths: &[usize]) -> bool {
    for k in (0..index.len()).rev() {
        index[k] += 1;
        if index[k] < lengths[k] {
            return true;
        }
        index[k] = 0;
    }
    false
}

fn check_modes(modes: &[Mode]) -> Result<(), TensorError> {
    let mut seen = BTreeSet::new();
    for m in modes {
        if m.length == 0 {
            return Err(TensorError::ZeroLength(m.id.clone()));
        }
        if !seen.insert(&m.id) {
            return Err(TensorError::DuplicateMode(m.id.clone()));
        }
    }
    Ok(())
}

/// A dense tensor over modes.
#[derive(Clone, Debug)]
pub struct Tensor {
    modes: Vec<Mode>,
    pub(crate) entries: Entries,
}

impl Tensor {
    pub(crate) fn from_entries(modes: Vec<Mode>, entries: Entries) -> Result<Tensor, TensorError> {
        check_modes(&modes)?;
        let expected = volume_of(&modes)?;
        if entries.len() != expected {
            return Err(TensorError::ShapeMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(Tensor { modes, entries })
    }

    /// Builds a tensor from scalars listed row-major over `modes`.
    pub fn from_scalars(modes: Vec<Mode>, field: FieldKind, data: Vec<Scalar>) -> Result<Tensor, TensorError> {
        for s in &data {
            if s.kind() != field {
                return Err(FieldError::KindMismatch(field, s.kind()).into());
            }
        }
        let entries = dispatch!(field, r => r.wrap(data.iter().map(|s| r.from_scalar(s)).collect()));
        Tensor::from_entries(modes, entries)
    }

    /// Builds a tensor from integers listed row-major over `modes`.
    pub fn from_i64(modes: Vec<Mode>, field: FieldKind, data: &[i64]) -> Result<Tensor, TensorError> {
        Tensor::from_scalars(modes, field, data.iter().map(|&v| field.from_i64(v)).collect())
    }

    /// Builds a tensor by evaluating `f` at every multi-index (listed order).
    pub fn from_fn(
        modes: Vec<Mode>,
        field: FieldKind,
        mut f: impl FnMut(&[usize]) -> Scalar,
    ) -> Result<Tensor, TensorError> {
        check_modes(&modes)?;
        let lengths: Vec<usize> = modes.iter().map(|m| m.length).collect();
        let volume = volume_of(&modes)?;
        let mut data = Vec::with_capacity(volume);
        let mut idx = vec![0; modes.len()];
        loop {
            data.push(f(&idx));
            if !advance(&mut idx, &lengths) {
                break;
            }
        }
        Tensor::from_scalars(modes, field, data)
    }

    pub fn zeros(modes: Vec<Mode>, field: FieldKind) -> Result<Tensor, TensorError> {
        let zero = field.zero();
        Tensor::from_fn(modes, field, |_| zero.clone())
    }

    /// An order-0 tensor.
    pub fn scalar(s: Scalar) -> Tensor {
        let field = s.kind();
        Tensor::from_scalars(Vec::new(), field, vec![s]).expect("one entry")
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode_ids(&self) -> Vec<ModeId> {
        self.modes.iter().map(|m| m.id.clone()).collect()
    }

    pub fn mode(&self, id: &ModeId) -> Option<&Mode> {
        self.modes.iter().find(|m| &m.id == id)
    }

    pub fn field(&self) -> FieldKind {
        self.entries.kind()
    }

    pub fn order(&self) -> usize {
        self.modes.len()
    }

    pub fn volume(&self) -> usize {
        self.entries.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.length).collect()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        let mut off = 0;
        for (m, &i) in self.modes.iter().zip(idx) {
            off = off * m.length + i;
        }
        off
    }

    /// Entry at a multi-index given in listed mode order.
    pub fn get(&self, idx: &[usize]) -> Scalar {
        assert_eq!(idx.len(), self.order(), "index arity");
        for (m, &i) in self.modes.iter().zip(idx) {
            assert!(i < m.length, "index {i} out of range for mode {}", m.id);
        }
        self.get_flat(self.offset(idx))
    }

    /// Entry at a row-major offset in listed order.
    pub fn get_flat(&self, offset: usize) -> Scalar {
        dispatch!(self.field(), r => r.to_scalar(&r.view(&self.entries)[offset]))
    }

    /// Entry at a mode assignment.
    pub fn entry_at(&self, p: &Position) -> Result<Scalar, TensorError> {
        if p.0.len() != self.order() {
            return Err(TensorError::BadPosition);
        }
        let mut idx = Vec::with_capacity(self.order());
        for m in &self.modes {
            let i = *p.0.get(&m.id).ok_or(TensorError::BadPosition)?;
            if i >= m.length {
                return Err(TensorError::BadPosition);
            }
            idx.push(i);
        }
        Ok(self.get_flat(self.offset(&idx)))
    }

    /// All entries in listed row-major order.
    pub fn scalars(&self) -> Vec<Scalar> {
        dispatch!(self.field(), r => r.view(&self.entries).iter().map(|e| r.to_scalar(e)).collect())
    }

    /// The same tensor with axes reordered to `order`.
    pub fn permuted(&self, order: &[ModeId]) -> Result<Tensor, TensorError> {
        if order.len() != self.order() {
            return Err(TensorError::OrderMismatch(order.len(), self.order()));
        }
        let mut perm = Vec::with_capacity(order.len());
        for id in order {
            let k = self
                .modes
                .iter()
                .position(|m| &m.id == id)
                .ok_or_else(|| TensorError::UnknownMode(id.clone()))?;
            perm.push(k);
        }
        let new_modes: Vec<Mode> = perm.iter().map(|&k| self.modes[k].clone()).collect();
        check_modes(&new_modes)?;
        if perm.iter().enumerate().all(|(a, &b)| a == b) {
            return Ok(self.clone());
        }
        let old_strides = strides(&self.shape());
        let lengths: Vec<usize> = new_modes.iter().map(|m| m.length).collect();
        let src: Vec<usize> = perm.iter().map(|&k| old_strides[k]).collect();
        let entries = dispatch!(self.field(), r => {
            let data = r.view(&self.entries);
            let mut out = Vec::with_capacity(data.len());
            let mut idx = vec![0; lengths.len()];
            loop {
                let off: usize = idx.iter().zip(&src).map(|(i, s)| i * s).sum();
                out.push(data[off].clone());
                if !advance(&mut idx, &lengths) {
                    break;
                }
            }
            r.wrap(out)
        });
        Tensor::from_entries(new_modes, entries)
    }

    /// The tensor with modes in ascending id order.
    pub fn canonical(&self) -> Tensor {
        let mut ids = self.mode_ids();
        ids.sort();
        self.permuted(&ids).expect("own modes")
    }

    /// Renames modes through `f`; lengths and entries are kept.
    pub fn renamed(&self, mut f: impl FnMut(&ModeId) -> ModeId) -> Result<Tensor, TensorError> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode {
                id: f(&m.id),
                length: m.length,
            })
            .collect();
        Tensor::from_entries(modes, self.entries.clone())
    }

    /// Kronecker product along a pairing `(mode of self, mode of other, new mode)`.
    ///
    /// An index `i` of `self` and `j` of `other` (whose mode has length `m`)
    /// combine to `i * m + j`, so `self` supplies the more significant digit.
    pub fn kronecker(&self, other: &Tensor, pairing: &[(ModeId, ModeId, ModeId)]) -> Result<Tensor, TensorError> {
        if self.order() != other.order() {
            return Err(TensorError::OrderMismatch(self.order(), other.order()));
        }
        if pairing.len() != self.order() {
            return Err(TensorError::OrderMismatch(pairing.len(), self.order()));
        }
        if self.field() != other.field() {
            return Err(FieldError::KindMismatch(self.field(), other.field()).into());
        }
        let s_order: Vec<ModeId> = pairing.iter().map(|p| p.0.clone()).collect();
        let t_order: Vec<ModeId> = pairing.iter().map(|p| p.1.clone()).collect();
        let s = self.permuted(&s_order)?;
        let t = other.permuted(&t_order)?;
        let modes: Vec<Mode> = pairing
            .iter()
            .zip(s.modes.iter().zip(&t.modes))
            .map(|(p, (a, b))| Mode::new(p.2.clone(), a.length * b.length))
            .collect();
        let t_len = t.shape();
        let field = self.field();
        let mut si = vec![0; modes.len()];
        let mut ti = vec![0; modes.len()];
        Tensor::from_fn(modes, field, |idx| {
            for (k, &x) in idx.iter().enumerate() {
                si[k] = x / t_len[k];
                ti[k] = x % t_len[k];
            }
            s.get(&si).mul(&t.get(&ti)).expect("same field")
        })
    }

    /// Outer product over disjoint mode sets; modes of `self` come first.
    pub fn outer(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        if let Some(m) = self.modes.iter().find(|m| other.mode(&m.id).is_some()) {
            return Err(TensorError::ModeCollision(m.id.clone()));
        }
        if self.field() != other.field() {
            return Err(FieldError::KindMismatch(self.field(), other.field()).into());
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        let entries = dispatch!(self.field(), r => {
            let a = r.view(&self.entries);
            let b = r.view(&other.entries);
            let mut out = Vec::with_capacity(a.len() * b.len());
            for x in a {
                for y in b {
                    out.push(r.mul(x, y));
                }
            }
            r.wrap(out)
        });
        Tensor::from_entries(modes, entries)
    }

    /// Entrywise sum of two tensors on the same modes.
    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        let other = self.align(other)?;
        let entries = dispatch!(self.field(), r => {
            let a = r.view(&self.entries);
            let b = r.view(&other.entries);
            r.wrap(a.iter().zip(b).map(|(x, y)| r.add(x, y)).collect())
        });
        Tensor::from_entries(self.modes.clone(), entries)
    }

    /// Multiplies every entry by `c`.
    pub fn scale(&self, c: &Scalar) -> Result<Tensor, TensorError> {
        if c.kind() != self.field() {
            return Err(FieldError::KindMismatch(self.field(), c.kind()).into());
        }
        let entries = dispatch!(self.field(), r => {
            let c = r.from_scalar(c);
            r.wrap(r.view(&self.entries).iter().map(|x| r.mul(&c, x)).collect())
        });
        Tensor::from_entries(self.modes.clone(), entries)
    }

    /// `other` permuted into `self`'s mode order, after checking compatibility.
    fn align(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        if self.field() != other.field() {
            return Err(FieldError::KindMismatch(self.field(), other.field()).into());
        }
        for m in &self.modes {
            match other.mode(&m.id) {
                Some(o) if o.length == m.length => {}
                _ => return Err(TensorError::UnknownMode(m.id.clone())),
            }
        }
        other.permuted(&self.mode_ids())
    }

    /// The flattening whose rows are indexed by `rows` and columns by the rest.
    ///
    /// Row and column indices enumerate their modes row-major in ascending id order.
    pub fn flatten(&self, rows: &[ModeId]) -> Result<Matrix, TensorError> {
        let row_set: BTreeSet<&ModeId> = rows.iter().collect();
        if row_set.is_empty() || row_set.len() >= self.order() || row_set.len() != rows.len() {
            return Err(TensorError::BadBipartition);
        }
        for id in &row_set {
            if self.mode(id).is_none() {
                return Err(TensorError::BadBipartition);
            }
        }
        let mut row_ids: Vec<ModeId> = row_set.into_iter().cloned().collect();
        row_ids.sort();
        let mut col_ids: Vec<ModeId> = self
            .mode_ids()
            .into_iter()
            .filter(|id| !row_ids.contains(id))
            .collect();
        col_ids.sort();
        let nrows: usize = row_ids.iter().map(|id| self.mode(id).unwrap().length).product();
        let ncols: usize = col_ids.iter().map(|id| self.mode(id).unwrap().length).product();
        let mut order = row_ids;
        order.extend(col_ids);
        let t = self.permuted(&order)?;
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            entries: t.entries,
        })
    }

    /// Inverse of [`Tensor::flatten`]: reshapes a matrix back onto row and column modes.
    pub fn unflatten(m: &Matrix, rows: &[Mode], cols: &[Mode]) -> Result<Tensor, TensorError> {
        let mut rows = rows.to_vec();
        let mut cols = cols.to_vec();
        rows.sort();
        cols.sort();
        if volume_of(&rows)? != m.rows || volume_of(&cols)? != m.cols {
            return Err(TensorError::ShapeMismatch {
                expected: m.rows * m.cols,
                got: volume_of(&rows)? * volume_of(&cols)?,
            });
        }
        rows.extend(cols);
        Tensor::from_entries(rows, m.entries.clone())
    }
}

impl PartialEq for Tensor {
    fn eq(&self, other: &Tensor) -> bool {
        if self.order() != other.order() || self.field() != other.field() {
            return false;
        }
        let Ok(o) = self.align(other) else {
            return false;
        };
        dispatch!(self.field(), r => r.view(&self.entries) == r.view(&o.entries))
    }
}

/// A dense matrix, the target of flattenings.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Matrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field() == other.field()
            && dispatch!(self.field(), r => r.view(&self.entries) == r.view(&other.entries))
    }
}

impl Matrix {
    pub fn from_scalars(rows: usize, cols: usize, field: FieldKind, data: Vec<Scalar>) -> Result<Matrix, TensorError> {
        let t = Tensor::from_scalars(vec![Mode::new("row", rows), Mode::new("col", cols)], field, data)?;
        Ok(Matrix {
            rows,
            cols,
            entries: t.entries,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, field: FieldKind, data: &[i64]) -> Result<Matrix, TensorError> {
        Matrix::from_scalars(rows, cols, field, data.iter().map(|&v| field.from_i64(v)).collect())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: FieldKind,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Result<Matrix, TensorError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::from_scalars(rows, cols, field, data)
    }

    pub fn identity(n: usize, field: FieldKind) -> Matrix {
        Matrix::from_fn(n, n, field, |i, j| field.from_i64((i == j) as i64)).expect("square")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldKind {
        self.entries.kind()
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        dispatch!(self.field(), r => r.to_scalar(&r.view(&self.entries)[i * self.cols + j]))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, self.field(), |i, j| self.get(j, i)).expect("shape")
    }

    /// Views the matrix as a two-mode tensor.
    pub fn to_tensor(&self, row: impl Into<ModeId>, col: impl Into<ModeId>) -> Result<Tensor, TensorError> {
        Tensor::from_entries(
            vec![Mode::new(row, self.rows), Mode::new(col, self.cols)],
            self.entries.clone(),
        )
    }

    pub fn rank(&self) -> Result<usize, TensorError> {
        matrix_rank(self)
    }
}

/// Rank over the matrix's field.
///
/// Rationals use fraction-free (Bareiss) elimination on integer rows;
/// prime fields use ordinary elimination. Floats are refused.
pub fn matrix_rank(m: &Matrix) -> Result<usize, TensorError> {
    match &m.entries {
        Entries::Float(_) => Err(TensorError::FloatRankRefused),
        Entries::Prime(p, data) => Ok(rank_mod_p(compress(data, m.rows, m.cols, |x| *x == 0), *p)),
        Entries::Rational(data) => Ok(rank_bareiss(compress(data, m.rows, m.cols, |x| x.is_zero()))),
    }
}

/// Dense rows restricted to the nonzero rows and columns.
fn compress<T: Clone>(data: &[T], rows: usize, cols: usize, is_zero: impl Fn(&T) -> bool) -> Vec<Vec<T>> {
    let live_rows: Vec<usize> = (0..rows)
        .filter(|&i| (0..cols).any(|j| !is_zero(&data[i * cols + j])))
        .collect();
    let live_cols: Vec<usize> = (0..cols)
        .filter(|&j| live_rows.iter().any(|&i| !is_zero(&data[i * cols + j])))
        .collect();
    live_rows
        .iter()
        .map(|&i| live_cols.iter().map(|&j| data[i * cols + j].clone()).collect())
        .collect()
}

fn rank_mod_p(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let ring = PrimeRing(p);
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = ring.inv(&a[rank][c]).expect("nonzero pivot");
        let pivot_row: Vec<u64> = a[rank].iter().map(|x| ring.mul(x, &inv)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for j in c..cols {
                    row[j] = ring.sub(&row[j], &ring.mul(&f, &pivot_row[j]));
                }
            }
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn rank_bareiss(a: Vec<Vec<BigRational>>) -> usize {
    // Clear denominators row by row; this does not change the rank.
    let mut m: Vec<Vec<BigInt>> = a
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pr = &top[rank];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let v = &pr[c] * &row[j] - &row[c] * &pr[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

#[derive(Serialize, Deserialize)]
struct TensorLiteral {
    modes: Vec<Mode>,
    field: FieldKind,
    data: Vec<serde_json::Value>,
}

impl Serialize for Tensor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let c = self.canonical();
        TensorLiteral {
            modes: c.modes.clone(),
            field: c.field(),
            data: c
                .scalars()
                .iter()
                .map(|x| serde_json::Value::String(x.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let lit = TensorLiteral::deserialize(d)?;
        let data = lit
            .data
            .iter()
            .map(|v| {
                let text = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(D::Error::custom(format!("bad scalar {other}"))),
                };
                lit.field.parse_scalar(&text).map_err(D::Error::custom)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Tensor::from_scalars(lit.modes, lit.field, data).map_err(D::Error::custom)
    }
}
