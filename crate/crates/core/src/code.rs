//! Code parameters and the implicit parity-check matrices `A_{t,i}`.
//!
//! Codewords are `l x n` arrays whose columns (nodes) satisfy
//! `sum_i A_{t,i} C_i = 0` for `t = 0..r`. Each `A_{t,i}` is an `l x l` matrix
//! with at most `s` nonzeros per row, so it is never stored: row `a` is
//! produced on demand by [`CodeParams::row_terms`].
//!
//! Node `i` (1-based) sits at axis `v` and digit `u` with `i = (v-1)*base + u + 1`.
//! Row `a` of its matrix depends only on the `v`-th digit `a_v` of `a`:
//!
//! * `a_v < u`: a single entry `lambda_i^t` on the diagonal,
//! * `a_v > u`: a single entry `gamma * lambda_i^t` on the diagonal,
//! * `a_v = u`: entries `lambda_{(v-1)*base+w+1}^t` at columns `a(v, w)`, `w = 0..base`.
//!
//! The grouped construction uses `base = s` and `m` axes (`n = s*m`, `l = s^m`).
//! The shortened construction uses `base = r` and `m + 1` axes; its last axis
//! carries only `r'` real nodes (`n = r*m + r'`, `l = r^(m+1)`), while all
//! `r*(m+1)` labels keep their `lambda`.

use std::fmt;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldSpec};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `n = s*m` nodes in `m` groups of size `s`, `l = s^m`.
    Grouped,
    /// `n = r*m + r'` nodes, `l = r^(m+1)`.
    Shortened,
}

impl Construction {
    pub fn id(self) -> u8 {
        match self {
            Construction::Grouped => 1,
            Construction::Shortened => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Construction::Grouped),
            2 => Ok(Construction::Shortened),
            _ => Err(Error::InvalidParams(format!("unknown construction {id}"))),
        }
    }
}

/// The serializable parameter tuple. `lambda` and `gamma` are always re-derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub construction: Construction,
    pub s: u16,
    pub r: u16,
    pub m: u16,
    pub r_prime: u16,
    pub field: FieldSpec,
}

impl CodeSpec {
    pub const ENCODED_LEN: usize = 9 + FieldSpec::ENCODED_LEN;

    pub fn grouped(s: u16, r: u16, m: u16, field: FieldSpec) -> Self {
        Self {
            construction: Construction::Grouped,
            s,
            r,
            m,
            r_prime: 0,
            field,
        }
    }

    pub fn shortened(r: u16, m: u16, r_prime: u16, field: FieldSpec) -> Self {
        Self {
            construction: Construction::Shortened,
            s: r,
            r,
            m,
            r_prime,
            field,
        }
    }

    pub fn build(&self) -> Result<CodeParams> {
        CodeParams::new(*self)
    }

    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        out[0] = self.construction.id();
        out[1..3].copy_from_slice(&self.s.to_le_bytes());
        out[3..5].copy_from_slice(&self.r.to_le_bytes());
        out[5..7].copy_from_slice(&self.m.to_le_bytes());
        out[7..9].copy_from_slice(&self.r_prime.to_le_bytes());
        out[9..].copy_from_slice(&self.field.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < Self::ENCODED_LEN {
            return Err(Error::InvalidParams(format!(
                "code spec needs {} bytes, got {}",
                Self::ENCODED_LEN,
                bytes.len()
            )));
        }
        let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
        Ok(Self {
            construction: Construction::from_id(bytes[0])?,
            s: u16_at(1),
            r: u16_at(3),
            m: u16_at(5),
            r_prime: u16_at(7),
            field: FieldSpec::from_bytes(&bytes[9..])?,
        })
    }

    /// Lowercase hex of the serialized spec.
    pub fn fingerprint(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.construction {
            Construction::Grouped => write!(
                f,
                "grouped(s={}, r={}, m={}) over {}",
                self.s, self.r, self.m, self.field
            ),
            Construction::Shortened => write!(
                f,
                "shortened(r={}, m={}, r'={}) over {}",
                self.r, self.m, self.r_prime, self.field
            ),
        }
    }
}

/// A coordinate index `a` together with its fixed-width digit expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitAddress {
    value: usize,
    base: usize,
    width: usize,
}

impl DigitAddress {
    pub fn new(value: usize, base: usize, width: usize) -> Result<Self> {
        let limit = base.pow(width as u32);
        if value >= limit {
            return Err(Error::OutOfRange(format!("coordinate {value} >= {limit}")));
        }
        Ok(Self { value, base, width })
    }

    pub fn value(&self) -> usize {
        self.value
    }

    /// Digit `v` (1-based, least significant first).
    pub fn digit(&self, v: usize) -> Result<usize> {
        self.check_axis(v)?;
        Ok(self.value / self.base.pow(v as u32 - 1) % self.base)
    }

    /// `a(v, u)`: this address with digit `v` replaced by `u`.
    pub fn with_digit(&self, v: usize, u: usize) -> Result<Self> {
        self.check_axis(v)?;
        if u >= self.base {
            return Err(Error::OutOfRange(format!(
                "digit {u} >= base {}",
                self.base
            )));
        }
        let place = self.base.pow(v as u32 - 1);
        let old = self.value / place % self.base;
        Ok(Self {
            value: self.value - old * place + u * place,
            ..*self
        })
    }

    /// Digits from most to least significant, `(a_width, ..., a_1)`.
    pub fn digits(&self) -> Vec<usize> {
        (1..=self.width)
            .rev()
            .map(|v| self.value / self.base.pow(v as u32 - 1) % self.base)
            .collect()
    }

    fn check_axis(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.width {
            return Err(Error::OutOfRange(format!(
                "axis {v} outside 1..={}",
                self.width
            )));
        }
        Ok(())
    }
}

/// One nonzero of a parity-check row: column `col`, value `lambda_label^t`,
/// multiplied by `gamma` when `scaled`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowTerm {
    pub col: usize,
    pub label: usize,
    pub scaled: bool,
}

/// Iterator over the nonzeros of row `a` of `A_{t,i}` (for any `t`).
pub struct RowTerms {
    single: Option<RowTerm>,
    origin: usize,
    stride: usize,
    first_label: usize,
    next: usize,
    end: usize,
}

impl Iterator for RowTerms {
    type Item = RowTerm;

    fn next(&mut self) -> Option<RowTerm> {
        if let Some(t) = self.single.take() {
            return Some(t);
        }
        if self.next >= self.end {
            return None;
        }
        let w = self.next;
        self.next += 1;
        Some(RowTerm {
            col: self.origin + w * self.stride,
            label: self.first_label + w,
            scaled: false,
        })
    }
}

/// Axis and digit of a node: node `i = (axis-1)*base + digit + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodePosition {
    pub axis: usize,
    pub digit: usize,
}

/// A fully resolved code instance. Immutable after construction.
#[derive(Clone, Debug)]
pub struct CodeParams {
    spec: CodeSpec,
    field: Field,
    n: usize,
    k: usize,
    l: usize,
    r: usize,
    base: usize,
    axes: usize,
    lambdas: Vec<FieldElement>,
    gamma: FieldElement,
    // lambda_pows[(label - 1) * r + t] = lambda_label^t
    lambda_pows: Vec<FieldElement>,
    places: Vec<usize>,
}

impl CodeParams {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        let (s, r, m, rp) = (
            spec.s as usize,
            spec.r as usize,
            spec.m as usize,
            spec.r_prime as usize,
        );
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let q = spec.field.order();
        let (n, base, axes, labels) = match spec.construction {
            Construction::Grouped => {
                if s == 0 || m == 0 {
                    return bad(format!("s >= 1 and m >= 1 required (s={s}, m={m})"));
                }
                if s > r {
                    return bad(format!("s <= r violated: s={s} > r={r}"));
                }
                if rp != 0 {
                    return bad(format!(
                        "r' must be 0 for the grouped construction (r'={rp})"
                    ));
                }
                let n = s * m;
                if r > n {
                    return bad(format!("r <= s*m violated: r={r} > s*m={n}"));
                }
                (n, s, m, n)
            }
            Construction::Shortened => {
                if s != r {
                    return bad(format!("shortened construction uses s = r (s={s}, r={r})"));
                }
                if rp == 0 || rp >= r {
                    return bad(format!("1 <= r' <= r-1 violated: r'={rp}, r={r}"));
                }
                if m == 0 {
                    return bad("m >= 1 required for the shortened construction".into());
                }
                (r * m + rp, r, m + 1, r * (m + 1))
            }
        };
        if r >= n {
            return bad(format!("k = n - r >= 1 violated: n={n}, r={r}"));
        }
        if q < labels as u64 {
            let need = match spec.construction {
                Construction::Grouped => "n",
                Construction::Shortened => "r(m+1)",
            };
            return bad(format!("|F| >= {need} violated: |F|={q} < {labels}"));
        }
        if q < 3 {
            return bad(format!(
                "|F| >= 3 needed for gamma outside {{0, 1}}, |F|={q}"
            ));
        }
        let l = base
            .checked_pow(axes as u32)
            .filter(|&l| l <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidParams(format!("l = {base}^{axes} is too large")))?;

        let field = Field::new(spec.field);
        let lambdas: Vec<_> = (0..labels as u64)
            .map(|j| field.enumerate(j))
            .collect::<Result<_>>()?;
        let gamma = field.enumerate(2)?;
        let mut lambda_pows = Vec::with_capacity(labels * r);
        for &lam in &lambdas {
            let mut p = field.one();
            for _ in 0..r {
                lambda_pows.push(p);
                p = field.mul(p, lam);
            }
        }
        let places = (0..axes).map(|v| base.pow(v as u32)).collect();
        Ok(Self {
            spec,
            field,
            n,
            k: n - r,
            l,
            r,
            base,
            axes,
            lambdas,
            gamma,
            lambda_pows,
            places,
        })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn construction(&self) -> Construction {
        self.spec.construction
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Group size `s` (equal to `r` for the shortened construction).
    pub fn s(&self) -> usize {
        self.base
    }

    pub fn m(&self) -> usize {
        self.spec.m as usize
    }

    pub fn r_prime(&self) -> usize {
        self.spec.r_prime as usize
    }

    /// Number of digit axes: `m`, or `m + 1` for the shortened construction.
    pub fn axes(&self) -> usize {
        self.axes
    }

    /// Number of `lambda` labels (`n`, or `r(m+1)` for the shortened construction).
    pub fn label_count(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[FieldElement] {
        &self.lambdas
    }

    pub fn lambda(&self, label: usize) -> FieldElement {
        self.lambdas[label - 1]
    }

    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    #[inline]
    pub fn lambda_pow(&self, label: usize, t: usize) -> FieldElement {
        self.lambda_pows[(label - 1) * self.r + t]
    }

    /// Value of a [`RowTerm`] in the `t`-th parity matrix.
    #[inline]
    pub fn term_value(&self, term: RowTerm, t: usize) -> FieldElement {
        let v = self.lambda_pow(term.label, t);
        if term.scaled {
            self.field.mul(self.gamma, v)
        } else {
            v
        }
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange(format!(
                "node {i} outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn check_coord(&self, a: usize) -> Result<()> {
        if a >= self.l {
            return Err(Error::OutOfRange(format!(
                "coordinate {a} outside 0..{}",
                self.l
            )));
        }
        Ok(())
    }

    pub fn position(&self, i: usize) -> Result<NodePosition> {
        self.check_node(i)?;
        Ok(NodePosition {
            axis: (i - 1) / self.base + 1,
            digit: (i - 1) % self.base,
        })
    }

    /// Nodes present on axis `v` (the last axis of a shortened code is partial).
    pub fn group(&self, v: usize) -> RangeInclusive<usize> {
        let first = (v - 1) * self.base + 1;
        first..=(v * self.base).min(self.n)
    }

    /// Labels attached to axis `v`, including labels of absent nodes.
    pub fn group_labels(&self, v: usize) -> RangeInclusive<usize> {
        (v - 1) * self.base + 1..=v * self.base
    }

    pub fn address(&self, a: usize) -> Result<DigitAddress> {
        DigitAddress::new(a, self.base, self.axes)
    }

    pub fn digit(&self, a: usize, v: usize) -> Result<usize> {
        self.address(a)?.digit(v)
    }

    pub fn set_digit(&self, a: usize, v: usize, u: usize) -> Result<usize> {
        Ok(self.address(a)?.with_digit(v, u)?.value())
    }

    #[inline]
    fn digit_of(&self, a: usize, v: usize) -> usize {
        a / self.places[v - 1] % self.base
    }

    /// The `l / s` coordinates `{a : a_v = u}`, ascending.
    pub fn fiber(&self, v: usize, u: usize) -> Vec<usize> {
        (0..self.l).filter(|&a| self.digit_of(a, v) == u).collect()
    }

    /// Nonzeros of row `a` of `A_{t,i}` in structural form. Indices are not
    /// validated; see [`CodeParams::row_support`] for the checked view.
    #[inline]
    pub fn row_terms(&self, i: usize, a: usize) -> RowTerms {
        let v = (i - 1) / self.base + 1;
        let u = (i - 1) % self.base;
        let av = self.digit_of(a, v);
        let stride = self.places[v - 1];
        let mut terms = RowTerms {
            single: None,
            origin: a - av * stride,
            stride,
            first_label: (v - 1) * self.base + 1,
            next: 0,
            end: 0,
        };
        if av == u {
            terms.end = self.base;
        } else {
            terms.single = Some(RowTerm {
                col: a,
                label: i,
                scaled: av > u,
            });
        }
        terms
    }

    /// Nonzero entries `(column, value)` of row `a` of `A_{t,i}`.
    pub fn row_support(&self, t: usize, i: usize, a: usize) -> Result<Vec<(usize, FieldElement)>> {
        self.check_indices(t, i, a)?;
        Ok(self
            .row_terms(i, a)
            .map(|term| (term.col, self.term_value(term, t)))
            .collect())
    }

    /// Entry `A_{t,i}(a, b)`.
    pub fn matrix_entry(&self, t: usize, i: usize, a: usize, b: usize) -> Result<FieldElement> {
        self.check_indices(t, i, a)?;
        self.check_coord(b)?;
        Ok(self
            .row_terms(i, a)
            .find(|term| term.col == b)
            .map_or(FieldElement::ZERO, |term| self.term_value(term, t)))
    }

    /// Dense `l x l` materialization of `A_{t,i}`.
    pub fn dense_block(&self, t: usize, i: usize) -> Result<Matrix> {
        self.check_indices(t, i, 0)?;
        let mut m = Matrix::zeros(self.l, self.l);
        for a in 0..self.l {
            for term in self.row_terms(i, a) {
                m.set(a, term.col, self.term_value(term, t));
            }
        }
        Ok(m)
    }

    fn check_indices(&self, t: usize, i: usize, a: usize) -> Result<()> {
        if t >= self.r {
            return Err(Error::OutOfRange(format!("t={t} outside 0..{}", self.r)));
        }
        self.check_node(i)?;
        self.check_coord(a)
    }
}
