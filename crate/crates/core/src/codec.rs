//! Systematic encoding and erasure decoding through the parity-check system.
//!
//! Nodes `1..=k` carry data and nodes `k+1..=n` parity. Both encoding and
//! decoding are erasure correction: the unknown columns are solved from the
//! `r*l` parity equations restricted to them. The restricted matrix is reduced
//! once per erasure set ([`ErasureDecoder`]) and then applied to any number of
//! stripes.

use rand::Rng;

use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;

/// An `l x n` array; column `i` is node `C_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    l: usize,
    columns: Vec<Vec<FieldElement>>,
}

impl Codeword {
    pub fn zeros(params: &CodeParams) -> Self {
        Self {
            l: params.l(),
            columns: vec![vec![FieldElement::ZERO; params.l()]; params.n()],
        }
    }

    pub fn from_columns(params: &CodeParams, columns: Vec<Vec<FieldElement>>) -> Result<Self> {
        check_shape(params, &columns, params.n())?;
        Ok(Self {
            l: params.l(),
            columns,
        })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Column of node `i` (1-based).
    pub fn node(&self, i: usize) -> &[FieldElement] {
        &self.columns[i - 1]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [FieldElement] {
        &mut self.columns[i - 1]
    }

    pub fn cell(&self, i: usize, a: usize) -> FieldElement {
        self.columns[i - 1][a]
    }

    pub fn columns(&self) -> &[Vec<FieldElement>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<FieldElement>> {
        self.columns
    }

    /// The data columns, nodes `1..=k`.
    pub fn data(&self, k: usize) -> &[Vec<FieldElement>] {
        &self.columns[..k]
    }
}

/// A codeword with some columns missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    nodes: Vec<Option<Vec<FieldElement>>>,
}

impl ErasurePattern {
    pub fn new(nodes: Vec<Option<Vec<FieldElement>>>) -> Self {
        Self { nodes }
    }

    /// `codeword` with the listed (1-based) nodes removed.
    pub fn erase(codeword: &Codeword, erased: &[usize]) -> Self {
        Self {
            nodes: codeword
                .columns
                .iter()
                .enumerate()
                .map(|(idx, col)| (!erased.contains(&(idx + 1))).then(|| col.clone()))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, i: usize) -> Option<&[FieldElement]> {
        self.nodes.get(i - 1).and_then(|c| c.as_deref())
    }

    pub fn erased(&self) -> Vec<usize> {
        (1..=self.nodes.len())
            .filter(|&i| self.nodes[i - 1].is_none())
            .collect()
    }
}

fn check_shape(params: &CodeParams, columns: &[Vec<FieldElement>], count: usize) -> Result<()> {
    if columns.len() != count {
        return Err(Error::Dimension(format!(
            "expected {count} columns, got {}",
            columns.len()
        )));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != params.l()) {
        return Err(Error::Dimension(format!(
            "expected columns of length {}, got {}",
            params.l(),
            c.len()
        )));
    }
    Ok(())
}

/// Entry `t*l + a` is row `a` of `sum_i A_{t,i} C_i`.
pub fn syndrome(params: &CodeParams, codeword: &Codeword) -> Result<Vec<FieldElement>> {
    check_shape(params, &codeword.columns, params.n())?;
    Ok(partial_syndrome(params, |i| Some(codeword.node(i))))
}

// Syndrome contribution of the nodes for which `column` returns data.
fn partial_syndrome<'a>(
    params: &CodeParams,
    column: impl Fn(usize) -> Option<&'a [FieldElement]>,
) -> Vec<FieldElement> {
    let (l, r, f) = (params.l(), params.r(), params.field());
    let mut out = vec![FieldElement::ZERO; r * l];
    for i in 1..=params.n() {
        let Some(col) = column(i) else { continue };
        for a in 0..l {
            for term in params.row_terms(i, a) {
                let x = col[term.col];
                if x.is_zero() {
                    continue;
                }
                for t in 0..r {
                    let idx = t * l + a;
                    out[idx] = f.mul_add(out[idx], params.term_value(term, t), x);
                }
            }
        }
    }
    out
}

pub fn is_codeword(params: &CodeParams, codeword: &Codeword) -> Result<bool> {
    Ok(syndrome(params, codeword)?.iter().all(|x| x.is_zero()))
}

/// Solver for one fixed set of erased nodes.
#[derive(Clone, Debug)]
pub struct ErasureDecoder {
    erased: Vec<usize>,
    rows: Vec<usize>,
    solve: Matrix,
}

impl ErasureDecoder {
    pub fn new(params: &CodeParams, erased: &[usize]) -> Result<Self> {
        let mut erased = erased.to_vec();
        erased.sort_unstable();
        erased.dedup();
        for &i in &erased {
            params.check_node(i)?;
        }
        if erased.len() > params.r() {
            return Err(Error::TooManyErasures {
                erased: erased.len(),
                max: params.r(),
            });
        }
        let (l, r) = (params.l(), params.r());
        let unknowns = erased.len() * l;
        let mut system = Matrix::zeros(r * l, unknowns);
        for (p, &i) in erased.iter().enumerate() {
            for a in 0..l {
                for term in params.row_terms(i, a) {
                    for t in 0..r {
                        system.set(t * l + a, p * l + term.col, params.term_value(term, t));
                    }
                }
            }
        }
        let rows = system.independent_rows(params.field());
        if rows.len() != unknowns {
            return Err(Error::Singular(format!(
                "erasure set {erased:?} leaves rank {} < {unknowns}",
                rows.len()
            )));
        }
        let solve = system.select_rows(&rows).inverse(params.field())?;
        Ok(Self {
            erased,
            rows,
            solve,
        })
    }

    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    /// Solves for the erased columns and returns them in the order of
    /// [`ErasureDecoder::erased`]. Does not check consistency.
    pub fn solve_erased(
        &self,
        params: &CodeParams,
        pattern: &ErasurePattern,
    ) -> Result<Vec<Vec<FieldElement>>> {
        self.check_pattern(params, pattern)?;
        let f = params.field();
        let known = partial_syndrome(params, |i| pattern.node(i));
        let rhs: Vec<_> = self.rows.iter().map(|&row| f.neg(known[row])).collect();
        let x = self.solve.mul_vec(f, &rhs)?;
        Ok(x.chunks(params.l()).map(<[_]>::to_vec).collect())
    }

    /// Completes the codeword and verifies the full syndrome.
    pub fn recover(&self, params: &CodeParams, pattern: &ErasurePattern) -> Result<Codeword> {
        let solved = self.solve_erased(params, pattern)?;
        let mut solved = solved.into_iter();
        let columns = (1..=params.n())
            .map(|i| match pattern.node(i) {
                Some(col) => col.to_vec(),
                None => solved.next().expect("one solved column per erasure"),
            })
            .collect();
        let cw = Codeword::from_columns(params, columns)?;
        if !is_codeword(params, &cw)? {
            return Err(Error::Inconsistent);
        }
        Ok(cw)
    }

    fn check_pattern(&self, params: &CodeParams, pattern: &ErasurePattern) -> Result<()> {
        if pattern.n() != params.n() {
            return Err(Error::Dimension(format!(
                "pattern has {} nodes, code has {}",
                pattern.n(),
                params.n()
            )));
        }
        if pattern.erased() != self.erased {
            return Err(Error::Dimension(format!(
                "pattern erases {:?}, decoder was built for {:?}",
                pattern.erased(),
                self.erased
            )));
        }
        for i in 1..=params.n() {
            if let Some(col) = pattern.node(i) {
                if col.len() != params.l() {
                    return Err(Error::Dimension(format!(
                        "node {i} has {} cells, expected {}",
                        col.len(),
                        params.l()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Systematic encoder: the decoder for the parity nodes `k+1..=n`.
#[derive(Clone, Debug)]
pub struct Encoder {
    decoder: ErasureDecoder,
}

impl Encoder {
    pub fn new(params: &CodeParams) -> Result<Self> {
        let parity: Vec<_> = (params.k() + 1..=params.n()).collect();
        Ok(Self {
            decoder: ErasureDecoder::new(params, &parity)?,
        })
    }

    /// Encodes `k` data columns of length `l`.
    pub fn encode(&self, params: &CodeParams, data: &[Vec<FieldElement>]) -> Result<Codeword> {
        check_shape(params, data, params.k())?;
        let mut nodes: Vec<Option<Vec<FieldElement>>> = data.iter().cloned().map(Some).collect();
        nodes.resize(params.n(), None);
        let pattern = ErasurePattern::new(nodes);
        let parity = self.decoder.solve_erased(params, &pattern)?;
        let mut columns = data.to_vec();
        columns.extend(parity);
        Codeword::from_columns(params, columns)
    }
}

pub fn encode(params: &CodeParams, data: &[Vec<FieldElement>]) -> Result<Codeword> {
    Encoder::new(params)?.encode(params, data)
}

pub fn decode(params: &CodeParams, pattern: &ErasurePattern) -> Result<Codeword> {
    if pattern.n() != params.n() {
        return Err(Error::Dimension(format!(
            "pattern has {} nodes, code has {}",
            pattern.n(),
            params.n()
        )));
    }
    ErasureDecoder::new(params, &pattern.erased())?.recover(params, pattern)
}

/// `k` uniformly random data columns.
pub fn random_data<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Vec<Vec<FieldElement>> {
    let f = params.field();
    (0..params.k())
        .map(|_| (0..params.l()).map(|_| f.random(rng)).collect())
        .collect()
}
