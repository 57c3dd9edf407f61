//! Single-node repair that reads only the digit fiber `{a : a_v = u}` of
//! every helper.
//!
//! For a failed node at axis `v`, digit `u`, row `a` (with `a_v = u`) of
//! parity equation `t` involves the failed node only through
//! `sigma_{t,a} = sum_w lambda_{(v-1)s+w+1}^t * c_{failed, a(v,w)}`, and every
//! other term touches a helper cell inside the fiber. Reading the fiber of all
//! `n - 1` survivors therefore yields `sigma`, and an `s x s` Vandermonde solve
//! recovers `s` cells of the failed node per row `a`.
//!
//! Group mode reads the `s - 1` group mates plus `k` nodes `M` outside the
//! group. Multiplying the parity system by the annihilator matrix `G^{(v)}`
//! removes every in-group column, which leaves `(r - s) * l / s` equations
//! in the fiber cells of the `r - s` unread outside nodes. Solving them
//! restores the full-helper read set.

use std::collections::BTreeMap;

use serde_json::json;

use crate::code::{CodeParams, Construction, NodePosition};
use crate::codec::Codeword;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{vandermonde, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairMode {
    Full,
    Group,
}

impl RepairMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RepairMode::Full => "full",
            RepairMode::Group => "group",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairPlan {
    failed: usize,
    position: NodePosition,
    mode: RepairMode,
    helpers: Vec<usize>,
    outside: Vec<usize>,
    coords: Vec<usize>,
}

impl RepairPlan {
    pub fn failed(&self) -> usize {
        self.failed
    }

    pub fn position(&self) -> NodePosition {
        self.position
    }

    pub fn mode(&self) -> RepairMode {
        self.mode
    }

    /// All helper nodes, ascending.
    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    /// Helpers outside the failed node's group (the set `M` in group mode).
    pub fn outside_helpers(&self) -> &[usize] {
        &self.outside
    }

    /// Coordinates read from every helper, ascending.
    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    /// `d`, the number of helpers.
    pub fn d(&self) -> usize {
        self.helpers.len()
    }

    /// Failed node (u16), mode (u8: 0 full, 1 group), then each helper (u16), little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 + 2 * self.helpers.len());
        out.extend_from_slice(&(self.failed as u16).to_le_bytes());
        out.push(match self.mode {
            RepairMode::Full => 0,
            RepairMode::Group => 1,
        });
        for &h in &self.helpers {
            out.extend_from_slice(&(h as u16).to_le_bytes());
        }
        out
    }

    /// Parses and re-validates a serialized plan against `params`.
    pub fn from_bytes(params: &CodeParams, bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 3 || !(bytes.len() - 3).is_multiple_of(2) {
            return Err(Error::InvalidPlan(format!(
                "bad plan length {}",
                bytes.len()
            )));
        }
        let failed = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
        let helpers: Vec<usize> = bytes[3..]
            .chunks(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as usize)
            .collect();
        let plan = match bytes[2] {
            0 => plan_full_repair(params, failed)?,
            1 => {
                let v = params.position(failed)?.axis;
                let group = params.group(v);
                let outside: Vec<_> = helpers
                    .iter()
                    .copied()
                    .filter(|h| !group.contains(h))
                    .collect();
                plan_group_repair(params, failed, &outside)?
            }
            m => return Err(Error::InvalidPlan(format!("unknown repair mode {m}"))),
        };
        if plan.helpers != helpers {
            return Err(Error::InvalidPlan(format!(
                "helper list {helpers:?} does not match the plan {:?}",
                plan.helpers
            )));
        }
        Ok(plan)
    }
}

/// Repair from all `n - 1` survivors.
pub fn plan_full_repair(params: &CodeParams, failed: usize) -> Result<RepairPlan> {
    let position = params.position(failed)?;
    let helpers: Vec<_> = (1..=params.n()).filter(|&i| i != failed).collect();
    let group = params.group(position.axis);
    Ok(RepairPlan {
        failed,
        position,
        mode: RepairMode::Full,
        outside: helpers
            .iter()
            .copied()
            .filter(|h| !group.contains(h))
            .collect(),
        helpers,
        coords: params.fiber(position.axis, position.digit),
    })
}

/// Repair from the `s - 1` group mates plus `outside`, a `k`-subset of the
/// nodes outside the failed node's group.
pub fn plan_group_repair(
    params: &CodeParams,
    failed: usize,
    outside: &[usize],
) -> Result<RepairPlan> {
    if params.construction() != Construction::Grouped {
        return Err(Error::Unsupported(
            "group repair requires the grouped construction".into(),
        ));
    }
    let position = params.position(failed)?;
    let group = params.group(position.axis);
    let mut outside = outside.to_vec();
    outside.sort_unstable();
    outside.dedup();
    for &h in &outside {
        params.check_node(h)?;
        if group.contains(&h) {
            return Err(Error::InvalidPlan(format!(
                "node {h} is in the group of failed node {failed}"
            )));
        }
    }
    if outside.len() != params.k() {
        return Err(Error::InvalidPlan(format!(
            "need k={} distinct helpers outside the group, got {}",
            params.k(),
            outside.len()
        )));
    }
    let mut helpers: Vec<_> = group.filter(|&i| i != failed).collect();
    helpers.extend_from_slice(&outside);
    helpers.sort_unstable();
    Ok(RepairPlan {
        failed,
        position,
        mode: RepairMode::Group,
        helpers,
        outside,
        coords: params.fiber(position.axis, position.digit),
    })
}

/// Random access to stored symbols of the surviving nodes.
pub trait SymbolSource {
    fn read(&mut self, node: usize, coord: usize) -> Result<FieldElement>;
}

/// Serves reads from an in-memory codeword, refusing the failed node.
pub struct CodewordSource<'a> {
    codeword: &'a Codeword,
    unavailable: usize,
}

impl<'a> CodewordSource<'a> {
    pub fn new(codeword: &'a Codeword, unavailable: usize) -> Self {
        Self {
            codeword,
            unavailable,
        }
    }
}

impl SymbolSource for CodewordSource<'_> {
    fn read(&mut self, node: usize, coord: usize) -> Result<FieldElement> {
        if node == self.unavailable || node == 0 || node > self.codeword.n() {
            return Err(Error::OutOfRange(format!("node {node} is not readable")));
        }
        self.codeword
            .node(node)
            .get(coord)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("coordinate {coord}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolRead {
    pub stripe: usize,
    pub node: usize,
    pub coord: usize,
}

/// Every symbol read during a repair job, over `stripes` stripes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AccessTrace {
    pub stripes: usize,
    pub reads: Vec<SymbolRead>,
}

impl AccessTrace {
    pub fn new(stripes: usize) -> Self {
        Self {
            stripes,
            reads: Vec::new(),
        }
    }

    pub fn record(&mut self, stripe: usize, node: usize, coord: usize) {
        self.reads.push(SymbolRead {
            stripe,
            node,
            coord,
        });
    }
}

/// Wraps a source and records every read into an [`AccessTrace`] (single stripe).
pub struct TracingSource<S> {
    inner: S,
    trace: AccessTrace,
}

impl<S: SymbolSource> TracingSource<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            trace: AccessTrace::new(1),
        }
    }

    pub fn trace(&self) -> &AccessTrace {
        &self.trace
    }

    pub fn into_trace(self) -> AccessTrace {
        self.trace
    }
}

impl<S: SymbolSource> SymbolSource for TracingSource<S> {
    fn read(&mut self, node: usize, coord: usize) -> Result<FieldElement> {
        self.trace.record(0, node, coord);
        self.inner.read(node, coord)
    }
}

/// Fiber cells of a set of nodes, aligned with a sorted coordinate list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelperReads {
    coords: Vec<usize>,
    values: BTreeMap<usize, Vec<FieldElement>>,
}

impl HelperReads {
    pub fn new(coords: Vec<usize>) -> Self {
        Self {
            coords,
            values: BTreeMap::new(),
        }
    }

    /// Reads exactly the plan's coordinates from each helper, in order.
    pub fn gather(plan: &RepairPlan, source: &mut impl SymbolSource) -> Result<Self> {
        let mut reads = Self::new(plan.coords.clone());
        for &h in &plan.helpers {
            let col = plan
                .coords
                .iter()
                .map(|&a| source.read(h, a))
                .collect::<Result<Vec<_>>>()?;
            reads.values.insert(h, col);
        }
        Ok(reads)
    }

    pub fn insert(&mut self, node: usize, values: Vec<FieldElement>) -> Result<()> {
        if values.len() != self.coords.len() {
            return Err(Error::Dimension(format!(
                "node {node}: {} values for {} coordinates",
                values.len(),
                self.coords.len()
            )));
        }
        self.values.insert(node, values);
        Ok(())
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn values(&self, node: usize) -> Option<&[FieldElement]> {
        self.values.get(&node).map(Vec::as_slice)
    }

    pub fn get(&self, node: usize, coord: usize) -> Result<FieldElement> {
        let missing = Error::MissingRead { node, coord };
        let col = self.values.get(&node).ok_or(missing)?;
        let pos = self
            .coords
            .binary_search(&coord)
            .map_err(|_| Error::MissingRead { node, coord })?;
        Ok(col[pos])
    }
}

/// Projection that annihilates the `lambda` columns of one group.
#[derive(Clone, Debug)]
pub struct Annihilator {
    axis: usize,
    g0: Vec<FieldElement>,
    matrix: Matrix,
    projected: Vec<Vec<FieldElement>>,
}

impl Annihilator {
    pub fn axis(&self) -> usize {
        self.axis
    }

    /// Coefficients of `g_0(x) = prod_w (x - lambda_{(v-1)s+w})`, constant term first.
    pub fn g0(&self) -> &[FieldElement] {
        &self.g0
    }

    /// The `(r - s) x r` matrix whose row `j` holds the coefficients of `x^j g_0(x)`.
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `g_0(lambda_label) * (1, lambda_label, ..., lambda_label^(r-s-1))`.
    pub fn projected(&self, label: usize) -> &[FieldElement] {
        &self.projected[label - 1]
    }

    pub fn eval_g0(&self, params: &CodeParams, x: FieldElement) -> FieldElement {
        let f = params.field();
        self.g0
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }
}

pub fn make_annihilator(params: &CodeParams, v: usize) -> Result<Annihilator> {
    if params.construction() != Construction::Grouped {
        return Err(Error::Unsupported(
            "annihilators are defined for the grouped construction".into(),
        ));
    }
    let (s, r) = (params.s(), params.r());
    if s == r {
        return Err(Error::Unsupported(
            "s = r: group repair coincides with full repair".into(),
        ));
    }
    if v == 0 || v > params.m() {
        return Err(Error::OutOfRange(format!(
            "group {v} outside 1..={}",
            params.m()
        )));
    }
    let f = params.field();
    let mut g0 = vec![FieldElement::ONE];
    for label in params.group_labels(v) {
        // multiply by (x - lambda)
        let neg = f.neg(params.lambda(label));
        let mut next = vec![FieldElement::ZERO; g0.len() + 1];
        for (d, &c) in g0.iter().enumerate() {
            next[d + 1] = f.add(next[d + 1], c);
            next[d] = f.add(next[d], f.mul(c, neg));
        }
        g0 = next;
    }
    let rows = r - s;
    let mut matrix = Matrix::zeros(rows, r);
    for j in 0..rows {
        for (d, &c) in g0.iter().enumerate() {
            matrix.set(j, j + d, c);
        }
    }
    let mut ann = Annihilator {
        axis: v,
        g0,
        matrix,
        projected: Vec::new(),
    };
    ann.projected = (1..=params.label_count())
        .map(|label| {
            let lam = params.lambda(label);
            let scale = ann.eval_g0(params, lam);
            (0..rows)
                .map(|j| f.mul(scale, f.pow(lam, j as u64)))
                .collect()
        })
        .collect();
    Ok(ann)
}

// Elimination of the unread outside nodes' fiber cells.
#[derive(Clone, Debug)]
struct Expansion {
    annihilator: Annihilator,
    unknown: Vec<usize>,
    solve: Matrix,
}

/// Precomputed repair for one plan, reusable across stripes.
#[derive(Clone, Debug)]
pub struct Repairer {
    plan: RepairPlan,
    vandermonde_inv: Matrix,
    expansion: Option<Expansion>,
}

impl Repairer {
    pub fn new(params: &CodeParams, plan: RepairPlan) -> Result<Self> {
        let NodePosition { axis: v, .. } = plan.position;
        let f = params.field();
        let mut fiber_index = vec![usize::MAX; params.l()];
        for (idx, &a) in plan.coords.iter().enumerate() {
            fiber_index[a] = idx;
        }
        let points: Vec<_> = params.group_labels(v).map(|j| params.lambda(j)).collect();
        let vandermonde_inv = vandermonde(f, &points)
            .inverse(f)
            .map_err(|_| Error::Singular("group Vandermonde matrix".into()))?;

        let unknown: Vec<usize> = match plan.mode {
            RepairMode::Full => Vec::new(),
            RepairMode::Group => {
                let group = params.group(v);
                (1..=params.n())
                    .filter(|i| !group.contains(i) && !plan.outside.contains(i))
                    .collect()
            }
        };
        let expansion = if unknown.is_empty() {
            None
        } else {
            let annihilator = make_annihilator(params, v)?;
            let solve = expansion_matrix(params, &plan, &annihilator, &unknown, &fiber_index)
                .inverse(f)
                .map_err(|_| Error::Singular("group expansion system".into()))?;
            Some(Expansion {
                annihilator,
                unknown,
                solve,
            })
        };
        Ok(Self {
            plan,
            vandermonde_inv,
            expansion,
        })
    }

    pub fn plan(&self) -> &RepairPlan {
        &self.plan
    }

    /// Fiber cells of every survivor: the helpers' reads plus, in group mode,
    /// the solved cells of the unread outside nodes.
    pub fn expand(&self, params: &CodeParams, reads: &HelperReads) -> Result<HelperReads> {
        self.check_reads(reads)?;
        let mut all = HelperReads::new(self.plan.coords.clone());
        for &h in &self.plan.helpers {
            all.insert(h, reads.values(h).expect("checked").to_vec())?;
        }
        let Some(exp) = &self.expansion else {
            return Ok(all);
        };
        let f = params.field();
        let rows = params.r() - params.s();
        let width = self.plan.coords.len();
        // right-hand side: minus the contribution of the read outside nodes
        let mut rhs = vec![FieldElement::ZERO; rows * width];
        for (ai, &a) in self.plan.coords.iter().enumerate() {
            for &i in &self.plan.outside {
                for term in params.row_terms(i, a) {
                    let x = reads.get(i, term.col)?;
                    if x.is_zero() {
                        continue;
                    }
                    let x = if term.scaled {
                        f.mul(params.gamma(), x)
                    } else {
                        x
                    };
                    let hat = exp.annihilator.projected(term.label);
                    for (j, &h) in hat.iter().enumerate() {
                        let idx = ai * rows + j;
                        rhs[idx] = f.sub(rhs[idx], f.mul(h, x));
                    }
                }
            }
        }
        let solved = exp.solve.mul_vec(f, &rhs)?;
        for (p, &i) in exp.unknown.iter().enumerate() {
            all.insert(i, solved[p * width..(p + 1) * width].to_vec())?;
        }
        Ok(all)
    }

    /// Recovers the failed column from the plan's reads.
    pub fn repair(&self, params: &CodeParams, reads: &HelperReads) -> Result<Vec<FieldElement>> {
        let survivors = self.expand(params, reads)?;
        self.solve_failed(params, &survivors)
    }

    fn solve_failed(
        &self,
        params: &CodeParams,
        survivors: &HelperReads,
    ) -> Result<Vec<FieldElement>> {
        let f = params.field();
        let (r, s) = (params.r(), params.s());
        let width = self.plan.coords.len();
        let NodePosition { axis: v, .. } = self.plan.position;

        // sigma[ai * r + t] = -(sum of every survivor term in row a of equation t)
        let mut sigma = vec![FieldElement::ZERO; width * r];
        for i in (1..=params.n()).filter(|&i| i != self.plan.failed) {
            for (ai, &a) in self.plan.coords.iter().enumerate() {
                for term in params.row_terms(i, a) {
                    let x = survivors.get(i, term.col)?;
                    if x.is_zero() {
                        continue;
                    }
                    for t in 0..r {
                        let idx = ai * r + t;
                        sigma[idx] = f.sub(sigma[idx], f.mul(params.term_value(term, t), x));
                    }
                }
            }
        }

        let place = params.s().pow(v as u32 - 1);
        let mut column = vec![FieldElement::ZERO; params.l()];
        for (ai, &a) in self.plan.coords.iter().enumerate() {
            let rhs = &sigma[ai * r..ai * r + s];
            let cells = self.vandermonde_inv.mul_vec(f, rhs)?;
            let origin = a - self.plan.position.digit * place;
            for (w, &c) in cells.iter().enumerate() {
                column[origin + w * place] = c;
            }
            if cfg!(debug_assertions) {
                // the unused equations t = s..r must agree
                for t in s..r {
                    let lhs = params
                        .group_labels(v)
                        .zip(&cells)
                        .fold(FieldElement::ZERO, |acc, (j, &c)| {
                            f.mul_add(acc, params.lambda_pow(j, t), c)
                        });
                    if lhs != sigma[ai * r + t] {
                        return Err(Error::Inconsistent);
                    }
                }
            }
        }
        Ok(column)
    }

    fn check_reads(&self, reads: &HelperReads) -> Result<()> {
        if reads.coords() != self.plan.coords.as_slice() {
            return Err(Error::InvalidPlan(
                "reads do not cover the plan's coordinate set".into(),
            ));
        }
        for &h in &self.plan.helpers {
            if reads.values(h).is_none() {
                return Err(Error::MissingRead {
                    node: h,
                    coord: self.plan.coords[0],
                });
            }
        }
        Ok(())
    }
}

// Rows: (fiber position of a) * (r - s) + j. Columns: (unknown node position) * |fiber| + fiber position.
fn expansion_matrix(
    params: &CodeParams,
    plan: &RepairPlan,
    ann: &Annihilator,
    unknown: &[usize],
    fiber_index: &[usize],
) -> Matrix {
    let f = params.field();
    let rows = params.r() - params.s();
    let width = plan.coords.len();
    let mut m = Matrix::zeros(rows * width, unknown.len() * width);
    for (ai, &a) in plan.coords.iter().enumerate() {
        for (p, &i) in unknown.iter().enumerate() {
            for term in params.row_terms(i, a) {
                let coef = if term.scaled { params.gamma() } else { f.one() };
                let col = p * width + fiber_index[term.col];
                let hat = ann.projected(term.label);
                for (j, &h) in hat.iter().enumerate() {
                    let idx = ai * rows + j;
                    let v = f.add(m.get(idx, col), f.mul(coef, h));
                    m.set(idx, col, v);
                }
            }
        }
    }
    m
}

pub fn repair_full(
    params: &CodeParams,
    plan: &RepairPlan,
    reads: &HelperReads,
) -> Result<Vec<FieldElement>> {
    if plan.mode != RepairMode::Full {
        return Err(Error::InvalidPlan("expected a full-helper plan".into()));
    }
    Repairer::new(params, plan.clone())?.repair(params, reads)
}

pub fn repair_group(
    params: &CodeParams,
    plan: &RepairPlan,
    reads: &HelperReads,
) -> Result<Vec<FieldElement>> {
    if plan.mode != RepairMode::Group {
        return Err(Error::InvalidPlan("expected a group plan".into()));
    }
    Repairer::new(params, plan.clone())?.repair(params, reads)
}

/// Lower bound on symbols accessed, as an exact fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AccessBound {
    pub num: usize,
    pub den: usize,
}

impl AccessBound {
    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integral(&self) -> bool {
        self.num.is_multiple_of(self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessReport {
    pub failed: usize,
    pub mode: RepairMode,
    pub helpers: Vec<usize>,
    pub stripes: usize,
    /// Symbols accessed per helper over all stripes.
    pub per_helper: BTreeMap<usize, usize>,
    pub accessed: usize,
    pub downloaded: usize,
    pub bound: AccessBound,
    pub optimal: bool,
}

impl AccessReport {
    pub fn to_json(&self) -> serde_json::Value {
        let bound = if self.bound.is_integral() {
            json!(self.bound.num / self.bound.den)
        } else {
            json!(self.bound.as_f64())
        };
        json!({
            "node": self.failed,
            "mode": self.mode.as_str(),
            "helpers": self.helpers,
            "stripes": self.stripes,
            "symbols_accessed": self.accessed,
            "bound": bound,
            "optimal": self.optimal,
        })
    }
}

/// Counts a repair job's reads against its plan. Full mode is measured against
/// `(n-1) l / (n-k)`, group mode against `d l / s`, each per stripe.
pub fn audit_access(
    params: &CodeParams,
    plan: &RepairPlan,
    trace: &AccessTrace,
) -> Result<AccessReport> {
    let mut per_helper: BTreeMap<usize, usize> = plan.helpers.iter().map(|&h| (h, 0)).collect();
    for read in &trace.reads {
        let in_plan =
            read.stripe < trace.stripes.max(1) && plan.coords.binary_search(&read.coord).is_ok();
        match per_helper.get_mut(&read.node) {
            Some(count) if in_plan => *count += 1,
            _ => {
                return Err(Error::AccessViolation {
                    node: read.node,
                    coord: read.coord,
                })
            }
        }
    }
    let stripes = trace.stripes.max(1);
    let accessed = per_helper.values().sum();
    let bound = match plan.mode {
        RepairMode::Full => AccessBound {
            num: (params.n() - 1) * params.l() * stripes,
            den: params.n() - params.k(),
        },
        RepairMode::Group => AccessBound {
            num: plan.d() * params.l() * stripes,
            den: params.s(),
        },
    };
    Ok(AccessReport {
        failed: plan.failed,
        mode: plan.mode,
        helpers: plan.helpers.clone(),
        stripes,
        per_helper,
        accessed,
        downloaded: accessed,
        bound,
        optimal: accessed * bound.den == bound.num,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;
    use crate::codec::{encode, random_data};
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf7() -> FieldSpec {
        FieldSpec::prime(7).unwrap()
    }

    fn example() -> CodeParams {
        CodeSpec::grouped(3, 3, 2, gf7()).build().unwrap()
    }

    fn grouped_233() -> CodeParams {
        CodeSpec::grouped(2, 3, 3, gf7()).build().unwrap()
    }

    #[test]
    fn full_plan_examples() {
        let p = example();
        let plan = plan_full_repair(&p, 1).unwrap();
        assert_eq!(plan.coords(), &[0, 3, 6]);
        assert_eq!(plan.helpers(), &[2, 3, 4, 5, 6]);
        assert_eq!(plan_full_repair(&p, 4).unwrap().coords(), &[0, 1, 2]);
        assert!(plan_full_repair(&p, 0).is_err());
        assert!(plan_full_repair(&p, 7).is_err());

        let c2 = CodeSpec::shortened(3, 1, 2, gf7()).build().unwrap();
        let plan = plan_full_repair(&c2, 4).unwrap();
        assert_eq!(plan.coords(), &[0, 1, 2]);
        assert_eq!(plan.d(), 4);
    }

    #[test]
    fn group_plan_examples() {
        let p = grouped_233();
        let plan = plan_group_repair(&p, 1, &[3, 4, 5]).unwrap();
        assert_eq!(plan.helpers(), &[2, 3, 4, 5]);
        assert_eq!(plan.d(), 4);
        assert_eq!(plan.coords().len(), 4);
        assert!(plan_group_repair(&p, 1, &[3, 4, 6]).is_ok());
        assert!(matches!(
            plan_group_repair(&p, 1, &[2, 3, 4]),
            Err(Error::InvalidPlan(_))
        ));
        assert!(plan_group_repair(&p, 1, &[3, 4]).is_err());
        assert!(plan_group_repair(&p, 1, &[3, 4, 4]).is_err());
    }

    #[test]
    fn plan_bytes_roundtrip() {
        let p = grouped_233();
        for plan in [
            plan_full_repair(&p, 3).unwrap(),
            plan_group_repair(&p, 3, &[1, 2, 6]).unwrap(),
        ] {
            let bytes = plan.to_bytes();
            assert_eq!(RepairPlan::from_bytes(&p, &bytes).unwrap(), plan);
        }
        assert!(RepairPlan::from_bytes(&p, &[1, 0, 7]).is_err());
        assert!(RepairPlan::from_bytes(&p, &[1, 0, 0, 2]).is_err());
    }

    #[test]
    fn annihilator_examples() {
        let p = grouped_233();
        let ann = make_annihilator(&p, 1).unwrap();
        let f = p.field();
        let fe = FieldElement::from_raw;
        // x(x - 1) = x^2 - x = x^2 + 6x over GF(7)
        assert_eq!(ann.g0(), &[fe(0), fe(6), fe(1)]);
        assert_eq!(ann.eval_g0(&p, p.lambda(1)), fe(0));
        assert_eq!(ann.eval_g0(&p, p.lambda(2)), fe(0));
        assert_eq!(ann.projected(3), &[fe(2)]);
        for label in 1..=2 {
            let l_col: Vec<_> = (0..3).map(|t| p.lambda_pow(label, t)).collect();
            assert!(ann
                .matrix()
                .mul_vec(f, &l_col)
                .unwrap()
                .iter()
                .all(|x| x.is_zero()));
        }
        assert!(make_annihilator(&example(), 1).is_err());
        assert!(make_annihilator(&p, 4).is_err());
    }

    #[test]
    fn full_repair_zero_codeword() {
        let p = example();
        let cw = Codeword::zeros(&p);
        let plan = plan_full_repair(&p, 2).unwrap();
        let reads = HelperReads::gather(&plan, &mut CodewordSource::new(&cw, 2)).unwrap();
        assert!(repair_full(&p, &plan, &reads)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn missing_reads_are_reported() {
        let p = example();
        let plan = plan_full_repair(&p, 1).unwrap();
        let mut reads = HelperReads::new(plan.coords().to_vec());
        for &h in plan.helpers().iter().skip(1) {
            reads.insert(h, vec![FieldElement::ZERO; 3]).unwrap();
        }
        assert!(matches!(
            repair_full(&p, &plan, &reads),
            Err(Error::MissingRead { node: 2, .. })
        ));
        assert!(reads.get(3, 1).is_err());
    }

    #[test]
    fn repair_matches_original_all_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in [
            CodeSpec::grouped(3, 3, 2, gf7()),
            CodeSpec::grouped(2, 3, 3, gf7()),
            CodeSpec::shortened(3, 1, 2, gf7()),
            CodeSpec::grouped(2, 2, 2, FieldSpec::prime(5).unwrap()),
        ] {
            let p = spec.build().unwrap();
            for _ in 0..5 {
                let cw = encode(&p, &random_data(&p, &mut rng)).unwrap();
                for failed in 1..=p.n() {
                    let plan = plan_full_repair(&p, failed).unwrap();
                    let reads =
                        HelperReads::gather(&plan, &mut CodewordSource::new(&cw, failed)).unwrap();
                    assert_eq!(
                        repair_full(&p, &plan, &reads).unwrap(),
                        cw.node(failed),
                        "{spec} node {failed}"
                    );
                }
            }
        }
    }

    #[test]
    fn group_repair_every_outside_subset() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = grouped_233();
        let cw = encode(&p, &random_data(&p, &mut rng)).unwrap();
        for failed in 1..=p.n() {
            let v = p.position(failed).unwrap().axis;
            let outside: Vec<_> = (1..=p.n()).filter(|i| !p.group(v).contains(i)).collect();
            for skip in 0..outside.len() {
                let m: Vec<_> = outside
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &i)| i)
                    .collect();
                let plan = plan_group_repair(&p, failed, &m).unwrap();
                let mut src = TracingSource::new(CodewordSource::new(&cw, failed));
                let reads = HelperReads::gather(&plan, &mut src).unwrap();
                assert_eq!(repair_group(&p, &plan, &reads).unwrap(), cw.node(failed));
                let report = audit_access(&p, &plan, src.trace()).unwrap();
                assert_eq!(report.accessed, 16);
                assert!(report.optimal);
            }
        }
    }

    #[test]
    fn expansion_recovers_unread_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = grouped_233();
        let cw = encode(&p, &random_data(&p, &mut rng)).unwrap();
        let plan = plan_group_repair(&p, 1, &[3, 4, 5]).unwrap();
        let reads = HelperReads::gather(&plan, &mut CodewordSource::new(&cw, 1)).unwrap();
        let all = Repairer::new(&p, plan.clone())
            .unwrap()
            .expand(&p, &reads)
            .unwrap();
        let expected: Vec<_> = plan.coords().iter().map(|&a| cw.cell(6, a)).collect();
        assert_eq!(all.values(6).unwrap(), expected.as_slice());
    }

    #[test]
    fn audit_counts() {
        let p = example();
        let cw = Codeword::zeros(&p);
        let plan = plan_full_repair(&p, 1).unwrap();
        let mut src = TracingSource::new(CodewordSource::new(&cw, 1));
        HelperReads::gather(&plan, &mut src).unwrap();
        let report = audit_access(&p, &plan, src.trace()).unwrap();
        assert_eq!(report.accessed, 15);
        assert_eq!(report.bound, AccessBound { num: 45, den: 3 });
        assert!(report.optimal);
        assert!(report.per_helper.values().all(|&c| c == 3));

        let mut trace = src.into_trace();
        trace.record(0, 2, 1);
        assert!(matches!(
            audit_access(&p, &plan, &trace),
            Err(Error::AccessViolation { node: 2, coord: 1 })
        ));
    }

    #[test]
    fn audit_full_mode_with_s_below_r_is_not_optimal() {
        let p = grouped_233();
        let cw = Codeword::zeros(&p);
        let plan = plan_full_repair(&p, 1).unwrap();
        let mut src = TracingSource::new(CodewordSource::new(&cw, 1));
        HelperReads::gather(&plan, &mut src).unwrap();
        let report = audit_access(&p, &plan, src.trace()).unwrap();
        assert_eq!(report.accessed, 20);
        assert!(!report.optimal);
        assert_eq!(report.to_json()["bound"], json!(40.0 / 3.0));
    }
}
