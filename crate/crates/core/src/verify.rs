//! Instance certification: exhaustive MDS checks, the row-permuted strip
//! structure of the `r`-node block systems, and sub-packetization checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::code::CodeParams;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::Matrix;

/// Default cap on `C(n, r) * (r l)^3` element operations for [`check_mds`].
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

fn check_subset(params: &CodeParams, subset: &[usize]) -> Result<()> {
    if subset.len() != params.r() {
        return Err(Error::Dimension(format!(
            "subset has {} nodes, expected r={}",
            subset.len(),
            params.r()
        )));
    }
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(format!(
            "subset {subset:?} is not strictly increasing"
        )));
    }
    subset.iter().try_for_each(|&i| params.check_node(i))
}

/// The `rl x rl` matrix `[A_{t, i_p}]`: entry `(t l + a, p l + b)` is `A_{t,i_p}(a, b)`.
pub fn block_submatrix(params: &CodeParams, subset: &[usize]) -> Result<Matrix> {
    check_subset(params, subset)?;
    let (r, l) = (params.r(), params.l());
    let mut m = Matrix::zeros(r * l, r * l);
    for t in 0..r {
        for (p, &i) in subset.iter().enumerate() {
            for a in 0..l {
                for (b, x) in params.row_support(t, i, a)? {
                    m.set(t * l + a, p * l + b, x);
                }
            }
        }
    }
    Ok(m)
}

/// Destination of row `j` under the strip permutation.
pub fn permuted_index(r: usize, l: usize, j: usize) -> usize {
    (j - j % l) / l + r * (j % l)
}

/// Moves row `j` to row `(j - j mod l) / l + r (j mod l)`, grouping the rows
/// of every coordinate `a` into the strip `ar..ar+r`.
pub fn permute_rows(params: &CodeParams, matrix: &Matrix) -> Result<Matrix> {
    let (r, l) = (params.r(), params.l());
    if matrix.rows() != r * l {
        return Err(Error::Dimension(format!(
            "expected {} rows, got {}",
            r * l,
            matrix.rows()
        )));
    }
    let mut order = vec![0; r * l];
    for j in 0..r * l {
        order[permuted_index(r, l, j)] = j;
    }
    Ok(matrix.select_rows(&order))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripAnalysis {
    pub strip: usize,
    /// Labels `i` whose column `L_i` or `gamma L_i` appears in the strip.
    pub labels: BTreeSet<usize>,
    /// Indices of the nonzero columns.
    pub nonzero: BTreeSet<usize>,
    /// Nonzero columns grouped by the label they match.
    pub by_label: BTreeMap<usize, BTreeSet<usize>>,
}

impl StripAnalysis {
    pub fn is_full_rank_strip(&self, r: usize) -> bool {
        self.labels.len() == r
    }
}

// Matches a column against L_i and gamma L_i for every label.
fn identify(params: &CodeParams, column: &[FieldElement]) -> Option<usize> {
    let f = params.field();
    (1..=params.label_count()).find(|&i| {
        let plain = (0..params.r()).all(|t| column[t] == params.lambda_pow(i, t));
        plain
            || (0..params.r()).all(|t| column[t] == f.mul(params.gamma(), params.lambda_pow(i, t)))
    })
}

fn analyse_strip(params: &CodeParams, permuted: &Matrix, a: usize) -> Result<StripAnalysis> {
    let r = params.r();
    let strip = permuted.select_rows(&(a * r..(a + 1) * r).collect::<Vec<_>>());
    let mut out = StripAnalysis {
        strip: a,
        labels: BTreeSet::new(),
        nonzero: BTreeSet::new(),
        by_label: BTreeMap::new(),
    };
    for j in 0..strip.cols() {
        let column = strip.column(j);
        if column.iter().all(|x| x.is_zero()) {
            continue;
        }
        let label = identify(params, &column).ok_or(Error::Inconsistent)?;
        out.labels.insert(label);
        out.nonzero.insert(j);
        out.by_label.entry(label).or_default().insert(j);
    }
    Ok(out)
}

fn require_identifiable(params: &CodeParams) -> Result<()> {
    if params.r() < 2 {
        return Err(Error::Unsupported(
            "with r = 1 every column is a scalar and labels cannot be told apart".into(),
        ));
    }
    Ok(())
}

/// Label sets of strip `a` in the row-permuted block system of `subset`.
pub fn strip_analysis(params: &CodeParams, subset: &[usize], a: usize) -> Result<StripAnalysis> {
    require_identifiable(params)?;
    params.check_coord(a)?;
    let permuted = permute_rows(params, &block_submatrix(params, subset)?)?;
    analyse_strip(params, &permuted, a)
}

/// Every strip of `subset`, in order of `a`.
pub fn all_strips(params: &CodeParams, subset: &[usize]) -> Result<Vec<StripAnalysis>> {
    require_identifiable(params)?;
    let permuted = permute_rows(params, &block_submatrix(params, subset)?)?;
    (0..params.l())
        .map(|a| analyse_strip(params, &permuted, a))
        .collect()
}

/// Strips whose nonzero columns involve exactly `r` labels.
pub fn full_rank_strips(params: &CodeParams, subset: &[usize]) -> Result<Vec<usize>> {
    Ok(all_strips(params, subset)?
        .into_iter()
        .filter(|s| s.is_full_rank_strip(params.r()))
        .map(|s| s.strip)
        .collect())
}

/// `min_a |U^(a)|` for `subset`; equal to `r` whenever some strip involves only the subset.
pub fn min_strip_labels(params: &CodeParams, subset: &[usize]) -> Result<usize> {
    Ok(all_strips(params, subset)?
        .iter()
        .map(|s| s.labels.len())
        .min()
        .unwrap_or(0))
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < n - (k - 1 - p)) else {
            return out;
        };
        cur[pos] += 1;
        for q in pos + 1..k {
            cur[q] = cur[q - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// `C(n, r) * (r l)^3`, saturating.
pub fn mds_work_estimate(params: &CodeParams) -> u128 {
    let side = (params.r() * params.l()) as u128;
    binomial(params.n(), params.r()).saturating_mul(side.saturating_pow(3))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsCertificate {
    pub fingerprint: String,
    pub verdicts: Vec<(Vec<usize>, bool)>,
}

impl MdsCertificate {
    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|(_, ok)| *ok)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("params={}\n", self.fingerprint);
        for (subset, ok) in &self.verdicts {
            let list: Vec<String> = subset.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "subset={} invertible={}", list.join(","), ok);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: &str| Error::Corrupt {
            path: "<certificate>".into(),
            detail: format!("unparseable line {line:?}"),
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(""))?;
        let fingerprint = header
            .strip_prefix("params=")
            .ok_or_else(|| bad(header))?
            .to_string();
        let mut verdicts = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (subset, verdict) = line
                .strip_prefix("subset=")
                .and_then(|rest| rest.split_once(" invertible="))
                .ok_or_else(|| bad(line))?;
            let subset = subset
                .split(',')
                .map(|x| x.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(line))?;
            let ok = verdict.parse::<bool>().map_err(|_| bad(line))?;
            verdicts.push((subset, ok));
        }
        Ok(Self {
            fingerprint,
            verdicts,
        })
    }
}

/// Rank-tests the block system of every `r`-subset of nodes.
pub fn check_mds(params: &CodeParams, budget: u128) -> Result<MdsCertificate> {
    let estimate = mds_work_estimate(params);
    if estimate > budget {
        return Err(Error::OverBudget { estimate, budget });
    }
    let side = params.r() * params.l();
    let verdicts = subsets(params.n(), params.r())
        .into_par_iter()
        .map(|subset| {
            let b = block_submatrix(params, &subset)?;
            let ok = b.rank(params.field()) == side;
            Ok((subset, ok))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MdsCertificate {
        fingerprint: params.spec().fingerprint(),
        verdicts,
    })
}

/// `l = r^ceil(n/r)` and `l >= r^((k-1)/r)`.
pub fn check_subpacketization(params: &CodeParams) -> bool {
    let (n, k, r, l) = (params.n(), params.k(), params.r(), params.l());
    let exact = u32::try_from(n.div_ceil(r))
        .ok()
        .and_then(|e| r.checked_pow(e))
        .is_some_and(|v| v == l);
    let lower = (r as f64).powf((k as f64 - 1.0) / r as f64);
    exact && l as f64 >= lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;
    use crate::field::FieldSpec;

    fn gf7() -> FieldSpec {
        FieldSpec::prime(7).unwrap()
    }

    fn example() -> CodeParams {
        CodeSpec::grouped(3, 3, 2, gf7()).build().unwrap()
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permuted_index(3, 9, 9), 1);
        assert_eq!(permuted_index(3, 9, 0), 0);
        let mut seen = [false; 27];
        for j in 0..27 {
            let d = permuted_index(3, 9, j);
            assert!(!seen[d]);
            seen[d] = true;
        }
    }

    #[test]
    fn permute_preserves_rank() {
        let p = example();
        let b = block_submatrix(&p, &[1, 2, 5]).unwrap();
        let d = permute_rows(&p, &b).unwrap();
        assert_eq!(b.rank(p.field()), d.rank(p.field()));
        assert_eq!(d.row(1), b.row(9));
        assert!(permute_rows(&p, &Matrix::zeros(26, 27)).is_err());
    }

    #[test]
    fn subset_validation() {
        let p = example();
        assert!(block_submatrix(&p, &[1, 2]).is_err());
        assert!(block_submatrix(&p, &[2, 1, 5]).is_err());
        assert!(block_submatrix(&p, &[1, 2, 7]).is_err());
    }

    #[test]
    fn strip_zero_example() {
        let p = example();
        let s = strip_analysis(&p, &[1, 2, 5], 0).unwrap();
        assert_eq!(s.labels, BTreeSet::from([1, 2, 3, 5]));
        assert_eq!(s.nonzero, BTreeSet::from([0, 1, 2, 9, 18]));
        assert_eq!(s.by_label[&1], BTreeSet::from([0]));
        assert_eq!(s.by_label[&2], BTreeSet::from([1, 9]));
        assert_eq!(s.by_label[&3], BTreeSet::from([2]));
        assert_eq!(s.by_label[&5], BTreeSet::from([18]));
        assert_eq!(full_rank_strips(&p, &[1, 2, 5]).unwrap(), vec![2, 8]);
    }

    #[test]
    fn subsets_enumeration() {
        let all = subsets(6, 3);
        assert_eq!(all.len(), 20);
        assert_eq!(all[0], vec![1, 2, 3]);
        assert_eq!(all[19], vec![4, 5, 6]);
        assert_eq!(subsets(3, 4).len(), 0);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn certificate_text_roundtrip() {
        let p = CodeSpec::grouped(2, 2, 2, FieldSpec::prime(5).unwrap())
            .build()
            .unwrap();
        let cert = check_mds(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(cert.verdicts.len(), 6);
        assert!(cert.pass());
        let text = cert.to_text();
        assert!(text.starts_with(&format!("params={}\n", p.spec().fingerprint())));
        assert!(text.contains("subset=1,2 invertible=true\n"));
        assert_eq!(MdsCertificate::parse(&text).unwrap(), cert);
        assert!(MdsCertificate::parse("subset=1 invertible=true").is_err());
    }

    #[test]
    fn over_budget() {
        let p = example();
        assert!(matches!(check_mds(&p, 10), Err(Error::OverBudget { .. })));
        assert_eq!(mds_work_estimate(&p), 20 * 27u128.pow(3));
    }

    #[test]
    fn subpacketization() {
        assert!(check_subpacketization(&example()));
        let c2 = CodeSpec::shortened(3, 1, 2, gf7()).build().unwrap();
        assert!(check_subpacketization(&c2));
        let g = CodeSpec::grouped(2, 3, 3, gf7()).build().unwrap();
        assert!(!check_subpacketization(&g));
    }

    #[test]
    fn r_one_is_ambiguous() {
        let p = CodeSpec::grouped(1, 1, 3, FieldSpec::prime(5).unwrap())
            .build()
            .unwrap();
        assert!(matches!(
            strip_analysis(&p, &[1], 0),
            Err(Error::Unsupported(_))
        ));
    }
}
