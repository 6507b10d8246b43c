//! Separability criteria. Every criterion is a necessary condition for
//! separability written as `lhs <= rhs`; a verdict is `ENTANGLED` only when
//! the inequality is violated by more than the decision tolerance.
//!
//! Bipartite:
//! - `kf`: `||C||_KF <= ((1 - tr rho_A^2) + (1 - tr rho_B^2)) / 2`
//! - `cmc_diagonal`: same bound on `sum_i |C_ii|` in the Gell-Mann basis
//! - `hs`: `||C||_HS^2 <= (1 - tr rho_A^2)(1 - tr rho_B^2)`
//! - `ppt`: `-lambda_min(rho^T_A) <= 0`
//! - `ccnr`: `||R(rho)||_tr <= 1`
//!
//! Multipartite: the `kf` and `hs` inequalities for every pair of parties,
//! combined into full-separability and biseparability refutations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::covariance::{gell_mann_pair, PairCorrelation};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, hs_norm, partial_transpose, realign, trace_norm, DensityMatrix,
};

/// Default margin below which an inequality counts as satisfied.
pub const DECISION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    Entangled,
    Inconclusive,
    Boundary,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Entangled => "ENTANGLED",
            Conclusion::Inconclusive => "INCONCLUSIVE",
            Conclusion::Boundary => "BOUNDARY",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub conclusion: Conclusion,
}

impl CriterionVerdict {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = lhs - rhs;
        let conclusion = if margin > tol {
            Conclusion::Entangled
        } else if margin.abs() <= tol {
            Conclusion::Boundary
        } else {
            Conclusion::Inconclusive
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            conclusion,
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.conclusion == Conclusion::Entangled
    }
}

fn bipartite_pair(rho: &DensityMatrix) -> Result<PairCorrelation> {
    rho.bipartite_dims()?;
    gell_mann_pair(rho, 0, 1)
}

fn kf_verdict(name: &str, pair: &PairCorrelation, tol: f64) -> CriterionVerdict {
    let rhs = (pair.linear_entropy_i + pair.linear_entropy_j) / 2.0;
    CriterionVerdict::new(name, trace_norm(&pair.block), rhs, tol)
}

fn hs_verdict(name: &str, pair: &PairCorrelation, tol: f64) -> CriterionVerdict {
    let rhs = pair.linear_entropy_i * pair.linear_entropy_j;
    CriterionVerdict::new(name, hs_norm(&pair.block).powi(2), rhs, tol)
}

/// Ky Fan norm criterion.
pub fn kf_criterion(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    Ok(kf_verdict("kf", &bipartite_pair(rho)?, tol))
}

/// Basis-dependent form of the Ky Fan criterion: `sum_i |C_ii|` in the
/// Gell-Mann basis. Never stronger than [`kf_criterion`].
pub fn diagonal_criterion(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    let pair = bipartite_pair(rho)?;
    let lhs = pair.block.diagonal().iter().map(|x| x.abs()).sum();
    let rhs = (pair.linear_entropy_i + pair.linear_entropy_j) / 2.0;
    Ok(CriterionVerdict::new("cmc_diagonal", lhs, rhs, tol))
}

/// Hilbert-Schmidt norm criterion.
pub fn hs_criterion(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    Ok(hs_verdict("hs", &bipartite_pair(rho)?, tol))
}

/// Positive partial transpose baseline.
pub fn ppt_criterion(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    rho.bipartite_dims()?;
    let pt = partial_transpose(rho, 0)?;
    let min = hermitian_eigenvalues(&pt)[0];
    Ok(CriterionVerdict::new("ppt", -min, 0.0, tol))
}

/// Computable cross-norm / realignment baseline.
pub fn ccnr_criterion(rho: &DensityMatrix, tol: f64) -> Result<CriterionVerdict> {
    let lhs = trace_norm(&realign(rho)?);
    Ok(CriterionVerdict::new("ccnr", lhs, 1.0, tol))
}

/// Every bipartite criterion, in a fixed order.
pub fn bipartite_verdicts(rho: &DensityMatrix, tol: f64) -> Result<Vec<CriterionVerdict>> {
    let pair = bipartite_pair(rho)?;
    let diagonal = {
        let lhs = pair.block.diagonal().iter().map(|x| x.abs()).sum();
        let rhs = (pair.linear_entropy_i + pair.linear_entropy_j) / 2.0;
        CriterionVerdict::new("cmc_diagonal", lhs, rhs, tol)
    };
    Ok(vec![
        ppt_criterion(rho, tol)?,
        ccnr_criterion(rho, tol)?,
        diagonal,
        kf_verdict("kf", &pair, tol),
        hs_verdict("hs", &pair, tol),
    ])
}

/// Letter label of a party: A, B, C, ...
pub fn party_label(p: usize) -> String {
    if p < 26 {
        char::from(b'A' + p as u8).to_string()
    } else {
        format!("P{p}")
    }
}

/// A split of the parties into two nonempty groups. Stored with party 0 on
/// the left so every split has one canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    parties: usize,
    left: Vec<usize>,
}

impl Bipartition {
    pub fn new(parties: usize, group: &[usize]) -> Result<Self> {
        let mut left: Vec<usize> = group.to_vec();
        left.sort_unstable();
        left.dedup();
        if let Some(&p) = left.iter().find(|&&p| p >= parties) {
            return Err(Error::InvalidSubsystem { index: p, parties });
        }
        if left.is_empty() || left.len() == parties {
            return Err(Error::InvalidPartition(
                "both sides must be nonempty".into(),
            ));
        }
        if left[0] != 0 {
            left = (0..parties).filter(|p| !left.contains(p)).collect();
        }
        Ok(Self { parties, left })
    }

    /// Parses labels such as `A|BC`; needs the party count for validation.
    pub fn parse(label: &str, parties: usize) -> Result<Self> {
        let invalid = || Error::InvalidPartition(label.to_string());
        let (l, r) = label.split_once('|').ok_or_else(invalid)?;
        let decode = |side: &str| -> Result<Vec<usize>> {
            side.trim()
                .chars()
                .map(|ch| {
                    let up = ch.to_ascii_uppercase();
                    if up.is_ascii_uppercase() {
                        Ok((up as u8 - b'A') as usize)
                    } else {
                        Err(invalid())
                    }
                })
                .collect()
        };
        let (left, right) = (decode(l)?, decode(r)?);
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (0..parties).collect::<Vec<_>>() {
            return Err(invalid());
        }
        Self::new(parties, &left)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> Vec<usize> {
        (0..self.parties).filter(|p| !self.left.contains(p)).collect()
    }

    /// Whether parties `i` and `j` sit on opposite sides.
    pub fn separates(&self, i: usize, j: usize) -> bool {
        self.left.contains(&i) != self.left.contains(&j)
    }

    /// All `2^(n-1) - 1` bipartitions of `n` parties. For three parties:
    /// `A|BC`, `AB|C`, `AC|B`.
    pub fn all(parties: usize) -> Vec<Bipartition> {
        if parties < 2 {
            return Vec::new();
        }
        let others = parties - 1;
        (0..(1usize << others) - 1)
            .map(|mask| {
                let mut left = vec![0];
                left.extend((0..others).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
                Bipartition {
                    parties,
                    left,
                }
            })
            .collect()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |ps: &[usize]| ps.iter().map(|&p| party_label(p)).collect::<String>();
        write!(f, "{}|{}", side(&self.left), side(&self.right()))
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Infers the party count from the labels used.
    fn from_str(s: &str) -> Result<Self> {
        let parties = s.chars().filter(|c| c.is_ascii_alphabetic()).count();
        Self::parse(s, parties)
    }
}

/// Both covariance inequalities for one pair of parties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub hs: CriterionVerdict,
    pub kf: CriterionVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionVerdict {
    pub partition: String,
    pub refuted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipartiteReport {
    pub pair_verdicts: Vec<PairVerdict>,
    pub full_sep_refuted: bool,
    pub bisep_refuted: Vec<PartitionVerdict>,
    pub fully_entangled: bool,
}

impl MultipartiteReport {
    pub fn pair(&self, i: usize, j: usize) -> Option<&PairVerdict> {
        let (i, j) = (i.min(j), i.max(j));
        self.pair_verdicts.iter().find(|v| v.i == i && v.j == j)
    }

    pub fn hs_violations(&self) -> usize {
        self.pair_verdicts.iter().filter(|v| v.hs.is_entangled()).count()
    }

    pub fn kf_violations(&self) -> usize {
        self.pair_verdicts.iter().filter(|v| v.kf.is_entangled()).count()
    }
}

fn pair_verdict(rho: &DensityMatrix, i: usize, j: usize, tol: f64) -> Result<PairVerdict> {
    let pair = gell_mann_pair(rho, i, j)?;
    let tag = format!("{}{}", party_label(i), party_label(j));
    Ok(PairVerdict {
        i,
        j,
        hs: hs_verdict(&format!("hs[{tag}]"), &pair, tol),
        kf: kf_verdict(&format!("kf[{tag}]"), &pair, tol),
    })
}

/// Combines evaluated pair verdicts into separability conclusions. A cut is
/// refuted by any violated pair that crosses it. The state is reported fully
/// entangled when one inequality family alone refutes every bipartition, which
/// for three parties is exactly "two violations within one family".
fn assemble(
    parties: usize,
    pair_verdicts: Vec<PairVerdict>,
    partitions: &[Bipartition],
) -> MultipartiteReport {
    let refutes = |cut: &Bipartition, violated: &dyn Fn(&PairVerdict) -> bool| {
        pair_verdicts
            .iter()
            .any(|v| cut.separates(v.i, v.j) && violated(v))
    };
    let any = |v: &PairVerdict| v.hs.is_entangled() || v.kf.is_entangled();
    let hs = |v: &PairVerdict| v.hs.is_entangled();
    let kf = |v: &PairVerdict| v.kf.is_entangled();

    let full_sep_refuted = pair_verdicts.iter().any(any);
    let bisep_refuted = partitions
        .iter()
        .map(|cut| PartitionVerdict {
            partition: cut.to_string(),
            refuted: refutes(cut, &any),
        })
        .collect();
    let cuts = Bipartition::all(parties);
    let fully_entangled = parties >= 3
        && (cuts.iter().all(|cut| refutes(cut, &hs)) || cuts.iter().all(|cut| refutes(cut, &kf)));

    MultipartiteReport {
        pair_verdicts,
        full_sep_refuted,
        bisep_refuted,
        fully_entangled,
    }
}

/// Pairwise covariance inequalities for any number of parties. Unequal local
/// dimensions are handled by zero-padding the smaller Gell-Mann bases.
pub fn multipartite_full_sep(rho: &DensityMatrix, tol: f64) -> Result<MultipartiteReport> {
    let n = rho.parties();
    if n < 2 {
        return Err(Error::PartyCount {
            expected: 2,
            found: n,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(pair_verdict(rho, i, j, tol)?);
        }
    }
    let partitions = if n >= 3 { Bipartition::all(n) } else { Vec::new() };
    Ok(assemble(n, pairs, &partitions))
}

fn require_three(rho: &DensityMatrix) -> Result<()> {
    match rho.parties() {
        3 => Ok(()),
        found => Err(Error::PartyCount { expected: 3, found }),
    }
}

/// All six tripartite inequalities (three HS, three KF).
pub fn tripartite_full_sep(rho: &DensityMatrix, tol: f64) -> Result<MultipartiteReport> {
    require_three(rho)?;
    multipartite_full_sep(rho, tol)
}

/// The four inequalities that must hold if the state is separable across
/// `partition`: those of the two pairs the cut separates.
pub fn tripartite_bisep(
    rho: &DensityMatrix,
    partition: &Bipartition,
    tol: f64,
) -> Result<MultipartiteReport> {
    require_three(rho)?;
    if partition.parties != 3 {
        return Err(Error::InvalidPartition(partition.to_string()));
    }
    let mut pairs = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if partition.separates(i, j) {
            pairs.push(pair_verdict(rho, i, j, tol)?);
        }
    }
    Ok(assemble(3, pairs, std::slice::from_ref(partition)))
}

/// PPT and CCNR across one cut of a multipartite state, plus the covariance
/// criteria on the grouped bipartite state.
pub fn cut_verdicts(
    rho: &DensityMatrix,
    cut: &Bipartition,
    tol: f64,
) -> Result<Vec<CriterionVerdict>> {
    let grouped = rho.bipartite_cut(cut.left())?;
    let label = cut.to_string();
    Ok(bipartite_verdicts(&grouped, tol)?
        .into_iter()
        .map(|mut v| {
            v.name = format!("{}[{label}]", v.name);
            v
        })
        .collect())
}
