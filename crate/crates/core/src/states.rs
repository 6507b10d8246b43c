//! State constructors: the 3x3 tiles bound entangled state, maximally
//! entangled and isotropic states, products and mixtures, seeded random
//! ensembles, and the textual [`StateSpec`] vocabulary used by the CLI.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, StateResiduals, MIN_DIM};

const WEIGHT_TOL: f64 = 1e-12;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn basis_vector(d: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); d];
    v[k] = c(1.0);
    v
}

fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

fn outer(psi: &[Complex64]) -> ComplexMatrix {
    let n = psi.len();
    ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
}

/// The five product vectors of the 3x3 "tiles" unextendible product basis.
pub fn tile_vectors() -> [Vec<Complex64>; 5] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e = |k| basis_vector(3, k);
    let diff = |j: usize, k: usize| -> Vec<Complex64> {
        e(j).iter().zip(e(k)).map(|(a, b)| (a - b) * s).collect()
    };
    let uniform = vec![c(1.0 / 3f64.sqrt()); 3];
    [
        tensor_vec(&e(0), &diff(0, 1)),
        tensor_vec(&diff(0, 1), &e(2)),
        tensor_vec(&e(2), &diff(1, 2)),
        tensor_vec(&diff(1, 2), &e(0)),
        tensor_vec(&uniform, &uniform),
    ]
}

/// `(I_9 - sum_i |xi_i><xi_i|) / 4`: PPT, rank 4, entangled.
pub fn bennett_state() -> DensityMatrix {
    let projector = tile_vectors()
        .iter()
        .fold(ComplexMatrix::zeros(9, 9), |acc, v| acc + outer(v));
    let matrix = (ComplexMatrix::identity(9, 9) - projector).scale(0.25);
    DensityMatrix::from_parts(vec![3, 3], matrix)
}

/// `(1/sqrt d) sum_i |ii>`.
pub fn max_entangled_vector(d: usize) -> Result<Vec<Complex64>> {
    if d < MIN_DIM {
        return Err(Error::InvalidDimension(d));
    }
    let amp = c(1.0 / (d as f64).sqrt());
    let mut psi = vec![c(0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = amp;
    }
    Ok(psi)
}

pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    let psi = max_entangled_vector(d)?;
    Ok(DensityMatrix::from_parts(vec![d, d], outer(&psi)))
}

/// `(1 - x) a + x b`.
pub fn mix(a: &DensityMatrix, b: &DensityMatrix, x: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::MixingParameter(x));
    }
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let matrix = a.matrix().scale(1.0 - x) + b.matrix().scale(x);
    Ok(DensityMatrix::from_parts(a.dims().to_vec(), matrix))
}

/// Convex combination of states with nonnegative weights summing to one.
pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidWeights("empty mixture".into()))?;
    if let Some((w, _)) = terms.iter().find(|(w, _)| w.is_nan() || *w < 0.0) {
        return Err(Error::InvalidWeights(format!("negative weight {w}")));
    }
    let total: f64 = terms.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    let mut matrix = ComplexMatrix::zeros(first.dim(), first.dim());
    for (w, rho) in terms {
        if rho.dims() != first.dims() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: rho.dim(),
            });
        }
        matrix += rho.matrix().scale(*w);
    }
    Ok(DensityMatrix::from_parts(first.dims().to_vec(), matrix))
}

/// `(1 - x) I/d^2 + x |Phi_d><Phi_d|`.
pub fn isotropic(d: usize, x: f64) -> Result<DensityMatrix> {
    let noise = DensityMatrix::maximally_mixed(vec![d, d])?;
    mix(&noise, &max_entangled(d)?, x)
}

pub fn product(factors: &[DensityMatrix]) -> Result<DensityMatrix> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptySelection)?;
    Ok(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
}

/// Deterministic generator for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th member of an ensemble.
pub fn ensemble_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector: a normalized complex Gaussian vector.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal divided out.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let phase = r[(j, j)] / r[(j, j)].norm();
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::EmptySelection);
    }
    match dims.iter().find(|&&d| d < MIN_DIM) {
        Some(&d) => Err(Error::InvalidDimension(d)),
        None => Ok(()),
    }
}

pub fn random_pure_vector(dims: &[usize], seed: u64) -> Result<Vec<Complex64>> {
    check_dims(dims)?;
    let total = dims.iter().product();
    Ok(haar_vector(total, &mut seeded_rng(seed)))
}

pub fn random_pure(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    let psi = random_pure_vector(dims, seed)?;
    Ok(DensityMatrix::from_parts(dims.to_vec(), outer(&psi)))
}

/// `sum_k p_k (x)_i |psi_k^i><psi_k^i|` with Haar-random local pure states and
/// Dirichlet(1, ..., 1) weights.
pub fn random_separable(dims: &[usize], terms: usize, seed: u64) -> Result<DensityMatrix> {
    check_dims(dims)?;
    if terms == 0 {
        return Err(Error::InvalidWeights("at least one term required".into()));
    }
    let mut rng = seeded_rng(seed);
    let raw: Vec<f64> = (0..terms).map(|_| rng.sample(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let total_dim: usize = dims.iter().product();
    let mut matrix = ComplexMatrix::zeros(total_dim, total_dim);
    for w in raw {
        let psi = dims
            .iter()
            .map(|&d| haar_vector(d, &mut rng))
            .reduce(|acc, v| tensor_vec(&acc, &v))
            .expect("dims is nonempty");
        matrix += outer(&psi).scale(w / total);
    }
    Ok(DensityMatrix::from_parts(dims.to_vec(), matrix))
}

/// `G G^dagger / tr(G G^dagger)` for a `D x rank` Ginibre matrix; `rank = D`
/// gives the Hilbert-Schmidt measure.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    check_dims(dims)?;
    if rank == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut rng = seeded_rng(seed);
    let total: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(total, rank, |_, _| gaussian_complex(&mut rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_parts(dims.to_vec(), m.unscale(tr)))
}

/// On-disk state: `{"dims": [d1, ...], "matrix": [[[re, im], ...], ...]}`,
/// rows in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            dims: rho.dims().to_vec(),
            matrix,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.matrix.len();
        if let Some(row) = self.matrix.iter().find(|row| row.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
        Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.matrix[i][j];
            Complex64::new(re, im)
        }))
    }

    /// Validates the matrix against every state invariant.
    pub fn into_state(self) -> Result<DensityMatrix> {
        let matrix = self.to_matrix()?;
        DensityMatrix::new(self.dims, matrix)
    }

    pub fn residuals(&self) -> Result<StateResiduals> {
        Ok(StateResiduals::of(&self.to_matrix()?))
    }
}

pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    let file: StateFile = serde_json::from_str(&text)?;
    file.into_state()
}

pub fn write_state_file(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let text = serde_json::to_string_pretty(&StateFile::from_state(rho))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Textual description of a state.
///
/// ```text
/// bennett3x3
/// mes:D                      maximally entangled D x D
/// isotropic:D:X              (1-X) I/D^2 + X mes:D
/// ket:D:K                    single party |K>
/// mixed:D                    single party I/D
/// product[SPEC,SPEC,...]
/// mix[W*SPEC,W*SPEC,...]
/// random_pure:DIMS:SEED               DIMS like 3x3 or 2x2x2
/// random_separable:DIMS:TERMS:SEED
/// random_mixed:DIMS:RANK:SEED
/// file:PATH
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bennett3x3,
    MaxEntangled(usize),
    Isotropic { d: usize, x: f64 },
    Ket { d: usize, k: usize },
    MaximallyMixed(usize),
    Product(Vec<StateSpec>),
    Mixture(Vec<(f64, StateSpec)>),
    File(PathBuf),
    RandomPure { dims: Vec<usize>, seed: u64 },
    RandomSeparable { dims: Vec<usize>, terms: usize, seed: u64 },
    RandomMixed { dims: Vec<usize>, rank: usize, seed: u64 },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Bennett3x3 => Ok(bennett_state()),
            StateSpec::MaxEntangled(d) => max_entangled(*d),
            StateSpec::Isotropic { d, x } => isotropic(*d, *x),
            StateSpec::Ket { d, k } => {
                if *k >= *d {
                    return Err(Error::InvalidSubsystem {
                        index: *k,
                        parties: *d,
                    });
                }
                DensityMatrix::from_pure(vec![*d], &basis_vector(*d, *k))
            }
            StateSpec::MaximallyMixed(d) => DensityMatrix::maximally_mixed(vec![*d]),
            StateSpec::Product(factors) => {
                let built = factors.iter().map(StateSpec::build).collect::<Result<Vec<_>>>()?;
                product(&built)
            }
            StateSpec::Mixture(terms) => {
                let built = terms
                    .iter()
                    .map(|(w, s)| Ok((*w, s.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                mixture(&built)
            }
            StateSpec::File(path) => read_state_file(path),
            StateSpec::RandomPure { dims, seed } => random_pure(dims, *seed),
            StateSpec::RandomSeparable { dims, terms, seed } => {
                random_separable(dims, *terms, *seed)
            }
            StateSpec::RandomMixed { dims, rank, seed } => random_mixed(dims, *rank, *seed),
        }
    }
}

fn fmt_dims(dims: &[usize]) -> String {
    dims.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("x")
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Bennett3x3 => write!(f, "bennett3x3"),
            StateSpec::MaxEntangled(d) => write!(f, "mes:{d}"),
            StateSpec::Isotropic { d, x } => write!(f, "isotropic:{d}:{x}"),
            StateSpec::Ket { d, k } => write!(f, "ket:{d}:{k}"),
            StateSpec::MaximallyMixed(d) => write!(f, "mixed:{d}"),
            StateSpec::Product(factors) => {
                let inner: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(f, "product[{}]", inner.join(","))
            }
            StateSpec::Mixture(terms) => {
                let inner: Vec<String> = terms.iter().map(|(w, s)| format!("{w}*{s}")).collect();
                write!(f, "mix[{}]", inner.join(","))
            }
            StateSpec::File(path) => write!(f, "file:{}", path.display()),
            StateSpec::RandomPure { dims, seed } => {
                write!(f, "random_pure:{}:{seed}", fmt_dims(dims))
            }
            StateSpec::RandomSeparable { dims, terms, seed } => {
                write!(f, "random_separable:{}:{terms}:{seed}", fmt_dims(dims))
            }
            StateSpec::RandomMixed { dims, rank, seed } => {
                write!(f, "random_mixed:{}:{rank}:{seed}", fmt_dims(dims))
            }
        }
    }
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what} '{s}'")))
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x').map(|d| parse_num(d, "dimension")).collect()
}

/// Splits on commas that are not nested inside brackets.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced brackets in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in '{s}'")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn bracketed<'a>(s: &'a str, head: &str) -> Option<&'a str> {
    s.strip_prefix(head)?.strip_prefix('[')?.strip_suffix(']')
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(StateSpec::File(PathBuf::from(path)));
        }
        if let Some(inner) = bracketed(s, "product") {
            let factors = split_top_level(inner)?
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?;
            return Ok(StateSpec::Product(factors));
        }
        if let Some(inner) = bracketed(s, "mix") {
            let terms = split_top_level(inner)?
                .into_iter()
                .map(|term| {
                    let (w, spec) = term
                        .split_once('*')
                        .ok_or_else(|| Error::Parse(format!("mixture term '{term}' needs W*SPEC")))?;
                    Ok((parse_num(w, "weight")?, spec.parse()?))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(StateSpec::Mixture(terms));
        }
        let fields: Vec<&str> = s.split(':').collect();
        let spec = match fields.as_slice() {
            ["bennett3x3"] => StateSpec::Bennett3x3,
            ["mes", d] => StateSpec::MaxEntangled(parse_num(d, "dimension")?),
            ["isotropic", d, x] => StateSpec::Isotropic {
                d: parse_num(d, "dimension")?,
                x: parse_num(x, "mixing parameter")?,
            },
            ["ket", d, k] => StateSpec::Ket {
                d: parse_num(d, "dimension")?,
                k: parse_num(k, "level")?,
            },
            ["mixed", d] => StateSpec::MaximallyMixed(parse_num(d, "dimension")?),
            ["random_pure", dims, seed] => StateSpec::RandomPure {
                dims: parse_dims(dims)?,
                seed: parse_num(seed, "seed")?,
            },
            ["random_separable", dims, terms, seed] => StateSpec::RandomSeparable {
                dims: parse_dims(dims)?,
                terms: parse_num(terms, "term count")?,
                seed: parse_num(seed, "seed")?,
            },
            ["random_mixed", dims, rank, seed] => StateSpec::RandomMixed {
                dims: parse_dims(dims)?,
                rank: parse_num(rank, "rank")?,
                seed: parse_num(seed, "seed")?,
            },
            _ => return Err(Error::Parse(format!("unknown state '{s}'"))),
        };
        Ok(spec)
    }
}

/// Real orthogonal matrix, Haar-distributed.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, partial_trace, partial_transpose, realign, trace_norm};
    use approx::assert_abs_diff_eq;

    fn assert_state(rho: &DensityMatrix) {
        rho.residuals().check().unwrap();
    }

    #[test]
    fn tiles_are_orthonormal() {
        let tiles = tile_vectors();
        for (a, u) in tiles.iter().enumerate() {
            for (b, v) in tiles.iter().enumerate() {
                let dot: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot.re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(dot.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bennett_state_spectrum_and_ppt() {
        let rho = bennett_state();
        assert_state(&rho);
        let eig = hermitian_eigenvalues(rho.matrix());
        for (k, &e) in eig.iter().enumerate() {
            let expected = if k < 5 { 0.0 } else { 0.25 };
            assert_abs_diff_eq!(e, expected, epsilon = 1e-14);
        }
        let pt = partial_transpose(&rho, 0).unwrap();
        assert!(hermitian_eigenvalues(&pt)[0] >= -1e-10);
        for xi in tile_vectors() {
            let m = rho.matrix();
            let value: Complex64 = (0..9)
                .flat_map(|i| (0..9).map(move |j| (i, j)))
                .map(|(i, j)| xi[i].conj() * m[(i, j)] * xi[j])
                .sum();
            assert!(value.norm() < 1e-12);
        }
    }

    #[test]
    fn max_entangled_properties() {
        for d in 2..=4 {
            let rho = max_entangled(d).unwrap();
            assert_state(&rho);
            let ra = partial_trace(&rho, &[0]).unwrap();
            assert_abs_diff_eq!(ra.purity(), 1.0 / d as f64, epsilon = 1e-14);
            assert_abs_diff_eq!(trace_norm(&realign(&rho).unwrap()), d as f64, epsilon = 1e-12);
        }
        assert!(max_entangled(1).is_err());
    }

    #[test]
    fn mix_endpoints_are_exact() {
        let a = bennett_state();
        let b = max_entangled(3).unwrap();
        assert_eq!(mix(&a, &b, 0.0).unwrap(), a);
        assert_eq!(mix(&a, &b, 1.0).unwrap(), b);
        assert!(matches!(mix(&a, &b, 1.5), Err(Error::MixingParameter(_))));
        assert!(mix(&a, &max_entangled(2).unwrap(), 0.5).is_err());

        let p = StateSpec::Ket { d: 2, k: 0 }.build().unwrap();
        let q = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let half = mix(&p, &q, 0.5).unwrap();
        assert_abs_diff_eq!(half.matrix()[(0, 0)].re, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(half.matrix()[(1, 1)].re, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn mixture_weights_validated() {
        let p = max_entangled(2).unwrap();
        assert!(mixture(&[(0.5, p.clone()), (0.4, p.clone())]).is_err());
        assert!(mixture(&[(1.2, p.clone()), (-0.2, p.clone())]).is_err());
        assert!(mixture(&[]).is_err());
        assert_eq!(mixture(&[(1.0, p.clone())]).unwrap(), p);
    }

    #[test]
    fn random_states_are_valid_and_deterministic() {
        for dims in [vec![2, 2], vec![2, 3], vec![3, 3], vec![2, 2, 2]] {
            for seed in 0..5 {
                let s = random_separable(&dims, 4, seed).unwrap();
                assert_state(&s);
                assert_eq!(s, random_separable(&dims, 4, seed).unwrap());
                assert_state(&random_pure(&dims, seed).unwrap());
                assert_state(&random_mixed(&dims, 3, seed).unwrap());
            }
        }
        assert_ne!(random_pure(&[2, 2], 1).unwrap(), random_pure(&[2, 2], 2).unwrap());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(7);
        for d in 2..=5 {
            let u = haar_unitary(d, &mut rng);
            let err = (&u * u.adjoint() - ComplexMatrix::identity(d, d)).camax();
            assert!(err < 1e-12);
            let o = haar_orthogonal(d * d, &mut rng);
            assert!((&o * o.transpose() - DMatrix::identity(d * d, d * d)).amax() < 1e-12);
        }
    }

    #[test]
    fn spec_round_trips_through_text() {
        let texts = [
            "bennett3x3",
            "mes:3",
            "isotropic:3:0.25",
            "product[ket:2:0,mixed:3,mes:2]",
            "mix[0.5*bennett3x3,0.5*mes:3]",
            "mix[0.25*product[ket:2:1,ket:2:0],0.75*mes:2]",
            "random_pure:2x3:11",
            "random_separable:2x2x2:5:3",
            "random_mixed:3x3:9:1",
            "file:/tmp/some:odd/path.json",
        ];
        for text in texts {
            let spec: StateSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        for bad in ["", "mes", "mes:x", "product[mes:2", "mix[mes:2]", "nope:1"] {
            assert!(bad.parse::<StateSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_builds_products() {
        let rho: DensityMatrix = "product[ket:2:1,mixed:3]".parse::<StateSpec>().unwrap().build().unwrap();
        assert_eq!(rho.dims(), &[2, 3]);
        assert_abs_diff_eq!(rho.matrix()[(3, 3)].re, 1.0 / 3.0, epsilon = 1e-15);
        assert!("ket:2:2".parse::<StateSpec>().unwrap().build().is_err());
    }

    #[test]
    fn state_file_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        let rho = bennett_state();
        write_state_file(&path, &rho).unwrap();
        let back = read_state_file(&path).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-15);

        let mut bad = StateFile::from_state(&rho);
        bad.matrix[0][0][0] += 0.01;
        std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
        match read_state_file(&path) {
            Err(Error::NotUnitTrace { residual }) => assert_abs_diff_eq!(residual, 0.01, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
