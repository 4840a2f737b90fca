//! Spectral gaps of the enumerated kernels, Dirichlet forms and Rayleigh
//! quotients, and finite-size checks of the gap comparisons between chains.
//!
//! Every kernel here is symmetric, so the stationary law is uniform and the
//! gap is `1 - lambda_2` of a real symmetric matrix. The dense solver is
//! authoritative; a deflated power iteration on the sparse rows checks it.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chains::{parse_signed, parse_state, rng_stream, ChainKind, Kernel, Observable};
use crate::error::{Error, Result};
use crate::flip_paths::{all_labels, step_key, PathLabel, StepKey};
use crate::schaeffer::{enumerate_rooted, phi};

/// Gaps computed by the two solvers must agree this closely.
pub const SOLVER_AGREEMENT: f64 = 1e-8;

/// Slack for floating-point comparisons of gaps and forms.
pub const TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub chain: String,
    pub n: usize,
    pub r: u8,
    pub states: usize,
    pub gap: f64,
    pub lambda2: f64,
    /// `|P v - lambda_2 v|` for the power-iteration eigenvector `v`.
    pub solver_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_gap: Option<f64>,
    /// `|P u - u|` for the uniform unit vector `u`.
    pub top_vector_deviation: f64,
}

pub fn dense_matrix(k: &Kernel) -> DMatrix<f64> {
    let m = k.len();
    DMatrix::from_row_slice(m, m, &k.dense())
}

/// Eigenvalues of a symmetric matrix in decreasing order.
pub fn sorted_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut values: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

fn sparse_apply(k: &Kernel, x: &[f64], out: &mut [f64]) {
    let d = k.denom as f64;
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        *o = k.rows[i].iter().map(|&(j, c)| c as f64 * x[j]).sum::<f64>() / d;
    });
}

fn centre_and_normalise(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// `|P x - mu x|` for unit `x`.
pub fn residual(k: &Kernel, x: &[f64], mu: f64) -> f64 {
    let mut y = vec![0.0; x.len()];
    sparse_apply(k, x, &mut y);
    x.iter().zip(&y).map(|(a, b)| (b - mu * a).powi(2)).sum::<f64>().sqrt()
}

/// `lambda_2` and a unit mean-zero eigenvector, by power iteration on the
/// lazy kernel `(P + I) / 2` restricted to mean-zero vectors. `None` if it
/// has not settled within `max_iter` steps or the space has one state.
pub fn power_iteration(k: &Kernel, seed: u64, max_iter: usize) -> Option<(f64, Vec<f64>)> {
    let m = k.len();
    if m < 2 {
        return None;
    }
    let mut rng = rng_stream(seed, 0);
    let mut x: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() - 0.5).collect();
    centre_and_normalise(&mut x);
    let mut y = vec![0.0; m];
    let mut prev = f64::NAN;
    for it in 0..max_iter {
        sparse_apply(k, &x, &mut y);
        let mu = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        if it % 64 == 0 {
            let res = x.iter().zip(&y).map(|(a, b)| (b - mu * a).powi(2)).sum::<f64>().sqrt();
            if res < 1e-10 && (mu - prev).abs() < 1e-14 {
                return Some((mu, x));
            }
            prev = mu;
        }
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi = (*yi + xi) / 2.0;
        }
        centre_and_normalise(&mut y);
        std::mem::swap(&mut x, &mut y);
    }
    None
}

const POWER_STEPS: usize = 5_000_000;

/// Gap from the dense solver and a `lambda_2` eigenvector from power
/// iteration; `(1, [0])` on a single state.
pub fn gap_and_vector(k: &Kernel) -> Result<(f64, Vec<f64>)> {
    if k.len() < 2 {
        return Ok((1.0, vec![0.0; k.len()]));
    }
    let values = sorted_eigenvalues(&dense_matrix(k));
    let (_, v) = power_iteration(k, 1, POWER_STEPS).ok_or_else(|| Error::Usage("power iteration did not settle".into()))?;
    Ok((1.0 - values[1], v))
}

/// Gap of a kernel from the dense solver, cross-checked by power iteration.
pub fn spectral_gap(k: &Kernel) -> Result<GapReport> {
    let m = k.len();
    let uniform = vec![1.0 / (m as f64).sqrt(); m];
    let top_vector_deviation = residual(k, &uniform, 1.0);
    if m < 2 {
        return Ok(GapReport {
            chain: k.kind.name().to_string(),
            n: k.n,
            r: k.r,
            states: m,
            gap: 1.0,
            lambda2: 0.0,
            solver_residual: 0.0,
            power_gap: None,
            top_vector_deviation,
        });
    }
    let values = sorted_eigenvalues(&dense_matrix(k));
    let lambda2 = values[1];
    let (mu, v) = power_iteration(k, 1, POWER_STEPS).ok_or_else(|| Error::Usage("power iteration did not settle".into()))?;
    Ok(GapReport {
        chain: k.kind.name().to_string(),
        n: k.n,
        r: k.r,
        states: m,
        gap: 1.0 - lambda2,
        lambda2,
        solver_residual: residual(k, &v, lambda2),
        power_gap: Some(1.0 - mu),
        top_vector_deviation,
    })
}

/// `E(f, f) = 1/2 sum_(i,j) pi(i) p(i,j) (f(i) - f(j))^2` with `pi` uniform.
pub fn dirichlet(k: &Kernel, f: &[f64]) -> f64 {
    let m = k.len() as f64;
    let d = k.denom as f64;
    k.rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|&(j, c)| c as f64 * (f[i] - f[j]).powi(2)).sum::<f64>())
        .sum::<f64>()
        / (2.0 * m * d)
}

pub fn variance(f: &[f64]) -> f64 {
    let m = f.len() as f64;
    let mean = f.iter().sum::<f64>() / m;
    f.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m
}

/// `E(f, f) / Var(f)`.
pub fn rayleigh(k: &Kernel, f: &[f64]) -> Result<f64> {
    let var = variance(f);
    if var <= 1e-14 {
        return Err(Error::ConstantObservable);
    }
    Ok(dirichlet(k, f) / var)
}

/// `obs` on every state of `k`, in state order.
pub fn observable_values(k: &Kernel, obs: Observable) -> Result<Vec<f64>> {
    k.states.par_iter().map(|c| obs.eval(&parse_state(k.kind, k.r, c)?)).collect()
}

/// The radius Dirichlet form on `Q_n` summed move by move over `(q, e, s)`,
/// without the kernel.
pub fn radius_dirichlet_by_moves(n: usize) -> Result<f64> {
    use crate::maps::{FlipMove, Sign};
    let maps = enumerate_rooted(n);
    let count = maps.len() as f64;
    let total = maps
        .par_iter()
        .map(|(_, q)| {
            let r0 = q.radius() as f64;
            let mut s = 0.0;
            for e in 0..q.edge_count() {
                for sign in [Sign::Plus, Sign::Minus] {
                    s += (r0 - q.flip(FlipMove::new(e, sign))?.radius() as f64).powi(2);
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum::<f64>();
    Ok(total / (2.0 * count * 6.0 * n as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl Check {
    fn le(name: &str, lhs: f64, rhs: f64) -> Check {
        Check { name: name.into(), lhs, rhs, ok: lhs <= rhs + TOLERANCE }
    }

    fn eq(name: &str, lhs: f64, rhs: f64) -> Check {
        Check { name: name.into(), lhs, rhs, ok: (lhs - rhs).abs() <= TOLERANCE * (1.0 + lhs.abs()) }
    }
}

/// Flip path statistics feeding the comparison between `xtilde` and the
/// pointed flip chain.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonData {
    /// Longest path over all labels.
    pub max_length: usize,
    /// Largest number of path steps (with multiplicity) using one `(q, e, s)`.
    pub max_congestion: usize,
    /// Smallest `A` with `E_xtilde(f o phi) <= A E_flip(f)` from the paths.
    pub comparison_constant: f64,
}

fn label_weight(label: &PathLabel, n: usize) -> f64 {
    match label {
        PathLabel::RootReversal { .. } => 1.0 / (n as f64 + 1.0),
        _ => 1.0 / (10.0 * (n as f64 + 1.0)),
    }
}

fn is_hold(label: &PathLabel) -> Result<bool> {
    Ok(match label {
        PathLabel::RootReversal { .. } => false,
        _ => label.target()?.tree == *label.tree(),
    })
}

/// Lengths and congestion of every flip path over `LT_n`, and the resulting
/// comparison constant `12 n max_(q,e,s) sum w |path|`.
pub fn comparison_data(n: usize) -> Result<ComparisonData> {
    let labels = all_labels(n);
    let per_label: Vec<Option<(f64, usize, Vec<StepKey>)>> = labels
        .par_iter()
        .map(|l| {
            if is_hold(l)? {
                return Ok(None);
            }
            let path = l.build()?;
            let states = path.replay()?;
            let keys = path.moves.iter().zip(&states).map(|(&m, q)| step_key(q, m)).collect();
            Ok(Some((label_weight(l, n), path.len(), keys)))
        })
        .collect::<Result<_>>()?;
    let mut load: HashMap<StepKey, (f64, usize)> = HashMap::new();
    let mut max_length = 0;
    for (w, len, keys) in per_label.into_iter().flatten() {
        max_length = max_length.max(len);
        for k in keys {
            let e = load.entry(k).or_default();
            e.0 += w * len as f64;
            e.1 += 1;
        }
    }
    let worst = load.values().map(|v| v.0).fold(0.0, f64::max);
    Ok(ComparisonData {
        max_length,
        max_congestion: load.values().map(|v| v.1).max().unwrap_or(0),
        comparison_constant: 12.0 * n as f64 * worst,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub n: usize,
    /// Gap of the flip chain on `Q_n`.
    pub flip: f64,
    /// Gap of the pointed flip chain.
    pub flip_pointed: f64,
    /// Gap of leaf translation on `LT_n`.
    pub translate: f64,
    pub xtilde: f64,
    pub replant: f64,
    pub comparison: ComparisonData,
    pub checks: Vec<Check>,
}

impl InequalityReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn kernel(kind: ChainKind, n: usize, r: u8, ceiling: usize) -> Result<Kernel> {
    Kernel::build(kind, n, r, ceiling)
}

/// Every gap comparison at size `n`, with the finite-size quantities computed
/// rather than bounded.
pub fn verify_inequalities(n: usize, ceiling: usize) -> Result<InequalityReport> {
    let flip = kernel(ChainKind::Flip, n, 3, ceiling)?;
    let pointed = kernel(ChainKind::FlipPointed, n, 3, ceiling)?;
    let translate = kernel(ChainKind::Translate, n, 3, ceiling)?;
    let xtilde = kernel(ChainKind::Xtilde, n, 3, ceiling)?;
    let replant = kernel(ChainKind::Replant, n, 3, ceiling)?;

    let nu = gap_and_vector(&flip)?.0;
    let (nu_pointed, pointed_vec) = gap_and_vector(&pointed)?;
    let gamma = gap_and_vector(&translate)?.0;
    let (gamma_tilde, xt_vec) = gap_and_vector(&xtilde)?;
    let gamma_y = gap_and_vector(&replant)?.0;
    let nf = n as f64;
    let mut checks = vec![Check::le("pointed gap <= rooted gap", nu_pointed, nu)];

    // split the optimal xtilde function by sign
    let f: Vec<f64> = {
        let var = variance(&xt_vec);
        let mean = xt_vec.iter().sum::<f64>() / xt_vec.len() as f64;
        xt_vec.iter().map(|x| (x - mean) / var.sqrt()).collect()
    };
    let form = dirichlet(&xtilde, &f);
    let mut by_sign: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (code, &x) in xtilde.states.iter().zip(&f) {
        let st = parse_signed(code)?;
        by_sign[usize::from(st.eps < 0)].push(x);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let within = (variance(&by_sign[0]) + variance(&by_sign[1])) / 2.0;
    let between = variance(&[mean(&by_sign[0]), mean(&by_sign[1])]);
    let decomposition = nf * gamma / (nf + 1.0) * within + 2.0 / (nf + 1.0) * between;
    checks.push(Check::eq("xtilde optimiser has unit variance", within + between, 1.0));
    checks.push(Check::eq("Dirichlet form of the xtilde optimiser = xtilde gap", form, gamma_tilde));
    checks.push(Check::le("sign decomposition lower bound <= Dirichlet form of the optimiser", decomposition, form));
    checks.push(Check::le(
        "min(n gamma / (n + 1), 2 / (n + 1)) <= xtilde gap",
        (nf * gamma / (nf + 1.0)).min(2.0 / (nf + 1.0)),
        gamma_tilde,
    ));

    // the pointed optimiser pulled back through phi, summed label by label
    let g: Vec<f64> = xtilde
        .states
        .iter()
        .map(|code| {
            let q = phi(&parse_signed(code)?);
            pointed.index_of(&q.code()).map(|i| pointed_vec[i]).ok_or_else(|| Error::InvalidMap(q.code()))
        })
        .collect::<Result<_>>()?;
    let by_kernel = dirichlet(&xtilde, &g);
    let by_labels = xtilde_dirichlet_by_labels(n, &xtilde, &g)?;
    checks.push(Check::eq("xtilde Dirichlet form summed over moves", by_kernel, by_labels));

    let comparison = comparison_data(n)?;
    let a = comparison.comparison_constant;
    let length = comparison.max_length as f64;
    let congestion = comparison.max_congestion as f64;
    checks.push(Check::le("xtilde gap <= A * pointed gap", gamma_tilde, a * nu_pointed));
    let measured = 12.0 * nf * length * congestion / (nf + 1.0);
    checks.push(Check::le("A <= 12 n L M / (n + 1)", a, measured));
    checks.push(Check::le("xtilde gap <= 12 n L M / (n + 1) * rooted gap", gamma_tilde, measured * nu));
    checks.push(Check::le("xtilde gap <= 7n * M * 6n * pointed gap", gamma_tilde, 7.0 * nf * congestion * 6.0 * nf * nu_pointed));

    Ok(InequalityReport {
        n,
        flip: nu,
        flip_pointed: nu_pointed,
        translate: gamma,
        xtilde: gamma_tilde,
        replant: gamma_y,
        comparison,
        checks,
    })
}

/// `E_xtilde(g)` written as a sum over leaf moves and sign changes, each
/// with its own weight.
pub fn xtilde_dirichlet_by_labels(n: usize, xtilde: &Kernel, g: &[f64]) -> Result<f64> {
    let states = xtilde.len() as f64;
    let value = |st: &crate::schaeffer::SignedTree| -> Result<f64> {
        let code = crate::chains::signed_code(st);
        xtilde.index_of(&code).map(|i| g[i]).ok_or(Error::InvalidMap(code))
    };
    let mut total = 0.0;
    for label in all_labels(n) {
        let tree = label.tree().clone();
        match &label {
            PathLabel::RootReversal { .. } => {
                let a = value(&crate::schaeffer::SignedTree::new(tree.clone(), 1))?;
                let b = value(&crate::schaeffer::SignedTree::new(tree, -1))?;
                total += (a - b).powi(2) / (states * (n as f64 + 1.0));
            }
            PathLabel::ColourChange { eps, .. } | PathLabel::Translation { eps, .. } => {
                let a = value(&crate::schaeffer::SignedTree::new(tree, *eps))?;
                let b = value(&label.target()?)?;
                total += (a - b).powi(2) / (2.0 * states * 5.0 * (n as f64 + 1.0));
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub n: usize,
    pub maps: usize,
    pub far_set: BTreeMap<usize, usize>,
    pub ball_minus_one: BTreeMap<usize, usize>,
    pub equal: bool,
}

/// Histograms of the far set size and of `|B_2| - 1` over `Q_n`.
pub fn law_identity_check(n: usize) -> LawReport {
    let maps = enumerate_rooted(n);
    let mut far_set = BTreeMap::new();
    let mut ball_minus_one = BTreeMap::new();
    for (_, q) in &maps {
        *far_set.entry(q.far_set_size()).or_insert(0) += 1;
        *ball_minus_one.entry(q.ball_size(2) - 1).or_insert(0) += 1;
    }
    let equal = far_set == ball_minus_one;
    LawReport { n, maps: maps.len(), far_set, ball_minus_one, equal }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub chain: String,
    pub r: u8,
    pub gaps: Vec<(usize, f64)>,
    pub slope: Option<f64>,
}

/// Gaps for `n` in `sizes` and their log-log slope. Descriptive only.
pub fn scaling(kind: ChainKind, r: u8, sizes: &[usize], ceiling: usize) -> Result<ScalingReport> {
    let gaps = sizes
        .iter()
        .map(|&n| Ok((n, spectral_gap(&Kernel::build(kind, n, r, ceiling)?)?.gap)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = gaps.iter().map(|&(n, g)| (n as f64, g)).collect();
    Ok(ScalingReport { chain: kind.name().to_string(), r: kind.colours(r), gaps, slope: log_log_slope(&pts) })
}
