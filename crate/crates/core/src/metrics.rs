//! Statistical distance, trace distance, the representation metric `d_M`
//! with its norm `‖·‖_M`, and distances to state families.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::operator::{
    born_rule, born_rule_product, pos_neg_parts, reduce_left, reduce_right, trace_norm, CMatrix,
    DensityMatrix, HermitianOperator, Measurement, PovmElement, ProbabilityVector,
    ProductMeasurement, Unitary, C64,
};
use crate::random::{
    derive_seed, haar_unitary_with, near_identity_unitary, random_density_any_rank, random_effect,
    rng_from_seed, SeededRng,
};

/// `½ Σ |p_i − q_i|`.
pub fn statistical_distance(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(0.5
        * p.weights()
            .iter()
            .zip(q.weights())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// `½ ‖ρ − σ‖_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let diff = rho.try_sub(sigma)?;
    Ok(0.5 * trace_norm(&diff))
}

/// How the supremum over an infinite family is approximated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupStrategy {
    /// Every member of an explicit list.
    Enumerate,
    /// A seeded sample of members, optionally followed by a local
    /// hill-climb around the best one. Lower bound on the true value.
    Sample {
        count: usize,
        seed: u64,
        refine_steps: usize,
    },
    /// Closed-form optimum where the family admits one.
    AnalyticWitness,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Explicit(Vec<Measurement>),
    /// `M_A ⊗ M_B` with independent rank-one bases on each side.
    ProductRank1Bases {
        dim_a: usize,
        dim_b: usize,
    },
    /// `M ⊗ M` with the same rank-one basis on both sides.
    MatchedRank1Bases {
        dim: usize,
    },
    /// Every rank-one projective measurement.
    AllRank1Bases {
        dim: usize,
    },
    /// `{{PEP, 1 − PEP} : ⟨0|E|0⟩ = 0} ∪ {{1}}` with `P = Σ e^{-k}|k⟩⟨k|`.
    Damped {
        dim: usize,
    },
}

impl FamilyKind {
    fn name(&self) -> &'static str {
        match self {
            FamilyKind::Explicit(_) => "explicit",
            FamilyKind::ProductRank1Bases { .. } => "product-rank1-bases",
            FamilyKind::MatchedRank1Bases { .. } => "matched-rank1-bases",
            FamilyKind::AllRank1Bases { .. } => "all-rank1-bases",
            FamilyKind::Damped { .. } => "damped",
        }
    }
}

/// A measurement drawn from a family; product members keep their factors.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyMember {
    Single(Measurement),
    Product(ProductMeasurement),
}

impl FamilyMember {
    pub fn evaluate(&self, a: &HermitianOperator) -> Result<ProbabilityVector> {
        match self {
            FamilyMember::Single(m) => born_rule(m, a),
            FamilyMember::Product(m) => born_rule_product(m, a),
        }
    }

    pub fn dense(&self) -> Measurement {
        match self {
            FamilyMember::Single(m) => m.clone(),
            FamilyMember::Product(m) => m.to_measurement(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FamilyMember::Single(m) => m.dim(),
            FamilyMember::Product(m) => m.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    kind: FamilyKind,
    strategy: SupStrategy,
}

/// Value of a supremum together with the member attaining it.
#[derive(Debug, Clone)]
pub struct SupResult {
    pub value: f64,
    pub certificate: FamilyMember,
    /// True when the value only bounds the supremum from below.
    pub lower_bound: bool,
}

/// Points of the search space for the sampled basis families.
#[derive(Debug, Clone)]
enum Point {
    Single(Unitary),
    Pair(Unitary, Unitary),
    Matched(Unitary),
    Damped(PovmElement),
    Trivial(usize),
}

impl MeasurementFamily {
    pub fn explicit(members: Vec<Measurement>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        let d = first.dim();
        if let Some(m) = members.iter().find(|m| m.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.dim(),
            });
        }
        Ok(Self {
            kind: FamilyKind::Explicit(members),
            strategy: SupStrategy::Enumerate,
        })
    }

    pub fn new(kind: FamilyKind, strategy: SupStrategy) -> Result<Self> {
        if let FamilyKind::Explicit(members) = kind {
            let mut family = Self::explicit(members)?;
            if strategy != SupStrategy::Enumerate {
                return Err(Error::UnsupportedStrategy {
                    strategy: strategy_name(&strategy),
                    family: family.kind.name(),
                });
            }
            family.strategy = strategy;
            return Ok(family);
        }
        let supported = match (&kind, &strategy) {
            (_, SupStrategy::Sample { count, .. }) => *count > 0,
            (FamilyKind::AllRank1Bases { .. }, SupStrategy::AnalyticWitness) => true,
            (FamilyKind::Damped { .. }, SupStrategy::AnalyticWitness) => true,
            _ => false,
        };
        if !supported {
            return Err(
                if matches!(strategy, SupStrategy::Sample { count: 0, .. }) {
                    Error::EmptyFamily
                } else {
                    Error::UnsupportedStrategy {
                        strategy: strategy_name(&strategy),
                        family: kind.name(),
                    }
                },
            );
        }
        Ok(Self { kind, strategy })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn strategy(&self) -> SupStrategy {
        self.strategy
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FamilyKind::Explicit(m) => m[0].dim(),
            FamilyKind::ProductRank1Bases { dim_a, dim_b } => dim_a * dim_b,
            FamilyKind::MatchedRank1Bases { dim } => dim * dim,
            FamilyKind::AllRank1Bases { dim } | FamilyKind::Damped { dim } => *dim,
        }
    }

    /// The finite set of members the strategy ranges over. Analytic
    /// families have no such set.
    pub fn members(&self) -> Result<Vec<FamilyMember>> {
        match (&self.kind, self.strategy) {
            (FamilyKind::Explicit(list), _) => {
                Ok(list.iter().cloned().map(FamilyMember::Single).collect())
            }
            (_, SupStrategy::Sample { count, seed, .. }) => Ok((0..count)
                .map(|i| self.to_member(&self.sample_point(i, seed)))
                .collect()),
            _ => Err(Error::UnsupportedStrategy {
                strategy: strategy_name(&self.strategy),
                family: self.kind.name(),
            }),
        }
    }

    /// Member `index` of the sample. Index 0 is always the canonical
    /// member (computational bases, or `{1}` for the damped family).
    fn sample_point(&self, index: usize, seed: u64) -> Point {
        let mut rng = rng_from_seed(derive_seed(seed, index as u64));
        let first = index == 0;
        match self.kind {
            FamilyKind::ProductRank1Bases { dim_a, dim_b } => {
                if first {
                    Point::Pair(Unitary::identity(dim_a), Unitary::identity(dim_b))
                } else {
                    Point::Pair(
                        haar_unitary_with(dim_a, &mut rng),
                        haar_unitary_with(dim_b, &mut rng),
                    )
                }
            }
            FamilyKind::MatchedRank1Bases { dim } => Point::Matched(if first {
                Unitary::identity(dim)
            } else {
                haar_unitary_with(dim, &mut rng)
            }),
            FamilyKind::AllRank1Bases { dim } => Point::Single(if first {
                Unitary::identity(dim)
            } else {
                haar_unitary_with(dim, &mut rng)
            }),
            FamilyKind::Damped { dim } => {
                if first {
                    Point::Trivial(dim)
                } else {
                    Point::Damped(damped_effect(dim, &mut rng))
                }
            }
            FamilyKind::Explicit(_) => unreachable!("explicit families are enumerated"),
        }
    }

    fn to_member(&self, point: &Point) -> FamilyMember {
        match point {
            Point::Single(u) => FamilyMember::Single(Measurement::from_basis(u)),
            Point::Pair(a, b) => FamilyMember::Product(ProductMeasurement::new(
                Measurement::from_basis(a),
                Measurement::from_basis(b),
            )),
            Point::Matched(u) => {
                let m = Measurement::from_basis(u);
                FamilyMember::Product(ProductMeasurement::new(m.clone(), m))
            }
            Point::Damped(e) => FamilyMember::Single(damped_measurement(e)),
            Point::Trivial(dim) => FamilyMember::Single(Measurement::trivial(*dim)),
        }
    }

    fn perturb(&self, point: &Point, scale: f64, rng: &mut SeededRng) -> Option<Point> {
        let step = |u: &Unitary, rng: &mut SeededRng| {
            u.compose(&near_identity_unitary(u.dim(), scale, rng))
        };
        match point {
            Point::Single(u) => Some(Point::Single(step(u, rng))),
            Point::Pair(a, b) => Some(Point::Pair(step(a, rng), step(b, rng))),
            Point::Matched(u) => Some(Point::Matched(step(u, rng))),
            Point::Damped(_) | Point::Trivial(_) => None,
        }
    }
}

fn strategy_name(s: &SupStrategy) -> &'static str {
    match s {
        SupStrategy::Enumerate => "enumerate",
        SupStrategy::Sample { .. } => "sample",
        SupStrategy::AnalyticWitness => "analytic-witness",
    }
}

fn damping(dim: usize) -> Vec<f64> {
    (0..dim).map(|k| (-(k as f64)).exp()).collect()
}

/// Random effect with `E|0⟩ = 0`.
fn damped_effect(dim: usize, rng: &mut SeededRng) -> PovmElement {
    let inner = random_effect(dim - 1, rng);
    let mut mat = CMatrix::zeros(dim, dim);
    mat.view_mut((1, 1), (dim - 1, dim - 1))
        .copy_from(inner.matrix());
    PovmElement::new_trusted(HermitianOperator::symmetrized(mat))
}

/// `{PEP, 1 − PEP}`.
fn damped_measurement(e: &PovmElement) -> Measurement {
    let p = damping(e.dim());
    let mut m = e.matrix().clone();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= p[i] * p[j];
        }
    }
    Measurement::binary(PovmElement::new_trusted(HermitianOperator::symmetrized(m)))
}

fn check_dim(family: &MeasurementFamily, d: usize) -> Result<()> {
    if family.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: d,
        });
    }
    Ok(())
}

/// `‖A‖_M = sup_M ‖P_M(A)‖_1`, computed per the family's strategy.
pub fn m_norm(a: &HermitianOperator, family: &MeasurementFamily) -> Result<SupResult> {
    check_dim(family, a.dim())?;
    let objective = |m: &FamilyMember| -> Result<f64> { Ok(m.evaluate(a)?.l1_norm()) };
    match (&family.kind, family.strategy) {
        (FamilyKind::AllRank1Bases { .. }, SupStrategy::AnalyticWitness) => {
            // The eigenbasis of A attains ‖A‖_1.
            let eig = a.eigh();
            let basis = Unitary::new_trusted(eig.vectors.clone());
            Ok(SupResult {
                value: eig.values.iter().map(|x| x.abs()).sum(),
                certificate: FamilyMember::Single(Measurement::from_basis(&basis)),
                lower_bound: false,
            })
        }
        (FamilyKind::Damped { dim }, SupStrategy::AnalyticWitness) => Ok(damped_analytic(a, *dim)),
        (FamilyKind::Explicit(_), _) => {
            let members = family.members()?;
            let mut best: Option<(f64, FamilyMember)> = None;
            for m in members {
                let v = objective(&m)?;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, m));
                }
            }
            let (value, certificate) = best.ok_or(Error::EmptyFamily)?;
            Ok(SupResult {
                value,
                certificate,
                lower_bound: false,
            })
        }
        (
            _,
            SupStrategy::Sample {
                count,
                seed,
                refine_steps,
            },
        ) => {
            let mut best: Option<(f64, Point)> = None;
            for i in 0..count {
                let p = family.sample_point(i, seed);
                let v = objective(&family.to_member(&p))?;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, p));
                }
            }
            let (mut value, mut point) = best.ok_or(Error::EmptyFamily)?;
            let mut rng = rng_from_seed(derive_seed(seed, u64::MAX));
            let mut scale = 0.1;
            let mut failures = 0;
            for _ in 0..refine_steps {
                let Some(candidate) = family.perturb(&point, scale, &mut rng) else {
                    break;
                };
                let v = objective(&family.to_member(&candidate))?;
                if v > value {
                    value = v;
                    point = candidate;
                    failures = 0;
                } else {
                    failures += 1;
                    if failures >= 10 {
                        scale *= 0.5;
                        failures = 0;
                        if scale < 1e-10 {
                            break;
                        }
                    }
                }
            }
            Ok(SupResult {
                value,
                certificate: family.to_member(&point),
                lower_bound: true,
            })
        }
        _ => Err(Error::UnsupportedStrategy {
            strategy: strategy_name(&family.strategy),
            family: family.kind.name(),
        }),
    }
}

/// For `{PEP, 1 − PEP}` the 1-norm is `g(f) = |f| + |tr A − f|` with
/// `f = tr(E·B)`, `B = Q P A P Q` on the complement of `|0⟩`. `f` ranges
/// over `[tr B_−, tr B_+]` and `g` is convex, so the endpoints win.
fn damped_analytic(a: &HermitianOperator, dim: usize) -> SupResult {
    let p = damping(dim);
    let mut b = CMatrix::zeros(dim - 1, dim - 1);
    for j in 1..dim {
        for i in 1..dim {
            b[(i - 1, j - 1)] = a.matrix()[(i, j)] * (p[i] * p[j]);
        }
    }
    let b = HermitianOperator::symmetrized(b);
    let t = a.trace();
    let g = |f: f64| f.abs() + (t - f).abs();
    let eig = b.eigh();
    let support = |positive: bool| {
        let weights: Vec<f64> = eig
            .values
            .iter()
            .map(|&x| {
                if (x > 0.0) == positive && x != 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let inner = HermitianOperator::from_eigenpairs(&weights, &eig.vectors);
        let mut mat = CMatrix::zeros(dim, dim);
        mat.view_mut((1, 1), (dim - 1, dim - 1))
            .copy_from(inner.matrix());
        PovmElement::new_trusted(HermitianOperator::symmetrized(mat))
    };
    let (bp, bn) = pos_neg_parts(&b);
    let candidates = [
        (t.abs(), None),
        (g(bp.trace()), Some(true)),
        (g(bn.trace()), Some(false)),
    ];
    let (value, which) =
        candidates.into_iter().fold(
            (f64::NEG_INFINITY, None),
            |acc, c| if c.0 > acc.0 { c } else { acc },
        );
    let certificate = match which {
        None => Measurement::trivial(dim),
        Some(positive) => damped_measurement(&support(positive)),
    };
    SupResult {
        value,
        certificate: FamilyMember::Single(certificate),
        lower_bound: false,
    }
}

/// `d_M(ρ, σ) = ½ sup_M ‖P_M(ρ) − P_M(σ)‖_1`.
pub fn d_m(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    family: &MeasurementFamily,
) -> Result<SupResult> {
    let diff = rho.try_sub(sigma)?;
    let mut r = m_norm(&diff, family)?;
    r.value *= 0.5;
    Ok(r)
}

/// Projective qubit measurements along `count` near-uniform Bloch directions.
pub fn qubit_basis_grid(count: usize) -> Vec<Measurement> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let theta = z.clamp(-1.0, 1.0).acos();
            let phi = golden * i as f64;
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let e = C64::from_polar(1.0, phi);
            let u = CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)],
            );
            Measurement::from_basis(&Unitary::new_trusted(u))
        })
        .collect()
}

/// Which tensor factor is fixed in a product family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    Explicit(Vec<DensityMatrix>),
    /// `{F ⊗ σ}` (fixed on the left) or `{σ ⊗ F}` over all states `σ`.
    ProductWithFreeFactor {
        fixed: DensityMatrix,
        side: Side,
        free_dim: usize,
    },
}

impl StateFamily {
    pub fn dim(&self) -> Option<usize> {
        match self {
            StateFamily::Explicit(list) => list.first().map(|s| s.dim()),
            StateFamily::ProductWithFreeFactor {
                fixed, free_dim, ..
            } => Some(fixed.dim() * free_dim),
        }
    }

    fn compose(fixed: &DensityMatrix, side: Side, free: &DensityMatrix) -> DensityMatrix {
        match side {
            Side::Left => fixed.tensor(free),
            Side::Right => free.tensor(fixed),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FamilyMetric<'a> {
    Trace,
    Representation(&'a MeasurementFamily),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub step: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            iterations: 500,
            restarts: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InfResult {
    pub value: f64,
    pub minimizer: DensityMatrix,
    /// False when the best value was still moving at the end of the run.
    pub converged: bool,
    /// True when the value only bounds the infimum from above.
    pub upper_bound: bool,
}

pub fn distance_to_family(
    rho: &DensityMatrix,
    family: &StateFamily,
    metric: FamilyMetric<'_>,
) -> Result<InfResult> {
    distance_to_family_with(rho, family, metric, &OptimizerConfig::default())
}

/// Value and subgradient (in the trace pairing) of the metric at `x`.
fn metric_with_gradient(
    rho: &DensityMatrix,
    x: &DensityMatrix,
    members: Option<&[Measurement]>,
) -> Result<(f64, HermitianOperator)> {
    let diff = rho.operator() - x.operator();
    match members {
        None => {
            let eig = diff.eigh();
            let signs: Vec<f64> = eig.values.iter().map(|v| v.signum()).collect();
            let value = 0.5 * eig.values.iter().map(|v| v.abs()).sum::<f64>();
            let s = HermitianOperator::from_eigenpairs(&signs, &eig.vectors);
            Ok((value, &s * -0.5))
        }
        Some(list) => {
            let mut best: Option<(f64, &Measurement, Vec<f64>)> = None;
            for m in list {
                let p = born_rule(m, &diff)?;
                let v = 0.5 * p.l1_norm();
                if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                    best = Some((v, m, p.weights().to_vec()));
                }
            }
            let (value, m, weights) = best.ok_or(Error::EmptyFamily)?;
            let mut g = HermitianOperator::zeros(diff.dim());
            for (e, w) in m.elements().iter().zip(weights) {
                g = &g + &(e.operator() * (-0.5 * w.signum()));
            }
            Ok((value, g))
        }
    }
}

pub fn distance_to_family_with(
    rho: &DensityMatrix,
    family: &StateFamily,
    metric: FamilyMetric<'_>,
    config: &OptimizerConfig,
) -> Result<InfResult> {
    let members: Option<Vec<Measurement>> = match metric {
        FamilyMetric::Trace => None,
        FamilyMetric::Representation(f) => {
            check_dim(f, rho.dim())?;
            Some(f.members()?.iter().map(FamilyMember::dense).collect())
        }
    };
    let members = members.as_deref();
    let value_at =
        |x: &DensityMatrix| -> Result<f64> { Ok(metric_with_gradient(rho, x, members)?.0) };
    match family {
        StateFamily::Explicit(list) => {
            let mut best: Option<(f64, &DensityMatrix)> = None;
            for s in list {
                if s.dim() != rho.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: rho.dim(),
                        found: s.dim(),
                    });
                }
                let v = value_at(s)?;
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, s));
                }
            }
            let (value, s) = best.ok_or(Error::EmptyStateFamily)?;
            Ok(InfResult {
                value,
                minimizer: s.clone(),
                converged: true,
                upper_bound: false,
            })
        }
        StateFamily::ProductWithFreeFactor {
            fixed,
            side,
            free_dim,
        } => {
            if fixed.dim() * free_dim != rho.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rho.dim(),
                    found: fixed.dim() * free_dim,
                });
            }
            let (da, db) = match side {
                Side::Left => (fixed.dim(), *free_dim),
                Side::Right => (*free_dim, fixed.dim()),
            };
            let mut best: Option<(f64, DensityMatrix, bool)> = None;
            for restart in 0..config.restarts.max(1) {
                let mut rng = rng_from_seed(derive_seed(config.seed, restart as u64));
                let mut sigma = if restart == 0 {
                    DensityMatrix::maximally_mixed(*free_dim)
                } else {
                    random_density_any_rank(*free_dim, &mut rng)
                };
                let mut local_best = (f64::INFINITY, sigma.clone());
                let mut history = Vec::with_capacity(config.iterations);
                for _ in 0..config.iterations {
                    let x = StateFamily::compose(fixed, *side, &sigma);
                    let (v, g) = metric_with_gradient(rho, &x, members)?;
                    if v < local_best.0 {
                        local_best = (v, sigma.clone());
                    }
                    history.push(local_best.0);
                    let reduced = match side {
                        Side::Left => reduce_left(g.matrix(), fixed.matrix(), da, db),
                        Side::Right => reduce_right(g.matrix(), fixed.matrix(), da, db),
                    };
                    let grad = HermitianOperator::symmetrized(reduced);
                    sigma = DensityMatrix::project(&(sigma.operator() - &(&grad * config.step)));
                }
                let x = StateFamily::compose(fixed, *side, &sigma);
                let v = value_at(&x)?;
                if v < local_best.0 {
                    local_best = (v, sigma);
                }
                let window = history.len().min(100);
                let converged =
                    window == 0 || history[history.len() - window] - local_best.0 < 1e-6;
                if best.as_ref().is_none_or(|(b, _, _)| local_best.0 < *b) {
                    best = Some((local_best.0, local_best.1, converged));
                }
            }
            let (value, sigma, converged) = best.expect("at least one restart");
            Ok(InfResult {
                value,
                minimizer: StateFamily::compose(fixed, *side, &sigma),
                converged,
                upper_bound: true,
            })
        }
    }
}

/// Rank of the real span of product effects `E_A ⊗ E_B` drawn from a
/// generating sample, and whether it fills the Hermitian operators on
/// `A ⊗ B`.
pub fn product_span_check(dim_a: usize, dim_b: usize) -> (usize, bool) {
    let mut rng = rng_from_seed(0x5eed);
    let effects_a: Vec<PovmElement> = (0..dim_a * dim_a + 2)
        .map(|_| random_effect(dim_a, &mut rng))
        .collect();
    let effects_b: Vec<PovmElement> = (0..dim_b * dim_b + 2)
        .map(|_| random_effect(dim_b, &mut rng))
        .collect();
    let d = dim_a * dim_b;
    let rows = effects_a.len() * effects_b.len();
    let mut table = DMatrix::<f64>::zeros(rows, d * d);
    let mut r = 0;
    for ea in &effects_a {
        for eb in &effects_b {
            let prod = ea.tensor(eb);
            let mut c = 0;
            for j in 0..d {
                for i in 0..=j {
                    let z = prod.matrix()[(i, j)];
                    table[(r, c)] = z.re;
                    c += 1;
                    if i != j {
                        table[(r, c)] = z.im;
                        c += 1;
                    }
                }
            }
            r += 1;
        }
    }
    let rank = table.rank(1e-9);
    (rank, rank == d * d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedRow {
    pub n: usize,
    pub d_damped: f64,
    pub delta: f64,
}

/// `d_M(|n⟩⟨n|, |0⟩⟨0|)` under the damped family next to the trace distance.
pub fn damped_family_demo(dim: usize) -> Result<Vec<DampedRow>> {
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "damped family needs dim >= 2".into(),
        ));
    }
    let family = MeasurementFamily::new(FamilyKind::Damped { dim }, SupStrategy::AnalyticWitness)?;
    let ground = DensityMatrix::basis_state(dim, 0);
    (0..dim)
        .map(|n| {
            let state = DensityMatrix::basis_state(dim, n);
            Ok(DampedRow {
                n,
                d_damped: d_m(&state, &ground, &family)?.value,
                delta: trace_distance(&state, &ground)?,
            })
        })
        .collect()
}

/// Random pair of states, for audits.
pub fn random_state_pair<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> (DensityMatrix, DensityMatrix) {
    (
        random_density_any_rank(dim, rng),
        random_density_any_rank(dim, rng),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{CVector, PureState};

    fn singlet() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
            C64::new(0.0, 0.0),
        ]);
        DensityMatrix::from_pure(&PureState::new(v).unwrap())
    }

    #[test]
    fn statistical_distance_examples() {
        let p = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        let q = ProbabilityVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(statistical_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(statistical_distance(&p, &q).unwrap(), 1.0);
        let r = ProbabilityVector::uniform(3);
        assert_eq!(
            statistical_distance(&p, &r),
            Err(Error::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::basis_state(2, 0);
        let b = DensityMatrix::basis_state(2, 1);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let d = trace_distance(&singlet(), &DensityMatrix::maximally_mixed(4)).unwrap();
        assert!((d - 0.75).abs() < 1e-12);
    }

    #[test]
    fn singlet_under_product_bases() {
        let family = MeasurementFamily::new(
            FamilyKind::ProductRank1Bases { dim_a: 2, dim_b: 2 },
            SupStrategy::Sample {
                count: 200,
                seed: 3,
                refine_steps: 0,
            },
        )
        .unwrap();
        let r = d_m(&singlet(), &DensityMatrix::maximally_mixed(4), &family).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        let matched = MeasurementFamily::new(
            FamilyKind::MatchedRank1Bases { dim: 2 },
            SupStrategy::Sample {
                count: 50,
                seed: 9,
                refine_steps: 0,
            },
        )
        .unwrap();
        for m in matched.members().unwrap() {
            let p = m.evaluate(&singlet()).unwrap();
            let q = m.evaluate(&DensityMatrix::maximally_mixed(4)).unwrap();
            assert!((statistical_distance(&p, &q).unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn damped_examples() {
        let family =
            MeasurementFamily::new(FamilyKind::Damped { dim: 8 }, SupStrategy::AnalyticWitness)
                .unwrap();
        let one = DensityMatrix::basis_state(8, 1);
        let zero = DensityMatrix::basis_state(8, 0);
        let r = d_m(&one, &zero, &family).unwrap();
        assert!((r.value - (-2f64).exp()).abs() < 1e-9);
        let rows = damped_family_demo(8).unwrap();
        assert_eq!(rows[0].d_damped, 0.0);
        for row in &rows[1..] {
            assert!((row.d_damped - (-2.0 * row.n as f64).exp()).abs() < 1e-12);
            assert!((row.delta - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_damped_dominates_samples() {
        let dim = 5;
        let analytic =
            MeasurementFamily::new(FamilyKind::Damped { dim }, SupStrategy::AnalyticWitness)
                .unwrap();
        let sampled = MeasurementFamily::new(
            FamilyKind::Damped { dim },
            SupStrategy::Sample {
                count: 300,
                seed: 1,
                refine_steps: 0,
            },
        )
        .unwrap();
        let mut rng = rng_from_seed(44);
        for _ in 0..20 {
            let a = crate::random::random_hermitian(dim, &mut rng);
            let exact = m_norm(&a, &analytic).unwrap().value;
            let lower = m_norm(&a, &sampled).unwrap().value;
            assert!(lower <= exact + 1e-9, "{lower} > {exact}");
            let cert = m_norm(&a, &analytic).unwrap().certificate;
            assert!((cert.evaluate(&a).unwrap().l1_norm() - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn m_norm_of_z_with_refinement() {
        let family = MeasurementFamily::new(
            FamilyKind::AllRank1Bases { dim: 2 },
            SupStrategy::Sample {
                count: 500,
                seed: 17,
                refine_steps: 2000,
            },
        )
        .unwrap();
        let z = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        assert!((m_norm(&z, &family).unwrap().value - 2.0).abs() < 1e-6);
        let zero = HermitianOperator::zeros(2);
        assert_eq!(m_norm(&zero, &family).unwrap().value, 0.0);
    }

    #[test]
    fn span_checks() {
        assert_eq!(product_span_check(1, 1), (1, true));
        assert_eq!(product_span_check(2, 2), (16, true));
        assert_eq!(product_span_check(2, 3), (36, true));
    }

    #[test]
    fn singlet_distance_to_product_family() {
        let family = StateFamily::ProductWithFreeFactor {
            fixed: DensityMatrix::maximally_mixed(2),
            side: Side::Left,
            free_dim: 2,
        };
        let r = distance_to_family(&singlet(), &family, FamilyMetric::Trace).unwrap();
        assert!(r.value >= 0.25);
        assert!((r.value - 0.75).abs() < 1e-3, "{}", r.value);
    }

    #[test]
    fn member_of_family_has_distance_zero() {
        let free = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let fixed = DensityMatrix::maximally_mixed(2);
        let rho = fixed.tensor(&free);
        let explicit = StateFamily::Explicit(vec![DensityMatrix::maximally_mixed(4), rho.clone()]);
        let r = distance_to_family(&rho, &explicit, FamilyMetric::Trace).unwrap();
        assert_eq!(r.value, 0.0);
        let product = StateFamily::ProductWithFreeFactor {
            fixed,
            side: Side::Left,
            free_dim: 2,
        };
        let r = distance_to_family(&rho, &product, FamilyMetric::Trace).unwrap();
        assert!(r.value < 1e-3, "{}", r.value);
    }

    #[test]
    fn strategy_validation() {
        assert!(matches!(
            MeasurementFamily::new(
                FamilyKind::ProductRank1Bases { dim_a: 2, dim_b: 2 },
                SupStrategy::AnalyticWitness
            ),
            Err(Error::UnsupportedStrategy { .. })
        ));
        assert_eq!(MeasurementFamily::explicit(vec![]), Err(Error::EmptyFamily));
    }
}
