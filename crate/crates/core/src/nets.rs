//! ε-nets over pure states, snap-to-net decoding of measurements, and the
//! entropy bookkeeping for full and product measurement sets.
//!
//! Distances between pure states ignore the global phase: the distance of
//! two rays is `min_θ ‖φ − e^{iθ}ψ‖ = sqrt(2 − 2|⟨φ|ψ⟩|)`, and snapping
//! always uses the representative that attains it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::operator::{
    born_rule, trace_norm, CVector, DensityMatrix, HermitianOperator, Measurement, PovmElement,
    ProbabilityVector, PureState, C64,
};
use crate::random::{derive_seed, haar_state, rng_from_seed};

pub const MAX_DIM: usize = 64;
pub const MIN_EPSILON: f64 = 0.05;

/// Knobs of the greedy construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    /// Stop the greedy phase after this many consecutive rejected samples.
    pub stop_after_rejections: usize,
    /// Probes per certification round.
    pub probes: usize,
    /// Certification rounds before giving up.
    pub max_rounds: usize,
    /// Certification rounds add probes farther than `margin · ε`.
    pub margin: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        Self {
            stop_after_rejections: 10_000,
            probes: 100_000,
            max_rounds: 50,
            margin: 0.9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringCertificate {
    pub probes: usize,
    pub probe_seed: u64,
    /// Largest probe-to-net distance seen.
    pub worst_distance: f64,
    pub uncovered: usize,
}

impl CoveringCertificate {
    pub fn passed(&self) -> bool {
        self.uncovered == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateNet {
    dim: usize,
    epsilon: f64,
    seed: u64,
    points: Vec<PureState>,
    certificate: Option<CoveringCertificate>,
}

/// `sqrt(2 − 2|⟨φ|ψ⟩|)`.
pub fn ray_distance(phi: &PureState, psi: &PureState) -> f64 {
    (2.0 - 2.0 * phi.inner(psi).norm()).max(0.0).sqrt()
}

fn overlap_threshold(epsilon: f64) -> f64 {
    1.0 - epsilon * epsilon / 2.0
}

impl StateNet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn points(&self) -> &[PureState] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn certificate(&self) -> Option<&CoveringCertificate> {
        self.certificate.as_ref()
    }

    /// Index of the closest point and the largest overlap `|⟨p|ψ⟩|`.
    pub fn nearest(&self, psi: &PureState) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let c = p.inner(psi).norm();
            if c > best.1 {
                best = (i, c);
            }
        }
        best
    }

    fn covers(&self, psi: &PureState, threshold: f64) -> bool {
        self.points.iter().any(|p| p.inner(psi).norm() >= threshold)
    }

    /// Net point closest to `psi`, rephased so its Euclidean distance to
    /// `psi` equals the ray distance.
    pub fn snap(&self, psi: &PureState) -> PureState {
        let (i, _) = self.nearest(psi);
        let p = &self.points[i];
        let z = p.inner(psi);
        let phase = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        p.with_phase(phase)
    }

    /// Checks `probes` seeded Haar-random states against the net.
    pub fn certify(&self, probes: usize, probe_seed: u64) -> CoveringCertificate {
        let threshold = overlap_threshold(self.epsilon);
        let mut rng = rng_from_seed(probe_seed);
        let mut worst: f64 = 0.0;
        let mut uncovered = 0;
        for _ in 0..probes {
            let x = haar_state(self.dim, &mut rng);
            let (_, c) = self.nearest(&x);
            worst = worst.max((2.0 - 2.0 * c).max(0.0).sqrt());
            if c < threshold {
                uncovered += 1;
            }
        }
        CoveringCertificate {
            probes,
            probe_seed,
            worst_distance: worst,
            uncovered,
        }
    }

    /// Serializes as `dim epsilon seed` followed by one line of re/im pairs per point.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.dim, self.epsilon, self.seed);
        for p in &self.points {
            let fields: Vec<String> = p
                .amplitudes()
                .iter()
                .map(|z| format!("{} {}", z.re, z.im))
                .collect();
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty net file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let parse_err = |e: &dyn std::fmt::Display| Error::Parse(e.to_string());
        let dim: usize = h[0].parse().map_err(|e| parse_err(&e))?;
        let epsilon: f64 = h[1].parse().map_err(|e| parse_err(&e))?;
        let seed: u64 = h[2].parse().map_err(|e| parse_err(&e))?;
        let mut points = Vec::new();
        for line in lines {
            let values: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| parse_err(&e)))
                .collect::<Result<_>>()?;
            if values.len() != 2 * dim {
                return Err(Error::Parse(format!(
                    "expected {} numbers per point, found {}",
                    2 * dim,
                    values.len()
                )));
            }
            let amps = CVector::from_iterator(dim, values.chunks(2).map(|c| C64::new(c[0], c[1])));
            points.push(PureState::new(amps)?);
        }
        Ok(Self {
            dim,
            epsilon,
            seed,
            points,
            certificate: None,
        })
    }
}

fn check_net_params(dim: usize, epsilon: f64) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::TooLarge {
            what: "dim",
            value: dim,
            cap: MAX_DIM,
        });
    }
    if !(MIN_EPSILON..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside [{MIN_EPSILON}, 1]"
        )));
    }
    Ok(())
}

pub fn build_net(dim: usize, epsilon: f64, seed: u64) -> Result<StateNet> {
    build_net_with(dim, epsilon, seed, &NetConfig::default())
}

/// Greedy net: keep a sampled state when it is farther than ε from every
/// point so far, until `stop_after_rejections` samples in a row are
/// rejected. Then certify with fresh probes; uncovered probes join the net
/// and a new round starts, until a round passes cleanly. Probes between
/// `margin · ε` and ε also join, which leaves slack against unseen pockets.
pub fn build_net_with(dim: usize, epsilon: f64, seed: u64, config: &NetConfig) -> Result<StateNet> {
    check_net_params(dim, epsilon)?;
    let threshold = overlap_threshold(epsilon);
    let mut net = StateNet {
        dim,
        epsilon,
        seed,
        points: Vec::new(),
        certificate: None,
    };
    let mut rng = rng_from_seed(seed);
    let mut rejections = 0;
    let mut samples = 0usize;
    while rejections < config.stop_after_rejections {
        let x = haar_state(dim, &mut rng);
        samples += 1;
        if net.covers(&x, threshold) {
            rejections += 1;
        } else {
            net.points.push(x);
            rejections = 0;
        }
    }
    let margin_threshold = overlap_threshold(config.margin * epsilon);
    for round in 0..config.max_rounds {
        let probe_seed = derive_seed(seed, round as u64);
        let mut probe_rng = rng_from_seed(probe_seed);
        let mut added = 0;
        for _ in 0..config.probes {
            let x = haar_state(dim, &mut probe_rng);
            if !net.covers(&x, margin_threshold) {
                if !net.covers(&x, threshold) {
                    added += 1;
                }
                net.points.push(x);
            }
        }
        samples += config.probes;
        if added == 0 {
            net.certificate = Some(net.certify(config.probes, probe_seed));
            return Ok(net);
        }
    }
    Err(Error::NetBudgetExhausted {
        samples,
        points: net.points.len(),
    })
}

/// `(1 + 2/ε)^{2 dim}`.
pub fn net_size_bound(dim: usize, epsilon: f64) -> f64 {
    (1.0 + 2.0 / epsilon).powf(2.0 * dim as f64)
}

/// `log2` of [`net_size_bound`], usable where the bound overflows.
pub fn net_size_bound_log2(dim: usize, epsilon: f64) -> f64 {
    2.0 * dim as f64 * (1.0 + 2.0 / epsilon).log2()
}

/// `(‖φφ† − ψψ†‖_1, 2‖φ − ψ‖)`.
pub fn pure_norm_conversion_check(phi: &PureState, psi: &PureState) -> Result<(f64, f64)> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: psi.dim(),
        });
    }
    let diff = &HermitianOperator::projector(phi) - &HermitianOperator::projector(psi);
    Ok((trace_norm(&diff), 2.0 * phi.distance(psi)))
}

/// An element rebuilt from net projectors, with the net indices used.
#[derive(Debug, Clone)]
pub struct SnappedElement {
    pub approx: HermitianOperator,
    /// `2 ε tr(E)`.
    pub error_bound: f64,
    /// `(net index, weight)` pairs: `approx = Σ w |p_i⟩⟨p_i|`.
    pub terms: Vec<(usize, f64)>,
}

/// Replaces every eigenvector of `E` by its nearest net point, keeping
/// the eigenvalues.
pub fn snap_element(e: &PovmElement, net: &StateNet) -> Result<SnappedElement> {
    if e.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: e.dim(),
        });
    }
    if net.is_empty() {
        return Err(Error::InvalidArgument("net has no points".into()));
    }
    let eig = e.eigh();
    let mut approx = HermitianOperator::zeros(e.dim());
    let mut terms = Vec::new();
    for (k, &w) in eig.values.iter().enumerate() {
        let w = w.max(0.0);
        if w == 0.0 {
            continue;
        }
        let v = PureState::normalized(eig.vector(k))?;
        let (idx, _) = net.nearest(&v);
        approx = &approx + &(&HermitianOperator::projector(&net.points()[idx]) * w);
        terms.push((idx, w));
    }
    Ok(SnappedElement {
        approx,
        error_bound: 2.0 * net.epsilon() * e.trace().max(0.0),
        terms,
    })
}

/// Snaps both factors of `E_A ⊗ E_B`; the bound `2(ε_A + ε_B) tr(E_A) tr(E_B)`
/// follows from `A⊗B − A'⊗B' = (A − A')⊗B + A'⊗(B − B')`.
pub fn product_snap_element(
    ea: &PovmElement,
    eb: &PovmElement,
    net_a: &StateNet,
    net_b: &StateNet,
) -> Result<(HermitianOperator, f64)> {
    let sa = snap_element(ea, net_a)?;
    let sb = snap_element(eb, net_b)?;
    let approx = crate::operator::tensor(&sa.approx, &sb.approx);
    let bound =
        2.0 * (net_a.epsilon() + net_b.epsilon()) * ea.trace().max(0.0) * eb.trace().max(0.0);
    Ok((approx, bound))
}

/// Conic combination of net-projector probabilities reproducing each
/// outcome: `outcome i ↦ Σ_j c_{i,j} tr(|p_j⟩⟨p_j| ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingOperation {
    /// Number of source elements (net points).
    pub sources: usize,
    pub coefficients: BTreeMap<(usize, usize), f64>,
}

impl DecodingOperation {
    pub fn apply(&self, source_probabilities: &[f64], outcomes: usize) -> Vec<f64> {
        let mut out = vec![0.0; outcomes];
        for (&(i, j), &c) in &self.coefficients {
            out[i] += c * source_probabilities[j];
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub decoded: ProbabilityVector,
    pub linf_error: f64,
    /// Snap error bound of each outcome's element.
    pub bounds: Vec<f64>,
    /// Per-outcome absolute error.
    pub errors: Vec<f64>,
    pub operation: DecodingOperation,
}

/// Builds the snap decoder for `m` and applies it to `rho`.
pub fn decoding_operation(
    m: &Measurement,
    net: &StateNet,
) -> Result<(DecodingOperation, Vec<f64>)> {
    let mut coefficients = BTreeMap::new();
    let mut bounds = Vec::with_capacity(m.len());
    for (i, e) in m.elements().iter().enumerate() {
        let s = snap_element(e, net)?;
        for (j, w) in s.terms {
            *coefficients.entry((i, j)).or_insert(0.0) += w;
        }
        bounds.push(s.error_bound);
    }
    Ok((
        DecodingOperation {
            sources: net.len(),
            coefficients,
        },
        bounds,
    ))
}

pub fn decode_measurement(
    m: &Measurement,
    net: &StateNet,
    rho: &DensityMatrix,
) -> Result<DecodeResult> {
    if m.dim() != net.dim() || rho.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: if m.dim() != net.dim() {
                m.dim()
            } else {
                rho.dim()
            },
        });
    }
    let (operation, bounds) = decoding_operation(m, net)?;
    let mut source = vec![0.0; net.len()];
    for &(_, j) in operation.coefficients.keys() {
        source[j] = rho.expectation(net.points()[j].amplitudes());
    }
    let decoded = operation.apply(&source, m.len());
    let exact = born_rule(m, rho)?;
    let errors: Vec<f64> = decoded
        .iter()
        .zip(exact.weights())
        .map(|(a, b)| (a - b).abs())
        .collect();
    let linf_error = errors.iter().copied().fold(0.0, f64::max);
    Ok(DecodeResult {
        decoded: ProbabilityVector::classify(decoded),
        linf_error,
        bounds,
        errors,
        operation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    All,
    Product,
}

/// `log2` of the decoder input size: `2^{n + log2 n + 3}` for all
/// measurements, `(2n + 2) 2^{(n+1)/2 + 2}` for product measurements.
pub fn entropy_budget(kind: BudgetKind, n: u32) -> f64 {
    let nf = n as f64;
    match kind {
        BudgetKind::All => 2f64.powf(nf + nf.log2() + 3.0),
        BudgetKind::Product => (2.0 * nf + 2.0) * 2f64.powf((nf + 1.0) / 2.0 + 2.0),
    }
}

/// `ε_n = (2n + 2) 2^{−(n−1)/2 + 2}`, the per-level entropy rate of product decoding.
pub fn product_entropy_rate(n: u32) -> f64 {
    let nf = n as f64;
    (2.0 * nf + 2.0) * 2f64.powf(-(nf - 1.0) / 2.0 + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Unitary;
    use crate::random::{random_effect, random_povm};

    fn quick() -> NetConfig {
        NetConfig {
            stop_after_rejections: 2_000,
            probes: 20_000,
            max_rounds: 50,
            margin: 0.9,
        }
    }

    #[test]
    fn dim_one_net() {
        let net = build_net_with(1, 0.5, 3, &quick()).unwrap();
        assert_eq!(net.len(), 1);
        assert!(net.certificate().unwrap().passed());
    }

    #[test]
    fn qubit_nets_are_small_and_cover() {
        let coarse = build_net_with(2, 1.0, 1, &quick()).unwrap();
        assert!(coarse.len() <= 10, "{}", coarse.len());
        let net = build_net_with(2, 0.25, 1, &quick()).unwrap();
        assert!((net.len() as f64) <= net_size_bound(2, 0.25));
        assert!(net.certificate().unwrap().passed());
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(build_net(65, 0.5, 0), Err(Error::TooLarge { .. })));
        assert!(matches!(
            build_net(2, 0.01, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn bounds() {
        assert!((net_size_bound(2, 0.25) - 6561.0).abs() < 1e-9);
        assert!((net_size_bound(3, 2.0) - 64.0).abs() < 1e-9);
        for n in 1..=6u32 {
            let dim = 1usize << n;
            let eps = 2f64.powi(-2 * n as i32);
            assert!(net_size_bound_log2(dim, eps) <= entropy_budget(BudgetKind::All, n));
        }
    }

    #[test]
    fn norm_conversion_examples() {
        let a = PureState::basis(2, 0);
        let b = PureState::basis(2, 1);
        assert_eq!(pure_norm_conversion_check(&a, &a).unwrap(), (0.0, 0.0));
        let (l, r) = pure_norm_conversion_check(&a, &b).unwrap();
        assert!((l - 2.0).abs() < 1e-12 && (r - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn snapping_aligned_and_identity() {
        let net = build_net_with(2, 0.5, 4, &quick()).unwrap();
        let e = PovmElement::rank_one(&net.points()[0].with_phase(C64::new(0.0, 1.0)), 0.7);
        let s = snap_element(&e, &net).unwrap();
        assert!(trace_norm(&(&s.approx - e.operator())) < 1e-12);
        let id = snap_element(&PovmElement::identity(2), &net).unwrap();
        assert!((id.approx.trace() - 2.0).abs() < 1e-12);
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let e = random_effect(2, &mut rng);
            let s = snap_element(&e, &net).unwrap();
            assert!(trace_norm(&(&s.approx - e.operator())) <= s.error_bound + 1e-9);
        }
    }

    #[test]
    fn decoding_exact_cases() {
        let net = build_net_with(2, 0.5, 8, &quick()).unwrap();
        let rho = DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let r = decode_measurement(&Measurement::trivial(2), &net, &rho);
        // The identity is snapped eigenvector by eigenvector; error within bound.
        let r = r.unwrap();
        assert!(r.linf_error <= r.bounds[0] + 1e-12);
        let mut with_basis = net.clone();
        with_basis.points.insert(0, PureState::basis(2, 0));
        with_basis.points.insert(1, PureState::basis(2, 1));
        let r = decode_measurement(&Measurement::computational(2), &with_basis, &rho).unwrap();
        assert!(r.linf_error < 1e-12);
        let _ = Unitary::identity(2);
        let mut rng = rng_from_seed(3);
        let m = random_povm(2, 3, &mut rng);
        let r = decode_measurement(&m, &net, &rho).unwrap();
        for (e, b) in r.errors.iter().zip(&r.bounds) {
            assert!(e <= &(b + 1e-12));
        }
    }

    #[test]
    fn text_round_trip() {
        let net = build_net_with(2, 0.8, 5, &quick()).unwrap();
        let back = StateNet::from_text(&net.to_text()).unwrap();
        assert_eq!(back.points(), net.points());
        assert_eq!((back.dim(), back.epsilon(), back.seed()), (2, 0.8, 5));
        assert!(matches!(StateNet::from_text("2 0.5"), Err(Error::Parse(_))));
        assert!(matches!(
            StateNet::from_text("2 0.5 1\n1 0 0"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn budgets() {
        assert_eq!(entropy_budget(BudgetKind::All, 2), 64.0);
        assert!((entropy_budget(BudgetKind::Product, 3) - 128.0).abs() < 1e-9);
        for n in 1..=30 {
            let lhs = entropy_budget(BudgetKind::Product, n);
            let rhs = product_entropy_rate(n) * 2f64.powi(n as i32);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
        assert!(product_entropy_rate(60) < 1e-6);
    }
}
