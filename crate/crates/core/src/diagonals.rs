//! Approximate diagonals ω_{W'*(ξ⊗η)}: the (SA)/(CA) residuals, the map
//! θ_ξ, OBAD residuals and the certificate for the commutator bound.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{map_range, ExecMode};
use crate::funalg::{
    block_decompose, convolve, gamma_star, module_action_left, module_action_right, predual_norm,
    tensor_predual_norm, vector_state, BiFunctional, BlockDecomposition, Functional,
};
use crate::qgcore::{comultiply, derived_unitaries, Construction, FiniteQuantumGroup, TensorSpan};
use crate::report::{worst_of, CheckRecord, Label};
use crate::rng::{derived, random_combination, random_unit_vector};
use crate::tensorlin::{hermitian_eigenvalues, kron, operator_norm, slice_state, ComplexMatrix, SliceSide, TensorVector};

pub const THETA_SUITE: &str = "theta";
pub const THM33_SUITE: &str = "thm33";
pub const OBAD_SUITE: &str = "obad";

const UNIT_TOL: f64 = 1e-12;
/// Λ must lie in M⊗̄M to this relative accuracy before certification.
pub const LAMBDA_MEMBERSHIP_TOL: f64 = 1e-8;
pub const BOUND_SLACK: f64 = 1e-9;

/// A unit vector standing in for one member of a net.
#[derive(Clone, Debug)]
pub struct NetVector {
    vector: TensorVector,
    label: String,
}

impl NetVector {
    pub fn new(vector: TensorVector, label: impl Into<String>) -> Result<Self> {
        if vector.legs().len() != 1 {
            return Err(Error::DimensionMismatch {
                context: "net vectors live on H",
                expected: 1,
                found: vector.legs().len(),
            });
        }
        vector.check_unit(UNIT_TOL)?;
        Ok(Self {
            vector,
            label: label.into(),
        })
    }

    pub fn vector(&self) -> &TensorVector {
        &self.vector
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    /// normalize((1−t)·self + t·u).
    pub fn perturbed(&self, t: f64, u: &TensorVector) -> Result<Self> {
        let mixed = self
            .vector
            .scale(C64::new(1.0 - t, 0.0))
            .sub(&u.scale(C64::new(-t, 0.0)))?
            .normalized()?;
        Self::new(mixed, format!("{} perturbed ε={t}", self.label))
    }
}

/// Everything about one quantum group the section's checks keep reusing.
#[derive(Clone, Debug)]
pub struct DiagonalContext {
    q: FiniteQuantumGroup,
    w_prime: ComplexMatrix,
    w_op: ComplexMatrix,
    w_prime_op: ComplexMatrix,
    /// JĴ as a linear operator.
    j_jhat: ComplexMatrix,
    decomp: BlockDecomposition,
    decomp2: BlockDecomposition,
    tensor_span: TensorSpan,
}

impl DiagonalContext {
    pub fn new(q: &FiniteQuantumGroup) -> Result<Self> {
        let d = derived_unitaries(q)?;
        let decomp = block_decompose(q.algebra_basis())?;
        let decomp2 = decomp.tensor(&decomp);
        Ok(Self {
            q: q.clone(),
            w_prime: d.w_prime,
            w_op: d.w_op,
            w_prime_op: d.w_prime_op,
            j_jhat: q.j() * q.jhat(),
            decomp,
            decomp2,
            tensor_span: q.tensor_span(),
        })
    }

    pub fn q(&self) -> &FiniteQuantumGroup {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn w_prime(&self) -> &ComplexMatrix {
        &self.w_prime
    }

    pub fn w_op(&self) -> &ComplexMatrix {
        &self.w_op
    }

    pub fn w_prime_op(&self) -> &ComplexMatrix {
        &self.w_prime_op
    }

    pub fn j_jhat(&self) -> &ComplexMatrix {
        &self.j_jhat
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.decomp
    }

    pub fn tensor_decomposition(&self) -> &BlockDecomposition {
        &self.decomp2
    }

    /// Relative distance of Λ from M⊗̄M.
    pub fn tensor_membership(&self, lambda: &ComplexMatrix) -> Result<f64> {
        self.tensor_span.residual(lambda)
    }

    pub fn label(&self) -> Label {
        self.q.label()
    }
}

fn pair(a: &TensorVector, b: &TensorVector) -> TensorVector {
    a.tensor(b)
}

fn apply2(op: &ComplexMatrix, v: &TensorVector) -> TensorVector {
    TensorVector::new(v.legs().to_vec(), op * v.data()).expect("operator on H⊗H preserves shape")
}

fn check_dim(ctx: &DiagonalContext, v: &TensorVector) -> Result<()> {
    if v.len() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            context: "vector on H",
            expected: ctx.dim(),
            found: v.len(),
        });
    }
    Ok(())
}

/// ‖W(ζ⊗ξ) − ζ⊗ξ‖.
pub fn sa_residual(ctx: &DiagonalContext, xi: &NetVector, zeta: &TensorVector) -> Result<f64> {
    check_dim(ctx, zeta)?;
    let v = pair(zeta, xi.vector());
    apply2(ctx.q.w(), &v).distance(&v)
}

/// ‖W(η⊗ζ) − η⊗ζ‖.
pub fn ca_residual(ctx: &DiagonalContext, eta: &NetVector, zeta: &TensorVector) -> Result<f64> {
    check_dim(ctx, zeta)?;
    let v = pair(eta.vector(), zeta);
    apply2(ctx.q.w(), &v).distance(&v)
}

/// ‖W*(ξ⊗ζ) − W'*(ξ⊗ζ)‖.
pub fn c1_residual(ctx: &DiagonalContext, xi: &NetVector, zeta: &TensorVector) -> Result<f64> {
    check_dim(ctx, zeta)?;
    let v = pair(xi.vector(), zeta);
    apply2(&ctx.q.w().adjoint(), &v).distance(&apply2(&ctx.w_prime.adjoint(), &v))
}

/// ‖W*(ζ⊗η) − W'*(ζ⊗η)‖.
pub fn c2_residual(ctx: &DiagonalContext, eta: &NetVector, zeta: &TensorVector) -> Result<f64> {
    check_dim(ctx, zeta)?;
    let v = pair(zeta, eta.vector());
    apply2(&ctx.q.w().adjoint(), &v).distance(&apply2(&ctx.w_prime.adjoint(), &v))
}

/// θ_ξ(Λ) = (ω_ξ⊗ι)(W'ΛW'*).
pub fn theta(ctx: &DiagonalContext, xi: &NetVector, lambda: &ComplexMatrix) -> Result<ComplexMatrix> {
    let conj = &ctx.w_prime * lambda * ctx.w_prime.adjoint();
    slice_state(SliceSide::Left, xi.vector().data(), &conj)
}

/// Kraus form of θ_ξ: the n × n² matrix A = (ξ*⊗1)W', so that
/// θ_ξ(|p⟩⟨q|) = (Ap)(Aq)*.
pub fn theta_kraus(ctx: &DiagonalContext, xi: &NetVector) -> ComplexMatrix {
    let n = ctx.dim();
    let xi = xi.vector().data();
    DMatrix::from_fn(n, n * n, |k, col| {
        (0..n).map(|s| xi[s].conj() * ctx.w_prime[(s * n + k, col)]).sum()
    })
}

/// Choi matrix Σ_{ij} E_ij ⊗ θ(E_ij) over the matrix units of H⊗H.
pub fn theta_choi(ctx: &DiagonalContext, xi: &NetVector) -> ComplexMatrix {
    let n = ctx.dim();
    let a = theta_kraus(ctx, xi);
    let m = n * n;
    DMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        a[(k, i)] * a[(l, j)].conj()
    })
}

/// Smallest eigenvalue of the Choi matrix of θ_ξ.
pub fn theta_choi_min_eigenvalue(ctx: &DiagonalContext, xi: &NetVector) -> Result<f64> {
    let choi = theta_choi(ctx, xi);
    let vals = hermitian_eigenvalues(&choi)?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Distances from θ_ξ(X⊗Y) to three candidate simple-tensor formulas.
#[derive(Clone, Copy, Debug)]
pub struct ThetaSimpleTensor {
    /// (ω_ξ⊗ι)((X⊗1)Γ(Y)).
    pub literal: f64,
    /// (ω_{JĴξ}⊗ι)((X⊗1)Γ(Y)).
    pub j_jhat: f64,
    /// (ω_{ĴJξ}⊗ι)((ĴJ X JĴ ⊗ 1)Γ(Y)).
    pub corrected: f64,
}

pub fn theta_simple_tensor(
    ctx: &DiagonalContext,
    xi: &NetVector,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<ThetaSimpleTensor> {
    let n = ctx.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let th = theta(ctx, xi, &kron(x, y))?;
    let gy = comultiply(&ctx.q, y)?;
    let xg = kron(x, &id) * &gy;
    let jj = &ctx.j_jhat;
    // ĴJ = (JĴ)* for commuting involutions.
    let jhat_j = jj.adjoint();
    let twisted = kron(&(&jhat_j * x * jj), &id) * &gy;
    let lit = slice_state(SliceSide::Left, xi.vector().data(), &xg)?;
    let v_jj = jj * xi.vector().data();
    let v_hj = &jhat_j * xi.vector().data();
    let alt = slice_state(SliceSide::Left, &v_jj, &xg)?;
    let cor = slice_state(SliceSide::Left, &v_hj, &twisted)?;
    Ok(ThetaSimpleTensor {
        literal: operator_norm(&(&th - lit))?,
        j_jhat: operator_norm(&(&th - alt))?,
        corrected: operator_norm(&(&th - cor))?,
    })
}

/// The candidate diagonal ω_{W'*(ξ⊗η)}.
#[derive(Clone, Debug)]
pub struct DiagonalCandidate {
    pub xi: NetVector,
    pub eta: NetVector,
    pub vector: TensorVector,
    pub bifunctional: BiFunctional,
}

pub fn build_diagonal(ctx: &DiagonalContext, xi: &NetVector, eta: &NetVector) -> Result<DiagonalCandidate> {
    check_dim(ctx, xi.vector())?;
    check_dim(ctx, eta.vector())?;
    let v = apply2(&ctx.w_prime.adjoint(), &pair(xi.vector(), eta.vector()));
    Ok(DiagonalCandidate {
        xi: xi.clone(),
        eta: eta.clone(),
        bifunctional: BiFunctional::vector_state(&v)?,
        vector: v,
    })
}

/// (‖a·x − x·a‖, ‖Γ_*(x)∗a − a‖) in the predual norms.
pub fn obad_residuals(ctx: &DiagonalContext, d: &DiagonalCandidate, a: &Functional) -> Result<(f64, f64)> {
    let x = &d.bifunctional;
    let comm = module_action_left(&ctx.q, a, x)?.sub(&module_action_right(&ctx.q, x, a)?)?;
    let r1 = tensor_predual_norm(&comm, &ctx.decomp2)?;
    let unit = convolve(&ctx.q, &gamma_star(&ctx.q, x)?, a)?.sub(a)?;
    let r2 = predual_norm(&unit, &ctx.decomp)?;
    Ok((r1, r2))
}

/// One instance of the commutator bound |(ω_ζ·x − x·ω_ζ)(Λ)| ≤ 3ε‖Λ‖.
#[derive(Clone, Copy, Debug)]
pub struct Thm33Cert {
    pub eps_sa: f64,
    pub eps_comm: f64,
    pub eps: f64,
    pub lhs: f64,
    pub lambda_norm: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn thm33_certify(
    ctx: &DiagonalContext,
    zeta: &TensorVector,
    xi: &NetVector,
    eta: &NetVector,
    lambda: &ComplexMatrix,
) -> Result<Thm33Cert> {
    let membership = ctx.tensor_membership(lambda)?;
    if membership > LAMBDA_MEMBERSHIP_TOL {
        return Err(Error::NotInAlgebra { residual: membership });
    }
    let eps_sa = sa_residual(ctx, xi, zeta)?;
    let wz = vector_state(zeta)?;
    let we = vector_state(eta.vector())?;
    let comm = convolve(&ctx.q, &wz, &we)?.sub(&convolve(&ctx.q, &we, &wz)?)?;
    let eps_comm = predual_norm(&comm, &ctx.decomp)?;
    let eps = eps_sa.max(eps_comm);
    let x = build_diagonal(ctx, xi, eta)?.bifunctional;
    let diff = module_action_left(&ctx.q, &wz, &x)?.sub(&module_action_right(&ctx.q, &x, &wz)?)?;
    let lhs = diff.evaluate(lambda)?.norm();
    let lambda_norm = operator_norm(lambda)?;
    let bound = 3.0 * eps * lambda_norm;
    Ok(Thm33Cert {
        eps_sa,
        eps_comm,
        eps,
        lhs,
        lambda_norm,
        bound,
        pass: lhs <= bound + BOUND_SLACK,
    })
}

/// Exact (SA, CA) vectors where the construction provides them: the uniform
/// vector and δ_e for a function algebra, swapped for a group algebra.
pub fn exact_nets(q: &FiniteQuantumGroup) -> Result<(NetVector, NetVector)> {
    let n = q.dim();
    let uniform = TensorVector::uniform(n).normalized()?;
    let delta = TensorVector::basis(n, 0);
    match q.construction() {
        Construction::FunctionAlgebra => Ok((
            NetVector::new(uniform, "exact SA (uniform)")?,
            NetVector::new(delta, "exact CA (δ_e)")?,
        )),
        Construction::GroupAlgebra => Ok((
            NetVector::new(delta, "exact SA (δ_e)")?,
            NetVector::new(uniform, "exact CA (uniform)")?,
        )),
        Construction::Generic => Err(Error::NoExactNets),
    }
}

/// Exact nets pushed towards random unit vectors by t = ε.
pub fn perturbed_nets<R: Rng + ?Sized>(
    q: &FiniteQuantumGroup,
    eps: f64,
    rng: &mut R,
) -> Result<(NetVector, NetVector)> {
    let (xi, eta) = exact_nets(q)?;
    let n = q.dim();
    Ok((
        xi.perturbed(eps, &random_unit_vector(rng, n))?,
        eta.perturbed(eps, &random_unit_vector(rng, n))?,
    ))
}

/// Random element of M⊗̄M with operator norm one.
pub fn random_tensor_element<R: Rng + ?Sized>(ctx: &DiagonalContext, rng: &mut R) -> Result<ComplexMatrix> {
    let basis = ctx.q.algebra_basis();
    let mut lambda = DMatrix::<C64>::zeros(ctx.dim().pow(2), ctx.dim().pow(2));
    for _ in 0..3 {
        lambda += kron(&random_combination(rng, basis), &random_combination(rng, basis));
    }
    let norm = operator_norm(&lambda)?;
    Ok(lambda.unscale(norm))
}

/// Random element of M with operator norm one.
pub fn random_algebra_element<R: Rng + ?Sized>(q: &FiniteQuantumGroup, rng: &mut R) -> Result<ComplexMatrix> {
    let x = random_combination(rng, q.algebra_basis());
    let norm = operator_norm(&x)?;
    Ok(x.unscale(norm))
}

/// ‖ω̂_{Ŵ^op*Ŵ(ζ⊗ξ)} − ω̂_{ζ⊗ξ}‖ on M̂⊗̄M̂, where `hat` is the context of
/// the dual of `ctx`'s quantum group.
pub fn quasicentral_bai_remark_check(
    ctx: &DiagonalContext,
    hat: &DiagonalContext,
    zeta: &TensorVector,
    xi: &NetVector,
) -> Result<f64> {
    check_dim(ctx, zeta)?;
    let v = pair(zeta, xi.vector());
    let moved = apply2(&(hat.w_op.adjoint() * hat.q.w()), &v);
    let diff = BiFunctional::vector_state(&moved)?.sub(&BiFunctional::vector_state(&v)?)?;
    tensor_predual_norm(&diff, &hat.decomp2)
}

/// Settings shared by the sweeps below.
#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub seed: u64,
    pub draws: usize,
    pub epsilons: Vec<f64>,
    pub tol: f64,
    pub mode: ExecMode,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            draws: 100,
            epsilons: vec![0.01, 0.1, 0.3],
            tol: 1e-10,
            mode: ExecMode::default(),
        }
    }
}

fn failed(suite: &str, check: &str, anchor: &str, label: &Label, tol: f64) -> CheckRecord {
    CheckRecord::residual(suite, check, anchor, label, f64::INFINITY, tol)
}

fn keyed(opts: &SweepOptions, label: &Label, key: &str) -> String {
    format!("{}/{}/{}/{}", label.group, label.construction, key, opts.seed)
}

/// θ_ξ checks for `draws` random unit ξ.
pub fn theta_records(ctx: &DiagonalContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let label = ctx.label();
    let n = ctx.dim();
    let anchor = "Lemma 3.4";
    let per_draw = map_range(opts.mode, opts.draws, |i| -> Result<[f64; 6]> {
        let mut rng = derived(i as u64, &keyed(opts, &label, "theta"));
        let xi = NetVector::new(random_unit_vector(&mut rng, n), "random")?;
        let id2 = DMatrix::<C64>::identity(n * n, n * n);
        let unital = operator_norm(&(theta(ctx, &xi, &id2)? - DMatrix::identity(n, n)))?;
        let choi = theta_choi_min_eigenvalue(ctx, &xi)?;
        let lambda = random_tensor_element(ctx, &mut rng)?;
        let range = ctx.q.membership_residual(&theta(ctx, &xi, &lambda)?)?;
        let x = random_algebra_element(&ctx.q, &mut rng)?;
        let y = random_algebra_element(&ctx.q, &mut rng)?;
        let st = theta_simple_tensor(ctx, &xi, &x, &y)?;
        Ok([unital, choi, range, st.literal, st.j_jhat, st.corrected])
    });
    let mut worst = [0.0f64, f64::INFINITY, 0.0, 0.0, 0.0, 0.0];
    for r in per_draw {
        match r {
            Ok(v) => {
                worst[1] = worst[1].min(v[1]);
                for k in [0, 2, 3, 4, 5] {
                    worst[k] = worst[k].max(v[k]);
                }
            }
            Err(_) => return vec![failed(THETA_SUITE, "θ evaluation", anchor, &label, opts.tol)],
        }
    }
    let d = opts.draws;
    vec![
        CheckRecord::residual(THETA_SUITE, "θ(1) = 1", anchor, &label, worst[0], opts.tol).with_draws(d),
        CheckRecord::bounded(THETA_SUITE, "Choi matrix min eigenvalue ≥ 0", anchor, &label, -worst[1], 0.0, 1e-9)
            .with_draws(d),
        CheckRecord::residual(THETA_SUITE, "θ(M⊗M) ⊂ M", anchor, &label, worst[2], 1e-9).with_draws(d),
        CheckRecord::logged(THETA_SUITE, "simple tensor via ω_ξ", anchor, &label, worst[3]).with_draws(d),
        CheckRecord::logged(THETA_SUITE, "simple tensor via ω_{JĴξ}", anchor, &label, worst[4]).with_draws(d),
        CheckRecord::residual(
            THETA_SUITE,
            "simple tensor via ω_{ĴJξ} with ĴJXJĴ",
            anchor,
            &label,
            worst[5],
            opts.tol,
        )
        .with_draws(d),
    ]
}

/// Commutator bound over `draws` random (ζ, Λ) per ε, at perturbed nets.
pub fn thm33_records(ctx: &DiagonalContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let label = ctx.label();
    let anchor = "Theorem 3.3";
    let n = ctx.dim();
    let mut out = Vec::new();
    for &eps in &opts.epsilons {
        let check = format!("|(ω_ζ·x − x·ω_ζ)(Λ)| ≤ 3ε‖Λ‖ at ε={eps}");
        let mut net_rng = derived(0, &keyed(opts, &label, &format!("thm33 nets {eps}")));
        let nets = perturbed_nets(&ctx.q, eps, &mut net_rng);
        let Ok((xi, eta)) = nets else {
            out.push(failed(THM33_SUITE, &check, anchor, &label, BOUND_SLACK));
            continue;
        };
        let records = map_range(opts.mode, opts.draws, |i| {
            let mut rng = derived(i as u64, &keyed(opts, &label, &format!("thm33 {eps}")));
            let cert = (|| {
                let zeta = random_unit_vector(&mut rng, n);
                let lambda = random_tensor_element(ctx, &mut rng)?;
                thm33_certify(ctx, &zeta, &xi, &eta, &lambda)
            })();
            match cert {
                Ok(c) => CheckRecord::bounded(THM33_SUITE, check.clone(), anchor, &label, c.lhs, c.bound, BOUND_SLACK),
                Err(_) => failed(THM33_SUITE, &check, anchor, &label, BOUND_SLACK),
            }
        });
        out.extend(worst_of(records));
    }
    out
}

/// OBAD residuals of the exact diagonal against every basis vector state.
pub fn obad_records(ctx: &DiagonalContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let label = ctx.label();
    let anchor = "Corollary 3.6";
    let n = ctx.dim();
    let result = (|| -> Result<(f64, f64)> {
        let (xi, eta) = exact_nets(&ctx.q)?;
        let d = build_diagonal(ctx, &xi, &eta)?;
        let per = map_range(opts.mode, n, |s| {
            obad_residuals(ctx, &d, &vector_state(&TensorVector::basis(n, s))?)
        });
        per.into_iter()
            .try_fold((0.0f64, 0.0f64), |acc, r| r.map(|(a, b)| (acc.0.max(a), acc.1.max(b))))
    })();
    let (r1, r2) = result.unwrap_or((f64::INFINITY, f64::INFINITY));
    vec![
        CheckRecord::residual(OBAD_SUITE, "OBAD1 ‖a·x − x·a‖ at exact nets", anchor, &label, r1, opts.tol)
            .with_draws(n),
        CheckRecord::residual(OBAD_SUITE, "OBAD2 ‖Γ_*(x)a − a‖ at exact nets", anchor, &label, r2, opts.tol)
            .with_draws(n),
    ]
}
