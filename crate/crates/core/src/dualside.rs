//! The dual side: flip identities, the three-leg lemmas, the diagonal of 𝔾̂
//! and the quasi-central approximate identity u_{α,β}.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::diagonals::{
    exact_nets, obad_residuals, perturbed_nets, quasicentral_bai_remark_check,
    random_algebra_element, random_tensor_element, DiagonalCandidate, DiagonalContext, NetVector, SweepOptions,
    BOUND_SLACK, LAMBDA_MEMBERSHIP_TOL,
};
use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::funalg::{convolve, predual_norm, vector_state, BiFunctional, Functional};
use crate::qgcore::{dual, matrix_residual, vector_residual, Atom, Expr, FiniteQuantumGroup, Modular, UnitaryTable};
use crate::report::{worst_of, CheckRecord, Label};
use crate::rng::{derived, random_unit_vector};
use crate::tensorlin::{apply_leg, operator_norm, ComplexMatrix, TensorVector};

pub const LEMMA32_SUITE: &str = "lemma32";
pub const LEMMA42_SUITE: &str = "lemma42";
pub const LEMMA43_SUITE: &str = "lemma43";
pub const DUAL_SUITE: &str = "dual";
pub const THM44_SUITE: &str = "thm44";

/// Power-iteration steps after each random vector in three-leg checks.
const POWER_STEPS: usize = 2;

/// A quantum group together with its dual and every unitary the section uses.
#[derive(Clone, Debug)]
pub struct DualContext {
    env: UnitaryTable,
    side: DiagonalContext,
    hat: DiagonalContext,
}

impl DualContext {
    pub fn new(q: &FiniteQuantumGroup) -> Result<Self> {
        let qhat = dual(q)?;
        Ok(Self {
            env: UnitaryTable::with_dual(q, &qhat)?,
            side: DiagonalContext::new(q)?,
            hat: DiagonalContext::new(&qhat)?,
        })
    }

    pub fn q(&self) -> &FiniteQuantumGroup {
        self.side.q()
    }

    pub fn qhat(&self) -> &FiniteQuantumGroup {
        self.hat.q()
    }

    pub fn side(&self) -> &DiagonalContext {
        &self.side
    }

    pub fn hat(&self) -> &DiagonalContext {
        &self.hat
    }

    pub fn env(&self) -> &UnitaryTable {
        &self.env
    }

    pub fn dim(&self) -> usize {
        self.side.dim()
    }

    pub fn label(&self) -> Label {
        self.side.label()
    }

    fn op(&self, a: Atom) -> &ComplexMatrix {
        self.env.get(a)
    }

    /// ‖Ŵ' − (W^op)^‖.
    pub fn hat_prime_residual(&self) -> Result<f64> {
        matrix_residual(self.op(Atom::WHatPrime), self.op(Atom::WOpHat))
    }
}

fn apply2(op: &ComplexMatrix, v: &TensorVector) -> TensorVector {
    TensorVector::new(v.legs().to_vec(), op * v.data()).expect("operator on H⊗H preserves shape")
}

fn flip(v: &TensorVector) -> Result<TensorVector> {
    v.permute_legs(&[1, 0])
}

/// (‖Ŵ*(ξ⊗ζ) − σW(ζ⊗ξ)‖, ‖Ŵ'*(ξ⊗ζ) − σW^op(ζ⊗ξ)‖).
pub fn flip_identity_check(ctx: &DualContext, xi: &TensorVector, zeta: &TensorVector) -> Result<(f64, f64)> {
    let xz = xi.tensor(zeta);
    let zx = zeta.tensor(xi);
    let r1 = apply2(&ctx.op(Atom::WHat).adjoint(), &xz).distance(&flip(&apply2(ctx.op(Atom::W), &zx))?)?;
    let r2 = apply2(&ctx.op(Atom::WHatPrime).adjoint(), &xz).distance(&flip(&apply2(ctx.op(Atom::WOp), &zx))?)?;
    Ok((r1, r2))
}

/// The four hypotheses of the dual diagonal statement, in order:
/// ‖W(ζ⊗ξ) − ζ⊗ξ‖, ‖W(η⊗ζ) − η⊗ζ‖, ‖W(ζ⊗η) − W^op(ζ⊗η)‖, ‖W(ξ⊗ζ) − W^op(ξ⊗ζ)‖.
pub fn dual_conditions_residuals(
    ctx: &DualContext,
    xi: &TensorVector,
    eta: &TensorVector,
    zeta: &TensorVector,
) -> Result<[f64; 4]> {
    let w = ctx.op(Atom::W);
    let wop = ctx.op(Atom::WOp);
    let zx = zeta.tensor(xi);
    let ez = eta.tensor(zeta);
    let ze = zeta.tensor(eta);
    let xz = xi.tensor(zeta);
    Ok([
        apply2(w, &zx).distance(&zx)?,
        apply2(w, &ez).distance(&ez)?,
        apply2(w, &ze).distance(&apply2(wop, &ze))?,
        apply2(w, &xz).distance(&apply2(wop, &xz))?,
    ])
}

/// ω_{(W^op)^*(ξ⊗η)} as a functional on M̂⊗̄M̂, with ξ an (SA) and η a (CA)
/// vector for 𝔾̂.
pub fn build_dual_diagonal(ctx: &DualContext, xi: &NetVector, eta: &NetVector) -> Result<DiagonalCandidate> {
    let v = apply2(&ctx.op(Atom::WOpHat).adjoint(), &xi.vector().tensor(eta.vector()));
    Ok(DiagonalCandidate {
        xi: xi.clone(),
        eta: eta.clone(),
        bifunctional: BiFunctional::vector_state(&v)?,
        vector: v,
    })
}

/// Exact (SA, CA) vectors of 𝔾̂: the (CA, SA) vectors of 𝔾.
pub fn exact_dual_nets(ctx: &DualContext) -> Result<(NetVector, NetVector)> {
    let (xi, eta) = exact_nets(ctx.q())?;
    Ok((eta, xi))
}

fn a(x: Atom) -> Expr {
    Expr::atom(x)
}

/// Both sides of W₁₂W'₂₃* = W'₂₃*W₁₃W₁₂, W₂₃W'₁₂* = W'₁₂*W'₁₃*W₂₃ and
/// W₁₃*W₂₃* = (Ĵ⊗Ĵ⊗J)W₁₃W₂₃(Ĵ⊗Ĵ⊗J).
pub fn lemma32_identities() -> [(Expr, Expr); 3] {
    use Atom::*;
    use Modular::*;
    [
        (
            Expr::product(vec![a(W).on(&[0, 1]), a(WPrime).adj().on(&[1, 2])]),
            Expr::product(vec![a(WPrime).adj().on(&[1, 2]), a(W).on(&[0, 2]), a(W).on(&[0, 1])]),
        ),
        (
            Expr::product(vec![a(W).on(&[1, 2]), a(WPrime).adj().on(&[0, 1])]),
            Expr::product(vec![a(WPrime).adj().on(&[0, 1]), a(WPrime).adj().on(&[0, 2]), a(W).on(&[1, 2])]),
        ),
        (
            Expr::product(vec![a(W).adj().on(&[0, 2]), a(W).adj().on(&[1, 2])]),
            Expr::sandwich(
                &[JHat, JHat, J],
                Expr::product(vec![a(W).on(&[0, 2]), a(W).on(&[1, 2])]),
            ),
        ),
    ]
}

/// W'^op₁₃* W'₁₃ W'^op₂₃* W₂₃ = W'₁₂* W'^op₂₃* W'₂₃ W'₁₂ W'₂₃* W₂₃.
pub fn lemma42_identity() -> (Expr, Expr) {
    use Atom::*;
    (
        Expr::product(vec![
            a(WPrimeOp).adj().on(&[0, 2]),
            a(WPrime).on(&[0, 2]),
            a(WPrimeOp).adj().on(&[1, 2]),
            a(W).on(&[1, 2]),
        ]),
        Expr::product(vec![
            a(WPrime).adj().on(&[0, 1]),
            a(WPrimeOp).adj().on(&[1, 2]),
            a(WPrime).on(&[1, 2]),
            a(WPrime).on(&[0, 1]),
            a(WPrime).adj().on(&[1, 2]),
            a(W).on(&[1, 2]),
        ]),
    )
}

/// W'₁₃ and W'^op₂₃* commute.
pub fn lemma42_commutation() -> (Expr, Expr) {
    use Atom::*;
    let x = a(WPrime).on(&[0, 2]);
    let y = a(WPrimeOp).adj().on(&[1, 2]);
    (Expr::product(vec![x.clone(), y.clone()]), Expr::product(vec![y, x]))
}

/// W₂₃W₁₂W'^op₁₂* = W₁₂W'^op₁₂*W₁₃W₂₃W'₁₃*.
pub fn lemma43_identity() -> (Expr, Expr) {
    use Atom::*;
    (
        Expr::product(vec![a(W).on(&[1, 2]), a(W).on(&[0, 1]), a(WPrimeOp).adj().on(&[0, 1])]),
        Expr::product(vec![
            a(W).on(&[0, 1]),
            a(WPrimeOp).adj().on(&[0, 1]),
            a(W).on(&[0, 2]),
            a(W).on(&[1, 2]),
            a(WPrime).adj().on(&[0, 2]),
        ]),
    )
}

/// The first legs of W and W'^op* commute: W₁₃ W'^op₁₂* = W'^op₁₂* W₁₃.
pub fn lemma43_commutation() -> (Expr, Expr) {
    use Atom::*;
    let x = a(W).on(&[0, 2]);
    let y = a(WPrimeOp).adj().on(&[0, 1]);
    (Expr::product(vec![x.clone(), y.clone()]), Expr::product(vec![y, x]))
}

fn identity_residual<R: Rng + ?Sized>(ctx: &DualContext, id: &(Expr, Expr), rng: &mut R, draws: usize) -> Result<f64> {
    vector_residual(&id.0, &id.1, &ctx.env, 3, rng, draws, POWER_STEPS)
}

pub fn lemma32_identity_check<R: Rng + ?Sized>(ctx: &DualContext, rng: &mut R, draws: usize) -> Result<[f64; 3]> {
    let ids = lemma32_identities();
    Ok([
        identity_residual(ctx, &ids[0], rng, draws)?,
        identity_residual(ctx, &ids[1], rng, draws)?,
        identity_residual(ctx, &ids[2], rng, draws)?,
    ])
}

/// (identity residual, commutation residual).
pub fn lemma42_identity_check<R: Rng + ?Sized>(ctx: &DualContext, rng: &mut R, draws: usize) -> Result<(f64, f64)> {
    Ok((
        identity_residual(ctx, &lemma42_identity(), rng, draws)?,
        identity_residual(ctx, &lemma42_commutation(), rng, draws)?,
    ))
}

/// (identity residual, commutation residual).
pub fn lemma43_identity_check<R: Rng + ?Sized>(ctx: &DualContext, rng: &mut R, draws: usize) -> Result<(f64, f64)> {
    Ok((
        identity_residual(ctx, &lemma43_identity(), rng, draws)?,
        identity_residual(ctx, &lemma43_commutation(), rng, draws)?,
    ))
}

/// v = W W'^op* (ξ⊗η), the vector whose second-leg slice is u_{α,β}.
fn u_vector(ctx: &DualContext, xi: &TensorVector, eta: &TensorVector) -> TensorVector {
    let m = ctx.op(Atom::W) * ctx.op(Atom::WPrimeOp).adjoint();
    apply2(&m, &xi.tensor(eta))
}

/// u(x) = ω_v(1⊗x) with v = W W'^op* (ξ⊗η).
pub fn build_u(ctx: &DualContext, xi: &TensorVector, eta: &TensorVector) -> Result<Functional> {
    let v = u_vector(ctx, xi, eta);
    let mut slices = v.leg_slices(0)?.into_iter();
    let first = slices.next().ok_or(Error::EmptyBasis)?;
    slices.try_fold(Functional::vector(first.data(), first.data()), |acc, s| {
        acc.add(&Functional::vector(s.data(), s.data()))
    })
}

fn check_in_m(q: &FiniteQuantumGroup, x: &ComplexMatrix) -> Result<()> {
    let r = q.membership_residual(x)?;
    if r > LAMBDA_MEMBERSHIP_TOL {
        return Err(Error::NotInAlgebra { residual: r });
    }
    Ok(())
}

/// |X(u∗ω_ζ) − ⟨X₃ w, w⟩| with w = W₂₃W₁₂W'^op₁₂*(ξ⊗η⊗ζ): u must be the
/// second-leg slice for this to vanish.
pub fn u_slice_convention_residual(
    ctx: &DualContext,
    xi: &TensorVector,
    eta: &TensorVector,
    zeta: &TensorVector,
    x: &ComplexMatrix,
) -> Result<f64> {
    check_in_m(ctx.q(), x)?;
    let u = build_u(ctx, xi, eta)?;
    let lhs = convolve(ctx.q(), &u, &vector_state(zeta)?)?.evaluate(x)?;
    let w3 = xi.tensor(eta).tensor(zeta);
    let w3 = apply_leg(&ctx.op(Atom::WPrimeOp).adjoint(), &[0, 1], &w3)?;
    let w3 = apply_leg(ctx.op(Atom::W), &[0, 1], &w3)?;
    let w3 = apply_leg(ctx.op(Atom::W), &[1, 2], &w3)?;
    let xw = apply_leg(x, &[2], &w3)?;
    Ok((lhs - xw.inner(&w3)).norm())
}

/// A measured left-hand side against a computed bound.
#[derive(Clone, Copy, Debug)]
pub struct BoundCert {
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

impl BoundCert {
    fn new(lhs: f64, bound: f64) -> Self {
        Self {
            lhs,
            bound,
            pass: lhs <= bound + BOUND_SLACK,
        }
    }
}

/// |X(u∗ω_ζ) − X(ω_ζ)| ≤ 2‖X‖(‖WW'*(ξ⊗ζ) − ξ⊗ζ‖ + ‖W₂₃W'₁₃*(ξ⊗η⊗ζ) − W'₁₃*(ξ⊗η⊗ζ)‖).
pub fn bai_residual_bound_check(
    ctx: &DualContext,
    xi: &TensorVector,
    eta: &TensorVector,
    zeta: &TensorVector,
    x: &ComplexMatrix,
) -> Result<BoundCert> {
    check_in_m(ctx.q(), x)?;
    let u = build_u(ctx, xi, eta)?;
    let wz = vector_state(zeta)?;
    let lhs = (convolve(ctx.q(), &u, &wz)?.evaluate(x)? - wz.evaluate(x)?).norm();
    let w = ctx.op(Atom::W);
    let wp = ctx.op(Atom::WPrime);
    let xz = xi.tensor(zeta);
    let t1 = apply2(&(w * wp.adjoint()), &xz).distance(&xz)?;
    let v3 = apply_leg(&wp.adjoint(), &[0, 2], &xi.tensor(eta).tensor(zeta))?;
    let t2 = apply_leg(w, &[1, 2], &v3)?.distance(&v3)?;
    Ok(BoundCert::new(lhs, 2.0 * operator_norm(x)? * (t1 + t2)))
}

/// |(ω_ζ⊗u)(W'*W'^op Λ W'^op*W' − Λ)|.
pub fn quasicentral_residual(
    ctx: &DualContext,
    u: &Functional,
    zeta: &TensorVector,
    lambda: &ComplexMatrix,
) -> Result<f64> {
    let r = ctx.side.tensor_membership(lambda)?;
    if r > LAMBDA_MEMBERSHIP_TOL {
        return Err(Error::NotInAlgebra { residual: r });
    }
    let m = ctx.op(Atom::WPrime).adjoint() * ctx.op(Atom::WPrimeOp);
    let moved = &m * lambda * m.adjoint() - lambda;
    Ok(vector_state(zeta)?.tensor(u)?.evaluate(&moved)?.norm())
}

/// The quasi-central residual against 2‖Λ‖ times the sum of
/// ‖W'₂₃*W₂₃w − w‖, ‖W'₁₂w − w‖ and ‖W₂₃*W'₂₃w − w‖ for w = ζ⊗ξ⊗η.
pub fn quasicentral_bound_check(
    ctx: &DualContext,
    xi: &TensorVector,
    eta: &TensorVector,
    zeta: &TensorVector,
    lambda: &ComplexMatrix,
) -> Result<BoundCert> {
    let u = build_u(ctx, xi, eta)?;
    let lhs = quasicentral_residual(ctx, &u, zeta, lambda)?;
    let w = ctx.op(Atom::W);
    let wp = ctx.op(Atom::WPrime);
    let v = zeta.tensor(xi).tensor(eta);
    let t1 = apply_leg(&(wp.adjoint() * w), &[1, 2], &v)?.distance(&v)?;
    let t2 = apply_leg(wp, &[0, 1], &v)?.distance(&v)?;
    let t3 = apply_leg(&(w.adjoint() * wp), &[1, 2], &v)?.distance(&v)?;
    Ok(BoundCert::new(lhs, 2.0 * operator_norm(lambda)? * (t1 + t2 + t3)))
}

/// max over basis states a of ‖u∗a − a‖.
pub fn u_identity_residual(ctx: &DualContext, u: &Functional) -> Result<f64> {
    let n = ctx.dim();
    (0..n).try_fold(0.0f64, |acc, s| {
        let a = vector_state(&TensorVector::basis(n, s))?;
        let r = predual_norm(&convolve(ctx.q(), u, &a)?.sub(&a)?, ctx.side.decomposition())?;
        Ok(acc.max(r))
    })
}

fn failed(suite: &str, check: &str, anchor: &str, label: &Label, tol: f64) -> CheckRecord {
    CheckRecord::residual(suite, check, anchor, label, f64::INFINITY, tol)
}

fn keyed(opts: &SweepOptions, label: &Label, key: &str) -> String {
    format!("{}/{}/{}/{}", label.group, label.construction, key, opts.seed)
}

/// Worst residual of each lemma check over `opts.draws` vectors, one
/// random stream per (group, construction, check).
fn lemma_records(
    ctx: &DualContext,
    opts: &SweepOptions,
    suite: &str,
    anchor: &str,
    checks: Vec<(&str, (Expr, Expr))>,
) -> Vec<CheckRecord> {
    let label = ctx.label();
    checks
        .into_iter()
        .map(|(name, id)| {
            let mut rng = derived(0, &keyed(opts, &label, name));
            let r = identity_residual(ctx, &id, &mut rng, opts.draws).unwrap_or(f64::INFINITY);
            CheckRecord::residual(suite, name, anchor, &label, r, opts.tol).with_draws(opts.draws)
        })
        .collect()
}

pub fn lemma32_records(ctx: &DualContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let [i1, i2, i3] = lemma32_identities();
    lemma_records(
        ctx,
        opts,
        LEMMA32_SUITE,
        "Lemma 3.2",
        vec![
            ("W12 W'23* = W'23* W13 W12", i1),
            ("W23 W'12* = W'12* W'13* W23", i2),
            ("W13* W23* = (Ĵ⊗Ĵ⊗J) W13 W23 (Ĵ⊗Ĵ⊗J)", i3),
        ],
    )
}

pub fn lemma42_records(ctx: &DualContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    lemma_records(
        ctx,
        opts,
        LEMMA42_SUITE,
        "Lemma 4.2",
        vec![
            ("W'op13* W'13 W'op23* W23 = W'12* W'op23* W'23 W'12 W'23* W23", lemma42_identity()),
            ("W'13 commutes with W'op23*", lemma42_commutation()),
        ],
    )
}

pub fn lemma43_records(ctx: &DualContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    lemma_records(
        ctx,
        opts,
        LEMMA43_SUITE,
        "Lemma 4.3",
        vec![
            ("W23 W12 W'op12* = W12 W'op12* W13 W23 W'13*", lemma43_identity()),
            ("W13 commutes with W'op12*", lemma43_commutation()),
        ],
    )
}

/// Flip identities, Ŵ' = (W^op)^, the hypotheses at exact nets and the
/// OBAD residuals of the dual diagonal.
pub fn dual_records(ctx: &DualContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let label = ctx.label();
    let n = ctx.dim();
    let anchor = "Corollary 4.1";
    let mut out = Vec::new();

    let mut rng = derived(0, &keyed(opts, &label, "flip"));
    let mut flips = (0.0f64, 0.0f64);
    for _ in 0..opts.draws {
        let xi = random_unit_vector(&mut rng, n);
        let zeta = random_unit_vector(&mut rng, n);
        let (r1, r2) = flip_identity_check(ctx, &xi, &zeta).unwrap_or((f64::INFINITY, f64::INFINITY));
        flips = (flips.0.max(r1), flips.1.max(r2));
    }
    out.push(
        CheckRecord::residual(DUAL_SUITE, "Ŵ*(ξ⊗ζ) = σW(ζ⊗ξ)", anchor, &label, flips.0, opts.tol)
            .with_draws(opts.draws),
    );
    out.push(
        CheckRecord::residual(DUAL_SUITE, "Ŵ'*(ξ⊗ζ) = σW^op(ζ⊗ξ)", anchor, &label, flips.1, opts.tol)
            .with_draws(opts.draws),
    );
    let hp = ctx.hat_prime_residual().unwrap_or(f64::INFINITY);
    out.push(CheckRecord::residual(DUAL_SUITE, "Ŵ' = (W^op)^", "Proposition 2.2", &label, hp, opts.tol));

    let exact = (|| -> Result<[f64; 7]> {
        let (xi, eta) = exact_nets(ctx.q())?;
        let mut c = [0.0f64; 4];
        let mut remark = 0.0f64;
        for _ in 0..opts.draws.min(20) {
            let zeta = random_unit_vector(&mut rng, n);
            let r = dual_conditions_residuals(ctx, xi.vector(), eta.vector(), &zeta)?;
            for (w, v) in c.iter_mut().zip(r) {
                *w = w.max(v);
            }
            remark = remark.max(quasicentral_bai_remark_check(&ctx.side, &ctx.hat, &zeta, &xi)?);
        }
        let (sa, ca) = exact_dual_nets(ctx)?;
        let d = build_dual_diagonal(ctx, &sa, &ca)?;
        let per = map_range(opts.mode, n, |s| {
            obad_residuals(&ctx.hat, &d, &vector_state(&TensorVector::basis(n, s))?)
        });
        let (o1, o2) = per
            .into_iter()
            .try_fold((0.0f64, 0.0f64), |acc, r| r.map(|(a, b)| (acc.0.max(a), acc.1.max(b))))?;
        Ok([c[0], c[1], c[2], c[3], o1, o2, remark])
    })();
    let draws = opts.draws.min(20);
    match exact {
        Ok(r) => {
            out.push(CheckRecord::residual(DUAL_SUITE, "W(ζ⊗ξ) = ζ⊗ξ at exact nets", anchor, &label, r[0], opts.tol).with_draws(draws));
            out.push(CheckRecord::residual(DUAL_SUITE, "W(η⊗ζ) = η⊗ζ at exact nets", anchor, &label, r[1], opts.tol).with_draws(draws));
            out.push(CheckRecord::logged(DUAL_SUITE, "W(ζ⊗η) = W^op(ζ⊗η) at exact nets", anchor, &label, r[2]).with_draws(draws));
            out.push(CheckRecord::logged(DUAL_SUITE, "W(ξ⊗ζ) = W^op(ξ⊗ζ) at exact nets", anchor, &label, r[3]).with_draws(draws));
            out.push(CheckRecord::residual(DUAL_SUITE, "dual OBAD1 at exact nets", anchor, &label, r[4], opts.tol).with_draws(n));
            out.push(CheckRecord::residual(DUAL_SUITE, "dual OBAD2 at exact nets", anchor, &label, r[5], opts.tol).with_draws(n));
            out.push(
                CheckRecord::residual(DUAL_SUITE, "Ŵ^op*Ŵ fixes ζ⊗ξ at exact nets", "Corollary 3.6", &label, r[6], 1e-9)
                    .with_draws(draws),
            );
        }
        Err(_) => out.push(failed(DUAL_SUITE, "dual diagonal at exact nets", anchor, &label, opts.tol)),
    }
    out
}

/// Slice convention, the two displayed bounds over the ε sweep, and exact
/// identity at ε = 0.
pub fn thm44_records(ctx: &DualContext, opts: &SweepOptions) -> Vec<CheckRecord> {
    let label = ctx.label();
    let n = ctx.dim();
    let anchor = "Theorem 4.4";
    let mut out = Vec::new();

    let conv = map_range(opts.mode, opts.draws, |i| {
        let mut rng = derived(i as u64, &keyed(opts, &label, "slice convention"));
        let r = (|| {
            let xi = random_unit_vector(&mut rng, n);
            let eta = random_unit_vector(&mut rng, n);
            let zeta = random_unit_vector(&mut rng, n);
            let x = random_algebra_element(ctx.q(), &mut rng)?;
            u_slice_convention_residual(ctx, &xi, &eta, &zeta, &x)
        })()
        .unwrap_or(f64::INFINITY);
        CheckRecord::residual(THM44_SUITE, "u = (1⊗ι)ω_v slice convention", anchor, &label, r, opts.tol)
    });
    out.extend(worst_of(conv));

    let exact = (|| -> Result<f64> {
        let (xi, eta) = exact_nets(ctx.q())?;
        let u = build_u(ctx, xi.vector(), eta.vector())?;
        let one = u.evaluate(&DMatrix::<C64>::identity(n, n))?;
        Ok(u_identity_residual(ctx, &u)?.max((one - C64::new(1.0, 0.0)).norm()))
    })()
    .unwrap_or(f64::INFINITY);
    out.push(CheckRecord::residual(THM44_SUITE, "‖u∗a − a‖ at exact nets", anchor, &label, exact, opts.tol).with_draws(n));

    for &eps in &opts.epsilons {
        let mut net_rng = derived(0, &keyed(opts, &label, &format!("thm44 nets {eps}")));
        let Ok((xi, eta)) = perturbed_nets(ctx.q(), eps, &mut net_rng) else {
            out.push(failed(THM44_SUITE, &format!("bounds at ε={eps}"), anchor, &label, BOUND_SLACK));
            continue;
        };
        let bai_check = format!("|X(u∗ω_ζ) − X(ω_ζ)| ≤ 2‖X‖(…) at ε={eps}");
        let qc_check = format!("quasi-central residual ≤ 2‖Λ‖(…) at ε={eps}");
        let pairs = map_range(opts.mode, opts.draws, |i| {
            let mut rng = derived(i as u64, &keyed(opts, &label, &format!("thm44 {eps}")));
            let r = (|| -> Result<(BoundCert, BoundCert)> {
                let zeta = random_unit_vector(&mut rng, n);
                let x = random_algebra_element(ctx.q(), &mut rng)?;
                let lambda = random_tensor_element(&ctx.side, &mut rng)?;
                Ok((
                    bai_residual_bound_check(ctx, xi.vector(), eta.vector(), &zeta, &x)?,
                    quasicentral_bound_check(ctx, xi.vector(), eta.vector(), &zeta, &lambda)?,
                ))
            })();
            match r {
                Ok((b, q)) => (
                    CheckRecord::bounded(THM44_SUITE, bai_check.clone(), anchor, &label, b.lhs, b.bound, BOUND_SLACK),
                    CheckRecord::bounded(THM44_SUITE, qc_check.clone(), anchor, &label, q.lhs, q.bound, BOUND_SLACK),
                ),
                Err(_) => (
                    failed(THM44_SUITE, &bai_check, anchor, &label, BOUND_SLACK),
                    failed(THM44_SUITE, &qc_check, anchor, &label, BOUND_SLACK),
                ),
            }
        });
        let (bai, qc): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        out.extend(worst_of(bai));
        out.extend(worst_of(qc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonals::build_diagonal;
    use crate::group::GroupTable;
    use crate::rng::seeded;

    fn ctx(g: &GroupTable, group_algebra: bool) -> DualContext {
        let q = if group_algebra {
            FiniteQuantumGroup::from_cayley_group_algebra(g).unwrap()
        } else {
            FiniteQuantumGroup::from_cayley_function_algebra(g).unwrap()
        };
        DualContext::new(&q).unwrap()
    }

    #[test]
    fn lemmas_hold_on_z2_and_s3() {
        for (g, tol) in [(GroupTable::cyclic(2), 1e-12), (GroupTable::symmetric3(), 1e-10)] {
            for side in [false, true] {
                let c = ctx(&g, side);
                let mut rng = seeded(1);
                for r in lemma32_identity_check(&c, &mut rng, 10).unwrap() {
                    assert!(r <= tol, "{r}");
                }
                let (a, b) = lemma42_identity_check(&c, &mut rng, 10).unwrap();
                assert!(a <= tol && b <= tol, "{a} {b}");
                let (a, b) = lemma43_identity_check(&c, &mut rng, 10).unwrap();
                assert!(a <= tol && b <= tol, "{a} {b}");
            }
        }
    }

    #[test]
    fn lemma_catches_a_wrong_unitary() {
        // Swapping W' for W^op in the first identity breaks it on S3.
        let c = ctx(&GroupTable::symmetric3(), true);
        let (lhs, rhs) = (
            Expr::product(vec![a(Atom::W).on(&[0, 1]), a(Atom::WOp).adj().on(&[1, 2])]),
            Expr::product(vec![a(Atom::WOp).adj().on(&[1, 2]), a(Atom::W).on(&[0, 2]), a(Atom::W).on(&[0, 1])]),
        );
        let mut rng = seeded(2);
        assert!(identity_residual(&c, &(lhs, rhs), &mut rng, 5).unwrap() > 1e-3);
    }

    #[test]
    fn flip_identities_on_z2_basis() {
        let c = ctx(&GroupTable::cyclic(2), false);
        let e0 = TensorVector::basis(2, 0);
        assert_eq!(flip_identity_check(&c, &e0, &e0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn abelian_groups_have_w_op_equal_w() {
        let c = ctx(&GroupTable::cyclic(5), false);
        let mut rng = seeded(3);
        for _ in 0..5 {
            let v: Vec<_> = (0..3).map(|_| random_unit_vector(&mut rng, 5)).collect();
            let r = dual_conditions_residuals(&c, &v[0], &v[1], &v[2]).unwrap();
            assert!(r[2] <= 1e-15 && r[3] <= 1e-15);
        }
    }

    #[test]
    fn u_is_a_state_and_exact_identity() {
        for side in [false, true] {
            let c = ctx(&GroupTable::symmetric3(), side);
            let (xi, eta) = exact_nets(c.q()).unwrap();
            let u = build_u(&c, xi.vector(), eta.vector()).unwrap();
            let one = u.evaluate(&DMatrix::identity(6, 6)).unwrap();
            assert!((one - C64::new(1.0, 0.0)).norm() <= 1e-12);
            assert!(u_identity_residual(&c, &u).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn z2_u_is_explicit() {
        // Exact nets on Z2: W'^op = W, so v = W W*(u⊗e_0) = u⊗e_0 and u = ω_{e_0}.
        let c = ctx(&GroupTable::cyclic(2), false);
        let (xi, eta) = exact_nets(c.q()).unwrap();
        let rho = build_u(&c, xi.vector(), eta.vector()).unwrap().rho();
        let want = crate::tensorlin::matrix_unit(2, 0, 0);
        assert!((rho - want).norm() <= 1e-15);
    }

    #[test]
    fn slice_convention_holds() {
        let c = ctx(&GroupTable::symmetric3(), true);
        let mut rng = seeded(4);
        for _ in 0..5 {
            let v: Vec<_> = (0..3).map(|_| random_unit_vector(&mut rng, 6)).collect();
            let x = random_algebra_element(c.q(), &mut rng).unwrap();
            assert!(u_slice_convention_residual(&c, &v[0], &v[1], &v[2], &x).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn first_leg_slice_breaks_the_convention() {
        // Slicing the first leg instead must be caught by the oracle on S3.
        let c = ctx(&GroupTable::symmetric3(), false);
        let mut rng = seeded(5);
        let v: Vec<_> = (0..3).map(|_| random_unit_vector(&mut rng, 6)).collect();
        let x = random_algebra_element(c.q(), &mut rng).unwrap();
        let w = u_vector(&c, &v[0], &v[1]);
        let wrong = w
            .leg_slices(1)
            .unwrap()
            .into_iter()
            .map(|s| Functional::vector(s.data(), s.data()))
            .reduce(|a, b| a.add(&b).unwrap())
            .unwrap();
        let lhs = convolve(c.q(), &wrong, &vector_state(&v[2]).unwrap()).unwrap().evaluate(&x).unwrap();
        let right = build_u(&c, &v[0], &v[1]).unwrap();
        let rhs = convolve(c.q(), &right, &vector_state(&v[2]).unwrap()).unwrap().evaluate(&x).unwrap();
        assert!((lhs - rhs).norm() > 1e-3);
    }

    #[test]
    fn bounds_at_identity_inputs() {
        let c = ctx(&GroupTable::cyclic(4), false);
        let mut rng = seeded(6);
        let (xi, eta) = perturbed_nets(c.q(), 0.1, &mut rng).unwrap();
        let z = random_unit_vector(&mut rng, 4);
        let b = bai_residual_bound_check(&c, xi.vector(), eta.vector(), &z, &DMatrix::identity(4, 4)).unwrap();
        assert!(b.lhs <= 1e-14 && b.pass);
        let q = quasicentral_bound_check(&c, xi.vector(), eta.vector(), &z, &DMatrix::identity(16, 16)).unwrap();
        assert!(q.lhs <= 1e-14 && q.pass);
    }

    #[test]
    fn dual_diagonal_on_trivial_group() {
        let c = ctx(&GroupTable::cyclic(1), false);
        let (sa, ca) = exact_dual_nets(&c).unwrap();
        let d = build_dual_diagonal(&c, &sa, &ca).unwrap();
        assert!((d.vector.data()[0] - C64::new(1.0, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn dual_diagonal_matches_diagonal_of_the_dual() {
        let c = ctx(&GroupTable::symmetric3(), false);
        let (sa, ca) = exact_dual_nets(&c).unwrap();
        let d = build_dual_diagonal(&c, &sa, &ca).unwrap();
        let e = build_diagonal(c.hat(), &sa, &ca).unwrap();
        assert!(d.vector.distance(&e.vector).unwrap() <= 1e-12);
    }

    #[test]
    fn suites_pass_on_s3_both_sides() {
        let opts = SweepOptions {
            draws: 10,
            ..SweepOptions::default()
        };
        for side in [false, true] {
            let c = ctx(&GroupTable::symmetric3(), side);
            let mut recs = lemma32_records(&c, &opts);
            recs.extend(lemma42_records(&c, &opts));
            recs.extend(lemma43_records(&c, &opts));
            recs.extend(dual_records(&c, &opts));
            recs.extend(thm44_records(&c, &opts));
            for r in recs {
                assert!(r.pass, "{r:?}");
            }
        }
    }
}
