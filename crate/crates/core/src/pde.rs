//! The parabolic equation `u_t = m u_xx + n u + o u^p + η(x, t, u, u_x)` with
//! initial and Dirichlet boundary data, and its two concrete instances.

use std::fmt;
use std::sync::Arc;

use crate::autodiff::{Jet4, Scalar};
use crate::error::{PinnError, Result};
use crate::rng::{SeededRng, Stream};

/// Value of the source term and its partials with respect to `u` and `u_x`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceValue {
    pub value: f64,
    pub d_u: f64,
    pub d_ux: f64,
}

pub trait SourceTerm: Send + Sync {
    fn eval(&self, x: f64, t: f64, u: f64, ux: f64) -> SourceValue;
}

/// `η ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSource;

impl SourceTerm for ZeroSource {
    fn eval(&self, _x: f64, _t: f64, _u: f64, _ux: f64) -> SourceValue {
        SourceValue::default()
    }
}

/// A closed-form solution that can be evaluated on plain numbers and on jets.
pub trait ExactSolution: Send + Sync {
    fn value(&self, x: f64, t: f64) -> Result<f64>;
    fn jet(&self, t: Jet4, x: Jet4) -> Result<Jet4>;
}

pub type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemKind {
    Nws { lambda: f64 },
    AllenCahn,
    Custom,
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Nws { .. } => "nws",
            ProblemKind::AllenCahn => "allen-cahn",
            ProblemKind::Custom => "custom",
        }
    }
}

#[derive(Clone)]
pub struct ParabolicPde {
    pub kind: ProblemKind,
    pub m: f64,
    pub n: f64,
    pub o: f64,
    pub p: u32,
    pub a: f64,
    pub b: f64,
    pub t_end: f64,
    source: Arc<dyn SourceTerm>,
    initial: BoundaryFn,
    left: BoundaryFn,
    right: BoundaryFn,
    exact: Option<Arc<dyn ExactSolution>>,
}

impl fmt::Debug for ParabolicPde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParabolicPde")
            .field("kind", &self.kind)
            .field("m", &self.m)
            .field("n", &self.n)
            .field("o", &self.o)
            .field("p", &self.p)
            .field("domain", &((self.a, self.b), (0.0, self.t_end)))
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Builder for arbitrary instances of the equation.
pub struct PdeBuilder {
    pde: ParabolicPde,
}

impl PdeBuilder {
    pub fn source(mut self, source: Arc<dyn SourceTerm>) -> Self {
        self.pde.source = source;
        self
    }

    pub fn initial(mut self, f: BoundaryFn) -> Self {
        self.pde.initial = f;
        self
    }

    pub fn boundaries(mut self, left: BoundaryFn, right: BoundaryFn) -> Self {
        self.pde.left = left;
        self.pde.right = right;
        self
    }

    pub fn exact(mut self, exact: Arc<dyn ExactSolution>) -> Self {
        self.pde.exact = Some(exact);
        self
    }

    pub fn build(self) -> Result<ParabolicPde> {
        let pde = self.pde;
        if !(pde.a < pde.b) {
            return Err(PinnError::config(
                "problem.domain",
                format!("need a < b, got [{}, {}]", pde.a, pde.b),
            ));
        }
        if !(pde.t_end > 0.0) {
            return Err(PinnError::config(
                "problem.t_end",
                format!("time horizon must be positive, got {}", pde.t_end),
            ));
        }
        for (name, v) in [("m", pde.m), ("n", pde.n), ("o", pde.o)] {
            if !v.is_finite() {
                return Err(PinnError::config(format!("problem.{name}"), "must be finite"));
            }
        }
        Ok(pde)
    }
}

impl ParabolicPde {
    /// Starts a builder with zero data, `η ≡ 0` and no exact solution.
    pub fn builder(m: f64, n: f64, o: f64, p: u32, (a, b): (f64, f64), t_end: f64) -> PdeBuilder {
        let zero: BoundaryFn = Arc::new(|_| 0.0);
        PdeBuilder {
            pde: ParabolicPde {
                kind: ProblemKind::Custom,
                m,
                n,
                o,
                p,
                a,
                b,
                t_end,
                source: Arc::new(ZeroSource),
                initial: zero.clone(),
                left: zero.clone(),
                right: zero,
                exact: None,
            },
        }
    }

    /// `f(x)`.
    pub fn initial(&self, x: f64) -> f64 {
        (self.initial)(x)
    }

    /// `g(t)`, the value at `x = a`.
    pub fn left(&self, t: f64) -> f64 {
        (self.left)(t)
    }

    /// `h(t)`, the value at `x = b`.
    pub fn right(&self, t: f64) -> f64 {
        (self.right)(t)
    }

    pub fn source(&self) -> &dyn SourceTerm {
        self.source.as_ref()
    }

    pub fn exact(&self) -> Option<&dyn ExactSolution> {
        self.exact.as_deref()
    }

    pub fn exact_value(&self, x: f64, t: f64) -> Result<f64> {
        self.exact
            .as_ref()
            .ok_or_else(|| PinnError::Usage("problem has no exact solution".into()))?
            .value(x, t)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

/// Parameters of the Newell-Whitehead-Segel problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NwsParams {
    pub lambda: f64,
}

impl Default for NwsParams {
    fn default() -> Self {
        NwsParams { lambda: 0.1 }
    }
}

const SINGULAR: f64 = 1e-12;

fn nws_denominator(lambda: f64, t: f64) -> f64 {
    -2.0 + 3.0 * lambda * (1.0 - (2.0 * t).exp())
}

/// `u(x, t) = −2λe^{2t} / (−2 + 3λ(1 − e^{2t}))`, independent of `x`.
pub fn exact_nws(lambda: f64, _x: f64, t: f64) -> Result<f64> {
    let den = nws_denominator(lambda, t);
    if den.abs() < SINGULAR {
        return Err(PinnError::Singularity(format!(
            "NWS solution denominator vanishes at t={t} for lambda={lambda}"
        )));
    }
    Ok(-2.0 * lambda * (2.0 * t).exp() / den)
}

#[derive(Debug, Clone, Copy)]
struct NwsExact {
    lambda: f64,
}

impl ExactSolution for NwsExact {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        exact_nws(self.lambda, x, t)
    }

    fn jet(&self, t: Jet4, _x: Jet4) -> Result<Jet4> {
        let growth = (t * 2.0).exp();
        let num = growth * (-2.0 * self.lambda);
        let den = (-growth + 1.0) * (3.0 * self.lambda) - 2.0;
        if den.val.abs() < SINGULAR {
            return Err(PinnError::Singularity(format!(
                "NWS solution denominator vanishes at t={}",
                t.val
            )));
        }
        num.try_div(den)
    }
}

/// `u_t = u_xx + 2u − 3u²` on `[0, 1] × [0, 1]` with `u(x, 0) = λ`.
pub fn nws_problem(params: NwsParams) -> Result<ParabolicPde> {
    let lambda = params.lambda;
    let t_end = 1.0;
    if !lambda.is_finite() {
        return Err(PinnError::config("problem.lambda", "must be finite"));
    }
    // The denominator is monotone in t, so checking both ends covers [0, T].
    let (d0, d1) = (nws_denominator(lambda, 0.0), nws_denominator(lambda, t_end));
    if d0.abs() < SINGULAR || d1.abs() < SINGULAR || d0.signum() != d1.signum() {
        return Err(PinnError::config(
            "problem.lambda",
            format!("lambda={lambda} makes the exact solution singular on [0, {t_end}]"),
        ));
    }
    let exact = NwsExact { lambda };
    let boundary: BoundaryFn = Arc::new(move |t| exact_nws(lambda, 0.0, t).expect("checked"));
    let mut pde = ParabolicPde::builder(1.0, 2.0, -3.0, 2, (0.0, 1.0), t_end)
        .initial(Arc::new(move |_| lambda))
        .boundaries(boundary.clone(), boundary)
        .exact(Arc::new(exact))
        .build()?;
    pde.kind = ProblemKind::Nws { lambda };
    Ok(pde)
}

/// Wave number of the Allen-Cahn kink, as printed (≈ 1/(2√2)).
pub const ALLEN_CAHN_K: f64 = 0.3536;
/// Speed of the Allen-Cahn kink.
pub const ALLEN_CAHN_C: f64 = 0.75;

/// `u(x, t) = −1/2 + tanh(k x − c t)/2`.
pub fn exact_allen_cahn(x: f64, t: f64) -> f64 {
    -0.5 + 0.5 * (ALLEN_CAHN_K * x - ALLEN_CAHN_C * t).tanh()
}

#[derive(Debug, Clone, Copy)]
struct AllenCahnExact;

impl ExactSolution for AllenCahnExact {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        Ok(exact_allen_cahn(x, t))
    }

    fn jet(&self, t: Jet4, x: Jet4) -> Result<Jet4> {
        Ok((x * ALLEN_CAHN_K - t * ALLEN_CAHN_C).tanh() * 0.5 - 0.5)
    }
}

/// `u_t = u_xx + u − u³` on `[0, 1] × [0, 1]` with kink data.
pub fn allen_cahn_problem() -> ParabolicPde {
    let mut pde = ParabolicPde::builder(1.0, 1.0, -1.0, 3, (0.0, 1.0), 1.0)
        .initial(Arc::new(|x| exact_allen_cahn(x, 0.0)))
        .boundaries(
            Arc::new(|t| exact_allen_cahn(0.0, t)),
            Arc::new(|t| exact_allen_cahn(1.0, t)),
        )
        .exact(Arc::new(AllenCahnExact))
        .build()
        .expect("fixed problem data is valid");
    pde.kind = ProblemKind::AllenCahn;
    pde
}

/// Looks a problem up by its configuration name.
pub fn problem_by_name(name: &str, lambda: f64) -> Result<ParabolicPde> {
    match name {
        "nws" => nws_problem(NwsParams { lambda }),
        "allen-cahn" => Ok(allen_cahn_problem()),
        other => Err(PinnError::config(
            "problem.name",
            format!("expected nws or allen-cahn, got `{other}`"),
        )),
    }
}

/// `u_t − m u_xx − n u − o u^p − η(x, t, u, u_x)` from the jet of `u` at `(x, t)`.
pub fn residual<S: Scalar>(pde: &ParabolicPde, u: &Jet4<S>, x: f64, t: f64) -> Result<S> {
    if !u.is_finite() {
        return Err(PinnError::Numerical(format!(
            "non-finite solution jet at (x={x}, t={t})"
        )));
    }
    let mut power = u.val;
    for _ in 1..pde.p {
        power = power * u.val;
    }
    let mut r = u.dt - u.dxx * pde.m - u.val * pde.n - power * pde.o;
    let eta = pde.source.eval(x, t, u.val.value(), u.dx.value());
    if eta != SourceValue::default() {
        r = r - S::lift2(u.val, u.dx, eta.value, eta.d_u, eta.d_ux);
    }
    Ok(r)
}

/// Largest `|residual|` of the exact solution over `points` given as `(t, x)`.
pub fn exact_residual_probe(pde: &ParabolicPde, points: &[(f64, f64)]) -> Result<f64> {
    let exact = pde
        .exact()
        .ok_or_else(|| PinnError::Usage("residual probe needs an exact solution".into()))?;
    let mut worst: f64 = 0.0;
    for &(t, x) in points {
        let (jt, jx) = crate::autodiff::jet_seed(t, x)?;
        let u = exact.jet(jt, jx)?;
        worst = worst.max(residual(pde, &u, x, t)?.abs());
    }
    Ok(worst)
}

/// `n` seeded points `(t, x)` drawn uniformly from the closed domain.
pub fn probe_points(pde: &ParabolicPde, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = SeededRng::new(seed, Stream::Check);
    (0..n)
        .map(|_| {
            let t = rng.uniform(0.0, pde.t_end);
            let x = rng.uniform(pde.a, pde.b);
            (t, x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nws_coefficients_and_data() {
        let pde = nws_problem(NwsParams { lambda: 0.1 }).unwrap();
        assert_eq!((pde.m, pde.n, pde.o, pde.p), (1.0, 2.0, -3.0, 2));
        assert_eq!((pde.a, pde.b, pde.t_end), (0.0, 1.0, 1.0));
        assert_eq!(pde.initial(0.7), 0.1);
        assert!((pde.left(0.0) - 0.1).abs() < 1e-15);
        assert!((pde.right(0.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn exact_nws_values() {
        for x in [0.0, 0.3, 1.0] {
            assert!((exact_nws(0.1, x, 0.0).unwrap() - 0.1).abs() < 1e-16);
        }
        // -0.2 e² / (-2 + 0.3(1 - e²)), e² = 7.38905609893065
        let e2 = 7.389_056_098_930_65_f64;
        let reference = -0.2 * e2 / (-2.0 + 0.3 * (1.0 - e2));
        let v = exact_nws(0.1, 0.5, 1.0).unwrap();
        assert!((v - reference).abs() < 1e-14);
        assert!((v - 0.377_308_670_5).abs() < 1e-9, "{v}");
        // logistic equilibrium 2/3
        assert!((exact_nws(0.1, 0.0, 30.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_lambda_is_rejected() {
        // -2 + 3λ(1 - e^{2t}) = 0 at t = 0.5 for λ = -2 / (3 (e - 1))
        let lambda = -2.0 / (3.0 * (1.0f64.exp() - 1.0));
        assert!(matches!(
            exact_nws(lambda, 0.0, 0.5),
            Err(PinnError::Singularity(_))
        ));
        assert!(matches!(
            nws_problem(NwsParams { lambda }),
            Err(PinnError::Config { .. })
        ));
    }

    #[test]
    fn allen_cahn_coefficients_and_data() {
        let pde = allen_cahn_problem();
        assert_eq!((pde.m, pde.n, pde.o, pde.p), (1.0, 1.0, -1.0, 3));
        assert_eq!(pde.initial(0.0), -0.5);
        assert_eq!(pde.left(0.0), -0.5);
        assert_eq!(pde.right(0.0), pde.initial(1.0));
    }

    #[test]
    fn exact_allen_cahn_values() {
        assert_eq!(exact_allen_cahn(0.0, 0.0), -0.5);
        let v = exact_allen_cahn(1.0, 0.0);
        assert!((v - (-0.5 + 0.5 * 0.3536f64.tanh())).abs() < 1e-16);
        assert!((v + 0.330_217_8).abs() < 1e-7, "{v}");
        let pde = allen_cahn_problem();
        for t in [0.0, 0.1, 0.55, 1.0] {
            assert_eq!(exact_allen_cahn(0.0, t), pde.left(t));
        }
    }

    fn constant_jet(c: f64) -> Jet4 {
        Jet4::constant(c)
    }

    #[test]
    fn residual_at_equilibria() {
        let nws = nws_problem(NwsParams::default()).unwrap();
        let r = residual(&nws, &constant_jet(2.0 / 3.0), 0.5, 0.5).unwrap();
        assert!(r.abs() < 1e-15);
        let ac = allen_cahn_problem();
        assert_eq!(residual(&ac, &constant_jet(1.0), 0.5, 0.5).unwrap(), 0.0);
        let r = residual(&ac, &constant_jet(0.5), 0.5, 0.5).unwrap();
        assert!((r + 0.375).abs() < 1e-15);
    }

    #[test]
    fn residual_rejects_non_finite_jets() {
        let ac = allen_cahn_problem();
        let bad = Jet4::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(matches!(residual(&ac, &bad, 0.0, 0.0), Err(PinnError::Numerical(_))));
    }

    #[test]
    fn source_term_enters_residual() {
        struct Linear;
        impl SourceTerm for Linear {
            fn eval(&self, x: f64, _t: f64, u: f64, ux: f64) -> SourceValue {
                SourceValue {
                    value: x + 2.0 * u + 3.0 * ux,
                    d_u: 2.0,
                    d_ux: 3.0,
                }
            }
        }
        let pde = ParabolicPde::builder(0.0, 0.0, 0.0, 2, (0.0, 1.0), 1.0)
            .source(Arc::new(Linear))
            .build()
            .unwrap();
        let u = Jet4::new(0.5, 0.1, -0.2, 0.0);
        let r = residual(&pde, &u, 0.25, 0.0).unwrap();
        assert!((r - (0.1 - (0.25 + 1.0 - 0.6))).abs() < 1e-15);
    }

    #[test]
    fn exact_solutions_satisfy_their_equations() {
        let nws = nws_problem(NwsParams::default()).unwrap();
        let pts = probe_points(&nws, 1000, 1);
        assert!(exact_residual_probe(&nws, &pts).unwrap() <= 1e-10);
        let ac = allen_cahn_problem();
        let pts = probe_points(&ac, 1000, 1);
        let worst = exact_residual_probe(&ac, &pts).unwrap();
        assert!(worst <= 5e-5, "{worst}");
        assert!(worst > 0.0);
    }

    #[test]
    fn zero_problem_probe() {
        struct Zero;
        impl ExactSolution for Zero {
            fn value(&self, _x: f64, _t: f64) -> Result<f64> {
                Ok(0.0)
            }
            fn jet(&self, t: Jet4, _x: Jet4) -> Result<Jet4> {
                Ok(t.constant_like(0.0))
            }
        }
        let pde = ParabolicPde::builder(0.0, 0.0, 0.0, 2, (0.0, 1.0), 1.0)
            .exact(Arc::new(Zero))
            .build()
            .unwrap();
        assert_eq!(exact_residual_probe(&pde, &[(0.1, 0.2), (0.9, 0.5)]).unwrap(), 0.0);
        let bare = ParabolicPde::builder(0.0, 0.0, 0.0, 2, (0.0, 1.0), 1.0).build().unwrap();
        assert!(matches!(exact_residual_probe(&bare, &[(0.0, 0.0)]), Err(PinnError::Usage(_))));
    }

    #[test]
    fn invalid_domains_are_rejected() {
        assert!(ParabolicPde::builder(1.0, 0.0, 0.0, 2, (1.0, 0.0), 1.0).build().is_err());
        assert!(ParabolicPde::builder(1.0, 0.0, 0.0, 2, (0.0, 1.0), 0.0).build().is_err());
        assert!(problem_by_name("burgers", 0.1).is_err());
    }
}
