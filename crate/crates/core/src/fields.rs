//! Compactly supported tensor fields and 1-forms on the disk chart.
//!
//! Built-in fields are written once, generically over [`Real`], and
//! differentiated exactly with [`Jet`]. Fields supplied as plain `f64`
//! closures fall back to central differences with step [`FD_STEP`].

use std::fmt::Debug;
use std::sync::Arc;

use crate::chart::{Covector, Point, Sym2};
use crate::scalar::{Jet, Real};

/// Step of the central differences used for user-supplied fields.
pub const FD_STEP: f64 = 1e-5;

/// Value and first partials, `d[k] = ∂ₖ f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorJet1 {
    pub value: Sym2<f64>,
    pub d: [Sym2<f64>; 2],
}

/// Value, first and second partials, `dd[k][l] = ∂ₖ∂ₗ f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorJet2 {
    pub value: Sym2<f64>,
    pub d: [Sym2<f64>; 2],
    pub dd: [[Sym2<f64>; 2]; 2],
}

/// `d[k][j] = ∂ₖ vⱼ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovectorJet1 {
    pub value: Covector<f64>,
    pub d: [Covector<f64>; 2],
}

/// `dd[k][l][j] = ∂ₖ∂ₗ vⱼ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovectorJet2 {
    pub value: Covector<f64>,
    pub d: [Covector<f64>; 2],
    pub dd: [[Covector<f64>; 2]; 2],
}

impl TensorJet1 {
    pub fn zero() -> Self {
        TensorJet1 { value: Sym2::zero(), d: [Sym2::zero(); 2] }
    }
}

impl TensorJet2 {
    pub fn zero() -> Self {
        TensorJet2 { value: Sym2::zero(), d: [Sym2::zero(); 2], dd: [[Sym2::zero(); 2]; 2] }
    }

    pub fn first(&self) -> TensorJet1 {
        TensorJet1 { value: self.value, d: self.d }
    }
}

impl CovectorJet1 {
    pub fn zero() -> Self {
        CovectorJet1 { value: [0.0; 2], d: [[0.0; 2]; 2] }
    }
}

impl CovectorJet2 {
    pub fn zero() -> Self {
        CovectorJet2 { value: [0.0; 2], d: [[0.0; 2]; 2], dd: [[[0.0; 2]; 2]; 2] }
    }

    pub fn first(&self) -> CovectorJet1 {
        CovectorJet1 { value: self.value, d: self.d }
    }
}

/// A symmetric (0,2)-tensor field given by a formula generic in the scalar.
pub trait AnalyticTensor: Send + Sync + Debug + 'static {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T>;
    fn support_radius(&self) -> f64;
}

/// A 1-form given by a formula generic in the scalar.
pub trait AnalyticCovector: Send + Sync + Debug + 'static {
    fn eval<T: Real>(&self, x: T, y: T) -> Covector<T>;
    fn support_radius(&self) -> f64;
}

/// Object-safe evaluation of a symmetric tensor field.
pub trait TensorEval: Send + Sync + Debug {
    fn support_radius(&self) -> f64;

    fn value(&self, p: Point<f64>) -> Sym2<f64>;

    fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        let h = FD_STEP;
        let mut d = [Sym2::zero(); 2];
        for (k, dk) in d.iter_mut().enumerate() {
            let (ex, ey) = if k == 0 { (h, 0.0) } else { (0.0, h) };
            let fp = self.value(Point::new(p.x + ex, p.y + ey));
            let fm = self.value(Point::new(p.x - ex, p.y - ey));
            *dk = fp.sub(&fm).scale(0.5 / h);
        }
        TensorJet1 { value: self.value(p), d }
    }

    fn jet2(&self, p: Point<f64>) -> TensorJet2 {
        let h = FD_STEP;
        let base = self.jet1(p);
        let mut dd = [[Sym2::zero(); 2]; 2];
        for k in 0..2 {
            let (ex, ey) = if k == 0 { (h, 0.0) } else { (0.0, h) };
            let jp = self.jet1(Point::new(p.x + ex, p.y + ey));
            let jm = self.jet1(Point::new(p.x - ex, p.y - ey));
            for l in 0..2 {
                dd[k][l] = jp.d[l].sub(&jm.d[l]).scale(0.5 / h);
            }
        }
        // symmetrize the mixed partial
        let m = dd[0][1].add(&dd[1][0]).scale(0.5);
        dd[0][1] = m;
        dd[1][0] = m;
        TensorJet2 { value: base.value, d: base.d, dd }
    }
}

/// Object-safe evaluation of a 1-form.
pub trait CovectorEval: Send + Sync + Debug {
    fn support_radius(&self) -> f64;

    fn value(&self, p: Point<f64>) -> Covector<f64>;

    fn jet1(&self, p: Point<f64>) -> CovectorJet1 {
        let h = FD_STEP;
        let mut d = [[0.0; 2]; 2];
        for (k, dk) in d.iter_mut().enumerate() {
            let (ex, ey) = if k == 0 { (h, 0.0) } else { (0.0, h) };
            let fp = self.value(Point::new(p.x + ex, p.y + ey));
            let fm = self.value(Point::new(p.x - ex, p.y - ey));
            *dk = [(fp[0] - fm[0]) * 0.5 / h, (fp[1] - fm[1]) * 0.5 / h];
        }
        CovectorJet1 { value: self.value(p), d }
    }

    fn jet2(&self, p: Point<f64>) -> CovectorJet2 {
        let h = FD_STEP;
        let base = self.jet1(p);
        let mut dd = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            let (ex, ey) = if k == 0 { (h, 0.0) } else { (0.0, h) };
            let jp = self.jet1(Point::new(p.x + ex, p.y + ey));
            let jm = self.jet1(Point::new(p.x - ex, p.y - ey));
            for l in 0..2 {
                for j in 0..2 {
                    dd[k][l][j] = (jp.d[l][j] - jm.d[l][j]) * 0.5 / h;
                }
            }
        }
        for j in 0..2 {
            let m = 0.5 * (dd[0][1][j] + dd[1][0][j]);
            dd[0][1][j] = m;
            dd[1][0][j] = m;
        }
        CovectorJet2 { value: base.value, d: base.d, dd }
    }
}

type J1 = Jet<f64>;
type J2 = Jet<Jet<f64>>;

fn seed1(p: Point<f64>) -> (J1, J1) {
    (Jet::var(p.x, 0), Jet::var(p.y, 1))
}

fn seed2(p: Point<f64>) -> (J2, J2) {
    let x = Jet { v: Jet::var(p.x, 0), d: [Jet::constant(1.0), Jet::constant(0.0)] };
    let y = Jet { v: Jet::var(p.y, 1), d: [Jet::constant(0.0), Jet::constant(1.0)] };
    (x, y)
}

fn sym_map<T: Copy, U: Real>(s: &Sym2<T>, f: impl Fn(T) -> U) -> Sym2<U> {
    Sym2::new(f(s.xx), f(s.xy), f(s.yy))
}

/// Adapter giving an [`AnalyticTensor`] exact jets.
#[derive(Debug)]
struct AnalyticT<A>(A);

impl<A: AnalyticTensor> TensorEval for AnalyticT<A> {
    fn support_radius(&self) -> f64 {
        self.0.support_radius()
    }

    fn value(&self, p: Point<f64>) -> Sym2<f64> {
        self.0.eval(p.x, p.y)
    }

    fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        let (x, y) = seed1(p);
        let s = self.0.eval(x, y);
        TensorJet1 { value: sym_map(&s, |j| j.v), d: [sym_map(&s, |j| j.d[0]), sym_map(&s, |j| j.d[1])] }
    }

    fn jet2(&self, p: Point<f64>) -> TensorJet2 {
        let (x, y) = seed2(p);
        let s = self.0.eval(x, y);
        let mut dd = [[Sym2::zero(); 2]; 2];
        for (k, row) in dd.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                *e = sym_map(&s, |j| j.d[k].d[l]);
            }
        }
        TensorJet2 { value: sym_map(&s, |j| j.v.v), d: [sym_map(&s, |j| j.v.d[0]), sym_map(&s, |j| j.v.d[1])], dd }
    }
}

#[derive(Debug)]
struct AnalyticC<A>(A);

impl<A: AnalyticCovector> CovectorEval for AnalyticC<A> {
    fn support_radius(&self) -> f64 {
        self.0.support_radius()
    }

    fn value(&self, p: Point<f64>) -> Covector<f64> {
        self.0.eval(p.x, p.y)
    }

    fn jet1(&self, p: Point<f64>) -> CovectorJet1 {
        let (x, y) = seed1(p);
        let v = self.0.eval(x, y);
        CovectorJet1 { value: [v[0].v, v[1].v], d: [[v[0].d[0], v[1].d[0]], [v[0].d[1], v[1].d[1]]] }
    }

    fn jet2(&self, p: Point<f64>) -> CovectorJet2 {
        let (x, y) = seed2(p);
        let v = self.0.eval(x, y);
        let mut dd = [[[0.0; 2]; 2]; 2];
        for (k, row) in dd.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                *e = [v[0].d[k].d[l], v[1].d[k].d[l]];
            }
        }
        CovectorJet2 { value: [v[0].v.v, v[1].v.v], d: [[v[0].v.d[0], v[1].v.d[0]], [v[0].v.d[1], v[1].v.d[1]]], dd }
    }
}

struct FnTensor<F> {
    f: F,
    support: f64,
}

impl<F> Debug for FnTensor<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnTensor(support {})", self.support)
    }
}

impl<F: Fn(f64, f64) -> Sym2<f64> + Send + Sync> TensorEval for FnTensor<F> {
    fn support_radius(&self) -> f64 {
        self.support
    }
    fn value(&self, p: Point<f64>) -> Sym2<f64> {
        (self.f)(p.x, p.y)
    }
}

struct FnCovector<F> {
    f: F,
    support: f64,
}

impl<F> Debug for FnCovector<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnCovector(support {})", self.support)
    }
}

impl<F: Fn(f64, f64) -> Covector<f64> + Send + Sync> CovectorEval for FnCovector<F> {
    fn support_radius(&self) -> f64 {
        self.support
    }
    fn value(&self, p: Point<f64>) -> Covector<f64> {
        (self.f)(p.x, p.y)
    }
}

#[derive(Debug)]
struct TensorCombo {
    terms: Vec<(f64, SymTensorField)>,
}

impl TensorEval for TensorCombo {
    fn support_radius(&self) -> f64 {
        self.terms.iter().map(|(_, f)| f.support_radius()).fold(0.0, f64::max)
    }

    fn value(&self, p: Point<f64>) -> Sym2<f64> {
        self.terms.iter().fold(Sym2::zero(), |acc, (c, f)| acc.add(&f.value(p).scale(*c)))
    }

    fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        let mut out = TensorJet1::zero();
        for (c, f) in &self.terms {
            let j = f.jet1(p);
            out.value = out.value.add(&j.value.scale(*c));
            for k in 0..2 {
                out.d[k] = out.d[k].add(&j.d[k].scale(*c));
            }
        }
        out
    }

    fn jet2(&self, p: Point<f64>) -> TensorJet2 {
        let mut out = TensorJet2::zero();
        for (c, f) in &self.terms {
            let j = f.jet2(p);
            out.value = out.value.add(&j.value.scale(*c));
            for k in 0..2 {
                out.d[k] = out.d[k].add(&j.d[k].scale(*c));
                for l in 0..2 {
                    out.dd[k][l] = out.dd[k][l].add(&j.dd[k][l].scale(*c));
                }
            }
        }
        out
    }
}

#[derive(Debug)]
struct CovectorCombo {
    terms: Vec<(f64, OneFormField)>,
}

impl CovectorEval for CovectorCombo {
    fn support_radius(&self) -> f64 {
        self.terms.iter().map(|(_, f)| f.support_radius()).fold(0.0, f64::max)
    }

    fn value(&self, p: Point<f64>) -> Covector<f64> {
        let mut out = [0.0; 2];
        for (c, f) in &self.terms {
            let v = f.value(p);
            out[0] += c * v[0];
            out[1] += c * v[1];
        }
        out
    }

    fn jet1(&self, p: Point<f64>) -> CovectorJet1 {
        let mut out = CovectorJet1::zero();
        for (c, f) in &self.terms {
            let j = f.jet1(p);
            for a in 0..2 {
                out.value[a] += c * j.value[a];
                for k in 0..2 {
                    out.d[k][a] += c * j.d[k][a];
                }
            }
        }
        out
    }

    fn jet2(&self, p: Point<f64>) -> CovectorJet2 {
        let mut out = CovectorJet2::zero();
        for (c, f) in &self.terms {
            let j = f.jet2(p);
            for a in 0..2 {
                out.value[a] += c * j.value[a];
                for k in 0..2 {
                    out.d[k][a] += c * j.d[k][a];
                    for l in 0..2 {
                        out.dd[k][l][a] += c * j.dd[k][l][a];
                    }
                }
            }
        }
        out
    }
}

/// Compactly supported symmetric (0,2)-tensor field.
///
/// Evaluation returns exactly zero for `|x| ≥ support_radius`.
#[derive(Clone, Debug)]
pub struct SymTensorField {
    inner: Option<Arc<dyn TensorEval>>,
    support: f64,
}

impl SymTensorField {
    pub fn zero() -> Self {
        SymTensorField { inner: None, support: 0.0 }
    }

    pub fn analytic<A: AnalyticTensor>(a: A) -> Self {
        let support = a.support_radius();
        SymTensorField { inner: Some(Arc::new(AnalyticT(a))), support }
    }

    /// Field from a plain closure; derivatives by central differences.
    pub fn from_fn<F>(support: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> Sym2<f64> + Send + Sync + 'static,
    {
        SymTensorField { inner: Some(Arc::new(FnTensor { f, support })), support }
    }

    pub fn from_eval(e: Arc<dyn TensorEval>) -> Self {
        let support = e.support_radius();
        SymTensorField { inner: Some(e), support }
    }

    pub fn linear_combination(terms: Vec<(f64, SymTensorField)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(c, f)| *c != 0.0 && !f.is_zero()).collect();
        if terms.is_empty() {
            return SymTensorField::zero();
        }
        SymTensorField::from_eval(Arc::new(TensorCombo { terms }))
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymTensorField::linear_combination(vec![(c, self.clone())])
    }

    pub fn plus(&self, other: &SymTensorField) -> Self {
        SymTensorField::linear_combination(vec![(1.0, self.clone()), (1.0, other.clone())])
    }

    pub fn minus(&self, other: &SymTensorField) -> Self {
        SymTensorField::linear_combination(vec![(1.0, self.clone()), (-1.0, other.clone())])
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_none()
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    fn active(&self, p: Point<f64>) -> Option<&Arc<dyn TensorEval>> {
        match &self.inner {
            Some(e) if p.norm_sq() < self.support * self.support => Some(e),
            _ => None,
        }
    }

    pub fn value(&self, p: Point<f64>) -> Sym2<f64> {
        self.active(p).map_or(Sym2::zero(), |e| e.value(p))
    }

    pub fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        self.active(p).map_or(TensorJet1::zero(), |e| e.jet1(p))
    }

    pub fn jet2(&self, p: Point<f64>) -> TensorJet2 {
        self.active(p).map_or(TensorJet2::zero(), |e| e.jet2(p))
    }
}

/// Compactly supported 1-form.
#[derive(Clone, Debug)]
pub struct OneFormField {
    inner: Option<Arc<dyn CovectorEval>>,
    support: f64,
}

impl OneFormField {
    pub fn zero() -> Self {
        OneFormField { inner: None, support: 0.0 }
    }

    pub fn analytic<A: AnalyticCovector>(a: A) -> Self {
        let support = a.support_radius();
        OneFormField { inner: Some(Arc::new(AnalyticC(a))), support }
    }

    pub fn from_fn<F>(support: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> Covector<f64> + Send + Sync + 'static,
    {
        OneFormField { inner: Some(Arc::new(FnCovector { f, support })), support }
    }

    pub fn from_eval(e: Arc<dyn CovectorEval>) -> Self {
        let support = e.support_radius();
        OneFormField { inner: Some(e), support }
    }

    pub fn linear_combination(terms: Vec<(f64, OneFormField)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(c, f)| *c != 0.0 && !f.is_zero()).collect();
        if terms.is_empty() {
            return OneFormField::zero();
        }
        OneFormField::from_eval(Arc::new(CovectorCombo { terms }))
    }

    pub fn scaled(&self, c: f64) -> Self {
        OneFormField::linear_combination(vec![(c, self.clone())])
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_none()
    }

    pub fn support_radius(&self) -> f64 {
        self.support
    }

    fn active(&self, p: Point<f64>) -> Option<&Arc<dyn CovectorEval>> {
        match &self.inner {
            Some(e) if p.norm_sq() < self.support * self.support => Some(e),
            _ => None,
        }
    }

    pub fn value(&self, p: Point<f64>) -> Covector<f64> {
        self.active(p).map_or([0.0; 2], |e| e.value(p))
    }

    pub fn jet1(&self, p: Point<f64>) -> CovectorJet1 {
        self.active(p).map_or(CovectorJet1::zero(), |e| e.jet1(p))
    }

    pub fn jet2(&self, p: Point<f64>) -> CovectorJet2 {
        self.active(p).map_or(CovectorJet2::zero(), |e| e.jet2(p))
    }
}

/// Smooth bump `ψ(x) = exp(1 − 1/(1 − |x − c|²/ρ²))`, zero outside the disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Bump {
    pub fn centered(radius: f64) -> Self {
        Bump { center: [0.0, 0.0], radius }
    }

    /// Radius of the smallest origin-centred disk containing the support.
    pub fn reach(&self) -> f64 {
        (self.center[0] * self.center[0] + self.center[1] * self.center[1]).sqrt() + self.radius
    }

    pub fn eval<T: Real>(&self, x: T, y: T) -> T {
        let dx = x - T::cst(self.center[0]);
        let dy = y - T::cst(self.center[1]);
        let s = (dx * dx + dy * dy) * T::cst(1.0 / (self.radius * self.radius));
        bump_profile(s)
    }
}

/// `exp(1 − 1/(1 − s))` for `s < 1`, else exactly 0.
pub fn bump_profile<T: Real>(s: T) -> T {
    if s.re() >= 1.0 {
        T::zero()
    } else {
        (T::one() - (T::one() - s).recip()).exp()
    }
}

/// Conformal bump `ε ψ g₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalBump {
    pub eps: f64,
    pub bump: Bump,
}

impl AnalyticTensor for ConformalBump {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        let psi = self.bump.eval(x, y);
        if psi.re() == 0.0 {
            return Sym2::zero();
        }
        let l = crate::hyperbolic::conformal_factor(x, y);
        Sym2::scalar(T::cst(self.eps) * psi * l * l)
    }

    fn support_radius(&self) -> f64 {
        self.bump.reach()
    }
}

/// Traceless anisotropic bump `ε ψ (cos 2a (dx¹² − dx²²) + sin 2a (dx¹dx² + dx²dx¹))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnisotropicBump {
    pub eps: f64,
    pub bump: Bump,
    pub angle: f64,
}

impl AnalyticTensor for AnisotropicBump {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        let a = T::cst(self.eps) * self.bump.eval(x, y);
        let (c, s) = ((2.0 * self.angle).cos(), (2.0 * self.angle).sin());
        Sym2::new(a * T::cst(c), a * T::cst(s), -a * T::cst(c))
    }

    fn support_radius(&self) -> f64 {
        self.bump.reach()
    }
}

/// Bump 1-form `ψ(x) (a + B (x − c))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpOneForm {
    pub bump: Bump,
    pub a: [f64; 2],
    pub b: [[f64; 2]; 2],
}

impl BumpOneForm {
    pub fn constant(bump: Bump, a: [f64; 2]) -> Self {
        BumpOneForm { bump, a, b: [[0.0; 2]; 2] }
    }

    pub fn scaled(&self, c: f64) -> Self {
        BumpOneForm {
            bump: self.bump,
            a: [c * self.a[0], c * self.a[1]],
            b: [[c * self.b[0][0], c * self.b[0][1]], [c * self.b[1][0], c * self.b[1][1]]],
        }
    }
}

impl AnalyticCovector for BumpOneForm {
    fn eval<T: Real>(&self, x: T, y: T) -> Covector<T> {
        let psi = self.bump.eval(x, y);
        let dx = x - T::cst(self.bump.center[0]);
        let dy = y - T::cst(self.bump.center[1]);
        let v0 = T::cst(self.a[0]) + T::cst(self.b[0][0]) * dx + T::cst(self.b[0][1]) * dy;
        let v1 = T::cst(self.a[1]) + T::cst(self.b[1][0]) * dx + T::cst(self.b[1][1]) * dy;
        [psi * v0, psi * v1]
    }

    fn support_radius(&self) -> f64 {
        self.bump.reach()
    }
}

/// `∇ log λ` for the base metric, `2x/(1−|x|²)`.
pub fn base_log_gradient<T: Real>(x: T, y: T) -> [T; 2] {
    let k = T::cst(2.0) / (T::one() - x * x - y * y);
    [k * x, k * y]
}

/// `d^{g₀} v = ℒ_{v♯} g₀` for an analytic 1-form `v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasePotential<V> {
    pub v: V,
}

impl<V: AnalyticCovector> AnalyticTensor for BasePotential<V> {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        let vj = self.v.eval(Jet::var(x, 0), Jet::var(y, 1));
        let v = [vj[0].v, vj[1].v];
        // dv[i][j] = ∂ᵢ vⱼ
        let dv = [[vj[0].d[0], vj[1].d[0]], [vj[0].d[1], vj[1].d[1]]];
        let l = base_log_gradient(x, y);
        let lv = l[0] * v[0] + l[1] * v[1];
        let two = T::cst(2.0);
        Sym2::from_fn(|i, j| {
            let mut e = dv[i][j] + dv[j][i] - two * (v[i] * l[j] + v[j] * l[i]);
            if i == j {
                e += two * lv;
            }
            e
        })
    }

    fn support_radius(&self) -> f64 {
        self.v.support_radius()
    }
}

/// Rotation angle field `θ(x) = α ψ(|x|²/r₀²)` of the twist diffeomorphism.
fn twist_rate<T: Real>(alpha: f64, r0: f64, x: T, y: T) -> (T, T) {
    let sigma = (x * x + y * y) * T::cst(1.0 / (r0 * r0));
    if sigma.re() >= 1.0 {
        return (T::zero(), T::zero());
    }
    let psi = bump_profile(sigma);
    let om = T::one() - sigma;
    // dθ/d(|x|²)
    let dtheta = -T::cst(alpha / (r0 * r0)) * psi / (om * om);
    (T::cst(alpha) * psi, dtheta)
}

/// The twist `φ_t(x) = R(t θ(x)) x`, a compactly supported diffeomorphism
/// isotopic to the identity; `φ_t` is the time-`t` flow of `θ(x) J x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist {
    pub alpha: f64,
    pub r0: f64,
}

impl Twist {
    pub fn apply<T: Real>(&self, t: f64, x: T, y: T) -> (T, T) {
        let (theta, _) = twist_rate(self.alpha, self.r0, x, y);
        let b = T::cst(t) * theta;
        let (c, s) = (b.cos(), b.sin());
        (c * x - s * y, s * x + c * y)
    }

    pub fn inverse(&self, t: f64, p: Point<f64>) -> Point<f64> {
        let (x, y) = self.apply(-t, p.x, p.y);
        Point::new(x, y)
    }

    /// Generating vector field `W(x) = θ(x) J x`.
    pub fn generator(&self, p: Point<f64>) -> [f64; 2] {
        let (theta, _) = twist_rate(self.alpha, self.r0, p.x, p.y);
        [-theta * p.y, theta * p.x]
    }

    /// `φ_t* g₀ − g₀` in closed form.
    pub fn delta<T: Real>(&self, t: T, x: T, y: T) -> Sym2<T> {
        let (_, dtheta) = twist_rate(self.alpha, self.r0, x, y);
        let c = T::cst(2.0) * t * dtheta;
        let r2 = x * x + y * y;
        let l = crate::hyperbolic::conformal_factor(x, y);
        let l2 = l * l;
        let cross = Sym2::new(-T::cst(2.0) * x * y, x * x - y * y, T::cst(2.0) * x * y);
        let radial = Sym2::new(x * x, x * y, y * y);
        cross.scale(c).add(&radial.scale(c * c * r2)).scale(l2)
    }

    /// `∂ₜ(φ_t* g₀)`.
    pub fn velocity<T: Real>(&self, t: T, x: T, y: T) -> Sym2<T> {
        let (_, dtheta) = twist_rate(self.alpha, self.r0, x, y);
        let c1 = T::cst(2.0) * dtheta;
        let r2 = x * x + y * y;
        let l = crate::hyperbolic::conformal_factor(x, y);
        let l2 = l * l;
        let cross = Sym2::new(-T::cst(2.0) * x * y, x * x - y * y, T::cst(2.0) * x * y);
        let radial = Sym2::new(x * x, x * y, y * y);
        cross.scale(c1).add(&radial.scale(T::cst(2.0) * t * c1 * c1 * r2)).scale(l2)
    }
}

/// `φ_t* g₀ − g₀` at a fixed time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistDelta {
    pub twist: Twist,
    pub t: f64,
}

impl AnalyticTensor for TwistDelta {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        self.twist.delta(T::cst(self.t), x, y)
    }

    fn support_radius(&self) -> f64 {
        self.twist.r0
    }
}

/// `∂ₜ(φ_t* g₀)` at a fixed time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistVelocity {
    pub twist: Twist,
    pub t: f64,
}

impl AnalyticTensor for TwistVelocity {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        self.twist.velocity(T::cst(self.t), x, y)
    }

    fn support_radius(&self) -> f64 {
        self.twist.r0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::base_metric;

    fn max_diff(a: &Sym2<f64>, b: &Sym2<f64>) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn bump_is_zero_outside_and_one_at_center() {
        let b = Bump::centered(0.5);
        assert_eq!(b.eval(0.5, 0.0), 0.0);
        assert_eq!(b.eval(0.3, 0.45), 0.0);
        assert_eq!(b.eval(0.0, 0.0), 1.0);
        let f = SymTensorField::analytic(ConformalBump { eps: 0.1, bump: b });
        assert_eq!(f.value(Point::new(0.0, 0.5)), Sym2::zero());
        assert_eq!(f.jet2(Point::new(0.6, 0.0)), TensorJet2::zero());
    }

    #[test]
    fn twist_delta_is_the_pullback_metric() {
        let tw = Twist { alpha: 0.8, r0: 0.5 };
        let t = 0.7;
        let p = Point::new(0.21, -0.13);
        // Jacobian of φ_t by forward differentiation
        let (fx, fy) = tw.apply(t, Jet::var(p.x, 0), Jet::var(p.y, 1));
        let jac = [[fx.d[0], fx.d[1]], [fy.d[0], fy.d[1]]];
        let gq = base_metric(fx.v, fy.v);
        let pull = Sym2::from_fn(|i, j| gq.xx * (jac[0][i] * jac[0][j] + jac[1][i] * jac[1][j]));
        let expect = pull.sub(&base_metric(p.x, p.y));
        let got = tw.delta(t, p.x, p.y);
        assert!(max_diff(&got, &expect) < 1e-13, "{got:?} vs {expect:?}");
    }

    #[test]
    fn twist_velocity_is_time_derivative() {
        let tw = Twist { alpha: -0.6, r0: 0.45 };
        let p = Point::new(-0.1, 0.2);
        let t = Jet::var(0.4, 0);
        let d = tw.delta(t, Jet::constant(p.x), Jet::constant(p.y));
        let v = tw.velocity(0.4, p.x, p.y);
        assert!(max_diff(&Sym2::new(d.xx.d[0], d.xy.d[0], d.yy.d[0]), &v) < 1e-13);
    }

    #[test]
    fn twist_inverse_undoes_twist() {
        let tw = Twist { alpha: 1.2, r0: 0.5 };
        let p = Point::new(0.1, 0.3);
        let (x, y) = tw.apply(0.6, p.x, p.y);
        let back = tw.inverse(0.6, Point::new(x, y));
        assert!((back.x - p.x).abs() < 1e-15 && (back.y - p.y).abs() < 1e-15);
    }

    #[test]
    fn analytic_partials_match_central_differences_at_second_order() {
        let v = BumpOneForm { bump: Bump { center: [0.05, -0.1], radius: 0.35 }, a: [0.3, -0.2], b: [[0.5, 0.1], [-0.4, 0.2]] };
        let fields = [
            SymTensorField::analytic(ConformalBump { eps: 0.05, bump: Bump::centered(0.5) }),
            SymTensorField::analytic(AnisotropicBump { eps: 0.05, bump: Bump::centered(0.5), angle: 0.3 }),
            SymTensorField::analytic(BasePotential { v }),
            SymTensorField::analytic(TwistDelta { twist: Twist { alpha: 0.5, r0: 0.5 }, t: 1.0 }),
        ];
        let p = Point::new(0.12, 0.07);
        for f in &fields {
            let exact = f.jet1(p);
            let fd = |h: f64| {
                let fp = f.value(Point::new(p.x + h, p.y));
                let fm = f.value(Point::new(p.x - h, p.y));
                fp.sub(&fm).scale(0.5 / h)
            };
            let e1 = max_diff(&fd(1e-2), &exact.d[0]);
            let e2 = max_diff(&fd(5e-3), &exact.d[0]);
            assert!(e1 / e2 > 3.5, "reduction {} for {f:?}", e1 / e2);
        }
    }

    #[test]
    fn nested_jets_agree_with_differences_of_first_jets() {
        let f = SymTensorField::analytic(ConformalBump { eps: 0.05, bump: Bump::centered(0.5) });
        let p = Point::new(0.1, -0.2);
        let j2 = f.jet2(p);
        let h = 1e-6;
        let jp = f.jet1(Point::new(p.x, p.y + h));
        let jm = f.jet1(Point::new(p.x, p.y - h));
        let fd = jp.d[0].sub(&jm.d[0]).scale(0.5 / h);
        assert!(max_diff(&fd, &j2.dd[0][1]) < 1e-6 * j2.dd[0][1].max_abs().max(1.0));
    }

    #[test]
    fn closure_fields_use_differences() {
        let f = SymTensorField::from_fn(0.6, |x, y| Sym2::new(x * x, x * y, y));
        let j = f.jet1(Point::new(0.2, 0.1));
        assert!((j.d[0].xx - 0.4).abs() < 1e-9);
        assert!((j.d[1].yy - 1.0).abs() < 1e-9);
        assert_eq!(f.value(Point::new(0.6, 0.0)), Sym2::zero());
    }
}
