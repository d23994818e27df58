//! The operators `d^g` and `δ^g`, volumes and L² pairings.

use crate::chart::{Covector, Point, Sym2};
use crate::fields::{CovectorEval, OneFormField, SymTensorField, TensorEval, TensorJet1};
use crate::metric::{christoffel_from, christoffel_jet, MetricField};
use crate::quadrature::{integrate_disk, QuadResult};

/// `d^g v = ℒ_{v♯} g`, i.e. `(d v)ᵢⱼ = ∇ᵢvⱼ + ∇ⱼvᵢ`.
#[derive(Debug)]
struct SymDerivative {
    metric: MetricField,
    v: OneFormField,
}

impl TensorEval for SymDerivative {
    fn support_radius(&self) -> f64 {
        self.v.support_radius()
    }

    fn value(&self, p: Point<f64>) -> Sym2<f64> {
        let vj = self.v.jet1(p);
        let gam = christoffel_from(&self.metric.jet1(p));
        Sym2::from_fn(|i, j| {
            let mut e = vj.d[i][j] + vj.d[j][i];
            for k in 0..2 {
                e -= 2.0 * gam[k][i][j] * vj.value[k];
            }
            e
        })
    }

    fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        let vj = self.v.jet2(p);
        let (gam, dgam) = christoffel_jet(&self.metric.jet2(p));
        let value = Sym2::from_fn(|i, j| {
            let mut e = vj.d[i][j] + vj.d[j][i];
            for k in 0..2 {
                e -= 2.0 * gam[k][i][j] * vj.value[k];
            }
            e
        });
        let mut d = [Sym2::zero(); 2];
        for (m, dm) in d.iter_mut().enumerate() {
            *dm = Sym2::from_fn(|i, j| {
                let mut e = vj.dd[m][i][j] + vj.dd[m][j][i];
                for k in 0..2 {
                    e -= 2.0 * (dgam[m][k][i][j] * vj.value[k] + gam[k][i][j] * vj.d[m][k]);
                }
                e
            });
        }
        TensorJet1 { value, d }
    }
}

pub fn sym_derivative(metric: &MetricField, v: &OneFormField) -> SymTensorField {
    if v.is_zero() {
        return SymTensorField::zero();
    }
    SymTensorField::from_eval(std::sync::Arc::new(SymDerivative { metric: metric.clone(), v: v.clone() }))
}

/// `(δ^g f)ⱼ = −2 gⁱᵏ ∇ᵢ fₖⱼ`, the formal L² adjoint of `d^g`. The factor 2
/// comes with `d v = ∇ᵢvⱼ + ∇ⱼvᵢ` (no ½ in the symmetrization).
#[derive(Debug)]
struct Divergence {
    metric: MetricField,
    f: SymTensorField,
}

/// Pointwise divergence from the jets of `g` and `f`.
pub fn divergence_at(g: &TensorJet1, f: &TensorJet1) -> Covector<f64> {
    let gi = g.value.inverse();
    let gam = christoffel_from(g);
    let mut out = [0.0; 2];
    for (j, oj) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                let mut cov = f.d[i].get(k, j);
                for m in 0..2 {
                    cov -= gam[m][i][k] * f.value.get(m, j) + gam[m][i][j] * f.value.get(k, m);
                }
                s += gi.get(i, k) * cov;
            }
        }
        *oj = -2.0 * s;
    }
    out
}

impl CovectorEval for Divergence {
    fn support_radius(&self) -> f64 {
        self.f.support_radius()
    }

    fn value(&self, p: Point<f64>) -> Covector<f64> {
        divergence_at(&self.metric.jet1(p), &self.f.jet1(p))
    }
}

pub fn divergence(metric: &MetricField, f: &SymTensorField) -> OneFormField {
    if f.is_zero() {
        return OneFormField::zero();
    }
    OneFormField::from_eval(std::sync::Arc::new(Divergence { metric: metric.clone(), f: f.clone() }))
}

/// `∫_{|x|<r} √det g dx`.
pub fn volume(metric: &MetricField, radius: f64) -> QuadResult {
    integrate_disk(radius, metric.support_radius(), |p| metric.value(p).det().sqrt())
}

/// `∫_{|x|<r} (√det(g₀ + f) − √det g₀) dx`, evaluated without cancellation.
pub fn volume_change(metric: &MetricField, f: &SymTensorField, radius: f64) -> QuadResult {
    integrate_disk(radius, f.support_radius().max(metric.support_radius()), |p| {
        let g = metric.value(p);
        let h = f.value(p);
        let a = g.det();
        let b = g.add(&h).det();
        (b - a) / (b.sqrt() + a.sqrt())
    })
}

/// `∫ gⁱᵏ gʲˡ uᵢⱼ wₖₗ dVol_g` over `|x| < radius`.
pub fn l2_inner(metric: &MetricField, u: &SymTensorField, w: &SymTensorField, radius: f64) -> QuadResult {
    if u.is_zero() || w.is_zero() {
        return QuadResult { value: 0.0, error: 0.0 };
    }
    let support = u.support_radius().min(w.support_radius()).min(radius);
    integrate_disk(support, support.max(metric.support_radius().min(support)), |p| {
        let g = metric.value(p);
        let gi = g.inverse();
        Sym2::contract(&gi, &u.value(p), &w.value(p)) * g.det().sqrt()
    })
}

/// `∫ gⁱʲ vᵢ wⱼ dVol_g` over `|x| < radius`.
pub fn l2_inner_forms(metric: &MetricField, v: &OneFormField, w: &OneFormField, radius: f64) -> QuadResult {
    if v.is_zero() || w.is_zero() {
        return QuadResult { value: 0.0, error: 0.0 };
    }
    let support = v.support_radius().min(w.support_radius()).min(radius);
    integrate_disk(support, support, |p| {
        let g = metric.value(p);
        g.inverse().bilinear(v.value(p), w.value(p)) * g.det().sqrt()
    })
}

/// Pointwise `|f|_g = (gⁱᵏ gʲˡ fᵢⱼ fₖₗ)^{1/2}`.
pub fn tensor_norm(g: &Sym2<f64>, f: &Sym2<f64>) -> f64 {
    Sym2::contract(&g.inverse(), f, f).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AnisotropicBump, BasePotential, Bump, BumpOneForm, ConformalBump};
    use crate::hyperbolic::{chart_radius, hyp_disk_area};

    fn bump_form() -> BumpOneForm {
        BumpOneForm { bump: Bump { center: [0.1, 0.05], radius: 0.3 }, a: [0.4, -0.3], b: [[0.2, -0.5], [0.3, 0.1]] }
    }

    #[test]
    fn generic_d_matches_closed_form_on_base() {
        let v = bump_form();
        let g = MetricField::base();
        let general = sym_derivative(&g, &OneFormField::analytic(v));
        let closed = SymTensorField::analytic(BasePotential { v });
        for p in [Point::new(0.1, 0.1), Point::new(-0.1, 0.2), Point::new(0.3, 0.0)] {
            let a = general.jet1(p);
            let b = closed.jet1(p);
            assert!(a.value.sub(&b.value).max_abs() < 1e-12);
            for k in 0..2 {
                assert!(a.d[k].sub(&b.d[k]).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn d_of_zero_and_support() {
        let g = MetricField::base();
        assert!(sym_derivative(&g, &OneFormField::zero()).is_zero());
        let dv = sym_derivative(&g, &OneFormField::analytic(bump_form()));
        assert_eq!(dv.value(Point::new(0.45, 0.0)), Sym2::zero());
    }

    #[test]
    fn adjointness_of_d_and_delta() {
        let g = MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps: 0.05, bump: Bump::centered(0.5) })).unwrap();
        let v = OneFormField::analytic(bump_form());
        let f = SymTensorField::analytic(AnisotropicBump { eps: 1.0, bump: Bump { center: [0.05, 0.0], radius: 0.35 }, angle: 0.4 });
        let lhs = l2_inner(&g, &sym_derivative(&g, &v), &f, 0.6);
        let rhs = l2_inner_forms(&g, &v, &divergence(&g, &f), 0.6);
        assert!((lhs.value - rhs.value).abs() < 1e-7 * lhs.value.abs().max(1.0), "{lhs:?} {rhs:?}");
    }

    #[test]
    fn hyperbolic_ball_area() {
        for rh in [0.5, 1.5, 3.0] {
            let q = volume(&MetricField::base(), chart_radius(rh));
            assert!((q.value / hyp_disk_area(rh) - 1.0).abs() < 1e-9, "{rh}: {q:?}");
        }
    }

    #[test]
    fn trace_identity() {
        let g = MetricField::base();
        let f = SymTensorField::analytic(ConformalBump { eps: 0.3, bump: Bump::centered(0.5) });
        let g0 = SymTensorField::analytic(super::super::metric::tests_support::Base);
        let a = l2_inner(&g, &g0, &f, 0.9).value;
        let b = crate::quadrature::integrate_disk(0.5, 0.5, |p| {
            let m = g.value(p);
            let t = m.inverse().apply([f.value(p).xx, f.value(p).xy]);
            let t2 = m.inverse().apply([f.value(p).xy, f.value(p).yy]);
            (t[0] + t2[1]) * m.det().sqrt()
        })
        .value;
        assert!((a - b).abs() < 1e-10 * b.abs());
    }
}
