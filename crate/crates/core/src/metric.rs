//! Riemannian metrics `g = g₀ + h` on the disk chart and their pointwise
//! differential geometry.

use crate::chart::{Point, Sym2};
use crate::error::{GeomError, Result};
use crate::fields::{AnalyticTensor, SymTensorField, TensorJet1, TensorJet2};
use crate::hyperbolic::base_metric;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
struct BaseMetric;

impl AnalyticTensor for BaseMetric {
    fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
        base_metric(x, y)
    }
    fn support_radius(&self) -> f64 {
        1.0
    }
}

/// Hyperbolic disk metric plus a compactly supported perturbation.
#[derive(Clone, Debug)]
pub struct MetricField {
    base: SymTensorField,
    pert: SymTensorField,
}

/// `gamma[k][i][j] = Γᵏᵢⱼ`.
pub type Christoffel = [[[f64; 2]; 2]; 2];

impl MetricField {
    pub fn base() -> Self {
        MetricField { base: SymTensorField::analytic(BaseMetric), pert: SymTensorField::zero() }
    }

    /// `g₀ + h`; the support radius of `h` must lie in `(0, 1)`.
    pub fn perturbed(h: SymTensorField) -> Result<Self> {
        let r = h.support_radius();
        if !h.is_zero() && !(r > 0.0 && r < 1.0) {
            return Err(GeomError::InvalidInput(format!("support radius {r} not in (0, 1)")));
        }
        Ok(MetricField { base: SymTensorField::analytic(BaseMetric), pert: h })
    }

    pub fn perturbation(&self) -> &SymTensorField {
        &self.pert
    }

    pub fn is_base(&self) -> bool {
        self.pert.is_zero()
    }

    /// Euclidean radius of a closed disk containing `supp(g − g₀)`.
    pub fn support_radius(&self) -> f64 {
        self.pert.support_radius()
    }

    /// `gᵢⱼ(x)`, rejecting points off the chart.
    pub fn eval(&self, p: Point<f64>) -> Result<Sym2<f64>> {
        check_chart(p)?;
        Ok(self.value(p))
    }

    pub fn value(&self, p: Point<f64>) -> Sym2<f64> {
        base_metric(p.x, p.y).add(&self.pert.value(p))
    }

    pub fn jet1(&self, p: Point<f64>) -> TensorJet1 {
        let b = self.base.jet1(p);
        let h = self.pert.jet1(p);
        TensorJet1 { value: b.value.add(&h.value), d: [b.d[0].add(&h.d[0]), b.d[1].add(&h.d[1])] }
    }

    pub fn jet2(&self, p: Point<f64>) -> TensorJet2 {
        let b = self.base.jet2(p);
        let h = self.pert.jet2(p);
        let mut out = b;
        out.value = b.value.add(&h.value);
        for k in 0..2 {
            out.d[k] = b.d[k].add(&h.d[k]);
            for l in 0..2 {
                out.dd[k][l] = b.dd[k][l].add(&h.dd[k][l]);
            }
        }
        out
    }

    pub fn christoffel(&self, p: Point<f64>) -> Result<Christoffel> {
        check_chart(p)?;
        Ok(christoffel_from(&self.jet1(p)))
    }

    /// Geodesic acceleration `−Γᵏᵢⱼ vⁱ vʲ` together with `g` at `p`.
    pub fn acceleration(&self, p: Point<f64>, v: [f64; 2]) -> ([f64; 2], Sym2<f64>) {
        let j = self.jet1(p);
        let gam = christoffel_from(&j);
        let mut a = [0.0; 2];
        for (k, ak) in a.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..2 {
                for jj in 0..2 {
                    s += gam[k][i][jj] * v[i] * v[jj];
                }
            }
            *ak = -s;
        }
        (a, j.value)
    }

    pub fn gaussian_curvature(&self, p: Point<f64>) -> Result<f64> {
        check_chart(p)?;
        Ok(curvature_from(&self.jet2(p)))
    }

    /// Unit vector (in `g`) along the chart direction `angle`.
    pub fn unit_vector(&self, p: Point<f64>, angle: f64) -> [f64; 2] {
        let e = [angle.cos(), angle.sin()];
        let n = self.value(p).quad(e).sqrt();
        [e[0] / n, e[1] / n]
    }
}

pub fn check_chart(p: Point<f64>) -> Result<()> {
    if p.norm_sq() < 1.0 {
        Ok(())
    } else {
        Err(GeomError::PointOutsideChart { x: p.x, y: p.y })
    }
}

/// `Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢgⱼₗ + ∂ⱼgᵢₗ − ∂ₗgᵢⱼ)`.
pub fn christoffel_from(j: &TensorJet1) -> Christoffel {
    let gi = j.value.inverse();
    let mut gam = [[[0.0; 2]; 2]; 2];
    for (k, gk) in gam.iter_mut().enumerate() {
        for i in 0..2 {
            for jj in 0..2 {
                let mut s = 0.0;
                for l in 0..2 {
                    s += gi.get(k, l) * (j.d[i].get(jj, l) + j.d[jj].get(i, l) - j.d[l].get(i, jj));
                }
                gk[i][jj] = 0.5 * s;
            }
        }
    }
    gam
}

/// Christoffel symbols and their partials, `dgam[m][k][i][j] = ∂ₘΓᵏᵢⱼ`.
pub fn christoffel_jet(j: &TensorJet2) -> (Christoffel, [Christoffel; 2]) {
    let gi = j.value.inverse();
    let t = |l: usize, i: usize, jj: usize| j.d[i].get(jj, l) + j.d[jj].get(i, l) - j.d[l].get(i, jj);
    let dt = |m: usize, l: usize, i: usize, jj: usize| j.dd[m][i].get(jj, l) + j.dd[m][jj].get(i, l) - j.dd[m][l].get(i, jj);
    let mut gam = [[[0.0; 2]; 2]; 2];
    let mut dgam = [[[[0.0; 2]; 2]; 2]; 2];
    for m in 0..2 {
        // ∂ₘ g⁻¹ = −g⁻¹ (∂ₘ g) g⁻¹
        let dgi = Sym2::from_fn(|a, b| {
            let mut s = 0.0;
            for c in 0..2 {
                for d in 0..2 {
                    s -= gi.get(a, c) * j.d[m].get(c, d) * gi.get(d, b);
                }
            }
            s
        });
        for k in 0..2 {
            for i in 0..2 {
                for jj in 0..2 {
                    let mut s = 0.0;
                    let mut g0 = 0.0;
                    for l in 0..2 {
                        s += dgi.get(k, l) * t(l, i, jj) + gi.get(k, l) * dt(m, l, i, jj);
                        g0 += gi.get(k, l) * t(l, i, jj);
                    }
                    dgam[m][k][i][jj] = 0.5 * s;
                    gam[k][i][jj] = 0.5 * g0;
                }
            }
        }
    }
    (gam, dgam)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Gaussian curvature by the Brioschi formula.
pub fn curvature_from(j: &TensorJet2) -> f64 {
    let (e, f, g) = (j.value.xx, j.value.xy, j.value.yy);
    let (eu, ev) = (j.d[0].xx, j.d[1].xx);
    let (fu, fv) = (j.d[0].xy, j.d[1].xy);
    let (gu, gv) = (j.d[0].yy, j.d[1].yy);
    let evv = j.dd[1][1].xx;
    let fuv = j.dd[0][1].xy;
    let guu = j.dd[0][0].yy;
    let a = det3([[-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev], [fv - 0.5 * gu, e, f], [0.5 * gv, f, g]]);
    let b = det3([[0.0, 0.5 * ev, 0.5 * gu], [0.5 * ev, e, f], [0.5 * gu, f, g]]);
    let w = e * g - f * f;
    (a - b) / (w * w)
}

/// Sampled curvature over a polar grid covering the support disk.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub max_k: f64,
    pub min_k: f64,
    pub worst: Point<f64>,
    pub samples: usize,
    pub bound: f64,
    pub pass: bool,
}

/// Scans `K` on `resolution` radii × `2·resolution` angles (plus the centre)
/// over the support disk and compares against `K ≤ bound`.
pub fn curvature_scan(field: &MetricField, resolution: usize, bound: f64) -> CurvatureReport {
    let n = resolution.max(2);
    let radius = if field.is_base() { 0.5 } else { field.support_radius() };
    let mut pts = vec![Point::origin()];
    for a in 1..=n {
        let r = radius * a as f64 / n as f64;
        for b in 0..2 * n {
            pts.push(Point::polar(r, std::f64::consts::PI * b as f64 / n as f64));
        }
    }
    let mut max_k = f64::NEG_INFINITY;
    let mut min_k = f64::INFINITY;
    let mut worst = Point::origin();
    for p in &pts {
        let k = curvature_from(&field.jet2(*p));
        if k > max_k {
            max_k = k;
            worst = *p;
        }
        min_k = min_k.min(k);
    }
    CurvatureReport { max_k, min_k, worst, samples: pts.len(), bound, pass: max_k <= bound }
}

/// Default slack for grid certification of curvature bounds.
pub const CURVATURE_SLACK: f64 = 1e-6;

/// Checks `K ≤ −1 + margin + slack` on the grid.
pub fn verify_curvature_bound(field: &MetricField, resolution: usize, margin: f64, slack: f64) -> Result<CurvatureReport> {
    let bound = -1.0 + margin + slack;
    let rep = curvature_scan(field, resolution, bound);
    if rep.pass {
        Ok(rep)
    } else {
        Err(GeomError::HypothesisViolation { x: rep.worst.x, y: rep.worst.y, value: rep.max_k, bound })
    }
}

/// Checks `K ≤ 0`, the condition under which geodesics between two points and
/// between two ideal points are unique.
pub fn verify_nonpositive_curvature(field: &MetricField, resolution: usize) -> Result<CurvatureReport> {
    verify_curvature_bound(field, resolution, 1.0, 0.0)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// The base metric viewed as a tensor field supported in the whole chart.
    #[derive(Clone, Copy, Debug)]
    pub struct Base;

    impl AnalyticTensor for Base {
        fn eval<T: Real>(&self, x: T, y: T) -> Sym2<T> {
            base_metric(x, y)
        }
        fn support_radius(&self) -> f64 {
            0.95
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Bump, ConformalBump};

    #[test]
    fn base_christoffel_values() {
        let g = MetricField::base();
        let gam = g.christoffel(Point::origin()).unwrap();
        assert!(gam.iter().flatten().flatten().all(|v| v.abs() < 1e-15));
        let gam = g.christoffel(Point::new(0.5, 0.0)).unwrap();
        assert!((gam[0][0][0] - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn base_curvature_is_minus_one() {
        let g = MetricField::base();
        for p in [Point::new(0.0, 0.0), Point::new(0.3, -0.6), Point::new(-0.9, 0.1)] {
            assert!((g.gaussian_curvature(p).unwrap() + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn points_off_chart_are_rejected() {
        let g = MetricField::base();
        assert!(matches!(g.eval(Point::new(1.0, 0.0)), Err(GeomError::PointOutsideChart { .. })));
        assert!(g.christoffel(Point::new(0.0, -1.2)).is_err());
    }

    #[test]
    fn conformal_bump_raises_curvature_at_centre() {
        let eps = 0.05;
        let g = MetricField::perturbed(SymTensorField::analytic(ConformalBump { eps, bump: Bump::centered(0.5) })).unwrap();
        let k = g.gaussian_curvature(Point::origin()).unwrap();
        // K = e^{-2u}(-1 - Δ_{g₀}u) with u = ½ log(1 + εψ) and Δ_{g₀}u(0) = -2ε/(1+ε)
        assert!((k - (-1.0 + eps) / ((1.0 + eps) * (1.0 + eps))).abs() < 1e-12, "{k}");
    }
}
