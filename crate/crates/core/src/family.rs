//! One-parameter families of metrics `t ↦ g_t`, `t ∈ [0, 1]`.

use crate::error::Result;
use crate::fields::{SymTensorField, Twist, TwistDelta, TwistVelocity};
use crate::metric::MetricField;

#[derive(Clone, Debug)]
pub enum FamilyKind {
    /// `g_t = g₀`.
    Constant,
    /// `g_t = g₀ + t h`.
    Linear(SymTensorField),
    /// `g_t = φ_t* g₀` for the twist diffeomorphism.
    Pullback(Twist),
}

#[derive(Clone, Debug)]
pub struct MetricFamily {
    kind: FamilyKind,
}

impl MetricFamily {
    pub fn constant() -> Self {
        MetricFamily { kind: FamilyKind::Constant }
    }

    pub fn linear(h: SymTensorField) -> Self {
        MetricFamily { kind: FamilyKind::Linear(h) }
    }

    pub fn pullback(twist: Twist) -> Self {
        MetricFamily { kind: FamilyKind::Pullback(twist) }
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            FamilyKind::Constant => 0.0,
            FamilyKind::Linear(h) => h.support_radius(),
            FamilyKind::Pullback(tw) => tw.r0,
        }
    }

    pub fn metric_at(&self, t: f64) -> Result<MetricField> {
        match &self.kind {
            FamilyKind::Constant => Ok(MetricField::base()),
            FamilyKind::Linear(h) => MetricField::perturbed(h.scaled(t)),
            FamilyKind::Pullback(tw) => {
                if t == 0.0 {
                    Ok(MetricField::base())
                } else {
                    MetricField::perturbed(SymTensorField::analytic(TwistDelta { twist: *tw, t }))
                }
            }
        }
    }

    /// `ġ_t = ∂ₜ g_t`.
    pub fn velocity_at(&self, t: f64) -> SymTensorField {
        match &self.kind {
            FamilyKind::Constant => SymTensorField::zero(),
            FamilyKind::Linear(h) => h.clone(),
            FamilyKind::Pullback(tw) => SymTensorField::analytic(TwistVelocity { twist: *tw, t }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Point;
    use crate::fields::{Bump, ConformalBump};

    #[test]
    fn velocity_matches_central_difference() {
        let fams = [
            MetricFamily::linear(SymTensorField::analytic(ConformalBump { eps: 0.05, bump: Bump::centered(0.5) })),
            MetricFamily::pullback(Twist { alpha: 0.7, r0: 0.5 }),
        ];
        let p = Point::new(0.2, -0.15);
        for f in &fams {
            let t = 0.4;
            let err = |dt: f64| {
                let a = f.metric_at(t + dt).unwrap().value(p);
                let b = f.metric_at(t - dt).unwrap().value(p);
                a.sub(&b).scale(0.5 / dt).sub(&f.velocity_at(t).value(p)).max_abs()
            };
            let (e1, e2) = (err(1e-2), err(5e-3));
            assert!(e1 < 1e-3);
            assert!(e2 < 1e-12 || e1 / e2 > 3.5, "{e1} {e2}");
        }
    }

    #[test]
    fn family_is_base_outside_common_support() {
        let f = MetricFamily::pullback(Twist { alpha: 0.7, r0: 0.5 });
        let p = Point::new(0.0, 0.5);
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(f.metric_at(t).unwrap().value(p), MetricField::base().value(p));
        }
    }
}
