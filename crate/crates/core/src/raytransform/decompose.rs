//! Linear solenoidal decomposition `f = s + d^{g₀} v`, `v|∂M = 0`, on a polar
//! grid, as weighted least squares `min ‖f − D v‖` solved by preconditioned
//! conjugate gradients on the normal equations.
//!
//! The discrete divergence is defined as the weighted adjoint
//! `δ_h = W_v⁻¹ Dᵀ W_f`, so `δ_h s = 0` is exactly the normal equation.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use sprs::{CsMat, TriMat};

use crate::chart::{Point, Sym2};
use crate::error::{GeomError, Result};
use crate::fields::{AnalyticCovector, BasePotential, Bump, BumpOneForm, OneFormField, SymTensorField};
use crate::metric::{christoffel_from, MetricField};

use super::CdrmDisk;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecomposeOptions {
    pub n_r: usize,
    pub n_theta: usize,
    /// Relative residual of the normal equations.
    pub cg_tol: f64,
    pub max_iter: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { n_r: 64, n_theta: 128, cg_tol: 1e-10, max_iter: 50_000 }
    }
}

/// Cell-centred polar grid with the outer ring exactly on the boundary:
/// `r_a = (a + ½) Δr`, `a = 0..n_r`, `r_{n_r−1} = radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub radius: f64,
    pub dr: f64,
    pub dtheta: f64,
}

impl PolarGrid {
    pub fn new(radius: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 || n_theta < 8 || !n_theta.is_multiple_of(2) {
            return Err(GeomError::InvalidInput(format!("grid {n_r}x{n_theta} too coarse (n_theta must be even)")));
        }
        Ok(PolarGrid { n_r, n_theta, radius, dr: radius / (n_r as f64 - 0.5), dtheta: TAU / n_theta as f64 })
    }

    pub fn r(&self, a: usize) -> f64 {
        (a as f64 + 0.5) * self.dr
    }

    pub fn theta(&self, b: usize) -> f64 {
        b as f64 * self.dtheta
    }

    pub fn point(&self, a: usize, b: usize) -> Point<f64> {
        Point::polar(self.r(a), self.theta(b))
    }

    pub fn nodes(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn node(&self, a: usize, b: usize) -> usize {
        a * self.n_theta + b
    }

    /// Cell area in the chart (half cell on the boundary ring).
    pub fn area(&self, a: usize) -> f64 {
        let w = if a + 1 == self.n_r { 0.5 } else { 1.0 };
        w * self.r(a) * self.dr * self.dtheta
    }

    /// Number of free covector unknowns (boundary ring is fixed to zero).
    pub fn unknowns(&self) -> usize {
        2 * (self.n_r - 1) * self.n_theta
    }

    fn var(&self, a: usize, b: usize, c: usize) -> Option<usize> {
        (a + 1 < self.n_r).then(|| 2 * self.node(a, b % self.n_theta) + c)
    }

    fn wrap(&self, b: isize) -> usize {
        b.rem_euclid(self.n_theta as isize) as usize
    }
}

/// Sparse discrete `d^g v = ∂ᵢvⱼ + ∂ⱼvᵢ − 2Γᵏᵢⱼ v_k`: rows `(node, xx|xy|yy)`,
/// columns `(node, x|y)`.
fn assemble(grid: &PolarGrid, metric: &MetricField) -> CsMat<f64> {
    let n_rows = 3 * grid.nodes();
    let mut tri = TriMat::new((n_rows, grid.unknowns()));
    let (n_r, n_t) = (grid.n_r, grid.n_theta as isize);
    for a in 0..n_r {
        for b in 0..grid.n_theta {
            let th = grid.theta(b);
            let r = grid.r(a);
            let (c, s) = (th.cos(), th.sin());
            // ∂_r stencil as (a', b', weight)
            let radial: Vec<(usize, usize, f64)> = if a == 0 {
                vec![(1, b, 0.5 / grid.dr), (0, grid.wrap(b as isize + n_t / 2), -0.5 / grid.dr)]
            } else if a + 1 == n_r {
                vec![(a, b, 1.5 / grid.dr), (a - 1, b, -2.0 / grid.dr), (a - 2, b, 0.5 / grid.dr)]
            } else {
                vec![(a + 1, b, 0.5 / grid.dr), (a - 1, b, -0.5 / grid.dr)]
            };
            let angular = [(a, grid.wrap(b as isize + 1), 0.5 / grid.dtheta), (a, grid.wrap(b as isize - 1), -0.5 / grid.dtheta)];
            // ∂_x = c ∂_r − (s/r) ∂_θ,  ∂_y = s ∂_r + (c/r) ∂_θ
            let mut partial: [Vec<(usize, usize, f64)>; 2] = [Vec::new(), Vec::new()];
            for &(aa, bb, w) in &radial {
                partial[0].push((aa, bb, c * w));
                partial[1].push((aa, bb, s * w));
            }
            for &(aa, bb, w) in &angular {
                partial[0].push((aa, bb, -s / r * w));
                partial[1].push((aa, bb, c / r * w));
            }
            let gam = christoffel_from(&metric.jet1(grid.point(a, b)));
            let row0 = 3 * grid.node(a, b);
            for (comp, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                let row = row0 + comp;
                for &(aa, bb, w) in &partial[i] {
                    if let Some(col) = grid.var(aa, bb, j) {
                        tri.add_triplet(row, col, w);
                    }
                }
                for &(aa, bb, w) in &partial[j] {
                    if let Some(col) = grid.var(aa, bb, i) {
                        tri.add_triplet(row, col, w);
                    }
                }
                for k in 0..2 {
                    if let Some(col) = grid.var(a, b, k) {
                        tri.add_triplet(row, col, -2.0 * gam[k][i][j]);
                    }
                }
            }
        }
    }
    tri.to_csr()
}

fn matvec(m: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    for (row, vec) in m.outer_iterator().enumerate() {
        y[row] = vec.iter().map(|(c, &w)| w * x[c]).sum();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-node quadratic form on `(f_xx, f_xy, f_yy)` giving
/// `gⁱᵏgʲˡ fᵢⱼ fₖₗ dvol_g` over the cell.
fn tensor_weights(grid: &PolarGrid, metric: &MetricField) -> Vec<[[f64; 3]; 3]> {
    let basis = [Sym2::new(1.0, 0.0, 0.0), Sym2::new(0.0, 1.0, 0.0), Sym2::new(0.0, 0.0, 1.0)];
    let mut w = Vec::with_capacity(grid.nodes());
    for a in 0..grid.n_r {
        for b in 0..grid.n_theta {
            let g = metric.value(grid.point(a, b));
            let gi = g.inverse();
            let vol = g.det().sqrt() * grid.area(a);
            let mut m = [[0.0; 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e = vol * Sym2::contract(&gi, &basis[i], &basis[j]);
                }
            }
            w.push(m);
        }
    }
    w
}

/// Per interior node `gⁱʲ dvol_g` for covectors.
fn covector_weights(grid: &PolarGrid, metric: &MetricField) -> Vec<Sym2<f64>> {
    let mut w = Vec::with_capacity(grid.unknowns() / 2);
    for a in 0..grid.n_r - 1 {
        for b in 0..grid.n_theta {
            let g = metric.value(grid.point(a, b));
            w.push(g.inverse().scale(g.det().sqrt() * grid.area(a)));
        }
    }
    w
}

fn weigh(w: &[[[f64; 3]; 3]], x: &[f64], out: &mut [f64]) {
    for (n, m) in w.iter().enumerate() {
        for i in 0..3 {
            out[3 * n + i] = (0..3).map(|j| m[i][j] * x[3 * n + j]).sum();
        }
    }
}

fn weighted_norm(w: &[[[f64; 3]; 3]], x: &[f64]) -> f64 {
    let mut wx = vec![0.0; x.len()];
    weigh(w, x, &mut wx);
    dot(x, &wx).max(0.0).sqrt()
}

/// Result of a decomposition on the grid.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub grid: PolarGrid,
    pub f: Vec<Sym2<f64>>,
    pub s: Vec<Sym2<f64>>,
    /// Covector values on all rings (zero on the boundary ring).
    pub v: Vec<[f64; 2]>,
    pub iterations: usize,
    /// Relative residual of the normal equations.
    pub solver_residual: f64,
    /// Weighted norm of `δ_h s`.
    pub delta_s_norm: f64,
    pub f_norm: f64,
    pub s_norm: f64,
}

impl Decomposition {
    pub fn relative_solenoidal(&self) -> f64 {
        if self.f_norm == 0.0 {
            0.0
        } else {
            self.s_norm / self.f_norm
        }
    }

    /// Bilinear interpolation in `(r, θ)` of the recovered covector.
    pub fn v_at(&self, p: Point<f64>) -> [f64; 2] {
        let g = &self.grid;
        let r = p.norm();
        if r >= g.radius {
            return [0.0, 0.0];
        }
        let th = p.y.atan2(p.x).rem_euclid(TAU);
        let fb = th / g.dtheta;
        let b0 = fb.floor() as isize;
        let tb = fb - b0 as f64;
        let fa = r / g.dr - 0.5;
        let value = |a: isize, b: isize| -> [f64; 2] {
            // ring −1 is ring 0 seen across the axis
            let (a, b) = if a < 0 { (0, b + g.n_theta as isize / 2) } else { (a, b) };
            self.v[g.node(a as usize, g.wrap(b))]
        };
        let a0 = fa.floor() as isize;
        let ta = fa - a0 as f64;
        let mut out = [0.0; 2];
        for (da, wa) in [(0, 1.0 - ta), (1, ta)] {
            for (db, wb) in [(0, 1.0 - tb), (1, tb)] {
                let v = value(a0 + da, b0 + db);
                out[0] += wa * wb * v[0];
                out[1] += wa * wb * v[1];
            }
        }
        out
    }

    /// Recovered covector as a field, zero outside the disk.
    pub fn v_field(&self) -> OneFormField {
        let me = self.clone();
        OneFormField::from_fn(self.grid.radius, move |x, y| me.v_at(Point::new(x, y)))
    }

    /// Weighted relative distance between the recovered `v` and a reference.
    pub fn v_error(&self, v0: &OneFormField) -> f64 {
        let g = &self.grid;
        let (mut num, mut den) = (0.0, 0.0);
        for a in 0..g.n_r {
            for b in 0..g.n_theta {
                let want = v0.value(g.point(a, b));
                let got = self.v[g.node(a, b)];
                let w = g.area(a);
                num += w * ((got[0] - want[0]).powi(2) + (got[1] - want[1]).powi(2));
                den += w * (want[0] * want[0] + want[1] * want[1]);
            }
        }
        (num / den).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut out = String::from("r,theta,x,y,f_xx,f_xy,f_yy,s_xx,s_xy,s_yy,v_x,v_y\n");
        for a in 0..g.n_r {
            for b in 0..g.n_theta {
                let k = g.node(a, b);
                let p = g.point(a, b);
                let (f, s, v) = (self.f[k], self.s[k], self.v[k]);
                let _ = writeln!(
                    out,
                    "{:.8},{:.8},{:.8},{:.8},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                    g.r(a),
                    g.theta(b),
                    p.x,
                    p.y,
                    f.xx,
                    f.xy,
                    f.yy,
                    s.xx,
                    s.xy,
                    s.yy,
                    v[0],
                    v[1]
                );
            }
        }
        out
    }
}

/// Solves `min ‖f − D v‖_W` over covectors vanishing on `∂M`, with `d` and
/// the weights taken from `g₀`.
pub fn solenoidal_decompose(disk: &CdrmDisk, f: &SymTensorField, opts: &DecomposeOptions) -> Result<Decomposition> {
    decompose_with(&MetricField::base(), disk.radius, f, opts)
}

/// Decomposition with respect to an arbitrary metric on the disk `|x| ≤ radius`.
pub fn decompose_with(metric: &MetricField, radius: f64, f: &SymTensorField, opts: &DecomposeOptions) -> Result<Decomposition> {
    let grid = PolarGrid::new(radius, opts.n_r, opts.n_theta)?;
    let fv: Vec<Sym2<f64>> =
        (0..grid.n_r).flat_map(|a| (0..grid.n_theta).map(move |b| (a, b))).map(|(a, b)| f.value(grid.point(a, b))).collect();
    decompose_values(grid, metric, fv, opts)
}

pub(crate) fn decompose_values(
    grid: PolarGrid,
    metric: &MetricField,
    fv: Vec<Sym2<f64>>,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let d = assemble(&grid, metric);
    let dt: CsMat<f64> = d.transpose_view().to_csr();
    let wf = tensor_weights(&grid, metric);
    let wv = covector_weights(&grid, metric);
    let fflat: Vec<f64> = fv.iter().flat_map(|t| [t.xx, t.xy, t.yy]).collect();
    let (n, m) = (grid.unknowns(), fflat.len());

    // b = Dᵀ W f
    let mut wff = vec![0.0; m];
    weigh(&wf, &fflat, &mut wff);
    let mut rhs = vec![0.0; n];
    matvec(&dt, &wff, &mut rhs);
    // Jacobi preconditioner: diag(Dᵀ W D), from the columns of D
    let mut diag = vec![0.0; n];
    for (col, entries) in dt.outer_iterator().enumerate() {
        let e: Vec<(usize, f64)> = entries.iter().map(|(r, &w)| (r, w)).collect();
        for &(r1, w1) in &e {
            for &(r2, w2) in &e {
                if r1 / 3 == r2 / 3 {
                    diag[col] += w1 * wf[r1 / 3][r1 % 3][r2 % 3] * w2;
                }
            }
        }
    }
    let mut tmp = vec![0.0; m];
    let mut wtmp = vec![0.0; m];
    let mut apply = |x: &[f64], out: &mut [f64]| {
        matvec(&d, x, &mut tmp);
        weigh(&wf, &tmp, &mut wtmp);
        matvec(&dt, &wtmp, out);
    };
    let bnorm = dot(&rhs, &rhs).sqrt();
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    let mut res = 0.0;
    if bnorm > 0.0 {
        let mut r = rhs.clone();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        loop {
            res = dot(&r, &r).sqrt() / bnorm;
            if res <= opts.cg_tol {
                break;
            }
            if iterations >= opts.max_iter {
                return Err(GeomError::SolverFailure(format!(
                    "conjugate gradients stopped at relative residual {res:.3e} after {iterations} iterations"
                )));
            }
            iterations += 1;
            apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            z.iter_mut().zip(r.iter().zip(&diag)).for_each(|(zi, (ri, di))| *zi = ri / di);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    let mut dv = vec![0.0; m];
    matvec(&d, &x, &mut dv);
    let sflat: Vec<f64> = fflat.iter().zip(&dv).map(|(a, b)| a - b).collect();
    // δ_h s = W_v⁻¹ Dᵀ W s, measured in the covector norm
    let mut ws = vec![0.0; m];
    weigh(&wf, &sflat, &mut ws);
    let mut ds = vec![0.0; n];
    matvec(&dt, &ws, &mut ds);
    let delta_s_norm = wv.iter().enumerate().map(|(k, w)| w.inverse().quad([ds[2 * k], ds[2 * k + 1]])).sum::<f64>().sqrt();
    let s: Vec<Sym2<f64>> = sflat.chunks(3).map(|c| Sym2::new(c[0], c[1], c[2])).collect();
    let mut v = vec![[0.0; 2]; grid.nodes()];
    for a in 0..grid.n_r - 1 {
        for b in 0..grid.n_theta {
            let k = grid.node(a, b);
            v[k] = [x[2 * k], x[2 * k + 1]];
        }
    }
    Ok(Decomposition {
        grid,
        f_norm: weighted_norm(&wf, &fflat),
        s_norm: weighted_norm(&wf, &sflat),
        f: fv,
        s,
        v,
        iterations,
        solver_residual: res,
        delta_s_norm,
    })
}

/// Reference 1-form for calibrating a grid: a bump inside `0.6 r_M` with a
/// generic linear part.
pub fn calibration_form(radius: f64) -> BumpOneForm {
    BumpOneForm {
        bump: Bump { center: [0.1 * radius, -0.05 * radius], radius: 0.5 * radius },
        a: [0.3, -0.2],
        b: [[0.5, 1.0], [-0.7, 0.2]],
    }
}

/// Grid floor: relative solenoidal residue `‖s‖/‖f‖` left when decomposing
/// an exact potential tensor sampled on this grid.
pub fn grid_floor(disk: &CdrmDisk, opts: &DecomposeOptions) -> Result<f64> {
    let v0 = calibration_form(disk.radius);
    let f = SymTensorField::analytic(BasePotential { v: v0 });
    Ok(solenoidal_decompose(disk, &f, opts)?.relative_solenoidal())
}

/// Relative defect `|⟨D_h v, f⟩ − ⟨v, δ f⟩| / (‖D_h v‖ ‖f‖)` between the
/// discrete symmetric derivative and the continuum divergence.
pub fn adjointness_defect(disk: &CdrmDisk, v: &impl AnalyticCovector, f: &SymTensorField, opts: &DecomposeOptions) -> Result<f64> {
    let grid = PolarGrid::new(disk.radius, opts.n_r, opts.n_theta)?;
    let base = MetricField::base();
    let d = assemble(&grid, &base);
    let wf = tensor_weights(&grid, &base);
    let delta_f = crate::operators::divergence(&base, f);
    let mut x = vec![0.0; grid.unknowns()];
    let (mut rhs, mut fnorm, mut vnorm_dot) = (0.0, 0.0, 0.0);
    for a in 0..grid.n_r - 1 {
        for b in 0..grid.n_theta {
            let p = grid.point(a, b);
            let k = grid.node(a, b);
            let vv = v.eval(p.x, p.y);
            x[2 * k] = vv[0];
            x[2 * k + 1] = vv[1];
            let df = delta_f.value(p);
            vnorm_dot += grid.area(a) * (vv[0] * df[0] + vv[1] * df[1]);
        }
    }
    let mut dv = vec![0.0; 3 * grid.nodes()];
    matvec(&d, &x, &mut dv);
    let mut lhs = 0.0;
    let mut dvn = 0.0;
    for a in 0..grid.n_r {
        for b in 0..grid.n_theta {
            let k = grid.node(a, b);
            let t = f.value(grid.point(a, b));
            let ft = [t.xx, t.xy, t.yy];
            let w = &wf[k];
            for c in 0..3 {
                for e in 0..3 {
                    lhs += dv[3 * k + c] * w[c][e] * ft[e];
                    dvn += dv[3 * k + c] * w[c][e] * dv[3 * k + e];
                    fnorm += ft[c] * w[c][e] * ft[e];
                }
            }
        }
    }
    rhs += vnorm_dot;
    Ok((lhs - rhs).abs() / (dvn.sqrt() * fnorm.sqrt()))
}
