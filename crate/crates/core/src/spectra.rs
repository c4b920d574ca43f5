//! Level diagrams, avoided crossings and adiabaticity parameters.

use crate::error::{Error, Result};
use crate::model::BiasSchedule;
use crate::par::{self, ExecMode};
use crate::qmath::{hermitian_eigenvalues, ComplexMatrix};

/// Eigenvalues on a uniform bias grid, ascending within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDiagram {
    pub f_values: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
}

impl LevelDiagram {
    pub fn n_levels(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    /// `E_upper − E_lower` at every grid point.
    pub fn gaps(&self, lower: usize, upper: usize) -> Vec<f64> {
        self.levels.iter().map(|row| row[upper] - row[lower]).collect()
    }

    /// Largest change of any level between neighbouring grid points.
    pub fn max_row_jump(&self) -> f64 {
        self.levels
            .windows(2)
            .flat_map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

pub fn eigen_sweep<B>(builder: B, f_range: (f64, f64), steps: usize) -> Result<LevelDiagram>
where
    B: Fn(f64) -> ComplexMatrix + Sync + Send,
{
    eigen_sweep_with(ExecMode::default(), builder, f_range, steps)
}

/// [`eigen_sweep`] with an explicit execution mode. Rows are assembled in
/// grid order regardless of mode.
pub fn eigen_sweep_with<B>(mode: ExecMode, builder: B, f_range: (f64, f64), steps: usize) -> Result<LevelDiagram>
where
    B: Fn(f64) -> ComplexMatrix + Sync + Send,
{
    if steps < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 grid points, got {steps}")));
    }
    let (lo, hi) = f_range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidArgument(format!("bad bias range [{lo}, {hi}]")));
    }
    let f_values: Vec<f64> = (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect();
    let levels = par::map_with(mode, &f_values, |&f| hermitian_eigenvalues(&builder(f)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelDiagram { f_values, levels, labels: None })
}

/// A located minimum of the splitting between two levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub f_res: f64,
    pub gap: f64,
    pub levels: (usize, usize),
}

fn pair_gap<B: Fn(f64) -> ComplexMatrix>(builder: &B, f: f64, (lo, up): (usize, usize)) -> Result<f64> {
    let ev = hermitian_eigenvalues(&builder(f))?;
    Ok(ev[up] - ev[lo])
}

/// Golden-section minimisation of `g` on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, tol: f64, mut g: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut gc = g(c)?;
    let mut gd = g(d)?;
    while (b - a).abs() > tol {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, g(x)?))
}

/// Bias resolution of located resonances.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Local minima of the `pair` splitting on the grid, refined on the
/// continuous builder.
pub fn find_avoided_crossings<B>(diagram: &LevelDiagram, builder: B, pair: (usize, usize)) -> Result<Vec<Resonance>>
where
    B: Fn(f64) -> ComplexMatrix,
{
    let (lo, up) = pair;
    if diagram.levels.len() < 3 {
        return Err(Error::InvalidArgument("diagram needs at least 3 rows".into()));
    }
    if lo >= up || up >= diagram.n_levels() {
        return Err(Error::InvalidArgument(format!("bad level pair ({lo}, {up})")));
    }
    let g = diagram.gaps(lo, up);
    let f = &diagram.f_values;
    let mut out = Vec::new();
    for k in 1..g.len() - 1 {
        if g[k] <= g[k - 1] && g[k] < g[k + 1] {
            let (f_res, gap) = golden_min(f[k - 1], f[k + 1], RESONANCE_TOL, |x| pair_gap(&builder, x, pair))?;
            out.push(Resonance { f_res, gap: gap.max(0.0), levels: pair });
        }
    }
    if out.is_empty() {
        return Err(Error::NoMinimumFound { lower: lo, upper: up });
    }
    Ok(out)
}

/// Closed-form adiabaticity estimates for the coupled double wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaEstimate {
    /// Direct tunnelling crossings (A and C): `4ω²/|ḟ|`.
    Direct { omega: f64 },
    /// Second-order crossing (B): `2ω⁴/(λ²|ḟ|)`.
    SecondOrder { omega: f64, lambda: f64 },
}

impl GammaEstimate {
    pub fn value(&self, fdot: f64) -> f64 {
        match *self {
            GammaEstimate::Direct { omega } => 4.0 * omega * omega / fdot.abs(),
            GammaEstimate::SecondOrder { omega, lambda } => 2.0 * omega.powi(4) / (lambda * lambda * fdot.abs()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adiabaticity {
    pub gamma_numeric: f64,
    pub gamma_estimate: f64,
    /// `γ > 1`.
    pub adiabatic: bool,
}

/// `γ = |Δk² / (d/dt)√(Δk² − Δk_res²)|` at the resonance.
///
/// The derivative is singular exactly at resonance; it is taken as the mean
/// of the left and right one-sided differences in `f`, times `|ḟ|`.
pub fn adiabaticity_gamma<B>(
    builder: B,
    schedule: &BiasSchedule,
    resonance: &Resonance,
    estimate: GammaEstimate,
) -> Result<Adiabaticity>
where
    B: Fn(f64) -> ComplexMatrix,
{
    let g0 = resonance.gap;
    if g0 < 1e-12 {
        return Err(Error::DegenerateGap { gap: g0 });
    }
    let t_res = schedule.time_of(resonance.f_res).ok_or_else(|| {
        Error::InvalidArgument(format!("schedule never reaches the resonance at f = {}", resonance.f_res))
    })?;
    let fdot = schedule.eval(t_res).1;
    if fdot == 0.0 {
        return Err(Error::InvalidArgument("bias is stationary at the resonance".into()));
    }
    let df = 1e-3 * g0;
    let s = |f: f64| -> Result<f64> {
        let g = pair_gap(&builder, f, resonance.levels)?;
        Ok((g * g - g0 * g0).max(0.0).sqrt())
    };
    let left = s(resonance.f_res - df)? / df;
    let right = s(resonance.f_res + df)? / df;
    let slope = 0.5 * (left + right) * fdot.abs();
    let gamma_numeric = g0 * g0 / slope;
    Ok(Adiabaticity { gamma_numeric, gamma_estimate: estimate.value(fdot), adiabatic: gamma_numeric > 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h2_sym, build_h3_sym, h2_singlet_energy, h2_family, hn_sym_family};

    const OMEGA: f64 = 0.05;

    fn h2s(f: f64) -> ComplexMatrix {
        build_h2_sym(OMEGA, 1.0, f)
    }

    #[test]
    fn h2_sym_diagram_shape() {
        let d = eigen_sweep(h2s, (-2.0, 2.0), 801).unwrap();
        assert_eq!(d.levels.len(), 801);
        assert!(d.levels.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1])));
        // Far from the crossings the extreme branches have slope ±2.
        let k = |f: f64| ((f + 2.0) / 4.0 * 800.0).round() as usize;
        let slope_top_left = (d.levels[k(-1.9)][2] - d.levels[k(-1.8)][2]) / -0.1;
        let slope_bottom_left = (d.levels[k(-1.8)][0] - d.levels[k(-1.9)][0]) / 0.1;
        assert!((slope_top_left + 2.0).abs() < 0.01);
        assert!((slope_bottom_left - 2.0).abs() < 0.01);
        // Ψ⁺ branch flat near −λ in the middle of the plateau.
        assert!((d.levels[k(0.0)][0] + 1.0).abs() < 2.0 * OMEGA * OMEGA);
        assert_eq!(h2_singlet_energy(OMEGA, 1.0, 0.3), -1.0);
    }

    #[test]
    fn lipschitz_continuity_of_levels() {
        let d = eigen_sweep(h2s, (-2.0, 2.0), 801).unwrap();
        let fam = hn_sym_family(2, OMEGA, 1.0).unwrap();
        let bound = fam.slope_norm() * (4.0 / 800.0) * 1.5;
        assert!(d.max_row_jump() <= bound);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = eigen_sweep_with(ExecMode::Sequential, h2s, (-2.0, 2.0), 101).unwrap();
        let b = eigen_sweep_with(ExecMode::Parallel, h2s, (-2.0, 2.0), 101).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn crossings_a_and_c() {
        let d = eigen_sweep(h2s, (-2.0, 2.0), 801).unwrap();
        // Ψ⁺ meets |11⟩ at A and |00⟩ at C, both on the lowest pair.
        let res = find_avoided_crossings(&d, h2s, (0, 1)).unwrap();
        assert_eq!(res.len(), 2);
        let (a, c) = (&res[0], &res[1]);
        let oracle = 2.0 * 2f64.sqrt() * OMEGA;
        for r in [a, c] {
            assert!((r.f_res.abs() - 1.0).abs() < 1e-3, "{r:?}");
            assert!((r.gap - oracle).abs() < 0.05 * oracle, "{r:?}");
        }
        assert!((a.gap - c.gap).abs() < 1e-9);
    }

    #[test]
    fn crossing_b_is_second_order() {
        let d = eigen_sweep(h2s, (-0.5, 0.5), 201).unwrap();
        let b = find_avoided_crossings(&d, h2s, (1, 2)).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].f_res.abs() < 1e-6);
        // effective |11⟩–|00⟩ coupling ω²/λ through the virtual Ψ⁺ level
        let oracle = 2.0 * OMEGA * OMEGA;
        assert!((b[0].gap - oracle).abs() < 0.05 * oracle, "{:?}", b[0]);
    }

    #[test]
    fn exact_crossings_without_tunnelling() {
        let h = |f| build_h2_sym(0.0, 1.0, f);
        let d = eigen_sweep(h, (-2.0, 2.0), 401).unwrap();
        let a = find_avoided_crossings(&d, h, (0, 1)).unwrap();
        assert!(a.iter().any(|r| (r.f_res + 1.0).abs() < 1e-6 && r.gap < 1e-6));
        let exact = Resonance { f_res: -1.0, gap: pair_gap(&h, -1.0, (0, 1)).unwrap(), levels: (0, 1) };
        assert_eq!(exact.gap, 0.0);
        assert!(matches!(
            adiabaticity_gamma(h, &BiasSchedule::linear(-2.0, 1e-3), &exact, GammaEstimate::Direct { omega: 0.0 }),
            Err(Error::DegenerateGap { .. })
        ));
    }

    #[test]
    fn crossing_location_converges_as_omega_vanishes() {
        let mut prev = f64::INFINITY;
        for omega in [0.1, 0.05, 0.025, 0.0125] {
            let h = move |f| build_h2_sym(omega, 1.0, f);
            let d = eigen_sweep(h, (-2.0, 0.0), 201).unwrap();
            let r = find_avoided_crossings(&d, h, (0, 1)).unwrap()[0];
            let err = (r.f_res + 1.0).abs();
            assert!(err <= prev * 0.26 + 1e-9 || err < 1e-8, "omega {omega}: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn h3_sym_resonances() {
        let h = |f| build_h3_sym(OMEGA, 1.0, f);
        let d = eigen_sweep(h, (-3.0, 3.0), 601).unwrap();
        let r = find_avoided_crossings(&d, h, (0, 1)).unwrap();
        let mut fs: Vec<f64> = r.iter().map(|r| r.f_res).collect();
        fs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(fs.len(), 3, "{fs:?}");
        for (f, target) in fs.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((f - target).abs() < 1e-2);
        }
        // no level crossings anywhere on the grid
        assert!(d.levels.iter().all(|row| row.windows(2).all(|w| w[1] - w[0] > 1e-6)));
    }

    #[test]
    fn monotone_gap_has_no_minimum() {
        let h = |f: f64| ComplexMatrix::from_real_diag(&[0.0, f + 10.0]);
        let d = eigen_sweep(h, (0.0, 1.0), 11).unwrap();
        assert!(matches!(find_avoided_crossings(&d, h, (0, 1)), Err(Error::NoMinimumFound { .. })));
        assert!(eigen_sweep(h, (0.0, 1.0), 2).is_err());
    }

    #[test]
    fn gamma_estimates_at_fig2_rate() {
        let fdot = 1.0 / 2000.0;
        assert!((GammaEstimate::Direct { omega: OMEGA }.value(fdot) - 20.0).abs() < 1e-12);
        assert!((GammaEstimate::SecondOrder { omega: OMEGA, lambda: 1.0 }.value(fdot) - 0.025).abs() < 1e-15);
    }

    #[test]
    fn numeric_gamma_tracks_estimate_at_a_and_c() {
        for (omega, fdot) in [(0.05, 1.0 / 2000.0), (0.02, 1e-4), (0.08, 5e-3)] {
            let h = move |f| build_h2_sym(omega, 1.0, f);
            let schedule = BiasSchedule::linear(-2.0, fdot);
            let d = eigen_sweep(h, (-2.0, 2.0), 801).unwrap();
            let res = find_avoided_crossings(&d, h, (0, 1)).unwrap();
            assert_eq!(res.len(), 2);
            for r in res {
                let g = adiabaticity_gamma(h, &schedule, &r, GammaEstimate::Direct { omega }).unwrap();
                let ratio = g.gamma_numeric / g.gamma_estimate;
                assert!((0.5..=2.0).contains(&ratio), "ω={omega}: {g:?}");
            }
        }
    }

    #[test]
    fn full_and_sym_gap_agree_at_a() {
        let fam = h2_family(OMEGA, 1.0);
        let h = |f| fam.at(f);
        let d = eigen_sweep(h, (-1.5, -0.5), 101).unwrap();
        // Levels of the full 4x4 at f ≈ −1: |11⟩, Ψ⁺ and Ψ⁻ all near −1; the
        // avoided pair is lowest and the level just above the singlet.
        let r = find_avoided_crossings(&d, h, (0, 2)).unwrap();
        assert!((r[0].gap - 2.0 * 2f64.sqrt() * OMEGA).abs() < 0.05 * 2.0 * 2f64.sqrt() * OMEGA);
    }
}
