//! Monte Carlo estimation of average transfer fidelity under static
//! Gaussian disorder, evaluated at a fixed (pre-agreed) transfer time.
//!
//! Realizations are independent: each draws its own seed from the master
//! seed and the (variance index, realization index) pair, so results do not
//! depend on execution order or thread count.

use rayon::prelude::*;

use crate::analytic::{pst_schedule, Family};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hamiltonian::{apply_noise, build, NoiseMode, NoiseSpec, ShiftSpec};
use crate::search::{maximize_fidelity, SearchSettings, TABLE_PST_THRESHOLD};
use crate::spectral::eigendecompose;

/// Window used to locate the unshifted optimum when comparing shifted and
/// unshifted transfer; covers both reference families at small n.
pub const UNSHIFTED_SEARCH_WINDOW: (f64, f64) = (0.0, 8.0);

/// Averaged fidelity as a function of disorder variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub sigma2_grid: Vec<f64>,
    pub mean_fidelity: Vec<f64>,
    /// Standard error of each mean.
    pub std_error: Vec<f64>,
    /// Realizations per grid point.
    pub samples: usize,
    pub mode: NoiseMode,
    /// Fixed evaluation time.
    pub t_eval: f64,
    /// Noiseless fidelity at `t_eval`.
    pub baseline: f64,
    /// Whether the underlying Hamiltonian carries a nonzero shift.
    pub shifted: bool,
}

impl SweepResult {
    /// CSV rows: `mode,shifted,sigma2,mean_fidelity,std_error,samples,t_eval`.
    pub fn csv_header() -> &'static str {
        "mode,shifted,sigma2,mean_fidelity,std_error,samples,t_eval"
    }

    pub fn to_csv_rows(&self) -> String {
        let mode = match self.mode {
            NoiseMode::VertexFrequencies => "vertex",
            NoiseMode::EdgeCouplings => "edge",
        };
        let mut out = String::new();
        for ((s2, mean), err) in self
            .sigma2_grid
            .iter()
            .zip(&self.mean_fidelity)
            .zip(&self.std_error)
        {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                mode,
                self.shifted,
                crate::fmt_float(*s2),
                crate::fmt_float(*mean),
                crate::fmt_float(*err),
                self.samples,
                crate::fmt_float(self.t_eval),
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::csv_header(), self.to_csv_rows())
    }
}

/// Shifted and unshifted sweeps of the same network and disorder mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    pub shifted: SweepResult,
    pub unshifted: SweepResult,
}

impl ComparisonResult {
    pub fn to_csv(&self) -> String {
        format!(
            "{}\n{}{}",
            SweepResult::csv_header(),
            self.shifted.to_csv_rows(),
            self.unshifted.to_csv_rows()
        )
    }
}

/// Linear variance grid with inclusive endpoints.
pub fn linear_sigma2_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![start];
    }
    (0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect()
}

/// Average fidelity between `i` and `j` at time `t_eval` for each variance
/// in the grid, over `samples` disorder realizations per point.
#[allow(clippy::too_many_arguments)]
pub fn average_fidelity_sweep(
    g: &Graph,
    shifts: &ShiftSpec,
    i: usize,
    j: usize,
    mode: NoiseMode,
    sigma2_grid: &[f64],
    samples: usize,
    t_eval: f64,
    seed: u64,
) -> Result<SweepResult> {
    if samples < 1 {
        return Err(Error::InvalidParameter {
            what: format!("samples must be >= 1, got {samples}"),
        });
    }
    if !(t_eval.is_finite() && t_eval > 0.0) {
        return Err(Error::InvalidParameter {
            what: format!("t_eval must be positive, got {t_eval}"),
        });
    }
    if let Some(&bad) = sigma2_grid.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidVariance { variance: bad });
    }

    let h0 = build(g, shifts)?;
    let es0 = eigendecompose(&h0)?;
    let baseline = crate::spectral::fidelity(&es0, i, j, t_eval)?;

    let mut mean_fidelity = Vec::with_capacity(sigma2_grid.len());
    let mut std_error = Vec::with_capacity(sigma2_grid.len());
    for (grid_index, &variance) in sigma2_grid.iter().enumerate() {
        if variance == 0.0 {
            // every realization reproduces the noiseless Hamiltonian exactly
            mean_fidelity.push(baseline);
            std_error.push(0.0);
            continue;
        }
        let values: Result<Vec<f64>> = (0..samples)
            .into_par_iter()
            .map(|r| {
                let spec = NoiseSpec {
                    mode,
                    variance,
                    seed: derive_seed(seed, grid_index as u64, r as u64),
                };
                let noisy = apply_noise(&h0, g, &spec)?;
                let es = eigendecompose(&noisy)?;
                crate::spectral::fidelity(&es, i, j, t_eval)
            })
            .collect();
        let values = values?;
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let err = if values.len() > 1 {
            let ss: f64 = values.iter().map(|f| (f - mean) * (f - mean)).sum();
            (ss / (m * (m - 1.0))).sqrt()
        } else {
            0.0
        };
        mean_fidelity.push(mean);
        std_error.push(err);
    }

    Ok(SweepResult {
        sigma2_grid: sigma2_grid.to_vec(),
        mean_fidelity,
        std_error,
        samples,
        mode,
        t_eval,
        baseline,
        shifted: shifts.any_nonzero(),
    })
}

/// Detect whether `g` is the complete graph or the complete graph missing
/// exactly the `{i, j}` edge.
fn detect_family(g: &Graph, i: usize, j: usize) -> Result<Family> {
    let n = g.vertex_count();
    if i == j {
        return Err(Error::InvalidPair { v: i });
    }
    if *g == Graph::complete(n)? {
        return Ok(Family::Kn);
    }
    if n >= 3 && *g == Graph::complete_minus_edge(n, i, j)? {
        return Ok(Family::KnMinus);
    }
    Err(Error::UnsupportedGraph {
        what: "optimal shift is defined for the complete graph and the complete graph minus the I/O edge".into(),
    })
}

/// Run the disorder sweep twice: once with the optimal shift at its
/// schedule time, once unshifted at the unshifted curve's own located
/// optimum.
pub fn shifted_vs_unshifted_comparison(
    g: &Graph,
    i: usize,
    j: usize,
    mode: NoiseMode,
    sigma2_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ComparisonResult> {
    let family = detect_family(g, i, j)?;
    let n = g.vertex_count();
    let schedule = pst_schedule(family, n)?;

    let shifts = ShiftSpec::io_pair(i, j, schedule.d_e_opt);
    let shifted = average_fidelity_sweep(
        g,
        &shifts,
        i,
        j,
        mode,
        sigma2_grid,
        samples,
        schedule.time(0),
        derive_seed(seed, 0, 0),
    )?;

    let es0 = eigendecompose(&build(g, &ShiftSpec::none())?)?;
    let located = maximize_fidelity(
        &es0,
        i,
        j,
        &SearchSettings {
            window: UNSHIFTED_SEARCH_WINDOW,
            grid_points: crate::search::TABLE_GRID_POINTS,
            pst_threshold: TABLE_PST_THRESHOLD,
        },
    )?;
    let unshifted = average_fidelity_sweep(
        g,
        &ShiftSpec::none(),
        i,
        j,
        mode,
        sigma2_grid,
        samples,
        located.t_star,
        derive_seed(seed, 1, 0),
    )?;

    Ok(ComparisonResult { shifted, unshifted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_grid_reproduces_baseline() {
        let g = Graph::complete(5).unwrap();
        let shifts = ShiftSpec::io_pair(0, 4, 10.0);
        let t = pst_schedule(Family::Kn, 5).unwrap().time(0);
        for mode in [NoiseMode::VertexFrequencies, NoiseMode::EdgeCouplings] {
            let sweep =
                average_fidelity_sweep(&g, &shifts, 0, 4, mode, &[0.0], 50, t, 7).unwrap();
            assert_eq!(sweep.mean_fidelity, vec![sweep.baseline]);
            assert_eq!(sweep.std_error, vec![0.0]);
            assert!(sweep.shifted);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let g = Graph::complete(4).unwrap();
        let shifts = ShiftSpec::io_pair(0, 3, 8.0);
        let grid = [0.0, 0.5, 1.0];
        let a = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::EdgeCouplings,
            &grid,
            64,
            0.5,
            99,
        )
        .unwrap();
        let b = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::EdgeCouplings,
            &grid,
            64,
            0.5,
            99,
        )
        .unwrap();
        assert_eq!(a, b);

        let c = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::EdgeCouplings,
            &grid,
            64,
            0.5,
            100,
        )
        .unwrap();
        assert_ne!(a.mean_fidelity, c.mean_fidelity);
    }

    #[test]
    fn standard_error_scales_with_sample_count() {
        let g = Graph::complete(5).unwrap();
        let shifts = ShiftSpec::io_pair(0, 4, 10.0);
        let t = pst_schedule(Family::Kn, 5).unwrap().time(0);
        let small = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            4,
            NoiseMode::VertexFrequencies,
            &[1.0],
            500,
            t,
            11,
        )
        .unwrap();
        let large = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            4,
            NoiseMode::VertexFrequencies,
            &[1.0],
            2000,
            t,
            11,
        )
        .unwrap();
        // quadrupling the sample count should halve the standard error
        let ratio = small.std_error[0] / large.std_error[0];
        assert!(
            (ratio - 2.0).abs() < 0.4,
            "std error ratio {ratio} not ~2"
        );
    }

    #[test]
    fn means_stay_in_unit_interval() {
        let g = Graph::complete_minus_edge(5, 0, 4).unwrap();
        let shifts = ShiftSpec::io_pair(0, 4, 4.0);
        let sweep = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            4,
            NoiseMode::EdgeCouplings,
            &linear_sigma2_grid(0.0, 2.0, 5),
            200,
            0.64,
            3,
        )
        .unwrap();
        for (mean, err) in sweep.mean_fidelity.iter().zip(&sweep.std_error) {
            assert!((0.0..=1.0).contains(mean));
            assert!(*err >= 0.0);
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let g = Graph::complete(4).unwrap();
        let shifts = ShiftSpec::none();
        assert!(matches!(
            average_fidelity_sweep(
                &g,
                &shifts,
                0,
                3,
                NoiseMode::VertexFrequencies,
                &[-0.5],
                10,
                1.0,
                0
            ),
            Err(Error::InvalidVariance { .. })
        ));
        assert!(average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::VertexFrequencies,
            &[0.5],
            0,
            1.0,
            0
        )
        .is_err());
        assert!(average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::VertexFrequencies,
            &[0.5],
            10,
            0.0,
            0
        )
        .is_err());
    }

    #[test]
    fn comparison_baselines_match_transfer_structure() {
        let g = Graph::complete(5).unwrap();
        let cmp = shifted_vs_unshifted_comparison(
            &g,
            0,
            4,
            NoiseMode::VertexFrequencies,
            &[0.0],
            20,
            5,
        )
        .unwrap();
        // the shifted network transfers perfectly; the unshifted one cannot
        assert!(cmp.shifted.baseline > 1.0 - 1e-9);
        assert!(cmp.unshifted.baseline < 0.2);
        assert!(cmp.shifted.shifted);
        assert!(!cmp.unshifted.shifted);

        // unshifted missing-link network still transfers almost perfectly
        let g = Graph::complete_minus_edge(5, 0, 4).unwrap();
        let cmp = shifted_vs_unshifted_comparison(
            &g,
            0,
            4,
            NoiseMode::VertexFrequencies,
            &[0.0],
            20,
            5,
        )
        .unwrap();
        assert!(cmp.shifted.baseline > 1.0 - 1e-9);
        // the unshifted missing-link curve tops out at 0.99861 in [0, 8]
        assert!(cmp.unshifted.baseline > 0.998);
    }

    #[test]
    fn optimal_shift_degrades_significantly_under_noise() {
        // mean fidelity at variance 2 sits at least five combined standard
        // errors below the variance-0 value, in both disorder modes
        let g = Graph::complete(5).unwrap();
        let shifts = ShiftSpec::io_pair(0, 4, 10.0);
        let t = pst_schedule(Family::Kn, 5).unwrap().time(0);
        for mode in [NoiseMode::VertexFrequencies, NoiseMode::EdgeCouplings] {
            let sweep =
                average_fidelity_sweep(&g, &shifts, 0, 4, mode, &[0.0, 2.0], 2000, t, 40)
                    .unwrap();
            let combined = (sweep.std_error[0].powi(2) + sweep.std_error[1].powi(2)).sqrt();
            assert!(
                sweep.mean_fidelity[1] < sweep.mean_fidelity[0] - 5.0 * combined,
                "{mode:?}: {} vs {} (5 sigma = {})",
                sweep.mean_fidelity[1],
                sweep.mean_fidelity[0],
                5.0 * combined
            );
        }
    }

    #[test]
    fn comparison_rejects_other_graphs() {
        let g = Graph::path(5).unwrap();
        assert!(matches!(
            shifted_vs_unshifted_comparison(
                &g,
                0,
                4,
                NoiseMode::VertexFrequencies,
                &[0.0],
                10,
                0
            ),
            Err(Error::UnsupportedGraph { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let g = Graph::complete(4).unwrap();
        let shifts = ShiftSpec::io_pair(0, 3, 8.0);
        let sweep = average_fidelity_sweep(
            &g,
            &shifts,
            0,
            3,
            NoiseMode::VertexFrequencies,
            &[0.0, 1.0],
            8,
            0.7,
            1,
        )
        .unwrap();
        let csv = sweep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SweepResult::csv_header());
        assert!(lines.next().unwrap().starts_with("vertex,true,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
