//! Validation reports for phases and dispersive families.
//!
//! Every bound in a report is the exact extremum over the recorded
//! sample set; rerunning with the same seed reproduces it bit for bit.
//! Reports serialize to flat `key=value` lines consumed by the CLI.

use std::collections::BTreeMap;

use serde::Serialize;

/// An observed `(min, max)` window over the sample set, the artifact's
/// stand-in for a comparability claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub min: f64,
    pub max: f64,
}

impl Window {
    pub fn empty() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn absorb(&mut self, v: f64) {
        if v < self.min {
            self.min = v;
        }
        if v > self.max {
            self.max = v;
        }
    }
}

/// Outcome of [`super::validate_phase`].
#[derive(Debug, Clone, Serialize)]
pub struct PhaseReport {
    pub phase_name: String,
    pub dimension: usize,
    pub sample_budget: usize,
    pub seed: u64,
    /// Worst distance of `phi(x + e_j, xi) - phi(x, xi)` from the
    /// nearest integer over lattice frequencies.
    pub periodicity_defect: f64,
    pub periodicity_ok: bool,
    /// Worst relative homogeneity defect over lambda in {2, 3, 7.5}.
    pub homogeneity_defect: f64,
    /// `min |det d_x d_xi phi|` over samples.
    pub det_lower_bound: f64,
    /// Window of `<grad_xi phi>`.
    pub grad_xi_comparability: Window,
    /// Window of `<grad_x phi> / <xi>`.
    pub grad_x_comparability: Window,
    /// `min |grad_x phi(x, xi) - grad_x phi(x, xi')| / |xi - xi'|`
    /// over sampled lattice pairs.
    pub separation_constant: f64,
    /// `sup |d_{x_i} d_{xi_j} phi|` per matrix entry, keyed "i,j".
    pub derivative_seminorms: BTreeMap<String, f64>,
    /// Ceiling used for the spatial-derivative growth check.
    pub alpha_ceiling: usize,
    /// `sup |d_y^alpha phi| / |xi|` per |alpha| = 1..=ceiling.
    pub grad_growth: BTreeMap<String, f64>,
}

pub const PERIODICITY_TOLERANCE: f64 = 1e-8;

impl PhaseReport {
    /// Flat key=value rendering, one line per bound.
    pub fn to_kv_lines(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("phase", self.phase_name.clone());
        push("dimension", self.dimension.to_string());
        push("sample_budget", self.sample_budget.to_string());
        push("seed", self.seed.to_string());
        push("periodicity_defect", fmt(self.periodicity_defect));
        push("periodicity_ok", self.periodicity_ok.to_string());
        push("homogeneity_defect", fmt(self.homogeneity_defect));
        push("det_lower_bound", fmt(self.det_lower_bound));
        push("grad_xi_min", fmt(self.grad_xi_comparability.min));
        push("grad_xi_max", fmt(self.grad_xi_comparability.max));
        push("grad_x_over_xi_min", fmt(self.grad_x_comparability.min));
        push("grad_x_over_xi_max", fmt(self.grad_x_comparability.max));
        push("separation_constant", fmt(self.separation_constant));
        for (k, v) in &self.derivative_seminorms {
            push(&format!("mixed_seminorm_{k}"), fmt(*v));
        }
        push("alpha_ceiling", self.alpha_ceiling.to_string());
        for (k, v) in &self.grad_growth {
            push(&format!("grad_growth_{k}"), fmt(*v));
        }
        out
    }
}

/// Per-time slice of a dispersive validation.
#[derive(Debug, Clone, Serialize)]
pub struct DispersiveReportSlice {
    pub t: f64,
    /// `min |det(I + t d_x d_xi phi(t, x, xi))|` over samples.
    pub min_det: f64,
    /// `sup |d_x^beta d_xi^alpha phi| * t^{|beta|}` keyed "a|b".
    pub phase_decay: BTreeMap<String, f64>,
    /// `sup |Delta_xi^alpha d_x^beta a| * t^{|beta|}` keyed "a|b".
    pub symbol_decay: BTreeMap<String, f64>,
    /// Largest `|a(t, x, xi)|` found where `t |xi| < C`; zero when the
    /// support hypothesis holds exactly.
    pub support_defect: f64,
    pub support_ok: bool,
}

/// Outcome of [`super::validate_dispersive`].
#[derive(Debug, Clone, Serialize)]
pub struct DispersivePhaseReport {
    pub phase_name: String,
    pub symbol_name: String,
    pub seed: u64,
    pub ceiling: usize,
    pub slices: Vec<DispersiveReportSlice>,
}

impl DispersivePhaseReport {
    pub fn to_kv_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("phase={}\n", self.phase_name));
        out.push_str(&format!("symbol={}\n", self.symbol_name));
        out.push_str(&format!("seed={}\n", self.seed));
        out.push_str(&format!("ceiling={}\n", self.ceiling));
        for s in &self.slices {
            out.push_str(&format!("t={}\n", fmt(s.t)));
            out.push_str(&format!("min_det={}\n", fmt(s.min_det)));
            for (k, v) in &s.phase_decay {
                out.push_str(&format!("phase_decay_{k}={}\n", fmt(*v)));
            }
            for (k, v) in &s.symbol_decay {
                out.push_str(&format!("symbol_decay_{k}={}\n", fmt(*v)));
            }
            out.push_str(&format!("support_defect={}\n", fmt(s.support_defect)));
            out.push_str(&format!("support_ok={}\n", s.support_ok));
        }
        out
    }

    /// The uniform extremes over the t-grid.
    pub fn worst_min_det(&self) -> f64 {
        self.slices
            .iter()
            .map(|s| s.min_det)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_symbol_decay(&self) -> f64 {
        self.slices
            .iter()
            .flat_map(|s| s.symbol_decay.values().copied())
            .fold(0.0, f64::max)
    }

    pub fn support_ok(&self) -> bool {
        self.slices.iter().all(|s| s.support_ok)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}
