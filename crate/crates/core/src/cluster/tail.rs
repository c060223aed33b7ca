use serde::Serialize;

use crate::error::{Error, Result};

/// Graph-class and model constants entering the tail bound on `|L_{D,≥k}|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBoundInputs {
    pub n: usize,
    pub d: usize,
    pub kappa: f64,
    pub delta2: f64,
    pub lambda: f64,
    pub q: f64,
    pub epsilon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `k ≤ d/ln ln d`.
    Small,
    /// `k ≤ d³ ln n`.
    Medium,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub k: usize,
    pub regime: Regime,
    pub g_tilde: f64,
    pub qualifies: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum K0Variant {
    /// Target `ε/16` for `|Ξ_D - L_{D,<k₀}|`.
    PartitionFunction,
    /// Target built from `ε' = ε²/(160 n²)` for the restricted models.
    Restricted,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct K0Selection {
    pub variant: K0Variant,
    pub k0: usize,
    /// `g̃(k₀)` must reach this.
    pub threshold: f64,
    pub candidates: Vec<Candidate>,
    /// False when no candidate satisfies the tail condition and `k0` is the
    /// largest candidate instead.
    pub certified: bool,
}

impl TailBoundInputs {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.n == 0 || self.d == 0 {
            return bad("n and d must be positive");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.lambda > 0.0) || !(0.0..=1.0).contains(&self.q) {
            return bad("need lambda > 0 and q in [0, 1]");
        }
        if !self.kappa.is_finite() || !self.delta2.is_finite() {
            return bad("kappa and delta2 must be finite");
        }
        Ok(())
    }

    /// `α̃ = (1+λ)/(1+λq)`.
    pub fn alpha_tilde(&self) -> f64 {
        (1.0 + self.lambda) / (1.0 + self.lambda * self.q)
    }

    fn d(&self) -> f64 {
        self.d as f64
    }

    fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    fn d_pow(&self) -> f64 {
        self.d().powf(self.kappa + 1.0)
    }

    pub fn regime(&self, k: usize) -> Regime {
        let k = k as f64;
        let lnln = self.d().ln().ln();
        // For d ≤ 2 the first boundary is not positive and the regime is empty.
        if lnln > 0.0 && k <= self.d() / lnln {
            Regime::Small
        } else if k <= self.d().powi(3) * self.ln_n() {
            Regime::Medium
        } else {
            Regime::Large
        }
    }

    /// `g̃(k)` with `|L_{D,≥k}| ≤ n d^{-(κ+1)} e^{-g̃(k)}`.
    pub fn g_tilde(&self, k: usize) -> f64 {
        let kf = k as f64;
        let d = self.d();
        let ln_alpha = self.alpha_tilde().ln();
        match self.regime(k) {
            Regime::Small => (d * kf - self.delta2 * kf * kf) * ln_alpha - (self.kappa + 7.0) * kf * d.ln(),
            Regime::Medium => d.sqrt() * kf / 2.0 * ln_alpha,
            Regime::Large => kf / self.d_pow(),
        }
    }

    /// `|L_{D,≥k}|` bound; zero for `n = 0` is impossible after validation.
    pub fn tail_bound(&self, k: usize) -> f64 {
        self.n as f64 / self.d_pow() * (-self.g_tilde(k)).exp()
    }

    /// `ε₀ = exp(-n/(d^{κ+4} ln d))`.
    pub fn epsilon0(&self) -> f64 {
        let d = self.d();
        (-(self.n as f64) / (d.powf(self.kappa + 4.0) * d.ln())).exp()
    }

    /// `ε' = ε²/(160 n²)`.
    pub fn epsilon_restricted(&self) -> f64 {
        self.epsilon * self.epsilon / (160.0 * (self.n as f64).powi(2))
    }

    fn log_target(&self, variant: K0Variant) -> f64 {
        let n = self.n as f64;
        match variant {
            K0Variant::PartitionFunction => (16.0 * n / (self.epsilon * self.d_pow())).ln(),
            K0Variant::Restricted => (160.0 * n.powi(3) / (self.epsilon * self.epsilon * self.d_pow())).ln(),
        }
    }

    /// Candidates `⌊d³ ln n⌋`, `⌊d³ ln n + 1⌋` and `⌈d^{κ+1} ln(target)⌉`.
    pub fn k0_candidates(&self, variant: K0Variant) -> Vec<usize> {
        let base = self.d().powi(3) * self.ln_n();
        let third = (self.d_pow() * self.log_target(variant)).ceil();
        let mut ks: Vec<usize> = [base.floor(), (base + 1.0).floor(), third]
            .iter()
            .map(|&x| if x.is_finite() && x >= 1.0 { x as usize } else { 1 })
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// The smallest candidate with `g̃(k) ≥ ln(target)`, or the largest one
    /// uncertified. A candidate with negative `g̃` never qualifies.
    pub fn select_k0(&self, variant: K0Variant) -> Result<K0Selection> {
        self.validate()?;
        let threshold = self.log_target(variant);
        let candidates: Vec<Candidate> = self
            .k0_candidates(variant)
            .into_iter()
            .map(|k| {
                let g = self.g_tilde(k);
                Candidate {
                    k,
                    regime: self.regime(k),
                    g_tilde: g,
                    qualifies: g >= 0.0 && g >= threshold,
                }
            })
            .collect();
        let (k0, certified) = match candidates.iter().find(|c| c.qualifies) {
            Some(c) => (c.k, true),
            None => (candidates.last().expect("three candidates").k, false),
        };
        Ok(K0Selection {
            variant,
            k0,
            threshold,
            candidates,
            certified,
        })
    }
}
