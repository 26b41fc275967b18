//! Named simulation scenarios.
//!
//! Each scenario fixes a lattice, a spatial layout of the true signal
//! frequency (dense blocks over a sparse background), and which parameter its
//! default sweep varies: the signal strength `mu` or the in-block signal
//! frequency `pi`.

use straw_core::lattice::Lattice;
use straw_core::sparsity::{KernelFamily, KernelSpec};

/// Background signal frequency outside the dense blocks.
pub const BACKGROUND_PI: f64 = 0.01;

/// The named scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// 1D, 5000 sites, four dense blocks; sweeps `mu`.
    S1,
    /// Same layout as S1; sweeps `pi`.
    S2,
    /// 2D 80x80, square plus disk; sweeps `mu`.
    S3,
    /// Same layout as S3; sweeps `pi`.
    S4,
    /// 3D 20x20x25, one dense box; sweeps `mu`.
    S5,
    /// Same layout as S5; sweeps `pi`.
    S6,
    /// 1D, 5000 sites, no signals anywhere.
    Null,
}

/// Which parameter a scenario's default sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Mu,
    Pi,
    /// No sweep (the null scenario).
    Fixed,
}

/// A fully resolved scenario: lattice, parameters, and the true per-site
/// signal frequency.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Signal strength (mean shift of non-null statistics).
    pub mu: f64,
    /// In-block signal frequency.
    pub pi_signal: f64,
    pub lattice: Lattice,
    /// True signal frequency per site, in row-major site order (unclamped:
    /// the null scenario really is 0 everywhere).
    pub signal_prob: Vec<f64>,
}

impl ScenarioConfig {
    /// The value of the scenario's sweep parameter in this configuration.
    pub fn sweep_value(&self) -> f64 {
        match self.kind.sweep_axis() {
            SweepAxis::Mu => self.mu,
            SweepAxis::Pi => self.pi_signal,
            SweepAxis::Fixed => 0.0,
        }
    }
}

impl ScenarioKind {
    /// Parses a scenario name (case-insensitive): `s1`..`s6` or `null`.
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "s1" => Some(ScenarioKind::S1),
            "s2" => Some(ScenarioKind::S2),
            "s3" => Some(ScenarioKind::S3),
            "s4" => Some(ScenarioKind::S4),
            "s5" => Some(ScenarioKind::S5),
            "s6" => Some(ScenarioKind::S6),
            "null" => Some(ScenarioKind::Null),
            _ => None,
        }
    }

    /// Lowercase scenario name.
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::S1 => "s1",
            ScenarioKind::S2 => "s2",
            ScenarioKind::S3 => "s3",
            ScenarioKind::S4 => "s4",
            ScenarioKind::S5 => "s5",
            ScenarioKind::S6 => "s6",
            ScenarioKind::Null => "null",
        }
    }

    /// The scenario's lattice.
    pub fn lattice(self) -> Lattice {
        match self {
            ScenarioKind::S1 | ScenarioKind::S2 | ScenarioKind::Null => {
                Lattice::new(&[5000]).expect("fixed extents are valid")
            }
            ScenarioKind::S3 | ScenarioKind::S4 => {
                Lattice::new(&[80, 80]).expect("fixed extents are valid")
            }
            ScenarioKind::S5 | ScenarioKind::S6 => {
                Lattice::new(&[20, 20, 25]).expect("fixed extents are valid")
            }
        }
    }

    /// Which parameter the default sweep varies.
    pub fn sweep_axis(self) -> SweepAxis {
        match self {
            ScenarioKind::S1 | ScenarioKind::S3 | ScenarioKind::S5 => SweepAxis::Mu,
            ScenarioKind::S2 | ScenarioKind::S4 | ScenarioKind::S6 => SweepAxis::Pi,
            ScenarioKind::Null => SweepAxis::Fixed,
        }
    }

    /// Default sweep values: `mu` in 1.5..=2.0 step 0.1, or `pi` in
    /// 0.4..=0.6 step 0.05. The null scenario has a single trivial point.
    pub fn default_sweep(self) -> Vec<f64> {
        match self.sweep_axis() {
            SweepAxis::Mu => (0..=5).map(|i| 1.5 + 0.1 * i as f64).collect(),
            SweepAxis::Pi => (0..=4).map(|i| 0.4 + 0.05 * i as f64).collect(),
            SweepAxis::Fixed => vec![0.0],
        }
    }

    /// Step between default sweep values (0 for the null scenario).
    pub fn default_sweep_step(self) -> f64 {
        match self.sweep_axis() {
            SweepAxis::Mu => 0.1,
            SweepAxis::Pi => 0.05,
            SweepAxis::Fixed => 0.0,
        }
    }

    /// Default signal strength when not swept or overridden.
    pub fn default_mu(self) -> f64 {
        if self == ScenarioKind::Null {
            0.0
        } else {
            2.0
        }
    }

    /// Default in-block signal frequency when not swept or overridden.
    pub fn default_pi(self) -> f64 {
        0.6
    }

    /// Smoothing kernel sized to the scenario's signal blocks: bandwidth
    /// about a fifth of the block span, truncation at three bandwidths.
    /// Explicit --bandwidth/--truncation flags override this.
    pub fn default_kernel(self) -> KernelSpec {
        let (bandwidth, truncation) = match self {
            // 1D blocks span 200 sites.
            ScenarioKind::S1 | ScenarioKind::S2 => (40.0, 120.0),
            // 2D blocks span ~15 sites per side; a slightly wider neighborhood
            // pools enough sites to keep the data-driven methods calibrated.
            ScenarioKind::S3 | ScenarioKind::S4 => (5.0, 15.0),
            // 3D blocks span 10 sites per side.
            ScenarioKind::S5 | ScenarioKind::S6 => (2.0, 6.0),
            // No signal structure to adapt to: pool almost globally, so the
            // estimate approaches a constant field and the weighted methods
            // behave like their unweighted counterparts.
            ScenarioKind::Null => (300.0, 900.0),
        };
        KernelSpec::new(KernelFamily::Gaussian, bandwidth, truncation)
            .expect("fixed kernel parameters are valid")
    }

    /// Resolves the scenario at explicit parameter values.
    pub fn config(self, mu: f64, pi_signal: f64) -> ScenarioConfig {
        let lattice = self.lattice();
        let signal_prob = build_sparsity_layout(self, &lattice, pi_signal);
        ScenarioConfig {
            kind: self,
            mu: if self == ScenarioKind::Null { 0.0 } else { mu },
            pi_signal,
            lattice,
            signal_prob,
        }
    }
}

/// The true signal-frequency field for a scenario: `pi_signal` on the dense
/// regions, [`BACKGROUND_PI`] elsewhere, and identically zero for the null
/// scenario.
fn build_sparsity_layout(kind: ScenarioKind, lattice: &Lattice, pi_signal: f64) -> Vec<f64> {
    let m = lattice.num_sites();
    match kind {
        ScenarioKind::Null => vec![0.0; m],
        ScenarioKind::S1 | ScenarioKind::S2 => {
            let mut field = vec![BACKGROUND_PI; m];
            for start in [1001usize, 2001, 3001, 4001] {
                for coord in start..start + 200 {
                    field[coord - 1] = pi_signal;
                }
            }
            field
        }
        ScenarioKind::S3 | ScenarioKind::S4 => {
            let mut field = vec![BACKGROUND_PI; m];
            for x in 1..=80i64 {
                for y in 1..=80i64 {
                    let in_square = (51..=65).contains(&x) && (51..=65).contains(&y);
                    // closed disk of radius 10 around (20, 20)
                    let d2 = (x - 20) * (x - 20) + (y - 20) * (y - 20);
                    if in_square || d2 <= 100 {
                        let idx = ((x - 1) * 80 + (y - 1)) as usize;
                        field[idx] = pi_signal;
                    }
                }
            }
            field
        }
        ScenarioKind::S5 | ScenarioKind::S6 => {
            let mut field = vec![BACKGROUND_PI; m];
            for x in 6..=15i64 {
                for y in 11..=20i64 {
                    for z in 11..=20i64 {
                        let idx = (((x - 1) * 20 + (y - 1)) * 25 + (z - 1)) as usize;
                        field[idx] = pi_signal;
                    }
                }
            }
            field
        }
    }
}
