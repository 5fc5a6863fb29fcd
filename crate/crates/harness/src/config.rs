use std::path::{Path, PathBuf};

use trotter_core::anneal::AnnealSchedule;
use trotter_core::model::{
    build_heisenberg_xyz, build_hydrogen_sto3g, build_transverse_ising, parse_hamiltonian,
};
use trotter_core::HamiltonianModel;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSelector {
    Hydrogen,
    Heisenberg,
    Ising,
    File(PathBuf),
}

impl ModelSelector {
    pub fn name(&self) -> String {
        match self {
            ModelSelector::Hydrogen => "hydrogen".into(),
            ModelSelector::Heisenberg => "heisenberg".into(),
            ModelSelector::Ising => "ising".into(),
            ModelSelector::File(p) => format!("file:{}", p.display()),
        }
    }

    /// Instantiates the model at a given size. Seeded families draw their
    /// couplings from `seed`; fixed models ignore it but insist on their
    /// native size so a config cannot silently mislabel rows.
    pub fn build(&self, n: usize, seed: u64) -> Result<HamiltonianModel> {
        match self {
            ModelSelector::Hydrogen => {
                if n != 4 {
                    return Err(HarnessError::Config(format!(
                        "the hydrogen model is a fixed 4-qubit instance, got n={n}"
                    )));
                }
                Ok(build_hydrogen_sto3g())
            }
            ModelSelector::Heisenberg => Ok(build_heisenberg_xyz(n, seed)?),
            ModelSelector::Ising => {
                let couplings: Vec<(usize, usize, f64)> =
                    (0..n.saturating_sub(1)).map(|j| (j, j + 1, 1.0)).collect();
                let fields = vec![1.0; n];
                Ok(build_transverse_ising(n, &couplings, &fields)?)
            }
            ModelSelector::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::io(path.clone(), e))?;
                let m = parse_hamiltonian(&text)?;
                if m.n() != n {
                    return Err(HarnessError::Config(format!(
                        "model file {} has n={}, config asks for n={n}",
                        path.display(),
                        m.n()
                    )));
                }
                Ok(m)
            }
        }
    }
}

/// How the evolution time is chosen for each system size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeRule {
    Fixed(f64),
    EqualsN,
}

impl TimeRule {
    pub fn time_for(&self, n: usize) -> f64 {
        match self {
            TimeRule::Fixed(t) => *t,
            TimeRule::EqualsN => n as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ModelSelector,
    pub n_min: usize,
    pub n_max: usize,
    pub time: TimeRule,
    pub epsilon: f64,
    pub formula_order: u32,
    pub schedule: AnnealSchedule,
    pub trials: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// The annealing benchmark on the fixed molecular instance: 50 seeded
    /// restarts with the geometric schedule 10 -> 1 at rate 0.95.
    pub fn hydrogen_defaults(out_dir: &Path) -> Result<Self> {
        let cfg = ExperimentConfig {
            model: ModelSelector::Hydrogen,
            n_min: 4,
            n_max: 4,
            time: TimeRule::Fixed(4.0),
            epsilon: 1e-3,
            formula_order: 1,
            schedule: AnnealSchedule::new(10.0, 1.0, 0.95, 2024)?,
            trials: 50,
            seed: 2024,
            out_dir: out_dir.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The bound-comparison sweep over random spin chains, sized 4 through 8
    /// with the evolution time growing alongside the chain.
    pub fn heisenberg_defaults(out_dir: &Path) -> Result<Self> {
        let cfg = ExperimentConfig {
            model: ModelSelector::Heisenberg,
            n_min: 4,
            n_max: 8,
            time: TimeRule::EqualsN,
            epsilon: 1e-3,
            formula_order: 1,
            schedule: AnnealSchedule::new(10.0, 1.0, 0.95, 2024)?,
            trials: 1,
            seed: 2024,
            out_dir: out_dir.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(HarnessError::Config(format!(
                "empty size range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(HarnessError::Config(format!(
                "target accuracy must be positive, got {}",
                self.epsilon
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("at least one trial is required".into()));
        }
        if self.formula_order != 1 && self.formula_order != 2 {
            return Err(HarnessError::Config(format!(
                "formula order must be 1 or 2, got {}",
                self.formula_order
            )));
        }
        for n in self.n_min..=self.n_max {
            let t = self.time.time_for(n);
            if !(t > 0.0) || !t.is_finite() {
                return Err(HarnessError::Config(format!(
                    "evolution time must be positive, got {t} at n={n}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let h = ExperimentConfig::hydrogen_defaults(Path::new("out")).unwrap();
        assert_eq!(h.trials, 50);
        assert_eq!(h.time.time_for(4), 4.0);
        let c = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        assert_eq!((c.n_min, c.n_max), (4, 8));
        assert_eq!(c.time.time_for(6), 6.0);
    }

    #[test]
    fn validation_rejects_bad_ranges() {
        let mut cfg = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        cfg.n_min = 9;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        cfg.formula_order = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::heisenberg_defaults(Path::new("out")).unwrap();
        cfg.time = TimeRule::Fixed(-1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn selectors_build_expected_models() {
        assert_eq!(ModelSelector::Hydrogen.build(4, 0).unwrap().n(), 4);
        assert!(ModelSelector::Hydrogen.build(5, 0).is_err());
        let m = ModelSelector::Heisenberg.build(3, 7).unwrap();
        assert_eq!((m.n(), m.len()), (3, 3));
        let m = ModelSelector::Ising.build(3, 0).unwrap();
        assert_eq!((m.n(), m.len()), (3, 2));
    }
}
