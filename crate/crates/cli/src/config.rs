//! Flat key=value analysis configuration.
//!
//! Every field has a default, so an empty (or absent) config file is valid.
//! Unknown keys and malformed values are rejected with the offending key
//! named in the diagnostic.

use std::collections::BTreeMap;
use std::path::Path;

use lfa_core::{
    default_resolution, elasticity_weakform, laplacian_weakform, Coarsening, ElasticityModel,
    GridKind, SmootherSpec, TableId, TwoGridSpec, WeakForm,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pde {
    Laplacian,
    Elasticity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    P,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherFamily {
    Jacobi,
    Chebyshev,
}

/// Parsed analysis configuration with all defaults resolved.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub pde: Pde,
    pub dimension: usize,
    pub components: usize,
    pub young: f64,
    pub poisson: f64,
    pub fine_degree: usize,
    pub coarse_degree: usize,
    pub mode: TransferMode,
    pub sub_elements: usize,
    pub smoother: SmootherFamily,
    pub omega: f64,
    pub passes: usize,
    pub order: usize,
    pub lambda_min_factor: f64,
    pub lambda_max_factor: f64,
    pub resolution: Option<usize>,
    pub grid: GridKind,
    pub cutoff: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_step: f64,
    pub orders: Vec<usize>,
    pub table: Option<TableId>,
    pub include_slow: bool,
    pub elements: usize,
    pub iterations: usize,
    pub trials: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            pde: Pde::Laplacian,
            dimension: 1,
            components: 1,
            young: 1.0,
            poisson: 0.3,
            fine_degree: 4,
            coarse_degree: 2,
            mode: TransferMode::P,
            sub_elements: 2,
            smoother: SmootherFamily::Jacobi,
            omega: 1.0,
            passes: 1,
            order: 2,
            lambda_min_factor: 0.1,
            lambda_max_factor: 1.0,
            resolution: None,
            grid: GridKind::CellCentered,
            cutoff: 1e-10,
            omega_min: 0.3,
            omega_max: 1.1,
            omega_step: 0.01,
            orders: vec![1, 2, 3, 4],
            table: None,
            include_slow: false,
            elements: 8,
            iterations: 50,
            trials: 3,
        }
    }
}

fn config_error(key: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("config key '{key}': {detail}"))
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| config_error(key, e))
}

impl AnalysisConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let mut pairs = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    number + 1
                )));
            };
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }

        let mut config = AnalysisConfig::default();
        let mut components_given = None;
        for (key, value) in &pairs {
            match key.as_str() {
                "pde" => {
                    config.pde = match value.as_str() {
                        "laplacian" => Pde::Laplacian,
                        "elasticity" => Pde::Elasticity,
                        other => {
                            return Err(config_error(
                                key,
                                format!("expected laplacian or elasticity, got '{other}'"),
                            ))
                        }
                    }
                }
                "dimension" => config.dimension = parse_value(key, value)?,
                "components" => components_given = Some(parse_value::<usize>(key, value)?),
                "young" => config.young = parse_value(key, value)?,
                "poisson" => config.poisson = parse_value(key, value)?,
                "fine_degree" => config.fine_degree = parse_value(key, value)?,
                "coarse_degree" => config.coarse_degree = parse_value(key, value)?,
                "mode" => {
                    config.mode = match value.as_str() {
                        "p" => TransferMode::P,
                        "h" => TransferMode::H,
                        other => {
                            return Err(config_error(key, format!("expected p or h, got '{other}'")))
                        }
                    }
                }
                "sub_elements" => config.sub_elements = parse_value(key, value)?,
                "smoother" => {
                    config.smoother = match value.as_str() {
                        "jacobi" => SmootherFamily::Jacobi,
                        "chebyshev" => SmootherFamily::Chebyshev,
                        other => {
                            return Err(config_error(
                                key,
                                format!("expected jacobi or chebyshev, got '{other}'"),
                            ))
                        }
                    }
                }
                "omega" => config.omega = parse_value(key, value)?,
                "passes" => config.passes = parse_value(key, value)?,
                "order" => config.order = parse_value(key, value)?,
                "lambda_min_factor" => config.lambda_min_factor = parse_value(key, value)?,
                "lambda_max_factor" => config.lambda_max_factor = parse_value(key, value)?,
                "resolution" => config.resolution = Some(parse_value(key, value)?),
                "grid" => {
                    config.grid = match value.as_str() {
                        "cell-centered" => GridKind::CellCentered,
                        "endpoint" => GridKind::Endpoint,
                        other => {
                            return Err(config_error(
                                key,
                                format!("expected cell-centered or endpoint, got '{other}'"),
                            ))
                        }
                    }
                }
                "cutoff" => config.cutoff = parse_value(key, value)?,
                "omega_min" => config.omega_min = parse_value(key, value)?,
                "omega_max" => config.omega_max = parse_value(key, value)?,
                "omega_step" => config.omega_step = parse_value(key, value)?,
                "orders" => {
                    config.orders = value
                        .split(',')
                        .map(|part| parse_value::<usize>(key, part.trim()))
                        .collect::<Result<_, _>>()?;
                    if config.orders.is_empty() {
                        return Err(config_error(key, "expected at least one order"));
                    }
                }
                "table" => {
                    config.table =
                        Some(value.parse::<TableId>().map_err(|e| config_error(key, e))?)
                }
                "include_slow" => config.include_slow = parse_value(key, value)?,
                "elements" => config.elements = parse_value(key, value)?,
                "iterations" => config.iterations = parse_value(key, value)?,
                "trials" => config.trials = parse_value(key, value)?,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown config key '{other}'"
                    )))
                }
            }
        }

        if !(1..=3).contains(&config.dimension) {
            return Err(config_error("dimension", "must be 1, 2, or 3"));
        }
        config.components = match config.pde {
            Pde::Laplacian => 1,
            Pde::Elasticity => config.dimension,
        };
        if let Some(n) = components_given {
            if n != config.components {
                return Err(config_error(
                    "components",
                    format!(
                        "PDE implies {} component(s), got {n}",
                        config.components
                    ),
                ));
            }
        }
        Ok(config)
    }

    pub fn weak_form(&self) -> Result<WeakForm, CliError> {
        match self.pde {
            Pde::Laplacian => Ok(laplacian_weakform(self.dimension, 1.0)),
            Pde::Elasticity => {
                let model = ElasticityModel::new(self.young, self.poisson)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                elasticity_weakform(&model, self.dimension, 1.0)
                    .map_err(|e| CliError::Config(e.to_string()))
            }
        }
    }

    pub fn smoother_spec(&self) -> Result<SmootherSpec, CliError> {
        let spec = match self.smoother {
            SmootherFamily::Jacobi => SmootherSpec::jacobi(self.omega, self.passes),
            SmootherFamily::Chebyshev => SmootherSpec::chebyshev(
                self.order,
                self.lambda_min_factor,
                self.lambda_max_factor,
                self.passes,
            ),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn effective_resolution(&self) -> usize {
        self.resolution
            .unwrap_or_else(|| default_resolution(self.dimension))
    }

    pub fn two_grid_spec(&self) -> Result<TwoGridSpec, CliError> {
        let coarsening = match self.mode {
            TransferMode::P => Coarsening::PDegree(self.coarse_degree),
            TransferMode::H => Coarsening::HSubElements(self.sub_elements),
        };
        let mut spec = TwoGridSpec::new(
            self.weak_form()?,
            self.fine_degree,
            coarsening,
            self.smoother_spec()?,
        )
        .with_resolution(self.effective_resolution())
        .with_grid(self.grid);
        spec.cutoff = self.cutoff;
        Ok(spec)
    }
}
