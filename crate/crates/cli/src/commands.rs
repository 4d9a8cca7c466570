//! Subcommand implementations.

use std::path::Path;

use serde::Serialize;

use lfa_core::{
    convergence_factor, element_operator, frequency_grid, localization, measured_two_grid_factor,
    omega_sweep, operator_symbol, run_table, smoother_spectrum_sweep, symbol_eigenvalues,
    ElementBasis, SmootherSpec, TableId, TableOptions, TwoGrid,
};

use crate::config::{AnalysisConfig, SmootherFamily, TransferMode};
use crate::output::{emit, fmt, to_json, CsvWriter};
use crate::{CliError, Format};

fn theta_header(dimension: usize) -> Vec<String> {
    (1..=dimension).map(|a| format!("theta_{a}")).collect()
}

/// Eigenvalues of the operator symbol over the frequency grid.
pub fn cmd_symbol(config: &AnalysisConfig, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    if format == Format::Json {
        return Err(CliError::Config(
            "symbol emits CSV; use --format csv".into(),
        ));
    }
    let wf = config.weak_form()?;
    let basis = ElementBasis::lagrange(config.fine_degree, config.dimension)?;
    let operator = element_operator(&wf, &basis)?;
    let loc = localization(config.fine_degree, config.dimension, config.components);
    let symbol = operator_symbol(&operator, &loc)?;

    let mut header: Vec<String> = theta_header(config.dimension);
    header.push("index".into());
    header.push("value".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::new(&header_refs);

    for theta in frequency_grid(config.dimension, config.effective_resolution()) {
        let eigs = symbol_eigenvalues(&symbol, &theta)?;
        for (index, value) in eigs.iter().enumerate() {
            let mut row: Vec<String> = theta.iter().map(|&t| fmt(t)).collect();
            row.push(index.to_string());
            row.push(fmt(*value));
            csv.row(&row);
        }
    }
    emit(output, &csv.finish())
}

/// Eigenvalues of the preconditioned-operator symbol for the configured
/// smoother.
pub fn cmd_smoother_spectrum(
    config: &AnalysisConfig,
    output: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    if format == Format::Json {
        return Err(CliError::Config(
            "smoother-spectrum emits CSV; use --format csv".into(),
        ));
    }
    let wf = config.weak_form()?;
    let basis = ElementBasis::lagrange(config.fine_degree, config.dimension)?;
    let operator = element_operator(&wf, &basis)?;
    let loc = localization(config.fine_degree, config.dimension, config.components);
    let spec = config.smoother_spec()?;
    let rows = smoother_spectrum_sweep(&operator, &loc, &spec, config.effective_resolution())?;

    let mut header: Vec<String> = theta_header(config.dimension);
    header.push("index".into());
    header.push("real".into());
    header.push("imag".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::new(&header_refs);
    for (theta, values) in rows {
        for (index, value) in values.iter().enumerate() {
            let mut row: Vec<String> = theta.iter().map(|&t| fmt(t)).collect();
            row.push(index.to_string());
            row.push(fmt(*value));
            row.push(fmt(0.0));
            csv.row(&row);
        }
    }
    emit(output, &csv.finish())
}

#[derive(Serialize)]
struct TwoGridSummary {
    mu: f64,
    theta: Vec<f64>,
    excluded: usize,
    resolution: usize,
}

/// Convergence factor of the configured two-grid cycle.
pub fn cmd_two_grid(config: &AnalysisConfig, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    let spec = config.two_grid_spec()?;
    let result = convergence_factor(&spec)?;
    match format {
        Format::Json => {
            let summary = TwoGridSummary {
                mu: result.factor,
                theta: result.attaining.clone(),
                excluded: result.excluded,
                resolution: spec.resolution,
            };
            emit(output, &to_json(&summary)?)
        }
        Format::Csv => {
            let mut header: Vec<String> = theta_header(config.dimension);
            header.push("rho".into());
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut csv = CsvWriter::new(&header_refs);
            for (theta, rho) in &result.table {
                let mut row: Vec<String> = theta.iter().map(|&t| fmt(t)).collect();
                row.push(fmt(*rho));
                csv.row(&row);
            }
            emit(output, &csv.finish())
        }
    }
}

/// Convergence-factor curve over the smoother parameter: ω for Jacobi,
/// polynomial order for Chebyshev.
pub fn cmd_sweep(config: &AnalysisConfig, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    if format == Format::Json {
        return Err(CliError::Config("sweep emits CSV; use --format csv".into()));
    }
    let spec = config.two_grid_spec()?;
    match config.smoother {
        SmootherFamily::Jacobi => {
            let curve = omega_sweep(&spec, config.omega_min, config.omega_max, config.omega_step)?;
            let mut csv = CsvWriter::new(&["omega", "mu"]);
            for (omega, mu) in curve {
                csv.row(&[fmt(omega), fmt(mu)]);
            }
            emit(output, &csv.finish())
        }
        SmootherFamily::Chebyshev => {
            let engine = TwoGrid::new(&spec)?;
            let configs: Vec<SmootherSpec> = config
                .orders
                .iter()
                .map(|&k| {
                    SmootherSpec::chebyshev(
                        k,
                        config.lambda_min_factor,
                        config.lambda_max_factor,
                        config.passes,
                    )
                })
                .collect::<lfa_core::Result<_>>()?;
            let sweeps = engine.sweep_smoothers(&configs)?;
            let mut csv = CsvWriter::new(&["k", "mu"]);
            for (k, sweep) in config.orders.iter().zip(sweeps) {
                csv.row(&[k.to_string(), fmt(sweep.factor)]);
            }
            emit(output, &csv.finish())
        }
    }
}

#[derive(Serialize)]
struct TableReport {
    id: String,
    title: String,
    columns: Vec<String>,
    rows: Vec<TableRowReport>,
}

#[derive(Serialize)]
struct TableRowReport {
    label: String,
    values: Vec<f64>,
}

/// Reproduce one of the published convergence-factor tables.
pub fn cmd_table(
    config: &AnalysisConfig,
    id: Option<TableId>,
    resolution_flag: Option<usize>,
    output: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let Some(id) = id.or(config.table) else {
        return Err(CliError::Config(
            "no table requested; pass an id (t1..t9) or set 'table' in the config".into(),
        ));
    };
    let options = TableOptions {
        resolution: resolution_flag.or(config.resolution),
        include_slow: config.include_slow,
    };
    let table = run_table(id, &options)?;
    for warning in &table.warnings {
        eprintln!("warning: {warning}");
    }
    match format {
        Format::Csv => {
            let mut header = vec!["row".to_string()];
            header.extend(table.columns.iter().cloned());
            let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            let mut csv = CsvWriter::new(&header_refs);
            for row in &table.rows {
                let mut fields = vec![row.label.clone()];
                fields.extend(row.values.iter().map(|&v| fmt(v)));
                csv.row(&fields);
            }
            emit(output, &csv.finish())
        }
        Format::Json => {
            let report = TableReport {
                id: table.id.to_string(),
                title: table.title.clone(),
                columns: table.columns.clone(),
                rows: table
                    .rows
                    .iter()
                    .map(|r| TableRowReport {
                        label: r.label.clone(),
                        values: r.values.clone(),
                    })
                    .collect(),
            };
            emit(output, &to_json(&report)?)
        }
    }
}

#[derive(Serialize)]
struct ValidationReport {
    pde: String,
    dimension: usize,
    mode: String,
    fine_degree: usize,
    coarse: usize,
    smoother: String,
    passes: usize,
    resolution: usize,
    elements: usize,
    iterations: usize,
    trials: usize,
    lfa_factor: f64,
    measured_factor: f64,
    difference: f64,
}

/// Compare the LFA prediction against the measured convergence factor of
/// the periodic two-grid iteration.
pub fn cmd_validate(config: &AnalysisConfig, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::Config(
            "validate emits JSON; use --format json".into(),
        ));
    }
    let spec = config.two_grid_spec()?;
    let lfa = convergence_factor(&spec)?;
    let measured =
        measured_two_grid_factor(&spec, config.elements, config.iterations, config.trials)?;
    let report = ValidationReport {
        pde: match config.pde {
            crate::config::Pde::Laplacian => "laplacian".into(),
            crate::config::Pde::Elasticity => "elasticity".into(),
        },
        dimension: config.dimension,
        mode: match config.mode {
            TransferMode::P => "p".into(),
            TransferMode::H => "h".into(),
        },
        fine_degree: config.fine_degree,
        coarse: match config.mode {
            TransferMode::P => config.coarse_degree,
            TransferMode::H => config.sub_elements,
        },
        smoother: match config.smoother {
            SmootherFamily::Jacobi => format!("jacobi(omega={})", config.omega),
            SmootherFamily::Chebyshev => format!(
                "chebyshev(k={}, factors={}/{})",
                config.order, config.lambda_min_factor, config.lambda_max_factor
            ),
        },
        passes: config.passes,
        resolution: spec.resolution,
        elements: config.elements,
        iterations: config.iterations,
        trials: config.trials,
        lfa_factor: lfa.factor,
        measured_factor: measured.factor,
        difference: (measured.factor - lfa.factor).abs(),
    };
    emit(output, &to_json(&report)?)
}
