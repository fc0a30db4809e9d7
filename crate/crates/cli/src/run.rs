//! Mode execution and artifact writing.
//!
//! Every artifact embeds the resolved configuration, and files appear
//! atomically: contents are staged in a temporary file in the target
//! directory and renamed into place only on success.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use twomode::dynamics::format_float;
use twomode::{
    compare_quantum_classical, integrate_bloch, integrate_gp, left_well_state, propagate,
    transport_metrics, verify, BlochVector, ClassicalTrajectory, GpAmplitudes, GpCouplings,
    HamiltonianKind, ModelParams, TrajectoryRecord,
};

use crate::config::{
    ExperimentConfig, Formulation, Mode, OutputFormat, OutputSection, SweepParameter,
};
use crate::CliError;

pub fn run(config: &ExperimentConfig) -> Result<(), CliError> {
    match config.mode {
        Mode::Evolve => evolve(config),
        Mode::Meanfield => meanfield(config),
        Mode::Compare => compare(config),
        Mode::ExtractParams => extract_params(config),
        Mode::Sweep => sweep(config),
        Mode::Verify => run_verify(config),
    }
}

fn initial_bloch(config: &ExperimentConfig) -> BlochVector {
    match &config.initial {
        Some(init) => BlochVector::new(init.bloch[0], init.bloch[1], init.bloch[2]),
        None => BlochVector::left(),
    }
}

fn evolve(config: &ExperimentConfig) -> Result<(), CliError> {
    let (params, kind) = config.model_params()?;
    let cfg = config.propagation.as_ref().unwrap().to_config();
    let state0 = left_well_state(params.n_particles)?;
    let record = propagate(&state0, &params, kind, &cfg)?;

    match config.output.format {
        OutputFormat::Csv => write_artifact(config, |w, out| {
            write_config_comment(w, config)?;
            record
                .write_csv(w, out.precision, out.hex_floats)
                .map_err(CliError::Io)
        }),
        OutputFormat::Json => write_json(config, &record),
    }
}

fn classical_trajectory(
    config: &ExperimentConfig,
    params: &ModelParams,
    kind: HamiltonianKind,
) -> Result<ClassicalTrajectory, CliError> {
    let cfg = config.propagation.as_ref().unwrap().to_config();
    let b0 = initial_bloch(config);
    let formulation = config
        .meanfield
        .as_ref()
        .map(|m| m.formulation)
        .unwrap_or(Formulation::Bloch);
    let traj = match formulation {
        Formulation::Bloch => integrate_bloch(b0, params, kind, &cfg)?,
        Formulation::Gp => {
            let couplings = GpCouplings::from_model(params, kind);
            integrate_gp(GpAmplitudes::from_bloch(&b0), &couplings, &cfg)?.to_bloch_trajectory()
        }
    };
    Ok(traj)
}

fn meanfield(config: &ExperimentConfig) -> Result<(), CliError> {
    let (params, kind) = config.model_params()?;
    let traj = classical_trajectory(config, &params, kind)?;

    match config.output.format {
        OutputFormat::Csv => write_artifact(config, |w, out| {
            write_config_comment(w, config)?;
            traj.write_csv(w, out.precision, out.hex_floats)
                .map_err(CliError::Io)
        }),
        OutputFormat::Json => write_json(config, &traj),
    }
}

#[derive(Serialize)]
struct CompareData<'a> {
    quantum: &'a TrajectoryRecord,
    classical: &'a ClassicalTrajectory,
    deviation: &'a twomode::DeviationSeries,
    max_deviation: f64,
    mean_deviation: f64,
}

fn compare(config: &ExperimentConfig) -> Result<(), CliError> {
    let (params, kind) = config.model_params()?;
    if config.initial.is_some() {
        return Err(CliError::Config(
            "initial: compare uses the fixed all-left pair (quantum |j,-j>, Bloch (0,0,-1))".into(),
        ));
    }
    let cfg = config.propagation.as_ref().unwrap().to_config();
    let state0 = left_well_state(params.n_particles)?;
    let quantum = propagate(&state0, &params, kind, &cfg)?;
    let classical = classical_trajectory(config, &params, kind)?;
    let deviation = compare_quantum_classical(&quantum, &classical, params.n_particles)?;

    match config.output.format {
        OutputFormat::Csv => write_artifact(config, |w, out| {
            write_config_comment(w, config)?;
            let half_n = params.n_particles as f64 / 2.0;
            writeln!(w, "t,q_u,q_v,q_w,c_u,c_v,c_w,dev_u,dev_v,dev_w").map_err(CliError::Io)?;
            let (p, hex) = (out.precision, out.hex_floats);
            for (k, t) in deviation.times.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    format_float(*t, p, hex),
                    format_float(quantum.jx_mean[k] / half_n, p, hex),
                    format_float(quantum.jy_mean[k] / half_n, p, hex),
                    format_float(quantum.jz_mean[k] / half_n, p, hex),
                    format_float(classical.u[k], p, hex),
                    format_float(classical.v[k], p, hex),
                    format_float(classical.w[k], p, hex),
                    format_float(deviation.du[k], p, hex),
                    format_float(deviation.dv[k], p, hex),
                    format_float(deviation.dw[k], p, hex),
                )
                .map_err(CliError::Io)?;
            }
            Ok(())
        }),
        OutputFormat::Json => write_json(
            config,
            &CompareData {
                quantum: &quantum,
                classical: &classical,
                deviation: &deviation,
                max_deviation: deviation.max_deviation(),
                mean_deviation: deviation.mean_deviation(),
            },
        ),
    }
}

fn extract_params(config: &ExperimentConfig) -> Result<(), CliError> {
    let well = config.well.as_ref().unwrap();
    let spec = well.to_spec()?;
    let report = twomode::extract_parameters(&spec, well.convergence_tolerance)?;
    // parameter reports are structured data; always JSON
    write_json(config, &report)
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    final_fidelity: f64,
    jz_min_scaled: f64,
    jz_max_scaled: f64,
    self_trapped_quantum: bool,
    self_trapped_classical: bool,
    max_deviation: f64,
    mean_deviation: f64,
}

fn apply_sweep_value(params: &ModelParams, parameter: SweepParameter, value: f64) -> ModelParams {
    let mut p = params.clone();
    match parameter {
        SweepParameter::U0 => p.u0 = value,
        SweepParameter::Ut => p.ut = value,
        SweepParameter::Utt => p.utt = value,
        SweepParameter::Omega => p.omega = twomode::Schedule::constant(value),
        SweepParameter::Epsilon => p.epsilon = twomode::Schedule::constant(value),
    }
    p
}

fn sweep(config: &ExperimentConfig) -> Result<(), CliError> {
    let (params, kind) = config.model_params()?;
    let sweep = config.sweep.as_ref().unwrap();
    let cfg = config.propagation.as_ref().unwrap().to_config();
    let b0 = initial_bloch(config);

    // points are independent; rows stay in input order
    let rows: Result<Vec<SweepRow>, twomode::Error> = sweep
        .values
        .par_iter()
        .map(|&value| {
            let p = apply_sweep_value(&params, sweep.parameter, value);
            let state0 = left_well_state(p.n_particles)?;
            let quantum = propagate(&state0, &p, kind, &cfg)?;
            let classical = integrate_bloch(b0, &p, kind, &cfg)?;
            let deviation = compare_quantum_classical(&quantum, &classical, p.n_particles)?;
            let metrics = transport_metrics(&quantum, p.n_particles)?;
            Ok(SweepRow {
                value,
                final_fidelity: metrics.final_fidelity,
                jz_min_scaled: metrics.jz_min_scaled,
                jz_max_scaled: metrics.jz_max_scaled,
                self_trapped_quantum: metrics.self_trapped,
                self_trapped_classical: classical.self_trapped(),
                max_deviation: deviation.max_deviation(),
                mean_deviation: deviation.mean_deviation(),
            })
        })
        .collect();
    let rows = rows?;

    match config.output.format {
        OutputFormat::Csv => write_artifact(config, |w, out| {
            write_config_comment(w, config)?;
            writeln!(
                w,
                "value,final_fidelity,jz_min_scaled,jz_max_scaled,\
                 self_trapped_quantum,self_trapped_classical,max_deviation,mean_deviation"
            )
            .map_err(CliError::Io)?;
            let (p, hex) = (out.precision, out.hex_floats);
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    format_float(r.value, p, hex),
                    format_float(r.final_fidelity, p, hex),
                    format_float(r.jz_min_scaled, p, hex),
                    format_float(r.jz_max_scaled, p, hex),
                    r.self_trapped_quantum,
                    r.self_trapped_classical,
                    format_float(r.max_deviation, p, hex),
                    format_float(r.mean_deviation, p, hex),
                )
                .map_err(CliError::Io)?;
            }
            Ok(())
        }),
        OutputFormat::Json => write_json(config, &rows),
    }
}

fn run_verify(config: &ExperimentConfig) -> Result<(), CliError> {
    let section = config.verify.clone().unwrap_or_default();
    let opts = verify::VerifyOptions {
        n_max_operators: section.n_max_operators,
        n_dynamics: section.n_dynamics,
        coupling_sets: section.coupling_sets,
    };
    let outcomes = verify::run_all(&opts)?;
    let mut all_passed = true;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", o.name, o.detail);
        all_passed &= o.passed;
    }
    if config.output.path.is_some() {
        write_json(config, &outcomes)?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

/// `{ "config": ..., "data": ... }` with a trailing newline.
fn write_json<T: Serialize>(config: &ExperimentConfig, data: &T) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Artifact<'a, T> {
        config: &'a ExperimentConfig,
        data: &'a T,
    }
    write_artifact(config, |w, _| {
        serde_json::to_writer_pretty(&mut *w, &Artifact { config, data })
            .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
        writeln!(w).map_err(CliError::Io)
    })
}

fn write_config_comment<W: Write + ?Sized>(
    w: &mut W,
    config: &ExperimentConfig,
) -> Result<(), CliError> {
    let echo = serde_json::to_string(config)
        .map_err(|e| CliError::Config(format!("config echo failed: {e}")))?;
    writeln!(w, "# config: {echo}").map_err(CliError::Io)
}

/// Stage the artifact next to its destination and rename into place only
/// after the writer succeeds, so aborted runs leave no partial file.
fn write_artifact<F>(config: &ExperimentConfig, write_body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write, &OutputSection) -> Result<(), CliError>,
{
    let path = config
        .output
        .path
        .as_ref()
        .ok_or_else(|| CliError::Config("output.path: missing".into()))?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(CliError::Io)?;
    {
        let mut buffered = std::io::BufWriter::new(tmp.as_file_mut());
        write_body(&mut buffered, &config.output)?;
        buffered.flush().map_err(CliError::Io)?;
    }
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
