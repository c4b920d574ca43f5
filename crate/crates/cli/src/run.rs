use std::io::Write;

use crosswell_core::dynamics::{Trajectory, VerticalTopology};
use crosswell_core::model::{h2_family, hn_sym_family, states, BiasSchedule, ErrorOperator, VerticalLevels};
use crosswell_core::protocols::{
    protection_sweep, run_entanglement_generation, run_ghz_attempt, run_hotbath, run_w_generation,
    unencoded_baseline, EntangleSetup, GhzSetup, HotBathSetup, ProtectionConfig, SymmetricSweep,
};
use crosswell_core::spectra::eigen_sweep;
use crosswell_core::{par, DensityMatrix, C64};

use crate::config::{ConfigError, Experiment, ExperimentConfig, SpectrumModel, Topology};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] crosswell_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        use crosswell_core::Error as E;
        match self {
            RunError::Config(_) => 2,
            RunError::Core(E::Config(_) | E::InvalidArgument(_) | E::NotNormalized { .. }) => 2,
            RunError::Core(_) => 3,
            RunError::Io(_) | RunError::Csv(_) => 1,
        }
    }
}

/// Rows of numbers under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

/// 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn emit_csv<W: Write>(table: &Table, out: W) -> Result<(), RunError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_number(x)))?;
    }
    w.flush()?;
    Ok(())
}

fn trajectory_table(traj: &Trajectory, columns: &[&str]) -> Table {
    let mut header = vec!["t"];
    header.extend_from_slice(columns);
    let mut table = Table::new(&header);
    let series: Vec<&[f64]> = columns.iter().map(|c| traj.observable(c).expect("series recorded")).collect();
    for (k, &t) in traj.times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(series.iter().map(|s| s[k]));
        table.rows.push(row);
    }
    table
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let s = &cfg.spectrum;
    let family = match s.model {
        SpectrumModel::H2 => h2_family(s.omega, s.lambda),
        SpectrumModel::Sym => hn_sym_family(s.n, s.omega, s.lambda)?,
    };
    let d = eigen_sweep(|f| family.at(f), (s.f_min, s.f_max), s.points)?;
    let names: Vec<String> = (0..d.n_levels()).map(|k| format!("E{k}")).collect();
    let mut header = vec!["f"];
    header.extend(names.iter().map(String::as_str));
    let mut table = Table::new(&header);
    for (f, levels) in d.f_values.iter().zip(&d.levels) {
        let mut row = vec![*f];
        row.extend_from_slice(levels);
        table.rows.push(row);
    }
    Ok(table)
}

fn entangle(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let e = &cfg.entangle;
    let mut setup = EntangleSetup::closed(e.lambda);
    setup.omega = e.omega;
    setup.schedule = BiasSchedule::linear(e.f0.unwrap_or(-2.0 * e.lambda), e.rate.unwrap_or(e.lambda / 2000.0));
    setup.rho0 = DensityMatrix::from_pure(&states::ket(&e.initial));
    setup.t_end = e.t_end;
    setup.dt = cfg.dt;
    setup.sample_every = cfg.sample_every.unwrap_or(setup.sample_every);
    if e.gamma_relax > 0.0 {
        setup = setup.with_left_projector_noise(e.gamma_relax)?;
    }
    let traj = run_entanglement_generation(&setup)?;
    Ok(trajectory_table(&traj, &["f", "E", "Ef", "trace_drift", "purity"]))
}

fn hotbath(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let h = &cfg.hotbath;
    let mut setup = HotBathSetup::standard()?;
    setup.levels = VerticalLevels::geometric(h.omegas.clone(), h.coupling_scale, 0.0)?;
    setup.topology = match h.topology {
        Topology::PerParticle => VerticalTopology::PerParticle,
        Topology::Shared => VerticalTopology::Shared,
    };
    setup.schedule = BiasSchedule::linear(h.f0, h.rate);
    setup.gammas = h.gamma.clone();
    setup.t_end = h.t_end;
    setup.dt = cfg.dt;
    setup.sample_every = cfg.sample_every.unwrap_or(setup.sample_every);
    let runs = run_hotbath(&setup)?;
    let mut table = Table::new(&["gamma", "t", "f", "E", "Ef", "trace_drift", "purity"]);
    for (gamma, traj) in &runs {
        for row in trajectory_table(traj, &["f", "E", "Ef", "trace_drift", "purity"]).rows {
            let mut r = vec![*gamma];
            r.extend(row);
            table.rows.push(r);
        }
    }
    Ok(table)
}

fn wstate(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let w = &cfg.wstate;
    let n = w.n as f64;
    let f0 = w.f0.unwrap_or(-n * w.lambda);
    let t_end = w.t_end.unwrap_or((n * w.lambda - f0) / w.rate);
    let sweep = SymmetricSweep {
        n: w.n,
        omega: w.omega,
        lambda: w.lambda,
        schedule: BiasSchedule::linear(f0, w.rate),
        t_end,
        dt: cfg.dt,
        sample_every: cfg.sample_every.unwrap_or(100),
    };
    let traj = run_w_generation(&sweep)?;
    let names: Vec<String> = (0..=w.n).map(|m| format!("p{m}")).collect();
    let mut cols = vec!["f"];
    cols.extend(names.iter().map(String::as_str));
    cols.push("trace_drift");
    Ok(trajectory_table(&traj, &cols))
}

fn ghz(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let g = &cfg.ghz;
    let mut setup = GhzSetup::new(g.omega, g.lambda, g.sweep_rate, g.f_start);
    setup.dt = cfg.dt;
    setup.sample_every = cfg.sample_every.unwrap_or(setup.sample_every);
    let r = run_ghz_attempt(&setup)?;
    let mut table = Table::new(&[
        "omega",
        "lambda",
        "sweep_rate",
        "f_start",
        "gamma_b",
        "gamma_b_estimate",
        "phi_plus_overlap",
        "transfer",
        "adiabatic",
    ]);
    table.rows.push(vec![
        g.omega,
        g.lambda,
        g.sweep_rate,
        g.f_start,
        r.gamma_b,
        r.gamma_b_estimate,
        r.phi_plus_overlap,
        r.transfer,
        if r.adiabatic { 1.0 } else { 0.0 },
    ]);
    Ok(table)
}

fn protect(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let p = &cfg.protect;
    let errors = p.errors.iter().map(|s| ErrorOperator::from_name(s).expect("validated")).collect();
    let pc = ProtectionConfig {
        a: C64::new(p.a[0], p.a[1]),
        b: C64::new(p.b[0], p.b[1]),
        t_e: p.t_e.unwrap_or(0.01 * p.t_h),
        t_h: p.t_h,
        errors,
        noise_during_coding: p.noise_during_coding,
        fine_tune: p.fine_tune,
        recover: p.recover,
        dt: cfg.dt,
        ..ProtectionConfig::default()
    };
    let pts = protection_sweep(&pc, &p.gamma_th)?;
    let mut table = Table::new(&["gamma_th", "encoded_err", "baseline_err", "p_control_zero"]);
    for s in pts {
        table.rows.push(vec![s.gamma_th, s.encoded_error, s.baseline_error, s.p_control_zero]);
    }
    Ok(table)
}

fn baseline(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let b = &cfg.baseline;
    let ps = par::try_map(&b.gamma, |&g| unencoded_baseline(g, b.t))?;
    let mut table = Table::new(&["gamma", "t", "p"]);
    for (&g, p) in b.gamma.iter().zip(ps) {
        table.rows.push(vec![g, b.t, p]);
    }
    Ok(table)
}

pub fn run(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Table, RunError> {
    match experiment {
        Experiment::Spectrum => spectrum(cfg),
        Experiment::Entangle => entangle(cfg),
        Experiment::Hotbath => hotbath(cfg),
        Experiment::Wstate => wstate(cfg),
        Experiment::Ghz => ghz(cfg),
        Experiment::Protect => protect(cfg),
        Experiment::Baseline => baseline(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.0), "-2.0000000000000000e0");
        let x = 1.0 / 3.0;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let t = Table { header: vec!["a".into(), "b".into()], rows: vec![vec![1.0, 2.0]] };
        let mut buf = Vec::new();
        emit_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1.0000000000000000e0,2.0000000000000000e0\n");
    }

    #[test]
    fn default_spectrum_grid() {
        let t = run(Experiment::Spectrum, &parse_config("").unwrap()).unwrap();
        assert_eq!(t.header, ["f", "E0", "E1", "E2", "E3"]);
        assert_eq!(t.rows.len(), 801);
        assert_eq!(t.rows[0][0], -2.0);
        assert_eq!(t.rows[800][0], 2.0);
    }

    #[test]
    fn baseline_rows() {
        let cfg = parse_config("[baseline]\ngamma = [0, 1e-4]\nt = 100\n").unwrap();
        let t = run(Experiment::Baseline, &cfg).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0][2], 0.0);
        assert!((t.rows[1][2] - (1.0 - (-4e-2f64).exp()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(RunError::from(crosswell_core::Error::Config("x".into())).exit_code(), 2);
        assert_eq!(RunError::from(crosswell_core::Error::StepTooLarge("x".into())).exit_code(), 3);
    }
}
