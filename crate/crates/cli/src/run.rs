//! Route execution and artifact layout.

use std::path::PathBuf;

use serde::Serialize;

use ewi_core::analysis::{compare_routes_in, default_region, extract_fringes, FringeReport};
use ewi_core::distribution::linspace;
use ewi_core::semiclassical::{predicted_fringe_momenta, recoil_phase_difference, two_path_band};
use ewi_core::stationary::{OverlapCache, OverlapConfig, DEFAULT_K_NODES, DEFAULT_P_POINTS};
use ewi_core::wavepacket::{sampled_spectrum, wavepacket_spectrum, WavePacketSpec, WavepacketNumerics};
use ewi_core::MomentumDistribution;

use crate::output::{ensure_dir, sha256_hex, spectrum_table, svg_plot, table, Written};
use crate::scenario::{RouteName, Scenario};

/// Phase samples per semiclassical table.
const PHASE_SAMPLES: usize = 400;

/// Why a run stopped.
#[derive(Debug)]
pub enum RunError {
    Invalid(Vec<String>),
    Io(String),
    Compute(ewi_core::Error),
}

impl From<ewi_core::Error> for RunError {
    fn from(e: ewi_core::Error) -> Self {
        match e {
            ewi_core::Error::InvalidConfig(v) => Self::Invalid(v),
            e => Self::Compute(e),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    version: &'static str,
    route: &'static str,
    deterministic: bool,
    scenario: &'a Scenario,
    resolved: toml::Table,
}

struct Run<'a> {
    scenario: Scenario,
    route: RouteName,
    deterministic: bool,
    dir: PathBuf,
    written: &'a mut Written,
}

impl Run<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes the sidecar and returns its hash for the table headers.
    fn sidecar(&mut self, resolved: toml::Table) -> Result<String, RunError> {
        let doc = Sidecar {
            version: env!("CARGO_PKG_VERSION"),
            route: self.route.as_str(),
            deterministic: self.deterministic,
            scenario: &self.scenario,
            resolved,
        };
        let text = toml::to_string(&doc).map_err(|e| RunError::Io(e.to_string()))?;
        let path = self.path(&format!("{}.meta.toml", self.route.as_str()));
        self.written.write(path, &text)?;
        Ok(sha256_hex(&text))
    }

    fn plot(&mut self, name: &str, title: &str, p: &[f64], series: &[(&str, &[f64])]) -> Result<(), RunError> {
        if self.scenario.output.plot {
            let path = self.path(name);
            self.written.write(path, &svg_plot(title, "density", p, series))?;
        }
        Ok(())
    }
}

/// Validates `scenario` for `route`, then computes and writes every artifact.
pub fn run(route: RouteName, mut scenario: Scenario, deterministic: bool) -> Result<Written, RunError> {
    let violations = scenario.violations(route);
    if !violations.is_empty() {
        return Err(RunError::Invalid(violations));
    }
    scenario.route = Some(route);
    resolve_grid(&mut scenario);
    let dir = scenario.output.dir.clone();
    ensure_dir(&dir).map_err(|e| RunError::Io(format!("output directory {}: {e}", dir.display())))?;
    let mut written = Written::default();
    let mut run = Run { scenario, route, deterministic, dir, written: &mut written };
    match route {
        RouteName::Semiclassical => semiclassical(&mut run)?,
        RouteName::Stationary => stationary(&mut run)?,
        RouteName::Wavepacket => wavepacket(&mut run)?,
        RouteName::Compare => compare(&mut run)?,
    }
    Ok(written)
}

/// Fills the momentum grid with its defaults so the sidecar records them.
fn resolve_grid(s: &mut Scenario) {
    let d = OverlapConfig::default_p_grid(s.physics.p0, s.physics.beta);
    let m = &mut s.momentum;
    m.p_min.get_or_insert(d[0]);
    m.p_max.get_or_insert(d[d.len() - 1]);
    m.p_points.get_or_insert(DEFAULT_P_POINTS);
}

fn p_grid(s: &Scenario) -> Vec<f64> {
    let m = &s.momentum;
    linspace(m.p_min.unwrap_or_default(), m.p_max.unwrap_or_default(), m.p_points.unwrap_or(DEFAULT_P_POINTS))
}

fn k_label(k: f64) -> String {
    format!("k={k:+.4}")
}

fn settings_table(d: &MomentumDistribution) -> toml::Table {
    d.meta.settings.iter().map(|(k, v)| (k.clone(), toml::Value::Float(*v))).collect()
}

fn floats(xs: &[f64]) -> toml::Value {
    toml::Value::Array(xs.iter().map(|x| toml::Value::Float(*x)).collect())
}

fn semiclassical(run: &mut Run) -> Result<(), RunError> {
    let s = &run.scenario;
    let (p0, cfg) = (s.physics.p0, s.potential());
    let ks = if s.recoil.sweep.is_empty() { vec![0.0] } else { s.recoil.sweep.clone() };
    let mut entries = Vec::new();
    let mut tables = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let mut entry = toml::Table::new();
        entry.insert("k".into(), toml::Value::Float(k));
        if let Some((lo, hi)) = two_path_band(p0, cfg.beta, k) {
            let p: Vec<f64> = (0..PHASE_SAMPLES).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / PHASE_SAMPLES as f64).collect();
            let phase = p.iter().map(|&v| recoil_phase_difference(p0, v, &cfg, k)).collect::<Result<Vec<_>, _>>()?;
            entry.insert("band".into(), floats(&[lo, hi]));
            entry.insert("predicted_minima".into(), floats(&predicted_fringe_momenta(p0, &cfg, k)));
            let name = if s.recoil.sweep.is_empty() { "semiclassical.txt".to_string() } else { format!("semiclassical_k{i}.txt") };
            tables.push((name, k, p, phase));
        } else {
            entry.insert("band".into(), toml::Value::Array(Vec::new()));
            entry.insert("predicted_minima".into(), toml::Value::Array(Vec::new()));
        }
        entries.push(toml::Value::Table(entry));
    }
    let mut resolved = toml::Table::new();
    resolved.insert("fringes".into(), toml::Value::Array(entries));
    let hash = run.sidecar(resolved)?;
    for (name, k, p, phase) in tables {
        let text = table(&format!("semiclassical phase difference {}", k_label(k)), &hash, &["p".into(), "phase".into()], &p, &[&phase]);
        let path = run.path(&name);
        run.written.write(path, &text)?;
    }
    Ok(())
}

fn overlap_config(s: &Scenario) -> OverlapConfig {
    let mut oc = OverlapConfig::for_grid(s.physics.p0, &s.potential(), p_grid(s));
    oc.recoil = s.recoil_model();
    oc.k_nodes = s.recoil.k_nodes.unwrap_or(DEFAULT_K_NODES);
    oc
}

fn stationary_cache(s: &Scenario) -> Result<OverlapCache, RunError> {
    let oc = overlap_config(s);
    oc.validate(s.physics.p0, &s.potential())?;
    Ok(OverlapCache::build(s.physics.p0, &s.potential(), &oc)?)
}

fn stationary(run: &mut Run) -> Result<(), RunError> {
    let cache = stationary_cache(&run.scenario)?;
    let sweep = run.scenario.recoil.sweep.clone();
    if sweep.is_empty() {
        let avg = cache.averaged()?;
        let hash = run.sidecar(settings_table(&avg))?;
        write_spectrum(run, "stationary", "stationary spectrum, recoil averaged", &hash, &avg)?;
        return Ok(());
    }
    let spectra = sweep.iter().map(|&k| cache.spectrum(k)).collect::<Result<Vec<_>, _>>()?;
    let per_k: Vec<toml::Value> = spectra
        .iter()
        .map(|d| {
            let mut t = settings_table(d);
            t.insert("k".into(), toml::Value::Float(d.meta.k.unwrap_or_default()));
            toml::Value::Table(t)
        })
        .collect();
    let mut resolved = toml::Table::new();
    resolved.insert("spectra".into(), toml::Value::Array(per_k));
    let hash = run.sidecar(resolved)?;
    let p = cache.p_grid().to_vec();
    for (i, d) in spectra.iter().enumerate() {
        let text = spectrum_table(&format!("stationary spectrum {}", k_label(sweep[i])), &hash, &p, d.density());
        let path = run.path(&format!("stationary_k{i}.txt"));
        run.written.write(path, &text)?;
    }
    let mut columns = vec!["p".to_string()];
    columns.extend(sweep.iter().map(|&k| k_label(k)));
    let series: Vec<&[f64]> = spectra.iter().map(|d| d.density()).collect();
    let text = table("stationary spectra by recoil", &hash, &columns, &p, &series);
    let path = run.path("stationary_sweep.txt");
    run.written.write(path, &text)?;
    let labels: Vec<String> = sweep.iter().map(|&k| k_label(k)).collect();
    let named: Vec<(&str, &[f64])> = labels.iter().map(String::as_str).zip(series.iter().copied()).collect();
    run.plot("stationary_sweep.svg", "stationary spectra by recoil", &p, &named)
}

fn wavepacket_run(s: &Scenario) -> Result<(MomentumDistribution, toml::Table), RunError> {
    let (p0, cfg, w) = (s.physics.p0, s.potential(), &s.wavepacket);
    let spec = WavePacketSpec::incident(p0, w.sigma_z, &cfg, w.t_end)?;
    let mut numerics = WavepacketNumerics::defaults(&spec, cfg.beta);
    numerics.p_grid = p_grid(s);
    if let Some(n) = w.tau_nodes {
        numerics.tau_nodes = n;
    }
    if let Some(n) = s.recoil.k_nodes {
        numerics.k_nodes = n;
    }
    if let Some(dt) = w.dt {
        numerics.dt = dt;
    }
    let recoil = s.recoil_model();
    let d = if w.samples > 0 {
        sampled_spectrum(&spec, &cfg, &recoil, w.t_end, &numerics, w.samples, w.seed)?
    } else {
        wavepacket_spectrum(&spec, &cfg, &recoil, w.t_end, &numerics)?
    };
    let resolved = settings_table(&d);
    Ok((d, resolved))
}

fn wavepacket(run: &mut Run) -> Result<(), RunError> {
    let (d, settings) = wavepacket_run(&run.scenario)?;
    let hash = run.sidecar(settings)?;
    write_spectrum(run, "wavepacket", "wave-packet spectrum, recoil averaged", &hash, &d)
}

fn write_spectrum(run: &mut Run, stem: &str, title: &str, hash: &str, d: &MomentumDistribution) -> Result<(), RunError> {
    let path = run.path(&format!("{stem}.txt"));
    run.written.write(path, &spectrum_table(title, hash, d.p_grid(), d.density()))?;
    run.plot(&format!("{stem}.svg"), title, d.p_grid(), &[(stem, d.density())])
}

#[derive(Serialize)]
struct FringeFile<'a> {
    source: &'a str,
    report: &'a FringeReport,
}

fn compare(run: &mut Run) -> Result<(), RunError> {
    let s = run.scenario.clone();
    let (p0, cfg) = (s.physics.p0, s.potential());
    let st = stationary_cache(&s)?.averaged()?;
    let (wp, wp_settings) = wavepacket_run(&s)?;
    let mut resolved = toml::Table::new();
    resolved.insert("stationary".into(), toml::Value::Table(settings_table(&st)));
    resolved.insert("wavepacket".into(), toml::Value::Table(wp_settings));
    let region = default_region(p0, &cfg)?;
    let hash = run.sidecar(resolved)?;

    write_spectrum(run, "stationary", "stationary spectrum, recoil averaged", &hash, &st)?;
    write_spectrum(run, "wavepacket", "wave-packet spectrum, recoil averaged", &hash, &wp)?;
    for (name, d) in [("stationary", &st), ("wavepacket", &wp)] {
        let report = extract_fringes(d, region)?;
        let body = toml::to_string(&FringeFile { source: name, report: &report }).map_err(|e| RunError::Io(e.to_string()))?;
        let path = run.path(&format!("fringes_{name}.toml"));
        run.written.write(path, &format!("# metadata-sha256 {hash}\n{body}"))?;
    }
    let cmp = compare_routes_in(&wp, &st, region)?;
    let body = toml::to_string(&cmp).map_err(|e| RunError::Io(e.to_string()))?;
    let path = run.path("comparison.toml");
    run.written.write(path, &format!("# metadata-sha256 {hash}\n# wave-packet spectrum against the stationary reference\n{body}"))?;
    run.plot(
        "compare.svg",
        "stationary and wave-packet spectra",
        st.p_grid(),
        &[("stationary", st.density()), ("wavepacket", &resample(&wp, st.p_grid()))],
    )
}

fn resample(d: &MomentumDistribution, p: &[f64]) -> Vec<f64> {
    p.iter().map(|&x| d.value_at(x)).collect()
}
