use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use asymptotics_lab::{
    cauchy_heine_coefficients, check_mixed_bound, classify_growth, cocycle, compare_norms, fit_exponential_flatness,
    fit_exponential_flatness_free_k, growth_magnitudes, heine_coefficients, norm_fixtures, overlap_ray, remainder_samples,
    rs_error_bound_check, run_classifier_battery, series_norm, BaseVariable, ClassifyOptions, CocycleRay, CocycleSample,
    FlatnessFit, FlatnessModel, FormalExpansion, GrowthClassification, HeineOptions, NormSpec, NormVariant, RemainderSample,
    RsMode, RsReport,
};
use borel_solver::{solve_family, verify_coeff_bounds_over, BoundFitReport, CoefficientFamily, GrowthBound};
use laplace_engine::{identity_battery_with, IDENTITY_NAMES, IDENTITY_TOLERANCES};
use numerics_core::{gamma_real, ln_gamma};
use problem_model::{validate, HypothesisReport, C64};
use sector_geometry::{AdmissibleConfig, Variant};
use serde::{Deserialize, Serialize};
use solution_assembler::{assemble, grid, AssemblyOptions, SectorialSolution};

use crate::config::{complexes, Config, SCHEMA_VERSION};
use crate::output::{csv_text, fmt15, normalize_csv, sha256_hex, to_json, write_file};
use crate::CliError;

/// Output-directory override used when `--out` is absent.
pub const OUT_DIR_ENV: &str = "SECTORIAL_LAB_OUT";

/// What a command leaves for the caller: an exit code and the text for stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Eps,
    T,
}

impl VariantArg {
    pub fn variant(self) -> Variant {
        match self {
            VariantArg::Eps => Variant::EpsilonCovering,
            VariantArg::T => Variant::TCovering,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    QRelative,
    Sup,
}

impl NormArg {
    fn variant(self) -> NormVariant {
        match self {
            NormArg::QRelative => NormVariant::QRelative,
            NormArg::Sup => NormVariant::Sup,
        }
    }
}

/// `--out`, else the environment override, else `./out`.
pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub config_hash: String,
    pub hypothesis_hash: String,
}

struct Loaded {
    config: Config,
    hypotheses: HypothesisReport,
    provenance: Provenance,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let config = Config::parse(&text)?;
    let hypotheses = validate(&config.problem);
    let provenance = Provenance {
        schema_version: SCHEMA_VERSION,
        config_hash: sha256_hex(&to_json(&config)?),
        hypothesis_hash: sha256_hex(&to_json(&hypotheses)?),
    };
    Ok(Loaded { config, hypotheses, provenance })
}

fn pipeline<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Pipeline(e.to_string())
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::EpsilonCovering => "eps",
        Variant::TCovering => "t",
    }
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Serialize)]
struct GeometryStatus {
    ok: bool,
    error: Option<String>,
    warnings: Vec<String>,
    roots: Vec<[f64; 2]>,
    margins: Vec<Option<f64>>,
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    provenance: Provenance,
    pass: bool,
    hypotheses: HypothesisReport,
    failed_checks: Vec<String>,
    geometry: HashMap<&'static str, GeometryStatus>,
}

fn geometry_status(cfg: &Config, variant: Variant) -> GeometryStatus {
    let probes = grid(&complexes(&cfg.solve.t_grid), &complexes(&cfg.solve.eps_grid));
    match cfg.admissible(variant, &probes) {
        Ok(a) => GeometryStatus {
            ok: true,
            error: None,
            warnings: a.warnings.clone(),
            roots: a.roots.iter().map(|r| pair(*r)).collect(),
            margins: a.margins.clone(),
        },
        Err(e) => GeometryStatus { ok: false, error: Some(e.to_string()), warnings: Vec::new(), roots: Vec::new(), margins: Vec::new() },
    }
}

pub fn cmd_validate(config: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let l = load(config)?;
    let mut geometry = HashMap::new();
    for v in [Variant::EpsilonCovering, Variant::TCovering] {
        geometry.insert(variant_name(v), geometry_status(&l.config, v));
    }
    let failed_checks = l
        .hypotheses
        .failures()
        .map(|c| match c.term {
            Some(t) => format!("{} (term {t})", c.name),
            None => c.name.to_string(),
        })
        .collect();
    let pass = l.hypotheses.pass && geometry.values().all(|g| g.ok);
    let report = ValidateReport { provenance: l.provenance, pass, hypotheses: l.hypotheses, failed_checks, geometry };
    let text = to_json(&report)?;
    if let Some(dir) = out {
        write_file(dir, "validate.json", &text)?;
    }
    Ok(Outcome { code: if pass { 0 } else { 1 }, stdout: text })
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveManifest {
    pub provenance: Provenance,
    pub variant: Variant,
    pub n_max: usize,
    pub files: Vec<String>,
    pub r1: Vec<f64>,
    pub probes_per_sector: Vec<usize>,
}

#[derive(Debug, Default, Clone)]
pub struct SolveArgs {
    pub n_max: Option<usize>,
    pub eps_grid: Option<Vec<C64>>,
    pub t_grid: Option<Vec<C64>>,
}

pub fn solve_dir(out: &Path, variant: Variant) -> PathBuf {
    out.join(format!("solve_{}", variant_name(variant)))
}

/// Pairs whose covered variable lies in sector `p` and whose other variable lies in the companion.
fn probes_for(cfg: &AdmissibleConfig, p: usize, probes: &[(C64, C64)]) -> Vec<(C64, C64)> {
    probes
        .iter()
        .copied()
        .filter(|&(t, eps)| {
            let other = match cfg.variant {
                Variant::EpsilonCovering => t,
                Variant::TCovering => eps,
            };
            cfg.sector_of(t, eps) == Some(p) && cfg.companion.contains(other)
        })
        .collect()
}

/// Every `ω_n` on the main ray at the nodes of `ω_0`, one column pair per n.
/// Other coefficients are interpolated there; cells past a ray's reach stay empty.
fn omega_rows(fam: &CoefficientFamily, rows: &mut Vec<Vec<String>>) {
    for &r in fam.rays[0].samples.radii() {
        let mut row = vec![fam.p.to_string(), fmt15(fam.eps.re), fmt15(fam.eps.im), fmt15(r), fmt15(fam.gamma)];
        for n in 0..fam.rays.len() {
            match fam.ray_value(n, r) {
                Ok(v) => row.extend([fmt15(v.re), fmt15(v.im)]),
                Err(_) => row.extend([String::new(), String::new()]),
            }
        }
        rows.push(row);
    }
}

pub fn cmd_solve(config: &Path, variant: VariantArg, args: &SolveArgs, out: &Path) -> Result<Outcome, CliError> {
    let l = load(config)?;
    let cfg = &l.config;
    let spec = &cfg.problem;
    let variant = variant.variant();
    let n_max = args.n_max.unwrap_or(cfg.solve.n_max);
    if n_max < spec.s as usize {
        return Err(CliError::Usage(format!("--N {n_max} is below S = {}", spec.s)));
    }
    let eps_grid = args.eps_grid.clone().unwrap_or_else(|| complexes(&cfg.solve.eps_grid));
    let t_grid = args.t_grid.clone().unwrap_or_else(|| complexes(&cfg.solve.t_grid));
    let z_grid = complexes(&cfg.solve.z_grid);
    let probes = grid(&t_grid, &eps_grid);
    let adm = cfg.admissible(variant, &probes)?;
    let opts = AssemblyOptions::default();
    let dir = solve_dir(out, variant);
    let mut files = Vec::new();
    let mut r1 = Vec::new();
    let mut counts = Vec::new();
    let mut bounds: Vec<(usize, Vec<BoundFitReport>)> = Vec::new();
    let omega_header: Vec<String> = ["p", "eps_re", "eps_im", "radius", "arg"]
        .iter()
        .map(|s| s.to_string())
        .chain((0..=n_max).flat_map(|n| [format!("omega_{n}_re"), format!("omega_{n}_im")]))
        .collect();
    let omega_header: Vec<&str> = omega_header.iter().map(String::as_str).collect();

    for p in 0..adm.covering.len() {
        let mine = probes_for(&adm, p, &probes);
        let sol = assemble(spec, &adm, p, &mine, n_max, &opts).map_err(pipeline)?;
        r1.push(sol.r1);
        counts.push(mine.len());
        let name = format!("solution_p{p}.csv");
        write_file(&dir, &name, &normalize_csv(&sol.to_csv(&z_grid))?)?;
        files.push(name);

        // one family per ε the sector actually uses
        let mut eps_used: Vec<C64> = Vec::new();
        for &(_, e) in &mine {
            if !eps_used.contains(&e) {
                eps_used.push(e);
            }
        }
        if eps_used.is_empty() {
            eps_used.push(C64::new(0.0, 0.0));
        }
        let fams = eps_used
            .iter()
            .map(|&e| solve_family(spec, &adm, p, e, n_max, 1.0, &opts.solver))
            .collect::<borel_solver::Result<Vec<_>>>()
            .map_err(pipeline)?;
        let mut rows = Vec::new();
        for f in &fams {
            omega_rows(f, &mut rows);
        }
        let name = format!("omega_p{p}.csv");
        write_file(&dir, &name, &csv_text(&omega_header, &rows)?)?;
        files.push(name);
        let refs: Vec<&CoefficientFamily> = fams.iter().collect();
        let reports = [GrowthBound::Sectorial, GrowthBound::Disc, GrowthBound::Annulus, GrowthBound::Majorant]
            .iter()
            .map(|b| verify_coeff_bounds_over(&refs, *b, spec.delta, spec.k1))
            .collect::<borel_solver::Result<Vec<_>>>()
            .map_err(pipeline)?;
        bounds.push((p, reports));
    }

    #[derive(Serialize)]
    struct BoundsReport<'a> {
        provenance: &'a Provenance,
        sectors: Vec<SectorBounds<'a>>,
    }
    #[derive(Serialize)]
    struct SectorBounds<'a> {
        p: usize,
        fits: &'a [BoundFitReport],
    }
    let br = BoundsReport { provenance: &l.provenance, sectors: bounds.iter().map(|(p, f)| SectorBounds { p: *p, fits: f }).collect() };
    write_file(&dir, "bounds.json", &to_json(&br)?)?;
    files.push("bounds.json".into());
    files.sort();
    let manifest = SolveManifest { provenance: l.provenance, variant, n_max, files, r1, probes_per_sector: counts };
    let text = to_json(&manifest)?;
    write_file(&dir, "manifest.json", &text)?;
    Ok(Outcome { code: 0, stdout: text })
}

// ---------------------------------------------------------------- asym

#[derive(Debug, Clone, Serialize)]
pub struct GridRefinement {
    pub probe: [f64; 2],
    pub norm: f64,
    pub refined: f64,
    pub relative_delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub p: usize,
    pub next: usize,
    pub overlap_direction: f64,
    pub samples: Vec<CocycleSample>,
    pub flatness: FlatnessFit,
    pub flatness_free_k: FlatnessFit,
    pub mixed_bound: Option<FlatnessFit>,
    pub grid_refinement: GridRefinement,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeineReport {
    pub coefficient: usize,
    pub base_point: [f64; 2],
    pub coefficients: Vec<[f64; 2]>,
    pub magnitudes_used: Vec<f64>,
    pub classification: GrowthClassification,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderReport {
    pub probes: Vec<[f64; 2]>,
    pub samples: Vec<RemainderSample>,
    pub gevrey: RsReport,
    pub mixed: RsReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymReport {
    pub provenance: Provenance,
    pub variant: Variant,
    pub norm: NormArg,
    pub k: u32,
    pub q: f64,
    pub n_norm: usize,
    pub r1: f64,
    pub pairs: Vec<PairReport>,
    pub heine: HeineReport,
    pub remainder: RemainderReport,
    pub pass: bool,
}

fn model_k(f: &FlatnessFit) -> f64 {
    match f.model {
        FlatnessModel::ExpFlat { k } => k,
        FlatnessModel::Mixed { k, .. } => k as f64,
    }
}

fn base_variable(v: Variant) -> BaseVariable {
    match v {
        Variant::EpsilonCovering => BaseVariable::T,
        Variant::TCovering => BaseVariable::Epsilon,
    }
}

fn pair_report(l: &Loaded, adm: &AdmissibleConfig, p: usize, norm_arg: NormArg, n_max: usize) -> Result<PairReport, CliError> {
    let cfg = &l.config;
    let spec = &cfg.problem;
    let next = (p + 1) % adm.covering.len();
    let opts = AssemblyOptions::default();
    // each pair assembles its own solutions so no cache is shared between threads
    let a = assemble(spec, adm, p, &[], n_max, &opts).map_err(pipeline)?;
    let b = assemble(spec, adm, next, &[], n_max, &opts).map_err(pipeline)?;
    let (dir, radius) = overlap_ray(&adm.covering.sectors[p], &adm.covering.sectors[next]).map_err(pipeline)?;
    let probes: Vec<C64> = cfg.asym.cocycle_fractions.iter().map(|f| C64::from_polar(f * radius, dir)).collect();
    let mut norm = NormSpec::new(norm_arg.variant(), base_variable(adm.variant), adm.companion, spec.q, a.r1, cfg.asym.n_norm).map_err(pipeline)?;
    norm.radial = cfg.asym.radial;
    norm.angular = cfg.asym.angular;
    let samples = cocycle(&a, &b, &probes, &norm).map_err(pipeline)?;
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.magnitude, s.norm)).collect();
    let k = spec.k as f64;
    let flatness = fit_exponential_flatness(&pts, k).map_err(pipeline)?;
    let [k_lo, k_hi] = cfg.asym.free_k_range;
    let flatness_free_k = fit_exponential_flatness_free_k(&pts, k_lo, k_hi).map_err(pipeline)?;
    let mixed_bound = match norm_arg {
        NormArg::Sup => {
            let rows: Vec<(u32, f64, f64)> = cfg.asym.mixed_orders.iter().flat_map(|&n| pts.iter().map(move |&(x, y)| (n, x, y))).collect();
            Some(check_mixed_bound(&rows, spec.k, spec.q).map_err(pipeline)?)
        }
        NormArg::QRelative => None,
    };
    let refined_norm = NormSpec { radial: 2 * norm.radial, angular: 2 * norm.angular - 1, ..norm.clone() };
    let refined = cocycle(&a, &b, &probes[..1], &refined_norm).map_err(pipeline)?[0].norm;
    let first = samples[0].norm;
    let grid_refinement = GridRefinement {
        probe: pair(probes[0]),
        norm: first,
        refined,
        relative_delta: if refined > 0.0 { (refined - first).abs() / refined } else { 0.0 },
    };
    let tol = &cfg.tolerances;
    let pass = flatness.pass
        && flatness.flat
        && flatness.r2.unwrap_or(0.0) >= tol.r2_min
        && (model_k(&flatness_free_k) - k).abs() <= tol.free_k_rel * k
        && mixed_bound.as_ref().is_none_or(|m| m.pass);
    Ok(PairReport { p, next, overlap_direction: dir, samples, flatness, flatness_free_k, mixed_bound, grid_refinement, pass })
}

pub fn cmd_asym(config: &Path, variant: VariantArg, norm_arg: NormArg, out: &Path, solve_inline: bool) -> Result<Outcome, CliError> {
    let l = load(config)?;
    let v = variant.variant();
    let sdir = solve_dir(out, v);
    let manifest: Option<SolveManifest> =
        std::fs::read_to_string(sdir.join("manifest.json")).ok().and_then(|t| serde_json::from_str(&t).ok());
    let fresh = manifest.as_ref().is_some_and(|m| m.provenance.config_hash == l.provenance.config_hash && m.variant == v);
    if !fresh {
        if !solve_inline {
            return Err(CliError::MissingArtifacts(format!(
                "no solve artifacts for this config in {} (run `solve` first or pass --solve-inline)",
                sdir.display()
            )));
        }
        cmd_solve(config, variant, &SolveArgs::default(), out)?;
    }

    let cfg = &l.config;
    let spec = &cfg.problem;
    let adm = cfg.admissible(v, &[])?;
    let n_max = cfg.asym.n_norm.max(cfg.asym.heine.coefficient).max(spec.s as usize);
    let n_pairs = adm.covering.len();
    let pairs: Vec<Result<PairReport, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..n_pairs).map(|p| { let (l, adm) = (&l, &adm); s.spawn(move || pair_report(l, adm, p, norm_arg, n_max)) }).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(CliError::Pipeline("worker panicked".into())))).collect()
    });
    let pairs = pairs.into_iter().collect::<Result<Vec<_>, _>>()?;

    let opts = AssemblyOptions::default();
    let sols = (0..n_pairs).map(|p| assemble(spec, &adm, p, &[], n_max, &opts)).collect::<solution_assembler::Result<Vec<SectorialSolution>>>().map_err(pipeline)?;
    let h = &cfg.asym.heine;
    let comp_r = adm.companion.radius.unwrap_or(1.0);
    let base = C64::from_polar(h.base_fraction * comp_r, adm.companion.bisector);
    let coeffs = heine_coefficients(&sols, h.coefficient, base, h.m_max, &HeineOptions::default()).map_err(pipeline)?;
    let mags = growth_magnitudes(&coeffs, h.skip, h.floor);
    let copts = ClassifyOptions { margin: cfg.tolerances.classifier_margin, bootstrap: cfg.tolerances.bootstrap, seed: cfg.seed, ..Default::default() };
    let classification = classify_growth(&mags, Some(spec.q), Some(spec.k), &copts).map_err(pipeline)?;
    let heine = HeineReport { coefficient: h.coefficient, base_point: pair(base), coefficients: coeffs.iter().map(|c| pair(*c)).collect(), magnitudes_used: mags, classification };

    let own = adm.covering.sectors[0];
    let offset = 0.3f64.min(0.5 * own.half_opening);
    let own_r = own.radius.unwrap_or(1.0);
    let rprobes: Vec<C64> = cfg.asym.remainder_fractions.iter().map(|f| C64::from_polar(f * own_r, own.bisector + offset)).collect();
    let max_order = cfg.asym.remainder_orders.iter().copied().max().unwrap_or(0);
    let expansion = FormalExpansion::new(spec, n_max, max_order, v).map_err(pipeline)?;
    let mut rnorm = NormSpec::new(norm_arg.variant(), base_variable(v), adm.companion, spec.q, sols[0].r1, cfg.asym.n_norm).map_err(pipeline)?;
    rnorm.radial = cfg.asym.radial;
    rnorm.angular = cfg.asym.angular;
    let rsamples = remainder_samples(&sols[0], &expansion, &rnorm, &cfg.asym.remainder_orders, &rprobes).map_err(pipeline)?;
    let gevrey = rs_error_bound_check(&rsamples, RsMode::Gevrey, spec.k, spec.q).map_err(pipeline)?;
    let mixed = rs_error_bound_check(&rsamples, RsMode::Mixed, spec.k, spec.q).map_err(pipeline)?;
    let remainder = RemainderReport { probes: rprobes.iter().map(|c| pair(*c)).collect(), samples: rsamples, gevrey, mixed };

    let rs_pass = match norm_arg {
        NormArg::QRelative => remainder.gevrey.pass,
        NormArg::Sup => remainder.mixed.pass,
    };
    let pass = pairs.iter().all(|p| p.pass) && rs_pass;
    let report = AsymReport {
        provenance: l.provenance.clone(),
        variant: v,
        norm: norm_arg,
        k: spec.k,
        q: spec.q,
        n_norm: cfg.asym.n_norm,
        r1: sols[0].r1,
        pairs,
        heine,
        remainder,
        pass,
    };

    let norm_name = match norm_arg {
        NormArg::QRelative => "q-relative",
        NormArg::Sup => "sup",
    };
    let dir = out.join(format!("asym_{}_{norm_name}", variant_name(v)));
    for pr in &report.pairs {
        let pts: Vec<(f64, f64)> = pr.samples.iter().map(|s| (s.magnitude, s.norm)).collect();
        write_file(&dir, &format!("cocycle_{}_{}.csv", pr.p, pr.next), &normalize_csv(&pr.flatness.flatness_csv(&pts))?)?;
        if let Some(m) = &pr.mixed_bound {
            let rows: Vec<(u32, f64, f64)> = cfg.asym.mixed_orders.iter().flat_map(|&n| pts.iter().map(move |&(x, y)| (n, x, y))).collect();
            write_file(&dir, &format!("mixed_{}_{}.csv", pr.p, pr.next), &normalize_csv(&m.mixed_csv(&rows))?)?;
        }
    }
    let heine_rows: Vec<Vec<String>> = report
        .heine
        .coefficients
        .iter()
        .zip(&report.heine.magnitudes_used)
        .enumerate()
        .map(|(m, (c, used))| vec![m.to_string(), fmt15(c[0]), fmt15(c[1]), fmt15(C64::new(c[0], c[1]).norm()), (*used > 0.0).to_string()])
        .collect();
    write_file(&dir, "heine.csv", &csv_text(&["m", "re", "im", "abs", "used"], &heine_rows)?)?;
    let rem_rows: Vec<Vec<String>> = report.remainder.samples.iter().map(|s| vec![s.order.to_string(), fmt15(s.x), fmt15(s.value)]).collect();
    write_file(&dir, "remainder.csv", &csv_text(&["order", "x", "value"], &rem_rows)?)?;
    let text = to_json(&report)?;
    write_file(&dir, "asym.json", &text)?;
    Ok(Outcome { code: if report.pass { 0 } else { 1 }, stdout: text })
}

// ---------------------------------------------------------------- selftest

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check { name: name.into(), value, tolerance, pass: value <= tolerance }
}

#[derive(Debug, Serialize)]
struct SelftestReport {
    quick: bool,
    checks: Vec<Check>,
    pass: bool,
}

/// `Γ(m, 1)` for integer `m ≥ 1`.
fn upper_gamma_at_one(m: usize) -> f64 {
    let mut fact = 1.0;
    let mut inv = 1.0;
    let mut sum = 0.0;
    for j in 0..m {
        if j > 0 {
            fact *= j as f64;
            inv /= j as f64;
        }
        sum += inv;
    }
    fact * sum * (-1f64).exp()
}

pub fn cmd_selftest(quick: bool, inject_gamma_bug: bool, out: Option<&Path>) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();

    let bug = if inject_gamma_bug { 1e-3 } else { 0.0 };
    let draws = if quick { 5 } else { 20 };
    let ib = identity_battery_with(20241019, draws, |x| Ok(gamma_real(x)? * (1.0 + bug))).map_err(pipeline)?;
    for i in 0..4 {
        checks.push(check(format!("identity/{}", IDENTITY_NAMES[i]), ib.worst[i], IDENTITY_TOLERANCES[i]));
    }

    let cb = run_classifier_battery(&ClassifyOptions::default(), 0.05, 0.1);
    checks.push(check("classifier/wrong_verdicts", (cb.total - cb.correct) as f64, 0.0));

    let fixtures = norm_fixtures(0x0a11, if quick { 10 } else { 50 });
    let mut violations = 0usize;
    for f in &fixtures {
        if !compare_norms(f).map_err(pipeline)?.holds() {
            violations += 1;
        }
    }
    checks.push(check("norm/comparison_violations", violations as f64, 0.0));

    for k in [1.0, 2.0, 3.0] {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| 0.3 + 0.04 * i as f64).map(|x| (x, 0.7 * (-1.3 / x.powf(k)).exp())).collect();
        let fit = fit_exponential_flatness(&pts, k).map_err(pipeline)?;
        checks.push(check(format!("flatness/k{k}_residual"), fit.residual.unwrap_or(f64::INFINITY), 1e-9));
    }

    let mut rays = [CocycleRay { direction: 0.0, radius: 1.0, theta: Box::new(|xi: C64| Ok((-1.0 / xi).exp())) }];
    let a = cauchy_heine_coefficients(&mut rays, 20, &HeineOptions::default()).map_err(pipeline)?;
    let worst = (1..=20usize)
        .map(|m| {
            let want = upper_gamma_at_one(m) / (2.0 * PI);
            (a[m].norm() - want).abs() / want
        })
        .fold(0.0, f64::max);
    checks.push(check("heine/incomplete_gamma_oracle", worst, 1e-10));

    let (c, mm) = (3.0, 0.7);
    let samples: Vec<RemainderSample> = (0..5)
        .flat_map(|n| {
            [0.02, 0.05, 0.1].map(|x| RemainderSample { order: n, x, value: c * f64::powi(mm, n as i32 + 1) * ln_gamma((n + 1) as f64).unwrap_or(0.0).exp() })
        })
        .collect();
    let rs = rs_error_bound_check(&samples, RsMode::Gevrey, 1, 1.2).map_err(pipeline)?;
    let rel = match (rs.c, rs.m) {
        (Some(fc), Some(fm)) if rs.pass => (fc / c - 1.0).abs().max((fm / mm - 1.0).abs()),
        _ => f64::INFINITY,
    };
    checks.push(check("remainder/gevrey_recovery", rel, 0.05));

    // norm of h = t·z on a sector of radius 0.8 with q = 2: 0.5·R₁ (q-relative), 0.8·R₁ (sup)
    let sector = sector_geometry::Sector::new(0.0, 0.3, Some(0.8)).map_err(pipeline)?;
    for (variant, want) in [(NormVariant::QRelative, 0.5), (NormVariant::Sup, 0.8)] {
        let ns = NormSpec::new(variant, BaseVariable::T, sector, 2.0, 1.3, 1).map_err(pipeline)?;
        let v = series_norm(&ns, |n, x| Ok(if n == 1 { x } else { C64::new(0.0, 0.0) })).map_err(pipeline)?;
        checks.push(check(format!("norm/t_times_z_{variant:?}"), (v.value - want * 1.3).abs(), 1e-12));
    }

    let pass = checks.iter().all(|c| c.pass);
    let text = to_json(&SelftestReport { quick, checks, pass })?;
    if let Some(dir) = out {
        write_file(dir, "selftest.json", &text)?;
    }
    Ok(Outcome { code: if pass { 0 } else { 1 }, stdout: text })
}

/// `"re,im;re,im;re"` into complex numbers.
pub fn parse_grid(s: &str) -> Result<Vec<C64>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let parts: Vec<&str> = p.split(',').map(str::trim).collect();
            let num = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
            match parts.as_slice() {
                [re] => Ok(C64::new(num(re)?, 0.0)),
                [re, im] => Ok(C64::new(num(re)?, num(im)?)),
                _ => Err(format!("`{p}` is not `re` or `re,im`")),
            }
        })
        .collect()
}
