//! The `codestat` command line: argument parsing, subcommands and artifact
//! writing. The binary is a thin wrapper around [`main_with_args`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::code::{is_closed_under_subtraction, is_prime, make_linear_code, random_code, Code, CodeFile, GeneratorMatrix};
use crate::error::{Error, ErrorKind, Result};
use crate::fractal::{box_count_estimate, exact_rate, threshold_scan, Dimension};
use crate::io::{
    config_hash, fmt_f64, fmt_rational, header_comment, json_meta, parse_rational, read_points_csv,
    write_points_csv, SvgPlot,
};
use crate::measures::{
    check_semimeasure, critical_beta_semimeasure, cylinder_products, hausdorff_assignment, induced_multifractal_pf,
    induced_multifractal_uniform, measure_from_potential, mixture_semimeasure, pushforward_semimeasure,
    CylinderAssignment, ExactWeights, MassValue, MeasureClass, MonotoneMap, Potential, PotentialKind, Seed,
};
use crate::plane::{classical_bounds, empirical_envelope, rational, spoil_descendants, CodePoint};
use crate::thermo::{
    family_critical_beta, family_letter_terms, family_zeta, language_generating_at_beta, partition_function,
    product_partition, product_partition_grid, projection_state_and_vn_dim, CodeFamily, FamilyMember, SumMode,
    ZValue,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "CODESTAT_THREADS";

/// Deepest cylinder level the `measure` subcommand materializes.
pub const MAX_MEASURE_DEPTH: usize = 8;

/// Process exit code for an error kind.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Precondition => 3,
        ErrorKind::NonConvergence => 4,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Input => "input",
        ErrorKind::Precondition => "precondition",
        ErrorKind::NonConvergence => "non_convergence",
    }
}

/// The JSON error record printed on stderr.
pub fn error_record(kind: ErrorKind, message: &str) -> String {
    json!({ "error": { "kind": kind_name(kind), "message": message, "exit_code": exit_code(kind) } }).to_string()
}

#[derive(Debug, Parser)]
#[command(name = "codestat", version, about = "Exact statistics of error-correcting codes")]
struct Cli {
    /// Write the main artifact here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parameter report for a code file.
    Params { code: PathBuf },
    /// Code points reachable by numeric spoiling, as point CSV.
    Spoil {
        code: PathBuf,
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
    /// Random or random-linear code points, as point CSV and SVG.
    Cloud(CloudArgs),
    /// Envelope of lower cones of a point CSV.
    Bound {
        points: PathBuf,
        /// Alphabet for the Singleton/Plotkin overlays; defaults to the
        /// points' common q, else 2.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Threshold scan, dimensions and box counts as JSON.
    Fractal {
        code: PathBuf,
        /// Seed for the sampled scan of long codes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest box-counting depth.
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Partition function on a β grid, CSV `beta,value_or_DIV`.
    Partition {
        code: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Truncated series with this many terms instead of the closed form.
        #[arg(long)]
        series: Option<usize>,
    },
    /// Phase scans for families and product systems.
    Phases {
        spec: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Cylinder assignment JSON for a measure spec.
    Measure {
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Rational output when every input is rational.
        #[arg(long)]
        exact: bool,
    },
    /// Structure function, entropy and generating function of the code
    /// language.
    Entropy {
        code: PathBuf,
        /// Largest word length in the structure function table.
        #[arg(long, default_value_t = 32)]
        cap: usize,
        /// Evaluate G at t = q^(−β).
        #[arg(long)]
        beta: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct CloudArgs {
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Smallest length.
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    /// Largest length.
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Codes per length.
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Random generator matrices over the prime field instead of random
    /// word sets.
    #[arg(long)]
    linear: bool,
    /// Largest code size considered.
    #[arg(long, default_value_t = 256)]
    max_size: usize,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Explicit β values.
    #[arg(long = "beta", value_delimiter = ',', allow_hyphen_values = true)]
    betas: Vec<f64>,
    /// Grid `start:stop:step`, inclusive of `stop`.
    #[arg(long)]
    grid: Option<String>,
}

impl GridArgs {
    fn values(&self) -> Result<Vec<f64>> {
        let mut out = self.betas.clone();
        if let Some(g) = &self.grid {
            out.extend(parse_grid(g)?);
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("no β values: pass --beta or --grid".into()));
        }
        Ok(out)
    }
}

/// `start:stop:step` with `stop` included up to rounding. Each value is
/// `start + i·step` rounded to 15 significant digits.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("grid must be start:stop:step, got {text:?}"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidInput("grid has more than 10^6 points".into()));
    }
    Ok((0..count)
        .map(|i| fmt_f64(start + i as f64 * step).parse().expect("formatted float"))
        .collect())
}

/// Inputs read so far, folded into the configuration hash.
struct Session {
    args: Vec<String>,
    inputs: Vec<String>,
}

impl Session {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(text.clone());
        Ok(text)
    }

    fn load_code(&mut self, path: &Path) -> Result<Code> {
        let text = self.read(path)?;
        let file: CodeFile = serde_json::from_str(&text)?;
        file.into_code()
    }

    fn config(&self) -> String {
        let all: Vec<&str> = self.args.iter().chain(&self.inputs).map(String::as_str).collect();
        config_hash(&all)
    }
}

fn write_artifact(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn json_artifact(config: &str, body: Value) -> Vec<u8> {
    let mut obj = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    obj.insert("meta".into(), json_meta(config));
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

fn z_text(z: &ZValue) -> String {
    match z {
        ZValue::Finite(v) => fmt_f64(*v),
        ZValue::Divergent => "DIV".into(),
    }
}

fn dim_json(d: &Dimension) -> Value {
    match d {
        Dimension::Empty => Value::String("empty".into()),
        Dimension::Value(v) => Value::String(fmt_f64(*v)),
    }
}

fn float_json(x: f64) -> Value {
    Value::String(fmt_f64(x))
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            eprintln!("{}", error_record(ErrorKind::Input, msg.trim()));
            return exit_code(ErrorKind::Input);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("{}", error_record(e.kind(), &e.to_string()));
        return exit_code(e.kind());
    }
    let mut session = Session {
        // The output path is not part of the configuration.
        args: vec![format!("{:?}", cli.command)],
        inputs: Vec::new(),
    };
    match run(&cli, &mut session) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(e.kind(), &e.to_string()));
            exit_code(e.kind())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run(cli: &Cli, s: &mut Session) -> Result<()> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Params { code } => {
            let c = s.load_code(code)?;
            write_artifact(out, &json_artifact(&s.config(), params_json(&c)))
        }
        Command::Spoil { code, steps } => {
            let c = s.load_code(code)?;
            let points = spoil_descendants(&c, *steps)?;
            let mut buf = Vec::new();
            write_points_csv(&mut buf, &s.config(), &points)?;
            write_artifact(out, &buf)
        }
        Command::Cloud(args) => cloud(args, s, out),
        Command::Bound { points, q, svg } => bound(points, *q, svg.as_deref(), s, out),
        Command::Fractal { code, seed, depth } => {
            let c = s.load_code(code)?;
            let body = fractal_json(&c, *seed, *depth)?;
            write_artifact(out, &json_artifact(&s.config(), body))
        }
        Command::Partition { code, grid, series } => {
            let c = s.load_code(code)?;
            let mode = series.map_or(SumMode::Closed, SumMode::Series);
            let mut text = format!("{}\nbeta,value_or_DIV\n", header_comment(&s.config()));
            for beta in grid.values()? {
                let v = partition_function(&c, beta, mode)?;
                text.push_str(&format!("{},{}\n", fmt_f64(beta), z_text(&v.value)));
            }
            write_artifact(out, text.as_bytes())
        }
        Command::Phases { spec, grid } => phases(spec, grid, s, out),
        Command::Measure { spec, depth, exact } => {
            if *depth > MAX_MEASURE_DEPTH {
                return Err(Error::precondition(format!("depth {depth} exceeds the cap {MAX_MEASURE_DEPTH}")));
            }
            let text = s.read(spec)?;
            let base = spec.parent().unwrap_or(Path::new(".")).to_path_buf();
            let spec: MeasureSpec = serde_json::from_str(&text)?;
            let body = measure_json(&spec, &base, *depth, *exact, s)?;
            write_artifact(out, &json_artifact(&s.config(), body))
        }
        Command::Entropy { code, cap, beta } => {
            let c = s.load_code(code)?;
            let beta = beta.unwrap_or(c.rate_f64() + 1.0);
            let report = language_generating_at_beta(&c, beta, *cap)?;
            let z = partition_function(&c, beta, SumMode::Closed)?;
            let structure: Vec<Value> = report
                .structure
                .iter()
                .filter(|(_, v)| *v != BigUint::default())
                .map(|(n, v)| json!({ "length": n, "count": v.to_string() }))
                .collect();
            let body = json!({
                "beta": float_json(beta),
                "entropy": float_json(report.entropy),
                "radius": float_json(report.radius),
                "generating_function": z_text(&report.g_value),
                "partition_function": z_text(&z.value),
                "structure": structure,
            });
            write_artifact(out, &json_artifact(&s.config(), body))
        }
    }
}

fn params_json(c: &Code) -> Value {
    let p = c.params();
    json!({
        "q": p.q,
        "n": p.n,
        "size": p.size,
        "d": p.d,
        "k_real": float_json(p.k_real),
        "k_floor": p.k_floor,
        "R": format!("{}/{}", p.rate_floor.numer(), p.rate_floor.denom()),
        "R_real": float_json(p.rate_real),
        "delta": p.delta.map(|d| format!("{}/{}", d.numer(), d.denom())),
        "linear": linear_json(c),
        "singleton": c.satisfies_singleton(),
        "mds": c.meets_singleton(),
    })
}

/// Closure under subtraction over a prime field; null when undecided.
fn linear_json(c: &Code) -> Value {
    if c.is_known_linear() {
        Value::Bool(true)
    } else if !is_prime(c.q()) {
        Value::Bool(false)
    } else if c.size() <= 4096 {
        Value::Bool(is_closed_under_subtraction(c))
    } else {
        Value::Null
    }
}

fn random_linear(q: u32, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Code> {
    for _ in 0..64 {
        let rows: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect();
        match GeneratorMatrix::new(q, rows) {
            Ok(g) => return make_linear_code(&g),
            Err(Error::DependentRows { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::precondition(format!("no independent {k}×{n} generator found over F_{q}")))
}

fn cloud(args: &CloudArgs, s: &mut Session, out: Option<&Path>) -> Result<()> {
    if args.n_min == 0 || args.n_max < args.n_min {
        return Err(Error::InvalidInput("need 1 ≤ n-min ≤ n-max".into()));
    }
    if args.max_size < 2 {
        return Err(Error::InvalidInput("max-size must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut points = Vec::new();
    for n in args.n_min..=args.n_max {
        let space = (args.q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let cap = space.min(args.max_size as u128) as usize;
        for i in 0..args.count {
            let code = if args.linear {
                let mut k_max = 0;
                while k_max < n && (args.q as u128).pow(k_max as u32 + 1) <= args.max_size as u128 {
                    k_max += 1;
                }
                if k_max == 0 {
                    return Err(Error::precondition("max-size below q admits no linear code"));
                }
                random_linear(args.q, n, rng.gen_range(1..=k_max), &mut rng)?
            } else {
                random_code(args.q, n, rng.gen_range(2..=cap), rng.gen())?
            };
            points.push(CodePoint::from_code(&code, format!("n{n}-{i}"))?);
        }
    }
    points.sort();
    let config = s.config();
    let mut buf = Vec::new();
    write_points_csv(&mut buf, &config, &points)?;
    write_artifact(out, &buf)?;
    if let Some(svg) = &args.svg {
        let mut plot = SvgPlot::new();
        overlays(&mut plot, args.q)?;
        plot.points(&points, "steelblue");
        fs::write(svg, plot.render(&config))?;
    }
    Ok(())
}

fn overlays(plot: &mut SvgPlot, q: u32) -> Result<()> {
    let mut singleton = Vec::new();
    let mut plotkin = Vec::new();
    for i in 0..=200 {
        let delta = rational(i, 200);
        let (sb, pb) = classical_bounds(q, &delta)?;
        let x = crate::plane::rational_to_f64(&delta);
        // clipped to the plotted square
        singleton.push((x, crate::plane::rational_to_f64(&sb).min(1.0)));
        plotkin.push((x, crate::plane::rational_to_f64(&pb)));
    }
    plot.polyline(&singleton, "gray", "Singleton bound");
    plot.polyline(&plotkin, "darkorange", "Plotkin bound");
    Ok(())
}

fn bound(points: &Path, q: Option<u32>, svg: Option<&Path>, s: &mut Session, out: Option<&Path>) -> Result<()> {
    let text = s.read(points)?;
    let pts = read_points_csv(text.as_bytes())?;
    let report = empirical_envelope(&pts)?;
    let config = s.config();
    let mut buf = Vec::new();
    write_points_csv(&mut buf, &config, &report.envelope.vertices)?;
    write_artifact(out, &buf)?;
    if let Some(svg) = svg {
        let q = q.unwrap_or_else(|| {
            let qs: Vec<u32> = pts.iter().filter_map(|p| p.source.as_ref().map(|s| s.q)).collect();
            match qs.first() {
                Some(&first) if qs.len() == pts.len() && qs.iter().all(|&x| x == first) => first,
                _ => 2,
            }
        });
        let mut plot = SvgPlot::new();
        overlays(&mut plot, q)?;
        let line: Vec<(f64, f64)> = report
            .envelope
            .polyline()
            .iter()
            .map(|(d, r)| (crate::plane::rational_to_f64(d), crate::plane::rational_to_f64(r)))
            .collect();
        plot.polyline(&line, "crimson", "envelope of lower cones");
        plot.points(&pts, "steelblue");
        fs::write(svg, plot.render(&config))?;
    }
    Ok(())
}

fn fractal_json(c: &Code, seed: u64, depth: u32) -> Result<Value> {
    let scan = threshold_scan(c, seed)?;
    let mut rows = Vec::new();
    for row in &scan.rows {
        let state = projection_state_and_vn_dim(c, &row.witness)?;
        rows.push(json!({
            "ell": row.ell,
            "max_count": row.max_count,
            "witness": row.witness.to_string(),
            "vn_dim": fmt_rational(&state.vn_dim_exact),
            "dim_cap_pi": state.dim_check_pi.as_ref().map(dim_json),
            "dim_cap_spi": dim_json(&state.dim_check_spi),
        }));
    }
    let rate = exact_rate(c);
    let mut boxes = Vec::new();
    for m in 1..=depth {
        let est = box_count_estimate(c, m)?;
        boxes.push(json!({
            "depth": m,
            "value": float_json(est.to_f64()),
            "exact": est.exactly_equals(&rate),
        }));
    }
    Ok(json!({
        "n": c.n(),
        "d": scan.d,
        "dim_sc": float_json(c.k_real() / c.n() as f64),
        "dim_sc_exact": rate.to_rational().map(|r| fmt_rational(&r)),
        "exhaustive": scan.exhaustive,
        "threshold_holds": scan.threshold_holds(),
        "rows": rows,
        "box_counts": boxes,
    }))
}

/// A code given inline or as a path relative to the spec file.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CodeRef {
    Path(PathBuf),
    Inline(CodeFile),
}

fn resolve_code(r: &CodeRef, base: &Path, s: &mut Session) -> Result<Code> {
    match r {
        CodeRef::Inline(f) => f.clone().into_code(),
        CodeRef::Path(p) => {
            let path = if p.is_absolute() { p.clone() } else { base.join(p) };
            s.load_code(&path)
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PhaseSpec {
    /// Partition function of one code.
    Code { code: CodeRef },
    /// Product system; `axes` gives one β list per factor, otherwise all
    /// factors share the grid value.
    Product { codes: Vec<CodeRef>, axes: Option<Vec<Vec<f64>>> },
    /// Family of parameters or codes.
    Family {
        q: u32,
        #[serde(default)]
        members: Vec<MemberSpec>,
        /// Synthetic family `k_r = r`, `n_r = ratio·r`.
        synthetic: Option<SyntheticSpec>,
        #[serde(default = "default_terms")]
        terms: usize,
    },
}

fn yes() -> bool {
    true
}

fn default_terms() -> usize {
    64
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemberSpec {
    n: usize,
    /// Decimal integer string (sizes may exceed 64 bits).
    size: String,
    d: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticSpec {
    ratio: usize,
    count: usize,
}

fn phases(spec_path: &Path, grid: &GridArgs, s: &mut Session, out: Option<&Path>) -> Result<()> {
    let text = s.read(spec_path)?;
    let spec: PhaseSpec = serde_json::from_str(&text)?;
    let base = spec_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut body = String::new();
    match &spec {
        PhaseSpec::Code { code } => {
            let c = resolve_code(code, &base, s)?;
            body.push_str("beta,value_or_DIV\n");
            for beta in grid.values()? {
                let v = partition_function(&c, beta, SumMode::Closed)?;
                body.push_str(&format!("{},{}\n", fmt_f64(beta), z_text(&v.value)));
            }
        }
        PhaseSpec::Product { codes, axes } => {
            let codes: Vec<Code> = codes.iter().map(|c| resolve_code(c, &base, s)).collect::<Result<_>>()?;
            let refs: Vec<&Code> = codes.iter().collect();
            match axes {
                Some(axes) => {
                    let cols: Vec<String> = (1..=codes.len()).map(|i| format!("beta_{i}")).collect();
                    body.push_str(&format!("{},value_or_DIV\n", cols.join(",")));
                    for cell in product_partition_grid(&refs, axes)? {
                        let betas: Vec<String> = cell.betas.iter().map(|b| fmt_f64(*b)).collect();
                        body.push_str(&format!("{},{}\n", betas.join(","), z_text(&cell.value)));
                    }
                }
                None => {
                    body.push_str("beta,value_or_DIV\n");
                    for beta in grid.values()? {
                        let systems: Vec<(&Code, f64)> = refs.iter().map(|c| (*c, beta)).collect();
                        body.push_str(&format!("{},{}\n", fmt_f64(beta), z_text(&product_partition(&systems)?)));
                    }
                }
            }
        }
        PhaseSpec::Family { q, members, synthetic, terms } => {
            let family = match (synthetic, members.is_empty()) {
                (Some(syn), true) => CodeFamily::synthetic(*q, syn.ratio, syn.count)?,
                (None, false) => {
                    let ms = members
                        .iter()
                        .map(|m| {
                            let size: BigUint = m
                                .size
                                .parse()
                                .map_err(|_| Error::InvalidInput(format!("bad member size {:?}", m.size)))?;
                            FamilyMember::from_parameters(*q, m.n, size, m.d)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    CodeFamily::new(ms)?
                }
                _ => return Err(Error::InvalidInput("family needs exactly one of members or synthetic".into())),
            };
            let letters = family_letter_terms(&family, *terms);
            let critical = family_critical_beta(&family, *terms)?;
            body.push_str(&format!("# sup_rate={} critical_beta={}\n", fmt_f64(family.sup_rate()), fmt_f64(critical)));
            body.push_str("beta,value_or_DIV,lambda,zeta_partial,zeta_class\n");
            for beta in grid.values()? {
                let l = crate::thermo::lambda_series(&letters, beta);
                let zeta = family_zeta(&family, beta, *terms)?;
                let class = match zeta.class {
                    crate::thermo::ZetaClass::Convergent { .. } => "convergent",
                    crate::thermo::ZetaClass::Divergent => "divergent",
                    crate::thermo::ZetaClass::Unclassified => "unclassified",
                };
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt_f64(beta),
                    z_text(&l.z),
                    fmt_f64(l.lambda),
                    fmt_f64(zeta.partial_sum),
                    class
                ));
            }
        }
    }
    let text = format!("{}\n{body}", header_comment(&s.config()));
    write_artifact(out, text.as_bytes())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedSpec {
    #[serde(default)]
    prefix: Vec<usize>,
    period: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum MapSpec {
    Encoder,
    Decoder,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureSpec {
    /// Uniform `(#C)^{−|w|}` on a code.
    Hausdorff { code: CodeRef },
    /// Keane potential from energies (`lambda` or `lambda2` with `beta`) or
    /// rational weights (`weights` or `weights2`).
    Potential {
        lambda: Option<Vec<f64>>,
        lambda2: Option<Vec<Vec<f64>>>,
        beta: Option<f64>,
        weights: Option<Vec<String>>,
        weights2: Option<Vec<Vec<String>>>,
        seed: Option<SeedSpec>,
        /// With `false`, unnormalized weights give plain cylinder products.
        #[serde(default = "yes")]
        require_keane: bool,
    },
    /// Normalized product measure `Π e^{−βλ}/Z^m`.
    Induced { lambda: Vec<f64>, beta: f64 },
    /// Perron–Frobenius measure of a positive matrix `W[a][b]`.
    Markov {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        x0: usize,
    },
    /// Pushforward of the uniform measure under an encoder or decoder.
    Pushforward { code: CodeRef, map: MapSpec },
    /// `Σ α_i μ_i`.
    Mixture { components: Vec<MeasureSpec>, alphas: Vec<String> },
}

enum Built {
    Exact(CylinderAssignment<BigRational>),
    Float(CylinderAssignment<f64>, Map<String, Value>),
}

impl Built {
    fn to_float(&self) -> CylinderAssignment<f64> {
        match self {
            Built::Exact(a) => a.to_f64(),
            Built::Float(a, _) => a.clone(),
        }
    }
}

fn build_measure(spec: &MeasureSpec, depth: usize, s: &mut Session, base: &Path) -> Result<Built> {
    let mut extra = Map::new();
    let built = match spec {
        MeasureSpec::Hausdorff { code } => Built::Exact(hausdorff_assignment(&resolve_code(code, base, s)?, depth)?),
        MeasureSpec::Potential { lambda, lambda2, beta, weights, weights2, seed, require_keane } => {
            let parse_all = |v: &[String]| v.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>();
            let given = [lambda.is_some(), lambda2.is_some(), weights.is_some(), weights2.is_some()];
            if given.iter().filter(|&&g| g).count() != 1 {
                return Err(Error::InvalidInput("potential needs exactly one of lambda, lambda2, weights, weights2".into()));
            }
            let letters = lambda
                .as_ref()
                .map(Vec::len)
                .or(lambda2.as_ref().map(Vec::len))
                .or(weights.as_ref().map(Vec::len))
                .or(weights2.as_ref().map(Vec::len))
                .unwrap_or(0);
            let seed = match seed {
                Some(sd) => Seed::new(sd.prefix.clone(), sd.period.clone(), letters)?,
                None => Seed::constant(0),
            };
            let products = |t: &ExactWeights| {
                if *require_keane {
                    measure_from_potential(t, &seed, depth)
                } else {
                    cylinder_products(t, &seed, depth)
                }
            };
            if let Some(w) = weights {
                Built::Exact(products(&ExactWeights::Depth1(parse_all(w)?).new()?)?)
            } else if let Some(w) = weights2 {
                let ex = ExactWeights::Depth2(w.iter().map(|r| parse_all(r)).collect::<Result<_>>()?).new()?;
                Built::Exact(products(&ex)?)
            } else {
                let beta = beta.ok_or_else(|| Error::InvalidInput("energies need beta".into()))?;
                let kind = match (lambda, lambda2) {
                    (Some(l), _) => PotentialKind::Depth1(l.clone()),
                    (_, Some(m)) => PotentialKind::Depth2(m.clone()),
                    _ => unreachable!("one form was checked above"),
                };
                let pot = Potential::new(kind, beta)?;
                extra.insert("keane_defect".into(), float_json(pot.keane_defect()));
                let mu = if *require_keane {
                    measure_from_potential(&pot, &seed, depth)?
                } else {
                    cylinder_products(&pot, &seed, depth)?
                };
                Built::Float(mu, extra)
            }
        }
        MeasureSpec::Induced { lambda, beta } => {
            Built::Float(induced_multifractal_uniform(lambda, *beta, depth)?, extra)
        }
        MeasureSpec::Markov { matrix, x0 } => {
            let (pf, mu) = induced_multifractal_pf(matrix, *x0, depth)?;
            extra.insert("rho".into(), float_json(pf.rho));
            extra.insert("eigenvector".into(), pf.eigenvector.iter().map(|x| float_json(*x)).collect());
            extra.insert("residual".into(), float_json(pf.residual));
            extra.insert("iterations".into(), pf.iterations.into());
            Built::Float(mu, extra)
        }
        MeasureSpec::Pushforward { code, map } => {
            let c = resolve_code(code, base, s)?;
            let f = match map {
                MapSpec::Encoder => MonotoneMap::encoder(&c)?,
                MapSpec::Decoder => MonotoneMap::nearest_decoder(&c)?,
            };
            Built::Exact(pushforward_semimeasure(&f, depth)?)
        }
        MeasureSpec::Mixture { components, alphas } => {
            let alphas: Vec<BigRational> = alphas.iter().map(|a| parse_rational(a)).collect::<Result<_>>()?;
            let parts: Vec<Built> = components
                .iter()
                .map(|c| build_measure(c, depth, s, base))
                .collect::<Result<_>>()?;
            if parts.iter().all(|p| matches!(p, Built::Exact(_))) {
                let exact: Vec<&CylinderAssignment<BigRational>> = parts
                    .iter()
                    .map(|p| match p {
                        Built::Exact(a) => a,
                        Built::Float(..) => unreachable!("all parts are exact"),
                    })
                    .collect();
                Built::Exact(mixture_semimeasure(&exact, &alphas)?)
            } else {
                let floats: Vec<CylinderAssignment<f64>> = parts.iter().map(Built::to_float).collect();
                let refs: Vec<&CylinderAssignment<f64>> = floats.iter().collect();
                let alphas: Vec<f64> = alphas.iter().map(MassValue::to_f64).collect();
                Built::Float(mixture_semimeasure(&refs, &alphas)?, extra)
            }
        }
    };
    Ok(built)
}

fn word_key(word: &[usize]) -> String {
    word.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
}

fn levels_json<V: MassValue>(mu: &CylinderAssignment<V>) -> Vec<Value> {
    (0..=mu.depth())
        .map(|j| {
            let map: BTreeMap<String, String> = mu
                .level(j)
                .iter()
                .enumerate()
                .map(|(i, v)| (word_key(&crate::measures::index_word(i, mu.letters(), j)), v.render()))
                .collect();
            json!(map)
        })
        .collect()
}

fn measure_json(spec: &MeasureSpec, base: &Path, depth: usize, exact: bool, s: &mut Session) -> Result<Value> {
    let built = build_measure(spec, depth, s, base)?;
    let float = built.to_float();
    let (class, levels, rational, mut extra) = match &built {
        Built::Exact(a) if exact => (check_semimeasure(a), levels_json(a), true, Map::new()),
        Built::Exact(a) => (check_semimeasure(a), levels_json(&a.to_f64()), false, Map::new()),
        Built::Float(a, extra) => {
            if exact {
                log::warn!("exact output unavailable for floating-point inputs; writing floats");
            }
            (check_semimeasure(a), levels_json(a), false, extra.clone())
        }
    };
    if class == MeasureClass::Semimeasure && depth >= 1 {
        let letters: Vec<f64> = float.level(1).to_vec();
        if let Ok(bc) = critical_beta_semimeasure(&letters) {
            extra.insert("critical_beta".into(), float_json(bc));
        }
    }
    let mut obj = Map::new();
    obj.insert("letters".into(), float.letters().into());
    obj.insert("depth".into(), depth.into());
    obj.insert("class".into(), class.to_string().into());
    obj.insert("exact".into(), rational.into());
    obj.insert(
        "layer_mass".into(),
        (0..=depth).map(|j| float_json(float.layer_mass(j))).collect(),
    );
    obj.insert("levels".into(), Value::Array(levels));
    obj.extend(extra);
    Ok(Value::Object(obj))
}
