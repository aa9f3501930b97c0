//! `mobius`: command-line front end for the semigroup toolkit.
//!
//! Exit codes: 0 decisive, 1 input error, 2 borderline or undecided,
//! 3 resource cap.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobius_semigroup::classify::{classify_pair, verify_pair_verdict, PairStatus, PairVerdict};
use mobius_semigroup::cocycle::{find_multicone, in_e_bounded, yoccoz_counterexample, CounterexampleConfig, Multicone, SchottkyParams};
use mobius_semigroup::dynamics::{
    continued_fraction_check, hausdorff, limit_set_svg, oracle_refute, run_sequence, run_tree, sample_limit_set, DigitStream, Outcome,
    Side,
};
use mobius_semigroup::elementary::{classify_elementary, semidiscrete_in_mj};
use mobius_semigroup::{Arc, BoundaryPoint, Error, Limits, Moebius, Tolerances};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "mobius", version, about = "Semidiscreteness and inverse-freeness of real Moebius semigroups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Word length bound.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long = "max-steps", global = true)]
    max_steps: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// A generator as `a,b,c,d` or `name=a,b,c,d`; repeat for more.
    #[arg(long = "gen", global = true, allow_hyphen_values = true)]
    gens: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide semidiscreteness and inverse-freeness of a two-generator semigroup.
    ClassifyPair,
    /// Classify a semigroup with a common fixed point or invariant pair.
    ClassifyElementary,
    /// Semidiscreteness inside the semigroup of maps sending an interval into itself.
    ClassifyMj {
        /// Endpoints `s,t` of the interval, `inf` allowed.
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
    },
    /// Run composition sequences and report how the orbit of i behaves.
    Simulate {
        /// Comma-separated digits, used once.
        #[arg(long)]
        digits: Option<String>,
        /// Repeat the digits instead of using them once.
        #[arg(long)]
        periodic: bool,
        /// Number of seeded random sequences.
        #[arg(long, default_value_t = 1)]
        runs: u64,
        /// Run every digit sequence of length `--depth`.
        #[arg(long)]
        tree: bool,
    },
    /// Sample forward and backward limit sets.
    LimitSet {
        #[arg(long, value_enum, default_value_t = SideArg::Both)]
        side: SideArg,
    },
    /// The pair z + lambda, z/(mu z + 1).
    CfCheck {
        #[arg(allow_negative_numbers = true)]
        lambda: f64,
        #[arg(allow_negative_numbers = true)]
        mu: f64,
    },
    /// Search for a multicone and for elliptic words.
    UhCheck,
    /// Build the four-map tuple from a Schottky pair and perturb it.
    Counterexample {
        /// Comma-separated perturbation radii.
        #[arg(long)]
        radii: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Search short words for elliptic or near-identity values, or re-check
    /// an emitted verdict.
    Oracle {
        #[arg(long)]
        verify: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SideArg {
    Forward,
    Backward,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NamedGen {
    name: String,
    matrix: [f64; 4],
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OutputConfig {
    format: Option<Format>,
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "snake_case")]
struct RunConfig {
    generators: Vec<NamedGen>,
    tolerances: Tolerances,
    limits: Limits,
    seed: Option<u64>,
    depth: Option<usize>,
    max_steps: Option<u64>,
    /// Interval endpoints for classify-mj.
    interval: Option<[BoundaryPoint; 2]>,
    output: OutputConfig,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    seed: u64,
    result: T,
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::CapExceeded(_) => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome2 = std::result::Result<u8, Failure>;

/// JSON with every float written to 17 significant digits.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write!(w, "{:.16e}", v)
    }
    fn write_f32<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    v.serialize(&mut ser).expect("serializable report");
    let mut s = String::from_utf8(buf).expect("utf-8 json");
    s.push('\n');
    s
}

/// Pulls `--tol-KEY VALUE` and `--tol-KEY=VALUE` out of the argument list.
fn extract_tol_flags(args: Vec<String>) -> std::result::Result<(Vec<String>, Vec<(String, String)>), String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if let Some(key) = a.strip_prefix("--tol-") {
            if let Some((k, v)) = key.split_once('=') {
                tols.push((k.to_string(), v.to_string()));
            } else {
                let v = it.next().ok_or_else(|| format!("--tol-{key} needs a value"))?;
                tols.push((key.to_string(), v));
            }
        } else {
            rest.push(a);
        }
    }
    Ok((rest, tols))
}

fn parse_gen(s: &str, i: usize) -> std::result::Result<NamedGen, String> {
    let (name, body) = match s.split_once('=') {
        Some((n, b)) => (n.trim().to_string(), b),
        None => (mobius_semigroup::word::letter_char(i as u8).to_string(), s),
    };
    let v: Vec<f64> = body
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad matrix entry {x:?} in --gen {s}")))
        .collect::<std::result::Result<_, _>>()?;
    let m: [f64; 4] = v.try_into().map_err(|_| format!("--gen {s} needs four entries"))?;
    Ok(NamedGen { name, matrix: m })
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}"))).collect()
}

fn parse_point(s: &str) -> std::result::Result<BoundaryPoint, String> {
    serde_json::from_value(Value::String(s.trim().to_string())).map_err(|e| e.to_string())
}

fn load_config(common: &Common, tols: &[(String, String)]) -> std::result::Result<RunConfig, String> {
    let mut cfg = match &common.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| format!("bad config {}: {e}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if !common.gens.is_empty() {
        cfg.generators = common.gens.iter().enumerate().map(|(i, s)| parse_gen(s, i)).collect::<std::result::Result<_, _>>()?;
    }
    for (k, v) in tols {
        let x: f64 = v.parse().map_err(|_| format!("bad value {v:?} for --tol-{k}"))?;
        if !cfg.tolerances.set(k, x) {
            return Err(format!("unknown tolerance --tol-{k} or nonpositive value"));
        }
    }
    if !cfg.tolerances.is_valid() {
        return Err("tolerances must be positive".into());
    }
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.depth.is_some() {
        cfg.depth = common.depth;
    }
    if common.max_steps.is_some() {
        cfg.max_steps = common.max_steps;
    }
    if common.format.is_some() {
        cfg.output.format = common.format;
    }
    if common.out.is_some() {
        cfg.output.path = common.out.clone();
    }
    Ok(cfg)
}

fn generators(cfg: &RunConfig) -> std::result::Result<Vec<Moebius>, Failure> {
    cfg.generators
        .iter()
        .map(|g| {
            let [a, b, c, d] = g.matrix;
            Moebius::new(a, b, c, d).map_err(|e| Failure::Input(format!("generator {}: {e}", g.name)))
        })
        .collect()
}

fn emit(cfg: &RunConfig, text: &str) -> std::result::Result<(), Failure> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn emit_json<T: Serialize>(command: &str, cfg: &RunConfig, result: T) -> std::result::Result<(), Failure> {
    let env = Envelope { command, config: cfg, seed: cfg.seed.unwrap_or(0), result };
    emit(cfg, &to_json(&env))
}

fn run(cmd: &Cmd, cfg: &mut RunConfig) -> Outcome2 {
    let tol = cfg.tolerances;
    let limits = cfg.limits;
    let seed = *cfg.seed.get_or_insert(0);
    match cmd {
        Cmd::ClassifyPair => {
            let gens = generators(cfg)?;
            let [f, g]: [Moebius; 2] = gens.try_into().map_err(|_| Failure::Input("classify-pair needs exactly two generators".into()))?;
            let v = classify_pair(&f, &g, &tol, &limits)?;
            let code = if v.status == PairStatus::Borderline || v.flags.undetermined { 2 } else { 0 };
            emit_json("classify-pair", cfg, &v)?;
            Ok(code)
        }
        Cmd::ClassifyElementary => {
            let gens = generators(cfg)?;
            let v = classify_elementary(&gens, &tol)?;
            emit_json("classify-elementary", cfg, &v)?;
            Ok(if v.undetermined { 2 } else { 0 })
        }
        Cmd::ClassifyMj { interval } => {
            let gens = generators(cfg)?;
            if let Some(s) = interval {
                let (a, b) = s.split_once(',').ok_or_else(|| Failure::Input("--interval needs s,t".into()))?;
                cfg.interval = Some([parse_point(a).map_err(Failure::Input)?, parse_point(b).map_err(Failure::Input)?]);
            }
            let [p, q] = cfg.interval.ok_or_else(|| Failure::Input("classify-mj needs an interval".into()))?;
            let j = Arc::new(p, q)?;
            let v = semidiscrete_in_mj(&gens, &j, &tol)?;
            emit_json("classify-mj", cfg, &v)?;
            Ok(if v.undetermined { 2 } else { 0 })
        }
        Cmd::Simulate { digits, periodic, runs, tree } => {
            let gens = generators(cfg)?;
            let max_steps = *cfg.max_steps.get_or_insert(10_000);
            let reports = if *tree {
                let depth = *cfg.depth.get_or_insert(8);
                run_tree(&gens, depth as u32, &tol, &limits)?
            } else if let Some(d) = digits {
                let ds = d
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| Failure::Input(format!("bad digit {x:?}"))))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let stream = if *periodic { DigitStream::Periodic { digits: ds } } else { DigitStream::Explicit { digits: ds } };
                vec![run_sequence(&gens, &stream, max_steps, &tol, &limits)?]
            } else {
                (0..*runs)
                    .map(|k| run_sequence(&gens, &DigitStream::Seeded { seed: seed.wrapping_add(k) }, max_steps, &tol, &limits))
                    .collect::<mobius_semigroup::Result<Vec<_>>>()?
            };
            let undecided = reports.iter().any(|r| r.outcome == Outcome::Undecided);
            emit_json("simulate", cfg, &reports)?;
            Ok(if undecided { 2 } else { 0 })
        }
        Cmd::LimitSet { side } => {
            let gens = generators(cfg)?;
            let depth = *cfg.depth.get_or_insert(10);
            let sides: &[Side] = match side {
                SideArg::Forward => &[Side::Forward],
                SideArg::Backward => &[Side::Backward],
                SideArg::Both => &[Side::Forward, Side::Backward],
            };
            let samples = sides.iter().map(|s| sample_limit_set(&gens, *s, depth, &tol, &limits)).collect::<mobius_semigroup::Result<Vec<_>>>()?;
            match cfg.output.format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut text = String::new();
                    for (i, s) in samples.iter().enumerate() {
                        let csv = s.to_csv();
                        let body = if i == 0 { csv.as_str() } else { csv.split_once('\n').map(|x| x.1).unwrap_or("") };
                        text.push_str(body);
                    }
                    emit(cfg, &text)?;
                }
                Format::Svg => emit(cfg, &limit_set_svg(&samples))?,
                Format::Json => {
                    #[derive(Serialize)]
                    struct R<'a> {
                        samples: &'a [mobius_semigroup::dynamics::LimitSetSample],
                        hausdorff: Option<f64>,
                    }
                    let h = (samples.len() == 2).then(|| hausdorff(&samples[0].points, &samples[1].points));
                    emit_json("limit-set", cfg, R { samples: &samples, hausdorff: h })?;
                }
            }
            Ok(0)
        }
        Cmd::CfCheck { lambda, mu } => {
            let r = continued_fraction_check(*lambda, *mu, &tol);
            emit_json("cf-check", cfg, &r)?;
            Ok(0)
        }
        Cmd::UhCheck => {
            let mut gens = generators(cfg)?;
            if gens.is_empty() {
                gens = SchottkyParams::default().tuple().to_vec();
            }
            let depth = *cfg.depth.get_or_insert(8);
            let search = find_multicone(&gens, limits.seed_depth, limits.max_iters, &tol, &limits)?;
            let elliptic = in_e_bounded(&gens, depth, &tol, &limits)?;
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct R<'a> {
                generators: &'a [Moebius],
                multicone_search: mobius_semigroup::cocycle::MulticoneSearch,
                elliptic_search: mobius_semigroup::cocycle::EllipticSearch,
                consistent: bool,
            }
            let consistent = !(search.multicone.is_some() && elliptic.elliptic.is_some());
            emit_json("uh-check", cfg, R { generators: &gens, multicone_search: search, elliptic_search: elliptic, consistent })?;
            Ok(0)
        }
        Cmd::Counterexample { radii, samples } => {
            let gens = generators(cfg)?;
            let params = match gens.len() {
                0 => SchottkyParams::default(),
                2 => SchottkyParams { f: gens[0], h: gens[1] },
                _ => return Err(Failure::Input("counterexample takes no generators or exactly two".into())),
            };
            let mut cc = CounterexampleConfig { seed, ..Default::default() };
            cc.depth = *cfg.depth.get_or_insert(cc.depth);
            if let Some(r) = radii {
                cc.radii = parse_list(r).map_err(Failure::Input)?;
            }
            if let Some(n) = samples {
                cc.samples_per_radius = *n;
            }
            let report = yoccoz_counterexample(&params, &cc, &tol, &limits)?;
            let code = if report.passes { 0 } else { 2 };
            emit_json("counterexample", cfg, &report)?;
            Ok(code)
        }
        Cmd::Oracle { verify: Some(path) } => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("bad json: {e}")))?;
            let body = v.get("result").cloned().unwrap_or(v);
            let (ok, checked) = verify_value(&body, &tol)?;
            #[derive(Serialize)]
            struct R {
                ok: bool,
                checked: String,
            }
            emit_json("oracle-verify", cfg, R { ok, checked })?;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::Oracle { verify: None } => {
            let gens = generators(cfg)?;
            let depth = *cfg.depth.get_or_insert(12);
            let w = oracle_refute(&gens, depth, &tol, &limits)?;
            #[derive(Serialize)]
            struct R {
                depth: usize,
                witness: Option<mobius_semigroup::dynamics::OracleWitness>,
            }
            emit_json("oracle", cfg, R { depth, witness: w })?;
            Ok(0)
        }
    }
}

/// Re-checks a pair verdict or a multicone from an emitted report.
fn verify_value(body: &Value, tol: &Tolerances) -> std::result::Result<(bool, String), Failure> {
    if body.get("status").is_some() {
        let v: PairVerdict = serde_json::from_value(body.clone()).map_err(|e| Failure::Input(format!("bad verdict: {e}")))?;
        let r = verify_pair_verdict(&v, tol);
        return Ok((r.ok, r.checked));
    }
    if let (Some(gens), Some(search)) = (body.get("generators"), body.get("multiconeSearch")) {
        let gens: Vec<Moebius> = serde_json::from_value(gens.clone()).map_err(|e| Failure::Input(e.to_string()))?;
        return Ok(match search.get("multicone").filter(|m| !m.is_null()) {
            Some(m) => {
                let mc: Multicone = serde_json::from_value(m.clone()).map_err(|e| Failure::Input(e.to_string()))?;
                (mc.verify(&gens), "multicone strict containment".into())
            }
            None => (true, "no multicone to check".into()),
        });
    }
    Err(Failure::Input("nothing to verify: expected a pair verdict or a uh-check report".into()))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (args, tols) = match extract_tol_flags(args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut cfg = match load_config(&cli.common, &tols) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli.cmd, &mut cfg) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Cap(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tol_flags_are_extracted() {
        let args: Vec<String> = ["mobius", "oracle", "--tol-near", "1e-4", "--tol-cls=1e-8", "--depth", "3"].iter().map(|s| s.to_string()).collect();
        let (rest, tols) = extract_tol_flags(args).unwrap();
        assert_eq!(rest, ["mobius", "oracle", "--depth", "3"]);
        assert_eq!(tols, [("near".to_string(), "1e-4".to_string()), ("cls".to_string(), "1e-8".to_string())]);
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(to_json(&0.1f64), "1.0000000000000001e-1\n");
        let back: f64 = serde_json::from_str(to_json(&(1.0f64 / 3.0)).trim()).unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn gen_parsing() {
        let g = parse_gen("f=1,1,0,1", 0).unwrap();
        assert_eq!(g.name, "f");
        assert_eq!(parse_gen("0,-1,1,0", 1).unwrap().name, "G");
        assert!(parse_gen("1,2,3", 0).is_err());
    }
}
