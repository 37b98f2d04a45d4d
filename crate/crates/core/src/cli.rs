//! Command-line front end. [`run`] takes the argument list and output streams
//! and returns the process exit code, so it is usable from tests.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datamodel::{padded_dim, parse_libsvm, parse_set_file, BinarySet, PairSpec};
use crate::encoding::{
    bbit, expand, export_libsvm, read_bbit_sketches, write_bbit_sketches, Coding, ExpandedVector,
};
use crate::error::{invalid, Error, Result};
use crate::estimate::{estimate_r_mat, estimate_r_random, estimate_r_zero, pair_stats};
use crate::learner::{accuracy, predict, train_logreg, LinearModel, Pipeline};
use crate::lsh::{build_index, LshIndex};
use crate::montecarlo::{plot_script, rows_to_csv, run_validation, word_pairs, McConfig, McScheme};
use crate::rng::{derive_seed, mix64};
use crate::sketch::{read_sketches, sketch_all, sketch_fixed, write_sketches, Scheme};
use crate::theory::{self, exact, TheoryInput, VarMode};
use crate::permutation::generate_permutation;

#[derive(Parser, Debug)]
#[command(name = "oph", version, about = "One permutation hashing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sketch every set of an input file.
    Sketch(SketchArgs),
    /// Resemblance estimates between sketches.
    Estimate(EstimateArgs),
    /// Evaluate a closed-form quantity.
    Theory(TheoryArgs),
    /// Monte Carlo check of the closed forms.
    Validate(ValidateArgs),
    /// Truncate sketches to b bits.
    Expand(ExpandArgs),
    /// Expand b-bit sketches and write libsvm text.
    ExportLibsvm(ExportArgs),
    /// Build an LSH index.
    LshBuild(LshBuildArgs),
    /// Query an LSH index.
    LshQuery(LshQueryArgs),
    /// Train logistic regression on sketched or raw features.
    Train(TrainArgs),
    /// Predict with a trained model.
    Predict(PredictArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    /// `id: i1 i2 ...` with 0-based indices.
    Set,
    /// `label idx:val ...` with 1-based indices.
    Libsvm,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input file.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension (.svm/.libsvm) when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Feature-space size D; inferred from the data when omitted.
    #[arg(long = "D")]
    dim: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    Fixed,
    Variable,
    Mperm,
}

#[derive(Args, Debug)]
struct SketchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "fixed")]
    scheme: SchemeArg,
    #[arg(long)]
    k: usize,
    /// Permutations for the m-permutation scheme.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    sketches: PathBuf,
    /// Pairs as `i,j` (0-based positions in the file); all pairs when omitted.
    #[arg(long = "pair", value_parser = parse_pair)]
    pairs: Vec<(usize, usize)>,
    /// Also report the random-coding estimate with this seed.
    #[arg(long)]
    random_seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
enum Quantity {
    ENemp,
    VarNemp,
    ENmat,
    VarNmat,
    Cov,
    VarRmat,
    VarRmatApprox,
    G,
    Dist,
    Approx,
    Variable,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[arg(long = "D", default_value_t = 1 << 16)]
    dim: u64,
    #[arg(long)]
    k: u64,
    /// Union size; shorthand for `--f1 f --f2 0 --a 0`.
    #[arg(long)]
    f: Option<u64>,
    #[arg(long)]
    f1: Option<u64>,
    #[arg(long)]
    f2: Option<u64>,
    #[arg(long)]
    a: Option<u64>,
    /// Evaluate in rational arithmetic where available.
    #[arg(long)]
    exact: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum McSchemeArg {
    Fixed,
    Variable,
    Mperm,
    Kperm,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// CSV of `name,f1,f2,a` rows; the fifteen built-in word pairs when omitted.
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long = "D", default_value_t = 1 << 16)]
    dim: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 64, 512, 4096])]
    k: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "fixed")]
    scheme: McSchemeArg,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a plotting script that reads the CSV output.
    #[arg(long, requires = "output")]
    plot_script: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    sketches: PathBuf,
    #[arg(long)]
    b: u8,
    #[arg(long)]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CodingArg {
    Zero,
    Random,
}

impl From<CodingArg> for Coding {
    fn from(c: CodingArg) -> Self {
        match c {
            CodingArg::Zero => Coding::Zero,
            CodingArg::Random => Coding::Random,
        }
    }
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// b-bit sketch file written by `expand`.
    #[arg(long)]
    sketches: PathBuf,
    #[arg(long, value_enum, default_value = "zero")]
    coding: CodingArg,
    /// Seed for random coding.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One label per line; label 0 for every vector when omitted.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Significant digits for values; shortest round-trip when omitted.
    #[arg(long)]
    digits: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LshBuildArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "L", default_value_t = 4)]
    tables: usize,
    #[arg(long)]
    b: u8,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct LshQueryArgs {
    #[arg(long)]
    index: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// libsvm training data; labels > 0 are positive.
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "D")]
    dim: Option<u64>,
    #[arg(long, required_unless_present = "raw")]
    k: Option<usize>,
    #[arg(long, required_unless_present = "raw")]
    b: Option<u8>,
    #[arg(long, value_enum, default_value = "zero")]
    coding: CodingArg,
    /// Train on the raw binary features instead of sketches.
    #[arg(long, conflicts_with_all = ["k", "b"])]
    raw: bool,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 20)]
    epochs: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// libsvm data; accuracy is reported on standard error.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    let a = a.trim().parse().map_err(|_| format!("bad index {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad index {b:?}"))?;
    Ok((a, b))
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code: 0 on success, 2 for usage or parameter errors, 1 otherwise.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidParameter(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Sketch(a) => cmd_sketch(a, out, err),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Theory(a) => cmd_theory(a, out),
        Command::Validate(a) => cmd_validate(a, out, err),
        Command::Expand(a) => cmd_expand(a, out),
        Command::ExportLibsvm(a) => cmd_export(a, out),
        Command::LshBuild(a) => cmd_lsh_build(a, out, err),
        Command::LshQuery(a) => cmd_lsh_query(a, out),
        Command::Train(a) => cmd_train(a, out, err),
        Command::Predict(a) => cmd_predict(a, out, err),
    }
}

/// Uses the given seed or picks one from the clock and reports it.
fn seed_or_default(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let s = mix64(nanos, std::process::id() as u64);
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?))
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

struct Loaded {
    ids: Vec<String>,
    sets: Vec<BinarySet>,
}

fn load(args: &InputArgs) -> Result<Loaded> {
    let format = args.format.unwrap_or_else(|| {
        match args.input.extension().and_then(|e| e.to_str()) {
            Some("svm" | "libsvm") => Format::Libsvm,
            _ => Format::Set,
        }
    });
    let r = open(&args.input)?;
    Ok(match format {
        Format::Set => {
            let rows = parse_set_file(r, args.dim)?;
            let (ids, sets) = rows.into_iter().unzip();
            Loaded { ids, sets }
        }
        Format::Libsvm => {
            let d = parse_libsvm(r, true, args.dim)?;
            Loaded {
                ids: (0..d.sets.len()).map(|i| i.to_string()).collect(),
                sets: d.sets,
            }
        }
    })
}

fn cmd_sketch(a: SketchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = load(&a.input)?;
    let seed = seed_or_default(a.seed, err);
    let scheme = match a.scheme {
        SchemeArg::Fixed => Scheme::FixedLength,
        SchemeArg::Variable => Scheme::VariableLength,
        SchemeArg::Mperm => Scheme::MPerm(a.m),
    };
    let sketches = sketch_all(&data.sets, scheme, a.k, seed)?;
    let mut w = create(&a.output)?;
    write_sketches(&mut w, &sketches)?;
    w.flush()?;
    writeln!(
        out,
        "{} sketches, scheme {}, k = {}, D_eff = {}, seed = {seed}",
        sketches.len(),
        scheme.name(),
        a.k,
        sketches.first().map_or(0, |s| s.d_eff())
    )?;
    Ok(())
}

fn cmd_estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let sk = read_sketches(&mut open(&a.sketches)?)?;
    let pairs: Vec<(usize, usize)> = if a.pairs.is_empty() {
        (0..sk.len()).flat_map(|i| ((i + 1)..sk.len()).map(move |j| (i, j))).collect()
    } else {
        a.pairs.clone()
    };
    let mut text = String::from("i,j,n_emp,n_mat,r_mat,r_zero");
    if a.random_seed.is_some() {
        text.push_str(",r_random");
    }
    text.push('\n');
    for (i, j) in pairs {
        let (x, y) = match (sk.get(i), sk.get(j)) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(invalid(format!("pair ({i}, {j}) out of range for {} sketches", sk.len()))),
        };
        let st = pair_stats(x, y)?;
        text.push_str(&format!(
            "{i},{j},{},{},{},{}",
            st.n_emp,
            st.n_mat,
            estimate_r_mat(&st),
            estimate_r_zero(&st)
        ));
        if let Some(seed) = a.random_seed {
            text.push_str(&format!(",{}", estimate_r_random(x, y, i as u64, j as u64, seed)?));
        }
        text.push('\n');
    }
    emit(&text, &a.output, out)
}

fn cmd_theory(a: TheoryArgs, out: &mut dyn Write) -> Result<()> {
    let (f1, f2, ai) = match (a.f, a.f1, a.f2, a.a) {
        (Some(f), None, None, None) => (f, 0, 0),
        (None, Some(f1), f2, ai) => (f1, f2.unwrap_or(0), ai.unwrap_or(0)),
        _ => return Err(invalid("give either --f or --f1 [--f2 --a]")),
    };
    let t = TheoryInput::new(a.dim, a.k, f1, f2, ai)?;
    let k = a.k as f64;
    let mut lines = Vec::new();
    let mut pair = |name: &str, abs: f64, scale: f64| {
        lines.push(format!("{name} {abs}"));
        lines.push(format!("ratio {}", abs / scale));
    };
    match a.quantity {
        Quantity::ENemp => pair("e_nemp", theory::e_nemp(&t), k),
        Quantity::VarNemp => pair("var_nemp", theory::var_nemp(&t), k * k),
        Quantity::ENmat => pair("e_nmat", theory::e_nmat(&t), k),
        Quantity::VarNmat => pair("var_nmat", theory::var_nmat(&t), k * k),
        Quantity::Cov => pair("cov_nmat_nemp", theory::cov_nmat_nemp(&t), k * k),
        Quantity::VarRmat => {
            let v = theory::var_rmat(&t, VarMode::ExactViaDist)?;
            lines.push(format!("var_rmat {v}"));
            let rr = t.resemblance();
            lines.push(format!("ratio_to_kperm {}", v / (rr * (1.0 - rr) / k)));
        }
        Quantity::VarRmatApprox => lines.push(format!("var_rmat_approx {}", theory::var_rmat(&t, VarMode::Approximation)?)),
        Quantity::G => lines.push(format!("g {}", theory::g_ratio(t.union(), a.k)?)),
        Quantity::Dist => {
            let d = theory::dist_nemp(&t, a.exact)?;
            if let theory::NempDistribution::Float {
                condition,
                error_bound,
                ill_conditioned,
                ..
            } = &d
            {
                lines.push(format!("# condition {condition:e} error_bound {error_bound:e} ill_conditioned {ill_conditioned}"));
            }
            match &d {
                theory::NempDistribution::Exact(p) => {
                    for (j, x) in p.iter().enumerate().filter(|(_, x)| **x != num_rational::BigRational::from_integer(0.into())) {
                        lines.push(format!("{j} {} {x}", exact::to_f64(x)));
                    }
                }
                _ => {
                    for (j, x) in d.probs_f64().iter().enumerate().filter(|(_, x)| **x != 0.0) {
                        lines.push(format!("{j} {x}"));
                    }
                }
            }
        }
        Quantity::Approx => {
            let m = theory::approx_nemp_moments(&t)?;
            lines.push(format!("mean_ratio {}", m.mean_ratio));
            lines.push(format!("var_ratio {}", m.var_ratio));
        }
        Quantity::Variable => {
            let m = theory::nemp_moments_variable(&t);
            lines.push(format!("mean_ratio {}", m.mean_ratio));
            lines.push(format!("var_ratio {}", m.var_ratio));
        }
    }
    if a.exact {
        let ex = match a.quantity {
            Quantity::ENemp => Some(exact::e_nemp(&t)),
            Quantity::VarNemp => Some(exact::var_nemp(&t)),
            Quantity::ENmat => Some(exact::e_nmat(&t)),
            Quantity::VarNmat => Some(exact::var_nmat(&t)),
            Quantity::Cov => Some(exact::cov_nmat_nemp(&t)),
            _ => None,
        };
        if let Some(x) = ex {
            lines.push(format!("exact {x}"));
        }
    }
    for l in lines {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

fn read_pair_csv(path: &Path, dim: u64) -> Result<Vec<(String, PairSpec)>> {
    let mut rows = Vec::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (n == 0 && line.starts_with("name")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Parse {
            line: n + 1,
            message: "expected name,f1,f2,a".into(),
        };
        if cols.len() != 4 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        rows.push((cols[0].to_string(), PairSpec::new(num(cols[1])?, num(cols[2])?, num(cols[3])?, dim)?));
    }
    Ok(rows)
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let seed = seed_or_default(a.seed, err);
    let pairs = match &a.pairs {
        Some(p) => read_pair_csv(p, a.dim)?,
        None => word_pairs()
            .into_iter()
            .map(|(n, p)| PairSpec::new(p.f1, p.f2, p.a, a.dim).map(|p| (n, p)))
            .collect::<Result<Vec<_>>>()?,
    };
    let scheme = match a.scheme {
        McSchemeArg::Fixed => McScheme::Fixed,
        McSchemeArg::Variable => McScheme::Variable,
        McSchemeArg::Mperm => McScheme::MPerm(a.m),
        McSchemeArg::Kperm => McScheme::KPerm,
    };
    let mut rows = Vec::new();
    for (i, (name, pair)) in pairs.into_iter().enumerate() {
        let cfg = McConfig {
            name,
            pair,
            ks: a.k.clone(),
            replicates: a.reps,
            scheme,
            master_seed: derive_seed(seed, &[i as u64]),
        };
        rows.extend(run_validation(&cfg)?.rows);
    }
    emit(&rows_to_csv(&rows), &a.output, out)?;
    if let (Some(script), Some(csv)) = (&a.plot_script, &a.output) {
        let mut w = create(script)?;
        w.write_all(plot_script(&csv.to_string_lossy()).as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn cmd_expand(a: ExpandArgs, out: &mut dyn Write) -> Result<()> {
    let sk = read_sketches(&mut open(&a.sketches)?)?;
    let b = sk.iter().map(|s| bbit(s, a.b)).collect::<Result<Vec<_>>>()?;
    let mut w = create(&a.output)?;
    write_bbit_sketches(&mut w, &b)?;
    w.flush()?;
    writeln!(out, "{} sketches truncated to b = {}", b.len(), a.b)?;
    Ok(())
}

fn read_labels(path: &Path) -> Result<Vec<f64>> {
    let mut labels = Vec::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        labels.push(t.parse().map_err(|_| Error::Parse {
            line: n + 1,
            message: format!("bad label {t:?}"),
        })?);
    }
    Ok(labels)
}

fn cmd_export(a: ExportArgs, out: &mut dyn Write) -> Result<()> {
    let sk = read_bbit_sketches(&mut open(&a.sketches)?)?;
    let labels = match &a.labels {
        Some(p) => read_labels(p)?,
        None => Vec::new(),
    };
    let vectors: Vec<ExpandedVector> = sk
        .iter()
        .enumerate()
        .map(|(i, s)| expand(s, a.coding.into(), derive_seed(a.seed, &[i as u64])))
        .collect();
    emit(&export_libsvm(&vectors, &labels, a.digits)?, &a.output, out)
}

fn cmd_lsh_build(a: LshBuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = load(&a.input)?;
    let seed = seed_or_default(a.seed, err);
    let idx = build_index(&data.sets, a.tables, a.b, a.k, seed)?;
    let mut w = create(&a.output)?;
    idx.write_to(&mut w)?;
    w.flush()?;
    writeln!(out, "{} vectors in {} tables, B = {}", idx.len(), a.tables, a.b as usize * a.k)?;
    Ok(())
}

fn cmd_lsh_query(a: LshQueryArgs, out: &mut dyn Write) -> Result<()> {
    let idx = LshIndex::read_from(&mut open(&a.index)?)?;
    let data = load(&a.input)?;
    let mut text = String::new();
    for (id, q) in data.ids.iter().zip(&data.sets) {
        let hits = idx.query(q)?;
        text.push_str(id);
        text.push(':');
        for h in hits {
            text.push_str(&format!(" {h}"));
        }
        text.push('\n');
    }
    emit(&text, &a.output, out)
}

/// Content-keyed seed so random coding of a vector does not depend on its
/// position in a file.
fn content_seed(seed: u64, s: &BinarySet) -> u64 {
    s.indices().iter().fold(seed, |h, &i| mix64(h, i))
}

fn featurize(sets: &[BinarySet], p: &Pipeline) -> Result<Vec<ExpandedVector>> {
    let perm = generate_permutation(p.sketch_seed, p.d_eff)?;
    let coding = if p.random_coding { Coding::Random } else { Coding::Zero };
    sets.iter()
        .map(|s| {
            let s = if s.dim() < p.d_eff { s.with_dim(p.d_eff)? } else { s.clone() };
            let sk = sketch_fixed(&s, &perm, p.k as usize)?;
            Ok(expand(&bbit(&sk, p.b)?, coding, content_seed(p.sketch_seed, &s)))
        })
        .collect()
}

fn binary_labels(labels: &[f64]) -> Vec<f64> {
    labels.iter().map(|&y| if y > 0.0 { 1.0 } else { -1.0 }).collect()
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let data = parse_libsvm(open(&a.input)?, true, a.dim)?;
    let seed = seed_or_default(a.seed, err);
    let labels = binary_labels(&data.labels);
    let (vectors, pipeline) = if a.raw {
        (data.sets.iter().map(ExpandedVector::from_binary_set).collect(), None)
    } else {
        let (k, b) = (a.k.unwrap(), a.b.unwrap());
        let p = Pipeline {
            k: u32::try_from(k).map_err(|_| invalid("k too large"))?,
            b,
            d_eff: padded_dim(data.dim, k as u64),
            sketch_seed: derive_seed(seed, &[0]),
            random_coding: a.coding == CodingArg::Random,
        };
        (featurize(&data.sets, &p)?, Some(p))
    };
    let mut model = train_logreg(&vectors, &labels, a.c, a.epochs, derive_seed(seed, &[1]))?;
    model.pipeline = pipeline;
    let acc = accuracy(&model, &vectors, &labels)?;
    let mut w = create(&a.output)?;
    model.write_to(&mut w)?;
    w.flush()?;
    writeln!(
        out,
        "trained on {} vectors, dim {}, objective {} -> {}, training accuracy {acc}",
        vectors.len(),
        model.dim(),
        model.history[0],
        model.history.last().unwrap()
    )?;
    Ok(())
}

fn cmd_predict(a: PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let model = LinearModel::read_from(&mut open(&a.model)?)?;
    let raw_dim = model.pipeline.is_none().then_some(model.dim() as u64);
    let data = parse_libsvm(open(&a.input)?, true, raw_dim)?;
    let vectors = match &model.pipeline {
        Some(p) => featurize(&data.sets, p)?,
        None => data.sets.iter().map(ExpandedVector::from_binary_set).collect(),
    };
    let labels = binary_labels(&data.labels);
    let mut text = String::new();
    for v in &vectors {
        let (y, m) = predict(&model, v)?;
        text.push_str(&format!("{} {m}\n", crate::datamodel::format_label(y)));
    }
    emit(&text, &a.output, out)?;
    if !vectors.is_empty() {
        writeln!(err, "accuracy {}", accuracy(&model, &vectors, &labels)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("oph").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn theory_prints_absolute_and_ratio() {
        let (code, out, _) = run_str(&["theory", "--quantity", "e_nemp", "--D", "16", "--k", "4", "--f", "6", "--exact"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("e_nemp 0.4615384615"));
        assert!(out.contains("ratio 0.1153846153"));
        assert!(out.contains("exact 6/13"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["theory", "--bogus"]).0, 2);
        assert_eq!(run_str(&[]).0, 2);
        assert_eq!(run_str(&["theory", "--quantity", "g", "--k", "4", "--f", "1"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file_exits_one() {
        let (code, _, err) = run_str(&["estimate", "--sketches", "/nonexistent/x.bin"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"));
    }
}
