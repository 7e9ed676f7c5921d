use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use svcodes::bounds::{self, BoundsError, FeasibilityVerdict};
use svcodes::codes::CodeError;
use svcodes::constructions::{
    build_parity, scalars_automorphism, valid_automorphism_exponents, ConstructionError, RecipeJson,
};
use svcodes::convert::{convert_merge, default_convert, ConvertError, PairJson};
use svcodes::galois::FieldError;
use svcodes::matrix::{MatrixError, MatrixJson};
use svcodes::search::{self, SearchError, SearchReport, DEFAULT_BUDGET};
use svcodes::{
    is_super_regular, Codeword, ConstructionRecipe, ConvertiblePair, Field, FieldCtx, FieldElem,
    FieldSpec, MatrixF, ScalarVector, SystematicCode,
};

#[derive(Parser)]
#[command(name = "svcodes", version, about = "Super-regular Vandermonde codes and access-efficient conversion")]
struct Cli {
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Determinant budget for exhaustive searches
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field inspection
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Build a parity matrix from a recipe file
    Construct {
        #[arg(long)]
        recipe: PathBuf,
        /// Write the matrix here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a matrix is super-regular
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[command(flatten)]
        field: FieldOpts,
        /// Enumerate every square submatrix even for Vandermonde input
        #[arg(long)]
        full: bool,
    },
    /// Field-size feasibility
    Bounds {
        #[command(subcommand)]
        action: BoundsAction,
    },
    /// Search for super-regular Vandermonde scalar sets
    Search {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        w: Option<u32>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        /// Random search with this many distinct sets instead of exhaustive search
        #[arg(long)]
        trials: Option<u64>,
        /// Without --p/--w: tabulate every prime-power field up to this size
        #[arg(long)]
        max_q: Option<u64>,
    },
    /// Encode a message (JSON) or a byte stream (--binary)
    Encode(CodecArgs),
    /// Decode a codeword (JSON, null marks an erasure) or a byte stream (--binary)
    Decode(CodecArgs),
    /// Merge initial codewords into one final codeword
    Convert {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Print access statistics instead of the codeword
        #[arg(long)]
        stats: bool,
        /// Write the final codeword here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-encode each input first and reject invalid ones
        #[arg(long)]
        recheck: bool,
    },
    /// Encode random data, convert both ways, decode after erasures
    Demo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        w: u32,
        #[arg(long = "kI")]
        k_initial: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        lambda: usize,
    },
}

#[derive(Subcommand)]
enum FieldAction {
    Info {
        #[command(flatten)]
        field: FieldOpts,
    },
}

#[derive(Subcommand)]
enum BoundsAction {
    Check {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Args, Clone, Default)]
struct FieldOpts {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    w: Option<u32>,
    /// Ascending coefficients "1,1,0,1", or packed hex "0x11d" when p = 2
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args)]
struct CodecArgs {
    /// Parity matrix file
    #[arg(long, conflicts_with = "recipe")]
    matrix: Option<PathBuf>,
    /// Recipe file, as for `construct`
    #[arg(long)]
    recipe: Option<PathBuf>,
    #[command(flatten)]
    field: FieldOpts,
    /// Input file; stdin when absent
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Raw bytes, one symbol per byte (p = 2, w <= 8)
    #[arg(long)]
    binary: bool,
    /// 1-indexed positions lost in every stripe (decode --binary)
    #[arg(long, value_delimiter = ',')]
    erased: Vec<usize>,
}

/// Stable identifier for each error family, printed with every failure.
fn error_code(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if cause.is::<FieldError>() {
            return "E_FIELD";
        } else if cause.is::<MatrixError>() {
            return "E_MATRIX";
        } else if cause.is::<BoundsError>() {
            return "E_BOUNDS";
        } else if cause.is::<ConstructionError>() {
            return "E_CONSTRUCTION";
        } else if cause.is::<CodeError>() {
            return "E_CODE";
        } else if cause.is::<ConvertError>() {
            return "E_CONVERT";
        } else if cause.is::<SearchError>() {
            return "E_SEARCH";
        } else if cause.is::<serde_json::Error>() {
            return "E_JSON";
        } else if cause.is::<io::Error>() {
            return "E_IO";
        }
    }
    "E_USAGE"
}

/// Whether the command ran and the property it checks held.
enum Status {
    Holds,
    Fails,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(Status::Holds) => ExitCode::SUCCESS,
        Ok(Status::Fails) => ExitCode::from(1),
        Err(err) => {
            let code = error_code(&err);
            if json {
                eprintln!("{}", json!({"error": {"code": code, "message": format!("{err:#}")}}));
            } else {
                eprintln!("error[{code}]: {err:#}");
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Ctx { json: cli.json, seed: cli.seed, budget: cli.budget };
    match cli.command {
        Command::Field { action: FieldAction::Info { field } } => ctx.field_info(&field),
        Command::Construct { recipe, out } => ctx.construct(&recipe, out.as_deref()),
        Command::Verify { matrix, field, full } => ctx.verify(&matrix, &field, full),
        Command::Bounds { action: BoundsAction::Check { q, k, r } } => ctx.bounds_check(q, k, r),
        Command::Search { p, w, k, r, trials, max_q } => ctx.search(p, w, k, r, trials, max_q),
        Command::Encode(args) => ctx.encode(&args),
        Command::Decode(args) => ctx.decode(&args),
        Command::Convert { pair, inputs, stats, out, recheck } => {
            ctx.convert(&pair, &inputs, stats, out.as_deref(), recheck)
        }
        Command::Demo { p, w, k_initial, r, lambda } => ctx.demo(p, w, k_initial, r, lambda),
    }
}

struct Ctx {
    json: bool,
    seed: u64,
    budget: u64,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn parse_modulus(p: u64, text: &str) -> Result<Vec<u32>> {
    let t = text.trim();
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        if p != 2 {
            bail!("hex moduli are only accepted for p = 2");
        }
        let packed = u64::from_str_radix(hex, 16).with_context(|| format!("bad modulus {t:?}"))?;
        let degree = 63 - packed.leading_zeros();
        return Ok((0..=degree).map(|i| ((packed >> i) & 1) as u32).collect());
    }
    t.split(',')
        .map(|c| c.trim().parse::<u32>().with_context(|| format!("bad modulus coefficient {c:?}")))
        .collect()
}

impl FieldOpts {
    fn spec(&self) -> Result<Option<FieldSpec>> {
        match (self.p, self.w) {
            (Some(p), Some(w)) => {
                let modulus = self.modulus.as_deref().map(|m| parse_modulus(p, m)).transpose()?;
                Ok(Some(FieldSpec::new(p, w, modulus.unwrap_or_default())))
            }
            (None, None) if self.modulus.is_none() => Ok(None),
            _ => bail!("--p and --w must be given together"),
        }
    }

    fn require(&self) -> Result<Field> {
        let spec = self.spec()?.ok_or_else(|| anyhow!("--p and --w are required"))?;
        Ok(Arc::new(FieldCtx::new(spec)?))
    }
}

/// A matrix file together with the field it lives in. A field tag in the
/// file wins over command-line flags.
fn load_matrix(path: &Path, opts: &FieldOpts) -> Result<MatrixF> {
    let mj: MatrixJson = read_json(path)?;
    let spec = match (&mj.field, opts.spec()?) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s,
        (None, None) => bail!("{} has no \"field\"; pass --p and --w", path.display()),
    };
    let field = Arc::new(FieldCtx::new(spec)?);
    Ok(MatrixF::from_json(field, &mj)?)
}

fn load_code(args: &CodecArgs) -> Result<SystematicCode> {
    let parity = match (&args.matrix, &args.recipe) {
        (Some(m), _) => load_matrix(m, &args.field)?,
        (None, Some(r)) => {
            let recipe = ConstructionRecipe::try_from(read_json::<RecipeJson>(r)?)?;
            build_parity(&recipe)?.matrix
        }
        (None, None) => bail!("one of --matrix or --recipe is required"),
    };
    Ok(SystematicCode::new(parity)?)
}

fn elems_to_u32(v: &[FieldElem]) -> Vec<u32> {
    v.iter().map(|x| x.0).collect()
}

fn parse_elems(field: &FieldCtx, values: &[u64]) -> Result<Vec<FieldElem>> {
    Ok(values.iter().map(|&v| field.elem(v)).collect::<Result<Vec<_>, _>>()?)
}

impl Ctx {
    fn field_info(&self, opts: &FieldOpts) -> Result<Status> {
        let f = opts.require()?;
        let theta = f.find_primitive();
        if self.json {
            print_json(&json!({
                "p": f.p(),
                "w": f.w(),
                "q": f.q(),
                "modulus": f.spec().modulus,
                "primitive": theta.0,
                "tables": f.has_tables(),
            }))?;
        } else {
            println!("GF({}^{}), q = {}", f.p(), f.w(), f.q());
            println!("modulus (ascending): {:?}", f.spec().modulus);
            println!("primitive element: {}", f.render(theta));
            println!("log tables: {}", f.has_tables());
        }
        Ok(Status::Holds)
    }

    fn construct(&self, recipe_path: &Path, out: Option<&Path>) -> Result<Status> {
        let recipe = ConstructionRecipe::try_from(read_json::<RecipeJson>(recipe_path)?)?;
        let c = build_parity(&recipe)?;
        let text = serde_json::to_string(&c.matrix.to_json(true))?;
        match out {
            Some(path) => {
                fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                let summary = json!({
                    "out": path.display().to_string(),
                    "rows": c.matrix.rows(),
                    "cols": c.matrix.cols(),
                    "scalars": elems_to_u32(&c.scalars.0),
                    "guarantee": c.guarantee,
                });
                if self.json {
                    print_json(&summary)?;
                } else {
                    println!(
                        "wrote {} x {} matrix to {}; guarantee: {}",
                        c.matrix.rows(),
                        c.matrix.cols(),
                        path.display(),
                        serde_json::to_string(&c.guarantee)?
                    );
                }
            }
            None => println!("{text}"),
        }
        Ok(Status::Holds)
    }

    fn verify(&self, path: &Path, opts: &FieldOpts, full: bool) -> Result<Status> {
        let m = load_matrix(path, opts)?;
        let verdict = is_super_regular(&m, !full);
        if self.json {
            print_json(&verdict)?;
        } else {
            println!("super-regular: {}", verdict.super_regular);
            if let Some(w) = &verdict.witness {
                println!("singular submatrix: rows {:?}, cols {:?}", w.rows, w.cols);
            }
            println!("determinants evaluated: {}", verdict.determinants);
        }
        Ok(if verdict.super_regular { Status::Holds } else { Status::Fails })
    }

    fn bounds_check(&self, q: u64, k: usize, r: usize) -> Result<Status> {
        #[derive(Serialize)]
        struct Report {
            #[serde(flatten)]
            verdict: FeasibilityVerdict,
            existence_threshold: String,
        }
        let verdict = bounds::check_all(q, k, r)?;
        let feasible = verdict.feasible;
        let report = Report { verdict, existence_threshold: bounds::existence_threshold(k, r).to_string() };
        // the verdict is JSON in both modes
        if self.json {
            print_json(&report)?;
        } else {
            println!("{}", serde_json::to_string(&report)?);
        }
        Ok(if feasible { Status::Holds } else { Status::Fails })
    }

    fn search(
        &self,
        p: Option<u64>,
        w: Option<u32>,
        k: usize,
        r: usize,
        trials: Option<u64>,
        max_q: Option<u64>,
    ) -> Result<Status> {
        let opts = FieldOpts { p, w, modulus: None };
        let Some(spec) = opts.spec()? else {
            let max_q = max_q.ok_or_else(|| anyhow!("give --p and --w, or --max-q for a table"))?;
            let table = search::empirical_min_q(k, r, &search::prime_power_fields(max_q), self.budget);
            if self.json {
                print_json(&table)?;
            } else {
                print!("{}", table.to_csv());
            }
            return Ok(if table.inconsistencies.is_empty() { Status::Holds } else { Status::Fails });
        };
        let field = Arc::new(FieldCtx::new(spec)?);
        let report: SearchReport = match trials {
            Some(n) => search::random_search(&field, k, r, n, self.seed)?,
            None => search::exhaustive_search(&field, k, r, self.budget)?,
        };
        if self.json {
            print_json(&report)?;
        } else {
            println!("{}", SearchReport::csv_header());
            println!("{}", report.csv_row());
        }
        Ok(if report.exists { Status::Holds } else { Status::Fails })
    }

    fn encode(&self, args: &CodecArgs) -> Result<Status> {
        let code = load_code(args)?;
        let input = read_input(args.input.as_deref())?;
        if args.binary {
            write_output(args.out.as_deref(), &code.encode_bytes(&input)?)?;
            return Ok(Status::Holds);
        }
        let values: Vec<u64> = serde_json::from_slice(&input).context("message must be a JSON array")?;
        let cw = code.encode(&parse_elems(code.field(), &values)?)?;
        write_output(args.out.as_deref(), (serde_json::to_string(&cw)? + "\n").as_bytes())?;
        Ok(Status::Holds)
    }

    fn decode(&self, args: &CodecArgs) -> Result<Status> {
        let code = load_code(args)?;
        let input = read_input(args.input.as_deref())?;
        if args.binary {
            write_output(args.out.as_deref(), &code.decode_bytes(&input, &args.erased)?)?;
            return Ok(Status::Holds);
        }
        let mut cw: Codeword = serde_json::from_slice(&input).context("codeword must be a JSON array")?;
        for s in cw.0.iter().flatten() {
            code.field().elem(s.0 as u64)?;
        }
        cw.erase(&args.erased);
        let msg = code.decode(&cw)?;
        write_output(args.out.as_deref(), (serde_json::to_string(&msg)? + "\n").as_bytes())?;
        Ok(Status::Holds)
    }

    fn convert(
        &self,
        pair_path: &Path,
        inputs: &[PathBuf],
        stats: bool,
        out: Option<&Path>,
        recheck: bool,
    ) -> Result<Status> {
        let pair = read_json::<PairJson>(pair_path)?.build()?;
        let codewords = inputs.iter().map(|p| read_json::<Codeword>(p)).collect::<Result<Vec<_>>>()?;
        let merged = convert_merge(&pair, &codewords, recheck)?;
        let default = default_convert(&pair, &codewords)?;
        let text = serde_json::to_string(&merged.codeword)? + "\n";
        if let Some(path) = out {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
        }
        if stats {
            let s = merged.stats();
            println!(
                "{}",
                json!({
                    "read": s.symbols_read,
                    "written": s.symbols_written,
                    "default_read": default.stats().symbols_read,
                })
            );
        } else if out.is_none() {
            print!("{text}");
        }
        Ok(Status::Holds)
    }

    fn demo(&self, p: u64, w: u32, k_initial: usize, r: usize, lambda: usize) -> Result<Status> {
        let field: Field = Arc::new(FieldCtx::with_default(p, w)?);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let k_final = lambda * k_initial;
        let xi = demo_scalars(&field, k_final, r, self.budget)?;
        let pair = ConvertiblePair::new(&field, k_initial, r, lambda, xi)?;
        let message: Vec<FieldElem> =
            (0..k_final).map(|_| FieldElem(rng.gen_range(0..field.q()) as u32)).collect();
        let inputs = pair.encode_initial(&message)?;
        let merged = convert_merge(&pair, &inputs, true)?;
        let default = default_convert(&pair, &inputs)?;
        let agree = merged.codeword == default.codeword;
        let mut erased: Vec<usize> = rand::seq::index::sample(&mut rng, pair.n_final(), r)
            .into_iter()
            .map(|i| i + 1)
            .collect();
        erased.sort_unstable();
        let mut damaged = merged.codeword.clone();
        damaged.erase(&erased);
        let recovered = pair.final_code().decode(&damaged)? == message;
        let (ms, ds) = (merged.stats(), default.stats());
        if self.json {
            print_json(&json!({
                "field": field.spec(),
                "scalars": elems_to_u32(&pair.scalars().0),
                "initial": [pair.n_initial(), pair.k_initial()],
                "final": [pair.n_final(), pair.k_final()],
                "lambda": lambda,
                "seed": self.seed,
                "merge": {"read": ms.symbols_read, "written": ms.symbols_written},
                "default": {"read": ds.symbols_read, "written": ds.symbols_written},
                "outputs_agree": agree,
                "erased": erased,
                "decoded": recovered,
            }))?;
        } else {
            println!(
                "GF({p}^{w}), scalars {:?}: {} x [{},{}] -> [{},{}]",
                elems_to_u32(&pair.scalars().0),
                lambda,
                pair.n_initial(),
                pair.k_initial(),
                pair.n_final(),
                pair.k_final()
            );
            println!("merge:   read={} write={}", ms.symbols_read, ms.symbols_written);
            println!("default: read={} write={}", ds.symbols_read, ds.symbols_written);
            println!("outputs agree: {agree}");
            println!("decoded after erasing {erased:?}: {recovered}");
        }
        Ok(if agree && recovered { Status::Holds } else { Status::Fails })
    }
}

/// Automorphism scalars when they are proven for k^F, otherwise the first
/// set found by exhaustive search.
fn demo_scalars(field: &Field, k_final: usize, r: usize, budget: u64) -> Result<ScalarVector> {
    if r <= 3 && (k_final as u64) < field.q() {
        for e in valid_automorphism_exponents(field.w()) {
            let xi = scalars_automorphism(field, e)?.prefix(r);
            if svcodes::constructions::recognize_scalars(field, &xi, k_final).is_proven() {
                return Ok(xi);
            }
        }
    }
    let report = search::exhaustive_search(field, k_final, r, budget)?;
    report
        .first_witness
        .ok_or_else(|| anyhow!("no super-regular {k_final} x {r} Vandermonde matrix over GF({})", field.q()))
}
