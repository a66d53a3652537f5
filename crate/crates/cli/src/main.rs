use btsigma::building::heights::{cone_chain, default_cone_matrix, positive_certificate, HeightSpec};
use btsigma::building::{BuildingError, Center, Truncation};
use btsigma::certify::{certify, CertifyConfig, Suite};
use btsigma::chevalley::check_relations;
use btsigma::complex::CellSet;
use btsigma::coxeter::{closed_sector, Apartment, CoxeterError, HeightForm, Window};
use btsigma::homology::{betti_csv, induced_map_trivial, ChainComplexF2};
use btsigma::rational::{parse_q, to_pq, Q};
use btsigma::root_system::{build_root_system, Family};
use btsigma::sigma::{finiteness_type, sigma_verdict, SigmaContext, SigmaError};
use btsigma::spherical::{build_flag_building, FlagComplex, SphericalError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const CACHE_ENV: &str = "BTSIGMA_CACHE_DIR";

#[derive(Parser)]
#[command(name = "btsigma", version, about = "Exact computations in buildings and Σ-invariants of S-arithmetic Borel groups")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Root systems of types A, C, D.
    Rootsys {
        #[command(subcommand)]
        cmd: RootsysCmd,
    },
    /// Windows of affine Coxeter complexes.
    Coxeter {
        #[command(subcommand)]
        cmd: CoxeterCmd,
    },
    /// Flag buildings over F_q.
    Sphere {
        #[command(subcommand)]
        cmd: SphereCmd,
    },
    /// Steinberg relations in SL_n(Q).
    Chevalley {
        #[command(subcommand)]
        cmd: ChevalleyCmd,
    },
    /// Truncations of the building of SL_n(Q_p).
    Building {
        #[command(subcommand)]
        cmd: BuildingCmd,
    },
    /// F₂ homology of complexes built by the other subcommands.
    Homology {
        #[command(subcommand)]
        cmd: HomologyCmd,
    },
    /// Σ-invariant and finiteness verdicts.
    Sigma {
        #[command(subcommand)]
        cmd: SigmaCmd,
    },
    /// Run a certificate suite.
    Certify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Skip the SL₃ positive-direction instance; that criterion is then reported as not run.
        #[arg(long)]
        skip_sl3: bool,
        /// Include wall-clock timings (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
        /// Ignore a cached report.
        #[arg(long)]
        fresh: bool,
    },
}

#[derive(Args, Clone)]
struct TypeArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    rank: usize,
}

#[derive(Subcommand)]
enum RootsysCmd {
    Show {
        #[command(flatten)]
        ty: TypeArgs,
    },
}

#[derive(Args, Clone)]
struct WindowArgs {
    #[command(flatten)]
    ty: TypeArgs,
    /// Floors of the simple roots range over [−w, w−1].
    #[arg(long, default_value_t = 3)]
    window: i64,
}

#[derive(Subcommand)]
enum CoxeterCmd {
    /// Export the window.
    Window {
        #[command(flatten)]
        w: WindowArgs,
    },
    /// Filtration of a σ-convex subcomplex by chamber attachments.
    Deconstruct {
        #[command(flatten)]
        w: WindowArgs,
        /// Chambers given by the floors of all positive roots, separated by ';'.
        #[arg(long, conflicts_with = "height")]
        chambers: Option<String>,
        /// Height form coefficients; the subcomplex is the lower complex at `--r`.
        #[arg(long, allow_hyphen_values = true)]
        height: Option<String>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        r: String,
        /// Intersect with the closed sector toward the opposite chamber from this special vertex.
        #[arg(long, allow_hyphen_values = true)]
        sector: Option<String>,
    },
}

#[derive(Args, Clone)]
struct SphereArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum SphereCmd {
    Build {
        #[command(flatten)]
        s: SphereArgs,
    },
    /// Opposition complex of a chamber (index into the chamber list).
    Opp {
        #[command(flatten)]
        s: SphereArgs,
        #[arg(long, default_value_t = 0)]
        chamber: usize,
    },
    /// Apartment whose chambers are all opposite the given chamber.
    Apartment {
        #[command(flatten)]
        s: SphereArgs,
        #[arg(long, default_value_t = 0)]
        chamber: usize,
    },
}

#[derive(Subcommand)]
enum ChevalleyCmd {
    CheckRelations {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Args, Clone)]
struct TruncArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Ball around the base chamber instead of the base vertex.
    #[arg(long)]
    chamber_center: bool,
}

impl TruncArgs {
    fn grow(&self) -> Result<Truncation, CliError> {
        let center = if self.chamber_center { Center::BaseChamber } else { Center::BaseVertex };
        Ok(Truncation::grow_centered(self.n, self.p, self.radius, center)?)
    }
}

#[derive(Subcommand)]
enum BuildingCmd {
    Grow {
        #[command(flatten)]
        t: TruncArgs,
    },
    /// Retraction coordinates of every vertex.
    Retract {
        #[command(flatten)]
        t: TruncArgs,
    },
    /// Subcomplex on which the height is at least `--r`.
    Superlevel {
        #[command(flatten)]
        t: TruncArgs,
        /// Coefficients μ of h = −Σ μ_k y_k.
        #[arg(long, allow_hyphen_values = true)]
        height: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Cone chain c_r and its non-vanishing certificate.
    ConeChain {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        height: String,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        r: String,
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        s: String,
        #[arg(long, allow_hyphen_values = true, default_value = "2")]
        t: String,
    },
    /// Connectivity of the retraction preimage of an upper complex.
    Positive {
        #[command(flatten)]
        t: TruncArgs,
        /// Height form coefficients in simple coordinates.
        #[arg(long, allow_hyphen_values = true)]
        height: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, default_value_t = 1)]
        inner: usize,
    },
}

#[derive(Subcommand)]
enum HomologyCmd {
    /// Reduced Betti numbers of an opposition complex.
    Opp {
        #[command(flatten)]
        s: SphereArgs,
        #[arg(long, default_value_t = 0)]
        chamber: usize,
    },
    /// Reduced Betti numbers of a superlevel complex.
    Superlevel {
        #[command(flatten)]
        t: TruncArgs,
        #[arg(long, allow_hyphen_values = true)]
        height: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
    /// Whether H̃_d of the deeper superlevel set maps trivially into the shallower one.
    Pair {
        #[command(flatten)]
        t: TruncArgs,
        #[arg(long, allow_hyphen_values = true)]
        height: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        t_shift: String,
        #[arg(long, default_value_t = 0)]
        dim: usize,
    },
}

#[derive(Args, Clone)]
struct SigmaArgs {
    #[arg(long, value_parser = parse_family, default_value = "A")]
    family: Family,
    /// Matrix size of SL_n (type A).
    #[arg(long, conflicts_with = "rank")]
    n: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    primes: String,
}

#[derive(Subcommand)]
enum SigmaCmd {
    Verdict {
        #[command(flatten)]
        ctx: SigmaArgs,
        /// Coefficients in the basis χ_{k,p}, ordered by prime then k.
        #[arg(long, allow_hyphen_values = true)]
        chi: String,
        /// Support bound.
        #[arg(long)]
        k: usize,
    },
    Fintype {
        #[command(flatten)]
        ctx: SigmaArgs,
        /// Characters vanishing on H, separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        kernel_of: String,
        #[arg(long)]
        k: usize,
    },
}

enum CliError {
    Usage(String),
    Math { message: String, witness: Value },
}

impl From<SphericalError> for CliError {
    fn from(e: SphericalError) -> Self {
        match e {
            SphericalError::NotAChamber(_) | SphericalError::Singular => CliError::Math { message: e.to_string(), witness: Value::Null },
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BuildingError> for CliError {
    fn from(e: BuildingError) -> Self {
        match e {
            BuildingError::NotPrime(_) | BuildingError::UnsupportedDimension(_) | BuildingError::TooLarge => CliError::Usage(e.to_string()),
            _ => CliError::Math { message: e.to_string(), witness: Value::Null },
        }
    }
}

impl From<CoxeterError> for CliError {
    fn from(e: CoxeterError) -> Self {
        match e {
            CoxeterError::NotSigmaConvex(ref g) => CliError::Math { message: e.to_string(), witness: json!({ "gallery": g }) },
            CoxeterError::BadBounds(_) | CoxeterError::BadSignVector(_) | CoxeterError::EnlargeWindow(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math { message: e.to_string(), witness: Value::Null },
        }
    }
}

impl From<SigmaError> for CliError {
    fn from(e: SigmaError) -> Self {
        CliError::Usage(e.to_string())
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn qlist(s: &str) -> Result<Vec<Q>, CliError> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_q(x).map_err(CliError::Usage)).collect()
}

fn qval(s: &str) -> Result<Q, CliError> {
    parse_q(s).map_err(CliError::Usage)
}

fn ilist(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| CliError::Usage(format!("{x:?}: {e}")))).collect()
}

fn plist(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',').map(|x| x.trim().parse::<u64>().map_err(|e| CliError::Usage(format!("{x:?}: {e}")))).collect()
}

fn expect_format(f: Format, allowed: &[Format]) -> Result<(), CliError> {
    if allowed.contains(&f) {
        Ok(())
    } else {
        Err(CliError::Usage("output format not supported by this subcommand".into()))
    }
}

fn window(w: &WindowArgs) -> Result<Window, CliError> {
    if w.window < 1 {
        return Err(CliError::Usage("window must be positive".into()));
    }
    let rd = build_root_system(w.ty.family, w.ty.rank).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Window::with_radius(Apartment::new(rd), w.window)?)
}

fn flag_building(s: &SphereArgs) -> Result<FlagComplex, CliError> {
    Ok(build_flag_building(s.n, s.q)?)
}

fn chamber_of(b: &FlagComplex, idx: usize) -> Result<usize, CliError> {
    b.chambers.get(idx).copied().ok_or_else(|| CliError::Usage(format!("chamber index {idx} out of range 0..{}", b.chambers.len())))
}

fn betti_output(f: Format, k: &btsigma::complex::CellComplex, set: &CellSet) -> Output {
    if f == Format::Csv {
        return Output::Text(betti_csv(k, set));
    }
    let cc = ChainComplexF2::new(k, set);
    let top = set.iter().map(|&c| k.dim(c)).max().unwrap_or(0);
    Output::Json(json!({
        "cells": set.len(),
        "betti": (0..=top).map(|d| json!({ "dim": d, "betti": cc.betti(d) })).collect::<Vec<_>>(),
    }))
}

fn sigma_context(a: &SigmaArgs) -> Result<SigmaContext, CliError> {
    let rank = match (a.n, a.rank) {
        (Some(n), None) if a.family == Family::A && n >= 2 => n - 1,
        (Some(_), None) => return Err(CliError::Usage("--n is the SL_n size and needs type A with n ≥ 2; use --rank".into())),
        (None, Some(r)) => r,
        _ => return Err(CliError::Usage("give --n or --rank".into())),
    };
    Ok(SigmaContext::new(a.family, rank, &plist(&a.primes)?)?)
}

fn cached_report(suite: Suite, cfg: &CertifyConfig, fresh: bool) -> String {
    let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let key = format!("certify-{}-{}-{}.json", serde_json::to_value(suite).unwrap().as_str().unwrap(), cfg.seed, if cfg.sl3_positive { "full" } else { "nosl3" });
    if let (Some(d), false, false) = (&dir, fresh, cfg.timings) {
        if let Ok(s) = std::fs::read_to_string(d.join(&key)) {
            return s;
        }
    }
    let out = certify(suite, cfg).to_json();
    if let (Some(d), false) = (&dir, cfg.timings) {
        if std::fs::create_dir_all(d).is_ok() {
            let _ = std::fs::write(d.join(&key), &out);
        }
    }
    out
}

fn run(cli: &Cli) -> Result<(Output, bool), CliError> {
    let f = cli.format;
    let ok = |o| Ok((o, true));
    match &cli.cmd {
        Command::Rootsys { cmd: RootsysCmd::Show { ty } } => {
            expect_format(f, &[Format::Json])?;
            let rd = build_root_system(ty.family, ty.rank).map_err(|e| CliError::Usage(e.to_string()))?;
            let vecs = |v: &[Vec<Q>]| v.iter().map(|r| r.iter().map(to_pq).collect::<Vec<_>>()).collect::<Vec<_>>();
            let coroots: Vec<Vec<Q>> = (0..rd.roots.len()).map(|i| rd.coroot(i)).collect();
            ok(Output::Json(json!({
                "family": rd.family,
                "rank": rd.rank,
                "simple_roots": vecs(&rd.simple_roots),
                "roots": vecs(&rd.roots),
                "coroots": vecs(&coroots),
                "gram": vecs(&rd.gram),
                "cartan": rd.cartan,
                "highest_root": rd.highest_root,
            })))
        }
        Command::Coxeter { cmd } => match cmd {
            CoxeterCmd::Window { w } => {
                expect_format(f, &[Format::Json, Format::Dot])?;
                let win = window(w)?;
                ok(if f == Format::Dot { Output::Text(win.export_dot(None)) } else { Output::Json(win.export_json(None)) })
            }
            CoxeterCmd::Deconstruct { w, chambers, height, r, sector } => {
                expect_format(f, &[Format::Json])?;
                let win = window(w)?;
                let sigma = win.ap.sigma();
                let mut z = match (chambers, height) {
                    (Some(c), _) => {
                        let mut ids = Vec::new();
                        for part in c.split(';') {
                            let cell = btsigma::coxeter::AlcoveCell::from_floors(&ilist(part)?);
                            ids.push(win.id_of(&cell).ok_or_else(|| CliError::Usage(format!("chamber {part:?} is not in the window")))?);
                        }
                        win.closure_of_chambers(&ids)
                    }
                    (None, Some(h)) => win.lower_complex(&HeightForm::new(qlist(h)?), &qval(r)?)?,
                    (None, None) => return Err(CliError::Usage("give --chambers or --height".into())),
                };
                if let Some(v) = sector {
                    let k = closed_sector(&win, &qlist(v)?, &sigma.opposite());
                    z = z.intersection(&k).copied().collect();
                }
                let filt = win.deconstruct(&z, &sigma)?;
                let certified = filt.certified();
                Ok((Output::Json(json!({ "certified": certified, "filtration": filt })), certified))
            }
        },
        Command::Sphere { cmd } => match cmd {
            SphereCmd::Build { s } => {
                expect_format(f, &[Format::Json, Format::Dot])?;
                let b = flag_building(s)?;
                ok(if f == Format::Dot { Output::Text(b.export_dot(None)) } else { Output::Json(b.export_json(None)) })
            }
            SphereCmd::Opp { s, chamber } => {
                let b = flag_building(s)?;
                let c = chamber_of(&b, *chamber)?;
                let opp = b.opposition_complex(c)?;
                ok(match f {
                    Format::Dot => Output::Text(b.export_dot(Some(&opp))),
                    Format::Csv => betti_output(f, &b.complex, &opp),
                    Format::Json => {
                        let Output::Json(bt) = betti_output(f, &b.complex, &opp) else { unreachable!() };
                        Output::Json(json!({ "chamber": c, "homology": bt, "complex": b.export_json(Some(&opp)) }))
                    }
                })
            }
            SphereCmd::Apartment { s, chamber } => {
                expect_format(f, &[Format::Json])?;
                let b = flag_building(s)?;
                let c = chamber_of(&b, *chamber)?;
                let res = b.find_opposite_apartment(c)?;
                let found = res.apartment.is_some();
                let ap = res.apartment.as_ref().map(|a| json!({ "frame": a.frame, "chambers": a.chambers }));
                Ok((
                    Output::Json(json!({
                        "chamber": c,
                        "apartment": ap,
                        "guarantee": res.guarantee,
                        "thickness": res.thickness,
                        "chambers_per_apartment": res.chambers_per_apartment,
                        "frames_examined": res.frames_examined,
                    })),
                    found,
                ))
            }
        },
        Command::Chevalley { cmd: ChevalleyCmd::CheckRelations { n, trials } } => {
            expect_format(f, &[Format::Json])?;
            if *n < 2 {
                return Err(CliError::Usage("n must be at least 2".into()));
            }
            let rep = check_relations(*n, *trials, &mut ChaCha8Rng::seed_from_u64(cli.seed));
            let all = rep.all();
            Ok((Output::Json(json!({ "all": all, "report": rep })), all))
        }
        Command::Building { cmd } => match cmd {
            BuildingCmd::Grow { t } => {
                expect_format(f, &[Format::Json, Format::Dot])?;
                let tr = t.grow()?;
                ok(if f == Format::Dot { Output::Text(tr.export_dot(None)) } else { Output::Json(tr.export_json(None)) })
            }
            BuildingCmd::Retract { t } => {
                expect_format(f, &[Format::Json, Format::Csv])?;
                let tr = t.grow()?;
                if f == Format::Csv {
                    let mut s = String::from("vertex,depth,y\n");
                    for v in 0..tr.num_vertices() {
                        let y: Vec<String> = tr.retraction[v].iter().map(|x| x.to_string()).collect();
                        s.push_str(&format!("{},{},{}\n", v, tr.vertex_depth[v], y.join(" ")));
                    }
                    return ok(Output::Text(s));
                }
                ok(Output::Json(json!((0..tr.num_vertices()).map(|v| json!({ "vertex": v, "depth": tr.vertex_depth[v], "y": tr.retraction[v] })).collect::<Vec<_>>())))
            }
            BuildingCmd::Superlevel { t, height, r } => {
                let tr = t.grow()?;
                let h = HeightSpec::new(qlist(height)?);
                let set = tr.superlevel_complex(&h, Some(&qval(r)?));
                ok(match f {
                    Format::Dot => Output::Text(tr.export_dot(Some(&set))),
                    Format::Csv => betti_output(f, &tr.complex, &set),
                    Format::Json => Output::Json(tr.export_json(Some(&set))),
                })
            }
            BuildingCmd::ConeChain { n, p, radius, height, r, s, t } => {
                expect_format(f, &[Format::Json])?;
                let tr = Truncation::grow(*n, *p, *radius)?;
                let cert = cone_chain(&tr, &default_cone_matrix(*n), &HeightSpec::new(qlist(height)?), &qval(r)?, &qval(s)?, &qval(t)?)?;
                let all = cert.all();
                Ok((Output::Json(json!({ "all": all, "certificate": cert })), all))
            }
            BuildingCmd::Positive { t, height, r, inner } => {
                expect_format(f, &[Format::Json])?;
                let tr = t.grow()?;
                let cert = positive_certificate(&tr, &HeightForm::new(qlist(height)?), &qval(r)?, *inner)?;
                let good = cert.nonempty && (tr.n < 3 || cert.connected);
                Ok((Output::Json(serde_json::to_value(&cert).unwrap()), good))
            }
        },
        Command::Homology { cmd } => match cmd {
            HomologyCmd::Opp { s, chamber } => {
                expect_format(f, &[Format::Json, Format::Csv])?;
                let b = flag_building(s)?;
                let opp = b.opposition_complex(chamber_of(&b, *chamber)?)?;
                ok(betti_output(f, &b.complex, &opp))
            }
            HomologyCmd::Superlevel { t, height, r } => {
                expect_format(f, &[Format::Json, Format::Csv])?;
                let tr = t.grow()?;
                let set = tr.superlevel_complex(&HeightSpec::new(qlist(height)?), Some(&qval(r)?));
                ok(betti_output(f, &tr.complex, &set))
            }
            HomologyCmd::Pair { t, height, s, t_shift, dim } => {
                expect_format(f, &[Format::Json])?;
                let tr = t.grow()?;
                let h = HeightSpec::new(qlist(height)?);
                let s = qval(s)?;
                let deep = &s + qval(t_shift)?;
                let big = tr.superlevel_complex(&h, Some(&s));
                let small = tr.superlevel_complex(&h, Some(&deep));
                let res = induced_map_trivial(&tr.complex, &small, &big, *dim).map_err(|e| CliError::Math { message: e.to_string(), witness: Value::Null })?;
                ok(Output::Json(serde_json::to_value(&res).unwrap()))
            }
        },
        Command::Sigma { cmd } => match cmd {
            SigmaCmd::Verdict { ctx, chi, k } => {
                expect_format(f, &[Format::Json])?;
                let c = sigma_context(ctx)?;
                let x = c.character(&qlist(chi)?)?;
                let v = sigma_verdict(&c, &x, *k)?;
                ok(Output::Json(json!({ "context": c, "chi": x.coefficients().iter().map(to_pq).collect::<Vec<_>>(), "k": k, "verdict": v })))
            }
            SigmaCmd::Fintype { ctx, kernel_of, k } => {
                expect_format(f, &[Format::Json])?;
                let c = sigma_context(ctx)?;
                let chars = kernel_of.split(';').map(|s| c.character(&qlist(s)?).map_err(CliError::from)).collect::<Result<Vec<_>, _>>()?;
                let v = finiteness_type(&c, &chars, *k)?;
                ok(Output::Json(json!({ "context": c, "k": k, "verdict": v })))
            }
        },
        Command::Certify { suite, skip_sl3, timings, fresh } => {
            expect_format(f, &[Format::Json])?;
            let cfg = CertifyConfig { seed: cli.seed, sl3_positive: !skip_sl3, timings: *timings };
            let text = cached_report(*suite, &cfg, *fresh);
            let report: Value = serde_json::from_str(&text).expect("report is valid JSON");
            let passed = report["criteria"].as_array().is_some_and(|cs| cs.iter().all(|c| c["status"] != "FAIL"));
            Ok((Output::Text(text + "\n"), passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid thread count");
            return ExitCode::from(2);
        }
    }
    let json_errors = cli.format == Format::Json;
    match run(&cli) {
        Ok((out, good)) => {
            let text = match out {
                Output::Json(v) => serde_json::to_string_pretty(&v).unwrap() + "\n",
                Output::Text(s) => s,
            };
            // a closed pipe downstream is not an error of ours
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(if good { 0 } else { 1 })
        }
        Err(e) => {
            let (code, kind, message, witness) = match e {
                CliError::Usage(m) => (2, "usage", m, Value::Null),
                CliError::Math { message, witness } => (1, "precondition", message, witness),
            };
            if json_errors {
                let text = serde_json::to_string_pretty(&json!({ "error": kind, "message": message, "witness": witness })).unwrap() + "\n";
                let _ = std::io::stdout().lock().write_all(text.as_bytes());
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}
